//! The modified characteristic determinant as an exponential polynomial.
//!
//! `D_Y(z) = (−4π)^N det Γ_Y(z)` expands by the Leibniz formula into one
//! exp-monomial per permutation σ:
//!
//! ```text
//! ε_σ · Π_{σ(j)≠j} |Y_j − Y_σ(j)|⁻¹ · (iz − 4πα)^{#fixed points} · e^{iz V_σ(Y)},
//! V_σ(Y) = Σ_j |Y_j − Y_σ(j)|.
//! ```
//!
//! Grouping equal frequencies gives the canonical form `Σ_j P_j(z) e^{iB_j z}`.
//! The upper concave hull of the points `(B_j, deg P_j)` (the distribution
//! diagram) determines the asymptotic chains of zeros: a hull segment from
//! `(B, d)` to `(B′, d′)` carries `d − d′` chains with parameter
//! `K = (d − d′)/(B′ − B)`.

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{diameter, next_permutation, size_v, Configuration, SizeResult};

const FOUR_PI: f64 = 4.0 * PI;
const I: Complex64 = Complex64::new(0.0, 1.0);

/// Default cap on N for the symbolic expansion (8! = 40320 permutations).
pub const DEFAULT_N_MAX: usize = 8;
/// Relative tolerance for merging frequencies.
pub const FREQ_GROUP_TOL: f64 = 1e-9;
/// Relative tolerance under which a summed coefficient counts as cancelled.
pub const CANCEL_TOL: f64 = 1e-10;
/// Tolerance of the Weyl test `|B_max − V| ≤ tol · max(1, V)`.
pub const WEYL_TOL: f64 = 1e-9;

/// `p(z) e^{i·frequency·z}` with ascending polynomial coefficients.
#[derive(Debug, Clone, PartialEq)]
pub struct ExpMonomial {
    pub frequency: f64,
    pub coeffs: Vec<Complex64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExpTerm {
    pub freq: f64,
    pub coeffs: Vec<Complex64>,
}

impl ExpTerm {
    pub fn degree(&self) -> usize {
        self.coeffs.len().saturating_sub(1)
    }
}

/// Canonical form: strictly increasing frequencies, nontrivial polynomials.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(from = "CanonicalJson", into = "CanonicalJson")]
pub struct CanonicalExpPoly {
    pub terms: Vec<ExpTerm>,
    pub n_points: usize,
    pub alpha: Complex64,
}

#[derive(Serialize, Deserialize)]
struct TermJson {
    freq: f64,
    coeffs: Vec<[f64; 2]>,
}

#[derive(Serialize, Deserialize)]
struct CanonicalJson {
    alpha: [f64; 2],
    n: usize,
    terms: Vec<TermJson>,
}

impl From<CanonicalJson> for CanonicalExpPoly {
    fn from(raw: CanonicalJson) -> Self {
        CanonicalExpPoly {
            alpha: Complex64::new(raw.alpha[0], raw.alpha[1]),
            n_points: raw.n,
            terms: raw
                .terms
                .into_iter()
                .map(|t| ExpTerm {
                    freq: t.freq,
                    coeffs: t.coeffs.into_iter().map(|[re, im]| Complex64::new(re, im)).collect(),
                })
                .collect(),
        }
    }
}

impl From<CanonicalExpPoly> for CanonicalJson {
    fn from(p: CanonicalExpPoly) -> Self {
        CanonicalJson {
            alpha: [p.alpha.re, p.alpha.im],
            n: p.n_points,
            terms: p
                .terms
                .into_iter()
                .map(|t| TermJson {
                    freq: t.freq,
                    coeffs: t.coeffs.into_iter().map(|c| [c.re, c.im]).collect(),
                })
                .collect(),
        }
    }
}

impl CanonicalExpPoly {
    pub fn max_frequency(&self) -> f64 {
        self.terms.last().map_or(0.0, |t| t.freq)
    }
}

/// Coefficients of `(iz − 4πα)^k` for k = 0..=n.
fn linear_powers(alpha: Complex64, n: usize) -> Vec<Vec<Complex64>> {
    let root = [-FOUR_PI * alpha, I];
    let mut out = vec![vec![Complex64::new(1.0, 0.0)]];
    for k in 1..=n {
        let prev = &out[k - 1];
        let mut next = vec![Complex64::new(0.0, 0.0); k + 1];
        for (i, &c) in prev.iter().enumerate() {
            next[i] += c * root[0];
            next[i + 1] += c * root[1];
        }
        out.push(next);
    }
    out
}

fn permutation_sign(p: &[usize]) -> f64 {
    let mut seen = vec![false; p.len()];
    let mut transpositions = 0;
    for s in 0..p.len() {
        if seen[s] {
            continue;
        }
        let mut len = 0;
        let mut j = s;
        while !seen[j] {
            seen[j] = true;
            j = p[j];
            len += 1;
        }
        transpositions += len - 1;
    }
    if transpositions % 2 == 0 {
        1.0
    } else {
        -1.0
    }
}

/// Leibniz expansion of `D_Y`, one monomial per permutation in lexicographic order.
pub fn expand_determinant(c: &Configuration, n_max: usize) -> Result<Vec<ExpMonomial>> {
    let n = c.len();
    if n == 0 {
        return Err(Error::EmptyConfiguration);
    }
    if n > n_max {
        return Err(Error::TooLarge {
            what: "symbolic expansion",
            n,
            limit: n_max,
        });
    }
    let powers = linear_powers(c.alpha(), n);
    let mut perm: Vec<usize> = (0..n).collect();
    let mut out = Vec::new();
    loop {
        let mut freq = 0.0;
        let mut amp = permutation_sign(&perm);
        let mut fixed = 0;
        for (j, &s) in perm.iter().enumerate() {
            if s == j {
                fixed += 1;
            } else {
                let d = c.d(j, s);
                freq += d;
                amp /= d;
            }
        }
        out.push(ExpMonomial {
            frequency: freq,
            coeffs: powers[fixed].iter().map(|&x| x * amp).collect(),
        });
        if !next_permutation(&mut perm) {
            break;
        }
    }
    Ok(out)
}

/// Groups equal frequencies, sums their polynomials and drops cancelled ones.
pub fn canonicalize(monomials: &[ExpMonomial], n_points: usize, alpha: Complex64) -> Result<CanonicalExpPoly> {
    if monomials.is_empty() {
        return Err(Error::InvalidInput("no monomials".into()));
    }
    let mut order: Vec<usize> = (0..monomials.len()).collect();
    order.sort_by(|&a, &b| monomials[a].frequency.total_cmp(&monomials[b].frequency));

    let mut terms = Vec::new();
    let mut start = 0;
    while start < order.len() {
        let anchor = monomials[order[start]].frequency;
        let mut end = start + 1;
        while end < order.len() && monomials[order[end]].frequency - anchor <= FREQ_GROUP_TOL * (1.0 + anchor.abs()) {
            end += 1;
        }
        let group = &order[start..end];
        let len = group.iter().map(|&i| monomials[i].coeffs.len()).max().unwrap_or(0);
        let mut sum = vec![Complex64::new(0.0, 0.0); len];
        let mut largest = 0.0_f64;
        let mut freq = 0.0;
        for &i in group {
            freq += monomials[i].frequency;
            for (k, &c) in monomials[i].coeffs.iter().enumerate() {
                sum[k] += c;
                largest = largest.max(c.norm());
            }
        }
        freq /= group.len() as f64;
        let threshold = CANCEL_TOL * largest;
        while sum.last().is_some_and(|c| c.norm() <= threshold) {
            sum.pop();
        }
        if !sum.is_empty() {
            terms.push(ExpTerm { freq, coeffs: sum });
        }
        start = end;
    }
    if terms.is_empty() {
        return Err(Error::FullCancellation);
    }
    Ok(CanonicalExpPoly { terms, n_points, alpha })
}

/// Expand and canonicalize in one step.
pub fn canonical_form(c: &Configuration, n_max: usize) -> Result<CanonicalExpPoly> {
    canonicalize(&expand_determinant(c, n_max)?, c.len(), c.alpha())
}

/// `Σ_j P_j(z) e^{iB_j z}`.
pub fn eval_canonical(p: &CanonicalExpPoly, z: Complex64) -> Complex64 {
    p.terms
        .iter()
        .map(|t| {
            let poly = t.coeffs.iter().rev().fold(Complex64::new(0.0, 0.0), |acc, &c| acc * z + c);
            poly * (I * z * t.freq).exp()
        })
        .sum()
}

/// Vertices `(B, degree)` of the upper concave hull, starting at `(0, N)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DistributionDiagram {
    pub hull: Vec<(f64, usize)>,
}

pub fn distribution_diagram(p: &CanonicalExpPoly) -> DistributionDiagram {
    let mut hull: Vec<(f64, f64)> = Vec::new();
    for t in &p.terms {
        let c = (t.freq, t.degree() as f64);
        while hull.len() >= 2 {
            let a = hull[hull.len() - 2];
            let b = hull[hull.len() - 1];
            let lhs = (b.0 - a.0) * (c.1 - b.1);
            let rhs = (b.1 - a.1) * (c.0 - b.0);
            // keep b only for a strict clockwise turn
            let tol = 1e-9 * (lhs.abs() + rhs.abs());
            if lhs - rhs >= -tol {
                hull.pop();
            } else {
                break;
            }
        }
        hull.push(c);
    }
    DistributionDiagram {
        hull: hull.into_iter().map(|(b, d)| (b, d as usize)).collect(),
    }
}

/// Sorted chain parameters K₁ ≤ … ≤ K_{n₁}.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct KMultiset {
    pub values: Vec<f64>,
}

impl KMultiset {
    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn min(&self) -> Option<f64> {
        self.values.first().copied()
    }

    pub fn max(&self) -> Option<f64> {
        self.values.last().copied()
    }

    /// Distinct values with multiplicities, merging within 1e-9 relative.
    pub fn grouped(&self) -> Vec<(f64, usize)> {
        let mut out: Vec<(f64, usize)> = Vec::new();
        for &k in &self.values {
            match out.last_mut() {
                Some((v, m)) if (k - *v).abs() <= 1e-9 * v.abs() => *m += 1,
                _ => out.push((k, 1)),
            }
        }
        out
    }
}

/// Chain parameters from the hull; `diam` is used as a cross-check of K₁.
pub fn k_multiset(diag: &DistributionDiagram, diam: f64) -> Result<KMultiset> {
    let n = diag.hull.first().map_or(0, |v| v.1);
    if n <= 1 {
        return Ok(KMultiset { values: Vec::new() });
    }
    let mut values = Vec::new();
    for w in diag.hull.windows(2) {
        let ((b0, d0), (b1, d1)) = (w[0], w[1]);
        let drop = d0 - d1;
        let k = drop as f64 / (b1 - b0);
        values.extend(std::iter::repeat_n(k, drop));
    }
    values.sort_by(f64::total_cmp);
    if let Some(&k1) = values.first() {
        let inv = 1.0 / diam;
        if (k1 - inv).abs() > 1e-9 * inv {
            return Err(Error::DiamMismatch { k1, inv_diam: inv });
        }
    }
    Ok(KMultiset { values })
}

/// Weyl-type asymptotics: the largest surviving frequency equals V(Y).
pub fn is_weyl(p: &CanonicalExpPoly, v: &SizeResult) -> bool {
    (p.max_frequency() - v.value).abs() <= WEYL_TOL * v.value.max(1.0)
}

/// Total asymptotic density `B_max / π`.
pub fn symbolic_density(p: &CanonicalExpPoly) -> Result<f64> {
    if p.terms.len() < 2 {
        return Err(Error::DegenerateSingleTerm);
    }
    Ok(p.max_frequency() / PI)
}

/// Two-term predictor `πK(2m+1) − iK·Ln|πK(2m+1)|` for chain `j` (0-based).
pub fn chain_prediction(k: &KMultiset, j: usize, m: i64) -> Result<Complex64> {
    let kj = *k.values.get(j).ok_or(Error::IndexOutOfRange { index: j, len: k.len() })?;
    let x = PI * kj * (2 * m + 1) as f64;
    Ok(Complex64::new(x, -kj * x.abs().ln()))
}

/// All symbolic asymptotic data of one configuration.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Asymptotics {
    pub size: SizeResult,
    pub diameter: f64,
    pub canonical: CanonicalExpPoly,
    pub diagram: DistributionDiagram,
    pub k: KMultiset,
    pub weyl: bool,
    /// `None` when only the zero frequency survives (N ≤ 1).
    pub ad_symbolic: Option<f64>,
}

pub fn analyze(c: &Configuration, n_max: usize) -> Result<Asymptotics> {
    let size = size_v(c)?;
    let diam = diameter(c);
    let canonical = canonical_form(c, n_max)?;
    let diagram = distribution_diagram(&canonical);
    let k = k_multiset(&diagram, diam)?;
    let weyl = is_weyl(&canonical, &size);
    let ad_symbolic = symbolic_density(&canonical).ok();
    Ok(Asymptotics {
        size,
        diameter: diam,
        canonical,
        diagram,
        k,
        weyl,
        ad_symbolic,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cx(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn config(points: Vec<[f64; 3]>) -> Configuration {
        Configuration::new(points, cx(1.0, 0.0)).unwrap()
    }

    fn triangle() -> Configuration {
        config(vec![[0.0, 0.0, 0.0], [1.0, 0.0, 0.0], [0.5, 3f64.sqrt() / 2.0, 0.0]])
    }

    fn close(a: Complex64, b: Complex64) -> bool {
        (a - b).norm() <= 1e-12 * (1.0 + b.norm())
    }

    #[test]
    fn single_center_expansion() {
        let c = config(vec![[0.0; 3]]);
        let m = expand_determinant(&c, DEFAULT_N_MAX).unwrap();
        assert_eq!(m.len(), 1);
        assert_eq!(m[0].frequency, 0.0);
        assert!(close(m[0].coeffs[0], cx(-FOUR_PI, 0.0)));
        assert!(close(m[0].coeffs[1], I));
        let p = canonicalize(&m, 1, c.alpha()).unwrap();
        assert_eq!(p.terms.len(), 1);
        assert_eq!(symbolic_density(&p), Err(Error::DegenerateSingleTerm));
        assert!(eval_canonical(&p, cx(0.0, -FOUR_PI)).norm() < 1e-13);
        let d = distribution_diagram(&p);
        assert_eq!(d.hull, vec![(0.0, 1)]);
        assert!(k_multiset(&d, 0.0).unwrap().is_empty());
    }

    #[test]
    fn two_center_canonical_form() {
        let l = 1.0;
        let c = config(vec![[0.0; 3], [l, 0.0, 0.0]]);
        let m = expand_determinant(&c, DEFAULT_N_MAX).unwrap();
        assert_eq!(m.len(), 2);
        assert_eq!(m[1].frequency, 2.0 * l);
        assert_eq!(m[1].coeffs, vec![cx(-1.0 / (l * l), 0.0)]);
        let p = canonicalize(&m, 2, c.alpha()).unwrap();
        assert_eq!(p.terms.len(), 2);
        assert_eq!(p.terms[0].freq, 0.0);
        // (iz − 4π)² = −z² − 8πi z + 16π²
        let expected = [cx(16.0 * PI * PI, 0.0), cx(0.0, -8.0 * PI), cx(-1.0, 0.0)];
        for (a, b) in p.terms[0].coeffs.iter().zip(expected) {
            assert!(close(*a, b));
        }
        assert_eq!(p.terms[1].freq, 2.0);
        assert_eq!(p.terms[1].coeffs, vec![cx(-1.0, 0.0)]);
        assert!(close(eval_canonical(&p, cx(0.0, 0.0)), cx(16.0 * PI * PI - 1.0, 0.0)));
        let d = distribution_diagram(&p);
        assert_eq!(d.hull, vec![(0.0, 2), (2.0, 0)]);
        let k = k_multiset(&d, 1.0).unwrap();
        assert_eq!(k.values, vec![1.0, 1.0]);
        assert!((symbolic_density(&p).unwrap() - 2.0 / PI).abs() < 1e-15);
        assert!(is_weyl(&p, &size_v(&c).unwrap()));
    }

    #[test]
    fn three_cycles_share_frequency_and_amplitude() {
        let c = config(vec![[0.0; 3], [1.0, 0.2, 0.0], [0.3, 0.8, 0.5]]);
        let m = expand_determinant(&c, DEFAULT_N_MAX).unwrap();
        assert_eq!(m.len(), 6);
        // lexicographic order: 012, 021, 102, 120, 201, 210
        assert_eq!(m[0].frequency, 0.0);
        assert_eq!(m[0].coeffs.len(), 4);
        assert!((m[3].frequency - m[4].frequency).abs() < 1e-15);
        assert!(close(m[3].coeffs[0], m[4].coeffs[0]));
        // 3-cycles are even
        assert!(m[3].coeffs[0].re > 0.0);
    }

    #[test]
    fn equilateral_triangle() {
        let c = triangle();
        let p = canonical_form(&c, DEFAULT_N_MAX).unwrap();
        assert_eq!(p.terms.len(), 3);
        assert!((p.terms[1].freq - 2.0).abs() < 1e-12);
        assert_eq!(p.terms[1].degree(), 1);
        // three transpositions, each −(iz − 4π)
        assert!(close(p.terms[1].coeffs[1], cx(0.0, -3.0)));
        assert!((p.terms[2].freq - 3.0).abs() < 1e-12);
        assert_eq!(p.terms[2].coeffs.len(), 1);
        assert!(close(p.terms[2].coeffs[0], cx(2.0, 0.0)));
        let d = distribution_diagram(&p);
        assert_eq!(d.hull.len(), 2);
        assert_eq!(d.hull[0], (0.0, 3));
        assert_eq!(d.hull[1].1, 0);
        assert!((d.hull[1].0 - 3.0).abs() < 1e-12);
        let k = k_multiset(&d, diameter(&c)).unwrap();
        assert_eq!(k.len(), 3);
        for v in &k.values {
            assert!((v - 1.0).abs() < 1e-12);
        }
        assert!((symbolic_density(&p).unwrap() - 3.0 / PI).abs() < 1e-12);
    }

    #[test]
    fn diam_mismatch_detected() {
        let d = DistributionDiagram {
            hull: vec![(0.0, 2), (2.0, 0)],
        };
        assert!(matches!(k_multiset(&d, 2.0), Err(Error::DiamMismatch { .. })));
    }

    #[test]
    fn chain_predictions() {
        let k = KMultiset { values: vec![1.0, 1.0] };
        let z = chain_prediction(&k, 0, 10).unwrap();
        assert!((z.re - 21.0 * PI).abs() < 1e-12);
        assert!((z.im + (21.0 * PI).ln()).abs() < 1e-12);
        assert!((z.re - 65.97).abs() < 0.01 && (z.im + 4.19).abs() < 0.01);
        let z = chain_prediction(&k, 1, -11).unwrap();
        assert!((z.re + 21.0 * PI).abs() < 1e-12);
        assert!((z.im + (21.0 * PI).ln()).abs() < 1e-12);
        assert_eq!(chain_prediction(&k, 2, 0), Err(Error::IndexOutOfRange { index: 2, len: 2 }));
    }

    #[test]
    fn too_large() {
        let pts: Vec<[f64; 3]> = (0..9).map(|i| [i as f64, (i * i) as f64, 0.0]).collect();
        assert!(matches!(expand_determinant(&config(pts), DEFAULT_N_MAX), Err(Error::TooLarge { .. })));
    }

    #[test]
    fn json_schema() {
        let p = canonical_form(&config(vec![[0.0; 3], [1.0, 0.0, 0.0]]), DEFAULT_N_MAX).unwrap();
        let v: serde_json::Value = serde_json::to_value(&p).unwrap();
        assert_eq!(v["n"], 2);
        assert_eq!(v["alpha"], serde_json::json!([1.0, 0.0]));
        assert_eq!(v["terms"][1]["freq"], 2.0);
        assert_eq!(v["terms"][1]["coeffs"], serde_json::json!([[-1.0, 0.0]]));
        let back: CanonicalExpPoly = serde_json::from_value(v).unwrap();
        assert_eq!(back, p);
    }
}
