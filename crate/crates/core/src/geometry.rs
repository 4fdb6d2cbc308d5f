//! Point configurations, their distance matrices, diameter and size.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::assignment::max_weight_assignment;
use crate::error::{Error, Result};

pub type Point3 = [f64; 3];

/// Relative tolerance under which two centers count as coincident.
pub const DEDUP_REL_TOL: f64 = 1e-12;

/// Largest N accepted by [`brute_force_v`].
pub const BRUTE_FORCE_MAX: usize = 8;

pub fn dist(a: &Point3, b: &Point3) -> f64 {
    let dx = a[0] - b[0];
    let dy = a[1] - b[1];
    let dz = a[2] - b[2];
    (dx * dx + dy * dy + dz * dz).sqrt()
}

/// A finite simple set of interaction centers in R³ together with the common
/// strength parameter α.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "ConfigurationJson", into = "ConfigurationJson")]
pub struct Configuration {
    points: Vec<Point3>,
    alpha: Complex64,
    min_sep: f64,
    // row-major N×N
    distances: Vec<f64>,
}

#[derive(Serialize, Deserialize)]
struct ConfigurationJson {
    alpha: [f64; 2],
    points: Vec<Point3>,
}

impl TryFrom<ConfigurationJson> for Configuration {
    type Error = Error;

    fn try_from(raw: ConfigurationJson) -> Result<Self> {
        Configuration::new(raw.points, Complex64::new(raw.alpha[0], raw.alpha[1]))
    }
}

impl From<Configuration> for ConfigurationJson {
    fn from(c: Configuration) -> Self {
        ConfigurationJson {
            alpha: [c.alpha.re, c.alpha.im],
            points: c.points,
        }
    }
}

impl Configuration {
    /// Validates that the centers are finite and pairwise distinct.
    ///
    /// Two centers are duplicates when their distance is at most
    /// `1e-12 · max(1, largest coordinate magnitude)`.
    pub fn new(points: Vec<Point3>, alpha: Complex64) -> Result<Self> {
        if points.iter().flatten().any(|x| !x.is_finite()) {
            return Err(Error::InvalidInput("non-finite coordinate".into()));
        }
        if !alpha.re.is_finite() || !alpha.im.is_finite() {
            return Err(Error::InvalidInput("non-finite alpha".into()));
        }
        let n = points.len();
        let max_coord = points.iter().flatten().fold(0.0_f64, |m, x| m.max(x.abs()));
        let tol = DEDUP_REL_TOL * max_coord.max(1.0);
        let mut distances = vec![0.0; n * n];
        let mut min_sep = f64::INFINITY;
        for i in 0..n {
            for j in (i + 1)..n {
                let d = dist(&points[i], &points[j]);
                if d <= tol {
                    return Err(Error::DuplicatePoints(i, j, d));
                }
                distances[i * n + j] = d;
                distances[j * n + i] = d;
                min_sep = min_sep.min(d);
            }
        }
        Ok(Configuration {
            points,
            alpha,
            min_sep,
            distances,
        })
    }

    pub fn points(&self) -> &[Point3] {
        &self.points
    }

    pub fn alpha(&self) -> Complex64 {
        self.alpha
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    /// Smallest pairwise distance; `+∞` when N ≤ 1.
    pub fn min_sep(&self) -> f64 {
        self.min_sep
    }

    /// Cached |Y_i − Y_j|.
    #[inline]
    pub fn d(&self, i: usize, j: usize) -> f64 {
        self.distances[i * self.points.len() + j]
    }

    pub fn distance_matrix(&self) -> DistanceMatrix {
        DistanceMatrix {
            n: self.len(),
            entries: self.distances.clone(),
        }
    }

    /// Same centers, different strength.
    pub fn with_alpha(&self, alpha: Complex64) -> Self {
        Configuration {
            alpha,
            ..self.clone()
        }
    }

    /// Stable 64-bit fingerprint of the exact coordinates and α (FNV-1a).
    pub fn fingerprint(&self) -> u64 {
        let mut h: u64 = 0xcbf29ce484222325;
        let mut eat = |x: f64| {
            for b in x.to_bits().to_le_bytes() {
                h ^= b as u64;
                h = h.wrapping_mul(0x100000001b3);
            }
        };
        eat(self.alpha.re);
        eat(self.alpha.im);
        for p in &self.points {
            p.iter().for_each(|&x| eat(x));
        }
        h
    }
}

/// Symmetric matrix of pairwise Euclidean distances with zero diagonal.
#[derive(Debug, Clone, PartialEq)]
pub struct DistanceMatrix {
    n: usize,
    entries: Vec<f64>,
}

impl DistanceMatrix {
    pub fn n(&self) -> usize {
        self.n
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.entries[i * self.n + j]
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.entries
    }
}

/// Distance matrix of a configuration.
pub fn distance_matrix(c: &Configuration) -> DistanceMatrix {
    c.distance_matrix()
}

/// Largest pairwise distance, with `diam ∅ = 0` and the diameter of a single
/// point also 0.
pub fn diameter(c: &Configuration) -> f64 {
    diameter_of_points(c.points())
}

/// Direct O(N²) scan over all pairs; used where building a validated
/// configuration is unnecessary (large Monte Carlo samples).
pub fn diameter_of_points(points: &[Point3]) -> f64 {
    let mut best = 0.0_f64;
    for (i, a) in points.iter().enumerate() {
        for b in &points[i + 1..] {
            let dx = a[0] - b[0];
            let dy = a[1] - b[1];
            let dz = a[2] - b[2];
            best = best.max(dx * dx + dy * dy + dz * dz);
        }
    }
    best.sqrt()
}

/// The size `V(Y) = max_σ Σ_j |Y_j − Y_σ(j)|` with one maximizing permutation.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SizeResult {
    pub value: f64,
    pub argmax_permutation: Vec<usize>,
}

/// Exact size via a max-weight assignment on the distance matrix, O(N³).
pub fn size_v(c: &Configuration) -> Result<SizeResult> {
    if c.is_empty() {
        return Err(Error::EmptyConfiguration);
    }
    let a = max_weight_assignment(&c.distances, c.len());
    Ok(SizeResult {
        value: a.value,
        argmax_permutation: a.perm,
    })
}

/// Size of a raw point list, skipping configuration validation.
pub fn size_v_of_points(points: &[Point3]) -> f64 {
    let n = points.len();
    let mut w = vec![0.0; n * n];
    for i in 0..n {
        for j in 0..n {
            w[i * n + j] = dist(&points[i], &points[j]);
        }
    }
    max_weight_assignment(&w, n).value
}

/// Exhaustive maximum over S_N in lexicographic order; the first permutation
/// that beats the running best by more than 1e-12 relative wins.
pub fn brute_force_v(c: &Configuration) -> Result<SizeResult> {
    let n = c.len();
    if n == 0 {
        return Err(Error::EmptyConfiguration);
    }
    if n > BRUTE_FORCE_MAX {
        return Err(Error::TooLarge {
            what: "brute_force_v",
            n,
            limit: BRUTE_FORCE_MAX,
        });
    }
    let mut perm: Vec<usize> = (0..n).collect();
    let objective = |p: &[usize]| p.iter().enumerate().map(|(i, &j)| c.d(i, j)).sum::<f64>();
    let mut best = SizeResult {
        value: objective(&perm),
        argmax_permutation: perm.clone(),
    };
    while next_permutation(&mut perm) {
        let v = objective(&perm);
        if v > best.value + 1e-12 * best.value.abs() {
            best = SizeResult {
                value: v,
                argmax_permutation: perm.clone(),
            };
        }
    }
    Ok(best)
}

/// Advances to the next permutation in lexicographic order; false at the last one.
pub(crate) fn next_permutation(p: &mut [usize]) -> bool {
    let n = p.len();
    if n < 2 {
        return false;
    }
    let mut i = n - 1;
    while i > 0 && p[i - 1] >= p[i] {
        i -= 1;
    }
    if i == 0 {
        return false;
    }
    let mut j = n - 1;
    while p[j] <= p[i - 1] {
        j -= 1;
    }
    p.swap(i - 1, j);
    p[i..].reverse();
    true
}
