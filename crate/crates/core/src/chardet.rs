//! The characteristic matrix Γ_Y(z) of a point-interaction Hamiltonian, its
//! determinant and derivative, the resolvent kernel, and resonance widths.
//!
//! Entries are
//!
//! ```text
//! Γ_jj'(z) = (α − iz/4π) δ_jj' − G̃_z(Y_j − Y_j'),   G_z(x) = e^{iz|x|} / (4π|x|),  G̃_z(0) = 0.
//! ```
//!
//! Off-diagonal entries grow like `e^{|Im z|·|Y_j − Y_j'|}` in the lower
//! half-plane, so evaluation fails with [`Error::Overflow`] once
//! `−Im z · diam Y` approaches the f64 exponent range.

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{dist, Configuration, Point3};
use crate::linalg::{equilibrate_rows, Lu};

const FOUR_PI: f64 = 4.0 * PI;
const I: Complex64 = Complex64::new(0.0, 1.0);

/// Relative threshold on |det Γ| under which the resolvent is refused.
pub const SINGULAR_TOL: f64 = 1e-10;

/// Below this pivot ratio the trace identity for det′ is abandoned.
const TRACE_PIVOT_RATIO: f64 = 1e-8;

/// Largest exponent accepted when forming e^{izd}.
const MAX_EXPONENT: f64 = 700.0;

#[derive(Debug, Clone, PartialEq)]
pub struct GammaEval {
    pub z: Complex64,
    pub n: usize,
    /// Row-major, symmetric.
    pub matrix: Vec<Complex64>,
}

impl GammaEval {
    pub fn get(&self, i: usize, j: usize) -> Complex64 {
        self.matrix[i * self.n + j]
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct KernelValue {
    pub value: Complex64,
    pub z: Complex64,
    pub x: Point3,
    pub xp: Point3,
}

/// `e^{iz r}` with an overflow guard.
#[inline]
fn exp_iz(z: Complex64, r: f64) -> Result<Complex64> {
    let w = I * z * r;
    if w.re > MAX_EXPONENT {
        return Err(Error::Overflow(z));
    }
    Ok(w.exp())
}

/// Free Green function `e^{iz|v|} / (4π|v|)`.
pub fn free_green(z: Complex64, v: Point3) -> Result<Complex64> {
    let r = dist(&v, &[0.0; 3]);
    if r == 0.0 {
        return Err(Error::ZeroSeparation);
    }
    Ok(exp_iz(z, r)? / (FOUR_PI * r))
}

fn gamma_entries(c: &Configuration, z: Complex64) -> Result<Vec<Complex64>> {
    let n = c.len();
    let diag = c.alpha() - I * z / FOUR_PI;
    let mut m = vec![Complex64::new(0.0, 0.0); n * n];
    for i in 0..n {
        m[i * n + i] = diag;
        for j in (i + 1)..n {
            let d = c.d(i, j);
            let g = -exp_iz(z, d)? / (FOUR_PI * d);
            m[i * n + j] = g;
            m[j * n + i] = g;
        }
    }
    Ok(m)
}

/// Entrywise derivative Γ′(z).
fn gamma_derivative_entries(c: &Configuration, z: Complex64) -> Result<Vec<Complex64>> {
    let n = c.len();
    let k = -I / FOUR_PI;
    let mut m = vec![Complex64::new(0.0, 0.0); n * n];
    for i in 0..n {
        m[i * n + i] = k;
        for j in (i + 1)..n {
            let g = k * exp_iz(z, c.d(i, j))?;
            m[i * n + j] = g;
            m[j * n + i] = g;
        }
    }
    Ok(m)
}

pub fn gamma_matrix(c: &Configuration, z: Complex64) -> Result<GammaEval> {
    if c.is_empty() {
        return Err(Error::EmptyConfiguration);
    }
    Ok(GammaEval {
        z,
        n: c.len(),
        matrix: gamma_entries(c, z)?,
    })
}

pub fn det_gamma(c: &Configuration, z: Complex64) -> Result<Complex64> {
    if c.is_empty() {
        return Err(Error::EmptyConfiguration);
    }
    Ok(Lu::factor(gamma_entries(c, z)?, c.len()).det())
}

/// `(ln|det Γ(z)|, det Γ(z)/|det Γ(z)|)`; the phase is what the argument
/// principle tracks.
pub fn log_det_gamma(c: &Configuration, z: Complex64) -> Result<(f64, Complex64)> {
    if c.is_empty() {
        return Err(Error::EmptyConfiguration);
    }
    Ok(crate::linalg::log_det(gamma_entries(c, z)?, c.len()))
}

/// `D_Y(z) = (−4π)^N det Γ_Y(z)`, with `D_∅ = 1`.
pub fn modified_determinant(c: &Configuration, z: Complex64) -> Result<Complex64> {
    if c.is_empty() {
        return Ok(Complex64::new(1.0, 0.0));
    }
    Ok(det_gamma(c, z)? * (-FOUR_PI).powi(c.len() as i32))
}

/// `d/dz det Γ(z)`.
///
/// Uses `det · tr(Γ⁻¹Γ′)` when the factorization is well conditioned and the
/// column-replacement sum `Σ_k det(Γ with column k := Γ′ column k)` otherwise.
pub fn det_gamma_derivative(c: &Configuration, z: Complex64) -> Result<Complex64> {
    if c.is_empty() {
        return Err(Error::EmptyConfiguration);
    }
    let n = c.len();
    let g = gamma_entries(c, z)?;
    let dg = gamma_derivative_entries(c, z)?;
    let lu = Lu::factor(g.clone(), n);
    if lu.pivot_ratio() > TRACE_PIVOT_RATIO {
        Ok(lu.det() * trace_inv_product(&lu, &dg, n))
    } else {
        Ok(column_replacement_derivative(&g, &dg, n))
    }
}

/// `det′/det = tr(Γ⁻¹Γ′)`. Infinite at an exact zero of the determinant.
pub fn log_derivative(c: &Configuration, z: Complex64) -> Result<Complex64> {
    if c.is_empty() {
        return Err(Error::EmptyConfiguration);
    }
    let n = c.len();
    let mut g = gamma_entries(c, z)?;
    let mut dg = gamma_derivative_entries(c, z)?;
    // Γ⁻¹Γ′ is unchanged when both rows are scaled alike
    for (i, e) in equilibrate_rows(&mut g, n).into_iter().enumerate() {
        let s = 2f64.powi(-e);
        for v in &mut dg[i * n..(i + 1) * n] {
            *v *= s;
        }
    }
    let lu = Lu::factor(g, n);
    if lu.is_singular() {
        return Ok(Complex64::new(f64::INFINITY, 0.0));
    }
    Ok(trace_inv_product(&lu, &dg, n))
}

fn trace_inv_product(lu: &Lu, dg: &[Complex64], n: usize) -> Complex64 {
    let mut tr = Complex64::new(0.0, 0.0);
    let mut col = vec![Complex64::new(0.0, 0.0); n];
    for k in 0..n {
        for i in 0..n {
            col[i] = dg[i * n + k];
        }
        tr += lu.solve(&col)[k];
    }
    tr
}

fn column_replacement_derivative(g: &[Complex64], dg: &[Complex64], n: usize) -> Complex64 {
    (0..n)
        .map(|k| {
            let mut m = g.to_vec();
            for i in 0..n {
                m[i * n + k] = dg[i * n + k];
            }
            Lu::factor(m, n).det()
        })
        .sum()
}

/// Integral kernel of `(H_Y − z²)⁻¹` at `(x, xp)`.
pub fn resolvent_kernel(c: &Configuration, z: Complex64, x: Point3, xp: Point3) -> Result<KernelValue> {
    if x == xp {
        return Err(Error::CoincidentArguments);
    }
    if c.points().iter().any(|y| *y == x || *y == xp) {
        return Err(Error::PointOnCenter);
    }
    let sub = |a: Point3, b: Point3| [a[0] - b[0], a[1] - b[1], a[2] - b[2]];
    let mut value = free_green(z, sub(x, xp))?;
    if !c.is_empty() {
        let n = c.len();
        let g = gamma_entries(c, z)?;
        let scale = singular_scale(c, z, &g);
        let (ln_abs, _) = crate::linalg::log_det(g.clone(), n);
        let lu = Lu::factor(g, n);
        if lu.is_singular() || ln_abs < SINGULAR_TOL.ln() + n as f64 * scale.ln() {
            return Err(Error::SingularGamma(z));
        }
        let gx: Vec<Complex64> = c.points().iter().map(|y| free_green(z, sub(x, *y))).collect::<Result<_>>()?;
        let gxp: Vec<Complex64> = c.points().iter().map(|y| free_green(z, sub(xp, *y))).collect::<Result<_>>()?;
        let w = lu.solve(&gxp);
        value += gx.iter().zip(&w).map(|(a, b)| a * b).sum::<Complex64>();
    }
    Ok(KernelValue { value, z, x, xp })
}

/// Magnitude scale of the individual terms making up Γ(z).
fn singular_scale(c: &Configuration, z: Complex64, g: &[Complex64]) -> f64 {
    let off = g.iter().enumerate().filter(|(k, _)| k % (c.len() + 1) != 0).fold(0.0_f64, |m, (_, v)| m.max(v.norm()));
    c.alpha().norm().max(z.norm() / FOUR_PI).max(off).max(f64::MIN_POSITIVE)
}

/// Width `4|Im k · Re k|` of a resonance.
pub fn resonance_width(k: Complex64) -> f64 {
    4.0 * (k.im * k.re).abs()
}
