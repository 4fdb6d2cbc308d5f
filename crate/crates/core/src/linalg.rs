//! Small dense complex LU factorization with partial pivoting.

use num_complex::Complex64;

#[derive(Debug, Clone)]
pub struct Lu {
    n: usize,
    lu: Vec<Complex64>,
    perm: Vec<usize>,
    odd: bool,
}

impl Lu {
    /// Factors the row-major `n×n` matrix `a` in place. Exactly singular
    /// columns leave a zero pivot behind; `det` is then zero.
    pub fn factor(mut a: Vec<Complex64>, n: usize) -> Self {
        debug_assert_eq!(a.len(), n * n);
        let mut perm: Vec<usize> = (0..n).collect();
        let mut odd = false;
        for k in 0..n {
            let mut p = k;
            let mut best = a[k * n + k].norm();
            for i in (k + 1)..n {
                let v = a[i * n + k].norm();
                if v > best {
                    best = v;
                    p = i;
                }
            }
            if p != k {
                for j in 0..n {
                    a.swap(k * n + j, p * n + j);
                }
                perm.swap(k, p);
                odd = !odd;
            }
            let pivot = a[k * n + k];
            if pivot == Complex64::new(0.0, 0.0) {
                continue;
            }
            for i in (k + 1)..n {
                let f = a[i * n + k] / pivot;
                a[i * n + k] = f;
                if f != Complex64::new(0.0, 0.0) {
                    for j in (k + 1)..n {
                        let t = a[k * n + j];
                        a[i * n + j] -= f * t;
                    }
                }
            }
        }
        Lu { n, lu: a, perm, odd }
    }

    pub fn pivots(&self) -> impl Iterator<Item = Complex64> + '_ {
        (0..self.n).map(move |k| self.lu[k * self.n + k])
    }

    pub fn det(&self) -> Complex64 {
        let p: Complex64 = self.pivots().product();
        if self.odd {
            -p
        } else {
            p
        }
    }

    /// `(ln|det|, det/|det|)`; avoids overflow in the product of pivots.
    pub fn log_det(&self) -> (f64, Complex64) {
        let mut ln_abs = 0.0;
        let mut phase = Complex64::new(if self.odd { -1.0 } else { 1.0 }, 0.0);
        for p in self.pivots() {
            let r = p.norm();
            if r == 0.0 {
                return (f64::NEG_INFINITY, Complex64::new(1.0, 0.0));
            }
            ln_abs += r.ln();
            phase *= p / r;
        }
        // renormalize the accumulated unit factor
        (ln_abs, phase / phase.norm())
    }

    /// Ratio of smallest to largest pivot magnitude.
    pub fn pivot_ratio(&self) -> f64 {
        let (mut lo, mut hi) = (f64::INFINITY, 0.0_f64);
        for p in self.pivots() {
            lo = lo.min(p.norm());
            hi = hi.max(p.norm());
        }
        if hi == 0.0 {
            0.0
        } else {
            lo / hi
        }
    }

    pub fn is_singular(&self) -> bool {
        self.pivots().any(|p| p == Complex64::new(0.0, 0.0))
    }

    /// Solves `A x = b`. Undefined if singular.
    pub fn solve(&self, b: &[Complex64]) -> Vec<Complex64> {
        let n = self.n;
        let mut x: Vec<Complex64> = self.perm.iter().map(|&i| b[i]).collect();
        for i in 0..n {
            for j in 0..i {
                let t = self.lu[i * n + j] * x[j];
                x[i] -= t;
            }
        }
        for i in (0..n).rev() {
            for j in (i + 1)..n {
                let t = self.lu[i * n + j] * x[j];
                x[i] -= t;
            }
            x[i] /= self.lu[i * n + i];
        }
        x
    }
}

/// Scales every row by a power of two so that its largest entry lies in
/// `[1, 2)`. Returns the base-2 exponents removed; zero rows are left alone.
pub fn equilibrate_rows(a: &mut [Complex64], n: usize) -> Vec<i32> {
    (0..n)
        .map(|i| {
            let row = &mut a[i * n..(i + 1) * n];
            let big = row.iter().fold(0.0_f64, |m, v| m.max(v.re.abs()).max(v.im.abs()));
            if big == 0.0 || !big.is_finite() {
                return 0;
            }
            let e = big.log2().floor() as i32;
            let s = 2f64.powi(-e);
            for v in row.iter_mut() {
                *v *= s;
            }
            e
        })
        .collect()
}

/// `(ln|det a|, det a/|det a|)` after row equilibration, so that entries of
/// very different magnitude never overflow inside the elimination.
pub fn log_det(mut a: Vec<Complex64>, n: usize) -> (f64, Complex64) {
    let exps = equilibrate_rows(&mut a, n);
    let (l, u) = Lu::factor(a, n).log_det();
    (l + exps.iter().map(|&e| e as f64).sum::<f64>() * std::f64::consts::LN_2, u)
}

pub fn det(a: Vec<Complex64>, n: usize) -> Complex64 {
    if n == 0 {
        return Complex64::new(1.0, 0.0);
    }
    Lu::factor(a, n).det()
}
