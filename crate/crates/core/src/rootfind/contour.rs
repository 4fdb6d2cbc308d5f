//! Winding numbers of det Γ along closed contours by phase tracking.

use std::f64::consts::{FRAC_PI_2, PI};

use num_complex::Complex64;

use crate::chardet::{log_derivative, log_det_gamma};
use crate::error::{Error, Result};
use crate::geometry::Configuration;

/// Largest accepted `|f′/f|·step`. A zero of any order within about one step
/// of the path pushes the product above this and forces refinement, which the
/// phase test alone misses for double zeros (a full turn between samples).
const MAX_LOG_DERIVATIVE_STEP: f64 = 1.0;

/// Relative boundary shifts tried when a zero sits on or near a contour.
pub const JITTER: [f64; 5] = [1e-3, 3e-3, 1e-2, 3e-2, 1e-1];

/// Closed, positively oriented contour.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Contour {
    Rect { x0: f64, x1: f64, y0: f64, y1: f64 },
    Disc { center: Complex64, radius: f64 },
}

impl Contour {
    pub fn square(center: Complex64, half_side: f64) -> Self {
        Contour::Rect {
            x0: center.re - half_side,
            x1: center.re + half_side,
            y0: center.im - half_side,
            y1: center.im + half_side,
        }
    }

    pub fn disc(center: Complex64, radius: f64) -> Self {
        Contour::Disc { center, radius }
    }

    fn size(&self) -> f64 {
        match *self {
            Contour::Rect { x0, x1, y0, y1 } => (x1 - x0).max(y1 - y0),
            Contour::Disc { radius, .. } => 2.0 * radius,
        }
    }

    /// Outward shift by `rel` times the contour size.
    pub fn expanded(&self, rel: f64) -> Self {
        let s = rel * self.size();
        match *self {
            Contour::Rect { x0, x1, y0, y1 } => Contour::Rect {
                x0: x0 - s,
                x1: x1 + s,
                y0: y0 - s,
                y1: y1 + s,
            },
            Contour::Disc { center, radius } => Contour::Disc {
                center,
                radius: radius + s / 2.0,
            },
        }
    }

    pub fn contains(&self, z: Complex64) -> bool {
        match *self {
            Contour::Rect { x0, x1, y0, y1 } => z.re >= x0 && z.re <= x1 && z.im >= y0 && z.im <= y1,
            Contour::Disc { center, radius } => (z - center).norm() <= radius,
        }
    }
}

/// Winding number and the largest ln|det Γ| seen along the contour.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Winding {
    pub count: i64,
    pub max_ln_abs: f64,
}

/// Accumulated phase change along a path.
#[derive(Debug, Clone, Copy)]
pub(crate) struct PathPhase {
    pub dphase: f64,
    pub max_ln_abs: f64,
}

/// Samples det Γ along `path(t)`, t ∈ [0, 1], refining each step until the
/// phase increment between neighbours is below π/2.
pub(crate) struct PhaseTracker<'a> {
    cfg: &'a Configuration,
    /// Upper bound on |d arg e^{iVz}/dz| used to set the initial spacing.
    rate: f64,
}

impl<'a> PhaseTracker<'a> {
    pub fn new(cfg: &'a Configuration) -> Self {
        let n = cfg.len();
        let v_bound: f64 = (0..n).map(|i| (0..n).map(|j| cfg.d(i, j)).fold(0.0, f64::max)).sum();
        PhaseTracker {
            cfg,
            rate: v_bound.max(1.0),
        }
    }

    /// `(ln|f|, f/|f|, |f′/f|)` at `z`.
    fn sample(&self, z: Complex64) -> Result<(f64, Complex64, f64)> {
        let (l, u) = log_det_gamma(self.cfg, z)?;
        if !l.is_finite() {
            return Err(Error::BoundaryZero(0));
        }
        let g = log_derivative(self.cfg, z)?.norm();
        if !g.is_finite() {
            return Err(Error::BoundaryZero(0));
        }
        Ok((l, u, g))
    }

    pub fn path<F: Fn(f64) -> Complex64>(&self, path: F, length: f64, scale: f64) -> Result<PathPhase> {
        let pieces = ((length * self.rate / 0.4).ceil() as usize).clamp(8, 1 << 22);
        let min_dt = (1e-12 * scale / length.max(f64::MIN_POSITIVE)).max(1e-15);
        let mut total = 0.0;
        let (mut max_ln, mut u_prev, mut g_prev) = self.sample(path(0.0))?;
        let mut t_prev = 0.0;
        let mut pending: Vec<(f64, f64, Complex64, f64)> = Vec::new();
        for k in (1..=pieces).rev() {
            let t = k as f64 / pieces as f64;
            let (l, u, g) = self.sample(path(t))?;
            pending.push((t, l, u, g));
        }
        while let Some(&(t, l, u, g)) = pending.last() {
            let d = (u / u_prev).arg();
            let step = (t - t_prev) * length;
            if d.abs() < FRAC_PI_2 && g_prev.max(g) * step <= MAX_LOG_DERIVATIVE_STEP {
                total += d;
                max_ln = max_ln.max(l);
                t_prev = t;
                u_prev = u;
                g_prev = g;
                pending.pop();
            } else {
                if t - t_prev < min_dt {
                    return Err(Error::BoundaryZero(0));
                }
                let tm = 0.5 * (t_prev + t);
                let (lm, um, gm) = self.sample(path(tm))?;
                pending.push((tm, lm, um, gm));
            }
        }
        Ok(PathPhase {
            dphase: total,
            max_ln_abs: max_ln,
        })
    }

    pub fn segment(&self, a: Complex64, b: Complex64, scale: f64) -> Result<PathPhase> {
        self.path(|t| a + (b - a) * t, (b - a).norm(), scale)
    }

    pub fn winding(&self, contour: &Contour) -> Result<Winding> {
        let (total, max_ln) = match *contour {
            Contour::Rect { x0, x1, y0, y1 } => {
                let scale = contour.size();
                let corners = [
                    Complex64::new(x0, y0),
                    Complex64::new(x1, y0),
                    Complex64::new(x1, y1),
                    Complex64::new(x0, y1),
                ];
                let mut total = 0.0;
                let mut max_ln = f64::NEG_INFINITY;
                for k in 0..4 {
                    let p = self.segment(corners[k], corners[(k + 1) % 4], scale)?;
                    total += p.dphase;
                    max_ln = max_ln.max(p.max_ln_abs);
                }
                (total, max_ln)
            }
            Contour::Disc { center, radius } => {
                let p = self.path(
                    |t| center + Complex64::from_polar(radius, 2.0 * PI * t),
                    2.0 * PI * radius,
                    2.0 * radius,
                )?;
                (p.dphase, p.max_ln_abs)
            }
        };
        let turns = total / (2.0 * PI);
        let count = turns.round();
        if (turns - count).abs() > 0.25 {
            return Err(Error::BoundaryZero(0));
        }
        Ok(Winding {
            count: count as i64,
            max_ln_abs: max_ln,
        })
    }
}

/// Number of zeros of det Γ inside `contour`, counted with multiplicity.
///
/// A zero on or very near the boundary makes the phase track fail; the
/// contour is then pushed outward through [`JITTER`] before giving up.
pub fn count_zeros(c: &Configuration, contour: &Contour) -> Result<usize> {
    if c.is_empty() {
        return Ok(0);
    }
    let tracker = PhaseTracker::new(c);
    let mut attempt = tracker.winding(contour);
    for &rel in &JITTER {
        match attempt {
            Err(Error::BoundaryZero(_)) => attempt = tracker.winding(&contour.expanded(rel)),
            _ => break,
        }
    }
    match attempt {
        Ok(w) if w.count >= 0 => Ok(w.count as usize),
        Ok(w) => Err(Error::InvalidInput(format!("negative winding {}", w.count))),
        Err(Error::BoundaryZero(_)) => Err(Error::BoundaryZero(JITTER.len())),
        Err(e) => Err(e),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cx(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn single_center_counts() {
        let c = Configuration::new(vec![[0.0; 3]], cx(1.0, 0.0)).unwrap();
        let k0 = cx(0.0, -4.0 * PI);
        assert_eq!(count_zeros(&c, &Contour::disc(k0, 1.0)).unwrap(), 1);
        assert_eq!(count_zeros(&c, &Contour::disc(cx(0.0, 0.0), 1.0)).unwrap(), 0);
        assert_eq!(count_zeros(&c, &Contour::square(cx(0.0, 0.0), 20.0)).unwrap(), 1);
    }

    #[test]
    fn zero_on_boundary_is_jittered_away() {
        let c = Configuration::new(vec![[0.0; 3]], cx(1.0, 0.0)).unwrap();
        // the zero −4πi lies exactly on this circle
        let contour = Contour::disc(cx(0.0, 0.0), 4.0 * PI);
        assert_eq!(count_zeros(&c, &contour).unwrap(), 1);
    }

    #[test]
    fn empty_configuration_has_no_zeros() {
        let c = Configuration::new(vec![], cx(1.0, 0.0)).unwrap();
        assert_eq!(count_zeros(&c, &Contour::disc(cx(0.0, 0.0), 5.0)).unwrap(), 0);
    }
}
