//! Resonance search: quadtree subdivision by winding numbers plus Newton.

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::contour::{Contour, PhaseTracker, Winding, JITTER};
use crate::chardet::{log_derivative, log_det_gamma};
use crate::error::{Error, Result};
use crate::geometry::Configuration;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SearchOptions {
    /// Smallest cell side, relative to R.
    pub min_cell_rel: f64,
    pub newton_max_iter: usize,
}

impl Default for SearchOptions {
    fn default() -> Self {
        SearchOptions {
            min_cell_rel: 1e-6,
            newton_max_iter: 60,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Root {
    pub k: Complex64,
    pub multiplicity: usize,
    /// |det Γ(k)| relative to max |det Γ| on the boundary of the cell it was found in.
    pub residual: f64,
}

/// Zeros of det Γ in the closed disc of radius `radius`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ResonanceSet {
    /// Sorted by real part, then imaginary part.
    pub roots: Vec<Root>,
    pub radius: f64,
    pub config_hash: u64,
}

impl ResonanceSet {
    pub fn total_multiplicity(&self) -> usize {
        self.roots.iter().map(|r| r.multiplicity).sum()
    }

    /// True if a root sits at k = 0 (within 1e-12·R); its physical status is
    /// convention-dependent and is only flagged.
    pub fn has_zero_resonance(&self) -> bool {
        self.roots.iter().any(|r| r.k.norm() <= 1e-12 * self.radius)
    }

    /// CSV with header `re,im,multiplicity,residual`.
    pub fn to_csv(&self) -> String {
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record(["re", "im", "multiplicity", "residual"]).expect("in-memory write");
        for r in &self.roots {
            w.write_record(&[
                format!("{:e}", r.k.re),
                format!("{:e}", r.k.im),
                r.multiplicity.to_string(),
                format!("{:e}", r.residual),
            ])
            .expect("in-memory write");
        }
        String::from_utf8(w.into_inner().expect("in-memory flush")).expect("ascii")
    }

    pub fn from_csv(text: &str, radius: f64, config_hash: u64) -> Result<Self> {
        let mut rd = csv::Reader::from_reader(text.as_bytes());
        let bad = |e: &dyn std::fmt::Display| Error::InvalidInput(format!("resonance csv: {e}"));
        let mut roots = Vec::new();
        for rec in rd.records() {
            let rec = rec.map_err(|e| bad(&e))?;
            let num = |i: usize| rec.get(i).ok_or_else(|| bad(&"missing column")).and_then(|s| s.parse::<f64>().map_err(|e| bad(&e)));
            roots.push(Root {
                k: Complex64::new(num(0)?, num(1)?),
                multiplicity: rec.get(2).unwrap_or("").parse().map_err(|e| bad(&e))?,
                residual: num(3)?,
            });
        }
        Ok(ResonanceSet { roots, radius, config_hash })
    }
}

#[derive(Debug, Clone, Copy)]
struct Cell {
    x0: f64,
    x1: f64,
    y0: f64,
    y1: f64,
}

impl Cell {
    fn side(&self) -> f64 {
        (self.x1 - self.x0).max(self.y1 - self.y0)
    }

    fn center(&self) -> Complex64 {
        Complex64::new(0.5 * (self.x0 + self.x1), 0.5 * (self.y0 + self.y1))
    }

    fn contains(&self, z: Complex64, margin: f64) -> bool {
        z.re >= self.x0 - margin && z.re <= self.x1 + margin && z.im >= self.y0 - margin && z.im <= self.y1 + margin
    }

    fn contour(&self) -> Contour {
        Contour::Rect {
            x0: self.x0,
            x1: self.x1,
            y0: self.y0,
            y1: self.y1,
        }
    }

    fn split(&self, xm: f64, ym: f64) -> [Cell; 4] {
        let Cell { x0, x1, y0, y1 } = *self;
        [
            Cell { x0, x1: xm, y0, y1: ym },
            Cell { x0: xm, x1, y0, y1: ym },
            Cell { x0, x1: xm, y0: ym, y1 },
            Cell { x0: xm, x1, y0: ym, y1 },
        ]
    }
}

struct Search<'a> {
    cfg: &'a Configuration,
    tracker: PhaseTracker<'a>,
    min_cell: f64,
    opts: SearchOptions,
}

impl Search<'_> {
    /// Newton on `f/f′` scaled by the multiplicity. Multiple zeros are only
    /// determined to roughly the square root of the evaluation accuracy, so
    /// for `m > 1` the iterate with the smallest |f| is returned once the
    /// steps stop shrinking.
    fn newton(&self, z0: Complex64, m: usize) -> Option<Complex64> {
        let mut z = z0;
        let mut best: Option<(f64, Complex64)> = None;
        let mut last_step = f64::INFINITY;
        for _ in 0..self.opts.newton_max_iter {
            let ld = log_derivative(self.cfg, z).ok()?;
            if ld.re.is_infinite() {
                return Some(z);
            }
            if m > 1 {
                let l = log_det_gamma(self.cfg, z).ok()?.0;
                if best.is_none_or(|(b, _)| l < b) {
                    best = Some((l, z));
                }
            }
            let step = m as f64 / ld;
            if !step.re.is_finite() || !step.im.is_finite() {
                return None;
            }
            z -= step;
            let len = step.norm();
            if len <= 4.0 * f64::EPSILON * z.norm().max(1.0) {
                return Some(z);
            }
            if m > 1 && len >= last_step && len <= 1e-6 * z.norm().max(1.0) {
                return best.map(|(_, b)| b);
            }
            last_step = len;
        }
        if m > 1 {
            best.map(|(_, b)| b).filter(|_| last_step <= 1e-6 * z.norm().max(1.0))
        } else {
            None
        }
    }

    fn residual(&self, k: Complex64, cell_max_ln: f64) -> f64 {
        match log_det_gamma(self.cfg, k) {
            Ok((l, _)) => (l - cell_max_ln).exp(),
            Err(_) => f64::INFINITY,
        }
    }

    fn root_in(&self, cell: &Cell, count: usize, w: &Winding) -> Option<Root> {
        let margin = 1e-9 * cell.side();
        let z = self.newton(cell.center(), count)?;
        cell.contains(z, margin).then(|| Root {
            k: z,
            multiplicity: count,
            residual: self.residual(z, w.max_ln_abs),
        })
    }

    fn solve(&self, cell: Cell, w: Winding) -> Result<Vec<Root>> {
        let count = w.count as usize;
        if count == 0 {
            return Ok(Vec::new());
        }
        let small = cell.side() <= self.min_cell;
        if count == 1 || small {
            if let Some(r) = self.root_in(&cell, count, &w) {
                return Ok(vec![r]);
            }
        }
        if small {
            // bisection-in-cell fallback: restart Newton from the quarter points
            let c = cell.center();
            let q = 0.25 * cell.side();
            for d in [Complex64::new(q, q), Complex64::new(-q, q), Complex64::new(q, -q), Complex64::new(-q, -q)] {
                if let Some(z) = self.newton(c + d, count) {
                    if cell.contains(z, 1e-9 * cell.side()) {
                        return Ok(vec![Root {
                            k: z,
                            multiplicity: count,
                            residual: self.residual(z, w.max_ln_abs),
                        }]);
                    }
                }
            }
            return Err(Error::NonConvergence(c));
        }
        let (children, windings) = self.subdivide(&cell, count)?;
        let parts: Vec<Result<Vec<Root>>> = children
            .into_par_iter()
            .zip(windings)
            .map(|(child, cw)| self.solve(child, cw))
            .collect();
        let mut out = Vec::new();
        for p in parts {
            out.extend(p?);
        }
        Ok(out)
    }

    fn subdivide(&self, cell: &Cell, count: usize) -> Result<(Vec<Cell>, Vec<Winding>)> {
        let c = cell.center();
        let shifts = std::iter::once(0.0).chain(JITTER.iter().copied());
        for rel in shifts {
            let xm = c.re + rel * (cell.x1 - cell.x0);
            let ym = c.im + rel * (cell.y1 - cell.y0);
            let children = cell.split(xm, ym);
            let windings: Result<Vec<Winding>> = children.iter().map(|ch| self.tracker.winding(&ch.contour())).collect();
            match windings {
                Ok(ws) if ws.iter().all(|w| w.count >= 0) && ws.iter().map(|w| w.count as usize).sum::<usize>() == count => {
                    return Ok((children.to_vec(), ws));
                }
                Ok(_) | Err(Error::BoundaryZero(_)) => continue,
                Err(e) => return Err(e),
            }
        }
        Err(Error::BoundaryZero(JITTER.len()))
    }
}

/// All resonances with |k| ≤ `radius`, with default options.
pub fn find_resonances(c: &Configuration, radius: f64) -> Result<ResonanceSet> {
    find_resonances_with(c, radius, SearchOptions::default())
}

pub fn find_resonances_with(c: &Configuration, radius: f64, opts: SearchOptions) -> Result<ResonanceSet> {
    if radius.is_nan() || radius <= 0.0 {
        return Err(Error::InvalidInput(format!("radius must be positive, got {radius}")));
    }
    let config_hash = c.fingerprint();
    if c.is_empty() {
        return Ok(ResonanceSet {
            roots: Vec::new(),
            radius,
            config_hash,
        });
    }
    let search = Search {
        cfg: c,
        tracker: PhaseTracker::new(c),
        min_cell: opts.min_cell_rel * radius,
        opts,
    };
    let mut top = None;
    for rel in std::iter::once(0.0).chain(JITTER.iter().copied()) {
        let half = radius * (1.0 + rel);
        let cell = Cell {
            x0: -half,
            x1: half,
            y0: -half,
            y1: half,
        };
        match search.tracker.winding(&cell.contour()) {
            Ok(w) => {
                top = Some((cell, w));
                break;
            }
            Err(Error::BoundaryZero(_)) => continue,
            Err(e) => return Err(e),
        }
    }
    let (cell, w) = top.ok_or(Error::BoundaryZero(JITTER.len()))?;
    let mut roots: Vec<Root> = search.solve(cell, w)?.into_iter().filter(|r| r.k.norm() <= radius).collect();
    roots.sort_by(|a, b| a.k.re.total_cmp(&b.k.re).then(a.k.im.total_cmp(&b.k.im)));
    Ok(ResonanceSet {
        roots,
        radius,
        config_hash,
    })
}
