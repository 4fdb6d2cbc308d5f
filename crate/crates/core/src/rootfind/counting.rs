//! Counting functions of a computed resonance set and the chain structure
//! read off from them.
//!
//! `N(R)` counts resonances with `|k| ≤ R`; the logarithmic counting function
//! `N^log(h, R)` only those above the curve `Im k = −h·ln(|Re k| + 1)`. A chain
//! of resonances with parameter K sits on `Im k ≈ −K ln|k| + O(1)`, so
//! `N^log(h, R)/R` steps up by `w/(πK)` near `h = K` when w chains share the
//! parameter K.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use super::quadtree::ResonanceSet;
use crate::error::{Error, Result};
use crate::exppoly::KMultiset;

/// Smallest searched radius accepted by [`extract_k_numeric`].
pub const R_MIN_EXTRACTION: f64 = 150.0;
/// Coarsest h-grid spacing accepted by [`extract_k_numeric`].
pub const MAX_H_STEP: f64 = 0.02;
/// Fraction of R_max below which resonances are ignored when extracting chains.
const EXTRACTION_INNER_FRACTION: f64 = 0.15;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LogStep {
    pub h: f64,
    /// Increase of `N^log(·, R_max)/R_max` at this grid point.
    pub height: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CountingReport {
    pub radii: Vec<f64>,
    pub counts: Vec<usize>,
    pub h_grid: Vec<f64>,
    /// `log_counts[i][j] = N^log(h_grid[j], radii[i])`.
    pub log_counts: Vec<Vec<usize>>,
    /// Least-squares slope of N(R) over the upper half of the radius grid.
    pub ad_estimate: f64,
    pub ad_log_steps: Vec<LogStep>,
}

fn check_radius(rs: &ResonanceSet, r: f64) -> Result<()> {
    if r > rs.radius {
        return Err(Error::RegionExceeded {
            requested: r,
            searched: rs.radius,
        });
    }
    Ok(())
}

/// `N(R)` for every R in `radii`.
pub fn counting_function(rs: &ResonanceSet, radii: &[f64]) -> Result<Vec<usize>> {
    radii
        .iter()
        .map(|&r| {
            check_radius(rs, r)?;
            Ok(rs.roots.iter().filter(|x| x.k.norm() <= r).map(|x| x.multiplicity).sum())
        })
        .collect()
}

fn above_log_curve(k: num_complex::Complex64, h: f64) -> bool {
    -h * (k.re.abs() + 1.0).ln() <= k.im
}

/// `N^log(h, R)` for every h in `h_grid`.
pub fn log_counting(rs: &ResonanceSet, h_grid: &[f64], r: f64) -> Result<Vec<usize>> {
    check_radius(rs, r)?;
    Ok(h_grid
        .iter()
        .map(|&h| {
            rs.roots
                .iter()
                .filter(|x| x.k.norm() <= r && above_log_curve(x.k, h))
                .map(|x| x.multiplicity)
                .sum()
        })
        .collect())
}

/// Least-squares slope of `ys` against `xs`.
pub(crate) fn ls_slope(xs: &[f64], ys: &[f64]) -> Option<f64> {
    ls_fit(xs, ys, None).map(|(s, _)| s)
}

/// Weighted least squares; returns (slope, standard error of the slope).
fn ls_fit(xs: &[f64], ys: &[f64], w: Option<&[f64]>) -> Option<(f64, f64)> {
    let n = xs.len();
    if n < 2 {
        return None;
    }
    let wt = |i: usize| w.map_or(1.0, |w| w[i]);
    let sw: f64 = (0..n).map(wt).sum();
    let mx = (0..n).map(|i| wt(i) * xs[i]).sum::<f64>() / sw;
    let my = (0..n).map(|i| wt(i) * ys[i]).sum::<f64>() / sw;
    let sxx: f64 = (0..n).map(|i| wt(i) * (xs[i] - mx).powi(2)).sum();
    if sxx <= 0.0 {
        return None;
    }
    let slope = (0..n).map(|i| wt(i) * (xs[i] - mx) * (ys[i] - my)).sum::<f64>() / sxx;
    let se = if n > 2 {
        let rss: f64 = (0..n).map(|i| wt(i) * (ys[i] - my - slope * (xs[i] - mx)).powi(2)).sum();
        (rss / (n as f64 - 2.0) / sxx).sqrt()
    } else {
        f64::INFINITY
    };
    Some((slope, se))
}

/// Full report over a radius grid and an h-grid (both ascending).
pub fn counting_report(rs: &ResonanceSet, radii: &[f64], h_grid: &[f64]) -> Result<CountingReport> {
    if radii.windows(2).any(|w| w[1] <= w[0]) || h_grid.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::InvalidInput("grids must be strictly increasing".into()));
    }
    let counts = counting_function(rs, radii)?;
    let log_counts = radii.iter().map(|&r| log_counting(rs, h_grid, r)).collect::<Result<Vec<_>>>()?;
    let upper = radii.len() / 2;
    let xs = &radii[upper..];
    let ys: Vec<f64> = counts[upper..].iter().map(|&c| c as f64).collect();
    let ad_estimate = ls_slope(xs, &ys)
        .or_else(|| radii.last().map(|&r| counts[counts.len() - 1] as f64 / r))
        .unwrap_or(0.0)
        .max(0.0);
    let mut ad_log_steps = Vec::new();
    if let (Some(&r_max), Some(last)) = (radii.last(), log_counts.last()) {
        for j in 1..h_grid.len() {
            if last[j] > last[j - 1] {
                ad_log_steps.push(LogStep {
                    h: h_grid[j],
                    height: (last[j] - last[j - 1]) as f64 / r_max,
                });
            }
        }
    }
    Ok(CountingReport {
        radii: radii.to_vec(),
        counts,
        h_grid: h_grid.to_vec(),
        log_counts,
        ad_estimate,
        ad_log_steps,
    })
}

/// One detected jump of the logarithmic density.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct KEstimate {
    /// Estimated chain parameter K.
    pub location: f64,
    /// Number of chains sharing it.
    pub weight: usize,
    pub confidence: f64,
    /// Least-squares slope of the jump's count against R, i.e. the jump height of `Ad^log`.
    pub height: f64,
}

/// Half-width of the band around a fitted chain line that counts as on it.
const LINE_BAND: f64 = 0.3;
/// Smallest pair separation in `ln|Re k|` used to propose a chain line.
const MIN_PROPOSAL_SPAN: f64 = 0.25;
/// Fewest resonances a chain line must carry.
const MIN_LINE_ROOTS: f64 = 6.0;
/// Relative distance below which two fitted slopes are one chain parameter.
const MERGE_REL_TOL: f64 = 0.05;

#[derive(Debug, Clone, Copy)]
struct CellPoint {
    /// `ln(|Re k| + 1)` reconstructed from the annulus and the h-bin.
    x: f64,
    /// `−Im k = h·x`.
    y: f64,
    count: f64,
    /// Index of the annulus `(radii[i-1], radii[i]]`.
    annulus: usize,
    band: f64,
}

/// Resonances of each (annulus, h-bin) cell as points of the plane
/// `(ln(|Re k| + 1), −Im k)`, where a chain `Im k = −K ln|k| + O(1)` becomes
/// a straight line of slope K.
fn cell_points(radii: &[f64], table: &[Vec<usize>], hs: &[f64]) -> Vec<CellPoint> {
    let mut pts = Vec::new();
    for i in 1..table.len() {
        let rho = 0.5 * (radii[i] + radii[i - 1]);
        let drho = radii[i] - radii[i - 1];
        for j in 1..hs.len() {
            let m = (table[i][j] as i64 - table[i][j - 1] as i64) - (table[i - 1][j] as i64 - table[i - 1][j - 1] as i64);
            if m <= 0 {
                continue;
            }
            let h = 0.5 * (hs[j] + hs[j - 1]);
            let mut re = rho;
            for _ in 0..8 {
                let im = h * (re + 1.0).ln();
                re = (rho * rho - im * im).max(0.0).sqrt();
            }
            let x = (re + 1.0).ln();
            pts.push(CellPoint {
                x,
                y: h * x,
                count: m as f64,
                annulus: i,
                band: LINE_BAND + 0.5 * ((hs[j] - hs[j - 1]) * x + h * drho / rho.max(1.0)),
            });
        }
    }
    pts
}

fn inliers(pts: &[CellPoint], alive: &[bool], slope: f64, icpt: f64) -> Vec<usize> {
    (0..pts.len())
        .filter(|&i| alive[i] && (pts[i].y - slope * pts[i].x - icpt).abs() <= pts[i].band)
        .collect()
}

fn weighted_fit(pts: &[CellPoint], idx: &[usize]) -> Option<(f64, f64, f64)> {
    let xs: Vec<f64> = idx.iter().map(|&i| pts[i].x).collect();
    let ys: Vec<f64> = idx.iter().map(|&i| pts[i].y).collect();
    let ws: Vec<f64> = idx.iter().map(|&i| pts[i].count).collect();
    let (slope, se) = ls_fit(&xs, &ys, Some(&ws))?;
    let sw: f64 = ws.iter().sum();
    let icpt = (ys.iter().zip(&ws).map(|(y, w)| y * w).sum::<f64>() - slope * xs.iter().zip(&ws).map(|(x, w)| x * w).sum::<f64>()) / sw;
    Some((slope, icpt, se))
}

/// Recovers the chain parameters from a counting report.
///
/// Resonances with `|k|` between `0.15·R_max` and `R_max` are located to
/// their (annulus, h-bin) cell and placed in the plane
/// `(ln(|Re k| + 1), −Im k)`. Chains are peeled off one at a time: the line
/// through two cells carrying the most resonances within the band is refit by
/// weighted least squares and its resonances removed. For each line
///
/// * its slope K̂ absorbs the O(1) offset of the chain;
/// * its height `s` is the least-squares slope of its resonance count against R;
/// * its weight is `w = round(π·K̂·s)`, lines of weight zero are dropped, and
///   the reported location is `w/(π s)`.
///
/// Lines whose slopes agree within 5% are merged. The radius grid should be
/// fine (steps of a few units) since each cell is placed at its annulus midpoint.
pub fn extract_k_numeric(report: &CountingReport) -> Result<Vec<KEstimate>> {
    let r_max = *report.radii.last().ok_or(Error::InsufficientRadius(0.0, R_MIN_EXTRACTION))?;
    if r_max < R_MIN_EXTRACTION {
        return Err(Error::InsufficientRadius(r_max, R_MIN_EXTRACTION));
    }
    let hs = &report.h_grid;
    if hs.len() < 2 || hs.windows(2).any(|w| w[1] - w[0] > MAX_H_STEP + 1e-12) {
        return Err(Error::InvalidInput(format!("h-grid spacing must be at most {MAX_H_STEP}")));
    }
    let lo = report
        .radii
        .iter()
        .position(|&r| r >= EXTRACTION_INNER_FRACTION * r_max)
        .unwrap_or(report.radii.len() - 1);
    let radii = &report.radii[lo..];
    let table = &report.log_counts[lo..];
    if table.len() < 3 {
        return Err(Error::InvalidInput("radius grid too coarse above 0.15·R_max".into()));
    }

    let pts = cell_points(radii, table, hs);
    let mut alive = vec![true; pts.len()];
    let mut lines: Vec<(f64, f64, Vec<usize>)> = Vec::new();
    loop {
        let mut best: Option<(f64, f64, f64)> = None;
        for p in 0..pts.len() {
            if !alive[p] {
                continue;
            }
            for q in 0..pts.len() {
                if !alive[q] || pts[q].x - pts[p].x < MIN_PROPOSAL_SPAN {
                    continue;
                }
                let slope = (pts[q].y - pts[p].y) / (pts[q].x - pts[p].x);
                if slope <= 0.0 {
                    continue;
                }
                let icpt = pts[p].y - slope * pts[p].x;
                let score: f64 = inliers(&pts, &alive, slope, icpt).iter().map(|&i| pts[i].count).sum();
                if best.is_none_or(|(s, _, _)| score > s) {
                    best = Some((score, slope, icpt));
                }
            }
        }
        let Some((score, mut slope, mut icpt)) = best else { break };
        if score < MIN_LINE_ROOTS {
            break;
        }
        let mut members = inliers(&pts, &alive, slope, icpt);
        let mut se = f64::INFINITY;
        for _ in 0..5 {
            let Some((s, c, e)) = weighted_fit(&pts, &members) else { break };
            slope = s;
            icpt = c;
            se = e;
            let next = inliers(&pts, &alive, slope, icpt);
            if next == members || next.is_empty() {
                break;
            }
            members = next;
        }
        if members.is_empty() {
            break;
        }
        for &i in &members {
            alive[i] = false;
        }
        if slope > 0.0 && slope.is_finite() {
            lines.push((slope, se, members));
        }
    }

    let mut raw: Vec<KEstimate> = Vec::new();
    for (slope, se, members) in &lines {
        let counts: Vec<f64> = (0..table.len())
            .map(|i| members.iter().filter(|&&m| pts[m].annulus <= i).map(|&m| pts[m].count).sum())
            .collect();
        let Some(height) = ls_slope(radii, &counts) else { continue };
        let weight = (PI * slope * height).round();
        if weight < 1.0 {
            continue;
        }
        raw.push(KEstimate {
            location: weight / (PI * height),
            weight: weight as usize,
            confidence: if se.is_finite() { (2.0 * se).max((weight / (PI * height) - slope).abs()) } else { *slope },
            height,
        });
    }
    raw.sort_by(|a, b| a.location.total_cmp(&b.location));

    let mut out: Vec<KEstimate> = Vec::new();
    for e in raw {
        match out.last_mut() {
            Some(prev) if (e.location - prev.location).abs() <= MERGE_REL_TOL * e.location => {
                let w = (prev.weight + e.weight) as f64;
                prev.location = (prev.location * prev.weight as f64 + e.location * e.weight as f64) / w;
                prev.confidence = prev.confidence.max(e.confidence);
                prev.height += e.height;
                prev.weight += e.weight;
            }
            _ => out.push(e),
        }
    }
    Ok(out)
}

/// Expands estimates into a multiset (each location repeated `weight` times).
pub fn estimates_to_multiset(est: &[KEstimate]) -> KMultiset {
    let mut values: Vec<f64> = est.iter().flat_map(|e| std::iter::repeat_n(e.location, e.weight)).collect();
    values.sort_by(f64::total_cmp);
    KMultiset { values }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ChainMember {
    pub k: num_complex::Complex64,
    /// Index into the distinct chain parameters, `None` if there are none.
    pub chain: Option<usize>,
    pub residual: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ChainAssignment {
    /// Distinct K values with multiplicities.
    pub chains: Vec<(f64, usize)>,
    pub members: Vec<ChainMember>,
    /// Per chain, the largest |Im k + K ln(|Re k| + 1)| among its members.
    pub band: Vec<f64>,
}

/// Assigns every resonance with `|k| ≥ rho_min` to the chain whose curve
/// `Im k = −K ln(|Re k| + 1)` is nearest.
pub fn chain_assignment(rs: &ResonanceSet, k: &KMultiset, rho_min: f64) -> ChainAssignment {
    let chains = k.grouped();
    let mut band = vec![0.0_f64; chains.len()];
    let members = rs
        .roots
        .iter()
        .filter(|r| r.k.norm() >= rho_min)
        .map(|r| {
            let l = (r.k.re.abs() + 1.0).ln();
            let best = chains
                .iter()
                .enumerate()
                .map(|(j, &(kj, _))| (j, (r.k.im + kj * l).abs()))
                .min_by(|a, b| a.1.total_cmp(&b.1));
            match best {
                Some((j, res)) => {
                    band[j] = band[j].max(res);
                    ChainMember {
                        k: r.k,
                        chain: Some(j),
                        residual: res,
                    }
                }
                None => ChainMember {
                    k: r.k,
                    chain: None,
                    residual: f64::NAN,
                },
            }
        })
        .collect();
    ChainAssignment { chains, members, band }
}
