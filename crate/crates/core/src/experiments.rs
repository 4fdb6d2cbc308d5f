//! Monte Carlo experiments over random point configurations.
//!
//! Trial `i` of every experiment draws its points from sampler stream `i`
//! under the experiment seed, so runs with equal seeds but different `m` are
//! matched, and results do not depend on the worker count: trials run on a
//! dedicated rayon pool, are collected in trial order, and all aggregation
//! happens sequentially afterwards.

use std::collections::BTreeMap;
use std::io::Write;

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use statrs::function::erf::erfc;

use crate::error::{Error, Result};
use crate::exppoly::{analyze, KMultiset, DEFAULT_N_MAX};
use crate::geometry::{diameter, size_v_of_points, Configuration, Point3};
use crate::sampler::{sample_uniform_ball, stream, to_configuration, uniform_ball_point, SamplerConfig};

/// Exact first pair moment `E|ξ−ξ′|/(2r)` for independent uniform points in a ball.
pub const PAIR_MEAN: f64 = 18.0 / 35.0;
/// Exact second pair moment `E(|ξ−ξ′|/(2r))²`.
pub const PAIR_SECOND_MOMENT: f64 = 3.0 / 10.0;
/// Pairs per sampler stream in the moments experiment.
pub const MOMENT_BLOCK: usize = 10_000;
/// Multiplier on the Monte Carlo standard error used by every statistical verdict.
pub const MC_SIGMAS: f64 = 4.0;

/// Settings shared by all experiments. `workers` affects speed only.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunOptions {
    /// Worker threads; 0 lets rayon choose.
    pub workers: usize,
    pub alpha: Complex64,
    pub n_max: usize,
    /// KS threshold used in the K_min verdict.
    pub ks_tol: f64,
}

impl Default for RunOptions {
    fn default() -> Self {
        RunOptions {
            workers: 0,
            alpha: Complex64::new(1.0, 0.0),
            n_max: DEFAULT_N_MAX,
            ks_tol: 0.05,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrialSummary {
    pub trial_id: usize,
    pub stream_id: u64,
    pub n_points: usize,
    pub diameter: f64,
    /// Skipped in the K_min experiment, where the O(m³) assignment is not needed.
    pub v_size: Option<f64>,
    pub k_min: f64,
    pub k_multiset: Option<KMultiset>,
    pub weyl: Option<bool>,
    pub ad_symbolic: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrialFailure {
    pub trial_id: usize,
    pub stream_id: u64,
    pub error: String,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Relation {
    AtLeast,
    AtMost,
    Within,
}

/// One pass/fail comparison of an observed aggregate against a target.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Verdict {
    pub name: String,
    pub observed: f64,
    pub relation: Relation,
    pub target: f64,
    pub tolerance: f64,
    pub pass: bool,
}

impl Verdict {
    pub fn new(name: &str, observed: f64, relation: Relation, target: f64, tolerance: f64) -> Self {
        let mut v = Verdict {
            name: name.to_string(),
            observed,
            relation,
            target,
            tolerance,
            pass: false,
        };
        v.pass = v.recompute();
        v
    }

    /// Re-derives `pass` from the stored numbers.
    pub fn recompute(&self) -> bool {
        match self.relation {
            Relation::AtLeast => self.observed >= self.target - self.tolerance,
            Relation::AtMost => self.observed <= self.target + self.tolerance,
            Relation::Within => (self.observed - self.target).abs() <= self.tolerance,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CdfPoint {
    pub t: f64,
    pub empirical: f64,
    pub target: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentParams {
    pub m: Option<usize>,
    pub r: f64,
    pub trials: Option<usize>,
    pub pairs: Option<usize>,
    pub seed: u64,
    pub t_grid: Option<Vec<f64>>,
    pub alpha: Complex64,
    pub n_max: usize,
    pub ks_tol: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentReport {
    pub experiment: String,
    pub params: ExperimentParams,
    pub trials: Vec<TrialSummary>,
    pub failures: Vec<TrialFailure>,
    pub statistics: BTreeMap<String, f64>,
    pub cdf: Vec<CdfPoint>,
    pub verdicts: Vec<Verdict>,
}

impl ExperimentReport {
    pub fn passed(&self) -> bool {
        self.failures.is_empty() && self.verdicts.iter().all(|v| v.pass)
    }

    pub fn verdict(&self, name: &str) -> Option<&Verdict> {
        self.verdicts.iter().find(|v| v.name == name)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }

    pub fn from_json(s: &str) -> Result<Self> {
        serde_json::from_str(s).map_err(|e| Error::InvalidInput(e.to_string()))
    }

    /// One CSV row per trial. The K multiset is written space-separated.
    pub fn write_trials_csv<W: Write>(&self, w: W) -> Result<()> {
        let mut out = csv::Writer::from_writer(w);
        let io = |e: csv::Error| Error::InvalidInput(e.to_string());
        out.write_record([
            "trial_id", "stream_id", "n_points", "diameter", "v_size", "k_min", "k_multiset", "weyl", "ad_symbolic",
        ])
        .map_err(io)?;
        for t in &self.trials {
            let opt = |x: Option<f64>| x.map(|v| format!("{v:e}")).unwrap_or_default();
            let ks = t
                .k_multiset
                .as_ref()
                .map(|k| k.values.iter().map(|v| format!("{v:e}")).collect::<Vec<_>>().join(" "))
                .unwrap_or_default();
            out.write_record([
                t.trial_id.to_string(),
                t.stream_id.to_string(),
                t.n_points.to_string(),
                format!("{:e}", t.diameter),
                opt(t.v_size),
                format!("{:e}", t.k_min),
                ks,
                t.weyl.map(|b| b.to_string()).unwrap_or_default(),
                opt(t.ad_symbolic),
            ])
            .map_err(io)?;
        }
        out.flush().map_err(|e| Error::InvalidInput(e.to_string()))
    }

    /// Two columns: statistic value and empirical CDF.
    pub fn write_cdf_csv<W: Write>(&self, w: W) -> Result<()> {
        let mut out = csv::Writer::from_writer(w);
        let io = |e: csv::Error| Error::InvalidInput(e.to_string());
        out.write_record(["t", "empirical_cdf"]).map_err(io)?;
        for p in &self.cdf {
            out.write_record([format!("{:e}", p.t), format!("{:e}", p.empirical)]).map_err(io)?;
        }
        out.flush().map_err(|e| Error::InvalidInput(e.to_string()))
    }
}

/// Standard normal CDF.
pub fn normal_cdf(t: f64) -> f64 {
    0.5 * erfc(-t / std::f64::consts::SQRT_2)
}

/// Limit law of `m^{2/3}(K_min − 1/(2r))`.
pub fn kmin_limit_cdf(t: f64, r: f64) -> f64 {
    if t <= 0.0 {
        0.0
    } else {
        -(-48.0 * r.powi(3) * t.powi(3)).exp_m1()
    }
}

/// Median of [`kmin_limit_cdf`].
pub fn kmin_limit_median(r: f64) -> f64 {
    (std::f64::consts::LN_2 / (48.0 * r.powi(3))).cbrt()
}

/// Threshold for `V/r` at level `t` in the growth bound.
pub fn vgrowth_threshold(m: usize, t: f64) -> f64 {
    let m = m as f64;
    36.0 * m / 35.0 + 2.0 * 87f64.sqrt() / 35.0 * t * m.sqrt()
}

/// Kolmogorov–Smirnov distance between the empirical law of `samples` and `cdf`.
pub fn ks_statistic<F: Fn(f64) -> f64>(samples: &[f64], cdf: F) -> Result<f64> {
    if samples.is_empty() {
        return Err(Error::EmptySample);
    }
    let mut xs = samples.to_vec();
    xs.sort_by(f64::total_cmp);
    let n = xs.len() as f64;
    let mut d = 0.0_f64;
    for (i, &x) in xs.iter().enumerate() {
        let f = cdf(x);
        d = d.max((i + 1) as f64 / n - f).max(f - i as f64 / n);
    }
    Ok(d)
}

fn run_parallel<T, F>(workers: usize, count: usize, f: F) -> Result<Vec<T>>
where
    T: Send,
    F: Fn(usize) -> T + Sync + Send,
{
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(workers)
        .build()
        .map_err(|e| Error::InvalidInput(format!("thread pool: {e}")))?;
    Ok(pool.install(|| (0..count).into_par_iter().map(&f).collect()))
}

fn ball_trial(m: usize, r: f64, seed: u64, trial: usize, alpha: Complex64) -> Result<Configuration> {
    let s = sample_uniform_ball(&SamplerConfig::uniform_ball(m, r, seed, trial as u64))?;
    Ok(to_configuration(&s, alpha))
}

fn basic_summary(trial: usize, c: &Configuration, v_size: Option<f64>) -> TrialSummary {
    let diam = diameter(c);
    TrialSummary {
        trial_id: trial,
        stream_id: trial as u64,
        n_points: c.len(),
        diameter: diam,
        v_size,
        k_min: 1.0 / diam,
        k_multiset: None,
        weyl: None,
        ad_symbolic: None,
    }
}

fn symbolic_trial(m: usize, r: f64, seed: u64, trial: usize, opts: &RunOptions) -> Result<TrialSummary> {
    let c = ball_trial(m, r, seed, trial, opts.alpha)?;
    let a = analyze(&c, opts.n_max)?;
    let mut s = basic_summary(trial, &c, Some(a.size.value));
    s.k_multiset = Some(a.k);
    s.weyl = Some(a.weyl);
    s.ad_symbolic = a.ad_symbolic;
    Ok(s)
}

fn split(results: Vec<Result<TrialSummary>>) -> (Vec<TrialSummary>, Vec<TrialFailure>) {
    let mut ok = Vec::new();
    let mut failed = Vec::new();
    for (i, r) in results.into_iter().enumerate() {
        match r {
            Ok(s) => ok.push(s),
            Err(e) => failed.push(TrialFailure {
                trial_id: i,
                stream_id: i as u64,
                error: e.to_string(),
            }),
        }
    }
    (ok, failed)
}

fn params(m: Option<usize>, r: f64, trials: Option<usize>, seed: u64, opts: &RunOptions) -> ExperimentParams {
    ExperimentParams {
        m,
        r,
        trials,
        pairs: None,
        seed,
        t_grid: None,
        alpha: opts.alpha,
        n_max: opts.n_max,
        ks_tol: opts.ks_tol,
    }
}

fn check_symbolic_pre(m: usize, r: f64, trials: usize, opts: &RunOptions) -> Result<()> {
    if m < 2 || m > opts.n_max {
        return Err(Error::InvalidInput(format!("m must lie in 2..={}, got {m}", opts.n_max)));
    }
    check_common(r, trials, 1)
}

fn check_common(r: f64, trials: usize, min_trials: usize) -> Result<()> {
    if !(r > 0.0 && r.is_finite()) {
        return Err(Error::InvalidInput(format!("radius must be positive, got {r}")));
    }
    if trials < min_trials {
        return Err(Error::InvalidInput(format!("at least {min_trials} trials required, got {trials}")));
    }
    Ok(())
}

fn fraction(count: usize, total: usize) -> f64 {
    if total == 0 {
        0.0
    } else {
        count as f64 / total as f64
    }
}

/// Weyl-type asymptotics on uniform-ball samples: per trial the top surviving
/// frequency must equal V, `Ad = V/π`, and `#K = m`.
pub fn run_weyl_experiment(m: usize, r: f64, trials: usize, seed: u64, opts: &RunOptions) -> Result<ExperimentReport> {
    check_symbolic_pre(m, r, trials, opts)?;
    let results = run_parallel(opts.workers, trials, |i| symbolic_trial(m, r, seed, i, opts))?;
    let (summaries, failures) = split(results);

    let n = summaries.len();
    let weyl = summaries.iter().filter(|s| s.weyl == Some(true)).count();
    let full_k = summaries
        .iter()
        .filter(|s| s.k_multiset.as_ref().is_some_and(|k| k.len() == m))
        .count();
    let mut max_dev = 0.0_f64;
    let mut max_kmin_dev = 0.0_f64;
    for s in &summaries {
        let v = s.v_size.unwrap_or(f64::NAN);
        let ad = s.ad_symbolic.unwrap_or(0.0);
        max_dev = max_dev.max((ad - v / std::f64::consts::PI).abs());
        if let Some(kmin) = s.k_multiset.as_ref().and_then(KMultiset::min) {
            max_kmin_dev = max_kmin_dev.max((kmin - s.k_min).abs());
        }
    }

    let mut statistics = BTreeMap::new();
    statistics.insert("weyl_fraction".into(), fraction(weyl, n));
    statistics.insert("max_ad_deviation".into(), max_dev);
    statistics.insert("full_k_fraction".into(), fraction(full_k, n));
    statistics.insert("max_kmin_deviation".into(), max_kmin_dev);
    let verdicts = vec![
        Verdict::new("failed_trials", failures.len() as f64, Relation::AtMost, 0.0, 0.0),
        Verdict::new("weyl_fraction", fraction(weyl, n), Relation::AtLeast, 1.0, 0.0),
        Verdict::new("max_ad_deviation", max_dev, Relation::AtMost, 0.0, 1e-9),
        Verdict::new("full_k_fraction", fraction(full_k, n), Relation::AtLeast, 1.0, 0.0),
        Verdict::new("max_kmin_deviation", max_kmin_dev, Relation::AtMost, 0.0, 1e-9),
    ];
    Ok(ExperimentReport {
        experiment: "weyl".into(),
        params: params(Some(m), r, Some(trials), seed, opts),
        trials: summaries,
        failures,
        statistics,
        cdf: Vec::new(),
        verdicts,
    })
}

/// Checks `K_max ≥ m/V` on uniform-ball samples.
pub fn run_kmax_bound_check(m: usize, r: f64, trials: usize, seed: u64, opts: &RunOptions) -> Result<ExperimentReport> {
    check_symbolic_pre(m, r, trials, opts)?;
    let results = run_parallel(opts.workers, trials, |i| symbolic_trial(m, r, seed, i, opts))?;
    let (summaries, failures) = split(results);

    let mut satisfied = 0;
    let mut min_margin = f64::INFINITY;
    for s in &summaries {
        let (Some(k), Some(v)) = (s.k_multiset.as_ref(), s.v_size) else {
            continue;
        };
        let kmax = k.max().unwrap_or(0.0);
        let bound = m as f64 / v;
        let margin = (kmax - bound) / bound;
        min_margin = min_margin.min(margin);
        if margin >= -1e-9 {
            satisfied += 1;
        }
    }
    let n = summaries.len();
    let mut statistics = BTreeMap::new();
    statistics.insert("bound_fraction".into(), fraction(satisfied, n));
    if min_margin.is_finite() {
        statistics.insert("min_relative_margin".into(), min_margin);
    }
    let verdicts = vec![
        Verdict::new("failed_trials", failures.len() as f64, Relation::AtMost, 0.0, 0.0),
        Verdict::new("bound_fraction", fraction(satisfied, n), Relation::AtLeast, 1.0, 0.0),
    ];
    Ok(ExperimentReport {
        experiment: "kmax".into(),
        params: params(Some(m), r, Some(trials), seed, opts),
        trials: summaries,
        failures,
        statistics,
        cdf: Vec::new(),
        verdicts,
    })
}

/// Empirical law of `m^{2/3}(K_min − 1/(2r))` with `K_min = 1/diameter`,
/// compared with `1 − exp(−48 r³ t³)`.
pub fn run_kmin_experiment(m: usize, r: f64, trials: usize, seed: u64, opts: &RunOptions) -> Result<ExperimentReport> {
    if m < 2 {
        return Err(Error::InvalidInput(format!("m must be at least 2, got {m}")));
    }
    check_common(r, trials, 100)?;
    let results = run_parallel(opts.workers, trials, |i| {
        ball_trial(m, r, seed, i, opts.alpha).map(|c| basic_summary(i, &c, None))
    })?;
    let (summaries, failures) = split(results);

    let scale = (m as f64).powf(2.0 / 3.0);
    let floor = 1.0 / (2.0 * r);
    let stats: Vec<f64> = summaries.iter().map(|s| scale * (s.k_min - floor)).collect();
    let ks = ks_statistic(&stats, |t| kmin_limit_cdf(t, r))?;
    let mut sorted = stats.clone();
    sorted.sort_by(f64::total_cmp);
    let n = sorted.len();
    let median = if n % 2 == 1 {
        sorted[n / 2]
    } else {
        0.5 * (sorted[n / 2 - 1] + sorted[n / 2])
    };
    let cdf = sorted
        .iter()
        .enumerate()
        .map(|(i, &t)| CdfPoint {
            t,
            empirical: (i + 1) as f64 / n as f64,
            target: kmin_limit_cdf(t, r),
        })
        .collect();
    let below = summaries.iter().filter(|s| s.k_min < floor).count();

    let mut statistics = BTreeMap::new();
    statistics.insert("ks".into(), ks);
    statistics.insert("median".into(), median);
    statistics.insert("limit_median".into(), kmin_limit_median(r));
    statistics.insert("min_statistic".into(), sorted[0]);
    let verdicts = vec![
        Verdict::new("failed_trials", failures.len() as f64, Relation::AtMost, 0.0, 0.0),
        Verdict::new("ks", ks, Relation::AtMost, 0.0, opts.ks_tol),
        Verdict::new("trials_below_floor", below as f64, Relation::AtMost, 0.0, 0.0),
    ];
    Ok(ExperimentReport {
        experiment: "kmin".into(),
        params: params(Some(m), r, Some(trials), seed, opts),
        trials: summaries,
        failures,
        statistics,
        cdf,
        verdicts,
    })
}

fn pair_terms(points: &[Point3], r: f64) -> (usize, f64, f64) {
    let mut sum = 0.0;
    let mut sum2 = 0.0;
    for pair in points.chunks_exact(2) {
        let l = crate::geometry::dist(&pair[0], &pair[1]) / (2.0 * r);
        sum += l;
        sum2 += l * l;
    }
    (points.len() / 2, sum, sum2)
}

/// Exceedance of the growth threshold by `V/r` at each `t`, against the
/// one-sided lower targets `1 − Φ(t)`, plus the trend check `P{V > m r}`.
pub fn run_vgrowth_experiment(
    m: usize,
    r: f64,
    trials: usize,
    t_grid: &[f64],
    seed: u64,
    opts: &RunOptions,
) -> Result<ExperimentReport> {
    if m < 2 {
        return Err(Error::InvalidInput(format!("m must be at least 2, got {m}")));
    }
    check_common(r, trials, 1)?;
    let results = run_parallel(opts.workers, trials, |i| {
        let c = ball_trial(m, r, seed, i, opts.alpha)?;
        let v = size_v_of_points(c.points());
        let (pairs, s1, s2) = pair_terms(c.points(), r);
        Ok::<_, Error>((basic_summary(i, &c, Some(v)), pairs, s1, s2))
    })?;
    let mut summaries = Vec::new();
    let mut failures = Vec::new();
    let (mut pairs, mut s1, mut s2) = (0usize, 0.0, 0.0);
    for (i, res) in results.into_iter().enumerate() {
        match res {
            Ok((s, p, a, b)) => {
                summaries.push(s);
                pairs += p;
                s1 += a;
                s2 += b;
            }
            Err(e) => failures.push(TrialFailure {
                trial_id: i,
                stream_id: i as u64,
                error: e.to_string(),
            }),
        }
    }

    let n = summaries.len();
    let mut statistics = BTreeMap::new();
    let mut verdicts = vec![Verdict::new("failed_trials", failures.len() as f64, Relation::AtMost, 0.0, 0.0)];
    for &t in t_grid {
        let thr = vgrowth_threshold(m, t);
        let hits = summaries.iter().filter(|s| s.v_size.is_some_and(|v| v / r > thr)).count();
        let p = fraction(hits, n);
        let se = (p * (1.0 - p) / n.max(1) as f64).sqrt();
        statistics.insert(format!("exceedance_t={t}"), p);
        statistics.insert(format!("threshold_t={t}"), thr);
        verdicts.push(Verdict::new(
            &format!("exceedance_t={t}"),
            p,
            Relation::AtLeast,
            1.0 - normal_cdf(t),
            MC_SIGMAS * se,
        ));
    }
    let above = summaries.iter().filter(|s| s.v_size.is_some_and(|v| v > m as f64 * r)).count();
    statistics.insert("p_v_above_mr".into(), fraction(above, n));
    verdicts.push(Verdict::new("p_v_above_mr", fraction(above, n), Relation::AtLeast, 0.95, 0.0));
    if pairs > 0 {
        statistics.insert("pair_mean".into(), s1 / pairs as f64);
        statistics.insert("pair_second_moment".into(), s2 / pairs as f64);
        statistics.insert("pairs".into(), pairs as f64);
    }
    let mut p = params(Some(m), r, Some(trials), seed, opts);
    p.t_grid = Some(t_grid.to_vec());
    Ok(ExperimentReport {
        experiment: "vgrowth".into(),
        params: p,
        trials: summaries,
        failures,
        statistics,
        cdf: Vec::new(),
        verdicts,
    })
}

#[derive(Debug, Clone, Copy, Default)]
struct MomentSums {
    n: usize,
    s1: f64,
    s2: f64,
    s3: f64,
    s4: f64,
}

/// First two moments of `λ = |ξ−ξ′|/(2r)` over `pairs` independent pairs of
/// uniform points in the ball, checked against 18/35 and 3/10 at four
/// standard errors.
pub fn run_moments_experiment(pairs: usize, r: f64, seed: u64, opts: &RunOptions) -> Result<ExperimentReport> {
    check_common(r, pairs, 2)?;
    let blocks = pairs.div_ceil(MOMENT_BLOCK);
    let sums = run_parallel(opts.workers, blocks, |b| {
        let mut rng = stream(seed, b as u64);
        let len = MOMENT_BLOCK.min(pairs - b * MOMENT_BLOCK);
        let mut acc = MomentSums::default();
        for _ in 0..len {
            let a = uniform_ball_point(&mut rng, r);
            let c = uniform_ball_point(&mut rng, r);
            let l = crate::geometry::dist(&a, &c) / (2.0 * r);
            let l2 = l * l;
            acc.n += 1;
            acc.s1 += l;
            acc.s2 += l2;
            acc.s3 += l2 * l;
            acc.s4 += l2 * l2;
        }
        acc
    })?;
    let total = sums.iter().fold(MomentSums::default(), |a, b| MomentSums {
        n: a.n + b.n,
        s1: a.s1 + b.s1,
        s2: a.s2 + b.s2,
        s3: a.s3 + b.s3,
        s4: a.s4 + b.s4,
    });
    let n = total.n as f64;
    let mean = total.s1 / n;
    let mean2 = total.s2 / n;
    let se1 = ((mean2 - mean * mean).max(0.0) / (n - 1.0)).sqrt();
    let se2 = ((total.s4 / n - mean2 * mean2).max(0.0) / (n - 1.0)).sqrt();

    let mut statistics = BTreeMap::new();
    statistics.insert("pair_mean".into(), mean);
    statistics.insert("pair_second_moment".into(), mean2);
    statistics.insert("pair_mean_se".into(), se1);
    statistics.insert("pair_second_moment_se".into(), se2);
    statistics.insert("pair_third_moment".into(), total.s3 / n);
    let verdicts = vec![
        Verdict::new("pair_mean", mean, Relation::Within, PAIR_MEAN, MC_SIGMAS * se1),
        Verdict::new("pair_second_moment", mean2, Relation::Within, PAIR_SECOND_MOMENT, MC_SIGMAS * se2),
    ];
    let mut p = params(None, r, None, seed, opts);
    p.pairs = Some(pairs);
    Ok(ExperimentReport {
        experiment: "moments".into(),
        params: p,
        trials: Vec::new(),
        failures: Vec::new(),
        statistics,
        cdf: Vec::new(),
        verdicts,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::Rng;

    fn opts(workers: usize) -> RunOptions {
        RunOptions {
            workers,
            ..RunOptions::default()
        }
    }

    #[test]
    fn ks_floor_and_single_sample() {
        let n = 200;
        let xs: Vec<f64> = (0..n).map(|i| (i as f64 + 0.5) / n as f64).collect();
        let d = ks_statistic(&xs, |x| x.clamp(0.0, 1.0)).unwrap();
        assert!(d <= 0.5 / n as f64 + 1e-15);
        let med = kmin_limit_median(1.0);
        let d = ks_statistic(&[med], |t| kmin_limit_cdf(t, 1.0)).unwrap();
        assert!((d - 0.5).abs() < 1e-12);
        assert!(matches!(ks_statistic(&[], |x| x), Err(Error::EmptySample)));
    }

    #[test]
    fn ks_uniform_calibration() {
        let mut rng = stream(11, 0);
        let xs: Vec<f64> = (0..10_000).map(|_| rng.gen()).collect();
        assert!(ks_statistic(&xs, |x| x.clamp(0.0, 1.0)).unwrap() < 0.02);
    }

    #[test]
    fn normal_cdf_values() {
        assert_eq!(normal_cdf(0.0), 0.5);
        assert!((normal_cdf(1.0) - 0.841_344_746_068_542_9).abs() < 1e-10);
        assert!((normal_cdf(-2.0) - 0.022_750_131_948_179_2).abs() < 1e-10);
    }

    #[test]
    fn limit_median() {
        assert!((kmin_limit_median(1.0) - 0.243_516_321).abs() < 1e-9);
        assert!((kmin_limit_cdf(kmin_limit_median(2.0), 2.0) - 0.5).abs() < 1e-14);
        assert_eq!(kmin_limit_cdf(-1.0, 1.0), 0.0);
    }

    #[test]
    fn two_point_weyl_and_kmax_equality() {
        let rep = run_weyl_experiment(2, 1.0, 20, 3, &opts(2)).unwrap();
        assert!(rep.passed(), "{:?}", rep.verdicts);
        let rep = run_kmax_bound_check(2, 1.0, 20, 3, &opts(2)).unwrap();
        assert!(rep.passed());
        assert!(rep.statistics["min_relative_margin"].abs() < 1e-12);
    }

    #[test]
    fn trial_invariants() {
        let rep = run_weyl_experiment(4, 1.0, 10, 5, &opts(1)).unwrap();
        for t in &rep.trials {
            assert!((t.k_min * t.diameter - 1.0).abs() <= 1e-12);
            assert!(t.v_size.unwrap() >= 2.0 * t.diameter);
            let kmin = t.k_multiset.as_ref().unwrap().min().unwrap();
            assert!((kmin - t.k_min).abs() < 1e-9);
        }
    }

    #[test]
    fn preconditions() {
        assert!(run_weyl_experiment(1, 1.0, 10, 1, &opts(1)).is_err());
        assert!(run_weyl_experiment(9, 1.0, 10, 1, &opts(1)).is_err());
        assert!(run_kmin_experiment(10, 1.0, 50, 1, &opts(1)).is_err());
        assert!(run_kmin_experiment(10, -1.0, 100, 1, &opts(1)).is_err());
        assert!(run_moments_experiment(1, 1.0, 1, &opts(1)).is_err());
    }

    #[test]
    fn worker_independence_and_roundtrip() {
        let a = run_kmin_experiment(30, 1.0, 120, 9, &opts(1)).unwrap();
        let b = run_kmin_experiment(30, 1.0, 120, 9, &opts(3)).unwrap();
        assert_eq!(a.to_json(), b.to_json());
        let back = ExperimentReport::from_json(&a.to_json()).unwrap();
        assert_eq!(back, a);
        for v in &back.verdicts {
            assert_eq!(v.recompute(), v.pass);
        }
        let mut csv = Vec::new();
        a.write_trials_csv(&mut csv).unwrap();
        assert_eq!(String::from_utf8(csv).unwrap().lines().count(), 121);
        let mut csv = Vec::new();
        a.write_cdf_csv(&mut csv).unwrap();
        assert!(String::from_utf8(csv).unwrap().starts_with("t,empirical_cdf\n"));
    }

    #[test]
    fn moments_partial_block() {
        let a = run_moments_experiment(MOMENT_BLOCK + 17, 2.0, 4, &opts(1)).unwrap();
        let b = run_moments_experiment(MOMENT_BLOCK + 17, 2.0, 4, &opts(4)).unwrap();
        assert_eq!(a, b);
        assert!(a.passed(), "{:?}", a.verdicts);
    }

    #[test]
    fn vgrowth_small() {
        let rep = run_vgrowth_experiment(20, 1.0, 40, &[0.0, 1.0], 2, &opts(2)).unwrap();
        assert!(rep.verdict("exceedance_t=0").is_some());
        assert_eq!(rep.trials.len(), 40);
        assert_eq!(rep.statistics["pairs"], 400.0);
    }
}
