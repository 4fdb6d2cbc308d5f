//! Seeded point-process samplers.
//!
//! Every sample is drawn from a ChaCha8 stream selected by `(seed, stream_id)`,
//! so a trial's points depend only on its stream and never on which worker
//! ran it or in what order.

use std::f64::consts::PI;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{Configuration, Point3};

/// Which point process to draw from.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum SamplerKind {
    /// Binomial process: `m` i.i.d. points uniform in the ball of radius `r`.
    UniformBall { m: usize, r: f64 },
    /// Random count ν from `mixing` (pairs of count and probability), then ν
    /// i.i.d. standard normal points in R³.
    MixedBinomial { mixing: Vec<(usize, f64)> },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SamplerConfig {
    #[serde(flatten)]
    pub kind: SamplerKind,
    pub seed: u64,
    #[serde(default)]
    pub stream_id: u64,
}

impl SamplerConfig {
    pub fn uniform_ball(m: usize, r: f64, seed: u64, stream_id: u64) -> Self {
        SamplerConfig {
            kind: SamplerKind::UniformBall { m, r },
            seed,
            stream_id,
        }
    }

    pub fn mixed_binomial(mixing: Vec<(usize, f64)>, seed: u64, stream_id: u64) -> Self {
        SamplerConfig {
            kind: SamplerKind::MixedBinomial { mixing },
            seed,
            stream_id,
        }
    }

    /// The mixing law used in the worked example: ν uniform on {0, 1, 2}.
    pub fn example_mixing() -> Vec<(usize, f64)> {
        vec![(0, 1.0 / 3.0), (1, 1.0 / 3.0), (2, 1.0 / 3.0)]
    }

    pub fn validate(&self) -> Result<()> {
        match &self.kind {
            SamplerKind::UniformBall { r, .. } => {
                if !(*r > 0.0 && r.is_finite()) {
                    return Err(Error::InvalidInput(format!("ball radius must be positive, got {r}")));
                }
            }
            SamplerKind::MixedBinomial { mixing } => {
                if mixing.is_empty() || mixing.iter().any(|&(_, p)| p.is_nan() || p < 0.0) {
                    return Err(Error::InvalidInput("mixing probabilities must be nonnegative".into()));
                }
                let total: f64 = mixing.iter().map(|&(_, p)| p).sum();
                if (total - 1.0).abs() > 1e-12 {
                    return Err(Error::InvalidInput(format!("mixing probabilities sum to {total}")));
                }
            }
        }
        Ok(())
    }
}

/// Law of an individual point, kept so that a sample can be extended.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "law", rename_all = "snake_case")]
pub enum PointLaw {
    UniformBall { r: f64 },
    StandardNormal,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SampleSet {
    pub points: Vec<Point3>,
    pub seed_used: u64,
    pub stream_id: u64,
    #[serde(flatten)]
    pub law: PointLaw,
    /// ChaCha word position after the last draw.
    pub word_pos: u128,
}

/// Generator for one `(seed, stream_id)` pair.
pub fn stream(seed: u64, stream_id: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream_id);
    rng
}

/// One uniform point in the ball of radius `r`, from exactly three draws:
/// `r·U^{1/3}` times a uniform direction.
pub fn uniform_ball_point<R: Rng + ?Sized>(rng: &mut R, r: f64) -> Point3 {
    let u: f64 = rng.gen();
    let cos_t = 2.0 * rng.gen::<f64>() - 1.0;
    let phi = 2.0 * PI * rng.gen::<f64>();
    let rho = r * u.cbrt();
    let sin_t = (1.0 - cos_t * cos_t).max(0.0).sqrt();
    [rho * sin_t * phi.cos(), rho * sin_t * phi.sin(), rho * cos_t]
}

pub fn normal_point<R: Rng + ?Sized>(rng: &mut R) -> Point3 {
    [rng.sample(StandardNormal), rng.sample(StandardNormal), rng.sample(StandardNormal)]
}

fn draw_point(rng: &mut ChaCha8Rng, law: PointLaw) -> Point3 {
    match law {
        PointLaw::UniformBall { r } => uniform_ball_point(rng, r),
        PointLaw::StandardNormal => normal_point(rng),
    }
}

pub fn sample_uniform_ball(cfg: &SamplerConfig) -> Result<SampleSet> {
    cfg.validate()?;
    let SamplerKind::UniformBall { m, r } = cfg.kind else {
        return Err(Error::InvalidInput("sampler kind is not uniform_ball".into()));
    };
    let mut rng = stream(cfg.seed, cfg.stream_id);
    let law = PointLaw::UniformBall { r };
    let points = (0..m).map(|_| draw_point(&mut rng, law)).collect();
    Ok(SampleSet {
        points,
        seed_used: cfg.seed,
        stream_id: cfg.stream_id,
        law,
        word_pos: rng.get_word_pos(),
    })
}

pub fn sample_mixed_binomial(cfg: &SamplerConfig) -> Result<SampleSet> {
    cfg.validate()?;
    let SamplerKind::MixedBinomial { mixing } = &cfg.kind else {
        return Err(Error::InvalidInput("sampler kind is not mixed_binomial".into()));
    };
    let mut rng = stream(cfg.seed, cfg.stream_id);
    let u: f64 = rng.gen();
    let mut acc = 0.0;
    let mut count = mixing.last().map_or(0, |&(c, _)| c);
    for &(c, p) in mixing {
        acc += p;
        if u < acc {
            count = c;
            break;
        }
    }
    let law = PointLaw::StandardNormal;
    let points = (0..count).map(|_| draw_point(&mut rng, law)).collect();
    Ok(SampleSet {
        points,
        seed_used: cfg.seed,
        stream_id: cfg.stream_id,
        law,
        word_pos: rng.get_word_pos(),
    })
}

/// Dispatches on the sampler kind.
pub fn sample(cfg: &SamplerConfig) -> Result<SampleSet> {
    match cfg.kind {
        SamplerKind::UniformBall { .. } => sample_uniform_ball(cfg),
        SamplerKind::MixedBinomial { .. } => sample_mixed_binomial(cfg),
    }
}

/// Builds a configuration, redrawing any point that collides with an earlier
/// one from the continuation of the same stream.
pub fn to_configuration(s: &SampleSet, alpha: Complex64) -> Configuration {
    let mut points = s.points.clone();
    let mut rng = stream(s.seed_used, s.stream_id);
    rng.set_word_pos(s.word_pos);
    loop {
        match Configuration::new(points.clone(), alpha) {
            Ok(c) => return c,
            Err(Error::DuplicatePoints(_, j, _)) => points[j] = draw_point(&mut rng, s.law),
            Err(e) => panic!("sampled points are finite and valid: {e}"),
        }
    }
}
