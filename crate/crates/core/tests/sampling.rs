use point_resonances::experiments::ks_statistic;
use point_resonances::sampler::{sample, stream, uniform_ball_point, SamplerConfig};
use proptest::prelude::*;

const N: usize = 1_000_000;

fn norm(p: &[f64; 3]) -> f64 {
    (p[0] * p[0] + p[1] * p[1] + p[2] * p[2]).sqrt()
}

#[test]
fn uniform_ball_radial_law() {
    let mut rng = stream(11, 0);
    let radii: Vec<f64> = (0..N).map(|_| norm(&uniform_ball_point(&mut rng, 1.0))).collect();
    // |ξ|³ is uniform on [0, 1]
    let cube_mean = radii.iter().map(|r| r.powi(3)).sum::<f64>() / N as f64;
    assert!((cube_mean - 0.5).abs() < 0.002, "{cube_mean}");
    let ks = ks_statistic(&radii, |t| t.clamp(0.0, 1.0).powi(3)).unwrap();
    assert!(ks < 0.005, "{ks}");
    assert!(radii.iter().all(|&r| r <= 1.0));
}

#[test]
fn uniform_ball_coordinates_are_centered() {
    let r = 2.0;
    let mut rng = stream(12, 3);
    let mut sum = [0.0; 3];
    for _ in 0..N {
        let p = uniform_ball_point(&mut rng, r);
        for k in 0..3 {
            sum[k] += p[k];
        }
    }
    // Var of one coordinate is r²/5
    let se = (r * r / 5.0 / N as f64).sqrt();
    for s in sum {
        assert!((s / N as f64).abs() < 4.0 * se, "{s}");
    }
}

#[test]
fn distinct_streams_are_uncorrelated() {
    let n = 100_000;
    let mut a = stream(5, 0);
    let mut b = stream(5, 1);
    let xs: Vec<f64> = (0..n).map(|_| uniform_ball_point(&mut a, 1.0)[0]).collect();
    let ys: Vec<f64> = (0..n).map(|_| uniform_ball_point(&mut b, 1.0)[0]).collect();
    let mean = |v: &[f64]| v.iter().sum::<f64>() / v.len() as f64;
    let (mx, my) = (mean(&xs), mean(&ys));
    let cov: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)).sum::<f64>();
    let vx: f64 = xs.iter().map(|x| (x - mx).powi(2)).sum();
    let vy: f64 = ys.iter().map(|y| (y - my).powi(2)).sum();
    let corr = cov / (vx * vy).sqrt();
    assert!(corr.abs() < 0.01, "{corr}");
}

#[test]
fn mixed_binomial_count_and_pair_distance() {
    let trials = 100_000u64;
    let mut counts = [0usize; 3];
    let mut l2 = Vec::new();
    for s in 0..trials {
        let set = sample(&SamplerConfig::mixed_binomial(SamplerConfig::example_mixing(), 21, s)).unwrap();
        counts[set.points.len()] += 1;
        if let [p, q] = set.points[..] {
            l2.push((0..3).map(|k| (p[k] - q[k]).powi(2)).sum::<f64>());
        }
    }
    for c in counts {
        assert!((c as f64 / trials as f64 - 1.0 / 3.0).abs() < 0.01, "{counts:?}");
    }
    // |ξ − ξ′|² is 2·χ²₃ for independent standard normals
    let mean = l2.iter().sum::<f64>() / l2.len() as f64;
    assert!((mean - 6.0).abs() < 0.05, "{mean}");
}

#[test]
fn sample_json_round_trip() {
    let s = sample(&SamplerConfig::uniform_ball(4, 1.5, 3, 9)).unwrap();
    let back = serde_json::from_str(&serde_json::to_string(&s).unwrap()).unwrap();
    assert_eq!(s, back);
}

proptest! {
    #[test]
    fn samples_are_reproducible(seed in any::<u64>(), stream_id in any::<u64>(), m in 0usize..20) {
        let cfg = SamplerConfig::uniform_ball(m, 1.0, seed, stream_id);
        let a = sample(&cfg).unwrap();
        let b = sample(&cfg).unwrap();
        prop_assert_eq!(&a, &b);
        prop_assert_eq!(a.points.len(), m);
        prop_assert!(a.points.iter().all(|p| norm(p) <= 1.0));
    }

    #[test]
    fn prefixes_agree_across_sizes(seed in any::<u64>(), m in 1usize..20) {
        let small = sample(&SamplerConfig::uniform_ball(m, 1.0, seed, 0)).unwrap();
        let big = sample(&SamplerConfig::uniform_ball(m + 5, 1.0, seed, 0)).unwrap();
        prop_assert_eq!(&small.points[..], &big.points[..m]);
    }
}
