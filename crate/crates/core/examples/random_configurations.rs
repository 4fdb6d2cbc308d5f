//! Seeded samplers: uniform points in a ball and the mixed binomial process.

use point_resonances::geometry::{diameter, size_v};
use point_resonances::sampler::{sample, to_configuration, SamplerConfig};
use point_resonances::{Complex64, Result};

fn main() -> Result<()> {
    let alpha = Complex64::new(1.0, 0.0);
    for stream_id in 0..3 {
        let s = sample(&SamplerConfig::uniform_ball(6, 1.0, 2024, stream_id))?;
        let c = to_configuration(&s, alpha);
        println!(
            "ball stream {stream_id}: diameter {:.4}, size {:.4}",
            diameter(&c),
            size_v(&c)?.value
        );
    }

    let mixing = SamplerConfig::example_mixing();
    let mut counts = [0usize; 3];
    let trials = 30_000;
    for stream_id in 0..trials {
        let s = sample(&SamplerConfig::mixed_binomial(mixing.clone(), 2024, stream_id))?;
        counts[s.points.len()] += 1;
    }
    let freq: Vec<f64> = counts.iter().map(|&n| n as f64 / trials as f64).collect();
    println!("mixed binomial point counts 0/1/2: {freq:.4?}");

    let s = sample(&SamplerConfig::uniform_ball(3, 2.0, 1, 0))?;
    println!("{}", serde_json::to_string(&s).expect("serializable"));
    Ok(())
}
