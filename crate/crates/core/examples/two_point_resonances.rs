//! Two points at distance ℓ: resonances solve `iz − 4πα = ±e^{izℓ}/ℓ`, and
//! their count in the disc of radius R grows like `2ℓR/π`.
//!
//! Usage: `cargo run --release --example two_point_resonances [R] [ℓ]`

use std::f64::consts::PI;

use point_resonances::rootfind::{counting_report, find_resonances};
use point_resonances::{Complex64, Configuration, Result};

fn main() -> Result<()> {
    let mut args = std::env::args().skip(1);
    let radius: f64 = args.next().and_then(|s| s.parse().ok()).unwrap_or(60.0);
    let ell: f64 = args.next().and_then(|s| s.parse().ok()).unwrap_or(1.0);
    let alpha = Complex64::new(1.0, 0.0);
    let c = Configuration::new(vec![[0.0, 0.0, 0.0], [ell, 0.0, 0.0]], alpha)?;

    let start = std::time::Instant::now();
    let rs = find_resonances(&c, radius)?;
    println!("{} resonances with |k| <= {radius} ({:?})", rs.total_multiplicity(), start.elapsed());

    let mut worst = 0.0_f64;
    for root in &rs.roots {
        let z = root.k;
        let lhs = Complex64::i() * z - 4.0 * PI * alpha;
        let e = (Complex64::i() * z * ell).exp() / ell;
        worst = worst.max((lhs - e).norm().min((lhs + e).norm()) / (1.0 + lhs.norm()));
    }
    println!("worst relative residual of the factorized equation: {worst:.2e}");
    for root in rs.roots.iter().take(6) {
        println!("  {:.8}", root.k);
    }

    let radii: Vec<f64> = (1..=10).map(|i| radius * i as f64 / 10.0).collect();
    let report = counting_report(&rs, &radii, &[0.0, 1.0])?;
    println!("N(R)/R = {:.4}", *report.counts.last().unwrap() as f64 / radius);
    println!("slope estimate = {:.4}, asymptotic value 2ℓ/π = {:.4}", report.ad_estimate, 2.0 * ell / PI);
    Ok(())
}
