//! Reads the chain parameters off the logarithmic counting functions of a
//! computed resonance set and compares them with the symbolic ones.
//!
//! Usage: `cargo run --release --example chain_extraction [R] ['[[x,y,z],...]']`

use point_resonances::exppoly::{analyze, DEFAULT_N_MAX};
use point_resonances::rootfind::{chain_assignment, counting_report, extract_k_numeric, find_resonances};
use point_resonances::{Complex64, Configuration, Result};

fn main() -> Result<()> {
    let mut args = std::env::args().skip(1);
    let radius: f64 = args.next().and_then(|s| s.parse().ok()).unwrap_or(200.0);
    let points = match args.next() {
        Some(s) => serde_json::from_str(&s).expect("points as a JSON array of triples"),
        None => vec![[0.0, 0.0, 0.0], [0.9, 0.3, 0.1], [0.2, -0.6, 0.5]],
    };
    let c = Configuration::new(points, Complex64::new(1.0, 0.0))?;
    let symbolic = analyze(&c, DEFAULT_N_MAX)?;
    println!("symbolic K: {:?}", symbolic.k.grouped());

    let rs = find_resonances(&c, radius)?;
    println!("{} resonances in the disc of radius {radius}", rs.total_multiplicity());
    let radii: Vec<f64> = (1..=20).map(|i| radius * i as f64 / 20.0).collect();
    let h_grid: Vec<f64> = (0..=400).map(|j| j as f64 * 0.02).collect();
    let report = counting_report(&rs, &radii, &h_grid)?;
    for e in extract_k_numeric(&report)? {
        println!(
            "numeric K ≈ {:.4} with weight {} (jump height {:.4}, confidence {:.2})",
            e.location, e.weight, e.height, e.confidence
        );
    }

    let chains = chain_assignment(&rs, &symbolic.k, 30.0);
    println!("{} resonances with |k| >= 30 assigned to chains", chains.members.len());
    for ((k, w), band) in chains.chains.iter().zip(&chains.band) {
        println!("  K = {k:.4} (x{w}): largest offset from the curve {band:.3}");
    }
    Ok(())
}
