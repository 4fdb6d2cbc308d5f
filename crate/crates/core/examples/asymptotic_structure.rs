//! Canonical exponential polynomial, distribution diagram and chain
//! parameters of a configuration.
//!
//! Usage: `cargo run --example asymptotic_structure ['[[x,y,z],...]']`

use std::f64::consts::PI;

use point_resonances::exppoly::{analyze, chain_prediction, DEFAULT_N_MAX};
use point_resonances::{Complex64, Configuration, Result};

fn main() -> Result<()> {
    let points = match std::env::args().nth(1) {
        Some(s) => serde_json::from_str(&s).expect("points as a JSON array of triples"),
        None => {
            let h = 3f64.sqrt() / 2.0;
            vec![[0.0, 0.0, 0.0], [1.0, 0.0, 0.0], [0.5, h, 0.0]]
        }
    };
    let c = Configuration::new(points, Complex64::new(1.0, 0.0))?;
    let a = analyze(&c, DEFAULT_N_MAX)?;

    println!("size V = {:.6}, assignment {:?}", a.size.value, a.size.argmax_permutation);
    println!("diameter = {:.6}", a.diameter);
    println!("canonical terms (frequency: coefficients of 1, z, z², ...):");
    for t in &a.canonical.terms {
        let coeffs: Vec<String> = t.coeffs.iter().map(|z| format!("{z:.4}")).collect();
        println!("  {:.6}: [{}]", t.freq, coeffs.join(", "));
    }
    println!("upper hull of the distribution diagram: {:?}", a.diagram.hull);
    println!("K multiset: {:?}", a.k.grouped());
    println!(
        "Weyl type: {}, density {:.6} (V/π = {:.6})",
        a.weyl,
        a.ad_symbolic.unwrap_or(0.0),
        a.size.value / PI
    );
    if !a.k.is_empty() {
        for m in [10, 20, 40] {
            println!("first chain, index {m}: k ≈ {:.4}", chain_prediction(&a.k, 0, m)?);
        }
    }
    Ok(())
}
