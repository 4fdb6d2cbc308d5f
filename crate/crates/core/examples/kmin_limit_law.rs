//! Rescaled smallest chain parameter of uniform samples in the unit ball
//! against its limit law `1 − exp(−48 t³)`.
//!
//! Usage: `cargo run --release --example kmin_limit_law [trials] [seed]`

use point_resonances::experiments::{kmin_limit_cdf, run_kmin_experiment, RunOptions};
use point_resonances::Result;

fn main() -> Result<()> {
    let mut args = std::env::args().skip(1);
    let trials: usize = args.next().and_then(|s| s.parse().ok()).unwrap_or(1000);
    let seed: u64 = args.next().and_then(|s| s.parse().ok()).unwrap_or(7);
    let opts = RunOptions::default();
    for m in [100, 300, 1000] {
        let rep = run_kmin_experiment(m, 1.0, trials, seed, &opts)?;
        println!(
            "m = {m:5}: KS = {:.4}, median = {:.4} (limit {:.4})",
            rep.statistics["ks"], rep.statistics["median"], rep.statistics["limit_median"]
        );
        if m == 1000 {
            for q in [0.1, 0.25, 0.5, 0.75, 0.9] {
                let p = &rep.cdf[((q * rep.cdf.len() as f64) as usize).min(rep.cdf.len() - 1)];
                println!("  t = {:.4}: empirical {:.3}, limit {:.3}", p.t, p.empirical, kmin_limit_cdf(p.t, 1.0));
            }
        }
    }
    Ok(())
}
