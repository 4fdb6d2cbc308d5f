//! Random configurations are of Weyl type and satisfy `K_max ≥ m/V`.

use point_resonances::experiments::{run_kmax_bound_check, run_weyl_experiment, RunOptions};
use point_resonances::Result;

fn main() -> Result<()> {
    let opts = RunOptions::default();
    for m in 2..=6 {
        let weyl = run_weyl_experiment(m, 1.0, 100, 11, &opts)?;
        let kmax = run_kmax_bound_check(m, 1.0, 100, 11, &opts)?;
        println!(
            "m = {m}: Weyl fraction {:.2}, max |Ad − V/π| {:.1e}, #K = m in {:.0}%, K_max bound in {:.0}% (min margin {:.3})",
            weyl.statistics["weyl_fraction"],
            weyl.statistics["max_ad_deviation"],
            100.0 * weyl.statistics["full_k_fraction"],
            100.0 * kmax.statistics["bound_fraction"],
            kmax.statistics["min_relative_margin"]
        );
    }
    Ok(())
}
