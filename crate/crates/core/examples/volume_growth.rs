//! Growth of the configuration size V for uniform samples, and the pair
//! moments behind it.

use point_resonances::experiments::{
    normal_cdf, run_moments_experiment, run_vgrowth_experiment, RunOptions, PAIR_MEAN, PAIR_SECOND_MOMENT,
};
use point_resonances::Result;

fn main() -> Result<()> {
    let opts = RunOptions::default();
    let moments = run_moments_experiment(1_000_000, 1.0, 7, &opts)?;
    println!(
        "pair mean {:.6} ± {:.6} (exact {:.6}), second moment {:.6} ± {:.6} (exact {:.6})",
        moments.statistics["pair_mean"],
        moments.statistics["pair_mean_se"],
        PAIR_MEAN,
        moments.statistics["pair_second_moment"],
        moments.statistics["pair_second_moment_se"],
        PAIR_SECOND_MOMENT
    );

    let t_grid = [-1.0, 0.0, 1.0, 2.0];
    let rep = run_vgrowth_experiment(100, 1.0, 200, &t_grid, 7, &opts)?;
    for t in t_grid {
        println!(
            "t = {t:4}: P(V/r > {:.2}) = {:.3}, lower target {:.3}",
            rep.statistics[&format!("threshold_t={t}")],
            rep.statistics[&format!("exceedance_t={t}")],
            1.0 - normal_cdf(t)
        );
    }
    println!("P(V > m r) = {:.3}", rep.statistics["p_v_above_mr"]);
    Ok(())
}
