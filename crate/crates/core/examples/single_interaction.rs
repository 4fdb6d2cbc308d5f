//! One point interaction: the only resonance is `k = −4πiα`.

use point_resonances::chardet::{det_gamma, modified_determinant};
use point_resonances::rootfind::find_resonances;
use point_resonances::{Complex64, Configuration, Result};

fn main() -> Result<()> {
    for alpha in [Complex64::new(1.0, 0.0), Complex64::new(0.5, 0.2)] {
        let c = Configuration::new(vec![[0.0, 0.0, 0.0]], alpha)?;
        let rs = find_resonances(&c, 20.0)?;
        let expected = -4.0 * std::f64::consts::PI * Complex64::i() * alpha;
        println!("alpha = {alpha}: expected {expected:.6}");
        for root in &rs.roots {
            println!("  root {:.10} (multiplicity {}, residual {:.1e})", root.k, root.multiplicity, root.residual);
            println!("  det Γ there = {:.2e}", det_gamma(&c, root.k)?.norm());
        }
        let z = Complex64::new(3.0, 1.0);
        println!("  D(z) at {z}: {:.6}", modified_determinant(&c, z)?);
    }
    Ok(())
}
