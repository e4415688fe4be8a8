//! Moments of the supported entry laws.
//!
//! Each law fixes the modulus `|x|`; the weights `σ_r²`, `σ_i²` set the
//! split between real and imaginary power and hence the pseudo-variance.

use rmtbias::{cv_of, moments_of, EntryDistribution, ModulusLaw};

fn main() -> rmtbias::Result<()> {
    let laws = [
        EntryDistribution::circular_gaussian(),
        EntryDistribution::new(ModulusLaw::Weibull { k: 1.0 }, 1.6, 0.4)?,
        EntryDistribution::new(ModulusLaw::Weibull { k: 3.0 }, 1.0, 1.0)?,
        EntryDistribution::new(ModulusLaw::Lognormal { sigma: 0.5 }, 1.2, 0.8)?,
        EntryDistribution::new(ModulusLaw::Nakagami { m: 0.7 }, 1.9, 0.1)?,
    ];
    println!("{:<28} {:>8} {:>9} {:>8}", "law", "vartheta", "kappa", "cv");
    for d in &laws {
        let m = moments_of(d)?;
        let label = format!("{}({}) {}/{}", d.modulus_law.name(), d.modulus_law.parameter(), d.sigma_r2, d.sigma_i2);
        println!("{label:<28} {:>8.4} {:>9.4} {:>8.4}", m.vartheta.re, m.kappa, cv_of(d)?);
    }
    Ok(())
}
