//! Outage probability with and without the non-Gaussian corrections.

use rmtbias::mi::outage_probability_gaussian;
use rmtbias::{mi_clt, outage_probability, scenario};

fn main() -> rmtbias::Result<()> {
    let model = scenario::ula_rician(16, 1.0, scenario::weibull_noncircular())?;
    let s = mi_clt(&model, 0.2, &Default::default())?;
    println!("{:>6} {:>12} {:>12}", "rate", "corrected", "gaussian");
    for k in 0..=10 {
        let rate = s.v - 2.0 + 0.4 * k as f64;
        println!(
            "{rate:>6.2} {:>12.5e} {:>12.5e}",
            outage_probability(&s, rate),
            outage_probability_gaussian(&s, rate)
        );
    }
    Ok(())
}
