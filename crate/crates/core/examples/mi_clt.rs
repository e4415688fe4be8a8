//! Mean, bias and variance of the mutual information across noise levels.

use rmtbias::{mi_clt, scenario};

fn main() -> rmtbias::Result<()> {
    let model = scenario::ula_rician(32, 1.0, scenario::weibull_noncircular())?;
    println!("{:>7} {:>10} {:>9} {:>8} {:>8} {:>8}", "snr_db", "V", "B_C", "Theta_G", "Theta_B", "Theta");
    for sigma2 in [1.0, 0.5, 0.2, 0.1, 0.05] {
        let s = mi_clt(&model, sigma2, &Default::default())?;
        println!(
            "{:>7.2} {:>10.4} {:>9.5} {:>8.5} {:>8.5} {:>8.5}",
            -10.0 * f64::log10(sigma2),
            s.v,
            s.b_c,
            s.theta_g,
            s.theta_b,
            s.theta
        );
    }
    Ok(())
}
