//! Bias of `E Tr Q(z)` against `Tr T(z)`: explicit formula next to the
//! derivative of the potential, as `N` grows at fixed `N/M`.

use rmtbias::bias::relative_gap;
use rmtbias::{bias_theorem1, bias_theorem2, scenario, solve, SpectralPoint};

fn main() -> rmtbias::Result<()> {
    let z = SpectralPoint::from_noise(0.2)?;
    println!("{:>4} {:>12} {:>12} {:>12} {:>10}", "N", "B_theta", "B_kappa", "B", "gap");
    for n in [8, 16, 32, 64] {
        let model = scenario::ula_rician(n, 1.0, scenario::weibull_noncircular())?;
        let t1 = bias_theorem1(&model, &solve(&model, z, &Default::default())?)?;
        let t2 = bias_theorem2(&model, z, 2e-5, &Default::default())?;
        println!(
            "{n:>4} {:>12.6} {:>12.6} {:>12.6} {:>10.1e}",
            t1.b_theta.re,
            t1.b_kappa.re,
            t1.total.re,
            relative_gap(&t1, &t2)
        );
    }
    Ok(())
}
