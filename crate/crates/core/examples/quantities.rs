//! Every scalar functional at `z = −σ²`.

use rmtbias::{scenario, solve, table1, SpectralPoint};

fn main() -> rmtbias::Result<()> {
    let model = scenario::ula_rician(16, 1.0, scenario::weibull_noncircular())?;
    let sol = solve(&model, SpectralPoint::from_noise(0.2)?, &Default::default())?;
    let q = table1(&model, &sol)?;
    for (name, v) in q.scalars() {
        println!("{name:>12} = {:+.10}", v.re);
    }
    Ok(())
}
