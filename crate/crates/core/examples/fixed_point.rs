//! Solve the `(δ, δ̃)` fixed point along a few spectral points.

use rmtbias::{resolvent_trace_de, scenario, solve, Complex64, SpectralPoint};

fn main() -> rmtbias::Result<()> {
    let model = scenario::ula_rician(16, 1.0, scenario::weibull_noncircular())?;
    let points = [
        Complex64::new(-0.2, 0.0),
        Complex64::new(-2.0, 0.0),
        Complex64::new(1.0, 0.5),
        Complex64::new(3.0, 0.05),
    ];
    for z in points {
        let sol = solve(&model, SpectralPoint::new(z)?, &Default::default())?;
        println!(
            "z = {z:>10.3}  delta = {:.6}  delta_t = {:.6}  Tr T / N = {:.6}  ({} iterations)",
            sol.delta,
            sol.delta_t,
            resolvent_trace_de(&sol) / model.n() as f64,
            sol.iterations
        );
    }
    Ok(())
}
