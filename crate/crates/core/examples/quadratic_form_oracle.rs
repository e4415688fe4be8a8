//! Covariance of two quadratic forms in a shifted random vector, closed
//! form against sampling.

use rand::{Rng, SeedableRng};
use rmtbias::linalg::{CMatrix, CVector};
use rmtbias::monte_carlo::oracle::quadratic_form_cov_oracle;
use rmtbias::{scenario, Complex64, EntryDistribution};

fn main() -> rmtbias::Result<()> {
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(0);
    let mut draw = || Complex64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0));
    let n = 6;
    let a = CVector::from_fn(n, |_, _| draw());
    let gamma = CMatrix::from_fn(n, n, |_, _| draw());
    let lambda = CMatrix::from_fn(n, n, |_, _| draw());
    let d: Vec<f64> = (1..=n).map(|i| i as f64 / 3.0).collect();

    for (name, law) in [
        ("circular gaussian", EntryDistribution::circular_gaussian()),
        ("non-circular weibull", scenario::weibull_noncircular()),
    ] {
        let c = quadratic_form_cov_oracle(&a, &d, &gamma, &lambda, &law, 200_000, 1)?;
        println!(
            "{name:<22} analytic {:.5}  empirical {:.5}  ({:.1} SE)",
            c.analytic,
            c.empirical,
            c.z_score()
        );
    }
    Ok(())
}
