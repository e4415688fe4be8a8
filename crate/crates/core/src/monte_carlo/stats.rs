//! Streaming moments with an associative merge, reservoir sampling and the
//! Kolmogorov–Smirnov distance.

use rand::Rng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

/// Central moments up to order four (Welford/Pébay updates).
#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize)]
pub struct Moments {
    pub n: u64,
    pub mean: f64,
    m2: f64,
    m3: f64,
    m4: f64,
}

impl Moments {
    pub fn push(&mut self, x: f64) {
        let n1 = self.n as f64;
        self.n += 1;
        let n = self.n as f64;
        let delta = x - self.mean;
        let delta_n = delta / n;
        let delta_n2 = delta_n * delta_n;
        let term1 = delta * delta_n * n1;
        self.mean += delta_n;
        self.m4 += term1 * delta_n2 * (n * n - 3.0 * n + 3.0) + 6.0 * delta_n2 * self.m2 - 4.0 * delta_n * self.m3;
        self.m3 += term1 * delta_n * (n - 2.0) - 3.0 * delta_n * self.m2;
        self.m2 += term1;
    }

    /// Combine two disjoint samples. Merging in a fixed order gives
    /// bit-identical results regardless of how the samples were produced.
    pub fn merge(&self, other: &Moments) -> Moments {
        if self.n == 0 {
            return *other;
        }
        if other.n == 0 {
            return *self;
        }
        let na = self.n as f64;
        let nb = other.n as f64;
        let n = na + nb;
        let delta = other.mean - self.mean;
        let d2 = delta * delta;
        let d3 = d2 * delta;
        let d4 = d2 * d2;
        let mean = self.mean + delta * nb / n;
        let m2 = self.m2 + other.m2 + d2 * na * nb / n;
        let m3 = self.m3 + other.m3 + d3 * na * nb * (na - nb) / (n * n)
            + 3.0 * delta * (na * other.m2 - nb * self.m2) / n;
        let m4 = self.m4
            + other.m4
            + d4 * na * nb * (na * na - na * nb + nb * nb) / (n * n * n)
            + 6.0 * d2 * (na * na * other.m2 + nb * nb * self.m2) / (n * n)
            + 4.0 * delta * (na * other.m3 - nb * self.m3) / n;
        Moments {
            n: self.n + other.n,
            mean,
            m2,
            m3,
            m4,
        }
    }

    /// Unbiased sample variance.
    pub fn variance(&self) -> f64 {
        if self.n < 2 {
            return f64::NAN;
        }
        self.m2 / (self.n as f64 - 1.0)
    }

    /// `s / √n`
    pub fn se_mean(&self) -> f64 {
        (self.variance() / self.n as f64).sqrt()
    }

    /// Standard error of the sample variance, `√((μ₄ − s⁴(n−3)/(n−1))/n)`.
    pub fn se_variance(&self) -> f64 {
        let n = self.n as f64;
        if self.n < 4 {
            return f64::NAN;
        }
        let mu4 = self.m4 / n;
        let s2 = self.variance();
        ((mu4 - s2 * s2 * (n - 3.0) / (n - 1.0)).max(0.0) / n).sqrt()
    }
}

/// Uniform sample of at most `cap` values from a stream (algorithm R).
#[derive(Clone, Debug)]
pub struct Reservoir {
    cap: usize,
    seen: u64,
    values: Vec<f64>,
}

impl Reservoir {
    pub fn new(cap: usize) -> Self {
        Reservoir {
            cap,
            seen: 0,
            values: Vec::new(),
        }
    }

    pub fn push(&mut self, x: f64, rng: &mut ChaCha8Rng) {
        self.seen += 1;
        if self.values.len() < self.cap {
            self.values.push(x);
        } else if self.cap > 0 {
            let j = rng.random_range(0..self.seen);
            if (j as usize) < self.cap {
                self.values[j as usize] = x;
            }
        }
    }

    pub fn into_sorted(mut self) -> Vec<f64> {
        self.values.sort_by(|a, b| a.total_cmp(b));
        self.values
    }
}

/// `sup_x |F_n(x) − F(x)|` for a sorted sample.
pub fn ks_distance(sorted: &[f64], cdf: impl Fn(f64) -> f64) -> f64 {
    let n = sorted.len() as f64;
    sorted
        .iter()
        .enumerate()
        .map(|(i, &x)| {
            let f = cdf(x);
            (f - i as f64 / n).abs().max(((i + 1) as f64 / n - f).abs())
        })
        .fold(0.0, f64::max)
}

/// Fraction of the sorted sample `≤ x`.
pub fn ecdf_at(sorted: &[f64], x: f64) -> f64 {
    if sorted.is_empty() {
        return f64::NAN;
    }
    sorted.partition_point(|&v| v <= x) as f64 / sorted.len() as f64
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn direct(xs: &[f64]) -> (f64, f64, f64) {
        let n = xs.len() as f64;
        let mean = xs.iter().sum::<f64>() / n;
        let var = xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1.0);
        let mu4 = xs.iter().map(|x| (x - mean).powi(4)).sum::<f64>() / n;
        (mean, var, mu4)
    }

    proptest! {
        #[test]
        fn merge_matches_single_pass(xs in prop::collection::vec(-10.0f64..10.0, 8..64), split in 1usize..7) {
            let cut = split.min(xs.len() - 1);
            let mut a = Moments::default();
            let mut b = Moments::default();
            let mut all = Moments::default();
            xs[..cut].iter().for_each(|&x| a.push(x));
            xs[cut..].iter().for_each(|&x| b.push(x));
            xs.iter().for_each(|&x| all.push(x));
            let merged = a.merge(&b);
            let (mean, var, mu4) = direct(&xs);
            prop_assert!((merged.mean - mean).abs() < 1e-10);
            prop_assert!((merged.variance() - var).abs() < 1e-9 * (1.0 + var));
            prop_assert!((merged.m4 / xs.len() as f64 - mu4).abs() < 1e-8 * (1.0 + mu4));
            prop_assert!((all.m4 / xs.len() as f64 - mu4).abs() < 1e-8 * (1.0 + mu4));
            prop_assert!((all.variance() - var).abs() < 1e-9 * (1.0 + var));
        }
    }

    #[test]
    fn reservoir_keeps_everything_below_cap() {
        let mut rng = crate::monte_carlo::sampling::stream_rng(1, 0);
        let mut r = Reservoir::new(10);
        for x in [3.0, 1.0, 2.0] {
            r.push(x, &mut rng);
        }
        assert_eq!(r.into_sorted(), vec![1.0, 2.0, 3.0]);
        let mut r = Reservoir::new(5);
        for i in 0..100 {
            r.push(i as f64, &mut rng);
        }
        assert_eq!(r.into_sorted().len(), 5);
    }

    #[test]
    fn ks_of_exact_quantiles_is_half_step() {
        let n = 100;
        let xs: Vec<f64> = (0..n).map(|i| (i as f64 + 0.5) / n as f64).collect();
        let d = ks_distance(&xs, |x| x.clamp(0.0, 1.0));
        assert!((d - 0.005).abs() < 1e-12);
        assert_eq!(ecdf_at(&xs, 0.5), 0.5);
    }
}
