use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Binomial, Distribution};

use super::ResponseTrace;

/// PRNG recorded in dataset manifests; changing it is a format break.
pub(crate) const PRNG_NAME: &str = "chacha8";

/// Shot-averaged estimates of the trace probabilities: one independent
/// `Binomial(n_shots, P_D(t_i)) / n_shots` draw per time point,
/// deterministic in `seed`.
pub fn sample_shots(trace: &ResponseTrace, n_shots: u32, seed: u64) -> Vec<f64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    trace
        .pd
        .iter()
        .map(|&pd| {
            let p = pd.clamp(0.0, 1.0);
            let dist = Binomial::new(n_shots as u64, p).expect("clamped probability");
            dist.sample(&mut rng) as f64 / n_shots as f64
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn trace_of(pd: Vec<f64>) -> ResponseTrace {
        ResponseTrace {
            times: (0..pd.len()).map(|i| i as f64).collect(),
            pd,
            norm_drift: 0.0,
        }
    }

    #[test]
    fn degenerate_probability_is_exact() {
        let trace = trace_of(vec![1.0; 8]);
        let shots = sample_shots(&trace, 100, 7);
        assert!(shots.iter().all(|&p| p == 1.0));
        let trace = trace_of(vec![0.0; 8]);
        assert!(sample_shots(&trace, 100, 7).iter().all(|&p| p == 0.0));
    }

    #[test]
    fn same_seed_same_vector() {
        let trace = trace_of(vec![0.3, 0.5, 0.9, 0.1]);
        assert_eq!(sample_shots(&trace, 100, 42), sample_shots(&trace, 100, 42));
        assert_ne!(sample_shots(&trace, 100, 42), sample_shots(&trace, 100, 43));
    }

    /// Binomial moments: unbiased mean and variance p(1-p)/n over many seeds.
    #[test]
    fn estimator_moments() {
        let trace = trace_of(vec![0.5]);
        let n_draws = 10_000;
        let draws: Vec<f64> = (0..n_draws)
            .map(|s| sample_shots(&trace, 100, s as u64)[0])
            .collect();
        let mean = draws.iter().sum::<f64>() / n_draws as f64;
        let var = draws.iter().map(|d| (d - mean) * (d - mean)).sum::<f64>() / n_draws as f64;
        assert!((mean - 0.5).abs() <= 0.002, "mean = {mean}");
        let expected = 0.5 * 0.5 / 100.0;
        assert!(
            (var - expected).abs() <= 0.1 * expected,
            "variance = {var} vs {expected}"
        );
    }

    #[test]
    fn values_live_on_the_shot_lattice() {
        let trace = trace_of(vec![0.37; 32]);
        for p in sample_shots(&trace, 100, 5) {
            let scaled = p * 100.0;
            assert!((scaled - scaled.round()).abs() < 1e-12);
            assert!((0.0..=1.0).contains(&p));
        }
    }
}
