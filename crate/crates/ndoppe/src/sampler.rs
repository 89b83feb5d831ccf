//! Seeded random variate generation.
//!
//! Draws follow the two-step mixture scheme: a uniform selects the negative
//! binomial component by inverse CDF over the mixture weights, then the
//! component variate is generated as a sum of geometric draws by inversion.

use rand::distributions::Open01;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::estimate::Sample;
use crate::model::{ModelSpec, Theta};

/// A reproducible uniform stream: ChaCha8 keyed by a 64-bit seed, with the
/// stream index selecting one of 2^64 independent substreams.
///
/// Identical `(seed, stream_index)` pairs reproduce identical draw sequences
/// on every platform.
#[derive(Debug, Clone)]
pub struct SeededStream {
    seed: u64,
    stream_index: u64,
    rng: ChaCha8Rng,
}

impl SeededStream {
    pub fn new(seed: u64, stream_index: u64) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(stream_index);
        SeededStream {
            seed,
            stream_index,
            rng,
        }
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn stream_index(&self) -> u64 {
        self.stream_index
    }

    /// Next uniform variate, strictly inside (0, 1).
    fn uniform(&mut self) -> f64 {
        self.rng.sample(Open01)
    }
}

/// Inverse-CDF component selection: the unique `k` in `1..=r` with
/// `W_{k-1} < u <= W_k`, where `W_j` are cumulative mixture weights.
pub fn sample_component(u: f64, theta: Theta, model: &ModelSpec) -> usize {
    debug_assert!(u > 0.0 && u < 1.0);
    let weights = model.mixture_weights(theta);
    let mut cum = 0.0;
    for (i, w) in weights.iter().enumerate() {
        cum += w;
        if u <= cum {
            return i + 1;
        }
    }
    // rounding can leave the final cumulative a hair under 1
    weights.len()
}

/// One geometric draw (failures before the first success) by inversion.
fn sample_geometric(theta: Theta, stream: &mut SeededStream) -> u64 {
    let u = stream.uniform();
    (u.ln() / (-theta.value()).ln_1p()).floor() as u64
}

/// One draw from `NB(k, theta)`, counting failures before the k-th success,
/// generated as the sum of `k` independent geometric draws.
pub fn sample_nb(k: u64, theta: Theta, stream: &mut SeededStream) -> u64 {
    assert!(k >= 1, "negative binomial order must be at least 1");
    (0..k).map(|_| sample_geometric(theta, stream)).sum()
}

/// `n` independent NDOPPE draws.
pub fn sample(n: usize, theta: Theta, model: &ModelSpec, stream: &mut SeededStream) -> Sample {
    assert!(n >= 1, "sample size must be at least 1");
    let values = (0..n)
        .map(|_| {
            let u = stream.uniform();
            let k = sample_component(u, theta, model) as u64;
            sample_nb(k, theta, stream)
        })
        .collect();
    Sample::new(values).expect("n >= 1")
}

#[cfg(test)]
mod tests {
    use super::*;

    fn theta(v: f64) -> Theta {
        Theta::new(v).unwrap()
    }

    #[test]
    fn component_selection() {
        let ndl = ModelSpec::ndl();
        let th = theta(0.5);
        // NDL weights at theta = 0.5 are (1/3, 2/3)
        assert_eq!(sample_component(0.2, th, &ndl), 1);
        assert_eq!(sample_component(0.8, th, &ndl), 2);
        assert_eq!(sample_component(1.0 / 3.0, th, &ndl), 1);
        let geo = ModelSpec::geometric();
        for &u in &[0.01, 0.5, 0.99] {
            assert_eq!(sample_component(u, th, &geo), 1);
        }
    }

    #[test]
    fn nb_empirical_mean() {
        let mut stream = SeededStream::new(42, 0);
        let n = 100_000;
        let sum: u64 = (0..n).map(|_| sample_nb(2, theta(0.5), &mut stream)).sum();
        let mean = sum as f64 / n as f64;
        // NB(2, 0.5) mean is 2; 3 sigma of the sample mean is ~0.019
        assert!((mean - 2.0).abs() < 0.05, "mean {mean}");
    }

    #[test]
    fn streams_are_deterministic() {
        let ndl = ModelSpec::ndl();
        let th = theta(0.4);
        let a = sample(64, th, &ndl, &mut SeededStream::new(7, 3));
        let b = sample(64, th, &ndl, &mut SeededStream::new(7, 3));
        assert_eq!(a.values(), b.values());
        let c = sample(64, th, &ndl, &mut SeededStream::new(7, 4));
        assert_ne!(a.values(), c.values());
        let d = sample(64, th, &ndl, &mut SeededStream::new(8, 3));
        assert_ne!(a.values(), d.values());
    }

    #[test]
    fn pinned_draws_for_one_seed() {
        // regression pin: the platform-stable generator must keep producing
        // exactly this sequence for (seed, stream) = (20240901, 5)
        let mut stream = SeededStream::new(20_240_901, 5);
        let got = sample(12, theta(0.3), &ModelSpec::ndl(), &mut stream);
        assert_eq!(got.values(), PINNED_SEED_20240901_STREAM_5);
    }

    // Captured from the implementation once and frozen; see the test above.
    const PINNED_SEED_20240901_STREAM_5: &[u64] = &[2, 2, 1, 0, 3, 12, 0, 4, 2, 10, 9, 0];

    #[test]
    fn sample_mean_tracks_model_mean() {
        let golden = (5f64.sqrt() - 1.0) / 2.0;
        let th = theta(golden);
        let ndl = ModelSpec::ndl();
        let s = sample(100_000, th, &ndl, &mut SeededStream::new(1, 0));
        assert!((s.mean() - 1.0).abs() < 0.02, "mean {}", s.mean());
    }

    #[test]
    fn empirical_pmf_at_zero() {
        let geo = ModelSpec::geometric();
        let s = sample(100_000, theta(0.5), &geo, &mut SeededStream::new(2, 0));
        let p0 = s.values().iter().filter(|&&v| v == 0).count() as f64 / s.n() as f64;
        assert!((p0 - 0.5).abs() < 0.005, "p0 {p0}");

        let ndl = ModelSpec::ndl();
        let s = sample(100_000, theta(0.5), &ndl, &mut SeededStream::new(3, 0));
        let p0 = s.values().iter().filter(|&&v| v == 0).count() as f64 / s.n() as f64;
        assert!((p0 - 1.0 / 3.0).abs() < 0.005, "p0 {p0}");
    }

    #[test]
    fn component_frequencies_match_mixture_weights() {
        let ndl = ModelSpec::ndl();
        let th = theta(0.5);
        let weights = ndl.mixture_weights(th);
        let mut stream = SeededStream::new(9, 0);
        let n = 100_000usize;
        let mut counts = vec![0usize; ndl.order()];
        for _ in 0..n {
            let u = stream.uniform();
            counts[sample_component(u, th, &ndl) - 1] += 1;
        }
        for (i, &w) in weights.iter().enumerate() {
            let freq = counts[i] as f64 / n as f64;
            let sigma = (w * (1.0 - w) / n as f64).sqrt();
            assert!(
                (freq - w).abs() < 3.0 * sigma,
                "component {}: freq {freq}, weight {w}",
                i + 1
            );
        }
    }
}
