use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::models::{Draw, ModelSpec, Uniform};

/// Reproducible stream of draws σ_n for one replica.
///
/// ChaCha is counter based: the master seed fixes the key and the replica
/// index selects an independent stream, so replicas can run in any order.
pub struct SampleStream {
    rng: ChaCha8Rng,
    cdf: Vec<f64>,
    w: Option<Uniform>,
    d: Option<Uniform>,
}

pub fn sample_stream(spec: &ModelSpec, seed: u64, replica: u64) -> SampleStream {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(replica);
    let mut acc = 0.0;
    let mut cdf: Vec<f64> = spec
        .weights()
        .iter()
        .map(|w| {
            acc += w;
            acc
        })
        .collect();
    if let Some(last) = cdf.last_mut() {
        *last = f64::INFINITY;
    }
    SampleStream { rng, cdf, w: spec.w_law(), d: spec.d_law() }
}

impl SampleStream {
    /// Uniform on `[0, 1)`.
    pub fn uniform(&mut self) -> f64 {
        self.rng.random::<f64>()
    }

    /// One σ: the atom by inverse CDF (skipped for a single atom), then one
    /// uniform each for `w` and `d` when the model has them.
    pub fn next_draw(&mut self) -> Draw {
        let atom = if self.cdf.len() == 1 {
            0
        } else {
            let u = self.uniform();
            self.cdf.partition_point(|&c| c <= u)
        };
        let w = match self.w {
            Some(law) => law.at(self.uniform()),
            None => 0.0,
        };
        let d = match self.d {
            Some(law) => law.at(self.uniform()),
            None => 1.0,
        };
        Draw { atom, w, d }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::models::Atom;
    use crate::su11::Su11Coeffs;

    fn three_atoms() -> ModelSpec {
        let q = Su11Coeffs::new(0.0, 0.0, 1.0);
        let atoms = [0.2, 0.0, 0.8]
            .iter()
            .map(|&w| Atom::new(w, 1.0, Su11Coeffs::new(1.0, 0.0, 0.0), q))
            .collect();
        ModelSpec::exponential(atoms, Some(Uniform::new(-1.0, 1.0).unwrap()), None, 0.1, 0.0).unwrap()
    }

    #[test]
    fn same_key_same_stream() {
        let spec = three_atoms();
        let a: Vec<Draw> = {
            let mut s = sample_stream(&spec, 7, 3);
            (0..100).map(|_| s.next_draw()).collect()
        };
        let mut s = sample_stream(&spec, 7, 3);
        let b: Vec<Draw> = (0..100).map(|_| s.next_draw()).collect();
        assert_eq!(a, b);
    }

    #[test]
    fn replicas_differ() {
        let spec = three_atoms();
        let mut s0 = sample_stream(&spec, 0, 0);
        let mut s1 = sample_stream(&spec, 0, 1);
        let a: Vec<usize> = (0..1000).map(|_| s0.next_draw().atom).collect();
        let b: Vec<usize> = (0..1000).map(|_| s1.next_draw().atom).collect();
        assert_ne!(a, b);
    }

    #[test]
    fn inverse_cdf_frequencies() {
        let spec = three_atoms();
        let mut s = sample_stream(&spec, 1, 0);
        let n = 100_000;
        let mut counts = [0usize; 3];
        let mut w_sum = 0.0;
        for _ in 0..n {
            let d = s.next_draw();
            counts[d.atom] += 1;
            assert!((-1.0..1.0).contains(&d.w));
            w_sum += d.w;
        }
        assert_eq!(counts[1], 0);
        let f0 = counts[0] as f64 / n as f64;
        // Binomial standard deviation is about 1.3e-3.
        assert!((f0 - 0.2).abs() < 0.007, "{f0}");
        assert!((w_sum / n as f64).abs() < 0.01);
    }
}
