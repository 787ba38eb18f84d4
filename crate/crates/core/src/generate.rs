//! Seeded random instances.
//!
//! Every distribution is a normalized vector of independent Gamma(skew, 1)
//! draws. Small `skew` gives spiky distributions with near-zero entries;
//! large `skew` approaches the uniform distribution. The stream is ChaCha8
//! seeded from a `u64`, so a given `(seed, n, q, skew)` always yields the same
//! instance.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Gamma};

use crate::dist::DiscreteDist;
use crate::error::{Result, TvError};
use crate::markov::{Kernel, MarkovPair};
use crate::product::ProductPair;

pub const DEFAULT_SKEW: f64 = 1.0;

/// Source of random distributions over `[q]`.
pub struct InstanceRng {
    rng: ChaCha8Rng,
    gamma: Gamma<f64>,
}

impl InstanceRng {
    pub fn new(seed: u64, skew: f64) -> Result<Self> {
        let gamma =
            Gamma::new(skew, 1.0).map_err(|e| TvError::Parameter(format!("skew {skew}: {e}")))?;
        Ok(Self {
            rng: ChaCha8Rng::seed_from_u64(seed),
            gamma,
        })
    }

    pub fn dist(&mut self, q: usize) -> Result<DiscreteDist> {
        let draws: Vec<f64> = (0..q).map(|_| self.gamma.sample(&mut self.rng)).collect();
        let total: f64 = draws.iter().sum();
        if !(total > 0.0 && total.is_finite()) {
            return DiscreteDist::uniform(q);
        }
        DiscreteDist::new(draws.into_iter().map(|x| x / total).collect())
    }

    pub fn dists(&mut self, count: usize, q: usize) -> Result<Vec<DiscreteDist>> {
        (0..count).map(|_| self.dist(q)).collect()
    }

    pub fn kernel(&mut self, q: usize) -> Result<Kernel> {
        Kernel::new(self.dists(q, q)?)
    }
}

fn check_shape(n: usize, q: usize) -> Result<()> {
    if n == 0 || q == 0 {
        return Err(TvError::Parameter(format!(
            "n and q must be at least 1, got n={n}, q={q}"
        )));
    }
    Ok(())
}

/// Random product pair: the `n` marginals of P, then the `n` of Q.
pub fn random_product_pair(n: usize, q: usize, seed: u64, skew: f64) -> Result<ProductPair> {
    check_shape(n, q)?;
    let mut rng = InstanceRng::new(seed, skew)?;
    let p = rng.dists(n, q)?;
    let qm = rng.dists(n, q)?;
    ProductPair::new(p, qm)
}

/// Random chain pair: both initial laws, then the P and Q kernels of each
/// step in turn.
pub fn random_markov_pair(n: usize, q: usize, seed: u64, skew: f64) -> Result<MarkovPair> {
    check_shape(n, q)?;
    let mut rng = InstanceRng::new(seed, skew)?;
    let p_init = rng.dist(q)?;
    let q_init = rng.dist(q)?;
    let mut p_kernels = Vec::with_capacity(n - 1);
    let mut q_kernels = Vec::with_capacity(n - 1);
    for _ in 1..n {
        p_kernels.push(rng.kernel(q)?);
        q_kernels.push(rng.kernel(q)?);
    }
    MarkovPair::new(p_init, q_init, p_kernels, q_kernels)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn deterministic_per_seed() {
        assert_eq!(
            random_product_pair(4, 3, 7, 0.5).unwrap(),
            random_product_pair(4, 3, 7, 0.5).unwrap()
        );
        assert_ne!(
            random_product_pair(4, 3, 7, 0.5).unwrap(),
            random_product_pair(4, 3, 8, 0.5).unwrap()
        );
        assert_eq!(
            random_markov_pair(3, 2, 11, 1.0).unwrap(),
            random_markov_pair(3, 2, 11, 1.0).unwrap()
        );
    }

    #[test]
    fn shapes() {
        let p = random_product_pair(5, 4, 1, 1.0).unwrap();
        assert_eq!((p.n(), p.q()), (5, 4));
        let m = random_markov_pair(6, 3, 1, 1.0).unwrap();
        assert_eq!((m.n(), m.q()), (6, 3));
        assert_eq!(m.p_kernels().len(), 5);
    }

    #[test]
    fn rejects_bad_parameters() {
        assert!(random_product_pair(0, 2, 1, 1.0).is_err());
        assert!(random_markov_pair(2, 0, 1, 1.0).is_err());
        assert!(random_product_pair(2, 2, 1, 0.0).is_err());
        assert!(random_product_pair(2, 2, 1, -1.0).is_err());
    }
}
