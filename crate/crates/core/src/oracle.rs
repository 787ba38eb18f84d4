//! Exact reference computations used to check the estimators.
//!
//! Two independent routes: brute-force enumeration of `[q]^n`, and the exact
//! ratio pipeline (independent products or concatenations with no
//! sparsification). Both are exponential in `n`, so each is guarded by a cap.

use crate::dist::DiscreteDist;
use crate::error::{Result, TvError};
use crate::markov::{concatenate, kernel_conditional_ratio, ConditionalRatio, Kernel, MarkovPair};
use crate::product::ProductPair;
use crate::ratio::{indp_product, ratio_of, RatioDist};

/// Size limits for the exact computations.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct OracleLimits {
    /// Largest `q^n` that brute force will enumerate.
    pub enumeration_cap: u128,
    /// Largest ratio table the exact pipeline may build.
    pub support_cap: usize,
}

impl Default for OracleLimits {
    fn default() -> Self {
        Self {
            enumeration_cap: 10_000_000,
            support_cap: 1_000_000,
        }
    }
}

fn outcome_count(q: usize, n: usize, cap: u128) -> Result<usize> {
    let mut total: u128 = 1;
    for _ in 0..n {
        total = total.saturating_mul(q as u128);
        if total > cap {
            return Err(TvError::Size {
                what: "enumeration",
                needed: (q as u128).checked_pow(n as u32).unwrap_or(u128::MAX),
                cap,
            });
        }
    }
    Ok(total as usize)
}

/// Walks `[q]^n` in lexicographic order, keeping prefix probabilities under
/// both models, and returns `½ Σ |P(x) − Q(x)|`.
///
/// `step(i, prev, cur)` returns the factors `(p, q)` contributed by
/// coordinate `i` taking value `cur` after `prev` (`prev` is unused at
/// `i = 0`).
fn enumerate_tv(
    n: usize,
    q: usize,
    cap: u128,
    step: impl Fn(usize, usize, usize) -> (f64, f64),
) -> Result<f64> {
    outcome_count(q, n, cap)?;
    let mut digits = vec![0usize; n];
    let mut p_prefix = vec![0.0; n];
    let mut q_prefix = vec![0.0; n];
    let mut dirty = 0;
    let mut l1 = 0.0;
    loop {
        for i in dirty..n {
            let prev = if i == 0 { 0 } else { digits[i - 1] };
            let (pf, qf) = step(i, prev, digits[i]);
            let (pb, qb) = if i == 0 {
                (1.0, 1.0)
            } else {
                (p_prefix[i - 1], q_prefix[i - 1])
            };
            p_prefix[i] = pb * pf;
            q_prefix[i] = qb * qf;
        }
        l1 += (p_prefix[n - 1] - q_prefix[n - 1]).abs();

        let mut i = n;
        loop {
            if i == 0 {
                return Ok(0.5 * l1);
            }
            i -= 1;
            digits[i] += 1;
            if digits[i] < q {
                break;
            }
            digits[i] = 0;
        }
        dirty = i;
    }
}

/// Exact TV distance between two product distributions by enumeration.
pub fn brute_force_tv_product(pair: &ProductPair) -> Result<f64> {
    brute_force_tv_product_with(pair, OracleLimits::default())
}

pub fn brute_force_tv_product_with(pair: &ProductPair, limits: OracleLimits) -> Result<f64> {
    let (p, q) = (pair.p_marginals(), pair.q_marginals());
    enumerate_tv(pair.n(), pair.q(), limits.enumeration_cap, |i, _, x| {
        (p[i].masses()[x], q[i].masses()[x])
    })
}

/// Exact TV distance between two Markov chains by trajectory enumeration.
pub fn brute_force_tv_markov(pair: &MarkovPair) -> Result<f64> {
    brute_force_tv_markov_with(pair, OracleLimits::default())
}

pub fn brute_force_tv_markov_with(pair: &MarkovPair, limits: OracleLimits) -> Result<f64> {
    let (pk, qk) = (pair.p_kernels(), pair.q_kernels());
    enumerate_tv(pair.n(), pair.q(), limits.enumeration_cap, |i, prev, x| {
        if i == 0 {
            (pair.p_init().masses()[x], pair.q_init().masses()[x])
        } else {
            (
                pk[i - 1].row(prev).masses()[x],
                qk[i - 1].row(prev).masses()[x],
            )
        }
    })
}

fn check_support(r: &RatioDist, cap: usize) -> Result<()> {
    if r.len() > cap {
        Err(TvError::Size {
            what: "ratio support",
            needed: r.len() as u128,
            cap: cap as u128,
        })
    } else {
        Ok(())
    }
}

/// The exact ratio of two product distributions, by repeated independent
/// products with no sparsification.
pub fn exact_ratio_product(pair: &ProductPair) -> Result<RatioDist> {
    exact_ratio_product_with(pair, OracleLimits::default())
}

pub fn exact_ratio_product_with(pair: &ProductPair, limits: OracleLimits) -> Result<RatioDist> {
    let (p, q) = (pair.p_marginals(), pair.q_marginals());
    let mut acc = ratio_of(&p[0], &q[0])?;
    check_support(&acc, limits.support_cap)?;
    for (pi, qi) in p.iter().zip(q).skip(1) {
        acc = indp_product(&acc, &ratio_of(pi, qi)?);
        check_support(&acc, limits.support_cap)?;
    }
    Ok(acc)
}

/// The exact ratio of two Markov chains, by the backward concatenation
/// recursion with no sparsification.
pub fn exact_ratio_markov(pair: &MarkovPair) -> Result<RatioDist> {
    exact_ratio_markov_with(pair, OracleLimits::default())
}

pub fn exact_ratio_markov_with(pair: &MarkovPair, limits: OracleLimits) -> Result<RatioDist> {
    let n = pair.n();
    if n == 1 {
        return ratio_of(pair.p_init(), pair.q_init());
    }
    let (pk, qk) = (pair.p_kernels(), pair.q_kernels());
    let mut cond = kernel_conditional_ratio(&pk[n - 2], &qk[n - 2])?;
    for j in (0..n - 2).rev() {
        let per_state = (0..pair.q())
            .map(|x| {
                let r = concatenate(pk[j].row(x), qk[j].row(x), &cond)?;
                check_support(&r, limits.support_cap)?;
                Ok(r)
            })
            .collect::<Result<Vec<_>>>()?;
        cond = ConditionalRatio { per_state };
    }
    let joint = concatenate(pair.p_init(), pair.q_init(), &cond)?;
    check_support(&joint, limits.support_cap)?;
    Ok(joint)
}

/// Explicit joint distribution of a product pair, outcomes in lexicographic
/// order. Intended for small cross-checks.
pub fn product_joint(pair: &ProductPair) -> Result<(DiscreteDist, DiscreteDist)> {
    let total = outcome_count(pair.q(), pair.n(), OracleLimits::default().enumeration_cap)?;
    let mut p = vec![1.0];
    let mut q = vec![1.0];
    for (pi, qi) in pair.p_marginals().iter().zip(pair.q_marginals()) {
        p = p
            .iter()
            .flat_map(|a| pi.masses().iter().map(move |b| a * b))
            .collect();
        q = q
            .iter()
            .flat_map(|a| qi.masses().iter().map(move |b| a * b))
            .collect();
    }
    debug_assert_eq!(p.len(), total);
    Ok((DiscreteDist::new(p)?, DiscreteDist::new(q)?))
}

/// Explicit joint laws of a Markov pair, trajectories in lexicographic order.
/// Intended for small cross-checks.
pub fn markov_joint(pair: &MarkovPair) -> Result<(DiscreteDist, DiscreteDist)> {
    outcome_count(pair.q(), pair.n(), OracleLimits::default().enumeration_cap)?;
    let q = pair.q();
    // The last state of trajectory `i` is `i mod q`.
    let extend = |prefix: &[f64], k: &Kernel| -> Vec<f64> {
        prefix
            .iter()
            .enumerate()
            .flat_map(|(i, &w)| k.row(i % q).masses().iter().map(move |&t| w * t))
            .collect()
    };
    let mut p = pair.p_init().masses().to_vec();
    let mut qd = pair.q_init().masses().to_vec();
    for (pk, qk) in pair.p_kernels().iter().zip(pair.q_kernels()) {
        p = extend(&p, pk);
        qd = extend(&qd, qk);
    }
    Ok((DiscreteDist::new(p)?, DiscreteDist::new(qd)?))
}
