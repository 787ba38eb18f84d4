//! Relative-error TV estimation between product distributions.
//!
//! The ratio of `P_1 ⋯ P_n` against `Q_1 ⋯ Q_n` is the independent product of
//! the per-coordinate ratios. The estimator folds those in one coordinate at a
//! time and sparsifies the running table before each multiplication, with
//! `ε_s = ε/2n` and `δ_s = (ε/2n)·d_LB`. Every sparsification can only lose
//! information, so the final TV functional never overshoots, and the error
//! budget keeps it above `(1 - ε)·Δ_TV`.

use std::time::Instant;

use crate::dist::{tv_discrete, DiscreteDist};
use crate::error::{check_len, Result, TvError};
use crate::merge::ScaledRun;
use crate::ratio::{indp_product, ratio_of, RatioDist};
use crate::report::EstimateReport;
use crate::sparsify::{build_partition, sparsify_scaled_runs, sparsify_wrt_intervals, Buckets};
use crate::VALIDITY_TOL;

/// Two product distributions over `[q]^n`, given by their marginals.
#[derive(Debug, Clone, PartialEq)]
pub struct ProductPair {
    p_marginals: Vec<DiscreteDist>,
    q_marginals: Vec<DiscreteDist>,
}

impl ProductPair {
    pub fn new(p_marginals: Vec<DiscreteDist>, q_marginals: Vec<DiscreteDist>) -> Result<Self> {
        if p_marginals.is_empty() {
            return Err(TvError::Parameter("product needs n >= 1 marginals".into()));
        }
        check_len(p_marginals.len(), q_marginals.len())?;
        let q = p_marginals[0].len();
        for d in p_marginals.iter().chain(&q_marginals) {
            check_len(q, d.len())?;
        }
        Ok(Self {
            p_marginals,
            q_marginals,
        })
    }

    /// Number of coordinates.
    pub fn n(&self) -> usize {
        self.p_marginals.len()
    }

    /// Alphabet size.
    pub fn q(&self) -> usize {
        self.p_marginals[0].len()
    }

    pub fn p_marginals(&self) -> &[DiscreteDist] {
        &self.p_marginals
    }

    pub fn q_marginals(&self) -> &[DiscreteDist] {
        &self.q_marginals
    }

    pub(crate) fn marginal_ratio(&self, i: usize) -> RatioDist {
        ratio_of(&self.p_marginals[i], &self.q_marginals[i])
            .expect("marginals were validated at construction")
    }
}

/// `max_i TV(P_i, Q_i)`, which lies in `[Δ_TV/n, Δ_TV]`.
pub fn product_lower_bound(pair: &ProductPair) -> f64 {
    pair.p_marginals
        .iter()
        .zip(&pair.q_marginals)
        .map(|(p, q)| tv_discrete(p, q).expect("marginals share a length"))
        .fold(0.0, f64::max)
}

pub(crate) fn check_epsilon(eps: f64) -> Result<()> {
    if eps > 0.0 && eps < 1.0 {
        Ok(())
    } else {
        Err(TvError::Parameter(format!(
            "epsilon must lie in (0, 1), got {eps}"
        )))
    }
}

pub(crate) fn check_intermediate(r: &RatioDist) -> Result<()> {
    r.validate(VALIDITY_TOL)
}

/// Estimates `Δ_TV(P, Q)` to relative error `eps`, from below.
pub fn estimate_product_tv(pair: &ProductPair, eps: f64) -> Result<EstimateReport> {
    estimate_product_ratio(pair, eps).map(|(report, _)| report)
}

/// Same as [`estimate_product_tv`], also returning the final ratio table.
pub fn estimate_product_ratio(pair: &ProductPair, eps: f64) -> Result<(EstimateReport, RatioDist)> {
    check_epsilon(eps)?;
    let start = Instant::now();
    let n = pair.n();
    let d_lb = product_lower_bound(pair);
    let report = |estimate: f64, max_support: usize, iterations: usize| EstimateReport {
        estimate,
        epsilon: eps,
        d_lb,
        max_support,
        iterations,
        elapsed: start.elapsed(),
    };

    if d_lb == 0.0 {
        // Δ_TV ≤ n·d_LB, so the marginals all coincide.
        return Ok((report(0.0, 1, 0), RatioDist::identity()));
    }
    let first = pair.marginal_ratio(0);
    if n == 1 {
        let tv = tv_discrete(&pair.p_marginals[0], &pair.q_marginals[0])?;
        let support = first.len();
        return Ok((report(tv, support, 0), first));
    }

    let eps_s = eps / (2.0 * n as f64);
    let part = build_partition(eps_s, eps_s * d_lb)?;
    let mut buckets = Buckets::default();
    let mut max_support = first.len();
    let mut sparse = sparsify_wrt_intervals(&first, &part);
    check_intermediate(&sparse)?;
    // Each pass below is sparsify(indp_product(sparse, R_k)), fused so the
    // unsparsified product is never stored. Its size is bounded by the
    // number of product terms.
    for k in 1..n - 1 {
        let factor = pair.marginal_ratio(k);
        max_support = max_support.max(sparse.len() * factor.len());
        sparse = sparsify_scaled_runs(&product_runs(&sparse, &factor), &part, &mut buckets);
        check_intermediate(&sparse)?;
    }
    let last = indp_product(&sparse, &pair.marginal_ratio(n - 1));
    check_intermediate(&last)?;
    max_support = max_support.max(last.len());
    Ok((report(last.tv(), max_support, n - 1), last))
}

/// Runs whose merge is `indp_product(table, factor)`: one per factor point.
fn product_runs<'a>(table: &'a RatioDist, factor: &RatioDist) -> Vec<ScaledRun<'a>> {
    factor
        .points()
        .iter()
        .map(|f| ScaledRun {
            points: table.points(),
            value_scale: f.value,
            mass_scale: f.mass,
        })
        .collect()
}
