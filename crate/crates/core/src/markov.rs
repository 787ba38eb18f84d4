//! Relative-error TV estimation between two Markov chains over `[q]^n`.
//!
//! The recursion runs backwards in time over conditional ratios: for each
//! state `x` at step `k - 1`, the ratio of the two laws of the suffix
//! `X_k … X_n` given `X_{k-1} = x`. A suffix ratio one step longer is the
//! mixture over next states of the shorter suffix ratios, scaled by the
//! one-step likelihood ratio (see [`concatenate`]). Each per-state table is
//! sparsified with `ε_s = ε/4n` and `δ_s = (ε/2n)·d_LB` before it is used.

use std::time::Instant;

use rayon::prelude::*;

use crate::dist::{tv_discrete, DiscreteDist};
use crate::error::{check_len, Result, TvError};
use crate::merge::{merge_scaled_runs, ScaledRun};
use crate::product::{check_epsilon, check_intermediate};
use crate::ratio::{ratio_of, RatioDist};
use crate::report::EstimateReport;
use crate::sparsify::{build_partition, sparsify_scaled_runs, sparsify_wrt_intervals, Buckets};

/// A row-stochastic `q × q` matrix; row `x` is the law of the next state
/// given the current state `x`.
#[derive(Debug, Clone, PartialEq)]
pub struct Kernel {
    rows: Vec<DiscreteDist>,
}

impl Kernel {
    pub fn new(rows: Vec<DiscreteDist>) -> Result<Self> {
        if rows.is_empty() {
            return Err(TvError::Parameter("kernel needs at least one row".into()));
        }
        for row in &rows {
            check_len(rows.len(), row.len())?;
        }
        Ok(Self { rows })
    }

    pub fn from_rows(rows: Vec<Vec<f64>>) -> Result<Self> {
        Self::new(
            rows.into_iter()
                .map(DiscreteDist::new)
                .collect::<Result<Vec<_>>>()?,
        )
    }

    pub fn identity(q: usize) -> Result<Self> {
        Self::new(
            (0..q)
                .map(|x| DiscreteDist::point(q, x))
                .collect::<Result<_>>()?,
        )
    }

    pub fn rows(&self) -> &[DiscreteDist] {
        &self.rows
    }

    pub fn row(&self, x: usize) -> &DiscreteDist {
        &self.rows[x]
    }

    pub fn q(&self) -> usize {
        self.rows.len()
    }

    /// Law of the next state when the current state has law `d`.
    pub fn push_forward(&self, d: &[f64]) -> Vec<f64> {
        let mut out = vec![0.0; self.q()];
        for (row, &w) in self.rows.iter().zip(d) {
            if w == 0.0 {
                continue;
            }
            for (o, &k) in out.iter_mut().zip(row.masses()) {
                *o += w * k;
            }
        }
        out
    }
}

/// Two `n`-step Markov chains on `[q]`: initial laws and `n - 1` kernels each.
#[derive(Debug, Clone, PartialEq)]
pub struct MarkovPair {
    p_init: DiscreteDist,
    q_init: DiscreteDist,
    p_kernels: Vec<Kernel>,
    q_kernels: Vec<Kernel>,
}

impl MarkovPair {
    pub fn new(
        p_init: DiscreteDist,
        q_init: DiscreteDist,
        p_kernels: Vec<Kernel>,
        q_kernels: Vec<Kernel>,
    ) -> Result<Self> {
        let q = p_init.len();
        check_len(q, q_init.len())?;
        check_len(p_kernels.len(), q_kernels.len())?;
        for k in p_kernels.iter().chain(&q_kernels) {
            check_len(q, k.q())?;
        }
        Ok(Self {
            p_init,
            q_init,
            p_kernels,
            q_kernels,
        })
    }

    /// Number of steps.
    pub fn n(&self) -> usize {
        self.p_kernels.len() + 1
    }

    /// Number of states.
    pub fn q(&self) -> usize {
        self.p_init.len()
    }

    pub fn p_init(&self) -> &DiscreteDist {
        &self.p_init
    }

    pub fn q_init(&self) -> &DiscreteDist {
        &self.q_init
    }

    /// `p_kernels()[j]` moves the chain from step `j + 1` to step `j + 2`.
    pub fn p_kernels(&self) -> &[Kernel] {
        &self.p_kernels
    }

    pub fn q_kernels(&self) -> &[Kernel] {
        &self.q_kernels
    }
}

/// One ratio table per conditioning state.
#[derive(Debug, Clone, PartialEq)]
pub struct ConditionalRatio {
    pub per_state: Vec<RatioDist>,
}

impl ConditionalRatio {
    pub fn q(&self) -> usize {
        self.per_state.len()
    }

    pub fn max_support(&self) -> usize {
        self.per_state.iter().map(RatioDist::len).max().unwrap_or(0)
    }
}

/// Row-wise ratios `(pk(·|x) ‖ qk(·|x))`.
pub fn kernel_conditional_ratio(pk: &Kernel, qk: &Kernel) -> Result<ConditionalRatio> {
    check_len(pk.q(), qk.q())?;
    let per_state = pk
        .rows
        .iter()
        .zip(&qk.rows)
        .map(|(p, q)| ratio_of(p, q))
        .collect::<Result<_>>()?;
    Ok(ConditionalRatio { per_state })
}

/// Joint ratio of `(px·P_{Y|X} ‖ qx·Q_{Y|X})` from the conditional ratio of
/// the two kernels.
///
/// The result is the mixture, with weight `qx(x)`, of `cond[x]` scaled by
/// `px(x)/qx(x)`. States with `qx(x) = 0` contribute nothing.
pub fn concatenate(
    px: &DiscreteDist,
    qx: &DiscreteDist,
    cond: &ConditionalRatio,
) -> Result<RatioDist> {
    check_len(px.len(), qx.len())?;
    check_len(px.len(), cond.q())?;
    Ok(RatioDist::from_sorted_unchecked(merge_scaled_runs(
        &concat_runs(px, qx, cond),
    )))
}

/// Half the largest TV distance between consecutive hybrids of the two
/// chains, which lies in `[Δ_TV/2n, Δ_TV]`.
///
/// The `k`-th hybrid follows Q up to step `k` and P afterwards; neighbouring
/// hybrids differ only in the kernel used at step `k`, so their distance is
/// the Q-marginal-weighted average of the row distances of that kernel.
pub fn markov_lower_bound(pair: &MarkovPair) -> f64 {
    let mut best = tv_discrete(&pair.p_init, &pair.q_init).expect("validated shape");
    let mut q_marginal = pair.q_init.masses().to_vec();
    for (pk, qk) in pair.p_kernels.iter().zip(&pair.q_kernels) {
        let step: f64 = q_marginal
            .iter()
            .enumerate()
            .filter(|(_, &w)| w > 0.0)
            .map(|(x, &w)| w * tv_discrete(pk.row(x), qk.row(x)).expect("validated shape"))
            .sum();
        best = best.max(step);
        q_marginal = qk.push_forward(&q_marginal);
    }
    0.5 * best
}

/// Estimates `Δ_TV(P, Q)` between two chains to relative error `eps`, from
/// below.
pub fn estimate_markov_tv(pair: &MarkovPair, eps: f64) -> Result<EstimateReport> {
    estimate_markov_ratio(pair, eps).map(|(report, _)| report)
}

/// Same as [`estimate_markov_tv`], also returning the final ratio table.
pub fn estimate_markov_ratio(pair: &MarkovPair, eps: f64) -> Result<(EstimateReport, RatioDist)> {
    check_epsilon(eps)?;
    let start = Instant::now();
    let n = pair.n();
    let d_lb = markov_lower_bound(pair);
    let report = |estimate: f64, max_support: usize, iterations: usize| EstimateReport {
        estimate,
        epsilon: eps,
        d_lb,
        max_support,
        iterations,
        elapsed: start.elapsed(),
    };

    if d_lb == 0.0 {
        // Δ_TV ≤ 2n·d_LB, so the chains coincide.
        return Ok((report(0.0, 1, 0), RatioDist::identity()));
    }
    if n == 1 {
        let ratio = ratio_of(&pair.p_init, &pair.q_init)?;
        let tv = tv_discrete(&pair.p_init, &pair.q_init)?;
        let support = ratio.len();
        return Ok((report(tv, support, 0), ratio));
    }

    let nf = n as f64;
    let part = build_partition(eps / (4.0 * nf), eps / (2.0 * nf) * d_lb)?;
    let last = n - 2;
    let cond = kernel_conditional_ratio(&pair.p_kernels[last], &pair.q_kernels[last])?;
    let mut max_support = cond.max_support();
    let mut sparse = ConditionalRatio {
        per_state: cond
            .per_state
            .iter()
            .map(|r| {
                let s = sparsify_wrt_intervals(r, &part);
                check_intermediate(&s).map(|_| s)
            })
            .collect::<Result<_>>()?,
    };

    // Step k turns the sparsified suffix ratios given X_k into those given
    // X_{k-1}: sparsify(concatenate(P_{k|k-1}(·|x), Q_{k|k-1}(·|x), sparse))
    // for every state x, fused so the concatenation is never stored.
    for k in (2..n).rev() {
        let (pk, qk) = (&pair.p_kernels[k - 2], &pair.q_kernels[k - 2]);
        let stepped: Vec<(RatioDist, usize)> = (0..pair.q())
            .into_par_iter()
            .map_init(Buckets::default, |buckets, x| {
                let runs = concat_runs(pk.row(x), qk.row(x), &sparse);
                let terms = runs.iter().map(|r| r.points.len()).sum();
                let s = sparsify_scaled_runs(&runs, &part, buckets);
                check_intermediate(&s).map(|_| (s, terms))
            })
            .collect::<Result<_>>()?;
        let (per_state, terms): (Vec<_>, Vec<_>) = stepped.into_iter().unzip();
        max_support = max_support.max(terms.into_iter().max().unwrap_or(0));
        sparse = ConditionalRatio { per_state };
    }

    let joint = concatenate(&pair.p_init, &pair.q_init, &sparse)?;
    check_intermediate(&joint)?;
    max_support = max_support.max(joint.len());
    Ok((report(joint.tv(), max_support, n - 1), joint))
}

/// Runs whose merge is `concatenate(px, qx, cond)`.
fn concat_runs<'a>(
    px: &DiscreteDist,
    qx: &DiscreteDist,
    cond: &'a ConditionalRatio,
) -> Vec<ScaledRun<'a>> {
    px.masses()
        .iter()
        .zip(qx.masses())
        .zip(&cond.per_state)
        .filter(|((_, &qm), _)| qm > 0.0)
        .map(|((&pm, &qm), r)| ScaledRun {
            points: r.points(),
            value_scale: pm / qm,
            mass_scale: qm,
        })
        .collect()
}
