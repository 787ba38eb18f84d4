//! The estimators written out step by step with the public building blocks,
//! checking every intermediate table, then compared with the library.

use tvd_core::generate::{random_markov_pair, random_product_pair};
use tvd_core::{
    build_partition, concatenate, estimate_markov_ratio, estimate_product_ratio, indp_product,
    kernel_conditional_ratio, markov_lower_bound, product_lower_bound, ratio_of,
    sparsify_wrt_intervals, ConditionalRatio, DiscreteDist, Kernel, MarkovPair, RatioDist,
    VALIDITY_TOL,
};

fn support_bound(eps_s: f64, delta_s: f64) -> usize {
    2 * ((-delta_s.ln()) / eps_s.ln_1p()).ceil() as usize + 3
}

fn valid(r: &RatioDist) {
    r.validate(VALIDITY_TOL).unwrap();
}

/// Sparsify the running product, multiply by the next exact marginal ratio.
fn reference_product(pair: &tvd_core::ProductPair, eps: f64) -> f64 {
    let n = pair.n();
    let d_lb = product_lower_bound(pair);
    let (eps_s, delta_s) = (eps / (2.0 * n as f64), eps / (2.0 * n as f64) * d_lb);
    let part = build_partition(eps_s, delta_s).unwrap();
    let bound = pair.q() * support_bound(eps_s, delta_s);
    let marginal = |i: usize| ratio_of(&pair.p_marginals()[i], &pair.q_marginals()[i]).unwrap();
    let mut acc = marginal(0);
    for k in 1..n {
        let sparse = sparsify_wrt_intervals(&acc, &part);
        valid(&sparse);
        acc = indp_product(&sparse, &marginal(k));
        valid(&acc);
        assert!(acc.len() <= bound, "{} > {bound}", acc.len());
    }
    acc.tv()
}

fn sparsify_each(cond: &ConditionalRatio, part: &tvd_core::IntervalPartition) -> ConditionalRatio {
    ConditionalRatio {
        per_state: cond
            .per_state
            .iter()
            .map(|r| {
                let s = sparsify_wrt_intervals(r, part);
                valid(&s);
                s
            })
            .collect(),
    }
}

/// Backward recursion: sparsify every suffix ratio, then prepend one step.
fn reference_markov(pair: &MarkovPair, eps: f64) -> f64 {
    let n = pair.n();
    let d_lb = markov_lower_bound(pair);
    let nf = n as f64;
    let (eps_s, delta_s) = (eps / (4.0 * nf), eps / (2.0 * nf) * d_lb);
    let part = build_partition(eps_s, delta_s).unwrap();
    let bound = pair.q() * support_bound(eps_s, delta_s);
    let (pk, qk) = (pair.p_kernels(), pair.q_kernels());
    let mut cond = kernel_conditional_ratio(&pk[n - 2], &qk[n - 2]).unwrap();
    for j in (0..n - 2).rev() {
        let sparse = sparsify_each(&cond, &part);
        let per_state = (0..pair.q())
            .map(|x| {
                let r = concatenate(pk[j].row(x), qk[j].row(x), &sparse).unwrap();
                valid(&r);
                assert!(r.len() <= bound, "{} > {bound}", r.len());
                r
            })
            .collect();
        cond = ConditionalRatio { per_state };
    }
    let joint = concatenate(pair.p_init(), pair.q_init(), &sparsify_each(&cond, &part)).unwrap();
    valid(&joint);
    joint.tv()
}

#[test]
fn product_estimator_matches_reference() {
    for seed in 0..30 {
        let n = 2 + (seed as usize % 9);
        let q = 2 + (seed as usize % 4);
        let skew = [0.3, 1.0, 3.0][seed as usize % 3];
        let pair = random_product_pair(n, q, seed, skew).unwrap();
        for eps in [0.5, 0.1, 0.02] {
            let (report, ratio) = estimate_product_ratio(&pair, eps).unwrap();
            valid(&ratio);
            let reference = reference_product(&pair, eps);
            assert!(
                (report.estimate - reference).abs() <= 1e-10,
                "seed {seed} eps {eps}: {} vs {reference}",
                report.estimate
            );
        }
    }
}

#[test]
fn markov_estimator_matches_reference() {
    for seed in 0..30 {
        let n = 2 + (seed as usize % 6);
        let q = 2 + (seed as usize % 3);
        let skew = [0.3, 1.0, 3.0][seed as usize % 3];
        let pair = random_markov_pair(n, q, seed, skew).unwrap();
        for eps in [0.5, 0.1, 0.02] {
            let (report, ratio) = estimate_markov_ratio(&pair, eps).unwrap();
            valid(&ratio);
            let reference = reference_markov(&pair, eps);
            assert!(
                (report.estimate - reference).abs() <= 1e-10,
                "seed {seed} eps {eps}: {} vs {reference}",
                report.estimate
            );
        }
    }
}

#[test]
fn reported_support_respects_bound() {
    let pair = random_product_pair(40, 6, 3, 1.0).unwrap();
    let (report, _) = estimate_product_ratio(&pair, 0.1).unwrap();
    let eps_s = 0.1 / 80.0;
    assert!(report.max_support <= 6 * support_bound(eps_s, eps_s * report.d_lb));

    let chain = random_markov_pair(30, 4, 3, 1.0).unwrap();
    let (report, _) = estimate_markov_ratio(&chain, 0.1).unwrap();
    assert!(report.max_support <= 4 * support_bound(0.1 / 120.0, 0.1 / 60.0 * report.d_lb));
}

#[test]
fn markov_runs_are_bit_identical() {
    let pair = random_markov_pair(12, 4, 21, 0.5).unwrap();
    let a = estimate_markov_ratio(&pair, 0.05).unwrap();
    let b = estimate_markov_ratio(&pair, 0.05).unwrap();
    assert_eq!(a.1, b.1);
    assert_eq!(a.0.estimate.to_bits(), b.0.estimate.to_bits());
}

/// State 2 is never visited under Q, so its kernel rows can be anything.
#[test]
fn unreachable_state_rows_do_not_matter() {
    let d = |v: &[f64]| DiscreteDist::new(v.to_vec()).unwrap();
    let k = |rows: &[&[f64]]| Kernel::new(rows.iter().map(|r| d(r)).collect()).unwrap();
    let build = |p_row: &[f64], q_row: &[f64]| {
        MarkovPair::new(
            d(&[0.5, 0.3, 0.2]),
            d(&[0.6, 0.4, 0.0]),
            vec![
                k(&[&[0.2, 0.5, 0.3], &[0.1, 0.1, 0.8], p_row]),
                k(&[&[0.6, 0.3, 0.1], &[0.3, 0.3, 0.4], p_row]),
            ],
            vec![
                k(&[&[0.7, 0.3, 0.0], &[0.2, 0.8, 0.0], q_row]),
                k(&[&[0.4, 0.6, 0.0], &[0.5, 0.5, 0.0], q_row]),
            ],
        )
        .unwrap()
    };
    let base = build(&[0.3, 0.3, 0.4], &[0.1, 0.2, 0.7]);
    let moved = build(&[1.0, 0.0, 0.0], &[0.0, 0.0, 1.0]);
    for eps in [0.5, 0.1, 0.01] {
        let a = estimate_markov_ratio(&base, eps).unwrap();
        let b = estimate_markov_ratio(&moved, eps).unwrap();
        assert_eq!(a.0.estimate.to_bits(), b.0.estimate.to_bits());
        assert_eq!(a.0.d_lb.to_bits(), b.0.d_lb.to_bits());
        assert_eq!(a.1, b.1);
    }
}
