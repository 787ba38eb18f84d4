//! Sparsification of ratio tables over a geometric partition of `[0, ∞]`.
//!
//! With `a_t = 1 - (1 + ε_s)^{-t}` the partition is, in ascending order,
//!
//! ```text
//! I_0, …, I_{m-1} = [a_t, a_{t+1})     I_m = [a_m, 1)     {1}
//! J_m = (1, 1/a_m]     J_{m-1}, …, J_0 = (1/a_{t+1}, 1/a_t]   (1/a_0 = ∞)
//! ```
//!
//! where `m = ⌈-ln δ_s / ln(1 + ε_s)⌉` makes `1 - a_m ≤ δ_s`. Sparsifying
//! pushes both members of the canonical pair `(R†, R)` through the map that
//! sends every interval to one point, so all the Q-mass of an interval lands
//! on `R†(I)/R(I)`. The atom of `R†` at infinity belongs to `J_0`.

use crate::error::{Result, TvError};
use crate::merge::ScaledRun;
use crate::ratio::{MassPoint, RatioDist};

/// Upper limit on `m`; the boundary table holds `m + 1` doubles.
pub const MAX_INTERVALS: usize = 1 << 25;

/// Position of a value in an [`IntervalPartition`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum IntervalIndex {
    /// `I_t`, below one.
    Low(usize),
    /// The singleton `{1}`.
    One,
    /// `J_t`, above one.
    High(usize),
}

#[derive(Debug, Clone, PartialEq)]
pub struct IntervalPartition {
    eps_s: f64,
    delta_s: f64,
    m: usize,
    log_step: f64,
    a: Vec<f64>,
    /// `thresholds[k]` is the smallest value lying above interval `k`.
    thresholds: Vec<f64>,
}

impl IntervalPartition {
    pub fn eps_s(&self) -> f64 {
        self.eps_s
    }

    pub fn delta_s(&self) -> f64 {
        self.delta_s
    }

    /// Number of intervals on each side, minus one.
    pub fn m(&self) -> usize {
        self.m
    }

    /// Boundary table `a_0 … a_m`.
    pub fn boundaries(&self) -> &[f64] {
        &self.a
    }

    /// Total number of intervals, `2m + 3`.
    pub fn interval_count(&self) -> usize {
        2 * self.m + 3
    }

    /// `1/a_t`, with `1/a_0 = ∞`.
    #[inline]
    fn upper(&self, t: usize) -> f64 {
        if t == 0 {
            f64::INFINITY
        } else {
            1.0 / self.a[t]
        }
    }

    /// Closed-form guess for the index of `x ∈ [0, 1)`, clamped to `[0, m]`.
    #[inline]
    fn guess(&self, x: f64) -> usize {
        let t = -(-x).ln_1p() / self.log_step;
        if t.is_finite() && t > 0.0 {
            (t.floor() as usize).min(self.m)
        } else {
            0
        }
    }

    /// The interval containing `r`.
    pub fn locate(&self, r: f64) -> IntervalIndex {
        debug_assert!(r >= 0.0 && r.is_finite());
        if r == 1.0 {
            return IntervalIndex::One;
        }
        let m = self.m;
        if r < 1.0 {
            let mut t = self.guess(r);
            while t < m && r >= self.a[t + 1] {
                t += 1;
            }
            while t > 0 && r < self.a[t] {
                t -= 1;
            }
            IntervalIndex::Low(t)
        } else {
            let mut t = self.guess(1.0 / r);
            while t < m && r <= self.upper(t + 1) {
                t += 1;
            }
            while t > 0 && r > self.upper(t) {
                t -= 1;
            }
            IntervalIndex::High(t)
        }
    }

    /// Dense ascending key in `0..2m+3` for an interval.
    #[inline]
    pub fn key(&self, idx: IntervalIndex) -> usize {
        match idx {
            IntervalIndex::Low(t) => t,
            IntervalIndex::One => self.m + 1,
            IntervalIndex::High(t) => 2 * self.m + 2 - t,
        }
    }
}

/// Builds the partition for relative width `eps_s` and tail `delta_s`.
pub fn build_partition(eps_s: f64, delta_s: f64) -> Result<IntervalPartition> {
    if !(eps_s.is_finite() && eps_s > 0.0) {
        return Err(TvError::Parameter(format!(
            "eps_s must be positive, got {eps_s}"
        )));
    }
    if !(delta_s > 0.0 && delta_s < 1.0) {
        return Err(TvError::Parameter(format!(
            "delta_s must lie in (0, 1), got {delta_s}"
        )));
    }
    let log_step = eps_s.ln_1p();
    let raw = (-delta_s.ln() / log_step).ceil();
    if raw > MAX_INTERVALS as f64 {
        return Err(TvError::Size {
            what: "interval partition",
            needed: if raw.is_finite() {
                raw as u128
            } else {
                u128::MAX
            },
            cap: MAX_INTERVALS as u128,
        });
    }
    let mut m = (raw as usize).max(1);
    // The quotient can land one ulp above an integer; keep the smallest m.
    if m > 1 && (-((m - 1) as f64) * log_step).exp() <= delta_s {
        m -= 1;
    }
    let a: Vec<f64> = (0..=m)
        .map(|t| -(-(t as f64) * log_step).exp_m1())
        .collect();
    let mut thresholds = Vec::with_capacity(2 * m + 3);
    thresholds.extend(a[1..].iter().copied());
    thresholds.push(1.0);
    thresholds.push(1.0_f64.next_up());
    // Right-closed intervals above one: advance once value > 1/a_t.
    thresholds.extend((1..=m).rev().map(|t| (1.0 / a[t]).next_up()));
    thresholds.push(f64::INFINITY);
    Ok(IntervalPartition {
        eps_s,
        delta_s,
        m,
        log_step,
        a,
        thresholds,
    })
}

pub fn locate_interval(part: &IntervalPartition, r: f64) -> IntervalIndex {
    part.locate(r)
}

#[derive(Debug, Clone, Copy)]
struct Bucket {
    key: usize,
    first: MassPoint,
    count: usize,
    q_mass: f64,
    p_mass: f64,
    min: f64,
    max: f64,
}

impl Bucket {
    fn start(key: usize, p: MassPoint) -> Self {
        Self {
            key,
            first: p,
            count: 1,
            q_mass: p.mass,
            p_mass: p.value * p.mass,
            min: p.value,
            max: p.value,
        }
    }

    fn add(&mut self, p: MassPoint) {
        self.count += 1;
        self.q_mass += p.mass;
        self.p_mass += p.value * p.mass;
        self.max = p.value;
    }
}

/// Deficits this small are rounding residue from an earlier fold; they stay
/// implicit rather than nudging the top interval again.
const MIN_FOLDED_MASS: f64 = 1e-12;

/// P-mass at infinity to fold into `J_0`, given the expectation of a table.
fn infinity_mass(expectation: f64) -> f64 {
    let deficit = 1.0 - expectation;
    if deficit > MIN_FOLDED_MASS {
        deficit
    } else {
        0.0
    }
}

/// Merges the mass of `r` inside each interval of `part` into one point.
///
/// Intervals with zero Q-mass emit nothing. The merged value of `J_0` also
/// absorbs the expectation deficit `1 - E[r]`, which is the P-mass at
/// infinity.
pub fn sparsify_wrt_intervals(r: &RatioDist, part: &IntervalPartition) -> RatioDist {
    let one_key = part.key(IntervalIndex::One);
    let top_key = part.key(IntervalIndex::High(0));
    let inf_mass = infinity_mass(r.expectation());

    let mut out: Vec<MassPoint> = Vec::with_capacity(r.len().min(part.interval_count()));
    let mut emit = |b: Bucket| {
        let folds_infinity = b.key == top_key && inf_mass > 0.0;
        let value = if b.count == 1 && !folds_infinity {
            b.first.value
        } else if b.key == one_key {
            1.0
        } else if folds_infinity {
            ((b.p_mass + inf_mass) / b.q_mass).max(b.min)
        } else {
            // Rounding may push the weighted mean just outside the members.
            (b.p_mass / b.q_mass).clamp(b.min, b.max)
        };
        if value.is_finite() {
            out.push(MassPoint::new(value, b.q_mass));
        }
    };

    let mut current: Option<Bucket> = None;
    for &p in r.points() {
        let key = part.key(part.locate(p.value));
        match current.as_mut() {
            Some(b) if b.key == key => b.add(p),
            _ => {
                if let Some(done) = current.take() {
                    emit(done);
                }
                current = Some(Bucket::start(key, p));
            }
        }
    }
    if let Some(done) = current {
        emit(done);
    }
    RatioDist::from_sorted_unchecked(out)
}

/// Reusable accumulators for [`sparsify_scaled_runs`]: `(Q-mass, P-mass)`
/// per interval key.
#[derive(Debug, Default)]
pub(crate) struct Buckets {
    sums: Vec<(f64, f64)>,
}

impl Buckets {
    fn reset(&mut self, len: usize) {
        if self.sums.len() != len {
            self.sums = vec![(0.0, 0.0); len];
        }
    }
}

/// `sparsify_wrt_intervals(merge(runs), part)` without materializing the
/// merged table.
///
/// Every scaled entry is dropped straight into its interval's accumulator;
/// runs are sorted, so the interval index only moves forward within a run.
/// A run's consecutive entries in one interval are summed first and then
/// added to the accumulator, run by run. Merged values are clamped to their
/// interval.
pub(crate) fn sparsify_scaled_runs(
    runs: &[ScaledRun<'_>],
    part: &IntervalPartition,
    buckets: &mut Buckets,
) -> RatioDist {
    let thr = &part.thresholds;
    buckets.reset(part.interval_count());
    let sums = &mut buckets.sums;
    let (mut lo, mut hi) = (usize::MAX, 0usize);

    for run in runs {
        let (vs, ms) = (run.value_scale, run.mass_scale);
        let Some(first) = run.points.first() else {
            continue;
        };
        let start = first.value * vs;
        if !start.is_finite() {
            continue;
        }
        let mut k = part.key(part.locate(start));
        lo = lo.min(k);
        let (mut q_run, mut p_run) = (0.0, 0.0);
        for p in run.points {
            let value = p.value * vs;
            if value >= thr[k] {
                sums[k].0 += q_run;
                sums[k].1 += p_run;
                (q_run, p_run) = (0.0, 0.0);
                if value == f64::INFINITY {
                    break;
                }
                k += 1;
                while value >= thr[k] {
                    k += 1;
                }
            }
            // Underflowed masses add zero.
            let mass = p.mass * ms;
            q_run += mass;
            p_run += value * mass;
        }
        sums[k].0 += q_run;
        sums[k].1 += p_run;
        hi = hi.max(k);
    }
    if lo > hi {
        return RatioDist::from_sorted_unchecked(Vec::new());
    }

    let expectation: f64 = sums[lo..=hi].iter().map(|s| s.1).sum();
    let inf_mass = infinity_mass(expectation);
    let one_key = part.key(IntervalIndex::One);
    let top_key = part.key(IntervalIndex::High(0));
    let mut out = Vec::with_capacity(hi - lo + 1);
    for k in lo..=hi {
        let (q_mass, p_mass) = std::mem::take(&mut sums[k]);
        if q_mass <= 0.0 {
            continue;
        }
        // Smallest and largest doubles inside interval k.
        let floor = if k == 0 { 0.0 } else { thr[k - 1] };
        let value = if k == one_key {
            1.0
        } else if k == top_key {
            ((p_mass + inf_mass) / q_mass).max(floor)
        } else {
            (p_mass / q_mass).clamp(floor, thr[k].next_down())
        };
        if value.is_finite() {
            out.push(MassPoint::new(value, q_mass));
        }
    }
    RatioDist::from_sorted_unchecked(out)
}

/// Sparsifies `r` over the geometric partition for `(eps_s, delta_s)`.
///
/// The output has at most `2m + 3` points and the same TV functional as `r`.
pub fn sparsify(r: &RatioDist, eps_s: f64, delta_s: f64) -> Result<RatioDist> {
    let part = build_partition(eps_s, delta_s)?;
    Ok(sparsify_wrt_intervals(r, &part))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn r(v: &[(f64, f64)]) -> RatioDist {
        RatioDist::new(v.iter().map(|&(a, b)| MassPoint::new(a, b)).collect()).unwrap()
    }

    #[test]
    fn partition_examples() {
        let p = build_partition(1.0, 0.25).unwrap();
        assert_eq!(p.m(), 2);
        assert_eq!(p.boundaries(), &[0.0, 0.5, 0.75]);
        let p = build_partition(1.0, 0.5).unwrap();
        assert_eq!(p.m(), 1);
        assert_eq!(p.boundaries(), &[0.0, 0.5]);
    }

    #[test]
    fn partition_parameter_errors() {
        for (e, d) in [(0.0, 0.5), (-1.0, 0.5), (1.0, 0.0), (1.0, 1.0), (1.0, 1.5)] {
            assert!(matches!(build_partition(e, d), Err(TvError::Parameter(_))));
        }
        assert!(matches!(
            build_partition(1e-9, 1e-9),
            Err(TvError::Size { .. })
        ));
    }

    #[test]
    fn partition_tail_and_narrowness() {
        for &(e, d) in &[(0.1, 0.01), (1e-3, 1e-6), (0.5, 0.3), (1e-5, 1e-7)] {
            let p = build_partition(e, d).unwrap();
            let a = p.boundaries();
            assert_eq!(a[0], 0.0);
            assert!(1.0 - a[p.m()] <= d);
            assert!(a.windows(2).all(|w| w[0] < w[1]));
            for w in a.windows(2) {
                assert!(w[1] - w[0] <= e * (1.0 - w[1]) + 1e-12);
            }
        }
    }

    #[test]
    fn locate_examples() {
        let p = build_partition(1.0, 0.25).unwrap();
        assert_eq!(p.locate(0.0), IntervalIndex::Low(0));
        assert_eq!(p.locate(1.0), IntervalIndex::One);
        assert_eq!(p.locate(1.5), IntervalIndex::High(1));
        assert_eq!(p.locate(0.5), IntervalIndex::Low(1));
        assert_eq!(p.locate(0.7499), IntervalIndex::Low(1));
        assert_eq!(p.locate(0.75), IntervalIndex::Low(2));
        assert_eq!(p.locate(0.9999), IntervalIndex::Low(2));
        assert_eq!(p.locate(4.0 / 3.0), IntervalIndex::High(2));
        assert_eq!(p.locate(1.0000001), IntervalIndex::High(2));
        assert_eq!(p.locate(2.0), IntervalIndex::High(1));
        assert_eq!(p.locate(2.0000001), IntervalIndex::High(0));
        assert_eq!(p.locate(1e300), IntervalIndex::High(0));
    }

    #[test]
    fn locate_matches_boundary_scan() {
        let p = build_partition(0.03, 1e-4).unwrap();
        let a = p.boundaries();
        let m = p.m();
        let scan = |r: f64| -> IntervalIndex {
            if r == 1.0 {
                return IntervalIndex::One;
            }
            if r < 1.0 {
                let t = (0..=m).rev().find(|&t| r >= a[t]).unwrap();
                return IntervalIndex::Low(t);
            }
            let inv = |t: usize| if t == 0 { f64::INFINITY } else { 1.0 / a[t] };
            let t = (0..=m).rev().find(|&t| r <= inv(t)).unwrap();
            IntervalIndex::High(t)
        };
        let mut probes: Vec<f64> = Vec::new();
        for &b in a {
            for x in [b, 1.0 / b] {
                if x.is_finite() {
                    probes.extend([x, x.next_up(), x.next_down()]);
                }
            }
        }
        probes.extend((0..2000).map(|i| i as f64 / 1000.0));
        for x in probes.into_iter().filter(|x| *x >= 0.0) {
            assert_eq!(p.locate(x), scan(x), "r = {x:e}");
        }
    }

    #[test]
    fn keys_are_dense_and_ordered() {
        let p = build_partition(1.0, 0.25).unwrap();
        let keys: Vec<usize> = [
            IntervalIndex::Low(0),
            IntervalIndex::Low(1),
            IntervalIndex::Low(2),
            IntervalIndex::One,
            IntervalIndex::High(2),
            IntervalIndex::High(1),
            IntervalIndex::High(0),
        ]
        .into_iter()
        .map(|i| p.key(i))
        .collect();
        assert_eq!(keys, (0..7).collect::<Vec<_>>());
        assert_eq!(p.interval_count(), 7);
    }

    #[test]
    fn sparsify_examples() {
        let part = build_partition(1.0, 0.25).unwrap();
        assert_eq!(
            sparsify_wrt_intervals(&RatioDist::identity(), &part),
            RatioDist::identity()
        );

        let x = r(&[(0.55, 0.4), (0.6, 0.3), (0.7, 0.3)]);
        let s = sparsify_wrt_intervals(&x, &part);
        assert_eq!(s.len(), 1);
        assert!((s.points()[0].value - 0.61).abs() < 1e-15);
        assert!((s.points()[0].mass - 1.0).abs() < 1e-15);

        let x = r(&[(0.5, 1.0)]);
        let s = sparsify_wrt_intervals(&x, &part);
        assert_eq!(s, x);
        assert_eq!(s.expectation(), 0.5);
    }

    #[test]
    fn infinity_mass_folds_into_top_interval() {
        // E = 0.16 + 0.3 + 0.4 = 0.86, so 0.14 of P-mass sits at infinity.
        let x = r(&[(0.2, 0.8), (3.0, 0.1), (4.0, 0.1)]);
        let s = sparsify(&x, 1.0, 0.25).unwrap();
        // J_0 = (2, ∞] holds 3 and 4: (0.3 + 0.4 + 0.14) / 0.2 = 4.2.
        assert_eq!(s.len(), 2);
        assert_eq!(s.points()[0], MassPoint::new(0.2, 0.8));
        assert!((s.points()[1].value - 4.2).abs() < 1e-14);
        assert!((s.expectation() - 1.0).abs() < 1e-14);
        assert!((s.tv() - x.tv()).abs() < 1e-15);
    }

    #[test]
    fn infinity_mass_dropped_when_top_interval_empty() {
        let x = r(&[(0.2, 0.5), (1.5, 0.5)]);
        let s = sparsify(&x, 1.0, 0.25).unwrap();
        assert_eq!(s, x);
    }

    #[test]
    fn identity_passes_through() {
        for (e, d) in [(0.5, 0.5), (1e-3, 1e-5)] {
            assert_eq!(
                sparsify(&RatioDist::identity(), e, d).unwrap(),
                RatioDist::identity()
            );
        }
    }

    #[test]
    fn singleton_collects_exact_one() {
        let part = build_partition(0.5, 0.1).unwrap();
        let x = r(&[(0.2, 0.3), (1.0, 0.4), (1.5, 0.3)]);
        let s = sparsify_wrt_intervals(&x, &part);
        assert!(s.points().iter().any(|p| p.value == 1.0 && p.mass == 0.4));
    }

    #[test]
    fn propagates_parameter_errors() {
        assert!(sparsify(&RatioDist::identity(), 0.0, 0.5).is_err());
        assert!(sparsify(&RatioDist::identity(), 0.5, 1.0).is_err());
    }

    #[test]
    fn fused_matches_merge_then_sparsify() {
        use crate::generate::random_product_pair;
        use crate::merge::merge_scaled_runs;

        for (seed, eps_s) in [(1, 0.3), (2, 0.05), (3, 1e-3)] {
            let pair = random_product_pair(6, 4, seed, 0.5).unwrap();
            let part = build_partition(eps_s, 1e-3).unwrap();
            let mut buckets = Buckets::default();
            let mut table = pair.marginal_ratio(0);
            for k in 1..pair.n() {
                let factor = pair.marginal_ratio(k);
                let runs: Vec<ScaledRun<'_>> = factor
                    .points()
                    .iter()
                    .map(|f| ScaledRun {
                        points: table.points(),
                        value_scale: f.value,
                        mass_scale: f.mass,
                    })
                    .collect();
                let fused = sparsify_scaled_runs(&runs, &part, &mut buckets);
                let merged = RatioDist::from_sorted_unchecked(merge_scaled_runs(&runs));
                let reference = sparsify_wrt_intervals(&merged, &part);
                assert_eq!(fused.len(), reference.len());
                for (a, b) in fused.points().iter().zip(reference.points()) {
                    assert!((a.value - b.value).abs() <= 1e-12 * b.value.max(1.0));
                    assert!((a.mass - b.mass).abs() <= 1e-12);
                }
                assert!((fused.tv() - merged.tv()).abs() <= 1e-12);
                table = fused;
            }
        }
    }
}
