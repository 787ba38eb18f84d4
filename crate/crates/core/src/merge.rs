//! K-way merge of scaled, sorted ratio tables.
//!
//! Both the independent product and the concatenation of a conditional ratio
//! reduce to the same primitive: take several sorted tables, multiply every
//! value of table `j` by `value_scale[j]` and every mass by `mass_scale[j]`,
//! and merge the results into one sorted table. Multiplying by a nonnegative
//! constant keeps a sorted run sorted, so a heap over the run heads suffices.

use std::cmp::Ordering;
use std::collections::BinaryHeap;

use crate::ratio::MassPoint;

/// One input run of the merge.
#[derive(Debug, Clone, Copy)]
pub(crate) struct ScaledRun<'a> {
    pub points: &'a [MassPoint],
    pub value_scale: f64,
    pub mass_scale: f64,
}

#[derive(Debug, Clone, Copy)]
struct Head {
    value: f64,
    mass: f64,
    run: usize,
    pos: usize,
}

impl PartialEq for Head {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}

impl Eq for Head {}

impl PartialOrd for Head {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

// Reversed so that `BinaryHeap` pops the smallest (value, mass) first.
impl Ord for Head {
    fn cmp(&self, other: &Self) -> Ordering {
        other
            .value
            .total_cmp(&self.value)
            .then_with(|| other.mass.total_cmp(&self.mass))
            .then_with(|| other.run.cmp(&self.run))
    }
}

impl<'a> ScaledRun<'a> {
    #[inline]
    fn head(&self, run: usize, pos: usize) -> Option<Head> {
        self.points.get(pos).map(|p| Head {
            value: p.value * self.value_scale,
            mass: p.mass * self.mass_scale,
            run,
            pos,
        })
    }
}

fn flush(value: f64, masses: &mut Vec<f64>, out: &mut Vec<MassPoint>) {
    let mass = if masses.len() == 1 {
        masses[0]
    } else {
        masses.sort_by(f64::total_cmp);
        masses.iter().sum()
    };
    out.push(MassPoint { value, mass });
    masses.clear();
}

/// Merges the scaled runs into a strictly ascending table, combining entries
/// whose computed values are bit-identical. Combined masses are summed in
/// ascending order, so the result does not depend on the order of the runs.
///
/// Entries whose mass underflows to zero or whose value overflows are
/// dropped: the former carry no Q-mass and the latter carry Q-mass below the
/// smallest normal double, so their P-mass moves to the implicit atom at
/// infinity.
pub(crate) fn merge_scaled_runs(runs: &[ScaledRun<'_>]) -> Vec<MassPoint> {
    let capacity: usize = runs.iter().map(|r| r.points.len()).sum();
    let mut out: Vec<MassPoint> = Vec::with_capacity(capacity);
    let mut heap: BinaryHeap<Head> = runs
        .iter()
        .enumerate()
        .filter_map(|(i, r)| r.head(i, 0))
        .collect();

    // Masses of the value currently being collected.
    let mut value = f64::NAN;
    let mut masses: Vec<f64> = Vec::new();

    while let Some(head) = heap.pop() {
        if let Some(next) = runs[head.run].head(head.run, head.pos + 1) {
            heap.push(next);
        }
        if head.mass <= 0.0 || !head.value.is_finite() {
            continue;
        }
        if head.value != value && !masses.is_empty() {
            flush(value, &mut masses, &mut out);
        }
        value = head.value;
        masses.push(head.mass);
    }
    if !masses.is_empty() {
        flush(value, &mut masses, &mut out);
    }
    out
}
