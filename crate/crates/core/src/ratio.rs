//! Likelihood-ratio distributions.
//!
//! For a pair of distributions `(P, Q)` on a finite space, the ratio `(P‖Q)`
//! is the law of `P(X)/Q(X)` when `X ~ Q`. It is stored as a table of
//! `(value, mass)` pairs sorted strictly ascending by value. A table is a
//! valid ratio exactly when its masses sum to one and its expectation is at
//! most one; the deficit `1 - E[R]` is the P-mass sitting outside the support
//! of Q.
//!
//! All sums run left to right over the sorted table so that repeated runs are
//! bit-identical.

use crate::dist::DiscreteDist;
use crate::error::{check_len, Result, TvError};
use crate::merge::{merge_scaled_runs, ScaledRun};
use crate::VALIDITY_TOL;

/// One entry of a ratio table: a likelihood-ratio value and its Q-mass.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MassPoint {
    pub value: f64,
    pub mass: f64,
}

impl MassPoint {
    pub fn new(value: f64, mass: f64) -> Self {
        Self { value, mass }
    }
}

/// A finite likelihood-ratio distribution.
#[derive(Debug, Clone, PartialEq)]
pub struct RatioDist {
    points: Vec<MassPoint>,
}

impl RatioDist {
    /// Builds a ratio from a table, checking every invariant at
    /// [`VALIDITY_TOL`].
    pub fn new(points: Vec<MassPoint>) -> Result<Self> {
        let r = Self { points };
        r.validate(VALIDITY_TOL)?;
        Ok(r)
    }

    /// Builds a ratio from `(value, mass)` pairs in any order, combining
    /// equal values. Masses of equal values are summed in ascending order.
    pub fn from_unsorted(mut pairs: Vec<(f64, f64)>) -> Result<Self> {
        pairs.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.total_cmp(&b.1)));
        let mut points: Vec<MassPoint> = Vec::with_capacity(pairs.len());
        for (value, mass) in pairs {
            match points.last_mut() {
                Some(last) if last.value == value => last.mass += mass,
                _ => points.push(MassPoint { value, mass }),
            }
        }
        Self::new(points)
    }

    /// The ratio of two identical distributions: all mass at 1.
    pub fn identity() -> Self {
        Self {
            points: vec![MassPoint::new(1.0, 1.0)],
        }
    }

    pub(crate) fn from_sorted_unchecked(points: Vec<MassPoint>) -> Self {
        debug_assert!(points.windows(2).all(|w| w[0].value < w[1].value));
        Self { points }
    }

    /// Checks the table invariants with tolerance `tol` on the two sums.
    pub fn validate(&self, tol: f64) -> Result<()> {
        if self.points.is_empty() {
            return Err(TvError::InvalidRatio("empty table".into()));
        }
        for (i, p) in self.points.iter().enumerate() {
            if !(p.value.is_finite() && p.value >= 0.0) {
                return Err(TvError::InvalidRatio(format!(
                    "value {} at entry {i} is not a finite nonnegative real",
                    p.value
                )));
            }
            if !(p.mass.is_finite() && p.mass > 0.0) {
                return Err(TvError::InvalidRatio(format!(
                    "mass {} at entry {i} is not positive",
                    p.mass
                )));
            }
        }
        if let Some(i) = self
            .points
            .windows(2)
            .position(|w| w[0].value >= w[1].value)
        {
            return Err(TvError::InvalidRatio(format!(
                "values not strictly increasing at entry {}",
                i + 1
            )));
        }
        let total = self.total_mass();
        if (total - 1.0).abs() > tol {
            return Err(TvError::InvalidRatio(format!(
                "masses sum to {total}, not 1"
            )));
        }
        let e = self.expectation();
        if e > 1.0 + tol {
            return Err(TvError::InvalidRatio(format!("expectation {e} exceeds 1")));
        }
        Ok(())
    }

    pub fn points(&self) -> &[MassPoint] {
        &self.points
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn total_mass(&self) -> f64 {
        self.points.iter().map(|p| p.mass).sum()
    }

    /// `E[R] = Σ value·mass`, which equals `P(Supp Q)`.
    pub fn expectation(&self) -> f64 {
        self.points.iter().map(|p| p.value * p.mass).sum()
    }

    /// `Σ_{value < 1} (1 - value)·mass`, the TV distance of any pair
    /// realizing this ratio.
    pub fn tv(&self) -> f64 {
        self.points
            .iter()
            .take_while(|p| p.value < 1.0)
            .map(|p| (1.0 - p.value) * p.mass)
            .sum::<f64>()
            .min(1.0)
    }
}

/// The ratio `(p‖q)`. Outcomes with `q(x) = 0` are skipped; their P-mass only
/// shows up as the expectation deficit.
pub fn ratio_of(p: &DiscreteDist, q: &DiscreteDist) -> Result<RatioDist> {
    check_len(p.len(), q.len())?;
    let pairs: Vec<(f64, f64)> = p
        .masses()
        .iter()
        .zip(q.masses())
        .filter(|(_, &qm)| qm > 0.0)
        .map(|(&pm, &qm)| (pm / qm, qm))
        // A ratio that overflows carries Q-mass below the smallest normal
        // double; drop it like the merge does.
        .filter(|(v, _)| v.is_finite())
        .collect();
    RatioDist::from_unsorted(pairs)
}

pub fn expectation(r: &RatioDist) -> f64 {
    r.expectation()
}

pub fn tv_of_ratio(r: &RatioDist) -> f64 {
    r.tv()
}

/// Law of the product of independent draws from `r1` and `r2`.
///
/// Equals `(P1 P2 ‖ Q1 Q2)` whenever `r1 = (P1‖Q1)` and `r2 = (P2‖Q2)`.
/// Only bit-identical products are combined.
pub fn indp_product(r1: &RatioDist, r2: &RatioDist) -> RatioDist {
    // Merge as few runs as possible: one run per point of the shorter table.
    let (outer, inner) = if r1.len() <= r2.len() {
        (r1, r2)
    } else {
        (r2, r1)
    };
    let runs: Vec<ScaledRun<'_>> = outer
        .points
        .iter()
        .map(|o| ScaledRun {
            points: &inner.points,
            value_scale: o.value,
            mass_scale: o.mass,
        })
        .collect();
    RatioDist::from_sorted_unchecked(merge_scaled_runs(&runs))
}

/// A ratio distribution over `[0, ∞]`: finite points plus an atom at infinity.
#[derive(Debug, Clone, PartialEq)]
pub struct ExtendedRatioDist {
    pub points: Vec<MassPoint>,
    pub inf_mass: f64,
}

impl ExtendedRatioDist {
    pub fn total_mass(&self) -> f64 {
        self.points.iter().map(|p| p.mass).sum::<f64>() + self.inf_mass
    }
}

/// The alternative `R†` of the canonical pair `(R†, R)`: mass `r·R(r)` at each
/// finite `r > 0` and `1 - E[R]` at infinity.
pub fn alternative_ratio(r: &RatioDist) -> ExtendedRatioDist {
    let points = r
        .points
        .iter()
        .filter(|p| p.value > 0.0)
        .map(|p| MassPoint::new(p.value, p.value * p.mass))
        .collect();
    ExtendedRatioDist {
        points,
        inf_mass: (1.0 - r.expectation()).max(0.0),
    }
}
