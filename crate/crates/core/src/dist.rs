//! Probability vectors over a finite sample space.

use crate::error::{check_len, Result, TvError};
use crate::VALIDITY_TOL;

/// A probability vector over `[q]`.
#[derive(Debug, Clone, PartialEq)]
pub struct DiscreteDist {
    masses: Vec<f64>,
}

impl DiscreteDist {
    /// Validates nonnegativity and that the masses sum to one within
    /// [`VALIDITY_TOL`].
    pub fn new(masses: Vec<f64>) -> Result<Self> {
        if masses.is_empty() {
            return Err(TvError::InvalidDistribution("empty sample space".into()));
        }
        if let Some((i, m)) = masses
            .iter()
            .enumerate()
            .find(|(_, m)| !m.is_finite() || **m < 0.0)
        {
            return Err(TvError::InvalidDistribution(format!(
                "mass {m} at outcome {i} is not a nonnegative real"
            )));
        }
        let total: f64 = masses.iter().sum();
        if (total - 1.0).abs() > VALIDITY_TOL {
            return Err(TvError::InvalidDistribution(format!(
                "masses sum to {total}, not 1"
            )));
        }
        Ok(Self { masses })
    }

    /// Point mass on `outcome` in a space of `len` outcomes.
    pub fn point(len: usize, outcome: usize) -> Result<Self> {
        if outcome >= len {
            return Err(TvError::Dimension {
                expected: len,
                actual: outcome + 1,
            });
        }
        let mut masses = vec![0.0; len];
        masses[outcome] = 1.0;
        Self::new(masses)
    }

    pub fn uniform(len: usize) -> Result<Self> {
        if len == 0 {
            return Err(TvError::InvalidDistribution("empty sample space".into()));
        }
        Self::new(vec![1.0 / len as f64; len])
    }

    pub fn masses(&self) -> &[f64] {
        &self.masses
    }

    pub fn len(&self) -> usize {
        self.masses.len()
    }

    pub fn is_empty(&self) -> bool {
        self.masses.is_empty()
    }

    pub fn into_masses(self) -> Vec<f64> {
        self.masses
    }
}

/// Total variation distance: half the L1 distance between `p` and `q`.
pub fn tv_discrete(p: &DiscreteDist, q: &DiscreteDist) -> Result<f64> {
    check_len(p.len(), q.len())?;
    let l1: f64 = p
        .masses
        .iter()
        .zip(&q.masses)
        .map(|(a, b)| (a - b).abs())
        .sum();
    Ok((0.5 * l1).min(1.0))
}
