//! Upper boundary of the Neyman–Pearson region of a ratio.
//!
//! Walking the sorted table `(r_1, p_1), (r_2, p_2), …` the boundary is the
//! polyline through the cumulative sums `(Σ r_t p_t, Σ p_t)`; segment `i` is
//! the vector `(r_i p_i, p_i)`, so its slope is `1/r_i`. A final horizontal
//! segment to `(1, 1)` carries the P-mass at infinity.

use crate::ratio::RatioDist;

/// Cumulative points closer than this to `(1, 1)` are snapped onto it.
const CLOSE_TOL: f64 = 1e-12;

/// Vertices of the concave boundary, from `(0, 0)` to `(1, 1)`.
#[derive(Debug, Clone, PartialEq)]
pub struct NPBoundary {
    pub vertices: Vec<(f64, f64)>,
}

impl NPBoundary {
    /// Writes the vertices as CSV with a `x,y` header.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("x,y\n");
        for (x, y) in &self.vertices {
            out.push_str(&format!("{x:?},{y:?}\n"));
        }
        out
    }
}

pub fn np_boundary(r: &RatioDist) -> NPBoundary {
    let mut vertices = Vec::with_capacity(r.len() + 2);
    vertices.push((0.0, 0.0));
    let (mut x, mut y) = (0.0_f64, 0.0_f64);
    for p in r.points() {
        x += p.value * p.mass;
        y += p.mass;
        // Rounding can carry a valid table's sums just past one.
        vertices.push((x.min(1.0), y.min(1.0)));
    }
    let last = vertices.last_mut().expect("origin is always present");
    if (last.0 - 1.0).abs() <= CLOSE_TOL && (last.1 - 1.0).abs() <= CLOSE_TOL {
        *last = (1.0, 1.0);
    } else {
        vertices.push((1.0, 1.0));
    }
    NPBoundary { vertices }
}
