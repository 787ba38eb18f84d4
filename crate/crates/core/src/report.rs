use std::time::Duration;

/// Output of an estimator run.
#[derive(Debug, Clone, PartialEq)]
pub struct EstimateReport {
    /// The estimate `Δ̂`, a lower bound on the true TV distance.
    pub estimate: f64,
    pub epsilon: f64,
    /// Lower bound used to set the sparsification tail parameter.
    pub d_lb: f64,
    /// Largest table built along the way.
    pub max_support: usize,
    pub iterations: usize,
    pub elapsed: Duration,
}
