use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Mode {
    /// Relative-error estimator.
    Fptas,
    /// Exact ratio pipeline, no sparsification.
    Exact,
    /// Brute-force enumeration.
    Oracle,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReportFile {
    pub mode: Mode,
    pub estimate: f64,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub epsilon: Option<f64>,
    pub d_lb: f64,
    pub max_support: usize,
    pub elapsed_ms: f64,
    pub instance_digest: String,
}

impl ReportFile {
    pub fn emit(&self) -> String {
        let mut text = serde_json::to_string_pretty(self).expect("plain data serializes");
        text.push('\n');
        text
    }
}
