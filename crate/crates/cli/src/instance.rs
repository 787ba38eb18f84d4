//! Instance documents: JSON with a `kind` tag and one canonical field order.

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use tvd_core::{DiscreteDist, Kernel, MarkovPair, ProductPair};

use crate::error::{CliError, CliResult};

/// Largest deviation of a row sum from one that parsing accepts.
pub const ROW_SUM_TOL: f64 = 1e-6;

/// Rows closer to one than this are left untouched, so that parsing an
/// emitted file does not rescale it again.
const RENORMALIZE_SLACK: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum InstanceFile {
    Product {
        n: usize,
        q: usize,
        p: Vec<Vec<f64>>,
        q_dist: Vec<Vec<f64>>,
    },
    Markov {
        n: usize,
        q: usize,
        p_init: Vec<f64>,
        q_init: Vec<f64>,
        p_kernels: Vec<Vec<Vec<f64>>>,
        q_kernels: Vec<Vec<Vec<f64>>>,
    },
}

/// A parsed instance, ready for the estimators.
#[derive(Debug, Clone)]
pub enum Instance {
    Product(ProductPair),
    Markov(MarkovPair),
}

impl Instance {
    pub fn kind(&self) -> &'static str {
        match self {
            Self::Product(_) => "product",
            Self::Markov(_) => "markov",
        }
    }
}

fn check_count(what: &str, expected: usize, actual: usize) -> CliResult<()> {
    if expected == actual {
        Ok(())
    } else {
        Err(CliError::Parse(format!(
            "{what} has {actual} entries, expected {expected}"
        )))
    }
}

/// Validates one row and rescales it to sum to one.
fn normalize_row(what: &str, row: &[f64], q: usize) -> CliResult<Vec<f64>> {
    check_count(what, q, row.len())?;
    if let Some(x) = row.iter().find(|x| !(x.is_finite() && **x >= 0.0)) {
        return Err(CliError::Parse(format!(
            "{what} has entry {x}, which is not a finite nonnegative number"
        )));
    }
    let sum: f64 = row.iter().sum();
    if (sum - 1.0).abs() > ROW_SUM_TOL {
        return Err(CliError::Parse(format!(
            "{what} sums to {sum}, off by more than {ROW_SUM_TOL}"
        )));
    }
    if (sum - 1.0).abs() <= RENORMALIZE_SLACK {
        Ok(row.to_vec())
    } else {
        Ok(row.iter().map(|x| x / sum).collect())
    }
}

fn normalize_rows(
    what: &str,
    rows: &[Vec<f64>],
    count: usize,
    q: usize,
) -> CliResult<Vec<Vec<f64>>> {
    check_count(what, count, rows.len())?;
    rows.iter()
        .enumerate()
        .map(|(i, row)| normalize_row(&format!("{what}[{i}]"), row, q))
        .collect()
}

fn normalize_kernels(
    what: &str,
    kernels: &[Vec<Vec<f64>>],
    count: usize,
    q: usize,
) -> CliResult<Vec<Vec<Vec<f64>>>> {
    check_count(what, count, kernels.len())?;
    kernels
        .iter()
        .enumerate()
        .map(|(j, k)| normalize_rows(&format!("{what}[{j}]"), k, q, q))
        .collect()
}

fn dist(row: &[f64]) -> CliResult<DiscreteDist> {
    DiscreteDist::new(row.to_vec()).map_err(|e| CliError::Parse(e.to_string()))
}

fn dists(rows: &[Vec<f64>]) -> CliResult<Vec<DiscreteDist>> {
    rows.iter().map(|r| dist(r)).collect()
}

fn kernel(rows: &[Vec<f64>]) -> CliResult<Kernel> {
    Kernel::new(dists(rows)?).map_err(|e| CliError::Parse(e.to_string()))
}

impl InstanceFile {
    /// Reads a document, checks its shape and renormalizes every row.
    pub fn parse(text: &str) -> CliResult<Self> {
        let raw: InstanceFile =
            serde_json::from_str(text).map_err(|e| CliError::Parse(e.to_string()))?;
        raw.normalized()
    }

    fn normalized(&self) -> CliResult<Self> {
        match self {
            Self::Product { n, q, p, q_dist } => {
                if *n == 0 || *q == 0 {
                    return Err(CliError::Parse("n and q must be at least 1".into()));
                }
                Ok(Self::Product {
                    n: *n,
                    q: *q,
                    p: normalize_rows("p", p, *n, *q)?,
                    q_dist: normalize_rows("q_dist", q_dist, *n, *q)?,
                })
            }
            Self::Markov {
                n,
                q,
                p_init,
                q_init,
                p_kernels,
                q_kernels,
            } => {
                if *n == 0 || *q == 0 {
                    return Err(CliError::Parse("n and q must be at least 1".into()));
                }
                Ok(Self::Markov {
                    n: *n,
                    q: *q,
                    p_init: normalize_row("p_init", p_init, *q)?,
                    q_init: normalize_row("q_init", q_init, *q)?,
                    p_kernels: normalize_kernels("p_kernels", p_kernels, n - 1, *q)?,
                    q_kernels: normalize_kernels("q_kernels", q_kernels, n - 1, *q)?,
                })
            }
        }
    }

    /// The canonical text of the document.
    pub fn emit(&self) -> String {
        let mut text = serde_json::to_string_pretty(self).expect("plain data serializes");
        text.push('\n');
        text
    }

    /// SHA-256 of the canonical text.
    pub fn digest(&self) -> String {
        format!(
            "sha256:{}",
            hex::encode(Sha256::digest(self.emit().as_bytes()))
        )
    }

    pub fn to_instance(&self) -> CliResult<Instance> {
        match self {
            Self::Product { p, q_dist, .. } => Ok(Instance::Product(
                ProductPair::new(dists(p)?, dists(q_dist)?)
                    .map_err(|e| CliError::Parse(e.to_string()))?,
            )),
            Self::Markov {
                p_init,
                q_init,
                p_kernels,
                q_kernels,
                ..
            } => Ok(Instance::Markov(
                MarkovPair::new(
                    dist(p_init)?,
                    dist(q_init)?,
                    p_kernels
                        .iter()
                        .map(|k| kernel(k))
                        .collect::<CliResult<_>>()?,
                    q_kernels
                        .iter()
                        .map(|k| kernel(k))
                        .collect::<CliResult<_>>()?,
                )
                .map_err(|e| CliError::Parse(e.to_string()))?,
            )),
        }
    }

    pub fn from_instance(instance: &Instance) -> Self {
        let rows = |ds: &[DiscreteDist]| -> Vec<Vec<f64>> {
            ds.iter().map(|d| d.masses().to_vec()).collect()
        };
        match instance {
            Instance::Product(pair) => Self::Product {
                n: pair.n(),
                q: pair.q(),
                p: rows(pair.p_marginals()),
                q_dist: rows(pair.q_marginals()),
            },
            Instance::Markov(pair) => Self::Markov {
                n: pair.n(),
                q: pair.q(),
                p_init: pair.p_init().masses().to_vec(),
                q_init: pair.q_init().masses().to_vec(),
                p_kernels: pair.p_kernels().iter().map(|k| rows(k.rows())).collect(),
                q_kernels: pair.q_kernels().iter().map(|k| rows(k.rows())).collect(),
            },
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const WORKED: &str = r#"{
        "kind": "product", "n": 2, "q": 2,
        "p": [[0.75, 0.25], [0.75, 0.25]],
        "q_dist": [[0.25, 0.75], [0.25, 0.75]]
    }"#;

    #[test]
    fn parses_product() {
        let f = InstanceFile::parse(WORKED).unwrap();
        let Instance::Product(pair) = f.to_instance().unwrap() else {
            panic!("wrong kind");
        };
        assert_eq!(pair.n(), 2);
        assert_eq!(pair.q_marginals()[1].masses(), &[0.25, 0.75]);
    }

    #[test]
    fn emit_parse_round_trip() {
        let f = InstanceFile::parse(WORKED).unwrap();
        let again = InstanceFile::parse(&f.emit()).unwrap();
        assert_eq!(again, f);
        assert_eq!(again.emit(), f.emit());
        assert_eq!(again.digest(), f.digest());
    }

    #[test]
    fn renormalizes_within_tolerance() {
        let text = r#"{"kind":"product","n":1,"q":2,"p":[[0.5000004,0.5]],"q_dist":[[0.5,0.5]]}"#;
        let f = InstanceFile::parse(text).unwrap();
        let InstanceFile::Product { p, .. } = &f else {
            panic!("wrong kind");
        };
        assert!((p[0].iter().sum::<f64>() - 1.0).abs() < 1e-15);
        assert_eq!(InstanceFile::parse(&f.emit()).unwrap(), f);
    }

    #[test]
    fn rejects_bad_rows() {
        for text in [
            r#"{"kind":"product","n":1,"q":2,"p":[[0.6,0.5]],"q_dist":[[0.5,0.5]]}"#,
            r#"{"kind":"product","n":1,"q":2,"p":[[1.5,-0.5]],"q_dist":[[0.5,0.5]]}"#,
            r#"{"kind":"product","n":2,"q":2,"p":[[0.5,0.5]],"q_dist":[[0.5,0.5]]}"#,
            r#"{"kind":"product","n":1,"q":3,"p":[[0.5,0.5]],"q_dist":[[0.5,0.5]]}"#,
            r#"{"kind":"markov","n":2,"q":2,"p_init":[1,0],"q_init":[1,0],"p_kernels":[],"q_kernels":[]}"#,
            r#"{"kind":"triangle","n":1,"q":1}"#,
            "not json",
        ] {
            assert!(
                matches!(InstanceFile::parse(text), Err(CliError::Parse(_))),
                "{text}"
            );
        }
    }

    #[test]
    fn markov_round_trip_through_core() {
        let pair = tvd_core::generate::random_markov_pair(3, 2, 5, 1.0).unwrap();
        let f = InstanceFile::from_instance(&Instance::Markov(pair.clone()));
        let Instance::Markov(back) = f.to_instance().unwrap() else {
            panic!("wrong kind");
        };
        assert_eq!(back, pair);
        assert_eq!(InstanceFile::parse(&f.emit()).unwrap(), f);
    }
}
