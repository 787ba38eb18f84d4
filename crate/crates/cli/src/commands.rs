use std::fmt::Write as _;
use std::fs;
use std::path::Path;
use std::time::Instant;

use tvd_core::generate::{random_markov_pair, random_product_pair};
use tvd_core::oracle::{
    brute_force_tv_markov, brute_force_tv_product, exact_ratio_markov, exact_ratio_product,
    markov_joint, product_joint,
};
use tvd_core::{
    estimate_markov_ratio, estimate_product_ratio, markov_lower_bound, np_boundary,
    product_lower_bound, ratio_of, EstimateReport, RatioDist,
};

use crate::error::{CliError, CliResult};
use crate::instance::{Instance, InstanceFile};
use crate::report::{Mode, ReportFile};

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum Kind {
    Product,
    Markov,
}

pub const BENCH_HEADER: &str = "kind,n,q,epsilon,estimate,d_lb,max_support,elapsed_ms";

fn read(path: &Path) -> CliResult<String> {
    fs::read_to_string(path).map_err(|e| CliError::io(path, e))
}

fn write(path: &Path, text: &str) -> CliResult<()> {
    fs::write(path, text).map_err(|e| CliError::io(path, e))
}

fn lower_bound(instance: &Instance) -> f64 {
    match instance {
        Instance::Product(pair) => product_lower_bound(pair),
        Instance::Markov(pair) => markov_lower_bound(pair),
    }
}

fn run_fptas(instance: &Instance, eps: f64) -> CliResult<(EstimateReport, RatioDist)> {
    Ok(match instance {
        Instance::Product(pair) => estimate_product_ratio(pair, eps)?,
        Instance::Markov(pair) => estimate_markov_ratio(pair, eps)?,
    })
}

/// Ratio of the explicit joint laws, for regions in oracle mode.
fn joint_ratio(instance: &Instance) -> CliResult<RatioDist> {
    let (p, q) = match instance {
        Instance::Product(pair) => product_joint(pair)?,
        Instance::Markov(pair) => markov_joint(pair)?,
    };
    Ok(ratio_of(&p, &q)?)
}

/// Runs one estimate and optionally writes the region of the final ratio.
pub fn estimate(
    input: &Path,
    epsilon: Option<f64>,
    mode: Mode,
    region: Option<&Path>,
) -> CliResult<ReportFile> {
    let file = InstanceFile::parse(&read(input)?)?;
    let instance = file.to_instance()?;
    let start = Instant::now();
    let d_lb = lower_bound(&instance);

    let (estimate, max_support, ratio, epsilon) = match mode {
        Mode::Fptas => {
            let eps = epsilon
                .ok_or_else(|| CliError::Usage("--epsilon is required in mode fptas".into()))?;
            let (report, ratio) = run_fptas(&instance, eps)?;
            (report.estimate, report.max_support, Some(ratio), Some(eps))
        }
        Mode::Exact => {
            let ratio = match &instance {
                Instance::Product(pair) => exact_ratio_product(pair)?,
                Instance::Markov(pair) => exact_ratio_markov(pair)?,
            };
            (ratio.tv(), ratio.len(), Some(ratio), None)
        }
        Mode::Oracle => {
            let tv = match &instance {
                Instance::Product(pair) => brute_force_tv_product(pair)?,
                Instance::Markov(pair) => brute_force_tv_markov(pair)?,
            };
            (tv, 0, None, None)
        }
    };
    let elapsed_ms = start.elapsed().as_secs_f64() * 1e3;

    if let Some(path) = region {
        let ratio = match ratio {
            Some(r) => r,
            None => joint_ratio(&instance)?,
        };
        write(path, &np_boundary(&ratio).to_csv())?;
    }

    Ok(ReportFile {
        mode,
        estimate,
        epsilon,
        d_lb,
        max_support,
        elapsed_ms,
        instance_digest: file.digest(),
    })
}

fn generate(kind: Kind, n: usize, q: usize, seed: u64, skew: f64) -> CliResult<Instance> {
    Ok(match kind {
        Kind::Product => Instance::Product(random_product_pair(n, q, seed, skew)?),
        Kind::Markov => Instance::Markov(random_markov_pair(n, q, seed, skew)?),
    })
}

pub fn gen(kind: Kind, n: usize, q: usize, seed: u64, skew: f64, out: &Path) -> CliResult<()> {
    let instance = generate(kind, n, q, seed, skew)?;
    write(out, &InstanceFile::from_instance(&instance).emit())
}

/// Runs the estimator over the grid `ns × qs × epsilons`, in that nesting
/// order, and returns the CSV table.
pub fn bench(
    kind: Kind,
    ns: &[usize],
    qs: &[usize],
    epsilons: &[f64],
    seed: u64,
    skew: f64,
) -> CliResult<String> {
    let mut csv = format!("{BENCH_HEADER}\n");
    for &n in ns {
        for &q in qs {
            let instance = generate(kind, n, q, seed, skew)?;
            for &eps in epsilons {
                let (report, _) = run_fptas(&instance, eps)?;
                writeln!(
                    csv,
                    "{},{n},{q},{eps},{},{},{},{:.3}",
                    instance.kind(),
                    report.estimate,
                    report.d_lb,
                    report.max_support,
                    report.elapsed.as_secs_f64() * 1e3
                )
                .expect("writing to a String");
            }
        }
    }
    Ok(csv)
}

pub fn write_output(path: &Path, text: &str) -> CliResult<()> {
    write(path, text)
}
