use std::fmt::Write as _;
use std::fs;
use std::path::PathBuf;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};

use ndoppe::model::{ModelSpec, Theta};
use ndoppe::report::{fit, parse_dataset, pmf_table, FitReport};
use ndoppe::risk::{exact_mse_pair, mc_mse_study, EstimatorKind, MseStudyConfig};
use ndoppe::sampler::{sample, SeededStream};

#[derive(Parser)]
#[command(
    name = "ndoppe",
    version,
    about = "Fitting, sampling and estimator-risk studies for the NDOPPE family \
             of discrete distributions (negative binomial mixtures)"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

/// Model selection flags shared by every subcommand. The default is the
/// natural discrete Lindley model (r = 2, coefficients 1,1).
#[derive(Args)]
struct ModelArgs {
    /// Family order r (defaults to the coefficient count, or 2)
    #[arg(long = "r", value_name = "R")]
    order: Option<usize>,

    /// Comma-separated mixing coefficients a0,a1,...
    #[arg(long, value_name = "A0,A1,...", value_delimiter = ',')]
    coeffs: Option<Vec<f64>>,
}

impl ModelArgs {
    fn build(&self) -> Result<ModelSpec> {
        let coeffs = match (&self.coeffs, self.order) {
            (Some(coeffs), order) => {
                if let Some(r) = order {
                    if r != coeffs.len() {
                        bail!(
                            "--r {r} disagrees with the {} supplied coefficients",
                            coeffs.len()
                        );
                    }
                }
                coeffs.clone()
            }
            (None, Some(r)) => {
                if r == 0 {
                    bail!("--r must be at least 1");
                }
                vec![1.0; r]
            }
            (None, None) => vec![1.0, 1.0],
        };
        ModelSpec::new(coeffs).context("invalid model coefficients")
    }
}

#[derive(Clone, Copy, Default, PartialEq, Eq, ValueEnum)]
enum OutputFormat {
    #[default]
    Json,
    Csv,
}

#[derive(Subcommand)]
enum Command {
    /// Fit a model to a dataset: MLE of theta, per-point MLE and unbiased
    /// PMF/CDF estimates, and both negative log-likelihoods
    Fit {
        /// Dataset file of whitespace-separated nonnegative integers
        data: PathBuf,
        #[command(flatten)]
        model: ModelArgs,
        /// Largest x in the report table (defaults to the sample maximum)
        #[arg(long = "x-max", value_name = "X")]
        x_max: Option<u64>,
        #[arg(long, value_enum, default_value_t)]
        format: OutputFormat,
        /// Write the report here instead of stdout
        #[arg(long, value_name = "PATH")]
        out: Option<PathBuf>,
    },
    /// Draw a seeded random sample, one value per line
    Simulate {
        /// Number of draws
        #[arg(long)]
        n: usize,
        #[arg(long)]
        theta: f64,
        #[command(flatten)]
        model: ModelArgs,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, value_name = "PATH")]
        out: Option<PathBuf>,
    },
    /// Monte Carlo MSE study of the MLE plug-in vs the unbiased estimator,
    /// emitted as CSV curves over the sample sizes
    MseStudy {
        #[arg(long)]
        theta: f64,
        /// Evaluation point for the PMF/CDF estimators
        #[arg(long)]
        x: u64,
        /// Replications per sample size
        #[arg(long, default_value_t = 1000)]
        reps: usize,
        /// Comma-separated, strictly increasing sample sizes
        #[arg(long, value_delimiter = ',', default_value = "25,50,100,200,400")]
        sizes: Vec<usize>,
        #[command(flatten)]
        model: ModelArgs,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Add the exact-series MSE column for the unbiased estimator
        #[arg(long)]
        include_exact: bool,
        #[arg(long, value_name = "PATH")]
        out: Option<PathBuf>,
    },
    /// Exact PMF/CDF table for one parameter value, as CSV
    PmfTable {
        #[arg(long)]
        theta: f64,
        #[arg(long = "x-max", value_name = "X")]
        x_max: u64,
        #[command(flatten)]
        model: ModelArgs,
        #[arg(long, value_name = "PATH")]
        out: Option<PathBuf>,
    },
}

fn main() -> Result<()> {
    match Cli::parse().command {
        Command::Fit {
            data,
            model,
            x_max,
            format,
            out,
        } => {
            let model = model.build()?;
            let text = fs::read_to_string(&data)
                .with_context(|| format!("cannot read dataset {}", data.display()))?;
            let sample = parse_dataset(&text)?;
            let report = fit(&sample, &model, x_max)?;
            let rendered = match format {
                OutputFormat::Json => {
                    let mut json = serde_json::to_string_pretty(&report)?;
                    json.push('\n');
                    json
                }
                OutputFormat::Csv => fit_csv(&report),
            };
            emit(out, &rendered)
        }
        Command::Simulate {
            n,
            theta,
            model,
            seed,
            out,
        } => {
            if n == 0 {
                bail!("--n must be at least 1");
            }
            let model = model.build()?;
            let theta = Theta::new(theta)?;
            let mut stream = SeededStream::new(seed, 0);
            let drawn = sample(n, theta, &model, &mut stream);
            let mut text = String::new();
            for v in drawn.values() {
                writeln!(text, "{v}").unwrap();
            }
            emit(out, &text)
        }
        Command::MseStudy {
            theta,
            x,
            reps,
            sizes,
            model,
            seed,
            include_exact,
            out,
        } => {
            let model = model.build()?;
            let theta = Theta::new(theta)?;
            if reps == 1 {
                eprintln!("warning: a single replication gives no variability; std_error is 0");
            }
            let config = MseStudyConfig {
                model: model.clone(),
                theta,
                x,
                sample_sizes: sizes,
                replications: reps,
                master_seed: seed,
            };
            let study = mc_mse_study(&config)?;
            for &(n, count) in &study.redraws {
                if count > 0 {
                    eprintln!("warning: {count} degenerate all-zero samples redrawn at n = {n}");
                }
            }
            let mut exact = Vec::new();
            if include_exact {
                for &n in &config.sample_sizes {
                    exact.push(exact_mse_pair(x, n, theta, &model)?);
                }
            }
            let mut csv = String::from("estimator,target,n,mse,std_error");
            if include_exact {
                csv.push_str(",exact_mse");
            }
            csv.push('\n');
            for curve in &study.curves {
                for (i, point) in curve.points.iter().enumerate() {
                    write!(
                        csv,
                        "{},{},{},{},{}",
                        curve.estimator.label(),
                        curve.target.label(),
                        point.n,
                        point.mse,
                        point.std_error
                    )
                    .unwrap();
                    if include_exact {
                        csv.push(',');
                        if curve.estimator == EstimatorKind::Umvue {
                            let (pmf_mse, cdf_mse) = exact[i];
                            let value = match curve.target {
                                ndoppe::risk::TargetKind::Pmf => pmf_mse,
                                ndoppe::risk::TargetKind::Cdf => cdf_mse,
                            };
                            write!(csv, "{value}").unwrap();
                        }
                    }
                    csv.push('\n');
                }
            }
            emit(out, &csv)
        }
        Command::PmfTable {
            theta,
            x_max,
            model,
            out,
        } => {
            let model = model.build()?;
            let theta = Theta::new(theta)?;
            let mut csv = String::from("x,pmf,cdf\n");
            for row in pmf_table(theta, &model, x_max) {
                writeln!(csv, "{},{},{}", row.x, row.pmf, row.cdf).unwrap();
            }
            emit(out, &csv)
        }
    }
}

fn fit_csv(report: &FitReport) -> String {
    let mut csv =
        String::from("x,observed_freq,mle_pmf,umvue_pmf,mle_cdf,umvue_cdf,umvue_cdf_variant\n");
    for row in &report.table {
        write!(
            csv,
            "{},{},{},{},{},{},",
            row.x, row.observed_freq, row.mle_pmf, row.umvue_pmf, row.mle_cdf, row.umvue_cdf
        )
        .unwrap();
        if let Some(variant) = row.umvue_cdf_variant {
            write!(csv, "{variant}").unwrap();
        }
        csv.push('\n');
    }
    csv
}

fn emit(out: Option<PathBuf>, content: &str) -> Result<()> {
    match out {
        Some(path) => fs::write(&path, content)
            .with_context(|| format!("cannot write {}", path.display())),
        None => {
            print!("{content}");
            Ok(())
        }
    }
}
