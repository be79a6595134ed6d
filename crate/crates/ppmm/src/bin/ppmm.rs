//! Command-line front end. All computation lives in the library; this binary
//! parses arguments, dispatches, and maps errors to exit codes:
//! 0 success, 1 input error, 2 numerical invalidity, 3 validation failure.

use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use ppmm::analysis::{
    analyze, validate, write_run_dir, AnalyzeOptions, OutcomeSpec, ValidateOptions,
};
use ppmm::mechanisms::{builtin_mechanism, builtin_mechanisms, load_mechanisms, Mechanism};
use ppmm::selection::{conditional_params, gamma_coefficients, tau_coefficients};
use ppmm::sweep::{default_phi_levels, default_y_grid};
use ppmm::{
    identify, lambda_coefficients, phi_validity_bound, simulate, sweep_mean, sweep_or, sweep_prob,
    CurveSeries, Error, ObservedSummary, Phi, PhiGrid, VarianceMode, XFix, YLevels,
};

#[derive(Parser)]
#[command(
    name = "ppmm",
    version,
    about = "Proxy pattern-mixture sensitivity analysis for nonignorable nonresponse"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, Debug, Default, ValueEnum)]
enum Format {
    #[default]
    Json,
    Csv,
}

#[derive(Args)]
struct SummaryInput {
    /// Built-in mechanism id (1-18)
    #[arg(long, conflicts_with_all = ["mechanism_file", "summary_file"])]
    mechanism: Option<String>,
    /// JSON file holding a mechanism object or array (first entry is used)
    #[arg(long, conflicts_with = "summary_file")]
    mechanism_file: Option<PathBuf>,
    /// JSON file holding an observed summary
    #[arg(long)]
    summary_file: Option<PathBuf>,
}

impl SummaryInput {
    fn resolve(&self) -> Result<(ObservedSummary, Option<String>), Error> {
        if let Some(id) = &self.mechanism {
            let m = builtin_mechanism(id)?;
            return Ok((m.observed_summary(), Some(m.id)));
        }
        if let Some(path) = &self.mechanism_file {
            let ms = load_mechanisms(path)?;
            let m = ms.into_iter().next().ok_or_else(|| Error::UnknownMechanism {
                id: path.display().to_string(),
            })?;
            return Ok((m.observed_summary(), Some(m.id)));
        }
        if let Some(path) = &self.summary_file {
            let text = std::fs::read_to_string(path)?;
            let s: ObservedSummary = serde_json::from_str(&text)?;
            return Ok((s.validated()?, None));
        }
        Err(Error::UnknownMechanism {
            id: "(none given: use --mechanism, --mechanism-file, or --summary-file)".to_string(),
        })
    }
}

#[derive(Subcommand)]
enum Command {
    /// Built-in mechanism utilities
    Mechanisms {
        #[command(subcommand)]
        action: MechanismsAction,
    },
    /// Nonrespondent moments identified at a single phi
    Identify {
        #[command(flatten)]
        input: SummaryInput,
        #[arg(long)]
        phi: f64,
        #[arg(long, value_enum, default_value_t = Format::Json)]
        format: Format,
    },
    /// Selection-model coefficients at a single phi
    Coeffs {
        #[command(flatten)]
        input: SummaryInput,
        #[arg(long)]
        phi: f64,
        #[arg(long, value_enum, default_value_t = Format::Json)]
        format: Format,
    },
    /// Odds-ratio-versus-phi series at fixed proxy value
    SweepOr {
        #[command(flatten)]
        input: SummaryInput,
        #[arg(long, default_value = "0:1:0.01")]
        phi_grid: String,
        /// Comma-separated outcome levels (default: mean -/+ one SD)
        #[arg(long)]
        y_levels: Option<String>,
        /// Fix the proxy at this value (default: overall proxy mean)
        #[arg(long)]
        x_fix: Option<f64>,
        /// Outcome increase the odds ratio refers to
        #[arg(long, default_value_t = 1.0)]
        delta: f64,
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long, value_enum, default_value_t = Format::Json)]
        format: Format,
    },
    /// Nonresponse-probability-versus-outcome series per phi level
    SweepProb {
        #[command(flatten)]
        input: SummaryInput,
        /// Comma-separated phi levels (default: 0,0.25,0.5,0.75,1)
        #[arg(long)]
        phi_levels: Option<String>,
        /// Outcome grid as lo:hi:step (default: mean -/+ 3 SD in 121 steps)
        #[arg(long)]
        y_grid: Option<String>,
        #[arg(long)]
        x_fix: Option<f64>,
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long, value_enum, default_value_t = Format::Json)]
        format: Format,
    },
    /// Marginal-mean-versus-phi series
    SweepMean {
        #[command(flatten)]
        input: SummaryInput,
        #[arg(long, default_value = "0:1:0.01")]
        phi_grid: String,
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long, value_enum, default_value_t = Format::Json)]
        format: Format,
    },
    /// Full pipeline on a CSV file
    Analyze {
        /// Input CSV (header row required; empty or NA outcome cells are missing)
        #[arg(long)]
        input: PathBuf,
        /// Outcome column name
        #[arg(long, conflicts_with = "outcome_sum")]
        outcome: Option<String>,
        /// Comma-separated columns summed into the outcome
        /// (missing if any item is missing)
        #[arg(long)]
        outcome_sum: Option<String>,
        /// Comma-separated columns to leave out of the proxy regression
        #[arg(long)]
        exclude: Option<String>,
        /// Comma-separated columns to force into categorical encoding
        #[arg(long)]
        categorical: Option<String>,
        /// Use the maximum-likelihood variance denominator n instead of n - 1
        #[arg(long)]
        mle_variance: bool,
        #[arg(long, default_value = "0:1:0.01")]
        phi_grid: String,
        #[arg(long)]
        x_fix: Option<f64>,
        #[arg(long, default_value_t = 1.0)]
        delta: f64,
        #[arg(long)]
        out: PathBuf,
    },
    /// Draw a dataset from a mechanism at a phi
    Simulate {
        #[command(flatten)]
        input: SummaryInput,
        #[arg(long)]
        phi: f64,
        #[arg(long)]
        n: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Leave the outcome cell empty for nonrespondents
        #[arg(long)]
        mask_missing: bool,
        /// Output file (stdout when omitted)
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Oracle-equivalence and Monte-Carlo validation
    Validate {
        /// Comma-separated built-in mechanism ids (default: all 18)
        #[arg(long)]
        mechanism: Option<String>,
        /// JSON file with extra mechanisms to validate
        #[arg(long)]
        mechanism_file: Option<PathBuf>,
        #[arg(long, default_value = "0:1:0.01")]
        phi_grid: String,
        /// Comma-separated phi values for Monte-Carlo recovery
        #[arg(long, default_value = "0,0.5")]
        mc_phis: String,
        /// Units per Monte-Carlo replication (0 disables)
        #[arg(long, default_value_t = 200_000)]
        mc_n: usize,
        /// Base seed; replications use seed, seed+1, ...
        #[arg(long, default_value_t = 1)]
        seed: u64,
        /// Number of seeded replications per configuration
        #[arg(long, default_value_t = 1)]
        replications: usize,
        /// Points per axis of the oracle evaluation grid
        #[arg(long, default_value_t = 31)]
        grid_points: usize,
        /// Half-width of the oracle grid in respondent SDs
        #[arg(long, default_value_t = 4.0)]
        grid_span: f64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Subcommand)]
enum MechanismsAction {
    /// Write the 18 built-in mechanisms as JSON
    Export {
        /// Output file (stdout when omitted)
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Serialize)]
struct CoeffsOutput {
    phi: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    mechanism_id: Option<String>,
    /// logit P(R = 0 | x, y)
    lambda: ppmm::SelectionCoefficients,
    /// logit P(R = 1 | x, y), the same model with signs flipped
    lambda_response: ppmm::SelectionCoefficients,
    conditional_respondent: ppmm::ConditionalParams,
    conditional_nonrespondent: ppmm::ConditionalParams,
    tau: ppmm::MarginalSelectionCoefficients,
    gamma: ppmm::NoCovariateCoefficients,
}

#[derive(Serialize)]
struct SweepSummary<'a> {
    #[serde(skip_serializing_if = "Option::is_none")]
    mechanism_id: Option<&'a str>,
    observed: &'a ObservedSummary,
    phi_bound: ppmm::PhiRange,
    series: &'a [CurveSeries],
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            if e.is_numerical() {
                ExitCode::from(2)
            } else {
                ExitCode::from(1)
            }
        }
    }
}

fn run(cli: Cli) -> Result<ExitCode, Error> {
    match cli.command {
        Command::Mechanisms { action } => match action {
            MechanismsAction::Export { out } => {
                let json = serde_json::to_string_pretty(&builtin_mechanisms())?;
                write_text(out.as_deref(), &(json + "\n"))?;
                Ok(ExitCode::SUCCESS)
            }
        },
        Command::Identify { input, phi, format } => {
            let (obs, _) = input.resolve()?;
            let model = identify(&obs, Phi::new(phi)?)?;
            match format {
                Format::Json => println!("{}", serde_json::to_string_pretty(&model)?),
                Format::Csv => {
                    let m = model.nonrespondent;
                    println!("field,value");
                    println!("phi,{}", model.phi.value());
                    println!("pi,{}", model.pi);
                    for (k, v) in [
                        ("nonresp_mu_x", m.mu_x),
                        ("nonresp_mu_y", m.mu_y),
                        ("nonresp_var_x", m.var_x),
                        ("nonresp_var_y", m.var_y),
                        ("nonresp_cov_xy", m.cov_xy),
                        ("marginal_mean", ppmm::marginal_mean(&model)),
                    ] {
                        println!("{k},{v}");
                    }
                }
            }
            Ok(ExitCode::SUCCESS)
        }
        Command::Coeffs { input, phi, format } => {
            let (obs, id) = input.resolve()?;
            let model = identify(&obs, Phi::new(phi)?)?;
            let lambda = lambda_coefficients(&model)?;
            let out = CoeffsOutput {
                phi,
                mechanism_id: id,
                lambda,
                lambda_response: lambda.response_orientation(),
                conditional_respondent: conditional_params(&model.respondent)?,
                conditional_nonrespondent: conditional_params(&model.nonrespondent)?,
                tau: tau_coefficients(
                    model.pi,
                    (model.respondent.mu_x, model.respondent.var_x),
                    (model.nonrespondent.mu_x, model.nonrespondent.var_x),
                ),
                gamma: gamma_coefficients(
                    model.pi,
                    (model.respondent.mu_y, model.respondent.var_y),
                    (model.nonrespondent.mu_y, model.nonrespondent.var_y),
                ),
            };
            match format {
                Format::Json => println!("{}", serde_json::to_string_pretty(&out)?),
                Format::Csv => {
                    println!("term,value");
                    let names = ppmm::SelectionCoefficients::term_names();
                    for (name, v) in names.iter().zip(out.lambda.as_array()) {
                        println!("{name},{v}");
                    }
                }
            }
            Ok(ExitCode::SUCCESS)
        }
        Command::SweepOr {
            input,
            phi_grid,
            y_levels,
            x_fix,
            delta,
            out,
            format,
        } => {
            let (obs, id) = input.resolve()?;
            let grid = PhiGrid::parse(&phi_grid)?;
            let levels = match y_levels {
                Some(s) => YLevels::Explicit(parse_floats(&s)?),
                None => YLevels::MeanPlusMinusSd,
            };
            let series = sweep_or(
                &obs,
                id.as_deref(),
                &grid,
                &levels,
                x_fix.map_or(XFix::OverallMean, XFix::Explicit),
                delta,
            )?;
            emit_sweep(&obs, id.as_deref(), series, out, format)
        }
        Command::SweepProb {
            input,
            phi_levels,
            y_grid,
            x_fix,
            out,
            format,
        } => {
            let (obs, id) = input.resolve()?;
            let phis = match phi_levels {
                Some(s) => parse_floats(&s)?
                    .into_iter()
                    .map(Phi::new)
                    .collect::<Result<Vec<_>, _>>()?,
                None => default_phi_levels(),
            };
            let ys = match y_grid {
                Some(s) => parse_grid(&s)?,
                None => default_y_grid(&obs),
            };
            let series = sweep_prob(
                &obs,
                id.as_deref(),
                &phis,
                &ys,
                x_fix.map_or(XFix::OverallMean, XFix::Explicit),
            )?;
            emit_sweep(&obs, id.as_deref(), series, out, format)
        }
        Command::SweepMean {
            input,
            phi_grid,
            out,
            format,
        } => {
            let (obs, id) = input.resolve()?;
            let grid = PhiGrid::parse(&phi_grid)?;
            let series = vec![sweep_mean(&obs, id.as_deref(), &grid)?];
            emit_sweep(&obs, id.as_deref(), series, out, format)
        }
        Command::Analyze {
            input,
            outcome,
            outcome_sum,
            exclude,
            categorical,
            mle_variance,
            phi_grid,
            x_fix,
            delta,
            out,
        } => {
            let spec = match (outcome, outcome_sum) {
                (Some(c), None) => OutcomeSpec::Column(c),
                (None, Some(s)) => OutcomeSpec::Sum(parse_names(&s)),
                _ => {
                    return Err(Error::UnknownColumn {
                        name: "(give exactly one of --outcome or --outcome-sum)".to_string(),
                    })
                }
            };
            let mut opts = AnalyzeOptions::new(spec);
            opts.exclude = exclude.map(|s| parse_names(&s)).unwrap_or_default();
            opts.categorical = categorical.map(|s| parse_names(&s)).unwrap_or_default();
            if mle_variance {
                opts.variance_mode = VarianceMode::Mle;
            }
            opts.phi_grid = PhiGrid::parse(&phi_grid)?;
            if let Some(x) = x_fix {
                opts.x_fix = XFix::Explicit(x);
            }
            opts.delta = delta;
            let report = analyze(&input, &opts)?;
            write_run_dir(&out, &report, &report.series, None)?;
            println!("wrote {}", out.display());
            Ok(ExitCode::SUCCESS)
        }
        Command::Simulate {
            input,
            phi,
            n,
            seed,
            mask_missing,
            out,
        } => {
            let (obs, id) = input.resolve()?;
            let model = identify(&obs, Phi::new(phi)?)?;
            let sim = simulate(&model, n, seed, id.as_deref().unwrap_or("summary"));
            let mut buf = Vec::new();
            sim.write_csv(&mut buf, mask_missing)?;
            write_text(out.as_deref(), std::str::from_utf8(&buf).expect("csv is utf-8"))?;
            Ok(ExitCode::SUCCESS)
        }
        Command::Validate {
            mechanism,
            mechanism_file,
            phi_grid,
            mc_phis,
            mc_n,
            seed,
            replications,
            grid_points,
            grid_span,
            out,
        } => {
            let mut mechs: Vec<Mechanism> = match mechanism {
                Some(ids) => parse_names(&ids)
                    .iter()
                    .map(|id| builtin_mechanism(id))
                    .collect::<Result<_, _>>()?,
                None => builtin_mechanisms(),
            };
            if let Some(path) = mechanism_file {
                mechs.extend(load_mechanisms(&path)?);
            }
            let opts = ValidateOptions {
                phi_grid: PhiGrid::parse(&phi_grid)?,
                grid_points,
                grid_span_sd: grid_span,
                mc_phis: parse_floats(&mc_phis)?
                    .into_iter()
                    .map(Phi::new)
                    .collect::<Result<Vec<_>, _>>()?,
                mc_n,
                mc_seeds: (0..replications.max(1)).map(|k| seed + k as u64).collect(),
            };
            let report = validate(&mechs, &opts);
            match &out {
                Some(dir) => {
                    write_run_dir(dir, &report, &[], Some(&report))?;
                    println!("wrote {}", dir.display());
                }
                None => println!("{}", serde_json::to_string_pretty(&report)?),
            }
            println!(
                "oracle max |diff| = {:.3e} (threshold {:.0e}); mc runs: {} ({})",
                report.oracle.max_abs_diff,
                report.oracle.threshold,
                report.mc.len(),
                if report.mc_passed { "ok" } else { "failed" }
            );
            if report.passed {
                Ok(ExitCode::SUCCESS)
            } else {
                eprintln!("validation failed");
                Ok(ExitCode::from(3))
            }
        }
    }
}

fn emit_sweep(
    obs: &ObservedSummary,
    mechanism_id: Option<&str>,
    series: Vec<CurveSeries>,
    out: Option<PathBuf>,
    format: Format,
) -> Result<ExitCode, Error> {
    let phi_bound = phi_validity_bound(obs, 0.01)?;
    let summary = SweepSummary {
        mechanism_id,
        observed: obs,
        phi_bound,
        series: &series,
    };
    // identification failing at every requested phi > 0 is a numerically
    // invalid request: emit the (all-gap) output, then exit 2
    let any_positive_phi_valid = series.iter().any(|s| {
        if s.abscissa_name == "phi" {
            s.valid_points().any(|(phi, _)| phi > 0.0)
        } else {
            s.metadata.phi.is_none_or(|phi| phi > 0.0) && s.valid_points().next().is_some()
        }
    });
    match out {
        Some(dir) => {
            write_run_dir(&dir, &summary, &series, None)?;
            println!("wrote {}", dir.display());
        }
        None => match format {
            Format::Json => println!("{}", serde_json::to_string_pretty(&summary)?),
            Format::Csv => {
                let mut stdout = std::io::stdout().lock();
                for s in &series {
                    writeln!(stdout, "# {}", s.name)?;
                    let mut buf = Vec::new();
                    s.write_csv(&mut buf)?;
                    stdout.write_all(&buf)?;
                }
            }
        },
    }
    if any_positive_phi_valid {
        Ok(ExitCode::SUCCESS)
    } else {
        eprintln!("error: identification failed at every requested phi > 0");
        Ok(ExitCode::from(2))
    }
}

fn write_text(path: Option<&std::path::Path>, text: &str) -> Result<(), Error> {
    match path {
        Some(p) => std::fs::write(p, text)?,
        None => print!("{text}"),
    }
    Ok(())
}

fn parse_names(s: &str) -> Vec<String> {
    s.split(',')
        .map(|p| p.trim().to_string())
        .filter(|p| !p.is_empty())
        .collect()
}

fn parse_floats(s: &str) -> Result<Vec<f64>, Error> {
    s.split(',')
        .map(|p| {
            p.trim().parse::<f64>().map_err(|_| Error::InvalidPhiGrid {
                spec: s.to_string(),
            })
        })
        .collect()
}

/// Parse `lo:hi:step` into an inclusive grid of arbitrary floats.
fn parse_grid(s: &str) -> Result<Vec<f64>, Error> {
    let bad = || Error::InvalidPhiGrid {
        spec: s.to_string(),
    };
    let parts: Vec<f64> = s
        .split(':')
        .map(|p| p.trim().parse::<f64>().map_err(|_| bad()))
        .collect::<Result<_, _>>()?;
    if parts.len() != 3 || parts[1] <= parts[0] || parts[2] <= 0.0 || parts.iter().any(|p| p.is_nan()) {
        return Err(bad());
    }
    let (lo, hi, step) = (parts[0], parts[1], parts[2]);
    let count = ((hi - lo) / step).round() as usize;
    Ok((0..=count)
        .map(|i| if i == count { hi } else { lo + i as f64 * step })
        .collect())
}
