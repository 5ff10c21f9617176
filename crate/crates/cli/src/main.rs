//! `edgenet` command-line tool.
//!
//! Exit codes: 0 success, 1 usage error, 2 data or I/O error, 3 numeric or
//! convergence failure. Data goes to files or stdout, diagnostics to stderr.

use std::fmt::Write as _;
use std::fs::{self, File};
use std::io::{self, BufReader, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use edgenet::estimation::{
    fit_mle, fit_moment, EstimationError, GammaEstimator, Kmin, MleConfig, MomentConfig,
};
use edgenet::generator::{generate, GeneratorError, Params, ParamsError, RNG_NAME};
use edgenet::graph::{parse_edge_list, write_edge_list, Multigraph, ReadError};
use edgenet::harness::{
    format_real, run_degree_experiment, run_growth_experiment, ExperimentConfig, ExponentFit,
    HarnessError,
};
use edgenet::likelihood::{log_prob_closed, log_prob_sequential};

#[derive(Debug, Parser)]
#[command(name = "edgenet", version, about = "Edge-driven power-law multigraphs")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Sample a graph and write it as a tab-separated edge list.
    Generate {
        #[command(flatten)]
        model: ModelArgs,
        /// Number of edges.
        #[arg(long)]
        edges: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        directed: bool,
        /// Output file; stdout when omitted.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Degree histogram (`degree,count`) or CCDF (`degree,ccdf`) of a graph.
    Degrees {
        #[command(flatten)]
        input: InputArgs,
        #[arg(long)]
        ccdf: bool,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Collapse parallel edges into single edges.
    Project {
        #[command(flatten)]
        input: InputArgs,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Estimate (alpha, theta) and print the fit as JSON.
    Fit {
        #[command(flatten)]
        input: InputArgs,
        #[arg(long, value_enum, default_value_t = Method::Moment)]
        method: Method,
        /// Lower degree cutoff for the exponent estimate, or `auto`.
        #[arg(long, default_value = "auto", value_parser = parse_kmin)]
        kmin: Kmin,
        #[arg(long, value_enum, default_value_t = Estimator::Mle)]
        estimator: Estimator,
        /// The input is a simple projection (maximum likelihood refuses it).
        #[arg(long)]
        simple: bool,
    },
    /// Log-probability of a graph under given parameters.
    Loglik {
        #[command(flatten)]
        input: InputArgs,
        #[command(flatten)]
        model: ModelArgs,
        #[arg(long, value_enum, default_value_t = Form::Closed)]
        form: Form,
    },
    /// Mean vertex count over replicates against its asymptotic value.
    GrowthExperiment {
        #[command(flatten)]
        experiment: ExperimentArgs,
        /// CSV output file.
        #[arg(long)]
        out: PathBuf,
    },
    /// Degree CCDFs of a generated graph and of its simple projection.
    DegreeExperiment {
        #[command(flatten)]
        experiment: ExperimentArgs,
        /// Output directory.
        #[arg(long)]
        out: PathBuf,
        /// Also write a gnuplot script.
        #[arg(long)]
        gnuplot: bool,
    },
}

#[derive(Debug, Args)]
struct ModelArgs {
    #[arg(long, allow_negative_numbers = true)]
    alpha: f64,
    #[arg(long, allow_negative_numbers = true)]
    theta: f64,
}

#[derive(Debug, Args)]
struct InputArgs {
    /// Edge-list file.
    #[arg(long = "in")]
    input: PathBuf,
    #[arg(long)]
    directed: bool,
}

#[derive(Debug, Args)]
struct ExperimentArgs {
    #[command(flatten)]
    model: ModelArgs,
    #[arg(long)]
    edges: usize,
    #[arg(long, default_value_t = 1)]
    replicates: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long)]
    directed: bool,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum Method {
    Moment,
    Mle,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum Estimator {
    Mle,
    Ccdf,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum Form {
    Closed,
    Sequential,
}

fn parse_kmin(s: &str) -> Result<Kmin, String> {
    if s == "auto" {
        return Ok(Kmin::Auto);
    }
    match s.parse::<u64>() {
        Ok(k) if k >= 1 => Ok(Kmin::Fixed(k)),
        _ => Err(format!("expected `auto` or a positive integer, got {s:?}")),
    }
}

enum CliError {
    Usage(String),
    Data(String),
    Numeric(String),
}

impl CliError {
    fn code(&self) -> u8 {
        match self {
            CliError::Usage(_) => 1,
            CliError::Data(_) => 2,
            CliError::Numeric(_) => 3,
        }
    }

    fn message(&self) -> &str {
        match self {
            CliError::Usage(m) | CliError::Data(m) | CliError::Numeric(m) => m,
        }
    }
}

impl From<ParamsError> for CliError {
    fn from(e: ParamsError) -> Self {
        CliError::Usage(e.to_string())
    }
}

impl From<GeneratorError> for CliError {
    fn from(e: GeneratorError) -> Self {
        CliError::Usage(e.to_string())
    }
}

impl From<ReadError> for CliError {
    fn from(e: ReadError) -> Self {
        CliError::Data(e.to_string())
    }
}

impl From<EstimationError> for CliError {
    fn from(e: EstimationError) -> Self {
        match e {
            EstimationError::SimpleGraphInput | EstimationError::Params(_) => {
                CliError::Usage(e.to_string())
            }
            EstimationError::InsufficientData { .. } | EstimationError::VertexCount { .. } => {
                CliError::Data(e.to_string())
            }
            _ => CliError::Numeric(e.to_string()),
        }
    }
}

impl From<HarnessError> for CliError {
    fn from(e: HarnessError) -> Self {
        match e {
            HarnessError::Config | HarnessError::Generator(_) => CliError::Usage(e.to_string()),
            HarnessError::Io { .. } | HarnessError::Csv { .. } => CliError::Data(e.to_string()),
        }
    }
}

fn io_error(path: &Path, e: io::Error) -> CliError {
    CliError::Data(format!("{}: {e}", path.display()))
}

fn read_graph(input: &InputArgs) -> Result<Multigraph, CliError> {
    let file = File::open(&input.input).map_err(|e| io_error(&input.input, e))?;
    Ok(parse_edge_list(BufReader::new(file), input.directed)?.graph)
}

fn emit(out: Option<&Path>, text: &str) -> Result<(), CliError> {
    match out {
        Some(path) => fs::write(path, text).map_err(|e| io_error(path, e)),
        None => io::stdout()
            .lock()
            .write_all(text.as_bytes())
            .map_err(|e| CliError::Data(format!("stdout: {e}"))),
    }
}

fn experiment_config(args: &ExperimentArgs, out: PathBuf) -> Result<ExperimentConfig, CliError> {
    Ok(ExperimentConfig {
        params: Params::new(args.model.alpha, args.model.theta)?,
        n_edges: args.edges,
        replicates: args.replicates,
        base_seed: args.seed,
        directed: args.directed,
        output_path: out,
    })
}

fn run(cli: Cli) -> Result<(), CliError> {
    match cli.command {
        Command::Generate {
            model,
            edges,
            seed,
            directed,
            out,
        } => {
            let params = Params::new(model.alpha, model.theta)?;
            let graph = generate(params, edges, seed, directed)?;
            emit(out.as_deref(), &write_edge_list(&graph))?;
            eprintln!(
                "generated {} edges on {} vertices ({RNG_NAME}, seed {seed})",
                graph.num_edges(),
                graph.num_vertices()
            );
        }
        Command::Degrees { input, ccdf, out } => {
            let hist = read_graph(&input)?.degree_histogram();
            let mut text = String::new();
            if ccdf {
                text.push_str("degree,ccdf\n");
                for (k, c) in hist.ccdf() {
                    let _ = writeln!(text, "{k},{}", format_real(c));
                }
            } else {
                text.push_str("degree,count\n");
                for (k, c) in hist.counts() {
                    let _ = writeln!(text, "{k},{c}");
                }
            }
            emit(out.as_deref(), &text)?;
        }
        Command::Project { input, out } => {
            let graph = read_graph(&input)?;
            let simple = graph.project_simple();
            emit(out.as_deref(), &write_edge_list(&simple))?;
            eprintln!(
                "kept {} of {} edges",
                simple.num_edges(),
                graph.num_edges()
            );
        }
        Command::Fit {
            input,
            method,
            kmin,
            estimator,
            simple,
        } => {
            let graph = read_graph(&input)?;
            let estimator = match estimator {
                Estimator::Mle => GammaEstimator::DiscreteMle,
                Estimator::Ccdf => GammaEstimator::CcdfRegression,
            };
            let fit = match method {
                Method::Moment => fit_moment(&graph, &MomentConfig { estimator, kmin })?,
                Method::Mle => {
                    let config = MleConfig {
                        input_is_simple: simple,
                        ..MleConfig::default()
                    };
                    fit_mle(&graph, &config)?
                }
            };
            emit(None, &format!("{}\n", fit.to_json()))?;
            if !fit.converged {
                return Err(CliError::Numeric(format!(
                    "optimizer did not converge after {} iterations; best point reported",
                    fit.diagnostics.iterations.unwrap_or(0)
                )));
            }
        }
        Command::Loglik { input, model, form } => {
            let params = Params::new(model.alpha, model.theta)?;
            let graph = read_graph(&input)?;
            let value = match form {
                Form::Closed => log_prob_closed(&graph, params),
                Form::Sequential => log_prob_sequential(&graph, params),
            };
            let json = serde_json::json!({
                "alpha": params.alpha(),
                "theta": params.theta(),
                "n_edges": graph.num_edges(),
                "n_vertices": graph.num_vertices(),
                "log_likelihood": value,
            });
            emit(None, &format!("{json}\n"))?;
        }
        Command::GrowthExperiment { experiment, out } => {
            let cfg = experiment_config(&experiment, out)?;
            let report = run_growth_experiment(&cfg)?;
            eprintln!(
                "mean vertices {:.3}, expected {:.3}, ratio {:.4}",
                report.mean_n_vertices, report.expected_n_vertices, report.ratio
            );
        }
        Command::DegreeExperiment {
            experiment,
            out,
            gnuplot,
        } => {
            let cfg = experiment_config(&experiment, out)?;
            let report = run_degree_experiment(&cfg, gnuplot)?;
            for (name, table) in [("multigraph", &report.multigraph), ("projected", &report.projected)] {
                match table.fit {
                    ExponentFit::Fitted { gamma_hat, kmin, .. } => {
                        eprintln!("{name}: gamma_hat {gamma_hat:.4} (kmin {kmin})")
                    }
                    ExponentFit::InsufficientData => eprintln!("{name}: insufficient data for a fit"),
                }
            }
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() {
                ExitCode::from(1)
            } else {
                ExitCode::SUCCESS
            };
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {}", e.message());
            ExitCode::from(e.code())
        }
    }
}
