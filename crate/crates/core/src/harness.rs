//! Monte Carlo experiments.
//!
//! Replicate `i` of an experiment uses seed [`replicate_seed`]`(base_seed, i)`,
//! so records do not depend on execution order. Replicates run in parallel
//! and are merged by index.
//!
//! CSV conventions: a header line, data rows, then rows starting with
//! `#summary,` or `#meta,` holding `key=value` fields. Reals are written
//! with 17 significant digits and read back exactly.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use rayon::prelude::*;
use thiserror::Error;

use crate::estimation::{expected_vertices, select_kmin, EstimationError};
use crate::generator::{generate, GeneratorError, Params, RNG_NAME};
use crate::graph::{DegreeHistogram, Multigraph};

pub const GROWTH_HEADER: &str = "replicate,seed,n_vertices";
pub const CCDF_HEADER: &str = "degree,ccdf";
pub const DEGREE_REPLICATES_HEADER: &str =
    "replicate,seed,n_vertices,gamma_hat_multigraph,gamma_hat_projected";

pub const CCDF_MULTIGRAPH_FILE: &str = "ccdf_multigraph.csv";
pub const CCDF_PROJECTED_FILE: &str = "ccdf_projected.csv";
pub const DEGREE_REPLICATES_FILE: &str = "replicates.csv";
pub const GNUPLOT_FILE: &str = "ccdf.gp";

#[derive(Debug, Error)]
pub enum HarnessError {
    #[error("replicates and n_edges must both be at least 1")]
    Config,
    #[error(transparent)]
    Generator(#[from] GeneratorError),
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        source: std::io::Error,
    },
    #[error("line {line}: {message}")]
    Csv { line: usize, message: String },
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentConfig {
    pub params: Params,
    pub n_edges: usize,
    pub replicates: usize,
    pub base_seed: u64,
    pub directed: bool,
    pub output_path: PathBuf,
}

impl ExperimentConfig {
    fn validate(&self) -> Result<(), HarnessError> {
        if self.replicates == 0 || self.n_edges == 0 {
            Err(HarnessError::Config)
        } else {
            Ok(())
        }
    }
}

/// Seed of replicate `index`: the SplitMix64 output function applied to
/// `base_seed + (index + 1) * 0x9E3779B97F4A7C15` (wrapping).
pub fn replicate_seed(base_seed: u64, index: u64) -> u64 {
    let mut z = base_seed.wrapping_add(index.wrapping_add(1).wrapping_mul(0x9E37_79B9_7F4A_7C15));
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ReplicateRecord {
    pub replicate_index: u64,
    pub seed: u64,
    pub n_vertices: u64,
    pub gamma_hat_multigraph: Option<f64>,
    pub gamma_hat_projected: Option<f64>,
}

/// 17 significant digits; parses back to the same `f64`.
pub fn format_real(x: f64) -> String {
    format!("{x:.16e}")
}

fn format_opt(x: Option<f64>) -> String {
    x.map(format_real).unwrap_or_else(|| "NA".to_owned())
}

fn write_file(path: &Path, contents: &str) -> Result<(), HarnessError> {
    fs::write(path, contents).map_err(|source| HarnessError::Io {
        path: path.to_owned(),
        source,
    })
}

fn meta_row(cfg: &ExperimentConfig) -> String {
    format!(
        "#meta,rng={RNG_NAME},alpha={},theta={},n_edges={},replicates={},base_seed={},directed={}\n",
        format_real(cfg.params.alpha()),
        format_real(cfg.params.theta()),
        cfg.n_edges,
        cfg.replicates,
        cfg.base_seed,
        cfg.directed
    )
}

#[derive(Debug, Clone, PartialEq)]
pub struct GrowthReport {
    pub records: Vec<ReplicateRecord>,
    pub mean_n_vertices: f64,
    pub expected_n_vertices: f64,
    /// `mean_n_vertices / expected_n_vertices`.
    pub ratio: f64,
}

impl GrowthReport {
    pub fn to_csv(&self, cfg: &ExperimentConfig) -> String {
        let mut out = String::new();
        out.push_str(GROWTH_HEADER);
        out.push('\n');
        for r in &self.records {
            let _ = writeln!(out, "{},{},{}", r.replicate_index, r.seed, r.n_vertices);
        }
        let _ = writeln!(
            out,
            "#summary,mean_n_vertices={},expected_n_vertices={},ratio={}",
            format_real(self.mean_n_vertices),
            format_real(self.expected_n_vertices),
            format_real(self.ratio)
        );
        out.push_str(&meta_row(cfg));
        out
    }
}

/// Generates `cfg.replicates` graphs and compares the mean vertex count with
/// the asymptotic expectation. Nothing is written.
pub fn growth_experiment(cfg: &ExperimentConfig) -> Result<GrowthReport, HarnessError> {
    cfg.validate()?;
    let records = (0..cfg.replicates as u64)
        .into_par_iter()
        .map(|i| {
            let seed = replicate_seed(cfg.base_seed, i);
            let g = generate(cfg.params, cfg.n_edges, seed, cfg.directed)?;
            Ok(ReplicateRecord {
                replicate_index: i,
                seed,
                n_vertices: g.num_vertices() as u64,
                gamma_hat_multigraph: None,
                gamma_hat_projected: None,
            })
        })
        .collect::<Result<Vec<_>, HarnessError>>()?;
    let mean_n_vertices =
        records.iter().map(|r| r.n_vertices as f64).sum::<f64>() / records.len() as f64;
    let expected_n_vertices = expected_vertices(cfg.params, cfg.n_edges as u64);
    Ok(GrowthReport {
        records,
        mean_n_vertices,
        expected_n_vertices,
        ratio: mean_n_vertices / expected_n_vertices,
    })
}

/// [`growth_experiment`] plus writing the CSV table to `cfg.output_path`.
pub fn run_growth_experiment(cfg: &ExperimentConfig) -> Result<GrowthReport, HarnessError> {
    let report = growth_experiment(cfg)?;
    write_file(&cfg.output_path, &report.to_csv(cfg))?;
    Ok(report)
}

/// Tail exponent fit of one graph, or the reason none was made.
#[derive(Debug, Clone, PartialEq)]
pub enum ExponentFit {
    Fitted { gamma_hat: f64, kmin: u64, ks_distance: f64 },
    InsufficientData,
}

impl ExponentFit {
    pub fn of(hist: &DegreeHistogram) -> Self {
        if hist.counts().len() < 2 {
            return ExponentFit::InsufficientData;
        }
        match select_kmin(hist) {
            Ok(fit) => ExponentFit::Fitted {
                gamma_hat: fit.gamma,
                kmin: fit.kmin,
                ks_distance: fit.ks_distance,
            },
            Err(EstimationError::Divergent { .. } | EstimationError::InsufficientData { .. }) => {
                ExponentFit::InsufficientData
            }
            Err(e) => unreachable!("kmin selection only fails for lack of data: {e}"),
        }
    }

    pub fn gamma_hat(&self) -> Option<f64> {
        match *self {
            ExponentFit::Fitted { gamma_hat, .. } => Some(gamma_hat),
            ExponentFit::InsufficientData => None,
        }
    }
}

/// CCDF points and exponent fit for one graph.
#[derive(Debug, Clone, PartialEq)]
pub struct CcdfTable {
    pub points: Vec<(u64, f64)>,
    pub fit: ExponentFit,
    pub n_vertices: u64,
    pub n_edges: u64,
}

impl CcdfTable {
    pub fn of(graph: &Multigraph) -> Self {
        let hist = graph.degree_histogram();
        Self {
            points: hist.ccdf(),
            fit: ExponentFit::of(&hist),
            n_vertices: hist.total_vertices(),
            n_edges: hist.total_edges(),
        }
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::new();
        out.push_str(CCDF_HEADER);
        out.push('\n');
        for &(k, c) in &self.points {
            let _ = writeln!(out, "{k},{}", format_real(c));
        }
        match self.fit {
            ExponentFit::Fitted {
                gamma_hat,
                kmin,
                ks_distance,
            } => {
                let _ = writeln!(
                    out,
                    "#summary,gamma_hat={},kmin={kmin},ks_distance={},n_vertices={},n_edges={}",
                    format_real(gamma_hat),
                    format_real(ks_distance),
                    self.n_vertices,
                    self.n_edges
                );
            }
            ExponentFit::InsufficientData => {
                let _ = writeln!(
                    out,
                    "#summary,status=insufficient_data,n_vertices={},n_edges={}",
                    self.n_vertices, self.n_edges
                );
            }
        }
        out
    }

    /// Reads back the `(degree, ccdf)` rows of [`CcdfTable::to_csv`].
    pub fn parse_points(text: &str) -> Result<Vec<(u64, f64)>, HarnessError> {
        data_rows(text, CCDF_HEADER)?
            .map(|(line, fields)| match fields.as_slice() {
                [k, c] => Ok((parse_field(line, k)?, parse_field(line, c)?)),
                _ => Err(csv_error(line, "expected 2 fields")),
            })
            .collect()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct DegreeReport {
    pub records: Vec<ReplicateRecord>,
    /// Tables for replicate 0.
    pub multigraph: CcdfTable,
    pub projected: CcdfTable,
}

impl DegreeReport {
    pub fn replicates_csv(&self, cfg: &ExperimentConfig) -> String {
        let mut out = String::new();
        out.push_str(DEGREE_REPLICATES_HEADER);
        out.push('\n');
        for r in &self.records {
            let _ = writeln!(
                out,
                "{},{},{},{},{}",
                r.replicate_index,
                r.seed,
                r.n_vertices,
                format_opt(r.gamma_hat_multigraph),
                format_opt(r.gamma_hat_projected)
            );
        }
        let _ = writeln!(
            out,
            "#summary,median_gamma_hat_multigraph={},median_gamma_hat_projected={}",
            format_opt(median(self.records.iter().filter_map(|r| r.gamma_hat_multigraph))),
            format_opt(median(self.records.iter().filter_map(|r| r.gamma_hat_projected)))
        );
        out.push_str(&meta_row(cfg));
        out
    }

    /// A gnuplot script drawing both CCDFs on log-log axes, each with a
    /// dashed guide of slope `1 - gamma_hat`.
    pub fn gnuplot_script(&self) -> String {
        let mut out = String::new();
        out.push_str("set datafile separator ','\n");
        out.push_str("set datafile commentschars '#'\n");
        out.push_str("set logscale xy\n");
        out.push_str("set xlabel 'degree k'\n");
        out.push_str("set ylabel 'Pr(degree >= k)'\n");
        out.push_str("set key bottom left\n");
        let mut plots = Vec::new();
        for (name, file, table, color) in [
            ("multigraph", CCDF_MULTIGRAPH_FILE, &self.multigraph, "#1f77b4"),
            ("projected", CCDF_PROJECTED_FILE, &self.projected, "#d62728"),
        ] {
            plots.push(format!(
                "'{file}' using 1:2 skip 1 with points pt 7 ps 0.5 lc rgb '{color}' title '{name}'"
            ));
            if let ExponentFit::Fitted { gamma_hat, kmin, .. } = table.fit {
                let anchor = table
                    .points
                    .iter()
                    .find(|p| p.0 >= kmin)
                    .map(|p| p.1)
                    .unwrap_or(1.0);
                plots.push(format!(
                    "{anchor:e} * (x / {kmin}.0) ** ({}) with lines dt 2 lc rgb '{color}' title '{name}: gamma = {gamma_hat:.3}'",
                    1.0 - gamma_hat
                ));
            }
        }
        let _ = writeln!(out, "plot {}", plots.join(", \\\n     "));
        out
    }
}

fn median(values: impl Iterator<Item = f64>) -> Option<f64> {
    let mut v: Vec<f64> = values.collect();
    if v.is_empty() {
        return None;
    }
    v.sort_by(f64::total_cmp);
    let mid = v.len() / 2;
    Some(if v.len() % 2 == 1 {
        v[mid]
    } else {
        0.5 * (v[mid - 1] + v[mid])
    })
}

/// Generates `cfg.replicates` graphs, projects each to a simple graph and
/// fits the tail exponent of both. CCDF tables come from replicate 0.
pub fn degree_experiment(cfg: &ExperimentConfig) -> Result<DegreeReport, HarnessError> {
    cfg.validate()?;
    let results = (0..cfg.replicates as u64)
        .into_par_iter()
        .map(|i| {
            let seed = replicate_seed(cfg.base_seed, i);
            let g = generate(cfg.params, cfg.n_edges, seed, cfg.directed)?;
            let multigraph = CcdfTable::of(&g);
            let projected = CcdfTable::of(&g.project_simple());
            let record = ReplicateRecord {
                replicate_index: i,
                seed,
                n_vertices: g.num_vertices() as u64,
                gamma_hat_multigraph: multigraph.fit.gamma_hat(),
                gamma_hat_projected: projected.fit.gamma_hat(),
            };
            Ok((record, (i == 0).then_some((multigraph, projected))))
        })
        .collect::<Result<Vec<_>, HarnessError>>()?;
    let mut tables = None;
    let mut records = Vec::with_capacity(results.len());
    for (record, t) in results {
        records.push(record);
        if t.is_some() {
            tables = t;
        }
    }
    let (multigraph, projected) = tables.expect("replicate 0 always runs");
    Ok(DegreeReport {
        records,
        multigraph,
        projected,
    })
}

/// [`degree_experiment`] plus writing the tables into the directory
/// `cfg.output_path` (created if missing), and the gnuplot script when
/// `gnuplot` is set.
pub fn run_degree_experiment(cfg: &ExperimentConfig, gnuplot: bool) -> Result<DegreeReport, HarnessError> {
    let report = degree_experiment(cfg)?;
    let dir = &cfg.output_path;
    fs::create_dir_all(dir).map_err(|source| HarnessError::Io {
        path: dir.clone(),
        source,
    })?;
    write_file(&dir.join(CCDF_MULTIGRAPH_FILE), &report.multigraph.to_csv())?;
    write_file(&dir.join(CCDF_PROJECTED_FILE), &report.projected.to_csv())?;
    write_file(&dir.join(DEGREE_REPLICATES_FILE), &report.replicates_csv(cfg))?;
    if gnuplot {
        write_file(&dir.join(GNUPLOT_FILE), &report.gnuplot_script())?;
    }
    Ok(report)
}

fn csv_error(line: usize, message: impl Into<String>) -> HarnessError {
    HarnessError::Csv {
        line,
        message: message.into(),
    }
}

fn parse_field<T: std::str::FromStr>(line: usize, field: &str) -> Result<T, HarnessError> {
    field
        .parse()
        .map_err(|_| csv_error(line, format!("cannot parse {field:?}")))
}

/// Data rows after checking the header; `#` rows are skipped.
fn data_rows<'a>(
    text: &'a str,
    header: &str,
) -> Result<impl Iterator<Item = (usize, Vec<&'a str>)> + 'a, HarnessError> {
    let mut lines = text.lines().enumerate();
    match lines.next() {
        Some((_, h)) if h == header => {}
        _ => return Err(csv_error(1, format!("expected header {header:?}"))),
    }
    Ok(lines
        .filter(|(_, l)| !l.starts_with('#') && !l.is_empty())
        .map(|(i, l)| (i + 1, l.split(',').collect())))
}

/// `key=value` pairs of the `#summary,` row.
pub fn parse_summary(text: &str) -> Vec<(String, String)> {
    text.lines()
        .filter_map(|l| l.strip_prefix("#summary,"))
        .flat_map(|rest| rest.split(','))
        .filter_map(|kv| kv.split_once('='))
        .map(|(k, v)| (k.to_owned(), v.to_owned()))
        .collect()
}

/// Reads back the records of a growth CSV.
pub fn parse_growth_csv(text: &str) -> Result<Vec<ReplicateRecord>, HarnessError> {
    data_rows(text, GROWTH_HEADER)?
        .map(|(line, fields)| match fields.as_slice() {
            [i, s, n] => Ok(ReplicateRecord {
                replicate_index: parse_field(line, i)?,
                seed: parse_field(line, s)?,
                n_vertices: parse_field(line, n)?,
                gamma_hat_multigraph: None,
                gamma_hat_projected: None,
            }),
            _ => Err(csv_error(line, "expected 3 fields")),
        })
        .collect()
}

/// Reads back the records of a degree-experiment replicates CSV.
pub fn parse_degree_replicates_csv(text: &str) -> Result<Vec<ReplicateRecord>, HarnessError> {
    let opt = |line: usize, f: &str| -> Result<Option<f64>, HarnessError> {
        if f == "NA" {
            Ok(None)
        } else {
            parse_field(line, f).map(Some)
        }
    };
    data_rows(text, DEGREE_REPLICATES_HEADER)?
        .map(|(line, fields)| match fields.as_slice() {
            [i, s, n, gm, gp] => Ok(ReplicateRecord {
                replicate_index: parse_field(line, i)?,
                seed: parse_field(line, s)?,
                n_vertices: parse_field(line, n)?,
                gamma_hat_multigraph: opt(line, gm)?,
                gamma_hat_projected: opt(line, gp)?,
            }),
            _ => Err(csv_error(line, "expected 5 fields")),
        })
        .collect()
}
