use std::fs::File;
use std::io::{self, Write};
use std::path::{Path, PathBuf};
use std::time::Instant;

use polscat::asymptotics::{self, Prediction};
use polscat::ensembles::{RngStream, RNG_ALGORITHM};
use polscat::montecarlo::{self, fit_decay, DecayModel, FitPoint, BLOCK_SIZE};
use polscat::{Beams, Mixing, Scenario};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::args::{FitArgs, MeasureArgs, MeasureColumn, ModelArg, ReferenceArgs, SweepArgs};

pub const SWEEP_HEADER: [&str; 7] = ["N", "mean_C", "stderr_C", "mean_Cp", "stderr_Cp", "n_samples", "n_discarded"];
pub const REFERENCE_HEADER: [&str; 7] = ["N", "mixing", "beams", "measure", "kind", "value", "rate"];

#[derive(Debug, Error)]
pub enum CliError {
    #[error("invalid {field}: {reason}")]
    Config { field: &'static str, reason: String },
    #[error(transparent)]
    Numerical(#[from] polscat::Error),
    #[error("{}: {source}", path.display())]
    Io { path: PathBuf, source: io::Error },
    #[error("{}: {reason}", path.display())]
    Table { path: PathBuf, reason: String },
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config { .. } | CliError::Numerical(polscat::Error::InvalidArgument { .. }) => 2,
            _ => 1,
        }
    }
}

fn config(field: &'static str, reason: impl Into<String>) -> CliError {
    CliError::Config { field, reason: reason.into() }
}

fn io_err(path: &Path) -> impl FnOnce(io::Error) -> CliError + '_ {
    move |source| CliError::Io { path: path.to_owned(), source }
}

/// Everything needed to reproduce a run; written as the JSON sidecar.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RunConfig {
    pub command: &'static str,
    pub mixing: Mixing,
    pub beams: Beams,
    pub n_values: Vec<usize>,
    pub n_samples: u64,
    pub seed: u64,
    pub workers: usize,
    pub output: Option<PathBuf>,
    pub output_format: &'static str,
    pub rng_algorithm: &'static str,
    pub block_size: u64,
    pub version: &'static str,
}

fn check_n(field: &'static str, n: usize) -> Result<usize, CliError> {
    if n == 0 {
        return Err(config(field, "mode counts must be at least 1"));
    }
    Ok(n)
}

/// Parses an inclusive `A..B` range.
pub fn parse_n_range(s: &str) -> Result<Vec<usize>, CliError> {
    let (a, b) = s
        .split_once("..")
        .ok_or_else(|| config("n-range", format!("expected A..B, got {s:?}")))?;
    let parse = |t: &str| {
        t.trim()
            .parse::<usize>()
            .map_err(|_| config("n-range", format!("{t:?} is not a nonnegative integer")))
    };
    let (a, b) = (check_n("n-range", parse(a)?)?, parse(b)?);
    if b < a {
        return Err(config("n-range", format!("empty range {a}..{b}")));
    }
    Ok((a..=b).collect())
}

fn n_values(range: &Option<String>, list: &[usize]) -> Result<Vec<usize>, CliError> {
    let values = match range {
        Some(r) => parse_n_range(r)?,
        None if list.is_empty() => return Err(config("n", "give --n or --n-range")),
        None => list.iter().map(|&n| check_n("n", n)).collect::<Result<_, _>>()?,
    };
    Ok(values)
}

fn resolve_workers(w: Option<usize>) -> Result<usize, CliError> {
    match w {
        Some(0) => Err(config("workers", "must be at least 1")),
        Some(w) => Ok(w),
        None => Ok(std::thread::available_parallelism().map_or(1, |n| n.get())),
    }
}

fn sidecar_path(out: &Path) -> Result<PathBuf, CliError> {
    if out.extension().is_some_and(|e| e == "json") {
        return Err(config("out", "the table path must not end in .json (reserved for the run configuration)"));
    }
    Ok(out.with_extension("json"))
}

/// Creates `path`, or returns stdout when there is none.
fn sink(path: Option<&Path>) -> Result<Box<dyn Write>, CliError> {
    Ok(match path {
        Some(p) => Box::new(io::BufWriter::new(File::create(p).map_err(io_err(p))?)),
        None => Box::new(io::stdout().lock()),
    })
}

#[derive(Debug, Serialize)]
struct ComplexGrid {
    re: [[f64; 4]; 4],
    im: [[f64; 4]; 4],
}

#[derive(Debug, Serialize)]
struct MeasureReport {
    mixing: Mixing,
    beams: Beams,
    n1: usize,
    n2: usize,
    seed: u64,
    rho: ComplexGrid,
    concurrence: f64,
    chsh_max: f64,
    pseudo_concurrence: f64,
}

/// Draws cap for `measure`; a degenerate draw has probability zero.
const MAX_REDRAWS: usize = 1000;

pub fn measure(args: &MeasureArgs, out: &mut dyn Write) -> Result<(), CliError> {
    let (n1, n2) = match (args.n1, args.n2) {
        (Some(a), Some(b)) => (check_n("n1", a)?, check_n("n2", b)?),
        _ => (check_n("n", args.n)?, args.n),
    };
    let scenario = Scenario::new(args.scenario.mixing(), args.scenario.beams.into(), n1, n2)?;
    let mut rng = RngStream::new(args.seed, 0).rng();
    let mut drawn = None;
    for _ in 0..MAX_REDRAWS {
        if let Some(rho) = montecarlo::draw_state(&scenario, &mut rng)? {
            drawn = Some(rho);
            break;
        }
    }
    let rho = drawn.ok_or(polscat::Error::DegenerateNormalization(0.0))?;
    let m = polscat::Measures::evaluate(&rho)?;
    let grid = rho.matrix().m;
    let report = MeasureReport {
        mixing: scenario.mixing,
        beams: scenario.beams,
        n1,
        n2,
        seed: args.seed,
        rho: ComplexGrid {
            re: grid.map(|row| row.map(|z| z.re)),
            im: grid.map(|row| row.map(|z| z.im)),
        },
        concurrence: m.concurrence,
        chsh_max: m.chsh_max,
        pseudo_concurrence: m.pseudo_concurrence,
    };
    write_json(out, &report)
}

fn write_json(out: &mut dyn Write, value: &impl Serialize) -> Result<(), CliError> {
    let stdout = || PathBuf::from("<stdout>");
    serde_json::to_writer_pretty(&mut *out, value).map_err(|e| CliError::Io { path: stdout(), source: e.into() })?;
    writeln!(out).map_err(|source| CliError::Io { path: stdout(), source })
}

pub fn sweep_config(args: &SweepArgs) -> Result<RunConfig, CliError> {
    let n_values = n_values(&args.n_range, &args.n)?;
    if args.samples < 2 {
        return Err(config("samples", "at least 2 samples are needed for a standard error"));
    }
    if let Some(out) = &args.out {
        sidecar_path(out)?;
    }
    Ok(RunConfig {
        command: "sweep",
        mixing: args.scenario.mixing(),
        beams: args.scenario.beams.into(),
        n_values,
        n_samples: args.samples,
        seed: args.seed,
        workers: resolve_workers(args.workers)?,
        output: args.out.clone(),
        output_format: "csv",
        rng_algorithm: RNG_ALGORITHM,
        block_size: BLOCK_SIZE,
        version: env!("CARGO_PKG_VERSION"),
    })
}

pub fn sweep(cfg: &RunConfig) -> Result<(), CliError> {
    let template = Scenario::symmetric(cfg.mixing, cfg.beams, cfg.n_values[0])?;
    let rows = montecarlo::sweep(&template, &cfg.n_values, cfg.n_samples, cfg.seed, cfg.workers)?;
    let table_path = cfg.output.as_deref();
    let path_for_errors = table_path.map_or_else(|| PathBuf::from("<stdout>"), Path::to_owned);
    let csv_err = |e: csv::Error| CliError::Io { path: path_for_errors.clone(), source: e.into() };
    let mut w = csv::Writer::from_writer(sink(table_path)?);
    w.write_record(SWEEP_HEADER).map_err(csv_err)?;
    for r in &rows {
        w.write_record([
            r.n.to_string(),
            num(r.concurrence.mean),
            num(r.concurrence.stderr),
            num(r.pseudo_concurrence.mean),
            num(r.pseudo_concurrence.stderr),
            r.concurrence.n_samples.to_string(),
            r.concurrence.n_discarded.to_string(),
        ])
        .map_err(csv_err)?;
    }
    w.flush().map_err(|source| CliError::Io { path: path_for_errors.clone(), source })?;
    if let Some(out) = table_path {
        let side = sidecar_path(out)?;
        let mut f = sink(Some(&side))?;
        write_json(&mut *f, cfg)?;
    }
    for r in &rows {
        if r.concurrence.flagged() {
            eprintln!(
                "warning: N = {}: {} of {} draws discarded as degenerate",
                r.n,
                r.concurrence.n_discarded,
                r.concurrence.n_samples + r.concurrence.n_discarded
            );
        }
    }
    Ok(())
}

#[derive(Debug, Deserialize)]
struct SweepRecord {
    #[serde(rename = "N")]
    n: usize,
    #[serde(rename = "mean_C")]
    mean_c: f64,
    #[serde(rename = "stderr_C")]
    stderr_c: f64,
    #[serde(rename = "mean_Cp")]
    mean_cp: f64,
    #[serde(rename = "stderr_Cp")]
    stderr_cp: f64,
}

/// Reads the `(N, mean, stderr)` columns for one measure from a sweep table.
pub fn read_table(path: &Path, measure: MeasureColumn) -> Result<Vec<FitPoint>, CliError> {
    let table_err = |reason: String| CliError::Table { path: path.to_owned(), reason };
    let mut rdr = csv::Reader::from_path(path).map_err(|e| match e.into_kind() {
        csv::ErrorKind::Io(source) => CliError::Io { path: path.to_owned(), source },
        other => table_err(format!("{other:?}")),
    })?;
    let header = rdr.headers().map_err(|e| table_err(e.to_string()))?.clone();
    if header.iter().ne(SWEEP_HEADER) {
        return Err(table_err(format!("expected header {}", SWEEP_HEADER.join(","))));
    }
    rdr.deserialize::<SweepRecord>()
        .map(|r| {
            let r = r.map_err(|e| table_err(e.to_string()))?;
            let (mean, stderr) = match measure {
                MeasureColumn::Concurrence => (r.mean_c, r.stderr_c),
                MeasureColumn::PseudoConcurrence => (r.mean_cp, r.stderr_cp),
            };
            Ok(FitPoint { n: r.n, mean, stderr })
        })
        .collect()
}

pub fn fit(args: &FitArgs, out: &mut dyn Write) -> Result<(), CliError> {
    let points = read_table(&args.table, args.measure)?;
    let model = match args.model {
        ModelArg::Exponential => DecayModel::Exponential,
        ModelArg::Algebraic => DecayModel::Algebraic,
    };
    write_json(out, &fit_decay(&points, model)?)
}

#[derive(Debug, Serialize)]
#[allow(non_snake_case)]
struct ConstantsReport {
    A: f64,
    alpha_opt_A: [f64; 4],
    B: f64,
    alpha_opt_B: [f64; 4],
    /// Wall-clock seconds spent in the two minimizations.
    runtime: f64,
}

pub fn constants(out: &mut dyn Write) -> Result<(), CliError> {
    let start = Instant::now();
    let a = asymptotics::decay_constant_a()?;
    let b = asymptotics::decay_constant_b()?;
    let report = ConstantsReport {
        A: a.rate,
        alpha_opt_A: *a.alpha_opt.alpha(),
        B: b.rate,
        alpha_opt_B: *b.alpha_opt.alpha(),
        runtime: start.elapsed().as_secs_f64(),
    };
    write_json(out, &report)
}

/// Shortest round-trip form; switches to exponent notation for tiny values.
fn num(x: f64) -> String {
    format!("{x:?}")
}

fn label<T: Serialize>(v: T) -> String {
    serde_json::to_value(v)
        .ok()
        .and_then(|v| v.as_str().map(str::to_owned))
        .unwrap_or_default()
}

pub fn reference(args: &ReferenceArgs) -> Result<(), CliError> {
    let ns = n_values(&args.n_range, &args.n)?;
    let path_for_errors = args.out.clone().unwrap_or_else(|| PathBuf::from("<stdout>"));
    let csv_err = |e: csv::Error| CliError::Io { path: path_for_errors.clone(), source: e.into() };
    let mut w = csv::Writer::from_writer(sink(args.out.as_deref())?);
    w.write_record(REFERENCE_HEADER).map_err(csv_err)?;
    let classes = [
        (Mixing::PolarizationConserving, Beams::Both),
        (Mixing::PolarizationConserving, Beams::Single),
        (Mixing::PolarizationMixing, Beams::Both),
        (Mixing::PolarizationMixing, Beams::Single),
    ];
    for &n in &ns {
        for (mixing, beams) in classes {
            let a = asymptotics::asymptote(mixing, beams, n)?;
            let mut rows = Vec::new();
            if (mixing, beams) == (Mixing::PolarizationConserving, Beams::Single) {
                let exact = asymptotics::exact_mean_concurrence_single_conserving(n)?;
                rows.push(("C", "exact", num(exact), String::new()));
                rows.push(("Cp", "exact", num(exact), String::new()));
            }
            for (measure, p) in [("C", a.concurrence), ("Cp", a.pseudo_concurrence)] {
                rows.push(match p {
                    Prediction::Value { value } => (measure, "asymptote", num(value), String::new()),
                    Prediction::Exponential { rate, relative } => (measure, "exponential", num(relative), num(rate)),
                    Prediction::Unknown => (measure, "unknown", String::new(), String::new()),
                });
            }
            for (measure, kind, value, rate) in rows {
                w.write_record([n.to_string(), label(mixing), label(beams), measure.into(), kind.into(), value, rate])
                    .map_err(csv_err)?;
            }
        }
    }
    w.flush().map_err(|source| CliError::Io { path: path_for_errors.clone(), source })
}
