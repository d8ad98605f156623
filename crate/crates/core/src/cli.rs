//! Command-line front end. Every experiment is a subcommand that writes a CSV
//! table (or JSON records) and prints a one-line JSON summary to stderr.
//!
//! Exit codes: 0 on success, 1 when a checked property fails, 2 on usage or
//! validation errors.

use crate::coherent::{clt_csv, clt_sweep};
use crate::error::Error;
use crate::fock::{boson_compare, boson_spectrum_csv, operator_difference_csv};
use crate::harness::{
    bound_reports_csv, concentration_csv, conjecture_csv, conjecture_trend, decay_exponent, default_schedule,
    bound_suite, bound_suite_configs, pinned_csv, pinned_spectrum_convergence, spectral_concentration_check,
    strong_convergence_csv, strong_convergence_residual, trend_verdict, ConcentrationLevel, CountStatus, MRule,
    PinSchedule, SuiteConfig, SuiteSummary, DEFAULT_SEED,
};
use crate::jacobi::{phase_diagram, phase_diagram_csv, spectral_report, spectral_report_csv};
use crate::kinkmath::{make_params, ModelParams, Window};
use crate::output::{write_atomic, CsvTable};
use crate::spin::{admissible_m2, ground_state_check, sector_gap, sector_gap_csv};
use clap::{Args, CommandFactory, Parser, Subcommand, ValueEnum};
use serde_json::{json, Map, Value};
use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

/// Residual tolerance of the ground-state check, relative to the largest diagonal entry.
pub const GROUND_TOL: f64 = 1e-10;
/// Tolerance of the boson reconstruction check.
pub const RECONSTRUCTION_TOL: f64 = 1e-12;

#[derive(Debug, Parser)]
#[command(name = "xxzlab", version, about = "Spin-J XXZ kink chain: exact spectra, Jacobi operator and boson limit")]
pub struct Cli {
    /// Flat key=value file with optional [subcommand] sections; flags take precedence.
    #[arg(long, global = true, value_name = "FILE")]
    pub config: Option<PathBuf>,
    /// Worker threads (falls back to XXZLAB_THREADS, then all cores).
    #[arg(long, global = true, env = "XXZLAB_THREADS")]
    pub threads: Option<usize>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Csv,
    Json,
}

#[derive(Debug, Clone, Args)]
pub struct OutputArgs {
    /// Write the table here (atomically) instead of stdout.
    #[arg(long, value_name = "PATH")]
    pub output: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = Format::Csv)]
    pub format: Format,
}

#[derive(Debug, Clone, Args)]
pub struct ModelArgs {
    /// Anisotropy, must exceed 1.
    #[arg(long, default_value_t = 1.25, allow_hyphen_values = true)]
    pub delta: f64,
    /// Kink position.
    #[arg(long, default_value_t = 0.5, allow_hyphen_values = true)]
    pub r: f64,
}

#[derive(Debug, Clone, Args)]
pub struct WindowArgs {
    /// Window as `a,b`.
    #[arg(long, value_name = "A,B", allow_hyphen_values = true, conflicts_with_all = ["sites", "half_width"])]
    pub window: Option<String>,
    /// Number of sites; the window is centred on the bond (0,1) for even counts.
    #[arg(long, conflicts_with = "half_width")]
    pub sites: Option<usize>,
    /// Window `[-h, h]`.
    #[arg(long)]
    pub half_width: Option<i64>,
}

impl WindowArgs {
    fn resolve(&self, default: Window) -> Result<Window, Error> {
        if let Some(w) = &self.window {
            let parts: Vec<&str> = w.split(',').map(str::trim).collect();
            let parse = |s: &str| s.parse::<i64>().map_err(|_| Error::InvalidParameter(format!("bad window `{w}`")));
            return match parts.as_slice() {
                [a, b] => Window::new(parse(a)?, parse(b)?),
                _ => Err(Error::InvalidParameter(format!("window must be `a,b` (got `{w}`)"))),
            };
        }
        if let Some(n) = self.sites {
            if n == 0 {
                return Err(Error::InvalidParameter("sites must be positive".into()));
            }
            let a = -((n as i64 - 1) / 2);
            return Window::new(a, a + n as i64 - 1);
        }
        if let Some(h) = self.half_width {
            return Window::symmetric(h);
        }
        Ok(default)
    }
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Low spectrum of the one-particle Jacobi operator, its gap and continuum edge.
    #[command(args_override_self = true)]
    Jacobi {
        #[command(flatten)]
        model: ModelArgs,
        #[command(flatten)]
        window: WindowArgs,
        /// Number of eigenvalues.
        #[arg(long, default_value_t = 6)]
        k: usize,
        #[command(flatten)]
        out: OutputArgs,
    },
    /// Jacobi gap, continuum edge and isolated eigenvalues over a (1/Δ, r) grid.
    #[command(args_override_self = true)]
    PhaseDiagram {
        /// Values of 1/Δ in (0,1).
        #[arg(long, value_delimiter = ',', default_values_t = [0.2, 0.4, 0.6, 0.8])]
        delta_inv: Vec<f64>,
        /// Kink positions.
        #[arg(long = "r", value_delimiter = ',', allow_hyphen_values = true, default_values_t = [0.0, 0.25, 0.5])]
        r_grid: Vec<f64>,
        #[command(flatten)]
        window: WindowArgs,
        #[arg(long, default_value_t = 4)]
        k: usize,
        #[command(flatten)]
        out: OutputArgs,
    },
    /// Spectral gap of the spin Hamiltonian in magnetization sectors.
    #[command(args_override_self = true)]
    SpinGap {
        #[command(flatten)]
        model: ModelArgs,
        /// Twice the spin, 2J
        #[arg(long, default_value_t = 1)]
        two_j: u32,
        #[command(flatten)]
        window: WindowArgs,
        /// Sectors as 2M; defaults to the sector that holds the kink.
        #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
        m2: Vec<i64>,
        #[command(flatten)]
        out: OutputArgs,
    },
    /// Residual of the explicit zero-energy ground state in every sector.
    #[command(args_override_self = true)]
    GroundstateCheck {
        #[command(flatten)]
        model: ModelArgs,
        /// Twice the spin, 2J
        #[arg(long, default_value_t = 1)]
        two_j: u32,
        #[command(flatten)]
        window: WindowArgs,
        /// Sectors as 2M; defaults to all.
        #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
        m2: Vec<i64>,
        #[command(flatten)]
        out: OutputArgs,
    },
    /// Spin Hamiltonian against its boson decomposition, or boson spectra with --spectrum.
    #[command(args_override_self = true)]
    BosonCompare {
        #[command(flatten)]
        model: ModelArgs,
        /// Twice the spin, 2J
        #[arg(long, default_value_t = 2)]
        two_j: u32,
        #[command(flatten)]
        window: WindowArgs,
        /// Emit the low spectrum of the quasi-free Hamiltonian instead.
        #[arg(long)]
        spectrum: bool,
        /// Occupation cap for --spectrum (defaults to 2J).
        #[arg(long)]
        n_cap: Option<usize>,
        /// Particle-number sectors for --spectrum.
        #[arg(long, value_delimiter = ',', default_values_t = [0usize, 1, 2])]
        sectors: Vec<usize>,
        #[arg(long, default_value_t = 6)]
        k: usize,
        #[command(flatten)]
        out: OutputArgs,
    },
    /// Randomised operator-inequality suite for the kinematical, dynamical and transition parts.
    #[command(args_override_self = true)]
    Bounds {
        #[arg(long, default_value_t = DEFAULT_SEED)]
        seed: u64,
        /// Samples per configuration.
        #[arg(long, default_value_t = 20)]
        samples: usize,
        /// Run a single configuration built from the model flags instead of the default suite.
        #[arg(long)]
        n_j: Option<usize>,
        /// Particle number for the norm bounds of the single configuration.
        #[arg(long, default_value_t = 2)]
        n: usize,
        /// Twice the spin, 2J
        #[arg(long, default_value_t = 6)]
        two_j: u32,
        #[command(flatten)]
        model: ModelArgs,
        #[command(flatten)]
        window: WindowArgs,
        #[command(flatten)]
        out: OutputArgs,
    },
    /// Residual of H/J against the quasi-free Hamiltonian on a fixed occupation vector.
    #[command(args_override_self = true)]
    Converge {
        #[command(flatten)]
        model: ModelArgs,
        /// Comma-separated values of 2J
        #[arg(long, value_delimiter = ',', default_values_t = [4u32, 8, 16, 32])]
        two_j: Vec<u32>,
        #[command(flatten)]
        window: WindowArgs,
        /// Occupations as `site:n`; defaults to one boson at the kink.
        #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
        occupation: Vec<String>,
        #[command(flatten)]
        out: OutputArgs,
    },
    /// Residuals and pinned eigenvalue counts near a quasi-free eigenvalue.
    #[command(args_override_self = true)]
    Concentrate {
        #[command(flatten)]
        model: ModelArgs,
        /// Comma-separated values of 2J
        #[arg(long, value_delimiter = ',', default_values_t = [4u32, 8, 16])]
        two_j: Vec<u32>,
        #[command(flatten)]
        window: WindowArgs,
        /// 0 for the vacuum, k ≥ 1 for the k-th one-particle level.
        #[arg(long, default_value_t = 1)]
        level: usize,
        /// Pinning strength for every J (defaults to the decaying schedule).
        #[arg(long)]
        h: Option<f64>,
        #[command(flatten)]
        out: OutputArgs,
    },
    /// Pinned low spectrum against quasi-free levels below an energy cut.
    #[command(args_override_self = true)]
    Pinned {
        #[command(flatten)]
        model: ModelArgs,
        /// Comma-separated values of 2J
        #[arg(long, value_delimiter = ',', default_values_t = [4u32, 8, 16])]
        two_j: Vec<u32>,
        #[command(flatten)]
        window: WindowArgs,
        /// Energy cut (defaults to 0.9 · 2(1 − 1/Δ)).
        #[arg(long)]
        e_max: Option<f64>,
        /// Pinning strength for every J (defaults to the decaying schedule).
        #[arg(long)]
        h: Option<f64>,
        #[command(flatten)]
        out: OutputArgs,
    },
    /// Spin gap over J compared with the Jacobi gap.
    #[command(args_override_self = true)]
    Conjecture {
        #[command(flatten)]
        model: ModelArgs,
        /// Comma-separated values of 2J
        #[arg(long, value_delimiter = ',', default_values_t = [1u32, 2, 3, 4, 5])]
        two_j: Vec<u32>,
        #[command(flatten)]
        window: WindowArgs,
        /// Fixed sector 2M for every J (defaults to the kink sector).
        #[arg(long, allow_hyphen_values = true)]
        m2: Option<i64>,
        /// Relative growth tolerated for one inversion.
        #[arg(long, default_value_t = 0.05)]
        band: f64,
        #[command(flatten)]
        out: OutputArgs,
    },
    /// Characteristic functions of fluctuation operators against their Gaussian limit.
    #[command(args_override_self = true)]
    Clt {
        #[command(flatten)]
        model: ModelArgs,
        /// Comma-separated values of 2J
        #[arg(long, value_delimiter = ',', default_values_t = [1u32, 4, 16, 64])]
        two_j: Vec<u32>,
        #[command(flatten)]
        window: WindowArgs,
        /// Single-site fields `site:v1:v2:v3`; defaults to three fixed vectors at the kink.
        #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
        vector: Vec<String>,
        #[command(flatten)]
        out: OutputArgs,
    },
}

impl Command {
    fn name(&self) -> &'static str {
        match self {
            Command::Jacobi { .. } => "jacobi",
            Command::PhaseDiagram { .. } => "phase-diagram",
            Command::SpinGap { .. } => "spin-gap",
            Command::GroundstateCheck { .. } => "groundstate-check",
            Command::BosonCompare { .. } => "boson-compare",
            Command::Bounds { .. } => "bounds",
            Command::Converge { .. } => "converge",
            Command::Concentrate { .. } => "concentrate",
            Command::Pinned { .. } => "pinned",
            Command::Conjecture { .. } => "conjecture",
            Command::Clt { .. } => "clt",
        }
    }

    fn out(&self) -> &OutputArgs {
        match self {
            Command::Jacobi { out, .. }
            | Command::PhaseDiagram { out, .. }
            | Command::SpinGap { out, .. }
            | Command::GroundstateCheck { out, .. }
            | Command::BosonCompare { out, .. }
            | Command::Bounds { out, .. }
            | Command::Converge { out, .. }
            | Command::Concentrate { out, .. }
            | Command::Pinned { out, .. }
            | Command::Conjecture { out, .. }
            | Command::Clt { out, .. } => out,
        }
    }
}

/// Table, JSON summary and verdict of one run.
#[derive(Debug, Clone)]
pub struct RunOutput {
    pub table: CsvTable,
    pub summary: Value,
    pub pass: bool,
}

#[derive(Debug, thiserror::Error)]
enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error(transparent)]
    Model(#[from] Error),
}

impl CliError {
    fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) => 2,
            CliError::Model(e) => match e {
                Error::NoConvergence { .. } | Error::Io(_) | Error::Untestable(_) => 1,
                _ => 2,
            },
        }
    }
}

/// Parses `key = value` lines grouped under optional `[section]` headers.
/// Keys outside any section apply to every subcommand.
pub fn parse_config(text: &str) -> Result<BTreeMap<String, Vec<(String, String)>>, String> {
    let mut sections: BTreeMap<String, Vec<(String, String)>> = BTreeMap::new();
    let mut current = String::new();
    for (no, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        if let Some(name) = line.strip_prefix('[').and_then(|l| l.strip_suffix(']')) {
            current = name.trim().to_string();
            continue;
        }
        let (k, v) = line.split_once('=').ok_or_else(|| format!("config line {}: expected key = value", no + 1))?;
        sections.entry(current.clone()).or_default().push((k.trim().replace('_', "-"), v.trim().to_string()));
    }
    Ok(sections)
}

/// Flags contributed by the config file for the chosen subcommand, checked
/// against the flags that subcommand accepts.
fn config_flags(path: &Path, sub: &str) -> Result<Vec<String>, CliError> {
    let text = std::fs::read_to_string(path).map_err(|e| CliError::Usage(format!("cannot read config {}: {e}", path.display())))?;
    let sections = parse_config(&text).map_err(CliError::Usage)?;
    let root = Cli::command();
    let known = |name: &str| -> Option<Vec<String>> {
        let sc = root.find_subcommand(name)?;
        Some(sc.get_arguments().chain(root.get_arguments()).filter_map(|a| a.get_long().map(String::from)).collect())
    };
    let mut flags = Vec::new();
    for (section, entries) in &sections {
        let target = if section.is_empty() { sub } else { section.as_str() };
        let accepted = known(target).ok_or_else(|| CliError::Usage(format!("config section [{section}] is not a subcommand")))?;
        for (k, v) in entries {
            if k == "config" || !accepted.contains(k) {
                return Err(CliError::Usage(format!("unknown config key `{k}` for {target}")));
            }
            if target == sub {
                if v == "true" && is_switch(sub, k) {
                    flags.push(format!("--{k}"));
                } else if v != "false" || !is_switch(sub, k) {
                    flags.push(format!("--{k}={v}"));
                }
            }
        }
    }
    Ok(flags)
}

fn is_switch(sub: &str, long: &str) -> bool {
    let root = Cli::command();
    root.find_subcommand(sub)
        .and_then(|sc| sc.get_arguments().find(|a| a.get_long() == Some(long)).map(|a| !a.get_action().takes_values()))
        .unwrap_or(false)
}

fn subcommand_help(sub: &str) -> String {
    let mut root = Cli::command();
    root.build();
    root.find_subcommand_mut(sub).map(|sc| sc.render_help().to_string()).unwrap_or_default()
}

/// Runs the command line `argv` (including the program name) and returns the exit code.
pub fn run<I, S>(argv: I) -> i32
where
    I: IntoIterator<Item = S>,
    S: Into<String>,
{
    let argv: Vec<String> = argv.into_iter().map(Into::into).collect();
    let cli = match parse_with_config(&argv) {
        Ok(cli) => cli,
        Err(e) => return e,
    };
    let sub = cli.command.name();
    let mut pool = rayon::ThreadPoolBuilder::new();
    if let Some(n) = cli.threads {
        pool = pool.num_threads(n);
    }
    let result = match pool.build() {
        Ok(pool) => pool.install(|| execute(&cli.command)),
        Err(e) => Err(CliError::Usage(format!("cannot start {:?} worker threads: {e}", cli.threads))),
    };
    match result.and_then(|out| emit(&cli.command, &out).map(|_| out)) {
        Ok(out) => {
            eprintln!("{}", json!({ "subcommand": sub, "pass": out.pass, "summary": out.summary }));
            if out.pass {
                0
            } else {
                1
            }
        }
        Err(e) => {
            eprintln!("error: {e}");
            let code = e.exit_code();
            if code == 2 {
                eprintln!("{}", subcommand_help(sub));
            }
            code
        }
    }
}

fn parse_with_config(argv: &[String]) -> Result<Cli, i32> {
    let first = Cli::try_parse_from(argv).map_err(|e| {
        let _ = e.print();
        if e.use_stderr() {
            2
        } else {
            0
        }
    })?;
    let Some(path) = &first.config else { return Ok(first) };
    let sub = first.command.name();
    let flags = config_flags(path, sub).map_err(|e| {
        eprintln!("error: {e}");
        eprintln!("{}", subcommand_help(sub));
        e.exit_code()
    })?;
    let pos = argv.iter().position(|a| a == sub).expect("subcommand parsed");
    let mut merged: Vec<String> = argv[..=pos].to_vec();
    merged.extend(flags);
    merged.extend(argv[pos + 1..].iter().cloned());
    Cli::try_parse_from(&merged).map_err(|e| {
        let _ = e.print();
        2
    })
}

fn emit(cmd: &Command, out: &RunOutput) -> Result<(), CliError> {
    let o = cmd.out();
    let text = match o.format {
        Format::Csv => out.table.render(),
        Format::Json => {
            let doc = json!({ "subcommand": cmd.name(), "summary": out.summary, "pass": out.pass, "rows": table_records(&out.table) });
            let mut s = serde_json::to_string_pretty(&doc).expect("json");
            s.push('\n');
            s
        }
    };
    match &o.output {
        Some(path) => write_atomic(path, &text)?,
        None => print!("{text}"),
    }
    Ok(())
}

/// Rows as objects keyed by the header; finite numbers and booleans are typed.
pub fn table_records(t: &CsvTable) -> Vec<Value> {
    t.rows
        .iter()
        .map(|row| {
            let mut m = Map::new();
            for (h, cell) in t.header.iter().zip(row) {
                let v = match cell.as_str() {
                    "true" => Value::Bool(true),
                    "false" => Value::Bool(false),
                    s => s
                        .parse::<f64>()
                        .ok()
                        .and_then(serde_json::Number::from_f64)
                        .map(|n| if let Ok(i) = s.parse::<i64>() { Value::from(i) } else { Value::Number(n) })
                        .unwrap_or_else(|| Value::String(s.to_string())),
                };
                m.insert(h.clone(), v);
            }
            Value::Object(m)
        })
        .collect()
}

fn params(model: &ModelArgs, two_j: u32, window: Window) -> Result<ModelParams, Error> {
    make_params(two_j, model.delta, model.r, window)
}

fn parse_pair(s: &str) -> Result<(i64, u16), CliError> {
    let bad = || CliError::Usage(format!("occupation must be `site:n` (got `{s}`)"));
    let (x, n) = s.split_once(':').ok_or_else(bad)?;
    Ok((x.trim().parse().map_err(|_| bad())?, n.trim().parse().map_err(|_| bad())?))
}

fn parse_vector(s: &str) -> Result<(i64, [f64; 3]), CliError> {
    let bad = || CliError::Usage(format!("vector must be `site:v1:v2:v3` (got `{s}`)"));
    let parts: Vec<&str> = s.split(':').map(str::trim).collect();
    if parts.len() != 4 {
        return Err(bad());
    }
    let x = parts[0].parse().map_err(|_| bad())?;
    let mut v = [0.0; 3];
    for (slot, p) in v.iter_mut().zip(&parts[1..]) {
        *slot = p.parse().map_err(|_| bad())?;
    }
    Ok((x, v))
}

fn kink_site(r: f64) -> i64 {
    r.floor() as i64
}

fn execute(cmd: &Command) -> Result<RunOutput, CliError> {
    match cmd {
        Command::Jacobi { model, window, k, .. } => {
            let p = params(model, 1, window.resolve(Window::symmetric(60)?)?)?;
            let rep = spectral_report(&p, *k, false)?;
            let summary = json!({ "gap": rep.gap, "continuum_edge": rep.continuum_edge, "n_isolated": rep.isolated_below_edge.len() });
            Ok(RunOutput { table: spectral_report_csv(&p, &rep), summary, pass: true })
        }
        Command::PhaseDiagram { delta_inv, r_grid, window, k, .. } => {
            let cells = phase_diagram(delta_inv, r_grid, window.resolve(Window::symmetric(60)?)?, *k)?;
            let failed = cells.iter().filter(|c| c.result.is_err()).count();
            Ok(RunOutput { table: phase_diagram_csv(&cells, *k), summary: json!({ "cells": cells.len(), "failed": failed }), pass: true })
        }
        Command::SpinGap { model, two_j, window, m2, .. } => {
            let p = params(model, *two_j, window.resolve(Window::new(-2, 3)?)?)?;
            let sectors = if m2.is_empty() { vec![MRule::Pinned.m2(&p)] } else { m2.clone() };
            let rows = sectors.iter().map(|&m| sector_gap(&p, m)).collect::<Result<Vec<_>, _>>()?;
            let summary = json!({ "gaps": rows.iter().map(|g| g.gap).collect::<Vec<_>>() });
            Ok(RunOutput { table: sector_gap_csv(&rows), summary, pass: true })
        }
        Command::GroundstateCheck { model, two_j, window, m2, .. } => {
            let p = params(model, *two_j, window.resolve(Window::new(-2, 3)?)?)?;
            let sectors = if m2.is_empty() { admissible_m2(p.window, p.two_j) } else { m2.clone() };
            let mut t = CsvTable::new(["M", "dim", "residual", "max_diag", "pass"]);
            let mut worst: f64 = 0.0;
            let mut passed = 0;
            for &m in &sectors {
                let g = ground_state_check(&p, m)?;
                let ok = g.residual <= GROUND_TOL * g.max_diag.max(1.0);
                passed += ok as usize;
                worst = worst.max(g.residual);
                t.push(vec![
                    crate::spin::hamiltonian::format_m(m),
                    g.dim.to_string(),
                    crate::output::fmt_f64(g.residual),
                    crate::output::fmt_f64(g.max_diag),
                    ok.to_string(),
                ]);
            }
            let summary = json!({ "sectors": sectors.len(), "passed": passed, "max_residual": worst });
            Ok(RunOutput { table: t, summary, pass: passed == sectors.len() })
        }
        Command::BosonCompare { model, two_j, window, spectrum, n_cap, sectors, k, .. } => {
            let p = params(model, *two_j, window.resolve(Window::new(-1, 2)?)?)?;
            if *spectrum {
                let cap = n_cap.unwrap_or(*two_j as usize);
                let secs: Vec<Option<usize>> = sectors.iter().map(|&n| Some(n)).collect();
                let table = boson_spectrum_csv(&p, cap, &secs, *k)?;
                return Ok(RunOutput { table, summary: json!({ "n_cap": cap }), pass: true });
            }
            let c = boson_compare(&p)?;
            let pass = c.total_diff <= RECONSTRUCTION_TOL && c.site_operator_diff <= RECONSTRUCTION_TOL;
            Ok(RunOutput { table: operator_difference_csv(&c), summary: serde_json::to_value(&c).expect("json"), pass })
        }
        Command::Bounds { seed, samples, n_j, n, two_j, model, window, .. } => {
            let configs: Vec<SuiteConfig> = match n_j {
                Some(n_j) => {
                    let w = window.resolve(Window::new(-2, 2)?)?;
                    vec![SuiteConfig {
                        two_j: *two_j,
                        delta: model.delta,
                        r: model.r,
                        window: (w.a, w.b),
                        n_j: *n_j,
                        n: *n,
                        samples: *samples,
                    }]
                }
                None => bound_suite_configs().into_iter().map(|c| SuiteConfig { samples: *samples, ..c }).collect(),
            };
            let reports = bound_suite(&configs, *seed)?;
            let s = SuiteSummary::from_reports("bounds", &reports);
            let pass = s.failed == 0;
            Ok(RunOutput { table: bound_reports_csv(&reports), summary: serde_json::to_value(&s).expect("json"), pass })
        }
        Command::Converge { model, two_j, window, occupation, .. } => {
            let p = params(model, two_j[0], window.resolve(Window::symmetric(8)?)?)?;
            let occ = if occupation.is_empty() {
                vec![(kink_site(model.r), 1)]
            } else {
                occupation.iter().map(|s| parse_pair(s)).collect::<Result<_, _>>()?
            };
            let rows = strong_convergence_residual(&p, two_j, &occ)?;
            let js: Vec<f64> = rows.iter().map(|r| r.two_j as f64 / 2.0).collect();
            let ys: Vec<f64> = rows.iter().map(|r| r.residual_h).collect();
            let exponent = if rows.len() >= 2 && ys.iter().all(|&y| y > 0.0) { decay_exponent(&js, &ys) } else { f64::NAN };
            let pass = rows.iter().all(|r| r.within_bounds());
            let summary = json!({ "decay_exponent": finite_or_null(exponent), "within_bounds": pass });
            Ok(RunOutput { table: strong_convergence_csv(&rows), summary, pass })
        }
        Command::Concentrate { model, two_j, window, level, h, .. } => {
            let p = params(model, two_j[0], window.resolve(Window::symmetric(2)?)?)?;
            let lvl = if *level == 0 { ConcentrationLevel::Vacuum } else { ConcentrationLevel::OneParticle(*level) };
            let energy = match lvl {
                ConcentrationLevel::Vacuum => 0.0,
                ConcentrationLevel::OneParticle(k) => {
                    let rep = spectral_report(&p, p.window.len(), false)?;
                    *rep.eigenvalues.get(k).ok_or_else(|| Error::InvalidParameter(format!("level {k} exceeds the window")))?
                }
            };
            let mut schedule = default_schedule(two_j, energy + 0.1);
            if let Some(h) = h {
                schedule.iter_mut().for_each(|s| s.h_j = *h);
            }
            let rep = spectral_concentration_check(&p, lvl, &schedule)?;
            let disagree = rep.rows.iter().filter(|r| r.status == CountStatus::Disagree).count();
            let untestable = rep.rows.iter().filter(|r| r.status == CountStatus::Untestable).count();
            let pass = rep.n_e_bound_holds && disagree == 0;
            let summary = json!({
                "energy": rep.energy,
                "n_e": rep.n_e,
                "n_e_bound_holds": rep.n_e_bound_holds,
                "exponent_full": finite_or_null(rep.exponent_full),
                "exponent_kin_dyn": finite_or_null(rep.exponent_kin_dyn),
                "disagree": disagree,
                "untestable": untestable,
            });
            Ok(RunOutput { table: concentration_csv(&rep), summary, pass })
        }
        Command::Pinned { model, two_j, window, e_max, h, .. } => {
            let p = params(model, two_j[0], window.resolve(Window::symmetric(2)?)?)?;
            let e_max = e_max.unwrap_or(0.9 * 2.0 * (1.0 - p.delta_inv()));
            let schedule: Vec<PinSchedule> = default_schedule(two_j, e_max)
                .into_iter()
                .map(|s| PinSchedule { h_j: h.unwrap_or(s.h_j), ..s })
                .collect();
            let rows = pinned_spectrum_convergence(&p, e_max, &schedule)?;
            let d: Vec<f64> = rows.iter().map(|r| r.hausdorff).collect();
            let non_increasing = d.windows(2).all(|w| w[1] <= w[0] + 1e-12);
            let summary = json!({ "e_max": e_max, "hausdorff": d.iter().map(|&x| finite_or_null(x)).collect::<Vec<_>>(), "non_increasing": non_increasing });
            Ok(RunOutput { table: pinned_csv(&rows), summary, pass: non_increasing })
        }
        Command::Conjecture { model, two_j, window, m2, band, .. } => {
            let p = params(model, two_j[0], window.resolve(Window::new(-2, 3)?)?)?;
            let rule = m2.map_or(MRule::Pinned, MRule::Fixed);
            let rows = conjecture_trend(&p, two_j, rule)?;
            let v = trend_verdict(&rows, *band);
            Ok(RunOutput { table: conjecture_csv(&rows), summary: serde_json::to_value(&v).expect("json"), pass: v.pass })
        }
        Command::Clt { model, two_j, window, vector, .. } => {
            let p = params(model, two_j[0], window.resolve(Window::symmetric(2)?)?)?;
            let fields: Vec<Vec<(i64, [f64; 3])>> = if vector.is_empty() {
                let x = kink_site(model.r);
                [[0.3, 0.2, 0.1], [0.0, 0.4, 0.2], [0.25, -0.1, 0.3]].iter().map(|v| vec![(x, *v)]).collect()
            } else {
                vector.iter().map(|s| parse_vector(s).map(|f| vec![f])).collect::<Result<_, _>>()?
            };
            let rows = clt_sweep(&p, two_j, &fields)?;
            let worst = rows.iter().map(|r| r.abs_err).fold(0.0, f64::max);
            Ok(RunOutput { table: clt_csv(&rows), summary: json!({ "max_abs_err": worst }), pass: true })
        }
    }
}

fn finite_or_null(x: f64) -> Value {
    if x.is_finite() {
        json!(x)
    } else {
        Value::Null
    }
}
