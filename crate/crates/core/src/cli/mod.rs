//! The `blowup-lab` batch front end.
//!
//! `blowup-lab <command> [--config FILE] [--key value ...]` where every key of
//! the job file is also a flag. Exit status: 0 on success, 1 when `validate`
//! reports a FAIL row, 2 for configuration errors, 3 for numerical failures.

pub mod config;
pub mod output;

use std::fs;
use std::io::Write;

use clap::{Arg, ArgAction};

use crate::barrier::{bridge_crossing, bm_crossing_finite, bm_crossing_infinite, BridgePin, Horizon, LinearBarrier};
use crate::cdf::{blowup_cdf_curve, Regime};
use crate::error::Error;
use crate::monte_carlo::mc_blowup_cdf_curve;

pub use config::{Command, ConfigError, CrossingSpec, JobConfig, Origin, OutputFormat, RawConfig, KEYS};
use output::{Cell, Table};

pub const EXIT_OK: i32 = 0;
pub const EXIT_VALIDATION_FAILED: i32 = 1;
pub const EXIT_CONFIG: i32 = 2;
pub const EXIT_NUMERIC: i32 = 3;

/// Discrepancies beyond this many standard errors fail `validate`.
pub const VALIDATION_Z: f64 = 3.0;

pub const CDF_COLUMNS: &[&str] = &["r", "probability", "regime", "quad_error"];
pub const SIMULATE_COLUMNS: &[&str] = &["r", "estimate", "std_error", "ci_lo", "ci_hi", "n_paths", "dt", "seed"];
pub const VALIDATE_COLUMNS: &[&str] = &["r", "analytic", "mc_estimate", "mc_std_error", "z_score", "verdict"];
pub const CROSSING_COLUMNS: &[&str] = &["r", "probability", "formula"];

/// Short spellings accepted besides the dotted keys.
const FLAG_ALIASES: &[(&str, &str)] = &[
    ("r-from", "r.from"),
    ("r-to", "r.to"),
    ("r-steps", "r.steps"),
    ("out", "output"),
];

/// A failure of one output row.
#[derive(Debug, Clone, PartialEq)]
pub struct RowError {
    pub row: usize,
    pub r: f64,
    pub error: Error,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunReport {
    pub table: Table,
    pub failures: Vec<RowError>,
    pub validation_failed: bool,
    pub notes: Vec<String>,
}

impl RunReport {
    pub fn exit_code(&self) -> i32 {
        if !self.failures.is_empty() {
            EXIT_NUMERIC
        } else if self.validation_failed {
            EXIT_VALIDATION_FAILED
        } else {
            EXIT_OK
        }
    }
}

/// Computes the table for `job` without writing it anywhere.
pub fn run(job: &JobConfig) -> RunReport {
    match job.command {
        Command::Crossing => run_crossing(job),
        Command::Cdf => run_cdf(job),
        Command::Simulate => run_simulate(job),
        Command::Validate => run_validate(job),
    }
}

fn whole_job_failure(columns: &'static [&'static str], job: &JobConfig, error: Error) -> RunReport {
    RunReport {
        table: Table::new(columns),
        failures: vec![RowError {
            row: 0,
            r: job.r_grid[0],
            error,
        }],
        validation_failed: false,
        notes: Vec::new(),
    }
}

fn run_crossing(job: &JobConfig) -> RunReport {
    let mut report = RunReport {
        table: Table::new(CROSSING_COLUMNS),
        failures: Vec::new(),
        validation_failed: false,
        notes: Vec::new(),
    };
    let Some(spec) = job.crossing else {
        return whole_job_failure(CROSSING_COLUMNS, job, Error::Domain("crossing needs crossing.a and crossing.b".into()));
    };
    for (i, &r) in job.r_grid.iter().enumerate() {
        match crossing_row(&spec, r) {
            Ok((p, formula)) => report.table.push(vec![Cell::Real(r), Cell::Real(p), Cell::Text(formula.into())]),
            Err(error) => report.failures.push(RowError { row: i + 1, r, error }),
        }
    }
    report
}

fn crossing_row(spec: &CrossingSpec, r: f64) -> crate::Result<(f64, &'static str)> {
    let horizon = Horizon::new(r)?;
    match spec.pin {
        None => {
            let barrier = LinearBarrier::plus(spec.a, spec.b)?;
            if horizon.is_finite() {
                Ok((bm_crossing_finite(&barrier, horizon)?.value(), "bm_finite"))
            } else {
                Ok((bm_crossing_infinite(&barrier)?.value(), "bm_infinite"))
            }
        }
        Some((t, x)) => {
            let barrier = LinearBarrier::minus(spec.a, spec.b)?;
            let pin = BridgePin::new(t, x)?;
            let formula = if !horizon.is_finite() {
                "bridge_infinite"
            } else if r < t {
                "bridge_before_pin"
            } else if r == t {
                "bridge_at_pin"
            } else {
                "bridge_after_pin"
            };
            Ok((bridge_crossing(&barrier, horizon, &pin)?.value(), formula))
        }
    }
}

fn run_cdf(job: &JobConfig) -> RunReport {
    let mut report = RunReport {
        table: Table::new(CDF_COLUMNS),
        failures: Vec::new(),
        validation_failed: false,
        notes: Vec::new(),
    };
    // τ > 0 almost surely, so the distribution function vanishes at 0.
    let skip = usize::from(job.r_grid[0] == 0.0);
    if skip == 1 {
        report.table.push(vec![
            Cell::Real(0.0),
            Cell::Real(0.0),
            Cell::Text(Regime::BeforeT.label().into()),
            Cell::Real(0.0),
        ]);
        report.notes.push("r = 0 reported as probability 0 by convention (the blow-up time is positive)".into());
    }
    let grid = &job.r_grid[skip..];
    let curve = match blowup_cdf_curve(grid, &job.model, &job.g, &job.quad) {
        Ok(c) => c,
        Err(e) => return whole_job_failure(CDF_COLUMNS, job, e),
    };
    for (i, (point, &r)) in curve.into_iter().zip(grid).enumerate() {
        match point {
            Ok(p) => report.table.push(vec![
                Cell::Real(p.r),
                Cell::Real(p.probability.value()),
                Cell::Text(p.regime.label().into()),
                Cell::Real(p.quadrature_error),
            ]),
            Err(error) => report.failures.push(RowError { row: i + 1 + skip, r, error }),
        }
    }
    report
}

fn run_simulate(job: &JobConfig) -> RunReport {
    let mut report = RunReport {
        table: Table::new(SIMULATE_COLUMNS),
        failures: Vec::new(),
        validation_failed: false,
        notes: Vec::new(),
    };
    let results = match mc_blowup_cdf_curve(&job.r_grid, &job.model, &job.g, &job.mc) {
        Ok(r) => r,
        Err(e) => return whole_job_failure(SIMULATE_COLUMNS, job, e),
    };
    for res in results {
        report.table.push(vec![
            Cell::Real(res.r),
            Cell::Real(res.estimate.value()),
            Cell::Real(res.std_error),
            Cell::Real(res.ci95.0),
            Cell::Real(res.ci95.1),
            Cell::Int(res.n_paths),
            Cell::Real(res.dt),
            Cell::Int(res.seed),
        ]);
    }
    report
}

/// `(mc - analytic) / se`, with the standard error floored at `1/n` so that
/// an estimate of exactly 0 or 1 is judged against one path's resolution.
pub fn validation_z_score(analytic: f64, mc_estimate: f64, mc_std_error: f64, n_paths: u64) -> f64 {
    (mc_estimate - analytic) / mc_std_error.max(1.0 / n_paths as f64)
}

fn run_validate(job: &JobConfig) -> RunReport {
    let mut report = RunReport {
        table: Table::new(VALIDATE_COLUMNS),
        failures: Vec::new(),
        validation_failed: false,
        notes: Vec::new(),
    };
    let analytic = match blowup_cdf_curve(&job.r_grid, &job.model, &job.g, &job.quad) {
        Ok(c) => c,
        Err(e) => return whole_job_failure(VALIDATE_COLUMNS, job, e),
    };
    let simulated = match mc_blowup_cdf_curve(&job.r_grid, &job.model, &job.g, &job.mc) {
        Ok(r) => r,
        Err(e) => return whole_job_failure(VALIDATE_COLUMNS, job, e),
    };
    for (i, (point, sim)) in analytic.into_iter().zip(simulated).enumerate() {
        match point {
            Ok(p) => {
                let a = p.probability.value();
                let z = validation_z_score(a, sim.estimate.value(), sim.std_error, sim.n_paths);
                let pass = z.abs() <= VALIDATION_Z;
                report.validation_failed |= !pass;
                report.table.push(vec![
                    Cell::Real(sim.r),
                    Cell::Real(a),
                    Cell::Real(sim.estimate.value()),
                    Cell::Real(sim.std_error),
                    Cell::Real(z),
                    Cell::Text(if pass { "PASS" } else { "FAIL" }.into()),
                ]);
            }
            Err(error) => report.failures.push(RowError {
                row: i + 1,
                r: sim.r,
                error,
            }),
        }
    }
    report
}

fn cli() -> clap::Command {
    let mut cmd = clap::Command::new("blowup-lab")
        .about("Explosion-time distribution of the anticipating stochastic Paris law")
        .arg(
            Arg::new("command")
                .value_parser(Command::ALL.map(|c| c.name()))
                .help("crossing, cdf, simulate or validate; defaults to the job file's `command`"),
        )
        .arg(Arg::new("config").long("config").value_name("FILE").help("key = value job file"))
        .arg(
            Arg::new("dump-config")
                .long("dump-config")
                .action(ArgAction::SetTrue)
                .help("print the resolved job file and exit"),
        );
    for key in KEYS.iter().filter(|k| **k != "command") {
        let mut arg = Arg::new(*key).long(*key).value_name("VALUE").allow_hyphen_values(true);
        for (alias, target) in FLAG_ALIASES {
            if target == key {
                arg = arg.visible_alias(*alias);
            }
        }
        cmd = cmd.arg(arg);
    }
    cmd
}

/// Entry point shared by the binary and the tests; returns the exit status.
pub fn main_with_args<I, S>(args: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = S>,
    S: Into<std::ffi::OsString> + Clone,
{
    let matches = match cli().try_get_matches_from(args) {
        Ok(m) => m,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_CONFIG } else { EXIT_OK };
            let _ = if e.use_stderr() {
                write!(stderr, "{}", e.render())
            } else {
                write!(stdout, "{}", e.render())
            };
            return code;
        }
    };
    let command = matches.get_one::<String>("command").and_then(|s| Command::parse(s));

    let mut raw = match matches.get_one::<String>("config") {
        None => RawConfig::default(),
        Some(path) => match fs::read_to_string(path) {
            Ok(text) => match RawConfig::parse_text(&text) {
                Ok(raw) => raw,
                Err(e) => return config_failure(stderr, path, &e),
            },
            Err(e) => {
                let _ = writeln!(stderr, "cannot read config {path}: {e}");
                return EXIT_CONFIG;
            }
        },
    };
    let mut flags = RawConfig::default();
    for key in KEYS.iter().filter(|k| **k != "command") {
        if let Some(value) = matches.get_one::<String>(key) {
            if let Err(e) = flags.set(key, value, Origin::Flag) {
                return config_failure(stderr, "flags", &e);
            }
        }
    }
    if let Err(e) = raw.overlay(flags) {
        return config_failure(stderr, "flags", &e);
    }
    let job = match raw.build(command) {
        Ok(job) => job,
        Err(e) => return config_failure(stderr, matches.get_one::<String>("config").map(String::as_str).unwrap_or("flags"), &e),
    };

    if matches.get_flag("dump-config") {
        let _ = write!(stdout, "{}", job.dump());
        return EXIT_OK;
    }

    let report = run(&job);
    for note in &report.notes {
        let _ = writeln!(stderr, "note: {note}");
    }
    for f in &report.failures {
        let _ = writeln!(stderr, "row {} (r = {}): {}", f.row, f.r, f.error);
    }
    let written = if job.output == "-" {
        report.table.write(job.format, stdout)
    } else {
        fs::File::create(&job.output).and_then(|mut file| {
            report.table.write(job.format, &mut file)?;
            file.flush()
        })
    };
    if let Err(e) = written {
        let _ = writeln!(stderr, "cannot write {}: {e}", job.output);
        return EXIT_NUMERIC.max(report.exit_code());
    }
    report.exit_code()
}

fn config_failure(stderr: &mut dyn Write, source: &str, e: &ConfigError) -> i32 {
    let _ = writeln!(stderr, "{source}: {e}");
    EXIT_CONFIG
}
