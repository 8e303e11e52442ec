//! Flat `key = value` job files with dotted section prefixes.
//!
//! ```text
//! # comment
//! command = cdf
//! model.c1 = 1
//! g.kind = exponential
//! g.scale = 1
//! g.rate = 1
//! r = 0.5, 1, 2
//! ```
//!
//! Command-line flags use the same keys (`--model.c1 1`) and override the
//! file. [`JobConfig::dump`] writes a file that parses back to the same job.

use std::collections::BTreeMap;
use std::fmt;

use crate::cdf::QuadratureConfig;
use crate::model::{InitialCondition, ModelParams};
use crate::monte_carlo::McConfig;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Command {
    Crossing,
    Cdf,
    Simulate,
    Validate,
}

impl Command {
    pub const ALL: [Command; 4] = [Command::Crossing, Command::Cdf, Command::Simulate, Command::Validate];

    pub fn name(&self) -> &'static str {
        match self {
            Command::Crossing => "crossing",
            Command::Cdf => "cdf",
            Command::Simulate => "simulate",
            Command::Validate => "validate",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        Self::ALL.into_iter().find(|c| c.name() == s)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OutputFormat {
    Csv,
    Jsonl,
}

impl OutputFormat {
    pub fn name(&self) -> &'static str {
        match self {
            OutputFormat::Csv => "csv",
            OutputFormat::Jsonl => "jsonl",
        }
    }
}

/// Explicit barrier for the `crossing` command: `a + b t` for free Brownian
/// motion, or `a - b t` for the bridge pinned at `(pin_time, pin_value)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CrossingSpec {
    pub a: f64,
    pub b: f64,
    pub pin: Option<(f64, f64)>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct JobConfig {
    pub command: Command,
    pub model: ModelParams,
    pub g: InitialCondition,
    pub r_grid: Vec<f64>,
    pub quad: QuadratureConfig,
    pub mc: McConfig,
    pub crossing: Option<CrossingSpec>,
    /// `-` for standard output.
    pub output: String,
    pub format: OutputFormat,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Origin {
    Line(usize),
    Flag,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ConfigError {
    pub origin: Option<Origin>,
    pub field: String,
    pub message: String,
}

impl fmt::Display for ConfigError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.origin {
            Some(Origin::Line(n)) => write!(f, "config error at line {n}, field `{}`: {}", self.field, self.message),
            Some(Origin::Flag) => write!(f, "config error in flag --{}: {}", self.field, self.message),
            None => write!(f, "config error, field `{}`: {}", self.field, self.message),
        }
    }
}

impl std::error::Error for ConfigError {}

/// Every accepted key, in dump order.
pub const KEYS: &[&str] = &[
    "command",
    "model.c1",
    "model.c2",
    "model.p",
    "model.T",
    "g.kind",
    "g.l0",
    "g.scale",
    "g.rate",
    "g.slope",
    "g.offset",
    "g.floor",
    "g.knots",
    "r",
    "r.from",
    "r.to",
    "r.steps",
    "quad.sigmas",
    "quad.tol",
    "quad.max_refinements",
    "mc.paths",
    "mc.dt",
    "mc.seed",
    "mc.bridge_correction",
    "crossing.a",
    "crossing.b",
    "crossing.pin_time",
    "crossing.pin_value",
    "output",
    "format",
];

/// Raw values with where they came from; later sources replace earlier ones.
#[derive(Debug, Clone, Default)]
pub struct RawConfig {
    entries: BTreeMap<String, (String, Origin)>,
}

impl RawConfig {
    pub fn parse_text(text: &str) -> Result<Self, ConfigError> {
        let mut raw = RawConfig::default();
        for (i, line) in text.lines().enumerate() {
            let n = i + 1;
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let Some((key, value)) = line.split_once('=') else {
                return Err(ConfigError {
                    origin: Some(Origin::Line(n)),
                    field: line.to_string(),
                    message: "expected `key = value`".into(),
                });
            };
            let key = key.trim();
            if raw.entries.contains_key(key) {
                return Err(ConfigError {
                    origin: Some(Origin::Line(n)),
                    field: key.into(),
                    message: "key given twice".into(),
                });
            }
            raw.set(key, value.trim(), Origin::Line(n))?;
        }
        Ok(raw)
    }

    pub fn set(&mut self, key: &str, value: &str, origin: Origin) -> Result<(), ConfigError> {
        if !KEYS.contains(&key) {
            return Err(ConfigError {
                origin: Some(origin),
                field: key.into(),
                message: "unknown key".into(),
            });
        }
        // An explicit list and a range are alternatives; the later one wins.
        if key == "r" {
            for k in ["r.from", "r.to", "r.steps"] {
                self.entries.remove(k);
            }
        } else if key.starts_with("r.") {
            self.entries.remove("r");
        }
        self.entries.insert(key.into(), (value.into(), origin));
        Ok(())
    }

    /// Applies every entry of `other` on top of `self`.
    pub fn overlay(&mut self, other: RawConfig) -> Result<(), ConfigError> {
        for (k, (v, o)) in other.entries {
            self.set(&k, &v, o)?;
        }
        Ok(())
    }

    fn get(&self, key: &str) -> Option<(&str, Origin)> {
        self.entries.get(key).map(|(v, o)| (v.as_str(), *o))
    }

    fn error(&self, key: &str, message: impl Into<String>) -> ConfigError {
        ConfigError {
            origin: self.get(key).map(|(_, o)| o),
            field: key.into(),
            message: message.into(),
        }
    }

    fn real(&self, key: &str, default: Option<f64>, check: impl Fn(f64) -> bool, rule: &str) -> Result<f64, ConfigError> {
        let v = match self.get(key) {
            None => default.ok_or_else(|| self.error(key, "required"))?,
            Some((s, _)) => parse_real(s).ok_or_else(|| self.error(key, format!("`{s}` is not a number")))?,
        };
        if check(v) {
            Ok(v)
        } else {
            Err(self.error(key, format!("{v} is invalid: {rule}")))
        }
    }

    fn opt_real(&self, key: &str) -> Result<Option<f64>, ConfigError> {
        match self.get(key) {
            None => Ok(None),
            Some(_) => self.real(key, None, f64::is_finite, "must be finite").map(Some),
        }
    }

    fn integer(&self, key: &str, default: u64) -> Result<u64, ConfigError> {
        match self.get(key) {
            None => Ok(default),
            Some((s, _)) => parse_integer(s).ok_or_else(|| self.error(key, format!("`{s}` is not a non-negative integer"))),
        }
    }

    pub fn build(&self, command_override: Option<Command>) -> Result<JobConfig, ConfigError> {
        let command = match (command_override, self.get("command")) {
            (Some(c), _) => c,
            (None, Some((s, _))) => Command::parse(s).ok_or_else(|| {
                self.error("command", format!("`{s}` is not one of crossing, cdf, simulate, validate"))
            })?,
            (None, None) => return Err(self.error("command", "required")),
        };

        let positive = |v: f64| v > 0.0 && v.is_finite();
        let c1 = self.real("model.c1", Some(1.0), positive, "must be positive")?;
        let c2 = self.real("model.c2", Some(1.0), positive, "must be positive")?;
        let p = self.real("model.p", Some(2.0), |v| v > 1.0 && v.is_finite(), "must exceed 1")?;
        let t = self.real("model.T", Some(1.0), positive, "must be positive")?;
        let model = ModelParams::new(c1, c2, p, t).map_err(|e| self.error("model", e.to_string()))?;

        let g = self.initial_condition()?;
        let r_grid = self.r_grid(command)?;

        let quad = QuadratureConfig {
            truncation_sigmas: self.real("quad.sigmas", Some(8.0), |v| v >= 4.0 && v.is_finite(), "must be at least 4")?,
            abs_tol: self.real("quad.tol", Some(1e-9), positive, "must be positive")?,
            max_refinements: {
                let v = self.integer("quad.max_refinements", 20)?;
                if v == 0 || v > 60 {
                    return Err(self.error("quad.max_refinements", "must be between 1 and 60"));
                }
                v as u32
            },
        };

        let defaults = McConfig::default();
        let mc = McConfig {
            n_paths: self.integer("mc.paths", defaults.n_paths)?,
            dt: self.real("mc.dt", Some(defaults.dt), positive, "must be positive")?,
            seed: self.integer("mc.seed", defaults.seed)?,
            bridge_correction: match self.get("mc.bridge_correction") {
                None => defaults.bridge_correction,
                Some((s, _)) => parse_bool(s)
                    .ok_or_else(|| self.error("mc.bridge_correction", format!("`{s}` is not true or false")))?,
            },
        };
        mc.validate().map_err(|e| self.error("mc.paths", e.to_string()))?;

        let crossing = self.crossing(command)?;

        let output = self.get("output").map(|(s, _)| s.to_string()).unwrap_or_else(|| "-".into());
        if output.is_empty() {
            return Err(self.error("output", "must be a path or -"));
        }
        let format = match self.get("format") {
            None | Some(("csv", _)) => OutputFormat::Csv,
            Some(("jsonl", _)) => OutputFormat::Jsonl,
            Some((s, _)) => return Err(self.error("format", format!("`{s}` is not csv or jsonl"))),
        };

        Ok(JobConfig {
            command,
            model,
            g,
            r_grid,
            quad,
            mc,
            crossing,
            output,
            format,
        })
    }

    fn initial_condition(&self) -> Result<InitialCondition, ConfigError> {
        let positive = |v: f64| v > 0.0 && v.is_finite();
        let finite = f64::is_finite;
        let kind = self.get("g.kind").map(|(s, _)| s).unwrap_or("constant");
        let g = match kind {
            "constant" => InitialCondition::Constant {
                l0: self.real("g.l0", Some(1.0), positive, "must be positive")?,
            },
            "exponential" => InitialCondition::Exponential {
                scale: self.real("g.scale", Some(1.0), positive, "must be positive")?,
                rate: self.real("g.rate", None, finite, "must be finite")?,
            },
            "affine_clamped" => InitialCondition::AffineClamped {
                slope: self.real("g.slope", None, finite, "must be finite")?,
                offset: self.real("g.offset", None, finite, "must be finite")?,
                floor: self.real("g.floor", None, positive, "must be positive")?,
            },
            "table" => {
                let (s, _) = self.get("g.knots").ok_or_else(|| self.error("g.knots", "required for g.kind = table"))?;
                let knots = parse_knots(s).ok_or_else(|| self.error("g.knots", format!("`{s}` is not a list of x:y pairs")))?;
                InitialCondition::table(knots).map_err(|e| self.error("g.knots", e.to_string()))?
            }
            other => {
                return Err(self.error(
                    "g.kind",
                    format!("`{other}` is not one of constant, exponential, affine_clamped, table"),
                ))
            }
        };
        g.validated().map_err(|e| self.error("g.kind", e.to_string()))
    }

    fn r_grid(&self, command: Command) -> Result<Vec<f64>, ConfigError> {
        // Only the crossing command has a meaning for an infinite horizon, and
        // only cdf reports the conventional value at r = 0.
        let allow_inf = command == Command::Crossing;
        let allow_zero = command == Command::Cdf;
        let grid = if let Some((s, _)) = self.get("r") {
            let values: Option<Vec<f64>> = s.split(',').map(|v| parse_real(v.trim())).collect();
            let values = values.ok_or_else(|| self.error("r", format!("`{s}` is not a comma-separated list of numbers")))?;
            if values.is_empty() {
                return Err(self.error("r", "empty list"));
            }
            (values, "r")
        } else if self.get("r.from").is_some() || self.get("r.to").is_some() || self.get("r.steps").is_some() {
            let from = self.real("r.from", None, |v| v >= 0.0 && v.is_finite(), "must be non-negative")?;
            let to = self.real("r.to", None, |v| v > from && v.is_finite(), "must exceed r.from")?;
            let steps = self.integer("r.steps", 0)?;
            if steps < 2 {
                return Err(self.error("r.steps", "must be at least 2"));
            }
            let h = (to - from) / (steps - 1) as f64;
            let mut v: Vec<f64> = (0..steps).map(|k| from + k as f64 * h).collect();
            v[steps as usize - 1] = to;
            (v, "r.from")
        } else {
            (vec![0.5, 1.0, 2.0], "r")
        };
        let (values, key) = grid;
        for (i, &r) in values.iter().enumerate() {
            let ok = (r > 0.0 || (allow_zero && r == 0.0)) && (r.is_finite() || (allow_inf && r == f64::INFINITY));
            if !ok {
                return Err(self.error(key, format!("entry {} ({r}) must be a positive horizon", i + 1)));
            }
        }
        if values.windows(2).any(|w| !(w[0] < w[1])) {
            return Err(self.error(key, "horizons must be strictly increasing"));
        }
        Ok(values)
    }

    fn crossing(&self, command: Command) -> Result<Option<CrossingSpec>, ConfigError> {
        let a = self.opt_real("crossing.a")?;
        let b = self.opt_real("crossing.b")?;
        let pin_time = match self.get("crossing.pin_time") {
            None => None,
            Some(_) => Some(self.real("crossing.pin_time", None, |v| v > 0.0 && v.is_finite(), "must be positive")?),
        };
        let pin_value = self.opt_real("crossing.pin_value")?;
        let pin = match (pin_time, pin_value) {
            (Some(t), Some(x)) => Some((t, x)),
            (None, None) => None,
            (Some(_), None) => return Err(self.error("crossing.pin_value", "required with crossing.pin_time")),
            (None, Some(_)) => return Err(self.error("crossing.pin_time", "required with crossing.pin_value")),
        };
        match (a, b) {
            (Some(a), Some(b)) => Ok(Some(CrossingSpec { a, b, pin })),
            (None, None) if command != Command::Crossing && pin.is_none() => Ok(None),
            (None, _) => Err(self.error("crossing.a", "required by the crossing command")),
            (_, None) => Err(self.error("crossing.b", "required by the crossing command")),
        }
    }
}

fn parse_real(s: &str) -> Option<f64> {
    match s {
        "inf" | "+inf" | "infinity" => Some(f64::INFINITY),
        _ => s.parse::<f64>().ok().filter(|v| v.is_finite()),
    }
}

fn parse_integer(s: &str) -> Option<u64> {
    if let Ok(v) = s.parse::<u64>() {
        return Some(v);
    }
    // Accept integral values in exponent notation such as 1e6.
    let v = s.parse::<f64>().ok()?;
    (v >= 0.0 && v.fract() == 0.0 && v <= 9_007_199_254_740_992.0).then_some(v as u64)
}

fn parse_bool(s: &str) -> Option<bool> {
    match s {
        "true" | "on" | "1" => Some(true),
        "false" | "off" | "0" => Some(false),
        _ => None,
    }
}

fn parse_knots(s: &str) -> Option<Vec<(f64, f64)>> {
    s.split(',')
        .map(|pair| {
            let (x, y) = pair.split_once(':')?;
            Some((parse_real(x.trim())?, parse_real(y.trim())?))
        })
        .collect()
}

/// Shortest text that parses back to the same `f64`.
fn real_text(v: f64) -> String {
    if v == f64::INFINITY {
        "inf".into()
    } else {
        format!("{v:?}")
    }
}

impl JobConfig {
    pub fn dump(&self) -> String {
        let mut lines: Vec<(String, String)> = vec![
            ("command".into(), self.command.name().into()),
            ("model.c1".into(), real_text(self.model.c1())),
            ("model.c2".into(), real_text(self.model.c2())),
            ("model.p".into(), real_text(self.model.p())),
            ("model.T".into(), real_text(self.model.anticipation_time())),
        ];
        let mut push = |k: &str, v: String| lines.push((k.into(), v));
        match &self.g {
            InitialCondition::Constant { l0 } => {
                push("g.kind", "constant".into());
                push("g.l0", real_text(*l0));
            }
            InitialCondition::Exponential { scale, rate } => {
                push("g.kind", "exponential".into());
                push("g.scale", real_text(*scale));
                push("g.rate", real_text(*rate));
            }
            InitialCondition::AffineClamped { slope, offset, floor } => {
                push("g.kind", "affine_clamped".into());
                push("g.slope", real_text(*slope));
                push("g.offset", real_text(*offset));
                push("g.floor", real_text(*floor));
            }
            InitialCondition::Table(t) => {
                push("g.kind", "table".into());
                let knots: Vec<String> = t.knots().iter().map(|(x, y)| format!("{}:{}", real_text(*x), real_text(*y))).collect();
                push("g.knots", knots.join(","));
            }
        }
        let r: Vec<String> = self.r_grid.iter().map(|&r| real_text(r)).collect();
        push("r", r.join(","));
        push("quad.sigmas", real_text(self.quad.truncation_sigmas));
        push("quad.tol", real_text(self.quad.abs_tol));
        push("quad.max_refinements", self.quad.max_refinements.to_string());
        push("mc.paths", self.mc.n_paths.to_string());
        push("mc.dt", real_text(self.mc.dt));
        push("mc.seed", self.mc.seed.to_string());
        push("mc.bridge_correction", self.mc.bridge_correction.to_string());
        if let Some(c) = &self.crossing {
            push("crossing.a", real_text(c.a));
            push("crossing.b", real_text(c.b));
            if let Some((t, x)) = c.pin {
                push("crossing.pin_time", real_text(t));
                push("crossing.pin_value", real_text(x));
            }
        }
        push("output", self.output.clone());
        push("format", self.format.name().into());
        lines.into_iter().map(|(k, v)| format!("{k} = {v}\n")).collect()
    }
}
