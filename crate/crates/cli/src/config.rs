//! Flat `key = value` run configurations.
//!
//! A configuration names one subcommand and a set of typed parameters.
//! Every parameter has an entry in the table of its subcommand, which fixes
//! the type, the accepted range and the default. Text is parsed line by
//! line; `#` starts a comment.

use std::collections::BTreeMap;
use std::fmt;
use std::path::PathBuf;

#[derive(Debug, Clone, PartialEq)]
pub enum Value {
    Int(i64),
    Real(f64),
    Text(String),
}

impl fmt::Display for Value {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Value::Int(i) => write!(f, "{i}"),
            Value::Real(x) => write!(f, "{}", format_real(*x)),
            Value::Text(s) => f.write_str(s),
        }
    }
}

/// Shortest text that parses back to the same `f64`.
pub fn format_real(x: f64) -> String {
    if x == 0.0 || (1e-4..1e15).contains(&x.abs()) {
        format!("{x:?}")
    } else {
        format!("{x:e}")
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Kind {
    Int { min: i64, max: i64 },
    /// Real in `(min, max)`; the flags make either end inclusive.
    Real { min: f64, max: f64, min_incl: bool, max_incl: bool },
    Choice(&'static [&'static str]),
    /// `lo:hi:steps` with `0 < lo < hi` and `steps >= 2`.
    Sweep,
    /// `lo:hi:steps` with `lo < hi`, any sign, and `steps >= 1`.
    Grid,
    /// `lo:hi` with `0 < lo < hi`.
    Span,
}

impl Kind {
    fn describe(&self) -> String {
        match self {
            Kind::Int { min, max } => format!("an integer in [{min}, {max}]"),
            Kind::Real { min, max, min_incl, max_incl } => format!(
                "a real in {}{}, {}{}",
                if *min_incl { "[" } else { "(" },
                min,
                max,
                if *max_incl { "]" } else { ")" }
            ),
            Kind::Choice(c) => format!("one of {}", c.join(", ")),
            Kind::Sweep => "lo:hi:steps with 0 < lo < hi and steps >= 2".into(),
            Kind::Grid => "lo:hi:steps with lo < hi and steps >= 1".into(),
            Kind::Span => "lo:hi with 0 < lo < hi".into(),
        }
    }

    fn parse(&self, raw: &str) -> Option<Value> {
        match *self {
            Kind::Int { min, max } => raw.parse::<i64>().ok().filter(|i| (min..=max).contains(i)).map(Value::Int),
            Kind::Real { min, max, min_incl, max_incl } => {
                let x = raw.parse::<f64>().ok().filter(|x| x.is_finite())?;
                let above = if min_incl { x >= min } else { x > min };
                let below = if max_incl { x <= max } else { x < max };
                (above && below).then_some(Value::Real(x))
            }
            Kind::Choice(c) => c.contains(&raw).then(|| Value::Text(raw.to_string())),
            Kind::Sweep => parse_sweep(raw).filter(|s| s.0 > 0.0 && s.2 >= 2).map(|_| Value::Text(raw.to_string())),
            Kind::Grid => parse_sweep(raw).map(|_| Value::Text(raw.to_string())),
            Kind::Span => parse_span(raw).filter(|s| s.0 > 0.0).map(|_| Value::Text(raw.to_string())),
        }
    }
}

fn parse_span(raw: &str) -> Option<(f64, f64)> {
    let (lo, hi) = raw.split_once(':')?;
    let (lo, hi) = (lo.trim().parse::<f64>().ok()?, hi.trim().parse::<f64>().ok()?);
    (lo.is_finite() && hi.is_finite() && lo < hi).then_some((lo, hi))
}

/// `lo:hi:steps`.
pub fn parse_sweep(raw: &str) -> Option<(f64, f64, usize)> {
    let (span, steps) = raw.rsplit_once(':')?;
    let (lo, hi) = parse_span(span)?;
    let steps = steps.trim().parse::<usize>().ok().filter(|s| *s >= 1)?;
    Some((lo, hi, steps))
}

#[derive(Debug, Clone, Copy)]
pub struct Param {
    pub key: &'static str,
    pub kind: Kind,
    /// `None` leaves the parameter unset unless given.
    pub default: Option<&'static str>,
    pub doc: &'static str,
}

const fn real(min: f64, max: f64) -> Kind {
    Kind::Real { min, max, min_incl: false, max_incl: false }
}

const POSITIVE: Kind = real(0.0, f64::INFINITY);
const TOL: Kind = Kind::Real { min: 0.0, max: 1e-2, min_incl: false, max_incl: true };
const THETA: Kind = real(-1.0, 0.0);

const fn p(key: &'static str, kind: Kind, default: Option<&'static str>, doc: &'static str) -> Param {
    Param { key, kind, default, doc }
}

const WELL_PARAMS: [Param; 4] = [
    p("V0", POSITIVE, Some("1.0"), "depth of the bump well v0(r) = -V0 (1 - r^2/a^2)^2"),
    p("a", POSITIVE, Some("0.625"), "support radius of the well"),
    p("L", POSITIVE, Some("2.5"), "distance between neighbouring wells"),
    p("b", POSITIVE, Some("1.0"), "magnetic field strength"),
];

const CONSTANTS: &[Param] = &[
    p("theta", THETA, None, "field ratio of the magnetic step; unset gives the Neumann (de Gennes) model"),
    p("tol", TOL, Some("1e-8"), "tolerance of the band minimisation"),
];

const ACTIONS: &[Param] = &[
    p("well", Kind::Choice(&["bump"]), Some("bump"), "well profile"),
    WELL_PARAMS[0],
    WELL_PARAMS[1],
    WELL_PARAMS[2],
    WELL_PARAMS[3],
    p("tol", TOL, Some("1e-10"), "quadrature and minimisation tolerance"),
];

const REDUCE_DEMO: &[Param] = &[
    p("sites", Kind::Int { min: 6, max: 4000 }, Some("300"), "ring sites"),
    p("wells", Kind::Int { min: 2, max: 64 }, Some("3"), "potential dips on the ring"),
    p("barrier", POSITIVE, Some("0.02"), "barrier height between the dips"),
    p("phase_sweep", Kind::Grid, Some("0:6.283185307179586:25"), "total hopping phase, lo:hi:steps"),
];

const WELLS_HOPPING: &[Param] = &[
    WELL_PARAMS[0],
    WELL_PARAMS[1],
    WELL_PARAMS[2],
    WELL_PARAMS[3],
    p("h", Kind::Real { min: 0.0, max: 10.0, min_incl: false, max_incl: true }, Some("0.2"), "semiclassical parameter"),
    p("tol", TOL, Some("1e-6"), "quadrature tolerance"),
];

const WELLS_SWEEP: &[Param] = &[
    p("n", Kind::Int { min: 2, max: 12 }, Some("2"), "number of wells"),
    WELL_PARAMS[0],
    WELL_PARAMS[1],
    WELL_PARAMS[2],
    WELL_PARAMS[3],
    p("N", Kind::Int { min: 16, max: 4096 }, Some("256"), "grid nodes per side"),
    p("R", POSITIVE, None, "box half-width; unset picks one from the decay length at each h"),
    p("lattice", Kind::Choice(&["auto", "square", "triangular"]), Some("auto"), "node layout; auto is triangular for three wells"),
    p("h", Kind::Sweep, Some("0.12:0.3:10"), "h range, points evenly spaced in 1/h"),
    p("m", Kind::Int { min: 2, max: 64 }, Some("4"), "eigenvalues per point"),
    p("tol", Kind::Real { min: 0.0, max: 1e-4, min_incl: false, max_incl: true }, Some("1e-10"), "relative eigenpair residual"),
];

const STRIP_SWEEP: &[Param] = &[
    p("kind", Kind::Choice(&["neumann", "step"]), Some("neumann"), "boundary or magnetic-step fibre"),
    p("theta", THETA, Some("-0.5"), "field ratio of the step kind"),
    p("L", POSITIVE, Some("3.141592653589793"), "half-perimeter of the curve"),
    p("eps_curv", Kind::Real { min: 0.0, max: f64::INFINITY, min_incl: true, max_incl: false }, Some("0.4"), "curvature modulation"),
    p("n", Kind::Int { min: 3, max: 12 }, Some("3"), "symmetry order of the curve"),
    p("h", Kind::Sweep, Some("0.0004:0.0032:4"), "h range, points evenly spaced in h^(-1/2)"),
    p("m", Kind::Int { min: 3, max: 64 }, Some("4"), "eigenvalues per point"),
    p("sigma_nodes", Kind::Int { min: 8, max: 1_000_000 }, None, "fixed sigma grid; unset uses the default grid at each h"),
    p("tau_nodes", Kind::Int { min: 4, max: 100_000 }, None, "fixed tau grid; needs sigma_nodes"),
    p("crossings", Kind::Choice(&["yes", "no"]), Some("yes"), "locate crossings of the low triple"),
    p("tol", Kind::Real { min: 0.0, max: 1e-4, min_incl: false, max_incl: true }, Some("1e-10"), "relative eigenpair residual"),
];

const PREDICT: &[Param] = &[
    p("slope", POSITIVE, Some("1.0"), "phase slope dtheta/dg"),
    p("alpha0", real(f64::NEG_INFINITY, f64::INFINITY), Some("0.0"), "phase offset"),
    p("h", Kind::Span, Some("0.12:0.3"), "h interval, lo:hi"),
    p("law", Kind::Choice(&["inverse-h", "inverse-sqrt-h"]), Some("inverse-h"), "g = 1/h or g = h^(-1/2)"),
    p("n", Kind::Int { min: 3, max: 3 }, Some("3"), "number of wells"),
];

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Command {
    Constants,
    Actions,
    ReduceDemo,
    WellsHopping,
    WellsSweep,
    StripSweep,
    Predict,
}

impl Command {
    pub const ALL: [Command; 7] = [
        Command::Constants,
        Command::Actions,
        Command::ReduceDemo,
        Command::WellsHopping,
        Command::WellsSweep,
        Command::StripSweep,
        Command::Predict,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Command::Constants => "constants",
            Command::Actions => "actions",
            Command::ReduceDemo => "reduce-demo",
            Command::WellsHopping => "wells hopping",
            Command::WellsSweep => "wells sweep",
            Command::StripSweep => "strip sweep",
            Command::Predict => "predict",
        }
    }

    pub fn from_name(s: &str) -> Option<Self> {
        let norm = s.split_whitespace().collect::<Vec<_>>().join(" ");
        Self::ALL.into_iter().find(|c| c.name() == norm)
    }

    pub fn params(self) -> &'static [Param] {
        match self {
            Command::Constants => CONSTANTS,
            Command::Actions => ACTIONS,
            Command::ReduceDemo => REDUCE_DEMO,
            Command::WellsHopping => WELLS_HOPPING,
            Command::WellsSweep => WELLS_SWEEP,
            Command::StripSweep => STRIP_SWEEP,
            Command::Predict => PREDICT,
        }
    }

    /// Record-style commands print `key = value` by default.
    fn default_format(self) -> Format {
        match self {
            Command::Constants | Command::Actions | Command::WellsHopping => Format::Text,
            _ => Format::Csv,
        }
    }
}

/// Command used when a configuration does not name one.
pub const DEFAULT_COMMAND: Command = Command::WellsSweep;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Format {
    Text,
    Csv,
    Json,
}

impl Format {
    pub fn name(self) -> &'static str {
        match self {
            Format::Text => "text",
            Format::Csv => "csv",
            Format::Json => "json",
        }
    }

    fn from_name(s: &str) -> Option<Self> {
        [Format::Text, Format::Csv, Format::Json].into_iter().find(|f| f.name() == s)
    }
}

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum ConfigError {
    #[error("line {line}: expected `key = value`, got `{text}`")]
    Syntax { line: usize, text: String },
    #[error("key `{0}` given twice")]
    Duplicate(String),
    #[error("unknown key `{key}` for `{command}`; accepted keys: {accepted}")]
    UnknownKey { key: String, command: &'static str, accepted: String },
    #[error("unknown command `{0}`")]
    UnknownCommand(String),
    #[error("command `{given}` does not match `{expected}`")]
    CommandMismatch { given: String, expected: &'static str },
    #[error("`{key}` = `{value}`: expected {expected}")]
    Range { key: String, value: String, expected: String },
    #[error("{0}")]
    Constraint(String),
}

/// A validated configuration. `params` holds every set parameter of the
/// command, defaults included.
#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub command: Command,
    pub params: BTreeMap<String, Value>,
    pub output: Option<PathBuf>,
    pub format: Format,
    pub seed: u64,
}

const RESERVED: [&str; 4] = ["command", "out", "format", "seed"];

/// `key = value` pairs of a configuration text, in order.
pub fn parse_pairs(text: &str) -> Result<Vec<(String, String)>, ConfigError> {
    let mut pairs: Vec<(String, String)> = Vec::new();
    for (i, line) in text.lines().enumerate() {
        let content = line.split_once('#').map_or(line, |(c, _)| c).trim();
        if content.is_empty() {
            continue;
        }
        let Some((k, v)) = content.split_once('=') else {
            return Err(ConfigError::Syntax { line: i + 1, text: line.to_string() });
        };
        let (k, v) = (k.trim(), v.trim());
        if k.is_empty() || v.is_empty() {
            return Err(ConfigError::Syntax { line: i + 1, text: line.to_string() });
        }
        if pairs.iter().any(|(key, _)| key == k) {
            return Err(ConfigError::Duplicate(k.to_string()));
        }
        pairs.push((k.to_string(), v.to_string()));
    }
    Ok(pairs)
}

pub fn parse_config(text: &str) -> Result<RunConfig, ConfigError> {
    RunConfig::from_pairs(None, &parse_pairs(text)?)
}

impl RunConfig {
    /// Validate `pairs` for `command` (or the command the pairs name).
    pub fn from_pairs(command: Option<Command>, pairs: &[(String, String)]) -> Result<Self, ConfigError> {
        let named = pairs.iter().find(|(k, _)| k == "command").map(|(_, v)| v.as_str());
        let command = match (command, named) {
            (Some(c), Some(n)) => {
                if Command::from_name(n) != Some(c) {
                    return Err(ConfigError::CommandMismatch { given: n.to_string(), expected: c.name() });
                }
                c
            }
            (Some(c), None) => c,
            (None, Some(n)) => Command::from_name(n).ok_or_else(|| ConfigError::UnknownCommand(n.to_string()))?,
            (None, None) => DEFAULT_COMMAND,
        };
        let table = command.params();
        let mut params = BTreeMap::new();
        let mut output = None;
        let mut format = command.default_format();
        let mut seed = 0u64;
        for (k, v) in pairs {
            match k.as_str() {
                "command" => {}
                "out" => output = Some(PathBuf::from(v)),
                "format" => {
                    format = Format::from_name(v).ok_or_else(|| ConfigError::Range {
                        key: k.clone(),
                        value: v.clone(),
                        expected: "one of text, csv, json".into(),
                    })?
                }
                "seed" => {
                    seed = v.parse().map_err(|_| ConfigError::Range {
                        key: k.clone(),
                        value: v.clone(),
                        expected: "a non-negative integer".into(),
                    })?
                }
                _ => {
                    let Some(param) = table.iter().find(|p| p.key == k) else {
                        let mut accepted: Vec<&str> = table.iter().map(|p| p.key).collect();
                        accepted.extend(RESERVED);
                        return Err(ConfigError::UnknownKey {
                            key: k.clone(),
                            command: command.name(),
                            accepted: accepted.join(", "),
                        });
                    };
                    let value = param.kind.parse(v).ok_or_else(|| ConfigError::Range {
                        key: k.clone(),
                        value: v.clone(),
                        expected: param.kind.describe(),
                    })?;
                    params.insert(k.clone(), value);
                }
            }
        }
        for param in table {
            if let (false, Some(d)) = (params.contains_key(param.key), param.default) {
                params.insert(param.key.to_string(), param.kind.parse(d).expect("valid default"));
            }
        }
        let cfg = RunConfig { command, params, output, format, seed };
        cfg.check_constraints()?;
        Ok(cfg)
    }

    /// Configuration text that parses back to `self`.
    pub fn emit(&self) -> String {
        let mut out = format!("command = {}\nformat = {}\nseed = {}\n", self.command.name(), self.format.name(), self.seed);
        if let Some(p) = &self.output {
            out += &format!("out = {}\n", p.display());
        }
        for param in self.command.params() {
            if let Some(v) = self.params.get(param.key) {
                out += &format!("{} = {v}\n", param.key);
            }
        }
        out
    }

    pub fn int(&self, key: &str) -> i64 {
        match self.params.get(key) {
            Some(Value::Int(i)) => *i,
            other => panic!("`{key}` is not an integer parameter: {other:?}"),
        }
    }

    pub fn usize(&self, key: &str) -> usize {
        self.int(key) as usize
    }

    pub fn real(&self, key: &str) -> f64 {
        self.opt_real(key).unwrap_or_else(|| panic!("`{key}` is not set"))
    }

    pub fn opt_real(&self, key: &str) -> Option<f64> {
        match self.params.get(key) {
            Some(Value::Real(x)) => Some(*x),
            None => None,
            other => panic!("`{key}` is not a real parameter: {other:?}"),
        }
    }

    pub fn opt_usize(&self, key: &str) -> Option<usize> {
        self.params.contains_key(key).then(|| self.usize(key))
    }

    pub fn text(&self, key: &str) -> &str {
        match self.params.get(key) {
            Some(Value::Text(s)) => s,
            other => panic!("`{key}` is not a text parameter: {other:?}"),
        }
    }

    pub fn sweep(&self, key: &str) -> (f64, f64, usize) {
        parse_sweep(self.text(key)).expect("validated sweep")
    }

    pub fn span(&self, key: &str) -> (f64, f64) {
        parse_span(self.text(key)).expect("validated span")
    }

    /// Conditions spanning several parameters: the preconditions of the
    /// module operation behind the command.
    fn check_constraints(&self) -> Result<(), ConfigError> {
        let fail = |msg: String| Err(ConfigError::Constraint(msg));
        match self.command {
            Command::Actions | Command::WellsHopping | Command::WellsSweep => {
                let (a, l) = (self.real("a"), self.real("L"));
                if l <= 2.0 * a {
                    return fail(format!("L = {l} must exceed 2a = {}", 2.0 * a));
                }
                if self.command == Command::WellsSweep && self.usize("m") < self.usize("n") {
                    return fail(format!("m = {} must be at least n = {}", self.usize("m"), self.usize("n")));
                }
            }
            Command::ReduceDemo => {
                let (sites, wells) = (self.usize("sites"), self.usize("wells"));
                if sites % wells != 0 || sites < 3 * wells {
                    return fail(format!("sites = {sites} must be a multiple of wells = {wells} and at least 3 wells"));
                }
            }
            Command::StripSweep => {
                let (l, eps) = (self.real("L"), self.real("eps_curv"));
                let cap = std::f64::consts::PI / (2.0 * l);
                if eps >= cap {
                    return fail(format!("eps_curv = {eps} must lie below pi/(2L) = {cap}"));
                }
                if self.usize("m") < self.usize("n") {
                    return fail(format!("m = {} must be at least n = {}", self.usize("m"), self.usize("n")));
                }
                if self.params.contains_key("tau_nodes") != self.params.contains_key("sigma_nodes") {
                    return fail("sigma_nodes and tau_nodes must be set together".into());
                }
            }
            Command::Constants | Command::Predict => {}
        }
        Ok(())
    }
}

/// One line per parameter of `command`, for help output.
pub fn describe(command: Command) -> String {
    let mut out = String::new();
    for p in command.params() {
        let default = p.default.unwrap_or("unset");
        out += &format!("  {:<12} {} (default {default}): {}\n", p.key, p.kind.describe(), p.doc);
    }
    out
}
