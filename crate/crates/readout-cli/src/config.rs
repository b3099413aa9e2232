//! Flat `key = value` configuration with `[section]` headers.
//!
//! Keys inside a section are addressed as `section.key`; `scheme` is the only
//! top-level key. Overrides given on the command line use the same addressing
//! and replace file values.

use std::collections::BTreeMap;
use std::f64::consts::{FRAC_PI_2, LN_10, PI};
use std::path::PathBuf;

use squeezed_readout::ics::omega_from_r;
use squeezed_readout::{CombinedConfig, IcsConfig, IesConfig, ReadoutParams, SchemeConfig, SchemeKind};

use crate::error::{CliError, CliResult};

pub const KNOWN_KEYS: &[&str] = &[
    "scheme",
    "params.kappa",
    "params.chi",
    "params.alpha_in",
    "params.phi_in",
    "params.phi_h",
    "params.tau",
    "params.kappa_tau",
    "ies.r",
    "ies.varphi",
    "ies.phase_offset",
    "ics.omega",
    "ics.r",
    "ics.theta",
    "combined.r",
    "combined.theta",
    "combined.epsilon",
    "combined.omega_sq",
    "combined.delta_r",
    "combined.delta_p",
    "sweep.variable",
    "sweep.start",
    "sweep.stop",
    "sweep.count",
    "sweep.spacing",
    "output.path",
    "output.format",
];

const NON_NUMERIC: &[&str] = &["scheme", "combined.omega_sq", "output.path", "output.format"];

#[derive(Clone, Debug, Default, PartialEq)]
pub struct ConfigMap {
    entries: BTreeMap<String, String>,
}

impl ConfigMap {
    pub fn parse(text: &str) -> CliResult<Self> {
        let mut map = ConfigMap::default();
        let mut section = String::new();
        for (n, raw) in text.lines().enumerate() {
            let line = strip_comment(raw).trim();
            if line.is_empty() {
                continue;
            }
            if let Some(rest) = line.strip_prefix('[') {
                let name = rest
                    .strip_suffix(']')
                    .ok_or_else(|| CliError::config(format!("line {}: unterminated section header", n + 1)))?;
                section = name.trim().to_string();
                continue;
            }
            let (k, v) = line
                .split_once('=')
                .ok_or_else(|| CliError::config(format!("line {}: expected key = value", n + 1)))?;
            let key = if section.is_empty() { k.trim().to_string() } else { format!("{section}.{}", k.trim()) };
            if map.entries.contains_key(&key) {
                return Err(CliError::config(format!("line {}: duplicate key `{key}`", n + 1)));
            }
            map.insert(&key, v.trim())?;
        }
        Ok(map)
    }

    pub fn set(&mut self, assignment: &str) -> CliResult<()> {
        let (k, v) = assignment
            .split_once('=')
            .ok_or_else(|| CliError::config(format!("override `{assignment}` is not key=value")))?;
        self.insert(k.trim(), v.trim())
    }

    pub fn insert(&mut self, key: &str, value: &str) -> CliResult<()> {
        if !KNOWN_KEYS.contains(&key) {
            return Err(CliError::config(format!("unknown key `{key}`")));
        }
        self.entries.insert(key.to_string(), value.to_string());
        Ok(())
    }

    pub fn get(&self, key: &str) -> Option<&str> {
        self.entries.get(key).map(String::as_str)
    }

    pub fn contains(&self, key: &str) -> bool {
        self.entries.contains_key(key)
    }

    pub fn number(&self, key: &str) -> CliResult<Option<f64>> {
        self.get(key)
            .map(|v| parse_number(v).ok_or_else(|| CliError::config(format!("`{key}`: cannot parse `{v}` as a number"))))
            .transpose()
    }

    pub fn number_or(&self, key: &str, default: f64) -> CliResult<f64> {
        Ok(self.number(key)?.unwrap_or(default))
    }
}

fn strip_comment(line: &str) -> &str {
    match line.find(['#', ';']) {
        Some(i) => &line[..i],
        None => line,
    }
}

/// A decimal number, `ln(x)`, or a multiple of π written as `[-][a][*]pi[/b]`.
pub fn parse_number(s: &str) -> Option<f64> {
    let s = s.trim();
    if let Ok(x) = s.parse::<f64>() {
        return x.is_finite().then_some(x);
    }
    if let Some(inner) = s.strip_prefix("ln(").and_then(|r| r.strip_suffix(')')) {
        let x = parse_number(inner)?;
        return (x > 0.0).then(|| x.ln());
    }
    if s == "ln10" {
        return Some(LN_10);
    }
    let (sign, body) = match s.strip_prefix('-') {
        Some(rest) => (-1.0, rest.trim()),
        None => (1.0, s),
    };
    let at = body.find("pi")?;
    let coef = body[..at].trim().trim_end_matches('*').trim();
    let coef = if coef.is_empty() { 1.0 } else { coef.parse::<f64>().ok()? };
    let tail = body[at + 2..].trim();
    let den = if tail.is_empty() { 1.0 } else { tail.strip_prefix('/')?.trim().parse::<f64>().ok()? };
    (den != 0.0).then(|| sign * coef * PI / den)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Spacing {
    Linear,
    Log,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Sweep {
    pub variable: String,
    pub values: Vec<f64>,
}

impl Sweep {
    pub fn new(variable: &str, start: f64, stop: f64, count: usize, spacing: Spacing) -> CliResult<Self> {
        if !KNOWN_KEYS.contains(&variable) || NON_NUMERIC.contains(&variable) || variable.starts_with("sweep.") {
            return Err(CliError::config(format!("sweep variable `{variable}` is not a numeric parameter")));
        }
        if count < 2 {
            return Err(CliError::config("sweep count must be at least 2"));
        }
        if spacing == Spacing::Log && !(start > 0.0 && stop > 0.0) {
            return Err(CliError::config("log spacing needs positive start and stop"));
        }
        let values = (0..count)
            .map(|k| {
                let u = k as f64 / (count - 1) as f64;
                match spacing {
                    Spacing::Linear => start + (stop - start) * u,
                    Spacing::Log => (start.ln() + (stop.ln() - start.ln()) * u).exp(),
                }
            })
            .collect();
        Ok(Self { variable: variable.to_string(), values })
    }

    pub fn from_map(map: &ConfigMap) -> CliResult<Option<Self>> {
        let Some(var) = map.get("sweep.variable") else {
            return Ok(None);
        };
        let need = |k: &str| map.number(k)?.ok_or_else(|| CliError::config(format!("sweep needs `{k}`")));
        let count = need("sweep.count")?;
        if count.fract() != 0.0 || count < 0.0 {
            return Err(CliError::config("sweep.count must be a non-negative integer"));
        }
        let spacing = match map.get("sweep.spacing").unwrap_or("linear") {
            "linear" => Spacing::Linear,
            "log" => Spacing::Log,
            other => return Err(CliError::config(format!("sweep.spacing `{other}` is not linear|log"))),
        };
        let var = if var.contains('.') { var.to_string() } else { format!("params.{var}") };
        Self::new(&var, need("sweep.start")?, need("sweep.stop")?, count as usize, spacing).map(Some)
    }

    /// Column name for the swept variable.
    pub fn column(&self) -> String {
        match self.variable.strip_prefix("params.") {
            Some(tail) => tail.to_string(),
            None => self.variable.replace('.', "_"),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct RunConfig {
    pub params: ReadoutParams,
    pub scheme: SchemeConfig,
    pub output: Option<PathBuf>,
}

impl RunConfig {
    pub fn from_map(map: &ConfigMap) -> CliResult<Self> {
        let kind = match map.get("scheme") {
            None => SchemeKind::Standard,
            Some(s) => SchemeKind::parse(s)
                .ok_or_else(|| CliError::config(format!("scheme `{s}` is not standard|ies|ics|combined")))?,
        };
        Self::with_scheme(map, kind)
    }

    /// Reads the parameters and the section belonging to `kind`, ignoring `scheme`.
    pub fn with_scheme(map: &ConfigMap, kind: SchemeKind) -> CliResult<Self> {
        if let Some(f) = map.get("output.format") {
            if f != "csv" {
                return Err(CliError::config(format!("output.format `{f}` is not supported (csv only)")));
            }
        }
        let kappa = map.number_or("params.kappa", 1.0)?;
        let tau = match (map.number("params.tau")?, map.number("params.kappa_tau")?) {
            (Some(_), Some(_)) => return Err(CliError::config("give params.tau or params.kappa_tau, not both")),
            (Some(t), None) => t,
            (None, Some(kt)) => kt / kappa,
            (None, None) => 1.0 / kappa,
        };
        let mut phi_in = map.number_or("params.phi_in", 0.0)?;
        let mut phi_h = map.number_or("params.phi_h", FRAC_PI_2)?;
        let scheme = match kind {
            SchemeKind::Standard => SchemeConfig::Standard,
            SchemeKind::Ies => {
                let r = map.number_or("ies.r", 1.0)?;
                let cfg = match (map.number("ies.varphi")?, map.number("ies.phase_offset")?) {
                    (Some(_), Some(_)) => {
                        return Err(CliError::config("give ies.varphi or ies.phase_offset, not both"))
                    }
                    (Some(v), None) => IesConfig::new(r, v)?,
                    (None, off) => IesConfig::with_phase_offset(r, phi_h, off.unwrap_or(PI))?,
                };
                SchemeConfig::Ies(cfg)
            }
            SchemeKind::Ics => {
                let omega = match (map.number("ics.omega")?, map.number("ics.r")?) {
                    (Some(_), Some(_)) => return Err(CliError::config("give ics.omega or ics.r, not both")),
                    (Some(o), None) => o,
                    (None, r) => omega_from_r(kappa, r.unwrap_or(1.0)),
                };
                let theta = map.number_or("ics.theta", 2.0 * phi_h - FRAC_PI_2)?;
                SchemeConfig::Ics(IcsConfig::new(omega, theta)?)
            }
            SchemeKind::Combined => {
                let theta = map.number_or("combined.theta", 0.0)?;
                let mut cfg = CombinedConfig::matched(map.number_or("combined.r", LN_10)?, theta)
                    .with_epsilon(map.number_or("combined.epsilon", 0.05)?)
                    .with_mismatch(map.number_or("combined.delta_r", 0.0)?, map.number_or("combined.delta_p", 0.0)?);
                match map.get("combined.omega_sq") {
                    None | Some("auto") => {}
                    Some(v) => {
                        let w = parse_number(v)
                            .ok_or_else(|| CliError::config(format!("combined.omega_sq: `{v}` is not a number or auto")))?;
                        cfg = cfg.with_omega_sq(w);
                    }
                }
                // the tone and detection phases follow the pump unless given explicitly
                if !map.contains("params.phi_in") {
                    phi_in = theta / 2.0;
                }
                if !map.contains("params.phi_h") {
                    phi_h = theta / 2.0;
                }
                SchemeConfig::Combined(cfg)
            }
        };
        let params = ReadoutParams::new(
            kappa,
            map.number_or("params.chi", 0.5 * kappa)?,
            map.number_or("params.alpha_in", kappa.sqrt())?,
            phi_in,
            phi_h,
            tau,
        )?;
        Ok(Self { params, scheme, output: map.get("output.path").map(PathBuf::from) })
    }
}
