//! Experiment configuration files (TOML).
//!
//! ```toml
//! name = "fig2"
//! max_iters = 2000
//!
//! [[instances]]
//! label = "small-mu"      # optional
//! n = 50
//! m = 50
//! a = 0.0
//! b = 0.2
//! rho = 0.1
//! seed = 2024
//!
//! [[algorithms]]
//! algorithm = "fista-delta"   # fbs | fista | fista-z | fista-delta
//! label = "FISTA-rho"         # optional
//! delta = "rho"               # number, or an expression in mu and rho
//! # gamma, alpha, c_coupling, stop_tolerance override the defaults
//!
//! [outputs]
//! csv = true
//! plot = true
//! plot_series = ["e", "ell"]  # any of e, v, ell
//! region_grid = 101           # optional: also write the rate region map
//! ```

use std::collections::HashSet;

use fistashift::{Algorithm, InstanceParams};
use serde::{Deserialize, Deserializer};

use crate::error::{HarnessError, Result};

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub name: String,
    pub max_iters: usize,
    #[serde(default)]
    pub instances: Vec<InstanceSpec>,
    #[serde(default)]
    pub algorithms: Vec<AlgorithmSpec>,
    #[serde(default)]
    pub outputs: OutputSpec,
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InstanceSpec {
    pub label: Option<String>,
    pub n: usize,
    pub m: usize,
    pub a: f64,
    pub b: f64,
    pub rho: f64,
    pub seed: u64,
}

impl InstanceSpec {
    pub fn params(&self) -> InstanceParams {
        InstanceParams {
            n: self.n,
            m: self.m,
            a: self.a,
            b: self.b,
            rho: self.rho,
            seed: self.seed,
        }
    }

    pub fn label(&self) -> String {
        self.label
            .clone()
            .unwrap_or_else(|| format!("n{}_a{}_b{}", self.n, self.a, self.b))
    }
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AlgorithmSpec {
    #[serde(deserialize_with = "algorithm_from_str")]
    pub algorithm: Algorithm,
    pub label: Option<String>,
    pub delta: Option<DeltaSpec>,
    pub gamma: Option<f64>,
    pub alpha: Option<f64>,
    pub c_coupling: Option<f64>,
    pub stop_tolerance: Option<f64>,
}

impl AlgorithmSpec {
    pub fn label(&self) -> String {
        if let Some(l) = &self.label {
            return l.clone();
        }
        match (&self.algorithm, &self.delta) {
            (Algorithm::FistaDelta, Some(d)) => format!("fista-delta({d})"),
            (alg, _) => alg.name().to_string(),
        }
    }
}

fn algorithm_from_str<'de, D: Deserializer<'de>>(d: D) -> std::result::Result<Algorithm, D::Error> {
    let s = String::deserialize(d)?;
    s.parse().map_err(serde::de::Error::custom)
}

/// A shift given as a number or as an expression such as `rho`, `rho/2`,
/// `-mu` or `0.5*rho`.
#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(untagged)]
pub enum DeltaSpec {
    Value(f64),
    Expr(String),
}

impl std::fmt::Display for DeltaSpec {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            DeltaSpec::Value(v) => write!(f, "{v}"),
            DeltaSpec::Expr(e) => f.write_str(e),
        }
    }
}

impl DeltaSpec {
    /// Evaluates the shift for the instance constants. Grammar:
    /// `[-] factor (* factor)* [/ number]` with factors `mu`, `rho` or numbers.
    pub fn resolve(&self, mu: f64, rho: f64) -> std::result::Result<f64, String> {
        let expr = match self {
            DeltaSpec::Value(v) => return Ok(*v),
            DeltaSpec::Expr(e) => e,
        };
        let compact: String = expr.chars().filter(|c| !c.is_whitespace()).collect();
        let (sign, body) = match compact.strip_prefix('-') {
            Some(rest) => (-1.0, rest),
            None => (1.0, compact.as_str()),
        };
        let (num, den) = match body.split_once('/') {
            Some((n, d)) => (n, Some(d)),
            None => (body, None),
        };
        let factor = |t: &str| -> std::result::Result<f64, String> {
            match t {
                "mu" => Ok(mu),
                "rho" => Ok(rho),
                _ => t.parse::<f64>().map_err(|_| format!("bad term `{t}` in delta `{expr}`")),
            }
        };
        let mut value = sign;
        for t in num.split('*') {
            value *= factor(t)?;
        }
        if let Some(d) = den {
            let d: f64 = d.parse().map_err(|_| format!("bad divisor `{d}` in delta `{expr}`"))?;
            if d == 0.0 {
                return Err(format!("division by zero in delta `{expr}`"));
            }
            value /= d;
        }
        Ok(value)
    }
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputSpec {
    #[serde(default = "yes")]
    pub csv: bool,
    #[serde(default = "yes")]
    pub plot: bool,
    #[serde(default = "default_series")]
    pub plot_series: Vec<String>,
    pub region_grid: Option<usize>,
}

impl Default for OutputSpec {
    fn default() -> Self {
        Self {
            csv: true,
            plot: true,
            plot_series: default_series(),
            region_grid: None,
        }
    }
}

fn yes() -> bool {
    true
}

fn default_series() -> Vec<String> {
    vec!["e".into(), "ell".into()]
}

pub const PRESETS: [&str; 4] = ["fig1", "fig2", "fig3", "fig4"];

pub fn preset_text(name: &str) -> Option<&'static str> {
    match name {
        "fig1" => Some(include_str!("../presets/fig1.toml")),
        "fig2" => Some(include_str!("../presets/fig2.toml")),
        "fig3" => Some(include_str!("../presets/fig3.toml")),
        "fig4" => Some(include_str!("../presets/fig4.toml")),
        _ => None,
    }
}

impl ExperimentConfig {
    pub fn from_toml(text: &str) -> Result<Self> {
        let cfg: ExperimentConfig = toml::from_str(text).map_err(|e| {
            let message = e.message().to_string();
            match e.span() {
                Some(span) => HarnessError::ConfigAt {
                    line: 1 + text[..span.start.min(text.len())].matches('\n').count(),
                    message,
                },
                None => HarnessError::Config(message),
            }
        })?;
        cfg.check()?;
        Ok(cfg)
    }

    pub fn preset(name: &str) -> Result<Self> {
        let text = preset_text(name).ok_or_else(|| {
            HarnessError::Config(format!("unknown preset `{name}` (expected one of {})", PRESETS.join(", ")))
        })?;
        Self::from_toml(text)
    }

    /// Structural checks that do not need the instances. Shift ranges are
    /// checked once the instance constants are known.
    pub fn check(&self) -> Result<()> {
        let bad = |m: String| Err(HarnessError::Config(m));
        if self.max_iters == 0 {
            return bad("max_iters must be >= 1".into());
        }
        if self.instances.is_empty() {
            return bad("at least one [[instances]] entry is required".into());
        }
        if self.algorithms.is_empty() {
            return bad("at least one [[algorithms]] entry is required".into());
        }
        let mut seen = HashSet::new();
        for inst in &self.instances {
            if inst.n == 0 || inst.m == 0 {
                return bad(format!("instance {}: n and m must be >= 1", inst.label()));
            }
            if !(inst.rho > 0.0) {
                return bad(format!("instance {}: rho must be > 0", inst.label()));
            }
            if !seen.insert(inst.label()) {
                return bad(format!("duplicate instance label `{}`", inst.label()));
            }
        }
        seen.clear();
        for alg in &self.algorithms {
            if !seen.insert(alg.label()) {
                return bad(format!("duplicate algorithm label `{}`", alg.label()));
            }
            if alg.delta.is_some() && alg.algorithm != Algorithm::FistaDelta {
                return bad(format!("{}: delta only applies to fista-delta", alg.label()));
            }
            if let Some(d) = &alg.delta {
                d.resolve(1.0, 1.0).map_err(HarnessError::Config)?;
            }
        }
        for s in &self.outputs.plot_series {
            if !["e", "v", "ell"].contains(&s.as_str()) {
                return bad(format!("unknown plot series `{s}` (expected e, v or ell)"));
            }
        }
        if let Some(g) = self.outputs.region_grid {
            if g < 2 {
                return bad("region_grid must be >= 2".into());
            }
        }
        Ok(())
    }

    /// Replaces every instance seed.
    pub fn override_seed(&mut self, seed: u64) {
        for inst in &mut self.instances {
            inst.seed = seed;
        }
    }
}
