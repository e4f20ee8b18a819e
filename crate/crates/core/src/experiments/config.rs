//! Suite and fitter configuration.
//!
//! Configs are JSON objects. Every field has a per-suite default, so a file
//! only needs the keys it changes. Unknown keys are rejected.

use std::path::PathBuf;

use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::domain::{ActivationPower, DomainSpec};
use crate::error::{Error, Result};
use crate::experiments::stats::log_space;

/// Version of the config schema understood by this build.
pub const SCHEMA_VERSION: u32 = 1;

/// Suites driven by [`ExperimentConfig`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Suite {
    Decay,
    Moment,
    Embed,
    Tight,
    McRate,
    Remark2,
}

impl Suite {
    pub fn name(self) -> &'static str {
        match self {
            Suite::Decay => "decay",
            Suite::Moment => "moment",
            Suite::Embed => "embed",
            Suite::Tight => "tight",
            Suite::McRate => "mc-rate",
            Suite::Remark2 => "remark2",
        }
    }
}

/// Family of unit domains used where the dimension varies.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DomainKind {
    Ball,
    Box,
}

impl DomainKind {
    pub fn build(self, dim: usize) -> DomainSpec {
        match self {
            DomainKind::Ball => DomainSpec::ball(1.0, dim),
            DomainKind::Box => DomainSpec::unit_box(dim),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub schema_version: u32,
    pub seed: u64,
    pub s_list: Vec<u32>,
    pub b_grid: Vec<f64>,
    pub delta_grid: Vec<f64>,
    pub xi_grid: Vec<f64>,
    pub d_list: Vec<usize>,
    pub m_list: Vec<usize>,
    #[serde(rename = "R_list")]
    pub r_list: Vec<f64>,
    /// Fractional powers for the non-integer probe.
    pub s_frac_list: Vec<f64>,
    /// Relative tolerance of individual transform samples.
    pub ft_tol: f64,
    /// Relative tolerance of moment integrals.
    pub moment_tol: f64,
    /// Allowed growth of a decay ratio over its low-frequency maximum.
    pub flatness: f64,
    /// Frequencies below this establish the reference maximum.
    pub xi_reference: f64,
    /// Width of random networks in the embedding suite.
    pub width: usize,
    pub domain: DomainKind,
    /// Atoms in the ground-truth measure of the Monte-Carlo suite.
    pub total_atoms: usize,
    pub resamples: usize,
    pub grid_points: usize,
    pub mc_dim: usize,
    pub mc_s: u32,
    pub output: Option<PathBuf>,
}

impl ExperimentConfig {
    pub fn defaults(suite: Suite) -> Self {
        let mut cfg = ExperimentConfig {
            schema_version: SCHEMA_VERSION,
            seed: 7,
            s_list: vec![1, 2, 3],
            b_grid: vec![-3.0, -1.0, 0.0, 1.0, 3.0],
            delta_grid: vec![0.5, 0.2, 0.1, 0.05, 0.02],
            xi_grid: log_space(1.0, 1e4, 60),
            d_list: vec![2, 8, 32],
            m_list: vec![16, 64, 256, 1024],
            r_list: vec![1e2, 1e3, 1e4, 1e5, 1e6],
            s_frac_list: vec![0.5, 1.0, 1.5, 2.5],
            ft_tol: 1e-10,
            moment_tol: 1e-6,
            flatness: 1.05,
            xi_reference: 1e2,
            width: 50,
            domain: DomainKind::Ball,
            total_atoms: 50_000,
            resamples: 20,
            grid_points: 10_000,
            mc_dim: 4,
            mc_s: 1,
            output: None,
        };
        match suite {
            Suite::Decay => {
                cfg.s_list = vec![0, 1, 2, 3];
                cfg.b_grid = vec![-3.0, -1.0, -0.3, 0.0, 0.3, 1.0, 3.0];
            }
            Suite::Remark2 => {
                cfg.b_grid = vec![0.0];
                cfg.delta_grid = vec![0.5, 0.2, 0.1];
                cfg.xi_grid = log_space(1.0, 1e3, 30);
            }
            Suite::Embed => cfg.delta_grid = vec![0.5, 0.1, 0.02],
            _ => {}
        }
        cfg
    }

    /// Applies `--set` style overrides and validates for `suite`.
    pub fn resolve(suite: Suite, file: Option<Value>, overrides: &[(String, Value)]) -> Result<Self> {
        let mut doc = serde_json::to_value(Self::defaults(suite))?;
        if let Some(file) = file {
            merge(&mut doc, file)?;
        }
        for (key, value) in overrides {
            apply_override(&mut doc, key, value.clone())?;
        }
        let cfg: ExperimentConfig = serde_json::from_value(doc)?;
        cfg.validate(suite)?;
        Ok(cfg)
    }

    pub fn validate(&self, suite: Suite) -> Result<()> {
        if self.schema_version != SCHEMA_VERSION {
            return Err(Error::invalid(format!(
                "unsupported schema_version {} (this build reads {SCHEMA_VERSION})",
                self.schema_version
            )));
        }
        let nonempty = |name: &str, len: usize| {
            if len == 0 {
                Err(Error::invalid(format!("{name} must not be empty")))
            } else {
                Ok(())
            }
        };
        let tol_ok = |name: &str, v: f64, lo: f64, hi: f64| {
            if (lo..=hi).contains(&v) {
                Ok(())
            } else {
                Err(Error::invalid(format!("{name} must lie in [{lo:e}, {hi:e}], got {v}")))
            }
        };
        let deltas = || -> Result<()> {
            nonempty("delta_grid", self.delta_grid.len())?;
            if let Some(d) = self.delta_grid.iter().find(|d| !(**d > 0.0 && **d < 1.0)) {
                return Err(Error::invalid(format!("delta must lie in (0, 1), got {d}")));
            }
            Ok(())
        };
        let finite = |name: &str, v: &[f64]| {
            if v.iter().any(|x| !x.is_finite()) {
                Err(Error::invalid(format!("{name} must contain finite numbers")))
            } else {
                Ok(())
            }
        };
        match suite {
            Suite::Decay => {
                nonempty("s_list", self.s_list.len())?;
                nonempty("b_grid", self.b_grid.len())?;
                nonempty("xi_grid", self.xi_grid.len())?;
                finite("b_grid", &self.b_grid)?;
                finite("xi_grid", &self.xi_grid)?;
                tol_ok("ft_tol", self.ft_tol, 1e-14, 1e-4)?;
                if !(self.flatness >= 1.0) {
                    return Err(Error::invalid("flatness must be >= 1"));
                }
            }
            Suite::Moment | Suite::Embed => {
                nonempty("s_list", self.s_list.len())?;
                nonempty("b_grid", self.b_grid.len())?;
                finite("b_grid", &self.b_grid)?;
                deltas()?;
                tol_ok("moment_tol", self.moment_tol, 1e-10, 1e-2)?;
                for &s in &self.s_list {
                    ActivationPower(s).require_positive()?;
                }
                if suite == Suite::Embed {
                    nonempty("d_list", self.d_list.len())?;
                    if self.d_list.contains(&0) {
                        return Err(Error::invalid("d_list entries must be >= 1"));
                    }
                    if self.width == 0 {
                        return Err(Error::invalid("width must be >= 1"));
                    }
                }
            }
            Suite::Tight => {
                if self.r_list.len() < 2 || self.r_list.iter().any(|r| !(*r >= 1.0 && r.is_finite())) {
                    return Err(Error::invalid("R_list needs at least two finite values >= 1"));
                }
                let lo = self.r_list.iter().cloned().fold(f64::INFINITY, f64::min);
                let hi = self.r_list.iter().cloned().fold(0.0, f64::max);
                if (hi / lo).log10() < 3.0 - 1e-9 {
                    return Err(Error::invalid(format!(
                        "R_list must span at least three decades, got [{lo:e}, {hi:e}]"
                    )));
                }
            }
            Suite::McRate => {
                nonempty("m_list", self.m_list.len())?;
                if self.m_list.contains(&0) || self.m_list.iter().any(|m| *m > self.total_atoms) {
                    return Err(Error::invalid("m_list entries must lie in [1, total_atoms]"));
                }
                if self.resamples == 0 || self.grid_points == 0 || self.mc_dim == 0 {
                    return Err(Error::invalid("resamples, grid_points and mc_dim must be >= 1"));
                }
            }
            Suite::Remark2 => {
                nonempty("s_frac_list", self.s_frac_list.len())?;
                if let Some(s) = self.s_frac_list.iter().find(|s| !(**s > 0.0 && **s < 3.0)) {
                    return Err(Error::invalid(format!("fractional powers must lie in (0, 3), got {s}")));
                }
                nonempty("b_grid", self.b_grid.len())?;
                finite("b_grid", &self.b_grid)?;
                nonempty("xi_grid", self.xi_grid.len())?;
                deltas()?;
                tol_ok("ft_tol", self.ft_tol, 1e-14, 1e-4)?;
                tol_ok("moment_tol", self.moment_tol, 1e-10, 1e-2)?;
            }
        }
        Ok(())
    }
}

/// Built-in regression targets for the fitter.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FitTarget {
    /// `max(1 - |x|, 0)` on a uniform grid of `[-1, 1]`.
    Triangular,
    Zero,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FitConfig {
    pub schema_version: u32,
    pub seed: u64,
    pub m: usize,
    pub s: u32,
    pub lambda: f64,
    pub initial_step: f64,
    /// Step multiplier after an accepted step.
    pub step_growth: f64,
    /// Armijo sufficient-decrease constant.
    pub armijo: f64,
    pub max_iter: usize,
    /// Stop once the backtracked step falls below this.
    pub min_step: f64,
    pub target: FitTarget,
    pub n_samples: usize,
    /// Multiplier applied to the built-in target values.
    pub y_scale: f64,
    /// Explicit samples; when present they replace the built-in target.
    pub x: Option<Vec<Vec<f64>>>,
    pub y: Option<Vec<f64>>,
    pub domain: DomainSpec,
    pub output: Option<PathBuf>,
}

impl Default for FitConfig {
    fn default() -> Self {
        FitConfig {
            schema_version: SCHEMA_VERSION,
            seed: 7,
            m: 8,
            s: 1,
            lambda: 1e-3,
            initial_step: 1.0,
            step_growth: 2.0,
            armijo: 1e-4,
            max_iter: 20_000,
            min_step: 1e-20,
            target: FitTarget::Triangular,
            n_samples: 201,
            y_scale: 1.0,
            x: None,
            y: None,
            domain: DomainSpec::unit_interval(),
            output: None,
        }
    }
}

impl FitConfig {
    pub fn resolve(file: Option<Value>, overrides: &[(String, Value)]) -> Result<Self> {
        let mut doc = serde_json::to_value(FitConfig::default())?;
        if let Some(file) = file {
            merge(&mut doc, file)?;
        }
        for (key, value) in overrides {
            apply_override(&mut doc, key, value.clone())?;
        }
        let cfg: FitConfig = serde_json::from_value(doc)?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        if self.schema_version != SCHEMA_VERSION {
            return Err(Error::invalid(format!("unsupported schema_version {}", self.schema_version)));
        }
        ActivationPower(self.s).require_positive()?;
        self.domain.validate()?;
        if self.m == 0 {
            return Err(Error::invalid("m must be >= 1"));
        }
        if !(self.lambda >= 0.0 && self.lambda.is_finite()) {
            return Err(Error::invalid("lambda must be finite and >= 0"));
        }
        if !(self.initial_step > 0.0 && self.step_growth >= 1.0 && self.armijo > 0.0 && self.armijo < 1.0) {
            return Err(Error::invalid(
                "need initial_step > 0, step_growth >= 1 and armijo in (0, 1)",
            ));
        }
        match (&self.x, &self.y) {
            (Some(x), Some(y)) => {
                if x.is_empty() || x.len() != y.len() {
                    return Err(Error::invalid("x and y must be non-empty and of equal length"));
                }
                let d = self.domain.dim();
                if let Some(bad) = x.iter().find(|p| p.len() != d) {
                    return Err(Error::DimensionMismatch {
                        expected: d,
                        got: bad.len(),
                    });
                }
            }
            (None, None) => {
                if self.n_samples < 2 {
                    return Err(Error::invalid("n_samples must be >= 2"));
                }
                if self.domain.dim() != 1 {
                    return Err(Error::invalid("built-in targets live on a 1D domain"));
                }
            }
            _ => return Err(Error::invalid("x and y must be given together")),
        }
        Ok(())
    }
}

/// Replaces top-level keys of `base` with those of `patch`.
pub(crate) fn merge(base: &mut Value, patch: Value) -> Result<()> {
    let Value::Object(patch) = patch else {
        return Err(Error::invalid("config file must contain a JSON object"));
    };
    let base = base.as_object_mut().expect("defaults serialize to an object");
    for (k, v) in patch {
        base.insert(k, v);
    }
    Ok(())
}

/// Sets one key, expanding the shorthands `delta` and `Rmax`.
fn apply_override(doc: &mut Value, key: &str, value: Value) -> Result<()> {
    let obj = doc.as_object_mut().expect("config is an object");
    let (key, value) = match key {
        "delta" if obj.contains_key("delta_grid") => ("delta_grid", Value::Array(vec![value])),
        "Rmax" if obj.contains_key("R_list") => {
            let rmax = value
                .as_f64()
                .ok_or_else(|| Error::invalid("Rmax must be a number"))?;
            let mut list = Vec::new();
            let mut r = 1e2;
            while r <= rmax * (1.0 + 1e-12) {
                list.push(Value::from(r));
                r *= 10.0;
            }
            ("R_list", Value::Array(list))
        }
        _ => (key, value),
    };
    if !obj.contains_key(key) {
        return Err(Error::invalid(format!("unknown config key '{key}'")));
    }
    obj.insert(key.to_string(), value);
    Ok(())
}

/// Parses `k=v`; `v` is read as JSON when possible, else as a string.
pub fn parse_override(arg: &str) -> Result<(String, Value)> {
    let (k, v) = arg
        .split_once('=')
        .ok_or_else(|| Error::invalid(format!("override '{arg}' is not of the form key=value")))?;
    let k = k.trim();
    if k.is_empty() {
        return Err(Error::invalid(format!("override '{arg}' has an empty key")));
    }
    let value = serde_json::from_str(v.trim()).unwrap_or_else(|_| Value::String(v.to_string()));
    Ok((k.to_string(), value))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults_validate() {
        for suite in [Suite::Decay, Suite::Moment, Suite::Embed, Suite::Tight, Suite::McRate, Suite::Remark2] {
            ExperimentConfig::defaults(suite).validate(suite).unwrap();
        }
        FitConfig::default().validate().unwrap();
    }

    #[test]
    fn delta_shorthand_and_rejection() {
        let ok = ExperimentConfig::resolve(Suite::Embed, None, &[parse_override("delta=0.3").unwrap()]).unwrap();
        assert_eq!(ok.delta_grid, vec![0.3]);
        let err = ExperimentConfig::resolve(Suite::Embed, None, &[parse_override("delta=1.5").unwrap()]);
        assert!(err.unwrap_err().is_validation());
    }

    #[test]
    fn rmax_expands_to_decades() {
        let cfg = ExperimentConfig::resolve(Suite::Tight, None, &[parse_override("Rmax=1e6").unwrap()]).unwrap();
        assert_eq!(cfg.r_list, vec![1e2, 1e3, 1e4, 1e5, 1e6]);
        let short = ExperimentConfig::resolve(Suite::Tight, None, &[parse_override("Rmax=1e4").unwrap()]);
        assert!(short.is_err());
    }

    #[test]
    fn unknown_keys_rejected() {
        assert!(ExperimentConfig::resolve(Suite::Decay, None, &[parse_override("nope=1").unwrap()]).is_err());
        let file = serde_json::json!({"seed": 3, "typo": true});
        assert!(ExperimentConfig::resolve(Suite::Decay, Some(file), &[]).is_err());
    }

    #[test]
    fn override_values_parse_as_json() {
        assert_eq!(parse_override("seed=5").unwrap().1, Value::from(5));
        assert_eq!(parse_override("domain=box").unwrap().1, Value::from("box"));
        assert!(parse_override("novalue").is_err());
    }
}
