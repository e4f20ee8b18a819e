//! Logarithmic growth of the truncated first moment of the triangular hat.

use std::f64::consts::PI;

use crate::domain::DomainSpec;
use crate::error::Result;
use crate::experiments::config::ExperimentConfig;
use crate::experiments::output::{Cell, SuiteOutput, Table};
use crate::experiments::stats::{linear_fit, LinearFit};
use crate::network::{barron_cost_upper, TwoLayerNetwork};
use crate::norms::truncated_triangular_moment;

pub const SLOPE_REL_TOL: f64 = 0.05;
pub const RESIDUAL_FRACTION: f64 = 0.02;

#[derive(Debug, Clone, PartialEq)]
pub struct TightnessFit {
    pub r: Vec<f64>,
    pub values: Vec<f64>,
    /// Fit of `S(R)` against `ln R`.
    pub fit: LinearFit,
}

impl TightnessFit {
    pub fn slope_ok(&self) -> bool {
        (self.fit.slope - 2.0 / PI).abs() <= SLOPE_REL_TOL * 2.0 / PI
    }

    /// Largest residual relative to the range of `S` over the grid.
    pub fn residual_fraction(&self) -> f64 {
        let hi = self.values.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        let lo = self.values.iter().cloned().fold(f64::INFINITY, f64::min);
        self.fit.max_abs_residual() / (hi - lo)
    }
}

pub fn tightness_fit(r_list: &[f64]) -> Result<TightnessFit> {
    let values = r_list
        .iter()
        .map(|&r| truncated_triangular_moment(r))
        .collect::<Result<Vec<_>>>()?;
    let x: Vec<f64> = r_list.iter().map(|r| r.ln()).collect();
    let fit = linear_fit(&x, &values);
    Ok(TightnessFit {
        r: r_list.to_vec(),
        values,
        fit,
    })
}

pub fn run_tightness_suite(cfg: &ExperimentConfig) -> Result<SuiteOutput> {
    let t = tightness_fit(&cfg.r_list)?;
    let mut table = Table::new(&["R", "ln_R", "S", "residual"]);
    for i in 0..t.r.len() {
        table.push(vec![
            Cell::Float(t.r[i]),
            Cell::Float(t.r[i].ln()),
            Cell::Float(t.values[i]),
            Cell::Float(t.fit.residuals[i]),
        ]);
    }
    let triangle = barron_cost_upper(&TwoLayerNetwork::triangular_hat(), &DomainSpec::unit_interval())?;
    let mut out = SuiteOutput::new("tight", serde_json::to_value(cfg)?, table);
    out.constant("slope", t.fit.slope);
    out.constant("intercept", t.fit.intercept);
    out.constant("expected_slope", 2.0 / PI);
    out.constant("residual_fraction", t.residual_fraction());
    out.constant("barron_cost_triangular", triangle);
    out.constant("quadrature_rel_tol", 1e-11);
    out.flag("slope_within_5pct", t.slope_ok());
    out.flag("residual_small", t.residual_fraction() < RESIDUAL_FRACTION);
    Ok(out)
}
