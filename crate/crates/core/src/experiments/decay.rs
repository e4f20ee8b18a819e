//! Decay envelope of profile transforms: `|ĥ(ξ)|(1+|ξ|)^{s+1}/(1+|b|)^s`.

use rayon::prelude::*;
use serde_json::json;

use crate::cutoff::NeuronProfile;
use crate::domain::ActivationPower;
use crate::error::Result;
use crate::experiments::config::ExperimentConfig;
use crate::experiments::output::{Cell, SuiteOutput, Table};
use crate::fourier::SpectrumLadder;

/// Envelope ratios of one `(s, b)` profile.
#[derive(Debug, Clone, PartialEq)]
pub struct DecayRow {
    pub s: u32,
    pub b: f64,
    pub xi: Vec<f64>,
    pub abs_value: Vec<f64>,
    pub ratio: Vec<f64>,
    pub err: Vec<f64>,
    pub converged: bool,
}

impl DecayRow {
    /// Largest ratio among frequencies below `xi_ref`.
    pub fn reference_max(&self, xi_ref: f64) -> f64 {
        self.xi
            .iter()
            .zip(&self.ratio)
            .filter(|(x, _)| **x < xi_ref)
            .fold(0.0, |m, (_, r)| m.max(*r))
    }

    /// Largest `ratio / reference_max` over frequencies at or above `xi_ref`.
    pub fn excess(&self, xi_ref: f64) -> f64 {
        let reference = self.reference_max(xi_ref);
        self.xi
            .iter()
            .zip(&self.ratio)
            .filter(|(x, _)| **x >= xi_ref)
            .map(|(_, r)| if *r == 0.0 { 0.0 } else { r / reference })
            .fold(0.0, f64::max)
    }

    pub fn max_ratio(&self) -> f64 {
        self.ratio.iter().cloned().fold(0.0, f64::max)
    }
}

pub fn decay_row(s: u32, b: f64, xi: &[f64], tol: f64) -> DecayRow {
    let profile = NeuronProfile::new(ActivationPower(s), b);
    let scale = profile.scale();
    let ladder = SpectrumLadder::new(profile);
    let mut row = DecayRow {
        s,
        b,
        xi: xi.to_vec(),
        abs_value: Vec::with_capacity(xi.len()),
        ratio: Vec::with_capacity(xi.len()),
        err: Vec::with_capacity(xi.len()),
        converged: true,
    };
    for &x in xi {
        let sample = ladder.eval(x, tol);
        let a = sample.abs();
        row.abs_value.push(a);
        row.ratio.push(a * (1.0 + x.abs()).powi(s as i32 + 1) / scale);
        row.err.push(sample.err_estimate);
        row.converged &= sample.converged;
    }
    row
}

pub fn run_decay_suite(cfg: &ExperimentConfig) -> Result<SuiteOutput> {
    let cells: Vec<(u32, f64)> = cfg
        .s_list
        .iter()
        .flat_map(|&s| cfg.b_grid.iter().map(move |&b| (s, b)))
        .collect();
    let rows: Vec<DecayRow> = cells
        .par_iter()
        .map(|&(s, b)| decay_row(s, b, &cfg.xi_grid, cfg.ft_tol))
        .collect();

    let mut table = Table::new(&["s", "b", "xi", "abs_ft", "ratio", "err_estimate", "converged"]);
    for row in &rows {
        for i in 0..row.xi.len() {
            table.push(vec![
                Cell::from(row.s),
                Cell::Float(row.b),
                Cell::Float(row.xi[i]),
                Cell::Float(row.abs_value[i]),
                Cell::Float(row.ratio[i]),
                Cell::Float(row.err[i]),
                Cell::Bool(row.converged),
            ]);
        }
    }
    let mut out = SuiteOutput::new("decay", serde_json::to_value(cfg)?, table);
    out.constant("ft_tol", cfg.ft_tol);
    out.constant("flatness", cfg.flatness);
    out.constant("xi_reference", cfg.xi_reference);
    let mut all_flat = true;
    for &s in &cfg.s_list {
        let of_s: Vec<&DecayRow> = rows.iter().filter(|r| r.s == s).collect();
        let envelope = of_s.iter().map(|r| r.max_ratio()).fold(0.0, f64::max);
        let excess = of_s.iter().map(|r| r.excess(cfg.xi_reference)).fold(0.0, f64::max);
        let flat = excess <= cfg.flatness;
        all_flat &= flat;
        out.constant(&format!("C_hat_s{s}"), envelope);
        out.constant(&format!("max_excess_s{s}"), excess);
        out.flag(&format!("flat_s{s}"), flat);
    }
    let unflat: Vec<_> = rows
        .iter()
        .filter(|r| r.excess(cfg.xi_reference) > cfg.flatness)
        .map(|r| json!({"s": r.s, "b": r.b, "excess": r.excess(cfg.xi_reference)}))
        .collect();
    out.constant("non_flat_rows", unflat);
    out.flag("envelope_flat", all_flat);
    out.converged = rows.iter().all(|r| r.converged);
    Ok(out)
}
