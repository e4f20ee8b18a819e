//! Per-neuron moments `M(s, b, s-δ)` over a `(b, δ)` grid: the δ-scaled
//! chain `δ·M/(1+|b|)^s` and the blow-up slope of `M(s, 0, s-δ)` in δ.

use rayon::prelude::*;

use crate::cutoff::NeuronProfile;
use crate::domain::ActivationPower;
use crate::error::Result;
use crate::experiments::config::ExperimentConfig;
use crate::experiments::output::{Cell, SuiteOutput, Table};
use crate::experiments::stats::linear_fit;
use crate::norms::{MomentEngine, MomentEstimate};

/// Allowed spread of the chain constant, and the slope window.
pub const CHAIN_SPREAD: f64 = 10.0;
pub const SLOPE_RANGE: (f64, f64) = (-1.15, -0.85);

#[derive(Debug, Clone, PartialEq)]
pub struct MomentCell {
    pub s: u32,
    pub b: f64,
    pub delta: f64,
    pub estimate: MomentEstimate,
}

impl MomentCell {
    /// `δ·M/(1+|b|)^s`.
    pub fn scaled(&self) -> f64 {
        self.delta * self.estimate.value / (1.0 + self.b.abs()).powi(self.s as i32)
    }
}

pub fn moment_grid(s_list: &[u32], b_grid: &[f64], deltas: &[f64], tol: f64) -> Result<Vec<MomentCell>> {
    let jobs: Vec<(u32, f64)> = s_list
        .iter()
        .flat_map(|&s| b_grid.iter().map(move |&b| (s, b)))
        .collect();
    let per_job: Vec<Result<Vec<MomentCell>>> = jobs
        .par_iter()
        .map(|&(s, b)| {
            let engine = MomentEngine::new(NeuronProfile::new(ActivationPower(s), b), tol)?;
            deltas
                .iter()
                .map(|&delta| {
                    Ok(MomentCell {
                        s,
                        b,
                        delta,
                        estimate: engine.moment(s as f64 - delta)?,
                    })
                })
                .collect()
        })
        .collect();
    let mut out = Vec::new();
    for cells in per_job {
        out.extend(cells?);
    }
    Ok(out)
}

/// Chain statistics for one `s`.
#[derive(Debug, Clone, PartialEq)]
pub struct ChainSummary {
    /// Largest `δ·M/(1+|b|)^s` on the grid.
    pub k_s: f64,
    /// `G(δ) = max_b δ·M/(1+|b|)^s` per δ, in grid order.
    pub g: Vec<f64>,
    /// `G(δ_min) / min_δ G(δ)`.
    pub delta_spread: f64,
    /// Worst `value(δ_min) / min_δ value` over nonzero b rows.
    pub row_spread: f64,
    /// `max / min` over all nonzero cells of the grid.
    pub full_grid_spread: f64,
}

impl ChainSummary {
    /// Max/min over every nonzero cell stays within [`CHAIN_SPREAD`].
    /// Zero neurons (profile vanishing on the cutoff support) are skipped.
    pub fn uniform(&self) -> bool {
        self.full_grid_spread > 0.0 && self.full_grid_spread <= CHAIN_SPREAD
    }
}

pub fn chain_summary(cells: &[MomentCell], s: u32, deltas: &[f64]) -> ChainSummary {
    let of_s: Vec<&MomentCell> = cells.iter().filter(|c| c.s == s).collect();
    let k_s = of_s.iter().map(|c| c.scaled()).fold(0.0, f64::max);
    let g: Vec<f64> = deltas
        .iter()
        .map(|d| {
            of_s.iter()
                .filter(|c| c.delta == *d)
                .map(|c| c.scaled())
                .fold(0.0, f64::max)
        })
        .collect();
    let d_min = deltas.iter().cloned().fold(f64::INFINITY, f64::min);
    let at = |d: f64| deltas.iter().position(|x| *x == d).expect("delta in grid");
    let g_min = g.iter().cloned().fold(f64::INFINITY, f64::min);
    let delta_spread = if g_min > 0.0 { g[at(d_min)] / g_min } else { 0.0 };

    let mut bs: Vec<f64> = of_s.iter().map(|c| c.b).collect();
    bs.dedup();
    let mut row_spread: f64 = 0.0;
    for b in bs {
        let row: Vec<&&MomentCell> = of_s.iter().filter(|c| c.b == b).collect();
        let min = row.iter().map(|c| c.scaled()).fold(f64::INFINITY, f64::min);
        if min > 0.0 {
            let last = row.iter().find(|c| c.delta == d_min).map_or(0.0, |c| c.scaled());
            row_spread = row_spread.max(last / min);
        }
    }
    let nonzero: Vec<f64> = of_s.iter().map(|c| c.scaled()).filter(|v| *v > 0.0).collect();
    let lo = nonzero.iter().cloned().fold(f64::INFINITY, f64::min);
    let full_grid_spread = if nonzero.is_empty() { 0.0 } else { k_s / lo };
    ChainSummary {
        k_s,
        g,
        delta_spread,
        row_spread,
        full_grid_spread,
    }
}

/// Least-squares slope of `ln M` against `ln δ`.
pub fn blowup_slope(cells: &[MomentCell], s: u32, b: f64) -> Option<f64> {
    let pts: Vec<(f64, f64)> = cells
        .iter()
        .filter(|c| c.s == s && c.b == b && c.estimate.value > 0.0)
        .map(|c| (c.delta.ln(), c.estimate.value.ln()))
        .collect();
    if pts.len() < 2 {
        return None;
    }
    let (x, y): (Vec<f64>, Vec<f64>) = pts.into_iter().unzip();
    Some(linear_fit(&x, &y).slope)
}

pub fn run_moment_suite(cfg: &ExperimentConfig) -> Result<SuiteOutput> {
    let cells = moment_grid(&cfg.s_list, &cfg.b_grid, &cfg.delta_grid, cfg.moment_tol)?;
    let mut table = Table::new(&[
        "s",
        "b",
        "delta",
        "order",
        "moment",
        "tail_bound",
        "quad_err",
        "truncation_xi",
        "scaled",
        "converged",
    ]);
    for c in &cells {
        table.push(vec![
            Cell::from(c.s),
            Cell::Float(c.b),
            Cell::Float(c.delta),
            Cell::Float(c.s as f64 - c.delta),
            Cell::Float(c.estimate.value),
            Cell::Float(c.estimate.tail_bound),
            Cell::Float(c.estimate.quad_err),
            Cell::Float(c.estimate.truncation_xi),
            Cell::Float(c.scaled()),
            Cell::Bool(c.estimate.converged),
        ]);
    }
    let mut out = SuiteOutput::new("moment", serde_json::to_value(cfg)?, table);
    out.constant("moment_tol", cfg.moment_tol);
    out.constant("chain_spread_limit", CHAIN_SPREAD);
    out.constant("slope_range", vec![SLOPE_RANGE.0, SLOPE_RANGE.1]);
    for &s in &cfg.s_list {
        let chain = chain_summary(&cells, s, &cfg.delta_grid);
        out.constant(&format!("K_s{s}"), chain.k_s);
        out.constant(&format!("G_s{s}"), chain.g.clone());
        out.constant(&format!("delta_spread_s{s}"), chain.delta_spread);
        out.constant(&format!("row_spread_s{s}"), chain.row_spread);
        out.constant(&format!("full_grid_spread_s{s}"), chain.full_grid_spread);
        out.flag(&format!("chain_uniform_s{s}"), chain.uniform());
        if cfg.b_grid.contains(&0.0) && cfg.delta_grid.len() >= 2 {
            if let Some(slope) = blowup_slope(&cells, s, 0.0) {
                out.constant(&format!("blowup_slope_s{s}"), slope);
                out.flag(
                    &format!("blowup_slope_s{s}"),
                    (SLOPE_RANGE.0..=SLOPE_RANGE.1).contains(&slope),
                );
            }
        }
    }
    out.converged = cells.iter().all(|c| c.estimate.converged);
    Ok(out)
}
