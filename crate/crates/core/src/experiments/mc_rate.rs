//! Sup-norm error of width-`m` subsamples of a large atomic measure.

use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::domain::{dot, ActivationPower, DomainSpec};
use crate::error::Result;
use crate::experiments::config::ExperimentConfig;
use crate::experiments::derive_seed;
use crate::experiments::embedding::random_direction;
use crate::experiments::output::{Cell, SuiteOutput, Table};
use crate::experiments::stats::{domain_grid, linear_fit};
use crate::network::{Atom, TwoLayerNetwork};

pub const RATE_RANGE: (f64, f64) = (-0.65, -0.35);

/// Ground truth: `a ~ U[-1, 1]`, unit directions, `b ~ U[-1, 1]`.
pub fn ground_truth(s: ActivationPower, total: usize, domain: &DomainSpec, seed: u64) -> Result<TwoLayerNetwork> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let atoms = (0..total)
        .map(|_| {
            let a = rng.gen_range(-1.0..=1.0);
            let w = random_direction(&mut rng, domain);
            let b = rng.gen_range(-1.0..=1.0);
            Atom::new(a, w, b)
        })
        .collect();
    TwoLayerNetwork::new(s, atoms)
}

fn eval_subset(net: &TwoLayerNetwork, idx: &[usize], x: &[f64]) -> f64 {
    let s = net.s();
    let atoms = net.atoms();
    let sum: f64 = idx.iter().map(|&j| atoms[j].a * s.activate(dot(&atoms[j].w, x) + atoms[j].b)).sum();
    sum / idx.len() as f64
}

/// Mean (over resamples) sup-norm error of i.i.d. width-`m` subsamples,
/// for each `m`. Resample `r` of width `m` draws from its own seeded stream.
pub fn mc_errors(
    truth: &TwoLayerNetwork,
    grid: &[Vec<f64>],
    m_list: &[usize],
    resamples: usize,
    seed: u64,
) -> Vec<f64> {
    let full: Vec<f64> = grid.par_iter().map(|x| truth.eval(x)).collect();
    let total = truth.width();
    m_list
        .iter()
        .map(|&m| {
            let errs: Vec<f64> = (0..resamples)
                .into_par_iter()
                .map(|r| {
                    let idx: Vec<usize> = if m == total {
                        (0..total).collect()
                    } else {
                        let mut rng = ChaCha8Rng::seed_from_u64(derive_seed(seed, &[m as u64, r as u64]));
                        (0..m).map(|_| rng.gen_range(0..total)).collect()
                    };
                    grid.iter()
                        .zip(&full)
                        .map(|(x, f)| (eval_subset(truth, &idx, x) - f).abs())
                        .fold(0.0, f64::max)
                })
                .collect();
            errs.iter().sum::<f64>() / resamples as f64
        })
        .collect()
}

pub fn run_mc_rate_suite(cfg: &ExperimentConfig) -> Result<SuiteOutput> {
    let domain = cfg.domain.build(cfg.mc_dim);
    let s = ActivationPower(cfg.mc_s);
    let truth = ground_truth(s, cfg.total_atoms, &domain, derive_seed(cfg.seed, &[3]))?;
    let grid = domain_grid(&domain, cfg.grid_points);
    let errors = mc_errors(&truth, &grid, &cfg.m_list, cfg.resamples, derive_seed(cfg.seed, &[4]));

    let mut table = Table::new(&["m", "mean_sup_error"]);
    for (m, e) in cfg.m_list.iter().zip(&errors) {
        table.push(vec![Cell::from(*m), Cell::Float(*e)]);
    }
    let mut out = SuiteOutput::new("mc-rate", serde_json::to_value(cfg)?, table);
    out.constant("grid", "halton");
    if cfg.m_list.len() >= 2 && errors.iter().all(|e| *e > 0.0) {
        let x: Vec<f64> = cfg.m_list.iter().map(|m| (*m as f64).ln()).collect();
        let y: Vec<f64> = errors.iter().map(|e| e.ln()).collect();
        let fit = linear_fit(&x, &y);
        out.constant("rate_exponent", fit.slope);
        out.constant("intercept", fit.intercept);
        out.flag("rate_in_range", (RATE_RANGE.0..=RATE_RANGE.1).contains(&fit.slope));
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn full_measure_has_zero_error() {
        let dom = DomainSpec::ball(1.0, 3);
        let truth = ground_truth(ActivationPower(1), 40, &dom, 5).unwrap();
        let grid = domain_grid(&dom, 50);
        assert_eq!(mc_errors(&truth, &grid, &[40], 3, 9), vec![0.0; 1]);
    }

    #[test]
    fn errors_scale_with_amplitudes() {
        let dom = DomainSpec::ball(1.0, 3);
        let truth = ground_truth(ActivationPower(1), 200, &dom, 5).unwrap();
        let grid = domain_grid(&dom, 100);
        let e1 = mc_errors(&truth, &grid, &[4, 16], 5, 9);
        let e2 = mc_errors(&truth.scaled(2.0), &grid, &[4, 16], 5, 9);
        for (a, b) in e1.iter().zip(&e2) {
            assert!((b - 2.0 * a).abs() <= 1e-12 * b);
        }
    }
}
