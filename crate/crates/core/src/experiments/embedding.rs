//! Ratios `δ·spectral_upper / barron_cost_upper` for random networks, with
//! the `(a_j, b_j)` lists held fixed across input dimensions.

use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;

use crate::domain::{ActivationPower, DomainSpec};
use crate::error::Result;
use crate::experiments::config::ExperimentConfig;
use crate::experiments::derive_seed;
use crate::experiments::output::{Cell, SuiteOutput, Table};
use crate::network::{barron_cost_upper, Atom, TwoLayerNetwork};
use crate::norms::SpectralEstimator;

/// Relative spread across dimensions that still counts as identical.
pub const DIMENSION_TOL: f64 = 1e-9;

/// `m` pairs `a ~ U[-1, 1]`, `b ~ U[-3, 3]`.
pub fn random_outer(m: usize, seed: u64) -> Vec<(f64, f64)> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..m)
        .map(|_| (rng.gen_range(-1.0..=1.0), rng.gen_range(-3.0..=3.0)))
        .collect()
}

/// A direction with `‖w‖_Ω = 1`, from a normalised Gaussian draw.
pub fn random_direction<R: Rng>(rng: &mut R, domain: &DomainSpec) -> Vec<f64> {
    loop {
        let g: Vec<f64> = (0..domain.dim()).map(|_| rng.sample(StandardNormal)).collect();
        let c = domain.support_norm_unchecked(&g);
        if c > 0.0 {
            return g.iter().map(|x| x / c).collect();
        }
    }
}

/// Network with the given `(a, b)` list and random unit directions.
pub fn embed_network(
    s: ActivationPower,
    outer: &[(f64, f64)],
    domain: &DomainSpec,
    seed: u64,
) -> Result<TwoLayerNetwork> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let atoms = outer
        .iter()
        .map(|&(a, b)| Atom::new(a, random_direction(&mut rng, domain), b))
        .collect();
    TwoLayerNetwork::new(s, atoms)
}

/// One suite row; `ratio` is `None` when the Barron cost is zero.
#[derive(Debug, Clone, PartialEq)]
pub struct EmbeddingRow {
    pub s: u32,
    pub d: usize,
    pub delta: f64,
    pub spectral: f64,
    pub spectral_err: f64,
    pub barron: f64,
    pub ratio: Option<f64>,
    pub converged: bool,
}

pub fn embedding_rows(
    estimator: &mut SpectralEstimator,
    net: &TwoLayerNetwork,
    domain: &DomainSpec,
    deltas: &[f64],
) -> Result<Vec<EmbeddingRow>> {
    let barron = barron_cost_upper(net, domain)?;
    deltas
        .iter()
        .map(|&delta| {
            let bound = estimator.spectral_upper(net, domain, delta)?;
            Ok(EmbeddingRow {
                s: net.s().get(),
                d: domain.dim(),
                delta,
                spectral: bound.value,
                spectral_err: bound.err,
                barron,
                ratio: (barron > 0.0).then(|| delta * bound.value / barron),
                converged: bound.converged,
            })
        })
        .collect()
}

/// Largest relative spread of `ratio` across dimensions for fixed `(s, δ)`.
pub fn dimension_spread(rows: &[EmbeddingRow]) -> f64 {
    let mut worst: f64 = 0.0;
    for r in rows {
        for q in rows.iter().filter(|q| q.s == r.s && q.delta == r.delta) {
            if let (Some(x), Some(y)) = (r.ratio, q.ratio) {
                let scale = x.abs().max(y.abs());
                if scale > 0.0 {
                    worst = worst.max((x - y).abs() / scale);
                }
            }
        }
    }
    worst
}

pub fn run_embedding_suite(cfg: &ExperimentConfig) -> Result<SuiteOutput> {
    let per_s: Vec<Result<Vec<EmbeddingRow>>> = cfg
        .s_list
        .par_iter()
        .map(|&s| {
            let outer = random_outer(cfg.width, derive_seed(cfg.seed, &[1, s as u64]));
            let mut estimator = SpectralEstimator::new(cfg.moment_tol)?;
            let mut rows = Vec::new();
            for &d in &cfg.d_list {
                let domain = cfg.domain.build(d);
                let net = embed_network(
                    ActivationPower(s),
                    &outer,
                    &domain,
                    derive_seed(cfg.seed, &[2, s as u64, d as u64]),
                )?;
                rows.extend(embedding_rows(&mut estimator, &net, &domain, &cfg.delta_grid)?);
            }
            Ok(rows)
        })
        .collect();
    let mut rows = Vec::new();
    for r in per_s {
        rows.extend(r?);
    }

    let mut table = Table::new(&[
        "s",
        "d",
        "delta",
        "spectral_upper",
        "spectral_err",
        "barron_cost",
        "ratio",
        "skipped",
        "converged",
    ]);
    for r in &rows {
        table.push(vec![
            Cell::from(r.s),
            Cell::from(r.d),
            Cell::Float(r.delta),
            Cell::Float(r.spectral),
            Cell::Float(r.spectral_err),
            Cell::Float(r.barron),
            Cell::Float(r.ratio.unwrap_or(f64::NAN)),
            Cell::Bool(r.ratio.is_none()),
            Cell::Bool(r.converged),
        ]);
    }
    let mut out = SuiteOutput::new("embed", serde_json::to_value(cfg)?, table);
    out.constant("moment_tol", cfg.moment_tol);
    let spread = dimension_spread(&rows);
    out.constant("dimension_spread", spread);
    out.constant("dimension_tol", DIMENSION_TOL);
    out.flag("dimension_independent", spread <= DIMENSION_TOL);
    for &s in &cfg.s_list {
        let ratios: Vec<f64> = rows.iter().filter(|r| r.s == s).filter_map(|r| r.ratio).collect();
        if ratios.is_empty() {
            out.constant(&format!("K_s{s}"), serde_json::Value::Null);
            continue;
        }
        let max = ratios.iter().cloned().fold(0.0, f64::max);
        let min = ratios.iter().cloned().fold(f64::INFINITY, f64::min);
        out.constant(&format!("K_s{s}"), max);
        out.flag(&format!("delta_uniform_s{s}"), min > 0.0 && max / min <= 10.0);
    }
    out.converged = rows.iter().all(|r| r.converged);
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn directions_are_unit() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for dom in [DomainSpec::ball(1.0, 5), DomainSpec::unit_box(3)] {
            for _ in 0..20 {
                let w = random_direction(&mut rng, &dom);
                assert!((dom.support_norm(&w).unwrap() - 1.0).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn zero_amplitudes_are_skipped() {
        let outer = vec![(0.0, 0.5), (0.0, -1.0)];
        let dom = DomainSpec::ball(1.0, 2);
        let net = embed_network(ActivationPower(1), &outer, &dom, 1).unwrap();
        let mut est = SpectralEstimator::new(1e-4).unwrap();
        let rows = embedding_rows(&mut est, &net, &dom, &[0.5]).unwrap();
        assert_eq!(rows[0].ratio, None);
        assert_eq!(rows[0].spectral, 0.0);
    }
}
