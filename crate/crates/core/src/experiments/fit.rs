//! Path-norm regularised least squares for two-layer ReLU^s networks.
//!
//! Minimises `mean((f(x_i) - y_i)^2) + λ·(1/m)Σ|a_j|(‖w_j‖_Ω + |b_j|)^s`
//! by subgradient descent with Armijo backtracking. Only steps that lower
//! the objective are accepted, so the recorded history never increases.

use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde_json::json;

use crate::domain::{dot, ActivationPower, DomainSpec};
use crate::error::{Error, Result};
use crate::experiments::config::{FitConfig, FitTarget};
use crate::experiments::embedding::random_direction;
use crate::experiments::output::{Cell, SuiteOutput, Table};
use crate::network::{barron_cost_upper, Atom, TwoLayerNetwork};

#[derive(Debug, Clone)]
pub struct FitResult {
    pub network: TwoLayerNetwork,
    /// Objective at initialisation and after every accepted step.
    pub history: Vec<f64>,
    /// Path cost of the final network.
    pub norm_estimate: f64,
    pub mse: f64,
    pub iterations: usize,
    /// True if the step size collapsed before the iteration budget ran out.
    pub stalled: bool,
}

/// Samples the fitter trains on.
pub fn fit_samples(cfg: &FitConfig) -> (Vec<Vec<f64>>, Vec<f64>) {
    if let (Some(x), Some(y)) = (&cfg.x, &cfg.y) {
        return (x.clone(), y.clone());
    }
    let n = cfg.n_samples;
    let x: Vec<Vec<f64>> = (0..n).map(|i| vec![-1.0 + 2.0 * i as f64 / (n - 1) as f64]).collect();
    let y = x
        .iter()
        .map(|p| match cfg.target {
            FitTarget::Triangular => cfg.y_scale * (1.0 - p[0].abs()).max(0.0),
            FitTarget::Zero => 0.0,
        })
        .collect();
    (x, y)
}

/// Flat parameter vector `[a; w (row-major); b]`.
struct Model<'a> {
    s: ActivationPower,
    m: usize,
    d: usize,
    lambda: f64,
    domain: &'a DomainSpec,
    x: &'a [Vec<f64>],
    y: &'a [f64],
}

impl Model<'_> {
    fn a<'p>(&self, p: &'p [f64]) -> &'p [f64] {
        &p[..self.m]
    }
    fn w<'p>(&self, p: &'p [f64], j: usize) -> &'p [f64] {
        &p[self.m + j * self.d..self.m + (j + 1) * self.d]
    }
    fn b<'p>(&self, p: &'p [f64]) -> &'p [f64] {
        &p[self.m + self.m * self.d..]
    }

    fn penalty_base(&self, p: &[f64], j: usize) -> f64 {
        self.domain.support_norm_unchecked(self.w(p, j)) + self.b(p)[j].abs()
    }

    fn predict(&self, p: &[f64], x: &[f64]) -> f64 {
        let (a, b) = (self.a(p), self.b(p));
        (0..self.m)
            .map(|j| a[j] * self.s.activate(dot(self.w(p, j), x) + b[j]))
            .sum::<f64>()
            / self.m as f64
    }

    fn mse(&self, p: &[f64]) -> f64 {
        self.x
            .iter()
            .zip(self.y)
            .map(|(x, y)| (self.predict(p, x) - y).powi(2))
            .sum::<f64>()
            / self.x.len() as f64
    }

    fn path_cost(&self, p: &[f64]) -> f64 {
        let a = self.a(p);
        (0..self.m)
            .map(|j| a[j].abs() * self.penalty_base(p, j).powi(self.s.get() as i32))
            .sum::<f64>()
            / self.m as f64
    }

    fn objective(&self, p: &[f64]) -> f64 {
        self.mse(p) + self.lambda * self.path_cost(p)
    }

    fn gradient(&self, p: &[f64]) -> Vec<f64> {
        let (m, d, n) = (self.m, self.d, self.x.len() as f64);
        let s = self.s.get() as i32;
        let mut g = vec![0.0; p.len()];
        let (a, b) = (self.a(p), self.b(p));
        for (x, y) in self.x.iter().zip(self.y) {
            let z: Vec<f64> = (0..m).map(|j| dot(self.w(p, j), x) + b[j]).collect();
            let f: f64 = (0..m).map(|j| a[j] * self.s.activate(z[j])).sum::<f64>() / m as f64;
            let r = 2.0 * (f - y) / n;
            for j in 0..m {
                if z[j] <= 0.0 {
                    continue;
                }
                g[j] += r * z[j].powi(s) / m as f64;
                let dz = r * a[j] * s as f64 * z[j].powi(s - 1) / m as f64;
                for k in 0..d {
                    g[m + j * d + k] += dz * x[k];
                }
                g[m + m * d + j] += dz;
            }
        }
        if self.lambda > 0.0 {
            for j in 0..m {
                let u = self.penalty_base(p, j);
                let sign_a = if a[j] == 0.0 { 0.0 } else { a[j].signum() };
                g[j] += self.lambda * sign_a * u.powi(s) / m as f64;
                let c = self.lambda * a[j].abs() * s as f64 * u.powi(s - 1) / m as f64;
                let sub = self.domain.support_norm_subgradient(self.w(p, j));
                for k in 0..d {
                    g[m + j * d + k] += c * sub[k];
                }
                let sign_b = if b[j] == 0.0 { 0.0 } else { b[j].signum() };
                g[m + m * d + j] += c * sign_b;
            }
        }
        g
    }

    fn network(&self, p: &[f64]) -> Result<TwoLayerNetwork> {
        let atoms = (0..self.m)
            .map(|j| Atom::new(self.a(p)[j], self.w(p, j).to_vec(), self.b(p)[j]))
            .collect();
        TwoLayerNetwork::new(self.s, atoms)
    }
}

pub fn fit_network(cfg: &FitConfig) -> Result<FitResult> {
    cfg.validate()?;
    let (x, y) = fit_samples(cfg);
    let s = ActivationPower(cfg.s);
    let d = cfg.domain.dim();
    let model = Model {
        s,
        m: cfg.m,
        d,
        lambda: cfg.lambda,
        domain: &cfg.domain,
        x: &x,
        y: &y,
    };

    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let mut p = vec![0.0; cfg.m * (d + 2)];
    for j in 0..cfg.m {
        let w = random_direction(&mut rng, &cfg.domain);
        p[cfg.m + j * d..cfg.m + (j + 1) * d].copy_from_slice(&w);
    }
    for j in 0..cfg.m {
        p[cfg.m + cfg.m * d + j] = rng.gen_range(-1.0..=1.0);
    }

    let mut obj = model.objective(&p);
    if !obj.is_finite() {
        return Err(Error::NotConverged(format!("objective is {obj} at initialisation")));
    }
    let mut history = vec![obj];
    let mut step = cfg.initial_step;
    let mut stalled = false;
    let mut iterations = 0;
    while iterations < cfg.max_iter {
        let g = model.gradient(&p);
        let gg: f64 = g.iter().map(|v| v * v).sum();
        if !gg.is_finite() {
            return Err(Error::NotConverged(format!(
                "gradient diverged at iteration {iterations} (objective {obj})"
            )));
        }
        if gg == 0.0 {
            break;
        }
        let accepted = loop {
            let trial: Vec<f64> = p.iter().zip(&g).map(|(v, gi)| v - step * gi).collect();
            let t = model.objective(&trial);
            if t.is_finite() && t <= obj - cfg.armijo * step * gg {
                break Some((trial, t));
            }
            step *= 0.5;
            if step < cfg.min_step {
                break None;
            }
        };
        let Some((trial, t)) = accepted else {
            stalled = true;
            break;
        };
        p = trial;
        obj = t;
        history.push(obj);
        step *= cfg.step_growth;
        iterations += 1;
    }
    let network = model.network(&p)?;
    Ok(FitResult {
        norm_estimate: barron_cost_upper(&network, &cfg.domain)?,
        mse: model.mse(&p),
        network,
        history,
        iterations,
        stalled,
    })
}

/// Targets for the triangular-hat fit.
pub const FIT_MSE_LIMIT: f64 = 1e-4;
pub const FIT_NORM_LIMIT: f64 = 3.5;

pub fn run_fit(cfg: &FitConfig) -> Result<SuiteOutput> {
    let r = fit_network(cfg)?;
    let mut table = Table::new(&["iteration", "objective"]);
    for (i, v) in r.history.iter().enumerate() {
        table.push(vec![Cell::from(i), Cell::Float(*v)]);
    }
    let mut out = SuiteOutput::new("fit", serde_json::to_value(cfg)?, table);
    out.constant("mse", r.mse);
    out.constant("norm_estimate", r.norm_estimate);
    out.constant("iterations", r.iterations);
    out.constant("stalled", r.stalled);
    out.constant(
        "network",
        json!({
            "s": cfg.s,
            "domain": cfg.domain,
            "atoms": r.network.atoms(),
        }),
    );
    out.flag("objective_monotone", r.history.windows(2).all(|w| w[1] <= w[0]));
    if cfg.x.is_none() && cfg.target == FitTarget::Triangular {
        out.flag("mse_small", r.mse < FIT_MSE_LIMIT);
        out.flag("norm_near_three", r.norm_estimate <= FIT_NORM_LIMIT);
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn gradient_matches_finite_differences() {
        let cfg = FitConfig {
            lambda: 0.1,
            s: 2,
            n_samples: 15,
            ..FitConfig::default()
        };
        let (x, y) = fit_samples(&cfg);
        let model = Model {
            s: ActivationPower(2),
            m: 3,
            d: 1,
            lambda: 0.1,
            domain: &cfg.domain,
            x: &x,
            y: &y,
        };
        let p = vec![0.7, -1.2, 0.4, 0.9, -0.6, 1.3, 0.15, 0.35, -0.45];
        let g = model.gradient(&p);
        for k in 0..p.len() {
            let h = 1e-6;
            let mut hi = p.clone();
            let mut lo = p.clone();
            hi[k] += h;
            lo[k] -= h;
            let fd = (model.objective(&hi) - model.objective(&lo)) / (2.0 * h);
            assert!((fd - g[k]).abs() < 1e-6, "k={k}: {fd} vs {}", g[k]);
        }
    }

    #[test]
    fn zero_target_stays_at_zero() {
        let cfg = FitConfig {
            lambda: 0.0,
            target: FitTarget::Zero,
            max_iter: 50,
            ..FitConfig::default()
        };
        let r = fit_network(&cfg).unwrap();
        assert_eq!(r.mse, 0.0);
        assert_eq!(r.norm_estimate, 0.0);
    }

    #[test]
    fn rejects_mismatched_samples() {
        let cfg = FitConfig {
            x: Some(vec![vec![0.0]]),
            y: Some(vec![1.0, 2.0]),
            ..FitConfig::default()
        };
        assert!(fit_network(&cfg).is_err());
    }
}
