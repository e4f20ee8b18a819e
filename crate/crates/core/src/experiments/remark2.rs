//! Exploratory probe of non-integer powers `max(z+b, 0)^s`, `s ∈ (0, 3)`.
//! Reports decay ratios and δ-scaled moments; asserts nothing.

use rayon::prelude::*;

use crate::cutoff::{NeuronProfile, ProfilePower};
use crate::domain::ActivationPower;
use crate::error::Result;
use crate::experiments::config::ExperimentConfig;
use crate::experiments::output::{Cell, SuiteOutput, Table};
use crate::fourier::SpectrumLadder;
use crate::norms::MomentEngine;

/// Largest relative difference of `|ĥ|` between the real-power and the
/// integer-power evaluation paths of the same profile.
pub fn integer_path_mismatch(s: u32, b: f64, xi: &[f64], tol: f64) -> f64 {
    let real = SpectrumLadder::new(NeuronProfile::with_power(ProfilePower::Real(s as f64), b));
    let int = SpectrumLadder::new(NeuronProfile::new(ActivationPower(s), b));
    xi.iter()
        .map(|&x| {
            let (p, q) = (real.eval(x, tol).abs(), int.eval(x, tol).abs());
            if q == 0.0 {
                p
            } else {
                (p - q).abs() / q
            }
        })
        .fold(0.0, f64::max)
}

struct ProbeRows {
    decay: Vec<(f64, f64, f64, f64)>,
    moments: Vec<(f64, f64, f64, f64, bool)>,
}

fn probe(s: f64, b: f64, cfg: &ExperimentConfig) -> Result<ProbeRows> {
    let profile = NeuronProfile::with_power(ProfilePower::Real(s), b);
    let scale = profile.scale();
    let ladder = SpectrumLadder::new(profile.clone());
    let decay = cfg
        .xi_grid
        .iter()
        .map(|&x| {
            let v = ladder.eval(x, cfg.ft_tol);
            let a = v.abs();
            (x, a, a * (1.0 + x).powf(s + 1.0) / scale, v.err_estimate)
        })
        .collect();
    let engine = MomentEngine::new(profile, cfg.moment_tol)?;
    let moments = cfg
        .delta_grid
        .iter()
        .filter(|d| s - **d > -1.0)
        .map(|&d| {
            let m = engine.moment(s - d)?;
            Ok((d, m.value, d * m.value / scale, m.total_error(), m.converged))
        })
        .collect::<Result<_>>()?;
    Ok(ProbeRows { decay, moments })
}

pub fn run_remark2_probe(cfg: &ExperimentConfig) -> Result<SuiteOutput> {
    let cells: Vec<(f64, f64)> = cfg
        .s_frac_list
        .iter()
        .flat_map(|&s| cfg.b_grid.iter().map(move |&b| (s, b)))
        .collect();
    let probes = cells
        .par_iter()
        .map(|&(s, b)| probe(s, b, cfg))
        .collect::<Vec<_>>();

    let mut table = Table::new(&["kind", "s", "b", "x", "value", "scaled", "err", "converged"]);
    let mut converged = true;
    for ((s, b), p) in cells.iter().zip(probes) {
        let p = p?;
        for (x, a, r, e) in p.decay {
            table.push(vec![
                Cell::from("decay"),
                Cell::Float(*s),
                Cell::Float(*b),
                Cell::Float(x),
                Cell::Float(a),
                Cell::Float(r),
                Cell::Float(e),
                Cell::Bool(true),
            ]);
        }
        for (d, v, r, e, ok) in p.moments {
            converged &= ok;
            table.push(vec![
                Cell::from("moment"),
                Cell::Float(*s),
                Cell::Float(*b),
                Cell::Float(d),
                Cell::Float(v),
                Cell::Float(r),
                Cell::Float(e),
                Cell::Bool(ok),
            ]);
        }
    }
    let mut out = SuiteOutput::new("remark2", serde_json::to_value(cfg)?, table);
    out.exploratory = true;
    out.converged = converged;
    out.constant("ft_tol", cfg.ft_tol);
    out.constant("moment_tol", cfg.moment_tol);
    out.constant(
        "note",
        "non-integer powers have no rigorous tail bound; tail error is estimated from the mismatch at the truncation point",
    );
    for &b in &cfg.b_grid {
        let mismatch = integer_path_mismatch(1, b, &cfg.xi_grid, cfg.ft_tol);
        out.constant(&format!("integer_path_mismatch_s1_b{b}"), mismatch);
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn real_and_integer_paths_agree() {
        let xi = [0.0, 0.7, 3.0, 40.0, 900.0];
        assert!(integer_path_mismatch(1, 0.0, &xi, 1e-11) < 1e-8);
        assert!(integer_path_mismatch(2, -0.4, &xi, 1e-11) < 1e-8);
    }

    #[test]
    fn half_power_moment_is_finite() {
        let engine = MomentEngine::new(NeuronProfile::with_power(ProfilePower::Real(0.5), 0.0), 1e-4).unwrap();
        let m = engine.moment(0.4).unwrap();
        assert!(m.value.is_finite() && m.value > 0.0);
    }
}
