//! One-dimensional Fourier transforms with the convention
//! `f̂(ξ) = (1/2π) ∫ f(z) e^{-iξz} dz`.
//!
//! Profiles are compactly supported and smooth except at the activation
//! kink `-b`. Integration is split at the profile breakpoints and into
//! panels no wider than half an oscillation period, `π / max(|ξ|, 1)`.
//!
//! For integer powers and `|ξ| ≥ 1` the transform is first integrated by
//! parts `s + 1` times:
//!
//! ```text
//! ĥ(ξ) = (iξ)^{-(s+1)}/(2π) · [ J e^{iξb} + ∫ h^{(s+1)}(z) e^{-iξz} dz ],
//! J = s!·χ(-b)   (jump of h^{(s)} at the kink, 0 when there is no kink)
//! ```
//!
//! The remaining integrand lives on the transition bands of χ only, since
//! `h^{(s+1)}` vanishes on the plateau. Without this step the value at
//! large `ξ` (of size `ξ^{-(s+1)}`) would be swamped by cancellation error
//! of size `ε ∫|h|`.

use std::f64::consts::PI;

use num_complex::Complex64;

use crate::cutoff::{NeuronProfile, ProfilePower};
use crate::domain::ActivationPower;
use crate::error::{Error, Result};
use crate::jet::factorial;
use crate::quadrature::{integrate_panels, split_knots, GaussRule, Integral, Tolerance};

/// Widest panel used when building node tables, independent of frequency.
const MAX_PANEL_WIDTH: f64 = 0.25;
/// Relative accuracy to which a table resolves its (non-oscillatory) integrand.
const TABLE_BUILD_TOL: f64 = 1e-15;
/// Panel budget for the adaptive fallback.
const FALLBACK_PANELS: usize = 400_000;
/// Frequencies above this are allowed but flagged.
pub const XI_SOFT_LIMIT: f64 = 1e4;

/// A transform value with its absolute error estimate.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SpectrumSample {
    pub xi: f64,
    pub value: Complex64,
    pub err_estimate: f64,
    /// False when the requested accuracy was not reached within budget.
    pub converged: bool,
    /// Set for `|ξ|` beyond [`XI_SOFT_LIMIT`].
    pub beyond_soft_limit: bool,
}

impl SpectrumSample {
    pub fn abs(&self) -> f64 {
        self.value.norm()
    }
}

/// Analytic transform of the triangular hat `max(1 - |x|, 0)`:
/// `(1 - cos ξ)/(π ξ²)`, with its even Taylor series near zero.
pub fn ft_triangular(xi: f64) -> f64 {
    if xi.abs() < 1e-4 {
        let x2 = xi * xi;
        return (1.0 - x2 / 12.0 + x2 * x2 / 360.0) / (2.0 * PI);
    }
    // 1 - cos ξ = 2 sin²(ξ/2) avoids cancellation for small ξ.
    let h = (0.5 * xi).sin();
    2.0 * h * h / (PI * xi * xi)
}

fn oscillatory_panels(breakpoints: &[f64], omega: f64, cap: f64) -> Vec<(f64, f64)> {
    let width = (PI / omega.abs().max(1.0)).min(cap);
    split_knots(breakpoints, width)
}

/// Transform of a general piecewise-smooth function supported on
/// `[breakpoints[0], breakpoints[last]]`.
pub fn fourier_transform<F: Fn(f64) -> f64>(
    f: F,
    breakpoints: &[f64],
    xi: f64,
    tol: Tolerance,
) -> SpectrumSample {
    let panels = oscillatory_panels(breakpoints, xi, f64::INFINITY);
    let r: Integral<Complex64> = integrate_panels(
        |z| Complex64::from_polar(f(z), -xi * z),
        &panels,
        Tolerance {
            abs: tol.abs * 2.0 * PI,
            rel: tol.rel,
        },
        FALLBACK_PANELS,
        GaussRule::standard(),
    );
    SpectrumSample {
        xi,
        value: r.value / (2.0 * PI),
        err_estimate: r.err / (2.0 * PI),
        converged: r.converged,
        beyond_soft_limit: xi.abs() > XI_SOFT_LIMIT,
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
enum Mode {
    /// Integrand is the profile itself.
    Direct,
    /// Integrand is `h^{(order)}`, boundary jump `jump` at `-b`.
    ByParts { order: usize, jump: f64 },
}

/// Precomputed integrand values on a panel layout that resolves every
/// frequency up to `omega`. Evaluating many frequencies for one profile
/// then costs one complex exponential per node.
#[derive(Debug, Clone)]
pub struct SpectrumTable {
    profile: NeuronProfile,
    omega: f64,
    mode: Mode,
    n: usize,
    coarse_z: Vec<f64>,
    coarse_wg: Vec<f64>,
    fine_z: Vec<f64>,
    fine_wg: Vec<f64>,
    abs_mass: f64,
    panels: Vec<(f64, f64)>,
}

impl SpectrumTable {
    /// Table for `|ξ| ≤ omega`. Integer powers with `omega ≥ 1` use the
    /// integrated-by-parts form; such a table is only valid for `|ξ| ≥ 1`.
    pub fn new(profile: NeuronProfile, omega: f64) -> Self {
        let mode = match profile.power() {
            ProfilePower::Integer(s) if omega >= 1.0 => {
                let s = s.get() as usize;
                let jump = profile
                    .kink()
                    .map_or(0.0, |k| factorial(s) * crate::cutoff::chi_eval(k));
                Mode::ByParts {
                    order: s + 1,
                    jump,
                }
            }
            _ => Mode::Direct,
        };
        Self::with_mode(profile, omega, mode)
    }

    fn with_mode(profile: NeuronProfile, omega: f64, mode: Mode) -> Self {
        let rule = GaussRule::standard();
        let pieces: Vec<(f64, f64)> = profile
            .pieces()
            .into_iter()
            .filter(|&(lo, hi)| match mode {
                // h^{(s+1)} vanishes on the plateau of χ.
                Mode::ByParts { .. } => !(lo >= -1.0 && hi <= 1.0),
                Mode::Direct => true,
            })
            .map(|(lo, hi)| (lo.max(-profile.b()), hi))
            .collect();
        let mut knots_panels = Vec::new();
        for &(lo, hi) in &pieces {
            knots_panels.extend(oscillatory_panels(&[lo, hi], omega, MAX_PANEL_WIDTH));
        }
        let g = |z: f64| integrand(&profile, mode, z);

        // Scale of ∫|g| for the refinement criterion.
        let mass: f64 = knots_panels
            .iter()
            .map(|&(a, b)| rule.mapped(a, b).map(|(z, w)| g(z).abs() * w).sum::<f64>())
            .sum();
        let per_panel_tol = TABLE_BUILD_TOL * mass.max(f64::MIN_POSITIVE);

        let mut table = SpectrumTable {
            profile: profile.clone(),
            omega,
            mode,
            n: rule.len(),
            coarse_z: Vec::new(),
            coarse_wg: Vec::new(),
            fine_z: Vec::new(),
            fine_wg: Vec::new(),
            abs_mass: 0.0,
            panels: Vec::new(),
        };
        let mut stack: Vec<(f64, f64, u32)> = knots_panels.iter().rev().map(|&(a, b)| (a, b, 0)).collect();
        while let Some((a, b, depth)) = stack.pop() {
            let m = 0.5 * (a + b);
            let coarse: Vec<(f64, f64)> = rule.mapped(a, b).map(|(z, w)| (z, w * g(z))).collect();
            let fine: Vec<(f64, f64)> = rule
                .mapped(a, m)
                .chain(rule.mapped(m, b))
                .map(|(z, w)| (z, w * g(z)))
                .collect();
            let c: f64 = coarse.iter().map(|p| p.1).sum();
            let f: f64 = fine.iter().map(|p| p.1).sum();
            if (f - c).abs() > per_panel_tol && depth < 40 && m > a && m < b {
                stack.push((m, b, depth + 1));
                stack.push((a, m, depth + 1));
                continue;
            }
            table.panels.push((a, b));
            for (z, wg) in coarse {
                table.coarse_z.push(z);
                table.coarse_wg.push(wg);
            }
            for (z, wg) in fine {
                table.abs_mass += wg.abs();
                table.fine_z.push(z);
                table.fine_wg.push(wg);
            }
        }
        table
    }

    pub fn omega(&self) -> f64 {
        self.omega
    }

    pub fn profile(&self) -> &NeuronProfile {
        &self.profile
    }

    pub fn node_count(&self) -> usize {
        self.coarse_z.len() + self.fine_z.len()
    }

    fn raw_integral(&self, xi: f64) -> (Complex64, f64) {
        let mut value = Complex64::new(0.0, 0.0);
        let mut err = 0.0;
        let n = self.n;
        for p in 0..self.panels.len() {
            let mut c = Complex64::new(0.0, 0.0);
            for i in p * n..(p + 1) * n {
                let (s, co) = (xi * self.coarse_z[i]).sin_cos();
                c += Complex64::new(co, -s) * self.coarse_wg[i];
            }
            let mut f = Complex64::new(0.0, 0.0);
            for i in 2 * p * n..2 * (p + 1) * n {
                let (s, co) = (xi * self.fine_z[i]).sin_cos();
                f += Complex64::new(co, -s) * self.fine_wg[i];
            }
            value += f;
            err += (f - c).norm();
        }
        (value, err + 50.0 * f64::EPSILON * self.abs_mass)
    }

    /// Combines a raw integral (and its error) into `ĥ(ξ)`.
    fn assemble(&self, xi: f64, raw: Complex64, raw_err: f64) -> (Complex64, f64) {
        match self.mode {
            Mode::Direct => (raw / (2.0 * PI), raw_err / (2.0 * PI)),
            Mode::ByParts { order, jump } => {
                let boundary = Complex64::from_polar(jump, xi * self.profile.b());
                let factor = inv_i_xi_pow(xi, order) / (2.0 * PI);
                (
                    (boundary + raw) * factor,
                    (raw_err + 4.0 * f64::EPSILON * jump.abs()) * self.err_factor(xi),
                )
            }
        }
    }

    /// Maps an absolute error of the raw integral to an error in `ĥ(ξ)`.
    fn err_factor(&self, xi: f64) -> f64 {
        match self.mode {
            Mode::Direct => 1.0 / (2.0 * PI),
            Mode::ByParts { order, .. } => 1.0 / (2.0 * PI * xi.abs().powi(order as i32)),
        }
    }

    /// `ĥ(ξ)` to the requested relative tolerance, with an absolute floor of
    /// `1e-16·(1+|b|)^s`. Falls back to adaptive refinement when the table's
    /// own error estimate is not good enough.
    pub fn eval(&self, xi: f64, rel_tol: f64) -> SpectrumSample {
        let beyond_soft_limit = xi.abs() > XI_SOFT_LIMIT;
        if self.profile.is_zero() {
            return SpectrumSample {
                xi,
                value: Complex64::new(0.0, 0.0),
                err_estimate: 0.0,
                converged: true,
                beyond_soft_limit,
            };
        }
        let by_parts = matches!(self.mode, Mode::ByParts { .. });
        let usable = xi.abs() <= self.omega * (1.0 + 1e-12) && (!by_parts || xi.abs() >= 1.0);
        if !usable {
            return SpectrumTable::new(self.profile.clone(), xi.abs()).eval(xi, rel_tol);
        }
        let floor = 1e-16 * self.profile.scale();
        let (raw, raw_err) = self.raw_integral(xi);
        let (value, err) = self.assemble(xi, raw, raw_err);
        if err <= (rel_tol * value.norm()).max(floor) {
            return SpectrumSample {
                xi,
                value,
                err_estimate: err,
                converged: true,
                beyond_soft_limit,
            };
        }
        // Adaptive refinement on the table's panel layout.
        let target_raw = (rel_tol * value.norm()).max(floor) / self.err_factor(xi);
        let profile = &self.profile;
        let mode = self.mode;
        let r: Integral<Complex64> = integrate_panels(
            |z| Complex64::from_polar(integrand(profile, mode, z), -xi * z),
            &self.panels,
            Tolerance {
                abs: target_raw,
                rel: 0.0,
            },
            FALLBACK_PANELS,
            GaussRule::standard(),
        );
        let (value, err) = self.assemble(xi, r.value, r.err);
        SpectrumSample {
            xi,
            value,
            err_estimate: err,
            converged: err <= (rel_tol * value.norm()).max(floor) || r.converged,
            beyond_soft_limit,
        }
    }
}

/// `(iξ)^{-k}` for real nonzero `ξ`, computed without complex powers so
/// that the result at `-ξ` is the exact conjugate of the result at `ξ`.
fn inv_i_xi_pow(xi: f64, k: usize) -> Complex64 {
    let m = xi.powi(k as i32).recip();
    match k % 4 {
        0 => Complex64::new(m, 0.0),
        1 => Complex64::new(0.0, -m),
        2 => Complex64::new(-m, 0.0),
        _ => Complex64::new(0.0, m),
    }
}

fn integrand(profile: &NeuronProfile, mode: Mode, z: f64) -> f64 {
    match mode {
        Mode::Direct => profile.eval(z),
        Mode::ByParts { order, .. } => {
            if z <= -profile.b() {
                return 0.0;
            }
            profile.jet(z, order).derivative(order)
        }
    }
}

fn check_rel_tol(rel_tol: f64) -> Result<()> {
    if !(1e-14..=1e-4).contains(&rel_tol) {
        return Err(Error::invalid(format!(
            "rel_tol must lie in [1e-14, 1e-4], got {rel_tol}"
        )));
    }
    Ok(())
}

/// `ĥ_{σ,b}(ξ) = (1/2π) ∫_{-2}^{2} χ(z) max(z + b, 0)^s e^{-iξz} dz`.
pub fn ft_profile(s: ActivationPower, b: f64, xi: f64, rel_tol: f64) -> Result<SpectrumSample> {
    ft_profile_with_power(ProfilePower::Integer(s), b, xi, rel_tol)
}

/// Same as [`ft_profile`] for a real exponent (always evaluated directly).
pub fn ft_profile_with_power(
    power: ProfilePower,
    b: f64,
    xi: f64,
    rel_tol: f64,
) -> Result<SpectrumSample> {
    check_rel_tol(rel_tol)?;
    if !xi.is_finite() || !b.is_finite() {
        return Err(Error::invalid("xi and b must be finite"));
    }
    if let ProfilePower::Real(s) = power {
        if !(s >= 0.0 && s.is_finite()) {
            return Err(Error::invalid(format!("power must be >= 0, got {s}")));
        }
    }
    let profile = NeuronProfile::with_power(power, b);
    let omega = xi.abs();
    let table = if omega < 1.0 {
        SpectrumTable::with_mode(profile, omega, Mode::Direct)
    } else {
        SpectrumTable::new(profile, omega)
    };
    Ok(table.eval(xi, rel_tol))
}

/// Lazily built tables at geometrically spaced frequency ceilings, for
/// sweeping many frequencies of one profile.
#[derive(Debug)]
pub struct SpectrumLadder {
    profile: NeuronProfile,
    low: std::cell::OnceCell<SpectrumTable>,
    levels: Vec<(f64, std::cell::OnceCell<SpectrumTable>)>,
}

impl SpectrumLadder {
    pub fn new(profile: NeuronProfile) -> Self {
        let levels = (0..12).map(|k| (8.0 * 4f64.powi(k), std::cell::OnceCell::new())).collect();
        SpectrumLadder {
            profile,
            low: std::cell::OnceCell::new(),
            levels,
        }
    }

    pub fn profile(&self) -> &NeuronProfile {
        &self.profile
    }

    pub fn eval(&self, xi: f64, rel_tol: f64) -> SpectrumSample {
        let a = xi.abs();
        if a < 1.0 {
            return self
                .low
                .get_or_init(|| SpectrumTable::with_mode(self.profile.clone(), 1.0, Mode::Direct))
                .eval(xi, rel_tol);
        }
        for (omega, cell) in &self.levels {
            if a <= *omega {
                return cell
                    .get_or_init(|| SpectrumTable::new(self.profile.clone(), *omega))
                    .eval(xi, rel_tol);
            }
        }
        SpectrumTable::new(self.profile.clone(), a).eval(xi, rel_tol)
    }
}
