//! Spectral moments of extended neurons and spectral Barron upper bounds.
//!
//! For a neuron with `‖w‖_Ω = 1` the cutoff extension `χ(w·x)σ(w·x + b)` has
//! a Fourier transform concentrated on the line spanned by `w`, and its
//! weighted moment `∫(1+‖ξ‖_Ω)^r |Ĥ(ξ)| dξ` equals the one-dimensional
//! `∫(1+|v|)^r |ĥ_{σ,b}(v)| dv`. Everything here works with the 1D form.
//!
//! # Moment evaluation
//!
//! `M_r = 2 ∫_0^∞ (1+v)^r |ĥ(v)| dv` (by `|ĥ(-v)| = |ĥ(v)|`) is split at a
//! truncation point Ξ:
//!
//! * `[0, Ξ]`: adaptive Gauss quadrature on samples of `|ĥ|`.
//! * `[Ξ, ∞)`: `|ĥ|` is replaced by the modulus of its kink expansion
//!   `A(v) = (1/2π) Σ_{m<M} c_m (iv)^{-(s+m+1)}`, `c_m = Γ(s+m+1) χ^{(m)}(-b)/m!`,
//!   which is integrated semi-analytically.
//!
//! For integer `s` the expansion with `M = K - s` terms is exactly the
//! boundary part of `K` integrations by parts, so `| |ĥ| - |A| | ≤
//! ‖h^{(K)}‖₁ / (2π v^K)` and the tail error is bounded rigorously. `K` and Ξ
//! are chosen to make that bound at most a fraction of the tolerance.

use std::cell::{OnceCell, RefCell};
use std::collections::HashMap;
use std::f64::consts::PI;
use std::ops::{Add, Mul, Sub};

use num_complex::Complex64;

use crate::cutoff::{chi_jet, NeuronProfile, ProfilePower};
use crate::domain::{ActivationPower, DomainSpec};
use crate::error::{Error, Result};
use crate::fourier::{ft_triangular, SpectrumLadder};
use crate::network::{normalize_with_norm, NeuronForm, TwoLayerNetwork};
use crate::quadrature::{integrate, integrate_panels, split_knots, GaussRule, Quantity, Tolerance};

/// Smallest truncation point; below it the transition bands of χ dominate.
const XI_MIN: f64 = 32.0;
/// Largest truncation point before giving up on the tail budget.
const XI_MAX: f64 = 2048.0;
/// Highest number of extra integrations by parts tried for the tail bound.
const MAX_EXTRA_ORDERS: usize = 18;
const PANEL_BUDGET: usize = 200_000;

/// A weighted spectral moment with its error budget.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MomentEstimate {
    pub value: f64,
    /// Split point Ξ between numerical quadrature and the asymptotic tail.
    pub truncation_xi: f64,
    /// Bound on the error of the asymptotic tail.
    pub tail_bound: f64,
    /// Quadrature error estimate, including sampling error of `|ĥ|`.
    pub quad_err: f64,
    /// Integrations by parts behind the tail bound (0 when not rigorous).
    pub remainder_order: usize,
    pub converged: bool,
}

impl MomentEstimate {
    fn zero() -> Self {
        MomentEstimate {
            value: 0.0,
            truncation_xi: XI_MIN,
            tail_bound: 0.0,
            quad_err: 0.0,
            remainder_order: 0,
            converged: true,
        }
    }

    pub fn total_error(&self) -> f64 {
        self.tail_bound + self.quad_err
    }
}

/// (value, error) pair integrated side by side; only the value drives
/// adaptivity.
#[derive(Debug, Clone, Copy)]
struct Pair(f64, f64);

impl Add for Pair {
    type Output = Pair;
    fn add(self, o: Pair) -> Pair {
        Pair(self.0 + o.0, self.1 + o.1)
    }
}
impl Sub for Pair {
    type Output = Pair;
    fn sub(self, o: Pair) -> Pair {
        Pair(self.0 - o.0, self.1 - o.1)
    }
}
impl Mul<f64> for Pair {
    type Output = Pair;
    fn mul(self, w: f64) -> Pair {
        Pair(self.0 * w, self.1 * w)
    }
}
impl Quantity for Pair {
    fn zero() -> Self {
        Pair(0.0, 0.0)
    }
    fn magnitude(&self) -> f64 {
        self.0.abs()
    }
}

fn check_tol(tol: f64) -> Result<()> {
    if !(1e-10..=1e-2).contains(&tol) {
        return Err(Error::invalid(format!("tol must lie in [1e-10, 1e-2], got {tol}")));
    }
    Ok(())
}

/// Computes moments of one profile at any number of orders, sharing the
/// sampled spectrum between them. Not `Sync`; use one engine per thread.
pub struct MomentEngine {
    profile: NeuronProfile,
    tol: f64,
    sample_tol: f64,
    ladder: SpectrumLadder,
    samples: RefCell<HashMap<u64, (f64, f64)>>,
    low: RefCell<HashMap<u64, (Pair, f64, bool)>>,
    remainder_norms: OnceCell<Vec<f64>>,
}

impl MomentEngine {
    pub fn new(profile: NeuronProfile, tol: f64) -> Result<Self> {
        check_tol(tol)?;
        if let ProfilePower::Real(s) = profile.power() {
            if !(s >= 0.0 && s.is_finite()) {
                return Err(Error::invalid(format!("power must be >= 0, got {s}")));
            }
        }
        if !profile.b().is_finite() {
            return Err(Error::invalid("b must be finite"));
        }
        Ok(MomentEngine {
            sample_tol: (tol * 1e-2).clamp(1e-12, 1e-4),
            ladder: SpectrumLadder::new(profile.clone()),
            profile,
            tol,
            samples: RefCell::new(HashMap::new()),
            low: RefCell::new(HashMap::new()),
            remainder_norms: OnceCell::new(),
        })
    }

    pub fn profile(&self) -> &NeuronProfile {
        &self.profile
    }

    fn s(&self) -> f64 {
        self.profile.power().value()
    }

    /// `|ĥ(v)|` and its absolute error, memoised on the exact bits of `v`.
    fn spectrum_abs(&self, v: f64) -> (f64, f64) {
        if let Some(&hit) = self.samples.borrow().get(&v.to_bits()) {
            return hit;
        }
        let r = self.ladder.eval(v, self.sample_tol);
        let out = (r.abs(), r.err_estimate);
        self.samples.borrow_mut().insert(v.to_bits(), out);
        out
    }

    fn weighted(&self, order: f64) -> impl Fn(f64) -> Pair + '_ {
        move |v: f64| {
            let (a, e) = self.spectrum_abs(v);
            let w = (1.0 + v).powf(order);
            Pair(w * a, w * e)
        }
    }

    fn integrate_range(&self, order: f64, lo: f64, hi: f64, tol: Tolerance) -> (Pair, f64, bool) {
        let mut knots = vec![lo];
        let mut x = lo;
        while x < hi {
            x = if x < 128.0 { (x + 1.0).floor() } else { x * 1.1 };
            knots.push(x.min(hi));
        }
        let panels = split_knots(&knots, f64::INFINITY);
        let r = integrate_panels(self.weighted(order), &panels, tol, PANEL_BUDGET, GaussRule::standard());
        (r.value, r.err, r.converged)
    }

    /// Asymptotic coefficients `c_m = Γ(s+m+1) χ^{(m)}(-b)/m!`, `m < count`.
    fn kink_coefficients(&self, count: usize) -> Vec<f64> {
        let Some(k) = self.profile.kink() else {
            return vec![0.0; count];
        };
        let jet = chi_jet(k, count.saturating_sub(1));
        let s = self.s();
        (0..count)
            .map(|m| gamma(s + m as f64 + 1.0) * jet.0[m])
            .collect()
    }

    /// `‖h^{(K)}‖₁` over the smooth pieces, for `K = s+1 ..= s+1+MAX_EXTRA_ORDERS`.
    fn remainder_norms(&self, s: usize) -> &[f64] {
        self.remainder_norms.get_or_init(|| {
            let kmax = s + 1 + MAX_EXTRA_ORDERS;
            let mut norms = [0.0; MAX_EXTRA_ORDERS + 1];
            let rule = GaussRule::standard();
            let b = self.profile.b();
            for (lo, hi) in self.profile.pieces() {
                if lo >= -1.0 && hi <= 1.0 {
                    continue; // derivatives above s vanish on the plateau
                }
                let lo = lo.max(-b);
                for (a, c) in split_knots(&[lo, hi], 1.0 / 1024.0) {
                    for (z, w) in rule.mapped(a, c) {
                        let jet = self.profile.jet(z, kmax);
                        for (i, n) in norms.iter_mut().enumerate() {
                            *n += w * jet.derivative(s + 1 + i).abs();
                        }
                    }
                }
            }
            // Margin for the quadrature of |·| across sign changes.
            norms.iter().map(|n| n * 1.01).collect()
        })
    }

    /// `∫_Ξ^∞ (1+v)^r v^{-K} dv` bounded above.
    fn power_tail(order: f64, xi: f64, k: usize) -> f64 {
        let e = k as f64 - 1.0 - order;
        let f = if order > 0.0 { (1.0 + 1.0 / xi).powf(order) } else { 1.0 };
        f * xi.powf(-e) / e
    }

    /// `∫_Ξ^∞ (1+v)^r |A(v)| dv` for the expansion with coefficients `c`.
    fn asymptotic_tail(&self, order: f64, xi: f64, c: &[f64]) -> (f64, f64) {
        let c0 = c[0];
        if c0 == 0.0 {
            return (0.0, 0.0);
        }
        let s = self.s();
        let gap = s - order;
        let u_max = 1.0 / xi;
        // ψ(u) = (1+u)^r |Σ (c_m/c_0)(-i)^m u^m|
        let psi = |u: f64| {
            let mut acc = Complex64::new(0.0, 0.0);
            let mut pw = Complex64::new(1.0, 0.0);
            let step = Complex64::new(0.0, -u);
            for cm in c {
                acc += pw * (cm / c0);
                pw *= step;
            }
            (1.0 + u).powf(order) * acc.norm()
        };
        // u = U y^{1/gap} turns u^{gap-1} du into (U^gap/gap) dy.
        let r = integrate(
            |y: f64| psi(u_max * y.powf(1.0 / gap)),
            &[0.0, 0.5, 1.0],
            Tolerance::relative(1e-13),
            10_000,
        );
        let pre = c0.abs() / (2.0 * PI) * u_max.powf(gap) / gap;
        (pre * r.value, pre * r.err)
    }

    fn check_order(&self, order: f64) -> Result<()> {
        let s = self.s();
        if !order.is_finite() {
            return Err(Error::invalid("order must be finite"));
        }
        if order >= s + 1.0 - 1e-6 {
            return Err(Error::invalid(format!(
                "order {order} must be below s + 1 = {}",
                s + 1.0
            )));
        }
        if self.profile.kink().is_some() && order >= s - 1e-6 {
            return Err(Error::invalid(format!(
                "moment of order {order} diverges: |ĥ| decays like |v|^-(s+1) with s = {s}"
            )));
        }
        Ok(())
    }

    /// `∫_0^{Ξ_min}` part, memoised per order.
    fn low_part(&self, order: f64) -> (Pair, f64, bool) {
        if let Some(&hit) = self.low.borrow().get(&order.to_bits()) {
            return hit;
        }
        let r = self.integrate_range(order, 0.0, XI_MIN, Tolerance::relative(0.25 * self.tol));
        self.low.borrow_mut().insert(order.to_bits(), r);
        r
    }

    /// Cheap lower estimate of the moment: the part below the smallest
    /// truncation point.
    pub fn low_estimate(&self, order: f64) -> Result<f64> {
        self.check_order(order)?;
        if self.profile.is_zero() {
            return Ok(0.0);
        }
        Ok(2.0 * self.low_part(order).0 .0)
    }

    /// `∫_ℝ (1+|v|)^order |ĥ(v)| dv` to relative tolerance `tol`.
    pub fn moment(&self, order: f64) -> Result<MomentEstimate> {
        self.moment_with_allowance(order, 0.0)
    }

    /// Like [`moment`](Self::moment), but an absolute error up to
    /// `allowance` is acceptable even when it exceeds `tol·value`.
    pub fn moment_with_allowance(&self, order: f64, allowance: f64) -> Result<MomentEstimate> {
        self.check_order(order)?;
        let s = self.s();
        if self.profile.is_zero() {
            return Ok(MomentEstimate::zero());
        }
        let tol = self.tol;

        let (low, low_err, low_ok) = self.low_part(order);
        if !(low.0 > 0.0) {
            // The profile underflows to zero everywhere.
            return Ok(MomentEstimate {
                quad_err: 2.0 * low_err,
                converged: low_ok,
                ..MomentEstimate::zero()
            });
        }
        // Half-line error budget for each of the tail and the middle range.
        let budget = 0.25 * (tol * 2.0 * low.0).max(allowance);

        let (xi, k_used, terms, bound_half) = match self.profile.power() {
            ProfilePower::Integer(si) => {
                let si = si.get() as usize;
                let norms = self.remainder_norms(si);
                let mut best: Option<(f64, usize)> = None;
                for (i, &l) in norms.iter().enumerate() {
                    let k = si + 1 + i;
                    let e = k as f64 - 1.0 - order;
                    if e <= 0.0 || l == 0.0 && i > 0 {
                        continue;
                    }
                    let pre = l / (2.0 * PI) * Self::power_tail(order, XI_MIN, k) * XI_MIN.powf(e);
                    // pre · Ξ^{-e} ≤ budget/2 (one side of the symmetric tail)
                    let cand = (2.0 * pre / budget).powf(1.0 / e).max(XI_MIN);
                    if best.is_none_or(|(x, _)| cand < x) {
                        best = Some((cand, k));
                    }
                }
                let (xi, k) = best.expect("at least one remainder order");
                let xi = xi.min(XI_MAX);
                let bound = norms[k - si - 1] / (2.0 * PI) * Self::power_tail(order, xi, k);
                (xi, k, k - si, bound)
            }
            ProfilePower::Real(_) => (1024.0, 0, 6, f64::NAN),
        };

        let (mid, mid_err, mid_ok) = if xi > XI_MIN {
            self.integrate_range(order, XI_MIN, xi, Tolerance { abs: budget, rel: 0.0 })
        } else {
            (Pair(0.0, 0.0), 0.0, true)
        };
        let coeffs = self.kink_coefficients(terms);
        let (tail, tail_quad_err) = self.asymptotic_tail(order, xi, &coeffs);

        let bound_half = if bound_half.is_nan() {
            // Non-integer power: no rigorous remainder; use the observed
            // mismatch at Ξ, decaying one order faster than the leading term.
            let (a, e) = self.spectrum_abs(xi);
            let model = asymptotic_abs(&coeffs, self.s(), xi);
            let mismatch = (a - model).abs() + e;
            mismatch * xi.powf(s + 2.0) * Self::power_tail(order, xi, (s + 2.0).ceil() as usize)
        } else {
            bound_half
        };

        let value = 2.0 * (low.0 + mid.0 + tail);
        let quad_err = 2.0 * (low_err + mid_err + low.1 + mid.1 + tail_quad_err);
        let tail_bound = 2.0 * bound_half;
        let target = (tol * value).max(allowance);
        let converged = low_ok && mid_ok && tail_bound + quad_err <= target;
        Ok(MomentEstimate {
            value,
            truncation_xi: xi,
            tail_bound,
            quad_err,
            remainder_order: k_used,
            converged,
        })
    }
}

/// `|A(v)|` for the kink expansion.
fn asymptotic_abs(c: &[f64], s: f64, v: f64) -> f64 {
    let mut acc = Complex64::new(0.0, 0.0);
    let mut pw = Complex64::new(1.0, 0.0);
    let step = Complex64::new(0.0, -1.0 / v);
    for cm in c {
        acc += pw * *cm;
        pw *= step;
    }
    acc.norm() * v.powf(-(s + 1.0)) / (2.0 * PI)
}

/// Γ(x) for x > 0 via Lanczos (g = 7, n = 9).
pub(crate) fn gamma(x: f64) -> f64 {
    if x == x.floor() && x <= 171.0 {
        return crate::jet::factorial(x as usize - 1);
    }
    const G: f64 = 7.0;
    const C: [f64; 9] = [
        0.999_999_999_999_809_9,
        676.520_368_121_885_1,
        -1_259.139_216_722_402_8,
        771.323_428_777_653_1,
        -176.615_029_162_140_6,
        12.507_343_278_686_905,
        -0.138_571_095_265_720_12,
        9.984_369_578_019_572e-6,
        1.505_632_735_149_311_6e-7,
    ];
    if x < 0.5 {
        return PI / ((PI * x).sin() * gamma(1.0 - x));
    }
    let x = x - 1.0;
    let mut a = C[0];
    let t = x + G + 0.5;
    for (i, c) in C.iter().enumerate().skip(1) {
        a += c / (x + i as f64);
    }
    (2.0 * PI).sqrt() * t.powf(x + 0.5) * (-t).exp() * a
}

/// `∫_ℝ (1+|v|)^order |ĥ_{σ,b}(v)| dv` for the cutoff extension of a
/// single neuron.
pub fn moment_integral(s: ActivationPower, b: f64, order: f64, tol: f64) -> Result<MomentEstimate> {
    MomentEngine::new(NeuronProfile::new(s, b), tol)?.moment(order)
}

/// Detailed result of [`spectral_upper`].
#[derive(Debug, Clone, PartialEq)]
pub struct SpectralBound {
    pub value: f64,
    /// Propagated error estimate (tails plus quadrature).
    pub err: f64,
    pub converged: bool,
}

/// Reuses moment engines across atoms that share `(s, b)`.
#[derive(Default)]
pub struct SpectralEstimator {
    engines: HashMap<(u32, u64), MomentEngine>,
    tol: f64,
}

impl SpectralEstimator {
    pub fn new(tol: f64) -> Result<Self> {
        check_tol(tol)?;
        Ok(SpectralEstimator {
            engines: HashMap::new(),
            tol,
        })
    }

    fn engine(&mut self, s: ActivationPower, b: f64) -> Result<&MomentEngine> {
        let key = (s.get(), b.to_bits());
        if !self.engines.contains_key(&key) {
            let engine = MomentEngine::new(NeuronProfile::new(s, b), self.tol)?;
            self.engines.insert(key, engine);
        }
        Ok(&self.engines[&key])
    }

    pub fn moment(&mut self, s: ActivationPower, b: f64, order: f64) -> Result<MomentEstimate> {
        self.engine(s, b)?.moment(order)
    }

    /// Upper bound on `‖f‖_{F_{s-δ}(Ω)}` realised by the cutoff extension of
    /// every (normalised) neuron of `net`.
    ///
    /// The tolerance applies to the whole bound: a first pass estimates the
    /// total from low frequencies, and every atom then receives an equal
    /// share of `tol` times that total as an absolute error allowance.
    pub fn spectral_upper(
        &mut self,
        net: &TwoLayerNetwork,
        domain: &DomainSpec,
        delta: f64,
    ) -> Result<SpectralBound> {
        if !(delta > 0.0 && delta < 1.0) {
            return Err(Error::invalid(format!("delta must lie in (0, 1), got {delta}")));
        }
        let s = net.s().require_positive()?;
        net.check_domain(domain)?;
        let order = s.as_f64() - delta;
        let mut constant = 0.0;
        let mut atoms = Vec::new();
        for atom in net.atoms() {
            if atom.a == 0.0 {
                continue;
            }
            let c = domain.support_norm_unchecked(&atom.w);
            match normalize_with_norm(s, c, atom.a, &atom.w, atom.b) {
                // The transform of a constant is a point mass at ξ = 0.
                NeuronForm::Constant { value } => constant += value.abs(),
                NeuronForm::Normalized(n) => atoms.push((n.a.abs(), n.b)),
            }
        }
        let mut low_total = constant;
        for &(a, b) in &atoms {
            low_total += a * self.engine(s, b)?.low_estimate(order)?;
        }
        let share = self.tol * low_total / atoms.len().max(1) as f64;
        let mut value = constant;
        let mut err = 0.0;
        let mut converged = true;
        for &(a, b) in &atoms {
            let m = self.engine(s, b)?.moment_with_allowance(order, share / a)?;
            value += a * m.value;
            err += a * m.total_error();
            converged &= m.converged;
        }
        let m = net.width() as f64;
        Ok(SpectralBound {
            value: value / m,
            err: err / m,
            converged,
        })
    }
}

/// `(1/m) Σ_j |a'_j| M_{s-δ}(b'_j)` over normalised atoms, an upper bound on
/// the spectral Barron norm of order `s − δ`.
pub fn spectral_upper(net: &TwoLayerNetwork, domain: &DomainSpec, delta: f64, tol: f64) -> Result<f64> {
    Ok(SpectralEstimator::new(tol)?.spectral_upper(net, domain, delta)?.value)
}

/// `S(R) = ∫_{|ξ|≤R} (1+|ξ|) t̂(ξ) dξ` for the triangular hat `t`, which
/// grows like `(2/π) ln R`.
pub fn truncated_triangular_moment(r: f64) -> Result<f64> {
    if !(r >= 1.0 && r.is_finite()) {
        return Err(Error::invalid(format!("R must be a finite number >= 1, got {r}")));
    }
    let period = 2.0 * PI;
    let mut knots: Vec<f64> = (0..)
        .map(|k| k as f64 * period)
        .take_while(|&x| x < r)
        .collect();
    knots.push(r);
    let res = integrate(
        |x: f64| (1.0 + x) * ft_triangular(x),
        &knots,
        Tolerance::relative(1e-11),
        4 * knots.len() + 10_000,
    );
    if !res.converged {
        return Err(Error::NotConverged(format!(
            "truncated triangular moment at R = {r}: error {:.3e}",
            res.err
        )));
    }
    Ok(2.0 * res.value)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn gamma_values() {
        assert_eq!(gamma(5.0), 24.0);
        assert!((gamma(0.5) - PI.sqrt()).abs() < 1e-14);
        assert!((gamma(2.5) - 0.75 * PI.sqrt()).abs() < 1e-13);
    }

    #[test]
    fn zero_profile_moment() {
        let m = moment_integral(ActivationPower(2), -3.0, 1.5, 1e-6).unwrap();
        assert_eq!(m.value, 0.0);
    }

    #[test]
    fn rejects_divergent_order() {
        assert!(moment_integral(ActivationPower(1), 0.0, 1.0, 1e-6).is_err());
        assert!(moment_integral(ActivationPower(1), 0.0, 2.5, 1e-6).is_err());
        assert!(moment_integral(ActivationPower(1), 0.0, 0.5, 1e-1).is_err());
        // no kink: any order below s + 1 is fine
        assert!(moment_integral(ActivationPower(1), 3.0, 1.5, 1e-6).is_ok());
    }

    #[test]
    fn truncated_triangular_small_r() {
        assert!(truncated_triangular_moment(0.5).is_err());
        let s1 = truncated_triangular_moment(1.0).unwrap();
        let s2 = truncated_triangular_moment(2.0).unwrap();
        assert!(s1 > 0.0 && s2 > s1);
    }
}
