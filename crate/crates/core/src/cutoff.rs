//! The smooth cutoff χ and the extended single-neuron profiles built on it.
//!
//! χ is the canonical exponential bump
//! `χ(z) = ψ(2−|z|) / (ψ(2−|z|) + ψ(|z|−1))`, `ψ(t) = exp(−1/t)` for `t > 0`.
//! It equals 1 on `[-1, 1]`, vanishes outside `(-2, 2)` and is C^∞. All
//! empirical constants measured downstream (decay envelopes, moment
//! constants) are specific to this choice of χ.
//!
//! On the transition band `1 < |z| < 2` the ratio is evaluated in logistic
//! form `1 / (1 + exp(g))` with `g = 1/(2−|z|) − 1/(|z|−1)`, which is the
//! same function without the underflow of the individual ψ factors.

use crate::domain::ActivationPower;
use crate::jet::{binomial, Jet};

/// Beyond this `|g|` the logistic factor is below the smallest normal f64
/// and χ is flat to machine precision.
const LOGISTIC_CUTOFF: f64 = 700.0;

fn transition_exponent(u: f64) -> f64 {
    1.0 / (2.0 - u) - 1.0 / (u - 1.0)
}

/// χ(z): 1 on `[-1, 1]`, 0 for `|z| ≥ 2`, smooth and monotone in between.
pub fn chi_eval(z: f64) -> f64 {
    let u = z.abs();
    if u <= 1.0 {
        return 1.0;
    }
    if u >= 2.0 {
        return 0.0;
    }
    let g = transition_exponent(u);
    if g > 0.0 {
        let e = (-g).exp();
        e / (1.0 + e)
    } else {
        1.0 / (1.0 + g.exp())
    }
}

/// Taylor jet of χ at `z` up to `order`.
pub(crate) fn chi_jet(z: f64, order: usize) -> Jet {
    let u = z.abs();
    if u <= 1.0 {
        return Jet::constant(1.0, order);
    }
    if u >= 2.0 {
        return Jet::constant(0.0, order);
    }
    let g0 = transition_exponent(u);
    if g0.abs() > LOGISTIC_CUTOFF {
        return Jet::constant(if g0 > 0.0 { 0.0 } else { 1.0 }, order);
    }
    let x = Jet::variable(u, order);
    let left = Jet::constant(2.0, order).sub(&x).recip();
    let right = x.add_scalar(-1.0).recip();
    let g = left.sub(&right);
    let jet = if g0 > 0.0 {
        let e = g.neg().exp();
        e.mul(&e.clone().add_scalar(1.0).recip())
    } else {
        g.exp().add_scalar(1.0).recip()
    };
    if z < 0.0 {
        jet.reflect()
    } else {
        jet
    }
}

/// Exponent of the activation inside a profile. Integer powers are the
/// case covered by the theory; real powers exist for exploratory probes.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ProfilePower {
    Integer(ActivationPower),
    Real(f64),
}

impl ProfilePower {
    pub fn value(self) -> f64 {
        match self {
            ProfilePower::Integer(s) => s.as_f64(),
            ProfilePower::Real(s) => s,
        }
    }

    /// `t^s` for `t ≥ 0`, with `0^0 = 1`.
    fn pow(self, t: f64) -> f64 {
        match self {
            ProfilePower::Integer(s) => t.powi(s.get() as i32),
            ProfilePower::Real(s) => {
                if s == 0.0 {
                    1.0
                } else {
                    t.powf(s)
                }
            }
        }
    }
}

impl From<ActivationPower> for ProfilePower {
    fn from(s: ActivationPower) -> Self {
        ProfilePower::Integer(s)
    }
}

/// The extended neuron `h(z) = χ(z)·max(z + b, 0)^s` on the real line.
#[derive(Debug, Clone, PartialEq)]
pub struct NeuronProfile {
    power: ProfilePower,
    b: f64,
    breakpoints: Vec<f64>,
}

impl NeuronProfile {
    pub fn new(s: ActivationPower, b: f64) -> Self {
        Self::with_power(ProfilePower::Integer(s), b)
    }

    pub fn with_power(power: ProfilePower, b: f64) -> Self {
        let mut breakpoints = vec![-2.0, -1.0, 1.0, 2.0];
        if -b > -2.0 && -b < 2.0 {
            breakpoints.push(-b);
        }
        breakpoints.sort_by(f64::total_cmp);
        breakpoints.dedup();
        NeuronProfile {
            power,
            b,
            breakpoints,
        }
    }

    pub fn power(&self) -> ProfilePower {
        self.power
    }

    pub fn b(&self) -> f64 {
        self.b
    }

    /// Sorted breakpoints in `[-2, 2]`; `-b` is present iff `-b ∈ (-2, 2)`.
    pub fn breakpoints(&self) -> &[f64] {
        &self.breakpoints
    }

    /// The location `-b` of the activation kink when it lies inside the
    /// open support of χ.
    pub fn kink(&self) -> Option<f64> {
        let k = -self.b;
        (k > -2.0 && k < 2.0).then_some(k)
    }

    /// True when the profile vanishes identically (`b ≤ -2`).
    pub fn is_zero(&self) -> bool {
        self.b <= -2.0
    }

    /// `(1 + |b|)^s`, the natural scale of the profile.
    pub fn scale(&self) -> f64 {
        (1.0 + self.b.abs()).powf(self.power.value())
    }

    pub fn eval(&self, z: f64) -> f64 {
        let t = z + self.b;
        if t < 0.0 || z.abs() >= 2.0 {
            return 0.0;
        }
        chi_eval(z) * self.power.pow(t)
    }

    /// Taylor jet of the profile at a point where it is smooth, i.e. away
    /// from `-b` and inside the support.
    pub(crate) fn jet(&self, z: f64, order: usize) -> Jet {
        let t = z + self.b;
        if t <= 0.0 || z.abs() >= 2.0 {
            return Jet::constant(0.0, order);
        }
        let s = self.power.value();
        let act = Jet(
            (0..=order)
                .map(|k| {
                    let c = binomial(s, k);
                    if c == 0.0 {
                        0.0
                    } else {
                        c * self.power.pow(t) * t.powi(-(k as i32))
                    }
                })
                .collect(),
        );
        act.mul(&chi_jet(z, order))
    }

    /// Pieces of `[-2, 2]` between consecutive breakpoints on which the
    /// profile is not identically zero.
    pub(crate) fn pieces(&self) -> Vec<(f64, f64)> {
        let left_edge = (-self.b).max(-2.0);
        self.breakpoints
            .windows(2)
            .map(|w| (w[0], w[1]))
            .filter(|&(_, hi)| hi > left_edge)
            .collect()
    }
}

/// `χ(z)·max(z + b, 0)^s` with `0^0 = 1` at `z = -b`.
pub fn profile_eval(s: ActivationPower, b: f64, z: f64) -> f64 {
    NeuronProfile::new(s, b).eval(z)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::jet::factorial;

    fn psi(t: f64) -> f64 {
        if t > 0.0 {
            (-1.0 / t).exp()
        } else {
            0.0
        }
    }

    fn chi_ratio_form(z: f64) -> f64 {
        let u = z.abs();
        let num = psi(2.0 - u);
        let den = num + psi(u - 1.0);
        num / den
    }

    #[test]
    fn chi_spot_values() {
        assert_eq!(chi_eval(0.0), 1.0);
        assert_eq!(chi_eval(2.0), 0.0);
        assert_eq!(chi_eval(1.5), 0.5);
        assert_eq!(chi_eval(-1.5), 0.5);
    }

    #[test]
    fn chi_matches_psi_ratio() {
        for i in 1..200 {
            let z = 1.0 + i as f64 / 200.0;
            let (a, b) = (chi_eval(z), chi_ratio_form(z));
            assert!((a - b).abs() < 1e-15, "z={z}: {a} vs {b}");
        }
    }

    #[test]
    fn chi_invariants_on_grid() {
        let n = 10_000;
        let mut prev = chi_eval(1.0);
        for i in 0..=n {
            let z = -2.5 + 5.0 * i as f64 / n as f64;
            let c = chi_eval(z);
            assert!((0.0..=1.0).contains(&c));
            assert_eq!(c, chi_eval(-z));
            if z.abs() <= 1.0 {
                assert_eq!(c, 1.0);
            }
            if z.abs() >= 2.0 {
                assert_eq!(c, 0.0);
            }
        }
        for i in 0..=n {
            let z = 1.0 + i as f64 / n as f64;
            let c = chi_eval(z);
            assert!(c <= prev, "χ increased at {z}");
            prev = c;
        }
    }

    #[test]
    fn chi_low_derivatives_bounded() {
        let h = 1e-4;
        let mut z = -2.0;
        while z <= 2.0 {
            let d1 = (chi_eval(z + h) - chi_eval(z - h)) / (2.0 * h);
            let d2 = (chi_eval(z + h) - 2.0 * chi_eval(z) + chi_eval(z - h)) / (h * h);
            assert!(d1.abs() < 10.0 && d2.abs() < 10.0, "z={z}: {d1} {d2}");
            z += h;
        }
    }

    #[test]
    fn chi_jet_matches_finite_differences() {
        for &z in &[1.2, 1.5, 1.8, -1.3, -1.7] {
            let jet = chi_jet(z, 3);
            assert!((jet.0[0] - chi_eval(z)).abs() < 1e-15);
            let h = 1e-5;
            let d1 = (chi_eval(z + h) - chi_eval(z - h)) / (2.0 * h);
            let d2 = (chi_eval(z + h) - 2.0 * chi_eval(z) + chi_eval(z - h)) / (h * h);
            assert!((jet.derivative(1) - d1).abs() < 1e-6, "z={z}");
            assert!((jet.derivative(2) - d2).abs() < 1e-3, "z={z}");
            // third derivative from the second-derivative jet
            let j2p = chi_jet(z + h, 2).derivative(2);
            let j2m = chi_jet(z - h, 2).derivative(2);
            assert!((jet.derivative(3) - (j2p - j2m) / (2.0 * h)).abs() < 1e-4);
        }
    }

    #[test]
    fn profile_spot_values() {
        assert_eq!(profile_eval(ActivationPower(1), 0.0, 0.5), 0.5);
        assert_eq!(profile_eval(ActivationPower(2), 1.0, -3.0), 0.0);
        let v = profile_eval(ActivationPower(1), -0.25, 1.5);
        assert!((v - chi_eval(1.5) * 1.25).abs() < 1e-16);
        assert_eq!(v, 0.625);
        // Heaviside kink is right-continuous.
        assert_eq!(profile_eval(ActivationPower(0), 0.3, -0.3), 1.0);
        assert_eq!(profile_eval(ActivationPower(0), 0.3, -0.30001), 0.0);
    }

    #[test]
    fn profile_vanishes_off_support() {
        for s in 0..4 {
            for &b in &[-3.0, -0.5, 0.0, 0.7, 3.0] {
                let p = NeuronProfile::new(ActivationPower(s), b);
                for i in 0..400 {
                    let z = -4.0 + 8.0 * i as f64 / 400.0;
                    if z.abs() >= 2.0 || z < -b {
                        assert_eq!(p.eval(z), 0.0);
                    }
                }
            }
        }
    }

    #[test]
    fn breakpoints_and_kink() {
        let p = NeuronProfile::new(ActivationPower(1), 0.5);
        assert_eq!(p.breakpoints(), &[-2.0, -1.0, -0.5, 1.0, 2.0]);
        assert_eq!(p.kink(), Some(-0.5));
        let q = NeuronProfile::new(ActivationPower(1), 3.0);
        assert_eq!(q.breakpoints(), &[-2.0, -1.0, 1.0, 2.0]);
        assert_eq!(q.kink(), None);
        assert!(NeuronProfile::new(ActivationPower(2), -2.0).is_zero());
        assert_eq!(NeuronProfile::new(ActivationPower(1), -1.0).kink(), Some(1.0));
    }

    #[test]
    fn profile_jet_on_plateau_is_polynomial() {
        let p = NeuronProfile::new(ActivationPower(3), 0.5);
        let jet = p.jet(0.2, 5);
        // (z + 0.5)^3 at z = 0.2: derivatives 3!/(3-k)! t^{3-k}
        let t: f64 = 0.7;
        let expect = [t.powi(3), 3.0 * t * t, 6.0 * t, 6.0, 0.0, 0.0];
        for (k, e) in expect.iter().enumerate() {
            assert!((jet.derivative(k) - e).abs() < 1e-13, "k={k}");
        }
        assert!((factorial(3) - 6.0).abs() < 1e-15);
    }
}
