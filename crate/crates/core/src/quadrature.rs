//! Panel-based Gauss–Legendre quadrature with global adaptive bisection.
//!
//! Every panel is integrated twice: once with an `n`-point rule on the whole
//! panel and once with the same rule on each half. The halved result is
//! kept; the difference is the panel's error estimate. The panel with the
//! largest estimate is bisected until the total meets the tolerance or the
//! panel budget runs out. Subdivision order is fixed, so results are
//! bit-reproducible.

use std::cmp::Ordering;
use std::collections::BinaryHeap;
use std::ops::{Add, Mul, Sub};
use std::sync::OnceLock;

use gauss_quad::legendre::GaussLegendre;
use num_complex::Complex64;

/// Default number of Gauss nodes per panel.
pub const DEFAULT_NODES: usize = 12;

/// Values that can be accumulated by the integrator.
pub trait Quantity: Copy + Add<Output = Self> + Sub<Output = Self> + Mul<f64, Output = Self> {
    fn zero() -> Self;
    fn magnitude(&self) -> f64;
}

impl Quantity for f64 {
    fn zero() -> Self {
        0.0
    }
    fn magnitude(&self) -> f64 {
        self.abs()
    }
}

impl Quantity for Complex64 {
    fn zero() -> Self {
        Complex64::new(0.0, 0.0)
    }
    fn magnitude(&self) -> f64 {
        self.norm()
    }
}

/// Gauss–Legendre nodes and weights on `[-1, 1]`, ascending.
#[derive(Debug, Clone)]
pub struct GaussRule {
    nodes: Vec<f64>,
    weights: Vec<f64>,
}

impl GaussRule {
    pub fn legendre(n: usize) -> Self {
        let rule = GaussLegendre::new(n.max(2)).expect("gauss-legendre rule with n >= 2");
        let mut pairs: Vec<(f64, f64)> = rule.as_node_weight_pairs().to_vec();
        pairs.sort_by(|a, b| a.0.total_cmp(&b.0));
        GaussRule {
            nodes: pairs.iter().map(|p| p.0).collect(),
            weights: pairs.iter().map(|p| p.1).collect(),
        }
    }

    /// Shared default rule.
    pub fn standard() -> &'static GaussRule {
        static RULE: OnceLock<GaussRule> = OnceLock::new();
        RULE.get_or_init(|| GaussRule::legendre(DEFAULT_NODES))
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    /// `(z, weight)` pairs mapped onto `[a, b]`.
    pub fn mapped(&self, a: f64, b: f64) -> impl Iterator<Item = (f64, f64)> + '_ {
        let half = 0.5 * (b - a);
        let mid = 0.5 * (a + b);
        self.nodes
            .iter()
            .zip(&self.weights)
            .map(move |(x, w)| (mid + half * x, half * w))
    }

    /// Returns the integral and the integral of the absolute value.
    pub fn apply<T: Quantity, F: FnMut(f64) -> T>(&self, a: f64, b: f64, f: &mut F) -> (T, f64) {
        let mut acc = T::zero();
        let mut abs = 0.0;
        for (z, w) in self.mapped(a, b) {
            let v = f(z);
            acc = acc + v * w;
            abs += v.magnitude() * w.abs();
        }
        (acc, abs)
    }
}

/// Absolute/relative tolerance pair; the target is the larger of the two.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Tolerance {
    pub abs: f64,
    pub rel: f64,
}

impl Tolerance {
    pub fn relative(rel: f64) -> Self {
        Tolerance { abs: 0.0, rel }
    }

    pub fn target(&self, value: f64) -> f64 {
        self.abs.max(self.rel * value.abs())
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Integral<T> {
    pub value: T,
    /// Sum of per-panel estimates plus a roundoff floor.
    pub err: f64,
    pub converged: bool,
    pub panels: usize,
}

struct Panel<T> {
    a: f64,
    b: f64,
    left: T,
    right: T,
    err: f64,
    abs: f64,
}

impl<T> Panel<T> {
    fn key(&self) -> f64 {
        self.err
    }
}

impl<T> PartialEq for Panel<T> {
    fn eq(&self, other: &Self) -> bool {
        self.key().total_cmp(&other.key()) == Ordering::Equal && self.a == other.a
    }
}
impl<T> Eq for Panel<T> {}
impl<T> PartialOrd for Panel<T> {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl<T> Ord for Panel<T> {
    fn cmp(&self, other: &Self) -> Ordering {
        // Max-heap on error; ties broken by position for determinism.
        self.key()
            .total_cmp(&other.key())
            .then_with(|| other.a.total_cmp(&self.a))
    }
}

fn evaluate_panel<T: Quantity, F: FnMut(f64) -> T>(
    rule: &GaussRule,
    a: f64,
    b: f64,
    whole: T,
    f: &mut F,
) -> Panel<T> {
    let m = 0.5 * (a + b);
    let (left, abs_l) = rule.apply(a, m, f);
    let (right, abs_r) = rule.apply(m, b, f);
    let err = (left + right - whole).magnitude();
    Panel {
        a,
        b,
        left,
        right,
        err,
        abs: abs_l + abs_r,
    }
}

/// Splits each interval between consecutive knots into panels no wider than
/// `max_width`.
pub fn split_knots(knots: &[f64], max_width: f64) -> Vec<(f64, f64)> {
    let mut out = Vec::new();
    for w in knots.windows(2) {
        let (a, b) = (w[0], w[1]);
        if b <= a {
            continue;
        }
        let n = ((b - a) / max_width).ceil().max(1.0) as usize;
        let h = (b - a) / n as f64;
        for i in 0..n {
            let lo = a + h * i as f64;
            let hi = if i + 1 == n { b } else { a + h * (i + 1) as f64 };
            out.push((lo, hi));
        }
    }
    out
}

/// Globally adaptive integration of `f` over the given initial panels.
pub fn integrate_panels<T, F>(
    mut f: F,
    initial: &[(f64, f64)],
    tol: Tolerance,
    max_panels: usize,
    rule: &GaussRule,
) -> Integral<T>
where
    T: Quantity,
    F: FnMut(f64) -> T,
{
    let mut heap = BinaryHeap::with_capacity(initial.len() * 2);
    for &(a, b) in initial {
        let (whole, _) = rule.apply(a, b, &mut f);
        heap.push(evaluate_panel(rule, a, b, whole, &mut f));
    }
    let total = |heap: &BinaryHeap<Panel<T>>| {
        let mut value = T::zero();
        let mut err = 0.0;
        let mut abs = 0.0;
        for p in heap.iter() {
            value = value + p.left + p.right;
            err += p.err;
            abs += p.abs;
        }
        (value, err, abs)
    };
    let (mut value, mut err, mut abs) = total(&heap);
    let mut converged = true;
    loop {
        let floor = 50.0 * f64::EPSILON * abs;
        if err <= tol.target(value.magnitude()).max(floor) {
            break;
        }
        if heap.len() >= max_panels {
            converged = false;
            break;
        }
        let Some(worst) = heap.pop() else { break };
        let m = 0.5 * (worst.a + worst.b);
        if m <= worst.a || m >= worst.b {
            // Cannot bisect further in floating point.
            heap.push(worst);
            converged = false;
            break;
        }
        let left = evaluate_panel(rule, worst.a, m, worst.left, &mut f);
        let right = evaluate_panel(rule, m, worst.b, worst.right, &mut f);
        value = value - worst.left - worst.right + left.left + left.right + right.left + right.right;
        err += left.err + right.err - worst.err;
        abs += left.abs + right.abs - worst.abs;
        heap.push(left);
        heap.push(right);
        // Periodic resummation keeps incremental drift out of the estimate.
        if heap.len() % 4096 == 0 {
            (value, err, abs) = total(&heap);
        }
    }
    let (value, err, abs) = total(&heap);
    Integral {
        value,
        err: err + 50.0 * f64::EPSILON * abs,
        converged,
        panels: heap.len(),
    }
}

/// Convenience wrapper: adaptive integration between consecutive knots.
pub fn integrate<T, F>(f: F, knots: &[f64], tol: Tolerance, max_panels: usize) -> Integral<T>
where
    T: Quantity,
    F: FnMut(f64) -> T,
{
    let initial = split_knots(knots, f64::INFINITY);
    integrate_panels(f, &initial, tol, max_panels, GaussRule::standard())
}
