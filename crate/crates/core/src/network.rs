//! Finite-width two-layer ReLU^s networks and their Barron path cost.
//!
//! A network with atoms `(a_j, w_j, b_j)` evaluates to
//! `(1/m) Σ_j a_j max(w_j·x + b_j, 0)^s`. The same atoms read as the atomic
//! probability measure `(1/m) Σ_j δ_(a_j, w_j, b_j)`, so the path cost below
//! is the expected cost of that measure and bounds the Barron norm from above.

use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::domain::{dot, ActivationPower, DomainSpec};
use crate::error::{Error, Result};

/// One hidden unit `a·max(w·x + b, 0)^s`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(from = "(f64, Vec<f64>, f64)", into = "(f64, Vec<f64>, f64)")]
pub struct Atom {
    pub a: f64,
    pub w: Vec<f64>,
    pub b: f64,
}

impl Atom {
    pub fn new(a: f64, w: Vec<f64>, b: f64) -> Self {
        Atom { a, w, b }
    }
}

impl From<(f64, Vec<f64>, f64)> for Atom {
    fn from((a, w, b): (f64, Vec<f64>, f64)) -> Self {
        Atom { a, w, b }
    }
}

impl From<Atom> for (f64, Vec<f64>, f64) {
    fn from(atom: Atom) -> Self {
        (atom.a, atom.w, atom.b)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct TwoLayerNetwork {
    s: ActivationPower,
    atoms: Vec<Atom>,
}

impl TwoLayerNetwork {
    pub fn new(s: ActivationPower, atoms: Vec<Atom>) -> Result<Self> {
        let d = atoms
            .first()
            .map(|a| a.w.len())
            .ok_or_else(|| Error::invalid("network needs at least one atom (m >= 1)"))?;
        for atom in &atoms {
            if atom.w.len() != d {
                return Err(Error::DimensionMismatch {
                    expected: d,
                    got: atom.w.len(),
                });
            }
            if !atom.a.is_finite() || !atom.b.is_finite() || atom.w.iter().any(|x| !x.is_finite())
            {
                return Err(Error::invalid("network parameters must be finite"));
            }
        }
        Ok(TwoLayerNetwork { s, atoms })
    }

    /// The three-atom representation `σ(1) − σ(x) − σ(−x)` of the triangular
    /// hat `max(1 − |x|, 0)` on `[-1, 1]`, with the 1/m scaling folded into
    /// the outer weights.
    pub fn triangular_hat() -> Self {
        TwoLayerNetwork {
            s: ActivationPower::RELU,
            atoms: vec![
                Atom::new(3.0, vec![0.0], 1.0),
                Atom::new(-3.0, vec![1.0], 0.0),
                Atom::new(-3.0, vec![-1.0], 0.0),
            ],
        }
    }

    pub fn s(&self) -> ActivationPower {
        self.s
    }

    pub fn atoms(&self) -> &[Atom] {
        &self.atoms
    }

    pub fn width(&self) -> usize {
        self.atoms.len()
    }

    pub fn input_dim(&self) -> usize {
        self.atoms[0].w.len()
    }

    pub fn eval(&self, x: &[f64]) -> f64 {
        let sum: f64 = self
            .atoms
            .iter()
            .map(|at| at.a * self.s.activate(dot(&at.w, x) + at.b))
            .sum();
        sum / self.atoms.len() as f64
    }

    /// Multiplies every outer weight by `factor`.
    pub fn scaled(&self, factor: f64) -> Self {
        let atoms = self
            .atoms
            .iter()
            .map(|at| Atom::new(at.a * factor, at.w.clone(), at.b))
            .collect();
        TwoLayerNetwork { s: self.s, atoms }
    }

    pub fn check_domain(&self, domain: &DomainSpec) -> Result<()> {
        domain.validate()?;
        if domain.dim() != self.input_dim() {
            return Err(Error::DimensionMismatch {
                expected: domain.dim(),
                got: self.input_dim(),
            });
        }
        Ok(())
    }
}

/// A neuron rescaled so that `‖w‖_Ω = 1`.
#[derive(Debug, Clone, PartialEq)]
pub struct NormalizedNeuron {
    pub a: f64,
    pub w: Vec<f64>,
    pub b: f64,
}

/// Result of normalising a neuron: zero inner weights give a constant.
#[derive(Debug, Clone, PartialEq)]
pub enum NeuronForm {
    Normalized(NormalizedNeuron),
    Constant { value: f64 },
}

/// Uses positive homogeneity, `max(cz, 0)^s = c^s max(z, 0)^s` for `c > 0`,
/// to move `‖w‖_Ω` into the outer weight.
pub fn normalize_neuron(
    s: ActivationPower,
    domain: &DomainSpec,
    a: f64,
    w: &[f64],
    b: f64,
) -> Result<NeuronForm> {
    let c = domain.support_norm(w)?;
    Ok(normalize_with_norm(s, c, a, w, b))
}

pub(crate) fn normalize_with_norm(
    s: ActivationPower,
    c: f64,
    a: f64,
    w: &[f64],
    b: f64,
) -> NeuronForm {
    if c == 0.0 {
        return NeuronForm::Constant {
            value: a * s.activate(b),
        };
    }
    // Directions already on the unit sphere up to rounding keep their exact
    // (a, b), so identical neurons give bit-identical spectral moments.
    let c = if (c - 1.0).abs() <= 4.0 * f64::EPSILON { 1.0 } else { c };
    NeuronForm::Normalized(NormalizedNeuron {
        a: a * c.powi(s.get() as i32),
        w: w.iter().map(|x| x / c).collect(),
        b: b / c,
    })
}

/// `(1/m) Σ_j |a_j| (‖w_j‖_Ω + |b_j|)^s`, the cost of the atomic
/// representation. Always an upper bound on the Barron norm, never claimed
/// to be tight.
pub fn barron_cost_upper(net: &TwoLayerNetwork, domain: &DomainSpec) -> Result<f64> {
    net.check_domain(domain)?;
    let p = net.s.get() as i32;
    let total: f64 = net
        .atoms
        .iter()
        .map(|at| at.a.abs() * (domain.support_norm_unchecked(&at.w) + at.b.abs()).powi(p))
        .sum();
    Ok(total / net.width() as f64)
}

/// On-disk interchange format:
/// `{"s": int, "domain": {...}, "atoms": [[a, [w_1..w_d], b], ...]}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct NetworkDocument {
    pub s: ActivationPower,
    pub domain: DomainSpec,
    pub atoms: Vec<Atom>,
}

impl NetworkDocument {
    pub fn new(net: &TwoLayerNetwork, domain: &DomainSpec) -> Self {
        NetworkDocument {
            s: net.s,
            domain: domain.clone(),
            atoms: net.atoms.clone(),
        }
    }

    /// Validates all invariants and splits into network and domain.
    pub fn into_parts(self) -> Result<(TwoLayerNetwork, DomainSpec)> {
        let net = TwoLayerNetwork::new(self.s, self.atoms)?;
        net.check_domain(&self.domain)?;
        Ok((net, self.domain))
    }

    pub fn from_json_str(text: &str) -> Result<(TwoLayerNetwork, DomainSpec)> {
        let doc: NetworkDocument = serde_json::from_str(text)?;
        doc.into_parts()
    }

    pub fn read(path: &Path) -> Result<(TwoLayerNetwork, DomainSpec)> {
        Self::from_json_str(&std::fs::read_to_string(path)?)
    }

    pub fn to_json_string(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }
}
