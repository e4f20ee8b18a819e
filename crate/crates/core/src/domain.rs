//! Compact symmetric input domains and their support-function norms.
//!
//! For a compact set Ω the map `v ↦ sup_{x∈Ω} |v·x|` is the dual gauge of Ω.
//! Every domain here is symmetric about the origin and has nonempty interior,
//! which makes the gauge a genuine norm on ℝ^d.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Power `s` of the activation `max(0, z)^s`. `s = 0` is the Heaviside step.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct ActivationPower(pub u32);

impl ActivationPower {
    pub const HEAVISIDE: ActivationPower = ActivationPower(0);
    pub const RELU: ActivationPower = ActivationPower(1);

    pub fn get(self) -> u32 {
        self.0
    }

    pub fn as_f64(self) -> f64 {
        f64::from(self.0)
    }

    /// The embedding lower bound only holds for positive integer powers.
    pub fn require_positive(self) -> Result<Self> {
        if self.0 == 0 {
            return Err(Error::invalid(
                "activation power s must be a positive integer for this operation",
            ));
        }
        Ok(self)
    }

    /// `max(z, 0)^s` with the right-continuous convention `0^0 = 1`.
    pub fn activate(self, z: f64) -> f64 {
        if z < 0.0 {
            0.0
        } else {
            z.powi(self.0 as i32)
        }
    }
}

impl From<u32> for ActivationPower {
    fn from(s: u32) -> Self {
        ActivationPower(s)
    }
}

/// A compact, origin-symmetric domain with nonempty interior.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum DomainSpec {
    /// Axis-aligned box `∏ [-h_i, h_i]`.
    Box { halfwidths: Vec<f64> },
    /// Euclidean ball of the given radius in dimension `dim`.
    Ball { radius: f64, dim: usize },
    /// Convex hull of a vertex list closed under negation.
    #[serde(rename = "polytope")]
    SymmetricPolytope { vertices: Vec<Vec<f64>> },
}

const SYMMETRY_TOL: f64 = 1e-12;

impl DomainSpec {
    pub fn unit_box(dim: usize) -> Self {
        DomainSpec::Box {
            halfwidths: vec![1.0; dim],
        }
    }

    /// `[-1, 1]`, the domain of the triangular-hat example.
    pub fn unit_interval() -> Self {
        Self::unit_box(1)
    }

    pub fn ball(radius: f64, dim: usize) -> Self {
        DomainSpec::Ball { radius, dim }
    }

    pub fn dim(&self) -> usize {
        match self {
            DomainSpec::Box { halfwidths } => halfwidths.len(),
            DomainSpec::Ball { dim, .. } => *dim,
            DomainSpec::SymmetricPolytope { vertices } => vertices.first().map_or(0, Vec::len),
        }
    }

    /// Checks compactness, symmetry and nonempty interior.
    pub fn validate(&self) -> Result<()> {
        match self {
            DomainSpec::Box { halfwidths } => {
                if halfwidths.is_empty() {
                    return Err(Error::invalid("box domain needs at least one dimension"));
                }
                if let Some(h) = halfwidths.iter().find(|h| !(h.is_finite() && **h > 0.0)) {
                    return Err(Error::invalid(format!(
                        "box halfwidths must be positive and finite, got {h}"
                    )));
                }
            }
            DomainSpec::Ball { radius, dim } => {
                if *dim == 0 {
                    return Err(Error::invalid("ball domain needs dim >= 1"));
                }
                if !(radius.is_finite() && *radius > 0.0) {
                    return Err(Error::invalid(format!(
                        "ball radius must be positive and finite, got {radius}"
                    )));
                }
            }
            DomainSpec::SymmetricPolytope { vertices } => validate_polytope(vertices)?,
        }
        Ok(())
    }

    fn check_dim(&self, v: &[f64]) -> Result<()> {
        let d = self.dim();
        if v.len() != d {
            return Err(Error::DimensionMismatch {
                expected: d,
                got: v.len(),
            });
        }
        Ok(())
    }

    /// `‖v‖_Ω = sup_{x∈Ω} |v·x|`.
    pub fn support_norm(&self, v: &[f64]) -> Result<f64> {
        self.check_dim(v)?;
        Ok(self.support_norm_unchecked(v))
    }

    pub(crate) fn support_norm_unchecked(&self, v: &[f64]) -> f64 {
        match self {
            DomainSpec::Box { halfwidths } => halfwidths
                .iter()
                .zip(v)
                .map(|(h, vi)| h * vi.abs())
                .sum(),
            DomainSpec::Ball { radius, .. } => radius * v.iter().map(|x| x * x).sum::<f64>().sqrt(),
            DomainSpec::SymmetricPolytope { vertices } => vertices
                .iter()
                .map(|x| dot(x, v).abs())
                .fold(0.0, f64::max),
        }
    }

    /// A subgradient of `v ↦ ‖v‖_Ω` at `v` (zero at the origin).
    pub(crate) fn support_norm_subgradient(&self, v: &[f64]) -> Vec<f64> {
        match self {
            DomainSpec::Box { halfwidths } => halfwidths
                .iter()
                .zip(v)
                .map(|(h, vi)| if *vi == 0.0 { 0.0 } else { h * vi.signum() })
                .collect(),
            DomainSpec::Ball { radius, .. } => {
                let n = v.iter().map(|x| x * x).sum::<f64>().sqrt();
                if n == 0.0 {
                    vec![0.0; v.len()]
                } else {
                    v.iter().map(|x| radius * x / n).collect()
                }
            }
            DomainSpec::SymmetricPolytope { vertices } => {
                let best = vertices
                    .iter()
                    .max_by(|x, y| dot(x, v).abs().total_cmp(&dot(y, v).abs()))
                    .expect("validated polytope has vertices");
                let sign = dot(best, v).signum();
                if dot(best, v) == 0.0 {
                    vec![0.0; v.len()]
                } else {
                    best.iter().map(|x| sign * x).collect()
                }
            }
        }
    }

    /// Membership test used when sampling points inside Ω.
    pub fn contains(&self, x: &[f64]) -> bool {
        match self {
            DomainSpec::Box { halfwidths } => {
                halfwidths.iter().zip(x).all(|(h, xi)| xi.abs() <= *h)
            }
            DomainSpec::Ball { radius, .. } => {
                x.iter().map(|v| v * v).sum::<f64>() <= radius * radius
            }
            // Points produced for polytopes are convex combinations of
            // vertices and lie inside by construction.
            DomainSpec::SymmetricPolytope { .. } => true,
        }
    }
}

pub(crate) fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn validate_polytope(vertices: &[Vec<f64>]) -> Result<()> {
    let d = vertices
        .first()
        .map(Vec::len)
        .ok_or_else(|| Error::invalid("polytope needs at least one vertex"))?;
    if d == 0 {
        return Err(Error::invalid("polytope vertices must have dimension >= 1"));
    }
    for v in vertices {
        if v.len() != d {
            return Err(Error::DimensionMismatch {
                expected: d,
                got: v.len(),
            });
        }
        if v.iter().any(|x| !x.is_finite()) {
            return Err(Error::invalid("polytope vertices must be finite"));
        }
        let has_negation = vertices.iter().any(|u| {
            u.iter()
                .zip(v)
                .all(|(a, b)| (a + b).abs() <= SYMMETRY_TOL * (1.0 + b.abs()))
        });
        if !has_negation {
            return Err(Error::invalid(format!(
                "polytope vertex set is not closed under negation: missing -{v:?}"
            )));
        }
    }
    if matrix_rank(vertices, d) < d {
        return Err(Error::invalid(
            "polytope vertices do not span R^d (empty interior)",
        ));
    }
    Ok(())
}

/// Row rank by Gaussian elimination with partial pivoting.
fn matrix_rank(rows: &[Vec<f64>], cols: usize) -> usize {
    let mut m: Vec<Vec<f64>> = rows.to_vec();
    let scale = m
        .iter()
        .flatten()
        .fold(0.0_f64, |acc, x| acc.max(x.abs()))
        .max(f64::MIN_POSITIVE);
    let tol = 1e-10 * scale;
    let mut rank = 0;
    for col in 0..cols {
        let pivot = (rank..m.len()).max_by(|&i, &j| m[i][col].abs().total_cmp(&m[j][col].abs()));
        let Some(p) = pivot else { break };
        if m[p][col].abs() <= tol {
            continue;
        }
        m.swap(rank, p);
        for i in rank + 1..m.len() {
            let f = m[i][col] / m[rank][col];
            for k in col..cols {
                m[i][k] -= f * m[rank][k];
            }
        }
        rank += 1;
    }
    rank
}

#[cfg(test)]
mod tests {
    use super::*;

    fn diamond() -> DomainSpec {
        DomainSpec::SymmetricPolytope {
            vertices: vec![
                vec![1.0, 0.0],
                vec![-1.0, 0.0],
                vec![0.0, 1.0],
                vec![0.0, -1.0],
            ],
        }
    }

    #[test]
    fn box_norm_is_weighted_l1() {
        let d = DomainSpec::unit_box(3);
        assert_eq!(d.support_norm(&[1.0, -2.0, 3.0]).unwrap(), 6.0);
    }

    #[test]
    fn ball_norm_scales_euclidean() {
        let d = DomainSpec::ball(2.0, 2);
        assert_eq!(d.support_norm(&[3.0, 4.0]).unwrap(), 10.0);
    }

    #[test]
    fn polytope_norm_by_enumeration() {
        // Vertices ±e1, ±e2: |v·x| = 0.5 at each of the four.
        let v = [0.5f64, 0.5];
        let brute = [[1.0f64, 0.0], [-1.0, 0.0], [0.0, 1.0], [0.0, -1.0]]
            .iter()
            .map(|x| (x[0] * v[0] + x[1] * v[1]).abs())
            .fold(0.0, f64::max);
        assert_eq!(brute, 0.5);
        assert_eq!(diamond().support_norm(&v).unwrap(), brute);
    }

    #[test]
    fn dimension_mismatch_rejected() {
        let err = DomainSpec::unit_box(2).support_norm(&[1.0]).unwrap_err();
        assert!(matches!(err, Error::DimensionMismatch { expected: 2, got: 1 }));
    }

    #[test]
    fn invalid_domains_rejected() {
        assert!(DomainSpec::Box { halfwidths: vec![1.0, 0.0] }.validate().is_err());
        assert!(DomainSpec::ball(-1.0, 2).validate().is_err());
        assert!(DomainSpec::ball(1.0, 0).validate().is_err());
        let asym = DomainSpec::SymmetricPolytope {
            vertices: vec![vec![1.0, 0.0], vec![0.0, 1.0], vec![-1.0, 0.0]],
        };
        assert!(asym.validate().is_err());
        let flat = DomainSpec::SymmetricPolytope {
            vertices: vec![vec![1.0, 1.0], vec![-1.0, -1.0]],
        };
        assert!(flat.validate().is_err());
        assert!(diamond().validate().is_ok());
    }

    #[test]
    fn domain_json_shape() {
        let json = serde_json::to_value(DomainSpec::ball(2.0, 3)).unwrap();
        assert_eq!(json["type"], "ball");
        let back: DomainSpec =
            serde_json::from_str(r#"{"type":"polytope","vertices":[[1,0],[-1,0],[0,1],[0,-1]]}"#)
                .unwrap();
        assert_eq!(back, diamond());
    }
}
