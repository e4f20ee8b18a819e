//! Small numerical helpers shared by the suites.

use crate::domain::DomainSpec;

/// Least-squares line `y ≈ slope·x + intercept`.
#[derive(Debug, Clone, PartialEq)]
pub struct LinearFit {
    pub slope: f64,
    pub intercept: f64,
    pub residuals: Vec<f64>,
}

impl LinearFit {
    pub fn max_abs_residual(&self) -> f64 {
        self.residuals.iter().fold(0.0, |m, r| m.max(r.abs()))
    }
}

/// Ordinary least squares. Panics if fewer than two points or all `x` equal.
pub fn linear_fit(x: &[f64], y: &[f64]) -> LinearFit {
    assert!(x.len() == y.len() && x.len() >= 2, "need two or more points");
    let n = x.len() as f64;
    let mx = x.iter().sum::<f64>() / n;
    let my = y.iter().sum::<f64>() / n;
    let sxx: f64 = x.iter().map(|v| (v - mx) * (v - mx)).sum();
    let sxy: f64 = x.iter().zip(y).map(|(a, b)| (a - mx) * (b - my)).sum();
    assert!(sxx > 0.0, "x values are all equal");
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let residuals = x.iter().zip(y).map(|(a, b)| b - (slope * a + intercept)).collect();
    LinearFit {
        slope,
        intercept,
        residuals,
    }
}

/// `n` points from `a` to `b` equally spaced in log scale.
pub fn log_space(a: f64, b: f64, n: usize) -> Vec<f64> {
    if n == 1 {
        return vec![a];
    }
    let (la, lb) = (a.ln(), b.ln());
    (0..n)
        .map(|i| {
            if i + 1 == n {
                b
            } else {
                (la + (lb - la) * i as f64 / (n - 1) as f64).exp()
            }
        })
        .collect()
}

fn primes(n: usize) -> Vec<u64> {
    let mut out = Vec::with_capacity(n);
    let mut k = 2u64;
    while out.len() < n {
        if out.iter().take_while(|p| *p * *p <= k).all(|p| !k.is_multiple_of(*p)) {
            out.push(k);
        }
        k += 1;
    }
    out
}

/// Radical inverse of `i` in base `base`.
pub fn radical_inverse(mut i: u64, base: u64) -> f64 {
    let inv = 1.0 / base as f64;
    let mut f = inv;
    let mut r = 0.0;
    while i > 0 {
        r += (i % base) as f64 * f;
        i /= base;
        f *= inv;
    }
    r
}

/// First `n` points of the Halton sequence in `[0, 1)^dim`, skipping the
/// origin.
pub fn halton(n: usize, dim: usize) -> Vec<Vec<f64>> {
    let bases = primes(dim);
    (1..=n as u64)
        .map(|i| bases.iter().map(|&b| radical_inverse(i, b)).collect())
        .collect()
}

/// Deterministic low-discrepancy points inside Ω.
///
/// * box: Halton points scaled to the halfwidths;
/// * ball: Halton points in the cube, pushed radially so the cube's
///   `ℓ∞` shells land on the ball's spheres;
/// * polytope: convex combinations of the vertices with Halton weights.
pub fn domain_grid(domain: &DomainSpec, n: usize) -> Vec<Vec<f64>> {
    match domain {
        DomainSpec::Box { halfwidths } => halton(n, halfwidths.len())
            .into_iter()
            .map(|p| p.iter().zip(halfwidths).map(|(u, h)| (2.0 * u - 1.0) * h).collect())
            .collect(),
        DomainSpec::Ball { radius, dim } => halton(n, *dim)
            .into_iter()
            .map(|p| {
                let q: Vec<f64> = p.iter().map(|u| 2.0 * u - 1.0).collect();
                let inf = q.iter().fold(0.0f64, |m, v| m.max(v.abs()));
                let two = q.iter().map(|v| v * v).sum::<f64>().sqrt();
                let scale = if two == 0.0 { 0.0 } else { radius * inf / two };
                q.iter().map(|v| v * scale).collect()
            })
            .collect(),
        DomainSpec::SymmetricPolytope { vertices } => {
            let d = domain.dim();
            halton(n, vertices.len())
                .into_iter()
                .map(|u| {
                    let total: f64 = u.iter().sum();
                    let mut x = vec![0.0; d];
                    for (w, v) in u.iter().zip(vertices) {
                        for (xi, vi) in x.iter_mut().zip(v) {
                            *xi += w / total * vi;
                        }
                    }
                    x
                })
                .collect()
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exact_line_is_recovered() {
        let x = [0.0, 1.0, 2.0, 3.0];
        let y: Vec<f64> = x.iter().map(|v| 2.5 * v - 1.0).collect();
        let fit = linear_fit(&x, &y);
        assert!((fit.slope - 2.5).abs() < 1e-14);
        assert!((fit.intercept + 1.0).abs() < 1e-14);
        assert!(fit.max_abs_residual() < 1e-14);
    }

    #[test]
    fn log_space_endpoints() {
        let v = log_space(1.0, 1e4, 60);
        assert_eq!(v.len(), 60);
        assert_eq!(v[0], 1.0);
        assert_eq!(v[59], 1e4);
        assert!(v.windows(2).all(|w| w[1] > w[0]));
    }

    #[test]
    fn halton_base_two() {
        assert_eq!(radical_inverse(1, 2), 0.5);
        assert_eq!(radical_inverse(2, 2), 0.25);
        assert_eq!(radical_inverse(3, 2), 0.75);
        assert_eq!(primes(5), vec![2, 3, 5, 7, 11]);
    }

    #[test]
    fn grids_stay_inside() {
        let diamond = DomainSpec::SymmetricPolytope {
            vertices: vec![vec![1.0, 0.0], vec![-1.0, 0.0], vec![0.0, 1.0], vec![0.0, -1.0]],
        };
        for dom in [DomainSpec::unit_box(3), DomainSpec::ball(2.0, 4), diamond] {
            let pts = domain_grid(&dom, 500);
            assert_eq!(pts.len(), 500);
            for p in &pts {
                assert!(dom.contains(p));
                if let DomainSpec::SymmetricPolytope { .. } = dom {
                    assert!(p[0].abs() + p[1].abs() <= 1.0 + 1e-12);
                }
            }
        }
    }
}
