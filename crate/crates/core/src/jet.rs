//! Truncated Taylor series ("jets") for exact derivatives of the cutoff.
//!
//! A jet of order `n` holds the coefficients `c_0..=c_n` of
//! `f(z + ε) = Σ c_k ε^k + O(ε^{n+1})`, so `f^{(k)}(z) = k!·c_k`.

#[derive(Debug, Clone, PartialEq)]
pub(crate) struct Jet(pub Vec<f64>);

impl Jet {
    pub fn constant(c: f64, order: usize) -> Jet {
        let mut v = vec![0.0; order + 1];
        v[0] = c;
        Jet(v)
    }

    /// The identity map shifted to `z`, i.e. `z + ε`.
    pub fn variable(z: f64, order: usize) -> Jet {
        let mut v = vec![0.0; order + 1];
        v[0] = z;
        if order > 0 {
            v[1] = 1.0;
        }
        Jet(v)
    }

    pub fn mul(&self, other: &Jet) -> Jet {
        let n = self.0.len();
        let mut out = vec![0.0; n];
        for (k, slot) in out.iter_mut().enumerate() {
            *slot = (0..=k).map(|j| self.0[j] * other.0[k - j]).sum();
        }
        Jet(out)
    }

    pub fn recip(&self) -> Jet {
        let a = &self.0;
        let inv = 1.0 / a[0];
        let mut b = vec![0.0; a.len()];
        b[0] = inv;
        for n in 1..a.len() {
            let s: f64 = (1..=n).map(|j| a[j] * b[n - j]).sum();
            b[n] = -inv * s;
        }
        Jet(b)
    }

    pub fn exp(&self) -> Jet {
        let a = &self.0;
        let mut e = vec![0.0; a.len()];
        e[0] = a[0].exp();
        for n in 1..a.len() {
            let s: f64 = (1..=n).map(|j| j as f64 * a[j] * e[n - j]).sum();
            e[n] = s / n as f64;
        }
        Jet(e)
    }

    pub fn add_scalar(mut self, c: f64) -> Jet {
        self.0[0] += c;
        self
    }

    pub fn sub(&self, other: &Jet) -> Jet {
        Jet(self.0.iter().zip(&other.0).map(|(a, b)| a - b).collect())
    }

    pub fn neg(&self) -> Jet {
        Jet(self.0.iter().map(|a| -a).collect())
    }

    /// Jet of `u ↦ f(-u)` at `-z`, given the jet of `f` at `z`.
    pub fn reflect(mut self) -> Jet {
        for (k, c) in self.0.iter_mut().enumerate() {
            if k % 2 == 1 {
                *c = -*c;
            }
        }
        self
    }

    /// `k`-th derivative value.
    pub fn derivative(&self, k: usize) -> f64 {
        self.0[k] * factorial(k)
    }
}

pub(crate) fn factorial(k: usize) -> f64 {
    (1..=k).fold(1.0, |acc, i| acc * i as f64)
}

/// Generalised binomial coefficient `C(s, k)` for real `s`.
pub(crate) fn binomial(s: f64, k: usize) -> f64 {
    (0..k).fold(1.0, |acc, i| acc * (s - i as f64) / (i as f64 + 1.0))
}
