//! Truncated Taylor jets `[f, f′, f″, …]` at a point.

use std::ops::{Add, Mul, Neg, Sub};

/// Values of a function and its first `order()` derivatives at one point.
#[derive(Debug, Clone, PartialEq)]
pub struct Jet(pub Vec<f64>);

fn binomial(n: usize, k: usize) -> f64 {
    (0..k).fold(1.0, |acc, i| acc * (n - i) as f64 / (i + 1) as f64)
}

impl Jet {
    pub fn constant(c: f64, order: usize) -> Jet {
        let mut v = vec![0.0; order + 1];
        v[0] = c;
        Jet(v)
    }

    /// The jet of the identity function `x ↦ x` at `x`.
    pub fn variable(x: f64, order: usize) -> Jet {
        let mut v = vec![0.0; order + 1];
        v[0] = x;
        if order >= 1 {
            v[1] = 1.0;
        }
        Jet(v)
    }

    pub fn order(&self) -> usize {
        self.0.len() - 1
    }

    pub fn value(&self) -> f64 {
        self.0[0]
    }

    pub fn truncate(&self, order: usize) -> Jet {
        Jet(self.0[..=order.min(self.order())].to_vec())
    }

    /// Jet of `f′`, one order shorter.
    pub fn derivative(&self) -> Jet {
        self.shift(1)
    }

    /// Jet of `f^{(k)}`.
    pub fn shift(&self, k: usize) -> Jet {
        assert!(k <= self.order(), "jet of order {} cannot supply {k} derivatives", self.order());
        Jet(self.0[k..].to_vec())
    }

    pub fn scale(&self, c: f64) -> Jet {
        Jet(self.0.iter().map(|v| v * c).collect())
    }

    /// `1/f`, from `Σᵢ C(k,i) r^{(i)} f^{(k−i)} = 0`.
    pub fn recip(&self) -> Jet {
        let f = &self.0;
        let mut r = vec![0.0; f.len()];
        r[0] = 1.0 / f[0];
        for k in 1..f.len() {
            let s: f64 = (0..k).map(|i| binomial(k, i) * r[i] * f[k - i]).sum();
            r[k] = -s / f[0];
        }
        Jet(r)
    }

    /// `f^a` for `f(x) > 0`, from `h′f = a f′h`.
    pub fn powf(&self, a: f64) -> Jet {
        let f = &self.0;
        let mut h = vec![0.0; f.len()];
        h[0] = f[0].powf(a);
        for k in 1..f.len() {
            // Σ_{i<k} C(k−1,i) h^{(i+1)} f^{(k−1−i)} = a Σ_{i<k} C(k−1,i) f^{(i+1)} h^{(k−1−i)}
            let rhs: f64 = (0..k).map(|i| binomial(k - 1, i) * f[i + 1] * h[k - 1 - i]).sum::<f64>() * a;
            let lhs: f64 = (0..k - 1).map(|i| binomial(k - 1, i) * h[i + 1] * f[k - 1 - i]).sum();
            h[k] = (rhs - lhs) / f[0];
        }
        Jet(h)
    }

    /// `exp f`, from `h′ = f′h`.
    pub fn exp(&self) -> Jet {
        let f = &self.0;
        let mut h = vec![0.0; f.len()];
        h[0] = f[0].exp();
        for k in 1..f.len() {
            h[k] = (0..k).map(|i| binomial(k - 1, i) * f[i + 1] * h[k - 1 - i]).sum();
        }
        Jet(h)
    }

    /// `ln f` for `f(x) > 0`.
    pub fn ln(&self) -> Jet {
        let mut out = vec![self.0[0].ln()];
        if self.order() >= 1 {
            let d = &self.derivative() * &self.truncate(self.order() - 1).recip();
            out.extend(d.0);
        }
        Jet(out)
    }
}

impl Mul for &Jet {
    type Output = Jet;

    /// Leibniz product, truncated to the shorter order.
    fn mul(self, rhs: &Jet) -> Jet {
        let n = self.order().min(rhs.order());
        Jet((0..=n).map(|k| (0..=k).map(|i| binomial(k, i) * self.0[i] * rhs.0[k - i]).sum()).collect())
    }
}

impl Add for &Jet {
    type Output = Jet;

    fn add(self, rhs: &Jet) -> Jet {
        let n = self.order().min(rhs.order());
        Jet((0..=n).map(|k| self.0[k] + rhs.0[k]).collect())
    }
}

impl Sub for &Jet {
    type Output = Jet;

    fn sub(self, rhs: &Jet) -> Jet {
        let n = self.order().min(rhs.order());
        Jet((0..=n).map(|k| self.0[k] - rhs.0[k]).collect())
    }
}

impl Neg for &Jet {
    type Output = Jet;

    fn neg(self) -> Jet {
        self.scale(-1.0)
    }
}
