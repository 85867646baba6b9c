//! Closed coefficient class: finite sums of
//! `c · Π (aᵢ + σᵢx)^{eᵢ} · exp(k₁x + k₂x²)` with real exponents.
//!
//! The class is closed under products and differentiation, which is all the
//! operator algebra needs. Terms can be evaluated at `x = e + d` with the
//! offset `d` kept separate, so factors vanishing at an endpoint `e` stay
//! accurate at distances far below machine precision relative to `e`.

use std::fmt;

use serde::Serialize;

use crate::jet::Jet;

/// The linear function `c + σx` with `σ = ±1`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Linear {
    pub c: f64,
    pub sigma: f64,
}

impl Linear {
    pub const X: Linear = Linear { c: 0.0, sigma: 1.0 };
    pub const ONE_MINUS_X: Linear = Linear { c: 1.0, sigma: -1.0 };
    pub const ONE_PLUS_X: Linear = Linear { c: 1.0, sigma: 1.0 };

    /// `c + σ(e + d)`, exact when `c + σe` vanishes.
    fn eval_split(&self, e: f64, d: f64) -> f64 {
        if e.is_finite() {
            (self.c + self.sigma * e) + self.sigma * d
        } else {
            self.c + self.sigma * (e + d)
        }
    }

    fn same(&self, other: &Linear) -> bool {
        self.sigma == other.sigma && (self.c - other.c).abs() <= 1e-14 * self.c.abs().max(1.0)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Factor {
    pub base: Linear,
    pub exponent: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Term {
    pub coef: f64,
    pub factors: Vec<Factor>,
    /// `k₁` in `exp(k₁x + k₂x²)`
    pub exp_linear: f64,
    /// `k₂` in `exp(k₁x + k₂x²)`
    pub exp_quadratic: f64,
}

const EXPONENT_TOL: f64 = 1e-12;

impl Term {
    pub fn constant(c: f64) -> Term {
        Term { coef: c, factors: Vec::new(), exp_linear: 0.0, exp_quadratic: 0.0 }
    }

    /// `c · (base)^exponent`
    pub fn power(c: f64, base: Linear, exponent: f64) -> Term {
        Term::constant(c).times_factor(base, exponent)
    }

    pub fn times_factor(mut self, base: Linear, exponent: f64) -> Term {
        self.factors.push(Factor { base, exponent });
        self.normalize();
        self
    }

    pub fn times_exp(mut self, k1: f64, k2: f64) -> Term {
        self.exp_linear += k1;
        self.exp_quadratic += k2;
        self
    }

    fn normalize(&mut self) {
        self.factors.sort_by(|a, b| a.base.sigma.total_cmp(&b.base.sigma).then(a.base.c.total_cmp(&b.base.c)));
        let mut merged: Vec<Factor> = Vec::with_capacity(self.factors.len());
        for f in self.factors.drain(..) {
            match merged.last_mut() {
                Some(last) if last.base.same(&f.base) => last.exponent += f.exponent,
                _ => merged.push(f),
            }
        }
        for f in &mut merged {
            let r = f.exponent.round();
            if (f.exponent - r).abs() <= EXPONENT_TOL {
                f.exponent = r;
            }
        }
        merged.retain(|f| f.exponent != 0.0);
        self.factors = merged;
    }

    fn same_shape(&self, other: &Term) -> bool {
        self.factors.len() == other.factors.len()
            && self.exp_linear == other.exp_linear
            && self.exp_quadratic == other.exp_quadratic
            && self
                .factors
                .iter()
                .zip(&other.factors)
                .all(|(a, b)| a.base.same(&b.base) && (a.exponent - b.exponent).abs() <= EXPONENT_TOL)
    }

    pub fn eval(&self, x: f64) -> f64 {
        self.eval_split(x, 0.0)
    }

    /// Value at `x = e + d`.
    pub fn eval_split(&self, e: f64, d: f64) -> f64 {
        let x = e + d;
        let mut v = self.coef;
        for f in &self.factors {
            v *= f.base.eval_split(e, d).powf(f.exponent);
        }
        if self.exp_linear != 0.0 || self.exp_quadratic != 0.0 {
            v *= (self.exp_linear * x + self.exp_quadratic * x * x).exp();
        }
        v
    }

    /// Jet of order `order` at `x = e + d`.
    pub fn jet_split(&self, e: f64, d: f64, order: usize) -> Jet {
        let x = e + d;
        let mut j = Jet::constant(self.coef, order);
        for f in &self.factors {
            let b = f.base.eval_split(e, d);
            let mut v = vec![0.0; order + 1];
            let mut falling = 1.0;
            for (k, slot) in v.iter_mut().enumerate() {
                *slot = falling * b.powf(f.exponent - k as f64);
                falling *= (f.exponent - k as f64) * f.base.sigma;
            }
            j = &j * &Jet(v);
        }
        if self.exp_linear != 0.0 || self.exp_quadratic != 0.0 {
            let mut q = vec![0.0; order + 1];
            q[0] = self.exp_linear * x + self.exp_quadratic * x * x;
            if order >= 1 {
                q[1] = self.exp_linear + 2.0 * self.exp_quadratic * x;
            }
            if order >= 2 {
                q[2] = 2.0 * self.exp_quadratic;
            }
            j = &j * &Jet(q).exp();
        }
        j
    }

    pub fn mul(&self, other: &Term) -> Term {
        let mut t = Term {
            coef: self.coef * other.coef,
            factors: self.factors.iter().chain(&other.factors).copied().collect(),
            exp_linear: self.exp_linear + other.exp_linear,
            exp_quadratic: self.exp_quadratic + other.exp_quadratic,
        };
        t.normalize();
        t
    }

    /// `t^a`; needs a positive coefficient unless `a` is an integer.
    pub fn powf(&self, a: f64) -> Term {
        let coef = if a.fract() == 0.0 { self.coef.powi(a as i32) } else { self.coef.powf(a) };
        let mut t = Term {
            coef,
            factors: self.factors.iter().map(|f| Factor { base: f.base, exponent: f.exponent * a }).collect(),
            exp_linear: self.exp_linear * a,
            exp_quadratic: self.exp_quadratic * a,
        };
        t.normalize();
        t
    }

    pub fn derivative(&self) -> TermSum {
        let mut out = Vec::new();
        for (i, f) in self.factors.iter().enumerate() {
            let mut t = self.clone();
            t.coef *= f.exponent * f.base.sigma;
            t.factors[i].exponent -= 1.0;
            t.normalize();
            out.push(t);
        }
        if self.exp_linear != 0.0 {
            let mut t = self.clone();
            t.coef *= self.exp_linear;
            out.push(t);
        }
        if self.exp_quadratic != 0.0 {
            let mut t = self.clone().times_factor(Linear::X, 1.0);
            t.coef *= 2.0 * self.exp_quadratic;
            out.push(t);
        }
        TermSum::from_terms(out)
    }
}

/// A finite sum of [`Term`]s; the empty sum is zero.
#[derive(Debug, Clone, PartialEq, Default, Serialize)]
pub struct TermSum {
    terms: Vec<Term>,
}

impl From<Term> for TermSum {
    fn from(t: Term) -> Self {
        TermSum::from_terms(vec![t])
    }
}

impl TermSum {
    pub fn zero() -> TermSum {
        TermSum::default()
    }

    pub fn constant(c: f64) -> TermSum {
        Term::constant(c).into()
    }

    /// Merges terms of equal shape; a merged coefficient that cancels to
    /// rounding level is dropped.
    pub fn from_terms(terms: Vec<Term>) -> TermSum {
        let mut out: Vec<(Term, f64)> = Vec::with_capacity(terms.len());
        for t in terms {
            if t.coef == 0.0 {
                continue;
            }
            match out.iter_mut().find(|(u, _)| u.same_shape(&t)) {
                Some((u, mag)) => {
                    u.coef += t.coef;
                    *mag += t.coef.abs();
                }
                None => {
                    let m = t.coef.abs();
                    out.push((t, m));
                }
            }
        }
        TermSum { terms: out.into_iter().filter(|(t, mag)| t.coef.abs() > 1e-13 * mag).map(|(t, _)| t).collect() }
    }

    pub fn terms(&self) -> &[Term] {
        &self.terms
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    /// The single term, when there is exactly one.
    pub fn as_single(&self) -> Option<&Term> {
        match self.terms.as_slice() {
            [t] => Some(t),
            _ => None,
        }
    }

    pub fn eval(&self, x: f64) -> f64 {
        self.terms.iter().map(|t| t.eval(x)).sum()
    }

    pub fn eval_split(&self, e: f64, d: f64) -> f64 {
        self.terms.iter().map(|t| t.eval_split(e, d)).sum()
    }

    pub fn jet(&self, x: f64, order: usize) -> Jet {
        self.jet_split(x, 0.0, order)
    }

    pub fn jet_split(&self, e: f64, d: f64, order: usize) -> Jet {
        self.terms.iter().fold(Jet::constant(0.0, order), |acc, t| &acc + &t.jet_split(e, d, order))
    }

    pub fn derivative(&self) -> TermSum {
        TermSum::from_terms(self.terms.iter().flat_map(|t| t.derivative().terms).collect())
    }

    pub fn nth_derivative(&self, k: usize) -> TermSum {
        (0..k).fold(self.clone(), |acc, _| acc.derivative())
    }

    pub fn add(&self, other: &TermSum) -> TermSum {
        TermSum::from_terms(self.terms.iter().chain(&other.terms).cloned().collect())
    }

    pub fn scale(&self, c: f64) -> TermSum {
        TermSum::from_terms(self.terms.iter().map(|t| Term { coef: t.coef * c, ..t.clone() }).collect())
    }

    pub fn sub(&self, other: &TermSum) -> TermSum {
        self.add(&other.scale(-1.0))
    }

    pub fn mul(&self, other: &TermSum) -> TermSum {
        let mut terms = Vec::with_capacity(self.terms.len() * other.terms.len());
        for a in &self.terms {
            for b in &other.terms {
                terms.push(a.mul(b));
            }
        }
        TermSum::from_terms(terms)
    }

    /// Power of a single-term sum.
    pub fn powf(&self, a: f64) -> Option<TermSum> {
        self.as_single().map(|t| t.powf(a).into())
    }
}

fn fmt_num(v: f64) -> String {
    if v.fract() == 0.0 && v.abs() < 1e15 {
        format!("{}", v as i64)
    } else {
        format!("{v}")
    }
}

impl fmt::Display for Linear {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let var = if self.sigma < 0.0 { "-x" } else { "+x" };
        if self.c == 0.0 {
            f.write_str(if self.sigma < 0.0 { "(-x)" } else { "x" })
        } else {
            write!(f, "({}{var})", fmt_num(self.c))
        }
    }
}

impl fmt::Display for Term {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut parts = Vec::new();
        if self.coef != 1.0 || (self.factors.is_empty() && self.exp_linear == 0.0 && self.exp_quadratic == 0.0) {
            parts.push(fmt_num(self.coef));
        }
        for fac in &self.factors {
            if fac.exponent == 1.0 {
                parts.push(fac.base.to_string());
            } else {
                parts.push(format!("{}^{}", fac.base, fmt_num(fac.exponent)));
            }
        }
        if self.exp_linear != 0.0 || self.exp_quadratic != 0.0 {
            let mut arg = Vec::new();
            if self.exp_linear != 0.0 {
                arg.push(format!("{}x", fmt_num(self.exp_linear)));
            }
            if self.exp_quadratic != 0.0 {
                arg.push(format!("{}x^2", fmt_num(self.exp_quadratic)));
            }
            parts.push(format!("exp({})", arg.join("+")));
        }
        f.write_str(&parts.join("·"))
    }
}

impl fmt::Display for TermSum {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return f.write_str("0");
        }
        let parts: Vec<String> = self.terms.iter().map(|t| t.to_string()).collect();
        f.write_str(&parts.join(" + "))
    }
}
