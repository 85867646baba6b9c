//! Formally symmetric quasi-differential expressions
//! `τu = w⁻¹ Σₖ (−1)^{n−k} (pₖ u^{(n−k)})^{(n−k)}` of order `2n`.

use std::fmt;
use std::sync::Arc;

use serde::Serialize;
use thiserror::Error;

use crate::jet::Jet;
use crate::symbolic::{Linear, Term, TermSum};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ExprError {
    #[error("parameter out of range for {name}: {detail}")]
    OutOfRange { name: String, detail: String },
    #[error("need {needed} derivatives, representation supplies {available}")]
    MissingDerivative { needed: usize, available: usize },
    #[error("operation needs symbolic coefficients")]
    NonSymbolic,
    #[error("invalid expression: {0}")]
    Invalid(String),
    #[error("composition is not formally symmetric (residual {0:.3e})")]
    NotSymmetric(f64),
    #[error(transparent)]
    Parse(#[from] crate::params::ParseError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum EndpointKind {
    Regular,
    Singular,
    Unknown,
}

/// An interval endpoint; `location` may be `±∞`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Endpoint {
    #[serde(serialize_with = "ser_location")]
    pub location: f64,
    pub kind: EndpointKind,
}

fn ser_location<S: serde::Serializer>(x: &f64, s: S) -> Result<S::Ok, S::Error> {
    if x.is_finite() {
        s.serialize_f64(*x)
    } else if *x > 0.0 {
        s.serialize_str("+inf")
    } else {
        s.serialize_str("-inf")
    }
}

impl Endpoint {
    pub fn regular(location: f64) -> Self {
        Endpoint { location, kind: EndpointKind::Regular }
    }

    pub fn singular(location: f64) -> Self {
        Endpoint { location, kind: EndpointKind::Singular }
    }

    pub fn is_finite(&self) -> bool {
        self.location.is_finite()
    }
}

type NumericFn = Arc<dyn Fn(f64) -> f64 + Send + Sync>;

#[derive(Clone)]
enum Repr {
    Symbolic(TermSum),
    Numeric { f: NumericFn, scale: f64, label: String },
}

/// A coefficient `pₖ` or weight `w`. Symbolic forms supply derivatives of
/// any order; numeric ones supply two, by central differences.
#[derive(Clone)]
pub struct CoefficientFunction {
    repr: Repr,
}

impl fmt::Debug for CoefficientFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "CoefficientFunction({self})")
    }
}

impl fmt::Display for CoefficientFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.repr {
            Repr::Symbolic(t) => write!(f, "{t}"),
            Repr::Numeric { label, .. } => f.write_str(label),
        }
    }
}

const SYMBOLIC_ORDER: usize = 64;

impl From<TermSum> for CoefficientFunction {
    fn from(t: TermSum) -> Self {
        CoefficientFunction { repr: Repr::Symbolic(t) }
    }
}

impl From<Term> for CoefficientFunction {
    fn from(t: Term) -> Self {
        TermSum::from(t).into()
    }
}

impl CoefficientFunction {
    pub fn constant(c: f64) -> Self {
        TermSum::constant(c).into()
    }

    pub fn zero() -> Self {
        TermSum::zero().into()
    }

    /// A coefficient known only through evaluation; `scale` sets the
    /// difference step `h = ε^{1/3}·scale`.
    pub fn numeric(label: impl Into<String>, scale: f64, f: impl Fn(f64) -> f64 + Send + Sync + 'static) -> Self {
        CoefficientFunction { repr: Repr::Numeric { f: Arc::new(f), scale, label: label.into() } }
    }

    pub fn symbolic_form(&self) -> Option<&TermSum> {
        match &self.repr {
            Repr::Symbolic(t) => Some(t),
            Repr::Numeric { .. } => None,
        }
    }

    pub fn derivative_order_available(&self) -> usize {
        match self.repr {
            Repr::Symbolic(_) => SYMBOLIC_ORDER,
            Repr::Numeric { .. } => 2,
        }
    }

    pub fn is_zero(&self) -> bool {
        self.symbolic_form().is_some_and(TermSum::is_zero)
    }

    pub fn is_one(&self) -> bool {
        self.symbolic_form()
            .and_then(TermSum::as_single)
            .is_some_and(|t| t.coef == 1.0 && t.factors.is_empty() && t.exp_linear == 0.0 && t.exp_quadratic == 0.0)
    }

    pub fn eval(&self, x: f64) -> f64 {
        self.eval_split(x, 0.0)
    }

    /// Value at `x = e + d`, keeping `d` separate for symbolic forms.
    pub fn eval_split(&self, e: f64, d: f64) -> f64 {
        match &self.repr {
            Repr::Symbolic(t) => t.eval_split(e, d),
            Repr::Numeric { f, .. } => f(e + d),
        }
    }

    pub fn jet(&self, x: f64, order: usize) -> Result<Jet, ExprError> {
        match &self.repr {
            Repr::Symbolic(t) => Ok(t.jet(x, order)),
            Repr::Numeric { f, scale, .. } => {
                if order > 2 {
                    return Err(ExprError::MissingDerivative { needed: order, available: 2 });
                }
                let h = f64::EPSILON.cbrt() * scale;
                let (fm, f0, fp) = (f(x - h), f(x), f(x + h));
                let all = [f0, (fp - fm) / (2.0 * h), (fp - 2.0 * f0 + fm) / (h * h)];
                Ok(Jet(all[..=order].to_vec()))
            }
        }
    }
}

type JetFn = Arc<dyn Fn(f64, usize) -> Jet + Send + Sync>;

/// A test function that reports its own derivatives.
#[derive(Clone)]
pub struct FunctionWithDerivatives {
    label: String,
    max_order: usize,
    f: JetFn,
}

impl fmt::Debug for FunctionWithDerivatives {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "FunctionWithDerivatives({}, order {})", self.label, self.max_order)
    }
}

impl FunctionWithDerivatives {
    /// `f(x, k)` must return the jet of order `k` at `x`.
    pub fn new(
        label: impl Into<String>,
        max_order: usize,
        f: impl Fn(f64, usize) -> Jet + Send + Sync + 'static,
    ) -> Self {
        FunctionWithDerivatives { label: label.into(), max_order, f: Arc::new(f) }
    }

    pub fn from_terms(label: impl Into<String>, t: TermSum) -> Self {
        FunctionWithDerivatives::new(label, SYMBOLIC_ORDER, move |x, k| t.jet(x, k))
    }

    /// `Σ cₖ xᵏ`
    pub fn polynomial(coeffs: &[f64]) -> Self {
        let c = coeffs.to_vec();
        let label = format!("poly{c:?}");
        FunctionWithDerivatives::new(label, SYMBOLIC_ORDER, move |x, order| {
            let mut cur = c.clone();
            let mut out = Vec::with_capacity(order + 1);
            for _ in 0..=order {
                out.push(cur.iter().rev().fold(0.0, |acc, &a| acc * x + a));
                cur = cur.iter().enumerate().skip(1).map(|(k, &a)| k as f64 * a).collect();
                if cur.is_empty() {
                    cur.push(0.0);
                }
            }
            Jet(out)
        })
    }

    pub fn monomial(k: u32) -> Self {
        let mut c = vec![0.0; k as usize + 1];
        c[k as usize] = 1.0;
        let mut f = FunctionWithDerivatives::polynomial(&c);
        f.label = format!("x^{k}");
        f
    }

    /// `(1−x)^β`
    pub fn power_of_one_minus_x(beta: f64) -> Self {
        let t: TermSum = Term::power(1.0, Linear::ONE_MINUS_X, beta).into();
        FunctionWithDerivatives::from_terms(format!("(1-x)^{beta}"), t)
    }

    /// `(1−x)^β · ln(1−x)^k`
    pub fn log_power_of_one_minus_x(beta: f64, k: u32) -> Self {
        FunctionWithDerivatives::new(format!("(1-x)^{beta}·ln(1-x)^{k}"), SYMBOLIC_ORDER, move |x, order| {
            let base = Jet::constant(1.0, order).sub_var(x);
            let mut j = base.powf(beta);
            let l = base.ln();
            for _ in 0..k {
                j = &j * &l;
            }
            j
        })
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn max_order(&self) -> usize {
        self.max_order
    }

    pub fn jet(&self, x: f64, order: usize) -> Result<Jet, ExprError> {
        if order > self.max_order {
            return Err(ExprError::MissingDerivative { needed: order, available: self.max_order });
        }
        Ok((self.f)(x, order))
    }

    pub fn value(&self, x: f64) -> f64 {
        (self.f)(x, 0).value()
    }

    /// `|f′(x) − (f(x+h) − f(x−h))/2h|` relative to the magnitudes involved.
    pub fn spot_check(&self, x: f64, h: f64) -> f64 {
        let d = (self.f)(x, 1).0[1];
        let fd = (self.value(x + h) - self.value(x - h)) / (2.0 * h);
        (d - fd).abs() / (d.abs() + self.value(x).abs() / h.max(1e-300) * h * h).max(1e-300)
    }
}

impl Jet {
    /// `c − x` from the constant jet `c`.
    fn sub_var(&self, x: f64) -> Jet {
        let mut v = self.0.clone();
        v[0] -= x;
        if v.len() > 1 {
            v[1] -= 1.0;
        }
        Jet(v)
    }
}

/// Order-`2n` expression with coefficients `p₀…pₙ` and weight `w` on `(a, b)`.
#[derive(Debug, Clone)]
pub struct QuasiDifferentialExpression {
    name: String,
    coefficients: Vec<CoefficientFunction>,
    weight: CoefficientFunction,
    a: Endpoint,
    b: Endpoint,
}

impl QuasiDifferentialExpression {
    pub fn new(
        name: impl Into<String>,
        coefficients: Vec<CoefficientFunction>,
        weight: CoefficientFunction,
        a: Endpoint,
        b: Endpoint,
    ) -> Result<Self, ExprError> {
        if coefficients.len() < 2 {
            return Err(ExprError::Invalid("need at least p0 and p1".into()));
        }
        if !(a.location < b.location) {
            return Err(ExprError::Invalid("interval must have a < b".into()));
        }
        let e = QuasiDifferentialExpression { name: name.into(), coefficients, weight, a, b };
        for x in e.interior_samples(9) {
            let w = e.weight.eval(x);
            let p0 = e.coefficients[0].eval(x);
            if !(w > 0.0) || !w.is_finite() || p0 == 0.0 || !p0.is_finite() {
                return Err(ExprError::Invalid(format!("weight or p0 degenerate at {x}")));
            }
        }
        Ok(e)
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    /// `n`, half the order.
    pub fn n(&self) -> usize {
        self.coefficients.len() - 1
    }

    pub fn order(&self) -> usize {
        2 * self.n()
    }

    pub fn coefficients(&self) -> &[CoefficientFunction] {
        &self.coefficients
    }

    pub fn coefficient(&self, k: usize) -> &CoefficientFunction {
        &self.coefficients[k]
    }

    pub fn weight(&self) -> &CoefficientFunction {
        &self.weight
    }

    pub fn endpoints(&self) -> (Endpoint, Endpoint) {
        (self.a, self.b)
    }

    pub fn with_endpoints(mut self, a: Endpoint, b: Endpoint) -> Self {
        self.a = a;
        self.b = b;
        self
    }

    pub fn with_name(mut self, name: impl Into<String>) -> Self {
        self.name = name.into();
        self
    }

    /// `count` points spread over the interior, away from both endpoints.
    pub fn interior_samples(&self, count: usize) -> Vec<f64> {
        let (a, b) = (self.a.location, self.b.location);
        (0..count)
            .map(|i| {
                let s = (i as f64 + 0.5) / count as f64;
                match (a.is_finite(), b.is_finite()) {
                    (true, true) => a + (b - a) * (0.05 + 0.9 * s),
                    (true, false) => a + 0.1 + 4.9 * s,
                    (false, true) => b - 0.1 - 4.9 * (1.0 - s),
                    (false, false) => -3.0 + 6.0 * s,
                }
            })
            .collect()
    }

    /// Formal part `Σₖ (−1)^{n−k} (pₖ u^{(n−k)})^{(n−k)}` as a jet of order
    /// `u.order() − 2n`.
    pub fn formal_jet(&self, u: &Jet, x: f64) -> Result<Jet, ExprError> {
        let n = self.n();
        let big_n = u.order();
        if big_n < 2 * n {
            return Err(ExprError::MissingDerivative { needed: 2 * n, available: big_n });
        }
        let out_order = big_n - 2 * n;
        let mut acc = Jet::constant(0.0, out_order);
        for (k, p) in self.coefficients.iter().enumerate() {
            let m = n - k;
            let pj = p.jet(x, big_n - m)?;
            let prod = &pj * &u.shift(m);
            let term = prod.shift(m).truncate(out_order);
            acc = if m.is_multiple_of(2) { &acc + &term } else { &acc - &term };
        }
        Ok(acc)
    }

    /// The summands `(−1)^{n−k} (pₖ u^{(n−k)})^{(n−k)}` at `x`, unweighted.
    pub fn formal_terms(&self, u: &Jet, x: f64) -> Result<Vec<f64>, ExprError> {
        let n = self.n();
        if u.order() < 2 * n {
            return Err(ExprError::MissingDerivative { needed: 2 * n, available: u.order() });
        }
        self.coefficients
            .iter()
            .enumerate()
            .map(|(k, p)| {
                let m = n - k;
                let pj = p.jet(x, m)?;
                let v = (&pj * &u.shift(m).truncate(m)).0[m];
                Ok(if m.is_multiple_of(2) { v } else { -v })
            })
            .collect()
    }

    /// Jet of `τu`, weight-divided.
    pub fn apply_jet(&self, u: &Jet, x: f64) -> Result<Jet, ExprError> {
        let formal = self.formal_jet(u, x)?;
        if self.weight.is_one() {
            return Ok(formal);
        }
        let w = self.weight.jet(x, formal.order())?;
        Ok(&formal * &w.recip())
    }
}

/// The ladder `u^{[0]}, …, u^{[2n]}` at `x`; `u^{[2n]}` is the formal
/// (not weight-divided) value of `τu`.
pub fn quasi_derivatives(
    expr: &QuasiDifferentialExpression,
    u: &FunctionWithDerivatives,
    x: f64,
) -> Result<Vec<f64>, ExprError> {
    let n = expr.n();
    let uj = u.jet(x, 2 * n)?;
    let mut ladder: Vec<Jet> = (0..n).map(|k| uj.shift(k)).collect();
    let p0 = expr.coefficient(0).jet(x, n)?;
    ladder.push(&p0 * &uj.shift(n));
    for k in 1..=n {
        let prev = ladder[n + k - 1].derivative();
        let pk = expr.coefficient(k).jet(x, n - k)?;
        let lower = ladder[n - k].truncate(n - k);
        let next = &(&pk * &lower) - &prev.truncate(n - k);
        ladder.push(next);
    }
    Ok(ladder.iter().map(Jet::value).collect())
}

/// `(τu)(x)` at each sample via the quasi-derivative ladder.
pub fn apply(
    expr: &QuasiDifferentialExpression,
    u: &FunctionWithDerivatives,
    xs: &[f64],
) -> Result<Vec<f64>, ExprError> {
    xs.iter()
        .map(|&x| {
            let top = quasi_derivatives(expr, u, x)?[expr.order()];
            Ok(top / expr.weight().eval(x))
        })
        .collect()
}

/// `(τu)(x)` at each sample via the expanded divergence-form sum.
pub fn apply_expanded(
    expr: &QuasiDifferentialExpression,
    u: &FunctionWithDerivatives,
    xs: &[f64],
) -> Result<Vec<f64>, ExprError> {
    xs.iter().map(|&x| Ok(expr.apply_jet(&u.jet(x, expr.order())?, x)?.value())).collect()
}

/// `(τ^m u)(x)` by `m` successive applications.
pub fn apply_repeated(
    expr: &QuasiDifferentialExpression,
    u: &FunctionWithDerivatives,
    m: usize,
    xs: &[f64],
) -> Result<Vec<f64>, ExprError> {
    xs.iter()
        .map(|&x| {
            let mut j = u.jet(x, m * expr.order())?;
            for _ in 0..m {
                j = expr.apply_jet(&j, x)?;
            }
            Ok(j.value())
        })
        .collect()
}

fn binomial(n: usize, k: usize) -> f64 {
    (0..k).fold(1.0, |acc, i| acc * (n - i) as f64 / (i + 1) as f64)
}

/// `Σₖ aₖ Dᵏ` with symbolic coefficients.
#[derive(Debug, Clone)]
struct RawOperator(Vec<TermSum>);

impl RawOperator {
    fn zero(order: usize) -> Self {
        RawOperator(vec![TermSum::zero(); order + 1])
    }

    fn add_at(&mut self, k: usize, t: &TermSum) {
        if self.0.len() <= k {
            self.0.resize(k + 1, TermSum::zero());
        }
        self.0[k] = self.0[k].add(t);
    }

    /// `(−1)^m Dᵐ p Dᵐ = (−1)^m Σᵢ C(m,i) p^{(i)} D^{2m−i}`
    fn divergence_term(p: &TermSum, m: usize) -> Self {
        let mut op = RawOperator::zero(2 * m);
        let sign = if m.is_multiple_of(2) { 1.0 } else { -1.0 };
        let mut dp = p.clone();
        for i in 0..=m {
            op.add_at(2 * m - i, &dp.scale(sign * binomial(m, i)));
            dp = dp.derivative();
        }
        op
    }

    fn from_lagrangian(ps: &[TermSum]) -> Self {
        let n = ps.len() - 1;
        let mut op = RawOperator::zero(2 * n);
        for (k, p) in ps.iter().enumerate() {
            for (i, t) in RawOperator::divergence_term(p, n - k).0.iter().enumerate() {
                op.add_at(i, t);
            }
        }
        op
    }

    /// `A ∘ B`
    fn compose(&self, other: &RawOperator) -> Self {
        let mut out = RawOperator::zero(self.0.len() + other.0.len());
        for (i, a) in self.0.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in other.0.iter().enumerate() {
                let mut db = b.clone();
                for l in 0..=i {
                    if db.is_zero() {
                        break;
                    }
                    out.add_at(i - l + j, &a.mul(&db).scale(binomial(i, l)));
                    db = db.derivative();
                }
            }
        }
        out
    }

    fn left_multiply(&self, g: &TermSum) -> Self {
        RawOperator(self.0.iter().map(|a| g.mul(a)).collect())
    }

    /// Peels `(−1)^m Dᵐ p Dᵐ` off from the top; returns `p₀…pₙ` and what is
    /// left over, which vanishes for a formally symmetric operator.
    fn to_lagrangian(&self, n: usize) -> (Vec<TermSum>, RawOperator) {
        let mut rest = self.clone();
        rest.0.resize(2 * n + 1, TermSum::zero());
        let mut ps = Vec::with_capacity(n + 1);
        for m in (0..=n).rev() {
            let sign = if m % 2 == 0 { 1.0 } else { -1.0 };
            let p = rest.0[2 * m].scale(sign);
            let sub = RawOperator::divergence_term(&p, m);
            for (i, t) in sub.0.iter().enumerate() {
                rest.0[i] = rest.0[i].sub(t);
            }
            ps.push(p);
        }
        (ps, rest)
    }
}

fn symbolic_coefficients(expr: &QuasiDifferentialExpression) -> Result<Vec<TermSum>, ExprError> {
    expr.coefficients().iter().map(|c| c.symbolic_form().cloned().ok_or(ExprError::NonSymbolic)).collect()
}

/// Symbolic `τ²` in Lagrangian symmetric form. For a weighted `τ` the formal
/// part of the square is `L w⁻¹ L`, `L` the formal part of `τ`.
pub fn compose_square(expr: &QuasiDifferentialExpression) -> Result<QuasiDifferentialExpression, ExprError> {
    let ps = symbolic_coefficients(expr)?;
    let w = expr.weight().symbolic_form().ok_or(ExprError::NonSymbolic)?;
    let l = RawOperator::from_lagrangian(&ps);
    let right = if expr.weight().is_one() {
        l.clone()
    } else {
        let winv = w.powf(-1.0).ok_or(ExprError::NonSymbolic)?;
        l.left_multiply(&winv)
    };
    let square = l.compose(&right);
    let n2 = 2 * expr.n();
    let (qs, rest) = square.to_lagrangian(n2);

    let mut worst = 0.0f64;
    for x in expr.interior_samples(7) {
        let scale: f64 = square.0.iter().map(|a| a.eval(x).abs()).sum::<f64>().max(1e-300);
        let resid: f64 = rest.0.iter().map(|a| a.eval(x).abs()).sum();
        worst = worst.max(resid / scale);
    }
    if worst > 1e-9 {
        return Err(ExprError::NotSymmetric(worst));
    }
    let (a, b) = expr.endpoints();
    QuasiDifferentialExpression::new(
        format!("({})^2", expr.name()),
        qs.into_iter().map(CoefficientFunction::from).collect(),
        expr.weight().clone(),
        a,
        b,
    )
}

/// Parses a named test function: `x^k`, `(1-x)^b`, `poly(a0,a1,…)`,
/// `monomial(k)`, `one_minus_x_pow(b)` or `log_one_minus_x(b,k)`.
pub fn parse_test_function(s: &str) -> Result<FunctionWithDerivatives, ExprError> {
    let t: String = s.chars().filter(|c| !c.is_whitespace()).collect();
    let integer = |p: &crate::params::Param| -> Result<u32, ExprError> {
        match &p.exact {
            Some(q) if q.is_integer() => q
                .to_integer()
                .try_into()
                .ok()
                .filter(|k| *k <= 64)
                .ok_or_else(|| ExprError::Invalid(format!("exponent {p} out of range 0..=64"))),
            _ => Err(ExprError::Invalid(format!("expected an integer, got {p}"))),
        }
    };
    if let Some(k) = t.strip_prefix("x^") {
        return Ok(FunctionWithDerivatives::monomial(integer(&k.parse()?)?));
    }
    if let Some(b) = t.strip_prefix("(1-x)^") {
        return Ok(FunctionWithDerivatives::power_of_one_minus_x(b.parse::<crate::params::Param>()?.value));
    }
    let (name, p) = crate::params::parse_call(&t)?;
    match (name.as_str(), p.as_slice()) {
        ("poly", c) if !c.is_empty() => {
            Ok(FunctionWithDerivatives::polynomial(&c.iter().map(|a| a.value).collect::<Vec<_>>()))
        }
        ("monomial", [k]) => Ok(FunctionWithDerivatives::monomial(integer(k)?)),
        ("one_minus_x_pow", [b]) => Ok(FunctionWithDerivatives::power_of_one_minus_x(b.value)),
        ("log_one_minus_x", [b, k]) => Ok(FunctionWithDerivatives::log_power_of_one_minus_x(b.value, integer(k)?)),
        _ => Err(ExprError::Invalid(format!("unknown test function `{s}`"))),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn test_function_names() {
        let xs = [0.25, 0.5];
        let v = |name: &str| -> Vec<f64> {
            let f = parse_test_function(name).unwrap();
            xs.iter().map(|&x| f.jet(x, 1).unwrap().0[0]).collect()
        };
        assert_eq!(v("x^2"), vec![0.0625, 0.25]);
        assert_eq!(v("monomial(2)"), v("x^2"));
        assert_eq!(v("poly(1, 0, 2)"), vec![1.125, 1.5]);
        assert!((v("(1-x)^1/2")[0] - 0.75f64.sqrt()).abs() < 1e-15);
        assert_eq!(v("(1-x)^3"), v("one_minus_x_pow(3)"));
        for bad in ["", "x^", "x^-1", "x^1/2", "poly()", "sin(x)", "(1-x)^", "monomial(1000)"] {
            assert!(parse_test_function(bad).is_err(), "{bad}");
        }
    }

    fn minus_d2() -> QuasiDifferentialExpression {
        QuasiDifferentialExpression::new(
            "-d2",
            vec![CoefficientFunction::constant(1.0), CoefficientFunction::zero()],
            CoefficientFunction::constant(1.0),
            Endpoint::singular(0.0),
            Endpoint::singular(f64::INFINITY),
        )
        .unwrap()
    }

    fn legendre() -> QuasiDifferentialExpression {
        let p0 = Term::constant(1.0).times_factor(Linear::ONE_MINUS_X, 1.0).times_factor(Linear::ONE_PLUS_X, 1.0);
        QuasiDifferentialExpression::new(
            "legendre",
            vec![p0.into(), CoefficientFunction::zero()],
            CoefficientFunction::constant(1.0),
            Endpoint::singular(-1.0),
            Endpoint::singular(1.0),
        )
        .unwrap()
    }

    #[test]
    fn legendre_ladder() {
        let e = legendre();
        let one = FunctionWithDerivatives::polynomial(&[1.0]);
        let l = quasi_derivatives(&e, &one, 0.4).unwrap();
        assert_eq!(l, vec![1.0, 0.0, 0.0]);
        let x = FunctionWithDerivatives::monomial(1);
        let v = apply(&e, &x, &[0.3]).unwrap();
        assert!((v[0] - 0.6).abs() < 1e-15);
        let v = apply_expanded(&e, &x, &[0.3]).unwrap();
        assert!((v[0] - 0.6).abs() < 1e-15);
    }

    #[test]
    fn square_of_minus_d2() {
        let s = compose_square(&minus_d2()).unwrap();
        assert_eq!(s.order(), 4);
        assert!(s.coefficient(0).is_one());
        assert!(s.coefficient(1).is_zero());
        assert!(s.coefficient(2).is_zero());
    }

    #[test]
    fn square_matches_repeated_application() {
        let e = legendre();
        let s = compose_square(&e).unwrap();
        let u = FunctionWithDerivatives::polynomial(&[0.3, -1.0, 0.5, 2.0, -0.7, 0.2]);
        let xs = e.interior_samples(11);
        let a = apply(&s, &u, &xs).unwrap();
        let b = apply_repeated(&e, &u, 2, &xs).unwrap();
        for (p, q) in a.iter().zip(&b) {
            assert!((p - q).abs() <= 1e-10 * q.abs().max(1.0), "{p} {q}");
        }
    }

    #[test]
    fn numeric_coefficients_are_limited() {
        let c = CoefficientFunction::numeric("sin", 1.0, f64::sin);
        assert_eq!(c.derivative_order_available(), 2);
        let j = c.jet(0.3, 2).unwrap();
        assert!((j.0[1] - 0.3f64.cos()).abs() < 1e-9);
        assert!((j.0[2] + 0.3f64.sin()).abs() < 1e-4);
        assert!(matches!(c.jet(0.3, 3), Err(ExprError::MissingDerivative { .. })));
        let e = QuasiDifferentialExpression::new(
            "numeric",
            vec![CoefficientFunction::constant(1.0), c],
            CoefficientFunction::constant(1.0),
            Endpoint::regular(0.0),
            Endpoint::regular(1.0),
        )
        .unwrap();
        assert!(matches!(compose_square(&e), Err(ExprError::NonSymbolic)));
    }

    #[test]
    fn function_derivatives_are_consistent() {
        for f in [
            FunctionWithDerivatives::power_of_one_minus_x(2.5),
            FunctionWithDerivatives::log_power_of_one_minus_x(1.5, 1),
            FunctionWithDerivatives::monomial(4),
        ] {
            for x in [0.1, 0.5, 0.8] {
                assert!(f.spot_check(x, 1e-4) < 1e-6, "{}", f.label());
            }
        }
        let f = FunctionWithDerivatives::new("short", 1, Jet::variable);
        assert!(f.jet(0.0, 2).is_err());
    }

    #[test]
    fn invalid_expressions() {
        let c = || CoefficientFunction::constant(1.0);
        assert!(QuasiDifferentialExpression::new("x", vec![c()], c(), Endpoint::regular(0.0), Endpoint::regular(1.0))
            .is_err());
        assert!(QuasiDifferentialExpression::new(
            "x",
            vec![c(), c()],
            c(),
            Endpoint::regular(1.0),
            Endpoint::regular(0.0)
        )
        .is_err());
        assert!(QuasiDifferentialExpression::new(
            "x",
            vec![c(), c()],
            CoefficientFunction::constant(-1.0),
            Endpoint::regular(0.0),
            Endpoint::regular(1.0)
        )
        .is_err());
    }
}
