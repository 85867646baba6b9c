//! The concrete expressions: Bessel-type, Legendre, Laguerre, Hermite,
//! Jacobi and the Chaudhuri–Everitt expression, plus Stirling-type power
//! expansions and Bessel kernel exponents.

use std::fmt;
use std::str::FromStr;

use num_rational::BigRational;
use num_traits::{One, Zero};
use serde::Serialize;

use crate::expr::{CoefficientFunction, Endpoint, ExprError, FunctionWithDerivatives, QuasiDifferentialExpression};
use crate::params::{parse_call, Param};
use crate::pde::ChannelSpec;
use crate::stirling::{self, StirlingError};
use crate::symbolic::{Linear, Term, TermSum};

#[derive(Debug, Clone, PartialEq)]
pub enum Classical {
    BesselAlpha(Param),
    Bessel4Alpha(Param),
    BesselGamma(Param),
    BesselChannel(ChannelSpec),
    Legendre,
    Laguerre(Param),
    Hermite,
    Jacobi(Param, Param),
    ChaudhuriEveritt,
}

impl fmt::Display for Classical {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Classical::BesselAlpha(a) => write!(f, "bessel_alpha({a})"),
            Classical::Bessel4Alpha(a) => write!(f, "bessel4_alpha({a})"),
            Classical::BesselGamma(g) => write!(f, "bessel_gamma({g})"),
            Classical::BesselChannel(s) => write!(f, "bessel_channel({},{},{},{})", s.n, s.l, s.big_l, s.alpha),
            Classical::Legendre => f.write_str("legendre"),
            Classical::Laguerre(a) => write!(f, "laguerre({a})"),
            Classical::Hermite => f.write_str("hermite"),
            Classical::Jacobi(a, b) => write!(f, "jacobi({a},{b})"),
            Classical::ChaudhuriEveritt => f.write_str("chaudhuri_everitt"),
        }
    }
}

fn arity(name: &str, params: &[Param], n: usize) -> Result<(), ExprError> {
    if params.len() == n {
        Ok(())
    } else {
        Err(ExprError::Invalid(format!("{name} takes {n} parameter(s), got {}", params.len())))
    }
}

fn nonnegative_integer(p: &Param, what: &str) -> Result<u32, ExprError> {
    match &p.exact {
        Some(q) if q.is_integer() && *q >= BigRational::zero() => {
            q.to_integer().try_into().map_err(|_| ExprError::Invalid(format!("{what} too large")))
        }
        _ => Err(ExprError::Invalid(format!("{what} must be a nonnegative integer, got {p}"))),
    }
}

impl FromStr for Classical {
    type Err = ExprError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let (name, p) = parse_call(s)?;
        let c = match name.as_str() {
            "bessel_alpha" | "bessel2" => {
                arity(&name, &p, 1)?;
                Classical::BesselAlpha(p[0].clone())
            }
            "bessel4_alpha" | "bessel4" => {
                arity(&name, &p, 1)?;
                Classical::Bessel4Alpha(p[0].clone())
            }
            "bessel_gamma" => {
                arity(&name, &p, 1)?;
                Classical::BesselGamma(p[0].clone())
            }
            "bessel_channel" => {
                arity(&name, &p, 4)?;
                Classical::BesselChannel(ChannelSpec::new(
                    nonnegative_integer(&p[0], "n")?,
                    nonnegative_integer(&p[1], "l")?,
                    nonnegative_integer(&p[2], "L")?,
                    p[3].clone(),
                )?)
            }
            "legendre" => {
                arity(&name, &p, 0)?;
                Classical::Legendre
            }
            "laguerre" => {
                arity(&name, &p, 1)?;
                Classical::Laguerre(p[0].clone())
            }
            "hermite" => {
                arity(&name, &p, 0)?;
                Classical::Hermite
            }
            "jacobi" => {
                arity(&name, &p, 2)?;
                Classical::Jacobi(p[0].clone(), p[1].clone())
            }
            "chaudhuri_everitt" | "ce" => {
                arity(&name, &p, 0)?;
                Classical::ChaudhuriEveritt
            }
            _ => return Err(ExprError::Invalid(format!("unknown expression `{name}`"))),
        };
        Ok(c)
    }
}

fn out_of_range(name: &str, detail: impl Into<String>) -> ExprError {
    ExprError::OutOfRange { name: name.into(), detail: detail.into() }
}

/// `p ≥ bound`, decided exactly when `p` is rational.
fn at_least(p: &Param, bound: i64) -> bool {
    match &p.exact {
        Some(q) => *q >= BigRational::from_integer(bound.into()),
        None => p.value >= bound as f64,
    }
}

/// `p > bound`
fn above(p: &Param, bound: i64) -> bool {
    match &p.exact {
        Some(q) => *q > BigRational::from_integer(bound.into()),
        None => p.value > bound as f64,
    }
}

fn one() -> CoefficientFunction {
    CoefficientFunction::constant(1.0)
}

fn inverse_square(c: f64, base: Linear) -> CoefficientFunction {
    Term::power(c, base, -2.0).into()
}

/// The `τ_{2,α}` potential constant `α² − 1/4`.
pub fn bessel_potential_constant(alpha: f64) -> f64 {
    alpha * alpha - 0.25
}

/// Closed forms of the coefficients of `τ_{2,α}²`: `2α² − 1/2` in front of
/// `(1−x)^{−2}` and `α⁴ − (13/2)α² + (5/4)²` in front of `(1−x)^{−4}`.
pub fn bessel4_constants(alpha: f64) -> (f64, f64) {
    let a2 = alpha * alpha;
    (2.0 * a2 - 0.5, a2 * a2 - 6.5 * a2 + 1.5625)
}

pub fn build_classical(c: &Classical) -> Result<QuasiDifferentialExpression, ExprError> {
    let name = c.to_string();
    match c {
        Classical::BesselAlpha(a) => {
            if !at_least(a, 1) {
                return Err(out_of_range(&name, "alpha must lie in [1, inf)"));
            }
            QuasiDifferentialExpression::new(
                name,
                vec![one(), inverse_square(bessel_potential_constant(a.value), Linear::ONE_MINUS_X)],
                one(),
                Endpoint::regular(0.0),
                Endpoint::singular(1.0),
            )
        }
        Classical::Bessel4Alpha(a) => {
            if !at_least(a, 1) {
                return Err(out_of_range(&name, "alpha must lie in [1, inf)"));
            }
            let (c1, c2) = bessel4_constants(a.value);
            QuasiDifferentialExpression::new(
                name,
                vec![one(), inverse_square(c1, Linear::ONE_MINUS_X), Term::power(c2, Linear::ONE_MINUS_X, -4.0).into()],
                one(),
                Endpoint::regular(0.0),
                Endpoint::singular(1.0),
            )
        }
        Classical::BesselGamma(g) => {
            if !at_least(g, 0) {
                return Err(out_of_range(&name, "gamma must lie in [0, inf)"));
            }
            QuasiDifferentialExpression::new(
                name,
                vec![one(), inverse_square(g.value * g.value - 0.25, Linear::X)],
                one(),
                Endpoint::singular(0.0),
                Endpoint::singular(f64::INFINITY),
            )
        }
        Classical::BesselChannel(spec) => QuasiDifferentialExpression::new(
            name,
            vec![one(), inverse_square(spec.coefficient() as f64, Linear::X)],
            one(),
            Endpoint::singular(0.0),
            Endpoint::singular(f64::INFINITY),
        ),
        Classical::Legendre => QuasiDifferentialExpression::new(
            name,
            vec![
                Term::power(1.0, Linear::ONE_MINUS_X, 1.0).times_factor(Linear::ONE_PLUS_X, 1.0).into(),
                CoefficientFunction::zero(),
            ],
            one(),
            Endpoint::singular(-1.0),
            Endpoint::singular(1.0),
        ),
        Classical::Laguerre(a) => {
            if !above(a, -1) {
                return Err(out_of_range(&name, "alpha must lie in (-1, inf)"));
            }
            QuasiDifferentialExpression::new(
                name,
                vec![
                    Term::power(1.0, Linear::X, a.value + 1.0).times_exp(-1.0, 0.0).into(),
                    CoefficientFunction::zero(),
                ],
                Term::power(1.0, Linear::X, a.value).times_exp(-1.0, 0.0).into(),
                Endpoint::singular(0.0),
                Endpoint::singular(f64::INFINITY),
            )
        }
        Classical::Hermite => {
            let gauss: CoefficientFunction = Term::constant(1.0).times_exp(0.0, -1.0).into();
            QuasiDifferentialExpression::new(
                name,
                vec![gauss.clone(), CoefficientFunction::zero()],
                gauss,
                Endpoint::singular(f64::NEG_INFINITY),
                Endpoint::singular(f64::INFINITY),
            )
        }
        Classical::Jacobi(a, b) => {
            if !above(a, -1) || !above(b, -1) {
                return Err(out_of_range(&name, "alpha and beta must lie in (-1, inf)"));
            }
            let kind = |p: &Param, at: f64| {
                if above(p, -1) && !at_least(p, 0) {
                    Endpoint::regular(at)
                } else {
                    Endpoint::singular(at)
                }
            };
            QuasiDifferentialExpression::new(
                name,
                vec![jacobi_weight(a.value + 1.0, b.value + 1.0).into(), CoefficientFunction::zero()],
                jacobi_weight(a.value, b.value).into(),
                kind(b, -1.0),
                kind(a, 1.0),
            )
        }
        Classical::ChaudhuriEveritt => QuasiDifferentialExpression::new(
            name,
            vec![
                Term::power(1.0 / 6.0, Linear::ONE_PLUS_X, 4.0).into(),
                Term::power(1.0, Linear::ONE_PLUS_X, 2.0).into(),
            ],
            one(),
            Endpoint::regular(0.0),
            Endpoint::singular(f64::INFINITY),
        ),
    }
}

/// `(1−x)^a (1+x)^b`
fn jacobi_weight(a: f64, b: f64) -> Term {
    Term::power(1.0, Linear::ONE_MINUS_X, a).times_factor(Linear::ONE_PLUS_X, b)
}

#[derive(Debug, Clone, PartialEq)]
pub enum ExpansionFamily {
    Legendre,
    Laguerre(Param),
    Hermite,
    Jacobi(Param, Param),
}

impl fmt::Display for ExpansionFamily {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ExpansionFamily::Legendre => f.write_str("legendre"),
            ExpansionFamily::Laguerre(a) => write!(f, "laguerre({a})"),
            ExpansionFamily::Hermite => f.write_str("hermite"),
            ExpansionFamily::Jacobi(a, b) => write!(f, "jacobi({a},{b})"),
        }
    }
}

impl FromStr for ExpansionFamily {
    type Err = ExprError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.parse::<Classical>()? {
            Classical::Legendre => Ok(ExpansionFamily::Legendre),
            Classical::Laguerre(a) => Ok(ExpansionFamily::Laguerre(a)),
            Classical::Hermite => Ok(ExpansionFamily::Hermite),
            Classical::Jacobi(a, b) => Ok(ExpansionFamily::Jacobi(a, b)),
            other => Err(ExprError::Invalid(format!("no power expansion for {other}"))),
        }
    }
}

impl ExpansionFamily {
    pub fn base(&self) -> Classical {
        match self {
            ExpansionFamily::Legendre => Classical::Legendre,
            ExpansionFamily::Laguerre(a) => Classical::Laguerre(a.clone()),
            ExpansionFamily::Hermite => Classical::Hermite,
            ExpansionFamily::Jacobi(a, b) => Classical::Jacobi(a.clone(), b.clone()),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "kind", content = "value", rename_all = "lowercase")]
pub enum Coefficient {
    #[serde(serialize_with = "ser_rational")]
    Exact(BigRational),
    Approximate(f64),
}

fn ser_rational<S: serde::Serializer>(q: &BigRational, s: S) -> Result<S::Ok, S::Error> {
    s.serialize_str(&q.to_string())
}

impl Coefficient {
    pub fn value(&self) -> f64 {
        match self {
            Coefficient::Exact(q) => stirling::to_f64(q),
            Coefficient::Approximate(v) => *v,
        }
    }
}

impl fmt::Display for Coefficient {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Coefficient::Exact(q) => write!(f, "{q}"),
            Coefficient::Approximate(v) => write!(f, "~{v}"),
        }
    }
}

/// One summand `(−1)ʲ cⱼ Dʲ Wⱼ Dʲ`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ExpansionTerm {
    pub j: u32,
    pub coefficient: Coefficient,
    #[serde(serialize_with = "ser_display")]
    pub weight_power: TermSum,
}

fn ser_display<T: fmt::Display, S: serde::Serializer>(t: &T, s: S) -> Result<S::Ok, S::Error> {
    s.serialize_str(&t.to_string())
}

/// `τ^m = w⁻¹ Σⱼ (−1)ʲ cⱼ Dʲ Wⱼ Dʲ` in Lagrangian symmetric form.
#[derive(Debug, Clone, Serialize)]
pub struct PowerExpansion {
    #[serde(serialize_with = "ser_display")]
    pub family: ExpansionFamily,
    pub m: u32,
    pub terms: Vec<ExpansionTerm>,
    #[serde(serialize_with = "ser_display")]
    pub weight: TermSum,
}

impl From<StirlingError> for ExprError {
    fn from(e: StirlingError) -> Self {
        ExprError::Invalid(e.to_string())
    }
}

pub fn power_expansion(family: &ExpansionFamily, m: u32) -> Result<PowerExpansion, ExprError> {
    if m == 0 {
        return Err(ExprError::Invalid("power must be at least 1".into()));
    }
    let base = build_classical(&family.base())?;
    let weight = base.weight().symbolic_form().cloned().ok_or(ExprError::NonSymbolic)?;
    let mut terms = Vec::with_capacity(m as usize);
    for j in 1..=m {
        let jf = j as f64;
        let (coefficient, weight_power) = match family {
            ExpansionFamily::Legendre => {
                (Coefficient::Exact(stirling::legendre_stirling(m, j)), jacobi_weight(jf, jf).into())
            }
            ExpansionFamily::Laguerre(a) => (
                Coefficient::Exact(stirling::stirling2(m, j)),
                Term::power(1.0, Linear::X, a.value + jf).times_exp(-1.0, 0.0).into(),
            ),
            ExpansionFamily::Hermite => {
                let two = BigRational::from_integer(2.into());
                let scale = (0..m - j).fold(BigRational::one(), |acc, _| acc * &two);
                (Coefficient::Exact(stirling::stirling2(m, j) * scale), Term::constant(1.0).times_exp(0.0, -1.0).into())
            }
            ExpansionFamily::Jacobi(a, b) => {
                let c = match (&a.exact, &b.exact) {
                    (Some(qa), Some(qb)) => Coefficient::Exact(stirling::jacobi_stirling(m, j, qa, qb)?),
                    _ => Coefficient::Approximate(stirling::jacobi_stirling_approx(m, j, a.value, b.value)?.value),
                };
                (c, jacobi_weight(a.value + jf, b.value + jf).into())
            }
        };
        terms.push(ExpansionTerm { j, coefficient, weight_power });
    }
    Ok(PowerExpansion { family: family.clone(), m, terms, weight })
}

impl PowerExpansion {
    /// The expansion as an order-`2m` expression: `p_{m−j} = cⱼ Wⱼ`.
    pub fn to_expression(&self) -> Result<QuasiDifferentialExpression, ExprError> {
        let base = build_classical(&self.family.base())?;
        let m = self.m as usize;
        let mut ps = vec![CoefficientFunction::zero(); m + 1];
        for t in &self.terms {
            ps[m - t.j as usize] = t.weight_power.scale(t.coefficient.value()).into();
        }
        let (a, b) = base.endpoints();
        QuasiDifferentialExpression::new(format!("{}^{}", base.name(), self.m), ps, base.weight().clone(), a, b)
    }

    /// `(τ^m u)(x)` summed term by term in divergence form.
    pub fn apply(&self, u: &FunctionWithDerivatives, xs: &[f64]) -> Result<Vec<f64>, ExprError> {
        let m = self.m as usize;
        xs.iter()
            .map(|&x| {
                let uj = u.jet(x, 2 * m)?;
                let mut total = 0.0;
                for t in &self.terms {
                    let j = t.j as usize;
                    let w = t.weight_power.jet(x, j);
                    let inner = &w * &uj.shift(j).truncate(j);
                    let sign = if j.is_multiple_of(2) { 1.0 } else { -1.0 };
                    total += sign * t.coefficient.value() * inner.0[j];
                }
                Ok(total / self.weight.eval(x))
            })
            .collect()
    }
}

/// A kernel exponent `β` of `(1−x)^β`, with its square-integrability near 1.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct KernelExponent {
    pub label: String,
    pub exponent: f64,
    pub in_l2: bool,
}

/// `(1−x)^β ∈ L²((0,1))` iff `β > −1/2`; the boundary case diverges
/// logarithmically.
pub fn power_in_l2(beta: f64) -> bool {
    beta > -0.5
}

pub fn bessel_kernel_exponents(power: u32, alpha: f64) -> Result<Vec<KernelExponent>, ExprError> {
    if !(alpha >= 1.0) || !alpha.is_finite() {
        return Err(out_of_range("bessel_kernel_exponents", "alpha must lie in [1, inf)"));
    }
    let mut exps = vec![("b1", 0.5 + alpha), ("b2", 0.5 - alpha)];
    match power {
        2 => {}
        4 => exps.extend([("b3", 2.5 + alpha), ("b4", 2.5 - alpha)]),
        _ => return Err(out_of_range("bessel_kernel_exponents", "power must be 2 or 4")),
    }
    Ok(exps
        .into_iter()
        .map(|(l, e)| KernelExponent { label: l.to_string(), exponent: e, in_l2: power_in_l2(e) })
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::expr::{apply, apply_expanded, apply_repeated, compose_square, quasi_derivatives};

    fn p(s: &str) -> Param {
        s.parse().unwrap()
    }

    fn catalog() -> Vec<Classical> {
        vec![
            Classical::BesselAlpha(p("2")),
            Classical::Bessel4Alpha(p("3/2")),
            Classical::BesselGamma(p("1/2")),
            Classical::BesselChannel(ChannelSpec::new(3, 1, 0, p("0")).unwrap()),
            Classical::Legendre,
            Classical::Laguerre(p("1/2")),
            Classical::Hermite,
            Classical::Jacobi(p("1/2"), p("2")),
            Classical::ChaudhuriEveritt,
        ]
    }

    #[test]
    fn parse_and_display_round_trip() {
        for c in catalog() {
            assert_eq!(c.to_string().parse::<Classical>().unwrap(), c);
        }
        assert!("bessel_alpha(1/2)".parse::<Classical>().map(|c| build_classical(&c)).unwrap().is_err());
        assert!("laguerre(-1)".parse::<Classical>().map(|c| build_classical(&c)).unwrap().is_err());
        assert!("nonsense".parse::<Classical>().is_err());
        assert!("jacobi(1)".parse::<Classical>().is_err());
    }

    #[test]
    fn builders_match_displays() {
        let e = build_classical(&Classical::BesselAlpha(p("2"))).unwrap();
        assert_eq!(e.order(), 2);
        assert_eq!(e.endpoints().0, Endpoint::regular(0.0));
        assert_eq!(e.endpoints().1, Endpoint::singular(1.0));
        assert!((e.coefficient(1).eval(0.5) - 3.75 * 4.0).abs() < 1e-12);
        let l = build_classical(&Classical::Legendre).unwrap();
        assert!((l.coefficient(0).eval(0.3) - 0.91).abs() < 1e-15);
        let h = build_classical(&Classical::Hermite).unwrap();
        assert!((h.weight().eval(1.5) - (-2.25f64).exp()).abs() < 1e-15);
        let j = build_classical(&Classical::Jacobi(p("-1/2"), p("1/2"))).unwrap();
        assert_eq!(j.endpoints().1, Endpoint::regular(1.0));
        assert_eq!(j.endpoints().0, Endpoint::singular(-1.0));
    }

    #[test]
    fn ladder_agrees_with_expanded_form() {
        let u = FunctionWithDerivatives::polynomial(&[0.2, -0.5, 1.0, 0.3, -0.1]);
        for c in catalog() {
            let e = build_classical(&c).unwrap();
            let xs = e.interior_samples(9);
            let a = apply(&e, &u, &xs).unwrap();
            let b = apply_expanded(&e, &u, &xs).unwrap();
            for (x, y) in a.iter().zip(&b) {
                assert!((x - y).abs() <= 1e-10 * y.abs().max(1.0), "{c}: {x} vs {y}");
            }
        }
    }

    #[test]
    fn third_quasi_derivative_of_bessel4() {
        let alpha = 1.7;
        let e = build_classical(&Classical::Bessel4Alpha(Param::from_f64(alpha))).unwrap();
        let g = FunctionWithDerivatives::polynomial(&[0.1, 0.7, -0.4, 0.9, 0.2]);
        for x in [0.1, 0.4, 0.8] {
            let l = quasi_derivatives(&e, &g, x).unwrap();
            let d = g.jet(x, 3).unwrap();
            let expect = (2.0 * alpha * alpha - 0.5) * (1.0 - x).powi(-2) * d.0[1] - d.0[3];
            assert!((l[3] - expect).abs() <= 1e-12 * expect.abs().max(1.0));
        }
    }

    #[test]
    fn quasi_derivatives_vanish_with_ordinary_ones_at_zero() {
        let e = build_classical(&Classical::Bessel4Alpha(p("2"))).unwrap();
        let prefix_zero = |v: &[f64], k: usize| v[..=k].iter().all(|&a| a == 0.0);
        let mut tests: Vec<Vec<f64>> = (0..5)
            .map(|k| {
                let mut c = vec![0.0; 5];
                c[k] = 1.0;
                c
            })
            .collect();
        tests.push(vec![0.0, 0.0, 0.0, 2.0, -1.0]);
        tests.push(vec![0.0, 1.0, 0.0, 3.0, 0.0]);
        tests.push(vec![0.0, 0.0, 1.0, 0.0, 5.0]);
        for c in tests {
            let g = FunctionWithDerivatives::polynomial(&c);
            let q = quasi_derivatives(&e, &g, 0.0).unwrap();
            let d = g.jet(0.0, 3).unwrap();
            for k in 0..4 {
                assert_eq!(prefix_zero(&q, k), prefix_zero(&d.0, k), "{c:?} k={k}");
            }
        }
    }

    #[test]
    fn kernel_solutions_of_bessel() {
        for alpha in [1.0, 2.0, 33f64.sqrt() / 2.0] {
            let e = build_classical(&Classical::BesselAlpha(Param::from_f64(alpha))).unwrap();
            let xs: Vec<f64> = (1..=20).map(|i| i as f64 / 21.0).collect();
            let ub = |b: f64| FunctionWithDerivatives::power_of_one_minus_x(b);
            let (b1, b2, b3, b4) = (0.5 + alpha, 0.5 - alpha, 2.5 + alpha, 2.5 - alpha);
            for v in apply(&e, &ub(b1), &xs).unwrap() {
                assert!(v.abs() < 1e-10);
            }
            let t3 = apply(&e, &ub(b3), &xs).unwrap();
            let t4 = apply(&e, &ub(b4), &xs).unwrap();
            for (i, &x) in xs.iter().enumerate() {
                let want3 = -4.0 * (1.0 + alpha) * (1.0 - x).powf(b1);
                let want4 = -4.0 * (1.0 - alpha) * (1.0 - x).powf(b2);
                assert!((t3[i] - want3).abs() <= 1e-10 * want3.abs());
                assert!((t4[i] - want4).abs() <= 1e-10 * want4.abs().max(1e-300) + 1e-12 * (1.0 - x).powf(b2));
            }
            let e4 = build_classical(&Classical::Bessel4Alpha(Param::from_f64(alpha))).unwrap();
            for b in [b1, b2, b3, b4] {
                for (v, x) in apply(&e4, &ub(b), &xs).unwrap().iter().zip(&xs) {
                    assert!(v.abs() <= 1e-9 * (1.0 - x).powf(b - 4.0).abs() * alpha.powi(4), "{alpha} {b} {v}");
                }
            }
        }
    }

    #[test]
    fn square_of_bessel_matches_closed_forms() {
        for alpha in [1.0, 1.5, 2.0, 33f64.sqrt() / 2.0] {
            let e = build_classical(&Classical::BesselAlpha(Param::from_f64(alpha))).unwrap();
            let s = compose_square(&e).unwrap();
            let (c1, c2) = bessel4_constants(alpha);
            for i in 1..=50 {
                let x = i as f64 / 51.0;
                let t = 1.0 - x;
                assert!((s.coefficient(0).eval(x) - 1.0).abs() < 1e-12);
                let a = s.coefficient(1).eval(x);
                assert!((a - c1 / (t * t)).abs() <= 1e-12 * a.abs());
                let b = s.coefficient(2).eval(x);
                assert!((b - c2 / t.powi(4)).abs() <= 1e-12 * b.abs().max(1.0));
            }
        }
    }

    #[test]
    fn expansions_reproduce_repeated_application() {
        let families = [
            ExpansionFamily::Legendre,
            ExpansionFamily::Laguerre(p("1/2")),
            ExpansionFamily::Hermite,
            ExpansionFamily::Jacobi(p("1/2"), p("2")),
            ExpansionFamily::Jacobi(Param::sqrt_over(2, 2), p("-1/3")),
        ];
        let u = FunctionWithDerivatives::polynomial(&[1.0, -0.3, 0.5, 0.25, -0.2, 0.1]);
        for fam in &families {
            let base = build_classical(&fam.base()).unwrap();
            let xs = base.interior_samples(7);
            for m in 1..=4 {
                let exp = power_expansion(fam, m).unwrap();
                let a = exp.apply(&u, &xs).unwrap();
                let b = apply_repeated(&base, &u, m as usize, &xs).unwrap();
                let c = apply(&exp.to_expression().unwrap(), &u, &xs).unwrap();
                for i in 0..xs.len() {
                    let scale = b[i].abs().max(1e-3);
                    assert!((a[i] - b[i]).abs() <= 1e-8 * scale, "{fam} m={m}: {} vs {}", a[i], b[i]);
                    assert!((c[i] - b[i]).abs() <= 1e-8 * scale);
                }
            }
        }
    }

    #[test]
    fn expansion_coefficients() {
        let e = power_expansion(&ExpansionFamily::Legendre, 1).unwrap();
        assert_eq!(e.terms.len(), 1);
        assert_eq!(e.terms[0].coefficient, Coefficient::Exact(BigRational::one()));
        let vals = |f: &ExpansionFamily| -> Vec<f64> {
            power_expansion(f, 2).unwrap().terms.iter().map(|t| t.coefficient.value()).collect()
        };
        assert_eq!(vals(&ExpansionFamily::Legendre), vec![2.0, 1.0]);
        assert_eq!(vals(&ExpansionFamily::Hermite), vec![2.0, 1.0]);
        let j = power_expansion(&ExpansionFamily::Jacobi(Param::sqrt_over(2, 2), p("0")), 2).unwrap();
        assert!(matches!(j.terms[0].coefficient, Coefficient::Approximate(_)));
    }

    #[test]
    fn kernel_exponents() {
        let e = bessel_kernel_exponents(4, 2.0).unwrap();
        let l2: Vec<f64> = e.iter().filter(|k| k.in_l2).map(|k| k.exponent).collect();
        assert_eq!(l2, vec![2.5, 4.5, 0.5]);
        let e = bessel_kernel_exponents(2, 1.0).unwrap();
        assert_eq!((e[1].exponent, e[1].in_l2), (-0.5, false));
        let e = bessel_kernel_exponents(4, 4.0).unwrap();
        assert!(!e[3].in_l2 && e[3].exponent == -1.5 && e[1].exponent == -3.5);
        assert!(bessel_kernel_exponents(4, 0.5).is_err());
        assert!(bessel_kernel_exponents(3, 2.0).is_err());
    }
}
