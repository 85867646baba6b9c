//! Liouville–Green normal form of the Chaudhuri–Everitt expression
//! `−((x+1)⁴/6 · u′)′ + (x+1)² u` on `[0, ∞)`.
//!
//! With `t = √6 (1 − 1/(x+1))` and `ũ(t) = 6^{−1/4}(x+1) u(x)` the equation
//! becomes `−ũ″ + 8(√6 − t)^{−2} ũ = zũ` on `[0, √6)`; rescaling `t = √6 s`
//! turns it into the Bessel-type equation with `α² − 1/4 = 8` and spectral
//! parameter `6z` on `[0, 1)`.

use num_complex::Complex64;
use serde::Serialize;

use crate::classical::{build_classical, Classical};
use crate::expr::{Endpoint, ExprError, QuasiDifferentialExpression};
use crate::params::Param;
use crate::symbolic::{Linear, Term};
use crate::weyl::{solve_initial_value, Controls, WeylError};

pub const SQRT_6: f64 = 2.449_489_742_783_178;

/// Potential constant of the normal form.
pub const NORMAL_FORM_CONSTANT: f64 = 8.0;

#[derive(Debug, thiserror::Error)]
pub enum LgError {
    #[error("not the Chaudhuri–Everitt expression: {0}")]
    WrongSource(String),
    #[error(transparent)]
    Expr(#[from] ExprError),
    #[error(transparent)]
    Weyl(#[from] WeylError),
}

/// `t(x) = √6 (1 − 1/(x+1))`, with `t(∞) = √6`.
pub fn t_of_x(x: f64) -> f64 {
    if x == f64::INFINITY {
        SQRT_6
    } else {
        SQRT_6 * (x / (x + 1.0))
    }
}

pub fn x_of_t(t: f64) -> f64 {
    t / (SQRT_6 - t)
}

/// `ũ/u = 6^{−1/4}(x+1)`.
pub fn amplitude(x: f64) -> f64 {
    6f64.powf(-0.25) * (x + 1.0)
}

/// The Bessel parameter reached after rescaling, `√33/2`.
pub fn bessel_alpha() -> Param {
    Param::sqrt_over(33, 2)
}

#[derive(Debug, Clone, Serialize)]
pub struct ScalingReport {
    pub t_at_zero: f64,
    pub t_at_infinity: f64,
    pub normal_form_constant: f64,
    pub alpha: f64,
    /// `α² − 1/4`, equal to the normal-form constant.
    pub alpha_squared_minus_quarter: f64,
    /// Factor multiplying `z` after `t = √6 s`.
    pub spectral_scale: f64,
}

#[derive(Debug, Clone)]
pub struct LiouvilleGreen {
    /// `−d²/dt² + 8(√6 − t)^{−2}` on `[0, √6)`.
    pub normal_form: QuasiDifferentialExpression,
    /// The Bessel-type expression in `s = t/√6`.
    pub bessel: QuasiDifferentialExpression,
    pub report: ScalingReport,
}

fn is_chaudhuri_everitt(e: &QuasiDifferentialExpression) -> bool {
    if e.n() != 1 || !e.weight().is_one() {
        return false;
    }
    let (a, b) = e.endpoints();
    if a.location != 0.0 || b.location != f64::INFINITY {
        return false;
    }
    [0.0, 0.5, 1.0, 3.0, 10.0].iter().all(|&x: &f64| {
        let p0 = (x + 1.0).powi(4) / 6.0;
        let p1 = (x + 1.0).powi(2);
        (e.coefficient(0).eval(x) - p0).abs() <= 1e-12 * p0 && (e.coefficient(1).eval(x) - p1).abs() <= 1e-12 * p1
    })
}

pub fn liouville_green(source: &QuasiDifferentialExpression) -> Result<LiouvilleGreen, LgError> {
    if !is_chaudhuri_everitt(source) {
        return Err(LgError::WrongSource(source.name().to_string()));
    }
    let normal_form = QuasiDifferentialExpression::new(
        "chaudhuri_everitt_normal_form".to_string(),
        vec![
            crate::expr::CoefficientFunction::constant(1.0),
            Term::power(NORMAL_FORM_CONSTANT, Linear { c: SQRT_6, sigma: -1.0 }, -2.0).into(),
        ],
        crate::expr::CoefficientFunction::constant(1.0),
        Endpoint::regular(0.0),
        Endpoint::singular(SQRT_6),
    )?;
    let alpha = bessel_alpha();
    let bessel = build_classical(&Classical::BesselAlpha(alpha.clone()))?;
    Ok(LiouvilleGreen {
        normal_form,
        bessel,
        report: ScalingReport {
            t_at_zero: t_of_x(0.0),
            t_at_infinity: t_of_x(f64::INFINITY),
            normal_form_constant: NORMAL_FORM_CONSTANT,
            alpha: alpha.value,
            alpha_squared_minus_quarter: alpha.value * alpha.value - 0.25,
            spectral_scale: 6.0,
        },
    })
}

#[derive(Debug, Clone, Serialize)]
pub struct TransportSample {
    pub x: f64,
    pub s: f64,
    /// `|−ũ″ + V ũ − 6zũ|` relative to the largest of its three terms.
    pub residual: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct TransportCheck {
    #[serde(serialize_with = "ser_complex")]
    pub z: Complex64,
    pub samples: Vec<TransportSample>,
    pub max_residual: f64,
}

fn ser_complex<S: serde::Serializer>(z: &Complex64, s: S) -> Result<S::Ok, S::Error> {
    use serde::ser::SerializeTuple;
    let mut t = s.serialize_tuple(2)?;
    t.serialize_element(&z.re)?;
    t.serialize_element(&z.im)?;
    t.end()
}

/// Integrates `τ_CE u = zu` from `u(0) = 1, p₀u′(0) = 1`, carries the
/// solution to `s = t/√6` and evaluates the Bessel equation with parameter
/// `6z` at `count` points of `s ∈ [0.05, 0.9]`. The second derivative in `s`
/// is a fourth-order central difference of the exactly transported first
/// derivative.
pub fn transport_residual(
    lg: &LiouvilleGreen,
    source: &QuasiDifferentialExpression,
    z: Complex64,
    count: usize,
) -> Result<TransportCheck, LgError> {
    const H: f64 = 1e-4;
    let count = count.max(2);
    let centers: Vec<f64> = (0..count).map(|j| 0.05 + 0.85 * j as f64 / (count - 1) as f64).collect();
    let mut s_points: Vec<f64> = centers.iter().flat_map(|&s| (-2..=2).map(move |k| s + k as f64 * H)).collect();
    s_points.sort_by(f64::total_cmp);
    s_points.dedup();
    let xs: Vec<f64> = s_points.iter().map(|&s| s / (1.0 - s)).collect();
    let controls = Controls { rtol: 1e-12, ..Controls::default() };
    let one = Complex64::new(1.0, 0.0);
    let states = solve_initial_value(source, z, 0.0, &[one, one], &xs, &controls)?;
    let c = 6f64.powf(-0.25);
    let transported = |i: usize| {
        let x = xs[i];
        let u = states[i][0];
        let du = states[i][1] / source.coefficient(0).eval(x);
        let v = u * c * (x + 1.0);
        let dv = (u + du * (x + 1.0)) * c * (x + 1.0).powi(2);
        (v, dv)
    };
    let index = |s: f64| s_points.iter().position(|&p| p == s).expect("stencil point present");
    let potential = lg.bessel.coefficient(1);
    let samples: Vec<TransportSample> = centers
        .iter()
        .map(|&s| {
            let d = |k: i32| transported(index(s + k as f64 * H)).1;
            let ddv = (-d(2) + 8.0 * d(1) - 8.0 * d(-1) + d(-2)) / (12.0 * H);
            let v = transported(index(s)).0;
            let vq = v * potential.eval(s);
            let vz = v * z * lg.report.spectral_scale;
            let scale = ddv.norm().max(vq.norm()).max(vz.norm());
            TransportSample { x: s / (1.0 - s), s, residual: (-ddv + vq - vz).norm() / scale }
        })
        .collect();
    let max_residual = samples.iter().map(|p| p.residual).fold(0.0, f64::max);
    Ok(TransportCheck { z, samples, max_residual })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ce() -> QuasiDifferentialExpression {
        build_classical(&Classical::ChaudhuriEveritt).unwrap()
    }

    #[test]
    fn endpoint_maps() {
        assert_eq!(t_of_x(0.0), 0.0);
        assert!((t_of_x(f64::INFINITY) - 6f64.sqrt()).abs() <= 1e-15);
        assert!((t_of_x(1e15) - 6f64.sqrt()).abs() <= 1e-10);
        for x in [0.1, 1.0, 7.5, 100.0] {
            assert!((x_of_t(t_of_x(x)) - x).abs() <= 1e-12 * x.max(1.0));
        }
    }

    #[test]
    fn normal_form_potential_from_the_amplitude() {
        // q + m″/m with m(t) = 6^{−1/4}(x(t)+1), by finite differences in t.
        for t in [0.2, 1.0, 2.0, 2.3] {
            let m = |t: f64| amplitude(x_of_t(t));
            let h = 1e-4;
            let m2 = (m(t + h) - 2.0 * m(t) + m(t - h)) / (h * h);
            let x = x_of_t(t);
            let q = (x + 1.0).powi(2) + m2 / m(t);
            let expected = NORMAL_FORM_CONSTANT / (SQRT_6 - t).powi(2);
            assert!((q - expected).abs() <= 1e-6 * expected, "t={t}: {q} vs {expected}");
        }
    }

    #[test]
    fn alpha_identification() {
        let lg = liouville_green(&ce()).unwrap();
        assert!((lg.report.alpha - 33f64.sqrt() / 2.0).abs() <= 1e-15);
        assert!((lg.report.alpha_squared_minus_quarter - 8.0).abs() <= 1e-12);
        assert!(lg.report.alpha > 1.0 && lg.report.alpha < 3.0);
    }

    #[test]
    fn rejects_other_sources() {
        let e = build_classical(&Classical::Legendre).unwrap();
        assert!(matches!(liouville_green(&e), Err(LgError::WrongSource(_))));
    }

    #[test]
    fn transported_solutions_solve_the_bessel_equation() {
        let src = ce();
        let lg = liouville_green(&src).unwrap();
        for z in [Complex64::new(0.0, 1.0), Complex64::new(0.5, -2.0)] {
            let r = transport_residual(&lg, &src, z, 20).unwrap();
            assert!(r.max_residual <= 1e-6, "{}", r.max_residual);
        }
    }
}
