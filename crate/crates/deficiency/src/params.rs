//! Real parameters written as `p`, `p/q`, decimals, or `sqrt(k)/d`.
//!
//! Rational inputs keep an exact value next to the float; `sqrt(k)` is exact
//! only when `k` is a perfect square.

use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{Signed, ToPrimitive, Zero};
use serde::Serialize;
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ParseError {
    #[error("cannot parse parameter `{0}`")]
    Invalid(String),
    #[error("division by zero in `{0}`")]
    ZeroDenominator(String),
    #[error("parameter `{0}` is out of range")]
    Overflow(String),
}

/// A real parameter with its source text and, when rational, its exact value.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Param {
    pub value: f64,
    #[serde(skip)]
    pub exact: Option<BigRational>,
    pub text: String,
}

impl Param {
    pub fn from_f64(value: f64) -> Self {
        Param { value, exact: None, text: format!("{value}") }
    }

    pub fn rational(numer: i64, denom: i64) -> Self {
        let q = BigRational::new(numer.into(), denom.into());
        let text = if denom == 1 { format!("{numer}") } else { format!("{numer}/{denom}") };
        Param { value: q.to_f64().unwrap_or(f64::NAN), exact: Some(q), text }
    }

    pub fn integer(n: i64) -> Self {
        Param::rational(n, 1)
    }

    /// `√k / d`
    pub fn sqrt_over(k: u64, d: u64) -> Self {
        format!("sqrt({k})/{d}").parse().expect("well-formed")
    }
}

impl fmt::Display for Param {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.text)
    }
}

const MAX_DIGITS: usize = 40;

fn parse_integer(s: &str, whole: &str) -> Result<BigInt, ParseError> {
    if s.is_empty() || s.len() > MAX_DIGITS || !s.bytes().all(|b| b.is_ascii_digit()) {
        return Err(ParseError::Invalid(whole.to_string()));
    }
    s.parse().map_err(|_| ParseError::Invalid(whole.to_string()))
}

/// An unsigned decimal `123`, `1.25` or `.5` as an exact rational.
fn parse_decimal(s: &str, whole: &str) -> Result<BigRational, ParseError> {
    let (int_part, frac_part) = match s.split_once('.') {
        Some((a, b)) => (a, b),
        None => (s, ""),
    };
    if int_part.is_empty() && frac_part.is_empty() {
        return Err(ParseError::Invalid(whole.to_string()));
    }
    let digits = format!("{int_part}{frac_part}");
    let n = parse_integer(&digits, whole)?;
    let d = BigInt::from(10).pow(frac_part.len() as u32);
    Ok(BigRational::new(n, d))
}

fn isqrt_exact(k: &BigInt) -> Option<BigInt> {
    let r = k.sqrt();
    (&r * &r == *k).then_some(r)
}

impl FromStr for Param {
    type Err = ParseError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let text = s.trim();
        let (negative, body) = match text.strip_prefix('-') {
            Some(rest) => (true, rest.trim_start()),
            None => (false, text),
        };
        let (numerator, denominator) = match body.split_once('/') {
            Some((a, b)) => (a.trim(), Some(b.trim())),
            None => (body, None),
        };
        let den = match denominator {
            Some(d) => parse_decimal(d, s)?,
            None => BigRational::from_integer(1.into()),
        };
        if den.is_zero() {
            return Err(ParseError::ZeroDenominator(s.to_string()));
        }
        let sign = if negative { -1.0 } else { 1.0 };
        let (value, exact) = if let Some(inner) = numerator.strip_prefix("sqrt(").and_then(|r| r.strip_suffix(')')) {
            let k = parse_integer(inner.trim(), s)?;
            match isqrt_exact(&k) {
                Some(r) => {
                    let q = BigRational::from_integer(r) / &den;
                    (q.to_f64().unwrap_or(f64::NAN), Some(q))
                }
                None => {
                    let kf = k.to_f64().unwrap_or(f64::INFINITY);
                    (kf.sqrt() / den.to_f64().unwrap_or(f64::NAN), None)
                }
            }
        } else {
            let q = parse_decimal(numerator, s)? / &den;
            (q.to_f64().unwrap_or(f64::NAN), Some(q))
        };
        if !value.is_finite() {
            return Err(ParseError::Overflow(s.to_string()));
        }
        let exact = exact.map(|q| if negative { -q } else { q });
        Ok(Param { value: sign * value, exact, text: text.to_string() })
    }
}

/// Splits `name(a,b,…)` into the name and its parameters; a bare name has
/// none.
pub fn parse_call(s: &str) -> Result<(String, Vec<Param>), ParseError> {
    let t = s.trim();
    let Some(open) = t.find('(') else {
        if t.is_empty() || !t.bytes().all(|b| b.is_ascii_alphanumeric() || b == b'_' || b == b'-') {
            return Err(ParseError::Invalid(s.to_string()));
        }
        return Ok((t.to_ascii_lowercase(), Vec::new()));
    };
    let name = t[..open].trim();
    let args = t[open + 1..].strip_suffix(')').ok_or_else(|| ParseError::Invalid(s.to_string()))?;
    if name.is_empty() {
        return Err(ParseError::Invalid(s.to_string()));
    }
    let params = split_args(args).into_iter().map(|a| a.parse()).collect::<Result<Vec<Param>, _>>()?;
    Ok((name.to_ascii_lowercase(), params))
}

/// Splits on commas that are not inside parentheses.
fn split_args(s: &str) -> Vec<&str> {
    let mut out = Vec::new();
    let mut depth = 0i32;
    let mut start = 0;
    for (i, ch) in s.char_indices() {
        match ch {
            '(' => depth += 1,
            ')' => depth -= 1,
            ',' if depth == 0 => {
                out.push(&s[start..i]);
                start = i + 1;
            }
            _ => {}
        }
    }
    if !s.trim().is_empty() || !out.is_empty() {
        out.push(&s[start..]);
    }
    out
}

/// Nonnegative exact rational check used by range validation.
pub fn is_nonnegative(p: &Param) -> bool {
    match &p.exact {
        Some(q) => !q.is_negative(),
        None => p.value >= 0.0,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn parses_forms() {
        let p: Param = "1/2".parse().unwrap();
        assert_eq!(p.value, 0.5);
        assert_eq!(p.exact, Some(BigRational::new(1.into(), 2.into())));
        let p: Param = "-0.25".parse().unwrap();
        assert_eq!(p.value, -0.25);
        assert_eq!(p.exact, Some(BigRational::new((-1).into(), 4.into())));
        let p: Param = "sqrt(33)/2".parse().unwrap();
        assert!((p.value - 33f64.sqrt() / 2.0).abs() < 1e-15);
        assert_eq!(p.exact, None);
        let p: Param = "sqrt(16)/8".parse().unwrap();
        assert_eq!(p.exact, Some(BigRational::new(1.into(), 2.into())));
        let p: Param = "3".parse().unwrap();
        assert_eq!(p.exact, Some(BigRational::from_integer(3.into())));
        assert_eq!(Param::sqrt_over(33, 2).text, "sqrt(33)/2");
    }

    #[test]
    fn rejects_garbage() {
        for bad in ["", "-", "1/0", "abc", "sqrt(-3)", "sqrt(2", "1/2/3", "1e5", ".", "--1", "0x10"] {
            assert!(bad.parse::<Param>().is_err(), "{bad}");
        }
    }

    #[test]
    fn calls() {
        let (n, p) = parse_call("jacobi(1/2, 2)").unwrap();
        assert_eq!(n, "jacobi");
        assert_eq!(p.len(), 2);
        let (n, p) = parse_call("bessel_alpha(sqrt(33)/2)").unwrap();
        assert_eq!((n.as_str(), p.len()), ("bessel_alpha", 1));
        let (n, p) = parse_call("Legendre").unwrap();
        assert_eq!((n.as_str(), p.len()), ("legendre", 0));
        assert_eq!(parse_call("f()").unwrap().1.len(), 0);
        assert!(parse_call("(1)").is_err());
        assert!(parse_call("f(1").is_err());
        assert!(parse_call("f(1,)").is_err());
    }

    proptest! {
        #[test]
        fn rationals_round_trip(n in -10_000i64..10_000, d in 1i64..10_000) {
            let p: Param = format!("{n}/{d}").parse().unwrap();
            prop_assert_eq!(p.exact.clone().unwrap(), BigRational::new(n.into(), d.into()));
            prop_assert!((p.value - n as f64 / d as f64).abs() <= 1e-15 * (n as f64 / d as f64).abs().max(1.0));
        }

        #[test]
        fn never_panics(s in ".{0,24}") {
            let _ = s.parse::<Param>();
            let _ = parse_call(&s);
        }
    }
}
