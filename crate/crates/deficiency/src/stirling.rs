//! Stirling numbers of the second kind and their Legendre and Jacobi
//! analogues, as exact rationals.
//!
//! These are the coefficients of the Lagrangian symmetric forms of integer
//! powers of the classical second-order expressions.

use std::collections::BTreeMap;
use std::fmt;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::Serialize;
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum StirlingError {
    #[error("Gamma-ratio pole: alpha + beta + r + 2 is a nonpositive integer at r = {r}")]
    Pole { r: u32 },
}

fn int(n: impl Into<BigInt>) -> BigRational {
    BigRational::from_integer(n.into())
}

fn factorial(n: u32) -> BigInt {
    (1..=n).fold(BigInt::one(), |acc, k| acc * k)
}

fn binomial(n: u32, k: u32) -> BigInt {
    (0..k).fold(BigInt::one(), |acc, i| acc * (n - i) / (i + 1))
}

fn sign(e: u32) -> BigInt {
    if e.is_multiple_of(2) {
        BigInt::one()
    } else {
        -BigInt::one()
    }
}

/// `S_m^{(j)} = Σ_{i=0}^{j} (−1)^{i+j} C(j,i) i^m / j!`
pub fn stirling2(m: u32, j: u32) -> BigRational {
    let num: BigInt = (0..=j).map(|i| sign(i + j) * binomial(j, i) * BigInt::from(i).pow(m)).sum();
    BigRational::new(num, factorial(j))
}

/// `PS_m^{(j)} = Σ_{k=1}^{j} (−1)^{k+j} (2k+1)(k²+k)^m / ((k+j+1)!(j−k)!)`
pub fn legendre_stirling(m: u32, j: u32) -> BigRational {
    (1..=j)
        .map(|k| {
            let num = sign(k + j) * BigInt::from(2 * k + 1) * BigInt::from(k * k + k).pow(m);
            BigRational::new(num, factorial(k + j + 1) * factorial(j - k))
        })
        .fold(BigRational::zero(), |a, b| a + b)
}

/// `x(x+1)…(x+k−1)`
fn pochhammer(x: &BigRational, k: u32) -> BigRational {
    (0..k).fold(BigRational::one(), |acc, i| acc * (x + int(i)))
}

fn is_nonpositive_integer(x: &BigRational) -> bool {
    x.is_integer() && !x.is_positive()
}

/// Jacobi–Stirling number `P^{(α,β)}S_n^{(j)}`, with the Gamma ratio
/// `Γ(x)/Γ(x+j)` taken as `1/(x)_j`, `x = α+β+r+2`.
pub fn jacobi_stirling(n: u32, j: u32, alpha: &BigRational, beta: &BigRational) -> Result<BigRational, StirlingError> {
    let s = alpha + beta;
    let mut total = BigRational::zero();
    for r in 1..=j {
        let x = &s + int(r + 2);
        if is_nonpositive_integer(&x) {
            return Err(StirlingError::Pole { r });
        }
        let rr = int(r);
        let base = &rr * &rr + &s * &rr + &rr;
        let lin = &s + int(2 * r + 1);
        let power = (0..n.saturating_sub(1)).fold(BigRational::one(), |acc, _| acc * &base);
        let denom = int(factorial(r - 1) * factorial(j - r)) * pochhammer(&x, j);
        if denom.is_zero() {
            return Err(StirlingError::Pole { r });
        }
        total += int(sign(r + j)) * lin * power / denom;
    }
    Ok(total)
}

/// A floating-point value computed for irrational parameters.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Approximate {
    pub value: f64,
    pub approximate: bool,
}

/// [`jacobi_stirling`] in floating point for irrational `α`, `β`, summed with
/// Neumaier compensation. Flagged approximate.
pub fn jacobi_stirling_approx(n: u32, j: u32, alpha: f64, beta: f64) -> Result<Approximate, StirlingError> {
    let s = alpha + beta;
    let mut sum = 0.0f64;
    let mut comp = 0.0f64;
    for r in 1..=j {
        let rf = r as f64;
        let x = s + rf + 2.0;
        if (x - x.round()).abs() < 1e-12 && x.round() <= 0.0 {
            return Err(StirlingError::Pole { r });
        }
        let poch: f64 = (0..j).map(|i| x + i as f64).product();
        let fact = |k: u32| (1..=k).map(|i| i as f64).product::<f64>();
        let sgn = if (r + j).is_multiple_of(2) { 1.0 } else { -1.0 };
        let term = sgn * (s + 2.0 * rf + 1.0) * (rf * rf + s * rf + rf).powi(n as i32 - 1)
            / (fact(r - 1) * fact(j - r) * poch);
        let t = sum + term;
        comp += if sum.abs() >= term.abs() { (sum - t) + term } else { (term - t) + sum };
        sum = t;
    }
    Ok(Approximate { value: sum + comp, approximate: true })
}

pub fn to_f64(q: &BigRational) -> f64 {
    q.to_f64().unwrap_or(f64::NAN)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(tag = "family", rename_all = "lowercase")]
pub enum Family {
    Classical,
    Legendre,
    Jacobi {
        #[serde(serialize_with = "ser_rational")]
        alpha: BigRational,
        #[serde(serialize_with = "ser_rational")]
        beta: BigRational,
    },
}

fn ser_rational<S: serde::Serializer>(q: &BigRational, s: S) -> Result<S::Ok, S::Error> {
    s.serialize_str(&q.to_string())
}

impl fmt::Display for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Family::Classical => f.write_str("classical"),
            Family::Legendre => f.write_str("legendre"),
            Family::Jacobi { alpha, beta } => write!(f, "jacobi({alpha},{beta})"),
        }
    }
}

impl Family {
    pub fn value(&self, m: u32, j: u32) -> Result<BigRational, StirlingError> {
        match self {
            Family::Classical => Ok(stirling2(m, j)),
            Family::Legendre => Ok(legendre_stirling(m, j)),
            Family::Jacobi { alpha, beta } => jacobi_stirling(m, j, alpha, beta),
        }
    }
}

/// Entries `(m, j) ↦ value` for `1 ≤ j ≤ m ≤ bound`. Immutable once built.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct StirlingTable {
    family: Family,
    bound: u32,
    entries: BTreeMap<(u32, u32), BigRational>,
}

impl StirlingTable {
    pub fn build(family: Family, bound: u32) -> Result<Self, StirlingError> {
        let mut entries = BTreeMap::new();
        for m in 1..=bound {
            for j in 1..=m {
                entries.insert((m, j), family.value(m, j)?);
            }
        }
        Ok(StirlingTable { family, bound, entries })
    }

    pub fn family(&self) -> &Family {
        &self.family
    }

    pub fn bound(&self) -> u32 {
        self.bound
    }

    pub fn get(&self, m: u32, j: u32) -> Option<&BigRational> {
        self.entries.get(&(m, j))
    }

    pub fn entries(&self) -> impl Iterator<Item = (&(u32, u32), &BigRational)> {
        self.entries.iter()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(n: i64, d: i64) -> BigRational {
        BigRational::new(n.into(), d.into())
    }

    #[test]
    fn classical_examples() {
        assert_eq!(stirling2(1, 1), q(1, 1));
        assert_eq!(stirling2(3, 2), q(3, 1));
        assert_eq!(stirling2(2, 3), q(0, 1));
        assert_eq!(stirling2(10, 4), q(34105, 1));
    }

    #[test]
    fn legendre_examples() {
        assert_eq!(legendre_stirling(1, 1), q(1, 1));
        assert_eq!(legendre_stirling(2, 1), q(2, 1));
        assert_eq!(legendre_stirling(2, 2), q(1, 1));
        // PS_m^{(1)} = 2^{m-1}
        assert_eq!(legendre_stirling(7, 1), q(64, 1));
    }

    // Independent recurrence oracles, seeded only with S(0,0) = PS(0,0) = 1.
    fn recurrence_table(bound: u32, factor: impl Fn(u32) -> u64) -> Vec<Vec<BigInt>> {
        let mut t = vec![vec![BigInt::zero(); bound as usize + 2]; bound as usize + 1];
        t[0][0] = BigInt::one();
        for m in 1..=bound as usize {
            for j in 1..=m {
                t[m][j] = BigInt::from(factor(j as u32)) * &t[m - 1][j] + &t[m - 1][j - 1];
            }
        }
        t
    }

    #[test]
    fn classical_matches_recurrence() {
        let t = recurrence_table(20, |j| j as u64);
        for m in 1..=20u32 {
            for j in 1..=m + 1 {
                assert_eq!(stirling2(m, j), int(t[m as usize][j as usize].clone()), "S({m},{j})");
            }
        }
    }

    #[test]
    fn legendre_matches_recurrence() {
        let t = recurrence_table(15, |j| (j as u64) * (j as u64 + 1));
        for m in 1..=15u32 {
            for j in 1..=m + 1 {
                assert_eq!(legendre_stirling(m, j), int(t[m as usize][j as usize].clone()), "PS({m},{j})");
            }
        }
    }

    #[test]
    fn jacobi_examples() {
        let zero = BigRational::zero();
        assert_eq!(jacobi_stirling(1, 1, &zero, &zero).unwrap(), q(1, 1));
        // at α = β = 0 the Gamma ratio absorbs one factor r(r+1): same indexing as PS
        for n in 1..=8 {
            for j in 1..=n {
                assert_eq!(jacobi_stirling(n, j, &zero, &zero).unwrap(), legendre_stirling(n, j));
            }
        }
        assert_eq!(jacobi_stirling(1, 2, &zero, &zero).unwrap(), q(0, 1));
        assert_eq!(jacobi_stirling(2, 2, &zero, &zero).unwrap(), q(1, 1));
    }

    #[test]
    fn jacobi_poles() {
        // α + β = −4: x = α+β+r+2 = −1 at r = 1
        let a = q(-2, 1);
        assert_eq!(jacobi_stirling(2, 2, &a, &a), Err(StirlingError::Pole { r: 1 }));
        let b = q(-5, 1);
        // α + β = −5: x = 0 at r = 3
        assert_eq!(jacobi_stirling(3, 3, &BigRational::zero(), &b), Err(StirlingError::Pole { r: 1 }));
        assert_eq!(jacobi_stirling(3, 3, &q(2, 1), &b), Err(StirlingError::Pole { r: 1 }));
        assert_eq!(jacobi_stirling(4, 4, &q(5, 2), &q(-15, 2)), Err(StirlingError::Pole { r: 1 }));
        assert!(jacobi_stirling(3, 3, &q(1, 2), &q(1, 3)).is_ok());
    }

    #[test]
    fn jacobi_recurrence_for_general_parameters() {
        // P S_n^{(j)} = P S_{n-1}^{(j-1)} + j(j+α+β+1) P S_{n-1}^{(j)}
        for (a, b) in [(q(1, 2), q(3, 2)), (q(-1, 2), q(2, 1)), (q(2, 3), q(-1, 3))] {
            let s = &a + &b;
            for n in 2..=7u32 {
                for j in 1..=n {
                    let lhs = jacobi_stirling(n, j, &a, &b).unwrap();
                    let prev = if j > 1 { jacobi_stirling(n - 1, j - 1, &a, &b).unwrap() } else { BigRational::zero() };
                    let same = jacobi_stirling(n - 1, j, &a, &b).unwrap();
                    let rhs = prev + int(j) * (int(j + 1) + &s) * same;
                    assert_eq!(lhs, rhs, "n={n} j={j} a={a} b={b}");
                }
            }
        }
    }

    #[test]
    fn approximate_path_matches_exact() {
        let (a, b) = (q(1, 2), q(3, 2));
        for n in 1..=6 {
            for j in 1..=n {
                let exact = to_f64(&jacobi_stirling(n, j, &a, &b).unwrap());
                let approx = jacobi_stirling_approx(n, j, 0.5, 1.5).unwrap();
                assert!(approx.approximate);
                assert!((approx.value - exact).abs() <= 1e-12 * exact.abs().max(1.0));
            }
        }
        let s = 33f64.sqrt() / 2.0;
        assert!(jacobi_stirling_approx(3, 2, s, s).unwrap().value.is_finite());
    }

    #[test]
    fn tables_are_integral_where_expected() {
        for family in [Family::Classical, Family::Legendre] {
            let t = StirlingTable::build(family, 12).unwrap();
            for (_, v) in t.entries() {
                assert!(v.is_integer() && !v.is_negative());
            }
            assert_eq!(t.entries().count(), 78);
        }
        let t = StirlingTable::build(Family::Legendre, 3).unwrap();
        assert_eq!(t.get(2, 2), Some(&q(1, 1)));
        assert_eq!(t.get(4, 1), None);
    }
}
