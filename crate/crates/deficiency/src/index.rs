//! Defect numbers, deficiency indices and Fredholm indices.
//!
//! Counts live in ℕ₀ ∪ {∞}; indices live in ℤ ∪ {−∞, +∞}. Everything here is
//! plain value arithmetic on abstract pairs. The operator-theoretic hypotheses
//! behind the formulas (closedness, 0 in the field of regularity, density of
//! powers) are the caller's responsibility.

use std::cmp::Ordering;
use std::fmt;
use std::ops::Add;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::poly::RealPolynomial;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum IndexError {
    #[error("power must be at least 1")]
    ZeroPower,
    #[error("Fredholm index is undefined for an operator of kind `none`")]
    NotSemiFredholm,
    #[error("index sum +inf + -inf is undefined")]
    OppositeInfinities,
    #[error("inconsistent Fredholm class: {0}")]
    InconsistentClass(&'static str),
    #[error("cannot parse count `{0}`")]
    Parse(String),
    #[error("finite count exceeds 2^64 - 1")]
    Overflow,
}

/// A dimension in ℕ₀ ∪ {∞}.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(into = "String", try_from = "String")]
pub enum ExtendedCount {
    Finite(u64),
    Infinite,
}

pub use ExtendedCount::Infinite as INFINITY;

impl ExtendedCount {
    pub const ZERO: ExtendedCount = ExtendedCount::Finite(0);

    pub fn is_finite(self) -> bool {
        matches!(self, ExtendedCount::Finite(_))
    }

    pub fn finite(self) -> Option<u64> {
        match self {
            ExtendedCount::Finite(n) => Some(n),
            ExtendedCount::Infinite => None,
        }
    }

    /// `self + rhs`, or `None` when a finite sum overflows.
    pub fn checked_add(self, rhs: ExtendedCount) -> Option<ExtendedCount> {
        match (self, rhs) {
            (ExtendedCount::Finite(a), ExtendedCount::Finite(b)) => a.checked_add(b).map(ExtendedCount::Finite),
            _ => Some(ExtendedCount::Infinite),
        }
    }

    /// `k · self` with `0 · ∞ = 0`, or `None` when a finite product overflows.
    pub fn checked_scale(self, k: u64) -> Option<ExtendedCount> {
        match self {
            ExtendedCount::Finite(n) => n.checked_mul(k).map(ExtendedCount::Finite),
            ExtendedCount::Infinite if k == 0 => Some(ExtendedCount::ZERO),
            ExtendedCount::Infinite => Some(ExtendedCount::Infinite),
        }
    }

    /// `k · self`, with `0 · ∞ = 0`.
    pub fn scale(self, k: u64) -> ExtendedCount {
        match self {
            _ if k == 0 => ExtendedCount::ZERO,
            ExtendedCount::Finite(n) => ExtendedCount::Finite(n * k),
            ExtendedCount::Infinite => ExtendedCount::Infinite,
        }
    }
}

impl From<u64> for ExtendedCount {
    fn from(n: u64) -> Self {
        ExtendedCount::Finite(n)
    }
}

impl Add for ExtendedCount {
    type Output = ExtendedCount;

    fn add(self, rhs: ExtendedCount) -> ExtendedCount {
        match (self, rhs) {
            (ExtendedCount::Finite(a), ExtendedCount::Finite(b)) => ExtendedCount::Finite(a + b),
            _ => ExtendedCount::Infinite,
        }
    }
}

impl std::iter::Sum for ExtendedCount {
    fn sum<I: Iterator<Item = ExtendedCount>>(iter: I) -> Self {
        iter.fold(ExtendedCount::ZERO, Add::add)
    }
}

impl PartialOrd for ExtendedCount {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for ExtendedCount {
    fn cmp(&self, other: &Self) -> Ordering {
        match (self, other) {
            (ExtendedCount::Finite(a), ExtendedCount::Finite(b)) => a.cmp(b),
            (ExtendedCount::Finite(_), ExtendedCount::Infinite) => Ordering::Less,
            (ExtendedCount::Infinite, ExtendedCount::Finite(_)) => Ordering::Greater,
            (ExtendedCount::Infinite, ExtendedCount::Infinite) => Ordering::Equal,
        }
    }
}

impl fmt::Display for ExtendedCount {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ExtendedCount::Finite(n) => write!(f, "{n}"),
            ExtendedCount::Infinite => f.write_str("inf"),
        }
    }
}

impl FromStr for ExtendedCount {
    type Err = IndexError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let t = s.trim();
        match t {
            "inf" | "INF" | "infinity" | "INFINITY" | "∞" => Ok(ExtendedCount::Infinite),
            _ => t.parse::<u64>().map(ExtendedCount::Finite).map_err(|_| IndexError::Parse(s.to_string())),
        }
    }
}

impl From<ExtendedCount> for String {
    fn from(c: ExtendedCount) -> String {
        c.to_string()
    }
}

impl TryFrom<String> for ExtendedCount {
    type Error = IndexError;

    fn try_from(s: String) -> Result<Self, Self::Error> {
        s.parse()
    }
}

/// Deficiency indices `(n₊, n₋)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct DefectPair {
    pub n_plus: ExtendedCount,
    pub n_minus: ExtendedCount,
}

impl DefectPair {
    pub const ZERO: DefectPair = DefectPair::finite(0, 0);

    pub const fn new(n_plus: ExtendedCount, n_minus: ExtendedCount) -> Self {
        DefectPair { n_plus, n_minus }
    }

    pub const fn finite(n_plus: u64, n_minus: u64) -> Self {
        DefectPair { n_plus: ExtendedCount::Finite(n_plus), n_minus: ExtendedCount::Finite(n_minus) }
    }

    pub fn equal_indices(&self) -> bool {
        self.n_plus == self.n_minus
    }

    pub fn swap(self) -> Self {
        DefectPair::new(self.n_minus, self.n_plus)
    }

    /// `n₊ + n₋`
    pub fn total(&self) -> ExtendedCount {
        self.n_plus + self.n_minus
    }
}

impl Add for DefectPair {
    type Output = DefectPair;

    fn add(self, rhs: DefectPair) -> DefectPair {
        DefectPair::new(self.n_plus + rhs.n_plus, self.n_minus + rhs.n_minus)
    }
}

impl fmt::Display for DefectPair {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({},{})", self.n_plus, self.n_minus)
    }
}

impl FromStr for DefectPair {
    type Err = IndexError;

    /// Accepts `a,b` with optional surrounding parentheses; `inf` is allowed.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let t = s.trim();
        let t = t.strip_prefix('(').and_then(|r| r.strip_suffix(')')).unwrap_or(t);
        let mut parts = t.split(',');
        let (Some(a), Some(b), None) = (parts.next(), parts.next(), parts.next()) else {
            return Err(IndexError::Parse(s.to_string()));
        };
        Ok(DefectPair::new(a.parse()?, b.parse()?))
    }
}

/// `defe(T₁T₂, 0) = defe(T₁, 0) + defe(T₂, 0)` for operators with 0 in their
/// field of regularity.
pub fn product_defect(d1: ExtendedCount, d2: ExtendedCount) -> ExtendedCount {
    d1 + d2
}

fn total(p: DefectPair) -> Result<ExtendedCount, IndexError> {
    p.n_plus.checked_add(p.n_minus).ok_or(IndexError::Overflow)
}

/// Indices of `S^{2k}`: both equal `k(n₊ + n₋)`.
pub fn even_power_indices(p: DefectPair, k: u64) -> Result<DefectPair, IndexError> {
    if k == 0 {
        return Err(IndexError::ZeroPower);
    }
    let n = total(p)?.checked_scale(k).ok_or(IndexError::Overflow)?;
    Ok(DefectPair::new(n, n))
}

/// Indices of `S^{2k+1}`: `k(n₊ + n₋) + n±`.
pub fn odd_power_indices(p: DefectPair, k: u64) -> Result<DefectPair, IndexError> {
    if k == 0 {
        return Err(IndexError::ZeroPower);
    }
    let base = total(p)?.checked_scale(k).ok_or(IndexError::Overflow)?;
    let add = |n: ExtendedCount| base.checked_add(n).ok_or(IndexError::Overflow);
    Ok(DefectPair::new(add(p.n_plus)?, add(p.n_minus)?))
}

/// Indices of `S^m` for any `m ≥ 1`.
pub fn power_indices(p: DefectPair, m: u64) -> Result<DefectPair, IndexError> {
    match m {
        0 => Err(IndexError::ZeroPower),
        1 => Ok(p),
        m if m % 2 == 0 => even_power_indices(p, m / 2),
        m => odd_power_indices(p, m / 2),
    }
}

/// Indices of `P(S)` for a real polynomial `P` of degree `m ≥ 1`.
///
/// A negative leading coefficient swaps the pair, since `n±(−A) = n∓(A)`.
pub fn polynomial_indices(p: DefectPair, poly: &RealPolynomial) -> Result<DefectPair, IndexError> {
    let q = power_indices(p, poly.degree() as u64)?;
    Ok(if poly.leading() > 0.0 { q } else { q.swap() })
}

/// Componentwise sum of an orthogonal direct sum. Parts beyond the slice are
/// taken to be `(0,0)`.
pub fn direct_sum_indices(parts: &[DefectPair]) -> DefectPair {
    parts.iter().fold(DefectPair::ZERO, |acc, p| acc + *p)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FredholmKind {
    Fredholm,
    LeftSemi,
    RightSemi,
    None,
}

/// Kernel and cokernel dimensions of a closed, densely defined operator.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct FredholmClass {
    kind: FredholmKind,
    dim_ker: ExtendedCount,
    dim_coker: ExtendedCount,
}

impl FredholmClass {
    pub fn new(kind: FredholmKind, dim_ker: ExtendedCount, dim_coker: ExtendedCount) -> Result<Self, IndexError> {
        let ok = match kind {
            FredholmKind::Fredholm => dim_ker.is_finite() && dim_coker.is_finite(),
            FredholmKind::LeftSemi => dim_ker.is_finite(),
            FredholmKind::RightSemi => dim_coker.is_finite(),
            FredholmKind::None => true,
        };
        if !ok {
            return Err(IndexError::InconsistentClass(match kind {
                FredholmKind::Fredholm => "Fredholm needs finite kernel and cokernel",
                FredholmKind::LeftSemi => "left semi-Fredholm needs a finite kernel",
                _ => "right semi-Fredholm needs a finite cokernel",
            }));
        }
        Ok(FredholmClass { kind, dim_ker, dim_coker })
    }

    /// Fredholm class with finite kernel and cokernel.
    pub fn fredholm(dim_ker: u64, dim_coker: u64) -> Self {
        FredholmClass { kind: FredholmKind::Fredholm, dim_ker: dim_ker.into(), dim_coker: dim_coker.into() }
    }

    pub fn kind(&self) -> FredholmKind {
        self.kind
    }

    pub fn dim_ker(&self) -> ExtendedCount {
        self.dim_ker
    }

    pub fn dim_coker(&self) -> ExtendedCount {
        self.dim_coker
    }
}

/// An element of ℤ ∪ {−∞, +∞}.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum ExtendedIndex {
    NegInfinity,
    Finite(i64),
    PosInfinity,
}

impl fmt::Display for ExtendedIndex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ExtendedIndex::NegInfinity => f.write_str("-inf"),
            ExtendedIndex::Finite(n) => write!(f, "{n}"),
            ExtendedIndex::PosInfinity => f.write_str("+inf"),
        }
    }
}

/// `ind(T) = dim ker T − dim ker T*`.
pub fn fredholm_index(c: &FredholmClass) -> Result<ExtendedIndex, IndexError> {
    if c.kind == FredholmKind::None {
        return Err(IndexError::NotSemiFredholm);
    }
    Ok(match (c.dim_ker, c.dim_coker) {
        (ExtendedCount::Finite(k), ExtendedCount::Finite(q)) => ExtendedIndex::Finite(k as i64 - q as i64),
        (ExtendedCount::Finite(_), ExtendedCount::Infinite) => ExtendedIndex::NegInfinity,
        (ExtendedCount::Infinite, ExtendedCount::Finite(_)) => ExtendedIndex::PosInfinity,
        (ExtendedCount::Infinite, ExtendedCount::Infinite) => unreachable!("rejected by constructor"),
    })
}

/// `ind(T₂T₁) = ind(T₁) + ind(T₂)`; opposite infinities never meet.
pub fn index_of_product(i1: ExtendedIndex, i2: ExtendedIndex) -> Result<ExtendedIndex, IndexError> {
    use ExtendedIndex::*;
    match (i1, i2) {
        (Finite(a), Finite(b)) => Ok(Finite(a + b)),
        (PosInfinity, NegInfinity) | (NegInfinity, PosInfinity) => Err(IndexError::OppositeInfinities),
        (PosInfinity, _) | (_, PosInfinity) => Ok(PosInfinity),
        (NegInfinity, _) | (_, NegInfinity) => Ok(NegInfinity),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn pair(a: u64, b: u64) -> DefectPair {
        DefectPair::finite(a, b)
    }

    #[test]
    fn product_defect_examples() {
        assert_eq!(product_defect(1.into(), 1.into()), 2.into());
        assert_eq!(product_defect(0.into(), 0.into()), 0.into());
        assert_eq!(product_defect(3.into(), INFINITY), INFINITY);
    }

    #[test]
    fn even_powers() {
        assert_eq!(even_power_indices(pair(1, 1), 1).unwrap(), pair(2, 2));
        assert_eq!(even_power_indices(pair(0, 0), 5).unwrap(), pair(0, 0));
        assert_eq!(even_power_indices(pair(2, 3), 2).unwrap(), pair(10, 10));
        assert_eq!(even_power_indices(pair(1, 1), 0), Err(IndexError::ZeroPower));
    }

    #[test]
    fn odd_powers() {
        assert_eq!(odd_power_indices(pair(1, 0), 1).unwrap(), pair(2, 1));
        assert_eq!(odd_power_indices(pair(0, 0), 3).unwrap(), pair(0, 0));
        assert_eq!(odd_power_indices(pair(1, 1), 1).unwrap(), pair(3, 3));
        assert!(odd_power_indices(pair(1, 1), 0).is_err());
    }

    #[test]
    fn general_powers() {
        assert_eq!(power_indices(pair(2, 2), 3).unwrap(), pair(6, 6));
        assert_eq!(power_indices(pair(1, 1), 1).unwrap(), pair(1, 1));
        assert_eq!(power_indices(pair(1, 0), 4).unwrap(), pair(2, 2));
        assert!(power_indices(pair(1, 0), 0).is_err());
        let inf = DefectPair::new(INFINITY, 0.into());
        assert_eq!(power_indices(inf, 2).unwrap(), DefectPair::new(INFINITY, INFINITY));
        assert_eq!(power_indices(inf, 3).unwrap(), DefectPair::new(INFINITY, INFINITY));
    }

    #[test]
    fn polynomial_powers() {
        let p = RealPolynomial::new(vec![3.0, 5.0, 1.0]).unwrap();
        assert_eq!(polynomial_indices(pair(1, 1), &p).unwrap(), pair(2, 2));
        let t = RealPolynomial::new(vec![0.0, 1.0]).unwrap();
        assert_eq!(polynomial_indices(pair(1, 0), &t).unwrap(), pair(1, 0));
        let c = RealPolynomial::new(vec![0.0, -1.0, 0.0, 1.0]).unwrap();
        assert_eq!(polynomial_indices(pair(1, 0), &c).unwrap(), pair(2, 1));
        let neg = RealPolynomial::new(vec![0.0, 0.0, 0.0, -2.0]).unwrap();
        assert_eq!(polynomial_indices(pair(1, 0), &neg).unwrap(), pair(1, 2));
    }

    #[test]
    fn direct_sums() {
        let parts = [pair(1, 1), pair(1, 1), pair(0, 0)];
        assert_eq!(direct_sum_indices(&parts), pair(2, 2));
        assert_eq!(direct_sum_indices(&[]), pair(0, 0));
        let inf = DefectPair::new(INFINITY, INFINITY);
        assert_eq!(direct_sum_indices(&[pair(1, 1), inf]), inf);
    }

    #[test]
    fn fredholm_indices() {
        let t4 = FredholmClass::fredholm(0, 3);
        assert_eq!(fredholm_index(&t4).unwrap(), ExtendedIndex::Finite(-3));
        assert_eq!(fredholm_index(&FredholmClass::fredholm(0, 0)).unwrap(), ExtendedIndex::Finite(0));
        let t2 = fredholm_index(&FredholmClass::fredholm(0, 1)).unwrap();
        assert_eq!(index_of_product(t2, t2).unwrap(), ExtendedIndex::Finite(-2));

        let none = FredholmClass::new(FredholmKind::None, INFINITY, INFINITY).unwrap();
        assert_eq!(fredholm_index(&none), Err(IndexError::NotSemiFredholm));
        let left = FredholmClass::new(FredholmKind::LeftSemi, 1.into(), INFINITY).unwrap();
        let right = FredholmClass::new(FredholmKind::RightSemi, INFINITY, 2.into()).unwrap();
        let (l, r) = (fredholm_index(&left).unwrap(), fredholm_index(&right).unwrap());
        assert_eq!(l, ExtendedIndex::NegInfinity);
        assert_eq!(r, ExtendedIndex::PosInfinity);
        assert_eq!(index_of_product(l, r), Err(IndexError::OppositeInfinities));
        assert_eq!(index_of_product(l, ExtendedIndex::Finite(7)).unwrap(), l);
    }

    #[test]
    fn class_invariants_enforced() {
        assert!(FredholmClass::new(FredholmKind::Fredholm, INFINITY, 0.into()).is_err());
        assert!(FredholmClass::new(FredholmKind::LeftSemi, INFINITY, 0.into()).is_err());
        assert!(FredholmClass::new(FredholmKind::RightSemi, 0.into(), INFINITY).is_err());
    }

    #[test]
    fn parsing_round_trips() {
        assert_eq!("1,1".parse::<DefectPair>().unwrap(), pair(1, 1));
        assert_eq!("(inf, 2)".parse::<DefectPair>().unwrap(), DefectPair::new(INFINITY, 2.into()));
        assert!("1".parse::<DefectPair>().is_err());
        assert!("1,2,3".parse::<DefectPair>().is_err());
        assert!("-1,2".parse::<DefectPair>().is_err());
        assert_eq!(pair(3, 4).to_string(), "(3,4)");
    }

    fn count() -> impl Strategy<Value = ExtendedCount> {
        prop_oneof![9 => (0u64..1000).prop_map(ExtendedCount::Finite), 1 => Just(INFINITY)]
    }

    fn any_pair() -> impl Strategy<Value = DefectPair> {
        (count(), count()).prop_map(|(a, b)| DefectPair::new(a, b))
    }

    #[test]
    fn overflow_is_an_error() {
        let big = pair(u64::MAX / 2, u64::MAX / 2 + 1);
        assert_eq!(power_indices(big, 2).unwrap(), pair(u64::MAX, u64::MAX));
        assert_eq!(power_indices(big, 4), Err(IndexError::Overflow));
        assert_eq!(power_indices(pair(u64::MAX, 0), 3), Err(IndexError::Overflow));
        assert_eq!(power_indices(pair(u64::MAX / 4, 0), 4).unwrap(), pair(u64::MAX / 4 * 2, u64::MAX / 4 * 2));
        assert_eq!(
            power_indices(DefectPair::new(INFINITY, 0u64.into()), 2).unwrap(),
            DefectPair::new(INFINITY, INFINITY)
        );
    }

    proptest! {
        #[test]
        fn even_powers_have_equal_indices(p in any_pair(), k in 1u64..50) {
            prop_assert!(even_power_indices(p, k).unwrap().equal_indices());
        }

        #[test]
        fn equal_index_powers_scale(n in 0u64..1000, m in 1u64..50) {
            let q = power_indices(pair(n, n), m).unwrap();
            prop_assert_eq!(q, pair(m * n, m * n));
        }

        #[test]
        fn odd_powers_keep_imbalance(a in 0u64..1000, b in 0u64..1000, k in 1u64..50) {
            let q = odd_power_indices(pair(a, b), k).unwrap();
            let (qp, qm) = (q.n_plus.finite().unwrap(), q.n_minus.finite().unwrap());
            prop_assert_eq!(qp as i64 - qm as i64, a as i64 - b as i64);
        }

        #[test]
        fn extended_addition_laws(a in count(), b in count(), c in count()) {
            prop_assert_eq!(a + b, b + a);
            prop_assert_eq!((a + b) + c, a + (b + c));
            prop_assert_eq!(a + INFINITY, INFINITY);
            prop_assert!(a <= INFINITY);
        }
    }
}
