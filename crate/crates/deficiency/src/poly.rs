//! Real polynomials and the roots of `P(z) ∓ iε`.
//!
//! For real `P` with simple real roots and small `ε > 0`, the roots of
//! `P − iε` split between the half-planes as `(k,k)` in degree `2k` and
//! `(k,k−1)` in degree `2k−1`; each real root `z₀` moves to first order to
//! `z₀ + iε/P′(z₀)`.

use std::fmt;
use std::str::FromStr;

use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::Serialize;
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum PolyError {
    #[error("polynomial must have degree at least 1")]
    DegreeTooLow,
    #[error("coefficients must be finite")]
    NonFinite,
    #[error("root iteration did not converge (best residual {best_residual:.3e})")]
    NoConvergence { best_residual: f64 },
    #[error("epsilon must be positive, got {0}")]
    NonPositiveEpsilon(f64),
    #[error("{z0} is not a root (|P(z0)| = {residual:.3e})")]
    NotARoot { z0: f64, residual: f64 },
    #[error("{z0} is not a simple root (|P'(z0)| = {derivative:.3e})")]
    NotSimple { z0: f64, derivative: f64 },
    #[error("no shift c within the search budget gives simple roots")]
    NoSimpleShift,
    #[error("polynomial has a repeated root; the safe epsilon is undefined")]
    RepeatedRoot,
    #[error("epsilon grid must be nonempty, positive and strictly increasing")]
    BadGrid,
    #[error("ambiguous root continuation at eps = {epsilon:.3e}; {suggestion}")]
    Ambiguous { epsilon: f64, suggestion: String },
    #[error("cannot parse polynomial `{0}`")]
    Parse(String),
}

/// `a₀ + a₁t + … + a_m t^m` with `a_m ≠ 0`, `m ≥ 1`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RealPolynomial {
    coefficients: Vec<f64>,
}

impl RealPolynomial {
    /// Trailing zero coefficients are dropped before the degree check.
    pub fn new(mut coefficients: Vec<f64>) -> Result<Self, PolyError> {
        if coefficients.iter().any(|c| !c.is_finite()) {
            return Err(PolyError::NonFinite);
        }
        while coefficients.last() == Some(&0.0) {
            coefficients.pop();
        }
        if coefficients.len() < 2 {
            return Err(PolyError::DegreeTooLow);
        }
        Ok(RealPolynomial { coefficients })
    }

    /// `t^m`
    pub fn monomial(m: usize) -> Result<Self, PolyError> {
        let mut c = vec![0.0; m + 1];
        c[m] = 1.0;
        RealPolynomial::new(c)
    }

    pub fn coefficients(&self) -> &[f64] {
        &self.coefficients
    }

    pub fn degree(&self) -> usize {
        self.coefficients.len() - 1
    }

    pub fn leading(&self) -> f64 {
        self.coefficients[self.degree()]
    }

    pub fn eval(&self, t: f64) -> f64 {
        self.coefficients.iter().rev().fold(0.0, |acc, &c| acc * t + c)
    }

    pub fn eval_complex(&self, z: Complex64) -> Complex64 {
        horner(&self.complex_coefficients(), z)
    }

    /// Coefficients of `P′`.
    pub fn derivative(&self) -> Vec<f64> {
        self.coefficients.iter().enumerate().skip(1).map(|(k, &c)| k as f64 * c).collect()
    }

    pub fn eval_derivative(&self, t: f64) -> f64 {
        self.derivative().iter().rev().fold(0.0, |acc, &c| acc * t + c)
    }

    pub fn add_constant(&self, c: f64) -> RealPolynomial {
        let mut coefficients = self.coefficients.clone();
        coefficients[0] += c;
        RealPolynomial { coefficients }
    }

    /// Typical root magnitude read off the coefficients:
    /// `max(1, maxₖ |aₖ/a_m|^{1/(m−k)})`.
    pub fn root_scale(&self) -> f64 {
        let m = self.degree();
        let lead = self.leading().abs();
        (0..m).map(|k| (self.coefficients[k].abs() / lead).powf(1.0 / (m - k) as f64)).fold(1.0, f64::max)
    }

    fn complex_coefficients(&self) -> Vec<Complex64> {
        self.coefficients.iter().map(|&c| Complex64::new(c, 0.0)).collect()
    }

    /// Coefficients of `P ∓ iε`.
    fn shifted(&self, epsilon: f64, sign: Sign) -> Vec<Complex64> {
        let mut c = self.complex_coefficients();
        c[0] -= Complex64::new(0.0, sign.factor() * epsilon);
        c
    }
}

impl fmt::Display for RealPolynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        for (k, &c) in self.coefficients.iter().enumerate().rev() {
            if c == 0.0 {
                continue;
            }
            let sign = if c < 0.0 { "-" } else { "+" };
            if first {
                if c < 0.0 {
                    f.write_str("-")?;
                }
            } else {
                write!(f, " {sign} ")?;
            }
            first = false;
            let a = c.abs();
            let show_coeff = a != 1.0 || k == 0;
            if show_coeff {
                write!(f, "{a}")?;
            }
            match k {
                0 => {}
                1 => f.write_str("t")?,
                _ => write!(f, "t^{k}")?,
            }
        }
        Ok(())
    }
}

impl FromStr for RealPolynomial {
    type Err = PolyError;

    /// Comma-separated coefficients `a0,a1,…,am`.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let coefficients = s
            .split(',')
            .map(|p| p.trim().parse::<f64>())
            .collect::<Result<Vec<_>, _>>()
            .map_err(|_| PolyError::Parse(s.to_string()))?;
        RealPolynomial::new(coefficients)
    }
}

/// Which perturbation: `plus` means `P − iε`, `minus` means `P + iε`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Sign {
    Plus,
    Minus,
}

impl Sign {
    fn factor(self) -> f64 {
        match self {
            Sign::Plus => 1.0,
            Sign::Minus => -1.0,
        }
    }
}

impl FromStr for Sign {
    type Err = PolyError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "plus" | "+" => Ok(Sign::Plus),
            "minus" | "-" => Ok(Sign::Minus),
            _ => Err(PolyError::Parse(s.to_string())),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RootSet {
    pub roots: Vec<Complex64>,
    pub residual_bound: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct HalfPlaneCount {
    pub in_upper: usize,
    pub in_lower: usize,
    pub on_axis: usize,
    pub epsilon: f64,
}

impl HalfPlaneCount {
    pub fn swap(self) -> Self {
        HalfPlaneCount { in_upper: self.in_lower, in_lower: self.in_upper, ..self }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum HalfPlane {
    Upper,
    Lower,
    Axis,
}

pub const DEFAULT_TOL: f64 = 1e-12;
const MAX_ITER: usize = 500;

fn horner(c: &[Complex64], z: Complex64) -> Complex64 {
    c.iter().rev().fold(Complex64::new(0.0, 0.0), |acc, &a| acc * z + a)
}

fn horner_with_derivative(c: &[Complex64], z: Complex64) -> (Complex64, Complex64) {
    let zero = Complex64::new(0.0, 0.0);
    c.iter().rev().fold((zero, zero), |(p, dp), &a| (p * z + a, dp * z + p))
}

/// `|P(z)| / Σ|aₖ||z|ᵏ`, the relative backward error of a root.
fn backward_error(c: &[Complex64], z: Complex64) -> f64 {
    let r = z.norm();
    let scale = c.iter().rev().fold(0.0, |acc, a| acc * r + a.norm());
    if scale == 0.0 {
        0.0
    } else {
        horner(c, z).norm() / scale
    }
}

fn residual_bound(c: &[Complex64], roots: &[Complex64]) -> f64 {
    roots.iter().map(|&z| backward_error(c, z)).fold(0.0, f64::max)
}

fn sort_roots(roots: &mut [Complex64]) {
    roots.sort_by(|a, b| a.re.total_cmp(&b.re).then(a.im.total_cmp(&b.im)));
}

/// Simultaneous Aberth–Ehrlich iteration from a fixed circle.
fn aberth(c: &[Complex64]) -> Option<Vec<Complex64>> {
    let m = c.len() - 1;
    let lead = c[m].norm();
    let radius = (0..m)
        .filter(|&k| c[k].norm() > 0.0)
        .map(|k| (c[k].norm() / lead).powf(1.0 / (m - k) as f64))
        .fold(0.0, f64::max)
        .max(f64::MIN_POSITIVE.sqrt());
    let mut z: Vec<Complex64> = (0..m)
        .map(|k| {
            let theta = std::f64::consts::TAU * k as f64 / m as f64 + 0.4;
            Complex64::from_polar(radius, theta)
        })
        .collect();
    let mut settled = 0;
    for _ in 0..MAX_ITER {
        let mut largest_step = 0.0f64;
        for i in 0..m {
            let (p, dp) = horner_with_derivative(c, z[i]);
            if p.norm() == 0.0 {
                continue;
            }
            let ratio = p / dp;
            let repulsion: Complex64 = (0..m).filter(|&j| j != i).map(|j| (z[i] - z[j]).inv()).sum();
            let step = ratio / (Complex64::new(1.0, 0.0) - ratio * repulsion);
            if !step.re.is_finite() || !step.im.is_finite() {
                return None;
            }
            z[i] -= step;
            largest_step = largest_step.max(step.norm() / z[i].norm().max(radius));
        }
        if largest_step < 4.0 * f64::EPSILON {
            settled += 1;
            if settled >= 2 {
                return Some(z);
            }
        }
    }
    let converged = z.iter().all(|&r| backward_error(c, r) < 1e-10);
    converged.then_some(z)
}

/// Eigenvalues of the companion matrix of `c`, or `None` if the QR
/// iteration stalls.
pub fn companion_roots(c: &[Complex64]) -> Option<Vec<Complex64>> {
    let m = c.len() - 1;
    let mut a = DMatrix::<Complex64>::zeros(m, m);
    for i in 1..m {
        a[(i, i - 1)] = Complex64::new(1.0, 0.0);
    }
    for i in 0..m {
        a[(i, m - 1)] = -c[i] / c[m];
    }
    let schur = nalgebra::Schur::try_new(a, f64::EPSILON, 100 * m)?;
    let (_, t) = schur.unpack();
    let mut roots: Vec<Complex64> = (0..m).map(|i| t[(i, i)]).collect();
    sort_roots(&mut roots);
    Some(roots)
}

fn newton_polish(c: &[Complex64], z: &mut [Complex64]) {
    for r in z.iter_mut() {
        for _ in 0..3 {
            let (p, dp) = horner_with_derivative(c, *r);
            if dp.norm() == 0.0 {
                break;
            }
            let next = *r - p / dp;
            if backward_error(c, next) <= backward_error(c, *r) {
                *r = next;
            } else {
                break;
            }
        }
    }
}

/// Roots of a complex-coefficient polynomial, sorted by `(Re, Im)`.
pub fn find_complex_roots(c: &[Complex64], tol: f64) -> Result<RootSet, PolyError> {
    if c.iter().any(|a| !a.re.is_finite() || !a.im.is_finite()) {
        return Err(PolyError::NonFinite);
    }
    let m = c.len().saturating_sub(1);
    if m == 0 || c[m].norm() == 0.0 {
        return Err(PolyError::DegreeTooLow);
    }
    if m == 1 {
        let roots = vec![-c[0] / c[1]];
        let residual_bound = residual_bound(c, &roots);
        return Ok(RootSet { roots, residual_bound });
    }
    let mut best: Option<RootSet> = None;
    for attempt in [aberth(c), companion_roots(c)].into_iter().flatten() {
        let mut roots = attempt;
        newton_polish(c, &mut roots);
        sort_roots(&mut roots);
        let residual_bound = residual_bound(c, &roots);
        if residual_bound <= tol {
            return Ok(RootSet { roots, residual_bound });
        }
        if best.as_ref().is_none_or(|b| residual_bound < b.residual_bound) {
            best = Some(RootSet { roots, residual_bound });
        }
    }
    Err(PolyError::NoConvergence { best_residual: best.map_or(f64::INFINITY, |b| b.residual_bound) })
}

/// All `m` roots of `p` with multiplicity; `residual_bound` is the largest
/// relative backward error over the returned roots.
pub fn find_roots(p: &RealPolynomial, tol: f64) -> Result<RootSet, PolyError> {
    find_complex_roots(&p.complex_coefficients(), tol)
}

/// Roots of `P ∓ iε` leave the axis by about `ε/|P′|`; the band stays well
/// inside that distance.
fn axis_band(p: &RealPolynomial, epsilon: f64) -> f64 {
    let r = p.root_scale();
    let bound: f64 = p.derivative().iter().enumerate().map(|(k, c)| c.abs() * r.powi(k as i32)).sum();
    (1e-12 * r).min(1e-3 * epsilon / bound.max(f64::MIN_POSITIVE))
}

fn classify(z: Complex64, band: f64) -> HalfPlane {
    if z.im > band {
        HalfPlane::Upper
    } else if z.im < -band {
        HalfPlane::Lower
    } else {
        HalfPlane::Axis
    }
}

fn count(roots: &[Complex64], band: f64, epsilon: f64) -> HalfPlaneCount {
    let mut c = HalfPlaneCount { in_upper: 0, in_lower: 0, on_axis: 0, epsilon };
    for &z in roots {
        match classify(z, band) {
            HalfPlane::Upper => c.in_upper += 1,
            HalfPlane::Lower => c.in_lower += 1,
            HalfPlane::Axis => c.on_axis += 1,
        }
    }
    c
}

/// Roots of `P ∓ iε` (as selected by `sign`).
pub fn perturbed_roots(p: &RealPolynomial, epsilon: f64, sign: Sign) -> Result<RootSet, PolyError> {
    find_complex_roots(&p.shifted(epsilon, sign), DEFAULT_TOL)
}

/// Half-plane distribution of the roots of `P ∓ iε`.
pub fn halfplane_counts(p: &RealPolynomial, epsilon: f64, sign: Sign) -> Result<HalfPlaneCount, PolyError> {
    if !(epsilon > 0.0) {
        return Err(PolyError::NonPositiveEpsilon(epsilon));
    }
    let roots = perturbed_roots(p, epsilon, sign)?;
    Ok(count(&roots.roots, axis_band(p, epsilon), epsilon))
}

/// The half-plane split predicted for small `ε`, simple real roots and
/// positive leading coefficient.
pub fn predicted_counts(degree: usize, sign: Sign) -> (usize, usize) {
    let k = degree.div_ceil(2);
    match (degree % 2, sign) {
        (0, _) => (k, k),
        (_, Sign::Plus) => (k, k - 1),
        (_, Sign::Minus) => (k - 1, k),
    }
}

fn simple_root_check(p: &RealPolynomial, z0: f64) -> Result<f64, PolyError> {
    let scale: f64 = p.coefficients().iter().enumerate().map(|(k, c)| c.abs() * z0.abs().powi(k as i32)).sum();
    let residual = p.eval(z0).abs();
    if residual > 1e-9 * scale.max(f64::MIN_POSITIVE) {
        return Err(PolyError::NotARoot { z0, residual });
    }
    let derivative = p.eval_derivative(z0);
    if derivative.abs() <= 1e-9 * scale.max(1.0) {
        return Err(PolyError::NotSimple { z0, derivative: derivative.abs() });
    }
    Ok(derivative)
}

/// First-order position `z₀ + iε/P′(z₀)` of the root of `P − iε` that
/// emanates from the simple real root `z₀`.
pub fn first_order_root_shift(p: &RealPolynomial, z0: f64, epsilon: f64) -> Result<Complex64, PolyError> {
    let d = simple_root_check(p, z0)?;
    Ok(Complex64::new(z0, epsilon / d))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ShiftCheck {
    pub predicted: Complex64,
    pub actual: Complex64,
    pub error: f64,
}

/// Compares the first-order predictor against the nearest true root of
/// `P − iε`, refined by Newton's method from the predictor.
pub fn root_shift_check(p: &RealPolynomial, z0: f64, epsilon: f64) -> Result<ShiftCheck, PolyError> {
    let predicted = first_order_root_shift(p, z0, epsilon)?;
    let c = p.shifted(epsilon, Sign::Plus);
    let roots = find_complex_roots(&c, DEFAULT_TOL)?;
    let mut actual = roots
        .roots
        .iter()
        .copied()
        .min_by(|a, b| (a - predicted).norm().total_cmp(&(b - predicted).norm()))
        .expect("degree >= 1");
    for _ in 0..4 {
        let (v, dv) = horner_with_derivative(&c, actual);
        if dv.norm() == 0.0 {
            break;
        }
        actual -= v / dv;
    }
    Ok(ShiftCheck { predicted, actual, error: (actual - predicted).norm() })
}

fn min_separation(roots: &[Complex64]) -> f64 {
    let mut sep = f64::INFINITY;
    for i in 0..roots.len() {
        for j in i + 1..roots.len() {
            sep = sep.min((roots[i] - roots[j]).norm());
        }
    }
    sep
}

/// Largest `ε` treated as "small": `ρ · minⱼ |P′(zⱼ)| · sep / 2` over the
/// roots `zⱼ` of `P`, `sep` being their minimal pairwise distance.
pub fn epsilon_safe(p: &RealPolynomial, rho: f64) -> Result<f64, PolyError> {
    let roots = find_roots(p, DEFAULT_TOL)?.roots;
    let dp: Vec<Complex64> = p.derivative().iter().map(|&c| Complex64::new(c, 0.0)).collect();
    let min_dp = roots.iter().map(|&z| horner(&dp, z).norm()).fold(f64::INFINITY, f64::min);
    let sep = if roots.len() > 1 { min_separation(&roots) } else { 1.0 };
    if !(min_dp > 0.0 && sep > 1e-6 * p.root_scale()) {
        return Err(PolyError::RepeatedRoot);
    }
    Ok(rho * min_dp * sep / 2.0)
}

/// Returns `(p + c, c)` with `p + c` having pairwise distinct roots; `c = 0`
/// when `p` already qualifies.
pub fn make_simple(p: &RealPolynomial) -> Result<(RealPolynomial, f64), PolyError> {
    let scale = p.root_scale();
    let simple = |q: &RealPolynomial| -> Result<bool, PolyError> {
        let roots = find_roots(q, 1e-9)?.roots;
        Ok(min_separation(&roots) > 1e-6 * scale)
    };
    if simple(p)? {
        return Ok((p.clone(), 0.0));
    }
    let magnitude = p.leading().abs() * scale.powi(p.degree() as i32);
    for k in 1..=200 {
        let sign = if k % 2 == 1 { -1.0 } else { 1.0 };
        let c = sign * magnitude * 0.0731 * k as f64;
        let q = p.add_constant(c);
        if simple(&q)? {
            return Ok((q, c));
        }
    }
    Err(PolyError::NoSimpleShift)
}

#[derive(Debug, Clone, Serialize)]
pub struct RootPath {
    pub points: Vec<Complex64>,
    pub half_planes: Vec<HalfPlane>,
}

impl RootPath {
    pub fn confined(&self) -> bool {
        self.half_planes.windows(2).all(|w| w[0] == w[1])
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct TrackReport {
    pub sign: Sign,
    pub eps_grid: Vec<f64>,
    pub paths: Vec<RootPath>,
    pub counts: Vec<HalfPlaneCount>,
}

impl TrackReport {
    /// No path changes half-plane.
    pub fn confined(&self) -> bool {
        self.paths.iter().all(RootPath::confined)
    }
}

const REFINE_BUDGET: usize = 4096;

/// Assigns each of `prev` to a distinct element of `next` when every nearest
/// neighbour is clearly closer than the runner-up.
fn unambiguous_match(prev: &[Complex64], next: &[Complex64]) -> Option<Vec<Complex64>> {
    let mut used = vec![false; next.len()];
    let mut out = Vec::with_capacity(prev.len());
    for &a in prev {
        let mut order: Vec<usize> = (0..next.len()).collect();
        order.sort_by(|&i, &j| {
            (next[i] - a)
                .norm()
                .total_cmp(&(next[j] - a).norm())
                .then(next[i].re.total_cmp(&next[j].re))
                .then(next[i].im.total_cmp(&next[j].im))
        });
        let best = order[0];
        let d1 = (next[best] - a).norm();
        if let Some(&second) = order.get(1) {
            if (next[second] - a).norm() < 3.0 * d1 {
                return None;
            }
        }
        if used[best] {
            return None;
        }
        used[best] = true;
        out.push(next[best]);
    }
    Some(out)
}

/// Carries `prev` (roots at `e0`) to `e1`, inserting geometric midpoints
/// until every step is unambiguous.
fn continue_roots(
    p: &RealPolynomial,
    sign: Sign,
    prev: &[Complex64],
    e0: f64,
    e1: f64,
) -> Result<Vec<Complex64>, PolyError> {
    let mut current = prev.to_vec();
    let mut from = e0;
    let mut targets = vec![e1];
    let mut solves = 0;
    while let Some(&to) = targets.last() {
        solves += 1;
        if solves > REFINE_BUDGET {
            return Err(PolyError::Ambiguous {
                epsilon: to,
                suggestion: format!("refine the grid between {from:.3e} and {to:.3e}"),
            });
        }
        let next = perturbed_roots(p, to, sign)?.roots;
        match unambiguous_match(&current, &next) {
            Some(m) => {
                current = m;
                from = to;
                targets.pop();
            }
            None => targets.push((from * to).sqrt()),
        }
    }
    Ok(current)
}

/// Follows every root of `P ∓ iε` across `eps_grid`, refining internally
/// between grid points until nearest-neighbour matching is unambiguous.
pub fn track_roots(p: &RealPolynomial, sign: Sign, eps_grid: &[f64]) -> Result<TrackReport, PolyError> {
    let increasing = eps_grid.windows(2).all(|w| w[0] < w[1]);
    if eps_grid.is_empty() || !increasing || !(eps_grid[0] > 0.0) {
        return Err(PolyError::BadGrid);
    }
    let band = axis_band(p, eps_grid[0]);
    let mut current = perturbed_roots(p, eps_grid[0], sign)?.roots;
    let mut paths: Vec<RootPath> =
        current.iter().map(|&z| RootPath { points: vec![z], half_planes: vec![classify(z, band)] }).collect();
    let mut counts = vec![count(&current, band, eps_grid[0])];
    for w in eps_grid.windows(2) {
        current = continue_roots(p, sign, &current, w[0], w[1])?;
        for (path, &z) in paths.iter_mut().zip(&current) {
            path.points.push(z);
            path.half_planes.push(classify(z, band));
        }
        counts.push(count(&current, band, w[1]));
    }
    Ok(TrackReport { sign, eps_grid: eps_grid.to_vec(), paths, counts })
}

/// Minimal-total-distance bijection between two root multisets; returns the
/// largest matched distance.
pub fn match_roots(a: &[Complex64], b: &[Complex64]) -> f64 {
    assert_eq!(a.len(), b.len(), "root sets must have equal size");
    let n = a.len();
    if n == 0 {
        return 0.0;
    }
    if n > 16 {
        let mut x = a.to_vec();
        let mut y = b.to_vec();
        sort_roots(&mut x);
        sort_roots(&mut y);
        return x.iter().zip(&y).map(|(p, q)| (p - q).norm()).fold(0.0, f64::max);
    }
    let full = 1usize << n;
    // cost[mask] = (total, max) for matching a[0..popcount] into the set `mask` of b
    let mut best = vec![(f64::INFINITY, 0.0f64); full];
    best[0] = (0.0, 0.0);
    for mask in 0..full {
        let (total, worst) = best[mask];
        if !total.is_finite() {
            continue;
        }
        let i = mask.count_ones() as usize;
        if i == n {
            continue;
        }
        for (j, bj) in b.iter().enumerate() {
            if mask & (1 << j) == 0 {
                let d = (a[i] - bj).norm();
                let next = mask | (1 << j);
                let cand = (total + d, worst.max(d));
                if cand.0 < best[next].0 {
                    best[next] = cand;
                }
            }
        }
    }
    best[full - 1].1
}
