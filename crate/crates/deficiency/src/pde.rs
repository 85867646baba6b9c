//! Index bookkeeping for `−Δ + c|x|⁻²` by spherical channels, and for the
//! singularly perturbed Dirichlet Laplacian.

use serde::Serialize;

use crate::expr::ExprError;
use crate::index::{direct_sum_indices, power_indices, DefectPair, IndexError};
use crate::params::Param;

/// Channel `τ_{n,ℓ,L,α} = −d²/dr² + [ℓ(ℓ+n−2) − L(L+n−2)] r⁻²` on `(0, ∞)`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ChannelSpec {
    pub n: u32,
    pub l: u32,
    pub big_l: u32,
    pub alpha: Param,
}

fn in_alpha_range(alpha: &Param) -> bool {
    use num_rational::BigRational;
    match &alpha.exact {
        Some(q) => *q >= BigRational::new((-1).into(), 4.into()) && *q < BigRational::new(3.into(), 4.into()),
        None => alpha.value >= -0.25 && alpha.value < 0.75,
    }
}

impl ChannelSpec {
    pub fn new(n: u32, l: u32, big_l: u32, alpha: Param) -> Result<Self, ExprError> {
        if n < 2 {
            return Err(ExprError::OutOfRange {
                name: "channel".into(),
                detail: "dimension n must be at least 2".into(),
            });
        }
        if !in_alpha_range(&alpha) {
            return Err(ExprError::OutOfRange {
                name: "channel".into(),
                detail: "alpha must lie in [-1/4, 3/4)".into(),
            });
        }
        Ok(ChannelSpec { n, l, big_l, alpha })
    }

    /// `ℓ(ℓ+n−2) − L(L+n−2)`
    pub fn coefficient(&self) -> i64 {
        channel_coefficient_unchecked(self.n, self.l, self.big_l)
    }
}

fn channel_coefficient_unchecked(n: u32, l: u32, big_l: u32) -> i64 {
    let (n, l, big_l) = (n as i64, l as i64, big_l as i64);
    l * (l + n - 2) - big_l * (big_l + n - 2)
}

pub fn channel_coefficient(n: u32, l: u32, big_l: u32) -> Result<i64, ExprError> {
    if n < 2 {
        return Err(ExprError::OutOfRange { name: "channel".into(), detail: "dimension n must be at least 2".into() });
    }
    Ok(channel_coefficient_unchecked(n, l, big_l))
}

/// `(1,1)` for `ℓ ≤ L`, else `(0,0)`. The parameter `α` does not enter.
pub fn channel_indices(spec: &ChannelSpec) -> DefectPair {
    if spec.l <= spec.big_l {
        DefectPair::finite(1, 1)
    } else {
        DefectPair::finite(0, 0)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ChannelRow {
    pub l: u32,
    pub coefficient: i64,
    pub indices: DefectPair,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DecompositionReport {
    pub n: u32,
    pub big_l: u32,
    pub alpha: Param,
    pub channels: Vec<ChannelRow>,
    /// Every channel with `ℓ` past the listed ones contributes `(0,0)`.
    pub tail_from: u32,
    pub total: DefectPair,
    pub powers: Vec<(u64, DefectPair)>,
}

pub fn decompose(n: u32, big_l: u32, alpha: Param, m_max: u64) -> Result<DecompositionReport, ExprError> {
    if m_max == 0 {
        return Err(ExprError::Invalid("m_max must be at least 1".into()));
    }
    let channels: Vec<ChannelRow> = (0..=big_l + 2)
        .map(|l| {
            let spec = ChannelSpec::new(n, l, big_l, alpha.clone())?;
            Ok(ChannelRow { l, coefficient: spec.coefficient(), indices: channel_indices(&spec) })
        })
        .collect::<Result<_, ExprError>>()?;
    let parts: Vec<DefectPair> = channels.iter().map(|c| c.indices).collect();
    let total = direct_sum_indices(&parts);
    let powers = (1..=m_max)
        .map(|m| power_indices(total, m).map(|p| (m, p)))
        .collect::<Result<_, IndexError>>()
        .map_err(|e| ExprError::Invalid(e.to_string()))?;
    Ok(DecompositionReport { n, big_l, alpha, channels, tail_from: big_l + 3, total, powers })
}

pub fn dirichlet_perturbation_indices(m: u64) -> Result<DefectPair, IndexError> {
    power_indices(DefectPair::finite(1, 1), m)
}

/// Text description of the perturbed Dirichlet Laplacian family and its
/// index data for powers up to `m_max`.
pub fn dirichlet_structure_report(m_max: u64) -> Result<String, IndexError> {
    let mut out = String::new();
    out.push_str("T_{Omega,h,k}: minimal operator of a singularly perturbed Dirichlet Laplacian\n");
    out.push_str("  base indices: (1,1); Friedrichs and Krein extensions are not constructed\n");
    for m in 1..=m_max {
        let p = dirichlet_perturbation_indices(m)?;
        out.push_str(&format!("  m={m}: n± = {p}, dim ker((T^m)^*) = {}\n", p.n_plus));
    }
    Ok(out)
}
