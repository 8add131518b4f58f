//! ℓ¹ distances to polytope and Pauli-simplex facets and the Q-parameter.

use rayon::prelude::*;
use serde::Serialize;
use thiserror::Error;

use crate::catalog::{ClassBound, ConstraintCatalog, FacetPair, GPConstraint};
use crate::rational::Rational;
use crate::spectra::{evaluate_gpc, pc_parts, polytope_membership, Spectrum, SpectrumError, Violation};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum GeometryError {
    #[error("constraint {0} has equal linear coefficients (Δκ_max = 0)")]
    DegenerateConstraint(usize),
    #[error("pair (0,0) does not index a facet")]
    BothZero,
    #[error("spectrum lies outside the polytope ({} violated constraints)", violations.len())]
    NotInPolytope { violations: Vec<Violation> },
    #[error(transparent)]
    Spectrum(#[from] SpectrumError),
}

/// `max_{i,j} |κⁱ − κʲ|` over the linear coefficients.
pub fn delta_kappa_max(constraint: &GPConstraint) -> i64 {
    let lin = constraint.linear();
    let max = lin.iter().max().copied().unwrap_or(0);
    let min = lin.iter().min().copied().unwrap_or(0);
    max - min
}

/// `dist₁(λ, F_D) = 2 D(λ) / Δκ_max` (Appendix A closed form).
pub fn dist_to_gpc_facet(constraint: &GPConstraint, spectrum: &Spectrum) -> Result<f64, GeometryError> {
    let dk = delta_kappa_max(constraint);
    if dk == 0 {
        return Err(GeometryError::DegenerateConstraint(constraint.index));
    }
    let d = evaluate_gpc(constraint, spectrum)?.value;
    Ok(2.0 * d / dk as f64)
}

/// `dist₁(λ, Σ_{r,s}) = 2 max(Σ_{i≤r}(1−λᵢ), Σ_{j>d−s} λⱼ)`.
pub fn dist_to_sigma_facet(pair: FacetPair, spectrum: &Spectrum) -> Result<f64, GeometryError> {
    if pair.r == 0 && pair.s == 0 {
        return Err(GeometryError::BothZero);
    }
    let (a, b) = pc_parts(pair, spectrum)?;
    Ok(2.0 * a.max(b))
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
#[serde(tag = "state", content = "value", rename_all = "snake_case")]
pub enum QValue {
    Finite(f64),
    /// `D_j ≤ tol` with a nonzero denominator: `Q_j = +∞`.
    Pinned,
    /// Denominator ≤ tol: the ratio has no value (e.g. `λ ∈ Σ_{r,s}`).
    Indeterminate,
}

impl QValue {
    pub fn finite(&self) -> Option<f64> {
        match self {
            QValue::Finite(q) => Some(*q),
            _ => None,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct PairBound {
    pub pair: FacetPair,
    pub c: Rational,
    pub dist: f64,
    /// `c · dist₁(λ, Σ_{r,s})`.
    pub bound: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct QEntry {
    pub index: usize,
    pub d_value: f64,
    /// `None` when Δκ_max = 0.
    pub facet_distance: Option<f64>,
    pub pair_bounds: Vec<PairBound>,
    /// Set for empty-class constraints.
    pub scalar_bound: Option<Rational>,
    pub denominator: f64,
    pub q: QValue,
    /// `D_j ≤ tol`.
    pub pinned: bool,
    pub empty_class: bool,
}

/// `Q_j(λ) = −log₁₀(D_j / max_{(r,s)} c·dist₁(λ, Σ_{r,s}))`, or with
/// denominator `c` for an empty class.
pub fn q_single(constraint: &GPConstraint, spectrum: &Spectrum, tol: f64) -> Result<QEntry, GeometryError> {
    let d_value = evaluate_gpc(constraint, spectrum)?.value;
    if d_value < -tol {
        return Err(GeometryError::NotInPolytope {
            violations: vec![Violation { kind: crate::spectra::ViolationKind::Inequality(constraint.index), value: d_value }],
        });
    }
    let facet_distance = dist_to_gpc_facet(constraint, spectrum).ok();
    let mut pair_bounds = Vec::new();
    let (denominator, scalar_bound) = match &constraint.bound {
        ClassBound::Pairs(pairs) => {
            let mut den = 0.0f64;
            for (pair, c) in pairs {
                let dist = dist_to_sigma_facet(*pair, spectrum)?;
                let bound = c.to_f64() * dist;
                den = den.max(bound);
                pair_bounds.push(PairBound { pair: *pair, c: c.clone(), dist, bound });
            }
            (den, None)
        }
        ClassBound::Scalar(c) => (c.to_f64(), Some(c.clone())),
    };
    let pinned = d_value <= tol;
    let q = if denominator <= tol {
        QValue::Indeterminate
    } else if pinned {
        QValue::Pinned
    } else {
        QValue::Finite(-(d_value / denominator).log10())
    };
    Ok(QEntry {
        index: constraint.index,
        d_value,
        facet_distance,
        pair_bounds,
        empty_class: scalar_bound.is_some(),
        scalar_bound,
        denominator,
        q,
        pinned,
    })
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct QReport {
    pub entries: Vec<QEntry>,
    /// Max over finite `Q_j`; `None` if no entry is finite.
    pub q: Option<f64>,
    /// Lowest index attaining `q`.
    pub argmax: Option<usize>,
    pub d_min: f64,
    pub d_min_index: usize,
    pub pinned: Vec<usize>,
    pub indeterminate: Vec<usize>,
}

/// Evaluates every constraint of the catalog and reduces to the overall Q.
pub fn q_overall(spectrum: &Spectrum, catalog: &ConstraintCatalog, tol: f64) -> Result<QReport, GeometryError> {
    let membership = polytope_membership(spectrum, catalog, tol)?;
    if !membership.is_member() {
        return Err(GeometryError::NotInPolytope { violations: membership.violations });
    }
    let entries: Vec<QEntry> =
        catalog.inequalities.par_iter().map(|c| q_single(c, spectrum, tol)).collect::<Result<_, _>>()?;
    let mut q: Option<(f64, usize)> = None;
    let mut d_min = (f64::INFINITY, 0);
    for e in &entries {
        if let Some(v) = e.q.finite() {
            if q.is_none_or(|(best, _)| v > best) {
                q = Some((v, e.index));
            }
        }
        if e.d_value < d_min.0 {
            d_min = (e.d_value, e.index);
        }
    }
    Ok(QReport {
        pinned: entries.iter().filter(|e| e.pinned).map(|e| e.index).collect(),
        indeterminate: entries.iter().filter(|e| e.q == QValue::Indeterminate).map(|e| e.index).collect(),
        q: q.map(|x| x.0),
        argmax: q.map(|x| x.1),
        d_min: d_min.0,
        d_min_index: d_min.1,
        entries,
    })
}
