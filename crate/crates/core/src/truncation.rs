//! Truncation of spectra to smaller settings (Appendix B).
//!
//! Freezing the first `ΔN` occupations to one and dropping the last
//! `Δd − ΔN` maps a spectrum of `(N, d)` to one of `(N−ΔN, d−Δd)`. The
//! neglected deviations `Σ_{i≤ΔN}(1−λᵢ) + Σ_{j>d−Δd+ΔN} λⱼ` bound the error
//! of every constraint value up to a factor `max|κ|`.

use serde::Serialize;
use thiserror::Error;

use crate::catalog::{load_setting, CatalogError, ConstraintCatalog, FacetPair, GPConstraint, Setting};
use crate::rational::Rational;
use crate::spectra::{compensated_sum, Spectrum};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum TruncationError {
    #[error("cannot truncate {setting} by ΔN={delta_n}, Δd={delta_d}")]
    InvalidPlan { setting: Setting, delta_n: usize, delta_d: usize },
    #[error("truncation error {error} exceeds the budget {budget}")]
    ExcessiveTruncationError { error: f64, budget: f64 },
    #[error("truncated slice violates the target setting beyond the error bound: {0}")]
    InvalidSlice(String),
    #[error("settings {small} and {big} are not related by a truncation")]
    IncompatibleSettings { small: Setting, big: Setting },
    #[error("no known setting is reachable within the budget {budget}")]
    NoFeasiblePlan { budget: f64 },
    #[error("spectrum setting {found} differs from the plan source {expected}")]
    SettingMismatch { expected: Setting, found: Setting },
    #[error(transparent)]
    Catalog(#[from] CatalogError),
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct TruncationPlan {
    pub source: Setting,
    /// Leading occupations frozen to one.
    pub delta_n: usize,
    /// Total reduction of the dimension.
    pub delta_d: usize,
    pub target: Setting,
    /// `ℓ¹` mass of the neglected deviations; zero until applied to a spectrum.
    pub error_bound: f64,
}

impl TruncationPlan {
    pub fn new(source: Setting, delta_n: usize, delta_d: usize) -> Result<Self, TruncationError> {
        let invalid = || TruncationError::InvalidPlan { setting: source, delta_n, delta_d };
        if delta_d < delta_n || delta_n >= source.n_particles() || delta_d >= source.dim() {
            return Err(invalid());
        }
        let target = Setting::new(source.n_particles() - delta_n, source.dim() - delta_d).map_err(|_| invalid())?;
        Ok(Self { source, delta_n, delta_d, target, error_bound: 0.0 })
    }

    /// The plan mapping `big` onto `small`, if one exists.
    pub fn between(big: Setting, small: Setting) -> Result<Self, TruncationError> {
        let incompatible = || TruncationError::IncompatibleSettings { small, big };
        let delta_n = big.n_particles().checked_sub(small.n_particles()).ok_or_else(incompatible)?;
        let delta_d = big.dim().checked_sub(small.dim()).ok_or_else(incompatible)?;
        Self::new(big, delta_n, delta_d).map_err(|_| incompatible())
    }

    /// Number of trailing occupations dropped, `Δd − ΔN`.
    pub fn dropped_tail(&self) -> usize {
        self.delta_d - self.delta_n
    }

    /// Shift of the class pairs: `(r, s) ↦ (r + ΔN, s + Δd − ΔN)`.
    pub fn shift_pair(&self, pair: FacetPair) -> FacetPair {
        FacetPair { r: pair.r + self.delta_n, s: pair.s + self.dropped_tail() }
    }

    /// Neglected deviations of `λ` under this plan.
    pub fn error_of(&self, values: &[f64]) -> f64 {
        let d = values.len();
        compensated_sum(
            values[..self.delta_n].iter().map(|l| 1.0 - l).chain(values[d - self.dropped_tail()..].iter().copied()),
        )
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Truncation {
    pub plan: TruncationPlan,
    /// Raw middle slice; not renormalized.
    pub spectrum: Spectrum,
}

/// Applies `plan` to `spectrum`, rejecting it if the error exceeds `budget`.
pub fn truncate(spectrum: &Spectrum, plan: TruncationPlan, budget: Option<f64>, tol: f64) -> Result<Truncation, TruncationError> {
    if spectrum.setting() != plan.source {
        return Err(TruncationError::SettingMismatch { expected: plan.source, found: spectrum.setting() });
    }
    let values = spectrum.values();
    let error = plan.error_of(values);
    if let Some(budget) = budget {
        if error > budget {
            return Err(TruncationError::ExcessiveTruncationError { error, budget });
        }
    }
    let slice: Vec<f64> = values[plan.delta_n..values.len() - plan.dropped_tail()].to_vec();
    let slack = tol + error;
    if let Some(v) = slice.iter().find(|v| **v < -slack || **v > 1.0 + slack) {
        return Err(TruncationError::InvalidSlice(format!("entry {v} outside [0, 1]")));
    }
    let sum = compensated_sum(slice.iter().copied());
    let n = plan.target.n_particles() as f64;
    if (sum - n).abs() > slack {
        return Err(TruncationError::InvalidSlice(format!("slice sums to {sum}, target N = {n}")));
    }
    Ok(Truncation {
        plan: TruncationPlan { error_bound: error, ..plan },
        spectrum: Spectrum::from_parts_unchecked(plan.target, slice),
    })
}

/// Picks the smallest known target reachable within `budget`: candidates
/// are ordered by target dimension, then error, then larger `N′`.
pub fn auto_truncate(spectrum: &Spectrum, budget: f64, tol: f64) -> Result<Truncation, TruncationError> {
    let source = spectrum.setting();
    let mut candidates: Vec<(TruncationPlan, f64)> = Setting::KNOWN
        .iter()
        .filter_map(|t| {
            if *t == source {
                return Some(TruncationPlan { source, delta_n: 0, delta_d: 0, target: source, error_bound: 0.0 });
            }
            TruncationPlan::between(source, *t).ok()
        })
        .map(|p| (p, p.error_of(spectrum.values())))
        .filter(|(_, e)| *e <= budget)
        .collect();
    candidates.sort_by(|(a, ea), (b, eb)| {
        a.target
            .dim()
            .cmp(&b.target.dim())
            .then(ea.total_cmp(eb))
            .then(b.target.n_particles().cmp(&a.target.n_particles()))
    });
    let (plan, _) = candidates.into_iter().next().ok_or(TruncationError::NoFeasiblePlan { budget })?;
    if plan.delta_d == 0 {
        return Ok(Truncation { plan, spectrum: spectrum.clone() });
    }
    truncate(spectrum, plan, Some(budget), tol)
}

/// Affine form of `D` on the face `λ₁=…=λ_{ΔN}=1`, trailing zeros, in the
/// coordinates of the target setting: `(κ⁰ + Σ_{i≤ΔN} κⁱ, κ^{ΔN+1}, …)`.
pub fn restrict(constraint: &GPConstraint, plan: &TruncationPlan) -> Vec<i64> {
    let lin = constraint.linear();
    let k0 = constraint.constant() + lin[..plan.delta_n].iter().sum::<i64>();
    std::iter::once(k0).chain(lin[plan.delta_n..plan.delta_n + plan.target.dim()].iter().copied()).collect()
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Extension {
    /// Index of the big-setting constraint.
    pub index: usize,
    /// The restriction equals the small constraint coefficient by coefficient.
    pub exact: bool,
    /// `μ` with `restriction − small = μ (Σλ′ − N′)`; zero when exact.
    pub normalization_shift: Rational,
}

/// Big-setting constraints whose restriction equals `small` as a function
/// on the target hyperplane `Σλ′ = N′`.
pub fn find_extension(small: &GPConstraint, big: &ConstraintCatalog) -> Result<Vec<Extension>, TruncationError> {
    let plan = TruncationPlan::between(big.setting, small.setting)?;
    let n_small = small.setting.n_particles() as i64;
    let mut out = Vec::new();
    for c in &big.inequalities {
        let r = restrict(c, &plan);
        let diff: Vec<i64> = r.iter().zip(&small.coeffs).map(|(a, b)| a - b).collect();
        let mu = diff[1];
        if diff[1..].iter().all(|&x| x == mu) && diff[0] == -mu * n_small {
            out.push(Extension { index: c.index, exact: mu == 0, normalization_shift: Rational::from_integer(mu) });
        }
    }
    Ok(out)
}

/// [`find_extension`] against the embedded catalog of `big`.
pub fn find_extension_in(small: &GPConstraint, big: Setting) -> Result<Vec<Extension>, TruncationError> {
    find_extension(small, load_setting(big)?)
}

/// `max|κⁱ|` over the linear coefficients: `|D(λ) − D′(λ′)| ≤ max|κ| · error`.
pub fn max_abs_kappa(constraint: &GPConstraint) -> i64 {
    constraint.linear().iter().map(|k| k.abs()).max().unwrap_or(0)
}
