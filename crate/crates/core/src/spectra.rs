//! Validation of occupation spectra and evaluation of constraint functionals.

use serde::Serialize;
use thiserror::Error;

use crate::catalog::{ConstraintCatalog, FacetPair, GPConstraint, Setting};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SpectrumError {
    #[error("spectrum has {found} entries, setting {setting} needs {expected}")]
    WrongLength { setting: Setting, expected: usize, found: usize },
    #[error("entries {index} and {} are not decreasing ({a} < {b})", index + 1)]
    NotOrdered { index: usize, a: f64, b: f64 },
    #[error("entries sum to {sum}, expected {expected}")]
    NotNormalized { sum: f64, expected: usize },
    #[error("entry {index} = {value} lies outside [0, 1]")]
    OutOfRange { index: usize, value: f64 },
    #[error("setting mismatch: expected {expected}, found {found}")]
    SettingMismatch { expected: Setting, found: Setting },
    #[error("invalid pair {pair} for setting {setting}")]
    InvalidPair { pair: FacetPair, setting: Setting },
}

/// Decreasingly ordered natural occupation numbers summing to `N`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Spectrum {
    setting: Setting,
    values: Vec<f64>,
}

impl Spectrum {
    pub fn setting(&self) -> Setting {
        self.setting
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn into_values(self) -> Vec<f64> {
        self.values
    }

    /// `(1,…,1,0,…,0)`.
    pub fn hartree_fock(setting: Setting) -> Self {
        let mut values = vec![0.0; setting.dim()];
        values[..setting.n_particles()].fill(1.0);
        Self { setting, values }
    }

    /// Wraps values without validation; callers guarantee the invariants up
    /// to an enlarged tolerance (used by truncation).
    pub(crate) fn from_parts_unchecked(setting: Setting, values: Vec<f64>) -> Self {
        Self { setting, values }
    }
}

/// Validates `raw` as a spectrum of `setting`.
///
/// Entries within `tol` of 0 or 1 are clamped first. Adjacent entries that
/// are out of order by less than `tol` are swapped back into order (tie
/// repair); larger ordering violations are errors.
pub fn validate_spectrum(raw: &[f64], setting: Setting, tol: f64) -> Result<Spectrum, SpectrumError> {
    let d = setting.dim();
    if raw.len() != d {
        return Err(SpectrumError::WrongLength { setting, expected: d, found: raw.len() });
    }
    let mut values = Vec::with_capacity(d);
    for (index, &v) in raw.iter().enumerate() {
        if !v.is_finite() || v < -tol || v > 1.0 + tol {
            return Err(SpectrumError::OutOfRange { index, value: v });
        }
        values.push(if v.abs() <= tol {
            0.0
        } else if (v - 1.0).abs() <= tol {
            1.0
        } else {
            v
        });
    }
    for index in 0..d - 1 {
        let (a, b) = (values[index], values[index + 1]);
        if b - a > tol {
            return Err(SpectrumError::NotOrdered { index: index + 1, a, b });
        }
    }
    if values.windows(2).any(|w| w[0] < w[1]) {
        values.sort_by(|a, b| b.total_cmp(a));
    }
    let sum = compensated_sum(values.iter().copied());
    let n = setting.n_particles();
    if (sum - n as f64).abs() > tol {
        return Err(SpectrumError::NotNormalized { sum, expected: n });
    }
    Ok(Spectrum { setting, values })
}

/// Neumaier's compensated summation.
pub fn compensated_sum(terms: impl IntoIterator<Item = f64>) -> f64 {
    let mut sum = 0.0f64;
    let mut comp = 0.0f64;
    for x in terms {
        let t = sum + x;
        if sum.abs() >= x.abs() {
            comp += (sum - t) + x;
        } else {
            comp += (x - t) + sum;
        }
        sum = t;
    }
    sum + comp
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct ConstraintValue {
    pub constraint_index: usize,
    pub value: f64,
}

fn check_setting(expected: Setting, found: Setting) -> Result<(), SpectrumError> {
    if expected != found {
        return Err(SpectrumError::SettingMismatch { expected, found });
    }
    Ok(())
}

/// `D_j(λ) = κ⁰ + Σ κⁱ λᵢ` evaluated with compensated summation.
pub fn evaluate_gpc(constraint: &GPConstraint, spectrum: &Spectrum) -> Result<ConstraintValue, SpectrumError> {
    check_setting(constraint.setting, spectrum.setting)?;
    Ok(ConstraintValue { constraint_index: constraint.index, value: affine_value(&constraint.coeffs, &spectrum.values) })
}

/// `κ⁰ + Σ κⁱ λᵢ` for a raw coefficient vector.
pub fn affine_value(coeffs: &[i64], values: &[f64]) -> f64 {
    compensated_sum(std::iter::once(coeffs[0] as f64).chain(coeffs[1..].iter().zip(values).map(|(k, l)| *k as f64 * l)))
}

/// The two sums of `S_{r,s}`: `A = Σ_{i≤r}(1−λᵢ)` and `B = Σ_{j>d−s} λⱼ`.
pub fn pc_parts(pair: FacetPair, spectrum: &Spectrum) -> Result<(f64, f64), SpectrumError> {
    let setting = spectrum.setting;
    if pair.check(setting).is_err() {
        return Err(SpectrumError::InvalidPair { pair, setting });
    }
    let v = &spectrum.values;
    let a = compensated_sum(v[..pair.r].iter().map(|l| 1.0 - l));
    let b = compensated_sum(v[v.len() - pair.s..].iter().copied());
    Ok((a, b))
}

/// `S_{r,s}(λ) = Σ_{i≤r}(1−λᵢ) + Σ_{j>d−s} λⱼ`.
pub fn evaluate_pc(pair: FacetPair, spectrum: &Spectrum) -> Result<f64, SpectrumError> {
    let (a, b) = pc_parts(pair, spectrum)?;
    Ok(a + b)
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
#[serde(tag = "kind", content = "index", rename_all = "snake_case")]
pub enum ViolationKind {
    /// 1-based inequality index.
    Inequality(usize),
    /// 1-based equality index (Borland–Dennis only).
    Equality(usize),
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct Violation {
    pub kind: ViolationKind,
    pub value: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct MembershipReport {
    pub violations: Vec<Violation>,
}

impl MembershipReport {
    pub fn is_member(&self) -> bool {
        self.violations.is_empty()
    }
}

/// Lists every inequality below `−tol` and every equality off by more than `tol`.
pub fn polytope_membership(
    spectrum: &Spectrum,
    catalog: &ConstraintCatalog,
    tol: f64,
) -> Result<MembershipReport, SpectrumError> {
    check_setting(catalog.setting, spectrum.setting)?;
    let mut violations = Vec::new();
    for c in &catalog.inequalities {
        let value = affine_value(&c.coeffs, &spectrum.values);
        if value < -tol {
            violations.push(Violation { kind: ViolationKind::Inequality(c.index), value });
        }
    }
    for (k, e) in catalog.equalities.iter().enumerate() {
        let value = affine_value(e, &spectrum.values);
        if value.abs() > tol {
            violations.push(Violation { kind: ViolationKind::Equality(k + 1), value });
        }
    }
    Ok(MembershipReport { violations })
}
