//! Slater-determinant selection rules, 1RDMs and weight decompositions.
//!
//! A [`Configuration`] is a bitmask over orbitals `1..=d` (bit `i−1` for
//! orbital `i`). Determinants are `a†_{i₁}…a†_{i_N}|0⟩` with `i₁ < … < i_N`,
//! which fixes the fermionic signs of all matrix elements.

use std::cmp::Ordering;
use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::catalog::{FacetPair, GPConstraint, Setting};
use crate::spectra::{validate_spectrum, Spectrum, SpectrumError};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SelectionError {
    #[error("setting mismatch: expected {expected}, found {found}")]
    SettingMismatch { expected: Setting, found: Setting },
    #[error("configuration {orbitals:?} is not an {n}-subset of 1..={d}")]
    InvalidConfiguration { orbitals: Vec<usize>, n: usize, d: usize },
    #[error("configuration {0} listed twice")]
    DuplicateConfiguration(Configuration),
    #[error("state norm² is {norm_sq}, expected 1")]
    NotNormalized { norm_sq: f64 },
    #[error("active space of {pair} cannot hold the remaining particles")]
    ImpossibleActiveSpace { pair: FacetPair },
    #[error("invalid pair {pair} for setting {setting}")]
    InvalidPair { pair: FacetPair, setting: Setting },
    #[error("the 1RDM is not diagonal in the configuration basis (max |ρ_pq| = {max_offdiag})")]
    NotAligned { max_offdiag: f64 },
    #[error("constraint {index} is not in the class of {pair}")]
    PairNotInClass { index: usize, pair: FacetPair },
    #[error(transparent)]
    Spectrum(#[from] SpectrumError),
}

/// One Slater determinant as an occupation bitmask.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct Configuration(u64);

impl Configuration {
    pub fn from_orbitals(orbitals: &[usize], setting: Setting) -> Result<Self, SelectionError> {
        let (n, d) = (setting.n_particles(), setting.dim());
        let err = || SelectionError::InvalidConfiguration { orbitals: orbitals.to_vec(), n, d };
        if d > 64 {
            return Err(err());
        }
        let mut bits = 0u64;
        for &o in orbitals {
            if o == 0 || o > d || bits & (1 << (o - 1)) != 0 {
                return Err(err());
            }
            bits |= 1 << (o - 1);
        }
        if orbitals.len() != n {
            return Err(err());
        }
        Ok(Self(bits))
    }

    pub fn bits(&self) -> u64 {
        self.0
    }

    /// Occupation `nᵢ ∈ {0,1}` of orbital `i` (1-based).
    pub fn occupies(&self, orbital: usize) -> bool {
        self.0 >> (orbital - 1) & 1 == 1
    }

    /// Sorted 1-based orbital list.
    pub fn orbitals(&self) -> Vec<usize> {
        (0..64).filter(|b| self.0 >> b & 1 == 1).map(|b| b + 1).collect()
    }

    pub fn occupations(&self, dim: usize) -> Vec<i64> {
        (1..=dim).map(|i| self.occupies(i) as i64).collect()
    }
}

impl Ord for Configuration {
    /// Lexicographic order of the sorted orbital lists.
    fn cmp(&self, other: &Self) -> Ordering {
        self.orbitals().cmp(&other.orbitals())
    }
}

impl PartialOrd for Configuration {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for Configuration {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let v: Vec<String> = self.orbitals().iter().map(|o| o.to_string()).collect();
        write!(f, "{{{}}}", v.join(","))
    }
}

/// All `C(d, N)` configurations in lexicographic order.
pub fn all_configurations(setting: Setting) -> Vec<Configuration> {
    let (n, d) = (setting.n_particles(), setting.dim());
    let mut out = Vec::new();
    let mut idx: Vec<usize> = (1..=n).collect();
    loop {
        out.push(Configuration::from_orbitals(&idx, setting).expect("combination is valid"));
        let Some(k) = (0..n).rev().find(|&k| idx[k] < d - (n - 1 - k)) else { break };
        idx[k] += 1;
        for m in k + 1..n {
            idx[m] = idx[m - 1] + 1;
        }
    }
    out
}

/// `I_D`: configurations annihilated by `D̂ = κ⁰ + Σ κⁱ n̂ᵢ`.
pub fn pinned_configurations(constraint: &GPConstraint, setting: Setting) -> Result<Vec<Configuration>, SelectionError> {
    if constraint.setting != setting {
        return Err(SelectionError::SettingMismatch { expected: setting, found: constraint.setting });
    }
    Ok(all_configurations(setting)
        .into_iter()
        .filter(|c| constraint.value_at_integers(&c.occupations(setting.dim())) == 0)
        .collect())
}

/// `I_S`: configurations containing `1..=r` and none of `d+1−s..=d`.
pub fn pc_configurations(pair: FacetPair, setting: Setting) -> Result<Vec<Configuration>, SelectionError> {
    if pair.check(setting).is_err() {
        return Err(SelectionError::InvalidPair { pair, setting });
    }
    let (n, d) = (setting.n_particles(), setting.dim());
    if n - pair.r > d - pair.r - pair.s {
        return Err(SelectionError::ImpossibleActiveSpace { pair });
    }
    Ok(all_configurations(setting).into_iter().filter(|c| in_pc_space(*c, pair, d)).collect())
}

fn in_pc_space(c: Configuration, pair: FacetPair, d: usize) -> bool {
    (1..=pair.r).all(|i| c.occupies(i)) && (d + 1 - pair.s..=d).all(|j| !c.occupies(j))
}

/// One amplitude record of the CI input format.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CIRecord {
    pub occupied: Vec<usize>,
    pub re: f64,
    #[serde(default)]
    pub im: f64,
}

/// A configuration-interaction expansion `Σ cᵢ |i⟩`.
#[derive(Clone, Debug, PartialEq)]
pub struct CIState {
    setting: Setting,
    amplitudes: BTreeMap<Configuration, Complex64>,
}

impl CIState {
    /// Builds a state, rejecting invalid or repeated configurations.
    /// Normalization is checked by the operations that need it.
    pub fn new(setting: Setting, entries: impl IntoIterator<Item = (Configuration, Complex64)>) -> Result<Self, SelectionError> {
        let mut amplitudes = BTreeMap::new();
        for (c, a) in entries {
            if amplitudes.insert(c, a).is_some() {
                return Err(SelectionError::DuplicateConfiguration(c));
            }
        }
        Ok(Self { setting, amplitudes })
    }

    pub fn from_records(setting: Setting, records: &[CIRecord]) -> Result<Self, SelectionError> {
        let entries = records
            .iter()
            .map(|r| Ok((Configuration::from_orbitals(&r.occupied, setting)?, Complex64::new(r.re, r.im))))
            .collect::<Result<Vec<_>, SelectionError>>()?;
        Self::new(setting, entries)
    }

    pub fn setting(&self) -> Setting {
        self.setting
    }

    pub fn amplitudes(&self) -> &BTreeMap<Configuration, Complex64> {
        &self.amplitudes
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amplitudes.values().map(|a| a.norm_sqr()).sum()
    }

    fn check_normalized(&self, tol: f64) -> Result<(), SelectionError> {
        let norm_sq = self.norm_sqr();
        if (norm_sq - 1.0).abs() > tol {
            return Err(SelectionError::NotNormalized { norm_sq });
        }
        Ok(())
    }

    /// Squared norm of the projection onto the given configurations.
    pub fn weight_on(&self, configs: &BTreeSet<Configuration>) -> f64 {
        self.amplitudes.iter().filter(|(c, _)| configs.contains(c)).map(|(_, a)| a.norm_sqr()).sum()
    }

    /// `⟨Ψ|D̂|Ψ⟩ = Σ |cᵢ|² D(nᵢ)`; `D̂` is diagonal in the determinant basis.
    pub fn expectation(&self, constraint: &GPConstraint) -> f64 {
        let d = self.setting.dim();
        self.amplitudes.iter().map(|(c, a)| a.norm_sqr() * constraint.value_at_integers(&c.occupations(d)) as f64).sum()
    }
}

/// `ρ₁[p][q] = ⟨Ψ| a†_q a_p |Ψ⟩` (0-based matrix indices for orbitals `p+1`, `q+1`).
pub fn one_rdm(state: &CIState, tol: f64) -> Result<DMatrix<Complex64>, SelectionError> {
    state.check_normalized(tol)?;
    let d = state.setting.dim();
    let mut rho = DMatrix::<Complex64>::zeros(d, d);
    for (cfg, amp) in &state.amplitudes {
        let bits = cfg.bits();
        for p in 0..d {
            if bits >> p & 1 == 0 {
                continue;
            }
            rho[(p, p)] += amp.norm_sqr();
            for q in 0..d {
                if bits >> q & 1 == 1 {
                    continue;
                }
                let target = Configuration(bits & !(1 << p) | 1 << q);
                let Some(other) = state.amplitudes.get(&target) else { continue };
                let (lo, hi) = if p < q { (p, q) } else { (q, p) };
                let between = (bits >> (lo + 1)) & ((1u64 << (hi - lo - 1)) - 1);
                let sign = if between.count_ones() % 2 == 0 { 1.0 } else { -1.0 };
                rho[(p, q)] += other.conj() * amp * sign;
            }
        }
    }
    Ok(rho)
}

#[derive(Clone, Debug, PartialEq)]
pub struct NaturalOccupations {
    pub spectrum: Spectrum,
    /// `ρ₁` is diagonal within `tol`: the determinants are natural orbitals.
    pub aligned: bool,
    /// Aligned and the diagonal is already non-increasing.
    pub ordered: bool,
    pub max_offdiag: f64,
}

/// Eigenvalues of `ρ₁`, sorted decreasingly and validated.
pub fn natural_occupations(state: &CIState, tol: f64) -> Result<NaturalOccupations, SelectionError> {
    let rho = one_rdm(state, tol)?;
    let d = rho.nrows();
    let mut max_offdiag = 0.0f64;
    for p in 0..d {
        for q in 0..d {
            if p != q {
                max_offdiag = max_offdiag.max(rho[(p, q)].norm());
            }
        }
    }
    let aligned = max_offdiag <= tol;
    let mut values: Vec<f64> = if aligned {
        (0..d).map(|i| rho[(i, i)].re).collect()
    } else {
        nalgebra::linalg::SymmetricEigen::new(rho.clone()).eigenvalues.iter().copied().collect()
    };
    let ordered = aligned && values.windows(2).all(|w| w[0] >= w[1] - tol);
    values.sort_by(|a, b| b.total_cmp(a));
    let spectrum = validate_spectrum(&values, state.setting, tol)?;
    Ok(NaturalOccupations { spectrum, aligned, ordered, max_offdiag })
}

/// Weights of the decomposition `Ψ = Ψ_S + Ψ_{D∖S} + Ψ_R`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct WeightDecomposition {
    /// Weight on `I_S`.
    pub w_s: f64,
    /// Weight on `I_D ∖ I_S`.
    pub w_d_minus_s: f64,
    /// Weight outside `I_D ∪ I_S`; the three weights sum to one.
    pub w_r: f64,
    /// Part of `w_s` carried by configurations of `I_S ∖ I_D`.
    pub w_s_outside_d: f64,
    /// Whether `I_S ⊆ I_D` holds for this constraint and pair.
    pub inclusion_holds: bool,
}

pub fn weight_decomposition(
    state: &CIState,
    constraint: &GPConstraint,
    pair: FacetPair,
    tol: f64,
) -> Result<WeightDecomposition, SelectionError> {
    let setting = state.setting;
    if constraint.setting != setting {
        return Err(SelectionError::SettingMismatch { expected: setting, found: constraint.setting });
    }
    if !constraint.in_class_of(pair) {
        return Err(SelectionError::PairNotInClass { index: constraint.index, pair });
    }
    let rho = one_rdm(state, tol)?;
    let d = setting.dim();
    let max_offdiag = (0..d)
        .flat_map(|p| (0..d).map(move |q| (p, q)))
        .filter(|(p, q)| p != q)
        .map(|(p, q)| rho[(p, q)].norm())
        .fold(0.0, f64::max);
    if max_offdiag > tol {
        return Err(SelectionError::NotAligned { max_offdiag });
    }
    let i_d: BTreeSet<Configuration> = pinned_configurations(constraint, setting)?.into_iter().collect();
    let i_s: BTreeSet<Configuration> = pc_configurations(pair, setting)?.into_iter().collect();
    let d_minus_s: BTreeSet<Configuration> = i_d.difference(&i_s).copied().collect();
    let s_minus_d: BTreeSet<Configuration> = i_s.difference(&i_d).copied().collect();
    let w_s = state.weight_on(&i_s);
    let w_d_minus_s = state.weight_on(&d_minus_s);
    Ok(WeightDecomposition {
        w_s,
        w_d_minus_s,
        w_r: state.norm_sqr() - w_s - w_d_minus_s,
        w_s_outside_d: state.weight_on(&s_minus_d),
        inclusion_holds: s_minus_d.is_empty(),
    })
}
