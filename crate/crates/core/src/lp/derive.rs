//! Re-derivation of constraint classes, minimal pairs and prefactors.
//!
//! Every quantity is the exact optimum of a rational LP over the polytope
//! `P` described by the catalog inequalities, the ordering constraints
//! `λᵢ ≥ λᵢ₊₁`, `0 ≤ λ_d`, `λ₁ ≤ 1` and the normalization `Σλ = N`
//! (plus the Borland–Dennis equalities for `(3,6)`).
//!
//! The printed tables list *closed* pairs: a pair `(r, s)` whose face
//! `P ∩ Σ_{r,s}` does not force any further occupation to one or zero.
//! [`PolytopeModel::closure`] computes that canonical representative and
//! minimal pairs are taken among closed members only.

use std::collections::{BTreeMap, HashMap};
use std::fmt;
use std::io::Write;
use std::sync::Mutex;

use rayon::prelude::*;
use serde::Serialize;
use thiserror::Error;

use super::simplex::{solve_exact, LinearProgram, LpError, LpOutcome, Relation, Sense, VariableBounds};
use crate::catalog::{load_setting, CatalogError, ClassBound, ConstraintCatalog, FacetPair, GPConstraint, Setting};
use crate::rational::Rational;

#[derive(Debug, Error)]
pub enum DeriveError {
    #[error("constraint belongs to setting {found}, catalog to {expected}")]
    SettingMismatch { expected: Setting, found: Setting },
    #[error("constraint {0} has a non-empty class; use derive_prefactor")]
    NonEmptyClass(usize),
    #[error("constraint {index}: denominator of dist(λ, Σ{pair}) vanishes on all of P")]
    ZeroDenominatorEverywhere { index: usize, pair: FacetPair },
    #[error("constraint {index} is not in the class of {pair}: D/dist is unbounded")]
    NotInClass { index: usize, pair: FacetPair },
    #[error("polytope of setting {0} is empty")]
    EmptyPolytope(Setting),
    #[error(transparent)]
    Catalog(#[from] CatalogError),
    #[error(transparent)]
    Lp(#[from] LpError),
    #[error("failed to write LP dump: {0}")]
    Dump(String),
}

/// Outcome of the class test of one constraint against one facet pair.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Membership {
    /// `max D_j` over `P ∩ Σ_{r,s}` is exactly zero.
    Member,
    NotMember,
    /// The face is empty, or the pair is excluded for the setting
    /// (`r ≠ s` in the Borland–Dennis setting).
    DegeneratePair,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Branch {
    /// `A ≥ B`, denominator `2A` with `A = Σ_{i≤r}(1−λᵢ)`.
    Occupied,
    /// `B ≥ A`, denominator `2B` with `B = Σ_{j>d−s} λⱼ`.
    Virtual,
}

/// Optimal prefactor with the de-homogenized Charnes–Cooper optimum.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Prefactor {
    pub pair: FacetPair,
    pub c: Rational,
    /// Point of `P` where `D = c · dist₁(λ, Σ_{r,s})` holds exactly.
    pub witness: Vec<Rational>,
    pub branch: Branch,
}

/// Bound for a constraint whose facet misses the Hartree–Fock point.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ScalarBound {
    /// Exact maximum of `D` over `P`.
    pub max: Rational,
    /// The tabulated constant, `max / 2` (see the design notes).
    pub c: Rational,
    /// A maximizer of `D` over `P`.
    pub witness: Vec<Rational>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum DerivedBound {
    Pairs(Vec<Prefactor>),
    Scalar(ScalarBound),
}

impl DerivedBound {
    pub fn to_class_bound(&self) -> ClassBound {
        match self {
            DerivedBound::Pairs(p) => ClassBound::Pairs(p.iter().map(|x| (x.pair, x.c.clone())).collect()),
            DerivedBound::Scalar(s) => ClassBound::Scalar(s.c.clone()),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ClassResult {
    pub index: usize,
    pub membership: BTreeMap<FacetPair, Membership>,
    /// Minimal closed member pairs, sorted.
    pub minimal_pairs: Vec<FacetPair>,
    /// Filled by [`PolytopeModel::derive_class`]; `None` after
    /// [`PolytopeModel::derive_minimal_pairs`] alone.
    pub bound: Option<DerivedBound>,
}

/// Exact LP description of the polytope of one catalog plus caches.
pub struct PolytopeModel<'a> {
    catalog: &'a ConstraintCatalog,
    /// Rows over `λ₁..λ_d`: `coeffs · λ (relation) rhs`.
    rows: Vec<(Vec<Rational>, Relation, Rational)>,
    closures: Mutex<HashMap<FacetPair, FacetPair>>,
    dump: Option<Mutex<Box<dyn Write + Send + 'a>>>,
    prune: bool,
}

impl<'a> PolytopeModel<'a> {
    pub fn new(catalog: &'a ConstraintCatalog) -> Self {
        let setting = catalog.setting;
        let d = setting.dim();
        let int = |v: i64| Rational::from_integer(v);
        let mut rows = Vec::new();
        for c in &catalog.inequalities {
            // κ⁰ + κ·λ ≥ 0  ⇔  −κ·λ ≤ κ⁰
            rows.push((c.linear().iter().map(|&k| int(-k)).collect(), Relation::Le, int(c.constant())));
        }
        for e in &catalog.equalities {
            rows.push((e[1..].iter().map(|&k| int(k)).collect(), Relation::Eq, int(-e[0])));
        }
        for i in 0..d - 1 {
            let mut row = vec![Rational::zero(); d];
            row[i] = int(-1);
            row[i + 1] = int(1);
            rows.push((row, Relation::Le, Rational::zero()));
        }
        rows.push((vec![int(1); d], Relation::Eq, int(setting.n_particles() as i64)));
        Self { catalog, rows, closures: Mutex::new(HashMap::new()), dump: None, prune: true }
    }

    /// Writes every LP solved through this model to `sink`. Dumping makes
    /// [`PolytopeModel::verify`] run sequentially so the output is ordered.
    pub fn with_dump(mut self, sink: Box<dyn Write + Send + 'a>) -> Self {
        self.dump = Some(Mutex::new(sink));
        self
    }

    /// Enables or disables the monotonicity pruning of the class search.
    pub fn with_pruning(mut self, prune: bool) -> Self {
        self.prune = prune;
        self
    }

    pub fn catalog(&self) -> &ConstraintCatalog {
        self.catalog
    }

    pub fn setting(&self) -> Setting {
        self.catalog.setting
    }

    fn names(&self) -> Vec<String> {
        (1..=self.setting().dim()).map(|i| format!("l{i}")).collect()
    }

    /// `sense objective·λ + constant` over `P ∩ Σ_{pair}` (`pair = None` for all of `P`).
    pub fn polytope_lp(&self, sense: Sense, objective: Vec<Rational>, constant: Rational, face: Option<FacetPair>) -> LinearProgram {
        let d = self.setting().dim();
        let mut lp = LinearProgram::new(sense, objective).with_constant(constant).with_names(self.names());
        for (row, rel, rhs) in &self.rows {
            lp.push(row.clone(), *rel, rhs.clone());
        }
        lp.set_bounds(0, VariableBounds::between(Rational::zero(), Rational::one()));
        if let Some(p) = face {
            for i in 0..p.r {
                lp.set_bounds(i, VariableBounds::fixed(Rational::one()));
            }
            for j in d - p.s..d {
                lp.set_bounds(j, VariableBounds::fixed(Rational::zero()));
            }
        }
        lp
    }

    fn solve(&self, label: &str, lp: &LinearProgram) -> Result<LpOutcome, DeriveError> {
        if let Some(sink) = &self.dump {
            let mut w = sink.lock().expect("dump sink poisoned");
            write!(w, "\\ {} {}\n{}\n", self.setting(), label, lp).map_err(|e| DeriveError::Dump(e.to_string()))?;
        }
        Ok(solve_exact(lp)?)
    }

    fn check_constraint(&self, j: &GPConstraint) -> Result<(), DeriveError> {
        if j.setting != self.setting() {
            return Err(DeriveError::SettingMismatch { expected: self.setting(), found: j.setting });
        }
        Ok(())
    }

    fn d_objective(j: &GPConstraint) -> (Vec<Rational>, Rational) {
        (j.linear().iter().map(|&k| Rational::from_integer(k)).collect(), Rational::from_integer(j.constant()))
    }

    fn excluded_pair(&self, pair: FacetPair) -> bool {
        self.setting() == Setting::BORLAND_DENNIS && pair.r != pair.s
    }

    /// Exact test of `P ∩ Σ_{r,s} ⊂ F_j`: `max D_j` over the face equals zero.
    pub fn class_membership(&self, j: &GPConstraint, pair: FacetPair) -> Result<Membership, DeriveError> {
        self.check_constraint(j)?;
        pair.check(self.setting())?;
        if self.excluded_pair(pair) {
            return Ok(Membership::DegeneratePair);
        }
        let (obj, k0) = Self::d_objective(j);
        let lp = self.polytope_lp(Sense::Maximize, obj, k0, Some(pair));
        match self.solve(&format!("membership row {} pair {}", j.index, pair), &lp)? {
            LpOutcome::Optimal(s) if s.value.is_zero() => Ok(Membership::Member),
            LpOutcome::Optimal(_) => Ok(Membership::NotMember),
            LpOutcome::Infeasible => Ok(Membership::DegeneratePair),
            LpOutcome::Unbounded => unreachable!("P is bounded"),
        }
    }

    /// Largest pair with the same face as `pair`: extends `r` while `λ_{r+1}`
    /// is forced to one on `P ∩ Σ_{r,s}` and `s` while `λ_{d−s}` is forced to zero.
    pub fn closure(&self, pair: FacetPair) -> Result<FacetPair, DeriveError> {
        if let Some(c) = self.closures.lock().expect("closure cache poisoned").get(&pair) {
            return Ok(*c);
        }
        let setting = self.setting();
        let d = setting.dim();
        let unit = |i: usize| {
            let mut v = vec![Rational::zero(); d];
            v[i] = Rational::one();
            v
        };
        let mut r = pair.r;
        while r < setting.n_particles() {
            let lp = self.polytope_lp(Sense::Minimize, unit(r), Rational::zero(), Some(pair));
            match self.solve(&format!("closure {pair} min l{}", r + 1), &lp)? {
                LpOutcome::Optimal(s) if s.value == Rational::one() => r += 1,
                LpOutcome::Optimal(_) => break,
                _ => return Ok(pair),
            }
        }
        let mut s = pair.s;
        while s < setting.holes() {
            let lp = self.polytope_lp(Sense::Maximize, unit(d - 1 - s), Rational::zero(), Some(pair));
            match self.solve(&format!("closure {pair} max l{}", d - s), &lp)? {
                LpOutcome::Optimal(sol) if sol.value.is_zero() => s += 1,
                LpOutcome::Optimal(_) => break,
                _ => return Ok(pair),
            }
        }
        let closed = FacetPair { r, s };
        self.closures.lock().expect("closure cache poisoned").insert(pair, closed);
        Ok(closed)
    }

    pub fn is_closed(&self, pair: FacetPair) -> Result<bool, DeriveError> {
        Ok(self.closure(pair)? == pair)
    }

    /// Membership over all facet pairs and the minimal closed members.
    pub fn derive_minimal_pairs(&self, j: &GPConstraint) -> Result<ClassResult, DeriveError> {
        self.check_constraint(j)?;
        let mut pairs = self.setting().facet_pairs();
        // Larger pairs first, so non-membership propagates downwards.
        pairs.sort_by_key(|p| (std::cmp::Reverse(p.r + p.s), p.r));
        let mut membership = BTreeMap::new();
        for p in pairs {
            let inferred = if !self.prune || self.excluded_pair(p) {
                None
            } else if membership.iter().any(|(q, m)| *m == Membership::NotMember && p.le(q)) {
                Some(Membership::NotMember)
            } else if membership.iter().any(|(q, m)| *m == Membership::Member && q.le(&p)) {
                Some(Membership::Member)
            } else {
                None
            };
            let m = match inferred {
                Some(m) => m,
                None => self.class_membership(j, p)?,
            };
            membership.insert(p, m);
        }
        let mut closed_members = Vec::new();
        for (p, m) in &membership {
            if *m == Membership::Member && self.is_closed(*p)? {
                closed_members.push(*p);
            }
        }
        let minimal_pairs =
            closed_members.iter().filter(|p| !closed_members.iter().any(|q| q != *p && q.le(p))).copied().collect();
        Ok(ClassResult { index: j.index, membership, minimal_pairs, bound: None })
    }

    /// Least `c` with `D_j ≤ c · dist₁(λ, Σ_{r,s})` on `P`, via one
    /// Charnes–Cooper LP per branch of the max in the distance.
    pub fn derive_prefactor(&self, j: &GPConstraint, pair: FacetPair) -> Result<Prefactor, DeriveError> {
        self.check_constraint(j)?;
        pair.check(self.setting())?;
        let setting = self.setting();
        let d = setting.dim();
        let int = |v: i64| Rational::from_integer(v);
        // Variables y₁..y_d (= tλ) and t.
        let mut names = self.names();
        names.iter_mut().for_each(|n| *n = format!("y{}", &n[1..]));
        names.push("t".into());
        // Homogenized A and B: coefficient rows over (y, t).
        let mut a_h = vec![Rational::zero(); d + 1];
        for coeff in a_h.iter_mut().take(pair.r) {
            *coeff = int(-1);
        }
        a_h[d] = int(pair.r as i64);
        let mut b_h = vec![Rational::zero(); d + 1];
        for coeff in b_h.iter_mut().skip(d - pair.s).take(pair.s) {
            *coeff = int(1);
        }
        b_h[d] = Rational::zero();

        let mut best: Option<Prefactor> = None;
        for branch in [Branch::Occupied, Branch::Virtual] {
            let (den, other) = match branch {
                Branch::Occupied if pair.r > 0 => (&a_h, &b_h),
                Branch::Virtual if pair.s > 0 => (&b_h, &a_h),
                _ => continue,
            };
            let mut obj: Vec<Rational> = j.linear().iter().map(|&k| int(k)).collect();
            obj.push(int(j.constant()));
            let mut lp = LinearProgram::new(Sense::Maximize, obj).with_names(names.clone());
            for (row, rel, rhs) in &self.rows {
                let mut h = row.clone();
                h.push(-rhs);
                lp.push(h, *rel, Rational::zero());
            }
            // λ₁ ≤ 1
            let mut cap = vec![Rational::zero(); d + 1];
            cap[0] = int(1);
            cap[d] = int(-1);
            lp.push(cap, Relation::Le, Rational::zero());
            // den ≥ other
            let diff: Vec<Rational> = den.iter().zip(other).map(|(x, y)| x - y).collect();
            lp.push(diff, Relation::Ge, Rational::zero());
            // 2·den = 1
            lp.push(den.iter().map(|x| x * &int(2)).collect(), Relation::Eq, int(1));
            let label = format!("prefactor row {} pair {} branch {:?}", j.index, pair, branch);
            match self.solve(&label, &lp)? {
                LpOutcome::Optimal(sol) => {
                    let t = &sol.point[d];
                    if t.is_zero() {
                        continue;
                    }
                    let witness: Vec<Rational> = sol.point[..d].iter().map(|y| y / t).collect();
                    if best.as_ref().is_none_or(|b| sol.value > b.c) {
                        best = Some(Prefactor { pair, c: sol.value, witness, branch });
                    }
                }
                LpOutcome::Infeasible => continue,
                LpOutcome::Unbounded => return Err(DeriveError::NotInClass { index: j.index, pair }),
            }
        }
        best.ok_or(DeriveError::ZeroDenominatorEverywhere { index: j.index, pair })
    }

    /// Bound `D_j ≤ c` for a constraint whose facet misses `λ_HF`.
    pub fn derive_scalar_bound(&self, j: &GPConstraint) -> Result<ScalarBound, DeriveError> {
        self.check_constraint(j)?;
        if j.value_at_hartree_fock() == 0 {
            return Err(DeriveError::NonEmptyClass(j.index));
        }
        let (obj, k0) = Self::d_objective(j);
        let lp = self.polytope_lp(Sense::Maximize, obj, k0, None);
        match self.solve(&format!("scalar bound row {}", j.index), &lp)? {
            LpOutcome::Optimal(sol) => {
                let c = &sol.value / &Rational::from_integer(2);
                Ok(ScalarBound { max: sol.value, c, witness: sol.point })
            }
            _ => Err(DeriveError::EmptyPolytope(self.setting())),
        }
    }

    /// Minimal pairs plus prefactors (or the scalar bound).
    pub fn derive_class(&self, j: &GPConstraint) -> Result<ClassResult, DeriveError> {
        let mut result = self.derive_minimal_pairs(j)?;
        result.bound = Some(if result.minimal_pairs.is_empty() {
            DerivedBound::Scalar(self.derive_scalar_bound(j)?)
        } else {
            DerivedBound::Pairs(
                result.minimal_pairs.iter().map(|p| self.derive_prefactor(j, *p)).collect::<Result<_, _>>()?,
            )
        });
        Ok(result)
    }

    fn verify_row(&self, j: &GPConstraint) -> Result<RowReport, DeriveError> {
        let derived = self.derive_class(j)?;
        let bound = derived.bound.as_ref().expect("derive_class fills the bound").to_class_bound();
        let table = normalize(&j.bound);
        let derived_bound = normalize(&bound);
        let mut non_closed = Vec::new();
        for p in j.minimal_pairs() {
            if !self.is_closed(p)? {
                non_closed.push(p);
            }
        }
        Ok(RowReport { index: j.index, matches: table == derived_bound, table, derived: derived_bound, non_closed_table_pairs: non_closed })
    }

    /// Re-derives every row of the catalog and diffs it against the table.
    pub fn verify(&self) -> Result<VerifyReport, DeriveError> {
        self.verify_rows(&self.catalog.inequalities.iter().map(|c| c.index).collect::<Vec<_>>())
    }

    /// Like [`PolytopeModel::verify`] restricted to the given 1-based rows.
    pub fn verify_rows(&self, indices: &[usize]) -> Result<VerifyReport, DeriveError> {
        let rows: Vec<&GPConstraint> = indices
            .iter()
            .map(|&i| self.catalog.get(i).ok_or_else(|| CatalogError::Parse { line: i, message: "no such row".into() }))
            .collect::<Result<_, _>>()?;
        // Warm the closure cache once instead of racing on it.
        for p in self.setting().facet_pairs() {
            if !self.excluded_pair(p) {
                self.closure(p)?;
            }
        }
        let reports: Vec<RowReport> = if self.dump.is_some() {
            rows.iter().map(|c| self.verify_row(c)).collect::<Result<_, _>>()?
        } else {
            rows.par_iter().map(|c| self.verify_row(c)).collect::<Result<_, _>>()?
        };
        Ok(VerifyReport { setting: self.setting(), rows: reports })
    }
}

/// Table comparison is set-based: pairs sorted, rationals exact.
fn normalize(b: &ClassBound) -> ClassBound {
    match b {
        ClassBound::Pairs(p) => {
            let mut v = p.clone();
            v.sort();
            ClassBound::Pairs(v)
        }
        ClassBound::Scalar(s) => ClassBound::Scalar(s.clone()),
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RowReport {
    pub index: usize,
    pub matches: bool,
    pub table: ClassBound,
    pub derived: ClassBound,
    /// Table pairs that are not closed (the verifier's degenerate-pair flag).
    pub non_closed_table_pairs: Vec<FacetPair>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct VerifyReport {
    pub setting: Setting,
    pub rows: Vec<RowReport>,
}

impl VerifyReport {
    pub fn matched(&self) -> usize {
        self.rows.iter().filter(|r| r.matches).count()
    }

    pub fn all_match(&self) -> bool {
        self.rows.iter().all(|r| r.matches && r.non_closed_table_pairs.is_empty())
    }

    pub fn mismatches(&self) -> impl Iterator<Item = &RowReport> {
        self.rows.iter().filter(|r| !r.matches || !r.non_closed_table_pairs.is_empty())
    }
}

/// Formats a bound as `(r,s):c; …` or `scalar:c`.
pub fn describe_bound(b: &ClassBound) -> String {
    match b {
        ClassBound::Pairs(p) => p.iter().map(|(q, c)| format!("{q}:{c}")).collect::<Vec<_>>().join("; "),
        ClassBound::Scalar(c) => format!("scalar:{c}"),
    }
}

impl fmt::Display for VerifyReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for r in &self.rows {
            let status = if r.matches { "ok" } else { "MISMATCH" };
            write!(f, "{} row {:>3} {:<8} table [{}] derived [{}]", self.setting, r.index, status, describe_bound(&r.table), describe_bound(&r.derived))?;
            if !r.non_closed_table_pairs.is_empty() {
                let v: Vec<String> = r.non_closed_table_pairs.iter().map(|p| p.to_string()).collect();
                write!(f, " non-closed table pairs {}", v.join(" "))?;
            }
            writeln!(f)?;
        }
        writeln!(f, "{}/{} verified", self.matched(), self.rows.len())
    }
}

/// Exact test of `P ∩ Σ_{r,s} ⊂ F_j`.
pub fn class_membership(j: &GPConstraint, pair: FacetPair, catalog: &ConstraintCatalog) -> Result<Membership, DeriveError> {
    PolytopeModel::new(catalog).class_membership(j, pair)
}

pub fn derive_minimal_pairs(j: &GPConstraint, catalog: &ConstraintCatalog) -> Result<ClassResult, DeriveError> {
    PolytopeModel::new(catalog).derive_minimal_pairs(j)
}

pub fn derive_prefactor(j: &GPConstraint, pair: FacetPair, catalog: &ConstraintCatalog) -> Result<Prefactor, DeriveError> {
    PolytopeModel::new(catalog).derive_prefactor(j, pair)
}

pub fn derive_scalar_bound(j: &GPConstraint, catalog: &ConstraintCatalog) -> Result<ScalarBound, DeriveError> {
    PolytopeModel::new(catalog).derive_scalar_bound(j)
}

/// Verifies the embedded catalog of a known setting.
pub fn verify_catalog(setting: Setting) -> Result<VerifyReport, DeriveError> {
    PolytopeModel::new(load_setting(setting)?).verify()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn setting(n: usize, d: usize) -> Setting {
        Setting::new(n, d).unwrap()
    }

    fn pair(r: usize, s: usize) -> FacetPair {
        FacetPair { r, s }
    }

    fn q(n: i64, d: i64) -> Rational {
        Rational::new(n, d)
    }

    #[test]
    fn borland_dennis_lp_examples() {
        let bd = load_setting(Setting::BORLAND_DENNIS).unwrap();
        let model = PolytopeModel::new(bd);
        let mut e1 = vec![Rational::zero(); 6];
        e1[0] = Rational::one();
        let sol = solve_exact(&model.polytope_lp(Sense::Maximize, e1, Rational::zero(), None)).unwrap().optimal().unwrap();
        assert_eq!(sol.value, Rational::one());
        // λ5 + λ6 − λ4 in reduced coordinates is D itself after substitution.
        let obj = [0, 0, 0, -1, 1, 1].iter().map(|&v| Rational::from_integer(v)).collect();
        let sol = solve_exact(&model.polytope_lp(Sense::Maximize, obj, Rational::zero(), None)).unwrap().optimal().unwrap();
        assert_eq!(sol.value, q(1, 2));
        assert_eq!(&sol.point[3..], &[q(1, 2), q(1, 2), q(1, 2)]);
    }

    #[test]
    fn borland_dennis_class() {
        let bd = load_setting(Setting::BORLAND_DENNIS).unwrap();
        let model = PolytopeModel::new(bd);
        let d = &bd.inequalities[0];
        for k in 1..=3 {
            assert_eq!(model.class_membership(d, pair(k, k)).unwrap(), Membership::Member);
        }
        assert_eq!(model.class_membership(d, pair(1, 2)).unwrap(), Membership::DegeneratePair);
        let res = model.derive_class(d).unwrap();
        assert_eq!(res.minimal_pairs, vec![pair(1, 1)]);
        let Some(DerivedBound::Pairs(p)) = res.bound else { panic!() };
        assert_eq!(p[0].c, q(1, 2));
    }

    #[test]
    fn pruning_is_sound_on_borland_dennis() {
        let bd = load_setting(Setting::BORLAND_DENNIS).unwrap();
        let a = PolytopeModel::new(bd).with_pruning(true).derive_minimal_pairs(&bd.inequalities[0]).unwrap();
        let b = PolytopeModel::new(bd).with_pruning(false).derive_minimal_pairs(&bd.inequalities[0]).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn pruning_is_sound_on_sampled_rows() {
        let cat = load_setting(setting(3, 10)).unwrap();
        for idx in [2, 3, 7, 8, 54] {
            let j = cat.get(idx).unwrap();
            let a = PolytopeModel::new(cat).with_pruning(true).derive_minimal_pairs(j).unwrap();
            let b = PolytopeModel::new(cat).with_pruning(false).derive_minimal_pairs(j).unwrap();
            assert_eq!(a, b, "row {idx}");
        }
    }

    #[test]
    fn spec_examples_3_10() {
        let cat = load_setting(setting(3, 10)).unwrap();
        let model = PolytopeModel::new(cat);
        let row = |i| cat.get(i).unwrap();
        assert_eq!(model.derive_minimal_pairs(row(7)).unwrap().minimal_pairs, vec![pair(0, 4), pair(1, 3)]);
        assert_eq!(model.derive_minimal_pairs(row(2)).unwrap().minimal_pairs, vec![pair(1, 1)]);
        assert_eq!(model.derive_prefactor(row(2), pair(1, 1)).unwrap().c, q(1, 2));
        assert_eq!(model.derive_prefactor(row(7), pair(0, 4)).unwrap().c, q(1, 1));
        assert_eq!(model.derive_prefactor(row(7), pair(1, 3)).unwrap().c, q(3, 4));
        assert_eq!(model.derive_scalar_bound(row(3)).unwrap().c, q(9, 14));
        assert_eq!(model.derive_scalar_bound(row(6)).unwrap().c, q(1, 1));
        assert!(matches!(model.derive_scalar_bound(row(2)), Err(DeriveError::NonEmptyClass(2))));
        for p in setting(3, 10).facet_pairs() {
            assert_eq!(model.class_membership(row(3), p).unwrap(), Membership::NotMember);
        }
    }

    #[test]
    fn spec_examples_4_and_5() {
        let cat4 = load_setting(setting(4, 10)).unwrap();
        let m4 = PolytopeModel::new(cat4);
        let p = crate::catalog::decode_pair_notation(&[4, 5], setting(4, 10)).unwrap();
        assert_eq!(m4.derive_prefactor(cat4.get(54).unwrap(), p).unwrap().c, q(7, 12));
        let cat5 = load_setting(setting(5, 10)).unwrap();
        assert_eq!(PolytopeModel::new(cat5).derive_scalar_bound(cat5.get(142).unwrap()).unwrap().c, q(8, 3));
    }

    #[test]
    fn witness_attains_the_bound_exactly() {
        let cat = load_setting(setting(3, 10)).unwrap();
        let model = PolytopeModel::new(cat);
        for idx in [2, 7, 54] {
            let j = cat.get(idx).unwrap();
            for p in j.minimal_pairs() {
                let pf = model.derive_prefactor(j, p).unwrap();
                let lp = model.polytope_lp(Sense::Maximize, vec![Rational::zero(); 10], Rational::zero(), None);
                assert!(lp.is_feasible(&pf.witness));
                let dval = Rational::from_integer(j.constant())
                    + j.linear().iter().zip(&pf.witness).map(|(k, l)| &Rational::from_integer(*k) * l).sum::<Rational>();
                let a: Rational = pf.witness[..p.r].iter().map(|l| &Rational::one() - l).sum();
                let b: Rational = pf.witness[10 - p.s..].iter().cloned().sum();
                let dist = &Rational::from_integer(2) * &a.max(b);
                assert_eq!(dval, &pf.c * &dist, "row {idx} pair {p}");
            }
        }
    }

    #[test]
    fn non_member_pair_has_no_prefactor() {
        let cat = load_setting(setting(3, 10)).unwrap();
        let model = PolytopeModel::new(cat);
        assert!(matches!(model.derive_prefactor(cat.get(3).unwrap(), pair(1, 1)), Err(DeriveError::NotInClass { .. })));
    }

    #[test]
    fn setting_mismatch() {
        let bd = load_setting(Setting::BORLAND_DENNIS).unwrap();
        let cat = load_setting(setting(3, 10)).unwrap();
        let model = PolytopeModel::new(bd);
        assert!(matches!(
            model.class_membership(cat.get(1).unwrap(), pair(1, 1)),
            Err(DeriveError::SettingMismatch { .. })
        ));
    }

    #[test]
    fn corrupted_row_is_flagged() {
        let mut cat = load_setting(Setting::BORLAND_DENNIS).unwrap().clone();
        cat.inequalities[0].bound = ClassBound::Pairs(vec![(pair(1, 1), q(2, 3))]);
        let report = PolytopeModel::new(&cat).verify().unwrap();
        assert_eq!(report.matched(), 0);
        assert_eq!(report.mismatches().count(), 1);
        assert!(!report.all_match());
    }

    #[test]
    fn derivation_is_deterministic() {
        let cat = load_setting(setting(3, 10)).unwrap();
        let j = cat.get(7).unwrap();
        assert_eq!(PolytopeModel::new(cat).derive_class(j).unwrap(), PolytopeModel::new(cat).derive_class(j).unwrap());
    }

    #[test]
    fn dump_contains_labeled_lps() {
        let bd = load_setting(Setting::BORLAND_DENNIS).unwrap();
        let buf = std::sync::Arc::new(Mutex::new(Vec::<u8>::new()));
        struct Shared(std::sync::Arc<Mutex<Vec<u8>>>);
        impl Write for Shared {
            fn write(&mut self, b: &[u8]) -> std::io::Result<usize> {
                self.0.lock().unwrap().extend_from_slice(b);
                Ok(b.len())
            }
            fn flush(&mut self) -> std::io::Result<()> {
                Ok(())
            }
        }
        let model = PolytopeModel::new(bd).with_dump(Box::new(Shared(buf.clone())));
        model.verify().unwrap();
        let text = String::from_utf8(buf.lock().unwrap().clone()).unwrap();
        assert!(text.contains("\\ (3,6) membership row 1 pair (1,1)"));
        assert!(text.contains("Maximize"));
        assert!(text.contains("End"));
    }
}
