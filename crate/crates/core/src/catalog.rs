//! Embedded generalized-Pauli-constraint tables.
//!
//! Each known setting `(N, d)` carries its list of constraints
//! `D_j(λ) = κ⁰ + Σᵢ κⁱ λᵢ ≥ 0` together with the minimal facet pairs
//! `(r, s)` of the class hierarchy and the optimal prefactors of the
//! bounds `D_j ≤ c · dist₁(λ, Σ_{r,s})`. Constraints whose facet misses the
//! Hartree–Fock point carry a single scalar bound instead.
//!
//! The printed tables encode a pair `(r, s)` as the cell `{r, d+1-s}`,
//! dropping `r = 0` and `d+1-s = d+1`; see [`decode_pair_notation`].

use std::fmt;
use std::str::FromStr;
use std::sync::OnceLock;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::rational::Rational;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum CatalogError {
    #[error("invalid setting (N={n}, d={d}): need 0 < N < d")]
    InvalidSetting { n: usize, d: usize },
    #[error("no embedded constraint table for setting {0}")]
    UnknownSetting(Setting),
    #[error("malformed pair entry {entry:?} for setting {setting}")]
    MalformedEntry { entry: Vec<usize>, setting: Setting },
    #[error("pair ({r},{s}) is not a facet of the Pauli simplex for setting {setting}")]
    InvalidPair { r: usize, s: usize, setting: Setting },
    #[error("catalog parse error on line {line}: {message}")]
    Parse { line: usize, message: String },
}

/// Particle number `N` and one-particle dimension `d`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Setting {
    n_particles: usize,
    dim: usize,
}

impl Setting {
    pub const BORLAND_DENNIS: Setting = Setting { n_particles: 3, dim: 6 };
    pub const KNOWN: [Setting; 4] = [
        Setting::BORLAND_DENNIS,
        Setting { n_particles: 3, dim: 10 },
        Setting { n_particles: 4, dim: 10 },
        Setting { n_particles: 5, dim: 10 },
    ];

    pub fn new(n_particles: usize, dim: usize) -> Result<Self, CatalogError> {
        if n_particles == 0 || n_particles >= dim {
            return Err(CatalogError::InvalidSetting { n: n_particles, d: dim });
        }
        Ok(Self { n_particles, dim })
    }

    pub fn n_particles(&self) -> usize {
        self.n_particles
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Number of unoccupied orbitals at the Hartree–Fock point, `d − N`.
    pub fn holes(&self) -> usize {
        self.dim - self.n_particles
    }

    pub fn is_known(&self) -> bool {
        Self::KNOWN.contains(self)
    }

    /// All pairs `(r, s)` with `r ≤ N`, `s ≤ d − N`, `r + s > 0`, in
    /// lexicographic order.
    pub fn facet_pairs(&self) -> Vec<FacetPair> {
        let mut out = Vec::new();
        for r in 0..=self.n_particles {
            for s in 0..=self.holes() {
                if r + s > 0 {
                    out.push(FacetPair { r, s });
                }
            }
        }
        out
    }

    pub fn hartree_fock_pair(&self) -> FacetPair {
        FacetPair { r: self.n_particles, s: self.holes() }
    }
}

impl fmt::Display for Setting {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({},{})", self.n_particles, self.dim)
    }
}

impl FromStr for Setting {
    type Err = CatalogError;

    /// Accepts `N,d` with optional surrounding parentheses.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let t = s.trim().trim_start_matches('(').trim_end_matches(')');
        let err = || CatalogError::Parse { line: 0, message: format!("expected `N,d`, got `{s}`") };
        let (n, d) = t.split_once(',').ok_or_else(err)?;
        let n = n.trim().parse().map_err(|_| err())?;
        let d = d.trim().parse().map_err(|_| err())?;
        Setting::new(n, d)
    }
}

/// Index of the Pauli-simplex facet `Σ_{r,s}`: the first `r` occupations
/// equal one and the last `s` vanish.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct FacetPair {
    pub r: usize,
    pub s: usize,
}

impl FacetPair {
    pub fn new(r: usize, s: usize, setting: Setting) -> Result<Self, CatalogError> {
        let p = FacetPair { r, s };
        p.check(setting)?;
        Ok(p)
    }

    pub fn check(&self, setting: Setting) -> Result<(), CatalogError> {
        if self.r > setting.n_particles() || self.s > setting.holes() || self.r + self.s == 0 {
            return Err(CatalogError::InvalidPair { r: self.r, s: self.s, setting });
        }
        Ok(())
    }

    /// Componentwise order `(r, s) ≤ (r', s')`. A constraint in the class of
    /// a pair belongs to the class of every larger pair.
    pub fn le(&self, other: &FacetPair) -> bool {
        self.r <= other.r && self.s <= other.s
    }

    pub fn comparable(&self, other: &FacetPair) -> bool {
        self.le(other) || other.le(self)
    }
}

impl fmt::Display for FacetPair {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({},{})", self.r, self.s)
    }
}

/// Decodes a printed table cell `{a}` or `{a, b}` into a facet pair.
pub fn decode_pair_notation(entry: &[usize], setting: Setting) -> Result<FacetPair, CatalogError> {
    let (n, d) = (setting.n_particles(), setting.dim());
    let malformed = || CatalogError::MalformedEntry { entry: entry.to_vec(), setting };
    let pair = match *entry {
        [t] if (1..=d + 1).contains(&t) => {
            if t > n {
                FacetPair { r: 0, s: d + 1 - t }
            } else {
                FacetPair { r: t, s: 0 }
            }
        }
        [a, b] if 1 <= a && a < b && b <= d + 1 => FacetPair { r: a, s: d + 1 - b },
        _ => return Err(malformed()),
    };
    pair.check(setting).map_err(|_| malformed())?;
    Ok(pair)
}

/// Inverse of [`decode_pair_notation`].
pub fn encode_pair_notation(pair: FacetPair, setting: Setting) -> Vec<usize> {
    let d = setting.dim();
    match (pair.r, pair.s) {
        (0, s) => vec![d + 1 - s],
        (r, 0) => vec![r],
        (r, s) => vec![r, d + 1 - s],
    }
}

/// Formats pairs the way the printed tables do, e.g. `{7}, {1, 8}`.
pub fn format_pair_cell(pairs: &[FacetPair], setting: Setting) -> String {
    pairs
        .iter()
        .map(|p| {
            let e = encode_pair_notation(*p, setting);
            let inner: Vec<String> = e.iter().map(|v| v.to_string()).collect();
            format!("{{{}}}", inner.join(", "))
        })
        .collect::<Vec<_>>()
        .join(", ")
}

/// Upper bound attached to a constraint.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum ClassBound {
    /// `D ≤ c · dist₁(λ, Σ_{r,s})` for each minimal pair.
    Pairs(Vec<(FacetPair, Rational)>),
    /// Empty class: `D ≤ c · 1`.
    Scalar(Rational),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GPConstraint {
    pub setting: Setting,
    /// 1-based, as printed.
    pub index: usize,
    /// `κ⁰, κ¹, …, κᵈ`.
    pub coeffs: Vec<i64>,
    pub bound: ClassBound,
}

impl GPConstraint {
    pub fn constant(&self) -> i64 {
        self.coeffs[0]
    }

    pub fn linear(&self) -> &[i64] {
        &self.coeffs[1..]
    }

    pub fn minimal_pairs(&self) -> Vec<FacetPair> {
        match &self.bound {
            ClassBound::Pairs(p) => p.iter().map(|(pair, _)| *pair).collect(),
            ClassBound::Scalar(_) => Vec::new(),
        }
    }

    pub fn has_class(&self) -> bool {
        matches!(&self.bound, ClassBound::Pairs(p) if !p.is_empty())
    }

    /// `true` when `pair` lies above one of the minimal pairs.
    pub fn in_class_of(&self, pair: FacetPair) -> bool {
        self.minimal_pairs().iter().any(|m| m.le(&pair))
    }

    /// Exact value at an occupation pattern (`nᵢ ∈ {0,1}` or any integers).
    pub fn value_at_integers(&self, occupations: &[i64]) -> i64 {
        self.constant() + self.linear().iter().zip(occupations).map(|(k, n)| k * n).sum::<i64>()
    }

    /// Exact value at the Hartree–Fock point `(1,…,1,0,…,0)`.
    pub fn value_at_hartree_fock(&self) -> i64 {
        self.constant() + self.linear()[..self.setting.n_particles()].iter().sum::<i64>()
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ConstraintCatalog {
    pub setting: Setting,
    pub inequalities: Vec<GPConstraint>,
    /// Affine equalities `κ⁰ + Σ κⁱλᵢ = 0`; only the Borland–Dennis setting has any.
    pub equalities: Vec<Vec<i64>>,
}

impl ConstraintCatalog {
    /// Constraint by 1-based index.
    pub fn get(&self, index: usize) -> Option<&GPConstraint> {
        self.inequalities.get(index.checked_sub(1)?)
    }

    pub fn len(&self) -> usize {
        self.inequalities.len()
    }

    pub fn is_empty(&self) -> bool {
        self.inequalities.is_empty()
    }

    /// Line-delimited JSON, one record per constraint; byte-stable.
    pub fn export(&self) -> String {
        let mut out = String::new();
        for c in &self.inequalities {
            let (pairs, cs) = match &c.bound {
                ClassBound::Pairs(p) => {
                    (p.iter().map(|(q, _)| [q.r, q.s]).collect(), p.iter().map(|(_, c)| c.to_string()).collect())
                }
                ClassBound::Scalar(s) => (Vec::new(), vec![s.to_string()]),
            };
            let rec = ExportRecord { index: c.index, kind: RecordKind::Inequality, kappa: c.coeffs.clone(), pairs, c: cs };
            out.push_str(&serde_json::to_string(&rec).expect("record serializes"));
            out.push('\n');
        }
        for (k, e) in self.equalities.iter().enumerate() {
            let rec =
                ExportRecord { index: k + 1, kind: RecordKind::Equality, kappa: e.clone(), pairs: Vec::new(), c: Vec::new() };
            out.push_str(&serde_json::to_string(&rec).expect("record serializes"));
            out.push('\n');
        }
        out
    }

    /// Reads the format written by [`ConstraintCatalog::export`].
    pub fn import(setting: Setting, text: &str) -> Result<Self, CatalogError> {
        let mut inequalities = Vec::new();
        let mut equalities = Vec::new();
        for (ln, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() {
                continue;
            }
            let perr = |message: String| CatalogError::Parse { line: ln + 1, message };
            let rec: ExportRecord = serde_json::from_str(line).map_err(|e| perr(e.to_string()))?;
            if rec.kappa.len() != setting.dim() + 1 {
                return Err(perr(format!("expected {} coefficients, got {}", setting.dim() + 1, rec.kappa.len())));
            }
            match rec.kind {
                RecordKind::Equality => equalities.push(rec.kappa),
                RecordKind::Inequality => {
                    let cs: Vec<Rational> = rec
                        .c
                        .iter()
                        .map(|s| s.parse::<Rational>().map_err(|e| perr(e.to_string())))
                        .collect::<Result<_, _>>()?;
                    let bound = if rec.pairs.is_empty() {
                        match cs.as_slice() {
                            [c] => ClassBound::Scalar(c.clone()),
                            _ => return Err(perr("empty class needs exactly one prefactor".into())),
                        }
                    } else {
                        if cs.len() != rec.pairs.len() {
                            return Err(perr("one prefactor per pair required".into()));
                        }
                        let mut v = Vec::new();
                        for ([r, s], c) in rec.pairs.iter().zip(cs) {
                            v.push((FacetPair::new(*r, *s, setting)?, c));
                        }
                        ClassBound::Pairs(v)
                    };
                    inequalities.push(GPConstraint { setting, index: rec.index, coeffs: rec.kappa, bound });
                }
            }
        }
        Ok(Self { setting, inequalities, equalities })
    }
}

#[derive(Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
enum RecordKind {
    Inequality,
    Equality,
}

#[derive(Serialize, Deserialize)]
struct ExportRecord {
    index: usize,
    kind: RecordKind,
    kappa: Vec<i64>,
    pairs: Vec<[usize; 2]>,
    c: Vec<String>,
}

const TABLE_3_10: &str = include_str!("../data/gpc_3_10.txt");
const TABLE_4_10: &str = include_str!("../data/gpc_4_10.txt");
const TABLE_5_10: &str = include_str!("../data/gpc_5_10.txt");

/// Returns the embedded catalog for one of the four known settings.
pub fn load_setting(setting: Setting) -> Result<&'static ConstraintCatalog, CatalogError> {
    static BD: OnceLock<ConstraintCatalog> = OnceLock::new();
    static T310: OnceLock<ConstraintCatalog> = OnceLock::new();
    static T410: OnceLock<ConstraintCatalog> = OnceLock::new();
    static T510: OnceLock<ConstraintCatalog> = OnceLock::new();
    let parse = |text: &str| parse_table(setting, text).expect("embedded table is well formed");
    match (setting.n_particles(), setting.dim()) {
        (3, 6) => Ok(BD.get_or_init(borland_dennis)),
        (3, 10) => Ok(T310.get_or_init(|| parse(TABLE_3_10))),
        (4, 10) => Ok(T410.get_or_init(|| parse(TABLE_4_10))),
        (5, 10) => Ok(T510.get_or_init(|| parse(TABLE_5_10))),
        _ => Err(CatalogError::UnknownSetting(setting)),
    }
}

fn borland_dennis() -> ConstraintCatalog {
    let setting = Setting::BORLAND_DENNIS;
    ConstraintCatalog {
        setting,
        inequalities: vec![GPConstraint {
            setting,
            index: 1,
            coeffs: vec![2, -1, -1, 0, -1, 0, 0],
            bound: ClassBound::Pairs(vec![(FacetPair { r: 1, s: 1 }, Rational::new(1, 2))]),
        }],
        // λ1 + λ6 = λ2 + λ5 = λ3 + λ4 = 1
        equalities: vec![
            vec![-1, 1, 0, 0, 0, 0, 1],
            vec![-1, 0, 1, 0, 0, 1, 0],
            vec![-1, 0, 0, 1, 1, 0, 0],
        ],
    }
}

/// Parses the `index | κ… | pairs | c` text layout of the data files.
pub fn parse_table(setting: Setting, text: &str) -> Result<ConstraintCatalog, CatalogError> {
    let mut inequalities = Vec::new();
    for (ln, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let perr = |message: String| CatalogError::Parse { line: ln + 1, message };
        let cols: Vec<&str> = line.split('|').map(str::trim).collect();
        let [idx, kappa, pairs, cs] = cols.as_slice() else {
            return Err(perr("expected four `|`-separated columns".into()));
        };
        let index: usize = idx.parse().map_err(|_| perr(format!("bad index `{idx}`")))?;
        let coeffs: Vec<i64> = kappa
            .split_whitespace()
            .map(|t| t.parse().map_err(|_| perr(format!("bad coefficient `{t}`"))))
            .collect::<Result<_, _>>()?;
        if coeffs.len() != setting.dim() + 1 {
            return Err(perr(format!("expected {} coefficients, got {}", setting.dim() + 1, coeffs.len())));
        }
        let prefactors: Vec<Rational> = cs
            .split(',')
            .map(|t| t.parse::<Rational>().map_err(|e| perr(e.to_string())))
            .collect::<Result<_, _>>()?;
        let cells = parse_pair_cells(pairs).map_err(perr)?;
        let bound = if cells.is_empty() {
            match prefactors.as_slice() {
                [c] => ClassBound::Scalar(c.clone()),
                _ => return Err(perr("empty class needs exactly one prefactor".into())),
            }
        } else {
            if cells.len() != prefactors.len() {
                return Err(perr("pair and prefactor counts differ".into()));
            }
            let mut v = Vec::new();
            for (cell, c) in cells.iter().zip(prefactors) {
                v.push((decode_pair_notation(cell, setting)?, c));
            }
            ClassBound::Pairs(v)
        };
        if index != inequalities.len() + 1 {
            return Err(perr(format!("indices must be consecutive from 1, got {index}")));
        }
        inequalities.push(GPConstraint { setting, index, coeffs, bound });
    }
    Ok(ConstraintCatalog { setting, inequalities, equalities: Vec::new() })
}

/// `{7}, {1, 8}` → `[[7], [1, 8]]`.
fn parse_pair_cells(s: &str) -> Result<Vec<Vec<usize>>, String> {
    let mut out = Vec::new();
    let mut rest = s.trim();
    while !rest.is_empty() {
        let open = rest.find('{').ok_or_else(|| format!("expected `{{` in `{s}`"))?;
        let close = rest.find('}').ok_or_else(|| format!("unbalanced braces in `{s}`"))?;
        let inner = &rest[open + 1..close];
        let cell: Vec<usize> = inner
            .split(',')
            .map(|t| t.trim().parse().map_err(|_| format!("bad pair entry `{inner}`")))
            .collect::<Result<_, _>>()?;
        out.push(cell);
        rest = rest[close + 1..].trim_start_matches([',', ' ']);
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn s(n: usize, d: usize) -> Setting {
        Setting::new(n, d).unwrap()
    }

    #[test]
    fn row_counts() {
        assert_eq!(load_setting(s(3, 10)).unwrap().len(), 93);
        assert_eq!(load_setting(s(4, 10)).unwrap().len(), 125);
        assert_eq!(load_setting(s(5, 10)).unwrap().len(), 161);
        let bd = load_setting(s(3, 6)).unwrap();
        assert_eq!(bd.len(), 1);
        assert_eq!(bd.equalities.len(), 3);
    }

    #[test]
    fn transcribed_rows() {
        let t = load_setting(s(3, 10)).unwrap();
        let row3 = t.get(3).unwrap();
        assert_eq!(row3.coeffs, vec![3, -2, 0, 0, 0, -1, -1, -1, -1, 0, -2]);
        assert_eq!(row3.bound, ClassBound::Scalar(Rational::new(9, 14)));
        let row7 = t.get(7).unwrap();
        assert_eq!(
            row7.bound,
            ClassBound::Pairs(vec![(FacetPair { r: 0, s: 4 }, Rational::one()), (FacetPair { r: 1, s: 3 }, Rational::new(3, 4))])
        );

        let t5 = load_setting(s(5, 10)).unwrap();
        let row1 = t5.get(1).unwrap();
        assert_eq!(row1.coeffs, vec![1, -1, 0, 0, 0, 0, 0, 0, 0, 0, 0]);
        assert_eq!(row1.minimal_pairs(), vec![decode_pair_notation(&[1], s(5, 10)).unwrap()]);

        let bd = load_setting(Setting::BORLAND_DENNIS).unwrap();
        assert_eq!(bd.inequalities[0].coeffs, vec![2, -1, -1, 0, -1, 0, 0]);
    }

    #[test]
    fn unknown_setting() {
        assert_eq!(load_setting(s(2, 8)), Err(CatalogError::UnknownSetting(s(2, 8))));
        assert!(Setting::new(0, 4).is_err());
        assert!(Setting::new(4, 4).is_err());
    }

    #[test]
    fn decoding_examples() {
        assert_eq!(decode_pair_notation(&[7], s(3, 10)).unwrap(), FacetPair { r: 0, s: 4 });
        assert_eq!(decode_pair_notation(&[1, 8], s(3, 10)).unwrap(), FacetPair { r: 1, s: 3 });
        assert_eq!(decode_pair_notation(&[2], s(4, 10)).unwrap(), FacetPair { r: 2, s: 0 });
        assert_eq!(decode_pair_notation(&[3, 4], s(3, 10)).unwrap(), s(3, 10).hartree_fock_pair());
    }

    #[test]
    fn malformed_entries() {
        for bad in [&[][..], &[0], &[12], &[3, 3], &[5, 4], &[1, 2, 3], &[4, 8]] {
            assert!(
                matches!(decode_pair_notation(bad, s(3, 10)), Err(CatalogError::MalformedEntry { .. })),
                "{bad:?}"
            );
        }
    }

    #[test]
    fn decoded_pairs_are_valid_and_reencode() {
        for setting in Setting::KNOWN {
            let cat = load_setting(setting).unwrap();
            for c in &cat.inequalities {
                for p in c.minimal_pairs() {
                    assert!(p.r <= setting.n_particles() && p.s <= setting.holes() && p.r + p.s > 0);
                    assert_eq!(decode_pair_notation(&encode_pair_notation(p, setting), setting).unwrap(), p);
                }
                let mp = c.minimal_pairs();
                for (i, a) in mp.iter().enumerate() {
                    for b in &mp[i + 1..] {
                        assert!(!a.comparable(b), "row {} has comparable minimal pairs", c.index);
                    }
                }
            }
        }
    }

    #[test]
    fn export_is_stable_and_reimports() {
        for setting in Setting::KNOWN {
            let cat = load_setting(setting).unwrap();
            let a = cat.export();
            assert_eq!(a, cat.export());
            assert_eq!(&ConstraintCatalog::import(setting, &a).unwrap(), cat);
        }
        let first = load_setting(s(3, 10)).unwrap().export().lines().nth(2).unwrap().to_string();
        assert_eq!(
            first,
            r#"{"index":3,"kind":"inequality","kappa":[3,-2,0,0,0,-1,-1,-1,-1,0,-2],"pairs":[],"c":["9/14"]}"#
        );
    }

    #[test]
    fn setting_parsing() {
        assert_eq!("3,10".parse::<Setting>().unwrap(), s(3, 10));
        assert_eq!("(4, 10)".parse::<Setting>().unwrap(), s(4, 10));
        assert!("3;10".parse::<Setting>().is_err());
    }
}
