//! Two-phase primal simplex over exact rationals.
//!
//! The solver works on a compact (Tucker) tableau that stores only the
//! nonbasic columns, so a pivot costs `rows * nonbasic` rational updates.
//! Entering and leaving variables follow Bland's rule with lowest-label
//! tie-breaking, which makes every solve deterministic and cycle-free on
//! the heavily degenerate polytopes this crate works with.

use std::fmt;

use thiserror::Error;

use crate::rational::Rational;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Sense {
    Maximize,
    Minimize,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Relation {
    Le,
    Eq,
    Ge,
}

impl fmt::Display for Relation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Relation::Le => "<=",
            Relation::Eq => "=",
            Relation::Ge => ">=",
        })
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LinearConstraint {
    pub coeffs: Vec<Rational>,
    pub relation: Relation,
    pub rhs: Rational,
}

impl LinearConstraint {
    pub fn new(coeffs: Vec<Rational>, relation: Relation, rhs: Rational) -> Self {
        Self { coeffs, relation, rhs }
    }

    fn is_satisfied_by(&self, x: &[Rational]) -> bool {
        let lhs: Rational = self.coeffs.iter().zip(x).map(|(a, v)| a * v).sum();
        match self.relation {
            Relation::Le => lhs <= self.rhs,
            Relation::Eq => lhs == self.rhs,
            Relation::Ge => lhs >= self.rhs,
        }
    }
}

/// Box bounds on a single variable; `None` means unbounded on that side.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct VariableBounds {
    pub lower: Option<Rational>,
    pub upper: Option<Rational>,
}

impl VariableBounds {
    pub fn non_negative() -> Self {
        Self { lower: Some(Rational::zero()), upper: None }
    }

    pub fn free() -> Self {
        Self { lower: None, upper: None }
    }

    pub fn fixed(value: Rational) -> Self {
        Self { lower: Some(value.clone()), upper: Some(value) }
    }

    pub fn between(lower: Rational, upper: Rational) -> Self {
        Self { lower: Some(lower), upper: Some(upper) }
    }
}

/// `sense  objective·x + objective_constant` subject to the constraints and bounds.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LinearProgram {
    pub sense: Sense,
    pub objective: Vec<Rational>,
    pub objective_constant: Rational,
    pub constraints: Vec<LinearConstraint>,
    pub bounds: Vec<VariableBounds>,
    pub variable_names: Vec<String>,
}

impl LinearProgram {
    /// An LP over `n` non-negative variables named `x1..xn`.
    pub fn new(sense: Sense, objective: Vec<Rational>) -> Self {
        let n = objective.len();
        Self {
            sense,
            objective,
            objective_constant: Rational::zero(),
            constraints: Vec::new(),
            bounds: vec![VariableBounds::non_negative(); n],
            variable_names: (1..=n).map(|i| format!("x{i}")).collect(),
        }
    }

    pub fn with_constant(mut self, c: Rational) -> Self {
        self.objective_constant = c;
        self
    }

    pub fn with_names(mut self, names: Vec<String>) -> Self {
        self.variable_names = names;
        self
    }

    pub fn num_vars(&self) -> usize {
        self.objective.len()
    }

    pub fn push(&mut self, coeffs: Vec<Rational>, relation: Relation, rhs: Rational) {
        self.constraints.push(LinearConstraint::new(coeffs, relation, rhs));
    }

    pub fn set_bounds(&mut self, var: usize, bounds: VariableBounds) {
        self.bounds[var] = bounds;
    }

    pub fn objective_at(&self, x: &[Rational]) -> Rational {
        let lin: Rational = self.objective.iter().zip(x).map(|(c, v)| c * v).sum();
        lin + &self.objective_constant
    }

    /// Exact feasibility check of a candidate point.
    pub fn is_feasible(&self, x: &[Rational]) -> bool {
        x.len() == self.num_vars()
            && self.bounds.iter().zip(x).all(|(b, v)| {
                b.lower.as_ref().is_none_or(|l| v >= l) && b.upper.as_ref().is_none_or(|u| v <= u)
            })
            && self.constraints.iter().all(|c| c.is_satisfied_by(x))
    }

    fn validate(&self) -> Result<(), LpError> {
        let n = self.num_vars();
        if self.bounds.len() != n {
            return Err(LpError::DimensionMismatch { what: "bounds", expected: n, found: self.bounds.len() });
        }
        if self.variable_names.len() != n {
            return Err(LpError::DimensionMismatch {
                what: "variable names",
                expected: n,
                found: self.variable_names.len(),
            });
        }
        for c in &self.constraints {
            if c.coeffs.len() != n {
                return Err(LpError::DimensionMismatch { what: "constraint row", expected: n, found: c.coeffs.len() });
            }
        }
        Ok(())
    }
}

/// Writes the LP in a CPLEX-like text layout with exact rational coefficients.
impl fmt::Display for LinearProgram {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let term_list = |coeffs: &[Rational]| -> String {
            let mut out = String::new();
            for (c, name) in coeffs.iter().zip(&self.variable_names) {
                if c.is_zero() {
                    continue;
                }
                if out.is_empty() {
                    if c.is_negative() {
                        out.push_str("- ");
                    }
                } else {
                    out.push_str(if c.is_negative() { " - " } else { " + " });
                }
                let a = c.abs();
                if a != Rational::one() {
                    out.push_str(&format!("{a} "));
                }
                out.push_str(name);
            }
            if out.is_empty() {
                out.push('0');
            }
            out
        };
        writeln!(f, "{}", if self.sense == Sense::Maximize { "Maximize" } else { "Minimize" })?;
        write!(f, " obj: {}", term_list(&self.objective))?;
        if !self.objective_constant.is_zero() {
            write!(f, " + {}", self.objective_constant)?;
        }
        writeln!(f)?;
        writeln!(f, "Subject To")?;
        for (i, c) in self.constraints.iter().enumerate() {
            writeln!(f, " c{}: {} {} {}", i + 1, term_list(&c.coeffs), c.relation, c.rhs)?;
        }
        writeln!(f, "Bounds")?;
        for (b, name) in self.bounds.iter().zip(&self.variable_names) {
            match (&b.lower, &b.upper) {
                (Some(l), Some(u)) if l == u => writeln!(f, " {name} = {l}")?,
                (Some(l), Some(u)) => writeln!(f, " {l} <= {name} <= {u}")?,
                (Some(l), None) => writeln!(f, " {name} >= {l}")?,
                (None, Some(u)) => writeln!(f, " -inf <= {name} <= {u}")?,
                (None, None) => writeln!(f, " {name} free")?,
            }
        }
        writeln!(f, "End")
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LpSolution {
    pub value: Rational,
    pub point: Vec<Rational>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum LpOutcome {
    Optimal(LpSolution),
    Infeasible,
    Unbounded,
}

impl LpOutcome {
    pub fn optimal(self) -> Option<LpSolution> {
        match self {
            LpOutcome::Optimal(s) => Some(s),
            _ => None,
        }
    }
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum LpError {
    #[error("{what} has length {found}, expected {expected}")]
    DimensionMismatch { what: &'static str, expected: usize, found: usize },
}

/// How an original variable is expressed through standard-form columns.
enum VarMap {
    Fixed(Rational),
    /// `x = offset + col`
    Shift { col: usize, offset: Rational },
    /// `x = offset - col`
    Flip { col: usize, offset: Rational },
    /// `x = pos - neg`
    Split { pos: usize, neg: usize },
}

pub fn solve_exact(lp: &LinearProgram) -> Result<LpOutcome, LpError> {
    lp.validate()?;
    for b in &lp.bounds {
        if let (Some(l), Some(u)) = (&b.lower, &b.upper) {
            if l > u {
                return Ok(LpOutcome::Infeasible);
            }
        }
    }

    // Standard form: columns y >= 0.
    let mut maps = Vec::with_capacity(lp.num_vars());
    let mut ncols = 0usize;
    let mut extra_rows: Vec<(usize, Rational)> = Vec::new(); // col <= bound
    for b in &lp.bounds {
        let m = match (&b.lower, &b.upper) {
            (Some(l), Some(u)) if l == u => VarMap::Fixed(l.clone()),
            (Some(l), upper) => {
                let col = ncols;
                ncols += 1;
                if let Some(u) = upper {
                    extra_rows.push((col, u - l));
                }
                VarMap::Shift { col, offset: l.clone() }
            }
            (None, Some(u)) => {
                let col = ncols;
                ncols += 1;
                VarMap::Flip { col, offset: u.clone() }
            }
            (None, None) => {
                let pos = ncols;
                let neg = ncols + 1;
                ncols += 2;
                VarMap::Split { pos, neg }
            }
        };
        maps.push(m);
    }

    let translate = |coeffs: &[Rational]| -> (Vec<Rational>, Rational) {
        let mut row = vec![Rational::zero(); ncols];
        let mut constant = Rational::zero();
        for (a, m) in coeffs.iter().zip(&maps) {
            if a.is_zero() {
                continue;
            }
            match m {
                VarMap::Fixed(v) => constant += &(a * v),
                VarMap::Shift { col, offset } => {
                    row[*col] += a;
                    constant += &(a * offset);
                }
                VarMap::Flip { col, offset } => {
                    row[*col] -= a;
                    constant += &(a * offset);
                }
                VarMap::Split { pos, neg } => {
                    row[*pos] += a;
                    row[*neg] -= a;
                }
            }
        }
        (row, constant)
    };

    let mut rows: Vec<(Vec<Rational>, Relation, Rational)> = Vec::new();
    for c in &lp.constraints {
        let (row, constant) = translate(&c.coeffs);
        let rhs = &c.rhs - &constant;
        if row.iter().all(Rational::is_zero) {
            let ok = match c.relation {
                Relation::Le => !rhs.is_negative(),
                Relation::Eq => rhs.is_zero(),
                Relation::Ge => !rhs.is_positive(),
            };
            if !ok {
                return Ok(LpOutcome::Infeasible);
            }
            continue;
        }
        rows.push((row, c.relation, rhs));
    }
    for (col, ub) in extra_rows {
        let mut row = vec![Rational::zero(); ncols];
        row[col] = Rational::one();
        rows.push((row, Relation::Le, ub));
    }

    // Constant objective terms do not affect the argmax; the value is recomputed below.
    let (obj_row, _) = translate(&lp.objective);
    let obj_row: Vec<Rational> = match lp.sense {
        Sense::Maximize => obj_row,
        Sense::Minimize => obj_row.iter().map(|c| -c).collect(),
    };

    let Some(y) = Tableau::solve(ncols, rows, &obj_row)? else {
        return Ok(LpOutcome::Infeasible);
    };
    let Some(y) = y else {
        return Ok(LpOutcome::Unbounded);
    };

    let point: Vec<Rational> = maps
        .iter()
        .map(|m| match m {
            VarMap::Fixed(v) => v.clone(),
            VarMap::Shift { col, offset } => offset + &y[*col],
            VarMap::Flip { col, offset } => offset - &y[*col],
            VarMap::Split { pos, neg } => &y[*pos] - &y[*neg],
        })
        .collect();
    let value = lp.objective_at(&point);
    debug_assert!(lp.is_feasible(&point));
    Ok(LpOutcome::Optimal(LpSolution { value, point }))
}

struct Tableau {
    /// Row-major coefficients over the nonbasic columns.
    a: Vec<Vec<Rational>>,
    rhs: Vec<Rational>,
    cost: Vec<Rational>,
    z0: Rational,
    basic: Vec<usize>,
    nonbasic: Vec<usize>,
    first_artificial: usize,
}

impl Tableau {
    /// Maximizes `obj·y` over `rows`, `y >= 0`.
    ///
    /// Returns `None` if infeasible, `Some(None)` if unbounded, otherwise the
    /// optimal standard-form point.
    #[allow(clippy::type_complexity)]
    fn solve(
        ncols: usize,
        rows: Vec<(Vec<Rational>, Relation, Rational)>,
        obj: &[Rational],
    ) -> Result<Option<Option<Vec<Rational>>>, LpError> {
        let n_surplus = rows.iter().filter(|(_, rel, rhs)| effective_relation(*rel, rhs) == Relation::Ge).count();
        let n_slack = rows.iter().filter(|(_, rel, rhs)| effective_relation(*rel, rhs) == Relation::Le).count();
        let first_artificial = ncols + n_slack + n_surplus;

        let mut nonbasic: Vec<usize> = (0..ncols).collect();
        let mut surplus_labels = Vec::new();
        let mut next_aux = ncols;
        let mut next_art = first_artificial;
        let mut basic = Vec::with_capacity(rows.len());
        let mut a = Vec::with_capacity(rows.len());
        let mut rhs = Vec::with_capacity(rows.len());
        let mut surplus_of_row = Vec::with_capacity(rows.len());

        for (row, rel, b) in rows {
            let (row, b, rel) = if b.is_negative() {
                (row.iter().map(|v| -v).collect::<Vec<_>>(), -b, flip(rel))
            } else {
                (row, b, rel)
            };
            match rel {
                Relation::Le => {
                    basic.push(next_aux);
                    next_aux += 1;
                    surplus_of_row.push(None);
                }
                Relation::Ge => {
                    surplus_labels.push(next_aux);
                    surplus_of_row.push(Some(surplus_labels.len() - 1));
                    next_aux += 1;
                    basic.push(next_art);
                    next_art += 1;
                }
                Relation::Eq => {
                    basic.push(next_art);
                    next_art += 1;
                    surplus_of_row.push(None);
                }
            }
            a.push(row);
            rhs.push(b);
        }
        nonbasic.extend(surplus_labels.iter().copied());
        let n_surplus_cols = surplus_labels.len();
        for (i, row) in a.iter_mut().enumerate() {
            let mut tail = vec![Rational::zero(); n_surplus_cols];
            if let Some(k) = surplus_of_row[i] {
                tail[k] = -Rational::one();
            }
            row.extend(tail);
        }

        let mut t = Tableau {
            a,
            rhs,
            cost: vec![Rational::zero(); nonbasic.len()],
            z0: Rational::zero(),
            basic,
            nonbasic,
            first_artificial,
        };

        // Phase 1: maximize -(sum of artificials).
        if t.basic.iter().any(|&l| l >= first_artificial) {
            for i in 0..t.a.len() {
                if t.basic[i] >= first_artificial {
                    t.z0 -= &t.rhs[i];
                    for j in 0..t.nonbasic.len() {
                        if !t.a[i][j].is_zero() {
                            let v = t.a[i][j].clone();
                            t.cost[j] += &v;
                        }
                    }
                }
            }
            let bounded = t.run(true);
            debug_assert!(bounded, "phase 1 is bounded by construction");
            if t.z0.is_negative() {
                return Ok(None);
            }
            t.evict_artificials();
        }

        // Phase 2.
        t.cost = vec![Rational::zero(); t.nonbasic.len()];
        t.z0 = Rational::zero();
        for (j, &l) in t.nonbasic.iter().enumerate() {
            if l < ncols {
                t.cost[j] = obj[l].clone();
            }
        }
        for i in 0..t.a.len() {
            let l = t.basic[i];
            if l < ncols && !obj[l].is_zero() {
                let c = &obj[l];
                t.z0 += &(c * &t.rhs[i]);
                for j in 0..t.nonbasic.len() {
                    if !t.a[i][j].is_zero() {
                        let d = c * &t.a[i][j];
                        t.cost[j] -= &d;
                    }
                }
            }
        }
        if !t.run(false) {
            return Ok(Some(None));
        }

        let mut y = vec![Rational::zero(); ncols];
        for (i, &l) in t.basic.iter().enumerate() {
            if l < ncols {
                y[l] = t.rhs[i].clone();
            }
        }
        Ok(Some(Some(y)))
    }

    /// Pivots until optimal (returns true) or unbounded (returns false).
    fn run(&mut self, phase_one: bool) -> bool {
        loop {
            let entering = self
                .cost
                .iter()
                .enumerate()
                .filter(|(_, c)| c.is_positive())
                .min_by_key(|(j, _)| self.nonbasic[*j])
                .map(|(j, _)| j);
            let Some(c) = entering else {
                return true;
            };
            let mut leave: Option<(usize, Rational)> = None;
            for i in 0..self.a.len() {
                let p = &self.a[i][c];
                if !p.is_positive() {
                    continue;
                }
                let ratio = &self.rhs[i] / p;
                let better = match &leave {
                    None => true,
                    Some((r, best)) => ratio < *best || (ratio == *best && self.basic[i] < self.basic[*r]),
                };
                if better {
                    leave = Some((i, ratio));
                }
            }
            let Some((r, _)) = leave else {
                return false;
            };
            let leaving = self.basic[r];
            self.pivot(r, c);
            if phase_one && leaving >= self.first_artificial {
                self.drop_column(c);
            }
        }
    }

    fn pivot(&mut self, r: usize, c: usize) {
        let p = self.a[r][c].clone();
        let inv = p.recip();
        let ncol = self.nonbasic.len();

        let mut prow = std::mem::take(&mut self.a[r]);
        for (j, v) in prow.iter_mut().enumerate() {
            if j == c {
                *v = inv.clone();
            } else if !v.is_zero() {
                *v = &*v * &inv;
            }
        }
        self.rhs[r] = &self.rhs[r] * &inv;
        let prhs = self.rhs[r].clone();

        for i in 0..self.a.len() {
            if i == r {
                continue;
            }
            let f = self.a[i][c].clone();
            if f.is_zero() {
                continue;
            }
            let row = &mut self.a[i];
            for j in 0..ncol {
                if j == c {
                    row[j] = -(&f * &inv);
                } else if !prow[j].is_zero() {
                    let d = &f * &prow[j];
                    row[j] -= &d;
                }
            }
            let d = &f * &prhs;
            self.rhs[i] -= &d;
        }

        let f = self.cost[c].clone();
        if !f.is_zero() {
            for j in 0..ncol {
                if j == c {
                    self.cost[j] = -(&f * &inv);
                } else if !prow[j].is_zero() {
                    let d = &f * &prow[j];
                    self.cost[j] -= &d;
                }
            }
            self.z0 += &(&f * &prhs);
        }

        self.a[r] = prow;
        std::mem::swap(&mut self.basic[r], &mut self.nonbasic[c]);
    }

    fn drop_column(&mut self, c: usize) {
        for row in &mut self.a {
            row.remove(c);
        }
        self.cost.remove(c);
        self.nonbasic.remove(c);
    }

    /// After a feasible phase 1, pivots zero-level artificials out of the
    /// basis and deletes rows that turn out to be redundant.
    fn evict_artificials(&mut self) {
        let mut i = 0;
        while i < self.a.len() {
            if self.basic[i] < self.first_artificial {
                i += 1;
                continue;
            }
            debug_assert!(self.rhs[i].is_zero());
            let col = (0..self.nonbasic.len())
                .filter(|&j| self.nonbasic[j] < self.first_artificial && !self.a[i][j].is_zero())
                .min_by_key(|&j| self.nonbasic[j]);
            match col {
                Some(j) => {
                    self.pivot(i, j);
                    self.drop_column(j);
                    i += 1;
                }
                None => {
                    self.a.remove(i);
                    self.rhs.remove(i);
                    self.basic.remove(i);
                }
            }
        }
        let keep: Vec<usize> =
            (0..self.nonbasic.len()).filter(|&j| self.nonbasic[j] < self.first_artificial).collect();
        if keep.len() != self.nonbasic.len() {
            for row in &mut self.a {
                *row = keep.iter().map(|&j| row[j].clone()).collect();
            }
            self.cost = keep.iter().map(|&j| self.cost[j].clone()).collect();
            self.nonbasic = keep.iter().map(|&j| self.nonbasic[j]).collect();
        }
    }
}

fn flip(rel: Relation) -> Relation {
    match rel {
        Relation::Le => Relation::Ge,
        Relation::Ge => Relation::Le,
        Relation::Eq => Relation::Eq,
    }
}

fn effective_relation(rel: Relation, rhs: &Rational) -> Relation {
    if rhs.is_negative() {
        flip(rel)
    } else {
        rel
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn r(n: i64) -> Rational {
        Rational::from_integer(n)
    }

    fn q(n: i64, d: i64) -> Rational {
        Rational::new(n, d)
    }

    #[test]
    fn textbook_maximum() {
        // max 3x + 5y s.t. x <= 4, 2y <= 12, 3x + 2y <= 18
        let mut lp = LinearProgram::new(Sense::Maximize, vec![r(3), r(5)]);
        lp.push(vec![r(1), r(0)], Relation::Le, r(4));
        lp.push(vec![r(0), r(2)], Relation::Le, r(12));
        lp.push(vec![r(3), r(2)], Relation::Le, r(18));
        let sol = solve_exact(&lp).unwrap().optimal().unwrap();
        assert_eq!(sol.value, r(36));
        assert_eq!(sol.point, vec![r(2), r(6)]);
    }

    #[test]
    fn infeasible_box() {
        let mut lp = LinearProgram::new(Sense::Minimize, vec![r(1)]);
        lp.set_bounds(0, VariableBounds::free());
        lp.push(vec![r(1)], Relation::Ge, r(3));
        lp.push(vec![r(1)], Relation::Le, r(2));
        assert_eq!(solve_exact(&lp).unwrap(), LpOutcome::Infeasible);
    }

    #[test]
    fn unbounded_ray() {
        let mut lp = LinearProgram::new(Sense::Maximize, vec![r(1), r(1)]);
        lp.push(vec![r(1), r(-1)], Relation::Le, r(1));
        assert_eq!(solve_exact(&lp).unwrap(), LpOutcome::Unbounded);
    }

    #[test]
    fn equalities_free_variables_and_fixed_bounds() {
        // min x - y with x free, y in [1/3, 2], x + y = 1, x fixed by nothing else
        let mut lp = LinearProgram::new(Sense::Minimize, vec![r(1), r(-1), r(0)]);
        lp.set_bounds(0, VariableBounds::free());
        lp.set_bounds(1, VariableBounds::between(q(1, 3), r(2)));
        lp.set_bounds(2, VariableBounds::fixed(q(7, 5)));
        lp.push(vec![r(1), r(1), r(0)], Relation::Eq, r(1));
        lp.push(vec![r(1), r(1), r(1)], Relation::Le, r(10));
        let sol = solve_exact(&lp).unwrap().optimal().unwrap();
        assert_eq!(sol.point, vec![r(-1), r(2), q(7, 5)]);
        assert_eq!(sol.value, r(-3));
    }

    #[test]
    fn redundant_equalities_are_dropped() {
        let mut lp = LinearProgram::new(Sense::Maximize, vec![r(1), r(2)]);
        lp.push(vec![r(1), r(1)], Relation::Eq, r(1));
        lp.push(vec![r(2), r(2)], Relation::Eq, r(2));
        lp.push(vec![r(-1), r(-1)], Relation::Ge, r(-1));
        let sol = solve_exact(&lp).unwrap().optimal().unwrap();
        assert_eq!(sol.value, r(2));
    }

    #[test]
    fn degenerate_problem_terminates() {
        // Beale's cycling example (cycles under the textbook largest-coefficient rule).
        let mut lp = LinearProgram::new(Sense::Maximize, vec![q(3, 4), r(-150), q(1, 50), r(-6)]);
        lp.push(vec![q(1, 4), r(-60), q(-1, 25), r(9)], Relation::Le, r(0));
        lp.push(vec![q(1, 2), r(-90), q(-1, 50), r(3)], Relation::Le, r(0));
        lp.push(vec![r(0), r(0), r(1), r(0)], Relation::Le, r(1));
        let sol = solve_exact(&lp).unwrap().optimal().unwrap();
        assert_eq!(sol.value, q(1, 20));
    }

    #[test]
    fn dimension_mismatch_is_an_error() {
        let mut lp = LinearProgram::new(Sense::Maximize, vec![r(1), r(1)]);
        lp.constraints.push(LinearConstraint::new(vec![r(1)], Relation::Le, r(1)));
        assert!(matches!(solve_exact(&lp), Err(LpError::DimensionMismatch { .. })));
    }

    #[test]
    fn dump_layout() {
        let mut lp = LinearProgram::new(Sense::Maximize, vec![q(1, 2), r(-1)]);
        lp.push(vec![r(1), r(1)], Relation::Le, r(1));
        let text = lp.to_string();
        assert!(text.starts_with("Maximize\n obj: 1/2 x1 - x2\nSubject To\n c1: x1 + x2 <= 1\n"));
        assert!(text.ends_with("End\n"));
    }
}
