//! Dense two-phase primal simplex over exact rationals.
//!
//! Bland's rule picks both the entering column (lowest index with a negative
//! reduced cost) and the leaving row (minimum ratio, ties to the lowest basic
//! column), so the method never cycles.

use num_traits::{Signed, Zero};

use crate::numeric::Rational;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum VarDomain {
    Free,
    NonNeg,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Cmp {
    Le,
    Ge,
    Eq,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Sense {
    Minimize,
    Maximize,
}

#[derive(Clone, Debug)]
struct Row {
    coeffs: Vec<Rational>,
    cmp: Cmp,
    rhs: Rational,
}

/// A linear program over a fixed set of variables.
#[derive(Clone, Debug)]
pub struct LinearProgram {
    domains: Vec<VarDomain>,
    rows: Vec<Row>,
    objective: Vec<Rational>,
    sense: Sense,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum LpOutcome {
    Optimal {
        value: Rational,
        point: Vec<Rational>,
    },
    /// `point` is feasible and the objective improves without bound along `ray`.
    Unbounded {
        point: Vec<Rational>,
        ray: Vec<Rational>,
    },
    Infeasible,
}

impl LinearProgram {
    pub fn new(domains: Vec<VarDomain>) -> Self {
        let n = domains.len();
        LinearProgram {
            domains,
            rows: Vec::new(),
            objective: vec![Rational::zero(); n],
            sense: Sense::Minimize,
        }
    }

    pub fn num_vars(&self) -> usize {
        self.domains.len()
    }

    pub fn add_row(&mut self, coeffs: Vec<Rational>, cmp: Cmp, rhs: Rational) {
        assert_eq!(coeffs.len(), self.num_vars(), "row width");
        self.rows.push(Row { coeffs, cmp, rhs });
    }

    /// Sparse variant of [`add_row`](Self::add_row); repeated indices add up.
    pub fn add_sparse_row(&mut self, terms: &[(usize, Rational)], cmp: Cmp, rhs: Rational) {
        let mut coeffs = vec![Rational::zero(); self.num_vars()];
        for (i, c) in terms {
            coeffs[*i] += c;
        }
        self.add_row(coeffs, cmp, rhs);
    }

    pub fn set_objective(&mut self, coeffs: Vec<Rational>, sense: Sense) {
        assert_eq!(coeffs.len(), self.num_vars(), "objective width");
        self.objective = coeffs;
        self.sense = sense;
    }

    pub fn solve(&self) -> LpOutcome {
        Tableau::build(self).run(self)
    }
}

/// Column bookkeeping for the standard-form translation.
#[derive(Clone, Copy, Debug)]
enum Column {
    /// Nonnegative part of original variable `i` (or the whole variable).
    Pos(usize),
    /// Negative part of a free variable `i`.
    Neg(usize),
    Slack,
    Artificial,
}

struct Tableau {
    columns: Vec<Column>,
    /// `m` rows of `B⁻¹A`, each with the right-hand side in the last slot.
    rows: Vec<Vec<Rational>>,
    basis: Vec<usize>,
    /// Reduced costs with the negated objective value in the last slot.
    costs: Vec<Rational>,
    banned: Vec<bool>,
}

enum Phase {
    Optimal,
    Unbounded(usize),
}

impl Tableau {
    fn build(lp: &LinearProgram) -> Tableau {
        let mut columns = Vec::new();
        for (i, d) in lp.domains.iter().enumerate() {
            columns.push(Column::Pos(i));
            if *d == VarDomain::Free {
                columns.push(Column::Neg(i));
            }
        }
        let structural = columns.len();

        // Orient every row so its rhs is nonnegative, then count extra columns.
        let mut oriented: Vec<(Vec<Rational>, Cmp, Rational)> = Vec::new();
        for row in &lp.rows {
            let mut coeffs = Vec::with_capacity(structural);
            for col in &columns[..structural] {
                match col {
                    Column::Pos(i) => coeffs.push(row.coeffs[*i].clone()),
                    Column::Neg(i) => coeffs.push(-&row.coeffs[*i]),
                    _ => unreachable!(),
                }
            }
            let (coeffs, cmp, rhs) = if row.rhs.is_negative() {
                let flipped = match row.cmp {
                    Cmp::Le => Cmp::Ge,
                    Cmp::Ge => Cmp::Le,
                    Cmp::Eq => Cmp::Eq,
                };
                (coeffs.into_iter().map(|c| -c).collect(), flipped, -&row.rhs)
            } else {
                (coeffs, row.cmp, row.rhs.clone())
            };
            oriented.push((coeffs, cmp, rhs));
        }

        let m = oriented.len();
        let mut slack_cols = Vec::with_capacity(m);
        for (_, cmp, _) in &oriented {
            if *cmp == Cmp::Eq {
                slack_cols.push(None);
            } else {
                slack_cols.push(Some(columns.len()));
                columns.push(Column::Slack);
            }
        }
        let mut art_cols = Vec::with_capacity(m);
        for (_, cmp, _) in &oriented {
            if *cmp == Cmp::Le {
                art_cols.push(None);
            } else {
                art_cols.push(Some(columns.len()));
                columns.push(Column::Artificial);
            }
        }

        let width = columns.len();
        let mut rows = Vec::with_capacity(m);
        let mut basis = Vec::with_capacity(m);
        for (r, (coeffs, cmp, rhs)) in oriented.into_iter().enumerate() {
            let mut row = coeffs;
            row.resize(width + 1, Rational::zero());
            if let Some(s) = slack_cols[r] {
                row[s] = match cmp {
                    Cmp::Le => Rational::from_integer(1.into()),
                    _ => Rational::from_integer((-1).into()),
                };
            }
            if let Some(a) = art_cols[r] {
                row[a] = Rational::from_integer(1.into());
                basis.push(a);
            } else {
                basis.push(slack_cols[r].expect("≤ rows carry a slack"));
            }
            row[width] = rhs;
            rows.push(row);
        }

        Tableau {
            columns,
            rows,
            basis,
            costs: vec![Rational::zero(); width + 1],
            banned: vec![false; width],
        }
    }

    fn width(&self) -> usize {
        self.columns.len()
    }

    /// Loads `cost` (one entry per column) and prices out the basis.
    fn load_costs(&mut self, cost: &[Rational]) {
        let w = self.width();
        let mut costs = cost.to_vec();
        costs.push(Rational::zero());
        for (r, &b) in self.basis.iter().enumerate() {
            let cb = &cost[b];
            if cb.is_zero() {
                continue;
            }
            let row = &self.rows[r];
            for j in 0..=w {
                if !row[j].is_zero() {
                    costs[j] -= cb * &row[j];
                }
            }
        }
        self.costs = costs;
    }

    fn pivot(&mut self, r: usize, col: usize) {
        let w = self.width();
        let p = self.rows[r][col].clone();
        debug_assert!(!p.is_zero());
        for v in self.rows[r].iter_mut() {
            if !v.is_zero() {
                *v /= &p;
            }
        }
        let pivot_row = self.rows[r].clone();
        for (i, row) in self.rows.iter_mut().enumerate() {
            if i == r || row[col].is_zero() {
                continue;
            }
            let k = row[col].clone();
            for j in 0..=w {
                if !pivot_row[j].is_zero() {
                    row[j] -= &k * &pivot_row[j];
                }
            }
        }
        if !self.costs[col].is_zero() {
            let k = self.costs[col].clone();
            for j in 0..=w {
                if !pivot_row[j].is_zero() {
                    self.costs[j] -= &k * &pivot_row[j];
                }
            }
        }
        self.basis[r] = col;
    }

    fn iterate(&mut self) -> Phase {
        let w = self.width();
        loop {
            let entering = (0..w).find(|&j| !self.banned[j] && self.costs[j].is_negative());
            let Some(col) = entering else {
                return Phase::Optimal;
            };
            let mut best: Option<(usize, Rational)> = None;
            for (r, row) in self.rows.iter().enumerate() {
                if !row[col].is_positive() {
                    continue;
                }
                let ratio = &row[w] / &row[col];
                let better = match &best {
                    None => true,
                    Some((br, bv)) => {
                        ratio < *bv || (ratio == *bv && self.basis[r] < self.basis[*br])
                    }
                };
                if better {
                    best = Some((r, ratio));
                }
            }
            match best {
                Some((r, _)) => self.pivot(r, col),
                None => return Phase::Unbounded(col),
            }
        }
    }

    /// Column values of the current basic solution.
    fn column_values(&self) -> Vec<Rational> {
        let w = self.width();
        let mut vals = vec![Rational::zero(); w];
        for (r, &b) in self.basis.iter().enumerate() {
            vals[b] = self.rows[r][w].clone();
        }
        vals
    }

    fn to_original(&self, vals: &[Rational], n: usize) -> Vec<Rational> {
        let mut x = vec![Rational::zero(); n];
        for (j, col) in self.columns.iter().enumerate() {
            match col {
                Column::Pos(i) => x[*i] += &vals[j],
                Column::Neg(i) => x[*i] -= &vals[j],
                _ => {}
            }
        }
        x
    }

    fn run(mut self, lp: &LinearProgram) -> LpOutcome {
        let w = self.width();
        let n = lp.num_vars();

        // Phase one: drive the artificial columns to zero.
        let has_artificial = self.columns.iter().any(|c| matches!(c, Column::Artificial));
        if has_artificial {
            let cost: Vec<Rational> = self
                .columns
                .iter()
                .map(|c| match c {
                    Column::Artificial => Rational::from_integer(1.into()),
                    _ => Rational::zero(),
                })
                .collect();
            self.load_costs(&cost);
            match self.iterate() {
                Phase::Optimal => {}
                Phase::Unbounded(_) => unreachable!("phase one is bounded below by zero"),
            }
            // costs[w] holds minus the phase-one objective
            if !self.costs[w].is_zero() {
                return LpOutcome::Infeasible;
            }
            // Pivot remaining (zero-valued) artificials out, or drop redundant rows.
            let mut r = 0;
            while r < self.rows.len() {
                if matches!(self.columns[self.basis[r]], Column::Artificial) {
                    let replacement = (0..w).find(|&j| {
                        !matches!(self.columns[j], Column::Artificial) && !self.rows[r][j].is_zero()
                    });
                    match replacement {
                        Some(j) => {
                            self.pivot(r, j);
                            r += 1;
                        }
                        None => {
                            self.rows.remove(r);
                            self.basis.remove(r);
                        }
                    }
                } else {
                    r += 1;
                }
            }
            for (j, c) in self.columns.iter().enumerate() {
                if matches!(c, Column::Artificial) {
                    self.banned[j] = true;
                }
            }
        }

        // Phase two, always as a minimisation.
        let sign = match lp.sense {
            Sense::Minimize => Rational::from_integer(1.into()),
            Sense::Maximize => Rational::from_integer((-1).into()),
        };
        let cost: Vec<Rational> = self
            .columns
            .iter()
            .map(|c| match c {
                Column::Pos(i) => &lp.objective[*i] * &sign,
                Column::Neg(i) => -(&lp.objective[*i] * &sign),
                _ => Rational::zero(),
            })
            .collect();
        self.load_costs(&cost);
        match self.iterate() {
            Phase::Optimal => {
                let point = self.to_original(&self.column_values(), n);
                let value = point
                    .iter()
                    .zip(&lp.objective)
                    .fold(Rational::zero(), |acc, (x, c)| acc + x * c);
                LpOutcome::Optimal { value, point }
            }
            Phase::Unbounded(col) => {
                let point = self.to_original(&self.column_values(), n);
                let mut dir = vec![Rational::zero(); w];
                dir[col] = Rational::from_integer(1.into());
                for (r, &b) in self.basis.iter().enumerate() {
                    dir[b] = -&self.rows[r][col];
                }
                let ray = self.to_original(&dir, n);
                LpOutcome::Unbounded { point, ray }
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numeric::{frac, int};

    fn lp(domains: &[VarDomain]) -> LinearProgram {
        LinearProgram::new(domains.to_vec())
    }

    #[test]
    fn textbook_maximum() {
        // max 3x + 2y  s.t. x + y <= 4, x + 3y <= 6, x, y >= 0  → 12 at (4, 0)
        let mut p = lp(&[VarDomain::NonNeg, VarDomain::NonNeg]);
        p.add_row(vec![int(1), int(1)], Cmp::Le, int(4));
        p.add_row(vec![int(1), int(3)], Cmp::Le, int(6));
        p.set_objective(vec![int(3), int(2)], Sense::Maximize);
        assert_eq!(
            p.solve(),
            LpOutcome::Optimal {
                value: int(12),
                point: vec![int(4), int(0)]
            }
        );
    }

    #[test]
    fn needs_phase_one() {
        // min x + y  s.t. x + 2y >= 3, 2x + y >= 3 → 2 at (1, 1)
        let mut p = lp(&[VarDomain::NonNeg, VarDomain::NonNeg]);
        p.add_row(vec![int(1), int(2)], Cmp::Ge, int(3));
        p.add_row(vec![int(2), int(1)], Cmp::Ge, int(3));
        p.set_objective(vec![int(1), int(1)], Sense::Minimize);
        match p.solve() {
            LpOutcome::Optimal { value, point } => {
                assert_eq!(value, int(2));
                assert_eq!(point, vec![int(1), int(1)]);
            }
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn free_variables_and_equalities() {
        // min x  s.t. x - y = -5/2, y <= 1, y free, x free → -3/2
        let mut p = lp(&[VarDomain::Free, VarDomain::Free]);
        p.add_row(vec![int(1), int(-1)], Cmp::Eq, frac(-5, 2));
        p.add_row(vec![int(0), int(1)], Cmp::Le, int(1));
        p.set_objective(vec![int(1), int(0)], Sense::Maximize);
        match p.solve() {
            LpOutcome::Optimal { value, .. } => assert_eq!(value, frac(-3, 2)),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn infeasible_and_unbounded() {
        let mut p = lp(&[VarDomain::Free]);
        p.add_row(vec![int(1)], Cmp::Ge, int(2));
        p.add_row(vec![int(1)], Cmp::Le, int(1));
        assert_eq!(p.solve(), LpOutcome::Infeasible);

        let mut p = lp(&[VarDomain::Free]);
        p.add_row(vec![int(1)], Cmp::Le, int(3));
        p.set_objective(vec![int(1)], Sense::Minimize);
        match p.solve() {
            LpOutcome::Unbounded { point, ray } => {
                assert!(point[0] <= int(3));
                assert!(ray[0].is_negative());
            }
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn degenerate_problem_terminates() {
        // Classic cycling example (Beale) under the textbook rule.
        let mut p = lp(&[VarDomain::NonNeg; 4]);
        p.add_row(vec![frac(1, 4), int(-60), frac(-1, 25), int(9)], Cmp::Le, int(0));
        p.add_row(vec![frac(1, 2), int(-90), frac(-1, 50), int(3)], Cmp::Le, int(0));
        p.add_row(vec![int(0), int(0), int(1), int(0)], Cmp::Le, int(1));
        p.set_objective(vec![frac(-3, 4), int(150), frac(-1, 50), int(6)], Sense::Minimize);
        match p.solve() {
            LpOutcome::Optimal { value, .. } => assert_eq!(value, frac(-1, 20)),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn redundant_equalities() {
        let mut p = lp(&[VarDomain::Free, VarDomain::Free]);
        p.add_row(vec![int(1), int(1)], Cmp::Eq, int(2));
        p.add_row(vec![int(2), int(2)], Cmp::Eq, int(4));
        p.add_row(vec![int(1), int(0)], Cmp::Ge, int(0));
        p.add_row(vec![int(0), int(1)], Cmp::Ge, int(0));
        p.set_objective(vec![int(1), int(0)], Sense::Maximize);
        match p.solve() {
            LpOutcome::Optimal { value, point } => {
                assert_eq!(value, int(2));
                assert_eq!(point, vec![int(2), int(0)]);
            }
            other => panic!("{other:?}"),
        }
    }
}
