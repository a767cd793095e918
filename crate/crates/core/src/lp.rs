//! Exact rational linear programming.
//!
//! Problems are in standard form: maximize `cᵀx` subject to `A·x = b`,
//! `x ≥ 0`. The solver is a dense two-phase tableau simplex with Bland's
//! rule, so pivoting never cycles and the output depends only on the input.
//! Infeasibility is reported with a Farkas vector `y` satisfying
//! `yᵀA ≤ 0` and `yᵀb > 0`, read off the phase-1 duals.

use std::collections::HashMap;

use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};
use crate::matrix::RMatrix;
use crate::rational::Rational;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LpProblem {
    constraints: RMatrix,
    rhs: Vec<Rational>,
    objective: Vec<Rational>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum LpOutcome {
    Optimal {
        solution: Vec<Rational>,
        objective: Rational,
    },
    Infeasible {
        farkas: Vec<Rational>,
    },
    Unbounded,
}

impl LpOutcome {
    pub fn is_optimal(&self) -> bool {
        matches!(self, LpOutcome::Optimal { .. })
    }

    pub fn solution(&self) -> Option<&[Rational]> {
        match self {
            LpOutcome::Optimal { solution, .. } => Some(solution),
            _ => None,
        }
    }
}

impl LpProblem {
    pub fn new(constraints: RMatrix, rhs: Vec<Rational>, objective: Vec<Rational>) -> Result<Self> {
        if rhs.len() != constraints.rows() {
            return Err(Error::DimensionMismatch(format!(
                "rhs has length {} but there are {} constraints",
                rhs.len(),
                constraints.rows()
            )));
        }
        if objective.len() != constraints.cols() {
            return Err(Error::DimensionMismatch(format!(
                "objective has length {} but there are {} variables",
                objective.len(),
                constraints.cols()
            )));
        }
        Ok(Self {
            constraints,
            rhs,
            objective,
        })
    }

    /// A pure feasibility problem (zero objective).
    pub fn feasibility(constraints: RMatrix, rhs: Vec<Rational>) -> Result<Self> {
        let zeros = vec![Rational::zero(); constraints.cols()];
        Self::new(constraints, rhs, zeros)
    }

    pub fn constraints(&self) -> &RMatrix {
        &self.constraints
    }

    pub fn rhs(&self) -> &[Rational] {
        &self.rhs
    }

    pub fn objective(&self) -> &[Rational] {
        &self.objective
    }

    /// Exact check of an outcome's certificate.
    ///
    /// `Optimal`: `A·x = b`, `x ≥ 0`, and the reported objective equals `cᵀx`.
    /// `Infeasible`: `yᵀA ≤ 0` componentwise and `yᵀb > 0`.
    /// `Unbounded` carries no certificate and always passes.
    pub fn verify(&self, outcome: &LpOutcome) -> bool {
        let a = &self.constraints;
        match outcome {
            LpOutcome::Optimal {
                solution,
                objective,
            } => {
                if solution.len() != a.cols() || solution.iter().any(|x| x.is_negative()) {
                    return false;
                }
                let rows_ok = (0..a.rows()).all(|i| {
                    let lhs = a
                        .row(i)
                        .iter()
                        .zip(solution)
                        .fold(Rational::zero(), |acc, (aij, x)| acc + aij * x);
                    lhs == self.rhs[i]
                });
                let value = self
                    .objective
                    .iter()
                    .zip(solution)
                    .fold(Rational::zero(), |acc, (c, x)| acc + c * x);
                rows_ok && value == *objective
            }
            LpOutcome::Infeasible { farkas } => {
                if farkas.len() != a.rows() {
                    return false;
                }
                let cols_ok = (0..a.cols()).all(|j| {
                    let s = (0..a.rows()).fold(Rational::zero(), |acc, i| acc + &farkas[i] * &a[(i, j)]);
                    !s.is_positive()
                });
                let yb = farkas
                    .iter()
                    .zip(&self.rhs)
                    .fold(Rational::zero(), |acc, (y, b)| acc + y * b);
                cols_ok && yb.is_positive()
            }
            LpOutcome::Unbounded => true,
        }
    }
}

/// Solves `max cᵀx s.t. A·x = b, x ≥ 0` exactly.
pub fn solve(p: &LpProblem) -> LpOutcome {
    Tableau::run(p)
}

/// Feasibility of `A·x = b, x ≥ 0`; same certificate contract as [`solve`].
pub fn feasible(constraints: &RMatrix, rhs: &[Rational]) -> Result<LpOutcome> {
    let p = LpProblem::feasibility(constraints.clone(), rhs.to_vec())?;
    Ok(solve(&p))
}

struct Tableau {
    /// Constraint rows; the last entry of each row is the right-hand side.
    rows: Vec<Vec<Rational>>,
    /// Reduced-cost row `c_j - c_Bᵀ B⁻¹ A_j`; last entry is `-c_Bᵀ B⁻¹ b`.
    z: Vec<Rational>,
    basis: Vec<usize>,
    n_orig: usize,
    width: usize,
}

impl Tableau {
    fn run(p: &LpProblem) -> LpOutcome {
        let a = &p.constraints;
        let (m, n) = a.shape();
        let width = n + m;
        // flip rows so that b >= 0, then append one artificial per row
        let mut signs = Vec::with_capacity(m);
        let mut rows = Vec::with_capacity(m);
        for i in 0..m {
            let flip = p.rhs[i].is_negative();
            signs.push(flip);
            let mut row = Vec::with_capacity(width + 1);
            for j in 0..n {
                row.push(if flip { -&a[(i, j)] } else { a[(i, j)].clone() });
            }
            for k in 0..m {
                row.push(if k == i { Rational::one() } else { Rational::zero() });
            }
            row.push(if flip { -&p.rhs[i] } else { p.rhs[i].clone() });
            rows.push(row);
        }
        let mut t = Tableau {
            rows,
            z: Vec::new(),
            basis: (n..n + m).collect(),
            n_orig: n,
            width,
        };

        // phase 1: maximize -Σ artificials
        let phase1: Vec<Rational> = (0..width)
            .map(|j| if j < n { Rational::zero() } else { -Rational::one() })
            .collect();
        t.price(&phase1);
        let finished = t.iterate(width);
        debug_assert!(finished, "phase 1 is bounded");
        let infeasibility = t.z[width].clone(); // = Σ artificials at optimum
        if infeasibility.is_positive() {
            let farkas = (0..m)
                .map(|i| {
                    let y = t
                        .basis
                        .iter()
                        .enumerate()
                        .filter(|&(_, &b)| b >= n)
                        .fold(Rational::zero(), |acc, (k, _)| acc + &t.rows[k][n + i]);
                    if signs[i] {
                        -y
                    } else {
                        y
                    }
                })
                .collect();
            return LpOutcome::Infeasible { farkas };
        }

        t.drive_out_artificials();

        // phase 2
        let mut costs = p.objective.clone();
        costs.resize(width, Rational::zero());
        t.price(&costs);
        if !t.iterate(n) {
            return LpOutcome::Unbounded;
        }
        let mut solution = vec![Rational::zero(); n];
        for (i, &b) in t.basis.iter().enumerate() {
            if b < n {
                solution[b] = t.rows[i][width].clone();
            }
        }
        LpOutcome::Optimal {
            solution,
            objective: -&t.z[width],
        }
    }

    /// Recomputes the reduced-cost row for cost vector `c` and the current basis.
    fn price(&mut self, c: &[Rational]) {
        let mut z: Vec<Rational> = c.to_vec();
        z.push(Rational::zero());
        for (i, &b) in self.basis.iter().enumerate() {
            let cb = &c[b];
            if cb.is_zero() {
                continue;
            }
            for (zj, tij) in z.iter_mut().zip(&self.rows[i]) {
                if !tij.is_zero() {
                    *zj -= cb * tij;
                }
            }
        }
        self.z = z;
    }

    /// Bland's rule pivoting over columns `< allowed`. Returns false if unbounded.
    fn iterate(&mut self, allowed: usize) -> bool {
        loop {
            let Some(q) = (0..allowed).find(|&j| self.z[j].is_positive()) else {
                return true;
            };
            let mut leave: Option<(usize, Rational)> = None;
            for (i, row) in self.rows.iter().enumerate() {
                if !row[q].is_positive() {
                    continue;
                }
                let ratio = &row[self.width] / &row[q];
                let better = match &leave {
                    None => true,
                    Some((l, best)) => ratio < *best || (ratio == *best && self.basis[i] < self.basis[*l]),
                };
                if better {
                    leave = Some((i, ratio));
                }
            }
            let Some((p, _)) = leave else {
                return false;
            };
            self.pivot(p, q);
        }
    }

    fn pivot(&mut self, p: usize, q: usize) {
        let piv = self.rows[p][q].clone();
        if !piv.is_one() {
            for x in self.rows[p].iter_mut() {
                if !x.is_zero() {
                    *x /= &piv;
                }
            }
        }
        let prow = std::mem::take(&mut self.rows[p]);
        let eliminate = |row: &mut Vec<Rational>| {
            let f = row[q].clone();
            if f.is_zero() {
                return;
            }
            for (x, pv) in row.iter_mut().zip(&prow) {
                if !pv.is_zero() {
                    *x -= &f * pv;
                }
            }
        };
        for (i, row) in self.rows.iter_mut().enumerate() {
            if i != p {
                eliminate(row);
            }
        }
        eliminate(&mut self.z);
        self.rows[p] = prow;
        self.basis[p] = q;
    }

    /// Pivots zero-level artificials out of the basis; rows where that is
    /// impossible are linearly dependent and are dropped.
    fn drive_out_artificials(&mut self) {
        let mut i = 0;
        while i < self.rows.len() {
            if self.basis[i] >= self.n_orig {
                if let Some(j) = (0..self.n_orig).find(|&j| !self.rows[i][j].is_zero()) {
                    self.pivot(i, j);
                } else {
                    self.rows.remove(i);
                    self.basis.remove(i);
                    continue;
                }
            }
            i += 1;
        }
    }
}

/// Merges identical columns. Returns the distinct columns in order of first
/// appearance together with, for each, the index of its first occurrence.
pub fn merge_duplicate_columns(columns: Vec<Vec<Rational>>) -> (Vec<Vec<Rational>>, Vec<usize>) {
    let mut seen: HashMap<Vec<Rational>, ()> = HashMap::new();
    let mut unique = Vec::new();
    let mut first = Vec::new();
    for (idx, col) in columns.into_iter().enumerate() {
        if seen.contains_key(&col) {
            continue;
        }
        seen.insert(col.clone(), ());
        unique.push(col);
        first.push(idx);
    }
    (unique, first)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Relation {
    Le,
    Eq,
    Ge,
}

/// Builds standard-form problems from `≤ / = / ≥` rows over nonnegative
/// variables by adding one slack per inequality.
#[derive(Debug, Clone, Default)]
pub struct LpBuilder {
    vars: usize,
    rows: Vec<(Vec<(usize, Rational)>, Relation, Rational)>,
    objective: Vec<(usize, Rational)>,
}

impl LpBuilder {
    pub fn new() -> Self {
        Self::default()
    }

    /// Adds a nonnegative variable and returns its index.
    pub fn var(&mut self) -> usize {
        self.vars += 1;
        self.vars - 1
    }

    pub fn vars(&mut self, count: usize) -> Vec<usize> {
        (0..count).map(|_| self.var()).collect()
    }

    pub fn constrain(&mut self, terms: Vec<(usize, Rational)>, rel: Relation, rhs: Rational) {
        self.rows.push((terms, rel, rhs));
    }

    pub fn maximize(&mut self, terms: Vec<(usize, Rational)>) {
        self.objective = terms;
    }

    /// Solves and projects the solution onto the user variables.
    pub fn solve(&self) -> LpOutcome {
        let slacks = self.rows.iter().filter(|r| r.1 != Relation::Eq).count();
        let cols = self.vars + slacks;
        let rows = self.rows.len().max(1);
        let mut a = RMatrix::zeros(rows, cols.max(1));
        let mut b = vec![Rational::zero(); rows];
        let mut next_slack = self.vars;
        for (i, (terms, rel, rhs)) in self.rows.iter().enumerate() {
            for (v, coef) in terms {
                a[(i, *v)] += coef;
            }
            match rel {
                Relation::Le => {
                    a[(i, next_slack)] = Rational::one();
                    next_slack += 1;
                }
                Relation::Ge => {
                    a[(i, next_slack)] = -Rational::one();
                    next_slack += 1;
                }
                Relation::Eq => {}
            }
            b[i] = rhs.clone();
        }
        let mut c = vec![Rational::zero(); cols.max(1)];
        for (v, coef) in &self.objective {
            c[*v] += coef;
        }
        let p = LpProblem::new(a, b, c).expect("builder keeps dimensions consistent");
        let outcome = solve(&p);
        debug_assert!(p.verify(&outcome));
        match outcome {
            LpOutcome::Optimal {
                mut solution,
                objective,
            } => {
                solution.truncate(self.vars);
                LpOutcome::Optimal { solution, objective }
            }
            other => other,
        }
    }
}
