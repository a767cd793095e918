//! Linear programs shared by the order checkers.

use num_traits::{One, Zero};

use crate::lp::{solve, LpBuilder, LpOutcome, LpProblem, Relation};
use crate::matrix::RMatrix;
use crate::rational::Rational;

/// `target = M·x` over column-stochastic `M` (`m x m`, `x` is `m x n`).
///
/// Variable `i*m + k` is `M_ik`. Row `i*n + j` is entry `(i, j)` of the
/// product; rows `m*n + k` are the column sums of `M`.
pub(crate) fn post_garbling_problem(x: &RMatrix, target: &RMatrix) -> LpProblem {
    let (m, n) = x.shape();
    let mut a = RMatrix::zeros(m * n + m, m * m);
    let mut b = vec![Rational::zero(); m * n + m];
    for i in 0..m {
        for j in 0..n {
            let row = i * n + j;
            for k in 0..m {
                a[(row, i * m + k)] = x[(k, j)].clone();
            }
            b[row] = target[(i, j)].clone();
        }
    }
    for k in 0..m {
        for i in 0..m {
            a[(m * n + k, i * m + k)] = Rational::one();
        }
        b[m * n + k] = Rational::one();
    }
    LpProblem::feasibility(a, b).expect("consistent dimensions")
}

/// `target = y·N` over column-stochastic `N` (`n x n`, `y` is `m x n`).
///
/// Variable `k*n + j` is `N_kj`.
pub(crate) fn pre_garbling_problem(y: &RMatrix, target: &RMatrix) -> LpProblem {
    let (m, n) = y.shape();
    let mut a = RMatrix::zeros(m * n + n, n * n);
    let mut b = vec![Rational::zero(); m * n + n];
    for i in 0..m {
        for j in 0..n {
            let row = i * n + j;
            for k in 0..n {
                a[(row, k * n + j)] = y[(i, k)].clone();
            }
            b[row] = target[(i, j)].clone();
        }
    }
    for j in 0..n {
        for k in 0..n {
            a[(m * n + j, k * n + j)] = Rational::one();
        }
        b[m * n + j] = Rational::one();
    }
    LpProblem::feasibility(a, b).expect("consistent dimensions")
}

fn reshape(values: &[Rational], rows: usize, cols: usize) -> RMatrix {
    RMatrix::from_fn(rows, cols, |i, j| values[i * cols + j].clone())
}

pub(crate) fn solve_post(x: &RMatrix, target: &RMatrix) -> Option<RMatrix> {
    let m = x.rows();
    match solve(&post_garbling_problem(x, target)) {
        LpOutcome::Optimal { solution, .. } => Some(reshape(&solution, m, m)),
        _ => None,
    }
}

pub(crate) fn solve_pre(y: &RMatrix, target: &RMatrix) -> Option<RMatrix> {
    let n = y.cols();
    match solve(&pre_garbling_problem(y, target)) {
        LpOutcome::Optimal { solution, .. } => Some(reshape(&solution, n, n)),
        _ => None,
    }
}

/// Which factor of `M·C·N` the L1 fit optimizes.
#[derive(Clone, Copy)]
pub(crate) enum Side {
    Post,
    Pre,
}

/// Minimizes `‖target − M·x‖₁` (Side::Post) or `‖target − y·N‖₁` (Side::Pre)
/// over stochastic factors. Returns the factor and the exact distance.
pub(crate) fn l1_fit(side: Side, fixed: &RMatrix, target: &RMatrix) -> (RMatrix, Rational) {
    let (m, n) = target.shape();
    let size = match side {
        Side::Post => m,
        Side::Pre => n,
    };
    let mut lp = LpBuilder::new();
    let factor = lp.vars(size * size);
    let over = lp.vars(m * n);
    let under = lp.vars(m * n);
    for i in 0..m {
        for j in 0..n {
            let mut terms: Vec<(usize, Rational)> = Vec::new();
            for k in 0..size {
                let (var, coef) = match side {
                    Side::Post => (factor[i * size + k], &fixed[(k, j)]),
                    Side::Pre => (factor[k * size + j], &fixed[(i, k)]),
                };
                if !coef.is_zero() {
                    terms.push((var, coef.clone()));
                }
            }
            terms.push((over[i * n + j], -Rational::one()));
            terms.push((under[i * n + j], Rational::one()));
            lp.constrain(terms, Relation::Eq, target[(i, j)].clone());
        }
    }
    for col in 0..size {
        let terms = (0..size)
            .map(|r| (factor[r * size + col], Rational::one()))
            .collect();
        lp.constrain(terms, Relation::Eq, Rational::one());
    }
    lp.maximize(
        over.iter()
            .chain(&under)
            .map(|&v| (v, -Rational::one()))
            .collect(),
    );
    match lp.solve() {
        LpOutcome::Optimal {
            solution,
            objective,
        } => (reshape(&solution[..size * size], size, size), -objective),
        other => unreachable!("L1 fit is feasible and bounded, got {other:?}"),
    }
}
