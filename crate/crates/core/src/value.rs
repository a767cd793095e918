//! Maximal expected utility `max tr(U·D·Π)` over the three policy spaces.
//!
//! For the Blackwell space `{A·C}` the trace is `tr(G·A)` with
//! `G = C·Π·U`, so the optimum picks, for each output letter `i`, an action
//! maximizing row `i` of `G`. The Shannon space `{A·C·B}` is bilinear; a
//! linear functional over it is maximized at deterministic `A` and `B`, so
//! enumerating deterministic pre-garblings `R` suffices. The convexified
//! space is the convex hull of the same vertices and has the same maximum.

use num_traits::Zero;

use crate::error::{Error, Result};
use crate::matrix::RMatrix;
use crate::model::{deterministic_from_assignment, Assignments, Channel, InputDistribution, Limits, UtilityMatrix};
use crate::rational::Rational;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BlackwellOptimum {
    pub value: Rational,
    /// Optimal deterministic `m x m` strategy `A`.
    pub strategy: RMatrix,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ShannonOptimum {
    pub value: Rational,
    /// Optimal deterministic post-processing `A`.
    pub strategy: RMatrix,
    /// Optimal deterministic pre-garbling `R`.
    pub pre: RMatrix,
}

fn check_dims(c: &Channel, u: &UtilityMatrix, pi: &InputDistribution) -> Result<()> {
    u.check_against(c)?;
    pi.check_against(c)
}

/// `tr(U·D·Π)` for an arbitrary `m x n` joint matrix `D`.
pub fn expected_utility(u: &UtilityMatrix, d: &RMatrix, pi: &InputDistribution) -> Rational {
    u.matrix().mul(d).mul(&pi.diag()).trace()
}

/// The `m x m` gain matrix `G = C·Π·U`; `tr(U·A·C·Π) = tr(G·A)`.
fn gain_matrix(c: &RMatrix, u: &UtilityMatrix, pi: &InputDistribution) -> RMatrix {
    // scale columns of C by π, then multiply by U
    let weighted = RMatrix::from_fn(c.rows(), c.cols(), |i, j| &c[(i, j)] * &pi.weights()[j]);
    weighted.mul(u.matrix())
}

fn blackwell_unchecked(c: &RMatrix, u: &UtilityMatrix, pi: &InputDistribution) -> BlackwellOptimum {
    let g = gain_matrix(c, u, pi);
    let m = g.rows();
    let mut value = Rational::zero();
    let mut actions = Vec::with_capacity(m);
    for i in 0..m {
        let row = g.row(i);
        let mut best = 0;
        for k in 1..row.len() {
            if row[k] > row[best] {
                best = k;
            }
        }
        value += &row[best];
        actions.push(best);
    }
    BlackwellOptimum {
        value,
        strategy: deterministic_from_assignment(g.cols(), &actions),
    }
}

/// Maximal expected utility over the Blackwell policy space `Φ(C)`.
pub fn blackwell_value(c: &Channel, u: &UtilityMatrix, pi: &InputDistribution) -> Result<BlackwellOptimum> {
    check_dims(c, u, pi)?;
    Ok(blackwell_unchecked(c.matrix(), u, pi))
}

/// Maximal expected utility over the Shannon policy space `Φ_S(C)`.
///
/// Enumerates all `n^n` deterministic pre-garblings in canonical order and
/// keeps the first strict improvement.
pub fn shannon_value(
    c: &Channel,
    u: &UtilityMatrix,
    pi: &InputDistribution,
    limits: &Limits,
) -> Result<ShannonOptimum> {
    check_dims(c, u, pi)?;
    let n = c.inputs();
    limits.check_alphabet("deterministic pre-garblings n^n", n)?;
    let mut best: Option<ShannonOptimum> = None;
    for assign in Assignments::new(n, n) {
        let r = deterministic_from_assignment(n, &assign);
        let opt = blackwell_unchecked(&c.matrix().mul(&r), u, pi);
        if best.as_ref().is_none_or(|b| opt.value > b.value) {
            best = Some(ShannonOptimum {
                value: opt.value,
                strategy: opt.strategy,
                pre: r,
            });
        }
    }
    Ok(best.expect("at least one deterministic pre-garbling"))
}

/// Maximal expected utility over the convexified Shannon policy space `Φ_cS(C)`.
///
/// The maximum of a linear functional over a convex hull is attained at one
/// of the generating points `L·C·R`, all of which lie in `Φ_S(C)`.
pub fn cs_value(
    c: &Channel,
    u: &UtilityMatrix,
    pi: &InputDistribution,
    limits: &Limits,
) -> Result<ShannonOptimum> {
    shannon_value(c, u, pi, limits)
}

/// Value of an indifferent utility, `Σ_j π_j·u_j1`, which is the same for every channel.
pub fn indifferent_value(u: &UtilityMatrix, pi: &InputDistribution) -> Result<Rational> {
    if !u.is_indifferent() {
        return Err(Error::NotIndifferent);
    }
    if u.rows() != pi.len() {
        return Err(Error::DimensionMismatch(format!(
            "utility has {} rows but distribution has {} weights",
            u.rows(),
            pi.len()
        )));
    }
    Ok(pi
        .weights()
        .iter()
        .enumerate()
        .fold(Rational::zero(), |acc, (j, w)| acc + w * &u[(j, 0)]))
}
