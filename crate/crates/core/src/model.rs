//! Channels, utility matrices and input distributions.
//!
//! Orientation is fixed throughout: a channel is an `m x n` matrix whose
//! entry `(i, j)` is the probability of output letter `i` given input
//! letter `j`, so every column sums to one. A utility matrix is `n x m`:
//! entry `(j, i)` is the payoff of action `i` when the input was `j`.

use std::ops::Deref;

use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::matrix::RMatrix;
use crate::rational::{format_rational, Rational};

/// True iff all entries are nonnegative and every column sums to exactly one.
pub fn is_column_stochastic(m: &RMatrix) -> bool {
    m.is_nonnegative() && (0..m.cols()).all(|j| m.column_sum(j).is_one())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum StochasticKind {
    General,
    /// Every column is a coordinate vector.
    Deterministic,
}

/// `None` when the matrix is not column stochastic.
pub fn stochastic_kind(m: &RMatrix) -> Option<StochasticKind> {
    if !is_column_stochastic(m) {
        return None;
    }
    let deterministic = m.entries().iter().all(|x| x.is_zero() || x.is_one());
    Some(if deterministic {
        StochasticKind::Deterministic
    } else {
        StochasticKind::General
    })
}

fn check_stochastic(m: &RMatrix, what: &str) -> Result<()> {
    if let Some((i, j)) = (0..m.rows())
        .flat_map(|i| (0..m.cols()).map(move |j| (i, j)))
        .find(|&(i, j)| m[(i, j)] < Rational::zero())
    {
        return Err(Error::NotStochastic(format!(
            "{what}: entry ({i}, {j}) = {} is negative",
            format_rational(&m[(i, j)])
        )));
    }
    if let Some(j) = (0..m.cols()).find(|&j| !m.column_sum(j).is_one()) {
        return Err(Error::NotStochastic(format!(
            "{what}: column {j} sums to {}",
            format_rational(&m.column_sum(j))
        )));
    }
    Ok(())
}

/// A column-stochastic `m x n` matrix.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Channel(RMatrix);

impl Channel {
    pub fn new(matrix: RMatrix) -> Result<Self> {
        check_stochastic(&matrix, "channel")?;
        Ok(Self(matrix))
    }

    /// Number of output letters `m`.
    pub fn outputs(&self) -> usize {
        self.0.rows()
    }

    /// Number of input letters `n`.
    pub fn inputs(&self) -> usize {
        self.0.cols()
    }

    pub fn matrix(&self) -> &RMatrix {
        &self.0
    }

    pub fn into_matrix(self) -> RMatrix {
        self.0
    }

    /// `post · C · pre`, which is again a channel when both factors are stochastic.
    pub fn garble(&self, post: &RMatrix, pre: &RMatrix) -> Result<Channel> {
        check_stochastic(post, "post-garbling")?;
        check_stochastic(pre, "pre-garbling")?;
        let d = post.checked_mul(&self.0)?.checked_mul(pre)?;
        Ok(Channel(d))
    }
}

impl Deref for Channel {
    type Target = RMatrix;

    fn deref(&self) -> &RMatrix {
        &self.0
    }
}

/// An `n x m` utility matrix. Any rational entries are allowed.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct UtilityMatrix(RMatrix);

impl UtilityMatrix {
    pub fn new(matrix: RMatrix) -> Self {
        Self(matrix)
    }

    pub fn matrix(&self) -> &RMatrix {
        &self.0
    }

    pub fn into_matrix(self) -> RMatrix {
        self.0
    }

    /// All columns identical.
    pub fn is_indifferent(&self) -> bool {
        let first = self.0.column(0);
        (1..self.0.cols()).all(|j| self.0.column(j) == first)
    }

    /// Checks that this utility can be evaluated against `c` (`n x m` vs `m x n`).
    pub fn check_against(&self, c: &Channel) -> Result<()> {
        if self.0.rows() != c.inputs() || self.0.cols() != c.outputs() {
            return Err(Error::DimensionMismatch(format!(
                "utility is {}x{} but channel is {}x{} (expected a {}x{} utility)",
                self.0.rows(),
                self.0.cols(),
                c.outputs(),
                c.inputs(),
                c.inputs(),
                c.outputs()
            )));
        }
        Ok(())
    }
}

impl Deref for UtilityMatrix {
    type Target = RMatrix;

    fn deref(&self) -> &RMatrix {
        &self.0
    }
}

/// Strictly positive input weights, normally summing to one.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct InputDistribution(Vec<Rational>);

impl InputDistribution {
    pub fn new(weights: Vec<Rational>) -> Result<Self> {
        let d = Self::unnormalized(weights)?;
        let total = d.0.iter().fold(Rational::zero(), |acc, w| acc + w);
        if !total.is_one() {
            return Err(Error::InvalidDistribution(format!(
                "weights sum to {}, expected 1",
                format_rational(&total)
            )));
        }
        Ok(d)
    }

    /// Positivity is still enforced; the sum-to-one check is skipped.
    pub fn unnormalized(weights: Vec<Rational>) -> Result<Self> {
        if weights.is_empty() {
            return Err(Error::InvalidDistribution("no weights".into()));
        }
        if let Some(i) = weights.iter().position(|w| *w <= Rational::zero()) {
            return Err(Error::InvalidDistribution(format!(
                "weight {i} = {} is not strictly positive",
                format_rational(&weights[i])
            )));
        }
        Ok(Self(weights))
    }

    pub fn uniform(n: usize) -> Self {
        assert!(n >= 1);
        let w = Rational::new(1.into(), (n as i64).into());
        Self(vec![w; n])
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn weights(&self) -> &[Rational] {
        &self.0
    }

    pub fn is_uniform(&self) -> bool {
        self.0.iter().all(|w| *w == self.0[0])
    }

    /// The diagonal matrix `Π`.
    pub fn diag(&self) -> RMatrix {
        let n = self.0.len();
        RMatrix::from_fn(n, n, |i, j| {
            if i == j {
                self.0[i].clone()
            } else {
                Rational::zero()
            }
        })
    }

    pub fn check_against(&self, c: &Channel) -> Result<()> {
        if self.0.len() != c.inputs() {
            return Err(Error::DimensionMismatch(format!(
                "distribution has {} weights but channel has {} inputs",
                self.0.len(),
                c.inputs()
            )));
        }
        Ok(())
    }
}

/// Enumeration guards. Exceeding one is an explicit error.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Limits {
    /// Largest alphabet size for which `k^k` deterministic matrices are enumerated.
    pub max_alphabet: usize,
    /// Largest number of deterministic pairs `m^m · n^n` in a mixture membership problem.
    pub max_vertex_pairs: u128,
    /// Rounds of the alternating `M`/`N` fit in the Shannon search.
    pub alternating_rounds: usize,
}

impl Default for Limits {
    fn default() -> Self {
        Self {
            max_alphabet: 6,
            max_vertex_pairs: 65_536,
            alternating_rounds: 20,
        }
    }
}

impl Limits {
    pub(crate) fn check_alphabet(&self, what: &'static str, size: usize) -> Result<()> {
        if size > self.max_alphabet {
            let count = (size as u128).saturating_pow(size as u32);
            let limit = (self.max_alphabet as u128).saturating_pow(self.max_alphabet as u32);
            return Err(Error::EnumerationLimit { what, count, limit });
        }
        Ok(())
    }

    pub(crate) fn check_count(&self, what: &'static str, count: u128, limit: u128) -> Result<()> {
        if count > limit {
            return Err(Error::EnumerationLimit { what, count, limit });
        }
        Ok(())
    }
}

/// Number of `rows x cols` matrices with coordinate-vector columns.
pub fn deterministic_count(rows: usize, cols: usize) -> u128 {
    (rows as u128).saturating_pow(cols as u32)
}

/// The deterministic `rows x cols` matrix whose column `j` is `e_{assign[j]}`.
pub fn deterministic_from_assignment(rows: usize, assign: &[usize]) -> RMatrix {
    let mut m = RMatrix::zeros(rows, assign.len());
    for (j, &i) in assign.iter().enumerate() {
        m[(i, j)] = Rational::one();
    }
    m
}

/// Row index of the unit entry in each column, or `None` if the matrix is not deterministic.
pub fn assignment_of(m: &RMatrix) -> Option<Vec<usize>> {
    if stochastic_kind(m) != Some(StochasticKind::Deterministic) {
        return None;
    }
    Some(
        (0..m.cols())
            .map(|j| (0..m.rows()).find(|&i| m[(i, j)].is_one()).unwrap())
            .collect(),
    )
}

/// Iterates over all deterministic `rows x cols` assignments in canonical
/// order: lexicographic with column 0 most significant.
#[derive(Debug, Clone)]
pub struct Assignments {
    rows: usize,
    next: Option<Vec<usize>>,
}

impl Assignments {
    pub fn new(rows: usize, cols: usize) -> Self {
        Self {
            rows,
            next: (rows > 0).then(|| vec![0; cols]),
        }
    }
}

impl Iterator for Assignments {
    type Item = Vec<usize>;

    fn next(&mut self) -> Option<Vec<usize>> {
        let current = self.next.take()?;
        let mut succ = current.clone();
        let mut pos = succ.len();
        while pos > 0 {
            pos -= 1;
            if succ[pos] + 1 < self.rows {
                succ[pos] += 1;
                self.next = Some(succ);
                break;
            }
            succ[pos] = 0;
        }
        Some(current)
    }
}

/// All deterministic `rows x cols` matrices in canonical order.
pub fn deterministic_matrices(rows: usize, cols: usize) -> impl Iterator<Item = RMatrix> {
    Assignments::new(rows, cols).map(move |a| deterministic_from_assignment(rows, &a))
}

/// All `n x n` permutation matrices, generated from permutations in lexicographic order.
/// Row `i` of the result has its unit entry in column `perm[i]`.
pub fn permutation_matrices(n: usize) -> Vec<RMatrix> {
    let mut out = Vec::new();
    let mut perm: Vec<usize> = (0..n).collect();
    loop {
        let mut p = RMatrix::zeros(n, n);
        for (i, &j) in perm.iter().enumerate() {
            p[(i, j)] = Rational::one();
        }
        out.push(p);
        // next lexicographic permutation
        let Some(i) = (0..n.saturating_sub(1)).rev().find(|&i| perm[i] < perm[i + 1]) else {
            break;
        };
        let j = (i + 1..n).rev().find(|&j| perm[j] > perm[i]).unwrap();
        perm.swap(i, j);
        perm[i + 1..].reverse();
    }
    out
}
