//! Constructive pieces of the non-equivalence argument between the Shannon
//! order and reduced Blackwell-usefulness: the 2x2 counterexample family,
//! the block embedding that lifts an `(m-1) x k` channel to `m` outputs,
//! the ordering condition and utility reduction that go with it, and the
//! rescaling that moves a general input distribution into the utility.

use num_traits::{Signed, Zero};

use crate::error::{Error, Result};
use crate::matrix::RMatrix;
use crate::model::{is_column_stochastic, Channel, InputDistribution, UtilityMatrix};
use crate::orders::Certificate;
use crate::rational::{rat, Rational};
use crate::value::blackwell_value;

/// `n = 2^(m-2) + 1` inputs for `m` outputs.
pub fn embedded_inputs(m: usize) -> usize {
    (1usize << (m - 2)) + 1
}

/// `k = 2^(m-3) + 1`, the input count of the channel being embedded.
pub fn inner_inputs(m: usize) -> usize {
    (1usize << (m - 3)) + 1
}

/// Places `z` (`(m-1) x k`) in the top-left block of an `m x n` channel.
/// Columns `k+1..n` are the last coordinate vector.
pub fn embed_channel(z: &Channel, m: usize) -> Result<Channel> {
    if !(3..=usize::BITS as usize).contains(&m) {
        return Err(Error::Domain(format!("embedding needs m >= 3, got m = {m}")));
    }
    let (n, k) = (embedded_inputs(m), inner_inputs(m));
    if z.shape() != (m - 1, k) {
        return Err(Error::DimensionMismatch(format!(
            "embedding into {m} outputs needs a {}x{k} channel, got {}x{}",
            m - 1,
            z.rows(),
            z.cols()
        )));
    }
    let c = RMatrix::from_fn(m, n, |i, j| match (i < m - 1, j < k) {
        (true, true) => z[(i, j)].clone(),
        (false, false) => rat(1, 1),
        _ => Rational::zero(),
    });
    Channel::new(c)
}

/// The inverse of [`embed_channel`]: the top-left block of `c` if `c` has
/// the embedded block form for `m = c.rows()`.
pub fn embedded_inner(c: &Channel) -> Option<Channel> {
    let m = c.rows();
    if !(3..=16).contains(&m) || c.cols() != embedded_inputs(m) {
        return None;
    }
    let k = inner_inputs(m);
    let tail_ok = (k..c.cols()).all(|j| (0..m).all(|i| c[(i, j)] == if i == m - 1 { rat(1, 1) } else { Rational::zero() }));
    if !tail_ok || (0..k).any(|j| !c[(m - 1, j)].is_zero()) {
        return None;
    }
    Channel::new(RMatrix::from_fn(m - 1, k, |i, j| c[(i, j)].clone())).ok()
}

/// The garbling of embedded channels induced by `z̄ = post·z·pre`:
/// `blockdiag(post, 1)` and `blockdiag(pre, I)`.
pub fn transport_certificate(post: &RMatrix, pre: &RMatrix, m: usize) -> Certificate {
    let n = embedded_inputs(m);
    Certificate::Garbling {
        post: post.block_diag(&RMatrix::identity(1)),
        pre: pre.block_diag(&RMatrix::identity(n - pre.cols())),
    }
}

/// Checks a garbling between embedded channels and, when it has the block
/// form `blockdiag(M, 1)`, `blockdiag(N, I)`, returns the inner pair with
/// `z̄ = M·z·N` re-verified.
pub fn inner_garbling(
    z: &Channel,
    zbar: &Channel,
    m: usize,
    certificate: &Certificate,
) -> Result<Option<(RMatrix, RMatrix)>> {
    let (c, cbar) = (embed_channel(z, m)?, embed_channel(zbar, m)?);
    if !certificate.verify(&c, &cbar) {
        return Err(Error::CertificateCheck("garbling does not reproduce the embedded channel".into()));
    }
    let Certificate::Garbling { post, pre } = certificate else {
        return Ok(None);
    };
    let (n, k) = (embedded_inputs(m), inner_inputs(m));
    let inner_post = RMatrix::from_fn(m - 1, m - 1, |i, j| post[(i, j)].clone());
    let inner_pre = RMatrix::from_fn(k, k, |i, j| pre[(i, j)].clone());
    if *post != inner_post.block_diag(&RMatrix::identity(1))
        || *pre != inner_pre.block_diag(&RMatrix::identity(n - k))
    {
        return Ok(None);
    }
    let rebuilt = inner_post.mul(z.matrix()).mul(&inner_pre);
    if !is_column_stochastic(&inner_post) || !is_column_stochastic(&inner_pre) || rebuilt != *zbar.matrix() {
        return Err(Error::CertificateCheck("inner block does not reproduce z̄".into()));
    }
    Ok(Some((inner_post, inner_pre)))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum OrderingDirection {
    /// `u_i1 ≤ u_i2` on the leading rows.
    FirstAtMostSecond,
    /// `u_i1 ≥ u_i2` on the leading rows.
    FirstAtLeastSecond,
}

impl OrderingDirection {
    fn holds(self, a: &Rational, b: &Rational) -> bool {
        match self {
            OrderingDirection::FirstAtMostSecond => a <= b,
            OrderingDirection::FirstAtLeastSecond => a >= b,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OrderingReport {
    /// The first `k` rows already satisfy `direction` without permuting.
    pub satisfied: bool,
    pub direction: OrderingDirection,
    /// Row permutation `P`; the first `k` rows of `P·u` satisfy `direction`.
    pub permutation: RMatrix,
}

/// Finds a row permutation that puts `k` rows agreeing on the order of
/// their first two entries on top. Prefers `≤`, then keeps the chosen rows
/// and the remaining rows in their original order.
pub fn ordering_normalize(u: &UtilityMatrix, k: usize) -> Result<OrderingReport> {
    let n = u.rows();
    if u.cols() < 2 || k > n {
        return Err(Error::DimensionMismatch(format!(
            "ordering of {k} rows needs at least {k} rows and two columns, got {}x{}",
            n,
            u.cols()
        )));
    }
    for direction in [OrderingDirection::FirstAtMostSecond, OrderingDirection::FirstAtLeastSecond] {
        let (agree, rest): (Vec<usize>, Vec<usize>) =
            (0..n).partition(|&i| direction.holds(&u[(i, 0)], &u[(i, 1)]));
        if agree.len() < k {
            continue;
        }
        let order: Vec<usize> = agree.iter().chain(&rest).copied().collect();
        let mut permutation = RMatrix::zeros(n, n);
        for (r, &i) in order.iter().enumerate() {
            permutation[(r, i)] = rat(1, 1);
        }
        return Ok(OrderingReport {
            satisfied: (0..k).all(|i| direction.holds(&u[(i, 0)], &u[(i, 1)])),
            direction,
            permutation,
        });
    }
    Err(Error::OrderingViolated { k })
}

/// Drops the tail rows `k..n` into the constant `s = max_j Σ_{i≥k} u_ij`
/// and merges the first two actions of the leading rows by their maximum.
///
/// For every channel `z` of shape `(m-1) x k`:
/// `max_A tr(embed(z)·u·A) = max_B tr(z·ū·B) + s`.
pub fn reduce_utility(
    u: &UtilityMatrix,
    k: usize,
    direction: OrderingDirection,
) -> Result<(UtilityMatrix, Rational)> {
    let (n, m) = u.shape();
    if m < 2 || k > n {
        return Err(Error::DimensionMismatch(format!(
            "reduction to {k} rows needs a utility with at least {k} rows and two columns, got {n}x{m}"
        )));
    }
    if !(0..k).all(|i| direction.holds(&u[(i, 0)], &u[(i, 1)])) {
        return Err(Error::OrderingViolated { k });
    }
    let ubar = RMatrix::from_fn(k, m - 1, |i, j| {
        if j == 0 {
            u[(i, 0)].clone().max(u[(i, 1)].clone())
        } else {
            u[(i, j + 1)].clone()
        }
    });
    let s = (0..m)
        .map(|j| (k..n).fold(Rational::zero(), |acc, i| acc + &u[(i, j)]))
        .max()
        .expect("at least two columns");
    Ok((UtilityMatrix::new(ubar), s))
}

/// `max_A tr(c·u·A)` over deterministic `A`: each row of `c·u` picks its best action.
pub fn max_deterministic_trace(c: &RMatrix, u: &RMatrix) -> Rational {
    let g = c.mul(u);
    (0..g.rows()).fold(Rational::zero(), |acc, i| {
        acc + g.row(i).iter().max().cloned().expect("nonempty row")
    })
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LemmaFamily {
    pub c1: Channel,
    pub c2: Channel,
    pub utility: UtilityMatrix,
    pub v1: Rational,
    pub v2: Rational,
}

/// The two channels `[[1, 1/2], [0, 1/2]]` and `[[1/2, 1], [1/2, 0]]`,
/// Shannon garblings of each other by swapping inputs, and the utility
/// `[[0, ε₁], [ε₂, 0]]` under which their values differ.
///
/// For positive parameters the values come from the closed forms; for
/// negative parameters they are evaluated directly.
pub fn lemma_2x2_family(eps1: &Rational, eps2: &Rational) -> Result<LemmaFamily> {
    if !(eps1 * eps2).is_positive() || eps1 == eps2 {
        return Err(Error::Domain(format!(
            "need ε₁·ε₂ > 0 and ε₁ ≠ ε₂, got ε₁ = {eps1}, ε₂ = {eps2}"
        )));
    }
    let c1 = Channel::new(RMatrix::from_fracs(&[&[(1, 1), (1, 2)], &[(0, 1), (1, 2)]]))?;
    let c2 = Channel::new(RMatrix::from_fracs(&[&[(1, 2), (1, 1)], &[(1, 2), (0, 1)]]))?;
    let z = Rational::zero();
    let utility = UtilityMatrix::new(RMatrix::from_rows(vec![
        vec![z.clone(), eps1.clone()],
        vec![eps2.clone(), z.clone()],
    ])?);
    let (half, quarter) = (rat(1, 2), rat(1, 4));
    let (v1, v2) = if eps1.is_positive() {
        if eps1 > eps2 {
            (
                eps1 * &half + eps2 * &quarter,
                eps1 * &half + (eps2 * &half - eps1 * &quarter).max(z),
            )
        } else {
            (
                eps1 * &half + eps2 * &quarter + (eps2 * &quarter - eps1 * &half).max(z),
                eps2 * &half + eps1 * &quarter,
            )
        }
    } else {
        let pi = InputDistribution::uniform(2);
        (
            blackwell_value(&c1, &utility, &pi)?.value,
            blackwell_value(&c2, &utility, &pi)?.value,
        )
    };
    Ok(LemmaFamily { c1, c2, utility, v1, v2 })
}

/// `n·diag(π̄)·ū`: under the uniform distribution this utility has the
/// same value on every channel as `ū` has under `π̄`.
pub fn pi_rescale(ubar: &UtilityMatrix, pibar: &InputDistribution, n: usize) -> Result<UtilityMatrix> {
    if pibar.len() != n || ubar.rows() != n {
        return Err(Error::DimensionMismatch(format!(
            "rescaling needs {n} weights and {n} utility rows, got {} and {}",
            pibar.len(),
            ubar.rows()
        )));
    }
    if let Some(w) = pibar.weights().iter().find(|w| !w.is_positive()) {
        return Err(Error::InvalidDistribution(format!("weight {w} is not positive")));
    }
    let factor = rat(n as i64, 1);
    Ok(UtilityMatrix::new(RMatrix::from_fn(ubar.rows(), ubar.cols(), |i, j| {
        &factor * &pibar.weights()[i] * &ubar[(i, j)]
    })))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{deterministic_matrices, Limits};
    use crate::orders::{shannon_check, Verdict};
    use crate::random;
    use rand::Rng;

    fn ch(rows: &[&[(i64, i64)]]) -> Channel {
        Channel::new(RMatrix::from_fracs(rows)).unwrap()
    }

    /// Brute force over all deterministic `A`.
    fn trace_oracle(c: &RMatrix, u: &RMatrix) -> Rational {
        deterministic_matrices(u.cols(), c.rows())
            .map(|a| c.mul(u).mul(&a).trace())
            .max()
            .unwrap()
    }

    #[test]
    fn dimension_arithmetic() {
        assert_eq!((embedded_inputs(3), inner_inputs(3)), (3, 2));
        assert_eq!((embedded_inputs(4), inner_inputs(4)), (5, 3));
        assert_eq!((embedded_inputs(5), inner_inputs(5)), (9, 5));
    }

    #[test]
    fn embed_examples() {
        let id = Channel::new(RMatrix::identity(2)).unwrap();
        assert_eq!(*embed_channel(&id, 3).unwrap().matrix(), RMatrix::identity(3));
        let flat = ch(&[&[(1, 2), (1, 2)], &[(1, 2), (1, 2)]]);
        assert_eq!(
            *embed_channel(&flat, 3).unwrap().matrix(),
            RMatrix::from_fracs(&[&[(1, 2), (1, 2), (0, 1)], &[(1, 2), (1, 2), (0, 1)], &[(0, 1), (0, 1), (1, 1)]])
        );
        assert!(matches!(embed_channel(&id, 4), Err(Error::DimensionMismatch(_))));
        assert!(matches!(embed_channel(&id, 2), Err(Error::Domain(_))));
        assert_eq!(embedded_inner(&flat), None);
        assert_eq!(embedded_inner(&Channel::new(RMatrix::identity(3)).unwrap()), Some(id));
    }

    #[test]
    fn embedding_transports_garblings() {
        let mut rng = random::rng(3);
        for m in [3, 4] {
            for _ in 0..10 {
                let k = inner_inputs(m);
                let z = random::channel(&mut rng, m - 1, k);
                let post = random::stochastic_matrix(&mut rng, m - 1, m - 1, 3);
                let pre = random::stochastic_matrix(&mut rng, k, k, 3);
                let zbar = z.garble(&post, &pre).unwrap();
                let cert = transport_certificate(&post, &pre, m);
                let (c, cbar) = (embed_channel(&z, m).unwrap(), embed_channel(&zbar, m).unwrap());
                assert!(cert.verify(&c, &cbar));
                assert_eq!(inner_garbling(&z, &zbar, m, &cert).unwrap(), Some((post, pre)));
                assert_eq!(embedded_inner(&c), Some(z.clone()));
                if m == 3 {
                    let pi = InputDistribution::uniform(3);
                    let v = shannon_check(&c, &cbar, &pi, &Limits::default()).unwrap();
                    assert!(v.is_yes());
                    assert!(v.verify(&c, &cbar, &pi, &Limits::default()).unwrap());
                }
            }
        }
    }

    #[test]
    fn ordering_examples() {
        let all_le = UtilityMatrix::new(RMatrix::from_ints(&[&[0, 1, 3], &[1, 1, 0], &[-2, 5, 0]]));
        let r = ordering_normalize(&all_le, 2).unwrap();
        assert!(r.satisfied);
        assert_eq!(r.direction, OrderingDirection::FirstAtMostSecond);
        assert_eq!(r.permutation, RMatrix::identity(3));

        let mixed = UtilityMatrix::new(RMatrix::from_ints(&[&[0, 1, 0], &[3, 1, 0], &[2, 4, 0]]));
        let r = ordering_normalize(&mixed, 2).unwrap();
        assert!(!r.satisfied);
        assert_eq!(r.direction, OrderingDirection::FirstAtMostSecond);
        assert_eq!(r.permutation, RMatrix::from_ints(&[&[1, 0, 0], &[0, 0, 1], &[0, 1, 0]]));
    }

    #[test]
    fn ordering_holds_on_random_utilities() {
        let mut rng = random::rng(5);
        for _ in 0..50 {
            let u = random::utility(&mut rng, 5, 4, 3);
            let r = ordering_normalize(&u, 3).unwrap();
            let pu = r.permutation.mul(u.matrix());
            assert!((0..3).all(|i| r.direction.holds(&pu[(i, 0)], &pu[(i, 1)])));
        }
    }

    #[test]
    fn reduction_example() {
        let u = UtilityMatrix::new(RMatrix::from_ints(&[&[0, 1, 5], &[2, 2, 0], &[7, 0, 0]]));
        let (ubar, s) = reduce_utility(&u, 2, OrderingDirection::FirstAtMostSecond).unwrap();
        assert_eq!(*ubar.matrix(), RMatrix::from_ints(&[&[1, 5], &[2, 0]]));
        assert_eq!(s, rat(7, 1));
        assert_eq!(
            reduce_utility(&u, 3, OrderingDirection::FirstAtMostSecond),
            Err(Error::OrderingViolated { k: 3 })
        );

        let z = Channel::new(RMatrix::identity(2)).unwrap();
        let c = embed_channel(&z, 3).unwrap();
        let lhs = trace_oracle(c.matrix(), u.matrix());
        let rhs = trace_oracle(z.matrix(), ubar.matrix()) + &s;
        assert_eq!(lhs, rat(14, 1));
        assert_eq!(lhs, rhs);
    }

    #[test]
    fn reduction_identity_on_random_instances() {
        let mut rng = random::rng(11);
        for _ in 0..30 {
            let u = random::utility(&mut rng, 3, 3, 4);
            let report = ordering_normalize(&u, 2).unwrap();
            let u = UtilityMatrix::new(report.permutation.mul(u.matrix()));
            let (ubar, s) = reduce_utility(&u, 2, report.direction).unwrap();
            for _ in 0..10 {
                let z = random::channel(&mut rng, 2, 2);
                let c = embed_channel(&z, 3).unwrap();
                assert_eq!(
                    trace_oracle(c.matrix(), u.matrix()),
                    trace_oracle(z.matrix(), ubar.matrix()) + &s
                );
                assert_eq!(max_deterministic_trace(c.matrix(), u.matrix()), trace_oracle(c.matrix(), u.matrix()));
            }
        }
    }

    #[test]
    fn lemma_family_positive_cases() {
        let f = lemma_2x2_family(&rat(2, 1), &rat(1, 1)).unwrap();
        assert_eq!((f.v1.clone(), f.v2.clone()), (rat(5, 4), rat(1, 1)));
        let g = lemma_2x2_family(&rat(1, 1), &rat(2, 1)).unwrap();
        assert_eq!((g.v1.clone(), g.v2.clone()), (rat(1, 1), rat(5, 4)));

        let pi = InputDistribution::uniform(2);
        let limits = Limits::default();
        let mut rng = random::rng(8);
        for _ in 0..40 {
            let a = rat(rng.gen_range(1..=9), rng.gen_range(1..=4));
            let b = rat(rng.gen_range(1..=9), rng.gen_range(1..=4));
            if a == b {
                continue;
            }
            let f = lemma_2x2_family(&a, &b).unwrap();
            assert_eq!(blackwell_value(&f.c1, &f.utility, &pi).unwrap().value, f.v1);
            assert_eq!(blackwell_value(&f.c2, &f.utility, &pi).unwrap().value, f.v2);
            assert_ne!(f.v1, f.v2);
            for (x, y) in [(&f.c1, &f.c2), (&f.c2, &f.c1)] {
                let v = shannon_check(x, y, &pi, &limits).unwrap();
                assert!(matches!(v, Verdict::Yes(_)));
                assert!(v.verify(x, y, &pi, &limits).unwrap());
            }
        }
    }

    #[test]
    fn lemma_family_negative_case() {
        let f = lemma_2x2_family(&rat(-1, 1), &rat(-2, 1)).unwrap();
        assert_ne!(f.v1, f.v2);
        assert_eq!((f.v1, f.v2), (rat(-1, 2), rat(-1, 4)));
    }

    #[test]
    fn lemma_family_domain() {
        for (a, b) in [(0, 1), (1, -1), (2, 2)] {
            assert!(matches!(lemma_2x2_family(&rat(a, 1), &rat(b, 1)), Err(Error::Domain(_))));
        }
    }

    #[test]
    fn rescaling() {
        let u = UtilityMatrix::new(RMatrix::identity(2));
        assert_eq!(pi_rescale(&u, &InputDistribution::uniform(2), 2).unwrap(), u);
        let pibar = InputDistribution::new(vec![rat(1, 4), rat(3, 4)]).unwrap();
        assert_eq!(
            *pi_rescale(&u, &pibar, 2).unwrap().matrix(),
            RMatrix::from_fracs(&[&[(1, 2), (0, 1)], &[(0, 1), (3, 2)]])
        );
        let mut rng = random::rng(2);
        for _ in 0..20 {
            let c = random::channel(&mut rng, 3, 3);
            let ubar = random::utility(&mut rng, 3, 3, 5);
            let pibar = random::distribution(&mut rng, 3);
            let u = pi_rescale(&ubar, &pibar, 3).unwrap();
            assert_eq!(
                blackwell_value(&c, &u, &InputDistribution::uniform(3)).unwrap().value,
                blackwell_value(&c, &ubar, &pibar).unwrap().value
            );
        }
    }
}
