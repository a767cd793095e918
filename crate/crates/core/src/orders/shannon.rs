use num_traits::{Signed, Zero};

use crate::constructions::{embedded_inner, transport_certificate};
use crate::error::{Error, Result};
use crate::lp::{LpBuilder, LpOutcome, Relation};
use crate::matrix::RMatrix;
use crate::model::{deterministic_from_assignment, Assignments, Channel, InputDistribution, Limits};
use crate::rational::{one, Rational};

use super::convex::cs_check;
use super::lps::{l1_fit, solve_post, solve_pre, Side};
use super::{check_pair, Certificate, Verdict};

/// Sound search for `cbar = M·c·N` with at least one factor deterministic.
///
/// Tries `N = I` first, then every deterministic `N` (solving for `M` by LP),
/// then every deterministic `M` (solving for `N`), all in canonical order.
pub fn shannon_search(c: &Channel, cbar: &Channel, limits: &Limits) -> Result<Option<Certificate>> {
    if c.shape() != cbar.shape() {
        return Err(Error::DimensionMismatch("channels differ in shape".into()));
    }
    let (m, n) = c.shape();
    limits.check_alphabet("deterministic pre-garblings n^n", n)?;
    limits.check_alphabet("deterministic post-garblings m^m", m)?;

    let identity = RMatrix::identity(n);
    let pres = std::iter::once(identity.clone()).chain(
        Assignments::new(n, n)
            .map(|a| deterministic_from_assignment(n, &a))
            .filter(|r| *r != identity),
    );
    for pre in pres {
        if let Some(post) = solve_post(&c.matrix().mul(&pre), cbar.matrix()) {
            return Ok(Some(checked(c, cbar, post, pre)?));
        }
    }
    for assign in Assignments::new(m, m) {
        let post = deterministic_from_assignment(m, &assign);
        if let Some(pre) = solve_pre(&post.mul(c.matrix()), cbar.matrix()) {
            return Ok(Some(checked(c, cbar, post, pre)?));
        }
    }
    Ok(None)
}

fn checked(c: &Channel, cbar: &Channel, post: RMatrix, pre: RMatrix) -> Result<Certificate> {
    let cert = Certificate::Garbling { post, pre };
    if !cert.verify(c, cbar) {
        return Err(Error::CertificateCheck("Shannon garbling does not reproduce C̄".into()));
    }
    Ok(cert)
}

/// Alternating L1 fits of `M` and `N` from every deterministic start `N₀`.
/// Only an exact zero residual is accepted.
fn alternating_search(c: &Channel, cbar: &Channel, rounds: usize) -> Result<Option<Certificate>> {
    let n = c.inputs();
    for assign in Assignments::new(n, n) {
        let mut pre = deterministic_from_assignment(n, &assign);
        let mut best: Option<Rational> = None;
        for _ in 0..rounds {
            let (post, d_post) = l1_fit(Side::Post, &c.matrix().mul(&pre), cbar.matrix());
            if d_post.is_zero() {
                return Ok(Some(checked(c, cbar, post, pre)?));
            }
            let (next_pre, d_pre) = l1_fit(Side::Pre, &post.mul(c.matrix()), cbar.matrix());
            if d_pre.is_zero() {
                return Ok(Some(checked(c, cbar, post, next_pre)?));
            }
            if best.as_ref().is_some_and(|b| d_pre >= *b) {
                break;
            }
            best = Some(d_pre);
            pre = next_pre;
        }
    }
    Ok(None)
}

/// Three-valued Shannon order check.
///
/// `Yes` comes with a verified `(M, N)`. `No` is returned when the
/// convexified order already fails (its witness is attached) or, for 2x2
/// channels, from the complete decider. Anything else is `Unknown`.
pub fn shannon_check(c: &Channel, cbar: &Channel, pi: &InputDistribution, limits: &Limits) -> Result<Verdict> {
    check_pair(c, cbar, pi)?;
    if let Some(cert) = shannon_search(c, cbar, limits)? {
        return Ok(Verdict::Yes(cert));
    }
    let exact_2x2 = c.shape() == (2, 2);
    if exact_2x2 {
        if let v @ Verdict::Yes(_) = shannon_2x2_exact(c, cbar)? {
            return Ok(v);
        }
    }
    if let Some(cert) = embedded_search(c, cbar, limits)? {
        return Ok(Verdict::Yes(cert));
    }
    match cs_check(c, cbar, pi, limits) {
        Ok(Verdict::No(w)) => return Ok(Verdict::No(w)),
        Ok(_) | Err(Error::EnumerationLimit { .. }) => {}
        Err(e) => return Err(e),
    }
    if exact_2x2 {
        return Ok(Verdict::No(None));
    }
    if let Some(cert) = alternating_search(c, cbar, limits.alternating_rounds)? {
        return Ok(Verdict::Yes(cert));
    }
    Ok(Verdict::Unknown)
}

/// When both channels are block embeddings of smaller channels `z`, `z̄`,
/// a garbling `z̄ = M·z·N` lifts to `blockdiag(M, 1)`, `blockdiag(N, I)`.
fn embedded_search(c: &Channel, cbar: &Channel, limits: &Limits) -> Result<Option<Certificate>> {
    let (Some(z), Some(zbar)) = (embedded_inner(c), embedded_inner(cbar)) else {
        return Ok(None);
    };
    let inner = shannon_check(&z, &zbar, &InputDistribution::uniform(z.cols()), limits)?;
    let Some(Certificate::Garbling { post, pre }) = inner.certificate() else {
        return Ok(None);
    };
    let cert = transport_certificate(post, pre, c.rows());
    if !cert.verify(c, cbar) {
        return Err(Error::CertificateCheck("lifted garbling does not reproduce C̄".into()));
    }
    Ok(Some(cert))
}

/// Complete decision of the Shannon order for 2x2 channels.
///
/// A 2x2 channel is identified with the first-row entries of its columns.
/// Pre-garbling moves both points anywhere in the segment `I` spanned by
/// `c`'s points; post-garbling applies an affine map `f` of `[0, 1]` into
/// itself. So `cbar = (ā, b̄)` is reachable iff `ā = b̄`, or there are
/// `a ≠ b` in `I` with `f(a) = ā`, `f(b) = b̄` and `f(0), f(1) ∈ [0, 1]`.
/// Multiplying through by `b − a` makes the conditions linear; each sign of
/// `b − a` is one LP maximizing `|b − a|`.
pub fn shannon_2x2_exact(c: &Channel, cbar: &Channel) -> Result<Verdict> {
    if c.shape() != (2, 2) || cbar.shape() != (2, 2) {
        return Err(Error::DimensionMismatch("the exact decider needs 2x2 channels".into()));
    }
    let (a0, b0) = (c[(0, 0)].clone(), c[(0, 1)].clone());
    let (abar, bbar) = (cbar[(0, 0)].clone(), cbar[(0, 1)].clone());

    if abar == bbar {
        let post = RMatrix::from_fn(2, 2, |i, _| if i == 0 { abar.clone() } else { one() - &abar });
        let pre = RMatrix::from_ints(&[&[1, 1], &[0, 0]]);
        return Ok(Verdict::Yes(checked(c, cbar, post, pre)?));
    }

    let (lo, hi) = if a0 <= b0 { (a0.clone(), b0.clone()) } else { (b0.clone(), a0.clone()) };
    for ascending in [true, false] {
        let Some((a, b)) = branch_lp(&lo, &hi, &abar, &bbar, ascending) else {
            continue;
        };
        // f(0) = (āb − b̄a)/(b − a), f(1) = f(0) + (b̄ − ā)/(b − a)
        let span = &b - &a;
        let f0 = (&abar * &b - &bbar * &a) / &span;
        let f1 = &f0 + (&bbar - &abar) / &span;
        let post = RMatrix::from_fn(2, 2, |i, j| {
            let f = if j == 0 { &f1 } else { &f0 };
            if i == 0 {
                f.clone()
            } else {
                one() - f
            }
        });
        // column j of c·N has first coordinate t·a0 + (1 − t)·b0
        let weight = |x: &Rational| (x - &b0) / (&a0 - &b0);
        let (ta, tb) = (weight(&a), weight(&b));
        let pre = RMatrix::from_fn(2, 2, |i, j| {
            let t = if j == 0 { &ta } else { &tb };
            if i == 0 {
                t.clone()
            } else {
                one() - t
            }
        });
        return Ok(Verdict::Yes(checked(c, cbar, post, pre)?));
    }
    Ok(Verdict::No(None))
}

/// Maximizes `±(b − a)` over `a, b ∈ [lo, hi]` subject to the linearized
/// affine-map conditions. Returns the optimal `(a, b)` if the optimum is positive.
fn branch_lp(
    lo: &Rational,
    hi: &Rational,
    abar: &Rational,
    bbar: &Rational,
    ascending: bool,
) -> Option<(Rational, Rational)> {
    // a = lo + a', b = lo + b' with a', b' in [0, hi − lo]
    let mut lp = LpBuilder::new();
    let a = lp.var();
    let b = lp.var();
    let width = hi - lo;
    lp.constrain(vec![(a, one())], Relation::Le, width.clone());
    lp.constrain(vec![(b, one())], Relation::Le, width);

    // K = ā·b − b̄·a = (ā − b̄)·lo + ā·b' − b̄·a'; with s = +1 for b > a, −1 otherwise
    // conditions: 0 ≤ s·K ≤ s·(b − a) and 0 ≤ s·(K + b̄ − ā) ≤ s·(b − a)
    let s = if ascending { one() } else { -one() };
    let k_const = (abar - bbar) * lo;
    let k_terms = |scale: &Rational| vec![(a, -(bbar * scale)), (b, abar * scale)];
    let gap_terms = |scale: &Rational| vec![(a, -scale.clone()), (b, scale.clone())];

    for shift in [Rational::zero(), bbar - abar] {
        let konst = &s * (&k_const + &shift);
        // s·K ≥ 0
        lp.constrain(k_terms(&s), Relation::Ge, -konst.clone());
        // s·K − s·(b − a) ≤ 0
        let mut terms = k_terms(&s);
        for (v, coef) in gap_terms(&s) {
            terms.push((v, -coef));
        }
        lp.constrain(terms, Relation::Le, -konst);
    }
    lp.maximize(gap_terms(&s));
    match lp.solve() {
        LpOutcome::Optimal {
            solution,
            objective,
        } if objective.is_positive() => Some((lo + &solution[a], lo + &solution[b])),
        _ => None,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ch(rows: &[&[(i64, i64)]]) -> Channel {
        Channel::new(RMatrix::from_fracs(rows)).unwrap()
    }

    fn swap() -> RMatrix {
        RMatrix::from_ints(&[&[0, 1], &[1, 0]])
    }

    #[test]
    fn rauh_pair_is_a_pre_garbling() {
        let c = ch(&[&[(9, 10), (0, 1)], &[(1, 10), (1, 1)]]);
        let cbar = ch(&[&[(0, 1), (9, 10)], &[(1, 1), (1, 10)]]);
        let v = shannon_check(&c, &cbar, &InputDistribution::uniform(2), &Limits::default()).unwrap();
        assert_eq!(
            v,
            Verdict::Yes(Certificate::Garbling {
                post: RMatrix::identity(2),
                pre: swap()
            })
        );
    }

    #[test]
    fn self_comparison() {
        let c = ch(&[&[(1, 3), (1, 1)], &[(2, 3), (0, 1)]]);
        let v = shannon_check(&c, &c, &InputDistribution::uniform(2), &Limits::default()).unwrap();
        assert_eq!(
            v,
            Verdict::Yes(Certificate::Garbling {
                post: RMatrix::identity(2),
                pre: RMatrix::identity(2)
            })
        );
    }

    #[test]
    fn exactsmall_refuted_both_ways() {
        let c = ch(&[&[(1, 1), (1, 2)], &[(0, 1), (1, 2)]]);
        let cbar = ch(&[&[(1, 4), (3, 4)], &[(3, 4), (1, 4)]]);
        assert_eq!(shannon_2x2_exact(&c, &cbar).unwrap(), Verdict::No(None));
        assert_eq!(shannon_2x2_exact(&cbar, &c).unwrap(), Verdict::No(None));
        let pi = InputDistribution::uniform(2);
        assert!(shannon_check(&c, &cbar, &pi, &Limits::default()).unwrap().is_no());
        assert!(shannon_check(&cbar, &c, &pi, &Limits::default()).unwrap().is_no());
    }

    #[test]
    fn exact_decider_accepts_permuted_inputs() {
        let c = ch(&[&[(2, 7), (5, 6)], &[(5, 7), (1, 6)]]);
        let cbar = Channel::new(c.matrix().mul(&swap())).unwrap();
        let v = shannon_2x2_exact(&c, &cbar).unwrap();
        assert!(v.certificate().unwrap().verify(&c, &cbar));
    }

    #[test]
    fn exact_decider_constant_target() {
        let c = ch(&[&[(1, 1), (0, 1)], &[(0, 1), (1, 1)]]);
        let cbar = ch(&[&[(3, 5), (3, 5)], &[(2, 5), (2, 5)]]);
        let v = shannon_2x2_exact(&c, &cbar).unwrap();
        assert!(v.certificate().unwrap().verify(&c, &cbar));
    }

    #[test]
    fn exact_decider_finds_mixed_factors() {
        // M and N both non-deterministic
        let c = ch(&[&[(1, 1), (0, 1)], &[(0, 1), (1, 1)]]);
        let post = RMatrix::from_fracs(&[&[(3, 4), (1, 3)], &[(1, 4), (2, 3)]]);
        let pre = RMatrix::from_fracs(&[&[(1, 2), (1, 5)], &[(1, 2), (4, 5)]]);
        let cbar = Channel::new(post.mul(c.matrix()).mul(&pre)).unwrap();
        let v = shannon_2x2_exact(&c, &cbar).unwrap();
        assert!(v.certificate().unwrap().verify(&c, &cbar));
        // cbar's points are interior, so no affine self-map of [0, 1] sends them to 0 and 1
        assert!(shannon_2x2_exact(&cbar, &c).unwrap().is_no());
    }

    #[test]
    fn exact_decider_rejects_non_2x2() {
        let c = Channel::new(RMatrix::identity(3)).unwrap();
        assert!(shannon_2x2_exact(&c, &c).is_err());
    }
}
