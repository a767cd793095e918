//! The utility classes indifferent (I), exact (E), oblivious (O) and
//! positive multiples of doubly-stochastic matrices (D), and reduced
//! Blackwell-usefulness with respect to each.

use std::collections::BTreeSet;
use std::fmt;

use num_traits::{One, Signed, Zero};
use rand::seq::SliceRandom;
use rand::Rng;

use crate::constructions::pi_rescale;
use crate::error::{Error, Result};
use crate::matrix::RMatrix;
use crate::model::{
    deterministic_count, deterministic_from_assignment, permutation_matrices, Assignments, Channel,
    InputDistribution, Limits, UtilityMatrix,
};
use crate::orders::SuiteReport;
use crate::random;
use crate::rational::{format_rational, rat, Rational};
use crate::value::blackwell_value;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum UtilityClassTag {
    Indifferent,
    Exact,
    Oblivious,
    DoublyStochasticMultiple,
}

impl fmt::Display for UtilityClassTag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            UtilityClassTag::Indifferent => "indifferent",
            UtilityClassTag::Exact => "exact",
            UtilityClassTag::Oblivious => "oblivious",
            UtilityClassTag::DoublyStochasticMultiple => "doubly",
        })
    }
}

/// The common positive value `α` of the nonzero entries if every column
/// holds exactly one nonzero entry.
fn oblivious_scale(u: &RMatrix) -> Option<Rational> {
    let mut alpha: Option<&Rational> = None;
    for j in 0..u.cols() {
        let mut nonzero = (0..u.rows()).filter(|&i| !u[(i, j)].is_zero());
        let i = nonzero.next()?;
        if nonzero.next().is_some() {
            return None;
        }
        let x = &u[(i, j)];
        if !x.is_positive() || alpha.is_some_and(|a| a != x) {
            return None;
        }
        alpha = Some(x);
    }
    alpha.cloned()
}

fn is_exact(u: &RMatrix) -> bool {
    u.rows() == u.cols()
        && oblivious_scale(u).is_some()
        && (0..u.rows()).all(|i| u.row(i).iter().filter(|x| !x.is_zero()).count() == 1)
}

fn is_doubly_stochastic_multiple(u: &RMatrix) -> bool {
    if u.rows() != u.cols() || u.rows() == 0 || !u.is_nonnegative() {
        return false;
    }
    let alpha = u.row_sum(0);
    alpha.is_positive()
        && (0..u.rows()).all(|i| u.row_sum(i) == alpha)
        && (0..u.cols()).all(|j| u.column_sum(j) == alpha)
}

/// Every class the matrix belongs to.
pub fn classify(u: &UtilityMatrix) -> BTreeSet<UtilityClassTag> {
    let m = u.matrix();
    let mut tags = BTreeSet::new();
    if u.is_indifferent() {
        tags.insert(UtilityClassTag::Indifferent);
    }
    if is_exact(m) {
        tags.insert(UtilityClassTag::Exact);
    }
    if oblivious_scale(m).is_some() {
        tags.insert(UtilityClassTag::Oblivious);
    }
    if is_doubly_stochastic_multiple(m) {
        tags.insert(UtilityClassTag::DoublyStochasticMultiple);
    }
    tags
}

/// `Σ_i max_j c_ij`. Under a uniform input and an exact utility `α·P` the
/// maximal expected utility is `(α/n)` times this score, whatever `P` is.
pub fn exact_class_score(c: &Channel) -> Rational {
    (0..c.rows()).fold(Rational::zero(), |acc, i| {
        acc + c.row(i).iter().max().cloned().unwrap_or_else(Rational::zero)
    })
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ReducedComparison {
    /// No utility of the class makes `C̄` strictly more valuable than `C`.
    Dominates,
    /// `witness` is in the class and `garbled_value > original_value`.
    DominatedStrictlyAt {
        witness: UtilityMatrix,
        original_value: Rational,
        garbled_value: Rational,
    },
    /// The search found no violation but is not complete for the class.
    Unknown,
}

impl ReducedComparison {
    pub fn label(&self) -> &'static str {
        match self {
            ReducedComparison::Dominates => "DOMINATES",
            ReducedComparison::DominatedStrictlyAt { .. } => "DOMINATED",
            ReducedComparison::Unknown => "UNKNOWN",
        }
    }
}

/// Search parameters for [`compare_reduced`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ClassSearch {
    /// Random Birkhoff mixtures tried for class D after permutations and midpoints.
    pub random_mixtures: usize,
    pub seed: u64,
    /// Positive factor applied to every utility the comparison tests.
    pub scale: Rational,
    pub limits: Limits,
}

impl Default for ClassSearch {
    fn default() -> Self {
        Self {
            random_mixtures: 64,
            seed: 0,
            scale: Rational::one(),
            limits: Limits::default(),
        }
    }
}

fn square_inputs(c: &Channel, class: UtilityClassTag) -> Result<usize> {
    if c.rows() != c.cols() {
        return Err(Error::DimensionMismatch(format!(
            "class {class} needs square channels, got {}x{}",
            c.rows(),
            c.cols()
        )));
    }
    Ok(c.cols())
}

/// Evaluates `u` on both channels; `Some` if `C̄` is strictly better.
fn violation(
    c: &Channel,
    cbar: &Channel,
    u: UtilityMatrix,
    pi: &InputDistribution,
) -> Result<Option<ReducedComparison>> {
    let original_value = blackwell_value(c, &u, pi)?.value;
    let garbled_value = blackwell_value(cbar, &u, pi)?.value;
    Ok((garbled_value > original_value).then_some(ReducedComparison::DominatedStrictlyAt {
        witness: u,
        original_value,
        garbled_value,
    }))
}

/// Reduced Blackwell-usefulness of `c` over `cbar` with respect to a class.
///
/// Indifferent and exact comparisons are closed-form, the oblivious one
/// enumerates all `n^m` coordinate-column matrices and is complete, and the
/// doubly-stochastic one only refutes: permutations, then midpoints of
/// pairs of permutations, then random mixtures.
pub fn compare_reduced(
    c: &Channel,
    cbar: &Channel,
    class: UtilityClassTag,
    pi: &InputDistribution,
    search: &ClassSearch,
) -> Result<ReducedComparison> {
    if c.shape() != cbar.shape() {
        return Err(Error::DimensionMismatch(format!(
            "channels are {}x{} and {}x{}",
            c.rows(),
            c.cols(),
            cbar.rows(),
            cbar.cols()
        )));
    }
    pi.check_against(c)?;
    if !search.scale.is_positive() {
        return Err(Error::Domain("class scale must be positive".into()));
    }
    let (m, n) = c.shape();
    let scaled = |p: RMatrix| UtilityMatrix::new(p.scale(&search.scale));
    match class {
        UtilityClassTag::Indifferent => Ok(ReducedComparison::Dominates),
        UtilityClassTag::Exact => {
            let n = square_inputs(c, class)?;
            if pi.is_uniform() {
                let (s, sbar) = (exact_class_score(c), exact_class_score(cbar));
                if sbar > s {
                    let factor = &search.scale / rat(n as i64, 1);
                    return Ok(ReducedComparison::DominatedStrictlyAt {
                        witness: scaled(RMatrix::identity(n)),
                        original_value: s * &factor,
                        garbled_value: sbar * factor,
                    });
                }
                return Ok(ReducedComparison::Dominates);
            }
            // α·P under π̄ has the value of n·Π̄·α·P under the uniform distribution
            search.limits.check_alphabet("permutations n!", n)?;
            let uniform = InputDistribution::uniform(n);
            for p in permutation_matrices(n) {
                let rescaled = pi_rescale(&scaled(p.clone()), pi, n)?;
                let original_value = blackwell_value(c, &rescaled, &uniform)?.value;
                let garbled_value = blackwell_value(cbar, &rescaled, &uniform)?.value;
                if garbled_value > original_value {
                    return Ok(ReducedComparison::DominatedStrictlyAt {
                        witness: scaled(p),
                        original_value,
                        garbled_value,
                    });
                }
            }
            Ok(ReducedComparison::Dominates)
        }
        UtilityClassTag::Oblivious => {
            let limit = search.limits.max_vertex_pairs;
            search.limits.check_count("oblivious utilities n^m", deterministic_count(n, m), limit)?;
            for assign in Assignments::new(n, m) {
                if let Some(v) = violation(c, cbar, scaled(deterministic_from_assignment(n, &assign)), pi)? {
                    return Ok(v);
                }
            }
            Ok(ReducedComparison::Dominates)
        }
        UtilityClassTag::DoublyStochasticMultiple => {
            let n = square_inputs(c, class)?;
            search.limits.check_alphabet("permutations n!", n)?;
            let perms = permutation_matrices(n);
            for p in &perms {
                if let Some(v) = violation(c, cbar, scaled(p.clone()), pi)? {
                    return Ok(v);
                }
            }
            let half = rat(1, 2);
            for (a, p) in perms.iter().enumerate() {
                for q in &perms[a + 1..] {
                    let mid = p.add(q).scale(&half);
                    if let Some(v) = violation(c, cbar, scaled(mid), pi)? {
                        return Ok(v);
                    }
                }
            }
            let mut rng = random::rng(search.seed);
            for _ in 0..search.random_mixtures {
                let terms = rng.gen_range(2..=perms.len().clamp(2, 4));
                let chosen: Vec<&RMatrix> = perms.choose_multiple(&mut rng, terms).collect();
                let w = random::weights(&mut rng, chosen.len());
                let mix = chosen
                    .iter()
                    .zip(&w)
                    .fold(RMatrix::zeros(n, n), |acc, (p, x)| acc.add(&p.scale(x)));
                if let Some(v) = violation(c, cbar, scaled(mix), pi)? {
                    return Ok(v);
                }
            }
            Ok(ReducedComparison::Unknown)
        }
    }
}

/// Sufficiency of the Shannon order for class E on square channels:
/// `score(C) ≥ score(M·C·N)` for random `C`, `M`, `N`.
pub fn proposition_exact_suite(seed: u64, count: usize, n: usize) -> SuiteReport {
    let mut rng = random::rng(seed);
    let mut report = SuiteReport::default();
    for idx in 0..count {
        let c = random::channel(&mut rng, n, n);
        let post = random::stochastic_matrix(&mut rng, n, n, 3);
        let pre = random::stochastic_matrix(&mut rng, n, n, 3);
        let cbar = c.garble(&post, &pre).expect("product of stochastic matrices");
        let (s, sbar) = (exact_class_score(&c), exact_class_score(&cbar));
        report.cases += 1;
        if sbar > s {
            report.failures.push(format!(
                "case {idx}: score rose from {} to {}",
                format_rational(&s),
                format_rational(&sbar)
            ));
        }
    }
    report
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::orders::shannon_2x2_exact;
    use UtilityClassTag::*;

    fn ch(rows: &[&[(i64, i64)]]) -> Channel {
        Channel::new(RMatrix::from_fracs(rows)).unwrap()
    }

    fn randd() -> (Channel, Channel) {
        let c = ch(&[&[(0, 1), (0, 1), (1, 1)], &[(1, 2), (1, 2), (0, 1)], &[(1, 2), (1, 2), (0, 1)]]);
        let p = RMatrix::from_ints(&[&[0, 0, 1], &[0, 1, 0], &[1, 0, 0]]);
        let cbar = Channel::new(c.matrix().mul(&p)).unwrap();
        (c, cbar)
    }

    fn exactsmall() -> (Channel, Channel) {
        (
            ch(&[&[(1, 1), (1, 2)], &[(0, 1), (1, 2)]]),
            ch(&[&[(1, 4), (3, 4)], &[(3, 4), (1, 4)]]),
        )
    }

    #[test]
    fn classification_examples() {
        let set = |tags: &[UtilityClassTag]| tags.iter().copied().collect::<BTreeSet<_>>();
        let u = |rows: &[&[(i64, i64)]]| UtilityMatrix::new(RMatrix::from_fracs(rows));
        assert_eq!(classify(&u(&[&[(1, 1), (1, 1)], &[(2, 1), (2, 1)]])), set(&[Indifferent]));
        assert_eq!(
            classify(&u(&[&[(2, 1), (0, 1)], &[(0, 1), (2, 1)]])),
            set(&[Exact, Oblivious, DoublyStochasticMultiple])
        );
        assert_eq!(
            classify(&u(&[
                &[(1, 1), (0, 1), (0, 1)],
                &[(0, 1), (1, 2), (1, 2)],
                &[(0, 1), (1, 2), (1, 2)]
            ])),
            set(&[DoublyStochasticMultiple])
        );
        assert_eq!(
            classify(&UtilityMatrix::new(RMatrix::from_ints(&[&[1, 1, 0], &[0, 0, 1], &[0, 0, 0]]))),
            set(&[Oblivious])
        );
        // the zero matrix has identical columns but no positive multiple
        assert_eq!(classify(&UtilityMatrix::new(RMatrix::zeros(2, 2))), set(&[Indifferent]));
        // unequal nonzero entries
        assert!(classify(&UtilityMatrix::new(RMatrix::from_ints(&[&[1, 0], &[0, 2]]))).is_empty());
    }

    #[test]
    fn exact_matrices_are_in_o_and_d() {
        for n in 1..=4 {
            for p in permutation_matrices(n) {
                let tags = classify(&UtilityMatrix::new(p.scale(&rat(5, 3))));
                assert!(tags.contains(&Exact));
                assert!(tags.contains(&Oblivious));
                assert!(tags.contains(&DoublyStochasticMultiple));
            }
        }
    }

    #[test]
    fn scores() {
        let (c, cbar) = exactsmall();
        assert_eq!(exact_class_score(&c), rat(3, 2));
        assert_eq!(exact_class_score(&cbar), rat(3, 2));
        assert_eq!(exact_class_score(&Channel::new(RMatrix::identity(2)).unwrap()), rat(2, 1));
    }

    #[test]
    fn oblivious_example_first_violator() {
        let (c, cbar) = randd();
        let r = compare_reduced(&c, &cbar, Oblivious, &InputDistribution::uniform(3), &ClassSearch::default())
            .unwrap();
        assert_eq!(
            r,
            ReducedComparison::DominatedStrictlyAt {
                witness: UtilityMatrix::new(RMatrix::from_ints(&[&[1, 1, 0], &[0, 0, 1], &[0, 0, 0]])),
                original_value: rat(1, 3),
                garbled_value: rat(2, 3),
            }
        );
    }

    #[test]
    fn doubly_example_found_at_first_midpoint() {
        let (c, cbar) = randd();
        let r = compare_reduced(
            &c,
            &cbar,
            DoublyStochasticMultiple,
            &InputDistribution::uniform(3),
            &ClassSearch::default(),
        )
        .unwrap();
        assert_eq!(
            r,
            ReducedComparison::DominatedStrictlyAt {
                witness: UtilityMatrix::new(RMatrix::from_fracs(&[
                    &[(1, 1), (0, 1), (0, 1)],
                    &[(0, 1), (1, 2), (1, 2)],
                    &[(0, 1), (1, 2), (1, 2)]
                ])),
                original_value: rat(1, 2),
                garbled_value: rat(2, 3),
            }
        );
    }

    #[test]
    fn exact_class_cannot_separate_exactsmall() {
        let (c, cbar) = exactsmall();
        let pi = InputDistribution::uniform(2);
        let s = ClassSearch::default();
        assert_eq!(compare_reduced(&c, &cbar, Exact, &pi, &s).unwrap(), ReducedComparison::Dominates);
        assert_eq!(compare_reduced(&cbar, &c, Exact, &pi, &s).unwrap(), ReducedComparison::Dominates);
        assert!(shannon_2x2_exact(&c, &cbar).unwrap().is_no());
        assert!(shannon_2x2_exact(&cbar, &c).unwrap().is_no());
    }

    #[test]
    fn exact_with_nonuniform_distribution_matches_direct_values() {
        let (c, cbar) = exactsmall();
        let pi = InputDistribution::new(vec![rat(1, 4), rat(3, 4)]).unwrap();
        let r = compare_reduced(&c, &cbar, Exact, &pi, &ClassSearch::default()).unwrap();
        // oracle: evaluate both permutations under π directly
        let mut oracle = ReducedComparison::Dominates;
        for p in permutation_matrices(2) {
            let u = UtilityMatrix::new(p);
            let v = blackwell_value(&c, &u, &pi).unwrap().value;
            let vb = blackwell_value(&cbar, &u, &pi).unwrap().value;
            if vb > v {
                oracle = ReducedComparison::DominatedStrictlyAt {
                    witness: u,
                    original_value: v,
                    garbled_value: vb,
                };
                break;
            }
        }
        assert_eq!(r, oracle);
    }

    #[test]
    fn indifferent_always_dominates() {
        let (c, cbar) = randd();
        let r = compare_reduced(&c, &cbar, Indifferent, &InputDistribution::uniform(3), &ClassSearch::default());
        assert_eq!(r.unwrap(), ReducedComparison::Dominates);
    }

    #[test]
    fn non_square_exact_is_rejected() {
        let c = ch(&[&[(1, 1), (0, 1), (1, 2)], &[(0, 1), (1, 1), (1, 2)]]);
        let r = compare_reduced(&c, &c, Exact, &InputDistribution::uniform(3), &ClassSearch::default());
        assert!(matches!(r, Err(Error::DimensionMismatch(_))));
    }

    #[test]
    fn verdicts_are_scale_invariant() {
        let (c, cbar) = randd();
        let (e, ebar) = exactsmall();
        for class in [Indifferent, Exact, Oblivious, DoublyStochasticMultiple] {
            for (x, y) in [(&c, &cbar), (&cbar, &c), (&e, &ebar), (&ebar, &e)] {
                let pi = InputDistribution::uniform(x.cols());
                let base = compare_reduced(x, y, class, &pi, &ClassSearch::default()).unwrap();
                for alpha in [rat(1, 3), rat(7, 1)] {
                    let s = ClassSearch {
                        scale: alpha.clone(),
                        ..ClassSearch::default()
                    };
                    let r = compare_reduced(x, y, class, &pi, &s).unwrap();
                    assert_eq!(r.label(), base.label(), "{class} at α = {alpha}");
                    if let (
                        ReducedComparison::DominatedStrictlyAt { witness: w, original_value: v, .. },
                        ReducedComparison::DominatedStrictlyAt { witness: w0, original_value: v0, .. },
                    ) = (&r, &base)
                    {
                        assert_eq!(*w.matrix(), w0.matrix().scale(&alpha));
                        assert_eq!(*v, v0 * &alpha);
                    }
                }
            }
        }
    }

    #[test]
    fn proposition_suite_is_clean() {
        let report = proposition_exact_suite(1, 100, 3);
        assert_eq!(report.cases, 100);
        assert!(report.passed(), "{:?}", report.failures);
    }

    #[test]
    fn swapped_inputs_keep_the_score() {
        let c = ch(&[&[(9, 10), (0, 1)], &[(1, 10), (1, 1)]]);
        let cbar = ch(&[&[(0, 1), (9, 10)], &[(1, 1), (1, 10)]]);
        // 9/10 + 1 by hand for both
        assert_eq!(exact_class_score(&c), rat(19, 10));
        assert_eq!(exact_class_score(&cbar), rat(19, 10));
        assert_eq!(exact_class_score(&c), exact_class_score(&c.garble(&RMatrix::identity(2), &RMatrix::identity(2)).unwrap()));
    }
}
