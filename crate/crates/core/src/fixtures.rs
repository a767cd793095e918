//! Named reference instances with their expected exact outcomes.

use crate::constructions::{embed_channel, lemma_2x2_family};
use crate::error::{Error, Result};
use crate::matrix::RMatrix;
use crate::model::{Channel, InputDistribution, UtilityMatrix};
use crate::orders::OrderKind;
use crate::rational::{rat, Rational};
use crate::utility_classes::UtilityClassTag;

pub const FIXTURE_IDS: [&str; 6] = [
    "ex-rauh",
    "ex-randd-1",
    "ex-randd-2",
    "ex-exactsmall",
    "lemma-2x2",
    "thm-embed",
];

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ValueSpace {
    Blackwell,
    ConvexShannon,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ExpectedVerdict {
    Yes,
    No,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ExpectedClass {
    /// `C` dominates `C̄` and `C̄` dominates `C`.
    Equal,
    Dominates,
    /// Strict violation with the values of `C` and `C̄` at the reported witness.
    Dominated { witness: UtilityMatrix, original: Rational, garbled: Rational },
}

/// One pinned outcome for a fixture's pair `(C, C̄)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Expectation {
    /// Values of `C` and `C̄` under the fixture utility.
    Values { space: ValueSpace, original: Rational, garbled: Rational },
    /// Verdict for `C ⊵ C̄` and, if given, for `C̄ ⊵ C`.
    Order { kind: OrderKind, forward: ExpectedVerdict, backward: Option<ExpectedVerdict> },
    /// Sorted weights of the mixture certificate for `C ⊵_cS C̄`.
    MixtureWeights(Vec<Rational>),
    Class { class: UtilityClassTag, outcome: ExpectedClass },
    ExactScores { original: Rational, garbled: Rational },
    /// Reduction of the fixture utility to its first `k` rows.
    Reduction { k: usize, reduced: UtilityMatrix, tail: Rational },
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Fixture {
    pub id: String,
    pub c: Channel,
    pub cbar: Channel,
    pub utility: UtilityMatrix,
    pub pi: InputDistribution,
    pub expectations: Vec<Expectation>,
}

fn channel(rows: &[&[(i64, i64)]]) -> Channel {
    Channel::new(RMatrix::from_fracs(rows)).expect("fixture channel is stochastic")
}

fn randd_channels() -> (Channel, Channel) {
    let c = channel(&[&[(0, 1), (0, 1), (1, 1)], &[(1, 2), (1, 2), (0, 1)], &[(1, 2), (1, 2), (0, 1)]]);
    let p = RMatrix::from_ints(&[&[0, 0, 1], &[0, 1, 0], &[1, 0, 0]]);
    let cbar = Channel::new(c.matrix().mul(&p)).expect("permuted inputs");
    (c, cbar)
}

/// The fixture with the given id.
pub fn paper_fixture(id: &str) -> Result<Fixture> {
    use Expectation::*;
    use ExpectedVerdict::{No, Yes};
    let fixture = match id {
        "ex-rauh" => Fixture {
            id: id.into(),
            c: channel(&[&[(9, 10), (0, 1)], &[(1, 10), (1, 1)]]),
            cbar: channel(&[&[(0, 1), (9, 10)], &[(1, 1), (1, 10)]]),
            utility: UtilityMatrix::new(RMatrix::from_ints(&[&[2, 0], &[0, 1]])),
            pi: InputDistribution::uniform(2),
            expectations: vec![
                Values { space: ValueSpace::Blackwell, original: rat(28, 20), garbled: rat(29, 20) },
                Values { space: ValueSpace::ConvexShannon, original: rat(29, 20), garbled: rat(29, 20) },
                Order { kind: OrderKind::Shannon, forward: Yes, backward: None },
                Order { kind: OrderKind::Blackwell, forward: No, backward: None },
            ],
        },
        "ex-randd-1" => {
            let (c, cbar) = randd_channels();
            let utility = UtilityMatrix::new(RMatrix::from_ints(&[&[1, 1, 0], &[0, 0, 1], &[0, 0, 0]]));
            Fixture {
                id: id.into(),
                c,
                cbar,
                utility: utility.clone(),
                pi: InputDistribution::uniform(3),
                expectations: vec![
                    Values { space: ValueSpace::Blackwell, original: rat(1, 3), garbled: rat(2, 3) },
                    Order { kind: OrderKind::Shannon, forward: Yes, backward: None },
                    Class {
                        class: UtilityClassTag::Oblivious,
                        outcome: ExpectedClass::Dominated { witness: utility, original: rat(1, 3), garbled: rat(2, 3) },
                    },
                ],
            }
        }
        "ex-randd-2" => {
            let (c, cbar) = randd_channels();
            let utility = UtilityMatrix::new(RMatrix::from_fracs(&[
                &[(1, 1), (0, 1), (0, 1)],
                &[(0, 1), (1, 2), (1, 2)],
                &[(0, 1), (1, 2), (1, 2)],
            ]));
            Fixture {
                id: id.into(),
                c,
                cbar,
                utility: utility.clone(),
                pi: InputDistribution::uniform(3),
                expectations: vec![
                    Values { space: ValueSpace::Blackwell, original: rat(1, 2), garbled: rat(2, 3) },
                    Class {
                        class: UtilityClassTag::DoublyStochasticMultiple,
                        outcome: ExpectedClass::Dominated { witness: utility, original: rat(1, 2), garbled: rat(2, 3) },
                    },
                ],
            }
        }
        "ex-exactsmall" => Fixture {
            id: id.into(),
            c: channel(&[&[(1, 1), (1, 2)], &[(0, 1), (1, 2)]]),
            cbar: channel(&[&[(1, 4), (3, 4)], &[(3, 4), (1, 4)]]),
            utility: UtilityMatrix::new(RMatrix::identity(2)),
            pi: InputDistribution::uniform(2),
            expectations: vec![
                Values { space: ValueSpace::Blackwell, original: rat(3, 4), garbled: rat(3, 4) },
                ExactScores { original: rat(3, 2), garbled: rat(3, 2) },
                Order { kind: OrderKind::Shannon, forward: No, backward: Some(No) },
                Order { kind: OrderKind::ConvexShannon, forward: Yes, backward: None },
                MixtureWeights(vec![rat(1, 2), rat(1, 2)]),
                Class { class: UtilityClassTag::Exact, outcome: ExpectedClass::Equal },
            ],
        },
        "lemma-2x2" => {
            let family = lemma_2x2_family(&rat(2, 1), &rat(1, 1))?;
            Fixture {
                id: id.into(),
                c: family.c1,
                cbar: family.c2,
                utility: family.utility,
                pi: InputDistribution::uniform(2),
                expectations: vec![
                    Values { space: ValueSpace::Blackwell, original: rat(5, 4), garbled: rat(1, 1) },
                    Order { kind: OrderKind::Shannon, forward: Yes, backward: Some(Yes) },
                ],
            }
        }
        "thm-embed" => {
            let z = Channel::new(RMatrix::identity(2))?;
            let zbar = Channel::new(RMatrix::from_ints(&[&[0, 1], &[1, 0]]))?;
            Fixture {
                id: id.into(),
                c: embed_channel(&z, 3)?,
                cbar: embed_channel(&zbar, 3)?,
                utility: UtilityMatrix::new(RMatrix::from_ints(&[&[0, 1, 5], &[2, 2, 0], &[7, 0, 0]])),
                pi: InputDistribution::uniform(3),
                expectations: vec![
                    Values { space: ValueSpace::Blackwell, original: rat(14, 3), garbled: rat(14, 3) },
                    Order { kind: OrderKind::Shannon, forward: Yes, backward: Some(Yes) },
                    Reduction {
                        k: 2,
                        reduced: UtilityMatrix::new(RMatrix::from_ints(&[&[1, 5], &[2, 0]])),
                        tail: rat(7, 1),
                    },
                ],
            }
        }
        other => return Err(Error::UnknownFixture(other.into())),
    };
    Ok(fixture)
}

pub fn all_fixtures() -> Vec<Fixture> {
    FIXTURE_IDS
        .iter()
        .map(|id| paper_fixture(id).expect("built-in fixture"))
        .collect()
}
