//! Order relations between channels and their certificates.
//!
//! Every verdict carries something checkable: a garbling pair `(M, N)` with
//! `M·C·N = C̄`, a mixture `Σ q_j·M_j·C·N_j = C̄`, or a utility matrix under
//! which `C̄` is strictly more valuable than `C`.

mod blackwell;
mod convex;
mod lps;
mod shannon;
mod suite;

use std::collections::BTreeMap;
use std::fmt;

use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};
use crate::matrix::RMatrix;
use crate::model::{is_column_stochastic, Channel, InputDistribution, Limits, UtilityMatrix};
use crate::rational::{format_rational, Rational};
use crate::value::{blackwell_value, cs_value};

pub use blackwell::blackwell_check;
pub use convex::{compose_mixtures, cs_check};
pub use shannon::{shannon_2x2_exact, shannon_check, shannon_search};
pub use suite::{blackwell_equivalence_suite, convexified_equivalence_suite, SuiteReport};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum OrderKind {
    Blackwell,
    Shannon,
    ConvexShannon,
}

impl fmt::Display for OrderKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            OrderKind::Blackwell => "blackwell",
            OrderKind::Shannon => "shannon",
            OrderKind::ConvexShannon => "cshannon",
        })
    }
}

/// The policy space a witness gap is measured in.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum PolicySpace {
    Blackwell,
    ConvexShannon,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MixtureTerm {
    pub weight: Rational,
    /// Canonical indices `(L, R)` of the deterministic factors in
    /// [`crate::model::Assignments`] order, when the term is a vertex `L·C·R`.
    pub vertex: Option<(usize, usize)>,
    pub post: RMatrix,
    pub pre: RMatrix,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Certificate {
    /// `C̄ = post · C · pre`; `pre` is the identity for the Blackwell order.
    Garbling { post: RMatrix, pre: RMatrix },
    /// `C̄ = Σ weight · post · C · pre`.
    Mixture(Vec<MixtureTerm>),
}

/// A utility matrix under which the candidate garbling is strictly better.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Witness {
    pub utility: UtilityMatrix,
    pub space: PolicySpace,
    /// Value of the original channel `C`.
    pub original_value: Rational,
    /// Value of the candidate `C̄`; strictly larger than `original_value`.
    pub garbled_value: Rational,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Verdict {
    Yes(Certificate),
    /// A refutation. Complete deciders without a separating utility return `No(None)`.
    No(Option<Witness>),
    Unknown,
}

impl Verdict {
    pub fn is_yes(&self) -> bool {
        matches!(self, Verdict::Yes(_))
    }

    pub fn is_no(&self) -> bool {
        matches!(self, Verdict::No(_))
    }

    pub fn label(&self) -> &'static str {
        match self {
            Verdict::Yes(_) => "YES",
            Verdict::No(_) => "NO",
            Verdict::Unknown => "UNKNOWN",
        }
    }

    pub fn certificate(&self) -> Option<&Certificate> {
        match self {
            Verdict::Yes(c) => Some(c),
            _ => None,
        }
    }

    pub fn witness(&self) -> Option<&Witness> {
        match self {
            Verdict::No(w) => w.as_ref(),
            _ => None,
        }
    }

    /// Exact re-check of whatever the verdict carries.
    pub fn verify(
        &self,
        c: &Channel,
        cbar: &Channel,
        pi: &InputDistribution,
        limits: &Limits,
    ) -> Result<bool> {
        match self {
            Verdict::Yes(cert) => Ok(cert.verify(c, cbar)),
            Verdict::No(Some(w)) => w.verify(c, cbar, pi, limits),
            Verdict::No(None) | Verdict::Unknown => Ok(true),
        }
    }
}

impl Certificate {
    pub fn verify(&self, c: &Channel, cbar: &Channel) -> bool {
        match self {
            Certificate::Garbling { post, pre } => garbling_reproduces(c, cbar, post, pre),
            Certificate::Mixture(terms) => {
                if terms.is_empty() || terms.iter().any(|t| t.weight.is_negative()) {
                    return false;
                }
                let total = terms.iter().fold(Rational::zero(), |acc, t| acc + &t.weight);
                if !total.is_one() {
                    return false;
                }
                let mut sum = RMatrix::zeros(cbar.rows(), cbar.cols());
                for t in terms {
                    if !is_column_stochastic(&t.post) || !is_column_stochastic(&t.pre) {
                        return false;
                    }
                    match t.post.checked_mul(c.matrix()).and_then(|x| x.checked_mul(&t.pre)) {
                        Ok(p) if p.shape() == cbar.shape() => sum = sum.add(&p.scale(&t.weight)),
                        _ => return false,
                    }
                }
                sum == *cbar.matrix()
            }
        }
    }

    /// Mixture weights keyed by vertex indices `(L, R)`; `None` unless every
    /// term is a deterministic vertex.
    pub fn mixture_weights(&self) -> Option<BTreeMap<(usize, usize), Rational>> {
        match self {
            Certificate::Mixture(terms) => terms
                .iter()
                .map(|t| t.vertex.map(|v| (v, t.weight.clone())))
                .collect(),
            Certificate::Garbling { .. } => None,
        }
    }
}

fn garbling_reproduces(c: &Channel, cbar: &Channel, post: &RMatrix, pre: &RMatrix) -> bool {
    if !is_column_stochastic(post) || !is_column_stochastic(pre) {
        return false;
    }
    match post.checked_mul(c.matrix()).and_then(|x| x.checked_mul(pre)) {
        Ok(p) => p == *cbar.matrix(),
        Err(_) => false,
    }
}

impl Witness {
    /// Recomputes both values and checks the strict gap.
    pub fn verify(
        &self,
        c: &Channel,
        cbar: &Channel,
        pi: &InputDistribution,
        limits: &Limits,
    ) -> Result<bool> {
        let (orig, garbled) = space_values(self.space, c, cbar, &self.utility, pi, limits)?;
        Ok(orig == self.original_value && garbled == self.garbled_value && garbled > orig)
    }
}

fn space_values(
    space: PolicySpace,
    c: &Channel,
    cbar: &Channel,
    u: &UtilityMatrix,
    pi: &InputDistribution,
    limits: &Limits,
) -> Result<(Rational, Rational)> {
    Ok(match space {
        PolicySpace::Blackwell => (
            blackwell_value(c, u, pi)?.value,
            blackwell_value(cbar, u, pi)?.value,
        ),
        PolicySpace::ConvexShannon => (
            cs_value(c, u, pi, limits)?.value,
            cs_value(cbar, u, pi, limits)?.value,
        ),
    })
}

/// Turns a separating functional `U ∈ R^{m×n}` into the utility `Ū = Π⁻¹·Uᵀ`,
/// so that `tr(Ū·D·Π) = Σ u_ij·d_ij`. Checks the strict gap before returning.
fn witness_from_functional(
    functional: &RMatrix,
    space: PolicySpace,
    c: &Channel,
    cbar: &Channel,
    pi: &InputDistribution,
    limits: &Limits,
) -> Result<Witness> {
    let (m, n) = functional.shape();
    let utility = UtilityMatrix::new(RMatrix::from_fn(n, m, |j, i| {
        &functional[(i, j)] / &pi.weights()[j]
    }));
    let (original_value, garbled_value) = space_values(space, c, cbar, &utility, pi, limits)?;
    if garbled_value <= original_value {
        return Err(Error::CertificateCheck(format!(
            "separating utility gives no strict gap ({} vs {})",
            format_rational(&original_value),
            format_rational(&garbled_value)
        )));
    }
    Ok(Witness {
        utility,
        space,
        original_value,
        garbled_value,
    })
}

fn check_pair(c: &Channel, cbar: &Channel, pi: &InputDistribution) -> Result<()> {
    if c.shape() != cbar.shape() {
        return Err(Error::DimensionMismatch(format!(
            "channels are {}x{} and {}x{}",
            c.rows(),
            c.cols(),
            cbar.rows(),
            cbar.cols()
        )));
    }
    pi.check_against(c)
}
