use crate::error::{Error, Result};
use crate::lp::{solve, LpOutcome};
use crate::matrix::RMatrix;
use crate::model::{Channel, InputDistribution, Limits};

use super::lps::post_garbling_problem;
use super::{check_pair, witness_from_functional, Certificate, PolicySpace, Verdict};

/// Decides whether `cbar = M·c` for some stochastic `M`.
///
/// `Φ(C)` is a polytope, so the answer is always `Yes` with `M` or `No`
/// with a utility matrix showing a strict Blackwell value gap.
pub fn blackwell_check(c: &Channel, cbar: &Channel, pi: &InputDistribution) -> Result<Verdict> {
    check_pair(c, cbar, pi)?;
    let (m, n) = c.shape();
    let problem = post_garbling_problem(c.matrix(), cbar.matrix());
    match solve(&problem) {
        LpOutcome::Optimal { solution, .. } => {
            let post = RMatrix::from_fn(m, m, |i, k| solution[i * m + k].clone());
            let cert = Certificate::Garbling {
                post,
                pre: RMatrix::identity(n),
            };
            if !cert.verify(c, cbar) {
                return Err(Error::CertificateCheck("garbling does not reproduce C̄".into()));
            }
            Ok(Verdict::Yes(cert))
        }
        LpOutcome::Infeasible { farkas } => {
            // Farkas rows (i, j) pair with entries of C̄; the column-sum rows
            // only shift the bound and are not part of the functional.
            let functional = RMatrix::from_fn(m, n, |i, j| farkas[i * n + j].clone());
            let w = witness_from_functional(
                &functional,
                PolicySpace::Blackwell,
                c,
                cbar,
                pi,
                &Limits::default(),
            )?;
            Ok(Verdict::No(Some(w)))
        }
        LpOutcome::Unbounded => unreachable!("feasibility problems are bounded"),
    }
}
