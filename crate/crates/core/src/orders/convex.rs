use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};
use crate::lp::{merge_duplicate_columns, solve, LpOutcome, LpProblem};
use crate::matrix::RMatrix;
use crate::model::{deterministic_count, deterministic_from_assignment, Assignments, Channel, InputDistribution, Limits};
use crate::rational::Rational;

use super::{check_pair, witness_from_functional, Certificate, MixtureTerm, PolicySpace, Verdict};

/// Decides whether `cbar` lies in `Φ_cS(c)`, the convex hull of all
/// `L·c·R` over deterministic `L` (`m x m`) and `R` (`n x n`).
///
/// The membership LP has one weight per distinct product plus a row forcing
/// the weights to sum to one. A feasible basis gives the mixture; otherwise
/// the Farkas vector restricted to the entry rows is a functional that
/// separates `cbar` from the hull, returned as the utility `Π⁻¹·Uᵀ`.
pub fn cs_check(c: &Channel, cbar: &Channel, pi: &InputDistribution, limits: &Limits) -> Result<Verdict> {
    check_pair(c, cbar, pi)?;
    let (m, n) = c.shape();
    let pairs = deterministic_count(m, m).saturating_mul(deterministic_count(n, n));
    limits.check_count("deterministic pairs m^m·n^n", pairs, limits.max_vertex_pairs)?;

    let pre_count = deterministic_count(n, n) as usize;
    let pres: Vec<RMatrix> = Assignments::new(n, n)
        .map(|a| deterministic_from_assignment(n, &a))
        .collect();
    let posts: Vec<Vec<usize>> = Assignments::new(m, m).collect();
    let pre_products: Vec<RMatrix> = pres.iter().map(|r| c.matrix().mul(r)).collect();

    let mut columns = Vec::with_capacity(posts.len() * pre_count);
    for post in &posts {
        for x in &pre_products {
            // L·X for deterministic L: row i collects the rows k with post[k] = i
            let mut col = vec![Rational::zero(); m * n + 1];
            for (k, &i) in post.iter().enumerate() {
                for j in 0..n {
                    col[i * n + j] += &x[(k, j)];
                }
            }
            col[m * n] = Rational::one();
            columns.push(col);
        }
    }
    let (unique, first) = merge_duplicate_columns(columns);

    let a = RMatrix::from_fn(m * n + 1, unique.len(), |r, v| unique[v][r].clone());
    let mut b: Vec<Rational> = cbar.matrix().entries().to_vec();
    b.push(Rational::one());
    let problem = LpProblem::feasibility(a, b)?;

    match solve(&problem) {
        LpOutcome::Optimal { solution, .. } => {
            let terms: Vec<MixtureTerm> = solution
                .iter()
                .enumerate()
                .filter(|(_, w)| w.is_positive())
                .map(|(v, w)| {
                    let (li, ri) = (first[v] / pre_count, first[v] % pre_count);
                    MixtureTerm {
                        weight: w.clone(),
                        vertex: Some((li, ri)),
                        post: deterministic_from_assignment(m, &posts[li]),
                        pre: pres[ri].clone(),
                    }
                })
                .collect();
            let cert = Certificate::Mixture(terms);
            if !cert.verify(c, cbar) {
                return Err(Error::CertificateCheck("mixture does not reproduce C̄".into()));
            }
            Ok(Verdict::Yes(cert))
        }
        LpOutcome::Infeasible { farkas } => {
            let functional = RMatrix::from_fn(m, n, |i, j| farkas[i * n + j].clone());
            let w = witness_from_functional(&functional, PolicySpace::ConvexShannon, c, cbar, pi, limits)?;
            Ok(Verdict::No(Some(w)))
        }
        LpOutcome::Unbounded => unreachable!("feasibility problems are bounded"),
    }
}

/// Mixes two mixtures: if `cbar = Σ_j q_j·M_j·c·N_j` and
/// `d = Σ_i p_i·A_i·cbar·B_i`, then `d = Σ_{i,j} p_i q_j·(A_i M_j)·c·(N_j B_i)`.
pub fn compose_mixtures(outer: &[MixtureTerm], inner: &[MixtureTerm]) -> Vec<MixtureTerm> {
    let mut out = Vec::with_capacity(outer.len() * inner.len());
    for o in outer {
        for i in inner {
            out.push(MixtureTerm {
                weight: &o.weight * &i.weight,
                vertex: None,
                post: o.post.mul(&i.post),
                pre: i.pre.mul(&o.pre),
            });
        }
    }
    out
}
