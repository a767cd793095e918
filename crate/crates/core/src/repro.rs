//! Recomputes every fixture expectation and tabulates expected against computed.

use crate::constructions::{ordering_normalize, reduce_utility};
use crate::error::Result;
use crate::fixtures::{ExpectedClass, ExpectedVerdict, Expectation, Fixture, ValueSpace};
use crate::matrix::RMatrix;
use crate::model::{Channel, InputDistribution, Limits, UtilityMatrix};
use crate::orders::{blackwell_check, cs_check, shannon_check, Certificate, OrderKind, Verdict};
use crate::rational::{format_rational, Rational};
use crate::utility_classes::{compare_reduced, exact_class_score, ClassSearch, ReducedComparison};
use crate::value::{blackwell_value, cs_value};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ReproRow {
    pub id: String,
    pub expected: String,
    pub computed: String,
}

impl ReproRow {
    pub fn passed(&self) -> bool {
        self.expected == self.computed
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ReproReport {
    pub rows: Vec<ReproRow>,
}

impl ReproReport {
    pub fn passed(&self) -> bool {
        self.rows.iter().all(ReproRow::passed)
    }

    pub fn failures(&self) -> impl Iterator<Item = &ReproRow> {
        self.rows.iter().filter(|r| !r.passed())
    }

    /// One line per fixture: id, status, expected, computed.
    pub fn table(&self) -> String {
        let width = self.rows.iter().map(|r| r.id.len()).max().unwrap_or(0).max("fixture".len());
        let mut out = format!("{:width$}  status  expected | computed\n", "fixture");
        for r in &self.rows {
            let status = if r.passed() { "PASS" } else { "FAIL" };
            out.push_str(&format!("{:width$}  {status:6}  {} | {}\n", r.id, r.expected, r.computed));
        }
        out
    }
}

pub fn compact_matrix(m: &RMatrix) -> String {
    let rows: Vec<String> = (0..m.rows())
        .map(|i| {
            let cells: Vec<String> = m.row(i).iter().map(format_rational).collect();
            format!("[{}]", cells.join(","))
        })
        .collect();
    format!("[{}]", rows.join(","))
}

fn pair(a: &Rational, b: &Rational) -> String {
    format!("{},{}", format_rational(a), format_rational(b))
}

fn space_name(space: ValueSpace) -> &'static str {
    match space {
        ValueSpace::Blackwell => "blackwell",
        ValueSpace::ConvexShannon => "cshannon",
    }
}

fn verdict_name(v: ExpectedVerdict) -> &'static str {
    match v {
        ExpectedVerdict::Yes => "YES",
        ExpectedVerdict::No => "NO",
    }
}

fn order_token(kind: OrderKind, forward: &str, backward: Option<&str>) -> String {
    match backward {
        None => format!("{kind}={forward}"),
        Some(b) if b == forward => format!("{kind}={forward}(both)"),
        Some(b) => format!("{kind}={forward}/{b}"),
    }
}

fn class_outcome(class: impl std::fmt::Display, body: &str) -> String {
    format!("{class}-class={body}")
}

fn dominated_body(witness: &UtilityMatrix, original: &Rational, garbled: &Rational) -> String {
    format!(
        "DOMINATED@{}:{}<{}",
        compact_matrix(witness.matrix()),
        format_rational(original),
        format_rational(garbled)
    )
}

fn expected_token(e: &Expectation) -> String {
    match e {
        Expectation::Values { space, original, garbled } => {
            format!("value({})={}", space_name(*space), pair(original, garbled))
        }
        Expectation::Order { kind, forward, backward } => {
            order_token(*kind, verdict_name(*forward), backward.map(verdict_name))
        }
        Expectation::MixtureWeights(w) => {
            let mut w = w.clone();
            w.sort();
            format!("mixture={}", w.iter().map(format_rational).collect::<Vec<_>>().join("+"))
        }
        Expectation::Class { class, outcome } => class_outcome(
            class,
            &match outcome {
                ExpectedClass::Equal => "EQUAL".to_string(),
                ExpectedClass::Dominates => "DOMINATES".to_string(),
                ExpectedClass::Dominated { witness, original, garbled } => dominated_body(witness, original, garbled),
            },
        ),
        Expectation::ExactScores { original, garbled } => format!("scores={}", pair(original, garbled)),
        Expectation::Reduction { k, reduced, tail } => {
            format!("reduce(k={k})={}+{}", compact_matrix(reduced.matrix()), format_rational(tail))
        }
    }
}

fn run_order(kind: OrderKind, c: &Channel, cbar: &Channel, pi: &InputDistribution, limits: &Limits) -> Result<Verdict> {
    match kind {
        OrderKind::Blackwell => blackwell_check(c, cbar, pi),
        OrderKind::Shannon => shannon_check(c, cbar, pi, limits),
        OrderKind::ConvexShannon => cs_check(c, cbar, pi, limits),
    }
}

fn checked_label(
    kind: OrderKind,
    c: &Channel,
    cbar: &Channel,
    pi: &InputDistribution,
    limits: &Limits,
) -> Result<&'static str> {
    let v = run_order(kind, c, cbar, pi, limits)?;
    Ok(if v.verify(c, cbar, pi, limits)? { v.label() } else { "INVALID" })
}

fn computed_token(e: &Expectation, f: &Fixture, limits: &Limits) -> Result<String> {
    let (c, cbar, u, pi) = (&f.c, &f.cbar, &f.utility, &f.pi);
    Ok(match e {
        Expectation::Values { space, .. } => {
            let (a, b) = match space {
                ValueSpace::Blackwell => (blackwell_value(c, u, pi)?.value, blackwell_value(cbar, u, pi)?.value),
                ValueSpace::ConvexShannon => (cs_value(c, u, pi, limits)?.value, cs_value(cbar, u, pi, limits)?.value),
            };
            format!("value({})={}", space_name(*space), pair(&a, &b))
        }
        Expectation::Order { kind, backward, .. } => {
            let forward = checked_label(*kind, c, cbar, pi, limits)?;
            let back = match backward {
                Some(_) => Some(checked_label(*kind, cbar, c, pi, limits)?),
                None => None,
            };
            order_token(*kind, forward, back)
        }
        Expectation::MixtureWeights(_) => {
            let v = cs_check(c, cbar, pi, limits)?;
            match v.certificate() {
                Some(cert @ Certificate::Mixture(terms)) if cert.verify(c, cbar) => {
                    let mut w: Vec<Rational> = terms.iter().map(|t| t.weight.clone()).collect();
                    w.sort();
                    format!("mixture={}", w.iter().map(format_rational).collect::<Vec<_>>().join("+"))
                }
                _ => "mixture=none".to_string(),
            }
        }
        Expectation::Class { class, outcome } => {
            let search = ClassSearch { limits: *limits, ..ClassSearch::default() };
            let forward = compare_reduced(c, cbar, *class, pi, &search)?;
            let body = match (&forward, outcome) {
                (ReducedComparison::Dominates, ExpectedClass::Equal) => {
                    match compare_reduced(cbar, c, *class, pi, &search)? {
                        ReducedComparison::Dominates => "EQUAL".to_string(),
                        other => format!("DOMINATES/{}", other.label()),
                    }
                }
                (ReducedComparison::DominatedStrictlyAt { witness, original_value, garbled_value }, _) => {
                    dominated_body(witness, original_value, garbled_value)
                }
                (other, _) => other.label().to_string(),
            };
            class_outcome(class, &body)
        }
        Expectation::ExactScores { .. } => {
            format!("scores={}", pair(&exact_class_score(c), &exact_class_score(cbar)))
        }
        Expectation::Reduction { k, .. } => {
            let report = ordering_normalize(u, *k)?;
            let ordered = UtilityMatrix::new(report.permutation.mul(u.matrix()));
            let (reduced, tail) = reduce_utility(&ordered, *k, report.direction)?;
            format!("reduce(k={k})={}+{}", compact_matrix(reduced.matrix()), format_rational(&tail))
        }
    })
}

/// Recomputes each fixture. A fixture whose computation errors gets an
/// `ERROR` token in its computed column and fails.
pub fn run_repro(fixtures: &[Fixture], limits: &Limits) -> ReproReport {
    let rows = fixtures
        .iter()
        .map(|f| {
            let expected: Vec<String> = f.expectations.iter().map(expected_token).collect();
            let computed: Vec<String> = f
                .expectations
                .iter()
                .map(|e| computed_token(e, f, limits).unwrap_or_else(|err| format!("ERROR({err})")))
                .collect();
            ReproRow {
                id: f.id.clone(),
                expected: expected.join("; "),
                computed: computed.join("; "),
            }
        })
        .collect();
    ReproReport { rows }
}
