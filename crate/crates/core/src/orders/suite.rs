//! Seeded property suites relating the garbling orders to usefulness.

use rand::Rng;

use crate::error::Result;
use crate::matrix::RMatrix;
use crate::model::{Channel, InputDistribution, Limits};
use crate::random;
use crate::rational::format_rational;
use crate::value::{blackwell_value, cs_value};

use super::{blackwell_check, cs_check, Verdict};

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct SuiteReport {
    pub cases: usize,
    pub yes: usize,
    pub no: usize,
    pub failures: Vec<String>,
}

impl SuiteReport {
    pub fn passed(&self) -> bool {
        self.failures.is_empty()
    }

    fn record(&mut self, verdict: &Verdict) {
        self.cases += 1;
        match verdict {
            Verdict::Yes(_) => self.yes += 1,
            Verdict::No(_) => self.no += 1,
            Verdict::Unknown => {}
        }
    }
}

const FALSIFICATION_UTILITIES: usize = 20;

fn rauh_pair() -> (Channel, Channel) {
    let c = RMatrix::from_fracs(&[&[(9, 10), (0, 1)], &[(1, 10), (1, 1)]]);
    let swapped = c.mul(&RMatrix::from_ints(&[&[0, 1], &[1, 0]]));
    (
        Channel::new(c).expect("stochastic"),
        Channel::new(swapped).expect("stochastic"),
    )
}

/// Blackwell's equivalence, checked on random pairs with `2 ≤ m, n ≤ 3`.
///
/// Even-numbered cases are constructed garblings `M·C` and must be `Yes`.
/// Every `Yes` must survive 20 random utilities without a value gap; every
/// `No` must carry a witness whose strict gap re-verifies. The pair from
/// the introductory two-letter example is run as an extra case.
pub fn blackwell_equivalence_suite(seed: u64, count: usize) -> Result<SuiteReport> {
    let mut rng = random::rng(seed);
    let mut report = SuiteReport::default();
    let mut cases: Vec<(Channel, Channel, InputDistribution, bool)> = Vec::with_capacity(count + 1);
    let (c, cbar) = rauh_pair();
    cases.push((c, cbar, InputDistribution::uniform(2), false));
    for idx in 0..count {
        let m = rng.gen_range(2..=3);
        let n = rng.gen_range(2..=3);
        let c = random::channel(&mut rng, m, n);
        let constructed = idx % 2 == 0;
        let cbar = if constructed {
            Channel::new(random::stochastic_matrix(&mut rng, m, m, 3).mul(c.matrix()))?
        } else {
            random::channel(&mut rng, m, n)
        };
        let pi = random::distribution(&mut rng, n);
        cases.push((c, cbar, pi, constructed));
    }

    let limits = Limits::default();
    for (idx, (c, cbar, pi, constructed)) in cases.into_iter().enumerate() {
        let verdict = blackwell_check(&c, &cbar, &pi)?;
        report.record(&verdict);
        if !verdict.verify(&c, &cbar, &pi, &limits)? {
            report.failures.push(format!("case {idx}: certificate does not verify"));
            continue;
        }
        match &verdict {
            Verdict::Yes(_) => {
                for _ in 0..FALSIFICATION_UTILITIES {
                    let u = random::utility(&mut rng, c.inputs(), c.outputs(), 5);
                    let (v, vbar) = (blackwell_value(&c, &u, &pi)?.value, blackwell_value(&cbar, &u, &pi)?.value);
                    if vbar > v {
                        report.failures.push(format!(
                            "case {idx}: garbling beats original ({} > {})",
                            format_rational(&vbar),
                            format_rational(&v)
                        ));
                        break;
                    }
                }
            }
            Verdict::No(None) => report.failures.push(format!("case {idx}: refutation without witness")),
            Verdict::No(Some(_)) if constructed => {
                report.failures.push(format!("case {idx}: constructed garbling refuted"))
            }
            Verdict::No(Some(_)) => {}
            Verdict::Unknown => report.failures.push(format!("case {idx}: undecided")),
        }
    }
    Ok(report)
}

/// Equivalence of convexified Shannon order and usefulness on random pairs
/// with `2 ≤ m, n ≤ 3`.
///
/// Even-numbered cases are random mixtures `Σ q·M·C·N` of two or three
/// stochastic garblings and must be `Yes`. Other cases: a `No` witness must
/// re-verify through `cs_value`; a `Yes` must survive random utilities.
pub fn convexified_equivalence_suite(seed: u64, count: usize) -> Result<SuiteReport> {
    let mut rng = random::rng(seed);
    let limits = Limits::default();
    let mut report = SuiteReport::default();
    for idx in 0..count {
        let m = rng.gen_range(2..=3);
        let n = rng.gen_range(2..=3);
        let c = random::channel(&mut rng, m, n);
        let constructed = idx % 2 == 0;
        let cbar = if constructed {
            let terms = rng.gen_range(2..=3);
            let q = random::weights(&mut rng, terms);
            let mut sum = RMatrix::zeros(m, n);
            for w in &q {
                let post = random::stochastic_matrix(&mut rng, m, m, 3);
                let pre = random::stochastic_matrix(&mut rng, n, n, 3);
                sum = sum.add(&post.mul(c.matrix()).mul(&pre).scale(w));
            }
            Channel::new(sum)?
        } else {
            random::channel(&mut rng, m, n)
        };
        let pi = random::distribution(&mut rng, n);
        let verdict = cs_check(&c, &cbar, &pi, &limits)?;
        report.record(&verdict);
        if !verdict.verify(&c, &cbar, &pi, &limits)? {
            report.failures.push(format!("case {idx}: certificate does not verify"));
            continue;
        }
        match &verdict {
            Verdict::Yes(_) => {
                for _ in 0..FALSIFICATION_UTILITIES {
                    let u = random::utility(&mut rng, n, m, 5);
                    let v = cs_value(&c, &u, &pi, &limits)?.value;
                    let vbar = cs_value(&cbar, &u, &pi, &limits)?.value;
                    if vbar > v {
                        report.failures.push(format!("case {idx}: mixture beats original"));
                        break;
                    }
                }
            }
            Verdict::No(Some(_)) if constructed => {
                report.failures.push(format!("case {idx}: constructed mixture refuted"))
            }
            Verdict::No(Some(_)) => {}
            Verdict::No(None) | Verdict::Unknown => {
                report.failures.push(format!("case {idx}: verdict without certificate"))
            }
        }
    }
    Ok(report)
}
