//! Acceptance suite. Every check is exact; each criterion prints one line.

use std::panic::{catch_unwind, AssertUnwindSafe};

use channel_order::constructions::{
    embed_channel, inner_garbling, lemma_2x2_family, ordering_normalize, pi_rescale, reduce_utility,
    transport_certificate,
};
use channel_order::fixtures::paper_fixture;
use channel_order::model::{deterministic_matrices, permutation_matrices};
use channel_order::orders::{
    blackwell_check, blackwell_equivalence_suite, convexified_equivalence_suite, cs_check, shannon_2x2_exact,
    shannon_check, shannon_search,
};
use channel_order::random;
use channel_order::utility_classes::{
    compare_reduced, exact_class_score, ClassSearch, ReducedComparison, UtilityClassTag,
};
use channel_order::value::expected_utility;
use channel_order::{
    blackwell_value, cs_value, rat, shannon_value, Certificate, Channel, InputDistribution, Limits, RMatrix,
    Rational, UtilityMatrix, Verdict,
};
use num_traits::{One, Zero};
use rand::Rng;

type Outcome = Result<(), String>;

macro_rules! ensure {
    ($cond:expr, $($msg:tt)+) => {
        if !$cond {
            return Err(format!($($msg)+));
        }
    };
}

fn garbling_of(v: &Verdict) -> Option<(&RMatrix, &RMatrix)> {
    match v {
        Verdict::Yes(Certificate::Garbling { post, pre }) => Some((post, pre)),
        _ => None,
    }
}

fn criterion_1() -> Outcome {
    let f = paper_fixture("ex-rauh").map_err(|e| e.to_string())?;
    let (c, cbar, u, pi) = (&f.c, &f.cbar, &f.utility, &f.pi);
    let v = blackwell_value(c, u, pi).unwrap().value;
    let vbar = blackwell_value(cbar, u, pi).unwrap().value;
    ensure!(v == rat(28, 20) && vbar == rat(29, 20), "values {v} and {vbar}");

    let s = shannon_check(c, cbar, pi, &Limits::default()).unwrap();
    let (post, pre) = garbling_of(&s).ok_or(format!("shannon verdict {}", s.label()))?;
    ensure!(post.mul(c.matrix()).mul(pre) == *cbar.matrix(), "M·C·N differs from C̄");

    let b = blackwell_check(c, cbar, pi).unwrap();
    let w = b.witness().ok_or("blackwell order not refuted with a witness")?;
    let (wv, wvbar) = (
        blackwell_value(c, &w.utility, pi).unwrap().value,
        blackwell_value(cbar, &w.utility, pi).unwrap().value,
    );
    ensure!(wvbar > wv, "witness gap {wv} vs {wvbar}");
    ensure!(wv == w.original_value && wvbar == w.garbled_value, "witness values misreported");
    Ok(())
}

fn criterion_2() -> Outcome {
    for (id, class, values) in [
        ("ex-randd-1", UtilityClassTag::Oblivious, (rat(1, 3), rat(2, 3))),
        ("ex-randd-2", UtilityClassTag::DoublyStochasticMultiple, (rat(1, 2), rat(2, 3))),
    ] {
        let f = paper_fixture(id).map_err(|e| e.to_string())?;
        let swap13 = RMatrix::from_ints(&[&[0, 0, 1], &[0, 1, 0], &[1, 0, 0]]);
        ensure!(f.c.matrix().mul(&swap13) == *f.cbar.matrix(), "{id}: C̄ is not C with inputs 1 and 3 swapped");
        let direct = (
            blackwell_value(&f.c, &f.utility, &f.pi).unwrap().value,
            blackwell_value(&f.cbar, &f.utility, &f.pi).unwrap().value,
        );
        ensure!(direct == values, "{id}: pinned utility gives {direct:?}");
        let r = compare_reduced(&f.c, &f.cbar, class, &f.pi, &ClassSearch::default()).unwrap();
        match r {
            ReducedComparison::DominatedStrictlyAt { witness, original_value, garbled_value } => {
                ensure!(witness == f.utility, "{id}: search found a different witness");
                ensure!((original_value, garbled_value) == values, "{id}: comparison values differ");
            }
            other => return Err(format!("{id}: {}", other.label())),
        }
    }
    Ok(())
}

fn criterion_3() -> Outcome {
    let f = paper_fixture("ex-exactsmall").map_err(|e| e.to_string())?;
    let (c, cbar, pi) = (&f.c, &f.cbar, &f.pi);
    ensure!(exact_class_score(c) == rat(3, 2) && exact_class_score(cbar) == rat(3, 2), "scores differ from 3/2");
    for p in permutation_matrices(2) {
        let u = UtilityMatrix::new(p);
        for ch in [c, cbar] {
            let v = blackwell_value(ch, &u, pi).unwrap().value;
            ensure!(v == rat(3, 4), "per-unit value {v} under {:?}", u.matrix());
        }
    }
    ensure!(matches!(shannon_2x2_exact(c, cbar).unwrap(), Verdict::No(_)), "C ⊵_S C̄ not refuted");
    ensure!(matches!(shannon_2x2_exact(cbar, c).unwrap(), Verdict::No(_)), "C̄ ⊵_S C not refuted");

    let v = cs_check(c, cbar, pi, &Limits::default()).unwrap();
    let Some(Certificate::Mixture(terms)) = v.certificate() else {
        return Err(format!("cs verdict {}", v.label()));
    };
    let mut weights: Vec<Rational> = terms.iter().map(|t| t.weight.clone()).collect();
    weights.sort();
    ensure!(weights == [rat(1, 2), rat(1, 2)], "weights {weights:?}");
    let sum = terms.iter().fold(RMatrix::zeros(2, 2), |acc, t| {
        acc.add(&t.post.mul(c.matrix()).mul(&t.pre).scale(&t.weight))
    });
    ensure!(sum == *cbar.matrix(), "Σ q·M·C·N differs from C̄");
    Ok(())
}

fn criterion_4() -> Outcome {
    let pi = InputDistribution::uniform(2);
    let limits = Limits::default();
    for ((e1, e2), (v1, v2)) in [((2, 1), (rat(5, 4), rat(1, 1))), ((1, 2), (rat(1, 1), rat(5, 4)))] {
        let f = lemma_2x2_family(&rat(e1, 1), &rat(e2, 1)).map_err(|e| e.to_string())?;
        ensure!((f.v1.clone(), f.v2.clone()) == (v1.clone(), v2.clone()), "ε = ({e1},{e2}): closed forms");
        let evaluated = (
            blackwell_value(&f.c1, &f.utility, &pi).unwrap().value,
            blackwell_value(&f.c2, &f.utility, &pi).unwrap().value,
        );
        ensure!(evaluated == (v1, v2), "ε = ({e1},{e2}): evaluated {evaluated:?}");
        for (x, y) in [(&f.c1, &f.c2), (&f.c2, &f.c1)] {
            let v = shannon_check(x, y, &pi, &limits).unwrap();
            let (post, pre) = garbling_of(&v).ok_or(format!("mutual garbling: {}", v.label()))?;
            ensure!(post.mul(x.matrix()).mul(pre) == *y.matrix(), "certificate does not reproduce");
        }
    }
    Ok(())
}

fn criterion_5() -> Outcome {
    let r = blackwell_equivalence_suite(1, 50).map_err(|e| e.to_string())?;
    ensure!(r.cases == 51, "ran {} cases", r.cases);
    ensure!(r.failures.is_empty(), "{:?}", r.failures);
    ensure!(r.yes > 0 && r.no > 0, "degenerate suite: {} yes, {} no", r.yes, r.no);
    Ok(())
}

fn criterion_6() -> Outcome {
    let r = convexified_equivalence_suite(1, 50).map_err(|e| e.to_string())?;
    ensure!(r.cases == 50, "ran {} cases", r.cases);
    ensure!(r.failures.is_empty(), "{:?}", r.failures);
    ensure!(r.yes >= 25 && r.no > 0, "degenerate suite: {} yes, {} no", r.yes, r.no);
    Ok(())
}

/// `max tr(U·L·C·R·Π)` over all deterministic `L` and `R`.
fn vertex_oracle(c: &Channel, u: &UtilityMatrix, pi: &InputDistribution) -> Rational {
    let (m, n) = c.shape();
    let mut best: Option<Rational> = None;
    for l in deterministic_matrices(m, m) {
        let lc = l.mul(c.matrix());
        for r in deterministic_matrices(n, n) {
            let v = expected_utility(u, &lc.mul(&r), pi);
            if best.as_ref().is_none_or(|b| v > *b) {
                best = Some(v);
            }
        }
    }
    best.unwrap()
}

fn criterion_7() -> Outcome {
    let mut rng = random::rng(7);
    let limits = Limits::default();
    for idx in 0..100 {
        let (m, n) = (rng.gen_range(2..=3), rng.gen_range(2..=3));
        let c = random::channel(&mut rng, m, n);
        let u = random::utility(&mut rng, n, m, 5);
        let pi = random::distribution(&mut rng, n);
        let b = blackwell_value(&c, &u, &pi).unwrap().value;
        let s = shannon_value(&c, &u, &pi, &limits).unwrap().value;
        let cs = cs_value(&c, &u, &pi, &limits).unwrap().value;
        let oracle = vertex_oracle(&c, &u, &pi);
        ensure!(b <= s, "case {idx}: blackwell {b} > shannon {s}");
        ensure!(s == cs, "case {idx}: shannon {s} != cshannon {cs}");
        ensure!(cs == oracle, "case {idx}: cshannon {cs} != vertex oracle {oracle}");
    }
    Ok(())
}

fn trace_oracle(c: &RMatrix, u: &RMatrix) -> Rational {
    deterministic_matrices(u.cols(), c.rows())
        .map(|a| c.mul(u).mul(&a).trace())
        .max()
        .unwrap()
}

fn criterion_8() -> Outcome {
    let mut rng = random::rng(8);
    let (m, k) = (3, 2);
    for idx in 0..100 {
        let u = random::utility(&mut rng, 3, 3, 6);
        let report = ordering_normalize(&u, k).map_err(|e| e.to_string())?;
        let ordered = UtilityMatrix::new(report.permutation.mul(u.matrix()));
        let (ubar, s) = reduce_utility(&ordered, k, report.direction).map_err(|e| e.to_string())?;
        let z = random::channel(&mut rng, m - 1, k);
        let c = embed_channel(&z, m).map_err(|e| e.to_string())?;
        let lhs = trace_oracle(c.matrix(), ordered.matrix());
        let rhs = trace_oracle(z.matrix(), ubar.matrix()) + &s;
        ensure!(lhs == rhs, "reduction {idx}: {lhs} != {rhs}");
    }

    let limits = Limits::default();
    let pi = InputDistribution::uniform(3);
    for idx in 0..50 {
        let z = random::channel(&mut rng, 2, 2);
        let post = random::stochastic_matrix(&mut rng, 2, 2, 4);
        let pre = random::stochastic_matrix(&mut rng, 2, 2, 4);
        let zbar = z.garble(&post, &pre).unwrap();
        let (c, cbar) = (embed_channel(&z, m).unwrap(), embed_channel(&zbar, m).unwrap());
        let block_post = post.block_diag(&RMatrix::identity(1));
        let block_pre = pre.block_diag(&RMatrix::identity(1));
        ensure!(
            block_post.mul(c.matrix()).mul(&block_pre) == *cbar.matrix(),
            "transport {idx}: block identity fails"
        );
        let cert = transport_certificate(&post, &pre, m);
        ensure!(cert.verify(&c, &cbar), "transport {idx}: block certificate");
        ensure!(
            inner_garbling(&z, &zbar, m, &cert).map_err(|e| e.to_string())? == Some((post, pre)),
            "transport {idx}: inner pair not recovered"
        );
        let v = shannon_check(&c, &cbar, &pi, &limits).unwrap();
        ensure!(v.is_yes() && v.verify(&c, &cbar, &pi, &limits).unwrap(), "transport {idx}: shannon {}", v.label());
        ensure!(cs_check(&c, &cbar, &pi, &limits).unwrap().is_yes(), "transport {idx}: cshannon");

        // contrapositive on an unrelated pair
        let zr = random::channel(&mut rng, 2, 2);
        let cr = embed_channel(&zr, m).unwrap();
        if cs_check(&c, &cr, &pi, &limits).unwrap().is_no() {
            ensure!(
                shannon_2x2_exact(&z, &zr).unwrap().is_no(),
                "contrapositive {idx}: embedded pair refuted but inner pair accepted"
            );
        }
    }
    Ok(())
}

fn criterion_9() -> Outcome {
    let mut rng = random::rng(9);
    for idx in 0..100 {
        let (m, n) = (rng.gen_range(2..=3), rng.gen_range(2..=3));
        let c = random::channel(&mut rng, m, n);
        let ubar = random::utility(&mut rng, n, m, 5);
        let pibar = random::distribution(&mut rng, n);
        let u = pi_rescale(&ubar, &pibar, n).map_err(|e| e.to_string())?;
        let lhs = blackwell_value(&c, &u, &InputDistribution::uniform(n)).unwrap().value;
        let rhs = blackwell_value(&c, &ubar, &pibar).unwrap().value;
        ensure!(lhs == rhs, "triple {idx}: {lhs} != {rhs}");
    }
    Ok(())
}

fn farey(order: i64) -> Vec<Rational> {
    let mut out: Vec<Rational> = (1..=order).flat_map(|q| (0..=q).map(move |p| rat(p, q))).collect();
    out.sort();
    out.dedup();
    out
}

/// Is there `w > 0` with `w ≤ cap` and `k_i·w ≥ r_i` for all rows?
fn positive_feasible(rows: &[(Rational, Rational)], cap: &Rational) -> bool {
    let mut lower: Option<Rational> = None;
    let mut upper = cap.clone();
    for (k, r) in rows {
        if k.is_zero() {
            if *r > Rational::zero() {
                return false;
            }
        } else if *k > Rational::zero() {
            let b = r / k;
            if lower.as_ref().is_none_or(|l| b > *l) {
                lower = Some(b);
            }
        } else {
            upper = upper.min(r / k);
        }
    }
    upper > Rational::zero() && lower.is_none_or(|l| l <= upper)
}

/// Grid search over the first pre-garbled point `x = a0 + s·(b0 − a0)` with
/// `s` in the Farey set; for each `x` the second point and the affine
/// post-map are found exactly by a one-dimensional feasibility check.
fn grid_shannon_2x2(c: &Channel, cbar: &Channel) -> bool {
    let (a0, b0) = (c[(0, 0)].clone(), c[(0, 1)].clone());
    let (abar, bbar) = (cbar[(0, 0)].clone(), cbar[(0, 1)].clone());
    if abar == bbar {
        return true;
    }
    let (lo, hi) = if a0 <= b0 { (a0.clone(), b0.clone()) } else { (b0.clone(), a0.clone()) };
    let d = &bbar - &abar;
    let one = Rational::one();
    for s in farey(32) {
        let x = &a0 + &s * (&b0 - &a0);
        // y = x ± w, slope β = ±d / w, f(x) = ā, f(0) = ā − βx, f(1) = ā + β(1 − x).
        // With σ = ±1, multiplying 0 ≤ f(0) ≤ 1 and 0 ≤ f(1) ≤ 1 by w > 0 gives rows k·w ≥ r.
        for (sigma, cap) in [(one.clone(), &hi - &x), (-one.clone(), &x - &lo)] {
            let dx = &sigma * &d * &x;
            let dx1 = &sigma * &d * (&one - &x);
            let rows = [
                (abar.clone(), dx.clone()),
                (&one - &abar, -dx.clone()),
                (abar.clone(), -dx1.clone()),
                (&one - &abar, dx1.clone()),
            ];
            if positive_feasible(&rows, &cap) {
                return true;
            }
        }
    }
    false
}

fn criterion_10() -> Outcome {
    let mut rng = random::rng(10);
    let limits = Limits::default();
    let pi = InputDistribution::uniform(2);
    let (mut exact_yes, mut grid_yes) = (0, 0);
    for idx in 0..200 {
        let c = random::channel(&mut rng, 2, 2);
        let constructed = idx % 2 == 0;
        let cbar = if constructed {
            let post = random::stochastic_matrix(&mut rng, 2, 2, 4);
            let pre = random::stochastic_matrix(&mut rng, 2, 2, 4);
            c.garble(&post, &pre).unwrap()
        } else {
            random::channel(&mut rng, 2, 2)
        };
        let exact = shannon_2x2_exact(&c, &cbar).unwrap();
        ensure!(!matches!(exact, Verdict::Unknown), "pair {idx}: exact decider undecided");
        ensure!(exact.verify(&c, &cbar, &pi, &limits).unwrap(), "pair {idx}: exact certificate");
        let grid = grid_shannon_2x2(&c, &cbar);
        exact_yes += exact.is_yes() as usize;
        grid_yes += grid as usize;
        ensure!(!grid || exact.is_yes(), "pair {idx}: grid finds a garbling the decider rejects");
        ensure!(!constructed || (grid && exact.is_yes()), "pair {idx}: constructed garbling missed");

        if shannon_search(&c, &cbar, &limits).unwrap().is_some() {
            ensure!(exact.is_yes(), "pair {idx}: search certificate but decider says NO");
        }
        let full = shannon_check(&c, &cbar, &pi, &limits).unwrap();
        ensure!(full.verify(&c, &cbar, &pi, &limits).unwrap(), "pair {idx}: shannon certificate");
        ensure!(
            (full.is_yes() && exact.is_yes()) || (full.is_no() && exact.is_no()),
            "pair {idx}: shannon_check {} vs decider {}",
            full.label(),
            exact.label()
        );
        let cs = cs_check(&c, &cbar, &pi, &limits).unwrap();
        ensure!(cs.verify(&c, &cbar, &pi, &limits).unwrap(), "pair {idx}: cshannon certificate");
        ensure!(!cs.is_no() || exact.is_no(), "pair {idx}: cshannon NO but decider YES");
        ensure!(!exact.is_yes() || cs.is_yes(), "pair {idx}: decider YES but cshannon NO");
    }
    ensure!(exact_yes >= 100 && grid_yes >= 100, "too few positives: {exact_yes} exact, {grid_yes} grid");
    ensure!(exact_yes < 200, "no negatives among random pairs");
    Ok(())
}

fn main() {
    let criteria: [(&str, fn() -> Outcome); 10] = [
        ("two-letter example: values, Shannon garbling, Blackwell refutation", criterion_1),
        ("oblivious and doubly-stochastic witnesses", criterion_2),
        ("exact class cannot separate; mixture of two garblings", criterion_3),
        ("2x2 family: values and mutual garblings", criterion_4),
        ("Blackwell order versus usefulness, 50 random pairs", criterion_5),
        ("convexified order versus usefulness, 50 random pairs", criterion_6),
        ("value lattice on 100 random instances", criterion_7),
        ("utility reduction and embedding transport", criterion_8),
        ("distribution rescaling on 100 triples", criterion_9),
        ("exact 2x2 decider against grid search and sound checks", criterion_10),
    ];
    let mut failed = 0;
    for (i, (name, run)) in criteria.iter().enumerate() {
        let outcome = catch_unwind(AssertUnwindSafe(run)).unwrap_or_else(|p| {
            let msg = p
                .downcast_ref::<String>()
                .cloned()
                .or_else(|| p.downcast_ref::<&str>().map(|s| s.to_string()))
                .unwrap_or_default();
            Err(format!("panic: {msg}"))
        });
        match outcome {
            Ok(()) => println!("criterion {:2}: PASS  {name}", i + 1),
            Err(why) => {
                failed += 1;
                println!("criterion {:2}: FAIL  {name}: {why}", i + 1);
            }
        }
    }
    if failed > 0 {
        println!("{failed} of {} criteria failed", criteria.len());
        std::process::exit(1);
    }
    println!("all {} criteria passed", criteria.len());
}
