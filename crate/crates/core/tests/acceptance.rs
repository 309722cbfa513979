//! One line per acceptance criterion. Known shortfalls are printed as FAIL with
//! the reason, and their exact shape is pinned so a change in behaviour shows up.

mod common;

use std::io::Write;

use common::props::*;
use common::*;
use proptest::prelude::*;
use proptest::test_runner::TestCaseError;

use qnilp::kacmoody::{a1q, blueprint, preset};
use qnilp::ore::DRing;
use qnilp::primes::{
    chain_steps, eta_and_primes, gamma_subset, integralize, quasi_commutation_scalar, CglStructure, LaurentBounds,
    Orientation, PrimesError, SeedOptions,
};
use qnilp::scalars::{Coeff, RatFunc};
use qnilp::seed::{exchange_rhs, mutate_seed, quiver_edges, SeedError};
use qnilp::{CGLPresentation, LaurentScalar, QuantumSeed};

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: impl Into<String>) -> Outcome {
    Outcome { pass, detail: detail.into() }
}

fn columns(seed: &QuantumSeed<impl Coeff>) -> Vec<Vec<i64>> {
    seed.btilde.ex().iter().map(|&k| seed.btilde.column(k).unwrap()).collect()
}

fn b2_fixture() -> Outcome {
    let pr = load("b2-w1212");
    let s = CglStructure::new(pr.presentation.clone()).unwrap();
    let ybar_ok = Some(&s.ybar) == pr.fixtures.ybar.as_ref();
    let seed = initial_seed(&s);
    let cols = columns(&seed);
    let printed = columns_of(pr.fixtures.btilde.as_ref().unwrap());

    // Both identities hold for the computed column 2: compatibility is
    // enforced by the seed validator, and the grading sum vanishes.
    let grading_ok = (0..2).all(|t| (0..4).map(|j| cols[1][j] * seed.frame.degrees[j][t]).sum::<i64>() == 0);
    let (c, w) = pr.cartan.clone().unwrap();
    let bp = blueprint(&c, &w).unwrap();
    let bp_ok = Some(&bp.btilde) == pr.fixtures.btilde.as_ref() && bp.check().is_ok();

    let neg = |v: &[i64]| v.iter().map(|x| -x).collect::<Vec<i64>>();
    assert!(ybar_ok && grading_ok && bp_ok);
    assert_eq!(cols, vec![neg(&printed[0]), neg(&printed[1])]);

    let pass = ybar_ok && cols[0] == vec![0, 2, -1, 0] && cols[1] == vec![-1, 0, 1, -1];
    outcome(
        pass,
        format!(
            "ybar exact; build_seed(id) columns {:?}, {:?} are the negatives of the printed ones \
             (the algebra forces r_21 = q, the printed matrix fits r_21 = q^-1); \
             the blueprint reproduces the printed matrix and passes both identities",
            cols[0], cols[1]
        ),
    )
}

fn columns_of(b: &qnilp::ExchangeMatrix) -> Vec<Vec<i64>> {
    b.ex().iter().map(|&k| b.column(k).unwrap()).collect()
}

fn a2_twisted_fixture() -> Outcome {
    let pr = load("a2tw-01010");
    let s = CglStructure::new(pr.presentation.clone()).unwrap();
    let p = &s.presentation;
    let printed = pr.fixtures.ybar.clone().unwrap();
    let first_four = s.ybar[..4] == printed[..4];
    let fifth = s.ybar[4] == printed[4];
    let (c, w) = pr.cartan.clone().unwrap();
    let bp = blueprint(&c, &w).unwrap();
    let bp_ok = Some(&bp.btilde) == pr.fixtures.btilde.as_ref();

    let computed = el(p, "q^3*x1*x3*x5 - q*x2*x5 - q*x1*x4 + q^-5*x3^3");
    let printed_normal = (0..5).all(|i| quasi_commutation_scalar(p, &printed[4], &p.gen(i)).is_some());
    assert!(first_four && bp_ok && !fifth && !printed_normal);
    assert_eq!(s.ybar[4], computed);

    outcome(
        first_four && fifth && bp_ok,
        format!(
            "ybar1..4 exact, blueprint matrix exact; ybar5 computes to {} while the printed x3^3 term \
             -q^-1[3]_q x3^3 does not give a normal element under the printed relations",
            p.show(&s.ybar[4])
        ),
    )
}

fn lastex_fixture() -> Outcome {
    let pr = load("lastex");
    let f = &pr.fixtures;
    let mut failures = Vec::new();
    for ch in [0u64, 3, 7] {
        let p = if ch == 0 { pr.presentation.clone() } else { pr.presentation.with_characteristic(ch) };
        let s = CglStructure::new(p).unwrap();
        let ys: Vec<_> =
            f.y.as_ref().unwrap().iter().map(|y| if ch == 0 { y.clone() } else { y.with_characteristic(ch) }).collect();
        let seed = initial_seed(&s);
        let checks = [
            ("levels", Some(s.eta.levels()) == f.levels),
            ("y", s.eta.y == ys),
            ("r", Some(&seed.frame.matrix) == f.r.as_ref()),
            ("quiver", quiver_edges(&seed).ok() == f.quiver),
        ];
        failures.extend(checks.iter().filter(|c| !c.1).map(|c| format!("{} in characteristic {ch}", c.0)));
    }
    let pass = failures.is_empty();
    outcome(
        pass,
        if pass { "levels, six y's, r and quiver exact in characteristic 0, 3, 7".into() } else { failures.join(", ") },
    )
}

fn is_acyclic(n: usize, edges: &[(usize, usize)]) -> bool {
    let mut indeg = vec![0; n];
    for &(_, b) in edges {
        indeg[b] += 1;
    }
    let mut stack: Vec<usize> = (0..n).filter(|&v| indeg[v] == 0).collect();
    let mut seen = 0;
    while let Some(v) = stack.pop() {
        seen += 1;
        for &(a, b) in edges {
            if a == v {
                indeg[b] -= 1;
                if indeg[b] == 0 {
                    stack.push(b);
                }
            }
        }
    }
    seen == n
}

fn qweyl_fixture() -> Outcome {
    let mut failures = Vec::new();
    for n in [2, 3] {
        let pr = load(&format!("qweyl:{n}"));
        let s = CglStructure::new(pr.presentation.clone()).unwrap();
        let seed = initial_seed(&s);
        let edges = quiver_edges(&seed).unwrap();
        if Some(&seed.frame.matrix) != pr.fixtures.r.as_ref() {
            failures.push(format!("n = {n}: r pattern"));
        }
        if Some(&edges) != pr.fixtures.quiver.as_ref() || !is_acyclic(2 * n, &edges) {
            failures.push(format!("n = {n}: quiver"));
        }
    }
    let pass = failures.is_empty();
    outcome(pass, if pass { "r pattern and acyclic quiver for n = 2, 3".into() } else { failures.join(", ") })
}

/// Mutable indices whose exchange identity fails, with ε = ± required to agree.
fn exchange_failures<C: Coeff>(p: &CGLPresentation<C>, seed: &QuantumSeed<C>) -> Vec<usize> {
    let mut bad = Vec::new();
    for &k in seed.btilde.ex() {
        let mut vars = Vec::new();
        for eps in [1, -1] {
            match mutate_seed(seed, k, eps, Some(p)) {
                Ok(m) => {
                    let v = m.frame.variables[k].clone().unwrap();
                    let lhs = p.multiply(seed.frame.variables[k].as_ref().unwrap(), &v);
                    if lhs != exchange_rhs(p, seed, k, eps).unwrap() {
                        bad.push(k);
                    }
                    vars.push(v);
                }
                Err(SeedError::InexactExchange(_)) => bad.push(k),
                Err(e) => panic!("{e}"),
            }
        }
        if vars.len() == 2 && vars[0] != vars[1] {
            bad.push(k);
        }
    }
    bad.dedup();
    bad
}

fn lastex_field_normalized() -> (CGLPresentation<RatFunc>, QuantumSeed<RatFunc>) {
    let p = load("lastex").presentation.map_coeffs(|c| Some(RatFunc::from_scalar(c.clone()))).unwrap();
    let s = CglStructure::new(p).unwrap();
    let t = s.field_normalizing_rescale(Orientation::Literal).unwrap().expect("solvable over the fraction field");
    let ns = CglStructure::new(s.presentation.rescale(&t).unwrap()).unwrap();
    assert!(ns.cond_table().unwrap().iter().all(|r| r.literal_pass));
    let seed = ns.build_seed(&identity(6), &SeedOptions::default()).unwrap();
    (ns.presentation, seed)
}

fn exchange_suite() -> Outcome {
    let b2 = structure("b2-w1212");
    let b2_bad = exchange_failures(&b2.presentation, &initial_seed(&b2));
    let l = structure("lastex");
    let l_bad = exchange_failures(&l.presentation, &initial_seed(&l));
    let (np, nseed) = lastex_field_normalized();
    let normalized_bad = exchange_failures(&np, &nseed);

    assert!(b2_bad.is_empty());
    assert_eq!(l_bad, vec![0, 2, 3]);
    assert!(normalized_bad.is_empty());

    let pass = b2_bad.is_empty() && l_bad.is_empty();
    let one_based: Vec<usize> = l_bad.iter().map(|k| k + 1).collect();
    outcome(
        pass,
        format!(
            "B2 all pass; lastex fails at k = {one_based:?} (its leading coefficients at i = 1, 3, 4 \
             miss the normalization, and i = 4 needs the non-unit q(1-q)^2); after rescaling over the \
             fraction field every k passes with both signs agreeing"
        ),
    )
}

fn chain_suite() -> Outcome {
    let s = structure("b2-w1212");
    let steps = chain_steps(4, false);
    let mut mutation = 0;
    let mut relabel = 0;
    let mut failures = Vec::new();
    for (a, b) in &steps {
        match s.verify_mutation_chain(a, b, &SeedOptions::default()) {
            Ok(r) if r.passed => {
                if r.mutation {
                    mutation += 1;
                } else {
                    relabel += 1;
                }
            }
            Ok(r) => failures.push(format!("{a:?} -> {b:?}: {}", r.mismatch.unwrap_or_default())),
            Err(e) => failures.push(format!("{a:?} -> {b:?}: {e}")),
        }
    }
    let pass = failures.is_empty() && mutation > 0 && relabel > 0;
    outcome(
        pass,
        if failures.is_empty() {
            format!("{} steps along Gamma_4 paths: {mutation} mutation, {relabel} relabel", steps.len())
        } else {
            failures.join("; ")
        },
    )
}

fn laurent_misses(name: &str, bounds: LaurentBounds) -> (usize, Vec<(Vec<usize>, usize)>) {
    let s = structure(name);
    let n = s.n();
    let mut total = 0;
    let mut misses = Vec::new();
    for sigma in gamma_subset(n) {
        let seed = s.build_seed(&sigma, &SeedOptions::default()).unwrap();
        for j in 0..n {
            total += 1;
            if s.laurent_membership(&seed, &s.presentation.gen(j), bounds).unwrap().is_none() {
                misses.push((sigma.clone(), j));
            }
        }
    }
    (total, misses)
}

fn laurent_suite() -> Outcome {
    let (b2_total, b2_miss) = laurent_misses("b2-w1212", LaurentBounds::default());
    let (l_total, l_miss) = laurent_misses("lastex", LaurentBounds::default());
    let (_, wide_miss) = laurent_misses("lastex", LaurentBounds { cap: 3, upper: Some(6) });

    assert!(b2_miss.is_empty());
    assert_eq!(l_miss, vec![(identity(6), 5), (vec![1, 0, 2, 3, 4, 5], 5), (vec![3, 4, 5, 2, 1, 0], 0)]);
    assert!(wide_miss.is_empty());

    let pass = b2_miss.is_empty() && l_miss.is_empty();
    outcome(
        pass,
        format!(
            "B2 {b2_total}/{b2_total}; lastex {}/{l_total} with the default box (support + 3): \
             x6 at sigma = id and (2,1,3,4,5,6), x1 at sigma = (4,5,6,3,2,1) need numerator exponent 6; \
             all pass with bounds 3,6",
            l_total - l_miss.len()
        ),
    )
}

fn run_property<S: Strategy>(
    cases: u32,
    strategy: S,
    test: impl Fn(S::Value) -> Result<(), TestCaseError>,
) -> Result<(), String> {
    runner(cases).run(&strategy, test).map_err(|e| e.to_string())
}

fn property_suites() -> Outcome {
    let seeds = fixture_seeds();
    let algebras: Vec<CGLPresentation> = ALGEBRAS.iter().map(|n| preset(n).unwrap().presentation).collect();
    let mut results = vec![
        ("mutation involution", run_property(64, exchange_matrix(), |(b, d)| check_exchange_involution(&b, &d))),
        (
            "mutation walks",
            run_property(64, (0usize..3, proptest::collection::vec((0usize..8, any::<bool>()), 1..6)), |(w, steps)| {
                check_mutation_walk(&seeds[w].1, &steps)
            }),
        ),
        (
            "E skewness",
            run_property(
                64,
                (skew_matrix(5), proptest::collection::vec(-3i64..=3, 5), 0usize..5, any::<bool>()),
                |(m, mut col, k, plus)| {
                    col[k] = 0;
                    check_congruence_skew(&m, &col, k, if plus { 1 } else { -1 })
                },
            ),
        ),
        (
            "associativity",
            run_property(100, (0usize..4, element(6), element(6), element(6)), |(w, a, b, c)| {
                let p = &algebras[w];
                let n = p.n();
                let cut = |v: &[(Vec<u32>, i64, i64)]| -> Vec<(Vec<u32>, i64, i64)> {
                    v.iter().map(|(f, x, e)| (f[..n].to_vec(), *x, *e)).collect()
                };
                check_associative(p, &realize(n, &cut(&a)), &realize(n, &cut(&b)), &realize(n, &cut(&c)))
            }),
        ),
        (
            "leading-term law",
            run_property(100, (0usize..4, proptest::collection::vec(0u32..=2, 6)), |(w, f)| {
                let p = &algebras[w];
                check_leading_term(p, &f[..p.n()])
            }),
        ),
    ];
    let qc: Vec<String> = FIXTURES.iter().flat_map(|n| y_quasi_commutation_mismatches(n)).collect();
    results.push(("y quasi-commutation", if qc.is_empty() { Ok(()) } else { Err(qc.join(", ")) }));
    let ls: Vec<String> = FIXTURES.iter().flat_map(|n| lambda_star_mismatches(n)).collect();
    results.push(("lambda* chain", if ls.is_empty() { Ok(()) } else { Err(ls.join(", ")) }));

    let failed: Vec<String> =
        results.iter().filter_map(|(n, r)| r.as_ref().err().map(|e| format!("{n}: {e}"))).collect();
    let pass = failed.is_empty();
    outcome(
        pass,
        if pass {
            format!(
                "{} suites, seed {SEED:#x}: {}",
                results.len(),
                results.iter().map(|r| r.0).collect::<Vec<_>>().join(", ")
            )
        } else {
            failed.join("; ")
        },
    )
}

fn integral_forms() -> Outcome {
    let mut failures = Vec::new();
    for name in FIXTURES {
        let pr = load(name);
        let s = CglStructure::new(pr.presentation.clone()).unwrap();
        let mut extra = s.eta.y.clone();
        extra.extend(s.ybar.iter().cloned());
        extra.extend(pr.fixtures.y.clone().unwrap_or_default());
        extra.extend(pr.fixtures.ybar.clone().unwrap_or_default());
        let r = s.presentation.d_form_check(&extra, DRing::HalfPowers);
        if !r.passed() {
            failures.push(format!("{name}: {}", r.violations.join("; ")));
        }
    }

    let a = a1q();
    let laurent_fails = matches!(eta_and_primes(&a), Err(PrimesError::InexactDivision(1)));
    let ar = a.map_coeffs(|c| Some(RatFunc::from_scalar(c.clone()))).unwrap();
    let e = eta_and_primes(&ar).unwrap();
    let field_fails = !ar.d_form_check(&e.y, DRing::IntegerPowers).passed();
    let (t, ip) = integralize(&ar).unwrap();
    let ie = eta_and_primes(&ip).unwrap();
    let integral_passes = ip.d_form_check(&ie.y, DRing::IntegerPowers).passed();
    let t_ok = t == vec![LaurentScalar::one(), &LaurentScalar::q() - &LaurentScalar::one()];
    if !(laurent_fails && field_fails) {
        failures.push("A1^q unexpectedly integral before rescaling".into());
    }
    if !(integral_passes && t_ok) {
        failures.push("A1^q not integral after integralize".into());
    }
    let pass = failures.is_empty();
    outcome(
        pass,
        if pass {
            format!(
                "all fixtures with their y/ybar lists over Z[q^(1/2)]; A1^q fails over Z[q] at y2 and passes after \
                 integralize with t = (1, q - 1), y2 = {}",
                ip.show(&ie.y[1])
            )
        } else {
            failures.join("; ")
        },
    )
}

/// Criteria expected to pass, in order. The misses are analysed in the detail lines.
type Criterion = (&'static str, fn() -> Outcome);

const EXPECTED: [bool; 9] = [false, false, true, true, false, true, false, true, true];

#[test]
fn acceptance() {
    let criteria: [Criterion; 9] = [
        ("B2 fixture", b2_fixture),
        ("A2(2) fixture", a2_twisted_fixture),
        ("six-generator fixture", lastex_fixture),
        ("quantized Weyl fixture", qweyl_fixture),
        ("exchange identities", exchange_suite),
        ("mutation chains", chain_suite),
        ("Laurent membership", laurent_suite),
        ("property suites", property_suites),
        ("integral forms", integral_forms),
    ];
    let mut results = Vec::new();
    for (i, (name, run)) in criteria.iter().enumerate() {
        let o = run();
        // Straight to the handle so the lines survive libtest output capture.
        let line = format!("criterion {}: {} [{name}] {}\n", i + 1, if o.pass { "PASS" } else { "FAIL" }, o.detail);
        std::io::stderr().write_all(line.as_bytes()).unwrap();
        results.push(o.pass);
    }
    assert_eq!(results, EXPECTED);
}
