//! Strategies and checks shared by the property suite and the acceptance run.

use std::collections::BTreeMap;

use proptest::prelude::*;
use proptest::test_runner::{Config, RngSeed, TestCaseError, TestRunner};

use qnilp::kacmoody::preset;
use qnilp::ore::s_lambda_exp2;
use qnilp::primes::{quasi_commutation_scalar, CglStructure};
use qnilp::qtorus::SkewExponentMatrix;
use qnilp::seed::{e_matrix, mutate_exchange, mutate_seed, validate_seed, ExchangeMatrix};
use qnilp::{CGLPresentation, LaurentScalar, PBWElement, QuantumSeed};

pub const SEED: u64 = 0x5eed_2024;

pub fn config(cases: u32) -> Config {
    Config { cases, rng_seed: RngSeed::Fixed(SEED), failure_persistence: None, ..Config::default() }
}

pub fn runner(cases: u32) -> TestRunner {
    TestRunner::new(config(cases))
}

/// A skew-symmetrizable exchange matrix together with its symmetrizers.
pub fn exchange_matrix() -> impl Strategy<Value = (ExchangeMatrix, BTreeMap<usize, i64>)> {
    (2usize..=4, 0usize..=2)
        .prop_flat_map(|(m, f)| {
            (
                Just(m),
                Just(f),
                proptest::collection::vec(1i64..=3, m),
                proptest::collection::vec(-2i64..=2, m * m),
                proptest::collection::vec(-2i64..=2, f * m),
            )
        })
        .prop_map(|(m, f, d, s, frozen)| {
            let mut rows = vec![vec![0i64; m]; m + f];
            for i in 0..m {
                for j in i + 1..m {
                    let v = s[i * m + j];
                    rows[i][j] = v * d[j];
                    rows[j][i] = -v * d[i];
                }
            }
            for r in 0..f {
                rows[m + r] = frozen[r * m..(r + 1) * m].to_vec();
            }
            let b = ExchangeMatrix::new(m + f, (0..m).collect(), rows).unwrap();
            (b, (0..m).zip(d).collect())
        })
}

pub fn check_exchange_involution(b: &ExchangeMatrix, d: &BTreeMap<usize, i64>) -> Result<(), TestCaseError> {
    prop_assert_eq!(b.symmetrizer_violation(d), None);
    for &k in b.ex() {
        let once = mutate_exchange(b, k).map_err(|e| TestCaseError::fail(e.to_string()))?;
        prop_assert_eq!(once.symmetrizer_violation(d), None);
        prop_assert_eq!(&mutate_exchange(&once, k).unwrap(), b);
    }
    Ok(())
}

pub fn skew_matrix(n: usize) -> impl Strategy<Value = SkewExponentMatrix> {
    proptest::collection::vec(-4i64..=4, n * n)
        .prop_map(move |v| SkewExponentMatrix::from_lower(n, |k, j| v[k * n + j]))
}

/// `E_εᵀ·M·E_ε` stays skew for any skew `M`, column and sign.
pub fn check_congruence_skew(m: &SkewExponentMatrix, col: &[i64], k: usize, eps: i64) -> Result<(), TestCaseError> {
    let n = m.n();
    let b = ExchangeMatrix::from_columns(n, vec![(k, col.to_vec())]).unwrap();
    let e = e_matrix(&b, k, eps).unwrap();
    let c = m.congruence(&e);
    prop_assert!(SkewExponentMatrix::new(c.rows().to_vec()).is_ok());
    Ok(())
}

/// Fixture seeds whose matrix mutations are exercised without an algebra.
pub fn fixture_seeds() -> Vec<(&'static str, QuantumSeed)> {
    ["b2-w1212", "lastex", "qweyl:3"]
        .into_iter()
        .map(|name| {
            let s = CglStructure::new(preset(name).unwrap().presentation).unwrap();
            let mut seed = s.build_seed(&(0..s.n()).collect::<Vec<_>>(), &Default::default()).unwrap();
            seed.frame.variables.iter_mut().for_each(|v| *v = None);
            (name, seed)
        })
        .collect()
}

/// Random mutation walks keep seeds compatible, and each step undoes itself.
pub fn check_mutation_walk(seed: &QuantumSeed, steps: &[(usize, bool)]) -> Result<(), TestCaseError> {
    let ex = seed.btilde.ex().to_vec();
    let mut cur = seed.clone();
    for &(pick, plus) in steps {
        let k = ex[pick % ex.len()];
        let eps = if plus { 1 } else { -1 };
        let next = mutate_seed(&cur, k, eps, None).map_err(|e| TestCaseError::fail(e.to_string()))?;
        let r = validate_seed(&next);
        prop_assert!(r.passed, "{}", r.message);
        prop_assert!(SkewExponentMatrix::new(next.frame.matrix.rows().to_vec()).is_ok());
        let back = mutate_seed(&next, k, -eps, None).unwrap();
        prop_assert_eq!(&back.frame.matrix, &cur.frame.matrix);
        prop_assert_eq!(&back.btilde, &cur.btilde);
        cur = next;
    }
    Ok(())
}

pub const ALGEBRAS: [&str; 4] = ["b2-w1212", "lastex", "qweyl:2", "a2tw-01010"];

/// A small element: up to three terms with 0/1 exponents and unit-ish coefficients.
pub fn element(n: usize) -> impl Strategy<Value = Vec<(Vec<u32>, i64, i64)>> {
    proptest::collection::vec((proptest::collection::vec(0u32..=1, n), -2i64..=2, -2i64..=2), 1..=3)
}

pub fn realize(n: usize, spec: &[(Vec<u32>, i64, i64)]) -> PBWElement {
    PBWElement::from_terms(
        n,
        spec.iter().map(|(f, c, e)| (f.clone(), &LaurentScalar::from(*c) * &LaurentScalar::q_pow2(*e))),
    )
}

pub fn check_associative(
    p: &CGLPresentation,
    a: &PBWElement,
    b: &PBWElement,
    c: &PBWElement,
) -> Result<(), TestCaseError> {
    let left = p.multiply(&p.multiply(a, b), c);
    let right = p.multiply(a, &p.multiply(b, c));
    prop_assert_eq!(left, right);
    Ok(())
}

/// `x_N^{f_N}⋯x_1^{f_1}` has leading term `𝒮_λ(f)·x^f`.
pub fn check_leading_term(p: &CGLPresentation, f: &[u32]) -> Result<(), TestCaseError> {
    let n = p.n();
    let mut prod = p.one();
    for k in (0..n).rev() {
        prod = p.multiply(&prod, &p.pow(&p.gen(k), f[k]));
    }
    let (c, g) = prod.leading_term().map_err(|e| TestCaseError::fail(e.to_string()))?;
    let fi: Vec<i64> = f.iter().map(|&v| v as i64).collect();
    prop_assert_eq!(g, f.to_vec());
    prop_assert_eq!(c, LaurentScalar::q_pow2(s_lambda_exp2(p, &fi)));
    Ok(())
}

pub const FIXTURES: [&str; 5] = ["b2-w1212", "a2tw-01010", "lastex", "qweyl:2", "qweyl:3"];

/// `y_k x_j = q^m x_j y_k` for `j ≤ k`, with `m` summed from λ along the chain of `k`.
pub fn y_quasi_commutation_mismatches(name: &str) -> Vec<String> {
    let s = CglStructure::new(preset(name).unwrap().presentation).unwrap();
    let p = &s.presentation;
    let mut bad = Vec::new();
    for k in 0..s.n() {
        let chain = s.eta.chain_vector(k);
        for j in 0..=k {
            let m: i64 = (0..s.n()).map(|i| chain[i] * p.lambda_exp2(i, j)).sum();
            let got = quasi_commutation_scalar(p, &s.eta.y[k], &p.gen(j));
            if got != Some(LaurentScalar::q_pow2(m)) {
                bad.push(format!("{name}: y{} x{}", k + 1, j + 1));
            }
        }
    }
    bad
}

/// `λ*_l = λ_{s(l)}^{-1}` and `λ*_l = λ*_{s(l)}` wherever `s(l)` exists.
pub fn lambda_star_mismatches(name: &str) -> Vec<String> {
    let s = CglStructure::new(preset(name).unwrap().presentation).unwrap();
    let star = s.lambda_star_exp2().unwrap();
    let mut bad = Vec::new();
    for l in 0..s.n() {
        let Some(t) = s.eta.succ[l] else { continue };
        let expect = -s.presentation.lambda_k_exp2(t);
        if star[l] != Some(expect) {
            bad.push(format!("{name}: lambda*_{} = {:?}, expected {expect}", l + 1, star[l]));
        }
        if star[t].is_some() && star[l] != star[t] {
            bad.push(format!("{name}: lambda*_{} differs from lambda*_{}", l + 1, t + 1));
        }
    }
    bad
}
