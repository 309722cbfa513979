#![allow(dead_code)]

pub mod props;

use qnilp::kacmoody::{preset, Preset};
use qnilp::parse::parse_element;
use qnilp::primes::{CglStructure, SeedOptions};
use qnilp::{CGLPresentation, LaurentScalar, PBWElement, QuantumSeed};

pub fn load(name: &str) -> Preset {
    preset(name).unwrap_or_else(|e| panic!("preset {name}: {e}"))
}

pub fn structure(name: &str) -> CglStructure {
    CglStructure::new(load(name).presentation).unwrap()
}

pub fn el(p: &CGLPresentation, text: &str) -> PBWElement {
    parse_element(p, text).unwrap_or_else(|e| panic!("{text}: {e}"))
}

pub fn q(twice: i64) -> LaurentScalar {
    LaurentScalar::q_pow2(twice)
}

pub fn unit(n: usize, i: usize) -> Vec<i64> {
    let mut v = vec![0; n];
    v[i] = 1;
    v
}

pub fn identity(n: usize) -> Vec<usize> {
    (0..n).collect()
}

pub fn initial_seed(s: &CglStructure) -> QuantumSeed {
    s.build_seed(&identity(s.n()), &SeedOptions::default()).unwrap()
}
