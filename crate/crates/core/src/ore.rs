//! Iterated skew polynomial (CGL) presentations as rewriting systems on
//! ordered PBW monomials `x_1^{m_1} ⋯ x_N^{m_N}`.
//!
//! A product is normalized by repeatedly moving the rightmost out-of-order
//! generator left with `x_k x_j → λ_{kj} x_j x_k + δ_k(x_j)`. Each δ-image only
//! involves generators strictly between `j` and `k`, so the rewriting terminates.

use std::cmp::Ordering;
use std::collections::{BTreeMap, HashMap};
use std::fmt;
use std::sync::Mutex;

use serde::de::Error as _;
use serde::{Deserialize, Deserializer, Serialize, Serializer};
use thiserror::Error;

use crate::qtorus::SkewExponentMatrix;
use crate::scalars::{Coeff, LaurentScalar};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum OreError {
    #[error("zero element has no leading term")]
    ZeroElement,
    #[error("element is not supported on generators below x{}", .k + 1)]
    SupportViolation { k: usize },
    #[error("presentation is malformed: {0}")]
    Malformed(String),
    #[error("rescaling factor {} is zero", .0 + 1)]
    ZeroScale(usize),
    #[error("rescaled coefficient is not in the coefficient ring")]
    InexactRescale,
    #[error("permutation is not in Xi_N")]
    NotInXi,
    #[error("presentation is not symmetric: {0}")]
    NotSymmetric(String),
    #[error("bad interval bounds [{}, {}]", .0 + 1, .1 + 1)]
    BadBounds(usize, usize),
    #[error("reordered monomial has a non-invertible leading coefficient")]
    NonUnitReorder,
}

/// Exponent vector, ordered reverse-lexicographically (highest index decides first).
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Mono(pub Vec<u32>);

impl Ord for Mono {
    fn cmp(&self, other: &Self) -> Ordering {
        self.0.len().cmp(&other.0.len()).then_with(|| self.0.iter().rev().cmp(other.0.iter().rev()))
    }
}

impl PartialOrd for Mono {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// An element in PBW normal form.
#[derive(Clone, Debug)]
pub struct PBWElement<C: Coeff = LaurentScalar> {
    n: usize,
    terms: BTreeMap<Mono, C>,
}

impl<C: Coeff> PartialEq for PBWElement<C> {
    fn eq(&self, o: &Self) -> bool {
        self.terms.len() == o.terms.len() && self.terms.iter().zip(&o.terms).all(|((f, a), (g, b))| f == g && a == b)
    }
}

impl<C: Coeff> PBWElement<C> {
    pub fn zero(n: usize) -> Self {
        PBWElement { n, terms: BTreeMap::new() }
    }

    pub fn constant(n: usize, c: C) -> Self {
        Self::monomial(n, vec![0; n], c)
    }

    pub fn one(n: usize) -> Self {
        Self::constant(n, C::one())
    }

    pub fn monomial(n: usize, f: Vec<u32>, c: C) -> Self {
        assert_eq!(f.len(), n, "monomial length");
        let mut terms = BTreeMap::new();
        if !c.is_zero() {
            terms.insert(Mono(f), c);
        }
        PBWElement { n, terms }
    }

    pub fn generator(n: usize, i: usize) -> Self {
        let mut f = vec![0; n];
        f[i] = 1;
        Self::monomial(n, f, C::one())
    }

    pub fn from_terms<I: IntoIterator<Item = (Vec<u32>, C)>>(n: usize, terms: I) -> Self {
        let mut out = Self::zero(n);
        for (f, c) in terms {
            out.add_term(f, &c);
        }
        out
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    /// Terms in ascending monomial order.
    pub fn terms(&self) -> impl DoubleEndedIterator<Item = (&[u32], &C)> {
        self.terms.iter().map(|(f, c)| (f.0.as_slice(), c))
    }

    pub fn coeff(&self, f: &[u32]) -> Option<&C> {
        self.terms.get(&Mono(f.to_vec()))
    }

    fn add_term(&mut self, f: Vec<u32>, c: &C) {
        if c.is_zero() {
            return;
        }
        let key = Mono(f);
        match self.terms.get_mut(&key) {
            Some(v) => {
                *v = v.add(c);
                if v.is_zero() {
                    self.terms.remove(&key);
                }
            }
            None => {
                self.terms.insert(key, c.clone());
            }
        }
    }

    pub fn add_scaled(&mut self, other: &Self, c: &C) {
        if self.n == 0 {
            self.n = other.n;
        }
        for (f, v) in &other.terms {
            self.add_term(f.0.clone(), &v.mul(c));
        }
    }

    pub fn add(&self, o: &Self) -> Self {
        let mut out = self.clone();
        out.add_scaled(o, &C::one());
        out
    }

    pub fn sub(&self, o: &Self) -> Self {
        let mut out = self.clone();
        out.add_scaled(o, &C::one().neg());
        out
    }

    pub fn neg(&self) -> Self {
        self.scale(&C::one().neg())
    }

    pub fn scale(&self, c: &C) -> Self {
        let mut out = Self::zero(self.n);
        if c.is_zero() {
            return out;
        }
        for (f, v) in &self.terms {
            out.add_term(f.0.clone(), &v.mul(c));
        }
        out
    }

    pub fn mul_q(&self, twice: i64) -> Self {
        if twice == 0 {
            return self.clone();
        }
        PBWElement { n: self.n, terms: self.terms.iter().map(|(f, c)| (f.clone(), c.mul_q(twice))).collect() }
    }

    /// The ≺-largest term as (coefficient, exponent).
    pub fn leading_term(&self) -> Result<(C, Vec<u32>), OreError> {
        self.terms.iter().next_back().map(|(f, c)| (c.clone(), f.0.clone())).ok_or(OreError::ZeroElement)
    }

    /// The grading when every monomial has the same degree.
    pub fn degree(&self, degrees: &[Vec<i64>]) -> Option<Vec<i64>> {
        let r = degrees.first().map_or(0, Vec::len);
        let mut out: Option<Vec<i64>> = None;
        for f in self.terms.keys() {
            let d = mono_degree(&f.0, degrees, r);
            match &out {
                None => out = Some(d),
                Some(prev) if *prev != d => return None,
                _ => {}
            }
        }
        out.or_else(|| Some(vec![0; r]))
    }

    /// Largest index appearing in any monomial.
    pub fn max_index(&self) -> Option<usize> {
        self.terms.keys().filter_map(|f| f.0.iter().rposition(|&m| m > 0)).max()
    }

    pub fn min_index(&self) -> Option<usize> {
        self.terms.keys().filter_map(|f| f.0.iter().position(|&m| m > 0)).min()
    }

    pub fn map_coeffs<D: Coeff>(&self, mut g: impl FnMut(&C) -> Option<D>) -> Option<PBWElement<D>> {
        let mut out = PBWElement::zero(self.n);
        for (f, c) in &self.terms {
            out.add_term(f.0.clone(), &g(c)?);
        }
        Some(out)
    }

    /// Re-embed into `n` generators, moving index `i` to `i + offset`.
    pub fn embed(&self, n: usize, offset: usize) -> Self {
        let mut out = Self::zero(n);
        for (f, c) in &self.terms {
            let mut g = vec![0; n];
            g[offset..offset + f.0.len()].copy_from_slice(&f.0);
            out.add_term(g, c);
        }
        out
    }

    /// Restrict to indices `lo..=hi`; `None` if some monomial leaves that range.
    pub fn restrict(&self, lo: usize, hi: usize) -> Option<Self> {
        let mut out = Self::zero(hi + 1 - lo);
        for (f, c) in &self.terms {
            if f.0.iter().enumerate().any(|(i, &m)| m > 0 && (i < lo || i > hi)) {
                return None;
            }
            out.add_term(f.0[lo..=hi].to_vec(), c);
        }
        Some(out)
    }

    pub fn with_characteristic(&self, p: u64) -> Self {
        self.map_coeffs(|c| Some(c.with_characteristic(p))).unwrap()
    }

    pub fn display_with(&self, labels: &[String]) -> String {
        if self.terms.is_empty() {
            return "0".into();
        }
        let mut s = String::new();
        for (i, (f, c)) in self.terms.iter().rev().enumerate() {
            let mono: Vec<String> =
                f.0.iter()
                    .enumerate()
                    .filter(|(_, &m)| m > 0)
                    .map(|(k, &m)| {
                        let l = labels.get(k).cloned().unwrap_or_else(|| format!("x{}", k + 1));
                        if m == 1 {
                            l
                        } else {
                            format!("{l}^{m}")
                        }
                    })
                    .collect();
            let cs = c.to_string();
            let (neg, body) = match cs.strip_prefix('-') {
                Some(rest) if !rest.contains(['+', '-']) => (true, rest.to_string()),
                _ => (false, cs.clone()),
            };
            let multi = body.contains(" + ") || body.contains(" - ") || body.contains('/');
            let coef = if multi { format!("({body})") } else { body };
            let term = match (mono.is_empty(), coef.as_str()) {
                (true, _) => coef.clone(),
                (false, "1") => mono.join("*"),
                (false, _) => format!("{coef}*{}", mono.join("*")),
            };
            if i == 0 {
                if neg {
                    s.push('-');
                }
            } else {
                s.push_str(if neg { " - " } else { " + " });
            }
            s.push_str(&term);
        }
        s
    }
}

fn mono_degree(f: &[u32], degrees: &[Vec<i64>], r: usize) -> Vec<i64> {
    let mut d = vec![0; r];
    for (i, &m) in f.iter().enumerate() {
        for (t, v) in d.iter_mut().enumerate() {
            *v += m as i64 * degrees[i][t];
        }
    }
    d
}

impl<C: Coeff> fmt::Display for PBWElement<C> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.display_with(&[]))
    }
}

#[derive(Serialize, Deserialize)]
#[serde(bound = "")]
struct TermDump<C: Coeff> {
    f: Vec<u32>,
    c: C,
}

impl<C: Coeff> Serialize for PBWElement<C> {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        let v: Vec<TermDump<C>> = self.terms.iter().map(|(f, c)| TermDump { f: f.0.clone(), c: c.clone() }).collect();
        v.serialize(s)
    }
}

impl<'de, C: Coeff> Deserialize<'de> for PBWElement<C> {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let v: Vec<TermDump<C>> = Vec::deserialize(d)?;
        let n = v.first().map_or(0, |t| t.f.len());
        if v.iter().any(|t| t.f.len() != n) {
            return Err(D::Error::custom("monomials of different lengths"));
        }
        Ok(PBWElement::from_terms(n, v.into_iter().map(|t| (t.f, t.c))))
    }
}

type Cache<C> = Mutex<HashMap<(Vec<u32>, usize), PBWElement<C>>>;

/// A CGL presentation: λ-matrix, h-eigenvalues λ_k, δ-images and a grading.
///
/// Indices are 0-based. `delta[(k, j)]` is `δ_k(x_j)` for `j < k`; missing
/// entries are zero. Products are memoized per presentation.
pub struct CGLPresentation<C: Coeff = LaurentScalar> {
    n: usize,
    lambda: SkewExponentMatrix,
    lambda_k_exp2: Vec<i64>,
    delta: BTreeMap<(usize, usize), PBWElement<C>>,
    degrees: Vec<Vec<i64>>,
    labels: Vec<String>,
    characteristic: u64,
    cache: Cache<C>,
}

impl<C: Coeff> Clone for CGLPresentation<C> {
    fn clone(&self) -> Self {
        CGLPresentation {
            n: self.n,
            lambda: self.lambda.clone(),
            lambda_k_exp2: self.lambda_k_exp2.clone(),
            delta: self.delta.clone(),
            degrees: self.degrees.clone(),
            labels: self.labels.clone(),
            characteristic: self.characteristic,
            cache: Mutex::new(HashMap::new()),
        }
    }
}

impl<C: Coeff> fmt::Debug for CGLPresentation<C> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("CGLPresentation")
            .field("n", &self.n)
            .field("lambda", &self.lambda)
            .field("lambda_k_exp2", &self.lambda_k_exp2)
            .field("delta", &self.delta)
            .field("degrees", &self.degrees)
            .finish()
    }
}

impl<C: Coeff> PartialEq for CGLPresentation<C> {
    fn eq(&self, o: &Self) -> bool {
        self.n == o.n
            && self.lambda == o.lambda
            && self.lambda_k_exp2 == o.lambda_k_exp2
            && self.delta == o.delta
            && self.degrees == o.degrees
    }
}

/// Which coefficient subring a 𝔻-form check targets.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum DRing {
    /// ℤ[q^{±1/2}] or 𝔽_p[q^{±1/2}]
    HalfPowers,
    /// ℤ[q^{±1}] or 𝔽_p[q^{±1}]
    IntegerPowers,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize)]
pub struct CglReport {
    pub violations: Vec<String>,
    /// λ_k exponents (doubled) read off from nonzero δ_k.
    pub inferred_lambda_k: Vec<Option<i64>>,
    pub symmetric: bool,
    pub condition_a: bool,
}

impl CglReport {
    pub fn passed(&self) -> bool {
        self.violations.is_empty()
    }
}

#[derive(Clone, Debug, Default, PartialEq, Serialize)]
pub struct DFormReport {
    pub violations: Vec<String>,
}

impl DFormReport {
    pub fn passed(&self) -> bool {
        self.violations.is_empty()
    }
}

/// `x_j..x_k` of a parent presentation, re-based to start at index 0.
#[derive(Clone, Debug)]
pub struct IntervalView<C: Coeff = LaurentScalar> {
    pub lo: usize,
    pub hi: usize,
    pub parent_n: usize,
    pub presentation: CGLPresentation<C>,
}

impl<C: Coeff> IntervalView<C> {
    pub fn lift(&self, e: &PBWElement<C>) -> PBWElement<C> {
        e.embed(self.parent_n, self.lo)
    }

    pub fn restrict(&self, e: &PBWElement<C>) -> Option<PBWElement<C>> {
        e.restrict(self.lo, self.hi)
    }
}

impl<C: Coeff> CGLPresentation<C> {
    pub fn new(
        lambda: SkewExponentMatrix,
        lambda_k_exp2: Vec<i64>,
        delta: BTreeMap<(usize, usize), PBWElement<C>>,
        degrees: Vec<Vec<i64>>,
    ) -> Result<Self, OreError> {
        let n = lambda.n();
        if lambda_k_exp2.len() != n || degrees.len() != n {
            return Err(OreError::Malformed("lambda_k and degrees need one entry per generator".into()));
        }
        let r = degrees.first().map_or(0, Vec::len);
        if degrees.iter().any(|d| d.len() != r) {
            return Err(OreError::Malformed("degree vectors of different lengths".into()));
        }
        let mut clean = BTreeMap::new();
        for ((k, j), d) in delta {
            if j >= k || k >= n {
                return Err(OreError::Malformed(format!("delta key ({}, {}) needs j < k <= N", k + 1, j + 1)));
            }
            if d.is_zero() {
                continue;
            }
            if d.n() != n {
                return Err(OreError::Malformed(format!("delta ({}, {}) has wrong monomial length", k + 1, j + 1)));
            }
            if d.max_index().is_some_and(|m| m >= k) {
                return Err(OreError::SupportViolation { k });
            }
            clean.insert((k, j), d);
        }
        let characteristic = clean.values().flat_map(|d| d.terms().map(|(_, c)| c.characteristic())).max().unwrap_or(0);
        Ok(CGLPresentation {
            n,
            lambda,
            lambda_k_exp2,
            delta: clean,
            degrees,
            labels: (1..=n).map(|i| format!("x{i}")).collect(),
            characteristic,
            cache: Mutex::new(HashMap::new()),
        })
    }

    pub fn with_labels(mut self, labels: Vec<String>) -> Self {
        assert_eq!(labels.len(), self.n);
        self.labels = labels;
        self
    }

    /// Reduce every coefficient into characteristic `p`.
    pub fn with_characteristic(&self, p: u64) -> Self {
        let mut out = self.clone();
        out.characteristic = p;
        out.delta =
            self.delta.iter().map(|(k, d)| (*k, d.with_characteristic(p))).filter(|(_, d)| !d.is_zero()).collect();
        out
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn lambda(&self) -> &SkewExponentMatrix {
        &self.lambda
    }

    /// Doubled exponent of λ_{kj}.
    pub fn lambda_exp2(&self, k: usize, j: usize) -> i64 {
        self.lambda.get(k, j)
    }

    pub fn lambda_k_exp2(&self, k: usize) -> i64 {
        self.lambda_k_exp2[k]
    }

    pub fn lambda_k_all(&self) -> &[i64] {
        &self.lambda_k_exp2
    }

    pub fn delta(&self, k: usize, j: usize) -> Option<&PBWElement<C>> {
        self.delta.get(&(k, j))
    }

    pub fn deltas(&self) -> &BTreeMap<(usize, usize), PBWElement<C>> {
        &self.delta
    }

    pub fn has_delta(&self, k: usize) -> bool {
        self.delta.keys().any(|&(kk, _)| kk == k)
    }

    pub fn degrees(&self) -> &[Vec<i64>] {
        &self.degrees
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn characteristic(&self) -> u64 {
        self.characteristic
    }

    pub fn one(&self) -> PBWElement<C> {
        PBWElement::constant(self.n, C::one().with_characteristic(self.characteristic))
    }

    pub fn gen(&self, i: usize) -> PBWElement<C> {
        PBWElement::generator(self.n, i)
    }

    pub fn scalar(&self, c: C) -> PBWElement<C> {
        PBWElement::constant(self.n, c)
    }

    pub fn show(&self, e: &PBWElement<C>) -> String {
        e.display_with(&self.labels)
    }

    /// Normal form of `a · b`.
    pub fn multiply(&self, a: &PBWElement<C>, b: &PBWElement<C>) -> PBWElement<C> {
        let mut out = PBWElement::zero(self.n);
        for (h, cb) in &b.terms {
            for (f, ca) in &a.terms {
                let prod = self.mono_mul(&f.0, &h.0);
                out.add_scaled(&prod, &ca.mul(cb));
            }
        }
        out
    }

    pub fn product(&self, factors: &[&PBWElement<C>]) -> PBWElement<C> {
        factors.iter().fold(self.one(), |acc, f| self.multiply(&acc, f))
    }

    pub fn pow(&self, a: &PBWElement<C>, m: u32) -> PBWElement<C> {
        (0..m).fold(self.one(), |acc, _| self.multiply(&acc, a))
    }

    /// `x^f · x^h`.
    pub fn mono_mul(&self, f: &[u32], h: &[u32]) -> PBWElement<C> {
        let mut cur = PBWElement::monomial(self.n, f.to_vec(), C::one());
        for (i, &m) in h.iter().enumerate() {
            for _ in 0..m {
                cur = self.times_gen(&cur, i);
            }
        }
        cur
    }

    fn times_gen(&self, e: &PBWElement<C>, m: usize) -> PBWElement<C> {
        let mut out = PBWElement::zero(self.n);
        for (f, c) in &e.terms {
            let p = self.mono_times_gen(&f.0, m);
            out.add_scaled(&p, c);
        }
        out
    }

    /// `x^f · x_m` in normal form.
    fn mono_times_gen(&self, f: &[u32], m: usize) -> PBWElement<C> {
        let top = f.iter().rposition(|&v| v > 0);
        match top {
            Some(k) if k > m => {}
            _ => {
                let mut g = f.to_vec();
                g[m] += 1;
                return PBWElement::monomial(self.n, g, C::one());
            }
        }
        let key = (f.to_vec(), m);
        if let Some(hit) = self.cache.lock().unwrap().get(&key) {
            return hit.clone();
        }
        let k = top.unwrap();
        let mut fp = f.to_vec();
        fp[k] -= 1;
        // x^{f'} x_k x_m = λ_{km} (x^{f'} x_m) x_k + x^{f'} δ_k(x_m)
        let left = self.mono_times_gen(&fp, m);
        let mut res = self.times_gen(&left, k).mul_q(self.lambda.get(k, m));
        if let Some(d) = self.delta.get(&(k, m)) {
            for (h, c) in &d.terms {
                let p = self.mono_mul(&fp, &h.0);
                res.add_scaled(&p, c);
            }
        }
        self.cache.lock().unwrap().insert(key, res.clone());
        res
    }

    /// Doubled exponent of the θ_k-eigenvalue of `x^f`.
    pub fn theta_exp2(&self, k: usize, f: &[u32]) -> i64 {
        f.iter().enumerate().map(|(i, &m)| m as i64 * self.lambda.get(k, i)).sum()
    }

    /// `δ_k(r) = x_k r − θ_k(r) x_k`, computed monomial by monomial.
    pub fn skew_delta(&self, k: usize, r: &PBWElement<C>) -> Result<PBWElement<C>, OreError> {
        if r.max_index().is_some_and(|m| m >= k) {
            return Err(OreError::SupportViolation { k });
        }
        let mut out = PBWElement::zero(self.n);
        let mut ek = vec![0u32; self.n];
        ek[k] = 1;
        for (f, c) in &r.terms {
            let left = self.mono_mul(&ek, &f.0);
            out.add_scaled(&left, c);
            let mut g = f.0.clone();
            g[k] += 1;
            out.add_term(g, &c.mul_q(self.theta_exp2(k, &f.0)).neg());
        }
        Ok(out)
    }

    /// Doubled exponent of λ_k implied by monomial `f` in `δ_k(x_j)`.
    pub fn implied_lambda_k(&self, k: usize, j: usize, f: &[u32]) -> i64 {
        -self.lambda.get(k, j) + self.theta_exp2(k, f)
    }

    pub fn validate_cgl(&self) -> CglReport {
        let mut rep = CglReport {
            symmetric: true,
            condition_a: self.lambda.rows().iter().flatten().all(|v| v % 2 == 0),
            inferred_lambda_k: vec![None; self.n],
            ..Default::default()
        };
        for (k, &l) in self.lambda_k_exp2.iter().enumerate() {
            if l == 0 {
                rep.violations.push(format!("lambda_{} is a root of unity", k + 1));
            }
        }
        let r = self.degrees.first().map_or(0, Vec::len);
        for (&(k, j), d) in &self.delta {
            let target: Vec<i64> = (0..r).map(|t| self.degrees[k][t] + self.degrees[j][t]).collect();
            for (f, _) in d.terms() {
                if mono_degree(f, &self.degrees, r) != target {
                    rep.violations.push(format!("delta_{}(x{}) is not homogeneous", k + 1, j + 1));
                    break;
                }
            }
            if d.min_index().is_some_and(|i| i <= j) {
                rep.symmetric = false;
            }
            for (f, _) in d.terms() {
                let implied = self.implied_lambda_k(k, j, f);
                match rep.inferred_lambda_k[k] {
                    None => rep.inferred_lambda_k[k] = Some(implied),
                    Some(prev) if prev != implied => {
                        rep.violations.push(format!(
                            "delta_{} is not a skew derivation: inconsistent lambda_{}",
                            k + 1,
                            k + 1
                        ));
                    }
                    _ => {}
                }
            }
        }
        for (k, inf) in rep.inferred_lambda_k.iter().enumerate() {
            if let Some(v) = inf {
                if *v != self.lambda_k_exp2[k] {
                    rep.violations.push(format!(
                        "lambda_{} supplied as q^({}/2) but relations force q^({}/2)",
                        k + 1,
                        self.lambda_k_exp2[k],
                        v
                    ));
                }
            }
        }
        rep.violations.dedup();
        self.check_nilpotency(&mut rep);
        if rep.violations.is_empty() {
            self.check_confluence(&mut rep);
        }
        rep
    }

    fn check_nilpotency(&self, rep: &mut CglReport) {
        let maxdeg =
            self.delta.values().flat_map(|d| d.terms().map(|(f, _)| f.iter().sum::<u32>() as usize)).max().unwrap_or(0);
        let cap = self.n * (maxdeg + 1);
        for k in 0..self.n {
            if !self.has_delta(k) {
                continue;
            }
            'gen: for j in 0..k {
                let mut d = self.gen(j);
                for _ in 0..=cap {
                    d = match self.skew_delta(k, &d) {
                        Ok(v) => v,
                        Err(_) => break,
                    };
                    if d.is_zero() {
                        continue 'gen;
                    }
                    // a nilpotent orbit cannot outgrow the cap in total degree
                    if d.terms().any(|(f, _)| f.iter().sum::<u32>() as usize > cap) {
                        break;
                    }
                }
                rep.violations.push(format!(
                    "nilpotency of delta_{} on x{} unconfirmed within {} steps",
                    k + 1,
                    j + 1,
                    cap
                ));
            }
        }
    }

    /// `(x_k x_j) x_i = x_k (x_j x_i)` for all `i < j < k`.
    fn check_confluence(&self, rep: &mut CglReport) {
        for k in 0..self.n {
            for j in 0..k {
                for i in 0..j {
                    let (xi, xj, xk) = (self.gen(i), self.gen(j), self.gen(k));
                    let a = self.multiply(&self.multiply(&xk, &xj), &xi);
                    let b = self.multiply(&xk, &self.multiply(&xj, &xi));
                    if a != b {
                        rep.violations.push(format!(
                            "relations for x{}, x{}, x{} are not confluent",
                            i + 1,
                            j + 1,
                            k + 1
                        ));
                    }
                }
            }
        }
    }

    /// Presentation on generators `t_j x_j`.
    pub fn rescale(&self, t: &[C]) -> Result<Self, OreError> {
        if t.len() != self.n {
            return Err(OreError::Malformed("one scale per generator".into()));
        }
        if let Some(i) = t.iter().position(Coeff::is_zero) {
            return Err(OreError::ZeroScale(i));
        }
        let mut delta = BTreeMap::new();
        for (&(k, j), d) in &self.delta {
            let s = t[k].mul(&t[j]);
            let mapped = self.rescale_element(d, t)?.scale(&s);
            delta.insert((k, j), mapped);
        }
        let mut out =
            CGLPresentation::new(self.lambda.clone(), self.lambda_k_exp2.clone(), delta, self.degrees.clone())?;
        out.labels = self.labels.clone();
        out.characteristic = self.characteristic;
        Ok(out)
    }

    /// Rewrite an element in the rescaled generators `t_j x_j`.
    pub fn rescale_element(&self, e: &PBWElement<C>, t: &[C]) -> Result<PBWElement<C>, OreError> {
        let mut out = PBWElement::zero(self.n);
        for (f, c) in &e.terms {
            let tf = f.0.iter().enumerate().fold(C::one(), |acc, (i, &m)| (0..m).fold(acc, |a, _| a.mul(&t[i])));
            out.add_term(f.0.clone(), &c.try_div(&tf).ok_or(OreError::InexactRescale)?);
        }
        Ok(out)
    }

    fn check_symmetric(&self) -> Result<(), OreError> {
        for (&(k, j), d) in &self.delta {
            if d.min_index().is_some_and(|i| i <= j) {
                return Err(OreError::NotSymmetric(format!("delta_{}(x{}) leaves the open interval", k + 1, j + 1)));
            }
        }
        Ok(())
    }

    /// `x_{σ(0)}^{g_0} ⋯ x_{σ(N-1)}^{g_{N-1}}` evaluated in this presentation.
    pub fn sigma_monomial(&self, sigma: &[usize], g: &[u32]) -> PBWElement<C> {
        let mut cur = self.one();
        for (a, &m) in g.iter().enumerate() {
            for _ in 0..m {
                cur = self.times_gen(&cur, sigma[a]);
            }
        }
        cur
    }

    /// Coordinates of `e` in the PBW basis of the σ-reordered generators.
    pub fn to_sigma_basis(&self, e: &PBWElement<C>, sigma: &[usize]) -> Result<PBWElement<C>, OreError> {
        let mut rem = e.clone();
        let mut out = PBWElement::zero(self.n);
        while !rem.is_zero() {
            let (c, h) = rem.leading_term()?;
            let g: Vec<u32> = sigma.iter().map(|&s| h[s]).collect();
            let p = self.sigma_monomial(sigma, &g);
            let (lc, hp) = p.leading_term()?;
            debug_assert_eq!(hp, h);
            let coef = c.try_div(&lc).ok_or(OreError::NonUnitReorder)?;
            out.add_term(g, &coef);
            rem.add_scaled(&p, &coef.neg());
        }
        Ok(out)
    }

    /// The presentation on `x_{σ(1)}, …, x_{σ(N)}`, for σ ∈ Ξ_N.
    pub fn sigma_presentation(&self, sigma: &[usize]) -> Result<Self, OreError> {
        if !crate::primes::is_in_xi(sigma) || sigma.len() != self.n {
            return Err(OreError::NotInXi);
        }
        self.check_symmetric()?;
        let n = self.n;
        let lambda = SkewExponentMatrix::from_lower(n, |b, a| self.lambda.get(sigma[b], sigma[a]));
        let mut delta = BTreeMap::new();
        for b in 0..n {
            for a in 0..b {
                let (u, v) = (sigma[b], sigma[a]);
                let xu = self.gen(u);
                let xv = self.gen(v);
                let d = self.multiply(&xu, &xv).sub(&self.multiply(&xv, &xu).mul_q(self.lambda.get(u, v)));
                if !d.is_zero() {
                    delta.insert((b, a), self.to_sigma_basis(&d, sigma)?);
                }
            }
        }
        let degrees: Vec<Vec<i64>> = sigma.iter().map(|&s| self.degrees[s].clone()).collect();
        let mut lambda_k: Vec<i64> = sigma.iter().map(|&s| self.lambda_k_exp2[s]).collect();
        let mut out = CGLPresentation::new(lambda, lambda_k.clone(), delta, degrees)?;
        for (b, lk) in lambda_k.iter_mut().enumerate() {
            if let Some((&(_, a), d)) = out.delta.iter().find(|((k, _), _)| *k == b) {
                let (_, f) = d.leading_term()?;
                *lk = out.implied_lambda_k(b, a, &f);
            }
        }
        out.lambda_k_exp2 = lambda_k;
        out.labels = sigma.iter().map(|&s| self.labels[s].clone()).collect();
        out.characteristic = self.characteristic;
        Ok(out)
    }

    /// The subalgebra on `x_lo..=x_hi`, re-based to index 0.
    pub fn interval_view(&self, lo: usize, hi: usize) -> Result<IntervalView<C>, OreError> {
        if lo > hi || hi >= self.n {
            return Err(OreError::BadBounds(lo, hi));
        }
        let m = hi + 1 - lo;
        let lambda = SkewExponentMatrix::from_lower(m, |b, a| self.lambda.get(b + lo, a + lo));
        let mut delta = BTreeMap::new();
        for (&(k, j), d) in &self.delta {
            if j >= lo && k <= hi {
                let r = d.restrict(lo, hi).ok_or(OreError::SupportViolation { k })?;
                delta.insert((k - lo, j - lo), r);
            }
        }
        let mut p =
            CGLPresentation::new(lambda, self.lambda_k_exp2[lo..=hi].to_vec(), delta, self.degrees[lo..=hi].to_vec())?;
        p.labels = self.labels[lo..=hi].to_vec();
        p.characteristic = self.characteristic;
        Ok(IntervalView { lo, hi, parent_n: self.n, presentation: p })
    }

    /// Check that the structure constants and `extra` lie in the subring 𝔻.
    pub fn d_form_check(&self, extra: &[PBWElement<C>], ring: DRing) -> DFormReport {
        let mut rep = DFormReport::default();
        if ring == DRing::IntegerPowers {
            for k in 0..self.n {
                for j in 0..k {
                    if self.lambda.get(k, j) % 2 != 0 {
                        rep.violations.push(format!("lambda_{}{} is not a unit of the subring", k + 1, j + 1));
                    }
                }
            }
        }
        let in_ring = |c: &C| match c.as_laurent() {
            None => false,
            Some(s) => ring == DRing::HalfPowers || s.has_integral_exponents(),
        };
        for (&(k, j), d) in &self.delta {
            if !d.terms().all(|(_, c)| in_ring(c)) {
                rep.violations.push(format!("delta_{}(x{}) has a coefficient outside the subring", k + 1, j + 1));
            }
        }
        for (i, e) in extra.iter().enumerate() {
            if let Some((_, c)) = e.terms().find(|(_, c)| !in_ring(c)) {
                rep.violations.push(format!("element {} has coefficient {} outside the subring", i + 1, c));
            }
        }
        rep
    }

    /// Change the coefficient type of the whole presentation.
    pub fn map_coeffs<D: Coeff>(&self, mut g: impl FnMut(&C) -> Option<D>) -> Option<CGLPresentation<D>> {
        let mut delta = BTreeMap::new();
        for (k, d) in &self.delta {
            delta.insert(*k, d.map_coeffs(&mut g)?);
        }
        let mut out =
            CGLPresentation::new(self.lambda.clone(), self.lambda_k_exp2.clone(), delta, self.degrees.clone()).ok()?;
        out.labels = self.labels.clone();
        out.characteristic = self.characteristic;
        Some(out)
    }

    /// Replace or add δ-images, keeping everything else.
    pub fn with_delta(&self, extra: BTreeMap<(usize, usize), PBWElement<C>>) -> Result<Self, OreError> {
        let mut delta = self.delta.clone();
        delta.extend(extra);
        let mut out =
            CGLPresentation::new(self.lambda.clone(), self.lambda_k_exp2.clone(), delta, self.degrees.clone())?;
        out.labels = self.labels.clone();
        out.characteristic = self.characteristic;
        Ok(out)
    }

    pub fn with_lambda_k(&self, lambda_k_exp2: Vec<i64>) -> Self {
        let mut out = self.clone();
        out.lambda_k_exp2 = lambda_k_exp2;
        out
    }
}

/// 𝒮_λ(f) = ∏_{j<k} λ_{jk}^{-f_j f_k}, as a doubled exponent.
pub fn s_lambda_exp2<C: Coeff>(p: &CGLPresentation<C>, f: &[i64]) -> i64 {
    p.lambda().ordered_scalar_exp2(f)
}
