//! Quantum seeds: compatibility checks, matrix and frame mutation, DOT export.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::ore::{CGLPresentation, PBWElement};
use crate::qtorus::{frame_monomial, invert_permutation, reindex_frame, FrameSpec, TorusError};
use crate::scalars::{Coeff, LaurentScalar};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum SeedError {
    #[error("index {} is not exchangeable", .0 + 1)]
    NotExchangeable(usize),
    #[error("principal part is not skew-symmetric at ({},{})", .0 + 1, .1 + 1)]
    NotSkewSymmetric(usize, usize),
    #[error("exchange matrix is malformed: {0}")]
    Malformed(String),
    #[error("mutated variable at {} is not a polynomial in the generators", .0 + 1)]
    InexactExchange(usize),
    #[error(transparent)]
    Torus(#[from] TorusError),
}

/// Exchange matrix with columns labelled by the exchangeable indices.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ExchangeMatrix {
    rows: usize,
    ex: Vec<usize>,
    /// `entries[i][c]` is row `i` of the column for `ex[c]`.
    entries: Vec<Vec<i64>>,
}

impl ExchangeMatrix {
    pub fn new(rows: usize, ex: Vec<usize>, entries: Vec<Vec<i64>>) -> Result<Self, SeedError> {
        if entries.len() != rows || entries.iter().any(|r| r.len() != ex.len()) {
            return Err(SeedError::Malformed(format!("expected {rows} rows of {} entries", ex.len())));
        }
        if ex.iter().any(|&k| k >= rows) || ex.windows(2).any(|w| w[0] >= w[1]) {
            return Err(SeedError::Malformed("ex must be increasing and in range".into()));
        }
        Ok(ExchangeMatrix { rows, ex, entries })
    }

    pub fn from_columns(rows: usize, cols: Vec<(usize, Vec<i64>)>) -> Result<Self, SeedError> {
        let mut cols = cols;
        cols.sort_by_key(|c| c.0);
        let ex: Vec<usize> = cols.iter().map(|c| c.0).collect();
        if cols.iter().any(|c| c.1.len() != rows) {
            return Err(SeedError::Malformed("column length".into()));
        }
        let entries = (0..rows).map(|i| cols.iter().map(|c| c.1[i]).collect()).collect();
        ExchangeMatrix::new(rows, ex, entries)
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn ex(&self) -> &[usize] {
        &self.ex
    }

    pub fn entries(&self) -> &[Vec<i64>] {
        &self.entries
    }

    fn col_index(&self, k: usize) -> Option<usize> {
        self.ex.iter().position(|&e| e == k)
    }

    pub fn is_exchangeable(&self, k: usize) -> bool {
        self.col_index(k).is_some()
    }

    pub fn column(&self, k: usize) -> Option<Vec<i64>> {
        let c = self.col_index(k)?;
        Some(self.entries.iter().map(|r| r[c]).collect())
    }

    /// Entry `b_{ik}` for `k ∈ ex`.
    pub fn get(&self, i: usize, k: usize) -> Option<i64> {
        self.col_index(k).map(|c| self.entries[i][c])
    }

    /// First `(j, k)` with `d_j b_{jk} ≠ −d_k b_{kj}`.
    pub fn symmetrizer_violation(&self, d: &BTreeMap<usize, i64>) -> Option<(usize, usize)> {
        let dd = |i: usize| d.get(&i).copied().unwrap_or(1);
        for &k in &self.ex {
            for &j in &self.ex {
                if dd(j) * self.get(j, k).unwrap() != -dd(k) * self.get(k, j).unwrap() {
                    return Some((j, k));
                }
            }
        }
        None
    }
}

/// `μ_k(B̃)`.
pub fn mutate_exchange(b: &ExchangeMatrix, k: usize) -> Result<ExchangeMatrix, SeedError> {
    if !b.is_exchangeable(k) {
        return Err(SeedError::NotExchangeable(k));
    }
    let mut out = b.clone();
    for i in 0..b.rows {
        for (c, &l) in b.ex.iter().enumerate() {
            let bil = b.entries[i][c];
            out.entries[i][c] = if i == k || l == k {
                -bil
            } else {
                let bik = b.get(i, k).unwrap();
                let bkl = b.entries[k][c];
                bil + (bik.abs() * bkl + bik * bkl.abs()) / 2
            };
        }
    }
    Ok(out)
}

/// `E_ε`: identity except column `k`, which is `max(0, −ε b_{ik})` off the diagonal and `−1` on it.
pub fn e_matrix(b: &ExchangeMatrix, k: usize, eps: i64) -> Result<Vec<Vec<i64>>, SeedError> {
    let col = b.column(k).ok_or(SeedError::NotExchangeable(k))?;
    let n = b.rows;
    let mut e = vec![vec![0; n]; n];
    for i in 0..n {
        e[i][i] = 1;
        e[i][k] = if i == k { -1 } else { (-eps * col[i]).max(0) };
    }
    Ok(e)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(bound = "")]
pub struct QuantumSeed<C: Coeff = LaurentScalar> {
    pub frame: FrameSpec<C>,
    pub btilde: ExchangeMatrix,
    pub inv: Vec<usize>,
    pub symmetrizers: BTreeMap<usize, i64>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct SeedReport {
    pub passed: bool,
    /// First failing `(k, j)`: column `k`, test against `e_j`.
    pub violation: Option<(usize, usize)>,
    pub message: String,
}

pub fn validate_seed<C: Coeff>(seed: &QuantumSeed<C>) -> SeedReport {
    let fail = |k, j, m: String| SeedReport { passed: false, violation: Some((k, j)), message: m };
    let n = seed.frame.n();
    if seed.btilde.rows != n {
        return fail(0, 0, "exchange matrix has the wrong number of rows".into());
    }
    let r = &seed.frame.matrix;
    for &k in &seed.btilde.ex {
        let b = seed.btilde.column(k).unwrap();
        for j in 0..n {
            let twice: i64 = (0..n).map(|i| b[i] * r.get(i, j)).sum();
            if j != k && twice != 0 {
                return fail(k, j, format!("Omega(b^{}, e_{}) = q^({}/2), expected 1", k + 1, j + 1, twice));
            }
            if j == k && twice == 0 {
                return fail(k, j, format!("Omega(b^{}, e_{}) is trivial", k + 1, k + 1));
            }
        }
        let rdeg = seed.frame.degrees.first().map_or(0, Vec::len);
        for t in 0..rdeg {
            let s: i64 = (0..n).map(|i| b[i] * seed.frame.degrees[i][t]).sum();
            if s != 0 {
                return fail(k, k, format!("column {} is not degree-balanced", k + 1));
            }
        }
    }
    if let Some((j, k)) = seed.btilde.symmetrizer_violation(&seed.symmetrizers) {
        return fail(k, j, format!("principal part not skew-symmetrizable at ({}, {})", j + 1, k + 1));
    }
    SeedReport { passed: true, violation: None, message: "ok".into() }
}

/// Find `x` with `a · x = b` by peeling leading terms.
pub fn left_divide<C: Coeff>(p: &CGLPresentation<C>, a: &PBWElement<C>, b: &PBWElement<C>) -> Option<PBWElement<C>> {
    let (_, fa) = a.leading_term().ok()?;
    let mut rem = b.clone();
    let mut out = PBWElement::zero(p.n());
    while !rem.is_zero() {
        let (c, h) = rem.leading_term().ok()?;
        let mut g = Vec::with_capacity(h.len());
        for (x, y) in h.iter().zip(&fa) {
            g.push(x.checked_sub(*y)?);
        }
        let prod = p.multiply(a, &PBWElement::monomial(p.n(), g.clone(), C::one()));
        let (lc, _) = prod.leading_term().ok()?;
        let coef = c.try_div(&lc)?;
        out.add_scaled(&PBWElement::monomial(p.n(), g, C::one()), &coef);
        rem.add_scaled(&prod, &coef.neg());
    }
    Some(out)
}

fn positive_part(v: &[i64], sign: i64) -> Vec<i64> {
    v.iter().map(|&x| (sign * x).max(0)).collect()
}

/// The two terms `Ω(e_k, v)·M(v)` of the exchange relation `M(e_k)·μ_k(M)(e_k) = …`.
pub fn exchange_rhs<C: Coeff>(
    p: &CGLPresentation<C>,
    seed: &QuantumSeed<C>,
    k: usize,
    eps: i64,
) -> Result<PBWElement<C>, SeedError> {
    let b = seed.btilde.column(k).ok_or(SeedError::NotExchangeable(k))?;
    let n = seed.frame.n();
    let mut ek = vec![0; n];
    ek[k] = 1;
    let mut rhs = PBWElement::zero(p.n());
    for v in [positive_part(&b, -eps), positive_part(&b, eps)] {
        let w = seed.frame.matrix.bicharacter(&ek, &v)?.twice();
        rhs = rhs.add(&frame_monomial(p, &seed.frame, &v)?.mul_q(w));
    }
    Ok(rhs)
}

/// `μ_k` of a seed. With an algebra, the new variable is realized by exact
/// division; without one it is left unrealized.
pub fn mutate_seed<C: Coeff>(
    seed: &QuantumSeed<C>,
    k: usize,
    eps: i64,
    algebra: Option<&CGLPresentation<C>>,
) -> Result<QuantumSeed<C>, SeedError> {
    let b = seed.btilde.column(k).ok_or(SeedError::NotExchangeable(k))?;
    let e = e_matrix(&seed.btilde, k, eps)?;
    let n = seed.frame.n();
    let mut frame = seed.frame.clone();
    frame.matrix = seed.frame.matrix.congruence(&e);
    let rdeg = frame.degrees.first().map_or(0, Vec::len);
    let neg = positive_part(&b, -eps);
    frame.degrees[k] = (0..rdeg)
        .map(|t| -seed.frame.degrees[k][t] + (0..n).map(|i| neg[i] * seed.frame.degrees[i][t]).sum::<i64>())
        .collect();
    frame.variables[k] = match algebra {
        Some(p) => {
            let mk = seed.frame.variable(k)?;
            let rhs = exchange_rhs(p, seed, k, eps)?;
            Some(left_divide(p, mk, &rhs).ok_or(SeedError::InexactExchange(k))?)
        }
        None => None,
    };
    frame.labels[k] = format!("{}'", seed.frame.labels[k]);
    Ok(QuantumSeed {
        frame,
        btilde: mutate_exchange(&seed.btilde, k)?,
        inv: seed.inv.clone(),
        symmetrizers: seed.symmetrizers.clone(),
    })
}

/// Relabel a seed by `τ`: new index `j` is old index `τ(j)`.
pub fn reindex_seed<C: Coeff>(seed: &QuantumSeed<C>, tau: &[usize]) -> Result<QuantumSeed<C>, SeedError> {
    let frame = reindex_frame(&seed.frame, tau)?;
    let inv_tau = invert_permutation(tau);
    let cols = seed
        .btilde
        .ex
        .iter()
        .map(|&l| {
            let col = seed.btilde.column(l).unwrap();
            (inv_tau[l], tau.iter().map(|&t| col[t]).collect())
        })
        .collect();
    let btilde = ExchangeMatrix::from_columns(seed.btilde.rows, cols)?;
    let mut inv: Vec<usize> = seed.inv.iter().map(|&i| inv_tau[i]).collect();
    inv.sort_unstable();
    let symmetrizers = seed.symmetrizers.iter().map(|(&k, &d)| (inv_tau[k], d)).collect();
    Ok(QuantumSeed { frame, btilde, inv, symmetrizers })
}

/// Directed edges `(source, target)`, one entry per unit of multiplicity, sorted.
pub fn quiver_edges<C: Coeff>(seed: &QuantumSeed<C>) -> Result<Vec<(usize, usize)>, SeedError> {
    let b = &seed.btilde;
    for &k in &b.ex {
        for &j in &b.ex {
            if b.get(j, k) != b.get(k, j).map(|v| -v) {
                return Err(SeedError::NotSkewSymmetric(j, k));
            }
        }
    }
    let mut edges = Vec::new();
    for &k in &b.ex {
        for j in 0..b.rows {
            let v = b.get(j, k).unwrap();
            if v > 0 {
                edges.extend(std::iter::repeat_n((j, k), v as usize));
            } else if v < 0 && !b.is_exchangeable(j) {
                edges.extend(std::iter::repeat_n((k, j), (-v) as usize));
            }
        }
    }
    edges.sort_unstable();
    Ok(edges)
}

/// Graphviz rendering with 1-based vertices; frozen vertices are boxes.
pub fn quiver_dot<C: Coeff>(seed: &QuantumSeed<C>) -> Result<String, SeedError> {
    let edges = quiver_edges(seed)?;
    let mut s = String::from("digraph quiver {\n");
    for v in 0..seed.btilde.rows {
        if seed.btilde.is_exchangeable(v) {
            let _ = writeln!(s, "  {};", v + 1);
        } else {
            let _ = writeln!(s, "  {} [shape=box];", v + 1);
        }
    }
    for (a, b) in edges {
        let _ = writeln!(s, "  {} -> {};", a + 1, b + 1);
    }
    s.push_str("}\n");
    Ok(s)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::qtorus::SkewExponentMatrix;

    fn b2() -> ExchangeMatrix {
        ExchangeMatrix::from_columns(4, vec![(0, vec![0, 2, -1, 0]), (1, vec![-1, 0, 1, -1])]).unwrap()
    }

    #[test]
    fn mutation_oracle() {
        let m = mutate_exchange(&b2(), 0).unwrap();
        assert_eq!(m.column(0).unwrap(), vec![0, -2, 1, 0]);
        assert_eq!(m.column(1).unwrap(), vec![1, 0, 0, -1]);
        assert_eq!(mutate_exchange(&m, 0).unwrap(), b2());
        assert_eq!(mutate_exchange(&b2(), 2), Err(SeedError::NotExchangeable(2)));
    }

    #[test]
    fn symmetrizable_b2_principal_part() {
        let d: BTreeMap<usize, i64> = [(0, 2), (1, 1)].into();
        assert_eq!(b2().symmetrizer_violation(&d), None);
        let flat: BTreeMap<usize, i64> = BTreeMap::new();
        assert_eq!(b2().symmetrizer_violation(&flat), Some((1, 0)));
    }

    #[test]
    fn empty_quiver() {
        let b = ExchangeMatrix::from_columns(3, vec![(0, vec![0, 0, 0])]).unwrap();
        let seed: QuantumSeed = QuantumSeed {
            frame: FrameSpec::unrealized(SkewExponentMatrix::zero(3), vec![vec![]; 3]),
            btilde: b,
            inv: vec![],
            symmetrizers: BTreeMap::new(),
        };
        assert!(quiver_edges(&seed).unwrap().is_empty());
        assert_eq!(quiver_dot(&seed).unwrap(), "digraph quiver {\n  1;\n  2 [shape=box];\n  3 [shape=box];\n}\n");
    }
}
