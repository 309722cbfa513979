//! Skew-symmetric exponent matrices, the bicharacter Ω, and toric frames.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::ore::{CGLPresentation, PBWElement};
use crate::scalars::{Coeff, HalfInt, LaurentScalar};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum TorusError {
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("matrix is not skew-symmetric at ({},{})", .0 + 1, .1 + 1)]
    NotSkew(usize, usize),
    #[error("frame variable {} is not realized", .0 + 1)]
    UnrealizedFrame(usize),
    #[error("negative exponent at index {}", .0 + 1)]
    NegativeExponent(usize),
    #[error("not a permutation of 1..{0}")]
    BadPermutation(usize),
}

/// `r_{jk} = q^{exp2[j][k]/2}` with `exp2` skew-symmetric.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SkewExponentMatrix {
    exp2: Vec<Vec<i64>>,
}

impl SkewExponentMatrix {
    pub fn new(exp2: Vec<Vec<i64>>) -> Result<Self, TorusError> {
        let n = exp2.len();
        for (j, row) in exp2.iter().enumerate() {
            if row.len() != n {
                return Err(TorusError::DimensionMismatch { expected: n, got: row.len() });
            }
            for k in 0..n {
                if row[k] != -exp2[k][j] {
                    return Err(TorusError::NotSkew(j, k));
                }
            }
        }
        Ok(SkewExponentMatrix { exp2 })
    }

    pub fn zero(n: usize) -> Self {
        SkewExponentMatrix { exp2: vec![vec![0; n]; n] }
    }

    /// Build from the strictly lower triangle: `lower(k, j)` for `j < k`.
    pub fn from_lower(n: usize, lower: impl Fn(usize, usize) -> i64) -> Self {
        let mut exp2 = vec![vec![0; n]; n];
        for k in 0..n {
            for j in 0..k {
                let v = lower(k, j);
                exp2[k][j] = v;
                exp2[j][k] = -v;
            }
        }
        SkewExponentMatrix { exp2 }
    }

    pub fn n(&self) -> usize {
        self.exp2.len()
    }

    pub fn get(&self, j: usize, k: usize) -> i64 {
        self.exp2[j][k]
    }

    pub fn rows(&self) -> &[Vec<i64>] {
        &self.exp2
    }

    /// Exponent of `Ω(f, g) = ∏ r_{jk}^{f_j g_k}`.
    pub fn bicharacter(&self, f: &[i64], g: &[i64]) -> Result<HalfInt, TorusError> {
        let n = self.n();
        for v in [f, g] {
            if v.len() != n {
                return Err(TorusError::DimensionMismatch { expected: n, got: v.len() });
            }
        }
        let mut twice = 0;
        for j in 0..n {
            if f[j] == 0 {
                continue;
            }
            for k in 0..n {
                twice += f[j] * self.exp2[j][k] * g[k];
            }
        }
        Ok(HalfInt::from_twice(twice))
    }

    /// Twice the exponent of `∏_{j<k} r_{jk}^{-f_j f_k}`.
    pub fn ordered_scalar_exp2(&self, f: &[i64]) -> i64 {
        let mut t = 0;
        for k in 0..f.len() {
            for j in 0..k {
                t -= self.exp2[j][k] * f[j] * f[k];
            }
        }
        t
    }

    /// Entry `(j, k)` becomes old `(τ(j), τ(k))`.
    pub fn reindex(&self, tau: &[usize]) -> Self {
        let n = self.n();
        SkewExponentMatrix { exp2: (0..n).map(|j| (0..n).map(|k| self.exp2[tau[j]][tau[k]]).collect()).collect() }
    }

    /// `Eᵀ · exp2 · E`.
    pub fn congruence(&self, e: &[Vec<i64>]) -> Self {
        let n = self.n();
        let mut tmp = vec![vec![0i64; n]; n];
        for i in 0..n {
            for k in 0..n {
                tmp[i][k] = (0..n).map(|j| self.exp2[i][j] * e[j][k]).sum();
            }
        }
        let exp2 = (0..n).map(|a| (0..n).map(|k| (0..n).map(|i| e[i][a] * tmp[i][k]).sum()).collect()).collect();
        SkewExponentMatrix { exp2 }
    }
}

/// A toric frame: matrix, optional PBW realizations, degrees and labels.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(bound = "")]
pub struct FrameSpec<C: Coeff = LaurentScalar> {
    pub matrix: SkewExponentMatrix,
    pub variables: Vec<Option<PBWElement<C>>>,
    pub degrees: Vec<Vec<i64>>,
    pub labels: Vec<String>,
}

impl<C: Coeff> FrameSpec<C> {
    pub fn unrealized(matrix: SkewExponentMatrix, degrees: Vec<Vec<i64>>) -> Self {
        let n = matrix.n();
        FrameSpec { matrix, variables: vec![None; n], degrees, labels: (1..=n).map(|i| format!("M{i}")).collect() }
    }

    pub fn n(&self) -> usize {
        self.matrix.n()
    }

    pub fn is_realized(&self) -> bool {
        self.variables.iter().all(Option::is_some)
    }

    pub fn variable(&self, k: usize) -> Result<&PBWElement<C>, TorusError> {
        self.variables[k].as_ref().ok_or(TorusError::UnrealizedFrame(k))
    }
}

/// `M(f) = (∏_{j<k} r_{jk}^{-f_j f_k}) · M(e_1)^{f_1} ⋯ M(e_n)^{f_n}` for `f ≥ 0`.
pub fn frame_monomial<C: Coeff>(
    p: &CGLPresentation<C>,
    frame: &FrameSpec<C>,
    f: &[i64],
) -> Result<PBWElement<C>, TorusError> {
    let n = frame.n();
    if f.len() != n {
        return Err(TorusError::DimensionMismatch { expected: n, got: f.len() });
    }
    if let Some(k) = f.iter().position(|&v| v < 0) {
        return Err(TorusError::NegativeExponent(k));
    }
    let mut out = PBWElement::constant(p.n(), C::q_pow2(frame.matrix.ordered_scalar_exp2(f)));
    for (k, &m) in f.iter().enumerate() {
        if m == 0 {
            continue;
        }
        let v = frame.variable(k)?;
        for _ in 0..m {
            out = p.multiply(&out, v);
        }
    }
    Ok(out)
}

/// `(M·τ)(e_k) = M(e_{τ(k)})`.
pub fn reindex_frame<C: Coeff>(frame: &FrameSpec<C>, tau: &[usize]) -> Result<FrameSpec<C>, TorusError> {
    check_permutation(tau, frame.n())?;
    Ok(FrameSpec {
        matrix: frame.matrix.reindex(tau),
        variables: tau.iter().map(|&t| frame.variables[t].clone()).collect(),
        degrees: tau.iter().map(|&t| frame.degrees[t].clone()).collect(),
        labels: tau.iter().map(|&t| frame.labels[t].clone()).collect(),
    })
}

pub fn check_permutation(tau: &[usize], n: usize) -> Result<(), TorusError> {
    let mut seen = vec![false; n];
    if tau.len() != n {
        return Err(TorusError::BadPermutation(n));
    }
    for &t in tau {
        if t >= n || seen[t] {
            return Err(TorusError::BadPermutation(n));
        }
        seen[t] = true;
    }
    Ok(())
}

pub fn invert_permutation(tau: &[usize]) -> Vec<usize> {
    let mut inv = vec![0; tau.len()];
    for (i, &t) in tau.iter().enumerate() {
        inv[t] = i;
    }
    inv
}
