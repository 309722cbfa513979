//! Cartan data, root sequences of reduced words, the Schubert-cell seed
//! blueprint, and the bundled example presentations.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::ore::{CGLPresentation, OreError, PBWElement};
use crate::parse::{parse_element, ParseError};
use crate::qtorus::SkewExponentMatrix;
use crate::scalars::{HalfInt, LaurentScalar};
use crate::seed::{ExchangeMatrix, SeedError};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum KacMoodyError {
    #[error("invalid Cartan datum: {0}")]
    BadCartan(String),
    #[error("letter {0} is out of range")]
    LetterOutOfRange(usize),
    #[error("word is not reduced: beta_{} is not positive", .0 + 1)]
    NotReduced(usize),
    #[error("pairing of two weights with nonzero fundamental parts is undefined")]
    UndefinedPairing,
    #[error("blueprint is inconsistent: {0}")]
    CompatibilityViolation(String),
    #[error("unknown preset `{0}`")]
    UnknownPreset(String),
    #[error(transparent)]
    Parse(#[from] ParseError),
    #[error(transparent)]
    Ore(#[from] OreError),
    #[error(transparent)]
    Seed(#[from] SeedError),
}

/// A symmetrizable generalized Cartan matrix with symmetrizers `d_i`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CartanDatum {
    pub rank: usize,
    pub a: Vec<Vec<i64>>,
    pub d: Vec<i64>,
    /// Label of the first simple root in files and words (1, or 0 for affine labelling).
    #[serde(default = "one")]
    pub index_base: usize,
}

fn one() -> usize {
    1
}

impl CartanDatum {
    pub fn new(a: Vec<Vec<i64>>, d: Vec<i64>, index_base: usize) -> Result<Self, KacMoodyError> {
        let c = CartanDatum { rank: a.len(), a, d, index_base };
        c.validate()?;
        Ok(c)
    }

    pub fn validate(&self) -> Result<(), KacMoodyError> {
        let r = self.rank;
        let bad = |m: String| Err(KacMoodyError::BadCartan(m));
        if self.a.len() != r || self.a.iter().any(|row| row.len() != r) || self.d.len() != r {
            return bad("dimensions do not match the rank".into());
        }
        if self.d.iter().any(|&x| x <= 0) {
            return bad("symmetrizers must be positive".into());
        }
        if self.d.iter().fold(0, |g, &x| num_integer::gcd(g, x)) != 1 {
            return bad("symmetrizers must have gcd 1".into());
        }
        for i in 0..r {
            if self.a[i][i] != 2 {
                return bad(format!("diagonal entry {} is not 2", i + self.index_base));
            }
            for j in 0..r {
                if i != j && self.a[i][j] > 0 {
                    return bad("off-diagonal entries must be nonpositive".into());
                }
                if self.d[i] * self.a[i][j] != self.d[j] * self.a[j][i] {
                    return bad(format!("d_i a_ij != d_j a_ji at ({}, {})", i + self.index_base, j + self.index_base));
                }
            }
        }
        Ok(())
    }

    pub fn b2() -> Self {
        CartanDatum::new(vec![vec![2, -1], vec![-2, 2]], vec![2, 1], 1).unwrap()
    }

    pub fn a2_twisted() -> Self {
        CartanDatum::new(vec![vec![2, -4], vec![-1, 2]], vec![1, 4], 0).unwrap()
    }
}

/// `Σ w_part[i] ϖ_i + Σ q_part[j] α_j`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Weight {
    pub w_part: Vec<i64>,
    pub q_part: Vec<i64>,
}

impl Weight {
    pub fn zero(r: usize) -> Self {
        Weight { w_part: vec![0; r], q_part: vec![0; r] }
    }

    pub fn fundamental(r: usize, i: usize) -> Self {
        let mut w = Weight::zero(r);
        w.w_part[i] = 1;
        w
    }

    pub fn simple_root(r: usize, i: usize) -> Self {
        let mut w = Weight::zero(r);
        w.q_part[i] = 1;
        w
    }

    pub fn sub(&self, o: &Weight) -> Weight {
        Weight {
            w_part: self.w_part.iter().zip(&o.w_part).map(|(a, b)| a - b).collect(),
            q_part: self.q_part.iter().zip(&o.q_part).map(|(a, b)| a - b).collect(),
        }
    }

    fn is_positive_root_like(&self) -> bool {
        self.w_part.iter().all(|&x| x == 0) && self.q_part.iter().all(|&x| x >= 0) && self.q_part.iter().any(|&x| x > 0)
    }
}

/// `s_i(μ) = μ − ⟨h_i, μ⟩ α_i`.
pub fn reflect(c: &CartanDatum, i: usize, mu: &Weight) -> Weight {
    let h: i64 = mu.w_part[i] + (0..c.rank).map(|j| c.a[i][j] * mu.q_part[j]).sum::<i64>();
    let mut out = mu.clone();
    out.q_part[i] -= h;
    out
}

/// `(α_i, α_j) = d_i a_ij`, `(ϖ_i, α_j) = δ_ij d_j`.
pub fn pairing(c: &CartanDatum, mu: &Weight, nu: &Weight) -> Result<HalfInt, KacMoodyError> {
    let has_w = |x: &Weight| x.w_part.iter().any(|&v| v != 0);
    if has_w(mu) && has_w(nu) {
        return Err(KacMoodyError::UndefinedPairing);
    }
    let r = c.rank;
    let mut s = 0;
    for i in 0..r {
        for j in 0..r {
            s += mu.q_part[i] * nu.q_part[j] * c.d[i] * c.a[i][j];
        }
        s += mu.w_part[i] * nu.q_part[i] * c.d[i] + nu.w_part[i] * mu.q_part[i] * c.d[i];
    }
    Ok(HalfInt::from_int(s))
}

fn pair_int(c: &CartanDatum, mu: &Weight, nu: &Weight) -> i64 {
    pairing(c, mu, nu).expect("one side lies in the root lattice").twice() / 2
}

/// Letters `i_1, …, i_N`, 0-based.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ReducedWord(pub Vec<usize>);

impl ReducedWord {
    /// Parse `"1,2,1,2"` with the datum's label base.
    pub fn parse(c: &CartanDatum, text: &str) -> Result<Self, KacMoodyError> {
        let mut out = Vec::new();
        for part in text.split(',').map(str::trim).filter(|s| !s.is_empty()) {
            let v: usize = part.parse().map_err(|_| KacMoodyError::BadCartan(format!("bad letter `{part}`")))?;
            if v < c.index_base || v - c.index_base >= c.rank {
                return Err(KacMoodyError::LetterOutOfRange(v));
            }
            out.push(v - c.index_base);
        }
        Ok(ReducedWord(out))
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// `s_{i_lo} ⋯ s_{i_hi}` applied to `μ`.
    fn apply(&self, c: &CartanDatum, lo: usize, hi: usize, mu: &Weight) -> Weight {
        (lo..=hi).rev().fold(mu.clone(), |acc, t| reflect(c, self.0[t], &acc))
    }
}

/// `β_k = s_{i_1} ⋯ s_{i_{k−1}}(α_{i_k})`.
pub fn root_sequence(c: &CartanDatum, w: &ReducedWord) -> Result<Vec<Weight>, KacMoodyError> {
    if let Some(&bad) = w.0.iter().find(|&&i| i >= c.rank) {
        return Err(KacMoodyError::LetterOutOfRange(bad + c.index_base));
    }
    let mut out = Vec::with_capacity(w.len());
    for k in 0..w.len() {
        let alpha = Weight::simple_root(c.rank, w.0[k]);
        let beta = if k == 0 { alpha } else { w.apply(c, 0, k - 1, &alpha) };
        if !beta.is_positive_root_like() {
            return Err(KacMoodyError::NotReduced(k));
        }
        out.push(beta);
    }
    Ok(out)
}

/// The seed data of the quantum Schubert cell attached to `(c, w)`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SchubertBlueprint {
    pub cartan: CartanDatum,
    pub word: ReducedWord,
    pub roots: Vec<Weight>,
    pub lambda: SkewExponentMatrix,
    pub lambda_k_exp2: Vec<i64>,
    pub r_w: SkewExponentMatrix,
    pub btilde: ExchangeMatrix,
    pub eta: Vec<usize>,
    pub exw: Vec<usize>,
    /// `a[j][k]` for `j ≤ k`, zero below the diagonal.
    pub a_scalars: Vec<Vec<HalfInt>>,
    pub symmetrizers: BTreeMap<usize, i64>,
    /// Root-lattice degrees `(1 − w_{≤k})ϖ_{i_k}` of the seed variables.
    pub degrees: Vec<Vec<i64>>,
}

pub fn blueprint(c: &CartanDatum, w: &ReducedWord) -> Result<SchubertBlueprint, KacMoodyError> {
    c.validate()?;
    let roots = root_sequence(c, w)?;
    let n = w.len();
    let r = c.rank;
    let letters = &w.0;
    let lambda = SkewExponentMatrix::from_lower(n, |k, j| 2 * pair_int(c, &roots[k], &roots[j]));
    let lambda_k_exp2: Vec<i64> = letters.iter().map(|&i| 4 * c.d[i]).collect();

    // (w_{≤k} − 1) ϖ_{i_k}
    let shifted: Vec<Weight> = (0..n)
        .map(|k| {
            let fw = Weight::fundamental(r, letters[k]);
            w.apply(c, 0, k, &fw).sub(&fw)
        })
        .collect();
    let r_w = SkewExponentMatrix::from_lower(n, |k, j| {
        let fw = Weight::fundamental(r, letters[k]);
        -(pair_int(c, &shifted[k], &shifted[j]) + 2 * pair_int(c, &fw, &shifted[j]))
    });

    let succ: Vec<Option<usize>> = (0..n).map(|k| (k + 1..n).find(|&l| letters[l] == letters[k])).collect();
    let pred: Vec<Option<usize>> = (0..n).map(|k| (0..k).rev().find(|&l| letters[l] == letters[k])).collect();
    let exw: Vec<usize> = (0..n).filter(|&k| succ[k].is_some()).collect();
    // s = None stands for +∞
    let lt = |a: Option<usize>, b: Option<usize>| match (a, b) {
        (Some(x), Some(y)) => x < y,
        (Some(_), None) => true,
        (None, _) => false,
    };
    let mut cols = Vec::new();
    for &k in &exw {
        let sk = succ[k];
        let col = (0..n)
            .map(|j| {
                let a = c.a[letters[j]][letters[k]];
                if pred[k] == Some(j) {
                    1
                } else if sk == Some(j) {
                    -1
                } else if j < k && lt(Some(k), succ[j]) && lt(succ[j], sk) {
                    a
                } else if k < j && lt(Some(j), sk) && lt(sk, succ[j]) {
                    -a
                } else {
                    0
                }
            })
            .collect();
        cols.push((k, col));
    }
    let btilde = ExchangeMatrix::from_columns(n, cols)?;

    let mut a_scalars = vec![vec![HalfInt::ZERO; n]; n];
    for k in 0..n {
        let fw = Weight::fundamental(r, letters[k]);
        for (j, row) in a_scalars.iter_mut().enumerate().take(k + 1) {
            let v = w.apply(c, j, k, &fw).sub(&fw);
            row[k] = HalfInt::from_twice(pair_int(c, &v, &v) / 2);
        }
    }
    let degrees: Vec<Vec<i64>> = shifted.iter().map(|s| s.q_part.iter().map(|v| -v).collect()).collect();
    let symmetrizers = exw.iter().map(|&k| (k, c.d[letters[k]])).collect();
    let bp = SchubertBlueprint {
        cartan: c.clone(),
        word: w.clone(),
        roots,
        lambda,
        lambda_k_exp2,
        r_w,
        btilde,
        eta: letters.clone(),
        exw,
        a_scalars,
        symmetrizers,
        degrees,
    };
    bp.check()?;
    Ok(bp)
}

impl SchubertBlueprint {
    pub fn n(&self) -> usize {
        self.word.len()
    }

    /// Both compatibility identities and skew-symmetrizability.
    pub fn check(&self) -> Result<(), KacMoodyError> {
        let n = self.n();
        for &k in self.btilde.ex() {
            let b = self.btilde.column(k).unwrap();
            for l in 0..n {
                let twice: i64 = (0..n).map(|j| b[j] * self.r_w.get(j, l)).sum();
                let want = if l == k { -2 * self.cartan.d[self.word.0[k]] } else { 0 };
                if twice != want {
                    return Err(KacMoodyError::CompatibilityViolation(format!(
                        "Omega(b^{}, e_{}) has doubled exponent {twice}, expected {want}",
                        k + 1,
                        l + 1
                    )));
                }
            }
            for t in 0..self.cartan.rank {
                if (0..n).map(|j| b[j] * self.degrees[j][t]).sum::<i64>() != 0 {
                    return Err(KacMoodyError::CompatibilityViolation(format!(
                        "column {} is not degree-balanced",
                        k + 1
                    )));
                }
            }
        }
        if let Some((j, k)) = self.btilde.symmetrizer_violation(&self.symmetrizers) {
            return Err(KacMoodyError::CompatibilityViolation(format!(
                "principal part not symmetrizable at ({}, {})",
                j + 1,
                k + 1
            )));
        }
        Ok(())
    }
}

/// Expected data shipped with a preset; every field is optional.
#[derive(Clone, Debug, Default)]
pub struct Fixtures {
    pub levels: Option<Vec<Vec<usize>>>,
    pub y: Option<Vec<PBWElement>>,
    pub ybar: Option<Vec<PBWElement>>,
    pub r: Option<SkewExponentMatrix>,
    pub btilde: Option<ExchangeMatrix>,
    pub quiver: Option<Vec<(usize, usize)>>,
}

#[derive(Clone, Debug)]
pub struct Preset {
    pub name: String,
    pub presentation: CGLPresentation,
    pub fixtures: Fixtures,
    pub cartan: Option<(CartanDatum, ReducedWord)>,
}

pub const PRESET_NAMES: [&str; 4] = ["b2-w1212", "a2tw-01010", "lastex", "qweyl:<n>"];

type Relation<'a> = (usize, usize, &'a str);

/// Build a presentation from 1-based relations `x_k x_j = q^{λ/2} x_j x_k + δ`,
/// parsing each `δ_k` in the algebra generated by the lower variables.
fn assemble(
    lambda: SkewExponentMatrix,
    lambda_k_exp2: Vec<i64>,
    degrees: Vec<Vec<i64>>,
    rels: &[Relation],
) -> Result<CGLPresentation, KacMoodyError> {
    let mut p = CGLPresentation::new(lambda, lambda_k_exp2, BTreeMap::new(), degrees)?;
    let n = p.n();
    for k in 1..=n {
        let mut add = BTreeMap::new();
        for &(kk, j, text) in rels.iter().filter(|r| r.0 == k) {
            add.insert((kk - 1, j - 1), parse_element(&p, text)?);
        }
        if !add.is_empty() {
            p = p.with_delta(add)?;
        }
    }
    Ok(p)
}

fn parse_all(p: &CGLPresentation, items: &[&str]) -> Result<Vec<PBWElement>, KacMoodyError> {
    items.iter().map(|s| parse_element(p, s).map_err(KacMoodyError::from)).collect()
}

fn lower(n: usize, entries: &[(usize, usize, i64)]) -> SkewExponentMatrix {
    let m: BTreeMap<(usize, usize), i64> = entries.iter().map(|&(k, j, v)| ((k - 1, j - 1), v)).collect();
    SkewExponentMatrix::from_lower(n, |k, j| m.get(&(k, j)).copied().unwrap_or(0))
}

pub fn preset(name: &str) -> Result<Preset, KacMoodyError> {
    match name {
        "b2-w1212" => preset_b2(),
        "a2tw-01010" => preset_a2tw(),
        "lastex" => preset_lastex(),
        _ => match name.strip_prefix("qweyl:").and_then(|s| s.parse::<usize>().ok()) {
            Some(n) if n >= 1 => qweyl(n, None),
            _ => Err(KacMoodyError::UnknownPreset(name.into())),
        },
    }
}

fn preset_b2() -> Result<Preset, KacMoodyError> {
    let lambda = lower(4, &[(2, 1, 4), (3, 1, 0), (3, 2, 4), (4, 1, -4), (4, 2, 0), (4, 3, 4)]);
    let p = assemble(
        lambda,
        vec![8, 4, 8, 4],
        vec![vec![1, 0], vec![1, 1], vec![1, 2], vec![0, 1]],
        &[(3, 1, "-(q^-2 - q^2)*x2^2"), (4, 1, "-q^-1*(q^-2 - q^2)*x2"), (4, 2, "-(q^-1 - q)*x3")],
    )?;
    let ybar = parse_all(&p, &["x1", "x2", "x1*x3 - q^-2*x2^2", "x2*x4 - q^-1*x3"])?;
    let fixtures = Fixtures {
        levels: Some(vec![vec![0, 2], vec![1, 3]]),
        y: Some(ybar.clone()),
        ybar: Some(ybar),
        btilde: Some(ExchangeMatrix::from_columns(4, vec![(0, vec![0, 2, -1, 0]), (1, vec![-1, 0, 1, -1])])?),
        ..Default::default()
    };
    let c = CartanDatum::b2();
    let w = ReducedWord(vec![0, 1, 0, 1]);
    Ok(Preset { name: "b2-w1212".into(), presentation: p, fixtures, cartan: Some((c, w)) })
}

fn preset_a2tw() -> Result<Preset, KacMoodyError> {
    let lambda = lower(
        5,
        &[
            (2, 1, 8),
            (3, 1, 4),
            (3, 2, 8),
            (4, 1, 8),
            (4, 2, 16),
            (4, 3, 8),
            (5, 1, 4),
            (5, 2, 8),
            (5, 3, 4),
            (5, 4, 8),
        ],
    );
    let p = assemble(
        lambda,
        vec![4, 16, 4, 16, 4],
        vec![vec![1, 0], vec![4, 1], vec![3, 1], vec![8, 3], vec![5, 2]],
        &[
            (3, 1, "(q^2 - 1)*x2"),
            (4, 1, "(q^6 - q^-2)*x3^3"),
            (4, 2, "(q^8 - 1)*x3^4"),
            (5, 1, "(q^4 - q^-2)*x3^2"),
            (5, 2, "(q^6 - q^-2)*x3^3"),
            (5, 3, "(q^2 - 1)*x4"),
        ],
    )?;
    let ybar = parse_all(
        &p,
        &[
            "x1",
            "x2",
            "q*x1*x3 - q^-1*x2",
            "q^4*x2*x4 - q^-4*x3^4",
            "q^3*x1*x3*x5 - q*x2*x5 - q^-1*(q^2 + 1 + q^-2)*x3^3 - q*x1*x4",
        ],
    )?;
    let fixtures = Fixtures {
        levels: Some(vec![vec![0, 2, 4], vec![1, 3]]),
        ybar: Some(ybar),
        btilde: Some(ExchangeMatrix::from_columns(
            5,
            vec![(0, vec![0, 1, -1, 0, 0]), (1, vec![-4, 0, 4, -1, 0]), (2, vec![1, -1, 0, 1, -1])],
        )?),
        ..Default::default()
    };
    let c = CartanDatum::a2_twisted();
    let w = ReducedWord(vec![0, 1, 0, 1, 0]);
    Ok(Preset { name: "a2tw-01010".into(), presentation: p, fixtures, cartan: Some((c, w)) })
}

fn preset_lastex() -> Result<Preset, KacMoodyError> {
    let mut entries = vec![(2, 1, 2), (3, 1, 2), (3, 2, 2), (4, 1, 2), (4, 2, 2), (4, 3, 2), (6, 5, 2)];
    for j in 1..=4 {
        entries.push((5, j, -2));
        entries.push((6, j, -2));
    }
    let y = "(x4*x5 - q*(1 - q)^2)";
    let d61 = format!("(q^-1 - q)*x2*{y}*x5 + (1 - q)*x3^2*x5^2");
    let d62 = format!("(q - q^-1)*x3*{y}*x5");
    let d63 = format!("(q - 1)*{y}^2");
    let p = assemble(
        lower(6, &entries),
        vec![2; 6],
        vec![vec![4, 3], vec![3, 2], vec![2, 1], vec![1, 0], vec![-1, 0], vec![-2, -1]],
        &[
            (3, 1, "(1 - q)*x2^2"),
            (4, 1, "(1 - q^2)*x2*x3"),
            (4, 2, "(q - 1)*x3^2"),
            (5, 4, "(q - 1)^3"),
            (6, 1, &d61),
            (6, 2, &d62),
            (6, 3, &d63),
        ],
    )?;
    let y6 = format!("x1*x3*x6 + q^-1*x2^2*x6 - q*x1*{y}^2 - (1 + q^-1)*x2*x3*{y}*x5 + q^-2*x3^3*x5^2");
    let ys = parse_all(
        &p,
        &["x1", "x2", "x1*x3 + q^-1*x2^2", "x2*x4 - q^-1*x3^2", "x2*x4*x5 - q^-1*x3^2*x5 - q*(1 - q)^2*x2", &y6],
    )?;
    let r = SkewExponentMatrix::new(vec![
        vec![0, -1, -1, -2, -1, 0],
        vec![1, 0, 0, -1, 0, 1],
        vec![1, 0, 0, -2, 0, 2],
        vec![2, 1, 2, 0, 2, 4],
        vec![1, 0, 0, -2, 0, 1],
        vec![0, -1, -2, -4, -1, 0],
    ])
    .expect("skew");
    let btilde = ExchangeMatrix::from_columns(
        6,
        vec![
            (0, vec![0, -2, 1, 0, 0, 0]),
            (1, vec![2, 0, -2, 1, 0, 0]),
            (2, vec![-1, 2, 0, 0, -2, 1]),
            (3, vec![0, -1, 0, 0, 1, 0]),
        ],
    )?;
    let quiver = vec![(0, 1), (0, 1), (1, 2), (1, 2), (2, 0), (2, 4), (2, 4), (3, 1), (4, 3), (5, 2)];
    let fixtures = Fixtures {
        levels: Some(vec![vec![0, 2, 5], vec![1, 3, 4]]),
        y: Some(ys),
        ybar: None,
        r: Some(r),
        btilde: Some(btilde),
        quiver: Some(quiver),
    };
    Ok(Preset { name: "lastex".into(), presentation: p, fixtures, cartan: None })
}

/// The symmetric presentation of the uniparameter quantized Weyl algebra on
/// `x_1..x_{2n}`, with `c_ij = α_{n+1−i, n+1−j}` (α defaults to zero).
pub fn qweyl(n: usize, alpha: Option<&[Vec<i64>]>) -> Result<Preset, KacMoodyError> {
    let zero = vec![vec![0i64; n]; n];
    let alpha = alpha.unwrap_or(&zero);
    let big = 2 * n;
    let c = |i: usize, j: usize| alpha[n - i][n - j]; // 1-based i, j
    let prime = |l: usize| big + 1 - l;
    let mut entries = Vec::new();
    for i in 1..=big {
        for j in 1..i {
            // doubled exponent of λ_ij, i > j
            let v = if i <= n {
                2 * c(i, j)
            } else if j > n {
                // x_j x_i = q^{1 + c_{j'i'}} x_i x_j
                -2 * (1 + c(prime(j), prime(i)))
            } else if i < prime(j) {
                -2 * c(prime(i), j)
            } else if i == prime(j) {
                2
            } else {
                2 * (1 - c(prime(i), j))
            };
            entries.push((i, j, v));
        }
    }
    let mut rels_text = Vec::new();
    for j in 1..=n {
        let sign = if (n + 1 - j).is_multiple_of(2) { "" } else { "-" };
        let mut t = format!("{sign}q^({}/2)*(q - 1)", n - j);
        for l in j + 1..=n {
            let s = if (l - j) % 2 == 0 { "+" } else { "-" };
            t.push_str(&format!(" {s} (q - 1)*q^({}/2)*x{l}*x{}", l - j, prime(l)));
        }
        rels_text.push((prime(j), j, t));
    }
    let rels: Vec<Relation> = rels_text.iter().map(|(k, j, t)| (*k, *j, t.as_str())).collect();
    let degrees = (1..=big)
        .map(|i| {
            let mut v = vec![0; n];
            if i <= n {
                v[n - i] = -1;
            } else {
                v[i - n - 1] = 1;
            }
            v
        })
        .collect();
    let p = assemble(lower(big, &entries), vec![-2; big], degrees, &rels)?;
    let r = SkewExponentMatrix::from_lower(big, |i, j| {
        let (i, j) = (i + 1, j + 1);
        if i <= n {
            c(i, j)
        } else if j <= n && j >= prime(i) {
            1
        } else {
            0
        }
    });
    let mut quiver: Vec<(usize, usize)> = (1..=n).map(|i| (prime(i) - 1, i - 1)).collect();
    quiver.extend((1..n).map(|i| (i - 1, big - i - 1)));
    quiver.sort_unstable();
    let fixtures = Fixtures {
        levels: Some((1..=n).map(|j| vec![j - 1, prime(j) - 1]).collect()),
        r: Some(r),
        quiver: Some(quiver),
        ..Default::default()
    };
    Ok(Preset { name: format!("qweyl:{n}"), presentation: p, fixtures, cartan: None })
}

/// The quantized Weyl algebra on `w_n, …, w_1, v_1, …, v_n` before rescaling.
pub fn qweyl_raw(n: usize) -> Result<CGLPresentation, KacMoodyError> {
    let q = qweyl(n, None)?.presentation;
    let big = 2 * n;
    let mut rels_text = Vec::new();
    for j in 1..=n {
        // v_j w_j = q w_j v_j + 1 + (q − 1) Σ_{l<j} w_l v_l ; w_l is z_{n+1−l}, v_l is z_{n+l}
        let mut t = String::from("1");
        for l in 1..j {
            t.push_str(&format!(" + (q - 1)*x{}*x{}", n + 1 - l, n + l));
        }
        rels_text.push((n + j, n + 1 - j, t));
    }
    let rels: Vec<Relation> = rels_text.iter().map(|(k, j, t)| (*k, *j, t.as_str())).collect();
    assemble(q.lambda().clone(), vec![-2; big], q.degrees().to_vec(), &rels)
}

/// The scalars turning [`qweyl_raw`] into [`qweyl`]: `(q−1)` on the `w`'s,
/// `(−1)^i q^{(i−1)/2}` on `v_i`.
pub fn qweyl_raw_scaling(n: usize) -> Vec<LaurentScalar> {
    let mut t = vec![&LaurentScalar::q() - &LaurentScalar::one(); n];
    for i in 1..=n {
        let s = LaurentScalar::q_pow2(i as i64 - 1);
        t.push(if i % 2 == 0 { s } else { -s });
    }
    t
}

/// `x_2 x_1 = q^{-1} x_1 x_2 − q^{-1}`, the two-generator quantized Weyl algebra
/// whose prime `y_2` is not integral.
pub fn a1q() -> CGLPresentation {
    assemble(SkewExponentMatrix::from_lower(2, |_, _| -2), vec![2, 2], vec![vec![1], vec![-1]], &[(2, 1, "-q^-1")])
        .expect("well-formed")
}

#[cfg(test)]
mod tests {
    use super::*;

    fn roots_q(c: &CartanDatum, w: &[usize]) -> Vec<Vec<i64>> {
        root_sequence(c, &ReducedWord(w.to_vec())).unwrap().into_iter().map(|b| b.q_part).collect()
    }

    #[test]
    fn root_sequences() {
        assert_eq!(roots_q(&CartanDatum::b2(), &[0, 1, 0, 1]), vec![vec![1, 0], vec![1, 1], vec![1, 2], vec![0, 1]]);
        assert_eq!(
            roots_q(&CartanDatum::a2_twisted(), &[0, 1, 0, 1, 0]),
            vec![vec![1, 0], vec![4, 1], vec![3, 1], vec![8, 3], vec![5, 2]]
        );
        let c = CartanDatum::b2();
        assert_eq!(root_sequence(&c, &ReducedWord(vec![0, 0])), Err(KacMoodyError::NotReduced(1)));
        assert_eq!(root_sequence(&c, &ReducedWord(vec![0, 1, 0, 1, 0])), Err(KacMoodyError::NotReduced(4)));
    }

    #[test]
    fn pairings() {
        let c = CartanDatum::a2_twisted();
        let a = |i| Weight::simple_root(2, i);
        assert_eq!(pairing(&c, &a(0), &a(1)).unwrap(), HalfInt::from_int(-4));
        assert_eq!(pairing(&c, &a(1), &a(1)).unwrap(), HalfInt::from_int(8));
        assert_eq!(pairing(&c, &Weight::fundamental(2, 1), &a(1)).unwrap(), HalfInt::from_int(4));
        assert_eq!(pairing(&c, &Weight::fundamental(2, 0), &a(1)).unwrap(), HalfInt::ZERO);
        let f = Weight::fundamental(2, 0);
        assert_eq!(pairing(&c, &f, &f), Err(KacMoodyError::UndefinedPairing));
    }

    #[test]
    fn bad_cartan() {
        assert!(CartanDatum::new(vec![vec![2, -1], vec![-2, 2]], vec![1, 1], 1).is_err());
        assert!(CartanDatum::new(vec![vec![2, 1], vec![1, 2]], vec![1, 1], 1).is_err());
    }

    #[test]
    fn a2_twisted_blueprint() {
        let bp = blueprint(&CartanDatum::a2_twisted(), &ReducedWord(vec![0, 1, 0, 1, 0])).unwrap();
        let cols: Vec<Vec<i64>> = bp.btilde.ex().iter().map(|&k| bp.btilde.column(k).unwrap()).collect();
        assert_eq!(cols, vec![vec![0, 1, -1, 0, 0], vec![-4, 0, 4, -1, 0], vec![1, -1, 0, 1, -1]]);
        assert_eq!(bp.lambda.get(1, 0), 8);
        assert_eq!(bp.a_scalars[0][2], HalfInt::from_int(2));
        assert_eq!(bp.exw, vec![0, 1, 2]);
    }
}
