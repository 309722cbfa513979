//! Homogeneous prime elements, the level function η, normalization, and the
//! quantum seeds attached to permutations in Ξ_N.

use std::collections::{BTreeSet, HashMap, VecDeque};
use std::sync::Mutex;

use num_traits::ToPrimitive;
use serde::Serialize;
use thiserror::Error;

use crate::linalg::{as_integer, solve_f2, solve_integer, solve_rational_int, Solution};
use crate::ore::{CGLPresentation, DRing, OreError, PBWElement};
use crate::qtorus::{frame_monomial, FrameSpec, SkewExponentMatrix, TorusError};
use crate::scalars::{Coeff, HalfInt, LaurentScalar, RatFunc, UnitMonomial};
use crate::seed::{mutate_seed, reindex_seed, validate_seed, ExchangeMatrix, QuantumSeed, SeedError};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum PrimesError {
    #[error("no predecessor found for x{}", .0 + 1)]
    NoPredecessorFound(usize),
    #[error("several candidate predecessors for x{}: {:?}", .0 + 1, .1)]
    MultiplePredecessors(usize, Vec<usize>),
    #[error("the correction term for x{} is not divisible in the coefficient ring", .0 + 1)]
    InexactDivision(usize),
    #[error("condition (A) fails: lambda_{}{} has an odd exponent", .0 + 1, .1 + 1)]
    ConditionAFailure(usize, usize),
    #[error("condition (B) fails: {0}")]
    ConditionBFailure(String),
    #[error("s^{}({}) is undefined", .1, .0 + 1)]
    ChainTooShort(usize, usize),
    #[error("no interval prime with the expected leading term for [{}, s^{}]", .0 + 1, .1)]
    LeadingTermNotFound(usize, usize),
    #[error("normalization condition fails at index {}", .0 + 1)]
    CondViolated(usize),
    #[error("exchange column {} is not unique", .0 + 1)]
    NonUniqueColumn(usize),
    #[error("exchange column {} is not integral", .0 + 1)]
    NonIntegralColumn(usize),
    #[error("no exchange column {} solves the compatibility equations", .0 + 1)]
    NoColumnSolution(usize),
    #[error("permutation is not in Xi_N")]
    NotInXi,
    #[error("permutations are not adjacent")]
    NotAdjacent,
    #[error("frame has unrealized variables")]
    UnrealizedFrame,
    #[error("assembled seed is not compatible: {0}")]
    SeedInvalid(String),
    #[error(transparent)]
    Ore(#[from] OreError),
    #[error(transparent)]
    Seed(#[from] SeedError),
    #[error(transparent)]
    Torus(#[from] TorusError),
}

/// Levels, predecessor/successor maps and the primes `y_k` of every `R_k`.
#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(bound = "")]
pub struct EtaData<C: Coeff = LaurentScalar> {
    pub eta: Vec<usize>,
    pub pred: Vec<Option<usize>>,
    pub succ: Vec<Option<usize>>,
    pub o_minus: Vec<usize>,
    pub o_plus: Vec<usize>,
    pub y: Vec<PBWElement<C>>,
    pub c: Vec<Option<PBWElement<C>>>,
}

impl<C: Coeff> EtaData<C> {
    pub fn n(&self) -> usize {
        self.eta.len()
    }

    pub fn rank(&self) -> usize {
        self.eta.iter().max().map_or(0, |m| m + 1)
    }

    /// Members of each level, in increasing order.
    pub fn levels(&self) -> Vec<Vec<usize>> {
        let mut out = vec![Vec::new(); self.rank()];
        for (k, &l) in self.eta.iter().enumerate() {
            out[l].push(k);
        }
        out
    }

    pub fn s_pow(&self, i: usize, m: usize) -> Option<usize> {
        (0..m).try_fold(i, |k, _| self.succ[k])
    }

    /// `ē_k = e_k + e_{p(k)} + e_{p²(k)} + ⋯`.
    pub fn chain_vector(&self, k: usize) -> Vec<i64> {
        let mut v = vec![0; self.n()];
        let mut cur = Some(k);
        while let Some(c) = cur {
            v[c] = 1;
            cur = self.pred[c];
        }
        v
    }

    /// `e_{[i, s^m(i)]}`.
    pub fn interval_vector(&self, i: usize, m: usize) -> Option<Vec<i64>> {
        let mut v = vec![0; self.n()];
        let mut cur = i;
        v[i] = 1;
        for _ in 0..m {
            cur = self.succ[cur]?;
            v[cur] = 1;
        }
        Some(v)
    }
}

/// The unit `u` with `a·b = u·b·a`, if `a` and `b` quasi-commute.
pub fn quasi_commutation_scalar<C: Coeff>(p: &CGLPresentation<C>, a: &PBWElement<C>, b: &PBWElement<C>) -> Option<C> {
    let ab = p.multiply(a, b);
    let ba = p.multiply(b, a);
    if ab.is_zero() && ba.is_zero() {
        return Some(C::one());
    }
    let (ca, fa) = ab.leading_term().ok()?;
    let (cb, fb) = ba.leading_term().ok()?;
    if fa != fb {
        return None;
    }
    let u = ca.try_div(&cb)?;
    (ab == ba.scale(&u)).then_some(u)
}

fn normal_up_to<C: Coeff>(p: &CGLPresentation<C>, z: &PBWElement<C>, k: usize) -> bool {
    (0..=k).all(|i| quasi_commutation_scalar(p, z, &p.gen(i)).is_some())
}

/// Run the predecessor recursion: `y_k = y_{p(k)} x_k − c_k` or `y_k = x_k`.
pub fn eta_and_primes<C: Coeff>(p: &CGLPresentation<C>) -> Result<EtaData<C>, PrimesError> {
    let n = p.n();
    let mut d = EtaData {
        eta: Vec::with_capacity(n),
        pred: vec![None; n],
        succ: vec![None; n],
        o_minus: vec![0; n],
        o_plus: vec![0; n],
        y: Vec::with_capacity(n),
        c: Vec::with_capacity(n),
    };
    let mut levels = 0;
    for k in 0..n {
        if !p.has_delta(k) {
            d.eta.push(levels);
            levels += 1;
            d.y.push(p.gen(k));
            d.c.push(None);
            continue;
        }
        let lk = C::from_laurent(&(LaurentScalar::q_pow2(p.lambda_k_exp2(k)) - LaurentScalar::one()));
        let mut passing = Vec::new();
        let mut inexact = false;
        for j in (0..k).filter(|&j| d.succ[j].is_none()) {
            let delta = p.skew_delta(k, &d.y[j])?;
            let chain = d.chain_vector(j);
            let shift: i64 = (0..k).filter(|&m| chain[m] == 1).map(|m| p.lambda_exp2(k, m)).sum();
            let divisor = lk.mul_q(shift);
            let mut c = PBWElement::zero(n);
            let mut ok = true;
            for (f, coef) in delta.terms() {
                match coef.try_div(&divisor) {
                    Some(v) => c = c.add(&PBWElement::monomial(n, f.to_vec(), v)),
                    None => {
                        ok = false;
                        break;
                    }
                }
            }
            if !ok {
                inexact = true;
                continue;
            }
            let z = p.multiply(&d.y[j], &p.gen(k)).sub(&c);
            if normal_up_to(p, &z, k) {
                passing.push((j, z, c));
            }
        }
        match passing.len() {
            1 => {
                let (j, z, c) = passing.pop().unwrap();
                d.eta.push(d.eta[j]);
                d.pred[k] = Some(j);
                d.succ[j] = Some(k);
                d.o_minus[k] = d.o_minus[j] + 1;
                d.y.push(z);
                d.c.push(Some(c));
            }
            0 if inexact => return Err(PrimesError::InexactDivision(k)),
            0 => return Err(PrimesError::NoPredecessorFound(k)),
            _ => return Err(PrimesError::MultiplePredecessors(k, passing.iter().map(|t| t.0).collect())),
        }
    }
    for k in (0..n).rev() {
        d.o_plus[k] = d.succ[k].map_or(0, |s| d.o_plus[s] + 1);
    }
    Ok(d)
}

/// `ν` with `ν² = λ` (doubled exponents halved), or the first odd entry.
pub fn nu_matrix<C: Coeff>(p: &CGLPresentation<C>) -> Result<SkewExponentMatrix, PrimesError> {
    let n = p.n();
    for k in 0..n {
        for j in 0..k {
            if p.lambda_exp2(k, j) % 2 != 0 {
                return Err(PrimesError::ConditionAFailure(k, j));
            }
        }
    }
    Ok(SkewExponentMatrix::from_lower(n, |k, j| p.lambda_exp2(k, j) / 2))
}

/// Positive integers `d_l` per level with `λ_k^{d_η(l)} = λ_l^{d_η(k)}`.
pub fn solve_condition_b<C: Coeff>(p: &CGLPresentation<C>, e: &EtaData<C>) -> Result<Vec<i64>, PrimesError> {
    let mut exps: Vec<Option<i64>> = vec![None; e.rank()];
    for k in 0..e.n() {
        if e.pred[k].is_none() {
            continue;
        }
        let v = p.lambda_k_exp2(k);
        let l = e.eta[k];
        match exps[l] {
            None => exps[l] = Some(v),
            Some(w) if w != v => {
                return Err(PrimesError::ConditionBFailure(format!("lambda_k differs along level of x{}", k + 1)))
            }
            _ => {}
        }
    }
    let present: Vec<i64> = exps.iter().flatten().copied().collect();
    if present.contains(&0) || (present.iter().any(|&v| v > 0) && present.iter().any(|&v| v < 0)) {
        return Err(PrimesError::ConditionBFailure("lambda_k exponents do not share a sign".into()));
    }
    let g = present.iter().fold(0i64, |g, &v| num_integer::gcd(g, v.abs()));
    Ok(exps.iter().map(|v| v.map_or(1, |v| v.abs() / g)).collect())
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Default)]
pub enum Orientation {
    /// `u` exactly as the defining formula reads.
    #[default]
    Literal,
    /// `−u`.
    Negated,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(bound = "")]
pub struct UReport<C: Coeff = LaurentScalar> {
    pub i: usize,
    pub m: usize,
    pub u: PBWElement<C>,
    pub pi: C,
    pub f: Vec<u32>,
    pub required_exp2: i64,
    pub literal_pass: bool,
    pub negated_pass: bool,
}

impl<C: Coeff> UReport<C> {
    pub fn passes(&self, o: Orientation) -> bool {
        match o {
            Orientation::Literal => self.literal_pass,
            Orientation::Negated => self.negated_pass,
        }
    }

    pub fn leading_coefficient(&self, o: Orientation) -> C {
        match o {
            Orientation::Literal => self.pi.clone(),
            Orientation::Negated => self.pi.neg(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub enum RescaleOutcome {
    /// `t_j` such that the rescaled presentation is normalized.
    Solved(Vec<UnitMonomial>),
    /// Exponents can be fixed but signs cannot; the exponent-only rescaling is attached.
    SignObstruction {
        exponents_exp2: Vec<i64>,
    },
    ExponentObstruction,
    NonUnit(usize),
}

#[derive(Clone, Debug, Default, Serialize)]
pub struct SeedOptions {
    pub orientation: Orientation,
    pub require_cond: bool,
    /// Invertible frozen indices, in σ-coordinates.
    pub inv: Vec<usize>,
}

/// A presentation together with its levels, normalization and interval primes.
pub struct CglStructure<C: Coeff = LaurentScalar> {
    pub presentation: CGLPresentation<C>,
    pub eta: EtaData<C>,
    pub nu: SkewExponentMatrix,
    pub ybar: Vec<PBWElement<C>>,
    pub cond_b: Result<Vec<i64>, PrimesError>,
    intervals: Mutex<HashMap<(usize, usize), PBWElement<C>>>,
}

impl<C: Coeff> CglStructure<C> {
    pub fn new(p: CGLPresentation<C>) -> Result<Self, PrimesError> {
        let eta = eta_and_primes(&p)?;
        let nu = nu_matrix(&p)?;
        let ybar = (0..p.n()).map(|j| eta.y[j].mul_q(nu.ordered_scalar_exp2(&eta.chain_vector(j)))).collect();
        let cond_b = solve_condition_b(&p, &eta);
        Ok(CglStructure { presentation: p, eta, nu, ybar, cond_b, intervals: Mutex::new(HashMap::new()) })
    }

    pub fn n(&self) -> usize {
        self.presentation.n()
    }

    /// `y_{[i, s^m(i)]}`, the prime of the interval subalgebra with leading term `x_i x_{s(i)} ⋯`.
    pub fn interval_prime(&self, i: usize, m: usize) -> Result<PBWElement<C>, PrimesError> {
        let top = self.eta.s_pow(i, m).ok_or(PrimesError::ChainTooShort(i, m))?;
        if m == 0 {
            return Ok(self.presentation.gen(i));
        }
        if let Some(v) = self.intervals.lock().unwrap().get(&(i, m)) {
            return Ok(v.clone());
        }
        let found = if self.eta.pred[i].is_none() {
            // a chain starting at the bottom of its level gives y_top itself
            self.eta.y[top].clone()
        } else {
            let view = self.presentation.interval_view(i, top)?;
            let sub = eta_and_primes(&view.presentation)?;
            let target = self.eta.interval_vector(i, m).unwrap();
            let target: Vec<u32> = target[i..=top].iter().map(|&v| v as u32).collect();
            let y = sub
                .y
                .iter()
                .find(|y| y.leading_term().map(|(_, f)| f == target).unwrap_or(false))
                .ok_or(PrimesError::LeadingTermNotFound(i, m))?;
            view.lift(y)
        };
        self.intervals.lock().unwrap().insert((i, m), found.clone());
        Ok(found)
    }

    /// `ȳ_{[i, s^m(i)]} = 𝒮_ν(e_{[i, s^m(i)]}) · y_{[i, s^m(i)]}`.
    pub fn interval_prime_bar(&self, i: usize, m: usize) -> Result<PBWElement<C>, PrimesError> {
        let v = self.eta.interval_vector(i, m).ok_or(PrimesError::ChainTooShort(i, m))?;
        Ok(self.interval_prime(i, m)?.mul_q(self.nu.ordered_scalar_exp2(&v)))
    }

    /// The element `u_{[i, s^m(i)]}` and both orientations of the normalization test.
    pub fn u_and_cond(&self, i: usize, m: usize) -> Result<UReport<C>, PrimesError> {
        if m == 0 {
            return Err(PrimesError::ChainTooShort(i, 0));
        }
        let s = self.eta.succ[i].ok_or(PrimesError::ChainTooShort(i, 1))?;
        self.eta.s_pow(i, m).ok_or(PrimesError::ChainTooShort(i, m))?;
        let p = &self.presentation;
        let a = self.interval_prime(i, m - 1)?;
        let b = self.interval_prime(s, m - 1)?;
        let c = if m == 1 { p.one() } else { self.interval_prime(s, m - 2)? };
        let whole = self.interval_prime(i, m)?;
        let omega: i64 = (1..m).map(|l| p.lambda_exp2(i, self.eta.s_pow(i, l).unwrap())).sum();
        let u = p.multiply(&a, &b).sub(&p.multiply(&c, &whole).mul_q(omega));
        let (pi, f) = u.leading_term()?;
        let mut v: Vec<i64> = f.iter().map(|&x| x as i64).collect();
        v[i] -= 1;
        let mut required = self.nu.ordered_scalar_exp2(&v);
        if m >= 2 {
            let tail = self.eta.interval_vector(s, m - 1).unwrap();
            required -= 2 * self.nu.ordered_scalar_exp2(&tail);
        }
        let target = C::q_pow2(required);
        Ok(UReport {
            i,
            m,
            literal_pass: pi == target,
            negated_pass: pi.neg() == target,
            u,
            pi,
            f,
            required_exp2: required,
        })
    }

    /// One report per `i` with `s(i)` defined, `m = 1`.
    pub fn cond_table(&self) -> Result<Vec<UReport<C>>, PrimesError> {
        (0..self.n()).filter(|&i| self.eta.succ[i].is_some()).map(|i| self.u_and_cond(i, 1)).collect()
    }

    /// Unit rescaling `x_j ↦ t_j x_j` making every `m = 1` condition hold.
    pub fn solve_normalizing_rescale(&self, o: Orientation) -> Result<RescaleOutcome, PrimesError> {
        let n = self.n();
        let table = self.cond_table()?;
        let mut a_int = Vec::new();
        let mut b_int = Vec::new();
        let mut a_f2 = Vec::new();
        let mut b_f2 = Vec::new();
        for r in &table {
            let pi = r.leading_coefficient(o);
            let Some(u) = pi.unit_monomial() else { return Ok(RescaleOutcome::NonUnit(r.i)) };
            let s = self.eta.succ[r.i].unwrap();
            let mut row = vec![0i64; n];
            row[r.i] += 1;
            row[s] += 1;
            for (j, &fj) in r.f.iter().enumerate() {
                row[j] -= fj as i64;
            }
            a_f2.push(row.iter().map(|v| (v.rem_euclid(2)) as u8).collect());
            b_f2.push(u8::from(u.sign < 0));
            a_int.push(row);
            b_int.push(r.required_exp2 - u.exponent.twice());
        }
        let Some(tau) = solve_integer(&a_int, &b_int, n) else { return Ok(RescaleOutcome::ExponentObstruction) };
        let tau: Vec<i64> = tau.iter().map(|v| v.to_i64().expect("small exponent")).collect();
        match solve_f2(&a_f2, &b_f2, n) {
            None => Ok(RescaleOutcome::SignObstruction { exponents_exp2: tau }),
            Some(eps) => Ok(RescaleOutcome::Solved(
                (0..n)
                    .map(|j| UnitMonomial::new(if eps[j] == 1 { -1 } else { 1 }, HalfInt::from_twice(tau[j])))
                    .collect(),
            )),
        }
    }

    /// Rescaling over the coefficient field itself, for leading coefficients that
    /// are not units. Each condition row is inverted over ℤ, and the scalars
    /// `required/π` are combined with those integer weights.
    pub fn field_normalizing_rescale(&self, o: Orientation) -> Result<Option<Vec<C>>, PrimesError> {
        let n = self.n();
        let table = self.cond_table()?;
        let rows: Vec<Vec<i64>> = table
            .iter()
            .map(|r| {
                let s = self.eta.succ[r.i].unwrap();
                let mut row = vec![0i64; n];
                row[r.i] += 1;
                row[s] += 1;
                for (j, &fj) in r.f.iter().enumerate() {
                    row[j] -= fj as i64;
                }
                row
            })
            .collect();
        let mut t = vec![C::one(); n];
        for (idx, r) in table.iter().enumerate() {
            let Some(ratio) = C::q_pow2(r.required_exp2).try_div(&r.leading_coefficient(o)) else { return Ok(None) };
            let e: Vec<i64> = (0..rows.len()).map(|m| i64::from(m == idx)).collect();
            let Some(w) = solve_integer(&rows, &e, n) else { return Ok(None) };
            let Some(inv) = C::one().try_div(&ratio) else { return Ok(None) };
            for (j, wj) in w.iter().enumerate() {
                let wj = wj.to_i64().expect("small weight");
                let base = if wj >= 0 { &ratio } else { &inv };
                for _ in 0..wj.unsigned_abs() {
                    t[j] = t[j].mul(base);
                }
            }
        }
        Ok(Some(t))
    }

    /// `λ*_j` (doubled exponent) read off the reversed presentation.
    pub fn lambda_star_exp2(&self) -> Result<Vec<Option<i64>>, PrimesError> {
        let n = self.n();
        let rev: Vec<usize> = (0..n).rev().collect();
        let r = self.presentation.sigma_presentation(&rev)?;
        Ok((0..n).map(|j| r.has_delta(n - 1 - j).then(|| r.lambda_k_exp2(n - 1 - j))).collect())
    }

    /// The seed attached to `σ ∈ Ξ_N`.
    pub fn build_seed(&self, sigma: &[usize], opts: &SeedOptions) -> Result<QuantumSeed<C>, PrimesError> {
        let n = self.n();
        if sigma.len() != n || !is_in_xi(sigma) {
            return Err(PrimesError::NotInXi);
        }
        if opts.require_cond {
            for r in self.cond_table()? {
                if !r.passes(opts.orientation) {
                    return Err(PrimesError::CondViolated(r.i));
                }
            }
        }
        let d = self.cond_b.clone()?;
        let p = &self.presentation;
        let rdeg = p.degrees().first().map_or(0, Vec::len);
        let mut sets: Vec<Vec<usize>> = Vec::with_capacity(n);
        let mut variables = Vec::with_capacity(n);
        let mut degrees = Vec::with_capacity(n);
        let mut labels = Vec::with_capacity(n);
        for k in 0..n {
            let lvl = self.eta.eta[sigma[k]];
            let mut a: Vec<usize> = sigma[..=k].iter().copied().filter(|&i| self.eta.eta[i] == lvl).collect();
            a.sort_unstable();
            let (lo, hi) = (a[0], *a.last().unwrap());
            let m = a.len() - 1;
            debug_assert_eq!(self.eta.s_pow(lo, m), Some(hi));
            variables.push(Some(self.interval_prime_bar(lo, m)?));
            degrees.push((0..rdeg).map(|t| a.iter().map(|&i| p.degrees()[i][t]).sum()).collect());
            labels.push(if m == 0 { format!("y[{}]", lo + 1) } else { format!("y[{},{}]", lo + 1, hi + 1) });
            sets.push(a);
        }
        let r = SkewExponentMatrix::from_lower(n, |k, j| {
            sets[k].iter().flat_map(|&i| sets[j].iter().map(move |&l| (i, l))).map(|(i, l)| self.nu.get(i, l)).sum()
        });
        let ex: Vec<usize> =
            (0..n).filter(|&l| (l + 1..n).any(|k| self.eta.eta[sigma[k]] == self.eta.eta[sigma[l]])).collect();
        let levels = self.eta.levels();
        let mut cols = Vec::new();
        for &l in &ex {
            let lvl = self.eta.eta[sigma[l]];
            let i0 = levels[lvl][0];
            let star = -p.lambda_k_exp2(self.eta.succ[i0].expect("exchangeable level has a successor"));
            let mut a = Vec::new();
            let mut b = Vec::new();
            for j in 0..n {
                a.push((0..n).map(|i| 2 * r.get(i, j)).collect::<Vec<i64>>());
                b.push(if j == l { star } else { 0 });
            }
            for t in 0..rdeg {
                a.push(degrees.iter().map(|dg: &Vec<i64>| dg[t]).collect());
                b.push(0);
            }
            let col = match solve_rational_int(&a, &b, n) {
                Solution::Unique(x) => x,
                Solution::Many(..) => return Err(PrimesError::NonUniqueColumn(l)),
                Solution::Inconsistent => return Err(PrimesError::NoColumnSolution(l)),
            };
            let col: Option<Vec<i64>> = col.iter().map(|v| as_integer(v).and_then(|z| z.to_i64())).collect();
            cols.push((l, col.ok_or(PrimesError::NonIntegralColumn(l))?));
        }
        let seed = QuantumSeed {
            frame: FrameSpec { matrix: r, variables, degrees, labels },
            btilde: ExchangeMatrix::from_columns(n, cols)?,
            inv: opts.inv.clone(),
            symmetrizers: ex.iter().map(|&l| (l, d[self.eta.eta[sigma[l]]])).collect(),
        };
        let rep = validate_seed(&seed);
        if !rep.passed {
            return Err(PrimesError::SeedInvalid(rep.message));
        }
        Ok(seed)
    }

    /// Compare the seeds of adjacent `σ, σ'` through relabelling or one mutation.
    pub fn verify_mutation_chain(
        &self,
        sigma: &[usize],
        sigma2: &[usize],
        opts: &SeedOptions,
    ) -> Result<ChainReport, PrimesError> {
        let n = self.n();
        let k = (0..n.saturating_sub(1))
            .find(|&k| {
                sigma2[k] == sigma[k + 1]
                    && sigma2[k + 1] == sigma[k]
                    && (0..n).all(|i| i == k || i == k + 1 || sigma[i] == sigma2[i])
            })
            .ok_or(PrimesError::NotAdjacent)?;
        let a = self.build_seed(sigma, opts)?;
        let b = self.build_seed(sigma2, opts)?;
        let mut tau: Vec<usize> = (0..n).collect();
        tau.swap(k, k + 1);
        let mutation = self.eta.eta[sigma[k]] == self.eta.eta[sigma[k + 1]];
        let expected = if mutation {
            let plus = mutate_seed(&a, k, 1, Some(&self.presentation))?;
            let minus = mutate_seed(&a, k, -1, Some(&self.presentation))?;
            if plus.frame.variables[k] != minus.frame.variables[k] {
                return Ok(ChainReport::new(
                    sigma,
                    sigma2,
                    k,
                    mutation,
                    Some("the two signs give different variables".into()),
                ));
            }
            plus
        } else {
            reindex_seed(&a, &tau)?
        };
        let mismatch = compare_seeds(&expected, &b);
        Ok(ChainReport::new(sigma, sigma2, k, mutation, mismatch))
    }

    /// Expand `elem` as a Laurent polynomial in the seed's frame, with denominators
    /// only on `ex ∪ inv`.
    pub fn laurent_membership(
        &self,
        seed: &QuantumSeed<C>,
        elem: &PBWElement<C>,
        bounds: LaurentBounds,
    ) -> Result<Option<LaurentExpansion<C>>, PrimesError> {
        laurent_membership(&self.presentation, seed, elem, bounds)
    }
}

fn compare_seeds<C: Coeff>(a: &QuantumSeed<C>, b: &QuantumSeed<C>) -> Option<String> {
    for k in 0..a.frame.n() {
        if a.frame.variables[k] != b.frame.variables[k] {
            return Some(format!("variable {} differs", k + 1));
        }
    }
    if a.frame.matrix != b.frame.matrix {
        return Some("quasi-commutation matrices differ".into());
    }
    if a.btilde != b.btilde {
        return Some("exchange matrices differ".into());
    }
    None
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ChainReport {
    pub sigma: Vec<usize>,
    pub sigma2: Vec<usize>,
    pub k: usize,
    pub mutation: bool,
    pub passed: bool,
    pub mismatch: Option<String>,
}

impl ChainReport {
    fn new(sigma: &[usize], sigma2: &[usize], k: usize, mutation: bool, mismatch: Option<String>) -> Self {
        ChainReport {
            sigma: sigma.to_vec(),
            sigma2: sigma2.to_vec(),
            k,
            mutation,
            passed: mismatch.is_none(),
            mismatch,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct LaurentBounds {
    /// Largest denominator exponent tried on `ex ∪ inv`.
    pub cap: i64,
    /// Upper bound on every exponent; `None` uses the element's support plus 3.
    pub upper: Option<i64>,
}

impl Default for LaurentBounds {
    fn default() -> Self {
        LaurentBounds { cap: 3, upper: None }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(bound = "")]
pub struct LaurentExpansion<C: Coeff = LaurentScalar> {
    pub denominator: Vec<i64>,
    /// `(f, a_f)` with `elem = Σ a_f M(f)`.
    pub terms: Vec<(Vec<i64>, C)>,
}

enum Peel<C> {
    Done(Vec<(Vec<i64>, C)>),
    /// An integral exponent with negative entries: more denominator is needed there.
    Deficit(Vec<i64>),
    Fail,
}

/// Greedy decomposition of `e` in the monomials `M(g)`. The leading monomials of
/// the `M(g)` are distinct, so the greedy pass is exact.
fn decompose<C: Coeff>(
    p: &CGLPresentation<C>,
    frame: &FrameSpec<C>,
    lead: &[Vec<i64>],
    e: &PBWElement<C>,
) -> Result<Peel<C>, PrimesError> {
    let n = frame.n();
    let mut rem = e.clone();
    let mut out = Vec::new();
    while !rem.is_zero() {
        let (c, h) = rem.leading_term()?;
        let h: Vec<i64> = h.iter().map(|&v| v as i64).collect();
        let Solution::Unique(g) = solve_rational_int(lead, &h, n) else { return Ok(Peel::Fail) };
        let Some(g) = g.iter().map(|v| as_integer(v).and_then(|z| z.to_i64())).collect::<Option<Vec<i64>>>() else {
            return Ok(Peel::Fail);
        };
        if g.iter().any(|&v| v < 0) {
            return Ok(Peel::Deficit(g));
        }
        let mg = frame_monomial(p, frame, &g)?;
        let (lc, _) = mg.leading_term()?;
        let Some(coef) = c.try_div(&lc) else { return Ok(Peel::Fail) };
        rem.add_scaled(&mg, &coef.neg());
        out.push((g, coef));
    }
    Ok(Peel::Done(out))
}

/// Expand `elem` in the seed's mixed torus. The denominator `M(D)` starts at zero
/// and is raised by each deficit the greedy pass reports; since Laurent expansions
/// are unique, this finds the least admissible `D`.
pub fn laurent_membership<C: Coeff>(
    p: &CGLPresentation<C>,
    seed: &QuantumSeed<C>,
    elem: &PBWElement<C>,
    bounds: LaurentBounds,
) -> Result<Option<LaurentExpansion<C>>, PrimesError> {
    let frame = &seed.frame;
    if !frame.is_realized() {
        return Err(PrimesError::UnrealizedFrame);
    }
    let n = frame.n();
    // lead[i][k] = i-th exponent of the leading monomial of M(e_k)
    let mut lead = vec![vec![0i64; n]; p.n()];
    for k in 0..n {
        let (_, f) = frame.variable(k)?.leading_term()?;
        for (i, &v) in f.iter().enumerate() {
            lead[i][k] = v as i64;
        }
    }
    let upper = bounds
        .upper
        .unwrap_or_else(|| elem.terms().flat_map(|(f, _)| f.iter().map(|&v| v as i64)).max().unwrap_or(0) + 3);
    let denom_idx: BTreeSet<usize> = seed.btilde.ex().iter().chain(&seed.inv).copied().collect();
    let mut dvec = vec![0i64; n];
    loop {
        let md = frame_monomial(p, frame, &dvec)?;
        match decompose(p, frame, &lead, &p.multiply(elem, &md))? {
            Peel::Fail => return Ok(None),
            Peel::Deficit(g) => {
                for (i, &v) in g.iter().enumerate() {
                    if v < 0 {
                        if !denom_idx.contains(&i) {
                            return Ok(None);
                        }
                        dvec[i] -= v;
                        if dvec[i] > bounds.cap {
                            return Ok(None);
                        }
                    }
                }
            }
            Peel::Done(parts) => {
                let mut terms = Vec::new();
                for (g, a) in parts {
                    let w = frame.matrix.bicharacter(&g, &dvec)?.twice();
                    let f: Vec<i64> = g.iter().zip(&dvec).map(|(x, y)| x - y).collect();
                    terms.push((f, a.mul_q(-w)));
                }
                if terms.iter().any(|(f, _)| f.iter().any(|&v| v > upper)) {
                    return Ok(None);
                }
                return Ok(Some(LaurentExpansion { denominator: dvec, terms }));
            }
        }
    }
}

/// Unit-free integral form: scalars `t_k` with `t_k x_k` generating a 𝔻-form.
pub fn integralize(p: &CGLPresentation<RatFunc>) -> Result<(Vec<LaurentScalar>, CGLPresentation), PrimesError> {
    let n = p.n();
    // Already a 𝔻-form, primes included: nothing to clear.
    if let Some(integral) = p.map_coeffs(|c| c.to_laurent()) {
        if let Ok(e) = eta_and_primes(&integral) {
            if integral.d_form_check(&e.y, DRing::HalfPowers).passed() {
                return Ok((vec![LaurentScalar::one(); n], integral));
            }
        }
    }
    let mut t: Vec<RatFunc> = Vec::with_capacity(n);
    for k in 0..n {
        let mut b = LaurentScalar::one();
        for j in 0..k {
            if let Some(d) = p.delta(k, j) {
                for (f, c) in d.terms() {
                    let tf =
                        f.iter().enumerate().fold(RatFunc::one(), |acc, (i, &m)| (0..m).fold(acc, |a, _| a.mul(&t[i])));
                    let kappa = c.try_div(&tf).expect("nonzero scale");
                    b = crate::scalars::lcm(&b, kappa.denominator());
                }
            }
        }
        let tk =
            if p.has_delta(k) { &(LaurentScalar::q_pow2(p.lambda_k_exp2(k)) - LaurentScalar::one()) * &b } else { b };
        t.push(RatFunc::from_scalar(tk));
    }
    let scaled = p.rescale(&t)?;
    let integral = scaled.map_coeffs(|c| c.to_laurent()).ok_or(PrimesError::Ore(OreError::InexactRescale))?;
    eta_and_primes(&integral)?;
    Ok((t.iter().map(|x| x.to_laurent().unwrap()).collect(), integral))
}

/// Every prefix of `σ` is an interval.
pub fn is_in_xi(sigma: &[usize]) -> bool {
    let Some(&first) = sigma.first() else { return true };
    let (mut lo, mut hi) = (first, first);
    if first >= sigma.len() {
        return false;
    }
    for &s in &sigma[1..] {
        if s == hi + 1 && s < sigma.len() {
            hi = s;
        } else if lo > 0 && s == lo - 1 {
            lo = s;
        } else {
            return false;
        }
    }
    true
}

/// All of Ξ_N, sorted lexicographically.
pub fn enumerate_xi(n: usize) -> Vec<Vec<usize>> {
    fn grow(cur: &mut Vec<usize>, lo: usize, hi: usize, n: usize, out: &mut Vec<Vec<usize>>) {
        if cur.len() == n {
            out.push(cur.clone());
            return;
        }
        if lo > 0 {
            cur.push(lo - 1);
            grow(cur, lo - 1, hi, n, out);
            cur.pop();
        }
        if hi + 1 < n {
            cur.push(hi + 1);
            grow(cur, lo, hi + 1, n, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    for s in 0..n {
        grow(&mut vec![s], s, s, n, &mut out);
    }
    out.sort();
    out
}

/// `σ_{i,j} = [i+1, …, j, i, j+1, …, N, i−1, …, 1]` for `1 ≤ i ≤ j ≤ N`, 0-based.
pub fn gamma_subset(n: usize) -> Vec<Vec<usize>> {
    let mut set = BTreeSet::new();
    for i in 1..=n {
        for j in i..=n {
            let mut s: Vec<usize> = (i + 1..=j).collect();
            s.push(i);
            s.extend(j + 1..=n);
            s.extend((1..i).rev());
            set.insert(s.into_iter().map(|v| v - 1).collect::<Vec<_>>());
        }
    }
    set.into_iter().collect()
}

/// Shortest path in Ξ_N along adjacent transpositions.
pub fn xi_path(from: &[usize], to: &[usize]) -> Option<Vec<Vec<usize>>> {
    let n = from.len();
    let mut prev: HashMap<Vec<usize>, Vec<usize>> = HashMap::new();
    let mut queue = VecDeque::from([from.to_vec()]);
    prev.insert(from.to_vec(), from.to_vec());
    while let Some(cur) = queue.pop_front() {
        if cur == to {
            let mut path = vec![cur.clone()];
            let mut c = cur;
            while c != from {
                c = prev[&c].clone();
                path.push(c.clone());
            }
            path.reverse();
            return Some(path);
        }
        for k in 0..n.saturating_sub(1) {
            let mut nx = cur.clone();
            nx.swap(k, k + 1);
            if is_in_xi(&nx) && !prev.contains_key(&nx) {
                prev.insert(nx.clone(), cur.clone());
                queue.push_back(nx);
            }
        }
    }
    None
}

/// Distinct adjacent steps on shortest paths from the identity to each `σ ∈ Γ_N`
/// (or all of Ξ_N).
pub fn chain_steps(n: usize, all: bool) -> Vec<(Vec<usize>, Vec<usize>)> {
    let id: Vec<usize> = (0..n).collect();
    let targets = if all { enumerate_xi(n) } else { gamma_subset(n) };
    let mut steps = BTreeSet::new();
    for t in targets {
        let path = xi_path(&id, &t).expect("Xi_N is connected");
        for w in path.windows(2) {
            steps.insert((w[0].clone(), w[1].clone()));
        }
    }
    steps.into_iter().collect()
}
