//! Exact coefficients: Laurent polynomials in `s = q^{1/2}` over ℤ or 𝔽_p,
//! plus a reduced fraction type for presentations that are not yet integral.

use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, AddAssign, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::de::Error as _;
use serde::{Deserialize, Deserializer, Serialize, Serializer};
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ScalarError {
    #[error("division by zero")]
    DivisionByZero,
}

/// A half-integer, stored as twice its value.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct HalfInt(i64);

impl HalfInt {
    pub const ZERO: HalfInt = HalfInt(0);

    pub fn from_twice(twice: i64) -> Self {
        HalfInt(twice)
    }

    pub fn from_int(v: i64) -> Self {
        HalfInt(2 * v)
    }

    pub fn twice(self) -> i64 {
        self.0
    }

    pub fn is_integer(self) -> bool {
        self.0 % 2 == 0
    }
}

impl Add for HalfInt {
    type Output = HalfInt;
    fn add(self, o: HalfInt) -> HalfInt {
        HalfInt(self.0 + o.0)
    }
}

impl Sub for HalfInt {
    type Output = HalfInt;
    fn sub(self, o: HalfInt) -> HalfInt {
        HalfInt(self.0 - o.0)
    }
}

impl Neg for HalfInt {
    type Output = HalfInt;
    fn neg(self) -> HalfInt {
        HalfInt(-self.0)
    }
}

impl fmt::Display for HalfInt {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0 % 2 == 0 {
            write!(f, "{}", self.0 / 2)
        } else {
            write!(f, "{}/2", self.0)
        }
    }
}

/// `sign · q^{exponent}`, an element of the unit group ±q^{ℤ/2}.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct UnitMonomial {
    pub sign: i8,
    pub exponent: HalfInt,
}

impl UnitMonomial {
    pub fn one() -> Self {
        UnitMonomial { sign: 1, exponent: HalfInt::ZERO }
    }

    pub fn new(sign: i8, exponent: HalfInt) -> Self {
        assert!(sign == 1 || sign == -1, "unit sign must be ±1");
        UnitMonomial { sign, exponent }
    }

    pub fn q_pow2(twice: i64) -> Self {
        UnitMonomial { sign: 1, exponent: HalfInt(twice) }
    }

    pub fn inverse(self) -> Self {
        UnitMonomial { sign: self.sign, exponent: -self.exponent }
    }

    pub fn to_scalar(self) -> LaurentScalar {
        LaurentScalar::monomial(BigInt::from(self.sign), self.exponent.twice())
    }
}

impl Mul for UnitMonomial {
    type Output = UnitMonomial;
    fn mul(self, o: UnitMonomial) -> UnitMonomial {
        UnitMonomial { sign: self.sign * o.sign, exponent: self.exponent + o.exponent }
    }
}

impl fmt::Display for UnitMonomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.to_scalar())
    }
}

/// Element of ℤ[q^{±1/2}] (characteristic 0) or 𝔽_p[q^{±1/2}].
///
/// Keys are doubled exponents. A characteristic-0 value meeting a
/// characteristic-p value is reduced mod p; two distinct nonzero
/// characteristics never mix.
#[derive(Clone, Debug, Default)]
pub struct LaurentScalar {
    terms: BTreeMap<i64, BigInt>,
    characteristic: u64,
}

fn common_char(a: u64, b: u64) -> u64 {
    match (a, b) {
        (0, x) | (x, 0) => x,
        (x, y) if x == y => x,
        (x, y) => panic!("cannot mix characteristics {x} and {y}"),
    }
}

fn reduce_coeff(c: &BigInt, p: u64) -> BigInt {
    if p == 0 {
        c.clone()
    } else {
        c.mod_floor(&BigInt::from(p))
    }
}

fn inverse_mod(a: &BigInt, p: u64) -> Option<BigInt> {
    let p = BigInt::from(p);
    let e = a.mod_floor(&p).extended_gcd(&p);
    if e.gcd.is_one() {
        Some(e.x.mod_floor(&p))
    } else {
        None
    }
}

impl LaurentScalar {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn one() -> Self {
        Self::from_int(1)
    }

    pub fn from_int(v: i64) -> Self {
        Self::monomial(BigInt::from(v), 0)
    }

    /// `c · q^{twice/2}`.
    pub fn monomial(c: BigInt, twice: i64) -> Self {
        let mut terms = BTreeMap::new();
        if !c.is_zero() {
            terms.insert(twice, c);
        }
        LaurentScalar { terms, characteristic: 0 }
    }

    /// `q^{twice/2}`.
    pub fn q_pow2(twice: i64) -> Self {
        Self::monomial(BigInt::one(), twice)
    }

    pub fn q() -> Self {
        Self::q_pow2(2)
    }

    pub fn from_terms<I: IntoIterator<Item = (i64, BigInt)>>(terms: I, characteristic: u64) -> Self {
        let mut out = LaurentScalar { terms: BTreeMap::new(), characteristic };
        for (e, c) in terms {
            out.add_term(e, &c);
        }
        out
    }

    pub fn characteristic(&self) -> u64 {
        self.characteristic
    }

    /// Reinterpret in characteristic `p` (0 keeps integers).
    pub fn with_characteristic(&self, p: u64) -> Self {
        if p == self.characteristic {
            return self.clone();
        }
        let p = common_char(self.characteristic, p);
        LaurentScalar::from_terms(self.terms.iter().map(|(e, c)| (*e, c.clone())), p)
    }

    fn add_term(&mut self, e: i64, c: &BigInt) {
        let p = self.characteristic;
        let entry = self.terms.entry(e).or_insert_with(BigInt::zero);
        *entry += c;
        if p != 0 {
            *entry = reduce_coeff(entry, p);
        }
        if entry.is_zero() {
            self.terms.remove(&e);
        }
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_one(&self) -> bool {
        self.terms.len() == 1 && self.terms.get(&0).is_some_and(|c| c.is_one())
    }

    /// Terms as (doubled exponent, coefficient), ascending.
    pub fn terms(&self) -> impl Iterator<Item = (i64, &BigInt)> {
        self.terms.iter().map(|(e, c)| (*e, c))
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    pub fn coeff(&self, twice: i64) -> BigInt {
        self.terms.get(&twice).cloned().unwrap_or_default()
    }

    pub fn min_exp2(&self) -> Option<i64> {
        self.terms.keys().next().copied()
    }

    pub fn max_exp2(&self) -> Option<i64> {
        self.terms.keys().next_back().copied()
    }

    /// Multiply by `q^{twice/2}`.
    pub fn shift(&self, twice: i64) -> Self {
        LaurentScalar {
            terms: self.terms.iter().map(|(e, c)| (e + twice, c.clone())).collect(),
            characteristic: self.characteristic,
        }
    }

    fn unit_sign(&self, c: &BigInt) -> Option<i8> {
        if c.is_one() {
            return Some(1);
        }
        if self.characteristic == 0 {
            return (*c == BigInt::from(-1)).then_some(-1);
        }
        (*c == BigInt::from(self.characteristic - 1)).then_some(-1)
    }

    pub fn is_unit_monomial(&self) -> Option<UnitMonomial> {
        if self.terms.len() != 1 {
            return None;
        }
        let (e, c) = self.terms.iter().next().unwrap();
        self.unit_sign(c).map(|sign| UnitMonomial { sign, exponent: HalfInt(*e) })
    }

    /// True when every exponent is an integer (the element lies in ℤ[q^{±1}]).
    pub fn has_integral_exponents(&self) -> bool {
        self.terms.keys().all(|e| e % 2 == 0)
    }

    pub fn pow(&self, n: u32) -> Self {
        let mut out = LaurentScalar::one().with_characteristic(self.characteristic);
        for _ in 0..n {
            out = &out * self;
        }
        out
    }

    /// Exact quotient in the Laurent ring, or `None` when `b` does not divide `a`.
    pub fn divide_exact(&self, b: &LaurentScalar) -> Result<Option<LaurentScalar>, ScalarError> {
        if b.is_zero() {
            return Err(ScalarError::DivisionByZero);
        }
        let p = common_char(self.characteristic, b.characteristic);
        if self.is_zero() {
            return Ok(Some(LaurentScalar::zero().with_characteristic(p)));
        }
        let a = self.with_characteristic(p);
        let b = b.with_characteristic(p);
        let (la, pa) = a.to_dense();
        let (lb, pb) = b.to_dense();
        Ok(poly_div_exact(&pa, &pb, p).map(|q| LaurentScalar::from_dense(la - lb, &q, p)))
    }

    fn to_dense(&self) -> (i64, Vec<BigInt>) {
        let lo = self.min_exp2().unwrap_or(0);
        let hi = self.max_exp2().unwrap_or(0);
        let mut v = vec![BigInt::zero(); (hi - lo + 1) as usize];
        for (e, c) in &self.terms {
            v[(e - lo) as usize] = c.clone();
        }
        (lo, v)
    }

    fn from_dense(lo: i64, v: &[BigInt], p: u64) -> Self {
        LaurentScalar::from_terms(v.iter().enumerate().map(|(i, c)| (lo + i as i64, c.clone())), p)
    }
}

/// Quotient of dense polynomials when the division is exact.
fn poly_div_exact(a: &[BigInt], b: &[BigInt], p: u64) -> Option<Vec<BigInt>> {
    let (q, r) = poly_divrem(a, b, p)?;
    if r.iter().all(|c| c.is_zero()) {
        Some(q)
    } else {
        None
    }
}

/// Long division; `None` over ℤ when a leading quotient is not integral.
fn poly_divrem(a: &[BigInt], b: &[BigInt], p: u64) -> Option<(Vec<BigInt>, Vec<BigInt>)> {
    let b = trim(b.to_vec());
    let mut r = trim(a.to_vec());
    let db = b.len() - 1;
    let lb = b[db].clone();
    let inv = if p == 0 { None } else { Some(inverse_mod(&lb, p)?) };
    if r.len() < b.len() {
        return Some((vec![], r));
    }
    let mut q = vec![BigInt::zero(); r.len() - db];
    while r.len() > db && !(r.len() == 1 && r[0].is_zero()) {
        let dr = r.len() - 1;
        let lr = r[dr].clone();
        let c = match &inv {
            Some(inv) => (lr * inv).mod_floor(&BigInt::from(p)),
            None => {
                let (c, rem) = lr.div_rem(&lb);
                if !rem.is_zero() {
                    return None;
                }
                c
            }
        };
        let shift = dr - db;
        for (i, bc) in b.iter().enumerate() {
            let v = &r[shift + i] - &c * bc;
            r[shift + i] = if p == 0 { v } else { v.mod_floor(&BigInt::from(p)) };
        }
        q[shift] = c;
        r = trim(r);
        if r.len() <= db {
            break;
        }
    }
    Some((q, r))
}

fn trim(mut v: Vec<BigInt>) -> Vec<BigInt> {
    while v.len() > 1 && v.last().is_some_and(|c| c.is_zero()) {
        v.pop();
    }
    if v.is_empty() {
        v.push(BigInt::zero());
    }
    v
}

fn content(v: &[BigInt]) -> BigInt {
    v.iter().fold(BigInt::zero(), |g, c| g.gcd(c))
}

/// Monic (𝔽_p) or primitive with positive leading coefficient (ℤ) gcd.
fn poly_gcd(a: &[BigInt], b: &[BigInt], p: u64) -> Vec<BigInt> {
    let mut a = trim(a.to_vec());
    let mut b = trim(b.to_vec());
    if p == 0 {
        let ca = content(&a);
        let cb = content(&b);
        let g = ca.gcd(&cb);
        let prim = |v: Vec<BigInt>| -> Vec<BigInt> {
            let c = content(&v);
            if c.is_zero() {
                v
            } else {
                v.into_iter().map(|x| x / &c).collect()
            }
        };
        a = prim(a);
        b = prim(b);
        while !(b.len() == 1 && b[0].is_zero()) {
            // pseudo-remainder keeps coefficients integral
            let lb = b.last().unwrap().clone();
            let k = (a.len() as i64 - b.len() as i64 + 1).max(0) as u32;
            let scale = num_traits::pow(lb, k as usize);
            let scaled: Vec<BigInt> = a.iter().map(|c| c * &scale).collect();
            let (_, r) = poly_divrem(&scaled, &b, 0).expect("pseudo-division is exact");
            a = b;
            b = prim(trim(r));
        }
        let mut out: Vec<BigInt> = a.into_iter().map(|c| c * &g).collect();
        if out.last().is_some_and(|c| c.is_negative()) {
            out = out.into_iter().map(|c| -c).collect();
        }
        out
    } else {
        while !(b.len() == 1 && b[0].is_zero()) {
            let (_, r) = poly_divrem(&a, &b, p).expect("field division");
            a = b;
            b = trim(r);
        }
        let lead = a.last().unwrap().clone();
        match inverse_mod(&lead, p) {
            Some(inv) => a.into_iter().map(|c| (c * &inv).mod_floor(&BigInt::from(p))).collect(),
            None => a,
        }
    }
}

impl PartialEq for LaurentScalar {
    fn eq(&self, other: &Self) -> bool {
        if self.characteristic == other.characteristic {
            return self.terms == other.terms;
        }
        let p = common_char(self.characteristic, other.characteristic);
        self.with_characteristic(p).terms == other.with_characteristic(p).terms
    }
}

impl Eq for LaurentScalar {}

impl Add<&LaurentScalar> for &LaurentScalar {
    type Output = LaurentScalar;
    fn add(self, o: &LaurentScalar) -> LaurentScalar {
        let p = common_char(self.characteristic, o.characteristic);
        let mut out = self.with_characteristic(p);
        for (e, c) in &o.terms {
            out.add_term(*e, c);
        }
        out
    }
}

impl Sub<&LaurentScalar> for &LaurentScalar {
    type Output = LaurentScalar;
    fn sub(self, o: &LaurentScalar) -> LaurentScalar {
        self + &(-o)
    }
}

impl Mul<&LaurentScalar> for &LaurentScalar {
    type Output = LaurentScalar;
    fn mul(self, o: &LaurentScalar) -> LaurentScalar {
        let p = common_char(self.characteristic, o.characteristic);
        let mut out = LaurentScalar { terms: BTreeMap::new(), characteristic: p };
        for (e1, c1) in &self.terms {
            for (e2, c2) in &o.terms {
                out.add_term(e1 + e2, &(c1 * c2));
            }
        }
        out
    }
}

impl Neg for &LaurentScalar {
    type Output = LaurentScalar;
    fn neg(self) -> LaurentScalar {
        LaurentScalar::from_terms(self.terms.iter().map(|(e, c)| (*e, -c)), self.characteristic)
    }
}

macro_rules! forward_owned {
    ($t:ty, $($tr:ident $m:ident),*) => {$(
        impl $tr<$t> for $t {
            type Output = $t;
            fn $m(self, o: $t) -> $t { $tr::$m(&self, &o) }
        }
        impl $tr<&$t> for $t {
            type Output = $t;
            fn $m(self, o: &$t) -> $t { $tr::$m(&self, o) }
        }
    )*};
}
forward_owned!(LaurentScalar, Add add, Sub sub, Mul mul);

impl Neg for LaurentScalar {
    type Output = LaurentScalar;
    fn neg(self) -> LaurentScalar {
        -&self
    }
}

impl AddAssign<&LaurentScalar> for LaurentScalar {
    fn add_assign(&mut self, o: &LaurentScalar) {
        let p = common_char(self.characteristic, o.characteristic);
        if p != self.characteristic {
            *self = self.with_characteristic(p);
        }
        for (e, c) in &o.terms {
            self.add_term(*e, c);
        }
    }
}

impl From<i64> for LaurentScalar {
    fn from(v: i64) -> Self {
        LaurentScalar::from_int(v)
    }
}

fn fmt_q_power(f: &mut fmt::Formatter<'_>, twice: i64) -> fmt::Result {
    match twice {
        2 => write!(f, "q"),
        t if t % 2 == 0 => write!(f, "q^{}", t / 2),
        t => write!(f, "q^({t}/2)"),
    }
}

impl fmt::Display for LaurentScalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        for (i, (e, c)) in self.terms.iter().rev().enumerate() {
            let neg = c.is_negative();
            let abs = c.abs();
            if i == 0 {
                if neg {
                    write!(f, "-")?;
                }
            } else {
                write!(f, " {} ", if neg { '-' } else { '+' })?;
            }
            if *e == 0 {
                write!(f, "{abs}")?;
            } else {
                if !abs.is_one() {
                    write!(f, "{abs}*")?;
                }
                fmt_q_power(f, *e)?;
            }
        }
        Ok(())
    }
}

/// Coefficient numbers go to JSON as integers when they fit and as strings otherwise.
fn big_to_json(c: &BigInt) -> serde_json::Value {
    match c.to_i64() {
        Some(v) => serde_json::Value::from(v),
        None => serde_json::Value::from(c.to_string()),
    }
}

fn big_from_json(v: &serde_json::Value) -> Option<BigInt> {
    match v {
        serde_json::Value::Number(n) => n.as_i64().map(BigInt::from),
        serde_json::Value::String(s) => s.parse().ok(),
        _ => None,
    }
}

impl Serialize for LaurentScalar {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        let pairs: Vec<(i64, serde_json::Value)> = self.terms.iter().map(|(e, c)| (*e, big_to_json(c))).collect();
        pairs.serialize(s)
    }
}

impl<'de> Deserialize<'de> for LaurentScalar {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let pairs: Vec<(i64, serde_json::Value)> = Vec::deserialize(d)?;
        let mut terms = Vec::with_capacity(pairs.len());
        for (e, v) in pairs {
            let c = big_from_json(&v).ok_or_else(|| D::Error::custom("bad coefficient"))?;
            terms.push((e, c));
        }
        Ok(LaurentScalar::from_terms(terms, 0))
    }
}

/// A reduced fraction of Laurent scalars, used wherever the ground field
/// `Fract(𝔻)` is needed before integrality has been established.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct RatFunc {
    num: LaurentScalar,
    den: LaurentScalar,
}

impl RatFunc {
    pub fn new(num: LaurentScalar, den: LaurentScalar) -> Result<Self, ScalarError> {
        if den.is_zero() {
            return Err(ScalarError::DivisionByZero);
        }
        Ok(Self::reduced(num, den))
    }

    pub fn from_scalar(s: LaurentScalar) -> Self {
        let p = s.characteristic;
        RatFunc { num: s, den: LaurentScalar::one().with_characteristic(p) }
    }

    pub fn numerator(&self) -> &LaurentScalar {
        &self.num
    }

    pub fn denominator(&self) -> &LaurentScalar {
        &self.den
    }

    fn reduced(num: LaurentScalar, den: LaurentScalar) -> Self {
        let p = common_char(num.characteristic, den.characteristic);
        let num = num.with_characteristic(p);
        let den = den.with_characteristic(p);
        if num.is_zero() {
            return RatFunc { num, den: LaurentScalar::one().with_characteristic(p) };
        }
        let (ln, pn) = num.to_dense();
        let (ld, pd) = den.to_dense();
        let g = poly_gcd(&pn, &pd, p);
        let pn = poly_div_exact(&pn, &g, p).expect("gcd divides numerator");
        let pd = poly_div_exact(&pd, &g, p).expect("gcd divides denominator");
        // move the monomial part of the denominator into the numerator
        let mut num = LaurentScalar::from_dense(ln - ld, &pn, p);
        let mut den = LaurentScalar::from_dense(0, &pd, p);
        let lead = den.terms.values().next_back().unwrap().clone();
        if p == 0 {
            if lead.is_negative() {
                num = -num;
                den = -den;
            }
        } else if let Some(inv) = inverse_mod(&lead, p) {
            let inv = LaurentScalar::monomial(inv, 0).with_characteristic(p);
            num = &num * &inv;
            den = &den * &inv;
        }
        RatFunc { num, den }
    }

    /// The value as a Laurent scalar when the denominator is a unit.
    pub fn to_laurent(&self) -> Option<LaurentScalar> {
        self.num.divide_exact(&self.den).ok().flatten()
    }
}

impl PartialEq for RatFunc {
    fn eq(&self, o: &Self) -> bool {
        &self.num * &o.den == &o.num * &self.den
    }
}

impl fmt::Display for RatFunc {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.den.is_one() {
            write!(f, "{}", self.num)
        } else {
            write!(f, "({})/({})", self.num, self.den)
        }
    }
}

/// The coefficient interface shared by PBW elements and presentations.
pub trait Coeff:
    Clone + PartialEq + fmt::Debug + fmt::Display + Send + Sync + Serialize + for<'de> Deserialize<'de> + 'static
{
    fn zero() -> Self;
    fn from_laurent(s: &LaurentScalar) -> Self;
    fn as_laurent(&self) -> Option<LaurentScalar>;
    fn is_zero(&self) -> bool;
    fn add(&self, o: &Self) -> Self;
    fn mul(&self, o: &Self) -> Self;
    fn neg(&self) -> Self;
    /// `self / o` when it exists in the coefficient ring.
    fn try_div(&self, o: &Self) -> Option<Self>;
    /// Multiply by `q^{twice/2}`.
    fn mul_q(&self, twice: i64) -> Self;
    fn characteristic(&self) -> u64;
    fn with_characteristic(&self, p: u64) -> Self;

    fn one() -> Self {
        Self::from_laurent(&LaurentScalar::one())
    }

    fn sub(&self, o: &Self) -> Self {
        self.add(&o.neg())
    }

    fn q_pow2(twice: i64) -> Self {
        Self::from_laurent(&LaurentScalar::q_pow2(twice))
    }

    /// Sign and exponent when the value is a unit monomial ±q^{m/2}.
    fn unit_monomial(&self) -> Option<UnitMonomial> {
        self.as_laurent().and_then(|s| s.is_unit_monomial())
    }
}

impl Coeff for LaurentScalar {
    fn zero() -> Self {
        LaurentScalar::zero()
    }
    fn from_laurent(s: &LaurentScalar) -> Self {
        s.clone()
    }
    fn as_laurent(&self) -> Option<LaurentScalar> {
        Some(self.clone())
    }
    fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }
    fn add(&self, o: &Self) -> Self {
        self + o
    }
    fn mul(&self, o: &Self) -> Self {
        self * o
    }
    fn neg(&self) -> Self {
        -self
    }
    fn try_div(&self, o: &Self) -> Option<Self> {
        self.divide_exact(o).ok().flatten()
    }
    fn mul_q(&self, twice: i64) -> Self {
        self.shift(twice)
    }
    fn characteristic(&self) -> u64 {
        self.characteristic
    }
    fn with_characteristic(&self, p: u64) -> Self {
        LaurentScalar::with_characteristic(self, p)
    }
}

impl Coeff for RatFunc {
    fn zero() -> Self {
        RatFunc::from_scalar(LaurentScalar::zero())
    }
    fn from_laurent(s: &LaurentScalar) -> Self {
        RatFunc::from_scalar(s.clone())
    }
    fn as_laurent(&self) -> Option<LaurentScalar> {
        self.to_laurent()
    }
    fn is_zero(&self) -> bool {
        self.num.is_zero()
    }
    fn add(&self, o: &Self) -> Self {
        if self.den == o.den {
            return RatFunc::reduced(&self.num + &o.num, self.den.clone());
        }
        RatFunc::reduced(&self.num * &o.den + &o.num * &self.den, &self.den * &o.den)
    }
    fn mul(&self, o: &Self) -> Self {
        RatFunc::reduced(&self.num * &o.num, &self.den * &o.den)
    }
    fn neg(&self) -> Self {
        RatFunc { num: -&self.num, den: self.den.clone() }
    }
    fn try_div(&self, o: &Self) -> Option<Self> {
        if o.num.is_zero() {
            return None;
        }
        Some(RatFunc::reduced(&self.num * &o.den, &self.den * &o.num))
    }
    fn mul_q(&self, twice: i64) -> Self {
        RatFunc { num: self.num.shift(twice), den: self.den.clone() }
    }
    fn characteristic(&self) -> u64 {
        common_char(self.num.characteristic, self.den.characteristic)
    }
    fn with_characteristic(&self, p: u64) -> Self {
        RatFunc::reduced(self.num.with_characteristic(p), self.den.with_characteristic(p))
    }
}

/// Least common multiple of two nonzero scalars, normalized like a denominator.
pub fn lcm(a: &LaurentScalar, b: &LaurentScalar) -> LaurentScalar {
    let p = common_char(a.characteristic, b.characteristic);
    let (_, pa) = a.with_characteristic(p).to_dense();
    let (_, pb) = b.with_characteristic(p).to_dense();
    let g = poly_gcd(&pa, &pb, p);
    let prod = LaurentScalar::from_dense(0, &pa, p) * LaurentScalar::from_dense(0, &pb, p);
    let (_, pp) = prod.to_dense();
    let l = poly_div_exact(&pp, &g, p).expect("gcd divides product");
    LaurentScalar::from_dense(0, &l, p)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(e: i64) -> LaurentScalar {
        LaurentScalar::q_pow2(2 * e)
    }

    #[test]
    fn unit_detection() {
        let u = LaurentScalar::q_pow2(3).is_unit_monomial().unwrap();
        assert_eq!((u.sign, u.exponent), (1, HalfInt::from_twice(3)));
        assert!((q(-1) - q(1)).is_unit_monomial().is_none());
        let u = (-q(-2)).is_unit_monomial().unwrap();
        assert_eq!((u.sign, u.exponent), (-1, HalfInt::from_int(-2)));
        let two = LaurentScalar::from_int(2);
        assert!(two.is_unit_monomial().is_none());
        let m1 = LaurentScalar::from_int(-1).with_characteristic(7);
        assert_eq!(m1.is_unit_monomial().unwrap().sign, -1);
    }

    #[test]
    fn exact_division_examples() {
        let one = LaurentScalar::one();
        let a = q(1) - LaurentScalar::from_int(2) * q(2) + q(3);
        let b = (&one - &q(1)).pow(2);
        assert_eq!(a.divide_exact(&b).unwrap().unwrap(), q(1));
        let a = q(2) - q(-2);
        let b = q(1) - q(-1);
        assert_eq!(a.divide_exact(&b).unwrap().unwrap(), q(1) + q(-1));
        assert_eq!(a.divide_exact(&one).unwrap().unwrap(), a);
        assert_eq!(a.divide_exact(&LaurentScalar::zero()), Err(ScalarError::DivisionByZero));
        assert!(one.divide_exact(&(q(1) - one.clone())).unwrap().is_none());
        assert!(one.divide_exact(&LaurentScalar::from_int(2)).unwrap().is_none());
        let two = LaurentScalar::from_int(2).with_characteristic(5);
        assert_eq!(one.divide_exact(&two).unwrap().unwrap(), LaurentScalar::from_int(3).with_characteristic(5));
    }

    #[test]
    fn characteristic_reduction() {
        let a = LaurentScalar::from_int(7).with_characteristic(7);
        assert!(a.is_zero());
        let b = LaurentScalar::from_int(3) + LaurentScalar::from_int(5).with_characteristic(7);
        assert_eq!(b, LaurentScalar::from_int(1));
        assert_eq!(b.characteristic(), 7);
    }

    #[test]
    fn ratfunc_reduces() {
        let one = LaurentScalar::one();
        let qm1 = q(1) - one.clone();
        let f = RatFunc::new(qm1.clone() * q(3), qm1.clone() * qm1.clone()).unwrap();
        assert_eq!(f.numerator(), &q(3));
        assert_eq!(f.denominator(), &qm1);
        assert!(f.to_laurent().is_none());
        let g = RatFunc::new(q(2) - one.clone(), q(1) + one.clone()).unwrap();
        assert_eq!(g.to_laurent().unwrap(), qm1);
        let h = RatFunc::new(one.clone(), LaurentScalar::from_int(-2) * q(3)).unwrap();
        assert_eq!(h.denominator(), &LaurentScalar::from_int(2));
        assert_eq!(h.numerator(), &(-q(-3)));
    }

    #[test]
    fn serde_round_trip() {
        let a = q(1) - LaurentScalar::from_int(2) * LaurentScalar::q_pow2(-3);
        let text = serde_json::to_string(&a).unwrap();
        assert_eq!(text, "[[-3,-2],[2,1]]");
        let back: LaurentScalar = serde_json::from_str(&text).unwrap();
        assert_eq!(back, a);
    }

    #[test]
    fn display() {
        let a = q(1) - LaurentScalar::from_int(2) * LaurentScalar::q_pow2(-3) + LaurentScalar::one();
        assert_eq!(a.to_string(), "q + 1 - 2*q^(-3/2)");
    }
}
