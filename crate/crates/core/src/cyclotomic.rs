//! Exact arithmetic in cyclotomic fields `Q(ζ_M)`.
//!
//! Elements are stored in the power basis `1, ζ, …, ζ^{φ(M)-1}`, reduced
//! modulo the `M`-th cyclotomic polynomial, so equal field elements at the
//! same level have identical coefficient vectors.

use std::collections::HashMap;
use std::fmt;
use std::sync::{Arc, OnceLock, RwLock};

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::{BigRational, Rational64};
use num_traits::{One, ToPrimitive, Zero};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};
use crate::numeric::{Complex, Real};
use crate::rational::{fmt_big, parse_big};

/// Monic `Φ_M` together with its sparse non-leading part.
#[derive(Debug)]
pub struct CycloPoly {
    pub level: u64,
    pub degree: usize,
    /// Coefficients from `x^0` to `x^degree`.
    pub coeffs: Vec<i64>,
    tail: Vec<(usize, i64)>,
}

fn poly_cache() -> &'static RwLock<HashMap<u64, Arc<CycloPoly>>> {
    static CACHE: OnceLock<RwLock<HashMap<u64, Arc<CycloPoly>>>> = OnceLock::new();
    CACHE.get_or_init(|| RwLock::new(HashMap::new()))
}

/// The cyclotomic polynomial `Φ_M`, from `Φ_M = (x^M - 1) / ∏_{d | M, d < M} Φ_d`.
pub fn cyclotomic_poly(level: u64) -> Arc<CycloPoly> {
    assert!(level >= 1, "cyclotomic level must be positive");
    if let Some(p) = poly_cache().read().unwrap().get(&level) {
        return p.clone();
    }
    let m = level as usize;
    // x^M - 1
    let mut num: Vec<i128> = vec![0; m + 1];
    num[0] = -1;
    num[m] = 1;
    for d in 1..level {
        if level % d != 0 {
            continue;
        }
        let phi_d = cyclotomic_poly(d);
        num = divide_exact(&num, &phi_d.coeffs);
    }
    let coeffs: Vec<i64> = num
        .iter()
        .map(|&c| i64::try_from(c).expect("cyclotomic coefficient overflow"))
        .collect();
    let degree = coeffs.len() - 1;
    let tail = coeffs[..degree]
        .iter()
        .enumerate()
        .filter(|(_, &c)| c != 0)
        .map(|(i, &c)| (i, c))
        .collect();
    let poly = Arc::new(CycloPoly { level, degree, coeffs, tail });
    poly_cache().write().unwrap().insert(level, poly.clone());
    poly
}

fn divide_exact(num: &[i128], den: &[i64]) -> Vec<i128> {
    let dn = den.len() - 1;
    let mut rem = num.to_vec();
    let qn = num.len() - 1 - dn;
    let mut quot = vec![0i128; qn + 1];
    for i in (0..=qn).rev() {
        let c = rem[i + dn];
        quot[i] = c;
        if c != 0 {
            for (j, &d) in den.iter().enumerate() {
                rem[i + j] -= c * d as i128;
            }
        }
    }
    debug_assert!(rem.iter().all(|&r| r == 0), "inexact cyclotomic division");
    quot
}

pub(crate) trait ReduceCoeff: Clone + Zero {
    fn sub_scaled(&mut self, c: &Self, a: i64);
}

impl ReduceCoeff for BigInt {
    fn sub_scaled(&mut self, c: &Self, a: i64) {
        *self -= c * a;
    }
}

impl ReduceCoeff for BigRational {
    fn sub_scaled(&mut self, c: &Self, a: i64) {
        *self -= c * BigRational::from_integer(a.into());
    }
}

/// Reduces a coefficient vector in powers of `ζ_M` (any length) to canonical form.
fn reduce_generic<T: ReduceCoeff>(level: u64, mut v: Vec<T>) -> Vec<T> {
    let m = level as usize;
    if v.len() > m {
        let extra: Vec<T> = v.drain(m..).collect();
        for (i, c) in extra.into_iter().enumerate() {
            let idx = (m + i) % m;
            let cur = std::mem::replace(&mut v[idx], T::zero());
            v[idx] = cur + c;
        }
    }
    let poly = cyclotomic_poly(level);
    let deg = poly.degree;
    for i in (deg..v.len()).rev() {
        if v[i].is_zero() {
            continue;
        }
        let c = std::mem::replace(&mut v[i], T::zero());
        for &(j, a) in &poly.tail {
            v[i - deg + j].sub_scaled(&c, a);
        }
    }
    v.resize(deg, T::zero());
    v
}

/// An element of `Q(ζ_M)` in canonical form.
#[derive(Clone)]
pub struct CycNum {
    level: u64,
    coeffs: Vec<BigRational>,
}

impl fmt::Debug for CycNum {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "CycNum[{}](", self.level)?;
        let mut first = true;
        for (i, c) in self.coeffs.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            if !first {
                write!(f, " + ")?;
            }
            first = false;
            write!(f, "{c}*z^{i}")?;
        }
        if first {
            write!(f, "0")?;
        }
        write!(f, ")")
    }
}

impl CycNum {
    pub fn zero(level: u64) -> Self {
        let deg = cyclotomic_poly(level).degree;
        CycNum { level, coeffs: vec![BigRational::zero(); deg] }
    }

    pub fn one(level: u64) -> Self {
        Self::from_rational(level, BigRational::one())
    }

    pub fn from_rational(level: u64, r: BigRational) -> Self {
        let mut z = Self::zero(level);
        z.coeffs[0] = r;
        z
    }

    pub fn from_int(level: u64, n: i64) -> Self {
        Self::from_rational(level, BigRational::from_integer(n.into()))
    }

    /// Builds `Σ v[i] ζ_M^i` for a vector of any length.
    pub fn from_powers(level: u64, v: Vec<BigRational>) -> Self {
        CycNum { level, coeffs: reduce_generic(level, v) }
    }

    /// Builds `Σ v[i] ζ_M^i` from integer coefficients.
    pub fn from_int_powers(level: u64, v: Vec<BigInt>) -> Self {
        let reduced = reduce_generic(level, v);
        CycNum { level, coeffs: reduced.into_iter().map(BigRational::from_integer).collect() }
    }

    /// Canonical coefficients, validated against the level's degree.
    pub fn from_coeffs(level: u64, coeffs: Vec<BigRational>) -> Result<Self> {
        let deg = cyclotomic_poly(level).degree;
        if coeffs.len() != deg {
            return Err(Error::Level(format!(
                "level {level} needs {deg} coefficients, got {}",
                coeffs.len()
            )));
        }
        Ok(CycNum { level, coeffs })
    }

    /// `ζ_M^j`.
    pub fn zeta_power(level: u64, j: i64) -> Self {
        let m = level as i64;
        let j = j.rem_euclid(m) as usize;
        let mut v = vec![BigRational::zero(); j + 1];
        v[j] = BigRational::one();
        Self::from_powers(level, v)
    }

    pub fn level(&self) -> u64 {
        self.level
    }

    pub fn coeffs(&self) -> &[BigRational] {
        &self.coeffs
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(Zero::is_zero)
    }

    /// The rational value, if the element lies in `Q`.
    pub fn as_rational(&self) -> Option<BigRational> {
        if self.coeffs.iter().skip(1).all(Zero::is_zero) {
            Some(self.coeffs.first().cloned().unwrap_or_else(BigRational::zero))
        } else {
            None
        }
    }

    /// Re-expresses the element in `Q(ζ_{M'})` for a multiple `M'` of the level.
    pub fn lift_level(&self, new_level: u64) -> Result<Self> {
        if new_level % self.level != 0 {
            return Err(Error::Level(format!(
                "cannot lift level {} to {new_level}",
                self.level
            )));
        }
        if new_level == self.level {
            return Ok(self.clone());
        }
        let step = (new_level / self.level) as usize;
        let mut v = vec![BigRational::zero(); step * self.coeffs.len().max(1)];
        for (i, c) in self.coeffs.iter().enumerate() {
            if !c.is_zero() {
                v[i * step] = c.clone();
            }
        }
        Ok(Self::from_powers(new_level, v))
    }

    fn common(&self, other: &Self) -> (Self, Self) {
        if self.level == other.level {
            return (self.clone(), other.clone());
        }
        let l = self.level.lcm(&other.level);
        (self.lift_level(l).unwrap(), other.lift_level(l).unwrap())
    }

    pub fn add(&self, other: &Self) -> Self {
        if self.level != other.level {
            let (a, b) = self.common(other);
            return a.add(&b);
        }
        let coeffs = self.coeffs.iter().zip(&other.coeffs).map(|(a, b)| a + b).collect();
        CycNum { level: self.level, coeffs }
    }

    pub fn sub(&self, other: &Self) -> Self {
        if self.level != other.level {
            let (a, b) = self.common(other);
            return a.sub(&b);
        }
        let coeffs = self.coeffs.iter().zip(&other.coeffs).map(|(a, b)| a - b).collect();
        CycNum { level: self.level, coeffs }
    }

    pub fn neg(&self) -> Self {
        CycNum { level: self.level, coeffs: self.coeffs.iter().map(|c| -c).collect() }
    }

    pub fn scale(&self, r: &BigRational) -> Self {
        CycNum { level: self.level, coeffs: self.coeffs.iter().map(|c| c * r).collect() }
    }

    pub fn mul(&self, other: &Self) -> Self {
        if self.level != other.level {
            let (a, b) = self.common(other);
            return a.mul(&b);
        }
        if let Some(r) = other.as_rational() {
            return self.scale(&r);
        }
        if let Some(r) = self.as_rational() {
            return other.scale(&r);
        }
        let n = self.coeffs.len();
        let mut v = vec![BigRational::zero(); 2 * n];
        for (i, a) in self.coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in other.coeffs.iter().enumerate() {
                if !b.is_zero() {
                    v[i + j] += a * b;
                }
            }
        }
        Self::from_powers(self.level, v)
    }

    /// `ζ_M^j · self`.
    pub fn mul_zeta_power(&self, j: i64) -> Self {
        let m = self.level as usize;
        let j = j.rem_euclid(m as i64) as usize;
        let mut v = vec![BigRational::zero(); m];
        for (i, c) in self.coeffs.iter().enumerate() {
            if !c.is_zero() {
                v[(i + j) % m] = c.clone();
            }
        }
        Self::from_powers(self.level, v)
    }

    pub fn pow(&self, e: i64) -> Result<Self> {
        let base = if e < 0 { self.inv()? } else { self.clone() };
        let mut acc = Self::one(self.level);
        let mut b = base;
        let mut n = e.unsigned_abs();
        while n > 0 {
            if n & 1 == 1 {
                acc = acc.mul(&b);
            }
            b = b.mul(&b);
            n >>= 1;
        }
        Ok(acc)
    }

    /// Field inverse via the extended Euclidean algorithm against `Φ_M`.
    pub fn inv(&self) -> Result<Self> {
        if self.is_zero() {
            return Err(Error::NotInvertible("zero cyclotomic number".into()));
        }
        if let Some(r) = self.as_rational() {
            return Ok(Self::from_rational(self.level, r.recip()));
        }
        let poly = cyclotomic_poly(self.level);
        let modulus: Vec<BigRational> =
            poly.coeffs.iter().map(|&c| BigRational::from_integer(c.into())).collect();
        let a = trim(self.coeffs.clone());
        // Invariant: s_i * a ≡ r_i (mod Φ).
        let (mut r0, mut r1) = (modulus, a);
        let (mut s0, mut s1) = (vec![], vec![BigRational::one()]);
        while !(r1.len() == 1) {
            let (q, r) = poly_divrem(&r0, &r1);
            let s2 = poly_sub(&s0, &poly_mul(&q, &s1));
            r0 = std::mem::replace(&mut r1, r);
            s0 = std::mem::replace(&mut s1, s2);
            if r1.is_empty() {
                return Err(Error::Internal("cyclotomic polynomial is reducible?".into()));
            }
        }
        let c = r1[0].recip();
        let s: Vec<BigRational> = s1.iter().map(|x| x * &c).collect();
        Ok(Self::from_powers(self.level, s))
    }

    pub fn div(&self, other: &Self) -> Result<Self> {
        Ok(self.mul(&other.inv()?))
    }

    /// The automorphism `ζ_M ↦ ζ_M^d`.
    pub fn galois(&self, d: i64) -> Result<Self> {
        let m = self.level as i64;
        if d.gcd(&m) != 1 {
            return Err(Error::InvalidAutomorphism { d, level: self.level });
        }
        let d = d.rem_euclid(m) as usize;
        let mut v = vec![BigRational::zero(); self.level as usize];
        for (i, c) in self.coeffs.iter().enumerate() {
            if !c.is_zero() {
                v[(i * d) % self.level as usize] += c;
            }
        }
        Ok(Self::from_powers(self.level, v))
    }

    /// Complex conjugation, `ζ ↦ ζ^{-1}`.
    pub fn conj(&self) -> Self {
        self.galois(-1).expect("-1 is always a unit")
    }

    /// Evaluates at `ζ_M = e^{2πi/M}` to `prec` decimal digits.
    pub fn embed(&self, prec: u32) -> Complex {
        let bits = Real::bits_for_digits(prec) + 16;
        let mut acc = Complex::zero(bits);
        for (i, c) in self.coeffs.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            let root = Complex::e(&Rational64::new(i as i64, self.level as i64), bits);
            acc = acc.add(&root.scale(&Real::from_big_rational(c, bits)));
        }
        acc
    }

    /// Quick double-precision evaluation.
    pub fn to_f64(&self) -> (f64, f64) {
        let mut re = 0.0;
        let mut im = 0.0;
        for (i, c) in self.coeffs.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            let v = c.numer().to_f64().unwrap_or(f64::NAN) / c.denom().to_f64().unwrap_or(f64::NAN);
            let th = 2.0 * std::f64::consts::PI * i as f64 / self.level as f64;
            re += v * th.cos();
            im += v * th.sin();
        }
        (re, im)
    }
}

impl PartialEq for CycNum {
    fn eq(&self, other: &Self) -> bool {
        if self.level == other.level {
            return self.coeffs == other.coeffs;
        }
        let (a, b) = self.common(other);
        a.coeffs == b.coeffs
    }
}

impl Eq for CycNum {}

/// The root of unity `e(x) = e^{2πix}` in `Q(ζ_M)`; the denominator of `x` must divide `M`.
pub fn cyc_e(x: Rational64, level: u64) -> Result<CycNum> {
    let m = level as i64;
    let den = *x.denom();
    if m % den != 0 {
        return Err(Error::Level(format!("e({x}) does not live at level {level}")));
    }
    let j = (x.numer() * (m / den)).rem_euclid(m);
    Ok(CycNum::zeta_power(level, j))
}

pub fn cyc_galois(u: &CycNum, d: i64) -> Result<CycNum> {
    u.galois(d)
}

pub fn cyc_embed(u: &CycNum, prec: u32) -> Complex {
    u.embed(prec)
}

fn trim(mut v: Vec<BigRational>) -> Vec<BigRational> {
    while v.last().is_some_and(Zero::is_zero) {
        v.pop();
    }
    v
}

fn poly_sub(a: &[BigRational], b: &[BigRational]) -> Vec<BigRational> {
    let n = a.len().max(b.len());
    let z = BigRational::zero();
    trim((0..n).map(|i| a.get(i).unwrap_or(&z) - b.get(i).unwrap_or(&z)).collect())
}

fn poly_mul(a: &[BigRational], b: &[BigRational]) -> Vec<BigRational> {
    if a.is_empty() || b.is_empty() {
        return vec![];
    }
    let mut v = vec![BigRational::zero(); a.len() + b.len() - 1];
    for (i, x) in a.iter().enumerate() {
        for (j, y) in b.iter().enumerate() {
            v[i + j] += x * y;
        }
    }
    trim(v)
}

fn poly_divrem(a: &[BigRational], b: &[BigRational]) -> (Vec<BigRational>, Vec<BigRational>) {
    let mut r = a.to_vec();
    let db = b.len() - 1;
    if r.len() < b.len() {
        return (vec![], trim(r));
    }
    let lead = b[db].recip();
    let mut q = vec![BigRational::zero(); r.len() - db];
    for i in (0..q.len()).rev() {
        let c = &r[i + db] * &lead;
        if !c.is_zero() {
            for (j, y) in b.iter().enumerate() {
                r[i + j] -= &c * y;
            }
        }
        q[i] = c;
    }
    r.truncate(db);
    (trim(q), trim(r))
}

#[derive(Serialize, Deserialize)]
struct CycNumJson {
    level: u64,
    coeffs: Vec<String>,
}

impl Serialize for CycNum {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        CycNumJson { level: self.level, coeffs: self.coeffs.iter().map(fmt_big).collect() }
            .serialize(s)
    }
}

impl<'de> Deserialize<'de> for CycNum {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let raw = CycNumJson::deserialize(d)?;
        let coeffs = raw
            .coeffs
            .iter()
            .map(|s| parse_big(s))
            .collect::<Result<Vec<_>>>()
            .map_err(serde::de::Error::custom)?;
        CycNum::from_coeffs(raw.level, coeffs).map_err(serde::de::Error::custom)
    }
}
