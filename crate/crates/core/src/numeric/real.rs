//! Binary fixed-point reals and complex numbers over `BigInt`.
//!
//! A [`Real`] is `m / 2^bits`. Every routine keeps absolute error within a
//! few units in the last place, which is all the numeric checks need.

use std::cmp::Ordering;
use std::collections::HashMap;
use std::fmt;
use std::sync::{Mutex, OnceLock};

use num_bigint::{BigInt, Sign};
use num_integer::Integer;
use num_rational::{BigRational, Rational64};
use num_traits::{One, Signed, ToPrimitive, Zero};

#[derive(Clone, PartialEq, Eq)]
pub struct Real {
    m: BigInt,
    bits: u32,
}

impl fmt::Debug for Real {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.to_decimal(20))
    }
}

const GUARD: u32 = 24;

impl Real {
    pub fn bits_for_digits(digits: u32) -> u32 {
        (digits as f64 * std::f64::consts::LOG2_10).ceil() as u32 + 16
    }

    pub fn bits(&self) -> u32 {
        self.bits
    }

    pub fn zero(bits: u32) -> Self {
        Real { m: BigInt::zero(), bits }
    }

    pub fn one(bits: u32) -> Self {
        Real { m: BigInt::one() << bits, bits }
    }

    pub fn from_int(n: i64, bits: u32) -> Self {
        Real { m: BigInt::from(n) << bits, bits }
    }

    pub fn from_big_int(n: &BigInt, bits: u32) -> Self {
        Real { m: n << bits, bits }
    }

    pub fn from_big_rational(r: &BigRational, bits: u32) -> Self {
        let num = r.numer() << bits;
        Real { m: round_div(&num, r.denom()), bits }
    }

    pub fn from_rational(r: &Rational64, bits: u32) -> Self {
        Self::from_big_rational(&crate::rational::big(*r), bits)
    }

    /// Re-expresses at another precision (rounding when bits shrink).
    pub fn with_bits(&self, bits: u32) -> Self {
        match bits.cmp(&self.bits) {
            Ordering::Equal => self.clone(),
            Ordering::Greater => Real { m: &self.m << (bits - self.bits), bits },
            Ordering::Less => Real { m: shr_round(&self.m, self.bits - bits), bits },
        }
    }

    pub fn is_zero(&self) -> bool {
        self.m.is_zero()
    }

    pub fn is_negative(&self) -> bool {
        self.m.is_negative()
    }

    pub fn add(&self, o: &Self) -> Self {
        let o = o.with_bits(self.bits);
        Real { m: &self.m + o.m, bits: self.bits }
    }

    pub fn sub(&self, o: &Self) -> Self {
        let o = o.with_bits(self.bits);
        Real { m: &self.m - o.m, bits: self.bits }
    }

    pub fn neg(&self) -> Self {
        Real { m: -&self.m, bits: self.bits }
    }

    pub fn abs(&self) -> Self {
        Real { m: self.m.abs(), bits: self.bits }
    }

    pub fn mul(&self, o: &Self) -> Self {
        let o = o.with_bits(self.bits);
        Real { m: shr_round(&(&self.m * o.m), self.bits), bits: self.bits }
    }

    pub fn mul_int(&self, n: i64) -> Self {
        Real { m: &self.m * n, bits: self.bits }
    }

    pub fn div_int(&self, n: i64) -> Self {
        Real { m: round_div(&self.m, &BigInt::from(n)), bits: self.bits }
    }

    pub fn div(&self, o: &Self) -> Self {
        let o = o.with_bits(self.bits);
        assert!(!o.m.is_zero(), "division by zero");
        Real { m: round_div(&(&self.m << self.bits), &o.m), bits: self.bits }
    }

    pub fn sqrt(&self) -> Self {
        assert!(!self.m.is_negative(), "sqrt of negative number");
        Real { m: (&self.m << self.bits).sqrt(), bits: self.bits }
    }

    pub fn cmp_value(&self, o: &Self) -> Ordering {
        let o = o.with_bits(self.bits);
        self.m.cmp(&o.m)
    }

    pub fn to_f64(&self) -> f64 {
        // Keep 64 significant bits before converting.
        let shift = self.m.bits().saturating_sub(64);
        let top = (&self.m >> shift).to_f64().unwrap_or(f64::NAN);
        top * 2f64.powi(shift as i32 - self.bits as i32)
    }

    /// Decimal string with `digits` places after the point (truncated toward zero).
    pub fn to_decimal(&self, digits: u32) -> String {
        let scaled = (self.m.abs() * BigInt::from(10u32).pow(digits)) >> self.bits;
        let s = scaled.to_string();
        let s = if s.len() <= digits as usize {
            format!("{}{}", "0".repeat(digits as usize + 1 - s.len()), s)
        } else {
            s
        };
        let (int, frac) = s.split_at(s.len() - digits as usize);
        let sign = if self.m.is_negative() && scaled_nonzero(&s) { "-" } else { "" };
        if digits == 0 {
            format!("{sign}{int}")
        } else {
            format!("{sign}{int}.{frac}")
        }
    }

    pub fn pi(bits: u32) -> Self {
        static CACHE: OnceLock<Mutex<HashMap<u32, BigInt>>> = OnceLock::new();
        let cache = CACHE.get_or_init(|| Mutex::new(HashMap::new()));
        if let Some(m) = cache.lock().unwrap().get(&bits) {
            return Real { m: m.clone(), bits };
        }
        // Machin: π = 16 atan(1/5) - 4 atan(1/239)
        let w = bits + GUARD;
        let a = atan_inv(5, w).mul_int(16);
        let b = atan_inv(239, w).mul_int(4);
        let pi = a.sub(&b).with_bits(bits);
        cache.lock().unwrap().insert(bits, pi.m.clone());
        pi
    }

    pub fn exp(&self) -> Self {
        let bits = self.bits;
        let x = self.to_f64();
        if x < -(bits as f64) * std::f64::consts::LN_2 - 2.0 {
            return Real::zero(bits);
        }
        // Halve until |x| < 1/2, sum the Taylor series, square back.
        let mut halvings = 0u32;
        let mut mag = x.abs();
        while mag >= 0.5 {
            mag /= 2.0;
            halvings += 1;
        }
        let extra = (x.max(0.0) / std::f64::consts::LN_2).ceil() as u32;
        let w = bits + GUARD + halvings + extra;
        let r = Real { m: shr_round(&(self.with_bits(w).m), halvings), bits: w };
        let mut sum = Real::one(w);
        let mut term = Real::one(w);
        let mut k = 1i64;
        loop {
            term = term.mul(&r).div_int(k);
            if term.m.is_zero() {
                break;
            }
            sum = sum.add(&term);
            k += 1;
        }
        for _ in 0..halvings {
            sum = sum.mul(&sum);
        }
        sum.with_bits(bits)
    }

    /// `(cos x, sin x)`.
    pub fn cos_sin(&self) -> (Self, Self) {
        let bits = self.bits;
        let w = bits + GUARD + (self.to_f64().abs().max(1.0).log2().ceil() as u32);
        let two_pi = Real::pi(w).mul_int(2);
        let x = self.with_bits(w);
        // Reduce into [-π, π].
        let k = (x.to_f64() / (2.0 * std::f64::consts::PI)).round() as i64;
        let r = x.sub(&two_pi.mul_int(k));
        let r2 = r.mul(&r);
        let mut c = Real::one(w);
        let mut s = r.clone();
        let mut tc = Real::one(w);
        let mut ts = r.clone();
        let mut n = 1i64;
        loop {
            tc = tc.mul(&r2).div_int((2 * n - 1) * (2 * n)).neg();
            ts = ts.mul(&r2).div_int((2 * n) * (2 * n + 1)).neg();
            if tc.m.is_zero() && ts.m.is_zero() {
                break;
            }
            c = c.add(&tc);
            s = s.add(&ts);
            n += 1;
        }
        (c.with_bits(bits), s.with_bits(bits))
    }
}

fn scaled_nonzero(s: &str) -> bool {
    s.bytes().any(|b| b != b'0')
}

fn atan_inv(n: i64, bits: u32) -> Real {
    // atan(1/n) = Σ (-1)^k / ((2k+1) n^{2k+1})
    let n2 = n * n;
    let mut power = Real::one(bits).div_int(n);
    let mut sum = power.clone();
    let mut k = 1i64;
    loop {
        power = power.div_int(n2);
        let term = power.div_int(2 * k + 1);
        if term.m.is_zero() {
            break;
        }
        if k % 2 == 1 {
            sum = sum.sub(&term);
        } else {
            sum = sum.add(&term);
        }
        k += 1;
    }
    sum
}

fn round_div(a: &BigInt, b: &BigInt) -> BigInt {
    let (q, r) = a.div_mod_floor(b);
    if (r << 1u32).abs() >= b.abs() {
        if b.sign() == Sign::Minus {
            q - 1
        } else {
            q + 1
        }
    } else {
        q
    }
}

fn shr_round(a: &BigInt, s: u32) -> BigInt {
    if s == 0 {
        return a.clone();
    }
    let half = BigInt::one() << (s - 1);
    (a + half) >> s
}

#[derive(Clone, PartialEq, Eq)]
pub struct Complex {
    pub re: Real,
    pub im: Real,
}

impl fmt::Debug for Complex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({:?} + {:?}i)", self.re, self.im)
    }
}

impl Complex {
    pub fn new(re: Real, im: Real) -> Self {
        let im = im.with_bits(re.bits());
        Complex { re, im }
    }

    pub fn zero(bits: u32) -> Self {
        Complex { re: Real::zero(bits), im: Real::zero(bits) }
    }

    pub fn one(bits: u32) -> Self {
        Complex { re: Real::one(bits), im: Real::zero(bits) }
    }

    pub fn from_real(re: Real) -> Self {
        let bits = re.bits();
        Complex { re, im: Real::zero(bits) }
    }

    pub fn from_f64(re: f64, im: f64, bits: u32) -> Self {
        let conv = |x: f64| {
            let r = BigRational::from_float(x).expect("finite float");
            Real::from_big_rational(&r, bits)
        };
        Complex { re: conv(re), im: conv(im) }
    }

    pub fn bits(&self) -> u32 {
        self.re.bits()
    }

    pub fn with_bits(&self, bits: u32) -> Self {
        Complex { re: self.re.with_bits(bits), im: self.im.with_bits(bits) }
    }

    pub fn add(&self, o: &Self) -> Self {
        Complex { re: self.re.add(&o.re), im: self.im.add(&o.im) }
    }

    pub fn sub(&self, o: &Self) -> Self {
        Complex { re: self.re.sub(&o.re), im: self.im.sub(&o.im) }
    }

    pub fn neg(&self) -> Self {
        Complex { re: self.re.neg(), im: self.im.neg() }
    }

    pub fn conj(&self) -> Self {
        Complex { re: self.re.clone(), im: self.im.neg() }
    }

    pub fn mul(&self, o: &Self) -> Self {
        let re = self.re.mul(&o.re).sub(&self.im.mul(&o.im));
        let im = self.re.mul(&o.im).add(&self.im.mul(&o.re));
        Complex { re, im }
    }

    pub fn scale(&self, r: &Real) -> Self {
        Complex { re: self.re.mul(r), im: self.im.mul(r) }
    }

    pub fn norm_sqr(&self) -> Real {
        self.re.mul(&self.re).add(&self.im.mul(&self.im))
    }

    pub fn abs(&self) -> Real {
        self.norm_sqr().sqrt()
    }

    pub fn div(&self, o: &Self) -> Self {
        let d = o.norm_sqr();
        let n = self.mul(&o.conj());
        Complex { re: n.re.div(&d), im: n.im.div(&d) }
    }

    pub fn inv(&self) -> Self {
        Complex::one(self.bits()).div(self)
    }

    /// `e^{z}`.
    pub fn exp(&self) -> Self {
        let r = self.re.exp();
        let (c, s) = self.im.cos_sin();
        Complex { re: r.mul(&c), im: r.mul(&s) }
    }

    /// `e(x) = e^{2πix}` for rational `x`.
    pub fn e(x: &Rational64, bits: u32) -> Self {
        let w = bits + GUARD;
        let theta = Real::pi(w).mul_int(2).mul(&Real::from_rational(x, w));
        let (c, s) = theta.cos_sin();
        Complex { re: c.with_bits(bits), im: s.with_bits(bits) }
    }

    /// `e(x·z) = exp(2πi·x·z)` for complex `z`; with `z = τ` this is `q^x`.
    pub fn e_of(z: &Complex, x: &Rational64) -> Self {
        let bits = z.bits();
        let w = bits + GUARD;
        let scale = Real::pi(w).mul_int(2).mul(&Real::from_rational(x, w));
        let zz = z.with_bits(w);
        // 2πi x z = 2π x (-im + i re)
        let arg = Complex { re: zz.im.neg().mul(&scale), im: zz.re.mul(&scale) };
        arg.exp().with_bits(bits)
    }

    pub fn dist(&self, o: &Self) -> f64 {
        self.sub(o).abs().to_f64()
    }

    pub fn to_f64(&self) -> (f64, f64) {
        (self.re.to_f64(), self.im.to_f64())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn pi_digits() {
        let pi = Real::pi(Real::bits_for_digits(40));
        assert_eq!(pi.to_decimal(30), "3.141592653589793238462643383279");
    }

    #[test]
    fn exp_and_trig() {
        let bits = Real::bits_for_digits(30);
        let e = Real::one(bits).exp();
        assert_eq!(e.to_decimal(25), "2.7182818284590452353602874");
        let small = Real::from_int(-50, bits).exp();
        assert!((small.to_f64() / (-50f64).exp() - 1.0).abs() < 1e-12);
        let (c, s) = Real::from_int(10, bits).cos_sin();
        assert!((c.to_f64() - 10f64.cos()).abs() < 1e-15);
        assert!((s.to_f64() - 10f64.sin()).abs() < 1e-15);
    }

    #[test]
    fn sqrt_and_division() {
        let bits = Real::bits_for_digits(30);
        let two = Real::from_int(2, bits);
        assert_eq!(two.sqrt().to_decimal(20), "1.41421356237309504880");
        let third = Real::one(bits).div(&Real::from_int(3, bits));
        assert_eq!(third.to_decimal(10), "0.3333333333");
        assert_eq!(Real::from_int(-3, bits).div_int(2).to_decimal(2), "-1.50");
    }

    #[test]
    fn complex_roots_of_unity() {
        let bits = Real::bits_for_digits(30);
        let z = Complex::e(&Rational64::new(1, 4), bits);
        assert!(z.re.to_f64().abs() < 1e-28);
        assert!((z.im.to_f64() - 1.0).abs() < 1e-28);
        let w = Complex::e(&Rational64::new(1, 7), bits);
        let mut p = Complex::one(bits);
        for _ in 0..7 {
            p = p.mul(&w);
        }
        assert!(p.dist(&Complex::one(bits)) < 1e-28);
    }
}
