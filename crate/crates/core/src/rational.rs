//! Small helpers for exact rationals: fractional parts, `p/q` strings and
//! conversions between the machine-sized and arbitrary-precision types.

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::{BigRational, Rational64};
use num_traits::{ToPrimitive, Zero};

use crate::error::{Error, Result};

/// Fractional part `{x} = x - floor(x)`, always in `[0, 1)`.
pub fn fract(x: Rational64) -> Rational64 {
    x - x.floor()
}

pub fn big(x: Rational64) -> BigRational {
    BigRational::new(BigInt::from(*x.numer()), BigInt::from(*x.denom()))
}

pub fn small(x: &BigRational) -> Option<Rational64> {
    Some(Rational64::new(x.numer().to_i64()?, x.denom().to_i64()?))
}

pub fn rat(n: i64, d: i64) -> Rational64 {
    Rational64::new(n, d)
}

/// Formats as `p/q` with the denominator always present.
pub fn fmt_big(x: &BigRational) -> String {
    format!("{}/{}", x.numer(), x.denom())
}

pub fn fmt_small(x: Rational64) -> String {
    format!("{}/{}", x.numer(), x.denom())
}

/// Parses `p/q`, `p`, or a decimal-free integer string.
pub fn parse_big(s: &str) -> Result<BigRational> {
    let s = s.trim();
    let (n, d) = match s.split_once('/') {
        Some((n, d)) => (n.trim(), d.trim()),
        None => (s, "1"),
    };
    let n: BigInt = n.parse().map_err(|_| Error::Parse(format!("bad numerator in {s:?}")))?;
    let d: BigInt = d.parse().map_err(|_| Error::Parse(format!("bad denominator in {s:?}")))?;
    if d.is_zero() {
        return Err(Error::Parse(format!("zero denominator in {s:?}")));
    }
    Ok(BigRational::new(n, d))
}

pub fn parse_small(s: &str) -> Result<Rational64> {
    let x = parse_big(s)?;
    small(&x).ok_or_else(|| Error::Parse(format!("{s:?} does not fit in 64 bits")))
}

pub fn lcm(a: i64, b: i64) -> i64 {
    a.lcm(&b)
}

pub fn gcd(a: i64, b: i64) -> i64 {
    a.gcd(&b)
}

/// `x mod n` in `[0, n)`.
pub fn modp(x: i64, n: i64) -> i64 {
    x.rem_euclid(n)
}

/// Inverse of `x` modulo `n`, if it exists.
pub fn inv_mod(x: i64, n: i64) -> Option<i64> {
    let e = modp(x, n).extended_gcd(&n);
    if e.gcd != 1 {
        return None;
    }
    Some(modp(e.x, n))
}

pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    let mut d = 2;
    while d * d <= n {
        if n % d == 0 {
            return false;
        }
        d += 1;
    }
    true
}

pub fn primes_between(lo: u64, hi: u64) -> Vec<u64> {
    (lo..=hi).filter(|&p| is_prime(p)).collect()
}

pub fn euler_phi(n: u64) -> u64 {
    let mut result = n;
    let mut m = n;
    let mut p = 2;
    while p * p <= m {
        if m % p == 0 {
            while m % p == 0 {
                m /= p;
            }
            result -= result / p;
        }
        p += 1;
    }
    if m > 1 {
        result -= result / m;
    }
    result
}

pub fn divisors(n: u64) -> Vec<u64> {
    (1..=n).filter(|d| n % d == 0).collect()
}
