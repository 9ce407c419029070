//! Truncated series in fractional powers of `q` with exact cyclotomic
//! coefficients.
//!
//! A [`QSeries`] stores its known terms below a truncation order `O`;
//! everything at or above `O` is unknown. Coefficients are [`CycNum`]s at a
//! common level, and level 1 means the series is rational.

use std::collections::BTreeMap;
use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::{BigRational, Rational64};
use num_traits::{One, ToPrimitive, Zero};
use serde_json::{json, Value};

use crate::cyclotomic::CycNum;
use crate::error::{Error, Result};
use crate::rational::{fmt_big, fmt_small, parse_big, parse_small};

#[derive(Clone, PartialEq, Eq)]
pub struct QSeries {
    level: u64,
    denom: i64,
    order: Rational64,
    terms: BTreeMap<Rational64, CycNum>,
}

/// First exponent where two series differ, with both coefficients.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Mismatch {
    pub exponent: Rational64,
    pub left: CycNum,
    pub right: CycNum,
}

impl fmt::Display for Mismatch {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "q^{}: {:?} vs {:?}",
            fmt_small(self.exponent),
            self.left,
            self.right
        )
    }
}

impl fmt::Debug for QSeries {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        for (e, c) in &self.terms {
            if !first {
                write!(f, " + ")?;
            }
            first = false;
            match c.as_rational() {
                Some(r) => write!(f, "({r})q^{e}")?,
                None => write!(f, "({c:?})q^{e}")?,
            }
        }
        if first {
            write!(f, "0")?;
        }
        write!(f, " + O(q^{})", self.order)
    }
}

fn rat_coeff(r: BigRational) -> CycNum {
    CycNum::from_rational(1, r)
}

fn check_denom(e: Rational64, denom: i64) -> Result<()> {
    if denom % e.denom() != 0 {
        return Err(Error::Denominator(format!(
            "exponent {} does not lie in (1/{denom})Z",
            fmt_small(e)
        )));
    }
    Ok(())
}

impl QSeries {
    /// The zero series known through `order`.
    pub fn zero(level: u64, denom: i64, order: Rational64) -> Self {
        QSeries { level, denom, order, terms: BTreeMap::new() }
    }

    pub fn one(order: Rational64) -> Self {
        Self::monomial(CycNum::one(1), Rational64::zero(), order)
    }

    /// `c·q^e`, empty if `e ≥ order`.
    pub fn monomial(c: CycNum, e: Rational64, order: Rational64) -> Self {
        let mut s = Self::zero(c.level(), *e.denom(), order);
        s.insert(e, c);
        s
    }

    /// Builds a series from `(exponent, coefficient)` pairs, merging repeats.
    pub fn from_terms(
        denom: i64,
        order: Rational64,
        terms: impl IntoIterator<Item = (Rational64, CycNum)>,
    ) -> Result<Self> {
        let mut s = Self::zero(1, denom, order);
        for (e, c) in terms {
            check_denom(e, denom)?;
            s.level = s.level.lcm(&c.level());
            s.insert(e, c);
        }
        s.relevel();
        Ok(s)
    }

    /// Rational series from `(exponent, coefficient)` pairs.
    pub fn from_rational_terms(
        denom: i64,
        order: Rational64,
        terms: impl IntoIterator<Item = (Rational64, BigRational)>,
    ) -> Result<Self> {
        Self::from_terms(denom, order, terms.into_iter().map(|(e, c)| (e, rat_coeff(c))))
    }

    /// Rational series from integer coefficients on the lattice `start + i/denom`.
    pub fn from_dense(denom: i64, start: Rational64, order: Rational64, c: &[BigInt]) -> Self {
        let mut s = Self::zero(1, denom, order);
        for (i, x) in c.iter().enumerate() {
            if !x.is_zero() {
                let e = start + Rational64::new(i as i64, denom);
                s.insert(e, rat_coeff(BigRational::from_integer(x.clone())));
            }
        }
        s
    }

    fn insert(&mut self, e: Rational64, c: CycNum) {
        if e >= self.order || c.is_zero() {
            return;
        }
        self.denom = self.denom.lcm(e.denom());
        match self.terms.remove(&e) {
            Some(old) => {
                let sum = old.add(&c);
                if !sum.is_zero() {
                    self.terms.insert(e, sum);
                }
            }
            None => {
                self.terms.insert(e, c);
            }
        }
    }

    fn relevel(&mut self) {
        let l = self.level;
        for c in self.terms.values_mut() {
            if c.level() != l {
                *c = c.lift_level(l).expect("level divides lcm");
            }
        }
    }

    pub fn level(&self) -> u64 {
        self.level
    }

    pub fn denom(&self) -> i64 {
        self.denom
    }

    pub fn order(&self) -> Rational64 {
        self.order
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Rational64, &CycNum)> {
        self.terms.iter()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn coeff(&self, e: Rational64) -> CycNum {
        self.terms.get(&e).cloned().unwrap_or_else(|| CycNum::zero(self.level))
    }

    /// Rational coefficient at `e`; `None` if it is not rational.
    pub fn rational_coeff(&self, e: Rational64) -> Option<BigRational> {
        self.coeff(e).as_rational()
    }

    /// Smallest exponent with a nonzero coefficient, or the order if none is known.
    pub fn valuation(&self) -> Rational64 {
        self.terms.keys().next().copied().unwrap_or(self.order)
    }

    pub fn leading(&self) -> Option<(Rational64, &CycNum)> {
        self.terms.iter().next().map(|(e, c)| (*e, c))
    }

    pub fn is_rational(&self) -> bool {
        self.terms.values().all(|c| c.as_rational().is_some())
    }

    /// Drops to level 1, failing if any coefficient is irrational.
    pub fn to_rational(&self) -> Result<Self> {
        let mut out = Self::zero(1, self.denom, self.order);
        for (e, c) in &self.terms {
            let r = c.as_rational().ok_or_else(|| {
                Error::Consistency(format!("coefficient of q^{} is not rational", fmt_small(*e)))
            })?;
            out.terms.insert(*e, rat_coeff(r));
        }
        Ok(out)
    }

    /// Re-expresses every coefficient at a multiple of the current level.
    pub fn lift_level(&self, level: u64) -> Result<Self> {
        let mut out = self.clone();
        if level % self.level != 0 {
            return Err(Error::Level(format!("cannot lift level {} to {level}", self.level)));
        }
        out.level = level;
        out.relevel();
        Ok(out)
    }

    pub fn truncate(&self, order: Rational64) -> Self {
        let order = order.min(self.order);
        let terms = self.terms.range(..order).map(|(e, c)| (*e, c.clone())).collect();
        QSeries { level: self.level, denom: self.denom, order, terms }
    }

    pub fn add(&self, other: &Self) -> Self {
        let order = self.order.min(other.order);
        let level = self.level.lcm(&other.level);
        let mut out = QSeries { level, denom: self.denom.lcm(&other.denom), order, terms: BTreeMap::new() };
        for (e, c) in self.terms.range(..order).chain(other.terms.range(..order)) {
            out.insert(*e, c.clone());
        }
        out.relevel();
        out
    }

    pub fn neg(&self) -> Self {
        let mut out = self.clone();
        for c in out.terms.values_mut() {
            *c = c.neg();
        }
        out
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.neg())
    }

    pub fn scale(&self, c: &CycNum) -> Self {
        let level = self.level.lcm(&c.level());
        let mut out = Self::zero(level, self.denom, self.order);
        if c.is_zero() {
            return out;
        }
        for (e, x) in &self.terms {
            out.insert(*e, x.mul(c));
        }
        out.relevel();
        out
    }

    pub fn scale_rational(&self, r: &BigRational) -> Self {
        let mut out = Self::zero(self.level, self.denom, self.order);
        for (e, x) in &self.terms {
            out.insert(*e, x.scale(r));
        }
        out
    }

    /// Multiplies by `q^x`; the order moves with the terms.
    pub fn shift(&self, x: Rational64) -> Self {
        let terms = self.terms.iter().map(|(e, c)| (*e + x, c.clone())).collect();
        QSeries {
            level: self.level,
            denom: self.denom.lcm(x.denom()),
            order: self.order + x,
            terms,
        }
    }

    /// `f(q) ↦ f(q^k)` for a positive integer `k`.
    pub fn dilate(&self, k: i64) -> Self {
        assert!(k > 0, "dilation factor must be positive");
        let k = Rational64::from_integer(k);
        let terms = self.terms.iter().map(|(e, c)| (*e * k, c.clone())).collect();
        let denom = self.terms.keys().fold(1, |d, e: &Rational64| d.lcm(&(*e * k).denom()));
        QSeries { level: self.level, denom: denom.max(1), order: self.order * k, terms }
    }

    /// Applies `f` to every coefficient (used for Galois twists and phases).
    pub fn map_coeffs(&self, mut f: impl FnMut(Rational64, &CycNum) -> Result<CycNum>) -> Result<Self> {
        let mut out = Self::zero(1, self.denom, self.order);
        let mut mapped = Vec::with_capacity(self.terms.len());
        for (e, c) in &self.terms {
            let v = f(*e, c)?;
            out.level = out.level.lcm(&v.level());
            mapped.push((*e, v));
        }
        for (e, v) in mapped {
            out.insert(e, v);
        }
        out.relevel();
        Ok(out)
    }

    pub fn mul(&self, other: &Self) -> Self {
        let order = (self.order + other.valuation()).min(other.order + self.valuation());
        let level = self.level.lcm(&other.level);
        let mut acc: BTreeMap<Rational64, CycNum> = BTreeMap::new();
        for (ea, ca) in &self.terms {
            for (eb, cb) in &other.terms {
                let e = *ea + *eb;
                if e >= order {
                    break;
                }
                let p = ca.mul(cb);
                match acc.get_mut(&e) {
                    Some(v) => *v = v.add(&p),
                    None => {
                        acc.insert(e, p);
                    }
                }
            }
        }
        let mut out = QSeries { level, denom: self.denom.lcm(&other.denom), order, terms: BTreeMap::new() };
        for (e, c) in acc {
            out.insert(e, c);
        }
        out.relevel();
        out
    }

    /// Multiplicative inverse; the leading exponent negates and the order
    /// becomes `O − 2v`.
    pub fn invert(&self) -> Result<Self> {
        let (v, lead) = self
            .leading()
            .ok_or_else(|| Error::NotInvertible("no nonzero coefficient below the order".into()))?;
        let lead_inv = lead.inv()?;
        let d = self.denom;
        let n = ((self.order - v) * d).to_integer();
        let n = usize::try_from(n).unwrap_or(0);
        let a: Vec<Option<&CycNum>> = (0..n)
            .map(|i| self.terms.get(&(v + Rational64::new(i as i64, d))))
            .collect();
        let mut b: Vec<CycNum> = Vec::with_capacity(n);
        for k in 0..n {
            if k == 0 {
                b.push(lead_inv.clone());
                continue;
            }
            let mut s = CycNum::zero(self.level);
            for i in 1..=k {
                if let Some(ai) = a[i] {
                    if !b[k - i].is_zero() {
                        s = s.add(&ai.mul(&b[k - i]));
                    }
                }
            }
            b.push(s.mul(&lead_inv).neg());
        }
        let order = self.order - v - v;
        let mut out = Self::zero(self.level.lcm(&lead_inv.level()), d, order);
        for (k, c) in b.into_iter().enumerate() {
            out.insert(-v + Rational64::new(k as i64, d), c);
        }
        out.relevel();
        Ok(out)
    }

    pub fn div(&self, other: &Self) -> Result<Self> {
        Ok(self.mul(&other.invert()?))
    }

    pub fn pow(&self, e: i64) -> Result<Self> {
        let base = if e < 0 { self.invert()? } else { self.clone() };
        let mut acc = QSeries::one(base.order - base.valuation());
        for _ in 0..e.unsigned_abs() {
            acc = acc.mul(&base);
        }
        Ok(acc)
    }

    /// Compares through the smaller of the two orders.
    pub fn agrees_with(&self, other: &Self) -> std::result::Result<(), Mismatch> {
        let order = self.order.min(other.order);
        let keys: std::collections::BTreeSet<Rational64> = self
            .terms
            .range(..order)
            .chain(other.terms.range(..order))
            .map(|(e, _)| *e)
            .collect();
        for e in keys {
            let a = self.coeff(e);
            let b = other.coeff(e);
            if a != b {
                return Err(Mismatch { exponent: e, left: a, right: b });
            }
        }
        Ok(())
    }

    /// Rational coefficients on the lattice `start + i/denom` below the order.
    pub fn to_dense_rational(&self, start: Rational64, denom: i64) -> Result<Vec<BigRational>> {
        let n = ((self.order - start) * denom).ceil().to_integer().max(0) as usize;
        let mut out = vec![BigRational::zero(); n];
        for (e, c) in &self.terms {
            let idx = (*e - start) * denom;
            if !idx.is_integer() || idx < Rational64::zero() {
                return Err(Error::Denominator(format!("exponent {} off the lattice", fmt_small(*e))));
            }
            let r = c
                .as_rational()
                .ok_or_else(|| Error::Consistency("expected rational coefficients".into()))?;
            out[idx.to_integer() as usize] = r;
        }
        Ok(out)
    }

    pub fn to_json(&self) -> Value {
        let level = if self.is_rational() { json!("Q") } else { json!(self.level) };
        let terms: Vec<Value> = self
            .terms
            .iter()
            .map(|(e, c)| {
                let coeff = match (self.is_rational(), c.as_rational()) {
                    (true, Some(r)) => json!(fmt_big(&r)),
                    _ => {
                        let c = c.lift_level(self.level).expect("uniform level");
                        json!(c.coeffs().iter().map(fmt_big).collect::<Vec<_>>())
                    }
                };
                json!([fmt_small(*e), coeff])
            })
            .collect();
        json!({
            "denom": self.denom,
            "order": fmt_small(self.order),
            "coeff_level": level,
            "terms": terms,
        })
    }

    pub fn from_json(v: &Value) -> Result<Self> {
        let bad = |what: &str| Error::Parse(format!("series JSON: {what}"));
        let denom = v["denom"].as_i64().ok_or_else(|| bad("denom"))?;
        let order = parse_small(v["order"].as_str().ok_or_else(|| bad("order"))?)?;
        let level = match &v["coeff_level"] {
            Value::String(s) if s == "Q" => 1,
            x => x.as_u64().ok_or_else(|| bad("coeff_level"))?,
        };
        let mut terms = Vec::new();
        for t in v["terms"].as_array().ok_or_else(|| bad("terms"))? {
            let e = parse_small(t[0].as_str().ok_or_else(|| bad("exponent"))?)?;
            let c = match &t[1] {
                Value::String(s) => CycNum::from_rational(level, parse_big(s)?),
                Value::Array(a) => {
                    let cs = a
                        .iter()
                        .map(|x| parse_big(x.as_str().ok_or_else(|| bad("coefficient"))?))
                        .collect::<Result<Vec<_>>>()?;
                    CycNum::from_coeffs(level, cs)?
                }
                _ => return Err(bad("coefficient")),
            };
            if e >= order {
                return Err(bad("exponent at or beyond the order"));
            }
            terms.push((e, c));
        }
        let mut s = Self::from_terms(denom, order, terms)?;
        s.denom = denom;
        Ok(s)
    }
}

/// Integer series on the lattice `(1/denom)Z`, starting at exponent 0,
/// known below `order`. Used to expand long products quickly.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DenseProduct {
    denom: i64,
    order: Rational64,
    c: Vec<BigInt>,
}

impl DenseProduct {
    pub fn new(denom: i64, order: Rational64) -> Self {
        let n = (order * denom).ceil().to_integer().max(0) as usize;
        let mut c = vec![BigInt::zero(); n];
        if n > 0 {
            c[0] = BigInt::one();
        }
        DenseProduct { denom, order, c }
    }

    fn index(&self, x: Rational64) -> Result<usize> {
        let k = x * self.denom;
        if !k.is_integer() || k <= Rational64::zero() {
            return Err(Error::Denominator(format!(
                "exponent {} is not a positive multiple of 1/{}",
                fmt_small(x),
                self.denom
            )));
        }
        Ok(k.to_integer() as usize)
    }

    /// Multiplies by `(1 − q^x)^power`.
    pub fn binomial(&mut self, x: Rational64, power: i64) -> Result<()> {
        let k = self.index(x)?;
        let n = self.c.len();
        if k >= n {
            return Ok(());
        }
        for _ in 0..power.unsigned_abs() {
            if power > 0 {
                for i in (k..n).rev() {
                    let t = self.c[i - k].clone();
                    self.c[i] -= t;
                }
            } else {
                for i in k..n {
                    let t = self.c[i - k].clone();
                    self.c[i] += t;
                }
            }
        }
        Ok(())
    }

    /// Multiplies by `(q^e; q^step)_∞^power`.
    pub fn pochhammer(&mut self, e: Rational64, step: Rational64, power: i64) -> Result<()> {
        if e <= Rational64::zero() {
            return Err(Error::VanishingFactor(format!(
                "(q^{}; q^{})_∞ has a vanishing factor",
                fmt_small(e),
                fmt_small(step)
            )));
        }
        if step <= Rational64::zero() {
            return Err(Error::Domain("Pochhammer step must be positive".into()));
        }
        let mut x = e;
        while x < self.order {
            self.binomial(x, power)?;
            x += step;
        }
        Ok(())
    }

    /// Multiplies by `θ(q^e; q^modulus)^power`.
    pub fn theta(&mut self, e: Rational64, modulus: Rational64, power: i64) -> Result<()> {
        if e <= Rational64::zero() || e >= modulus {
            return Err(Error::VanishingFactor(format!(
                "θ(q^{}; q^{}) vanishes identically",
                fmt_small(e),
                fmt_small(modulus)
            )));
        }
        self.pochhammer(e, modulus, power)?;
        self.pochhammer(modulus - e, modulus, power)
    }

    pub fn coeffs(&self) -> &[BigInt] {
        &self.c
    }

    pub fn into_series(self) -> QSeries {
        QSeries::from_dense(self.denom, Rational64::zero(), self.order, &self.c)
    }
}

fn lattice_denom(xs: &[Rational64]) -> i64 {
    xs.iter().fold(1, |d, x| d.lcm(x.denom()))
}

/// `(q^e; q^step)_∞` through `order`.
pub fn qs_pochhammer(e: Rational64, step: Rational64, order: Rational64) -> Result<QSeries> {
    let mut p = DenseProduct::new(lattice_denom(&[e, step]), order);
    p.pochhammer(e, step, 1)?;
    Ok(p.into_series())
}

/// `θ(q^e; q^modulus) = (q^e; q^modulus)_∞ (q^{modulus−e}; q^modulus)_∞`.
pub fn qs_theta(e: Rational64, modulus: Rational64, order: Rational64) -> Result<QSeries> {
    let mut p = DenseProduct::new(lattice_denom(&[e, modulus]), order);
    p.theta(e, modulus, 1)?;
    Ok(p.into_series())
}

/// `η = q^{1/24} (q;q)_∞` through `order`.
pub fn qs_eta(order: Rational64) -> Result<QSeries> {
    let off = Rational64::new(1, 24);
    if order <= off {
        return Err(Error::Domain("eta needs an order above 1/24".into()));
    }
    let mut p = DenseProduct::new(1, order - off);
    p.pochhammer(Rational64::one(), Rational64::one(), 1)?;
    let mut s = p.into_series().shift(off);
    s.denom = s.denom.lcm(&24);
    Ok(s)
}

/// `1/(q;q)_n` as a dense rational series through `order`.
fn inv_finite_pochhammer(n: i64, order: Rational64) -> DenseProduct {
    let mut p = DenseProduct::new(1, order);
    for j in 1..=n {
        p.binomial(Rational64::from_integer(j), -1).expect("positive exponent");
    }
    p
}

/// A polynomial in an auxiliary variable `z` with series coefficients.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BiSeries {
    pub coeffs: Vec<QSeries>,
}

/// Selberg's `S(z;q) = Σ z^n q^{n²}/(q;q)_n` through `z^zdeg` and `q^order`.
pub fn selberg_s(zdeg: usize, order: i64) -> BiSeries {
    let order_r = Rational64::from_integer(order);
    let coeffs = (0..=zdeg as i64)
        .map(|n| {
            let body = inv_finite_pochhammer(n, order_r - n * n);
            if n * n >= order {
                QSeries::zero(1, 1, order_r)
            } else {
                body.into_series().shift(Rational64::from_integer(n * n))
            }
        })
        .collect();
    BiSeries { coeffs }
}

/// Checks `S(z) = S(zq) + zq·S(zq²)` coefficientwise through `(z^zdeg, q^order)`.
pub fn selberg_recurrence_check(zdeg: usize, order: i64) -> std::result::Result<(), Mismatch> {
    let s = selberg_s(zdeg, order);
    for n in 0..=zdeg {
        let sn = &s.coeffs[n];
        // z^n coefficient of S(zq) is q^n S_n; of zq·S(zq²) it is q^{1+2(n-1)} S_{n-1}.
        let mut rhs = sn.shift(Rational64::from_integer(n as i64)).truncate(sn.order());
        if n > 0 {
            let prev = s.coeffs[n - 1].shift(Rational64::from_integer(2 * n as i64 - 1));
            rhs = rhs.add(&prev.truncate(sn.order()));
        }
        sn.agrees_with(&rhs)?;
    }
    Ok(())
}

/// Sum side of the first (`shift = 0`) or second (`shift = 1`) classical identity.
pub fn rr_sum_side(shift: i64, order: i64) -> QSeries {
    let order_r = Rational64::from_integer(order);
    let mut acc = QSeries::zero(1, 1, order_r);
    let mut n = 0i64;
    while n * n + shift * n < order {
        let e = n * n + shift * n;
        let body = inv_finite_pochhammer(n, order_r - e).into_series();
        acc = acc.add(&body.shift(Rational64::from_integer(e)));
        n += 1;
    }
    acc
}

/// Product side `1/((q^{1+s};q^5)_∞ (q^{4−s};q^5)_∞)` of the classical identities.
pub fn rr_product_side(shift: i64, order: i64) -> QSeries {
    let mut p = DenseProduct::new(1, Rational64::from_integer(order));
    p.theta(Rational64::from_integer(1 + shift), Rational64::from_integer(5), -1)
        .expect("valid theta");
    p.into_series()
}

/// Both classical Rogers–Ramanujan identities through `order`.
pub fn rr_classical_check(order: i64) -> std::result::Result<(), Mismatch> {
    for shift in 0..2 {
        rr_sum_side(shift, order).agrees_with(&rr_product_side(shift, order))?;
    }
    Ok(())
}

/// The Rogers–Ramanujan continued fraction as a product,
/// `q^{1/5} ∏ (1−q^{5n+1})(1−q^{5n+4}) / ((1−q^{5n+2})(1−q^{5n+3}))`.
pub fn rr_continued_fraction(order: Rational64) -> QSeries {
    let off = Rational64::new(1, 5);
    let mut p = DenseProduct::new(1, order - off);
    let five = Rational64::from_integer(5);
    p.theta(Rational64::one(), five, 1).expect("valid theta");
    p.theta(Rational64::from_integer(2), five, -1).expect("valid theta");
    p.into_series().shift(off)
}

/// Integer coefficient list (index = exponent) of a rational series with
/// integral exponents; used by tests and the CLI text view.
pub fn integer_coeffs(s: &QSeries) -> Option<Vec<i64>> {
    let v = s.valuation();
    if !v.is_integer() || v < Rational64::zero() {
        return None;
    }
    let n = s.order().ceil().to_integer().max(0) as usize;
    let mut out = vec![0i64; n];
    for (e, c) in s.terms() {
        if !e.is_integer() {
            return None;
        }
        let r = c.as_rational()?;
        if !r.is_integer() {
            return None;
        }
        out[e.to_integer() as usize] = r.to_integer().to_i64()?;
    }
    Some(out)
}
