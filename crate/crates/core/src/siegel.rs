//! Siegel functions `g_a`, their products, and the units `r_{ℓ,m}`, `s_{ℓ,m}`.
//!
//! A [`UnitExpr`] is a formal product `e(x) ∏ g_a(sτ)^{m(a)}` with reduced
//! indices. Expansion works on integer vectors in `Z[x]/(x^ℓ − 1)` and only
//! lifts to `Q(ζ_{2ℓ²})` at the end.

use std::collections::BTreeMap;
use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::{BigRational, Rational64};
use num_traits::{One, Zero};

use crate::cyclotomic::{cyc_e, CycNum};
use crate::error::{Error, Result};
use crate::qseries::{Mismatch, QSeries};
use crate::rational::{fract, modp};
use crate::units::bernoulli_b2_frac;

/// Outcome of a series comparison: `Ok(())` or the first mismatch.
pub type Agreement = std::result::Result<(), Mismatch>;

/// `a = (p/ℓ, r/ℓ)` with integer numerators.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct SiegelIndex {
    pub p: i64,
    pub r: i64,
    pub level: u64,
}

impl fmt::Display for SiegelIndex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}/{}, {}/{})", self.p, self.level, self.r, self.level)
    }
}

impl SiegelIndex {
    pub fn new(p: i64, r: i64, level: u64) -> Result<Self> {
        let l = level as i64;
        if level < 2 {
            return Err(Error::InvalidIndex(format!("level {level} is too small")));
        }
        if modp(p, l) == 0 && modp(r, l) == 0 {
            return Err(Error::InvalidIndex(format!("({p}, {r})/{level} lies in Z²")));
        }
        Ok(SiegelIndex { p, r, level })
    }

    pub fn a1(&self) -> Rational64 {
        Rational64::new(self.p, self.level as i64)
    }

    pub fn a2(&self) -> Rational64 {
        Rational64::new(self.r, self.level as i64)
    }

    pub fn is_reduced(&self) -> bool {
        let l = self.level as i64;
        (0..l).contains(&self.p) && (0..l).contains(&self.r)
    }

    /// Reduces into `[0,1)²`, returning `x` with `g_self = e(x)·g_reduced`.
    ///
    /// Uses `g_{(a1, a2+1)} = e((a1−1)/2) g_a` and `g_{(a1+1, a2)} = −e(−a2/2) g_a`.
    pub fn reduce(&self) -> (SiegelIndex, Rational64) {
        let l = self.level as i64;
        let (t, r) = self.r.div_mod_floor(&l);
        let (u, p) = self.p.div_mod_floor(&l);
        let mut x = Rational64::from_integer(t) * (self.a1() - 1) / 2;
        let a2 = Rational64::new(r, l);
        x += Rational64::from_integer(u) * (Rational64::new(1, 2) - a2 / 2);
        (SiegelIndex { p, r, level: self.level }, fract(x))
    }
}

/// A formal product `e(prefactor) ∏ g_a(scale·τ)^{m(a)}` over reduced indices.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct UnitExpr {
    level: u64,
    scale: u64,
    prefactor: Rational64,
    factors: BTreeMap<(i64, i64), i64>,
}

impl UnitExpr {
    pub fn new(level: u64, scale: u64) -> Result<Self> {
        if level < 2 || scale == 0 {
            return Err(Error::InvalidIndex(format!("level {level}, scale {scale}")));
        }
        Ok(UnitExpr { level, scale, prefactor: Rational64::zero(), factors: BTreeMap::new() })
    }

    pub fn level(&self) -> u64 {
        self.level
    }

    pub fn scale(&self) -> u64 {
        self.scale
    }

    /// The root-of-unity prefactor as `x` in `e(x)`, normalized to `[0,1)`.
    pub fn prefactor(&self) -> Rational64 {
        self.prefactor
    }

    pub fn factors(&self) -> impl Iterator<Item = (SiegelIndex, i64)> + '_ {
        let level = self.level;
        self.factors.iter().map(move |(&(p, r), &m)| (SiegelIndex { p, r, level }, m))
    }

    pub fn times_root(mut self, x: Rational64) -> Self {
        self.prefactor = fract(self.prefactor + x);
        self
    }

    /// Multiplies by `g_a^exp`, reducing the index and absorbing the phase.
    pub fn with(mut self, a: SiegelIndex, exp: i64) -> Result<Self> {
        if a.level != self.level {
            return Err(Error::Level(format!("index level {} in a level-{} product", a.level, self.level)));
        }
        let (red, x) = a.reduce();
        self.prefactor = fract(self.prefactor + x * exp);
        let e = self.factors.entry((red.p, red.r)).or_insert(0);
        *e += exp;
        if *e == 0 {
            self.factors.remove(&(red.p, red.r));
        }
        Ok(self)
    }

    pub fn with_numerators(self, p: i64, r: i64, exp: i64) -> Result<Self> {
        let a = SiegelIndex::new(p, r, self.level)?;
        self.with(a, exp)
    }

    pub fn mul(&self, other: &Self) -> Result<Self> {
        if self.level != other.level || self.scale != other.scale {
            return Err(Error::Level("products need equal level and argument scale".into()));
        }
        let mut out = self.clone().times_root(other.prefactor);
        for (a, m) in other.factors() {
            out = out.with(a, m)?;
        }
        Ok(out)
    }

    pub fn inv(&self) -> Self {
        UnitExpr {
            level: self.level,
            scale: self.scale,
            prefactor: fract(-self.prefactor),
            factors: self.factors.iter().map(|(k, m)| (*k, -m)).collect(),
        }
    }

    pub fn total_multiplicity(&self) -> i64 {
        self.factors.values().sum()
    }

    /// `scale · Σ m(a) B₂(a1)/2`.
    pub fn leading_exponent(&self) -> Rational64 {
        let s: Rational64 = self
            .factors()
            .map(|(a, m)| bernoulli_b2_frac(a.a1()) * m / 2)
            .fold(Rational64::zero(), |x, y| x + y);
        s * self.scale as i64
    }

    /// Rewrites `g_{(p/ℓ,0)}(ℓτ)` factors as capital-g products of `g_a(τ)`
    /// using `g_{(p/ℓ,0)}(ℓτ) = e(−k(p−ℓ)/(2ℓ)) g(p)`.
    pub fn to_scale_one(&self) -> Result<Self> {
        if self.scale == 1 {
            return Ok(self.clone());
        }
        let l = self.level as i64;
        if self.scale != self.level || l % 2 == 0 {
            return Err(Error::UnsupportedLevel(format!(
                "only odd level with scale ℓ converts (level {}, scale {})",
                self.level, self.scale
            )));
        }
        let k = (l - 1) / 2;
        let mut out = UnitExpr::new(self.level, 1)?.times_root(self.prefactor);
        for (a, m) in self.factors() {
            if a.r != 0 {
                return Err(Error::UnsupportedLevel(format!(
                    "factor {a} at scale ℓ has a nonzero second coordinate"
                )));
            }
            out = out.times_root(Rational64::new(-k * (a.p - l), 2 * l) * m);
            for s in 0..l {
                out = out.with_numerators(a.p, s, m)?;
            }
        }
        Ok(out)
    }

    /// Exact expansion through `order`, coefficients in `Q(ζ_{2ℓ²})`.
    pub fn expand(&self, order: Rational64) -> Result<QSeries> {
        let l = self.level as i64;
        let big_m = 2 * self.level * self.level;
        let lead = self.leading_exponent();
        let denom = l.lcm(lead.denom());
        let body_order = order - lead;
        if body_order <= Rational64::zero() {
            return Ok(QSeries::zero(big_m, denom, order));
        }
        let n_slots = (body_order * l).ceil().to_integer() as usize;
        let mut body = CyclicBody::new(l as usize, n_slots);
        let mut constant = CycNum::one(self.level);
        let mut root = self.prefactor;
        let s = self.scale as i64;
        for (a, m) in self.factors() {
            root += Rational64::from_integer(m) * (Rational64::new(1, 2) + a.a2() * (a.a1() - 1) / 2);
            let mut n = 1i64;
            loop {
                let k1 = s * (l * (n - 1) + a.p);
                let k2 = s * (l * n - a.p);
                if k1.min(k2) as usize >= n_slots {
                    break;
                }
                if k1 == 0 {
                    let f = CycNum::one(self.level).sub(&CycNum::zeta_power(self.level, a.r));
                    constant = constant.mul(&f.pow(m)?);
                } else {
                    body.binomial(k1 as usize, a.r, m);
                }
                body.binomial(k2 as usize, -a.r, m);
                n += 1;
            }
        }
        let phase = cyc_e(fract(root), big_m)?;
        let scalar = constant.lift_level(big_m)?.mul(&phase);
        let terms = body.into_cyc(self.level).into_iter().enumerate().filter_map(|(i, c)| {
            if c.is_zero() {
                None
            } else {
                Some((lead + Rational64::new(i as i64, l), c.lift_level(big_m).unwrap().mul(&scalar)))
            }
        });
        let mut series = QSeries::from_terms(denom, order, terms)?;
        if series.level() != big_m {
            series = series.lift_level(big_m)?;
        }
        Ok(series)
    }
}

/// Dense series body with coefficients in `Z[x]/(x^ℓ − 1)`.
struct CyclicBody {
    l: usize,
    c: Vec<Vec<BigInt>>,
}

impl CyclicBody {
    fn new(l: usize, n: usize) -> Self {
        let mut c = vec![vec![BigInt::zero(); l]; n];
        if n > 0 {
            c[0][0] = BigInt::one();
        }
        CyclicBody { l, c }
    }

    /// Multiplies by `(1 − x^j q^{k/ℓ})^power`.
    fn binomial(&mut self, k: usize, j: i64, power: i64) {
        let n = self.c.len();
        if k == 0 || k >= n {
            return;
        }
        let l = self.l;
        let j = j.rem_euclid(l as i64) as usize;
        for _ in 0..power.unsigned_abs() {
            if power > 0 {
                for i in (k..n).rev() {
                    let (lo, hi) = self.c.split_at_mut(i);
                    rotate_into(&mut hi[0], &lo[i - k], j, l, true);
                }
            } else {
                for i in k..n {
                    let (lo, hi) = self.c.split_at_mut(i);
                    rotate_into(&mut hi[0], &lo[i - k], j, l, false);
                }
            }
        }
    }

    fn into_cyc(self, level: u64) -> Vec<CycNum> {
        self.c.into_iter().map(|v| CycNum::from_int_powers(level, v)).collect()
    }
}

fn rotate_into(dst: &mut [BigInt], src: &[BigInt], j: usize, l: usize, negate: bool) {
    for (t, x) in src.iter().enumerate() {
        if x.is_zero() {
            continue;
        }
        let idx = (t + j) % l;
        if negate {
            dst[idx] -= x;
        } else {
            dst[idx] += x;
        }
    }
}

fn check_odd_level(l: u64) -> Result<i64> {
    if l < 5 || l % 2 == 0 {
        return Err(Error::UnsupportedLevel(format!("need an odd level ℓ ≥ 5, got {l}")));
    }
    Ok(l as i64)
}

fn check_nonzero_mod(m: i64, l: u64) -> Result<()> {
    if modp(m, l as i64) == 0 {
        return Err(Error::InvalidIndex(format!("{m} ≡ 0 mod {l}")));
    }
    Ok(())
}

/// `g_a(τ)` through `order`; the index must already be reduced.
pub fn siegel_g(a: &SiegelIndex, order: Rational64) -> Result<QSeries> {
    if !a.is_reduced() {
        return Err(Error::ReductionRequired(format!("{a} is not in [0,1)²")));
    }
    UnitExpr::new(a.level, 1)?.with(*a, 1)?.expand(order)
}

/// `g(m) = ∏_{s=0}^{ℓ−1} g_{(m/ℓ, s/ℓ)}(τ)` as a product expression.
pub fn g_capital_expr(m: i64, l: u64) -> Result<UnitExpr> {
    check_nonzero_mod(m, l)?;
    let mut e = UnitExpr::new(l, 1)?;
    for s in 0..l as i64 {
        e = e.with_numerators(m, s, 1)?;
    }
    Ok(e)
}

pub fn g_capital(m: i64, l: u64, order: Rational64) -> Result<QSeries> {
    g_capital_expr(m, l)?.expand(order)
}

/// The closed form `e(k(m−ℓ)/(2ℓ)) g_{(m/ℓ,0)}(ℓτ)` for `g(m)`.
pub fn lemma_expr(m: i64, l: u64) -> Result<UnitExpr> {
    let li = check_odd_level(l)?;
    check_nonzero_mod(m, l)?;
    let k = (li - 1) / 2;
    UnitExpr::new(l, l)?
        .times_root(Rational64::new(k * (m - li), 2 * li))
        .with_numerators(m, 0, 1)
}

/// Compares `g(m)` with its closed form as exact series.
pub fn reduction_lemma_check(l: u64, m: i64, order: Rational64) -> Result<Agreement> {
    let lhs = g_capital(m, l, order)?;
    let rhs = lemma_expr(m, l)?.expand(order)?;
    Ok(lhs.agrees_with(&rhs))
}

/// `(−1)^{m−1} g_{(m/ℓ,0)}(ℓτ) / g_{(1/ℓ,0)}(ℓτ)`, i.e. `r_{ℓ,k+1−m}`.
pub fn r_expr(l: u64, m: i64) -> Result<UnitExpr> {
    check_odd_level(l)?;
    check_nonzero_mod(m, l)?;
    UnitExpr::new(l, l)?
        .times_root(Rational64::new(m - 1, 2))
        .with_numerators(m, 0, 1)?
        .with_numerators(1, 0, -1)
}

/// The same unit as [`r_expr`] written as `(−1)^{m−1} e(−k(m−1)/(2ℓ)) g(m)/g(1)`.
pub fn r_expr_capital(l: u64, m: i64) -> Result<UnitExpr> {
    let li = check_odd_level(l)?;
    let k = (li - 1) / 2;
    let g1 = g_capital_expr(1, l)?;
    g_capital_expr(m, l)?
        .mul(&g1.inv())
        .map(|e| e.times_root(Rational64::new(m - 1, 2) - Rational64::new(k * (m - 1), 2 * li)))
}

/// `r_{ℓ,k+1−m}` with rational coefficients.
pub fn r_unit(l: u64, m: i64, order: Rational64) -> Result<QSeries> {
    r_expr(l, m)?.expand(order)?.to_rational()
}

/// Checks that the capital-g form of `r_{ℓ,k+1−m}` matches the quotient form.
pub fn r_forms_check(l: u64, m: i64, order: Rational64) -> Result<Agreement> {
    let a = r_expr(l, m)?.expand(order)?;
    let b = r_expr_capital(l, m)?.expand(order)?;
    Ok(a.agrees_with(&b))
}

fn check_s_range(l: u64, m: i64) -> Result<i64> {
    let li = check_odd_level(l)?;
    let k = (li - 1) / 2;
    if m < 1 || m > k {
        return Err(Error::InvalidIndex(format!("s_{{{l},{m}}} needs 1 ≤ m ≤ {k}")));
    }
    Ok(k)
}

/// `s_{ℓ,m} = ∏_{j=1}^m g_{(2j/ℓ,0)}(ℓτ) / g_{(j/ℓ,0)}(ℓτ)`.
pub fn s_expr_quotient(l: u64, m: i64) -> Result<UnitExpr> {
    check_s_range(l, m)?;
    let mut e = UnitExpr::new(l, l)?;
    for j in 1..=m {
        e = e.with_numerators(2 * j, 0, 1)?.with_numerators(j, 0, -1)?;
    }
    Ok(e)
}

/// `s_{ℓ,m} = e(−km(m+1)/(4ℓ)) ∏_{j=1}^m g(2j)/g(j)`.
pub fn s_expr_capital(l: u64, m: i64) -> Result<UnitExpr> {
    let k = check_s_range(l, m)?;
    let li = l as i64;
    let mut e = UnitExpr::new(l, 1)?.times_root(Rational64::new(-k * m * (m + 1), 4 * li));
    for j in 1..=m {
        e = e.mul(&g_capital_expr(2 * j, l)?)?;
        e = e.mul(&g_capital_expr(j, l)?.inv())?;
    }
    Ok(e)
}

/// Both constructions of `s_{ℓ,m}`, checked against each other; the result
/// is returned with rational coefficients.
pub fn s_unit(l: u64, m: i64, order: Rational64) -> Result<QSeries> {
    let a = s_expr_quotient(l, m)?.expand(order)?;
    let b = s_expr_capital(l, m)?.expand(order)?;
    if let Err(mm) = a.agrees_with(&b) {
        return Err(Error::Consistency(format!("the two forms of s_{{{l},{m}}} differ at {mm}")));
    }
    a.to_rational()
}

/// `m(m+1)(2m+1−ℓ)/(4ℓ)`: the leading exponent of `s_{ℓ,m}`.
pub fn s_leading_exponent(l: u64, m: i64) -> Rational64 {
    Rational64::new(m * (m + 1) * (2 * m + 1 - l as i64), 4 * l as i64)
}

/// `(m² − ℓm + ℓ − 1)/(2ℓ)`: the leading exponent of `r_unit(ℓ, m)` for `1 ≤ m < ℓ`.
pub fn r_leading_exponent(l: u64, m: i64) -> Rational64 {
    let l = l as i64;
    Rational64::new(m * m - l * m + l - 1, 2 * l)
}

/// Checks `s_{ℓ,m} = ∏_{j=1}^m (−1)^j r_{ℓ,k+1−2j} / r_{ℓ,k+1−j}` by series arithmetic.
pub fn s_from_r_check(l: u64, m: i64, order: Rational64) -> Result<Agreement> {
    let s = s_unit(l, m, order)?;
    // Quotients of series lose precision; retry with more headroom until
    // the product is known through the target order.
    let mut slack = Rational64::from_integer(m + 2);
    for _ in 0..4 {
        let work = order + slack;
        let mut prod = QSeries::one(work);
        for j in 1..=m {
            let num = r_unit(l, 2 * j, work)?;
            let den = r_unit(l, j, work)?;
            let sign = if j % 2 == 0 { 1 } else { -1 };
            let q = num.div(&den)?.scale_rational(&BigRational::from_integer(sign.into()));
            prod = prod.mul(&q);
        }
        if prod.order() >= order {
            return Ok(s.agrees_with(&prod.truncate(order)));
        }
        slack *= 4;
    }
    Err(Error::Internal("s-from-r product never reached the target order".into()))
}

/// The continued fraction `r(τ) = −1/r_{5,1}` built from `r_unit(5, 2)`.
pub fn continued_fraction_via_siegel(order: Rational64) -> Result<QSeries> {
    let r51 = r_unit(5, 2, order + Rational64::new(2, 5))?;
    Ok(r51.invert()?.neg().truncate(order))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::qseries::rr_continued_fraction;
    use crate::rational::rat;

    fn idx(p: i64, r: i64, l: u64) -> SiegelIndex {
        SiegelIndex::new(p, r, l).unwrap()
    }

    #[test]
    fn leading_exponents_of_single_factors() {
        let g = siegel_g(&idx(1, 0, 5), rat(2, 1)).unwrap();
        assert_eq!(g.valuation(), rat(1, 300));
        let h = siegel_g(&idx(1, 0, 2), rat(2, 1)).unwrap();
        assert_eq!(h.valuation(), rat(-1, 24));
        assert_eq!(h.leading().unwrap().1, &CycNum::from_int(8, -1));
    }

    #[test]
    fn unreduced_index_is_rejected() {
        assert!(matches!(
            siegel_g(&idx(6, 0, 5), rat(2, 1)),
            Err(Error::ReductionRequired(_))
        ));
        assert!(SiegelIndex::new(5, 10, 5).is_err());
    }

    #[test]
    fn conjugate_indices_give_conjugate_series() {
        let a = siegel_g(&idx(2, 1, 5), rat(3, 1)).unwrap();
        // g_{(a1,−a2)} with the phase picked up when −a2 is reduced.
        let b = UnitExpr::new(5, 1).unwrap().with(idx(2, -1, 5), 1).unwrap().expand(rat(3, 1)).unwrap();
        let plain = siegel_g(&idx(2, 4, 5), rat(3, 1)).unwrap();
        assert!(plain.agrees_with(&b).is_err());
        let conj = a.map_coeffs(|_, c| Ok(c.conj())).unwrap();
        assert!(conj.agrees_with(&b).is_ok());
    }

    #[test]
    fn reduction_lemma_small_cases() {
        for (l, m) in [(5, 1), (5, 3), (7, 3), (9, 2)] {
            assert!(reduction_lemma_check(l, m, rat(6, 1)).unwrap().is_ok(), "ℓ={l} m={m}");
        }
    }

    #[test]
    fn capital_g_leading_exponent() {
        for m in 1..7 {
            let e = g_capital_expr(m, 7).unwrap();
            assert_eq!(e.leading_exponent(), bernoulli_b2_frac(rat(m, 7)) * 7 / 2);
        }
        assert!(g_capital_expr(14, 7).is_err());
    }

    #[test]
    fn capital_g_is_periodic_up_to_a_root() {
        let a = g_capital(2, 5, rat(4, 1)).unwrap();
        let b = g_capital(7, 5, rat(4, 1)).unwrap();
        let (e, ca) = a.leading().unwrap();
        let cb = b.coeff(e);
        let ratio = cb.div(ca).unwrap();
        let scaled = a.scale(&ratio);
        assert!(scaled.agrees_with(&b).is_ok());
    }

    #[test]
    fn r_unit_values_at_level_five() {
        let one = r_unit(5, 1, rat(5, 1)).unwrap();
        assert!(one.agrees_with(&QSeries::one(rat(5, 1))).is_ok());
        let r = rr_continued_fraction(rat(6, 1));
        let via = continued_fraction_via_siegel(rat(6, 1)).unwrap();
        assert!(via.agrees_with(&r).is_ok());
    }

    #[test]
    fn r_unit_leading_exponent_and_forms() {
        for (l, m) in [(5u64, 2i64), (7, 2), (7, 3), (9, 4), (11, 5)] {
            let r = r_unit(l, m, rat(3, 1)).unwrap();
            assert_eq!(r.valuation(), r_leading_exponent(l, m));
            assert!(r_forms_check(l, m, rat(3, 1)).unwrap().is_ok());
        }
    }

    #[test]
    fn s_unit_level_five_is_inverse_continued_fraction() {
        let s = s_unit(5, 1, rat(8, 1)).unwrap();
        assert_eq!(s.valuation(), rat(-1, 5));
        let r = rr_continued_fraction(rat(9, 1));
        let prod = s.mul(&r);
        assert!(prod.agrees_with(&QSeries::one(rat(7, 1))).is_ok());
    }

    #[test]
    fn s_unit_leading_exponents() {
        assert_eq!(s_unit(7, 1, rat(2, 1)).unwrap().valuation(), rat(-2, 7));
        assert_eq!(s_unit(9, 2, rat(2, 1)).unwrap().valuation(), rat(-2, 3));
        assert_eq!(s_leading_exponent(7, 2), rat(-3, 7));
    }

    #[test]
    fn s_from_r_small() {
        assert!(s_from_r_check(5, 1, rat(6, 1)).unwrap().is_ok());
        assert!(s_from_r_check(7, 2, rat(6, 1)).unwrap().is_ok());
    }

    #[test]
    fn scale_conversion_preserves_the_series() {
        let e = s_expr_quotient(7, 2).unwrap();
        let a = e.expand(rat(4, 1)).unwrap();
        let b = e.to_scale_one().unwrap().expand(rat(4, 1)).unwrap();
        assert!(a.agrees_with(&b).is_ok());
    }
}
