//! The action of `GL₂(Z/ℓ)/{±I}` on Siegel indices and the stabilizer of
//! `s_{ℓ,m}`, found by filtering every class.

use std::collections::BTreeSet;

use num_rational::Rational64;
use num_traits::Zero;
use rayon::prelude::*;
use serde::Serialize;

use crate::cyclotomic::{cyc_e, CycNum};
use crate::error::{Error, Result};
use crate::qseries::QSeries;
use crate::rational::{gcd, inv_mod, is_prime, modp};
use crate::siegel::{s_unit, Agreement};
use crate::units::{bernoulli_b2_frac, ord_infinity_s};

/// A class of `GL₂(Z/ℓ)` modulo `±I`, stored as the smaller of `γ` and `−γ`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct GL2Class {
    pub a: i64,
    pub b: i64,
    pub c: i64,
    pub d: i64,
    #[serde(skip)]
    pub ell: i64,
}

impl GL2Class {
    pub fn new(a: i64, b: i64, c: i64, d: i64, ell: u64) -> Result<Self> {
        let l = ell as i64;
        let g = [modp(a, l), modp(b, l), modp(c, l), modp(d, l)];
        if gcd(g[0] * g[3] - g[1] * g[2], l) != 1 {
            return Err(Error::Domain(format!("{g:?} is not invertible mod {ell}")));
        }
        let n = g.map(|x| modp(-x, l));
        let [a, b, c, d] = g.min(n);
        Ok(GL2Class { a, b, c, d, ell: l })
    }

    pub fn identity(ell: u64) -> Self {
        Self::new(1, 0, 0, 1, ell).expect("identity is invertible")
    }

    /// `γ_d = (1 0; 0 d)`.
    pub fn gamma_d(d: i64, ell: u64) -> Result<Self> {
        Self::new(1, 0, 0, d, ell)
    }

    pub fn entries(&self) -> [i64; 4] {
        [self.a, self.b, self.c, self.d]
    }

    pub fn det(&self) -> i64 {
        modp(self.a * self.d - self.b * self.c, self.ell)
    }

    pub fn mul(&self, o: &Self) -> Self {
        Self::new(
            self.a * o.a + self.b * o.c,
            self.a * o.b + self.b * o.d,
            self.c * o.a + self.d * o.c,
            self.c * o.b + self.d * o.d,
            self.ell as u64,
        )
        .expect("product of invertible matrices")
    }

    pub fn inv(&self) -> Self {
        let di = inv_mod(self.det(), self.ell).expect("determinant is a unit");
        Self::new(self.d * di, -self.b * di, -self.c * di, self.a * di, self.ell as u64)
            .expect("inverse is invertible")
    }

    /// The representative with upper-left entry 1, when `a ≡ ±1`.
    fn normalized_upper_left(&self) -> Option<[i64; 4]> {
        let l = self.ell;
        if self.a == 1 {
            Some(self.entries())
        } else if self.a == l - 1 {
            Some(self.entries().map(|x| modp(-x, l)))
        } else {
            None
        }
    }
}

fn check_prime(ell: u64) -> Result<()> {
    if ell < 5 || !is_prime(ell) {
        return Err(Error::UnsupportedLevel(format!("ℓ = {ell} must be a prime ≥ 5")));
    }
    Ok(())
}

fn check_m(ell: u64, m: i64) -> Result<()> {
    let k = (ell as i64 - 1) / 2;
    if m < 1 || m > k - 1 {
        return Err(Error::InvalidIndex(format!("m = {m} outside 1..={}", k - 1)));
    }
    Ok(())
}

/// Every class of `GL₂(Z/ℓ)/{±I}` exactly once, in sorted order.
pub fn gl2_classes(ell: u64) -> Vec<GL2Class> {
    let l = ell as i64;
    let mut out = BTreeSet::new();
    for a in 0..l {
        for b in 0..l {
            for c in 0..l {
                for d in 0..l {
                    if let Ok(g) = GL2Class::new(a, b, c, d, ell) {
                        out.insert(g);
                    }
                }
            }
        }
    }
    out.into_iter().collect()
}

/// `(ℓ/2) Σ_{j=1}^m Σ_{s=0}^{ℓ−1} [B₂(⟨(2aj+cs)/ℓ⟩) − B₂(⟨(aj+cs)/ℓ⟩)]`, the
/// order at infinity of `γ·s_{ℓ,m}` in powers of `q^{1/ℓ}`.
pub fn ord_inf_under(g: &GL2Class, ell: u64, m: i64) -> Rational64 {
    let l = ell as i64;
    let mut acc = Rational64::zero();
    for j in 1..=m {
        for s in 0..l {
            acc += bernoulli_b2_frac(Rational64::new(2 * g.a * j + g.c * s, l))
                - bernoulli_b2_frac(Rational64::new(g.a * j + g.c * s, l));
        }
    }
    acc * Rational64::new(l, 2)
}

/// `e(b·m(m+1)(2m+1−ℓ)/(4ℓ))`.
pub fn translation_phase(b: i64, ell: u64, m: i64) -> CycNum {
    let x = Rational64::new(b * m * (m + 1) * (2 * m + 1 - ell as i64), 4 * ell as i64);
    cyc_e(x, *x.denom() as u64).expect("denominator is the level")
}

/// Which filter removed a class; `None` means it survived all three.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Filter {
    OrderAtInfinity,
    TranslationPhase,
    FourierCoefficients,
}

#[derive(Clone, Debug, Serialize)]
pub struct StabilizerReport {
    pub ell: u64,
    pub m: i64,
    pub total_classes: usize,
    pub count: usize,
    pub classes: Vec<[i64; 4]>,
    pub is_gamma_d_set: bool,
    pub removed_by_order: usize,
    pub removed_by_phase: usize,
    pub removed_by_coefficients: usize,
    pub nonzero_c_with_nonzero_order_change: usize,
}

/// Precision of the expansion compared in the coefficient filter.
const FOURIER_ORDER: i64 = 6;

fn classify(g: &GL2Class, ell: u64, m: i64, target: Rational64, s: &QSeries) -> Result<Option<Filter>> {
    if ord_inf_under(g, ell, m) != target {
        return Ok(Some(Filter::OrderAtInfinity));
    }
    let Some([_, b, c, d]) = g.normalized_upper_left() else {
        return Ok(Some(Filter::OrderAtInfinity));
    };
    if c != 0 {
        return Ok(Some(Filter::OrderAtInfinity));
    }
    if translation_phase(b, ell, m) != CycNum::one(1) {
        return Ok(Some(Filter::TranslationPhase));
    }
    let twisted = s.map_coeffs(|_, c| c.galois(d))?;
    if twisted.agrees_with(s).is_err() {
        return Ok(Some(Filter::FourierCoefficients));
    }
    Ok(None)
}

/// Classes passing the three filters: order at infinity, translation phase,
/// and fixing the Fourier coefficients.
pub fn stabilizer_report(ell: u64, m: i64) -> Result<StabilizerReport> {
    check_prime(ell)?;
    check_m(ell, m)?;
    let target = ord_infinity_s(ell, m);
    let s = s_unit(ell, m, Rational64::from_integer(FOURIER_ORDER))?.lift_level(ell)?;
    let classes = gl2_classes(ell);
    let verdicts: Vec<Option<Filter>> = classes
        .par_iter()
        .map(|g| classify(g, ell, m, target, &s))
        .collect::<Result<_>>()?;
    let count_of = |f: Filter| verdicts.iter().filter(|v| **v == Some(f)).count();
    let kept: Vec<GL2Class> = classes
        .iter()
        .zip(&verdicts)
        .filter(|(_, v)| v.is_none())
        .map(|(g, _)| *g)
        .collect();
    let gamma_d: BTreeSet<GL2Class> = (1..ell as i64)
        .map(|d| GL2Class::gamma_d(d, ell))
        .collect::<Result<_>>()?;
    let kept_set: BTreeSet<GL2Class> = kept.iter().copied().collect();
    let nonzero_c_with_nonzero_order_change = classes
        .par_iter()
        .filter(|g| g.c != 0 && !ord_inf_under(g, ell, m).is_zero())
        .count();
    Ok(StabilizerReport {
        ell,
        m,
        total_classes: classes.len(),
        count: kept.len(),
        classes: kept.iter().map(GL2Class::entries).collect(),
        is_gamma_d_set: kept_set == gamma_d,
        removed_by_order: count_of(Filter::OrderAtInfinity),
        removed_by_phase: count_of(Filter::TranslationPhase),
        removed_by_coefficients: count_of(Filter::FourierCoefficients),
        nonzero_c_with_nonzero_order_change,
    })
}

pub fn stabilizer(ell: u64, m: i64) -> Result<Vec<GL2Class>> {
    let r = stabilizer_report(ell, m)?;
    r.classes.iter().map(|&[a, b, c, d]| GL2Class::new(a, b, c, d, ell)).collect()
}

/// `s(τ+1)` (each term `q^x` multiplied by `e(x)`) against `e(lead)·s(τ)`.
pub fn translation_series_check(ell: u64, m: i64, order: Rational64) -> Result<Agreement> {
    let s = s_unit(ell, m, order)?;
    let level = s.denom() as u64;
    let shifted = s.map_coeffs(|x, c| Ok(c.mul(&cyc_e(x, level)?)))?;
    let rhs = s.scale(&translation_phase(1, ell, m));
    Ok(shifted.agrees_with(&rhs))
}

/// Closure of a set of classes under products and inverses.
pub fn is_subgroup(classes: &[GL2Class]) -> bool {
    let set: BTreeSet<GL2Class> = classes.iter().copied().collect();
    classes.iter().all(|g| set.contains(&g.inv()) && classes.iter().all(|h| set.contains(&g.mul(h))))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::rat;

    #[test]
    fn class_counts() {
        assert_eq!(gl2_classes(5).len(), 240);
        assert_eq!(gl2_classes(7).len(), 1008);
        assert!(gl2_classes(5).contains(&GL2Class::identity(5)));
        assert_eq!(GL2Class::identity(7).det(), 1);
    }

    #[test]
    fn canonical_form_is_idempotent() {
        for g in gl2_classes(5) {
            let [a, b, c, d] = g.entries();
            assert_eq!(GL2Class::new(a, b, c, d, 5).unwrap(), g);
            assert_eq!(GL2Class::new(-a, -b, -c, -d, 5).unwrap(), g);
        }
    }

    #[test]
    fn orders_at_infinity() {
        assert_eq!(ord_inf_under(&GL2Class::identity(7), 7, 2), ord_infinity_s(7, 2));
        let g = GL2Class::new(2, 0, 0, 3, 7).unwrap();
        assert_eq!(ord_inf_under(&g, 7, 1), rat(-1, 1));
        for g in gl2_classes(5).iter().filter(|g| g.c != 0) {
            assert!(ord_inf_under(g, 5, 1).is_zero());
        }
    }

    #[test]
    fn phases() {
        assert_eq!(translation_phase(0, 5, 1), CycNum::one(1));
        assert_eq!(translation_phase(1, 5, 1), cyc_e(rat(-1, 5), 5).unwrap());
        for (l, m) in [(5, 1), (7, 2), (11, 3)] {
            assert_eq!(translation_phase(l as i64, l, m), CycNum::one(1));
        }
        assert_eq!(translation_phase(1, 9, 2), cyc_e(rat(-2, 3), 3).unwrap());
    }

    #[test]
    fn stabilizers_are_gamma_d() {
        for (l, m) in [(5, 1), (7, 1), (7, 2)] {
            let r = stabilizer_report(l, m).unwrap();
            assert_eq!(r.count as u64, l - 1);
            assert!(r.is_gamma_d_set);
            assert_eq!(r.nonzero_c_with_nonzero_order_change, 0);
            let st = stabilizer(l, m).unwrap();
            assert!(st.contains(&GL2Class::identity(l)));
            assert!(is_subgroup(&st));
        }
    }

    #[test]
    fn translation_series() {
        for (l, m) in [(5, 1), (7, 2), (9, 2)] {
            assert!(translation_series_check(l, m, rat(20, 1)).unwrap().is_ok());
        }
    }

    #[test]
    fn rejects_bad_input() {
        assert!(stabilizer(9, 1).is_err());
        assert!(stabilizer(5, 2).is_err());
        assert!(GL2Class::new(1, 1, 1, 1, 5).is_err());
    }
}
