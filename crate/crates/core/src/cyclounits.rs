//! Limits of `s_{ℓ,m}` at the cusp 0 and their place in the cyclotomic
//! unit group of `Q(ζ_ℓ)^+`.
//!
//! Half powers `ζ_ℓ^{x/2}` are read as `e(x/(2ℓ))`, so everything lives in
//! `Q(ζ_{2ℓ})`.

use num_rational::{BigRational, Rational64};
use serde::Serialize;

use crate::cyclotomic::{cyc_e, CycNum};
use crate::error::{Error, Result};
use crate::linalg::{int_rank, numeric_rank};
use crate::rational::{gcd, is_prime, modp};
use crate::units::mult_order_mod_pm;

fn check(l: u64, m: i64) -> Result<i64> {
    if l < 5 || !is_prime(l) {
        return Err(Error::UnsupportedLevel(format!("need an odd prime ℓ ≥ 5, got {l}")));
    }
    let k = (l as i64 - 1) / 2;
    if m < 0 || m > k - 1 {
        return Err(Error::InvalidIndex(format!("need 0 ≤ m ≤ {}, got {m}", k - 1)));
    }
    Ok(k)
}

/// `ζ_ℓ^{x/2} = e(x/(2ℓ))` at level `2ℓ`.
fn zeta_half(l: u64, x: i64) -> CycNum {
    cyc_e(Rational64::new(x, 2 * l as i64), 2 * l).expect("denominator divides 2ℓ")
}

/// `ζ_ℓ^a` at level `2ℓ`.
fn zeta(l: u64, a: i64) -> CycNum {
    CycNum::zeta_power(2 * l, 2 * a)
}

fn one_minus_zeta(l: u64, a: i64) -> CycNum {
    CycNum::one(2 * l).sub(&zeta(l, a))
}

/// `∏_{j=1}^m ζ^{−j/2} (1 − ζ^{2j})/(1 − ζ^j)`, checked to be real.
pub fn cusp_limit(l: u64, m: i64) -> Result<CycNum> {
    check(l, m)?;
    let mut acc = CycNum::one(2 * l);
    for j in 1..=m {
        let f = zeta_half(l, -j).mul(&one_minus_zeta(l, 2 * j)).div(&one_minus_zeta(l, j))?;
        acc = acc.mul(&f);
    }
    if acc.conj() != acc {
        return Err(Error::Consistency(format!("cusp limit for ({l},{m}) is not real")));
    }
    Ok(acc)
}

/// `lim r_{ℓ,k+1−x} = (−1)^{x−1} ζ^{(1−x)/2} (ζ^x − 1)/(ζ − 1)`.
fn r_limit(l: u64, x: i64) -> Result<CycNum> {
    let sign = if (x - 1) % 2 == 0 { 1 } else { -1 };
    let num = zeta(l, x).sub(&CycNum::one(2 * l));
    let den = zeta(l, 1).sub(&CycNum::one(2 * l));
    Ok(zeta_half(l, 1 - x).mul(&num.div(&den)?).scale(&BigRational::from_integer(sign.into())))
}

/// Recomputes the limit from the `r`-limits via
/// `s_{ℓ,m} = ∏ (−1)^j r_{ℓ,k+1−2j}/r_{ℓ,k+1−j}` and compares exactly.
pub fn limit_via_r_check(l: u64, m: i64) -> Result<bool> {
    check(l, m)?;
    let mut acc = CycNum::one(2 * l);
    for j in 1..=m {
        let sign = if j % 2 == 0 { 1 } else { -1 };
        let f = r_limit(l, 2 * j)?.div(&r_limit(l, j)?)?;
        acc = acc.mul(&f.scale(&BigRational::from_integer(sign.into())));
    }
    Ok(acc == cusp_limit(l, m)?)
}

/// Exponents on the generators `ξ_a = ζ^{(1−a)/2}(1−ζ^a)/(1−ζ)`, `a = 2..k`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct CycUnitVector {
    pub ell: u64,
    /// `exps[i]` is the exponent of `ξ_{i+2}`.
    pub exps: Vec<i64>,
    /// Root-of-unity part collected while reducing indices.
    #[serde(skip)]
    pub torsion: CycNum,
}

/// `min(a mod ℓ, ℓ − a mod ℓ)`.
pub fn reduce_generator_index(a: i64, l: u64) -> i64 {
    let r = modp(a, l as i64);
    r.min(l as i64 - r)
}

/// `ξ_a / ξ_{ℓ−a} = −e(−1/2)`, which is `1` under the principal branch.
fn reflection_torsion(l: u64) -> CycNum {
    zeta_half(l, -(l as i64)).neg()
}

/// Writes each factor as `ξ_{2j}/ξ_j` and reduces indices into `{2..k}`.
pub fn exponent_vector(l: u64, m: i64) -> Result<CycUnitVector> {
    let v = exponent_vector_unchecked(l, m)?;
    if !reassembly_matches(&v, &cusp_limit(l, m)?) {
        return Err(Error::Consistency(format!("exponent vector for ({l},{m}) does not reassemble")));
    }
    Ok(v)
}

fn exponent_vector_unchecked(l: u64, m: i64) -> Result<CycUnitVector> {
    let k = check(l, m)?;
    let mut exps = vec![0i64; (k - 1) as usize];
    let mut torsion = CycNum::one(2 * l);
    let mut add = |a: i64, e: i64, torsion: &mut CycNum| -> Result<()> {
        let r = reduce_generator_index(a, l);
        if r != modp(a, l as i64) {
            *torsion = torsion.mul(&reflection_torsion(l).pow(e)?);
        }
        if r >= 2 {
            exps[(r - 2) as usize] += e;
        }
        Ok(())
    };
    for j in 1..=m {
        add(2 * j, 1, &mut torsion)?;
        add(j, -1, &mut torsion)?;
    }
    Ok(CycUnitVector { ell: l, exps, torsion })
}

/// `(1 − ζ)ξ_a = ζ^{(1−a)/2}(1 − ζ^a)`.
fn xi_times_denominator(l: u64, a: i64) -> CycNum {
    zeta_half(l, 1 - a).mul(&one_minus_zeta(l, a))
}

/// Checks `torsion · ∏ ξ_a^{e_a} = target` without inverting anything:
/// both sides are multiplied through by the `(1 − ζ)` and negative-exponent
/// factors.
pub fn reassembly_matches(v: &CycUnitVector, target: &CycNum) -> bool {
    let l = v.ell;
    let mut lhs = v.torsion.clone();
    let mut rhs = target.clone();
    let (mut pos, mut neg) = (0i64, 0i64);
    for (i, &e) in v.exps.iter().enumerate() {
        let x = xi_times_denominator(l, i as i64 + 2);
        if e > 0 {
            lhs = lhs.mul(&x.pow(e).expect("non-negative power"));
            pos += e;
        } else if e < 0 {
            rhs = rhs.mul(&x.pow(-e).expect("non-negative power"));
            neg -= e;
        }
    }
    let d = one_minus_zeta(l, 1);
    lhs = lhs.mul(&d.pow(neg).expect("non-negative power"));
    rhs = rhs.mul(&d.pow(pos).expect("non-negative power"));
    lhs == rhs
}

/// Exact norm from `Q(ζ_{2ℓ})` to `Q`.
pub fn exact_norm(x: &CycNum) -> Result<BigRational> {
    let n = x.level() as i64;
    let mut acc = CycNum::one(x.level());
    for d in 1..n {
        if gcd(d, n) == 1 {
            acc = acc.mul(&x.galois(d)?);
        }
    }
    acc.as_rational()
        .ok_or_else(|| Error::Internal("norm is not rational".into()))
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct CycRankReport {
    pub ell: u64,
    pub d: u64,
    pub formula_rank: usize,
    pub exact_rank: usize,
    pub numeric_rank: usize,
    pub agree: bool,
}

/// `log|σ_t(lim s_{ℓ,m})| = Σ_{j≤m} log|2cos(πtj/ℓ)|` for `t = 1..k`.
fn log_embedding(l: u64, m: i64) -> Vec<f64> {
    let k = (l as i64 - 1) / 2;
    (1..=k)
        .map(|t| {
            (1..=m)
                .map(|j| {
                    let x = std::f64::consts::PI * (t * j) as f64 / l as f64;
                    (2.0 * x.cos()).abs().ln()
                })
                .sum()
        })
        .collect()
}

/// Rank of the subgroup generated by the cusp limits, three ways.
pub fn cyclotomic_rank(l: u64) -> Result<CycRankReport> {
    let k = check(l, 0)?;
    let d = mult_order_mod_pm(2, l)?;
    let formula_rank = (k - k / d as i64) as usize;
    let rows = (1..k).map(|m| Ok(exponent_vector_unchecked(l, m)?.exps)).collect::<Result<Vec<_>>>()?;
    let exact_rank = int_rank(&rows);
    let logs: Vec<Vec<f64>> = (1..k).map(|m| log_embedding(l, m)).collect();
    let numeric = numeric_rank(&logs, 1e-6);
    Ok(CycRankReport {
        ell: l,
        d,
        formula_rank,
        exact_rank,
        numeric_rank: numeric,
        agree: formula_rank == exact_rank && exact_rank == numeric,
    })
}

/// `x² − x − 1` evaluated exactly.
pub fn golden_minimal_residual(x: &CycNum) -> CycNum {
    x.mul(x).sub(x).sub(&CycNum::one(x.level()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_traits::One;

    #[test]
    fn golden_ratio_at_level_five() {
        let phi = cusp_limit(5, 1).unwrap();
        assert!(golden_minimal_residual(&phi).is_zero());
        let (re, im) = phi.to_f64();
        assert!((re - 1.618_033_988_749_895).abs() < 1e-12);
        assert!(im.abs() < 1e-12);
    }

    #[test]
    fn empty_product_and_level_seven() {
        assert_eq!(cusp_limit(11, 0).unwrap(), CycNum::one(22));
        let x = cusp_limit(7, 1).unwrap();
        let expect = CycNum::zeta_power(14, 1).add(&CycNum::zeta_power(14, -1));
        assert_eq!(x, expect);
        assert!((x.to_f64().0 - 1.801_937_735_804_838).abs() < 1e-12);
    }

    #[test]
    fn limit_agrees_with_one_plus_zeta_form() {
        for (l, m) in [(7u64, 2i64), (11, 4), (13, 5)] {
            let mut acc = CycNum::one(2 * l);
            for j in 1..=m {
                let f = zeta_half(l, -j).mul(&CycNum::one(2 * l).add(&zeta(l, j)));
                acc = acc.mul(&f);
            }
            assert_eq!(acc, cusp_limit(l, m).unwrap());
        }
    }

    #[test]
    fn via_r_small() {
        for (l, m) in [(5, 1), (7, 2), (11, 3)] {
            assert!(limit_via_r_check(l, m).unwrap(), "({l},{m})");
        }
    }

    #[test]
    fn exponent_vectors() {
        let v = exponent_vector(5, 1).unwrap();
        assert_eq!(v.exps, vec![1]);
        assert_eq!(v.torsion, CycNum::one(10));
        assert_eq!(exponent_vector(7, 0).unwrap().exps, vec![0, 0]);
        assert_eq!(exponent_vector(7, 2).unwrap().exps, vec![0, 1]);
    }

    #[test]
    fn limits_are_units() {
        for (l, m) in [(5u64, 1i64), (7, 2), (11, 3)] {
            let n = exact_norm(&cusp_limit(l, m).unwrap()).unwrap();
            assert!(n == BigRational::one() || n == -BigRational::one());
        }
    }

    #[test]
    fn ranks() {
        assert_eq!(cyclotomic_rank(5).unwrap().exact_rank, 1);
        assert_eq!(cyclotomic_rank(7).unwrap().exact_rank, 2);
        let r = cyclotomic_rank(17).unwrap();
        assert_eq!(r.exact_rank, 6);
        assert!(r.agree);
    }

    #[test]
    fn bad_parameters() {
        assert!(cusp_limit(9, 1).is_err());
        assert!(cusp_limit(7, 3).is_err());
    }
}
