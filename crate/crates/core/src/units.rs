//! The Kubert–Lang unit criterion, divisor vectors on the cusps `γ(i)∞`
//! and the rank computations for the groups generated by `s_{ℓ,m}`.

use num_rational::Rational64;
use num_traits::Zero;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::linalg::{bareiss_det, small_rational_rank};
use crate::rational::{fract, gcd, is_prime, modp};
use crate::siegel::UnitExpr;

/// `B₂({x}) = {x}² − {x} + 1/6`.
pub fn bernoulli_b2_frac(x: Rational64) -> Rational64 {
    let f = fract(x);
    f * f - f + Rational64::new(1, 6)
}

/// The congruence sums of the Kubert–Lang criterion.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct KlReport {
    pub level: u64,
    /// `Σ m(a) p² mod ℓ` with `p = ℓa₁`.
    pub sum_p2: i64,
    pub sum_r2: i64,
    pub sum_pr: i64,
    /// `Σ m(a) mod 12`.
    pub sum_m: i64,
    pub is_unit: bool,
}

/// Applies the criterion to a product of Siegel functions. Expressions in
/// `g_{(p/ℓ,0)}(ℓτ)` are first rewritten as products of `g_a(τ)`.
pub fn kl_unit_check(u: &UnitExpr) -> Result<KlReport> {
    let l = u.level();
    if l % 2 == 0 || l < 5 {
        return Err(Error::UnsupportedLevel(format!("the criterion needs odd ℓ ≥ 5, got {l}")));
    }
    let u = u.to_scale_one()?;
    let li = l as i64;
    let (mut p2, mut r2, mut pr, mut total) = (0i64, 0i64, 0i64, 0i64);
    for (a, m) in u.factors() {
        let (p, r) = (modp(a.p, li), modp(a.r, li));
        p2 = modp(p2 + m * p * p, li);
        r2 = modp(r2 + m * r * r, li);
        pr = modp(pr + m * p * r, li);
        total += m;
    }
    let sum_m = modp(total, 12);
    Ok(KlReport {
        level: l,
        sum_p2: p2,
        sum_r2: r2,
        sum_pr: pr,
        sum_m,
        is_unit: p2 == 0 && r2 == 0 && pr == 0 && sum_m == 0,
    })
}

/// Orders at the cusps `γ(1)∞, …, γ(k)∞`, in the normalization `(ℓ/2)B₂`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct DivisorVector {
    pub level: u64,
    #[serde(serialize_with = "ser_rats")]
    pub entries: Vec<Rational64>,
}

fn ser_rats<S: serde::Serializer>(v: &[Rational64], s: S) -> std::result::Result<S::Ok, S::Error> {
    use serde::ser::SerializeSeq;
    let mut seq = s.serialize_seq(Some(v.len()))?;
    for x in v {
        seq.serialize_element(&crate::rational::fmt_small(*x))?;
    }
    seq.end()
}

impl DivisorVector {
    pub fn zero(level: u64) -> Self {
        DivisorVector { level, entries: vec![Rational64::zero(); ((level - 1) / 2) as usize] }
    }

    pub fn add_scaled(&mut self, other: &DivisorVector, m: i64) {
        for (a, b) in self.entries.iter_mut().zip(&other.entries) {
            *a += *b * m;
        }
    }

    pub fn sub(&self, other: &DivisorVector) -> DivisorVector {
        let mut out = self.clone();
        out.add_scaled(other, -1);
        out
    }
}

fn check_prime_level(l: u64) -> Result<()> {
    if l < 5 || !is_prime(l) {
        return Err(Error::UnsupportedLevel(format!("need a prime ℓ ≥ 5, got {l}")));
    }
    Ok(())
}

/// `V(m) = (ℓ/2)(B₂(m/ℓ), B₂(2m/ℓ), …, B₂(km/ℓ))`.
pub fn divisor_vector_g(m: i64, l: u64) -> Result<DivisorVector> {
    check_prime_level(l)?;
    let li = l as i64;
    if modp(m, li) == 0 {
        return Err(Error::InvalidIndex(format!("{m} ≡ 0 mod {l}")));
    }
    let k = (li - 1) / 2;
    let entries = (1..=k)
        .map(|i| bernoulli_b2_frac(Rational64::new(i * m, li)) * li / 2)
        .collect();
    Ok(DivisorVector { level: l, entries })
}

/// Divisor vector of a Siegel product. A factor `g_{(p/ℓ,r/ℓ)}(τ)` contributes
/// `B₂(ip/ℓ)/2` at cusp `i`; a factor `g_{(p/ℓ,0)}(ℓτ)` contributes `V(p)`.
pub fn divisor_vector_unit(u: &UnitExpr) -> Result<DivisorVector> {
    let l = u.level();
    check_prime_level(l)?;
    let li = l as i64;
    let weight = match u.scale() {
        1 => 1,
        s if s == l => li,
        s => return Err(Error::UnsupportedLevel(format!("argument scale {s} at level {l}"))),
    };
    let mut v = DivisorVector::zero(l);
    for (a, m) in u.factors() {
        if weight != 1 && a.r != 0 {
            return Err(Error::UnsupportedLevel(format!("factor {a} at scale ℓ")));
        }
        for (i, e) in v.entries.iter_mut().enumerate() {
            let i = i as i64 + 1;
            *e += bernoulli_b2_frac(Rational64::new(i * a.p, li)) * m * weight / 2;
        }
    }
    Ok(v)
}

/// `V(s_{ℓ,m}) = Σ_{j=1}^m V(2j) − V(j)`.
pub fn divisor_vector_s(l: u64, m: i64) -> Result<DivisorVector> {
    let mut v = DivisorVector::zero(l);
    for j in 1..=m {
        v.add_scaled(&divisor_vector_g(2 * j, l)?, 1);
        v.add_scaled(&divisor_vector_g(j, l)?, -1);
    }
    Ok(v)
}

/// `m(m+1)(2m+1−ℓ)/4`, the order of `s_{ℓ,m}` at infinity in powers of `q^{1/ℓ}`.
pub fn ord_infinity_s(l: u64, m: i64) -> Rational64 {
    Rational64::new(m * (m + 1) * (2 * m + 1 - l as i64), 4)
}

/// Least `d ≥ 1` with `c^d ≡ ±1 (mod ℓ)`.
pub fn mult_order_mod_pm(c: i64, l: u64) -> Result<u64> {
    let li = l as i64;
    if l < 3 || gcd(c, li) != 1 {
        return Err(Error::InvalidIndex(format!("{c} is not a unit modulo {l}")));
    }
    let c = modp(c, li);
    let mut x = c;
    let mut d = 1;
    while x != 1 && x != li - 1 {
        x = modp(x * c, li);
        d += 1;
    }
    Ok(d)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct RankReport {
    pub ell: u64,
    pub c: i64,
    pub d: u64,
    pub formula_rank: usize,
    pub matrix_rank: usize,
    pub agree: bool,
}

/// Compares `k − k/d` with the exact rank of the rows `V(cm) − V(m)`.
pub fn rank_report(l: u64, c: i64) -> Result<RankReport> {
    check_prime_level(l)?;
    let d = mult_order_mod_pm(c, l)?;
    let k = ((l - 1) / 2) as usize;
    let formula_rank = k - k / d as usize;
    let rows = (1..=k as i64)
        .map(|m| Ok(divisor_vector_g(c * m, l)?.sub(&divisor_vector_g(m, l)?).entries))
        .collect::<Result<Vec<_>>>()?;
    let matrix_rank = small_rational_rank(&rows);
    Ok(RankReport { ell: l, c, d, formula_rank, matrix_rank, agree: formula_rank == matrix_rank })
}

/// Exact rank of the rows `V(s_{ℓ,m})`, `m = 1..k−1`.
pub fn s_divisor_rank(l: u64) -> Result<usize> {
    check_prime_level(l)?;
    let k = ((l - 1) / 2) as i64;
    let rows = (1..k)
        .map(|m| Ok(divisor_vector_s(l, m)?.entries))
        .collect::<Result<Vec<_>>>()?;
    Ok(small_rational_rank(&rows))
}

/// The matrix `A` with rows `V(1), …, V(k)` is nonsingular.
pub fn full_rank_check_a(l: u64) -> Result<bool> {
    check_prime_level(l)?;
    let k = ((l - 1) / 2) as i64;
    // Entries are in (1/(12ℓ))Z; scale by 12ℓ to get integers.
    let scale = Rational64::from_integer(12 * l as i64);
    let rows = (1..=k)
        .map(|m| {
            Ok(divisor_vector_g(m, l)?
                .entries
                .iter()
                .map(|x| num_bigint::BigInt::from((*x * scale).to_integer()))
                .collect())
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(!bareiss_det(rows).is_zero())
}
