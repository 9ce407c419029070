//! Evaluation of Siegel-function products at points of the upper half plane.

use num_rational::Rational64;
use num_traits::{ToPrimitive, Zero};
use serde::Serialize;

use super::{Complex, Real};
use crate::error::{Error, Result};
use crate::hallittlewood::psi_1;
use crate::qseries::{rr_continued_fraction, DenseProduct, QSeries};
use crate::rational::fmt_small;
use crate::siegel::{r_expr, r_unit, s_expr_quotient, s_unit, SiegelIndex, UnitExpr};

/// The units this module knows how to evaluate.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Descriptor {
    /// The Rogers–Ramanujan continued fraction `r(τ)`.
    ContinuedFraction,
    /// `r_unit(ℓ, m)`.
    R { ell: u64, m: i64 },
    /// `s_{ℓ,m}`.
    S { ell: u64, m: i64 },
    /// `Ψ₁(m, n)`.
    Psi1 { m: u32, n: u32 },
}

impl Descriptor {
    /// The Siegel product representing the unit.
    pub fn expr(&self) -> Result<UnitExpr> {
        match *self {
            Descriptor::ContinuedFraction => Ok(r_expr(5, 2)?.inv().times_root(Rational64::new(1, 2))),
            Descriptor::R { ell, m } => r_expr(ell, m),
            Descriptor::S { ell, m } => s_expr_quotient(ell, m),
            Descriptor::Psi1 { m, n } => s_expr_quotient((2 * m + 2 * n + 1) as u64, m as i64),
        }
    }

    /// The exact expansion, built by the route native to each object.
    pub fn series(&self, order: Rational64) -> Result<QSeries> {
        match *self {
            Descriptor::ContinuedFraction => Ok(rr_continued_fraction(order)),
            Descriptor::R { ell, m } => r_unit(ell, m, order),
            Descriptor::S { ell, m } => s_unit(ell, m, order),
            Descriptor::Psi1 { m, n } => psi_1(m, n, order),
        }
    }

    pub fn label(&self) -> String {
        match *self {
            Descriptor::ContinuedFraction => "r".into(),
            Descriptor::R { ell, m } => format!("r_unit({ell},{m})"),
            Descriptor::S { ell, m } => format!("s_{{{ell},{m}}}"),
            Descriptor::Psi1 { m, n } => format!("psi1({m},{n})"),
        }
    }
}

#[derive(Clone, Debug)]
pub struct EvalResult {
    pub value: Complex,
    /// Bound on `|value − exact|`.
    pub err: f64,
    pub terms_used: usize,
    /// Bound on the relative effect of the omitted product factors.
    pub tail_bound: f64,
}

#[derive(Serialize)]
pub struct EvalJson {
    pub re: String,
    pub im: String,
    pub err: f64,
    pub terms_used: usize,
    pub tail_bound: f64,
}

impl EvalResult {
    pub fn to_json(&self, digits: u32) -> EvalJson {
        EvalJson {
            re: self.value.re.to_decimal(digits),
            im: self.value.im.to_decimal(digits),
            err: self.err,
            terms_used: self.terms_used,
            tail_bound: self.tail_bound,
        }
    }
}

pub fn working_bits(prec: u32) -> u32 {
    Real::bits_for_digits(prec + 10) + 32
}

pub fn point_i(bits: u32) -> Complex {
    Complex::new(Real::zero(bits), Real::one(bits))
}

/// `ρ = e^{2πi/3}`.
pub fn point_rho(bits: u32) -> Complex {
    Complex::new(Real::from_rational(&Rational64::new(-1, 2), bits), Real::from_int(3, bits).sqrt().div_int(2))
}

pub fn point(re: &Rational64, im: &Rational64, bits: u32) -> Complex {
    Complex::new(Real::from_rational(re, bits), Real::from_rational(im, bits))
}

fn check_upper(tau: &Complex) -> Result<f64> {
    let y = tau.im.to_f64();
    if tau.im.is_negative() || tau.im.is_zero() || y <= 0.0 {
        return Err(Error::Domain("τ must lie in the upper half plane".into()));
    }
    Ok(y)
}

fn pow_int(z: &Complex, m: i64) -> Complex {
    let base = if m < 0 { z.inv() } else { z.clone() };
    let mut acc = Complex::one(z.bits());
    for _ in 0..m.unsigned_abs() {
        acc = acc.mul(&base);
    }
    acc
}

/// Number of factors `N` per Siegel function so that the omitted tail of
/// `Σ |m|·Σ_{n>N} −log(1−|u_n|)` stays below `10^{-digits}`; returns `(N, bound)`.
fn factors_needed(rho: f64, weight: f64, digits: u32) -> (usize, f64) {
    let target = -(digits as f64) * std::f64::consts::LN_10;
    let mut n = 1usize;
    loop {
        let rn = rho.powi(n as i32);
        let log_t = (2.0 * weight).ln() + n as f64 * rho.ln() - (1.0 - rho).ln() - (1.0 - rn).ln();
        if log_t < target || n > 100_000 {
            return (n, log_t.exp());
        }
        n += 1;
    }
}

/// Evaluates `e(prefactor) ∏ g_a(sτ)^{m}` from the product formula
/// `g_a = e(1/2 + a2(a1−1)/2) q^{B₂(a1)/2} (1−q_z) ∏ (1−qⁿq_z)(1−qⁿ/q_z)`.
pub fn eval_expr(u: &UnitExpr, tau: &Complex, prec: u32) -> Result<EvalResult> {
    let y = check_upper(tau)?;
    let bits = working_bits(prec);
    let tau = tau.with_bits(bits);
    let s = Rational64::from_integer(u.scale() as i64);
    let rho = (-2.0 * std::f64::consts::PI * y * u.scale() as f64).exp();
    let weight: f64 = u.factors().map(|(_, m)| m.unsigned_abs() as f64).sum::<f64>().max(1.0);
    let (n_terms, tail) = factors_needed(rho, weight, prec + 4);
    let qs = Complex::e_of(&tau, &s);
    let mut root = u.prefactor();
    let mut acc = Complex::one(bits);
    for (a, m) in u.factors() {
        root += Rational64::from_integer(m) * (Rational64::new(1, 2) + a.a2() * (a.a1() - 1) / 2);
        let mut x = Complex::e(&a.a2(), bits).mul(&Complex::e_of(&tau, &(s * a.a1())));
        let mut w = Complex::e(&-a.a2(), bits).mul(&Complex::e_of(&tau, &(s * (Rational64::from_integer(1) - a.a1()))));
        let one = Complex::one(bits);
        let mut f = one.sub(&x);
        for _ in 0..n_terms {
            x = x.mul(&qs);
            f = f.mul(&one.sub(&x)).mul(&one.sub(&w));
            w = w.mul(&qs);
        }
        acc = acc.mul(&pow_int(&f, m));
    }
    acc = acc.mul(&Complex::e(&crate::rational::fract(root), bits));
    acc = acc.mul(&Complex::e_of(&tau, &u.leading_exponent()));
    let mag = acc.abs().to_f64();
    let err = mag * (tail.exp_m1() + 10f64.powi(-(prec as i32) - 6));
    Ok(EvalResult { value: acc, err, terms_used: n_terms, tail_bound: tail })
}

pub fn eval_unit(d: &Descriptor, tau: &Complex, prec: u32) -> Result<EvalResult> {
    eval_expr(&d.expr()?, tau, prec)
}

/// `Σ c_x q^x` for a truncated series.
pub fn eval_series(series: &QSeries, tau: &Complex, prec: u32) -> Complex {
    let bits = working_bits(prec);
    let tau = tau.with_bits(bits);
    let mut acc = Complex::zero(bits);
    for (x, c) in series.terms() {
        acc = acc.add(&c.embed(prec + 10).with_bits(bits).mul(&Complex::e_of(&tau, x)));
    }
    acc
}

/// Rigorous bound on the terms of the expansion of `u` at and beyond `order`.
///
/// Each factor `(1−u)^{±m}` is dominated coefficientwise by `(1−|u|)^{−|m|}`,
/// so the omitted terms are bounded by the tail of the majorant product.
pub fn series_tail_bound(u: &UnitExpr, order: Rational64, tau: &Complex, prec: u32) -> Result<f64> {
    let y = check_upper(tau)?;
    let l = u.level() as i64;
    let s = u.scale() as i64;
    let lead = u.leading_exponent();
    let body_order = order - lead;
    if body_order <= Rational64::zero() {
        return Err(Error::Inconclusive("order does not reach the leading term".into()));
    }
    let slots = (body_order * l).ceil().to_integer();
    let mut maj = DenseProduct::new(l, body_order);
    let mut constant = 1.0f64;
    let mut infinite: Vec<(i64, i64)> = Vec::new();
    for (a, m) in u.factors() {
        let mut push = |k: i64| {
            if k < slots {
                infinite.push((k, m.abs()));
            }
        };
        for n in 1.. {
            let k1 = s * (l * (n - 1) + a.p);
            let k2 = s * (l * n - a.p);
            if k1.min(k2) >= slots {
                break;
            }
            if k1 == 0 {
                let (re, im) = (
                    1.0 - (2.0 * std::f64::consts::PI * a.a2().to_f64().unwrap()).cos(),
                    (2.0 * std::f64::consts::PI * a.a2().to_f64().unwrap()).sin(),
                );
                constant *= (re * re + im * im).sqrt().powi(m as i32);
            } else {
                push(k1);
            }
            push(k2);
        }
    }
    for &(k, m) in &infinite {
        maj.binomial(Rational64::new(k, l), -m)?;
    }
    let bits = working_bits(prec);
    // ρ₁ = |q|^{1/ℓ}
    let rho1 = Real::pi(bits).mul(&tau.im.with_bits(bits)).mul_int(-2).div_int(l).exp();
    let mut truncated = Real::zero(bits);
    let mut pw = Real::one(bits);
    for c in maj.coeffs() {
        truncated = truncated.add(&Real::from_big_int(c, bits).mul(&pw));
        pw = pw.mul(&rho1);
    }
    // Full majorant: every factor with exponent below `slots` is in `infinite`;
    // the remaining ones contribute at most exp(T) with T from a geometric bound.
    let mut full = Real::one(bits);
    for &(k, m) in &infinite {
        let mut f = Real::one(bits);
        let mut rk = Real::one(bits);
        for _ in 0..k {
            rk = rk.mul(&rho1);
        }
        let one_minus = Real::one(bits).sub(&rk);
        for _ in 0..m {
            f = f.div(&one_minus);
        }
        full = full.mul(&f);
    }
    let rho_f = (-2.0 * std::f64::consts::PI * y / l as f64).exp();
    let weight: f64 = u.factors().map(|(_, m)| m.unsigned_abs() as f64).sum();
    let rest = 2.0 * weight * rho_f.powi(slots as i32) / ((1.0 - rho_f.powi(l as i32 * s as i32)) * (1.0 - rho_f));
    let diff = full.sub(&truncated).to_f64().max(0.0);
    let mag = (-2.0 * std::f64::consts::PI * y * lead.to_f64().unwrap()).exp();
    Ok(constant * mag * (diff + full.to_f64() * rest.exp_m1()))
}

#[derive(Clone, Debug, Serialize)]
pub struct SeriesVsProduct {
    pub object: String,
    pub order: String,
    pub difference: f64,
    pub series_tail: f64,
    pub product_err: f64,
    pub agree: bool,
}

/// Truncated series against the product, within the combined bounds.
pub fn series_vs_product_check(d: &Descriptor, tau: &Complex, order: Rational64, prec: u32) -> Result<SeriesVsProduct> {
    let expr = d.expr()?;
    let tail = series_tail_bound(&expr, order, tau, prec)?;
    let limit = 10f64.powi(-(prec as i32));
    if tail > limit {
        return Err(Error::Inconclusive(format!(
            "series tail bound {tail:e} exceeds 10^-{prec}; raise the order or Im τ"
        )));
    }
    let series = d.series(order)?;
    let a = eval_series(&series, tau, prec);
    let b = eval_unit(d, tau, prec)?;
    let difference = a.dist(&b.value);
    Ok(SeriesVsProduct {
        object: d.label(),
        order: fmt_small(order),
        difference,
        series_tail: tail,
        product_err: b.err,
        agree: difference <= tail + b.err + limit,
    })
}

/// `η(τ) = q^{1/24} ∏ (1−qⁿ)`.
pub fn eta(tau: &Complex, prec: u32) -> Result<Complex> {
    let y = check_upper(tau)?;
    let bits = working_bits(prec);
    let tau = tau.with_bits(bits);
    let rho = (-2.0 * std::f64::consts::PI * y).exp();
    let (n_terms, _) = factors_needed(rho, 0.5, prec + 4);
    let q = Complex::e_of(&tau, &Rational64::from_integer(1));
    let one = Complex::one(bits);
    let mut x = q.clone();
    let mut acc = Complex::e_of(&tau, &Rational64::new(1, 24));
    for _ in 0..=n_terms {
        acc = acc.mul(&one.sub(&x));
        x = x.mul(&q);
    }
    Ok(acc)
}

/// The Klein function `𝔨_a = g_a/η²`; unreduced indices are reduced with
/// their phase absorbed.
pub fn klein(a: &SiegelIndex, tau: &Complex, prec: u32) -> Result<Complex> {
    let g = eval_expr(&UnitExpr::new(a.level, 1)?.with(*a, 1)?, tau, prec)?.value;
    let e = eta(tau, prec)?;
    Ok(g.div(&e.mul(&e)))
}

/// `(aτ+b)/(cτ+d)`.
pub fn act(g: [[i64; 2]; 2], tau: &Complex) -> Complex {
    let bits = tau.bits();
    let c = |n: i64| Complex::from_real(Real::from_int(n, bits));
    let num = c(g[0][0]).mul(tau).add(&c(g[0][1]));
    let den = c(g[1][0]).mul(tau).add(&c(g[1][1]));
    num.div(&den)
}

#[derive(Clone, Debug, Serialize)]
pub struct KleinReport {
    pub index: String,
    pub image_index: String,
    pub gamma: [[i64; 2]; 2],
    pub difference: f64,
    pub agree: bool,
}

/// `𝔨_a(γτ) = (cτ+d)^{−1} 𝔨_{aγ}(τ)` numerically.
pub fn klein_transform_check(a: &SiegelIndex, g: [[i64; 2]; 2], tau: &Complex, prec: u32) -> Result<KleinReport> {
    if g[0][0] * g[1][1] - g[0][1] * g[1][0] != 1 {
        return Err(Error::Domain(format!("{g:?} is not in SL₂(Z)")));
    }
    let bits = working_bits(prec);
    let tau = tau.with_bits(bits);
    let gt = act(g, &tau);
    let lhs = klein(a, &gt, prec)?;
    let ag = SiegelIndex::new(a.p * g[0][0] + a.r * g[1][0], a.p * g[0][1] + a.r * g[1][1], a.level)?;
    let cd = Complex::from_real(Real::from_int(g[1][0], bits))
        .mul(&tau)
        .add(&Complex::from_real(Real::from_int(g[1][1], bits)));
    let rhs = klein(&ag, &tau, prec)?.div(&cd);
    let difference = lhs.dist(&rhs);
    let scale = lhs.abs().to_f64().max(1.0);
    Ok(KleinReport {
        index: a.to_string(),
        image_index: ag.to_string(),
        gamma: g,
        difference,
        agree: difference <= scale * 10f64.powi(-(prec as i32) + 2),
    })
}

/// `√((5+√5)/2) − (√5+1)/2`.
pub fn ramanujan_r_at_i(bits: u32) -> Real {
    let s5 = Real::from_int(5, bits).sqrt();
    Real::from_int(5, bits).add(&s5).div_int(2).sqrt().sub(&s5.add(&Real::one(bits)).div_int(2))
}

/// `4ζ₁₀/(√(30+6√5) − 3 − √5)` with `ζ₁₀ = e^{πi/5}`.
pub fn ramanujan_s_at_rho(bits: u32) -> Complex {
    Complex::e(&Rational64::new(1, 10), bits).scale(&closed_form_unit(bits, 1, 1))
}

/// `4/(ε₂√(30+6ε₁√5) − 3 − ε₁√5)`: the four conjugates of `s_{5,1}(ρ)/ζ₁₀`.
fn closed_form_unit(bits: u32, e1: i64, e2: i64) -> Real {
    let s5 = Real::from_int(5, bits).sqrt().mul_int(e1);
    let root = Real::from_int(30, bits).add(&s5.mul_int(6)).sqrt().mul_int(e2);
    Real::from_int(4, bits).div(&root.sub(&Real::from_int(3, bits)).sub(&s5))
}

/// Product of the four conjugates of the real unit `s_{5,1}(ρ)/ζ₁₀`.
pub fn conjugate_product_s_rho(bits: u32) -> Real {
    let mut acc = Real::one(bits);
    for e1 in [1, -1] {
        for e2 in [1, -1] {
            acc = acc.mul(&closed_form_unit(bits, e1, e2));
        }
    }
    acc
}
