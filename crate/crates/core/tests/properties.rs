use num_bigint::BigInt;
use num_rational::{BigRational, Rational64};
use num_traits::{One, Zero};
use proptest::prelude::*;

use rrunits::cyclotomic::CycNum;
use rrunits::galois::{ord_inf_under, translation_phase, GL2Class};
use rrunits::hallittlewood::{hl_poly, Partition};
use rrunits::qseries::QSeries;
use rrunits::rational::fract;
use rrunits::siegel::{s_leading_exponent, s_unit, SiegelIndex};
use rrunits::units::{bernoulli_b2_frac, ord_infinity_s};

const LEVELS: &[u64] = &[3, 4, 5, 7, 8, 9, 10, 12, 15];
const ODD_LEVELS: &[u64] = &[5, 7, 9, 11, 13];

fn cyc(level: u64, v: Vec<i64>) -> CycNum {
    CycNum::from_int_powers(level, v.into_iter().map(BigInt::from).collect())
}

fn arb_cyc(level: u64) -> impl Strategy<Value = CycNum> {
    prop::collection::vec(-4i64..=4, level as usize).prop_map(move |v| cyc(level, v))
}

fn three_cyc() -> impl Strategy<Value = (CycNum, CycNum, CycNum)> {
    prop::sample::select(LEVELS).prop_flat_map(|l| (arb_cyc(l), arb_cyc(l), arb_cyc(l)))
}

fn arb_partition(max_part: u32, max_len: usize) -> impl Strategy<Value = Partition> {
    prop::collection::vec(1..=max_part, 0..=max_len).prop_map(|mut v| {
        v.sort_unstable_by(|a, b| b.cmp(a));
        Partition::new(v).unwrap()
    })
}

fn odd_level_and_m() -> impl Strategy<Value = (u64, i64)> {
    prop::sample::select(ODD_LEVELS).prop_flat_map(|l| (Just(l), 1..((l as i64 - 1) / 2)))
}

fn gl2(ell: u64) -> impl Strategy<Value = GL2Class> {
    let l = ell as i64;
    (0..l, 0..l, 0..l, 0..l)
        .prop_filter_map("singular", move |(a, b, c, d)| GL2Class::new(a, b, c, d, ell).ok())
}

fn rat(n: i64) -> BigRational {
    BigRational::from_integer(n.into())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn cyclotomic_ring_laws((a, b, c) in three_cyc()) {
        prop_assert_eq!(a.mul(&b).mul(&c), a.mul(&b.mul(&c)));
        prop_assert_eq!(a.mul(&b.add(&c)), a.mul(&b).add(&a.mul(&c)));
        prop_assert_eq!(a.mul(&b), b.mul(&a));
        prop_assert!(a.sub(&a).is_zero());
    }

    #[test]
    fn cyclotomic_inverse((a, _, _) in three_cyc()) {
        prop_assume!(!a.is_zero());
        let one = CycNum::one(a.level());
        prop_assert_eq!(a.mul(&a.inv().unwrap()), one);
    }

    #[test]
    fn galois_is_multiplicative((a, b, _) in three_cyc(), d in 1i64..60) {
        let n = a.level() as i64;
        prop_assume!(num_integer::gcd(d, n) == 1);
        prop_assert_eq!(a.mul(&b).galois(d).unwrap(), a.galois(d).unwrap().mul(&b.galois(d).unwrap()));
        prop_assert_eq!(a.galois(-1).unwrap(), a.conj());
    }

    #[test]
    fn embedding_is_multiplicative((a, b, _) in three_cyc()) {
        let (x, y) = (a.to_f64(), b.to_f64());
        let (p, q) = a.mul(&b).to_f64();
        let scale = 1.0 + (x.0.hypot(x.1) * y.0.hypot(y.1));
        prop_assert!((p - (x.0 * y.0 - x.1 * y.1)).abs() < 1e-9 * scale);
        prop_assert!((q - (x.0 * y.1 + x.1 * y.0)).abs() < 1e-9 * scale);
    }

    #[test]
    fn level_lift_preserves_value((a, b, _) in three_cyc()) {
        let n = a.level();
        let la = a.lift_level(3 * n).unwrap();
        let lb = b.lift_level(3 * n).unwrap();
        prop_assert_eq!(la.mul(&lb), a.mul(&b).lift_level(3 * n).unwrap());
    }

    #[test]
    fn series_inverse(tail in prop::collection::vec(-3i64..=3, 1..20), order in 5i64..25) {
        let mut c = vec![BigInt::one()];
        c.extend(tail.into_iter().map(BigInt::from));
        let ord = Rational64::from_integer(order);
        let s = QSeries::from_dense(1, Rational64::zero(), ord, &c);
        let inv = s.invert().unwrap();
        prop_assert!(s.mul(&inv).agrees_with(&QSeries::one(ord)).is_ok());
    }

    #[test]
    fn series_valuation_adds(a in -3i64..3, b in 1i64..4, da in 1i64..4) {
        let ord = Rational64::from_integer(10);
        let x = QSeries::from_dense(da, Rational64::new(a, da), ord, &[BigInt::from(2), BigInt::from(-1)]);
        let y = QSeries::from_dense(1, Rational64::from_integer(b), ord, &[BigInt::from(3)]);
        prop_assert_eq!(x.mul(&y).valuation(), x.valuation() + y.valuation());
    }

    #[test]
    fn gl2_group_laws(
        (g, h, k) in prop::sample::select(&[5u64, 7, 9][..]).prop_flat_map(|l| (gl2(l), gl2(l), gl2(l)))
    ) {
        let l = g.ell as u64;
        prop_assert_eq!(g.mul(&h).mul(&k), g.mul(&h.mul(&k)));
        prop_assert_eq!(g.mul(&g.inv()), GL2Class::identity(l));
        let neg = GL2Class::new(-g.a, -g.b, -g.c, -g.d, l).unwrap();
        prop_assert_eq!(neg, g);
        prop_assert_eq!(
            num_integer::Integer::mod_floor(&(g.mul(&h).det() - g.det() * h.det()), &(l as i64)),
            0
        );
    }

    #[test]
    fn identity_class_keeps_order_at_infinity((l, m) in odd_level_and_m()) {
        prop_assert_eq!(ord_inf_under(&GL2Class::identity(l), l, m), ord_infinity_s(l, m));
    }

    #[test]
    fn translation_phase_is_a_character((l, m) in odd_level_and_m(), b1 in -20i64..20, b2 in -20i64..20) {
        let lift = |x: CycNum| x.lift_level(4 * l).unwrap();
        prop_assert_eq!(
            lift(translation_phase(b1, l, m)).mul(&lift(translation_phase(b2, l, m))),
            lift(translation_phase(b1 + b2, l, m))
        );
        prop_assert_eq!(lift(translation_phase(l as i64, l, m)), CycNum::one(4 * l));
    }

    #[test]
    fn b2_is_periodic_and_even(n in -50i64..50, d in 1i64..30, k in -3i64..3) {
        let x = Rational64::new(n, d);
        prop_assert_eq!(bernoulli_b2_frac(x), bernoulli_b2_frac(x + k));
        prop_assert_eq!(bernoulli_b2_frac(x), bernoulli_b2_frac(-x));
    }

    #[test]
    fn siegel_reduction_is_path_independent(
        l in 2u64..12, p in 0i64..12, r in 0i64..12, u in -3i64..3, t in -3i64..3
    ) {
        let li = l as i64;
        let (p, r) = (p % li, r % li);
        prop_assume!(p != 0 || r != 0);
        let (red, x) = SiegelIndex::new(p + u * li, r + t * li, l).unwrap().reduce();
        prop_assert!(red.is_reduced());
        prop_assert_eq!((red.a1(), red.a2()), (Rational64::new(p, li), Rational64::new(r, li)));
        // Walk the first coordinate home before the second.
        let a2 = Rational64::new(r + t * li, li);
        let a1 = Rational64::new(p, li);
        let phase = Rational64::from_integer(u) * (Rational64::new(1, 2) - a2 / 2)
            + Rational64::from_integer(t) * (a1 - 1) / 2;
        prop_assert_eq!(fract(phase), x);
        prop_assert_eq!(red.reduce().1, Rational64::zero());
    }

    #[test]
    fn horizontal_strips_interlace(lam in arb_partition(6, 4), extra in 0usize..2) {
        let max_len = lam.len() + extra;
        let strips = lam.horizontal_strips(max_len);
        let expected: u64 = (0..lam.len()).map(|i| (lam.part(i) - lam.part(i + 1) + 1) as u64).product();
        prop_assert_eq!(strips.len() as u64, expected);
        for mu in &strips {
            for i in 0..lam.len() {
                prop_assert!(lam.part(i + 1) <= mu.part(i) && mu.part(i) <= lam.part(i));
            }
        }
    }

    #[test]
    fn hall_littlewood_is_symmetric_and_stable(
        lam in arb_partition(3, 2), x in prop::collection::vec(-3i64..=3, 3), t in -2i64..=2
    ) {
        let p3 = hl_poly(&lam, 3);
        let xs: Vec<BigRational> = x.iter().map(|&v| rat(v)).collect();
        let swapped = vec![xs[1].clone(), xs[0].clone(), xs[2].clone()];
        let rotated = vec![xs[2].clone(), xs[0].clone(), xs[1].clone()];
        let tt = rat(t);
        let v = p3.eval(&xs, &tt);
        prop_assert_eq!(&v, &p3.eval(&swapped, &tt));
        prop_assert_eq!(&v, &p3.eval(&rotated, &tt));
        let p2 = hl_poly(&lam, 2);
        let dropped = vec![xs[0].clone(), xs[1].clone(), rat(0)];
        prop_assert_eq!(p3.eval(&dropped, &tt), p2.eval(&xs[..2], &tt));
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(12))]

    #[test]
    fn s_unit_leading_exponent((l, m) in odd_level_and_m()) {
        let s = s_unit(l, m, Rational64::from_integer(3)).unwrap();
        prop_assert_eq!(s.valuation(), s_leading_exponent(l, m));
    }
}
