use num_bigint::BigInt;
use proptest::prelude::*;

use modunit::closedform::{c, ExponentTable};
use modunit::cyclofield::Embedder;
use modunit::ntharith::{bernoulli2, divisors, mobius_sum};
use modunit::qseries::oracle_c;
use modunit::torsion::representatives;
use modunit::{Cyc, ExponentVector, Level, Rational, Series};

fn l5() -> Level {
    Level::new(5, 1).unwrap()
}

fn rat(n: i64, d: i64) -> Rational {
    Rational::new(BigInt::from(n), BigInt::from(d))
}

fn cyc(l: Level, bound: i64) -> impl Strategy<Value = Cyc> {
    prop::collection::vec(-bound..=bound, l.phi())
        .prop_map(move |c| Cyc::from_coeffs(l, c.into_iter().map(|x| rat(x, 1)).collect()))
}

fn series(l: Level, n: usize) -> impl Strategy<Value = Series> {
    prop::collection::vec(cyc(l, 5), n + 1).prop_map(move |c| Series::from_coeffs(l, n, c))
}

fn exponent_vector(l: Level) -> impl Strategy<Value = ExponentVector> {
    let reps = representatives(l);
    prop::collection::vec((0..reps.len(), -40i64..=40), 0..4).prop_map(move |items| {
        ExponentVector::from_points(l, items.into_iter().map(|(i, m)| (reps[i], m))).unwrap()
    })
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 64, failure_persistence: None, ..ProptestConfig::default() })]

    #[test]
    fn bernoulli_symmetry(num in 0i64..200, den in 1i64..200) {
        let x = rat(num, den);
        prop_assert_eq!(bernoulli2(&x), bernoulli2(&(rat(1, 1) - &x)));
    }

    #[test]
    fn mobius_sum_vanishes(n in 2u64..20_000) {
        prop_assert_eq!(mobius_sum(n), 0);
    }

    #[test]
    fn divisors_pair_up(n in 1u64..50_000) {
        let ds = divisors(n);
        for (a, b) in ds.iter().zip(ds.iter().rev()) {
            prop_assert_eq!(a * b, n);
        }
    }

    #[test]
    fn roots_of_unity_multiply(a in -60i64..60, b in -60i64..60, f in 1u32..=2) {
        let l = Level::new(5, f).unwrap();
        let lhs = &Cyc::root_of_unity(l, a) * &Cyc::root_of_unity(l, b);
        prop_assert_eq!(lhs, Cyc::root_of_unity(l, a + b));
        prop_assert_eq!(Cyc::root_of_unity(l, a).conj(), Cyc::root_of_unity(l, -a));
    }

    #[test]
    fn inverse_is_two_sided(x in cyc(Level::new(7, 1).unwrap(), 9)) {
        prop_assume!(!x.is_zero());
        let inv = x.invert().unwrap();
        prop_assert!((&x * &inv).is_one());
        prop_assert!((&inv * &x).is_one());
    }

    #[test]
    fn embedding_is_a_ring_map(x in cyc(l5(), 20), y in cyc(l5(), 20)) {
        let e = Embedder::new(l5(), 128);
        let close = |a: (f64, f64), b: (f64, f64)| {
            let scale = 1.0 + a.0.abs().max(a.1.abs());
            (a.0 - b.0).abs() < 1e-12 * scale && (a.1 - b.1).abs() < 1e-12 * scale
        };
        let sum = (&e.embed(&x) + &e.embed(&y)).to_f64();
        prop_assert!(close(e.embed(&(&x + &y)).to_f64(), sum));
        let prod = (&e.embed(&x) * &e.embed(&y)).to_f64();
        prop_assert!(close(e.embed(&(&x * &y)).to_f64(), prod));
    }

    #[test]
    fn series_ring_laws(a in series(l5(), 5), b in series(l5(), 5), c in series(l5(), 5)) {
        prop_assert_eq!(a.mul(&b).unwrap(), b.mul(&a).unwrap());
        let left = a.mul(&b.add(&c).unwrap()).unwrap();
        let right = a.mul(&b).unwrap().add(&a.mul(&c).unwrap()).unwrap();
        prop_assert_eq!(left, right);
        prop_assert_eq!(a.mul(&b).unwrap().mul(&c).unwrap(), a.mul(&b.mul(&c).unwrap()).unwrap());
    }

    #[test]
    fn theta_leibniz(a in series(l5(), 6), b in series(l5(), 6)) {
        let lhs = a.mul(&b).unwrap().theta();
        let rhs = a.theta().mul(&b).unwrap().add(&a.mul(&b.theta()).unwrap()).unwrap();
        prop_assert_eq!(lhs, rhs);
    }

    #[test]
    fn validity_is_linear(v in exponent_vector(l5()), w in exponent_vector(l5())) {
        let sum = v.checked_add(&w).unwrap().validate();
        let (a, b) = (v.validate(), w.validate());
        prop_assert_eq!(sum.sum_r2, (a.sum_r2 + b.sum_r2) % 5);
        prop_assert_eq!(sum.sum_s2, (a.sum_s2 + b.sum_s2) % 5);
        prop_assert_eq!(sum.sum_rs, (a.sum_rs + b.sum_rs) % 5);
        prop_assert_eq!(sum.sum_m, (a.sum_m + b.sum_m) % 12);
    }

    #[test]
    fn max_abs_subadditive(v in exponent_vector(l5()), w in exponent_vector(l5())) {
        let sum = v.checked_add(&w).unwrap();
        let m = |x: &ExponentVector| x.max_abs().unwrap_or(0);
        prop_assert!(m(&sum) <= m(&v) + m(&w));
    }

    #[test]
    fn exponents_are_linear(v in exponent_vector(l5()), w in exponent_vector(l5()), n in 1u64..120) {
        let sum = v.checked_add(&w).unwrap();
        let lhs: Cyc = c(&sum, n);
        prop_assert_eq!(lhs, &c::<Rational>(&v, n) + &c::<Rational>(&w, n));
    }

    #[test]
    fn conjugate_vector_conjugates_exponents(v in exponent_vector(Level::new(7, 1).unwrap()), n in 1u64..120) {
        let lhs: Cyc = c(&v.conjugate(), n);
        prop_assert_eq!(lhs, c::<Rational>(&v, n).conj());
    }

    #[test]
    fn real_support_gives_rational_exponents(ms in prop::collection::vec(-30i64..=30, 2), n in 1u64..200) {
        let v = ExponentVector::from_entries(l5(), [(1, 0, ms[0]), (2, 0, ms[1])]).unwrap();
        let x: Cyc = c(&v, n);
        prop_assert!(x.as_scalar().is_some());
    }
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 16, failure_persistence: None, ..ProptestConfig::default() })]

    #[test]
    fn oracle_is_additive(v in exponent_vector(l5()), w in exponent_vector(l5())) {
        let sum = v.checked_add(&w).unwrap();
        let (a, b, s) = (oracle_c(&v, 40).unwrap(), oracle_c(&w, 40).unwrap(), oracle_c(&sum, 40).unwrap());
        for ((x, y), z) in a.iter().zip(&b).zip(&s) {
            prop_assert_eq!(&(x + y), z);
        }
    }

    #[test]
    fn oracle_matches_closed_form(v in exponent_vector(Level::new(5, 2).unwrap())) {
        let table = ExponentTable::<Rational>::compute(&v, 60);
        prop_assert_eq!(table.values(), &oracle_c(&v, 60).unwrap()[..]);
    }
}

#[test]
fn v0_oracle_pattern() {
    let l = l5();
    let v0 = ExponentVector::from_entries(l, [(1, 0, 60)]).unwrap();
    for (i, x) in oracle_c(&v0, 200).unwrap().iter().enumerate() {
        let n = i + 1;
        let expected = if n % 5 == 1 || n % 5 == 4 { 60 } else { 0 };
        assert_eq!(*x, Cyc::from_i64(l, expected), "n = {n}");
    }
}

#[test]
fn empty_vector_has_zero_exponents() {
    let v = ExponentVector::empty(Level::new(7, 1).unwrap());
    assert!(oracle_c(&v, 50).unwrap().iter().all(Cyc::is_zero));
    assert!(ExponentTable::<Rational>::compute(&v, 50).values().iter().all(Cyc::is_zero));
}
