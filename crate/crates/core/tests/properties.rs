use homcard::arith::{self, big, int, l_valuation, prime_pow, qbinomial, rat, Rational, Valuation};
use homcard::expoly::{ExpoPoly, IntValuedPoly};
use homcard::spaces::AbelianGroup;
use homcard::{oracle, Evaluator, FiniteGroup, SpaceExpr};
use proptest::prelude::*;

fn rational() -> impl Strategy<Value = Rational> {
    (-10_000i64..=10_000, 1i64..=500).prop_map(|(n, d)| rat(n, d))
}

fn nonzero_rational() -> impl Strategy<Value = Rational> {
    rational().prop_filter("nonzero", |x| *x != int(0))
}

fn poly() -> impl Strategy<Value = IntValuedPoly> {
    prop::collection::vec(-3i64..=3, 0..=3).prop_map(IntValuedPoly::new)
}

fn expoly() -> impl Strategy<Value = ExpoPoly> {
    prop::collection::vec((rational(), poly()), 0..=3).prop_map(|terms| {
        terms.into_iter().fold(ExpoPoly::zero(3), |acc, (c, f)| {
            acc.add(&ExpoPoly::term(3, c, f)).unwrap()
        })
    })
}

fn agree_at_points(a: &ExpoPoly, b: &ExpoPoly, points: &[i64]) -> bool {
    points.iter().all(|&n| a.eval(n) == b.eval(n))
}

fn space() -> impl Strategy<Value = SpaceExpr> {
    let leaf = prop_oneof![
        Just(SpaceExpr::Point),
        (1u32..=3, 1u32..=2).prop_map(|(d, e)| SpaceExpr::em(3u64.pow(e), d)),
        Just(SpaceExpr::bg(FiniteGroup::cyclic(3))),
        Just(SpaceExpr::bg(FiniteGroup::symmetric(3))),
        Just(SpaceExpr::cup_fiber(2)),
        Just(SpaceExpr::GEM(vec![
            (AbelianGroup::cyclic(3), 1),
            (AbelianGroup::cyclic(9), 2)
        ])),
    ];
    leaf.prop_recursive(2, 6, 2, |inner| {
        prop_oneof![
            (inner.clone(), inner.clone()).prop_map(|(x, y)| SpaceExpr::product(x, y)),
            (inner.clone(), inner).prop_map(|(x, y)| SpaceExpr::coproduct(x, y)),
        ]
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn transform_round_trip(xs in prop::collection::vec(rational(), 0..20)) {
        let xbar = arith::inverse_binomial_transform(&xs);
        prop_assert_eq!(arith::binomial_transform(&xbar), xs.clone());
        prop_assert_eq!(xbar, oracle::forward_differences(&xs));
    }

    #[test]
    fn polynomial_sequences_have_finite_expansions(f in poly(), extra in 1usize..8) {
        let d = f.degree().unwrap_or(0);
        let xs: Vec<Rational> = (0..(d + extra) as i64).map(|n| big(f.eval(n))).collect();
        let xbar = arith::inverse_binomial_transform(&xs);
        prop_assert!(xbar[d + 1..].iter().all(|x| *x == int(0)));
    }

    #[test]
    fn q_pascal(a in -6i64..10, b in 1u64..6, q in 2i64..8) {
        // [a, b] = [a-1, b-1] + q^b [a-1, b]
        let q = int(q);
        let lhs = qbinomial(a, b, &q).unwrap();
        let rhs = qbinomial(a - 1, b - 1, &q).unwrap()
            + arith::pow_int(&q, b as i64).unwrap() * qbinomial(a - 1, b, &q).unwrap();
        prop_assert_eq!(lhs, rhs);
    }

    #[test]
    fn valuations(x in nonzero_rational(), y in nonzero_rational(), l in prop::sample::select(vec![2u64, 3, 5, 7])) {
        let vx = l_valuation(&x, l);
        let vy = l_valuation(&y, l);
        prop_assert_eq!(l_valuation(&(&x * &y), l), vx + vy);
        let sum = l_valuation(&(&x + &y), l);
        prop_assert!(sum >= vx.min(vy));
        if vx != vy {
            prop_assert_eq!(sum, vx.min(vy));
        }
        prop_assert_eq!(l_valuation(&int(0), l), Valuation::Infinite);
    }

    #[test]
    fn expoly_ring_laws(
        a in expoly(),
        b in expoly(),
        c in expoly(),
        points in prop::collection::vec(-6i64..12, 20),
    ) {
        let ab = a.add(&b).unwrap();
        prop_assert_eq!(&ab, &b.add(&a).unwrap());
        prop_assert_eq!(ab.add(&c).unwrap(), a.add(&b.add(&c).unwrap()).unwrap());
        let m = a.mul(&b).unwrap();
        prop_assert_eq!(&m, &b.mul(&a).unwrap());
        prop_assert_eq!(m.mul(&c).unwrap(), a.mul(&b.mul(&c).unwrap()).unwrap());
        let dist = a.mul(&b.add(&c).unwrap()).unwrap();
        let expanded = a.mul(&b).unwrap().add(&a.mul(&c).unwrap()).unwrap();
        prop_assert!(agree_at_points(&dist, &expanded, &points));
        prop_assert_eq!(dist, expanded);
        prop_assert!(a.sub(&a).unwrap().is_zero());
        for &n in &points {
            prop_assert_eq!(ab.eval(n), a.eval(n) + b.eval(n));
        }
    }

    #[test]
    fn expoly_json_round_trip(a in expoly()) {
        prop_assert_eq!(ExpoPoly::from_json(&a.to_json()).unwrap(), a);
    }

    #[test]
    fn binomial_basis_pascal(k in 1usize..6, n in -5i64..10) {
        // C(n+1, k) = C(n, k) + C(n, k-1)
        let shifted = IntValuedPoly::binom(k).shift(1);
        let sum = IntValuedPoly::binom(k).add(&IntValuedPoly::binom(k - 1));
        prop_assert_eq!(&shifted, &sum);
        let e = ExpoPoly::power(3, IntValuedPoly::binom(k));
        let e1 = ExpoPoly::power(3, shifted);
        prop_assert_eq!(e1.eval(n), e.eval(n + 1));
        prop_assert_eq!(e.eval(n + 1), e.eval(n) * prime_pow(3, IntValuedPoly::binom(k - 1).eval_i64(n)));
    }

    #[test]
    fn chi_is_multiplicative_and_integral(x in space(), y in space()) {
        let ev = Evaluator::new(3).unwrap();
        let xy = SpaceExpr::product(x.clone(), y.clone());
        for n in 0..=6 {
            let (a, b) = (ev.chi(&x, n).unwrap(), ev.chi(&y, n).unwrap());
            prop_assert!(a.is_integer() && a >= int(0));
            prop_assert_eq!(ev.chi(&xy, n).unwrap(), a * b);
        }
        prop_assert_eq!(
            ev.cardinality(&xy).unwrap(),
            ev.cardinality(&x).unwrap() * ev.cardinality(&y).unwrap()
        );
    }

    #[test]
    fn space_json_round_trip(x in space()) {
        prop_assert_eq!(SpaceExpr::from_json(&x.to_json()).unwrap(), x);
    }
}
