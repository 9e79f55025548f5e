use canonframe::rational::Rational;
use num_bigint::BigInt;
use num_rational::BigRational;
use proptest::prelude::*;

fn word() -> impl Strategy<Value = i64> {
    prop_oneof![-20i64..=20, any::<i64>(), Just(i64::MAX), Just(i64::MIN + 1), (1i64..=1 << 20).prop_map(|x| x << 40)]
}

fn pair() -> impl Strategy<Value = (i64, i64)> {
    (word(), word().prop_filter("nonzero", |d| *d != 0 && *d != i64::MIN))
}

fn big((n, d): (i64, i64)) -> BigRational {
    BigRational::new(BigInt::from(n), BigInt::from(d))
}

fn ours((n, d): (i64, i64)) -> Rational {
    Rational::new(n, d)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(500))]

    #[test]
    fn arithmetic_matches_bigrational(a in pair(), b in pair()) {
        let (x, y) = (ours(a), ours(b));
        let (bx, by) = (big(a), big(b));
        prop_assert_eq!((&x + &y).to_big(), &bx + &by);
        prop_assert_eq!((&x - &y).to_big(), &bx - &by);
        prop_assert_eq!((&x * &y).to_big(), &bx * &by);
        if !y.is_zero() {
            prop_assert_eq!((&x / &y).to_big(), &bx / &by);
        }
        let mut acc = x.clone();
        acc.add_mul(&y, &y);
        prop_assert_eq!(acc.to_big(), &bx + &by * &by);
        // normalized representation: equal values compare and hash equal
        let round = Rational::from_big(x.to_big());
        prop_assert_eq!(round, x);
    }
}
