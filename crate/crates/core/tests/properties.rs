use std::sync::Arc;

use proptest::prelude::*;

use exsh::beta::BetaSystem;
use exsh::conformal::ConformalMeasure;
use exsh::markov::MarkovMeasure;
use exsh::relations::{exchangeable, grand_tail_equivalent, tail_equivalent, EpPoint};
use exsh::tms::Tms;
use exsh::{ExactScalar, Symbol};

fn q(s: &str) -> ExactScalar {
    s.parse().unwrap()
}

fn rational() -> impl Strategy<Value = ExactScalar> {
    (-50i64..50, 1i64..20).prop_map(|(n, d)| ExactScalar::ratio(n, d))
}

fn quadratic() -> impl Strategy<Value = ExactScalar> {
    (-20i64..20, -20i64..20, 1i64..6).prop_map(|(a, b, den)| ExactScalar::quadratic(a, b, 5, den).unwrap())
}

fn point() -> impl Strategy<Value = EpPoint> {
    (
        prop::collection::vec(0u32..2, 0..4),
        prop::collection::vec(0u32..2, 1..4),
    )
        .prop_map(|(pre, per)| EpPoint::new(pre, per).unwrap())
}

proptest! {
    #[test]
    fn quadratic_field_laws(x in quadratic(), y in quadratic(), z in quadratic()) {
        prop_assert_eq!(&(&x + &y) * &z, &(&x * &z) + &(&y * &z));
        prop_assert_eq!(&(&x - &y) + &y, x.clone());
        if !y.is_zero() {
            prop_assert_eq!(&(&x / &y) * &y, x.clone());
        }
        if (x.to_f64() - y.to_f64()).abs() > 1e-9 {
            prop_assert_eq!(x < y, x.to_f64() < y.to_f64());
        }
    }

    #[test]
    fn scalar_display_round_trips(x in rational(), y in quadratic()) {
        prop_assert_eq!(x.to_string().parse::<ExactScalar>().unwrap(), x);
        prop_assert_eq!(y.to_string().parse::<ExactScalar>().unwrap(), y);
    }

    #[test]
    fn greedy_digits_are_admissible(num in 0i64..1000) {
        let b = BetaSystem::parse("golden").unwrap();
        let x = ExactScalar::ratio(num, 1000);
        let w = b.beta_expand(&x, 16).unwrap();
        prop_assert!(b.is_admissible(&w).unwrap());
        let v = b.word_value(&w);
        prop_assert!(v <= x);
        prop_assert!(&x - &v < b.beta().recip().pow(16));
    }

    #[test]
    fn factorization_reassembles(w in prop::collection::vec(0u32..2, 0..14)) {
        let b = BetaSystem::parse("golden").unwrap();
        prop_assume!(b.is_admissible(&w).unwrap());
        let (factors, residue) = b.factorize(&w).unwrap();
        let mut joined: Vec<Symbol> = factors.iter().flat_map(|f| f.iter().copied()).collect();
        joined.extend(residue.iter());
        prop_assert_eq!(joined, w.clone());
        prop_assert_eq!(residue.is_empty(), b.fullness(&w).unwrap().full);
    }

    #[test]
    fn relations_nest(x in point(), y in point()) {
        let k = x.completeness_bound(&y);
        let ex = exchangeable(&x, &y, k).is_related();
        let tail = tail_equivalent(&x, &y, k).is_related();
        let grand = grand_tail_equivalent(&x, &y, k, k).is_related();
        prop_assert!(!ex || tail);
        prop_assert!(!tail || grand);
        prop_assert_eq!(tail, tail_equivalent(&y, &x, k).is_related());
    }

    #[test]
    fn initial_measures_are_exchangeable(pi in prop::collection::vec(1i64..30, 3)) {
        let pes = Tms::new(vec![vec![1, 1, 0], vec![0, 0, 1], vec![1, 1, 0]]).unwrap();
        let pi: Vec<ExactScalar> = pi.into_iter().map(ExactScalar::from_int).collect();
        let m = MarkovMeasure::from_initial(pes, pi.clone()).unwrap();
        prop_assert!(m.verify_exchangeability(6, &ExactScalar::zero()).violations.is_empty());
        for s in 0..3u32 {
            prop_assert_eq!(m.cylinder_measure(&[s]).unwrap(), pi[s as usize].clone());
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(12))]

    #[test]
    fn conformal_bracket_is_ordered(h0 in 1i64..6, h1 in 1i64..6) {
        let b = Arc::new(BetaSystem::parse("golden").unwrap());
        let h = [ExactScalar::from_int(h0), ExactScalar::from_int(h1)];
        let m = ConformalMeasure::solve(b, &[0, 1], &h, 32, &q("1e-8")).unwrap();
        prop_assert!(m.lambda_lo() <= m.lambda_hi());
        prop_assert!(m.lambda_hi() - m.lambda_lo() < q("1e-8"));
        prop_assert!(m.normalization_shortfall() >= ExactScalar::zero());
        let whole = m.cylinder_measure(&[0], None).unwrap();
        prop_assert!(whole.lo <= whole.hi);
    }
}
