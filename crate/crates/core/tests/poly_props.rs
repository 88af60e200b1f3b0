use proptest::prelude::*;
use qfsplit::{parse_polynomial, serialize, Monomial, Polynomial, Ring, RingRef};

fn ring(p: u64) -> RingRef {
    Ring::new(p, &["x", "y", "z"]).unwrap()
}

fn terms(max_terms: usize, max_exp: u32) -> impl Strategy<Value = Vec<(Vec<u32>, u32)>> {
    prop::collection::vec((prop::collection::vec(0..max_exp, 3), 1u32..1000), 0..max_terms)
}

fn build(r: &RingRef, t: &[(Vec<u32>, u32)]) -> Polynomial {
    Polynomial::from_terms(r, t.iter().map(|(e, c)| (Monomial::from_slice(e), *c)))
}

fn primes() -> impl Strategy<Value = u64> {
    prop::sample::select(vec![2u64, 3, 5, 7])
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn ring_axioms(p in primes(), a in terms(6, 4), b in terms(6, 4), c in terms(6, 4)) {
        let r = ring(p);
        let (a, b, c) = (build(&r, &a), build(&r, &b), build(&r, &c));
        prop_assert_eq!(&(&a * &b) * &c, &a * &(&b * &c));
        prop_assert_eq!(&(&a + &b) + &c, &a + &(&b + &c));
        prop_assert_eq!(&a * &(&b + &c), &(&a * &b) + &(&a * &c));
        prop_assert_eq!(&a * &b, &b * &a);
        prop_assert_eq!(&a + &b, &b + &a);
        prop_assert!((&a - &a).is_zero());
        prop_assert_eq!(&a * &Polynomial::one(&r), a.clone());
    }

    #[test]
    fn freshmans_dream(p in primes(), a in terms(5, 3), b in terms(5, 3)) {
        let r = ring(p);
        let (a, b) = (build(&r, &a), build(&r, &b));
        let lhs = (&a + &b).power(p).unwrap();
        prop_assert_eq!(lhs, &a.frobenius(1) + &b.frobenius(1));
        prop_assert_eq!(a.power(p).unwrap(), a.frobenius(1));
    }

    #[test]
    fn capped_product_is_truncated_product(
        p in primes(),
        a in terms(10, 6),
        b in terms(10, 6),
        cap in prop::collection::vec(0u32..10, 3),
    ) {
        let r = ring(p);
        let (a, b) = (build(&r, &a), build(&r, &b));
        prop_assert_eq!(a.capped_multiply(&b, &cap).unwrap(), (&a * &b).truncate(&cap));
    }

    #[test]
    fn parse_serialize_round_trip(p in primes(), a in terms(8, 5)) {
        let r = ring(p);
        let a = build(&r, &a);
        let text = serialize(&a);
        let back = parse_polynomial(&text, &r).unwrap();
        prop_assert_eq!(serialize(&back), text);
        prop_assert_eq!(back, a);
    }
}

#[test]
fn parse_handles_parentheses_and_signs() {
    let r = ring(5);
    let a = parse_polynomial("(x+y)^2 - 2*x*y - (z)", &r).unwrap();
    let b = parse_polynomial("x^2 + y^2 + 4*z", &r).unwrap();
    assert_eq!(a, b);
}

#[test]
fn malformed_input_is_rejected() {
    let r = ring(3);
    for bad in ["x+", "x^", "2**y", "(x+y", "q", "x^-1"] {
        assert!(parse_polynomial(bad, &r).is_err(), "{bad}");
    }
}
