use std::collections::BTreeSet;

use num_bigint::{BigInt, BigUint};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use twistparity::characters::{kronecker, support_s, support_t, support_u};
use twistparity::classes::{
    place_class_key, unit_class_representative, unit_representatives, Family, Place,
};
use twistparity::descent::{lambda_parity, locally_soluble};
use twistparity::record::ClassificationRecord;
use twistparity::{
    classify, classify_cubic, equivalent, factorize, ord_p, power_free_representative, unit_part,
    Rational,
};

const SMALL_PRIMES: [u64; 8] = [2, 3, 5, 7, 11, 13, 17, 19];
const FAMILIES: [Family; 2] = [Family::Quartic, Family::Sextic];

fn nonzero(bound: i64) -> impl Strategy<Value = i64> {
    (1..=bound).prop_flat_map(|n| prop_oneof![Just(n), Just(-n)])
}

fn rational(num: i64, den: i64) -> impl Strategy<Value = Rational> {
    (nonzero(num), 1..=den).prop_map(|(n, d)| Rational::new(n, d).unwrap())
}

fn prime() -> impl Strategy<Value = u64> {
    proptest::sample::select(&SMALL_PRIMES[..])
}

fn big(p: u64) -> BigUint {
    BigUint::from(p)
}

fn p_power(p: u64, e: i64) -> Rational {
    let pe = BigInt::from(p).pow(e.unsigned_abs() as u32);
    if e >= 0 {
        Rational::from(pe)
    } else {
        Rational::new(1, pe).unwrap()
    }
}

proptest! {
    #[test]
    fn unit_part_times_power_recovers_q(q in rational(1_000_000, 100_000), p in prime()) {
        let e = ord_p(&q, &big(p)).unwrap();
        let u = unit_part(&q, &big(p)).unwrap();
        prop_assert_eq!(&u * &p_power(p, e), q);
        prop_assert_eq!(ord_p(&u, &big(p)).unwrap(), 0);
    }

    #[test]
    fn power_free_representative_is_invariant(
        q in rational(100_000, 1_000),
        k in rational(300, 50),
        n in proptest::sample::select(vec![2u32, 3, 4, 6]),
    ) {
        let r = power_free_representative(&q, n).unwrap();
        let twisted = &q * &k.pow(n);
        prop_assert_eq!(power_free_representative(&twisted, n).unwrap(), r.clone());
        // The representative is itself n-th-power-free and in the same class.
        let f = factorize(&r).unwrap();
        prop_assert!(f.factors.iter().all(|(_, e)| *e < n));
        let ratio = Rational::new(r, 1).unwrap() * Rational::new(q.denom().clone(), q.numer().clone()).unwrap();
        let rf = twistparity::arith::factorize_rational(&ratio).unwrap();
        prop_assert!(rf.factors.iter().all(|(_, e)| e % n as i64 == 0));
    }

    #[test]
    fn supports_are_class_invariants(d in rational(1_000_000, 1_000), k in rational(500, 50)) {
        prop_assert_eq!(support_s(&(&d * &k.pow(4))).unwrap(), support_s(&d).unwrap());
        prop_assert_eq!(support_u(&(&d * &k.pow(6))).unwrap(), support_u(&d).unwrap());
        prop_assert_eq!(support_t(&(&d * &k.pow(3))).unwrap(), support_t(&d).unwrap());
    }

    #[test]
    fn twisting_by_nth_powers_preserves_keys(d in rational(1_000_000, 1_000), k in rational(500, 50)) {
        for family in FAMILIES {
            let twisted = &d * &k.pow(family.degree());
            prop_assert!(equivalent(&d, &twisted, family).unwrap());
            prop_assert_eq!(classify(family, &d).unwrap().total, classify(family, &twisted).unwrap().total);
        }
    }

    #[test]
    fn breakdown_terms_sum_to_total(d in rational(10_000_000, 10_000)) {
        for family in FAMILIES {
            let b = classify(family, &d).unwrap();
            prop_assert_eq!(b.sum_of_terms(), b.total);
            prop_assert_eq!(b.local.len(), family.bad_places().len());
            for t in &b.local {
                prop_assert_eq!(t.key, place_class_key(&d, t.key.place(), family).unwrap());
            }
        }
        let cubic = classify_cubic(&d).unwrap();
        prop_assert_eq!(cubic.total(), classify(Family::Sextic, &(&d * &d)).unwrap().total);
    }

    #[test]
    fn classification_records_round_trip(d in rational(1_000_000_000, 1_000)) {
        for family in FAMILIES {
            let rec = ClassificationRecord::from(&classify(family, &d).unwrap());
            let back: ClassificationRecord = serde_json::from_str(&rec.to_json_line()).unwrap();
            prop_assert_eq!(back, rec);
        }
    }

    #[test]
    fn unit_representative_is_idempotent(u in 1i64..1_000_000) {
        for (family, p) in [(Family::Quartic, 2u64), (Family::Sextic, 2), (Family::Sextic, 3), (Family::Quadratic, 2)] {
            let mut u = u;
            while u % p as i64 == 0 {
                u /= p as i64;
            }
            let r = unit_class_representative(&BigInt::from(u), p, family).unwrap();
            prop_assert!(unit_representatives(family, p).unwrap().contains(&r));
            prop_assert_eq!(unit_class_representative(&BigInt::from(r), p, family).unwrap(), r);
        }
    }

    #[test]
    fn lambda_parity_is_a_quartic_class_invariant(d in nonzero(300), k in 1i64..6) {
        let twisted = BigInt::from(d) * BigInt::from(k).pow(4);
        prop_assert_eq!(lambda_parity(&twisted).unwrap(), lambda_parity(&BigInt::from(d)).unwrap());
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(10_000))]

    #[test]
    fn valuation_is_additive(a in rational(1_000_000, 1_000_000), b in rational(1_000_000, 1_000_000), p in prime()) {
        let p = big(p);
        prop_assert_eq!(ord_p(&(&a * &b), &p).unwrap(), ord_p(&a, &p).unwrap() + ord_p(&b, &p).unwrap());
    }

    #[test]
    fn jacobi_is_multiplicative(a in -100_000i64..100_000, b in -100_000i64..100_000, n in 0u64..50_000) {
        let n = BigUint::from(2 * n + 1);
        let (a, b) = (BigInt::from(a), BigInt::from(b));
        prop_assert_eq!(
            kronecker(&(&a * &b), &n).unwrap(),
            kronecker(&a, &n).unwrap() * kronecker(&b, &n).unwrap()
        );
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(1_000))]

    #[test]
    fn equivalence_is_an_equivalence_relation(
        a in rational(100_000, 100),
        b in rational(100_000, 100),
        c in rational(100_000, 100),
    ) {
        for family in FAMILIES {
            let eq = |x: &Rational, y: &Rational| equivalent(x, y, family).unwrap();
            prop_assert!(eq(&a, &a));
            prop_assert_eq!(eq(&a, &b), eq(&b, &a));
            if eq(&a, &b) && eq(&b, &c) {
                prop_assert!(eq(&a, &c));
            }
        }
    }
}

#[test]
fn random_64_bit_factorizations() {
    let mut rng = ChaCha8Rng::seed_from_u64(64);
    for _ in 0..100 {
        let n = BigInt::from(rng.gen::<u64>() | 1) * if rng.gen() { 1 } else { -1 };
        let f = factorize(&n).unwrap();
        assert_eq!(f.value(), n);
        for (p, e) in &f.factors {
            assert!(*e > 0);
            assert!(twistparity::arith::is_prime(p).unwrap(), "{p} from {n}");
        }
        assert!(f.factors.windows(2).all(|w| w[0].0 < w[1].0));
    }
}

// ---- brute-force local solubility ----

fn qp_square(f: i128, p: i128) -> bool {
    if f == 0 {
        return true;
    }
    let mut u = f;
    let mut v = 0;
    while u % p == 0 {
        u /= p;
        v += 1;
    }
    if v % 2 == 1 {
        return false;
    }
    if p == 2 {
        return u.rem_euclid(8) == 1;
    }
    let r = u.rem_euclid(p);
    (1..p).any(|w| w * w % p == r)
}

/// `Some(answer)` once a witness or a modular obstruction mod `p^k` is found.
fn brute_soluble(d1: i128, d2: i128, p: i128, k: u32) -> Option<bool> {
    let m = p.pow(k);
    let squares: BTreeSet<i128> = (0..m).map(|w| w * w % m).collect();
    let values = (0..m)
        .map(|x| d1 * x.pow(4) + d2)
        .chain((0..m / p).map(|y| d1 + d2 * (p * y).pow(4)));
    let mut possible = false;
    for f in values {
        if qp_square(f, p) {
            return Some(true);
        }
        possible |= squares.contains(&f.rem_euclid(m));
    }
    if possible {
        None
    } else {
        Some(false)
    }
}

#[test]
fn local_solubility_matches_brute_force() {
    const BOX: i128 = 30;
    const MODULUS_LIMIT: i128 = 1 << 16;
    let mut undecided = Vec::new();
    for p in [2i128, 3, 5, 7, 11, 13] {
        for d1 in (-BOX..=BOX).filter(|&x| x != 0) {
            for d2 in (-BOX..=BOX).filter(|&x| x != 0) {
                let fast = locally_soluble(&BigInt::from(d1), &BigInt::from(d2), Place::Finite(p as u64)).unwrap();
                let mut k = 1;
                let slow = loop {
                    if p.pow(k) > MODULUS_LIMIT {
                        break None;
                    }
                    if let Some(ans) = brute_soluble(d1, d2, p, k) {
                        break Some(ans);
                    }
                    k += 1;
                };
                match slow {
                    Some(ans) => assert_eq!(fast, ans, "w^2 = {d1} u^4 + {d2} v^4 at {p}"),
                    None => undecided.push((d1, d2, p)),
                }
            }
        }
    }
    assert!(undecided.is_empty(), "brute force undecided: {undecided:?}");
}

#[test]
fn real_solubility() {
    let b = |n: i64| BigInt::from(n);
    assert!(locally_soluble(&b(-1), &b(2), Place::Real).unwrap());
    assert!(!locally_soluble(&b(-1), &b(-2), Place::Real).unwrap());
    assert!(locally_soluble(&b(1), &b(-1), Place::Real).unwrap());
}
