//! Quadratic characters and the ramified supports that feed them.

use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use crate::arith::{factorize_rational, Rational};
use crate::error::{Error, Result};

/// The Jacobi symbol `(a / n)` for odd positive `n`.
pub fn kronecker(a: &BigInt, n: &BigUint) -> Result<i8> {
    if n.is_zero() || n.is_even() {
        return Err(Error::invalid(format!(
            "Jacobi symbol needs an odd positive modulus, got {n}"
        )));
    }
    let n_int = BigInt::from(n.clone());
    let mut a = a.mod_floor(&n_int).magnitude().clone();
    let mut n = n.clone();
    let mut result = 1i8;
    while !a.is_zero() {
        let tz = a.trailing_zeros().unwrap_or(0);
        a >>= tz;
        let n_mod_8 = (&n % 8u32).iter_u32_digits().next().unwrap_or(0);
        if tz % 2 == 1 && (n_mod_8 == 3 || n_mod_8 == 5) {
            result = -result;
        }
        // Reciprocity.
        std::mem::swap(&mut a, &mut n);
        if (&a % 4u32) == BigUint::from(3u32) && (&n % 4u32) == BigUint::from(3u32) {
            result = -result;
        }
        a %= &n;
    }
    Ok(if n.is_one() { result } else { 0 })
}

pub fn kronecker_i64(a: i64, n: u64) -> Result<i8> {
    kronecker(&BigInt::from(a), &BigUint::from(n))
}

/// A set of good odd places where a twist ramifies, in increasing order.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct RamifiedSupport {
    #[serde(with = "crate::record::biguint_vec")]
    pub primes: Vec<BigUint>,
}

impl RamifiedSupport {
    pub fn is_empty(&self) -> bool {
        self.primes.is_empty()
    }

    pub fn len(&self) -> usize {
        self.primes.len()
    }
}

fn support_where(
    d: &Rational,
    excluded: &[u32],
    keep: impl Fn(i64) -> bool,
) -> Result<RamifiedSupport> {
    d.require_nonzero()?;
    let f = factorize_rational(d)?;
    let primes = f
        .factors
        .into_iter()
        .filter(|(p, _)| !excluded.iter().any(|&b| *p == BigUint::from(b)))
        .filter(|(_, e)| keep(*e))
        .map(|(p, _)| p)
        .collect();
    Ok(RamifiedSupport { primes })
}

/// Odd primes with `ord_p(d) = 2 (mod 4)`.
pub fn support_s(d: &Rational) -> Result<RamifiedSupport> {
    support_where(d, &[2], |e| e.rem_euclid(4) == 2)
}

/// Primes `p` not dividing 6 with `ord_p(d)` not divisible by 3.
pub fn support_t(d: &Rational) -> Result<RamifiedSupport> {
    support_where(d, &[2, 3], |e| e.rem_euclid(3) != 0)
}

/// Primes `p` not dividing 6 with `ord_p(d) = 2 or 4 (mod 6)`.
pub fn support_u(d: &Rational) -> Result<RamifiedSupport> {
    support_where(d, &[2, 3], |e| matches!(e.rem_euclid(6), 2 | 4))
}

/// `(1 - prod_{p in S} (a/p)) / 2`, one factor per place.
pub fn character_term(a: i64, support: &RamifiedSupport) -> Result<u8> {
    let a_big = BigInt::from(a);
    let mut product = 1i8;
    for p in &support.primes {
        match kronecker(&a_big, p)? {
            0 => {
                return Err(Error::invalid(format!(
                    "prime {p} in ramified support divides the character modulus {a}"
                )))
            }
            s => product *= s,
        }
    }
    Ok(if product == 1 { 0 } else { 1 })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::is_prime_u64;

    fn q(n: i64, d: i64) -> Rational {
        Rational::new(n, d).unwrap()
    }

    fn primes(s: &RamifiedSupport) -> Vec<u64> {
        s.primes.iter().map(|p| p.try_into().unwrap()).collect()
    }

    fn naive_jacobi(a: i64, n: u64) -> i8 {
        // Product of Euler-criterion Legendre symbols over the factorization of n.
        let mut n_rest = n;
        let mut out = 1i8;
        let mut p = 3;
        while n_rest > 1 {
            while n_rest % p == 0 {
                n_rest /= p;
                let r = (a.rem_euclid(p as i64)) as u64;
                let l = crate::arith::powmod(r, (p - 1) / 2, p);
                out *= if r == 0 { 0 } else if l == 1 { 1 } else { -1 };
            }
            p += 2;
        }
        out
    }

    #[test]
    fn kronecker_examples() {
        assert_eq!(kronecker_i64(-1, 5).unwrap(), 1);
        assert_eq!(kronecker_i64(-1, 3).unwrap(), -1);
        assert_eq!(kronecker_i64(-3, 7).unwrap(), 1);
        assert_eq!(kronecker_i64(6, 9).unwrap(), 0);
        assert_eq!(kronecker_i64(5, 1).unwrap(), 1);
    }

    #[test]
    fn kronecker_rejects_even_modulus() {
        assert!(kronecker_i64(3, 4).is_err());
        assert!(kronecker_i64(3, 0).is_err());
    }

    #[test]
    fn kronecker_matches_euler_criterion() {
        for n in (1..400u64).step_by(2) {
            for a in -50..50i64 {
                assert_eq!(kronecker_i64(a, n).unwrap(), naive_jacobi(a, n), "({a}/{n})");
            }
        }
    }

    #[test]
    fn minus_one_on_primes() {
        for p in (3..10_000u64).filter(|&p| is_prime_u64(p)) {
            let expected = if p % 4 == 1 { 1 } else { -1 };
            assert_eq!(kronecker_i64(-1, p).unwrap(), expected);
        }
    }

    #[test]
    fn support_examples() {
        assert_eq!(primes(&support_s(&q(225, 1)).unwrap()), vec![3, 5]);
        assert!(support_s(&q(48, 1)).unwrap().is_empty());
        assert_eq!(primes(&support_s(&q(9, 16)).unwrap()), vec![3]);

        assert_eq!(primes(&support_t(&q(5, 1)).unwrap()), vec![5]);
        assert!(support_t(&q(125, 1)).unwrap().is_empty());
        assert_eq!(primes(&support_t(&q(2 * 49, 1)).unwrap()), vec![7]);

        assert_eq!(primes(&support_u(&q(25, 1)).unwrap()), vec![5]);
        assert!(support_u(&q(5, 1)).unwrap().is_empty());
        assert_eq!(primes(&support_u(&q(2401, 1)).unwrap()), vec![7]);
        // Negative valuations count too.
        assert_eq!(primes(&support_u(&q(1, 25)).unwrap()), vec![5]);
        assert!(support_u(&q(0, 1)).is_err());
    }

    #[test]
    fn character_examples() {
        let s = |v: &[u64]| RamifiedSupport {
            primes: v.iter().map(|&p| BigUint::from(p)).collect(),
        };
        assert_eq!(character_term(-1, &s(&[])).unwrap(), 0);
        assert_eq!(character_term(-1, &s(&[3])).unwrap(), 1);
        assert_eq!(character_term(-3, &s(&[7])).unwrap(), 0);
        assert_eq!(character_term(-1, &s(&[3, 7])).unwrap(), 0);
        assert!(character_term(-3, &s(&[3])).is_err());
    }
}
