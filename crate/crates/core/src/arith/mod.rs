//! Exact arithmetic: rationals, valuations, factorization and power-free
//! representatives.

mod factor;
mod primality;
mod rational;

use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

pub use factor::{factorize, factorize_with_effort, Factorization, DEFAULT_EFFORT, EFFORT_ENV};
pub use primality::{is_prime, is_prime_u64};
pub use rational::Rational;

pub(crate) use primality::powmod;

use crate::error::{Error, Result};

fn check_prime(p: &BigUint) -> Result<()> {
    if is_prime(p)? {
        Ok(())
    } else {
        Err(Error::invalid(format!("{p} is not prime")))
    }
}

/// Multiplicity of `p` in `n`, and the cofactor.
pub(crate) fn split_power(n: &BigInt, p: &BigUint) -> (u64, BigInt) {
    debug_assert!(!n.is_zero());
    let p = BigInt::from(p.clone());
    let mut n = n.clone();
    let mut v = 0;
    loop {
        let (q, r) = n.div_rem(&p);
        if !r.is_zero() {
            return (v, n);
        }
        n = q;
        v += 1;
    }
}

/// The `p`-adic valuation of a nonzero rational.
pub fn ord_p(q: &Rational, p: &BigUint) -> Result<i64> {
    if q.is_zero() {
        return Err(Error::UndefinedValuation);
    }
    check_prime(p)?;
    let (a, _) = split_power(q.numer(), p);
    let (b, _) = split_power(q.denom(), p);
    Ok(a as i64 - b as i64)
}

/// `q / p^ord_p(q)`.
pub fn unit_part(q: &Rational, p: &BigUint) -> Result<Rational> {
    if q.is_zero() {
        return Err(Error::UndefinedValuation);
    }
    check_prime(p)?;
    let (_, a) = split_power(q.numer(), p);
    let (_, b) = split_power(q.denom(), p);
    Rational::new(a, b)
}

/// Prime factorization of a nonzero rational with signed exponents.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RationalFactorization {
    pub negative: bool,
    /// Strictly increasing primes with nonzero exponents.
    pub factors: Vec<(BigUint, i64)>,
}

impl RationalFactorization {
    pub fn valuation(&self, p: &BigUint) -> i64 {
        self.factors
            .iter()
            .find(|(q, _)| q == p)
            .map_or(0, |(_, e)| *e)
    }
}

pub fn factorize_rational(q: &Rational) -> Result<RationalFactorization> {
    if q.is_zero() {
        return Err(Error::invalid("cannot factor zero"));
    }
    let num = factorize(q.numer())?;
    let den = factorize(q.denom())?;
    let mut factors: Vec<(BigUint, i64)> = num
        .factors
        .into_iter()
        .map(|(p, e)| (p, e as i64))
        .chain(den.factors.into_iter().map(|(p, e)| (p, -(e as i64))))
        .collect();
    factors.sort();
    Ok(RationalFactorization {
        negative: q.is_negative(),
        factors,
    })
}

/// The unique `n`-th-power-free integer in the class of `q` modulo `(Q^*)^n`.
///
/// For odd `n` the sign is absorbed by `(-1)^n` and the result is positive.
pub fn power_free_representative(q: &Rational, n: u32) -> Result<BigInt> {
    if !matches!(n, 2 | 3 | 4 | 6) {
        return Err(Error::invalid(format!("unsupported power {n}")));
    }
    if q.is_zero() {
        return Err(Error::invalid("zero has no power-free representative"));
    }
    // q * denom^n is an integer in the same class.
    let scaled = q.numer() * num_traits::Pow::pow(q.denom(), n - 1);
    let f = factorize(&scaled)?;
    let mag = f.factors.iter().fold(BigUint::one(), |acc, (p, e)| {
        let r = e % n;
        acc * p.pow(r)
    });
    let negative = f.negative && n % 2 == 0;
    let out = BigInt::from(mag);
    Ok(if negative { -out } else { out })
}

/// Reduces `q` (whose denominator is prime to `m`) to an element of `[0, m)`.
pub(crate) fn residue_mod(q: &Rational, m: u64) -> Option<u64> {
    let m_big = BigInt::from(m);
    let num = q.numer().mod_floor(&m_big);
    let den = q.denom().mod_floor(&m_big);
    let inv = mod_inverse(&den, &m_big)?;
    let r = (num * inv).mod_floor(&m_big);
    num_traits::ToPrimitive::to_u64(&r)
}

fn mod_inverse(a: &BigInt, m: &BigInt) -> Option<BigInt> {
    let e = a.extended_gcd(m);
    if e.gcd.abs().is_one() {
        Some((e.x * e.gcd.signum()).mod_floor(m))
    } else {
        None
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(n: i64, d: i64) -> Rational {
        Rational::new(n, d).unwrap()
    }

    fn p(n: u64) -> BigUint {
        BigUint::from(n)
    }

    #[test]
    fn valuation_examples() {
        assert_eq!(ord_p(&q(12, 1), &p(2)).unwrap(), 2);
        assert_eq!(ord_p(&q(4, 9), &p(3)).unwrap(), -2);
        assert_eq!(ord_p(&q(7, 1), &p(5)).unwrap(), 0);
        assert_eq!(ord_p(&q(0, 1), &p(5)), Err(Error::UndefinedValuation));
        assert!(matches!(ord_p(&q(4, 1), &p(4)), Err(Error::InvalidInput(_))));
    }

    #[test]
    fn unit_part_examples() {
        assert_eq!(unit_part(&q(12, 1), &p(2)).unwrap(), q(3, 1));
        assert_eq!(unit_part(&q(-50, 1), &p(5)).unwrap(), q(-2, 1));
        assert_eq!(unit_part(&q(1, 2), &p(2)).unwrap(), q(1, 1));
    }

    #[test]
    fn power_free_examples() {
        assert_eq!(power_free_representative(&q(1, 2), 4).unwrap(), BigInt::from(8));
        assert_eq!(power_free_representative(&q(48, 1), 4).unwrap(), BigInt::from(3));
        assert_eq!(power_free_representative(&q(-64, 1), 6).unwrap(), BigInt::from(-1));
        assert_eq!(power_free_representative(&q(-2, 1), 3).unwrap(), BigInt::from(2));
        assert_eq!(power_free_representative(&q(9, 4), 2).unwrap(), BigInt::from(1));
        assert!(power_free_representative(&q(0, 1), 4).is_err());
        assert!(power_free_representative(&q(5, 1), 5).is_err());
    }

    #[test]
    fn rational_factorization_signs() {
        let f = factorize_rational(&q(-9, 16)).unwrap();
        assert!(f.negative);
        assert_eq!(f.valuation(&p(2)), -4);
        assert_eq!(f.valuation(&p(3)), 2);
        assert_eq!(f.valuation(&p(5)), 0);
    }

    #[test]
    fn residues() {
        assert_eq!(residue_mod(&q(-1, 1), 16), Some(15));
        assert_eq!(residue_mod(&q(1, 3), 16), Some(11));
        assert_eq!(residue_mod(&q(1, 2), 16), None);
    }
}
