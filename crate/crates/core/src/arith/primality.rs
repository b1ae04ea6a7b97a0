//! Deterministic primality testing.
//!
//! Integers below 3.3e24 are decided by Miller-Rabin with the first thirteen
//! prime bases, which is known to be exact in that range. Larger integers that
//! pass Miller-Rabin are certified with a Pocklington-Lehmer certificate built
//! from a full factorization of `n - 1`; if that factorization exceeds the
//! effort budget the test reports failure instead of guessing.

use std::sync::OnceLock;

use num_bigint::BigUint;
use num_integer::Integer;
use num_traits::{One, ToPrimitive, Zero};

use super::factor::{factor_biguint, Budget};
use crate::error::{Error, Result};

/// Bound up to which trial division is used.
pub(crate) const TRIAL_BOUND: u32 = 1_000_000;

const MR_BASES: [u64; 13] = [2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41];

/// 3317044064679887385961981: first strong pseudoprime to all of `MR_BASES`.
const MR_EXACT_LIMIT: u128 = 3_317_044_064_679_887_385_961_981;

/// Primes below [`TRIAL_BOUND`], computed once.
pub(crate) fn small_primes() -> &'static [u32] {
    static PRIMES: OnceLock<Vec<u32>> = OnceLock::new();
    PRIMES.get_or_init(|| {
        let n = TRIAL_BOUND as usize;
        let mut composite = vec![false; n + 1];
        let mut primes = Vec::with_capacity(80_000);
        for i in 2..=n {
            if !composite[i] {
                primes.push(i as u32);
                let mut j = i * i;
                while j <= n {
                    composite[j] = true;
                    j += i;
                }
            }
        }
        primes
    })
}

#[inline]
pub(crate) fn mulmod(a: u64, b: u64, m: u64) -> u64 {
    ((a as u128 * b as u128) % m as u128) as u64
}

pub(crate) fn powmod(mut base: u64, mut exp: u64, m: u64) -> u64 {
    let mut acc = 1 % m;
    base %= m;
    while exp > 0 {
        if exp & 1 == 1 {
            acc = mulmod(acc, base, m);
        }
        base = mulmod(base, base, m);
        exp >>= 1;
    }
    acc
}

fn strong_probable_prime_u64(n: u64, a: u64) -> bool {
    let a = a % n;
    if a == 0 {
        return true;
    }
    let s = (n - 1).trailing_zeros();
    let d = (n - 1) >> s;
    let mut x = powmod(a, d, n);
    if x == 1 || x == n - 1 {
        return true;
    }
    for _ in 1..s {
        x = mulmod(x, x, n);
        if x == n - 1 {
            return true;
        }
    }
    false
}

/// Exact primality test for 64-bit integers.
pub fn is_prime_u64(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    for &p in &MR_BASES {
        if n == p {
            return true;
        }
        if n % p == 0 {
            return false;
        }
    }
    MR_BASES.iter().all(|&a| strong_probable_prime_u64(n, a))
}

fn strong_probable_prime_big(n: &BigUint, a: u64) -> bool {
    let one = BigUint::one();
    let n_minus_1 = n - &one;
    let s = n_minus_1.trailing_zeros().unwrap_or(0);
    let d = &n_minus_1 >> s;
    let mut x = BigUint::from(a).modpow(&d, n);
    if x == one || x == n_minus_1 {
        return true;
    }
    for _ in 1..s {
        x = (&x * &x) % n;
        if x == n_minus_1 {
            return true;
        }
    }
    false
}

/// Exact primality test for arbitrary-precision integers.
///
/// Returns [`Error::FactorizationFailed`] when a large probable prime cannot be
/// certified within the effort budget.
pub fn is_prime(n: &BigUint) -> Result<bool> {
    is_prime_with(n, &mut Budget::from_env())
}

pub(crate) fn is_prime_with(n: &BigUint, budget: &mut Budget) -> Result<bool> {
    if let Some(small) = n.to_u64() {
        return Ok(is_prime_u64(small));
    }
    for &p in &MR_BASES {
        if (n % p).is_zero() {
            return Ok(false);
        }
    }
    if !MR_BASES.iter().all(|&a| strong_probable_prime_big(n, a)) {
        return Ok(false);
    }
    if n.to_u128().is_some_and(|v| v < MR_EXACT_LIMIT) {
        return Ok(true);
    }
    pocklington(n, budget)
}

/// Certifies a probable prime `n` from the complete factorization of `n - 1`.
fn pocklington(n: &BigUint, budget: &mut Budget) -> Result<bool> {
    let one = BigUint::one();
    let n_minus_1 = n - &one;
    let factors = factor_biguint(n_minus_1.clone(), budget)?;
    'outer: for (q, _) in &factors {
        let exp = &n_minus_1 / q;
        for &a in small_primes().iter().take(64) {
            let a = BigUint::from(a);
            if a.modpow(&n_minus_1, n) != one {
                return Ok(false);
            }
            let t = a.modpow(&exp, n);
            if t.is_zero() {
                return Ok(false);
            }
            if (t + n - &one).mod_floor(n).gcd(n).is_one() {
                continue 'outer;
            }
        }
        return Err(Error::FactorizationFailed(format!(
            "{n} (no Pocklington witness for factor {q} of n-1)"
        )));
    }
    Ok(true)
}
