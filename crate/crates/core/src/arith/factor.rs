//! Integer factorization: trial division to 10^6, then Brent's variant of
//! Pollard rho with certified primality of every reported factor.

use std::sync::OnceLock;

use num_bigint::{BigInt, BigUint, Sign};
use num_integer::Integer;
use num_traits::{One, ToPrimitive, Zero};

use super::primality::{is_prime_u64, is_prime_with, mulmod, small_primes, TRIAL_BOUND};
use crate::error::{Error, Result};

/// Environment variable capping the number of rho iterations spent on one
/// factorization.
pub const EFFORT_ENV: &str = "TWISTPARITY_FACTOR_EFFORT";

/// Default rho iteration budget per factorization.
pub const DEFAULT_EFFORT: u64 = 20_000_000;

fn env_effort() -> u64 {
    static EFFORT: OnceLock<u64> = OnceLock::new();
    *EFFORT.get_or_init(|| {
        std::env::var(EFFORT_ENV)
            .ok()
            .and_then(|v| v.trim().parse().ok())
            .unwrap_or(DEFAULT_EFFORT)
    })
}

/// Remaining rho iterations.
#[derive(Debug, Clone)]
pub(crate) struct Budget {
    remaining: u64,
}

impl Budget {
    pub(crate) fn new(remaining: u64) -> Self {
        Budget { remaining }
    }

    pub(crate) fn from_env() -> Self {
        Budget::new(env_effort())
    }

    fn spend(&mut self, n: u64) -> bool {
        if self.remaining < n {
            self.remaining = 0;
            false
        } else {
            self.remaining -= n;
            true
        }
    }
}

/// A signed integer written as `sign * prod(p^e)` with strictly increasing primes.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Factorization {
    pub negative: bool,
    pub factors: Vec<(BigUint, u32)>,
}

impl Factorization {
    pub fn sign(&self) -> i8 {
        if self.negative {
            -1
        } else {
            1
        }
    }

    /// Multiplies the factorization back out.
    pub fn value(&self) -> BigInt {
        let mag = self
            .factors
            .iter()
            .fold(BigUint::one(), |acc, (p, e)| acc * p.pow(*e));
        BigInt::from_biguint(if self.negative { Sign::Minus } else { Sign::Plus }, mag)
    }

    pub fn exponent_of(&self, p: &BigUint) -> u32 {
        self.factors
            .iter()
            .find(|(q, _)| q == p)
            .map_or(0, |(_, e)| *e)
    }
}

/// Factors a nonzero integer completely.
pub fn factorize(n: &BigInt) -> Result<Factorization> {
    factorize_with_effort(n, env_effort())
}

/// Factors `n` spending at most `effort` rho iterations.
pub fn factorize_with_effort(n: &BigInt, effort: u64) -> Result<Factorization> {
    if n.is_zero() {
        return Err(Error::invalid("cannot factor zero"));
    }
    let factors = factor_biguint(n.magnitude().clone(), &mut Budget::new(effort))?;
    Ok(Factorization {
        negative: n.sign() == Sign::Minus,
        factors,
    })
}

/// Sorted prime factorization of a positive integer.
pub(crate) fn factor_biguint(n: BigUint, budget: &mut Budget) -> Result<Vec<(BigUint, u32)>> {
    debug_assert!(!n.is_zero());
    let mut out: Vec<(BigUint, u32)> = Vec::new();
    if let Some(small) = n.to_u64() {
        for (p, e) in factor_u64(small, budget)? {
            out.push((BigUint::from(p), e));
        }
        return Ok(out);
    }

    let mut rest = n;
    for &p in small_primes() {
        let pb = BigUint::from(p);
        if &pb * &pb > rest {
            break;
        }
        let mut e = 0;
        loop {
            let (q, r) = rest.div_rem(&pb);
            if !r.is_zero() {
                break;
            }
            rest = q;
            e += 1;
        }
        if e > 0 {
            out.push((pb, e));
            if let Some(small) = rest.to_u64() {
                for (p, e) in factor_u64(small, budget)? {
                    out.push((BigUint::from(p), e));
                }
                return Ok(merge(out));
            }
        }
    }
    if rest.is_one() {
        return Ok(out);
    }

    let mut pending = vec![rest];
    while let Some(m) = pending.pop() {
        if let Some(small) = m.to_u64() {
            for (p, e) in factor_u64(small, budget)? {
                out.push((BigUint::from(p), e));
            }
            continue;
        }
        if is_prime_with(&m, budget)? {
            out.push((m, 1));
            continue;
        }
        let d = rho_big(&m, budget).ok_or_else(|| Error::FactorizationFailed(m.to_string()))?;
        pending.push(&m / &d);
        pending.push(d);
    }
    Ok(merge(out))
}

fn merge(mut v: Vec<(BigUint, u32)>) -> Vec<(BigUint, u32)> {
    v.sort();
    let mut out: Vec<(BigUint, u32)> = Vec::with_capacity(v.len());
    for (p, e) in v {
        match out.last_mut() {
            Some((q, f)) if *q == p => *f += e,
            _ => out.push((p, e)),
        }
    }
    out
}

fn factor_u64(mut n: u64, budget: &mut Budget) -> Result<Vec<(u64, u32)>> {
    let mut out = Vec::new();
    for &p in small_primes() {
        let p = p as u64;
        if p * p > n {
            break;
        }
        if n % p == 0 {
            let mut e = 0;
            while n % p == 0 {
                n /= p;
                e += 1;
            }
            out.push((p, e));
        }
    }
    if n == 1 {
        return Ok(out);
    }
    // No factor below 10^6 remains, so anything below 10^12 is prime.
    if n < (TRIAL_BOUND as u64) * (TRIAL_BOUND as u64) {
        out.push((n, 1));
        return Ok(out);
    }
    let mut pending = vec![n];
    while let Some(m) = pending.pop() {
        if is_prime_u64(m) {
            out.push((m, 1));
            continue;
        }
        let d = rho_u64(m, budget).ok_or_else(|| Error::FactorizationFailed(m.to_string()))?;
        pending.push(m / d);
        pending.push(d);
    }
    out.sort_unstable();
    let mut merged: Vec<(u64, u32)> = Vec::with_capacity(out.len());
    for (p, e) in out {
        match merged.last_mut() {
            Some((q, f)) if *q == p => *f += e,
            _ => merged.push((p, e)),
        }
    }
    Ok(merged)
}

const RHO_BATCH: u64 = 128;

/// Brent's cycle-finding rho; returns a nontrivial divisor of composite `n`.
fn rho_u64(n: u64, budget: &mut Budget) -> Option<u64> {
    if n % 2 == 0 {
        return Some(2);
    }
    for c in 1..n {
        let f = |x: u64| (mulmod(x, x, n) + c) % n;
        let (mut y, mut r, mut q, mut g) = (2u64, 1u64, 1u64, 1u64);
        let (mut x, mut ys) = (0u64, 0u64);
        while g == 1 {
            x = y;
            for _ in 0..r {
                y = f(y);
            }
            let mut k = 0;
            while k < r && g == 1 {
                ys = y;
                let steps = RHO_BATCH.min(r - k);
                if !budget.spend(steps) {
                    return None;
                }
                for _ in 0..steps {
                    y = f(y);
                    q = mulmod(q, x.abs_diff(y), n);
                }
                g = q.gcd(&n);
                k += steps;
            }
            r *= 2;
        }
        if g == n {
            loop {
                ys = f(ys);
                g = x.abs_diff(ys).gcd(&n);
                if g > 1 {
                    break;
                }
            }
        }
        if g != n {
            return Some(g);
        }
    }
    None
}

fn rho_big(n: &BigUint, budget: &mut Budget) -> Option<BigUint> {
    if n.is_even() {
        return Some(BigUint::from(2u32));
    }
    let diff = |a: &BigUint, b: &BigUint| if a > b { a - b } else { b - a };
    for c in 1u32.. {
        let c = BigUint::from(c);
        let f = |x: &BigUint| (x * x + &c) % n;
        let mut y = BigUint::from(2u32);
        let mut r = 1u64;
        let mut q = BigUint::one();
        let mut g = BigUint::one();
        let mut x = BigUint::zero();
        let mut ys = BigUint::zero();
        while g.is_one() {
            x = y.clone();
            for _ in 0..r {
                y = f(&y);
            }
            let mut k = 0;
            while k < r && g.is_one() {
                ys = y.clone();
                let steps = RHO_BATCH.min(r - k);
                if !budget.spend(steps) {
                    return None;
                }
                for _ in 0..steps {
                    y = f(&y);
                    q = (q * diff(&x, &y)) % n;
                }
                g = q.gcd(n);
                k += steps;
            }
            r *= 2;
        }
        if &g == n {
            loop {
                ys = f(&ys);
                g = diff(&x, &ys).gcd(n);
                if !g.is_one() {
                    break;
                }
            }
        }
        if &g != n {
            return Some(g);
        }
    }
    None
}
