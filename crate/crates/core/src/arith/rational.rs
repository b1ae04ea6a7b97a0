use std::fmt;
use std::ops::Mul;
use std::str::FromStr;

use num_bigint::{BigInt, Sign};
use num_integer::Integer;
use num_traits::{One, Pow, Signed, Zero};

use crate::error::{Error, Result};

/// An exact rational number in lowest terms with a positive denominator.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Rational {
    numer: BigInt,
    denom: BigInt,
}

impl Rational {
    /// Builds the reduced fraction `numer / denom`.
    pub fn new(numer: impl Into<BigInt>, denom: impl Into<BigInt>) -> Result<Self> {
        let numer = numer.into();
        let denom = denom.into();
        if denom.is_zero() {
            return Err(Error::invalid("zero denominator"));
        }
        let g = numer.gcd(&denom);
        let (mut numer, mut denom) = if g.is_zero() {
            (numer, denom)
        } else {
            (numer / &g, denom / &g)
        };
        if denom.is_negative() {
            numer = -numer;
            denom = -denom;
        }
        if numer.is_zero() {
            denom = BigInt::one();
        }
        Ok(Rational { numer, denom })
    }

    pub fn from_integer(n: impl Into<BigInt>) -> Self {
        Rational {
            numer: n.into(),
            denom: BigInt::one(),
        }
    }

    pub fn numer(&self) -> &BigInt {
        &self.numer
    }

    pub fn denom(&self) -> &BigInt {
        &self.denom
    }

    pub fn is_zero(&self) -> bool {
        self.numer.is_zero()
    }

    pub fn is_integer(&self) -> bool {
        self.denom.is_one()
    }

    pub fn is_negative(&self) -> bool {
        self.numer.is_negative()
    }

    pub fn sign(&self) -> Sign {
        self.numer.sign()
    }

    pub fn pow(&self, exp: u32) -> Self {
        Rational {
            numer: Pow::pow(&self.numer, exp),
            denom: Pow::pow(&self.denom, exp),
        }
    }

    pub(crate) fn require_nonzero(&self) -> Result<()> {
        if self.is_zero() {
            Err(Error::invalid("twist parameter must be nonzero"))
        } else {
            Ok(())
        }
    }
}

impl From<i64> for Rational {
    fn from(n: i64) -> Self {
        Rational::from_integer(n)
    }
}

impl From<BigInt> for Rational {
    fn from(n: BigInt) -> Self {
        Rational::from_integer(n)
    }
}

impl Mul for &Rational {
    type Output = Rational;

    fn mul(self, rhs: &Rational) -> Rational {
        Rational::new(&self.numer * &rhs.numer, &self.denom * &rhs.denom)
            .expect("product of nonzero denominators")
    }
}

impl Mul for Rational {
    type Output = Rational;

    fn mul(self, rhs: Rational) -> Rational {
        &self * &rhs
    }
}

impl fmt::Display for Rational {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.denom.is_one() {
            write!(f, "{}", self.numer)
        } else {
            write!(f, "{}/{}", self.numer, self.denom)
        }
    }
}

/// Parses `a` or `a/b` with an optional leading `-` or `+` on either part.
impl FromStr for Rational {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        let parse = |t: &str| {
            let t = t.trim();
            if t.is_empty() || !t.trim_start_matches(['-', '+']).bytes().all(|b| b.is_ascii_digit()) {
                return Err(Error::invalid(format!("not a rational number: {s:?}")));
            }
            BigInt::from_str(t).map_err(|_| Error::invalid(format!("not a rational number: {s:?}")))
        };
        match s.split_once('/') {
            Some((n, d)) => Rational::new(parse(n)?, parse(d)?),
            None => Ok(Rational::from_integer(parse(s)?)),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(n: i64, d: i64) -> Rational {
        Rational::new(n, d).unwrap()
    }

    #[test]
    fn reduce_examples() {
        assert_eq!(q(6, -4), Rational::new(-3, 2).unwrap());
        assert_eq!(q(6, -4).to_string(), "-3/2");
        assert_eq!(q(0, 7).denom(), &BigInt::one());
        assert_eq!(q(0, 7).to_string(), "0");
        assert_eq!(q(-5, -5).to_string(), "1");
    }

    #[test]
    fn zero_denominator_rejected() {
        assert!(matches!(Rational::new(1, 0), Err(Error::InvalidInput(_))));
    }

    #[test]
    fn parse_forms() {
        assert_eq!("9".parse::<Rational>().unwrap(), q(9, 1));
        assert_eq!("-1".parse::<Rational>().unwrap(), q(-1, 1));
        assert_eq!("4/-6".parse::<Rational>().unwrap(), q(-2, 3));
        assert_eq!(" 12/8 ".parse::<Rational>().unwrap(), q(3, 2));
        assert!("1/0".parse::<Rational>().is_err());
        assert!("abc".parse::<Rational>().is_err());
        assert!("1.5".parse::<Rational>().is_err());
        assert!("".parse::<Rational>().is_err());
    }
}
