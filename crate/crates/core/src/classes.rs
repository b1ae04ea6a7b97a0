//! Residue-class keys of twist parameters at the bad places of each family.
//!
//! Two parameters with the same key at a place are congruent modulo `n`-th
//! powers in the completion there, where `n` is the twist degree. At a finite
//! place the key is `(ord_p mod n, unit class)`, the unit class being read off
//! in `(Z/p^m)^* / ((Z/p^m)^*)^n` for the class modulus `m`.

use std::fmt;
use std::str::FromStr;
use std::sync::OnceLock;

use num_bigint::{BigInt, BigUint};
use serde::{Deserialize, Serialize};

use crate::arith::{ord_p, residue_mod, unit_part, Rational};
use crate::characters::kronecker_i64;
use crate::error::{Error, Result};

/// A family of twists of a base curve, indexed by its twist degree.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Family {
    Quadratic,
    Quartic,
    Sextic,
}

impl Family {
    pub const ALL: [Family; 3] = [Family::Quadratic, Family::Quartic, Family::Sextic];

    pub fn degree(self) -> u32 {
        match self {
            Family::Quadratic => 2,
            Family::Quartic => 4,
            Family::Sextic => 6,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Family::Quadratic => "quadratic",
            Family::Quartic => "quartic",
            Family::Sextic => "sextic",
        }
    }

    /// Places at which the built-in classification needs a class key.
    pub fn bad_places(self) -> &'static [Place] {
        match self {
            Family::Quadratic | Family::Quartic => &[Place::Finite(2), Place::Real],
            Family::Sextic => &[Place::Finite(2), Place::Finite(3), Place::Real],
        }
    }
}

impl fmt::Display for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Family {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "quadratic" => Ok(Family::Quadratic),
            "quartic" => Ok(Family::Quartic),
            "sextic" => Ok(Family::Sextic),
            _ => Err(Error::invalid(format!("unknown family {s:?}"))),
        }
    }
}

/// A place of the rationals.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Place {
    Finite(u64),
    Real,
}

impl fmt::Display for Place {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Place::Finite(p) => write!(f, "{p}"),
            Place::Real => f.write_str("inf"),
        }
    }
}

impl FromStr for Place {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        if s == "inf" {
            return Ok(Place::Real);
        }
        match s.parse::<u64>() {
            Ok(p) if crate::arith::is_prime_u64(p) => Ok(Place::Finite(p)),
            _ => Err(Error::invalid(format!("not a place: {s:?}"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Sign {
    Positive,
    Negative,
}

impl Sign {
    pub fn of(q: &Rational) -> Sign {
        if q.is_negative() {
            Sign::Negative
        } else {
            Sign::Positive
        }
    }

    pub fn symbol(self) -> char {
        match self {
            Sign::Positive => '+',
            Sign::Negative => '-',
        }
    }
}

/// The class of a twist parameter at one place.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum PlaceClassKey {
    Finite {
        prime: u64,
        ord_residue: u32,
        unit: u64,
    },
    Real {
        sign: Sign,
    },
}

impl PlaceClassKey {
    pub fn place(&self) -> Place {
        match self {
            PlaceClassKey::Finite { prime, .. } => Place::Finite(*prime),
            PlaceClassKey::Real { .. } => Place::Real,
        }
    }

    /// The key of the parameter `1`.
    pub fn trivial(place: Place) -> Self {
        match place {
            Place::Finite(prime) => PlaceClassKey::Finite {
                prime,
                ord_residue: 0,
                unit: 1,
            },
            Place::Real => PlaceClassKey::Real {
                sign: Sign::Positive,
            },
        }
    }
}

/// Exponent `m` such that unit classes are read in `(Z_p / p^m)^*`.
///
/// `e` is the ramification index of the place over `p`.
pub fn class_modulus(p: u64, family: Family, e: u32) -> Result<u32> {
    if e == 0 {
        return Err(Error::invalid("ramification index must be positive"));
    }
    match (family, p) {
        (Family::Quadratic, 2) => Ok(2 * e + 1),
        (Family::Quadratic, p) if p % 2 == 1 && crate::arith::is_prime_u64(p) => Ok(1),
        (Family::Quartic, 2) => Ok(3 * e + 1),
        (Family::Sextic, 2) => Ok(2 * e + 1),
        (Family::Sextic, 3) => Ok((3 * e).div_ceil(2) + 1),
        _ => Err(Error::invalid(format!(
            "no class modulus for the {family} family at p = {p}"
        ))),
    }
}

/// Coset decomposition of `(Z/p^m)^*` modulo `n`-th powers with fixed representatives.
#[derive(Debug, Clone)]
pub struct UnitClassTable {
    pub family: Family,
    pub prime: u64,
    pub modulus: u64,
    pub representatives: Vec<u64>,
    lookup: Vec<Option<u8>>,
}

impl UnitClassTable {
    fn build(family: Family, prime: u64, representatives: &[u64]) -> Result<Self> {
        let m = class_modulus(prime, family, 1)?;
        let modulus = prime.pow(m);
        let n = family.degree();
        let mut powers: Vec<u64> = (1..modulus)
            .filter(|w| w % prime != 0)
            .map(|w| crate::arith::powmod(w, n as u64, modulus))
            .collect();
        powers.sort_unstable();
        powers.dedup();
        let mut lookup = vec![None; modulus as usize];
        for (idx, &r) in representatives.iter().enumerate() {
            for &h in &powers {
                let slot = &mut lookup[((r * h) % modulus) as usize];
                if slot.is_some() {
                    return Err(Error::invalid(format!(
                        "representatives for {family} at {prime} are not pairwise inequivalent"
                    )));
                }
                *slot = Some(idx as u8);
            }
        }
        let covered = lookup.iter().filter(|s| s.is_some()).count() as u64;
        let units = (1..modulus).filter(|u| u % prime != 0).count() as u64;
        if covered != units {
            return Err(Error::invalid(format!(
                "representatives for {family} at {prime} do not exhaust the units"
            )));
        }
        Ok(UnitClassTable {
            family,
            prime,
            modulus,
            representatives: representatives.to_vec(),
            lookup,
        })
    }

    /// Representative of the class of `residue mod modulus`, or `None` for non-units.
    pub fn representative(&self, residue: u64) -> Option<u64> {
        self.lookup[(residue % self.modulus) as usize].map(|i| self.representatives[i as usize])
    }
}

/// Representative lists at the built-in bad places.
pub const QUADRATIC_REPS_2: [u64; 4] = [1, 3, 5, 7];
pub const QUARTIC_REPS_2: [u64; 8] = [1, 3, 5, 7, 9, 11, 13, 15];
pub const SEXTIC_REPS_2: [u64; 4] = [1, 3, 5, 7];
pub const SEXTIC_REPS_3: [u64; 6] = [1, 2, 4, 5, 8, 16];

/// The coset table at one of the built-in (family, prime) pairs.
pub fn unit_class_table(family: Family, p: u64) -> Result<&'static UnitClassTable> {
    static QUAD2: OnceLock<UnitClassTable> = OnceLock::new();
    static QUART2: OnceLock<UnitClassTable> = OnceLock::new();
    static SEXT2: OnceLock<UnitClassTable> = OnceLock::new();
    static SEXT3: OnceLock<UnitClassTable> = OnceLock::new();
    let (cell, reps): (&OnceLock<UnitClassTable>, &[u64]) = match (family, p) {
        (Family::Quadratic, 2) => (&QUAD2, &QUADRATIC_REPS_2),
        (Family::Quartic, 2) => (&QUART2, &QUARTIC_REPS_2),
        (Family::Sextic, 2) => (&SEXT2, &SEXTIC_REPS_2),
        (Family::Sextic, 3) => (&SEXT3, &SEXTIC_REPS_3),
        _ => {
            return Err(Error::invalid(format!(
                "no unit class table for the {family} family at p = {p}"
            )))
        }
    };
    Ok(cell.get_or_init(|| {
        UnitClassTable::build(family, p, reps).expect("built-in representatives partition the units")
    }))
}

fn least_nonresidue(p: u64) -> u64 {
    (2..p)
        .find(|&a| kronecker_i64(a as i64, p).ok() == Some(-1))
        .expect("odd primes have a quadratic nonresidue")
}

/// Class representatives for a family at a prime, in table order.
pub fn unit_representatives(family: Family, p: u64) -> Result<Vec<u64>> {
    if family == Family::Quadratic && p != 2 {
        class_modulus(p, family, 1)?;
        return Ok(vec![1, least_nonresidue(p)]);
    }
    Ok(unit_class_table(family, p)?.representatives.clone())
}

fn unit_class_of_residue(residue: u64, p: u64, family: Family) -> Result<u64> {
    if family == Family::Quadratic && p != 2 {
        class_modulus(p, family, 1)?;
        return match kronecker_i64(residue as i64, p)? {
            1 => Ok(1),
            -1 => Ok(least_nonresidue(p)),
            _ => Err(Error::invalid(format!("{residue} is not a unit at {p}"))),
        };
    }
    let table = unit_class_table(family, p)?;
    table
        .representative(residue)
        .ok_or_else(|| Error::invalid(format!("{residue} is not a unit at {p}")))
}

fn class_modulus_value(p: u64, family: Family) -> Result<u64> {
    Ok(p.pow(class_modulus(p, family, 1)?))
}

/// The listed representative `r` with `u = r * w^n (mod p^m)` for some unit `w`.
pub fn unit_class_representative(u: &BigInt, p: u64, family: Family) -> Result<u64> {
    let modulus = class_modulus_value(p, family)?;
    let residue = residue_mod(&Rational::from_integer(u.clone()), modulus)
        .ok_or_else(|| Error::invalid("modulus is nonzero"))?;
    if residue % p == 0 {
        return Err(Error::invalid(format!("{u} is not a unit at {p}")));
    }
    unit_class_of_residue(residue, p, family)
}

/// The class key of `d` at `place`.
pub fn place_class_key(d: &Rational, place: Place, family: Family) -> Result<PlaceClassKey> {
    d.require_nonzero()?;
    match place {
        Place::Real => Ok(PlaceClassKey::Real { sign: Sign::of(d) }),
        Place::Finite(p) => {
            let modulus = class_modulus_value(p, family)?;
            let pb = BigUint::from(p);
            let ord = ord_p(d, &pb)?;
            let unit = unit_part(d, &pb)?;
            let residue = residue_mod(&unit, modulus).expect("unit part is prime to p");
            Ok(PlaceClassKey::Finite {
                prime: p,
                ord_residue: ord.rem_euclid(family.degree() as i64) as u32,
                unit: unit_class_of_residue(residue, p, family)?,
            })
        }
    }
}

/// Key equality at every bad place of the family.
pub fn equivalent(c: &Rational, d: &Rational, family: Family) -> Result<bool> {
    equivalent_at(c, d, family, family.bad_places())
}

/// Key equality at each of the given places.
pub fn equivalent_at(c: &Rational, d: &Rational, family: Family, places: &[Place]) -> Result<bool> {
    for &place in places {
        if place_class_key(c, place, family)? != place_class_key(d, place, family)? {
            return Ok(false);
        }
    }
    Ok(true)
}
