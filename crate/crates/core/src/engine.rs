//! Parity classification of twists from local invariants and ramified characters.
//!
//! For a family of degree `n` the conjectural rank parity of the twist by `d`
//! is
//!
//! ```text
//! base + sum over bad places v of table[key_v(d)] + character term
//! ```
//!
//! where the character term is `(1 - (-1 / S(d))) / 2` for quartic twists of
//! `y^2 = x^3 + x` and `(1 - (-3 / U(d))) / 2` for sextic twists of
//! `y^2 = x^3 + 1`. Both base curves have rank 0, so `base = 0` and the total is
//! the parity of the twist itself. Quadratic twists carry no character term;
//! their table and base parity come from a user fixture.

use num_bigint::BigInt;

use crate::arith::{power_free_representative, Rational};
use crate::characters::{character_term, support_s, support_u, RamifiedSupport};
use crate::classes::{place_class_key, Family, Place, PlaceClassKey};
use crate::error::{Error, Result};
use crate::tables::{format_key, quartic_table, sextic_table, LocalInvariantTable};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LocalTerm {
    pub key: PlaceClassKey,
    pub bit: u8,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CharacterTerm {
    /// `-1` or `-3`.
    pub character: i64,
    pub support: RamifiedSupport,
    pub bit: u8,
}

/// Every term of one classification.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ParityBreakdown {
    pub family: Family,
    pub input: Rational,
    /// The `n`-th-power-free integer in the class of `input`.
    pub canonical: BigInt,
    pub base_parity: u8,
    pub local: Vec<LocalTerm>,
    pub character: Option<CharacterTerm>,
    /// 0 for even conjectural rank parity, 1 for odd.
    pub total: u8,
}

impl ParityBreakdown {
    pub fn is_odd(&self) -> bool {
        self.total == 1
    }

    /// Mod-2 sum of the listed terms; always equals `total`.
    pub fn sum_of_terms(&self) -> u8 {
        let local: u8 = self.local.iter().map(|t| t.bit).sum();
        let character = self.character.as_ref().map_or(0, |c| c.bit);
        (self.base_parity + local + character) % 2
    }
}

type SupportFn = fn(&Rational) -> Result<RamifiedSupport>;

fn classify_with(
    family: Family,
    d: &Rational,
    table: &LocalInvariantTable,
    places: &[Place],
    character: Option<(i64, SupportFn)>,
) -> Result<ParityBreakdown> {
    d.require_nonzero()?;
    if table.family() != family {
        return Err(Error::invalid(format!(
            "table is for the {} family, not {family}",
            table.family()
        )));
    }
    let canonical = power_free_representative(d, family.degree())?;
    let c = Rational::from_integer(canonical.clone());

    let mut local = Vec::with_capacity(places.len());
    for &place in places {
        let key = place_class_key(&c, place, family)?;
        let bit = table.get(&key).ok_or_else(|| {
            Error::IncompleteFixture(format!("no entry for `{}`", format_key(family, &key)))
        })?;
        local.push(LocalTerm { key, bit });
    }

    let character = match character {
        Some((a, support_of)) => {
            let support = support_of(&c)?;
            let bit = character_term(a, &support)?;
            Some(CharacterTerm {
                character: a,
                support,
                bit,
            })
        }
        None => None,
    };

    let mut out = ParityBreakdown {
        family,
        input: d.clone(),
        canonical,
        base_parity: table.base_parity(),
        local,
        character,
        total: 0,
    };
    out.total = out.sum_of_terms();
    Ok(out)
}

/// Conjectural rank parity of `y^2 = x^3 + d x`.
pub fn classify_quartic(d: &Rational) -> Result<ParityBreakdown> {
    classify_with(
        Family::Quartic,
        d,
        quartic_table(),
        Family::Quartic.bad_places(),
        Some((-1, support_s)),
    )
}

/// Conjectural rank parity of `y^2 = x^3 + d`.
pub fn classify_sextic(d: &Rational) -> Result<ParityBreakdown> {
    classify_with(
        Family::Sextic,
        d,
        sextic_table(),
        Family::Sextic.bad_places(),
        Some((-3, support_u)),
    )
}

/// Cubic twist `y^2 = x^3 + d^2` of `y^2 = x^3 + 1`, classified as the sextic twist by `d^2`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CubicBreakdown {
    pub input: Rational,
    pub sextic: ParityBreakdown,
}

impl CubicBreakdown {
    pub fn total(&self) -> u8 {
        self.sextic.total
    }
}

pub fn classify_cubic(d: &Rational) -> Result<CubicBreakdown> {
    d.require_nonzero()?;
    Ok(CubicBreakdown {
        input: d.clone(),
        sextic: classify_sextic(&d.pow(2))?,
    })
}

/// Parity of the quadratic twist by `d` from a fixture of local bits.
///
/// The fixture's places (always including 2 and the real place) are the keyed
/// places; the total is the fixture's base parity plus the bits of `d`'s keys.
pub fn classify_quadratic(d: &Rational, fixture: &LocalInvariantTable) -> Result<ParityBreakdown> {
    let places = fixture.places();
    classify_with(Family::Quadratic, d, fixture, &places, None)
}

/// Dispatch for the two built-in families.
pub fn classify(family: Family, d: &Rational) -> Result<ParityBreakdown> {
    match family {
        Family::Quartic => classify_quartic(d),
        Family::Sextic => classify_sextic(d),
        Family::Quadratic => Err(Error::invalid(
            "quadratic classification needs a fixture table",
        )),
    }
}
