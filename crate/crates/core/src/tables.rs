//! Local invariant tables and their line-oriented text format.
//!
//! One entry per line: `family place ord_residue unit_or_sign bit`, where
//! `place` is a prime or `inf`. At `inf` the residue field is `-` and the last
//! class field is `+` or `-`. Blank lines and `#` comments are ignored.
//! Quadratic fixtures additionally carry one `quadratic base - - <bit>` line
//! giving the parity of the untwisted curve.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::sync::OnceLock;

use crate::classes::{unit_representatives, Family, Place, PlaceClassKey, Sign};
use crate::error::{Error, Result};

/// Quartic `delta_2` rows by `ord_2 mod 4`, columns over units 1, 3, ..., 15 mod 16.
pub const QUARTIC_DELTA_2: [[u8; 8]; 4] = [
    [0, 1, 1, 0, 0, 0, 1, 1],
    [0, 0, 0, 0, 0, 0, 0, 0],
    [0, 0, 1, 1, 1, 0, 0, 1],
    [1, 1, 1, 1, 1, 1, 1, 1],
];

/// Quartic `delta_inf` for signs `+`, `-`.
pub const QUARTIC_DELTA_INF: [u8; 2] = [0, 1];

/// Sextic `epsilon_2` rows by `ord_2 mod 6`, columns over units 1, 3, 5, 7 mod 8.
pub const SEXTIC_EPSILON_2: [[u8; 4]; 6] = [
    [0, 1, 0, 1],
    [1, 1, 1, 1],
    [0, 1, 0, 1],
    [1, 1, 1, 1],
    [1, 1, 1, 1],
    [1, 1, 1, 1],
];

/// Sextic `epsilon_3` rows by `ord_3 mod 6`, columns over units 1, 2, 4, 5, 8, 16 mod 27.
pub const SEXTIC_EPSILON_3: [[u8; 6]; 6] = [
    [0, 0, 0, 1, 0, 1],
    [0, 1, 0, 1, 1, 0],
    [1, 0, 1, 0, 0, 1],
    [1, 0, 0, 1, 1, 1],
    [0, 1, 0, 1, 1, 0],
    [1, 0, 1, 0, 0, 1],
];

/// Sextic `epsilon_inf` for signs `+`, `-`.
pub const SEXTIC_EPSILON_INF: [u8; 2] = [0, 1];

/// A total map from class keys to local invariant bits for one family.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LocalInvariantTable {
    family: Family,
    entries: BTreeMap<PlaceClassKey, u8>,
    base: Option<u8>,
}

/// One disagreement between two tables.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TableDiff {
    pub family: Family,
    pub key: Option<PlaceClassKey>,
    pub expected: Option<u8>,
    pub found: Option<u8>,
}

impl fmt::Display for TableDiff {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let show = |b: Option<u8>| b.map_or_else(|| "absent".to_string(), |b| b.to_string());
        let key = match &self.key {
            Some(k) => format_key(self.family, k),
            None => format!("{} base - -", self.family),
        };
        write!(f, "{key}: expected {}, found {}", show(self.expected), show(self.found))
    }
}

pub(crate) fn format_key(family: Family, key: &PlaceClassKey) -> String {
    match key {
        PlaceClassKey::Finite {
            prime,
            ord_residue,
            unit,
        } => format!("{family} {prime} {ord_residue} {unit}"),
        PlaceClassKey::Real { sign } => format!("{family} inf - {}", sign.symbol()),
    }
}

/// Every key a complete table for `family` over `places` must contain.
pub fn expected_keys(family: Family, places: &[Place]) -> Result<Vec<PlaceClassKey>> {
    let mut keys = Vec::new();
    for &place in places {
        match place {
            Place::Real => {
                keys.push(PlaceClassKey::Real { sign: Sign::Positive });
                keys.push(PlaceClassKey::Real { sign: Sign::Negative });
            }
            Place::Finite(prime) => {
                let reps = unit_representatives(family, prime)?;
                for ord_residue in 0..family.degree() {
                    for &unit in &reps {
                        keys.push(PlaceClassKey::Finite {
                            prime,
                            ord_residue,
                            unit,
                        });
                    }
                }
            }
        }
    }
    Ok(keys)
}

impl LocalInvariantTable {
    pub fn family(&self) -> Family {
        self.family
    }

    pub fn get(&self, key: &PlaceClassKey) -> Option<u8> {
        self.entries.get(key).copied()
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn entries(&self) -> impl Iterator<Item = (&PlaceClassKey, u8)> {
        self.entries.iter().map(|(k, b)| (k, *b))
    }

    /// Parity of the untwisted curve; only quadratic fixtures carry a nonzero value.
    pub fn base_parity(&self) -> u8 {
        self.base.unwrap_or(0)
    }

    /// Places covered by the table, finite places first.
    pub fn places(&self) -> Vec<Place> {
        self.entries
            .keys()
            .map(PlaceClassKey::place)
            .collect::<BTreeSet<_>>()
            .into_iter()
            .collect()
    }

    /// Canonical text form; `load_table(&t.to_text())` reproduces `t`.
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        if let Some(base) = self.base {
            out.push_str(&format!("{} base - - {base}\n", self.family));
        }
        for (key, bit) in &self.entries {
            out.push_str(&format_key(self.family, key));
            out.push_str(&format!(" {bit}\n"));
        }
        out
    }

    /// Entries where `other` differs from `self`, in key order.
    pub fn diff(&self, other: &LocalInvariantTable) -> Vec<TableDiff> {
        let mut out = Vec::new();
        if self.family != other.family {
            out.push(TableDiff {
                family: other.family,
                key: None,
                expected: None,
                found: None,
            });
            return out;
        }
        if self.base != other.base {
            out.push(TableDiff {
                family: self.family,
                key: None,
                expected: self.base,
                found: other.base,
            });
        }
        let keys: BTreeSet<&PlaceClassKey> = self.entries.keys().chain(other.entries.keys()).collect();
        for key in keys {
            let (a, b) = (self.get(key), other.get(key));
            if a != b {
                out.push(TableDiff {
                    family: self.family,
                    key: Some(*key),
                    expected: a,
                    found: b,
                });
            }
        }
        out
    }

    fn from_rows(family: Family, rows: &[(Place, &[u64], Vec<&[u8]>)], sign_bits: [u8; 2]) -> Self {
        let mut entries = BTreeMap::new();
        for (place, reps, by_ord) in rows {
            let Place::Finite(prime) = *place else { unreachable!() };
            for (ord, row) in by_ord.iter().enumerate() {
                for (unit, bit) in reps.iter().zip(row.iter()) {
                    entries.insert(
                        PlaceClassKey::Finite {
                            prime,
                            ord_residue: ord as u32,
                            unit: *unit,
                        },
                        *bit,
                    );
                }
            }
        }
        entries.insert(PlaceClassKey::Real { sign: Sign::Positive }, sign_bits[0]);
        entries.insert(PlaceClassKey::Real { sign: Sign::Negative }, sign_bits[1]);
        LocalInvariantTable {
            family,
            entries,
            base: None,
        }
    }
}

fn check_builtin_structure() {
    assert!(QUARTIC_DELTA_2[1].iter().all(|&b| b == 0), "quartic ord 1 row must vanish");
    assert!(QUARTIC_DELTA_2[3].iter().all(|&b| b == 1), "quartic ord 3 row must be all ones");
    for ord in [1, 3, 4, 5] {
        assert!(
            SEXTIC_EPSILON_2[ord].iter().all(|&b| b == 1),
            "sextic epsilon_2 row {ord} must be all ones"
        );
    }
}

/// The embedded quartic table: 32 entries at 2 and 2 at the real place.
pub fn quartic_table() -> &'static LocalInvariantTable {
    static TABLE: OnceLock<LocalInvariantTable> = OnceLock::new();
    TABLE.get_or_init(|| {
        check_builtin_structure();
        LocalInvariantTable::from_rows(
            Family::Quartic,
            &[(
                Place::Finite(2),
                &crate::classes::QUARTIC_REPS_2,
                QUARTIC_DELTA_2.iter().map(|r| &r[..]).collect(),
            )],
            QUARTIC_DELTA_INF,
        )
    })
}

/// The embedded sextic table: 24 entries at 2, 36 at 3 and 2 at the real place.
pub fn sextic_table() -> &'static LocalInvariantTable {
    static TABLE: OnceLock<LocalInvariantTable> = OnceLock::new();
    TABLE.get_or_init(|| {
        check_builtin_structure();
        LocalInvariantTable::from_rows(
            Family::Sextic,
            &[
                (
                    Place::Finite(2),
                    &crate::classes::SEXTIC_REPS_2,
                    SEXTIC_EPSILON_2.iter().map(|r| &r[..]).collect(),
                ),
                (
                    Place::Finite(3),
                    &crate::classes::SEXTIC_REPS_3,
                    SEXTIC_EPSILON_3.iter().map(|r| &r[..]).collect(),
                ),
            ],
            SEXTIC_EPSILON_INF,
        )
    })
}

/// The embedded table for a built-in family.
pub fn builtin_table(family: Family) -> Result<&'static LocalInvariantTable> {
    match family {
        Family::Quartic => Ok(quartic_table()),
        Family::Sextic => Ok(sextic_table()),
        Family::Quadratic => Err(Error::invalid(
            "the quadratic family has no built-in table; supply a fixture",
        )),
    }
}

fn parse_err(line: usize, message: impl Into<String>) -> Error {
    Error::Parse {
        line,
        message: message.into(),
    }
}

fn parse_bit(s: &str, line: usize) -> Result<u8> {
    match s {
        "0" => Ok(0),
        "1" => Ok(1),
        _ => Err(parse_err(line, format!("bit must be 0 or 1, got {s:?}"))),
    }
}

fn parse_sign(s: &str, line: usize) -> Result<Sign> {
    match s {
        "+" => Ok(Sign::Positive),
        "-" | "\u{2212}" => Ok(Sign::Negative),
        _ => Err(parse_err(line, format!("sign must be + or -, got {s:?}"))),
    }
}

/// Parses and validates a table; the result covers every key of its places.
pub fn load_table(source: &str) -> Result<LocalInvariantTable> {
    let mut family: Option<Family> = None;
    let mut entries = BTreeMap::new();
    let mut base: Option<u8> = None;

    for (idx, raw) in source.lines().enumerate() {
        let line_no = idx + 1;
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let fields: Vec<&str> = line.split_whitespace().collect();
        if fields.len() != 5 {
            return Err(parse_err(line_no, format!("expected 5 fields, found {}", fields.len())));
        }
        let fam: Family = fields[0].parse().map_err(|e: Error| parse_err(line_no, e.to_string()))?;
        match family {
            None => family = Some(fam),
            Some(f) if f != fam => {
                return Err(parse_err(line_no, format!("mixed families {f} and {fam}")));
            }
            _ => {}
        }
        let bit = parse_bit(fields[4], line_no)?;

        if fields[1] == "base" {
            if fam != Family::Quadratic {
                return Err(parse_err(line_no, "only quadratic fixtures carry a base parity"));
            }
            if fields[2] != "-" || fields[3] != "-" {
                return Err(parse_err(line_no, "base line must read `quadratic base - - <bit>`"));
            }
            if base.replace(bit).is_some() {
                return Err(parse_err(line_no, "duplicate base parity"));
            }
            continue;
        }

        let place: Place = fields[1].parse().map_err(|e: Error| parse_err(line_no, e.to_string()))?;
        let key = match place {
            Place::Real => {
                if fields[2] != "-" {
                    return Err(parse_err(line_no, "ord residue at inf must be `-`"));
                }
                PlaceClassKey::Real {
                    sign: parse_sign(fields[3], line_no)?,
                }
            }
            Place::Finite(prime) => {
                let ord_residue: u32 = fields[2]
                    .parse()
                    .ok()
                    .filter(|&o| o < fam.degree())
                    .ok_or_else(|| {
                        parse_err(
                            line_no,
                            format!("ord residue must be in 0..{}, got {:?}", fam.degree(), fields[2]),
                        )
                    })?;
                let reps = unit_representatives(fam, prime).map_err(|e| parse_err(line_no, e.to_string()))?;
                let unit: u64 = fields[3]
                    .parse()
                    .ok()
                    .filter(|u| reps.contains(u))
                    .ok_or_else(|| {
                        parse_err(
                            line_no,
                            format!("unit class at {prime} must be one of {reps:?}, got {:?}", fields[3]),
                        )
                    })?;
                PlaceClassKey::Finite {
                    prime,
                    ord_residue,
                    unit,
                }
            }
        };
        if entries.insert(key, bit).is_some() {
            return Err(parse_err(line_no, format!("duplicate key `{}`", format_key(fam, &key))));
        }
    }

    let family = family.ok_or_else(|| Error::IncompleteFixture("table has no entries".into()))?;
    let places: Vec<Place> = match family {
        Family::Quadratic => {
            let mut places: BTreeSet<Place> = entries.keys().map(PlaceClassKey::place).collect();
            for p in family.bad_places() {
                places.insert(*p);
            }
            places.into_iter().collect()
        }
        f => f.bad_places().to_vec(),
    };
    let expected = expected_keys(family, &places)?;
    let missing: Vec<String> = expected
        .iter()
        .filter(|k| !entries.contains_key(k))
        .map(|k| format_key(family, k))
        .collect();
    if !missing.is_empty() {
        return Err(Error::IncompleteFixture(format!("missing keys: {}", missing.join(", "))));
    }
    let extra: Vec<String> = entries
        .keys()
        .filter(|k| !expected.contains(k))
        .map(|k| format_key(family, k))
        .collect();
    if !extra.is_empty() {
        return Err(Error::IncompleteFixture(format!(
            "keys outside the {family} bad places: {}",
            extra.join(", ")
        )));
    }
    if family == Family::Quadratic {
        if base.is_none() {
            return Err(Error::IncompleteFixture("quadratic fixture lacks a base parity line".into()));
        }
        for place in &places {
            if entries[&PlaceClassKey::trivial(*place)] != 0 {
                return Err(Error::IncompleteFixture(format!(
                    "trivial class at {place} must carry bit 0"
                )));
            }
        }
    }
    Ok(LocalInvariantTable {
        family,
        entries,
        base,
    })
}
