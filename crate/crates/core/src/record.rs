//! Machine-readable records and rank fixtures.
//!
//! Classification records are single-line JSON objects. Integers are carried
//! as decimal strings so that arbitrarily large parameters survive a round trip.

use std::collections::HashSet;
use std::fmt;

use num_bigint::{BigInt, BigUint};
use serde::{Deserialize, Serialize};

use crate::arith::{power_free_representative, Rational};
use crate::classes::{Family, PlaceClassKey};
use crate::engine::{classify, ParityBreakdown};
use crate::error::{Error, Result};

pub(crate) mod bigint_string {
    use num_bigint::BigInt;
    use serde::{de::Error, Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(v: &BigInt, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&v.to_string())
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<BigInt, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(D::Error::custom)
    }
}

pub(crate) mod bigint_vec {
    use num_bigint::BigInt;
    use serde::{de::Error, Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(v: &[BigInt], s: S) -> Result<S::Ok, S::Error> {
        s.collect_seq(v.iter().map(|x| x.to_string()))
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Vec<BigInt>, D::Error> {
        Vec::<String>::deserialize(d)?
            .iter()
            .map(|s| s.parse().map_err(D::Error::custom))
            .collect()
    }
}

pub(crate) mod biguint_vec {
    use num_bigint::BigUint;
    use serde::{de::Error, Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(v: &[BigUint], s: S) -> Result<S::Ok, S::Error> {
        s.collect_seq(v.iter().map(|x| x.to_string()))
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Vec<BigUint>, D::Error> {
        Vec::<String>::deserialize(d)?
            .iter()
            .map(|s| s.parse().map_err(D::Error::custom))
            .collect()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Parity {
    Even,
    Odd,
}

impl Parity {
    pub fn from_bit(bit: u8) -> Self {
        if bit % 2 == 0 {
            Parity::Even
        } else {
            Parity::Odd
        }
    }

    pub fn bit(self) -> u8 {
        match self {
            Parity::Even => 0,
            Parity::Odd => 1,
        }
    }
}

impl fmt::Display for Parity {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Parity::Even => "even",
            Parity::Odd => "odd",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TermRecord {
    pub place: String,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub ord_residue: Option<u32>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub unit: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub sign: Option<String>,
    pub bit: u8,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CharacterRecord {
    pub character: i64,
    #[serde(with = "biguint_vec")]
    pub support: Vec<BigUint>,
    pub bit: u8,
}

/// One classification, as emitted by the CLI.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ClassificationRecord {
    pub family: Family,
    #[serde(with = "bigint_string")]
    pub d_numerator: BigInt,
    #[serde(with = "bigint_string")]
    pub d_denominator: BigInt,
    #[serde(with = "bigint_string")]
    pub canonical: BigInt,
    pub terms: Vec<TermRecord>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub character: Option<CharacterRecord>,
    pub base_parity: u8,
    pub total: u8,
    pub parity: Parity,
    /// Set when the parity relies on finiteness of Sha.
    pub conjectural: bool,
}

impl From<&ParityBreakdown> for ClassificationRecord {
    fn from(b: &ParityBreakdown) -> Self {
        let terms = b
            .local
            .iter()
            .map(|t| match t.key {
                PlaceClassKey::Finite {
                    prime,
                    ord_residue,
                    unit,
                } => TermRecord {
                    place: prime.to_string(),
                    ord_residue: Some(ord_residue),
                    unit: Some(unit),
                    sign: None,
                    bit: t.bit,
                },
                PlaceClassKey::Real { sign } => TermRecord {
                    place: "inf".into(),
                    ord_residue: None,
                    unit: None,
                    sign: Some(sign.symbol().to_string()),
                    bit: t.bit,
                },
            })
            .collect();
        ClassificationRecord {
            family: b.family,
            d_numerator: b.input.numer().clone(),
            d_denominator: b.input.denom().clone(),
            canonical: b.canonical.clone(),
            terms,
            character: b.character.as_ref().map(|c| CharacterRecord {
                character: c.character,
                support: c.support.primes.clone(),
                bit: c.bit,
            }),
            base_parity: b.base_parity,
            total: b.total,
            parity: Parity::from_bit(b.total),
            // Quadratic fixtures record 2-Selmer parities, which need no hypothesis.
            conjectural: b.family != Family::Quadratic,
        }
    }
}

impl ClassificationRecord {
    pub fn to_json_line(&self) -> String {
        serde_json::to_string(self).expect("records serialize")
    }
}

/// A failed item in a batch stream.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ErrorRecord {
    pub family: Family,
    pub input: String,
    pub error: String,
}

/// One line of batch output.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum BatchItem {
    Ok(ClassificationRecord),
    Err(ErrorRecord),
}

impl BatchItem {
    pub fn to_json_line(&self) -> String {
        serde_json::to_string(self).expect("records serialize")
    }
}

/// Known ranks of twists, one `d rank` pair per line.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RankFixture {
    pub family: Family,
    /// Comment lines, without the leading `#`.
    pub provenance: Vec<String>,
    pub entries: Vec<(BigInt, u32)>,
}

impl RankFixture {
    pub fn parse(text: &str, family: Family) -> Result<Self> {
        let mut provenance = Vec::new();
        let mut entries = Vec::new();
        let mut seen = HashSet::new();
        for (idx, raw) in text.lines().enumerate() {
            let line_no = idx + 1;
            let line = raw.trim();
            if let Some(comment) = line.strip_prefix('#') {
                provenance.push(comment.trim().to_string());
                continue;
            }
            if line.is_empty() {
                continue;
            }
            let err = |m: String| Error::Parse {
                line: line_no,
                message: m,
            };
            let fields: Vec<&str> = line.split_whitespace().collect();
            let [d, rank] = fields[..] else {
                return Err(err(format!("expected `d rank`, found {} fields", fields.len())));
            };
            let d: BigInt = d.parse().map_err(|_| err(format!("bad integer {d:?}")))?;
            let rank: u32 = rank.parse().map_err(|_| err(format!("bad rank {rank:?}")))?;
            if d == BigInt::from(0) {
                return Err(err("d must be nonzero".into()));
            }
            let canonical = power_free_representative(&Rational::from_integer(d.clone()), family.degree())
                .map_err(|e| err(e.to_string()))?;
            if canonical != d {
                return Err(err(format!("{d} is not {}-th-power-free", family.degree())));
            }
            if !seen.insert(d.clone()) {
                return Err(err(format!("duplicate entry for {d}")));
            }
            entries.push((d, rank));
        }
        Ok(RankFixture {
            family,
            provenance,
            entries,
        })
    }

    pub fn to_text(&self) -> String {
        let mut out = String::new();
        for line in &self.provenance {
            out.push_str(&format!("# {line}\n"));
        }
        for (d, r) in &self.entries {
            out.push_str(&format!("{d} {r}\n"));
        }
        out
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FixtureCheckEntry {
    #[serde(with = "bigint_string")]
    pub d: BigInt,
    pub rank: u32,
    pub formula: Parity,
    pub agree: bool,
}

/// Compares the built-in classification against each fixture rank mod 2.
pub fn fixture_check(fixture: &RankFixture) -> Result<Vec<FixtureCheckEntry>> {
    fixture
        .entries
        .iter()
        .map(|(d, rank)| {
            let total = classify(fixture.family, &Rational::from_integer(d.clone()))?.total;
            Ok(FixtureCheckEntry {
                d: d.clone(),
                rank: *rank,
                formula: Parity::from_bit(total),
                agree: u32::from(total) == rank % 2,
            })
        })
        .collect()
}
