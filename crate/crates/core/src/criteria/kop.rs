//! Kinds of perception, channel ratings, and the typedness level.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::io::Read;
use std::str::FromStr;
use std::sync::OnceLock;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{ChannelKind, DataType, KopRatings, VisualChannel};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Kop {
    Associative,
    Selective,
    Ordered,
    Quantitative,
}

impl Kop {
    pub const ALL: [Kop; 4] = [
        Kop::Associative,
        Kop::Selective,
        Kop::Ordered,
        Kop::Quantitative,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            Kop::Associative => "associative",
            Kop::Selective => "selective",
            Kop::Ordered => "ordered",
            Kop::Quantitative => "quantitative",
        }
    }
}

impl fmt::Display for Kop {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum KopRating {
    Yes,
    Limited,
    /// Originally rated "no", but evidence suggests it can work.
    CanBe,
    /// Tentative rating with acknowledged uncertainty.
    Maybe,
    No,
}

impl KopRating {
    pub fn as_str(self) -> &'static str {
        match self {
            KopRating::Yes => "yes",
            KopRating::Limited => "limited",
            KopRating::CanBe => "can-be",
            KopRating::Maybe => "maybe",
            KopRating::No => "no",
        }
    }
}

impl FromStr for KopRating {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Ok(match s.trim() {
            "yes" => KopRating::Yes,
            "limited" => KopRating::Limited,
            "can-be" => KopRating::CanBe,
            "maybe" => KopRating::Maybe,
            "no" => KopRating::No,
            other => return Err(Error::KnowledgeBase(format!("unknown rating `{other}`"))),
        })
    }
}

/// Ordered: `Inappropriate < Usable < Appropriate`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Suitability {
    Inappropriate,
    Usable,
    Appropriate,
}

/// KOPs a variable of the given data type requires.
pub fn akops_for(data_type: DataType) -> Result<BTreeSet<Kop>> {
    use Kop::*;
    Ok(match data_type {
        DataType::Nominal => BTreeSet::from([Associative, Selective]),
        DataType::Ordinal => BTreeSet::from([Associative, Selective, Ordered]),
        DataType::Interval | DataType::Ratio => BTreeSet::from(Kop::ALL),
        DataType::Directional => return Err(Error::UndefinedAkops),
    })
}

/// `yes` is appropriate, `no` inappropriate; the hedged ratings depend on the
/// application and default to usable unless an override is given.
pub fn suitability(rating: KopRating, override_: Option<Suitability>) -> Suitability {
    match rating {
        KopRating::Yes => Suitability::Appropriate,
        KopRating::No => Suitability::Inappropriate,
        KopRating::Limited | KopRating::CanBe | KopRating::Maybe => {
            override_.unwrap_or(Suitability::Usable)
        }
    }
}

/// Typedness level of one variable from the suitability of each of its channels.
///
/// For each AKOP the best channel counts.
pub fn typedness_variable_score(
    per_channel: &[BTreeMap<Kop, Suitability>],
    akops: &BTreeSet<Kop>,
) -> Result<u8> {
    if per_channel.is_empty() {
        return Err(Error::input("typedness needs at least one channel"));
    }
    if akops.is_empty() {
        return Err(Error::input("typedness needs at least one AKOP"));
    }
    let mut best = Vec::with_capacity(akops.len());
    for kop in akops {
        let mut top = None;
        for (i, ch) in per_channel.iter().enumerate() {
            let s = ch
                .get(kop)
                .ok_or_else(|| Error::input(format!("channel #{} lacks a rating for {kop}", i + 1)))?;
            top = top.max(Some(*s));
        }
        best.extend(top);
    }
    let count = |s| best.iter().filter(|&&b| b == s).count();
    let n = best.len();
    let (app, usable, inapp) = (
        count(Suitability::Appropriate),
        count(Suitability::Usable),
        count(Suitability::Inappropriate),
    );
    Ok(if app == n {
        5
    } else if inapp == n {
        1
    } else if inapp > 0 {
        2
    } else if usable == n {
        3
    } else {
        4
    })
}

/// Channel-kind → KOP ratings table.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct KnowledgeBase {
    pub version: String,
    rows: BTreeMap<ChannelKind, KopRatings>,
}

const BUILTIN_TABLE: &str = include_str!("../../data/kop_ratings.csv");

impl KnowledgeBase {
    /// The shipped table.
    pub fn builtin() -> &'static KnowledgeBase {
        static KB: OnceLock<KnowledgeBase> = OnceLock::new();
        KB.get_or_init(|| {
            KnowledgeBase::from_reader(BUILTIN_TABLE.as_bytes()).expect("shipped KOP table parses")
        })
    }

    /// Reads a table file: `#` comments (one may be `# version: X`), a header
    /// `channel,associative,selective,ordered,quantitative`, then one row per channel kind.
    pub fn from_reader(reader: impl Read) -> Result<KnowledgeBase> {
        let mut text = String::new();
        let mut reader = reader;
        reader
            .read_to_string(&mut text)
            .map_err(|e| Error::KnowledgeBase(e.to_string()))?;
        let version = text
            .lines()
            .filter_map(|l| l.trim().strip_prefix('#'))
            .find_map(|l| l.trim().strip_prefix("version:"))
            .map(|v| v.trim().to_string())
            .unwrap_or_else(|| "unversioned".to_string());

        let mut rdr = csv::ReaderBuilder::new()
            .comment(Some(b'#'))
            .trim(csv::Trim::All)
            .from_reader(text.as_bytes());
        let headers = rdr
            .headers()
            .map_err(|e| Error::KnowledgeBase(e.to_string()))?
            .clone();
        let expected = ["channel", "associative", "selective", "ordered", "quantitative"];
        if headers.iter().ne(expected) {
            return Err(Error::KnowledgeBase(format!(
                "header must be `{}`",
                expected.join(",")
            )));
        }
        let mut rows = BTreeMap::new();
        for record in rdr.records() {
            let record = record.map_err(|e| Error::KnowledgeBase(e.to_string()))?;
            let kind: ChannelKind = record[0]
                .parse()
                .map_err(|_| Error::KnowledgeBase(format!("unknown channel kind `{}`", &record[0])))?;
            if kind == ChannelKind::Custom {
                return Err(Error::KnowledgeBase("`custom` cannot have a table row".into()));
            }
            let ratings = KopRatings {
                associative: record[1].parse()?,
                selective: record[2].parse()?,
                ordered: record[3].parse()?,
                quantitative: record[4].parse()?,
            };
            if rows.insert(kind, ratings).is_some() {
                return Err(Error::KnowledgeBase(format!("duplicate row `{kind}`")));
            }
        }
        Ok(KnowledgeBase { version, rows })
    }

    /// This table with rows replaced or added from `overrides`.
    pub fn with_overrides(&self, overrides: &KnowledgeBase) -> KnowledgeBase {
        let mut rows = self.rows.clone();
        rows.extend(overrides.rows.iter().map(|(k, v)| (*k, *v)));
        KnowledgeBase {
            version: format!("{}+{}", self.version, overrides.version),
            rows,
        }
    }

    pub fn ratings(&self, kind: ChannelKind) -> Result<KopRatings> {
        self.rows
            .get(&kind)
            .copied()
            .ok_or_else(|| Error::NoKnowledgeBaseEntry(kind.to_string()))
    }

    pub fn rating(&self, kind: ChannelKind, kop: Kop) -> Result<KopRating> {
        Ok(self.ratings(kind)?.get(kop))
    }

    /// Ratings for a design channel: its explicit ratings win over the table.
    pub fn channel_ratings(&self, channel: &VisualChannel) -> Result<KopRatings> {
        match channel.kop_ratings {
            Some(r) => Ok(r),
            None => self.ratings(channel.kind),
        }
    }

    pub fn rows(&self) -> impl Iterator<Item = (ChannelKind, KopRatings)> + '_ {
        self.rows.iter().map(|(k, v)| (*k, *v))
    }
}

/// Table cell from the shipped knowledge base.
pub fn kop_rating(kind: ChannelKind, kop: Kop) -> Result<KopRating> {
    KnowledgeBase::builtin().rating(kind, kop)
}
