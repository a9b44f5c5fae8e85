use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::Error;

/// One of the eight RCC-8 base relations.
///
/// The discriminant order is the fixed tag order used everywhere results
/// must be deterministic: `dc < ec < po < eq < tpp < ntpp < tppi < ntppi`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
#[repr(u8)]
pub enum BaseRelation {
    Dc = 0,
    Ec = 1,
    Po = 2,
    Eq = 3,
    Tpp = 4,
    Ntpp = 5,
    Tppi = 6,
    Ntppi = 7,
}

impl BaseRelation {
    pub const ALL: [BaseRelation; 8] = [
        BaseRelation::Dc,
        BaseRelation::Ec,
        BaseRelation::Po,
        BaseRelation::Eq,
        BaseRelation::Tpp,
        BaseRelation::Ntpp,
        BaseRelation::Tppi,
        BaseRelation::Ntppi,
    ];

    pub fn index(self) -> usize {
        self as usize
    }

    pub fn from_index(i: usize) -> Option<BaseRelation> {
        Self::ALL.get(i).copied()
    }

    pub fn name(self) -> &'static str {
        match self {
            BaseRelation::Dc => "dc",
            BaseRelation::Ec => "ec",
            BaseRelation::Po => "po",
            BaseRelation::Eq => "eq",
            BaseRelation::Tpp => "tpp",
            BaseRelation::Ntpp => "ntpp",
            BaseRelation::Tppi => "tppi",
            BaseRelation::Ntppi => "ntppi",
        }
    }

    pub fn converse(self) -> BaseRelation {
        match self {
            BaseRelation::Tpp => BaseRelation::Tppi,
            BaseRelation::Tppi => BaseRelation::Tpp,
            BaseRelation::Ntpp => BaseRelation::Ntppi,
            BaseRelation::Ntppi => BaseRelation::Ntpp,
            r => r,
        }
    }

    pub fn bit(self) -> u8 {
        1 << (self as u8)
    }
}

impl fmt::Display for BaseRelation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for BaseRelation {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let lower = s.trim().to_ascii_lowercase();
        BaseRelation::ALL
            .iter()
            .copied()
            .find(|r| r.name() == lower)
            .ok_or_else(|| Error::Parse(format!("unknown RCC-8 relation `{}`", s.trim())))
    }
}

/// A disjunctive RCC-8 label: a subset of the eight base relations.
///
/// The empty set is unsatisfiable; the full set carries no information.
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct RelationSet(u8);

impl RelationSet {
    pub const EMPTY: RelationSet = RelationSet(0);
    pub const UNIVERSAL: RelationSet = RelationSet(0xff);

    pub const fn from_bits(bits: u8) -> RelationSet {
        RelationSet(bits)
    }

    pub fn bits(self) -> u8 {
        self.0
    }

    pub fn single(r: BaseRelation) -> RelationSet {
        RelationSet(r.bit())
    }

    pub fn of(rels: &[BaseRelation]) -> RelationSet {
        rels.iter().fold(RelationSet::EMPTY, |s, r| s.with(*r))
    }

    pub fn with(self, r: BaseRelation) -> RelationSet {
        RelationSet(self.0 | r.bit())
    }

    pub fn contains(self, r: BaseRelation) -> bool {
        self.0 & r.bit() != 0
    }

    pub fn is_empty(self) -> bool {
        self.0 == 0
    }

    pub fn is_universal(self) -> bool {
        self.0 == 0xff
    }

    pub fn len(self) -> usize {
        self.0.count_ones() as usize
    }

    /// The unique member, if this is a singleton.
    pub fn as_single(self) -> Option<BaseRelation> {
        if self.len() == 1 {
            BaseRelation::from_index(self.0.trailing_zeros() as usize)
        } else {
            None
        }
    }

    pub fn intersect(self, other: RelationSet) -> RelationSet {
        RelationSet(self.0 & other.0)
    }

    pub fn union(self, other: RelationSet) -> RelationSet {
        RelationSet(self.0 | other.0)
    }

    pub fn is_subset(self, other: RelationSet) -> bool {
        self.0 & !other.0 == 0
    }

    /// Members in tag order.
    pub fn iter(self) -> impl Iterator<Item = BaseRelation> {
        BaseRelation::ALL.into_iter().filter(move |r| self.contains(*r))
    }

    pub fn converse(self) -> RelationSet {
        super::converse(self)
    }
}

impl From<BaseRelation> for RelationSet {
    fn from(r: BaseRelation) -> Self {
        RelationSet::single(r)
    }
}

impl FromIterator<BaseRelation> for RelationSet {
    fn from_iter<T: IntoIterator<Item = BaseRelation>>(iter: T) -> Self {
        iter.into_iter().fold(RelationSet::EMPTY, |s, r| s.with(r))
    }
}

impl fmt::Display for RelationSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("{")?;
        for (i, r) in self.iter().enumerate() {
            if i > 0 {
                f.write_str(",")?;
            }
            f.write_str(r.name())?;
        }
        f.write_str("}")
    }
}

impl fmt::Debug for RelationSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

/// Parses `{dc,ec}`, `dc,ec`, `{}` or a bare `po`.
impl FromStr for RelationSet {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let inner = s.trim();
        let inner = inner
            .strip_prefix('{')
            .and_then(|t| t.strip_suffix('}'))
            .unwrap_or(inner);
        let mut set = RelationSet::EMPTY;
        for tok in inner.split([',', ' ']).filter(|t| !t.trim().is_empty()) {
            set = set.with(tok.parse()?);
        }
        Ok(set)
    }
}

impl Serialize for RelationSet {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.collect_seq(self.iter())
    }
}

impl<'de> Deserialize<'de> for RelationSet {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let rels = Vec::<BaseRelation>::deserialize(d)?;
        Ok(rels.into_iter().collect())
    }
}
