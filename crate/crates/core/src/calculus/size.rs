use std::fmt;
use std::sync::LazyLock;

use serde::{Deserialize, Serialize};

use super::relation::{BaseRelation, RelationSet};
use super::table::{Algebra, Calculus, Mask};

/// Qualitative size: a total-order point algebra over region areas.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SizeRelation {
    Smaller = 0,
    Equal = 1,
    Larger = 2,
}

impl SizeRelation {
    pub const ALL: [SizeRelation; 3] = [SizeRelation::Smaller, SizeRelation::Equal, SizeRelation::Larger];

    pub fn name(self) -> &'static str {
        match self {
            SizeRelation::Smaller => "smaller",
            SizeRelation::Equal => "equal",
            SizeRelation::Larger => "larger",
        }
    }

    pub fn bit(self) -> u8 {
        1 << self as u8
    }

    pub fn converse(self) -> SizeRelation {
        match self {
            SizeRelation::Smaller => SizeRelation::Larger,
            SizeRelation::Equal => SizeRelation::Equal,
            SizeRelation::Larger => SizeRelation::Smaller,
        }
    }
}

impl fmt::Display for SizeRelation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// Disjunctive size label.
#[derive(Clone, Copy, PartialEq, Eq, Hash, Default)]
pub struct SizeSet(u8);

impl SizeSet {
    pub const EMPTY: SizeSet = SizeSet(0);
    pub const UNIVERSAL: SizeSet = SizeSet(0b111);

    pub fn single(r: SizeRelation) -> SizeSet {
        SizeSet(r.bit())
    }

    pub fn of(rels: &[SizeRelation]) -> SizeSet {
        SizeSet(rels.iter().fold(0, |m, r| m | r.bit()))
    }

    pub fn bits(self) -> u8 {
        self.0
    }

    pub fn contains(self, r: SizeRelation) -> bool {
        self.0 & r.bit() != 0
    }

    pub fn is_empty(self) -> bool {
        self.0 == 0
    }

    pub fn intersect(self, o: SizeSet) -> SizeSet {
        SizeSet(self.0 & o.0)
    }

    pub fn union(self, o: SizeSet) -> SizeSet {
        SizeSet(self.0 | o.0)
    }

    pub fn iter(self) -> impl Iterator<Item = SizeRelation> {
        SizeRelation::ALL.into_iter().filter(move |r| self.contains(*r))
    }

    fn mask(self) -> Mask {
        self.0 as Mask
    }

    fn from_mask(m: Mask) -> SizeSet {
        SizeSet(m as u8)
    }
}

impl fmt::Display for SizeSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let names: Vec<&str> = self.iter().map(SizeRelation::name).collect();
        write!(f, "{{{}}}", names.join(","))
    }
}

impl fmt::Debug for SizeSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

pub const SIZE_TABLE: &str = "\
atoms smaller equal larger
smaller ; smaller ; {smaller}
smaller ; equal ; {smaller}
smaller ; larger ; {smaller,equal,larger}
equal ; smaller ; {smaller}
equal ; equal ; {equal}
equal ; larger ; {larger}
larger ; smaller ; {smaller,equal,larger}
larger ; equal ; {larger}
larger ; larger ; {larger}
cnd smaller ; equal
cnd equal ; larger
";

static SIZE: LazyLock<Calculus> =
    LazyLock::new(|| Calculus::parse("size", SIZE_TABLE).expect("embedded size table is well formed"));

pub fn size_calculus() -> &'static Calculus {
    &SIZE
}

/// Typed view of the size calculus for the closure machinery.
#[derive(Debug, Clone, Copy, Default)]
pub struct SizeAlgebra;

impl Algebra for SizeAlgebra {
    type Set = SizeSet;

    fn universal(&self) -> SizeSet {
        SizeSet::UNIVERSAL
    }

    fn identity(&self) -> SizeSet {
        SizeSet::single(SizeRelation::Equal)
    }

    fn empty(&self) -> SizeSet {
        SizeSet::EMPTY
    }

    fn compose(&self, a: SizeSet, b: SizeSet) -> SizeSet {
        SizeSet::from_mask(SIZE.compose_masks(a.mask(), b.mask()))
    }

    fn converse(&self, a: SizeSet) -> SizeSet {
        SizeSet::from_mask(SIZE.converse_mask(a.mask()))
    }

    fn intersect(&self, a: SizeSet, b: SizeSet) -> SizeSet {
        a.intersect(b)
    }
}

/// Size atoms compatible with a single topological relation: a proper part
/// has strictly smaller area, equal regions have equal area, and
/// non-containing relations say nothing.
pub fn interaction(r: BaseRelation) -> SizeSet {
    match r {
        BaseRelation::Tpp | BaseRelation::Ntpp => SizeSet::single(SizeRelation::Smaller),
        BaseRelation::Tppi | BaseRelation::Ntppi => SizeSet::single(SizeRelation::Larger),
        BaseRelation::Eq => SizeSet::single(SizeRelation::Equal),
        BaseRelation::Dc | BaseRelation::Ec | BaseRelation::Po => SizeSet::UNIVERSAL,
    }
}

/// Union of [`interaction`] over the members of `topo`.
pub fn size_entailed(topo: RelationSet) -> SizeSet {
    topo.iter().fold(SizeSet::EMPTY, |acc, r| acc.union(interaction(r)))
}

/// Topological relations whose size entailment meets `size`.
pub fn topology_compatible(size: SizeSet) -> RelationSet {
    BaseRelation::ALL
        .into_iter()
        .filter(|r| !interaction(*r).intersect(size).is_empty())
        .collect()
}
