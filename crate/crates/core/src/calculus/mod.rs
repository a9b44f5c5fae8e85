//! Qualitative relation algebras.
//!
//! RCC-8 is the primary calculus. Its tables (and those of any other binary
//! calculus) are plain text loaded through [`Calculus::parse`]; the typed
//! [`RelationSet`] operations below sit on top of precomputed lookups.

mod rcc8;
mod relation;
mod size;
mod table;

pub use rcc8::{rcc8, Rcc8, RCC8_TABLE};
pub use relation::{BaseRelation, RelationSet};
pub use size::{
    interaction, size_calculus, size_entailed, topology_compatible, SizeAlgebra, SizeRelation, SizeSet,
    SIZE_TABLE,
};
pub use table::{bits, Algebra, Calculus, Mask, MAX_ATOMS};

/// Elementwise converse.
pub fn converse(rs: RelationSet) -> RelationSet {
    rcc8::converse_set(rs)
}

/// Weak composition: union of table entries over all member pairs.
pub fn compose(rs1: RelationSet, rs2: RelationSet) -> RelationSet {
    rcc8::compose_sets(rs1, rs2)
}

/// Shortest-path length between two relations in the conceptual
/// neighbourhood graph.
pub fn cnd_distance(a: BaseRelation, b: BaseRelation) -> u32 {
    rcc8::distance(a, b)
}

/// Minimum neighbourhood distance from `a` to any member of `set`.
/// `None` for an empty set.
pub fn cnd_distance_to_set(a: BaseRelation, set: RelationSet) -> Option<u32> {
    set.iter().map(|b| cnd_distance(a, b)).min()
}

/// Relations one neighbourhood step away from `a`.
pub fn neighbors(a: BaseRelation) -> RelationSet {
    RelationSet::from_bits(rcc8().neighbors(a.index()) as u8)
}

/// Union of [`neighbors`] over the members of `set`.
pub fn neighbors_of_set(set: RelationSet) -> RelationSet {
    set.iter().fold(RelationSet::EMPTY, |acc, r| acc.union(neighbors(r)))
}

/// Diameter of the RCC-8 neighbourhood graph.
pub fn cnd_diameter() -> u32 {
    rcc8().diameter()
}
