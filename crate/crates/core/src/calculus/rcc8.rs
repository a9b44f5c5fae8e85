use std::sync::LazyLock;

use super::relation::{BaseRelation, RelationSet};
use super::table::{Algebra, Calculus};

/// RCC-8 composition and neighbourhood tables. `a ; b ; S` reads: if
/// `x a y` and `y b z` then `x S z`.
///
/// The neighbourhood edges are the transitions a disk undergoes under
/// continuous translation and isotropic scaling. Both tables are checked
/// against brute-force disk configurations in the test suite.
pub const RCC8_TABLE: &str = "\
atoms dc ec po eq tpp ntpp tppi ntppi
dc ; dc ; {dc,ec,po,eq,tpp,ntpp,tppi,ntppi}
dc ; ec ; {dc,ec,po,tpp,ntpp}
dc ; po ; {dc,ec,po,tpp,ntpp}
dc ; eq ; {dc}
dc ; tpp ; {dc,ec,po,tpp,ntpp}
dc ; ntpp ; {dc,ec,po,tpp,ntpp}
dc ; tppi ; {dc}
dc ; ntppi ; {dc}
ec ; dc ; {dc,ec,po,tppi,ntppi}
ec ; ec ; {dc,ec,po,eq,tpp,tppi}
ec ; po ; {dc,ec,po,tpp,ntpp}
ec ; eq ; {ec}
ec ; tpp ; {ec,po,tpp,ntpp}
ec ; ntpp ; {po,tpp,ntpp}
ec ; tppi ; {dc,ec}
ec ; ntppi ; {dc}
po ; dc ; {dc,ec,po,tppi,ntppi}
po ; ec ; {dc,ec,po,tppi,ntppi}
po ; po ; {dc,ec,po,eq,tpp,ntpp,tppi,ntppi}
po ; eq ; {po}
po ; tpp ; {po,tpp,ntpp}
po ; ntpp ; {po,tpp,ntpp}
po ; tppi ; {dc,ec,po,tppi,ntppi}
po ; ntppi ; {dc,ec,po,tppi,ntppi}
eq ; dc ; {dc}
eq ; ec ; {ec}
eq ; po ; {po}
eq ; eq ; {eq}
eq ; tpp ; {tpp}
eq ; ntpp ; {ntpp}
eq ; tppi ; {tppi}
eq ; ntppi ; {ntppi}
tpp ; dc ; {dc}
tpp ; ec ; {dc,ec}
tpp ; po ; {dc,ec,po,tpp,ntpp}
tpp ; eq ; {tpp}
tpp ; tpp ; {tpp,ntpp}
tpp ; ntpp ; {ntpp}
tpp ; tppi ; {dc,ec,po,eq,tpp,tppi}
tpp ; ntppi ; {dc,ec,po,tppi,ntppi}
ntpp ; dc ; {dc}
ntpp ; ec ; {dc}
ntpp ; po ; {dc,ec,po,tpp,ntpp}
ntpp ; eq ; {ntpp}
ntpp ; tpp ; {ntpp}
ntpp ; ntpp ; {ntpp}
ntpp ; tppi ; {dc,ec,po,tpp,ntpp}
ntpp ; ntppi ; {dc,ec,po,eq,tpp,ntpp,tppi,ntppi}
tppi ; dc ; {dc,ec,po,tppi,ntppi}
tppi ; ec ; {ec,po,tppi,ntppi}
tppi ; po ; {po,tppi,ntppi}
tppi ; eq ; {tppi}
tppi ; tpp ; {po,eq,tpp,tppi}
tppi ; ntpp ; {po,tpp,ntpp}
tppi ; tppi ; {tppi,ntppi}
tppi ; ntppi ; {ntppi}
ntppi ; dc ; {dc,ec,po,tppi,ntppi}
ntppi ; ec ; {po,tppi,ntppi}
ntppi ; po ; {po,tppi,ntppi}
ntppi ; eq ; {ntppi}
ntppi ; tpp ; {po,tppi,ntppi}
ntppi ; ntpp ; {po,eq,tpp,ntpp,tppi,ntppi}
ntppi ; tppi ; {ntppi}
ntppi ; ntppi ; {ntppi}
cnd dc ; ec
cnd ec ; po
cnd po ; eq
cnd po ; tpp
cnd po ; tppi
cnd tpp ; ntpp
cnd tppi ; ntppi
cnd eq ; tpp
cnd eq ; tppi
cnd eq ; ntpp
cnd eq ; ntppi
";

static RCC8: LazyLock<Calculus> =
    LazyLock::new(|| Calculus::parse("rcc8", RCC8_TABLE).expect("embedded RCC-8 table is well formed"));

/// Full 256x256 set-composition table, indexed by `(a << 8) | b`.
static SET_COMPOSE: LazyLock<Vec<u8>> = LazyLock::new(|| {
    let calc = &*RCC8;
    let mut out = vec![0u8; 1 << 16];
    // each entry extends one with a bit fewer, so the table costs one union per cell
    for a in 1..256usize {
        let low = a & a.wrapping_neg();
        for b in 1..256usize {
            out[(a << 8) | b] = if a == low {
                let bl = b & b.wrapping_neg();
                let atom = calc.compose_masks(a as u16, bl as u16) as u8;
                if b == bl { atom } else { atom | out[(a << 8) | (b ^ bl)] }
            } else {
                out[(low << 8) | b] | out[((a ^ low) << 8) | b]
            };
        }
    }
    out
});

static SET_CONVERSE: LazyLock<[u8; 256]> = LazyLock::new(|| {
    let mut out = [0u8; 256];
    for (m, slot) in out.iter_mut().enumerate() {
        *slot = RCC8.converse_mask(m as u16) as u8;
    }
    out
});

/// The embedded RCC-8 calculus as a generic table.
pub fn rcc8() -> &'static Calculus {
    &RCC8
}

pub(crate) fn compose_sets(a: RelationSet, b: RelationSet) -> RelationSet {
    RelationSet::from_bits(SET_COMPOSE[((a.bits() as usize) << 8) | b.bits() as usize])
}

pub(crate) fn converse_set(a: RelationSet) -> RelationSet {
    RelationSet::from_bits(SET_CONVERSE[a.bits() as usize])
}

pub(crate) fn distance(a: BaseRelation, b: BaseRelation) -> u32 {
    RCC8.distance(a.index(), b.index())
        .expect("RCC-8 neighbourhood graph is connected")
}

/// RCC-8 with typed labels and precomputed set-level lookups.
#[derive(Debug, Clone, Copy, Default)]
pub struct Rcc8;

impl Algebra for Rcc8 {
    type Set = RelationSet;

    fn universal(&self) -> RelationSet {
        RelationSet::UNIVERSAL
    }

    fn identity(&self) -> RelationSet {
        RelationSet::single(BaseRelation::Eq)
    }

    fn empty(&self) -> RelationSet {
        RelationSet::EMPTY
    }

    fn compose(&self, a: RelationSet, b: RelationSet) -> RelationSet {
        compose_sets(a, b)
    }

    fn converse(&self, a: RelationSet) -> RelationSet {
        converse_set(a)
    }

    fn intersect(&self, a: RelationSet, b: RelationSet) -> RelationSet {
        a.intersect(b)
    }
}
