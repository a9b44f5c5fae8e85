//! Integrity constraints and distance-based conflict resolution.

mod constraints;
mod merge;

pub use constraints::{allowed_network, apply_constraints, co_referent, parse_constraints, IntegrityConstraint};
pub use merge::{relax, resolve, scenario_distance, MergeOptions, MergeResult, Repair};

use crate::calculus::{BaseRelation, RelationSet};
use crate::error::Result;
use crate::qcn::{self, ConstraintNetwork};
use crate::qualify::{qualify_snapshot, QualifyOptions, Snapshot};

/// Result of qualifying and, if needed, repairing one snapshot.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MergeOutcome {
    /// Straight from the qualifier.
    pub qualified: ConstraintNetwork,
    /// Consistent and compliant, co-referent duplicates collapsed.
    pub network: ConstraintNetwork,
    /// Present only when the qualified network had to be repaired.
    pub merge: Option<MergeResult>,
}

/// Drops each co-referent duplicate once it is `eq` to its original.
pub fn collapse_coreferents(net: &ConstraintNetwork) -> ConstraintNetwork {
    let eq = RelationSet::single(BaseRelation::Eq);
    let keep: Vec<usize> = (0..net.len())
        .filter(|&i| {
            let v = net.variable(i);
            match v.coref.as_deref().and_then(|root| net.index_of(root)) {
                Some(r) => net.label(i, r) != eq,
                None => true,
            }
        })
        .collect();
    net.restrict(&keep)
}

/// Checks `q` against the constraints and repairs it only if the check
/// fails, then collapses co-referents.
pub fn check_and_merge(
    q: &ConstraintNetwork,
    ics: &[IntegrityConstraint],
    opts: &MergeOptions,
) -> Result<(ConstraintNetwork, Option<MergeResult>)> {
    let constrained = apply_constraints(q, ics);
    if qcn::is_consistent(&constrained) {
        let closed = qcn::algebraic_closure(&constrained).expect("consistent network closes");
        return Ok((collapse_coreferents(&closed), None));
    }
    let result = resolve(q, ics, opts)?;
    Ok((collapse_coreferents(&result.resolved), Some(result)))
}

/// Qualify, check, and repair one snapshot.
pub fn qualify_and_merge(
    snapshot: &Snapshot,
    ics: &[IntegrityConstraint],
    qualify: &QualifyOptions,
    merge: &MergeOptions,
) -> Result<MergeOutcome> {
    let qualified = qualify_snapshot(snapshot, qualify)?;
    let (network, merge) = check_and_merge(&qualified, ics, merge)?;
    Ok(MergeOutcome { qualified, network, merge })
}
