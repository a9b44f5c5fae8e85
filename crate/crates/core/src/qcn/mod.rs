//! Qualitative constraint networks: closure, scenario search, and the
//! canonical text form.

mod closure;
mod network;
mod text;

use std::fmt;

pub use closure::{close, Triangle};
pub use network::{ConstraintNetwork, Variable, DEFAULT_TYPE};
pub use text::{parse_blocks, parse_network, write_blocks, TimedNetwork};

use crate::calculus::{RelationSet, Rcc8};

/// Witness for an inconsistency found by closure, in terms of ids.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Conflict {
    pub pair: (String, String),
    pub via: String,
}

impl fmt::Display for Conflict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} ; {} emptied via {}", self.pair.0, self.pair.1, self.via)
    }
}

/// Either the refined network or the triangle that emptied a label.
pub type Closure = std::result::Result<ConstraintNetwork, Conflict>;

/// Path-consistency fixpoint. Variables with `exists = false` are left out.
pub fn algebraic_closure(net: &ConstraintNetwork) -> Closure {
    let mut out = net.clone();
    close_in_place(&mut out)?;
    Ok(out)
}

pub(crate) fn close_in_place(net: &mut ConstraintNetwork) -> Result<(), Conflict> {
    let active = net.active_mask();
    let n = net.len();
    close(&Rcc8, n, net.labels_mut(), &active).map_err(|t| Conflict {
        pair: (net.variable(t.pair.0).id.clone(), net.variable(t.pair.1).id.clone()),
        via: net.variable(t.via).id.clone(),
    })
}

pub fn is_scenario(net: &ConstraintNetwork) -> bool {
    net.is_scenario()
}

/// Closed consistent scenarios refining `net`, in variable-pair order with
/// relations tried in tag order. An empty result means inconsistent.
pub fn enumerate_scenarios(net: &ConstraintNetwork, limit: Option<usize>) -> Vec<ConstraintNetwork> {
    let mut out = Vec::new();
    if limit == Some(0) {
        return out;
    }
    let Ok(closed) = algebraic_closure(net) else {
        return out;
    };
    let pairs: Vec<_> = net.active_pairs().collect();
    branch(closed, &pairs, 0, limit, &mut out);
    out
}

fn branch(
    net: ConstraintNetwork,
    pairs: &[(usize, usize)],
    from: usize,
    limit: Option<usize>,
    out: &mut Vec<ConstraintNetwork>,
) -> bool {
    let Some(k) = (from..pairs.len()).find(|&k| net.label(pairs[k].0, pairs[k].1).len() > 1) else {
        out.push(net);
        return limit.is_some_and(|l| out.len() >= l);
    };
    let (i, j) = pairs[k];
    for r in net.label(i, j).iter() {
        let mut next = net.clone();
        next.set_label(i, j, RelationSet::single(r));
        if close_in_place(&mut next).is_ok() && branch(next, pairs, k + 1, limit, out) {
            return true;
        }
    }
    false
}

pub fn is_consistent(net: &ConstraintNetwork) -> bool {
    match algebraic_closure(net) {
        Err(_) => false,
        Ok(closed) if closed.is_scenario() => true,
        Ok(_) => !enumerate_scenarios(net, Some(1)).is_empty(),
    }
}

/// A non-universal constraint `a ; b ; label`, oriented as declared.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Constraint {
    pub a: String,
    pub b: String,
    pub label: RelationSet,
}

impl fmt::Display for Constraint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} ; {} ; {}", self.a, self.b, self.label)
    }
}

/// Diagnosis of an inconsistent network.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Inconsistency {
    /// First triangle closure emptied, if closure alone detects it.
    pub conflict: Option<Conflict>,
    /// A subset-minimal set of input constraints that is already inconsistent.
    pub core: Vec<Constraint>,
}

/// `None` if consistent; otherwise a closure witness and a minimal core
/// found by deletion (each constraint is relaxed in turn and dropped if
/// the rest stays inconsistent).
pub fn diagnose(net: &ConstraintNetwork) -> Option<Inconsistency> {
    if is_consistent(net) {
        return None;
    }
    let conflict = algebraic_closure(net).err();
    let given: Vec<(usize, usize)> = net.active_pairs().filter(|&(i, j)| !net.label(i, j).is_universal()).collect();
    let mut work = net.clone();
    let mut kept = Vec::new();
    for &(i, j) in &given {
        let label = work.label(i, j);
        work.set_label(i, j, RelationSet::UNIVERSAL);
        if is_consistent(&work) {
            work.set_label(i, j, label);
            kept.push((i, j));
        }
    }
    let core = kept
        .into_iter()
        .map(|(i, j)| Constraint {
            a: net.variable(i).id.clone(),
            b: net.variable(j).id.clone(),
            label: net.label(i, j),
        })
        .collect();
    Some(Inconsistency { conflict, core })
}
