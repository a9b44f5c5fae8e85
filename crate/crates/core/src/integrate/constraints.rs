use serde::{Deserialize, Serialize};

use crate::calculus::{BaseRelation, RelationSet};
use crate::error::{Error, Result};
use crate::qcn::ConstraintNetwork;

/// Relations permitted between objects of two types. A type pattern is an
/// exact type name or `*`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct IntegrityConstraint {
    pub name: String,
    pub left_type: String,
    pub right_type: String,
    pub allowed: RelationSet,
}

fn matches(pattern: &str, ty: &str) -> bool {
    pattern == "*" || pattern == ty
}

impl IntegrityConstraint {
    pub fn new(name: &str, left: &str, right: &str, allowed: &[BaseRelation]) -> Self {
        IntegrityConstraint {
            name: name.into(),
            left_type: left.into(),
            right_type: right.into(),
            allowed: RelationSet::of(allowed),
        }
    }

    /// What this constraint permits for an ordered pair of types, or `None`
    /// if it does not apply. A match with the types swapped contributes the
    /// converse.
    pub fn allowed_for(&self, a: &str, b: &str) -> Option<RelationSet> {
        let forward = matches(&self.left_type, a) && matches(&self.right_type, b);
        let backward = matches(&self.left_type, b) && matches(&self.right_type, a);
        match (forward, backward) {
            (false, false) => None,
            (true, false) => Some(self.allowed),
            (false, true) => Some(self.allowed.converse()),
            (true, true) => Some(self.allowed.intersect(self.allowed.converse())),
        }
    }
}

#[derive(Deserialize)]
struct ConstraintFile {
    #[serde(alias = "constraint")]
    constraints: Vec<IntegrityConstraint>,
}

/// Reads a JSON list (or `{"constraints": [...]}`) or a TOML file with
/// `[[constraints]]` tables.
pub fn parse_constraints(text: &str) -> Result<Vec<IntegrityConstraint>> {
    let trimmed = text.trim_start();
    let ics: Vec<IntegrityConstraint> = if trimmed.starts_with('[') && !trimmed.starts_with("[[") {
        serde_json::from_str(text)?
    } else if trimmed.starts_with('{') {
        serde_json::from_str::<ConstraintFile>(text)?.constraints
    } else {
        toml::from_str::<ConstraintFile>(text).map_err(|e| Error::Config(e.to_string()))?.constraints
    };
    for ic in &ics {
        if ic.allowed.is_empty() {
            return Err(Error::Config(format!("constraint `{}` allows nothing", ic.name)));
        }
    }
    Ok(ics)
}

/// Per-pair permitted relations: the intersection of every applicable
/// constraint, further cut to `{eq}` for co-referent pairs. Returned as a
/// network over the same variables.
pub fn allowed_network(net: &ConstraintNetwork, ics: &[IntegrityConstraint]) -> ConstraintNetwork {
    let mut out = ConstraintNetwork::with_variables(net.variables().iter().cloned()).expect("ids already unique");
    for (i, j) in net.pairs() {
        let (a, b) = (net.variable(i), net.variable(j));
        let mut allowed = RelationSet::UNIVERSAL;
        for ic in ics {
            if let Some(s) = ic.allowed_for(&a.object_type, &b.object_type) {
                allowed = allowed.intersect(s);
            }
        }
        if co_referent(net, i, j) {
            allowed = allowed.intersect(RelationSet::single(BaseRelation::Eq));
        }
        out.set_label(i, j, allowed);
    }
    out
}

/// Whether `i` and `j` name the same real-world object.
pub fn co_referent(net: &ConstraintNetwork, i: usize, j: usize) -> bool {
    let root = |k: usize| net.variable(k).coref.clone().unwrap_or_else(|| net.variable(k).id.clone());
    root(i) == root(j)
}

/// Intersects each pair's label with what the constraints allow.
pub fn apply_constraints(net: &ConstraintNetwork, ics: &[IntegrityConstraint]) -> ConstraintNetwork {
    let allowed = allowed_network(net, ics);
    let mut out = net.clone();
    for (i, j) in net.pairs() {
        out.constrain(i, j, allowed.label(i, j));
    }
    out
}
