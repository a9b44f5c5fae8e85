use serde::{Deserialize, Serialize};

use crate::calculus::{BaseRelation, RelationSet};
use crate::error::{Error, Result};

/// Per-variable annotations.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Variable {
    pub id: String,
    pub object_type: String,
    pub exists: bool,
    /// Id of the variable this one is a co-referent duplicate of.
    pub coref: Option<String>,
}

impl Variable {
    pub fn new(id: impl Into<String>, object_type: impl Into<String>) -> Self {
        Variable { id: id.into(), object_type: object_type.into(), exists: true, coref: None }
    }
}

/// Object type given to variables that appear without a declaration.
pub const DEFAULT_TYPE: &str = "Region";

/// A qualitative constraint network over RCC-8.
///
/// Labels are stored as a full matrix kept converse-coherent by every
/// mutator; the diagonal holds `{eq}`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Default)]
pub struct ConstraintNetwork {
    vars: Vec<Variable>,
    labels: Vec<RelationSet>,
}

impl ConstraintNetwork {
    pub fn new() -> Self {
        Self::default()
    }

    /// Network over the given variables with every pair universal.
    pub fn with_variables(vars: impl IntoIterator<Item = Variable>) -> Result<Self> {
        let mut net = Self::new();
        for v in vars {
            net.add_variable(v)?;
        }
        Ok(net)
    }

    pub fn len(&self) -> usize {
        self.vars.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vars.is_empty()
    }

    pub fn variables(&self) -> &[Variable] {
        &self.vars
    }

    pub fn variable(&self, i: usize) -> &Variable {
        &self.vars[i]
    }

    pub fn variable_mut(&mut self, i: usize) -> &mut Variable {
        &mut self.vars[i]
    }

    pub fn index_of(&self, id: &str) -> Option<usize> {
        self.vars.iter().position(|v| v.id == id)
    }

    fn require(&self, id: &str) -> Result<usize> {
        self.index_of(id).ok_or_else(|| Error::Parse(format!("unknown object `{id}`")))
    }

    /// Appends a variable related universally to every existing one.
    pub fn add_variable(&mut self, var: Variable) -> Result<usize> {
        if self.index_of(&var.id).is_some() {
            return Err(Error::Parse(format!("duplicate object `{}`", var.id)));
        }
        let n = self.vars.len();
        let m = n + 1;
        let mut labels = vec![RelationSet::UNIVERSAL; m * m];
        for i in 0..n {
            for j in 0..n {
                labels[i * m + j] = self.labels[i * n + j];
            }
        }
        labels[n * m + n] = RelationSet::single(BaseRelation::Eq);
        self.labels = labels;
        self.vars.push(var);
        Ok(n)
    }

    /// Adds an untyped variable if `id` is new and returns its index.
    pub fn ensure_variable(&mut self, id: &str) -> usize {
        match self.index_of(id) {
            Some(i) => i,
            None => self.add_variable(Variable::new(id, DEFAULT_TYPE)).expect("id is new"),
        }
    }

    pub fn label(&self, i: usize, j: usize) -> RelationSet {
        self.labels[i * self.vars.len() + j]
    }

    pub fn label_by_id(&self, a: &str, b: &str) -> Option<RelationSet> {
        Some(self.label(self.index_of(a)?, self.index_of(b)?))
    }

    /// Overwrites `label(i, j)` and its converse.
    pub fn set_label(&mut self, i: usize, j: usize, rs: RelationSet) {
        assert_ne!(i, j, "diagonal labels are fixed");
        let n = self.vars.len();
        self.labels[i * n + j] = rs;
        self.labels[j * n + i] = rs.converse();
    }

    pub fn set_label_by_id(&mut self, a: &str, b: &str, rs: RelationSet) -> Result<()> {
        let (i, j) = (self.require(a)?, self.require(b)?);
        if i == j {
            return Err(Error::Parse(format!("self-pair `{a}`")));
        }
        self.set_label(i, j, rs);
        Ok(())
    }

    /// Intersects `label(i, j)` with `rs`; returns whether it changed.
    pub fn constrain(&mut self, i: usize, j: usize, rs: RelationSet) -> bool {
        let cur = self.label(i, j);
        let new = cur.intersect(rs);
        if new != cur {
            self.set_label(i, j, new);
        }
        new != cur
    }

    /// Unordered pairs `(i, j)` with `i < j` in declaration order.
    pub fn pairs(&self) -> impl Iterator<Item = (usize, usize)> {
        let n = self.vars.len();
        (0..n).flat_map(move |i| (i + 1..n).map(move |j| (i, j)))
    }

    /// Pairs whose endpoints both exist.
    pub fn active_pairs(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.pairs().filter(|&(i, j)| self.vars[i].exists && self.vars[j].exists)
    }

    pub fn active_mask(&self) -> Vec<bool> {
        self.vars.iter().map(|v| v.exists).collect()
    }

    pub(crate) fn labels_mut(&mut self) -> &mut [RelationSet] {
        &mut self.labels
    }

    /// True iff every active pair carries exactly one relation.
    pub fn is_scenario(&self) -> bool {
        self.active_pairs().all(|(i, j)| self.label(i, j).len() == 1)
    }

    /// True iff some active pair carries the empty set.
    pub fn has_empty_label(&self) -> bool {
        self.active_pairs().any(|(i, j)| self.label(i, j).is_empty())
    }

    /// Sub-network on the variables at `keep`, in that order.
    pub fn restrict(&self, keep: &[usize]) -> ConstraintNetwork {
        let m = keep.len();
        let mut labels = vec![RelationSet::UNIVERSAL; m * m];
        for (a, &i) in keep.iter().enumerate() {
            for (b, &j) in keep.iter().enumerate() {
                labels[a * m + b] = self.label(i, j);
            }
        }
        ConstraintNetwork { vars: keep.iter().map(|&i| self.vars[i].clone()).collect(), labels }
    }

    /// Whether the two networks range over the same ids in the same order.
    pub fn same_variables(&self, other: &ConstraintNetwork) -> bool {
        self.vars.len() == other.vars.len() && self.vars.iter().zip(&other.vars).all(|(a, b)| a.id == b.id)
    }

    /// Pairwise label-subset test over active pairs.
    pub fn refines(&self, other: &ConstraintNetwork) -> bool {
        self.same_variables(other) && self.active_pairs().all(|(i, j)| self.label(i, j).is_subset(other.label(i, j)))
    }
}
