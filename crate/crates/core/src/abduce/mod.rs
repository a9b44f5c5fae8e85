//! Narrative completion: consistency across calculi, monotonic extension of
//! partial descriptions, interpolation of missing transitions, and
//! minimal-cost explanation search.

mod explain;
mod interpolate;

pub use explain::{explain, Action, AbduceOptions, Explanation, PlacedEvent, Problem, Situation};
pub use interpolate::interpolate;

use crate::calculus::{size_entailed, Algebra, topology_compatible, Rcc8, SizeAlgebra, SizeRelation, SizeSet};
use crate::error::{Error, Result};
use crate::qcn::{self, close, ConstraintNetwork};

/// Qualitative size relations over the variables of a topological network.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SizeNetwork {
    n: usize,
    labels: Vec<SizeSet>,
}

impl SizeNetwork {
    pub fn new(n: usize) -> Self {
        let mut labels = vec![SizeSet::UNIVERSAL; n * n];
        for i in 0..n {
            labels[i * n + i] = SizeSet::single(SizeRelation::Equal);
        }
        SizeNetwork { n, labels }
    }

    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        self.n == 0
    }

    pub fn get(&self, i: usize, j: usize) -> SizeSet {
        self.labels[i * self.n + j]
    }

    /// Sets `i ; j` and its converse.
    pub fn set(&mut self, i: usize, j: usize, s: SizeSet) {
        self.labels[i * self.n + j] = s;
        self.labels[j * self.n + i] = SizeAlgebra.converse(s);
    }
}

/// Closes topology and size together: each calculus to its own fixpoint,
/// then the containment-size interaction in both directions, until nothing
/// changes. Returns `false` on an empty label.
pub fn joint_closure(net: &mut ConstraintNetwork, sizes: &mut SizeNetwork) -> bool {
    assert_eq!(net.len(), sizes.len(), "size network must cover the same variables");
    let n = net.len();
    let active = net.active_mask();
    loop {
        if close(&Rcc8, n, net.labels_mut(), &active).is_err() {
            return false;
        }
        if close(&SizeAlgebra, n, &mut sizes.labels, &active).is_err() {
            return false;
        }
        let mut changed = false;
        let pairs: Vec<_> = net.active_pairs().collect();
        for (i, j) in pairs {
            let (t, s) = (net.label(i, j), sizes.get(i, j));
            let s2 = s.intersect(size_entailed(t));
            let t2 = t.intersect(topology_compatible(s2));
            if s2.is_empty() || t2.is_empty() {
                return false;
            }
            if s2 != s {
                sizes.set(i, j, s2);
                changed = true;
            }
            if t2 != t {
                net.set_label(i, j, t2);
                changed = true;
            }
        }
        if !changed {
            return true;
        }
    }
}

/// Compositional consistency of a state over every modelled calculus:
/// topology, and size when given.
pub fn c_consistent(net: &ConstraintNetwork, sizes: Option<&SizeNetwork>) -> bool {
    match sizes {
        None => qcn::algebraic_closure(net).is_ok(),
        Some(s) => joint_closure(&mut net.clone(), &mut s.clone()),
    }
}

/// Completes a partial description with everything composition entails.
/// Constrained pairs only ever get tighter.
pub fn monotonic_extension(partial: &ConstraintNetwork) -> Result<ConstraintNetwork> {
    qcn::algebraic_closure(partial).map_err(|c| Error::Inconsistent(c.to_string()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::calculus::{BaseRelation, RelationSet};
    use crate::qcn::parse_network;
    use BaseRelation::*;

    #[test]
    fn c_consistency() {
        let fig5 = parse_network("C ; D ; {po}\nC ; A ; {ntpp}\nD ; B ; {ntpp}\nA ; B ; {ec}\n").unwrap();
        assert!(!c_consistent(&fig5, None));
        let one = parse_network("@object a\n").unwrap();
        assert!(c_consistent(&one, None));
        assert!(c_consistent(&one, Some(&SizeNetwork::new(1))));

        let inside = parse_network("a ; b ; {ntpp}\n").unwrap();
        let mut sizes = SizeNetwork::new(2);
        sizes.set(0, 1, SizeSet::single(SizeRelation::Larger));
        assert!(c_consistent(&inside, None));
        assert!(!c_consistent(&inside, Some(&sizes)));
        sizes.set(0, 1, SizeSet::single(SizeRelation::Smaller));
        assert!(c_consistent(&inside, Some(&sizes)));
    }

    #[test]
    fn size_prunes_topology() {
        let mut net = parse_network("a ; b ; {po,tpp,eq}\n").unwrap();
        let mut sizes = SizeNetwork::new(2);
        sizes.set(0, 1, SizeSet::single(SizeRelation::Larger));
        assert!(joint_closure(&mut net, &mut sizes));
        assert_eq!(net.label(0, 1), RelationSet::single(Po));
        assert_eq!(sizes.get(1, 0), SizeSet::single(SizeRelation::Smaller));
    }

    #[test]
    fn extension_examples() {
        let chain = parse_network("a ; b ; {ntpp}\nb ; c ; {ntpp}\n@object c\n").unwrap();
        let ext = monotonic_extension(&chain).unwrap();
        assert_eq!(ext.label_by_id("a", "c"), Some(RelationSet::single(Ntpp)));
        let full = parse_network("a ; b ; {tpp}\nb ; c ; {ec}\na ; c ; {ec}\n").unwrap();
        assert_eq!(monotonic_extension(&full).unwrap(), full);
        let fig5 = parse_network("C ; D ; {po}\nC ; A ; {ntpp}\nD ; B ; {ntpp}\nA ; B ; {ec}\n").unwrap();
        assert!(matches!(monotonic_extension(&fig5), Err(Error::Inconsistent(_))));
    }
}
