//! Deliberately simple reference procedures over small label matrices.
//! Labels are `n x n` row-major; only the oracle-locked `compose` and
//! `converse` come from the library.

use geonarrate::calculus::{compose, RelationSet};
use geonarrate::qcn::ConstraintNetwork;

pub fn matrix(net: &ConstraintNetwork) -> Vec<RelationSet> {
    let n = net.len();
    (0..n * n).map(|k| net.label(k / n, k % n)).collect()
}

/// Sweep every ordered triple until nothing changes. `None` on an empty label.
pub fn sweep_closure(n: usize, labels: &[RelationSet]) -> Option<Vec<RelationSet>> {
    let mut l = labels.to_vec();
    loop {
        let mut changed = false;
        for i in 0..n {
            for j in 0..n {
                for k in 0..n {
                    if i == j || j == k || i == k {
                        continue;
                    }
                    let refined = l[i * n + k].intersect(compose(l[i * n + j], l[j * n + k]));
                    if refined != l[i * n + k] {
                        l[i * n + k] = refined;
                        l[k * n + i] = refined.converse();
                        changed = true;
                    }
                    if refined.is_empty() {
                        return None;
                    }
                }
            }
        }
        if !changed {
            return Some(l);
        }
    }
}

/// Every atomic refinement of the upper triangle that survives the sweep,
/// in pair order then tag order.
pub fn all_scenarios(n: usize, labels: &[RelationSet]) -> Vec<Vec<RelationSet>> {
    let pairs: Vec<(usize, usize)> = (0..n).flat_map(|i| (i + 1..n).map(move |j| (i, j))).collect();
    let mut out = Vec::new();
    let mut cur = labels.to_vec();
    fn go(
        k: usize,
        n: usize,
        pairs: &[(usize, usize)],
        labels: &[RelationSet],
        cur: &mut Vec<RelationSet>,
        out: &mut Vec<Vec<RelationSet>>,
    ) {
        if k == pairs.len() {
            if let Some(closed) = sweep_closure(n, cur) {
                debug_assert_eq!(&closed, cur);
                out.push(cur.clone());
            }
            return;
        }
        let (i, j) = pairs[k];
        for r in labels[i * n + j].iter() {
            cur[i * n + j] = RelationSet::single(r);
            cur[j * n + i] = RelationSet::single(r.converse());
            go(k + 1, n, pairs, labels, cur, out);
        }
    }
    go(0, n, &pairs, labels, &mut cur, &mut out);
    out
}
