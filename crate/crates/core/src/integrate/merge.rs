use std::fmt;

use crate::calculus::{cnd_diameter, cnd_distance, BaseRelation, RelationSet};
use crate::error::{Error, Result};
use crate::qcn::{self, ConstraintNetwork};

use super::constraints::{allowed_network, IntegrityConstraint};

/// Smallest neighbourhood distance between members of two labels.
fn label_distance(a: RelationSet, b: RelationSet) -> Option<u32> {
    a.iter().flat_map(|x| b.iter().map(move |y| cnd_distance(x, y))).min()
}

/// Sum over active pairs of the neighbourhood distance between labels. For
/// disjunctive labels the closest members count.
pub fn scenario_distance(s1: &ConstraintNetwork, s2: &ConstraintNetwork) -> Result<u32> {
    if !s1.same_variables(s2) {
        return Err(Error::VariableMismatch(format!(
            "{:?} vs {:?}",
            s1.variables().iter().map(|v| &v.id).collect::<Vec<_>>(),
            s2.variables().iter().map(|v| &v.id).collect::<Vec<_>>()
        )));
    }
    let mut total = 0;
    for (i, j) in s1.active_pairs() {
        total += label_distance(s1.label(i, j), s2.label(i, j))
            .ok_or_else(|| Error::Inconsistent(format!("empty label on {} ; {}", s1.variable(i).id, s1.variable(j).id)))?;
    }
    Ok(total)
}

/// Limits on the repair search.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct MergeOptions {
    /// Largest distance tried. Defaults to pairs x graph diameter, which is
    /// exhaustive.
    pub budget: Option<u32>,
    /// Largest number of minimal scenarios collected before giving up.
    pub max_scenarios: Option<usize>,
}

/// One pair whose label the merge changed.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Repair {
    pub a: String,
    pub b: String,
    pub before: RelationSet,
    pub after: RelationSet,
}

fn short(rs: RelationSet) -> String {
    match rs.as_single() {
        Some(r) => r.to_string(),
        None => rs.to_string(),
    }
}

impl fmt::Display for Repair {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}–{}: {} → {}", self.a, self.b, short(self.before), short(self.after))
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MergeResult {
    /// Pairwise union of all minimal scenarios.
    pub resolved: ConstraintNetwork,
    pub distance: u32,
    /// Changed pairs in variable order.
    pub repaired_pairs: Vec<Repair>,
    /// Number of minimal scenarios united.
    pub scenarios: usize,
}

impl MergeResult {
    /// `a–b: before → after; ...; distance d`.
    pub fn report(&self) -> String {
        let mut parts: Vec<String> = self.repaired_pairs.iter().map(Repair::to_string).collect();
        parts.push(format!("distance {}", self.distance));
        parts.join("; ")
    }
}

/// Depth-first enumeration of atomic refinements at an exact distance.
struct Search<'a> {
    pairs: Vec<(usize, usize)>,
    /// Cost of each atom per pair, indexed by tag.
    cost: Vec<[u32; 8]>,
    consistent_only: bool,
    limit: Option<usize>,
    out: &'a mut Vec<ConstraintNetwork>,
}

impl Search<'_> {
    fn run(&mut self, net: ConstraintNetwork, k: usize, remaining: u32) -> Result<()> {
        let (mut lo, mut hi) = (0u32, 0u32);
        for (p, &(i, j)) in self.pairs.iter().enumerate().skip(k) {
            let costs = net.label(i, j).iter().map(|r| self.cost[p][r.index()]);
            let (mn, mx) = costs.fold((u32::MAX, 0), |(a, b), c| (a.min(c), b.max(c)));
            if mn == u32::MAX {
                return Ok(());
            }
            lo += mn;
            hi += mx;
        }
        if lo > remaining || hi < remaining {
            return Ok(());
        }
        if k == self.pairs.len() {
            if let Some(limit) = self.limit {
                if self.out.len() >= limit {
                    return Err(Error::BudgetExhausted { explored: limit as u64 + 1, cap: limit as u64 });
                }
            }
            self.out.push(net);
            return Ok(());
        }
        let (i, j) = self.pairs[k];
        for r in net.label(i, j).iter() {
            let c = self.cost[k][r.index()];
            if c > remaining {
                continue;
            }
            let mut next = net.clone();
            next.set_label(i, j, RelationSet::single(r));
            if self.consistent_only && qcn::close_in_place(&mut next).is_err() {
                continue;
            }
            self.run(next, k + 1, remaining - c)?;
        }
        Ok(())
    }
}

fn costs(q: &ConstraintNetwork, pairs: &[(usize, usize)]) -> Vec<[u32; 8]> {
    pairs
        .iter()
        .map(|&(i, j)| {
            let observed = q.label(i, j);
            let mut c = [0u32; 8];
            for r in BaseRelation::ALL {
                // an empty observation carries no information and costs nothing
                c[r.index()] = label_distance(RelationSet::single(r), observed).unwrap_or(0);
            }
            c
        })
        .collect()
}

/// The start of the search: observed variables, existence flags kept, every
/// active pair set to what the constraints allow.
fn search_root(q: &ConstraintNetwork, ics: &[IntegrityConstraint]) -> ConstraintNetwork {
    let mut root = allowed_network(q, ics);
    for (i, j) in q.pairs() {
        if !(q.variable(i).exists && q.variable(j).exists) {
            root.set_label(i, j, q.label(i, j));
        }
    }
    root
}

/// Every constraint-compliant atomic refinement at exactly distance `i`
/// from `q`, in pair order then tag order. Consistency is not checked.
pub fn relax(q: &ConstraintNetwork, i: u32, ics: &[IntegrityConstraint]) -> Vec<ConstraintNetwork> {
    let pairs: Vec<_> = q.active_pairs().collect();
    let mut out = Vec::new();
    let mut search = Search { cost: costs(q, &pairs), pairs, consistent_only: false, limit: None, out: &mut out };
    search.run(search_root(q, ics), 0, i).expect("no limit set");
    out
}

/// Distance-based repair: the union of all consistent, compliant scenarios
/// at minimal distance from `q`.
pub fn resolve(q: &ConstraintNetwork, ics: &[IntegrityConstraint], opts: &MergeOptions) -> Result<MergeResult> {
    let pairs: Vec<_> = q.active_pairs().collect();
    let exhaustive = pairs.len() as u32 * cnd_diameter();
    let cap = opts.budget.unwrap_or(exhaustive).min(exhaustive);
    let mut root = search_root(q, ics);
    if qcn::close_in_place(&mut root).is_err() {
        return Err(Error::Inconsistent("the integrity constraints admit no consistent configuration".into()));
    }
    let cost = costs(q, &pairs);
    for i in 0..=cap {
        let mut found = Vec::new();
        let mut search = Search {
            pairs: pairs.clone(),
            cost: cost.clone(),
            consistent_only: true,
            limit: opts.max_scenarios,
            out: &mut found,
        };
        search.run(root.clone(), 0, i)?;
        if found.is_empty() {
            continue;
        }
        let mut resolved = q.clone();
        for &(a, b) in &pairs {
            let union = found.iter().fold(RelationSet::EMPTY, |acc, s| acc.union(s.label(a, b)));
            resolved.set_label(a, b, union);
        }
        let repaired_pairs = pairs
            .iter()
            .filter(|&&(a, b)| resolved.label(a, b) != q.label(a, b))
            .map(|&(a, b)| Repair {
                a: q.variable(a).id.clone(),
                b: q.variable(b).id.clone(),
                before: q.label(a, b),
                after: resolved.label(a, b),
            })
            .collect();
        return Ok(MergeResult { resolved, distance: i, repaired_pairs, scenarios: found.len() });
    }
    if cap >= exhaustive {
        return Err(Error::Inconsistent("no consistent scenario satisfies the integrity constraints".into()));
    }
    Err(Error::BudgetExhausted { explored: cap as u64 + 1, cap: cap as u64 })
}
