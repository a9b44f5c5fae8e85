use std::sync::LazyLock;

use geonarrate::calculus::{cnd_distance, BaseRelation, RelationSet};
use geonarrate::integrate::IntegrityConstraint;
use geonarrate::qcn::{ConstraintNetwork, Variable};
use rand::Rng;

use super::naive;

pub fn pairs(n: usize) -> Vec<(usize, usize)> {
    (0..n).flat_map(|i| (i + 1..n).map(move |j| (i, j))).collect()
}

/// Every consistent atomic scenario over `n` variables, as upper-triangle
/// tag indices, found by sweeping all assignments.
pub fn consistent_scenarios(n: usize) -> Vec<Vec<usize>> {
    let ps = pairs(n);
    let mut out = Vec::new();
    for code in 0..8usize.pow(ps.len() as u32) {
        let atoms: Vec<usize> = (0..ps.len()).map(|k| (code >> (3 * k)) & 7).collect();
        let mut m = vec![RelationSet::single(BaseRelation::Eq); n * n];
        for (k, &(i, j)) in ps.iter().enumerate() {
            let r = BaseRelation::from_index(atoms[k]).unwrap();
            m[i * n + j] = RelationSet::single(r);
            m[j * n + i] = RelationSet::single(r.converse());
        }
        if naive::sweep_closure(n, &m).is_some() {
            out.push(atoms);
        }
    }
    out
}

pub static CONSISTENT: LazyLock<Vec<Vec<Vec<usize>>>> = LazyLock::new(|| (0..=4).map(consistent_scenarios).collect());

pub struct Instance {
    pub q: ConstraintNetwork,
    pub ics: Vec<IntegrityConstraint>,
}

pub fn random_set<R: Rng>(rng: &mut R, lo: usize, hi: usize) -> RelationSet {
    let mut s = RelationSet::EMPTY;
    while s.len() < rng.gen_range(lo..=hi) {
        s = s.with(BaseRelation::from_index(rng.gen_range(0..8)).unwrap());
    }
    s
}

pub fn random_instance<R: Rng>(rng: &mut R, n: usize) -> Instance {
    let types = ["A", "B"];
    let mut vars: Vec<Variable> = (0..n).map(|i| Variable::new(format!("v{i}"), types[rng.gen_range(0..2)])).collect();
    if n >= 2 && rng.gen_bool(0.2) {
        vars[1].object_type = vars[0].object_type.clone();
        vars[1].coref = Some("v0".into());
    }
    let mut q = ConstraintNetwork::with_variables(vars).unwrap();
    for (i, j) in pairs(n) {
        let label = if rng.gen_bool(0.85) { random_set(rng, 1, 1) } else { random_set(rng, 2, 2) };
        q.set_label(i, j, label);
    }
    let mut ics = Vec::new();
    for (l, r) in [("A", "A"), ("A", "B"), ("B", "B"), ("*", "B")] {
        if rng.gen_bool(0.45) {
            ics.push(IntegrityConstraint {
                name: format!("{l}{r}"),
                left_type: l.into(),
                right_type: r.into(),
                allowed: random_set(rng, 2, 5),
            });
        }
    }
    Instance { q, ics }
}

/// Independent reading of the constraint semantics.
pub fn allowed(inst: &Instance, i: usize, j: usize) -> RelationSet {
    let (a, b) = (inst.q.variable(i), inst.q.variable(j));
    let m = |p: &str, t: &str| p == "*" || p == t;
    let mut s = RelationSet::UNIVERSAL;
    for ic in &inst.ics {
        if m(&ic.left_type, &a.object_type) && m(&ic.right_type, &b.object_type) {
            s = s.intersect(ic.allowed);
        }
        if m(&ic.left_type, &b.object_type) && m(&ic.right_type, &a.object_type) {
            s = s.intersect(ic.allowed.converse());
        }
    }
    let root = |v: &Variable| v.coref.clone().unwrap_or(v.id.clone());
    if root(a) == root(b) {
        s = s.intersect(RelationSet::single(BaseRelation::Eq));
    }
    s
}

pub fn cost(atom: usize, observed: RelationSet) -> u32 {
    observed.iter().map(|o| cnd_distance(BaseRelation::from_index(atom).unwrap(), o)).min().unwrap()
}

/// Minimal distance and the pairwise union of the minimal compliant
/// consistent scenarios, or `None` if there are none.
pub fn brute_force(inst: &Instance) -> Option<(u32, Vec<RelationSet>, usize)> {
    let n = inst.q.len();
    let ps = pairs(n);
    let mut best: Option<(u32, Vec<RelationSet>, usize)> = None;
    for s in &CONSISTENT[n] {
        if !ps.iter().enumerate().all(|(k, &(i, j))| allowed(inst, i, j).contains(BaseRelation::from_index(s[k]).unwrap())) {
            continue;
        }
        let d: u32 = ps.iter().enumerate().map(|(k, &(i, j))| cost(s[k], inst.q.label(i, j))).sum();
        let as_sets = s.iter().map(|&a| RelationSet::single(BaseRelation::from_index(a).unwrap()));
        match &mut best {
            Some((bd, _, _)) if d > *bd => {}
            Some((bd, union, count)) if d == *bd => {
                for (u, x) in union.iter_mut().zip(as_sets) {
                    *u = u.union(x);
                }
                *count += 1;
            }
            _ => best = Some((d, as_sets.collect(), 1)),
        }
    }
    best
}
