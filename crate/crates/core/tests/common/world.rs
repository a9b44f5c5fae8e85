use std::collections::BTreeSet;

use geonarrate::abduce::AbduceOptions;
use geonarrate::calculus::{neighbors, BaseRelation, RelationSet};
use geonarrate::events::EventKind;
use geonarrate::qcn::{ConstraintNetwork, Variable};
use rand::seq::SliceRandom;
use rand::Rng;

use super::naive;

/// Ground truth for one hidden interval: who exists and how they relate.
#[derive(Clone)]
pub struct World {
    pub exists: Vec<bool>,
    pub born: Vec<bool>,
    pub labels: Vec<RelationSet>,
}

impl World {
    pub fn n(&self) -> usize {
        self.exists.len()
    }

    pub fn get(&self, i: usize, j: usize) -> BaseRelation {
        self.labels[i * self.n() + j].as_single().unwrap()
    }

    pub fn set(&mut self, i: usize, j: usize, r: BaseRelation) {
        let n = self.n();
        self.labels[i * n + j] = RelationSet::single(r);
        self.labels[j * n + i] = RelationSet::single(r.converse());
    }

    /// Assigns random relations between `fresh` and every other existing
    /// object, one pair at a time. Path consistency decides consistency for
    /// base relations, so the greedy choice never dead-ends.
    pub fn place(&mut self, fresh: &[usize], rng: &mut impl Rng) -> bool {
        let n = self.n();
        let mut pairs = Vec::new();
        for &f in fresh {
            for j in (0..n).filter(|&j| j != f && self.exists[j]) {
                if !(fresh.contains(&j) && j < f) {
                    self.labels[f * n + j] = RelationSet::UNIVERSAL;
                    self.labels[j * n + f] = RelationSet::UNIVERSAL;
                    pairs.push((f, j));
                }
            }
        }
        for (i, j) in pairs {
            let mut atoms = BaseRelation::ALL.to_vec();
            atoms.shuffle(rng);
            let Some(r) = atoms.into_iter().find(|&r| {
                let mut t = self.clone();
                t.set(i, j, r);
                t.consistent()
            }) else {
                return false;
            };
            self.set(i, j, r);
        }
        true
    }

    pub fn consistent(&self) -> bool {
        let n = self.n();
        let live: Vec<usize> = (0..n).filter(|&i| self.exists[i]).collect();
        let m = live.len();
        let sub: Vec<RelationSet> = (0..m * m).map(|k| self.labels[live[k / m] * n + live[k % m]]).collect();
        naive::sweep_closure(m, &sub).is_some()
    }

    pub fn network(&self, rng: &mut impl Rng, hide: f64) -> ConstraintNetwork {
        let vars = (0..self.n()).map(|i| Variable { exists: self.exists[i], ..Variable::new(format!("o{i}"), "Zone") });
        let mut net = ConstraintNetwork::with_variables(vars).unwrap();
        for i in 0..self.n() {
            for j in i + 1..self.n() {
                if self.exists[i] && self.exists[j] && !rng.gen_bool(hide) {
                    net.set_label(i, j, RelationSet::single(self.get(i, j)));
                }
            }
        }
        net
    }
}

/// One random event applied to the world, or `false` if none fitted.
pub fn mutate(w: &mut World, rng: &mut impl Rng) -> bool {
    let n = w.n();
    let live: Vec<usize> = (0..n).filter(|&i| w.exists[i]).collect();
    let unborn: Vec<usize> = (0..n).filter(|&i| !w.born[i]).collect();
    let apart = |r: BaseRelation| matches!(r, BaseRelation::Dc | BaseRelation::Ec);
    for _ in 0..20 {
        let mut t = w.clone();
        let ok = match rng.gen_range(0..8).min(4).max(if rng.gen_bool(0.4) { 3 } else { 0 }) {
            0 if live.len() >= 2 => {
                let (i, j) = (live[0], live[1 + rng.gen_range(0..live.len() - 1)]);
                let options: Vec<_> = neighbors(w.get(i, j)).iter().collect();
                t.set(i, j, *options.choose(rng).unwrap());
                t.consistent()
            }
            1 if !live.is_empty() => {
                let i = *live.choose(rng).unwrap();
                t.exists[i] = false;
                true
            }
            2 if !unborn.is_empty() => {
                let i = *unborn.choose(rng).unwrap();
                t.exists[i] = true;
                t.born[i] = true;
                t.place(&[i], rng)
            }
            3 if live.len() >= 2 && !unborn.is_empty() => {
                let (a, b) = (live[0], live[1]);
                let o = unborn[0];
                if !apart(w.get(a, b)) {
                    continue;
                }
                t.exists[a] = false;
                t.exists[b] = false;
                t.exists[o] = true;
                t.born[o] = true;
                t.place(&[o], rng)
            }
            4 if !live.is_empty() && unborn.len() >= 2 => {
                let p = *live.choose(rng).unwrap();
                let (c, d) = (unborn[0], unborn[1]);
                t.exists[p] = false;
                for x in [c, d] {
                    t.exists[x] = true;
                    t.born[x] = true;
                }
                t.set(c, d, if rng.gen_bool(0.5) { BaseRelation::Dc } else { BaseRelation::Ec });
                t.place(&[c, d], rng)
            }
            _ => continue,
        };
        if ok {
            *w = t;
            return true;
        }
    }
    false
}

pub fn random_world(n: usize, rng: &mut impl Rng) -> World {
    let mut w = World {
        exists: (0..n).map(|_| rng.gen_bool(0.7)).collect(),
        born: vec![false; n],
        labels: vec![RelationSet::single(BaseRelation::Eq); n * n],
    };
    if !w.exists.iter().any(|&e| e) {
        w.exists[0] = true;
    }
    w.born = w.exists.clone();
    let live: Vec<usize> = (0..n).filter(|&i| w.exists[i]).collect();
    assert!(w.place(&live, rng));
    w
}

pub fn random_abducibles(rng: &mut impl Rng) -> BTreeSet<EventKind> {
    let all = AbduceOptions::DEFAULT_ABDUCIBLES;
    match rng.gen_range(0..4) {
        0 => all.into_iter().filter(|k| !matches!(k, EventKind::Merge | EventKind::Split)).collect(),
        1 => all.into_iter().filter(|&k| rng.gen_bool(0.7) || k == EventKind::Transition).collect(),
        _ => all.into_iter().collect(),
    }
}
