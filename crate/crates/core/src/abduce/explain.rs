use std::cmp::Reverse;
use std::collections::{BTreeSet, BinaryHeap, HashMap};
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::calculus::{cnd_distance, neighbors_of_set, BaseRelation, RelationSet};
use crate::error::{Error, Result};
use crate::events::{EventKind, EventOccurrence};
use crate::qcn::{self, ConstraintNetwork, TimedNetwork, Variable, DEFAULT_TYPE};

use super::monotonic_extension;

/// Search settings for [`explain`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AbduceOptions {
    /// Event kinds the search may hypothesise.
    pub abducibles: BTreeSet<EventKind>,
    /// Largest number of expanded situations.
    pub budget: u64,
    /// Largest number of explanations returned.
    pub max_explanations: usize,
}

impl AbduceOptions {
    pub const DEFAULT_ABDUCIBLES: [EventKind; 5] =
        [EventKind::Appearance, EventKind::Disappearance, EventKind::Split, EventKind::Merge, EventKind::Transition];
}

impl Default for AbduceOptions {
    fn default() -> Self {
        AbduceOptions {
            abducibles: Self::DEFAULT_ABDUCIBLES.into_iter().collect(),
            budget: 1_000_000,
            max_explanations: 32,
        }
    }
}

/// One hypothesised change, over indices into [`Problem::universe`].
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Action {
    Appear(usize),
    Disappear(usize),
    /// Pair (lower index first) and the relation it moves to.
    Transition(usize, usize, BaseRelation),
    /// Children in ascending order, then the result.
    Merge(Vec<usize>, usize),
    /// Parent, then children in ascending order.
    Split(usize, Vec<usize>),
}

impl Action {
    pub fn kind(&self) -> EventKind {
        match self {
            Action::Appear(_) => EventKind::Appearance,
            Action::Disappear(_) => EventKind::Disappearance,
            Action::Transition(..) => EventKind::Transition,
            Action::Merge(..) => EventKind::Merge,
            Action::Split(..) => EventKind::Split,
        }
    }
}

/// A state of the world between observations.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Situation {
    /// Network over the whole universe; absent objects carry universal
    /// labels.
    pub state: ConstraintNetwork,
    /// Index of the next observation to satisfy.
    pub next: usize,
    gone: Vec<bool>,
}

impl Situation {
    pub fn exists(&self, i: usize) -> bool {
        self.state.variable(i).exists
    }

    /// Existed at some point and has since ceased to.
    pub fn gone(&self, i: usize) -> bool {
        self.gone[i]
    }

    fn key(&self) -> Vec<u8> {
        let n = self.state.len();
        let mut k = Vec::with_capacity(4 + 2 * n + n * n / 2);
        k.extend_from_slice(&(self.next as u32).to_le_bytes());
        k.extend((0..n).map(|i| self.exists(i) as u8 | (self.gone[i] as u8) << 1));
        for (i, j) in self.state.pairs() {
            k.push(self.state.label(i, j).bits());
        }
        k
    }

    fn remove(&mut self, i: usize) {
        let n = self.state.len();
        self.state.variable_mut(i).exists = false;
        self.gone[i] = true;
        for j in (0..n).filter(|&j| j != i) {
            self.state.set_label(i, j, RelationSet::UNIVERSAL);
        }
    }

    fn create(&mut self, i: usize) {
        self.state.variable_mut(i).exists = true;
    }
}

/// An observation over universe indices.
#[derive(Debug, Clone)]
struct Target {
    present: Vec<Option<bool>>,
    labels: Vec<(usize, usize, RelationSet)>,
}

/// A set of observations prepared for search.
#[derive(Debug, Clone)]
pub struct Problem {
    universe: Vec<Variable>,
    targets: Vec<Target>,
    times: Vec<usize>,
    /// `later[k][i]`: object `i` is observed present at index `k` or later.
    later: Vec<Vec<bool>>,
    abducibles: BTreeSet<EventKind>,
    initial: Situation,
}

fn type_of(v: &Variable) -> Option<&str> {
    (v.object_type != DEFAULT_TYPE).then_some(v.object_type.as_str())
}

impl Problem {
    /// Objects are the union over all observations, in order of first
    /// mention. Objects not declared in the first observation start out
    /// absent.
    pub fn new(observations: &[TimedNetwork], abducibles: &BTreeSet<EventKind>) -> Result<Problem> {
        if observations.len() < 2 {
            return Err(Error::Config("explanation needs at least two observations".into()));
        }
        let mut universe: Vec<Variable> = Vec::new();
        for obs in observations {
            for v in obs.network.variables() {
                match universe.iter_mut().find(|u| u.id == v.id) {
                    Some(u) if type_of(u).is_none() => u.object_type = v.object_type.clone(),
                    Some(_) => {}
                    None => universe.push(Variable { exists: false, coref: None, ..v.clone() }),
                }
            }
        }
        let n = universe.len();
        if n > 64 {
            return Err(Error::Config(format!("{n} objects exceed the abduction limit of 64")));
        }
        let index = |id: &str| universe.iter().position(|u| u.id == id).expect("collected above");
        let mut targets = Vec::new();
        for obs in observations {
            let ext = monotonic_extension(&obs.network)
                .map_err(|e| Error::Inconsistent(format!("observation {}: {e}", obs.index)))?;
            let mut present = vec![None; n];
            for v in ext.variables() {
                present[index(&v.id)] = Some(v.exists);
            }
            let mut labels = Vec::new();
            for (i, j) in ext.active_pairs() {
                let l = ext.label(i, j);
                if l == RelationSet::UNIVERSAL {
                    continue;
                }
                let (a, b) = (index(&ext.variable(i).id), index(&ext.variable(j).id));
                labels.push(if a < b { (a, b, l) } else { (b, a, l.converse()) });
            }
            targets.push(Target { present, labels });
        }
        let mut later = vec![vec![false; n]; targets.len() + 1];
        for k in (0..targets.len()).rev() {
            for i in 0..n {
                later[k][i] = later[k + 1][i] || targets[k].present[i] == Some(true);
            }
        }

        let mut state = ConstraintNetwork::with_variables(universe.iter().cloned()).expect("ids unique");
        for i in 0..n {
            state.variable_mut(i).exists = targets[0].present[i] == Some(true);
        }
        for &(a, b, l) in &targets[0].labels {
            state.set_label(a, b, l);
        }
        qcn::close_in_place(&mut state).expect("extension is closed");
        let mut problem = Problem {
            universe,
            targets,
            times: observations.iter().map(|o| o.index).collect(),
            later,
            abducibles: abducibles.clone(),
            initial: Situation { state, next: 1, gone: vec![false; n] },
        };
        problem.initial = problem.advance(problem.initial.clone());
        Ok(problem)
    }

    pub fn universe(&self) -> &[Variable] {
        &self.universe
    }

    pub fn observations(&self) -> usize {
        self.targets.len()
    }

    pub fn initial(&self) -> &Situation {
        &self.initial
    }

    pub fn is_goal(&self, s: &Situation) -> bool {
        s.next == self.targets.len()
    }

    /// The situation meets observation `k`: existence as declared and every
    /// constrained label a subset of the observed one.
    pub fn satisfies(&self, s: &Situation, k: usize) -> bool {
        let t = &self.targets[k];
        t.present.iter().enumerate().all(|(i, p)| p.is_none_or(|p| s.exists(i) == p))
            && t.labels.iter().all(|&(a, b, l)| s.state.label(a, b).is_subset(l))
    }

    fn advance(&self, mut s: Situation) -> Situation {
        while s.next < self.targets.len() && self.satisfies(&s, s.next) {
            s.next += 1;
        }
        s
    }

    /// May `i` come into being? Never existed, and observed later.
    fn creatable(&self, s: &Situation, i: usize) -> bool {
        !s.exists(i) && !s.gone(i) && self.later[s.next][i]
    }

    fn same_type(&self, a: usize, b: usize) -> bool {
        self.universe[a].object_type == self.universe[b].object_type
    }

    /// Applies `a` if it is possible in `s` and leaves a consistent state.
    /// Observations met by the result are passed over.
    pub fn apply(&self, s: &Situation, a: &Action) -> Option<Situation> {
        if !self.abducibles.contains(&a.kind()) || self.is_goal(s) {
            return None;
        }
        let n = self.universe.len();
        let ascending = |v: &[usize]| v.len() >= 2 && v.windows(2).all(|w| w[0] < w[1]) && v[v.len() - 1] < n;
        let mut next = s.clone();
        match a {
            Action::Appear(o) => {
                if *o >= n || !self.creatable(s, *o) {
                    return None;
                }
                next.create(*o);
            }
            Action::Disappear(o) => {
                if *o >= n || !s.exists(*o) {
                    return None;
                }
                next.remove(*o);
            }
            Action::Transition(i, j, r) => {
                if !(i < j && *j < n && s.exists(*i) && s.exists(*j)) {
                    return None;
                }
                let l = s.state.label(*i, *j);
                if l == RelationSet::single(*r) || !l.union(neighbors_of_set(l)).contains(*r) {
                    return None;
                }
                next.state.set_label(*i, *j, RelationSet::single(*r));
            }
            Action::Merge(children, o) => {
                if !ascending(children) || *o >= n || !self.creatable(s, *o) {
                    return None;
                }
                let apart = RelationSet::of(&[BaseRelation::Dc, BaseRelation::Ec]);
                for (k, &c) in children.iter().enumerate() {
                    if !s.exists(c) || !self.same_type(c, *o) {
                        return None;
                    }
                    if children[k + 1..].iter().any(|&d| s.state.label(c, d).intersect(apart).is_empty()) {
                        return None;
                    }
                }
                for &c in children {
                    next.remove(c);
                }
                next.create(*o);
            }
            Action::Split(o, children) => {
                if !ascending(children) || *o >= n || !s.exists(*o) {
                    return None;
                }
                if children.iter().any(|&c| !self.creatable(s, c) || !self.same_type(c, *o)) {
                    return None;
                }
                next.remove(*o);
                let apart = RelationSet::of(&[BaseRelation::Dc, BaseRelation::Ec]);
                for (k, &c) in children.iter().enumerate() {
                    next.create(c);
                    for &d in &children[k + 1..] {
                        next.state.set_label(c, d, apart);
                    }
                }
            }
        }
        qcn::close_in_place(&mut next.state).ok()?;
        Some(self.advance(next))
    }

    /// Candidate actions in a fixed order; [`Problem::apply`] decides which
    /// are possible.
    pub fn actions(&self, s: &Situation) -> Vec<Action> {
        let n = self.universe.len();
        let allowed = |k| self.abducibles.contains(&k);
        let existing: Vec<usize> = (0..n).filter(|&i| s.exists(i)).collect();
        let fresh: Vec<usize> = (0..n).filter(|&i| self.creatable(s, i)).collect();
        let mut out = Vec::new();
        if allowed(EventKind::Transition) {
            for (k, &i) in existing.iter().enumerate() {
                for &j in &existing[k + 1..] {
                    let l = s.state.label(i, j);
                    for r in l.union(neighbors_of_set(l)).iter() {
                        if l != RelationSet::single(r) {
                            out.push(Action::Transition(i, j, r));
                        }
                    }
                }
            }
        }
        if allowed(EventKind::Disappearance) {
            out.extend(existing.iter().map(|&i| Action::Disappear(i)));
        }
        if allowed(EventKind::Appearance) {
            out.extend(fresh.iter().map(|&i| Action::Appear(i)));
        }
        if allowed(EventKind::Merge) {
            for &o in &fresh {
                let pool: Vec<usize> = existing.iter().copied().filter(|&c| self.same_type(c, o)).collect();
                out.extend(subsets(&pool).map(|c| Action::Merge(c, o)));
            }
        }
        if allowed(EventKind::Split) {
            for &o in &existing {
                let pool: Vec<usize> = fresh.iter().copied().filter(|&c| self.same_type(c, o)).collect();
                out.extend(subsets(&pool).map(|c| Action::Split(o, c)));
            }
        }
        out
    }

    /// Lower bound on the cost of meeting the next observation; `None` when
    /// no continuation can meet every remaining observation.
    fn heuristic(&self, s: &Situation) -> Option<u32> {
        if self.is_goal(s) {
            return Some(0);
        }
        if (0..self.universe.len()).any(|i| s.gone(i) && self.later[s.next][i]) {
            return None;
        }
        let t = &self.targets[s.next];
        let mut h = 0;
        for &(a, b, l) in &t.labels {
            let cur = s.state.label(a, b);
            if s.exists(a) && s.exists(b) && cur.intersect(l).is_empty() {
                // only transitions on this very pair can move its label
                h += cur.iter().flat_map(|x| l.iter().map(move |y| cnd_distance(x, y))).min().unwrap_or(0);
            }
        }
        let (mut appear, mut vanish) = (false, false);
        for (i, p) in t.present.iter().enumerate() {
            match *p {
                Some(true) if !s.exists(i) => appear = true,
                Some(false) if s.exists(i) => vanish = true,
                _ => {}
            }
        }
        let can = |k| self.abducibles.contains(&k);
        let macros = can(EventKind::Merge) || can(EventKind::Split);
        if (appear && !can(EventKind::Appearance) && !macros) || (vanish && !can(EventKind::Disappearance) && !macros) {
            return None;
        }
        Some(h + (appear || vanish) as u32)
    }

    /// Uniform-cost search guided by [`Problem::heuristic`], collecting every
    /// distinct goal situation at the optimal cost.
    pub fn search(&self, opts: &AbduceOptions) -> Result<Vec<Explanation>> {
        struct Node {
            sit: Situation,
            parent: Option<usize>,
            action: Option<Action>,
            g: u32,
        }
        let mut nodes = vec![Node { sit: self.initial.clone(), parent: None, action: None, g: 0 }];
        let mut best: HashMap<Vec<u8>, u32> = HashMap::new();
        let mut heap = BinaryHeap::new();
        let Some(h0) = self.heuristic(&self.initial) else {
            return Err(Error::NoExplanation("no sequence of abducible events reaches the observations".into()));
        };
        best.insert(self.initial.key(), 0);
        heap.push(Reverse((h0, 0u32, 0usize)));
        let mut goals = Vec::new();
        let mut optimum = None;
        let mut expanded = 0u64;
        while let Some(Reverse((f, g, idx))) = heap.pop() {
            if optimum.is_some_and(|c| f > c) {
                break;
            }
            if best.get(&nodes[idx].sit.key()).is_some_and(|&b| b < g) {
                continue;
            }
            if self.is_goal(&nodes[idx].sit) {
                optimum = Some(g);
                goals.push(idx);
                continue;
            }
            expanded += 1;
            if expanded > opts.budget {
                if goals.is_empty() {
                    return Err(Error::BudgetExhausted { explored: expanded, cap: opts.budget });
                }
                break;
            }
            for a in self.actions(&nodes[idx].sit) {
                let Some(child) = self.apply(&nodes[idx].sit, &a) else { continue };
                let Some(h) = self.heuristic(&child) else { continue };
                let key = child.key();
                if best.get(&key).is_some_and(|&b| b <= g + 1) {
                    continue;
                }
                best.insert(key, g + 1);
                nodes.push(Node { sit: child, parent: Some(idx), action: Some(a), g: g + 1 });
                heap.push(Reverse((g + 1 + h, g + 1, nodes.len() - 1)));
            }
        }
        if goals.is_empty() {
            return Err(Error::NoExplanation("no sequence of abducible events connects the observations".into()));
        }
        let mut out: Vec<Explanation> = goals
            .into_iter()
            .map(|goal| {
                let mut steps = Vec::new();
                let mut at = goal;
                while let (Some(p), Some(a)) = (nodes[at].parent, &nodes[at].action) {
                    steps.push((nodes[p].sit.next - 1, a.clone()));
                    at = p;
                }
                steps.reverse();
                self.explanation(&steps, nodes[goal].g, &nodes[goal].sit)
            })
            .collect();
        out.sort_by(|a, b| a.order_key().cmp(&b.order_key()));
        let sets: Vec<Vec<String>> = out.iter().map(Explanation::event_set).collect();
        let keep: Vec<bool> =
            (0..out.len()).map(|i| !(0..out.len()).any(|j| j != i && strict_subset(&sets[j], &sets[i]))).collect();
        let mut kept: Vec<Explanation> = out.into_iter().zip(keep).filter(|(_, k)| *k).map(|(e, _)| e).collect();
        kept.truncate(opts.max_explanations.max(1));
        Ok(kept)
    }

    fn explanation(&self, steps: &[(usize, Action)], cost: u32, last: &Situation) -> Explanation {
        let id = |i: usize| self.universe[i].id.clone();
        let ids = |v: &[usize]| v.iter().map(|&i| id(i)).collect::<Vec<_>>();
        let allowed = |k| self.abducibles.contains(&k);
        let mut delta = Vec::new();
        let mut position = vec![0usize; self.targets.len()];
        for (interval, a) in steps {
            let interval = *interval;
            let t = self.times[interval + 1];
            let mut place = |event: EventOccurrence, derived: bool, advance: bool| {
                delta.push(PlacedEvent { interval, position: position[interval], derived, event });
                if advance {
                    position[interval] += 1;
                }
            };
            let ev = |kind, p: Vec<String>| EventOccurrence::new(t, kind, p).with_evidence("abduced");
            match a {
                Action::Appear(o) => place(ev(EventKind::Appearance, vec![id(*o)]), false, true),
                Action::Disappear(o) => place(ev(EventKind::Disappearance, vec![id(*o)]), false, true),
                Action::Transition(i, j, r) => {
                    let mut e = ev(EventKind::Transition, vec![id(*i), id(*j)]);
                    e.target_relation = Some(*r);
                    place(e, false, true);
                }
                Action::Merge(children, o) => {
                    let effect = format!("effect of merge into {}", id(*o));
                    if allowed(EventKind::Disappearance) {
                        for &c in children {
                            place(ev(EventKind::Disappearance, vec![id(c)]).with_evidence(effect.clone()), true, true);
                        }
                    }
                    if allowed(EventKind::Appearance) {
                        place(ev(EventKind::Appearance, vec![id(*o)]).with_evidence(effect), true, false);
                    }
                    let mut p = ids(children);
                    p.push(id(*o));
                    place(ev(EventKind::Merge, p), false, true);
                }
                Action::Split(o, children) => {
                    let effect = format!("effect of split of {}", id(*o));
                    let mut p = vec![id(*o)];
                    p.extend(ids(children));
                    place(ev(EventKind::Split, p), false, !allowed(EventKind::Disappearance));
                    if allowed(EventKind::Disappearance) {
                        place(ev(EventKind::Disappearance, vec![id(*o)]).with_evidence(effect.clone()), true, true);
                    }
                    if allowed(EventKind::Appearance) {
                        for &c in children {
                            place(ev(EventKind::Appearance, vec![id(c)]).with_evidence(effect.clone()), true, true);
                        }
                    }
                }
            }
        }
        Explanation { delta, cost, times: self.times.clone(), final_state: last.state.clone() }
    }
}

fn strict_subset(a: &[String], b: &[String]) -> bool {
    a.len() < b.len() && {
        let mut rest: Vec<&String> = b.iter().collect();
        a.iter().all(|x| match rest.iter().position(|y| *y == x) {
            Some(p) => {
                rest.remove(p);
                true
            }
            None => false,
        })
    }
}

/// Subsets with at least two members, in ascending bitmask order.
fn subsets(pool: &[usize]) -> impl Iterator<Item = Vec<usize>> + '_ {
    let n = pool.len().min(20);
    (0u32..1 << n)
        .filter(|m| m.count_ones() >= 2)
        .map(move |m| (0..n).filter(|k| m & (1 << k) != 0).map(|k| pool[k]).collect())
}

/// An event of an explanation with its symbolic placement: between
/// observation `interval` and the next, at `position`. Events sharing a
/// position are simultaneous.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PlacedEvent {
    pub interval: usize,
    pub position: usize,
    /// An effect of a merge or split rather than a hypothesis of its own.
    #[serde(default)]
    pub derived: bool,
    #[serde(flatten)]
    pub event: EventOccurrence,
}

/// A minimal set of events that, replayed from the first observation, meets
/// every later one.
#[derive(Debug, Clone, PartialEq)]
pub struct Explanation {
    pub delta: Vec<PlacedEvent>,
    /// Number of hypothesised (non-derived) events.
    pub cost: u32,
    /// Time index of each observation.
    pub times: Vec<usize>,
    /// The situation reached after the last observation.
    pub final_state: ConstraintNetwork,
}

impl Explanation {
    /// Sorted term renderings of all events, derived ones included.
    pub fn event_set(&self) -> Vec<String> {
        let mut v: Vec<String> = self.delta.iter().map(|p| p.event.term()).collect();
        v.sort();
        v
    }

    fn order_key(&self) -> (u32, Vec<(usize, usize)>, Vec<String>) {
        (
            self.cost,
            self.delta.iter().map(|p| (p.interval, p.position)).collect(),
            self.delta.iter().map(|p| p.event.term()).collect(),
        )
    }

    /// Per interval: `t_k < e1 < e2 = e3 < t_k+1`, where `=` joins
    /// simultaneous events.
    pub fn ordering_constraints(&self) -> Vec<String> {
        let mut out = Vec::new();
        for k in 0..self.times.len().saturating_sub(1) {
            let events: Vec<&PlacedEvent> = self.delta.iter().filter(|p| p.interval == k).collect();
            if events.is_empty() {
                continue;
            }
            let mut s = format!("t{}", self.times[k]);
            for (n, p) in events.iter().enumerate() {
                let joint = n > 0 && events[n - 1].position == p.position;
                s.push_str(if joint { " = " } else { " < " });
                s.push_str(&p.event.term());
            }
            s.push_str(&format!(" <= t{}", self.times[k + 1]));
            out.push(s);
        }
        out
    }

    pub fn to_ndjson(&self) -> String {
        let mut out = String::new();
        for p in &self.delta {
            out.push_str(&serde_json::to_string(p).expect("events serialize"));
            out.push('\n');
        }
        out
    }
}

impl fmt::Display for Explanation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "cost {}", self.cost)?;
        for p in &self.delta {
            let mark = if p.derived { " (effect)" } else { "" };
            writeln!(f, "  [{}.{}] {}{}", p.interval, p.position, p.event.term(), mark)?;
        }
        for c in self.ordering_constraints() {
            writeln!(f, "  {c}")?;
        }
        Ok(())
    }
}

/// Minimal-cost explanations connecting consecutive observations, best
/// first.
pub fn explain(observations: &[TimedNetwork], opts: &AbduceOptions) -> Result<Vec<Explanation>> {
    Problem::new(observations, &opts.abducibles)?.search(opts)
}
