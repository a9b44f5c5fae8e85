//! Brute-force and replay checks for explanation search. The brute force
//! enumerates every conceivable action and leaves the possibility test to
//! `Problem::apply`; replay re-implements the effects on plain networks.
//! Merge and split carry their own existence effects, so replay skips the
//! derived events listed alongside them.

use geonarrate::abduce::{Action, Explanation, Problem, Situation};
use geonarrate::calculus::{BaseRelation, RelationSet};
use geonarrate::events::EventKind;
use geonarrate::qcn::{algebraic_closure, ConstraintNetwork, TimedNetwork, Variable};

fn subsets(n: usize) -> Vec<Vec<usize>> {
    (0u32..1 << n)
        .filter(|m| m.count_ones() >= 2)
        .map(|m| (0..n).filter(|k| m & (1 << k) != 0).collect())
        .collect()
}

/// Every action over `n` objects, possible or not.
pub fn all_actions(n: usize) -> Vec<Action> {
    let mut out = Vec::new();
    for i in 0..n {
        out.push(Action::Appear(i));
        out.push(Action::Disappear(i));
        for j in i + 1..n {
            for r in BaseRelation::ALL {
                out.push(Action::Transition(i, j, r));
            }
        }
        for s in subsets(n) {
            if !s.contains(&i) {
                out.push(Action::Merge(s.clone(), i));
                out.push(Action::Split(i, s));
            }
        }
    }
    out
}

fn reachable(p: &Problem, s: &Situation, depth: u32, actions: &[Action]) -> bool {
    if p.is_goal(s) {
        return true;
    }
    depth > 0 && actions.iter().any(|a| p.apply(s, a).is_some_and(|t| reachable(p, &t, depth - 1, actions)))
}

/// Smallest number of actions reaching the goal, searching up to `max`.
pub fn brute_min_cost(p: &Problem, max: u32) -> Option<u32> {
    let actions = all_actions(p.universe().len());
    (0..=max).find(|&d| reachable(p, p.initial(), d, &actions))
}

fn universe(obs: &[TimedNetwork]) -> Vec<Variable> {
    let mut out: Vec<Variable> = Vec::new();
    for o in obs {
        for v in o.network.variables() {
            if !out.iter().any(|u| u.id == v.id) {
                out.push(Variable { exists: false, coref: None, ..v.clone() });
            }
        }
    }
    out
}

fn meets(state: &ConstraintNetwork, obs: &ConstraintNetwork) -> Result<(), String> {
    let ext = algebraic_closure(obs).map_err(|c| c.to_string())?;
    for v in ext.variables() {
        let i = state.index_of(&v.id).unwrap();
        if state.variable(i).exists != v.exists {
            return Err(format!("existence of {}", v.id));
        }
    }
    for (i, j) in ext.active_pairs() {
        let (a, b) = (&ext.variable(i).id, &ext.variable(j).id);
        let got = state.label_by_id(a, b).unwrap();
        if !got.is_subset(ext.label(i, j)) {
            return Err(format!("{a} ; {b}: {got} not within {}", ext.label(i, j)));
        }
    }
    Ok(())
}

/// Replays `ex` from the first observation and checks every later one.
pub fn replay(obs: &[TimedNetwork], ex: &Explanation) -> Result<(), String> {
    let mut state = ConstraintNetwork::with_variables(universe(obs)).unwrap();
    for v in obs[0].network.variables() {
        let i = state.index_of(&v.id).unwrap();
        state.variable_mut(i).exists = v.exists;
    }
    for (i, j) in obs[0].network.active_pairs() {
        let n = &obs[0].network;
        state.set_label_by_id(&n.variable(i).id, &n.variable(j).id, n.label(i, j)).unwrap();
    }
    state = algebraic_closure(&state).map_err(|c| c.to_string())?;
    let n = state.len();
    for k in 0..obs.len() - 1 {
        for p in ex.delta.iter().filter(|p| p.interval == k && !p.derived) {
            let ids = &p.event.participants;
            let (born, gone): (&[String], &[String]) = match p.event.kind {
                EventKind::Appearance => (&ids[..1], &[]),
                EventKind::Disappearance => (&[], &ids[..1]),
                EventKind::Merge => (&ids[ids.len() - 1..], &ids[..ids.len() - 1]),
                EventKind::Split => (&ids[1..], &ids[..1]),
                _ => (&[], &[]),
            };
            for id in gone {
                let i = state.index_of(id).unwrap();
                if !state.variable(i).exists {
                    return Err(format!("{id} disappears while absent"));
                }
                state.variable_mut(i).exists = false;
                for j in (0..n).filter(|&j| j != i) {
                    state.set_label(i, j, RelationSet::UNIVERSAL);
                }
            }
            for id in born {
                let i = state.index_of(id).unwrap();
                if state.variable(i).exists {
                    return Err(format!("{id} appears twice"));
                }
                state.variable_mut(i).exists = true;
            }
            match p.event.kind {
                EventKind::Transition => {
                    let r = p.event.target_relation.unwrap();
                    state.set_label_by_id(&ids[0], &ids[1], RelationSet::single(r)).unwrap();
                }
                EventKind::Split => {
                    let apart = RelationSet::of(&[BaseRelation::Dc, BaseRelation::Ec]);
                    for (a, x) in ids[1..].iter().enumerate() {
                        for y in &ids[a + 2..] {
                            state.set_label_by_id(x, y, apart).unwrap();
                        }
                    }
                }
                _ => {}
            }
            state = algebraic_closure(&state).map_err(|c| format!("after {}: {c}", p.event))?;
        }
        meets(&state, &obs[k + 1].network).map_err(|e| format!("observation {}: {e}", obs[k + 1].index))?;
    }
    Ok(())
}
