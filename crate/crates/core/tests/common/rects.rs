use std::collections::BTreeMap;

use geo::{polygon, Polygon};
use geonarrate::calculus::RelationSet;
use geonarrate::events::{EventKind, EventOccurrence, State};
use geonarrate::qcn::{ConstraintNetwork, Variable};
use geonarrate::qualify::{qualify_pair, Region};
use rand::seq::SliceRandom;
use rand::Rng;

pub type Rect = (i32, i32, i32, i32);

pub fn poly((x0, y0, x1, y1): Rect) -> Polygon<f64> {
    let (x0, y0, x1, y1) = (x0 as f64, y0 as f64, x1 as f64, y1 as f64);
    polygon![(x: x0, y: y0), (x: x1, y: y0), (x: x1, y: y1), (x: x0, y: y1)]
}

/// A state whose network is qualified from the rectangles themselves.
pub fn state(t: usize, objs: &BTreeMap<String, Rect>) -> State {
    let ids: Vec<&String> = objs.keys().collect();
    let mut net = ConstraintNetwork::with_variables(ids.iter().map(|id| Variable::new(id.as_str(), "Zone"))).unwrap();
    let regions: Vec<Region> = ids.iter().map(|id| Region::new(&poly(objs[*id]))).collect();
    for i in 0..ids.len() {
        for j in i + 1..ids.len() {
            net.set_label(i, j, RelationSet::single(qualify_pair(&regions[i], &regions[j], 1e-6)));
        }
    }
    let mut s = State::new(t, net);
    s.geometry = objs.iter().map(|(id, r)| (id.clone(), poly(*r))).collect();
    s
}

pub fn random_rect(rng: &mut impl Rng) -> Rect {
    let (x, y) = (rng.gen_range(0..40), rng.gen_range(0..40));
    (x, y, x + rng.gen_range(2..10), y + rng.gen_range(2..10))
}

/// A random timeline with at most one split per step plus unrelated
/// appearances, disappearances, resizes and moves.
pub fn timeline(rng: &mut impl Rng) -> Vec<BTreeMap<String, Rect>> {
    let mut fresh = 0;
    let mut name = || {
        fresh += 1;
        format!("o{fresh}")
    };
    let mut cur: BTreeMap<String, Rect> = (0..rng.gen_range(2..5)).map(|_| (name(), random_rect(rng))).collect();
    let mut out = vec![cur.clone()];
    for _ in 0..rng.gen_range(2..6) {
        let ids: Vec<String> = cur.keys().cloned().collect();
        if rng.gen_bool(0.5) && !ids.is_empty() {
            let id = ids.choose(rng).unwrap().clone();
            let (x0, y0, x1, y1) = cur.remove(&id).unwrap();
            let mid = (x0 + x1) / 2;
            cur.insert(name(), (x0, y0, mid, y1));
            cur.insert(name(), (mid, y0, x1, y1));
        }
        for id in ids {
            let Some(r) = cur.get_mut(&id) else { continue };
            match rng.gen_range(0..8) {
                0 => {
                    cur.remove(&id);
                }
                1 => r.2 += rng.gen_range(1..4),
                2 if r.2 - r.0 > 3 => r.2 -= 1,
                3 => {
                    let d = rng.gen_range(-2..=2);
                    r.0 += d;
                    r.2 += d;
                }
                _ => {}
            }
        }
        if rng.gen_bool(0.3) {
            cur.insert(name(), random_rect(rng));
        }
        out.push(cur.clone());
    }
    out
}

/// Structural view of an event with the roles of the reversed timeline.
pub fn mirrored(e: &EventOccurrence) -> (EventKind, Vec<String>) {
    let p = e.participants.clone();
    match e.kind {
        EventKind::Appearance => (EventKind::Disappearance, p),
        EventKind::Disappearance => (EventKind::Appearance, p),
        EventKind::Growth => (EventKind::Shrinkage, p),
        EventKind::Shrinkage => (EventKind::Growth, p),
        EventKind::Split => {
            let mut m = p[1..].to_vec();
            m.push(p[0].clone());
            (EventKind::Merge, m)
        }
        EventKind::Merge => {
            let mut s = vec![p[p.len() - 1].clone()];
            s.extend_from_slice(&p[..p.len() - 1]);
            (EventKind::Split, s)
        }
        EventKind::Transition => (EventKind::Transition, p),
    }
}

pub fn structural(events: &[EventOccurrence]) -> Vec<(EventKind, Vec<String>)> {
    let mut v: Vec<_> =
        events.iter().filter(|e| e.kind != EventKind::Transition).map(|e| (e.kind, e.participants.clone())).collect();
    v.sort();
    v
}
