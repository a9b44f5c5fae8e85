use std::collections::BTreeSet;

use geo::{Area, BooleanOps, BoundingRect, Centroid, Point, Polygon};

use crate::calculus::{cnd_distance, BaseRelation, RelationSet};

use super::{EventKind, EventOccurrence, State};

/// Thresholds for the geometric event conditions.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EventConfig {
    /// Allowed relative deviation of the children's total area from the
    /// parent's.
    pub coverage_tolerance: f64,
    /// Allowed centroid displacement as a fraction of the parent's bounding
    /// box diagonal.
    pub centroid_tolerance: f64,
    /// Relative area change that counts as growth or shrinkage.
    pub growth_threshold: f64,
    /// Children must share the parent's type.
    pub same_type: bool,
}

impl Default for EventConfig {
    fn default() -> Self {
        EventConfig { coverage_tolerance: 0.1, centroid_tolerance: 0.1, growth_threshold: 0.05, same_type: true }
    }
}

/// Ids present in `a` but not in `b`, in `a`'s order.
fn flipped<'s>(a: &'s State, b: &State) -> Vec<&'s str> {
    a.present().into_iter().filter(|id| !b.exists(id)).collect()
}

fn diagonal(p: &Polygon<f64>) -> f64 {
    p.bounding_rect().map(|r| r.width().hypot(r.height())).unwrap_or(0.0)
}

/// Area-weighted centroid of disjoint parts.
fn joint_centroid(parts: &[&Polygon<f64>]) -> Option<Point<f64>> {
    let mut total = 0.0;
    let (mut x, mut y) = (0.0, 0.0);
    for p in parts {
        let a = p.unsigned_area();
        let c = p.centroid()?;
        total += a;
        x += a * c.x();
        y += a * c.y();
    }
    (total > 0.0).then(|| Point::new(x / total, y / total))
}

/// The one-to-many condition shared by split and merge. `whole` lives in
/// one state, `candidates` in `parts_state`, the state where they coexist.
fn decompose(
    whole: &str,
    whole_state: &State,
    candidates: &[&str],
    parts_state: &State,
    cfg: &EventConfig,
) -> Option<Vec<String>> {
    let wg = whole_state.geometry.get(whole)?;
    let wtype = whole_state.object_type(whole);
    let tau = cfg.coverage_tolerance;
    let parts: Vec<&str> = candidates
        .iter()
        .copied()
        .filter(|c| !cfg.same_type || parts_state.object_type(c) == wtype)
        .filter(|c| {
            parts_state.geometry.get(*c).is_some_and(|g| {
                let a = g.unsigned_area();
                a > 0.0 && wg.intersection(g).unsigned_area() >= (1.0 - tau) * a
            })
        })
        .collect();
    if parts.len() < 2 {
        return None;
    }
    let apart = RelationSet::of(&[BaseRelation::Dc, BaseRelation::Ec]);
    for (k, a) in parts.iter().enumerate() {
        for b in &parts[k + 1..] {
            let label = parts_state.network.label_by_id(a, b)?;
            if label.is_empty() || !label.is_subset(apart) {
                return None;
            }
        }
    }
    let geoms: Vec<&Polygon<f64>> = parts.iter().map(|p| &parts_state.geometry[*p]).collect();
    let covered: f64 = geoms.iter().map(|g| g.unsigned_area()).sum();
    let ratio = covered / wg.unsigned_area();
    if !(1.0 - tau..=1.0 + tau).contains(&ratio) {
        return None;
    }
    let shift = joint_centroid(&geoms)?.0 - wg.centroid()?.0;
    if shift.x.hypot(shift.y) > cfg.centroid_tolerance * diagonal(wg) {
        return None;
    }
    Some(parts.into_iter().map(String::from).collect())
}

fn splits(prev: &State, next: &State, cfg: &EventConfig, used: &mut BTreeSet<String>) -> Vec<EventOccurrence> {
    let mut out = Vec::new();
    let born = flipped(next, prev);
    for parent in flipped(prev, next) {
        let free: Vec<&str> = born.iter().copied().filter(|c| !used.contains(*c)).collect();
        if let Some(children) = decompose(parent, prev, &free, next, cfg) {
            used.insert(parent.to_string());
            used.extend(children.iter().cloned());
            let mut participants = vec![parent.to_string()];
            participants.extend(children);
            out.push(EventOccurrence::new(next.time_index, EventKind::Split, participants).with_evidence("split condition"));
        }
    }
    out
}

fn merges(prev: &State, next: &State, cfg: &EventConfig, used: &mut BTreeSet<String>) -> Vec<EventOccurrence> {
    let mut out = Vec::new();
    let gone = flipped(prev, next);
    for result in flipped(next, prev) {
        if used.contains(result) {
            continue;
        }
        let free: Vec<&str> = gone.iter().copied().filter(|c| !used.contains(*c)).collect();
        if let Some(mut children) = decompose(result, next, &free, prev, cfg) {
            used.insert(result.to_string());
            used.extend(children.iter().cloned());
            children.push(result.to_string());
            out.push(EventOccurrence::new(next.time_index, EventKind::Merge, children).with_evidence("merge condition"));
        }
    }
    out
}

fn existential(prev: &State, next: &State, used: &BTreeSet<String>) -> Vec<EventOccurrence> {
    let one = |kind, id: &str| {
        EventOccurrence::new(next.time_index, kind, vec![id.to_string()]).with_evidence("existence flag changed")
    };
    let mut out: Vec<_> = flipped(prev, next)
        .into_iter()
        .filter(|id| !used.contains(*id))
        .map(|id| one(EventKind::Disappearance, id))
        .collect();
    out.extend(flipped(next, prev).into_iter().filter(|id| !used.contains(*id)).map(|id| one(EventKind::Appearance, id)));
    out
}

/// Appearance and disappearance for every id whose existence flipped.
pub fn detect_existential(prev: &State, next: &State) -> Vec<EventOccurrence> {
    existential(prev, next, &BTreeSet::new())
}

/// Splits of vanished objects into newly appeared ones.
pub fn detect_split(prev: &State, next: &State, cfg: &EventConfig) -> Vec<EventOccurrence> {
    splits(prev, next, cfg, &mut BTreeSet::new())
}

/// Merges of vanished objects into a newly appeared one.
pub fn detect_merge(prev: &State, next: &State, cfg: &EventConfig) -> Vec<EventOccurrence> {
    merges(prev, next, cfg, &mut BTreeSet::new())
}

/// Growth when the area grows by more than `threshold`, shrinkage when it
/// shrinks by the same factor, i.e. `prev / next > 1 + threshold`.
pub fn detect_growth_shrinkage(prev: &State, next: &State, threshold: f64) -> Vec<EventOccurrence> {
    let mut out = Vec::new();
    for id in next.present() {
        if !prev.exists(id) {
            continue;
        }
        let (Some(a), Some(b)) = (prev.geometry.get(id), next.geometry.get(id)) else { continue };
        let (before, after) = (a.unsigned_area(), b.unsigned_area());
        if before <= 0.0 || after <= 0.0 {
            continue;
        }
        let kind = if after / before > 1.0 + threshold {
            EventKind::Growth
        } else if before / after > 1.0 + threshold {
            EventKind::Shrinkage
        } else {
            continue;
        };
        out.push(
            EventOccurrence::new(next.time_index, kind, vec![id.to_string()])
                .with_evidence(format!("area {before:.6} → {after:.6}")),
        );
    }
    out
}

/// Pairs of objects existing in both states whose single relation changed.
/// Changes that skip over intermediate relations are flagged discontinuous.
pub fn detect_transitions(prev: &State, next: &State) -> Vec<EventOccurrence> {
    let ids: Vec<&str> = next.present().into_iter().filter(|id| prev.exists(id)).collect();
    let mut out = Vec::new();
    for (k, a) in ids.iter().enumerate() {
        for b in &ids[k + 1..] {
            let before = prev.network.label_by_id(a, b).and_then(RelationSet::as_single);
            let after = next.network.label_by_id(a, b).and_then(RelationSet::as_single);
            let (Some(r0), Some(r1)) = (before, after) else { continue };
            if r0 == r1 {
                continue;
            }
            let mut e = EventOccurrence::new(next.time_index, EventKind::Transition, vec![a.to_string(), b.to_string()])
                .with_evidence(format!("{r0} → {r1}"));
            e.target_relation = Some(r1);
            e.discontinuous = cnd_distance(r0, r1) > 1;
            out.push(e);
        }
    }
    out
}

/// Every event between two consecutive states. Splits and merges claim
/// their participants first; the remaining existence changes become plain
/// appearances and disappearances.
pub fn detect(prev: &State, next: &State, cfg: &EventConfig) -> Vec<EventOccurrence> {
    let mut used = BTreeSet::new();
    let mut out = splits(prev, next, cfg, &mut used);
    out.extend(merges(prev, next, cfg, &mut used));
    out.extend(existential(prev, next, &used));
    out.extend(detect_growth_shrinkage(prev, next, cfg.growth_threshold));
    out.extend(detect_transitions(prev, next));
    out
}
