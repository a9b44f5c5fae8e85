//! Temporal partitioning and qualitative abstraction of polygon data.

mod feature;
mod partition;
mod relate;

use std::collections::BTreeMap;

pub use feature::{parse_features, parse_timestamp, validate_polygon, write_features, TimedFeature, MIN_AREA};
pub use partition::{default_gap, partition, PartitionPolicy, Snapshot, Timeline};
pub use relate::{decide, qualify_pair, qualify_pair_uncertain, size_relation, Region};

use geo::{BoundingRect, Rect};

use crate::error::Result;
use crate::qcn::{ConstraintNetwork, TimedNetwork, Variable};

/// Relative tolerance used when `eps` is not given.
pub const EPS_FACTOR: f64 = 1e-6;

#[derive(Debug, Clone, Default, PartialEq)]
pub struct QualifyOptions {
    /// Absolute contact tolerance; derived from the data extent when `None`.
    pub eps: Option<f64>,
    /// Positional error radius per source id. A pair uses the sum of its
    /// two sources' radii.
    pub source_radius: BTreeMap<String, f64>,
}

/// `EPS_FACTOR` times the diagonal of the features' joint bounding box.
pub fn default_eps<'a>(features: impl IntoIterator<Item = &'a TimedFeature>) -> f64 {
    let mut bbox: Option<Rect<f64>> = None;
    for f in features {
        if let Some(r) = f.geometry.bounding_rect() {
            bbox = Some(match bbox {
                None => r,
                Some(b) => Rect::new(
                    (b.min().x.min(r.min().x), b.min().y.min(r.min().y)),
                    (b.max().x.max(r.max().x), b.max().y.max(r.max().y)),
                ),
            });
        }
    }
    bbox.map(|b| EPS_FACTOR * b.width().hypot(b.height())).unwrap_or(0.0)
}

/// One network variable per distinct (object, source) in the snapshot.
///
/// If a source reports an object more than once, its latest report wins.
/// The first source (in input order) keeps the object id; further sources
/// become `id'`, `id''`, ... marked co-referent with `id`.
pub fn snapshot_variables(s: &Snapshot) -> Vec<(Variable, &TimedFeature)> {
    let mut order: Vec<&str> = Vec::new();
    let mut per_object: BTreeMap<&str, Vec<&TimedFeature>> = BTreeMap::new();
    for f in &s.features {
        let entry = per_object.entry(&f.object_id).or_default();
        if entry.is_empty() {
            order.push(&f.object_id);
        }
        match entry.iter_mut().find(|g| g.source_id == f.source_id) {
            Some(g) if g.timestamp <= f.timestamp => *g = f,
            Some(_) => {}
            None => entry.push(f),
        }
    }
    let mut out = Vec::new();
    for id in order {
        for (k, f) in per_object[id].iter().enumerate() {
            let mut v = Variable::new(format!("{id}{}", "'".repeat(k)), per_object[id][0].object_type.clone());
            if k > 0 {
                v.coref = Some(id.to_string());
            }
            out.push((v, *f));
        }
    }
    out
}

/// Qualifies every pair of variables in the snapshot.
pub fn qualify_snapshot(s: &Snapshot, opts: &QualifyOptions) -> Result<ConstraintNetwork> {
    let eps = opts.eps.unwrap_or_else(|| default_eps(&s.features));
    let vars = snapshot_variables(s);
    let mut regions = Vec::with_capacity(vars.len());
    let mut radii = Vec::with_capacity(vars.len());
    for (v, f) in &vars {
        let poly = validate_polygon(&v.id, f.geometry.clone())?;
        regions.push(Region::new(&poly));
        radii.push(opts.source_radius.get(&f.source_id).copied().unwrap_or(0.0));
    }
    let mut net = ConstraintNetwork::with_variables(vars.into_iter().map(|(v, _)| v))?;
    for i in 0..regions.len() {
        for j in i + 1..regions.len() {
            let label = qualify_pair_uncertain(&regions[i], &regions[j], eps, radii[i] + radii[j]);
            net.set_label(i, j, label);
        }
    }
    Ok(net)
}

/// Qualifies each snapshot. A missing `eps` is derived once from all
/// features so every snapshot uses the same tolerance.
pub fn qualify_timeline(timeline: &Timeline, opts: &QualifyOptions) -> Result<Vec<TimedNetwork>> {
    let mut opts = opts.clone();
    if opts.eps.is_none() {
        opts.eps = Some(default_eps(timeline.iter().flat_map(|s| &s.features)));
    }
    timeline
        .iter()
        .map(|s| {
            Ok(TimedNetwork {
                index: s.time_index,
                time: Some(s.instant.to_rfc3339_opts(chrono::SecondsFormat::Secs, true)),
                network: qualify_snapshot(s, &opts)?,
            })
        })
        .collect()
}
