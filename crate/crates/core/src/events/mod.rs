//! Event detection between consecutive qualitative states, and the
//! narrative they form.

mod detect;

use std::collections::BTreeMap;
use std::fmt;

use geo::Polygon;
use serde::{Deserialize, Serialize};

pub use detect::{
    detect, detect_existential, detect_growth_shrinkage, detect_merge, detect_split, detect_transitions, EventConfig,
};

use crate::calculus::BaseRelation;
use crate::error::Result;
use crate::qcn::{ConstraintNetwork, TimedNetwork, DEFAULT_TYPE};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum EventKind {
    Appearance,
    Disappearance,
    Split,
    Merge,
    Growth,
    Shrinkage,
    Transition,
}

impl EventKind {
    pub fn name(self) -> &'static str {
        match self {
            EventKind::Appearance => "appearance",
            EventKind::Disappearance => "disappearance",
            EventKind::Split => "split",
            EventKind::Merge => "merge",
            EventKind::Growth => "growth",
            EventKind::Shrinkage => "shrinkage",
            EventKind::Transition => "transition",
        }
    }
}

impl fmt::Display for EventKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

fn is_false(b: &bool) -> bool {
    !*b
}

/// One event and the snapshot at which its effects hold.
///
/// Participants: `[id]` for existence and size events, `[a, b]` for a
/// transition, `[parent, children..]` for a split and `[children.., result]`
/// for a merge.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct EventOccurrence {
    pub time_index: usize,
    pub kind: EventKind,
    pub participants: Vec<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub target_relation: Option<BaseRelation>,
    /// Transition whose endpoints are not neighbours; the gap is left for
    /// the abducer.
    #[serde(default, skip_serializing_if = "is_false")]
    pub discontinuous: bool,
    #[serde(default)]
    pub evidence: String,
}

impl EventOccurrence {
    pub fn new(time_index: usize, kind: EventKind, participants: Vec<String>) -> Self {
        EventOccurrence { time_index, kind, participants, target_relation: None, discontinuous: false, evidence: String::new() }
    }

    pub fn with_evidence(mut self, evidence: impl Into<String>) -> Self {
        self.evidence = evidence.into();
        self
    }

    /// Term-style rendering, e.g. `merge([rz1, rz3], rz_new)`.
    pub fn term(&self) -> String {
        let p = &self.participants;
        match self.kind {
            EventKind::Split => format!("split({}, [{}])", p[0], p[1..].join(", ")),
            EventKind::Merge => format!("merge([{}], {})", p[..p.len() - 1].join(", "), p[p.len() - 1]),
            EventKind::Transition => format!(
                "tran({}, {}, {})",
                p[0],
                p[1],
                self.target_relation.map(|r| r.name()).unwrap_or("?")
            ),
            k => format!("{}({})", k, p.join(", ")),
        }
    }
}

impl fmt::Display for EventOccurrence {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.term())?;
        if self.discontinuous {
            f.write_str(" [discontinuous]")?;
        }
        Ok(())
    }
}

/// The qualitative state at one time point, with geometry where known.
#[derive(Debug, Clone, PartialEq)]
pub struct State {
    pub time_index: usize,
    pub time: Option<String>,
    pub network: ConstraintNetwork,
    pub geometry: BTreeMap<String, Polygon<f64>>,
}

impl State {
    pub fn new(time_index: usize, network: ConstraintNetwork) -> Self {
        State { time_index, time: None, network, geometry: BTreeMap::new() }
    }

    pub fn from_timed(t: &TimedNetwork) -> Self {
        State { time_index: t.index, time: t.time.clone(), network: t.network.clone(), geometry: BTreeMap::new() }
    }

    pub fn exists(&self, id: &str) -> bool {
        self.network.index_of(id).is_some_and(|i| self.network.variable(i).exists)
    }

    /// Existing ids in variable order.
    pub fn present(&self) -> Vec<&str> {
        self.network.variables().iter().filter(|v| v.exists).map(|v| v.id.as_str()).collect()
    }

    pub fn object_type(&self, id: &str) -> Option<&str> {
        self.network.index_of(id).map(|i| self.network.variable(i).object_type.as_str())
    }
}

/// Events in time order plus the states they connect.
#[derive(Debug, Clone, PartialEq)]
pub struct Narrative {
    pub events: Vec<EventOccurrence>,
    pub states: Vec<State>,
}

/// Detects events between each consecutive pair of states.
pub fn narrate(states: Vec<State>, cfg: &EventConfig) -> Narrative {
    let mut events = Vec::new();
    for w in states.windows(2) {
        events.extend(detect(&w[0], &w[1], cfg));
    }
    Narrative { events, states }
}

impl Narrative {
    /// Object declarations followed by the events, one JSON record per line.
    pub fn to_ndjson(&self) -> String {
        let mut out = String::new();
        for (object, object_type) in self.object_types() {
            let rec = ObjectRecord { object, object_type };
            out.push_str(&serde_json::to_string(&rec).expect("records serialize"));
            out.push('\n');
        }
        out + &events_to_ndjson(&self.events)
    }

    /// Type of every object mentioned by any state. The first type other
    /// than the default wins.
    pub fn object_types(&self) -> BTreeMap<String, String> {
        let mut out: BTreeMap<String, String> = BTreeMap::new();
        for v in self.states.iter().flat_map(|s| s.network.variables()) {
            let slot = out.entry(v.id.clone()).or_insert_with(|| v.object_type.clone());
            if slot == DEFAULT_TYPE {
                *slot = v.object_type.clone();
            }
        }
        out
    }

    /// Fixed-width table: time index, instant, event.
    pub fn timeline_table(&self) -> String {
        let instants: BTreeMap<usize, &str> =
            self.states.iter().map(|s| (s.time_index, s.time.as_deref().unwrap_or("-"))).collect();
        let mut out = format!("{:<4} {:<22} {}\n", "t", "time", "event");
        for e in &self.events {
            let when = instants.get(&e.time_index).copied().unwrap_or("-");
            out.push_str(&format!("{:<4} {:<22} {}\n", e.time_index, when, e));
        }
        out
    }

    pub fn events_at(&self, t: usize) -> impl Iterator<Item = &EventOccurrence> {
        self.events.iter().filter(move |e| e.time_index == t)
    }
}

pub fn events_to_ndjson(events: &[EventOccurrence]) -> String {
    let mut out = String::new();
    for e in events {
        out.push_str(&serde_json::to_string(e).expect("events serialize"));
        out.push('\n');
    }
    out
}

#[derive(Serialize, Deserialize)]
struct ObjectRecord {
    object: String,
    #[serde(rename = "type")]
    object_type: String,
}

#[derive(Deserialize)]
#[serde(untagged)]
enum Record {
    Object(ObjectRecord),
    Event(EventOccurrence),
}

/// Reads narrative records: object declarations and events, in any order.
pub fn read_narrative(text: &str) -> Result<(Vec<EventOccurrence>, BTreeMap<String, String>)> {
    let mut events = Vec::new();
    let mut types = BTreeMap::new();
    for line in text.lines().filter(|l| !l.trim().is_empty()) {
        match serde_json::from_str(line)? {
            Record::Object(o) => {
                types.insert(o.object, o.object_type);
            }
            Record::Event(e) => events.push(e),
        }
    }
    Ok((events, types))
}

/// Events only; object declarations are skipped.
pub fn events_from_ndjson(text: &str) -> Result<Vec<EventOccurrence>> {
    Ok(read_narrative(text)?.0)
}
