//! Process recognition: declarative patterns over the events of a
//! narrative, such as deforestation or encroachment.
//!
//! A rule file is a JSON list of entries like
//!
//! ```json
//! {
//!   "name": "rural_expansion",
//!   "bindings": [{"var": "parts", "type": "RuralZone", "list": true},
//!                {"var": "whole", "type": "RuralZone"}],
//!   "pattern": [{"kind": "merge", "vars": ["parts", "whole"]}],
//!   "interval": "span"
//! }
//! ```
//!
//! `kind` may list several kinds, matched as alternatives. `target_relations`
//! accepts RCC-8 tags plus `overlap` (po), `inside` (tpp, ntpp) and
//! `contains` (tppi, ntppi). `temporal` relates an atom to another by
//! position: `{"before": 1}`, `{"after": 0}` or `{"distinct": 2}`.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::calculus::{BaseRelation, RelationSet};
use crate::error::{Error, Result};
use crate::events::{EventKind, EventOccurrence, Narrative};

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum OneOrMany<T> {
    One(T),
    Many(Vec<T>),
}

impl<T: Clone> OneOrMany<T> {
    pub fn to_vec(&self) -> Vec<T> {
        match self {
            OneOrMany::One(x) => vec![x.clone()],
            OneOrMany::Many(v) => v.clone(),
        }
    }
}

impl<T> Default for OneOrMany<T> {
    fn default() -> Self {
        OneOrMany::Many(Vec::new())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Binding {
    pub var: String,
    #[serde(rename = "type")]
    pub object_type: String,
    /// Binds a group of objects, as the merged parts or split pieces.
    #[serde(default, skip_serializing_if = "std::ops::Not::not")]
    pub list: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Temporal {
    /// Strictly earlier than the referenced atom's event.
    Before(usize),
    /// Strictly later than the referenced atom's event.
    After(usize),
    /// At a different time index than the referenced atom's event.
    Distinct(usize),
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct EventAtom {
    pub kind: OneOrMany<EventKind>,
    pub vars: Vec<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub target_relations: Option<Vec<String>>,
    #[serde(default)]
    pub temporal: OneOrMany<Temporal>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum IntervalPolicy {
    /// From the earliest to the latest supporting event.
    #[default]
    Span,
    /// A fixed `[t, t']`; only events during it are considered.
    Window([usize; 2]),
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ProcessRule {
    pub name: String,
    pub bindings: Vec<Binding>,
    pub pattern: Vec<EventAtom>,
    #[serde(default)]
    pub interval: IntervalPolicy,
}

/// Value of one rule variable.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Bound {
    One(String),
    Many(Vec<String>),
}

impl fmt::Display for Bound {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Bound::One(id) => f.write_str(id),
            Bound::Many(ids) => write!(f, "[{}]", ids.join(", ")),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ProcessInstance {
    pub rule: String,
    /// Variables in declaration order.
    pub binding: Vec<(String, Bound)>,
    pub interval: (usize, usize),
    pub supporting: Vec<EventOccurrence>,
}

impl fmt::Display for ProcessInstance {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let vars: Vec<String> = self.binding.iter().map(|(v, b)| format!("{v}={b}")).collect();
        write!(f, "{}({}) during [{}, {}]", self.rule, vars.join(", "), self.interval.0, self.interval.1)
    }
}

pub fn during(t: usize, (start, end): (usize, usize)) -> bool {
    start <= t && t <= end
}

pub fn before(a: usize, b: usize) -> bool {
    a < b
}

/// Relation vocabulary accepted in rule files.
pub fn relation_names(name: &str) -> Result<RelationSet> {
    use BaseRelation::*;
    Ok(match name {
        "overlap" => RelationSet::single(Po),
        "inside" => RelationSet::of(&[Tpp, Ntpp]),
        "contains" => RelationSet::of(&[Tppi, Ntppi]),
        _ => RelationSet::single(
            BaseRelation::from_str(name).map_err(|_| Error::Config(format!("unknown relation `{name}`")))?,
        ),
    })
}

pub fn parse_rules(text: &str) -> Result<Vec<ProcessRule>> {
    serde_json::from_str(text).map_err(|e| Error::Config(format!("rule file: {e}")))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Shape {
    Single,
    Pair,
    Merge,
    Split,
}

fn shape(kind: EventKind) -> Shape {
    match kind {
        EventKind::Transition => Shape::Pair,
        EventKind::Merge => Shape::Merge,
        EventKind::Split => Shape::Split,
        _ => Shape::Single,
    }
}

struct Atom {
    kinds: Vec<EventKind>,
    shape: Shape,
    vars: Vec<usize>,
    targets: Option<RelationSet>,
    temporal: Vec<Temporal>,
}

struct Compiled<'a> {
    rule: &'a ProcessRule,
    atoms: Vec<Atom>,
}

impl<'a> Compiled<'a> {
    fn new(rule: &'a ProcessRule, known: &BTreeSet<&str>) -> Result<Self> {
        let bad = |msg: String| Error::Config(format!("rule `{}`: {msg}", rule.name));
        if rule.pattern.is_empty() {
            return Err(bad("empty pattern".into()));
        }
        for (k, b) in rule.bindings.iter().enumerate() {
            if !known.contains(b.object_type.as_str()) {
                return Err(bad(format!("unknown object type `{}`", b.object_type)));
            }
            if rule.bindings[..k].iter().any(|o| o.var == b.var) {
                return Err(bad(format!("variable `{}` declared twice", b.var)));
            }
        }
        let mut used = BTreeSet::new();
        let mut atoms = Vec::new();
        for (k, a) in rule.pattern.iter().enumerate() {
            let kinds = a.kind.to_vec();
            let Some(&first) = kinds.first() else {
                return Err(bad(format!("atom {k} has no kind")));
            };
            let sh = shape(first);
            if kinds.iter().any(|&x| shape(x) != sh) {
                return Err(bad(format!("atom {k} mixes kinds with different participants")));
            }
            let mut vars = Vec::new();
            for v in &a.vars {
                let i = rule.bindings.iter().position(|b| &b.var == v).ok_or_else(|| bad(format!("undeclared `{v}`")))?;
                used.insert(i);
                vars.push(i);
            }
            let lists: Vec<bool> = vars.iter().map(|&i| rule.bindings[i].list).collect();
            let expected: &[bool] = match sh {
                Shape::Single => &[false],
                Shape::Pair => &[false, false],
                Shape::Merge => &[true, false],
                Shape::Split => &[false, true],
            };
            if lists != expected {
                return Err(bad(format!("atom {k}: variables do not fit `{first}`")));
            }
            let targets = match &a.target_relations {
                None => None,
                Some(_) if sh != Shape::Pair => return Err(bad(format!("atom {k}: target relations need a transition"))),
                Some(names) => {
                    let mut set = RelationSet::EMPTY;
                    for n in names {
                        set = set.union(relation_names(n)?);
                    }
                    Some(set)
                }
            };
            let temporal = a.temporal.to_vec();
            for t in &temporal {
                let (Temporal::Before(o) | Temporal::After(o) | Temporal::Distinct(o)) = *t;
                if o >= rule.pattern.len() || o == k {
                    return Err(bad(format!("atom {k}: temporal reference {o} out of range")));
                }
            }
            atoms.push(Atom { kinds, shape: sh, vars, targets, temporal });
        }
        if let Some(b) = (0..rule.bindings.len()).find(|i| !used.contains(i)) {
            return Err(bad(format!("`{}` is not used by the pattern", rule.bindings[b].var)));
        }
        Ok(Compiled { rule, atoms })
    }
}

struct Matcher<'a> {
    c: &'a Compiled<'a>,
    events: Vec<&'a EventOccurrence>,
    types: &'a BTreeMap<String, String>,
    slots: Vec<Option<Bound>>,
    chosen: Vec<usize>,
    found: BTreeMap<Vec<Bound>, BTreeSet<usize>>,
}

impl Matcher<'_> {
    fn typed(&self, var: usize, id: &str) -> bool {
        self.types.get(id).is_some_and(|t| *t == self.c.rule.bindings[var].object_type)
    }

    /// Binds `var` to `value`, or checks an existing binding. Returns whether
    /// the slot was newly filled.
    fn unify(&mut self, var: usize, value: Bound) -> Option<bool> {
        match &self.slots[var] {
            Some(v) => (*v == value).then_some(false),
            None => {
                let ok = match &value {
                    Bound::One(id) => self.typed(var, id),
                    Bound::Many(ids) => ids.iter().all(|id| self.typed(var, id)),
                };
                ok.then(|| {
                    self.slots[var] = Some(value);
                    true
                })
            }
        }
    }

    fn temporal_ok(&self, k: usize, t: usize) -> bool {
        let time = |o: usize| self.chosen.get(o).map(|&e| self.events[e].time_index);
        let own = self.c.atoms[k].temporal.iter().all(|&op| match op {
            Temporal::Before(o) => time(o).is_none_or(|u| before(t, u)),
            Temporal::After(o) => time(o).is_none_or(|u| before(u, t)),
            Temporal::Distinct(o) => time(o).is_none_or(|u| u != t),
        });
        // constraints that earlier atoms placed on this one
        let theirs = (0..k).all(|o| {
            let u = self.events[self.chosen[o]].time_index;
            self.c.atoms[o].temporal.iter().all(|&op| match op {
                Temporal::Before(x) if x == k => before(u, t),
                Temporal::After(x) if x == k => before(t, u),
                Temporal::Distinct(x) if x == k => u != t,
                _ => true,
            })
        });
        own && theirs
    }

    /// Ways the event's participants can fill the atom's variables.
    fn readings(atom: &Atom, e: &EventOccurrence) -> Vec<Vec<Bound>> {
        let p = &e.participants;
        let one = |s: &String| Bound::One(s.clone());
        let many = |s: &[String]| {
            let mut v = s.to_vec();
            v.sort();
            Bound::Many(v)
        };
        match atom.shape {
            Shape::Single if p.len() == 1 => vec![vec![one(&p[0])]],
            Shape::Pair if p.len() == 2 => {
                let Some(r) = e.target_relation else { return Vec::new() };
                let mut out = Vec::new();
                for (a, b, rel) in [(&p[0], &p[1], r), (&p[1], &p[0], r.converse())] {
                    if atom.targets.is_none_or(|t| t.contains(rel)) {
                        out.push(vec![one(a), one(b)]);
                    }
                }
                out
            }
            Shape::Merge if p.len() >= 3 => vec![vec![many(&p[..p.len() - 1]), one(&p[p.len() - 1])]],
            Shape::Split if p.len() >= 3 => vec![vec![one(&p[0]), many(&p[1..])]],
            _ => Vec::new(),
        }
    }

    fn search(&mut self, k: usize) {
        if k == self.c.atoms.len() {
            let key: Vec<Bound> = self.slots.iter().map(|s| s.clone().expect("all variables used")).collect();
            self.found.entry(key).or_default().extend(self.chosen.iter().copied());
            return;
        }
        let c = self.c;
        let atom = &c.atoms[k];
        for idx in 0..self.events.len() {
            let e = self.events[idx];
            if !atom.kinds.contains(&e.kind) || !self.temporal_ok(k, e.time_index) {
                continue;
            }
            for reading in Self::readings(atom, e) {
                let mut filled = Vec::new();
                let mut ok = true;
                for (&var, value) in atom.vars.iter().zip(reading) {
                    match self.unify(var, value) {
                        Some(true) => filled.push(var),
                        Some(false) => {}
                        None => {
                            ok = false;
                            break;
                        }
                    }
                }
                if ok {
                    self.chosen.push(idx);
                    self.search(k + 1);
                    self.chosen.pop();
                }
                for var in filled {
                    self.slots[var] = None;
                }
            }
        }
    }
}

/// Every binding that satisfies a rule, in rule order and then binding
/// order. Each instance carries all events that support that binding.
pub fn match_events(
    events: &[EventOccurrence],
    rules: &[ProcessRule],
    types: &BTreeMap<String, String>,
) -> Result<Vec<ProcessInstance>> {
    let known: BTreeSet<&str> = types.values().map(String::as_str).collect();
    let compiled = rules.iter().map(|r| Compiled::new(r, &known)).collect::<Result<Vec<_>>>()?;
    let mut out = Vec::new();
    for c in &compiled {
        let window = match c.rule.interval {
            IntervalPolicy::Span => None,
            IntervalPolicy::Window([a, b]) if a <= b => Some((a, b)),
            IntervalPolicy::Window(_) => {
                return Err(Error::Config(format!("rule `{}`: window ends before it starts", c.rule.name)));
            }
        };
        let in_scope = events.iter().filter(|e| window.is_none_or(|w| during(e.time_index, w))).collect();
        let mut m = Matcher {
            c,
            events: in_scope,
            types,
            slots: vec![None; c.rule.bindings.len()],
            chosen: Vec::new(),
            found: BTreeMap::new(),
        };
        m.search(0);
        for (key, support) in m.found {
            let supporting: Vec<EventOccurrence> = support.iter().map(|&i| m.events[i].clone()).collect();
            let times = supporting.iter().map(|e| e.time_index);
            let interval = window.unwrap_or((times.clone().min().unwrap_or(0), times.max().unwrap_or(0)));
            let binding = c.rule.bindings.iter().map(|b| b.var.clone()).zip(key).collect();
            out.push(ProcessInstance { rule: c.rule.name.clone(), binding, interval, supporting });
        }
    }
    Ok(out)
}

pub fn match_rules(narrative: &Narrative, rules: &[ProcessRule]) -> Result<Vec<ProcessInstance>> {
    match_events(&narrative.events, rules, &narrative.object_types())
}

pub fn instances_to_ndjson(instances: &[ProcessInstance]) -> String {
    let mut out = String::new();
    for i in instances {
        let binding: serde_json::Map<String, serde_json::Value> = i
            .binding
            .iter()
            .map(|(v, b)| (v.clone(), serde_json::to_value(b).expect("bindings serialize")))
            .collect();
        let rec = serde_json::json!({
            "rule": i.rule,
            "binding": binding,
            "interval": [i.interval.0, i.interval.1],
            "supporting": i.supporting.iter().map(EventOccurrence::term).collect::<Vec<_>>(),
        });
        out.push_str(&rec.to_string());
        out.push('\n');
    }
    out
}

pub fn summary_table(instances: &[ProcessInstance]) -> String {
    let mut out = format!("{:<24} {:<10} {}\n", "process", "interval", "binding / events");
    for i in instances {
        let vars: Vec<String> = i.binding.iter().map(|(v, b)| format!("{v}={b}")).collect();
        let terms: Vec<String> = i.supporting.iter().map(EventOccurrence::term).collect();
        let span = format!("[{}, {}]", i.interval.0, i.interval.1);
        out.push_str(&format!("{:<24} {:<10} {} : {}\n", i.rule, span, vars.join(" "), terms.join("; ")));
    }
    out
}
