//! End-to-end runs: features in, flat text artifacts out.
//!
//! Stages, each writing its artifact before the next starts:
//!
//! | stage       | artifact                               |
//! |-------------|----------------------------------------|
//! | qualify     | `qualified.txt`                        |
//! | merge       | `networks.txt`, `repairs.txt`          |
//! | narrate     | `narrative.ndjson`, `timeline.txt`     |
//! | interpolate | `interpolations.txt`                   |
//! | query       | `processes.ndjson`, `processes.txt`    |
//!
//! plus `manifest.json` with input and artifact digests and stage timings.

use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};
use std::time::Instant;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::abduce::interpolate;
use crate::calculus::{BaseRelation, RelationSet};
use crate::error::{Error, Result};
use crate::events::{narrate, EventConfig, EventKind, EventOccurrence, Narrative, State};
use crate::integrate::{check_and_merge, parse_constraints, IntegrityConstraint, MergeOptions, MergeResult};
use crate::qcn::{write_blocks, ConstraintNetwork, TimedNetwork, Variable};
use crate::qualify::{
    default_eps, parse_features, partition, qualify_timeline, snapshot_variables, PartitionPolicy, QualifyOptions,
    TimedFeature, Timeline,
};
use crate::rules::{instances_to_ndjson, match_events, parse_rules, summary_table, ProcessInstance, ProcessRule};

fn default_steps() -> usize {
    8
}

/// Event thresholds as they appear in the config file.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct EventSettings {
    pub coverage_tolerance: f64,
    pub centroid_tolerance: f64,
    pub growth_threshold: f64,
    pub same_type: bool,
}

impl Default for EventSettings {
    fn default() -> Self {
        let c = EventConfig::default();
        EventSettings {
            coverage_tolerance: c.coverage_tolerance,
            centroid_tolerance: c.centroid_tolerance,
            growth_threshold: c.growth_threshold,
            same_type: c.same_type,
        }
    }
}

impl From<EventSettings> for EventConfig {
    fn from(s: EventSettings) -> Self {
        EventConfig {
            coverage_tolerance: s.coverage_tolerance,
            centroid_tolerance: s.centroid_tolerance,
            growth_threshold: s.growth_threshold,
            same_type: s.same_type,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PipelineConfig {
    pub input: PathBuf,
    pub output: PathBuf,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub eps: Option<f64>,
    /// `gap`, `gap:<dur>` or `window:<dur>`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub partition: Option<String>,
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub source_radius: BTreeMap<String, f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub constraints: Option<PathBuf>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub rules: Option<PathBuf>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub merge_budget: Option<u32>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub max_scenarios: Option<usize>,
    /// Longest gap bridged when interpolating a discontinuous transition.
    #[serde(default = "default_steps")]
    pub interpolation_steps: usize,
    #[serde(default)]
    pub events: EventSettings,
}

impl PipelineConfig {
    pub fn new(input: impl Into<PathBuf>, output: impl Into<PathBuf>) -> Self {
        PipelineConfig {
            input: input.into(),
            output: output.into(),
            eps: None,
            partition: None,
            source_radius: BTreeMap::new(),
            constraints: None,
            rules: None,
            merge_budget: None,
            max_scenarios: None,
            interpolation_steps: default_steps(),
            events: EventSettings::default(),
        }
    }

    /// Reads a TOML config. Relative paths are taken from the config's
    /// directory.
    pub fn load(path: &Path) -> Result<Self> {
        let text = fs::read_to_string(path)?;
        let mut cfg: PipelineConfig =
            toml::from_str(&text).map_err(|e| Error::Config(format!("{}: {e}", path.display())))?;
        let base = path.parent().unwrap_or(Path::new(""));
        for p in [Some(&mut cfg.input), Some(&mut cfg.output), cfg.constraints.as_mut(), cfg.rules.as_mut()]
            .into_iter()
            .flatten()
        {
            if p.is_relative() {
                *p = base.join(&*p);
            }
        }
        Ok(cfg)
    }

    pub fn partition_policy(&self) -> Result<PartitionPolicy> {
        self.partition.as_deref().map(str::parse).transpose().map(Option::unwrap_or_default)
    }

    pub fn merge_options(&self) -> MergeOptions {
        MergeOptions { budget: self.merge_budget, max_scenarios: self.max_scenarios }
    }

    /// Checks that every referenced file exists and parses.
    fn preflight(&self) -> Result<(Vec<IntegrityConstraint>, Vec<ProcessRule>)> {
        self.partition_policy()?;
        if !self.input.is_file() {
            return Err(Error::Config(format!("input `{}` not found", self.input.display())));
        }
        let ics = match &self.constraints {
            Some(p) => parse_constraints(&read(p)?)?,
            None => Vec::new(),
        };
        let rules = match &self.rules {
            Some(p) => parse_rules(&read(p)?)?,
            None => Vec::new(),
        };
        Ok((ics, rules))
    }
}

fn read(path: &Path) -> Result<String> {
    fs::read_to_string(path).map_err(|e| Error::Config(format!("{}: {e}", path.display())))
}

pub fn sha256_hex(bytes: &[u8]) -> String {
    format!("{:x}", Sha256::digest(bytes))
}

fn stage<T>(name: &'static str, r: Result<T>) -> Result<T> {
    r.map_err(|e| Error::Stage { stage: name, source: Box::new(e) })
}

/// Partitions and qualifies features. A missing `eps` is derived once from
/// all features.
pub fn qualify_features(
    features: &[TimedFeature],
    policy: PartitionPolicy,
    eps: Option<f64>,
    source_radius: &BTreeMap<String, f64>,
) -> Result<(Timeline, Vec<TimedNetwork>)> {
    let timeline = partition(features, policy)?;
    let opts = QualifyOptions {
        eps: Some(eps.unwrap_or_else(|| default_eps(features))),
        source_radius: source_radius.clone(),
    };
    let nets = qualify_timeline(&timeline, &opts)?;
    Ok((timeline, nets))
}

/// Checks and repairs every network; returns the repaired networks and the
/// repair made at each time index that needed one.
pub fn merge_networks(
    qualified: &[TimedNetwork],
    ics: &[IntegrityConstraint],
    opts: &MergeOptions,
) -> Result<(Vec<TimedNetwork>, Vec<(usize, MergeResult)>)> {
    let mut out = Vec::new();
    let mut repairs = Vec::new();
    for q in qualified {
        let (network, repair) = check_and_merge(&q.network, ics, opts)
            .map_err(|e| Error::Inconsistent(format!("snapshot {}: {e}", q.index)))?;
        if let Some(r) = repair {
            repairs.push((q.index, r));
        }
        out.push(TimedNetwork { index: q.index, time: q.time.clone(), network });
    }
    Ok((out, repairs))
}

pub fn repairs_text(repairs: &[(usize, MergeResult)]) -> String {
    repairs.iter().map(|(t, r)| format!("t{t}: {}\n", r.report())).collect()
}

/// States pairing each network with the geometry of its objects.
pub fn build_states(timeline: &Timeline, networks: &[TimedNetwork]) -> Vec<State> {
    let snapshots: BTreeMap<usize, _> = timeline.iter().map(|s| (s.time_index, s)).collect();
    networks
        .iter()
        .map(|n| {
            let mut state = State::from_timed(n);
            if let Some(s) = snapshots.get(&n.index) {
                for (v, f) in snapshot_variables(s) {
                    if n.network.index_of(&v.id).is_some() {
                        state.geometry.insert(v.id, f.geometry.clone());
                    }
                }
            }
            state
        })
        .collect()
}

/// Minimal continuous paths bridging one discontinuous transition.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Interpolation {
    pub time_index: usize,
    pub a: String,
    pub b: String,
    pub paths: Vec<Vec<BaseRelation>>,
}

impl Interpolation {
    /// Intermediate transitions, present only when the path is unique.
    pub fn events(&self) -> Vec<EventOccurrence> {
        let [path] = self.paths.as_slice() else { return Vec::new() };
        path[1..path.len() - 1]
            .iter()
            .map(|&r| {
                let mut e = EventOccurrence::new(self.time_index, EventKind::Transition, vec![self.a.clone(), self.b.clone()])
                    .with_evidence("interpolated");
                e.target_relation = Some(r);
                e
            })
            .collect()
    }
}

fn pair_network(a: &str, b: &str, r: BaseRelation) -> ConstraintNetwork {
    let mut net = ConstraintNetwork::with_variables([Variable::new(a, "Region"), Variable::new(b, "Region")])
        .expect("distinct ids");
    net.set_label(0, 1, RelationSet::single(r));
    net
}

/// Bridges every discontinuous transition of the narrative.
pub fn interpolate_gaps(narrative: &Narrative, max_steps: usize) -> Result<Vec<Interpolation>> {
    let mut out = Vec::new();
    for e in narrative.events.iter().filter(|e| e.discontinuous) {
        let (a, b) = (&e.participants[0], &e.participants[1]);
        let before = narrative
            .states
            .iter()
            .rev()
            .find(|s| s.time_index < e.time_index)
            .and_then(|s| s.network.label_by_id(a, b))
            .and_then(RelationSet::as_single);
        let (Some(from), Some(to)) = (before, e.target_relation) else { continue };
        let found = interpolate(&pair_network(a, b, from), &pair_network(a, b, to), max_steps)?;
        let paths = found
            .iter()
            .map(|p| p.iter().map(|n| n.label(0, 1).as_single().expect("scenario")).collect())
            .collect();
        out.push(Interpolation { time_index: e.time_index, a: a.clone(), b: b.clone(), paths });
    }
    Ok(out)
}

pub fn interpolations_text(items: &[Interpolation]) -> String {
    let mut out = String::new();
    for i in items {
        for p in &i.paths {
            let steps: Vec<String> = p.iter().map(ToString::to_string).collect();
            out.push_str(&format!("t{} {} ; {} : {}\n", i.time_index, i.a, i.b, steps.join(" → ")));
        }
    }
    out
}

/// Detected events plus the unambiguous interpolated ones, in time order.
pub fn completed_events(narrative: &Narrative, interpolations: &[Interpolation]) -> Vec<EventOccurrence> {
    let mut events = narrative.events.clone();
    for i in interpolations {
        events.extend(i.events());
    }
    // stable: detected events keep their order within a time index
    events.sort_by_key(|e| e.time_index);
    events
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StageTiming {
    pub stage: String,
    pub millis: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunManifest {
    pub inputs: BTreeMap<String, String>,
    pub config: PipelineConfig,
    pub stages: Vec<StageTiming>,
    pub artifacts: BTreeMap<String, String>,
}

/// Everything a run produced, kept in memory as well as on disk.
#[derive(Debug, Clone)]
pub struct RunOutput {
    pub manifest: RunManifest,
    pub networks: Vec<TimedNetwork>,
    pub narrative: Narrative,
    pub interpolations: Vec<Interpolation>,
    pub processes: Vec<ProcessInstance>,
}

struct Recorder {
    dir: PathBuf,
    manifest: RunManifest,
    clock: Instant,
}

impl Recorder {
    fn write(&mut self, name: &str, text: &str) -> Result<()> {
        fs::write(self.dir.join(name), text)?;
        self.manifest.artifacts.insert(name.to_string(), sha256_hex(text.as_bytes()));
        Ok(())
    }

    fn lap(&mut self, stage: &str) {
        let millis = self.clock.elapsed().as_secs_f64() * 1e3;
        self.manifest.stages.push(StageTiming { stage: stage.to_string(), millis });
        self.clock = Instant::now();
    }

    fn finish(&mut self) -> Result<()> {
        let text = serde_json::to_string_pretty(&self.manifest)? + "\n";
        fs::write(self.dir.join("manifest.json"), text)?;
        Ok(())
    }
}

/// Runs every stage. On failure the artifacts of completed stages and a
/// manifest covering them stay on disk.
pub fn run_pipeline(cfg: &PipelineConfig) -> Result<RunOutput> {
    let (ics, rules) = stage("config", cfg.preflight())?;
    fs::create_dir_all(&cfg.output)?;
    let mut inputs = BTreeMap::new();
    for p in [Some(&cfg.input), cfg.constraints.as_ref(), cfg.rules.as_ref()].into_iter().flatten() {
        inputs.insert(p.display().to_string(), sha256_hex(&fs::read(p)?));
    }
    let mut rec = Recorder {
        dir: cfg.output.clone(),
        manifest: RunManifest { inputs, config: cfg.clone(), stages: Vec::new(), artifacts: BTreeMap::new() },
        clock: Instant::now(),
    };
    let result = run_stages(cfg, &ics, &rules, &mut rec);
    rec.finish()?;
    let (networks, narrative, interpolations, processes) = result?;
    Ok(RunOutput { manifest: rec.manifest, networks, narrative, interpolations, processes })
}

type Stages = (Vec<TimedNetwork>, Narrative, Vec<Interpolation>, Vec<ProcessInstance>);

fn run_stages(
    cfg: &PipelineConfig,
    ics: &[IntegrityConstraint],
    rules: &[ProcessRule],
    rec: &mut Recorder,
) -> Result<Stages> {
    let features = stage("ingest", read(&cfg.input).and_then(|t| parse_features(&t)))?;
    let policy = cfg.partition_policy()?;
    let (timeline, qualified) = stage("qualify", qualify_features(&features, policy, cfg.eps, &cfg.source_radius))?;
    rec.write("qualified.txt", &write_blocks(&qualified))?;
    rec.lap("qualify");

    let (networks, repairs) = stage("merge", merge_networks(&qualified, ics, &cfg.merge_options()))?;
    rec.write("networks.txt", &write_blocks(&networks))?;
    rec.write("repairs.txt", &repairs_text(&repairs))?;
    rec.lap("merge");

    let narrative = narrate(build_states(&timeline, &networks), &cfg.events.into());
    rec.write("narrative.ndjson", &narrative.to_ndjson())?;
    rec.write("timeline.txt", &narrative.timeline_table())?;
    rec.lap("narrate");

    let interpolations = stage("interpolate", interpolate_gaps(&narrative, cfg.interpolation_steps))?;
    rec.write("interpolations.txt", &interpolations_text(&interpolations))?;
    rec.lap("interpolate");

    let events = completed_events(&narrative, &interpolations);
    let processes = stage("query", match_events(&events, rules, &narrative.object_types()))?;
    rec.write("processes.ndjson", &instances_to_ndjson(&processes))?;
    rec.write("processes.txt", &summary_table(&processes))?;
    rec.lap("query");
    Ok((networks, narrative, interpolations, processes))
}
