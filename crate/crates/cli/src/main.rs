use std::collections::{BTreeMap, BTreeSet};
use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use geonarrate::abduce::{explain, AbduceOptions};
use geonarrate::events::{narrate, read_narrative, EventConfig, EventKind};
use geonarrate::integrate::{parse_constraints, IntegrityConstraint, MergeOptions};
use geonarrate::pipeline::{
    build_states, merge_networks, qualify_features, repairs_text, run_pipeline, PipelineConfig,
};
use geonarrate::qcn::{diagnose, parse_blocks, write_blocks, TimedNetwork};
use geonarrate::qualify::{parse_features, PartitionPolicy};
use geonarrate::rules::{instances_to_ndjson, match_events, parse_rules, summary_table};
use geonarrate::{Error, Result};

#[derive(Parser)]
#[command(name = "geonarrate", version, about = "Qualitative narratives from timestamped polygon data")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Partition features into snapshots and qualify every pair.
    Qualify {
        /// Newline-delimited GeoJSON features.
        features: PathBuf,
        #[command(flatten)]
        q: QualifyArgs,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Report whether each network block is consistent.
    Check { networks: PathBuf },
    /// Repair networks against integrity constraints.
    Merge {
        networks: PathBuf,
        #[command(flatten)]
        m: MergeArgs,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Detect events between consecutive snapshots.
    Narrate {
        features: PathBuf,
        /// Use these (merged) networks instead of qualifying again.
        #[arg(long)]
        networks: Option<PathBuf>,
        #[command(flatten)]
        q: QualifyArgs,
        #[command(flatten)]
        m: MergeArgs,
        /// Also write the timeline table here.
        #[arg(long)]
        timeline: Option<PathBuf>,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Search minimal event sequences explaining a series of observations.
    Explain {
        #[arg(long)]
        observations: PathBuf,
        /// Comma-separated event kinds.
        #[arg(long, value_delimiter = ',', default_value = "appearance,disappearance,split,merge,transition")]
        abducibles: Vec<String>,
        /// Maximum number of expanded search nodes.
        #[arg(long, default_value_t = 1_000_000)]
        budget: u64,
        #[arg(long, default_value_t = 32)]
        max_explanations: usize,
        /// Print NDJSON records instead of text.
        #[arg(long)]
        json: bool,
    },
    /// Match process rules against a narrative.
    Query {
        #[arg(long)]
        rules: PathBuf,
        #[arg(long)]
        narrative: PathBuf,
        /// Write instances as NDJSON here; the table goes to stdout.
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Run every stage from a TOML config.
    Run {
        config: PathBuf,
        /// Override the configured output directory.
        #[arg(long)]
        output: Option<PathBuf>,
    },
}

#[derive(Args)]
struct QualifyArgs {
    /// Contact tolerance in coordinate units.
    #[arg(long)]
    eps: Option<f64>,
    /// gap, gap:<dur> or window:<dur>.
    #[arg(long, default_value = "gap")]
    partition: PartitionPolicy,
    /// Positional error per source, as source=radius.
    #[arg(long = "source-radius", value_parser = parse_radius)]
    source_radius: Vec<(String, f64)>,
}

#[derive(Args)]
struct MergeArgs {
    /// Integrity constraints (JSON).
    #[arg(long)]
    constraints: Option<PathBuf>,
    /// Largest repair distance tried.
    #[arg(long = "merge-budget")]
    merge_budget: Option<u32>,
    #[arg(long)]
    max_scenarios: Option<usize>,
}

fn parse_radius(s: &str) -> std::result::Result<(String, f64), String> {
    let (k, v) = s.split_once('=').ok_or("expected source=radius")?;
    Ok((k.to_string(), v.parse().map_err(|e| format!("{v}: {e}"))?))
}

fn read(path: &Path) -> Result<String> {
    fs::read_to_string(path).map_err(|e| Error::Config(format!("{}: {e}", path.display())))
}

fn emit(output: Option<&Path>, text: &str) -> Result<()> {
    match output {
        Some(p) => Ok(fs::write(p, text)?),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

impl MergeArgs {
    fn constraints(&self) -> Result<Vec<IntegrityConstraint>> {
        self.constraints.as_deref().map(|p| parse_constraints(&read(p)?)).transpose().map(Option::unwrap_or_default)
    }

    fn options(&self) -> MergeOptions {
        MergeOptions { budget: self.merge_budget, max_scenarios: self.max_scenarios }
    }
}

fn qualify(features: &Path, q: &QualifyArgs) -> Result<(geonarrate::qualify::Timeline, Vec<TimedNetwork>)> {
    let fs = parse_features(&read(features)?)?;
    let radius: BTreeMap<String, f64> = q.source_radius.iter().cloned().collect();
    qualify_features(&fs, q.partition, q.eps, &radius)
}

fn abducibles(names: &[String]) -> Result<BTreeSet<EventKind>> {
    names
        .iter()
        .map(|n| {
            let kind = match n.trim() {
                "appearance" => EventKind::Appearance,
                "disappearance" => EventKind::Disappearance,
                "split" => EventKind::Split,
                "merge" => EventKind::Merge,
                "transition" | "tran" => EventKind::Transition,
                other => return Err(Error::Config(format!("`{other}` is not an abducible event kind"))),
            };
            Ok(kind)
        })
        .collect()
}

fn run(cli: Cli) -> Result<ExitCode> {
    match cli.command {
        Command::Qualify { features, q, output } => {
            let (_, nets) = qualify(&features, &q)?;
            emit(output.as_deref(), &write_blocks(&nets))?;
        }
        Command::Check { networks } => {
            let blocks = parse_blocks(&read(&networks)?)?;
            let mut bad = false;
            for b in &blocks {
                match diagnose(&b.network) {
                    None => println!("t{}: consistent", b.index),
                    Some(d) => {
                        bad = true;
                        println!("t{}: inconsistent", b.index);
                        if let Some(c) = d.conflict {
                            println!("  closure: {c}");
                        }
                        for c in d.core {
                            println!("  core: {c}");
                        }
                    }
                }
            }
            if bad {
                return Ok(ExitCode::from(1));
            }
        }
        Command::Merge { networks, m, output } => {
            let blocks = parse_blocks(&read(&networks)?)?;
            let (merged, repairs) = merge_networks(&blocks, &m.constraints()?, &m.options())?;
            emit(output.as_deref(), &write_blocks(&merged))?;
            eprint!("{}", repairs_text(&repairs));
        }
        Command::Narrate { features, networks, q, m, timeline, output } => {
            let (snapshots, qualified) = qualify(&features, &q)?;
            let nets = match networks {
                Some(p) => parse_blocks(&read(&p)?)?,
                None => merge_networks(&qualified, &m.constraints()?, &m.options())?.0,
            };
            let narrative = narrate(build_states(&snapshots, &nets), &EventConfig::default());
            if let Some(p) = timeline {
                fs::write(p, narrative.timeline_table())?;
            }
            emit(output.as_deref(), &narrative.to_ndjson())?;
        }
        Command::Explain { observations, abducibles: names, budget, max_explanations, json } => {
            let obs = parse_blocks(&read(&observations)?)?;
            let opts = AbduceOptions { abducibles: abducibles(&names)?, budget, max_explanations };
            let found = explain(&obs, &opts)?;
            for (k, ex) in found.iter().enumerate() {
                if json {
                    print!("{}", ex.to_ndjson());
                } else {
                    if k > 0 {
                        println!();
                    }
                    print!("{ex}");
                }
            }
        }
        Command::Query { rules, narrative, output } => {
            let rules = parse_rules(&read(&rules)?)?;
            let (events, types) = read_narrative(&read(&narrative)?)?;
            let found = match_events(&events, &rules, &types)?;
            if let Some(p) = output {
                fs::write(p, instances_to_ndjson(&found))?;
            }
            print!("{}", summary_table(&found));
        }
        Command::Run { config, output } => {
            let mut cfg = PipelineConfig::load(&config)?;
            if let Some(o) = output {
                cfg.output = o;
            }
            let out = run_pipeline(&cfg)?;
            for (name, digest) in &out.manifest.artifacts {
                println!("{:<20} {}", name, &digest[..16]);
            }
            print!("{}", summary_table(&out.processes));
        }
    }
    Ok(ExitCode::SUCCESS)
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("geonarrate: error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
