//! Line-oriented network format.
//!
//! ```text
//! @time 2 2013-03-01T00:00:00Z
//! @object Deira District
//! @object p' Park coref=p
//! @object mg2 Mangrove absent
//! BurDubai ; Deira ; {ec}
//! ```
//!
//! `@time` starts a new block and is optional for single networks.
//! Undeclared ids are created on first use with [`DEFAULT_TYPE`]. Pair lines
//! are written with the lexicographically smaller id first and sorted;
//! repeated pair lines intersect.

use std::fmt::Write as _;

use super::network::{ConstraintNetwork, Variable, DEFAULT_TYPE};
use crate::calculus::RelationSet;
use crate::error::{Error, Result};

/// A network tagged with its position in a sequence of snapshots.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TimedNetwork {
    pub index: usize,
    pub time: Option<String>,
    pub network: ConstraintNetwork,
}

fn valid_id(id: &str) -> bool {
    !id.is_empty() && !id.starts_with('@') && !id.contains([';', '{', '}', ',']) && !id.contains(char::is_whitespace)
}

fn parse_err(line_no: usize, msg: impl std::fmt::Display) -> Error {
    Error::Parse(format!("line {line_no}: {msg}"))
}

fn parse_object(net: &mut ConstraintNetwork, rest: &str, line_no: usize) -> Result<()> {
    let mut toks = rest.split_whitespace();
    let id = toks.next().ok_or_else(|| parse_err(line_no, "@object needs an id"))?;
    if !valid_id(id) {
        return Err(parse_err(line_no, format!("invalid id `{id}`")));
    }
    let mut var = Variable::new(id, DEFAULT_TYPE);
    let mut typed = false;
    for tok in toks {
        if tok == "absent" {
            var.exists = false;
        } else if let Some(c) = tok.strip_prefix("coref=") {
            var.coref = Some(c.to_string());
        } else if !typed {
            var.object_type = tok.to_string();
            typed = true;
        } else {
            return Err(parse_err(line_no, format!("unexpected token `{tok}`")));
        }
    }
    match net.index_of(id) {
        Some(i) => {
            *net.variable_mut(i) = var;
        }
        None => {
            net.add_variable(var).map_err(|e| parse_err(line_no, e))?;
        }
    }
    Ok(())
}

fn parse_pair(net: &mut ConstraintNetwork, line: &str, line_no: usize) -> Result<()> {
    let parts: Vec<&str> = line.split(';').map(str::trim).collect();
    if parts.len() != 3 {
        return Err(parse_err(line_no, "expected `idA ; idB ; {rel,...}`"));
    }
    for id in &parts[..2] {
        if !valid_id(id) {
            return Err(parse_err(line_no, format!("invalid id `{id}`")));
        }
    }
    if parts[0] == parts[1] {
        return Err(parse_err(line_no, "self-pair"));
    }
    let label: RelationSet = parts[2].parse().map_err(|e| parse_err(line_no, e))?;
    let i = net.ensure_variable(parts[0]);
    let j = net.ensure_variable(parts[1]);
    net.constrain(i, j, label);
    Ok(())
}

/// Parses one or more `@time` blocks. Text without a `@time` header is a
/// single block with index 0.
pub fn parse_blocks(text: &str) -> Result<Vec<TimedNetwork>> {
    let mut blocks: Vec<TimedNetwork> = Vec::new();
    for (n, raw) in text.lines().enumerate() {
        let line_no = n + 1;
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        if let Some(rest) = line.strip_prefix("@time") {
            let mut toks = rest.split_whitespace();
            let index = match toks.next() {
                Some(t) => t.parse().map_err(|_| parse_err(line_no, format!("bad time index `{t}`")))?,
                None => blocks.len(),
            };
            let time = toks.next().map(str::to_string);
            blocks.push(TimedNetwork { index, time, network: ConstraintNetwork::new() });
            continue;
        }
        if blocks.is_empty() {
            blocks.push(TimedNetwork { index: 0, time: None, network: ConstraintNetwork::new() });
        }
        let net = &mut blocks.last_mut().expect("pushed above").network;
        if let Some(rest) = line.strip_prefix("@object") {
            parse_object(net, rest, line_no)?;
        } else if line.starts_with('@') {
            return Err(parse_err(line_no, format!("unknown directive `{line}`")));
        } else {
            parse_pair(net, line, line_no)?;
        }
    }
    Ok(blocks)
}

/// Parses a single network; an empty text gives the empty network.
pub fn parse_network(text: &str) -> Result<ConstraintNetwork> {
    let mut blocks = parse_blocks(text)?;
    match blocks.len() {
        0 => Ok(ConstraintNetwork::new()),
        1 => Ok(blocks.pop().expect("one block").network),
        n => Err(Error::Parse(format!("expected one network, found {n} blocks"))),
    }
}

impl ConstraintNetwork {
    /// Canonical line for every unordered pair, sorted.
    pub fn pair_lines(&self) -> Vec<String> {
        let mut lines: Vec<String> = self
            .pairs()
            .map(|(i, j)| {
                let (a, b) = (&self.variable(i).id, &self.variable(j).id);
                if a <= b {
                    format!("{a} ; {b} ; {}", self.label(i, j))
                } else {
                    format!("{b} ; {a} ; {}", self.label(j, i))
                }
            })
            .collect();
        lines.sort();
        lines
    }

    /// Full canonical text: declarations in variable order, then pair lines.
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        for v in self.variables() {
            let _ = write!(out, "@object {} {}", v.id, v.object_type);
            if !v.exists {
                out.push_str(" absent");
            }
            if let Some(c) = &v.coref {
                let _ = write!(out, " coref={c}");
            }
            out.push('\n');
        }
        for line in self.pair_lines() {
            out.push_str(&line);
            out.push('\n');
        }
        out
    }
}

pub fn write_blocks(blocks: &[TimedNetwork]) -> String {
    let mut out = String::new();
    for b in blocks {
        let _ = write!(out, "@time {}", b.index);
        if let Some(t) = &b.time {
            let _ = write!(out, " {t}");
        }
        out.push('\n');
        out.push_str(&b.network.to_text());
    }
    out
}
