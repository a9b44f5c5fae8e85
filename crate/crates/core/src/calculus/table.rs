use std::collections::VecDeque;
use std::fmt::Write as _;

use crate::error::Error;

/// Bitmask over the atoms of a [`Calculus`]; bit `i` is atom `i`.
pub type Mask = u16;

/// Maximum number of atoms a table-driven calculus may declare.
pub const MAX_ATOMS: usize = Mask::BITS as usize;

/// Operations the closure and search machinery need from a relation algebra.
pub trait Algebra {
    type Set: Copy + Eq + std::fmt::Debug;

    fn universal(&self) -> Self::Set;
    fn identity(&self) -> Self::Set;
    fn empty(&self) -> Self::Set;
    fn compose(&self, a: Self::Set, b: Self::Set) -> Self::Set;
    fn converse(&self, a: Self::Set) -> Self::Set;
    fn intersect(&self, a: Self::Set, b: Self::Set) -> Self::Set;

    fn is_empty(&self, a: Self::Set) -> bool {
        a == self.empty()
    }
}

/// A binary qualitative calculus given entirely by lookup tables.
///
/// Converse and identity are not declared separately; they are recovered
/// from the composition table (the identity atom `e` satisfies `e;r = r;e = {r}`,
/// and `conv(r)` is the unique `s` with `e ∈ r;s`).
#[derive(Debug, Clone)]
pub struct Calculus {
    name: String,
    atoms: Vec<String>,
    identity: usize,
    converse: Vec<usize>,
    composition: Vec<Mask>,
    neighbors: Vec<Mask>,
    distances: Vec<Option<u32>>,
}

impl Calculus {
    /// Parses the line-oriented table format:
    ///
    /// ```text
    /// atoms lt eq gt
    /// lt ; lt ; {lt}
    /// ...
    /// cnd lt ; eq
    /// ```
    ///
    /// Every ordered atom pair needs exactly one composition line. `cnd`
    /// lines are optional and declare undirected neighbourhood edges.
    pub fn parse(name: &str, text: &str) -> Result<Calculus, Error> {
        let mut atoms: Vec<String> = Vec::new();
        let mut entries: Vec<Option<Mask>> = Vec::new();
        let mut neighbors: Vec<Mask> = Vec::new();

        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let err = |msg: String| Error::Parse(format!("{name}:{}: {msg}", lineno + 1));
            if let Some(rest) = line.strip_prefix("atoms ") {
                if !atoms.is_empty() {
                    return Err(err("duplicate `atoms` line".into()));
                }
                atoms = rest.split_whitespace().map(str::to_string).collect();
                if atoms.is_empty() || atoms.len() > MAX_ATOMS {
                    return Err(err(format!("need 1..={MAX_ATOMS} atoms")));
                }
                let n = atoms.len();
                entries = vec![None; n * n];
                neighbors = vec![0; n];
                continue;
            }
            if atoms.is_empty() {
                return Err(err("`atoms` line must come first".into()));
            }
            let index = |tok: &str| -> Result<usize, Error> {
                let tok = tok.trim();
                atoms
                    .iter()
                    .position(|a| a == tok)
                    .ok_or_else(|| err(format!("unknown atom `{tok}`")))
            };
            if let Some(rest) = line.strip_prefix("cnd ") {
                let (a, b) = rest
                    .split_once(';')
                    .ok_or_else(|| err("expected `cnd a ; b`".into()))?;
                let (a, b) = (index(a)?, index(b)?);
                if a == b {
                    return Err(err("neighbourhood edges must be irreflexive".into()));
                }
                neighbors[a] |= 1 << b;
                neighbors[b] |= 1 << a;
                continue;
            }
            let parts: Vec<&str> = line.splitn(3, ';').collect();
            if parts.len() != 3 {
                return Err(err("expected `r1 ; r2 ; {r...}`".into()));
            }
            let (a, b) = (index(parts[0])?, index(parts[1])?);
            let set = parts[2].trim();
            let set = set
                .strip_prefix('{')
                .and_then(|s| s.strip_suffix('}'))
                .ok_or_else(|| err("composition result must be braced".into()))?;
            let mut mask: Mask = 0;
            for tok in set.split(',').filter(|t| !t.trim().is_empty()) {
                mask |= 1 << index(tok)?;
            }
            let slot = &mut entries[a * atoms.len() + b];
            if slot.is_some() {
                return Err(err(format!("duplicate entry {} ; {}", atoms[a], atoms[b])));
            }
            *slot = Some(mask);
        }

        let n = atoms.len();
        if n == 0 {
            return Err(Error::Parse(format!("{name}: missing `atoms` line")));
        }
        let mut composition = Vec::with_capacity(n * n);
        for (k, e) in entries.iter().enumerate() {
            match e {
                Some(m) => composition.push(*m),
                None => {
                    return Err(Error::Parse(format!(
                        "{name}: missing composition entry {} ; {}",
                        atoms[k / n],
                        atoms[k % n]
                    )))
                }
            }
        }

        let identity = (0..n)
            .find(|&e| {
                (0..n).all(|r| composition[e * n + r] == 1 << r && composition[r * n + e] == 1 << r)
            })
            .ok_or_else(|| Error::Parse(format!("{name}: no identity atom")))?;
        let mut converse = Vec::with_capacity(n);
        for r in 0..n {
            let candidates: Vec<usize> =
                (0..n).filter(|&s| composition[r * n + s] & (1 << identity) != 0).collect();
            match candidates.as_slice() {
                [s] => converse.push(*s),
                _ => {
                    return Err(Error::Parse(format!(
                        "{name}: converse of `{}` is not unique",
                        atoms[r]
                    )))
                }
            }
        }

        let distances = all_pairs_distances(&neighbors);
        Ok(Calculus {
            name: name.to_string(),
            atoms,
            identity,
            converse,
            composition,
            neighbors,
            distances,
        })
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn atoms(&self) -> &[String] {
        &self.atoms
    }

    pub fn len(&self) -> usize {
        self.atoms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.atoms.is_empty()
    }

    pub fn atom_index(&self, name: &str) -> Option<usize> {
        self.atoms.iter().position(|a| a == name)
    }

    pub fn identity_atom(&self) -> usize {
        self.identity
    }

    pub fn universal_mask(&self) -> Mask {
        if self.len() == MAX_ATOMS {
            Mask::MAX
        } else {
            (1 << self.len()) - 1
        }
    }

    pub fn compose_atoms(&self, a: usize, b: usize) -> Mask {
        self.composition[a * self.len() + b]
    }

    pub fn compose_masks(&self, a: Mask, b: Mask) -> Mask {
        let mut out = 0;
        for i in bits(a) {
            for j in bits(b) {
                out |= self.compose_atoms(i, j);
            }
        }
        out
    }

    pub fn converse_atom(&self, a: usize) -> usize {
        self.converse[a]
    }

    pub fn converse_mask(&self, m: Mask) -> Mask {
        bits(m).fold(0, |acc, i| acc | 1 << self.converse[i])
    }

    pub fn neighbors(&self, a: usize) -> Mask {
        self.neighbors[a]
    }

    /// Shortest-path length in the neighbourhood graph, `None` if unreachable.
    pub fn distance(&self, a: usize, b: usize) -> Option<u32> {
        self.distances[a * self.len() + b]
    }

    /// Longest finite shortest path.
    pub fn diameter(&self) -> u32 {
        self.distances.iter().flatten().copied().max().unwrap_or(0)
    }

    pub fn is_connected(&self) -> bool {
        self.distances.iter().all(Option::is_some)
    }

    pub fn format_mask(&self, m: Mask) -> String {
        let mut s = String::from("{");
        for (k, i) in bits(m).enumerate() {
            if k > 0 {
                s.push(',');
            }
            let _ = write!(s, "{}", self.atoms[i]);
        }
        s.push('}');
        s
    }

    /// Renders the calculus back into the text format accepted by [`Calculus::parse`].
    pub fn to_text(&self) -> String {
        let mut out = format!("atoms {}\n", self.atoms.join(" "));
        for a in 0..self.len() {
            for b in 0..self.len() {
                let _ = writeln!(
                    out,
                    "{} ; {} ; {}",
                    self.atoms[a],
                    self.atoms[b],
                    self.format_mask(self.compose_atoms(a, b))
                );
            }
        }
        for a in 0..self.len() {
            for b in bits(self.neighbors[a]).filter(|&b| b > a) {
                let _ = writeln!(out, "cnd {} ; {}", self.atoms[a], self.atoms[b]);
            }
        }
        out
    }
}

impl Algebra for Calculus {
    type Set = Mask;

    fn universal(&self) -> Mask {
        self.universal_mask()
    }

    fn identity(&self) -> Mask {
        1 << self.identity
    }

    fn empty(&self) -> Mask {
        0
    }

    fn compose(&self, a: Mask, b: Mask) -> Mask {
        self.compose_masks(a, b)
    }

    fn converse(&self, a: Mask) -> Mask {
        self.converse_mask(a)
    }

    fn intersect(&self, a: Mask, b: Mask) -> Mask {
        a & b
    }
}

/// Indices of set bits, ascending.
pub fn bits(m: Mask) -> impl Iterator<Item = usize> {
    (0..MAX_ATOMS).filter(move |i| m & (1 << i) != 0)
}

fn all_pairs_distances(neighbors: &[Mask]) -> Vec<Option<u32>> {
    let n = neighbors.len();
    let mut out = vec![None; n * n];
    for src in 0..n {
        let mut queue = VecDeque::from([src]);
        out[src * n + src] = Some(0);
        while let Some(u) = queue.pop_front() {
            let du = out[src * n + u].unwrap_or(0);
            for v in bits(neighbors[u]) {
                if out[src * n + v].is_none() {
                    out[src * n + v] = Some(du + 1);
                    queue.push_back(v);
                }
            }
        }
    }
    out
}
