use crate::calculus::{cnd_distance, neighbors, RelationSet};
use crate::error::{Error, Result};
use crate::qcn::{self, ConstraintNetwork};

/// Cap on the number of minimal paths collected.
const MAX_PATHS: usize = 100_000;

struct Walk<'a> {
    to: &'a ConstraintNetwork,
    pairs: Vec<(usize, usize)>,
    len: usize,
    paths: Vec<Vec<ConstraintNetwork>>,
}

impl Walk<'_> {
    fn remaining(&self, net: &ConstraintNetwork, (i, j): (usize, usize)) -> u32 {
        let (a, b) = (net.label(i, j).as_single(), self.to.label(i, j).as_single());
        cnd_distance(a.expect("scenario"), b.expect("scenario"))
    }

    /// Extends `path` by one state, choosing each pair's next atom in turn.
    fn step(&mut self, path: &mut Vec<ConstraintNetwork>) -> Result<()> {
        let cur = path.last().expect("path starts at the source").clone();
        if path.len() - 1 == self.len {
            if cur == *self.to {
                if self.paths.len() >= MAX_PATHS {
                    return Err(Error::BudgetExhausted { explored: MAX_PATHS as u64 + 1, cap: MAX_PATHS as u64 });
                }
                self.paths.push(path.clone());
            }
            return Ok(());
        }
        let left = (self.len - path.len()) as u32;
        self.choose(path, &cur, cur.clone(), 0, left)
    }

    fn choose(
        &mut self,
        path: &mut Vec<ConstraintNetwork>,
        cur: &ConstraintNetwork,
        next: ConstraintNetwork,
        k: usize,
        left: u32,
    ) -> Result<()> {
        if k == self.pairs.len() {
            if next == *cur || qcn::algebraic_closure(&next).is_err() {
                return Ok(());
            }
            path.push(next);
            let r = self.step(path);
            path.pop();
            return r;
        }
        let (i, j) = self.pairs[k];
        let r = cur.label(i, j).as_single().expect("scenario");
        for s in RelationSet::single(r).union(neighbors(r)).iter() {
            let mut n = next.clone();
            n.set_label(i, j, RelationSet::single(s));
            if self.remaining(&n, (i, j)) <= left {
                self.choose(path, cur, n, k + 1, left)?;
            }
        }
        Ok(())
    }
}

/// All shortest sequences of consistent scenarios from `from` to `to` in
/// which every pair moves at most one neighbourhood step at a time.
/// Sequences include both endpoints.
pub fn interpolate(
    from: &ConstraintNetwork,
    to: &ConstraintNetwork,
    max_steps: usize,
) -> Result<Vec<Vec<ConstraintNetwork>>> {
    if !from.same_variables(to) || from.active_mask() != to.active_mask() {
        return Err(Error::VariableMismatch("interpolation endpoints must share objects and existence".into()));
    }
    for (name, net) in [("source", from), ("target", to)] {
        if !net.is_scenario() || qcn::algebraic_closure(net).is_err() {
            return Err(Error::Inconsistent(format!("{name} is not a consistent scenario")));
        }
    }
    let pairs: Vec<_> = from.active_pairs().collect();
    let bound = pairs
        .iter()
        .map(|&(i, j)| cnd_distance(from.label(i, j).as_single().unwrap(), to.label(i, j).as_single().unwrap()))
        .max()
        .unwrap_or(0) as usize;
    for len in bound..=max_steps {
        let mut walk = Walk { to, pairs: pairs.clone(), len, paths: Vec::new() };
        walk.step(&mut vec![from.clone()])?;
        if !walk.paths.is_empty() {
            return Ok(walk.paths);
        }
    }
    Err(Error::NoExplanation(format!("no continuous path within {max_steps} steps")))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::qcn::parse_network;

    fn labels(path: &[ConstraintNetwork]) -> Vec<String> {
        path.iter().map(|n| n.label(0, 1).as_single().unwrap().to_string()).collect()
    }

    #[test]
    fn examples() {
        let po = parse_network("a ; c ; {po}\n").unwrap();
        assert_eq!(interpolate(&po, &po, 0).unwrap(), vec![vec![po.clone()]]);
        let ec = parse_network("a ; c ; {ec}\n").unwrap();
        assert_eq!(interpolate(&po, &ec, 3).unwrap(), vec![vec![po.clone(), ec.clone()]]);

        let dc = parse_network("a ; b ; {dc}\n").unwrap();
        let ntpp = parse_network("a ; b ; {ntpp}\n").unwrap();
        let paths = interpolate(&dc, &ntpp, 10).unwrap();
        // po reaches ntpp through tpp, or through eq by shrinking
        let found: Vec<Vec<String>> = paths.iter().map(|p| labels(p)).collect();
        assert_eq!(found, [["dc", "ec", "po", "eq", "ntpp"], ["dc", "ec", "po", "tpp", "ntpp"]]);
        assert!(matches!(interpolate(&dc, &ntpp, 3), Err(Error::NoExplanation(_))));
    }

    #[test]
    fn rejects_bad_endpoints() {
        let a = parse_network("a ; b ; {dc,ec}\n").unwrap();
        let b = parse_network("a ; b ; {dc}\n").unwrap();
        assert!(matches!(interpolate(&a, &b, 4), Err(Error::Inconsistent(_))));
        let c = parse_network("a ; c ; {dc}\n").unwrap();
        assert!(matches!(interpolate(&b, &c, 4), Err(Error::VariableMismatch(_))));
    }
}
