use std::collections::VecDeque;

use crate::calculus::Algebra;

/// A triangle whose refinement emptied a label.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Triangle {
    /// The pair whose label became empty.
    pub pair: (usize, usize),
    /// The third variable through which the composition was taken.
    pub via: usize,
}

/// Queue-driven path consistency over an `n x n` label matrix.
///
/// Only pairs whose endpoints are both `active` take part. The matrix must
/// be converse-coherent on entry and stays so. Returns the first triangle
/// that produced an empty label.
pub fn close<A: Algebra>(alg: &A, n: usize, labels: &mut [A::Set], active: &[bool]) -> Result<(), Triangle> {
    debug_assert_eq!(labels.len(), n * n);
    for i in 0..n {
        for j in 0..n {
            if i != j && active[i] && active[j] && alg.is_empty(labels[i * n + j]) {
                return Err(Triangle { pair: (i.min(j), i.max(j)), via: i.max(j) });
            }
        }
    }
    let mut queued = vec![false; n * n];
    let mut queue = VecDeque::new();
    for i in 0..n {
        for j in i + 1..n {
            if active[i] && active[j] {
                queued[i * n + j] = true;
                queue.push_back((i, j));
            }
        }
    }

    let revise = |labels: &mut [A::Set], a: usize, b: usize, c: usize| -> Result<bool, Triangle> {
        // L(a,c) <- L(a,c) ∩ L(a,b);L(b,c)
        let current = labels[a * n + c];
        let refined = alg.intersect(current, alg.compose(labels[a * n + b], labels[b * n + c]));
        if refined == current {
            return Ok(false);
        }
        labels[a * n + c] = refined;
        labels[c * n + a] = alg.converse(refined);
        if alg.is_empty(refined) {
            return Err(Triangle { pair: (a.min(c), a.max(c)), via: b });
        }
        Ok(true)
    };

    while let Some((i, j)) = queue.pop_front() {
        queued[i * n + j] = false;
        for k in 0..n {
            if k == i || k == j || !active[k] {
                continue;
            }
            if revise(labels, i, j, k)? {
                let (a, b) = (i.min(k), i.max(k));
                if !queued[a * n + b] {
                    queued[a * n + b] = true;
                    queue.push_back((a, b));
                }
            }
            if revise(labels, k, i, j)? {
                let (a, b) = (k.min(j), k.max(j));
                if !queued[a * n + b] {
                    queued[a * n + b] = true;
                    queue.push_back((a, b));
                }
            }
        }
    }
    Ok(())
}
