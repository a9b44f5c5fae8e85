//! Which atomic configurations of up to four regions integer disks realize.

use std::sync::LazyLock;

use super::disks::{classify_int, grid_disks, random_disk};

/// Realized 4-tuples keyed by the six relations (ab, ac, ad, bc, bd, cd).
/// Three-variable configurations are read off with `d` placed anywhere.
pub static REALIZED4: LazyLock<Vec<bool>> = LazyLock::new(|| {
    let mut seen = vec![false; 1 << 18];
    let small = grid_disks(3, 2);
    for a in &small {
        for b in &small {
            for c in &small {
                for d in &small {
                    seen[key(
                        classify_int(*a, *b),
                        classify_int(*a, *c),
                        classify_int(*a, *d),
                        classify_int(*b, *c),
                        classify_int(*b, *d),
                        classify_int(*c, *d),
                    )] = true;
                }
            }
        }
    }
    let mut rng = super::rng(0x4d15c);
    for _ in 0..2_000_000 {
        let v: Vec<_> = (0..4).map(|_| random_disk(&mut rng, 7, 4)).collect();
        seen[key(
            classify_int(v[0], v[1]),
            classify_int(v[0], v[2]),
            classify_int(v[0], v[3]),
            classify_int(v[1], v[2]),
            classify_int(v[1], v[3]),
            classify_int(v[2], v[3]),
        )] = true;
    }
    seen
});

/// Realized triples (ab, ac, bc), enumerated exhaustively on the grid used
/// to lock the composition table.
pub static REALIZED3: LazyLock<Vec<bool>> = LazyLock::new(|| {
    let mut seen = vec![false; 512];
    let grid = grid_disks(5, 3);
    for a in &grid {
        for b in &grid {
            for c in &grid {
                seen[(classify_int(*a, *b) << 6) | (classify_int(*a, *c) << 3) | classify_int(*b, *c)] = true;
            }
        }
    }
    seen
});

fn key(ab: usize, ac: usize, ad: usize, bc: usize, bd: usize, cd: usize) -> usize {
    (ab << 15) | (ac << 12) | (ad << 9) | (bc << 6) | (bd << 3) | cd
}

/// Whether some disk configuration realizes the atomic relation matrix
/// (`rel[i][j]` as tag indices) over `n <= 4` variables.
pub fn disk_witness(n: usize, rel: &[usize]) -> bool {
    let r = |i: usize, j: usize| rel[i * n + j];
    match n {
        0 | 1 => true,
        2 => REALIZED3.iter().enumerate().any(|(k, &s)| s && k >> 6 == r(0, 1)),
        3 => REALIZED3[(r(0, 1) << 6) | (r(0, 2) << 3) | r(1, 2)],
        4 => REALIZED4[key(r(0, 1), r(0, 2), r(0, 3), r(1, 2), r(1, 3), r(2, 3))],
        _ => panic!("only up to four variables"),
    }
}
