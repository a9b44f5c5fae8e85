//! Brute-force disk geometry used as an independent oracle for the RCC-8
//! tables. Nothing here calls into the library's table code.

#![allow(dead_code)]

use rand::Rng;

pub const DC: usize = 0;
pub const EC: usize = 1;
pub const PO: usize = 2;
pub const EQ: usize = 3;
pub const TPP: usize = 4;
pub const NTPP: usize = 5;
pub const TPPI: usize = 6;
pub const NTPPI: usize = 7;

pub const NAMES: [&str; 8] = ["dc", "ec", "po", "eq", "tpp", "ntpp", "tppi", "ntppi"];

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct IntDisk {
    pub x: i64,
    pub y: i64,
    pub r: i64,
}

/// Exact classification of a pair of integer disks.
pub fn classify_int(a: IntDisk, b: IntDisk) -> usize {
    let d2 = (a.x - b.x).pow(2) + (a.y - b.y).pow(2);
    let sum2 = (a.r + b.r).pow(2);
    let diff2 = (a.r - b.r).pow(2);
    if d2 > sum2 {
        DC
    } else if d2 == sum2 {
        EC
    } else if d2 == 0 && a.r == b.r {
        EQ
    } else if a.r < b.r && d2 < diff2 {
        NTPP
    } else if a.r < b.r && d2 == diff2 {
        TPP
    } else if a.r > b.r && d2 < diff2 {
        NTPPI
    } else if a.r > b.r && d2 == diff2 {
        TPPI
    } else {
        PO
    }
}

/// Each predicate tested independently, for the JEPD check.
pub fn predicates_int(a: IntDisk, b: IntDisk) -> [bool; 8] {
    let d2 = (a.x - b.x).pow(2) + (a.y - b.y).pow(2);
    let sum2 = (a.r + b.r).pow(2);
    let diff2 = (a.r - b.r).pow(2);
    [
        d2 > sum2,
        d2 == sum2,
        d2 < sum2 && d2 > diff2,
        d2 == 0 && a.r == b.r,
        a.r < b.r && d2 == diff2,
        a.r < b.r && d2 < diff2,
        a.r > b.r && d2 == diff2,
        a.r > b.r && d2 < diff2,
    ]
}

pub fn grid_disks(max_coord: i64, max_r: i64) -> Vec<IntDisk> {
    let mut out = Vec::new();
    for x in 0..=max_coord {
        for y in 0..=max_coord {
            for r in 1..=max_r {
                out.push(IntDisk { x, y, r });
            }
        }
    }
    out
}

pub fn random_disk<R: Rng>(rng: &mut R, max_coord: i64, max_r: i64) -> IntDisk {
    IntDisk { x: rng.gen_range(0..=max_coord), y: rng.gen_range(0..=max_coord), r: rng.gen_range(1..=max_r) }
}

/// Floating-point classification with an equality tolerance.
pub fn classify_f(d: f64, r1: f64, r2: f64, tol: f64) -> usize {
    let sum = r1 + r2;
    let diff = (r1 - r2).abs();
    let same = (r1 - r2).abs() <= tol;
    if d > sum + tol {
        DC
    } else if (d - sum).abs() <= tol {
        EC
    } else if d <= tol && same {
        EQ
    } else if (d - diff).abs() <= tol {
        if r1 < r2 {
            TPP
        } else {
            TPPI
        }
    } else if d < diff {
        if r1 < r2 {
            NTPP
        } else {
            NTPPI
        }
    } else {
        PO
    }
}

/// A disk whose centre and radius both move linearly in `t ∈ [0, 1]`
/// relative to a fixed disk.
#[derive(Debug, Clone, Copy)]
pub struct Motion {
    pub p: (f64, f64),
    pub v: (f64, f64),
    pub r0: f64,
    pub s: f64,
    pub fixed: (f64, f64, f64),
}

impl Motion {
    fn at(&self, t: f64) -> (f64, f64) {
        let cx = self.p.0 + t * self.v.0 - self.fixed.0;
        let cy = self.p.1 + t * self.v.1 - self.fixed.1;
        ((cx * cx + cy * cy).sqrt(), self.r0 + t * self.s)
    }

    /// Roots in `[0, 1]` of every boundary condition (tangency and
    /// coincidence), all quadratic in `t`.
    fn critical_times(&self) -> Vec<f64> {
        let (cx0, cy0) = (self.p.0 - self.fixed.0, self.p.1 - self.fixed.1);
        let rb = self.fixed.2;
        // |c(t)|^2 = a t^2 + b t + c
        let a = self.v.0 * self.v.0 + self.v.1 * self.v.1;
        let b = 2.0 * (cx0 * self.v.0 + cy0 * self.v.1);
        let c = cx0 * cx0 + cy0 * cy0;
        let mut roots = Vec::new();
        for sign in [1.0, -1.0] {
            // (r0 + s t + sign rb)^2
            let k = self.r0 + sign * rb;
            let qa = a - self.s * self.s;
            let qb = b - 2.0 * self.s * k;
            let qc = c - k * k;
            solve_quadratic(qa, qb, qc, &mut roots);
        }
        roots.retain(|t| (0.0..=1.0).contains(t));
        roots.sort_by(|x, y| x.partial_cmp(y).unwrap());
        roots.dedup_by(|x, y| (*x - *y).abs() < 1e-9);
        roots
    }

    /// Relation sequence: generic relation on each open interval between
    /// critical instants and the boundary relation at each instant.
    pub fn relation_sequence(&self, tol: f64) -> Vec<usize> {
        let crit = self.critical_times();
        let mut seq = Vec::new();
        let push = |rel: usize, seq: &mut Vec<usize>| {
            if seq.last() != Some(&rel) {
                seq.push(rel);
            }
        };
        let rb = self.fixed.2;
        let (d, r) = self.at(0.0);
        push(classify_f(d, r, rb, tol), &mut seq);
        let mut prev = 0.0;
        for &t in crit.iter().chain(std::iter::once(&1.0)) {
            if t > prev {
                let (d, r) = self.at(0.5 * (prev + t));
                push(classify_f(d, r, rb, 0.0), &mut seq);
            }
            let (d, r) = self.at(t);
            push(classify_f(d, r, rb, tol), &mut seq);
            prev = t;
        }
        seq
    }
}

fn solve_quadratic(a: f64, b: f64, c: f64, out: &mut Vec<f64>) {
    if a.abs() < 1e-12 {
        if b.abs() > 1e-12 {
            out.push(-c / b);
        }
        return;
    }
    let disc = b * b - 4.0 * a * c;
    if disc < -1e-12 {
        return;
    }
    let sq = disc.max(0.0).sqrt();
    out.push((-b - sq) / (2.0 * a));
    out.push((-b + sq) / (2.0 * a));
}

pub fn random_motion<R: Rng>(rng: &mut R) -> Motion {
    let fixed = (0.0, 0.0, rng.gen_range(0.5..3.0));
    let r0 = rng.gen_range(0.3..3.0);
    let r1: f64 = rng.gen_range(0.3..3.0);
    let start = (rng.gen_range(-8.0..8.0), rng.gen_range(-8.0..8.0));
    let end = (rng.gen_range(-8.0..8.0), rng.gen_range(-8.0..8.0));
    Motion { p: start, v: (end.0 - start.0, end.1 - start.1), r0, s: r1 - r0, fixed }
}

/// Hand-picked motions that pass through the measure-zero configurations
/// random sampling never hits (coincidence, tangent-preserving growth).
pub fn witness_motions() -> Vec<Motion> {
    let fixed = (0.0, 0.0, 2.0);
    vec![
        // equal radii, passing through the other's centre: po, eq, po
        Motion { p: (-1.0, 0.0), v: (2.0, 0.0), r0: 2.0, s: 0.0, fixed },
        // concentric growth: ntpp, eq, ntppi
        Motion { p: (0.0, 0.0), v: (0.0, 0.0), r0: 1.0, s: 2.0, fixed },
        // internally tangent disk growing into the fixed one: tpp, eq
        Motion { p: (1.0, 0.0), v: (-1.0, 0.0), r0: 1.0, s: 1.0, fixed },
        // and continuing to tppi
        Motion { p: (1.0, 0.0), v: (-2.0, 0.0), r0: 1.0, s: 2.0, fixed },
        // small disk drifting in from far away: dc, ec, po, tpp, ntpp
        Motion { p: (6.0, 0.0), v: (-6.0, 0.0), r0: 1.0, s: 0.0, fixed },
        // large disk swallowing the fixed one: dc, ec, po, tppi, ntppi
        Motion { p: (9.0, 0.0), v: (-9.0, 0.0), r0: 4.0, s: 0.0, fixed },
    ]
}
