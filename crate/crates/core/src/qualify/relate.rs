use std::cmp::Ordering;

use geo::{Area, BooleanOps, BoundingRect, Distance, Euclidean, Length, LineString, MultiPolygon, Polygon, Rect};

use crate::calculus::{neighbors, BaseRelation, RelationSet, SizeRelation};

/// A polygon with the measures the qualifier needs precomputed.
#[derive(Debug, Clone)]
pub struct Region {
    poly: Polygon<f64>,
    area: f64,
    width: f64,
    bbox: Rect<f64>,
}

impl Region {
    pub fn new(poly: &Polygon<f64>) -> Region {
        let bbox = poly.bounding_rect().unwrap_or(Rect::new((0.0, 0.0), (0.0, 0.0)));
        let width = widest_part(&MultiPolygon::new(vec![poly.clone()]));
        Region { poly: poly.clone(), area: poly.unsigned_area(), width, bbox }
    }

    pub fn polygon(&self) -> &Polygon<f64> {
        &self.poly
    }

    pub fn area(&self) -> f64 {
        self.area
    }

    pub fn bbox(&self) -> Rect<f64> {
        self.bbox
    }

    fn rings(&self) -> impl Iterator<Item = &LineString<f64>> {
        std::iter::once(self.poly.exterior()).chain(self.poly.interiors())
    }

    /// Total order used to make the pairwise computation independent of
    /// argument order.
    fn order_key(&self) -> (u64, u64, usize) {
        let c = self.poly.exterior().0.first().copied().unwrap_or_default();
        (self.area.to_bits(), c.x.to_bits() ^ c.y.to_bits().rotate_left(17), self.poly.exterior().0.len())
    }
}

fn bbox_gap(a: Rect<f64>, b: Rect<f64>) -> f64 {
    let dx = (b.min().x - a.max().x).max(a.min().x - b.max().x).max(0.0);
    let dy = (b.min().y - a.max().y).max(a.min().y - b.max().y).max(0.0);
    dx.hypot(dy)
}

/// Shortest distance between the two boundaries; `f64::INFINITY` if it is
/// certainly above `cutoff`.
fn boundary_distance(a: &Region, b: &Region, cutoff: f64) -> f64 {
    if bbox_gap(a.bbox, b.bbox) > cutoff {
        return f64::INFINITY;
    }
    let mut best = f64::INFINITY;
    for ra in a.rings() {
        for rb in b.rings() {
            let ba = ra.bounding_rect();
            let bb = rb.bounding_rect();
            if let (Some(x), Some(y)) = (ba, bb) {
                if bbox_gap(x, y) > best.min(cutoff) {
                    continue;
                }
            }
            best = best.min(Euclidean.distance(ra, rb));
            if best == 0.0 {
                return 0.0;
            }
        }
    }
    best
}

/// Mean width of the widest component, `2 * area / perimeter`. A strip of
/// width `w` scores about `w`, a lens of depth `w` about `2w/3`.
fn widest_part(parts: &MultiPolygon<f64>) -> f64 {
    parts
        .iter()
        .map(|p| {
            let perimeter = Euclidean.length(p.exterior()) + p.interiors().iter().map(|r| Euclidean.length(r)).sum::<f64>();
            if perimeter > 0.0 {
                2.0 * p.unsigned_area() / perimeter
            } else {
                0.0
            }
        })
        .fold(0.0, f64::max)
}

/// Widths (in CRS units) of the shared interior and of each region's part
/// outside the other, plus the boundary gap.
#[derive(Debug, Clone, Copy)]
struct Measures {
    shared: f64,
    a_out: f64,
    b_out: f64,
    contact: f64,
}

fn measure(a: &Region, b: &Region, cutoff: f64) -> Measures {
    let contact = boundary_distance(a, b, cutoff);
    if bbox_gap(a.bbox, b.bbox) > 0.0 {
        return Measures { shared: 0.0, a_out: a.width, b_out: b.width, contact };
    }
    Measures {
        shared: widest_part(&a.poly.intersection(&b.poly)),
        a_out: widest_part(&a.poly.difference(&b.poly)),
        b_out: widest_part(&b.poly.difference(&a.poly)),
        contact,
    }
}

/// Maps the four predicates to the single atom they determine.
pub fn decide(overlap: bool, contact: bool, a_out: bool, b_out: bool) -> BaseRelation {
    use BaseRelation::*;
    match (overlap, a_out, b_out) {
        (false, _, _) if contact => Ec,
        (false, _, _) => Dc,
        (true, false, false) => Eq,
        (true, false, true) => {
            if contact {
                Tpp
            } else {
                Ntpp
            }
        }
        (true, true, false) => {
            if contact {
                Tppi
            } else {
                Ntppi
            }
        }
        (true, true, true) => Po,
    }
}

/// Three-valued predicate: `Some(v)` if settled, `None` if either value is
/// possible within the uncertainty band.
fn band(value: f64, lo: f64, hi: f64) -> Option<bool> {
    if value > hi {
        Some(true)
    } else if value <= lo {
        Some(false)
    } else {
        None
    }
}

fn choices(p: Option<bool>) -> &'static [bool] {
    match p {
        Some(true) => &[true],
        Some(false) => &[false],
        None => &[false, true],
    }
}

fn classify(a: &Region, b: &Region, eps: f64, radius: f64) -> RelationSet {
    let m = measure(a, b, eps.max(radius));
    // interior parts no wider than eps are absorbed into the thickened boundary
    let crisp = decide(m.shared > eps, m.contact <= eps, m.a_out > eps, m.b_out > eps);
    if radius <= eps {
        return RelationSet::single(crisp);
    }
    let overlap = band(m.shared, eps, radius);
    let contact = band(-m.contact, -radius, -eps);
    let a_out = band(m.a_out, eps, radius);
    let b_out = band(m.b_out, eps, radius);
    let mut out = RelationSet::single(crisp);
    for &o in choices(overlap) {
        for &c in choices(contact) {
            for &x in choices(a_out) {
                for &y in choices(b_out) {
                    out = out.with(decide(o, c, x, y));
                }
            }
        }
    }
    // only alternatives one continuous change away are plausible readings
    out.intersect(neighbors(crisp).with(crisp))
}

fn ordered(a: &Region, b: &Region, eps: f64, radius: f64) -> RelationSet {
    match a.order_key().cmp(&b.order_key()) {
        Ordering::Greater => classify(b, a, eps, radius).converse(),
        _ => classify(a, b, eps, radius),
    }
}

/// The RCC-8 atom holding between two regions, with boundaries closer than
/// `eps` counted as touching.
pub fn qualify_pair(a: &Region, b: &Region, eps: f64) -> BaseRelation {
    ordered(a, b, eps, 0.0).as_single().expect("crisp decision is a single atom")
}

/// Like [`qualify_pair`] but with a positional error `radius`: every
/// predicate whose outcome could flip within the radius is tried both ways
/// and the neighbouring atoms reached are added to the label.
pub fn qualify_pair_uncertain(a: &Region, b: &Region, eps: f64, radius: f64) -> RelationSet {
    ordered(a, b, eps, radius)
}

/// Qualitative size comparison; `equal` when the areas differ by less than
/// `ratio_tol` relative to the larger.
pub fn size_relation(a: &Region, b: &Region, ratio_tol: f64) -> SizeRelation {
    let big = a.area.max(b.area);
    if big == 0.0 || (a.area - b.area).abs() / big < ratio_tol {
        SizeRelation::Equal
    } else if a.area < b.area {
        SizeRelation::Smaller
    } else {
        SizeRelation::Larger
    }
}
