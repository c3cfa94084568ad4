//! Exact 2D predicates on integer grid points.
//!
//! Everything in this module is branch-deterministic: orientation tests and
//! interval comparisons are carried out in integer arithmetic (widened to
//! `i128` where products appear), so two segments either intersect or they
//! do not, with no epsilon tuning. These predicates sit on the hot path of
//! action enumeration — [`segment_covers_node`] alone is called tens of
//! millions of times in a long search — so the module also keeps per-thread
//! call counters for profiling.

use std::cell::Cell;
use std::sync::atomic::{AtomicBool, Ordering};
use std::time::{Duration, Instant};

use serde::{Deserialize, Serialize};

/// A node position on the integer design grid.
///
/// Ordering is row-major: `(y, x)` lexicographic. That order is the canonical
/// tie-break used everywhere determinism matters (element normalization,
/// action sorting), so it lives on the type itself.
#[derive(Clone, Copy, PartialEq, Eq, Hash, Debug, Serialize, Deserialize)]
pub struct Point {
    pub x: i64,
    pub y: i64,
}

impl Point {
    pub const fn new(x: i64, y: i64) -> Self {
        Point { x, y }
    }
}

impl PartialOrd for Point {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Point {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        (self.y, self.x).cmp(&(other.y, other.x))
    }
}

impl std::fmt::Display for Point {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "({}, {})", self.x, self.y)
    }
}

/// A straight segment between two distinct grid points.
#[derive(Clone, Copy, PartialEq, Eq, Hash, Debug)]
pub struct Segment {
    pub a: Point,
    pub b: Point,
}

impl Segment {
    /// Panics if `a == b`; degenerate segments carry no geometry.
    pub fn new(a: Point, b: Point) -> Self {
        assert!(a != b, "degenerate segment at {a}");
        Segment { a, b }
    }
}

/// An axis-aligned rectangle with positive area, `[x_min, x_max] × [y_min, y_max]`.
#[derive(Clone, Copy, PartialEq, Eq, Debug, Serialize, Deserialize)]
pub struct Rect {
    pub x_min: i64,
    pub y_min: i64,
    pub x_max: i64,
    pub y_max: i64,
}

impl Rect {
    pub fn new(x_min: i64, y_min: i64, x_max: i64, y_max: i64) -> Self {
        let r = Rect { x_min, y_min, x_max, y_max };
        assert!(r.has_positive_area(), "rectangle must have positive area");
        r
    }

    pub fn has_positive_area(&self) -> bool {
        self.x_min < self.x_max && self.y_min < self.y_max
    }

    /// Strict interior test; boundary points are outside.
    pub fn strictly_contains(&self, p: Point) -> bool {
        self.x_min < p.x && p.x < self.x_max && self.y_min < p.y && p.y < self.y_max
    }
}

/// Signed orientation of the triple `(a, b, c)`: positive for a left turn,
/// negative for a right turn, zero for collinear. Exact for all `i64`
/// coordinates thanks to the `i128` widening.
#[inline]
pub fn orientation(a: Point, b: Point, c: Point) -> i128 {
    let abx = (b.x - a.x) as i128;
    let aby = (b.y - a.y) as i128;
    let acx = (c.x - a.x) as i128;
    let acy = (c.y - a.y) as i128;
    abx * acy - aby * acx
}

/// True iff the open interiors of the two segments share at least one point.
///
/// Contact restricted to endpoints is not an intersection: truss members may
/// legitimately meet at a hinge. Collinear overlap of positive length is.
pub fn segments_properly_intersect(s1: Segment, s2: Segment) -> bool {
    let o1 = orientation(s1.a, s1.b, s2.a).signum();
    let o2 = orientation(s1.a, s1.b, s2.b).signum();
    let o3 = orientation(s2.a, s2.b, s1.a).signum();
    let o4 = orientation(s2.a, s2.b, s1.b).signum();

    if o1 == 0 && o2 == 0 {
        // Same supporting line: positive-length 1D overlap?
        return collinear_open_overlap(s1, s2);
    }
    o1 * o2 < 0 && o3 * o4 < 0
}

/// 1D overlap test for segments already known collinear. Projects both onto
/// the direction of `s1` and asks for a strictly positive common interval.
fn collinear_open_overlap(s1: Segment, s2: Segment) -> bool {
    let dx = (s1.b.x - s1.a.x) as i128;
    let dy = (s1.b.y - s1.a.y) as i128;
    let t = |p: Point| ((p.x - s1.a.x) as i128) * dx + ((p.y - s1.a.y) as i128) * dy;
    let (lo1, hi1) = (0i128, dx * dx + dy * dy);
    let (ta, tb) = (t(s2.a), t(s2.b));
    let (lo2, hi2) = if ta <= tb { (ta, tb) } else { (tb, ta) };
    lo1.max(lo2) < hi1.min(hi2)
}

static COVERS_TIMING: AtomicBool = AtomicBool::new(false);

thread_local! {
    static COVERS_CALLS: Cell<u64> = const { Cell::new(0) };
    static COVERS_NANOS: Cell<u64> = const { Cell::new(0) };
}

/// Per-thread profile of the [`segment_covers_node`] hot path.
#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct HotPathStats {
    pub calls: u64,
    pub nanos: u64,
}

impl HotPathStats {
    pub fn time(&self) -> Duration {
        Duration::from_nanos(self.nanos)
    }
}

/// Snapshot of the calling thread's hot-path counters.
pub fn covers_node_stats() -> HotPathStats {
    HotPathStats {
        calls: COVERS_CALLS.with(Cell::get),
        nanos: COVERS_NANOS.with(Cell::get),
    }
}

/// Resets the calling thread's hot-path counters.
pub fn reset_covers_node_stats() {
    COVERS_CALLS.with(|c| c.set(0));
    COVERS_NANOS.with(|c| c.set(0));
}

/// Globally enables or disables per-call timing. Call counting is always on;
/// timing costs a clock read per call and is off by default.
pub fn set_covers_node_timing(enabled: bool) {
    COVERS_TIMING.store(enabled, Ordering::Relaxed);
}

/// True iff `p` lies on the closed segment `s`.
///
/// Callers pass points that are not endpoints of `s`; the question answered
/// is "does this member pass over that node". Exact: collinearity is an
/// integer cross product, containment an integer bounding-box check.
pub fn segment_covers_node(s: Segment, p: Point) -> bool {
    COVERS_CALLS.with(|c| c.set(c.get() + 1));
    if COVERS_TIMING.load(Ordering::Relaxed) {
        let start = Instant::now();
        let hit = covers_node_inner(s, p);
        COVERS_NANOS.with(|c| c.set(c.get() + start.elapsed().as_nanos() as u64));
        hit
    } else {
        covers_node_inner(s, p)
    }
}

#[inline]
fn covers_node_inner(s: Segment, p: Point) -> bool {
    if orientation(s.a, s.b, p) != 0 {
        return false;
    }
    s.a.x.min(s.b.x) <= p.x
        && p.x <= s.a.x.max(s.b.x)
        && s.a.y.min(s.b.y) <= p.y
        && p.y <= s.a.y.max(s.b.y)
}

/// True iff some point of `s` lies strictly inside `r`.
///
/// Open-interior semantics: a segment running along the rectangle's boundary
/// does not touch it, so members may skirt a passive region.
pub fn segment_touches_region(s: Segment, r: &Rect) -> bool {
    // Clip the parameter t ∈ [0,1] of s(t) = a + t·(b−a) against the four
    // open half-planes of the rectangle, exactly, with rational bounds.
    // lo/hi are fractions num/den with den > 0; both are strict bounds.
    let mut lo = Frac { num: 0, den: 1, strict: false };
    let mut hi = Frac { num: 1, den: 1, strict: false };

    for (start, delta, min, max) in [
        (s.a.x, s.b.x - s.a.x, r.x_min, r.x_max),
        (s.a.y, s.b.y - s.a.y, r.y_min, r.y_max),
    ] {
        if delta == 0 {
            if !(min < start && start < max) {
                return false;
            }
        } else {
            // min < start + t·delta < max, solved for t.
            let (a, b) = (
                Frac { num: min - start, den: delta, strict: true },
                Frac { num: max - start, den: delta, strict: true },
            );
            let (l, h) = if delta > 0 { (a, b) } else { (b, a) };
            lo = lo.max_lower(l);
            hi = hi.min_upper(h);
        }
    }
    lo.feasible_below(hi)
}

/// Exact rational bound on the clip parameter. `strict` marks an open bound.
#[derive(Clone, Copy)]
struct Frac {
    num: i64,
    den: i64,
    strict: bool,
}

impl Frac {
    fn normalized(self) -> (i128, i128) {
        let (n, d) = (self.num as i128, self.den as i128);
        if d < 0 {
            (-n, -d)
        } else {
            (n, d)
        }
    }

    fn cmp_value(&self, other: &Frac) -> std::cmp::Ordering {
        let (an, ad) = self.normalized();
        let (bn, bd) = other.normalized();
        (an * bd).cmp(&(bn * ad))
    }

    fn max_lower(self, other: Frac) -> Frac {
        match self.cmp_value(&other) {
            std::cmp::Ordering::Less => other,
            std::cmp::Ordering::Greater => self,
            std::cmp::Ordering::Equal => Frac { strict: self.strict || other.strict, ..self },
        }
    }

    fn min_upper(self, other: Frac) -> Frac {
        match self.cmp_value(&other) {
            std::cmp::Ordering::Less => self,
            std::cmp::Ordering::Greater => other,
            std::cmp::Ordering::Equal => Frac { strict: self.strict || other.strict, ..self },
        }
    }

    /// Is there a t with lo (≤ or <) t (≤ or <) hi?
    fn feasible_below(&self, hi: Frac) -> bool {
        match self.cmp_value(&hi) {
            std::cmp::Ordering::Less => true,
            std::cmp::Ordering::Equal => !self.strict && !hi.strict,
            std::cmp::Ordering::Greater => false,
        }
    }
}

/// Squared Euclidean length, exact.
#[inline]
pub fn segment_length_sq(s: Segment) -> i64 {
    let dx = s.b.x - s.a.x;
    let dy = s.b.y - s.a.y;
    dx * dx + dy * dy
}

/// Euclidean length.
#[inline]
pub fn segment_length(s: Segment) -> f64 {
    (segment_length_sq(s) as f64).sqrt()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn seg(ax: i64, ay: i64, bx: i64, by: i64) -> Segment {
        Segment::new(Point::new(ax, ay), Point::new(bx, by))
    }

    #[test]
    fn crossing_diagonals_intersect() {
        assert!(segments_properly_intersect(seg(0, 0, 1, 1), seg(0, 1, 1, 0)));
    }

    #[test]
    fn shared_endpoint_is_not_an_intersection() {
        assert!(!segments_properly_intersect(seg(0, 0, 1, 0), seg(1, 0, 2, 1)));
    }

    #[test]
    fn collinear_positive_overlap_intersects() {
        assert!(segments_properly_intersect(seg(0, 0, 3, 0), seg(1, 0, 2, 0)));
    }

    #[test]
    fn collinear_endpoint_contact_does_not_intersect() {
        assert!(!segments_properly_intersect(seg(0, 0, 1, 0), seg(1, 0, 2, 0)));
        // Parallel but offset lines never meet.
        assert!(!segments_properly_intersect(seg(0, 0, 3, 0), seg(0, 1, 3, 1)));
    }

    #[test]
    fn endpoint_resting_on_interior_is_not_proper() {
        // T-junction: the joint node case is handled by coverage, not crossing.
        assert!(!segments_properly_intersect(seg(0, 0, 2, 0), seg(1, 0, 1, 2)));
    }

    #[test]
    fn covers_node_examples() {
        assert!(segment_covers_node(seg(0, 0, 2, 0), Point::new(1, 0)));
        assert!(!segment_covers_node(seg(0, 0, 2, 0), Point::new(1, 1)));
        assert!(segment_covers_node(seg(0, 0, 2, 2), Point::new(1, 1)));
        // Collinear but beyond the far endpoint.
        assert!(!segment_covers_node(seg(0, 0, 2, 2), Point::new(3, 3)));
    }

    #[test]
    fn region_touch_examples() {
        let r = Rect::new(1, 0, 3, 2);
        assert!(segment_touches_region(seg(0, 1, 4, 1), &r));
        assert!(!segment_touches_region(seg(0, 0, 4, 0), &r));
        assert!(!segment_touches_region(seg(0, 0, 0, 5), &r));
    }

    #[test]
    fn region_corner_and_diagonal_cases() {
        let r = Rect::new(1, 1, 3, 3);
        // Diagonal clipping exactly through the corner grazes, does not enter.
        assert!(!segment_touches_region(seg(0, 2, 2, 0), &r));
        // Through the interior.
        assert!(segment_touches_region(seg(0, 0, 4, 4), &r));
        // Fully inside.
        assert!(segment_touches_region(seg(1, 1, 2, 2), &r));
        // Along an edge.
        assert!(!segment_touches_region(seg(1, 1, 1, 3), &r));
    }

    #[test]
    fn lengths() {
        assert_eq!(segment_length(seg(0, 0, 3, 4)), 5.0);
        assert_eq!(segment_length(seg(0, 0, 1, 0)), 1.0);
        assert_eq!(segment_length(seg(0, 0, 1, 1)), 2.0_f64.sqrt());
    }

    #[test]
    fn call_counter_increments() {
        reset_covers_node_stats();
        let before = covers_node_stats().calls;
        segment_covers_node(seg(0, 0, 2, 0), Point::new(1, 0));
        segment_covers_node(seg(0, 0, 2, 0), Point::new(1, 1));
        assert_eq!(covers_node_stats().calls, before + 2);
    }

    #[test]
    fn point_order_is_row_major() {
        let mut pts = vec![Point::new(2, 0), Point::new(0, 1), Point::new(1, 0)];
        pts.sort();
        assert_eq!(pts, vec![Point::new(1, 0), Point::new(2, 0), Point::new(0, 1)]);
    }
}
