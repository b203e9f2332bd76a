//! Planar primitives shared by every other module: points, a static k-d tree
//! for nearest-neighbor queries, and closed-polyline diagnostics.

use std::cmp::Ordering;
use std::collections::BinaryHeap;
use std::ops::{Add, AddAssign, Mul, Neg, Sub};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Points closer than this are considered the same point.
pub const DUPLICATE_TOLERANCE: f64 = 1e-12;

/// A position (or displacement) in the plane, in dimensionless units.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct Point2 {
    pub x: f64,
    pub y: f64,
}

impl Point2 {
    pub const ORIGIN: Point2 = Point2 { x: 0.0, y: 0.0 };

    pub const fn new(x: f64, y: f64) -> Self {
        Self { x, y }
    }

    pub fn from_polar(r: f64, phi: f64) -> Self {
        Self::new(r * phi.cos(), r * phi.sin())
    }

    pub fn is_finite(self) -> bool {
        self.x.is_finite() && self.y.is_finite()
    }

    pub fn dot(self, o: Point2) -> f64 {
        self.x * o.x + self.y * o.y
    }

    /// z-component of the 3D cross product.
    pub fn cross(self, o: Point2) -> f64 {
        self.x * o.y - self.y * o.x
    }

    pub fn norm_squared(self) -> f64 {
        self.dot(self)
    }

    pub fn norm(self) -> f64 {
        self.x.hypot(self.y)
    }

    pub fn distance(self, o: Point2) -> f64 {
        (self - o).norm()
    }

    pub fn distance_squared(self, o: Point2) -> f64 {
        (self - o).norm_squared()
    }

    /// Counter-clockwise rotation by a right angle.
    pub fn perp(self) -> Point2 {
        Point2::new(-self.y, self.x)
    }

    pub fn normalized(self) -> Point2 {
        let n = self.norm();
        Point2::new(self.x / n, self.y / n)
    }

    pub fn polar_angle(self) -> f64 {
        self.y.atan2(self.x)
    }

    pub fn midpoint(self, o: Point2) -> Point2 {
        Point2::new(0.5 * (self.x + o.x), 0.5 * (self.y + o.y))
    }

    fn coord(self, axis: usize) -> f64 {
        if axis == 0 {
            self.x
        } else {
            self.y
        }
    }
}

impl Add for Point2 {
    type Output = Point2;
    fn add(self, o: Point2) -> Point2 {
        Point2::new(self.x + o.x, self.y + o.y)
    }
}

impl AddAssign for Point2 {
    fn add_assign(&mut self, o: Point2) {
        self.x += o.x;
        self.y += o.y;
    }
}

impl Sub for Point2 {
    type Output = Point2;
    fn sub(self, o: Point2) -> Point2 {
        Point2::new(self.x - o.x, self.y - o.y)
    }
}

impl Mul<f64> for Point2 {
    type Output = Point2;
    fn mul(self, s: f64) -> Point2 {
        Point2::new(self.x * s, self.y * s)
    }
}

impl Mul<Point2> for f64 {
    type Output = Point2;
    fn mul(self, p: Point2) -> Point2 {
        p * self
    }
}

impl Neg for Point2 {
    type Output = Point2;
    fn neg(self) -> Point2 {
        Point2::new(-self.x, -self.y)
    }
}

pub fn centroid(points: &[Point2]) -> Point2 {
    let n = points.len().max(1) as f64;
    let sum = points.iter().fold(Point2::ORIGIN, |acc, &p| acc + p);
    sum * (1.0 / n)
}

pub(crate) fn check_finite(points: &[Point2]) -> Result<()> {
    match points.iter().position(|p| !p.is_finite()) {
        Some(index) => Err(Error::NonFinitePoint { index }),
        None => Ok(()),
    }
}

/// Candidate in a k-nearest search. Ordered by squared distance, then index,
/// so equal distances resolve to the lower index.
#[derive(Debug, Clone, Copy, PartialEq)]
struct Candidate {
    dist2: f64,
    index: usize,
}

impl Eq for Candidate {}

impl Ord for Candidate {
    fn cmp(&self, other: &Self) -> Ordering {
        self.dist2
            .total_cmp(&other.dist2)
            .then(self.index.cmp(&other.index))
    }
}

impl PartialOrd for Candidate {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

#[derive(Debug, Clone)]
struct KdNode {
    point: usize,
    axis: usize,
    left: Option<usize>,
    right: Option<usize>,
}

/// Static 2-d tree over an immutable point list.
///
/// Rebuild from scratch whenever the point set changes.
#[derive(Debug, Clone)]
pub struct NeighborIndex {
    points: Vec<Point2>,
    nodes: Vec<KdNode>,
    root: Option<usize>,
}

impl NeighborIndex {
    /// Builds the index, rejecting empty input, non-finite coordinates and
    /// duplicate points.
    pub fn build(points: Vec<Point2>) -> Result<Self> {
        let index = Self::build_unchecked(points)?;
        index.check_duplicates()?;
        Ok(index)
    }

    /// Builds the index without the duplicate scan. Coincident points are
    /// allowed; ties still resolve to the lower index.
    pub fn build_unchecked(points: Vec<Point2>) -> Result<Self> {
        if points.is_empty() {
            return Err(Error::EmptyInput);
        }
        check_finite(&points)?;
        let mut order: Vec<usize> = (0..points.len()).collect();
        let mut nodes = Vec::with_capacity(points.len());
        let root = build_subtree(&points, &mut order, &mut nodes);
        Ok(Self { points, nodes, root })
    }

    fn check_duplicates(&self) -> Result<()> {
        if self.len() < 2 {
            return Ok(());
        }
        for (i, &p) in self.points.iter().enumerate() {
            let (j, d) = self.nearest_k(p, 1, Some(i))[0];
            if d < DUPLICATE_TOLERANCE {
                return Err(Error::DuplicatePoints { first: i.min(j), second: i.max(j) });
            }
        }
        Ok(())
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn points(&self) -> &[Point2] {
        &self.points
    }

    pub fn point(&self, i: usize) -> Point2 {
        self.points[i]
    }

    /// The `k` closest points to `query` as `(index, distance)`, sorted by
    /// distance with ties broken by index. `exclude` removes one index from
    /// consideration.
    pub fn nearest_k(&self, query: Point2, k: usize, exclude: Option<usize>) -> Vec<(usize, f64)> {
        let mut heap = BinaryHeap::with_capacity(k + 1);
        if k > 0 {
            if let Some(root) = self.root {
                self.search(root, query, k, exclude, &mut heap);
            }
        }
        heap.into_sorted_vec()
            .into_iter()
            .map(|c| (c.index, c.dist2.sqrt()))
            .collect()
    }

    pub fn nearest(&self, query: Point2) -> (usize, f64) {
        self.nearest_k(query, 1, None)[0]
    }

    /// Index of the `n`-th closest point to point `query_index`, counting
    /// from 1 and excluding the point itself.
    pub fn nth_nearest(&self, query_index: usize, n: usize) -> Result<usize> {
        if query_index >= self.len() {
            return Err(Error::IndexOutOfRange { index: query_index, len: self.len() });
        }
        let available = self.len() - 1;
        if n == 0 || n > available {
            return Err(Error::RankOutOfRange { rank: n, available });
        }
        let found = self.nearest_k(self.points[query_index], n, Some(query_index));
        Ok(found[n - 1].0)
    }

    fn search(
        &self,
        node_id: usize,
        query: Point2,
        k: usize,
        exclude: Option<usize>,
        heap: &mut BinaryHeap<Candidate>,
    ) {
        let node = &self.nodes[node_id];
        let p = self.points[node.point];
        if exclude != Some(node.point) {
            let cand = Candidate { dist2: query.distance_squared(p), index: node.point };
            if heap.len() < k {
                heap.push(cand);
            } else if cand < *heap.peek().expect("heap is full") {
                heap.pop();
                heap.push(cand);
            }
        }
        let delta = query.coord(node.axis) - p.coord(node.axis);
        let (near, far) = if delta < 0.0 { (node.left, node.right) } else { (node.right, node.left) };
        if let Some(near) = near {
            self.search(near, query, k, exclude, heap);
        }
        if let Some(far) = far {
            // Equal distances must still be visited for the index tie-break.
            let visit = heap.len() < k || delta * delta <= heap.peek().map_or(f64::INFINITY, |c| c.dist2);
            if visit {
                self.search(far, query, k, exclude, heap);
            }
        }
    }
}

fn build_subtree(points: &[Point2], order: &mut [usize], nodes: &mut Vec<KdNode>) -> Option<usize> {
    if order.is_empty() {
        return None;
    }
    let (mut lo, mut hi) = (Point2::new(f64::INFINITY, f64::INFINITY), Point2::new(f64::NEG_INFINITY, f64::NEG_INFINITY));
    for &i in order.iter() {
        let p = points[i];
        lo = Point2::new(lo.x.min(p.x), lo.y.min(p.y));
        hi = Point2::new(hi.x.max(p.x), hi.y.max(p.y));
    }
    let axis = if hi.x - lo.x >= hi.y - lo.y { 0 } else { 1 };
    let mid = order.len() / 2;
    order.select_nth_unstable_by(mid, |&a, &b| {
        points[a].coord(axis).total_cmp(&points[b].coord(axis)).then(a.cmp(&b))
    });
    let id = nodes.len();
    nodes.push(KdNode { point: order[mid], axis, left: None, right: None });
    let (left, rest) = order.split_at_mut(mid);
    let left = build_subtree(points, left, nodes);
    let right = build_subtree(points, &mut rest[1..], nodes);
    nodes[id].left = left;
    nodes[id].right = right;
    Some(id)
}

/// Shoelace area of a closed loop: positive when counter-clockwise.
pub fn polyline_signed_area(points: &[Point2]) -> Result<f64> {
    if points.len() < 3 {
        return Err(Error::TooFewPoints { required: 3, got: points.len() });
    }
    let n = points.len();
    let twice: f64 = (0..n).map(|i| points[i].cross(points[(i + 1) % n])).sum();
    Ok(0.5 * twice)
}

fn orient(a: Point2, b: Point2, c: Point2) -> f64 {
    (b - a).cross(c - a)
}

fn on_segment(a: Point2, b: Point2, p: Point2) -> bool {
    p.x >= a.x.min(b.x) && p.x <= a.x.max(b.x) && p.y >= a.y.min(b.y) && p.y <= a.y.max(b.y)
}

/// Closed-segment intersection test, touching and collinear overlap included.
pub fn segments_intersect(a: Point2, b: Point2, c: Point2, d: Point2) -> bool {
    let d1 = orient(c, d, a);
    let d2 = orient(c, d, b);
    let d3 = orient(a, b, c);
    let d4 = orient(a, b, d);
    if ((d1 > 0.0 && d2 < 0.0) || (d1 < 0.0 && d2 > 0.0)) && ((d3 > 0.0 && d4 < 0.0) || (d3 < 0.0 && d4 > 0.0)) {
        return true;
    }
    (d1 == 0.0 && on_segment(c, d, a))
        || (d2 == 0.0 && on_segment(c, d, b))
        || (d3 == 0.0 && on_segment(a, b, c))
        || (d4 == 0.0 && on_segment(a, b, d))
}

/// True iff two non-adjacent edges of the closed loop intersect.
pub fn polyline_self_intersects(points: &[Point2]) -> Result<bool> {
    let n = points.len();
    if n < 3 {
        return Err(Error::TooFewPoints { required: 3, got: n });
    }
    for i in 0..n {
        let (a, b) = (points[i], points[(i + 1) % n]);
        for j in (i + 2)..n {
            if i == 0 && j == n - 1 {
                continue;
            }
            if segments_intersect(a, b, points[j], points[(j + 1) % n]) {
                return Ok(true);
            }
        }
    }
    Ok(false)
}

/// Even-odd ray casting against a closed polygon.
pub fn point_in_polygon(p: Point2, polygon: &[Point2]) -> bool {
    let n = polygon.len();
    let mut inside = false;
    let mut j = n.wrapping_sub(1);
    for i in 0..n {
        let (a, b) = (polygon[i], polygon[j]);
        if (a.y > p.y) != (b.y > p.y) {
            let x_cross = a.x + (p.y - a.y) / (b.y - a.y) * (b.x - a.x);
            if p.x < x_cross {
                inside = !inside;
            }
        }
        j = i;
    }
    inside
}

/// Distance from `p` to the closed polyline.
pub fn distance_to_polyline(p: Point2, polygon: &[Point2]) -> f64 {
    let n = polygon.len();
    (0..n)
        .map(|i| distance_to_segment(p, polygon[i], polygon[(i + 1) % n]))
        .fold(f64::INFINITY, f64::min)
}

pub fn distance_to_segment(p: Point2, a: Point2, b: Point2) -> f64 {
    let ab = b - a;
    let len2 = ab.norm_squared();
    if len2 == 0.0 {
        return p.distance(a);
    }
    let t = ((p - a).dot(ab) / len2).clamp(0.0, 1.0);
    p.distance(a + ab * t)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn square() -> Vec<Point2> {
        vec![Point2::new(0.0, 0.0), Point2::new(1.0, 0.0), Point2::new(1.0, 1.0), Point2::new(0.0, 1.0)]
    }

    /// O(k^2) oracle: every other index sorted by (distance, index).
    fn brute_force_order(points: &[Point2], q: usize) -> Vec<usize> {
        let mut others: Vec<usize> = (0..points.len()).filter(|&j| j != q).collect();
        others.sort_by(|&a, &b| {
            points[q]
                .distance_squared(points[a])
                .total_cmp(&points[q].distance_squared(points[b]))
                .then(a.cmp(&b))
        });
        others
    }

    #[test]
    fn build_sizes_and_rejections() {
        assert_eq!(NeighborIndex::build(vec![Point2::new(0.0, 0.0)]).unwrap().len(), 1);
        let three = vec![Point2::new(0.0, 0.0), Point2::new(1.0, 0.0), Point2::new(0.0, 1.0)];
        assert_eq!(NeighborIndex::build(three).unwrap().len(), 3);
        assert!(matches!(NeighborIndex::build(vec![]), Err(Error::EmptyInput)));
        let dup = NeighborIndex::build(vec![Point2::new(0.0, 0.0), Point2::new(0.0, 0.0)]);
        assert!(matches!(dup, Err(Error::DuplicatePoints { first: 0, second: 1 })));
        let nan = NeighborIndex::build(vec![Point2::new(f64::NAN, 0.0)]);
        assert!(matches!(nan, Err(Error::NonFinitePoint { index: 0 })));
    }

    #[test]
    fn nth_nearest_examples() {
        let idx = NeighborIndex::build(square()).unwrap();
        assert_eq!(brute_force_order(&square(), 0)[0], 1);
        assert_eq!(idx.nth_nearest(0, 1).unwrap(), 1);

        let line = vec![Point2::new(0.0, 0.0), Point2::new(1.0, 0.0), Point2::new(3.0, 0.0)];
        let idx = NeighborIndex::build(line.clone()).unwrap();
        assert_eq!(brute_force_order(&line, 0)[1], 2);
        assert_eq!(idx.nth_nearest(0, 2).unwrap(), 2);

        assert!(matches!(idx.nth_nearest(0, 3), Err(Error::RankOutOfRange { .. })));
        assert!(matches!(idx.nth_nearest(0, 0), Err(Error::RankOutOfRange { .. })));
        for q in 0..3 {
            assert_ne!(idx.nth_nearest(q, 1).unwrap(), q);
        }
    }

    #[test]
    fn nth_nearest_matches_brute_force_on_random_sets() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for trial in 0..20 {
            let k = rng.random_range(2..=200);
            // Snap to a coarse lattice in half the trials so that distance ties occur.
            let pts: Vec<Point2> = if trial % 2 == 0 {
                (0..k).map(|_| Point2::new(rng.random(), rng.random())).collect()
            } else {
                let mut seen = std::collections::HashSet::new();
                let mut v = Vec::new();
                while v.len() < k.min(150) {
                    let (a, b) = (rng.random_range(0..15i32), rng.random_range(0..15i32));
                    if seen.insert((a, b)) {
                        v.push(Point2::new(a as f64, b as f64));
                    }
                }
                v
            };
            let idx = NeighborIndex::build(pts.clone()).unwrap();
            for q in (0..pts.len()).step_by(7) {
                let expected = brute_force_order(&pts, q);
                let got: Vec<usize> = (1..pts.len()).map(|n| idx.nth_nearest(q, n).unwrap()).collect();
                assert_eq!(got, expected, "trial {trial} query {q}");
            }
        }
    }

    #[test]
    fn signed_area_examples() {
        assert_eq!(polyline_signed_area(&square()).unwrap(), 1.0);
        let mut cw = square();
        cw.reverse();
        assert_eq!(polyline_signed_area(&cw).unwrap(), -1.0);
        let tri = [Point2::new(0.0, 0.0), Point2::new(1.0, 0.0), Point2::new(0.0, 1.0)];
        assert_eq!(polyline_signed_area(&tri).unwrap(), 0.5);
        assert!(matches!(polyline_signed_area(&tri[..2]), Err(Error::TooFewPoints { .. })));
    }

    /// Independent all-pairs check using exact-ish parametric intersection.
    fn crossing_oracle(loop_: &[Point2]) -> bool {
        let n = loop_.len();
        for i in 0..n {
            for j in 0..n {
                if i == j || (i + 1) % n == j || (j + 1) % n == i {
                    continue;
                }
                let (p, r) = (loop_[i], loop_[(i + 1) % n] - loop_[i]);
                let (q, s) = (loop_[j], loop_[(j + 1) % n] - loop_[j]);
                let denom = r.cross(s);
                if denom.abs() < 1e-15 {
                    continue;
                }
                let t = (q - p).cross(s) / denom;
                let u = (q - p).cross(r) / denom;
                if (0.0..=1.0).contains(&t) && (0.0..=1.0).contains(&u) {
                    return true;
                }
            }
        }
        false
    }

    #[test]
    fn self_intersection_examples() {
        assert!(!polyline_self_intersects(&square()).unwrap());
        let bowtie = [Point2::new(0.0, 0.0), Point2::new(1.0, 1.0), Point2::new(1.0, 0.0), Point2::new(0.0, 1.0)];
        assert!(polyline_self_intersects(&bowtie).unwrap());
        let gon: Vec<Point2> = (0..16)
            .map(|j| Point2::from_polar(1.0, 2.0 * std::f64::consts::PI * j as f64 / 16.0))
            .collect();
        assert!(!crossing_oracle(&gon));
        assert!(!polyline_self_intersects(&gon).unwrap());
        assert!(matches!(polyline_self_intersects(&gon[..2]), Err(Error::TooFewPoints { .. })));
    }

    #[test]
    fn ray_casting_square() {
        assert!(point_in_polygon(Point2::new(0.5, 0.5), &square()));
        assert!(!point_in_polygon(Point2::new(1.5, 0.5), &square()));
    }

    proptest! {
        #[test]
        fn area_flips_under_reversal_and_ignores_rotation(
            pts in prop::collection::vec((-5.0f64..5.0, -5.0f64..5.0), 3..30),
            shift in 0usize..30,
        ) {
            let loop_: Vec<Point2> = pts.iter().map(|&(x, y)| Point2::new(x, y)).collect();
            let a = polyline_signed_area(&loop_).unwrap();
            let mut rev = loop_.clone();
            rev.reverse();
            prop_assert!((polyline_signed_area(&rev).unwrap() + a).abs() < 1e-9);
            let mut rot = loop_.clone();
            rot.rotate_left(shift % loop_.len());
            prop_assert!((polyline_signed_area(&rot).unwrap() - a).abs() < 1e-9);
        }

        #[test]
        fn self_intersection_matches_oracle_on_random_loops(
            pts in prop::collection::vec((-1.0f64..1.0, -1.0f64..1.0), 4..12),
        ) {
            let loop_: Vec<Point2> = pts.iter().map(|&(x, y)| Point2::new(x, y)).collect();
            prop_assert_eq!(polyline_self_intersects(&loop_).unwrap(), crossing_oracle(&loop_));
        }
    }
}
