//! Node placement on and inside reconstructed boundaries.
//!
//! Boundary nodes are marched along the curve by local arc-length steps and
//! then uniformly rescaled so the loop closes without a short last edge.
//! Interior nodes grow from the boundary nodes as an advancing front: every
//! processed node proposes candidates on a circle of radius `h(node)`, and a
//! candidate survives if it lies in the region and keeps its distance from
//! all nodes placed so far.

use std::collections::{HashMap, VecDeque};
use std::f64::consts::TAU;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::domain::ReconstructedDomain;
use crate::error::{Error, Result};
use crate::geometry::{NeighborIndex, Point2};
use crate::spline::ArcLengthTable;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum NodeKind {
    Interior,
    Outer,
    Dendrite,
}

impl NodeKind {
    pub fn as_str(self) -> &'static str {
        match self {
            NodeKind::Interior => "interior",
            NodeKind::Outer => "outer",
            NodeKind::Dendrite => "dendrite",
        }
    }

    pub fn is_boundary(self) -> bool {
        self != NodeKind::Interior
    }
}

impl std::str::FromStr for NodeKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "interior" => Ok(NodeKind::Interior),
            "outer" => Ok(NodeKind::Outer),
            "dendrite" => Ok(NodeKind::Dendrite),
            other => Err(Error::InvalidInput(format!("unknown node kind `{other}`"))),
        }
    }
}

/// Graded internodal spacing: `h_min` on the focus points, growing linearly
/// to `h_max` at `transition_radius` away from them.
#[derive(Debug, Clone)]
pub struct SpacingProfile {
    h_min: f64,
    h_max: f64,
    transition_radius: f64,
    focus: Option<NeighborIndex>,
}

impl SpacingProfile {
    pub fn new(h_min: f64, h_max: f64, focus_points: Vec<Point2>, transition_radius: f64) -> Result<Self> {
        if !(h_min > 0.0 && h_min <= h_max && transition_radius > 0.0) {
            return Err(Error::InvalidInput(format!(
                "spacing needs 0 < h_min <= h_max and transition_radius > 0 (got {h_min}, {h_max}, {transition_radius})"
            )));
        }
        let focus = if focus_points.is_empty() { None } else { Some(NeighborIndex::build_unchecked(focus_points)?) };
        Ok(Self { h_min, h_max, transition_radius, focus })
    }

    pub fn uniform(h: f64) -> Result<Self> {
        Self::new(h, h, Vec::new(), 1.0)
    }

    pub fn h_min(&self) -> f64 {
        self.h_min
    }

    pub fn h_max(&self) -> f64 {
        self.h_max
    }

    pub fn transition_radius(&self) -> f64 {
        self.transition_radius
    }

    pub fn focus_points(&self) -> &[Point2] {
        self.focus.as_ref().map_or(&[], |f| f.points())
    }

    pub fn spacing_at(&self, x: Point2) -> f64 {
        match &self.focus {
            None => self.h_max,
            Some(focus) => {
                let (_, d) = focus.nearest(x);
                let s = (d / self.transition_radius).clamp(0.0, 1.0);
                self.h_min + (self.h_max - self.h_min) * s
            }
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BoundaryNode {
    pub position: Point2,
    pub normal: Point2,
    pub kind: NodeKind,
    /// Spline parameter the node was placed at.
    pub parameter: f64,
}

/// Marches nodes along the curve at the local spacing, starting from the
/// first knot.
pub fn resample_boundary(dom: &ReconstructedDomain, profile: &SpacingProfile, kind: NodeKind) -> Result<Vec<BoundaryNode>> {
    let spline = dom.spline();
    let table = ArcLengthTable::new(spline);
    let total = table.total();
    let limit = 3.0 * profile.h_min();
    if total <= limit {
        return Err(Error::CurveTooShort { length: total, limit });
    }

    // Nominal arc positions, each step sized by the spacing at its start.
    let mut arcs = vec![0.0];
    let mut last_h = profile.spacing_at(spline.eval(0.0));
    loop {
        let a = *arcs.last().unwrap();
        if a + last_h >= total {
            break;
        }
        let next = a + last_h;
        arcs.push(next);
        last_h = profile.spacing_at(spline.eval(table.parameter_at(next)));
    }
    // Close either by keeping the last node (shrinking) or dropping it
    // (stretching), whichever needs the smaller uniform rescale.
    let keep_sum = arcs.last().unwrap() + last_h;
    let drop_sum = *arcs.last().unwrap();
    let keep_factor = total / keep_sum;
    let drop_factor = if arcs.len() > 3 { total / drop_sum } else { f64::INFINITY };
    let factor = if keep_factor.ln().abs() <= drop_factor.ln().abs() {
        keep_factor
    } else {
        arcs.pop();
        drop_factor
    };

    Ok(arcs
        .iter()
        .map(|&a| {
            let t = table.parameter_at(a * factor);
            BoundaryNode { position: spline.eval(t), normal: dom.outward_normal(t), kind, parameter: t }
        })
        .collect())
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct FillConfig {
    /// Candidates proposed around each processed node.
    pub candidates: usize,
    /// A candidate must be at least `acceptance * h(candidate)` from every node.
    pub acceptance: f64,
    pub seed: u64,
}

impl Default for FillConfig {
    fn default() -> Self {
        Self { candidates: 6, acceptance: 0.85, seed: 0 }
    }
}

/// The region between an outer curve and an optional hole.
#[derive(Debug, Clone, Copy)]
pub struct Region<'a> {
    pub outer: &'a ReconstructedDomain,
    pub inner: Option<&'a ReconstructedDomain>,
}

impl Region<'_> {
    pub fn contains(&self, x: Point2) -> bool {
        self.outer.contains(x) && !self.inner.is_some_and(|d| d.contains(x))
    }
}

/// Uniform bucket grid over placed nodes for separation queries.
struct BucketGrid {
    cell: f64,
    buckets: HashMap<(i64, i64), Vec<Point2>>,
}

impl BucketGrid {
    fn new(cell: f64) -> Self {
        Self { cell, buckets: HashMap::new() }
    }

    fn key(&self, p: Point2) -> (i64, i64) {
        ((p.x / self.cell).floor() as i64, (p.y / self.cell).floor() as i64)
    }

    fn insert(&mut self, p: Point2) {
        let key = self.key(p);
        self.buckets.entry(key).or_default().push(p);
    }

    fn any_within(&self, p: Point2, radius: f64) -> bool {
        let (cx, cy) = self.key(p);
        let reach = (radius / self.cell).ceil() as i64;
        let r2 = radius * radius;
        for ix in cx - reach..=cx + reach {
            for iy in cy - reach..=cy + reach {
                if let Some(bucket) = self.buckets.get(&(ix, iy)) {
                    if bucket.iter().any(|q| q.distance_squared(p) < r2) {
                        return true;
                    }
                }
            }
        }
        false
    }
}

/// Advancing-front fill of `region`, seeded from the given boundary nodes.
/// Returns interior nodes in generation order.
pub fn fill_interior(
    region: Region<'_>,
    boundary: &[BoundaryNode],
    profile: &SpacingProfile,
    config: &FillConfig,
) -> Result<Vec<Point2>> {
    if boundary.is_empty() {
        return Err(Error::InvalidInput("fill needs boundary nodes to seed from".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    let mut grid = BucketGrid::new(config.acceptance * profile.h_min());
    let mut queue: VecDeque<Point2> = VecDeque::with_capacity(boundary.len());
    for node in boundary {
        grid.insert(node.position);
        queue.push_back(node.position);
    }
    let mut interior = Vec::new();
    let m = config.candidates.max(1);
    while let Some(p) = queue.pop_front() {
        let h = profile.spacing_at(p);
        let offset = rng.random_range(0.0..TAU);
        for i in 0..m {
            let angle = offset + TAU * i as f64 / m as f64;
            let candidate = p + Point2::from_polar(h, angle);
            let radius = config.acceptance * profile.spacing_at(candidate);
            if grid.any_within(candidate, radius) || !region.contains(candidate) {
                continue;
            }
            grid.insert(candidate);
            queue.push_back(candidate);
            interior.push(candidate);
        }
    }
    if interior.is_empty() {
        return Err(Error::RegionEmpty);
    }
    Ok(interior)
}

#[derive(Debug, Clone)]
pub struct Discretization {
    pub boundary_nodes: Vec<BoundaryNode>,
    pub interior_nodes: Vec<Point2>,
}

impl Discretization {
    pub fn len(&self) -> usize {
        self.boundary_nodes.len() + self.interior_nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// All node positions, boundary nodes first.
    pub fn positions(&self) -> Vec<Point2> {
        self.boundary_nodes.iter().map(|n| n.position).chain(self.interior_nodes.iter().copied()).collect()
    }

    pub fn kinds(&self) -> Vec<NodeKind> {
        self.boundary_nodes
            .iter()
            .map(|n| n.kind)
            .chain(std::iter::repeat_n(NodeKind::Interior, self.interior_nodes.len()))
            .collect()
    }
}

/// Resamples both boundaries and fills the region between them.
pub fn discretize_region(
    outer: &ReconstructedDomain,
    inner: Option<&ReconstructedDomain>,
    profile: &SpacingProfile,
    config: &FillConfig,
) -> Result<Discretization> {
    let mut boundary_nodes = resample_boundary(outer, profile, NodeKind::Outer)?;
    if let Some(inner) = inner {
        boundary_nodes.extend(resample_boundary(inner, profile, NodeKind::Dendrite)?);
    }
    let interior_nodes = fill_interior(Region { outer, inner }, &boundary_nodes, profile, config)?;
    Ok(Discretization { boundary_nodes, interior_nodes })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spline::ArcLengthTable;
    use std::f64::consts::PI;

    fn circle_domain(r: f64, k: usize) -> ReconstructedDomain {
        let pts: Vec<Point2> = (0..k).map(|j| Point2::from_polar(r, TAU * j as f64 / k as f64)).collect();
        ReconstructedDomain::from_unordered(pts).unwrap()
    }

    fn arc_gaps(dom: &ReconstructedDomain, nodes: &[BoundaryNode]) -> Vec<f64> {
        let table = ArcLengthTable::new(dom.spline());
        let arcs: Vec<f64> = nodes.iter().map(|n| table.length_at(n.parameter)).collect();
        let n = arcs.len();
        (0..n)
            .map(|i| if i + 1 < n { arcs[i + 1] - arcs[i] } else { table.total() - arcs[i] + arcs[0] })
            .collect()
    }

    #[test]
    fn spacing_profile_examples() {
        let focus = vec![Point2::ORIGIN];
        let p = SpacingProfile::new(0.01, 0.05, focus, 0.2).unwrap();
        assert_eq!(p.spacing_at(Point2::ORIGIN), 0.01);
        assert_eq!(p.spacing_at(Point2::new(0.3, 0.0)), 0.05);
        assert!((p.spacing_at(Point2::new(0.0, 0.1)) - 0.03).abs() < 1e-15);
        assert_eq!(SpacingProfile::uniform(0.2).unwrap().spacing_at(Point2::new(4.0, 4.0)), 0.2);
        assert!(SpacingProfile::new(0.1, 0.05, vec![], 1.0).is_err());
        assert!(SpacingProfile::new(0.01, 0.05, vec![], 0.0).is_err());
    }

    #[test]
    fn resample_unit_circle_constant_spacing() {
        let dom = circle_domain(1.0, 64);
        let h = TAU / 32.0;
        let nodes = resample_boundary(&dom, &SpacingProfile::uniform(h).unwrap(), NodeKind::Outer).unwrap();
        assert!((nodes.len() as i64 - 32).abs() <= 1, "{}", nodes.len());
        for gap in arc_gaps(&dom, &nodes) {
            assert!((0.75..=1.25).contains(&(gap / h)), "gap ratio {}", gap / h);
        }
        for n in &nodes {
            assert!(n.position.distance(dom.closest_point(n.position)) < 1e-9);
            assert!((n.normal.norm() - 1.0).abs() < 1e-12);
            assert!(n.normal.dot(n.position) > 0.0);
        }
    }

    #[test]
    fn resample_count_matches_length_over_spacing() {
        let pts: Vec<Point2> = (0..80)
            .map(|j| {
                let phi = TAU * j as f64 / 80.0;
                Point2::from_polar(0.5 + 0.2 * (4.0 * phi).cos(), phi)
            })
            .collect();
        let dom = ReconstructedDomain::from_unordered(pts).unwrap();
        let length = dom.spline().total_length();
        for h in [0.013, 0.05, 0.11, 0.3] {
            let nodes = resample_boundary(&dom, &SpacingProfile::uniform(h).unwrap(), NodeKind::Dendrite).unwrap();
            assert!((nodes.len() as f64 - (length / h).round()).abs() <= 1.0, "h {h}: {} vs {}", nodes.len(), length / h);
            for gap in arc_gaps(&dom, &nodes) {
                assert!((0.75..=1.25).contains(&(gap / h)));
            }
        }
    }

    #[test]
    fn resample_graded_spacing_stays_within_band() {
        let dom = circle_domain(1.0, 100);
        let profile = SpacingProfile::new(0.02, 0.1, vec![Point2::new(1.0, 0.0)], 0.8).unwrap();
        let nodes = resample_boundary(&dom, &profile, NodeKind::Outer).unwrap();
        let gaps = arc_gaps(&dom, &nodes);
        for (node, gap) in nodes.iter().zip(gaps) {
            let ratio = gap / profile.spacing_at(node.position);
            assert!((0.75..=1.25).contains(&ratio), "ratio {ratio}");
        }
    }

    #[test]
    fn short_curve_rejected() {
        let dom = circle_domain(0.01, 16);
        let err = resample_boundary(&dom, &SpacingProfile::uniform(0.05).unwrap(), NodeKind::Outer).unwrap_err();
        assert!(matches!(err, Error::CurveTooShort { .. }));
    }

    fn assert_min_separation(nodes: &[Point2], profile: &SpacingProfile) {
        for i in 0..nodes.len() {
            for j in i + 1..nodes.len() {
                let h = profile.spacing_at(nodes[i]).min(profile.spacing_at(nodes[j]));
                assert!(nodes[i].distance(nodes[j]) >= 0.7 * h, "nodes {i},{j}");
            }
        }
    }

    /// Interior-node count of the unit-disk fill at h = 0.1, frozen from a
    /// reference run of the default fill configuration.
    const DISK_FILL_DENSITY: f64 = 1.227;

    #[test]
    fn unit_disk_fill() {
        let outer = circle_domain(1.0, 96);
        let h = 0.1;
        let profile = SpacingProfile::uniform(h).unwrap();
        let disc = discretize_region(&outer, None, &profile, &FillConfig::default()).unwrap();
        let n = disc.interior_nodes.len() as f64;
        let estimate = PI / (DISK_FILL_DENSITY * h * h);
        println!("disk fill: {n} interior nodes, estimate {estimate}, c = {}", PI / (n * h * h));
        assert!(n >= 0.7 * estimate && n <= 1.3 * estimate);
        for &p in &disc.interior_nodes {
            assert!(outer.contains(p));
        }
        assert_min_separation(&disc.positions(), &profile);
    }

    #[test]
    fn annulus_fill_respects_both_boundaries_and_covers() {
        let outer = circle_domain(1.0, 120);
        let inner = circle_domain(0.3, 40);
        let profile = SpacingProfile::new(0.03, 0.08, inner.ordered().points().to_vec(), 0.4).unwrap();
        let config = FillConfig::default();
        let disc = discretize_region(&outer, Some(&inner), &profile, &config).unwrap();
        for &p in &disc.interior_nodes {
            assert!(outer.contains(p) && !inner.contains(p));
        }
        let all = disc.positions();
        assert_min_separation(&all, &profile);

        // Coverage: no holes away from the boundaries.
        let index = NeighborIndex::build_unchecked(all.clone()).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let mut probes = 0;
        while probes < 1000 {
            let x = Point2::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0));
            let h = profile.spacing_at(x);
            let r = x.norm();
            if r > 1.0 - h || r < 0.3 + h {
                continue;
            }
            probes += 1;
            let (_, d) = index.nearest(x);
            assert!(d <= 1.5 * h, "hole at {x:?}: nearest node {d}, h {h}");
        }

        let again = discretize_region(&outer, Some(&inner), &profile, &config).unwrap();
        assert_eq!(again.interior_nodes, disc.interior_nodes);
    }

    #[test]
    fn thin_annulus_is_empty() {
        let outer = circle_domain(1.0, 200);
        let inner = circle_domain(0.97, 200);
        let profile = SpacingProfile::uniform(0.1).unwrap();
        let err = discretize_region(&outer, Some(&inner), &profile, &FillConfig::default()).unwrap_err();
        assert!(matches!(err, Error::RegionEmpty));
    }

    #[test]
    fn fixed_seed_is_deterministic() {
        let outer = circle_domain(1.0, 64);
        let profile = SpacingProfile::uniform(0.15).unwrap();
        let run = |seed| discretize_region(&outer, None, &profile, &FillConfig { seed, ..FillConfig::default() }).unwrap().interior_nodes;
        assert_eq!(run(7), run(7));
        assert_ne!(run(7), run(8));
    }
}
