//! Synthetic dendrite growth in the annulus between a static melt circle and
//! a moving seed.
//!
//! Each step diffuses the temperature, moves the dendrite nodes along their
//! outward normals with an angle-dependent speed, rebuilds the dendrite curve
//! from the moved (unordered) nodes, re-discretizes the gap and carries the
//! temperature over by inverse distance weighting.

mod config;
mod snapshot;

pub use config::{FillParams, SimConfig, SpacingConfig};
pub use snapshot::{read_field_from, read_snapshot, write_field_to, write_snapshot};

use std::f64::consts::TAU;
use std::path::PathBuf;
use std::sync::Arc;
use std::time::Instant;

use serde::Serialize;

use crate::discretize::{fill_interior, resample_boundary, BoundaryNode, FillConfig, NodeKind, Region, SpacingProfile};
use crate::domain::ReconstructedDomain;
use crate::error::{Error, Result};
use crate::geometry::{polyline_self_intersects, polyline_signed_area, NeighborIndex, Point2};
use crate::ordering::OrderedBoundary;
use crate::rbffd::{
    heat_step, idw_transfer, laplacian_operator, solve_poisson, stable_substep, ScatteredField, StencilWeights,
    DENDRITE_TEMPERATURE, OUTER_TEMPERATURE,
};

/// Angular samples used by [`symmetry_metric`].
const SYMMETRY_SAMPLES: usize = 720;

/// `v_d (1/20 + cos²2φ) n`, with `φ` the polar angle of `x` about the origin.
pub fn boundary_velocity(x: Point2, normal: Point2, v_d: f64) -> Point2 {
    let c = (2.0 * x.polar_angle()).cos();
    normal * (v_d * (0.05 + c * c))
}

/// Explicit Euler move of `(position, unit normal)` pairs.
pub fn advance_boundary(nodes: &[(Point2, Point2)], dt: f64, v_d: f64) -> Vec<Point2> {
    nodes.iter().map(|&(x, n)| x + boundary_velocity(x, n, v_d) * dt).collect()
}

/// Farthest crossing of the ray from the origin at angle `phi` with the
/// closed polygon.
pub fn radial_extent(polygon: &[Point2], phi: f64) -> Option<f64> {
    let d = Point2::from_polar(1.0, phi);
    let k = polygon.len();
    let mut best: Option<f64> = None;
    for i in 0..k {
        let (a, b) = (polygon[i], polygon[(i + 1) % k]);
        let e = b - a;
        let denom = d.cross(e);
        if denom == 0.0 {
            continue;
        }
        let s = a.cross(e) / denom;
        let u = a.cross(d) / denom;
        if s >= 0.0 && (0.0..=1.0).contains(&u) {
            best = Some(best.map_or(s, |b| b.max(s)));
        }
    }
    best
}

/// `max_φ |r(φ) - r(φ + π/2)|` over uniformly spaced angles.
pub fn symmetry_metric(polygon: &[Point2]) -> f64 {
    let r = |phi: f64| radial_extent(polygon, phi).unwrap_or(0.0);
    (0..SYMMETRY_SAMPLES)
        .map(|i| {
            let phi = TAU * i as f64 / SYMMETRY_SAMPLES as f64;
            (r(phi) - r(phi + TAU / 4.0)).abs()
        })
        .fold(0.0, f64::max)
}

#[derive(Debug, Clone)]
pub struct SimState {
    pub step: usize,
    pub time: f64,
    /// Outer nodes, dendrite nodes (both in curve order), then interior nodes.
    pub field: ScatteredField,
    pub dendrite_domain: ReconstructedDomain,
    pub outer_domain: Arc<ReconstructedDomain>,
    pub dendrite_nodes: Vec<BoundaryNode>,
}

impl SimState {
    pub fn dendrite_positions(&self) -> Vec<Point2> {
        self.dendrite_nodes.iter().map(|n| n.position).collect()
    }

    pub fn dendrite_area(&self) -> f64 {
        polyline_signed_area(&self.dendrite_positions()).map_or(0.0, f64::abs)
    }
}

#[derive(Debug, Clone, Copy, Serialize)]
pub struct StepRecord {
    pub step: usize,
    pub time: f64,
    pub node_count: usize,
    pub dendrite_node_count: usize,
    pub dendrite_area: f64,
    pub symmetry_metric: f64,
    pub temperature_min: f64,
    pub temperature_max: f64,
    /// Explicit substeps used to cover this step's `dt`.
    pub heat_substeps: usize,
}

pub struct Simulation {
    config: SimConfig,
    state: SimState,
    outer_nodes: Vec<BoundaryNode>,
    weights: Option<Vec<StencilWeights>>,
    last_substeps: usize,
}

fn ring(radius: f64, count: usize, offset: f64) -> Vec<Point2> {
    (0..count).map(|j| Point2::from_polar(radius, offset + TAU * j as f64 / count as f64)).collect()
}

fn knot_nodes(dom: &ReconstructedDomain, kind: NodeKind) -> Vec<BoundaryNode> {
    let ordered = dom.ordered();
    (0..ordered.len())
        .map(|j| {
            let t = dom.spline().knot(j);
            BoundaryNode { position: ordered.ordered_point(j), normal: dom.outward_normal(t), kind, parameter: t }
        })
        .collect()
}

impl Simulation {
    pub fn new(config: SimConfig) -> Result<Self> {
        config.validate()?;
        let sp = config.spacing;
        if config.dt > 0.1 * sp.h_min * sp.h_min {
            log::warn!("dt = {} exceeds 0.1 h_min^2; heat steps will be split into stable substeps", config.dt);
        }
        let per_quarter = |r: f64, h: f64| 4 * ((TAU * r / (4.0 * h)).ceil() as usize).max(1);
        let outer_domain =
            ReconstructedDomain::new(OrderedBoundary::in_given_order(ring(config.r_m, per_quarter(config.r_m, sp.h_max), 0.0))?)?;
        let outer_nodes = knot_nodes(&outer_domain, NodeKind::Outer);

        let seed_points = if config.symmetrize_initial {
            ring(config.r_d, per_quarter(config.r_d, sp.h_min), 0.0)
        } else {
            let count = ((TAU * config.r_d / sp.h_min).ceil() as usize).max(5);
            let offset = (config.seed % 1000) as f64 / 1000.0 * TAU / count as f64;
            ring(config.r_d, count, offset)
        };
        let dendrite_domain = ReconstructedDomain::new(OrderedBoundary::in_given_order(seed_points)?)?;
        let dendrite_nodes = knot_nodes(&dendrite_domain, NodeKind::Dendrite);

        let outer_domain = Arc::new(outer_domain);
        let (nodes, kinds) = discretize(&config, &outer_domain, &outer_nodes, &dendrite_domain, &dendrite_nodes)?;
        let values = match config.initial_temperature {
            Some(t) => kinds.iter().map(|k| boundary_temperature(*k).unwrap_or(t)).collect(),
            None => {
                let bc: Vec<f64> = kinds.iter().filter_map(|k| boundary_temperature(*k)).collect();
                let zero = vec![0.0; nodes.len()];
                solve_poisson(&nodes, &kinds, &zero, &bc, config.rbffd.stencil_size)?.field.values
            }
        };
        let field = ScatteredField::new(nodes, kinds, values)?;
        let state = SimState { step: 0, time: 0.0, field, dendrite_domain, outer_domain, dendrite_nodes };
        Ok(Self { config, state, outer_nodes, weights: None, last_substeps: 0 })
    }

    pub fn config(&self) -> &SimConfig {
        &self.config
    }

    pub fn state(&self) -> &SimState {
        &self.state
    }

    pub fn record(&self) -> StepRecord {
        let s = &self.state;
        let positions = s.dendrite_positions();
        let (lo, hi) = s.field.values.iter().fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &v| (lo.min(v), hi.max(v)));
        StepRecord {
            step: s.step,
            time: s.time,
            node_count: s.field.len(),
            dendrite_node_count: positions.len(),
            dendrite_area: s.dendrite_area(),
            symmetry_metric: symmetry_metric(&positions),
            temperature_min: lo,
            temperature_max: hi,
            heat_substeps: self.last_substeps,
        }
    }

    /// Diffuses the temperature over one `dt`, substepping to stay inside the
    /// explicit stability bound.
    fn heat(&mut self) -> Result<()> {
        if self.weights.is_none() {
            let kinds = &self.state.field.kinds;
            let index = NeighborIndex::build_unchecked(self.state.field.nodes.clone())?;
            self.weights = Some(laplacian_operator(&index, |i| kinds[i] == NodeKind::Interior, self.config.rbffd.stencil_size)?);
        }
        let weights = self.weights.as_ref().expect("just built");
        let dt = self.config.dt;
        let substeps = (dt / stable_substep(weights)).ceil().max(1.0) as usize;
        if substeps > 1 {
            log::debug!("step {}: {substeps} heat substeps", self.state.step + 1);
        }
        let h = dt / substeps as f64;
        for _ in 0..substeps {
            self.state.field = heat_step(&self.state.field, weights, h);
        }
        self.last_substeps = substeps;
        Ok(())
    }

    pub fn step(&mut self) -> Result<StepRecord> {
        let step = self.state.step + 1;
        self.heat()?;

        let moving: Vec<(Point2, Point2)> = self.state.dendrite_nodes.iter().map(|n| (n.position, n.normal)).collect();
        let moved = advance_boundary(&moving, self.config.dt, self.config.v_d);
        let stationary = moved.iter().zip(&moving).all(|(a, (b, _))| a == b);
        if !stationary {
            if polyline_self_intersects(&moved)? {
                return Err(Error::SelfIntersection { step });
            }
            let dendrite = ReconstructedDomain::from_unordered(moved.clone())?;
            let profile = self.profile(moved)?;
            let dendrite_nodes = resample_boundary(&dendrite, &profile, NodeKind::Dendrite)?;
            let positions: Vec<Point2> = dendrite_nodes.iter().map(|n| n.position).collect();
            if polyline_self_intersects(&positions)? {
                return Err(Error::SelfIntersection { step });
            }
            let gap = positions.iter().map(|&p| self.state.outer_domain.distance(p)).fold(f64::INFINITY, f64::min);
            if gap < self.config.spacing.h_max {
                return Err(Error::BoundaryCollision { step, gap });
            }

            let (nodes, kinds) = discretize(&self.config, &self.state.outer_domain, &self.outer_nodes, &dendrite, &dendrite_nodes)?;
            let old = &self.state.field;
            let mut values = idw_transfer(&old.nodes, &old.values, &nodes, &self.config.idw)?;
            for (v, k) in values.iter_mut().zip(&kinds) {
                if let Some(t) = boundary_temperature(*k) {
                    *v = t;
                }
            }
            self.state.field = ScatteredField::new(nodes, kinds, values)?;
            self.state.dendrite_domain = dendrite;
            self.state.dendrite_nodes = dendrite_nodes;
            self.weights = None;
        }
        self.state.step = step;
        self.state.time = step as f64 * self.config.dt;
        Ok(self.record())
    }

    fn profile(&self, focus: Vec<Point2>) -> Result<SpacingProfile> {
        let s = self.config.spacing;
        SpacingProfile::new(s.h_min, s.h_max, focus, s.transition_radius)
    }
}

fn boundary_temperature(kind: NodeKind) -> Option<f64> {
    match kind {
        NodeKind::Outer => Some(OUTER_TEMPERATURE),
        NodeKind::Dendrite => Some(DENDRITE_TEMPERATURE),
        NodeKind::Interior => None,
    }
}

fn discretize(
    config: &SimConfig,
    outer: &ReconstructedDomain,
    outer_nodes: &[BoundaryNode],
    dendrite: &ReconstructedDomain,
    dendrite_nodes: &[BoundaryNode],
) -> Result<(Vec<Point2>, Vec<NodeKind>)> {
    let s = config.spacing;
    let focus = dendrite_nodes.iter().map(|n| n.position).collect();
    let profile = SpacingProfile::new(s.h_min, s.h_max, focus, s.transition_radius)?;
    let boundary: Vec<BoundaryNode> = outer_nodes.iter().chain(dendrite_nodes).copied().collect();
    let fill = FillConfig { candidates: config.fill.candidates, acceptance: config.fill.acceptance, seed: config.seed };
    let interior = fill_interior(Region { outer, inner: Some(dendrite) }, &boundary, &profile, &fill)?;
    let nodes: Vec<Point2> = boundary.iter().map(|n| n.position).chain(interior.iter().copied()).collect();
    let kinds = boundary.iter().map(|n| n.kind).chain(std::iter::repeat_n(NodeKind::Interior, interior.len())).collect();
    Ok((nodes, kinds))
}

#[derive(Debug, Clone, Serialize)]
pub struct RunSummary {
    pub steps: Vec<StepRecord>,
    pub node_counts: Vec<usize>,
    pub dendrite_areas: Vec<f64>,
    pub symmetry_metric: Vec<f64>,
    pub max_symmetry_metric: f64,
    pub temperature_min: f64,
    pub temperature_max: f64,
    pub wall_time_seconds: f64,
    pub snapshots: Vec<PathBuf>,
}

impl RunSummary {
    fn from_records(steps: Vec<StepRecord>, wall_time_seconds: f64, snapshots: Vec<PathBuf>) -> Self {
        Self {
            node_counts: steps.iter().map(|r| r.node_count).collect(),
            dendrite_areas: steps.iter().map(|r| r.dendrite_area).collect(),
            symmetry_metric: steps.iter().map(|r| r.symmetry_metric).collect(),
            max_symmetry_metric: steps.iter().map(|r| r.symmetry_metric).fold(0.0, f64::max),
            temperature_min: steps.iter().map(|r| r.temperature_min).fold(f64::INFINITY, f64::min),
            temperature_max: steps.iter().map(|r| r.temperature_max).fold(f64::NEG_INFINITY, f64::max),
            steps,
            wall_time_seconds,
            snapshots,
        }
    }

    pub fn area_strictly_increasing(&self) -> bool {
        self.dendrite_areas.windows(2).all(|w| w[1] > w[0])
    }
}

/// Runs all `N_t` steps, writing `step_%05d.csv` snapshots (step 0, every
/// `snapshot_every` steps and the last step) and `run_summary.json` into
/// `output_dir`.
pub fn run_simulation(config: &SimConfig) -> Result<RunSummary> {
    let start = Instant::now();
    let dir = config.output_dir.clone();
    std::fs::create_dir_all(&dir).map_err(|e| Error::io(&dir, e))?;
    let mut sim = Simulation::new(config.clone())?;
    let mut snapshots = Vec::new();
    let mut snap = |sim: &Simulation| -> Result<()> {
        let path = dir.join(format!("step_{:05}.csv", sim.state().step));
        write_snapshot(&sim.state().field, &path)?;
        snapshots.push(path);
        Ok(())
    };
    let mut records = vec![sim.record()];
    snap(&sim)?;
    for step in 1..=config.n_t {
        records.push(sim.step()?);
        if step % config.snapshot_every == 0 || step == config.n_t {
            snap(&sim)?;
        }
        log::info!("step {step}/{}: {} nodes", config.n_t, sim.state().field.len());
    }
    let summary = RunSummary::from_records(records, start.elapsed().as_secs_f64(), snapshots);
    let path = dir.join("run_summary.json");
    let json = serde_json::to_string_pretty(&summary).map_err(|e| Error::io(&path, e))?;
    std::fs::write(&path, json).map_err(|e| Error::io(&path, e))?;
    Ok(summary)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::{FRAC_PI_4, PI};

    #[test]
    fn velocity_spot_values() {
        let v = boundary_velocity(Point2::new(0.1, 0.0), Point2::new(1.0, 0.0), 0.04);
        assert!((v.norm() - 0.042).abs() < 1e-12);
        let x = Point2::from_polar(0.1, FRAC_PI_4);
        let v = boundary_velocity(x, x.normalized(), 0.04);
        assert!((v.norm() - 0.002).abs() < 1e-12);
    }

    #[test]
    fn velocity_is_parallel_to_normal_and_four_fold() {
        for i in 0..50 {
            let phi = 0.37 * i as f64;
            let x = Point2::from_polar(0.2, phi);
            let n = Point2::from_polar(1.0, 1.3 * phi);
            let v = boundary_velocity(x, n, 0.04);
            assert!(v.cross(n).abs() < 1e-15);
            let w = boundary_velocity(Point2::from_polar(0.2, phi + PI / 2.0), n, 0.04);
            assert!((v.norm() - w.norm()).abs() < 1e-15);
        }
    }

    #[test]
    fn advance_examples() {
        let moved = advance_boundary(&[(Point2::new(0.1, 0.0), Point2::new(1.0, 0.0))], 0.01, 0.04);
        assert!((moved[0].x - 0.10042).abs() < 1e-15 && moved[0].y == 0.0);
        let pts: Vec<(Point2, Point2)> = (0..40).map(|i| (Point2::from_polar(0.3, 0.1 * i as f64), Point2::from_polar(1.0, 0.2 * i as f64))).collect();
        assert!(advance_boundary(&pts, 0.01, 0.0).iter().zip(&pts).all(|(a, (b, _))| a == b));
        for (a, (b, _)) in advance_boundary(&pts, 0.01, 0.04).iter().zip(&pts) {
            assert!(a.distance(*b) <= 0.01 * 0.04 * 1.05);
        }
    }

    #[test]
    fn radial_extent_of_square() {
        let sq = vec![Point2::new(1.0, -1.0), Point2::new(1.0, 1.0), Point2::new(-1.0, 1.0), Point2::new(-1.0, -1.0)];
        assert!((radial_extent(&sq, 0.0).unwrap() - 1.0).abs() < 1e-15);
        assert!((radial_extent(&sq, FRAC_PI_4).unwrap() - 2f64.sqrt()).abs() < 1e-12);
        assert!(symmetry_metric(&sq) < 1e-12);
        let rect = vec![Point2::new(2.0, -1.0), Point2::new(2.0, 1.0), Point2::new(-2.0, 1.0), Point2::new(-2.0, -1.0)];
        // r(0) = 2 against r(π/2) = 1; near the corner direction atan(1/2)
        // the gap approaches √5 - √5/2.
        let m = symmetry_metric(&rect);
        assert!(m >= 1.0 - 1e-12 && m <= 5f64.sqrt() / 2.0 + 1e-12, "{m}");
    }

    fn coarse(n_t: usize) -> SimConfig {
        SimConfig {
            r_d: 0.25,
            n_t,
            spacing: SpacingConfig { h_min: 0.05, h_max: 0.15, transition_radius: 0.3 },
            ..SimConfig::default()
        }
    }

    #[test]
    fn initial_state_has_fixed_boundary_temperatures() {
        let sim = Simulation::new(SimConfig::default()).unwrap();
        let f = &sim.state().field;
        for (k, v) in f.kinds.iter().zip(&f.values) {
            match k {
                NodeKind::Dendrite => assert_eq!(*v, 0.0),
                NodeKind::Outer => assert_eq!(*v, 1.0),
                NodeKind::Interior => assert!((-1e-9..=1.0 + 1e-9).contains(v)),
            }
        }
        // Symmetrized seed: a multiple of four nodes, starting on the x axis.
        let d = sim.state().dendrite_positions();
        assert_eq!(d.len() % 4, 0);
        assert_eq!(d[0], Point2::new(0.1, 0.0));
        assert!(sim.record().symmetry_metric < 1e-12);
    }

    #[test]
    fn one_step_run_writes_initial_and_final_snapshot() {
        let dir = tempfile::tempdir().unwrap();
        let config = SimConfig { snapshot_every: 1, output_dir: dir.path().to_path_buf(), ..coarse(1) };
        let summary = run_simulation(&config).unwrap();
        assert_eq!(summary.steps.len(), 2);
        let names: Vec<String> = summary.snapshots.iter().map(|p| p.file_name().unwrap().to_string_lossy().into_owned()).collect();
        assert_eq!(names, ["step_00000.csv", "step_00001.csv"]);
        let last = read_snapshot(&summary.snapshots[1]).unwrap();
        assert_eq!(last.len(), summary.node_counts[1]);
        let json: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(dir.path().join("run_summary.json")).unwrap()).unwrap();
        assert_eq!(json["node_counts"].as_array().unwrap().len(), 2);
        assert!(json["wall_time_seconds"].as_f64().unwrap() >= 0.0);
    }

    #[test]
    fn growth_is_monotone_and_bounded_on_a_coarse_run() {
        let mut sim = Simulation::new(coarse(20)).unwrap();
        let mut area = sim.state().dendrite_area();
        for _ in 0..20 {
            let r = sim.step().unwrap();
            assert!(r.dendrite_area > area);
            area = r.dendrite_area;
            assert!(r.temperature_min >= -1e-9 && r.temperature_max <= 1.0 + 1e-9);
            assert!(!polyline_self_intersects(&sim.state().dendrite_positions()).unwrap());
        }
        assert!((sim.state().time - 0.2).abs() < 1e-12);
    }

    /// Max deviation from the exact steady profile ln(r / R_d) / ln(R_m / R_d).
    fn annulus_error(nodes: &[Point2], values: &[f64], config: &SimConfig) -> f64 {
        let exact = |p: Point2| (p.norm() / config.r_d).ln() / (config.r_m / config.r_d).ln();
        nodes.iter().zip(values).map(|(&p, u)| (u - exact(p)).abs()).fold(0.0, f64::max)
    }

    #[test]
    fn steady_start_converges_to_the_annulus_profile() {
        let errors: Vec<f64> = [(0.05, 0.15), (0.02, 0.07)]
            .into_iter()
            .map(|(h_min, h_max)| {
                let config = SimConfig { spacing: SpacingConfig { h_min, h_max, transition_radius: 0.3 }, initial_temperature: None, ..coarse(1) };
                let sim = Simulation::new(config.clone()).unwrap();
                annulus_error(&sim.state().field.nodes, &sim.state().field.values, &config)
            })
            .collect();
        assert!(errors[1] < errors[0] / 3.0, "{errors:?}");
    }

    #[test]
    fn stationary_dendrite_relaxes_to_the_steady_annulus() {
        let config = SimConfig { v_d: 0.0, initial_temperature: Some(1.0), ..coarse(40) };
        let mut sim = Simulation::new(config.clone()).unwrap();
        let start = sim.state().dendrite_positions();
        let f = sim.state().field.clone();
        let bc: Vec<f64> = f.kinds.iter().filter_map(|k| boundary_temperature(*k)).collect();
        let steady = solve_poisson(&f.nodes, &f.kinds, &vec![0.0; f.len()], &bc, 12).unwrap().field.values;
        assert!(annulus_error(&f.nodes, &steady, &config) < 0.1);
        let residual = |sim: &Simulation| -> f64 {
            sim.state().field.values.iter().zip(&steady).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max)
        };
        let mut last = residual(&sim);
        for _ in 0..config.n_t {
            sim.step().unwrap();
            let r = residual(&sim);
            assert!(r < last, "{r} >= {last}");
            last = r;
        }
        assert_eq!(sim.state().dendrite_positions(), start);
        assert!(last < 0.05, "{last}");
    }
}
