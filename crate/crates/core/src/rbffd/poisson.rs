use std::f64::consts::TAU;
use std::time::Instant;

use serde::Serialize;

use crate::discretize::{discretize_region, FillConfig, NodeKind, SpacingProfile};
use crate::domain::ReconstructedDomain;
use crate::ordering::OrderedBoundary;
use crate::error::{Error, Result};
use crate::geometry::{NeighborIndex, Point2};
use crate::rbffd::sparse::{gmres, CsrMatrix, Ilu0};
use crate::rbffd::{laplacian_operator, ScatteredField};

const TOLERANCE: f64 = 1e-10;
const RESTART: usize = 60;
const MAX_ITERATIONS: usize = 5000;

#[derive(Debug, Clone)]
pub struct PoissonSolution {
    pub field: ScatteredField,
    /// `|b - Au| / |b|` of the assembled system.
    pub relative_residual: f64,
    pub iterations: usize,
}

/// Solves `∇²u = rhs` with Dirichlet data. `rhs` has one entry per node (only
/// interior entries are used); `bc` has one entry per boundary node, in node
/// order.
pub fn solve_poisson(
    nodes: &[Point2],
    kinds: &[NodeKind],
    rhs: &[f64],
    bc: &[f64],
    stencil_size: usize,
) -> Result<PoissonSolution> {
    let n = nodes.len();
    if kinds.len() != n || rhs.len() != n {
        return Err(Error::InvalidInput(format!("{n} nodes, {} kinds, {} rhs values", kinds.len(), rhs.len())));
    }
    let boundary_count = kinds.iter().filter(|k| k.is_boundary()).count();
    if bc.len() != boundary_count {
        return Err(Error::InvalidInput(format!("{boundary_count} boundary nodes but {} boundary values", bc.len())));
    }
    let index = NeighborIndex::build(nodes.to_vec())?;
    let stencils = laplacian_operator(&index, |i| !kinds[i].is_boundary(), stencil_size)?;

    let mut rows: Vec<Vec<(usize, f64)>> = vec![Vec::new(); n];
    let mut b = vec![0.0; n];
    let mut bc_iter = bc.iter();
    for i in 0..n {
        if kinds[i].is_boundary() {
            rows[i].push((i, 1.0));
            b[i] = *bc_iter.next().expect("counted above");
        } else {
            b[i] = rhs[i];
        }
    }
    for s in stencils {
        rows[s.center] = s.neighbors.into_iter().zip(s.weights).collect();
    }
    let a = CsrMatrix::from_rows(rows);
    let ilu = Ilu0::new(&a);
    let mut x = vec![0.0; n];
    let outcome = gmres(&a, ilu.as_ref(), &b, &mut x, TOLERANCE, RESTART, MAX_ITERATIONS);
    if !outcome.converged || x.iter().any(|v| !v.is_finite()) {
        return Err(Error::SolverDiverged { iterations: outcome.iterations, residual: outcome.relative_residual });
    }
    // Identity rows hold only to the solver tolerance; impose the data exactly.
    for (v, &b_i) in x.iter_mut().zip(&b).zip(kinds).filter(|(_, k)| k.is_boundary()).map(|(p, _)| p) {
        *v = b_i;
    }
    Ok(PoissonSolution {
        field: ScatteredField { nodes: nodes.to_vec(), kinds: kinds.to_vec(), values: x },
        relative_residual: outcome.relative_residual,
        iterations: outcome.iterations,
    })
}

/// Known solution used by [`disk_harness`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DiskOracle {
    /// `u = 1 - x² - y²`, `∇²u = -4`.
    Paraboloid,
    /// `u = sin(x) e^y`, harmonic and not a polynomial.
    Harmonic,
}

impl DiskOracle {
    fn exact(self, p: Point2) -> f64 {
        match self {
            DiskOracle::Paraboloid => 1.0 - p.norm_squared(),
            DiskOracle::Harmonic => p.x.sin() * p.y.exp(),
        }
    }

    fn laplacian(self) -> f64 {
        match self {
            DiskOracle::Paraboloid => -4.0,
            DiskOracle::Harmonic => 0.0,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct HarnessReport {
    pub nodes: usize,
    pub max_error: f64,
    pub relative_residual: f64,
    pub iterations: usize,
    pub wall_time_seconds: f64,
}

/// Dirichlet problem on the unit disk discretized with uniform spacing `h`.
pub fn disk_harness(h: f64, oracle: DiskOracle, stencil_size: usize, seed: u64) -> Result<HarnessReport> {
    let start = Instant::now();
    if !(h > 0.0 && h < 1.0) {
        return Err(Error::InvalidInput(format!("spacing {h} must lie in (0, 1)")));
    }
    let k = (TAU / h).ceil() as usize;
    let ring = (0..k).map(|j| Point2::from_polar(1.0, TAU * j as f64 / k as f64)).collect();
    let outer = ReconstructedDomain::new(OrderedBoundary::in_given_order(ring)?)?;
    let config = FillConfig { seed, ..FillConfig::default() };
    let d = discretize_region(&outer, None, &SpacingProfile::uniform(h)?, &config)?;
    let (nodes, kinds) = (d.positions(), d.kinds());
    let rhs = vec![oracle.laplacian(); nodes.len()];
    let bc: Vec<f64> = d.boundary_nodes.iter().map(|b| oracle.exact(b.position)).collect();
    let sol = solve_poisson(&nodes, &kinds, &rhs, &bc, stencil_size)?;
    let max_error = nodes.iter().zip(&sol.field.values).map(|(&p, u)| (u - oracle.exact(p)).abs()).fold(0.0, f64::max);
    Ok(HarnessReport {
        nodes: nodes.len(),
        max_error,
        relative_residual: sol.relative_residual,
        iterations: sol.iterations,
        wall_time_seconds: start.elapsed().as_secs_f64(),
    })
}
