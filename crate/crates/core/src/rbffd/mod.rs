//! RBF-FD approximation of the Laplacian on scattered nodes.
//!
//! Each stencil's weights come from collocating the cubic polyharmonic kernel
//! `r³` on the stencil, augmented with the six monomials of degree at most
//! two, so the weights differentiate every quadratic exactly.

mod heat;
mod idw;
mod poisson;
mod sparse;

pub use heat::{heat_step, stable_substep, DENDRITE_TEMPERATURE, OUTER_TEMPERATURE};
pub use idw::{idw_transfer, IdwConfig};
pub use poisson::{disk_harness, solve_poisson, DiskOracle, HarnessReport, PoissonSolution};
pub use sparse::{gmres, CsrMatrix, GmresOutcome, Ilu0};

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::discretize::NodeKind;
use crate::error::{Error, Result};
use crate::geometry::{NeighborIndex, Point2};

/// Monomials up to degree two.
pub const MONOMIALS: usize = 6;
/// Largest accepted 1-norm condition estimate of the scaled local system.
pub const CONDITION_LIMIT: f64 = 1e12;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct RbffdConfig {
    pub stencil_size: usize,
}

impl Default for RbffdConfig {
    fn default() -> Self {
        Self { stencil_size: 12 }
    }
}

/// Node positions, kinds and one scalar per node.
#[derive(Debug, Clone, PartialEq)]
pub struct ScatteredField {
    pub nodes: Vec<Point2>,
    pub kinds: Vec<NodeKind>,
    pub values: Vec<f64>,
}

impl ScatteredField {
    pub fn new(nodes: Vec<Point2>, kinds: Vec<NodeKind>, values: Vec<f64>) -> Result<Self> {
        if nodes.len() != kinds.len() || nodes.len() != values.len() {
            return Err(Error::InvalidInput(format!(
                "field lengths differ: {} nodes, {} kinds, {} values",
                nodes.len(),
                kinds.len(),
                values.len()
            )));
        }
        crate::geometry::check_finite(&nodes)?;
        if let Some(i) = values.iter().position(|v| !v.is_finite()) {
            return Err(Error::InvalidInput(format!("value {i} is not finite")));
        }
        Ok(Self { nodes, kinds, values })
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn interior_indices(&self) -> impl Iterator<Item = usize> + '_ {
        self.kinds.iter().enumerate().filter(|(_, k)| !k.is_boundary()).map(|(i, _)| i)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct StencilWeights {
    pub center: usize,
    pub neighbors: Vec<usize>,
    pub weights: Vec<f64>,
}

impl StencilWeights {
    pub fn apply(&self, values: &[f64]) -> f64 {
        self.neighbors.iter().zip(&self.weights).map(|(&j, w)| w * values[j]).sum()
    }
}

/// The `n` nodes closest to `center`, the center first, then by distance
/// with ties broken by index.
pub fn select_stencil(index: &NeighborIndex, center: usize, n: usize) -> Result<Vec<usize>> {
    if center >= index.len() {
        return Err(Error::IndexOutOfRange { index: center, len: index.len() });
    }
    if n == 0 || n > index.len() {
        return Err(Error::NotEnoughNodes { requested: n, available: index.len() });
    }
    let mut stencil = Vec::with_capacity(n);
    stencil.push(center);
    stencil.extend(index.nearest_k(index.point(center), n - 1, Some(center)).into_iter().map(|(j, _)| j));
    Ok(stencil)
}

fn monomials(p: Point2) -> [f64; MONOMIALS] {
    [1.0, p.x, p.y, p.x * p.x, p.x * p.y, p.y * p.y]
}

/// Laplacian of each monomial at the origin.
const MONOMIAL_LAPLACIAN: [f64; MONOMIALS] = [0.0, 0.0, 0.0, 2.0, 0.0, 2.0];

/// Laplacian weights at `points[0]` from the augmented `r³` system.
pub fn laplacian_weights(points: &[Point2]) -> Result<Vec<f64>> {
    let n = points.len();
    if n < MONOMIALS {
        return Err(Error::TooFewPoints { required: MONOMIALS, got: n });
    }
    let center = points[0];
    let scale = points.iter().map(|p| p.distance(center)).fold(0.0, f64::max);
    if scale <= 0.0 {
        return Err(Error::SingularStencil { condition: f64::INFINITY });
    }
    let local: Vec<Point2> = points.iter().map(|&p| (p - center) * (1.0 / scale)).collect();

    let size = n + MONOMIALS;
    let mut m = DMatrix::<f64>::zeros(size, size);
    let mut rhs = DVector::<f64>::zeros(size);
    for i in 0..n {
        for j in 0..n {
            m[(i, j)] = local[i].distance(local[j]).powi(3);
        }
        for (k, v) in monomials(local[i]).into_iter().enumerate() {
            m[(i, n + k)] = v;
            m[(n + k, i)] = v;
        }
        // Laplacian of r³ in the plane is 9r.
        rhs[i] = 9.0 * local[i].norm();
    }
    for k in 0..MONOMIALS {
        rhs[n + k] = MONOMIAL_LAPLACIAN[k];
    }

    let lu = m.clone().lu();
    let inverse = lu.try_inverse().ok_or(Error::SingularStencil { condition: f64::INFINITY })?;
    let condition = norm1(&m) * norm1(&inverse);
    if !condition.is_finite() || condition > CONDITION_LIMIT {
        return Err(Error::SingularStencil { condition });
    }
    let solution = inverse * rhs;
    let inv_s2 = 1.0 / (scale * scale);
    Ok(solution.iter().take(n).map(|w| w * inv_s2).collect())
}

fn norm1(m: &DMatrix<f64>) -> f64 {
    m.column_iter().map(|c| c.iter().map(|v| v.abs()).sum::<f64>()).fold(0.0, f64::max)
}

/// Laplacian stencils for every node selected by `at`.
pub fn laplacian_operator(
    index: &NeighborIndex,
    at: impl Fn(usize) -> bool,
    stencil_size: usize,
) -> Result<Vec<StencilWeights>> {
    (0..index.len())
        .filter(|&i| at(i))
        .map(|i| {
            let neighbors = select_stencil(index, i, stencil_size)?;
            let pts: Vec<Point2> = neighbors.iter().map(|&j| index.point(j)).collect();
            let weights = laplacian_weights(&pts)?;
            Ok(StencilWeights { center: i, neighbors, weights })
        })
        .collect()
}
