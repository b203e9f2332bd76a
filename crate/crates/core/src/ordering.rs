//! Recovery of curve-adjacency order from an unordered boundary sample.
//!
//! Starting from input point 0, the walk repeatedly steps to the closest
//! point that has not been placed yet, querying the k-d tree for the 1st,
//! 2nd, ... nearest neighbor of the current point until a fresh one appears.
//! Only the permutation and its inverse are stored.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::geometry::{polyline_self_intersects, NeighborIndex, Point2};

#[derive(Debug, Clone)]
pub struct OrderedBoundary {
    index: NeighborIndex,
    /// `sigma[j]` is the input index of the j-th point along the curve.
    sigma: Vec<usize>,
    /// `sigma_inv[i]` is the curve position of input point `i`.
    sigma_inv: Vec<usize>,
}

impl OrderedBoundary {
    /// Wraps an already known order, e.g. points that are generated in curve
    /// order. `sigma` must be a permutation of `0..points.len()`.
    pub fn from_permutation(points: Vec<Point2>, sigma: Vec<usize>) -> Result<Self> {
        let k = points.len();
        if k < 3 {
            return Err(Error::TooFewPoints { required: 3, got: k });
        }
        if sigma.len() != k {
            return Err(Error::InvalidInput(format!("permutation has length {} for {k} points", sigma.len())));
        }
        let mut sigma_inv = vec![usize::MAX; k];
        for (pos, &i) in sigma.iter().enumerate() {
            if i >= k || sigma_inv[i] != usize::MAX {
                return Err(Error::InvalidInput("sigma is not a permutation".into()));
            }
            sigma_inv[i] = pos;
        }
        let index = NeighborIndex::build(points)?;
        Ok(Self { index, sigma, sigma_inv })
    }

    /// Points that are already in curve order.
    pub fn in_given_order(points: Vec<Point2>) -> Result<Self> {
        let sigma = (0..points.len()).collect();
        Self::from_permutation(points, sigma)
    }

    pub fn len(&self) -> usize {
        self.sigma.len()
    }

    pub fn is_empty(&self) -> bool {
        self.sigma.is_empty()
    }

    /// Points in their original input order.
    pub fn points(&self) -> &[Point2] {
        self.index.points()
    }

    pub fn sigma(&self) -> &[usize] {
        &self.sigma
    }

    pub fn sigma_inv(&self) -> &[usize] {
        &self.sigma_inv
    }

    pub fn index(&self) -> &NeighborIndex {
        &self.index
    }

    /// Point at curve position `pos` (wrapping).
    pub fn ordered_point(&self, pos: usize) -> Point2 {
        self.index.point(self.sigma[pos % self.len()])
    }

    pub fn ordered_points(&self) -> Vec<Point2> {
        self.sigma.iter().map(|&i| self.index.point(i)).collect()
    }

    /// Input indices of the curve neighbors of input point `i`.
    pub fn adjacent(&self, i: usize) -> (usize, usize) {
        let k = self.len();
        let pos = self.sigma_inv[i];
        (self.sigma[(pos + k - 1) % k], self.sigma[(pos + 1) % k])
    }
}

pub fn order_points(points: Vec<Point2>) -> Result<OrderedBoundary> {
    let k = points.len();
    if k < 3 {
        return Err(Error::TooFewPoints { required: 3, got: k });
    }
    let index = NeighborIndex::build(points)?;
    let mut sigma = Vec::with_capacity(k);
    let mut sigma_inv = vec![usize::MAX; k];
    sigma.push(0);
    sigma_inv[0] = 0;

    for j in 0..k - 1 {
        let current = sigma[j];
        let mut rank = 1;
        loop {
            if rank > k - 1 {
                return Err(Error::OrderingStalled { placed: j + 1, total: k });
            }
            let p = index.nth_nearest(current, rank)?;
            if sigma_inv[p] == usize::MAX {
                sigma_inv[p] = j + 1;
                sigma.push(p);
                break;
            }
            rank += 1;
        }
    }
    Ok(OrderedBoundary { index, sigma, sigma_inv })
}

/// Sample-based check of the density assumptions the ordering relies on.
#[derive(Debug, Clone, Serialize)]
pub struct DensityReport {
    /// Input indices whose nearest neighbor is not one of their two curve neighbors.
    pub condition3_violations: Vec<usize>,
    /// Minimum over all points of (distance to the nearest non-adjacent
    /// point) / (distance to the farther curve neighbor). Values of at least
    /// one suggest the sample separates the curve cleanly. Infinite (written
    /// as `null`) when no non-adjacent point exists.
    pub min_neighbor_gap_ratio: f64,
    pub ordered_polyline_self_intersects: bool,
}

impl DensityReport {
    pub fn is_clean(&self) -> bool {
        self.condition3_violations.is_empty() && !self.ordered_polyline_self_intersects && self.min_neighbor_gap_ratio >= 1.0
    }
}

pub fn validate_density(ordered: &OrderedBoundary) -> DensityReport {
    let k = ordered.len();
    let index = ordered.index();
    let mut violations = Vec::new();
    let mut min_ratio = f64::INFINITY;
    for i in 0..k {
        let (p, q) = ordered.adjacent(i);
        let x = index.point(i);
        let nearest = index.nth_nearest(i, 1).expect("k >= 3");
        if nearest != p && nearest != q {
            violations.push(i);
        }
        let adjacent_reach = x.distance(index.point(p)).max(x.distance(index.point(q)));
        let non_adjacent = (1..k).map(|n| index.nth_nearest(i, n).expect("rank in range")).find(|&j| j != p && j != q);
        if let Some(j) = non_adjacent {
            min_ratio = min_ratio.min(x.distance(index.point(j)) / adjacent_reach);
        }
    }
    let ordered_polyline_self_intersects = polyline_self_intersects(&ordered.ordered_points()).unwrap_or(false);
    DensityReport { condition3_violations: violations, min_neighbor_gap_ratio: min_ratio, ordered_polyline_self_intersects }
}
