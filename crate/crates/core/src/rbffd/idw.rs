use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{NeighborIndex, Point2};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct IdwConfig {
    pub k_sources: usize,
    pub power: f64,
}

impl Default for IdwConfig {
    fn default() -> Self {
        Self { k_sources: 4, power: 2.0 }
    }
}

/// Shepard interpolation of `values` (given at `sources`) onto `targets`,
/// using the `k_sources` nearest sources with weights `d^-power`.
pub fn idw_transfer(sources: &[Point2], values: &[f64], targets: &[Point2], config: &IdwConfig) -> Result<Vec<f64>> {
    if sources.len() != values.len() {
        return Err(Error::InvalidInput(format!("{} sources but {} values", sources.len(), values.len())));
    }
    if config.k_sources == 0 || config.k_sources > sources.len() {
        return Err(Error::NotEnoughNodes { requested: config.k_sources, available: sources.len() });
    }
    let index = NeighborIndex::build_unchecked(sources.to_vec())?;
    Ok(targets
        .iter()
        .map(|&x| {
            let near = index.nearest_k(x, config.k_sources, None);
            if near[0].1 < 1e-12 {
                return values[near[0].0];
            }
            let (mut num, mut den) = (0.0, 0.0);
            for (j, d) in near {
                let w = d.powf(-config.power);
                num += w * values[j];
                den += w;
            }
            num / den
        })
        .collect())
}
