use crate::discretize::NodeKind;
use crate::rbffd::{ScatteredField, StencilWeights};

/// Fixed temperature on the outer (melt) boundary.
pub const OUTER_TEMPERATURE: f64 = 1.0;
/// Fixed temperature on the dendrite boundary.
pub const DENDRITE_TEMPERATURE: f64 = 0.0;

/// One explicit Euler step `T + dt ∇²T` on the interior; boundary nodes are
/// reset to their fixed temperatures. Nodes without a stencil keep their
/// value.
pub fn heat_step(field: &ScatteredField, weights: &[StencilWeights], dt: f64) -> ScatteredField {
    let mut values = field.values.clone();
    for stencil in weights {
        values[stencil.center] = field.values[stencil.center] + dt * stencil.apply(&field.values);
    }
    for (v, kind) in values.iter_mut().zip(&field.kinds) {
        match kind {
            NodeKind::Outer => *v = OUTER_TEMPERATURE,
            NodeKind::Dendrite => *v = DENDRITE_TEMPERATURE,
            NodeKind::Interior => {}
        }
    }
    ScatteredField { nodes: field.nodes.clone(), kinds: field.kinds.clone(), values }
}

/// Largest step that keeps every Gershgorin disc of the discrete Laplacian
/// inside the explicit Euler stability region: `1 / max_i Σ_j |w_ij|`.
pub fn stable_substep(weights: &[StencilWeights]) -> f64 {
    let radius = weights
        .iter()
        .map(|s| s.weights.iter().map(|w| w.abs()).sum::<f64>())
        .fold(0.0, f64::max);
    if radius > 0.0 {
        1.0 / radius
    } else {
        f64::INFINITY
    }
}
