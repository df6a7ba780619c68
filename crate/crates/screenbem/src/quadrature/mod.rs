//! Quadrature rules: regular tensor Gauss, near-singular graded composites,
//! and singular panel-pair rules for the weakly singular Helmholtz kernels.

pub mod gauss;
pub mod segment;
pub mod triangle;

pub use gauss::{gauss_legendre, gauss_on_interval, gauss_on_triangle};
pub use segment::{
    integrate_segment_graded, log_pair_integral, quad_regular_segments, segment_pair_block,
    segment_pair_phi, segments_close, Affine, SegPairBlock, Segment,
};
pub use triangle::{
    quad_regular_triangles, triangle_pair_block, triangle_pair_phi, triangle_potential_affine,
    triangle_potential_const, triangle_potential_moments, Affine2, PairConfig, TriPairBlock,
    Triangle,
};

/// Quadrature orders used across assembly and evaluation.
///
/// Defaults: 5-point Gauss per dimension for regular pairs, composite
/// order 10 when the panel distance is below the panel diameter, 8 points
/// per coordinate for the transformed singular rules, 16 points per edge
/// in the semi-analytic fan.
#[derive(Debug, Clone, Copy, serde::Serialize, serde::Deserialize)]
pub struct QuadSpec {
    pub regular_order: usize,
    pub near_order: usize,
    pub singular_order: usize,
    pub theta_order: usize,
}

impl Default for QuadSpec {
    fn default() -> Self {
        QuadSpec {
            regular_order: 5,
            near_order: 10,
            singular_order: 8,
            theta_order: 16,
        }
    }
}

impl QuadSpec {
    /// Uniform override of the base order, keeping the ratios of the defaults.
    pub fn with_base_order(order: usize) -> Self {
        QuadSpec {
            regular_order: order,
            near_order: 2 * order,
            singular_order: (order + 3).min(2 * order),
            theta_order: 3 * order + 1,
        }
    }
}
