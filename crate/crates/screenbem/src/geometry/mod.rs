//! Screen geometry: regions, prefractal families, dyadic approximations and
//! panel meshes.

pub mod dyadic;
pub mod mesh;
pub mod prefractal;
pub mod region;

pub use dyadic::{grid_inner_approx, grid_outer_approx};
pub use mesh::{mesh_point_triangle_distance, Panels, ScreenPanelMesh};
pub use prefractal::{
    cantor_dust_prefractal, cantor_prefractal, irregular_circles, koch_prefractal,
    sierpinski_prefractal, solid_minus_cantor, solid_minus_swiss_cheese,
    swiss_cheese_prefractal, unit_screen, PrefractalFamily, SwissCheeseParams,
};
pub use region::{clip_convex, ConvexPolygon, Interval, RegionCells, RegionKind, ScreenRegion};
