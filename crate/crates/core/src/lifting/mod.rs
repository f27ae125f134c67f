//! Data on homogeneous spaces and images, lifted to functions on the group.

mod homogeneous;
mod raster;
mod sphere;

pub use homogeneous::{
    act, lift_homogeneous, lift_samples, project_to_homogeneous, HomogeneousLiftConfig,
};
pub use raster::RasterImage;
pub use sphere::{
    default_lift_quadrature, frame_flip, lattice_to_plane, lift_ambient_dimension,
    lift_block_dimension, lift_image_to_so3_coeffs, lift_image_to_so3_coeffs_with,
    plane_to_lattice, project_first_column, real_symmetry_deviation, render_atom, render_atom_with,
    render_values, right_invariance_deviation, spherical_average, stereographic_inverse,
    RenderChart, RenderOptions, SphericalFunction, CHART_HALF_WIDTH,
};
