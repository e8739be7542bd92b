//! Numerical building blocks shared by the gain computations.

pub mod optimize;
pub mod quadrature;
pub mod special;
pub mod sum;

pub use optimize::{golden_max, golden_min, refine_grid_max, refine_top_maxima, Extremum};
pub use quadrature::{integrate, Integral, QuadratureConfig};
pub use sum::pairwise_sum;
