pub mod capacity;
pub mod cli;
pub mod error;
pub mod fractal;
pub mod hausdorff;
pub mod kernels;
pub mod laplace_bessel;
pub mod maximal_wolff;
pub mod potential;
pub mod quad;
pub mod translation;
pub mod weighted;

pub use error::{Error, Result};
pub use weighted::{dual_exponent, lambda_a_ball, weighted_mass, weighted_norm, DiscreteMeasure, GridFunction, MultiIndexA, PointPlus};
