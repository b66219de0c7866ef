//! Scattered-data quasi-interpolation with linear and WENO-weighted Shepard
//! operators.
//!
//! The linear operator averages node values with normalized, compactly
//! supported Wendland weights. The WENO variant damps each weight by a
//! power of the node's smoothness indicator, so nodes whose neighbourhood
//! straddles a jump barely contribute and the reconstruction stays sharp.
//!
//! ```
//! use wenoshep_core::{regular_grid, franke, Interpolant, KernelFamily, Mode, WeightKernel, WenoConfig};
//!
//! let nodes = regular_grid(4, franke).unwrap();
//! let kernel = WeightKernel::for_level(KernelFamily::WendlandC2, 4).unwrap();
//! let interp = Interpolant::build(nodes, kernel, 2.5, WenoConfig::default(), Mode::Weno).unwrap();
//! let v = interp.eval(&[0.3, 0.4]).unwrap();
//! assert!((v - franke(0.3, 0.4)).abs() < 0.1);
//! ```

pub mod error;
pub mod experiment;
pub mod kernels;
pub mod points;
pub mod report;
pub mod shepard;
pub mod smoothness;
pub mod test_functions;
pub mod weno;

pub use error::{Error, Result};
pub use kernels::{
    shape_parameter_for_level, wendland_c2, wendland_c4, CustomKernel, KernelFamily, RadialKernel,
    WeightKernel,
};
pub use points::{
    fill_distance, halton_points, halton_points_from, radical_inverse, regular_grid, BoundingBox,
    FillDistanceEstimate, PointSet,
};
pub use shepard::{eval_shepard, shepard_weights, WeightVector};
pub use smoothness::{
    all_indicators, build_stencil, linear_lsq_fit, smoothness_indicator, IndicatorVector,
    LinearFit, RadiusRule, Stencil,
};
pub use test_functions::{franke, piecewise_tilde_f, Geometry, TestField};
pub use weno::{nonlinear_weights, Interpolant, Mode, WenoConfig};
