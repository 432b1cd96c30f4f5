//! Simulation and reconstruction laboratory for the discrete 3D Radon
//! inversion of ball phantoms.
//!
//! Exact plane integrals of ball phantoms are sampled on a
//! latitude-longitude direction grid, interpolated in the affine variable
//! with a compactly supported C^2 kernel and inverted by the discrete
//! second-derivative backprojection sum. The edge diagnostics compare the
//! reconstruction across a jump with the predicted transition curve
//! `f0 - f_delta * int_h^inf phi`, and check the genericity conditions
//! under which that prediction holds.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod cli;
pub mod config;
pub mod edge_theory;
pub mod error;
pub mod experiments;
pub mod expr;
pub mod kernel;
pub mod phantom;
pub mod plot;
pub mod poly;
pub mod rational;
pub mod reconstruct;
pub mod sphere_grid;
pub mod sum;
pub mod ud_diag;

pub use error::{Error, Result};
pub use kernel::{build_kernel, Kernel};
pub use phantom::{Ball, JumpParams, Phantom};
pub use reconstruct::{DataProvider, Sinogram};
pub use sphere_grid::SphereGrid;

pub type Vec3 = nalgebra::Vector3<f64>;
