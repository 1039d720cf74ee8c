//! Discrete Fourier calculus on a periodic cube.

mod fft;
pub mod field;
pub mod grid;
pub mod norms;
pub mod ops;

pub use field::{FieldData, Representation, ScalarField, VectorField3};
pub use grid::Grid;
pub use norms::{
    grad_sup_norm, hessian_sup_norm, inner_product, l2_norm, lp_norm, sobolev_seminorm, sup_norm,
    sup_norm_scalar, sup_norm_vector, Components, Pointwise, Sampling,
};
pub use ops::{
    curl, dealias, dealias_scalar, divergence, gradient, laplacian, leray_project, vector_gradient,
    TensorField3,
};

pub(crate) use fft::{forward, inverse};
