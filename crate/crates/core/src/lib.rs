//! Pseudo-spectral solver for resistive electron-MHD and Hall-MHD on a
//! periodic cube, with continuation-criterion diagnostics and a harness for
//! checking Littlewood–Paley inequalities numerically.

// `!(x > 0.0)` is used deliberately so that NaN is rejected along with
// non-positive values.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod diagnostics;
pub mod dynamics;
pub mod error;
pub mod fields;
pub mod inequality_lab;
pub mod littlewood_paley;
pub mod spectral;
pub mod timestepper;

pub use error::{Error, Result};
