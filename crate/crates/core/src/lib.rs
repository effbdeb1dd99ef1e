// `!(x > 0.0)` is used on purpose so that NaN is rejected too.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod bessel;
pub mod bifurcation;
pub mod burnside;
pub mod caps;
pub mod cli;
pub mod degree;
pub mod error;
pub mod spectral;

pub use error::{Error, Result};

/// Version stamped into every JSON report and accepted on input.
pub const SCHEMA_VERSION: u32 = 1;
