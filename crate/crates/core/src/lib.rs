//! Large-scale asymptotics of the continuous wavelet transform: origin
//! expansions of the signal spectrum, Mellin values of the wavelet kernels,
//! the truncated series, and a quadrature oracle to check it against.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod error;
pub mod expansion;
pub mod mellin;
pub mod oracle;
pub mod profiles;
pub mod quad;
pub mod remainder;
pub mod special_fn;

pub use error::{Error, Result};
