//! Explicit geometric- and spectral-side quantities of the trace formula for
//! `SL₂` and `GL₂` over quadratic fields, with certified numerics.

// `!(x > 0.0)` also rejects NaN
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod bounds;
pub mod bt_orbital;
pub mod certified;
pub mod error;
pub mod fields;
pub mod io_cli;
pub mod lattices;
pub mod lfun;
pub mod report;
pub mod sigma;
pub mod volumes;

pub use certified::CertifiedReal;
pub use error::{Error, Result};
pub use report::BoundReport;
pub use volumes::GroupKind;
