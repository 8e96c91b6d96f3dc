// Negated comparisons reject NaN along with out-of-range values.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod channels;
pub mod classical;
pub mod distributions;
pub mod error;
pub mod numerics;
pub mod optimize;
pub mod par;
pub mod rates;
pub mod sweep;
pub mod validate;

pub use error::{Error, Result};
