//! Muckenhoupt weights on finite metric measure spaces.

// `!(x > 0.0)` is used on purpose so that NaN is rejected too
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod balls;
pub mod cli;
pub mod error;
pub mod extension;
pub mod factorization;
pub mod io;
pub mod maximal;
pub mod scenario;
pub mod space;
pub mod study;
pub mod subset;
pub mod weights;
pub mod whitney;

pub use error::{Error, Result};
pub use space::MetricMeasureSpace;
pub use subset::Subset;
