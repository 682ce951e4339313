//! Truncated signatures of piecewise linear paths and their inversion by
//! the insertion method.
//!
//! * [`tensor`]: flat row-major tensors and the truncated tensor algebra.
//! * [`path`] and [`signature`]: paths, segment geometry, Chen products.
//! * [`insertion`]: the insertion map, its adjoint and path reconstruction.
//! * [`development`]: hyperbolic development and the operator-norm bound.
//! * [`bounds`]: numeric error envelopes for slope recovery.
//! * [`pipeline`] and [`samples`]: round trips, trend extraction and
//!   seeded example paths.

// `!(x > y)` is used on purpose: it also rejects NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod bounds;
pub mod development;
pub mod error;
pub mod insertion;
pub mod path;
pub mod pipeline;
pub mod samples;
pub mod signature;
pub mod tensor;

pub use error::{Error, ErrorClass, Result};
pub use insertion::{batch_invert, invert_signature, InversionResult};
pub use path::{constant_speed_reparam, segment_geometry, PiecewiseLinearPath, SegmentGeometry};
pub use signature::{chen_concat, linear_signature, path_signature, riemann_oracle};
pub use tensor::{MultiIndex, TensorLevel, TruncatedSignature};
