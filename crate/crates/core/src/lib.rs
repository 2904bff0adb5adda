//! Exact-arithmetic verification engine for a commuting family of
//! q-integral transformations `I(alpha)` acting on formal power series in
//! the cone variables `x_i = zeta_{i+1}/zeta_i`.
//!
//! All arithmetic is over arbitrary-precision rationals. Parameters are
//! given through square roots `u = q^{1/2}` and `v = t^{1/2}` so that every
//! half power appearing in the kernel stays rational.

pub mod cli;
pub mod eigen;
pub mod error;
pub mod hyperg;
pub mod matrix;
pub mod qkernel;
pub mod series;
pub mod special;
pub mod verify;
pub mod xform;

pub use error::{Error, Result};
pub use qkernel::{ParamPoint, Scalar};
pub use series::{ConeSeries, Exponent, Truncation};
