//! Certified enclosures of six-fold Bessel product integrals and
//! positive-definiteness certificates for the band-limited extension blocks.

pub mod ball;
pub mod bessel;
pub mod engine;
pub mod error;
pub mod quadrature;
pub mod spectral;
pub mod tail;

pub use ball::{Ball, BigFloat, DoubleDouble, Midpoint, Precision};
pub use error::{Error, Result};

/// Balls with a double midpoint.
pub type Ball64 = Ball<f64>;
/// Balls with a 106-bit double-double midpoint.
pub type BallDd = Ball<DoubleDouble>;
/// Balls with an MPFR midpoint at run-time precision.
pub type BallMp = Ball<BigFloat>;
