pub mod asymptotics;
pub mod dd;
pub mod dhgm;
pub mod error;
pub mod gfc;
pub mod hgm;
pub mod inference;
pub mod partition;
pub mod pfaffian;
pub mod recurrence;
pub mod sampling;
pub mod scalar;
pub mod scaled;

pub use dd::DoubleDouble;
pub use error::{Error, Result};
pub use scalar::{Real, Weight};
pub use scaled::Scaled;

pub type ScaledValue = Scaled<f64>;
pub type ScaledDD = Scaled<DoubleDouble>;
pub type Rational = num_rational::BigRational;
