pub mod error;
pub mod growthfn;
pub mod holo;
pub mod legendre;
pub mod numerics;
pub mod registry;
pub mod sequences;

pub use error::{Error, Result};
pub use growthfn::GrowthFunction;
pub use legendre::{dual, ell, inverse_legendre, l_function, l_sharp, EllValue, LegendreProfile, LogConcaveProfile};
pub use numerics::LogScalar;
pub use sequences::PositiveSequence;
