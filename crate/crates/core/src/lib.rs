//! Parametric-array loudspeaker modelling: radiators, linear and quasilinear
//! nonlinear acoustic fields, Langevin transducer response and design search.

pub mod error;
pub mod export;
pub mod linfield;
pub mod medium;
pub mod nlfield;
pub mod optimizer;
pub mod radiator;
pub mod special;
pub mod transducer;

pub use error::{Error, Result};
