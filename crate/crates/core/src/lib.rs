//! Photoionization spectra of an atom coupled to a pumped two-level neighbor
//! by dipole-dipole energy transfer.

pub mod error;
pub mod fano;
pub mod linalg;
pub mod model;
pub mod params;
pub mod quad;
pub mod roots;
pub mod spectra;
pub mod oracle;
pub mod zeros;

pub use error::{Error, Result};
pub use linalg::{Mat2, Vec2};
pub use model::{EffectiveSystem, EnergyGrid};
pub use num_complex::Complex64;
pub use params::{InitialState, NormalizedParams, PhysicalParams};
