//! Local invariants of almost Grassmann structures `AG(p-1, p+q-1)`.
//!
//! The crate is organised bottom-up:
//!
//! * [`tensor`]: indexed tensors over the Greek (`0..p`) and Latin (`0..q`) alphabets.
//! * [`torsion`]: raw structure coefficients, their projection onto the torsion
//!   tensor and its two subtensors.
//! * [`curvature`]: second-order objects `b` and `c`, solved from the exterior
//!   differential prolongation, and the flatness and semiintegrability tests.
//! * [`geometry`]: the Segre cone and Grassmann coordinate charts.
//! * [`coframe`]: sampled coframe fields and the finite-difference pipeline
//!   from a field to the torsion and its Pfaffian derivatives.
//! * [`analysis`]: the whole pipeline on a field, with an aggregate verdict.
//! * [`verify`]: seeded property suites.

pub mod error;
pub mod tensor;
pub mod curvature;
pub mod lsq;
pub mod torsion;
pub mod geometry;
pub mod coframe;
pub mod analysis;
pub mod verify;
mod par;

pub use error::{Error, Result};
