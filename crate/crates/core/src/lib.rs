//! Distance-based incompatibility and maximal-disturbance measures for
//! quantum observables, POVMs and instruments in finite dimension.

pub mod accessible;
pub mod construct;
pub mod error;
pub mod incompat;
pub mod linalg;
pub mod measurement;
pub mod observable;
pub mod optimize;
pub mod prob;
pub mod quantum;
pub mod state;

pub use error::{Error, Result};
