//! Data-driven moment matching: informativity tests, moment estimation and
//! reduced-order model synthesis from a single input/output trajectory.

pub mod cli;
pub mod error;
pub mod informativity;
pub mod numlin;
pub mod polynomial;
pub mod romsynth;
pub mod simkit;
pub mod trajectory;

pub use error::{Error, Result};
pub use informativity::{InterpolationSpec, MomentEntry, MomentSet};
pub use numlin::Tolerances;
pub use polynomial::SystemParams;
pub use romsynth::ReducedModel;
pub use trajectory::{HankelPair, Trajectory};
