pub mod autiso;
pub mod blocks;
pub mod budget;
pub mod ccd;
pub mod classifier;
mod chain;
pub mod error;
pub mod families;
pub mod group;
pub mod io;
pub mod moves;
pub mod partition;
pub mod perm;
mod refine;
pub mod theory;
pub mod uh;

pub use autiso::PartialIso;
pub use blocks::BlockSystem;
pub use budget::Budget;
pub use ccd::{Ccd, Connectivity, OrientedGraph};
pub use error::{Error, Result};
pub use group::PermGroup;
pub use partition::OrderedPartition;
pub use perm::Perm;
pub use uh::UhVerdict;
pub use moves::{ColorMove, Equivalence};
pub use families::FamilySpec;
pub use classifier::{Classification, ClassificationCertificate};
