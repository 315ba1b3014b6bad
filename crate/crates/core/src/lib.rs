//! Recurrence and transience of rotor walks on the half-line and on regular trees.
//!
//! The crate is organised bottom-up: [`sequence`] and [`utable`] describe
//! eventually periodic rotor sequences and their U-functions, [`dist`] and
//! [`assignment`] describe configurations, [`unary`] and [`tree`] implement
//! the exact criteria, and [`sim`] is an explicit rotor-walk simulator used
//! as an oracle for all of them.
//!
//! ```
//! use rotorwalk::{RotorSequence, SupportDistribution, tree};
//!
//! let s = RotorSequence::parse("(010122)", 2)?;
//! let dist = SupportDistribution::uniform_rotation(&s)?;
//! let m = tree::moment_matrix(&dist, 2)?;
//! assert_eq!(m.to_string_rows(), vec![vec!["1/3", "2/3"], vec!["1/3", "1"]]);
//! # Ok::<(), rotorwalk::Error>(())
//! ```

pub mod assignment;
pub mod dist;
pub mod error;
pub mod sequence;
pub mod sim;
pub mod spectral;
pub mod tree;
pub mod unary;
pub mod utable;

pub use assignment::{sample_config, Assignment};
pub use dist::{parse_rational, ratio, Atom, SupportDistribution};
pub use error::{Error, Result};
pub use sequence::RotorSequence;
pub use spectral::{spectral_radius, RationalMatrix, SpectralRadius, Verdict};
pub use tree::{MomentMatrix, PieceDecomposition, TreeVerdict};
pub use unary::{ExcursionOutcome, KStar, LeftoverConfig, ZTrajectory};
pub use utable::UTable;
