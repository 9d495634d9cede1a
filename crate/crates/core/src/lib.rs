//! Numerical verification of the curvature of a normal biquotient metric on
//! `S^2 x R^4` near its soul.
//!
//! The crate is organised bottom-up: quaternion arithmetic, the total space and
//! its quotient, O'Neill's formulas, the normal bundle of the soul with its
//! connection, the soul inequality, and linear-algebra tools for the rigidity
//! statements.

pub mod biquotient;
pub mod error;
pub mod normal_bundle;
pub mod oneill;
pub mod quat;
pub mod rigidity;
pub mod sampling;
pub mod soul_inequality;

pub use biquotient::{BasePoint, GroupElement, TotalPoint, TotalTangent};
pub use error::{Error, Result};
pub use normal_bundle::{BaseDirection, BaseTangent, HolonomyEvidence};
pub use quat::{ImQuat, Quat};
pub use rigidity::{SkewEndo, SplitResult};
pub use soul_inequality::{GoodScan, InequalityReport, ScanSummary, ZeroClass};
