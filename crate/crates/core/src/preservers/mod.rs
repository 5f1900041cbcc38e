//! Additive maps on the block algebra and the mutual orthogonality preservers.
//!
//! Continuous additive maps on a finite-dimensional space are real-linear, so
//! every map is stored as a real `D×D` matrix ([`RealLinearMap`]).

mod canonical;
mod decompose;
pub mod fixtures;
mod map;
pub mod pairs;
mod verify;

pub use canonical::{from_canonical, CanonicalForm};
pub use decompose::{
    block_images, decompose, decompose_with, DecomposeError, DecomposeOptions, Decomposition,
    StepFailure,
};
pub(crate) use decompose::linearity_type;
pub use map::RealLinearMap;
pub use verify::{
    check_pairs, verify_mutual_preserver, verify_mutual_preserver_with,
    verify_singularity_preserver, MutualVerdict, SingularityVerdict, SingularityViolation,
    SingularityWitness, VerifyConfig, ViolationWitness,
};
