//! Strong Birkhoff-James orthogonality on finite-dimensional C*-algebras.
//!
//! A finite-dimensional C*-algebra is modelled as a direct sum of complex
//! matrix blocks `M_{n_1} ⊕ ... ⊕ M_{n_k}` (see [`Shape`] and [`Element`]).
//! On top of that substrate the crate provides
//!
//! - [`bj`]: deciders for strong and mutual strong BJ orthogonality, one via
//!   the closed-form distance to the right ideal `b𝔄` and one via norm-attaining
//!   witness vectors;
//! - [`preservers`]: real-linear maps on the algebra, the canonical
//!   `a ↦ γ·u·π(a)†·v` preservers, randomized verifiers and a decomposer that
//!   recovers the canonical parameters or refutes the map with a witness;
//! - [`singularity`]: the determinant-shift polynomial and the factorizer for
//!   additive singularity preservers `A ↦ P·(A or Aᵀ)^σ·Q`;
//! - [`orthograph`]: finite samples of the mutual orthogonality graph with DOT
//!   and JSON export.

pub mod algebra;
pub mod bj;
pub mod error;
pub mod json;
pub mod orthograph;
pub mod preservers;
pub mod singularity;
pub mod tol;

pub use algebra::{perp_unit, BlockSvd, Element, RankOneSpec, Shape, C64};
pub use bj::{
    dist_to_right_ideal, gen_mutual_pair, mutual_strong_bj, sample_decision_pair, strong_bj,
    strong_bj_witness,
    OrthWitness,
};
pub use error::{Error, Result};
pub use preservers::{
    decompose, from_canonical, verify_mutual_preserver, verify_singularity_preserver,
    CanonicalForm, DecomposeError, MutualVerdict, RealLinearMap, SingularityVerdict, ViolationWitness,
};
pub use singularity::{
    det_shift_polynomial, factor_singularity_preserver, FactorError, SemilinearFactorization,
};
