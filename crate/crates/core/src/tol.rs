//! Default numerical tolerances.

/// Relative tolerance for numerical rank: a singular value `σ` counts as zero
/// when `σ <= RANK * σ_max * n`.
pub const RANK: f64 = 1e-9;

/// Relative width of the top singular-value cluster.
pub const CLUSTER: f64 = 1e-8;

/// Relative tolerance for the norm equality in orthogonality decisions.
pub const DECISION: f64 = 1e-8;

/// Eigenvalue tolerance when accepting rank-one orthogonal projections.
pub const PROJECTION: f64 = 1e-7;

/// Relative reconstruction tolerance for decompositions and factorizations.
pub const RECONSTRUCTION: f64 = 1e-8;

/// Accepted `‖U*U - I‖` when validating user supplied unitaries.
pub const UNITARY: f64 = 1e-9;
