//! Numerical tolerances shared across the crate.

/// Subspace equality and containment: largest projection residual of a unit
/// basis vector.
pub const TOL_ORTHO: f64 = 1e-9;

/// Rank decisions: singular values below `TOL_RANK · σ_max` count as zero.
pub const TOL_RANK: f64 = 1e-8;

/// Inputs smaller than `TOL_ZERO` times the largest input are dropped
/// before orthonormalisation.
pub const TOL_ZERO: f64 = 1e-12;

/// Structural identities (Hopf axioms, unitarity, pentagon).
pub const TOL_AXIOM: f64 = 1e-10;

/// Identities that pass through a least-squares solve.
pub const TOL_IDENTITY: f64 = 1e-9;

/// Membership of an operator in a subspace: relative projection residual.
pub const TOL_MEMBER: f64 = 1e-8;
