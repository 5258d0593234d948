//! Kronecker canonical structure, exactly over ℚ and numerically with a tolerance.

pub mod exact;
pub mod numeric;
pub mod structure;

pub use exact::{kronecker_structure, minimal_indices, normal_rank};
pub use numeric::{matches_exact, multilinear_rank_numeric, rank_at, staircase_structure, NumericStructure};
pub use structure::{Eigenvalue, Field, FloatEigenvalue, KroneckerStructure};
