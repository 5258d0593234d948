//! Exact arithmetic layer: rationals, polynomials over ℚ, factorization,
//! Sturm sequences, rational and polynomial matrices, number fields.

pub mod algebraic;
pub mod factor;
pub mod matrix;
pub mod numberfield;
pub mod poly;
pub mod polymat;
pub mod rational;
pub mod sturm;

pub use factor::factor;
pub use matrix::MatrixQ;
pub use numberfield::{rank_over_number_field, NumberFieldElem};
pub use poly::PolyQ;
pub use polymat::{smith_form, PolyMatrix};
pub use rational::Rational;
pub use sturm::{sturm_real_root_count, Bound};

/// Rank over ℚ by fraction-free elimination.
pub fn rank_exact(m: &MatrixQ) -> usize {
    m.rank()
}

/// Monic gcd of two polynomials.
pub fn poly_gcd(p: &PolyQ, q: &PolyQ) -> PolyQ {
    p.gcd(q)
}
