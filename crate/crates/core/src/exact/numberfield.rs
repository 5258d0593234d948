//! Arithmetic in ℚ[x]/(h) for irreducible h.

use std::sync::Arc;

use super::matrix::{rank_generic, FieldElem, MatrixQ};
use super::poly::PolyQ;
use super::rational::Rational;
use crate::error::{Error, Result};

/// An element of ℚ[x]/(h): a residue of degree < deg h.
#[derive(Clone, Debug, PartialEq)]
pub struct NumberFieldElem {
    minimal_polynomial: Arc<PolyQ>,
    residue: PolyQ,
}

impl NumberFieldElem {
    pub fn new(minimal_polynomial: Arc<PolyQ>, residue: &PolyQ) -> Self {
        let residue = residue.rem(&minimal_polynomial);
        NumberFieldElem { minimal_polynomial, residue }
    }

    pub fn from_rational(h: &Arc<PolyQ>, c: &Rational) -> Self {
        Self::new(h.clone(), &PolyQ::constant(c.clone()))
    }

    /// The class of x itself, i.e. a root of h.
    pub fn generator(h: &Arc<PolyQ>) -> Self {
        Self::new(h.clone(), &PolyQ::x())
    }

    pub fn minimal_polynomial(&self) -> &PolyQ {
        &self.minimal_polynomial
    }

    pub fn residue(&self) -> &PolyQ {
        &self.residue
    }

    pub fn add(&self, o: &Self) -> Self {
        Self::new(self.minimal_polynomial.clone(), &(&self.residue + &o.residue))
    }

    pub fn scale(&self, c: &Rational) -> Self {
        Self::new(self.minimal_polynomial.clone(), &self.residue.scale(c))
    }
}

impl FieldElem for NumberFieldElem {
    fn fe_is_zero(&self) -> bool {
        self.residue.is_zero()
    }

    fn fe_sub(&self, o: &Self) -> Self {
        Self::new(self.minimal_polynomial.clone(), &(&self.residue - &o.residue))
    }

    fn fe_mul(&self, o: &Self) -> Self {
        Self::new(self.minimal_polynomial.clone(), &(&self.residue * &o.residue))
    }

    fn fe_inv(&self) -> Self {
        let (g, s, _) = self.residue.xgcd(&self.minimal_polynomial);
        assert!(g.is_one(), "inverse of zero or modulus not irreducible");
        Self::new(self.minimal_polynomial.clone(), &s)
    }
}

/// Exact rank of a matrix whose entries all share one minimal polynomial.
pub fn rank_over_number_field(rows: Vec<Vec<NumberFieldElem>>) -> Result<usize> {
    let h = rows.iter().flatten().next().map(|e| e.minimal_polynomial.clone());
    if let Some(h) = &h {
        if rows.iter().flatten().any(|e| e.minimal_polynomial != *h) {
            return Err(Error::MixedNumberFields);
        }
    }
    Ok(rank_generic(rows))
}

/// Rank of t·A + u·B where t, u ∈ ℚ[x]/(h) are given as residues.
pub fn rank_combination(h: &Arc<PolyQ>, a: &MatrixQ, t: &PolyQ, b: &MatrixQ, u: &PolyQ) -> usize {
    let t = NumberFieldElem::new(h.clone(), t);
    let u = NumberFieldElem::new(h.clone(), u);
    let rows = (0..a.rows())
        .map(|i| {
            (0..a.cols())
                .map(|j| {
                    NumberFieldElem::from_rational(h, &a[(i, j)])
                        .fe_mul(&t)
                        .add(&NumberFieldElem::from_rational(h, &b[(i, j)]).fe_mul(&u))
                })
                .collect()
        })
        .collect();
    rank_generic(rows)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::rational::rat;

    fn field(c: &[i64]) -> Arc<PolyQ> {
        Arc::new(PolyQ::from_ints(c))
    }

    #[test]
    fn identity_rank() {
        let h = field(&[-2, 0, 1]);
        let one = NumberFieldElem::from_rational(&h, &rat(1));
        let zero = NumberFieldElem::from_rational(&h, &rat(0));
        let m = vec![vec![one.clone(), zero.clone()], vec![zero, one]];
        assert_eq!(rank_over_number_field(m).unwrap(), 2);
    }

    #[test]
    fn x_identity_minus_diag() {
        let h = field(&[-2, 0, 1]);
        let x = NumberFieldElem::generator(&h);
        let zero = NumberFieldElem::from_rational(&h, &rat(0));
        // x·E₂ − diag(x, 0) = diag(0, x)
        let m = vec![vec![x.fe_sub(&x), zero.clone()], vec![zero.clone(), x.fe_sub(&zero)]];
        assert_eq!(rank_over_number_field(m).unwrap(), 1);
    }

    #[test]
    fn inverse_and_sqrt_two() {
        let h = field(&[-2, 0, 1]);
        let x = NumberFieldElem::generator(&h);
        assert_eq!(x.fe_mul(&x), NumberFieldElem::from_rational(&h, &rat(2)));
        let xi = x.fe_inv();
        assert_eq!(x.fe_mul(&xi), NumberFieldElem::from_rational(&h, &rat(1)));
    }

    #[test]
    fn mixed_fields_rejected() {
        let a = NumberFieldElem::generator(&field(&[-2, 0, 1]));
        let b = NumberFieldElem::generator(&field(&[-3, 0, 1]));
        assert_eq!(rank_over_number_field(vec![vec![a, b]]), Err(Error::MixedNumberFields));
    }

    #[test]
    fn eigenvalue_rank_drop() {
        // A = [[0, 2], [1, 0]] has eigenvalues ±√2; A − x·E drops rank at x = √2
        let h = field(&[-2, 0, 1]);
        let a = MatrixQ::from_ints(2, 2, &[0, 2, 1, 0]);
        let e = MatrixQ::identity(2);
        assert_eq!(rank_combination(&h, &a, &PolyQ::one(), &e, &PolyQ::from_ints(&[0, -1])), 1);
        assert_eq!(rank_combination(&h, &a, &PolyQ::one(), &e, &PolyQ::from_ints(&[1, -1])), 2);
    }
}
