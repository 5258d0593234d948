//! Pencils A + λB and the canonical blocks they are assembled from.

use nalgebra::DMatrix;
use num_traits::{One, Zero};
use rand::Rng;

use crate::error::{Error, Result};
use crate::exact::rational::{from_f64, rat, Rational};
use crate::exact::MatrixQ;

/// A rational pencil A + λB.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Pencil {
    pub a: MatrixQ,
    pub b: MatrixQ,
}

/// An invertible 2×2 rational matrix acting on the pair (A, B):
/// A″ = t11·A + t12·B, B″ = t21·A + t22·B.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Gl2Transform {
    pub t11: Rational,
    pub t12: Rational,
    pub t21: Rational,
    pub t22: Rational,
}

impl Gl2Transform {
    pub fn new(t11: Rational, t12: Rational, t21: Rational, t22: Rational) -> Result<Self> {
        let t = Gl2Transform { t11, t12, t21, t22 };
        if t.det().is_zero() {
            return Err(Error::InvalidParameter("singular 2x2 transform".into()));
        }
        Ok(t)
    }

    pub fn identity() -> Self {
        Gl2Transform { t11: rat(1), t12: rat(0), t21: rat(0), t22: rat(1) }
    }

    pub fn det(&self) -> Rational {
        &self.t11 * &self.t22 - &self.t12 * &self.t21
    }

    pub fn inverse(&self) -> Self {
        let d = self.det();
        Gl2Transform {
            t11: &self.t22 / &d,
            t12: -&self.t12 / &d,
            t21: -&self.t21 / &d,
            t22: &self.t11 / &d,
        }
    }
}

impl Pencil {
    pub fn new(a: MatrixQ, b: MatrixQ) -> Result<Self> {
        if (a.rows(), a.cols()) != (b.rows(), b.cols()) {
            return Err(Error::Dimension(format!(
                "A is {}x{} but B is {}x{}",
                a.rows(),
                a.cols(),
                b.rows(),
                b.cols()
            )));
        }
        Ok(Pencil { a, b })
    }

    pub fn zero(m: usize, n: usize) -> Self {
        Pencil { a: MatrixQ::zeros(m, n), b: MatrixQ::zeros(m, n) }
    }

    pub fn m(&self) -> usize {
        self.a.rows()
    }

    pub fn n(&self) -> usize {
        self.a.cols()
    }

    /// J_m(a) + λE_m with J_m(a) = aE + H (ones on the superdiagonal).
    pub fn jordan(m: usize, a: &Rational) -> Self {
        Pencil { a: jordan_matrix(m, a), b: MatrixQ::identity(m) }
    }

    /// N_v = E_v + λH_v, an infinite elementary divisor of degree v.
    pub fn infinite_block(v: usize) -> Self {
        Pencil { a: MatrixQ::identity(v), b: jordan_matrix(v, &rat(0)) }
    }

    /// L_k(λ), k × (k+1).
    pub fn l_block(k: usize) -> Self {
        let a = MatrixQ::from_fn(k, k + 1, |i, j| if j == i + 1 { rat(1) } else { rat(0) });
        let b = MatrixQ::from_fn(k, k + 1, |i, j| if j == i { rat(1) } else { rat(0) });
        Pencil { a, b }
    }

    /// R_l(λ) = L_l(λ)ᵀ, (l+1) × l.
    pub fn r_block(l: usize) -> Self {
        Self::l_block(l).transpose()
    }

    /// Q_{2k}(a,b) + λE_{2k} with Q_{2k}(a,b) = E_k ⊗ [[a, b], [−b, a]] + J_k(0) ⊗ E₂.
    pub fn q_block(k: usize, a: &Rational, b: &Rational) -> Result<Self> {
        if b.is_zero() {
            return Err(Error::InvalidParameter("Q block needs b != 0".into()));
        }
        let c = MatrixQ::from_vec(2, 2, vec![a.clone(), b.clone(), -b.clone(), a.clone()]);
        let q = &MatrixQ::identity(k).kron(&c) + &jordan_matrix(k, &rat(0)).kron(&MatrixQ::identity(2));
        Ok(Pencil { a: q, b: MatrixQ::identity(2 * k) })
    }

    /// M + λE for a square constant matrix M.
    pub fn regular(m: MatrixQ) -> Self {
        let n = m.rows();
        Pencil { a: m, b: MatrixQ::identity(n) }
    }

    pub fn direct_sum(&self, other: &Self) -> Self {
        Pencil { a: self.a.direct_sum(&other.a), b: self.b.direct_sum(&other.b) }
    }

    pub fn direct_sum_all(parts: &[Pencil]) -> Self {
        parts.iter().fold(Pencil::zero(0, 0), |acc, p| acc.direct_sum(p))
    }

    pub fn transpose(&self) -> Self {
        Pencil { a: self.a.transpose(), b: self.b.transpose() }
    }

    /// (A, B) ↦ (t11·A + t12·B, t21·A + t22·B).
    pub fn apply_gl2(&self, t: &Gl2Transform) -> Self {
        Pencil {
            a: self.a.combine(&t.t11, &self.b, &t.t12),
            b: self.a.combine(&t.t21, &self.b, &t.t22),
        }
    }

    /// P·(A + λB)·Q.
    pub fn equivalence(&self, p: &MatrixQ, q: &MatrixQ) -> Self {
        Pencil { a: &(p * &self.a) * q, b: &(p * &self.b) * q }
    }

    /// t·A + u·B.
    pub fn at(&self, t: &Rational, u: &Rational) -> MatrixQ {
        self.a.combine(t, &self.b, u)
    }

    /// A + λ₀B.
    pub fn eval(&self, lambda: &Rational) -> MatrixQ {
        self.at(&Rational::one(), lambda)
    }

    /// ‖A‖² + ‖B‖² (Frobenius).
    pub fn norm_sq(&self) -> Rational {
        self.a.frobenius_sq() + self.b.frobenius_sq()
    }

    pub fn sub(&self, other: &Self) -> Self {
        Pencil { a: &self.a - &other.a, b: &self.b - &other.b }
    }

    pub fn is_zero(&self) -> bool {
        self.a.is_zero() && self.b.is_zero()
    }

    pub fn to_float(&self, tolerance: f64) -> FloatPencil {
        FloatPencil { a: self.a.to_f64(), b: self.b.to_f64(), tolerance }
    }
}

/// aE + H.
pub fn jordan_matrix(m: usize, a: &Rational) -> MatrixQ {
    MatrixQ::from_fn(m, m, |i, j| {
        if i == j {
            a.clone()
        } else if j == i + 1 {
            rat(1)
        } else {
            rat(0)
        }
    })
}

/// A pencil with floating-point entries and a rank-decision tolerance.
#[derive(Clone, Debug, PartialEq)]
pub struct FloatPencil {
    pub a: DMatrix<f64>,
    pub b: DMatrix<f64>,
    pub tolerance: f64,
}

impl FloatPencil {
    pub fn new(a: DMatrix<f64>, b: DMatrix<f64>, tolerance: f64) -> Result<Self> {
        if a.shape() != b.shape() {
            return Err(Error::Dimension("A and B shapes differ".into()));
        }
        if tolerance.partial_cmp(&0.0) != Some(std::cmp::Ordering::Greater) {
            return Err(Error::InvalidParameter("tolerance must be positive".into()));
        }
        Ok(FloatPencil { a, b, tolerance })
    }

    pub fn m(&self) -> usize {
        self.a.nrows()
    }

    pub fn n(&self) -> usize {
        self.a.ncols()
    }

    /// Exact rational copy of the stored doubles.
    pub fn to_exact(&self) -> Pencil {
        let conv = |m: &DMatrix<f64>| MatrixQ::from_fn(m.nrows(), m.ncols(), |i, j| from_f64(m[(i, j)]));
        Pencil { a: conv(&self.a), b: conv(&self.b) }
    }

    pub fn norm(&self) -> f64 {
        (self.a.norm_squared() + self.b.norm_squared()).sqrt()
    }
}

/// A random integer matrix with determinant ±1, as a product of elementary
/// operations with entries in [−2, 2] and a random row permutation.
pub fn random_unimodular<R: Rng>(n: usize, rng: &mut R) -> MatrixQ {
    let mut m = MatrixQ::identity(n);
    if n < 2 {
        return m;
    }
    for _ in 0..2 * n {
        let i = rng.gen_range(0..n);
        let mut j = rng.gen_range(0..n - 1);
        if j >= i {
            j += 1;
        }
        let c = rat(rng.gen_range(-2..=2));
        for col in 0..n {
            let v = &m[(j, col)] * &c;
            m[(i, col)] += v;
        }
    }
    for i in (1..n).rev() {
        let j = rng.gen_range(0..=i);
        m.swap_rows(i, j);
    }
    m
}

/// A random invertible rational 2×2 transform with small entries.
pub fn random_gl2<R: Rng>(rng: &mut R) -> Gl2Transform {
    loop {
        let mut e = || rat(rng.gen_range(-3..=3));
        if let Ok(t) = Gl2Transform::new(e(), e(), e(), e()) {
            return t;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn block_shapes() {
        let l = Pencil::l_block(1);
        assert_eq!(l.a, MatrixQ::from_ints(1, 2, &[0, 1]));
        assert_eq!(l.b, MatrixQ::from_ints(1, 2, &[1, 0]));
        assert_eq!((Pencil::r_block(2).m(), Pencil::r_block(2).n()), (3, 2));
        assert_eq!(Pencil::l_block(0).m(), 0);
        assert_eq!(Pencil::l_block(0).n(), 1);
    }

    #[test]
    fn q_block_layout() {
        let q = Pencil::q_block(1, &rat(2), &rat(3)).unwrap();
        assert_eq!(q.a, MatrixQ::from_ints(2, 2, &[2, 3, -3, 2]));
        let q2 = Pencil::q_block(2, &rat(0), &rat(1)).unwrap();
        let expect = MatrixQ::from_ints(4, 4, &[0, 1, 1, 0, -1, 0, 0, 1, 0, 0, 0, 1, 0, 0, -1, 0]);
        assert_eq!(q2.a, expect);
        assert!(Pencil::q_block(1, &rat(0), &rat(0)).is_err());
    }

    #[test]
    fn unimodular_has_unit_determinant() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for n in 1..6 {
            let u = random_unimodular(n, &mut rng);
            let d = u.det();
            assert!(d == rat(1) || d == rat(-1));
        }
    }

    #[test]
    fn gl2_inverse_roundtrip() {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let p = Pencil::jordan(3, &rat(2));
        let t = random_gl2(&mut rng);
        assert_eq!(p.apply_gl2(&t).apply_gl2(&t.inverse()), p);
    }
}
