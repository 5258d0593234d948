//! Dense rational matrices.

use std::fmt;
use std::ops::{Add, Index, IndexMut, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_traits::{One, Zero};

use super::rational::{fmt_rational, lcm_denoms, rat, to_f64, Rational};

#[derive(Clone, PartialEq, Eq, Hash)]
pub struct MatrixQ {
    rows: usize,
    cols: usize,
    data: Vec<Rational>,
}

impl MatrixQ {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        MatrixQ { rows, cols, data: vec![Rational::zero(); rows * cols] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = Rational::one();
        }
        m
    }

    pub fn from_vec(rows: usize, cols: usize, data: Vec<Rational>) -> Self {
        assert_eq!(data.len(), rows * cols, "entry count must equal rows × cols");
        MatrixQ { rows, cols, data }
    }

    pub fn from_ints(rows: usize, cols: usize, data: &[i64]) -> Self {
        Self::from_vec(rows, cols, data.iter().map(|&x| rat(x)).collect())
    }

    pub fn from_rows(rows: &[Vec<Rational>]) -> Self {
        let r = rows.len();
        let c = rows.first().map_or(0, |x| x.len());
        Self::from_vec(r, c, rows.iter().flatten().cloned().collect())
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> Rational) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                data.push(f(i, j));
            }
        }
        MatrixQ { rows, cols, data }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn shape(&self) -> (usize, usize) {
        (self.rows, self.cols)
    }

    pub fn data(&self) -> &[Rational] {
        &self.data
    }

    pub fn row(&self, i: usize) -> &[Rational] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(|x| x.is_zero())
    }

    pub fn transpose(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |i, j| self[(j, i)].clone())
    }

    pub fn scale(&self, c: &Rational) -> Self {
        MatrixQ { rows: self.rows, cols: self.cols, data: self.data.iter().map(|x| x * c).collect() }
    }

    /// t·self + u·other
    pub fn combine(&self, t: &Rational, other: &Self, u: &Rational) -> Self {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        MatrixQ {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().zip(&other.data).map(|(a, b)| a * t + b * u).collect(),
        }
    }

    pub fn hstack(&self, other: &Self) -> Self {
        assert_eq!(self.rows, other.rows);
        Self::from_fn(self.rows, self.cols + other.cols, |i, j| {
            if j < self.cols {
                self[(i, j)].clone()
            } else {
                other[(i, j - self.cols)].clone()
            }
        })
    }

    pub fn vstack(&self, other: &Self) -> Self {
        assert_eq!(self.cols, other.cols);
        let mut data = self.data.clone();
        data.extend(other.data.iter().cloned());
        MatrixQ { rows: self.rows + other.rows, cols: self.cols, data }
    }

    pub fn direct_sum(&self, other: &Self) -> Self {
        let mut m = Self::zeros(self.rows + other.rows, self.cols + other.cols);
        m.set_block(0, 0, self);
        m.set_block(self.rows, self.cols, other);
        m
    }

    pub fn kron(&self, other: &Self) -> Self {
        Self::from_fn(self.rows * other.rows, self.cols * other.cols, |i, j| {
            &self[(i / other.rows, j / other.cols)] * &other[(i % other.rows, j % other.cols)]
        })
    }

    pub fn set_block(&mut self, r0: usize, c0: usize, b: &Self) {
        for i in 0..b.rows {
            for j in 0..b.cols {
                self[(r0 + i, c0 + j)] = b[(i, j)].clone();
            }
        }
    }

    pub fn submatrix(&self, rows: &[usize], cols: &[usize]) -> Self {
        Self::from_fn(rows.len(), cols.len(), |i, j| self[(rows[i], cols[j])].clone())
    }

    pub fn frobenius_sq(&self) -> Rational {
        self.data.iter().map(|x| x * x).sum()
    }

    pub fn to_f64(&self) -> nalgebra::DMatrix<f64> {
        nalgebra::DMatrix::from_fn(self.rows, self.cols, |i, j| to_f64(&self[(i, j)]))
    }

    /// Each row scaled to integers (row operations do not change rank).
    fn integer_rows(&self) -> (Vec<Vec<BigInt>>, Vec<BigInt>) {
        let mut out = Vec::with_capacity(self.rows);
        let mut scales = Vec::with_capacity(self.rows);
        for i in 0..self.rows {
            let r = self.row(i);
            let l = lcm_denoms(r.iter());
            out.push(r.iter().map(|x| (x * Rational::from_integer(l.clone())).to_integer()).collect());
            scales.push(l);
        }
        (out, scales)
    }

    /// Rank by fraction-free (Bareiss) elimination.
    pub fn rank(&self) -> usize {
        let (mut a, _) = self.integer_rows();
        bareiss(&mut a, self.cols).0
    }

    /// Determinant by fraction-free elimination; panics if not square.
    pub fn det(&self) -> Rational {
        assert_eq!(self.rows, self.cols, "determinant of a non-square matrix");
        if self.rows == 0 {
            return Rational::one();
        }
        let (mut a, scales) = self.integer_rows();
        let (rank, sign, last) = bareiss(&mut a, self.cols);
        if rank < self.rows {
            return Rational::zero();
        }
        let denom: BigInt = scales.iter().product();
        Rational::new(last * sign, denom)
    }

    /// Reduced row echelon form and pivot columns, by elimination over ℚ.
    pub fn rref(&self) -> (Self, Vec<usize>) {
        let mut m = self.clone();
        let mut pivots = vec![];
        let mut r = 0;
        for c in 0..m.cols {
            if r == m.rows {
                break;
            }
            let Some(p) = (r..m.rows).find(|&i| !m[(i, c)].is_zero()) else { continue };
            m.swap_rows(r, p);
            let inv = Rational::one() / &m[(r, c)];
            for j in c..m.cols {
                m[(r, j)] = &m[(r, j)] * &inv;
            }
            for i in 0..m.rows {
                if i != r && !m[(i, c)].is_zero() {
                    let f = m[(i, c)].clone();
                    for j in c..m.cols {
                        let v = &m[(r, j)] * &f;
                        m[(i, j)] -= v;
                    }
                }
            }
            pivots.push(c);
            r += 1;
        }
        (m, pivots)
    }

    pub fn swap_rows(&mut self, a: usize, b: usize) {
        if a != b {
            for j in 0..self.cols {
                self.data.swap(a * self.cols + j, b * self.cols + j);
            }
        }
    }

    /// Basis of the right null space, as columns of the returned matrix.
    pub fn nullspace(&self) -> Self {
        let (r, piv) = self.rref();
        let free: Vec<usize> = (0..self.cols).filter(|c| !piv.contains(c)).collect();
        let mut n = Self::zeros(self.cols, free.len());
        for (k, &f) in free.iter().enumerate() {
            n[(f, k)] = Rational::one();
            for (i, &p) in piv.iter().enumerate() {
                n[(p, k)] = -r[(i, f)].clone();
            }
        }
        n
    }

    /// Exact rank factorization self = L·Rᵀ with L: rows×k, R: cols×k, k = rank.
    pub fn rank_factorization(&self) -> (Self, Self) {
        let (r, piv) = self.rref();
        let k = piv.len();
        let left = self.submatrix(&(0..self.rows).collect::<Vec<_>>(), &piv);
        let right = Self::from_fn(self.cols, k, |j, i| r[(i, j)].clone());
        (left, right)
    }

    pub fn inverse(&self) -> Option<Self> {
        assert_eq!(self.rows, self.cols);
        let n = self.rows;
        let aug = self.hstack(&Self::identity(n));
        let (r, piv) = aug.rref();
        if piv.len() < n || piv[n - 1] >= n {
            return None;
        }
        Some(Self::from_fn(n, n, |i, j| r[(i, n + j)].clone()))
    }

    /// Row-major `p/q` rendering, one row per line.
    pub fn to_text(&self) -> String {
        (0..self.rows)
            .map(|i| self.row(i).iter().map(fmt_rational).collect::<Vec<_>>().join(" "))
            .collect::<Vec<_>>()
            .join("\n")
    }
}

/// Fraction-free elimination in place. Returns (rank, permutation sign, last pivot).
fn bareiss(a: &mut [Vec<BigInt>], cols: usize) -> (usize, i32, BigInt) {
    let rows = a.len();
    let mut prev = BigInt::one();
    let mut sign = 1;
    let mut r = 0;
    for c in 0..cols {
        if r == rows {
            break;
        }
        let Some(p) = (r..rows).find(|&i| !a[i][c].is_zero()) else { continue };
        if p != r {
            a.swap(p, r);
            sign = -sign;
        }
        for i in r + 1..rows {
            for j in c + 1..cols {
                let v = (&a[r][c] * &a[i][j] - &a[i][c] * &a[r][j]) / &prev;
                a[i][j] = v;
            }
            a[i][c] = BigInt::zero();
        }
        prev = a[r][c].clone();
        r += 1;
    }
    (r, sign, prev)
}

impl Index<(usize, usize)> for MatrixQ {
    type Output = Rational;
    fn index(&self, (i, j): (usize, usize)) -> &Rational {
        &self.data[i * self.cols + j]
    }
}

impl IndexMut<(usize, usize)> for MatrixQ {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut Rational {
        &mut self.data[i * self.cols + j]
    }
}

impl Mul for &MatrixQ {
    type Output = MatrixQ;
    fn mul(self, o: &MatrixQ) -> MatrixQ {
        assert_eq!(self.cols, o.rows, "incompatible product");
        let mut m = MatrixQ::zeros(self.rows, o.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = &self[(i, k)];
                if a.is_zero() {
                    continue;
                }
                for j in 0..o.cols {
                    let v = a * &o[(k, j)];
                    m[(i, j)] += v;
                }
            }
        }
        m
    }
}

impl Add for &MatrixQ {
    type Output = MatrixQ;
    fn add(self, o: &MatrixQ) -> MatrixQ {
        self.combine(&Rational::one(), o, &Rational::one())
    }
}

impl Sub for &MatrixQ {
    type Output = MatrixQ;
    fn sub(self, o: &MatrixQ) -> MatrixQ {
        self.combine(&Rational::one(), o, &-Rational::one())
    }
}

impl Neg for &MatrixQ {
    type Output = MatrixQ;
    fn neg(self) -> MatrixQ {
        self.scale(&-Rational::one())
    }
}

impl fmt::Debug for MatrixQ {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "MatrixQ {}x{}", self.rows, self.cols)?;
        write!(f, "{}", self.to_text())
    }
}

/// Minimal field interface for generic Gaussian elimination.
pub trait FieldElem: Clone {
    fn fe_is_zero(&self) -> bool;
    fn fe_sub(&self, o: &Self) -> Self;
    fn fe_mul(&self, o: &Self) -> Self;
    fn fe_inv(&self) -> Self;
}

impl FieldElem for Rational {
    fn fe_is_zero(&self) -> bool {
        Zero::is_zero(self)
    }
    fn fe_sub(&self, o: &Self) -> Self {
        self - o
    }
    fn fe_mul(&self, o: &Self) -> Self {
        self * o
    }
    fn fe_inv(&self) -> Self {
        Rational::one() / self
    }
}

/// Rank of a row-major matrix over any field.
pub fn rank_generic<F: FieldElem>(mut a: Vec<Vec<F>>) -> usize {
    let rows = a.len();
    let cols = a.first().map_or(0, |r| r.len());
    let mut r = 0;
    for c in 0..cols {
        if r == rows {
            break;
        }
        let Some(p) = (r..rows).find(|&i| !a[i][c].fe_is_zero()) else { continue };
        a.swap(p, r);
        let inv = a[r][c].fe_inv();
        for i in r + 1..rows {
            if a[i][c].fe_is_zero() {
                continue;
            }
            let f = a[i][c].fe_mul(&inv);
            for j in c..cols {
                let v = a[r][j].fe_mul(&f);
                a[i][j] = a[i][j].fe_sub(&v);
            }
        }
        r += 1;
    }
    r
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::rational::ratio;
    use proptest::prelude::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn trivial_ranks() {
        assert_eq!(MatrixQ::zeros(3, 4).rank(), 0);
        assert_eq!(MatrixQ::identity(5).rank(), 5);
        assert_eq!(MatrixQ::zeros(0, 3).rank(), 0);
    }

    #[test]
    fn planted_inner_dimension() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for k in 0..=4 {
            let l = MatrixQ::from_fn(6, k, |_, _| rat(rng.gen_range(-9..=9)));
            let r = MatrixQ::from_fn(k, 5, |_, _| rat(rng.gen_range(-9..=9)));
            let expect = l.rank().min(r.rank());
            assert!(expect <= k);
            let p = &l * &r;
            assert_eq!(p.rank(), rank_generic((0..6).map(|i| p.row(i).to_vec()).collect()));
            // generic integer factors have full rank with overwhelming probability; checked exactly
            if l.rank() == k && r.rank() == k {
                assert_eq!(p.rank(), k);
            }
        }
    }

    #[test]
    fn determinant_and_inverse() {
        let m = MatrixQ::from_vec(2, 2, vec![ratio(1, 2), rat(3), rat(-1), ratio(2, 3)]);
        assert_eq!(m.det(), ratio(1, 3) + rat(3));
        let inv = m.inverse().unwrap();
        assert_eq!(&m * &inv, MatrixQ::identity(2));
        assert!(MatrixQ::from_ints(2, 2, &[1, 2, 2, 4]).inverse().is_none());
    }

    #[test]
    fn rank_factorization_reconstructs() {
        let m = MatrixQ::from_ints(3, 3, &[1, 2, 3, 2, 4, 6, 1, 0, 1]);
        let (l, r) = m.rank_factorization();
        assert_eq!(l.cols(), 2);
        assert_eq!(&l * &r.transpose(), m);
        let n = m.nullspace();
        assert_eq!(n.cols(), 1);
        assert!((&m * &n).is_zero());
    }

    fn arb_int_matrix() -> impl Strategy<Value = MatrixQ> {
        (1usize..5, 1usize..5).prop_flat_map(|(r, c)| {
            prop::collection::vec(-4i64..=4, r * c).prop_map(move |d| MatrixQ::from_ints(r, c, &d))
        })
    }

    proptest! {
        #[test]
        fn rank_matches_float_svd(m in arb_int_matrix()) {
            let f = m.to_f64();
            let sv = f.clone().svd(false, false).singular_values;
            let tol = 1e-9 * sv.iter().cloned().fold(1.0, f64::max);
            let float_rank = sv.iter().filter(|&&s| s > tol).count();
            prop_assert_eq!(m.rank(), float_rank);
        }

        #[test]
        fn det_multiplicative(a in prop::collection::vec(-5i64..=5, 9), b in prop::collection::vec(-5i64..=5, 9)) {
            let a = MatrixQ::from_ints(3, 3, &a);
            let b = MatrixQ::from_ints(3, 3, &b);
            prop_assert_eq!((&a * &b).det(), a.det() * b.det());
        }
    }
}
