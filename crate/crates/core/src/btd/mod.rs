//! Pencils as m×n×2 tensors and their two-block decompositions
//! (UVᵀ) ⊗ w + (XYᵀ) ⊗ z with rank UVᵀ ≤ r, rank XYᵀ ≤ s.

mod als;
mod experiment;
mod sequences;

use nalgebra::{DMatrix, Matrix2, Vector2};

use crate::error::Result;
use crate::exact::rational::{to_f64, Rational};
use crate::exact::MatrixQ;
use crate::kcf::Field;
use crate::minrank::{attain_transform, inverse_columns, AttainingTransform, MinimalRanks};
use crate::pencil::{FloatPencil, Pencil};

pub use als::{als_approximate, DivergenceLog, IterationRecord, AlsInit};
pub use experiment::{als_trials, divergence_experiment, write_log_csv, DivergenceThresholds, ExperimentConfig, ExperimentReport, TrialSummary};
pub use sequences::{exact_sqrt, random_full_rank, sequence_pn, sequence_zp, tight_instance, PnMember, ZpMember, ZpVariant};

/// Dense m×n×d array, index (i, j, k).
#[derive(Clone, Debug, PartialEq)]
pub struct Tensor3 {
    m: usize,
    n: usize,
    d: usize,
    data: Vec<f64>,
}

impl Tensor3 {
    pub fn zeros(m: usize, n: usize, d: usize) -> Self {
        Tensor3 { m, n, d, data: vec![0.0; m * n * d] }
    }

    pub fn from_slices(slices: &[DMatrix<f64>]) -> Self {
        let (m, n) = slices.first().map_or((0, 0), |s| s.shape());
        let mut t = Tensor3::zeros(m, n, slices.len());
        for (k, s) in slices.iter().enumerate() {
            assert_eq!(s.shape(), (m, n), "slices differ in shape");
            for i in 0..m {
                for j in 0..n {
                    t.data[(k * m + i) * n + j] = s[(i, j)];
                }
            }
        }
        t
    }

    pub fn dims(&self) -> (usize, usize, usize) {
        (self.m, self.n, self.d)
    }

    pub fn get(&self, i: usize, j: usize, k: usize) -> f64 {
        self.data[(k * self.m + i) * self.n + j]
    }

    /// The k-th frontal slice (0-based).
    pub fn slice(&self, k: usize) -> DMatrix<f64> {
        DMatrix::from_fn(self.m, self.n, |i, j| self.get(i, j, k))
    }

    pub fn norm(&self) -> f64 {
        self.data.iter().map(|x| x * x).sum::<f64>().sqrt()
    }
}

/// A ⊗ e₁ + B ⊗ e₂.
pub fn pencil_to_tensor(p: &Pencil) -> Tensor3 {
    Tensor3::from_slices(&[p.a.to_f64(), p.b.to_f64()])
}

pub fn float_pencil_to_tensor(p: &FloatPencil) -> Tensor3 {
    Tensor3::from_slices(&[p.a.clone(), p.b.clone()])
}

/// Factors of (UVᵀ) ⊗ w + (XYᵀ) ⊗ z with the solver bookkeeping.
#[derive(Clone, Debug, PartialEq)]
pub struct BtdState {
    pub u: DMatrix<f64>,
    pub v: DMatrix<f64>,
    pub x: DMatrix<f64>,
    pub y: DMatrix<f64>,
    pub w: Vector2<f64>,
    pub z: Vector2<f64>,
    pub objective: f64,
    pub iteration: usize,
}

impl BtdState {
    pub fn block1(&self) -> DMatrix<f64> {
        &self.u * self.v.transpose()
    }

    pub fn block2(&self) -> DMatrix<f64> {
        &self.x * self.y.transpose()
    }

    /// Slices k = 1, 2 of the represented tensor.
    pub fn slices(&self) -> [DMatrix<f64>; 2] {
        let (m1, m2) = (self.block1(), self.block2());
        [&m1 * self.w[0] + &m2 * self.z[0], &m1 * self.w[1] + &m2 * self.z[1]]
    }

    pub fn reconstruct(&self) -> Tensor3 {
        Tensor3::from_slices(&self.slices())
    }

    /// ‖T − reconstruction‖.
    pub fn residual(&self, t: &Tensor3) -> f64 {
        let s = self.slices();
        ((&t.slice(0) - &s[0]).norm_squared() + (&t.slice(1) - &s[1]).norm_squared()).sqrt()
    }

    /// Norms of the two terms ‖UVᵀ‖·‖w‖ and ‖XYᵀ‖·‖z‖; invariant under rescaling
    /// the factors within a term.
    pub fn term_norms(&self) -> [f64; 2] {
        [self.block1().norm() * self.w.norm(), self.block2().norm() * self.z.norm()]
    }

    pub fn max_factor_norm(&self) -> f64 {
        let [a, b] = self.term_norms();
        a.max(b)
    }

    /// Condition number of [w z] after normalizing both columns.
    pub fn cond_wz(&self) -> f64 {
        cond_unit_columns(&self.w, &self.z)
    }
}

pub(crate) fn cond_unit_columns(w: &Vector2<f64>, z: &Vector2<f64>) -> f64 {
    let (nw, nz) = (w.norm(), z.norm());
    if nw == 0.0 || nz == 0.0 {
        return f64::INFINITY;
    }
    let m = Matrix2::from_columns(&[w / nw, z / nz]);
    let sv = m.singular_values();
    let (hi, lo) = (sv.max(), sv.min());
    if lo == 0.0 {
        f64::INFINITY
    } else {
        hi / lo
    }
}

/// Exact factors from the attaining transform.
#[derive(Clone, Debug, PartialEq)]
pub struct ExactBtd {
    pub u: MatrixQ,
    pub v: MatrixQ,
    pub x: MatrixQ,
    pub y: MatrixQ,
    pub w: [Rational; 2],
    pub z: [Rational; 2],
}

impl ExactBtd {
    pub fn reconstruct(&self) -> Pencil {
        let m1 = &self.u * &self.v.transpose();
        let m2 = &self.x * &self.y.transpose();
        Pencil { a: m1.combine(&self.w[0], &m2, &self.z[0]), b: m1.combine(&self.w[1], &m2, &self.z[1]) }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct AttainedBtd {
    pub ranks: MinimalRanks,
    pub transform: AttainingTransform,
    /// Present when the transform is rational.
    pub exact: Option<ExactBtd>,
    pub state: BtdState,
}

fn to_float_state(u: DMatrix<f64>, v: DMatrix<f64>, x: DMatrix<f64>, y: DMatrix<f64>, w: Vector2<f64>, z: Vector2<f64>, t: &Tensor3) -> BtdState {
    let mut s = BtdState { u, v, x, y, w, z, objective: 0.0, iteration: 0 };
    s.objective = s.residual(t);
    s
}

/// Rank-r/rank-s split of a float matrix by truncated SVD: (L, R) with M ≈ L·Rᵀ.
fn svd_factor(m: &DMatrix<f64>, k: usize) -> (DMatrix<f64>, DMatrix<f64>) {
    let (rows, cols) = m.shape();
    if k == 0 {
        return (DMatrix::zeros(rows, 0), DMatrix::zeros(cols, 0));
    }
    let svd = m.clone().svd(true, true);
    let u = svd.u.expect("requested");
    let vt = svd.v_t.expect("requested");
    let mut idx: Vec<usize> = (0..svd.singular_values.len()).collect();
    idx.sort_by(|&a, &b| svd.singular_values[b].total_cmp(&svd.singular_values[a]));
    let mut l = DMatrix::zeros(rows, k);
    let mut r = DMatrix::zeros(cols, k);
    for (c, &i) in idx.iter().take(k).enumerate() {
        let sigma = svd.singular_values[i];
        l.set_column(c, &(u.column(i) * sigma));
        r.set_column(c, &vt.row(i).transpose());
    }
    (l, r)
}

fn decimal_f64(s: &str) -> f64 {
    s.parse().expect("decimal renders as a float")
}

/// A two-block decomposition with block ranks exactly ρ(P): A″ = U·Vᵀ of rank
/// r, B″ = X·Yᵀ of rank s, (w, z) the columns of T⁻¹.
pub fn btd_attaining(p: &Pencil, field: Field) -> Result<AttainedBtd> {
    let (transform, ranks) = attain_transform(p, field)?;
    let t = pencil_to_tensor(p);
    match &transform {
        AttainingTransform::Rational(g) => {
            let a2 = p.a.combine(&g.t11, &p.b, &g.t12);
            let b2 = p.a.combine(&g.t21, &p.b, &g.t22);
            let (u, v) = a2.rank_factorization();
            let (x, y) = b2.rank_factorization();
            let (w, z) = inverse_columns(g);
            let state = to_float_state(
                u.to_f64(),
                v.to_f64(),
                x.to_f64(),
                y.to_f64(),
                Vector2::new(to_f64(&w[0]), to_f64(&w[1])),
                Vector2::new(to_f64(&z[0]), to_f64(&z[1])),
                &t,
            );
            Ok(AttainedBtd { ranks, exact: Some(ExactBtd { u, v, x, y, w, z }), transform: transform.clone(), state })
        }
        AttainingTransform::Algebraic { decimal, .. } => {
            let tm = Matrix2::new(
                decimal_f64(&decimal[0][0]),
                decimal_f64(&decimal[0][1]),
                decimal_f64(&decimal[1][0]),
                decimal_f64(&decimal[1][1]),
            );
            let (a, b) = (p.a.to_f64(), p.b.to_f64());
            let a2 = &a * tm[(0, 0)] + &b * tm[(0, 1)];
            let b2 = &a * tm[(1, 0)] + &b * tm[(1, 1)];
            let (u, v) = svd_factor(&a2, ranks.r);
            let (x, y) = svd_factor(&b2, ranks.s);
            let inv = tm.try_inverse().expect("attaining transforms are invertible");
            let state = to_float_state(u, v, x, y, inv.column(0).into(), inv.column(1).into(), &t);
            Ok(AttainedBtd { ranks, exact: None, transform: transform.clone(), state })
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::rational::rat;
    use crate::pencil::random_unimodular;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn tensor_of_l1() {
        let t = pencil_to_tensor(&Pencil::l_block(1));
        assert_eq!(t.dims(), (1, 2, 2));
        assert_eq!((t.get(0, 0, 0), t.get(0, 1, 0)), (0.0, 1.0));
        assert_eq!((t.get(0, 0, 1), t.get(0, 1, 1)), (1.0, 0.0));
        assert_eq!(pencil_to_tensor(&Pencil::zero(2, 3)).norm(), 0.0);
    }

    #[test]
    fn norm_identity() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let p = Pencil::new(random_unimodular(4, &mut rng), random_unimodular(4, &mut rng)).unwrap();
        let lhs = pencil_to_tensor(&p).norm();
        let rhs = to_f64(&p.norm_sq()).sqrt();
        assert!((lhs - rhs).abs() <= 1e-12 * rhs);
    }

    #[test]
    fn attaining_jordan_and_proportional() {
        let p = Pencil::jordan(2, &rat(0));
        let b = btd_attaining(&p, Field::Real).unwrap();
        assert_eq!((b.ranks.r, b.ranks.s), (2, 1));
        let e = b.exact.as_ref().unwrap();
        assert_eq!((e.u.cols(), e.x.cols()), (2, 1));
        assert_eq!(e.reconstruct(), p);
        assert!(b.state.objective < 1e-12);

        let p = Pencil::new(MatrixQ::identity(2).scale(&rat(3)), MatrixQ::identity(2)).unwrap();
        let b = btd_attaining(&p, Field::Real).unwrap();
        assert_eq!(b.exact.as_ref().unwrap().x.cols(), 0);
        assert_eq!(b.exact.unwrap().reconstruct(), p);
    }

    #[test]
    fn attaining_irrational_float_path() {
        // eigenvalue ∛2 carries the single minimizer
        let c = MatrixQ::from_ints(3, 3, &[0, 0, 2, 1, 0, 0, 0, 1, 0]);
        let p = Pencil::regular(c);
        let b = btd_attaining(&p, Field::Real).unwrap();
        assert!(b.exact.is_none());
        assert_eq!((b.state.u.ncols(), b.state.x.ncols()), (3, 2));
        assert!(b.state.objective <= 1e-12 * pencil_to_tensor(&p).norm());
    }
}
