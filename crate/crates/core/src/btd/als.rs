//! Alternating least squares for the two-block decomposition of an m×n×2
//! tensor, instrumented to expose diverging factors.

use nalgebra::{DMatrix, Matrix2, Vector2};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::Serialize;

use crate::error::{Error, Result};

use super::{BtdState, Tensor3};

/// Starting point of the solver.
#[derive(Clone, Debug)]
pub enum AlsInit {
    /// Standard normal factors scaled to the input norm, standard normal (w, z).
    Seed(u64),
    State(BtdState),
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct IterationRecord {
    pub iter: usize,
    pub objective: f64,
    pub max_factor_norm: f64,
    pub cond_wz: f64,
    pub sigma_min_block1: f64,
    pub sigma_min_block2: f64,
    /// Some least-squares step of this sweep was rank deficient and took the
    /// minimum-norm solution.
    pub min_norm: bool,
}

/// One record per completed sweep.
#[derive(Clone, Debug, Default, PartialEq, Serialize)]
pub struct DivergenceLog {
    /// Max factor norm of the starting point.
    pub initial_max_factor_norm: f64,
    pub records: Vec<IterationRecord>,
    /// Sweeps whose objective rose by more than 1e-12 relative (plus the
    /// rounding floor 64ε‖T‖ of the residual evaluation). Rises that stay
    /// below 1e-10‖T‖, where an exact fit has been reached and only the
    /// conditioning of the normal equations remains, are not counted.
    pub monotone_violations: usize,
}

impl DivergenceLog {
    pub fn min_norm_steps(&self) -> usize {
        self.records.iter().filter(|r| r.min_norm).count()
    }
}

const MONOTONE_SLACK: f64 = 1e-12;
const ZERO_LEVEL: f64 = 1e-10;
const PINV_EPS: f64 = 1e-13;

/// K⁺ for a symmetric positive semidefinite K, and whether K was singular.
fn pinv(k: &DMatrix<f64>) -> (DMatrix<f64>, bool) {
    if k.nrows() == 0 {
        return (k.clone(), false);
    }
    let svd = k.clone().svd(true, true);
    let top = svd.singular_values.max();
    let eps = PINV_EPS * top.max(f64::MIN_POSITIVE);
    let deficient = top == 0.0 || svd.singular_values.iter().any(|&s| s <= eps);
    let inv = if top == 0.0 { DMatrix::zeros(k.ncols(), k.nrows()) } else { svd.pseudo_inverse(eps).expect("u and v requested") };
    (inv, deficient)
}

fn pinv2(g: &Matrix2<f64>) -> (Matrix2<f64>, bool) {
    let d = DMatrix::from_column_slice(2, 2, g.as_slice());
    let (p, def) = pinv(&d);
    (Matrix2::from_column_slice(p.as_slice()), def)
}

fn inner(a: &DMatrix<f64>, b: &DMatrix<f64>) -> f64 {
    a.dot(b)
}

/// k-th largest singular value (1-based), 0 when absent.
fn sigma_k(m: &DMatrix<f64>, k: usize) -> f64 {
    if k == 0 || m.is_empty() {
        return 0.0;
    }
    let mut sv: Vec<f64> = m.singular_values().iter().copied().collect();
    sv.sort_by(|a, b| b.total_cmp(a));
    sv.get(k - 1).copied().unwrap_or(0.0)
}

fn scaled_normal(rows: usize, cols: usize, target: f64, rng: &mut ChaCha8Rng) -> DMatrix<f64> {
    let m = DMatrix::from_fn(rows, cols, |_, _| StandardNormal.sample(rng));
    let nm: f64 = m.norm();
    if nm == 0.0 {
        m
    } else {
        m * (target / nm)
    }
}

fn initial_state(t: &Tensor3, r: usize, s: usize, seed: u64) -> BtdState {
    let (m, n, _) = t.dims();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let target = if t.norm() > 0.0 { t.norm().sqrt() } else { 1.0 };
    let u = scaled_normal(m, r, target, &mut rng);
    let v = scaled_normal(n, r, target, &mut rng);
    let x = scaled_normal(m, s, target, &mut rng);
    let y = scaled_normal(n, s, target, &mut rng);
    // coordinate (w, z) would let the first update see slice A alone; a
    // rank-deficient A then collapses U for good, since minimum-norm updates
    // never raise its rank again
    let w = Vector2::new(StandardNormal.sample(&mut rng), StandardNormal.sample(&mut rng));
    let z = Vector2::new(StandardNormal.sample(&mut rng), StandardNormal.sample(&mut rng));
    BtdState { u, v, x, y, w, z, objective: 0.0, iteration: 0 }
}

/// Moves the scale of w into U and equalizes ‖U‖ and ‖V‖ (same for z, X, Y).
/// The represented tensor does not change.
fn rebalance(st: &mut BtdState) {
    fn one(f: &mut DMatrix<f64>, g: &mut DMatrix<f64>, v: &mut Vector2<f64>) {
        let nv = v.norm();
        if nv > 0.0 {
            *f *= nv;
            *v /= nv;
        }
        let (nf, ng) = (f.norm(), g.norm());
        if nf > 0.0 && ng > 0.0 {
            let a = (ng / nf).sqrt();
            *f *= a;
            *g /= a;
        }
    }
    one(&mut st.u, &mut st.v, &mut st.w);
    one(&mut st.x, &mut st.y, &mut st.z);
}

/// One sweep U, V, X, Y, (w, z). Returns whether a minimum-norm solution was used.
fn sweep(st: &mut BtdState, t: &[DMatrix<f64>; 2], s: usize) -> bool {
    let mut flagged = false;

    // first block with the second fixed
    let m2 = st.block2();
    let g = (&t[0] - &m2 * st.z[0]) * st.w[0] + (&t[1] - &m2 * st.z[1]) * st.w[1];
    let ww = st.w.norm_squared();
    let (k, d) = pinv(&((st.v.transpose() * &st.v) * ww));
    flagged |= d;
    st.u = &g * &st.v * k;
    let (k, d) = pinv(&((st.u.transpose() * &st.u) * ww));
    flagged |= d;
    st.v = g.transpose() * &st.u * k;

    // second block with the first fixed
    let m1 = st.block1();
    if s > 0 {
        let h = (&t[0] - &m1 * st.w[0]) * st.z[0] + (&t[1] - &m1 * st.w[1]) * st.z[1];
        let zz = st.z.norm_squared();
        let (k, d) = pinv(&((st.y.transpose() * &st.y) * zz));
        flagged |= d;
        st.x = &h * &st.y * k;
        let (k, d) = pinv(&((st.x.transpose() * &st.x) * zz));
        flagged |= d;
        st.y = h.transpose() * &st.x * k;
    }

    // mixing vectors: per slice a 2×2 normal system
    let m2 = st.block2();
    if s > 0 {
        let gram = Matrix2::new(inner(&m1, &m1), inner(&m1, &m2), inner(&m2, &m1), inner(&m2, &m2));
        let (gi, d) = pinv2(&gram);
        flagged |= d;
        for kk in 0..2 {
            let sol = gi * Vector2::new(inner(&m1, &t[kk]), inner(&m2, &t[kk]));
            st.w[kk] = sol[0];
            st.z[kk] = sol[1];
        }
    } else {
        let n1 = inner(&m1, &m1);
        if n1 > 0.0 {
            st.w = Vector2::new(inner(&m1, &t[0]) / n1, inner(&m1, &t[1]) / n1);
        } else {
            flagged = true;
        }
        // any complement keeps {w, z} a basis; the block itself is empty
        st.z = if st.w.norm() > 0.0 { Vector2::new(-st.w[1], st.w[0]) } else { Vector2::new(0.0, 1.0) };
    }
    rebalance(st);
    flagged
}

/// Best-approximation attempt over tensors (UVᵀ) ⊗ w + (XYᵀ) ⊗ z with U: m×r,
/// X: m×s. Stops after `max_iters` sweeps or when the relative decrease of the
/// objective falls below `rel_tol` (0 disables early stopping).
pub fn als_approximate(
    t: &Tensor3,
    r: usize,
    s: usize,
    init: AlsInit,
    max_iters: usize,
    rel_tol: f64,
) -> Result<(BtdState, DivergenceLog)> {
    let (m, n, d) = t.dims();
    if d != 2 {
        return Err(Error::Dimension(format!("expected an m×n×2 tensor, got third dimension {d}")));
    }
    if r < s {
        return Err(Error::InvalidRanks(format!("r = {r} < s = {s}")));
    }
    if r > m.min(n) {
        return Err(Error::InvalidRanks(format!("r = {r} exceeds min(m, n) = {}", m.min(n))));
    }
    let mut st = match init {
        AlsInit::Seed(seed) => initial_state(t, r, s, seed),
        AlsInit::State(st) => {
            let shapes = [st.u.shape(), st.v.shape(), st.x.shape(), st.y.shape()];
            if shapes != [(m, r), (n, r), (m, s), (n, s)] {
                return Err(Error::Dimension("initial factors do not match (m, n, r, s)".into()));
            }
            st
        }
    };
    let slices = [t.slice(0), t.slice(1)];
    st.objective = st.residual(t);
    let mut log = DivergenceLog { initial_max_factor_norm: st.max_factor_norm(), ..Default::default() };
    let mut prev = st.objective;
    // the residual itself is only known to about ε‖T‖
    let floor = 64.0 * f64::EPSILON * t.norm();
    let zero = ZERO_LEVEL * t.norm();
    for it in 1..=max_iters {
        let min_norm = sweep(&mut st, &slices, s);
        st.iteration = it;
        st.objective = st.residual(t);
        if st.objective > zero && st.objective > prev * (1.0 + MONOTONE_SLACK) + floor {
            log.monotone_violations += 1;
        }
        log.records.push(IterationRecord {
            iter: it,
            objective: st.objective,
            max_factor_norm: st.max_factor_norm(),
            cond_wz: st.cond_wz(),
            sigma_min_block1: sigma_k(&st.block1(), r),
            sigma_min_block2: sigma_k(&st.block2(), s),
            min_norm,
        });
        let decrease = prev - st.objective;
        if st.objective == 0.0 || (rel_tol > 0.0 && decrease <= rel_tol * prev) {
            break;
        }
        prev = st.objective;
    }
    Ok((st, log))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::btd::pencil_to_tensor;
    use crate::exact::rational::rat;
    use crate::pencil::Pencil;

    #[test]
    fn exact_member_is_fitted() {
        // a (2,1) tensor built from explicit factors
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let truth = BtdState {
            u: scaled_normal(3, 2, 1.0, &mut rng),
            v: scaled_normal(3, 2, 1.0, &mut rng),
            x: scaled_normal(3, 1, 1.0, &mut rng),
            y: scaled_normal(3, 1, 1.0, &mut rng),
            w: Vector2::new(1.0, 0.3),
            z: Vector2::new(-0.2, 1.0),
            objective: 0.0,
            iteration: 0,
        };
        let t = truth.reconstruct();
        // the landscape has a spurious local minimum near 0.222 that catches
        // most random starts, so the claim is about the best of several
        let mut best = f64::INFINITY;
        for seed in 0..8 {
            let (st, log) = als_approximate(&t, 2, 1, AlsInit::Seed(seed), 20_000, 0.0).unwrap();
            assert_eq!(log.monotone_violations, 0);
            best = best.min(st.objective);
        }
        assert!(best < 1e-10, "{best}");
    }

    #[test]
    fn rank_deficient_slice_does_not_collapse_the_block() {
        // J₂(0) ⊕ J₁(0) + λE: slice A has rank 1, yet (3, 1) fits exactly
        let p = Pencil::jordan(2, &rat(0)).direct_sum(&Pencil::jordan(1, &rat(0)));
        let t = pencil_to_tensor(&p);
        let (st, log) = als_approximate(&t, 3, 1, AlsInit::Seed(1), 2000, 0.0).unwrap();
        assert!(st.objective < 1e-10, "{}", st.objective);
        assert_eq!(log.monotone_violations, 0);
    }

    #[test]
    fn pair_block_diverges() {
        let p = Pencil::q_block(1, &rat(0), &rat(1)).unwrap();
        let t = pencil_to_tensor(&p);
        let (st, log) = als_approximate(&t, 1, 1, AlsInit::Seed(7), 2000, 0.0).unwrap();
        assert_eq!(log.records.len(), 2000);
        assert_eq!(log.monotone_violations, 0);
        assert!(st.objective < t.norm());
        assert!(log.records.last().unwrap().max_factor_norm > log.records[0].max_factor_norm);
    }

    #[test]
    fn single_block_reduces_to_matrix_approximation() {
        let p = Pencil::new(crate::exact::MatrixQ::identity(2), crate::exact::MatrixQ::identity(2).scale(&rat(2))).unwrap();
        let t = pencil_to_tensor(&p);
        let (st, _) = als_approximate(&t, 2, 0, AlsInit::Seed(0), 500, 1e-15).unwrap();
        assert!(st.objective < 1e-10);
        assert!(als_approximate(&t, 3, 0, AlsInit::Seed(0), 1, 0.0).is_err());
        assert!(als_approximate(&t, 1, 2, AlsInit::Seed(0), 1, 0.0).is_err());
    }
}
