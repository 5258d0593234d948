//! GL(m) × GL(n) × GL₂(ℝ) equivalence of two rational pencils.
//!
//! Minimal indices must agree; the regular parts are equivalent iff some real
//! Möbius map carries the eigenvalue points of one (with their block sizes,
//! ∞ included) onto those of the other. Real Möbius maps are sharply
//! 3-transitive on ℝ ∪ {∞}, transitive on conjugate pairs, and the stabiliser
//! of a pair is transitive on ℝ ∪ {∞}; so with at most three points over ℂ
//! matching typed multisets decide. With four simple points the binary quartic
//! vanishing on them decides through its invariants I and J. Larger
//! configurations fall back to a numerical three-point search.

use nalgebra::Matrix2;
use num_complex::Complex64;
use num_traits::{Signed, Zero};

use crate::exact::rational::{rat, Rational};
use crate::exact::PolyQ;
use crate::kcf::{kronecker_structure, Eigenvalue, Field, KroneckerStructure};
use crate::pencil::Pencil;

/// Outcome of an equivalence check.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct EquivalenceReport {
    pub equivalent: bool,
    /// False when the numerical fallback decided.
    pub exact: bool,
}

#[derive(Clone, Debug)]
struct Point {
    sizes: Vec<usize>,
    /// None for ∞.
    eigen: Option<Eigenvalue>,
}

impl Point {
    fn is_pair(&self) -> bool {
        matches!(self.eigen, Some(Eigenvalue::ComplexPair { .. }))
    }

    fn key(&self) -> (Vec<usize>, bool) {
        (self.sizes.clone(), self.is_pair())
    }

    fn weight(&self) -> usize {
        if self.is_pair() {
            2
        } else {
            1
        }
    }
}

fn points(ks: &KroneckerStructure) -> Vec<Point> {
    let mut out: Vec<Point> = ks.segre().into_iter().map(|(e, sizes)| Point { sizes, eigen: Some(e) }).collect();
    if !ks.infinite_divisor_degrees.is_empty() {
        let mut sizes = ks.infinite_divisor_degrees.clone();
        sizes.sort_unstable_by(|a, b| b.cmp(a));
        out.push(Point { sizes, eigen: None });
    }
    out
}

/// Coefficients (x⁰y⁴ … x⁴y⁰) of the quartic whose projective roots are the points.
fn quartic(pts: &[Point]) -> Vec<Rational> {
    let mut factors: Vec<PolyQ> = vec![];
    let mut f = PolyQ::one();
    let mut deg = 0;
    for p in pts {
        match &p.eigen {
            None => deg += 1, // the factor y contributes degree only
            Some(e) => {
                let h = e.min_poly();
                if !factors.contains(&h) {
                    deg += h.deg();
                    f = &f * &h;
                    factors.push(h);
                }
            }
        }
    }
    debug_assert_eq!(deg, 4);
    (0..=4).map(|i| f.coeff(i)).collect()
}

/// Invariants (I, J) of a x⁴ + 4b x³y + 6c x²y² + 4d xy³ + e y⁴.
fn invariants(f: &[Rational]) -> (Rational, Rational) {
    let (a, b, c, d, e) = (f[4].clone(), &f[3] / rat(4), &f[2] / rat(6), &f[1] / rat(4), f[0].clone());
    let i = &a * &e - rat(4) * &b * &d + rat(3) * &c * &c;
    let j = &a * &c * &e + rat(2) * &b * &c * &d - &a * &d * &d - &e * &b * &b - &c * &c * &c;
    (i, j)
}

fn quartic_equivalent(p1: &[Point], p2: &[Point]) -> bool {
    let (mut f1, mut f2) = (quartic(p1), quartic(p2));
    let no_real = p1.iter().all(Point::is_pair);
    if no_real {
        // definite forms: fix the sign so both are positive; J then keeps its sign
        for f in [&mut f1, &mut f2] {
            if f[4].is_negative() {
                for c in f.iter_mut() {
                    *c = -c.clone();
                }
            }
        }
    }
    let (i1, j1) = invariants(&f1);
    let (i2, j2) = invariants(&f2);
    let both_degenerate = i1.is_zero() && j1.is_zero() && i2.is_zero() && j2.is_zero();
    if (i1.is_zero() && j1.is_zero()) != (i2.is_zero() && j2.is_zero()) {
        return false;
    }
    if both_degenerate {
        return true;
    }
    let same_j = &i1 * &i1 * &i1 * &j2 * &j2 == &i2 * &i2 * &i2 * &j1 * &j1;
    if no_real {
        same_j && j1.signum() == j2.signum()
    } else {
        same_j
    }
}

/// Homogeneous coordinates of every complex point, tagged by type.
fn complex_points(pts: &[Point]) -> Vec<((Vec<usize>, bool), [Complex64; 2])> {
    let mut out = vec![];
    for p in pts {
        match &p.eigen {
            None => out.push((p.key(), [Complex64::new(1.0, 0.0), Complex64::new(0.0, 0.0)])),
            Some(e) => {
                let z = e.approx();
                out.push((p.key(), [z, Complex64::new(1.0, 0.0)]));
                if p.is_pair() {
                    out.push((p.key(), [z.conj(), Complex64::new(1.0, 0.0)]));
                }
            }
        }
    }
    out
}

/// Matrix sending e₁, e₂, e₁ + e₂ to the three given points.
fn frame(p: &[[Complex64; 2]; 3]) -> Option<Matrix2<Complex64>> {
    let m = Matrix2::new(p[0][0], p[1][0], p[0][1], p[1][1]);
    let coef = m.try_inverse()? * nalgebra::Vector2::new(p[2][0], p[2][1]);
    Some(Matrix2::new(coef[0] * p[0][0], coef[1] * p[1][0], coef[0] * p[0][1], coef[1] * p[1][1]))
}

fn chordal(a: &[Complex64; 2], b: &[Complex64; 2]) -> f64 {
    let cross = (a[0] * b[1] - a[1] * b[0]).norm();
    let na = (a[0].norm_sqr() + a[1].norm_sqr()).sqrt();
    let nb = (b[0].norm_sqr() + b[1].norm_sqr()).sqrt();
    cross / (na * nb)
}

fn numeric_search(p1: &[Point], p2: &[Point]) -> bool {
    let c1 = complex_points(p1);
    let c2 = complex_points(p2);
    if c1.len() != c2.len() || c1.len() < 3 {
        return false;
    }
    let src = [c1[0].1, c1[1].1, c1[2].1];
    let Some(fs) = frame(&src) else { return false };
    let Some(fs_inv) = fs.try_inverse() else { return false };
    for i in 0..c2.len() {
        for j in 0..c2.len() {
            for k in 0..c2.len() {
                if i == j || j == k || i == k || c2[i].0 != c1[0].0 || c2[j].0 != c1[1].0 || c2[k].0 != c1[2].0 {
                    continue;
                }
                let Some(ft) = frame(&[c2[i].1, c2[j].1, c2[k].1]) else { continue };
                let m = ft * fs_inv;
                let mut used = vec![false; c2.len()];
                let ok = c1.iter().all(|(key, z)| {
                    let v = m * nalgebra::Vector2::new(z[0], z[1]);
                    let img = [v[0], v[1]];
                    match (0..c2.len()).find(|&t| !used[t] && c2[t].0 == *key && chordal(&img, &c2[t].1) < 1e-8) {
                        Some(t) => {
                            used[t] = true;
                            true
                        }
                        None => false,
                    }
                });
                if ok {
                    return true;
                }
            }
        }
    }
    false
}

/// Equivalence decision with a flag telling whether it was exact.
pub fn verify_equivalence_report(p1: &Pencil, p2: &Pencil) -> EquivalenceReport {
    let exact = |equivalent| EquivalenceReport { equivalent, exact: true };
    if (p1.m(), p1.n()) != (p2.m(), p2.n()) {
        return exact(false);
    }
    let k1 = kronecker_structure(p1, Field::Real);
    let k2 = kronecker_structure(p2, Field::Real);
    if k1.min_col_indices != k2.min_col_indices || k1.min_row_indices != k2.min_row_indices {
        return exact(false);
    }
    let (pts1, pts2) = (points(&k1), points(&k2));
    let mut keys1: Vec<_> = pts1.iter().map(Point::key).collect();
    let mut keys2: Vec<_> = pts2.iter().map(Point::key).collect();
    keys1.sort();
    keys2.sort();
    if keys1 != keys2 {
        return exact(false);
    }
    let n: usize = pts1.iter().map(Point::weight).sum();
    if n <= 3 {
        return exact(true);
    }
    let uniform = keys1.iter().all(|k| k.0 == keys1[0].0);
    if n == 4 && uniform {
        return exact(quartic_equivalent(&pts1, &pts2));
    }
    EquivalenceReport { equivalent: numeric_search(&pts1, &pts2), exact: false }
}

/// True iff the pencils lie in one GL(m) × GL(n) × GL₂(ℝ) orbit.
pub fn verify_equivalence(p1: &Pencil, p2: &Pencil) -> bool {
    verify_equivalence_report(p1, p2).equivalent
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::MatrixQ;
    use crate::pencil::{random_gl2, random_unimodular};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn diag(v: &[i64]) -> Pencil {
        let n = v.len();
        let a = MatrixQ::from_fn(n, n, |i, j| if i == j { rat(v[i]) } else { rat(0) });
        Pencil::regular(a)
    }

    #[test]
    fn real_moebius_witness_for_point_plus_pair() {
        // a ⊕ Q(c, d): the map λ ↦ (λ + 1)/2 sends {−1, −1 ± 2i} to {0, ±i}
        let p1 = Pencil::jordan(1, &rat(0)).direct_sum(&Pencil::q_block(1, &rat(0), &rat(1)).unwrap());
        let p2 = Pencil::jordan(1, &rat(1)).direct_sum(&Pencil::q_block(1, &rat(1), &rat(2)).unwrap());
        assert!(verify_equivalence(&p1, &p2));
        // explicit witness: (A, B) ↦ (A − B, 2B) realises that map up to GL(3) × GL(3)
        let t = crate::pencil::Gl2Transform::new(rat(1), rat(-1), rat(0), rat(2)).unwrap();
        let moved = p2.apply_gl2(&t);
        let ks = kronecker_structure(&moved, Field::Real);
        let ks1 = kronecker_structure(&p1, Field::Real);
        assert_eq!(ks.finite_divisors, ks1.finite_divisors);
    }

    #[test]
    fn four_real_points_cross_ratio() {
        let base = diag(&[0, 1, 2, 3]);
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let t = random_gl2(&mut rng);
        let u = random_unimodular(4, &mut rng);
        let v = random_unimodular(4, &mut rng);
        let moved = base.apply_gl2(&t).equivalence(&u, &v);
        assert!(verify_equivalence(&base, &moved));
        // cross-ratio of {0,1,2,3} differs from that of {0,1,2,5}
        assert!(!verify_equivalence(&base, &diag(&[0, 1, 2, 5])));
        // {0,1,3,4} and {0,2,3,4}… harmonic-type symmetries: reflection λ ↦ 4 − λ
        assert!(verify_equivalence(&diag(&[0, 1, 3, 4]), &diag(&[0, 1, 3, 4]).apply_gl2(&t)));
    }

    #[test]
    fn two_pairs_and_mixed() {
        let q = |a: i64, b: i64| Pencil::q_block(1, &rat(a), &rat(b)).unwrap();
        let p1 = q(0, 1).direct_sum(&q(0, 2));
        let p2 = q(0, 1).direct_sum(&q(0, 3));
        assert!(!verify_equivalence(&p1, &p2));
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for _ in 0..5 {
            let t = random_gl2(&mut rng);
            assert!(verify_equivalence(&p1, &p1.apply_gl2(&t)));
            assert!(verify_equivalence(&p2, &p2.apply_gl2(&t)));
        }
        let m1 = diag(&[0, 1]).direct_sum(&q(0, 1));
        let m2 = diag(&[0, 3]).direct_sum(&q(0, 1));
        assert!(!verify_equivalence(&m1, &m2));
        for _ in 0..5 {
            let t = random_gl2(&mut rng);
            assert!(verify_equivalence(&m2, &m2.apply_gl2(&t)));
        }
    }

    #[test]
    fn different_minimal_indices() {
        assert!(!verify_equivalence(&Pencil::l_block(1).direct_sum(&Pencil::r_block(2)), &Pencil::l_block(2).direct_sum(&Pencil::r_block(1))));
    }
}
