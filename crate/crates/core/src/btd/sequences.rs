//! Convergent sequences inside B_{s,s} whose limits leave the set.

use nalgebra::Vector2;
use num_bigint::BigInt;
use num_traits::{Signed, Zero};
use rand::Rng;

use crate::error::{Error, Result};
use crate::exact::rational::{rat, to_f64, Rational};
use crate::exact::MatrixQ;
use crate::pencil::{jordan_matrix, Pencil};

use super::BtdState;

/// √x when x is the square of a rational.
pub fn exact_sqrt(x: &Rational) -> Option<Rational> {
    if x.is_negative() {
        return None;
    }
    let root = |n: &BigInt| {
        let r = n.sqrt();
        (&r * &r == *n).then_some(r)
    };
    Some(Rational::new(root(x.numer())?, root(x.denom())?))
}

fn pencil_norm(p: &Pencil) -> f64 {
    to_f64(&p.norm_sq()).sqrt()
}

/// Pₙ with its limit P = (ACᵀ + BDᵀ) + λBCᵀ.
#[derive(Clone, Debug, PartialEq)]
pub struct PnMember {
    pub n: u64,
    pub pencil: Pencil,
    pub limit: Pencil,
    pub rank_ab: usize,
    pub rank_cd: usize,
    /// min(rank[A B], rank[C D]) > 3s′/2.
    pub cond_ex: bool,
    /// ‖Pₙ − P‖.
    pub distance: f64,
    /// C with ‖Pₙ − P‖ ≤ C/n: ‖ADᵀ + λ(ACᵀ + BDᵀ)‖ + ‖ADᵀ‖.
    pub bound: f64,
    /// Pₙ = n(B + A/n)(C + D/n)ᵀ ⊗ (1, 1/n) + (−nB)Cᵀ ⊗ (1, 0).
    pub factors: BtdState,
}

/// The n-th member of the sequence built from m×s′ matrices A, B and n×s′
/// matrices C, D. The expansion Pₙ = P + (ADᵀ + λ(ACᵀ + BDᵀ))/n + λADᵀ/n² is
/// checked exactly.
pub fn sequence_pn(a: &MatrixQ, b: &MatrixQ, c: &MatrixQ, d: &MatrixQ, n: u64) -> Result<PnMember> {
    let sp = a.cols();
    if b.shape() != a.shape() || d.shape() != c.shape() || c.cols() != sp {
        return Err(Error::Dimension("A, B must be m×s′ and C, D n×s′".into()));
    }
    if n == 0 {
        return Err(Error::InvalidParameter("n must be positive".into()));
    }
    let nq = Rational::from_integer(BigInt::from(n));
    let inv = Rational::new(BigInt::from(1), BigInt::from(n));
    let one = rat(1);
    let bt = b.combine(&one, a, &inv); // B + A/n
    let ct = c.combine(&one, d, &inv); // C + D/n
    let big = &bt * &ct.transpose();
    let bc = b * &c.transpose();
    let pn = Pencil { a: big.combine(&nq, &bc, &-&nq), b: big.clone() };
    let ad = a * &d.transpose();
    let ac_bd = (a * &c.transpose()).combine(&one, &(b * &d.transpose()), &one);
    let limit = Pencil { a: ac_bd.clone(), b: bc.clone() };

    let expected = Pencil {
        a: limit.a.combine(&one, &ad, &inv),
        b: limit.b.combine(&one, &ac_bd, &inv).combine(&one, &ad, &(&inv * &inv)),
    };
    if expected != pn {
        return Err(Error::Internal("expansion of Pₙ does not match".into()));
    }

    let rank_ab = a.hstack(b).rank();
    let rank_cd = c.hstack(d).rank();
    let cond_ex = 2 * rank_ab.min(rank_cd) > 3 * sp;
    let distance = pencil_norm(&pn.sub(&limit));
    let bound = pencil_norm(&Pencil { a: ad.clone(), b: ac_bd }) + to_f64(&ad.frobenius_sq()).sqrt();
    let nf = n as f64;
    let mut factors = BtdState {
        u: bt.scale(&nq).to_f64(),
        v: ct.to_f64(),
        x: b.scale(&-&nq).to_f64(),
        y: c.to_f64(),
        w: Vector2::new(1.0, 1.0 / nf),
        z: Vector2::new(1.0, 0.0),
        objective: 0.0,
        iteration: 0,
    };
    factors.objective = factors.residual(&super::pencil_to_tensor(&pn));
    Ok(PnMember { n, pencil: pn, limit, rank_ab, rank_cd, cond_ex, distance, bound, factors })
}

/// Random integer m×k matrix of full column rank (k ≤ m).
pub fn random_full_rank<R: Rng>(m: usize, k: usize, rng: &mut R) -> MatrixQ {
    loop {
        let x = MatrixQ::from_fn(m, k, |_, _| rat(rng.gen_range(-3..=3)));
        if x.rank() == m.min(k) {
            return x;
        }
    }
}

/// Inputs at the boundary of the rank condition: columns a₁…a₄ of A with B =
/// (a₁ a₂ b₃ b₄) and C = (c₁ … c₄) with D = (d₁ d₂ c₃ c₄), all six distinct
/// vectors independent. rank[A B] = rank[C D] = 6 = 3s′/2.
pub fn tight_instance<R: Rng>(m: usize, n: usize, rng: &mut R) -> Result<[MatrixQ; 4]> {
    if m < 6 || n < 6 {
        return Err(Error::InvalidParameter("the tight instance needs m, n ≥ 6".into()));
    }
    let left = random_full_rank(m, 6, rng);
    let right = random_full_rank(n, 6, rng);
    let all: Vec<usize> = (0..m).collect();
    let alln: Vec<usize> = (0..n).collect();
    let a = left.submatrix(&all, &[0, 1, 2, 3]);
    let b = left.submatrix(&all, &[0, 1, 4, 5]);
    let c = right.submatrix(&alln, &[0, 1, 2, 3]);
    let d = right.submatrix(&alln, &[4, 5, 2, 3]);
    Ok([a, b, c, d])
}

/// Which limit the Z_p sequence approaches.
#[derive(Clone, Debug, PartialEq)]
pub enum ZpVariant {
    /// J_{2k}(a) + λE.
    Plain,
    /// J_{m₁}(a) ⊕ Q_{2j}(qa, qb) + λE with m₁ = 2k − 2j.
    WithQ { j: usize, qa: Rational, qb: Rational },
}

#[derive(Clone, Debug, PartialEq)]
pub struct ZpMember {
    pub pencil: Pencil,
    pub limit: Pencil,
    /// ‖Z_p − limit‖², exact.
    pub distance_sq: Rational,
}

impl ZpMember {
    /// The exact distance; it is 1/p by construction.
    pub fn distance(&self) -> Rational {
        exact_sqrt(&self.distance_sq).expect("a single entry 1/p differs")
    }
}

/// Z_p = W_p + λE, W_p = J_{m₁−1}(a) ⊕ (a + 1/p) [⊕ Q] + e_{m₁−1}e_{m₁}ᵀ.
pub fn sequence_zp(k: usize, a: &Rational, variant: &ZpVariant, p: u64) -> Result<ZpMember> {
    if k == 0 || p == 0 {
        return Err(Error::InvalidParameter("k and p must be positive".into()));
    }
    let q = match variant {
        ZpVariant::Plain => None,
        ZpVariant::WithQ { j, qa, qb } => {
            if qb.is_zero() {
                return Err(Error::InvalidParameter("b ≠ 0 required for Q".into()));
            }
            if *j == 0 || 2 * j + 2 > 2 * k {
                return Err(Error::InvalidParameter(format!("Q of size {} does not fit in {}", 2 * j, 2 * k)));
            }
            Some(Pencil::q_block(*j, qa, qb)?.a)
        }
    };
    let m1 = 2 * k - q.as_ref().map_or(0, |x| x.rows());
    let pinv = Rational::new(BigInt::from(1), BigInt::from(p));
    let head = jordan_matrix(m1 - 1, a).direct_sum(&MatrixQ::from_rows(&[vec![a + &pinv]]));
    let mut w = match &q {
        Some(qm) => head.direct_sum(qm),
        None => head,
    };
    w[(m1 - 2, m1 - 1)] = rat(1);
    let limit_a = match &q {
        Some(qm) => jordan_matrix(m1, a).direct_sum(qm),
        None => jordan_matrix(m1, a),
    };
    let size = 2 * k;
    let pencil = Pencil::new(w, MatrixQ::identity(size))?;
    let limit = Pencil::new(limit_a, MatrixQ::identity(size))?;
    let distance_sq = pencil.sub(&limit).norm_sq();
    Ok(ZpMember { pencil, limit, distance_sq })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::rational::ratio;
    use crate::kcf::Field;
    use crate::minrank::{minimal_ranks, MinimalRanks};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn zp_small_cases() {
        let z = sequence_zp(1, &rat(0), &ZpVariant::Plain, 10).unwrap();
        assert_eq!(z.distance(), ratio(1, 10));
        assert_eq!(minimal_ranks(&z.pencil, Field::Real), MinimalRanks { r: 1, s: 1 });
        assert_eq!(minimal_ranks(&z.limit, Field::Real), MinimalRanks { r: 2, s: 1 });
        for p in [1, 7, 1000] {
            let z = sequence_zp(2, &rat(3), &ZpVariant::Plain, p).unwrap();
            assert_eq!(minimal_ranks(&z.pencil, Field::Real), MinimalRanks { r: 3, s: 3 });
        }
        let v = ZpVariant::WithQ { j: 1, qa: rat(0), qb: rat(1) };
        let z = sequence_zp(2, &rat(1), &v, 5).unwrap();
        assert_eq!(minimal_ranks(&z.pencil, Field::Real), MinimalRanks { r: 3, s: 3 });
        assert_eq!(z.distance(), ratio(1, 5));
        assert!(sequence_zp(1, &rat(0), &v, 5).is_err());
        assert!(sequence_zp(2, &rat(0), &ZpVariant::Plain, 0).is_err());
    }

    #[test]
    fn pn_expansion_and_rate() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let (a, b) = (random_full_rank(8, 4, &mut rng), random_full_rank(8, 4, &mut rng));
        let (c, d) = (random_full_rank(8, 4, &mut rng), random_full_rank(8, 4, &mut rng));
        let m = sequence_pn(&a, &b, &c, &d, 100).unwrap();
        assert!(m.cond_ex, "{} {}", m.rank_ab, m.rank_cd);
        assert!(m.distance * 100.0 <= m.bound * (1.0 + 1e-12));
        assert!(m.factors.objective <= 1e-9 * super::super::pencil_to_tensor(&m.pencil).norm());
        assert!(sequence_pn(&a, &b, &c, &d, 0).is_err());
    }

    #[test]
    fn tight_instance_fails_condition() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let [a, b, c, d] = tight_instance(6, 7, &mut rng).unwrap();
        let m = sequence_pn(&a, &b, &c, &d, 1).unwrap();
        assert_eq!((m.rank_ab, m.rank_cd), (6, 6));
        assert!(!m.cond_ex);
        // (t₁, t₂) = (1, −1): (ACᵀ + BDᵀ) − BCᵀ has rank ≤ 4
        let combo = m.limit.a.combine(&rat(1), &m.limit.b, &rat(-1));
        assert!(combo.rank() <= 4);
    }

    #[test]
    fn sqrt_of_squares() {
        assert_eq!(exact_sqrt(&ratio(9, 4)), Some(ratio(3, 2)));
        assert_eq!(exact_sqrt(&rat(2)), None);
        assert_eq!(exact_sqrt(&rat(-1)), None);
    }
}
