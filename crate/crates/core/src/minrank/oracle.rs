//! Minimal ranks straight from the definition: the rank of tA + uB can only
//! drop at projective roots of the gcd g(t, u) of the maximal nonvanishing
//! minors, so ρ follows from exact rank evaluations at those finitely many points.

use std::sync::Arc;

use rand::seq::index::sample;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::exact::numberfield::rank_combination;
use crate::exact::poly::interpolate;
use crate::exact::polymat::subsets;
use crate::exact::rational::rat;
use crate::exact::sturm::real_root_count;
use crate::exact::{factor, MatrixQ, PolyQ, Rational};
use crate::kcf::{normal_rank, Field};
use crate::pencil::Pencil;

use super::MinimalRanks;

/// Oracle output with its bookkeeping.
#[derive(Clone, Debug, PartialEq)]
pub struct OracleReport {
    pub ranks: MinimalRanks,
    /// Number of projective points attaining s (each root of an irreducible factor counts).
    pub minimizer_count: usize,
    /// Only a random subset of the minors entered the gcd (sizes above 4×4). The
    /// candidate set is then a superset of the true drop points and the ranks are
    /// still exact, but the gcd itself is not the full one.
    pub probabilistic: bool,
    /// (rank, number of points) for every candidate point examined.
    pub points: Vec<(usize, usize)>,
}

const FULL_ENUMERATION_LIMIT: usize = 4;

fn minor_polys(p: &Pencil, k: usize, seed: u64) -> (Vec<PolyQ>, bool) {
    let (m, n) = (p.m(), p.n());
    let xs: Vec<Rational> = (0..=k as i64).map(rat).collect();
    let evals: Vec<MatrixQ> = xs.iter().map(|x| p.eval(x)).collect();
    let rows = subsets(m, k);
    let cols = subsets(n, k);
    let mut pairs: Vec<(Vec<usize>, Vec<usize>)> = vec![];
    let sampled = m > FULL_ENUMERATION_LIMIT || n > FULL_ENUMERATION_LIMIT;
    if sampled {
        let total = rows.len() * cols.len();
        let want = (2 * m * n).min(total);
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        for idx in sample(&mut rng, total, want) {
            pairs.push((rows[idx / cols.len()].clone(), cols[idx % cols.len()].clone()));
        }
        pairs.push(nonzero_minor(p, k));
    } else {
        for r in &rows {
            for c in &cols {
                pairs.push((r.clone(), c.clone()));
            }
        }
    }
    let polys = pairs
        .par_iter()
        .map(|(r, c)| {
            let ys: Vec<Rational> = evals.iter().map(|e| e.submatrix(r, c).det()).collect();
            interpolate(&xs, &ys)
        })
        .collect();
    (polys, sampled)
}

/// Row and column sets of a k×k submatrix that is nonsingular at a generic λ.
fn nonzero_minor(p: &Pencil, k: usize) -> (Vec<usize>, Vec<usize>) {
    let mut x = 0i64;
    loop {
        let e = p.eval(&rat(x));
        if e.rank() == k {
            let (_, cols) = e.rref();
            let sub = e.submatrix(&(0..e.rows()).collect::<Vec<_>>(), &cols);
            let (_, rows) = sub.transpose().rref();
            return (rows, cols);
        }
        x += 1;
    }
}

/// A projective point where the rank of tA + uB may drop.
#[derive(Clone, Debug, PartialEq)]
pub enum CandidatePoint {
    /// (t, u) with rational coordinates.
    Rational { t: Rational, u: Rational },
    /// Every root λ₀ (in the field) of an irreducible factor of degree ≥ 2, as (1, λ₀).
    Factor(PolyQ),
}

/// Candidate point with its exact rank and the number of projective points it stands for.
#[derive(Clone, Debug, PartialEq)]
pub struct Candidate {
    pub point: CandidatePoint,
    pub rank: usize,
    pub count: usize,
}

/// Normal rank and every candidate drop point, plus the sampling flag. λ = 0
/// and λ = ∞ are always examined.
pub fn candidate_points(p: &Pencil, field: Field, seed: u64) -> (usize, Vec<Candidate>, bool) {
    let nr = normal_rank(p);
    if nr == 0 {
        return (0, vec![], false);
    }
    let (minors, probabilistic) = minor_polys(p, nr, seed);
    // deterministic left-to-right reduction
    let mut g = PolyQ::zero();
    for q in &minors {
        g = g.gcd(q);
        if g.is_one() {
            break;
        }
    }

    let mut out = vec![Candidate { point: CandidatePoint::Rational { t: rat(0), u: rat(1) }, rank: p.b.rank(), count: 1 }];
    let mut zero_is_root = false;
    if !g.is_constant() {
        for (f, _) in factor(&g) {
            if f.deg() == 1 {
                let root = -f.coeff(0) / f.coeff(1);
                zero_is_root |= num_traits::Zero::is_zero(&root);
                let rank = p.eval(&root).rank();
                out.push(Candidate { point: CandidatePoint::Rational { t: rat(1), u: root }, rank, count: 1 });
                continue;
            }
            let count = match field {
                Field::Real => real_root_count(&f),
                Field::Complex => f.deg(),
            };
            if count == 0 {
                continue;
            }
            let h = Arc::new(f);
            let rank = rank_combination(&h, &p.a, &PolyQ::one(), &p.b, &PolyQ::x());
            out.push(Candidate { point: CandidatePoint::Factor((*h).clone()), rank, count });
        }
    }
    if !zero_is_root {
        out.push(Candidate { point: CandidatePoint::Rational { t: rat(1), u: rat(0) }, rank: p.a.rank(), count: 1 });
    }
    (nr, out, probabilistic)
}

/// Full oracle report; `seed` only matters when minors are sampled.
pub fn minimal_ranks_oracle_report(p: &Pencil, field: Field, seed: u64) -> OracleReport {
    let (nr, cands, probabilistic) = candidate_points(p, field, seed);
    if nr == 0 {
        return OracleReport { ranks: MinimalRanks { r: 0, s: 0 }, minimizer_count: 0, probabilistic, points: vec![] };
    }
    let points: Vec<(usize, usize)> = cands.iter().map(|c| (c.rank, c.count)).collect();
    let s = points.iter().map(|x| x.0).min().unwrap().min(nr);
    let minimizer_count: usize = points.iter().filter(|x| x.0 == s).map(|x| x.1).sum();
    let r = if s == nr || minimizer_count >= 2 {
        s
    } else {
        points.iter().filter(|x| x.0 != s).map(|x| x.0).min().unwrap_or(nr).min(nr)
    };
    OracleReport { ranks: MinimalRanks { r, s }, minimizer_count, probabilistic, points }
}

/// Minimal ranks from exact ranks at all candidate drop points.
pub fn minimal_ranks_oracle(p: &Pencil, field: Field) -> MinimalRanks {
    minimal_ranks_oracle_report(p, field, 0x5eed).ranks
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::minrank::minimal_ranks;

    #[test]
    fn two_noncollinear_minimizers() {
        let mut b = MatrixQ::zeros(4, 4);
        for i in 0..4 {
            b[(i, i)] = if i < 2 { rat(3) } else { rat(-1) };
        }
        let p = Pencil::new(MatrixQ::identity(4), b).unwrap();
        let rep = minimal_ranks_oracle_report(&p, Field::Real, 0);
        assert_eq!(rep.ranks, MinimalRanks { r: 2, s: 2 });
        assert_eq!(rep.minimizer_count, 2);
        assert!(!rep.probabilistic);
    }

    #[test]
    fn irrational_eigenvalues() {
        // companion of λ² − 2 doubled: eigenvalues ±√2, two blocks each
        let c = MatrixQ::from_ints(2, 2, &[0, 2, 1, 0]);
        let p = Pencil::regular(c.direct_sum(&c));
        assert_eq!(minimal_ranks_oracle(&p, Field::Real), MinimalRanks { r: 2, s: 2 });
        assert_eq!(minimal_ranks(&p, Field::Real), MinimalRanks { r: 2, s: 2 });
        // ±√2 are two points with one block each: (4 − 1, 4 − 1)
        let p = Pencil::regular(c.direct_sum(&MatrixQ::from_ints(2, 2, &[0, 1, -1, 0])));
        assert_eq!(minimal_ranks_oracle(&p, Field::Real), MinimalRanks { r: 3, s: 3 });
        assert_eq!(minimal_ranks(&p, Field::Real), MinimalRanks { r: 3, s: 3 });
    }

    #[test]
    fn large_pencil_uses_sampled_minors() {
        let p = Pencil::jordan(3, &rat(1)).direct_sum(&Pencil::l_block(1)).direct_sum(&Pencil::r_block(1));
        let rep = minimal_ranks_oracle_report(&p, Field::Real, 7);
        assert!(rep.probabilistic);
        assert_eq!(rep.ranks, minimal_ranks(&p, Field::Real));
    }
}
