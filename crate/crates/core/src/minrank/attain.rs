//! A 2×2 change of basis on (A, B) after which rank A″ = r and rank B″ = s.
//!
//! B″ is the pencil evaluated at the point carrying the most blocks (an
//! eigenvalue or ∞), A″ at the point carrying the second most, or at a generic
//! point when there is none. Ranks are verified exactly before returning.

use std::fmt;
use std::sync::Arc;

use num_traits::Zero;

use crate::error::{Error, Result};
use crate::exact::algebraic::{complex_root_decimal, real_root_decimal, upper_roots_f64};
use crate::exact::numberfield::rank_combination;
use crate::exact::rational::{fmt_rational, rat, to_decimal, Rational};
use crate::exact::PolyQ;
use crate::kcf::{kronecker_structure, Eigenvalue, Field};
use crate::pencil::{Gl2Transform, Pencil};

use super::{minimal_ranks_from_structure, MinimalRanks, RegularCounts};

/// A projective point (t, u), evaluated as tA + uB.
#[derive(Clone, Debug, PartialEq)]
pub enum ProjectivePoint {
    Rational { t: Rational, u: Rational },
    /// (1, λ₀) for an irrational eigenvalue λ₀.
    Algebraic(Eigenvalue),
}

impl ProjectivePoint {
    fn infinity() -> Self {
        ProjectivePoint::Rational { t: rat(0), u: rat(1) }
    }

    fn finite(e: &Eigenvalue) -> Self {
        match e {
            Eigenvalue::Rational(x) => ProjectivePoint::Rational { t: rat(1), u: x.clone() },
            other => ProjectivePoint::Algebraic(other.clone()),
        }
    }

    /// Exact rank of tA + uB.
    pub fn rank(&self, p: &Pencil) -> usize {
        match self {
            ProjectivePoint::Rational { t, u } => p.at(t, u).rank(),
            ProjectivePoint::Algebraic(e) => {
                let h = Arc::new(e.min_poly());
                rank_combination(&h, &p.a, &PolyQ::one(), &p.b, &PolyQ::x())
            }
        }
    }

    /// (t, u) rendered with `digits` decimals for irrational entries.
    pub fn decimal(&self, digits: usize) -> [String; 2] {
        match self {
            ProjectivePoint::Rational { t, u } => [fmt_rational(t), fmt_rational(u)],
            ProjectivePoint::Algebraic(e) => {
                let u = match e {
                    Eigenvalue::RealAlgebraic { min_poly, lo, hi, .. } => real_root_decimal(min_poly, lo, hi, digits),
                    Eigenvalue::Complex { min_poly, pair_index, upper } => {
                        let z = upper_roots_f64(min_poly)[*pair_index];
                        complex_root_decimal(min_poly, if *upper { z } else { z.conj() }, digits)
                    }
                    Eigenvalue::ComplexPair { min_poly, pair_index } => {
                        complex_root_decimal(min_poly, upper_roots_f64(min_poly)[*pair_index], digits)
                    }
                    Eigenvalue::Rational(x) => to_decimal(x, digits),
                };
                ["1".to_string(), u]
            }
        }
    }
}

/// Rows of T are the points at which A″ and B″ are evaluated.
#[derive(Clone, Debug, PartialEq)]
pub enum AttainingTransform {
    Rational(Gl2Transform),
    /// At least one row sits on an irrational eigenvalue. `rows[0]` gives A″,
    /// `rows[1]` gives B″; `decimal` renders T to 50 digits.
    Algebraic { rows: [ProjectivePoint; 2], decimal: [[String; 2]; 2] },
}

impl AttainingTransform {
    pub fn as_rational(&self) -> Option<&Gl2Transform> {
        match self {
            AttainingTransform::Rational(t) => Some(t),
            AttainingTransform::Algebraic { .. } => None,
        }
    }

    /// T as decimal strings, row-major.
    pub fn decimal(&self) -> [[String; 2]; 2] {
        match self {
            AttainingTransform::Rational(t) => [
                [fmt_rational(&t.t11), fmt_rational(&t.t12)],
                [fmt_rational(&t.t21), fmt_rational(&t.t22)],
            ],
            AttainingTransform::Algebraic { decimal, .. } => decimal.clone(),
        }
    }
}

impl fmt::Display for AttainingTransform {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let d = self.decimal();
        write!(f, "[[{}, {}], [{}, {}]]", d[0][0], d[0][1], d[1][0], d[1][1])
    }
}

const DIGITS: usize = 50;

fn same_point(x: &ProjectivePoint, y: &ProjectivePoint) -> bool {
    match (x, y) {
        (ProjectivePoint::Rational { t: t1, u: u1 }, ProjectivePoint::Rational { t: t2, u: u2 }) => {
            (t1 * u2 - t2 * u1).is_zero()
        }
        (ProjectivePoint::Algebraic(a), ProjectivePoint::Algebraic(b)) => a == b,
        _ => false,
    }
}

/// Generic rational points: rank equals the normal rank.
fn generic_points(p: &Pencil, nr: usize) -> impl Iterator<Item = ProjectivePoint> + '_ {
    let candidates = std::iter::once((rat(0), rat(1)))
        .chain((0i64..).flat_map(|k| [(rat(1), rat(k)), (rat(1), rat(-k - 1))]));
    candidates
        .filter(move |(t, u)| p.at(t, u).rank() == nr)
        .map(|(t, u)| ProjectivePoint::Rational { t, u })
}

/// A transform attaining ρ, and ρ itself.
pub fn attain_transform(p: &Pencil, field: Field) -> Result<(AttainingTransform, MinimalRanks)> {
    let ks = kronecker_structure(p, field);
    let rho = minimal_ranks_from_structure(&ks);
    let counts = RegularCounts::from_structure(&ks);

    // candidate sources, most blocks first; exact points preferred on ties
    let mut sources: Vec<(usize, u8, ProjectivePoint)> = vec![];
    if counts.j > 0 {
        sources.push((counts.j, 0, ProjectivePoint::infinity()));
    }
    for (e, c) in &counts.per_eigenvalue {
        let pref = if matches!(e, Eigenvalue::Rational(_)) { 0 } else { 1 };
        sources.push((*c, pref, ProjectivePoint::finite(e)));
    }
    sources.sort_by(|a, b| b.0.cmp(&a.0).then(a.1.cmp(&b.1)));
    let mut chosen: Vec<ProjectivePoint> = sources.into_iter().take(2).map(|x| x.2).collect();
    let mut generic = generic_points(p, ks.normal_rank);
    while chosen.len() < 2 {
        let g = generic.next().expect("generic points exist");
        if !chosen.iter().any(|c| same_point(c, &g)) {
            chosen.push(g);
        }
    }
    let p1 = chosen.remove(0);
    let p2 = chosen.remove(0);

    let (ra, rb) = (p2.rank(p), p1.rank(p));
    if (ra, rb) != (rho.r, rho.s) {
        return Err(Error::Internal(format!("transform reaches ranks ({ra}, {rb}) instead of {rho}")));
    }
    let t = match (&p2, &p1) {
        (ProjectivePoint::Rational { t: a, u: b }, ProjectivePoint::Rational { t: c, u: d }) => {
            AttainingTransform::Rational(Gl2Transform::new(a.clone(), b.clone(), c.clone(), d.clone())?)
        }
        _ => {
            let decimal = [p2.decimal(DIGITS), p1.decimal(DIGITS)];
            AttainingTransform::Algebraic { rows: [p2, p1], decimal }
        }
    };
    Ok((t, rho))
}

/// Columns (w, z) of T⁻¹, so that A ⊗ e₁ + B ⊗ e₂ = A″ ⊗ w + B″ ⊗ z.
pub fn inverse_columns(t: &Gl2Transform) -> ([Rational; 2], [Rational; 2]) {
    let inv = t.inverse();
    ([inv.t11.clone(), inv.t21.clone()], [inv.t12.clone(), inv.t22.clone()])
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::MatrixQ;

    #[test]
    fn jordan_block_swaps() {
        let p = Pencil::jordan(2, &rat(0));
        let (t, rho) = attain_transform(&p, Field::Real).unwrap();
        assert_eq!(rho, MinimalRanks { r: 2, s: 1 });
        let t = t.as_rational().unwrap().clone();
        let q = p.apply_gl2(&t);
        assert_eq!((q.a.rank(), q.b.rank()), (2, 1));
    }

    #[test]
    fn singular_block_needs_nothing_special() {
        let (t, rho) = attain_transform(&Pencil::l_block(2), Field::Real).unwrap();
        assert_eq!(rho, MinimalRanks { r: 2, s: 2 });
        assert!(t.as_rational().is_some());
    }

    #[test]
    fn irrational_minimizer() {
        let c = MatrixQ::from_ints(2, 2, &[0, 2, 1, 0]);
        let p = Pencil::regular(c.direct_sum(&c));
        let (t, rho) = attain_transform(&p, Field::Real).unwrap();
        assert_eq!(rho, MinimalRanks { r: 2, s: 2 });
        match t {
            AttainingTransform::Algebraic { decimal, .. } => assert!(decimal[1][1].contains("1.414213562373095048801688724209698078569671875376")),
            _ => panic!("expected algebraic transform"),
        }
    }
}
