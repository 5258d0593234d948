//! Minimal ranks of matrix polynomials P(λ) = Σ λ^{k−1} A_k through
//! rank-minimizing subspaces of the coefficient space 𝔽^d.
//!
//! T₁ is spanned by every t minimizing rank Σ t_k A_k; T_p by the minimizers
//! outside T₁ ⊕ … ⊕ T_{p−1}. The tuple repeats each rank value dim T_p times.
//!
//! d = 2 is exact. For d ≥ 3 the rank-drop locus is explored on random
//! projective lines (each an exact pencil problem), drop points are grouped into
//! linear components verified by exact rank evaluation, and components are
//! searched recursively. The result carries a `certified` flag.

use std::fmt;

use nalgebra::DMatrix;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::exact::rational::{fmt_rational, rat, random_rational, to_f64, Rational};
use crate::exact::MatrixQ;
use crate::kcf::{Eigenvalue, Field};
use crate::minrank::{attain_transform, candidate_points, AttainingTransform, CandidatePoint, ProjectivePoint};
use crate::pencil::{random_unimodular, Pencil};

/// Coefficients A₁, …, A_d of a matrix polynomial, all m×n.
#[derive(Clone, Debug, PartialEq)]
pub struct MatrixPolynomial {
    coeffs: Vec<MatrixQ>,
}

impl MatrixPolynomial {
    pub fn new(coeffs: Vec<MatrixQ>) -> Result<Self> {
        let first = coeffs.first().ok_or_else(|| Error::Dimension("no coefficients".into()))?;
        let (m, n) = (first.rows(), first.cols());
        if coeffs.iter().any(|c| c.rows() != m || c.cols() != n) {
            return Err(Error::Dimension("coefficients differ in shape".into()));
        }
        Ok(MatrixPolynomial { coeffs })
    }

    pub fn from_pencil(p: &Pencil) -> Self {
        MatrixPolynomial { coeffs: vec![p.a.clone(), p.b.clone()] }
    }

    pub fn coeffs(&self) -> &[MatrixQ] {
        &self.coeffs
    }

    pub fn m(&self) -> usize {
        self.coeffs[0].rows()
    }

    pub fn n(&self) -> usize {
        self.coeffs[0].cols()
    }

    pub fn d(&self) -> usize {
        self.coeffs.len()
    }

    /// Σ t_k A_k.
    pub fn combination(&self, t: &[Rational]) -> MatrixQ {
        combine(&self.coeffs, t)
    }

    /// (P, Q, T)·P: A′_k = Σ_j T_kj · P A_j Q.
    pub fn transform(&self, p: &MatrixQ, q: &MatrixQ, t: &MatrixQ) -> Result<Self> {
        let d = self.d();
        if t.rows() != d || t.cols() != d || p.cols() != self.m() || q.rows() != self.n() {
            return Err(Error::Dimension("transform does not fit".into()));
        }
        let moved: Vec<MatrixQ> = self.coeffs.iter().map(|a| &(p * a) * q).collect();
        let coeffs = (0..d).map(|k| combine(&moved, t.row(k))).collect();
        MatrixPolynomial::new(coeffs)
    }
}

fn combine(mats: &[MatrixQ], t: &[Rational]) -> MatrixQ {
    let mut out = MatrixQ::zeros(mats[0].rows(), mats[0].cols());
    for (a, c) in mats.iter().zip(t) {
        if !num_traits::Zero::is_zero(c) {
            out = out.combine(&rat(1), a, c);
        }
    }
    out
}

/// A vector of 𝔽^d: rational, or base + λ₀·dir for an irrational real λ₀.
#[derive(Clone, Debug, PartialEq)]
pub enum BasisVector {
    Rational(Vec<Rational>),
    Algebraic { base: Vec<Rational>, dir: Vec<Rational>, root: Eigenvalue },
}

impl BasisVector {
    pub fn approx(&self) -> Vec<f64> {
        match self {
            BasisVector::Rational(v) => v.iter().map(to_f64).collect(),
            BasisVector::Algebraic { base, dir, root } => {
                let l = root.approx().re;
                base.iter().zip(dir).map(|(b, d)| to_f64(b) + l * to_f64(d)).collect()
            }
        }
    }

    fn from_point(pt: &ProjectivePoint) -> Self {
        match pt {
            ProjectivePoint::Rational { t, u } => BasisVector::Rational(vec![t.clone(), u.clone()]),
            ProjectivePoint::Algebraic(e) => {
                BasisVector::Algebraic { base: vec![rat(1), rat(0)], dir: vec![rat(0), rat(1)], root: e.clone() }
            }
        }
    }
}

impl fmt::Display for BasisVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            BasisVector::Rational(v) => {
                let s: Vec<String> = v.iter().map(fmt_rational).collect();
                write!(f, "({})", s.join(", "))
            }
            BasisVector::Algebraic { .. } => {
                let s: Vec<String> = self.approx().iter().map(|x| format!("{x:.12}")).collect();
                write!(f, "≈({})", s.join(", "))
            }
        }
    }
}

/// One T_p with its rank value r̄_p.
#[derive(Clone, Debug, PartialEq)]
pub struct RankSubspace {
    pub basis: Vec<BasisVector>,
    pub rank: usize,
}

#[derive(Clone, Debug, PartialEq)]
pub struct RankMinimizingDecomposition {
    /// T₁, T₂, … with strictly increasing rank values.
    pub subspaces: Vec<RankSubspace>,
    /// r₁ ≥ … ≥ r_d.
    pub tuple: Vec<usize>,
    pub certified: bool,
}

impl RankMinimizingDecomposition {
    fn assemble(subspaces: Vec<RankSubspace>, certified: bool) -> Self {
        let mut tuple: Vec<usize> = subspaces.iter().flat_map(|s| std::iter::repeat(s.rank).take(s.basis.len())).collect();
        tuple.sort_unstable_by(|a, b| b.cmp(a));
        RankMinimizingDecomposition { subspaces, tuple, certified }
    }
}

/// Exact decomposition for d = 2 from the attaining transform: B″ sits on a
/// minimizer, A″ on the point realizing r.
pub fn poly_minimal_ranks_d2(p: &MatrixPolynomial) -> Result<RankMinimizingDecomposition> {
    if p.d() != 2 {
        return Err(Error::Dimension(format!("expected d = 2, got {}", p.d())));
    }
    let pencil = Pencil::new(p.coeffs[0].clone(), p.coeffs[1].clone())?;
    let (t, rho) = attain_transform(&pencil, Field::Real)?;
    let (p2, p1) = match &t {
        AttainingTransform::Rational(g) => (
            ProjectivePoint::Rational { t: g.t11.clone(), u: g.t12.clone() },
            ProjectivePoint::Rational { t: g.t21.clone(), u: g.t22.clone() },
        ),
        AttainingTransform::Algebraic { rows, .. } => (rows[0].clone(), rows[1].clone()),
    };
    let (v1, v2) = (BasisVector::from_point(&p1), BasisVector::from_point(&p2));
    let subspaces = if rho.r == rho.s {
        vec![RankSubspace { basis: vec![v1, v2], rank: rho.s }]
    } else {
        vec![RankSubspace { basis: vec![v1], rank: rho.s }, RankSubspace { basis: vec![v2], rank: rho.r }]
    };
    Ok(RankMinimizingDecomposition::assemble(subspaces, true))
}

/// Solutions of one rank value together with their span.
#[derive(Clone, Debug)]
struct Piece {
    span: Vec<BasisVector>,
    rank: usize,
}

struct Search<'a> {
    p: &'a MatrixPolynomial,
    samples: usize,
    rng: ChaCha8Rng,
}

const HEIGHT: i64 = 1000;
const VERIFY: usize = 3;

fn lift(local: &[Rational], basis: &[Vec<Rational>]) -> Vec<Rational> {
    let d = basis[0].len();
    let mut out = vec![rat(0); d];
    for (c, b) in local.iter().zip(basis) {
        for (o, x) in out.iter_mut().zip(b) {
            *o += c * x;
        }
    }
    out
}

impl Search<'_> {
    fn random_vec(&mut self, k: usize) -> Vec<Rational> {
        loop {
            let v: Vec<Rational> = (0..k).map(|_| random_rational(&mut self.rng, HEIGHT, HEIGHT)).collect();
            if v.iter().any(|x| !num_traits::Zero::is_zero(x)) {
                return v;
            }
        }
    }

    /// Pieces inside span(basis), and whether the search there is complete.
    fn stratify(&mut self, basis: &[Vec<Rational>]) -> (Vec<Piece>, bool) {
        let k = basis.len();
        let c: Vec<MatrixQ> = basis.iter().map(|b| self.p.combination(b)).collect();
        let rational = |v: Vec<Rational>| BasisVector::Rational(v);
        match k {
            1 => (vec![Piece { span: vec![rational(basis[0].clone())], rank: c[0].rank() }], true),
            2 => {
                let pencil = Pencil { a: c[0].clone(), b: c[1].clone() };
                (self.line_pieces(&pencil, basis, usize::MAX), true)
            }
            _ => self.stratify_slices(basis, &c),
        }
    }

    /// Pieces of the projective line spanned by `basis` (two vectors): the line
    /// itself at its normal rank and every point of rank below `cap`.
    fn line_pieces(&mut self, pencil: &Pencil, basis: &[Vec<Rational>], cap: usize) -> Vec<Piece> {
        let seed = self.rng.gen();
        let (nr, cands, _) = candidate_points(pencil, Field::Real, seed);
        let span = vec![BasisVector::Rational(basis[0].clone()), BasisVector::Rational(basis[1].clone())];
        let mut out = vec![Piece { span: span.clone(), rank: nr }];
        for cand in cands {
            if cand.rank >= nr.min(cap) {
                continue;
            }
            match cand.point {
                CandidatePoint::Rational { t, u } => {
                    out.push(Piece { span: vec![BasisVector::Rational(lift(&[t, u], basis))], rank: cand.rank })
                }
                CandidatePoint::Factor(_) if cand.count >= 2 => out.push(Piece { span: span.clone(), rank: cand.rank }),
                CandidatePoint::Factor(f) => {
                    let root = Eigenvalue::roots_of(&f, Field::Real).into_iter().find(|e| e.is_real()).expect("one real root");
                    let v = BasisVector::Algebraic { base: basis[0].clone(), dir: basis[1].clone(), root };
                    out.push(Piece { span: vec![v], rank: cand.rank })
                }
            }
        }
        out
    }

    fn stratify_slices(&mut self, basis: &[Vec<Rational>], c: &[MatrixQ]) -> (Vec<Piece>, bool) {
        let k = basis.len();
        let mut g = c.iter().map(|m| m.rank()).max().unwrap_or(0);
        for _ in 0..self.samples {
            let t = self.random_vec(k);
            g = g.max(combine(c, &t).rank());
        }
        let mut pieces = vec![Piece { span: basis.iter().cloned().map(BasisVector::Rational).collect(), rank: g }];
        let mut certified = self.p.m() == self.p.n() && g == self.p.m();

        // drop points on random lines, in local coordinates
        let mut drops: Vec<Vec<Rational>> = vec![];
        let lines = self.samples.max(2 * k + 2);
        for _ in 0..lines {
            let (u, v) = (self.random_vec(k), self.random_vec(k));
            let pencil = Pencil { a: combine(c, &u), b: combine(c, &v) };
            let local = [u.clone(), v.clone()];
            let global = [lift(&u, basis), lift(&v, basis)];
            for piece in self.line_pieces(&pencil, &global, g).into_iter().skip(1) {
                match &piece.span[..] {
                    [BasisVector::Rational(x)] => {
                        // recover local coordinates from the line parametrization
                        let coords = line_coords(x, &global);
                        drops.push(lift(&coords, &local));
                    }
                    _ => {
                        certified = false;
                        pieces.push(piece);
                    }
                }
            }
        }

        // greedy grouping into verified linear components
        let mut used = vec![false; drops.len()];
        for i in 0..drops.len() {
            if used[i] {
                continue;
            }
            used[i] = true;
            let mut span = vec![drops[i].clone()];
            for j in i + 1..drops.len() {
                if used[j] {
                    continue;
                }
                let mut cand = span.clone();
                cand.push(drops[j].clone());
                if MatrixQ::from_rows(&cand).rank() == span.len() {
                    used[j] = true;
                } else if self.verify_below(c, &cand, g) {
                    span = cand;
                    used[j] = true;
                }
            }
            if span.len() + 1 != k {
                certified = false;
            }
            let global: Vec<Vec<Rational>> = span.iter().map(|s| lift(s, basis)).collect();
            let (sub, ok) = self.stratify(&global);
            certified &= ok;
            pieces.extend(sub);
        }
        (pieces, certified)
    }

    /// Random combinations of `span` all have rank below `g`.
    fn verify_below(&mut self, c: &[MatrixQ], span: &[Vec<Rational>], g: usize) -> bool {
        (0..VERIFY).all(|_| {
            let w = self.random_vec(span.len());
            combine(c, &lift(&w, span)).rank() < g
        })
    }
}

/// (t, u) with x = t·g₀ + u·g₁, for x known to lie on the line.
fn line_coords(x: &[Rational], g: &[Vec<Rational>; 2]) -> Vec<Rational> {
    let m = MatrixQ::from_fn(x.len(), 3, |i, j| match j {
        0 => g[0][i].clone(),
        1 => g[1][i].clone(),
        _ => x[i].clone(),
    });
    let ns = m.nullspace();
    // ns is 1-dimensional: a·g₀ + b·g₁ + c·x = 0
    let c = ns[(2, 0)].clone();
    vec![-&ns[(0, 0)] / &c, -&ns[(1, 0)] / &c]
}

fn span_dim(vs: &[BasisVector]) -> usize {
    if vs.is_empty() {
        return 0;
    }
    let exact: Option<Vec<Vec<Rational>>> = vs
        .iter()
        .map(|v| match v {
            BasisVector::Rational(x) => Some(x.clone()),
            _ => None,
        })
        .collect();
    if let Some(rows) = exact {
        return MatrixQ::from_rows(&rows).rank();
    }
    let approx: Vec<Vec<f64>> = vs.iter().map(|v| v.approx()).collect();
    let d = approx[0].len();
    let m = DMatrix::from_fn(approx.len(), d, |i, j| approx[i][j]);
    let sv = m.singular_values();
    let top = sv.max().max(1.0);
    sv.iter().filter(|&&x| x > 1e-9 * top).count()
}

/// Builds T₁, T₂, … from pieces covering the coefficient space.
fn decompose(pieces: &[Piece], d: usize) -> Vec<RankSubspace> {
    let mut tbar: Vec<BasisVector> = vec![];
    let mut out = vec![];
    while tbar.len() < d {
        let outside = |pc: &&Piece, tbar: &[BasisVector]| {
            let mut all = tbar.to_vec();
            all.extend(pc.span.iter().cloned());
            span_dim(&all) > tbar.len()
        };
        let rmin = pieces.iter().filter(|pc| outside(pc, &tbar)).map(|pc| pc.rank).min().expect("whole space is a piece");
        let mut basis = vec![];
        for pc in pieces.iter().filter(|pc| pc.rank == rmin) {
            for v in &pc.span {
                let mut all = tbar.clone();
                all.extend(basis.iter().cloned());
                all.push(v.clone());
                if span_dim(&all) == tbar.len() + basis.len() + 1 {
                    basis.push(v.clone());
                }
            }
        }
        tbar.extend(basis.iter().cloned());
        out.push(RankSubspace { basis, rank: rmin });
    }
    out
}

/// Slice-based search for any d ≥ 2. `samples` random points estimate the
/// generic rank on each component and set the number of slicing lines.
pub fn poly_minimal_ranks_heuristic(p: &MatrixPolynomial, samples: usize, seed: u64) -> RankMinimizingDecomposition {
    let d = p.d();
    let basis: Vec<Vec<Rational>> =
        (0..d).map(|i| (0..d).map(|j| if i == j { rat(1) } else { rat(0) }).collect()).collect();
    let mut search = Search { p, samples: samples.max(1), rng: ChaCha8Rng::seed_from_u64(seed) };
    let (pieces, certified) = search.stratify(&basis);
    RankMinimizingDecomposition::assemble(decompose(&pieces, d), certified || d <= 2)
}

pub const DEFAULT_SAMPLES: usize = 16;
pub const DEFAULT_SEED: u64 = 0x7e57;

/// Exact for d ≤ 2, heuristic with default settings otherwise.
pub fn poly_minimal_ranks(p: &MatrixPolynomial) -> Result<RankMinimizingDecomposition> {
    match p.d() {
        1 => {
            let basis = vec![BasisVector::Rational(vec![rat(1)])];
            Ok(RankMinimizingDecomposition::assemble(vec![RankSubspace { basis, rank: p.coeffs[0].rank() }], true))
        }
        2 => poly_minimal_ranks_d2(p),
        _ => Ok(poly_minimal_ranks_heuristic(p, DEFAULT_SAMPLES, DEFAULT_SEED)),
    }
}

/// Answer of a B_{s₁,…,s_d} membership query.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Membership {
    pub member: bool,
    pub certified: bool,
}

/// P ∈ B_{s₁,…,s_d} iff s_k ≥ r_k for all k, both sorted descending.
pub fn poly_in_b(p: &MatrixPolynomial, s: &[usize]) -> Result<Membership> {
    if s.len() != p.d() {
        return Err(Error::InvalidRanks(format!("expected {} ranks, got {}", p.d(), s.len())));
    }
    let mut s = s.to_vec();
    s.sort_unstable_by(|a, b| b.cmp(a));
    let dec = poly_minimal_ranks(p)?;
    Ok(Membership { member: s.iter().zip(&dec.tuple).all(|(a, b)| a >= b), certified: dec.certified })
}

/// A random invertible d×d rational matrix with small integer entries.
pub fn random_invertible<R: Rng>(d: usize, rng: &mut R) -> MatrixQ {
    loop {
        let t = MatrixQ::from_fn(d, d, |_, _| rat(rng.gen_range(-3..=3)));
        if t.rank() == d {
            return t;
        }
    }
}

/// A d = 3 polynomial Σ M_j ⊗ y_j built from a flag of nilpotent pieces and an
/// identity, disguised by random (P, Q, T). Returns it with its tuple.
pub fn planted_instance<R: Rng>(rng: &mut R) -> (MatrixPolynomial, Vec<usize>) {
    let nz = |rng: &mut R| loop {
        let x = rat(rng.gen_range(-4..=4));
        if !num_traits::Zero::is_zero(&x) {
            return x;
        }
    };
    let (ms, tuple) = match rng.gen_range(0..3) {
        0 => {
            let mut m1 = MatrixQ::zeros(3, 3);
            m1[(0, 2)] = nz(rng);
            let mut m2 = MatrixQ::zeros(3, 3);
            m2[(0, 1)] = nz(rng);
            m2[(1, 2)] = nz(rng);
            m2[(0, 2)] = rat(rng.gen_range(-4..=4));
            (vec![m1, m2, MatrixQ::identity(3)], vec![3, 2, 1])
        }
        1 => {
            let mut m2 = MatrixQ::zeros(2, 2);
            m2[(0, 1)] = nz(rng);
            (vec![MatrixQ::zeros(2, 2), m2, MatrixQ::identity(2)], vec![2, 1, 0])
        }
        _ => {
            let mut m1 = MatrixQ::zeros(3, 3);
            m1[(0, 2)] = nz(rng);
            (vec![m1, MatrixQ::zeros(3, 3), MatrixQ::identity(3)], vec![3, 1, 0])
        }
    };
    let n = ms[0].rows();
    let base = MatrixPolynomial::new(ms).expect("shapes agree");
    let p = random_unimodular(n, rng);
    let q = random_unimodular(n, rng);
    let t = random_invertible(3, rng);
    (base.transform(&p, &q, &t).expect("square transforms"), tuple)
}
