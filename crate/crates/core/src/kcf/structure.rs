//! Kronecker structure: minimal indices and elementary divisors.

use std::cmp::Ordering;
use std::fmt;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::exact::algebraic::{real_root_decimal, upper_roots_f64};
use crate::exact::rational::{fmt_rational, to_f64, Rational};
use crate::exact::sturm::isolate_real_roots;
use crate::exact::PolyQ;

/// Scalar field over which divisors are split.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize, Default)]
#[serde(rename_all = "lowercase")]
pub enum Field {
    #[default]
    Real,
    Complex,
}

impl std::str::FromStr for Field {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "real" | "R" | "r" => Ok(Field::Real),
            "complex" | "C" | "c" => Ok(Field::Complex),
            _ => Err(format!("unknown field `{s}` (expected real or complex)")),
        }
    }
}

/// Exact description of a finite eigenvalue λ₀ (the divisor is a power of λ − λ₀,
/// or of an irreducible polynomial over the chosen field).
#[derive(Clone, Debug)]
pub enum Eigenvalue {
    Rational(Rational),
    /// The `index`-th real root (increasing order) of `min_poly`, isolated in (lo, hi].
    RealAlgebraic { min_poly: PolyQ, lo: Rational, hi: Rational, index: usize },
    /// The `pair_index`-th conjugate pair of nonreal roots of `min_poly` (over ℝ).
    ComplexPair { min_poly: PolyQ, pair_index: usize },
    /// One root of a conjugate pair (over ℂ); `upper` selects the positive imaginary part.
    Complex { min_poly: PolyQ, pair_index: usize, upper: bool },
}

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord)]
enum Key {
    Rational(Rational),
    Real(usize, Vec<Rational>, usize),
    Pair(usize, Vec<Rational>, usize),
    Complex(usize, Vec<Rational>, usize, bool),
}

fn poly_key(p: &PolyQ) -> (usize, Vec<Rational>) {
    (p.deg(), p.coeffs().to_vec())
}

impl Eigenvalue {
    fn key(&self) -> Key {
        match self {
            Eigenvalue::Rational(r) => Key::Rational(r.clone()),
            Eigenvalue::RealAlgebraic { min_poly, index, .. } => {
                let (d, c) = poly_key(min_poly);
                Key::Real(d, c, *index)
            }
            Eigenvalue::ComplexPair { min_poly, pair_index } => {
                let (d, c) = poly_key(min_poly);
                Key::Pair(d, c, *pair_index)
            }
            Eigenvalue::Complex { min_poly, pair_index, upper } => {
                let (d, c) = poly_key(min_poly);
                Key::Complex(d, c, *pair_index, *upper)
            }
        }
    }

    pub fn is_real(&self) -> bool {
        matches!(self, Eigenvalue::Rational(_) | Eigenvalue::RealAlgebraic { .. })
    }

    /// Irreducible polynomial over ℚ vanishing at the eigenvalue.
    pub fn min_poly(&self) -> PolyQ {
        match self {
            Eigenvalue::Rational(r) => PolyQ::linear_root(r),
            Eigenvalue::RealAlgebraic { min_poly, .. }
            | Eigenvalue::ComplexPair { min_poly, .. }
            | Eigenvalue::Complex { min_poly, .. } => min_poly.clone(),
        }
    }

    /// Numerical value (upper member for a conjugate pair).
    pub fn approx(&self) -> Complex64 {
        match self {
            Eigenvalue::Rational(r) => Complex64::new(to_f64(r), 0.0),
            Eigenvalue::RealAlgebraic { min_poly, lo, hi, .. } => {
                let s = real_root_decimal(min_poly, lo, hi, 17);
                Complex64::new(s.parse().unwrap(), 0.0)
            }
            Eigenvalue::ComplexPair { min_poly, pair_index } => upper_roots_f64(min_poly)[*pair_index],
            Eigenvalue::Complex { min_poly, pair_index, upper } => {
                let z = upper_roots_f64(min_poly)[*pair_index];
                if *upper {
                    z
                } else {
                    z.conj()
                }
            }
        }
    }

    /// Degree this eigenvalue contributes per unit of divisor power.
    pub fn weight(&self) -> usize {
        match self {
            Eigenvalue::ComplexPair { .. } => 2,
            _ => 1,
        }
    }

    /// All eigenvalue descriptors attached to the roots of an irreducible factor.
    pub fn roots_of(f: &PolyQ, field: Field) -> Vec<Eigenvalue> {
        if f.deg() == 1 {
            return vec![Eigenvalue::Rational(-f.coeff(0) / f.coeff(1))];
        }
        let mut out: Vec<Eigenvalue> = isolate_real_roots(f)
            .into_iter()
            .enumerate()
            .map(|(index, (lo, hi))| Eigenvalue::RealAlgebraic { min_poly: f.clone(), lo, hi, index })
            .collect();
        let pairs = (f.deg() - out.len()) / 2;
        for pair_index in 0..pairs {
            match field {
                Field::Real => out.push(Eigenvalue::ComplexPair { min_poly: f.clone(), pair_index }),
                Field::Complex => {
                    for upper in [true, false] {
                        out.push(Eigenvalue::Complex { min_poly: f.clone(), pair_index, upper })
                    }
                }
            }
        }
        out
    }
}

impl PartialEq for Eigenvalue {
    fn eq(&self, o: &Self) -> bool {
        self.key() == o.key()
    }
}

impl Eq for Eigenvalue {}

impl PartialOrd for Eigenvalue {
    fn partial_cmp(&self, o: &Self) -> Option<Ordering> {
        Some(self.cmp(o))
    }
}

impl Ord for Eigenvalue {
    fn cmp(&self, o: &Self) -> Ordering {
        self.key().cmp(&o.key())
    }
}

impl std::hash::Hash for Eigenvalue {
    fn hash<H: std::hash::Hasher>(&self, state: &mut H) {
        format!("{:?}", self.key()).hash(state)
    }
}

impl fmt::Display for Eigenvalue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Eigenvalue::Rational(r) => write!(f, "{}", fmt_rational(r)),
            Eigenvalue::RealAlgebraic { min_poly, index, .. } => {
                let z = self.approx();
                write!(f, "root #{index} of {} (≈ {:.12})", min_poly.to_string_var("λ"), z.re)
            }
            Eigenvalue::ComplexPair { min_poly, .. } => {
                let z = self.approx();
                write!(f, "pair of {} (≈ {:.12} ± {:.12}i)", min_poly.to_string_var("λ"), z.re, z.im)
            }
            Eigenvalue::Complex { min_poly, .. } => {
                let z = self.approx();
                write!(f, "root of {} (≈ {:.12} {:+.12}i)", min_poly.to_string_var("λ"), z.re, z.im)
            }
        }
    }
}

/// Numerical eigenvalue produced by the floating-point extractor.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub enum FloatEigenvalue {
    Real(f64),
    /// Upper member of a conjugate pair (over ℝ).
    ComplexPair(Complex64Ser),
    /// A single nonreal eigenvalue (over ℂ).
    Complex(Complex64Ser),
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct Complex64Ser {
    pub re: f64,
    pub im: f64,
}

impl From<Complex64> for Complex64Ser {
    fn from(z: Complex64) -> Self {
        Complex64Ser { re: z.re, im: z.im }
    }
}

impl FloatEigenvalue {
    pub fn value(&self) -> Complex64 {
        match self {
            FloatEigenvalue::Real(x) => Complex64::new(*x, 0.0),
            FloatEigenvalue::ComplexPair(z) | FloatEigenvalue::Complex(z) => Complex64::new(z.re, z.im),
        }
    }
}

impl fmt::Display for FloatEigenvalue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            FloatEigenvalue::Real(x) => write!(f, "≈ {x:.12}"),
            FloatEigenvalue::ComplexPair(z) => write!(f, "pair ≈ {:.12} ± {:.12}i", z.re, z.im.abs()),
            FloatEigenvalue::Complex(z) => write!(f, "≈ {:.12} {:+.12}i", z.re, z.im),
        }
    }
}

/// Anything that can label a finite elementary divisor.
pub trait DivisorLabel {
    /// Degree contributed per unit of power (2 for a real-irreducible quadratic).
    fn weight(&self) -> usize;
}

impl DivisorLabel for Eigenvalue {
    fn weight(&self) -> usize {
        Eigenvalue::weight(self)
    }
}

impl DivisorLabel for FloatEigenvalue {
    fn weight(&self) -> usize {
        match self {
            FloatEigenvalue::ComplexPair(_) => 2,
            _ => 1,
        }
    }
}

/// Minimal indices (zeros retained) and elementary divisors of a pencil.
#[derive(Clone, Debug, PartialEq)]
pub struct KroneckerStructure<E = Eigenvalue> {
    pub field: Field,
    pub normal_rank: usize,
    /// Sorted ascending.
    pub min_col_indices: Vec<usize>,
    /// Sorted ascending.
    pub min_row_indices: Vec<usize>,
    /// (eigenvalue, power), one entry per elementary divisor.
    pub finite_divisors: Vec<(E, usize)>,
    /// Sorted ascending.
    pub infinite_divisor_degrees: Vec<usize>,
}

impl<E: DivisorLabel> KroneckerStructure<E> {
    /// Size of the regular part.
    pub fn q_reg(&self) -> usize {
        self.finite_divisors.iter().map(|(e, p)| e.weight() * p).sum::<usize>()
            + self.infinite_divisor_degrees.iter().sum::<usize>()
    }

    pub fn singular_sum(&self) -> usize {
        self.min_col_indices.iter().sum::<usize>() + self.min_row_indices.iter().sum::<usize>()
    }

    pub fn has_singular_part(&self) -> bool {
        !self.min_col_indices.is_empty() || !self.min_row_indices.is_empty()
    }

    /// Column, row and rank budgets of the canonical form; returns a description of the first failure.
    pub fn check_budget(&self, m: usize, n: usize) -> Result<(), String> {
        let q = self.q_reg();
        let p = self.min_col_indices.len();
        let qq = self.min_row_indices.len();
        let sk: usize = self.min_col_indices.iter().sum();
        let sl: usize = self.min_row_indices.iter().sum();
        if sk + p + sl + q != n {
            return Err(format!("column budget {} != n = {n}", sk + p + sl + q));
        }
        if sk + sl + qq + q != m {
            return Err(format!("row budget {} != m = {m}", sk + sl + qq + q));
        }
        if sk + sl + q != self.normal_rank {
            return Err(format!("rank budget {} != normal rank {}", sk + sl + q, self.normal_rank));
        }
        Ok(())
    }
}

impl KroneckerStructure<Eigenvalue> {
    /// Distinct finite eigenvalues with their block sizes (descending).
    pub fn segre(&self) -> Vec<(Eigenvalue, Vec<usize>)> {
        let mut out: Vec<(Eigenvalue, Vec<usize>)> = vec![];
        for (e, p) in &self.finite_divisors {
            match out.iter_mut().find(|(x, _)| x == e) {
                Some((_, v)) => v.push(*p),
                None => out.push((e.clone(), vec![*p])),
            }
        }
        for (_, v) in out.iter_mut() {
            v.sort_unstable_by(|a, b| b.cmp(a));
        }
        out
    }
}

impl<E: fmt::Display> fmt::Display for KroneckerStructure<E> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "normal rank: {}", self.normal_rank)?;
        writeln!(f, "minimal column indices: {:?}", self.min_col_indices)?;
        writeln!(f, "minimal row indices: {:?}", self.min_row_indices)?;
        if self.finite_divisors.is_empty() {
            writeln!(f, "finite elementary divisors: none")?;
        } else {
            writeln!(f, "finite elementary divisors:")?;
            for (e, p) in &self.finite_divisors {
                writeln!(f, "  {e}  power {p}")?;
            }
        }
        write!(f, "infinite elementary divisor degrees: {:?}", self.infinite_divisor_degrees)
    }
}
