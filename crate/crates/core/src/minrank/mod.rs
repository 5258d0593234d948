//! Minimal ranks ρ(A, B) = (r, s): the smallest pair of ranks reachable by
//! replacing (A, B) with an invertible 2×2 combination of the two matrices.
//!
//! Two independent routes are provided: [`minimal_ranks`] reads ρ off the
//! Kronecker structure, [`minimal_ranks_oracle`] evaluates exact ranks at every
//! projective point where the rank can drop.

mod attain;
mod oracle;

use std::fmt;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::kcf::{kronecker_structure, Eigenvalue, Field, FloatEigenvalue, KroneckerStructure};
use crate::pencil::Pencil;

pub use attain::{attain_transform, inverse_columns, AttainingTransform, ProjectivePoint};
pub use oracle::{candidate_points, minimal_ranks_oracle, minimal_ranks_oracle_report, Candidate, CandidatePoint, OracleReport};

/// The pair (r, s) with r ≥ s.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct MinimalRanks {
    pub r: usize,
    pub s: usize,
}

impl MinimalRanks {
    pub fn new(r: usize, s: usize) -> Result<Self> {
        if r < s {
            return Err(Error::InvalidRanks(format!("r = {r} < s = {s}")));
        }
        Ok(MinimalRanks { r, s })
    }

    /// Componentwise ≤.
    pub fn dominated_by(&self, r: usize, s: usize) -> bool {
        self.r <= r && self.s <= s
    }
}

impl fmt::Display for MinimalRanks {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {})", self.r, self.s)
    }
}

/// Block counts of the regular part that decide its minimal ranks.
#[derive(Clone, Debug, PartialEq)]
pub struct RegularCounts {
    /// Number of infinite elementary divisors.
    pub j: usize,
    /// Number of divisors at each eigenvalue lying in the field, descending by count.
    pub per_eigenvalue: Vec<(Eigenvalue, usize)>,
    pub k_s: usize,
    pub k_r: usize,
}

impl RegularCounts {
    pub fn from_structure(ks: &KroneckerStructure) -> Self {
        let mut per: Vec<(Eigenvalue, usize)> = vec![];
        for (e, _) in &ks.finite_divisors {
            let in_field = match e {
                Eigenvalue::ComplexPair { .. } => false,
                Eigenvalue::Complex { .. } => ks.field == Field::Complex,
                _ => true,
            };
            if !in_field {
                continue;
            }
            match per.iter_mut().find(|(x, _)| x == e) {
                Some((_, c)) => *c += 1,
                None => per.push((e.clone(), 1)),
            }
        }
        per.sort_by(|a, b| b.1.cmp(&a.1).then_with(|| a.0.cmp(&b.0)));
        let k_s = per.first().map_or(0, |x| x.1);
        let k_r = per.get(1).map_or(0, |x| x.1);
        RegularCounts { j: ks.infinite_divisor_degrees.len(), per_eigenvalue: per, k_s, k_r }
    }

    /// First and second largest of (j, k_s, k_r).
    pub fn top_two(&self) -> (usize, usize) {
        let mut v = [self.j, self.k_s, self.k_r];
        v.sort_unstable_by(|a, b| b.cmp(a));
        (v[0], v[1])
    }
}

/// Minimal ranks of a regular part of size q: (q − k′_r, q − k′_s).
pub fn minimal_ranks_regular(ks: &KroneckerStructure) -> Result<MinimalRanks> {
    if ks.has_singular_part() {
        return Err(Error::SingularPart);
    }
    Ok(regular_part_ranks(ks))
}

fn regular_part_ranks(ks: &KroneckerStructure) -> MinimalRanks {
    let q = ks.q_reg();
    let counts = RegularCounts::from_structure(ks);
    let (ks1, kr1) = counts.top_two();
    // a tie between j and k_s changes which source is "first", never the values
    debug_assert!(ks1 >= kr1 && ks1 <= q);
    MinimalRanks { r: q - kr1, s: q - ks1 }
}

/// Sum of all minimal indices: the rank every nonzero combination of the singular part has.
pub fn minimal_ranks_singular_part(ks: &KroneckerStructure) -> usize {
    ks.singular_sum()
}

/// ρ = (r′ + s̄, s′ + s̄) from a computed structure.
pub fn minimal_ranks_from_structure(ks: &KroneckerStructure) -> MinimalRanks {
    let reg = regular_part_ranks(ks);
    let sbar = minimal_ranks_singular_part(ks);
    MinimalRanks { r: reg.r + sbar, s: reg.s + sbar }
}

/// ρ read off a numerically computed structure. Divisors belong to the same
/// eigenvalue when their labels are identical (the extractor reports one value
/// per cluster); pairs count only over ℂ, where they are split already.
pub fn minimal_ranks_numeric(ks: &KroneckerStructure<FloatEigenvalue>) -> MinimalRanks {
    let mut per: Vec<(&FloatEigenvalue, usize)> = vec![];
    for (e, _) in &ks.finite_divisors {
        if matches!(e, FloatEigenvalue::ComplexPair(_)) {
            continue;
        }
        match per.iter_mut().find(|(x, _)| *x == e) {
            Some((_, c)) => *c += 1,
            None => per.push((e, 1)),
        }
    }
    let mut v: Vec<usize> = per.iter().map(|x| x.1).collect();
    v.push(ks.infinite_divisor_degrees.len());
    v.extend([0, 0]);
    v.sort_unstable_by(|a, b| b.cmp(a));
    let q = ks.q_reg();
    let sbar = ks.singular_sum();
    MinimalRanks { r: q - v[1] + sbar, s: q - v[0] + sbar }
}

/// Rows (t, u) of an attaining transform read off a numerical structure: the
/// second row sits on the eigenvalue (or ∞) with the most divisors, the first
/// on the runner-up; missing rows use points away from every eigenvalue.
pub fn attain_numeric(ks: &KroneckerStructure<FloatEigenvalue>) -> [[Complex64; 2]; 2] {
    let one = Complex64::new(1.0, 0.0);
    let zero = Complex64::new(0.0, 0.0);
    let mut per: Vec<([Complex64; 2], usize)> = vec![];
    for (e, _) in &ks.finite_divisors {
        if matches!(e, FloatEigenvalue::ComplexPair(_)) {
            continue;
        }
        let pt = [one, e.value()];
        match per.iter_mut().find(|(x, _)| *x == pt) {
            Some((_, c)) => *c += 1,
            None => per.push((pt, 1)),
        }
    }
    if !ks.infinite_divisor_degrees.is_empty() {
        per.push(([zero, one], ks.infinite_divisor_degrees.len()));
    }
    per.sort_by(|a, b| b.1.cmp(&a.1));
    let far = 1.0 + ks.finite_divisors.iter().map(|(e, _)| e.value().norm()).fold(0.0, f64::max);
    let mut rows: Vec<[Complex64; 2]> = per.iter().take(2).map(|x| x.0).collect();
    let mut k = 0.0;
    while rows.len() < 2 {
        rows.push([one, Complex64::new(far + k, 0.0)]);
        k += 1.0;
    }
    [rows[1], rows[0]]
}

/// Minimal ranks of A + λB over the given field.
pub fn minimal_ranks(p: &Pencil, field: Field) -> MinimalRanks {
    minimal_ranks_from_structure(&kronecker_structure(p, field))
}

/// Membership in B_{r,s}: ρ(P) ≤ (r, s) componentwise.
pub fn in_b_rs(p: &Pencil, r: usize, s: usize, field: Field) -> Result<bool> {
    if r < s {
        return Err(Error::InvalidRanks(format!("r = {r} < s = {s}")));
    }
    Ok(minimal_ranks(p, field).dominated_by(r, s))
}

/// Membership in the set of even square real pencils with full minimal ranks,
/// i.e. det(tA + uB) ≠ 0 for every real (t, u) ≠ 0.
pub fn in_c(p: &Pencil) -> bool {
    let n = p.n();
    if p.m() != n || n % 2 == 1 {
        return false;
    }
    minimal_ranks(p, Field::Real) == MinimalRanks { r: n, s: n }
}
