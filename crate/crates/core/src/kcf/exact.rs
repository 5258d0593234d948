//! Exact Kronecker structure of rational pencils.

use crate::exact::rational::rat;
use crate::exact::{factor, smith_form, MatrixQ, PolyMatrix, PolyQ};
use crate::pencil::Pencil;

use super::structure::{Eigenvalue, Field, KroneckerStructure};

/// Rank of A + λB over ℚ(λ). Every minor is a polynomial of degree at most
/// min(m, n), so some point among min(m, n) + 1 distinct values attains it.
pub fn normal_rank(p: &Pencil) -> usize {
    let k = p.m().min(p.n());
    let mut best = 0;
    for i in 0..=k {
        best = best.max(p.eval(&rat(i as i64)).rank());
        if best == k {
            break;
        }
    }
    best
}

/// Block Toeplitz matrix whose kernel holds the polynomial kernel vectors of degree ≤ j:
/// (j+2)m × (j+1)n with A on the block diagonal and B just below it.
fn expansion_matrix(a: &MatrixQ, b: &MatrixQ, j: usize) -> MatrixQ {
    let (m, n) = (a.rows(), a.cols());
    let mut t = MatrixQ::zeros((j + 2) * m, (j + 1) * n);
    for i in 0..=j {
        t.set_block(i * m, i * n, a);
        t.set_block((i + 1) * m, i * n, b);
    }
    t
}

/// Minimal column indices of A + λB, ascending, zeros included.
fn column_indices(a: &MatrixQ, b: &MatrixQ, count: usize) -> Vec<usize> {
    let n = a.cols();
    let mut out = vec![];
    // d_j = dim ker M_j = Σ_{k_i ≤ j} (j − k_i + 1); c_j = d_j − d_{j−1} = #{k_i ≤ j}
    let (mut d_prev, mut c_prev) = (0usize, 0usize);
    let mut j = 0;
    while out.len() < count {
        let t = expansion_matrix(a, b, j);
        let d = (j + 1) * n - t.rank();
        let c = d - d_prev;
        for _ in 0..c - c_prev {
            out.push(j);
        }
        d_prev = d;
        c_prev = c;
        j += 1;
    }
    debug_assert_eq!(out.len(), count);
    out
}

/// Minimal column and row indices, ascending, zero indices included.
pub fn minimal_indices(p: &Pencil) -> (Vec<usize>, Vec<usize>) {
    let nr = normal_rank(p);
    let cols = column_indices(&p.a, &p.b, p.n() - nr);
    let rows = column_indices(&p.a.transpose(), &p.b.transpose(), p.m() - nr);
    (cols, rows)
}

/// Elementary divisors hidden in a list of invariant polynomials.
fn divisors_from_invariants(inv: &[PolyQ], field: Field) -> Vec<(Eigenvalue, usize)> {
    let Some(last) = inv.last() else { return vec![] };
    let mut out = vec![];
    for (f, _) in factor(last) {
        let roots = Eigenvalue::roots_of(&f, field);
        for s in inv {
            let e = s.multiplicity(&f);
            if e > 0 {
                for r in &roots {
                    out.push((r.clone(), e));
                }
            }
        }
    }
    out.sort();
    out
}

/// Finite elementary divisors: one entry (eigenvalue, power) per divisor.
pub fn finite_structure(p: &Pencil, field: Field) -> Vec<(Eigenvalue, usize)> {
    let inv = smith_form(&PolyMatrix::from_pencil(&p.a, &p.b));
    divisors_from_invariants(&inv, field)
}

/// Degrees of the infinite elementary divisors: the divisors at 0 of B + λA.
pub fn infinite_structure(p: &Pencil) -> Vec<usize> {
    let inv = smith_form(&PolyMatrix::from_pencil(&p.b, &p.a));
    let x = PolyQ::x();
    let mut out: Vec<usize> = inv.iter().map(|s| s.multiplicity(&x)).filter(|&e| e > 0).collect();
    out.sort_unstable();
    out
}

/// The complete Kronecker structure; the canonical-form budgets are checked before returning.
pub fn kronecker_structure(p: &Pencil, field: Field) -> KroneckerStructure {
    let normal_rank = normal_rank(p);
    let (min_col_indices, min_row_indices) = minimal_indices(p);
    let ks = KroneckerStructure {
        field,
        normal_rank,
        min_col_indices,
        min_row_indices,
        finite_divisors: finite_structure(p, field),
        infinite_divisor_degrees: infinite_structure(p),
    };
    if let Err(e) = ks.check_budget(p.m(), p.n()) {
        panic!("Kronecker structure inconsistent ({e}) for pencil {p:?}");
    }
    // independent route to the singular degree: normal rank minus regular degree
    assert_eq!(ks.singular_sum(), normal_rank - ks.q_reg(), "minimal index sum disagrees with divisor degrees");
    ks
}
