//! Matrices over ℚ[λ] and their Smith form.

use super::matrix::MatrixQ;
use super::poly::PolyQ;

#[derive(Clone, Debug, PartialEq)]
pub struct PolyMatrix {
    rows: usize,
    cols: usize,
    data: Vec<PolyQ>,
}

impl PolyMatrix {
    pub fn new(rows: usize, cols: usize, data: Vec<PolyQ>) -> Self {
        assert_eq!(data.len(), rows * cols);
        PolyMatrix { rows, cols, data }
    }

    /// A + λB
    pub fn from_pencil(a: &MatrixQ, b: &MatrixQ) -> Self {
        assert_eq!((a.rows(), a.cols()), (b.rows(), b.cols()));
        let data = a
            .data()
            .iter()
            .zip(b.data())
            .map(|(x, y)| PolyQ::new(vec![x.clone(), y.clone()]))
            .collect();
        PolyMatrix { rows: a.rows(), cols: a.cols(), data }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, i: usize, j: usize) -> &PolyQ {
        &self.data[i * self.cols + j]
    }

    fn get_mut(&mut self, i: usize, j: usize) -> &mut PolyQ {
        &mut self.data[i * self.cols + j]
    }

    fn swap_rows(&mut self, a: usize, b: usize) {
        if a != b {
            for j in 0..self.cols {
                self.data.swap(a * self.cols + j, b * self.cols + j);
            }
        }
    }

    fn swap_cols(&mut self, a: usize, b: usize) {
        if a != b {
            for i in 0..self.rows {
                self.data.swap(i * self.cols + a, i * self.cols + b);
            }
        }
    }

    /// row[dst] -= q · row[src]
    fn row_axpy(&mut self, dst: usize, src: usize, q: &PolyQ) {
        for j in 0..self.cols {
            let v = q * self.get(src, j);
            let d = self.get_mut(dst, j);
            *d = &*d - &v;
        }
    }

    fn col_axpy(&mut self, dst: usize, src: usize, q: &PolyQ) {
        for i in 0..self.rows {
            let v = q * self.get(i, src);
            let d = self.get_mut(i, dst);
            *d = &*d - &v;
        }
    }

    /// Determinant by cofactor expansion (small matrices only).
    pub fn det(&self) -> PolyQ {
        assert_eq!(self.rows, self.cols);
        let idx: Vec<usize> = (0..self.rows).collect();
        self.minor(&idx, &idx)
    }

    pub fn minor(&self, rows: &[usize], cols: &[usize]) -> PolyQ {
        if rows.is_empty() {
            return PolyQ::one();
        }
        let r0 = rows[0];
        let rest = &rows[1..];
        let mut acc = PolyQ::zero();
        for (k, &c) in cols.iter().enumerate() {
            let e = self.get(r0, c);
            if e.is_zero() {
                continue;
            }
            let sub: Vec<usize> = cols.iter().copied().filter(|&x| x != c).collect();
            let t = e * &self.minor(rest, &sub);
            acc = if k % 2 == 0 { &acc + &t } else { &acc - &t };
        }
        acc
    }
}

/// Monic invariant polynomials s₁ | s₂ | … | s_k, k the rank over ℚ(λ).
pub fn smith_form(m: &PolyMatrix) -> Vec<PolyQ> {
    let mut a = m.clone();
    let (rows, cols) = (a.rows, a.cols);
    let mut out = vec![];
    for t in 0..rows.min(cols) {
        // pivot: entry of minimal degree in the trailing block
        loop {
            let mut best: Option<(usize, usize, usize)> = None;
            for i in t..rows {
                for j in t..cols {
                    let e = a.get(i, j);
                    if !e.is_zero() && best.is_none_or(|b| e.deg() < b.2) {
                        best = Some((i, j, e.deg()));
                    }
                }
            }
            let Some((pi, pj, _)) = best else {
                debug_check(m, &out);
                return out;
            };
            a.swap_rows(t, pi);
            a.swap_cols(t, pj);
            let mut clean = true;
            for i in t + 1..rows {
                if a.get(i, t).is_zero() {
                    continue;
                }
                let (q, r) = a.get(i, t).divrem(a.get(t, t));
                a.row_axpy(i, t, &q);
                clean &= r.is_zero();
            }
            for j in t + 1..cols {
                if a.get(t, j).is_zero() {
                    continue;
                }
                let (q, r) = a.get(t, j).divrem(a.get(t, t));
                a.col_axpy(j, t, &q);
                clean &= r.is_zero();
            }
            if !clean {
                continue;
            }
            // the pivot must divide every remaining entry
            let p = a.get(t, t).clone();
            let bad = (t + 1..rows).find(|&i| (t + 1..cols).any(|j| !p.divides(a.get(i, j))));
            match bad {
                Some(i) => {
                    // row t += row i, then reduce again
                    a.row_axpy(t, i, &-&PolyQ::one());
                }
                None => break,
            }
        }
        out.push(a.get(t, t).monic());
    }
    debug_check(m, &out);
    out
}

fn debug_check(m: &PolyMatrix, inv: &[PolyQ]) {
    debug_assert!(inv.windows(2).all(|w| w[0].divides(&w[1])), "divisibility chain broken");
    if cfg!(debug_assertions) && m.rows <= 4 && m.cols <= 4 {
        let d = determinantal_divisors(m);
        let mut prod = PolyQ::one();
        assert_eq!(d.len(), inv.len(), "Smith form rank disagrees with determinantal divisors");
        for (k, s) in inv.iter().enumerate() {
            prod = &prod * s;
            assert_eq!(prod, d[k], "Smith form disagrees with determinantal divisors");
        }
    }
}

/// dₖ = monic gcd of all k×k minors, for k = 1… up to the rank.
pub fn determinantal_divisors(m: &PolyMatrix) -> Vec<PolyQ> {
    let mut out = vec![];
    for k in 1..=m.rows.min(m.cols) {
        let mut g = PolyQ::zero();
        for rs in subsets(m.rows, k) {
            for cs in subsets(m.cols, k) {
                g = g.gcd(&m.minor(&rs, &cs));
                if g.is_one() {
                    break;
                }
            }
        }
        if g.is_zero() {
            break;
        }
        out.push(g);
    }
    out
}

pub fn subsets(n: usize, k: usize) -> Vec<Vec<usize>> {
    let mut out = vec![];
    let mut cur = Vec::with_capacity(k);
    fn rec(start: usize, n: usize, k: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == k {
            out.push(cur.clone());
            return;
        }
        for i in start..=n - (k - cur.len()) {
            cur.push(i);
            rec(i + 1, n, k, cur, out);
            cur.pop();
        }
    }
    if k <= n {
        rec(0, n, k, &mut cur, &mut out);
    }
    out
}
