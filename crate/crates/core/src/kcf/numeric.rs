//! Floating-point Kronecker structure with an explicit rank tolerance.
//!
//! Every structural decision is a singular-value rank decision against
//! `tolerance · max(1, ‖(A, B)‖)`:
//! * normal rank: rank at random points (t, u) of the unit circle;
//! * minimal indices: nullity growth of the block-Toeplitz expansion matrices;
//! * eigenvalues: candidates from random square projections of a rotated
//!   pencil, grouped top-down along a single-linkage tree; a group is accepted
//!   when the algebraic multiplicity measured at its mean equals its size;
//! * block sizes at an eigenvalue: nullity growth of the Taylor-chain Toeplitz
//!   matrices, after removing the contribution of the column indices.

use nalgebra::DMatrix;
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::pencil::FloatPencil;

use super::structure::{DivisorLabel, Field, FloatEigenvalue, KroneckerStructure};

/// Structure plus the diagnostics of the rank decisions behind it.
#[derive(Clone, Debug)]
pub struct NumericStructure {
    pub structure: KroneckerStructure<FloatEigenvalue>,
    /// Some singular value fell within a factor 10 of the threshold.
    pub ill_conditioned: bool,
    /// Degree bookkeeping did not close (eigenvalues lost or spurious).
    pub inconsistent: bool,
    /// Absolute threshold actually used.
    pub threshold: f64,
}

struct Ranker {
    thr: f64,
    ill: bool,
}

impl Ranker {
    fn rank_c(&mut self, m: DMatrix<Complex64>) -> usize {
        if m.nrows() == 0 || m.ncols() == 0 {
            return 0;
        }
        let sv = m.svd(false, false).singular_values;
        let mut r = 0;
        for &s in sv.iter() {
            if s > self.thr {
                r += 1;
            }
            if s > self.thr / 10.0 && s < self.thr * 10.0 {
                self.ill = true;
            }
        }
        r
    }

    fn rank(&mut self, m: &DMatrix<f64>) -> usize {
        self.rank_c(m.map(|x| Complex64::new(x, 0.0)))
    }
}

fn expansion(a: &DMatrix<f64>, b: &DMatrix<f64>, j: usize) -> DMatrix<f64> {
    let (m, n) = a.shape();
    let mut t = DMatrix::zeros((j + 2) * m, (j + 1) * n);
    for i in 0..=j {
        t.view_mut((i * m, i * n), (m, n)).copy_from(a);
        t.view_mut(((i + 1) * m, i * n), (m, n)).copy_from(b);
    }
    t
}

fn column_indices(r: &mut Ranker, a: &DMatrix<f64>, b: &DMatrix<f64>, count: usize) -> Option<Vec<usize>> {
    let n = a.ncols();
    let mut out = vec![];
    let (mut d_prev, mut c_prev) = (0usize, 0usize);
    let mut j = 0;
    while out.len() < count {
        if j > n + 1 {
            return None;
        }
        let t = expansion(a, b, j);
        let d = (j + 1) * n - r.rank(&t);
        let c = d.checked_sub(d_prev)?;
        let new = c.checked_sub(c_prev)?;
        out.extend(std::iter::repeat_n(j, new));
        d_prev = d;
        c_prev = c;
        j += 1;
    }
    out.truncate(count);
    Some(out)
}

/// Block sizes (descending) of the Jordan chains of A + λB at λ = μ.
fn jordan_profile(r: &mut Ranker, a: &DMatrix<f64>, b: &DMatrix<f64>, mu: Complex64, p: usize, q: usize) -> Vec<usize> {
    let (m, n) = a.shape();
    let ac = a.map(|x| Complex64::new(x, 0.0));
    let bc = b.map(|x| Complex64::new(x, 0.0));
    let amu = &ac + &bc * mu;
    let mut at_least = vec![];
    let mut prev = 0usize;
    for j in 0..q.max(1) {
        let mut w = DMatrix::<Complex64>::zeros((j + 1) * m, (j + 1) * n);
        for i in 0..=j {
            w.view_mut((i * m, i * n), (m, n)).copy_from(&amu);
            if i > 0 {
                w.view_mut((i * m, (i - 1) * n), (m, n)).copy_from(&bc);
            }
        }
        let null = (j + 1) * n - r.rank_c(w);
        let g = (null - prev).saturating_sub(p);
        prev = null;
        if g == 0 {
            break;
        }
        at_least.push(g);
    }
    let mut sizes = vec![];
    for s in 1..=at_least.len() {
        let here = at_least[s - 1] - at_least.get(s).copied().unwrap_or(0).min(at_least[s - 1]);
        sizes.extend(std::iter::repeat_n(s, here));
    }
    sizes.sort_unstable_by(|x, y| y.cmp(x));
    sizes
}

/// Eigenvalues of the square pencil Ã + νB̃ (roots of det), assuming B̃
/// invertible. The eigensolver has to survive tight clusters, which are
/// exactly what a perturbed Jordan block produces.
fn projected_eigenvalues(a: &DMatrix<f64>, b: &DMatrix<f64>) -> Option<Vec<Complex64>> {
    let binv = b.clone().try_inverse()?;
    let m = -(binv * a);
    let fm = faer::Mat::<f64>::from_fn(m.nrows(), m.ncols(), |i, j| m[(i, j)]);
    let ev = fm.eigenvalues().ok()?;
    Some(ev.iter().map(|z| Complex64::new(z.re, z.im)).collect())
}

/// Newton steps μ ← μ − σ/(u*Bv) on the singular value that vanishes at a
/// simple eigenvalue (the (p+1)-th smallest, p column indices). Projected
/// candidates of singular pencils can sit well above the threshold.
fn refine(a: &DMatrix<f64>, b: &DMatrix<f64>, mu: Complex64, p: usize) -> Complex64 {
    let (m, n) = a.shape();
    if n <= p || n - p > m.min(n) {
        return mu;
    }
    let idx = n - p - 1;
    let ac = a.map(|x| Complex64::new(x, 0.0));
    let bc = b.map(|x| Complex64::new(x, 0.0));
    let sigma_at = |z: Complex64| {
        let svd = (&ac + &bc * z).svd(true, true);
        let mut order: Vec<usize> = (0..svd.singular_values.len()).collect();
        order.sort_by(|&x, &y| svd.singular_values[y].total_cmp(&svd.singular_values[x]));
        let k = order[idx];
        let u = svd.u.as_ref().expect("requested").column(k).into_owned();
        let v = svd.v_t.as_ref().expect("requested").row(k).adjoint();
        (svd.singular_values[k], u, v)
    };
    let (mut best, mut sigma) = (mu, sigma_at(mu).0);
    let mut z = mu;
    for _ in 0..6 {
        let (_, u, v) = sigma_at(z);
        let d = (u.adjoint() * &bc * &v)[(0, 0)];
        if d.norm() == 0.0 {
            break;
        }
        let phase = (u.adjoint() * (&ac + &bc * z) * &v)[(0, 0)];
        z -= phase / d;
        let s_new = sigma_at(z).0;
        if s_new < sigma {
            best = z;
            sigma = s_new;
        } else {
            break;
        }
    }
    best
}

fn random_orthonormal(rng: &mut ChaCha8Rng, rows: usize, cols: usize) -> DMatrix<f64> {
    let g = DMatrix::from_fn(rows, cols, |_, _| rng.gen::<f64>() * 2.0 - 1.0);
    g.qr().q().columns(0, cols).into_owned()
}

/// Groups candidate points: single-linkage tree, split top-down until each
/// group's measured multiplicity equals its size.
/// `accept` returns the location it settled on and the block sizes found there.
fn cluster(
    points: &[Complex64],
    merge_radius: f64,
    accept: &mut dyn FnMut(&[Complex64]) -> Option<(Complex64, Vec<usize>)>,
) -> Vec<(Complex64, Vec<usize>)> {
    // premerge points closer than the radius (relative)
    let mut groups: Vec<Vec<Complex64>> = vec![];
    for &z in points {
        match groups
            .iter_mut()
            .find(|g| g.iter().any(|w| (w - z).norm() <= merge_radius * (1.0 + z.norm())))
        {
            Some(g) => g.push(z),
            None => groups.push(vec![z]),
        }
    }
    let mut out = vec![];
    let mut stack = vec![groups];
    while let Some(gs) = stack.pop() {
        let pts: Vec<Complex64> = gs.iter().flatten().copied().collect();
        if pts.is_empty() {
            continue;
        }
        if let Some((at, blocks)) = accept(&pts) {
            if blocks.iter().sum::<usize>() == pts.len() {
                out.push((at, blocks));
                continue;
            }
        }
        if gs.len() == 1 {
            // cannot split further; a spurious candidate group measures multiplicity 0
            continue;
        }
        let (left, right) = split_largest_edge(&gs);
        stack.push(left);
        stack.push(right);
    }
    out
}

/// Removes the longest edge of the single-linkage spanning tree over groups.
fn split_largest_edge(gs: &[Vec<Complex64>]) -> (Vec<Vec<Complex64>>, Vec<Vec<Complex64>>) {
    let k = gs.len();
    let dist = |i: usize, j: usize| {
        let mut d = f64::INFINITY;
        for a in &gs[i] {
            for b in &gs[j] {
                d = d.min((a - b).norm());
            }
        }
        d
    };
    // Prim's algorithm
    let mut in_tree = vec![false; k];
    let mut best = vec![(f64::INFINITY, 0usize); k];
    let mut edges = vec![];
    in_tree[0] = true;
    for j in 1..k {
        best[j] = (dist(0, j), 0);
    }
    for _ in 1..k {
        let (v, _) = (0..k)
            .filter(|&j| !in_tree[j])
            .map(|j| (j, best[j].0))
            .min_by(|x, y| x.1.partial_cmp(&y.1).unwrap())
            .unwrap();
        in_tree[v] = true;
        edges.push((best[v].1, v, best[v].0));
        for j in 0..k {
            if !in_tree[j] {
                let d = dist(v, j);
                if d < best[j].0 {
                    best[j] = (d, v);
                }
            }
        }
    }
    let cut = edges
        .iter()
        .enumerate()
        .max_by(|x, y| x.1 .2.partial_cmp(&y.1 .2).unwrap())
        .map(|(i, _)| i)
        .unwrap();
    // components after dropping the cut edge
    let mut comp: Vec<usize> = (0..k).collect();
    fn find(c: &mut Vec<usize>, x: usize) -> usize {
        if c[x] != x {
            let r = find(c, c[x]);
            c[x] = r;
        }
        c[x]
    }
    for (i, &(u, v, _)) in edges.iter().enumerate() {
        if i != cut {
            let (ru, rv) = (find(&mut comp, u), find(&mut comp, v));
            comp[ru] = rv;
        }
    }
    let r0 = find(&mut comp, 0);
    let mut left = vec![];
    let mut right = vec![];
    for (i, g) in gs.iter().enumerate() {
        if find(&mut comp, i) == r0 {
            left.push(g.clone());
        } else {
            right.push(g.clone());
        }
    }
    (left, right)
}

/// Numerical Kronecker structure; `seed` drives the random projections.
pub fn staircase_structure_seeded(p: &FloatPencil, field: Field, seed: u64) -> NumericStructure {
    let (m, n) = (p.m(), p.n());
    let scale = p.norm().max(1.0);
    let thr = p.tolerance * scale;
    let mut rk = Ranker { thr, ill: false };
    let mut rng = ChaCha8Rng::seed_from_u64(seed);

    let normal_rank = (0..4)
        .map(|_| {
            let th: f64 = rng.gen::<f64>() * std::f64::consts::PI;
            rk.rank(&(&p.a * th.cos() + &p.b * th.sin()))
        })
        .max()
        .unwrap_or(0);

    let mut inconsistent = false;
    let cols = column_indices(&mut rk, &p.a, &p.b, n - normal_rank);
    let rows = column_indices(&mut rk, &p.a.transpose(), &p.b.transpose(), m - normal_rank);
    let (min_col_indices, min_row_indices) = match (cols, rows) {
        (Some(c), Some(r)) => (c, r),
        (c, r) => {
            inconsistent = true;
            (c.unwrap_or_default(), r.unwrap_or_default())
        }
    };
    let sing: usize = min_col_indices.iter().sum::<usize>() + min_row_indices.iter().sum::<usize>();
    let q = normal_rank.saturating_sub(sing);
    let pcount = min_col_indices.len();

    let mut finite_divisors = vec![];
    let mut infinite_divisor_degrees = vec![];
    if q > 0 {
        // rotate so that no eigenvalue sits at infinity: A′ = cA + sB, B′ = −sA + cB
        let th: f64 = 0.3 + rng.gen::<f64>();
        let (c, s) = (th.cos(), th.sin());
        let ar = &p.a * c + &p.b * s;
        let br = &p.a * (-s) + &p.b * c;
        let mut cands = vec![];
        for _ in 0..8 {
            let x = random_orthonormal(&mut rng, n, normal_rank);
            let y = random_orthonormal(&mut rng, m, normal_rank);
            if let Some(ev) = projected_eigenvalues(&(y.transpose() * &ar * &x), &(y.transpose() * &br * &x)) {
                cands = ev;
                break;
            }
        }
        let mut accept = |pts: &[Complex64]| {
            let mean = pts.iter().sum::<Complex64>() / pts.len() as f64;
            let at = if pts.len() == 1 { refine(&ar, &br, mean, pcount) } else { mean };
            let blocks = jordan_profile(&mut rk, &ar, &br, at, pcount, q);
            Some((at, blocks))
        };
        let radius = 100.0 * p.tolerance;
        let mut found: Vec<(Complex64, Vec<usize>)> = vec![];
        // a spurious candidate of the singular part may refine onto a true
        // eigenvalue; the profile there is already complete
        for (nu, blocks) in cluster(&cands, radius, &mut accept) {
            if !found.iter().any(|(w, _)| (w - nu).norm() <= radius * (1.0 + nu.norm())) {
                found.push((nu, blocks));
            }
        }
        let mut total = 0;
        let mut pending_pairs: Vec<(Complex64, Vec<usize>)> = vec![];
        for (nu, blocks) in found {
            total += blocks.iter().sum::<usize>();
            // back to the original coordinates: A′ + νB′ = (c − sν)A + (s + cν)B
            let t = Complex64::new(c, 0.0) - nu * s;
            let u = nu * c + s;
            if t.norm() <= 100.0 * p.tolerance * u.norm() {
                infinite_divisor_degrees.extend(blocks);
                continue;
            }
            let lam = u / t;
            let real = lam.im.abs() <= 100.0 * p.tolerance * (1.0 + lam.norm());
            if real {
                for b in blocks {
                    finite_divisors.push((FloatEigenvalue::Real(lam.re), b));
                }
            } else if field == Field::Complex {
                for b in blocks {
                    finite_divisors.push((FloatEigenvalue::Complex(lam.into()), b));
                }
            } else {
                pending_pairs.push((lam, blocks));
            }
        }
        // over ℝ, pair each upper eigenvalue with its conjugate
        pending_pairs.sort_by(|x, y| y.0.im.partial_cmp(&x.0.im).unwrap());
        let mut used = vec![false; pending_pairs.len()];
        for i in 0..pending_pairs.len() {
            if used[i] || pending_pairs[i].0.im < 0.0 {
                continue;
            }
            let z = pending_pairs[i].0;
            let partner = (0..pending_pairs.len())
                .filter(|&j| !used[j] && j != i && pending_pairs[j].0.im < 0.0)
                .min_by(|&x, &y| {
                    (pending_pairs[x].0 - z.conj())
                        .norm()
                        .partial_cmp(&(pending_pairs[y].0 - z.conj()).norm())
                        .unwrap()
                });
            match partner {
                Some(j) if pending_pairs[j].1 == pending_pairs[i].1 => {
                    used[i] = true;
                    used[j] = true;
                    for &b in &pending_pairs[i].1 {
                        finite_divisors.push((FloatEigenvalue::ComplexPair(z.into()), b));
                    }
                }
                _ => inconsistent = true,
            }
        }
        if used.iter().zip(&pending_pairs).any(|(u, _)| !u) {
            inconsistent = true;
        }
        if total != q {
            inconsistent = true;
        }
    }
    finite_divisors.sort_by(|x, y| {
        let (a, b) = (x.0.value(), y.0.value());
        a.re.partial_cmp(&b.re)
            .unwrap()
            .then(a.im.partial_cmp(&b.im).unwrap())
            .then(x.1.cmp(&y.1))
    });
    infinite_divisor_degrees.sort_unstable();
    let structure = KroneckerStructure {
        field,
        normal_rank,
        min_col_indices,
        min_row_indices,
        finite_divisors,
        infinite_divisor_degrees,
    };
    if structure.check_budget(m, n).is_err() {
        inconsistent = true;
    }
    NumericStructure { structure, ill_conditioned: rk.ill, inconsistent, threshold: thr }
}

/// Number of singular values of tA + uB above `threshold`.
pub fn rank_at(p: &FloatPencil, t: Complex64, u: Complex64, threshold: f64) -> usize {
    let m = p.a.map(|x| t * x) + p.b.map(|x| u * x);
    if m.is_empty() {
        return 0;
    }
    m.singular_values().iter().filter(|&&s| s > threshold).count()
}

/// (rank[A B], rank[Aᵀ Bᵀ], dim span{A, B}) by singular values above `threshold`.
pub fn multilinear_rank_numeric(p: &FloatPencil, threshold: f64) -> [usize; 3] {
    let rank = |m: DMatrix<f64>| {
        if m.is_empty() {
            0
        } else {
            m.singular_values().iter().filter(|&&s| s > threshold).count()
        }
    };
    let (m, n) = (p.m(), p.n());
    let wide = DMatrix::from_fn(m, 2 * n, |i, j| if j < n { p.a[(i, j)] } else { p.b[(i, j - n)] });
    let tall = DMatrix::from_fn(n, 2 * m, |j, i| if i < m { p.a[(i, j)] } else { p.b[(i - m, j)] });
    let flat = DMatrix::from_fn(2, m * n, |k, l| if k == 0 { p.a.as_slice()[l] } else { p.b.as_slice()[l] });
    [rank(wide), rank(tall), rank(flat)]
}

/// Numerical structure with the default projection seed.
pub fn staircase_structure(p: &FloatPencil, field: Field) -> NumericStructure {
    staircase_structure_seeded(p, field, 0x9e37_79b9)
}

/// True when a numerical structure reproduces an exact one: identical indices and
/// divisor powers, eigenvalues within `eig_tol` (relative).
pub fn matches_exact(num: &KroneckerStructure<FloatEigenvalue>, exact: &KroneckerStructure, eig_tol: f64) -> bool {
    if num.normal_rank != exact.normal_rank
        || num.min_col_indices != exact.min_col_indices
        || num.min_row_indices != exact.min_row_indices
        || num.infinite_divisor_degrees != exact.infinite_divisor_degrees
        || num.finite_divisors.len() != exact.finite_divisors.len()
    {
        return false;
    }
    let mut used = vec![false; num.finite_divisors.len()];
    for (e, pw) in &exact.finite_divisors {
        let z = e.approx();
        let hit = num.finite_divisors.iter().enumerate().position(|(i, (f, q))| {
            if used[i] || q != pw || f.weight() != e.weight() {
                return false;
            }
            let w = f.value();
            (w - z).norm() <= eig_tol * (1.0 + z.norm())
        });
        match hit {
            Some(i) => used[i] = true,
            None => return false,
        }
    }
    true
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::rational::rat;
    use crate::kcf::exact::kronecker_structure;
    use crate::pencil::Pencil;

    fn perturbed(p: &Pencil, eps: f64, seed: u64) -> FloatPencil {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut f = p.to_float(1e-8);
        f.a += DMatrix::from_fn(p.m(), p.n(), |_, _| eps * (rng.gen::<f64>() * 2.0 - 1.0));
        f.b += DMatrix::from_fn(p.m(), p.n(), |_, _| eps * (rng.gen::<f64>() * 2.0 - 1.0));
        f
    }

    fn agrees(p: &Pencil) -> bool {
        let exact = kronecker_structure(p, Field::Real);
        let num = staircase_structure(&perturbed(p, 1e-12, 1), Field::Real);
        !num.inconsistent && matches_exact(&num.structure, &exact, 1e-6)
    }

    #[test]
    fn jordan_block_under_noise() {
        assert!(agrees(&Pencil::jordan(2, &rat(3))));
        assert!(agrees(&Pencil::jordan(4, &rat(-1))));
    }

    #[test]
    fn zero_pencil() {
        let s = staircase_structure(&Pencil::zero(2, 3).to_float(1e-8), Field::Real).structure;
        assert_eq!(s.min_col_indices, vec![0, 0, 0]);
        assert_eq!(s.min_row_indices, vec![0, 0]);
        assert_eq!(s.normal_rank, 0);
    }

    #[test]
    fn complex_pair() {
        let p = Pencil::q_block(1, &rat(0), &rat(1)).unwrap();
        let s = staircase_structure(&p.to_float(1e-8), Field::Real).structure;
        assert_eq!(s.finite_divisors.len(), 1);
        assert!(matches!(s.finite_divisors[0], (FloatEigenvalue::ComplexPair(_), 1)));
        assert!(agrees(&p));
    }

    #[test]
    fn singular_and_infinite_parts() {
        let p = Pencil::l_block(1).direct_sum(&Pencil::r_block(1)).direct_sum(&Pencil::infinite_block(2));
        assert!(agrees(&p));
        let p = Pencil::l_block(2).direct_sum(&Pencil::jordan(1, &rat(2)));
        assert!(agrees(&p));
    }

    #[test]
    fn normal_rank_bounded() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let a = DMatrix::from_fn(3, 5, |_, _| rng.gen::<f64>());
        let b = DMatrix::from_fn(3, 5, |_, _| rng.gen::<f64>());
        let s = staircase_structure(&FloatPencil::new(a, b, 1e-8).unwrap(), Field::Real).structure;
        assert!(s.normal_rank <= 3);
    }
}
