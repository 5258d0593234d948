//! Factorization of univariate polynomials over ℚ.
//!
//! Squarefree parts are split by a big-prime Zassenhaus scheme: factor modulo a
//! prime larger than twice the coefficient bound of any integer factor
//! (distinct-degree then Cantor–Zassenhaus equal-degree splitting), and
//! recombine modular factors by exact trial division over ℤ.

use num_bigint::{BigInt, RandBigInt};
use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use super::poly::PolyQ;
use super::rational::Rational;

/// Irreducible monic factors with multiplicities, sorted by (degree, coefficients).
pub fn factor(p: &PolyQ) -> Vec<(PolyQ, usize)> {
    let mut out = vec![];
    for (sq, mult) in p.squarefree_decomposition() {
        for f in factor_squarefree(&sq) {
            out.push((f, mult));
        }
    }
    out.sort_by(|a, b| cmp_poly(&a.0, &b.0));
    out
}

/// Irreducible monic factors of a squarefree polynomial.
pub fn factor_squarefree(p: &PolyQ) -> Vec<PolyQ> {
    let d = p.deg();
    if d == 0 {
        return vec![];
    }
    if d == 1 {
        return vec![p.monic()];
    }
    let mut out = vec![];
    let mut f = p.to_primitive_ints();
    // strip the factor λ directly
    if f[0].is_zero() {
        out.push(PolyQ::x());
        f.remove(0);
    }
    if f.len() > 2 {
        out.extend(zassenhaus(&f).into_iter().map(|g| PolyQ::from_bigints(&g).monic()));
    } else if f.len() == 2 {
        out.push(PolyQ::from_bigints(&f).monic());
    }
    out.sort_by(cmp_poly);
    out
}

/// Total order used to make factor lists canonical.
pub fn cmp_poly(a: &PolyQ, b: &PolyQ) -> std::cmp::Ordering {
    a.deg()
        .cmp(&b.deg())
        .then_with(|| a.coeffs().iter().rev().cmp(b.coeffs().iter().rev()))
}

fn zassenhaus(f: &[BigInt]) -> Vec<Vec<BigInt>> {
    let n = f.len() - 1;
    let lc = f[n].clone();
    let norm2: BigInt = f.iter().map(|c| c * c).sum();
    let norm = norm2.sqrt() + 1u32;
    // any integer factor g of f, scaled so lc(g) = lc(f), has coefficients bounded by |lc|·2ⁿ·‖f‖₂
    let bound = lc.abs() * (BigInt::one() << n) * norm;
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed_f00d);
    let mut cand: BigInt = bound * 2 + 1;
    let p = loop {
        cand = next_prime(&cand, &mut rng);
        if !(&lc % &cand).is_zero() {
            let fp = ModPoly::from_ints(f, &cand);
            if fp.gcd(&fp.derivative()).deg() == 0 {
                break cand;
            }
        }
        cand += 2;
    };
    let fp = ModPoly::from_ints(f, &p).monic();
    let mut modular = vec![];
    for (g, d) in distinct_degree(&fp) {
        equal_degree(&g, d, &mut rng, &mut modular);
    }
    recombine(f.to_vec(), modular, &p)
}

fn recombine(mut f: Vec<BigInt>, mut factors: Vec<ModPoly>, p: &BigInt) -> Vec<Vec<BigInt>> {
    let mut out = vec![];
    let mut size = 1;
    'outer: while 2 * size <= factors.len() {
        for subset in combinations(factors.len(), size) {
            let lc = f.last().unwrap().clone();
            let mut g = ModPoly::constant(lc.clone(), p);
            for &i in &subset {
                g = g.mul(&factors[i]);
            }
            let cand = primitive(&g.symmetric());
            if let Some(q) = int_div_exact(&f, &cand) {
                out.push(cand);
                f = q;
                let keep: Vec<ModPoly> = factors
                    .iter()
                    .enumerate()
                    .filter(|(i, _)| !subset.contains(i))
                    .map(|(_, g)| g.clone())
                    .collect();
                factors = keep;
                continue 'outer;
            }
        }
        size += 1;
    }
    if f.len() > 1 {
        out.push(primitive(&f));
    }
    out
}

fn combinations(n: usize, k: usize) -> Vec<Vec<usize>> {
    fn rec(start: usize, n: usize, k: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == k {
            out.push(cur.clone());
            return;
        }
        for i in start..n {
            cur.push(i);
            rec(i + 1, n, k, cur, out);
            cur.pop();
        }
    }
    let mut out = vec![];
    rec(0, n, k, &mut vec![], &mut out);
    out
}

fn primitive(c: &[BigInt]) -> Vec<BigInt> {
    let g = c.iter().fold(BigInt::zero(), |g, x| g.gcd(x));
    let s = if c.last().is_some_and(|x| x.is_negative()) { -g } else { g };
    c.iter().map(|x| x / &s).collect()
}

/// Exact division over ℤ[λ]; `None` when d does not divide f.
fn int_div_exact(f: &[BigInt], d: &[BigInt]) -> Option<Vec<BigInt>> {
    if d.len() > f.len() {
        return None;
    }
    let dl = d.last().unwrap();
    let mut r = f.to_vec();
    let mut q = vec![BigInt::zero(); f.len() - d.len() + 1];
    for i in (0..q.len()).rev() {
        let top = &r[i + d.len() - 1];
        if !(top % dl).is_zero() {
            return None;
        }
        let c = top / dl;
        for (j, dc) in d.iter().enumerate() {
            r[i + j] -= &c * dc;
        }
        q[i] = c;
    }
    r.iter().all(|x| x.is_zero()).then_some(q)
}

// ---------------------------------------------------------------- primes

fn is_probable_prime(n: &BigInt, rng: &mut ChaCha8Rng) -> bool {
    let two = BigInt::from(2);
    if *n < two {
        return false;
    }
    for sp in [2u32, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37] {
        let sp = BigInt::from(sp);
        if *n == sp {
            return true;
        }
        if (n % &sp).is_zero() {
            return false;
        }
    }
    let nm1 = n - 1u32;
    let mut d = nm1.clone();
    let mut s = 0;
    while d.is_even() {
        d >>= 1;
        s += 1;
    }
    'witness: for _ in 0..24 {
        let a = rng.gen_bigint_range(&two, &nm1);
        let mut x = a.modpow(&d, n);
        if x.is_one() || x == nm1 {
            continue;
        }
        for _ in 1..s {
            x = x.modpow(&two, n);
            if x == nm1 {
                continue 'witness;
            }
        }
        return false;
    }
    true
}

fn next_prime(start: &BigInt, rng: &mut ChaCha8Rng) -> BigInt {
    let mut c = start.clone();
    if c.is_even() {
        c += 1u32;
    }
    while !is_probable_prime(&c, rng) {
        c += 2u32;
    }
    c
}

// ---------------------------------------------------------------- ℤ/p[λ]

#[derive(Clone, Debug, PartialEq)]
struct ModPoly {
    c: Vec<BigInt>,
    p: BigInt,
}

impl ModPoly {
    fn new(mut c: Vec<BigInt>, p: &BigInt) -> Self {
        for x in c.iter_mut() {
            *x = x.mod_floor(p);
        }
        while c.last().is_some_and(|x| x.is_zero()) {
            c.pop();
        }
        ModPoly { c, p: p.clone() }
    }

    fn from_ints(c: &[BigInt], p: &BigInt) -> Self {
        Self::new(c.to_vec(), p)
    }

    fn constant(c: BigInt, p: &BigInt) -> Self {
        Self::new(vec![c], p)
    }

    fn x(p: &BigInt) -> Self {
        Self::new(vec![BigInt::zero(), BigInt::one()], p)
    }

    fn deg(&self) -> usize {
        self.c.len().saturating_sub(1)
    }

    fn is_zero(&self) -> bool {
        self.c.is_empty()
    }

    fn inv(&self, a: &BigInt) -> BigInt {
        a.modpow(&(&self.p - 2u32), &self.p)
    }

    fn monic(&self) -> Self {
        if self.is_zero() {
            return self.clone();
        }
        let i = self.inv(self.c.last().unwrap());
        Self::new(self.c.iter().map(|x| x * &i).collect(), &self.p)
    }

    fn sub(&self, o: &Self) -> Self {
        let n = self.c.len().max(o.c.len());
        let z = BigInt::zero();
        Self::new(
            (0..n)
                .map(|i| self.c.get(i).unwrap_or(&z) - o.c.get(i).unwrap_or(&z))
                .collect(),
            &self.p,
        )
    }

    fn mul(&self, o: &Self) -> Self {
        if self.is_zero() || o.is_zero() {
            return Self::new(vec![], &self.p);
        }
        let mut c = vec![BigInt::zero(); self.c.len() + o.c.len() - 1];
        for (i, a) in self.c.iter().enumerate() {
            for (j, b) in o.c.iter().enumerate() {
                c[i + j] += a * b;
            }
        }
        Self::new(c, &self.p)
    }

    fn divrem(&self, d: &Self) -> (Self, Self) {
        let dd = d.deg();
        let li = self.inv(d.c.last().unwrap());
        let mut r = self.c.clone();
        if r.len() < d.c.len() {
            return (Self::new(vec![], &self.p), self.clone());
        }
        let mut q = vec![BigInt::zero(); r.len() - dd];
        for i in (0..q.len()).rev() {
            let c = (&r[i + dd] * &li).mod_floor(&self.p);
            if !c.is_zero() {
                for (j, dc) in d.c.iter().enumerate() {
                    r[i + j] = (&r[i + j] - &c * dc).mod_floor(&self.p);
                }
            }
            q[i] = c;
        }
        r.truncate(dd);
        (Self::new(q, &self.p), Self::new(r, &self.p))
    }

    fn rem(&self, d: &Self) -> Self {
        self.divrem(d).1
    }

    fn gcd(&self, o: &Self) -> Self {
        let (mut a, mut b) = (self.clone(), o.clone());
        while !b.is_zero() {
            let r = a.rem(&b);
            a = b;
            b = r;
        }
        a.monic()
    }

    fn derivative(&self) -> Self {
        Self::new(
            self.c.iter().enumerate().skip(1).map(|(i, x)| x * BigInt::from(i)).collect(),
            &self.p,
        )
    }

    fn powmod(&self, e: &BigInt, m: &Self) -> Self {
        let mut base = self.rem(m);
        let mut acc = Self::constant(BigInt::one(), &self.p);
        let mut e = e.clone();
        while !e.is_zero() {
            if e.is_odd() {
                acc = acc.mul(&base).rem(m);
            }
            base = base.mul(&base).rem(m);
            e >>= 1;
        }
        acc
    }

    /// Coefficients in (−p/2, p/2].
    fn symmetric(&self) -> Vec<BigInt> {
        let half = &self.p / 2;
        self.c
            .iter()
            .map(|x| if *x > half { x - &self.p } else { x.clone() })
            .collect()
    }
}

fn distinct_degree(f: &ModPoly) -> Vec<(ModPoly, usize)> {
    let p = f.p.clone();
    let mut out = vec![];
    let mut rest = f.clone();
    let x = ModPoly::x(&p);
    let mut h = x.clone();
    let mut d = 0;
    while rest.deg() >= 2 * (d + 1) {
        d += 1;
        h = h.powmod(&p, &rest);
        let g = rest.gcd(&h.sub(&x));
        if g.deg() > 0 {
            rest = rest.divrem(&g).0;
            h = h.rem(&rest.clone().max_one());
            out.push((g, d));
        }
    }
    if rest.deg() > 0 {
        let dr = rest.deg();
        out.push((rest.monic(), dr));
    }
    out
}

impl ModPoly {
    fn max_one(self) -> Self {
        if self.is_zero() {
            Self::constant(BigInt::one(), &self.p)
        } else {
            self
        }
    }
}

fn equal_degree(g: &ModPoly, d: usize, rng: &mut ChaCha8Rng, out: &mut Vec<ModPoly>) {
    if g.deg() == d {
        out.push(g.monic());
        return;
    }
    let p = g.p.clone();
    let e = (num_traits::pow(p.clone(), d) - 1u32) / 2u32;
    loop {
        let a: Vec<BigInt> = (0..g.deg()).map(|_| rng.gen_bigint_range(&BigInt::zero(), &p)).collect();
        let a = ModPoly::new(a, &p);
        if a.deg() == 0 {
            continue;
        }
        let b = a.powmod(&e, g).sub(&ModPoly::constant(BigInt::one(), &p));
        let h = g.gcd(&b);
        if h.deg() > 0 && h.deg() < g.deg() {
            let other = g.divrem(&h).0;
            equal_degree(&h, d, rng, out);
            equal_degree(&other, d, rng, out);
            return;
        }
    }
}

/// Rational roots of p (distinct), in increasing order.
pub fn rational_roots(p: &PolyQ) -> Vec<Rational> {
    let mut r: Vec<Rational> = factor(p)
        .into_iter()
        .filter(|(f, _)| f.deg() == 1)
        .map(|(f, _)| -f.coeff(0))
        .collect();
    r.sort();
    r
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::rational::{rat, ratio};
    use proptest::prelude::*;

    fn p(c: &[i64]) -> PolyQ {
        PolyQ::from_ints(c)
    }

    fn product(fs: &[(PolyQ, usize)]) -> PolyQ {
        fs.iter().fold(PolyQ::one(), |acc, (f, e)| &acc * &f.pow(*e))
    }

    #[test]
    fn classic_irreducible_quartic() {
        // x⁴ + 1 splits modulo every prime but is irreducible over ℚ
        let f = factor(&p(&[1, 0, 0, 0, 1]));
        assert_eq!(f, vec![(p(&[1, 0, 0, 0, 1]), 1)]);
    }

    #[test]
    fn mixed_factorization() {
        let g = &(&(&p(&[-2, 0, 1]) * &p(&[1, 1]).pow(2)) * &p(&[3, -2])) * &p(&[1, 1, 1]);
        let f = factor(&g);
        assert_eq!(product(&f).monic(), g.monic());
        assert_eq!(f.len(), 4);
        assert!(f.contains(&(p(&[1, 1]), 2)));
        assert!(f.contains(&(PolyQ::new(vec![ratio(-3, 2), rat(1)]), 1)));
        assert!(f.contains(&(p(&[-2, 0, 1]), 1)));
    }

    #[test]
    fn swinnerton_dyer_like_product() {
        // (x² − 2)(x² − 3)(x² + x + 5)(x³ − x − 1)
        let g = &(&(&p(&[-2, 0, 1]) * &p(&[-3, 0, 1])) * &p(&[5, 1, 1])) * &p(&[-1, -1, 0, 1]);
        let f = factor(&g);
        assert_eq!(f.len(), 4);
        assert_eq!(product(&f), g.monic());
        // x⁴ − 10x² + 1 is irreducible (minimal polynomial of √2 + √3)
        assert_eq!(factor(&p(&[1, 0, -10, 0, 1])).len(), 1);
    }

    #[test]
    fn rational_roots_found() {
        let g = &(&p(&[-1, 2]) * &p(&[5, 3])) * &p(&[1, 0, 1]);
        assert_eq!(rational_roots(&g), vec![ratio(-5, 3), ratio(1, 2)]);
    }

    #[test]
    fn zero_root_stripped() {
        let f = factor(&p(&[0, 0, -4, 0, 1]));
        assert_eq!(f, vec![(p(&[-2, 1]), 1), (p(&[0, 1]), 2), (p(&[2, 1]), 1)]);
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(40))]
        #[test]
        fn factors_multiply_back_and_are_irreducible_looking(
            a in prop::collection::vec(-6i64..=6, 2..4),
            b in prop::collection::vec(-6i64..=6, 2..4),
            c in prop::collection::vec(-6i64..=6, 1..4),
        ) {
            let g = &(&p(&a) * &p(&b)) * &p(&c);
            prop_assume!(g.deg() > 0);
            let f = factor(&g);
            prop_assert_eq!(product(&f), g.monic());
            for (h, _) in &f {
                // a rational root of a factor of degree > 1 would contradict irreducibility
                if h.deg() > 1 {
                    prop_assert!(rational_roots_by_search(h).is_empty());
                }
            }
        }
    }

    /// Independent rational-root test: candidates ±(divisor of a₀)/(divisor of aₙ).
    fn rational_roots_by_search(h: &PolyQ) -> Vec<Rational> {
        let c = h.to_primitive_ints();
        let divs = |x: &BigInt| -> Vec<BigInt> {
            let x = x.abs();
            let mut v = vec![];
            let mut i = BigInt::one();
            while i <= x {
                if (&x % &i).is_zero() {
                    v.push(i.clone());
                }
                i += 1;
            }
            v
        };
        if c[0].is_zero() {
            return vec![rat(0)];
        }
        let mut out = vec![];
        for a in divs(&c[0]) {
            for b in divs(c.last().unwrap()) {
                for s in [1, -1] {
                    let r = Rational::new(&a * s, b.clone());
                    if h.eval(&r).is_zero() {
                        out.push(r);
                    }
                }
            }
        }
        out
    }
}
