//! Dense univariate polynomials over ℚ.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use super::rational::{fmt_rational, lcm_denoms, rat, Rational};

/// Coefficients lowest degree first; no trailing zeros (the zero polynomial is empty).
#[derive(Clone, PartialEq, Eq, Hash, Default)]
pub struct PolyQ {
    coeffs: Vec<Rational>,
}

impl PolyQ {
    pub fn new(mut coeffs: Vec<Rational>) -> Self {
        while coeffs.last().is_some_and(|c| c.is_zero()) {
            coeffs.pop();
        }
        PolyQ { coeffs }
    }

    pub fn from_ints(coeffs: &[i64]) -> Self {
        Self::new(coeffs.iter().map(|&c| rat(c)).collect())
    }

    pub fn zero() -> Self {
        PolyQ { coeffs: vec![] }
    }

    pub fn one() -> Self {
        Self::constant(rat(1))
    }

    pub fn constant(c: Rational) -> Self {
        Self::new(vec![c])
    }

    /// The monomial λ.
    pub fn x() -> Self {
        Self::from_ints(&[0, 1])
    }

    /// λ − r
    pub fn linear_root(r: &Rational) -> Self {
        Self::new(vec![-r.clone(), rat(1)])
    }

    pub fn coeffs(&self) -> &[Rational] {
        &self.coeffs
    }

    pub fn coeff(&self, i: usize) -> Rational {
        self.coeffs.get(i).cloned().unwrap_or_else(Rational::zero)
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn is_one(&self) -> bool {
        self.coeffs.len() == 1 && self.coeffs[0].is_one()
    }

    pub fn is_constant(&self) -> bool {
        self.coeffs.len() <= 1
    }

    /// Degree, or `None` for the zero polynomial.
    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    /// Degree with the zero polynomial mapped to 0.
    pub fn deg(&self) -> usize {
        self.degree().unwrap_or(0)
    }

    pub fn lc(&self) -> Rational {
        self.coeffs.last().cloned().unwrap_or_else(Rational::zero)
    }

    pub fn scale(&self, c: &Rational) -> Self {
        Self::new(self.coeffs.iter().map(|x| x * c).collect())
    }

    pub fn monic(&self) -> Self {
        if self.is_zero() {
            return self.clone();
        }
        let l = self.lc();
        Self::new(self.coeffs.iter().map(|x| x / &l).collect())
    }

    pub fn shift(&self, k: usize) -> Self {
        if self.is_zero() {
            return self.clone();
        }
        let mut c = vec![Rational::zero(); k];
        c.extend(self.coeffs.iter().cloned());
        PolyQ { coeffs: c }
    }

    pub fn eval(&self, x: &Rational) -> Rational {
        let mut acc = Rational::zero();
        for c in self.coeffs.iter().rev() {
            acc = acc * x + c;
        }
        acc
    }

    pub fn eval_f64(&self, x: f64) -> f64 {
        let mut acc = 0.0;
        for c in self.coeffs.iter().rev() {
            acc = acc * x + super::rational::to_f64(c);
        }
        acc
    }

    pub fn derivative(&self) -> Self {
        Self::new(
            self.coeffs
                .iter()
                .enumerate()
                .skip(1)
                .map(|(i, c)| c * rat(i as i64))
                .collect(),
        )
    }

    pub fn pow(&self, e: usize) -> Self {
        let mut acc = Self::one();
        for _ in 0..e {
            acc = &acc * self;
        }
        acc
    }

    /// Euclidean division; panics on division by zero.
    pub fn divrem(&self, d: &Self) -> (Self, Self) {
        assert!(!d.is_zero(), "polynomial division by zero");
        let dd = d.deg();
        let dl = d.lc();
        let mut r = self.coeffs.clone();
        if r.len() < d.coeffs.len() {
            return (Self::zero(), self.clone());
        }
        let mut q = vec![Rational::zero(); r.len() - dd];
        for i in (0..q.len()).rev() {
            let c = &r[i + dd] / &dl;
            if !c.is_zero() {
                for (j, dc) in d.coeffs.iter().enumerate() {
                    r[i + j] -= &c * dc;
                }
            }
            q[i] = c;
        }
        r.truncate(dd);
        (Self::new(q), Self::new(r))
    }

    pub fn rem(&self, d: &Self) -> Self {
        self.divrem(d).1
    }

    /// Exact quotient when `d` divides `self`.
    pub fn div_exact(&self, d: &Self) -> Option<Self> {
        let (q, r) = self.divrem(d);
        r.is_zero().then_some(q)
    }

    pub fn divides(&self, other: &Self) -> bool {
        if self.is_zero() {
            return other.is_zero();
        }
        other.rem(self).is_zero()
    }

    /// Monic gcd; gcd(0, 0) = 0.
    pub fn gcd(&self, other: &Self) -> Self {
        let (mut a, mut b) = (self.clone(), other.clone());
        while !b.is_zero() {
            let r = a.rem(&b);
            a = b;
            b = r.primitive_rational();
        }
        a.monic()
    }

    /// Returns (g, s, t) with s·self + t·other = g monic.
    pub fn xgcd(&self, other: &Self) -> (Self, Self, Self) {
        let (mut r0, mut r1) = (self.clone(), other.clone());
        let (mut s0, mut s1) = (Self::one(), Self::zero());
        let (mut t0, mut t1) = (Self::zero(), Self::one());
        while !r1.is_zero() {
            let (q, r) = r0.divrem(&r1);
            let s = &s0 - &(&q * &s1);
            let t = &t0 - &(&q * &t1);
            r0 = std::mem::replace(&mut r1, r);
            s0 = std::mem::replace(&mut s1, s);
            t0 = std::mem::replace(&mut t1, t);
        }
        if r0.is_zero() {
            return (r0, s0, t0);
        }
        let inv = Rational::one() / r0.lc();
        (r0.scale(&inv), s0.scale(&inv), t0.scale(&inv))
    }

    /// Scales to integer coefficients with unit content and positive leading coefficient.
    pub fn primitive_rational(&self) -> Self {
        if self.is_zero() {
            return self.clone();
        }
        let ints = self.to_primitive_ints();
        Self::new(ints.into_iter().map(Rational::from_integer).collect())
    }

    /// Integer coefficients of the primitive part with positive leading coefficient.
    pub fn to_primitive_ints(&self) -> Vec<BigInt> {
        if self.is_zero() {
            return vec![];
        }
        let l = lcm_denoms(self.coeffs.iter());
        let mut ints: Vec<BigInt> = self
            .coeffs
            .iter()
            .map(|c| (c * Rational::from_integer(l.clone())).to_integer())
            .collect();
        let g = ints.iter().fold(BigInt::zero(), |g, c| g.gcd(c));
        let sign = if ints.last().unwrap().is_negative() { -BigInt::one() } else { BigInt::one() };
        for c in ints.iter_mut() {
            *c = &*c / &g * &sign;
        }
        ints
    }

    pub fn from_bigints(c: &[BigInt]) -> Self {
        Self::new(c.iter().cloned().map(Rational::from_integer).collect())
    }

    /// Yun's squarefree decomposition: returns (a_i, i) with self = lc · ∏ a_iⁱ, each a_i monic squarefree, pairwise coprime.
    pub fn squarefree_decomposition(&self) -> Vec<(PolyQ, usize)> {
        let mut out = vec![];
        if self.deg() == 0 {
            return out;
        }
        let f = self.monic();
        let fp = f.derivative();
        let a0 = f.gcd(&fp);
        let mut b = f.div_exact(&a0).unwrap();
        let mut c = fp.div_exact(&a0).unwrap_or_else(|| fp.divrem(&a0).0);
        let mut d = &c - &b.derivative();
        let mut i = 1;
        while b.deg() > 0 {
            let a = b.gcd(&d);
            if a.deg() > 0 {
                out.push((a.clone(), i));
            }
            b = b.div_exact(&a).unwrap();
            c = d.div_exact(&a).unwrap();
            d = &c - &b.derivative();
            i += 1;
        }
        out
    }

    pub fn squarefree_part(&self) -> PolyQ {
        self.squarefree_decomposition()
            .into_iter()
            .fold(PolyQ::one(), |acc, (a, _)| &acc * &a)
    }

    /// Multiplicity of the (nonconstant) factor `f` in `self`.
    pub fn multiplicity(&self, f: &PolyQ) -> usize {
        assert!(f.deg() > 0);
        if self.is_zero() {
            return usize::MAX;
        }
        let mut k = 0;
        let mut g = self.clone();
        while let Some(q) = g.div_exact(f) {
            g = q;
            k += 1;
        }
        k
    }

    /// Substitutes λ ↦ (αλ + β)/(γλ + δ) and clears denominators: returns
    /// Σ cᵢ (αλ+β)ⁱ (γλ+δ)^{deg−i}.
    pub fn mobius(&self, alpha: &Rational, beta: &Rational, gamma: &Rational, delta: &Rational) -> PolyQ {
        let n = self.deg();
        let num = PolyQ::new(vec![beta.clone(), alpha.clone()]);
        let den = PolyQ::new(vec![delta.clone(), gamma.clone()]);
        let mut acc = PolyQ::zero();
        for (i, c) in self.coeffs.iter().enumerate() {
            let term = &num.pow(i) * &den.pow(n - i);
            acc = &acc + &term.scale(c);
        }
        acc
    }

    pub fn to_string_var(&self, var: &str) -> String {
        if self.is_zero() {
            return "0".into();
        }
        let mut s = String::new();
        for (i, c) in self.coeffs.iter().enumerate().rev() {
            if c.is_zero() {
                continue;
            }
            let neg = c.is_negative();
            let a = c.abs();
            if s.is_empty() {
                if neg {
                    s.push('-');
                }
            } else {
                s.push_str(if neg { " - " } else { " + " });
            }
            let coef = fmt_rational(&a);
            let mono = match i {
                0 => String::new(),
                1 => var.to_string(),
                _ => format!("{var}^{i}"),
            };
            if i == 0 {
                s.push_str(&coef);
            } else if a.is_one() {
                s.push_str(&mono);
            } else if a.is_integer() {
                s.push_str(&format!("{coef}{mono}"));
            } else {
                s.push_str(&format!("({coef}){mono}"));
            }
        }
        s
    }
}

impl fmt::Display for PolyQ {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.to_string_var("x"))
    }
}

impl fmt::Debug for PolyQ {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "PolyQ({})", self)
    }
}

impl Add for &PolyQ {
    type Output = PolyQ;
    fn add(self, o: &PolyQ) -> PolyQ {
        let n = self.coeffs.len().max(o.coeffs.len());
        PolyQ::new((0..n).map(|i| self.coeff(i) + o.coeff(i)).collect())
    }
}

impl Sub for &PolyQ {
    type Output = PolyQ;
    fn sub(self, o: &PolyQ) -> PolyQ {
        let n = self.coeffs.len().max(o.coeffs.len());
        PolyQ::new((0..n).map(|i| self.coeff(i) - o.coeff(i)).collect())
    }
}

impl Mul for &PolyQ {
    type Output = PolyQ;
    fn mul(self, o: &PolyQ) -> PolyQ {
        if self.is_zero() || o.is_zero() {
            return PolyQ::zero();
        }
        let mut c = vec![Rational::zero(); self.coeffs.len() + o.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in o.coeffs.iter().enumerate() {
                c[i + j] += a * b;
            }
        }
        PolyQ::new(c)
    }
}

impl Neg for &PolyQ {
    type Output = PolyQ;
    fn neg(self) -> PolyQ {
        PolyQ::new(self.coeffs.iter().map(|c| -c).collect())
    }
}

impl Add for PolyQ {
    type Output = PolyQ;
    fn add(self, o: PolyQ) -> PolyQ {
        &self + &o
    }
}

impl Sub for PolyQ {
    type Output = PolyQ;
    fn sub(self, o: PolyQ) -> PolyQ {
        &self - &o
    }
}

impl Mul for PolyQ {
    type Output = PolyQ;
    fn mul(self, o: PolyQ) -> PolyQ {
        &self * &o
    }
}

/// Lagrange interpolation through (xᵢ, yᵢ) with distinct xᵢ.
pub fn interpolate(xs: &[Rational], ys: &[Rational]) -> PolyQ {
    assert_eq!(xs.len(), ys.len());
    let mut acc = PolyQ::zero();
    for (i, (xi, yi)) in xs.iter().zip(ys).enumerate() {
        if yi.is_zero() {
            continue;
        }
        let mut basis = PolyQ::one();
        let mut denom = Rational::one();
        for (j, xj) in xs.iter().enumerate() {
            if i != j {
                basis = &basis * &PolyQ::linear_root(xj);
                denom *= xi - xj;
            }
        }
        acc = &acc + &basis.scale(&(yi / denom));
    }
    acc
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::rational::ratio;
    use proptest::prelude::*;

    fn p(c: &[i64]) -> PolyQ {
        PolyQ::from_ints(c)
    }

    #[test]
    fn gcd_examples() {
        assert_eq!(p(&[-1, 0, 1]).gcd(&p(&[-1, 1])), p(&[-1, 1]));
        assert_eq!(p(&[0, 1]).gcd(&PolyQ::one()), PolyQ::one());
        assert_eq!(PolyQ::zero().gcd(&PolyQ::zero()), PolyQ::zero());
        assert_eq!(p(&[0, 2]).gcd(&PolyQ::zero()), p(&[0, 1]));
    }

    #[test]
    fn gcd_recovers_planted_factor() {
        let planted = p(&[3, -1, 0, 2]);
        let a = &planted * &p(&[1, 1, 5]);
        let b = &planted * &p(&[-7, 0, 1]);
        let g = a.gcd(&b);
        assert_eq!(g, planted.monic());
        assert!(g.divides(&a) && g.divides(&b));
    }

    #[test]
    fn squarefree_decomposition_of_powers() {
        let f = &(&p(&[1, 1]).pow(3) * &p(&[1, 0, 1]).pow(2)) * &p(&[-2, 0, 1]);
        let d = f.squarefree_decomposition();
        assert_eq!(d, vec![(p(&[-2, 0, 1]), 1), (p(&[1, 0, 1]), 2), (p(&[1, 1]), 3)]);
    }

    #[test]
    fn xgcd_bezout() {
        let a = p(&[1, 2, 3, 4]);
        let b = p(&[5, 0, 1]);
        let (g, s, t) = a.xgcd(&b);
        assert_eq!(&(&s * &a) + &(&t * &b), g);
        assert!(g.is_one());
    }

    #[test]
    fn mobius_substitution() {
        // p(λ) = λ − 2 under λ ↦ 1/λ gives 1 − 2λ
        let q = p(&[-2, 1]).mobius(&rat(0), &rat(1), &rat(1), &rat(0));
        assert_eq!(q, p(&[1, -2]));
    }

    #[test]
    fn interpolation_roundtrip() {
        let f = PolyQ::new(vec![ratio(1, 2), rat(-3), rat(0), ratio(7, 3)]);
        let xs: Vec<Rational> = (0..4).map(rat).collect();
        let ys: Vec<Rational> = xs.iter().map(|x| f.eval(x)).collect();
        assert_eq!(interpolate(&xs, &ys), f);
    }

    #[test]
    fn display() {
        assert_eq!(p(&[1, -1, 0, 2]).to_string_var("λ"), "2λ^3 - λ + 1");
        assert_eq!(PolyQ::new(vec![rat(0), ratio(1, 2)]).to_string(), "(1/2)x");
    }

    fn arb_poly() -> impl Strategy<Value = PolyQ> {
        prop::collection::vec(-5i64..=5, 0..6).prop_map(|c| PolyQ::from_ints(&c))
    }

    proptest! {
        #[test]
        fn gcd_divides_and_is_greatest(a in arb_poly(), b in arb_poly(), c in arb_poly()) {
            let x = &a * &c;
            let y = &b * &c;
            let g = x.gcd(&y);
            prop_assert!(g.divides(&x));
            prop_assert!(g.divides(&y));
            if !c.is_zero() {
                prop_assert!(c.divides(&g));
            }
        }

        #[test]
        fn divrem_identity(a in arb_poly(), b in arb_poly()) {
            prop_assume!(!b.is_zero());
            let (q, r) = a.divrem(&b);
            prop_assert_eq!(&(&q * &b) + &r, a);
            prop_assert!(r.is_zero() || r.deg() < b.deg());
        }
    }
}
