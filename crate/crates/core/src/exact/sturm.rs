//! Real-root counting and isolation with Sturm sequences.

use num_traits::{One, Signed, Zero};

use super::poly::PolyQ;
use super::rational::{rat, Rational};
use crate::error::{Error, Result};

/// An endpoint of a counting interval.
#[derive(Clone, Debug, PartialEq)]
pub enum Bound {
    NegInf,
    PosInf,
    At(Rational),
}

pub struct Sturm {
    seq: Vec<PolyQ>,
}

impl Sturm {
    pub fn new(p: &PolyQ) -> Result<Self> {
        if p.is_zero() {
            return Err(Error::ZeroPolynomial);
        }
        let mut seq = vec![p.clone(), p.derivative()];
        while !seq.last().unwrap().is_zero() {
            let n = seq.len();
            let r = seq[n - 2].rem(&seq[n - 1]);
            // positive rescaling keeps signs intact and coefficients small
            let r = if r.is_zero() { r } else { rescale(&-&r) };
            seq.push(r);
        }
        seq.pop();
        Ok(Sturm { seq })
    }

    fn variations_at(&self, b: &Bound) -> usize {
        let signs: Vec<i8> = self
            .seq
            .iter()
            .map(|q| match b {
                Bound::At(x) => sign(&q.eval(x)),
                Bound::PosInf => sign(&q.lc()),
                Bound::NegInf => {
                    let s = sign(&q.lc());
                    if q.deg() % 2 == 1 {
                        -s
                    } else {
                        s
                    }
                }
            })
            .filter(|&s| s != 0)
            .collect();
        signs.windows(2).filter(|w| w[0] != w[1]).count()
    }

    /// Distinct real roots in (lo, hi].
    pub fn count(&self, lo: &Bound, hi: &Bound) -> usize {
        self.variations_at(lo).saturating_sub(self.variations_at(hi))
    }
}

fn rescale(p: &PolyQ) -> PolyQ {
    let q = p.primitive_rational();
    if sign(&q.lc()) == sign(&p.lc()) {
        q
    } else {
        -&q
    }
}

fn sign(x: &Rational) -> i8 {
    if x.is_zero() {
        0
    } else if x.is_positive() {
        1
    } else {
        -1
    }
}

/// Number of distinct real roots of squarefree `p` in (lo, hi].
pub fn sturm_real_root_count(p: &PolyQ, lo: &Bound, hi: &Bound) -> Result<usize> {
    Ok(Sturm::new(p)?.count(lo, hi))
}

pub fn real_root_count(p: &PolyQ) -> usize {
    if p.deg() == 0 {
        return 0;
    }
    sturm_real_root_count(&p.squarefree_part(), &Bound::NegInf, &Bound::PosInf).unwrap()
}

/// Cauchy bound: every root has absolute value below it.
pub fn cauchy_bound(p: &PolyQ) -> Rational {
    let l = p.lc();
    let m = p.coeffs()[..p.deg()]
        .iter()
        .map(|c| (c / &l).abs())
        .max()
        .unwrap_or_else(Rational::zero);
    m + Rational::one()
}

/// Disjoint intervals (lo, hi], each containing exactly one real root of `p`,
/// sorted increasingly. `p` must be squarefree and nonzero.
pub fn isolate_real_roots(p: &PolyQ) -> Vec<(Rational, Rational)> {
    if p.deg() == 0 {
        return vec![];
    }
    let s = Sturm::new(p).unwrap();
    let b = cauchy_bound(p);
    let mut out = vec![];
    let mut stack = vec![(-b.clone(), b)];
    while let Some((lo, hi)) = stack.pop() {
        let c = s.count(&Bound::At(lo.clone()), &Bound::At(hi.clone()));
        if c == 0 {
            continue;
        }
        if c == 1 {
            out.push((lo, hi));
            continue;
        }
        let mid = (&lo + &hi) / rat(2);
        stack.push((lo, mid.clone()));
        stack.push((mid, hi));
    }
    out.sort();
    out
}

/// Shrinks an isolating interval of a squarefree polynomial below `width`.
pub fn refine(p: &PolyQ, lo: &Rational, hi: &Rational, width: &Rational) -> (Rational, Rational) {
    let (mut lo, mut hi) = (lo.clone(), hi.clone());
    if p.eval(&hi).is_zero() {
        return (hi.clone(), hi);
    }
    let mut slo = sign(&p.eval(&lo));
    if slo == 0 {
        // the root is not lo itself (interval is half-open), nudge lo inward
        let s = Sturm::new(p).unwrap();
        let mut m = (&lo + &hi) / rat(2);
        while s.count(&Bound::At(m.clone()), &Bound::At(hi.clone())) == 0 {
            m = (&lo + &m) / rat(2);
        }
        lo = m;
        slo = sign(&p.eval(&lo));
    }
    while &hi - &lo > *width {
        let mid = (&lo + &hi) / rat(2);
        let sm = sign(&p.eval(&mid));
        if sm == 0 {
            return (mid.clone(), mid);
        }
        if sm == slo {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    (lo, hi)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::rational::{ratio, to_f64};
    use proptest::prelude::*;

    fn p(c: &[i64]) -> PolyQ {
        PolyQ::from_ints(c)
    }

    #[test]
    fn counts() {
        let all = |q: &PolyQ| sturm_real_root_count(q, &Bound::NegInf, &Bound::PosInf).unwrap();
        assert_eq!(all(&p(&[1, 0, 1])), 0);
        assert_eq!(all(&p(&[-2, 0, 1])), 2);
        assert_eq!(
            sturm_real_root_count(&p(&[-2, 0, 1]), &Bound::At(rat(0)), &Bound::PosInf).unwrap(),
            1
        );
        // half-open: the root 1 of λ − 1 lies in (0, 1] but not in (1, 2]
        assert_eq!(sturm_real_root_count(&p(&[-1, 1]), &Bound::At(rat(0)), &Bound::At(rat(1))).unwrap(), 1);
        assert_eq!(sturm_real_root_count(&p(&[-1, 1]), &Bound::At(rat(1)), &Bound::At(rat(2))).unwrap(), 0);
        assert_eq!(sturm_real_root_count(&PolyQ::zero(), &Bound::NegInf, &Bound::PosInf), Err(Error::ZeroPolynomial));
    }

    #[test]
    fn isolation_and_refinement() {
        let q = p(&[-2, 0, 1]);
        let iv = isolate_real_roots(&q);
        assert_eq!(iv.len(), 2);
        let (lo, hi) = refine(&q, &iv[1].0, &iv[1].1, &ratio(1, 1_000_000_000));
        assert!((to_f64(&lo) - 2f64.sqrt()).abs() < 1e-8);
        assert!(lo <= hi);
    }

    /// Sign-change bisection oracle on a fine grid, valid for well-separated simple roots.
    fn grid_count(q: &PolyQ) -> usize {
        let b = to_f64(&cauchy_bound(q));
        let steps = 200_000;
        let h = 2.0 * b / steps as f64;
        let mut count = 0;
        let mut prev = q.eval_f64(-b);
        for i in 1..=steps {
            let x = -b + i as f64 * h;
            let v = q.eval_f64(x);
            if v == 0.0 || prev * v < 0.0 {
                count += 1;
            }
            prev = if v == 0.0 { -prev } else { v };
        }
        count
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(40))]
        #[test]
        fn matches_grid_oracle(roots in prop::collection::vec(-40i64..40, 0..4), quads in prop::collection::vec((1i64..5, -3i64..3), 0..2)) {
            let mut q = PolyQ::one();
            let mut rs = roots.clone();
            rs.sort();
            rs.dedup();
            for r in &rs {
                q = &q * &p(&[-r, 4]);
            }
            for (c, s) in &quads {
                q = &q * &p(&[c + s * s, 2 * s, 1]);
            }
            prop_assume!(q.deg() > 0);
            let exact = sturm_real_root_count(&q, &Bound::NegInf, &Bound::PosInf).unwrap();
            prop_assert_eq!(exact, rs.len());
            prop_assert_eq!(exact, grid_count(&q));
            prop_assert_eq!(isolate_real_roots(&q).len(), rs.len());
        }
    }
}
