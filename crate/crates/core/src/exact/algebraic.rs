//! Numerical views of algebraic numbers: root approximations and decimal rendering.

use nalgebra::DMatrix;
use num_bigint::BigInt;
use num_complex::Complex64;
use num_traits::{One, Zero};

use super::poly::PolyQ;
use super::rational::{to_decimal, to_f64, Rational};
use super::sturm::{isolate_real_roots, refine};

/// All complex roots of a squarefree polynomial, by companion-matrix eigenvalues.
pub fn complex_roots_f64(p: &PolyQ) -> Vec<Complex64> {
    let n = p.deg();
    if n == 0 {
        return vec![];
    }
    let m = p.monic();
    let comp = DMatrix::from_fn(n, n, |i, j| {
        if j == n - 1 {
            -to_f64(&m.coeff(i))
        } else if i == j + 1 {
            1.0
        } else {
            0.0
        }
    });
    comp.complex_eigenvalues().iter().copied().collect()
}

/// Roots with positive imaginary part, ordered by (real, imaginary) part.
/// Index k of this list is the `pair_index` of the k-th conjugate pair.
pub fn upper_roots_f64(p: &PolyQ) -> Vec<Complex64> {
    let nreal = isolate_real_roots(p).len();
    let mut roots = complex_roots_f64(p);
    roots.sort_by(|a, b| b.im.partial_cmp(&a.im).unwrap());
    let npairs = (p.deg() - nreal) / 2;
    let mut up: Vec<Complex64> = roots.into_iter().take(npairs).collect();
    up.sort_by(|a, b| a.re.partial_cmp(&b.re).unwrap().then(a.im.partial_cmp(&b.im).unwrap()));
    up
}

fn truncate(x: &Rational, bits: u64) -> Rational {
    let scale = BigInt::one() << bits;
    let scaled = (x * Rational::from_integer(scale.clone())).round();
    Rational::new(scaled.to_integer(), scale)
}

/// Newton refinement of a simple complex root with exact rational steps,
/// truncated to `bits` binary digits per step. Returns (re, im).
pub fn refine_complex(p: &PolyQ, z0: Complex64, bits: u64) -> (Rational, Rational) {
    let dp = p.derivative();
    let mut re = Rational::from_float(z0.re).unwrap_or_else(Rational::zero);
    let mut im = Rational::from_float(z0.im).unwrap_or_else(Rational::zero);
    let eval = |q: &PolyQ, re: &Rational, im: &Rational| {
        let (mut ar, mut ai) = (Rational::zero(), Rational::zero());
        for c in q.coeffs().iter().rev() {
            let nr = &ar * re - &ai * im + c;
            let ni = &ar * im + &ai * re;
            ar = nr;
            ai = ni;
        }
        (ar, ai)
    };
    // quadratic convergence from double precision: 53·2ᵏ ≥ bits
    let mut correct = 40u64;
    while correct < 2 * bits {
        let (fr, fi) = eval(p, &re, &im);
        let (dr, di) = eval(&dp, &re, &im);
        let den = &dr * &dr + &di * &di;
        if den.is_zero() {
            break;
        }
        let qr = (&fr * &dr + &fi * &di) / &den;
        let qi = (&fi * &dr - &fr * &di) / &den;
        re = truncate(&(re - qr), bits + 16);
        im = truncate(&(im - qi), bits + 16);
        correct *= 2;
    }
    (re, im)
}

/// Decimal rendering of the real root isolated in (lo, hi].
pub fn real_root_decimal(p: &PolyQ, lo: &Rational, hi: &Rational, digits: usize) -> String {
    let width = Rational::new(BigInt::one(), num_traits::pow(BigInt::from(10), digits + 3));
    let (a, b) = refine(p, lo, hi, &width);
    to_decimal(&((a + b) / Rational::from_integer(BigInt::from(2))), digits)
}

/// Decimal rendering "re ± im i" of a complex root near `z0`.
pub fn complex_root_decimal(p: &PolyQ, z0: Complex64, digits: usize) -> String {
    let bits = (digits as f64 * 3.33) as u64 + 16;
    let (re, im) = refine_complex(p, z0, bits);
    let im_s = to_decimal(&im, digits);
    match im_s.strip_prefix('-') {
        Some(abs) => format!("{} - {}i", to_decimal(&re, digits), abs),
        None => format!("{} + {}i", to_decimal(&re, digits), im_s),
    }
}
