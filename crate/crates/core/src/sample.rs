//! Random pencils with a known canonical recipe, for cross-checking the
//! independent routes against each other.

use rand::Rng;

use crate::exact::rational::rat;
use crate::pencil::{random_gl2, random_unimodular, Pencil};

/// A pencil in canonical form, its recipe, and a disguised equivalent.
#[derive(Clone, Debug)]
pub struct RecipeSample {
    pub recipe: Vec<String>,
    pub canonical: Pencil,
    /// P·(canonical after a random GL₂ mix)·Q with unimodular integer P, Q.
    pub disguised: Pencil,
}

/// Eigenvalues are drawn from a small set so repeated eigenvalues are common.
fn random_block<R: Rng>(rng: &mut R) -> (String, Pencil) {
    let eig = |rng: &mut R| rat(rng.gen_range(-1..=2));
    match rng.gen_range(0..10) {
        0..=3 => {
            let k = rng.gen_range(1..=3);
            let a = eig(rng);
            (format!("J{k}({a})"), Pencil::jordan(k, &a))
        }
        4 => {
            let v = rng.gen_range(1..=2);
            (format!("N{v}"), Pencil::infinite_block(v))
        }
        5 | 6 => {
            let k = rng.gen_range(0..=2);
            (format!("L{k}"), Pencil::l_block(k))
        }
        7 | 8 => {
            let l = rng.gen_range(0..=2);
            (format!("R{l}"), Pencil::r_block(l))
        }
        _ => {
            let k = rng.gen_range(1..=2);
            let (a, b) = (eig(rng), rat(rng.gen_range(1..=2)));
            (format!("Q{}({a},{b})", 2 * k), Pencil::q_block(k, &a, &b).expect("b ≠ 0"))
        }
    }
}

/// Blocks are added while they fit in max_m × max_n; the result is nonempty.
pub fn random_recipe<R: Rng>(rng: &mut R, max_m: usize, max_n: usize) -> (Vec<String>, Pencil) {
    loop {
        let mut recipe = vec![];
        let mut p = Pencil::zero(0, 0);
        for _ in 0..8 {
            let (name, b) = random_block(rng);
            if p.m() + b.m() <= max_m && p.n() + b.n() <= max_n {
                recipe.push(name);
                p = p.direct_sum(&b);
            }
            if rng.gen_bool(0.2) {
                break;
            }
        }
        if p.m() > 0 && p.n() > 0 {
            return (recipe, p);
        }
    }
}

pub fn random_recipe_pencil<R: Rng>(rng: &mut R, max_m: usize, max_n: usize) -> RecipeSample {
    let (recipe, canonical) = random_recipe(rng, max_m, max_n);
    let mixed = canonical.apply_gl2(&random_gl2(rng));
    let p = random_unimodular(canonical.m(), rng);
    let q = random_unimodular(canonical.n(), rng);
    RecipeSample { recipe, disguised: mixed.equivalence(&p, &q), canonical }
}
