//! Orbit families of pencils up to 4×4: matching, canonical representatives,
//! multilinear rank, tensor-rank lookup and an equivalence decision.
//!
//! Matching binds family parameters from the computed Kronecker structure
//! rather than from matrix patterns, so arbitrary GL(m) × GL(n) disguises are
//! classified as well as the printed canonical forms.

mod catalog;
mod equivalence;

use std::collections::BTreeMap;
use std::fmt;

use num_traits::{Signed, Zero};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::exact::rational::{fmt_rational, parse_rational, rat, to_f64, Rational};
use crate::exact::MatrixQ;
use crate::kcf::{kronecker_structure, normal_rank, Eigenvalue, Field, KroneckerStructure};
use crate::pencil::Pencil;

pub use catalog::{catalog, family, Block, BlockSpec, FamilyRecord, CATALOG_VERSION};
pub use equivalence::{verify_equivalence, verify_equivalence_report, EquivalenceReport};

/// Largest dimension the catalog covers.
pub const MAX_DIM: usize = 4;

/// Value bound to a family parameter.
#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum ParamValue {
    Rational(#[serde(serialize_with = "ser_rational")] Rational),
    /// The positive square root of a non-square rational.
    Sqrt(#[serde(serialize_with = "ser_rational")] Rational),
    /// An irrational value known only numerically here (its exact description
    /// lives in the eigenvalue it came from).
    Approx(f64),
}

fn ser_rational<S: serde::Serializer>(x: &Rational, s: S) -> std::result::Result<S::Ok, S::Error> {
    s.serialize_str(&fmt_rational(x))
}

impl ParamValue {
    pub fn as_rational(&self) -> Option<&Rational> {
        match self {
            ParamValue::Rational(x) => Some(x),
            _ => None,
        }
    }

    pub fn approx(&self) -> f64 {
        match self {
            ParamValue::Rational(x) => to_f64(x),
            ParamValue::Sqrt(x) => to_f64(x).sqrt(),
            ParamValue::Approx(x) => *x,
        }
    }

    /// √x, exact when x is a rational square.
    fn sqrt_of(x: &Rational) -> ParamValue {
        let (n, d) = (x.numer(), x.denom());
        if !n.is_negative() {
            let (rn, rd) = (n.sqrt(), d.sqrt());
            if &(&rn * &rn) == n && &(&rd * &rd) == d {
                return ParamValue::Rational(Rational::new(rn, rd));
            }
        }
        ParamValue::Sqrt(x.clone())
    }
}

impl fmt::Display for ParamValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ParamValue::Rational(x) => write!(f, "{}", fmt_rational(x)),
            ParamValue::Sqrt(x) => write!(f, "sqrt({})", fmt_rational(x)),
            ParamValue::Approx(x) => write!(f, "{x:.15}"),
        }
    }
}

/// A family name with parameter bindings.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct FamilyLabel {
    pub name: String,
    pub m: usize,
    pub n: usize,
    pub prime_count: usize,
    pub parameters: BTreeMap<String, ParamValue>,
}

impl FamilyLabel {
    /// A label with rational bindings, checked against the catalog.
    pub fn new(name: &str, params: &[(&str, Rational)]) -> Result<Self> {
        let rec = family(name)?;
        let mut parameters = BTreeMap::new();
        for (k, v) in params {
            if !rec.params.iter().any(|p| p == k) {
                return Err(Error::InvalidParameter(format!("{name} has no parameter `{k}`")));
            }
            parameters.insert(k.to_string(), ParamValue::Rational(v.clone()));
        }
        Ok(FamilyLabel { name: rec.name.clone(), m: rec.m, n: rec.n, prime_count: rec.prime_count(), parameters })
    }

    pub fn record(&self) -> Result<&'static FamilyRecord> {
        family(&self.name)
    }
}

impl fmt::Display for FamilyLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.name)?;
        if !self.parameters.is_empty() {
            let ps: Vec<String> = self.parameters.iter().map(|(k, v)| format!("{k}={v}")).collect();
            write!(f, " [{}]", ps.join(", "))?;
        }
        Ok(())
    }
}

/// How a pencil was reduced before matching.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Classification {
    pub label: FamilyLabel,
    pub zero_rows: usize,
    pub zero_cols: usize,
    pub transposed: bool,
    /// α when (A, αA + B) replaced the input to move infinite eigenvalues away.
    #[serde(serialize_with = "ser_opt_rational")]
    pub shift: Option<Rational>,
}

fn ser_opt_rational<S: serde::Serializer>(x: &Option<Rational>, s: S) -> std::result::Result<S::Ok, S::Error> {
    match x {
        Some(r) => s.serialize_some(&fmt_rational(r)),
        None => s.serialize_none(),
    }
}

fn rational_params(label: &FamilyLabel, rec: &FamilyRecord) -> Result<BTreeMap<String, Rational>> {
    let mut out = BTreeMap::new();
    for p in &rec.params {
        let v = label
            .parameters
            .get(p)
            .ok_or_else(|| Error::InvalidParameter(format!("{}: missing parameter `{p}`", rec.name)))?;
        let v = v
            .as_rational()
            .ok_or_else(|| Error::InvalidParameter(format!("{}: parameter `{p}` must be rational", rec.name)))?;
        out.insert(p.clone(), v.clone());
    }
    Ok(out)
}

fn build_block(b: &Block, value: &dyn Fn(&str) -> Result<Rational>) -> Result<Pencil> {
    Ok(match b {
        Block::Jordan { size, a } => Pencil::jordan(*size, &value(a)?),
        Block::Pair { k, a, b } => Pencil::q_block(*k, &value(a)?, &value(b)?)?,
        Block::L(k) => Pencil::l_block(*k),
        Block::R(k) => Pencil::r_block(*k),
    })
}

/// Checks the table captions: distinct eigenvalue symbols take distinct values,
/// the imaginary parameter of every Q block is nonzero.
fn check_constraints(rec: &FamilyRecord, vals: &BTreeMap<String, Rational>) -> Result<()> {
    let reals = rec.real_symbols();
    for (i, x) in reals.iter().enumerate() {
        for y in &reals[i + 1..] {
            if vals[x] == vals[y] {
                return Err(Error::InvalidParameter(format!("{}: {x} and {y} must differ", rec.name)));
            }
        }
    }
    let mut pairs: Vec<(String, String)> = vec![];
    for b in rec.blocks() {
        if let Block::Pair { a, b, .. } = b {
            if vals[&b].is_zero() {
                return Err(Error::InvalidParameter(format!("{}: {b} must be nonzero", rec.name)));
            }
            if !pairs.contains(&(a.clone(), b.clone())) {
                pairs.push((a, b));
            }
        }
    }
    for (i, (a1, b1)) in pairs.iter().enumerate() {
        for (a2, b2) in &pairs[i + 1..] {
            if vals[a1] == vals[a2] && vals[b1].abs() == vals[b2].abs() {
                return Err(Error::InvalidParameter(format!(
                    "{}: Q({a1},{b1}) and Q({a2},{b2}) must have different eigenvalues",
                    rec.name
                )));
            }
        }
    }
    Ok(())
}

/// The block-diagonal canonical form of a family with rational parameters.
pub fn canonical_representative(label: &FamilyLabel) -> Result<Pencil> {
    let rec = label.record()?;
    let vals = rational_params(label, rec)?;
    check_constraints(rec, &vals)?;
    let value = |s: &str| vals.get(s).cloned().ok_or_else(|| Error::InvalidParameter(format!("unbound `{s}`")));
    let mut parts = vec![];
    for b in rec.blocks() {
        parts.push(build_block(&b, &value)?);
    }
    Ok(Pencil::direct_sum_all(&parts))
}

/// The equivalent pencil listed for the family in the catalog, if any.
/// `a'` in the real-plus-pair family is bound to (a − c)/d.
pub fn listed_equivalent(label: &FamilyLabel) -> Result<Option<Pencil>> {
    let rec = label.record()?;
    let Some(specs) = &rec.equivalent else { return Ok(None) };
    let vals = rational_params(label, rec)?;
    let value = |s: &str| -> Result<Rational> {
        if let Some(x) = parse_rational(s) {
            return Ok(x);
        }
        if s == "a'" {
            let (a, c, d) = (&vals["a"], &vals["c"], &vals["d"]);
            return Ok((a - c) / d);
        }
        vals.get(s).cloned().ok_or_else(|| Error::InvalidParameter(format!("unbound `{s}`")))
    };
    let mut parts = vec![];
    for spec in specs {
        match spec.explicit()? {
            Some((a, b)) => parts.push(Pencil::new(a, b)?),
            None => {
                let BlockSpec::Named(s) = spec else { unreachable!() };
                parts.push(build_block(&Block::parse(s)?, &value)?);
            }
        }
    }
    Ok(Some(Pencil::direct_sum_all(&parts)))
}

/// (rank[A B], rank[Aᵀ Bᵀ], dim span{A, B}).
pub fn multilinear_rank(p: &Pencil) -> [usize; 3] {
    let r1 = p.a.hstack(&p.b).rank();
    let r2 = p.a.transpose().hstack(&p.b.transpose()).rank();
    let mn = p.m() * p.n();
    let flat = MatrixQ::from_fn(2, mn, |i, k| if i == 0 { p.a.data()[k].clone() } else { p.b.data()[k].clone() });
    [r1, r2, flat.rank()]
}

/// Tensor rank from the catalog.
pub fn tensor_rank_lookup(label: &FamilyLabel) -> Result<usize> {
    Ok(label.record()?.tensor_rank)
}

/// Value of `a` in J(a) for the eigenvalue −a, or of (c, d) in Q(c, d) for −c ± id.
fn bind_real(e: &Eigenvalue) -> ParamValue {
    match e {
        Eigenvalue::Rational(x) => ParamValue::Rational(-x.clone()),
        other => ParamValue::Approx(-other.approx().re),
    }
}

fn bind_pair(e: &Eigenvalue) -> (ParamValue, ParamValue) {
    let f = e.min_poly();
    if f.deg() == 2 {
        // λ² + pλ + q = (λ + p/2)² + (q − p²/4)
        let f = f.monic();
        let (p, q) = (f.coeff(1), f.coeff(0));
        let c = &p / rat(2);
        let d2 = &q - &c * &c;
        return (ParamValue::Rational(c), ParamValue::sqrt_of(&d2));
    }
    let z = e.approx();
    (ParamValue::Approx(-z.re), ParamValue::Approx(z.im.abs()))
}

#[derive(Clone, Debug)]
struct Group {
    pair: bool,
    syms: Vec<String>,
    sizes: Vec<usize>,
}

fn recipe_groups(rec: &FamilyRecord) -> (Vec<usize>, Vec<usize>, Vec<Group>) {
    let (mut ls, mut rs, mut groups): (Vec<usize>, Vec<usize>, Vec<Group>) = (vec![], vec![], vec![]);
    for b in rec.blocks() {
        let (pair, syms, size) = match b {
            Block::L(k) => {
                ls.push(k);
                continue;
            }
            Block::R(k) => {
                rs.push(k);
                continue;
            }
            Block::Jordan { size, a } => (false, vec![a], size),
            Block::Pair { k, a, b } => (true, vec![a, b], k),
        };
        match groups.iter_mut().find(|g| g.pair == pair && g.syms == syms) {
            Some(g) => g.sizes.push(size),
            None => groups.push(Group { pair, syms, sizes: vec![size] }),
        }
    }
    ls.sort_unstable();
    rs.sort_unstable();
    for g in groups.iter_mut() {
        g.sizes.sort_unstable_by(|a, b| b.cmp(a));
    }
    (ls, rs, groups)
}

fn assign(groups: &[Group], points: &[(Eigenvalue, Vec<usize>)], used: &mut Vec<bool>, out: &mut Vec<usize>) -> bool {
    let Some(g) = groups.get(out.len()) else { return true };
    for (i, (e, sizes)) in points.iter().enumerate() {
        let pair = matches!(e, Eigenvalue::ComplexPair { .. });
        if used[i] || pair != g.pair || *sizes != g.sizes {
            continue;
        }
        used[i] = true;
        out.push(i);
        if assign(groups, points, used, out) {
            return true;
        }
        out.pop();
        used[i] = false;
    }
    false
}

fn match_record(rec: &FamilyRecord, cols: &[usize], rows: &[usize], ks: &KroneckerStructure) -> Option<FamilyLabel> {
    let (ls, rs, groups) = recipe_groups(rec);
    if ls != cols || rs != rows || !ks.infinite_divisor_degrees.is_empty() {
        return None;
    }
    let points = ks.segre();
    if points.len() != groups.len() {
        return None;
    }
    let mut chosen = vec![];
    if !assign(&groups, &points, &mut vec![false; points.len()], &mut chosen) {
        return None;
    }
    let mut parameters = BTreeMap::new();
    for (g, &i) in groups.iter().zip(&chosen) {
        let e = &points[i].0;
        if g.pair {
            let (c, d) = bind_pair(e);
            parameters.insert(g.syms[0].clone(), c);
            parameters.insert(g.syms[1].clone(), d);
        } else {
            parameters.insert(g.syms[0].clone(), bind_real(e));
        }
    }
    Some(FamilyLabel { name: rec.name.clone(), m: rec.m, n: rec.n, prime_count: rec.prime_count(), parameters })
}

/// Family of a pencil of size at most 4×4, after stripping zero minimal indices,
/// transposing when needed and moving infinite eigenvalues to a finite point.
pub fn classify(p: &Pencil) -> Result<Classification> {
    if p.m() > MAX_DIM || p.n() > MAX_DIM {
        return Err(Error::OutOfCatalog);
    }
    let mut work = p.clone();
    let mut shift = None;
    if !crate::kcf::exact::infinite_structure(p).is_empty() {
        let nr = normal_rank(p);
        let alpha = (1i64..)
            .map(rat)
            .find(|al| p.a.combine(al, &p.b, &rat(1)).rank() == nr)
            .expect("only finitely many points drop rank");
        work = Pencil { a: p.a.clone(), b: p.a.combine(&alpha, &p.b, &rat(1)) };
        shift = Some(alpha);
    }
    let ks = kronecker_structure(&work, Field::Real);
    let zero_cols = ks.min_col_indices.iter().filter(|&&k| k == 0).count();
    let zero_rows = ks.min_row_indices.iter().filter(|&&k| k == 0).count();
    let cols: Vec<usize> = ks.min_col_indices.iter().copied().filter(|&k| k > 0).collect();
    let rows: Vec<usize> = ks.min_row_indices.iter().copied().filter(|&k| k > 0).collect();
    let (m, n) = (p.m() - zero_rows, p.n() - zero_cols);

    for transposed in [false, true] {
        let (mm, nn, c, r) = if transposed { (n, m, &rows, &cols) } else { (m, n, &cols, &rows) };
        if mm > nn {
            continue;
        }
        for rec in catalog().iter().filter(|f| f.m == mm && f.n == nn) {
            if let Some(label) = match_record(rec, c, r, &ks) {
                return Ok(Classification { label, zero_rows, zero_cols, transposed, shift });
            }
        }
    }
    Err(Error::Internal(format!("no catalog family matches a {}x{} pencil with structure\n{ks}", p.m(), p.n())))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::minrank::{minimal_ranks, MinimalRanks};

    fn q(x: i64) -> Rational {
        rat(x)
    }

    #[test]
    fn representatives_as_printed() {
        let l = FamilyLabel::new("R'4,2", &[("a", q(1))]).unwrap();
        let p = canonical_representative(&l).unwrap();
        assert_eq!(p, Pencil::jordan(2, &q(1)).direct_sum(&Pencil::jordan(2, &q(1))));
        let s = canonical_representative(&FamilyLabel::new("S1,1", &[]).unwrap()).unwrap();
        assert_eq!(s, Pencil::l_block(1));
        let r = canonical_representative(&FamilyLabel::new("R1,0", &[("a", q(0))]).unwrap()).unwrap();
        assert_eq!(r, Pencil::jordan(1, &q(0)));
    }

    #[test]
    fn caption_constraints() {
        let bad = FamilyLabel::new("R2,2", &[("a", q(0)), ("b", q(0))]).unwrap();
        assert!(canonical_representative(&bad).is_err());
        let bad = FamilyLabel::new("R1,1", &[("a1", q(2)), ("a2", q(2))]).unwrap();
        assert!(canonical_representative(&bad).is_err());
        let missing = FamilyLabel::new("R2,1", &[]).unwrap();
        assert!(canonical_representative(&missing).is_err());
    }

    #[test]
    fn classify_jordan_block() {
        let c = classify(&Pencil::jordan(2, &q(5))).unwrap();
        assert_eq!(c.label.name, "R2,1");
        assert_eq!(c.label.parameters["a"], ParamValue::Rational(q(5)));
        assert!(!c.transposed && c.shift.is_none());
    }

    #[test]
    fn classify_padded_pair() {
        let p = Pencil::zero(2, 2).direct_sum(&Pencil::q_block(1, &q(0), &q(1)).unwrap());
        let c = classify(&p).unwrap();
        assert_eq!(c.label.name, "R2,2");
        assert_eq!((c.zero_rows, c.zero_cols), (2, 2));
        assert_eq!(c.label.parameters["b"], ParamValue::Rational(q(1)));
    }

    #[test]
    fn classify_transposed_singular() {
        let c = classify(&Pencil::l_block(1).direct_sum(&Pencil::r_block(2))).unwrap();
        assert_eq!(c.label.name, "S''3,3");
        assert!(c.transposed);
        let c = classify(&Pencil::r_block(1).direct_sum(&Pencil::l_block(2))).unwrap();
        assert_eq!(c.label.name, "S''3,3");
        assert!(!c.transposed);
        let c = classify(&Pencil::r_block(2)).unwrap();
        assert_eq!(c.label.name, "S2,2");
        assert!(c.transposed);
    }

    #[test]
    fn classify_infinite_divisor() {
        let c = classify(&Pencil::infinite_block(2)).unwrap();
        assert_eq!(c.label.name, "R2,1");
        assert!(c.shift.is_some());
        assert_eq!(classify(&Pencil::zero(3, 2)).unwrap().label.name, "Z0,0");
        assert!(matches!(classify(&Pencil::zero(5, 5)), Err(Error::OutOfCatalog)));
    }

    #[test]
    fn irrational_pair_parameter() {
        // λ² + 2λ + 3: c = 1, d = √2
        let c = classify(&Pencil::regular(MatrixQ::from_ints(2, 2, &[0, -3, 1, 2]))).unwrap();
        assert_eq!(c.label.name, "R2,2");
        assert_eq!(c.label.parameters["a"], ParamValue::Rational(q(1)));
        assert_eq!(c.label.parameters["b"], ParamValue::Sqrt(q(2)));
    }

    #[test]
    fn multilinear_ranks() {
        let p = Pencil::jordan(1, &q(3)).direct_sum(&Pencil::jordan(1, &q(3)));
        assert_eq!(multilinear_rank(&p), [2, 2, 1]);
        assert_eq!(multilinear_rank(&Pencil::l_block(1).direct_sum(&Pencil::l_block(1))), [2, 4, 2]);
        assert_eq!(multilinear_rank(&Pencil::zero(2, 2)), [0, 0, 0]);
    }

    #[test]
    fn catalog_columns_regenerate() {
        for rec in catalog() {
            let params: Vec<(&str, Rational)> = rec.params.iter().enumerate().map(|(i, s)| (s.as_str(), q(i as i64 + 1))).collect();
            let label = FamilyLabel::new(&rec.name, &params).unwrap();
            let p = canonical_representative(&label).unwrap();
            assert_eq!((p.m(), p.n()), (rec.m, rec.n), "{}", rec.name);
            assert_eq!(minimal_ranks(&p, Field::Real), MinimalRanks { r: rec.rho[0], s: rec.rho[1] }, "{}", rec.name);
            assert_eq!(multilinear_rank(&p), rec.multilinear_rank, "{}", rec.name);
            assert_eq!(classify(&p).unwrap().label.name, rec.name);
        }
    }
}
