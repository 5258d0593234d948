//! The pencil document format.
//!
//! ```text
//! # comment lines start with '#'
//! dims 3 3
//! mode rational
//! A
//! 1 1 0
//! 0 1 1
//! 0 0 1
//! B
//! 1 0 0
//! 0 1 0
//! 0 0 1
//! ```
//!
//! `dims m n [d]` gives the shape and the number d ≥ 2 of coefficients
//! (default 2); `mode` is `rational` or `float`; float documents may add
//! `tolerance t`. Coefficient sections are named `A`, `B`, `A3`, …, `Ad` and appear in that
//! order, each followed by m rows of n entries. Rational entries are integers
//! or `p/q`; float entries are decimals. Trailing `#` comments are not allowed
//! on data lines. Raw tokens are kept so a parsed file is written back
//! unchanged up to whitespace.

use std::fmt;

use nalgebra::DMatrix;
use pencilrank::exact::rational::{fmt_rational, parse_rational};
use pencilrank::exact::{MatrixQ, Rational};
use pencilrank::pencil::{FloatPencil, Pencil};
use pencilrank::polyrank::MatrixPolynomial;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum EntryMode {
    Rational,
    Float,
}

impl fmt::Display for EntryMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            EntryMode::Rational => "rational",
            EntryMode::Float => "float",
        })
    }
}

/// Parse failure at a 1-based line and column.
#[derive(Debug, Clone, PartialEq)]
pub struct DocError {
    pub line: usize,
    pub col: usize,
    pub msg: String,
}

impl fmt::Display for DocError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "line {}, column {}: {}", self.line, self.col, self.msg)
    }
}

impl std::error::Error for DocError {}

#[derive(Clone, Debug, PartialEq)]
enum Item {
    Comment(String),
    Dims,
    Mode,
    Tolerance,
    Header(usize),
    Row(usize, usize),
}

#[derive(Clone, Debug, PartialEq)]
pub struct PencilDocument {
    pub m: usize,
    pub n: usize,
    pub d: usize,
    pub mode: EntryMode,
    pub tolerance: Option<f64>,
    explicit_d: bool,
    tolerance_raw: Option<String>,
    /// Raw entry tokens per coefficient, row-major.
    raw: Vec<Vec<Vec<String>>>,
    layout: Vec<Item>,
}

pub fn section_name(k: usize) -> String {
    match k {
        0 => "A".into(),
        1 => "B".into(),
        _ => format!("A{}", k + 1),
    }
}

fn is_rational_literal(tok: &str) -> bool {
    let int = |s: &str| {
        let s = s.strip_prefix(['-', '+']).unwrap_or(s);
        !s.is_empty() && s.chars().all(|c| c.is_ascii_digit())
    };
    match tok.split_once('/') {
        Some((p, q)) => int(p) && !q.is_empty() && q.chars().all(|c| c.is_ascii_digit()),
        None => int(tok),
    }
}

fn parse_float(tok: &str) -> Option<f64> {
    tok.parse::<f64>().ok().filter(|x| x.is_finite())
}

/// Tokens of a line with their 1-based columns.
fn tokens(line: &str) -> Vec<(usize, &str)> {
    let mut out = vec![];
    let mut start = None;
    for (col, c) in line.char_indices() {
        if c.is_whitespace() {
            if let Some((s, sc)) = start.take() {
                out.push((sc, &line[s..col]));
            }
        } else if start.is_none() {
            start = Some((col, line[..col].chars().count() + 1));
        }
    }
    if let Some((s, sc)) = start {
        out.push((sc, &line[s..]));
    }
    out
}

impl PencilDocument {
    pub fn parse(text: &str) -> Result<Self, DocError> {
        let err = |line: usize, col: usize, msg: String| DocError { line, col, msg };
        let mut dims: Option<(usize, usize, usize, bool)> = None;
        let mut mode: Option<EntryMode> = None;
        let mut tolerance: Option<(f64, String, usize)> = None;
        let mut raw: Vec<Vec<Vec<String>>> = vec![];
        let mut layout = vec![];
        let mut current: Option<usize> = None;
        let mut last_line = 0;

        for (idx, line) in text.lines().enumerate() {
            let ln = idx + 1;
            last_line = ln;
            let toks = tokens(line);
            let Some(&(col0, first)) = toks.first() else { continue };
            if first.starts_with('#') {
                layout.push(Item::Comment(line.trim().to_string()));
                continue;
            }
            if let Some(&(c, _)) = toks.iter().skip(1).find(|(_, t)| t.starts_with('#')) {
                return Err(err(ln, c, "comments must be on their own line".into()));
            }
            match first {
                "dims" => {
                    if dims.is_some() {
                        return Err(err(ln, col0, "duplicate `dims`".into()));
                    }
                    if !(3..=4).contains(&toks.len()) {
                        return Err(err(ln, col0, "expected `dims m n` or `dims m n d`".into()));
                    }
                    let mut v = vec![];
                    for &(c, t) in &toks[1..] {
                        match t.parse::<usize>() {
                            Ok(x) if x > 0 => v.push(x),
                            _ => return Err(err(ln, c, format!("expected a positive integer, found `{t}`"))),
                        }
                    }
                    if v.len() == 3 && v[2] < 2 {
                        return Err(err(ln, toks[3].0, "d must be at least 2".into()));
                    }
                    dims = Some((v[0], v[1], v.get(2).copied().unwrap_or(2), v.len() == 3));
                    layout.push(Item::Dims);
                }
                "mode" => {
                    if mode.is_some() {
                        return Err(err(ln, col0, "duplicate `mode`".into()));
                    }
                    mode = Some(match toks.get(1).map(|x| x.1) {
                        Some("rational") if toks.len() == 2 => EntryMode::Rational,
                        Some("float") if toks.len() == 2 => EntryMode::Float,
                        _ => return Err(err(ln, col0, "expected `mode rational` or `mode float`".into())),
                    });
                    layout.push(Item::Mode);
                }
                "tolerance" => {
                    if tolerance.is_some() {
                        return Err(err(ln, col0, "duplicate `tolerance`".into()));
                    }
                    let Some(&(c, t)) = toks.get(1).filter(|_| toks.len() == 2) else {
                        return Err(err(ln, col0, "expected `tolerance t`".into()));
                    };
                    match parse_float(t) {
                        Some(x) if x > 0.0 => tolerance = Some((x, t.to_string(), ln)),
                        _ => return Err(err(ln, c, format!("tolerance must be a positive decimal, found `{t}`"))),
                    }
                    layout.push(Item::Tolerance);
                }
                _ if toks.len() == 1 && first.starts_with(|c: char| c.is_ascii_alphabetic()) => {
                    let Some((m, _, d, _)) = dims else {
                        return Err(err(ln, col0, "`dims` must precede the coefficient sections".into()));
                    };
                    if mode.is_none() {
                        return Err(err(ln, col0, "`mode` must precede the coefficient sections".into()));
                    }
                    let k = raw.len();
                    if let Some(prev) = current {
                        if raw[prev].len() != m {
                            return Err(err(ln, col0, format!("section {} has {} rows, expected {m}", section_name(prev), raw[prev].len())));
                        }
                    }
                    if k >= d {
                        return Err(err(ln, col0, format!("unexpected section `{first}`: dims declare {d} coefficients")));
                    }
                    if first != section_name(k) {
                        return Err(err(ln, col0, format!("expected section `{}`, found `{first}`", section_name(k))));
                    }
                    raw.push(vec![]);
                    current = Some(k);
                    layout.push(Item::Header(k));
                }
                _ => {
                    let Some(k) = current else {
                        return Err(err(ln, col0, format!("unexpected `{first}` before any coefficient section")));
                    };
                    let (m, n, _, _) = dims.expect("sections follow dims");
                    let mode = mode.expect("sections follow mode");
                    if raw[k].len() == m {
                        return Err(err(ln, col0, format!("section {} already has {m} rows", section_name(k))));
                    }
                    if toks.len() != n {
                        let c = toks.get(n).map_or(line.chars().count() + 1, |x| x.0);
                        return Err(err(ln, c, format!("expected {n} entries, found {}", toks.len())));
                    }
                    for &(c, t) in &toks {
                        let ok = match mode {
                            EntryMode::Rational => is_rational_literal(t) && parse_rational(t).is_some(),
                            EntryMode::Float => parse_float(t).is_some(),
                        };
                        if !ok {
                            return Err(err(ln, c, format!("invalid {mode} entry `{t}`")));
                        }
                    }
                    layout.push(Item::Row(k, raw[k].len()));
                    raw[k].push(toks.iter().map(|x| x.1.to_string()).collect());
                }
            }
        }

        let end = last_line + 1;
        let (m, n, d, explicit_d) = dims.ok_or_else(|| err(end, 1, "missing `dims`".into()))?;
        let mode = mode.ok_or_else(|| err(end, 1, "missing `mode`".into()))?;
        if let Some(k) = current {
            if raw[k].len() != m {
                return Err(err(end, 1, format!("section {} has {} rows, expected {m}", section_name(k), raw[k].len())));
            }
        }
        if raw.len() != d {
            return Err(err(end, 1, format!("missing section `{}`", section_name(raw.len()))));
        }
        if let (EntryMode::Rational, Some(t)) = (mode, &tolerance) {
            return Err(err(t.2, 1, "`tolerance` applies to float documents only".into()));
        }
        Ok(PencilDocument {
            m,
            n,
            d,
            mode,
            tolerance: tolerance.as_ref().map(|t| t.0),
            explicit_d,
            tolerance_raw: tolerance.map(|t| t.1),
            raw,
            layout,
        })
    }

    /// A rational document for the given coefficients, with leading comments.
    pub fn from_coefficients(coeffs: &[MatrixQ], comments: &[String]) -> Self {
        let (m, n) = (coeffs[0].rows(), coeffs[0].cols());
        let mut layout: Vec<Item> = comments.iter().map(|c| Item::Comment(format!("# {c}"))).collect();
        layout.extend([Item::Dims, Item::Mode]);
        let mut raw = vec![];
        for (k, c) in coeffs.iter().enumerate() {
            layout.push(Item::Header(k));
            let rows: Vec<Vec<String>> =
                (0..m).map(|i| (0..n).map(|j| fmt_rational(&c[(i, j)])).collect()).collect();
            layout.extend((0..m).map(|i| Item::Row(k, i)));
            raw.push(rows);
        }
        let d = coeffs.len();
        PencilDocument {
            m,
            n,
            d,
            mode: EntryMode::Rational,
            tolerance: None,
            explicit_d: d != 2,
            tolerance_raw: None,
            raw,
            layout,
        }
    }

    pub fn from_pencil(p: &Pencil, comments: &[String]) -> Self {
        Self::from_coefficients(&[p.a.clone(), p.b.clone()], comments)
    }

    pub fn comments(&self) -> Vec<&str> {
        self.layout
            .iter()
            .filter_map(|x| match x {
                Item::Comment(c) => Some(c.as_str()),
                _ => None,
            })
            .collect()
    }

    /// Exact coefficients; float entries are converted exactly from their decimals.
    pub fn exact_coefficients(&self) -> Vec<MatrixQ> {
        self.raw
            .iter()
            .map(|rows| {
                MatrixQ::from_fn(self.m, self.n, |i, j| parse_rational(&rows[i][j]).expect("validated on parse"))
            })
            .collect()
    }

    pub fn float_coefficients(&self) -> Vec<DMatrix<f64>> {
        self.raw
            .iter()
            .map(|rows| DMatrix::from_fn(self.m, self.n, |i, j| parse_float(&rows[i][j]).expect("validated on parse")))
            .collect()
    }

    pub fn exact_pencil(&self) -> Option<Pencil> {
        let c = self.exact_coefficients();
        (self.d == 2).then(|| Pencil::new(c[0].clone(), c[1].clone()).expect("same shape"))
    }

    pub fn float_pencil(&self, tolerance: f64) -> Option<FloatPencil> {
        let c = self.float_coefficients();
        (self.d == 2).then(|| FloatPencil::new(c[0].clone(), c[1].clone(), tolerance).expect("same shape, positive tolerance"))
    }

    pub fn polynomial(&self) -> MatrixPolynomial {
        MatrixPolynomial::new(self.exact_coefficients()).expect("same shapes")
    }

    pub fn entry(&self, k: usize, i: usize, j: usize) -> Rational {
        parse_rational(&self.raw[k][i][j]).expect("validated on parse")
    }
}

impl fmt::Display for PencilDocument {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for item in &self.layout {
            match item {
                Item::Comment(c) => writeln!(f, "{c}")?,
                Item::Dims if self.explicit_d => writeln!(f, "dims {} {} {}", self.m, self.n, self.d)?,
                Item::Dims => writeln!(f, "dims {} {}", self.m, self.n)?,
                Item::Mode => writeln!(f, "mode {}", self.mode)?,
                Item::Tolerance => writeln!(f, "tolerance {}", self.tolerance_raw.as_deref().unwrap_or_default())?,
                Item::Header(k) => writeln!(f, "{}", section_name(*k))?,
                Item::Row(k, i) => writeln!(f, "{}", self.raw[*k][*i].join(" "))?,
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const J3: &str = "# J3(1) + λE\ndims 3 3\nmode rational\nA\n1 1 0\n0 1 1\n0 0 1\nB\n1 0 0\n0 1 0\n0 0 1\n";

    #[test]
    fn round_trip() {
        let doc = PencilDocument::parse(J3).unwrap();
        assert_eq!(doc.to_string(), J3);
        assert_eq!(doc.comments(), vec!["# J3(1) + λE"]);
        let p = doc.exact_pencil().unwrap();
        assert_eq!(p, Pencil::jordan(3, &pencilrank::exact::rational::rat(1)));
    }

    #[test]
    fn errors_carry_positions() {
        let bad = J3.replace("0 1 1\n0 0 1\nB", "0 1 1\n0 x 1\nB");
        let e = PencilDocument::parse(&bad).unwrap_err();
        assert_eq!((e.line, e.col), (7, 3));
        let short = J3.replace("0 0 1\nB", "0 0\nB");
        let e = PencilDocument::parse(&short).unwrap_err();
        assert_eq!(e.line, 7);
        let e = PencilDocument::parse("dims 2 2\nmode rational\nA\n1 0\n0 1\n").unwrap_err();
        assert!(e.msg.contains("missing section `B`"), "{e}");
        let e = PencilDocument::parse("mode float\nA\n").unwrap_err();
        assert_eq!((e.line, e.col), (2, 1));
        assert!(PencilDocument::parse("dims 1 1\nmode rational\nA\n1.5\nB\n1\n").is_err());
        assert!(PencilDocument::parse("dims 1 1\nmode rational\ntolerance 1e-3\nA\n1\nB\n1\n").is_err());
    }

    #[test]
    fn float_and_polynomial_documents() {
        let doc = PencilDocument::parse("dims 1 2\nmode float\ntolerance 1e-6\nA\n0.5 -2e-3\nB\n1 0\n").unwrap();
        assert_eq!(doc.tolerance, Some(1e-6));
        assert_eq!(doc.float_coefficients()[0][(0, 1)], -2e-3);
        let poly = PencilDocument::parse("dims 1 1 3\nmode rational\nA\n1\nB\n2/3\nA3\n-1\n").unwrap();
        assert_eq!(poly.polynomial().d(), 3);
        assert!(poly.exact_pencil().is_none());
        assert_eq!(poly.to_string(), "dims 1 1 3\nmode rational\nA\n1\nB\n2/3\nA3\n-1\n");
    }
}
