//! The family catalog, shipped as versioned JSON and parsed once.

use std::sync::OnceLock;

use serde::Deserialize;

use crate::error::{Error, Result};
use crate::exact::rational::parse_rational;
use crate::exact::MatrixQ;

const CATALOG_JSON: &str = include_str!("catalog.json");
pub const CATALOG_VERSION: u32 = 1;

/// One canonical block of a recipe.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Block {
    /// J_size(sym) + λE.
    Jordan { size: usize, a: String },
    /// Q_{2k}(a, b) + λE.
    Pair { k: usize, a: String, b: String },
    L(usize),
    R(usize),
}

impl Block {
    pub fn parse(s: &str) -> Result<Block> {
        let bad = || Error::Internal(format!("bad catalog block `{s}`"));
        let s = s.trim();
        let (head, args) = match s.find('(') {
            Some(i) => (&s[..i], Some(s[i + 1..].strip_suffix(')').ok_or_else(bad)?)),
            None => (s, None),
        };
        let kind = head.chars().next().ok_or_else(bad)?;
        let size: usize = head[1..].parse().map_err(|_| bad())?;
        let args: Vec<String> = args.map(|a| a.split(',').map(|x| x.trim().to_string()).collect()).unwrap_or_default();
        match (kind, args.len()) {
            ('J', 1) => Ok(Block::Jordan { size, a: args[0].clone() }),
            ('Q', 2) if size % 2 == 0 => Ok(Block::Pair { k: size / 2, a: args[0].clone(), b: args[1].clone() }),
            ('L', 0) => Ok(Block::L(size)),
            ('R', 0) => Ok(Block::R(size)),
            _ => Err(bad()),
        }
    }
}

/// A block of an equivalent pencil: a recipe block or explicit matrices.
#[derive(Clone, Debug, Deserialize)]
#[serde(untagged)]
pub enum BlockSpec {
    Named(String),
    Explicit { a: Vec<Vec<String>>, b: Vec<Vec<String>> },
}

fn matrix(rows: &[Vec<String>]) -> Result<MatrixQ> {
    let parsed: Option<Vec<Vec<_>>> = rows.iter().map(|r| r.iter().map(|x| parse_rational(x)).collect()).collect();
    let parsed = parsed.ok_or_else(|| Error::Internal("bad rational in catalog".into()))?;
    Ok(MatrixQ::from_rows(&parsed))
}

impl BlockSpec {
    pub(crate) fn explicit(&self) -> Result<Option<(MatrixQ, MatrixQ)>> {
        match self {
            BlockSpec::Named(_) => Ok(None),
            BlockSpec::Explicit { a, b } => Ok(Some((matrix(a)?, matrix(b)?))),
        }
    }
}

/// One row of the tables.
#[derive(Clone, Debug, Deserialize)]
pub struct FamilyRecord {
    pub name: String,
    pub table: u8,
    pub m: usize,
    pub n: usize,
    pub tensor_rank: usize,
    pub multilinear_rank: [usize; 3],
    pub rho: [usize; 2],
    pub params: Vec<String>,
    pub recipe: Vec<String>,
    #[serde(default)]
    pub equivalent: Option<Vec<BlockSpec>>,
    #[serde(default)]
    pub note: Option<String>,
}

impl FamilyRecord {
    pub fn blocks(&self) -> Vec<Block> {
        self.recipe.iter().map(|b| Block::parse(b).expect("catalog recipes are validated at load")).collect()
    }

    pub fn prime_count(&self) -> usize {
        self.name.chars().filter(|&c| c == '\'').count()
    }

    /// Symbols naming a real eigenvalue, in first-use order.
    pub fn real_symbols(&self) -> Vec<String> {
        let mut out: Vec<String> = vec![];
        for b in self.blocks() {
            if let Block::Jordan { a, .. } = b {
                if !out.contains(&a) {
                    out.push(a);
                }
            }
        }
        out
    }
}

#[derive(Deserialize)]
struct CatalogFile {
    format: String,
    version: u32,
    families: Vec<FamilyRecord>,
}

/// The parsed catalog.
pub fn catalog() -> &'static [FamilyRecord] {
    static CATALOG: OnceLock<Vec<FamilyRecord>> = OnceLock::new();
    CATALOG.get_or_init(|| {
        let file: CatalogFile = serde_json::from_str(CATALOG_JSON).expect("catalog.json parses");
        assert_eq!(file.format, "pencil-family-catalog");
        assert_eq!(file.version, CATALOG_VERSION, "catalog version mismatch");
        for f in &file.families {
            for b in &f.recipe {
                Block::parse(b).unwrap_or_else(|e| panic!("{}: {e}", f.name));
            }
        }
        file.families
    })
}

/// Looks a family up by its ASCII id (e.g. `R'3,2`).
pub fn family(name: &str) -> Result<&'static FamilyRecord> {
    catalog().iter().find(|f| f.name == name).ok_or_else(|| Error::UnknownFamily(name.to_string()))
}
