use std::path::PathBuf;

use num_complex::Complex64;
use pencilrank::classify::{classify, multilinear_rank, tensor_rank_lookup};
use pencilrank::kcf::{
    kronecker_structure, multilinear_rank_numeric, rank_at, staircase_structure, Field, KroneckerStructure,
};
use pencilrank::minrank::{attain_numeric, attain_transform, minimal_ranks_numeric, AttainingTransform, ProjectivePoint};
use pencilrank::polyrank::poly_minimal_ranks;
use pencilrank_cli::document::{EntryMode, PencilDocument};
use serde_json::{json, Value};

use crate::{read_document, CmdResult, Failure, FieldArg};

pub const DEFAULT_TOLERANCE: f64 = 1e-8;

#[derive(clap::Args, Debug)]
pub struct AnalyzeArgs {
    /// Pencil document
    pub file: PathBuf,
    /// Field over which elementary divisors are split
    #[arg(long, value_enum, default_value = "real")]
    pub field: FieldArg,
    /// Rank tolerance for float documents (overrides the document's own)
    #[arg(long)]
    pub tolerance: Option<f64>,
    /// Print the report as JSON
    #[arg(long)]
    pub json: bool,
}

fn field_name(f: Field) -> &'static str {
    match f {
        Field::Real => "real",
        Field::Complex => "complex",
    }
}

fn structure_json<E: std::fmt::Display>(ks: &KroneckerStructure<E>) -> Value {
    json!({
        "normal_rank": ks.normal_rank,
        "min_col_indices": ks.min_col_indices,
        "min_row_indices": ks.min_row_indices,
        "finite_divisors": ks.finite_divisors.iter()
            .map(|(e, p)| json!({"eigenvalue": e.to_string(), "power": p}))
            .collect::<Vec<_>>(),
        "infinite_divisor_degrees": ks.infinite_divisor_degrees,
    })
}

fn fmt_complex(z: Complex64) -> String {
    if z.im == 0.0 {
        format!("{}", z.re)
    } else {
        format!("{}{:+}i", z.re, z.im)
    }
}

/// Fills `rep` for a rational pencil.
fn exact_pencil(doc: &PencilDocument, field: Field, rep: &mut serde_json::Map<String, Value>) -> CmdResult {
    let p = doc.exact_pencil().expect("d = 2");
    let ks = kronecker_structure(&p, field);
    ks.check_budget(p.m(), p.n()).map_err(Failure::Internal)?;
    let (t, rho) = attain_transform(&p, field)?;
    let rows = match &t {
        AttainingTransform::Rational(g) => [
            ProjectivePoint::Rational { t: g.t11.clone(), u: g.t12.clone() },
            ProjectivePoint::Rational { t: g.t21.clone(), u: g.t22.clone() },
        ],
        AttainingTransform::Algebraic { rows, .. } => rows.clone(),
    };
    let attained = [rows[0].rank(&p), rows[1].rank(&p)];
    if attained != [rho.r, rho.s] {
        return Err(Failure::Internal(format!("transform attains {attained:?}, expected ({}, {})", rho.r, rho.s)));
    }
    rep.insert("normal_rank".into(), json!(ks.normal_rank));
    rep.insert("structure".into(), structure_json(&ks));
    rep.insert("minimal_ranks".into(), json!({"r": rho.r, "s": rho.s}));
    rep.insert("attaining_transform".into(), json!(t.decimal()));
    rep.insert("attained_ranks".into(), json!(attained));
    rep.insert("multilinear_rank".into(), json!(multilinear_rank(&p)));
    if p.m() <= 4 && p.n() <= 4 {
        let c = classify(&p)?;
        rep.insert("family".into(), json!(c.label.to_string()));
        rep.insert("tensor_rank".into(), json!(tensor_rank_lookup(&c.label)?));
    } else {
        rep.insert("family".into(), json!("out of catalog"));
        rep.insert("tensor_rank".into(), Value::Null);
    }
    Ok(())
}

fn float_pencil(
    doc: &PencilDocument,
    field: Field,
    tolerance: f64,
    rep: &mut serde_json::Map<String, Value>,
    warnings: &mut Vec<String>,
) -> CmdResult {
    let fp = doc.float_pencil(tolerance).expect("d = 2");
    let ns = staircase_structure(&fp, field);
    let ks = &ns.structure;
    if ns.ill_conditioned {
        warnings.push("some singular value lies within a factor 10 of the threshold".into());
    }
    if ns.inconsistent {
        warnings.push("degree bookkeeping did not close; eigenvalues may be lost or spurious".into());
    }
    let rho = minimal_ranks_numeric(ks);
    let rows = attain_numeric(ks);
    let attained = rows.map(|[t, u]| rank_at(&fp, t, u, ns.threshold));
    rep.insert("normal_rank".into(), json!(ks.normal_rank));
    rep.insert("structure".into(), structure_json(ks));
    rep.insert("threshold".into(), json!(ns.threshold));
    rep.insert("minimal_ranks".into(), json!({"r": rho.r, "s": rho.s}));
    rep.insert("attaining_transform".into(), json!(rows.map(|r| r.map(fmt_complex))));
    rep.insert("attained_ranks".into(), json!(attained));
    rep.insert("multilinear_rank".into(), json!(multilinear_rank_numeric(&fp, ns.threshold)));
    rep.insert("family".into(), json!("not classified (float entries)"));
    rep.insert("tensor_rank".into(), Value::Null);
    Ok(())
}

fn polynomial(doc: &PencilDocument, rep: &mut serde_json::Map<String, Value>) -> CmdResult {
    let dec = poly_minimal_ranks(&doc.polynomial())?;
    rep.insert(
        "polynomial_ranks".into(),
        json!({
            "tuple": dec.tuple,
            "certified": dec.certified,
            "subspaces": dec.subspaces.iter().map(|s| json!({
                "rank": s.rank,
                "basis": s.basis.iter().map(|b| b.to_string()).collect::<Vec<_>>(),
            })).collect::<Vec<_>>(),
        }),
    );
    Ok(())
}

fn render_text(rep: &serde_json::Map<String, Value>) -> String {
    let mut out = String::new();
    let mut line = |s: String| {
        out.push_str(&s);
        out.push('\n');
    };
    let get = |k: &str| rep.get(k).cloned().unwrap_or(Value::Null);
    let dims = get("dims");
    line(format!(
        "pencil: {}×{}, d = {}, {} entries, field {}",
        dims[0], dims[1], get("d"), get("mode").as_str().unwrap_or(""), get("field").as_str().unwrap_or("")
    ));
    if let Some(t) = rep.get("tolerance").filter(|t| !t.is_null()) {
        line(format!("tolerance: {t}"));
    }
    if let Some(pr) = rep.get("polynomial_ranks") {
        line(format!("minimal rank tuple: {}", pr["tuple"]));
        line(format!("certified: {}", pr["certified"]));
        for s in pr["subspaces"].as_array().into_iter().flatten() {
            let basis: Vec<&str> = s["basis"].as_array().into_iter().flatten().filter_map(|b| b.as_str()).collect();
            line(format!("  rank {} on span {{{}}}", s["rank"], basis.join(", ")));
        }
    } else {
        let ks = &rep["structure"];
        line(format!("normal rank: {}", ks["normal_rank"]));
        line(format!("minimal column indices: {}", ks["min_col_indices"]));
        line(format!("minimal row indices: {}", ks["min_row_indices"]));
        let divs = ks["finite_divisors"].as_array().cloned().unwrap_or_default();
        if divs.is_empty() {
            line("finite elementary divisors: none".into());
        } else {
            line("finite elementary divisors:".into());
            for d in divs {
                line(format!("  {}  power {}", d["eigenvalue"].as_str().unwrap_or(""), d["power"]));
            }
        }
        line(format!("infinite elementary divisor degrees: {}", ks["infinite_divisor_degrees"]));
        let rho = &rep["minimal_ranks"];
        line(format!("minimal ranks: ({}, {})", rho["r"], rho["s"]));
        let t = &rep["attaining_transform"];
        let cell = |i: usize, j: usize| t[i][j].as_str().unwrap_or("").to_string();
        line(format!("attaining transform: [[{}, {}], [{}, {}]]", cell(0, 0), cell(0, 1), cell(1, 0), cell(1, 1)));
        line(format!("attained ranks: {}", rep["attained_ranks"]));
        line(format!("multilinear rank: {}", rep["multilinear_rank"]));
        line(format!("family: {}", rep["family"].as_str().unwrap_or("")));
        if let Some(r) = rep.get("tensor_rank").and_then(Value::as_u64) {
            line(format!("tensor rank: {r}"));
        }
    }
    out
}

pub fn analyze(doc: &PencilDocument, field: Field, tolerance: Option<f64>) -> Result<Value, Failure> {
    let mut rep = serde_json::Map::new();
    let mut warnings = vec![];
    rep.insert("dims".into(), json!([doc.m, doc.n]));
    rep.insert("d".into(), json!(doc.d));
    rep.insert("mode".into(), json!(doc.mode.to_string()));
    match (doc.mode, doc.d) {
        (EntryMode::Rational, 2) => {
            if tolerance.is_some() {
                warnings.push("tolerance ignored: the document has rational entries".into());
            }
            rep.insert("field".into(), json!(field_name(field)));
            rep.insert("tolerance".into(), Value::Null);
            exact_pencil(doc, field, &mut rep)?;
        }
        (EntryMode::Float, 2) => {
            let tol = match tolerance.or(doc.tolerance) {
                Some(t) if t > 0.0 && t.is_finite() => t,
                Some(t) => return Err(Failure::Input(format!("tolerance must be positive, got {t}"))),
                None => {
                    warnings.push(format!("no tolerance given; using {DEFAULT_TOLERANCE:e}"));
                    DEFAULT_TOLERANCE
                }
            };
            rep.insert("field".into(), json!(field_name(field)));
            rep.insert("tolerance".into(), json!(tol));
            float_pencil(doc, field, tol, &mut rep, &mut warnings)?;
        }
        (EntryMode::Rational, _) => {
            if field == Field::Complex {
                warnings.push("polynomial ranks are computed over the reals".into());
            }
            rep.insert("field".into(), json!("real"));
            rep.insert("tolerance".into(), Value::Null);
            polynomial(doc, &mut rep)?;
        }
        (EntryMode::Float, _) => {
            return Err(Failure::Input("polynomial ranks (d ≥ 3) need rational entries".into()));
        }
    }
    rep.insert("warnings".into(), json!(warnings));
    Ok(Value::Object(rep))
}

pub fn run(args: &AnalyzeArgs) -> CmdResult {
    let doc = read_document(&args.file)?;
    let rep = analyze(&doc, args.field.into(), args.tolerance)?;
    for w in rep["warnings"].as_array().into_iter().flatten() {
        eprintln!("warning: {}", w.as_str().unwrap_or(""));
    }
    if args.json {
        println!("{}", serde_json::to_string_pretty(&rep).expect("plain JSON values"));
    } else {
        print!("{}", render_text(rep.as_object().expect("object")));
    }
    Ok(())
}
