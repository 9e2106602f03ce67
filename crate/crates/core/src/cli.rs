//! Command-line dispatcher. Every command reads one JSON document (a file
//! argument, or standard input when the argument is absent or "-") and
//! writes one JSON document.
//!
//! Exit codes: 0 success, 2 validation failure, 3 parse error or bad
//! usage, 1 I/O failure.

use std::io::{Read, Write};
use std::path::PathBuf;

use clap::{Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use crate::cases::{
    admissibility, all_cases, compiled_table, construct, inoue_from_integer_matrix, table_cases, validate, CaseId,
    FamilyParams, FamilyTag, TableEntry,
};
use crate::classify::{classify_element, eigenvalues};
use crate::error::Error;
use crate::json::*;
use crate::lattice::Discreteness;
use crate::parabolic::{canonical_check, canonicalize_core, recognize_form, ParabolicForm};
use crate::proj::ProjMatrix;
use crate::scalar::Tol;
use crate::witness::{
    cone_invariance_check, escape_witness, layer_decompose_with, normality_check, BallLimits, GroupPresentation,
};

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Mode {
    Exact,
    Float,
}

#[derive(Debug, Parser)]
#[command(name = "ktri", version, about = "Upper-triangular subgroups of PSL(3,C)")]
pub struct Cli {
    /// Arithmetic for the input matrices; float converts exact entries.
    #[arg(long, global = true, value_enum, default_value = "exact")]
    pub mode: Mode,
    /// Relative float tolerance (the absolute one is 1e-3 of it).
    #[arg(long, global = true)]
    pub tol: Option<f64>,
    /// Word length of the balls used by decompose, verify and the checks.
    #[arg(long, global = true, default_value_t = 4)]
    pub ball: usize,
    /// Write the JSON document here instead of standard output.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Classify one element: a matrix, or {"matrix": m}.
    Classify { input: Option<PathBuf> },
    /// Layer ranks (k, r, m, n) of {"generators": [...]}.
    Decompose { input: Option<PathBuf> },
    /// Conjugate one or two Core-shaped generators to a form Γ1…Γ5.
    Canonicalize { input: Option<PathBuf> },
    /// Match a pre-conjugated parabolic group to one of the six normal forms.
    Recognize { input: Option<PathBuf> },
    /// The (k, m, n) rows and the compiled verdict of every case.
    CaseTable,
    /// Verdict of one case label such as "210(2)", "220(4) G1" or a bare row "210".
    CaseCheck {
        label: Option<String>,
        #[arg(long)]
        all: bool,
    },
    /// Build a family from {"family": name, "params": {...}} or {"family": "Inoue", "matrix": A}.
    CaseConstruct { input: Option<PathBuf> },
    /// Check {"family": name, "matrix": g, "context": {...}} against the family's constraints.
    CaseValidate { input: Option<PathBuf> },
    /// Layer ranks, core normality and cone invariance of {"generators": [...]}.
    Verify { input: Option<PathBuf> },
    /// Escape sequence γ^k h γ^-k for {"gamma", "h", "steps"} or {"case": label}.
    Witness { input: Option<PathBuf> },
}

#[derive(Debug)]
enum Failure {
    Parse(String),
    Invalid(String),
    Io(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::Parse(m) => Failure::Parse(m),
            e => Failure::Invalid(e.to_string()),
        }
    }
}

type Outcome = std::result::Result<(Value, bool), Failure>;

struct Ctx<'a> {
    mode: Mode,
    ball: usize,
    stdin: &'a mut dyn Read,
}

impl Ctx<'_> {
    fn read(&mut self, input: &Option<PathBuf>) -> std::result::Result<Value, Failure> {
        let text = match input {
            Some(p) if p.as_os_str() != "-" => {
                std::fs::read_to_string(p).map_err(|e| Failure::Io(format!("{}: {e}", p.display())))?
            }
            _ => {
                let mut s = String::new();
                self.stdin.read_to_string(&mut s).map_err(|e| Failure::Io(e.to_string()))?;
                s
            }
        };
        serde_json::from_str(&text).map_err(|e| Failure::Parse(e.to_string()))
    }

    fn matrix(&self, v: &Value) -> std::result::Result<ProjMatrix, Failure> {
        let g = matrix_from_json(v)?;
        Ok(if self.mode == Mode::Float { g.to_float() } else { g })
    }

    fn field<'v>(&self, v: &'v Value, key: &str) -> std::result::Result<&'v Value, Failure> {
        v.get(key).ok_or_else(|| Failure::Parse(format!("missing field {key:?}")))
    }

    fn generators(&self, v: &Value) -> std::result::Result<GroupPresentation, Failure> {
        let list = v.get("generators").unwrap_or(v);
        let gens = list.as_array().ok_or_else(|| Failure::Parse("expected a list of generators".into()))?;
        let mats = gens.iter().map(|g| self.matrix(g)).collect::<std::result::Result<Vec<_>, _>>()?;
        let labels = v.get("labels").and_then(|l| l.as_array()).map(|l| {
            l.iter().map(|s| s.as_str().unwrap_or_default().to_string()).collect::<Vec<_>>()
        });
        Ok(match labels {
            Some(l) if l.len() == mats.len() => GroupPresentation { generators: mats, labels: l },
            _ => GroupPresentation::new(mats),
        })
    }

    fn limits(&self) -> BallLimits {
        BallLimits::default()
    }
}

fn family(v: &Value) -> std::result::Result<FamilyTag, Failure> {
    let name = v.get("family").and_then(|f| f.as_str()).ok_or_else(|| Failure::Parse("missing field \"family\"".into()))?;
    FamilyTag::parse(name).ok_or_else(|| Failure::Parse(format!("unknown family {name:?}")))
}

fn int_matrix(v: &Value) -> std::result::Result<[[i64; 3]; 3], Failure> {
    let bad = || Failure::Parse("the matrix must be a 3×3 integer array".into());
    let rows = v.get("rows").unwrap_or(v).as_array().filter(|r| r.len() == 3).ok_or_else(bad)?;
    let mut a = [[0i64; 3]; 3];
    for (i, r) in rows.iter().enumerate() {
        let r = r.as_array().filter(|r| r.len() == 3).ok_or_else(bad)?;
        for (j, x) in r.iter().enumerate() {
            a[i][j] = x.as_i64().ok_or_else(bad)?;
        }
    }
    Ok(a)
}

fn classify(ctx: &mut Ctx, input: &Option<PathBuf>) -> Outcome {
    let v = ctx.read(input)?;
    let g = ctx.matrix(v.get("matrix").unwrap_or(&v))?;
    let c = classify_element(&g)?;
    let eig = eigenvalues(&g)?;
    let mut out = json!({
        "class": c.name(),
        "eigenvalues": eig.iter().map(scalar_to_json).collect::<Vec<_>>(),
    });
    if let Some(l) = c.lambda() {
        out["lambda"] = scalar_to_json(l);
    }
    Ok((out, true))
}

fn decompose(ctx: &mut Ctx, input: &Option<PathBuf>) -> Outcome {
    let v = ctx.read(input)?;
    let p = ctx.generators(&v)?;
    let d = layer_decompose_with(&p, ctx.ball, ctx.limits())?;
    Ok((layers_to_json(&d), true))
}

fn canonicalize(ctx: &mut Ctx, input: &Option<PathBuf>) -> Outcome {
    let v = ctx.read(input)?;
    let p = ctx.generators(&v)?;
    let c = canonicalize_core(&p.generators)?;
    let check = canonical_check(&c);
    let out = json!({
        "form": c.tag.name(),
        "parameter": c.parameter.as_ref().map(scalar_to_json),
        "conjugator": matrix_to_json(&c.conjugator),
        "sources": matrices_to_json(&c.sources),
        "canonical_generators": matrices_to_json(&c.canonical_generators()),
        "check": check,
    });
    Ok((out, check))
}

fn form_to_json(f: &ParabolicForm) -> Value {
    let scalars = |v: &[crate::scalar::Scalar]| v.iter().map(scalar_to_json).collect::<Vec<_>>();
    let body = match f {
        ParabolicForm::FormWMu { w, mu_values } => json!({ "w": lattice_to_json(w), "mu": scalars(mu_values) }),
        ParabolicForm::FormW { w } | ParabolicForm::FormWStar { w } => json!({ "w": lattice_to_json(w) }),
        ParabolicForm::FormRLW { r, l_values, w } => {
            json!({ "r": lattice_to_json(r), "l": scalars(l_values), "w": lattice_to_json(w) })
        }
        ParabolicForm::FormNonComm5 { x, y, p, q, r } => json!({
            "x": scalar_to_json(x), "y": scalar_to_json(y),
            "p": p.to_string(), "q": q.to_string(), "r": r.to_string(),
        }),
        ParabolicForm::FormNonComm6 { w, a, b, c } => json!({
            "w": lattice_to_json(w), "a": scalar_to_json(a), "b": scalar_to_json(b), "c": scalar_to_json(c),
        }),
    };
    json!({ "form": f.name(), "index": f.index(), "parameters": body })
}

fn recognize(ctx: &mut Ctx, input: &Option<PathBuf>) -> Outcome {
    let v = ctx.read(input)?;
    let p = ctx.generators(&v)?;
    let r = recognize_form(&p.generators)?;
    let mut out = form_to_json(&r.form);
    out["unverified"] = json!(r.unverified);
    Ok((out, true))
}

fn case_table() -> Outcome {
    let rows: Vec<Value> = table_cases()
        .into_iter()
        .map(|(k, m, n)| json!({ "case": format!("{k}{m}{n}"), "k": k, "m": m, "n": n }))
        .collect();
    Ok((json!({ "rows": rows, "verdicts": compiled_table() }), true))
}

fn case_check(label: &Option<String>, all: bool) -> Outcome {
    if all {
        return Ok((serde_json::to_value(compiled_table()).expect("table serializes"), true));
    }
    let label = label.as_deref().ok_or_else(|| Failure::Parse("case-check needs a label or --all".into()))?;
    let bare = label.trim();
    if bare.len() == 3 && bare.chars().all(|c| c.is_ascii_digit()) {
        let entries: Vec<TableEntry> = compiled_table().into_iter().filter(|e| e.case == bare).collect();
        if entries.is_empty() {
            return Err(Failure::Parse(format!("{bare} is not a row of the case table")));
        }
        return Ok((json!({ "case": bare, "entries": entries }), true));
    }
    let c = CaseId::parse(bare).ok_or_else(|| Failure::Parse(format!("bad case label {bare:?}")))?;
    if !all_cases().iter().any(|a| a.k == c.k && a.m == c.m && a.n == c.n && a.j == c.j) {
        return Err(Failure::Parse(format!("{bare} is not a case of the table")));
    }
    let v = admissibility(&c);
    let mut out = verdict_to_json(&v);
    out["case"] = json!(c.label());
    Ok((out, true))
}

fn case_construct(ctx: &mut Ctx, input: &Option<PathBuf>) -> Outcome {
    let v = ctx.read(input)?;
    let tag = family(&v)?;
    if tag == FamilyTag::Inoue {
        let a = int_matrix(ctx.field(&v, "matrix")?)?;
        let g = inoue_from_integer_matrix(a)?;
        let c = |z: num_complex::Complex64| json!([z.re, z.im]);
        let out = json!({
            "family": tag.name(),
            "matrix": a,
            "generators": matrices_to_json(&g.presentation.generators),
            "labels": g.presentation.labels,
            "lambda_real": g.lambda_real,
            "lambda_complex": c(g.lambda_complex),
            "alpha": c(g.alpha),
            "beta": c(g.beta),
            "relation_error": g.relation_error,
        });
        return Ok((out, true));
    }
    let params = match v.get("params") {
        Some(p) => params_from_json(p)?,
        None => tag.default_params(),
    };
    let c = construct(tag, &params)?;
    Ok((construction_to_json(&c), true))
}

fn case_validate(ctx: &mut Ctx, input: &Option<PathBuf>) -> Outcome {
    let v = ctx.read(input)?;
    let tag = family(&v)?;
    let g = ctx.matrix(ctx.field(&v, "matrix")?)?;
    let context = match v.get("context") {
        Some(p) => params_from_json(p)?,
        None => FamilyParams::default(),
    };
    let r = validate(tag, &g, &context);
    let ok = r.params.is_some();
    let mut out = validation_to_json(&r);
    out["family"] = json!(tag.name());
    Ok((out, ok))
}

fn verify(ctx: &mut Ctx, input: &Option<PathBuf>) -> Outcome {
    let v = ctx.read(input)?;
    let p = ctx.generators(&v)?;
    let d = layer_decompose_with(&p, ctx.ball, ctx.limits())?;
    let rank_ok = d.rank_sum() <= 4;
    let core = GroupPresentation::new(d.core.clone());
    let normal = if core.generators.is_empty() {
        json!({ "holds": true, "checked": 0 })
    } else {
        let n = normality_check(&core, &p, ctx.ball)?;
        let mut o = json!({ "holds": n.holds, "checked": n.checked });
        if let Some((a, g, c)) = &n.counterexample {
            o["counterexample"] = json!({ "by": matrix_to_json(a), "element": matrix_to_json(g), "conjugate": matrix_to_json(c) });
        }
        o
    };
    let cone = cone_invariance_check(&p, ctx.ball)?;
    let discrete = d.core_discrete != Discreteness::NonDiscrete && d.xi_discrete != Discreteness::NonDiscrete;
    let passed = rank_ok && normal["holds"] == json!(true) && cone.holds && discrete;
    let out = json!({
        "ranks": [d.k, d.r, d.m, d.n],
        "checks": {
            "rank_bound": rank_ok,
            "core_normal": normal,
            "cone": { "holds": cone.holds, "checked": cone.checked, "violations": cone.violations },
            "no_non_discrete_layer": discrete,
        },
        "diagnostics": d.diagnostics,
        "passed": passed,
    });
    Ok((out, passed))
}

fn witness(ctx: &mut Ctx, input: &Option<PathBuf>) -> Outcome {
    let v = ctx.read(input)?;
    let steps = match v.get("steps") {
        Some(s) => s.as_u64().ok_or_else(|| Failure::Parse("steps must be a positive integer".into()))? as usize,
        None => 40,
    };
    let (gamma, h, case) = if let Some(label) = v.get("case") {
        let label = label.as_str().ok_or_else(|| Failure::Parse("case must be a string".into()))?;
        let c = CaseId::parse(label).ok_or_else(|| Failure::Parse(format!("bad case label {label:?}")))?;
        match admissibility(&c) {
            crate::cases::Verdict::Dismissed { escape: Some(e), .. } => {
                let f = |g: ProjMatrix| if ctx.mode == Mode::Float { g.to_float() } else { g };
                (f(e.gamma), f(e.h), Some(c.label()))
            }
            other => {
                let mut out = verdict_to_json(&other);
                out["case"] = json!(c.label());
                out["error"] = json!("the case has no escape witness");
                return Ok((out, false));
            }
        }
    } else {
        (ctx.matrix(ctx.field(&v, "gamma")?)?, ctx.matrix(ctx.field(&v, "h")?)?, None)
    };
    let w = escape_witness(&gamma, &h, steps)?;
    let mut out = escape_to_json(&w);
    if let Some(c) = case {
        out["case"] = json!(c);
    }
    Ok((out.clone(), w.converging))
}

fn dispatch(cli: &Cli, stdin: &mut dyn Read) -> Outcome {
    let mut ctx = Ctx { mode: cli.mode, ball: cli.ball, stdin };
    match &cli.command {
        Command::Classify { input } => classify(&mut ctx, input),
        Command::Decompose { input } => decompose(&mut ctx, input),
        Command::Canonicalize { input } => canonicalize(&mut ctx, input),
        Command::Recognize { input } => recognize(&mut ctx, input),
        Command::CaseTable => case_table(),
        Command::CaseCheck { label, all } => case_check(label, *all),
        Command::CaseConstruct { input } => case_construct(&mut ctx, input),
        Command::CaseValidate { input } => case_validate(&mut ctx, input),
        Command::Verify { input } => verify(&mut ctx, input),
        Command::Witness { input } => witness(&mut ctx, input),
    }
}

/// Runs one command. `argv[0]` is the program name.
pub fn run_with(argv: &[String], stdin: &mut dyn Read, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32 {
    let cli = match Cli::try_parse_from(argv) {
        Ok(c) => c,
        Err(e) => {
            use clap::error::ErrorKind;
            if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) {
                let _ = write!(stdout, "{e}");
                return 0;
            }
            let _ = write!(stderr, "{}", e.render());
            return 3;
        }
    };
    if let Some(t) = cli.tol {
        if !(t > 0.0 && t.is_finite()) {
            let _ = writeln!(stderr, "--tol must be a positive real");
            return 3;
        }
        Tol { rel: t, abs: t * 1e-3 }.install();
    }
    let (doc, code) = match dispatch(&cli, stdin) {
        Ok((doc, ok)) => (doc, if ok { 0 } else { 2 }),
        Err(f) => {
            let (msg, code) = match f {
                Failure::Parse(m) => (m, 3),
                Failure::Invalid(m) => (m, 2),
                Failure::Io(m) => (m, 1),
            };
            let _ = writeln!(stderr, "error: {msg}");
            (json!({ "error": msg }), code)
        }
    };
    let text = serde_json::to_string_pretty(&doc).expect("json values serialize") + "\n";
    match &cli.out {
        Some(path) => {
            if let Err(e) = std::fs::write(path, text) {
                let _ = writeln!(stderr, "error: {}: {e}", path.display());
                return 1;
            }
        }
        None => {
            let _ = stdout.write_all(text.as_bytes());
        }
    }
    code
}

pub fn run(argv: &[String]) -> i32 {
    run_with(argv, &mut std::io::stdin(), &mut std::io::stdout(), &mut std::io::stderr())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn call(args: &[&str], input: &str) -> (i32, Value, String) {
        let argv: Vec<String> = std::iter::once("ktri").chain(args.iter().copied()).map(String::from).collect();
        let (mut out, mut err) = (vec![], vec![]);
        let code = run_with(&argv, &mut input.as_bytes(), &mut out, &mut err);
        let doc = serde_json::from_slice(&out).unwrap_or(Value::Null);
        (code, doc, String::from_utf8(err).unwrap())
    }

    #[test]
    fn classify_parabolic() {
        let (code, doc, _) = call(&["classify"], r#"[["1","1","0"],["0","1","0"],["0","0","1"]]"#);
        assert_eq!(code, 0);
        assert_eq!(doc["class"], "Parabolic");
    }

    #[test]
    fn verify_rank_two_core_with_gamma() {
        let (code, built, _) = call(&["case-construct"], r#"{"family": "G1-N3", "params": {"p": 2, "q": 3}}"#);
        assert_eq!(code, 0, "{built}");
        let input = json!({ "generators": built["generators"] }).to_string();
        let (code, doc, _) = call(&["verify", "--ball", "3"], &input);
        assert_eq!(doc["ranks"], json!([2, 0, 1, 0]), "{doc}");
        assert_eq!(doc["passed"], true);
        assert_eq!(code, 0);
    }

    #[test]
    fn exit_codes() {
        assert_eq!(call(&["--bogus", "classify"], "").0, 3);
        assert!(call(&["--bogus", "classify"], "").2.contains("Usage"));
        assert_eq!(call(&["classify"], "{not json").0, 3);
        let lower = r#"[["1","0","0"],["1","1","0"],["0","0","1"]]"#;
        assert_eq!(call(&["classify"], lower).0, 2);
        assert_eq!(call(&["case-check", "210(2)"], "").0, 0);
        assert_eq!(call(&["case-check", "999(2)"], "").0, 3);
    }

    #[test]
    fn case_table_has_twenty_rows() {
        let (code, doc, _) = call(&["case-table"], "");
        assert_eq!(code, 0);
        assert_eq!(doc["rows"].as_array().unwrap().len(), 20);
    }

    #[test]
    fn witness_for_a_dismissed_case() {
        let (code, doc, _) = call(&["witness"], r#"{"case": "210(2)"}"#);
        assert_eq!(code, 0, "{doc}");
        assert_eq!(doc["converging"], true);
    }
}
