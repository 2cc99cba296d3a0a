//! Command-line front end.
//!
//! Every command reads zero or more input files (`-i/--input`), performs one
//! operation, and writes either a human-readable report or, with `--json`, a
//! versioned JSON envelope:
//!
//! ```json
//! { "schema": 1, "command": "...", "status": "ok" | "error",
//!   "payload": { ... }, "diagnostics": [ ... ] }
//! ```
//!
//! Exit codes: 0 success, 1 domain error (well-formed input that fails a
//! mathematical check), 2 usage or parse error. Output is byte-identical
//! across runs for the same inputs and flags.

use crate::dsl::{self, Diagnostic, DiagnosticKind, Severity, Workspace};
use crate::exactlin::ExactMatrix;
use crate::limits;
use crate::nquiver::{build_nquiver, NQuiver};
use crate::nrep::{nrep_direct_sum, nrep_hom_space, nrep_tensor, NRepMorphism, NRepresentation};
use crate::quiver::Quiver;
use crate::rep::{
    self, direct_sum, fitting_split, hom_space, tensor, FittingOutcome, RepMorphism, Representation,
};
use clap::{Parser, Subcommand};
use serde::Serialize;
use serde_json::{json, Value};
use std::path::PathBuf;
use std::sync::Arc;

#[derive(Parser)]
#[command(
    name = "qrep",
    version,
    about = "Exact computations with quiver representations and n-representations"
)]
struct Cli {
    /// Input files in the qrep text format.
    #[arg(short = 'i', long = "input", global = true, value_name = "PATH")]
    input: Vec<PathBuf>,

    /// Emit a machine-readable JSON envelope instead of plain text.
    #[arg(long, global = true)]
    json: bool,

    /// Seed for randomized procedures.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,

    /// Require every parsed object to live over this field (Q or F<p>).
    #[arg(long, global = true, value_name = "FIELD")]
    field: Option<String>,

    /// Write output to a file instead of stdout.
    #[arg(long, global = true, value_name = "PATH")]
    out: Option<PathBuf>,

    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Parse and validate all input files; report a summary.
    Validate,
    /// Path algebra of a named acyclic quiver: dimension and basis.
    Pathalg { quiver: String },
    /// Build the glued quiver of a tuple of named quivers.
    NquiverBuild { quivers: Vec<String> },
    /// Glue a named n-representation into a representation of the glued
    /// quiver.
    Glue { nrep: String },
    /// Decompose a representation of a glued quiver back into an
    /// n-representation over the named level quivers.
    Decompose {
        rep: String,
        #[arg(long, value_name = "QUIVERS", value_delimiter = ',')]
        levels: Vec<String>,
    },
    /// Direct sum of two named representations or n-representations.
    Dsum { left: String, right: String },
    /// Tensor product of two named representations or n-representations.
    Tensor { left: String, right: String },
    /// Report on a named, verified morphism.
    HomCheck { morphism: String },
    /// Basis of the morphism space between two named objects.
    HomSpace { source: String, target: String },
    /// Kernel of a named morphism, with its inclusion.
    Kernel { morphism: String },
    /// Cokernel of a named morphism, with its projection.
    Cokernel { morphism: String },
    /// Limit of a named diagram.
    Limit { diagram: String },
    /// Colimit of a named diagram.
    Colimit { diagram: String },
    /// Probabilistic direct-sum splitting of a named representation.
    FittingSplit {
        rep: String,
        #[arg(long, default_value_t = 20)]
        trials: usize,
    },
    /// Check the comonoid axioms of a named coalgebra section.
    CoalgCheck { coalgebra: String },
    /// Dimension blocks of the glued path algebra of a quiver tuple.
    BlockStructure { quivers: Vec<String> },
}

impl Cmd {
    fn name(&self) -> &'static str {
        match self {
            Cmd::Validate => "validate",
            Cmd::Pathalg { .. } => "pathalg",
            Cmd::NquiverBuild { .. } => "nquiver-build",
            Cmd::Glue { .. } => "glue",
            Cmd::Decompose { .. } => "decompose",
            Cmd::Dsum { .. } => "dsum",
            Cmd::Tensor { .. } => "tensor",
            Cmd::HomCheck { .. } => "hom-check",
            Cmd::HomSpace { .. } => "hom-space",
            Cmd::Kernel { .. } => "kernel",
            Cmd::Cokernel { .. } => "cokernel",
            Cmd::Limit { .. } => "limit",
            Cmd::Colimit { .. } => "colimit",
            Cmd::FittingSplit { .. } => "fitting-split",
            Cmd::CoalgCheck { .. } => "coalg-check",
            Cmd::BlockStructure { .. } => "block-structure",
        }
    }
}

#[derive(Serialize)]
struct CommandResult {
    schema: u32,
    command: String,
    status: &'static str,
    payload: Value,
    diagnostics: Vec<Diagnostic>,
}

/// What a command produces on success: a JSON payload and, optionally, a
/// plain-text artifact (usually output in the text format) shown instead of
/// the payload when `--json` is absent.
struct Output {
    payload: Value,
    text: Option<String>,
}

impl Output {
    fn with_text(payload: Value, text: String) -> Output {
        Output {
            payload,
            text: Some(text),
        }
    }
}

/// A command failure carrying located diagnostics.
struct Failure(Vec<Diagnostic>);

impl Failure {
    fn usage(message: String) -> Failure {
        Failure(vec![Diagnostic {
            severity: Severity::Error,
            kind: DiagnosticKind::Syntax,
            file: "<args>".into(),
            line: 0,
            message,
        }])
    }

    fn domain(message: String) -> Failure {
        Failure(vec![Diagnostic {
            severity: Severity::Error,
            kind: DiagnosticKind::Domain,
            file: "<args>".into(),
            line: 0,
            message,
        }])
    }

    fn domain_at(file: &str, line: usize, message: String) -> Failure {
        Failure(vec![Diagnostic {
            severity: Severity::Error,
            kind: DiagnosticKind::Domain,
            file: file.into(),
            line,
            message,
        }])
    }
}

impl From<Vec<Diagnostic>> for Failure {
    fn from(d: Vec<Diagnostic>) -> Failure {
        Failure(d)
    }
}

macro_rules! impl_domain_failure {
    ($($t:ty),*) => {$(
        impl From<$t> for Failure {
            fn from(e: $t) -> Failure {
                Failure::domain(e.to_string())
            }
        }
    )*};
}

impl_domain_failure!(
    crate::quiver::QuiverError,
    crate::rep::RepError,
    crate::nrep::NRepError,
    crate::nquiver::NQuiverError,
    crate::limits::LimitError,
    crate::exactlin::LinError
);

pub fn run() -> i32 {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind;
            let code = match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => 0,
                _ => 2,
            };
            let _ = e.print();
            return code;
        }
    };

    let command = cli.cmd.name().to_string();
    let outcome = execute(&cli);
    let (status, payload, text, diagnostics) = match outcome {
        Ok(out) => ("ok", out.payload, out.text, Vec::new()),
        Err(Failure(diags)) => ("error", Value::Null, None, diags),
    };
    let exit = if status == "ok" {
        0
    } else if diagnostics
        .iter()
        .any(|d| d.kind == DiagnosticKind::Syntax && d.severity == Severity::Error)
    {
        2
    } else {
        1
    };

    let rendered = if cli.json {
        let result = CommandResult {
            schema: 1,
            command,
            status,
            payload,
            diagnostics: diagnostics.clone(),
        };
        let mut s = serde_json::to_string_pretty(&result).expect("serializable result");
        s.push('\n');
        s
    } else if status == "ok" {
        match text {
            Some(t) => t,
            None => {
                let mut s = serde_json::to_string_pretty(&payload).expect("serializable payload");
                s.push('\n');
                s
            }
        }
    } else {
        String::new()
    };

    if !cli.json {
        for d in &diagnostics {
            eprintln!("error: {}:{}: {}", d.file, d.line, d.message);
        }
    }

    match &cli.out {
        Some(path) => {
            if let Err(e) = std::fs::write(path, rendered) {
                eprintln!("error: cannot write {}: {e}", path.display());
                return 2;
            }
        }
        None => print!("{rendered}"),
    }
    exit
}

fn load_workspace(cli: &Cli) -> Result<Workspace, Failure> {
    let mut files = Vec::new();
    for path in &cli.input {
        let content = std::fs::read_to_string(path)
            .map_err(|e| Failure::usage(format!("cannot read {}: {e}", path.display())))?;
        files.push((path.display().to_string(), content));
    }
    let ws = dsl::parse_files(&files)?;
    if let Some(f) = &cli.field {
        let want = f.clone();
        let mut mismatched = Vec::new();
        for (n, r) in &ws.reps {
            if r.field.to_string() != want {
                mismatched.push(format!("representation `{n}` over {}", r.field));
            }
        }
        for (n, v) in &ws.nreps {
            if v.field().to_string() != want {
                mismatched.push(format!("nrep `{n}` over {}", v.field()));
            }
        }
        if !mismatched.is_empty() {
            return Err(Failure::domain(format!(
                "--field {want} requested, but: {}",
                mismatched.join("; ")
            )));
        }
    }
    Ok(ws)
}

fn matrix_json(m: &ExactMatrix) -> Value {
    let rows: Vec<Value> = (0..m.rows())
        .map(|r| {
            Value::Array(
                (0..m.cols())
                    .map(|c| Value::String(m.get(r, c).to_literal()))
                    .collect(),
            )
        })
        .collect();
    Value::Array(rows)
}

fn get_quiver<'a>(ws: &'a Workspace, name: &str) -> Result<&'a Arc<Quiver>, Failure> {
    ws.quivers
        .get(name)
        .ok_or_else(|| Failure::usage(format!("no quiver named `{name}` in the inputs")))
}

fn get_nrep<'a>(ws: &'a Workspace, name: &str) -> Result<&'a NRepresentation, Failure> {
    ws.nreps
        .get(name)
        .ok_or_else(|| Failure::usage(format!("no nrep named `{name}` in the inputs")))
}

fn get_rep<'a>(ws: &'a Workspace, name: &str) -> Result<&'a Representation, Failure> {
    ws.reps
        .get(name)
        .ok_or_else(|| Failure::usage(format!("no representation named `{name}` in the inputs")))
}

fn build_tuple(ws: &Workspace, names: &[String]) -> Result<NQuiver, Failure> {
    if names.len() < 2 {
        return Err(Failure::usage("need at least two quiver names".to_string()));
    }
    let mut levels = Vec::new();
    for n in names {
        levels.push(get_quiver(ws, n)?.clone());
    }
    Ok(build_nquiver(&levels)?)
}

fn rep_summary(name: &str, r: &Representation) -> Value {
    json!({
        "name": name,
        "quiver": r.quiver.name,
        "field": r.field.to_string(),
        "dims": r.dims,
        "total_dim": r.total_dim(),
    })
}

fn nrep_summary(name: &str, v: &NRepresentation) -> Value {
    json!({
        "name": name,
        "quivers": v.quivers.iter().map(|q| q.name.clone()).collect::<Vec<_>>(),
        "field": v.field().to_string(),
        "level_dims": v.comps.iter().map(|c| c.dims.clone()).collect::<Vec<_>>(),
        "total_dim": v.total_dim(),
    })
}

enum AnyMorphism<'a> {
    Rep(&'a RepMorphism),
    NRep(&'a NRepMorphism),
}

fn get_morphism<'a>(ws: &'a Workspace, name: &str) -> Result<AnyMorphism<'a>, Failure> {
    if let Some(f) = ws.rep_morphisms.get(name) {
        return Ok(AnyMorphism::Rep(f));
    }
    if let Some(f) = ws.nrep_morphisms.get(name) {
        return Ok(AnyMorphism::NRep(f));
    }
    Err(Failure::usage(format!(
        "no morphism named `{name}` in the inputs"
    )))
}

fn rep_morphism_text(name: &str, src: &str, tgt: &str, f: &RepMorphism) -> String {
    let mut out = format!("morphism {name} : {src} -> {tgt}\n");
    for (v, m) in f.source.quiver.vertices.iter().zip(&f.comps) {
        if m.rows() > 0 && m.cols() > 0 && !m.is_zero() {
            out.push_str(&format!("at {} = {}\n", v, dsl::matrix_literal(m)));
        }
    }
    out
}

fn execute(cli: &Cli) -> Result<Output, Failure> {
    let ws = load_workspace(cli)?;
    match &cli.cmd {
        Cmd::Validate => {
            let quivers: Vec<Value> = ws
                .quivers
                .iter()
                .map(|(n, q)| {
                    Ok(json!({
                        "name": n,
                        "vertices": q.vertex_count(),
                        "arrows": q.arrow_count(),
                        "acyclic": q.is_acyclic(),
                        "connected": q.is_connected()?,
                    }))
                })
                .collect::<Result<_, Failure>>()?;
            let reps: Vec<Value> = ws.reps.iter().map(|(n, r)| rep_summary(n, r)).collect();
            let nreps: Vec<Value> = ws.nreps.iter().map(|(n, v)| nrep_summary(n, v)).collect();
            let morphisms: Vec<Value> = ws
                .rep_morphisms
                .keys()
                .map(|n| json!({"name": n, "kind": "representation"}))
                .chain(
                    ws.nrep_morphisms
                        .keys()
                        .map(|n| json!({"name": n, "kind": "nrep"})),
                )
                .collect();
            let diagrams: Vec<Value> = ws
                .diagrams
                .iter()
                .map(|(n, d)| {
                    json!({"name": n, "shape": d.shape.name, "objects": d.objects.len(),
                           "edges": d.edges.len()})
                })
                .collect();
            let coalgebras: Vec<Value> = ws
                .coalgebras
                .iter()
                .map(|(n, c)| json!({"name": n, "carrier_dim": c.carrier.total_dim()}))
                .collect();
            let payload = json!({
                "quivers": quivers,
                "representations": reps,
                "nreps": nreps,
                "morphisms": morphisms,
                "diagrams": diagrams,
                "coalgebras": coalgebras,
            });
            let text = format!(
                "ok: {} quiver(s), {} representation(s), {} nrep(s), {} morphism(s), \
                 {} diagram(s), {} coalgebra(s)\n",
                ws.quivers.len(),
                ws.reps.len(),
                ws.nreps.len(),
                ws.rep_morphisms.len() + ws.nrep_morphisms.len(),
                ws.diagrams.len(),
                ws.coalgebras.len()
            );
            Ok(Output::with_text(payload, text))
        }
        Cmd::Pathalg { quiver } => {
            let q = get_quiver(&ws, quiver)?;
            let pa = q.path_algebra()?;
            let basis: Vec<String> = pa
                .basis
                .iter()
                .map(|p| {
                    if p.is_trivial() {
                        format!("e_{}", p.source)
                    } else {
                        p.arrows.join("*")
                    }
                })
                .collect();
            let text = format!("path algebra of {}: dim {}\n", quiver, pa.dim);
            Ok(Output::with_text(
                json!({"quiver": quiver, "dim": pa.dim, "basis": basis}),
                text,
            ))
        }
        Cmd::NquiverBuild { quivers } => {
            let nq = build_tuple(&ws, quivers)?;
            let text = dsl::print_quiver(&nq.base);
            Ok(Output::with_text(
                json!({
                    "name": nq.base.name,
                    "levels": quivers,
                    "vertices": nq.base.vertex_count(),
                    "arrows": nq.base.arrow_count(),
                    "origin": serde_json::to_value(nq.origin_map()).expect("serializable"),
                    "dsl": text,
                }),
                text.clone(),
            ))
        }
        Cmd::Glue { nrep } => {
            let v = get_nrep(&ws, nrep)?;
            let nq = build_nquiver(&v.quivers)?;
            let glued = nq.glue(v)?;
            let text = format!(
                "{}\n{}",
                dsl::print_quiver(&nq.base),
                dsl::print_representation(&format!("{nrep}.glued"), &glued)
            );
            Ok(Output::with_text(
                json!({
                    "nrep": nrep,
                    "base": nq.base.name,
                    "representation": rep_summary(&format!("{nrep}.glued"), &glued),
                    "dsl": text,
                }),
                text.clone(),
            ))
        }
        Cmd::Decompose { rep, levels } => {
            let r = get_rep(&ws, rep)?;
            let nq = build_tuple(&ws, levels)?;
            if *r.quiver != *nq.base {
                return Err(Failure::domain(format!(
                    "representation `{rep}` is over `{}`, not the glued quiver `{}`",
                    r.quiver.name, nq.base.name
                )));
            }
            let v = nq.decompose(r)?;
            let text = dsl::print_nrep(&format!("{rep}.split"), &v);
            Ok(Output::with_text(
                json!({
                    "representation": rep,
                    "nrep": nrep_summary(&format!("{rep}.split"), &v),
                    "dsl": text,
                }),
                text.clone(),
            ))
        }
        Cmd::Dsum { left, right } => match (ws.reps.get(left), ws.reps.get(right)) {
            (Some(a), Some(b)) => {
                let s = direct_sum(a, b)?;
                let name = format!("{left}.plus.{right}");
                let text = format!(
                    "{}\n{}",
                    dsl::print_quiver(&a.quiver),
                    dsl::print_representation(&name, &s.sum)
                );
                Ok(Output::with_text(
                    json!({"sum": rep_summary(&name, &s.sum), "dsl": text}),
                    text.clone(),
                ))
            }
            _ => {
                let a = get_nrep(&ws, left)?;
                let b = get_nrep(&ws, right)?;
                let s = nrep_direct_sum(a, b)?;
                let name = format!("{left}.plus.{right}");
                let text = dsl::print_nrep(&name, &s.sum);
                Ok(Output::with_text(
                    json!({"sum": nrep_summary(&name, &s.sum), "dsl": text}),
                    text.clone(),
                ))
            }
        },
        Cmd::Tensor { left, right } => match (ws.reps.get(left), ws.reps.get(right)) {
            (Some(a), Some(b)) => {
                let t = tensor(a, b)?;
                let name = format!("{left}.times.{right}");
                let text = format!(
                    "{}\n{}",
                    dsl::print_quiver(&a.quiver),
                    dsl::print_representation(&name, &t)
                );
                Ok(Output::with_text(
                    json!({"tensor": rep_summary(&name, &t), "dsl": text}),
                    text.clone(),
                ))
            }
            _ => {
                let a = get_nrep(&ws, left)?;
                let b = get_nrep(&ws, right)?;
                let t = nrep_tensor(a, b)?;
                let name = format!("{left}.times.{right}");
                let text = dsl::print_nrep(&name, &t);
                Ok(Output::with_text(
                    json!({"tensor": nrep_summary(&name, &t), "dsl": text}),
                    text.clone(),
                ))
            }
        },
        Cmd::HomCheck { morphism } => {
            let payload = match get_morphism(&ws, morphism)? {
                AnyMorphism::Rep(f) => json!({
                    "name": morphism,
                    "kind": "representation",
                    "source_dim": f.source.total_dim(),
                    "target_dim": f.target.total_dim(),
                    "is_iso": f.is_iso(),
                    "is_zero": f.is_zero_morphism(),
                }),
                AnyMorphism::NRep(f) => json!({
                    "name": morphism,
                    "kind": "nrep",
                    "source_dim": f.source.total_dim(),
                    "target_dim": f.target.total_dim(),
                    "is_iso": f.is_iso(),
                    "is_zero": f.is_zero_morphism(),
                }),
            };
            let text = format!("morphism `{morphism}` is a valid homomorphism\n");
            Ok(Output::with_text(payload, text))
        }
        Cmd::HomSpace { source, target } => match (ws.reps.get(source), ws.reps.get(target)) {
            (Some(a), Some(b)) => {
                let basis = hom_space(a, b)?;
                let texts: Vec<String> = basis
                    .iter()
                    .enumerate()
                    .map(|(i, f)| rep_morphism_text(&format!("h{i}"), source, target, f))
                    .collect();
                Ok(Output::with_text(
                    json!({"source": source, "target": target, "dim": basis.len(),
                           "basis": texts}),
                    format!("dim hom = {}\n{}", basis.len(), texts.join("\n")),
                ))
            }
            _ => {
                let a = get_nrep(&ws, source)?;
                let b = get_nrep(&ws, target)?;
                let basis = nrep_hom_space(a, b)?;
                let texts: Vec<String> = basis
                    .iter()
                    .enumerate()
                    .map(|(i, f)| dsl::print_nrep_morphism(&format!("h{i}"), source, target, f))
                    .collect();
                Ok(Output::with_text(
                    json!({"source": source, "target": target, "dim": basis.len(),
                           "basis": texts}),
                    format!("dim hom = {}\n{}", basis.len(), texts.join("\n")),
                ))
            }
        },
        Cmd::Kernel { morphism } => match get_morphism(&ws, morphism)? {
            AnyMorphism::Rep(f) => {
                let (k, incl) = rep::kernel(f)?;
                let name = format!("ker.{morphism}");
                let text = format!(
                    "{}\n{}\n{}",
                    dsl::print_quiver(&k.quiver),
                    dsl::print_representation(&name, &k),
                    rep_morphism_text(&format!("{name}.incl"), &name, "<target>", &incl)
                );
                Ok(Output::with_text(
                    json!({"kernel": rep_summary(&name, &k),
                           "inclusion_components": incl.comps.iter().map(matrix_json).collect::<Vec<_>>(),
                           "dsl": text}),
                    text.clone(),
                ))
            }
            AnyMorphism::NRep(f) => {
                let (k, incl) = limits::kernel_nrep(f)?;
                let name = format!("ker.{morphism}");
                let text = dsl::print_nrep(&name, &k);
                Ok(Output::with_text(
                    json!({"kernel": nrep_summary(&name, &k),
                           "inclusion": dsl::print_nrep_morphism(&format!("{name}.incl"), &name, "<target>", &incl),
                           "dsl": text}),
                    text.clone(),
                ))
            }
        },
        Cmd::Cokernel { morphism } => match get_morphism(&ws, morphism)? {
            AnyMorphism::Rep(f) => {
                let (c, proj) = rep::cokernel(f)?;
                let name = format!("coker.{morphism}");
                let text = format!(
                    "{}\n{}\n{}",
                    dsl::print_quiver(&c.quiver),
                    dsl::print_representation(&name, &c),
                    rep_morphism_text(&format!("{name}.proj"), "<source>", &name, &proj)
                );
                Ok(Output::with_text(
                    json!({"cokernel": rep_summary(&name, &c),
                           "projection_components": proj.comps.iter().map(matrix_json).collect::<Vec<_>>(),
                           "dsl": text}),
                    text.clone(),
                ))
            }
            AnyMorphism::NRep(f) => {
                let (c, proj) = limits::cokernel_nrep(f)?;
                let name = format!("coker.{morphism}");
                let text = dsl::print_nrep(&name, &c);
                Ok(Output::with_text(
                    json!({"cokernel": nrep_summary(&name, &c),
                           "projection": dsl::print_nrep_morphism(&format!("{name}.proj"), "<source>", &name, &proj),
                           "dsl": text}),
                    text.clone(),
                ))
            }
        },
        Cmd::Limit { diagram } => {
            let d = ws
                .diagrams
                .get(diagram)
                .ok_or_else(|| Failure::usage(format!("no diagram named `{diagram}`")))?;
            let lim = limits::nrep_limit(d)?;
            let name = format!("lim.{diagram}");
            let text = dsl::print_nrep(&name, &lim.apex);
            Ok(Output::with_text(
                json!({"apex": nrep_summary(&name, &lim.apex),
                       "projections": lim.projections.len(),
                       "dsl": text}),
                text.clone(),
            ))
        }
        Cmd::Colimit { diagram } => {
            let d = ws
                .diagrams
                .get(diagram)
                .ok_or_else(|| Failure::usage(format!("no diagram named `{diagram}`")))?;
            let colim = limits::nrep_colimit(d)?;
            let name = format!("colim.{diagram}");
            let text = dsl::print_nrep(&name, &colim.nadir);
            Ok(Output::with_text(
                json!({"nadir": nrep_summary(&name, &colim.nadir),
                       "injections": colim.injections.len(),
                       "dsl": text}),
                text.clone(),
            ))
        }
        Cmd::FittingSplit { rep, trials } => {
            let r = get_rep(&ws, rep)?;
            match fitting_split(r, *trials, cli.seed)? {
                FittingOutcome::Split(s) => {
                    let text = format!(
                        "{}\n{}\n{}",
                        dsl::print_quiver(&r.quiver),
                        dsl::print_representation(&format!("{rep}.a"), &s.part_a),
                        dsl::print_representation(&format!("{rep}.b"), &s.part_b)
                    );
                    Ok(Output::with_text(
                        json!({"outcome": "split",
                               "trial": s.trial,
                               "part_a": rep_summary(&format!("{rep}.a"), &s.part_a),
                               "part_b": rep_summary(&format!("{rep}.b"), &s.part_b),
                               "dsl": text}),
                        text.clone(),
                    ))
                }
                FittingOutcome::ProbablyIndecomposable { trials } => Ok(Output::with_text(
                    json!({"outcome": "probably_indecomposable", "trials": trials}),
                    format!("no split found after {trials} trial(s); probably indecomposable\n"),
                )),
            }
        }
        Cmd::CoalgCheck { coalgebra } => {
            let c = ws
                .coalgebras
                .get(coalgebra)
                .ok_or_else(|| Failure::usage(format!("no coalgebra named `{coalgebra}`")))?;
            match c.check() {
                Ok(obj) => Ok(Output::with_text(
                    json!({"name": coalgebra,
                           "carrier_dim": obj.carrier.total_dim(),
                           "coassociative": true,
                           "counital": true}),
                    format!("coalgebra `{coalgebra}` satisfies the comonoid axioms\n"),
                )),
                Err(e) => Err(Failure::domain_at(&c.file, c.line, e.to_string())),
            }
        }
        Cmd::BlockStructure { quivers } => {
            let nq = build_tuple(&ws, quivers)?;
            let blocks = crate::nquiver::block_structure(&nq)?;
            Ok(Output::with_text(
                serde_json::to_value(&blocks).expect("serializable"),
                format!(
                    "total {} = prefix {} + connecting {} + top {}\n",
                    blocks.total_dim, blocks.prefix_dim, blocks.connecting_dim, blocks.top_dim
                ),
            ))
        }
    }
}
