//! Line-oriented text format for quivers, representations,
//! n-representations, morphisms, diagrams, and coalgebra data, with
//! two-pass name resolution and line-accurate diagnostics.
//!
//! Sections start with one of `quiver`, `representation`, `nrep`,
//! `morphism`, `diagram`, `coalgebra` and own the following lines until the
//! next section. `#` starts a comment; blank lines are ignored. Declaration
//! order never matters, within or across files: all sections are collected
//! first and resolved by kind.
//!
//! Defaults: a vertex without a `space` line has dimension 0; omitted `map`,
//! `link`, and morphism component matrices are zero. Components of an
//! `nrep` must all be given.

use crate::coalg::CoalgebraObject;
use crate::exactlin::{ExactMatrix, FieldSpec, Scalar};
use crate::limits::NRepDiagram;
use crate::nrep::{nrep_tensor, NRepMorphism, NRepresentation};
use crate::quiver::{Arrow, Quiver};
use crate::rep::{RepMorphism, Representation};
use serde::Serialize;
use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::sync::Arc;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Severity {
    Error,
    Warning,
}

/// Whether a diagnostic is a syntax/reference problem (usage exit code) or a
/// verification failure of well-formed input (domain exit code).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum DiagnosticKind {
    Syntax,
    Domain,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Diagnostic {
    pub severity: Severity,
    pub kind: DiagnosticKind,
    pub file: String,
    pub line: usize,
    pub message: String,
}

impl Diagnostic {
    fn error(file: &str, line: usize, message: String) -> Diagnostic {
        Diagnostic {
            severity: Severity::Error,
            kind: DiagnosticKind::Syntax,
            file: file.to_string(),
            line,
            message,
        }
    }

    fn domain(file: &str, line: usize, message: String) -> Diagnostic {
        Diagnostic {
            severity: Severity::Error,
            kind: DiagnosticKind::Domain,
            file: file.to_string(),
            line,
            message,
        }
    }
}

/// A coalgebra candidate: structure morphisms are verified, the comonoid
/// axioms are checked on demand by the `coalg-check` command.
#[derive(Debug, Clone)]
pub struct CoalgebraData {
    pub carrier: NRepresentation,
    pub comult: NRepMorphism,
    pub counit: NRepMorphism,
    /// Where the section was declared, for diagnostics.
    pub file: String,
    pub line: usize,
}

impl CoalgebraData {
    pub fn check(&self) -> Result<CoalgebraObject, crate::coalg::CoalgError> {
        crate::coalg::check_coalgebra(
            self.carrier.clone(),
            self.comult.clone(),
            self.counit.clone(),
        )
    }
}

/// Fully resolved contents of a set of input files.
#[derive(Debug, Clone, Default)]
pub struct Workspace {
    pub quivers: BTreeMap<String, Arc<Quiver>>,
    pub reps: BTreeMap<String, Representation>,
    pub nreps: BTreeMap<String, NRepresentation>,
    pub rep_morphisms: BTreeMap<String, RepMorphism>,
    pub nrep_morphisms: BTreeMap<String, NRepMorphism>,
    pub diagrams: BTreeMap<String, NRepDiagram>,
    pub coalgebras: BTreeMap<String, CoalgebraData>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum SectionKind {
    Quiver,
    Representation,
    NRep,
    Morphism,
    Diagram,
    Coalgebra,
}

struct Section {
    kind: SectionKind,
    file: String,
    line: usize,
    header: String,
    body: Vec<(usize, String)>,
}

fn strip_comment(line: &str) -> &str {
    match line.find('#') {
        Some(i) => &line[..i],
        None => line,
    }
}

fn split_sections(files: &[(String, String)], diags: &mut Vec<Diagnostic>) -> Vec<Section> {
    let mut sections = Vec::new();
    for (file, content) in files {
        let mut current: Option<Section> = None;
        for (i, raw) in content.lines().enumerate() {
            let line_no = i + 1;
            let line = strip_comment(raw).trim();
            if line.is_empty() {
                continue;
            }
            let keyword = line.split_whitespace().next().unwrap();
            let kind = match keyword {
                "quiver" => Some(SectionKind::Quiver),
                "representation" => Some(SectionKind::Representation),
                "nrep" => Some(SectionKind::NRep),
                "morphism" => Some(SectionKind::Morphism),
                "diagram" => Some(SectionKind::Diagram),
                "coalgebra" => Some(SectionKind::Coalgebra),
                _ => None,
            };
            match kind {
                Some(kind) => {
                    if let Some(s) = current.take() {
                        sections.push(s);
                    }
                    current = Some(Section {
                        kind,
                        file: file.clone(),
                        line: line_no,
                        header: line.to_string(),
                        body: Vec::new(),
                    });
                }
                None => match current.as_mut() {
                    Some(s) => s.body.push((line_no, line.to_string())),
                    None => diags.push(Diagnostic::error(
                        file,
                        line_no,
                        format!("`{keyword}` outside of any section"),
                    )),
                },
            }
        }
        if let Some(s) = current.take() {
            sections.push(s);
        }
    }
    sections
}

/// Parses `[[a, b], [c, d]]` into rows of entry literals. `[]` is the empty
/// matrix (zero rows).
fn parse_matrix_literal(text: &str) -> Result<Vec<Vec<String>>, String> {
    let t: String = text.chars().filter(|c| !c.is_whitespace()).collect();
    let inner = t
        .strip_prefix('[')
        .and_then(|s| s.strip_suffix(']'))
        .ok_or_else(|| "matrix literal must be enclosed in [ ]".to_string())?;
    if inner.is_empty() {
        return Ok(Vec::new());
    }
    let mut rows = Vec::new();
    let mut rest = inner;
    loop {
        let row_body = rest
            .strip_prefix('[')
            .ok_or_else(|| "expected `[` starting a row".to_string())?;
        let end = row_body
            .find(']')
            .ok_or_else(|| "unterminated row".to_string())?;
        let row = &row_body[..end];
        if row.is_empty() {
            rows.push(Vec::new());
        } else {
            rows.push(row.split(',').map(|e| e.to_string()).collect());
        }
        rest = &row_body[end + 1..];
        if rest.is_empty() {
            break;
        }
        rest = rest
            .strip_prefix(',')
            .ok_or_else(|| "expected `,` between rows".to_string())?;
    }
    Ok(rows)
}

fn build_matrix(
    field: FieldSpec,
    rows: usize,
    cols: usize,
    literal: &[Vec<String>],
) -> Result<ExactMatrix, String> {
    if literal.len() != rows {
        return Err(format!("expected {} rows, found {}", rows, literal.len()));
    }
    let mut m = ExactMatrix::zeros(field, rows, cols);
    for (r, row) in literal.iter().enumerate() {
        if row.len() != cols {
            return Err(format!(
                "row {}: expected {} entries, found {}",
                r + 1,
                cols,
                row.len()
            ));
        }
        for (c, e) in row.iter().enumerate() {
            let v = field
                .parse(e)
                .map_err(|err| format!("entry `{e}`: {err}"))?;
            m.set(r, c, v);
        }
    }
    Ok(m)
}

fn parse_field(text: &str) -> Result<FieldSpec, String> {
    if text == "Q" {
        return Ok(FieldSpec::Rationals);
    }
    if let Some(p) = text.strip_prefix('F') {
        let p: u64 = p.parse().map_err(|_| format!("bad field `{text}`"))?;
        return FieldSpec::prime_field(p).map_err(|e| e.to_string());
    }
    Err(format!("bad field `{text}` (expected Q or F<p>)"))
}

fn check_duplicate(
    names: &mut std::collections::BTreeSet<String>,
    name: &str,
    kind: &str,
    s: &Section,
    diags: &mut Vec<Diagnostic>,
) -> bool {
    if !names.insert(name.to_string()) {
        diags.push(Diagnostic::error(
            &s.file,
            s.line,
            format!("duplicate {kind} name `{name}`"),
        ));
        return false;
    }
    true
}

fn parse_quiver(s: &Section, diags: &mut Vec<Diagnostic>) -> Option<(String, Arc<Quiver>)> {
    let toks: Vec<&str> = s.header.split_whitespace().collect();
    if toks.len() != 2 {
        diags.push(Diagnostic::error(
            &s.file,
            s.line,
            "expected `quiver <name>`".into(),
        ));
        return None;
    }
    let name = toks[1].to_string();
    let mut vertices = Vec::new();
    let mut arrows = Vec::new();
    let mut ok = true;
    for (line, text) in &s.body {
        let t: Vec<&str> = text.split_whitespace().collect();
        match t[0] {
            "vertex" => {
                for v in &t[1..] {
                    vertices.push(v.to_string());
                }
            }
            "arrow" if t.len() == 6 && t[2] == ":" && t[4] == "->" => {
                arrows.push(Arrow {
                    label: t[1].to_string(),
                    source: t[3].to_string(),
                    target: t[5].to_string(),
                });
            }
            _ => {
                diags.push(Diagnostic::error(
                    &s.file,
                    *line,
                    format!("bad line in quiver section: `{text}`"),
                ));
                ok = false;
            }
        }
    }
    if !ok {
        return None;
    }
    match Quiver::new(&name, vertices, arrows) {
        Ok(q) => Some((name, Arc::new(q))),
        Err(e) => {
            diags.push(Diagnostic::domain(&s.file, s.line, e.to_string()));
            None
        }
    }
}

fn parse_representation(
    s: &Section,
    quivers: &BTreeMap<String, Arc<Quiver>>,
    diags: &mut Vec<Diagnostic>,
) -> Option<(String, Representation)> {
    let toks: Vec<&str> = s.header.split_whitespace().collect();
    if toks.len() != 6 || toks[2] != "over" || toks[4] != "field" {
        diags.push(Diagnostic::error(
            &s.file,
            s.line,
            "expected `representation <name> over <quiver> field Q|F<p>`".into(),
        ));
        return None;
    }
    let name = toks[1].to_string();
    let quiver = match quivers.get(toks[3]) {
        Some(q) => q.clone(),
        None => {
            diags.push(Diagnostic::error(
                &s.file,
                s.line,
                format!("unresolved quiver `{}`", toks[3]),
            ));
            return None;
        }
    };
    let field = match parse_field(toks[5]) {
        Ok(f) => f,
        Err(e) => {
            diags.push(Diagnostic::error(&s.file, s.line, e));
            return None;
        }
    };
    let mut dims = vec![0usize; quiver.vertex_count()];
    let mut map_literals: Vec<(usize, String, Vec<Vec<String>>)> = Vec::new();
    let mut ok = true;
    for (line, text) in &s.body {
        let t: Vec<&str> = text.split_whitespace().collect();
        match t[0] {
            "space" if t.len() == 4 && t[2] == "dim" => {
                match (quiver.vertex_index(t[1]), t[3].parse::<usize>()) {
                    (Some(i), Ok(d)) => dims[i] = d,
                    _ => {
                        diags.push(Diagnostic::error(
                            &s.file,
                            *line,
                            format!("bad space line: `{text}`"),
                        ));
                        ok = false;
                    }
                }
            }
            "map" if t.len() >= 3 && t[2] == "=" => {
                let literal = text.splitn(2, '=').nth(1).unwrap();
                match parse_matrix_literal(literal) {
                    Ok(rows) => map_literals.push((*line, t[1].to_string(), rows)),
                    Err(e) => {
                        diags.push(Diagnostic::error(&s.file, *line, e));
                        ok = false;
                    }
                }
            }
            _ => {
                diags.push(Diagnostic::error(
                    &s.file,
                    *line,
                    format!("bad line in representation section: `{text}`"),
                ));
                ok = false;
            }
        }
    }
    if !ok {
        return None;
    }
    let mut mats: Vec<ExactMatrix> = quiver
        .arrows
        .iter()
        .map(|a| {
            let r = dims[quiver.vertex_index(&a.target).unwrap()];
            let c = dims[quiver.vertex_index(&a.source).unwrap()];
            ExactMatrix::zeros(field, r, c)
        })
        .collect();
    for (line, label, literal) in map_literals {
        let Some(idx) = quiver.arrow_index(&label) else {
            diags.push(Diagnostic::error(
                &s.file,
                line,
                format!("unresolved arrow `{label}`"),
            ));
            return None;
        };
        match build_matrix(field, mats[idx].rows(), mats[idx].cols(), &literal) {
            Ok(m) => mats[idx] = m,
            Err(e) => {
                diags.push(Diagnostic::domain(
                    &s.file,
                    line,
                    format!("map `{label}`: {e}"),
                ));
                return None;
            }
        }
    }
    match Representation::new(quiver, field, dims, mats) {
        Ok(r) => Some((name, r)),
        Err(e) => {
            diags.push(Diagnostic::domain(&s.file, s.line, e.to_string()));
            None
        }
    }
}

fn parse_nrep(
    s: &Section,
    quivers: &BTreeMap<String, Arc<Quiver>>,
    reps: &BTreeMap<String, Representation>,
    diags: &mut Vec<Diagnostic>,
) -> Option<(String, NRepresentation)> {
    // Header: nrep <name> over (<q1>, ..., <qn>) field Q|F<p>
    let header = &s.header;
    let open = header.find('(');
    let close = header.rfind(')');
    let (Some(open), Some(close)) = (open, close) else {
        diags.push(Diagnostic::error(
            &s.file,
            s.line,
            "expected `nrep <name> over (<q1>, ..., <qn>) field Q|F<p>`".into(),
        ));
        return None;
    };
    let pre: Vec<&str> = header[..open].split_whitespace().collect();
    let post: Vec<&str> = header[close + 1..].split_whitespace().collect();
    if pre.len() != 3 || pre[2] != "over" || post.len() != 2 || post[0] != "field" {
        diags.push(Diagnostic::error(
            &s.file,
            s.line,
            "expected `nrep <name> over (<q1>, ..., <qn>) field Q|F<p>`".into(),
        ));
        return None;
    }
    let name = pre[1].to_string();
    let field = match parse_field(post[1]) {
        Ok(f) => f,
        Err(e) => {
            diags.push(Diagnostic::error(&s.file, s.line, e));
            return None;
        }
    };
    let mut level_quivers = Vec::new();
    for qn in header[open + 1..close].split(',') {
        let qn = qn.trim();
        match quivers.get(qn) {
            Some(q) => level_quivers.push(q.clone()),
            None => {
                diags.push(Diagnostic::error(
                    &s.file,
                    s.line,
                    format!("unresolved quiver `{qn}`"),
                ));
                return None;
            }
        }
    }
    let n = level_quivers.len();
    let mut comps: Vec<Option<Representation>> = vec![None; n];
    let mut link_literals: Vec<(usize, usize, String, String, Vec<Vec<String>>)> = Vec::new();
    for (line, text) in &s.body {
        let t: Vec<&str> = text.split_whitespace().collect();
        match t[0] {
            "component" if t.len() == 4 && t[2] == "=" => {
                let m: usize = match t[1].parse() {
                    Ok(m) if (1..=n).contains(&m) => m,
                    _ => {
                        diags.push(Diagnostic::error(
                            &s.file,
                            *line,
                            format!("bad component level `{}`", t[1]),
                        ));
                        return None;
                    }
                };
                match reps.get(t[3]) {
                    Some(r) if r.quiver == level_quivers[m - 1] && r.field == field => {
                        comps[m - 1] = Some(r.clone());
                    }
                    Some(_) => {
                        diags.push(Diagnostic::domain(
                            &s.file,
                            *line,
                            format!("representation `{}` does not fit level {m}", t[3]),
                        ));
                        return None;
                    }
                    None => {
                        diags.push(Diagnostic::error(
                            &s.file,
                            *line,
                            format!("unresolved representation `{}`", t[3]),
                        ));
                        return None;
                    }
                }
            }
            "link" if t.len() >= 6 && t[4] == "=" => {
                let m: usize = match t[1].parse() {
                    Ok(m) if (2..=n).contains(&m) => m,
                    _ => {
                        diags.push(Diagnostic::error(
                            &s.file,
                            *line,
                            format!("bad link level `{}`", t[1]),
                        ));
                        return None;
                    }
                };
                let literal = text.splitn(2, '=').nth(1).unwrap();
                match parse_matrix_literal(literal) {
                    Ok(rows) => {
                        link_literals.push((*line, m, t[2].to_string(), t[3].to_string(), rows))
                    }
                    Err(e) => {
                        diags.push(Diagnostic::error(&s.file, *line, e));
                        return None;
                    }
                }
            }
            _ => {
                diags.push(Diagnostic::error(
                    &s.file,
                    *line,
                    format!("bad line in nrep section: `{text}`"),
                ));
                return None;
            }
        }
    }
    let mut resolved = Vec::with_capacity(n);
    for (m, c) in comps.into_iter().enumerate() {
        match c {
            Some(r) => resolved.push(r),
            None => {
                diags.push(Diagnostic::error(
                    &s.file,
                    s.line,
                    format!("component {} not given", m + 1),
                ));
                return None;
            }
        }
    }
    // Default all links to zero, then fill the given ones.
    let mut links: Vec<Vec<Vec<ExactMatrix>>> = Vec::with_capacity(n.saturating_sub(1));
    for l in 0..n.saturating_sub(1) {
        let (lo, hi) = (&resolved[l], &resolved[l + 1]);
        links.push(
            lo.quiver
                .arrows
                .iter()
                .map(|g| {
                    hi.quiver
                        .arrows
                        .iter()
                        .map(|d| {
                            ExactMatrix::zeros(field, hi.dim_at(&d.source), lo.dim_at(&g.target))
                        })
                        .collect()
                })
                .collect(),
        );
    }
    for (line, m, lower, upper, literal) in link_literals {
        let l = m - 2;
        let (Some(gi), Some(di)) = (
            level_quivers[l].arrow_index(&lower),
            level_quivers[l + 1].arrow_index(&upper),
        ) else {
            diags.push(Diagnostic::error(
                &s.file,
                line,
                format!("unresolved arrow pair (`{lower}`, `{upper}`) at level {m}"),
            ));
            return None;
        };
        let shape = (links[l][gi][di].rows(), links[l][gi][di].cols());
        match build_matrix(field, shape.0, shape.1, &literal) {
            Ok(mat) => links[l][gi][di] = mat,
            Err(e) => {
                diags.push(Diagnostic::domain(
                    &s.file,
                    line,
                    format!("link {m} {lower} {upper}: {e}"),
                ));
                return None;
            }
        }
    }
    match NRepresentation::new(resolved, links) {
        Ok(v) => Some((name, v)),
        Err(e) => {
            diags.push(Diagnostic::domain(&s.file, s.line, e.to_string()));
            None
        }
    }
}

enum ParsedMorphism {
    Rep(RepMorphism),
    NRep(NRepMorphism),
}

fn parse_morphism(
    s: &Section,
    ws: &Workspace,
    diags: &mut Vec<Diagnostic>,
) -> Option<(String, ParsedMorphism)> {
    let toks: Vec<&str> = s.header.split_whitespace().collect();
    if toks.len() != 6 || toks[2] != ":" || toks[4] != "->" {
        diags.push(Diagnostic::error(
            &s.file,
            s.line,
            "expected `morphism <name> : <source> -> <target>`".into(),
        ));
        return None;
    }
    let name = toks[1].to_string();
    let (src_name, tgt_name) = (toks[3], toks[5]);
    if let (Some(a), Some(b)) = (ws.reps.get(src_name), ws.reps.get(tgt_name)) {
        let field = a.field;
        let mut comps: Vec<ExactMatrix> = (0..a.dims.len())
            .map(|i| ExactMatrix::zeros(field, b.dims[i], a.dims[i]))
            .collect();
        for (line, text) in &s.body {
            let t: Vec<&str> = text.split_whitespace().collect();
            if t[0] != "at" || t.len() < 3 || t[2] != "=" {
                diags.push(Diagnostic::error(
                    &s.file,
                    *line,
                    format!("expected `at <vertex> = [[...]]`, got `{text}`"),
                ));
                return None;
            }
            let Some(i) = a.quiver.vertex_index(t[1]) else {
                diags.push(Diagnostic::error(
                    &s.file,
                    *line,
                    format!("unresolved vertex `{}`", t[1]),
                ));
                return None;
            };
            let literal = text.splitn(2, '=').nth(1).unwrap();
            let rows = match parse_matrix_literal(literal) {
                Ok(r) => r,
                Err(e) => {
                    diags.push(Diagnostic::error(&s.file, *line, e));
                    return None;
                }
            };
            match build_matrix(field, b.dims[i], a.dims[i], &rows) {
                Ok(m) => comps[i] = m,
                Err(e) => {
                    diags.push(Diagnostic::domain(&s.file, *line, e));
                    return None;
                }
            }
        }
        return match RepMorphism::new(a.clone(), b.clone(), comps) {
            Ok(f) => Some((name, ParsedMorphism::Rep(f))),
            Err(e) => {
                diags.push(Diagnostic::domain(&s.file, s.line, e.to_string()));
                None
            }
        };
    }
    if let (Some(a), Some(b)) = (ws.nreps.get(src_name), ws.nreps.get(tgt_name)) {
        match parse_nrep_morphism_body(s, a, b, diags) {
            Some(f) => return Some((name, ParsedMorphism::NRep(f))),
            None => return None,
        }
    }
    diags.push(Diagnostic::error(
        &s.file,
        s.line,
        format!("unresolved morphism endpoints `{src_name}` -> `{tgt_name}`"),
    ));
    None
}

/// Parses `level <m> at <v> = [[...]]` lines into a verified morphism
/// between two given n-representations; omitted components are zero.
fn parse_nrep_morphism_body(
    s: &Section,
    a: &NRepresentation,
    b: &NRepresentation,
    diags: &mut Vec<Diagnostic>,
) -> Option<NRepMorphism> {
    parse_nrep_morphism_lines(&s.file, &s.body, s.line, a, b, diags)
}

fn parse_nrep_morphism_lines(
    file: &str,
    body: &[(usize, String)],
    header_line: usize,
    a: &NRepresentation,
    b: &NRepresentation,
    diags: &mut Vec<Diagnostic>,
) -> Option<NRepMorphism> {
    if !a.same_tuple(b) {
        diags.push(Diagnostic::domain(
            file,
            header_line,
            "morphism endpoints are over different quiver tuples".into(),
        ));
        return None;
    }
    let field = a.field();
    let n = a.level_count();
    let mut comps: Vec<Vec<ExactMatrix>> = (0..n)
        .map(|m| {
            (0..a.quivers[m].vertex_count())
                .map(|i| ExactMatrix::zeros(field, b.comps[m].dims[i], a.comps[m].dims[i]))
                .collect()
        })
        .collect();
    for (line, text) in body {
        let t: Vec<&str> = text.split_whitespace().collect();
        if t.len() < 6 || t[0] != "level" || t[2] != "at" || t[4] != "=" {
            diags.push(Diagnostic::error(
                file,
                *line,
                format!("expected `level <m> at <vertex> = [[...]]`, got `{text}`"),
            ));
            return None;
        }
        let m: usize = match t[1].parse() {
            Ok(m) if (1..=n).contains(&m) => m,
            _ => {
                diags.push(Diagnostic::error(
                    file,
                    *line,
                    format!("bad level `{}`", t[1]),
                ));
                return None;
            }
        };
        let Some(i) = a.quivers[m - 1].vertex_index(t[3]) else {
            diags.push(Diagnostic::error(
                file,
                *line,
                format!("unresolved vertex `{}` at level {m}", t[3]),
            ));
            return None;
        };
        let literal = text.splitn(2, '=').nth(1).unwrap();
        let rows = match parse_matrix_literal(literal) {
            Ok(r) => r,
            Err(e) => {
                diags.push(Diagnostic::error(file, *line, e));
                return None;
            }
        };
        match build_matrix(field, b.comps[m - 1].dims[i], a.comps[m - 1].dims[i], &rows) {
            Ok(mat) => comps[m - 1][i] = mat,
            Err(e) => {
                diags.push(Diagnostic::domain(file, *line, e));
                return None;
            }
        }
    }
    let mut comp_morphisms = Vec::with_capacity(n);
    for (m, c) in comps.into_iter().enumerate() {
        match RepMorphism::new(a.comps[m].clone(), b.comps[m].clone(), c) {
            Ok(f) => comp_morphisms.push(f),
            Err(e) => {
                diags.push(Diagnostic::domain(
                    file,
                    header_line,
                    format!("level {}: {e}", m + 1),
                ));
                return None;
            }
        }
    }
    match NRepMorphism::new(a.clone(), b.clone(), comp_morphisms) {
        Ok(f) => Some(f),
        Err(e) => {
            diags.push(Diagnostic::domain(file, header_line, e.to_string()));
            None
        }
    }
}

fn parse_diagram(
    s: &Section,
    ws: &Workspace,
    diags: &mut Vec<Diagnostic>,
) -> Option<(String, NRepDiagram)> {
    let toks: Vec<&str> = s.header.split_whitespace().collect();
    if toks.len() != 4 || toks[2] != "shape" {
        diags.push(Diagnostic::error(
            &s.file,
            s.line,
            "expected `diagram <name> shape <quiver>`".into(),
        ));
        return None;
    }
    let name = toks[1].to_string();
    let Some(shape) = ws.quivers.get(toks[3]).cloned() else {
        diags.push(Diagnostic::error(
            &s.file,
            s.line,
            format!("unresolved quiver `{}`", toks[3]),
        ));
        return None;
    };
    let mut objects: Vec<Option<NRepresentation>> = vec![None; shape.vertex_count()];
    let mut edges: Vec<Option<NRepMorphism>> = vec![None; shape.arrow_count()];
    for (line, text) in &s.body {
        let t: Vec<&str> = text.split_whitespace().collect();
        match t[0] {
            "object" if t.len() == 4 && t[2] == "=" => {
                let (Some(i), Some(v)) = (shape.vertex_index(t[1]), ws.nreps.get(t[3])) else {
                    diags.push(Diagnostic::error(
                        &s.file,
                        *line,
                        format!("unresolved object assignment `{text}`"),
                    ));
                    return None;
                };
                objects[i] = Some(v.clone());
            }
            "edge" if t.len() == 4 && t[2] == "=" => {
                let (Some(i), Some(f)) = (shape.arrow_index(t[1]), ws.nrep_morphisms.get(t[3]))
                else {
                    diags.push(Diagnostic::error(
                        &s.file,
                        *line,
                        format!("unresolved edge assignment `{text}`"),
                    ));
                    return None;
                };
                edges[i] = Some(f.clone());
            }
            _ => {
                diags.push(Diagnostic::error(
                    &s.file,
                    *line,
                    format!("bad line in diagram section: `{text}`"),
                ));
                return None;
            }
        }
    }
    let objects: Option<Vec<_>> = objects.into_iter().collect();
    let edges: Option<Vec<_>> = edges.into_iter().collect();
    let (Some(objects), Some(edges)) = (objects, edges) else {
        diags.push(Diagnostic::error(
            &s.file,
            s.line,
            "not every shape vertex/arrow was assigned".into(),
        ));
        return None;
    };
    match NRepDiagram::new(shape, objects, edges) {
        Ok(d) => Some((name, d)),
        Err(e) => {
            diags.push(Diagnostic::domain(&s.file, s.line, e.to_string()));
            None
        }
    }
}

fn parse_coalgebra(
    s: &Section,
    ws: &Workspace,
    diags: &mut Vec<Diagnostic>,
) -> Option<(String, CoalgebraData)> {
    let toks: Vec<&str> = s.header.split_whitespace().collect();
    if toks.len() != 4 || toks[2] != "carrier" {
        diags.push(Diagnostic::error(
            &s.file,
            s.line,
            "expected `coalgebra <name> carrier <nrep>`".into(),
        ));
        return None;
    }
    let name = toks[1].to_string();
    let Some(carrier) = ws.nreps.get(toks[3]).cloned() else {
        diags.push(Diagnostic::error(
            &s.file,
            s.line,
            format!("unresolved nrep `{}`", toks[3]),
        ));
        return None;
    };
    // Split the body at `comult` / `counit` block headers.
    let mut comult_body = Vec::new();
    let mut counit_body = Vec::new();
    let mut current: Option<&mut Vec<(usize, String)>> = None;
    for (line, text) in &s.body {
        match text.as_str() {
            "comult" => current = Some(&mut comult_body),
            "counit" => current = Some(&mut counit_body),
            _ => match current.as_mut() {
                Some(buf) => buf.push((*line, text.clone())),
                None => {
                    diags.push(Diagnostic::error(
                        &s.file,
                        *line,
                        "expected `comult` or `counit` block header".into(),
                    ));
                    return None;
                }
            },
        }
    }
    let tensor = match nrep_tensor(&carrier, &carrier) {
        Ok(t) => t,
        Err(e) => {
            diags.push(Diagnostic::domain(&s.file, s.line, e.to_string()));
            return None;
        }
    };
    let unit = match NRepresentation::unit(&carrier.quivers, carrier.field()) {
        Ok(u) => u,
        Err(e) => {
            diags.push(Diagnostic::domain(&s.file, s.line, e.to_string()));
            return None;
        }
    };
    let comult =
        parse_nrep_morphism_lines(&s.file, &comult_body, s.line, &carrier, &tensor, diags)?;
    let counit = parse_nrep_morphism_lines(&s.file, &counit_body, s.line, &carrier, &unit, diags)?;
    Some((
        name,
        CoalgebraData {
            carrier,
            comult,
            counit,
            file: s.file.clone(),
            line: s.line,
        },
    ))
}

/// Parses files given as `(name, content)` pairs. Resolution is two-pass:
/// all sections are collected before any cross-reference is resolved, so
/// declaration order never matters.
pub fn parse_files(files: &[(String, String)]) -> Result<Workspace, Vec<Diagnostic>> {
    let mut diags = Vec::new();
    let sections = split_sections(files, &mut diags);
    let mut ws = Workspace::default();
    let mut names: BTreeMap<&'static str, std::collections::BTreeSet<String>> = BTreeMap::new();

    let order = [
        SectionKind::Quiver,
        SectionKind::Representation,
        SectionKind::NRep,
        SectionKind::Morphism,
        SectionKind::Diagram,
        SectionKind::Coalgebra,
    ];
    for kind in order {
        for s in sections.iter().filter(|s| s.kind == kind) {
            match kind {
                SectionKind::Quiver => {
                    if let Some((name, q)) = parse_quiver(s, &mut diags) {
                        if check_duplicate(
                            names.entry("quiver").or_default(),
                            &name,
                            "quiver",
                            s,
                            &mut diags,
                        ) {
                            ws.quivers.insert(name, q);
                        }
                    }
                }
                SectionKind::Representation => {
                    if let Some((name, r)) = parse_representation(s, &ws.quivers, &mut diags) {
                        if check_duplicate(
                            names.entry("representation").or_default(),
                            &name,
                            "representation",
                            s,
                            &mut diags,
                        ) {
                            ws.reps.insert(name, r);
                        }
                    }
                }
                SectionKind::NRep => {
                    if let Some((name, v)) = parse_nrep(s, &ws.quivers, &ws.reps, &mut diags) {
                        if check_duplicate(
                            names.entry("nrep").or_default(),
                            &name,
                            "nrep",
                            s,
                            &mut diags,
                        ) {
                            ws.nreps.insert(name, v);
                        }
                    }
                }
                SectionKind::Morphism => {
                    if let Some((name, f)) = parse_morphism(s, &ws, &mut diags) {
                        if check_duplicate(
                            names.entry("morphism").or_default(),
                            &name,
                            "morphism",
                            s,
                            &mut diags,
                        ) {
                            match f {
                                ParsedMorphism::Rep(f) => {
                                    ws.rep_morphisms.insert(name, f);
                                }
                                ParsedMorphism::NRep(f) => {
                                    ws.nrep_morphisms.insert(name, f);
                                }
                            }
                        }
                    }
                }
                SectionKind::Diagram => {
                    if let Some((name, d)) = parse_diagram(s, &ws, &mut diags) {
                        if check_duplicate(
                            names.entry("diagram").or_default(),
                            &name,
                            "diagram",
                            s,
                            &mut diags,
                        ) {
                            ws.diagrams.insert(name, d);
                        }
                    }
                }
                SectionKind::Coalgebra => {
                    if let Some((name, c)) = parse_coalgebra(s, &ws, &mut diags) {
                        if check_duplicate(
                            names.entry("coalgebra").or_default(),
                            &name,
                            "coalgebra",
                            s,
                            &mut diags,
                        ) {
                            ws.coalgebras.insert(name, c);
                        }
                    }
                }
            }
        }
    }
    if diags.iter().any(|d| d.severity == Severity::Error) {
        Err(diags)
    } else {
        Ok(ws)
    }
}

pub fn matrix_literal(m: &ExactMatrix) -> String {
    let mut out = String::from("[");
    for r in 0..m.rows() {
        if r > 0 {
            out.push_str(", ");
        }
        out.push('[');
        for c in 0..m.cols() {
            if c > 0 {
                out.push_str(", ");
            }
            out.push_str(&m.get(r, c).to_literal());
        }
        out.push(']');
    }
    out.push(']');
    out
}

pub fn scalar_literal(s: &Scalar) -> String {
    s.to_literal()
}

pub fn field_literal(f: FieldSpec) -> String {
    f.to_string()
}

/// Canonical printer: output re-parses to an equal quiver.
pub fn print_quiver(q: &Quiver) -> String {
    let mut out = String::new();
    writeln!(out, "quiver {}", q.name).unwrap();
    write!(out, "vertex").unwrap();
    for v in &q.vertices {
        write!(out, " {v}").unwrap();
    }
    out.push('\n');
    for a in &q.arrows {
        writeln!(out, "arrow {} : {} -> {}", a.label, a.source, a.target).unwrap();
    }
    out
}

/// Canonical printer: every vertex dimension, maps only when nonempty.
pub fn print_representation(name: &str, r: &Representation) -> String {
    let mut out = String::new();
    writeln!(
        out,
        "representation {} over {} field {}",
        name, r.quiver.name, r.field
    )
    .unwrap();
    for (v, d) in r.quiver.vertices.iter().zip(&r.dims) {
        writeln!(out, "space {v} dim {d}").unwrap();
    }
    for (a, m) in r.quiver.arrows.iter().zip(&r.mats) {
        if m.rows() > 0 && m.cols() > 0 {
            writeln!(out, "map {} = {}", a.label, matrix_literal(m)).unwrap();
        }
    }
    out
}

/// Canonical printer for an n-representation together with its component
/// representations (named `<name>.c<m>`).
pub fn print_nrep(name: &str, v: &NRepresentation) -> String {
    let mut out = String::new();
    for (m, c) in v.comps.iter().enumerate() {
        out.push_str(&print_representation(&format!("{}.c{}", name, m + 1), c));
    }
    write!(out, "nrep {name} over (").unwrap();
    for (m, q) in v.quivers.iter().enumerate() {
        if m > 0 {
            out.push_str(", ");
        }
        out.push_str(&q.name);
    }
    writeln!(out, ") field {}", v.field()).unwrap();
    for m in 1..=v.level_count() {
        writeln!(out, "component {m} = {name}.c{m}").unwrap();
    }
    for l in 0..v.level_count() - 1 {
        for (gi, g) in v.quivers[l].arrows.iter().enumerate() {
            for (di, d) in v.quivers[l + 1].arrows.iter().enumerate() {
                let mat = &v.links[l][gi][di];
                if mat.rows() > 0 && mat.cols() > 0 {
                    writeln!(
                        out,
                        "link {} {} {} = {}",
                        l + 2,
                        g.label,
                        d.label,
                        matrix_literal(mat)
                    )
                    .unwrap();
                }
            }
        }
    }
    out
}

/// Canonical printer for an n-representation morphism between named
/// endpoints; zero and empty components are omitted.
pub fn print_nrep_morphism(name: &str, src: &str, tgt: &str, f: &NRepMorphism) -> String {
    let mut out = String::new();
    writeln!(out, "morphism {name} : {src} -> {tgt}").unwrap();
    for (m, fm) in f.comp_morphisms.iter().enumerate() {
        for (v, mat) in f.source.quivers[m].vertices.iter().zip(&fm.comps) {
            if mat.rows() > 0 && mat.cols() > 0 && !mat.is_zero() {
                writeln!(out, "level {} at {} = {}", m + 1, v, matrix_literal(mat)).unwrap();
            }
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    const EXAMPLE: &str = r#"
# worked two-level example
quiver Q
vertex 1 2
arrow a : 1 -> 2

quiver Qp
vertex 1 2 3 4
arrow b1 : 1 -> 3
arrow b2 : 2 -> 3
arrow b3 : 4 -> 3

representation V over Q field Q
space 1 dim 1
space 2 dim 1
map a = [[1]]

representation M over Qp field Q
space 1 dim 1
space 2 dim 1
space 3 dim 2
space 4 dim 1
map b1 = [[1], [0]]
map b2 = [[0], [1]]
map b3 = [[1], [1]]

nrep Mbar over (Q, Qp) field Q
component 1 = V
component 2 = M
link 2 a b1 = [[1]]
link 2 a b2 = [[1]]
link 2 a b3 = [[1]]
"#;

    #[test]
    fn worked_bundle_parses_clean() {
        let ws = parse_files(&[("bundle.qrep".into(), EXAMPLE.into())]).unwrap();
        assert_eq!(ws.quivers.len(), 2);
        assert_eq!(ws.reps.len(), 2);
        assert_eq!(ws.nreps.len(), 1);
        let m = &ws.nreps["Mbar"];
        assert_eq!(m.total_dim(), 7);
        assert_eq!(
            m.link(2, "a", "b3"),
            &ExactMatrix::from_i64(FieldSpec::Rationals, &[&[1]])
        );
    }

    #[test]
    fn empty_input_is_empty_workspace() {
        let ws = parse_files(&[]).unwrap();
        assert!(ws.quivers.is_empty());
        let ws2 = parse_files(&[("a.qrep".into(), "# only comments\n\n".into())]).unwrap();
        assert!(ws2.quivers.is_empty());
    }

    #[test]
    fn forward_references_resolve() {
        // nrep first, then reps, then quivers: two-pass resolution.
        let mut lines: Vec<&str> = EXAMPLE.trim().split("\n\n").collect();
        lines.reverse();
        let reordered = lines.join("\n\n");
        let ws = parse_files(&[("r.qrep".into(), reordered)]).unwrap();
        assert_eq!(ws.nreps["Mbar"].total_dim(), 7);
    }

    #[test]
    fn syntax_error_reports_line() {
        let bad = "quiver Q\nvertex 1 2\narrow a 1 -> 2\n";
        let diags = parse_files(&[("f.qrep".into(), bad.into())]).unwrap_err();
        assert_eq!(diags[0].line, 3);
        assert_eq!(diags[0].kind, DiagnosticKind::Syntax);
    }

    #[test]
    fn unresolved_reference_reported() {
        let bad = "representation V over Missing field Q\n";
        let diags = parse_files(&[("f.qrep".into(), bad.into())]).unwrap_err();
        assert!(diags[0].message.contains("Missing"));
    }

    #[test]
    fn duplicate_name_reported() {
        let bad = "quiver Q\nvertex 1\n\nquiver Q\nvertex 2\n";
        let diags = parse_files(&[("f.qrep".into(), bad.into())]).unwrap_err();
        assert!(diags[0].message.contains("duplicate"));
    }

    #[test]
    fn shape_mismatch_is_domain_error() {
        let bad = "quiver Q\nvertex 1 2\narrow a : 1 -> 2\n\n\
                   representation V over Q field Q\nspace 1 dim 1\nspace 2 dim 1\n\
                   map a = [[1, 2]]\n";
        let diags = parse_files(&[("f.qrep".into(), bad.into())]).unwrap_err();
        assert_eq!(diags[0].kind, DiagnosticKind::Domain);
    }

    #[test]
    fn morphism_parses_and_verifies() {
        let src = format!(
            "{EXAMPLE}\n\
             nrep Nbar over (Q, Qp) field Q\n\
             component 1 = V\n\
             component 2 = M\n\
             link 2 a b1 = [[1]]\n\n\
             morphism z : Mbar -> Nbar\n\n\
             morphism idm : Mbar -> Mbar\n\
             level 1 at 1 = [[1]]\n\
             level 1 at 2 = [[1]]\n\
             level 2 at 1 = [[1]]\n\
             level 2 at 2 = [[1]]\n\
             level 2 at 3 = [[1, 0], [0, 1]]\n\
             level 2 at 4 = [[1]]\n"
        );
        let ws = parse_files(&[("f.qrep".into(), src)]).unwrap();
        assert!(ws.nrep_morphisms["z"].is_zero_morphism());
        assert!(ws.nrep_morphisms["idm"].is_iso());
    }

    #[test]
    fn noncommuting_morphism_is_domain_diagnostic() {
        let src = format!(
            "{EXAMPLE}\n\
             nrep Nbar over (Q, Qp) field Q\n\
             component 1 = V\n\
             component 2 = M\n\
             link 2 a b1 = [[1]]\n\n\
             morphism bad : Mbar -> Nbar\n\
             level 1 at 1 = [[1]]\n\
             level 1 at 2 = [[1]]\n\
             level 2 at 1 = [[1]]\n\
             level 2 at 2 = [[1]]\n\
             level 2 at 3 = [[1, 0], [0, 1]]\n\
             level 2 at 4 = [[1]]\n"
        );
        let diags = parse_files(&[("f.qrep".into(), src)]).unwrap_err();
        assert_eq!(diags[0].kind, DiagnosticKind::Domain);
        assert!(diags[0].message.contains("link"));
    }

    #[test]
    fn diagram_and_coalgebra_parse() {
        let src = format!(
            "{EXAMPLE}\n\
             quiver pt\n\
             vertex X\n\n\
             diagram D shape pt\n\
             object X = Mbar\n\n\
             representation U1 over Q field Q\n\
             space 1 dim 1\n\
             space 2 dim 1\n\
             map a = [[1]]\n\n\
             representation U2 over Qp field Q\n\
             space 1 dim 1\nspace 2 dim 1\nspace 3 dim 1\nspace 4 dim 1\n\
             map b1 = [[1]]\nmap b2 = [[1]]\nmap b3 = [[1]]\n\n\
             nrep U over (Q, Qp) field Q\n\
             component 1 = U1\n\
             component 2 = U2\n\
             link 2 a b1 = [[1]]\nlink 2 a b2 = [[1]]\nlink 2 a b3 = [[1]]\n\n\
             coalgebra C carrier U\n\
             comult\n\
             level 1 at 1 = [[1]]\nlevel 1 at 2 = [[1]]\n\
             level 2 at 1 = [[1]]\nlevel 2 at 2 = [[1]]\n\
             level 2 at 3 = [[1]]\nlevel 2 at 4 = [[1]]\n\
             counit\n\
             level 1 at 1 = [[1]]\nlevel 1 at 2 = [[1]]\n\
             level 2 at 1 = [[1]]\nlevel 2 at 2 = [[1]]\n\
             level 2 at 3 = [[1]]\nlevel 2 at 4 = [[1]]\n"
        );
        let ws = parse_files(&[("f.qrep".into(), src)]).unwrap();
        assert_eq!(ws.diagrams["D"].objects.len(), 1);
        ws.coalgebras["C"].check().unwrap();
    }

    #[test]
    fn parse_print_parse_identity() {
        let ws = parse_files(&[("b.qrep".into(), EXAMPLE.into())]).unwrap();
        let mut printed = String::new();
        for (n, q) in &ws.quivers {
            let _ = n;
            printed.push_str(&print_quiver(q));
            printed.push('\n');
        }
        for (n, r) in &ws.reps {
            printed.push_str(&print_representation(n, r));
            printed.push('\n');
        }
        printed.push_str(&print_nrep("Mbar2", &ws.nreps["Mbar"]));
        let ws2 = parse_files(&[("p.qrep".into(), printed.clone())]).unwrap();
        assert_eq!(ws2.quivers["Q"], ws.quivers["Q"]);
        assert_eq!(ws2.reps["V"], ws.reps["V"]);
        assert_eq!(ws2.nreps["Mbar2"], ws.nreps["Mbar"]);
        // Printing the reparsed workspace gives identical bytes.
        let mut printed2 = String::new();
        for q in ws2.quivers.values().filter(|q| q.name != "NQ") {
            printed2.push_str(&print_quiver(q));
            printed2.push('\n');
        }
        let mut first = String::new();
        for q in ws.quivers.values() {
            first.push_str(&print_quiver(q));
            first.push('\n');
        }
        assert_eq!(first, printed2);
    }

    #[test]
    fn prime_field_entries() {
        let src = "quiver Q\nvertex 1 2\narrow a : 1 -> 2\n\n\
                   representation V over Q field F7\n\
                   space 1 dim 1\nspace 2 dim 1\nmap a = [[-3]]\n";
        let ws = parse_files(&[("f.qrep".into(), src.into())]).unwrap();
        let m = ws.reps["V"].mat("a");
        assert_eq!(m.get(0, 0).to_literal(), "4");
    }

    #[test]
    fn zero_dimensional_pieces_omitted() {
        let src = "quiver Q\nvertex 1 2\narrow a : 1 -> 2\n\n\
                   representation S over Q field Q\nspace 1 dim 1\n";
        let ws = parse_files(&[("f.qrep".into(), src.into())]).unwrap();
        assert_eq!(ws.reps["S"].dims, vec![1, 0]);
        let printed = format!(
            "{}\n{}",
            print_quiver(&ws.quivers["Q"]),
            print_representation("S", &ws.reps["S"])
        );
        let ws2 = parse_files(&[("p.qrep".into(), printed)]).unwrap();
        assert_eq!(ws2.reps["S"], ws.reps["S"]);
    }
}
