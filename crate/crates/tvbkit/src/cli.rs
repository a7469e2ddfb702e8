//! Line-oriented input documents and the command front end.
//!
//! A document has sections `[fan]`, `[ideal]`, `[diagram]` and optionally
//! `[fixtures]`, each holding `key = value` lines whose values are nested
//! integer (or `p/q` rational) lists in bracket notation.  Floats are
//! rejected; all indices are 0-based.  [`run`] executes one command against
//! a parsed document and returns a report in both human-readable and stable
//! JSON form, together with the process exit code: 0 for success, 2 for a
//! validation failure, 3 when a certificate backing the computation is
//! missing and `--force` was not given.

use crate::bundle::{CiWitness, Fixtures, PEClass, SymDegreeOneCertificate, ToricVectorBundle};
use crate::exact::{Int, QMatrix, Rat, ZMatrix};
use crate::fano::{
    ci_anticanonical, kaneyama_anticanonical, kaneyama_classify, kaneyama_validate,
    tangent_bundle,
};
use crate::matroid::LinearIdealMatrix;
use crate::nobody::{
    build_m, global_body, nobody_of_class, p_alpha_beta, precondition_certificate,
    section_dimension, PrimeConeCertificate,
};
use crate::toric::Fan;
use num_traits::One;
use serde_json::{json, Value};
use std::fmt;
use std::fmt::Write as _;

// ---------------------------------------------------------------------------
// Document parsing
// ---------------------------------------------------------------------------

/// A parse failure with 1-based line and column numbers.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ParseError {
    pub line: usize,
    pub col: usize,
    pub msg: String,
}

impl fmt::Display for ParseError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "line {}, column {}: {}", self.line, self.col, self.msg)
    }
}

impl std::error::Error for ParseError {}

#[derive(Debug, Clone)]
enum Val {
    Num { v: Rat, line: usize, col: usize },
    List { items: Vec<Val>, line: usize, col: usize },
}

impl Val {
    fn pos(&self) -> (usize, usize) {
        match self {
            Val::Num { line, col, .. } | Val::List { line, col, .. } => (*line, *col),
        }
    }

    fn err(&self, msg: impl Into<String>) -> ParseError {
        let (line, col) = self.pos();
        ParseError { line, col, msg: msg.into() }
    }

    fn list(&self) -> Result<&[Val], ParseError> {
        match self {
            Val::List { items, .. } => Ok(items),
            Val::Num { .. } => Err(self.err("expected a list")),
        }
    }

    fn rat(&self) -> Result<Rat, ParseError> {
        match self {
            Val::Num { v, .. } => Ok(v.clone()),
            Val::List { .. } => Err(self.err("expected a number")),
        }
    }

    fn int(&self) -> Result<Int, ParseError> {
        let v = self.rat()?;
        if v.denom().is_one() {
            Ok(v.numer().clone())
        } else {
            Err(self.err("expected an integer, found a fraction"))
        }
    }

    fn index(&self) -> Result<usize, ParseError> {
        let v = self.int()?;
        usize::try_from(&v).map_err(|_| self.err("expected a nonnegative index"))
    }

    fn int_row(&self) -> Result<Vec<Int>, ParseError> {
        self.list()?.iter().map(|x| x.int()).collect()
    }

    fn int_matrix(&self) -> Result<Vec<Vec<Int>>, ParseError> {
        let rows: Vec<Vec<Int>> =
            self.list()?.iter().map(|r| r.int_row()).collect::<Result<_, _>>()?;
        if let Some(w) = rows.first().map(Vec::len) {
            for r in &rows {
                if r.len() != w {
                    return Err(self.err("rows have inconsistent lengths"));
                }
            }
        }
        Ok(rows)
    }

    fn rat_matrix(&self) -> Result<Vec<Vec<Rat>>, ParseError> {
        let rows: Vec<Vec<Rat>> = self
            .list()?
            .iter()
            .map(|r| r.list()?.iter().map(|x| x.rat()).collect())
            .collect::<Result<_, _>>()?;
        if let Some(w) = rows.first().map(Vec::len) {
            for r in &rows {
                if r.len() != w {
                    return Err(self.err("rows have inconsistent lengths"));
                }
            }
        }
        Ok(rows)
    }

    fn index_lists(&self) -> Result<Vec<Vec<usize>>, ParseError> {
        self.list()?
            .iter()
            .map(|r| r.list()?.iter().map(|x| x.index()).collect())
            .collect()
    }
}

struct Cursor {
    chars: Vec<char>,
    pos: usize,
    line: usize,
    col: usize,
}

impl Cursor {
    fn new(text: &str) -> Cursor {
        Cursor { chars: text.chars().collect(), pos: 0, line: 1, col: 1 }
    }

    fn peek(&self) -> Option<char> {
        self.chars.get(self.pos).copied()
    }

    fn bump(&mut self) -> Option<char> {
        let c = self.peek()?;
        self.pos += 1;
        if c == '\n' {
            self.line += 1;
            self.col = 1;
        } else {
            self.col += 1;
        }
        Some(c)
    }

    fn error(&self, msg: impl Into<String>) -> ParseError {
        ParseError { line: self.line, col: self.col, msg: msg.into() }
    }

    /// Skip whitespace and `#` comments. When `stop_at_newline` is set, stop
    /// in front of a line break instead of consuming it.
    fn skip(&mut self, stop_at_newline: bool) {
        loop {
            match self.peek() {
                Some('#') => {
                    while self.peek().is_some_and(|c| c != '\n') {
                        self.bump();
                    }
                }
                Some('\n') if stop_at_newline => return,
                Some(c) if c.is_whitespace() => {
                    self.bump();
                }
                _ => return,
            }
        }
    }

    fn ident(&mut self) -> Result<String, ParseError> {
        let mut s = String::new();
        while self.peek().is_some_and(|c| c.is_ascii_alphanumeric() || c == '_') {
            s.push(self.bump().unwrap());
        }
        if s.is_empty() {
            Err(self.error("expected an identifier"))
        } else {
            Ok(s)
        }
    }

    fn number(&mut self) -> Result<Val, ParseError> {
        let (line, col) = (self.line, self.col);
        let mut numer = String::new();
        if self.peek() == Some('-') {
            numer.push(self.bump().unwrap());
        }
        while self.peek().is_some_and(|c| c.is_ascii_digit()) {
            numer.push(self.bump().unwrap());
        }
        if self.peek() == Some('.') {
            return Err(self.error("floating point numbers are not accepted; use p/q"));
        }
        if numer.is_empty() || numer == "-" {
            return Err(self.error("expected a number"));
        }
        let n: Int = numer.parse().unwrap();
        let v = if self.peek() == Some('/') {
            self.bump();
            let mut denom = String::new();
            while self.peek().is_some_and(|c| c.is_ascii_digit()) {
                denom.push(self.bump().unwrap());
            }
            if denom.is_empty() {
                return Err(self.error("expected a denominator after '/'"));
            }
            let d: Int = denom.parse().unwrap();
            if d == Int::from(0) {
                return Err(self.error("zero denominator"));
            }
            Rat::new(n, d)
        } else {
            Rat::from(n)
        };
        Ok(Val::Num { v, line, col })
    }

    fn value(&mut self) -> Result<Val, ParseError> {
        self.skip(false);
        match self.peek() {
            Some('[') => {
                let (line, col) = (self.line, self.col);
                self.bump();
                let mut items = Vec::new();
                loop {
                    self.skip(false);
                    if self.peek() == Some(']') {
                        self.bump();
                        return Ok(Val::List { items, line, col });
                    }
                    items.push(self.value()?);
                    self.skip(false);
                    match self.peek() {
                        Some(',') => {
                            self.bump();
                        }
                        Some(']') => {}
                        _ => return Err(self.error("expected ',' or ']' in list")),
                    }
                }
            }
            Some(c) if c == '-' || c.is_ascii_digit() => self.number(),
            _ => Err(self.error("expected a value")),
        }
    }
}

/// A parsed input document: the fan is mandatory, ideal and diagram are
/// needed by every command except `tangent`.
#[derive(Debug, Clone)]
pub struct BundleDocument {
    pub fan: Fan,
    pub ideal: Option<LinearIdealMatrix>,
    pub diagram: Option<ZMatrix>,
    pub fixtures: Fixtures,
}

const SECTION_KEYS: &[(&str, &[&str])] = &[
    ("fan", &["dim", "rays", "max_cones"]),
    ("ideal", &["generators"]),
    ("diagram", &["rows"]),
    ("fixtures", &["extra_columns", "extra_degrees", "extra_M_rows"]),
];

pub fn parse_document(text: &str) -> Result<BundleDocument, ParseError> {
    let mut cur = Cursor::new(text);
    let mut section: Option<String> = None;
    let mut entries: Vec<(String, String, Val)> = Vec::new();
    loop {
        cur.skip(false);
        match cur.peek() {
            None => break,
            Some('[') => {
                cur.bump();
                let name = cur.ident()?;
                if cur.peek() != Some(']') {
                    return Err(cur.error("expected ']' after section name"));
                }
                cur.bump();
                if !SECTION_KEYS.iter().any(|(s, _)| *s == name) {
                    return Err(cur.error(format!("unknown section [{name}]")));
                }
                section = Some(name);
            }
            Some(_) => {
                let (kline, kcol) = (cur.line, cur.col);
                let key = cur.ident()?;
                let sec = section.clone().ok_or_else(|| ParseError {
                    line: kline,
                    col: kcol,
                    msg: format!("key '{key}' appears before any section header"),
                })?;
                let allowed = SECTION_KEYS.iter().find(|(s, _)| *s == sec).unwrap().1;
                if !allowed.contains(&key.as_str()) {
                    return Err(ParseError {
                        line: kline,
                        col: kcol,
                        msg: format!("unknown key '{key}' in section [{sec}]"),
                    });
                }
                if entries.iter().any(|(s, k, _)| *s == sec && *k == key) {
                    return Err(ParseError {
                        line: kline,
                        col: kcol,
                        msg: format!("duplicate key '{key}' in section [{sec}]"),
                    });
                }
                cur.skip(true);
                if cur.peek() != Some('=') {
                    return Err(cur.error("expected '=' after key"));
                }
                cur.bump();
                let v = cur.value()?;
                cur.skip(true);
                if cur.peek().is_some_and(|c| c != '\n') {
                    return Err(cur.error("unexpected trailing characters after value"));
                }
                entries.push((sec, key, v));
            }
        }
    }
    let get = |sec: &str, key: &str| entries.iter().find(|(s, k, _)| s == sec && k == key);
    let require = |sec: &str, key: &str| {
        get(sec, key).map(|(_, _, v)| v).ok_or(ParseError {
            line: cur.line,
            col: cur.col,
            msg: format!("missing key '{key}' in section [{sec}]"),
        })
    };

    let dim = require("fan", "dim")?.index()?;
    let rays = require("fan", "rays")?.int_matrix()?;
    let max_cones = require("fan", "max_cones")?.index_lists()?;
    let fan = Fan::new(dim, rays, max_cones);

    let ideal = match get("ideal", "generators") {
        Some((_, _, v)) => Some(
            LinearIdealMatrix::new(QMatrix::from_rows(v.rat_matrix()?))
                .map_err(|e| v.err(e))?,
        ),
        None => None,
    };
    let diagram = match get("diagram", "rows") {
        Some((_, _, v)) => Some(ZMatrix::from_rows(v.int_matrix()?)),
        None => None,
    };

    let mut fixtures = Fixtures::default();
    if let Some((_, _, v)) = get("fixtures", "extra_columns") {
        fixtures.extra_columns = v.int_matrix()?;
    }
    if let Some((_, _, v)) = get("fixtures", "extra_degrees") {
        for pair in v.list()? {
            let items = pair.list()?;
            if items.len() != 2 {
                return Err(pair.err("expected a [class, symdeg] pair"));
            }
            fixtures.extra_degrees.push((items[0].int_row()?, items[1].int()?));
        }
    }
    if let Some((_, _, v)) = get("fixtures", "extra_M_rows") {
        fixtures.extra_m_rows = v.int_matrix()?;
    }

    Ok(BundleDocument { fan, ideal, diagram, fixtures })
}

impl BundleDocument {
    pub fn bundle(&self) -> Result<ToricVectorBundle, String> {
        let ideal = self.ideal.clone().ok_or("the document has no [ideal] section")?;
        let diagram = self.diagram.clone().ok_or("the document has no [diagram] section")?;
        ToricVectorBundle::new(self.fan.clone(), ideal, diagram, self.fixtures.clone())
    }
}

// ---------------------------------------------------------------------------
// Reports
// ---------------------------------------------------------------------------

/// Result of one command: a stable JSON report, a human-readable rendering,
/// and the process exit code.
#[derive(Debug, Clone)]
pub struct Outcome {
    pub json: Value,
    pub text: String,
    pub exit: i32,
}

/// Options shared by the commands. `with_document` holds the *text* of the
/// second document for `extend`.
#[derive(Debug, Clone, Default)]
pub struct CommandOptions {
    pub class: Option<String>,
    pub flag: Option<String>,
    pub with_document: Option<String>,
    pub force: bool,
}

fn js(i: &Int) -> Value {
    Value::String(i.to_string())
}

fn jvec(v: &[Int]) -> Value {
    Value::Array(v.iter().map(js).collect())
}

fn jrows<'a>(rows: impl Iterator<Item = &'a [Int]>) -> Value {
    Value::Array(rows.map(jvec).collect())
}

fn jmatrix(m: &ZMatrix) -> Value {
    jrows((0..m.rows).map(|i| m.row(i)))
}

fn jclass(c: &PEClass) -> Value {
    json!({ "alpha": jvec(&c.alpha), "beta": js(&c.beta) })
}

fn class_str(c: &PEClass) -> String {
    let alpha: Vec<String> = c.alpha.iter().map(Int::to_string).collect();
    format!("{};{}", alpha.join(","), c.beta)
}

fn vec_str(v: &[Int]) -> String {
    let parts: Vec<String> = v.iter().map(Int::to_string).collect();
    format!("({})", parts.join(","))
}

/// Parse `α;β` with α comma-separated in the class basis printed by
/// `validate`.
pub fn parse_class(s: &str, rank: usize) -> Result<PEClass, String> {
    let (alpha_part, beta_part) =
        s.split_once(';').ok_or("class must be written as 'a1,...,ad;b'")?;
    let alpha: Vec<Int> = if alpha_part.trim().is_empty() {
        Vec::new()
    } else {
        alpha_part
            .split(',')
            .map(|t| t.trim().parse().map_err(|_| format!("bad integer '{}'", t.trim())))
            .collect::<Result<_, _>>()?
    };
    if alpha.len() != rank {
        return Err(format!("class has {} coordinates; the class lattice has rank {rank}", alpha.len()));
    }
    let beta: Int =
        beta_part.trim().parse().map_err(|_| format!("bad integer '{}'", beta_part.trim()))?;
    Ok(PEClass { alpha, beta })
}

fn certificate_status(e: &ToricVectorBundle) -> &'static str {
    match e.sym_degree_one_certificate() {
        Some(SymDegreeOneCertificate::Sparse) => "sparse",
        Some(SymDegreeOneCertificate::CompleteIntersection) => "complete-intersection",
        None => "none",
    }
}

fn schema(cmd: &str) -> Value {
    Value::String(format!("tvbkit/{cmd}/v1"))
}

fn certificate_gate(cmd: &str, e: &ToricVectorBundle, force: bool) -> Option<Outcome> {
    if certificate_status(e) != "none" || force {
        return None;
    }
    let msg = "no certificate that the Cox ring is generated in symmetric-power degree one \
               (the bundle is neither sparse nor a verified complete intersection, or extra \
               generators were supplied); pass --force to proceed anyway";
    Some(Outcome {
        json: json!({ "schema": schema(cmd), "error": "certificate missing", "detail": msg }),
        text: format!("warning: {msg}\n"),
        exit: 3,
    })
}

fn validated_bundle(doc: &BundleDocument) -> Result<Result<ToricVectorBundle, Outcome>, String> {
    let e = doc.bundle()?;
    let report = e.validate();
    if report.is_valid() {
        Ok(Ok(e))
    } else {
        Ok(Err(Outcome {
            json: json!({
                "schema": schema("invalid"),
                "error": "validation failure",
                "row_failures": report.row_failures,
                "cone_failures": report
                    .cone_witnesses
                    .iter()
                    .enumerate()
                    .filter(|(_, w)| w.is_none())
                    .map(|(i, _)| i)
                    .collect::<Vec<_>>(),
            }),
            text: "error: the document does not define a toric vector bundle; run `validate` for details\n".into(),
            exit: 2,
        }))
    }
}

/// Execute `command` against the document text. Hard errors (I/O-free) are
/// returned as `Err` and map to exit code 1 in the binary.
pub fn run(command: &str, text: &str, opts: &CommandOptions) -> Result<Outcome, String> {
    let doc = parse_document(text).map_err(|e| e.to_string())?;
    match command {
        "validate" => cmd_validate(&doc),
        "classify" => cmd_classify(&doc),
        "eff" => cmd_eff(&doc, opts),
        "nef" => cmd_nef(&doc, opts),
        "bpf" => cmd_bpf(&doc, opts),
        "hilbert-nef" => cmd_hilbert_nef(&doc, opts),
        "fujita-scan" => cmd_fujita_scan(&doc, opts),
        "nobody" => cmd_nobody(&doc, opts),
        "anticanonical" => cmd_anticanonical(&doc),
        "kaneyama" => cmd_kaneyama(&doc),
        "tangent" => cmd_tangent(&doc),
        "extend" => cmd_extend(&doc, opts),
        other => Err(format!("unknown command '{other}'")),
    }
}

fn cmd_validate(doc: &BundleDocument) -> Result<Outcome, String> {
    let e = doc.bundle()?;
    let report = e.validate();
    let classes = e.class_lattice();
    let mut text = String::new();
    writeln!(text, "valid: {}", report.is_valid()).unwrap();
    writeln!(text, "rank: {}", e.rank()).unwrap();
    writeln!(text, "class basis pivot rays: {:?}", classes.pivot).unwrap();
    if !report.row_failures.is_empty() {
        writeln!(text, "rows off the tropical linear space: {:?}", report.row_failures).unwrap();
    }
    for (i, w) in report.cone_witnesses.iter().enumerate() {
        match w {
            Some(b) => writeln!(text, "cone {i}: apartment basis {b:?}").unwrap(),
            None => writeln!(text, "cone {i}: no common apartment").unwrap(),
        }
    }
    let json = json!({
        "schema": schema("validate"),
        "valid": report.is_valid(),
        "rank": e.rank(),
        "class_basis_pivot_rays": classes.pivot,
        "row_failures": report.row_failures,
        "cone_witnesses": report
            .cone_witnesses
            .iter()
            .map(|w| match w {
                Some(b) => json!(b),
                None => Value::Null,
            })
            .collect::<Vec<_>>(),
    });
    Ok(Outcome { json, text, exit: if report.is_valid() { 0 } else { 2 } })
}

fn cmd_classify(doc: &BundleDocument) -> Result<Outcome, String> {
    let e = match validated_bundle(doc)? {
        Ok(e) => e,
        Err(out) => return Ok(out),
    };
    let ci = e.ci_check();
    let witness = ci.witness.as_ref().map(|w| match w {
        CiWitness::RankBound { rows } => format!("rank bound fails for rows {rows:?}"),
        CiWitness::PairBound { rows, element } => {
            format!("pair bound fails for rows {rows:?} at row {element}")
        }
    });
    let uniform = e.matroid().is_uniform();
    let uniform_ci = if uniform { Some(e.uniform_ci_check()?) } else { None };
    let coloop = e.coloop_cover_check();
    let mut text = String::new();
    writeln!(text, "sparse: {}", e.is_sparse()).unwrap();
    writeln!(text, "uniform: {uniform}").unwrap();
    writeln!(text, "monomial: {}", e.is_monomial()).unwrap();
    writeln!(text, "complete intersection: {}", ci.passed).unwrap();
    if let Some(w) = &witness {
        writeln!(text, "  witness: {w}").unwrap();
    }
    if let Some(u) = uniform_ci {
        writeln!(text, "uniform complete intersection: {u}").unwrap();
    }
    writeln!(text, "coloop cover: {}", coloop.covered).unwrap();
    if !coloop.uncovered.is_empty() {
        writeln!(text, "  uncovered variables: {:?}", coloop.uncovered).unwrap();
    }
    writeln!(text, "certificate: {}", certificate_status(&e)).unwrap();
    let json = json!({
        "schema": schema("classify"),
        "sparse": e.is_sparse(),
        "uniform": uniform,
        "monomial": e.is_monomial(),
        "ci": { "passed": ci.passed, "witness": witness },
        "uniform_ci": uniform_ci,
        "coloop_cover": {
            "covered": coloop.covered,
            "uncovered": coloop.uncovered,
            "circuit_zero_condition": coloop.circuit_zero_condition,
        },
        "certificate": certificate_status(&e),
    });
    Ok(Outcome { json, text, exit: 0 })
}

fn cmd_eff(doc: &BundleDocument, opts: &CommandOptions) -> Result<Outcome, String> {
    let e = match validated_bundle(doc)? {
        Ok(e) => e,
        Err(out) => return Ok(out),
    };
    let (monoid, cone) = e.eff_data()?;
    let mut text = String::new();
    writeln!(text, "effective monoid generators:").unwrap();
    for g in &monoid.gens {
        writeln!(text, "  {}", vec_str(g)).unwrap();
    }
    writeln!(text, "pseudo-effective cone rays:").unwrap();
    for r in cone.rays() {
        writeln!(text, "  {}", vec_str(r)).unwrap();
    }
    let mut json = json!({
        "schema": schema("eff"),
        "monoid_generators": jrows(monoid.gens.iter().map(Vec::as_slice)),
        "cone_rays": jrows(cone.rays().iter().map(Vec::as_slice)),
        "cone_lineality": jrows(cone.lineality().iter().map(Vec::as_slice)),
        "certificate": certificate_status(&e),
    });
    if let Some(s) = &opts.class {
        let c = parse_class(s, e.class_lattice().rank())?;
        let in_cone = cone.contains_int(&c.vector());
        let in_monoid = monoid.member(&c.vector())?.is_some();
        json["class"] = jclass(&c);
        json["in_cone"] = json!(in_cone);
        json["in_monoid"] = json!(in_monoid);
        writeln!(text, "class {}: pseudo-effective: {in_cone}, effective: {in_monoid}", class_str(&c))
            .unwrap();
    }
    Ok(Outcome { json, text, exit: 0 })
}

fn cmd_nef(doc: &BundleDocument, opts: &CommandOptions) -> Result<Outcome, String> {
    let e = match validated_bundle(doc)? {
        Ok(e) => e,
        Err(out) => return Ok(out),
    };
    if let Some(out) = certificate_gate("nef", &e, opts.force) {
        return Ok(out);
    }
    let cone = e.nef_cone()?;
    let mut text = String::new();
    writeln!(text, "nef cone rays:").unwrap();
    for r in cone.rays() {
        writeln!(text, "  {}", vec_str(r)).unwrap();
    }
    let mut json = json!({
        "schema": schema("nef"),
        "rays": jrows(cone.rays().iter().map(Vec::as_slice)),
        "lineality": jrows(cone.lineality().iter().map(Vec::as_slice)),
        "halfspaces": jrows(cone.halfspaces().iter().map(Vec::as_slice)),
        "certificate": certificate_status(&e),
    });
    if let Some(s) = &opts.class {
        let c = parse_class(s, e.class_lattice().rank())?;
        let nef = e.nef_member(&c)?;
        let ample = e.ample(&c)?;
        json["class"] = jclass(&c);
        json["nef"] = json!(nef);
        json["ample"] = json!(ample);
        writeln!(text, "class {}: nef: {nef}, ample: {ample}", class_str(&c)).unwrap();
    }
    Ok(Outcome { json, text, exit: 0 })
}

fn cmd_bpf(doc: &BundleDocument, opts: &CommandOptions) -> Result<Outcome, String> {
    let e = match validated_bundle(doc)? {
        Ok(e) => e,
        Err(out) => return Ok(out),
    };
    if let Some(out) = certificate_gate("bpf", &e, opts.force) {
        return Ok(out);
    }
    let s = opts.class.as_ref().ok_or("bpf requires --class 'a1,...,ad;b'")?;
    let c = parse_class(s, e.class_lattice().rank())?;
    let v = c.vector();
    let mut failing = Vec::new();
    for site in e.nef_bpf_sites()? {
        if site.monoid.member(&v)?.is_none() {
            failing.push(site.label.clone());
        }
    }
    let bpf = failing.is_empty();
    let mut text = String::new();
    writeln!(text, "class {}: basepoint-free: {bpf}", class_str(&c)).unwrap();
    if !bpf {
        writeln!(text, "failing sites: {}", failing.join(", ")).unwrap();
    }
    let json = json!({
        "schema": schema("bpf"),
        "class": jclass(&c),
        "bpf": bpf,
        "failing_sites": failing,
        "certificate": certificate_status(&e),
    });
    Ok(Outcome { json, text, exit: 0 })
}

fn cmd_hilbert_nef(doc: &BundleDocument, opts: &CommandOptions) -> Result<Outcome, String> {
    let e = match validated_bundle(doc)? {
        Ok(e) => e,
        Err(out) => return Ok(out),
    };
    if let Some(out) = certificate_gate("hilbert-nef", &e, opts.force) {
        return Ok(out);
    }
    let mut basis = e.nef_cone()?.hilbert_basis()?;
    basis.sort();
    let mut text = String::new();
    writeln!(text, "hilbert basis of the nef cone ({} elements):", basis.len()).unwrap();
    for b in &basis {
        writeln!(text, "  {}", vec_str(b)).unwrap();
    }
    let json = json!({
        "schema": schema("hilbert-nef"),
        "hilbert_basis": jrows(basis.iter().map(Vec::as_slice)),
        "certificate": certificate_status(&e),
    });
    Ok(Outcome { json, text, exit: 0 })
}

fn cmd_fujita_scan(doc: &BundleDocument, opts: &CommandOptions) -> Result<Outcome, String> {
    let e = match validated_bundle(doc)? {
        Ok(e) => e,
        Err(out) => return Ok(out),
    };
    if let Some(out) = certificate_gate("fujita-scan", &e, opts.force) {
        return Ok(out);
    }
    let mut gaps = e.fujita_gap_scan()?;
    gaps.sort_by_key(|(c, site)| (c.vector(), site.clone()));
    let mut text = String::new();
    writeln!(text, "nef Hilbert basis elements failing basepoint-freeness: {}", gaps.len())
        .unwrap();
    for (c, site) in &gaps {
        writeln!(text, "  {} at site {site}", class_str(c)).unwrap();
    }
    let json = json!({
        "schema": schema("fujita-scan"),
        "gaps": gaps
            .iter()
            .map(|(c, site)| json!({ "class": jclass(c), "site": site }))
            .collect::<Vec<_>>(),
        "certificate": certificate_status(&e),
    });
    Ok(Outcome { json, text, exit: 0 })
}

fn cmd_nobody(doc: &BundleDocument, opts: &CommandOptions) -> Result<Outcome, String> {
    let e = match validated_bundle(doc)? {
        Ok(e) => e,
        Err(out) => return Ok(out),
    };
    let order_text = opts.flag.as_ref().ok_or("nobody requires --flag 'i1,i2,...' (an ordered basis)")?;
    let order: Vec<usize> = order_text
        .split(',')
        .map(|t| t.trim().parse().map_err(|_| format!("bad index '{}'", t.trim())))
        .collect::<Result<_, _>>()?;
    let flag = e.matroid().flag_from_order(&order)?;
    let cert = precondition_certificate(&e, &flag);
    if cert == PrimeConeCertificate::Unverified && !opts.force {
        let msg = "the prime-cone hypothesis is not certified for this flag (the bundle is not \
                   sparse and no diagram row lies in the open face of the flag); pass --force \
                   to compute a candidate body";
        return Ok(Outcome {
            json: json!({ "schema": schema("nobody"), "error": "certificate missing", "detail": msg }),
            text: format!("warning: {msg}\n"),
            exit: 3,
        });
    }
    let cert_name = match cert {
        PrimeConeCertificate::Sparse => "sparse",
        PrimeConeCertificate::InteriorRow => "interior-row",
        PrimeConeCertificate::Unverified => "unverified",
    };
    let m = build_m(&e, &flag)?;
    let mut text = String::new();
    writeln!(text, "valuation matrix ({}x{}):", m.matrix.rows, m.matrix.cols).unwrap();
    for i in 0..m.matrix.rows {
        writeln!(text, "  {}", vec_str(m.matrix.row(i))).unwrap();
    }
    writeln!(text, "prime-cone certificate: {cert_name}").unwrap();
    let mut json = json!({
        "schema": schema("nobody"),
        "matrix": jmatrix(&m.matrix),
        "flag": flag.chain.iter().map(|f| json!(f)).collect::<Vec<_>>(),
        "certificate": cert_name,
    });
    match &opts.class {
        Some(s) => {
            let c = parse_class(s, e.class_lattice().rank())?;
            let body = nobody_of_class(&e, &flag, &c)?;
            let points = p_alpha_beta(&e, &c).lattice_points()?;
            let dim = section_dimension(&e, &c)?;
            json["class"] = jclass(&c);
            json["polytope_lattice_points"] = json!(points.len());
            json["distinct_valuation_points"] =
                jrows(body.points.distinct.iter().map(Vec::as_slice));
            json["section_dimension"] = json!(dim);
            writeln!(text, "class {}:", class_str(&c)).unwrap();
            writeln!(text, "  class polytope lattice points: {}", points.len()).unwrap();
            writeln!(text, "  distinct valuation points: {}", body.points.distinct.len())
                .unwrap();
            writeln!(text, "  section dimension: {dim}").unwrap();
        }
        None => {
            let global = global_body(&m);
            json["global_rays"] = jrows(global.rays().iter().map(Vec::as_slice));
            json["global_lineality"] = jrows(global.lineality().iter().map(Vec::as_slice));
            writeln!(text, "global body rays:").unwrap();
            for r in global.rays() {
                writeln!(text, "  {}", vec_str(r)).unwrap();
            }
        }
    }
    Ok(Outcome { json, text, exit: 0 })
}

fn cmd_anticanonical(doc: &BundleDocument) -> Result<Outcome, String> {
    let e = match validated_bundle(doc)? {
        Ok(e) => e,
        Err(out) => return Ok(out),
    };
    let c = ci_anticanonical(&e)?;
    let nef = e.nef_member(&c)?;
    let ample = e.ample(&c)?;
    let text = format!("anticanonical class {}, nef: {nef}, ample: {ample}\n", vec_str(&c.vector()));
    let json = json!({
        "schema": schema("anticanonical"),
        "class": jclass(&c),
        "nef": nef,
        "ample": ample,
        "fano": ample,
        "certificate": certificate_status(&e),
    });
    Ok(Outcome { json, text, exit: 0 })
}

fn cmd_kaneyama(doc: &BundleDocument) -> Result<Outcome, String> {
    let ideal = doc.ideal.clone().ok_or("the document has no [ideal] section")?;
    let diagram = doc.diagram.clone().ok_or("the document has no [diagram] section")?;
    let kb = match kaneyama_validate(doc.fan.clone(), ideal, diagram) {
        Ok(kb) => kb,
        Err(e) => {
            return Ok(Outcome {
                json: json!({ "schema": schema("kaneyama"), "error": "validation failure", "detail": e }),
                text: format!("error: not a valid diagonal bundle: {e}\n"),
                exit: 2,
            })
        }
    };
    let report = kaneyama_classify(&kb)?;
    let mk = kaneyama_anticanonical(&kb);
    let text = format!(
        "anticanonical class {}, nef: {}, ample: {}\nreason: {}\n",
        vec_str(&mk.vector()),
        report.nef,
        report.ample,
        report.reason
    );
    let json = json!({
        "schema": schema("kaneyama"),
        "anticanonical": jclass(&mk),
        "nef": report.nef,
        "ample": report.ample,
        "reason": report.reason,
    });
    Ok(Outcome { json, text, exit: 0 })
}

fn cmd_tangent(doc: &BundleDocument) -> Result<Outcome, String> {
    let t = tangent_bundle(&doc.fan)?;
    let gens: Vec<Vec<String>> = (0..t.ideal.coeffs.rows)
        .map(|k| t.ideal.coeffs.row(k).iter().map(Rat::to_string).collect())
        .collect();
    let mut text = String::from("[ideal]\ngenerators = [");
    for (k, row) in gens.iter().enumerate() {
        if k > 0 {
            text.push(',');
        }
        write!(text, "[{}]", row.join(",")).unwrap();
    }
    text.push_str("]\n[diagram]\nrows = [");
    for i in 0..t.diagram.rows {
        if i > 0 {
            text.push(',');
        }
        let row: Vec<String> = t.diagram.row(i).iter().map(Int::to_string).collect();
        write!(text, "[{}]", row.join(",")).unwrap();
    }
    text.push_str("]\n");
    let json = json!({
        "schema": schema("tangent"),
        "generators": gens,
        "diagram": jmatrix(&t.diagram),
    });
    Ok(Outcome { json, text, exit: 0 })
}

fn cmd_extend(doc: &BundleDocument, opts: &CommandOptions) -> Result<Outcome, String> {
    let e = match validated_bundle(doc)? {
        Ok(e) => e,
        Err(out) => return Ok(out),
    };
    let with_text = opts.with_document.as_ref().ok_or("extend requires --with <file>")?;
    let other_doc = parse_document(with_text).map_err(|err| err.to_string())?;
    let other = other_doc.bundle()?;
    let report = e.extension_checks(&other)?;
    let mut text = String::new();
    writeln!(text, "dominance: {}", report.dominance).unwrap();
    writeln!(text, "ci guaranteed: {}", report.ci_guaranteed).unwrap();
    writeln!(text, "circuit growth: {}", report.circuit_growth).unwrap();
    writeln!(text, "monomial ci guaranteed: {}", report.monomial_ci_guaranteed).unwrap();
    writeln!(text, "zero bound: {}", report.zero_bound).unwrap();
    writeln!(text, "uniform monomial guaranteed: {}", report.uniform_monomial_guaranteed)
        .unwrap();
    let json = json!({
        "schema": schema("extend"),
        "dominance": report.dominance,
        "ci_guaranteed": report.ci_guaranteed,
        "circuit_growth": report.circuit_growth,
        "monomial_ci_guaranteed": report.monomial_ci_guaranteed,
        "zero_bound": report.zero_bound,
        "uniform_monomial_guaranteed": report.uniform_monomial_guaranteed,
    });
    Ok(Outcome { json, text, exit: 0 })
}
