//! JSON scenario files: parsing, validation, dispatch to the pipelines and the
//! bundled examples.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use serde::Deserialize;
use sha2::{Digest, Sha256};

use crate::courant::{check_axioms_with, check_dorfman_identities, double_of_lie_algebroid, standard_chart, CourantChart, Section, TupleMode};
use crate::darboux::{dw_pipeline, symplectic_homotopy_primitive};
use crate::gcs::{
    check_gcs, gcs_from_complex, gcs_from_holomorphic_poisson, gcs_from_symplectic, holomorphic_bivector, maurer_cartan_check,
    standard_complex_structure, GcsCandidate, HoloPoissonData,
};
use crate::linalg::FieldMatrix;
use crate::moser::{
    holomorphic_vector, moser_pipeline, FamilySource, GcsFamily, NumericConfig, Representation, SectionFamily, TimeDependent, TimeProfile, ZSpec,
};
use crate::random::trials;
use crate::report::{Check, Report};
use crate::symbolic::coeff::parse_rational;
use crate::symbolic::{parse_field, Rational, ScalarField, SymbolicError};

/// The CLI warns about scenarios above this total degree.
pub const DEGREE_WARNING: u32 = 12;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Task {
    Axioms,
    CheckGcs,
    Moser,
    Dw,
}

impl Task {
    pub const NAMES: [&'static str; 4] = ["axioms", "check-gcs", "moser", "dw"];

    pub fn name(self) -> &'static str {
        match self {
            Task::Axioms => "axioms",
            Task::CheckGcs => "check-gcs",
            Task::Moser => "moser",
            Task::Dw => "dw",
        }
    }
}

impl FromStr for Task {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "axioms" => Ok(Task::Axioms),
            "check-gcs" => Ok(Task::CheckGcs),
            "moser" => Ok(Task::Moser),
            "dw" | "dw-run" => Ok(Task::Dw),
            _ => Err(format!("unknown task {s:?}; valid tasks are {}", Task::NAMES.join(", "))),
        }
    }
}

/// One problem found while reading a scenario.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Issue {
    pub line: Option<usize>,
    pub field: String,
    pub message: String,
}

impl fmt::Display for Issue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.line {
            Some(l) => write!(f, "line {l}, {}: {}", self.field, self.message),
            None => write!(f, "{}: {}", self.field, self.message),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, thiserror::Error)]
pub enum ScenarioError {
    #[error("cannot read {path}: {message}")]
    Io { path: String, message: String },
    #[error("{}", .0.iter().map(|i| i.to_string()).collect::<Vec<_>>().join("\n"))]
    Invalid(Vec<Issue>),
}

impl ScenarioError {
    pub fn issues(&self) -> &[Issue] {
        match self {
            ScenarioError::Io { .. } => &[],
            ScenarioError::Invalid(v) => v,
        }
    }
}

// ---- raw serde layer ----

#[derive(Deserialize)]
#[serde(untagged)]
enum PolyText {
    Text(String),
    Int(i64),
}

impl PolyText {
    fn text(&self) -> String {
        match self {
            PolyText::Text(s) => s.clone(),
            PolyText::Int(n) => n.to_string(),
        }
    }
}

type RawMatrix = Vec<Vec<PolyText>>;

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawScenario {
    task: String,
    chart: RawChart,
    #[serde(rename = "J")]
    big_j: Option<RawMatrix>,
    omega: Option<RawMatrix>,
    j: Option<RawMatrix>,
    pi: Option<RawMatrix>,
    family: Option<RawFamily>,
    z_family: Option<RawZFamily>,
    beta_z: Option<Vec<PolyText>>,
    trials: Option<RawTrials>,
    numeric: Option<RawNumeric>,
}

#[derive(Deserialize)]
#[serde(tag = "type", rename_all = "lowercase", deny_unknown_fields)]
enum RawChart {
    Standard {
        dim: usize,
    },
    Double {
        anchor: RawMatrix,
        #[serde(default)]
        structure: BTreeMap<String, PolyText>,
    },
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawFamily {
    rep: String,
    source: String,
    #[serde(default)]
    terms: Vec<RawTerm>,
    j: Option<RawMatrix>,
    #[serde(default)]
    samples: Vec<RawSample>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawTerm {
    exp: Option<String>,
    matrix: Option<RawMatrix>,
    holomorphic: Option<Vec<(usize, usize, PolyText)>>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawSample {
    t: String,
    #[serde(rename = "J")]
    big_j: RawMatrix,
    #[serde(rename = "Jdot")]
    jdot: Option<RawMatrix>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawZFamily {
    kind: String,
    column: Option<Vec<PolyText>>,
    holomorphic: Option<Vec<(usize, PolyText)>>,
    terms: Option<Vec<RawZTerm>>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawZTerm {
    exp: Option<String>,
    column: Option<Vec<PolyText>>,
    holomorphic: Option<Vec<(usize, PolyText)>>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawTrials {
    sections: Option<usize>,
    functions: Option<usize>,
    degree: Option<u32>,
    mode: Option<String>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawNumeric {
    steps: Option<usize>,
    tol: Option<f64>,
    grid: Option<RawGrid>,
    t_samples: Option<Vec<String>>,
    domain_bound: Option<f64>,
    seed: Option<u64>,
    pairing_tol: Option<f64>,
    group_law_tol: Option<f64>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawGrid {
    per_axis: Option<usize>,
    random: Option<usize>,
}

// ---- validated scenario ----

#[derive(Clone, Debug)]
pub struct Trials {
    pub sections: usize,
    pub functions: usize,
    pub degree: u32,
    pub mode: TupleMode,
}

impl Default for Trials {
    fn default() -> Self {
        Trials {
            sections: 5,
            functions: 3,
            degree: 2,
            mode: TupleMode::Window,
        }
    }
}

#[derive(Clone, Debug)]
enum FamilyKind {
    Raw,
    Symplectic,
    Complex,
    Holo(FieldMatrix),
    Samples(Vec<(Rational, FieldMatrix, Option<FieldMatrix>)>),
}

#[derive(Clone, Debug)]
struct FamilySpec {
    rep: Representation,
    kind: FamilyKind,
    terms: Vec<(TimeProfile, FieldMatrix)>,
}

#[derive(Clone, Debug)]
enum ZKind {
    Z,
    X,
    Xi,
    X10,
}

#[derive(Clone, Debug)]
pub struct Scenario {
    pub task: Task,
    pub chart: Arc<CourantChart>,
    big_j: Option<FieldMatrix>,
    omega: Option<FieldMatrix>,
    j: Option<FieldMatrix>,
    pi: Option<FieldMatrix>,
    family: Option<FamilySpec>,
    z_family: Option<(ZKind, Vec<(TimeProfile, FieldMatrix)>)>,
    beta_z: Option<Vec<ScalarField>>,
    pub trials: Trials,
    pub numeric: NumericConfig,
    source_hash: String,
    overrides: String,
    max_degree: u32,
}

/// Collects issues while converting the raw layer.
struct Ctx<'a> {
    src: &'a str,
    issues: Vec<Issue>,
    max_degree: u32,
}

impl<'a> Ctx<'a> {
    fn line_of(&self, needle: &str) -> Option<usize> {
        let quoted = format!("\"{needle}\"");
        self.src.find(&quoted).map(|at| self.src[..at].matches('\n').count() + 1)
    }

    fn issue(&mut self, field: impl Into<String>, message: impl Into<String>) {
        self.issues.push(Issue {
            line: None,
            field: field.into(),
            message: message.into(),
        });
    }

    fn poly(&mut self, field: &str, p: &PolyText) -> ScalarField {
        let text = p.text();
        match parse_field(&text) {
            Ok(f) => {
                self.max_degree = self.max_degree.max(f.degree());
                f
            }
            Err(e) => {
                let message = match e {
                    SymbolicError::Parse(pe) => format!("polynomial {text:?}: {} at position {}", pe.message, pe.position),
                    other => format!("polynomial {text:?}: {other}"),
                };
                let line = self.line_of(&text);
                self.issues.push(Issue {
                    line,
                    field: field.to_string(),
                    message,
                });
                ScalarField::zero()
            }
        }
    }

    fn column(&mut self, field: &str, v: &[PolyText], len: usize) -> Vec<ScalarField> {
        if v.len() != len {
            self.issue(field, format!("expected {len} entries, got {}", v.len()));
        }
        v.iter().enumerate().map(|(i, p)| self.poly(&format!("{field}[{i}]"), p)).collect()
    }

    fn matrix(&mut self, field: &str, m: &RawMatrix, rows: usize, cols: usize) -> FieldMatrix {
        if m.len() != rows || m.iter().any(|r| r.len() != cols) {
            self.issue(field, format!("expected a {rows}x{cols} matrix"));
            return FieldMatrix::zeros(rows, cols);
        }
        let entries = m
            .iter()
            .enumerate()
            .map(|(i, r)| r.iter().enumerate().map(|(k, p)| self.poly(&format!("{field}[{i}][{k}]"), p)).collect())
            .collect();
        FieldMatrix::from_rows(entries).expect("shape checked")
    }

    fn rational(&mut self, field: &str, s: &str) -> Rational {
        match parse_rational(s) {
            Some(r) => r,
            None => {
                self.issue(field, format!("expected a rational number such as \"1/2\", got {s:?}"));
                Rational::from_integer(0.into())
            }
        }
    }

    fn profile(&mut self, field: &str, exp: &Option<String>) -> TimeProfile {
        match exp {
            None => TimeProfile::One,
            Some(r) => TimeProfile::Exp(self.rational(&format!("{field}.exp"), r)),
        }
    }
}

fn hex_digest(bytes: &[u8]) -> String {
    Sha256::digest(bytes).iter().map(|b| format!("{b:02x}")).collect()
}

fn json_issue(e: &serde_json::Error) -> Issue {
    let msg = e.to_string();
    // serde appends " at line L column C"; keep the message clean
    let message = match msg.rfind(" at line ") {
        Some(cut) => msg[..cut].to_string(),
        None => msg,
    };
    Issue {
        line: if e.line() > 0 { Some(e.line()) } else { None },
        field: "scenario".into(),
        message,
    }
}

fn build_chart(ctx: &mut Ctx, raw: &RawChart) -> Option<Arc<CourantChart>> {
    match raw {
        RawChart::Standard { dim } => match standard_chart(*dim) {
            Ok(c) => Some(c),
            Err(e) => {
                ctx.issue("chart.dim", e.to_string());
                None
            }
        },
        RawChart::Double { anchor, structure } => {
            let d = anchor.len();
            let m = anchor.first().map_or(0, Vec::len);
            if d == 0 || m == 0 {
                ctx.issue("chart.anchor", "anchor must be a nonempty d x m matrix");
                return None;
            }
            let anchor = ctx.matrix("chart.anchor", anchor, d, m);
            let mut c = vec![vec![vec![ScalarField::zero(); m]; m]; m];
            let mut given = vec![vec![vec![false; m]; m]; m];
            for (key, p) in structure {
                let field = format!("chart.structure.{key}");
                let Some((k, i, j)) = structure_key(key).filter(|&(k, i, j)| (1..=m).contains(&k) && (1..=m).contains(&i) && (1..=m).contains(&j))
                else {
                    ctx.issue(field, format!("expected a key c^k_ij (or c^k_i,j) with indices in 1..={m}"));
                    continue;
                };
                let f = ctx.poly(&field, p);
                c[i - 1][j - 1][k - 1] = f.clone();
                given[i - 1][j - 1][k - 1] = true;
                if !given[j - 1][i - 1][k - 1] {
                    c[j - 1][i - 1][k - 1] = f.neg();
                }
            }
            match double_of_lie_algebroid(&anchor, &c) {
                Ok(ch) => Some(ch),
                Err(e) => {
                    ctx.issue("chart.structure", e.to_string());
                    None
                }
            }
        }
    }
}

/// `c^k_ij` with single-digit indices, or `c^k_i,j`.
fn structure_key(key: &str) -> Option<(usize, usize, usize)> {
    let rest = key.strip_prefix("c^")?;
    let (k, lower) = rest.split_once('_')?;
    let (i, j) = match lower.split_once(',') {
        Some(p) => p,
        None if lower.len() == 2 && lower.is_ascii() => lower.split_at(1),
        None => return None,
    };
    Some((k.parse().ok()?, i.parse().ok()?, j.parse().ok()?))
}

fn holo_matrix(ctx: &mut Ctx, field: &str, terms: &[(usize, usize, PolyText)], m: usize) -> FieldMatrix {
    let mut parsed = Vec::new();
    for (k, (a, b, p)) in terms.iter().enumerate() {
        let f = ctx.poly(&format!("{field}[{k}]"), p);
        if m % 2 != 0 || *a == 0 || *b == 0 || *a > m / 2 || *b > m / 2 {
            ctx.issue(format!("{field}[{k}]"), format!("complex indices must lie in 1..={}", m / 2));
            continue;
        }
        parsed.push((a - 1, b - 1, f));
    }
    holomorphic_bivector(m, &parsed)
}

fn holo_column(ctx: &mut Ctx, field: &str, terms: &[(usize, PolyText)], m: usize) -> Vec<ScalarField> {
    let mut parsed = Vec::new();
    for (k, (a, p)) in terms.iter().enumerate() {
        let f = ctx.poly(&format!("{field}[{k}]"), p);
        if m % 2 != 0 || *a == 0 || *a > m / 2 {
            ctx.issue(format!("{field}[{k}]"), format!("complex index must lie in 1..={}", m / 2));
            continue;
        }
        parsed.push((a - 1, f));
    }
    holomorphic_vector(m, &parsed)
}

fn build_family(ctx: &mut Ctx, raw: &RawFamily, top_j: Option<&FieldMatrix>, n: usize, m: usize) -> Option<FamilySpec> {
    let rep = match raw.rep.as_str() {
        "poly" => Representation::PolyInT,
        "sampled" => Representation::Sampled,
        other => {
            ctx.issue("family.rep", format!("unknown representation {other:?}; valid: poly, sampled"));
            return None;
        }
    };
    let (kind, size) = match raw.source.as_str() {
        "J" => (FamilyKind::Raw, n),
        "omega" => (FamilyKind::Symplectic, m),
        "j" => (FamilyKind::Complex, m),
        "pi" => {
            let j = match (&raw.j, top_j) {
                (Some(j), _) => ctx.matrix("family.j", j, m, m),
                (None, Some(j)) => j.clone(),
                (None, None) => standard_complex_structure(m),
            };
            (FamilyKind::Holo(j), m)
        }
        "samples" => {
            let mut out = Vec::new();
            for (k, s) in raw.samples.iter().enumerate() {
                let t = ctx.rational(&format!("family.samples[{k}].t"), &s.t);
                let jm = ctx.matrix(&format!("family.samples[{k}].J"), &s.big_j, n, n);
                let jd = s.jdot.as_ref().map(|d| ctx.matrix(&format!("family.samples[{k}].Jdot"), d, n, n));
                out.push((t, jm, jd));
            }
            (FamilyKind::Samples(out), n)
        }
        other => {
            ctx.issue("family.source", format!("unknown source {other:?}; valid: J, omega, j, pi, samples"));
            return None;
        }
    };
    let samples = matches!(kind, FamilyKind::Samples(_));
    if samples != raw.terms.is_empty() {
        ctx.issue("family", if samples { "sample families take no terms" } else { "family needs at least one term" });
        return None;
    }
    if !samples && !raw.samples.is_empty() {
        ctx.issue("family.samples", "samples are only read with source \"samples\"");
    }
    let mut terms = Vec::new();
    for (k, t) in raw.terms.iter().enumerate() {
        let field = format!("family.terms[{k}]");
        let profile = ctx.profile(&field, &t.exp);
        let mat = match (&t.matrix, &t.holomorphic) {
            (Some(mx), None) => ctx.matrix(&format!("{field}.matrix"), mx, size, size),
            (None, Some(h)) if matches!(kind, FamilyKind::Holo(_)) => holo_matrix(ctx, &format!("{field}.holomorphic"), h, m),
            _ => {
                ctx.issue(field, "each term needs exactly one of matrix or holomorphic (the latter for source pi)");
                continue;
            }
        };
        terms.push((profile, mat));
    }
    Some(FamilySpec { rep, kind, terms })
}

fn build_z_family(ctx: &mut Ctx, raw: &RawZFamily, n: usize, m: usize) -> Option<(ZKind, Vec<(TimeProfile, FieldMatrix)>)> {
    let (kind, len) = match raw.kind.as_str() {
        "z" => (ZKind::Z, n),
        "x" => (ZKind::X, n),
        "xi" => (ZKind::Xi, m),
        "x10" => (ZKind::X10, m),
        other => {
            ctx.issue("z_family.kind", format!("unknown kind {other:?}; valid: z, x, xi, x10"));
            return None;
        }
    };
    let single = (raw.column.is_some() || raw.holomorphic.is_some()).then_some((&None, &raw.column, &raw.holomorphic));
    let items: Vec<(&Option<String>, &Option<Vec<PolyText>>, &Option<Vec<(usize, PolyText)>>)> = match (&raw.terms, single) {
        (Some(ts), None) => ts.iter().map(|t| (&t.exp, &t.column, &t.holomorphic)).collect(),
        (None, Some(one)) => vec![one],
        _ => {
            ctx.issue("z_family", "give either terms or a single column/holomorphic entry");
            return None;
        }
    };
    let mut out = Vec::new();
    for (k, (exp, column, holomorphic)) in items.into_iter().enumerate() {
        let field = format!("z_family.terms[{k}]");
        let profile = ctx.profile(&field, exp);
        let col = match (column, holomorphic) {
            (Some(c), None) => ctx.column(&format!("{field}.column"), c, len),
            (None, Some(h)) if matches!(kind, ZKind::X10) => holo_column(ctx, &format!("{field}.holomorphic"), h, m),
            _ => {
                ctx.issue(field, "each term needs exactly one of column or holomorphic (the latter for kind x10)");
                continue;
            }
        };
        out.push((profile, FieldMatrix::from_columns(&[col]).expect("one column")));
    }
    Some((kind, out))
}

fn build_numeric(ctx: &mut Ctx, raw: Option<&RawNumeric>) -> NumericConfig {
    let mut cfg = NumericConfig::default();
    let Some(raw) = raw else { return cfg };
    if let Some(s) = raw.steps {
        if s == 0 {
            ctx.issue("numeric.steps", "steps must be positive");
        }
        cfg.steps = s;
    }
    let positive = |ctx: &mut Ctx, field: &str, v: Option<f64>, slot: &mut f64| {
        if let Some(v) = v {
            if !(v.is_finite() && v > 0.0) {
                ctx.issue(field, "must be a positive number");
            }
            *slot = v;
        }
    };
    positive(ctx, "numeric.tol", raw.tol, &mut cfg.tol);
    positive(ctx, "numeric.domain_bound", raw.domain_bound, &mut cfg.domain_bound);
    positive(ctx, "numeric.pairing_tol", raw.pairing_tol, &mut cfg.pairing_tol);
    positive(ctx, "numeric.group_law_tol", raw.group_law_tol, &mut cfg.group_law_tol);
    if let Some(g) = &raw.grid {
        if let Some(p) = g.per_axis {
            cfg.grid_per_axis = p;
        }
        if let Some(r) = g.random {
            cfg.random_points = r;
        }
    }
    if let Some(ts) = &raw.t_samples {
        let parsed: Vec<Rational> = ts.iter().enumerate().map(|(k, s)| ctx.rational(&format!("numeric.t_samples[{k}]"), s)).collect();
        if parsed.windows(2).any(|w| w[0] >= w[1]) {
            ctx.issue("numeric.t_samples", "sample times must be strictly increasing");
        }
        if parsed.len() < 2 {
            ctx.issue("numeric.t_samples", "at least two sample times are needed");
        }
        cfg.t_samples = parsed;
    }
    if let Some(s) = raw.seed {
        cfg.seed = s;
    }
    cfg
}

impl Scenario {
    pub fn parse(src: &str) -> Result<Scenario, ScenarioError> {
        let raw: RawScenario = serde_json::from_str(src).map_err(|e| ScenarioError::Invalid(vec![json_issue(&e)]))?;
        let mut ctx = Ctx {
            src,
            issues: Vec::new(),
            max_degree: 0,
        };
        let task = match Task::from_str(&raw.task) {
            Ok(t) => Some(t),
            Err(msg) => {
                let line = ctx.line_of(&raw.task);
                ctx.issues.push(Issue {
                    line,
                    field: "task".into(),
                    message: msg,
                });
                None
            }
        };
        let chart = build_chart(&mut ctx, &raw.chart);
        let numeric = build_numeric(&mut ctx, raw.numeric.as_ref());
        let mut trials = Trials::default();
        if let Some(t) = &raw.trials {
            trials.sections = t.sections.unwrap_or(trials.sections);
            trials.functions = t.functions.unwrap_or(trials.functions);
            trials.degree = t.degree.unwrap_or(trials.degree);
            match t.mode.as_deref() {
                None | Some("window") => {}
                Some("all") => trials.mode = TupleMode::All,
                Some(other) => ctx.issue("trials.mode", format!("unknown mode {other:?}; valid: window, all")),
            }
            if trials.sections < 3 || trials.functions < 2 {
                ctx.issue("trials", "need at least 3 sections and 2 functions");
            }
        }
        let Some(chart) = chart else {
            return Err(ScenarioError::Invalid(ctx.issues));
        };
        let n = chart.rank();
        let m = n / 2;
        let big_j = raw.big_j.as_ref().map(|x| ctx.matrix("J", x, n, n));
        let omega = raw.omega.as_ref().map(|x| ctx.matrix("omega", x, m, m));
        let j = raw.j.as_ref().map(|x| ctx.matrix("j", x, m, m));
        let pi = raw.pi.as_ref().map(|x| ctx.matrix("pi", x, m, m));
        let family = raw.family.as_ref().and_then(|f| build_family(&mut ctx, f, j.as_ref(), n, m));
        let z_family = raw.z_family.as_ref().and_then(|z| build_z_family(&mut ctx, z, n, m));
        let beta_z = raw.beta_z.as_ref().map(|b| ctx.column("beta_z", b, n));

        let structures = [big_j.is_some(), omega.is_some(), j.is_some() && pi.is_none(), pi.is_some()]
            .iter()
            .filter(|b| **b)
            .count();
        match task {
            Some(Task::CheckGcs | Task::Dw) if structures != 1 => {
                ctx.issue("scenario", "give exactly one structure: J, omega, j, or pi (with optional j)")
            }
            Some(Task::Dw) if pi.is_some() => ctx.issue("pi", "the dw task takes J, omega or j"),
            Some(Task::Moser) if raw.family.is_none() => ctx.issue("family", "the moser task needs a family block"),
            _ => {}
        }
        if !ctx.issues.is_empty() {
            return Err(ScenarioError::Invalid(ctx.issues));
        }
        Ok(Scenario {
            task: task.expect("checked"),
            chart,
            big_j,
            omega,
            j,
            pi,
            family,
            z_family,
            beta_z,
            trials,
            numeric,
            source_hash: hex_digest(src.as_bytes()),
            overrides: String::new(),
            max_degree: ctx.max_degree,
        })
    }

    /// Command-line overrides of the numeric block.
    pub fn apply_overrides(&mut self, steps: Option<usize>, tol: Option<f64>, seed: Option<u64>) {
        if let Some(s) = steps {
            self.numeric.steps = s;
            self.overrides.push_str(&format!("steps={s};"));
        }
        if let Some(t) = tol {
            self.numeric.tol = t;
            self.overrides.push_str(&format!("tol={t:e};"));
        }
        if let Some(s) = seed {
            self.numeric.seed = s;
            self.overrides.push_str(&format!("seed={s};"));
        }
    }

    /// SHA-256 of the scenario text, folded with any overrides.
    pub fn hash(&self) -> String {
        if self.overrides.is_empty() {
            self.source_hash.clone()
        } else {
            hex_digest(format!("{}\n{}", self.source_hash, self.overrides).as_bytes())
        }
    }

    /// Largest total degree among all polynomials in the file.
    pub fn max_degree(&self) -> u32 {
        self.max_degree
    }

    fn structure(&self) -> Result<GcsCandidate, String> {
        let e = |x: crate::gcs::GcsError| x.to_string();
        if let Some(pi) = &self.pi {
            let j = self.j.clone().unwrap_or_else(|| standard_complex_structure(self.chart.rank() / 2));
            let data = HoloPoissonData::new(j, pi.clone()).map_err(e)?;
            return gcs_from_holomorphic_poisson(&self.chart, &data).map_err(e);
        }
        if let Some(m) = &self.big_j {
            return GcsCandidate::raw(&self.chart, m.clone()).map_err(e);
        }
        if let Some(o) = &self.omega {
            return gcs_from_symplectic(&self.chart, o).map_err(e);
        }
        if let Some(j) = &self.j {
            return gcs_from_complex(&self.chart, j).map_err(e);
        }
        Err("no structure given".into())
    }

    fn gcs_family(&self) -> Result<GcsFamily, String> {
        let spec = self.family.as_ref().ok_or("no family block")?;
        let td = || TimeDependent::new(spec.terms.clone()).map_err(|e| e.to_string());
        let source = match &spec.kind {
            FamilyKind::Raw => FamilySource::Raw(td()?),
            FamilyKind::Symplectic => FamilySource::Symplectic(td()?),
            FamilyKind::Complex => FamilySource::Complex(td()?),
            FamilyKind::Holo(j) => FamilySource::HoloPoisson { j: j.clone(), pi: td()? },
            FamilyKind::Samples(s) => FamilySource::Samples(s.clone()),
        };
        GcsFamily::new(&self.chart, source, spec.rep, &self.numeric.t_samples).map_err(|e| e.to_string())
    }

    fn section_family(&self) -> Result<SectionFamily, String> {
        let Some((kind, terms)) = &self.z_family else {
            return Ok(SectionFamily::zero(&self.chart));
        };
        let td = TimeDependent::new(terms.clone()).map_err(|e| e.to_string())?;
        let spec = match kind {
            ZKind::Z => ZSpec::Z(td),
            ZKind::X => ZSpec::X(td),
            ZKind::Xi => ZSpec::Xi(td),
            ZKind::X10 => ZSpec::X10(td),
        };
        SectionFamily::new(&self.chart, spec).map_err(|e| e.to_string())
    }

    fn run_task(&self) -> Report {
        let fail = |stage: &str, msg: String| {
            let mut r = Report::new(self.task.name());
            r.push(Check::error(stage, msg));
            r
        };
        match self.task {
            Task::Axioms => {
                let t = &self.trials;
                let (secs, fns) = trials(&self.chart, self.numeric.seed, t.sections, t.functions, t.degree);
                let mut r = Report::new("axioms");
                match check_axioms_with(&self.chart, &secs, &fns, t.mode) {
                    Ok(a) => r.absorb("axioms", a),
                    Err(e) => r.push(Check::error("axioms", e)),
                }
                match check_dorfman_identities(&self.chart, &secs, &fns, t.mode) {
                    Ok(a) => r.absorb("dorfman", a),
                    Err(e) => r.push(Check::error("dorfman", e)),
                }
                r
            }
            Task::CheckGcs => {
                let j = match self.structure() {
                    Ok(j) => j,
                    Err(e) => return fail("structure", e),
                };
                let t = &self.trials;
                let (secs, fns) = trials(&self.chart, self.numeric.seed, t.sections, t.functions, t.degree);
                let mut r = Report::new("check-gcs");
                match check_gcs(&j, &secs, &fns) {
                    Ok(g) => r.absorb("gcs", g),
                    Err(e) => r.push(Check::error("gcs", e)),
                }
                if let Some(pi) = &self.pi {
                    let jc = self.j.clone().unwrap_or_else(|| standard_complex_structure(self.chart.rank() / 2));
                    if let Ok(data) = HoloPoissonData::new(jc, pi.clone()) {
                        r.absorb("maurer-cartan", maurer_cartan_check(&data));
                    }
                }
                r
            }
            Task::Moser => {
                let fam = match self.gcs_family() {
                    Ok(f) => f,
                    Err(e) => return fail("family", e),
                };
                let z = match self.section_family() {
                    Ok(z) => z,
                    Err(e) => return fail("z_family", e),
                };
                moser_pipeline(&fam, &z, &self.numeric)
            }
            Task::Dw => {
                let j = match self.structure() {
                    Ok(j) => j,
                    Err(e) => return fail("structure", e),
                };
                let (z, note) = match &self.beta_z {
                    Some(c) => match Section::new(&self.chart, c.clone()) {
                        Ok(z) => (z, None),
                        Err(e) => return fail("beta_z", e.to_string()),
                    },
                    None => match symplectic_homotopy_primitive(&j) {
                        Ok(z) => (z, Some("beta_z not given: using the homotopy primitive of the symplectic form")),
                        Err(e) => return fail("beta_z", e.to_string()),
                    },
                };
                let mut r = dw_pipeline(&j, &z, &self.numeric);
                if let Some(n) = note {
                    r.note(n);
                }
                r
            }
        }
    }

    /// Runs the task; domain errors become `ERROR` records, never panics.
    pub fn run(&self) -> Report {
        let mut r = self.run_task();
        r.task = self.task.name().to_string();
        r.scenario_hash = Some(self.hash());
        r
    }
}

pub fn parse_scenario_file(path: &std::path::Path) -> Result<Scenario, ScenarioError> {
    let src = std::fs::read_to_string(path).map_err(|e| ScenarioError::Io {
        path: path.display().to_string(),
        message: e.to_string(),
    })?;
    Scenario::parse(&src)
}

#[derive(Clone, Copy, Debug)]
pub struct Example {
    pub name: &'static str,
    pub summary: &'static str,
    pub source: &'static str,
}

pub const EXAMPLES: &[Example] = &[
    Example {
        name: "axioms_standard",
        summary: "Courant axioms and Dorfman identities on TR^2 + T*R^2",
        source: include_str!("../scenarios/axioms_standard.json"),
    },
    Example {
        name: "axioms_double",
        summary: "Courant axioms on the double of the so(3) algebroid over a line",
        source: include_str!("../scenarios/axioms_double.json"),
    },
    Example {
        name: "symplectic_moser",
        summary: "Omega_t = (1+t) dx^dy on R^2, xi_t = -x dy",
        source: include_str!("../scenarios/symplectic_moser.json"),
    },
    Example {
        name: "complex_moser",
        summary: "sheared complex structures j_t on R^2 with the shear generator",
        source: include_str!("../scenarios/complex_moser.json"),
    },
    Example {
        name: "holo_poisson_moser",
        summary: "pi_t = e^t z1 d/dz1 ^ d/dz2 on C^2 with X^{1,0} = z2 d/dz2",
        source: include_str!("../scenarios/holo_poisson_moser.json"),
    },
    Example {
        name: "dw_symplectic",
        summary: "(1 + x1^2) dx1^dx2 near 0, straightened to dx1^dx2",
        source: include_str!("../scenarios/dw_symplectic.json"),
    },
];

pub fn example(name: &str) -> Option<&'static Example> {
    let name = name.strip_suffix(".json").unwrap_or(name);
    EXAMPLES.iter().find(|e| e.name == name)
}

#[cfg(test)]
mod tests;
