use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use aalg_core::almost_abelian::HermitianData;
use aalg_core::catalog::{self, Status};
use aalg_core::document::{self, AlgebraDocument, Expr, Factor, GSpec, Literal, Term};
use aalg_core::hermitian::is_type_11;
use aalg_core::lattice::{integrality_probe, TSchedule, DEFAULT_EPS_INT};
use aalg_core::lchk::{construct_lchk, lchk_admissible};
use aalg_core::scalar::{format_scalar, set_epsilon};
use aalg_core::{extract_data, Error, HermitianStructure, Matrix, Rational, Scalar, ScalarKind};
use clap::{ArgGroup, Args, Parser, Subcommand, ValueEnum};
use serde_json::{json, Map, Value};

const SCHEMA: &str = "aalg-report/1";

#[derive(Parser)]
#[command(name = "aalg", version, about = "Hermitian structures on almost abelian Lie algebras")]
struct Cli {
    /// Print a JSON report instead of text.
    #[arg(long, global = true)]
    json: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Evaluate structure predicates directly and through the (a, v, A) criteria.
    Check {
        file: PathBuf,
        #[arg(long, value_enum)]
        property: Option<Property>,
    },
    /// Extract (a, v, A) in an adapted unitary basis.
    Data { file: PathBuf },
    /// Bismut-Ricci form: closed formula against the curvature computation.
    RhoB { file: PathBuf },
    /// LCHK admissibility of a derivation D of R^{4m-1}.
    Lchk(LchkArgs),
    /// Integrality probe for exp(tB), B the ad operator on the abelian ideal.
    Lattice(LatticeArgs),
    /// Catalog of named algebras.
    Catalog {
        #[command(subcommand)]
        action: CatalogAction,
    },
    /// Replace an SKT metric by an LCB one on the same algebra and J.
    SktToLcb { file: PathBuf },
}

#[derive(Args)]
struct LchkArgs {
    /// `idN`, an inline matrix `[[..], ..]`, or a file holding a matrix or an algebra document.
    #[arg(long)]
    matrix: String,
    /// Include the constructed triple.
    #[arg(long)]
    witness: bool,
}

#[derive(Args)]
#[command(group(ArgGroup::new("schedule").required(true).args(["rule", "grid"])))]
struct LatticeArgs {
    /// Algebra document, or a file holding the matrix B itself.
    file: PathBuf,
    /// `2logk:K=<int>`
    #[arg(long)]
    rule: Option<String>,
    /// `<a>:<b>:<n>`
    #[arg(long)]
    grid: Option<String>,
    #[arg(long, default_value_t = DEFAULT_EPS_INT)]
    eps_int: f64,
    /// Also evaluate the cubic residual identity at t = 2 log k.
    #[arg(long)]
    residual: bool,
}

#[derive(Subcommand)]
enum CatalogAction {
    Verify {
        #[arg(long)]
        entry: Option<String>,
        #[arg(long, default_value_t = catalog::DEFAULT_SAMPLES)]
        samples: usize,
    },
    List,
    /// Print the manifest (every entry at its first sample).
    Export {
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum Property {
    Kahler,
    Lck,
    Balanced,
    Skt,
    Lcb,
    Vaisman,
}

impl Property {
    const ALL: [Property; 6] = [Property::Kahler, Property::Lck, Property::Balanced, Property::Skt, Property::Lcb, Property::Vaisman];

    fn name(self) -> &'static str {
        match self {
            Property::Kahler => "kahler",
            Property::Lck => "lck",
            Property::Balanced => "balanced",
            Property::Skt => "skt",
            Property::Lcb => "lcb",
            Property::Vaisman => "vaisman",
        }
    }
}

enum Failure {
    Input(String),
    Rejected(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        if e.is_input_error() {
            Failure::Input(e.to_string())
        } else {
            Failure::Rejected(e.to_string())
        }
    }
}

type Outcome = std::result::Result<Report, Failure>;

struct Report {
    body: Value,
    text: String,
    /// The question was answered in the negative (exit code 2).
    rejected: bool,
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { ExitCode::from(1) } else { ExitCode::SUCCESS };
        }
    };
    if let Ok(v) = std::env::var("AALG_EPSILON") {
        match v.trim().parse::<f64>() {
            Ok(eps) if eps > 0.0 && eps.is_finite() => set_epsilon(eps),
            _ => {
                eprintln!("error: AALG_EPSILON must be a positive number, got `{v}`");
                return ExitCode::from(1);
            }
        }
    }
    let command = command_name(&cli.command);
    let outcome = match &cli.command {
        Command::Check { file, property } => check(file, *property),
        Command::Data { file } => data(file),
        Command::RhoB { file } => rho_b(file),
        Command::Lchk(a) => lchk(a),
        Command::Lattice(a) => lattice(a),
        Command::Catalog { action } => catalog_cmd(action),
        Command::SktToLcb { file } => skt_to_lcb(file),
    };
    match outcome {
        Ok(r) => {
            if cli.json {
                let mut body = Map::new();
                body.insert("schema".into(), SCHEMA.into());
                body.insert("command".into(), command.into());
                if let Value::Object(m) = r.body {
                    body.extend(m);
                }
                emit(&(serde_json::to_string_pretty(&Value::Object(body)).expect("serializable") + "\n"));
            } else {
                emit(&r.text);
            }
            if r.rejected {
                ExitCode::from(2)
            } else {
                ExitCode::SUCCESS
            }
        }
        Err(f) => {
            let (code, kind, msg) = match f {
                Failure::Input(m) => (1, "input", m),
                Failure::Rejected(m) => (2, "rejected", m),
            };
            if cli.json {
                let body = json!({ "schema": SCHEMA, "command": command, "error": { "kind": kind, "message": msg } });
                emit(&(serde_json::to_string_pretty(&body).expect("serializable") + "\n"));
            }
            eprintln!("error: {msg}");
            ExitCode::from(code)
        }
    }
}

// A closed pipe (`aalg ... | head`) is not an error worth a panic.
fn emit(text: &str) {
    let mut out = std::io::stdout().lock();
    let _ = out.write_all(text.as_bytes()).and_then(|_| out.flush());
}

fn command_name(c: &Command) -> &'static str {
    match c {
        Command::Check { .. } => "check",
        Command::Data { .. } => "data",
        Command::RhoB { .. } => "rho-b",
        Command::Lchk(_) => "lchk",
        Command::Lattice(_) => "lattice",
        Command::Catalog { action: CatalogAction::Verify { .. } } => "catalog verify",
        Command::Catalog { action: CatalogAction::List } => "catalog list",
        Command::Catalog { action: CatalogAction::Export { .. } } => "catalog export",
        Command::SktToLcb { .. } => "skt-to-lcb",
    }
}

fn read(path: &Path) -> std::result::Result<String, Failure> {
    std::fs::read_to_string(path).map_err(|e| Failure::Input(format!("{}: {e}", path.display())))
}

fn load(path: &Path) -> std::result::Result<AlgebraDocument, Failure> {
    Ok(document::parse(&read(path)?)?)
}

fn kernel_name(k: ScalarKind) -> &'static str {
    match k {
        ScalarKind::Exact => "exact",
        ScalarKind::Float => "float",
    }
}

fn s<S: Scalar>(x: &S) -> Value {
    Value::String(format_scalar(x))
}

fn vec_json<S: Scalar>(v: &[S]) -> Value {
    Value::Array(v.iter().map(s).collect())
}

fn mat_json<S: Scalar>(m: &Matrix<S>) -> Value {
    Value::Array(m.to_rows().iter().map(|r| vec_json(r)).collect())
}

fn mat_text<S: Scalar>(m: &Matrix<S>) -> String {
    let rows: Vec<String> = m.to_rows().iter().map(|r| format!("[{}]", r.iter().map(format_scalar).collect::<Vec<_>>().join(", "))).collect();
    format!("[{}]", rows.join(", "))
}

/// Extracted data on the document's own kernel, or on the float kernel when the
/// exact adapted basis would need square roots.
enum AnyData {
    Exact(HermitianData<Rational>),
    Float(HermitianData<f64>),
}

fn extract_any(doc: &AlgebraDocument) -> std::result::Result<AnyData, Failure> {
    if doc.kind() == ScalarKind::Exact {
        let h = doc.hermitian::<Rational>()?;
        match extract_data(&h, doc.ideal_subspace().as_ref()) {
            Ok(d) => return Ok(AnyData::Exact(d)),
            Err(Error::IrrationalNormalization) => {}
            Err(e) => return Err(e.into()),
        }
    }
    let h = doc.hermitian::<f64>()?;
    Ok(AnyData::Float(extract_data(&h, doc.ideal_subspace().as_ref())?))
}

macro_rules! with_data {
    ($any:expr, $d:ident => $body:expr) => {
        match $any {
            AnyData::Exact($d) => ("exact", $body),
            AnyData::Float($d) => ("float", $body),
        }
    };
}

fn direct_value<S: Scalar>(h: &HermitianStructure<S>, p: Property) -> aalg_core::Result<bool> {
    Ok(match p {
        Property::Kahler => h.is_kahler(),
        Property::Lck => h.is_lck()?,
        Property::Balanced => h.is_balanced(),
        Property::Skt => h.is_skt(),
        Property::Lcb => h.is_lcb()?,
        Property::Vaisman => h.is_vaisman()?,
    })
}

fn data_value<S: Scalar>(d: &HermitianData<S>, p: Property) -> Option<bool> {
    match p {
        Property::Kahler => Some(d.is_kahler_data()),
        Property::Lck => Some(d.is_lck_data()),
        Property::Balanced => Some(d.is_balanced_data()),
        Property::Skt => Some(d.is_skt_data()),
        Property::Lcb => Some(d.is_lcb_data()),
        Property::Vaisman => None,
    }
}

fn direct_all<S: Scalar>(h: &HermitianStructure<S>, props: &[Property]) -> aalg_core::Result<Vec<bool>> {
    props.iter().map(|p| direct_value(h, *p)).collect()
}

fn check(file: &Path, property: Option<Property>) -> Outcome {
    let doc = load(file)?;
    let props: Vec<Property> = property.map_or_else(|| Property::ALL.to_vec(), |p| vec![p]);
    let direct = match doc.kind() {
        ScalarKind::Exact => direct_all(&doc.hermitian::<Rational>()?, &props)?,
        ScalarKind::Float => direct_all(&doc.hermitian::<f64>()?, &props)?,
    };
    let (data_kernel, data): (&str, std::result::Result<Vec<Option<bool>>, String>) = match extract_any(&doc) {
        Ok(any) => {
            let (k, v) = with_data!(any, d => props.iter().map(|p| data_value(&d, *p)).collect::<Vec<_>>());
            (k, Ok(v))
        }
        Err(Failure::Input(m)) => return Err(Failure::Input(m)),
        Err(Failure::Rejected(m)) => ("none", Err(m)),
    };
    let mut rows = Vec::new();
    let mut text = format!("{} (dim {}, {} kernel)\n", doc.name, doc.dim, kernel_name(doc.kind()));
    text.push_str(&format!("{:<10} {:>7} {:>7} {:>7}\n", "property", "direct", "data", "agree"));
    for (i, p) in props.iter().enumerate() {
        let dv = data.as_ref().ok().and_then(|v| v[i]);
        let agree = dv.map(|x| x == direct[i]);
        rows.push(json!({ "property": p.name(), "direct": direct[i], "data": dv, "agree": agree }));
        let show = |b: Option<bool>| b.map_or("-".to_string(), |x| x.to_string());
        text.push_str(&format!("{:<10} {:>7} {:>7} {:>7}\n", p.name(), direct[i], show(dv), show(agree)));
    }
    if let Err(m) = &data {
        text.push_str(&format!("data criteria unavailable: {m}\n"));
    }
    let body = json!({
        "name": doc.name,
        "dim": doc.dim,
        "kernel": kernel_name(doc.kind()),
        "data_kernel": data_kernel,
        "data_error": data.as_ref().err(),
        "properties": rows,
    });
    Ok(Report { body, text, rejected: false })
}

fn data_body<S: Scalar>(d: &HermitianData<S>) -> Value {
    json!({
        "a": s(&d.a),
        "v": vec_json(&d.v),
        "A": mat_json(&d.a_mat),
        "J1": mat_json(&d.j1),
        "basis": Value::Array(d.basis.iter().map(|b| vec_json(b)).collect()),
        "gauge": serde_json::to_value(d.gauge_summary()).expect("serializable"),
        "verdicts": serde_json::to_value(d.data_verdicts()).expect("serializable"),
    })
}

fn data_text<S: Scalar>(d: &HermitianData<S>) -> String {
    let g = d.gauge_summary();
    let v = d.data_verdicts();
    let mut t = String::new();
    t.push_str(&format!("a       = {}\n", format_scalar(&d.a)));
    t.push_str(&format!("v       = [{}]\n", d.v.iter().map(format_scalar).collect::<Vec<_>>().join(", ")));
    t.push_str(&format!("A       = {}\n", mat_text(&d.a_mat)));
    t.push_str(&format!("J1      = {}\n", mat_text(&d.j1)));
    t.push_str(&format!("|v|^2   = {}\ntr A    = {}\nchar A  = {}\nmin A   = {}\n", g.v_norm_squared, g.trace_a, g.char_poly_a, g.min_poly_a));
    t.push_str(&format!("kahler {}  balanced {}  lck {}  lcb {}  skt {}\n", v.kahler, v.balanced, v.lck, v.lcb, v.skt));
    t
}

fn data(file: &Path) -> Outcome {
    let doc = load(file)?;
    let any = extract_any(&doc)?;
    let (kernel, (mut body, text)) = with_data!(any, d => (data_body(&d), data_text(&d)));
    body["name"] = doc.name.clone().into();
    body["kernel"] = kernel.into();
    Ok(Report { body, text: format!("{} ({kernel} kernel)\n{text}", doc.name), rejected: false })
}

fn rho_b_report<S: Scalar>(d: &HermitianData<S>) -> std::result::Result<(Value, String), Failure> {
    let closed = d.rho_b_closed();
    let oracle = d.hermitian_structure()?.bismut_ricci_oracle();
    let residual = closed.sub(&oracle).max_abs();
    let type_11 = is_type_11(&closed, &d.j_adapted());
    let lcb = d.is_lcb_data();
    let body = json!({
        "closed_form": closed.render("e"),
        "oracle": oracle.render("e"),
        "residual": residual,
        "type_11": type_11,
        "lcb_data": lcb,
        "agree": type_11 == lcb,
    });
    let text = format!(
        "closed   {}\noracle   {}\nresidual {residual:e}\ntype (1,1) {type_11}, lcb {lcb}\n",
        closed.render("e"),
        oracle.render("e")
    );
    Ok((body, text))
}

fn rho_b(file: &Path) -> Outcome {
    let doc = load(file)?;
    let any = extract_any(&doc)?;
    let (kernel, r) = with_data!(any, d => rho_b_report(&d));
    let (mut body, text) = r?;
    body["name"] = doc.name.clone().into();
    body["kernel"] = kernel.into();
    Ok(Report { body, text: format!("{} ({kernel} kernel, adapted coframe)\n{text}", doc.name), rejected: false })
}

enum AnyMatrix {
    Exact(Matrix<Rational>),
    Float(Matrix<f64>),
}

/// `idN`, a literal matrix, or a file with a literal matrix or an algebra
/// document (then the ad operator on its abelian ideal).
fn matrix_arg(arg: &str) -> std::result::Result<AnyMatrix, Failure> {
    let t = arg.trim();
    if let Some(n) = t.strip_prefix("id").and_then(|n| n.parse::<usize>().ok()) {
        return Ok(AnyMatrix::Exact(Matrix::identity(n)));
    }
    let text = if t.starts_with('[') { t.to_string() } else { read(Path::new(t))? };
    if text.trim_start().starts_with('[') {
        let m = document::parse_matrix(text.trim())?;
        return Ok(match m.kind() {
            ScalarKind::Exact => AnyMatrix::Exact(m.to_matrix()?),
            ScalarKind::Float => AnyMatrix::Float(m.to_matrix()?),
        });
    }
    let doc = document::parse(&text)?;
    Ok(match doc.kind() {
        ScalarKind::Exact => AnyMatrix::Exact(catalog::ideal_operator(&doc.algebra::<Rational>()?)?),
        ScalarKind::Float => AnyMatrix::Float(catalog::ideal_operator(&doc.algebra::<f64>()?)?),
    })
}

fn lchk_report<S: Scalar>(d: &Matrix<S>, witness: bool) -> Outcome {
    let v = lchk_admissible(d)?;
    let summary = v.summary();
    let mut body = json!({ "D": mat_json(d), "verdict": serde_json::to_value(&summary).expect("serializable") });
    let mut text = format!(
        "admissible {}  a = {}  hyperkahler {}\n(i) {}  (ii) {}  (iii) {}  diagonalizable {}\n",
        summary.admissible,
        summary.a.as_deref().unwrap_or("-"),
        summary.hyperkahler,
        summary.condition_i,
        summary.condition_ii,
        summary.condition_iii,
        summary.diagonalizable
    );
    for m in &summary.multiplicities {
        text.push_str(&format!("  eigenvalue {} multiplicity {}\n", m.eigenvalue, m.multiplicity));
    }
    for n in &summary.notes {
        text.push_str(&format!("  note: {n}\n"));
    }
    if witness && v.admissible {
        let w = construct_lchk(d)?;
        let t = &w.triple;
        body["witness"] = json!({
            "m": w.m,
            "a": s(&w.a),
            "canonical_D": mat_json(&w.canonical_d),
            "change_of_basis": mat_json(&w.change_of_basis),
            "I1": mat_json(t.i1.matrix()),
            "I2": mat_json(t.i2.matrix()),
            "I3": mat_json(t.i3.matrix()),
            "g": mat_json(t.g.matrix()),
            "theta": t.theta.render("e"),
            "quaternion_relations": t.quaternion_relations(),
        });
        text.push_str(&format!("canonical D = {}\nI1 = {}\nI2 = {}\nI3 = {}\ntheta = {}\n", mat_text(&w.canonical_d), mat_text(t.i1.matrix()), mat_text(t.i2.matrix()), mat_text(t.i3.matrix()), t.theta.render("e")));
    }
    Ok(Report { body, text, rejected: !v.admissible })
}

fn lchk(a: &LchkArgs) -> Outcome {
    match matrix_arg(&a.matrix)? {
        AnyMatrix::Exact(m) => lchk_report(&m, a.witness),
        AnyMatrix::Float(m) => lchk_report(&m, a.witness),
    }
}

fn lattice(a: &LatticeArgs) -> Outcome {
    let spec = a.rule.as_deref().or(a.grid.as_deref()).expect("clap enforces one schedule");
    let schedule = TSchedule::parse(spec).map_err(|e| Failure::Input(e.to_string()))?;
    let path = a.file.to_string_lossy();
    let report = match matrix_arg(&path)? {
        AnyMatrix::Exact(m) => integrality_probe(&m, &schedule, a.eps_int, a.residual)?,
        AnyMatrix::Float(m) => integrality_probe(&m, &schedule, a.eps_int, a.residual)?,
    };
    let mut text = format!("schedule {}  eps_int {:e}{}\n", report.schedule, report.eps_int, if report.numeric_roots { "  (numeric roots)" } else { "" });
    for e in &report.entries {
        let resid = e.residual.as_ref().map_or(String::new(), |r| format!("  residual dev {:.3e}", r.deviation));
        text.push_str(&format!("t = {:<12} {:<12} min dev {:.3e}  char dev {:.3e}{resid}\n", e.t_label, serde_json::to_value(e.verdict).expect("serializable").as_str().unwrap_or("?"), e.min_deviation, e.char_deviation));
    }
    text.push_str(&match &report.overall {
        aalg_core::lattice::Overall::Found { t_label, .. } => format!("FOUND at t = {t_label}\n"),
        aalg_core::lattice::Overall::NoneInRange => "NONE_IN_RANGE\n".to_string(),
    });
    let body = serde_json::to_value(&report).expect("serializable");
    Ok(Report { body, text, rejected: false })
}

fn catalog_cmd(action: &CatalogAction) -> Outcome {
    match action {
        CatalogAction::Verify { entry, samples } => {
            let report = match entry {
                Some(name) => {
                    let e = catalog::find(name)?;
                    let r = catalog::verify_entry(e, *samples);
                    let passed = r.passed;
                    catalog::CatalogReport { entries: vec![r], passed }
                }
                None => catalog::verify_all(*samples),
            };
            let mut text = String::new();
            for e in &report.entries {
                text.push_str(&format!("{} {:<18} samples {}  unimodular iff {}\n", if e.passed { "PASS" } else { "FAIL" }, e.name, e.samples.len(), e.unimodular_claim));
                for smp in &e.samples {
                    for c in smp.checks.iter().filter(|c| c.status == Status::Fail) {
                        text.push_str(&format!("     [{}] {}: {}\n", smp.params, c.name, c.detail));
                    }
                }
                for c in &e.not_checked {
                    text.push_str(&format!("     NOT_CHECKED {}\n", c.name));
                }
            }
            text.push_str(if report.passed { "all entries pass\n" } else { "some entries FAIL\n" });
            let rejected = !report.passed;
            Ok(Report { body: serde_json::to_value(&report).expect("serializable"), text, rejected })
        }
        CatalogAction::List => {
            let mut rows = Vec::new();
            let mut text = String::new();
            for e in catalog::catalog() {
                rows.push(json!({
                    "name": e.name,
                    "family": e.family,
                    "dim": e.dim,
                    "params": e.params,
                    "constraints": e.constraints,
                    "differentials": e.differentials,
                    "unimodular_iff": e.unimodular_claim,
                }));
                text.push_str(&format!("{:<18} dim {:<3} ({}) [{}]  {}\n", e.name, e.dim, e.differentials, e.params.join(", "), e.constraints));
            }
            Ok(Report { body: json!({ "entries": rows }), text, rejected: false })
        }
        CatalogAction::Export { out } => {
            let manifest = document::render_manifest(&catalog::manifest()?);
            if let Some(path) = out {
                std::fs::write(path, &manifest).map_err(|e| Failure::Input(format!("{}: {e}", path.display())))?;
            }
            let text = if out.is_some() { String::new() } else { manifest.clone() };
            Ok(Report { body: json!({ "manifest": manifest }), text, rejected: false })
        }
    }
}

fn literal<S: Scalar>(x: &S) -> Expr {
    if x.is_zero() {
        return Expr::default();
    }
    let negative = x.to_f64() < 0.0;
    let lit = match x.abs().to_rational() {
        Some(r) if S::is_exact() => Literal::Exact(r),
        _ => Literal::Float(x.abs().to_f64()),
    };
    Expr(vec![Term { negative, factors: vec![Factor::Literal(lit)], basis: None }])
}

fn skt_to_lcb_doc<S: Scalar>(doc: &AlgebraDocument, d: &HermitianData<S>) -> std::result::Result<(AlgebraDocument, bool), Failure> {
    let out = d.skt_to_lcb()?;
    let g = out.metric_in_original()?;
    let mut new = doc.clone();
    new.name = format!("{}-lcb", doc.name);
    new.g = Some(if g == Matrix::identity(g.rows()) {
        GSpec::Identity
    } else {
        GSpec::Matrix((0..g.rows()).map(|i| (0..g.cols()).map(|j| literal(&g[(i, j)])).collect()).collect())
    });
    Ok((new, out.is_lcb_data()))
}

fn skt_to_lcb(file: &Path) -> Outcome {
    let doc = load(file)?;
    let any = extract_any(&doc)?;
    let (kernel, r) = with_data!(any, d => skt_to_lcb_doc(&doc, &d));
    let (new, lcb_data) = r?;
    let rendered = new.render();
    let lcb_direct = match new.kind() {
        ScalarKind::Exact => new.hermitian::<Rational>()?.is_lcb()?,
        ScalarKind::Float => new.hermitian::<f64>()?.is_lcb()?,
    };
    let body = json!({ "kernel": kernel, "document": rendered, "lcb_data": lcb_data, "lcb_direct": lcb_direct });
    Ok(Report { body, text: rendered, rejected: false })
}
