//! Named almost abelian algebras with witness structures, and a harness that
//! re-checks every claim attached to them.
//!
//! Data witnesses are `(a, v, A, J_1)` in an adapted unitary basis. Each one is
//! tied to its entry by an explicit similarity between the two `ad` operators on
//! the abelian ideal, which is an isomorphism of almost abelian algebras.

use std::sync::OnceLock;

use nalgebra::DMatrix;
use serde::Serialize;

use crate::almost_abelian::{extract_data, HermitianData};
use crate::document::{parse, AlgebraDocument, Expr, Factor, GSpec, JSpec, Literal, Term};
use crate::error::{Error, Result};
use crate::exterior::KForm;
use crate::hermitian::{ComplexStructure, HermitianStructure, Metric};
use crate::lchk::{construct_lchk, hyperkahler_flatness, lchk_admissible, LchkWitness};
use crate::lie::LieAlgebra;
use crate::linalg::{similarity_transform, Matrix};
use crate::scalar::{format_rational, Rational, Scalar};

type Q = Rational;

fn q(n: i64) -> Q {
    Q::from_i64(n)
}

fn r(n: i64, d: i64) -> Q {
    Q::from_ratio(n, d)
}

fn z() -> Q {
    q(0)
}

fn mat<const N: usize>(rows: [[Q; N]; N]) -> Matrix<Q> {
    Matrix::from_rows(rows.into_iter().map(|r| r.to_vec()).collect()).expect("square")
}

fn diag4(x: [Q; 4]) -> Matrix<Q> {
    Matrix::diagonal(&x)
}

/// `J e'_1 = e'_2`, `J e'_3 = e'_4`.
fn j_pair() -> Matrix<Q> {
    mat([[z(), q(-1), z(), z()], [q(1), z(), z(), z()], [z(), z(), z(), q(-1)], [z(), z(), q(1), z()]])
}

/// `J e'_1 = e'_3`, `J e'_2 = e'_4`.
fn j_cross() -> Matrix<Q> {
    mat([[z(), z(), q(-1), z()], [z(), z(), z(), q(-1)], [q(1), z(), z(), z()], [z(), q(1), z(), z()]])
}

/// `J e'_1 = e'_4`, `J e'_2 = e'_3`.
fn j_mirror() -> Matrix<Q> {
    crate::almost_abelian::standard_j1(3)
}

/// `[[x, y], [-y, x]]` in the top-left block, `[[u, w], [-w, u]]` below.
fn rot2(x: &Q, y: &Q, u: &Q, w: &Q) -> Matrix<Q> {
    mat([
        [x.clone(), y.clone(), z(), z()],
        [-y.clone(), x.clone(), z(), z()],
        [z(), z(), u.clone(), w.clone()],
        [z(), z(), -w.clone(), u.clone()],
    ])
}

/// Two equal Jordan blocks `[[p, 1], [0, p]]`.
fn jordan_pair(p: &Q) -> Matrix<Q> {
    mat([[p.clone(), q(1), z(), z()], [z(), p.clone(), z(), z()], [z(), z(), p.clone(), q(1)], [z(), z(), z(), p.clone()]])
}

fn a5(p: &Q) -> Matrix<Q> {
    mat([
        [p.clone(), q(1), q(-1), z()],
        [q(-1), p.clone(), z(), q(-1)],
        [z(), z(), p.clone(), q(1)],
        [z(), z(), q(-1), p.clone()],
    ])
}

fn data(a: Q, v: [Q; 4], a_mat: Matrix<Q>, j1: Matrix<Q>) -> Result<HermitianData<Q>> {
    HermitianData::new(a, v.to_vec(), a_mat, j1)
}

fn no_v() -> [Q; 4] {
    [z(), z(), z(), z()]
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Family {
    /// Six-dimensional, LCK but never Kähler.
    Lck,
    /// Six-dimensional non-nilpotent, LCB.
    Lcb,
    LcbNilpotent,
    /// Worked examples comparing two kinds of metric on one complex structure.
    Example,
    Lchk,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum LchkExpectation {
    Admissible { hyperkahler: bool },
    Rejected,
}

type Structures = Vec<(&'static str, HermitianStructure<Q>)>;

#[derive(Clone, Copy)]
enum Recipe {
    Data(fn(&[Q]) -> Result<HermitianData<Q>>),
    Example { build: fn(LieAlgebra<Q>, &[Q]) -> Result<Structures>, check: fn(&[Q], &Structures, &mut Checks) -> Result<()> },
    Lchk(LchkExpectation),
}

pub struct CatalogEntry {
    pub name: &'static str,
    pub family: Family,
    pub dim: usize,
    pub params: &'static [&'static str],
    pub constraints: &'static str,
    constraint: fn(&[Q]) -> bool,
    /// Body of the `d = (...)` tuple, in document syntax.
    pub differentials: &'static str,
    pub unimodular_claim: &'static str,
    unimodular: fn(&[Q]) -> bool,
    /// Projects a sample onto the unimodular locus, when there is one.
    to_locus: Option<fn(&[Q]) -> Vec<Q>>,
    recipe: Recipe,
    pub not_checked: &'static [&'static str],
}

/// What a witness recipe produces.
pub enum Witness {
    Data { data: HermitianData<Q>, structure: HermitianStructure<Q> },
    Structures(Structures),
    Lchk(Box<LchkWitness<Q>>),
}

pub const DEFAULT_SAMPLES: usize = 3;

/// Sample values, ordered so the first tuple is all ones.
const SAMPLE_VALUES: [(i64, i64); 7] = [(1, 1), (2, 1), (-1, 1), (1, 2), (-1, 2), (1, 4), (-1, 4)];

impl CatalogEntry {
    pub fn satisfies(&self, params: &[Q]) -> bool {
        params.len() == self.params.len() && (self.constraint)(params)
    }

    pub fn is_unimodular_claimed(&self, params: &[Q]) -> bool {
        (self.unimodular)(params)
    }

    pub fn document(&self, params: &[Q]) -> Result<AlgebraDocument> {
        if params.len() != self.params.len() {
            return Err(Error::ConstraintViolation(format!("{} takes parameters ({}), got {} values", self.name, self.params.join(", "), params.len())));
        }
        let mut text = format!("algebra {} dim {}\n", self.name, self.dim);
        if !params.is_empty() {
            let b: Vec<String> = self.params.iter().zip(params).map(|(n, v)| format!("{n} = {}", format_rational(v))).collect();
            text.push_str(&format!("params {}\n", b.join(", ")));
        }
        text.push_str(&format!("d = ({})\n", self.differentials));
        let mut doc = parse(&text)?;
        if let Recipe::Example { build, .. } = self.recipe {
            if let Some((_, h)) = build(doc.algebra()?, params)?.last() {
                doc.j = Some(j_spec(h.complex_structure()));
                doc.g = Some(g_spec(h.metric()));
            }
        }
        Ok(doc)
    }

    pub fn instantiate(&self, params: &[Q]) -> Result<LieAlgebra<Q>> {
        if !self.satisfies(params) {
            return Err(Error::ConstraintViolation(format!("{}: requires {}", self.name, self.constraints)));
        }
        self.document(params)?.algebra()
    }

    pub fn witness(&self, params: &[Q]) -> Result<Witness> {
        if !self.satisfies(params) {
            return Err(Error::ConstraintViolation(format!("{}: requires {}", self.name, self.constraints)));
        }
        match self.recipe {
            Recipe::Data(f) => {
                let data = f(params)?;
                let structure = data.hermitian_structure()?;
                Ok(Witness::Data { data, structure })
            }
            Recipe::Example { build, .. } => Ok(Witness::Structures(build(self.instantiate(params)?, params)?)),
            Recipe::Lchk(_) => {
                let d = ideal_operator(&self.instantiate(params)?)?;
                Ok(Witness::Lchk(Box::new(construct_lchk(&d)?)))
            }
        }
    }

    /// Up to `n` samples off the unimodular locus plus up to two on it.
    pub fn samples(&self, n: usize) -> Vec<Vec<Q>> {
        let k = self.params.len();
        if k == 0 {
            return vec![vec![]];
        }
        let total = SAMPLE_VALUES.len().pow(k as u32);
        let stride = (1..total).find(|s| gcd(*s, total) == 1 && *s > total / 3).unwrap_or(1);
        let tuple = |i: usize| -> Vec<Q> {
            let mut idx = (i * stride) % total;
            let mut out = Vec::with_capacity(k);
            for _ in 0..k {
                let (a, b) = SAMPLE_VALUES[idx % SAMPLE_VALUES.len()];
                out.push(r(a, b));
                idx /= SAMPLE_VALUES.len();
            }
            out
        };
        let mut off = Vec::new();
        let mut on: Vec<Vec<Q>> = Vec::new();
        for i in 0..total {
            let t = tuple(i);
            if !self.satisfies(&t) {
                continue;
            }
            if self.is_unimodular_claimed(&t) {
                if on.len() < 2 && !on.contains(&t) {
                    on.push(t.clone());
                }
            } else if off.len() < n {
                off.push(t.clone());
            }
            if let Some(f) = self.to_locus {
                let p = f(&t);
                if on.len() < 2 && self.satisfies(&p) && !on.contains(&p) {
                    on.push(p);
                }
            }
        }
        off.extend(on);
        off
    }

    pub fn params_label(&self, params: &[Q]) -> String {
        self.params.iter().zip(params).map(|(n, v)| format!("{n}={}", format_rational(v))).collect::<Vec<_>>().join(", ")
    }
}

fn gcd(a: usize, b: usize) -> usize {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

fn literal_expr(x: &Q) -> Expr {
    if Scalar::is_zero(x) {
        return Expr::default();
    }
    let negative = !x.is_positive();
    Expr(vec![Term { negative, factors: vec![Factor::Literal(Literal::Exact(Scalar::abs(x)))], basis: None }])
}

fn matrix_spec(m: &Matrix<Q>) -> Vec<Vec<Expr>> {
    (0..m.rows()).map(|i| (0..m.cols()).map(|j| literal_expr(&m[(i, j)])).collect()).collect()
}

fn j_spec(j: &ComplexStructure<Q>) -> JSpec {
    let m = j.matrix();
    let n = m.rows();
    let mut pairs = Vec::new();
    let mut used = vec![false; n];
    for a in 0..n {
        if used[a] {
            continue;
        }
        let col: Vec<usize> = (0..n).filter(|&k| !Scalar::is_zero(&m[(k, a)])).collect();
        if col.len() != 1 || !Scalar::abs(&m[(col[0], a)]).eq(&q(1)) || used[col[0]] {
            return JSpec::Matrix(matrix_spec(m));
        }
        let b = col[0];
        used[a] = true;
        used[b] = true;
        pairs.push((a + 1, b + 1, !m[(b, a)].is_positive()));
    }
    JSpec::Pairs(pairs)
}

fn g_spec(g: &Metric<Q>) -> GSpec {
    if g.matrix() == &Matrix::identity(g.dim()) {
        GSpec::Identity
    } else {
        GSpec::Matrix(matrix_spec(g.matrix()))
    }
}

/// `ad` of the transversal on the codimension-one abelian ideal.
pub fn ideal_operator<S: Scalar>(l: &LieAlgebra<S>) -> Result<Matrix<S>> {
    let s = l.find_codim1_abelian_ideal().ok_or(Error::NotAlmostAbelian)?;
    Ok(l.transversal_operator(&s))
}

fn data_agreement<S: Scalar>(h: &HermitianStructure<S>, ideal: Option<&crate::lie::Subspace<S>>) -> Result<(bool, String)> {
    let dv = extract_data(h, ideal)?.data_verdicts();
    let direct = h.direct_verdicts()?;
    let agree = dv.kahler == direct.kahler && dv.balanced == direct.balanced && dv.lck == direct.lck && dv.lcb == direct.lcb && dv.skt == direct.skt;
    Ok((agree, format!("{dv:?} vs {direct:?}")))
}

/// Eigenvalues of `b` off the imaginary axis, counted with multiplicity.
fn off_axis_count(b: &Matrix<Q>) -> usize {
    let n = b.rows();
    let m = DMatrix::from_fn(n, n, |i, j| Scalar::to_f64(&b[(i, j)]));
    m.complex_eigenvalues().iter().filter(|z| z.re.abs() > 1e-9).count()
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum Status {
    Pass,
    Fail,
    NotChecked,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Check {
    pub name: String,
    pub status: Status,
    pub detail: String,
}

#[derive(Default)]
pub struct Checks(pub Vec<Check>);

impl Checks {
    fn add(&mut self, name: impl Into<String>, ok: bool, detail: impl Into<String>) {
        self.0.push(Check { name: name.into(), status: if ok { Status::Pass } else { Status::Fail }, detail: detail.into() });
    }

    fn flag(&mut self, name: impl Into<String>, ok: bool) {
        self.add(name, ok, "");
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SampleReport {
    pub params: String,
    pub checks: Vec<Check>,
    pub passed: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct EntryReport {
    pub name: String,
    pub family: Family,
    pub constraints: String,
    pub unimodular_claim: String,
    pub samples: Vec<SampleReport>,
    pub not_checked: Vec<Check>,
    pub passed: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CatalogReport {
    pub entries: Vec<EntryReport>,
    pub passed: bool,
}

fn verify_sample(e: &CatalogEntry, params: &[Q]) -> Checks {
    let mut c = Checks::default();
    if let Err(err) = verify_sample_inner(e, params, &mut c) {
        c.add("witness", false, err.to_string());
    }
    c
}

fn verify_sample_inner(e: &CatalogEntry, params: &[Q], c: &mut Checks) -> Result<()> {
    let l = e.instantiate(params)?;
    let uni = l.is_unimodular();
    c.add("unimodular-claim", uni == e.is_unimodular_claimed(params), format!("unimodular = {uni}, claim: {}", e.unimodular_claim));
    match e.recipe {
        Recipe::Data(f) => {
            let d = f(params)?;
            let h = d.hermitian_structure()?;
            let n = h.dim();
            let idx: Vec<usize> = (0..n - 1).collect();
            let bw = h.algebra().ad_basis(n - 1).submatrix(&idx, &idx);
            let be = ideal_operator(&l)?;
            match similarity_transform(&bw, &be) {
                Some(p) => c.add("isomorphic", p.mul(&bw) == be.mul(&p), "ad operators are similar"),
                None => c.add("isomorphic", false, "no invertible intertwiner found"),
            }
            let direct = h.direct_verdicts()?;
            match e.family {
                Family::Lck => {
                    c.flag("lck-data", d.is_lck_data());
                    c.flag("lck-direct", direct.lck);
                    c.flag("non-kahler-witness", !d.is_kahler_data() && !direct.kahler);
                    let tr = d.a_mat.trace();
                    let u = d.a_mat.shift(&(tr.clone() / q(4)));
                    c.flag("A = (trA/4) Id + U, U skew", u.is_skew());
                    c.add("no-kahler-structure", !Scalar::is_zero(&tr) && off_axis_count(&be) >= 2, "trace and spectral obstruction");
                }
                Family::Lcb | Family::LcbNilpotent => {
                    c.flag("lcb-data", d.is_lcb_data());
                    c.flag("lcb-direct", direct.lcb);
                    let rep = d.lcb_iff_11();
                    c.flag("rho-b-type-11", rep.type_11);
                    if e.family == Family::LcbNilpotent {
                        c.flag("nilpotent", l.is_nilpotent());
                    } else {
                        c.flag("non-nilpotent", !l.is_nilpotent());
                    }
                }
                _ => {}
            }
        }
        Recipe::Example { build, check } => {
            let s = build(l.clone(), params)?;
            for (label, h) in &s {
                let ideal = l.find_codim1_abelian_ideal().ok_or(Error::NotAlmostAbelian)?;
                let agreement = match data_agreement(h, Some(&ideal.ideal)) {
                    Err(Error::IrrationalNormalization) => data_agreement(&h.to_float()?, None).map(|(ok, d)| (ok, format!("float kernel: {d}"))),
                    other => other,
                };
                match agreement {
                    Ok((ok, detail)) => c.add(format!("{label}: data criteria agree with direct"), ok, detail),
                    Err(err) => c.add(format!("{label}: extract data"), false, err.to_string()),
                }
            }
            check(params, &s, c)?;
        }
        Recipe::Lchk(expect) => {
            let d = ideal_operator(&l)?;
            let v = lchk_admissible(&d)?;
            match expect {
                LchkExpectation::Rejected => c.add("rejected", !v.admissible, v.notes.join("; ")),
                LchkExpectation::Admissible { hyperkahler } => {
                    c.add("admissible", v.admissible, v.notes.join("; "));
                    c.flag("hyperkahler-flag", v.hyperkahler == hyperkahler);
                    let w = construct_lchk(&d)?;
                    c.flag("quaternion-relations", w.triple.quaternion_relations());
                    let n = 4 * w.m;
                    let theta = KForm::basis(n, &[n - 1]).scale(&(-q(4 * w.m as i64 - 2) * w.a.clone()));
                    let mut same = true;
                    for i in w.triple.structures() {
                        let h = HermitianStructure::new(w.algebra.clone(), i.clone(), w.triple.g.clone())?;
                        same &= h.is_lck()? && h.lee_form()? == theta;
                    }
                    c.add("lee-forms", same, format!("theta = {}", theta.render("e")));
                    if hyperkahler {
                        c.flag("flat", hyperkahler_flatness(&w.triple, &w.algebra)?);
                    }
                }
            }
        }
    }
    Ok(())
}

pub fn verify_entry(e: &CatalogEntry, samples: usize) -> EntryReport {
    let reports: Vec<SampleReport> = e
        .samples(samples)
        .into_iter()
        .map(|p| {
            let checks = verify_sample(e, &p).0;
            let passed = checks.iter().all(|c| c.status != Status::Fail);
            SampleReport { params: e.params_label(&p), checks, passed }
        })
        .collect();
    let not_checked = e.not_checked.iter().map(|n| Check { name: (*n).to_string(), status: Status::NotChecked, detail: "no data-level criterion".into() }).collect();
    let passed = !reports.is_empty() && reports.iter().all(|s| s.passed);
    EntryReport {
        name: e.name.to_string(),
        family: e.family,
        constraints: e.constraints.to_string(),
        unimodular_claim: e.unimodular_claim.to_string(),
        samples: reports,
        not_checked,
        passed,
    }
}

pub fn verify_all(samples: usize) -> CatalogReport {
    let mut entries: Vec<EntryReport> = catalog().iter().map(|e| verify_entry(e, samples)).collect();
    entries.sort_by(|a, b| a.name.cmp(&b.name));
    let passed = entries.iter().all(|e| e.passed);
    CatalogReport { entries, passed }
}

pub fn find(name: &str) -> Result<&'static CatalogEntry> {
    catalog().iter().find(|e| e.name == name).ok_or_else(|| Error::UnknownEntry(name.to_string()))
}

/// Every entry rendered at its first sample.
pub fn manifest() -> Result<Vec<AlgebraDocument>> {
    catalog().iter().map(|e| e.document(&e.samples(1)[0])).collect()
}

pub fn catalog() -> &'static [CatalogEntry] {
    static CATALOG: OnceLock<Vec<CatalogEntry>> = OnceLock::new();
    CATALOG.get_or_init(build_catalog)
}

fn nz(x: &Q) -> bool {
    !Scalar::is_zero(x)
}

fn pm(x: &Q, y: &Q) -> bool {
    x != y && x != &-y.clone()
}

fn always(_: &[Q]) -> bool {
    true
}

fn never(_: &[Q]) -> bool {
    false
}

const NOT_BAL_LCK: &[&str] = &["no balanced structure", "no LCK structure"];

fn lck(name: &'static str, params: &'static [&'static str], constraints: &'static str, constraint: fn(&[Q]) -> bool, d: &'static str, uni: (&'static str, fn(&[Q]) -> bool, Option<fn(&[Q]) -> Vec<Q>>), w: fn(&[Q]) -> Result<HermitianData<Q>>) -> CatalogEntry {
    CatalogEntry {
        name,
        family: Family::Lck,
        dim: 6,
        params,
        constraints,
        constraint,
        differentials: d,
        unimodular_claim: uni.0,
        unimodular: uni.1,
        to_locus: uni.2,
        recipe: Recipe::Data(w),
        not_checked: &[],
    }
}

fn lcb(name: &'static str, params: &'static [&'static str], constraints: &'static str, constraint: fn(&[Q]) -> bool, d: &'static str, uni: (&'static str, fn(&[Q]) -> bool, Option<fn(&[Q]) -> Vec<Q>>), w: fn(&[Q]) -> Result<HermitianData<Q>>) -> CatalogEntry {
    CatalogEntry { family: Family::Lcb, not_checked: NOT_BAL_LCK, ..lck(name, params, constraints, constraint, d, uni, w) }
}

fn lchk_entry(name: &'static str, dim: usize, params: &'static [&'static str], constraints: &'static str, constraint: fn(&[Q]) -> bool, d: &'static str, expect: LchkExpectation) -> CatalogEntry {
    let hk = matches!(expect, LchkExpectation::Admissible { hyperkahler: true });
    CatalogEntry {
        name,
        family: Family::Lchk,
        dim,
        params,
        constraints,
        constraint,
        differentials: d,
        unimodular_claim: if hk { "always" } else { "never" },
        unimodular: if hk { always } else { never },
        to_locus: None,
        recipe: Recipe::Lchk(expect),
        not_checked: &[],
    }
}

const NEVER: (&str, fn(&[Q]) -> bool, Option<fn(&[Q]) -> Vec<Q>>) = ("never", never, None);

fn build_catalog() -> Vec<CatalogEntry> {
    use LchkExpectation::{Admissible, Rejected};
    let mut v = vec![
        lck("g1", &["p"], "p != 0", |p| nz(&p[0]), "f16, p*f26, p*f36, p*f46, p*f56, 0", ("p = -1/4", |p| p[0] == r(-1, 4), Some(|_| vec![r(-1, 4)])), |p| {
            data(q(1), no_v(), diag4([p[0].clone(), p[0].clone(), p[0].clone(), p[0].clone()]), j_pair())
        }),
        lck(
            "g2",
            &["p", "q"],
            "pq != 0",
            |p| nz(&p[0]) && nz(&p[1]),
            "p*f16, q*f26, q*f36, q*f46 + f56, -f46 + q*f56, 0",
            ("p = -4q", |p| p[0] == -q(4) * p[1].clone(), Some(|p| vec![-q(4) * p[1].clone(), p[1].clone()])),
            |p| data(p[0].clone(), no_v(), rot2(&p[1], &q(1), &p[1], &z()), j_pair()),
        ),
        lck(
            "g3",
            &["p", "q", "r"],
            "pq != 0, r != 0",
            |p| nz(&p[0]) && nz(&p[1]) && nz(&p[2]),
            "p*f16, q*f26 + f36, -f26 + q*f36, q*f46 + r*f56, -r*f46 + q*f56, 0",
            ("p = -4q", |p| p[0] == -q(4) * p[1].clone(), Some(|p| vec![-q(4) * p[1].clone(), p[1].clone(), p[2].clone()])),
            |p| data(p[0].clone(), no_v(), rot2(&p[1], &q(1), &p[1], &p[2]), j_pair()),
        ),
        lck("g4", &[], "none", always, "f16, f26, f36, f46, 0, 0", NEVER, |_| data(z(), no_v(), Matrix::identity(4), j_pair())),
        lck("g5", &["r"], "r != 0", |p| nz(&p[0]), "f16, f26, f36 + r*f46, -r*f36 + f46, 0, 0", NEVER, |p| data(z(), no_v(), rot2(&q(1), &p[0], &q(1), &z()), j_pair())),
        lck(
            "g6",
            &["p", "r"],
            "pr != 0",
            |p| nz(&p[0]) && nz(&p[1]),
            "p*f16 + f26, -f16 + p*f26, p*f36 + r*f46, -r*f36 + p*f46, 0, 0",
            NEVER,
            |p| data(z(), no_v(), rot2(&p[0], &q(1), &p[0], &p[1]), j_pair()),
        ),
        lcb(
            "l1",
            &["p", "q"],
            "pq != 0, p != ±q",
            |p| nz(&p[0]) && nz(&p[1]) && pm(&p[0], &p[1]),
            "f16, p*f26, p*f36, q*f46, q*f56, 0",
            ("q = -1/2 - p", |p| p[1] == r(-1, 2) - p[0].clone(), Some(|p| vec![p[0].clone(), r(-1, 2) - p[0].clone()])),
            |p| data(q(1), no_v(), diag4([p[0].clone(), p[0].clone(), p[1].clone(), p[1].clone()]), j_pair()),
        ),
        lcb("l2", &["p"], "p != 0", |p| nz(&p[0]), "f16, p*f26 + f36, p*f36, p*f46 + f56, p*f56, 0", ("p = -1/4", |p| p[0] == r(-1, 4), Some(|_| vec![r(-1, 4)])), |p| {
            data(q(1), no_v(), jordan_pair(&p[0]), j_cross())
        }),
        lcb(
            "l3",
            &["p", "q", "r"],
            "pq != 0, q != ±r",
            |p| nz(&p[0]) && nz(&p[1]) && pm(&p[1], &p[2]),
            "p*f16, q*f26, q*f36, r*f46 + f56, -f46 + r*f56, 0",
            ("r = -p/2 - q", |p| p[2] == -p[0].clone() / q(2) - p[1].clone(), Some(|p| vec![p[0].clone(), p[1].clone(), -p[0].clone() / q(2) - p[1].clone()])),
            |p| data(p[0].clone(), no_v(), rot2(&p[2], &q(1), &p[1], &z()), j_pair()),
        ),
        lcb(
            "l4",
            &["p", "q", "r", "s"],
            "pqs != 0, q != ±r",
            |p| nz(&p[0]) && nz(&p[1]) && nz(&p[3]) && pm(&p[1], &p[2]),
            "p*f16, q*f26 + f36, -f26 + q*f36, r*f46 + s*f56, -s*f46 + r*f56, 0",
            ("r = -p/2 - q", |p| p[2] == -p[0].clone() / q(2) - p[1].clone(), Some(|p| vec![p[0].clone(), p[1].clone(), -p[0].clone() / q(2) - p[1].clone(), p[3].clone()])),
            |p| data(p[0].clone(), no_v(), rot2(&p[1], &q(1), &p[2], &p[3]), j_pair()),
        ),
        lcb(
            "l5",
            &["p", "q"],
            "pq != 0",
            |p| nz(&p[0]) && nz(&p[1]),
            "p*f16, q*f26 + f36 - f46, -f26 + q*f36 - f56, q*f46 + f56, -f46 + q*f56, 0",
            ("q = -p/4", |p| p[1] == -p[0].clone() / q(4), Some(|p| vec![p[0].clone(), -p[0].clone() / q(4)])),
            |p| data(p[0].clone(), no_v(), a5(&p[1]), j_pair()),
        ),
        lcb("l6", &[], "none", always, "f16, f26, 0, 0, 0, 0", NEVER, |_| data(z(), no_v(), diag4([q(1), q(1), z(), z()]), j_pair())),
        lcb("l7", &[], "none", always, "f16, f26 + f36, f36, 0, 0, 0", NEVER, |_| {
            let a = mat([[q(1), q(1), z(), z()], [z(), z(), z(), z()], [z(), z(), z(), z()], [z(), z(), q(1), q(1)]]);
            data(q(1), [z(), z(), q(1), z()], a, j_mirror())
        }),
        lcb("l8", &["p"], "p != 0", |p| nz(&p[0]), "p*f16 + f26, -f16 + p*f26, 0, 0, 0, 0", NEVER, |p| data(z(), no_v(), rot2(&p[0], &q(1), &z(), &z()), j_pair())),
        lcb("l9", &["p"], "p != 0", |p| nz(&p[0]), "f16, p*f26, p*f36, 0, 0, 0", ("p = -1/2", |p| p[0] == r(-1, 2), Some(|_| vec![r(-1, 2)])), |p| {
            data(q(1), no_v(), diag4([p[0].clone(), p[0].clone(), z(), z()]), j_pair())
        }),
        lcb(
            "l10",
            &["p", "q"],
            "pq != 0",
            |p| nz(&p[0]) && nz(&p[1]),
            "p*f16, q*f26 + f36, -f26 + q*f36, 0, 0, 0",
            ("q = -p/2", |p| p[1] == -p[0].clone() / q(2), Some(|p| vec![p[0].clone(), -p[0].clone() / q(2)])),
            |p| data(p[0].clone(), no_v(), rot2(&p[1], &q(1), &z(), &z()), j_pair()),
        ),
        lcb("l11", &["p"], "p != 0, ±1", |p| nz(&p[0]) && pm(&p[0], &q(1)), "f16, f26, p*f36, p*f46, 0, 0", NEVER, |p| {
            data(z(), no_v(), diag4([q(1), q(1), p[0].clone(), p[0].clone()]), j_pair())
        }),
        lcb("l12", &[], "none", always, "f16, f26, f46, 0, 0, 0", NEVER, |_| data(z(), [z(), z(), q(1), z()], diag4([q(1), q(1), z(), z()]), j_pair())),
        lcb(
            "l13",
            &["q", "r"],
            "q != ±1, r != 0",
            |p| pm(&p[0], &q(1)) && nz(&p[1]),
            "f16, f26, q*f36 + r*f46, -r*f36 + q*f46, 0, 0",
            NEVER,
            |p| data(z(), no_v(), rot2(&p[0], &p[1], &q(1), &z()), j_pair()),
        ),
        lcb("l14", &["p"], "none", always, "p*f16 + f26, -f16 + p*f26, f46, 0, 0, 0", ("p = 0", |p| Scalar::is_zero(&p[0]), Some(|_| vec![z()])), |p| {
            data(z(), [z(), z(), q(1), z()], rot2(&p[0], &q(1), &z(), &z()), j_pair())
        }),
        lcb("l15", &[], "none", always, "f16 + f26, f26, f36 + f46, f46, 0, 0", NEVER, |_| data(z(), no_v(), jordan_pair(&q(1)), j_cross())),
        lcb(
            "l16",
            &["p", "q", "r"],
            "r != 0, p^2 + q^2 != 0, p != ±q",
            |p| nz(&p[2]) && (nz(&p[0]) || nz(&p[1])) && pm(&p[0], &p[1]),
            "p*f16 + f26, -f16 + p*f26, q*f36 + r*f46, -r*f36 + q*f46, 0, 0",
            NEVER,
            |p| data(z(), no_v(), rot2(&p[0], &q(1), &p[1], &p[2]), j_pair()),
        ),
        lcb("l17", &["p"], "p != 0", |p| nz(&p[0]), "p*f16 + f26 - f36, -f16 + p*f26 - f46, p*f36 + f46, -f36 + p*f46, 0, 0", NEVER, |p| {
            data(z(), no_v(), a5(&p[0]), j_pair())
        }),
        CatalogEntry {
            family: Family::LcbNilpotent,
            unimodular_claim: "always",
            unimodular: always,
            ..lcb("n1", &[], "none", always, "0, 0, 0, 0, 0, f12", NEVER, |_| data(z(), [z(), z(), q(1), z()], Matrix::zeros(4, 4), j_pair()))
        },
        CatalogEntry {
            family: Family::LcbNilpotent,
            unimodular_claim: "always",
            unimodular: always,
            ..lcb("n2", &[], "none", always, "0, 0, 0, f12, f13, f14", NEVER, |_| data(z(), [z(), q(1), z(), z()], jordan_pair(&z()), j_cross()))
        },
    ];
    v.extend(examples());
    v.extend([
        lchk_entry("lchk-m1-hk", 4, &[], "none", always, "0, 0, 0, 0", Admissible { hyperkahler: true }),
        lchk_entry("lchk-m1", 4, &[], "none", always, "f14, f24, f34, 0", Admissible { hyperkahler: false }),
        lchk_entry("lchk-m1-x-ii", 4, &[], "none", always, "f14, f24 + f34, -f24 + f34, 0", Rejected),
        lchk_entry("lchk-m2-hk-a", 8, &[], "none", always, "0, 0, 0, 0, 0, 0, 0, 0", Admissible { hyperkahler: true }),
        lchk_entry("lchk-m2-hk-b", 8, &[], "none", always, "f28, -f18, f48, -f38, 0, 0, 0, 0", Admissible { hyperkahler: true }),
        lchk_entry("lchk-m2-a", 8, &[], "none", always, "f18, f28, f38, f48, f58, f68, f78, 0", Admissible { hyperkahler: false }),
        lchk_entry(
            "lchk-m2-b",
            8,
            &["p"],
            "p != 0",
            |p| nz(&p[0]),
            "f18, f28, f38, f48 + p*f58, -p*f48 + f58, f68 + p*f78, -p*f68 + f78, 0",
            Admissible { hyperkahler: false },
        ),
        lchk_entry("lchk-m2-x-i", 8, &[], "none", always, "f18, f28, f38, 2*f48, 2*f58, 2*f68, 2*f78, 0", Rejected),
        lchk_entry("lchk-m2-x-ii", 8, &["p"], "p != 0", |p| nz(&p[0]), "f18, f28 + p*f38, -p*f28 + f38, f48 + p*f58, -p*f48 + f58, f68 + p*f78, -p*f68 + f78, 0", Rejected),
        lchk_entry("lchk-m2-x-iii", 8, &["p"], "p != 0", |p| nz(&p[0]), "f18, f28, f38, f48, f58, f68 + p*f78, -p*f68 + f78, 0", Rejected),
        lchk_entry("lchk-m2-x-jordan", 8, &[], "none", always, "f18, f28, f38, f48 + f58, f58, f68 + f78, f78, 0", Rejected),
        lchk_entry("lchk-m3-hk-a", 12, &[], "none", always, "0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0", Admissible { hyperkahler: true }),
        lchk_entry("lchk-m3-hk-b", 12, &[], "none", always, "f2,12, -f1,12, f4,12, -f3,12, 0, 0, 0, 0, 0, 0, 0, 0", Admissible { hyperkahler: true }),
        lchk_entry(
            "lchk-m3-hk-c",
            12,
            &["p"],
            "p != 0",
            |p| nz(&p[0]),
            "f2,12, -f1,12, f4,12, -f3,12, p*f6,12, -p*f5,12, p*f8,12, -p*f7,12, 0, 0, 0, 0",
            Admissible { hyperkahler: true },
        ),
        lchk_entry("lchk-m3-a", 12, &[], "none", always, "f1,12, f2,12, f3,12, f4,12, f5,12, f6,12, f7,12, f8,12, f9,12, f10,12, f11,12, 0", Admissible { hyperkahler: false }),
        lchk_entry(
            "lchk-m3-b",
            12,
            &["p"],
            "p != 0",
            |p| nz(&p[0]),
            "f1,12, f2,12, f3,12, f4,12, f5,12, f6,12, f7,12, f8,12 + p*f9,12, -p*f8,12 + f9,12, f10,12 + p*f11,12, -p*f10,12 + f11,12, 0",
            Admissible { hyperkahler: false },
        ),
        lchk_entry(
            "lchk-m3-c",
            12,
            &["p", "q"],
            "pq != 0",
            |p| nz(&p[0]) && nz(&p[1]),
            "f1,12, f2,12, f3,12, f4,12 + p*f5,12, -p*f4,12 + f5,12, f6,12 + p*f7,12, -p*f6,12 + f7,12, f8,12 + q*f9,12, -q*f8,12 + f9,12, f10,12 + q*f11,12, -q*f10,12 + f11,12, 0",
            Admissible { hyperkahler: false },
        ),
        lchk_entry(
            "lchk-m3-x-iii",
            12,
            &["p", "q"],
            "pq != 0, p != ±q",
            |p| nz(&p[0]) && nz(&p[1]) && pm(&p[0], &p[1]),
            "f1,12, f2,12, f3,12, f4,12, f5,12, f6,12, f7,12, f8,12 + p*f9,12, -p*f8,12 + f9,12, f10,12 + q*f11,12, -q*f10,12 + f11,12, 0",
            Rejected,
        ),
    ]);
    v
}

fn structure(l: LieAlgebra<Q>, pairs: &[(usize, usize)], g: Matrix<Q>) -> Result<HermitianStructure<Q>> {
    let n = l.dim();
    let j = ComplexStructure::from_pairs(n, &pairs.iter().map(|(a, b)| (a - 1, b - 1, q(1))).collect::<Vec<_>>())?;
    HermitianStructure::new(l, j, Metric::new(g)?)
}

fn one_form(n: usize, idx: &[usize]) -> KForm<Q> {
    let mut c = vec![z(); n];
    for i in idx {
        c[i - 1] = q(1);
    }
    KForm::one_form(&c)
}

fn example(name: &'static str, dim: usize, params: &'static [&'static str], constraints: &'static str, constraint: fn(&[Q]) -> bool, d: &'static str, uni: (&'static str, fn(&[Q]) -> bool), build: fn(LieAlgebra<Q>, &[Q]) -> Result<Structures>, check: fn(&[Q], &Structures, &mut Checks) -> Result<()>) -> CatalogEntry {
    CatalogEntry {
        name,
        family: Family::Example,
        dim,
        params,
        constraints,
        constraint,
        differentials: d,
        unimodular_claim: uni.0,
        unimodular: uni.1,
        to_locus: None,
        recipe: Recipe::Example { build, check },
        not_checked: &[],
    }
}

fn s2n_build(l: LieAlgebra<Q>, _: &[Q]) -> Result<Structures> {
    let n = l.dim() / 2;
    let mut pairs = vec![(1, 2 * n)];
    pairs.extend((1..n).map(|i| (2 * i, 2 * i + 1)));
    Ok(vec![("g", structure(l, &pairs, Matrix::identity(2 * n))?)])
}

fn s2n_check(_: &[Q], s: &Structures, c: &mut Checks) -> Result<()> {
    let h = &s[0].1;
    c.flag("skt", h.is_skt());
    c.flag("lcb", h.is_lcb()?);
    let d = extract_data(h, None)?;
    c.flag("v = 0", d.v.iter().all(Scalar::is_zero));
    c.flag("skt-data", d.is_skt_data());
    c.flag("lcb-data", d.is_lcb_data());
    Ok(())
}

fn examples() -> Vec<CatalogEntry> {
    vec![
        example(
            "b2",
            6,
            &[],
            "none",
            always,
            "f16, f36, 0, f56, 0, 0",
            ("never", never),
            |l, _| {
                let mut g = Matrix::identity(6);
                g[(0, 0)] = q(3);
                g[(5, 5)] = q(3);
                for (i, j) in [(0, 1), (0, 2), (3, 5), (4, 5)] {
                    g[(i, j)] = q(1);
                    g[(j, i)] = q(1);
                }
                let pairs = [(1, 6), (2, 4), (3, 5)];
                Ok(vec![("g", structure(l.clone(), &pairs, Matrix::identity(6))?), ("g'", structure(l, &pairs, g)?)])
            },
            |_, s, c| {
                let (g, gp) = (&s[0].1, &s[1].1);
                c.flag("g balanced", g.is_balanced());
                c.flag("g' lcb", gp.is_lcb()?);
                c.flag("g' not balanced", !gp.is_balanced());
                c.flag("g' not lck", !gp.is_lck()?);
                let theta = gp.lee_form()?;
                c.add("theta' = f5 + f6", theta == one_form(6, &[5, 6]), theta.render("f"));
                Ok(())
            },
        ),
        example(
            "aff2+2R",
            4,
            &[],
            "none",
            always,
            "f12, 0, 0, 0",
            ("never", never),
            |l, _| {
                let g = mat([[q(2), z(), q(1), z()], [z(), q(2), z(), q(1)], [q(1), z(), q(1), z()], [z(), q(1), z(), q(1)]]);
                let pairs = [(1, 2), (3, 4)];
                Ok(vec![("g", structure(l.clone(), &pairs, Matrix::identity(4))?), ("g'", structure(l, &pairs, g)?)])
            },
            |_, s, c| {
                let (g, gp) = (&s[0].1, &s[1].1);
                c.flag("g kahler", g.is_kahler());
                c.flag("g' lck", gp.is_lck()?);
                c.flag("g' not kahler", !gp.is_kahler());
                let theta = one_form(4, &[2, 4]);
                c.add("d omega' = (f2 + f4) ^ omega'", gp.d_omega() == &theta.wedge(gp.omega())?, gp.d_omega().render("f"));
                c.flag("d(f2 + f4) = 0", gp.d(&theta).is_zero());
                c.flag("lee form = f2 + f4", gp.lee_form()? == theta);
                c.flag("g' vaisman", gp.is_vaisman()?);
                Ok(())
            },
        ),
        example(
            "h3+R",
            4,
            &[],
            "none",
            always,
            "0, 0, 0, f12",
            ("always", always),
            |l, _| Ok(vec![("g", structure(l, &[(1, 2), (3, 4)], Matrix::identity(4))?)]),
            |_, s, c| {
                let h = &s[0].1;
                c.flag("lck", h.is_lck()?);
                c.flag("not kahler", !h.is_kahler());
                c.flag("vaisman", h.is_vaisman()?);
                Ok(())
            },
        ),
        example("s4", 4, &["a"], "a != 0", |p| nz(&p[0]), "a*f14, -1/2*a*f24 + f34, -f24 - 1/2*a*f34, 0", ("always", always), s2n_build, s2n_check),
        example(
            "s6",
            6,
            &["a", "c"],
            "ac != 0",
            |p| nz(&p[0]) && nz(&p[1]),
            "a*f16, -1/2*a*f26 + f36, -f26 - 1/2*a*f36, c*f56, -c*f46, 0",
            ("always", always),
            s2n_build,
            s2n_check,
        ),
        example(
            "s8",
            8,
            &["a", "c"],
            "ac != 0",
            |p| nz(&p[0]) && nz(&p[1]),
            "a*f18, -1/2*a*f28 + f38, -f28 - 1/2*a*f38, c*f58, -c*f48, c*f78, -c*f68, 0",
            ("always", always),
            s2n_build,
            s2n_check,
        ),
    ]
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn g1_instantiates_with_parameter() {
        let e = find("g1").unwrap();
        let l = e.instantiate(&[q(2)]).unwrap();
        let b = ideal_operator(&l).unwrap();
        assert_eq!(b, diag_q(&[1, 2, 2, 2, 2]));
        assert!(matches!(e.instantiate(&[z()]), Err(Error::ConstraintViolation(_))));
    }

    fn diag_q(x: &[i64]) -> Matrix<Q> {
        Matrix::diagonal(&x.iter().map(|v| q(*v)).collect::<Vec<_>>())
    }

    #[test]
    fn l6_is_parameter_free() {
        let l = find("l6").unwrap().instantiate(&[]).unwrap();
        assert_eq!(ideal_operator(&l).unwrap(), diag_q(&[1, 1, 0, 0, 0]));
    }

    #[test]
    fn samples_respect_constraints_and_cover_locus() {
        let e = find("l1").unwrap();
        let s = e.samples(3);
        assert!(s.iter().all(|p| e.satisfies(p)));
        assert!(s.iter().filter(|p| !e.is_unimodular_claimed(p)).count() >= 3);
        assert!(s.iter().any(|p| e.is_unimodular_claimed(p)));
    }

    #[test]
    fn shipped_manifest_is_current() {
        let rendered = crate::document::render_manifest(&manifest().unwrap());
        let path = concat!(env!("CARGO_MANIFEST_DIR"), "/data/catalog.alg");
        if std::env::var_os("AALG_BLESS").is_some() {
            std::fs::write(path, &rendered).unwrap();
        }
        assert_eq!(std::fs::read_to_string(path).unwrap(), rendered, "rerun with AALG_BLESS=1");
    }

    #[test]
    fn unknown_entry() {
        assert!(matches!(find("nope"), Err(Error::UnknownEntry(_))));
    }
}
