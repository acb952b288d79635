//! Text format for structure equations.
//!
//! ```text
//! algebra g1 dim 6
//! params p = 2
//! d = (f16, p*f26, p*f36, p*f46, p*f56, 0)
//! J: f1->f6, f2->f3, f4->f5
//! g: identity
//! ```
//!
//! A term is an optional sign, coefficient factors joined by `*`, and a basis
//! 2-form `fIJ`. When the dimension is 10 or more the comma form `fI,J` is
//! required. Decimal literals switch the whole document to the float kernel.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use crate::error::{Error, Result};
use crate::exterior::KForm;
use crate::hermitian::{ComplexStructure, HermitianStructure, Metric};
use crate::lie::{LieAlgebra, Subspace};
use crate::linalg::{unit_vector, Matrix};
use crate::scalar::{format_rational, rational_from_f64, Rational, Scalar, ScalarKind};

pub const MANIFEST_HEADER: &str = "# aalg-catalog/1";

#[derive(Clone, Debug, PartialEq)]
pub enum Literal {
    Exact(Rational),
    Float(f64),
}

impl Literal {
    fn render(&self) -> String {
        match self {
            Literal::Exact(r) => format_rational(r),
            Literal::Float(x) => format!("{x:?}"),
        }
    }

    fn value<S: Scalar>(&self) -> Result<S> {
        match self {
            Literal::Exact(r) => Ok(S::from_rational(r)),
            Literal::Float(x) => {
                if S::is_exact() {
                    return Err(Error::KindMismatch);
                }
                Ok(S::from_rational(&rational_from_f64(*x).ok_or(Error::KindMismatch)?))
            }
        }
    }

    fn is_float(&self) -> bool {
        matches!(self, Literal::Float(_))
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum Factor {
    Literal(Literal),
    Param(String),
}

/// `±factor*factor*…*fIJ`; the basis part is absent inside matrix cells.
#[derive(Clone, Debug, PartialEq)]
pub struct Term {
    pub negative: bool,
    pub factors: Vec<Factor>,
    /// 1-based, increasing.
    pub basis: Option<(usize, usize)>,
}

/// Sum of terms; empty means `0`.
#[derive(Clone, Debug, PartialEq, Default)]
pub struct Expr(pub Vec<Term>);

#[derive(Clone, Debug, PartialEq)]
pub enum JSpec {
    /// `fa->fb` or `fa->-fb`: `J f_a = ±f_b` and `J f_b = ∓f_a`.
    Pairs(Vec<(usize, usize, bool)>),
    Matrix(Vec<Vec<Expr>>),
}

#[derive(Clone, Debug, PartialEq)]
pub enum GSpec {
    Identity,
    Matrix(Vec<Vec<Expr>>),
}

#[derive(Clone, Debug, PartialEq)]
pub struct AlgebraDocument {
    pub name: String,
    pub dim: usize,
    pub params: Vec<(String, Literal)>,
    pub d: Vec<Expr>,
    pub j: Option<JSpec>,
    pub g: Option<GSpec>,
    /// 1-based basis indices spanning the declared ideal.
    pub ideal: Option<Vec<usize>>,
}

fn exprs_in<'a>(rows: &'a [Vec<Expr>]) -> impl Iterator<Item = &'a Expr> {
    rows.iter().flatten()
}

impl AlgebraDocument {
    pub fn kind(&self) -> ScalarKind {
        let mut exprs: Vec<&Expr> = self.d.iter().collect();
        if let Some(JSpec::Matrix(m)) = &self.j {
            exprs.extend(exprs_in(m));
        }
        if let Some(GSpec::Matrix(m)) = &self.g {
            exprs.extend(exprs_in(m));
        }
        let float_term = exprs.iter().flat_map(|e| &e.0).flat_map(|t| &t.factors).any(|f| matches!(f, Factor::Literal(l) if l.is_float()));
        if float_term || self.params.iter().any(|(_, l)| l.is_float()) {
            ScalarKind::Float
        } else {
            ScalarKind::Exact
        }
    }

    pub fn param(&self, name: &str) -> Option<&Literal> {
        self.params.iter().find(|(n, _)| n == name).map(|(_, l)| l)
    }

    fn bindings<S: Scalar>(&self) -> Result<BTreeMap<String, S>> {
        self.params.iter().map(|(n, l)| Ok((n.clone(), l.value::<S>()?))).collect()
    }

    fn eval_coef<S: Scalar>(t: &Term, env: &BTreeMap<String, S>) -> Result<S> {
        let mut c = S::one();
        for f in &t.factors {
            let x = match f {
                Factor::Literal(l) => l.value::<S>()?,
                Factor::Param(p) => env.get(p).cloned().ok_or_else(|| Error::UnboundParameter(p.clone()))?,
            };
            c = c * x;
        }
        Ok(if t.negative { -c } else { c })
    }

    fn eval_scalar<S: Scalar>(e: &Expr, env: &BTreeMap<String, S>) -> Result<S> {
        let mut s = S::zero();
        for t in &e.0 {
            s = s + Self::eval_coef(t, env)?;
        }
        Ok(s)
    }

    fn eval_matrix<S: Scalar>(rows: &[Vec<Expr>], dim: usize, env: &BTreeMap<String, S>) -> Result<Matrix<S>> {
        if rows.len() != dim || rows.iter().any(|r| r.len() != dim) {
            return Err(Error::DimensionMismatch { expected: dim, found: rows.iter().map(Vec::len).chain([rows.len()]).find(|&l| l != dim).unwrap_or(dim) });
        }
        let vals = rows.iter().map(|r| r.iter().map(|e| Self::eval_scalar(e, env)).collect::<Result<Vec<S>>>()).collect::<Result<Vec<_>>>()?;
        Matrix::from_rows(vals)
    }

    /// The differentials `d f^i` as 2-forms.
    pub fn differentials<S: Scalar>(&self) -> Result<Vec<KForm<S>>> {
        let env = self.bindings::<S>()?;
        self.d
            .iter()
            .map(|e| {
                let mut form = KForm::zero(self.dim, 2);
                for t in &e.0 {
                    let (i, j) = t.basis.ok_or_else(|| Error::Precondition("differential term without a basis 2-form".into()))?;
                    let mut b = KForm::basis(self.dim, &[i - 1, j - 1]);
                    b = b.scale(&Self::eval_coef(t, &env)?);
                    form = form.add(&b);
                }
                Ok(form)
            })
            .collect()
    }

    pub fn algebra<S: Scalar>(&self) -> Result<LieAlgebra<S>> {
        if self.d.len() != self.dim {
            return Err(Error::DimensionMismatch { expected: self.dim, found: self.d.len() });
        }
        LieAlgebra::from_differentials(&self.differentials::<S>()?)
    }

    pub fn complex_structure<S: Scalar>(&self) -> Result<Option<ComplexStructure<S>>> {
        let env = self.bindings::<S>()?;
        match &self.j {
            None => Ok(None),
            Some(JSpec::Pairs(p)) => {
                let pairs: Vec<_> = p.iter().map(|(a, b, neg)| (a - 1, b - 1, if *neg { -S::one() } else { S::one() })).collect();
                ComplexStructure::from_pairs(self.dim, &pairs).map(Some)
            }
            Some(JSpec::Matrix(m)) => ComplexStructure::new(Self::eval_matrix(m, self.dim, &env)?).map(Some),
        }
    }

    pub fn metric<S: Scalar>(&self) -> Result<Option<Metric<S>>> {
        let env = self.bindings::<S>()?;
        match &self.g {
            None => Ok(None),
            Some(GSpec::Identity) => Ok(Some(Metric::identity(self.dim))),
            Some(GSpec::Matrix(m)) => Metric::new(Self::eval_matrix(m, self.dim, &env)?).map(Some),
        }
    }

    /// Algebra with its `J` and `g`; a missing metric defaults to the identity.
    pub fn hermitian<S: Scalar>(&self) -> Result<HermitianStructure<S>> {
        let l = self.algebra::<S>()?;
        let j = self.complex_structure::<S>()?.ok_or_else(|| Error::Precondition(format!("document `{}` has no J", self.name)))?;
        let g = self.metric::<S>()?.unwrap_or_else(|| Metric::identity(self.dim));
        HermitianStructure::new(l, j, g)
    }

    pub fn ideal_subspace<S: Scalar>(&self) -> Option<Subspace<S>> {
        self.ideal.as_ref().map(|idx| Subspace::span(self.dim, &idx.iter().map(|i| unit_vector(self.dim, i - 1)).collect::<Vec<_>>()))
    }

    /// Same document with some parameters rebound.
    pub fn with_params(&self, values: &[(&str, Literal)]) -> Result<Self> {
        let mut out = self.clone();
        for (name, v) in values {
            match out.params.iter_mut().find(|(n, _)| n == name) {
                Some(slot) => slot.1 = v.clone(),
                None => return Err(Error::UnboundParameter((*name).to_string())),
            }
        }
        Ok(out)
    }

    pub fn render(&self) -> String {
        let mut s = String::new();
        let _ = writeln!(s, "algebra {} dim {}", self.name, self.dim);
        if !self.params.is_empty() {
            let ps: Vec<String> = self.params.iter().map(|(n, l)| format!("{n} = {}", l.render())).collect();
            let _ = writeln!(s, "params {}", ps.join(", "));
        }
        let ds: Vec<String> = self.d.iter().map(|e| render_expr(e, self.dim)).collect();
        let _ = writeln!(s, "d = ({})", ds.join(", "));
        match &self.j {
            None => {}
            Some(JSpec::Pairs(p)) => {
                let ps: Vec<String> = p.iter().map(|(a, b, neg)| format!("f{a}->{}f{b}", if *neg { "-" } else { "" })).collect();
                let _ = writeln!(s, "J: {}", ps.join(", "));
            }
            Some(JSpec::Matrix(m)) => {
                let _ = writeln!(s, "J: matrix {}", render_matrix(m, self.dim));
            }
        }
        match &self.g {
            None => {}
            Some(GSpec::Identity) => s.push_str("g: identity\n"),
            Some(GSpec::Matrix(m)) => {
                let _ = writeln!(s, "g: matrix {}", render_matrix(m, self.dim));
            }
        }
        if let Some(idx) = &self.ideal {
            let ps: Vec<String> = idx.iter().map(|i| format!("f{i}")).collect();
            let _ = writeln!(s, "ideal: {}", ps.join(", "));
        }
        s
    }
}

fn render_term(t: &Term, dim: usize) -> String {
    let mut parts: Vec<String> = t
        .factors
        .iter()
        .map(|f| match f {
            Factor::Literal(l) => l.render(),
            Factor::Param(p) => p.clone(),
        })
        .collect();
    if let Some((i, j)) = t.basis {
        parts.push(if dim >= 10 { format!("f{i},{j}") } else { format!("f{i}{j}") });
    }
    if parts.is_empty() {
        parts.push("1".into());
    }
    parts.join("*")
}

fn render_expr(e: &Expr, dim: usize) -> String {
    if e.0.is_empty() {
        return "0".into();
    }
    let mut s = String::new();
    for (k, t) in e.0.iter().enumerate() {
        match (k, t.negative) {
            (0, true) => s.push('-'),
            (0, false) => {}
            (_, true) => s.push_str(" - "),
            (_, false) => s.push_str(" + "),
        }
        s.push_str(&render_term(t, dim));
    }
    s
}

fn render_matrix(m: &[Vec<Expr>], dim: usize) -> String {
    let rows: Vec<String> = m.iter().map(|r| format!("[{}]", r.iter().map(|e| render_expr(e, dim)).collect::<Vec<_>>().join(", "))).collect();
    format!("[{}]", rows.join(", "))
}

struct Parser<'a> {
    src: &'a str,
    pos: usize,
    /// Offset of `src` inside the full text, for manifest positions.
    base: usize,
    full: &'a str,
}

impl<'a> Parser<'a> {
    fn locate(&self, pos: usize) -> (usize, usize, usize) {
        let offset = self.base + pos;
        let before = &self.full[..offset];
        let line = before.matches('\n').count() + 1;
        let column = before.rfind('\n').map_or(offset, |n| offset - n - 1) + 1;
        (offset, line, column)
    }

    fn syntax_at(&self, pos: usize, message: impl Into<String>) -> Error {
        let (offset, line, column) = self.locate(pos);
        Error::Syntax { offset, line, column, message: message.into() }
    }

    fn range_at(&self, pos: usize, message: impl Into<String>) -> Error {
        let (offset, line, column) = self.locate(pos);
        Error::IndexOutOfRange { offset, line, column, message: message.into() }
    }

    fn err(&self, message: impl Into<String>) -> Error {
        self.syntax_at(self.pos, message)
    }

    fn rest(&self) -> &'a str {
        &self.src[self.pos..]
    }

    fn peek(&self) -> Option<char> {
        self.rest().chars().next()
    }

    /// Skips spaces and tabs only.
    fn skip_inline(&mut self) {
        while let Some(c) = self.peek() {
            if c == ' ' || c == '\t' {
                self.pos += 1;
            } else {
                break;
            }
        }
    }

    /// Skips whitespace, newlines and `#` comments.
    fn skip_all(&mut self) {
        loop {
            match self.peek() {
                Some(c) if c.is_whitespace() => self.pos += c.len_utf8(),
                Some('#') => {
                    while let Some(c) = self.peek() {
                        if c == '\n' {
                            break;
                        }
                        self.pos += c.len_utf8();
                    }
                }
                _ => break,
            }
        }
    }

    fn eat(&mut self, s: &str) -> bool {
        if self.rest().starts_with(s) {
            self.pos += s.len();
            true
        } else {
            false
        }
    }

    fn expect(&mut self, s: &str) -> Result<()> {
        if self.eat(s) {
            Ok(())
        } else {
            Err(self.err(format!("expected `{s}`")))
        }
    }

    fn end_line(&mut self) -> Result<()> {
        self.skip_inline();
        if self.peek().is_none_or(|c| c == '\n' || c == '\r' || c == '#') {
            Ok(())
        } else {
            Err(self.err("unexpected text at end of line"))
        }
    }

    fn ident(&mut self) -> Result<String> {
        let start = self.pos;
        for (i, c) in self.rest().char_indices() {
            let ok = if i == 0 { c.is_alphabetic() || c == '_' } else { c.is_alphanumeric() || "_+-'".contains(c) };
            if !ok {
                break;
            }
            self.pos = start + i + c.len_utf8();
        }
        if self.pos == start {
            return Err(self.err("expected a name"));
        }
        Ok(self.src[start..self.pos].to_string())
    }

    fn param_name(&mut self) -> Result<String> {
        let start = self.pos;
        for (i, c) in self.rest().char_indices() {
            let ok = if i == 0 { c.is_alphabetic() || c == '_' } else { c.is_alphanumeric() || c == '_' };
            if !ok {
                break;
            }
            self.pos = start + i + c.len_utf8();
        }
        if self.pos == start {
            return Err(self.err("expected a parameter name"));
        }
        Ok(self.src[start..self.pos].to_string())
    }

    fn digits(&mut self) -> &'a str {
        let start = self.pos;
        while self.peek().is_some_and(|c| c.is_ascii_digit()) {
            self.pos += 1;
        }
        &self.src[start..self.pos]
    }

    fn uint(&mut self) -> Result<usize> {
        let at = self.pos;
        let d = self.digits();
        d.parse().map_err(|_| self.syntax_at(at, "expected an integer"))
    }

    /// Unsigned literal: `3`, `3/4`, `0.5`, `1e-3`.
    fn literal(&mut self) -> Result<Literal> {
        let start = self.pos;
        let int = self.digits();
        if int.is_empty() {
            return Err(self.err("expected a number"));
        }
        let mut is_float = false;
        if self.peek() == Some('.') {
            self.pos += 1;
            if self.digits().is_empty() {
                return Err(self.err("expected digits after `.`"));
            }
            is_float = true;
        }
        if matches!(self.peek(), Some('e') | Some('E')) {
            let save = self.pos;
            self.pos += 1;
            if matches!(self.peek(), Some('+') | Some('-')) {
                self.pos += 1;
            }
            if self.digits().is_empty() {
                self.pos = save;
            } else {
                is_float = true;
            }
        }
        if is_float {
            let text = &self.src[start..self.pos];
            return text.parse::<f64>().map(Literal::Float).map_err(|_| self.syntax_at(start, "bad decimal literal"));
        }
        let num: num_bigint::BigInt = int.parse().map_err(|_| self.syntax_at(start, "bad integer"))?;
        if self.peek() == Some('/') {
            self.pos += 1;
            let at = self.pos;
            let den = self.digits();
            let den: num_bigint::BigInt = den.parse().map_err(|_| self.syntax_at(at, "expected a denominator"))?;
            if den == num_bigint::BigInt::from(0) {
                return Err(self.syntax_at(at, "zero denominator"));
            }
            return Ok(Literal::Exact(Rational::new(num, den)));
        }
        Ok(Literal::Exact(Rational::from_integer(num)))
    }

    fn signed_literal(&mut self) -> Result<Literal> {
        let neg = self.eat("-");
        if !neg {
            self.eat("+");
        }
        let l = self.literal()?;
        Ok(match (neg, l) {
            (false, l) => l,
            (true, Literal::Exact(r)) => Literal::Exact(-r),
            (true, Literal::Float(x)) => Literal::Float(-x),
        })
    }

    /// `fI` index with bounds check; returns 1-based.
    fn basis_index(&mut self, dim: usize) -> Result<usize> {
        let at = self.pos;
        self.expect("f")?;
        let i = self.uint()?;
        if i == 0 || i > dim {
            return Err(self.range_at(at, format!("f{i} outside 1..={dim}")));
        }
        Ok(i)
    }

    /// `fIJ` or `fI,J`, positioned after the `f`.
    fn basis_pair(&mut self, at: usize, dim: usize) -> Result<(usize, usize)> {
        let first = self.digits();
        if first.is_empty() {
            return Err(self.syntax_at(at, "expected indices after `f`"));
        }
        let (i, j) = if self.peek() == Some(',') && self.src[self.pos + 1..].starts_with(|c: char| c.is_ascii_digit()) {
            self.pos += 1;
            let second = self.digits();
            (first.parse::<usize>().unwrap_or(usize::MAX), second.parse::<usize>().unwrap_or(usize::MAX))
        } else {
            if dim >= 10 {
                return Err(self.syntax_at(at, "dimension >= 10 requires the comma form `fI,J`"));
            }
            if first.len() != 2 {
                return Err(self.syntax_at(at, "expected two single-digit indices"));
            }
            let b = first.as_bytes();
            ((b[0] - b'0') as usize, (b[1] - b'0') as usize)
        };
        if i == 0 || j == 0 || i > dim || j > dim {
            return Err(self.range_at(at, format!("f{i},{j} outside 1..={dim}")));
        }
        if i >= j {
            return Err(self.syntax_at(at, "basis 2-form indices must increase"));
        }
        Ok((i, j))
    }

    /// `[sign] factor (* factor)*`, where a factor is a literal, a parameter, or
    /// (last, when allowed) a basis 2-form.
    fn term(&mut self, negative: bool, dim: usize, allow_basis: bool) -> Result<Term> {
        let mut factors = Vec::new();
        loop {
            self.skip_inline();
            let at = self.pos;
            match self.peek() {
                Some(c) if c.is_ascii_digit() => factors.push(Factor::Literal(self.literal()?)),
                Some('f') if self.src[self.pos + 1..].starts_with(|c: char| c.is_ascii_digit()) => {
                    if !allow_basis {
                        return Err(self.err("basis form not allowed here"));
                    }
                    self.pos += 1;
                    let basis = Some(self.basis_pair(at, dim)?);
                    return Ok(Term { negative, factors, basis });
                }
                Some(c) if c.is_alphabetic() => factors.push(Factor::Param(self.param_name()?)),
                _ => return Err(self.err("expected a number, parameter or basis form")),
            }
            self.skip_inline();
            if !self.eat("*") {
                break;
            }
        }
        if allow_basis {
            return Err(self.err("term lacks a basis 2-form `fIJ`"));
        }
        Ok(Term { negative, factors, basis: None })
    }

    fn expr(&mut self, dim: usize, allow_basis: bool) -> Result<Expr> {
        self.skip_inline();
        let save = self.pos;
        if self.eat("0") {
            self.skip_inline();
            if self.peek().is_none_or(|c| c == ',' || c == ')' || c == ']' || c == '\n') {
                return Ok(Expr::default());
            }
            self.pos = save;
        }
        let mut terms = Vec::new();
        let mut negative = self.eat("-");
        if !negative {
            self.eat("+");
        }
        loop {
            terms.push(self.term(negative, dim, allow_basis)?);
            self.skip_inline();
            if self.eat("+") {
                negative = false;
            } else if self.eat("-") {
                negative = true;
            } else {
                break;
            }
        }
        Ok(Expr(terms))
    }

    fn matrix(&mut self, dim: usize) -> Result<Vec<Vec<Expr>>> {
        self.skip_inline();
        self.expect("[")?;
        let mut rows = Vec::new();
        loop {
            self.skip_all();
            self.expect("[")?;
            let mut row = Vec::new();
            loop {
                self.skip_all();
                row.push(self.expr(dim, false)?);
                self.skip_all();
                if self.eat("]") {
                    break;
                }
                self.expect(",")?;
            }
            rows.push(row);
            self.skip_all();
            if self.eat("]") {
                break;
            }
            self.expect(",")?;
        }
        Ok(rows)
    }

    fn document(&mut self) -> Result<AlgebraDocument> {
        self.skip_all();
        self.expect("algebra")?;
        self.skip_inline();
        let name = self.ident()?;
        self.skip_inline();
        self.expect("dim")?;
        self.skip_inline();
        let dim_at = self.pos;
        let dim = self.uint()?;
        if dim == 0 {
            return Err(self.syntax_at(dim_at, "dimension must be positive"));
        }
        self.end_line()?;
        let mut doc = AlgebraDocument { name, dim, params: Vec::new(), d: Vec::new(), j: None, g: None, ideal: None };
        let mut seen_d = false;
        let mut used: Vec<(String, usize)> = Vec::new();
        loop {
            self.skip_all();
            if self.peek().is_none() {
                break;
            }
            let key_at = self.pos;
            if self.eat("params") {
                loop {
                    self.skip_inline();
                    let name = self.param_name()?;
                    self.skip_inline();
                    self.expect("=")?;
                    self.skip_inline();
                    let v = self.signed_literal()?;
                    if doc.param(&name).is_some() {
                        return Err(self.syntax_at(key_at, format!("parameter `{name}` bound twice")));
                    }
                    doc.params.push((name, v));
                    self.skip_inline();
                    if !self.eat(",") {
                        break;
                    }
                }
            } else if self.eat("d") {
                self.skip_inline();
                self.expect("=")?;
                self.skip_inline();
                let open = self.pos;
                self.expect("(")?;
                loop {
                    self.skip_all();
                    let e = self.expr(dim, true)?;
                    for t in &e.0 {
                        for f in &t.factors {
                            if let Factor::Param(p) = f {
                                used.push((p.clone(), self.pos));
                            }
                        }
                    }
                    doc.d.push(e);
                    self.skip_all();
                    if self.eat(")") {
                        break;
                    }
                    if self.peek().is_none() {
                        return Err(self.syntax_at(open, "unclosed tuple"));
                    }
                    self.expect(",")?;
                }
                if doc.d.len() != dim {
                    return Err(self.syntax_at(open, format!("expected {dim} differentials, found {}", doc.d.len())));
                }
                seen_d = true;
            } else if self.eat("J:") {
                self.skip_inline();
                if self.eat("matrix") {
                    doc.j = Some(JSpec::Matrix(self.matrix(dim)?));
                } else {
                    let mut pairs = Vec::new();
                    loop {
                        self.skip_inline();
                        let a = self.basis_index(dim)?;
                        self.skip_inline();
                        self.expect("->")?;
                        self.skip_inline();
                        let neg = self.eat("-");
                        let b = self.basis_index(dim)?;
                        pairs.push((a, b, neg));
                        self.skip_inline();
                        if !self.eat(",") {
                            break;
                        }
                    }
                    doc.j = Some(JSpec::Pairs(pairs));
                }
            } else if self.eat("g:") {
                self.skip_inline();
                if self.eat("identity") {
                    doc.g = Some(GSpec::Identity);
                } else if self.eat("matrix") {
                    doc.g = Some(GSpec::Matrix(self.matrix(dim)?));
                } else {
                    return Err(self.err("expected `identity` or `matrix`"));
                }
            } else if self.eat("ideal:") {
                let mut idx = Vec::new();
                loop {
                    self.skip_inline();
                    idx.push(self.basis_index(dim)?);
                    self.skip_inline();
                    if !self.eat(",") {
                        break;
                    }
                }
                doc.ideal = Some(idx);
            } else {
                return Err(self.err("expected `params`, `d`, `J:`, `g:` or `ideal:`"));
            }
            self.end_line()?;
        }
        if !seen_d {
            return Err(self.syntax_at(self.pos, "missing `d = (...)`"));
        }
        let mut matrices: Vec<&Vec<Vec<Expr>>> = Vec::new();
        if let Some(JSpec::Matrix(m)) = &doc.j {
            matrices.push(m);
        }
        if let Some(GSpec::Matrix(m)) = &doc.g {
            matrices.push(m);
        }
        for m in matrices {
            for t in exprs_in(m).flat_map(|e| &e.0) {
                for f in &t.factors {
                    if let Factor::Param(p) = f {
                        used.push((p.clone(), self.pos));
                    }
                }
            }
        }
        for (p, _) in used {
            if doc.param(&p).is_none() {
                return Err(Error::UnboundParameter(p));
            }
        }
        Ok(doc)
    }
}

/// A bare square matrix `[[..], ..]` of literals, as accepted by `J:` and `g:`.
#[derive(Clone, Debug, PartialEq)]
pub struct LiteralMatrix(pub Vec<Vec<Expr>>);

impl LiteralMatrix {
    pub fn kind(&self) -> ScalarKind {
        let float = exprs_in(&self.0).flat_map(|e| &e.0).flat_map(|t| &t.factors).any(|f| matches!(f, Factor::Literal(l) if l.is_float()));
        if float {
            ScalarKind::Float
        } else {
            ScalarKind::Exact
        }
    }

    pub fn to_matrix<S: Scalar>(&self) -> Result<Matrix<S>> {
        AlgebraDocument::eval_matrix(&self.0, self.0.len(), &BTreeMap::new())
    }
}

pub fn parse_matrix(text: &str) -> Result<LiteralMatrix> {
    let mut p = Parser { src: text, pos: 0, base: 0, full: text };
    let rows = p.matrix(0)?;
    p.skip_all();
    if p.pos < text.len() {
        return Err(p.err("trailing input after matrix"));
    }
    Ok(LiteralMatrix(rows))
}

pub fn parse(text: &str) -> Result<AlgebraDocument> {
    Parser { src: text, pos: 0, base: 0, full: text }.document()
}

/// Splits a manifest into documents at blank lines; the first line must be the header.
pub fn parse_manifest(text: &str) -> Result<Vec<AlgebraDocument>> {
    let first = text.lines().next().unwrap_or("");
    if first != MANIFEST_HEADER {
        return Err(Error::Syntax { offset: 0, line: 1, column: 1, message: format!("manifest must start with `{MANIFEST_HEADER}`") });
    }
    let mut docs = Vec::new();
    let mut offset = first.len() + 1;
    let body = text.get(offset..).unwrap_or("");
    for chunk in body.split("\n\n") {
        if !chunk.trim().is_empty() {
            docs.push(Parser { src: chunk, pos: 0, base: offset, full: text }.document()?);
        }
        offset += chunk.len() + 2;
    }
    Ok(docs)
}

pub fn render_manifest(docs: &[AlgebraDocument]) -> String {
    let mut s = String::from(MANIFEST_HEADER);
    s.push('\n');
    for d in docs {
        s.push('\n');
        s.push_str(&d.render());
    }
    s
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_heisenberg_plus_line() {
        let doc = parse("algebra h3R dim 4\nd = (0,0,0,f12)").unwrap();
        let l = doc.algebra::<Rational>().unwrap();
        // d f^4 = f^12 means [f1, f2] = -f4
        assert_eq!(l.bracket(&unit_vector(4, 0), &unit_vector(4, 1)), vec![Rational::from_i64(0), Rational::from_i64(0), Rational::from_i64(0), Rational::from_i64(-1)]);
    }

    #[test]
    fn unclosed_tuple_is_positioned() {
        match parse("algebra x dim 2\nd = (f12") {
            Err(Error::Syntax { line, .. }) => assert_eq!(line, 2),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn comma_form_required_in_high_dimension() {
        let d: Vec<&str> = (0..10).map(|_| "0").collect();
        let mut text = format!("algebra x dim 10\nd = (f12, {})", d[1..].join(", "));
        assert!(matches!(parse(&text), Err(Error::Syntax { .. })));
        text = format!("algebra x dim 10\nd = (f1,10, {})", d[1..].join(", "));
        let doc = parse(&text).unwrap();
        assert_eq!(doc.d[0].0[0].basis, Some((1, 10)));
    }

    #[test]
    fn index_out_of_range_and_unbound() {
        assert!(matches!(parse("algebra x dim 2\nd = (f13, 0)"), Err(Error::IndexOutOfRange { .. })));
        assert!(matches!(parse("algebra x dim 2\nd = (p*f12, 0)"), Err(Error::UnboundParameter(_))));
    }

    #[test]
    fn decimal_forces_float() {
        let doc = parse("algebra x dim 2\nparams p = 0.5\nd = (p*f12, 0)").unwrap();
        assert_eq!(doc.kind(), ScalarKind::Float);
        assert!(matches!(doc.algebra::<Rational>(), Err(Error::KindMismatch)));
        assert!(doc.algebra::<f64>().is_ok());
    }

    #[test]
    fn bare_matrix() {
        let m = parse_matrix("[[1, -1/2], [0, 2]]\n").unwrap();
        assert_eq!(m.kind(), ScalarKind::Exact);
        assert_eq!(m.to_matrix::<Rational>().unwrap()[(0, 1)], Rational::from_ratio(-1, 2));
        assert_eq!(parse_matrix("[[0.5]]").unwrap().kind(), ScalarKind::Float);
        assert!(matches!(parse_matrix("[[1, p], [0, 1]]").unwrap().to_matrix::<Rational>(), Err(Error::UnboundParameter(_))));
        assert!(matches!(parse_matrix("[[1, 2]]").unwrap().to_matrix::<Rational>(), Err(Error::DimensionMismatch { .. })));
    }

    #[test]
    fn render_is_canonical() {
        let text = "algebra g1 dim 6\nparams p = -1/4\nd = (f16, p*f26, p*f36, p*f46, p*f56, 0)\nJ: f1->f6, f2->-f3, f4->f5\ng: matrix [[2, 0, 0, 0, 0, 0], [0, 1, 0, 0, 0, 0], [0, 0, 1, 0, 0, 0], [0, 0, 0, 1, 0, 0], [0, 0, 0, 0, 1, 0], [0, 0, 0, 0, 0, 2]]\nideal: f1, f2, f3, f4, f5\n";
        let doc = parse(text).unwrap();
        assert_eq!(doc.render(), text);
        let h = doc.hermitian::<Rational>().unwrap();
        assert_eq!(h.dim(), 6);
    }
}
