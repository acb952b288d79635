//! Alternating forms on a fixed basis, the wedge product and the
//! Chevalley–Eilenberg differential.

use std::collections::BTreeMap;
use std::fmt;

use crate::error::{Error, Result};
use crate::lie::{LieAlgebra, StructureConstants};
use crate::linalg::{Matrix, Vector};
use crate::scalar::{format_scalar, Scalar};

/// Alternating `k`-form stored sparsely by strictly increasing index tuples (0-based).
#[derive(Clone, PartialEq)]
pub struct KForm<S> {
    dim: usize,
    degree: usize,
    terms: BTreeMap<Vec<usize>, S>,
}

/// Sign of the permutation sorting `idx`, or `None` if an index repeats.
fn sort_sign(idx: &[usize]) -> Option<(Vec<usize>, bool)> {
    let mut v = idx.to_vec();
    let mut odd = false;
    for i in 1..v.len() {
        let mut j = i;
        while j > 0 && v[j - 1] > v[j] {
            v.swap(j - 1, j);
            odd = !odd;
            j -= 1;
        }
    }
    if v.windows(2).any(|w| w[0] == w[1]) {
        None
    } else {
        Some((v, odd))
    }
}

impl<S: Scalar> KForm<S> {
    pub fn zero(dim: usize, degree: usize) -> Self {
        Self { dim, degree, terms: BTreeMap::new() }
    }

    pub fn scalar(dim: usize, c: S) -> Self {
        let mut f = Self::zero(dim, 0);
        f.add_term(&[], c);
        f
    }

    /// `e^{i_1} ∧ … ∧ e^{i_k}` for indices in any order.
    pub fn basis(dim: usize, idx: &[usize]) -> Self {
        let mut f = Self::zero(dim, idx.len());
        f.add_term(idx, S::one());
        f
    }

    /// The 1-form `Σ c_i e^i`.
    pub fn one_form(coeffs: &[S]) -> Self {
        let mut f = Self::zero(coeffs.len(), 1);
        for (i, c) in coeffs.iter().enumerate() {
            f.add_term(&[i], c.clone());
        }
        f
    }

    /// The 2-form with `α(e_i, e_j) = m[i][j]` for a skew matrix `m`.
    pub fn from_skew_matrix(m: &Matrix<S>) -> Self {
        let n = m.rows();
        let mut f = Self::zero(n, 2);
        for i in 0..n {
            for j in i + 1..n {
                f.add_term(&[i, j], m[(i, j)].clone());
            }
        }
        f
    }

    /// Adds `c · e^{idx}`; indices may be unsorted, repeated indices contribute nothing.
    pub fn add_term(&mut self, idx: &[usize], c: S) {
        assert_eq!(idx.len(), self.degree, "term degree");
        assert!(idx.iter().all(|&i| i < self.dim), "index out of range");
        if c == S::zero() {
            return;
        }
        let Some((key, odd)) = sort_sign(idx) else { return };
        let c = if odd { -c } else { c };
        let entry = self.terms.entry(key.clone()).or_insert_with(S::zero);
        *entry = entry.clone() + c;
        if *entry == S::zero() {
            self.terms.remove(&key);
        }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Vec<usize>, &S)> {
        self.terms.iter()
    }

    pub fn coeff(&self, idx: &[usize]) -> S {
        match sort_sign(idx) {
            None => S::zero(),
            Some((key, odd)) => {
                let c = self.terms.get(&key).cloned().unwrap_or_else(S::zero);
                if odd {
                    -c
                } else {
                    c
                }
            }
        }
    }

    /// Coefficients of a 1-form as a vector.
    pub fn as_covector(&self) -> Vector<S> {
        assert_eq!(self.degree, 1);
        (0..self.dim).map(|i| self.coeff(&[i])).collect()
    }

    /// Skew matrix `(α(e_i, e_j))` of a 2-form.
    pub fn to_skew_matrix(&self) -> Matrix<S> {
        assert_eq!(self.degree, 2);
        Matrix::from_fn(self.dim, self.dim, |i, j| self.coeff(&[i, j]))
    }

    /// Exact zero, or every coefficient within tolerance on the float kernel.
    pub fn is_zero(&self) -> bool {
        self.terms.values().all(|c| c.is_zero())
    }

    pub fn approx_eq(&self, other: &Self) -> bool {
        self.dim == other.dim && self.degree == other.degree && self.sub(other).is_zero()
    }

    pub fn max_abs(&self) -> f64 {
        self.terms.values().map(|c| c.to_f64().abs()).fold(0.0, f64::max)
    }

    fn check_same(&self, other: &Self) {
        assert_eq!(self.dim, other.dim, "form dimensions differ");
        assert_eq!(self.degree, other.degree, "form degrees differ");
    }

    pub fn add(&self, other: &Self) -> Self {
        self.check_same(other);
        let mut out = self.clone();
        for (k, c) in &other.terms {
            out.add_term(k, c.clone());
        }
        out
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.neg())
    }

    pub fn neg(&self) -> Self {
        self.scale(&-S::one())
    }

    pub fn scale(&self, s: &S) -> Self {
        let mut out = Self::zero(self.dim, self.degree);
        for (k, c) in &self.terms {
            out.add_term(k, c.clone() * s.clone());
        }
        out
    }

    pub fn wedge(&self, other: &Self) -> Result<Self> {
        if self.dim != other.dim {
            return Err(Error::DimensionMismatch { expected: self.dim, found: other.dim });
        }
        let degree = self.degree + other.degree;
        let mut out = Self::zero(self.dim, degree);
        if degree > self.dim {
            return Ok(out);
        }
        for (i, a) in &self.terms {
            for (j, b) in &other.terms {
                let mut idx = i.clone();
                idx.extend_from_slice(j);
                out.add_term(&idx, a.clone() * b.clone());
            }
        }
        Ok(out)
    }

    /// `α^k` (with `α^0 = 1`).
    pub fn power(&self, k: usize) -> Self {
        let mut out = Self::scalar(self.dim, S::one());
        for _ in 0..k {
            out = out.wedge(self).expect("same dimension");
        }
        out
    }

    /// `α(v_1, …, v_k)` with the determinant convention `e^{12}(e_1, e_2) = 1`.
    pub fn eval(&self, vectors: &[Vector<S>]) -> S {
        assert_eq!(vectors.len(), self.degree);
        let mut total = S::zero();
        for (idx, c) in &self.terms {
            let m = Matrix::from_fn(self.degree, self.degree, |r, s| vectors[s][idx[r]].clone());
            total = total + c.clone() * m.determinant();
        }
        total
    }

    /// Pullback `(M^*α)(X_1, …) = α(M X_1, …)`.
    pub fn pullback(&self, m: &Matrix<S>) -> Self {
        assert_eq!(m.rows(), self.dim);
        let dim = m.cols();
        let pulled: Vec<KForm<S>> = (0..self.dim).map(|i| KForm::one_form(&m.row(i))).collect();
        let mut out = Self::zero(dim, self.degree);
        for (idx, c) in &self.terms {
            let mut t = KForm::scalar(dim, c.clone());
            for &i in idx {
                t = t.wedge(&pulled[i]).expect("same dimension");
            }
            out = out.add(&t);
        }
        out
    }

    /// Interior product `ι_X α`.
    pub fn interior(&self, x: &[S]) -> Self {
        assert!(self.degree > 0);
        let mut out = Self::zero(self.dim, self.degree - 1);
        for (idx, c) in &self.terms {
            for (pos, &i) in idx.iter().enumerate() {
                let mut rest = idx.clone();
                rest.remove(pos);
                let s = if pos % 2 == 0 { c.clone() } else { -c.clone() };
                out.add_term(&rest, s * x[i].clone());
            }
        }
        out
    }

    /// Renders with the given letter, 1-based indices, comma-separated when `dim >= 10`.
    pub fn render(&self, letter: &str) -> String {
        if self.is_zero() {
            return "0".into();
        }
        let mut s = String::new();
        for (n, (idx, c)) in self.terms.iter().filter(|(_, c)| !c.is_zero()).enumerate() {
            let neg = c.to_f64() < 0.0;
            let mag = if neg { -c.clone() } else { c.clone() };
            if n == 0 {
                if neg {
                    s.push('-');
                }
            } else {
                s.push_str(if neg { " - " } else { " + " });
            }
            if idx.is_empty() {
                s.push_str(&format_scalar(&mag));
                continue;
            }
            if mag != S::one() {
                s.push_str(&format_scalar(&mag));
                s.push('*');
            }
            s.push_str(letter);
            s.push_str(&index_label(idx, self.dim));
        }
        s
    }
}

/// `12` or `1,12` style label for a 0-based index tuple.
pub fn index_label(idx: &[usize], dim: usize) -> String {
    let parts: Vec<String> = idx.iter().map(|i| (i + 1).to_string()).collect();
    if dim >= 10 {
        parts.join(",")
    } else {
        parts.concat()
    }
}

impl<S: Scalar> fmt::Display for KForm<S> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.render("e"))
    }
}

impl<S: Scalar> fmt::Debug for KForm<S> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "KForm<{}>({})", self.degree, self.render("e"))
    }
}

/// `de^k = -Σ_{i<j} c^k_{ij} e^{ij}` for every basis 1-form.
pub fn basis_differentials<S: Scalar>(c: &StructureConstants<S>) -> Vec<KForm<S>> {
    let n = c.dim();
    (0..n)
        .map(|k| {
            let mut f = KForm::zero(n, 2);
            for i in 0..n {
                for j in i + 1..n {
                    f.add_term(&[i, j], -c.get(i, j, k));
                }
            }
            f
        })
        .collect()
}

/// Chevalley–Eilenberg differential for arbitrary (possibly non-Jacobi) constants.
pub fn ce_differential_raw<S: Scalar>(alpha: &KForm<S>, c: &StructureConstants<S>) -> Result<KForm<S>> {
    if alpha.dim != c.dim() {
        return Err(Error::DimensionMismatch { expected: c.dim(), found: alpha.dim });
    }
    Ok(differential_with(alpha, &basis_differentials(c)))
}

pub(crate) fn differential_with<S: Scalar>(alpha: &KForm<S>, de: &[KForm<S>]) -> KForm<S> {
    let n = alpha.dim;
    let mut out = KForm::zero(n, alpha.degree + 1);
    if alpha.degree >= n {
        return out;
    }
    for (idx, c) in &alpha.terms {
        for (pos, &i) in idx.iter().enumerate() {
            // e^{i_1} ∧ … ∧ de^{i_pos} ∧ … with sign (-1)^pos
            let sign = if pos % 2 == 0 { c.clone() } else { -c.clone() };
            for (pair, dc) in &de[i].terms {
                let mut full = idx[..pos].to_vec();
                full.extend_from_slice(pair);
                full.extend_from_slice(&idx[pos + 1..]);
                out.add_term(&full, sign.clone() * dc.clone());
            }
        }
    }
    out
}

pub fn ce_differential<S: Scalar>(alpha: &KForm<S>, l: &LieAlgebra<S>) -> Result<KForm<S>> {
    if alpha.dim != l.dim() {
        return Err(Error::DimensionMismatch { expected: l.dim(), found: alpha.dim });
    }
    Ok(differential_with(alpha, l.basis_differentials()))
}

/// `X^♭ = g(X, ·)`.
pub fn flat<S: Scalar>(x: &[S], g: &Matrix<S>) -> Result<KForm<S>> {
    if g.rows() != x.len() {
        return Err(Error::DimensionMismatch { expected: g.rows(), found: x.len() });
    }
    if !g.is_positive_definite() {
        return Err(Error::DegenerateMetric);
    }
    Ok(KForm::one_form(&g.mul_vec(x)))
}

/// Inverse of [`flat`].
pub fn sharp<S: Scalar>(alpha: &KForm<S>, g: &Matrix<S>) -> Result<Vector<S>> {
    if alpha.degree != 1 {
        return Err(Error::Precondition("sharp expects a 1-form".into()));
    }
    if g.rows() != alpha.dim {
        return Err(Error::DimensionMismatch { expected: g.rows(), found: alpha.dim });
    }
    if !g.is_positive_definite() {
        return Err(Error::DegenerateMetric);
    }
    let ginv = g.inverse().ok_or(Error::DegenerateMetric)?;
    Ok(ginv.mul_vec(&alpha.as_covector()))
}
