//! Dense matrices over a [`Scalar`] with the elimination routines the rest of
//! the crate needs: rank, kernels, linear solves, inverses, determinants and
//! characteristic / minimal polynomials.

use std::fmt;
use std::ops::{Index, IndexMut};

use crate::error::{Error, Result};
use crate::poly::Poly;
use crate::scalar::{format_scalar, Scalar};

pub type Vector<S> = Vec<S>;

#[derive(Clone, PartialEq)]
pub struct Matrix<S> {
    rows: usize,
    cols: usize,
    data: Vec<S>,
}

impl<S: Scalar> Matrix<S> {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self { rows, cols, data: vec![S::zero(); rows * cols] }
    }

    pub fn identity(n: usize) -> Self {
        Self::from_fn(n, n, |i, j| if i == j { S::one() } else { S::zero() })
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> S) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                data.push(f(i, j));
            }
        }
        Self { rows, cols, data }
    }

    /// Builds a matrix from row vectors; all rows must share a length.
    pub fn from_rows(rows: Vec<Vec<S>>) -> Result<Self> {
        let r = rows.len();
        let c = rows.first().map_or(0, Vec::len);
        if rows.iter().any(|row| row.len() != c) {
            return Err(Error::DimensionMismatch { expected: c, found: rows.iter().map(Vec::len).find(|&l| l != c).unwrap_or(c) });
        }
        Ok(Self { rows: r, cols: c, data: rows.into_iter().flatten().collect() })
    }

    /// Builds a matrix whose columns are the given vectors.
    pub fn from_columns(cols: &[Vector<S>]) -> Result<Self> {
        let c = cols.len();
        let r = cols.first().map_or(0, Vec::len);
        if cols.iter().any(|col| col.len() != r) {
            return Err(Error::DimensionMismatch { expected: r, found: cols.iter().map(Vec::len).find(|&l| l != r).unwrap_or(r) });
        }
        Ok(Self::from_fn(r, c, |i, j| cols[j][i].clone()))
    }

    pub fn diagonal(entries: &[S]) -> Self {
        let n = entries.len();
        Self::from_fn(n, n, |i, j| if i == j { entries[i].clone() } else { S::zero() })
    }

    /// Block-diagonal matrix with the given square blocks.
    pub fn block_diagonal(blocks: &[Matrix<S>]) -> Self {
        let n: usize = blocks.iter().map(|b| b.rows).sum();
        let mut out = Self::zeros(n, n);
        let mut off = 0;
        for b in blocks {
            for i in 0..b.rows {
                for j in 0..b.cols {
                    out[(off + i, off + j)] = b[(i, j)].clone();
                }
            }
            off += b.rows;
        }
        out
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn row(&self, i: usize) -> Vector<S> {
        self.data[i * self.cols..(i + 1) * self.cols].to_vec()
    }

    pub fn column(&self, j: usize) -> Vector<S> {
        (0..self.rows).map(|i| self[(i, j)].clone()).collect()
    }

    pub fn to_rows(&self) -> Vec<Vec<S>> {
        (0..self.rows).map(|i| self.row(i)).collect()
    }

    pub fn map<T: Scalar>(&self, f: impl Fn(&S) -> T) -> Matrix<T> {
        Matrix { rows: self.rows, cols: self.cols, data: self.data.iter().map(f).collect() }
    }

    pub fn transpose(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |i, j| self[(j, i)].clone())
    }

    pub fn mul(&self, other: &Self) -> Self {
        assert_eq!(self.cols, other.rows, "matrix product shape mismatch");
        let mut out = Self::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = &self[(i, k)];
                if a.is_zero() && S::is_exact() {
                    continue;
                }
                for j in 0..other.cols {
                    let b = &other[(k, j)];
                    if S::is_exact() && b.is_zero() {
                        continue;
                    }
                    let v = out[(i, j)].clone() + a.clone() * b.clone();
                    out[(i, j)] = v;
                }
            }
        }
        out
    }

    pub fn mul_vec(&self, v: &[S]) -> Vector<S> {
        assert_eq!(self.cols, v.len(), "matrix-vector shape mismatch");
        (0..self.rows)
            .map(|i| {
                let mut acc = S::zero();
                for j in 0..self.cols {
                    acc = acc + self[(i, j)].clone() * v[j].clone();
                }
                acc
            })
            .collect()
    }

    pub fn add(&self, other: &Self) -> Self {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        Self { rows: self.rows, cols: self.cols, data: self.data.iter().zip(&other.data).map(|(a, b)| a.clone() + b.clone()).collect() }
    }

    pub fn sub(&self, other: &Self) -> Self {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        Self { rows: self.rows, cols: self.cols, data: self.data.iter().zip(&other.data).map(|(a, b)| a.clone() - b.clone()).collect() }
    }

    pub fn scale(&self, s: &S) -> Self {
        self.map(|x| x.clone() * s.clone())
    }

    pub fn neg(&self) -> Self {
        self.map(|x| -x.clone())
    }

    /// `self - s * Id`.
    pub fn shift(&self, s: &S) -> Self {
        let mut out = self.clone();
        for i in 0..self.rows.min(self.cols) {
            out[(i, i)] = out[(i, i)].clone() - s.clone();
        }
        out
    }

    pub fn commutator(&self, other: &Self) -> Self {
        self.mul(other).sub(&other.mul(self))
    }

    pub fn trace(&self) -> S {
        (0..self.rows.min(self.cols)).fold(S::zero(), |acc, i| acc + self[(i, i)].clone())
    }

    pub fn pow(&self, k: usize) -> Self {
        let mut out = Self::identity(self.rows);
        for _ in 0..k {
            out = out.mul(self);
        }
        out
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(Scalar::is_zero)
    }

    pub fn approx_eq(&self, other: &Self) -> bool {
        self.rows == other.rows && self.cols == other.cols && self.sub(other).is_zero()
    }

    pub fn is_symmetric(&self) -> bool {
        self.is_square() && self.approx_eq(&self.transpose())
    }

    pub fn is_skew(&self) -> bool {
        self.is_square() && self.add(&self.transpose()).is_zero()
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().map(|x| x.to_f64().abs()).fold(0.0, f64::max)
    }

    pub fn submatrix(&self, rows: &[usize], cols: &[usize]) -> Self {
        Self::from_fn(rows.len(), cols.len(), |i, j| self[(rows[i], cols[j])].clone())
    }

    /// Reduced row echelon form and the pivot columns.
    pub fn rref(&self) -> (Self, Vec<usize>) {
        let mut m = self.clone();
        let mut pivots = Vec::new();
        let mut r = 0;
        for c in 0..m.cols {
            if r == m.rows {
                break;
            }
            let mut best = None;
            let mut best_w = 0.0;
            for i in r..m.rows {
                if m[(i, c)].is_zero() {
                    continue;
                }
                let w = m[(i, c)].pivot_weight();
                if best.is_none() || w > best_w {
                    best = Some(i);
                    best_w = w;
                    if S::is_exact() {
                        break;
                    }
                }
            }
            let Some(p) = best else {
                for i in r..m.rows {
                    m[(i, c)] = S::zero();
                }
                continue;
            };
            m.swap_rows(r, p);
            let inv = S::one() / m[(r, c)].clone();
            for j in c..m.cols {
                m[(r, j)] = m[(r, j)].clone() * inv.clone();
            }
            for i in 0..m.rows {
                if i == r {
                    continue;
                }
                let f = m[(i, c)].clone();
                if f == S::zero() {
                    continue;
                }
                for j in c..m.cols {
                    let v = m[(i, j)].clone() - f.clone() * m[(r, j)].clone();
                    m[(i, j)] = v;
                }
                m[(i, c)] = S::zero();
            }
            pivots.push(c);
            r += 1;
        }
        (m, pivots)
    }

    fn swap_rows(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        for j in 0..self.cols {
            self.data.swap(a * self.cols + j, b * self.cols + j);
        }
    }

    pub fn rank(&self) -> usize {
        self.rref().1.len()
    }

    /// Basis of the null space, one vector per free column.
    pub fn kernel(&self) -> Vec<Vector<S>> {
        let (r, pivots) = self.rref();
        let free: Vec<usize> = (0..self.cols).filter(|c| !pivots.contains(c)).collect();
        free.iter()
            .map(|&f| {
                let mut v = vec![S::zero(); self.cols];
                v[f] = S::one();
                for (row, &p) in pivots.iter().enumerate() {
                    v[p] = -r[(row, f)].clone();
                }
                v
            })
            .collect()
    }

    /// Particular solution of `self * x = b` (free variables set to zero),
    /// or `None` when the system is inconsistent.
    pub fn solve(&self, b: &[S]) -> Option<Vector<S>> {
        assert_eq!(b.len(), self.rows);
        let aug = Self::from_fn(self.rows, self.cols + 1, |i, j| if j < self.cols { self[(i, j)].clone() } else { b[i].clone() });
        let (r, pivots) = aug.rref();
        if pivots.last() == Some(&self.cols) {
            return None;
        }
        let mut x = vec![S::zero(); self.cols];
        for (row, &p) in pivots.iter().enumerate() {
            x[p] = r[(row, self.cols)].clone();
        }
        Some(x)
    }

    pub fn inverse(&self) -> Option<Self> {
        if !self.is_square() {
            return None;
        }
        let n = self.rows;
        let aug = Self::from_fn(n, 2 * n, |i, j| {
            if j < n {
                self[(i, j)].clone()
            } else if j - n == i {
                S::one()
            } else {
                S::zero()
            }
        });
        let (r, pivots) = aug.rref();
        if pivots.len() < n || pivots[n - 1] != n - 1 {
            return None;
        }
        Some(Self::from_fn(n, n, |i, j| r[(i, n + j)].clone()))
    }

    pub fn determinant(&self) -> S {
        assert!(self.is_square());
        let mut m = self.clone();
        let n = self.rows;
        let mut det = S::one();
        for c in 0..n {
            let mut best = None;
            let mut best_w = 0.0;
            for i in c..n {
                if m[(i, c)] == S::zero() {
                    continue;
                }
                let w = m[(i, c)].pivot_weight();
                if best.is_none() || w > best_w {
                    best = Some(i);
                    best_w = w;
                }
            }
            let Some(p) = best else { return S::zero() };
            if p != c {
                m.swap_rows(p, c);
                det = -det;
            }
            let piv = m[(c, c)].clone();
            det = det * piv.clone();
            for i in c + 1..n {
                let f = m[(i, c)].clone() / piv.clone();
                if f == S::zero() {
                    continue;
                }
                for j in c..n {
                    let v = m[(i, j)].clone() - f.clone() * m[(c, j)].clone();
                    m[(i, j)] = v;
                }
            }
        }
        det
    }

    /// Positive definiteness via leading principal minors.
    pub fn is_positive_definite(&self) -> bool {
        if !self.is_symmetric() {
            return false;
        }
        (1..=self.rows).all(|k| {
            let idx: Vec<usize> = (0..k).collect();
            self.submatrix(&idx, &idx).determinant().is_positive()
        })
    }

    /// Characteristic polynomial `det(x Id - self)` by Faddeev–LeVerrier.
    pub fn char_poly(&self) -> Poly<S> {
        assert!(self.is_square());
        let n = self.rows;
        let mut coeffs = vec![S::zero(); n + 1];
        coeffs[n] = S::one();
        let mut m = Self::zeros(n, n);
        for k in 1..=n {
            // M_k = A M_{k-1} + c_{n-k+1} I, c_{n-k} = -tr(A M_k)/k
            m = self.mul(&m);
            for i in 0..n {
                m[(i, i)] = m[(i, i)].clone() + coeffs[n - k + 1].clone();
            }
            let c = -(self.mul(&m).trace()) / S::from_i64(k as i64);
            coeffs[n - k] = c;
        }
        Poly::new(coeffs)
    }

    /// Minimal polynomial from the first linear dependency among the powers.
    pub fn min_poly(&self) -> Poly<S> {
        assert!(self.is_square());
        let n = self.rows;
        let mut powers: Vec<Vector<S>> = Vec::new();
        let mut p = Self::identity(n);
        for d in 0..=n {
            let cand = p.data.clone();
            if d > 0 {
                let sys = Matrix::from_columns(&powers).expect("uniform powers");
                if let Some(x) = sys.solve(&cand) {
                    if sys.mul_vec(&x).iter().zip(&cand).all(|(a, b)| a.approx_eq(b)) {
                        let mut coeffs: Vec<S> = x.into_iter().map(|c| -c).collect();
                        coeffs.push(S::one());
                        return Poly::new(coeffs);
                    }
                }
            }
            powers.push(cand);
            p = p.mul(self);
        }
        self.char_poly()
    }

    /// Evaluates a polynomial at this matrix (Horner).
    pub fn eval_poly(&self, p: &Poly<S>) -> Self {
        let n = self.rows;
        let mut out = Self::zeros(n, n);
        for c in p.coeffs().iter().rev() {
            out = out.mul(self);
            for i in 0..n {
                out[(i, i)] = out[(i, i)].clone() + c.clone();
            }
        }
        out
    }
}

impl<S> Index<(usize, usize)> for Matrix<S> {
    type Output = S;
    fn index(&self, (i, j): (usize, usize)) -> &S {
        &self.data[i * self.cols + j]
    }
}

impl<S> IndexMut<(usize, usize)> for Matrix<S> {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut S {
        &mut self.data[i * self.cols + j]
    }
}

impl<S: Scalar> fmt::Debug for Matrix<S> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

impl<S: Scalar> fmt::Display for Matrix<S> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[")?;
        for i in 0..self.rows {
            if i > 0 {
                write!(f, ", ")?;
            }
            write!(f, "[")?;
            for j in 0..self.cols {
                if j > 0 {
                    write!(f, ", ")?;
                }
                write!(f, "{}", format_scalar(&self[(i, j)]))?;
            }
            write!(f, "]")?;
        }
        write!(f, "]")
    }
}

pub fn dot<S: Scalar>(a: &[S], b: &[S]) -> S {
    a.iter().zip(b).fold(S::zero(), |acc, (x, y)| acc + x.clone() * y.clone())
}

pub fn vec_add<S: Scalar>(a: &[S], b: &[S]) -> Vector<S> {
    a.iter().zip(b).map(|(x, y)| x.clone() + y.clone()).collect()
}

pub fn vec_sub<S: Scalar>(a: &[S], b: &[S]) -> Vector<S> {
    a.iter().zip(b).map(|(x, y)| x.clone() - y.clone()).collect()
}

pub fn vec_scale<S: Scalar>(a: &[S], s: &S) -> Vector<S> {
    a.iter().map(|x| x.clone() * s.clone()).collect()
}

pub fn vec_is_zero<S: Scalar>(a: &[S]) -> bool {
    a.iter().all(Scalar::is_zero)
}

pub fn unit_vector<S: Scalar>(n: usize, i: usize) -> Vector<S> {
    (0..n).map(|k| if k == i { S::one() } else { S::zero() }).collect()
}

/// `g(x, y)` for a bilinear form with Gram matrix `g`.
pub fn bilinear<S: Scalar>(g: &Matrix<S>, x: &[S], y: &[S]) -> S {
    dot(x, &g.mul_vec(y))
}

/// Rank of a list of vectors.
pub fn span_rank<S: Scalar>(vectors: &[Vector<S>]) -> usize {
    if vectors.is_empty() {
        return 0;
    }
    Matrix::from_columns(vectors).map(|m| m.rank()).unwrap_or(0)
}

/// An invertible `P` with `P·a = b·P`, searched among fixed integer combinations
/// of a basis of all intertwiners. `Some` is a certificate of similarity; `None`
/// after every combination is singular is strong but not conclusive evidence
/// against it.
pub fn similarity_transform<S: Scalar>(a: &Matrix<S>, b: &Matrix<S>) -> Option<Matrix<S>> {
    let n = a.rows();
    if !a.is_square() || b.rows() != n || !b.is_square() {
        return None;
    }
    if n == 0 {
        return Some(Matrix::zeros(0, 0));
    }
    let mut rows = Vec::with_capacity(n * n);
    for i in 0..n {
        for k in 0..n {
            let mut row = vec![S::zero(); n * n];
            for j in 0..n {
                row[i * n + j] = row[i * n + j].clone() + a[(j, k)].clone();
                row[j * n + k] = row[j * n + k].clone() - b[(i, j)].clone();
            }
            rows.push(row);
        }
    }
    let kernel = Matrix::from_rows(rows).ok()?.kernel();
    for seed in 1..=12i64 {
        let mut p = vec![S::zero(); n * n];
        for (m, v) in kernel.iter().enumerate() {
            let c = S::from_i64((seed * (m as i64 + 3) * (m as i64 + 7)) % 31 + 1);
            p = vec_add(&p, &vec_scale(v, &c));
        }
        let pm = Matrix::from_fn(n, n, |i, j| p[i * n + j].clone());
        if !pm.determinant().is_zero() {
            return Some(pm);
        }
    }
    None
}
