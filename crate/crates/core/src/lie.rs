//! Lie algebras given by structure constants.

use crate::error::{Error, Result};
use crate::exterior::{self, KForm};
use crate::linalg::{span_rank, vec_scale, vec_sub, Matrix, Vector};
use crate::scalar::Scalar;

/// Raw tensor `c[i][j][k]`, the `e_k` coefficient of `[e_i, e_j]`. No invariants.
#[derive(Clone, PartialEq, Debug)]
pub struct StructureConstants<S> {
    dim: usize,
    data: Vec<S>,
}

impl<S: Scalar> StructureConstants<S> {
    pub fn zeros(dim: usize) -> Self {
        Self { dim, data: vec![S::zero(); dim * dim * dim] }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn get(&self, i: usize, j: usize, k: usize) -> S {
        self.data[(i * self.dim + j) * self.dim + k].clone()
    }

    pub fn set(&mut self, i: usize, j: usize, k: usize, value: S) {
        self.data[(i * self.dim + j) * self.dim + k] = value;
    }

    /// Sets `[e_i, e_j] = Σ_k v_k e_k` and the antisymmetric partner.
    pub fn set_bracket(&mut self, i: usize, j: usize, v: &[S]) {
        for (k, x) in v.iter().enumerate() {
            self.set(i, j, k, x.clone());
            self.set(j, i, k, -x.clone());
        }
    }

    /// Constants from the differentials of the dual basis, `de^k = -Σ_{i<j} c^k_{ij} e^{ij}`.
    pub fn from_differentials(d: &[KForm<S>]) -> Result<Self> {
        let n = d.len();
        let mut c = Self::zeros(n);
        for (k, form) in d.iter().enumerate() {
            if form.dim() != n {
                return Err(Error::DimensionMismatch { expected: n, found: form.dim() });
            }
            if form.degree() != 2 {
                return Err(Error::Precondition(format!("d e^{} must be a 2-form", k + 1)));
            }
            for (idx, x) in form.terms() {
                c.set(idx[0], idx[1], k, -x.clone());
                c.set(idx[1], idx[0], k, x.clone());
            }
        }
        Ok(c)
    }

    pub fn bracket(&self, x: &[S], y: &[S]) -> Vector<S> {
        let n = self.dim;
        let mut out = vec![S::zero(); n];
        for i in 0..n {
            if x[i] == S::zero() {
                continue;
            }
            for j in 0..n {
                if y[j] == S::zero() {
                    continue;
                }
                let xy = x[i].clone() * y[j].clone();
                for (k, o) in out.iter_mut().enumerate() {
                    let c = self.get(i, j, k);
                    if c != S::zero() {
                        *o = o.clone() + xy.clone() * c;
                    }
                }
            }
        }
        out
    }

    pub fn basis_bracket(&self, i: usize, j: usize) -> Vector<S> {
        (0..self.dim).map(|k| self.get(i, j, k)).collect()
    }

    pub fn map<T: Scalar>(&self, f: impl Fn(&S) -> T) -> StructureConstants<T> {
        StructureConstants { dim: self.dim, data: self.data.iter().map(f).collect() }
    }

    /// First antisymmetry failure.
    pub fn antisymmetry_violation(&self) -> Option<(usize, usize, usize)> {
        let n = self.dim;
        for i in 0..n {
            for j in i..n {
                for k in 0..n {
                    if !(self.get(i, j, k) + self.get(j, i, k)).is_zero() {
                        return Some((i, j, k));
                    }
                }
            }
        }
        None
    }

    /// First Jacobi failure `(i, j, k, l)` with `i < j < k`.
    pub fn jacobi_violation(&self) -> Option<(usize, usize, usize, usize)> {
        let n = self.dim;
        for i in 0..n {
            for j in i + 1..n {
                for k in j + 1..n {
                    for l in 0..n {
                        let mut s = S::zero();
                        for m in 0..n {
                            s = s + self.get(i, j, m) * self.get(m, k, l)
                                + self.get(j, k, m) * self.get(m, i, l)
                                + self.get(k, i, m) * self.get(m, j, l);
                        }
                        if !s.is_zero() {
                            return Some((i, j, k, l));
                        }
                    }
                }
            }
        }
        None
    }
}

/// Validated Lie algebra.
#[derive(Clone)]
pub struct LieAlgebra<S> {
    constants: StructureConstants<S>,
    de: Vec<KForm<S>>,
}

impl<S: Scalar> std::fmt::Debug for LieAlgebra<S> {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let eqs: Vec<String> = self.de.iter().map(|d| d.render("f")).collect();
        write!(f, "LieAlgebra({})", eqs.join(", "))
    }
}

impl<S: Scalar> PartialEq for LieAlgebra<S> {
    fn eq(&self, other: &Self) -> bool {
        self.constants == other.constants
    }
}

/// Linear subspace given by independent spanning vectors.
#[derive(Clone, Debug, PartialEq)]
pub struct Subspace<S> {
    ambient: usize,
    basis: Vec<Vector<S>>,
}

impl<S: Scalar> Subspace<S> {
    /// Keeps a maximal independent subset of `vectors`, in order.
    pub fn span(ambient: usize, vectors: &[Vector<S>]) -> Self {
        let mut basis: Vec<Vector<S>> = Vec::new();
        for v in vectors {
            assert_eq!(v.len(), ambient);
            let mut trial = basis.clone();
            trial.push(v.clone());
            if span_rank(&trial) > basis.len() {
                basis = trial;
            }
        }
        Self { ambient, basis }
    }

    pub fn ambient(&self) -> usize {
        self.ambient
    }

    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    pub fn basis(&self) -> &[Vector<S>] {
        &self.basis
    }

    pub fn contains(&self, v: &[S]) -> bool {
        let mut trial = self.basis.clone();
        trial.push(v.to_vec());
        span_rank(&trial) == self.basis.len()
    }

    pub fn contains_subspace(&self, other: &Subspace<S>) -> bool {
        other.basis.iter().all(|v| self.contains(v))
    }
}

/// Result of searching for a codimension-one abelian ideal.
#[derive(Clone, Debug)]
pub struct IdealSearch<S> {
    /// The ideal `ker ξ`.
    pub ideal: Subspace<S>,
    /// Defining covector, normalized so that `ξ(e_transversal) = 1`.
    pub covector: Vector<S>,
    pub transversal: usize,
    /// More than one such ideal exists; the first one found is returned.
    pub ambiguous: bool,
}

impl<S: Scalar> LieAlgebra<S> {
    pub fn validate(constants: StructureConstants<S>) -> Result<Self> {
        if let Some((i, j, k)) = constants.antisymmetry_violation() {
            return Err(Error::AntisymmetryViolation { i, j, k });
        }
        if let Some((i, j, k, l)) = constants.jacobi_violation() {
            return Err(Error::JacobiViolation { i, j, k, l });
        }
        let de = exterior::basis_differentials(&constants);
        Ok(Self { constants, de })
    }

    /// From structure equations `(de^1, …, de^n)`.
    pub fn from_differentials(d: &[KForm<S>]) -> Result<Self> {
        Self::validate(StructureConstants::from_differentials(d)?)
    }

    pub fn abelian(dim: usize) -> Self {
        Self::validate(StructureConstants::zeros(dim)).expect("abelian algebra is valid")
    }

    pub fn dim(&self) -> usize {
        self.constants.dim
    }

    pub fn constants(&self) -> &StructureConstants<S> {
        &self.constants
    }

    pub fn basis_differentials(&self) -> &[KForm<S>] {
        &self.de
    }

    pub fn bracket(&self, x: &[S], y: &[S]) -> Vector<S> {
        self.constants.bracket(x, y)
    }

    pub fn ad(&self, x: &[S]) -> Result<Matrix<S>> {
        let n = self.dim();
        if x.len() != n {
            return Err(Error::DimensionMismatch { expected: n, found: x.len() });
        }
        Ok(Matrix::from_fn(n, n, |k, j| {
            (0..n).fold(S::zero(), |acc, i| if x[i] == S::zero() { acc } else { acc + x[i].clone() * self.constants.get(i, j, k) })
        }))
    }

    pub fn ad_basis(&self, i: usize) -> Matrix<S> {
        let n = self.dim();
        Matrix::from_fn(n, n, |k, j| self.constants.get(i, j, k))
    }

    pub fn is_unimodular(&self) -> bool {
        (0..self.dim()).all(|i| self.ad_basis(i).trace().is_zero())
    }

    /// `[g, g]`.
    pub fn derived_algebra(&self) -> Subspace<S> {
        let n = self.dim();
        let mut vs = Vec::new();
        for i in 0..n {
            for j in i + 1..n {
                vs.push(self.constants.basis_bracket(i, j));
            }
        }
        Subspace::span(n, &vs)
    }

    pub fn is_abelian(&self) -> bool {
        self.constants.data.iter().all(|c| c.is_zero())
    }

    /// Center of the algebra.
    pub fn center(&self) -> Subspace<S> {
        let n = self.dim();
        // x central iff [e_i, x] = 0 for all i
        let rows: Vec<Vec<S>> = (0..n).flat_map(|i| self.ad_basis(i).to_rows()).collect();
        let m = Matrix::from_rows(rows).expect("rectangular");
        Subspace::span(n, &m.kernel())
    }

    /// Whether the lower central series reaches zero.
    pub fn is_nilpotent(&self) -> bool {
        let n = self.dim();
        let mut current = Subspace::span(n, &(0..n).map(|i| crate::linalg::unit_vector(n, i)).collect::<Vec<_>>());
        for _ in 0..=n {
            if current.dim() == 0 {
                return true;
            }
            let mut vs = Vec::new();
            for i in 0..n {
                let ei = crate::linalg::unit_vector(n, i);
                for x in current.basis() {
                    vs.push(self.bracket(&ei, x));
                }
            }
            let next = Subspace::span(n, &vs);
            if next.dim() == current.dim() {
                return false;
            }
            current = next;
        }
        current.dim() == 0
    }

    /// The same algebra in the basis given by the columns of `p`.
    pub fn change_basis(&self, p: &Matrix<S>) -> Result<Self> {
        let n = self.dim();
        if p.rows() != n || p.cols() != n {
            return Err(Error::DimensionMismatch { expected: n, found: p.rows() });
        }
        let pinv = p.inverse().ok_or_else(|| Error::Singular("basis change".into()))?;
        let cols: Vec<Vector<S>> = (0..n).map(|a| p.column(a)).collect();
        let mut c = StructureConstants::zeros(n);
        for a in 0..n {
            for b in a + 1..n {
                let br = pinv.mul_vec(&self.bracket(&cols[a], &cols[b]));
                c.set_bracket(a, b, &br);
            }
        }
        Self::validate(c)
    }

    pub fn map<T: Scalar>(&self, f: impl Fn(&S) -> T) -> Result<LieAlgebra<T>> {
        LieAlgebra::validate(self.constants.map(f))
    }

    /// Checks that a user-declared subspace is an abelian ideal of codimension one.
    pub fn check_codim1_abelian_ideal(&self, n: &Subspace<S>) -> Result<()> {
        if n.ambient() != self.dim() || n.dim() + 1 != self.dim() {
            return Err(Error::IdealNotAbelian(format!("declared ideal has dimension {}, expected {}", n.dim(), self.dim().saturating_sub(1))));
        }
        for (i, x) in n.basis().iter().enumerate() {
            for y in &n.basis()[i + 1..] {
                if !self.bracket(x, y).iter().all(|c| c.is_zero()) {
                    return Err(Error::IdealNotAbelian("declared subspace is not abelian".into()));
                }
            }
        }
        if !n.contains_subspace(&self.derived_algebra()) {
            return Err(Error::IdealNotAbelian("declared subspace is not an ideal".into()));
        }
        Ok(())
    }

    /// Searches for a hyperplane `ker ξ` that is an abelian ideal.
    ///
    /// For a fixed transversal index `t` with `ξ_t = 1`, the hyperplane is spanned by
    /// `u_j = e_j - ξ_j e_t`, and `[u_j, u_k] = c_{jk} - ξ_k c_{jt} - ξ_j c_{tk}` is
    /// affine in `ξ`; so is `ξ([e_a, e_b]) = 0`. Each `t` is one linear system.
    pub fn find_codim1_abelian_ideal(&self) -> Option<IdealSearch<S>> {
        let n = self.dim();
        if n == 0 {
            return None;
        }
        let mut found: Option<IdealSearch<S>> = None;
        for t in (0..n).rev() {
            let Some((xi, free)) = self.solve_ideal_system(t) else { continue };
            match &mut found {
                None => {
                    let basis: Vec<Vector<S>> = (0..n)
                        .filter(|&j| j != t)
                        .map(|j| {
                            let mut u = crate::linalg::unit_vector(n, j);
                            u[t] = -xi[j].clone();
                            u
                        })
                        .collect();
                    found = Some(IdealSearch { ideal: Subspace::span(n, &basis), covector: xi, transversal: t, ambiguous: free > 0 });
                }
                Some(f) => {
                    let scaled = vec_scale(&f.covector, &xi[f.transversal]);
                    if free > 0 || !vec_sub(&scaled, &xi).iter().all(|c| c.is_zero()) {
                        f.ambiguous = true;
                    }
                }
            }
        }
        found
    }

    /// Matrix of `ad_{e_t}` on the ideal, in the basis `u_j = e_j - ξ_j e_t`, `j ≠ t`.
    pub fn transversal_operator(&self, s: &IdealSearch<S>) -> Matrix<S> {
        let n = self.dim();
        let t = s.transversal;
        let idx: Vec<usize> = (0..n).filter(|&j| j != t).collect();
        Matrix::from_fn(n - 1, n - 1, |r, c| self.constants.get(t, idx[c], idx[r]))
    }

    /// Particular solution `ξ` (with `ξ_t = 1`) and the dimension of the solution space.
    fn solve_ideal_system(&self, t: usize) -> Option<(Vector<S>, usize)> {
        let n = self.dim();
        let c = &self.constants;
        let unknowns: Vec<usize> = (0..n).filter(|&j| j != t).collect();
        let col = |j: usize| unknowns.iter().position(|&u| u == j).unwrap();
        let mut rows: Vec<Vec<S>> = Vec::new();
        let mut rhs: Vec<S> = Vec::new();
        for (a, &j) in unknowns.iter().enumerate() {
            for &k in &unknowns[a + 1..] {
                for m in 0..n {
                    // c_jk^m - ξ_k c_jt^m - ξ_j c_tk^m = 0
                    let mut row = vec![S::zero(); n - 1];
                    row[col(k)] = row[col(k)].clone() - c.get(j, t, m);
                    row[col(j)] = row[col(j)].clone() - c.get(t, k, m);
                    rows.push(row);
                    rhs.push(-c.get(j, k, m));
                }
            }
        }
        for a in 0..n {
            for b in a + 1..n {
                // ξ_t c_ab^t + Σ_{m≠t} ξ_m c_ab^m = 0
                let row: Vec<S> = unknowns.iter().map(|&m| c.get(a, b, m)).collect();
                rows.push(row);
                rhs.push(-c.get(a, b, t));
            }
        }
        let mut xi = vec![S::zero(); n];
        xi[t] = S::one();
        if unknowns.is_empty() || rows.is_empty() {
            return Some((xi, unknowns.len()));
        }
        let m = Matrix::from_rows(rows).expect("rectangular");
        let sol = m.solve(&rhs)?;
        let free = n - 1 - m.rank();
        for (a, &j) in unknowns.iter().enumerate() {
            xi[j] = sol[a].clone();
        }
        Some((xi, free))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::Rational;

    type Q = Rational;

    fn q(n: i64) -> Q {
        Q::from_i64(n)
    }

    fn diff(dim: usize, spec: &[&[(i64, usize, usize)]]) -> Vec<KForm<Q>> {
        spec.iter()
            .map(|terms| {
                let mut f = KForm::zero(dim, 2);
                for &(c, i, j) in *terms {
                    f.add_term(&[i - 1, j - 1], q(c));
                }
                f
            })
            .collect()
    }

    #[test]
    fn tuple_sign_convention() {
        // (f12, 0, 0, 0): df^1 = f^12 means [f_1, f_2] = -f_1
        let l = LieAlgebra::from_differentials(&diff(4, &[&[(1, 1, 2)], &[], &[], &[]])).unwrap();
        assert_eq!(l.constants().basis_bracket(0, 1), vec![q(-1), q(0), q(0), q(0)]);
    }

    #[test]
    fn antisymmetry_violation_detected() {
        let mut c = StructureConstants::<Q>::zeros(3);
        c.set(0, 1, 2, q(1));
        c.set(1, 0, 2, q(1));
        assert_eq!(LieAlgebra::validate(c).unwrap_err(), Error::AntisymmetryViolation { i: 0, j: 1, k: 2 });
    }

    #[test]
    fn jacobi_violation_detected() {
        let mut c = StructureConstants::<Q>::zeros(3);
        c.set_bracket(0, 1, &[q(1), q(0), q(0)]);
        c.set_bracket(0, 2, &[q(0), q(0), q(1)]);
        assert!(matches!(LieAlgebra::validate(c), Err(Error::JacobiViolation { .. })));
    }

    #[test]
    fn simple_algebra_has_no_abelian_hyperplane() {
        let mut c = StructureConstants::<Q>::zeros(3);
        c.set_bracket(0, 1, &[q(0), q(0), q(1)]);
        c.set_bracket(1, 2, &[q(1), q(0), q(0)]);
        c.set_bracket(2, 0, &[q(0), q(1), q(0)]);
        let l = LieAlgebra::validate(c).unwrap();
        assert!(l.find_codim1_abelian_ideal().is_none());
    }

    #[test]
    fn abelian_ideal_is_flagged_ambiguous() {
        let s = LieAlgebra::<Q>::abelian(4).find_codim1_abelian_ideal().unwrap();
        assert!(s.ambiguous);
        assert_eq!(s.transversal, 3);
        assert_eq!(s.ideal.basis().len(), 3);
        assert!(s.ideal.basis().iter().all(|v| v[3] == q(0)));
    }

    #[test]
    fn ideal_found_off_last_coordinate() {
        // [e_1, e_2] = e_1 with transversal e_2 but written with e_1 last
        let mut c = StructureConstants::<Q>::zeros(2);
        c.set_bracket(1, 0, &[q(0), q(1)]);
        let l = LieAlgebra::validate(c).unwrap();
        let s = l.find_codim1_abelian_ideal().unwrap();
        assert!(s.ideal.contains(&[q(0), q(1)]));
        assert!(!s.ambiguous);
    }

    #[test]
    fn nilpotency() {
        let h3r = LieAlgebra::from_differentials(&diff(4, &[&[], &[], &[], &[(1, 1, 2)]])).unwrap();
        assert!(h3r.is_nilpotent());
        let aff = LieAlgebra::from_differentials(&diff(4, &[&[(1, 1, 2)], &[], &[], &[]])).unwrap();
        assert!(!aff.is_nilpotent());
    }
}
