//! Left-invariant Hermitian structures: fundamental and Lee forms, the
//! direct predicates, Levi-Civita and Bismut connections.
//!
//! Matrices act on column vectors of basis coefficients: `J e_i = Σ_k J[k][i] e_k`.

use std::sync::OnceLock;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::exterior::{ce_differential, KForm};
use crate::lie::{LieAlgebra, StructureConstants};
use crate::linalg::{Matrix, Vector};
use crate::scalar::Scalar;

#[derive(Clone, Debug, PartialEq)]
pub struct ComplexStructure<S: Scalar> {
    j: Matrix<S>,
}

impl<S: Scalar> ComplexStructure<S> {
    pub fn new(j: Matrix<S>) -> Result<Self> {
        if !j.is_square() || j.rows() % 2 != 0 {
            return Err(Error::BadDimension(format!("J must be an even square matrix, got {}x{}", j.rows(), j.cols())));
        }
        if !j.mul(&j).add(&Matrix::identity(j.rows())).is_zero() {
            return Err(Error::NotComplexStructure);
        }
        Ok(Self { j })
    }

    /// `J f_a = s f_b`, `J f_b = -s f_a` for each `(a, b, s)`; 0-based indices.
    pub fn from_pairs(dim: usize, pairs: &[(usize, usize, S)]) -> Result<Self> {
        let mut j = Matrix::zeros(dim, dim);
        for (a, b, s) in pairs {
            if *a >= dim || *b >= dim {
                return Err(Error::DimensionMismatch { expected: dim, found: (*a).max(*b) + 1 });
            }
            j[(*b, *a)] = s.clone();
            j[(*a, *b)] = -s.clone();
        }
        Self::new(j)
    }

    pub fn matrix(&self) -> &Matrix<S> {
        &self.j
    }

    pub fn dim(&self) -> usize {
        self.j.rows()
    }

    pub fn apply(&self, x: &[S]) -> Vector<S> {
        self.j.mul_vec(x)
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Metric<S: Scalar> {
    g: Matrix<S>,
    inverse: Matrix<S>,
}

impl<S: Scalar> Metric<S> {
    pub fn new(g: Matrix<S>) -> Result<Self> {
        if !g.is_square() {
            return Err(Error::DegenerateMetric);
        }
        if !g.is_positive_definite() {
            return Err(Error::DegenerateMetric);
        }
        let inverse = g.inverse().ok_or(Error::DegenerateMetric)?;
        Ok(Self { g, inverse })
    }

    pub fn identity(dim: usize) -> Self {
        Self { g: Matrix::identity(dim), inverse: Matrix::identity(dim) }
    }

    pub fn matrix(&self) -> &Matrix<S> {
        &self.g
    }

    pub fn inverse(&self) -> &Matrix<S> {
        &self.inverse
    }

    pub fn dim(&self) -> usize {
        self.g.rows()
    }

    pub fn inner(&self, x: &[S], y: &[S]) -> S {
        crate::linalg::bilinear(&self.g, x, y)
    }
}

/// `N(e_i, e_j) = Σ_k n[i][j][k] e_k` with `N(X,Y) = [JX,JY] - J[JX,Y] - J[X,JY] - [X,Y]`.
pub fn nijenhuis<S: Scalar>(j: &ComplexStructure<S>, l: &LieAlgebra<S>) -> Result<StructureConstants<S>> {
    let n = l.dim();
    if j.dim() != n {
        return Err(Error::DimensionMismatch { expected: n, found: j.dim() });
    }
    let mut out = StructureConstants::zeros(n);
    let cols: Vec<Vector<S>> = (0..n).map(|i| j.matrix().column(i)).collect();
    for a in 0..n {
        for b in a + 1..n {
            let ea = crate::linalg::unit_vector::<S>(n, a);
            let eb = crate::linalg::unit_vector::<S>(n, b);
            let t1 = l.bracket(&cols[a], &cols[b]);
            let t2 = j.apply(&l.bracket(&cols[a], &eb));
            let t3 = j.apply(&l.bracket(&ea, &cols[b]));
            let t4 = l.constants().basis_bracket(a, b);
            let v: Vector<S> = (0..n).map(|k| t1[k].clone() - t2[k].clone() - t3[k].clone() - t4[k].clone()).collect();
            out.set_bracket(a, b, &v);
        }
    }
    Ok(out)
}

pub fn is_integrable<S: Scalar>(j: &ComplexStructure<S>, l: &LieAlgebra<S>) -> Result<bool> {
    let nt = nijenhuis(j, l)?;
    let n = l.dim();
    Ok((0..n).all(|a| (0..n).all(|b| (0..n).all(|k| nt.get(a, b, k).is_zero()))))
}

/// Christoffel table: `∇_{e_i} e_j = Σ_k gamma[i][(k, j)] e_k`.
#[derive(Clone, Debug, PartialEq)]
pub struct Connection<S: Scalar> {
    gamma: Vec<Matrix<S>>,
}

impl<S: Scalar> Connection<S> {
    pub fn new(gamma: Vec<Matrix<S>>) -> Self {
        Self { gamma }
    }

    pub fn dim(&self) -> usize {
        self.gamma.len()
    }

    /// `Γ^k_{ij}`.
    pub fn christoffel(&self, i: usize, j: usize, k: usize) -> S {
        self.gamma[i][(k, j)].clone()
    }

    /// The endomorphism `∇_{e_i}`.
    pub fn along(&self, i: usize) -> &Matrix<S> {
        &self.gamma[i]
    }

    /// `∇_X` as a matrix.
    pub fn along_vector(&self, x: &[S]) -> Matrix<S> {
        let n = self.dim();
        let mut m = Matrix::zeros(n, n);
        for (i, xi) in x.iter().enumerate() {
            if *xi != S::zero() {
                m = m.add(&self.gamma[i].scale(xi));
            }
        }
        m
    }

    /// `R(e_a, e_b) = [∇_a, ∇_b] - ∇_{[e_a, e_b]}`.
    pub fn curvature(&self, l: &LieAlgebra<S>, a: usize, b: usize) -> Matrix<S> {
        let br = l.constants().basis_bracket(a, b);
        self.gamma[a].commutator(&self.gamma[b]).sub(&self.along_vector(&br))
    }

    pub fn is_flat(&self, l: &LieAlgebra<S>) -> bool {
        let n = self.dim();
        (0..n).all(|a| (a + 1..n).all(|b| self.curvature(l, a, b).is_zero()))
    }

    /// `T(e_a, e_b) = ∇_a e_b - ∇_b e_a - [e_a, e_b]`.
    pub fn torsion(&self, l: &LieAlgebra<S>, a: usize, b: usize) -> Vector<S> {
        let br = l.constants().basis_bracket(a, b);
        (0..self.dim()).map(|k| self.christoffel(a, b, k) - self.christoffel(b, a, k) - br[k].clone()).collect()
    }

    pub fn is_torsion_free(&self, l: &LieAlgebra<S>) -> bool {
        let n = self.dim();
        (0..n).all(|a| (a + 1..n).all(|b| self.torsion(l, a, b).iter().all(|c| c.is_zero())))
    }

    /// `g(T(X,Y),Z)` is alternating in all three arguments.
    pub fn has_skew_torsion(&self, l: &LieAlgebra<S>, g: &Metric<S>) -> bool {
        let n = self.dim();
        let t: Vec<Vec<Vector<S>>> = (0..n).map(|a| (0..n).map(|b| g.matrix().mul_vec(&self.torsion(l, a, b))).collect()).collect();
        (0..n).all(|a| (0..n).all(|b| (0..n).all(|c| (t[a][b][c].clone() + t[a][c][b].clone()).is_zero())))
    }

    pub fn preserves_metric(&self, g: &Metric<S>) -> bool {
        self.gamma.iter().all(|m| m.transpose().mul(g.matrix()).add(&g.matrix().mul(m)).is_zero())
    }

    pub fn preserves(&self, j: &Matrix<S>) -> bool {
        self.gamma.iter().all(|m| m.commutator(j).is_zero())
    }

    /// `(∇_{e_i} α)(e_j) = -Σ_k Γ^k_{ij} α_k` for a left-invariant 1-form.
    pub fn covariant_derivative_of_one_form(&self, alpha: &[S]) -> Matrix<S> {
        let n = self.dim();
        Matrix::from_fn(n, n, |i, j| -(0..n).fold(S::zero(), |acc, k| acc + self.christoffel(i, j, k) * alpha[k].clone()))
    }
}

/// Levi-Civita connection from the Koszul formula
/// `2g(∇_X Y, Z) = g([X,Y],Z) - g([Y,Z],X) + g([Z,X],Y)`.
pub fn levi_civita<S: Scalar>(l: &LieAlgebra<S>, g: &Metric<S>) -> Result<Connection<S>> {
    let n = l.dim();
    if g.dim() != n {
        return Err(Error::DimensionMismatch { expected: n, found: g.dim() });
    }
    let c = l.constants();
    let gm = g.matrix();
    // gb[i][j][l] = g([e_i, e_j], e_l)
    let gb: Vec<Vec<Vector<S>>> = (0..n).map(|i| (0..n).map(|j| gm.mul_vec(&c.basis_bracket(i, j))).collect()).collect();
    let half = S::from_ratio(1, 2);
    let gamma = (0..n)
        .map(|i| {
            let k = Matrix::from_fn(n, n, |lz, j| {
                (gb[i][j][lz].clone() - gb[j][lz][i].clone() + gb[lz][i][j].clone()) * half.clone()
            });
            g.inverse().mul(&k)
        })
        .collect();
    Ok(Connection::new(gamma))
}

/// Verdicts of the direct predicates.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct DirectVerdicts {
    pub kahler: bool,
    pub balanced: bool,
    pub lck: bool,
    pub lcb: bool,
    pub skt: bool,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct VaismanReport {
    pub lck: bool,
    pub lee_parallel: bool,
    pub kahler: bool,
    pub vaisman: bool,
}

/// Integrable `J` with a compatible metric on a Lie algebra.
#[derive(Clone, Debug)]
pub struct HermitianStructure<S: Scalar> {
    algebra: LieAlgebra<S>,
    j: ComplexStructure<S>,
    g: Metric<S>,
    omega: KForm<S>,
    d_omega: KForm<S>,
    lee: OnceLock<KForm<S>>,
    lc: OnceLock<Connection<S>>,
    bismut: OnceLock<Connection<S>>,
}

impl<S: Scalar> HermitianStructure<S> {
    pub fn new(algebra: LieAlgebra<S>, j: ComplexStructure<S>, g: Metric<S>) -> Result<Self> {
        let n = algebra.dim();
        if n % 2 != 0 || n == 0 {
            return Err(Error::BadDimension(format!("Hermitian structures need even dimension, got {n}")));
        }
        if j.dim() != n {
            return Err(Error::DimensionMismatch { expected: n, found: j.dim() });
        }
        if g.dim() != n {
            return Err(Error::DimensionMismatch { expected: n, found: g.dim() });
        }
        let jm = j.matrix();
        if !jm.transpose().mul(g.matrix()).mul(jm).sub(g.matrix()).is_zero() {
            return Err(Error::NotHermitian);
        }
        if !is_integrable(&j, &algebra)? {
            return Err(Error::NonIntegrable);
        }
        // ω(X, Y) = g(JX, Y), i.e. the matrix Jᵗ G
        let omega = KForm::from_skew_matrix(&jm.transpose().mul(g.matrix()));
        let d_omega = ce_differential(&omega, &algebra)?;
        Ok(Self { algebra, j, g, omega, d_omega, lee: OnceLock::new(), lc: OnceLock::new(), bismut: OnceLock::new() })
    }

    pub fn algebra(&self) -> &LieAlgebra<S> {
        &self.algebra
    }

    pub fn complex_structure(&self) -> &ComplexStructure<S> {
        &self.j
    }

    pub fn metric(&self) -> &Metric<S> {
        &self.g
    }

    pub fn dim(&self) -> usize {
        self.algebra.dim()
    }

    /// Complex dimension `n`.
    pub fn half_dim(&self) -> usize {
        self.dim() / 2
    }

    pub fn omega(&self) -> &KForm<S> {
        &self.omega
    }

    pub fn d_omega(&self) -> &KForm<S> {
        &self.d_omega
    }

    pub fn d(&self, alpha: &KForm<S>) -> KForm<S> {
        ce_differential(alpha, &self.algebra).expect("form lives on this algebra")
    }

    /// The unique `θ` with `d(ω^{n-1}) = θ ∧ ω^{n-1}`.
    pub fn lee_form(&self) -> Result<KForm<S>> {
        if let Some(t) = self.lee.get() {
            return Ok(t.clone());
        }
        let t = self.solve_lee()?;
        Ok(self.lee.get_or_init(|| t).clone())
    }

    fn solve_lee(&self) -> Result<KForm<S>> {
        let dim = self.dim();
        let n = self.half_dim();
        let wp = self.omega.power(n - 1);
        let target = self.d(&wp);
        // columns: e^i ∧ ω^{n-1}, expressed on the (2n-1)-forms e^{1..î..2n}
        let slots: Vec<Vec<usize>> = (0..dim).map(|skip| (0..dim).filter(|&x| x != skip).collect()).collect();
        let cols: Vec<Vector<S>> = (0..dim)
            .map(|i| {
                let f = KForm::basis(dim, &[i]).wedge(&wp).expect("same dimension");
                slots.iter().map(|s| f.coeff(s)).collect()
            })
            .collect();
        let m = Matrix::from_columns(&cols)?;
        let rhs: Vector<S> = slots.iter().map(|s| target.coeff(s)).collect();
        if m.rank() < dim {
            return Err(Error::Singular("ω is degenerate".into()));
        }
        let x = m.solve(&rhs).ok_or_else(|| Error::Singular("Lee form system is inconsistent".into()))?;
        Ok(KForm::one_form(&x))
    }

    pub fn is_kahler(&self) -> bool {
        self.d_omega.is_zero()
    }

    pub fn is_balanced(&self) -> bool {
        self.d(&self.omega.power(self.half_dim() - 1)).is_zero()
    }

    pub fn is_lcb(&self) -> Result<bool> {
        Ok(self.d(&self.lee_form()?).is_zero())
    }

    pub fn is_lck(&self) -> Result<bool> {
        let theta = self.lee_form()?;
        if !self.d(&theta).is_zero() {
            return Ok(false);
        }
        let k = S::one() / S::from_i64(self.half_dim() as i64 - 1);
        Ok(self.d_omega.approx_eq(&theta.wedge(&self.omega)?.scale(&k)))
    }

    /// `dᶜω = -dω(J·, J·, J·)`.
    pub fn dc_omega(&self) -> KForm<S> {
        self.d_omega.pullback(self.j.matrix()).neg()
    }

    pub fn is_skt(&self) -> bool {
        self.d(&self.dc_omega()).is_zero()
    }

    pub fn direct_verdicts(&self) -> Result<DirectVerdicts> {
        Ok(DirectVerdicts {
            kahler: self.is_kahler(),
            balanced: self.is_balanced(),
            lck: self.is_lck()?,
            lcb: self.is_lcb()?,
            skt: self.is_skt(),
        })
    }

    pub fn levi_civita(&self) -> &Connection<S> {
        self.lc.get_or_init(|| levi_civita(&self.algebra, &self.g).expect("validated metric"))
    }

    /// `g(∇ᴮ_X Y, Z) = g(∇_X Y, Z) + ½ dω(JX, JY, JZ)`. With `ω = g(J·,·)` and
    /// `dα(X,Y) = -α([X,Y])` this is the sign for which `∇ᴮJ = 0`.
    pub fn bismut(&self) -> &Connection<S> {
        self.bismut.get_or_init(|| {
            let n = self.dim();
            let h = self.d_omega.pullback(self.j.matrix());
            let half = S::from_ratio(1, 2);
            let lc = self.levi_civita();
            let gamma = (0..n)
                .map(|i| {
                    let hi = Matrix::from_fn(n, n, |l, j| h.coeff(&[i, j, l]));
                    lc.along(i).add(&self.g.inverse().mul(&hi).scale(&half))
                })
                .collect();
            Connection::new(gamma)
        })
    }

    /// `ρᴮ(X, Y) = -½ Σ_i g(Rᴮ(X,Y) f_i, J f_i)` over a g-orthonormal frame `f_i`,
    /// evaluated as `-½ tr(R(X,Y)ᵗ G J G⁻¹)`, which needs no orthonormalization.
    pub fn bismut_ricci_oracle(&self) -> KForm<S> {
        let n = self.dim();
        let b = self.bismut();
        let w = self.g.matrix().mul(self.j.matrix()).mul(self.g.inverse());
        let half = S::from_ratio(1, 2);
        let mut rho = KForm::zero(n, 2);
        for a in 0..n {
            for c in a + 1..n {
                let r = b.curvature(&self.algebra, a, c);
                let tr = r.transpose().mul(&w).trace();
                rho.add_term(&[a, c], -(tr * half.clone()));
            }
        }
        rho
    }

    /// Vaisman: LCK with `∇θ = 0` for the Levi-Civita connection.
    pub fn vaisman(&self) -> Result<VaismanReport> {
        let theta = self.lee_form()?;
        let lck = self.is_lck()?;
        let lee_parallel = self.levi_civita().covariant_derivative_of_one_form(&theta.as_covector()).is_zero();
        Ok(VaismanReport { lck, lee_parallel, kahler: self.is_kahler(), vaisman: lck && lee_parallel })
    }

    pub fn is_vaisman(&self) -> Result<bool> {
        Ok(self.vaisman()?.vaisman)
    }

    pub fn to_float(&self) -> Result<HermitianStructure<f64>> {
        let l = self.algebra.map(|x| x.to_f64())?;
        let j = ComplexStructure::new(self.j.matrix().map(|x| x.to_f64()))?;
        let g = Metric::new(self.g.matrix().map(|x| x.to_f64()))?;
        HermitianStructure::new(l, j, g)
    }
}

/// `ρ(J·, J·) = ρ`.
pub fn is_type_11<S: Scalar>(rho: &KForm<S>, j: &ComplexStructure<S>) -> bool {
    rho.pullback(j.matrix()).approx_eq(rho)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::Rational;

    type Q = Rational;

    fn q(n: i64) -> Q {
        Q::from_i64(n)
    }

    fn algebra(dim: usize, eqs: &[&[(i64, usize, usize)]]) -> LieAlgebra<Q> {
        let d: Vec<KForm<Q>> = eqs
            .iter()
            .map(|terms| {
                let mut f = KForm::zero(dim, 2);
                for &(c, i, j) in *terms {
                    f.add_term(&[i - 1, j - 1], q(c));
                }
                f
            })
            .collect();
        LieAlgebra::from_differentials(&d).unwrap()
    }

    fn pairs(dim: usize, p: &[(usize, usize)]) -> ComplexStructure<Q> {
        ComplexStructure::from_pairs(dim, &p.iter().map(|&(a, b)| (a - 1, b - 1, q(1))).collect::<Vec<_>>()).unwrap()
    }

    #[test]
    fn abelian_any_j_is_integrable_and_kahler() {
        let l = LieAlgebra::<Q>::abelian(4);
        let h = HermitianStructure::new(l, pairs(4, &[(1, 2), (3, 4)]), Metric::identity(4)).unwrap();
        assert_eq!(h.direct_verdicts().unwrap(), DirectVerdicts { kahler: true, balanced: true, lck: true, lcb: true, skt: true });
        assert!(h.lee_form().unwrap().is_zero());
        assert!(h.bismut_ricci_oracle().is_zero());
    }

    #[test]
    fn g4_standard_structure() {
        let l = algebra(6, &[&[(1, 1, 6)], &[(1, 2, 6)], &[(1, 3, 6)], &[(1, 4, 6)], &[], &[]]);
        let j = pairs(6, &[(1, 2), (3, 4), (5, 6)]);
        assert!(is_integrable(&j, &l).unwrap());
        let h = HermitianStructure::new(l, j, Metric::identity(6)).unwrap();
        assert!(h.is_lck().unwrap());
        assert!(!h.is_balanced());
    }

    #[test]
    fn g4_with_mixed_j_is_not_integrable() {
        let l = algebra(6, &[&[(1, 1, 6)], &[(1, 2, 6)], &[(1, 3, 6)], &[(1, 4, 6)], &[], &[]]);
        // J f6 = f1 pulls the transversal into the ideal inconsistently with f5
        let j = pairs(6, &[(6, 1), (2, 5), (3, 4)]);
        assert!(!is_integrable(&j, &l).unwrap());
        assert_eq!(HermitianStructure::new(l, j, Metric::identity(6)).unwrap_err(), Error::NonIntegrable);
    }

    #[test]
    fn non_complex_structure_rejected() {
        assert_eq!(ComplexStructure::new(Matrix::<Q>::identity(2)).unwrap_err(), Error::NotComplexStructure);
    }

    #[test]
    fn aff2_lck_metric() {
        let l = algebra(4, &[&[(1, 1, 2)], &[], &[], &[]]);
        let j = pairs(4, &[(1, 2), (3, 4)]);
        let g = Metric::new(
            Matrix::from_rows(vec![
                vec![q(2), q(0), q(1), q(0)],
                vec![q(0), q(2), q(0), q(1)],
                vec![q(1), q(0), q(1), q(0)],
                vec![q(0), q(1), q(0), q(1)],
            ])
            .unwrap(),
        )
        .unwrap();
        let h = HermitianStructure::new(l, j, g).unwrap();
        let mut w = KForm::zero(4, 2);
        for (c, a, b) in [(2, 0, 1), (1, 0, 3), (-1, 1, 2), (1, 2, 3)] {
            w.add_term(&[a, b], q(c));
        }
        assert_eq!(h.omega(), &w);
        let theta = KForm::one_form(&[q(0), q(1), q(0), q(1)]);
        assert_eq!(h.lee_form().unwrap(), theta);
        assert!(h.is_lck().unwrap());
        assert!(!h.is_kahler());
    }

    #[test]
    fn levi_civita_is_metric_and_torsion_free() {
        let l = algebra(4, &[&[(1, 1, 4)], &[(2, 2, 4), (1, 3, 4)], &[(1, 2, 4), (2, 3, 4)], &[]]);
        let g = Metric::new(Matrix::from_fn(4, 4, |i, j| if i == j { q(2) } else if i + j == 3 { q(1) } else { q(0) })).unwrap();
        let lc = levi_civita(&l, &g).unwrap();
        assert!(lc.preserves_metric(&g));
        assert!(lc.is_torsion_free(&l));
    }
}
