//! Hermitian almost abelian Lie algebras through the data `(a, v, A)`.
//!
//! In an adapted unitary basis `e_1, …, e_{2n}` with `𝔫 = span(e_1..e_{2n-1})`,
//! `𝔫_1 = span(e_2..e_{2n-1})` and `J e_i = e_{2n+1-i}` for `i <= n`,
//! `ad_{e_{2n}}|_𝔫` has the block form `[[a, 0], [v, A]]`.
//! Vectors and matrices on `𝔫_1` use coordinates `e_2, …, e_{2n-1}`.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::exterior::KForm;
use crate::hermitian::{is_type_11, ComplexStructure, HermitianStructure, Metric};
use crate::lie::{LieAlgebra, StructureConstants, Subspace};
use crate::linalg::{dot, unit_vector, vec_scale, vec_sub, Matrix, Vector};
use crate::scalar::{format_scalar, Scalar};

#[derive(Clone, Debug, PartialEq)]
pub struct HermitianData<S: Scalar> {
    pub n: usize,
    pub a: S,
    pub v: Vector<S>,
    pub a_mat: Matrix<S>,
    pub j1: Matrix<S>,
    /// Adapted basis `e_1, …, e_{2n}` in the coordinates of the algebra it was read from.
    pub basis: Vec<Vector<S>>,
}

/// The standard `J_1` on `𝔫_1`: `J e_i = e_{2n+1-i}` for `2 <= i <= n`.
pub fn standard_j1<S: Scalar>(n: usize) -> Matrix<S> {
    let m = 2 * n - 2;
    let mut j = Matrix::zeros(m, m);
    for k in 0..n - 1 {
        let mirror = m - 1 - k;
        j[(mirror, k)] = S::one();
        j[(k, mirror)] = -S::one();
    }
    j
}

/// Embeds a vector of `𝔫_1` into the full adapted coordinates.
pub fn embed_n1<S: Scalar>(x: &[S]) -> Vector<S> {
    let mut out = vec![S::zero()];
    out.extend_from_slice(x);
    out.push(S::zero());
    out
}

/// Builds `𝔤(a, v, A)` in its standard adapted basis, with `J e_1 = e_{2n}`,
/// `J|_{𝔫_1} = J_1` and `g` the identity.
pub fn build_algebra<S: Scalar>(a: &S, v: &[S], a_mat: &Matrix<S>, j1: &Matrix<S>) -> Result<(LieAlgebra<S>, ComplexStructure<S>, Metric<S>)> {
    let m = a_mat.rows();
    if !a_mat.is_square() || m % 2 != 0 || m == 0 {
        return Err(Error::BadDimension(format!("A must be a nonempty even square matrix, got {}x{}", a_mat.rows(), a_mat.cols())));
    }
    if v.len() != m {
        return Err(Error::DimensionMismatch { expected: m, found: v.len() });
    }
    if j1.rows() != m || j1.cols() != m {
        return Err(Error::DimensionMismatch { expected: m, found: j1.rows() });
    }
    if !j1.mul(j1).add(&Matrix::identity(m)).is_zero() {
        return Err(Error::NotComplexStructure);
    }
    if !j1.transpose().mul(j1).sub(&Matrix::identity(m)).is_zero() {
        return Err(Error::NotHermitian);
    }
    if !a_mat.commutator(j1).is_zero() {
        return Err(Error::Precondition("A must commute with J_1".into()));
    }
    let dim = m + 2;
    let last = dim - 1;
    let mut c = StructureConstants::zeros(dim);
    let mut col0 = vec![S::zero(); dim];
    col0[0] = a.clone();
    for (k, x) in v.iter().enumerate() {
        col0[k + 1] = x.clone();
    }
    c.set_bracket(last, 0, &col0);
    for j in 0..m {
        c.set_bracket(last, j + 1, &embed_n1(&a_mat.column(j)));
    }
    let l = LieAlgebra::validate(c)?;
    let mut jm = Matrix::zeros(dim, dim);
    jm[(last, 0)] = S::one();
    jm[(0, last)] = -S::one();
    for r in 0..m {
        for s in 0..m {
            jm[(r + 1, s + 1)] = j1[(r, s)].clone();
        }
    }
    Ok((l, ComplexStructure::new(jm)?, Metric::identity(dim)))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct DataVerdicts {
    pub kahler: bool,
    pub balanced: bool,
    pub lck: bool,
    pub lcb: bool,
    pub skt: bool,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct Lcb11Report {
    pub lcb_data: bool,
    pub type_11: bool,
    pub agree: bool,
}

/// Quantities that do not depend on the choice of adapted basis.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct GaugeSummary {
    pub a: String,
    pub v_norm_squared: String,
    pub trace_a: String,
    pub char_poly_a: String,
    pub min_poly_a: String,
}

impl<S: Scalar> HermitianData<S> {
    /// Data in the standard adapted basis of [`build_algebra`].
    pub fn new(a: S, v: Vector<S>, a_mat: Matrix<S>, j1: Matrix<S>) -> Result<Self> {
        let m = a_mat.rows();
        if m % 2 != 0 || m == 0 {
            return Err(Error::BadDimension(format!("A must be an even square matrix, got {m}x{m}")));
        }
        let dim = m + 2;
        let basis = (0..dim).map(|i| unit_vector(dim, i)).collect();
        Ok(Self { n: dim / 2, a, v, a_mat, j1, basis })
    }

    pub fn dim(&self) -> usize {
        2 * self.n
    }

    /// The structure realized in the standard adapted basis.
    pub fn build(&self) -> Result<(LieAlgebra<S>, ComplexStructure<S>, Metric<S>)> {
        build_algebra(&self.a, &self.v, &self.a_mat, &self.j1)
    }

    pub fn hermitian_structure(&self) -> Result<HermitianStructure<S>> {
        let (l, j, g) = self.build()?;
        HermitianStructure::new(l, j, g)
    }

    /// Columns are the adapted basis vectors.
    pub fn basis_matrix(&self) -> Matrix<S> {
        Matrix::from_columns(&self.basis).expect("uniform basis")
    }

    /// Metric, in the original coordinates, for which the adapted basis is orthonormal.
    pub fn metric_in_original(&self) -> Result<Matrix<S>> {
        let inv = self.basis_matrix().inverse().ok_or_else(|| Error::Singular("adapted basis".into()))?;
        Ok(inv.transpose().mul(&inv))
    }

    /// Rewrites a form in the adapted coframe in terms of the original coframe.
    pub fn to_original_coframe(&self, form: &KForm<S>) -> Result<KForm<S>> {
        let inv = self.basis_matrix().inverse().ok_or_else(|| Error::Singular("adapted basis".into()))?;
        Ok(form.pullback(&inv))
    }

    fn trace_a(&self) -> S {
        self.a_mat.trace()
    }

    pub fn is_kahler_data(&self) -> bool {
        crate::linalg::vec_is_zero(&self.v) && self.a_mat.is_skew()
    }

    pub fn is_lck_data(&self) -> bool {
        let m = self.a_mat.rows();
        let lambda = self.trace_a() / S::from_i64(m as i64);
        let u = self.a_mat.shift(&lambda);
        (crate::linalg::vec_is_zero(&self.v) && u.is_skew()) || (self.n == 2 && self.a_mat.is_zero())
    }

    pub fn is_balanced_data(&self) -> bool {
        crate::linalg::vec_is_zero(&self.v) && self.trace_a().is_zero()
    }

    /// `A` normal with eigenvalue real parts in `{0, -a/2}`. For normal `A` the real
    /// parts are the eigenvalues of `S = (A + Aᵗ)/2`, and `S` is diagonalizable, so the
    /// condition is `S (S + a/2 Id) = 0`.
    pub fn is_skt_data(&self) -> bool {
        let at = self.a_mat.transpose();
        if !self.a_mat.commutator(&at).is_zero() {
            return false;
        }
        let s = self.a_mat.add(&at).scale(&S::from_ratio(1, 2));
        s.mul(&s.shift(&-(self.a.clone() * S::from_ratio(1, 2)))).is_zero()
    }

    pub fn is_lcb_data(&self) -> bool {
        crate::linalg::vec_is_zero(&self.a_mat.transpose().mul_vec(&self.v))
    }

    pub fn data_verdicts(&self) -> DataVerdicts {
        DataVerdicts {
            kahler: self.is_kahler_data(),
            balanced: self.is_balanced_data(),
            lck: self.is_lck_data(),
            lcb: self.is_lcb_data(),
            skt: self.is_skt_data(),
        }
    }

    /// `θ = (Jv)^♭ - (tr A) e^{2n}` in the adapted coframe.
    pub fn lee_form_closed(&self) -> KForm<S> {
        let mut coeffs = embed_n1(&self.j1.mul_vec(&self.v));
        let last = coeffs.len() - 1;
        coeffs[last] = -self.trace_a();
        KForm::one_form(&coeffs)
    }

    /// `ρᴮ = -(a² - ½ a tr A + |v|²) e^1 ∧ e^{2n} - (Aᵗv)^♭ ∧ e^{2n}` in the adapted coframe.
    pub fn rho_b_closed(&self) -> KForm<S> {
        let dim = self.dim();
        let last = dim - 1;
        let c = self.a.clone() * self.a.clone() - self.a.clone() * self.trace_a() * S::from_ratio(1, 2) + dot(&self.v, &self.v);
        let mut rho = KForm::zero(dim, 2);
        rho.add_term(&[0, last], -c);
        let atv = self.a_mat.transpose().mul_vec(&self.v);
        for (k, x) in atv.iter().enumerate() {
            rho.add_term(&[k + 1, last], -x.clone());
        }
        rho
    }

    /// Adapted-frame `J`.
    pub fn j_adapted(&self) -> ComplexStructure<S> {
        let dim = self.dim();
        let mut jm = Matrix::zeros(dim, dim);
        jm[(dim - 1, 0)] = S::one();
        jm[(0, dim - 1)] = -S::one();
        for r in 0..dim - 2 {
            for s in 0..dim - 2 {
                jm[(r + 1, s + 1)] = self.j1[(r, s)].clone();
            }
        }
        ComplexStructure::new(jm).expect("J_1 squares to -Id")
    }

    pub fn lcb_iff_11(&self) -> Lcb11Report {
        let lcb_data = self.is_lcb_data();
        let type_11 = is_type_11(&self.rho_b_closed(), &self.j_adapted());
        Lcb11Report { lcb_data, type_11, agree: lcb_data == type_11 }
    }

    pub fn gauge_summary(&self) -> GaugeSummary {
        GaugeSummary {
            a: format_scalar(&self.a),
            v_norm_squared: format_scalar(&dot(&self.v, &self.v)),
            trace_a: format_scalar(&self.trace_a()),
            char_poly_a: self.a_mat.char_poly().to_string(),
            min_poly_a: self.a_mat.min_poly().to_string(),
        }
    }

    /// The SKT-to-LCB change of adapted basis: write `v = (A - a Id) x + v'` with
    /// `v'` orthogonal to `im(A - a Id)`, then move to `e_1' = e_1 - x`, `e_{2n}' = J e_1'`.
    /// The new data is `(a, v', A)` and the metric making the new basis orthonormal is LCB.
    pub fn skt_to_lcb(&self) -> Result<HermitianData<S>> {
        if !self.is_skt_data() {
            return Err(Error::Precondition("input data is not SKT".into()));
        }
        let m = self.a_mat.shift(&self.a);
        let mt = m.transpose();
        let x = mt.mul(&m).solve(&mt.mul_vec(&self.v)).ok_or_else(|| Error::Singular("normal equations".into()))?;
        let v_new = vec_sub(&self.v, &m.mul_vec(&x));
        let dim = self.dim();
        // x and J_1 x in original coordinates
        let e = self.basis_matrix();
        let x_full = e.mul_vec(&embed_n1(&x));
        let jx_full = e.mul_vec(&embed_n1(&self.j1.mul_vec(&x)));
        let mut basis = self.basis.clone();
        basis[0] = vec_sub(&self.basis[0], &x_full);
        basis[dim - 1] = vec_sub(&self.basis[dim - 1], &jx_full);
        Ok(HermitianData { n: self.n, a: self.a.clone(), v: v_new, a_mat: self.a_mat.clone(), j1: self.j1.clone(), basis })
    }

    pub fn map<T: Scalar>(&self, f: impl Fn(&S) -> T + Copy) -> HermitianData<T> {
        HermitianData {
            n: self.n,
            a: f(&self.a),
            v: self.v.iter().map(f).collect(),
            a_mat: self.a_mat.map(f),
            j1: self.j1.map(f),
            basis: self.basis.iter().map(|b| b.iter().map(f).collect()).collect(),
        }
    }
}

/// Unit vector along `x` for the metric `g`, if the norm exists in this kernel.
fn normalize<S: Scalar>(g: &Matrix<S>, x: &[S]) -> Result<Vector<S>> {
    let norm = crate::linalg::bilinear(g, x, x).sqrt().ok_or(Error::IrrationalNormalization)?;
    Ok(vec_scale(x, &(S::one() / norm)))
}

/// g-orthogonal projection of `x` off the orthonormal vectors `ons`.
fn project_off<S: Scalar>(g: &Matrix<S>, x: &[S], ons: &[Vector<S>]) -> Vector<S> {
    let mut y = x.to_vec();
    for u in ons {
        let c = crate::linalg::bilinear(g, u, x);
        y = vec_sub(&y, &vec_scale(u, &c));
    }
    y
}

/// Reads `(a, v, A)` off a Hermitian almost abelian structure.
///
/// `e_{2n}` is the g-unit normal of `𝔫` whose first nonzero coordinate is positive,
/// `e_1 = -J e_{2n}`, and `𝔫_1` gets a unitary basis by Gram–Schmidt over the original
/// basis vectors in index order, each new `u` contributing the pair `(u, Ju)`.
pub fn extract_data<S: Scalar>(h: &HermitianStructure<S>, ideal: Option<&Subspace<S>>) -> Result<HermitianData<S>> {
    let l = h.algebra();
    let dim = l.dim();
    let n = dim / 2;
    if n < 2 {
        return Err(Error::BadDimension(format!("need real dimension at least 4, got {dim}")));
    }
    let detected;
    let ideal = match ideal {
        Some(s) => {
            l.check_codim1_abelian_ideal(s)?;
            s
        }
        None => {
            detected = l.find_codim1_abelian_ideal().ok_or(Error::NotAlmostAbelian)?;
            &detected.ideal
        }
    };
    let g = h.metric().matrix();
    let j = h.complex_structure();

    // normal direction: g(x, u) = 0 for all u in the ideal
    let rows: Vec<Vec<S>> = ideal.basis().iter().map(|u| g.mul_vec(u)).collect();
    let normal = Matrix::from_rows(rows)?.kernel();
    if normal.len() != 1 {
        return Err(Error::IdealNotAbelian("ideal is not a hyperplane".into()));
    }
    let mut en = normalize(g, &normal[0])?;
    if en.iter().find(|c| !c.is_zero()).is_some_and(|c| c.to_f64() < 0.0) {
        en = vec_scale(&en, &-S::one());
    }
    let e1 = vec_scale(&j.apply(&en), &-S::one());
    if !ideal.contains(&e1) {
        return Err(Error::JNotCompatible("J e_{2n} does not lie in the ideal".into()));
    }

    let mut ons = vec![e1.clone(), en.clone()];
    let mut pairs: Vec<(Vector<S>, Vector<S>)> = Vec::new();
    for i in 0..dim {
        if pairs.len() == n - 1 {
            break;
        }
        let y = project_off(g, &unit_vector(dim, i), &ons);
        if crate::linalg::vec_is_zero(&y) {
            continue;
        }
        let u = normalize(g, &y)?;
        let ju = j.apply(&u);
        if !ideal.contains(&ju) {
            return Err(Error::JNotCompatible("J does not preserve 𝔫_1".into()));
        }
        ons.push(u.clone());
        ons.push(ju.clone());
        pairs.push((u, ju));
    }
    if pairs.len() != n - 1 {
        return Err(Error::JNotCompatible("could not complete a unitary basis of 𝔫_1".into()));
    }

    let mut basis = vec![Vec::new(); dim];
    basis[0] = e1;
    basis[dim - 1] = en.clone();
    for (k, (u, ju)) in pairs.into_iter().enumerate() {
        basis[1 + k] = u;
        basis[dim - 2 - k] = ju;
    }
    let e = Matrix::from_columns(&basis)?;
    // e is g-orthonormal, so e⁻¹ = eᵗ g
    let e_inv = e.transpose().mul(g);
    let ad = e_inv.mul(&l.ad(&en)?).mul(&e);
    let m = dim - 2;
    for j in 1..dim - 1 {
        if !ad[(0, j)].is_zero() {
            return Err(Error::JNotCompatible("ad_{e_2n} does not preserve 𝔫_1 modulo e_1".into()));
        }
    }
    let a = ad[(0, 0)].clone();
    let v: Vector<S> = (1..dim - 1).map(|k| ad[(k, 0)].clone()).collect();
    let a_mat = Matrix::from_fn(m, m, |r, s| ad[(r + 1, s + 1)].clone());
    let jad = e_inv.mul(j.matrix()).mul(&e);
    let j1 = Matrix::from_fn(m, m, |r, s| jad[(r + 1, s + 1)].clone());
    if !a_mat.commutator(&j1).is_zero() {
        return Err(Error::JNotCompatible("A does not commute with J_1".into()));
    }
    Ok(HermitianData { n, a, v, a_mat, j1, basis })
}
