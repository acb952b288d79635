//! Locally conformally hyperkähler structures on `ℝ^{4m-1} ⋊_D ℝ`.

use nalgebra::{Complex, DMatrix};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::exterior::KForm;
use crate::hermitian::{levi_civita, ComplexStructure, HermitianStructure, Metric};
use crate::lie::{LieAlgebra, StructureConstants};
use crate::linalg::{unit_vector, Matrix, Vector};
use crate::poly::Poly;
use crate::scalar::{epsilon, format_scalar, Rational, Scalar};

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct EigenMultiplicity {
    pub eigenvalue: String,
    pub multiplicity: usize,
}

#[derive(Clone, Debug, PartialEq)]
pub struct LchkVerdict<S: Scalar> {
    pub admissible: bool,
    /// The common real part, `tr D / (4m - 1)`, when condition (i) holds.
    pub a: Option<S>,
    pub multiplicities: Vec<EigenMultiplicity>,
    pub diagonalizable: bool,
    pub condition_i: bool,
    pub condition_ii: bool,
    pub condition_iii: bool,
    pub hyperkahler: bool,
    pub notes: Vec<String>,
    /// Distinct `b > 0` with `m_D(a + ib)`, when they are representable in this kernel.
    pub imaginary_parts: Option<Vec<(S, usize)>>,
    /// `m_D(a)`.
    pub real_multiplicity: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct LchkSummary {
    pub admissible: bool,
    pub a: Option<String>,
    pub hyperkahler: bool,
    pub diagonalizable: bool,
    pub condition_i: bool,
    pub condition_ii: bool,
    pub condition_iii: bool,
    pub multiplicities: Vec<EigenMultiplicity>,
    pub notes: Vec<String>,
}

impl<S: Scalar> LchkVerdict<S> {
    pub fn summary(&self) -> LchkSummary {
        LchkSummary {
            admissible: self.admissible,
            a: self.a.as_ref().map(format_scalar),
            hyperkahler: self.hyperkahler,
            diagonalizable: self.diagonalizable,
            condition_i: self.condition_i,
            condition_ii: self.condition_ii,
            condition_iii: self.condition_iii,
            multiplicities: self.multiplicities.clone(),
            notes: self.notes.clone(),
        }
    }
}

fn check_dimension<S: Scalar>(d: &Matrix<S>) -> Result<usize> {
    let n = d.rows();
    if !d.is_square() || n % 4 != 3 {
        return Err(Error::BadDimension(format!("D must be square of size 4m-1, got {}x{}", d.rows(), d.cols())));
    }
    Ok((n + 1) / 4)
}

/// Spectral admissibility of `D`: complex-diagonalizable and
/// (i) `Spec(D) ⊂ a + iℝ`, (ii) `m_D(a) >= 3`, (iii) `m_D(a + ib)` even for `b ≠ 0`.
pub fn lchk_admissible<S: Scalar>(d: &Matrix<S>) -> Result<LchkVerdict<S>> {
    check_dimension(d)?;
    if S::is_exact() {
        let dq = d.map(|x| x.to_rational().expect("exact kernel"));
        let v = admissible_exact(&dq);
        Ok(LchkVerdict {
            admissible: v.admissible,
            a: v.a.as_ref().map(S::from_rational),
            multiplicities: v.multiplicities,
            diagonalizable: v.diagonalizable,
            condition_i: v.condition_i,
            condition_ii: v.condition_ii,
            condition_iii: v.condition_iii,
            hyperkahler: v.hyperkahler,
            notes: v.notes,
            imaginary_parts: v.imaginary_parts.map(|bs| bs.iter().map(|(b, m)| (S::from_rational(b), *m)).collect()),
            real_multiplicity: v.real_multiplicity,
        })
    } else {
        let v = admissible_float(&d.map(|x| x.to_f64()));
        Ok(LchkVerdict {
            admissible: v.admissible,
            a: v.a.map(|x| S::from_rational(&crate::scalar::rational_from_f64(x).unwrap_or_default())),
            multiplicities: v.multiplicities,
            diagonalizable: v.diagonalizable,
            condition_i: v.condition_i,
            condition_ii: v.condition_ii,
            condition_iii: v.condition_iii,
            hyperkahler: v.hyperkahler,
            notes: v.notes,
            imaginary_parts: v.imaginary_parts.map(|bs| bs.iter().map(|(b, m)| (S::from_rational(&crate::scalar::rational_from_f64(*b).unwrap_or_default()), *m)).collect()),
            real_multiplicity: v.real_multiplicity,
        })
    }
}

fn pair_label<S: Scalar>(a: &S, b: &str) -> [String; 2] {
    let re = format_scalar(a);
    [format!("{re} + {b}i"), format!("{re} - {b}i")]
}

/// Exact path. With `a = tr D / N` and `q(y) = p(a + y)`, condition (i) says
/// `q(y) = y^{m_0} h(y²)` with every root of `h` real and negative; a root `z` of `h`
/// of multiplicity `k` is `m_D(a ± i√(-z)) = k`, so (iii) says every multiplicity
/// in the square-free decomposition of `h` is even.
fn admissible_exact(d: &Matrix<Rational>) -> LchkVerdict<Rational> {
    let n = d.rows();
    let p = d.char_poly();
    let diagonalizable = d.min_poly().is_squarefree();
    let a = d.trace() / Rational::from_i64(n as i64);
    let q = p.shift(&a);
    let m0 = q.zero_multiplicity();
    let rest = Poly::new(q.coeffs()[m0..].to_vec());
    let mut notes = Vec::new();
    let mut multiplicities = Vec::new();
    let mut condition_i = false;
    let mut condition_iii = false;
    let mut imaginary_parts = None;
    if let Some(h) = rest.in_square_variable() {
        let squarefree = h.div_rem(&h.gcd(&h.derivative())).0;
        let distinct = squarefree.degree().unwrap_or(0);
        let negative = h.count_real_roots(None, Some(&<Rational as Scalar>::zero()));
        condition_i = negative == distinct;
        if condition_i {
            if m0 > 0 {
                multiplicities.push(EigenMultiplicity { eigenvalue: format_scalar(&a), multiplicity: m0 });
            }
            let dec = h.squarefree_decomposition();
            condition_iii = dec.iter().all(|(_, k)| k % 2 == 0);
            let mut bs: Vec<(Rational, usize)> = Vec::new();
            let mut representable = true;
            for (f, k) in &dec {
                let roots = f.rational_roots();
                for z in &roots {
                    let b2 = -z.clone();
                    match b2.sqrt() {
                        Some(b) => {
                            for label in pair_label(&a, &format_scalar(&b)) {
                                multiplicities.push(EigenMultiplicity { eigenvalue: label, multiplicity: *k });
                            }
                            bs.push((b, *k));
                        }
                        None => {
                            representable = false;
                            for label in pair_label(&a, &format!("sqrt({})", format_scalar(&b2))) {
                                multiplicities.push(EigenMultiplicity { eigenvalue: label, multiplicity: *k });
                            }
                        }
                    }
                }
                if roots.len() < f.degree().unwrap_or(0) {
                    representable = false;
                    let other = roots.iter().fold(f.clone(), |acc, z| acc.div_rem(&Poly::linear(z.clone())).0);
                    multiplicities.push(EigenMultiplicity {
                        eigenvalue: format!("{} ± i·sqrt(-z), z a root of {}", format_scalar(&a), other),
                        multiplicity: *k,
                    });
                }
            }
            bs.sort_by(|x, y| y.0.cmp(&x.0));
            if representable {
                imaginary_parts = Some(bs);
            } else {
                notes.push("some imaginary parts are irrational; the exact witness cannot be built".into());
            }
        } else {
            notes.push("eigenvalues do not share a common real part".into());
        }
    } else {
        notes.push("eigenvalues do not share a common real part".into());
    }
    if !diagonalizable {
        notes.push("D is not complex-diagonalizable (minimal polynomial has a repeated factor)".into());
    }
    let condition_ii = condition_i && m0 >= 3;
    let condition_iii = condition_i && condition_iii;
    let admissible = diagonalizable && condition_i && condition_ii && condition_iii;
    let hyperkahler = admissible && a == <Rational as Scalar>::zero();
    LchkVerdict {
        admissible,
        a: condition_i.then_some(a),
        multiplicities,
        diagonalizable,
        condition_i,
        condition_ii,
        condition_iii,
        hyperkahler,
        notes,
        imaginary_parts,
        real_multiplicity: m0,
    }
}

/// Float path: eigenvalues from a real Schur form, grouped into clusters of
/// pairwise distance at most `10³·ε` before multiplicities are counted.
fn admissible_float(d: &Matrix<f64>) -> LchkVerdict<f64> {
    let n = d.rows();
    let tol = 1e3 * epsilon();
    let m = DMatrix::from_fn(n, n, |i, j| d[(i, j)]);
    let eig: Vec<Complex<f64>> = m.clone().complex_eigenvalues().iter().cloned().collect();
    let clusters = cluster(&eig, tol);
    let scale = 1.0 + d.max_abs();
    // Π (D - λ_c) vanishes iff D is diagonalizable
    let mc = m.map(|x| Complex::new(x, 0.0));
    let mut prod = DMatrix::<Complex<f64>>::identity(n, n);
    for (c, _) in &clusters {
        prod = prod * (&mc - DMatrix::<Complex<f64>>::identity(n, n) * *c);
    }
    let diag_tol = tol * scale.powi(clusters.len() as i32);
    let diagonalizable = prod.iter().all(|z| z.norm() <= diag_tol);
    let a = d.trace() / n as f64;
    let condition_i = clusters.iter().all(|(c, _)| (c.re - a).abs() <= tol);
    let real_multiplicity: usize = clusters.iter().filter(|(c, _)| (c - Complex::new(a, 0.0)).norm() <= tol).map(|(_, k)| *k).sum();
    let mut multiplicities = Vec::new();
    let mut sorted = clusters.clone();
    sorted.sort_by(|x, y| y.0.im.partial_cmp(&x.0.im).unwrap());
    for (c, k) in &sorted {
        let label = if c.im.abs() <= tol {
            format!("{:?}", c.re)
        } else if c.im > 0.0 {
            format!("{:?} + {:?}i", c.re, c.im)
        } else {
            format!("{:?} - {:?}i", c.re, -c.im)
        };
        multiplicities.push(EigenMultiplicity { eigenvalue: label, multiplicity: *k });
    }
    let condition_ii = condition_i && real_multiplicity >= 3;
    let condition_iii = condition_i && clusters.iter().filter(|(c, _)| c.im.abs() > tol).all(|(_, k)| k % 2 == 0);
    let mut notes = Vec::new();
    if !condition_i {
        notes.push("eigenvalues do not share a common real part".into());
    }
    if !diagonalizable {
        notes.push("D is not complex-diagonalizable within tolerance".into());
    }
    let admissible = diagonalizable && condition_i && condition_ii && condition_iii;
    let mut bs: Vec<(f64, usize)> = sorted.iter().filter(|(c, _)| c.im > tol).map(|(c, k)| (c.im, *k)).collect();
    bs.sort_by(|x, y| y.0.partial_cmp(&x.0).unwrap());
    LchkVerdict {
        admissible,
        a: condition_i.then_some(a),
        multiplicities,
        diagonalizable,
        condition_i,
        condition_ii,
        condition_iii,
        hyperkahler: admissible && a.abs() <= tol,
        notes,
        imaginary_parts: condition_i.then_some(bs),
        real_multiplicity,
    }
}

/// Single-linkage clusters with their mean and size.
fn cluster(eig: &[Complex<f64>], tol: f64) -> Vec<(Complex<f64>, usize)> {
    let n = eig.len();
    let mut parent: Vec<usize> = (0..n).collect();
    fn find(p: &mut Vec<usize>, i: usize) -> usize {
        if p[i] != i {
            let r = find(p, p[i]);
            p[i] = r;
        }
        p[i]
    }
    for i in 0..n {
        for j in i + 1..n {
            if (eig[i] - eig[j]).norm() <= tol {
                let (a, b) = (find(&mut parent, i), find(&mut parent, j));
                parent[a] = b;
            }
        }
    }
    let mut groups: Vec<(usize, Complex<f64>, usize)> = Vec::new();
    for i in 0..n {
        let r = find(&mut parent, i);
        match groups.iter_mut().find(|g| g.0 == r) {
            Some(g) => {
                g.1 += eig[i];
                g.2 += 1;
            }
            None => groups.push((r, eig[i], 1)),
        }
    }
    groups.into_iter().map(|(_, s, k)| (s / k as f64, k)).collect()
}

/// `ℝ^{N} ⋊_D ℝ` with `[e_{N+1}, x] = D x`.
pub fn semidirect<S: Scalar>(d: &Matrix<S>) -> Result<LieAlgebra<S>> {
    let n = d.rows();
    let mut c = StructureConstants::zeros(n + 1);
    for j in 0..n {
        let mut col = d.column(j);
        col.push(S::zero());
        c.set_bracket(n, j, &col);
    }
    LieAlgebra::validate(c)
}

pub fn k_matrices<S: Scalar>() -> [Matrix<S>; 3] {
    let z = S::zero;
    let o = S::one;
    let m = || -S::one();
    [
        Matrix::from_rows(vec![vec![z(), m(), z(), z()], vec![o(), z(), z(), z()], vec![z(), z(), z(), m()], vec![z(), z(), o(), z()]]),
        Matrix::from_rows(vec![vec![z(), z(), m(), z()], vec![z(), z(), z(), o()], vec![o(), z(), z(), z()], vec![z(), m(), z(), z()]]),
        Matrix::from_rows(vec![vec![z(), z(), z(), m()], vec![z(), z(), m(), z()], vec![z(), o(), z(), z()], vec![o(), z(), z(), z()]]),
    ]
    .map(|r| r.expect("4x4"))
}

#[derive(Clone, Debug)]
pub struct HypercomplexTriple<S: Scalar> {
    pub i1: ComplexStructure<S>,
    pub i2: ComplexStructure<S>,
    pub i3: ComplexStructure<S>,
    pub g: Metric<S>,
    pub theta: KForm<S>,
}

impl<S: Scalar> HypercomplexTriple<S> {
    pub fn structures(&self) -> [&ComplexStructure<S>; 3] {
        [&self.i1, &self.i2, &self.i3]
    }

    /// `I₁I₂ = I₃` and `I₁I₂I₃ = -Id`.
    pub fn quaternion_relations(&self) -> bool {
        let (a, b, c) = (self.i1.matrix(), self.i2.matrix(), self.i3.matrix());
        let id = Matrix::identity(a.rows());
        a.mul(b).sub(c).is_zero() && a.mul(b).mul(c).add(&id).is_zero()
    }
}

/// The witness: algebra with `D` in canonical block form and the triple `(I₁, I₂, I₃, g)`.
#[derive(Clone, Debug)]
pub struct LchkWitness<S: Scalar> {
    pub algebra: LieAlgebra<S>,
    pub canonical_d: Matrix<S>,
    /// Columns: the new basis of `ℝ^{4m-1}` in the original coordinates.
    pub change_of_basis: Matrix<S>,
    pub triple: HypercomplexTriple<S>,
    pub a: S,
    pub m: usize,
}

fn extend_independent<S: Scalar>(chosen: &mut Vec<Vector<S>>, v: Vector<S>) -> bool {
    let mut trial = chosen.clone();
    trial.push(v.clone());
    if crate::linalg::span_rank(&trial) > chosen.len() {
        chosen.push(v);
        true
    } else {
        false
    }
}

/// Builds the explicit LCHK structure for an admissible `D` and checks every
/// claimed property, failing with `WITNESS_FAILURE` if one does not hold.
pub fn construct_lchk<S: Scalar>(d: &Matrix<S>) -> Result<LchkWitness<S>> {
    let m = check_dimension(d)?;
    let verdict = lchk_admissible(d)?;
    if !verdict.admissible {
        return Err(Error::NotAdmissible(verdict.notes.join("; ")));
    }
    let a = verdict.a.clone().expect("admissible has a");
    let bs = verdict.imaginary_parts.clone().ok_or(Error::IrrationalNormalization)?;
    let n = d.rows();
    let nd = d.shift(&a);
    let mut columns: Vec<Vector<S>> = Vec::new();
    let mut c_blocks: Vec<S> = Vec::new();
    for (b, _) in &bs {
        // W_b = ker((D - a)² + b²), on which N = (D - a)/b squares to -Id
        let w = nd.mul(&nd).shift(&-(b.clone() * b.clone())).kernel();
        let nmat = nd.scale(&(S::one() / b.clone()));
        let mut local: Vec<Vector<S>> = Vec::new();
        while local.len() < w.len() {
            let Some(x) = w.iter().find(|x| crate::linalg::span_rank(&[local.clone(), vec![(*x).clone()]].concat()) > local.len()).cloned() else {
                break;
            };
            let nx = nmat.mul_vec(&x);
            let mut with_x = local.clone();
            extend_independent(&mut with_x, x.clone());
            extend_independent(&mut with_x, nx.clone());
            let Some(y) = w.iter().find(|y| crate::linalg::span_rank(&[with_x.clone(), vec![(*y).clone()]].concat()) > with_x.len()).cloned() else {
                return Err(Error::WitnessFailure("eigenspace of odd quaternionic dimension".into()));
            };
            let ny = nmat.mul_vec(&y);
            local.extend([x, crate::linalg::vec_scale(&nx, &-S::one()), y, ny]);
            c_blocks.push(b.clone());
        }
        columns.extend(local);
    }
    let w0 = nd.kernel();
    let zero_blocks = (w0.len() - 3) / 4;
    columns.extend(w0.iter().cloned());
    c_blocks.extend(std::iter::repeat(S::zero()).take(zero_blocks));
    let p = Matrix::from_columns(&columns)?;
    if p.rows() != n || p.cols() != n || p.rank() != n {
        return Err(Error::WitnessFailure("canonical basis is not a basis".into()));
    }
    let pinv = p.inverse().expect("full rank");
    let canonical = pinv.mul(d).mul(&p);
    let mut expected = Matrix::identity(n).scale(&a);
    for (i, b) in c_blocks.iter().enumerate() {
        let o = 4 * i;
        expected[(o, o + 1)] = b.clone();
        expected[(o + 1, o)] = -b.clone();
        expected[(o + 2, o + 3)] = -b.clone();
        expected[(o + 3, o + 2)] = b.clone();
    }
    if !canonical.sub(&expected).is_zero() {
        return Err(Error::WitnessFailure("change of basis did not reach the canonical block form".into()));
    }
    let algebra = semidirect(&expected)?;
    let ks = k_matrices::<S>();
    let dim = 4 * m;
    let is: Vec<ComplexStructure<S>> = ks
        .iter()
        .map(|k| ComplexStructure::new(Matrix::block_diagonal(&vec![k.clone(); m])))
        .collect::<Result<_>>()?;
    let g = Metric::identity(dim);
    let mut thetas = Vec::new();
    for (idx, i) in is.iter().enumerate() {
        let h = HermitianStructure::new(algebra.clone(), i.clone(), g.clone())
            .map_err(|e| Error::WitnessFailure(format!("I{} is not an integrable Hermitian structure: {e}", idx + 1)))?;
        if !h.is_lck()? {
            return Err(Error::WitnessFailure(format!("(I{}, g) is not LCK", idx + 1)));
        }
        thetas.push(h.lee_form()?);
    }
    let expected_theta = KForm::basis(dim, &[dim - 1]).scale(&(-(S::from_i64(4 * m as i64 - 2)) * a.clone()));
    if !thetas.iter().all(|t| t.approx_eq(&expected_theta)) {
        return Err(Error::WitnessFailure("Lee forms differ from -(4m-2) a e^{4m}".into()));
    }
    let [i1, i2, i3]: [ComplexStructure<S>; 3] = is.try_into().expect("three structures");
    let triple = HypercomplexTriple { i1, i2, i3, g, theta: expected_theta };
    if !triple.quaternion_relations() {
        return Err(Error::WitnessFailure("quaternion relations fail".into()));
    }
    Ok(LchkWitness { algebra, canonical_d: expected, change_of_basis: p, triple, a, m })
}

/// Flatness of the Levi-Civita connection of a hyperkähler triple.
pub fn hyperkahler_flatness<S: Scalar>(t: &HypercomplexTriple<S>, l: &LieAlgebra<S>) -> Result<bool> {
    for (idx, i) in t.structures().into_iter().enumerate() {
        let h = HermitianStructure::new(l.clone(), i.clone(), t.g.clone())?;
        if !h.is_kahler() {
            return Err(Error::Precondition(format!("(I{}, g) is not Kähler", idx + 1)));
        }
    }
    Ok(levi_civita(l, &t.g)?.is_flat(l))
}

/// Convenience: `D` from the `e_{4m}` column of a semidirect product.
pub fn derivation_of<S: Scalar>(l: &LieAlgebra<S>) -> Matrix<S> {
    let n = l.dim() - 1;
    let ad = l.ad(&unit_vector(n + 1, n)).expect("dimension");
    Matrix::from_fn(n, n, |i, j| ad[(i, j)].clone())
}

#[cfg(test)]
mod tests {
    use super::*;

    type Q = Rational;

    fn q(n: i64) -> Q {
        Q::from_i64(n)
    }

    #[test]
    fn identity_three_is_admissible() {
        let v = lchk_admissible(&Matrix::<Q>::identity(3)).unwrap();
        assert!(v.admissible);
        assert_eq!(v.a, Some(q(1)));
        assert!(!v.hyperkahler);
    }

    #[test]
    fn zero_is_hyperkahler() {
        let v = lchk_admissible(&Matrix::<Q>::zeros(7, 7)).unwrap();
        assert!(v.admissible && v.hyperkahler);
    }

    #[test]
    fn odd_complex_multiplicity_rejected() {
        let mut d = Matrix::<Q>::identity(7);
        d[(0, 1)] = q(1);
        d[(1, 0)] = q(-1);
        let v = lchk_admissible(&d).unwrap();
        assert!(v.condition_i && v.condition_ii && !v.condition_iii);
        assert!(!v.admissible);
        let vf = lchk_admissible(&d.map(|x| x.to_f64())).unwrap();
        assert_eq!(vf.summary().admissible, false);
        assert!(!vf.condition_iii);
    }

    #[test]
    fn jordan_block_is_not_diagonalizable() {
        let mut d = Matrix::<Q>::identity(3);
        d[(0, 1)] = q(1);
        assert!(!lchk_admissible(&d).unwrap().diagonalizable);
    }

    #[test]
    fn bad_dimension() {
        assert!(matches!(lchk_admissible(&Matrix::<Q>::identity(4)), Err(Error::BadDimension(_))));
    }

    #[test]
    fn witness_for_identity() {
        let w = construct_lchk(&Matrix::<Q>::identity(3)).unwrap();
        assert_eq!(w.triple.theta, KForm::basis(4, &[3]).scale(&q(-2)));
        assert!(w.triple.quaternion_relations());
    }

    #[test]
    fn witness_rotates_mixed_blocks() {
        // eigenvalues 1 ± 2i (twice each) and 1 (three times), scrambled by a unimodular change
        let mut d = Matrix::<Q>::identity(7);
        d[(0, 1)] = q(2);
        d[(1, 0)] = q(-2);
        d[(2, 3)] = q(-2);
        d[(3, 2)] = q(2);
        let mut p = Matrix::<Q>::identity(7);
        p[(0, 4)] = q(1);
        p[(2, 6)] = q(-3);
        p[(5, 1)] = q(2);
        let scrambled = p.mul(&d).mul(&p.inverse().unwrap());
        let w = construct_lchk(&scrambled).unwrap();
        assert_eq!(w.canonical_d, d);
    }
}
