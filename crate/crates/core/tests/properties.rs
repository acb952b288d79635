mod common;

use aalg_core::almost_abelian::HermitianData;
use aalg_core::catalog;
use aalg_core::hermitian::{ComplexStructure, Metric};
use aalg_core::lattice::{integrality_probe, matrix_exp, TSchedule};
use aalg_core::lchk::{construct_lchk, lchk_admissible};
use aalg_core::linalg::similarity_transform;
use aalg_core::{extract_data, HermitianStructure, KForm, Matrix, Scalar};
use common::{draw, draw_any, q, random_matrix, rng, small, Flavor, FLAVORS, Q};
use proptest::prelude::*;
use rand::seq::SliceRandom;
use rand::Rng;

fn random_form(r: &mut impl Rng, dim: usize, degree: usize) -> KForm<Q> {
    let mut f = KForm::zero(dim, degree);
    let mut idx: Vec<usize> = (0..degree).collect();
    loop {
        if r.gen_bool(0.6) {
            f.add_term(&idx, small(r));
        }
        // next increasing tuple
        let mut k = degree;
        while k > 0 && idx[k - 1] == dim - degree + k - 1 {
            k -= 1;
        }
        if k == 0 {
            return f;
        }
        idx[k - 1] += 1;
        for m in k..degree {
            idx[m] = idx[m - 1] + 1;
        }
    }
}

fn invertible(r: &mut impl Rng, n: usize) -> Matrix<Q> {
    loop {
        let p = random_matrix(r, n).add(&Matrix::identity(n).scale(&q(2)));
        if !p.determinant().is_zero() {
            return p;
        }
    }
}

/// Determinant one with entries of moderate size, so float round-off stays far below ε.
fn well_conditioned(r: &mut impl Rng, n: usize) -> Matrix<Q> {
    let unit = |r: &mut _| q(*[-1, 0, 0, 1].choose(r).unwrap());
    let lower = Matrix::from_fn(n, n, |i, j| if i == j { q(1) } else if i > j { unit(&mut *r) } else { q(0) });
    let upper = Matrix::from_fn(n, n, |i, j| if i == j { q(1) } else if i < j { unit(&mut *r) } else { q(0) });
    lower.mul(&upper)
}

/// The same Hermitian structure in the basis given by the columns of `p`.
fn rebase<S: Scalar>(h: &HermitianStructure<S>, p: &Matrix<S>) -> HermitianStructure<S> {
    let pinv = p.inverse().unwrap();
    let l = h.algebra().change_basis(p).unwrap();
    let j = ComplexStructure::new(pinv.mul(h.complex_structure().matrix()).mul(p)).unwrap();
    let g = Metric::new(p.transpose().mul(h.metric().matrix()).mul(p)).unwrap();
    HermitianStructure::new(l, j, g).unwrap()
}

fn to_float(f: &KForm<Q>) -> KForm<f64> {
    let mut g = KForm::zero(f.dim(), f.degree());
    for (i, x) in f.terms() {
        g.add_term(i, x.to_f64() / 3.0);
    }
    g
}

fn float_data(d: &HermitianData<Q>) -> HermitianData<f64> {
    d.map(|x| x.to_f64())
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 48, ..ProptestConfig::default() })]

    #[test]
    fn wedge_graded_commutative_and_associative(seed in any::<u64>(), p in 0usize..3, k in 0usize..3, m in 0usize..2) {
        let mut r = rng(seed);
        let (a, b, c) = (random_form(&mut r, 5, p), random_form(&mut r, 5, k), random_form(&mut r, 5, m));
        let ab = a.wedge(&b).unwrap();
        let ba = b.wedge(&a).unwrap();
        let sign = if p * k % 2 == 0 { q(1) } else { q(-1) };
        prop_assert_eq!(&ab, &ba.scale(&sign));
        prop_assert_eq!(ab.wedge(&c).unwrap(), a.wedge(&b.wedge(&c).unwrap()).unwrap());

        let (af, bf) = (to_float(&a), to_float(&b));
        let gap = af.wedge(&bf).unwrap().sub(&bf.wedge(&af).unwrap().scale(&sign.to_f64()));
        prop_assert!(gap.max_abs() <= aalg_core::scalar::epsilon());
    }

    #[test]
    fn one_form_differential_on_adapted_basis(seed in any::<u64>()) {
        let mut r = rng(seed);
        let d = draw_any(&mut r, &[4, 6, 8]);
        let (l, _, _) = d.build().unwrap();
        let n = l.dim();
        let alpha: Vec<Q> = (0..n).map(|_| small(&mut r)).collect();
        // dα(X, e_N) = α([e_N, X]), so dα = (ad_{e_N}ᵗ α) ∧ e^N
        let beta = l.ad_basis(n - 1).transpose().mul_vec(&alpha);
        let expected = KForm::one_form(&beta).wedge(&KForm::basis(n, &[n - 1])).unwrap();
        prop_assert_eq!(aalg_core::exterior::ce_differential(&KForm::one_form(&alpha), &l).unwrap(), expected);
    }

    #[test]
    fn trace_of_ad_is_linear_and_unimodularity_is_basis_free(seed in any::<u64>()) {
        let mut r = rng(seed);
        let d = draw_any(&mut r, &[4, 6]);
        let (l, _, _) = d.build().unwrap();
        let n = l.dim();
        let x: Vec<Q> = (0..n).map(|_| small(&mut r)).collect();
        let y: Vec<Q> = (0..n).map(|_| small(&mut r)).collect();
        let c = small(&mut r);
        let xy: Vec<Q> = x.iter().zip(&y).map(|(a, b)| a.clone() * c.clone() + b.clone()).collect();
        let tr = |v: &[Q]| l.ad(v).unwrap().trace();
        prop_assert_eq!(tr(&xy), tr(&x) * c + tr(&y));
        let p = invertible(&mut r, n);
        prop_assert_eq!(l.change_basis(&p).unwrap().is_unimodular(), l.is_unimodular());
    }

    #[test]
    fn lee_form_equation_holds_exactly(seed in any::<u64>()) {
        let mut r = rng(seed);
        let d = draw_any(&mut r, &[4, 6, 8]);
        let h = d.hermitian_structure().unwrap();
        let n = h.half_dim();
        let theta = h.lee_form().unwrap();
        let wn = h.omega().power(n - 1);
        prop_assert_eq!(h.d(&wn), theta.wedge(&wn).unwrap());
        prop_assert_eq!(h.is_lcb().unwrap(), h.d(&theta).is_zero());
        prop_assert_eq!(&theta, &d.lee_form_closed());
    }

    #[test]
    fn lee_form_equation_in_a_random_basis(seed in any::<u64>()) {
        let mut r = rng(seed);
        let (n, flavor) = (2 + r.gen_range(0..2), FLAVORS[r.gen_range(0..6)]);
        let d = draw(&mut r, n, flavor);
        let exact = rebase(&d.hermitian_structure().unwrap(), &invertible(&mut r, d.dim()));
        let theta = exact.lee_form().unwrap();
        let wn = exact.omega().power(exact.half_dim() - 1);
        prop_assert_eq!(exact.d(&wn), theta.wedge(&wn).unwrap());
        prop_assert_eq!(exact.is_lcb().unwrap(), d.is_lcb_data());
        let h = rebase(&d.hermitian_structure().unwrap(), &well_conditioned(&mut r, d.dim()));
        let hf = h.to_float().unwrap();
        let tf = hf.lee_form().unwrap();
        let wf = hf.omega().power(hf.half_dim() - 1);
        prop_assert!(hf.d(&wf).sub(&tf.wedge(&wf).unwrap()).max_abs() <= 1e-8);
    }

    #[test]
    fn bismut_connection_is_hermitian_with_skew_torsion(seed in any::<u64>()) {
        let mut r = rng(seed);
        let d = draw_any(&mut r, &[4, 6]);
        let h = rebase(&d.hermitian_structure().unwrap(), &invertible(&mut r, d.dim()));
        let b = h.bismut();
        prop_assert!(b.preserves_metric(h.metric()));
        prop_assert!(b.preserves(h.complex_structure().matrix()));
        prop_assert!(b.has_skew_torsion(h.algebra(), h.metric()));
    }

    #[test]
    fn vaisman_implies_lck(seed in any::<u64>()) {
        let mut r = rng(seed);
        let (n, flavor) = (2 + r.gen_range(0..2), if r.gen_bool(0.5) { Flavor::Lck } else { Flavor::Generic });
        let d = draw(&mut r, n, flavor);
        let h = d.hermitian_structure().unwrap();
        if h.is_vaisman().unwrap() && !h.lee_form().unwrap().is_zero() {
            prop_assert!(h.is_lck().unwrap());
        }
    }

    #[test]
    fn extract_inverts_build_up_to_gauge(seed in any::<u64>()) {
        let mut r = rng(seed);
        let d = draw_any(&mut r, &[4, 6]);
        let (l, _, _) = d.build().unwrap();
        let ideal = l.find_codim1_abelian_ideal().unwrap();
        prop_assume!(!ideal.ambiguous);
        let h = rebase(&d.hermitian_structure().unwrap(), &well_conditioned(&mut r, d.dim()));
        let e = match extract_data(&h, None) {
            Ok(e) => float_data(&e),
            Err(aalg_core::Error::IrrationalNormalization) => extract_data(&h.to_float().unwrap(), None).unwrap(),
            Err(err) => return Err(TestCaseError::fail(err.to_string())),
        };
        let df = float_data(&d);
        // e_{2n} is fixed up to sign, which flips a, v and A together
        let matches = |sign: f64| {
            let (ce, cd) = (e.a_mat.scale(&sign).char_poly(), df.a_mat.char_poly());
            (e.a - sign * df.a).abs() <= 1e-7 && (0..=cd.coeffs().len()).all(|i| (ce.coeff(i) - cd.coeff(i)).abs() <= 1e-6)
        };
        prop_assert!(matches(1.0) || matches(-1.0), "a = {} vs {}", e.a, df.a);
        let vn = |v: &[f64]| v.iter().map(|x| x * x).sum::<f64>();
        prop_assert!((vn(&e.v) - vn(&df.v)).abs() <= 1e-6, "|v|^2");
    }

    #[test]
    fn lcb_is_type_11_on_draws(seed in any::<u64>()) {
        let mut r = rng(seed);
        let d = draw_any(&mut r, &[4, 6, 8]);
        prop_assert_eq!(d.lcb_iff_11().type_11, d.is_lcb_data());
    }

    #[test]
    fn balanced_unimodular_data_keep_rank_under_any_metric(seed in any::<u64>()) {
        let mut r = rng(seed);
        let n = 2 + r.gen_range(0..2);
        let mut d = draw(&mut r, n, Flavor::Balanced);
        d.a = q(0);
        let h = d.hermitian_structure().unwrap();
        let rank_a = d.a_mat.rank();
        // another J-Hermitian metric: average a random positive form over J
        let n = d.dim();
        let m = invertible(&mut r, n);
        let j = h.complex_structure().matrix().clone();
        let g0 = m.transpose().mul(&m);
        let g = g0.add(&j.transpose().mul(&g0).mul(&j));
        let h2 = HermitianStructure::new(h.algebra().clone(), h.complex_structure().clone(), Metric::new(g).unwrap()).unwrap();
        let e = match extract_data(&h2, None) {
            Ok(e) => float_data(&e),
            Err(_) => extract_data(&h2.to_float().unwrap(), None).unwrap(),
        };
        prop_assert!(e.a.abs() <= 1e-7);
        let va = Matrix::from_fn(e.a_mat.rows(), e.a_mat.cols() + 1, |i, k| if k == 0 { e.v[i] } else { e.a_mat[(i, k - 1)] });
        prop_assert_eq!(va.rank(), rank_a);
        let lcb = e.a_mat.transpose().mul_vec(&e.v).iter().all(|x| x.abs() <= 1e-7);
        if lcb {
            prop_assert!(e.v.iter().all(|x| x.abs() <= 1e-6));
        }
    }

    #[test]
    fn exp_group_law_and_determinant(seed in any::<u64>()) {
        let mut r = rng(seed);
        let n = r.gen_range(1..=5);
        let b = Matrix::from_fn(n, n, |_, _| r.gen_range(-2.0..2.0));
        let (s, t) = (r.gen_range(-1.5..1.5), r.gen_range(-1.5..1.5));
        let lhs = matrix_exp(&b, s + t);
        let rhs = matrix_exp(&b, s).mul(&matrix_exp(&b, t));
        prop_assert!(lhs.sub(&rhs).max_abs() <= 1e-8 * lhs.max_abs().max(1.0));
        let e = (t * b.trace()).exp();
        prop_assert!((matrix_exp(&b, t).determinant() - e).abs() <= 1e-8 * e.max(1.0));
        let zero_trace = b.shift(&(b.trace() / n as f64));
        prop_assert!((matrix_exp(&zero_trace, t).determinant() - 1.0).abs() <= 1e-8);
    }

    #[test]
    fn probe_char_poly_is_elementary_symmetric(seed in any::<u64>()) {
        let mut r = rng(seed);
        let n = r.gen_range(2..=4);
        let lambdas: Vec<i64> = (0..n).map(|_| r.gen_range(-2..=2)).collect();
        let dq = Matrix::diagonal(&lambdas.iter().map(|x| q(*x)).collect::<Vec<_>>());
        let p = invertible(&mut r, n);
        let b = p.mul(&dq).mul(&p.inverse().unwrap());
        let t = r.gen_range(0.1..1.0);
        let rep = integrality_probe(&b, &TSchedule::Grid { a: t, b: t, n: 1 }, 1e-6, false).unwrap();
        // Π (x - e^{tλ}) expanded, constant term first
        let mut coeffs = vec![1.0f64];
        for l in &lambdas {
            let root = (t * *l as f64).exp();
            let mut next = vec![0.0; coeffs.len() + 1];
            for (i, c) in coeffs.iter().enumerate() {
                next[i + 1] += c;
                next[i] -= root * c;
            }
            coeffs = next;
        }
        let got = &rep.entries[0].char_poly;
        prop_assert_eq!(got.len(), coeffs.len());
        for (g, e) in got.iter().zip(&coeffs) {
            prop_assert!((g - e).abs() <= 1e-9 * e.abs().max(1.0), "{:?} vs {:?}", got, coeffs);
        }
    }
}

#[test]
fn every_catalog_algebra_has_a_codim1_abelian_ideal_containing_the_derived_algebra() {
    for e in catalog::catalog() {
        for p in e.samples(2) {
            let l = e.instantiate(&p).unwrap();
            let s = l.find_codim1_abelian_ideal().unwrap_or_else(|| panic!("{}: no ideal", e.name));
            assert!(s.ideal.contains_subspace(&l.derived_algebra()), "{}", e.name);
        }
    }
}

#[test]
fn jacobi_iff_d_squared_zero_on_fifty_fixtures() {
    use aalg_core::exterior::{basis_differentials, ce_differential_raw};
    use aalg_core::StructureConstants;
    let mut r = rng(55);
    let mut seen = [false; 2];
    for i in 0..50 {
        let n = 3 + i % 3;
        let c = if i % 2 == 0 {
            // valid: a random almost abelian algebra
            let m = random_matrix(&mut r, n - 1);
            let mut c = StructureConstants::zeros(n);
            for j in 0..n - 1 {
                let col: Vec<Q> = (0..n).map(|k| if k < n - 1 { m[(k, j)].clone() } else { q(0) }).collect();
                c.set_bracket(n - 1, j, &col);
            }
            c
        } else {
            let mut c = StructureConstants::zeros(n);
            for a in 0..n {
                for b in a + 1..n {
                    let v: Vec<Q> = (0..n).map(|_| if r.gen_bool(0.3) { q(r.gen_range(-1..=1)) } else { q(0) }).collect();
                    c.set_bracket(a, b, &v);
                }
            }
            c
        };
        let dd = basis_differentials(&c).iter().all(|f| ce_differential_raw(f, &c).unwrap().is_zero());
        let jacobi = c.jacobi_violation().is_none();
        assert_eq!(dd, jacobi, "fixture {i}");
        seen[jacobi as usize] = true;
    }
    assert_eq!(seen, [true, true]);
}

#[test]
fn lchk_zero_real_part_iff_kahler_iff_unimodular_with_central_factor() {
    for e in catalog::catalog().iter().filter(|e| e.family == catalog::Family::Lchk && !e.name.contains("-x-")) {
        for p in e.samples(2) {
            let l = e.instantiate(&p).unwrap();
            let d = catalog::ideal_operator(&l).unwrap();
            let w = construct_lchk(&d).unwrap();
            let kahler = w.triple.structures().iter().all(|s| HermitianStructure::new(w.algebra.clone(), (*s).clone(), w.triple.g.clone()).unwrap().is_kahler());
            let a_zero = w.a.is_zero();
            assert_eq!(a_zero, kahler, "{}", e.name);
            assert_eq!(a_zero, w.algebra.is_unimodular(), "{}", e.name);
            if a_zero {
                let v = lchk_admissible(&d).unwrap();
                let m0 = d.rows() - d.rank();
                let extra = usize::from(d.is_zero());
                assert_eq!(w.algebra.center().dim(), m0 + extra, "{}: central factor", e.name);
                assert!(v.hyperkahler);
            }
        }
    }
}

#[test]
fn isomorphic_witness_operators_are_conjugate() {
    let b = Matrix::from_rows(vec![vec![q(1), q(1)], vec![q(0), q(1)]]).unwrap();
    let p = invertible(&mut rng(3), 2);
    let c = p.mul(&b).mul(&p.inverse().unwrap());
    let t = similarity_transform(&b, &c).unwrap();
    assert_eq!(t.mul(&b), c.mul(&t));
    assert!(similarity_transform(&b, &Matrix::identity(2)).is_none());
}
