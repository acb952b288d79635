//! Acceptance suite: one line per criterion, non-zero exit if any fails.

mod common;

use std::time::Instant;

use aalg_core::catalog::{self, Family, LchkExpectation, Witness};
use aalg_core::document::{parse_manifest, render_manifest};
use aalg_core::exterior::{basis_differentials, ce_differential_raw};
use aalg_core::hermitian::{is_integrable, is_type_11, levi_civita};
use aalg_core::lattice::{integrality_probe, matrix_exp, Overall, TSchedule, Verdict};
use aalg_core::lchk::{construct_lchk, lchk_admissible};
use aalg_core::{HermitianStructure, KForm, Matrix, Scalar, StructureConstants};
use common::{draw, draw_any, q, qr, rng, Flavor, Q};
use rand::Rng;

type Outcome = Result<String, String>;

fn ensure(ok: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if ok {
        Ok(())
    } else {
        Err(msg())
    }
}

fn criterion_1() -> Outcome {
    let mut r = rng(101);
    let (mut disagree, mut positive) = (0, 0);
    for _ in 0..500 {
        let d = draw_any(&mut r, &[4, 6, 8]);
        let h = d.hermitian_structure().map_err(|e| e.to_string())?;
        let theta = h.lee_form().map_err(|e| e.to_string())?;
        let direct = h.d(&theta).is_zero();
        if direct != d.is_lcb_data() {
            disagree += 1;
        }
        positive += direct as usize;
    }
    ensure(disagree == 0, || format!("{disagree} disagreements in 500 draws"))?;
    ensure(positive > 50 && positive < 450, || format!("degenerate sample: {positive}/500 LCB"))?;
    Ok(format!("0 disagreements in 500 draws ({positive} LCB)"))
}

fn criterion_2() -> Outcome {
    let mut r = rng(202);
    let mut worst = 0.0f64;
    let mut lcb = 0;
    for i in 0..100 {
        let d = draw_any(&mut r, &[4, 6, 8]);
        let closed = d.rho_b_closed();
        let oracle = d.hermitian_structure().map_err(|e| e.to_string())?.bismut_ricci_oracle();
        ensure(closed == oracle, || format!("draw {i}: exact closed form {closed} != oracle {oracle}"))?;
        let df = d.map(|x| x.to_f64());
        let of = df.hermitian_structure().map_err(|e| e.to_string())?.bismut_ricci_oracle();
        worst = worst.max(df.rho_b_closed().sub(&of).max_abs());
        let t11 = is_type_11(&closed, &d.j_adapted());
        ensure(t11 == d.is_lcb_data(), || format!("draw {i}: type (1,1) = {t11} but LCB data = {}", d.is_lcb_data()))?;
        lcb += t11 as usize;
    }
    ensure(worst <= 1e-8, || format!("float residual {worst:e} > 1e-8"))?;
    Ok(format!("100 exact equalities, float residual {worst:.1e}, {lcb} of type (1,1)"))
}

fn criterion_3() -> Outcome {
    let mut r = rng(303);
    let mut hits = [0usize; 5];
    for i in 0..500 {
        let d = draw_any(&mut r, &[4, 6, 8]);
        let dv = d.data_verdicts();
        let h = d.hermitian_structure().map_err(|e| e.to_string())?;
        let direct = [h.is_kahler(), h.is_balanced(), h.is_lck().map_err(|e| e.to_string())?, h.is_lcb().map_err(|e| e.to_string())?, h.is_skt()];
        let data = [dv.kahler, dv.balanced, dv.lck, dv.lcb, dv.skt];
        ensure(direct == data, || format!("draw {i}: direct {direct:?} vs data {data:?} (kahler, balanced, lck, lcb, skt)"))?;
        for (k, x) in data.iter().enumerate() {
            hits[k] += *x as usize;
        }
    }
    ensure(hits.iter().all(|&h| h > 0), || format!("some predicate never true: {hits:?}"))?;
    Ok(format!("500 draws agree; true counts kahler/balanced/lck/lcb/skt = {hits:?}"))
}

fn criterion_4() -> Outcome {
    let mut entries = 0;
    let mut loci = 0;
    for e in catalog::catalog().iter().filter(|e| matches!(e.family, Family::Lck | Family::Lcb | Family::LcbNilpotent)) {
        let rep = catalog::verify_entry(e, 3);
        let failures: Vec<String> = rep
            .samples
            .iter()
            .flat_map(|s| s.checks.iter().filter(|c| c.status == catalog::Status::Fail).map(move |c| format!("[{}] {}: {}", s.params, c.name, c.detail)))
            .collect();
        ensure(rep.passed, || format!("{}: {}", e.name, failures.join("; ")))?;
        let samples = e.samples(3);
        let on = samples.iter().filter(|p| e.is_unimodular_claimed(p)).count();
        let off = samples.len() - on;
        if e.params.is_empty() {
            ensure(samples.len() == 1, || format!("{}: parameterless entry sampled {} times", e.name, samples.len()))?;
        } else {
            ensure(samples.len() >= 3, || format!("{}: only {} samples", e.name, samples.len()))?;
        }
        if !matches!(e.unimodular_claim, "never" | "always") {
            loci += 1;
            ensure(on >= 1 && off >= 3, || format!("{}: {on} on-locus and {off} off-locus samples", e.name))?;
        }
        entries += 1;
    }
    ensure(entries == 6 + 17 + 2, || format!("expected 25 entries, found {entries}"))?;
    ensure(loci == 3 + 8, || format!("expected 11 unimodular loci (3 LCK + 8 LCB), found {loci}"))?;
    Ok(format!("{entries} entries pass, {loci} unimodular loci hit and missed"))
}

fn structures(name: &str, params: &[Q]) -> Result<Vec<(&'static str, HermitianStructure<Q>)>, String> {
    match catalog::find(name).and_then(|e| e.witness(params)).map_err(|e| e.to_string())? {
        Witness::Structures(s) => Ok(s),
        _ => Err(format!("{name}: not an example entry")),
    }
}

fn one_form(n: usize, idx: &[usize]) -> KForm<Q> {
    let mut c = vec![q(0); n];
    for i in idx {
        c[i - 1] = q(1);
    }
    KForm::one_form(&c)
}

fn criterion_5() -> Outcome {
    let e = |x: aalg_core::Error| x.to_string();
    let b2 = structures("b2", &[])?;
    let (g, gp) = (&b2[0].1, &b2[1].1);
    ensure(g.is_balanced(), || "b2: g not balanced".into())?;
    ensure(gp.is_lcb().map_err(e)? && !gp.is_balanced(), || "b2: g' not a non-balanced LCB metric".into())?;
    let theta = gp.lee_form().map_err(e)?;
    ensure(theta == one_form(6, &[5, 6]), || format!("b2: theta' = {theta}"))?;

    let aff = structures("aff2+2R", &[])?;
    let (g, gp) = (&aff[0].1, &aff[1].1);
    ensure(g.is_kahler(), || "aff2+2R: g not Kähler".into())?;
    ensure(gp.is_lck().map_err(e)? && !gp.is_kahler(), || "aff2+2R: g' not LCK non-Kähler".into())?;
    let rhs = one_form(4, &[2, 4]).wedge(gp.omega()).map_err(e)?;
    ensure(gp.d_omega() == &rhs, || format!("aff2+2R: d omega' = {} vs {}", gp.d_omega(), rhs))?;

    for name in ["s4", "s6", "s8"] {
        let params: Vec<Q> = catalog::find(name).map_err(e)?.params.iter().map(|_| q(1)).collect();
        let s = structures(name, &params)?;
        let h = &s[0].1;
        ensure(h.is_skt() && h.is_lcb().map_err(e)?, || format!("{name}: not both SKT and LCB"))?;
        let d = aalg_core::extract_data(h, None).map_err(e)?;
        ensure(d.v.iter().all(|x| x.is_zero()), || format!("{name}: v = {:?}", d.v))?;
    }
    Ok("b2 theta' = f5 + f6, aff2+2R d omega' = (f2 + f4) ^ omega', s4/s6/s8 SKT and LCB with v = 0".into())
}

fn criterion_6() -> Outcome {
    let mut r = rng(606);
    let mut with_a = 0;
    for i in 0..200 {
        let n = r.gen_range(2..=4);
        let d = draw(&mut r, n, Flavor::Skt);
        ensure(d.is_skt_data(), || format!("draw {i}: generator produced non-SKT data"))?;
        let out = d.skt_to_lcb().map_err(|e| e.to_string())?;
        ensure(out.is_lcb_data(), || format!("draw {i}: output not LCB"))?;
        if !d.a.is_zero() {
            with_a += 1;
            ensure(out.v.iter().all(|x| x.is_zero()), || format!("draw {i}: a != 0 but v' = {:?}", out.v))?;
        }
        // the new metric on the original algebra and J, checked through the Lee form
        let (l, j, _) = d.build().map_err(|e| e.to_string())?;
        let g = aalg_core::Metric::new(out.metric_in_original().map_err(|e| e.to_string())?).map_err(|e| e.to_string())?;
        let h = HermitianStructure::new(l, j, g).map_err(|e| e.to_string())?;
        ensure(h.is_lcb().map_err(|e| e.to_string())?, || format!("draw {i}: transformed metric not LCB directly"))?;
    }
    ensure(with_a > 50, || format!("only {with_a} draws with a != 0"))?;
    Ok(format!("200 SKT draws become LCB ({with_a} with a != 0, all v' = 0)"))
}

fn criterion_7() -> Outcome {
    let e = |x: aalg_core::Error| x.to_string();
    let (mut admissible, mut rejected, mut flat) = (0, 0, 0);
    for entry in catalog::catalog().iter().filter(|x| x.family == Family::Lchk) {
        for p in entry.samples(3) {
            let l = entry.instantiate(&p).map_err(e)?;
            let d = catalog::ideal_operator(&l).map_err(e)?;
            let v = lchk_admissible(&d).map_err(e)?;
            let expect = match entry.name {
                n if n.contains("-x-") => LchkExpectation::Rejected,
                n => LchkExpectation::Admissible { hyperkahler: n.contains("-hk") },
            };
            let tag = format!("{} {}", entry.name, entry.params_label(&p));
            match expect {
                LchkExpectation::Rejected => {
                    ensure(!v.admissible && (!v.condition_ii || !v.condition_iii || !v.diagonalizable || !v.condition_i), || format!("{tag}: not rejected"))?;
                    rejected += 1;
                }
                LchkExpectation::Admissible { hyperkahler } => {
                    ensure(v.admissible && v.hyperkahler == hyperkahler, || format!("{tag}: verdict {:?}", v.summary()))?;
                    let w = construct_lchk(&d).map_err(e)?;
                    let t = &w.triple;
                    let [i1, i2, i3] = t.structures().map(|s| s.matrix().clone());
                    let cyclic = i1.mul(&i2) == i3 && i2.mul(&i3) == i1 && i3.mul(&i1) == i2;
                    ensure(cyclic, || format!("{tag}: quaternion relations fail"))?;
                    let n = 4 * w.m;
                    let theta = KForm::basis(n, &[n - 1]).scale(&(-q(4 * w.m as i64 - 2) * w.a.clone()));
                    for s in t.structures() {
                        ensure(is_integrable(s, &w.algebra).map_err(e)?, || format!("{tag}: structure not integrable"))?;
                        let h = HermitianStructure::new(w.algebra.clone(), s.clone(), t.g.clone()).map_err(e)?;
                        let lee = h.lee_form().map_err(e)?;
                        ensure(lee == theta && h.d(&lee).is_zero() && h.is_lck().map_err(e)?, || format!("{tag}: Lee form {lee} vs {theta}"))?;
                    }
                    if hyperkahler {
                        ensure(levi_civita(&w.algebra, &t.g).map_err(e)?.is_flat(&w.algebra), || format!("{tag}: curvature nonzero"))?;
                        flat += 1;
                    }
                    admissible += 1;
                }
            }
        }
    }
    Ok(format!("{admissible} admissible samples ({flat} hyperkähler, flat), {rejected} counterexamples rejected"))
}

fn l1_residuals(p: Q) -> Outcome {
    let qv = qr(-1, 2) - p.clone();
    let l = catalog::find("l1").and_then(|e| e.instantiate(&[p.clone(), qv.clone()])).map_err(|e| e.to_string())?;
    let b = catalog::ideal_operator(&l).map_err(|e| e.to_string())?;
    let rep = integrality_probe(&b, &TSchedule::TwoLogK { k_max: 50 }, 1e-6, true).map_err(|e| e.to_string())?;
    ensure(rep.overall == Overall::NoneInRange, || format!("p = {p}: {:?}", rep.overall))?;
    let (pf, qf) = (p.to_f64(), qv.to_f64());
    let mut worst = 0.0f64;
    for (i, t) in rep.entries.iter().enumerate() {
        let k = (i + 2) as f64;
        ensure(t.verdict == Verdict::NonInteger, || format!("p = {p}, k = {k}: verdict {:?}", t.verdict))?;
        // minimal polynomial of exp(tB) from its three distinct eigenvalues
        let (x, y, z) = (k * k, k.powf(2.0 * pf), k.powf(2.0 * qf));
        let expect = [-x * y * z, x * y + y * z + x * z, -(x + y + z), 1.0];
        for (c, e) in t.min_poly.iter().zip(expect) {
            ensure((c - e).abs() <= 1e-9 * e.abs().max(1.0), || format!("p = {p}, k = {k}: min poly {:?} vs {expect:?}", t.min_poly))?;
        }
        let res = t.residual.as_ref().ok_or_else(|| format!("p = {p}, k = {k}: no residual"))?;
        ensure(res.deviation <= 1e-9 && (res.expected - 1.0 / k).abs() <= 1e-15, || format!("p = {p}, k = {k}: residual {res:?}"))?;
        worst = worst.max(res.deviation);
    }
    Ok(format!("{worst:.1e}"))
}

fn criterion_8() -> Outcome {
    let mut worst = Vec::new();
    for p in [qr(1, 3), qr(1, 2), q(2)] {
        worst.push(l1_residuals(p)?);
    }
    // B = log [[2,1],[1,1]] from the orthonormal eigenbasis of the symmetric matrix
    let s5 = 5f64.sqrt();
    let (lp, lm) = ((3.0 + s5) / 2.0, (3.0 - s5) / 2.0);
    let u = [1.0 / (1.0 + ((lp - 2.0) * (lp - 2.0))).sqrt(), 0.0];
    let u = [u[0], (lp - 2.0) * u[0]];
    let w = [-u[1], u[0]];
    let b = Matrix::from_fn(2, 2, |i, j| lp.ln() * u[i] * u[j] + lm.ln() * w[i] * w[j]);
    let rep = integrality_probe(&b, &TSchedule::Grid { a: 0.0, b: 2.0, n: 5 }, 1e-6, false).map_err(|e| e.to_string())?;
    let hit = match &rep.overall {
        Overall::Found { t0, .. } => *t0,
        Overall::NoneInRange => return Err("log fixture: nothing found".into()),
    };
    ensure(hit == 1.0, || format!("log fixture: found at t = {hit}"))?;
    let at1 = rep.entries.iter().find(|t| t.t == 1.0).ok_or("no t = 1 entry")?;
    let cp = &at1.char_poly;
    ensure(cp.len() == 3 && (cp[0] - 1.0).abs() < 1e-9 && (cp[1] + 3.0).abs() < 1e-9 && (cp[2] - 1.0).abs() < 1e-9, || format!("char poly at t = 1: {cp:?}"))?;
    Ok(format!("l1 (p = 1/3, 1/2, 2) none integral for k = 2..50, residual max {}; log fixture FOUND at t = 1 with x^2 - 3x + 1", worst.join("/")))
}

fn criterion_9() -> Outcome {
    // d∘d = 0 ⟺ Jacobi
    let mut r = rng(909);
    let mut fixtures: Vec<StructureConstants<Q>> = catalog::catalog()
        .iter()
        .filter_map(|e| e.instantiate(&e.samples(1)[0]).ok())
        .map(|l| l.constants().clone())
        .collect();
    let valid_count = fixtures.len();
    for _ in 0..50 {
        let n = r.gen_range(3..=5);
        let mut c = StructureConstants::zeros(n);
        for i in 0..n {
            for j in i + 1..n {
                let v: Vec<Q> = (0..n).map(|_| if r.gen_bool(0.25) { q(r.gen_range(-1..=1)) } else { q(0) }).collect();
                c.set_bracket(i, j, &v);
            }
        }
        fixtures.push(c);
    }
    let mut jacobi = [0usize; 2];
    for (i, c) in fixtures.iter().enumerate() {
        let dd = basis_differentials(c).iter().all(|f| ce_differential_raw(f, c).map(|x| x.is_zero()).unwrap_or(false));
        let jac = c.jacobi_violation().is_none();
        ensure(dd == jac, || format!("fixture {i}: d∘d = 0 is {dd}, Jacobi is {jac}"))?;
        jacobi[jac as usize] += 1;
    }
    ensure(jacobi[0] > 0 && jacobi[1] > valid_count, || format!("fixture mix {jacobi:?}"))?;

    // exp group law and determinant identity
    let mut worst = 0.0f64;
    for _ in 0..200 {
        let n = r.gen_range(2..=5);
        let b = Matrix::from_fn(n, n, |_, _| r.gen_range(-1.5..1.5));
        let (s, t) = (r.gen_range(-1.0..1.0), r.gen_range(-1.0..1.0));
        let lhs = matrix_exp(&b, s + t);
        let rhs = matrix_exp(&b, s).mul(&matrix_exp(&b, t));
        let scale = lhs.max_abs().max(1.0);
        worst = worst.max(lhs.sub(&rhs).max_abs() / scale);
        let det = matrix_exp(&b, t).determinant();
        let e = (t * b.trace()).exp();
        worst = worst.max((det - e).abs() / e.max(1.0));
    }
    ensure(worst <= 1e-8, || format!("exp identities off by {worst:e}"))?;

    let shipped = include_str!("../data/catalog.alg");
    let docs = parse_manifest(shipped).map_err(|e| e.to_string())?;
    ensure(render_manifest(&docs) == shipped, || "manifest does not round-trip byte-identically".into())?;
    ensure(docs.len() == catalog::catalog().len(), || "manifest entry count differs from catalog".into())?;
    Ok(format!("{} fixtures ({} Jacobi, {} not), exp identities within {worst:.1e}, {} manifest documents round-trip", fixtures.len(), jacobi[1], jacobi[0], docs.len()))
}

fn main() {
    let criteria: [(&str, fn() -> Outcome); 9] = [
        ("LCB criterion equivalence", criterion_1),
        ("Bismut-Ricci cross-validation", criterion_2),
        ("predicate concordance", criterion_3),
        ("catalog reproduction", criterion_4),
        ("worked examples", criterion_5),
        ("SKT to LCB construction", criterion_6),
        ("LCHK suite", criterion_7),
        ("lattice probe", criterion_8),
        ("kernel soundness", criterion_9),
    ];
    let mut failed = 0;
    for (i, (name, f)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let out = std::panic::catch_unwind(f).unwrap_or_else(|_| Err("panicked".into()));
        let secs = start.elapsed().as_secs_f64();
        match out {
            Ok(detail) => println!("criterion {} {name}: PASS ({secs:.1}s) {detail}", i + 1),
            Err(why) => {
                failed += 1;
                println!("criterion {} {name}: FAIL ({secs:.1}s) {why}", i + 1);
            }
        }
    }
    if failed > 0 {
        std::process::exit(1);
    }
}
