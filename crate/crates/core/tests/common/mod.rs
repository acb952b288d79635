#![allow(dead_code)]

use aalg_core::almost_abelian::{standard_j1, HermitianData};
use aalg_core::{Matrix, Rational, Scalar};
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub type Q = Rational;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn q(n: i64) -> Q {
    Q::from_i64(n)
}

pub fn qr(n: i64, d: i64) -> Q {
    Q::from_ratio(n, d)
}

/// Small rationals, zero included.
pub fn small(r: &mut impl Rng) -> Q {
    let num = r.gen_range(-3..=3);
    let den = *[1, 1, 2].choose(r).unwrap();
    qr(num, den)
}

pub fn nonzero(r: &mut impl Rng) -> Q {
    loop {
        let x = small(r);
        if !x.is_zero() {
            return x;
        }
    }
}

/// Square `m × m` with small entries.
pub fn random_matrix(r: &mut impl Rng, m: usize) -> Matrix<Q> {
    Matrix::from_fn(m, m, |_, _| small(r))
}

/// `(X - J X J) / 2`, which commutes with `J` when `J² = -1`.
pub fn j_linear_part(x: &Matrix<Q>, j: &Matrix<Q>) -> Matrix<Q> {
    x.sub(&j.mul(x).mul(j)).scale(&qr(1, 2))
}

/// Diagonal constant on the `J_1` mirror pairs `(k, m-1-k)`.
fn pair_diagonal(vals: &[Q]) -> Matrix<Q> {
    let m = 2 * vals.len();
    Matrix::from_fn(m, m, |i, j| if i == j { vals[i.min(m - 1 - i)].clone() } else { q(0) })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Flavor {
    Generic,
    Kahler,
    Lck,
    Balanced,
    Skt,
    Lcb,
}

pub const FLAVORS: [Flavor; 6] = [Flavor::Generic, Flavor::Kahler, Flavor::Lck, Flavor::Balanced, Flavor::Skt, Flavor::Lcb];

/// Data of real dimension `2n` biased towards `flavor`.
pub fn draw(r: &mut impl Rng, n: usize, flavor: Flavor) -> HermitianData<Q> {
    let m = 2 * n - 2;
    let j1: Matrix<Q> = standard_j1(n);
    let mut a = small(r);
    let mut v: Vec<Q> = (0..m).map(|_| small(r)).collect();
    let zero_v = vec![q(0); m];
    let a_mat = match flavor {
        Flavor::Generic => j_linear_part(&random_matrix(r, m), &j1),
        Flavor::Kahler | Flavor::Lck => {
            let x = random_matrix(r, m);
            let u = j_linear_part(&x.sub(&x.transpose()), &j1);
            v = zero_v;
            if flavor == Flavor::Lck {
                u.shift(&-small(r))
            } else {
                u
            }
        }
        Flavor::Balanced => {
            let x = j_linear_part(&random_matrix(r, m), &j1);
            v = zero_v;
            let tr = x.trace();
            x.shift(&(tr / q(m as i64)))
        }
        Flavor::Skt => {
            if r.gen_bool(0.3) {
                a = q(0);
            }
            let half = -a.clone() / q(2);
            let s: Vec<Q> = (0..n - 1).map(|_| if r.gen_bool(0.5) { half.clone() } else { q(0) }).collect();
            let u: Vec<Q> = (0..n - 1).map(|_| small(r)).collect();
            pair_diagonal(&s).add(&j1.mul(&pair_diagonal(&u)))
        }
        Flavor::Lcb => {
            let mut keep: Vec<Q> = vec![q(1); n - 1];
            keep[r.gen_range(0..n - 1)] = q(0);
            let x = j_linear_part(&random_matrix(r, m), &j1).mul(&pair_diagonal(&keep));
            let ker = x.transpose().kernel();
            v = zero_v;
            for b in &ker {
                let c = small(r);
                v = v.iter().zip(b).map(|(vi, bi)| vi.clone() + c.clone() * bi.clone()).collect();
            }
            x
        }
    };
    HermitianData::new(a, v, a_mat, j1).expect("J_1-linear A")
}

/// Any flavor, real dimension drawn from `dims`.
pub fn draw_any(r: &mut impl Rng, dims: &[usize]) -> HermitianData<Q> {
    let n = dims.choose(r).unwrap() / 2;
    let flavor = *FLAVORS.choose(r).unwrap();
    draw(r, n, flavor)
}
