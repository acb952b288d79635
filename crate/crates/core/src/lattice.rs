//! Necessary condition for lattices in `ℝ^n ⋊_B ℝ`: for some `t ≠ 0`,
//! `exp(tB)` must have integer characteristic and minimal polynomials.
//!
//! Polynomial coefficients of `exp(tB)` are computed spectrally. The exact
//! characteristic and minimal polynomials of `B` give every eigenvalue `λ`
//! together with its algebraic multiplicity and largest Jordan block; `exp`
//! keeps Jordan structure, so the polynomials of `exp(tB)` are products over
//! `e^{tλ}`. Those products are evaluated in double-double arithmetic, which
//! keeps the near-integer tests meaningful when coefficients reach 1e10.

use std::cmp::Ordering;
use std::ops::{Add, Div, Mul, Neg, Sub};

use nalgebra::DMatrix;
use num_bigint::BigInt;
use num_traits::ToPrimitive;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::linalg::Matrix;
use crate::poly::Poly;
use crate::scalar::{rational_from_f64, Rational, Scalar};

/// Unevaluated sum `hi + lo` with `|lo| <= ulp(hi)/2`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct DoubleDouble {
    pub hi: f64,
    pub lo: f64,
}

fn two_sum(a: f64, b: f64) -> (f64, f64) {
    let s = a + b;
    let bb = s - a;
    (s, (a - (s - bb)) + (b - bb))
}

fn quick_two_sum(a: f64, b: f64) -> (f64, f64) {
    let s = a + b;
    (s, b - (s - a))
}

fn two_prod(a: f64, b: f64) -> (f64, f64) {
    let p = a * b;
    (p, a.mul_add(b, -p))
}

const LN2: DoubleDouble = DoubleDouble { hi: 0.6931471805599453, lo: 2.3190468138462996e-17 };
const TWO_PI: DoubleDouble = DoubleDouble { hi: 6.283185307179586, lo: 2.4492935982947064e-16 };
const PI: DoubleDouble = DoubleDouble { hi: std::f64::consts::PI, lo: 1.2246467991473532e-16 };

impl DoubleDouble {
    pub const ZERO: Self = Self { hi: 0.0, lo: 0.0 };
    pub const ONE: Self = Self { hi: 1.0, lo: 0.0 };

    pub fn new(x: f64) -> Self {
        Self { hi: x, lo: 0.0 }
    }

    fn from_parts(hi: f64, lo: f64) -> Self {
        let (hi, lo) = quick_two_sum(hi, lo);
        Self { hi, lo }
    }

    pub fn from_bigint(n: &BigInt) -> Self {
        let hi = n.to_f64().unwrap_or(f64::NAN);
        if !hi.is_finite() {
            return Self::new(hi);
        }
        let rest = n - BigInt::from(hi as i128);
        Self::from_parts(hi, rest.to_f64().unwrap_or(0.0))
    }

    pub fn from_rational(r: &Rational) -> Self {
        Self::from_bigint(r.numer()) / Self::from_bigint(r.denom())
    }

    pub fn to_f64(self) -> f64 {
        self.hi + self.lo
    }

    pub fn abs(self) -> Self {
        if self.hi < 0.0 || (self.hi == 0.0 && self.lo < 0.0) {
            -self
        } else {
            self
        }
    }

    fn ldexp(self, k: i32) -> Self {
        let f = 2f64.powi(k);
        Self { hi: self.hi * f, lo: self.lo * f }
    }

    pub fn round(self) -> Self {
        let n = self.hi.round();
        if n == self.hi {
            Self::from_parts(n, self.lo.round())
        } else if (n - self.hi).abs() == 0.5 {
            // hi sits on a half-integer: lo decides the direction
            let down = self.hi.floor();
            if self.lo > 0.0 {
                Self::new(down + 1.0)
            } else {
                Self::new(down)
            }
        } else {
            Self::new(n)
        }
    }

    pub fn sqrt(self) -> Self {
        if self.hi <= 0.0 {
            return Self::ZERO;
        }
        let q = Self::new(self.hi.sqrt());
        q + (self - q * q) / (q * Self::new(2.0))
    }

    pub fn exp(self) -> Self {
        if self.hi == 0.0 && self.lo == 0.0 {
            return Self::ONE;
        }
        let k = (self.hi / LN2.hi).round();
        let r = (self - LN2 * Self::new(k)).ldexp(-10);
        let mut term = Self::ONE;
        let mut sum = Self::ONE;
        for i in 1..30 {
            term = term * r / Self::new(i as f64);
            sum = sum + term;
            if term.hi.abs() < 1e-36 {
                break;
            }
        }
        for _ in 0..10 {
            sum = sum * sum;
        }
        sum.ldexp(k as i32)
    }

    pub fn ln(self) -> Self {
        let mut y = Self::new(self.hi.ln());
        for _ in 0..3 {
            y = y + self * (-y).exp() - Self::ONE;
        }
        y
    }

    /// `(sin x, cos x)`.
    pub fn sin_cos(self) -> (Self, Self) {
        let k = (self.hi / TWO_PI.hi).round();
        let mut r = self - TWO_PI * Self::new(k);
        if r.hi > PI.hi {
            r = r - TWO_PI;
        } else if r.hi < -PI.hi {
            r = r + TWO_PI;
        }
        // halve 4 times, then double-angle back
        let h = r.ldexp(-4);
        let h2 = h * h;
        let mut s = h;
        let mut c = Self::ONE;
        let mut ts = h;
        let mut tc = Self::ONE;
        for i in 1..30 {
            let i = i as f64;
            ts = -ts * h2 / Self::new((2.0 * i) * (2.0 * i + 1.0));
            tc = -tc * h2 / Self::new((2.0 * i - 1.0) * (2.0 * i));
            s = s + ts;
            c = c + tc;
            if ts.hi.abs() < 1e-36 && tc.hi.abs() < 1e-36 {
                break;
            }
        }
        for _ in 0..4 {
            let s2 = Self::new(2.0) * s * c;
            let c2 = c * c - s * s;
            s = s2;
            c = c2;
        }
        (s, c)
    }
}

impl Add for DoubleDouble {
    type Output = Self;
    fn add(self, b: Self) -> Self {
        let (s, e) = two_sum(self.hi, b.hi);
        let (t, f) = two_sum(self.lo, b.lo);
        let (s, e) = quick_two_sum(s, e + t);
        Self::from_parts(s, e + f)
    }
}

impl Neg for DoubleDouble {
    type Output = Self;
    fn neg(self) -> Self {
        Self { hi: -self.hi, lo: -self.lo }
    }
}

impl Sub for DoubleDouble {
    type Output = Self;
    fn sub(self, b: Self) -> Self {
        self + (-b)
    }
}

impl Mul for DoubleDouble {
    type Output = Self;
    fn mul(self, b: Self) -> Self {
        let (p, e) = two_prod(self.hi, b.hi);
        Self::from_parts(p, e + (self.hi * b.lo + self.lo * b.hi))
    }
}

impl Div for DoubleDouble {
    type Output = Self;
    fn div(self, b: Self) -> Self {
        let q1 = self.hi / b.hi;
        let r = self - b * Self::new(q1);
        let q2 = r.hi / b.hi;
        let r = r - b * Self::new(q2);
        let q3 = r.hi / b.hi;
        let (q1, q2) = quick_two_sum(q1, q2);
        Self { hi: q1, lo: q2 } + Self::new(q3)
    }
}

impl PartialOrd for DoubleDouble {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        match self.hi.partial_cmp(&other.hi) {
            Some(Ordering::Equal) => self.lo.partial_cmp(&other.lo),
            o => o,
        }
    }
}

/// Matrix exponential `exp(tB)` in `f64`: closed form when `tB` splits into
/// `1×1` and rotational `[[α, β], [-β, α]]` blocks, scaling and squaring otherwise.
pub fn matrix_exp(b: &Matrix<f64>, t: f64) -> Matrix<f64> {
    let n = b.rows();
    let m = b.scale(&t);
    if let Some(e) = closed_form_exp(&m) {
        return e;
    }
    let norm = (0..n).map(|i| (0..n).map(|j| m[(i, j)].abs()).sum::<f64>()).fold(0.0, f64::max);
    let s = if norm > 0.5 { (norm / 0.5).log2().ceil() as i32 } else { 0 };
    let a = m.scale(&2f64.powi(-s));
    let mut term = Matrix::identity(n);
    let mut sum = Matrix::identity(n);
    for k in 1..40 {
        term = term.mul(&a).scale(&(1.0 / k as f64));
        sum = sum.add(&term);
        if term.max_abs() <= 1e-18 * sum.max_abs() {
            break;
        }
    }
    for _ in 0..s {
        sum = sum.mul(&sum);
    }
    sum
}

fn closed_form_exp(m: &Matrix<f64>) -> Option<Matrix<f64>> {
    let n = m.rows();
    let mut out = Matrix::zeros(n, n);
    let mut i = 0;
    while i < n {
        let couples_next = i + 1 < n && (m[(i, i + 1)] != 0.0 || m[(i + 1, i)] != 0.0);
        let width = if couples_next { 2 } else { 1 };
        for r in i..i + width {
            for c in 0..n {
                if (c < i || c >= i + width) && (m[(r, c)] != 0.0 || m[(c, r)] != 0.0) {
                    return None;
                }
            }
        }
        if width == 1 {
            out[(i, i)] = m[(i, i)].exp();
        } else {
            let (alpha, beta) = (m[(i, i)], m[(i, i + 1)]);
            if m[(i + 1, i + 1)] != alpha || m[(i + 1, i)] != -beta {
                return None;
            }
            let ea = alpha.exp();
            out[(i, i)] = ea * beta.cos();
            out[(i, i + 1)] = ea * beta.sin();
            out[(i + 1, i)] = -ea * beta.sin();
            out[(i + 1, i + 1)] = ea * beta.cos();
        }
        i += width;
    }
    Some(out)
}

/// Characteristic and minimal polynomials of a float matrix.
pub fn char_min_poly(m: &Matrix<f64>) -> (Poly<f64>, Poly<f64>) {
    (m.char_poly(), m.min_poly())
}

#[derive(Clone, Copy, Debug)]
enum Root {
    Real(DoubleDouble),
    /// `α ± iβ` with `β > 0`.
    Pair(DoubleDouble, DoubleDouble),
}

#[derive(Clone, Copy, Debug)]
struct Eigen {
    root: Root,
    algebraic: usize,
    jordan: usize,
}

/// Eigenvalues of a rational matrix with algebraic multiplicity and largest
/// Jordan block. The flag reports whether any root had to be found numerically.
fn spectrum(b: &Matrix<Rational>) -> (Vec<Eigen>, bool) {
    let chi = b.char_poly();
    let mu = b.min_poly();
    let cd = chi.squarefree_decomposition();
    let md = mu.squarefree_decomposition();
    let mut out = Vec::new();
    let mut numeric = false;
    for (f, alg) in &cd {
        for (g, jor) in &md {
            let h = f.gcd(g);
            if h.is_constant() {
                continue;
            }
            numeric |= roots_of(&h, *alg, *jor, &mut out);
        }
    }
    (out, numeric)
}

fn roots_of(h: &Poly<Rational>, algebraic: usize, jordan: usize, out: &mut Vec<Eigen>) -> bool {
    let roots = h.rational_roots();
    let mut rest = h.clone();
    for r in &roots {
        out.push(Eigen { root: Root::Real(DoubleDouble::from_rational(r)), algebraic, jordan });
        rest = rest.div_rem(&Poly::linear(r.clone())).0;
    }
    match rest.degree() {
        None | Some(0) => false,
        Some(2) => {
            let monic = rest.monic();
            let (c0, c1) = (monic.coeff(0), monic.coeff(1));
            let disc = c1.clone() * c1.clone() - Rational::from_i64(4) * c0;
            let half = DoubleDouble::new(0.5);
            let mid = -DoubleDouble::from_rational(&c1) * half;
            let sq = DoubleDouble::from_rational(&disc.abs()).sqrt() * half;
            if disc.is_positive() {
                out.push(Eigen { root: Root::Real(mid - sq), algebraic, jordan });
                out.push(Eigen { root: Root::Real(mid + sq), algebraic, jordan });
            } else {
                out.push(Eigen { root: Root::Pair(mid, sq), algebraic, jordan });
            }
            false
        }
        Some(d) => {
            let monic = rest.monic();
            let comp = DMatrix::from_fn(d, d, |i, j| {
                if j == d - 1 {
                    -Scalar::to_f64(&monic.coeff(i))
                } else if i == j + 1 {
                    1.0
                } else {
                    0.0
                }
            });
            let mut eig: Vec<_> = comp.complex_eigenvalues().iter().cloned().collect();
            eig.sort_by(|a, b| a.re.partial_cmp(&b.re).unwrap().then(a.im.partial_cmp(&b.im).unwrap()));
            for z in eig {
                if z.im.abs() < 1e-12 {
                    out.push(Eigen { root: Root::Real(DoubleDouble::new(z.re)), algebraic, jordan });
                } else if z.im > 0.0 {
                    out.push(Eigen { root: Root::Pair(DoubleDouble::new(z.re), DoubleDouble::new(z.im)), algebraic, jordan });
                }
            }
            true
        }
    }
}

type DdPoly = Vec<DoubleDouble>;

fn dd_mul(a: &DdPoly, b: &DdPoly) -> DdPoly {
    let mut out = vec![DoubleDouble::ZERO; a.len() + b.len() - 1];
    for (i, x) in a.iter().enumerate() {
        for (j, y) in b.iter().enumerate() {
            out[i + j] = out[i + j] + *x * *y;
        }
    }
    out
}

enum Factor {
    Linear(DoubleDouble),
    Quadratic(DoubleDouble, DoubleDouble),
}

impl Factor {
    fn poly(&self) -> DdPoly {
        match self {
            Factor::Linear(mu) => vec![-*mu, DoubleDouble::ONE],
            Factor::Quadratic(c1, c0) => vec![*c0, *c1, DoubleDouble::ONE],
        }
    }

    fn close(&self, other: &Factor) -> bool {
        let near = |a: DoubleDouble, b: DoubleDouble| (a - b).abs().to_f64() <= 1e-26 * (1.0 + a.abs().to_f64());
        match (self, other) {
            (Factor::Linear(a), Factor::Linear(b)) => near(*a, *b),
            (Factor::Quadratic(a1, a0), Factor::Quadratic(b1, b0)) => near(*a1, *b1) && near(*a0, *b0),
            _ => false,
        }
    }
}

/// Characteristic and minimal polynomial coefficients of `exp(tB)`, lowest degree first.
fn exp_polys(eigs: &[Eigen], t: DoubleDouble) -> (DdPoly, DdPoly) {
    let mut factors: Vec<(Factor, usize, usize)> = Vec::new();
    for e in eigs {
        let f = match e.root {
            Root::Real(l) => Factor::Linear((t * l).exp()),
            Root::Pair(alpha, beta) => {
                let rho = (t * alpha).exp();
                let (s, c) = (t * beta).sin_cos();
                if s.abs().to_f64() <= 1e-28 {
                    // both conjugates land on the same real value
                    let mu = rho * c;
                    factors.push((Factor::Linear(mu), 2 * e.algebraic, e.jordan));
                    continue;
                }
                Factor::Quadratic(-(DoubleDouble::new(2.0) * rho * c), rho * rho)
            }
        };
        factors.push((f, e.algebraic, e.jordan));
    }
    let mut chi: DdPoly = vec![DoubleDouble::ONE];
    for (f, alg, _) in &factors {
        for _ in 0..*alg {
            chi = dd_mul(&chi, &f.poly());
        }
    }
    // merge coinciding values for the minimal polynomial
    let mut merged: Vec<(Factor, usize)> = Vec::new();
    for (f, _, jor) in factors {
        match merged.iter_mut().find(|(g, _)| g.close(&f)) {
            Some((_, j)) => *j = (*j).max(jor),
            None => merged.push((f, jor)),
        }
    }
    let mut min: DdPoly = vec![DoubleDouble::ONE];
    for (f, jor) in &merged {
        for _ in 0..*jor {
            min = dd_mul(&min, &f.poly());
        }
    }
    (chi, min)
}

fn max_deviation(p: &DdPoly) -> f64 {
    p.iter().map(|c| (*c - c.round()).abs().to_f64()).fold(0.0, f64::max)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum Verdict {
    Integer,
    Warn,
    NonInteger,
    /// The available precision cannot separate integer from non-integer.
    Unresolved,
}

/// Which `t` values to test.
#[derive(Clone, Debug, PartialEq)]
pub enum TSchedule {
    /// `t = 2 log k` for `k = 2..=K`.
    TwoLogK { k_max: u64 },
    /// `n` evenly spaced values from `a` to `b` inclusive.
    Grid { a: f64, b: f64, n: usize },
}

impl TSchedule {
    /// Parses `2logk:K=50` or `a:b:n`.
    pub fn parse(s: &str) -> Result<Self> {
        let bad = || Error::Precondition(format!("cannot parse t schedule `{s}`; expected `2logk:K=<int>` or `<a>:<b>:<n>`"));
        if let Some(rest) = s.strip_prefix("2logk:") {
            let k = rest.trim().strip_prefix("K=").ok_or_else(bad)?;
            let k_max: u64 = k.trim().parse().map_err(|_| bad())?;
            if k_max < 2 {
                return Err(bad());
            }
            return Ok(TSchedule::TwoLogK { k_max });
        }
        let parts: Vec<&str> = s.split(':').collect();
        if parts.len() != 3 {
            return Err(bad());
        }
        let a: f64 = parts[0].trim().parse().map_err(|_| bad())?;
        let b: f64 = parts[1].trim().parse().map_err(|_| bad())?;
        let n: usize = parts[2].trim().parse().map_err(|_| bad())?;
        if n == 0 || !a.is_finite() || !b.is_finite() {
            return Err(bad());
        }
        Ok(TSchedule::Grid { a, b, n })
    }

    fn points(&self) -> Vec<(DoubleDouble, String, Option<u64>)> {
        match self {
            TSchedule::TwoLogK { k_max } => (2..=*k_max)
                .map(|k| (DoubleDouble::new(2.0) * DoubleDouble::new(k as f64).ln(), format!("2*ln({k})"), Some(k)))
                .collect(),
            TSchedule::Grid { a, b, n } => (0..*n)
                .map(|i| {
                    let t = if *n == 1 { *a } else { a + (b - a) * i as f64 / (*n - 1) as f64 };
                    (DoubleDouble::new(t), format!("{t:?}"), None)
                })
                .collect(),
        }
    }

    pub fn label(&self) -> String {
        match self {
            TSchedule::TwoLogK { k_max } => format!("2logk:K={k_max}"),
            TSchedule::Grid { a, b, n } => format!("{a:?}:{b:?}:{n}"),
        }
    }
}

/// `k²(k² + a₂) + a₁` for a cubic minimal polynomial at `t = 2 log k`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ResidualCheck {
    pub value: f64,
    pub expected: f64,
    pub deviation: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct TReport {
    pub t: f64,
    pub t_label: String,
    pub char_poly: Vec<f64>,
    pub min_poly: Vec<f64>,
    pub char_deviation: f64,
    pub min_deviation: f64,
    pub verdict: Verdict,
    /// Largest relative gap between the spectral characteristic polynomial and
    /// Faddeev–LeVerrier applied to the float `exp(tB)`.
    pub cross_check_deviation: f64,
    pub residual: Option<ResidualCheck>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE", tag = "status")]
pub enum Overall {
    Found { t0: f64, t_label: String },
    NoneInRange,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct IntegralityReport {
    pub schedule: String,
    pub eps_int: f64,
    pub numeric_roots: bool,
    pub entries: Vec<TReport>,
    pub overall: Overall,
}

pub const DEFAULT_EPS_INT: f64 = 1e-6;

/// Runs the integrality probe. Only the necessary condition is tested: a `FOUND`
/// result means both polynomials are integral at some `t ≠ 0`, not that a lattice exists.
pub fn integrality_probe<S: Scalar>(b: &Matrix<S>, schedule: &TSchedule, eps_int: f64, residual: bool) -> Result<IntegralityReport> {
    if !b.is_square() {
        return Err(Error::DimensionMismatch { expected: b.rows(), found: b.cols() });
    }
    let bq: Matrix<Rational> = b.map(|x| x.to_rational().or_else(|| rational_from_f64(x.to_f64())).unwrap_or_else(<Rational as Scalar>::zero));
    let bf = b.map(|x| x.to_f64());
    let (eigs, numeric) = spectrum(&bq);
    let mut entries = Vec::new();
    let mut overall = Overall::NoneInRange;
    for (t, label, k) in schedule.points() {
        let (chi, min) = exp_polys(&eigs, t);
        let char_deviation = max_deviation(&chi);
        let min_deviation = max_deviation(&min);
        let dev = char_deviation.max(min_deviation);
        let scale = chi.iter().chain(&min).map(|c| c.abs().to_f64()).fold(1.0, f64::max);
        let error_bound = if numeric { 1e-10 * scale } else { 1e-20 * scale };
        let verdict = if error_bound > eps_int && dev <= 10.0 * eps_int + error_bound {
            Verdict::Unresolved
        } else if dev <= eps_int {
            Verdict::Integer
        } else if dev <= 10.0 * eps_int {
            Verdict::Warn
        } else {
            Verdict::NonInteger
        };
        let e = matrix_exp(&bf, t.to_f64());
        let fl = e.char_poly();
        let cross_check_deviation = chi
            .iter()
            .enumerate()
            .map(|(i, c)| (fl.coeff(i) - c.to_f64()).abs() / (1.0 + c.abs().to_f64()))
            .fold(0.0, f64::max);
        let residual = match (residual, k) {
            (true, Some(k)) if min.len() == 4 => {
                let kk = DoubleDouble::new((k * k) as f64);
                let value = kk * (kk + min[2]) + min[1];
                let expected = DoubleDouble::ONE / DoubleDouble::new(k as f64);
                Some(ResidualCheck { value: value.to_f64(), expected: expected.to_f64(), deviation: (value - expected).abs().to_f64() })
            }
            _ => None,
        };
        if verdict == Verdict::Integer && t.abs().to_f64() > 0.0 && overall == Overall::NoneInRange {
            overall = Overall::Found { t0: t.to_f64(), t_label: label.clone() };
        }
        entries.push(TReport {
            t: t.to_f64(),
            t_label: label,
            char_poly: chi.iter().map(|c| c.to_f64()).collect(),
            min_poly: min.iter().map(|c| c.to_f64()).collect(),
            char_deviation,
            min_deviation,
            verdict,
            cross_check_deviation,
            residual,
        });
    }
    Ok(IntegralityReport { schedule: schedule.label(), eps_int, numeric_roots: numeric, entries, overall })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn dd(x: f64) -> DoubleDouble {
        DoubleDouble::new(x)
    }

    #[test]
    fn double_double_exp_ln_roundtrip() {
        let x = dd(50.0).ln();
        let back = x.exp();
        assert!((back - dd(50.0)).abs().to_f64() < 1e-26);
        // 50^6 via exp(6 ln 50) is exact to far below one unit
        let p = (dd(6.0) * x).exp();
        assert!((p - dd(15_625_000_000.0)).abs().to_f64() < 1e-15);
    }

    #[test]
    fn double_double_sin_cos() {
        let (s, c) = dd(1.0).sin_cos();
        assert!((s * s + c * c - DoubleDouble::ONE).abs().to_f64() < 1e-30);
        assert!((s.to_f64() - 1f64.sin()).abs() < 1e-16);
        let (s, _) = PI.sin_cos();
        assert!(s.abs().to_f64() < 1e-30);
    }

    #[test]
    fn round_handles_tiny_tails() {
        let x = DoubleDouble::from_parts(3.0, -1e-20);
        assert_eq!(x.round().to_f64(), 3.0);
        assert!((x - x.round()).abs().to_f64() < 1e-19);
    }

    #[test]
    fn exp_at_zero_is_identity() {
        let b = Matrix::from_rows(vec![vec![1.0, 2.0], vec![3.0, 4.0]]).unwrap();
        assert_eq!(matrix_exp(&b, 0.0), Matrix::identity(2));
    }

    #[test]
    fn exp_of_nilpotent_truncates() {
        let n = Matrix::from_rows(vec![vec![0.0, 1.0], vec![0.0, 0.0]]).unwrap();
        let e = matrix_exp(&n, 2.5);
        assert!(e.sub(&Matrix::from_rows(vec![vec![1.0, 2.5], vec![0.0, 1.0]]).unwrap()).max_abs() < 1e-15);
    }

    #[test]
    fn schedule_parsing() {
        assert_eq!(TSchedule::parse("2logk:K=50").unwrap(), TSchedule::TwoLogK { k_max: 50 });
        assert_eq!(TSchedule::parse("0:1:5").unwrap(), TSchedule::Grid { a: 0.0, b: 1.0, n: 5 });
        assert!(TSchedule::parse("2logk:50").is_err());
    }

    #[test]
    fn zero_matrix_is_integral_everywhere() {
        let b = Matrix::<Rational>::zeros(3, 3);
        let r = integrality_probe(&b, &TSchedule::Grid { a: 0.5, b: 2.0, n: 4 }, DEFAULT_EPS_INT, false).unwrap();
        assert!(r.entries.iter().all(|e| e.verdict == Verdict::Integer));
        assert!(matches!(r.overall, Overall::Found { .. }));
    }
}
