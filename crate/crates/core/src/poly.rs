//! Univariate polynomials with coefficients stored lowest degree first.

use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{Signed, ToPrimitive};

use crate::scalar::{format_scalar, Rational, Scalar};

#[derive(Clone, PartialEq)]
pub struct Poly<S> {
    coeffs: Vec<S>,
}

impl<S: Scalar> Poly<S> {
    pub fn new(mut coeffs: Vec<S>) -> Self {
        while coeffs.last().is_some_and(|c| *c == S::zero() || (!S::is_exact() && c.is_zero())) {
            coeffs.pop();
        }
        Self { coeffs }
    }

    pub fn zero() -> Self {
        Self { coeffs: Vec::new() }
    }

    pub fn constant(c: S) -> Self {
        Self::new(vec![c])
    }

    pub fn one() -> Self {
        Self::constant(S::one())
    }

    /// `x - root`.
    pub fn linear(root: S) -> Self {
        Self::new(vec![-root, S::one()])
    }

    pub fn coeffs(&self) -> &[S] {
        &self.coeffs
    }

    pub fn coeff(&self, i: usize) -> S {
        self.coeffs.get(i).cloned().unwrap_or_else(S::zero)
    }

    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn is_constant(&self) -> bool {
        self.coeffs.len() <= 1
    }

    pub fn leading(&self) -> S {
        self.coeffs.last().cloned().unwrap_or_else(S::zero)
    }

    pub fn add(&self, other: &Self) -> Self {
        let n = self.coeffs.len().max(other.coeffs.len());
        Self::new((0..n).map(|i| self.coeff(i) + other.coeff(i)).collect())
    }

    pub fn sub(&self, other: &Self) -> Self {
        let n = self.coeffs.len().max(other.coeffs.len());
        Self::new((0..n).map(|i| self.coeff(i) - other.coeff(i)).collect())
    }

    pub fn mul(&self, other: &Self) -> Self {
        if self.is_zero() || other.is_zero() {
            return Self::zero();
        }
        let mut out = vec![S::zero(); self.coeffs.len() + other.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            for (j, b) in other.coeffs.iter().enumerate() {
                out[i + j] = out[i + j].clone() + a.clone() * b.clone();
            }
        }
        Self::new(out)
    }

    pub fn scale(&self, s: &S) -> Self {
        Self::new(self.coeffs.iter().map(|c| c.clone() * s.clone()).collect())
    }

    pub fn pow(&self, k: usize) -> Self {
        (0..k).fold(Self::one(), |acc, _| acc.mul(self))
    }

    pub fn monic(&self) -> Self {
        if self.is_zero() {
            return Self::zero();
        }
        let l = self.leading();
        self.scale(&(S::one() / l))
    }

    pub fn div_rem(&self, divisor: &Self) -> (Self, Self) {
        assert!(!divisor.is_zero(), "polynomial division by zero");
        let dd = divisor.degree().unwrap();
        let lead = divisor.leading();
        let mut rem = self.coeffs.clone();
        if rem.len() <= dd {
            return (Self::zero(), self.clone());
        }
        let mut quot = vec![S::zero(); rem.len() - dd];
        for k in (0..quot.len()).rev() {
            let c = rem[k + dd].clone() / lead.clone();
            for (j, d) in divisor.coeffs.iter().enumerate() {
                rem[k + j] = rem[k + j].clone() - c.clone() * d.clone();
            }
            rem[k + dd] = S::zero();
            quot[k] = c;
        }
        rem.truncate(dd);
        (Self::new(quot), Self::new(rem))
    }

    /// Monic greatest common divisor.
    pub fn gcd(&self, other: &Self) -> Self {
        let (mut a, mut b) = (self.clone(), other.clone());
        while !b.is_zero() {
            let r = a.div_rem(&b).1;
            a = b;
            b = r;
        }
        a.monic()
    }

    pub fn derivative(&self) -> Self {
        Self::new(self.coeffs.iter().enumerate().skip(1).map(|(i, c)| c.clone() * S::from_i64(i as i64)).collect())
    }

    pub fn eval(&self, x: &S) -> S {
        self.coeffs.iter().rev().fold(S::zero(), |acc, c| acc * x.clone() + c.clone())
    }

    /// `p(x + a)`.
    pub fn shift(&self, a: &S) -> Self {
        let lin = Self::new(vec![a.clone(), S::one()]);
        self.coeffs.iter().rev().fold(Self::zero(), |acc, c| acc.mul(&lin).add(&Self::constant(c.clone())))
    }

    /// Whether `gcd(p, p')` is constant.
    pub fn is_squarefree(&self) -> bool {
        self.gcd(&self.derivative()).is_constant()
    }

    /// Multiplicity of zero as a root.
    pub fn zero_multiplicity(&self) -> usize {
        self.coeffs.iter().take_while(|c| c.is_zero()).count()
    }

    /// Writes `p(y) = q(y^2)` when only even powers occur.
    pub fn in_square_variable(&self) -> Option<Self> {
        if self.coeffs.iter().enumerate().any(|(i, c)| i % 2 == 1 && !c.is_zero()) {
            return None;
        }
        Some(Self::new(self.coeffs.iter().step_by(2).cloned().collect()))
    }

    pub fn map<T: Scalar>(&self, f: impl Fn(&S) -> T) -> Poly<T> {
        Poly::new(self.coeffs.iter().map(f).collect())
    }
}

impl Poly<Rational> {
    /// Yun's square-free factorization of a monic polynomial:
    /// `p = prod_i f_i^i` with each `f_i` square-free and pairwise coprime.
    /// Only factors of positive degree are returned.
    pub fn squarefree_decomposition(&self) -> Vec<(Poly<Rational>, usize)> {
        let p = self.monic();
        if p.is_constant() {
            return Vec::new();
        }
        let mut out = Vec::new();
        let dp = p.derivative();
        let a = p.gcd(&dp);
        let mut b = p.div_rem(&a).0;
        let mut c = dp.div_rem(&a).0;
        let mut d = c.sub(&b.derivative());
        let mut i = 1;
        loop {
            let f = b.gcd(&d);
            if !f.is_constant() {
                out.push((f.clone(), i));
            }
            b = b.div_rem(&f).0;
            if b.is_constant() {
                break;
            }
            c = d.div_rem(&f).0;
            d = c.sub(&b.derivative());
            i += 1;
        }
        out
    }

    /// Distinct rational roots, ascending.
    pub fn rational_roots(&self) -> Vec<Rational> {
        if self.is_zero() {
            return Vec::new();
        }
        let mut roots = Vec::new();
        let mut p = self.clone();
        if p.zero_multiplicity() > 0 {
            roots.push(Rational::zero());
            p = Poly::new(p.coeffs[p.zero_multiplicity()..].to_vec());
        }
        if p.is_constant() {
            return roots;
        }
        // integer coefficients
        let lcm = p.coeffs.iter().fold(BigInt::from(1), |acc, c| acc.lcm(c.denom()));
        let ints: Vec<BigInt> = p.coeffs.iter().map(|c| (c * Rational::from_integer(lcm.clone())).to_integer()).collect();
        let (Some(c0), Some(cn)) = (divisors(ints.first().unwrap()), divisors(ints.last().unwrap())) else {
            return roots;
        };
        let mut cands: Vec<Rational> = Vec::new();
        for a in &c0 {
            for b in &cn {
                let r = Rational::new(a.clone(), b.clone());
                cands.push(r.clone());
                cands.push(-r);
            }
        }
        cands.sort();
        cands.dedup();
        for r in cands {
            if p.eval(&r).is_zero() {
                roots.push(r);
            }
        }
        roots.sort();
        roots
    }

    /// Number of distinct real roots in the half-open interval `(lo, hi]`,
    /// where `None` stands for -inf / +inf. Sturm's theorem.
    pub fn count_real_roots(&self, lo: Option<&Rational>, hi: Option<&Rational>) -> usize {
        if self.is_constant() {
            return 0;
        }
        let mut seq = vec![self.clone(), self.derivative()];
        loop {
            let n = seq.len();
            let r = seq[n - 2].div_rem(&seq[n - 1]).1;
            if r.is_zero() {
                break;
            }
            seq.push(r.scale(&-Rational::one()));
        }
        let sign_at = |p: &Poly<Rational>, x: Option<&Rational>, neg_inf: bool| -> i32 {
            match x {
                Some(x) => sign(&p.eval(x)),
                None => {
                    let s = sign(&p.leading());
                    let deg = p.degree().unwrap_or(0);
                    if neg_inf && deg % 2 == 1 {
                        -s
                    } else {
                        s
                    }
                }
            }
        };
        let changes = |x: Option<&Rational>, neg_inf: bool| -> usize {
            let signs: Vec<i32> = seq.iter().map(|p| sign_at(p, x, neg_inf)).filter(|&s| s != 0).collect();
            signs.windows(2).filter(|w| w[0] != w[1]).count()
        };
        changes(lo, true).saturating_sub(changes(hi, false))
    }

    /// Monic square root if `self` (monic) is a perfect square in Q[x].
    pub fn perfect_square_root(&self) -> Option<Poly<Rational>> {
        let p = self.monic();
        let deg = p.degree()?;
        if deg % 2 == 1 {
            return None;
        }
        let h = deg / 2;
        // s = x^h + s_{h-1} x^{h-1} + ...; match coefficients from the top.
        let mut s = vec![Rational::zero(); h + 1];
        s[h] = Rational::one();
        for k in (0..h).rev() {
            // coefficient of x^{h+k} in s^2 equals p_{h+k}
            let mut acc = Rational::zero();
            for i in k + 1..=h {
                let j = h + k - i;
                if j > k && j <= h {
                    acc += &s[i] * &s[j];
                }
            }
            s[k] = (p.coeff(h + k) - acc) / Rational::from_integer(BigInt::from(2));
        }
        let root = Poly::new(s);
        (root.mul(&root) == p).then_some(root)
    }
}

fn sign(r: &Rational) -> i32 {
    let zero = <Rational as Scalar>::zero();
    if *r > zero {
        1
    } else if *r < zero {
        -1
    } else {
        0
    }
}

/// Positive divisors of a nonzero integer; `None` when it is too large to factor by trial division.
fn divisors(n: &BigInt) -> Option<Vec<BigInt>> {
    let n = n.abs().to_u64()?;
    if n == 0 || n > 1_000_000_000_000 {
        return None;
    }
    let mut out = Vec::new();
    let mut d = 1u64;
    while d * d <= n {
        if n % d == 0 {
            out.push(BigInt::from(d));
            if d * d != n {
                out.push(BigInt::from(n / d));
            }
        }
        d += 1;
    }
    Some(out)
}

impl<S: Scalar> fmt::Display for Poly<S> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let mut first = true;
        for (i, c) in self.coeffs.iter().enumerate().rev() {
            if c.is_zero() {
                continue;
            }
            let neg = c.to_f64() < 0.0;
            let mag = if neg { -c.clone() } else { c.clone() };
            let body = format_scalar(&mag);
            let unit = mag == S::one();
            if first {
                if neg {
                    write!(f, "-")?;
                }
            } else {
                write!(f, " {} ", if neg { "-" } else { "+" })?;
            }
            first = false;
            match i {
                0 => write!(f, "{body}")?,
                1 if unit => write!(f, "x")?,
                1 => write!(f, "{body}x")?,
                _ if unit => write!(f, "x^{i}")?,
                _ => write!(f, "{body}x^{i}")?,
            }
        }
        Ok(())
    }
}

impl<S: Scalar> fmt::Debug for Poly<S> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Poly({self})")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(n: i64) -> Rational {
        Rational::from_i64(n)
    }

    fn p(c: &[i64]) -> Poly<Rational> {
        Poly::new(c.iter().map(|&x| q(x)).collect())
    }

    #[test]
    fn display_renders_descending_powers() {
        assert_eq!(p(&[1, -3, 1]).to_string(), "x^2 - 3x + 1");
        assert_eq!(p(&[0, 0, 0, 1]).to_string(), "x^3");
    }

    #[test]
    fn yun_decomposition() {
        // (x-1)^2 (x+2)^3 x
        let f = p(&[-1, 1]).pow(2).mul(&p(&[2, 1]).pow(3)).mul(&p(&[0, 1]));
        let dec = f.squarefree_decomposition();
        let rebuilt = dec.iter().fold(Poly::one(), |acc, (g, i)| acc.mul(&g.pow(*i)));
        assert_eq!(rebuilt, f);
        assert_eq!(dec.iter().map(|(_, i)| *i).collect::<Vec<_>>(), vec![1, 2, 3]);
    }

    #[test]
    fn rational_roots_found() {
        // (2x - 1)(x + 3)(x^2 + 1)
        let f = p(&[-1, 2]).mul(&p(&[3, 1])).mul(&p(&[1, 0, 1]));
        assert_eq!(f.rational_roots(), vec![q(-3), Rational::from_ratio(1, 2)]);
    }

    #[test]
    fn sturm_counts() {
        // (x+1)(x+2)(x^2+1): two roots in (-inf, 0]
        let f = p(&[1, 1]).mul(&p(&[2, 1])).mul(&p(&[1, 0, 1]));
        assert_eq!(f.count_real_roots(None, Some(&q(0))), 2);
        assert_eq!(f.count_real_roots(None, None), 2);
        assert_eq!(f.count_real_roots(Some(&q(-1)), None), 0);
    }

    #[test]
    fn perfect_square_detection() {
        let s = p(&[2, 3, 1]);
        assert_eq!(s.mul(&s).perfect_square_root(), Some(s));
        assert_eq!(p(&[1, 0, 1]).perfect_square_root(), None);
    }

    #[test]
    fn shift_evaluates_translated() {
        let f = p(&[1, -2, 0, 1]);
        let g = f.shift(&q(2));
        assert_eq!(g.eval(&q(1)), f.eval(&q(3)));
    }
}
