//! Sparse multivariate polynomials in graded reverse lexicographic order.

use std::cmp::Ordering;
use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_complex::Complex64;
use num_integer::Integer;
use num_traits::{Num, One, Signed, ToPrimitive, Zero};

use crate::Rational;

/// Exponent vector. Ordered by grevlex: total degree first, ties broken in
/// favour of the smaller exponent in the last differing variable.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct Monomial(pub Vec<u32>);

impl Monomial {
    pub fn one(nvars: usize) -> Self {
        Monomial(vec![0; nvars])
    }

    pub fn var(nvars: usize, i: usize) -> Self {
        let mut e = vec![0; nvars];
        e[i] = 1;
        Monomial(e)
    }

    pub fn degree(&self) -> u32 {
        self.0.iter().sum()
    }

    pub fn nvars(&self) -> usize {
        self.0.len()
    }

    pub fn mul(&self, other: &Monomial) -> Monomial {
        Monomial(self.0.iter().zip(&other.0).map(|(a, b)| a + b).collect())
    }

    pub fn divides(&self, other: &Monomial) -> bool {
        self.0.iter().zip(&other.0).all(|(a, b)| a <= b)
    }

    /// `other / self`, assuming `self` divides `other`.
    pub fn quotient_of(&self, other: &Monomial) -> Monomial {
        Monomial(other.0.iter().zip(&self.0).map(|(a, b)| a - b).collect())
    }

    pub fn lcm(&self, other: &Monomial) -> Monomial {
        Monomial(self.0.iter().zip(&other.0).map(|(a, b)| *a.max(b)).collect())
    }

    pub fn is_coprime(&self, other: &Monomial) -> bool {
        self.0.iter().zip(&other.0).all(|(a, b)| *a == 0 || *b == 0)
    }

    pub fn eval<T: Clone + One + Mul<Output = T>>(&self, point: &[T]) -> T {
        let mut acc = T::one();
        for (x, &e) in point.iter().zip(&self.0) {
            for _ in 0..e {
                acc = acc * x.clone();
            }
        }
        acc
    }

    /// All monomials in `nvars` variables of total degree at most `d`, in
    /// increasing grevlex order.
    pub fn up_to_degree(nvars: usize, d: u32) -> Vec<Monomial> {
        let mut out = Vec::new();
        for k in 0..=d {
            out.extend(Self::of_degree(nvars, k));
        }
        out.sort();
        out
    }

    pub fn of_degree(nvars: usize, d: u32) -> Vec<Monomial> {
        fn rec(i: usize, left: u32, cur: &mut Vec<u32>, out: &mut Vec<Monomial>) {
            if i + 1 == cur.len() {
                cur[i] = left;
                out.push(Monomial(cur.clone()));
                return;
            }
            for e in 0..=left {
                cur[i] = e;
                rec(i + 1, left - e, cur, out);
            }
        }
        if nvars == 0 {
            return if d == 0 { vec![Monomial(vec![])] } else { vec![] };
        }
        let mut out = Vec::new();
        rec(0, d, &mut vec![0; nvars], &mut out);
        out.sort();
        out
    }

    pub fn fmt_with(&self, names: &[String]) -> String {
        let mut parts = Vec::new();
        for (i, &e) in self.0.iter().enumerate() {
            match e {
                0 => {}
                1 => parts.push(names[i].clone()),
                _ => parts.push(format!("{}^{}", names[i], e)),
            }
        }
        if parts.is_empty() {
            "1".to_string()
        } else {
            parts.join("*")
        }
    }
}

impl Ord for Monomial {
    fn cmp(&self, other: &Self) -> Ordering {
        match self.degree().cmp(&other.degree()) {
            Ordering::Equal => {}
            o => return o,
        }
        for (a, b) in self.0.iter().zip(&other.0).rev() {
            if a != b {
                return b.cmp(a);
            }
        }
        Ordering::Equal
    }
}

impl PartialOrd for Monomial {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

pub trait Coeff: Clone + Num + Neg<Output = Self> + fmt::Debug {}
impl<T: Clone + Num + Neg<Output = T> + fmt::Debug> Coeff for T {}

/// Polynomial with coefficients in `C`. Terms are kept sorted in increasing
/// grevlex order and never store zero coefficients.
#[derive(Clone, PartialEq, Debug)]
pub struct Polynomial<C> {
    nvars: usize,
    terms: BTreeMap<Monomial, C>,
}

pub type Poly = Polynomial<Rational>;
pub type RealPoly = Polynomial<f64>;
pub type ComplexPoly = Polynomial<Complex64>;

impl<C: Coeff> Polynomial<C> {
    pub fn zero(nvars: usize) -> Self {
        Polynomial { nvars, terms: BTreeMap::new() }
    }

    pub fn constant(nvars: usize, c: C) -> Self {
        Self::term(Monomial::one(nvars), c)
    }

    pub fn one(nvars: usize) -> Self {
        Self::constant(nvars, C::one())
    }

    pub fn var(nvars: usize, i: usize) -> Self {
        Self::term(Monomial::var(nvars, i), C::one())
    }

    pub fn term(m: Monomial, c: C) -> Self {
        let nvars = m.nvars();
        let mut terms = BTreeMap::new();
        if !c.is_zero() {
            terms.insert(m, c);
        }
        Polynomial { nvars, terms }
    }

    pub fn from_terms(nvars: usize, it: impl IntoIterator<Item = (Monomial, C)>) -> Self {
        let mut p = Self::zero(nvars);
        for (m, c) in it {
            p.add_term(m, c);
        }
        p
    }

    pub fn nvars(&self) -> usize {
        self.nvars
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    /// Terms in increasing grevlex order.
    pub fn terms(&self) -> impl DoubleEndedIterator<Item = (&Monomial, &C)> {
        self.terms.iter()
    }

    pub fn coeff(&self, m: &Monomial) -> C {
        self.terms.get(m).cloned().unwrap_or_else(C::zero)
    }

    pub fn constant_term(&self) -> C {
        self.coeff(&Monomial::one(self.nvars))
    }

    pub fn is_constant(&self) -> bool {
        self.terms.keys().all(|m| m.degree() == 0)
    }

    pub fn leading_term(&self) -> Option<(&Monomial, &C)> {
        self.terms.iter().next_back()
    }

    /// Total degree; the zero polynomial has degree 0.
    pub fn degree(&self) -> u32 {
        self.terms.keys().map(|m| m.degree()).max().unwrap_or(0)
    }

    pub fn add_term(&mut self, m: Monomial, c: C) {
        if c.is_zero() {
            return;
        }
        debug_assert_eq!(m.nvars(), self.nvars);
        match self.terms.get_mut(&m) {
            Some(v) => {
                let s = v.clone() + c;
                if s.is_zero() {
                    self.terms.remove(&m);
                } else {
                    *v = s;
                }
            }
            None => {
                self.terms.insert(m, c);
            }
        }
    }

    pub fn scale(&self, c: &C) -> Self {
        if c.is_zero() {
            return Self::zero(self.nvars);
        }
        Polynomial {
            nvars: self.nvars,
            terms: self.terms.iter().map(|(m, v)| (m.clone(), v.clone() * c.clone())).collect(),
        }
    }

    pub fn mul_term(&self, m: &Monomial, c: &C) -> Self {
        if c.is_zero() {
            return Self::zero(self.nvars);
        }
        Polynomial {
            nvars: self.nvars,
            terms: self.terms.iter().map(|(k, v)| (k.mul(m), v.clone() * c.clone())).collect(),
        }
    }

    /// `self += c * m * other`
    pub fn add_scaled(&mut self, other: &Self, m: &Monomial, c: &C) {
        for (k, v) in &other.terms {
            self.add_term(k.mul(m), v.clone() * c.clone());
        }
    }

    pub fn pow(&self, e: u32) -> Self {
        let mut acc = Self::one(self.nvars);
        for _ in 0..e {
            acc = &acc * self;
        }
        acc
    }

    pub fn square(&self) -> Self {
        self * self
    }

    pub fn map_coeffs<D: Coeff>(&self, f: impl Fn(&C) -> D) -> Polynomial<D> {
        Polynomial::from_terms(self.nvars, self.terms.iter().map(|(m, c)| (m.clone(), f(c))))
    }

    pub fn eval<T>(&self, point: &[T], conv: impl Fn(&C) -> T) -> T
    where
        T: Clone + Zero + One + Mul<Output = T> + Add<Output = T>,
    {
        let mut acc = T::zero();
        for (m, c) in &self.terms {
            acc = acc + conv(c) * m.eval(point);
        }
        acc
    }

    /// Drop coefficients whose modulus is below `tol`, measured with `norm`.
    pub fn prune(&mut self, tol: f64, norm: impl Fn(&C) -> f64) {
        self.terms.retain(|_, c| norm(c) > tol);
    }
}

impl Poly {
    pub fn from_int(nvars: usize, c: i64) -> Self {
        Self::constant(nvars, Rational::from_integer(c.into()))
    }

    pub fn eval_rational(&self, point: &[Rational]) -> Rational {
        self.eval(point, |c| c.clone())
    }

    pub fn eval_f64(&self, point: &[f64]) -> f64 {
        self.eval(point, |c| c.to_f64().unwrap_or(f64::NAN))
    }

    pub fn eval_complex(&self, point: &[Complex64]) -> Complex64 {
        self.eval(point, |c| Complex64::new(c.to_f64().unwrap_or(f64::NAN), 0.0))
    }

    pub fn to_f64(&self) -> RealPoly {
        self.map_coeffs(|c| c.to_f64().unwrap_or(f64::NAN))
    }

    /// Least common multiple of the coefficient denominators.
    pub fn denominator_lcm(&self) -> BigInt {
        self.terms.values().fold(BigInt::one(), |acc, c| acc.lcm(c.denom()))
    }

    /// Bit length of the largest numerator of `ν·p` and of `ν`, where `ν` is
    /// the least common denominator of the coefficients.
    pub fn height(&self) -> (u64, u64) {
        let den = self.denominator_lcm();
        let num = self
            .terms
            .values()
            .map(|c| (c.numer() * (&den / c.denom())).abs())
            .max()
            .unwrap_or_else(BigInt::zero);
        (num.bits(), den.bits())
    }

    /// Integer-coefficient multiple `ν·p`, together with `ν`.
    pub fn clear_denominators(&self) -> (Polynomial<Rational>, BigInt) {
        let den = self.denominator_lcm();
        (self.scale(&Rational::from_integer(den.clone())), den)
    }

    pub fn round_binary(p: &RealPoly, bits: u32) -> Poly {
        Poly::from_terms(p.nvars, p.terms.iter().map(|(m, c)| (m.clone(), round_binary(*c, bits))))
    }

    pub fn fmt_with(&self, names: &[String]) -> String {
        let mut s = String::new();
        for (i, (m, c)) in self.terms.iter().rev().enumerate() {
            let neg = c.is_negative();
            let a = c.abs();
            if i == 0 {
                if neg {
                    s.push('-');
                }
            } else {
                s.push_str(if neg { " - " } else { " + " });
            }
            if m.degree() == 0 {
                s.push_str(&fmt_rational(&a));
            } else if a.is_one() {
                s.push_str(&m.fmt_with(names));
            } else {
                s.push_str(&fmt_rational(&a));
                s.push('*');
                s.push_str(&m.fmt_with(names));
            }
        }
        if s.is_empty() {
            s.push('0');
        }
        s
    }
}

pub fn fmt_rational(r: &Rational) -> String {
    if r.denom().is_one() {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

pub fn default_names(nvars: usize) -> Vec<String> {
    (1..=nvars).map(|i| format!("x{}", i)).collect()
}

impl fmt::Display for Poly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.fmt_with(&default_names(self.nvars)))
    }
}

/// `floor(x·2^bits)/2^bits`, computed exactly.
pub fn round_binary(x: f64, bits: u32) -> Rational {
    let exact = Rational::from_float(x).unwrap_or_else(Rational::zero);
    let scale = BigInt::one() << bits;
    let scaled = exact * Rational::from_integer(scale.clone());
    Rational::new(scaled.floor().to_integer(), scale)
}

/// Exact rational value of a finite double.
pub fn rational_from_f64(x: f64) -> Rational {
    Rational::from_float(x).unwrap_or_else(Rational::zero)
}

impl<C: Coeff> Add for &Polynomial<C> {
    type Output = Polynomial<C>;
    fn add(self, rhs: Self) -> Polynomial<C> {
        let mut out = self.clone();
        for (m, c) in &rhs.terms {
            out.add_term(m.clone(), c.clone());
        }
        out
    }
}

impl<C: Coeff> Sub for &Polynomial<C> {
    type Output = Polynomial<C>;
    fn sub(self, rhs: Self) -> Polynomial<C> {
        let mut out = self.clone();
        for (m, c) in &rhs.terms {
            out.add_term(m.clone(), -c.clone());
        }
        out
    }
}

impl<C: Coeff> Mul for &Polynomial<C> {
    type Output = Polynomial<C>;
    fn mul(self, rhs: Self) -> Polynomial<C> {
        let mut out = Polynomial::zero(self.nvars);
        for (m, c) in &rhs.terms {
            out.add_scaled(self, m, c);
        }
        out
    }
}

impl<C: Coeff> Neg for &Polynomial<C> {
    type Output = Polynomial<C>;
    fn neg(self) -> Polynomial<C> {
        self.map_coeffs(|c| -c.clone())
    }
}

macro_rules! forward_owned {
    ($tr:ident, $f:ident) => {
        impl<C: Coeff> $tr for Polynomial<C> {
            type Output = Polynomial<C>;
            fn $f(self, rhs: Self) -> Polynomial<C> {
                (&self).$f(&rhs)
            }
        }
    };
}
forward_owned!(Add, add);
forward_owned!(Sub, sub);
forward_owned!(Mul, mul);

#[cfg(test)]
mod tests {
    use super::*;

    fn q(a: i64, b: i64) -> Rational {
        Rational::new(a.into(), b.into())
    }

    #[test]
    fn grevlex_order() {
        let x = Monomial(vec![1, 0, 0]);
        let y = Monomial(vec![0, 1, 0]);
        let z = Monomial(vec![0, 0, 1]);
        assert!(x > y && y > z);
        // x*z^2 < y^3 in grevlex, x^2 > y^2
        assert!(Monomial(vec![1, 0, 2]) < Monomial(vec![0, 3, 0]));
        assert!(Monomial(vec![2, 0, 0]) > Monomial(vec![0, 2, 0]));
        assert!(Monomial(vec![0, 0, 2]) > x);
    }

    #[test]
    fn height_and_rounding() {
        let p = &Poly::from_terms(1, [(Monomial(vec![1]), q(3, 1))]) - &Poly::constant(1, q(1, 2));
        assert_eq!(p.height(), (3, 2));
        assert_eq!(round_binary(std::f64::consts::PI, 4), q(25, 8));
        assert_eq!(round_binary(0.999_999, 0), q(0, 1));
        assert_eq!(round_binary(-0.25, 1), q(-1, 2));
    }

    #[test]
    fn evaluate_mixed() {
        let p = &(&Poly::var(2, 0) + &Poly::var(2, 1)) + &Poly::from_int(2, 3);
        let v = p.eval_f64(&[1.0, 3f64.sqrt()]);
        assert!((v - 5.732_050_807_568_877).abs() < 1e-12);
    }

    #[test]
    fn display_is_descending() {
        let x = Poly::var(2, 0);
        let y = Poly::var(2, 1);
        let p = &(&x.square().scale(&q(3, 2)) - &y) + &Poly::from_int(2, 7);
        assert_eq!(p.to_string(), "3/2*x1^2 - x2 + 7");
    }
}
