//! Sparse bivariate polynomials in `x`, `y`.
//!
//! Terms live in a `BTreeMap` keyed by [`Monomial`], whose order is graded-lex:
//! total degree first, then x-exponent descending. Zero coefficients are never
//! stored, so structural equality is mathematical equality.

use std::cmp::Ordering;
use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_traits::{One, Zero};

use super::gauss::GaussRat;
use super::qh::QHType;
use super::rat::{int, Rat};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct Monomial {
    pub a: u32,
    pub b: u32,
}

impl Monomial {
    pub const ONE: Monomial = Monomial { a: 0, b: 0 };

    pub fn new(a: u32, b: u32) -> Self {
        Monomial { a, b }
    }

    pub fn total_degree(&self) -> u32 {
        self.a + self.b
    }

    /// Quasi-homogeneous weight `a*t1 + b*t2`.
    pub fn weight(&self, t: QHType) -> i64 {
        self.a as i64 * t.t1 as i64 + self.b as i64 * t.t2 as i64
    }

    pub fn mul(&self, o: &Monomial) -> Monomial {
        Monomial { a: self.a + o.a, b: self.b + o.b }
    }
}

impl Ord for Monomial {
    fn cmp(&self, other: &Self) -> Ordering {
        self.total_degree()
            .cmp(&other.total_degree())
            .then(other.a.cmp(&self.a))
    }
}

impl PartialOrd for Monomial {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for Monomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut parts = Vec::new();
        match self.a {
            0 => {}
            1 => parts.push("x".to_string()),
            a => parts.push(format!("x^{a}")),
        }
        match self.b {
            0 => {}
            1 => parts.push("y".to_string()),
            b => parts.push(format!("y^{b}")),
        }
        if parts.is_empty() {
            write!(f, "1")
        } else {
            write!(f, "{}", parts.join("*"))
        }
    }
}

/// Coefficient ring for [`Poly`]: implemented by [`Rat`] and [`GaussRat`].
pub trait Coeff:
    Clone
    + PartialEq
    + fmt::Debug
    + fmt::Display
    + Zero
    + One
    + Neg<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
{
    fn from_i64(v: i64) -> Self;
}

impl Coeff for Rat {
    fn from_i64(v: i64) -> Self {
        int(v)
    }
}

impl Coeff for GaussRat {
    fn from_i64(v: i64) -> Self {
        GaussRat::real(int(v))
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Poly<C: Coeff> {
    terms: BTreeMap<Monomial, C>,
}

pub type Poly2 = Poly<Rat>;
pub type GaussPoly = Poly<GaussRat>;

impl<C: Coeff> Default for Poly<C> {
    fn default() -> Self {
        Poly { terms: BTreeMap::new() }
    }
}

impl<C: Coeff> Poly<C> {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn constant(c: C) -> Self {
        Self::term(c, 0, 0)
    }

    pub fn one() -> Self {
        Self::constant(C::one())
    }

    pub fn term(c: C, a: u32, b: u32) -> Self {
        let mut p = Self::zero();
        p.add_term(Monomial::new(a, b), c);
        p
    }

    pub fn monomial(m: Monomial) -> Self {
        Self::term(C::one(), m.a, m.b)
    }

    pub fn x() -> Self {
        Self::term(C::one(), 1, 0)
    }

    pub fn y() -> Self {
        Self::term(C::one(), 0, 1)
    }

    pub fn from_terms<I: IntoIterator<Item = (Monomial, C)>>(it: I) -> Self {
        let mut p = Self::zero();
        for (m, c) in it {
            p.add_term(m, c);
        }
        p
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

    /// Terms in graded-lex order.
    pub fn terms(&self) -> impl DoubleEndedIterator<Item = (&Monomial, &C)> {
        self.terms.iter()
    }

    pub fn coeff(&self, m: &Monomial) -> C {
        self.terms.get(m).cloned().unwrap_or_else(C::zero)
    }

    pub fn coeff_of(&self, a: u32, b: u32) -> C {
        self.coeff(&Monomial::new(a, b))
    }

    pub fn add_term(&mut self, m: Monomial, c: C) {
        if c.is_zero() {
            return;
        }
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
            return Self::zero();
        }
        Poly {
            terms: self
                .terms
                .iter()
                .map(|(m, v)| (*m, v.clone() * c.clone()))
                .filter(|(_, v)| !v.is_zero())
                .collect(),
        }
    }

    pub fn mul_monomial(&self, m: Monomial) -> Self {
        Poly { terms: self.terms.iter().map(|(k, v)| (k.mul(&m), v.clone())).collect() }
    }

    pub fn pow(&self, e: u32) -> Self {
        let mut acc = Self::one();
        let mut base = self.clone();
        let mut e = e;
        while e > 0 {
            if e & 1 == 1 {
                acc = &acc * &base;
            }
            e >>= 1;
            if e > 0 {
                base = &base * &base;
            }
        }
        acc
    }

    pub fn dx(&self) -> Self {
        Self::from_terms(
            self.terms
                .iter()
                .filter(|(m, _)| m.a > 0)
                .map(|(m, c)| (Monomial::new(m.a - 1, m.b), c.clone() * C::from_i64(m.a as i64))),
        )
    }

    pub fn dy(&self) -> Self {
        Self::from_terms(
            self.terms
                .iter()
                .filter(|(m, _)| m.b > 0)
                .map(|(m, c)| (Monomial::new(m.a, m.b - 1), c.clone() * C::from_i64(m.b as i64))),
        )
    }

    pub fn max_total_degree(&self) -> Option<u32> {
        self.terms.keys().map(|m| m.total_degree()).max()
    }

    pub fn degree_in_y(&self) -> Option<u32> {
        self.terms.keys().map(|m| m.b).max()
    }

    pub fn degree_in_x(&self) -> Option<u32> {
        self.terms.keys().map(|m| m.a).max()
    }

    /// Lowest x-exponent and lowest y-exponent over all terms.
    pub fn min_exponents(&self) -> Option<(u32, u32)> {
        let a = self.terms.keys().map(|m| m.a).min()?;
        let b = self.terms.keys().map(|m| m.b).min()?;
        Some((a, b))
    }

    pub fn min_weight(&self, t: QHType) -> Option<i64> {
        self.terms.keys().map(|m| m.weight(t)).min()
    }

    pub fn max_weight(&self, t: QHType) -> Option<i64> {
        self.terms.keys().map(|m| m.weight(t)).max()
    }

    /// Keep only the terms of quasi-homogeneous weight `<= w`.
    pub fn truncate_weight(&self, t: QHType, w: i64) -> Self {
        Poly {
            terms: self
                .terms
                .iter()
                .filter(|(m, _)| m.weight(t) <= w)
                .map(|(m, c)| (*m, c.clone()))
                .collect(),
        }
    }

    /// Terms of weight exactly `w`.
    pub fn weight_part(&self, t: QHType, w: i64) -> Self {
        Poly {
            terms: self
                .terms
                .iter()
                .filter(|(m, _)| m.weight(t) == w)
                .map(|(m, c)| (*m, c.clone()))
                .collect(),
        }
    }

    pub fn is_quasi_homogeneous(&self, t: QHType, w: i64) -> bool {
        self.terms.keys().all(|m| m.weight(t) == w)
    }

    /// Product keeping only monomials of weight `<= w`.
    pub fn mul_truncated(&self, o: &Self, t: QHType, w: i64) -> Self {
        let mut out = Self::zero();
        for (m1, c1) in &self.terms {
            let w1 = m1.weight(t);
            if w1 > w {
                continue;
            }
            for (m2, c2) in &o.terms {
                let m = m1.mul(m2);
                if m.weight(t) <= w {
                    out.add_term(m, c1.clone() * c2.clone());
                }
            }
        }
        out
    }

    /// `self(px, py)`, exact.
    pub fn compose(&self, px: &Self, py: &Self) -> Self {
        let max_a = self.degree_in_x().unwrap_or(0);
        let max_b = self.degree_in_y().unwrap_or(0);
        let xs = powers(px, max_a, |p, q| p * q);
        let ys = powers(py, max_b, |p, q| p * q);
        let mut out = Self::zero();
        for (m, c) in &self.terms {
            let t = &(&xs[m.a as usize] * &ys[m.b as usize]) * &Self::constant(c.clone());
            out = &out + &t;
        }
        out
    }

    /// `self(px, py)` truncated at weight `w`. Requires `px`, `py` to have
    /// minimal weight at least `t1`, `t2` respectively so that truncating
    /// intermediate powers is sound.
    pub fn compose_truncated(&self, px: &Self, py: &Self, t: QHType, w: i64) -> Self {
        let max_a = self.degree_in_x().unwrap_or(0);
        let max_b = self.degree_in_y().unwrap_or(0);
        let xs = powers(px, max_a, |p, q| p.mul_truncated(q, t, w));
        let ys = powers(py, max_b, |p, q| p.mul_truncated(q, t, w));
        let mut out = Self::zero();
        for (m, c) in &self.terms {
            if m.weight(t) > w {
                continue;
            }
            let prod = xs[m.a as usize].mul_truncated(&ys[m.b as usize], t, w);
            out = &out + &prod.scale(c);
        }
        out
    }

    pub fn map_coeffs<D: Coeff, F: Fn(&C) -> D>(&self, f: F) -> Poly<D> {
        Poly::from_terms(self.terms.iter().map(|(m, c)| (*m, f(c))))
    }

    /// Evaluation at a point.
    pub fn eval(&self, x: &C, y: &C) -> C {
        let mut acc = C::zero();
        for (m, c) in &self.terms {
            let mut v = c.clone();
            for _ in 0..m.a {
                v = v * x.clone();
            }
            for _ in 0..m.b {
                v = v * y.clone();
            }
            acc = acc + v;
        }
        acc
    }
}

fn powers<C: Coeff, F: Fn(&Poly<C>, &Poly<C>) -> Poly<C>>(p: &Poly<C>, max: u32, mul: F) -> Vec<Poly<C>> {
    let mut out = Vec::with_capacity(max as usize + 1);
    out.push(Poly::one());
    for i in 1..=max as usize {
        let next = mul(&out[i - 1], p);
        out.push(next);
    }
    out
}

impl Poly<Rat> {
    pub fn to_gauss(&self) -> GaussPoly {
        self.map_coeffs(|c| GaussRat::real(c.clone()))
    }
}

impl<C: Coeff> Add for &Poly<C> {
    type Output = Poly<C>;
    fn add(self, o: &Poly<C>) -> Poly<C> {
        let mut out = self.clone();
        for (m, c) in &o.terms {
            out.add_term(*m, c.clone());
        }
        out
    }
}

impl<C: Coeff> Sub for &Poly<C> {
    type Output = Poly<C>;
    fn sub(self, o: &Poly<C>) -> Poly<C> {
        let mut out = self.clone();
        for (m, c) in &o.terms {
            out.add_term(*m, -c.clone());
        }
        out
    }
}

impl<C: Coeff> Mul for &Poly<C> {
    type Output = Poly<C>;
    fn mul(self, o: &Poly<C>) -> Poly<C> {
        let mut out = Poly::zero();
        for (m1, c1) in &self.terms {
            for (m2, c2) in &o.terms {
                out.add_term(m1.mul(m2), c1.clone() * c2.clone());
            }
        }
        out
    }
}

impl<C: Coeff> Neg for &Poly<C> {
    type Output = Poly<C>;
    fn neg(self) -> Poly<C> {
        Poly { terms: self.terms.iter().map(|(m, c)| (*m, -c.clone())).collect() }
    }
}

impl<C: Coeff> Add for Poly<C> {
    type Output = Poly<C>;
    fn add(self, o: Poly<C>) -> Poly<C> {
        &self + &o
    }
}

impl<C: Coeff> Sub for Poly<C> {
    type Output = Poly<C>;
    fn sub(self, o: Poly<C>) -> Poly<C> {
        &self - &o
    }
}

impl<C: Coeff> Mul for Poly<C> {
    type Output = Poly<C>;
    fn mul(self, o: Poly<C>) -> Poly<C> {
        &self * &o
    }
}

impl<C: Coeff> Neg for Poly<C> {
    type Output = Poly<C>;
    fn neg(self) -> Poly<C> {
        -&self
    }
}

/// Canonical text form, re-parseable by [`crate::algebra::parse`].
impl fmt::Display for Poly<Rat> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        use num_traits::Signed;
        if self.is_zero() {
            return write!(f, "0");
        }
        for (i, (m, c)) in self.terms.iter().enumerate() {
            let neg = c.is_negative();
            let abs = c.abs();
            if i == 0 {
                if neg {
                    write!(f, "-")?;
                }
            } else if neg {
                write!(f, " - ")?;
            } else {
                write!(f, " + ")?;
            }
            if *m == Monomial::ONE {
                write!(f, "{abs}")?;
            } else if abs.is_one() {
                write!(f, "{m}")?;
            } else {
                write!(f, "{abs}*{m}")?;
            }
        }
        Ok(())
    }
}

impl fmt::Display for Poly<GaussRat> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let parts: Vec<String> = self
            .terms
            .iter()
            .map(|(m, c)| if *m == Monomial::ONE { format!("{c}") } else { format!("{c}*{m}") })
            .collect();
        write!(f, "{}", parts.join(" + "))
    }
}
