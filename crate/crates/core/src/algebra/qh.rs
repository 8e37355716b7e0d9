//! Quasi-homogeneous grading of type `t = (t1, t2)`.

use std::collections::BTreeMap;
use std::fmt;

use num_integer::Integer;
use super::poly::{Monomial, Poly2};
use super::rat::Rat;
use crate::error::{QhError, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct QHType {
    pub t1: u32,
    pub t2: u32,
}

impl QHType {
    pub fn new(t1: i64, t2: i64) -> Result<Self> {
        if t1 < 1 || t2 < 1 || t1 > u32::MAX as i64 || t2 > u32::MAX as i64 {
            return Err(QhError::InvalidType { t1, t2 });
        }
        Ok(QHType { t1: t1 as u32, t2: t2 as u32 })
    }

    /// `|t| = t1 + t2`.
    pub fn abs(&self) -> i64 {
        self.t1 as i64 + self.t2 as i64
    }

    /// The same grading with coprime weights.
    pub fn reduced(&self) -> QHType {
        let g = self.t1.gcd(&self.t2);
        QHType { t1: self.t1 / g, t2: self.t2 / g }
    }
}

impl fmt::Display for QHType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({},{})", self.t1, self.t2)
    }
}

/// Monomials of weight exactly `k`, x-exponent descending. Empty for `k < 0`.
pub fn qh_basis(k: i64, t: QHType) -> Vec<Monomial> {
    if k < 0 {
        return Vec::new();
    }
    let (t1, t2) = (t.t1 as i64, t.t2 as i64);
    (0..=k / t1)
        .rev()
        .filter(|a| (k - a * t1) % t2 == 0)
        .map(|a| Monomial::new(a as u32, ((k - a * t1) / t2) as u32))
        .collect()
}

pub fn qh_dim(k: i64, t: QHType) -> usize {
    qh_basis(k, t).len()
}

/// A polynomial all of whose monomials have weight `degree`. Zero is allowed in any degree.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct QHPoly {
    pub poly: Poly2,
    pub degree: i64,
    pub qtype: QHType,
}

impl QHPoly {
    pub fn new(poly: Poly2, degree: i64, qtype: QHType) -> Result<Self> {
        if !poly.is_quasi_homogeneous(qtype, degree) || (degree < 0 && !poly.is_zero()) {
            return Err(QhError::TypeMismatch(format!(
                "{poly} is not quasi-homogeneous of degree {degree} for type {qtype}"
            )));
        }
        Ok(QHPoly { poly, degree, qtype })
    }

    pub fn zero(degree: i64, qtype: QHType) -> Self {
        QHPoly { poly: Poly2::zero(), degree, qtype }
    }

    /// Infers the degree; fails on zero or mixed-weight input.
    pub fn from_poly(poly: Poly2, qtype: QHType) -> Result<Self> {
        let w = poly
            .min_weight(qtype)
            .ok_or_else(|| QhError::ZeroPolynomial("cannot infer the degree of zero".into()))?;
        Self::new(poly, w, qtype)
    }

    pub fn is_zero(&self) -> bool {
        self.poly.is_zero()
    }

    /// Coordinates on [`qh_basis`].
    pub fn coords(&self) -> Vec<Rat> {
        qh_basis(self.degree, self.qtype).iter().map(|m| self.poly.coeff(m)).collect()
    }

    pub fn from_coords(coords: &[Rat], degree: i64, qtype: QHType) -> Self {
        let basis = qh_basis(degree, qtype);
        assert_eq!(basis.len(), coords.len(), "coordinate length mismatch");
        let poly = Poly2::from_terms(basis.into_iter().zip(coords.iter().cloned()));
        QHPoly { poly, degree, qtype }
    }

    pub fn mul(&self, o: &QHPoly) -> QHPoly {
        assert_eq!(self.qtype, o.qtype);
        QHPoly { poly: &self.poly * &o.poly, degree: self.degree + o.degree, qtype: self.qtype }
    }

    pub fn scale(&self, c: &Rat) -> QHPoly {
        QHPoly { poly: self.poly.scale(c), degree: self.degree, qtype: self.qtype }
    }
}

impl fmt::Display for QHPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.poly)
    }
}

/// Splits `p` into its quasi-homogeneous components, keyed by degree.
pub fn qh_components(p: &Poly2, t: QHType) -> BTreeMap<i64, QHPoly> {
    let mut parts: BTreeMap<i64, Poly2> = BTreeMap::new();
    for (m, c) in p.terms() {
        parts.entry(m.weight(t)).or_default().add_term(*m, c.clone());
    }
    parts
        .into_iter()
        .filter(|(_, q)| !q.is_zero())
        .map(|(k, q)| (k, QHPoly { poly: q, degree: k, qtype: t }))
        .collect()
}

/// Sum of a component map.
pub fn sum_components<'a, I: IntoIterator<Item = &'a QHPoly>>(it: I) -> Poly2 {
    it.into_iter().fold(Poly2::zero(), |acc, q| &acc + &q.poly)
}
