//! Subspaces of a single quasi-homogeneous space 𝒫_k, stored by explicit bases.

use num_traits::Zero;

use crate::algebra::poly::Poly2;
use crate::algebra::qh::{qh_basis, QHType};
use crate::algebra::rat::Rat;
use crate::error::{QhError, Result};
use crate::linalg::{Echelon, Matrix};

/// Coordinates of `p` on the monomial basis of 𝒫_degree. Terms of other weights are ignored.
pub fn ambient_coords(p: &Poly2, degree: i64, t: QHType) -> Vec<Rat> {
    qh_basis(degree, t).iter().map(|m| p.coeff(m)).collect()
}

pub fn from_ambient(coords: &[Rat], degree: i64, t: QHType) -> Poly2 {
    Poly2::from_terms(qh_basis(degree, t).into_iter().zip(coords.iter().cloned()))
}

/// Linear combination `sum c_i e_i`.
pub fn combine(coeffs: &[Rat], elems: &[Poly2]) -> Poly2 {
    coeffs
        .iter()
        .zip(elems)
        .filter(|(c, _)| !c.is_zero())
        .fold(Poly2::zero(), |acc, (c, e)| &acc + &e.scale(c))
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SubspaceBasis {
    pub degree: i64,
    pub qtype: QHType,
    pub elements: Vec<Poly2>,
}

impl SubspaceBasis {
    /// Checks that every element lies in 𝒫_degree and that they are independent.
    pub fn new(degree: i64, qtype: QHType, elements: Vec<Poly2>) -> Result<Self> {
        let dim = qh_basis(degree, qtype).len();
        let mut ech = Echelon::new(dim);
        for e in &elements {
            if !e.is_quasi_homogeneous(qtype, degree) {
                return Err(QhError::TypeMismatch(format!("{e} is not of degree {degree}")));
            }
            if !ech.insert(&ambient_coords(e, degree, qtype)) {
                return Err(QhError::InvalidComplement(format!("{e} is linearly dependent")));
            }
        }
        Ok(SubspaceBasis { degree, qtype, elements })
    }

    pub fn empty(degree: i64, qtype: QHType) -> Self {
        SubspaceBasis { degree, qtype, elements: Vec::new() }
    }

    pub fn whole(degree: i64, qtype: QHType) -> Self {
        let elements = qh_basis(degree, qtype).into_iter().map(Poly2::monomial).collect();
        SubspaceBasis { degree, qtype, elements }
    }

    pub fn dim(&self) -> usize {
        self.elements.len()
    }

    pub fn ambient_dim(&self) -> usize {
        qh_basis(self.degree, self.qtype).len()
    }

    /// Columns are the ambient coordinates of the elements.
    pub fn matrix(&self) -> Matrix {
        let cols: Vec<Vec<Rat>> =
            self.elements.iter().map(|e| ambient_coords(e, self.degree, self.qtype)).collect();
        Matrix::from_columns(&cols, self.ambient_dim())
    }

    pub fn echelon(&self) -> Echelon {
        let mut e = Echelon::new(self.ambient_dim());
        for el in &self.elements {
            e.insert(&ambient_coords(el, self.degree, self.qtype));
        }
        e
    }

    pub fn contains(&self, p: &Poly2) -> bool {
        p.is_quasi_homogeneous(self.qtype, self.degree)
            && self.echelon().contains(&ambient_coords(p, self.degree, self.qtype))
    }

    pub fn coords_of(&self, p: &Poly2) -> Option<Vec<Rat>> {
        if !p.is_quasi_homogeneous(self.qtype, self.degree) {
            return None;
        }
        self.matrix().solve(&ambient_coords(p, self.degree, self.qtype))
    }

    pub fn intersects_trivially(&self, other: &SubspaceBasis) -> bool {
        let mut e = self.echelon();
        other.elements.iter().all(|x| e.insert(&ambient_coords(x, self.degree, self.qtype)))
    }

    /// `self ⊕ other` is the whole ambient space.
    pub fn is_complement_of(&self, other: &SubspaceBasis) -> bool {
        self.dim() + other.dim() == self.ambient_dim() && self.intersects_trivially(other)
    }
}

/// Unique coordinates of `v` on `first ++ second`, which must form a basis of 𝒫_degree.
pub fn split_direct_sum(
    v: &Poly2,
    first: &[Poly2],
    second: &[Poly2],
    degree: i64,
    t: QHType,
) -> Result<(Vec<Rat>, Vec<Rat>)> {
    let dim = qh_basis(degree, t).len();
    if first.len() + second.len() != dim {
        return Err(QhError::InvalidComplement(format!(
            "{} + {} generators do not match dimension {dim}",
            first.len(),
            second.len()
        )));
    }
    let cols: Vec<Vec<Rat>> = first.iter().chain(second).map(|e| ambient_coords(e, degree, t)).collect();
    let m = Matrix::from_columns(&cols, dim);
    if m.rank() != dim {
        return Err(QhError::InvalidComplement("generators are dependent".into()));
    }
    if !v.is_quasi_homogeneous(t, degree) {
        return Err(QhError::TypeMismatch(format!("{v} is not of degree {degree}")));
    }
    let sol = m.solve(&ambient_coords(v, degree, t)).expect("full rank");
    let (a, b) = sol.split_at(first.len());
    Ok((a.to_vec(), b.to_vec()))
}
