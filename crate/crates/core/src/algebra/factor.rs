//! Factorization of quasi-homogeneous polynomials of y-degree at most two over Q(i).

use std::cmp::Ordering;

use num_traits::{One, Signed, Zero};

use super::gauss::GaussRat;
use super::poly::{GaussPoly, Monomial, Poly2};
use super::qh::QHPoly;
use super::rat::{int, rat_sqrt, Rat};
use crate::error::{QhError, Result};

/// `f = x^a y^b f_hom(x^t2, y^t1)` with coprime weights; `f_hom` is stored with
/// its variables named `x` (for `x^t2`) and `y` (for `y^t1`) and is homogeneous.
#[derive(Clone, Debug, PartialEq)]
pub struct HomReduction {
    pub x_power: u32,
    pub y_power: u32,
    pub hom: Poly2,
}

pub fn hom_reduce_qh(f: &QHPoly) -> Result<HomReduction> {
    let (a, b) = f
        .poly
        .min_exponents()
        .ok_or_else(|| QhError::ZeroPolynomial("hom_reduce of zero".into()))?;
    let t = f.qtype.reduced();
    let mut hom = Poly2::zero();
    for (m, c) in f.poly.terms() {
        let (i, j) = (m.a - a, m.b - b);
        if i % t.t2 != 0 || j % t.t1 != 0 {
            return Err(QhError::Internal(format!("{} is not quasi-homogeneous", f.poly)));
        }
        hom.add_term(Monomial::new(i / t.t2, j / t.t1), c.clone());
    }
    Ok(HomReduction { x_power: a, y_power: b, hom })
}

/// Coefficients of `f_hom(1, Y)` in ascending powers of `Y`.
pub fn dehomogenize_at_x1(hom: &Poly2) -> Vec<Rat> {
    let deg = hom.degree_in_y().unwrap_or(0) as usize;
    let mut out = vec![Rat::zero(); deg + 1];
    for (m, c) in hom.terms() {
        out[m.b as usize] += c;
    }
    out
}

/// Roots in Q(i) with multiplicities of a rational univariate polynomial of degree <= 2
/// (ascending coefficients). Ordered by descending `(re, im)`.
pub fn roots_deg2(coeffs: &[Rat]) -> Result<Vec<(GaussRat, u32)>> {
    let mut c: Vec<Rat> = coeffs.to_vec();
    while c.last().is_some_and(|v| v.is_zero()) {
        c.pop();
    }
    let mut roots = match c.len() {
        0 => return Err(QhError::ZeroPolynomial("root finding of zero".into())),
        1 => Vec::new(),
        2 => vec![(GaussRat::real(-(&c[0] / &c[1])), 1)],
        3 => {
            let (c0, c1, c2) = (&c[0], &c[1], &c[2]);
            let disc = c1 * c1 - int(4) * c2 * c0;
            let two_a = int(2) * c2;
            let centre = -(c1 / &two_a);
            if disc.is_zero() {
                vec![(GaussRat::real(centre), 2)]
            } else {
                let s = rat_sqrt(&disc.abs()).ok_or_else(|| {
                    QhError::UnsupportedRootField(format!("discriminant {disc} is not a square in Q(i)"))
                })?;
                let delta = &s / &two_a;
                if disc.is_positive() {
                    vec![
                        (GaussRat::real(&centre + &delta), 1),
                        (GaussRat::real(&centre - &delta), 1),
                    ]
                } else {
                    vec![
                        (GaussRat::new(centre.clone(), delta.clone()), 1),
                        (GaussRat::new(centre, -delta), 1),
                    ]
                }
            }
        }
        _ => {
            return Err(QhError::UnsupportedShape(format!(
                "degree {} exceeds the supported quadratic case",
                c.len() - 1
            )))
        }
    };
    roots.sort_by(|(p, _), (q, _)| cmp_desc(p, q));
    Ok(roots)
}

fn cmp_desc(p: &GaussRat, q: &GaussRat) -> Ordering {
    q.re.cmp(&p.re).then(q.im.cmp(&p.im))
}

/// Degree of the gcd of two rational univariate polynomials (ascending coefficients).
pub fn univariate_gcd_degree(a: &[Rat], b: &[Rat]) -> usize {
    fn trim(v: &mut Vec<Rat>) {
        while v.last().is_some_and(|x| x.is_zero()) {
            v.pop();
        }
    }
    let (mut a, mut b) = (a.to_vec(), b.to_vec());
    trim(&mut a);
    trim(&mut b);
    while !b.is_empty() {
        // a <- a mod b
        while a.len() >= b.len() && !a.is_empty() {
            let f = a.last().expect("nonempty") / b.last().expect("nonempty");
            let shift = a.len() - b.len();
            for (i, bi) in b.iter().enumerate() {
                a[i + shift] -= &f * bi;
            }
            trim(&mut a);
        }
        std::mem::swap(&mut a, &mut b);
    }
    a.len().saturating_sub(1)
}

/// Whether two quasi-homogeneous polynomials share a nonconstant factor.
pub fn share_common_factor(p: &QHPoly, q: &QHPoly) -> Result<bool> {
    if p.is_zero() || q.is_zero() {
        return Ok(true);
    }
    let rp = hom_reduce_qh(p)?;
    let rq = hom_reduce_qh(q)?;
    if (rp.x_power > 0 && rq.x_power > 0) || (rp.y_power > 0 && rq.y_power > 0) {
        return Ok(true);
    }
    let gp = dehomogenize_at_x1(&rp.hom);
    let gq = dehomogenize_at_x1(&rq.hom);
    Ok(univariate_gcd_degree(&gp, &gq) > 0)
}

#[derive(Clone, Debug, PartialEq)]
pub struct Factorization {
    pub unit: Rat,
    /// Factors monic in `y`, with multiplicity.
    pub factors: Vec<(GaussPoly, u32)>,
    /// Roots `l` of `f_hom(1, Y)`, aligned with the `y^t1 - l x^t2` factors.
    pub roots: Vec<(GaussRat, u32)>,
}

impl Factorization {
    pub fn expand(&self) -> GaussPoly {
        let mut acc = GaussPoly::constant(GaussRat::real(self.unit.clone()));
        for (f, m) in &self.factors {
            acc = &acc * &f.pow(*m);
        }
        acc
    }

    pub fn has_repeated_factor(&self) -> bool {
        self.factors.iter().any(|(_, m)| *m > 1)
    }
}

/// Factors a quasi-homogeneous polynomial of y-degree at most 2 into
/// `unit * x^a * y^b * prod (y^t1 - l x^t2)^m`.
pub fn factor_quadratic_in_y(h: &QHPoly) -> Result<Factorization> {
    if h.poly.degree_in_y().unwrap_or(0) > 2 {
        return Err(QhError::UnsupportedShape(format!("y-degree of {} exceeds 2", h.poly)));
    }
    let red = hom_reduce_qh(h)?;
    let t = h.qtype.reduced();
    let coeffs = dehomogenize_at_x1(&red.hom);
    let unit = coeffs.last().cloned().unwrap_or_else(Rat::one);
    let roots = roots_deg2(&coeffs)?;
    let mut factors = Vec::new();
    for (l, m) in &roots {
        let f = &GaussPoly::term(GaussRat::one(), 0, t.t1) - &GaussPoly::term(l.clone(), t.t2, 0);
        factors.push((f, *m));
    }
    if red.y_power > 0 {
        factors.push((GaussPoly::y(), red.y_power));
    }
    if red.x_power > 0 {
        factors.push((GaussPoly::x(), red.x_power));
    }
    Ok(Factorization { unit, factors, roots })
}
