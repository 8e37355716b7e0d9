//! Polynomial integrability of the leading quasi-homogeneous part.

use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::algebra::factor::{factor_quadratic_in_y, hom_reduce_qh, Factorization};
use crate::algebra::gauss::GaussRat;
use crate::algebra::poly::{GaussPoly, Monomial, Poly2};
use crate::algebra::qh::{qh_basis, QHPoly, QHType};
use crate::algebra::rat::{int, Rat};
use crate::error::{QhError, Result};
use crate::linalg::Matrix;
use crate::preform::{DValue, PreformCase, PreformResult};
use crate::vectorfield::{split_conservative_dissipative, QHVF};

/// Default bound on the degree of a searched primitive integral.
pub const DEFAULT_M0_CAP: u64 = 512;

/// `f = x^n y^m f_hom(x^t2, y^t1)`; `f_hom` uses `x`, `y` for `x^t2`, `y^t1`.
pub fn hom_reduce(f: &QHPoly) -> Result<(u32, u32, Poly2)> {
    let r = hom_reduce_qh(f)?;
    Ok((r.x_power, r.y_power, r.hom))
}

/// True when `h` has a repeated factor while `mu` is nonzero.
pub fn multiple_factor_obstruction(h: &QHPoly, mu: &QHPoly) -> Result<bool> {
    if mu.is_zero() {
        return Ok(false);
    }
    Ok(factor_quadratic_in_y(h)?.has_repeated_factor())
}

/// Coprime `(m1, m2)` with `(m1 − m2)/(m1 + m2) = d`, for `|d| < 1`.
pub fn find_m1_m2(d: &Rat) -> Option<(u64, u64)> {
    if d.abs() >= Rat::one() {
        return None;
    }
    let (u, v) = (d.numer().clone(), d.denom().clone());
    let (mut m1, mut m2) = (&v + &u, &v - &u);
    let g = m1.gcd(&m2);
    m1 /= &g;
    m2 /= &g;
    Some((m1.to_u64()?, m2.to_u64()?))
}

#[derive(Clone, Debug, PartialEq)]
pub struct ResidueData {
    pub h: QHPoly,
    pub mu: QHPoly,
    pub h_hom: Poly2,
    pub mu_hom: Poly2,
    pub delta_x: bool,
    pub delta_y: bool,
    pub factorization: Factorization,
    /// `Res[η^hom(1,Y), λ_i] = μ^hom(1,λ)/(λ^{δ_y} ∂_Y h^hom(1,λ))`, one per simple root.
    pub residues: Vec<(GaussRat, GaussRat)>,
    /// Factors `x`, `y`, `y^t1 − λ x^t2` of `h` and their cofactors for `F_r`.
    pub factors: Vec<InvariantFactor>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct InvariantFactor {
    pub curve: GaussPoly,
    pub degree: i64,
    pub cofactor: GaussPoly,
}

#[derive(Clone, Debug, PartialEq)]
pub struct ExponentAssignment {
    /// Exponents aligned with [`ResidueData::factors`]; each is `n_j + 1 >= 1`.
    pub exponents: Vec<u64>,
    pub m0: u64,
    pub integral: GaussPoly,
}

fn eval_univariate(coeffs: &[Rat], at: &GaussRat) -> GaussRat {
    coeffs.iter().rev().fold(GaussRat::zero(), |acc, c| acc * at.clone() + GaussRat::real(c.clone()))
}

fn derivative(coeffs: &[Rat]) -> Vec<Rat> {
    coeffs.iter().enumerate().skip(1).map(|(i, c)| c * int(i as i64)).collect()
}

/// Exact quotient by a factor `y^t1 − λ x^t2` (monic in `y`), or `None` if it does not divide.
fn div_by_y_factor(num: &GaussPoly, t1: u32, t2: u32, l: &GaussRat) -> Option<GaussPoly> {
    let mut rem = num.clone();
    let mut quo = GaussPoly::zero();
    loop {
        let top = rem.terms().filter(|(m, _)| m.b >= t1).max_by_key(|(m, _)| (m.b, m.a)).map(|(m, c)| (*m, c.clone()));
        let Some((m, c)) = top else { break };
        let q = GaussPoly::term(c, m.a, m.b - t1);
        let divisor = &GaussPoly::term(GaussRat::one(), 0, t1) - &GaussPoly::term(l.clone(), t2, 0);
        rem = &rem - &(&q * &divisor);
        quo = &quo + &q;
    }
    rem.is_zero().then_some(quo)
}

fn div_by_monomial(num: &GaussPoly, m: Monomial) -> Option<GaussPoly> {
    let mut out = GaussPoly::zero();
    for (k, c) in num.terms() {
        if k.a < m.a || k.b < m.b {
            return None;
        }
        out.add_term(Monomial::new(k.a - m.a, k.b - m.b), c.clone());
    }
    Some(out)
}

fn derive_gauss(f: &QHVF, g: &GaussPoly) -> GaussPoly {
    let p = f.p.poly.to_gauss();
    let q = f.q.poly.to_gauss();
    &(&g.dx() * &p) + &(&g.dy() * &q)
}

/// Splits `F_r`, factors `h` over Q(i) and computes residues and cofactors.
pub fn residue_data(f_r: &QHVF) -> Result<ResidueData> {
    let t = f_r.qtype;
    let s = split_conservative_dissipative(f_r);
    let fac = factor_quadratic_in_y(&s.h)?;
    let red = hom_reduce_qh(&s.h)?;
    let tr = t.reduced();
    let h_coeffs = crate::algebra::factor::dehomogenize_at_x1(&red.hom);
    let dh = derivative(&h_coeffs);
    let (mu_hom, mu_coeffs) = if s.mu.is_zero() {
        (Poly2::zero(), vec![Rat::zero()])
    } else {
        let m = hom_reduce_qh(&s.mu)?;
        let c = crate::algebra::factor::dehomogenize_at_x1(&m.hom);
        (m.hom, c)
    };
    let delta_y = red.y_power > 0;
    let mut residues = Vec::new();
    for (l, mult) in &fac.roots {
        if *mult != 1 {
            continue;
        }
        let den = if delta_y { l.clone() * eval_univariate(&dh, l) } else { eval_univariate(&dh, l) };
        let res = eval_univariate(&mu_coeffs, l) / den;
        residues.push((l.clone(), res));
    }
    let mut factors = Vec::new();
    for (l, _) in &fac.roots {
        let curve = &GaussPoly::term(GaussRat::one(), 0, tr.t1) - &GaussPoly::term(l.clone(), tr.t2, 0);
        let cof = div_by_y_factor(&derive_gauss(f_r, &curve), tr.t1, tr.t2, l)
            .ok_or_else(|| QhError::Internal(format!("{curve} is not invariant")))?;
        factors.push(InvariantFactor { curve, degree: (tr.t1 * t.t2) as i64, cofactor: cof });
    }
    if delta_y {
        let cof = div_by_monomial(&derive_gauss(f_r, &GaussPoly::y()), Monomial::new(0, 1))
            .ok_or_else(|| QhError::Internal("y is not invariant".into()))?;
        factors.push(InvariantFactor { curve: GaussPoly::y(), degree: t.t2 as i64, cofactor: cof });
    }
    if red.x_power > 0 {
        let cof = div_by_monomial(&derive_gauss(f_r, &GaussPoly::x()), Monomial::new(1, 0))
            .ok_or_else(|| QhError::Internal("x is not invariant".into()))?;
        factors.push(InvariantFactor { curve: GaussPoly::x(), degree: t.t1 as i64, cofactor: cof });
    }
    Ok(ResidueData {
        h: s.h,
        mu: s.mu,
        h_hom: red.hom,
        mu_hom,
        delta_x: red.x_power > 0,
        delta_y,
        factorization: fac,
        residues,
        factors,
    })
}

/// Solves for exponents `e_j >= 1` with `sum e_j K_j = 0` (equivalently the
/// residue equations), returning the smallest integral of degree `<= m0_cap`.
///
/// The exponents are real, so the complex system is split into real and
/// imaginary rows and solved exactly over Q.
pub fn residue_conditions_check(data: &ResidueData, t: QHType, r: i64, m0_cap: u64) -> Result<Option<ExponentAssignment>> {
    if data.factorization.has_repeated_factor() {
        return Err(QhError::UnsupportedShape("residue conditions need simple factors".into()));
    }
    if data.mu.is_zero() {
        let ones = vec![1; data.factors.len()];
        return Ok(Some(assemble(data, ones)));
    }
    let monos = qh_basis(r, t);
    let mut rows = Vec::new();
    for m in &monos {
        let re: Vec<Rat> = data.factors.iter().map(|f| f.cofactor.coeff(m).re).collect();
        let im: Vec<Rat> = data.factors.iter().map(|f| f.cofactor.coeff(m).im).collect();
        rows.push(re);
        rows.push(im);
    }
    let k = data.factors.len();
    let ns = Matrix::from_rows(rows, k).nullspace();
    if ns.len() != 1 {
        return Ok(None);
    }
    let mut v = ns.into_iter().next().expect("one vector");
    if v.iter().any(|x| x.is_negative()) {
        v.iter_mut().for_each(|x| *x = -x.clone());
    }
    if v.iter().any(|x| !x.is_positive()) {
        return Ok(None);
    }
    let lcm = v.iter().fold(BigInt::one(), |acc, x| acc.lcm(x.denom()));
    let ints: Vec<BigInt> = v.iter().map(|x| (x * Rat::from_integer(lcm.clone())).to_integer()).collect();
    let g = ints.iter().fold(BigInt::zero(), |acc, x| acc.gcd(x));
    let exps: Option<Vec<u64>> = ints.iter().map(|x| (x / &g).to_u64()).collect();
    let Some(exps) = exps else { return Ok(None) };
    let out = assemble(data, exps);
    if out.m0 > m0_cap {
        return Ok(None);
    }
    Ok(Some(out))
}

fn assemble(data: &ResidueData, exps: Vec<u64>) -> ExponentAssignment {
    let mut integral = GaussPoly::one();
    let mut m0 = 0u64;
    for (f, e) in data.factors.iter().zip(&exps) {
        integral = &integral * &f.curve.pow(*e as u32);
        m0 += f.degree as u64 * e;
    }
    ExponentAssignment { exponents: exps, m0, integral }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum LeadingReason {
    HamiltonianQH,
    ResidueSolved,
    MultipleFactorObstruction,
    ResidueUnsolvable,
    UnsupportedRootField,
}

impl fmt::Display for LeadingReason {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            LeadingReason::HamiltonianQH => "hamiltonian",
            LeadingReason::ResidueSolved => "residue-solved",
            LeadingReason::MultipleFactorObstruction => "multiple-factor-obstruction",
            LeadingReason::ResidueUnsolvable => "residue-unsolvable",
            LeadingReason::UnsupportedRootField => "unsupported-root-field",
        };
        write!(f, "{s}")
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct LeadingVerdict {
    pub integrable: bool,
    pub reason: LeadingReason,
    pub m1: Option<u64>,
    pub m2: Option<u64>,
    pub integral: Option<QHPoly>,
    /// Degree of the primitive integral.
    pub m: Option<i64>,
    pub detail: String,
}

impl LeadingVerdict {
    fn not_integrable(reason: LeadingReason, detail: impl Into<String>) -> Self {
        LeadingVerdict { integrable: false, reason, m1: None, m2: None, integral: None, m: None, detail: detail.into() }
    }
}

fn checked_integral(f_r: &QHVF, i: Poly2) -> Result<QHPoly> {
    let q = QHPoly::from_poly(i, f_r.qtype)?;
    if !f_r.to_planar().derive(&q.poly).is_zero() {
        return Err(QhError::Internal(format!("{} is not a first integral of the leading part", q.poly)));
    }
    Ok(q)
}

/// `y² − A x^{2n+2}` for a leading part `(y, (n+1) A x^{2n+1})`.
fn hamiltonian_b_integral(f_r: &QHVF, n: u32) -> Result<QHPoly> {
    let a = f_r.q.poly.coeff_of(2 * n + 1, 0) / int(n as i64 + 1);
    checked_integral(f_r, &Poly2::term(int(1), 0, 2) - &Poly2::term(a, 2 * n + 2, 0))
}

/// Integrability of the leading part per case.
pub fn leading_verdict(f_r: &QHVF, preform: &PreformResult) -> Result<LeadingVerdict> {
    match &preform.case {
        PreformCase::A { .. } => Err(QhError::UnsupportedShape(
            "case A leading part (y, b xⁿ y) is outside the supported classification".into(),
        )),
        PreformCase::B1 { n, c } => {
            let i = &Poly2::term(int(2) * c, 2 * n + 1, 0) - &Poly2::term(int(2 * *n as i64 + 1), 0, 2);
            let q = checked_integral(f_r, i)?;
            Ok(LeadingVerdict {
                integrable: true,
                reason: LeadingReason::HamiltonianQH,
                m1: None,
                m2: None,
                m: Some(q.degree),
                integral: Some(q),
                detail: "conservative leading part".into(),
            })
        }
        PreformCase::B3 { .. } => Ok(LeadingVerdict::not_integrable(
            LeadingReason::MultipleFactorObstruction,
            "h = -y²/2 has a repeated factor and μ ≠ 0",
        )),
        PreformCase::B2 { n, d } | PreformCase::B4 { n, d } => {
            let is_b4 = matches!(preform.case, PreformCase::B4 { .. });
            match d {
                DValue::Zero => {
                    let q = hamiltonian_b_integral(f_r, *n)?;
                    Ok(LeadingVerdict {
                        integrable: true,
                        reason: LeadingReason::HamiltonianQH,
                        m1: Some(1),
                        m2: Some(1),
                        m: Some(q.degree),
                        integral: Some(q),
                        detail: "d = 0: conservative leading part".into(),
                    })
                }
                DValue::IrrationalSquare { d2, .. } => Ok(LeadingVerdict::not_integrable(
                    LeadingReason::ResidueUnsolvable,
                    format!("d² = {d2} is not a rational square, so d cannot equal (m1−m2)/(m1+m2)"),
                )),
                DValue::Exact(dv) if !is_b4 => Ok(LeadingVerdict::not_integrable(
                    LeadingReason::ResidueUnsolvable,
                    format!("roots ±i give non-real residues for d = {dv} ≠ 0"),
                )),
                DValue::Exact(dv) => match find_m1_m2(dv) {
                    None => Ok(LeadingVerdict::not_integrable(
                        LeadingReason::ResidueUnsolvable,
                        format!("|d| = {} ≥ 1", dv.abs()),
                    )),
                    Some((m1, m2)) => {
                        let x = Poly2::term(int(1), n + 1, 0);
                        let i = &(&Poly2::y() - &x).pow(m1 as u32) * &(&Poly2::y() + &x).pow(m2 as u32);
                        let q = checked_integral(f_r, i)?;
                        Ok(LeadingVerdict {
                            integrable: true,
                            reason: LeadingReason::ResidueSolved,
                            m1: Some(m1),
                            m2: Some(m2),
                            m: Some(q.degree),
                            integral: Some(q),
                            detail: format!("d = {dv} = ({m1}−{m2})/({m1}+{m2})"),
                        })
                    }
                },
            }
        }
    }
}
