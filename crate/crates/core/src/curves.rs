//! Formal invariant curves, truncated first integrals and certificate checks.

use num_traits::Zero;

use crate::algebra::poly::Poly2;
use crate::algebra::qh::{qh_basis, QHPoly, QHType};
use crate::algebra::rat::{int, Rat};
use crate::error::{QhError, Result};
use crate::homological::{op_delta, op_ell, op_ell_tilde, subspace_analysis};
use crate::subspace::{combine, split_direct_sum};
use crate::vectorfield::{d0_field, lie_bracket, PlanarVF};

/// `C = y ∓ x^{n+1} + Σ_{j>n+1} c_j x^j` with `∇C·F ≡ K C` through degree `N+n`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FormalCurve {
    /// `-1` for `y − x^{n+1}`, `+1` for `y + x^{n+1}`.
    pub branch: i32,
    pub curve: Poly2,
    pub cofactor: Poly2,
    pub truncation: i64,
}

fn type_for(n: u32) -> QHType {
    QHType::new(1, n as i64 + 1).expect("valid type")
}

/// `∇C·F − K C` up to degree `N + n`.
pub fn curve_residual(f: &PlanarVF, c: &FormalCurve, n: u32) -> Poly2 {
    let t = type_for(n);
    (&f.derive(&c.curve) - &(&c.cofactor * &c.curve)).truncate_weight(t, c.truncation + n as i64)
}

fn leading_cofactor(f_n: &crate::vectorfield::QHVF, lead: &QHPoly) -> Result<QHPoly> {
    let n = f_n.degree;
    let t = f_n.qtype;
    let target = f_n.to_planar().derive(&lead.poly);
    let del = op_delta(lead.degree + n, lead);
    let coords = del
        .codomain
        .coords_of(&target)
        .and_then(|c| del.matrix.solve(&c))
        .ok_or_else(|| QhError::Internal(format!("{} is not invariant for the leading part", lead.poly)))?;
    QHPoly::new(combine(&coords, &del.domain.elements), n, t)
}

/// The two formal invariant curves through the origin of a field whose
/// leading part, of type `(1, n+1)`, has the invariant curves `y ∓ x^{n+1}`.
/// Each `C_j` is taken in `⟨x^j⟩`.
pub fn formal_invariant_curves(f: &PlanarVF, n: u32, n_trunc: i64) -> Result<[FormalCurve; 2]> {
    let t = type_for(n);
    let ni = n as i64;
    if n_trunc < ni + 1 {
        return Err(QhError::TruncationTooSmall { truncation: n_trunc, minimum: ni + 1 });
    }
    let f_n = f.component(t, ni);
    let ft = f.truncate(t, n_trunc);
    let mut out = Vec::with_capacity(2);
    for branch in [-1i32, 1] {
        let lead = &Poly2::y() + &Poly2::term(int(branch as i64), n + 1, 0);
        let lead_q = QHPoly::new(lead.clone(), ni + 1, t)?;
        let k_n = leading_cofactor(&f_n, &lead_q)?;
        let mut c = FormalCurve { branch, curve: lead.clone(), cofactor: k_n.poly.clone(), truncation: n_trunc };
        for j in ni + 2..=n_trunc {
            let r = (&ft.derive(&c.curve) - &(&c.cofactor * &c.curve)).weight_part(t, ni + j);
            let xj = Poly2::term(int(1), j as u32, 0);
            let first = vec![op_ell_tilde(j, &f_n, &k_n).apply(&xj)?];
            let second: Vec<Poly2> = qh_basis(j - 1, t).into_iter().map(|m| lead.mul_monomial(m)).collect();
            let (a, b) = split_direct_sum(&-&r, &first, &second, ni + j, t).map_err(|_| QhError::SmallDivisor {
                k: j,
                n: ni,
                condition: format!("|d| = 1 + 2(n+1)/{} blocks the curve at degree {j}", j - ni - 1),
            })?;
            c.curve = &c.curve + &xj.scale(&a[0]);
            let monos: Vec<Poly2> = qh_basis(j - 1, t).into_iter().map(Poly2::monomial).collect();
            c.cofactor = &c.cofactor - &combine(&b, &monos);
        }
        if !curve_residual(f, &c, n).is_zero() {
            return Err(QhError::Internal("invariant-curve recursion left a residual".into()));
        }
        out.push(c);
    }
    let second = out.pop().expect("two branches");
    let first = out.pop().expect("two branches");
    Ok([first, second])
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DegreeReport {
    /// Degree of the unknown component `I_j`.
    pub degree: i64,
    /// Degree `j + n` of the equation it enters.
    pub equation_degree: i64,
    pub solvable: bool,
    /// Component of the right-hand side outside `Range(ℓ)`, when unsolvable.
    pub obstruction: Option<Poly2>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TruncatedIntegral {
    pub integral: Poly2,
    pub degrees: Vec<DegreeReport>,
}

impl TruncatedIntegral {
    /// Equation degree of the first unsolvable component.
    pub fn first_failure(&self) -> Option<i64> {
        self.degrees.iter().find(|d| !d.solvable).map(|d| d.equation_degree)
    }
}

/// Extends `I_M` degree by degree with `∇I·F = 0`; stops at the first degree
/// whose equation has no solution. Kernel components are set to zero.
pub fn truncated_first_integral(f: &PlanarVF, t: QHType, n: i64, i_m: &QHPoly, n_trunc: i64) -> Result<TruncatedIntegral> {
    let f_n = f.component(t, n);
    if !f_n.to_planar().derive(&i_m.poly).is_zero() {
        return Err(QhError::Internal(format!("{} is not a first integral of the leading part", i_m.poly)));
    }
    let ft = f.truncate(t, n_trunc);
    let mut integral = i_m.poly.clone();
    let mut degrees = Vec::new();
    for j in i_m.degree + 1..=n_trunc {
        let rhs = ft.derive(&integral).weight_part(t, j + n);
        let l = op_ell(j + n, &f_n);
        let cor = subspace_analysis(&l, &[])?.corange;
        let (u, c) = l.split_range_corange(&-&rhs, &cor)?;
        if c.iter().any(|v| !v.is_zero()) {
            degrees.push(DegreeReport { degree: j, equation_degree: j + n, solvable: false, obstruction: Some(combine(&c, &cor.elements)) });
            break;
        }
        integral = &integral + &u;
        degrees.push(DegreeReport { degree: j, equation_degree: j + n, solvable: true, obstruction: None });
    }
    Ok(TruncatedIntegral { integral, degrees })
}

/// First integral `Π f_i^{e_i} · exp(g)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DarbouxCertificate {
    pub factors: Vec<(Poly2, u32)>,
    pub exp_part: Poly2,
}

/// `∇P·F + P (∇g·F)`; zero exactly when `P e^g` is a first integral.
pub fn check_darboux_exponential(f: &PlanarVF, cert: &DarbouxCertificate) -> Poly2 {
    let p = cert.factors.iter().fold(Poly2::one(), |acc, (fi, e)| &acc * &fi.pow(*e));
    &f.derive(&p) + &(&p * &f.derive(&cert.exp_part))
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LieSymmetryCheck {
    pub residual: PlanarVF,
    pub g0_is_d0: bool,
    pub mu0: Rat,
    pub mu0_is_r: bool,
}

impl LieSymmetryCheck {
    pub fn holds(&self) -> bool {
        self.residual.is_zero()
    }
}

/// `[F, G] − μ F` truncated at field degree `N`, with the normalisation checks
/// `G₀ = D₀` and `μ(0) = r`.
pub fn check_lie_symmetry(f: &PlanarVF, g: &PlanarVF, mu: &Poly2, t: QHType, n_trunc: i64, r: i64) -> LieSymmetryCheck {
    let residual = lie_bracket(f, g).sub(&f.times(mu)).truncate(t, n_trunc);
    let mu0 = mu.coeff_of(0, 0);
    LieSymmetryCheck {
        residual,
        g0_is_d0: g.component(t, 0) == d0_field(t),
        mu0_is_r: mu0 == int(r),
        mu0,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::parse::parse_poly;
    use crate::algebra::rat::rat;
    use crate::normal_form::{orbital_normal_form, Verdict};
    use crate::preform::b_template;
    use crate::vectorfield::d0_planar;

    fn p(s: &str) -> Poly2 {
        parse_poly(s).unwrap()
    }

    fn t12() -> QHType {
        QHType::new(1, 2).unwrap()
    }

    fn system(a1: Rat, b0: Rat, b2: Rat) -> PlanarVF {
        PlanarVF::new(
            &p("y - 1/3*x^2") + &p("x*y").scale(&a1),
            &(&p("2*x^3 - 2/3*x*y") + &p("x^4").scale(&b0)) + &p("y^2").scale(&b2),
        )
    }

    fn i6() -> QHPoly {
        QHPoly::from_poly(p("(y - x^2)*(y + x^2)^2"), t12()).unwrap()
    }

    #[test]
    fn leading_curves_are_exact() {
        for n in 1..=3u32 {
            let d = rat(-2, 5);
            let f = b_template(n, 1, &d);
            let [c1, c2] = formal_invariant_curves(&f, n, 3 * n as i64 + 4).unwrap();
            let xn = Poly2::term(int(1), n + 1, 0);
            assert_eq!(c1.curve, &Poly2::y() - &xn);
            assert_eq!(c2.curve, &Poly2::y() + &xn);
            let n1 = int(n as i64 + 1);
            assert_eq!(c1.cofactor, Poly2::term(&n1 * (&d - int(1)), n, 0));
            assert_eq!(c2.cofactor, Poly2::term(&n1 * (&d + int(1)), n, 0));
        }
    }

    #[test]
    fn section5_curves() {
        let f = system(int(0), int(3), int(-3));
        let [c1, c2] = formal_invariant_curves(&f, 1, 10).unwrap();
        assert_eq!(c1.cofactor.weight_part(t12(), 1), p("-8/3*x"));
        assert_eq!(c2.cofactor.weight_part(t12(), 1), p("4/3*x"));
        assert_eq!(c1.curve.weight_part(t12(), 2), p("y - x^2"));
        assert!(curve_residual(&f, &c1, 1).is_zero());
        assert!(curve_residual(&f, &c2, 1).is_zero());
        // On this system the curves are exact: I = (y−x²)(y+x²)² e^{9x}.
        assert_eq!(c1.curve, p("y - x^2"));
    }

    #[test]
    fn curves_on_generic_system() {
        let f = system(int(1), int(2), rat(-1, 2));
        let [c1, c2] = formal_invariant_curves(&f, 1, 9).unwrap();
        for c in [&c1, &c2] {
            assert!(curve_residual(&f, c, 1).is_zero());
            for (m, _) in (&c.curve - &c.curve.weight_part(t12(), 2)).terms() {
                assert_eq!(m.b, 0, "higher terms lie in ⟨x^j⟩");
            }
        }
    }

    #[test]
    fn truncated_integral() {
        let f = b_template(1, 1, &rat(-1, 3));
        let r = truncated_first_integral(&f, t12(), 1, &i6(), 12).unwrap();
        assert_eq!(r.integral, i6().poly);
        assert!(r.degrees.iter().all(|d| d.solvable));

        let f = system(int(0), int(3), int(-3));
        let r = truncated_first_integral(&f, t12(), 1, &i6(), 12).unwrap();
        assert_eq!(r.first_failure(), None);
        assert_eq!(r.degrees.len(), 6);

        let f = system(int(1), int(0), int(0));
        let r = truncated_first_integral(&f, t12(), 1, &i6(), 12).unwrap();
        assert_eq!(r.first_failure(), Some(8));
    }

    #[test]
    fn integral_agrees_with_normal_form() {
        for (a1, b0, b2) in [(0, 2, -2), (1, 0, 0), (0, 1, 0), (1, -1, 1)] {
            let f = system(int(a1), int(b0), int(b2));
            let nf = orbital_normal_form(&f, Some(10)).unwrap();
            let r = truncated_first_integral(&f, t12(), 1, &i6(), 16).unwrap();
            match nf.verdict {
                Verdict::NoObstructionUpTo { .. } => assert_eq!(r.first_failure(), None),
                Verdict::NotIntegrable { first_obstruction_degree, .. } => {
                    assert_eq!(r.first_failure(), Some(6 + first_obstruction_degree))
                }
                v => panic!("{v:?}"),
            }
        }
    }

    #[test]
    fn darboux_certificates() {
        for b2 in [int(1), int(-2), rat(5, 3)] {
            let f = system(int(0), -b2.clone(), b2.clone());
            let cert = DarbouxCertificate {
                factors: vec![(p("y - x^2"), 1), (p("y + x^2"), 2)],
                exp_part: Poly2::term(int(-3) * &b2, 1, 0),
            };
            assert!(check_darboux_exponential(&f, &cert).is_zero());
        }
        let f1 = b_template(1, 1, &rat(-1, 3));
        let good = DarbouxCertificate { factors: vec![(p("y - x^2"), 1), (p("y + x^2"), 2)], exp_part: Poly2::zero() };
        assert!(check_darboux_exponential(&f1, &good).is_zero());
        let bad = DarbouxCertificate { factors: vec![(p("y - x^2"), 2), (p("y + x^2"), 2)], exp_part: Poly2::zero() };
        assert!(!check_darboux_exponential(&f1, &bad).is_zero());
    }

    #[test]
    fn lie_symmetries() {
        let t = t12();
        let f1 = b_template(1, 1, &rat(-1, 3));
        let c = check_lie_symmetry(&f1, &d0_planar(t), &Poly2::constant(int(1)), t, 8, 1);
        assert!(c.holds() && c.g0_is_d0 && c.mu0_is_r);
        let f = system(int(1), int(0), int(0));
        let c = check_lie_symmetry(&f, &f, &Poly2::zero(), t, 8, 1);
        assert!(c.holds() && !c.g0_is_d0);
        let g = PlanarVF::new(p("x + y^2"), p("2*y + x^3"));
        assert!(!check_lie_symmetry(&f, &g, &Poly2::constant(int(1)), t, 8, 1).holds());
    }
}
