//! Normal preform of a nilpotent singularity: the leading quasi-homogeneous
//! part is brought to one of the cases A, B1, B2, B3, B4.

use std::fmt;

use num_traits::{One, Signed, Zero};

use crate::algebra::factor::share_common_factor;
use crate::algebra::poly::{Monomial, Poly2};
use crate::algebra::qh::QHType;
use crate::algebra::rat::{int, rat_sqrt, sign, Rat};
use crate::error::{QhError, Result};
use crate::transform::{TransformLog, TransformStep};
use crate::vectorfield::{PlanarVF, QHVF};

/// `ẋ = y + x f1(x) + y f(x,y)`, `ẏ = g1(x) + y g2(x) + y² g(x,y)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TaylorShape {
    pub f1: Poly2,
    pub g1: Poly2,
    pub g2: Poly2,
    pub f: Poly2,
    pub g: Poly2,
    /// Lowest x-degree of `g1`; `None` when `g1` vanishes.
    pub m_g: Option<u32>,
    /// Lowest degree among `f1`, `g2`; `None` when both vanish.
    pub n_f: Option<u32>,
}

impl TaylorShape {
    pub fn reconstruct(&self) -> PlanarVF {
        let x = Poly2::x();
        let y = Poly2::y();
        PlanarVF {
            p: &(&y + &(&x * &self.f1)) + &(&y * &self.f),
            q: &(&self.g1 + &(&y * &self.g2)) + &(&(&y * &y) * &self.g),
        }
    }
}

fn lowest_x_degree(p: &Poly2) -> Option<u32> {
    p.terms().map(|(m, _)| m.a).min()
}

fn is_jordan(f: &PlanarVF) -> bool {
    let l = f.linear_part();
    l[0][0].is_zero() && l[0][1].is_one() && l[1][0].is_zero() && l[1][1].is_zero()
}

pub fn taylor_shape(f: &PlanarVF) -> Result<TaylorShape> {
    if !is_jordan(f) {
        return Err(QhError::UnsupportedShape("linear part is not (y, 0)".into()));
    }
    if !f.p.coeff_of(0, 0).is_zero() || !f.q.coeff_of(0, 0).is_zero() {
        return Err(QhError::UnsupportedShape("the origin is not a singular point".into()));
    }
    let (mut f1, mut ff, mut g1, mut g2, mut g) =
        (Poly2::zero(), Poly2::zero(), Poly2::zero(), Poly2::zero(), Poly2::zero());
    for (m, c) in f.p.terms() {
        match (m.a, m.b) {
            (0, 1) => {}
            (a, 0) => f1.add_term(Monomial::new(a - 1, 0), c.clone()),
            (a, b) => ff.add_term(Monomial::new(a, b - 1), c.clone()),
        }
    }
    for (m, c) in f.q.terms() {
        match m.b {
            0 => g1.add_term(*m, c.clone()),
            1 => g2.add_term(Monomial::new(m.a, 0), c.clone()),
            b => g.add_term(Monomial::new(m.a, b - 2), c.clone()),
        }
    }
    let m_g = lowest_x_degree(&g1);
    let n_f = match (lowest_x_degree(&f1), lowest_x_degree(&g2)) {
        (Some(a), Some(b)) => Some(a.min(b)),
        (a, b) => a.or(b),
    };
    Ok(TaylorShape { f1, g1, g2, f: ff, g, m_g, n_f })
}

/// Value of the invariant `d`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum DValue {
    Exact(Rat),
    /// `d` is irrational; `d²` and the sign of `d` are exact.
    IrrationalSquare { d2: Rat, sign: i32 },
    Zero,
}

impl DValue {
    pub fn exact(&self) -> Option<Rat> {
        match self {
            DValue::Exact(d) => Some(d.clone()),
            DValue::Zero => Some(Rat::zero()),
            DValue::IrrationalSquare { .. } => None,
        }
    }

    pub fn square(&self) -> Rat {
        match self {
            DValue::Exact(d) => d * d,
            DValue::Zero => Rat::zero(),
            DValue::IrrationalSquare { d2, .. } => d2.clone(),
        }
    }
}

impl fmt::Display for DValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            DValue::Exact(d) => write!(f, "{d}"),
            DValue::Zero => write!(f, "0"),
            DValue::IrrationalSquare { d2, sign } => {
                write!(f, "{}sqrt({d2})", if *sign < 0 { "-" } else { "" })
            }
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum PreformCase {
    /// Leading part `(y, b xⁿ y)`.
    A { n: u32, b: Rat },
    /// Leading part `(y, c x^{2n})`, type `(2, 2n+1)`.
    B1 { n: u32, c: Rat },
    B2 { n: u32, d: DValue },
    B3 { n: u32, d: Rat },
    B4 { n: u32, d: DValue },
}

impl PreformCase {
    pub fn name(&self) -> &'static str {
        match self {
            PreformCase::A { .. } => "A",
            PreformCase::B1 { .. } => "B1",
            PreformCase::B2 { .. } => "B2",
            PreformCase::B3 { .. } => "B3",
            PreformCase::B4 { .. } => "B4",
        }
    }

    pub fn n(&self) -> u32 {
        match self {
            PreformCase::A { n, .. }
            | PreformCase::B1 { n, .. }
            | PreformCase::B2 { n, .. }
            | PreformCase::B3 { n, .. }
            | PreformCase::B4 { n, .. } => *n,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PreformResult {
    pub case: PreformCase,
    pub qtype: QHType,
    /// Leading field degree.
    pub r: i64,
    pub d_value: DValue,
    /// Sign of `A` for B2/B4.
    pub sigma: Option<i32>,
    /// `A` before any scaling, for B2/B3/B4.
    pub a_coefficient: Option<Rat>,
    /// Whether the leading part was scaled exactly onto the case template.
    pub scaled_to_template: bool,
    pub transform: TransformLog,
    /// The input after `transform`.
    pub field: PlanarVF,
}

impl PreformResult {
    pub fn leading(&self) -> QHVF {
        self.field.component(self.qtype, self.r)
    }
}

/// Conjugates a nilpotent nonzero linear part to `(y, 0)` by a rational similarity.
pub fn nilpotent_linear_normalize(f: &PlanarVF) -> Result<(PlanarVF, TransformLog)> {
    let l = f.linear_part();
    let trace = &l[0][0] + &l[1][1];
    let det = &l[0][0] * &l[1][1] - &l[0][1] * &l[1][0];
    let nonzero = l.iter().flatten().any(|v| !v.is_zero());
    if !trace.is_zero() || !det.is_zero() || !nonzero {
        return Err(QhError::NotNilpotent);
    }
    let mut log = TransformLog::new();
    if is_jordan(f) {
        return Ok((f.clone(), log));
    }
    // v with Lv ≠ 0, w = Lv, S = [w v].
    let (v, w) = if !l[0][1].is_zero() || !l[1][1].is_zero() {
        ([int(0), int(1)], [l[0][1].clone(), l[1][1].clone()])
    } else {
        ([int(1), int(0)], [l[0][0].clone(), l[1][0].clone()])
    };
    let s = [[w[0].clone(), v[0].clone()], [w[1].clone(), v[1].clone()]];
    let step = TransformStep::Linear { matrix: s };
    let g = step.apply(f);
    log.push(step);
    debug_assert!(is_jordan(&g));
    Ok((g, log))
}

/// Reads `(a, b, c)` of `(y + a x^{n+1}, b xⁿ y + c x^{2n+1})`.
fn leading_abc(f: &PlanarVF, n: u32) -> (Rat, Rat, Rat) {
    (f.p.coeff_of(n + 1, 0), f.q.coeff_of(n, 1), f.q.coeff_of(2 * n + 1, 0))
}

/// `d` from a leading part of type `(1, n+1)` with `c ≠ ab`.
pub fn compute_d(f_n: &QHVF) -> Result<DValue> {
    let n = f_n.qtype.t2 - 1;
    if f_n.qtype.t1 != 1 || f_n.degree != n as i64 {
        return Err(QhError::UnsupportedShape("leading part is not of type (1, n+1) and degree n".into()));
    }
    let (a, b, c) = leading_abc(&f_n.to_planar(), n);
    if c == &a * &b {
        return Err(QhError::UnsupportedShape("c = ab: the leading part is not isolated".into()));
    }
    let (big_d, big_a) = d_and_a(&a, &b, &c, n);
    Ok(d_value_of(&big_d, &big_a))
}

/// `D = (b + (n+1)a)/(2(n+1))`, `A = (c + (b − (n+1)a)²/(4(n+1)))/(n+1)`.
fn d_and_a(a: &Rat, b: &Rat, c: &Rat, n: u32) -> (Rat, Rat) {
    let n1 = int(n as i64 + 1);
    let big_d = (b + &n1 * a) / (int(2) * &n1);
    let diff = b - &n1 * a;
    let big_a = (c + &diff * &diff / (int(4) * &n1)) / &n1;
    (big_d, big_a)
}

fn d_value_of(big_d: &Rat, big_a: &Rat) -> DValue {
    if big_d.is_zero() {
        return DValue::Zero;
    }
    if big_a.is_zero() {
        return DValue::Exact(big_d.clone());
    }
    match rat_sqrt(&big_a.abs()) {
        Some(s) => DValue::Exact(big_d / s),
        None => DValue::IrrationalSquare { d2: big_d * big_d / big_a.abs(), sign: sign(big_d) },
    }
}

/// Classifies the leading part, applying the preform transformations.
///
/// A linear part that is nilpotent but not in Jordan form is normalized first.
/// `max_degree` bounds the `c = ab` re-iteration loop at `⌈max_degree/2⌉` rounds.
pub fn classify_preform(f: &PlanarVF, max_degree: u32) -> Result<PreformResult> {
    let (mut g, mut log) = nilpotent_linear_normalize(f)?;
    let max_rounds = max_degree.div_ceil(2).max(1);
    let mut rounds = 0;
    loop {
        let shape = taylor_shape(&g)?;
        let n = match (shape.m_g, shape.n_f) {
            (None, None) => return Err(QhError::NonIsolated { truncation: max_degree }),
            (Some(m), nf) if nf.is_none_or(|nf| m < 2 * nf + 1) => {
                if m % 2 == 0 {
                    let n = m / 2;
                    let t = QHType::new(2, 2 * n as i64 + 1)?;
                    let c = shape.g1.coeff_of(2 * n, 0);
                    return Ok(PreformResult {
                        case: PreformCase::B1 { n, c },
                        qtype: t,
                        r: 2 * n as i64 - 1,
                        d_value: DValue::Zero,
                        sigma: None,
                        a_coefficient: None,
                        scaled_to_template: false,
                        transform: log,
                        field: g,
                    });
                }
                (m - 1) / 2
            }
            (_, Some(nf)) => nf,
            (Some(_), None) => unreachable!("guarded above"),
        };
        let t = QHType::new(1, n as i64 + 1)?;
        let (a, b, c) = leading_abc(&g, n);
        let n1 = int(n as i64 + 1);
        if c == &a * &b {
            if rounds >= max_rounds {
                return Err(QhError::UndecidedAtTruncation { iterations: rounds });
            }
            rounds += 1;
            if !a.is_zero() {
                let step = TransformStep::Shear { coeff: a.clone(), power: n + 1 };
                g = step.apply(&g);
                log.push(step);
            }
            let b_new = &b + &n1 * &a;
            if !b_new.is_zero() {
                return Ok(PreformResult {
                    case: PreformCase::A { n, b: b_new },
                    qtype: t,
                    r: n as i64,
                    d_value: DValue::Zero,
                    sigma: None,
                    a_coefficient: None,
                    scaled_to_template: false,
                    transform: log,
                    field: g,
                });
            }
            continue;
        }
        let (big_d, big_a) = d_and_a(&a, &b, &c, n);
        let beta = &b / (int(2) * &n1) - &a / int(2);
        if !beta.is_zero() {
            let step = TransformStep::Shear { coeff: -beta, power: n + 1 };
            g = step.apply(&g);
            log.push(step);
        }
        let expect = PlanarVF {
            p: &Poly2::y() + &Poly2::term(big_d.clone(), n + 1, 0),
            q: &Poly2::term(&n1 * &big_a, 2 * n + 1, 0) + &Poly2::term(&n1 * &big_d, n, 1),
        };
        if g.component(t, n as i64).to_planar() != expect {
            return Err(QhError::Internal("preform shear did not produce the expected leading part".into()));
        }
        let d_value = d_value_of(&big_d, &big_a);
        if big_a.is_zero() {
            return Ok(PreformResult {
                case: PreformCase::B3 { n, d: big_d },
                qtype: t,
                r: n as i64,
                d_value,
                sigma: Some(0),
                a_coefficient: Some(big_a),
                scaled_to_template: true,
                transform: log,
                field: g,
            });
        }
        let sigma = sign(&big_a);
        let mut scaled = false;
        if let Some(s) = rat_sqrt(&big_a.abs()) {
            scaled = true;
            if !s.is_one() {
                for step in [
                    TransformStep::Scale { sx: Rat::one(), sy: s.clone() },
                    TransformStep::TimeScale { factor: Rat::one() / &s },
                ] {
                    g = step.apply(&g);
                    log.push(step);
                }
            }
        }
        let case = if sigma < 0 {
            PreformCase::B2 { n, d: d_value.clone() }
        } else {
            PreformCase::B4 { n, d: d_value.clone() }
        };
        return Ok(PreformResult {
            case,
            qtype: t,
            r: n as i64,
            d_value,
            sigma: Some(sigma),
            a_coefficient: Some(big_a),
            scaled_to_template: scaled,
            transform: log,
            field: g,
        });
    }
}

/// Template leading part `(y + d x^{n+1}, σ(n+1) x^{2n+1} + (n+1) d xⁿ y)`.
pub fn b_template(n: u32, sigma: i32, d: &Rat) -> PlanarVF {
    let n1 = int(n as i64 + 1);
    PlanarVF {
        p: &Poly2::y() + &Poly2::term(d.clone(), n + 1, 0),
        q: &Poly2::term(&n1 * int(sigma as i64), 2 * n + 1, 0) + &Poly2::term(&n1 * d, n, 1),
    }
}

/// Template of case B3: `(y + d x^{n+1}, (n+1) d xⁿ y)`.
pub fn b3_template(n: u32, d: &Rat) -> PlanarVF {
    b_template(n, 0, d)
}

/// Whether the two components of a leading part have no common factor.
pub fn leading_is_isolated(f_r: &QHVF) -> Result<bool> {
    Ok(!share_common_factor(&f_r.p, &f_r.q)?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::parse::parse_poly;
    use crate::algebra::rat::rat;
    use proptest::prelude::*;

    fn vf(p: &str, q: &str) -> PlanarVF {
        PlanarVF::new(parse_poly(p).unwrap(), parse_poly(q).unwrap())
    }

    #[test]
    fn linear_normalization() {
        let (g, log) = nilpotent_linear_normalize(&vf("y + x^2", "x^3")).unwrap();
        assert!(log.is_identity());
        assert_eq!(g, vf("y + x^2", "x^3"));
        let f = vf("x - y + x^2", "x - y");
        let (g, log) = nilpotent_linear_normalize(&f).unwrap();
        assert_eq!(g.linear_part(), [[int(0), int(1)], [int(0), int(0)]]);
        assert_eq!(log.replay(&f), g);
        assert_eq!(nilpotent_linear_normalize(&vf("x", "y")), Err(QhError::NotNilpotent));
        assert_eq!(nilpotent_linear_normalize(&vf("x^2", "y^2")), Err(QhError::NotNilpotent));
    }

    #[test]
    fn taylor_examples() {
        let s = taylor_shape(&vf("y", "x^2")).unwrap();
        assert_eq!((s.m_g, s.n_f), (Some(2), None));
        assert_eq!(s.g1, parse_poly("x^2").unwrap());
        let s = taylor_shape(&vf("y - 1/3*x^2", "2*x^3 - 2/3*x*y")).unwrap();
        assert_eq!(s.f1, parse_poly("-1/3*x").unwrap());
        assert_eq!((s.m_g, s.n_f), (Some(3), Some(1)));
        let s = taylor_shape(&vf("y", "x*y")).unwrap();
        assert_eq!((s.m_g, s.n_f), (None, Some(1)));
        let f = vf("y + 2*x^3 + x*y^2 - y^3", "5*x^4 + x^2*y - 7*x*y^2 + y^3");
        assert_eq!(taylor_shape(&f).unwrap().reconstruct(), f);
    }

    #[test]
    fn case_table() {
        let r = classify_preform(&vf("y", "x^2"), 8).unwrap();
        assert!(matches!(r.case, PreformCase::B1 { n: 1, .. }));
        assert_eq!((r.qtype, r.r), (QHType::new(2, 3).unwrap(), 1));

        let r = classify_preform(&vf("y - 1/3*x^2 + x*y", "2*x^3 - 2/3*x*y + y^2"), 8).unwrap();
        assert_eq!(r.case, PreformCase::B4 { n: 1, d: DValue::Exact(rat(-1, 3)) });
        assert_eq!((r.qtype, r.r), (QHType::new(1, 2).unwrap(), 1));
        assert!(r.transform.is_identity());

        let r = classify_preform(&vf("y + x^2", "x*y + x^3"), 8).unwrap();
        assert_eq!(r.case, PreformCase::A { n: 1, b: int(3) });
        assert_eq!(r.transform.steps, vec![TransformStep::Shear { coeff: int(1), power: 2 }]);

        let r = classify_preform(&vf("y", "-x^3"), 8).unwrap();
        assert_eq!(r.case, PreformCase::B2 { n: 1, d: DValue::Zero });
        assert_eq!(r.sigma, Some(-1));

        let r = classify_preform(&b3_template(2, &rat(1, 2)), 8).unwrap();
        assert_eq!(r.case, PreformCase::B3 { n: 2, d: rat(1, 2) });
        assert!(r.transform.is_identity());

        assert_eq!(
            classify_preform(&vf("y + x*y", "y^2"), 8),
            Err(QhError::NonIsolated { truncation: 8 })
        );
    }

    #[test]
    fn d_formula() {
        let t = QHType::new(1, 2).unwrap();
        let f = QHVF::from_planar(&vf("y - 1/3*x^2", "2*x^3 - 2/3*x*y"), 1, t).unwrap();
        assert_eq!(compute_d(&f).unwrap(), DValue::Exact(rat(-1, 3)));
        let f = QHVF::from_planar(&vf("y", "5*x^3"), 1, t).unwrap();
        assert_eq!(compute_d(&f).unwrap(), DValue::Zero);
        let f = QHVF::from_planar(&vf("y + x^2", "x*y"), 1, t).unwrap();
        assert_eq!(compute_d(&f).unwrap(), DValue::Exact(int(3)));
        let f = QHVF::from_planar(&vf("y + x^2", "x*y + 2*x^3"), 1, t).unwrap();
        assert!(matches!(compute_d(&f).unwrap(), DValue::IrrationalSquare { sign: 1, .. }));
    }

    #[test]
    fn irrational_scaling_left_unapplied() {
        let r = classify_preform(&vf("y + x^2", "x*y + 2*x^3"), 8).unwrap();
        assert!(matches!(r.case, PreformCase::B4 { n: 1, d: DValue::IrrationalSquare { .. } }));
        assert!(!r.scaled_to_template);
    }

    #[test]
    fn rational_scaling_reaches_template() {
        // A = 4, D = 1: d = 1/2 after scaling y by 2 and time by 1/2.
        let f = vf("y + x^2 + x^2*y", "8*x^3 + 2*x*y + y^2");
        let r = classify_preform(&f, 8).unwrap();
        assert_eq!(r.case, PreformCase::B4 { n: 1, d: DValue::Exact(rat(1, 2)) });
        assert_eq!(r.leading().to_planar(), b_template(1, 1, &rat(1, 2)));
        assert_eq!(r.transform.replay(&f), r.field);
    }

    #[test]
    fn reiteration_loop_terminates() {
        // c = ab with b + (n+1)a = 0 forces another round.
        let f = vf("y + x^2", "-2*x*y - 2*x^3 + x^5");
        let r = classify_preform(&f, 8).unwrap();
        assert_eq!(r.transform.replay(&f), r.field);
        assert_ne!(r.case.name(), "A");
        let r2 = classify_preform(&f, 0);
        assert!(r2.is_ok() || matches!(r2, Err(QhError::UndecidedAtTruncation { .. })));
    }

    fn arb_b_field() -> impl Strategy<Value = PlanarVF> {
        (1u32..4, -6i64..7, -6i64..7, -6i64..7, -4i64..5, -4i64..5).prop_map(|(n, a, b, c, e1, e2)| {
            let p = &(&Poly2::y() + &Poly2::term(rat(a, 3), n + 1, 0)) + &Poly2::term(int(e1), n + 1, 1);
            let q = &(&Poly2::term(rat(b, 2), n, 1) + &Poly2::term(int(c), 2 * n + 1, 0))
                + &Poly2::term(int(e2), 0, 2);
            PlanarVF::new(p, q)
        })
    }

    proptest! {
        #[test]
        fn b_cases_replay_isolate_and_are_idempotent(f in arb_b_field()) {
            let Ok(r) = classify_preform(&f, 12) else { return Ok(()); };
            prop_assert_eq!(r.transform.replay(&f), r.field.clone());
            if r.case.name().starts_with('B') {
                prop_assert!(leading_is_isolated(&r.leading()).unwrap());
                let again = classify_preform(&r.field, 12).unwrap();
                prop_assert_eq!(&again.case, &r.case);
                prop_assert!(again.transform.is_identity());
            }
            if let (PreformCase::B4 { n, d: DValue::Exact(d) }, true) = (&r.case, r.scaled_to_template) {
                prop_assert_eq!(r.leading().to_planar(), b_template(*n, 1, d));
            }
        }
    }
}
