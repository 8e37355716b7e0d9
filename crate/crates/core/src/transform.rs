//! Changes of variables and time applied to planar fields, recorded in order so
//! that a run can be replayed.

use std::fmt;

use num_traits::{One, Zero};

use crate::algebra::poly::Poly2;
use crate::algebra::qh::QHType;
use crate::algebra::rat::{int, Rat};
use crate::vectorfield::PlanarVF;

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum TransformStep {
    /// `x = S u`; the new field is `S⁻¹ F(S u)`.
    Linear { matrix: [[Rat; 2]; 2] },
    /// New coordinate `Y = y + coeff·x^power`.
    Shear { coeff: Rat, power: u32 },
    /// `x = sx·X`, `y = sy·Y`.
    Scale { sx: Rat, sy: Rat },
    /// Multiplication of the field by a nonzero constant.
    TimeScale { factor: Rat },
    /// Near-identity change `x = u + P(u)` followed by multiplication by `1 + nu`,
    /// truncated at field degree `truncation`.
    NearIdentity { generator: PlanarVF, nu: Poly2, qtype: QHType, truncation: i64 },
}

impl TransformStep {
    pub fn apply(&self, f: &PlanarVF) -> PlanarVF {
        match self {
            TransformStep::Linear { matrix } => linear_change(f, matrix),
            TransformStep::Shear { coeff, power } => shear(f, coeff, *power),
            TransformStep::Scale { sx, sy } => {
                let px = Poly2::term(sx.clone(), 1, 0);
                let py = Poly2::term(sy.clone(), 0, 1);
                PlanarVF {
                    p: f.p.compose(&px, &py).scale(&(Rat::one() / sx)),
                    q: f.q.compose(&px, &py).scale(&(Rat::one() / sy)),
                }
            }
            TransformStep::TimeScale { factor } => f.scale(factor),
            TransformStep::NearIdentity { generator, nu, qtype, truncation } => {
                push_forward(f, generator, nu, *qtype, *truncation)
            }
        }
    }
}

impl fmt::Display for TransformStep {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            TransformStep::Linear { matrix: m } => {
                write!(f, "linear [[{}, {}], [{}, {}]]", m[0][0], m[0][1], m[1][0], m[1][1])
            }
            TransformStep::Shear { coeff, power } => write!(f, "shear Y = y + {coeff}*x^{power}"),
            TransformStep::Scale { sx, sy } => write!(f, "scale x = {sx}*X, y = {sy}*Y"),
            TransformStep::TimeScale { factor } => write!(f, "time x{factor}"),
            TransformStep::NearIdentity { generator, nu, qtype, truncation } => {
                write!(f, "near-identity P = {generator}, nu = {nu}, t = {qtype}, N = {truncation}")
            }
        }
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct TransformLog {
    pub steps: Vec<TransformStep>,
    /// Final truncation `(t, N)` applied after replay, if any.
    pub truncation: Option<(QHType, i64)>,
}

impl TransformLog {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn push(&mut self, s: TransformStep) {
        self.steps.push(s);
    }

    pub fn extend(&mut self, o: &TransformLog) {
        self.steps.extend(o.steps.iter().cloned());
        if o.truncation.is_some() {
            self.truncation = o.truncation;
        }
    }

    pub fn is_identity(&self) -> bool {
        self.steps.is_empty()
    }

    pub fn replay(&self, f: &PlanarVF) -> PlanarVF {
        let out = self.steps.iter().fold(f.clone(), |acc, s| s.apply(&acc));
        match self.truncation {
            Some((t, n)) => out.truncate(t, n),
            None => out,
        }
    }

    /// One line per step; stable across runs.
    pub fn canonical_text(&self) -> String {
        let mut s: String = self.steps.iter().map(|st| format!("{st}\n")).collect();
        if let Some((t, n)) = self.truncation {
            s.push_str(&format!("truncate t = {t}, N = {n}\n"));
        }
        s
    }
}

fn linear_change(f: &PlanarVF, s: &[[Rat; 2]; 2]) -> PlanarVF {
    let px = &Poly2::term(s[0][0].clone(), 1, 0) + &Poly2::term(s[0][1].clone(), 0, 1);
    let py = &Poly2::term(s[1][0].clone(), 1, 0) + &Poly2::term(s[1][1].clone(), 0, 1);
    let fp = f.p.compose(&px, &py);
    let fq = f.q.compose(&px, &py);
    let det = &s[0][0] * &s[1][1] - &s[0][1] * &s[1][0];
    assert!(!det.is_zero(), "singular linear change");
    let inv = Rat::one() / det;
    PlanarVF {
        p: &fp.scale(&(&s[1][1] * &inv)) - &fq.scale(&(&s[0][1] * &inv)),
        q: &fq.scale(&(&s[0][0] * &inv)) - &fp.scale(&(&s[1][0] * &inv)),
    }
}

fn shear(f: &PlanarVF, c: &Rat, power: u32) -> PlanarVF {
    let py = &Poly2::y() - &Poly2::term(c.clone(), power, 0);
    let gp = f.p.compose(&Poly2::x(), &py);
    let gq = f.q.compose(&Poly2::x(), &py);
    let dshear = if power == 0 {
        Poly2::zero()
    } else {
        Poly2::term(c * int(power as i64), power - 1, 0)
    };
    PlanarVF { q: &gq + &(&dshear * &gp), p: gp }
}

/// `(1 + nu)·(I + DP)⁻¹·F(u + P(u))` truncated at field degree `n`.
///
/// `P` must have components of weight above `t1` and `t2` respectively, so
/// every correction raises the field degree and the series terminates.
pub fn push_forward(f: &PlanarVF, gen: &PlanarVF, nu: &Poly2, t: QHType, n: i64) -> PlanarVF {
    let (wx, wy) = (n + t.t1 as i64, n + t.t2 as i64);
    let px = &Poly2::x() + &gen.p;
    let py = &Poly2::y() + &gen.q;
    let composed = PlanarVF {
        p: f.p.compose_truncated(&px, &py, t, wx),
        q: f.q.compose_truncated(&px, &py, t, wy),
    };
    let mut term = composed.clone();
    let mut acc = composed;
    loop {
        let next = PlanarVF {
            p: -&term.derive(&gen.p).truncate_weight(t, wx),
            q: -&term.derive(&gen.q).truncate_weight(t, wy),
        };
        if next.is_zero() {
            break;
        }
        acc = acc.add(&next);
        term = next;
    }
    let unit = &Poly2::one() + nu;
    PlanarVF { p: acc.p.mul_truncated(&unit, t, wx), q: acc.q.mul_truncated(&unit, t, wy) }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::parse::parse_poly;
    use crate::algebra::rat::rat;

    fn vf(p: &str, q: &str) -> PlanarVF {
        PlanarVF::new(parse_poly(p).unwrap(), parse_poly(q).unwrap())
    }

    #[test]
    fn shear_removes_leading_coupling() {
        let f = vf("y + x^2", "x*y + x^3");
        let g = shear(&f, &int(1), 2);
        assert_eq!(g, vf("y", "3*x*y"));
    }

    #[test]
    fn linear_change_is_conjugation() {
        let f = vf("x - y", "x - y");
        let s = [[int(-1), int(0)], [int(-1), int(1)]];
        assert_eq!(linear_change(&f, &s), vf("y", "0"));
    }

    #[test]
    fn zero_generator_is_identity() {
        let t = QHType::new(1, 2).unwrap();
        let f = vf("y - 1/3*x^2 + x*y", "2*x^3 + y^2");
        assert_eq!(push_forward(&f, &PlanarVF::zero(), &Poly2::zero(), t, 6), f.truncate(t, 6));
    }

    #[test]
    fn scale_and_time_round_trip() {
        let f = vf("y + 3*x^2", "5*x^3 + x*y");
        let mut log = TransformLog::new();
        log.push(TransformStep::Scale { sx: rat(2, 3), sy: int(5) });
        log.push(TransformStep::TimeScale { factor: rat(1, 7) });
        log.push(TransformStep::TimeScale { factor: int(7) });
        log.push(TransformStep::Scale { sx: rat(3, 2), sy: rat(1, 5) });
        assert_eq!(log.replay(&f), f);
    }
}
