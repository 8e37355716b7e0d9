//! Degree-by-degree orbital normal form and the integrability verdict.

use std::fmt;

use num_traits::Zero;

use crate::algebra::poly::Poly2;
use crate::algebra::qh::{QHPoly, QHType};
use crate::algebra::rat::{int, Rat};
use crate::error::{QhError, Result};
use crate::homological::{c_block, op_ell, small_divisor_value, CorangeTable};
use crate::leading::{leading_verdict, LeadingReason, LeadingVerdict};
use crate::preform::{classify_preform, DValue, PreformCase, PreformResult};
use crate::subspace::combine;
use crate::transform::{push_forward, TransformLog, TransformStep};
use crate::vectorfield::{
    cdf_decompose, d0_planar, delta_complement, hamiltonian_planar, lie_bracket, split_conservative_dissipative,
    PlanarVF, Splitting, QHVF,
};

/// Near-identity change `x = u + P(u)` and time factor `1 + ν`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Generator {
    pub p: QHVF,
    pub nu: QHPoly,
}

impl Generator {
    pub fn is_zero(&self) -> bool {
        self.p.is_zero() && self.nu.is_zero()
    }
}

/// `ℒ(P, ν) = −[F_n, P] − ν F_n`.
pub fn homological_operator(f_n: &QHVF, gen: &Generator) -> PlanarVF {
    let fp = f_n.to_planar();
    lie_bracket(&fp, &gen.p.to_planar()).neg().sub(&fp.times(&gen.nu.poly))
}

/// Leading part with its splitting and the coranges used by the solver.
#[derive(Clone, Debug)]
pub struct HomologicalContext {
    pub f_n: QHVF,
    pub split: Splitting,
    pub coranges: CorangeTable,
}

impl HomologicalContext {
    pub fn new(f_n: &QHVF, i_m: Option<&QHPoly>) -> Result<Self> {
        let split = split_conservative_dissipative(f_n);
        if split.h.is_zero() {
            return Err(QhError::DecompositionUndefined);
        }
        let coranges = CorangeTable::new(f_n, &split.h, i_m)?;
        Ok(HomologicalContext { f_n: f_n.clone(), split, coranges })
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SolveOutcome {
    /// `c·D₀` with `c ∈ Cor(ℓ_{n+k})`.
    pub residual: QHVF,
    /// Coordinates of `c` on the corange basis.
    pub residual_coords: Vec<Rat>,
    pub generator: Generator,
}

/// Solves `ℒ(gen) + residual = target` blockwise: the Hamiltonian part through
/// the C-block, then the `D₀` part through `ℓ_{n+k}`, then the `F_n` part
/// through `ℓ_k` with `ν ∈ Cor(ℓ_k)`.
pub fn homological_solve(target: &QHVF, ctx: &HomologicalContext) -> Result<SolveOutcome> {
    let f_n = &ctx.f_n;
    let t = f_n.qtype;
    let n = f_n.degree;
    let k = target.degree - n;
    if k < 1 {
        return Err(QhError::TypeMismatch(format!("target degree {} is not above {n}", target.degree)));
    }
    let h = &ctx.split.h;
    let delta_dom = delta_complement(k + t.abs(), h, &[])?;
    let delta_cod = delta_complement(n + k + t.abs(), h, &[])?;
    let tgt = cdf_decompose(target, f_n, &ctx.split, &delta_cod)?;

    let (cmap, parts) = c_block(k, f_n, &ctx.split, &delta_dom, &delta_cod)?;
    if cmap.rank() < cmap.domain.dim() || cmap.domain.dim() != cmap.codomain.dim() {
        return Err(small_divisor(f_n, k));
    }
    let rhs = if tgt.g.is_zero() {
        vec![Rat::zero(); delta_cod.dim()]
    } else {
        delta_cod.coords_of(&tgt.g.poly).ok_or_else(|| QhError::Internal("g outside Δ".into()))?
    };
    let gc = cmap.matrix.solve(&rhs).ok_or_else(|| small_divisor(f_n, k))?;
    let g = combine(&gc, &delta_dom.elements);
    // `parts` decompose −[F_n, X_g] for each Δ element.
    let eta_b = combine(&gc, &parts.iter().map(|p| p.eta.poly.clone()).collect::<Vec<_>>());
    let lambda_b = combine(&gc, &parts.iter().map(|p| p.lambda.poly.clone()).collect::<Vec<_>>());

    let cor_d = ctx.coranges.get(n + k)?;
    let (eta, rd) = op_ell(n + k, f_n).split_range_corange(&(&tgt.eta.poly - &eta_b), &cor_d)?;

    let cor_f = ctx.coranges.get(k)?;
    let f_rhs = &(&tgt.lambda.poly - &lambda_b) + &eta.scale(&int(n));
    let (lambda, rf) = op_ell(k, f_n).split_range_corange(&f_rhs, &cor_f)?;
    let nu = -&combine(&rf, &cor_f.elements);

    let fp = f_n.to_planar();
    let p = hamiltonian_planar(&g).add(&d0_planar(t).times(&eta)).add(&fp.times(&lambda));
    let generator = Generator { p: QHVF::from_planar(&p, k, t)?, nu: QHPoly::new(nu, k, t)? };
    let c = combine(&rd, &cor_d.elements);
    let residual = QHVF::from_planar(&d0_planar(t).times(&c), n + k, t)?;
    if target.to_planar().sub(&homological_operator(f_n, &generator)) != residual.to_planar() {
        return Err(QhError::Internal(format!("homological equation not solved at degree {}", n + k)));
    }
    Ok(SolveOutcome { residual, residual_coords: rd, generator })
}

fn small_divisor(f_n: &QHVF, k: i64) -> QhError {
    let n = f_n.degree;
    QhError::SmallDivisor {
        k,
        n,
        condition: format!("|d| = {} makes the Hamiltonian block singular", small_divisor_value(n, k)),
    }
}

/// Push-forward of `F` under the change generated by `gen`, truncated at `N`.
pub fn apply_generator(f: &PlanarVF, gen: &Generator, t: QHType, n_trunc: i64) -> PlanarVF {
    push_forward(f, &gen.p.to_planar(), &gen.nu.poly, t, n_trunc)
}

/// A nonzero normal-form coefficient: `coefficient · element · D₀` at field
/// degree `vf_degree`, where `element = base · I_M^cyclic_index`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Obstruction {
    pub vf_degree: i64,
    pub cyclic_index: u32,
    pub base_degree: i64,
    pub base_index: usize,
    pub base: Poly2,
    pub element: Poly2,
    pub coefficient: Rat,
    /// Only the lowest-degree coefficient is independent of basis conventions.
    pub invariant: bool,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Verdict {
    NotIntegrable { first_obstruction_degree: i64, coefficient: Rat },
    NoObstructionUpTo { n: i64 },
    LeadingNotIntegrable { reason: LeadingReason, detail: String },
    Unsupported { case: String, detail: String },
}

impl Verdict {
    pub fn kind(&self) -> &'static str {
        match self {
            Verdict::NotIntegrable { .. } => "not-integrable",
            Verdict::NoObstructionUpTo { .. } => "no-obstruction-up-to",
            Verdict::LeadingNotIntegrable { .. } => "leading-not-integrable",
            Verdict::Unsupported { .. } => "unsupported",
        }
    }
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Verdict::NotIntegrable { first_obstruction_degree, coefficient } => {
                write!(f, "not integrable: obstruction {coefficient} at degree {first_obstruction_degree}")
            }
            Verdict::NoObstructionUpTo { n } => write!(f, "no obstruction up to degree {n}"),
            Verdict::LeadingNotIntegrable { reason, detail } => write!(f, "leading part not integrable ({reason}): {detail}"),
            Verdict::Unsupported { case, detail } => write!(f, "unsupported case {case}: {detail}"),
        }
    }
}

#[derive(Clone, Debug)]
pub struct NormalFormResult {
    pub preform: PreformResult,
    pub leading: QHVF,
    pub leading_verdict: Option<LeadingVerdict>,
    pub obstructions: Vec<Obstruction>,
    pub transform: TransformLog,
    pub truncation: i64,
    /// The reduced field, truncated at `truncation`.
    pub field: PlanarVF,
    pub verdict: Verdict,
}

impl NormalFormResult {
    /// `F_n + Σ coefficient·element·D₀`.
    pub fn assembled(&self) -> PlanarVF {
        let d0 = d0_planar(self.leading.qtype);
        self.obstructions
            .iter()
            .fold(self.leading.to_planar(), |acc, o| acc.add(&d0.times(&o.element.scale(&o.coefficient))))
    }
}

pub fn default_truncation(n: i64, m: i64) -> i64 {
    m + 2 * n + 2
}

/// First nonzero obstruction, else no obstruction up to the truncation.
pub fn integrability_verdict(nf: &NormalFormResult) -> Verdict {
    if matches!(nf.verdict, Verdict::LeadingNotIntegrable { .. } | Verdict::Unsupported { .. }) {
        return nf.verdict.clone();
    }
    let n = nf.leading.degree;
    match nf.obstructions.iter().find(|o| o.vf_degree > n) {
        Some(o) => Verdict::NotIntegrable { first_obstruction_degree: o.vf_degree, coefficient: o.coefficient.clone() },
        None => Verdict::NoObstructionUpTo { n: nf.truncation },
    }
}

fn preform_degree_bound(f: &PlanarVF, truncation: Option<i64>) -> u32 {
    let deg = f.p.max_total_degree().max(f.q.max_total_degree()).unwrap_or(0);
    (deg.max(truncation.unwrap_or(0).max(0) as u32)).max(16)
}

/// Preform, leading verdict and, for the integrable dissipative case, the
/// reduction of every degree up to the truncation.
pub fn orbital_normal_form(f: &PlanarVF, truncation: Option<i64>) -> Result<NormalFormResult> {
    let preform = classify_preform(f, preform_degree_bound(f, truncation))?;
    let leading = preform.leading();
    let t = preform.qtype;
    let n = preform.r;
    let early = |verdict: Verdict, lv: Option<LeadingVerdict>, n_tr: i64| NormalFormResult {
        preform: preform.clone(),
        leading: leading.clone(),
        leading_verdict: lv,
        obstructions: Vec::new(),
        transform: preform.transform.clone(),
        truncation: n_tr,
        field: preform.field.truncate(t, n_tr),
        verdict,
    };
    let fallback_n = truncation.unwrap_or(n + 1);
    if let PreformCase::A { .. } = preform.case {
        return Ok(early(
            Verdict::Unsupported { case: "A".into(), detail: "leading part (y, b xⁿ y) is not classified".into() },
            None,
            fallback_n,
        ));
    }
    let lv = leading_verdict(&leading, &preform)?;
    if !lv.integrable {
        let v = Verdict::LeadingNotIntegrable { reason: lv.reason, detail: lv.detail.clone() };
        return Ok(early(v, Some(lv), fallback_n));
    }
    let reducible = matches!(&preform.case, PreformCase::B4 { d: DValue::Exact(d), .. } if !d.is_zero());
    if !reducible {
        let v = Verdict::Unsupported {
            case: preform.case.name().into(),
            detail: "conservative leading part: the dissipative normal form does not apply".into(),
        };
        return Ok(early(v, Some(lv), fallback_n));
    }
    let i_m = lv.integral.clone().expect("integrable verdict carries I_M");
    let n_tr = truncation.unwrap_or_else(|| default_truncation(n, i_m.degree));
    if n_tr < n + 1 {
        return Err(QhError::TruncationTooSmall { truncation: n_tr, minimum: n + 1 });
    }
    let ctx = HomologicalContext::new(&leading, Some(&i_m))?;
    let mut field = preform.field.truncate(t, n_tr);
    let mut log = preform.transform.clone();
    let mut obstructions = Vec::new();
    for k in 1..=n_tr - n {
        let target = field.component(t, n + k);
        let out = homological_solve(&target, &ctx)?;
        if !out.generator.is_zero() {
            field = apply_generator(&field, &out.generator, t, n_tr);
            log.push(TransformStep::NearIdentity {
                generator: out.generator.p.to_planar(),
                nu: out.generator.nu.poly.clone(),
                qtype: t,
                truncation: n_tr,
            });
        }
        if field.component(t, n + k) != out.residual {
            return Err(QhError::Internal(format!("degree {} not reduced to its corange", n + k)));
        }
        for (slot, c) in ctx.coranges.slots(n + k)?.into_iter().zip(out.residual_coords) {
            if c.is_zero() {
                continue;
            }
            obstructions.push(Obstruction {
                vf_degree: n + k,
                cyclic_index: slot.cyclic_index,
                base_degree: slot.base_degree,
                base_index: slot.base_index,
                base: slot.base,
                element: slot.element,
                coefficient: c,
                invariant: obstructions.is_empty(),
            });
        }
    }
    log.truncation = Some((t, n_tr));
    let mut out = NormalFormResult {
        preform,
        leading,
        leading_verdict: Some(lv),
        obstructions,
        transform: log,
        truncation: n_tr,
        field,
        verdict: Verdict::NoObstructionUpTo { n: n_tr },
    };
    out.verdict = integrability_verdict(&out);
    Ok(out)
}
