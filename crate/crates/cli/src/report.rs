//! JSON rendering. Rationals and polynomials are strings; object keys are sorted.

use serde_json::{json, Map, Value};
use sha2::{Digest, Sha256};

use qhnf_core::algebra::{QHType, Rat};
use qhnf_core::curves::{FormalCurve, LieSymmetryCheck, TruncatedIntegral};
use qhnf_core::leading::LeadingVerdict;
use qhnf_core::normal_form::{NormalFormResult, Obstruction, Verdict};
use qhnf_core::preform::{PreformCase, PreformResult};
use qhnf_core::transform::TransformLog;
use qhnf_core::vectorfield::{split_conservative_dissipative, PlanarVF};

use crate::system::Assignment;

fn s(r: &Rat) -> Value {
    Value::String(r.to_string())
}

fn qtype(t: QHType) -> Value {
    json!([t.t1, t.t2])
}

pub fn field(f: &PlanarVF) -> Value {
    json!({ "dx": f.p.to_string(), "dy": f.q.to_string() })
}

pub fn assignment(a: &Assignment) -> Value {
    Value::Object(a.iter().map(|(k, v)| (k.clone(), s(v))).collect())
}

pub fn digest(log: &TransformLog) -> String {
    hex::encode(Sha256::digest(log.canonical_text().as_bytes()))
}

fn transform(log: &TransformLog) -> Value {
    json!({
        "digest": digest(log),
        "steps": log.steps.iter().map(|st| st.to_string()).collect::<Vec<_>>(),
        "truncation": log.truncation.map(|(t, n)| json!({ "qtype": qtype(t), "n": n })),
    })
}

pub fn classification(pre: &PreformResult) -> Value {
    let leading = pre.leading();
    let split = split_conservative_dissipative(&leading);
    let mut m = Map::new();
    m.insert("case".into(), json!(pre.case.name()));
    m.insert("n".into(), json!(pre.case.n()));
    m.insert("qtype".into(), qtype(pre.qtype));
    m.insert("leading_degree".into(), json!(pre.r));
    m.insert("d".into(), json!(pre.d_value.to_string()));
    m.insert("d_squared".into(), s(&pre.d_value.square()));
    m.insert("sigma".into(), json!(pre.sigma));
    m.insert("a_coefficient".into(), pre.a_coefficient.as_ref().map_or(Value::Null, s));
    m.insert("scaled_to_template".into(), json!(pre.scaled_to_template));
    m.insert("leading".into(), field(&leading.to_planar()));
    m.insert("hamiltonian".into(), json!(split.h.poly.to_string()));
    m.insert("divergence_factor".into(), json!(split.mu.poly.to_string()));
    m.insert("transform".into(), transform(&pre.transform));
    m.insert("preform".into(), field(&pre.field));
    if let PreformCase::A { b, .. } = &pre.case {
        m.insert("b".into(), s(b));
    }
    if let PreformCase::B1 { c, .. } = &pre.case {
        m.insert("c".into(), s(c));
    }
    Value::Object(m)
}

pub fn leading_verdict(lv: &LeadingVerdict) -> Value {
    json!({
        "integrable": lv.integrable,
        "reason": lv.reason.to_string(),
        "m1": lv.m1,
        "m2": lv.m2,
        "integral": lv.integral.as_ref().map(|i| i.poly.to_string()),
        "integral_degree": lv.m,
        "detail": lv.detail,
    })
}

fn obstruction(o: &Obstruction) -> Value {
    json!({
        "degree": o.vf_degree,
        "cyclic_index": o.cyclic_index,
        "base_degree": o.base_degree,
        "base": o.base.to_string(),
        "element": o.element.to_string(),
        "coefficient": s(&o.coefficient),
        "invariant": o.invariant,
    })
}

pub fn verdict(v: &Verdict) -> Value {
    let mut m = Map::new();
    m.insert("kind".into(), json!(v.kind()));
    m.insert("summary".into(), json!(v.to_string()));
    match v {
        Verdict::NotIntegrable { first_obstruction_degree, coefficient } => {
            m.insert("first_obstruction_degree".into(), json!(first_obstruction_degree));
            m.insert("coefficient".into(), s(coefficient));
        }
        Verdict::NoObstructionUpTo { n } => {
            m.insert("up_to".into(), json!(n));
        }
        Verdict::LeadingNotIntegrable { reason, .. } => {
            m.insert("reason".into(), json!(reason.to_string()));
        }
        Verdict::Unsupported { case, .. } => {
            m.insert("case".into(), json!(case));
        }
    }
    Value::Object(m)
}

/// Full report; `with_field` adds the reduced field and the assembled normal form.
pub fn normal_form(nf: &NormalFormResult, v: &Verdict, with_field: bool) -> Value {
    let mut m = Map::new();
    m.insert("classification".into(), classification(&nf.preform));
    m.insert("leading_verdict".into(), nf.leading_verdict.as_ref().map_or(Value::Null, leading_verdict));
    m.insert("obstructions".into(), Value::Array(nf.obstructions.iter().map(obstruction).collect()));
    m.insert("verdict".into(), verdict(v));
    m.insert("truncation".into(), json!(nf.truncation));
    m.insert("transform_digest".into(), json!(digest(&nf.transform)));
    if with_field {
        m.insert("transform".into(), transform(&nf.transform));
        m.insert("reduced_field".into(), field(&nf.field));
        m.insert("normal_form".into(), field(&nf.assembled()));
    }
    Value::Object(m)
}

pub fn curves(cs: &[FormalCurve]) -> Value {
    Value::Array(
        cs.iter()
            .map(|c| {
                json!({
                    "branch": c.branch,
                    "curve": c.curve.to_string(),
                    "cofactor": c.cofactor.to_string(),
                    "truncation": c.truncation,
                })
            })
            .collect(),
    )
}

pub fn integral(ti: &TruncatedIntegral) -> Value {
    json!({
        "integral": ti.integral.to_string(),
        "first_failure": ti.first_failure(),
        "degrees": ti.degrees.iter().map(|d| json!({
            "degree": d.degree,
            "equation_degree": d.equation_degree,
            "solvable": d.solvable,
            "obstruction": d.obstruction.as_ref().map(|p| p.to_string()),
        })).collect::<Vec<_>>(),
    })
}

pub fn symmetry(c: &LieSymmetryCheck) -> Value {
    json!({
        "holds": c.holds(),
        "residual": field(&c.residual),
        "g0_is_d0": c.g0_is_d0,
        "mu0": s(&c.mu0),
        "mu0_is_r": c.mu0_is_r,
    })
}
