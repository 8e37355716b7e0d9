mod report;
mod system;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use rayon::prelude::*;
use serde_json::{json, Value};
use thiserror::Error;

use qhnf_core::algebra::parse::parse_expr;
use qhnf_core::algebra::QHType;
use qhnf_core::curves::{
    check_darboux_exponential, check_lie_symmetry, formal_invariant_curves, truncated_first_integral,
    DarbouxCertificate,
};
use qhnf_core::normal_form::{default_truncation, integrability_verdict, orbital_normal_form, Verdict};
use qhnf_core::preform::{classify_preform, PreformCase, PreformResult};
use qhnf_core::vectorfield::PlanarVF;
use qhnf_core::QhError;

use system::{grid_points, parse_assignment, parse_grid_axis, parse_type, Assignment, SystemFile};

const EXIT_ERROR: u8 = 1;
const EXIT_NOT_INTEGRABLE: u8 = 10;
const EXIT_NO_OBSTRUCTION: u8 = 11;
const EXIT_LEADING_NOT_INTEGRABLE: u8 = 12;
const EXIT_UNSUPPORTED: u8 = 13;

#[derive(Debug, Error)]
enum CliError {
    #[error(transparent)]
    Core(#[from] QhError),
    #[error("{0}")]
    Usage(String),
    #[error("{path}: {source}")]
    Io { path: PathBuf, source: std::io::Error },
}

type CliResult<T> = Result<T, CliError>;

#[derive(Parser)]
#[command(name = "qhnf", version, about = "Exact normal forms and integrability verdicts for nilpotent planar singularities")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Clone)]
struct Common {
    /// System file with `params`, `dx = ...` and `dy = ...` statements.
    #[arg(short = 'f', long = "file")]
    file: PathBuf,
    /// Parameter values, `name=value,...`; may be repeated.
    #[arg(long = "assign")]
    assign: Vec<String>,
    /// Truncation degree N; defaults to M + 2n + 2.
    #[arg(short = 'N', long = "truncation")]
    truncation: Option<i64>,
    /// `auto` or `t1,t2`; a forced type must agree with the detected one.
    #[arg(long = "type", default_value = "auto")]
    qtype: String,
    /// Write the JSON report here instead of stdout.
    #[arg(long = "json")]
    json: Option<PathBuf>,
}

#[derive(Subcommand)]
enum Command {
    /// Preform case, quasi-homogeneous type, d and the leading splitting.
    Classify(Common),
    /// Integrability verdict from the orbital normal form.
    Verdict(Common),
    /// Orbital normal form with obstructions, transform and reduced field.
    Nf(Common),
    /// Formal invariant curves through the origin.
    Curves(Common),
    /// Degree-by-degree extension of the leading first integral.
    Integral(Common),
    /// Checks `Π fᵢ^eᵢ · exp(g)` as a first integral.
    CheckDarboux {
        #[command(flatten)]
        common: Common,
        /// `expr:exponent`; may be repeated.
        #[arg(long = "factor")]
        factor: Vec<String>,
        /// Exponential part `g`.
        #[arg(long = "exp", default_value = "0")]
        exp: String,
    },
    /// Checks `[F, G] = μ F` through the truncation.
    CheckSymmetry {
        #[command(flatten)]
        common: Common,
        #[arg(long = "gx")]
        gx: String,
        #[arg(long = "gy")]
        gy: String,
        #[arg(long = "mu")]
        mu: String,
    },
    /// Verdicts over the cartesian product of `--grid name=v1,v2,...` axes.
    Sweep {
        #[command(flatten)]
        common: Common,
        #[arg(long = "grid")]
        grid: Vec<String>,
    },
}

struct Loaded {
    system: SystemFile,
    fixed: Assignment,
    forced: Option<QHType>,
}

fn load(c: &Common) -> CliResult<Loaded> {
    let text = std::fs::read_to_string(&c.file).map_err(|source| CliError::Io { path: c.file.clone(), source })?;
    let system = SystemFile::parse(&text)?;
    let mut fixed = Assignment::new();
    for a in &c.assign {
        fixed.extend(parse_assignment(a).map_err(CliError::Usage)?);
    }
    let forced = match c.qtype.trim() {
        "auto" => system.qtype,
        other => Some(parse_type(other).ok_or_else(|| CliError::Usage(format!("bad --type `{other}`, expected auto or t1,t2")))?),
    };
    Ok(Loaded { system, fixed, forced })
}

fn type_agrees(forced: Option<QHType>, pre: &PreformResult) -> bool {
    forced.is_none_or(|t| t.reduced() == pre.qtype.reduced())
}

fn require_type(forced: Option<QHType>, pre: &PreformResult) -> CliResult<()> {
    if type_agrees(forced, pre) {
        Ok(())
    } else {
        Err(QhError::TypeMismatch(format!("requested type {} but the field has type {}", forced.expect("forced"), pre.qtype)).into())
    }
}

fn preform(f: &PlanarVF, n_trunc: Option<i64>) -> CliResult<PreformResult> {
    let deg = f.p.max_total_degree().max(f.q.max_total_degree()).unwrap_or(0);
    Ok(classify_preform(f, deg.max(n_trunc.unwrap_or(0).max(0) as u32).max(16))?)
}

fn truncation_for(pre: &PreformResult, requested: Option<i64>) -> i64 {
    requested.unwrap_or_else(|| {
        let m = qhnf_core::leading::leading_verdict(&pre.leading(), pre).ok().and_then(|lv| lv.m);
        default_truncation(pre.r, m.unwrap_or(2 * pre.r + 2))
    })
}

fn verdict_exit(v: &Verdict) -> u8 {
    match v {
        Verdict::NotIntegrable { .. } => EXIT_NOT_INTEGRABLE,
        Verdict::NoObstructionUpTo { .. } => EXIT_NO_OBSTRUCTION,
        Verdict::LeadingNotIntegrable { .. } => EXIT_LEADING_NOT_INTEGRABLE,
        Verdict::Unsupported { .. } => EXIT_UNSUPPORTED,
    }
}

fn with_context(mut body: Value, f: &PlanarVF, assignment: &Assignment) -> Value {
    if let Value::Object(m) = &mut body {
        m.insert("input".into(), report::field(f));
        m.insert("assignment".into(), report::assignment(assignment));
    }
    body
}

fn verdict_report(f: &PlanarVF, forced: Option<QHType>, n_trunc: Option<i64>, full: bool) -> CliResult<(Value, Verdict)> {
    let nf = orbital_normal_form(f, n_trunc)?;
    require_type(forced, &nf.preform)?;
    let v = integrability_verdict(&nf);
    Ok((report::normal_form(&nf, &v, full), v))
}

fn leading_integral(pre: &PreformResult) -> CliResult<qhnf_core::algebra::QHPoly> {
    let lv = qhnf_core::leading::leading_verdict(&pre.leading(), pre)?;
    lv.integral.ok_or_else(|| CliError::Usage(format!("leading part has no polynomial first integral ({}): {}", lv.reason, lv.detail)))
}

fn run(cmd: &Command) -> CliResult<(Value, u8)> {
    match cmd {
        Command::Classify(c) => {
            let l = load(c)?;
            let f = l.system.instantiate(&l.fixed)?;
            let pre = preform(&f, c.truncation)?;
            let mut body = json!({ "classification": report::classification(&pre) });
            if let Some(t) = l.forced {
                body["type_check"] = json!({
                    "requested": [t.t1, t.t2],
                    "agrees": type_agrees(Some(t), &pre),
                    "leading_component": report::field(&pre.field.component(t, lowest_degree(&pre.field, t)).to_planar()),
                });
            }
            Ok((with_context(body, &f, &l.fixed), 0))
        }
        Command::Verdict(c) | Command::Nf(c) => {
            let l = load(c)?;
            let f = l.system.instantiate(&l.fixed)?;
            let (body, v) = verdict_report(&f, l.forced, c.truncation, matches!(cmd, Command::Nf(_)))?;
            Ok((with_context(body, &f, &l.fixed), verdict_exit(&v)))
        }
        Command::Curves(c) => {
            let l = load(c)?;
            let f = l.system.instantiate(&l.fixed)?;
            let pre = preform(&f, c.truncation)?;
            require_type(l.forced, &pre)?;
            if !matches!(pre.case, PreformCase::B4 { .. }) || !pre.scaled_to_template {
                return Err(QhError::UnsupportedShape(format!(
                    "invariant curves need a B4 leading part on its template, got {}",
                    pre.case.name()
                ))
                .into());
            }
            let n_trunc = truncation_for(&pre, c.truncation);
            let cs = formal_invariant_curves(&pre.field, pre.case.n(), n_trunc)?;
            let body = json!({
                "classification": report::classification(&pre),
                "curves": report::curves(&cs),
                "truncation": n_trunc,
            });
            Ok((with_context(body, &f, &l.fixed), 0))
        }
        Command::Integral(c) => {
            let l = load(c)?;
            let f = l.system.instantiate(&l.fixed)?;
            let pre = preform(&f, c.truncation)?;
            require_type(l.forced, &pre)?;
            let i_m = leading_integral(&pre)?;
            let n_trunc = c.truncation.unwrap_or_else(|| truncation_for(&pre, None));
            let ti = truncated_first_integral(&pre.field, pre.qtype, pre.r, &i_m, n_trunc)?;
            let body = json!({
                "classification": report::classification(&pre),
                "integral": report::integral(&ti),
                "truncation": n_trunc,
            });
            Ok((with_context(body, &f, &l.fixed), 0))
        }
        Command::CheckDarboux { common, factor, exp } => {
            let l = load(common)?;
            let f = l.system.instantiate(&l.fixed)?;
            let mut factors = Vec::new();
            for item in factor {
                let (e, k) = match item.rsplit_once(':') {
                    Some((e, k)) => (e, k.trim().parse::<u32>().map_err(|_| CliError::Usage(format!("bad exponent in `{item}`")))?),
                    None => (item.as_str(), 1),
                };
                factors.push((eval_expr(e, &l)?, k));
            }
            let cert = DarbouxCertificate { factors, exp_part: eval_expr(exp, &l)? };
            let residual = check_darboux_exponential(&f, &cert);
            let body = json!({
                "holds": residual.is_zero(),
                "residual": residual.to_string(),
                "factors": cert.factors.iter().map(|(p, e)| json!({ "factor": p.to_string(), "exponent": e })).collect::<Vec<_>>(),
                "exp_part": cert.exp_part.to_string(),
            });
            Ok((with_context(body, &f, &l.fixed), 0))
        }
        Command::CheckSymmetry { common, gx, gy, mu } => {
            let l = load(common)?;
            let f = l.system.instantiate(&l.fixed)?;
            let pre = preform(&f, common.truncation)?;
            let t = l.forced.unwrap_or(pre.qtype);
            let n_trunc = truncation_for(&pre, common.truncation);
            let g = PlanarVF::new(eval_expr(gx, &l)?, eval_expr(gy, &l)?);
            let check = check_lie_symmetry(&f, &g, &eval_expr(mu, &l)?, t, n_trunc, pre.r);
            let body = json!({ "symmetry": report::symmetry(&check), "qtype": [t.t1, t.t2], "truncation": n_trunc });
            Ok((with_context(body, &f, &l.fixed), 0))
        }
        Command::Sweep { common, grid } => {
            let l = load(common)?;
            let axes = grid
                .iter()
                .map(|g| parse_grid_axis(g).map_err(CliError::Usage))
                .collect::<CliResult<Vec<_>>>()?;
            let points: Vec<Assignment> = grid_points(&axes)
                .into_iter()
                .map(|mut p| {
                    p.extend(l.fixed.iter().map(|(k, v)| (k.clone(), v.clone())));
                    p
                })
                .collect();
            let rows: Vec<Value> = points
                .par_iter()
                .map(|a| {
                    let mut row = json!({ "assignment": report::assignment(a) });
                    match l
                        .system
                        .instantiate(a)
                        .map_err(CliError::from)
                        .and_then(|f| verdict_report(&f, l.forced, common.truncation, false))
                    {
                        Ok((body, v)) => {
                            row["verdict"] = body["verdict"].clone();
                            row["transform_digest"] = body["transform_digest"].clone();
                            row["exit"] = json!(verdict_exit(&v));
                        }
                        Err(e) => {
                            row["error"] = json!(e.to_string());
                            row["exit"] = json!(EXIT_ERROR);
                        }
                    }
                    row
                })
                .collect();
            Ok((json!({ "points": rows, "count": points.len() }), 0))
        }
    }
}

/// Lowest quasi-homogeneous degree with a nonzero component.
fn lowest_degree(f: &PlanarVF, t: QHType) -> i64 {
    let w = |p: &qhnf_core::algebra::Poly2, ti: u32| p.min_weight(t).map(|m| m - ti as i64);
    match (w(&f.p, t.t1), w(&f.q, t.t2)) {
        (Some(a), Some(b)) => a.min(b),
        (Some(a), None) | (None, Some(a)) => a,
        (None, None) => 0,
    }
}

fn eval_expr(src: &str, l: &Loaded) -> CliResult<qhnf_core::algebra::Poly2> {
    Ok(parse_expr(src, &l.system.params)?.eval(&l.fixed)?)
}

fn common(cmd: &Command) -> &Common {
    match cmd {
        Command::Classify(c) | Command::Verdict(c) | Command::Nf(c) | Command::Curves(c) | Command::Integral(c) => c,
        Command::CheckDarboux { common, .. } | Command::CheckSymmetry { common, .. } | Command::Sweep { common, .. } => common,
    }
}

fn emit(body: &Value, path: Option<&PathBuf>) -> CliResult<()> {
    let text = serde_json::to_string_pretty(body).expect("JSON values serialize") + "\n";
    match path {
        Some(p) => std::fs::write(p, text).map_err(|source| CliError::Io { path: p.clone(), source }),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let out = run(&cli.command).and_then(|(body, code)| emit(&body, common(&cli.command).json.as_ref()).map(|_| code));
    match out {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(EXIT_ERROR)
        }
    }
}
