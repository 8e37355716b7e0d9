//! System files: `params` declarations plus `dx =` and `dy =` statements,
//! separated by newlines or `;`. `#` starts a comment.

use std::collections::BTreeMap;

use qhnf_core::algebra::parse::{parse_expr_at, Expr};
use qhnf_core::algebra::rat::parse_rat;
use qhnf_core::algebra::{QHType, Rat};
use qhnf_core::vectorfield::PlanarVF;
use qhnf_core::{QhError, Result};

#[derive(Clone, Debug)]
pub struct SystemFile {
    pub params: Vec<String>,
    pub dx: Expr,
    pub dy: Expr,
    pub qtype: Option<QHType>,
}

pub type Assignment = BTreeMap<String, Rat>;

fn parse_err(line: usize, column: usize, message: impl Into<String>) -> QhError {
    QhError::Parse { line, column, message: message.into() }
}

fn is_ident(s: &str) -> bool {
    let mut chars = s.chars();
    chars.next().is_some_and(|c| c.is_ascii_alphabetic() || c == '_')
        && chars.all(|c| c.is_ascii_alphanumeric() || c == '_')
}

/// `t1,t2` with positive integers.
pub fn parse_type(s: &str) -> Option<QHType> {
    let (a, b) = s.split_once(',')?;
    QHType::new(a.trim().parse().ok()?, b.trim().parse().ok()?).ok()
}

impl SystemFile {
    pub fn parse(text: &str) -> Result<SystemFile> {
        let mut params: Vec<String> = Vec::new();
        let mut dx = None;
        let mut dy = None;
        let mut qtype = None;
        for (li, raw_line) in text.lines().enumerate() {
            let line_no = li + 1;
            let line = raw_line.split('#').next().unwrap_or("");
            let mut offset = 0;
            for stmt in line.split(';') {
                let col0 = offset + 1;
                offset += stmt.len() + 1;
                let lead = stmt.len() - stmt.trim_start().len();
                let s = stmt.trim();
                if s.is_empty() {
                    continue;
                }
                let col = col0 + lead;
                if let Some(rest) = s.strip_prefix("params") {
                    if !rest.is_empty() && !rest.starts_with(char::is_whitespace) {
                        return Err(parse_err(line_no, col, "expected `params name ...`"));
                    }
                    for name in rest.split(|c: char| c.is_whitespace() || c == ',').filter(|n| !n.is_empty()) {
                        if !is_ident(name) || name == "x" || name == "y" {
                            return Err(parse_err(line_no, col, format!("invalid parameter name `{name}`")));
                        }
                        if !params.iter().any(|p| p == name) {
                            params.push(name.to_string());
                        }
                    }
                    continue;
                }
                let Some((lhs, rhs)) = s.split_once('=') else {
                    return Err(parse_err(line_no, col, "expected `dx = ...`, `dy = ...`, `type = t1,t2` or `params ...`"));
                };
                let rhs_col = col + lhs.len() + 1 + (rhs.len() - rhs.trim_start().len());
                match lhs.trim() {
                    "dx" => dx = Some(parse_expr_at(rhs.trim(), line_no, rhs_col, &params)?),
                    "dy" => dy = Some(parse_expr_at(rhs.trim(), line_no, rhs_col, &params)?),
                    "type" => {
                        qtype = Some(
                            parse_type(rhs)
                                .ok_or_else(|| parse_err(line_no, rhs_col, "expected `type = t1,t2`"))?,
                        )
                    }
                    other => return Err(parse_err(line_no, col, format!("unknown statement `{other}`"))),
                }
            }
        }
        let end = text.lines().count().max(1);
        Ok(SystemFile {
            params,
            dx: dx.ok_or_else(|| parse_err(end, 1, "missing `dx = ...`"))?,
            dy: dy.ok_or_else(|| parse_err(end, 1, "missing `dy = ...`"))?,
            qtype,
        })
    }

    /// Evaluates the system; every declared parameter must be assigned.
    pub fn instantiate(&self, assignment: &Assignment) -> Result<PlanarVF> {
        for p in &self.params {
            if !assignment.contains_key(p) {
                return Err(QhError::UnassignedParameter(p.clone()));
            }
        }
        if let Some(extra) = assignment.keys().find(|k| !self.params.contains(k)) {
            return Err(QhError::UndeclaredIdentifier { name: extra.clone(), line: 0, column: 0 });
        }
        Ok(PlanarVF::new(self.dx.eval(assignment)?, self.dy.eval(assignment)?))
    }
}

/// `k=v,k=v`; values are exact rationals such as `-58/27`.
pub fn parse_assignment(s: &str) -> std::result::Result<Assignment, String> {
    let mut out = Assignment::new();
    for part in s.split(',').map(str::trim).filter(|p| !p.is_empty()) {
        let (k, v) = part.split_once('=').ok_or_else(|| format!("expected name=value, got `{part}`"))?;
        let val = parse_rat(v.trim()).ok_or_else(|| format!("`{}` is not a rational number", v.trim()))?;
        out.insert(k.trim().to_string(), val);
    }
    Ok(out)
}

/// `name=v1,v2,...` for one grid axis.
pub fn parse_grid_axis(s: &str) -> std::result::Result<(String, Vec<Rat>), String> {
    let (k, vs) = s.split_once('=').ok_or_else(|| format!("expected name=v1,v2,..., got `{s}`"))?;
    let vals = vs
        .split(',')
        .map(|v| parse_rat(v.trim()).ok_or_else(|| format!("`{}` is not a rational number", v.trim())))
        .collect::<std::result::Result<Vec<_>, _>>()?;
    if vals.is_empty() {
        return Err(format!("grid axis `{k}` has no values"));
    }
    Ok((k.trim().to_string(), vals))
}

/// Cartesian product of grid axes, first axis varying slowest.
pub fn grid_points(axes: &[(String, Vec<Rat>)]) -> Vec<Assignment> {
    axes.iter().fold(vec![Assignment::new()], |acc, (name, vals)| {
        acc.iter()
            .flat_map(|a| {
                vals.iter().map(move |v| {
                    let mut b = a.clone();
                    b.insert(name.clone(), v.clone());
                    b
                })
            })
            .collect()
    })
}
