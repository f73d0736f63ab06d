//! Parsing of field, element, function and orthomorphism specifiers.

use std::path::Path;
use std::sync::Arc;

use pwpn_core::catalog::{Env, Expr};
use pwpn_core::linalg::Matrix;
use pwpn_core::ortho::{
    make_c_mult, make_matrix_ortho, make_monomial_twist, make_qm_ortho, make_thmex_ortho, verify_orthomorphism,
};
use pwpn_core::{Elt, FieldCtx, Ortho, VFunc};
use serde_json::{json, Value};

use crate::CliError;

fn usage(msg: impl Into<String>) -> CliError {
    CliError::Usage(msg.into())
}

/// Modulus given as comma-separated coefficients, constant term first.
pub fn parse_modulus(s: &str) -> Result<Vec<u32>, CliError> {
    s.split(',')
        .map(|t| t.trim().parse::<u32>().map_err(|_| usage(format!("bad modulus coefficient `{t}`"))))
        .collect()
}

pub fn field(p: u32, n: u32, modulus: Option<&str>) -> Result<Arc<FieldCtx>, CliError> {
    let m = modulus.map(parse_modulus).transpose()?;
    Ok(Arc::new(FieldCtx::new(p, n, m.as_deref())?))
}

/// `{p, n, modulus, primitive}` with the modulus low coefficient first.
pub fn field_json(ctx: &FieldCtx) -> Value {
    let s = ctx.spec();
    json!({"p": s.p, "n": s.n, "modulus": s.modulus, "primitive": ctx.primitive().0})
}

/// `#k` is the raw index k, `g^k` a power of the primitive element, `g` the
/// primitive element itself and a plain integer k its image k·1.
pub fn parse_elt(ctx: &FieldCtx, s: &str) -> Result<Elt, CliError> {
    let s = s.trim();
    if let Some(r) = s.strip_prefix('#') {
        let k: u32 = r.parse().map_err(|_| usage(format!("bad element index `{s}`")))?;
        let e = Elt(k);
        if !ctx.contains(e) {
            return Err(usage(format!("element index {k} outside the field")));
        }
        return Ok(e);
    }
    if s == "g" {
        return Ok(ctx.primitive());
    }
    if let Some(r) = s.strip_prefix("g^") {
        let k: i128 = r.parse().map_err(|_| usage(format!("bad exponent in `{s}`")))?;
        return Ok(ctx.exp(k.rem_euclid(ctx.order() as i128 - 1) as u128));
    }
    let k: i128 = s.parse().map_err(|_| usage(format!("bad element `{s}`")))?;
    Ok(ctx.from_int(k))
}

fn read_json(path: &Path) -> Result<Value, CliError> {
    let text = std::fs::read_to_string(path)?;
    Ok(serde_json::from_str(&text)?)
}

fn int_array(v: &Value, what: &str) -> Result<Vec<u32>, CliError> {
    let arr = v.as_array().ok_or_else(|| usage(format!("{what}: expected an array")))?;
    let mut out = Vec::with_capacity(arr.len());
    for x in arr {
        match x {
            Value::Array(_) => out.extend(int_array(x, what)?),
            _ => out.push(
                x.as_u64()
                    .and_then(|k| u32::try_from(k).ok())
                    .ok_or_else(|| usage(format!("{what}: entries must be small non-negative integers")))?,
            ),
        }
    }
    Ok(out)
}

/// A table file is either a bare array of element indices or an object with
/// a `table` array.
pub fn read_table(path: &Path) -> Result<Vec<u32>, CliError> {
    let v = read_json(path)?;
    let t = v.get("table").unwrap_or(&v);
    int_array(t, &path.display().to_string())
}

/// Tabulates a polynomial body in `x` with the catalog evaluator.
pub fn poly(ctx: &Arc<FieldCtx>, body: &str) -> Result<VFunc, CliError> {
    let e = Expr::parse(body)?;
    Ok(Env::new(ctx).tabulate(&e)?)
}

/// `mono:D`, `poly:EXPR` or `table:FILE`.
pub fn parse_func(ctx: &Arc<FieldCtx>, s: &str) -> Result<VFunc, CliError> {
    let (kind, arg) = s.split_once(':').ok_or_else(|| usage(format!("function spec `{s}` needs a kind prefix")))?;
    match kind {
        "mono" => {
            let d: i128 = arg.trim().parse().map_err(|_| usage(format!("bad exponent `{arg}`")))?;
            Ok(VFunc::from_monomial(ctx, d)?)
        }
        "poly" => poly(ctx, arg),
        "table" => Ok(VFunc::from_table(ctx.clone(), ctx.clone(), read_table(Path::new(arg))?)?),
        _ => Err(usage(format!("unknown function kind `{kind}`"))),
    }
}

/// `c:<elt>`, `neg`, `twist:<c>,<j>`, `matrix:<file>`, `thmex:<b>`,
/// `qm:<k>[,<q>]` or `table:<file>`.
pub fn parse_wp(ctx: &Arc<FieldCtx>, s: &str) -> Result<Ortho, CliError> {
    let (kind, arg) = s.split_once(':').unwrap_or((s, ""));
    let wp = match kind {
        "neg" => make_c_mult(ctx, ctx.neg(Elt::ONE))?,
        "c" => make_c_mult(ctx, parse_elt(ctx, arg)?)?,
        "twist" => {
            let (c, j) = arg.split_once(',').ok_or_else(|| usage("twist needs <c>,<j>"))?;
            let j: u32 = j.trim().parse().map_err(|_| usage(format!("bad twist exponent `{j}`")))?;
            make_monomial_twist(ctx, parse_elt(ctx, c)?, j)?
        }
        "matrix" => {
            let entries = int_array(&read_json(Path::new(arg))?, arg)?;
            let a = Matrix::from_rows(ctx.p(), ctx.n() as usize, entries)?;
            make_matrix_ortho(ctx, &a)?
        }
        "thmex" => make_thmex_ortho(ctx, parse_elt(ctx, arg)?)?,
        "qm" => {
            let (k, q) = match arg.split_once(',') {
                Some((k, q)) => (k, Some(q)),
                None => (arg, None),
            };
            let k: u32 = k.trim().parse().map_err(|_| usage(format!("bad qm exponent `{k}`")))?;
            let q: u32 = match q {
                Some(q) => q.trim().parse().map_err(|_| usage(format!("bad qm base `{q}`")))?,
                None => ctx.p(),
            };
            let (mut s, mut t) = (0, q);
            while t > 1 && t % ctx.p() == 0 {
                t /= ctx.p();
                s += 1;
            }
            if t != 1 || s == 0 || !ctx.n().is_multiple_of(2 * s) {
                return Err(usage(format!("qm base {q} does not fit F_{}^{}", ctx.p(), ctx.n())));
            }
            make_qm_ortho(ctx, q, ctx.n() / (2 * s), k)?
        }
        "table" => {
            let f = VFunc::from_table(ctx.clone(), ctx.clone(), read_table(Path::new(arg))?)?;
            verify_orthomorphism(&f)?
        }
        _ => return Err(usage(format!("unknown orthomorphism spec `{s}`"))),
    };
    Ok(wp)
}
