//! Evaluation of catalog expressions over one field.
//!
//! Evaluation failures come in two kinds: `Error::Undefined` (division by
//! zero, a missing modular inverse, an inexact integer quotient, overflow)
//! means the quantity does not exist for this instance, while `Error::Expr`
//! flags a malformed expression.

use alloc::format;
use alloc::string::{String, ToString};
use alloc::sync::Arc;
use alloc::vec::Vec;

use super::expr::{BinOp, Expr};
use crate::arith;
use crate::diffspec::{perfect_scan, Mode};
use crate::gf::{Elt, FieldCtx};
use crate::{Error, Result, VFunc};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Value {
    Int(i128),
    Elt(Elt),
    Bool(bool),
}

fn undefined(what: impl Into<String>) -> Error {
    Error::Undefined(what.into())
}

fn invalid(what: impl Into<String>) -> Error {
    Error::Expr(what.into())
}

/// Maps arithmetic failures of a defined expression onto `Undefined`.
fn soften(e: Error) -> Error {
    match e {
        Error::DivisionByZero | Error::ZeroInput | Error::NotCoprime(..) | Error::NotADivisor { .. } => {
            undefined(e.to_string())
        }
        other => other,
    }
}

pub struct Env<'a> {
    ctx: &'a Arc<FieldCtx>,
    vars: Vec<(String, Value)>,
    funcs: Vec<(String, Arc<VFunc>)>,
}

impl<'a> Env<'a> {
    /// Binds `p`, `n` and `q = p^n`.
    pub fn new(ctx: &'a Arc<FieldCtx>) -> Env<'a> {
        let mut env = Env { ctx, vars: Vec::new(), funcs: Vec::new() };
        env.bind("p", Value::Int(ctx.p() as i128));
        env.bind("n", Value::Int(ctx.n() as i128));
        env.bind("q", Value::Int(ctx.order() as i128));
        env
    }

    pub fn ctx(&self) -> &'a Arc<FieldCtx> {
        self.ctx
    }

    pub fn bind(&mut self, name: &str, v: Value) {
        self.vars.push((name.to_string(), v));
    }

    pub fn unbind(&mut self) {
        self.vars.pop();
    }

    pub fn bind_fn(&mut self, name: &str, f: Arc<VFunc>) {
        self.funcs.push((name.to_string(), f));
    }

    pub fn unbind_fn(&mut self) {
        self.funcs.pop();
    }

    pub fn lookup(&self, name: &str) -> Option<Value> {
        self.vars.iter().rev().find(|(k, _)| k == name).map(|(_, v)| *v)
    }

    pub fn lookup_fn(&self, name: &str) -> Option<&Arc<VFunc>> {
        self.funcs.iter().rev().find(|(k, _)| k == name).map(|(_, f)| f)
    }

    pub fn eval_int(&mut self, e: &Expr) -> Result<i128> {
        match self.eval(e)? {
            Value::Int(k) => Ok(k),
            v => Err(invalid(format!("`{e}` is {v:?}, expected an integer"))),
        }
    }

    pub fn eval_bool(&mut self, e: &Expr) -> Result<bool> {
        match self.eval(e)? {
            Value::Bool(b) => Ok(b),
            v => Err(invalid(format!("`{e}` is {v:?}, expected a truth value"))),
        }
    }

    pub fn eval_elt(&mut self, e: &Expr) -> Result<Elt> {
        let v = self.eval(e)?;
        self.as_elt(v)
    }

    /// The table of `x ↦ body` over the whole field.
    pub fn tabulate(&mut self, body: &Expr) -> Result<VFunc> {
        let ctx = self.ctx;
        let mut table = Vec::with_capacity(ctx.size());
        for x in ctx.elements() {
            self.bind("x", Value::Elt(x));
            let y = self.eval_elt(body);
            self.unbind();
            table.push(y?.0);
        }
        VFunc::from_table(ctx.clone(), ctx.clone(), table)
    }

    fn as_elt(&self, v: Value) -> Result<Elt> {
        match v {
            Value::Elt(x) => Ok(x),
            Value::Int(k) => Ok(self.ctx.from_int(k)),
            Value::Bool(_) => Err(invalid("truth value used as a field element")),
        }
    }

    fn small(&self, k: i128, what: &str) -> Result<u32> {
        u32::try_from(k).map_err(|_| undefined(format!("{what} = {k} out of range")))
    }

    pub fn eval(&mut self, e: &Expr) -> Result<Value> {
        match e {
            Expr::Int(k) => Ok(Value::Int(*k)),
            Expr::Var(name) => match name.as_str() {
                "true" => Ok(Value::Bool(true)),
                "false" => Ok(Value::Bool(false)),
                _ => self.lookup(name).ok_or_else(|| invalid(format!("unknown variable `{name}`"))),
            },
            Expr::Neg(a) => match self.eval(a)? {
                Value::Int(k) => k.checked_neg().map(Value::Int).ok_or_else(|| undefined("overflow")),
                Value::Elt(x) => Ok(Value::Elt(self.ctx.neg(x))),
                Value::Bool(_) => Err(invalid(format!("cannot negate `{a}`"))),
            },
            Expr::Not(a) => Ok(Value::Bool(!self.eval_bool(a)?)),
            Expr::Bin(BinOp::And, a, b) => Ok(Value::Bool(self.eval_bool(a)? && self.eval_bool(b)?)),
            Expr::Bin(BinOp::Or, a, b) => Ok(Value::Bool(self.eval_bool(a)? || self.eval_bool(b)?)),
            Expr::Bin(op, a, b) => {
                let va = self.eval(a)?;
                let vb = self.eval(b)?;
                self.binary(*op, va, vb)
            }
            Expr::Call(name, args) => self.call(name, args),
        }
    }

    fn binary(&self, op: BinOp, a: Value, b: Value) -> Result<Value> {
        let ctx = self.ctx;
        match (op, a, b) {
            (BinOp::Pow, Value::Int(x), Value::Int(e)) => {
                let e = u32::try_from(e).map_err(|_| undefined(format!("integer power with exponent {e}")))?;
                x.checked_pow(e).map(Value::Int).ok_or_else(|| undefined("overflow"))
            }
            (BinOp::Pow, Value::Elt(x), Value::Int(e)) => {
                Ok(Value::Elt(if e >= 0 { ctx.pow(x, e as u128) } else { ctx.pow_signed(x, e).map_err(soften)? }))
            }
            (BinOp::Pow, _, _) => Err(invalid("exponent must be an integer")),
            (BinOp::Eq | BinOp::Ne, Value::Bool(x), Value::Bool(y)) => Ok(Value::Bool((x == y) == (op == BinOp::Eq))),
            (BinOp::Eq | BinOp::Ne, Value::Int(x), Value::Int(y)) => Ok(Value::Bool((x == y) == (op == BinOp::Eq))),
            (BinOp::Eq | BinOp::Ne, x, y) => {
                let eq = self.as_elt(x)? == self.as_elt(y)?;
                Ok(Value::Bool(eq == (op == BinOp::Eq)))
            }
            (_, Value::Int(x), Value::Int(y)) => {
                let over = || undefined("overflow");
                Ok(match op {
                    BinOp::Add => Value::Int(x.checked_add(y).ok_or_else(over)?),
                    BinOp::Sub => Value::Int(x.checked_sub(y).ok_or_else(over)?),
                    BinOp::Mul => Value::Int(x.checked_mul(y).ok_or_else(over)?),
                    BinOp::Div => {
                        if y == 0 || x % y != 0 {
                            return Err(undefined(format!("{x}/{y} is not an integer")));
                        }
                        Value::Int(x / y)
                    }
                    BinOp::Rem => {
                        if y == 0 {
                            return Err(undefined("remainder by zero"));
                        }
                        Value::Int(x.rem_euclid(y))
                    }
                    BinOp::Lt => Value::Bool(x < y),
                    BinOp::Le => Value::Bool(x <= y),
                    BinOp::Gt => Value::Bool(x > y),
                    BinOp::Ge => Value::Bool(x >= y),
                    _ => unreachable!(),
                })
            }
            (BinOp::Add | BinOp::Sub | BinOp::Mul | BinOp::Div, x, y) => {
                let (x, y) = (self.as_elt(x)?, self.as_elt(y)?);
                Ok(Value::Elt(match op {
                    BinOp::Add => ctx.add(x, y),
                    BinOp::Sub => ctx.sub(x, y),
                    BinOp::Mul => ctx.mul(x, y),
                    _ => ctx.div(x, y).map_err(soften)?,
                }))
            }
            (op, x, y) => Err(invalid(format!("operator `{op:?}` does not apply to {x:?}, {y:?}"))),
        }
    }

    fn arity(name: &str, args: &[Expr], k: usize) -> Result<()> {
        if args.len() == k {
            Ok(())
        } else {
            Err(invalid(format!("{name} takes {k} arguments, got {}", args.len())))
        }
    }

    fn fn_arg(&self, name: &str, e: &Expr) -> Result<Arc<VFunc>> {
        match e {
            Expr::Var(f) => self.lookup_fn(f).cloned().ok_or_else(|| invalid(format!("{name}: unknown function `{f}`"))),
            _ => Err(invalid(format!("{name}: first argument must name a function"))),
        }
    }

    fn binder(name: &str, e: &Expr) -> Result<String> {
        match e {
            Expr::Var(v) => Ok(v.clone()),
            _ => Err(invalid(format!("{name}: first argument must be a variable"))),
        }
    }

    fn call(&mut self, name: &str, args: &[Expr]) -> Result<Value> {
        let ctx = self.ctx;
        if let Some(f) = self.lookup_fn(name).cloned() {
            Self::arity(name, args, 1)?;
            let x = self.eval_elt(&args[0])?;
            return Ok(Value::Elt(f.eval(x)));
        }
        match name {
            "gcd" => {
                Self::arity(name, args, 2)?;
                let (a, b) = (self.eval_int(&args[0])?, self.eval_int(&args[1])?);
                Ok(Value::Int(arith::gcd_i(a, b)))
            }
            "v2" => {
                Self::arity(name, args, 1)?;
                let a = self.eval_int(&args[0])?;
                Ok(Value::Int(arith::two_valuation(a).map_err(|_| undefined(format!("v2({a})")))? as i128))
            }
            "inv" => {
                Self::arity(name, args, 2)?;
                let (a, m) = (self.eval_int(&args[0])?, self.eval_int(&args[1])?);
                arith::mod_inverse(a, m).map(Value::Int).map_err(|_| undefined(format!("{a} has no inverse modulo {m}")))
            }
            "solve" => {
                Self::arity(name, args, 4)?;
                let a = self.eval_int(&args[0])?;
                let b = self.eval_int(&args[1])?;
                let m = self.eval_int(&args[2])?;
                let parity = self.eval_int(&args[3])?;
                solve_congruence(a, b, m, parity).map(Value::Int)
            }
            "divides" => {
                Self::arity(name, args, 2)?;
                let (a, b) = (self.eval_int(&args[0])?, self.eval_int(&args[1])?);
                Ok(Value::Bool(a != 0 && b % a == 0))
            }
            "elt" => {
                Self::arity(name, args, 1)?;
                let k = self.eval_int(&args[0])?;
                Ok(Value::Elt(ctx.from_int(k)))
            }
            "prim" => {
                Self::arity(name, args, 0)?;
                Ok(Value::Elt(ctx.primitive()))
            }
            "tr" => {
                Self::arity(name, args, 1)?;
                let x = self.eval_elt(&args[0])?;
                Ok(Value::Elt(ctx.trace(x)))
            }
            "tr_rel" => {
                Self::arity(name, args, 2)?;
                let x = self.eval_elt(&args[0])?;
                let m = self.eval_int(&args[1])?;
                let m = self.small(m, "subfield degree")?;
                Ok(Value::Elt(ctx.rel_trace(m, x).map_err(soften)?))
            }
            "in_sub" => {
                Self::arity(name, args, 2)?;
                let x = self.eval_elt(&args[0])?;
                let m = self.eval_int(&args[1])?;
                let m = self.small(m, "subfield degree")?;
                Ok(Value::Bool(ctx.in_subfield(x, m).map_err(soften)?))
            }
            "eta" => {
                Self::arity(name, args, 1)?;
                let x = self.eval_elt(&args[0])?;
                Ok(Value::Int(ctx.quadratic_character(x)? as i128))
            }
            "is_pow" => {
                Self::arity(name, args, 2)?;
                let x = self.eval_elt(&args[0])?;
                let k = self.eval_int(&args[1])?;
                Ok(Value::Bool(is_power_in(ctx, x, k, ctx.n())?))
            }
            "is_pow_in" => {
                Self::arity(name, args, 3)?;
                let x = self.eval_elt(&args[0])?;
                let k = self.eval_int(&args[1])?;
                let m = self.eval_int(&args[2])?;
                let m = self.small(m, "subfield degree")?;
                Ok(Value::Bool(is_power_in(ctx, x, k, m)?))
            }
            "if" => {
                Self::arity(name, args, 3)?;
                if self.eval_bool(&args[0])? {
                    self.eval(&args[1])
                } else {
                    self.eval(&args[2])
                }
            }
            "sum" | "prod" => {
                Self::arity(name, args, 4)?;
                let var = Self::binder(name, &args[0])?;
                let lo = self.eval_int(&args[1])?;
                let hi = self.eval_int(&args[2])?;
                let mut acc = Value::Int(i128::from(name == "prod"));
                let op = if name == "sum" { BinOp::Add } else { BinOp::Mul };
                for i in lo..=hi {
                    self.bind(&var, Value::Int(i));
                    let term = self.eval(&args[3]);
                    self.unbind();
                    acc = self.binary(op, acc, term?)?;
                }
                Ok(acc)
            }
            "all" | "any" => {
                Self::arity(name, args, 2)?;
                let var = Self::binder(name, &args[0])?;
                let want = name == "any";
                for y in ctx.elements() {
                    self.bind(&var, Value::Elt(y));
                    let b = self.eval_bool(&args[1]);
                    self.unbind();
                    if b? == want {
                        return Ok(Value::Bool(want));
                    }
                }
                Ok(Value::Bool(!want))
            }
            "pcn" => {
                Self::arity(name, args, 2)?;
                let f = self.fn_arg(name, &args[0])?;
                let c = self.eval_elt(&args[1])?;
                Ok(Value::Bool(perfect_scan(&f, Mode::C(c))?.perfect))
            }
            "pcn_mono" => {
                Self::arity(name, args, 2)?;
                let d = self.eval_int(&args[0])?;
                let c = self.eval_elt(&args[1])?;
                let f = VFunc::from_monomial(ctx, d).map_err(|_| undefined(format!("exponent {d}")))?;
                Ok(Value::Bool(perfect_scan(&f, Mode::C(c))?.perfect))
            }
            "is_perm" => {
                Self::arity(name, args, 1)?;
                let f = self.fn_arg(name, &args[0])?;
                Ok(Value::Bool(f.is_permutation()?))
            }
            "is_perm_sub" => {
                Self::arity(name, args, 2)?;
                let f = self.fn_arg(name, &args[0])?;
                let m = self.eval_int(&args[1])?;
                let m = self.small(m, "subfield degree")?;
                let sub = ctx.subfield_elements(m).map_err(soften)?;
                let mut image: Vec<Elt> = sub.iter().map(|&x| f.eval(x)).collect();
                if !image.iter().all(|&y| ctx.in_subfield(y, m).unwrap_or(false)) {
                    return Ok(Value::Bool(false));
                }
                image.sort_unstable();
                image.dedup();
                Ok(Value::Bool(image.len() == sub.len()))
            }
            _ => Err(invalid(format!("unknown function `{name}`"))),
        }
    }
}

/// Least `d ∈ [0, m)` with `a·d ≡ b (mod m)` and, unless `parity` is
/// negative, `d ≡ parity (mod 2)`.
pub fn solve_congruence(a: i128, b: i128, m: i128, parity: i128) -> Result<i128> {
    if m <= 0 {
        return Err(undefined(format!("modulus {m}")));
    }
    let g = arith::gcd_i(a, m);
    if b.rem_euclid(g) != 0 {
        return Err(undefined(format!("{a}·d ≡ {b} mod {m} has no solution")));
    }
    let m1 = m / g;
    let d0 = arith::mod_inverse(a / g, m1).map_err(soften)?
        .checked_mul((b / g).rem_euclid(m1))
        .ok_or_else(|| undefined("overflow"))?
        .rem_euclid(m1);
    (0..g)
        .map(|t| d0 + t * m1)
        .find(|d| parity < 0 || d % 2 == parity)
        .ok_or_else(|| undefined(format!("no solution of {a}·d ≡ {b} mod {m} with parity {parity}")))
}

/// Whether `x ∈ F_{p^m}` is a k-th power of an element of F_{p^m}; zero is
/// the k-th power of zero.
fn is_power_in(ctx: &FieldCtx, x: Elt, k: i128, m: u32) -> Result<bool> {
    if k <= 0 {
        return Err(undefined(format!("power test with k = {k}")));
    }
    if !ctx.in_subfield(x, m).map_err(soften)? {
        return Ok(false);
    }
    if x.is_zero() {
        return Ok(true);
    }
    let ord = arith::checked_pow(ctx.p() as u128, m).expect("subfield order") - 1;
    Ok(ctx.pow(x, ord / arith::gcd(k as u128, ord)) == Elt::ONE)
}
