//! A small expression language for row conditions, exponents, polynomial
//! bodies and claimed values.
//!
//! Integers are exact (`i128`, checked); `/` on integers must divide exactly.
//! Precedence, loosest first: `||`, `&&`, comparisons, `+ -`, `* / %`,
//! prefix `- !`, `^` (right associative).

use alloc::boxed::Box;
use alloc::collections::BTreeSet;
use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec::Vec;
use core::fmt;

use crate::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum BinOp {
    Add,
    Sub,
    Mul,
    Div,
    Rem,
    Pow,
    Eq,
    Ne,
    Lt,
    Le,
    Gt,
    Ge,
    And,
    Or,
}

impl BinOp {
    fn binding(self) -> (u8, u8) {
        match self {
            BinOp::Or => (1, 2),
            BinOp::And => (3, 4),
            BinOp::Eq | BinOp::Ne | BinOp::Lt | BinOp::Le | BinOp::Gt | BinOp::Ge => (5, 6),
            BinOp::Add | BinOp::Sub => (7, 8),
            BinOp::Mul | BinOp::Div | BinOp::Rem => (9, 10),
            BinOp::Pow => (14, 13),
        }
    }

    fn symbol(self) -> &'static str {
        match self {
            BinOp::Add => "+",
            BinOp::Sub => "-",
            BinOp::Mul => "*",
            BinOp::Div => "/",
            BinOp::Rem => "%",
            BinOp::Pow => "^",
            BinOp::Eq => "==",
            BinOp::Ne => "!=",
            BinOp::Lt => "<",
            BinOp::Le => "<=",
            BinOp::Gt => ">",
            BinOp::Ge => ">=",
            BinOp::And => "&&",
            BinOp::Or => "||",
        }
    }
}

const PREFIX_BP: u8 = 11;

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Expr {
    Int(i128),
    Var(String),
    Neg(Box<Expr>),
    Not(Box<Expr>),
    Bin(BinOp, Box<Expr>, Box<Expr>),
    Call(String, Vec<Expr>),
}

impl Expr {
    pub fn parse(src: &str) -> Result<Expr> {
        let toks = lex(src)?;
        let mut p = Parser { toks, pos: 0 };
        let e = p.expr(0)?;
        match p.peek() {
            Tok::End => Ok(e),
            t => Err(Error::Expr(format!("unexpected {t:?} in `{src}`"))),
        }
    }

    /// Free identifiers, excluding function names and binder variables.
    pub fn free_vars(&self) -> BTreeSet<String> {
        let mut out = BTreeSet::new();
        self.collect(&mut Vec::new(), &mut out);
        out
    }

    fn collect(&self, bound: &mut Vec<String>, out: &mut BTreeSet<String>) {
        match self {
            Expr::Int(_) => {}
            Expr::Var(v) => {
                if !bound.contains(v) {
                    out.insert(v.clone());
                }
            }
            Expr::Neg(e) | Expr::Not(e) => e.collect(bound, out),
            Expr::Bin(_, a, b) => {
                a.collect(bound, out);
                b.collect(bound, out);
            }
            Expr::Call(name, args) => {
                let binder = match (name.as_str(), args.first()) {
                    ("sum" | "prod" | "all" | "any", Some(Expr::Var(v))) => Some(v.clone()),
                    _ => None,
                };
                let skip = usize::from(binder.is_some());
                if let Some(v) = &binder {
                    bound.push(v.clone());
                }
                for a in &args[skip..] {
                    a.collect(bound, out);
                }
                if binder.is_some() {
                    bound.pop();
                }
            }
        }
    }
}

impl fmt::Display for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Expr::Int(k) => write!(f, "{k}"),
            Expr::Var(v) => f.write_str(v),
            Expr::Neg(e) => write!(f, "-({e})"),
            Expr::Not(e) => write!(f, "!({e})"),
            Expr::Bin(op, a, b) => write!(f, "({a} {} {b})", op.symbol()),
            Expr::Call(name, args) => {
                write!(f, "{name}(")?;
                for (i, a) in args.iter().enumerate() {
                    if i > 0 {
                        f.write_str(", ")?;
                    }
                    write!(f, "{a}")?;
                }
                f.write_str(")")
            }
        }
    }
}

/// An expression together with its source text.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Formula {
    src: String,
    expr: Expr,
}

impl Formula {
    pub fn parse(src: &str) -> Result<Formula> {
        Ok(Formula { src: src.trim().to_string(), expr: Expr::parse(src)? })
    }

    pub fn src(&self) -> &str {
        &self.src
    }

    pub fn expr(&self) -> &Expr {
        &self.expr
    }
}

impl fmt::Display for Formula {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.src)
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
enum Tok {
    Num(i128),
    Ident(String),
    Op(BinOp),
    Minus,
    Bang,
    LParen,
    RParen,
    Comma,
    End,
}

fn lex(src: &str) -> Result<Vec<Tok>> {
    let b = src.as_bytes();
    let mut out = Vec::new();
    let mut i = 0;
    while i < b.len() {
        let ch = b[i];
        if ch.is_ascii_whitespace() {
            i += 1;
            continue;
        }
        if ch.is_ascii_digit() {
            let start = i;
            while i < b.len() && b[i].is_ascii_digit() {
                i += 1;
            }
            let k: i128 = src[start..i].parse().map_err(|_| Error::Expr(format!("bad number in `{src}`")))?;
            out.push(Tok::Num(k));
            continue;
        }
        if ch.is_ascii_alphabetic() || ch == b'_' {
            let start = i;
            while i < b.len() && (b[i].is_ascii_alphanumeric() || b[i] == b'_') {
                i += 1;
            }
            out.push(Tok::Ident(src[start..i].to_string()));
            continue;
        }
        let two = if i + 1 < b.len() { &src[i..i + 2] } else { "" };
        let (tok, len) = match two {
            "||" => (Tok::Op(BinOp::Or), 2),
            "&&" => (Tok::Op(BinOp::And), 2),
            "==" => (Tok::Op(BinOp::Eq), 2),
            "!=" => (Tok::Op(BinOp::Ne), 2),
            "<=" => (Tok::Op(BinOp::Le), 2),
            ">=" => (Tok::Op(BinOp::Ge), 2),
            _ => match ch {
                b'<' => (Tok::Op(BinOp::Lt), 1),
                b'>' => (Tok::Op(BinOp::Gt), 1),
                b'+' => (Tok::Op(BinOp::Add), 1),
                b'-' => (Tok::Minus, 1),
                b'*' => (Tok::Op(BinOp::Mul), 1),
                b'/' => (Tok::Op(BinOp::Div), 1),
                b'%' => (Tok::Op(BinOp::Rem), 1),
                b'^' => (Tok::Op(BinOp::Pow), 1),
                b'!' => (Tok::Bang, 1),
                b'(' => (Tok::LParen, 1),
                b')' => (Tok::RParen, 1),
                b',' => (Tok::Comma, 1),
                _ => return Err(Error::Expr(format!("unexpected character {:?} in `{src}`", ch as char))),
            },
        };
        out.push(tok);
        i += len;
    }
    out.push(Tok::End);
    Ok(out)
}

struct Parser {
    toks: Vec<Tok>,
    pos: usize,
}

impl Parser {
    fn peek(&self) -> &Tok {
        &self.toks[self.pos]
    }

    fn next(&mut self) -> Tok {
        let t = self.toks[self.pos].clone();
        if t != Tok::End {
            self.pos += 1;
        }
        t
    }

    fn expect(&mut self, want: Tok) -> Result<()> {
        let t = self.next();
        if t == want {
            Ok(())
        } else {
            Err(Error::Expr(format!("expected {want:?}, found {t:?}")))
        }
    }

    fn expr(&mut self, min_bp: u8) -> Result<Expr> {
        let mut lhs = match self.next() {
            Tok::Num(k) => Expr::Int(k),
            Tok::Ident(name) => {
                if *self.peek() == Tok::LParen {
                    self.next();
                    let mut args = Vec::new();
                    if *self.peek() != Tok::RParen {
                        loop {
                            args.push(self.expr(0)?);
                            if *self.peek() == Tok::Comma {
                                self.next();
                            } else {
                                break;
                            }
                        }
                    }
                    self.expect(Tok::RParen)?;
                    Expr::Call(name, args)
                } else {
                    Expr::Var(name)
                }
            }
            Tok::LParen => {
                let e = self.expr(0)?;
                self.expect(Tok::RParen)?;
                e
            }
            Tok::Minus => Expr::Neg(Box::new(self.expr(PREFIX_BP)?)),
            Tok::Bang => Expr::Not(Box::new(self.expr(PREFIX_BP)?)),
            t => return Err(Error::Expr(format!("unexpected {t:?}"))),
        };
        loop {
            let op = match self.peek() {
                Tok::Op(op) => *op,
                Tok::Minus => BinOp::Sub,
                _ => break,
            };
            let (l, r) = op.binding();
            if l < min_bp {
                break;
            }
            self.next();
            let rhs = self.expr(r)?;
            lhs = Expr::Bin(op, Box::new(lhs), Box::new(rhs));
        }
        Ok(lhs)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn show(s: &str) -> String {
        Expr::parse(s).unwrap().to_string()
    }

    #[test]
    fn precedence() {
        assert_eq!(show("1 + 2 * 3"), "(1 + (2 * 3))");
        assert_eq!(show("2^3^2"), "(2 ^ (3 ^ 2))");
        assert_eq!(show("-x^2"), "-((x ^ 2))");
        assert_eq!(show("a - b - c"), "((a - b) - c)");
        assert_eq!(show("a == 1 || b < 2 && !c"), "((a == 1) || ((b < 2) && !(c)))");
        assert_eq!(show("(q+1)/2 % (q-1)"), "(((q + 1) / 2) % (q - 1))");
    }

    #[test]
    fn calls_and_binders() {
        assert_eq!(show("gcd(p^k+1, q-1)"), "gcd(((p ^ k) + 1), (q - 1))");
        assert_eq!(show("prim()"), "prim()");
        let e = Expr::parse("sum(i, 1, l-1, L(x)^i) + u").unwrap();
        let vars: Vec<String> = e.free_vars().into_iter().collect();
        assert_eq!(vars, ["l", "u", "x"]);
    }

    #[test]
    fn errors() {
        assert!(Expr::parse("1 +").is_err());
        assert!(Expr::parse("(1").is_err());
        assert!(Expr::parse("1 2").is_err());
        assert!(Expr::parse("a $ b").is_err());
        assert!(Expr::parse("f(1,").is_err());
    }
}
