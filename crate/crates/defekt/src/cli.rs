//! Expression DSL over the series and p-adic domains, plus the drivers
//! behind the `defekt` subcommands.
//!
//! Grammar (whitespace insignificant, byte offsets in every error):
//!
//! ```text
//! expr   := term (('+' | '-') term)*
//! term   := factor ('*' factor)*
//! factor := atom ('^' int)?
//! atom   := rational
//!         | 't' ('^' '(' rational ')')?
//!         | 'p' '^' '(' rational ')'
//!         | 'X'
//!         | func '(' expr ')'
//!         | '(' expr ')'
//! func   := v | inv | frob | proot | neg
//! ```
//!
//! `t^(q)` literals select the series domain F_p((t^Q)), `p^(q)` literals the
//! ramified p-adic domain; mixing both in one expression is an error. A `v(
//! ... )` node evaluates to the valuation of its argument and cannot be used
//! as an operand.

use std::fmt;

use serde_json::{json, Value};

use crate::catalog::{self, RunParams};
use crate::cuts::{classify_as_defect, Cut, CutKind, DenseGroup};
use crate::error::{Error, Result};
use crate::hahn::HahnSeries;
use crate::mixedchar::RamifiedPadic;
use crate::poly::{hensel_lift, newton_polygon, NewtonPolygon, ValuedField, ValuedPoly};
use crate::scalars::{Prime, Rational};
use crate::valuation::{Precision, Valuation};

/// Evaluation context shared by all commands.
#[derive(Debug, Clone)]
pub struct Config {
    pub prime: Prime,
    pub precision: Rational,
    pub depth: u32,
    pub json: bool,
    pub seed: u64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Func {
    Val,
    Inv,
    Frob,
    Proot,
    Neg,
}

impl Func {
    fn name(self) -> &'static str {
        match self {
            Func::Val => "v",
            Func::Inv => "inv",
            Func::Frob => "frob",
            Func::Proot => "proot",
            Func::Neg => "neg",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BinOp {
    Add,
    Sub,
    Mul,
}

#[derive(Debug, Clone, PartialEq)]
pub enum Expr {
    Rational(Rational),
    /// t^(q); bare `t` is TPow(1).
    TPow(Rational),
    PPow(Rational),
    X,
    /// Tower generator reference `a1`, `a2`, ...; only meaningful inside
    /// tower description files.
    Gen(u32),
    Call(Func, Box<Expr>),
    Binary(BinOp, Box<Expr>, Box<Expr>),
    IntPow(Box<Expr>, i64),
}

impl fmt::Display for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Expr::Rational(q) => write!(f, "{q}"),
            Expr::TPow(q) => {
                if q == &Rational::one() {
                    write!(f, "t")
                } else {
                    write!(f, "t^({q})")
                }
            }
            Expr::PPow(q) => write!(f, "p^({q})"),
            Expr::X => write!(f, "X"),
            Expr::Gen(i) => write!(f, "a{i}"),
            Expr::Call(func, e) => write!(f, "{}({e})", func.name()),
            Expr::Binary(op, a, b) => {
                let sym = match op {
                    BinOp::Add => "+",
                    BinOp::Sub => "-",
                    BinOp::Mul => "*",
                };
                write!(f, "({a} {sym} {b})")
            }
            Expr::IntPow(base, n) => match **base {
                // nested powers need explicit grouping to re-parse
                Expr::IntPow(..) => write!(f, "({base})^{n}"),
                _ => write!(f, "{base}^{n}"),
            },
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Num(Rational),
    Ident(String),
    Plus,
    Minus,
    Star,
    Caret,
    LParen,
    RParen,
}

fn err_at(offset: usize, message: impl Into<String>) -> Error {
    Error::Parse {
        offset,
        message: message.into(),
    }
}

fn lex(src: &str) -> Result<Vec<(Tok, usize)>> {
    let bytes = src.as_bytes();
    let mut toks = Vec::new();
    let mut i = 0;
    while i < bytes.len() {
        let c = bytes[i] as char;
        match c {
            ' ' | '\t' | '\r' | '\n' => i += 1,
            '+' => {
                toks.push((Tok::Plus, i));
                i += 1;
            }
            '-' => {
                toks.push((Tok::Minus, i));
                i += 1;
            }
            '*' => {
                toks.push((Tok::Star, i));
                i += 1;
            }
            '^' => {
                toks.push((Tok::Caret, i));
                i += 1;
            }
            '(' => {
                toks.push((Tok::LParen, i));
                i += 1;
            }
            ')' => {
                toks.push((Tok::RParen, i));
                i += 1;
            }
            '0'..='9' => {
                let start = i;
                while i < bytes.len() && bytes[i].is_ascii_digit() {
                    i += 1;
                }
                let mut text = &src[start..i];
                if i < bytes.len() && bytes[i] == b'/' {
                    let mut j = i + 1;
                    while j < bytes.len() && bytes[j].is_ascii_digit() {
                        j += 1;
                    }
                    if j == i + 1 {
                        return Err(err_at(i, "expected digits after '/'"));
                    }
                    i = j;
                    text = &src[start..i];
                }
                let q: Rational = text
                    .parse()
                    .map_err(|_| err_at(start, format!("invalid rational {text:?}")))?;
                toks.push((Tok::Num(q), start));
            }
            'a'..='z' | 'A'..='Z' | '_' => {
                let start = i;
                while i < bytes.len()
                    && (bytes[i].is_ascii_alphanumeric() || bytes[i] == b'_')
                {
                    i += 1;
                }
                toks.push((Tok::Ident(src[start..i].to_string()), start));
            }
            other => return Err(err_at(i, format!("unexpected character {other:?}"))),
        }
    }
    Ok(toks)
}

struct Parser {
    toks: Vec<(Tok, usize)>,
    pos: usize,
    end: usize,
}

impl Parser {
    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.pos).map(|(t, _)| t)
    }

    fn offset(&self) -> usize {
        self.toks
            .get(self.pos)
            .map(|(_, o)| *o)
            .unwrap_or(self.end)
    }

    fn bump(&mut self) -> Option<Tok> {
        let t = self.toks.get(self.pos).map(|(t, _)| t.clone());
        if t.is_some() {
            self.pos += 1;
        }
        t
    }

    fn expect(&mut self, tok: Tok, what: &str) -> Result<()> {
        if self.peek() == Some(&tok) {
            self.pos += 1;
            Ok(())
        } else {
            Err(err_at(self.offset(), format!("expected {what}")))
        }
    }

    fn parse_expr(&mut self) -> Result<Expr> {
        let mut acc = self.parse_term()?;
        loop {
            match self.peek() {
                Some(Tok::Plus) => {
                    self.pos += 1;
                    let rhs = self.parse_term()?;
                    acc = Expr::Binary(BinOp::Add, Box::new(acc), Box::new(rhs));
                }
                Some(Tok::Minus) => {
                    self.pos += 1;
                    let rhs = self.parse_term()?;
                    acc = Expr::Binary(BinOp::Sub, Box::new(acc), Box::new(rhs));
                }
                _ => return Ok(acc),
            }
        }
    }

    fn parse_term(&mut self) -> Result<Expr> {
        let mut acc = self.parse_factor()?;
        while self.peek() == Some(&Tok::Star) {
            self.pos += 1;
            let rhs = self.parse_factor()?;
            acc = Expr::Binary(BinOp::Mul, Box::new(acc), Box::new(rhs));
        }
        Ok(acc)
    }

    fn parse_factor(&mut self) -> Result<Expr> {
        let atom = self.parse_atom()?;
        if self.peek() == Some(&Tok::Caret) {
            self.pos += 1;
            let n = self.parse_int_exponent()?;
            return Ok(Expr::IntPow(Box::new(atom), n));
        }
        Ok(atom)
    }

    fn parse_int_exponent(&mut self) -> Result<i64> {
        let off = self.offset();
        let neg = if self.peek() == Some(&Tok::Minus) {
            self.pos += 1;
            true
        } else {
            false
        };
        match self.bump() {
            Some(Tok::Num(q)) if q.is_integer() => {
                let n: i64 = q
                    .numer()
                    .try_into()
                    .map_err(|_| err_at(off, "exponent too large"))?;
                Ok(if neg { -n } else { n })
            }
            _ => Err(err_at(off, "expected integer exponent after '^'")),
        }
    }

    /// `'(' rational ')'` with an optional sign inside the parentheses.
    fn parse_paren_rational(&mut self) -> Result<Rational> {
        self.expect(Tok::LParen, "'(' before exponent")?;
        let neg = if self.peek() == Some(&Tok::Minus) {
            self.pos += 1;
            true
        } else {
            false
        };
        let off = self.offset();
        let q = match self.bump() {
            Some(Tok::Num(q)) => q,
            _ => return Err(err_at(off, "expected rational exponent")),
        };
        self.expect(Tok::RParen, "')' after exponent")?;
        Ok(if neg { -q } else { q })
    }

    fn parse_atom(&mut self) -> Result<Expr> {
        let off = self.offset();
        match self.bump() {
            Some(Tok::Num(q)) => Ok(Expr::Rational(q)),
            Some(Tok::Minus) => match self.bump() {
                Some(Tok::Num(q)) => Ok(Expr::Rational(-q)),
                _ => Err(err_at(off, "expected a number after unary '-'")),
            },
            Some(Tok::LParen) => {
                let e = self.parse_expr()?;
                self.expect(Tok::RParen, "closing ')'")?;
                Ok(e)
            }
            Some(Tok::Ident(name)) => match name.as_str() {
                "t" => {
                    // t^(q) binds here; t^int is left to the factor rule
                    if self.peek() == Some(&Tok::Caret)
                        && matches!(self.toks.get(self.pos + 1), Some((Tok::LParen, _)))
                    {
                        self.pos += 1;
                        let q = self.parse_paren_rational()?;
                        Ok(Expr::TPow(q))
                    } else {
                        Ok(Expr::TPow(Rational::one()))
                    }
                }
                "p" => {
                    self.expect(Tok::Caret, "'^' after p (write p^(q))")?;
                    let q = self.parse_paren_rational()?;
                    Ok(Expr::PPow(q))
                }
                "X" => Ok(Expr::X),
                name if name.len() > 1
                    && name.starts_with('a')
                    && name[1..].bytes().all(|b| b.is_ascii_digit()) =>
                {
                    let i: u32 = name[1..]
                        .parse()
                        .map_err(|_| err_at(off, "generator index too large"))?;
                    if i == 0 {
                        return Err(err_at(off, "generator indices start at a1"));
                    }
                    Ok(Expr::Gen(i))
                }
                "v" | "inv" | "frob" | "proot" | "neg" => {
                    let func = match name.as_str() {
                        "v" => Func::Val,
                        "inv" => Func::Inv,
                        "frob" => Func::Frob,
                        "proot" => Func::Proot,
                        _ => Func::Neg,
                    };
                    self.expect(Tok::LParen, "'(' after function name")?;
                    let arg = self.parse_expr()?;
                    self.expect(Tok::RParen, "closing ')'")?;
                    Ok(Expr::Call(func, Box::new(arg)))
                }
                other => Err(err_at(off, format!("unknown function or symbol {other:?}"))),
            },
            None => Err(err_at(off, "unexpected end of input")),
            Some(_) => Err(err_at(off, "expected an atom")),
        }
    }
}

/// Parse an expression; errors carry the byte offset of the offending token.
pub fn parse(src: &str) -> Result<Expr> {
    let toks = lex(src)?;
    let mut parser = Parser {
        toks,
        pos: 0,
        end: src.len(),
    };
    let expr = parser.parse_expr()?;
    if parser.pos != parser.toks.len() {
        return Err(err_at(parser.offset(), "unexpected trailing input"));
    }
    Ok(expr)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Domain {
    Series,
    Padic,
}

fn detect_domain(expr: &Expr) -> Result<Domain> {
    fn walk(e: &Expr, has_t: &mut bool, has_p: &mut bool) {
        match e {
            Expr::TPow(_) => *has_t = true,
            Expr::PPow(_) => *has_p = true,
            Expr::Call(_, a) | Expr::IntPow(a, _) => walk(a, has_t, has_p),
            Expr::Binary(_, a, b) => {
                walk(a, has_t, has_p);
                walk(b, has_t, has_p);
            }
            Expr::Rational(_) | Expr::X | Expr::Gen(_) => {}
        }
    }
    let (mut has_t, mut has_p) = (false, false);
    walk(expr, &mut has_t, &mut has_p);
    match (has_t, has_p) {
        (true, true) => Err(Error::DomainMismatch(
            "expression mixes t-literals and p-literals".into(),
        )),
        (_, true) => Ok(Domain::Padic),
        _ => Ok(Domain::Series),
    }
}

fn contains_x(expr: &Expr) -> bool {
    match expr {
        Expr::X => true,
        Expr::Call(_, a) | Expr::IntPow(a, _) => contains_x(a),
        Expr::Binary(_, a, b) => contains_x(a) || contains_x(b),
        _ => false,
    }
}

/// Domain hooks the generic evaluator needs beyond [`ValuedField`].
trait CliDomain: ValuedField + Sized {
    fn from_rational_leaf(prime: Prime, q: &Rational, prec: &Rational) -> Result<Self>;
    fn t_pow(prime: Prime, q: &Rational) -> Result<Self>;
    fn p_pow(prime: Prime, q: &Rational) -> Result<Self>;
    fn negate(&self, prec: &Rational) -> Result<Self>;
    fn sub_cfg(&self, rhs: &Self, prec: &Rational) -> Result<Self>;
    fn frobenius_map(&self) -> Result<Self>;
    fn pth_root_map(&self) -> Result<Self>;
}

impl CliDomain for HahnSeries {
    fn from_rational_leaf(prime: Prime, q: &Rational, _prec: &Rational) -> Result<Self> {
        HahnSeries::constant_from_rational(prime, q)
    }

    fn t_pow(prime: Prime, q: &Rational) -> Result<Self> {
        Ok(HahnSeries::monomial(prime, 1, q.clone()))
    }

    fn p_pow(_prime: Prime, _q: &Rational) -> Result<Self> {
        Err(Error::DomainMismatch(
            "p-literals have no meaning in the series domain".into(),
        ))
    }

    fn negate(&self, _prec: &Rational) -> Result<Self> {
        Ok(self.neg())
    }

    fn sub_cfg(&self, rhs: &Self, _prec: &Rational) -> Result<Self> {
        self.sub(rhs)
    }

    fn frobenius_map(&self) -> Result<Self> {
        Ok(self.frobenius())
    }

    fn pth_root_map(&self) -> Result<Self> {
        Ok(self.pth_root())
    }
}

impl CliDomain for RamifiedPadic {
    fn from_rational_leaf(prime: Prime, q: &Rational, prec: &Rational) -> Result<Self> {
        RamifiedPadic::from_rational(prime, q, prec)
    }

    fn t_pow(_prime: Prime, _q: &Rational) -> Result<Self> {
        Err(Error::DomainMismatch(
            "t-literals have no meaning in the p-adic domain".into(),
        ))
    }

    fn p_pow(prime: Prime, q: &Rational) -> Result<Self> {
        RamifiedPadic::monomial(prime, 1, q.clone())
    }

    fn negate(&self, prec: &Rational) -> Result<Self> {
        RamifiedPadic::zero(self.prime()).sub_or_cap(self, prec)
    }

    fn sub_cfg(&self, rhs: &Self, prec: &Rational) -> Result<Self> {
        self.sub_or_cap(rhs, prec)
    }

    fn frobenius_map(&self) -> Result<Self> {
        Err(Error::DomainMismatch(
            "frob is the characteristic-p power map; unavailable in characteristic 0".into(),
        ))
    }

    fn pth_root_map(&self) -> Result<Self> {
        Err(Error::DomainMismatch(
            "proot is the characteristic-p root map; unavailable in characteristic 0".into(),
        ))
    }
}

enum Evaluated<K> {
    Value(K),
    Valuation(Valuation),
}

impl<K> Evaluated<K> {
    fn value(self) -> Result<K> {
        match self {
            Evaluated::Value(v) => Ok(v),
            Evaluated::Valuation(_) => Err(Error::DomainMismatch(
                "a valuation cannot be used as an operand".into(),
            )),
        }
    }
}

fn eval_in<K: CliDomain>(expr: &Expr, cfg: &Config) -> Result<Evaluated<K>> {
    let prec = &cfg.precision;
    let out = match expr {
        Expr::Rational(q) => Evaluated::Value(K::from_rational_leaf(cfg.prime, q, prec)?),
        Expr::TPow(q) => Evaluated::Value(K::t_pow(cfg.prime, q)?),
        Expr::PPow(q) => Evaluated::Value(K::p_pow(cfg.prime, q)?),
        Expr::X => {
            return Err(Error::Precondition(
                "free X is only meaningful in polynomial commands".into(),
            ))
        }
        Expr::Gen(_) => {
            return Err(Error::Precondition(
                "generator references are only valid in tower descriptions".into(),
            ))
        }
        Expr::Call(func, arg) => {
            let inner = eval_in::<K>(arg, cfg)?.value()?;
            match func {
                Func::Val => Evaluated::Valuation(inner.valuation()),
                Func::Neg => Evaluated::Value(inner.negate(prec)?),
                Func::Inv => Evaluated::Value(inner.invert(&Precision::Finite(prec.clone()))?),
                Func::Frob => Evaluated::Value(inner.frobenius_map()?),
                Func::Proot => Evaluated::Value(inner.pth_root_map()?),
            }
        }
        Expr::Binary(op, a, b) => {
            let left = eval_in::<K>(a, cfg)?.value()?;
            let right = eval_in::<K>(b, cfg)?.value()?;
            let v = match op {
                BinOp::Add => left.add(&right)?,
                BinOp::Sub => left.sub_cfg(&right, prec)?,
                BinOp::Mul => left.mul(&right)?,
            };
            Evaluated::Value(v)
        }
        Expr::IntPow(base, n) => {
            let base = eval_in::<K>(base, cfg)?.value()?;
            Evaluated::Value(int_pow(&base, *n, prec)?)
        }
    };
    Ok(out)
}

fn int_pow<K: CliDomain>(base: &K, n: i64, prec: &Rational) -> Result<K> {
    if n < 0 {
        let inv = base.invert(&Precision::Finite(prec.clone()))?;
        return int_pow(&inv, -n, prec);
    }
    let mut acc = base.one_like();
    for _ in 0..n {
        acc = acc.mul(base)?;
    }
    Ok(acc)
}

/// Dense polynomial coefficients from an expression containing X.
fn poly_eval<K: CliDomain>(expr: &Expr, cfg: &Config) -> Result<Vec<K>> {
    let prec = &cfg.precision;
    match expr {
        Expr::X => {
            let one = K::t_pow(cfg.prime, &Rational::zero())
                .or_else(|_| K::from_rational_leaf(cfg.prime, &Rational::one(), prec))?;
            Ok(vec![one.zero_like(), one.one_like()])
        }
        Expr::Binary(op, a, b) => {
            let left = poly_eval::<K>(a, cfg)?;
            let right = poly_eval::<K>(b, cfg)?;
            match op {
                BinOp::Add | BinOp::Sub => {
                    let n = left.len().max(right.len());
                    let zero = left[0].zero_like();
                    let mut out = Vec::with_capacity(n);
                    for i in 0..n {
                        let l = left.get(i).unwrap_or(&zero);
                        let r = right.get(i).unwrap_or(&zero);
                        out.push(if *op == BinOp::Add {
                            l.add(r)?
                        } else {
                            l.sub_cfg(r, prec)?
                        });
                    }
                    Ok(out)
                }
                BinOp::Mul => {
                    let zero = left[0].zero_like();
                    let mut out = vec![zero; left.len() + right.len() - 1];
                    for (i, l) in left.iter().enumerate() {
                        for (j, r) in right.iter().enumerate() {
                            if l.is_exact_zero() || r.is_exact_zero() {
                                continue;
                            }
                            let prod = l.mul(r)?;
                            out[i + j] = out[i + j].add(&prod)?;
                        }
                    }
                    Ok(out)
                }
            }
        }
        Expr::IntPow(base, n) => {
            if *n < 0 {
                let inner = poly_eval::<K>(base, cfg)?;
                if inner.len() != 1 {
                    return Err(Error::Precondition(
                        "negative powers apply to scalars only".into(),
                    ));
                }
                return Ok(vec![int_pow(&inner[0], *n, prec)?]);
            }
            let inner = poly_eval::<K>(base, cfg)?;
            let mut acc = vec![inner[0].one_like()];
            for _ in 0..*n {
                let zero = inner[0].zero_like();
                let mut next = vec![zero; acc.len() + inner.len() - 1];
                for (i, l) in acc.iter().enumerate() {
                    for (j, r) in inner.iter().enumerate() {
                        if l.is_exact_zero() || r.is_exact_zero() {
                            continue;
                        }
                        let prod = l.mul(r)?;
                        next[i + j] = next[i + j].add(&prod)?;
                    }
                }
                acc = next;
            }
            Ok(acc)
        }
        Expr::Call(func, arg) => {
            let inner = poly_eval::<K>(arg, cfg)?;
            if inner.len() != 1 {
                return Err(Error::Precondition(format!(
                    "{}() applies to scalars, not polynomials of positive degree",
                    func.name()
                )));
            }
            let x = inner.into_iter().next().expect("one element");
            let v = match func {
                Func::Val => {
                    return Err(Error::Precondition(
                        "v() is not available inside polynomial sources".into(),
                    ))
                }
                Func::Neg => x.negate(prec)?,
                Func::Inv => x.invert(&Precision::Finite(prec.clone()))?,
                Func::Frob => x.frobenius_map()?,
                Func::Proot => x.pth_root_map()?,
            };
            Ok(vec![v])
        }
        leaf => Ok(vec![eval_in::<K>(leaf, cfg)?.value()?]),
    }
}

/// An evaluated expression, tagged by domain. This is the value-level entry
/// point used by foreign bindings; the text commands render it instead.
pub enum DomainValue {
    Series(HahnSeries),
    Padic(RamifiedPadic),
}

/// Evaluate a closed value expression (no X, no top-level `v(...)`).
pub fn eval_value(cfg: &Config, src: &str) -> Result<DomainValue> {
    let expr = parse(src)?;
    if contains_x(&expr) {
        return Err(Error::Precondition(
            "eval takes a closed expression; X is for np/lift".into(),
        ));
    }
    match detect_domain(&expr)? {
        Domain::Series => Ok(DomainValue::Series(
            eval_in::<HahnSeries>(&expr, cfg)?.value()?,
        )),
        Domain::Padic => Ok(DomainValue::Padic(
            eval_in::<RamifiedPadic>(&expr, cfg)?.value()?,
        )),
    }
}

/// Outcome of a command: rendered output plus the all-pass flag that decides
/// between exit codes 0 and 1.
pub struct CmdOutput {
    pub text: String,
    pub all_pass: bool,
}

fn ok(text: String) -> CmdOutput {
    CmdOutput {
        text,
        all_pass: true,
    }
}

pub fn eval_cmd(cfg: &Config, src: &str) -> Result<CmdOutput> {
    let expr = parse(src)?;
    if contains_x(&expr) {
        return Err(Error::Precondition(
            "eval takes a closed expression; X is for np/lift".into(),
        ));
    }
    let (domain, rendered) = match detect_domain(&expr)? {
        Domain::Series => ("series", render_eval(eval_in::<HahnSeries>(&expr, cfg)?)),
        Domain::Padic => ("padic", render_eval(eval_in::<RamifiedPadic>(&expr, cfg)?)),
    };
    if cfg.json {
        let v = json!({ "domain": domain, "value": rendered });
        Ok(ok(render_json(&v)))
    } else {
        Ok(ok(rendered))
    }
}

fn render_eval<K: fmt::Display>(out: Evaluated<K>) -> String {
    match out {
        Evaluated::Value(v) => v.to_string(),
        Evaluated::Valuation(v) => v.to_string(),
    }
}

fn render_json(v: &Value) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("json renders");
    s.push('\n');
    s
}

fn polygon_to_json(domain: &str, src: &str, polygon: &NewtonPolygon) -> Value {
    json!({
        "domain": domain,
        "source": src,
        "polygon": serde_json::to_value(polygon).expect("polygon serializes"),
        "root_valuations": polygon
            .root_valuations()
            .iter()
            .map(|(v, m)| json!({"valuation": v.to_string(), "multiplicity": m}))
            .collect::<Vec<_>>(),
    })
}

fn polygon_text(polygon: &NewtonPolygon) -> String {
    let roots: Vec<String> = polygon
        .root_valuations()
        .iter()
        .map(|(v, m)| format!("{v} x{m}"))
        .collect();
    format!("root valuations: {{{}}}", roots.join(", "))
}

pub fn np_cmd(cfg: &Config, src: &str) -> Result<CmdOutput> {
    let expr = parse(src)?;
    let (domain, polygon) = match detect_domain(&expr)? {
        Domain::Series => {
            let coeffs = poly_eval::<HahnSeries>(&expr, cfg)?;
            ("series", newton_polygon(&ValuedPoly::new(coeffs)?)?)
        }
        Domain::Padic => {
            let coeffs = poly_eval::<RamifiedPadic>(&expr, cfg)?;
            ("padic", newton_polygon(&ValuedPoly::new(coeffs)?)?)
        }
    };
    if cfg.json {
        Ok(ok(render_json(&polygon_to_json(domain, src, &polygon))))
    } else {
        Ok(ok(polygon_text(&polygon)))
    }
}

pub fn lift_cmd(cfg: &Config, poly_src: &str, start_src: &str) -> Result<CmdOutput> {
    let poly_expr = parse(poly_src)?;
    let start_expr = parse(start_src)?;
    if contains_x(&start_expr) {
        return Err(Error::Precondition("the start value must not contain X".into()));
    }
    let domain = detect_domain(&poly_expr)?;
    let (dom_name, root, residual) = match domain {
        Domain::Series => {
            let f = ValuedPoly::new(poly_eval::<HahnSeries>(&poly_expr, cfg)?)?;
            let b = eval_in::<HahnSeries>(&start_expr, cfg)?.value()?;
            let lift = hensel_lift(&f, &b, &cfg.precision)?;
            ("series", lift.root.to_string(), lift.residual_valuation)
        }
        Domain::Padic => {
            let f = ValuedPoly::new(poly_eval::<RamifiedPadic>(&poly_expr, cfg)?)?;
            let b = eval_in::<RamifiedPadic>(&start_expr, cfg)?.value()?;
            let lift = hensel_lift(&f, &b, &cfg.precision)?;
            ("padic", lift.root.to_string(), lift.residual_valuation)
        }
    };
    if cfg.json {
        let v = json!({
            "domain": dom_name,
            "root": root,
            "residual_valuation": residual.to_string(),
        });
        Ok(ok(render_json(&v)))
    } else {
        Ok(ok(format!(
            "root: {root}\nresidual valuation: {residual}"
        )))
    }
}

pub fn classify_cmd(cfg: &Config, literal: &str) -> Result<CmdOutput> {
    let kind: CutKind = literal.parse()?;
    let group = DenseGroup::p_fractions(cfg.prime, Rational::one())?;
    let cut = Cut::new(kind, group);
    let verdict = classify_as_defect(&cut)?;
    if cfg.json {
        let v = json!({ "cut": cut.to_string(), "verdict": verdict.to_string() });
        Ok(ok(render_json(&v)))
    } else {
        Ok(ok(verdict.to_string()))
    }
}

fn report_text(report: &catalog::ExampleReport) -> String {
    let mut lines = Vec::new();
    lines.push(format!(
        "example {} (p = {}, k = {}, precision {}):",
        report.id, report.prime, report.depth, report.precision
    ));
    for c in &report.checks {
        let mark = if c.pass { "PASS" } else { "FAIL" };
        if c.pass {
            lines.push(format!("  [{mark}] {}: {}", c.name, c.computed));
        } else {
            lines.push(format!(
                "  [{mark}] {}: expected {}, computed {}",
                c.name, c.expected, c.computed
            ));
        }
    }
    if let Some(d) = &report.defect_report {
        lines.push(format!(
            "  defect record: n = {}, e = {}, f = {}, g = {}, d = {}",
            d.n, d.e, d.f, d.g, d.d
        ));
    }
    if let Some(c) = &report.classification {
        lines.push(format!("  classification: {} -> {}", c.cut, c.verdict));
    }
    for n in &report.notes {
        lines.push(format!("  note: {n}"));
    }
    lines.push(if report.passed {
        "  result: PASS".to_string()
    } else {
        "  result: FAIL".to_string()
    });
    lines.join("\n")
}

pub fn example_cmd(cfg: &Config, id: Option<&str>, all: bool) -> Result<CmdOutput> {
    let params = RunParams {
        prime: cfg.prime.get(),
        depth: cfg.depth,
        precision: None,
        seed: cfg.seed,
    };
    if all {
        let mut reports = Vec::new();
        for info in catalog::list_examples() {
            // the square-root entries are pinned to p = 2
            let mut entry_params = params.clone();
            if info.id.starts_with("sqrt") {
                entry_params.prime = 2;
            }
            if info.id == "as_tower" {
                entry_params.depth = entry_params.depth.min(4);
            }
            reports.push(catalog::run_example(info.id, &entry_params)?);
        }
        let all_pass = reports.iter().all(|r| r.passed);
        if cfg.json {
            let v = serde_json::to_value(&reports).expect("reports serialize");
            Ok(CmdOutput {
                text: render_json(&v),
                all_pass,
            })
        } else {
            let text = reports
                .iter()
                .map(report_text)
                .collect::<Vec<_>>()
                .join("\n\n");
            Ok(CmdOutput { text, all_pass })
        }
    } else {
        let id = id.ok_or_else(|| {
            Error::ParamOutOfRange("an example id or --all is required".into())
        })?;
        let report = catalog::run_example(id, &params)?;
        let all_pass = report.passed;
        if cfg.json {
            Ok(CmdOutput {
                text: report.to_json(),
                all_pass,
            })
        } else {
            Ok(CmdOutput {
                text: report_text(&report),
                all_pass,
            })
        }
    }
}

/// Build a tower over F_p((t)) from its JSON description. Step polynomials
/// are expression strings in X whose coefficients may use earlier generators
/// `a1`, ..., `a(i-1)`.
pub fn tower_from_description(
    desc: &crate::towers::TowerDescription,
) -> Result<crate::towers::Tower<HahnSeries>> {
    use crate::towers::{Tower, TowerElement};

    let prime = Prime::new(desc.base.prime)?;
    if !desc.base.working_precision.is_positive() {
        return Err(Error::ParamOutOfRange(
            "working precision must be positive".into(),
        ));
    }
    let mut tower = Tower::over_laurent_series(prime, desc.base.working_precision.clone());

    fn eval_coeff(
        tower: &crate::towers::Tower<HahnSeries>,
        level: usize,
        expr: &Expr,
    ) -> Result<TowerElement<HahnSeries>> {
        let prime = tower.prime();
        match expr {
            Expr::Rational(q) => Ok(tower.from_base(
                HahnSeries::constant_from_rational(prime, q)?,
                level,
            )),
            Expr::TPow(q) => Ok(tower.from_base(
                HahnSeries::monomial(prime, 1, q.clone()),
                level,
            )),
            Expr::PPow(_) => Err(Error::DomainMismatch(
                "towers here are built over the series base".into(),
            )),
            Expr::X => Err(Error::Precondition(
                "X may appear only at the top level of a minimal polynomial".into(),
            )),
            Expr::Gen(i) => {
                let i = *i as usize;
                if i > level {
                    return Err(Error::ParamOutOfRange(format!(
                        "generator a{i} is not available below level {level}"
                    )));
                }
                tower.generator(i, level)
            }
            Expr::Call(func, arg) => {
                let inner = eval_coeff(tower, level, arg)?;
                match func {
                    Func::Neg => tower.neg(&inner),
                    Func::Inv => tower.invert(&inner),
                    Func::Val | Func::Frob | Func::Proot => Err(Error::Precondition(format!(
                        "{}() is not available inside tower descriptions",
                        func.name()
                    ))),
                }
            }
            Expr::Binary(op, a, b) => {
                let left = eval_coeff(tower, level, a)?;
                let right = eval_coeff(tower, level, b)?;
                match op {
                    BinOp::Add => tower.add(&left, &right),
                    BinOp::Sub => tower.sub(&left, &right),
                    BinOp::Mul => tower.mul(&left, &right),
                }
            }
            Expr::IntPow(base, n) => {
                if *n < 0 {
                    let inner = eval_coeff(tower, level, base)?;
                    let inv = tower.invert(&inner)?;
                    let mut acc = tower.one_at(level);
                    for _ in 0..-n {
                        acc = tower.mul(&acc, &inv)?;
                    }
                    return Ok(acc);
                }
                let inner = eval_coeff(tower, level, base)?;
                let mut acc = tower.one_at(level);
                for _ in 0..*n {
                    acc = tower.mul(&acc, &inner)?;
                }
                Ok(acc)
            }
        }
    }

    /// Dense coefficient vector in X, entries evaluated as tower elements.
    fn eval_minpoly(
        tower: &crate::towers::Tower<HahnSeries>,
        level: usize,
        expr: &Expr,
    ) -> Result<Vec<TowerElement<HahnSeries>>> {
        match expr {
            Expr::X => Ok(vec![tower.zero_at(level), tower.one_at(level)]),
            Expr::Binary(op, a, b) => {
                let left = eval_minpoly(tower, level, a)?;
                let right = eval_minpoly(tower, level, b)?;
                match op {
                    BinOp::Add | BinOp::Sub => {
                        let n = left.len().max(right.len());
                        let mut out = Vec::with_capacity(n);
                        for i in 0..n {
                            let zero = tower.zero_at(level);
                            let l = left.get(i).unwrap_or(&zero);
                            let r = right.get(i).unwrap_or(&zero);
                            out.push(if *op == BinOp::Add {
                                tower.add(l, r)?
                            } else {
                                tower.sub(l, r)?
                            });
                        }
                        Ok(out)
                    }
                    BinOp::Mul => {
                        let mut out =
                            vec![tower.zero_at(level); left.len() + right.len() - 1];
                        for (i, l) in left.iter().enumerate() {
                            for (j, r) in right.iter().enumerate() {
                                let prod = tower.mul(l, r)?;
                                out[i + j] = tower.add(&out[i + j], &prod)?;
                            }
                        }
                        Ok(out)
                    }
                }
            }
            Expr::IntPow(base, n) if *n >= 0 => {
                let inner = eval_minpoly(tower, level, base)?;
                let mut acc = vec![tower.one_at(level)];
                for _ in 0..*n {
                    let mut next = vec![tower.zero_at(level); acc.len() + inner.len() - 1];
                    for (i, l) in acc.iter().enumerate() {
                        for (j, r) in inner.iter().enumerate() {
                            let prod = tower.mul(l, r)?;
                            next[i + j] = tower.add(&next[i + j], &prod)?;
                        }
                    }
                    acc = next;
                }
                Ok(acc)
            }
            leaf => Ok(vec![eval_coeff(tower, level, leaf)?]),
        }
    }

    for (idx, step) in desc.steps.iter().enumerate() {
        let expr = parse(&step.minpoly)?;
        let coeffs = eval_minpoly(&tower, idx, &expr)?;
        tower = tower.extend(coeffs, step.gen_val.clone())?;
    }
    Ok(tower)
}

pub fn list_cmd(cfg: &Config) -> Result<CmdOutput> {
    let infos = catalog::list_examples();
    if cfg.json {
        let v = serde_json::to_value(&infos).expect("infos serialize");
        Ok(ok(render_json(&v)))
    } else {
        let text = infos
            .iter()
            .map(|i| format!("{:<13} {} ({})", i.id, i.summary, i.attribution))
            .collect::<Vec<_>>()
            .join("\n");
        Ok(ok(text))
    }
}
