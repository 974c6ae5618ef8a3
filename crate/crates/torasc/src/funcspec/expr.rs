//! Smooth-factor expressions: rational constants, variables, `+`, `-`, `*`,
//! nonnegative integer powers, `exp`, and the flat atoms.
//!
//! `flat(i,k)` denotes `exp(-1/x_i^{2k})` extended by 0 at `x_i = 0`;
//! `flatm(i,k,m)` denotes `x_i^{-m} * exp(-1/x_i^{2k})`, likewise extended by
//! 0. Negative powers of a variable exist only inside `flatm`, which keeps
//! every expression C-infinity at the origin, and the algebra is closed
//! under partial differentiation.

use crate::rat::{self, big, BigRat, Rat};
use crate::Error;
use num_traits::{One, Zero};
use std::collections::BTreeSet;
use std::fmt;

/// Expression tree for a smooth factor.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Expr {
    /// Exact rational constant.
    Const(Rat),
    /// Variable `x_i`, 1-based.
    Var(usize),
    Add(Box<Expr>, Box<Expr>),
    Sub(Box<Expr>, Box<Expr>),
    Mul(Box<Expr>, Box<Expr>),
    /// Nonnegative integer power of a subexpression.
    Pow(Box<Expr>, u32),
    Exp(Box<Expr>),
    /// `exp(-1/x_var^{2k})`, 0 at `x_var = 0`; `k >= 1`.
    Flat { var: usize, k: u32 },
    /// `x_var^{-m} * exp(-1/x_var^{2k})`, 0 at `x_var = 0`; `k >= 1`.
    FlatM { var: usize, k: u32, m: u32 },
}

impl Expr {
    pub fn zero() -> Expr {
        Expr::Const(Rat::zero())
    }

    pub fn one() -> Expr {
        Expr::Const(Rat::one())
    }

    pub fn num(v: i64) -> Expr {
        Expr::Const(Rat::from_integer(v))
    }

    /// Syntactic test against the literal constant 0.
    pub fn is_zero(&self) -> bool {
        matches!(self, Expr::Const(c) if c.is_zero())
    }

    /// Syntactic test against the literal constant 1.
    pub fn is_one(&self) -> bool {
        matches!(self, Expr::Const(c) if c.is_one())
    }

    /// Sum with folding of constant operands and zero absorption.
    pub fn add(a: Expr, b: Expr) -> Expr {
        if a.is_zero() {
            return b;
        }
        if b.is_zero() {
            return a;
        }
        if let (Expr::Const(x), Expr::Const(y)) = (&a, &b) {
            if let Some(c) = fold2(*x, *y, |p, q| p + q) {
                return Expr::Const(c);
            }
        }
        Expr::Add(Box::new(a), Box::new(b))
    }

    /// Difference with constant folding.
    pub fn sub(a: Expr, b: Expr) -> Expr {
        if b.is_zero() {
            return a;
        }
        if let (Expr::Const(x), Expr::Const(y)) = (&a, &b) {
            if let Some(c) = fold2(*x, *y, |p, q| p - q) {
                return Expr::Const(c);
            }
        }
        Expr::Sub(Box::new(a), Box::new(b))
    }

    /// Product with folding of constants and absorption of 0 and 1.
    pub fn mul(a: Expr, b: Expr) -> Expr {
        if a.is_zero() || b.is_zero() {
            return Expr::zero();
        }
        if a.is_one() {
            return b;
        }
        if b.is_one() {
            return a;
        }
        if let (Expr::Const(x), Expr::Const(y)) = (&a, &b) {
            if let Some(c) = fold2(*x, *y, |p, q| p * q) {
                return Expr::Const(c);
            }
        }
        Expr::Mul(Box::new(a), Box::new(b))
    }

    /// Power with folding of the trivial exponents and constant bases.
    pub fn pow(b: Expr, k: u32) -> Expr {
        match k {
            0 => Expr::one(),
            1 => b,
            _ => {
                if let Expr::Const(c) = &b {
                    let wide = rat::WideRat::new(*c.numer() as i128, *c.denom() as i128);
                    let mut acc = rat::WideRat::one();
                    let mut ok = true;
                    for _ in 0..k {
                        match checked_mul(acc, wide) {
                            Some(v) => acc = v,
                            None => {
                                ok = false;
                                break;
                            }
                        }
                    }
                    if ok {
                        if let Some(folded) = rat::try_narrow(&acc) {
                            return Expr::Const(folded);
                        }
                    }
                }
                Expr::Pow(Box::new(b), k)
            }
        }
    }

    /// `exp` with the single fold `exp(0) = 1` (other constants stay
    /// symbolic: their values are irrational).
    pub fn exp(g: Expr) -> Expr {
        if g.is_zero() {
            return Expr::one();
        }
        Expr::Exp(Box::new(g))
    }

    /// Floating-point evaluation; flat atoms underflow to exactly 0.
    pub fn eval_f64(&self, x: &[f64]) -> f64 {
        match self {
            Expr::Const(c) => rat::rat_to_f64(*c),
            Expr::Var(i) => x[i - 1],
            Expr::Add(a, b) => a.eval_f64(x) + b.eval_f64(x),
            Expr::Sub(a, b) => a.eval_f64(x) - b.eval_f64(x),
            Expr::Mul(a, b) => a.eval_f64(x) * b.eval_f64(x),
            Expr::Pow(b, k) => b.eval_f64(x).powi(*k as i32),
            Expr::Exp(g) => g.eval_f64(x).exp(),
            Expr::Flat { var, k } => flat_eval(x[var - 1], *k),
            Expr::FlatM { var, k, m } => flatm_eval(x[var - 1], *k, *m),
        }
    }

    /// Exact rational evaluation where possible: flat atoms are exactly 0 at
    /// the origin of their variable, `exp(0) = 1`; any other `exp` or flat
    /// value is irrational and yields `None`.
    pub fn eval_exact(&self, x: &[BigRat]) -> Option<BigRat> {
        match self {
            Expr::Const(c) => Some(big(*c)),
            Expr::Var(i) => Some(x[i - 1].clone()),
            Expr::Add(a, b) => Some(a.eval_exact(x)? + b.eval_exact(x)?),
            Expr::Sub(a, b) => Some(a.eval_exact(x)? - b.eval_exact(x)?),
            Expr::Mul(a, b) => Some(a.eval_exact(x)? * b.eval_exact(x)?),
            Expr::Pow(b, k) => Some(rat::big_pow(&b.eval_exact(x)?, *k)),
            Expr::Exp(g) => {
                if g.eval_exact(x)?.is_zero() {
                    Some(BigRat::one())
                } else {
                    None
                }
            }
            Expr::Flat { var, .. } | Expr::FlatM { var, .. } => {
                if x[var - 1].is_zero() {
                    Some(BigRat::zero())
                } else {
                    None
                }
            }
        }
    }

    /// Symbolic partial derivative with respect to `x_i`; stays inside the
    /// algebra (flat atoms differentiate to combinations of `flatm`).
    pub fn diff(&self, i: usize) -> Expr {
        match self {
            Expr::Const(_) => Expr::zero(),
            Expr::Var(j) => {
                if *j == i {
                    Expr::one()
                } else {
                    Expr::zero()
                }
            }
            Expr::Add(a, b) => Expr::add(a.diff(i), b.diff(i)),
            Expr::Sub(a, b) => Expr::sub(a.diff(i), b.diff(i)),
            Expr::Mul(a, b) => Expr::add(
                Expr::mul(a.diff(i), (**b).clone()),
                Expr::mul((**a).clone(), b.diff(i)),
            ),
            Expr::Pow(b, k) => {
                if *k == 0 {
                    Expr::zero()
                } else {
                    Expr::mul(
                        Expr::num(*k as i64),
                        Expr::mul(Expr::pow((**b).clone(), k - 1), b.diff(i)),
                    )
                }
            }
            Expr::Exp(g) => Expr::mul(g.diff(i), Expr::exp((**g).clone())),
            Expr::Flat { var, k } => {
                if *var != i {
                    Expr::zero()
                } else {
                    Expr::mul(
                        Expr::num(2 * *k as i64),
                        Expr::FlatM {
                            var: *var,
                            k: *k,
                            m: 2 * *k + 1,
                        },
                    )
                }
            }
            Expr::FlatM { var, k, m } => {
                if *var != i {
                    Expr::zero()
                } else {
                    Expr::sub(
                        Expr::mul(
                            Expr::num(2 * *k as i64),
                            Expr::FlatM {
                                var: *var,
                                k: *k,
                                m: *m + 2 * *k + 1,
                            },
                        ),
                        Expr::mul(
                            Expr::num(*m as i64),
                            Expr::FlatM {
                                var: *var,
                                k: *k,
                                m: *m + 1,
                            },
                        ),
                    )
                }
            }
        }
    }

    /// Substitutes `x_j = 0` for every `j` in `vars` (the map `T_W`); flat
    /// atoms in those variables collapse to 0.
    pub fn set_zero(&self, vars: &BTreeSet<usize>) -> Expr {
        match self {
            Expr::Const(_) => self.clone(),
            Expr::Var(j) => {
                if vars.contains(j) {
                    Expr::zero()
                } else {
                    self.clone()
                }
            }
            Expr::Add(a, b) => Expr::add(a.set_zero(vars), b.set_zero(vars)),
            Expr::Sub(a, b) => Expr::sub(a.set_zero(vars), b.set_zero(vars)),
            Expr::Mul(a, b) => Expr::mul(a.set_zero(vars), b.set_zero(vars)),
            Expr::Pow(b, k) => Expr::pow(b.set_zero(vars), *k),
            Expr::Exp(g) => Expr::exp(g.set_zero(vars)),
            Expr::Flat { var, .. } | Expr::FlatM { var, .. } => {
                if vars.contains(var) {
                    Expr::zero()
                } else {
                    self.clone()
                }
            }
        }
    }

    /// Rewrites under the monomial substitution `x_k = prod_j y_j^{rows[k-1][j]}`.
    /// Returns `None` when a flat atom's variable maps to a monomial in more
    /// than one chart variable (the composition then leaves the algebra).
    pub fn substitute_monomial(&self, rows: &[Vec<u32>]) -> Option<Expr> {
        match self {
            Expr::Const(_) => Some(self.clone()),
            Expr::Var(i) => {
                let mut acc = Expr::one();
                for (j, &e) in rows[i - 1].iter().enumerate() {
                    if e > 0 {
                        acc = Expr::mul(acc, Expr::pow(Expr::Var(j + 1), e));
                    }
                }
                Some(acc)
            }
            Expr::Add(a, b) => Some(Expr::add(
                a.substitute_monomial(rows)?,
                b.substitute_monomial(rows)?,
            )),
            Expr::Sub(a, b) => Some(Expr::sub(
                a.substitute_monomial(rows)?,
                b.substitute_monomial(rows)?,
            )),
            Expr::Mul(a, b) => Some(Expr::mul(
                a.substitute_monomial(rows)?,
                b.substitute_monomial(rows)?,
            )),
            Expr::Pow(b, k) => Some(Expr::pow(b.substitute_monomial(rows)?, *k)),
            Expr::Exp(g) => Some(Expr::exp(g.substitute_monomial(rows)?)),
            Expr::Flat { var, k } => {
                let (j, e) = single_var_image(&rows[*var - 1])?;
                Some(Expr::Flat {
                    var: j,
                    k: k.checked_mul(e)?,
                })
            }
            Expr::FlatM { var, k, m } => {
                let (j, e) = single_var_image(&rows[*var - 1])?;
                Some(Expr::FlatM {
                    var: j,
                    k: k.checked_mul(e)?,
                    m: m.checked_mul(e)?,
                })
            }
        }
    }

    /// Collects every variable index occurring in the expression (including
    /// inside `exp` arguments and flat atoms).
    pub fn collect_vars(&self, out: &mut BTreeSet<usize>) {
        match self {
            Expr::Const(_) => {}
            Expr::Var(i) => {
                out.insert(*i);
            }
            Expr::Add(a, b) | Expr::Sub(a, b) | Expr::Mul(a, b) => {
                a.collect_vars(out);
                b.collect_vars(out);
            }
            Expr::Pow(b, _) => b.collect_vars(out),
            Expr::Exp(g) => g.collect_vars(out),
            Expr::Flat { var, .. } | Expr::FlatM { var, .. } => {
                out.insert(*var);
            }
        }
    }

    /// Rewrites under the reflection `x_i -> signs[i-1] * x_i` with signs in
    /// `{-1, +1}`. The result stays in the algebra: `flat` is even in its
    /// variable, and `flatm` picks up the sign `(-1)^m`.
    pub fn reflect(&self, signs: &[i8]) -> Expr {
        match self {
            Expr::Const(_) => self.clone(),
            Expr::Var(i) => {
                if signs[i - 1] < 0 {
                    Expr::mul(Expr::num(-1), Expr::Var(*i))
                } else {
                    self.clone()
                }
            }
            Expr::Add(a, b) => Expr::add(a.reflect(signs), b.reflect(signs)),
            Expr::Sub(a, b) => Expr::sub(a.reflect(signs), b.reflect(signs)),
            Expr::Mul(a, b) => Expr::mul(a.reflect(signs), b.reflect(signs)),
            Expr::Pow(b, k) => Expr::pow(b.reflect(signs), *k),
            Expr::Exp(g) => Expr::exp(g.reflect(signs)),
            Expr::Flat { .. } => self.clone(),
            Expr::FlatM { var, m, .. } => {
                if signs[*var - 1] < 0 && m % 2 == 1 {
                    Expr::mul(Expr::num(-1), self.clone())
                } else {
                    self.clone()
                }
            }
        }
    }

    /// True when a flat atom occurs anywhere in the expression.
    pub fn contains_flat(&self) -> bool {
        match self {
            Expr::Const(_) | Expr::Var(_) => false,
            Expr::Add(a, b) | Expr::Sub(a, b) | Expr::Mul(a, b) => {
                a.contains_flat() || b.contains_flat()
            }
            Expr::Pow(b, _) => b.contains_flat(),
            Expr::Exp(g) => g.contains_flat(),
            Expr::Flat { .. } | Expr::FlatM { .. } => true,
        }
    }

    fn prec(&self) -> u8 {
        match self {
            Expr::Add(..) | Expr::Sub(..) => 1,
            Expr::Mul(..) => 2,
            Expr::Pow(..) => 3,
            _ => 4,
        }
    }

    fn fmt_prec(&self, f: &mut fmt::Formatter<'_>, required: u8) -> fmt::Result {
        self.fmt_prec_named(f, required, "x")
    }

    fn fmt_prec_named(&self, f: &mut fmt::Formatter<'_>, required: u8, var: &str) -> fmt::Result {
        let parens = self.prec() < required;
        if parens {
            write!(f, "(")?;
        }
        match self {
            Expr::Const(c) => write!(f, "{}", rat::rat_string(*c))?,
            Expr::Var(i) => write!(f, "{var}{i}")?,
            Expr::Add(a, b) => {
                a.fmt_prec_named(f, 1, var)?;
                write!(f, "+")?;
                b.fmt_prec_named(f, 2, var)?;
            }
            Expr::Sub(a, b) => {
                a.fmt_prec_named(f, 1, var)?;
                write!(f, "-")?;
                b.fmt_prec_named(f, 2, var)?;
            }
            Expr::Mul(a, b) => {
                a.fmt_prec_named(f, 2, var)?;
                write!(f, "*")?;
                b.fmt_prec_named(f, 3, var)?;
            }
            Expr::Pow(b, k) => {
                b.fmt_prec_named(f, 4, var)?;
                write!(f, "^{k}")?;
            }
            Expr::Exp(g) => {
                write!(f, "exp(")?;
                g.fmt_prec_named(f, 1, var)?;
                write!(f, ")")?;
            }
            Expr::Flat { var: i, k } => write!(f, "flat({i},{k})")?,
            Expr::FlatM { var: i, k, m } => write!(f, "flatm({i},{k},{m})")?,
        }
        if parens {
            write!(f, ")")?;
        }
        Ok(())
    }

    /// Canonical display with a caller-chosen variable letter (chart
    /// coordinates are conventionally `y`).
    pub fn display_named(&self, var: &str) -> String {
        struct Named<'a>(&'a Expr, &'a str);
        impl fmt::Display for Named<'_> {
            fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
                self.0.fmt_prec_named(f, 0, self.1)
            }
        }
        Named(self, var).to_string()
    }
}

impl fmt::Display for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.fmt_prec(f, 0)
    }
}

fn checked_mul(a: rat::WideRat, b: rat::WideRat) -> Option<rat::WideRat> {
    let num = a.numer().checked_mul(*b.numer())?;
    let den = a.denom().checked_mul(*b.denom())?;
    Some(rat::WideRat::new(num, den))
}

/// Constant folding over i128 intermediates; `None` when the exact result
/// does not fit back into `Rat`.
fn fold2(a: Rat, b: Rat, op: impl Fn(rat::WideRat, rat::WideRat) -> rat::WideRat) -> Option<Rat> {
    let wa = rat::WideRat::new(*a.numer() as i128, *a.denom() as i128);
    let wb = rat::WideRat::new(*b.numer() as i128, *b.denom() as i128);
    rat::try_narrow(&op(wa, wb))
}

/// The unique chart variable a source variable maps to, when its monomial
/// image involves exactly one variable.
fn single_var_image(row: &[u32]) -> Option<(usize, u32)> {
    let mut hit = None;
    for (j, &e) in row.iter().enumerate() {
        if e > 0 {
            if hit.is_some() {
                return None;
            }
            hit = Some((j + 1, e));
        }
    }
    hit
}

/// `exp(-1/t^{2k})` with the flat extension by 0.
pub fn flat_eval(t: f64, k: u32) -> f64 {
    if t == 0.0 {
        return 0.0;
    }
    let p = t.powi(2 * k as i32);
    (-1.0 / p).exp()
}

/// `t^{-m} * exp(-1/t^{2k})` with the flat extension by 0, computed through
/// logarithms and clamped to 0 once the exponent argument drops below the
/// double-precision underflow threshold.
pub fn flatm_eval(t: f64, k: u32, m: u32) -> f64 {
    if t == 0.0 {
        return 0.0;
    }
    let a = t.abs();
    let arg = -a.powi(-2 * (k as i32)) - (m as f64) * a.ln();
    if arg <= -745.0 {
        return 0.0;
    }
    let sign = if t < 0.0 && m % 2 == 1 { -1.0 } else { 1.0 };
    sign * arg.exp()
}

// ---------------------------------------------------------------------------
// Parsing
// ---------------------------------------------------------------------------

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Plus,
    Minus,
    Star,
    Caret,
    Slash,
    LParen,
    RParen,
    Comma,
    Nat(i64),
    Ident(String),
}

impl fmt::Display for Tok {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Tok::Plus => write!(f, "'+'"),
            Tok::Minus => write!(f, "'-'"),
            Tok::Star => write!(f, "'*'"),
            Tok::Caret => write!(f, "'^'"),
            Tok::Slash => write!(f, "'/'"),
            Tok::LParen => write!(f, "'('"),
            Tok::RParen => write!(f, "')'"),
            Tok::Comma => write!(f, "','"),
            Tok::Nat(v) => write!(f, "number {v}"),
            Tok::Ident(s) => write!(f, "identifier '{s}'"),
        }
    }
}

fn lex(src: &str) -> Result<Vec<(Tok, usize, usize)>, Error> {
    let mut out = Vec::new();
    let mut line = 1usize;
    let mut col = 1usize;
    let mut chars = src.chars().peekable();
    while let Some(&c) = chars.peek() {
        let (l0, c0) = (line, col);
        match c {
            '\n' => {
                chars.next();
                line += 1;
                col = 1;
            }
            c if c.is_whitespace() => {
                chars.next();
                col += 1;
            }
            '+' | '-' | '*' | '^' | '/' | '(' | ')' | ',' => {
                chars.next();
                col += 1;
                let t = match c {
                    '+' => Tok::Plus,
                    '-' => Tok::Minus,
                    '*' => Tok::Star,
                    '^' => Tok::Caret,
                    '/' => Tok::Slash,
                    '(' => Tok::LParen,
                    ')' => Tok::RParen,
                    _ => Tok::Comma,
                };
                out.push((t, l0, c0));
            }
            '0'..='9' => {
                let mut v: i64 = 0;
                while let Some(&d) = chars.peek() {
                    let Some(digit) = d.to_digit(10) else { break };
                    chars.next();
                    col += 1;
                    v = v
                        .checked_mul(10)
                        .and_then(|v| v.checked_add(digit as i64))
                        .ok_or_else(|| {
                            Error::Parse(format!("line {l0}, column {c0}: integer literal overflows"))
                        })?;
                }
                out.push((Tok::Nat(v), l0, c0));
            }
            c if c.is_ascii_alphabetic() => {
                let mut s = String::new();
                while let Some(&d) = chars.peek() {
                    if d.is_ascii_alphanumeric() {
                        s.push(d);
                        chars.next();
                        col += 1;
                    } else {
                        break;
                    }
                }
                out.push((Tok::Ident(s), l0, c0));
            }
            other => {
                return Err(Error::Parse(format!(
                    "line {line}, column {col}: unexpected character '{other}'"
                )));
            }
        }
    }
    Ok(out)
}

/// One additive unit of a parsed function: the sign carried by the joining
/// operator, the bare monomial factors (variable, power), and the product of
/// the remaining factors.
pub(crate) struct ParsedUnit {
    pub negative: bool,
    pub monomial: Vec<(usize, u32)>,
    pub factor: Expr,
}

struct Parser {
    toks: Vec<(Tok, usize, usize)>,
    pos: usize,
    n: usize,
}

impl Parser {
    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.pos).map(|(t, _, _)| t)
    }

    fn bump(&mut self) -> Option<Tok> {
        let t = self.toks.get(self.pos).map(|(t, _, _)| t.clone());
        if t.is_some() {
            self.pos += 1;
        }
        t
    }

    fn err_here(&self, msg: &str) -> Error {
        match self.toks.get(self.pos) {
            Some((t, l, c)) => Error::Parse(format!("line {l}, column {c}: {msg}, found {t}")),
            None => Error::Parse(format!("unexpected end of input: {msg}")),
        }
    }

    fn expect(&mut self, want: Tok, msg: &str) -> Result<(), Error> {
        if self.peek() == Some(&want) {
            self.pos += 1;
            Ok(())
        } else {
            Err(self.err_here(msg))
        }
    }

    fn nat(&mut self, what: &str) -> Result<i64, Error> {
        match self.peek() {
            Some(Tok::Nat(_)) => {
                let Some(Tok::Nat(v)) = self.bump() else { unreachable!() };
                Ok(v)
            }
            _ => Err(self.err_here(&format!("expected {what}"))),
        }
    }

    fn small_nat(&mut self, what: &str) -> Result<u32, Error> {
        let v = self.nat(what)?;
        u32::try_from(v).map_err(|_| Error::Parse(format!("{what} {v} is too large")))
    }

    fn var_index(&mut self, what: &str) -> Result<usize, Error> {
        let v = self.nat(what)?;
        let i = usize::try_from(v).ok().filter(|&i| i >= 1 && i <= self.n);
        i.ok_or_else(|| {
            Error::Parse(format!(
                "variable index {v} out of range 1..={n} in {what}",
                n = self.n
            ))
        })
    }

    fn expr(&mut self) -> Result<Expr, Error> {
        let mut acc = self.term()?;
        loop {
            match self.peek() {
                Some(Tok::Plus) => {
                    self.pos += 1;
                    let rhs = self.term()?;
                    acc = Expr::add(acc, rhs);
                }
                Some(Tok::Minus) => {
                    self.pos += 1;
                    let rhs = self.term()?;
                    acc = Expr::sub(acc, rhs);
                }
                _ => break,
            }
        }
        Ok(acc)
    }

    fn term(&mut self) -> Result<Expr, Error> {
        let (mut acc, _) = self.factor()?;
        while self.peek() == Some(&Tok::Star) {
            self.pos += 1;
            let (rhs, _) = self.factor()?;
            acc = Expr::mul(acc, rhs);
        }
        Ok(acc)
    }

    /// Parses `base ["^" nat]`, reporting whether the factor was a bare
    /// variable power (candidate for the monomial exponent of a term).
    fn factor(&mut self) -> Result<(Expr, Option<(usize, u32)>), Error> {
        let (base, bare_var) = self.base()?;
        if self.peek() == Some(&Tok::Caret) {
            self.pos += 1;
            let k = self.small_nat("power exponent")?;
            let e = Expr::pow(base, k);
            Ok((e, bare_var.map(|v| (v, k))))
        } else {
            Ok((base, bare_var.map(|v| (v, 1))))
        }
    }

    fn base(&mut self) -> Result<(Expr, Option<usize>), Error> {
        match self.peek().cloned() {
            Some(Tok::Minus) => {
                self.pos += 1;
                let c = self.rational("number after '-'")?;
                Ok((Expr::Const(-c), None))
            }
            Some(Tok::Nat(_)) => {
                let c = self.rational("number")?;
                Ok((Expr::Const(c), None))
            }
            Some(Tok::LParen) => {
                self.pos += 1;
                let e = self.expr()?;
                self.expect(Tok::RParen, "expected ')'")?;
                Ok((e, None))
            }
            Some(Tok::Ident(s)) => {
                self.pos += 1;
                match s.as_str() {
                    "exp" => {
                        self.expect(Tok::LParen, "expected '(' after exp")?;
                        let g = self.expr()?;
                        self.expect(Tok::RParen, "expected ')'")?;
                        Ok((Expr::exp(g), None))
                    }
                    "flat" => {
                        self.expect(Tok::LParen, "expected '(' after flat")?;
                        let var = self.var_index("flat variable")?;
                        self.expect(Tok::Comma, "expected ','")?;
                        let k = self.small_nat("flat order k")?;
                        self.expect(Tok::RParen, "expected ')'")?;
                        if k == 0 {
                            return Err(Error::Parse("flat requires k >= 1".into()));
                        }
                        Ok((Expr::Flat { var, k }, None))
                    }
                    "flatm" => {
                        self.expect(Tok::LParen, "expected '(' after flatm")?;
                        let var = self.var_index("flatm variable")?;
                        self.expect(Tok::Comma, "expected ','")?;
                        let k = self.small_nat("flatm order k")?;
                        self.expect(Tok::Comma, "expected ','")?;
                        let m = self.small_nat("flatm pole order m")?;
                        self.expect(Tok::RParen, "expected ')'")?;
                        if k == 0 {
                            return Err(Error::Parse("flatm requires k >= 1".into()));
                        }
                        Ok((Expr::FlatM { var, k, m }, None))
                    }
                    _ => {
                        if let Some(rest) = s.strip_prefix('x') {
                            if !rest.is_empty() && rest.bytes().all(|b| b.is_ascii_digit()) {
                                let i: usize = rest.parse().map_err(|_| {
                                    Error::Parse(format!("variable index in '{s}' is too large"))
                                })?;
                                if i >= 1 && i <= self.n {
                                    return Ok((Expr::Var(i), Some(i)));
                                }
                                return Err(Error::Parse(format!(
                                    "variable x{i} out of range: dimension is {}",
                                    self.n
                                )));
                            }
                        }
                        Err(Error::Parse(format!("unknown identifier '{s}'")))
                    }
                }
            }
            _ => Err(self.err_here("expected a number, variable, '(', exp, flat, or flatm")),
        }
    }

    fn rational(&mut self, what: &str) -> Result<Rat, Error> {
        let num = self.nat(what)?;
        if self.peek() == Some(&Tok::Slash) {
            self.pos += 1;
            let den = self.nat("denominator")?;
            if den == 0 {
                return Err(Error::Parse("denominator must be nonzero".into()));
            }
            Ok(Rat::new(num, den))
        } else {
            Ok(Rat::from_integer(num))
        }
    }

    fn units(&mut self) -> Result<Vec<ParsedUnit>, Error> {
        let mut out = Vec::new();
        out.push(self.unit(false)?);
        loop {
            match self.peek() {
                Some(Tok::Plus) => {
                    self.pos += 1;
                    let u = self.unit(false)?;
                    out.push(u);
                }
                Some(Tok::Minus) => {
                    self.pos += 1;
                    let u = self.unit(true)?;
                    out.push(u);
                }
                _ => break,
            }
        }
        Ok(out)
    }

    fn unit(&mut self, negative: bool) -> Result<ParsedUnit, Error> {
        let mut monomial: Vec<(usize, u32)> = Vec::new();
        let mut factor = Expr::one();
        let (e, mono) = self.factor()?;
        push_factor(&mut monomial, &mut factor, e, mono);
        while self.peek() == Some(&Tok::Star) {
            self.pos += 1;
            let (e, mono) = self.factor()?;
            push_factor(&mut monomial, &mut factor, e, mono);
        }
        Ok(ParsedUnit {
            negative,
            monomial,
            factor,
        })
    }
}

fn push_factor(
    monomial: &mut Vec<(usize, u32)>,
    factor: &mut Expr,
    e: Expr,
    mono: Option<(usize, u32)>,
) {
    match mono {
        Some(vp) => monomial.push(vp),
        None => *factor = Expr::mul(std::mem::take(factor), e),
    }
}

impl Default for Expr {
    fn default() -> Self {
        Expr::zero()
    }
}

/// Parses a single smooth-factor expression in `n` variables.
pub fn parse_expr(text: &str, n: usize) -> Result<Expr, Error> {
    let toks = lex(text)?;
    let mut p = Parser { toks, pos: 0, n };
    let e = p.expr()?;
    if p.pos != p.toks.len() {
        return Err(p.err_here("trailing input after expression"));
    }
    Ok(e)
}

/// Parses a full function into additive units with split monomial prefactors.
pub(crate) fn parse_units(text: &str, n: usize) -> Result<Vec<ParsedUnit>, Error> {
    let toks = lex(text)?;
    let mut p = Parser { toks, pos: 0, n };
    let units = p.units()?;
    if p.pos != p.toks.len() {
        return Err(p.err_here("trailing input after expression"));
    }
    Ok(units)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn roundtrip(text: &str, n: usize) {
        let e = parse_expr(text, n).unwrap();
        let printed = e.to_string();
        let again = parse_expr(&printed, n).unwrap();
        assert_eq!(e, again, "structural round trip failed for {text} -> {printed}");
    }

    #[test]
    fn parse_and_print_round_trips() {
        for text in [
            "x1^8+x1^7*x2+x1^6*x2^2*(1+flat(2,1))",
            "3/4*x1-(x2+1)^2",
            "exp(x1*x2)-flatm(2,3,4)",
            "1-2*x1*-3",
            "(x1+x2)*(x1-x2)",
            "(x1^2)^2",
        ] {
            roundtrip(text, 2);
        }
    }

    #[test]
    fn grammar_rejections() {
        assert!(parse_expr("x3", 2).is_err());
        assert!(parse_expr("x1^-2", 2).is_err());
        assert!(parse_expr("flat(1,0)", 2).is_err());
        assert!(parse_expr("flat(3,1)", 2).is_err());
        assert!(parse_expr("x1/2", 2).is_err());
        assert!(parse_expr("y1", 2).is_err());
        assert!(parse_expr("1/0", 2).is_err());
        assert!(parse_expr("x1+", 2).is_err());
    }

    #[test]
    fn flat_atom_values() {
        assert_eq!(flat_eval(0.0, 1), 0.0);
        let v = flat_eval(1.0, 1);
        assert!((v - (-1.0f64).exp()).abs() < 1e-15);
        assert_eq!(flatm_eval(0.0, 1, 3), 0.0);
        assert_eq!(flatm_eval(1e-300, 1, 5), 0.0);
        let w = flatm_eval(0.5, 1, 2);
        assert!((w - 4.0 * (-4.0f64).exp()).abs() < 1e-12);
        let neg = flatm_eval(-0.5, 1, 1);
        assert!((neg + 2.0 * (-4.0f64).exp()).abs() < 1e-12);
    }

    #[test]
    fn derivative_of_flat_atoms() {
        let d = Expr::Flat { var: 2, k: 1 }.diff(2);
        assert_eq!(
            d,
            Expr::mul(Expr::num(2), Expr::FlatM { var: 2, k: 1, m: 3 })
        );
        assert!(Expr::Flat { var: 2, k: 1 }.diff(1).is_zero());
        let dm = Expr::FlatM { var: 1, k: 1, m: 2 }.diff(1);
        let expected = Expr::sub(
            Expr::mul(Expr::num(2), Expr::FlatM { var: 1, k: 1, m: 5 }),
            Expr::mul(Expr::num(2), Expr::FlatM { var: 1, k: 1, m: 3 }),
        );
        assert_eq!(dm, expected);
    }

    #[test]
    fn derivative_matches_finite_differences() {
        let e = parse_expr("exp(x1*x2)+x1^3*flat(2,2)-flatm(1,1,1)", 2).unwrap();
        let d1 = e.diff(1);
        let d2 = e.diff(2);
        let h = 1e-6;
        for &(a, b) in &[(0.7, 0.4), (-0.9, 1.1), (0.3, -0.5), (1.5, 1.5)] {
            let fd1 = (e.eval_f64(&[a + h, b]) - e.eval_f64(&[a - h, b])) / (2.0 * h);
            let fd2 = (e.eval_f64(&[a, b + h]) - e.eval_f64(&[a, b - h])) / (2.0 * h);
            let s1 = d1.eval_f64(&[a, b]);
            let s2 = d2.eval_f64(&[a, b]);
            assert!((fd1 - s1).abs() <= 1e-4 * (1.0 + s1.abs()), "d1 at ({a},{b})");
            assert!((fd2 - s2).abs() <= 1e-4 * (1.0 + s2.abs()), "d2 at ({a},{b})");
        }
    }

    #[test]
    fn exact_evaluation_at_the_origin() {
        let e = parse_expr("1+flat(2,1)", 2).unwrap();
        let zero = vec![crate::rat::bigint(0), crate::rat::bigint(0)];
        assert_eq!(e.eval_exact(&zero), Some(crate::rat::bigint(1)));
        let e = parse_expr("exp(x1)+2", 2).unwrap();
        assert_eq!(e.eval_exact(&zero), Some(crate::rat::bigint(3)));
        let e = parse_expr("exp(1)", 2).unwrap();
        assert_eq!(e.eval_exact(&zero), None);
    }

    #[test]
    fn monomial_substitution_rewrites_flat_atoms() {
        // x1 = y1*y2, x2 = y2: the flat atom in x2 stays single-variable.
        let rows = vec![vec![1, 1], vec![0, 1]];
        let e = parse_expr("x1^2*(1+flat(2,1))", 2).unwrap();
        let s = e.substitute_monomial(&rows).unwrap();
        let expected = parse_expr("(x1*x2)^2*(1+flat(2,1))", 2).unwrap();
        assert_eq!(s, expected);
        // x1 = y1*y2 breaks a flat atom in x1.
        let e = parse_expr("flat(1,1)", 2).unwrap();
        assert!(e.substitute_monomial(&rows).is_none());
        // x2 = y2^3 rescales the flat orders.
        let rows = vec![vec![1, 0], vec![0, 3]];
        let e = parse_expr("flatm(2,1,2)", 2).unwrap();
        assert_eq!(
            e.substitute_monomial(&rows).unwrap(),
            Expr::FlatM { var: 2, k: 3, m: 6 }
        );
    }
}
