//! A small expression language for right-hand sides `f(x, u, y, v, z)`.
//!
//! The five variables are fixed: `x` is the abscissa and `u, y, v, z` stand
//! for `u, u', u'', u'''`. Grammar, loosest binding first:
//!
//! ```text
//! sum     := product (('+' | '-') product)*
//! product := unary (('*' | '/') unary)*
//! unary   := ('-' | '+') unary | power
//! power   := atom ('^' unary)?
//! atom    := number | 'pi' | 'e' | variable | function '(' sum ')' | '(' sum ')'
//! ```
//!
//! so `^` is right-associative and binds tighter than unary minus
//! (`-2^2 == -4`). Functions: `sin cos tan asin atan sinh cosh exp log sqrt
//! abs`. There is no implicit multiplication.

mod diff;
mod parse;

use std::fmt;

use thiserror::Error;

pub use diff::DiffError;
pub use parse::ParseError;

/// One of the five independent variables.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Var {
    X,
    U,
    Y,
    V,
    Z,
}

impl Var {
    pub const ALL: [Var; 5] = [Var::X, Var::U, Var::Y, Var::V, Var::Z];
    /// The four dependent slots a Lipschitz constant is taken over.
    pub const STATE: [Var; 4] = [Var::U, Var::Y, Var::V, Var::Z];

    pub fn name(self) -> &'static str {
        match self {
            Var::X => "x",
            Var::U => "u",
            Var::Y => "y",
            Var::V => "v",
            Var::Z => "z",
        }
    }

    pub fn from_name(name: &str) -> Option<Var> {
        Var::ALL.into_iter().find(|v| v.name() == name)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Constant {
    Pi,
    E,
}

impl Constant {
    fn value(self) -> f64 {
        match self {
            Constant::Pi => std::f64::consts::PI,
            Constant::E => std::f64::consts::E,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BinOp {
    Add,
    Sub,
    Mul,
    Div,
    Pow,
}

impl BinOp {
    fn symbol(self) -> &'static str {
        match self {
            BinOp::Add => "+",
            BinOp::Sub => "-",
            BinOp::Mul => "*",
            BinOp::Div => "/",
            BinOp::Pow => "^",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Func {
    Sin,
    Cos,
    Tan,
    Asin,
    Atan,
    Sinh,
    Cosh,
    Exp,
    Log,
    Sqrt,
    Abs,
}

impl Func {
    const ALL: [Func; 11] = [
        Func::Sin,
        Func::Cos,
        Func::Tan,
        Func::Asin,
        Func::Atan,
        Func::Sinh,
        Func::Cosh,
        Func::Exp,
        Func::Log,
        Func::Sqrt,
        Func::Abs,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Func::Sin => "sin",
            Func::Cos => "cos",
            Func::Tan => "tan",
            Func::Asin => "asin",
            Func::Atan => "atan",
            Func::Sinh => "sinh",
            Func::Cosh => "cosh",
            Func::Exp => "exp",
            Func::Log => "log",
            Func::Sqrt => "sqrt",
            Func::Abs => "abs",
        }
    }

    pub fn from_name(name: &str) -> Option<Func> {
        Func::ALL.into_iter().find(|f| f.name() == name)
    }

    fn apply(self, a: f64) -> Option<f64> {
        let r = match self {
            Func::Sin => a.sin(),
            Func::Cos => a.cos(),
            Func::Tan => a.tan(),
            Func::Asin if a.abs() <= 1.0 => a.asin(),
            Func::Asin => return None,
            Func::Atan => a.atan(),
            Func::Sinh => a.sinh(),
            Func::Cosh => a.cosh(),
            Func::Exp => a.exp(),
            Func::Log if a > 0.0 => a.ln(),
            Func::Log => return None,
            Func::Sqrt if a >= 0.0 => a.sqrt(),
            Func::Sqrt => return None,
            Func::Abs => a.abs(),
        };
        Some(r)
    }
}

/// Expression tree.
#[derive(Debug, Clone, PartialEq)]
pub enum Expr {
    Num(f64),
    Const(Constant),
    Var(Var),
    Neg(Box<Expr>),
    Binary(BinOp, Box<Expr>, Box<Expr>),
    Call(Func, Box<Expr>),
}

/// Values of `(x, u, y, v, z)`.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct Point {
    pub x: f64,
    pub u: f64,
    pub y: f64,
    pub v: f64,
    pub z: f64,
}

impl Point {
    pub fn new(x: f64, u: f64, y: f64, v: f64, z: f64) -> Self {
        Self { x, u, y, v, z }
    }

    pub fn get(&self, var: Var) -> f64 {
        match var {
            Var::X => self.x,
            Var::U => self.u,
            Var::Y => self.y,
            Var::V => self.v,
            Var::Z => self.z,
        }
    }

    pub fn with(mut self, var: Var, value: f64) -> Self {
        match var {
            Var::X => self.x = value,
            Var::U => self.u = value,
            Var::Y => self.y = value,
            Var::V => self.v = value,
            Var::Z => self.z = value,
        }
        self
    }
}

impl fmt::Display for Point {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "(x={}, u={}, y={}, v={}, z={})",
            self.x, self.u, self.y, self.v, self.z
        )
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum EvalErrorKind {
    /// A function or power was applied outside its real domain.
    Domain,
    DivisionByZero,
    /// Overflow or another non-finite intermediate.
    NonFinite,
}

#[derive(Debug, Clone, PartialEq, Error)]
#[error("{}: `{node}`", match .kind {
    EvalErrorKind::Domain => "argument outside the real domain",
    EvalErrorKind::DivisionByZero => "division by zero",
    EvalErrorKind::NonFinite => "non-finite result",
})]
pub struct EvalError {
    pub kind: EvalErrorKind,
    /// The failing sub-expression, pretty-printed.
    pub node: String,
}

/// Literal integer exponents in this range are expanded to repeated
/// multiplication.
const SMALL_INT_EXPONENT: f64 = 9.0;

impl Expr {
    pub fn parse(source: &str) -> Result<Expr, ParseError> {
        parse::parse(source)
    }

    pub fn eval(&self, p: &Point) -> Result<f64, EvalError> {
        let value = match self {
            Expr::Num(c) => *c,
            Expr::Const(c) => c.value(),
            Expr::Var(v) => p.get(*v),
            Expr::Neg(a) => -a.eval(p)?,
            Expr::Binary(op, a, b) => {
                let l = a.eval(p)?;
                let r = b.eval(p)?;
                match op {
                    BinOp::Add => l + r,
                    BinOp::Sub => l - r,
                    BinOp::Mul => l * r,
                    BinOp::Div => {
                        if r == 0.0 {
                            return Err(self.fail(EvalErrorKind::DivisionByZero));
                        }
                        l / r
                    }
                    BinOp::Pow => self.power(l, b, r)?,
                }
            }
            Expr::Call(func, a) => {
                let arg = a.eval(p)?;
                func.apply(arg)
                    .ok_or_else(|| self.fail(EvalErrorKind::Domain))?
            }
        };
        if value.is_finite() {
            Ok(value)
        } else {
            Err(self.fail(EvalErrorKind::NonFinite))
        }
    }

    fn power(&self, base: f64, exponent: &Expr, e: f64) -> Result<f64, EvalError> {
        if let Expr::Num(k) = exponent {
            if k.fract() == 0.0 && k.abs() <= SMALL_INT_EXPONENT {
                let mut acc = 1.0;
                for _ in 0..k.abs() as usize {
                    acc *= base;
                }
                if *k < 0.0 {
                    if acc == 0.0 {
                        return Err(self.fail(EvalErrorKind::DivisionByZero));
                    }
                    acc = 1.0 / acc;
                }
                return Ok(acc);
            }
        }
        if base > 0.0 || (e.fract() == 0.0 && (base != 0.0 || e > 0.0)) {
            Ok(base.powf(e))
        } else {
            Err(self.fail(EvalErrorKind::Domain))
        }
    }

    fn fail(&self, kind: EvalErrorKind) -> EvalError {
        EvalError {
            kind,
            node: self.to_string(),
        }
    }

    /// Symbolic partial derivative with respect to `var`.
    pub fn differentiate(&self, var: Var) -> Result<Expr, DiffError> {
        diff::differentiate(self, var)
    }

    pub fn depends_on(&self, var: Var) -> bool {
        match self {
            Expr::Num(_) | Expr::Const(_) => false,
            Expr::Var(v) => *v == var,
            Expr::Neg(a) | Expr::Call(_, a) => a.depends_on(var),
            Expr::Binary(_, a, b) => a.depends_on(var) || b.depends_on(var),
        }
    }

    /// Replaces every occurrence of each variable by the expression
    /// `map(var)`, folding constants on the way up.
    pub fn substitute(&self, map: &impl Fn(Var) -> Expr) -> Expr {
        match self {
            Expr::Num(_) | Expr::Const(_) => self.clone(),
            Expr::Var(v) => map(*v),
            Expr::Neg(a) => neg(a.substitute(map)),
            Expr::Binary(op, a, b) => binary(*op, a.substitute(map), b.substitute(map)),
            Expr::Call(f, a) => Expr::Call(*f, Box::new(a.substitute(map))),
        }
    }

    fn precedence(&self) -> u8 {
        match self {
            Expr::Binary(BinOp::Add | BinOp::Sub, ..) => 1,
            Expr::Binary(BinOp::Mul | BinOp::Div, ..) => 2,
            Expr::Neg(_) => 3,
            Expr::Num(c) if c.is_sign_negative() => 3,
            Expr::Binary(BinOp::Pow, ..) => 4,
            _ => 5,
        }
    }
}

pub(crate) fn num(c: f64) -> Expr {
    Expr::Num(c)
}

fn as_num(e: &Expr) -> Option<f64> {
    match e {
        Expr::Num(c) => Some(*c),
        _ => None,
    }
}

pub(crate) fn neg(a: Expr) -> Expr {
    match a {
        Expr::Num(c) => Expr::Num(-c),
        Expr::Neg(inner) => *inner,
        other => Expr::Neg(Box::new(other)),
    }
}

/// Builds `a op b`, folding literal arithmetic and the additive and
/// multiplicative identities.
pub(crate) fn binary(op: BinOp, a: Expr, b: Expr) -> Expr {
    if let (Some(x), Some(y)) = (as_num(&a), as_num(&b)) {
        let folded = match op {
            BinOp::Add => Some(x + y),
            BinOp::Sub => Some(x - y),
            BinOp::Mul => Some(x * y),
            BinOp::Div if y != 0.0 => Some(x / y),
            BinOp::Pow if y.fract() == 0.0 && y.abs() <= SMALL_INT_EXPONENT && x != 0.0 => {
                Some(x.powi(y as i32))
            }
            _ => None,
        };
        if let Some(v) = folded.filter(|v| v.is_finite()) {
            return Expr::Num(v);
        }
    }
    match (op, as_num(&a), as_num(&b)) {
        (BinOp::Add, Some(0.0), _) => b,
        (BinOp::Add | BinOp::Sub, _, Some(0.0)) => a,
        (BinOp::Sub, Some(0.0), _) => neg(b),
        (BinOp::Mul, Some(0.0), _) | (BinOp::Mul, _, Some(0.0)) => Expr::Num(0.0),
        (BinOp::Mul, Some(1.0), _) => b,
        (BinOp::Mul | BinOp::Div, _, Some(1.0)) => a,
        (BinOp::Div, Some(0.0), _) => Expr::Num(0.0),
        (BinOp::Pow, _, Some(1.0)) => a,
        _ => Expr::Binary(op, Box::new(a), Box::new(b)),
    }
}

pub(crate) fn add(a: Expr, b: Expr) -> Expr {
    binary(BinOp::Add, a, b)
}

pub(crate) fn sub(a: Expr, b: Expr) -> Expr {
    binary(BinOp::Sub, a, b)
}

pub(crate) fn mul(a: Expr, b: Expr) -> Expr {
    binary(BinOp::Mul, a, b)
}

pub(crate) fn div(a: Expr, b: Expr) -> Expr {
    binary(BinOp::Div, a, b)
}

pub(crate) fn pow(a: Expr, b: Expr) -> Expr {
    binary(BinOp::Pow, a, b)
}

pub(crate) fn call(f: Func, a: Expr) -> Expr {
    Expr::Call(f, Box::new(a))
}

/// Polynomial `Σ coeffs[k] · t^k` as an expression, dropping zero terms.
pub fn polynomial(coeffs: &[f64], t: &Expr) -> Expr {
    let monomial = |k: usize, c: f64| match k {
        0 => num(c),
        1 => mul(num(c), t.clone()),
        _ => mul(num(c), pow(t.clone(), num(k as f64))),
    };
    let mut terms = coeffs.iter().enumerate().filter(|(_, c)| **c != 0.0);
    let Some((k, &c)) = terms.next() else {
        return num(0.0);
    };
    terms.fold(monomial(k, c), |acc, (k, &c)| {
        if c < 0.0 {
            sub(acc, monomial(k, -c))
        } else {
            add(acc, monomial(k, c))
        }
    })
}

impl fmt::Display for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Expr::Num(c) => write!(f, "{c}"),
            Expr::Const(Constant::Pi) => f.write_str("pi"),
            Expr::Const(Constant::E) => f.write_str("e"),
            Expr::Var(v) => f.write_str(v.name()),
            Expr::Neg(a) => {
                f.write_str("-")?;
                write_child(f, a, a.precedence() < 3)
            }
            Expr::Binary(op, a, b) => {
                let p = self.precedence();
                if *op == BinOp::Pow {
                    write_child(f, a, a.precedence() <= 4)?;
                    f.write_str("^")?;
                    write_child(f, b, b.precedence() < 3)
                } else {
                    write_child(f, a, a.precedence() < p)?;
                    write!(f, " {} ", op.symbol())?;
                    write_child(f, b, b.precedence() <= p)
                }
            }
            Expr::Call(func, a) => write!(f, "{}({a})", func.name()),
        }
    }
}

fn write_child(f: &mut fmt::Formatter<'_>, e: &Expr, parens: bool) -> fmt::Result {
    if parens {
        write!(f, "({e})")
    } else {
        write!(f, "{e}")
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn at(x: f64, u: f64, y: f64, v: f64, z: f64) -> Point {
        Point::new(x, u, y, v, z)
    }

    #[test]
    fn evaluates_composite_rhs() {
        let f1 = Expr::parse("12 + u*z/2 - y*v/4 + y/4").unwrap();
        assert_eq!(f1.eval(&Point::default()).unwrap(), 12.0);
        let f2 = Expr::parse("x + x^2 + u^2*v + y*sin(z)").unwrap();
        assert_eq!(f2.eval(&Point::default()).unwrap(), 0.0);
        assert_eq!(f2.eval(&at(1.0, 0.0, 0.0, 0.0, 0.0)).unwrap(), 2.0);
        let f3 =
            Expr::parse("(u + 2*x^3 - 3*x^2 + 1)^2 * sin(u + 2*x^3 - 3*x^2 + 1) + sin(x)").unwrap();
        assert_abs_diff_eq!(
            f3.eval(&Point::default()).unwrap(),
            1f64.sin(),
            epsilon = 1e-15
        );
        let e = Expr::parse("u*z/2").unwrap();
        assert_eq!(e.eval(&at(0.0, 2.0, 0.0, 0.0, 3.0)).unwrap(), 3.0);
    }

    #[test]
    fn unary_minus_binds_looser_than_power() {
        assert_eq!(
            Expr::parse("-2^2")
                .unwrap()
                .eval(&Point::default())
                .unwrap(),
            -4.0
        );
        assert_eq!(
            Expr::parse("2^-1")
                .unwrap()
                .eval(&Point::default())
                .unwrap(),
            0.5
        );
        assert_eq!(
            Expr::parse("2^3^2")
                .unwrap()
                .eval(&Point::default())
                .unwrap(),
            512.0
        );
        assert_eq!(
            Expr::parse("(-2)^2")
                .unwrap()
                .eval(&Point::default())
                .unwrap(),
            4.0
        );
    }

    #[test]
    fn domain_errors() {
        let err = Expr::parse("sqrt(u)")
            .unwrap()
            .eval(&at(0.0, -1.0, 0.0, 0.0, 0.0))
            .unwrap_err();
        assert_eq!(err.kind, EvalErrorKind::Domain);
        assert_eq!(err.node, "sqrt(u)");
        let err = Expr::parse("1/(u-1)")
            .unwrap()
            .eval(&at(0.0, 1.0, 0.0, 0.0, 0.0))
            .unwrap_err();
        assert_eq!(err.kind, EvalErrorKind::DivisionByZero);
        let err = Expr::parse("u^0.5")
            .unwrap()
            .eval(&at(0.0, -0.25, 0.0, 0.0, 0.0))
            .unwrap_err();
        assert_eq!(err.kind, EvalErrorKind::Domain);
        assert!(Expr::parse("log(0)")
            .unwrap()
            .eval(&Point::default())
            .is_err());
        assert!(Expr::parse("exp(1000)")
            .unwrap()
            .eval(&Point::default())
            .is_err());
    }

    #[test]
    fn integer_powers_accept_negative_bases() {
        let e = Expr::parse("u^5").unwrap();
        assert_eq!(e.eval(&at(0.0, -2.0, 0.0, 0.0, 0.0)).unwrap(), -32.0);
        let e = Expr::parse("u^-2").unwrap();
        assert_eq!(e.eval(&at(0.0, -2.0, 0.0, 0.0, 0.0)).unwrap(), 0.25);
        assert!(e.eval(&Point::default()).is_err());
        let e = Expr::parse("u^(1/2)").unwrap();
        assert_abs_diff_eq!(
            e.eval(&at(0.0, 4.0, 0.0, 0.0, 0.0)).unwrap(),
            2.0,
            epsilon = 1e-15
        );
    }

    #[test]
    fn display_round_trips() {
        for src in [
            "12 + u*z/2 - y*v/4 + y/4",
            "-2^2",
            "(-2)^2",
            "x - (u - y)",
            "x / (u / y)",
            "-(x + u)",
            "2^-x",
            "(x^2)^3",
            "sin(-x)*e + pi",
        ] {
            let e = Expr::parse(src).unwrap();
            let back = Expr::parse(&e.to_string()).unwrap();
            assert_eq!(e, back, "{src} printed as {e}");
        }
    }

    #[test]
    fn substitution_folds_identities() {
        let e = Expr::parse("u*y + x").unwrap();
        let same = e.substitute(&|v| match v {
            Var::U => add(Expr::Var(Var::U), num(0.0)),
            Var::Y => div(Expr::Var(Var::Y), num(1.0)),
            Var::X => add(num(0.0), mul(num(1.0), Expr::Var(Var::X))),
            other => Expr::Var(other),
        });
        assert_eq!(same, e);
    }

    #[test]
    fn polynomial_builder() {
        let t = Expr::Var(Var::X);
        let p = polynomial(&[1.0, 0.0, -3.0, 2.0], &t);
        for x in [0.0, 0.3, 1.0] {
            let got = p.eval(&at(x, 0.0, 0.0, 0.0, 0.0)).unwrap();
            assert_abs_diff_eq!(got, 2.0 * x * x * x - 3.0 * x * x + 1.0, epsilon = 1e-15);
        }
        assert_eq!(p.to_string(), "1 - 3 * x^2 + 2 * x^3");
        assert_eq!(polynomial(&[0.0, -1.0], &t).to_string(), "-1 * x");
        assert_eq!(polynomial(&[0.0; 4], &t), num(0.0));
    }
}
