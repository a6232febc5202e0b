use thiserror::Error;

use super::{add, call, div, mul, neg, num, pow, sub, BinOp, Expr, Func, Var};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum DiffError {
    #[error("cannot differentiate `{node}` with respect to {var}: {reason}")]
    Unsupported {
        node: String,
        var: &'static str,
        reason: &'static str,
    },
}

pub(super) fn differentiate(e: &Expr, var: Var) -> Result<Expr, DiffError> {
    if !e.depends_on(var) {
        return Ok(num(0.0));
    }
    let d = |a: &Expr| differentiate(a, var);
    Ok(match e {
        Expr::Num(_) | Expr::Const(_) => num(0.0),
        Expr::Var(v) => num(if *v == var { 1.0 } else { 0.0 }),
        Expr::Neg(a) => neg(d(a)?),
        Expr::Binary(op, a, b) => {
            let (a, b) = (a.as_ref(), b.as_ref());
            match op {
                BinOp::Add => add(d(a)?, d(b)?),
                BinOp::Sub => sub(d(a)?, d(b)?),
                BinOp::Mul => add(mul(d(a)?, b.clone()), mul(a.clone(), d(b)?)),
                BinOp::Div if !b.depends_on(var) => div(d(a)?, b.clone()),
                BinOp::Div => div(
                    sub(mul(d(a)?, b.clone()), mul(a.clone(), d(b)?)),
                    mul(b.clone(), b.clone()),
                ),
                BinOp::Pow if !b.depends_on(var) => {
                    // b·a^(b-1)·a'; literal exponents stay literal
                    let lowered = match b {
                        Expr::Num(k) => num(k - 1.0),
                        _ => sub(b.clone(), num(1.0)),
                    };
                    mul(mul(b.clone(), pow(a.clone(), lowered)), d(a)?)
                }
                // a^b · (b'·log a + b·a'/a), valid for a > 0
                BinOp::Pow => mul(
                    e.clone(),
                    add(
                        mul(d(b)?, call(Func::Log, a.clone())),
                        div(mul(b.clone(), d(a)?), a.clone()),
                    ),
                ),
            }
        }
        Expr::Call(func, a) => {
            let inner = d(a)?;
            let a = a.as_ref().clone();
            let outer = match func {
                Func::Sin => call(Func::Cos, a),
                Func::Cos => neg(call(Func::Sin, a)),
                Func::Tan => div(num(1.0), pow(call(Func::Cos, a), num(2.0))),
                Func::Asin => div(num(1.0), call(Func::Sqrt, sub(num(1.0), pow(a, num(2.0))))),
                Func::Atan => div(num(1.0), add(num(1.0), pow(a, num(2.0)))),
                Func::Sinh => call(Func::Cosh, a),
                Func::Cosh => call(Func::Sinh, a),
                Func::Exp => e.clone(),
                Func::Log => div(num(1.0), a),
                Func::Sqrt => div(num(0.5), e.clone()),
                Func::Abs => {
                    return Err(DiffError::Unsupported {
                        node: e.to_string(),
                        var: var.name(),
                        reason: "abs has a kink at zero",
                    })
                }
            };
            mul(outer, inner)
        }
    })
}
