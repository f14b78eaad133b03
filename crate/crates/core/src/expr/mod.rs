//! Expression language for immersion components.
//!
//! Grammar (see `docs/grammar.md`): numbers, parameter names, `+ - * /`,
//! integer powers `^`, unary minus and the functions `sin cos tan exp log sqrt`.
//! Evaluation returns a [`Jet2`] carrying exact first and second derivatives.

mod ast;
mod jet;
mod lexer;
mod parser;

pub use ast::{ExprNode, Func};
pub use jet::Jet2;
pub use lexer::{tokenize, Token, TokenKind};
pub use parser::{parse, parse_str};

use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ExprError {
    #[error("unexpected character {ch:?} at byte {offset}")]
    UnexpectedChar { ch: char, offset: usize },
    #[error("malformed number at byte {offset}")]
    BadNumber { offset: usize },
    #[error("unbalanced parenthesis at byte {offset}")]
    UnbalancedParen { offset: usize },
    #[error("operator without operand at byte {offset}")]
    DanglingOperator { offset: usize },
    #[error("unexpected end of input at byte {offset}")]
    UnexpectedEnd { offset: usize },
    #[error("unexpected token at byte {offset}")]
    UnexpectedToken { offset: usize },
    #[error("unknown function `{name}` at byte {offset}")]
    UnknownFunction { name: String, offset: usize },
    #[error("function `{name}` takes exactly one argument (byte {offset})")]
    Arity { name: String, offset: usize },
    #[error("exponent must be an integer literal (byte {offset})")]
    NonIntegerExponent { offset: usize },
    #[error("integer exponent out of range (byte {offset})")]
    ExponentOverflow { offset: usize },
}

impl ExprError {
    pub fn offset(&self) -> usize {
        match self {
            ExprError::UnexpectedChar { offset, .. }
            | ExprError::BadNumber { offset }
            | ExprError::UnbalancedParen { offset }
            | ExprError::DanglingOperator { offset }
            | ExprError::UnexpectedEnd { offset }
            | ExprError::UnexpectedToken { offset }
            | ExprError::UnknownFunction { offset, .. }
            | ExprError::Arity { offset, .. }
            | ExprError::NonIntegerExponent { offset }
            | ExprError::ExponentOverflow { offset } => *offset,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum EvalError {
    #[error("`{func}` is undefined at {value}")]
    Domain { func: &'static str, value: f64 },
    #[error("parameter `{0}` is not bound")]
    Unbound(String),
}

/// Parameter names and their values at one point.
#[derive(Debug, Clone, Copy)]
pub struct Bindings<'a> {
    pub names: &'a [String],
    pub values: &'a [f64],
}

impl<'a> Bindings<'a> {
    pub fn new(names: &'a [String], values: &'a [f64]) -> Self {
        assert_eq!(names.len(), values.len(), "one value per parameter");
        Bindings { names, values }
    }

    fn index(&self, name: &str) -> Result<usize, EvalError> {
        self.names
            .iter()
            .position(|n| n == name)
            .ok_or_else(|| EvalError::Unbound(name.to_string()))
    }
}

const TAN_POLE_TOL: f64 = 1e-12;

fn finite(j: Jet2, func: &'static str, arg: f64) -> Result<Jet2, EvalError> {
    let ok = j.value.is_finite() && j.grad.iter().chain(&j.hess).all(|v| v.is_finite());
    if ok {
        Ok(j)
    } else {
        Err(EvalError::Domain { func, value: arg })
    }
}

/// Value, gradient and Hessian of `node` with respect to all bound parameters.
pub fn eval_jet(node: &ExprNode, at: &Bindings<'_>) -> Result<Jet2, EvalError> {
    let d = at.names.len();
    Ok(match node {
        ExprNode::Const(c) => Jet2::constant(*c, d),
        ExprNode::Param(name) => {
            let i = at.index(name)?;
            Jet2::variable(at.values[i], i, d)
        }
        ExprNode::Neg(a) => -&eval_jet(a, at)?,
        ExprNode::Add(a, b) => &eval_jet(a, at)? + &eval_jet(b, at)?,
        ExprNode::Sub(a, b) => &eval_jet(a, at)? - &eval_jet(b, at)?,
        ExprNode::Mul(a, b) => &eval_jet(a, at)? * &eval_jet(b, at)?,
        ExprNode::Div(a, b) => {
            let num = eval_jet(a, at)?;
            let den = eval_jet(b, at)?;
            if den.value == 0.0 {
                return Err(EvalError::Domain { func: "/", value: 0.0 });
            }
            finite(&num * &den.recip(), "/", den.value)?
        }
        ExprNode::Pow(a, k) => {
            let base = eval_jet(a, at)?;
            if base.value == 0.0 && *k < 0 {
                return Err(EvalError::Domain { func: "^", value: 0.0 });
            }
            finite(base.powi(*k), "^", base.value)?
        }
        ExprNode::Call(func, a) => {
            let u = eval_jet(a, at)?;
            let x = u.value;
            let name = func.name();
            let out = match func {
                Func::Sin => u.sin(),
                Func::Cos => u.cos(),
                Func::Tan => {
                    if x.cos().abs() < TAN_POLE_TOL {
                        return Err(EvalError::Domain { func: name, value: x });
                    }
                    u.tan()
                }
                Func::Exp => u.exp(),
                Func::Log => {
                    if x <= 0.0 {
                        return Err(EvalError::Domain { func: name, value: x });
                    }
                    u.ln()
                }
                Func::Sqrt => {
                    // derivatives are unbounded at 0
                    if x <= 0.0 {
                        return Err(EvalError::Domain { func: name, value: x });
                    }
                    u.sqrt()
                }
            };
            finite(out, name, x)?
        }
    })
}

/// Value only; same domain rules as [`eval_jet`].
pub fn eval(node: &ExprNode, at: &Bindings<'_>) -> Result<f64, EvalError> {
    Ok(match node {
        ExprNode::Const(c) => *c,
        ExprNode::Param(name) => at.values[at.index(name)?],
        ExprNode::Neg(a) => -eval(a, at)?,
        ExprNode::Add(a, b) => eval(a, at)? + eval(b, at)?,
        ExprNode::Sub(a, b) => eval(a, at)? - eval(b, at)?,
        ExprNode::Mul(a, b) => eval(a, at)? * eval(b, at)?,
        ExprNode::Div(a, b) => {
            let num = eval(a, at)?;
            let den = eval(b, at)?;
            if den == 0.0 {
                return Err(EvalError::Domain { func: "/", value: 0.0 });
            }
            num / den
        }
        ExprNode::Pow(a, k) => {
            let x = eval(a, at)?;
            if x == 0.0 && *k < 0 {
                return Err(EvalError::Domain { func: "^", value: 0.0 });
            }
            x.powi(*k)
        }
        ExprNode::Call(func, a) => {
            let x = eval(a, at)?;
            match func {
                Func::Sin => x.sin(),
                Func::Cos => x.cos(),
                Func::Tan if x.cos().abs() < TAN_POLE_TOL => {
                    return Err(EvalError::Domain { func: "tan", value: x })
                }
                Func::Tan => x.tan(),
                Func::Exp => x.exp(),
                Func::Log if x <= 0.0 => return Err(EvalError::Domain { func: "log", value: x }),
                Func::Log => x.ln(),
                Func::Sqrt if x <= 0.0 => return Err(EvalError::Domain { func: "sqrt", value: x }),
                Func::Sqrt => x.sqrt(),
            }
        }
    })
}
