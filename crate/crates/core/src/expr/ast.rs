use std::fmt;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Func {
    Sin,
    Cos,
    Tan,
    Exp,
    Log,
    Sqrt,
}

impl Func {
    pub const ALL: [Func; 6] = [Func::Sin, Func::Cos, Func::Tan, Func::Exp, Func::Log, Func::Sqrt];

    pub fn name(self) -> &'static str {
        match self {
            Func::Sin => "sin",
            Func::Cos => "cos",
            Func::Tan => "tan",
            Func::Exp => "exp",
            Func::Log => "log",
            Func::Sqrt => "sqrt",
        }
    }

    pub fn from_name(name: &str) -> Option<Func> {
        Func::ALL.into_iter().find(|f| f.name() == name)
    }
}

/// Expression tree for one immersion component.
#[derive(Debug, Clone, PartialEq)]
pub enum ExprNode {
    Const(f64),
    Param(String),
    Neg(Box<ExprNode>),
    Add(Box<ExprNode>, Box<ExprNode>),
    Sub(Box<ExprNode>, Box<ExprNode>),
    Mul(Box<ExprNode>, Box<ExprNode>),
    Div(Box<ExprNode>, Box<ExprNode>),
    Pow(Box<ExprNode>, i32),
    Call(Func, Box<ExprNode>),
}

impl ExprNode {
    pub fn param(name: &str) -> ExprNode {
        ExprNode::Param(name.to_string())
    }

    /// Parameter names referenced anywhere in the tree, in first-use order.
    pub fn params(&self) -> Vec<String> {
        let mut out = Vec::new();
        self.collect_params(&mut out);
        out
    }

    fn collect_params(&self, out: &mut Vec<String>) {
        match self {
            ExprNode::Const(_) => {}
            ExprNode::Param(p) => {
                if !out.contains(p) {
                    out.push(p.clone());
                }
            }
            ExprNode::Neg(a) | ExprNode::Pow(a, _) | ExprNode::Call(_, a) => a.collect_params(out),
            ExprNode::Add(a, b) | ExprNode::Sub(a, b) | ExprNode::Mul(a, b) | ExprNode::Div(a, b) => {
                a.collect_params(out);
                b.collect_params(out);
            }
        }
    }

    pub fn depth(&self) -> usize {
        match self {
            ExprNode::Const(_) | ExprNode::Param(_) => 1,
            ExprNode::Neg(a) | ExprNode::Pow(a, _) | ExprNode::Call(_, a) => 1 + a.depth(),
            ExprNode::Add(a, b) | ExprNode::Sub(a, b) | ExprNode::Mul(a, b) | ExprNode::Div(a, b) => {
                1 + a.depth().max(b.depth())
            }
        }
    }

    fn precedence(&self) -> u8 {
        match self {
            ExprNode::Add(..) | ExprNode::Sub(..) => 1,
            ExprNode::Mul(..) | ExprNode::Div(..) => 2,
            ExprNode::Neg(_) => 3,
            ExprNode::Pow(..) => 4,
            ExprNode::Const(c) if *c < 0.0 || c.is_sign_negative() => 3,
            _ => 5,
        }
    }
}

fn write_child(f: &mut fmt::Formatter<'_>, child: &ExprNode, min_prec: u8) -> fmt::Result {
    if child.precedence() < min_prec {
        write!(f, "({child})")
    } else {
        write!(f, "{child}")
    }
}

/// Prints source text that parses back to an equivalent tree.
impl fmt::Display for ExprNode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ExprNode::Const(c) => {
                if c.is_sign_negative() {
                    write!(f, "-{:?}", -c)
                } else {
                    write!(f, "{c:?}")
                }
            }
            ExprNode::Param(p) => write!(f, "{p}"),
            ExprNode::Neg(a) => {
                write!(f, "-")?;
                write_child(f, a, 3)
            }
            ExprNode::Add(a, b) => {
                write_child(f, a, 1)?;
                write!(f, " + ")?;
                write_child(f, b, 2)
            }
            ExprNode::Sub(a, b) => {
                write_child(f, a, 1)?;
                write!(f, " - ")?;
                write_child(f, b, 2)
            }
            ExprNode::Mul(a, b) => {
                write_child(f, a, 2)?;
                write!(f, "*")?;
                write_child(f, b, 3)
            }
            ExprNode::Div(a, b) => {
                write_child(f, a, 2)?;
                write!(f, "/")?;
                write_child(f, b, 3)
            }
            ExprNode::Pow(a, k) => {
                write_child(f, a, 5)?;
                write!(f, "^{k}")
            }
            ExprNode::Call(func, a) => write!(f, "{}({a})", func.name()),
        }
    }
}
