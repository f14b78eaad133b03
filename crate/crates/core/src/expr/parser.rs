use super::ast::{ExprNode, Func};
use super::lexer::{tokenize, Token, TokenKind};
use super::ExprError;

/// Parses a complete expression from source text.
pub fn parse_str(source: &str) -> Result<ExprNode, ExprError> {
    let tokens = tokenize(source)?;
    parse(&tokens, source.len())
}

/// Parses a token stream; `end` is the byte offset reported for errors at end of input.
pub fn parse(tokens: &[Token], end: usize) -> Result<ExprNode, ExprError> {
    let mut p = Parser { tokens, pos: 0, end };
    let node = p.expr()?;
    match p.peek() {
        None => Ok(node),
        Some(t) if t.kind == TokenKind::RParen => Err(ExprError::UnbalancedParen { offset: t.offset }),
        Some(t) => Err(ExprError::UnexpectedToken { offset: t.offset }),
    }
}

struct Parser<'a> {
    tokens: &'a [Token],
    pos: usize,
    end: usize,
}

impl Parser<'_> {
    fn peek(&self) -> Option<&Token> {
        self.tokens.get(self.pos)
    }

    fn next(&mut self) -> Option<&Token> {
        let t = self.tokens.get(self.pos);
        if t.is_some() {
            self.pos += 1;
        }
        t
    }

    fn offset(&self) -> usize {
        self.peek().map_or(self.end, |t| t.offset)
    }

    fn eat(&mut self, kind: &TokenKind) -> bool {
        if self.peek().is_some_and(|t| &t.kind == kind) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn expr(&mut self) -> Result<ExprNode, ExprError> {
        let mut lhs = self.term()?;
        loop {
            if self.eat(&TokenKind::Plus) {
                lhs = ExprNode::Add(Box::new(lhs), Box::new(self.term()?));
            } else if self.eat(&TokenKind::Minus) {
                lhs = ExprNode::Sub(Box::new(lhs), Box::new(self.term()?));
            } else {
                return Ok(lhs);
            }
        }
    }

    fn term(&mut self) -> Result<ExprNode, ExprError> {
        let mut lhs = self.unary()?;
        loop {
            if self.eat(&TokenKind::Star) {
                lhs = ExprNode::Mul(Box::new(lhs), Box::new(self.unary()?));
            } else if self.eat(&TokenKind::Slash) {
                lhs = ExprNode::Div(Box::new(lhs), Box::new(self.unary()?));
            } else {
                return Ok(lhs);
            }
        }
    }

    fn unary(&mut self) -> Result<ExprNode, ExprError> {
        if self.eat(&TokenKind::Minus) {
            return Ok(ExprNode::Neg(Box::new(self.unary()?)));
        }
        self.power()
    }

    fn power(&mut self) -> Result<ExprNode, ExprError> {
        let base = self.primary()?;
        if self.eat(&TokenKind::Caret) {
            let k = self.exponent()?;
            return Ok(ExprNode::Pow(Box::new(base), k));
        }
        Ok(base)
    }

    /// Integer exponent: `3`, `-2`, `(-1)`, or a right-associated chain `2^3`.
    fn exponent(&mut self) -> Result<i32, ExprError> {
        let start = self.offset();
        let k = if self.eat(&TokenKind::LParen) {
            let k = self.signed_int()?;
            if !self.eat(&TokenKind::RParen) {
                return Err(ExprError::NonIntegerExponent { offset: start });
            }
            k
        } else {
            self.signed_int()?
        };
        if self.eat(&TokenKind::Caret) {
            let rest = self.exponent()?;
            if rest < 0 {
                return Err(ExprError::NonIntegerExponent { offset: start });
            }
            return k
                .checked_pow(rest as u32)
                .ok_or(ExprError::ExponentOverflow { offset: start });
        }
        Ok(k)
    }

    fn signed_int(&mut self) -> Result<i32, ExprError> {
        let start = self.offset();
        let neg = self.eat(&TokenKind::Minus);
        match self.next().map(|t| t.kind.clone()) {
            Some(TokenKind::Num { value, integral: true }) => {
                if value > i32::MAX as f64 {
                    return Err(ExprError::ExponentOverflow { offset: start });
                }
                let k = value as i32;
                Ok(if neg { -k } else { k })
            }
            None => Err(ExprError::UnexpectedEnd { offset: self.end }),
            Some(_) => Err(ExprError::NonIntegerExponent { offset: start }),
        }
    }

    fn primary(&mut self) -> Result<ExprNode, ExprError> {
        let Some(tok) = self.next().cloned() else {
            return Err(ExprError::UnexpectedEnd { offset: self.end });
        };
        match tok.kind {
            TokenKind::Num { value, .. } => Ok(ExprNode::Const(value)),
            TokenKind::Ident(name) => {
                if self.peek().is_some_and(|t| t.kind == TokenKind::LParen) {
                    let open = self.offset();
                    self.pos += 1;
                    let func = Func::from_name(&name)
                        .ok_or(ExprError::UnknownFunction { name: name.clone(), offset: tok.offset })?;
                    let arg = self.expr()?;
                    if self.peek().is_some_and(|t| t.kind == TokenKind::Comma) {
                        return Err(ExprError::Arity { name, offset: tok.offset });
                    }
                    if !self.eat(&TokenKind::RParen) {
                        return Err(ExprError::UnbalancedParen { offset: open });
                    }
                    return Ok(ExprNode::Call(func, Box::new(arg)));
                }
                match name.as_str() {
                    "pi" => Ok(ExprNode::Const(std::f64::consts::PI)),
                    "e" => Ok(ExprNode::Const(std::f64::consts::E)),
                    _ if Func::from_name(&name).is_some() => {
                        Err(ExprError::Arity { name, offset: tok.offset })
                    }
                    _ => Ok(ExprNode::Param(name)),
                }
            }
            TokenKind::LParen => {
                let inner = self.expr()?;
                if !self.eat(&TokenKind::RParen) {
                    return Err(ExprError::UnbalancedParen { offset: tok.offset });
                }
                Ok(inner)
            }
            TokenKind::RParen => Err(ExprError::UnbalancedParen { offset: tok.offset }),
            _ => Err(ExprError::DanglingOperator { offset: tok.offset }),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use ExprNode::*;

    fn p(name: &str) -> Box<ExprNode> {
        Box::new(Param(name.into()))
    }

    #[test]
    fn precedence_of_product() {
        assert_eq!(parse_str("x+y*z").unwrap(), Add(p("x"), Box::new(Mul(p("y"), p("z")))));
    }

    #[test]
    fn unary_minus_below_power() {
        assert_eq!(parse_str("-x^2").unwrap(), Neg(Box::new(Pow(p("x"), 2))));
    }

    #[test]
    fn exponent_must_be_written_as_integer() {
        assert_eq!(parse_str("x^(-2)").unwrap(), Pow(p("x"), -2));
        assert!(matches!(parse_str("x^2.0"), Err(ExprError::NonIntegerExponent { offset: 2 })));
        assert!(matches!(parse_str("x^1e1"), Err(ExprError::NonIntegerExponent { offset: 2 })));
    }

    #[test]
    fn call_arity() {
        assert!(matches!(parse_str("sin(x,y)"), Err(ExprError::Arity { offset: 0, .. })));
        assert!(matches!(parse_str("sin"), Err(ExprError::Arity { .. })));
    }

    #[test]
    fn left_associative_subtraction() {
        assert_eq!(parse_str("a-b-c").unwrap(), Sub(Box::new(Sub(p("a"), p("b"))), p("c")));
        assert_eq!(parse_str("a/b/c").unwrap(), Div(Box::new(Div(p("a"), p("b"))), p("c")));
    }

    #[test]
    fn right_associative_power_chain() {
        assert_eq!(parse_str("x^2^3").unwrap(), Pow(p("x"), 8));
        assert_eq!(parse_str("x^-1").unwrap(), Pow(p("x"), -1));
        assert_eq!(parse_str("x^(-2)").unwrap(), Pow(p("x"), -2));
    }

    #[test]
    fn errors_carry_offsets() {
        assert_eq!(parse_str("(x+y"), Err(ExprError::UnbalancedParen { offset: 0 }));
        assert_eq!(parse_str("x+y)"), Err(ExprError::UnbalancedParen { offset: 3 }));
        assert_eq!(parse_str("x+"), Err(ExprError::UnexpectedEnd { offset: 2 }));
        assert_eq!(parse_str("x++y"), Err(ExprError::DanglingOperator { offset: 2 }));
        assert_eq!(parse_str("x^y"), Err(ExprError::NonIntegerExponent { offset: 2 }));
        assert_eq!(parse_str("x^0.5"), Err(ExprError::NonIntegerExponent { offset: 2 }));
        assert_eq!(parse_str("x y"), Err(ExprError::UnexpectedToken { offset: 2 }));
        assert_eq!(parse_str(""), Err(ExprError::UnexpectedEnd { offset: 0 }));
        assert!(matches!(
            parse_str("foo(x)"),
            Err(ExprError::UnknownFunction { offset: 0, .. })
        ));
    }

    #[test]
    fn constants() {
        assert_eq!(parse_str("pi").unwrap(), Const(std::f64::consts::PI));
        assert_eq!(parse_str("2*e").unwrap(), Mul(Box::new(Const(2.0)), Box::new(Const(std::f64::consts::E))));
    }

    #[test]
    fn printed_form_reparses() {
        for src in ["x+y*z", "-x^2", "(a-b)-(c-d)", "a/(b*c)", "(-x)^3", "-(x+y)", "x^-2*sin(u)", "2/sqrt(3)"] {
            let ast = parse_str(src).unwrap();
            let again = parse_str(&ast.to_string()).unwrap();
            assert_eq!(ast, again, "{src} -> {ast}");
        }
    }
}
