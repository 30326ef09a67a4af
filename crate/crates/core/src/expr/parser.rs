//! Recursive-descent parser for field expressions.
//!
//! Grammar, loosest to tightest binding:
//!
//! ```text
//! expr   := term (('+' | '-') term)*
//! term   := unary (('*' | '/') unary)*
//! unary  := '-' unary | power
//! power  := atom ('^' unary)?          (right associative)
//! atom   := number | 'x' | 'nu' | func '(' expr ')' | '(' expr ')'
//! ```
//!
//! `^` binds tighter than unary minus, so `-x^2` parses as `-(x^2)`.

use super::lexer::{tokenize, Spanned, Token};
use super::{ExprError, FieldExpr, Func, Node};

pub fn parse(text: &str) -> Result<FieldExpr, ExprError> {
    let tokens = tokenize(text)?;
    let mut p = Parser {
        tokens,
        pos: 0,
        end: text.len(),
    };
    let root = p.expr()?;
    if let Some(tok) = p.peek() {
        return Err(ExprError::Syntax {
            pos: tok.pos,
            expected: "end of input or a binary operator".into(),
            found: tok.token.describe(),
        });
    }
    Ok(FieldExpr { root })
}

struct Parser {
    tokens: Vec<Spanned>,
    pos: usize,
    end: usize,
}

impl Parser {
    fn peek(&self) -> Option<&Spanned> {
        self.tokens.get(self.pos)
    }

    fn next(&mut self) -> Option<Spanned> {
        let t = self.tokens.get(self.pos).cloned();
        if t.is_some() {
            self.pos += 1;
        }
        t
    }

    fn expect_rparen(&mut self) -> Result<(), ExprError> {
        match self.next() {
            Some(Spanned {
                token: Token::RParen,
                ..
            }) => Ok(()),
            Some(t) => Err(ExprError::Syntax {
                pos: t.pos,
                expected: "`)`".into(),
                found: t.token.describe(),
            }),
            None => Err(ExprError::Syntax {
                pos: self.end,
                expected: "`)`".into(),
                found: "end of input".into(),
            }),
        }
    }

    fn expr(&mut self) -> Result<Node, ExprError> {
        let mut lhs = self.term()?;
        while let Some(t) = self.peek() {
            match t.token {
                Token::Plus => {
                    self.next();
                    let rhs = self.term()?;
                    lhs = Node::Add(Box::new(lhs), Box::new(rhs));
                }
                Token::Minus => {
                    self.next();
                    let rhs = self.term()?;
                    lhs = Node::Sub(Box::new(lhs), Box::new(rhs));
                }
                _ => break,
            }
        }
        Ok(lhs)
    }

    fn term(&mut self) -> Result<Node, ExprError> {
        let mut lhs = self.unary()?;
        while let Some(t) = self.peek() {
            match t.token {
                Token::Star => {
                    self.next();
                    let rhs = self.unary()?;
                    lhs = Node::Mul(Box::new(lhs), Box::new(rhs));
                }
                Token::Slash => {
                    self.next();
                    let rhs = self.unary()?;
                    lhs = Node::Div(Box::new(lhs), Box::new(rhs));
                }
                _ => break,
            }
        }
        Ok(lhs)
    }

    fn unary(&mut self) -> Result<Node, ExprError> {
        if let Some(Spanned {
            token: Token::Minus,
            ..
        }) = self.peek()
        {
            self.next();
            let inner = self.unary()?;
            return Ok(Node::Neg(Box::new(inner)));
        }
        self.power()
    }

    fn power(&mut self) -> Result<Node, ExprError> {
        let base = self.atom()?;
        if let Some(Spanned {
            token: Token::Caret,
            ..
        }) = self.peek()
        {
            self.next();
            let exponent = self.unary()?;
            return Ok(Node::Pow(Box::new(base), Box::new(exponent)));
        }
        Ok(base)
    }

    fn atom(&mut self) -> Result<Node, ExprError> {
        let Some(t) = self.next() else {
            return Err(ExprError::Syntax {
                pos: self.end,
                expected: "a number, variable, function or `(`".into(),
                found: "end of input".into(),
            });
        };
        match t.token {
            Token::Number(v) => Ok(Node::Num(v)),
            Token::Ident(name) => match name.as_str() {
                "x" => Ok(Node::X),
                "nu" => Ok(Node::Nu),
                _ => {
                    if let Some(func) = Func::from_name(&name) {
                        match self.next() {
                            Some(Spanned {
                                token: Token::LParen,
                                ..
                            }) => {}
                            other => {
                                let (pos, found) = match other {
                                    Some(s) => (s.pos, s.token.describe()),
                                    None => (self.end, "end of input".into()),
                                };
                                return Err(ExprError::Syntax {
                                    pos,
                                    expected: format!("`(` after function `{name}`"),
                                    found,
                                });
                            }
                        }
                        let arg = self.expr()?;
                        self.expect_rparen()?;
                        Ok(Node::Call(func, Box::new(arg)))
                    } else {
                        Err(ExprError::UnknownIdentifier { name, pos: t.pos })
                    }
                }
            },
            Token::LParen => {
                let inner = self.expr()?;
                self.expect_rparen()?;
                Ok(inner)
            }
            other => Err(ExprError::Syntax {
                pos: t.pos,
                expected: "a number, variable, function or `(`".into(),
                found: other.describe(),
            }),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn error_positions_point_at_offender() {
        let err = parse("-x^2 + mu").unwrap_err();
        match err {
            ExprError::UnknownIdentifier { name, pos } => {
                assert_eq!(name, "mu");
                assert_eq!(pos, 7);
            }
            other => panic!("unexpected error {other:?}"),
        }
    }

    #[test]
    fn trailing_garbage_rejected() {
        assert!(parse("x + 1 )").is_err());
        assert!(parse("x *").is_err());
        assert!(parse("exp x").is_err());
    }
}
