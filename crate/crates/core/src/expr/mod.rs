//! Parsing, symbolic differentiation and evaluation of user-supplied field
//! expressions `F(x, nu)`.
//!
//! Expressions are built from the variables `x` and `nu`, numeric literals,
//! the operators `+ - * / ^` (with `^` right-associative and binding tighter
//! than unary minus), parentheses, and the functions `exp`, `log`, `sqrt`,
//! `sin`, `cos`, `tanh`. Values are immutable after construction and all
//! operations are pure, so they can be shared across threads freely.

mod lexer;
mod parser;

use std::fmt;
use thiserror::Error;

/// Errors from parsing or evaluating a field expression.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum ExprError {
    #[error("syntax error at position {pos}: expected {expected}, found {found}")]
    Syntax {
        pos: usize,
        expected: String,
        found: String,
    },

    #[error("unknown identifier `{name}` at position {pos} (only `x` and `nu` are allowed)")]
    UnknownIdentifier { name: String, pos: usize },

    #[error("domain error: {op} of {arg} at (x, nu) = ({x}, {nu})")]
    Domain {
        op: &'static str,
        arg: f64,
        x: f64,
        nu: f64,
    },

    #[error("non-finite value produced at (x, nu) = ({x}, {nu})")]
    NonFinite { x: f64, nu: f64 },
}

/// Built-in unary functions.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Func {
    Exp,
    Log,
    Sqrt,
    Sin,
    Cos,
    Tanh,
}

impl Func {
    fn from_name(name: &str) -> Option<Func> {
        match name {
            "exp" => Some(Func::Exp),
            "log" => Some(Func::Log),
            "sqrt" => Some(Func::Sqrt),
            "sin" => Some(Func::Sin),
            "cos" => Some(Func::Cos),
            "tanh" => Some(Func::Tanh),
            _ => None,
        }
    }

    fn name(self) -> &'static str {
        match self {
            Func::Exp => "exp",
            Func::Log => "log",
            Func::Sqrt => "sqrt",
            Func::Sin => "sin",
            Func::Cos => "cos",
            Func::Tanh => "tanh",
        }
    }
}

/// Expression tree node.
#[derive(Debug, Clone, PartialEq)]
pub enum Node {
    Num(f64),
    X,
    Nu,
    Neg(Box<Node>),
    Add(Box<Node>, Box<Node>),
    Sub(Box<Node>, Box<Node>),
    Mul(Box<Node>, Box<Node>),
    Div(Box<Node>, Box<Node>),
    Pow(Box<Node>, Box<Node>),
    Call(Func, Box<Node>),
}

/// A parsed field expression `F(x, nu)`.
#[derive(Debug, Clone, PartialEq)]
pub struct FieldExpr {
    pub(crate) root: Node,
}

/// Variable to differentiate against.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Var {
    X,
    Nu,
}

/// Parse `text` into an expression tree.
pub fn parse(text: &str) -> Result<FieldExpr, ExprError> {
    parser::parse(text)
}

impl std::str::FromStr for FieldExpr {
    type Err = ExprError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        parse(s)
    }
}

impl FieldExpr {
    /// Evaluate at `(x, nu)` in IEEE doubles.
    pub fn eval(&self, x: f64, nu: f64) -> Result<f64, ExprError> {
        let v = eval_node(&self.root, x, nu)?;
        if v.is_finite() {
            Ok(v)
        } else {
            Err(ExprError::NonFinite { x, nu })
        }
    }

    /// Symbolic partial derivative with conservative simplification.
    pub fn differentiate(&self, var: Var) -> FieldExpr {
        FieldExpr {
            root: simplify(diff_node(&self.root, var)),
        }
    }
}

fn eval_node(node: &Node, x: f64, nu: f64) -> Result<f64, ExprError> {
    Ok(match node {
        Node::Num(v) => *v,
        Node::X => x,
        Node::Nu => nu,
        Node::Neg(a) => -eval_node(a, x, nu)?,
        Node::Add(a, b) => eval_node(a, x, nu)? + eval_node(b, x, nu)?,
        Node::Sub(a, b) => eval_node(a, x, nu)? - eval_node(b, x, nu)?,
        Node::Mul(a, b) => eval_node(a, x, nu)? * eval_node(b, x, nu)?,
        Node::Div(a, b) => {
            let num = eval_node(a, x, nu)?;
            let den = eval_node(b, x, nu)?;
            if den == 0.0 {
                return Err(ExprError::Domain {
                    op: "division by",
                    arg: den,
                    x,
                    nu,
                });
            }
            num / den
        }
        Node::Pow(a, b) => {
            let base = eval_node(a, x, nu)?;
            let exponent = eval_node(b, x, nu)?;
            // Negative base is only allowed for integer exponents; the
            // evaluation stays real-valued by construction.
            if base < 0.0 && exponent.fract() != 0.0 {
                return Err(ExprError::Domain {
                    op: "non-integer power of negative base",
                    arg: base,
                    x,
                    nu,
                });
            }
            if base == 0.0 && exponent < 0.0 {
                return Err(ExprError::Domain {
                    op: "negative power of",
                    arg: base,
                    x,
                    nu,
                });
            }
            base.powf(exponent)
        }
        Node::Call(func, a) => {
            let v = eval_node(a, x, nu)?;
            match func {
                Func::Exp => v.exp(),
                Func::Log => {
                    if v <= 0.0 {
                        return Err(ExprError::Domain {
                            op: "log of",
                            arg: v,
                            x,
                            nu,
                        });
                    }
                    v.ln()
                }
                Func::Sqrt => {
                    if v < 0.0 {
                        return Err(ExprError::Domain {
                            op: "sqrt of",
                            arg: v,
                            x,
                            nu,
                        });
                    }
                    v.sqrt()
                }
                Func::Sin => v.sin(),
                Func::Cos => v.cos(),
                Func::Tanh => v.tanh(),
            }
        }
    })
}

fn diff_node(node: &Node, var: Var) -> Node {
    use Node::*;
    match node {
        Num(_) => Num(0.0),
        X => Num(if var == Var::X { 1.0 } else { 0.0 }),
        Nu => Num(if var == Var::Nu { 1.0 } else { 0.0 }),
        Neg(a) => Neg(Box::new(diff_node(a, var))),
        Add(a, b) => Add(Box::new(diff_node(a, var)), Box::new(diff_node(b, var))),
        Sub(a, b) => Sub(Box::new(diff_node(a, var)), Box::new(diff_node(b, var))),
        Mul(a, b) => {
            let da = diff_node(a, var);
            let db = diff_node(b, var);
            Add(
                Box::new(Mul(Box::new(da), b.clone())),
                Box::new(Mul(a.clone(), Box::new(db))),
            )
        }
        Div(a, b) => {
            // (a/b)' = (a' b - a b') / b^2
            let da = diff_node(a, var);
            let db = diff_node(b, var);
            let num = Sub(
                Box::new(Mul(Box::new(da), b.clone())),
                Box::new(Mul(a.clone(), Box::new(db))),
            );
            let den = Mul(b.clone(), b.clone());
            Div(Box::new(num), Box::new(den))
        }
        Pow(a, b) => match b.as_ref() {
            // Constant exponent: c * a^(c-1) * a'
            Num(c) => {
                let da = diff_node(a, var);
                Mul(
                    Box::new(Mul(
                        Box::new(Num(*c)),
                        Box::new(Pow(a.clone(), Box::new(Num(c - 1.0)))),
                    )),
                    Box::new(da),
                )
            }
            // General: a^b * (b' log a + b a'/a)
            _ => {
                let da = diff_node(a, var);
                let db = diff_node(b, var);
                let term1 = Mul(Box::new(db), Box::new(Call(Func::Log, a.clone())));
                let term2 = Mul(b.clone(), Box::new(Div(Box::new(da), a.clone())));
                Mul(
                    Box::new(Pow(a.clone(), b.clone())),
                    Box::new(Add(Box::new(term1), Box::new(term2))),
                )
            }
        },
        Call(func, a) => {
            let da = diff_node(a, var);
            let outer = match func {
                Func::Exp => Call(Func::Exp, a.clone()),
                Func::Log => Div(Box::new(Num(1.0)), a.clone()),
                Func::Sqrt => Div(
                    Box::new(Num(1.0)),
                    Box::new(Mul(
                        Box::new(Num(2.0)),
                        Box::new(Call(Func::Sqrt, a.clone())),
                    )),
                ),
                Func::Sin => Call(Func::Cos, a.clone()),
                Func::Cos => Neg(Box::new(Call(Func::Sin, a.clone()))),
                // tanh' = 1 - tanh^2
                Func::Tanh => Sub(
                    Box::new(Num(1.0)),
                    Box::new(Pow(
                        Box::new(Call(Func::Tanh, a.clone())),
                        Box::new(Num(2.0)),
                    )),
                ),
            };
            Mul(Box::new(outer), Box::new(da))
        }
    }
}

/// Conservative simplification: constant folding and 0/1 identities only.
/// Terms are never reordered, so printed derivatives are deterministic.
fn simplify(node: Node) -> Node {
    use Node::*;
    match node {
        Neg(a) => {
            let a = simplify(*a);
            match a {
                Num(v) => Num(-v),
                Neg(inner) => *inner,
                // Fold the sign into a leading numeric factor; keeps the
                // printed form parenthesis-free without reordering terms.
                Mul(lhs, rhs) => match *lhs {
                    Num(c) => Mul(Box::new(Num(-c)), rhs),
                    other => Neg(Box::new(Mul(Box::new(other), rhs))),
                },
                other => Neg(Box::new(other)),
            }
        }
        Add(a, b) => {
            let a = simplify(*a);
            let b = simplify(*b);
            match (a, b) {
                (Num(0.0), rhs) => rhs,
                (lhs, Num(0.0)) => lhs,
                (Num(p), Num(q)) => Num(p + q),
                (lhs, Neg(rhs)) => Sub(Box::new(lhs), rhs),
                (lhs, rhs) => Add(Box::new(lhs), Box::new(rhs)),
            }
        }
        Sub(a, b) => {
            let a = simplify(*a);
            let b = simplify(*b);
            match (a, b) {
                (lhs, Num(0.0)) => lhs,
                (Num(0.0), rhs) => simplify(Neg(Box::new(rhs))),
                (Num(p), Num(q)) => Num(p - q),
                (lhs, rhs) => Sub(Box::new(lhs), Box::new(rhs)),
            }
        }
        Mul(a, b) => {
            let a = simplify(*a);
            let b = simplify(*b);
            match (a, b) {
                (Num(0.0), _) | (_, Num(0.0)) => Num(0.0),
                (Num(1.0), rhs) => rhs,
                (lhs, Num(1.0)) => lhs,
                (Num(p), Num(q)) => Num(p * q),
                (Num(-1.0), rhs) => simplify(Neg(Box::new(rhs))),
                (lhs, rhs) => Mul(Box::new(lhs), Box::new(rhs)),
            }
        }
        Div(a, b) => {
            let a = simplify(*a);
            let b = simplify(*b);
            match (a, b) {
                (Num(0.0), _) => Num(0.0),
                (lhs, Num(1.0)) => lhs,
                (lhs, rhs) => Div(Box::new(lhs), Box::new(rhs)),
            }
        }
        Pow(a, b) => {
            let a = simplify(*a);
            let b = simplify(*b);
            match (a, b) {
                (_, Num(0.0)) => Num(1.0),
                (lhs, Num(1.0)) => lhs,
                (lhs, rhs) => Pow(Box::new(lhs), Box::new(rhs)),
            }
        }
        Call(f, a) => Call(f, Box::new(simplify(*a))),
        leaf => leaf,
    }
}

// Precedence levels for the canonical printer, matching the grammar.
fn precedence(node: &Node) -> u8 {
    match node {
        Node::Add(..) | Node::Sub(..) => 1,
        Node::Mul(..) | Node::Div(..) => 2,
        Node::Neg(..) => 3,
        Node::Pow(..) => 4,
        Node::Num(_) | Node::X | Node::Nu | Node::Call(..) => 5,
    }
}

fn write_node(f: &mut fmt::Formatter<'_>, node: &Node, parent_prec: u8) -> fmt::Result {
    let prec = precedence(node);
    // A negative literal only needs parentheses as the base of `^`; in every
    // other slot the grammar re-reads it through unary minus.
    let needs_parens =
        prec < parent_prec || matches!(node, Node::Num(v) if *v < 0.0 && parent_prec >= 5);
    if needs_parens {
        write!(f, "(")?;
    }
    match node {
        Node::Num(v) => write!(f, "{v}")?,
        Node::X => write!(f, "x")?,
        Node::Nu => write!(f, "nu")?,
        Node::Neg(a) => {
            write!(f, "-")?;
            write_node(f, a, 4)?;
        }
        Node::Add(a, b) => {
            write_node(f, a, 1)?;
            write!(f, " + ")?;
            write_node(f, b, 2)?;
        }
        Node::Sub(a, b) => {
            write_node(f, a, 1)?;
            write!(f, " - ")?;
            write_node(f, b, 2)?;
        }
        Node::Mul(a, b) => {
            write_node(f, a, 2)?;
            write!(f, "*")?;
            write_node(f, b, 3)?;
        }
        Node::Div(a, b) => {
            write_node(f, a, 2)?;
            write!(f, "/")?;
            write_node(f, b, 3)?;
        }
        Node::Pow(a, b) => {
            write_node(f, a, 5)?;
            write!(f, "^")?;
            write_node(f, b, 4)?;
        }
        Node::Call(func, a) => {
            write!(f, "{}(", func.name())?;
            write_node(f, a, 0)?;
            write!(f, ")")?;
        }
    }
    if needs_parens {
        write!(f, ")")?;
    }
    Ok(())
}

impl fmt::Display for FieldExpr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write_node(f, &self.root, 0)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn unary_minus_binds_looser_than_pow() {
        let e = parse("-x^2 + nu").unwrap();
        let expected = Node::Add(
            Box::new(Node::Neg(Box::new(Node::Pow(
                Box::new(Node::X),
                Box::new(Node::Num(2.0)),
            )))),
            Box::new(Node::Nu),
        );
        assert_eq!(e.root, expected);
    }

    #[test]
    fn model_like_rational_parses() {
        let e = parse("(-x^2 + nu)/(1 + 0.3*x)").unwrap();
        match &e.root {
            Node::Div(num, den) => {
                assert!(matches!(num.as_ref(), Node::Add(..)));
                assert!(matches!(den.as_ref(), Node::Add(..)));
            }
            other => panic!("expected division at the root, got {other:?}"),
        }
    }

    #[test]
    fn unknown_identifier_reported() {
        let err = parse("-x^2 + mu").unwrap_err();
        assert!(matches!(err, ExprError::UnknownIdentifier { ref name, .. } if name == "mu"));
    }

    #[test]
    fn eval_fixed_point_and_rational() {
        let e = parse("-x^2 + nu").unwrap();
        // 0.2^2 and 0.04 differ by one rounding in binary.
        assert!(e.eval(0.2, 0.04).unwrap().abs() < 1e-16);
        assert_eq!(e.eval(0.0, 0.0).unwrap(), 0.0);

        let r = parse("(-x^2 + nu)/(1 + 0.3*x)").unwrap();
        let v = r.eval(1.0, 0.0).unwrap();
        assert!((v - (-1.0 / 1.3)).abs() < 1e-15);
        assert!((v - (-0.769231)).abs() < 1e-6);
    }

    #[test]
    fn derivatives_of_spec_examples() {
        let e = parse("-x^2 + nu").unwrap();
        assert_eq!(e.differentiate(Var::X).to_string(), "-2*x");
        assert_eq!(e.differentiate(Var::Nu).to_string(), "1");

        let g = parse("exp(x)*nu").unwrap();
        let dx = g.differentiate(Var::X);
        // exp(x)*nu structurally, allowing for the product-rule shape.
        for (x, nu) in [(0.0f64, 1.0f64), (0.5, 2.0), (-1.0, 0.3)] {
            let want = x.exp() * nu;
            assert!((dx.eval(x, nu).unwrap() - want).abs() < 1e-14);
        }
    }

    #[test]
    fn domain_errors() {
        let e = parse("log(x)").unwrap();
        assert!(matches!(e.eval(-1.0, 0.0), Err(ExprError::Domain { .. })));
        let s = parse("sqrt(x)").unwrap();
        assert!(matches!(s.eval(-0.5, 0.0), Err(ExprError::Domain { .. })));
        let d = parse("1/x").unwrap();
        assert!(matches!(d.eval(0.0, 0.0), Err(ExprError::Domain { .. })));
        // Non-integer power of a negative base stays real-valued by erroring.
        let p = parse("x^0.5").unwrap();
        assert!(matches!(p.eval(-2.0, 0.0), Err(ExprError::Domain { .. })));
        let pi = parse("x^2").unwrap();
        assert_eq!(pi.eval(-2.0, 0.0).unwrap(), 4.0);
    }

    #[test]
    fn power_is_right_associative() {
        let e = parse("x^2^3").unwrap();
        // x^(2^3) = x^8
        assert!((e.eval(2.0, 0.0).unwrap() - 256.0).abs() < 1e-12);
    }

    #[test]
    fn print_parse_roundtrip_on_spec_examples() {
        for text in [
            "-x^2 + nu",
            "(-x^2 + nu)/(1 + 0.3*x)",
            "-x^2+nu+0.1*x^3",
            "exp(x)*nu - tanh(x/2)",
            "x^2^3 - -x",
            "sin(cos(x)) + sqrt(nu + 1)",
        ] {
            let e = parse(text).unwrap();
            let printed = e.to_string();
            let reparsed = parse(&printed).unwrap();
            assert_eq!(e, reparsed, "round trip failed for `{text}` -> `{printed}`");
        }
    }
}
