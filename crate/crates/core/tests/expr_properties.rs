//! Property tests for the expression layer: canonical-printer round trips
//! over random grammar-valid trees, and symbolic derivatives against
//! central finite differences at random points.

use proptest::prelude::*;
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};
use snb_core::expr::{parse, FieldExpr, Var};

// ---- random expression text generation (seeded, deterministic) ----

fn random_expr_text(rng: &mut StdRng, depth: usize) -> String {
    if depth == 0 {
        match rng.random_range(0..4u8) {
            0 => "x".to_string(),
            1 => "nu".to_string(),
            2 => format!("{:.3}", rng.random_range(0.1..3.0f64)),
            _ => format!("{}", rng.random_range(1..5u32)),
        }
    } else {
        match rng.random_range(0..8u8) {
            0 => format!(
                "({} + {})",
                random_expr_text(rng, depth - 1),
                random_expr_text(rng, depth - 1)
            ),
            1 => format!(
                "({} - {})",
                random_expr_text(rng, depth - 1),
                random_expr_text(rng, depth - 1)
            ),
            2 => format!(
                "({} * {})",
                random_expr_text(rng, depth - 1),
                random_expr_text(rng, depth - 1)
            ),
            3 => format!(
                "({} / (1 + {}^2))",
                random_expr_text(rng, depth - 1),
                random_expr_text(rng, depth - 1)
            ),
            4 => format!("sin({})", random_expr_text(rng, depth - 1)),
            5 => format!("cos({})", random_expr_text(rng, depth - 1)),
            6 => format!("tanh({})", random_expr_text(rng, depth - 1)),
            _ => format!("exp(-{}^2)", random_expr_text(rng, depth - 1)),
        }
    }
}

/// Central finite difference of the expression in `var` with h = 1e-6.
fn central_fd(e: &FieldExpr, var: Var, x: f64, nu: f64) -> Option<f64> {
    let h = 1e-6;
    let (a, b) = match var {
        Var::X => (e.eval(x + h, nu), e.eval(x - h, nu)),
        Var::Nu => (e.eval(x, nu + h), e.eval(x, nu - h)),
    };
    match (a, b) {
        (Ok(p), Ok(m)) => Some((p - m) / (2.0 * h)),
        _ => None,
    }
}

#[test]
fn derivative_matches_finite_difference_on_random_expressions() {
    let mut rng = StdRng::seed_from_u64(0x5eed_cafe);
    let mut checked_expressions = 0usize;
    let mut checked_points = 0usize;

    while checked_expressions < 100 {
        let text = random_expr_text(&mut rng, 3);
        let Ok(expr) = parse(&text) else {
            panic!("generator produced unparsable text: {text}");
        };
        let dx = expr.differentiate(Var::X);
        let dnu = expr.differentiate(Var::Nu);

        let mut points_for_this = 0usize;
        let mut attempts = 0usize;
        while points_for_this < 100 && attempts < 1000 {
            attempts += 1;
            let x = rng.random_range(-2.0..2.0f64);
            let nu = rng.random_range(0.0..0.5f64);
            let Ok(value) = expr.eval(x, nu) else {
                continue;
            };
            if value.abs() > 1e6 {
                continue;
            }
            let (Some(fd_x), Some(fd_nu)) = (
                central_fd(&expr, Var::X, x, nu),
                central_fd(&expr, Var::Nu, x, nu),
            ) else {
                continue;
            };
            let (Ok(sym_x), Ok(sym_nu)) = (dx.eval(x, nu), dnu.eval(x, nu)) else {
                continue;
            };
            if sym_x.abs() > 1e6 || sym_nu.abs() > 1e6 {
                continue;
            }
            let tol_x = 1e-5 * (1.0 + sym_x.abs());
            let tol_nu = 1e-5 * (1.0 + sym_nu.abs());
            assert!(
                (sym_x - fd_x).abs() <= tol_x,
                "{text}: d/dx symbolic {sym_x} vs fd {fd_x} at ({x}, {nu})"
            );
            assert!(
                (sym_nu - fd_nu).abs() <= tol_nu,
                "{text}: d/dnu symbolic {sym_nu} vs fd {fd_nu} at ({x}, {nu})"
            );
            points_for_this += 1;
            checked_points += 1;
        }
        if points_for_this >= 100 {
            checked_expressions += 1;
        }
    }
    assert!(checked_expressions >= 100);
    assert!(checked_points >= 100 * 100);
}

// ---- proptest: AST-level round trip through the canonical printer ----

#[derive(Debug, Clone)]
enum TextTree {
    Leaf(String),
    Unary(&'static str, Box<TextTree>),
    Binary(&'static str, Box<TextTree>, Box<TextTree>),
    Pow(Box<TextTree>, Box<TextTree>),
}

impl TextTree {
    fn render(&self) -> String {
        match self {
            TextTree::Leaf(s) => s.clone(),
            TextTree::Unary(f, a) => {
                if *f == "-" {
                    format!("-({})", a.render())
                } else {
                    format!("{f}({})", a.render())
                }
            }
            TextTree::Binary(op, a, b) => format!("({} {op} {})", a.render(), b.render()),
            TextTree::Pow(a, b) => format!("({})^({})", a.render(), b.render()),
        }
    }
}

fn tree_strategy() -> impl Strategy<Value = TextTree> {
    let leaf = prop_oneof![
        Just(TextTree::Leaf("x".into())),
        Just(TextTree::Leaf("nu".into())),
        (1u32..40).prop_map(|n| TextTree::Leaf(n.to_string())),
        (1u32..40, 1u32..10).prop_map(|(a, b)| TextTree::Leaf(format!("{a}.{b}"))),
    ];
    leaf.prop_recursive(4, 48, 3, |inner| {
        prop_oneof![
            (inner.clone(), inner.clone()).prop_map(|(a, b)| TextTree::Binary(
                "+",
                Box::new(a),
                Box::new(b)
            )),
            (inner.clone(), inner.clone()).prop_map(|(a, b)| TextTree::Binary(
                "-",
                Box::new(a),
                Box::new(b)
            )),
            (inner.clone(), inner.clone()).prop_map(|(a, b)| TextTree::Binary(
                "*",
                Box::new(a),
                Box::new(b)
            )),
            (inner.clone(), inner.clone()).prop_map(|(a, b)| TextTree::Binary(
                "/",
                Box::new(a),
                Box::new(b)
            )),
            (inner.clone(), inner.clone())
                .prop_map(|(a, b)| TextTree::Pow(Box::new(a), Box::new(b))),
            inner
                .clone()
                .prop_map(|a| TextTree::Unary("-", Box::new(a))),
            inner
                .clone()
                .prop_map(|a| TextTree::Unary("sin", Box::new(a))),
            inner
                .clone()
                .prop_map(|a| TextTree::Unary("exp", Box::new(a))),
            inner.prop_map(|a| TextTree::Unary("sqrt", Box::new(a))),
        ]
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    /// parse(print(parse(t))) is structurally equal to parse(t).
    #[test]
    fn printer_round_trip(tree in tree_strategy()) {
        let text = tree.render();
        let parsed = parse(&text).expect("generated text must parse");
        let printed = parsed.to_string();
        let reparsed = parse(&printed)
            .unwrap_or_else(|e| panic!("printed form failed to parse: `{printed}`: {e}"));
        prop_assert_eq!(parsed, reparsed);
    }
}
