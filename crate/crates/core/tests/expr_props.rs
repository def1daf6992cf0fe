use lieprelim::expr::{parse, Env, Expr, Oracle};
use lieprelim::jet::JetSpace;
use proptest::prelude::*;

fn leaf(symbols: &'static [&'static str]) -> impl Strategy<Value = Expr> {
    prop_oneof![
        (-4i64..=4).prop_map(Expr::int),
        (1i64..=3, 2i64..=3).prop_map(|(n, d)| Expr::rational(lieprelim::expr::rat(n, d))),
        prop::sample::select(symbols).prop_map(Expr::sym),
    ]
}

fn expr() -> impl Strategy<Value = Expr> {
    expr_over(&["t", "x", "u", "a", "u_x", "u_xx"])
}

fn expr_over(symbols: &'static [&'static str]) -> impl Strategy<Value = Expr> {
    leaf(symbols).prop_recursive(4, 24, 3, |inner| {
        prop_oneof![
            (inner.clone(), inner.clone()).prop_map(|(a, b)| a + b),
            (inner.clone(), inner.clone()).prop_map(|(a, b)| a * b),
            (inner.clone(), 1i64..=3).prop_map(|(a, k)| Expr::pow(a, Expr::int(k))),
            inner.clone().prop_map(|a| Expr::exp(a / Expr::int(4))),
            prop::sample::select(vec!["x", "u"]).prop_map(|s| Expr::ln(Expr::sym(s))),
        ]
    })
}

fn same(a: &Expr, b: &Expr) -> bool {
    a == b || Oracle::default().equal(a, b).holds()
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 64, ..ProptestConfig::default() })]

    #[test]
    fn print_parse_round_trip(e in expr()) {
        let back = parse(&e.to_string(), &Env::new()).unwrap();
        prop_assert_eq!(&back, &e);
    }

    #[test]
    fn sums_and_products_are_canonical(a in expr(), b in expr()) {
        prop_assert_eq!(&a + &b, &b + &a);
        prop_assert_eq!(&a * &b, &b * &a);
        prop_assert!((&a - &a).is_zero());
    }

    #[test]
    fn derivative_is_linear(a in expr(), b in expr(), k in -3i64..=3) {
        let lhs = (&a + &(&b * &Expr::int(k))).diff("x");
        let rhs = a.diff("x") + b.diff("x") * Expr::int(k);
        prop_assert!(same(&lhs, &rhs), "{} vs {}", lhs, rhs);
    }

    #[test]
    fn product_rule(a in expr(), b in expr()) {
        let lhs = (&a * &b).diff("u");
        let rhs = a.diff("u") * b.clone() + a.clone() * b.diff("u");
        prop_assert!(same(&lhs, &rhs), "{} vs {}", lhs, rhs);
    }

    #[test]
    fn mixed_partials_commute(e in expr()) {
        prop_assert!(same(&e.diff("x").diff("u"), &e.diff("u").diff("x")));
    }

    #[test]
    fn substitution_commutes_with_evaluation(e in expr(), k in 1i64..=3) {
        // Replacing a by k then differentiating equals differentiating then replacing.
        let lhs = e.subs("a", &Expr::int(k)).diff("t");
        let rhs = e.diff("t").subs("a", &Expr::int(k));
        prop_assert!(same(&lhs, &rhs));
    }

    #[test]
    fn oracle_separates_shifted_expressions(e in expr()) {
        prop_assert!(!Oracle::default().equal(&e, &(&e + &Expr::one())).holds());
    }

    #[test]
    fn total_derivatives_commute(e in expr_over(&["t", "x", "u", "u_x"])) {
        let js = JetSpace::new();
        let tx = js.total_derivative(&js.total_derivative(&e, "x").unwrap(), "t").unwrap();
        let xt = js.total_derivative(&js.total_derivative(&e, "t").unwrap(), "x").unwrap();
        prop_assert!(same(&tx, &xt), "{} vs {}", tx, xt);
    }
}

#[test]
fn mixed_partial_nodes_coincide() {
    let env = Env::new().with("f", &["x", "u"]);
    assert_eq!(
        parse("Diff(f,u,x)", &env).unwrap(),
        parse("Diff(f,x,u)", &env).unwrap()
    );
    assert!(parse("0", &env).unwrap().is_zero());
}

#[test]
fn manifold_identity() {
    let env = Env::new().with("f", &["x", "u"]).with("g", &["x", "u"]);
    let delta = parse("u_t - f*u_x^2 - g*u_xx", &env).unwrap();
    let rhs = parse("f*u_x^2 + g*u_xx", &env).unwrap();
    assert!(delta.subs("u_t", &rhs).is_zero());
}

#[test]
fn parse_errors() {
    let env = Env::new().with("f", &["x", "u"]);
    assert!(parse("u_x +", &env).is_err());
    assert!(parse("h(u)", &env).is_err());
    assert!(parse("Diff(f,t)", &env).is_err() || parse("Diff(f,t)", &env).unwrap().is_zero());
}
