use lieprelim::classify::{
    adjoint_closed, adjoint_numeric, adjoint_pushforward, adjoint_series, Element,
};
use lieprelim::expr::{eval_numeric, parse, Assignment, Env, Expr, FunctionSignature, Oracle};
use lieprelim::fields::{EquivTransform, UMap, VectorField};

const SCALING_TOL: f64 = 1e-6;
const SERIES_ORDER: usize = 12;

fn p(s: &str) -> Expr {
    parse(s, &Env::new()).unwrap()
}

fn el(s: &str) -> Element {
    Element::parse(s).unwrap()
}

fn zero_field(v: &VectorField) -> bool {
    let o = Oracle::default();
    v.coords()
        .into_iter()
        .all(|c| o.is_zero(&v.coeff(c)).holds())
}

fn same(a: &Element, b: &Element) -> bool {
    let d = a.sub(b);
    let o = Oracle::default();
    [&d.a0, &d.a1, &d.a2, &d.a3, &d.h]
        .iter()
        .all(|c| o.is_zero(c).holds())
}

#[test]
fn commutation_table() {
    let h1 = FunctionSignature::new("h1", &["u"]).apply();
    let h2 = FunctionSignature::new("h2", &["u"]).apply();
    let gens = [
        ("dt", Element::dt()),
        ("dx", Element::dx()),
        ("Dt", Element::big_dt()),
        ("Dx", Element::big_dx()),
        ("G1", Element::g(h1.clone())),
        ("G2", Element::g(h2.clone())),
    ];
    let mut nonzero = Vec::new();
    for (i, (a, v)) in gens.iter().enumerate() {
        for (b, w) in &gens[i + 1..] {
            let r = v.bracket(w);
            let realized = v.to_field().commutator(&w.to_field()).unwrap();
            assert!(
                zero_field(&realized.sub(&r.to_field()).unwrap()),
                "[{a}, {b}]"
            );
            if !r.is_zero() {
                nonzero.push((*a, *b, r));
            }
        }
    }
    let names: Vec<(&str, &str)> = nonzero.iter().map(|(a, b, _)| (*a, *b)).collect();
    assert_eq!(names, [("dt", "Dt"), ("dx", "Dx"), ("G1", "G2")]);
    assert_eq!(nonzero[0].2, Element::dt());
    assert_eq!(nonzero[1].2, Element::dx());
    let want = Element::g(&h1 * &h2.diff("u") - &h2 * &h1.diff("u"));
    assert!(same(&nonzero[2].2, &want));
}

#[test]
fn jacobi_identity_on_generators() {
    let gens: Vec<VectorField> = [
        "dt",
        "dx",
        "Dt",
        "Dx",
        "G(1)",
        "G(u)",
        "G(u^2)",
        "G(exp(u))",
    ]
    .iter()
    .map(|s| el(s).to_field())
    .collect();
    let br = |a: &VectorField, b: &VectorField| a.commutator(b).unwrap();
    for a in &gens {
        for b in &gens {
            for c in &gens {
                let j = br(a, &br(b, c))
                    .add(&br(b, &br(c, a)))
                    .unwrap()
                    .add(&br(c, &br(a, b)))
                    .unwrap();
                assert!(zero_field(&j));
            }
        }
    }
}

#[test]
fn terminating_series_equal_closed_forms() {
    let eps = p("eps");
    let cases = [
        ("dx", "Dx"),
        ("dt", "Dt"),
        ("G(1)", "G(u)"),
        ("G(1)", "G(u^2)"),
        ("G(u^2)", "G(u)"),
        ("dx", "G(u)"),
    ];
    for (v, w) in cases {
        let (v, w) = (el(v), el(w));
        let s = adjoint_series(&v, &w, &eps, SERIES_ORDER);
        assert!(s.terminated, "Ad({v}) {w}");
        let c = adjoint_closed(&v, &w, &eps).unwrap();
        assert!(same(&s.value, &c), "Ad({v}) {w}: {} vs {c}", s.value);
    }
}

#[test]
fn scaling_series_converge_to_closed_forms() {
    for (v, w, comp) in [("Dx", "dx", 3usize), ("Dt", "dt", 0)] {
        let (v, w) = (el(v), el(w));
        let s = adjoint_series(&v, &w, &p("eps"), SERIES_ORDER);
        assert!(!s.terminated);
        let c = adjoint_closed(&v, &w, &p("eps")).unwrap();
        let pick =
            |e: &Element| [e.a0.clone(), e.a1.clone(), e.a2.clone(), e.a3.clone()][comp].clone();
        for eps in [-0.75, 0.3, 1.0] {
            let a = Assignment::new().set("eps", eps);
            let series = eval_numeric(&pick(&s.value), &a).unwrap();
            let closed = eval_numeric(&pick(&c), &a).unwrap();
            assert!(
                (series - closed).abs() < SCALING_TOL,
                "{v}: {series} vs {closed}"
            );
        }
    }
}

#[test]
fn g_flow_adjoint_against_integrator() {
    for (h1, h2) in [("u^2", "u"), ("exp(u)", "1"), ("1 + u", "u^2")] {
        let c = adjoint_closed(&Element::g(p(h1)), &Element::g(p(h2)), &p("eps")).unwrap();
        for (eps, u) in [(0.2, 0.5), (-0.3, 0.8)] {
            let exact = eval_numeric(&c.h, &Assignment::new().set("eps", eps).set("u", u)).unwrap();
            let numeric = adjoint_numeric(&p(h1), &p(h2), eps, u).unwrap();
            assert!(
                (exact - numeric).abs() < SCALING_TOL,
                "{h1}, {h2}: {exact} vs {numeric}"
            );
        }
    }
}

fn push(t: &EquivTransform, e: &Element) -> Element {
    Element::from_field(&t.to_point().pushforward(&e.to_field()).unwrap()).unwrap()
}

#[test]
fn push_forward_table() {
    let b0 = p("B0");
    let a0 = p("A0");
    assert_eq!(
        push(&EquivTransform::translate_x(b0.clone()), &Element::big_dx()),
        el("Dx - B0*dx")
    );
    assert_eq!(
        push(&EquivTransform::translate_t(a0.clone()), &Element::big_dt()),
        el("Dt - A0*dt")
    );
    assert_eq!(
        push(&EquivTransform::scale_x(p("B1")), &Element::dx()),
        el("B1*dx")
    );
    assert_eq!(
        push(&EquivTransform::scale_t(p("A1")), &Element::dt()),
        el("A1*dt")
    );
    // G(U) with U = exp(u): inverse U~ = ln(u), so G(h) -> G(h(ln u) u).
    let g = push(
        &EquivTransform::g(UMap::Exp { rate: Expr::one() }),
        &el("G(u^2)"),
    );
    assert!(same(&g, &Element::g(p("ln(u)^2*u"))), "{g}");
    // Identity actions.
    for (t, e) in [
        (EquivTransform::translate_x(b0.clone()), Element::dx()),
        (EquivTransform::translate_x(b0), Element::big_dt()),
        (EquivTransform::scale_x(p("B1")), Element::big_dx()),
        (
            EquivTransform::g(UMap::Exp { rate: Expr::one() }),
            Element::big_dx(),
        ),
    ] {
        assert_eq!(push(&t, &e), e);
    }
}

#[test]
fn push_forward_and_lie_series_agree() {
    let eps = p("eps");
    let gens = ["dt", "dx", "Dt", "Dx", "G(1)", "G(u)", "G(u^2)"].map(el);
    for v in &gens {
        for w in &gens {
            let a = adjoint_closed(v, w, &eps).unwrap();
            let b = adjoint_pushforward(v, w, &eps).unwrap();
            assert!(same(&a, &b), "Ad({v}) {w}");
        }
    }
}
