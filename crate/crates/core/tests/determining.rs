use lieprelim::expr::{parse, Env, Expr, Oracle};
use lieprelim::fields::{VectorField, BASE};
use lieprelim::jet::classes;
use lieprelim::verify::{
    derive, determining_system, generic_ansatz, kernel_conditions, symmetry_residuals,
};

const GOLDEN: &str = include_str!("../resources/golden/eq6.txt");

fn env() -> Env {
    Env::new()
        .with("tau", &["t", "x", "u"])
        .with("xi", &["t", "x", "u"])
        .with("eta", &["t", "x", "u"])
        .with("f", &["x", "u"])
        .with("g", &["x", "u"])
}

fn field(s: &str) -> VectorField {
    VectorField::parse(s, &BASE, &Env::new()).unwrap()
}

#[test]
fn printed_system_matches_golden_file() {
    let s = determining_system(&classes::gen_diff(), &generic_ansatz()).unwrap();
    assert_eq!(s.to_text(), GOLDEN);
}

/// The seven equations in their published arrangement.
const TRANSCRIBED: [(&str, &str); 7] = [
    ("u_x*u_tx", "Diff(tau,u)"),
    ("u_tx", "Diff(tau,x)"),
    ("u_x*u_xx", "Diff(xi,u)"),
    ("u_x^2", "f*(Diff(tau,t) + Diff(eta,u) - 2*Diff(xi,x)) + g*Diff(eta,u,u) + xi*Diff(f,x) + eta*Diff(f,u)"),
    ("u_xx", "g*(Diff(tau,t) - 2*Diff(xi,x)) + xi*Diff(g,x) + eta*Diff(g,u)"),
    ("u_x", "Diff(xi,t) + 2*f*Diff(eta,x) + g*(2*Diff(eta,x,u) - Diff(xi,x,x))"),
    ("1", "Diff(eta,t) - g*Diff(eta,x,x)"),
];

#[test]
fn system_matches_transcription_exactly() {
    let s = determining_system(&classes::gen_diff(), &generic_ansatz()).unwrap();
    assert_eq!(s.labels(), TRANSCRIBED.map(|(l, _)| l.to_string()));
    for (label, text) in TRANSCRIBED {
        assert_eq!(
            s.get(label).unwrap(),
            &parse(text, &env()).unwrap(),
            "{label}"
        );
    }
}

#[test]
fn golden_file_parses_back() {
    for (line, (label, _)) in GOLDEN.lines().zip(TRANSCRIBED) {
        let (l, rhs) = line.split_once(": ").unwrap();
        assert_eq!(l, label);
        let e = parse(rhs, &env()).unwrap();
        assert_eq!(e.to_string(), rhs);
    }
}

#[test]
fn first_three_equations_are_consequences() {
    let d = derive(&classes::gen_diff(), &generic_ansatz()).unwrap();
    assert_eq!(d.consequences, 3);
    assert_eq!(d.classifying().len(), 4);
}

#[test]
fn kernel_is_time_translation() {
    let k = kernel_conditions(&classes::gen_diff()).unwrap();
    let want: Vec<Expr> = ["xi", "eta", "Diff(tau,t)"]
        .iter()
        .map(|s| parse(s, &env()).unwrap())
        .collect();
    assert_eq!(k.conditions.len(), want.len());
    assert!(want.iter().all(|w| k.conditions.contains(w)));
    assert!(k.admits(&field("dt")));
    assert!(!k.admits(&field("dx")));
    assert!(!k.admits(&field("u*du")));
    assert!(!k.admits(&field("t*dt")));
}

#[test]
fn heat_equation_scaling() {
    let o = Oracle::default();
    assert!(
        symmetry_residuals(&classes::heat(), &[], &field("2*t*dt + x*dx"), &o)
            .unwrap()
            .is_empty()
    );
    assert!(symmetry_residuals(
        &classes::heat(),
        &[],
        &field("4*t*x*dx + 4*t^2*dt - (x^2 + 2*t)*u*du"),
        &o
    )
    .unwrap()
    .is_empty());
    assert!(
        !symmetry_residuals(&classes::heat(), &[], &field("t*dt + x*dx"), &o)
            .unwrap()
            .is_empty()
    );
}

#[test]
fn time_translation_for_arbitrary_elements() {
    let o = Oracle::default();
    assert!(
        symmetry_residuals(&classes::gen_diff(), &[], &field("dt"), &o)
            .unwrap()
            .is_empty()
    );
    assert!(
        !symmetry_residuals(&classes::gen_diff(), &[], &field("dx"), &o)
            .unwrap()
            .is_empty()
    );
}

#[test]
fn nonprojectable_instance_symmetry() {
    // f = -4/3 u^(-7/3), g = u^(-4/3) admits x^2 dx - 3 x u du.
    let e = Env::new();
    let f = parse("-4/3*u^(-7/3)", &e).unwrap();
    let g = parse("u^(-4/3)", &e).unwrap();
    let r = symmetry_residuals(
        &classes::gen_diff(),
        &[("f", &f), ("g", &g)],
        &field("x^2*dx - 3*x*u*du"),
        &Oracle::default(),
    );
    assert!(r.unwrap().is_empty());
}
