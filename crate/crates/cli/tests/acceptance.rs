//! Acceptance run: one PASS/FAIL line per criterion.
//!
//! `cargo test -p lieprelim-cli --test acceptance -- --nocapture`

use std::collections::BTreeMap;
use std::process::Command;
use std::time::Instant;

use lieprelim::classify::{
    adjoint_closed, adjoint_pushforward, adjoint_series, appropriateness, canonical, is_closed,
    normalize_1d, normalize_2d, Element, ListId,
};
use lieprelim::expr::{
    eval_numeric, parse, rat, set_oracle_defaults, Assignment, Bindings, Env, Expr,
    FunctionSignature, Oracle, Rational,
};
use lieprelim::fields::{EquivTransform, UMap, VectorField, BASE, EXTENDED};
use lieprelim::jet::classes;
use lieprelim::verify::{
    admissible_split, equiv_invariance_check, kernel_conditions, verify_table, Mode, F_NEW, G_NEW,
};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Seed of the identity oracle and of the random inputs of criterion 7.
const SEED: u64 = 0x5eed_2024;
/// Relative tolerance of the identity oracle.
const ORACLE_TOL: f64 = 1e-9;
/// Agreement of truncated scaling series with the closed forms.
const SERIES_TOL: f64 = 1e-6;
const SERIES_ORDER: usize = 12;
const RANDOM_1D: usize = 1000;
const RANDOM_2D: usize = 300;

const GOLDEN: &str = include_str!("../../core/resources/golden/eq6.txt");

type Outcome = Result<(), String>;
type Criterion = (u32, &'static str, fn() -> Outcome);

fn ensure(ok: bool, msg: impl FnOnce() -> String) -> Outcome {
    if ok {
        Ok(())
    } else {
        Err(msg())
    }
}

fn p(s: &str) -> Expr {
    parse(s, &Env::new()).unwrap()
}

fn el(s: &str) -> Element {
    Element::parse(s).unwrap()
}

fn base_field(s: &str) -> VectorField {
    VectorField::parse(s, &BASE, &Env::new()).unwrap()
}

fn zero(e: &Expr) -> bool {
    e.is_zero() || Oracle::default().is_zero(e).holds()
}

fn zero_field(v: &VectorField) -> bool {
    v.coords().into_iter().all(|c| zero(&v.coeff(c)))
}

fn same(a: &Element, b: &Element) -> bool {
    let d = a.sub(b);
    [&d.a0, &d.a1, &d.a2, &d.a3, &d.h].iter().all(|e| zero(e))
}

fn cli(args: &[&str]) -> (i32, String) {
    let out = Command::new(env!("CARGO_BIN_EXE_lie-prelim"))
        .args(args)
        .env_remove("LIE_PRELIM_SEED")
        .output()
        .expect("binary runs");
    (
        out.status.code().unwrap_or(-1),
        String::from_utf8(out.stdout).unwrap(),
    )
}

fn c1_determining_system() -> Outcome {
    let (code, out) = cli(&["derive", "--class", "genDiff"]);
    ensure(code == 0, || format!("exit code {code}"))?;
    ensure(out == GOLDEN, || {
        format!("output differs from the golden file:\n{out}")
    })
}

fn c2_kernel() -> Outcome {
    let k = kernel_conditions(&classes::gen_diff()).map_err(|e| e.to_string())?;
    let env = Env::new()
        .with("tau", &["t", "x", "u"])
        .with("xi", &["t", "x", "u"])
        .with("eta", &["t", "x", "u"]);
    let want: Vec<Expr> = ["xi", "eta", "Diff(tau,t)"]
        .iter()
        .map(|s| parse(s, &env).unwrap())
        .collect();
    ensure(
        k.conditions.len() == 3 && want.iter().all(|w| k.conditions.contains(w)),
        || format!("conditions {:?}", k.conditions),
    )?;
    ensure(k.admits(&base_field("dt")), || "dt rejected".into())?;
    ensure(
        !k.admits(&base_field("dx")) && !k.admits(&base_field("u*du")),
        || "dx or u du admitted".into(),
    )
}

fn c3_equivalence_algebra() -> Outcome {
    let cls = classes::gen_diff();
    let mut gens = vec![
        Element::dt(),
        Element::dx(),
        Element::big_dt(),
        Element::big_dx(),
    ];
    gens.extend(["1", "u", "u^2", "exp(u)"].map(|h| Element::g(p(h))));
    gens.push(Element::g(FunctionSignature::new("h", &["u"]).apply()));
    for g in gens {
        let r = equiv_invariance_check(&g.to_field(), &cls).map_err(|e| e.to_string())?;
        ensure(r.holds, || format!("{g} fails: {:?}", r.residuals))?;
    }
    let env = Env::new().with("a", &["x"]).with("b", &["x"]);
    for text in ["b*du", "a*dx + 2*f*a*df + g*Diff(a,x)*dg"] {
        let y = VectorField::parse(text, &EXTENDED, &env).unwrap();
        let r = equiv_invariance_check(&y, &cls).map_err(|e| e.to_string())?;
        ensure(
            !r.holds && r.residuals.iter().any(|(_, e)| !e.is_zero()),
            || format!("{text} passes"),
        )?;
    }
    Ok(())
}

fn c4_equivalence_group() -> Outcome {
    let cls = classes::gen_diff();
    let s = admissible_split(&cls).map_err(|e| e.to_string())?;
    let env = Env::new()
        .with("T", &["t"])
        .with("X", &["t", "x"])
        .with("U", &["t", "x", "u"])
        .with("f", &["x", "u"])
        .with("g", &["x", "u"]);
    let q = |s: &str| parse(s, &env).unwrap();
    let published = [
        ("u_xx", "(gtilde - Diff(X,x)^2/Diff(T,t)*g)*(-Diff(U,u)/Diff(X,x)^2)"),
        ("u_x^2", "f*Diff(U,u)/Diff(T,t) - ftilde*Diff(U,u)^2/Diff(X,x)^2 - gtilde*Diff(U,u,u)/Diff(X,x)^2"),
        (
            "u_x",
            "-Diff(X,t)*Diff(U,u)/(Diff(T,t)*Diff(X,x)) - gtilde/Diff(X,x)^2*(2*Diff(U,x,u) - Diff(X,x,x)/Diff(X,x)*Diff(U,u)) \
             - 2*ftilde*Diff(U,x)*Diff(U,u)/Diff(X,x)^2",
        ),
        (
            "1",
            "(Diff(U,t) - Diff(X,t)/Diff(X,x)*Diff(U,x))/Diff(T,t) - ftilde*(Diff(U,x)/Diff(X,x))^2 \
             - gtilde/Diff(X,x)^2*(Diff(U,x,x) - Diff(X,x,x)/Diff(X,x)*Diff(U,x))",
        ),
    ];
    ensure((F_NEW, G_NEW) == ("ftilde", "gtilde"), || {
        "unexpected names for the new arbitrary elements".into()
    })?;
    for (label, eq) in published {
        let ours = s
            .equations
            .get(label)
            .ok_or_else(|| format!("no {label} equation"))?;
        ensure(Oracle::default().equal(ours, &q(eq)).holds(), || {
            format!("{label}: {ours}")
        })?;
    }
    let want = [
        "Diff(X,t)",
        "Diff(X,x,x)",
        "Diff(U,x)",
        "Diff(U,t)",
        "Diff(T,t,t)",
    ]
    .map(q);
    ensure(
        s.constraints.len() == 5 && want.iter().all(|w| s.constraints.contains(w)),
        || format!("constraints {:?}", s.constraints),
    )?;

    // Closed form: maps the class to itself and round-trips.
    let fenv = Env::new().with("f", &["x", "u"]).with("g", &["x", "u"]);
    let (f0, g0) = (parse("f", &fenv).unwrap(), parse("g", &fenv).unwrap());
    let tr = EquivTransform {
        a0: p("3"),
        a1: p("-2"),
        b0: p("1/2"),
        b1: p("5"),
        u_map: UMap::Exp { rate: p("2") },
    };
    let (ft, gt) = tr
        .transform_class_element(&f0, &g0)
        .map_err(|e| e.to_string())?;
    for img in [&ft, &gt] {
        ensure(
            img.free_symbols()
                .iter()
                .all(|s| ["x", "u"].contains(&&**s)),
            || format!("image {img} leaves the class"),
        )?;
    }
    let back = tr.inverse().ok_or("no inverse")?;
    let (f1, g1) = back
        .transform_class_element(&ft, &gt)
        .map_err(|e| e.to_string())?;
    let o = Oracle::default();
    ensure(
        o.equal(&f1, &f0).holds() && o.equal(&g1, &g0).holds(),
        || "round trip differs".into(),
    )?;
    let genv = env.clone().with("V", &["u"]);
    let b = Bindings::new()
        .func("T", &["t"], parse("A1*t + A0", &genv).unwrap())
        .func("X", &["t", "x"], parse("B1*x + B0", &genv).unwrap())
        .func("U", &["t", "x", "u"], parse("V", &genv).unwrap());
    let fg = parse("B1^2/(A1*Diff(V,u))*(f - Diff(V,u,u)/Diff(V,u)*g)", &genv).unwrap();
    let gg = parse("B1^2/A1*g", &genv).unwrap();
    for (label, e) in &s.equations.equations {
        let r = b.apply_unchecked(e).subs(F_NEW, &fg).subs(G_NEW, &gg);
        ensure(o.is_zero(&r).holds(), || {
            format!("group form violates {label}")
        })?;
    }

    let rules = |t: EquivTransform| -> Vec<String> {
        let pt = t.to_point();
        ["t", "x", "u", "f", "g"]
            .iter()
            .map(|c| pt.rule(c).to_string())
            .collect()
    };
    ensure(
        rules(EquivTransform::i_t()) == ["-t", "x", "u", "-f", "-g"],
        || "I_t".into(),
    )?;
    ensure(
        rules(EquivTransform::i_x()) == ["t", "-x", "u", "f", "g"],
        || "I_x".into(),
    )?;
    ensure(
        rules(EquivTransform::i_u()) == ["t", "x", "-u", "-f", "g"],
        || "I_u".into(),
    )
}

fn c5_burgers() -> Outcome {
    let (f, g) = EquivTransform::g(UMap::Exp { rate: Expr::one() })
        .transform_class_element(&Expr::one(), &Expr::one())
        .map_err(|e| e.to_string())?;
    ensure(f.is_zero() && g == Expr::one(), || {
        format!("(1, 1) -> ({f}, {g})")
    })?;
    let env = Env::new().with("g", &["x", "u"]);
    let g0 = parse("g", &env).unwrap();
    let c = Expr::sym("c");
    let (f, g) = EquivTransform::g(UMap::Exp { rate: c.clone() })
        .transform_class_element(&(&c * &g0), &g0)
        .map_err(|e| e.to_string())?;
    ensure(zero(&f), || format!("f~ = {f}"))?;
    ensure(
        Oracle::default()
            .equal(&g, &parse("g(x, ln(u)/c)", &env).unwrap())
            .holds(),
        || format!("g~ = {g}"),
    )
}

fn c6_algebra_structure() -> Outcome {
    let h1 = FunctionSignature::new("h1", &["u"]).apply();
    let h2 = FunctionSignature::new("h2", &["u"]).apply();
    let named = [
        ("dt", Element::dt()),
        ("dx", Element::dx()),
        ("Dt", Element::big_dt()),
        ("Dx", Element::big_dx()),
        ("G(h1)", Element::g(h1.clone())),
        ("G(h2)", Element::g(h2.clone())),
    ];
    let mut nonzero = Vec::new();
    for (i, (a, v)) in named.iter().enumerate() {
        for (b, w) in &named[i + 1..] {
            let r = v.bracket(w);
            let realized = v
                .to_field()
                .commutator(&w.to_field())
                .map_err(|e| e.to_string())?;
            ensure(zero_field(&realized.sub(&r.to_field()).unwrap()), || {
                format!("[{a}, {b}] disagrees with its realization")
            })?;
            if !r.is_zero() {
                nonzero.push((*a, *b, r));
            }
        }
    }
    let pairs: Vec<(&str, &str)> = nonzero.iter().map(|(a, b, _)| (*a, *b)).collect();
    ensure(
        pairs == [("dt", "Dt"), ("dx", "Dx"), ("G(h1)", "G(h2)")],
        || format!("nonzero brackets {pairs:?}"),
    )?;
    ensure(
        nonzero[0].2 == Element::dt() && nonzero[1].2 == Element::dx(),
        || "translation brackets".into(),
    )?;
    ensure(
        same(
            &nonzero[2].2,
            &Element::g(&h1 * &h2.diff("u") - &h2 * &h1.diff("u")),
        ),
        || "G bracket".into(),
    )?;

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
                ensure(zero_field(&j), || format!("Jacobi fails on {a}, {b}, {c}"))?;
            }
        }
    }

    let eps = p("eps");
    for (v, w) in [
        ("dx", "Dx"),
        ("dt", "Dt"),
        ("G(1)", "G(u)"),
        ("G(1)", "G(u^2)"),
        ("G(u^2)", "G(u)"),
    ] {
        let (v, w) = (el(v), el(w));
        let s = adjoint_series(&v, &w, &eps, SERIES_ORDER);
        let c = adjoint_closed(&v, &w, &eps).map_err(|e| e.to_string())?;
        ensure(s.terminated && same(&s.value, &c), || {
            format!("Ad({v}) {w}: series {} vs {c}", s.value)
        })?;
    }
    for (v, w) in [("Dx", "dx"), ("Dt", "dt")] {
        let (v, w) = (el(v), el(w));
        let s = adjoint_series(&v, &w, &eps, SERIES_ORDER).value.to_field();
        let c = adjoint_closed(&v, &w, &eps)
            .map_err(|e| e.to_string())?
            .to_field();
        for e in [-1.0, 0.5, 1.0] {
            for coord in ["t", "x"] {
                let a = Assignment::new().set("eps", e);
                let d = eval_numeric(&(s.coeff(coord) - c.coeff(coord)), &a)
                    .map_err(|e| e.to_string())?;
                ensure(d.abs() < SERIES_TOL, || {
                    format!("Ad({v}) {w} at eps = {e}: off by {d}")
                })?;
            }
        }
    }

    let push = |t: EquivTransform, e: &Element| -> Result<Element, String> {
        let v = t
            .to_point()
            .pushforward(&e.to_field())
            .map_err(|e| e.to_string())?;
        Element::from_field(&v).ok_or_else(|| format!("push of {e} leaves the algebra"))
    };
    let table = [
        (
            EquivTransform::translate_x(p("B0")),
            Element::big_dx(),
            el("Dx - B0*dx"),
        ),
        (
            EquivTransform::translate_t(p("A0")),
            Element::big_dt(),
            el("Dt - A0*dt"),
        ),
        (EquivTransform::scale_x(p("B1")), Element::dx(), el("B1*dx")),
        (EquivTransform::scale_t(p("A1")), Element::dt(), el("A1*dt")),
        (
            EquivTransform::g(UMap::Exp { rate: Expr::one() }),
            el("G(u^2)"),
            Element::g(p("ln(u)^2*u")),
        ),
        (
            EquivTransform::g(UMap::Power { exponent: p("2") }),
            el("G(u)"),
            el("G(2*u)"),
        ),
    ];
    for (t, e, want) in table {
        let got = push(t, &e)?;
        ensure(same(&got, &want), || {
            format!("{e} -> {got}, expected {want}")
        })?;
    }
    let gens = ["dt", "dx", "Dt", "Dx", "G(1)", "G(u)", "G(u^2)"].map(el);
    for v in &gens {
        for w in &gens {
            let a = adjoint_closed(v, w, &eps).map_err(|e| e.to_string())?;
            let b = adjoint_pushforward(v, w, &eps).map_err(|e| e.to_string())?;
            ensure(same(&a, &b), || {
                format!("Ad({v}) {w}: closed {a} vs push-forward {b}")
            })?;
        }
    }
    Ok(())
}

fn small(rng: &mut ChaCha8Rng) -> Rational {
    let d = rng.gen_range(1..=3);
    rat(rng.gen_range(-5 * d..=5 * d), d)
}

fn nonzero(rng: &mut ChaCha8Rng) -> Rational {
    loop {
        let q = small(rng);
        if q != rat(0, 1) {
            return q;
        }
    }
}

fn maybe(rng: &mut ChaCha8Rng) -> Expr {
    if rng.gen_bool(0.35) {
        Expr::zero()
    } else {
        Expr::rational(small(rng))
    }
}

fn random_h(rng: &mut ChaCha8Rng) -> Expr {
    let u = Expr::sym("u");
    let c = Expr::rational(nonzero(rng));
    match rng.gen_range(0..5) {
        0 => Expr::zero(),
        1 => c,
        2 => &c + &(&Expr::rational(nonzero(rng)) * &u),
        3 => &c * &Expr::exp(&Expr::rational(nonzero(rng)) * &u),
        _ => {
            let e = loop {
                let e = small(rng);
                if e != rat(0, 1) && e != rat(1, 1) {
                    break e;
                }
            };
            &c * &Expr::pow(u, Expr::rational(e))
        }
    }
}

fn random_params(rng: &mut ChaCha8Rng) -> BTreeMap<String, Expr> {
    let bit = |rng: &mut ChaCha8Rng| Expr::int(rng.gen_range(0..=1));
    let delta = bit(rng);
    let hat = if delta.is_zero() {
        bit(rng)
    } else {
        Expr::rational(small(rng))
    };
    let mut m = BTreeMap::new();
    m.insert("a".to_string(), Expr::rational(small(rng)));
    m.insert("b".to_string(), Expr::rational(small(rng)));
    m.insert("delta".to_string(), delta);
    m.insert("delta_hat".to_string(), hat);
    m.insert("delta_tilde".to_string(), bit(rng));
    m
}

fn random_u_map(rng: &mut ChaCha8Rng) -> UMap {
    match rng.gen_range(0..4) {
        0 => UMap::Affine {
            scale: Expr::rational(nonzero(rng)),
            shift: Expr::rational(small(rng)),
        },
        1 => UMap::Exp {
            rate: Expr::rational(nonzero(rng)),
        },
        2 => UMap::Power {
            exponent: Expr::rational(rat(rng.gen_range(1..=4), rng.gen_range(1..=3))),
        },
        _ => UMap::Ln,
    }
}

fn c7_optimal_lists() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(SEED);
    let mut seen = BTreeMap::new();
    let mut done = 0;
    while done < RANDOM_1D {
        let v = Element {
            a0: maybe(&mut rng),
            a1: maybe(&mut rng),
            a2: maybe(&mut rng),
            a3: maybe(&mut rng),
            h: random_h(&mut rng),
        };
        if v.ess().is_zero() {
            continue;
        }
        let n = normalize_1d(&v).map_err(|e| format!("{v}: {e}"))?;
        ensure(
            matches!(n.canonical.list_id, ListId::One(_)) && n.canonical.params_in_range(),
            || format!("{v} -> {}", n.canonical),
        )?;
        n.witness
            .verify(&n.canonical)
            .map_err(|e| format!("{v}: {e}"))?;
        *seen.entry(n.canonical.list_id).or_insert(0) += 1;
        done += 1;
    }
    ensure(seen.len() == 4, || format!("1D forms reached: {seen:?}"))?;

    let mut reached = BTreeMap::new();
    for case in 0..RANDOM_2D {
        let id = ListId::Two(rng.gen_range(1..=8));
        let start = canonical(id, &random_params(&mut rng)).map_err(|e| e.to_string())?;
        let mut basis = start.basis.clone();
        let steps = [
            EquivTransform::translate_x(Expr::rational(small(&mut rng))),
            EquivTransform::scale_x(Expr::rational(nonzero(&mut rng))),
            EquivTransform::g(random_u_map(&mut rng)),
        ];
        for t in steps {
            if rng.gen_bool(0.7) {
                let pt = t.to_point();
                basis = basis
                    .iter()
                    .map(|e| {
                        Element::from_field(&pt.pushforward(&e.to_field()).unwrap())
                            .ok_or("push left the algebra")
                    })
                    .collect::<Result<_, _>>()?;
            }
        }
        let m = loop {
            let m = [
                [small(&mut rng), small(&mut rng)],
                [small(&mut rng), small(&mut rng)],
            ];
            if &m[0][0] * &m[1][1] != &m[0][1] * &m[1][0] {
                break m;
            }
        };
        let mixed: Vec<Element> = m
            .iter()
            .map(|r| {
                basis[0]
                    .scale(&Expr::rational(r[0].clone()))
                    .add(&basis[1].scale(&Expr::rational(r[1].clone())))
            })
            .collect();
        ensure(is_closed(&mixed).unwrap_or(false), || {
            format!("case {case}: input not closed")
        })?;
        let n = normalize_2d(&mixed[0], &mixed[1])
            .map_err(|e| format!("case {case} from {start}: {e}"))?;
        ensure(
            n.canonical.list_id == id && n.canonical.params_in_range(),
            || format!("case {case}: {start} came back as {}", n.canonical),
        )?;
        n.witness
            .verify(&n.canonical)
            .map_err(|e| format!("case {case}: {e}"))?;
        *reached.entry(id).or_insert(0) += 1;
    }
    ensure(reached.len() == 8, || {
        format!("2D forms reached: {reached:?}")
    })?;

    let mut rng = ChaCha8Rng::seed_from_u64(SEED ^ 1);
    for _ in 0..5 {
        let params = random_params(&mut rng);
        for id in ListId::all() {
            let c = canonical(id, &params).map_err(|e| e.to_string())?;
            let n = match c.basis.as_slice() {
                [v] => normalize_1d(v),
                [v, w] => normalize_2d(v, w),
                _ => continue,
            }
            .map_err(|e| format!("{c}: {e}"))?;
            ensure(n.canonical == c, || {
                format!("{c} is not a fixed point: {}", n.canonical)
            })?;
        }
    }
    Ok(())
}

fn c8_appropriateness() -> Outcome {
    let dt = appropriateness(&[el("Dt")], None).map_err(|e| e.to_string())?;
    ensure(dt.contains_dt && !dt.passes(), || "D^t accepted".into())?;
    let three = appropriateness(&[el("G(1)"), el("G(u)"), el("G(u^2)")], None)
        .map_err(|e| e.to_string())?;
    ensure(
        three.m_s == 3 && three.g_forced_zero && !three.passes(),
        || format!("three G operators: {}", three.summary()),
    )?;

    let mut suite: Vec<Vec<Element>> = Vec::new();
    for (a, b, d) in [(0, 0, 0), (3, 1, 1), (-1, 2, 0)] {
        let params: BTreeMap<String, Expr> = [
            ("a", a),
            ("b", b),
            ("delta", d),
            ("delta_hat", 1 - d),
            ("delta_tilde", 1),
        ]
        .into_iter()
        .map(|(k, v)| (k.to_string(), Expr::int(v)))
        .collect();
        for id in ListId::all() {
            suite.push(canonical(id, &params).map_err(|e| e.to_string())?.basis);
        }
    }
    suite.push(vec![
        el("Dx"),
        el("dx"),
        el("G(1)"),
        el("G(u)"),
        el("G(u^2)"),
    ]);
    suite.push(vec![el("Dt + G(2*u)"), el("G(1)")]);
    for b in &suite {
        if !is_closed(b).map_err(|e| e.to_string())? {
            continue;
        }
        let r = appropriateness(b, None).map_err(|e| e.to_string())?;
        if r.passes() {
            ensure(!r.contains_dt && r.m_s <= 2 && r.dim <= 4, || {
                format!("bounds fail on {}", r.summary())
            })?;
            ensure(
                r.m_s != 2 || r.intersection.iter().all(Element::is_pure_g),
                || format!("impure intersection: {}", r.summary()),
            )?;
        }
    }

    for id in (1..=5).map(ListId::Higher) {
        let params: BTreeMap<String, Expr> = [("a", "a"), ("b", "b"), ("delta", "1")]
            .iter()
            .map(|(k, v)| (k.to_string(), p(v)))
            .collect();
        let c = canonical(id, &params).map_err(|e| e.to_string())?;
        ensure(is_closed(&c.basis).map_err(|e| e.to_string())?, || {
            format!("{c} is not closed")
        })?;
        let r = appropriateness(&c.basis, None).map_err(|e| e.to_string())?;
        ensure(r.passes() && r.predicates().values().all(|v| *v), || {
            format!("{c}: {}", r.summary())
        })?;
    }
    Ok(())
}

fn c9_tables() -> Outcome {
    let (code, out) = cli(&["verify", "--table", "all"]);
    ensure(code == 0, || {
        format!("verify --table all exits {code}\n{out}")
    })?;
    let r = verify_table("all", Mode::Corrected).map_err(|e| e.to_string())?;
    ensure(r.rows.iter().all(|x| x.isc && x.symmetry), || r.to_text())?;
    let find = |t: u8, c: &str| r.rows.iter().find(|x| x.table == t && x.case == c);
    let three = find(3, "1").ok_or("row 3:1 missing")?;
    ensure(
        three.f == "c*exp(u)"
            && three.g == "exp(u)"
            && three.operators.len() == 3
            && three.passes(),
        || "three-operator row".into(),
    )?;
    let heat = find(3, "4").ok_or("row 3:4 missing")?;
    ensure(
        heat.f == "0" && heat.g == "1" && heat.operators.len() == 4 && heat.passes(),
        || "heat row".into(),
    )?;

    let u = verify_table("all", Mode::Uncorrected).map_err(|e| e.to_string())?;
    let found = |row: &str, kind: &str, detail: &str| {
        u.anomalies
            .iter()
            .any(|a| a.detected && a.row == row && a.kind == kind && a.detail.contains(detail))
    };
    ensure(
        found("1:3 [delta=0]", "duplicate", "coincides with 2:3b"),
        || "Table 1 Case 3 duplicate not detected".into(),
    )?;
    ensure(
        found("2:7 [delta=0]", "extra operator", "2*t*dt + x*dx"),
        || "Table 2 Case 7 extension not detected".into(),
    )
}

const LINEAR: [&str; 6] = ["t", "x", "u", "A", "B", "C"];

fn linear_generator(a: &str, b: &str, c: &str) -> VectorField {
    let env = Env::new()
        .with("tau", &["t"])
        .with("xi", &["t", "x"])
        .with("eta1", &["t", "x"]);
    let text = format!("tau*dt + xi*dx + eta1*u*du + ({a})*dA + ({b})*dB + ({c})*dC");
    VectorField::parse(&text, &LINEAR, &env).unwrap()
}

/// The generator as printed, and with the three coefficient fixes.
fn c10_cross_class() -> (Outcome, Outcome) {
    let cls = classes::linear();
    let run = |a: &str, b: &str, c: &str| -> Outcome {
        let r =
            equiv_invariance_check(&linear_generator(a, b, c), &cls).map_err(|e| e.to_string())?;
        let names: Vec<&str> = r.residuals.iter().map(|(k, _)| k.as_str()).collect();
        ensure(r.holds, || format!("residuals in {}", names.join(", ")))
    };
    let printed = run(
        "2*Diff(xi,x) - Diff(tau,t)",
        "(Diff(xi,x) - Diff(tau,t))*B - 2*Diff(eta1,x)*A - Diff(xi,t)",
        "Diff(eta1,t) - A*Diff(eta1,x,x) - B*Diff(eta1,x) - C*Diff(xi,t)",
    );
    let corrected = run(
        "(2*Diff(xi,x) - Diff(tau,t))*A",
        "(Diff(xi,x) - Diff(tau,t))*B - 2*Diff(eta1,x)*A - Diff(xi,t) + A*Diff(xi,x,x)",
        "Diff(eta1,t) - A*Diff(eta1,x,x) - B*Diff(eta1,x) - C*Diff(tau,t)",
    );
    (printed, corrected)
}

/// The bracket as printed, and as computed.
fn c11_commutator() -> (Outcome, Outcome) {
    let span = ["dt", "dx", "2*t*dt + x*dx"].map(base_field);
    let g1 = [
        "dt",
        "dx",
        "2*t*dt + x*dx",
        "4*t*dt + 3*u*du",
        "x^2*dx - 3*x*u*du",
    ]
    .map(base_field);
    let check = |want: &str| -> Outcome {
        let r = base_field("dx")
            .commutator(&base_field("x^2*dx - 3*x*u*du"))
            .map_err(|e| e.to_string())?;
        ensure(r == base_field(want), || format!("bracket is {r}"))?;
        ensure(!r.in_span(&span).map_err(|e| e.to_string())?, || {
            "bracket lies in the span".into()
        })?;
        ensure(r.in_span(&g1).map_err(|e| e.to_string())?, || {
            "bracket leaves the invariance algebra".into()
        })
    };
    (check("2*x*dx - 3*x*u*du"), check("2*x*dx - 3*u*du"))
}

fn line(n: u32, title: &str, r: &Outcome) {
    match r {
        Ok(()) => println!("criterion {n:>2} PASS  {title}"),
        Err(e) => println!("criterion {n:>2} FAIL  {title}: {e}"),
    }
}

#[test]
fn acceptance() {
    set_oracle_defaults(SEED, ORACLE_TOL);
    let start = Instant::now();
    let plain: [Criterion; 9] = [
        (1, "determining system", c1_determining_system),
        (2, "kernel", c2_kernel),
        (3, "equivalence algebra", c3_equivalence_algebra),
        (4, "equivalence group", c4_equivalence_group),
        (5, "Burgers linearization", c5_burgers),
        (6, "algebra structure", c6_algebra_structure),
        (7, "optimal lists", c7_optimal_lists),
        (8, "appropriateness", c8_appropriateness),
        (9, "tables", c9_tables),
    ];
    let mut failed = Vec::new();
    for (n, title, f) in plain {
        let r = f();
        line(n, title, &r);
        if r.is_err() {
            failed.push(n);
        }
    }
    let (printed, corrected) = c10_cross_class();
    line(10, "linear class, generator as printed", &printed);
    line(10, "linear class, corrected generator", &corrected);
    println!("             criterion 10 is a known deviation: the printed generator is inconsistent; see the README");
    let (printed11, computed11) = c11_commutator();
    line(11, "diffusion commutator, value as printed", &printed11);
    line(11, "diffusion commutator, computed value", &computed11);
    println!("             criterion 11 is a known deviation: the printed bracket carries a stray factor x; see the README");
    println!("elapsed {:.1}s", start.elapsed().as_secs_f64());

    assert!(failed.is_empty(), "failing criteria: {failed:?}");
    assert!(
        printed.is_err(),
        "the printed linear-class generator unexpectedly passes"
    );
    assert!(
        corrected.is_ok(),
        "corrected linear-class generator: {corrected:?}"
    );
    assert!(
        printed11.is_err(),
        "the printed bracket unexpectedly matches"
    );
    assert!(computed11.is_ok(), "computed bracket: {computed11:?}");
}
