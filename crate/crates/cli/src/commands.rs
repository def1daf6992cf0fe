use std::collections::BTreeMap;
use std::fmt::{self, Display, Write as _};
use std::path::Path;

use serde::Deserialize;
use serde_json::{json, Value};

use lieprelim::classify::{
    adjoint_closed, adjoint_pushforward, adjoint_series, appropriateness, is_closed, normalize,
    Element,
};
use lieprelim::expr::{parse, to_latex, Env, Expr, Oracle};
use lieprelim::fields::{EquivTransform, UMap, VectorField, BASE};
use lieprelim::jet::{classes, DeterminingSystem, EquationClass};
use lieprelim::verify::{
    admissible_split, derive as derive_system, equiv_invariance_check, generic_ansatz,
    kernel_conditions, parse_table_selector, symmetry_residuals, verify_tables, Mode, RowDatabase,
    VerificationReport, VerifyError,
};

use crate::Format;

#[derive(Debug)]
pub enum Failure {
    /// Malformed input: exit code 2.
    Input(String),
    /// The input is not a subalgebra: exit code 3.
    Structural(String),
    /// A computation could not be carried out: exit code 1.
    Compute(String),
}

impl Failure {
    pub fn code(&self) -> u8 {
        match self {
            Failure::Compute(_) => 1,
            Failure::Input(_) => 2,
            Failure::Structural(_) => 3,
        }
    }
}

impl Display for Failure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Failure::Input(m) | Failure::Structural(m) | Failure::Compute(m) => f.write_str(m),
        }
    }
}

fn input(e: impl Display) -> Failure {
    Failure::Input(e.to_string())
}

fn compute(e: impl Display) -> Failure {
    Failure::Compute(e.to_string())
}

pub struct Outcome {
    pub text: String,
    pub pass: bool,
}

fn emit(
    fmt: Format,
    pass: bool,
    text: String,
    latex: impl FnOnce() -> String,
    json: impl FnOnce() -> Value,
) -> Outcome {
    let text = match fmt {
        Format::Text => text,
        Format::Latex => latex(),
        Format::Json => format!("{:#}\n", json()),
    };
    Outcome { text, pass }
}

fn status(pass: bool) -> &'static str {
    if pass {
        "PASS"
    } else {
        "FAIL"
    }
}

fn load_class(name: &str) -> Result<EquationClass, Failure> {
    let path = Path::new(name);
    if path.exists() {
        EquationClass::from_path(path).map_err(|e| input(format!("{name}: {e}")))
    } else {
        classes::by_name(name).map_err(input)
    }
}

/// `name:arg,arg` declarations added to `env`.
fn declare(mut env: Env, decls: &[String]) -> Result<Env, Failure> {
    for d in decls {
        let (name, args) = d
            .split_once(':')
            .ok_or_else(|| input(format!("declaration `{d}` is not of the form name:args")))?;
        let args: Vec<&str> = args
            .split(',')
            .map(str::trim)
            .filter(|a| !a.is_empty())
            .collect();
        env = env.with(name.trim(), &args);
    }
    Ok(env)
}

fn parse_expr(text: &str, env: &Env) -> Result<Expr, Failure> {
    parse(text, env).map_err(|e| input(format!("`{text}`: {e}")))
}

fn parse_element(text: &str) -> Result<Element, Failure> {
    Element::parse(text).map_err(|e| input(format!("`{text}`: {e}")))
}

fn field_latex(v: &VectorField) -> String {
    let parts: Vec<String> = v
        .coords()
        .into_iter()
        .filter_map(|c| {
            let k = v.coeff(c);
            if k.is_zero() {
                return None;
            }
            let d = format!("\\partial_{{{c}}}");
            Some(if k.is_one() {
                d
            } else if matches!(k, Expr::Add(_)) {
                format!("\\left({}\\right){d}", to_latex(&k))
            } else {
                format!("{}{d}", to_latex(&k))
            })
        })
        .collect();
    if parts.is_empty() {
        "0".into()
    } else {
        parts.join(" + ").replace("+ -", "- ")
    }
}

fn residual_json(rs: &[(String, Expr)]) -> Value {
    Value::Array(
        rs.iter()
            .map(|(k, e)| json!({"label": k, "residual": e.to_string()}))
            .collect(),
    )
}

fn system_json(s: &DeterminingSystem) -> Value {
    Value::Array(
        s.equations
            .iter()
            .map(|(m, e)| json!({"monomial": m.to_string(), "equation": e.to_string()}))
            .collect(),
    )
}

fn has_unknowns(q: &VectorField, cls: &EquationClass) -> bool {
    q.coords().into_iter().any(|c| {
        q.coeff(c)
            .functions()
            .into_values()
            .any(|s| cls.element(&s.name).is_none())
    })
}

pub fn derive(
    fmt: Format,
    class: &str,
    ansatz: Option<&str>,
    decls: &[String],
) -> Result<Outcome, Failure> {
    let cls = load_class(class)?;
    let q = match ansatz {
        None => generic_ansatz(),
        Some(a) => {
            let a = a.trim();
            let body = a
                .strip_prefix("Q")
                .map(str::trim_start)
                .and_then(|r| r.strip_prefix('='))
                .unwrap_or(a)
                .trim();
            if body.is_empty() {
                return Err(input("empty ansatz"));
            }
            let env = declare(cls.env.clone(), decls)?;
            let q =
                VectorField::parse(body, &BASE, &env).map_err(|e| input(format!("ansatz: {e}")))?;
            if q.is_zero() {
                return Err(input("empty ansatz: the field is zero"));
            }
            q
        }
    };
    if !has_unknowns(&q, &cls) {
        let rs = symmetry_residuals(&cls, &[], &q, &Oracle::default()).map_err(compute)?;
        let pass = rs.is_empty();
        let mut text = format!("{}: Q = {q}\n", cls.name);
        for (m, e) in &rs {
            writeln!(text, "  [{m}] {e}").unwrap();
        }
        writeln!(text, "{} ({} nonzero residuals)", status(pass), rs.len()).unwrap();
        let latex = || {
            let mut s = format!("Q = {}\\\\\n", field_latex(&q));
            for (m, e) in &rs {
                writeln!(s, "{m}\\colon\\ {} \\neq 0\\\\", to_latex(e)).unwrap();
            }
            s
        };
        let json = || json!({"class": cls.name, "field": q.to_string(), "pass": pass, "residuals": residual_json(&rs)});
        return Ok(emit(fmt, pass, text, latex, json));
    }
    let d = derive_system(&cls, &q).map_err(|e| match e {
        VerifyError::EmptyAnsatz => input("empty ansatz: no unknown coefficient functions"),
        other => compute(other),
    })?;
    let json = || {
        json!({
            "class": cls.name,
            "ansatz": q.to_string(),
            "consequences": d.consequences,
            "equations": system_json(&d.system),
        })
    };
    Ok(emit(
        fmt,
        true,
        d.system.to_text(),
        || d.system.to_latex(),
        json,
    ))
}

pub fn check_equiv(
    fmt: Format,
    class: &str,
    field: &str,
    decls: &[String],
) -> Result<Outcome, Failure> {
    let cls = load_class(class)?;
    // Arbitrary elements are coordinates here, not functions.
    let env = declare(Env::new(), decls)?;
    let mut coords: Vec<&str> = BASE.to_vec();
    coords.extend(cls.arbitrary_elements.iter().map(|s| &*s.name));
    let y = VectorField::parse(field, &coords, &env).map_err(|e| input(format!("field: {e}")))?;
    let r = equiv_invariance_check(&y, &cls).map_err(compute)?;
    let mut text = format!("{}: Y = {y}\n", cls.name);
    for (k, e) in &r.residuals {
        writeln!(text, "  {k}: {e}").unwrap();
    }
    writeln!(text, "{}", status(r.holds)).unwrap();
    let latex = || {
        let mut s = format!("Y = {}\\\\\n", field_latex(&y));
        for (k, e) in &r.residuals {
            writeln!(s, "\\text{{{k}}}\\colon\\ {} \\neq 0\\\\", to_latex(e)).unwrap();
        }
        s
    };
    let json = || json!({"class": cls.name, "field": y.to_string(), "pass": r.holds, "residuals": residual_json(&r.residuals)});
    Ok(emit(fmt, r.holds, text, latex, json))
}

pub fn transform(
    fmt: Format,
    f: &str,
    g: &str,
    params: [&str; 4],
    u_map: &str,
) -> Result<Outcome, Failure> {
    let env = Env::new();
    let [a0, a1, b0, b1] = params.map(|p| parse_expr(p, &env));
    let u_expr = parse_expr(u_map, &env)?;
    let u_map = UMap::from_expr(&u_expr).ok_or_else(|| {
        input(format!(
            "U(u) = {u_expr} is not affine, exp(k*u), u^p or ln(u)"
        ))
    })?;
    let tr = EquivTransform {
        a0: a0?,
        a1: a1?,
        b0: b0?,
        b1: b1?,
        u_map,
    };
    let (f0, g0) = (parse_expr(f, &env)?, parse_expr(g, &env)?);
    let (ft, gt) = tr.transform_class_element(&f0, &g0).map_err(input)?;
    let point = tr.to_point();
    let text = format!("{point}\nf~ = {ft}\ng~ = {gt}\n");
    let latex = || {
        format!(
            "\\tilde f = {}\\\\\n\\tilde g = {}\n",
            to_latex(&ft),
            to_latex(&gt)
        )
    };
    let json = || {
        json!({
            "transformation": point.to_string(),
            "f": f0.to_string(),
            "g": g0.to_string(),
            "f_tilde": ft.to_string(),
            "g_tilde": gt.to_string(),
        })
    };
    Ok(emit(fmt, true, text, latex, json))
}

pub fn commutator(
    fmt: Format,
    v: &str,
    w: &str,
    coords: &str,
    span: Option<&str>,
    decls: &[String],
) -> Result<Outcome, Failure> {
    let coords: Vec<&str> = coords
        .split(',')
        .map(str::trim)
        .filter(|c| !c.is_empty())
        .collect();
    let env = declare(Env::new(), decls)?;
    let field =
        |s: &str| VectorField::parse(s, &coords, &env).map_err(|e| input(format!("`{s}`: {e}")));
    let (v, w) = (field(v)?, field(w)?);
    let r = v.commutator(&w).map_err(input)?;
    let mut text = format!("[{v}, {w}] = {r}\n");
    let mut inside = None;
    if let Some(span) = span {
        let basis = span
            .split(';')
            .map(str::trim)
            .filter(|s| !s.is_empty())
            .map(field)
            .collect::<Result<Vec<_>, _>>()?;
        let yes = r.in_span(&basis).map_err(input)?;
        let names: Vec<String> = basis.iter().map(ToString::to_string).collect();
        writeln!(
            text,
            "in span <{}>: {}",
            names.join(", "),
            if yes { "yes" } else { "no" }
        )
        .unwrap();
        inside = Some(yes);
    }
    let latex = || {
        format!(
            "[{}, {}] = {}\n",
            field_latex(&v),
            field_latex(&w),
            field_latex(&r)
        )
    };
    let json = || json!({"v": v.to_string(), "w": w.to_string(), "bracket": r.to_string(), "in_span": inside});
    Ok(emit(fmt, true, text, latex, json))
}

fn same_element(a: &Element, b: &Element) -> bool {
    let d = a.sub(b);
    let o = Oracle::default();
    [&d.a0, &d.a1, &d.a2, &d.a3, &d.h]
        .iter()
        .all(|c| c.is_zero() || o.is_zero(c).holds())
}

pub fn adjoint(fmt: Format, v: &str, w: &str, eps: &str, order: usize) -> Result<Outcome, Failure> {
    let (v, w) = (parse_element(v)?, parse_element(w)?);
    let eps = parse_expr(eps, &Env::new())?;
    let series = adjoint_series(&v, &w, &eps, order);
    let closed = adjoint_closed(&v, &w, &eps);
    let pushed = adjoint_pushforward(&v, &w, &eps);
    let mut text = format!("Ad(exp({eps} {v})) {w}\n");
    let mut pass = true;
    let mut checks = BTreeMap::new();
    match &closed {
        Ok(c) => writeln!(text, "  closed form:  {c}").unwrap(),
        Err(e) => writeln!(text, "  closed form:  unavailable ({e})").unwrap(),
    }
    match &pushed {
        Ok(p) => writeln!(text, "  push-forward: {p}").unwrap(),
        Err(e) => writeln!(text, "  push-forward: unavailable ({e})").unwrap(),
    }
    let tail = if series.terminated {
        "terminates"
    } else {
        "truncated"
    };
    writeln!(text, "  series ({tail} at order {order}): {}", series.value).unwrap();
    if let (Ok(c), Ok(p)) = (&closed, &pushed) {
        let ok = same_element(c, p);
        pass &= ok;
        checks.insert("closed_vs_pushforward", ok);
        writeln!(text, "  closed form = push-forward: {}", status(ok)).unwrap();
    }
    if let (Ok(c), true) = (&closed, series.terminated) {
        let ok = same_element(c, &series.value);
        pass &= ok;
        checks.insert("closed_vs_series", ok);
        writeln!(text, "  closed form = series: {}", status(ok)).unwrap();
    }
    let latex = || {
        let value = closed
            .as_ref()
            .ok()
            .or(pushed.as_ref().ok())
            .unwrap_or(&series.value);
        format!(
            "\\mathrm{{Ad}}(e^{{{} v}})\\, w = {}\n",
            to_latex(&eps),
            field_latex(&value.to_field())
        )
    };
    let json = || {
        json!({
            "v": v.to_string(),
            "w": w.to_string(),
            "closed": closed.as_ref().map(ToString::to_string).ok(),
            "pushforward": pushed.as_ref().map(ToString::to_string).ok(),
            "series": series.value.to_string(),
            "series_terminated": series.terminated,
            "checks": checks,
        })
    };
    Ok(emit(fmt, pass, text, latex, json))
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ClassifyInput {
    basis: Vec<String>,
    f: Option<String>,
    g: Option<String>,
}

impl ClassifyInput {
    pub fn load(path: &Path) -> Result<Self, Failure> {
        let text =
            std::fs::read_to_string(path).map_err(|e| input(format!("{}: {e}", path.display())))?;
        serde_json::from_str(&text).map_err(|e| input(format!("{}: {e}", path.display())))
    }
}

pub fn classify(
    fmt: Format,
    file: Option<ClassifyInput>,
    mut basis: Vec<String>,
    mut f: Option<String>,
    mut g: Option<String>,
) -> Result<Outcome, Failure> {
    if let Some(file) = file {
        basis.extend(file.basis);
        f = f.or(file.f);
        g = g.or(file.g);
    }
    if basis.is_empty() {
        return Err(input("empty basis"));
    }
    let elems = basis
        .iter()
        .map(|s| parse_element(s))
        .collect::<Result<Vec<_>, _>>()?;
    if !is_closed(&elems).map_err(input)? {
        return Err(Failure::Structural(
            "basis is not closed under the commutator".into(),
        ));
    }
    let env = Env::new();
    let candidate = match (f, g) {
        (Some(f), Some(g)) => Some((parse_expr(&f, &env)?, parse_expr(&g, &env)?)),
        (None, None) => None,
        _ => return Err(input("--f and --g go together")),
    };
    let report =
        appropriateness(&elems, candidate.as_ref().map(|(f, g)| (f, g))).map_err(compute)?;
    let norm = if elems.len() <= 2 {
        Some(normalize(&elems))
    } else {
        None
    };

    let names: Vec<String> = elems.iter().map(ToString::to_string).collect();
    let mut text = format!("input: <{}>\n", names.join(", "));
    let mut pass = report.passes();
    let mut canonical = Value::Null;
    match &norm {
        Some(Ok(n)) => {
            let witness_ok = n.witness.verify(&n.canonical).is_ok();
            pass &= witness_ok;
            writeln!(text, "canonical: {}", n.canonical).unwrap();
            let params: Vec<String> = n
                .canonical
                .params
                .iter()
                .map(|(k, v)| format!("{k}={v}"))
                .collect();
            if !params.is_empty() {
                writeln!(text, "parameters: {}", params.join(", ")).unwrap();
            }
            for t in &n.trace {
                writeln!(text, "  case: {t}").unwrap();
            }
            for s in &n.witness.steps {
                writeln!(text, "  step: {s}").unwrap();
            }
            writeln!(text, "witness replay: {}", status(witness_ok)).unwrap();
            canonical = json!({
                "list_id": n.canonical.list_id.to_string(),
                "parameters": n.canonical.params.iter().map(|(k, v)| (k.clone(), v.to_string())).collect::<BTreeMap<_, _>>(),
                "basis": n.canonical.basis.iter().map(ToString::to_string).collect::<Vec<_>>(),
                "trace": n.trace,
                "witness": n.witness.steps.iter().map(ToString::to_string).collect::<Vec<_>>(),
                "witness_verified": witness_ok,
            });
        }
        Some(Err(e)) => writeln!(text, "canonical: not determined ({e})").unwrap(),
        None => writeln!(
            text,
            "canonical: only one- and two-dimensional inputs are normalized"
        )
        .unwrap(),
    }
    writeln!(
        text,
        "appropriateness: {} ({})",
        status(report.passes()),
        report.summary()
    )
    .unwrap();
    if let Some(c) = &report.candidate {
        for (k, e) in &c.residuals {
            writeln!(text, "  isc {k}: {e}").unwrap();
        }
    }
    let latex = || {
        let fields: Vec<String> = elems.iter().map(|e| field_latex(&e.to_field())).collect();
        let id = match &norm {
            Some(Ok(n)) => n.canonical.list_id.to_string(),
            _ => "--".into(),
        };
        format!(
            "\\langle {} \\rangle \\sim \\text{{{id}}},\\quad m_s = {}\n",
            fields.join(",\\ "),
            report.m_s
        )
    };
    let json = || {
        json!({
            "input": names,
            "canonical": canonical,
            "appropriateness": {
                "pass": report.passes(),
                "dim": report.dim,
                "m_s": report.m_s,
                "predicates": report.predicates(),
                "intersection": report.intersection.iter().map(ToString::to_string).collect::<Vec<_>>(),
                "intersection_pure_g": report.intersection_pure_g,
            },
        })
    };
    Ok(emit(fmt, pass, text, latex, json))
}

fn report_latex(r: &VerificationReport) -> String {
    let mut s = String::from(
        "\\begin{tabular}{llllll}\nTable & Case & $f$ & $g$ & Operators & Status\\\\\n\\hline\n",
    );
    for row in &r.rows {
        writeln!(
            s,
            "{} & {} & ${}$ & ${}$ & {} & {}\\\\",
            row.table,
            row.case,
            row.f,
            row.g,
            row.operators.join(", "),
            status(row.passes())
        )
        .unwrap();
    }
    s.push_str("\\end{tabular}\n");
    s
}

pub fn verify(fmt: Format, table: &str, uncorrected: bool) -> Result<Outcome, Failure> {
    let tables = parse_table_selector(table).map_err(input)?;
    let mode = if uncorrected {
        Mode::Uncorrected
    } else {
        Mode::Corrected
    };
    let db = RowDatabase::builtin();
    let r = verify_tables(&db, &tables, mode).map_err(|e| match e {
        VerifyError::Database(m) => input(format!("row database: {m}")),
        other => compute(other),
    })?;
    let pass = r.all_pass();
    let json = || serde_json::to_value(&r).expect("report serializes");
    Ok(emit(fmt, pass, r.to_text(), || report_latex(&r), json))
}

pub fn report(fmt: Format) -> Result<Outcome, Failure> {
    let cls = classes::gen_diff();
    let mut text = String::new();
    let mut sections = serde_json::Map::new();
    let mut pass = true;

    let d = derive_system(&cls, &generic_ansatz()).map_err(compute)?;
    writeln!(text, "determining equations\n{}", d.system.to_text()).unwrap();
    sections.insert("determining".into(), system_json(&d.system));

    let k = kernel_conditions(&cls).map_err(compute)?;
    let conds: Vec<String> = k.conditions.iter().map(ToString::to_string).collect();
    let dt_ok = k.admits(&VectorField::base().with("t", Expr::one()));
    pass &= dt_ok && k.unresolved.is_empty();
    writeln!(
        text,
        "kernel: {} = 0; dt admitted: {}\n",
        conds.join(", "),
        status(dt_ok)
    )
    .unwrap();
    sections.insert("kernel".into(), json!({"conditions": conds, "dt": dt_ok}));

    let h = lieprelim::FunctionSignature::new("h", &["u"]).apply();
    let mut equiv = serde_json::Map::new();
    writeln!(text, "equivalence algebra").unwrap();
    for e in [
        Element::dt(),
        Element::dx(),
        Element::big_dt(),
        Element::big_dx(),
        Element::g(h),
    ] {
        let y = e.to_field();
        let ok = equiv_invariance_check(&y, &cls).map_err(compute)?.holds;
        pass &= ok;
        writeln!(text, "  {} {e} = {y}", status(ok)).unwrap();
        equiv.insert(e.to_string(), json!(ok));
    }
    sections.insert("equivalence".into(), Value::Object(equiv));

    let a = admissible_split(&cls).map_err(compute)?;
    let cons: Vec<String> = a.constraints.iter().map(ToString::to_string).collect();
    writeln!(
        text,
        "\nadmissible transformations: {} = 0",
        cons.join(", ")
    )
    .unwrap();
    writeln!(text, "  g~ = {}\n  f~ = {}\n", a.g_rule, a.f_rule).unwrap();
    sections.insert(
        "admissible".into(),
        json!({"constraints": cons, "g": a.g_rule.to_string(), "f": a.f_rule.to_string()}),
    );

    let r = verify_tables(&RowDatabase::builtin(), &[1, 2, 3], Mode::Corrected).map_err(compute)?;
    pass &= r.all_pass();
    writeln!(
        text,
        "tables: {} rows, {} pass, {} fail",
        r.rows.len(),
        r.passed,
        r.failed
    )
    .unwrap();
    sections.insert(
        "tables".into(),
        json!({"rows": r.rows.len(), "passed": r.passed, "failed": r.failed}),
    );
    sections.insert("pass".into(), json!(pass));

    let latex = || {
        format!(
            "{}\nKernel: ${}$.\\\\\nTables: {} of {} rows verified.\n",
            d.system.to_latex(),
            k.conditions
                .iter()
                .map(|c| format!("{} = 0", to_latex(c)))
                .collect::<Vec<_>>()
                .join(",\\ "),
            r.passed,
            r.rows.len()
        )
    };
    Ok(emit(fmt, pass, text, latex, || Value::Object(sections)))
}
