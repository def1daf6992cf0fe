//! Direct-method determining equations for point transformations
//! `t̃ = T(t)`, `x̃ = X(t,x)`, `ũ = U(t,x,u)` between members of a class
//! of the form `u_t = f u_x² + g u_xx`.

use crate::expr::{collect, Expr, FunctionSignature, Monomial};
use crate::jet::{DeterminingSystem, EquationClass, JetSpace};

use super::reduce::{eliminate, kill, single_unknown};
use super::VerifyError;

pub const F_NEW: &str = "ftilde";
pub const G_NEW: &str = "gtilde";

pub fn big_t() -> Expr {
    FunctionSignature::new("T", &["t"]).apply()
}

pub fn big_x() -> Expr {
    FunctionSignature::new("X", &["t", "x"]).apply()
}

pub fn big_u() -> Expr {
    FunctionSignature::new("U", &["t", "x", "u"]).apply()
}

#[derive(Debug, Clone)]
pub struct AdmissibleSystem {
    /// Coefficients of `u_xx`, `u_x²`, `u_x`, `1`, in that order.
    pub equations: DeterminingSystem,
    /// Derivatives of `T`, `X`, `U` forced to vanish.
    pub constraints: Vec<Expr>,
    /// `g̃` solved from the `u_xx` equation.
    pub g_rule: Expr,
    /// `f̃` solved from the `u_x²` equation after inserting `g_rule`.
    pub f_rule: Expr,
    pub unresolved: Vec<Expr>,
}

fn nonvanishing() -> Vec<Expr> {
    vec![big_t().diff("t"), big_x().diff("x"), big_u().diff("u")]
}

/// Solve `α + β·v = 0` for `v`.
fn solve_linear(e: &Expr, v: &str) -> Result<Expr, VerifyError> {
    let parts = collect(e, &[v])?;
    let (mut alpha, mut beta) = (Expr::zero(), Expr::zero());
    for (m, c) in parts {
        match m.exponent(v) {
            0 => alpha = c,
            1 => beta = c,
            _ => {
                return Err(VerifyError::Database(format!(
                    "equation is not linear in {v}"
                )))
            }
        }
    }
    if beta.is_zero() {
        return Err(VerifyError::Database(format!(
            "equation does not involve {v}"
        )));
    }
    Ok(-alpha / beta)
}

/// Substitute the transformed derivatives, restrict to the manifold, split
/// by `u_xx, u_x², u_x, 1`; then split the last two with respect to `f̃`,
/// `g̃` and differentiate the `g̃` rule in `t`.
pub fn admissible_split(cls: &EquationClass) -> Result<AdmissibleSystem, VerifyError> {
    let js = JetSpace::new();
    let (t, x, u) = (big_t(), big_x(), big_u());
    let (tt, xt, xx) = (t.diff("t"), x.diff("t"), x.diff("x"));
    let dxu = js.total_derivative(&u, "x")?;
    let dtu = js.total_derivative(&u, "t")?;
    let u_t = (&dtu - &(&xt / &xx) * &dxu) / &tt;
    let u_x = &dxu / &xx;
    let u_xx = js.total_derivative(&u_x, "x")? / &xx;
    let transformed = &u_t - &(Expr::sym(F_NEW) * &u_x * &u_x) - Expr::sym(G_NEW) * &u_xx;
    let e = cls.on_manifold(&transformed);

    let split = js.split(&e)?;
    let order = ["u_xx", "u_x^2", "u_x", "1"];
    let mut equations = Vec::new();
    for label in order {
        let (m, c) = split
            .equations
            .iter()
            .find(|(m, _)| m.to_string() == label)
            .cloned()
            .unwrap_or_else(|| (label_monomial(label), Expr::zero()));
        equations.push((m, c));
    }
    if let Some((m, _)) = split
        .equations
        .iter()
        .find(|(m, _)| !order.contains(&m.to_string().as_str()))
    {
        return Err(VerifyError::Database(format!(
            "unexpected jet monomial {m}"
        )));
    }

    let mut pieces = Vec::new();
    for (_, c) in &equations[2..] {
        for (_, k) in collect(c, &[F_NEW, G_NEW])? {
            pieces.push(k);
        }
    }
    let unknowns = ["T", "X", "U"];
    let nv = nonvanishing();
    let (mut constraints, rules, unresolved) = eliminate(&pieces, &unknowns, &nv);

    let g_rule = solve_linear(&equations[0].1, G_NEW)?;
    let f_rule = solve_linear(&equations[1].1.subs(G_NEW, &g_rule), F_NEW)?;

    // g̃(X,U) has vanishing t-derivative once X_t = U_t = 0.
    let mut nv_g = nv.clone();
    nv_g.extend(cls.nonvanishing.iter().cloned());
    if let Some(k) = single_unknown(&kill(&g_rule.diff("t"), &rules), &unknowns, &nv_g) {
        constraints.push(k);
    }
    Ok(AdmissibleSystem {
        equations: DeterminingSystem { equations },
        constraints,
        g_rule,
        f_rule,
        unresolved,
    })
}

fn label_monomial(label: &str) -> Monomial {
    match label {
        "1" => Monomial::one(),
        "u_x^2" => Monomial(vec![("u_x".into(), 2)]),
        other => Monomial(vec![(other.into(), 1)]),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::expr::{parse, Env, Oracle};
    use crate::jet::classes;

    fn env() -> Env {
        Env::new()
            .with("T", &["t"])
            .with("X", &["t", "x"])
            .with("U", &["t", "x", "u"])
            .with("f", &["x", "u"])
            .with("g", &["x", "u"])
    }

    fn p(s: &str) -> Expr {
        parse(s, &env()).unwrap()
    }

    #[test]
    fn split_yields_the_equivalence_constraints() {
        let s = admissible_split(&classes::gen_diff()).unwrap();
        let want = [
            "Diff(X,t)",
            "Diff(X,x,x)",
            "Diff(U,x)",
            "Diff(U,t)",
            "Diff(T,t,t)",
        ]
        .map(p);
        assert_eq!(s.constraints.len(), 5, "{:?}", s.constraints);
        assert!(want.iter().all(|w| s.constraints.contains(w)));
        assert!(s.unresolved.is_empty());
    }

    #[test]
    fn transformation_rules() {
        let s = admissible_split(&classes::gen_diff()).unwrap();
        let o = Oracle::default();
        assert!(o.equal(&s.g_rule, &p("Diff(X,x)^2*g/Diff(T,t)")).holds());
        let f = p("Diff(X,x)^2*f/(Diff(T,t)*Diff(U,u)) - Diff(X,x)^2*Diff(U,u,u)*g/(Diff(T,t)*Diff(U,u)^2)");
        assert!(o.equal(&s.f_rule, &f).holds());
    }
}
