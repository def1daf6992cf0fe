//! Determining equations of Lie symmetries for a class of equations.

use crate::expr::{Bindings, Expr, FunctionSignature, Monomial, Oracle};
use crate::fields::{prolong, VectorField};
use crate::jet::{DeterminingSystem, EquationClass, JetSpace};

use super::reduce::{kill, rule_for, single_unknown, Vanishing};
use super::VerifyError;

/// `τ(t,x,u)∂_t + ξ(t,x,u)∂_x + η(t,x,u)∂_u` with undeclared coefficients.
pub fn generic_ansatz() -> VectorField {
    let sig = |n: &str| FunctionSignature::new(n, &["t", "x", "u"]).apply();
    VectorField::base()
        .with("t", sig("tau"))
        .with("x", sig("xi"))
        .with("u", sig("eta"))
}

/// Unknown functions of an ansatz: functions in its coefficients that are
/// not arbitrary elements of the class.
fn unknowns(ansatz: &VectorField, cls: &EquationClass) -> Vec<FunctionSignature> {
    let mut out: Vec<FunctionSignature> = Vec::new();
    for c in ansatz.coords() {
        for sig in ansatz.coeff(c).functions().into_values() {
            if cls.element(&sig.name).is_none() && !out.contains(&sig) {
                out.push(sig);
            }
        }
    }
    out
}

fn weight(m: &Monomial) -> usize {
    m.0.iter()
        .map(|(s, k)| JetSpace::order(s) * *k as usize)
        .sum()
}

fn by_weight(a: &Monomial, b: &Monomial) -> std::cmp::Ordering {
    weight(b).cmp(&weight(a)).then(b.degree().cmp(&a.degree()))
}

/// Flip the sign so that the first term involving a `t`-derivative of an
/// unknown has a positive coefficient.
fn orient(e: &Expr, unknowns: &[&str]) -> Expr {
    let has_t = |t: &Expr| {
        let mut hit = false;
        t.visit(&mut |n| {
            if let Expr::Func(fa) = n {
                if unknowns.contains(&&*fa.name) && fa.wrt_names().iter().any(|w| &**w == "t") {
                    hit = true;
                }
            }
        });
        hit
    };
    match e.terms().iter().find(|t| has_t(t)) {
        Some(t) if t.coefficient() < num_traits::Zero::zero() => -e.clone(),
        _ => e.clone(),
    }
}

/// Result of the symmetry computation: the split system together with
/// the vanishing derivatives recorded as consequences.
#[derive(Debug, Clone)]
pub struct Derivation {
    pub system: DeterminingSystem,
    /// Number of leading equations of `system` that are consequences of
    /// the form `unknown derivative = 0`.
    pub consequences: usize,
    pub rules: Vec<Vanishing>,
    pub unknowns: Vec<FunctionSignature>,
}

impl Derivation {
    /// The classifying equations, i.e. those after the consequences.
    pub fn classifying(&self) -> &[(Monomial, Expr)] {
        &self.system.equations[self.consequences..]
    }
}

/// Raw condition `Q⁽²⁾Δ` restricted to the equation manifold.
pub fn invariance_condition(cls: &EquationClass, q: &VectorField) -> Result<Expr, VerifyError> {
    let pf = prolong(q, cls)?;
    Ok(cls.on_manifold(&pf.apply(&cls.delta)?))
}

/// Prolong, apply to `Δ`, restrict to the manifold and split; then pull
/// out equations that force a single derivative of an unknown to vanish
/// and reduce the rest by them until nothing new appears.
pub fn derive(cls: &EquationClass, ansatz: &VectorField) -> Result<Derivation, VerifyError> {
    let unknown_sigs = unknowns(ansatz, cls);
    if unknown_sigs.is_empty() {
        return Err(VerifyError::EmptyAnsatz);
    }
    let names: Vec<&str> = unknown_sigs.iter().map(|s| &*s.name).collect();
    let js = JetSpace::new();
    let raw = js.split(&invariance_condition(cls, ansatz)?)?;
    let mut eqs = raw.equations;
    let mut rules: Vec<Vanishing> = Vec::new();
    let mut head: Vec<(Monomial, Expr)> = Vec::new();
    loop {
        let mut round: Vec<(Monomial, Expr)> = Vec::new();
        for (m, c) in &eqs {
            if let Some(u) = single_unknown(c, &names, &cls.nonvanishing) {
                if !round.iter().any(|(_, v)| *v == u) {
                    round.push((m.clone(), u));
                }
            }
        }
        if round.is_empty() {
            break;
        }
        round.sort_by(|a, b| by_weight(&a.0, &b.0));
        rules.extend(round.iter().filter_map(|(_, u)| rule_for(u)));
        head.extend(round);
        eqs = eqs
            .into_iter()
            .map(|(m, c)| (m, kill(&c, &rules)))
            .filter(|(_, c)| !c.is_zero())
            .collect();
    }
    eqs.sort_by(|a, b| by_weight(&a.0, &b.0));
    let consequences = head.len();
    let equations = head
        .into_iter()
        .chain(eqs.into_iter().map(|(m, c)| (m, orient(&c, &names))))
        .collect();
    Ok(Derivation {
        system: DeterminingSystem { equations },
        consequences,
        rules,
        unknowns: unknown_sigs,
    })
}

pub fn determining_system(
    cls: &EquationClass,
    ansatz: &VectorField,
) -> Result<DeterminingSystem, VerifyError> {
    Ok(derive(cls, ansatz)?.system)
}

/// Residuals of the invariance condition for a concrete field and a
/// concrete member `(f0, g0)` of the class (or the class itself when it has
/// no arbitrary elements). Empty when `q` is a symmetry.
pub fn symmetry_residuals(
    cls: &EquationClass,
    values: &[(&str, &Expr)],
    q: &VectorField,
    oracle: &Oracle,
) -> Result<Vec<(String, Expr)>, VerifyError> {
    let mut b = Bindings::new();
    for (name, v) in values {
        let sig = cls
            .element(name)
            .ok_or_else(|| VerifyError::UnknownElement(name.to_string()))?;
        let params: Vec<&str> = sig.params.iter().map(|p| &**p).collect();
        b = b.func(name, &params, (*v).clone());
    }
    let instance = EquationClass {
        delta: b.apply_unchecked(&cls.delta),
        rhs: b.apply_unchecked(&cls.rhs),
        ..cls.clone()
    };
    let cond = invariance_condition(&instance, q)?;
    let split = JetSpace::new().split(&cond)?;
    Ok(split
        .equations
        .into_iter()
        .filter(|(_, c)| !oracle.is_zero(c).holds())
        .map(|(m, c)| (m.to_string(), c))
        .collect())
}
