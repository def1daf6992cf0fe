//! Infinitesimal invariance of a class under a field acting on variables
//! and arbitrary elements.

use crate::expr::{collect, Expr, Oracle};
use crate::fields::{prolong, VectorField};
use crate::jet::{EquationClass, JetSpace};

use super::reduce::{freeze, frozen_symbols};
use super::VerifyError;

#[derive(Debug, Clone)]
pub struct EquivReport {
    pub holds: bool,
    /// Failing coefficients, labelled by condition, jet monomial and the
    /// monomial in the arbitrary elements.
    pub residuals: Vec<(String, Expr)>,
}

/// Coefficients of `e` by monomials in the frozen element symbols, or
/// `e` itself when it is not polynomial in them.
fn pieces(e: &Expr, syms: &[String]) -> Vec<(String, Expr)> {
    let present: Vec<&str> = syms
        .iter()
        .map(String::as_str)
        .filter(|s| e.contains_symbol(s))
        .collect();
    match collect(e, &present) {
        Ok(parts) => parts.into_iter().map(|(m, c)| (m.to_string(), c)).collect(),
        Err(_) => vec![("*".into(), e.clone())],
    }
}

/// Check `Ỹ Δ = 0` on the manifold and the prolonged auxiliary
/// conditions, splitting by jets and by the arbitrary elements with their
/// first derivatives treated as independent.
pub fn equiv_invariance_check(
    y: &VectorField,
    cls: &EquationClass,
) -> Result<EquivReport, VerifyError> {
    let oracle = Oracle::default();
    let syms = frozen_symbols(cls);
    let pf = prolong(y, cls)?;
    let delta = freeze(&cls.delta, cls);
    let applied = pf
        .apply(&delta)?
        .subs(&cls.solved_for, &freeze(&cls.rhs, cls));
    let mut residuals = Vec::new();
    for (m, c) in JetSpace::new().split(&applied)?.equations {
        for (k, piece) in pieces(&c, &syms) {
            if !oracle.is_zero(&piece).holds() {
                residuals.push((format!("delta [{m}] [{k}]"), piece));
            }
        }
    }
    for (a, e) in &pf.aux {
        for (k, piece) in pieces(e, &syms) {
            if !oracle.is_zero(&piece).holds() {
                residuals.push((format!("{}_{} [{k}]", a.element, a.variable), piece));
            }
        }
    }
    Ok(EquivReport {
        holds: residuals.is_empty(),
        residuals,
    })
}
