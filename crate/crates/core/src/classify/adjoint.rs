use num_bigint::BigInt;

use crate::expr::{eval_numeric, Assignment, Expr, Rational};
use crate::fields::{EquivTransform, PointTransformation, EXTENDED};

use super::catalog::{flow, numeric_flow};
use super::{ClassifyError, Element};

#[derive(Debug, Clone, PartialEq)]
pub struct SeriesResult {
    pub value: Element,
    /// The bracket following the last retained term vanishes.
    pub terminated: bool,
}

/// Partial sum `Σ_{n ≤ order} εⁿ/n! {vⁿ, w}` of `Ad(e^{εv})w` with
/// `{v⁰, w} = w` and `{vⁿ, w} = [{vⁿ⁻¹, w}, v]`.
pub fn adjoint_series(v: &Element, w: &Element, eps: &Expr, order: usize) -> SeriesResult {
    let mut term = w.clone();
    let mut value = w.clone();
    let mut fact = BigInt::from(1);
    for n in 1..=order {
        term = term.bracket(v);
        if term.is_zero() {
            return SeriesResult {
                value,
                terminated: true,
            };
        }
        fact *= n;
        let k = Expr::pow(eps.clone(), Expr::int(n as i64))
            * Expr::rational(Rational::new(1.into(), fact.clone()));
        value = value.add(&term.scale(&k));
    }
    let terminated = term.bracket(v).is_zero();
    SeriesResult { value, terminated }
}

/// Closed form of `Ad(e^{εv})w` for `v` a multiple of one generator.
pub fn adjoint_closed(v: &Element, w: &Element, eps: &Expr) -> Result<Element, ClassifyError> {
    let parts = [&v.a0, &v.a1, &v.a2, &v.a3];
    let nonzero: Vec<usize> = (0..4).filter(|&i| !parts[i].is_zero()).collect();
    let mut out = w.clone();
    match (nonzero.as_slice(), v.h.is_zero()) {
        ([], false) => {
            let back = -eps.clone();
            let big_h =
                flow(&v.h, &back).ok_or_else(|| ClassifyError::OutsideCatalog(v.h.to_string()))?;
            out.h = w.h.subs("u", &big_h) / big_h.diff("u");
        }
        ([i], true) => {
            let s = parts[*i] * eps;
            match i {
                // ∂_t: D^t ↦ D^t − ε∂_t
                0 => out.a0 = &w.a0 - &(&s * &w.a2),
                // D^x: ∂_x ↦ e^ε ∂_x
                1 => out.a3 = &w.a3 * &Expr::exp(s),
                // D^t: ∂_t ↦ e^ε ∂_t
                2 => out.a0 = &w.a0 * &Expr::exp(s),
                // ∂_x: D^x ↦ D^x − ε∂_x
                _ => out.a3 = &w.a3 - &(&s * &w.a1),
            }
        }
        ([], true) => {}
        _ => {
            return Err(ClassifyError::Unexpected(format!(
                "{v} is not a multiple of a single generator"
            )))
        }
    }
    Ok(out)
}

/// Time-`s` map of `G(h)` on `(t, x, u, f, g)`, with the inverse given by
/// the time-`(-s)` map.
fn g_flow_map(h: &Expr, s: &Expr) -> Result<PointTransformation, ClassifyError> {
    let rules = |s: &Expr| -> Result<Vec<(&'static str, Expr)>, ClassifyError> {
        let big_h = flow(h, s).ok_or_else(|| ClassifyError::OutsideCatalog(h.to_string()))?;
        let hu = big_h.diff("u");
        let huu = hu.diff("u");
        let (f, g) = (Expr::sym("f"), Expr::sym("g"));
        let ft = (&f - &(&huu / &hu * &g)) / hu;
        Ok(vec![("u", big_h), ("f", ft), ("g", g)])
    };
    Ok(PointTransformation::new(
        &EXTENDED,
        &rules(s)?,
        Some(&rules(&-s.clone())?),
    ))
}

/// `Ad(e^{εv})w` as the push-forward of `w` by the one-parameter group of
/// `v`, realized on `(t, x, u, f, g)`.
pub fn adjoint_pushforward(v: &Element, w: &Element, eps: &Expr) -> Result<Element, ClassifyError> {
    let parts = [&v.a0, &v.a1, &v.a2, &v.a3];
    let nonzero: Vec<usize> = (0..4).filter(|&i| !parts[i].is_zero()).collect();
    let map = match (nonzero.as_slice(), v.h.is_zero()) {
        ([], true) => return Ok(w.clone()),
        ([], false) => g_flow_map(&v.h, eps)?,
        ([i], true) => {
            let s = parts[*i] * eps;
            match i {
                0 => EquivTransform::translate_t(s),
                1 => EquivTransform::scale_x(Expr::exp(s)),
                2 => EquivTransform::scale_t(Expr::exp(s)),
                _ => EquivTransform::translate_x(s),
            }
            .to_point()
        }
        _ => {
            return Err(ClassifyError::Unexpected(format!(
                "{v} is not a multiple of a single generator"
            )))
        }
    };
    let pushed = map.pushforward(&w.to_field())?;
    Element::from_field(&pushed)
        .ok_or_else(|| ClassifyError::Unexpected(format!("{pushed} leaves the algebra")))
}

/// `h̃²(u) = h²(H¹(u, −ε)) / H¹_u(u, −ε)` with the flow integrated numerically.
pub fn adjoint_numeric(h1: &Expr, h2: &Expr, eps: f64, u: f64) -> Result<f64, ClassifyError> {
    let (big_h, jac) = numeric_flow(h1, u, -eps)?;
    let v =
        eval_numeric(h2, &Assignment::new().set("u", big_h)).map_err(|_| ClassifyError::Flow)?;
    Ok(v / jac)
}
