//! Invariant surface conditions of subalgebras of the equivalence algebra.

use crate::classify::Element;
use crate::expr::{Bindings, Expr, Oracle};

use super::VerifyError;

/// `ξ f_x + η f_u − φ` and `ξ g_x + η g_u − θ` for one element, with `f`,
/// `g` left as the unknowns `f(x,u)`, `g(x,u)`.
#[derive(Debug, Clone, PartialEq)]
pub struct IscPair {
    pub element: Element,
    pub f: Expr,
    pub g: Expr,
}

fn condition(xi: &Expr, eta: &Expr, rhs: &Expr, unknown: &Expr) -> Expr {
    xi * &unknown.diff("x") + eta * &unknown.diff("u") - rhs.clone()
}

/// Residuals of the conditions with `f`, `g` replaced by the given functions.
fn residuals(e: &Element, f0: &Expr, g0: &Expr) -> (Expr, Expr) {
    let v = e.to_field();
    let b = Bindings::new().sym("f", f0.clone()).sym("g", g0.clone());
    let phi = b.apply_unchecked(&v.coeff("f"));
    let theta = b.apply_unchecked(&v.coeff("g"));
    (
        condition(&v.coeff("x"), &v.coeff("u"), &phi, f0),
        condition(&v.coeff("x"), &v.coeff("u"), &theta, g0),
    )
}

pub fn isc_system(s: &[Element]) -> Vec<IscPair> {
    let env = crate::jet::classes::gen_diff();
    let f = env.element("f").expect("class declares f").apply();
    let g = env.element("g").expect("class declares g").apply();
    s.iter()
        .map(|e| {
            let (rf, rg) = residuals(e, &f, &g);
            IscPair {
                element: e.clone(),
                f: rf,
                g: rg,
            }
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq)]
pub struct IscReport {
    pub holds: bool,
    /// Conditions that fail, labeled by element and component.
    pub residuals: Vec<(String, Expr)>,
}

/// Whether `(f0, g0)` solves the invariant surface conditions of every
/// element of `s`.
pub fn isc_check(s: &[Element], f0: &Expr, g0: &Expr) -> Result<IscReport, VerifyError> {
    let oracle = Oracle::default();
    if oracle.is_zero(g0).holds() {
        return Err(VerifyError::VanishingG);
    }
    let mut failing = Vec::new();
    for e in s {
        let (rf, rg) = residuals(e, f0, g0);
        for (name, r) in [("f", rf), ("g", rg)] {
            if !oracle.is_zero(&r).holds() {
                failing.push((format!("{e}: {name}"), r));
            }
        }
    }
    Ok(IscReport {
        holds: failing.is_empty(),
        residuals: failing,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::expr::{parse, Env};

    fn el(s: &str) -> Element {
        Element::parse(s).unwrap()
    }

    fn p(s: &str) -> Expr {
        let env = Env::new()
            .with("ft", &["w"])
            .with("gt", &["w"])
            .with("f", &["x", "u"])
            .with("g", &["x", "u"]);
        parse(s, &env).unwrap()
    }

    #[test]
    fn translation_in_u() {
        let sys = isc_system(&[el("G(1)")]);
        assert_eq!(sys[0].f, p("Diff(f,u)"));
        assert_eq!(sys[0].g, p("Diff(g,u)"));
    }

    #[test]
    fn scaling_in_x() {
        let sys = isc_system(&[el("Dx")]);
        assert_eq!(sys[0].g, p("x*Diff(g,x) - 2*g"));
    }

    #[test]
    fn scaling_in_t_kills_g() {
        let sys = isc_system(&[el("Dt")]);
        assert_eq!(sys[0].g, p("g"));
    }

    #[test]
    fn candidates() {
        assert!(
            isc_check(&[el("G(1)")], &p("ft(x)"), &p("gt(x)"))
                .unwrap()
                .holds
        );
        assert!(
            isc_check(&[el("G(1)"), el("G(u)")], &p("0"), &p("gt(x)"))
                .unwrap()
                .holds
        );
        let three = [el("Dx + G(2)"), el("dx"), el("Dt - G(1)")];
        assert!(
            isc_check(&three, &p("c*exp(u)"), &p("exp(u)"))
                .unwrap()
                .holds
        );
        let r = isc_check(&[el("dx")], &p("x"), &p("1")).unwrap();
        assert!(!r.holds && r.residuals.len() == 1);
        assert!(matches!(
            isc_check(&[el("dx")], &p("1"), &p("0")),
            Err(VerifyError::VanishingG)
        ));
    }
}
