//! Closed-form flows and straightening maps for the functions `h(u)` that
//! occur in the classification, with a fixed-step fallback integrator.

use crate::expr::{eval_numeric, Assignment, Expr};
use crate::fields::UMap;

use super::ClassifyError;

/// Recognized shapes of `h(u)`.
#[derive(Debug, Clone, PartialEq)]
pub enum HKind {
    Zero,
    Const(Expr),
    /// `a + b u`, `b ≠ 0`
    Affine {
        a: Expr,
        b: Expr,
    },
    /// `c exp(k u)`
    Exp {
        c: Expr,
        k: Expr,
    },
    /// `c u^p`, `p ∉ {0, 1}`
    Power {
        c: Expr,
        p: Expr,
    },
    Other,
}

fn u() -> Expr {
    Expr::sym("u")
}

pub fn h_kind(h: &Expr) -> HKind {
    if h.is_zero() {
        return HKind::Zero;
    }
    if !h.contains_symbol("u") {
        return HKind::Const(h.clone());
    }
    let hu = h.diff("u");
    if hu.diff("u").is_zero() {
        return HKind::Affine {
            a: h.subs("u", &Expr::zero()),
            b: hu,
        };
    }
    let k = &hu / h;
    if !k.contains_symbol("u") {
        let c = h * &Expr::exp(-(&k * &u()));
        if !c.contains_symbol("u") {
            return HKind::Exp { c, k };
        }
    }
    let p = &(&u() * &hu) / h;
    if !p.contains_symbol("u") {
        let c = h * &Expr::pow(u(), -p.clone());
        if !c.contains_symbol("u") {
            return HKind::Power { c, p };
        }
    }
    HKind::Other
}

fn is_negative(e: &Expr) -> bool {
    e.as_f64().map(|v| v < 0.0).unwrap_or(false)
}

/// `m·u` on `u > 0` when `m > 0`, otherwise `m·(u − 2)`, positive on `u < 2`.
fn positive_chart(m: Expr) -> UMap {
    if is_negative(&m) {
        UMap::Affine {
            shift: Expr::int(-2) * &m,
            scale: m,
        }
    } else {
        UMap::scale(m)
    }
}

/// A solution `Ũ` of `Ũ_u = h(Ũ)`. Pushing `G(h)` forward by the inverse
/// of `Ũ` gives `G(1)`.
pub fn straightener(h: &Expr) -> Option<UMap> {
    Some(match h_kind(h) {
        HKind::Zero | HKind::Other => return None,
        HKind::Const(c) => UMap::scale(c),
        HKind::Affine { a, b } => {
            // e^{bu}/|b| − a/b keeps Ũ + a/b positive
            let inv = Expr::one() / b.clone();
            let scale = if is_negative(&b) {
                -inv.clone()
            } else {
                inv.clone()
            };
            UMap::Compose(vec![
                UMap::Exp { rate: b.clone() },
                UMap::Affine {
                    shift: -(&a * &inv),
                    scale,
                },
            ])
        }
        HKind::Exp { c, k } => {
            let m = -(&k * &c);
            UMap::Compose(vec![
                positive_chart(m),
                UMap::Ln,
                UMap::scale(-(Expr::one() / k)),
            ])
        }
        HKind::Power { c, p } => {
            let q = Expr::one() - p;
            let s = &q * &c;
            UMap::Compose(vec![
                positive_chart(s),
                UMap::Power {
                    exponent: Expr::one() / q,
                },
            ])
        }
    })
}

/// Flow `H(u, s)` of `h(u)∂_u`: `H_s = h(H)`, `H(u, 0) = u`.
pub fn flow(h: &Expr, s: &Expr) -> Option<Expr> {
    let u = u();
    Some(match h_kind(h) {
        HKind::Zero => u,
        HKind::Const(c) => &u + &(&c * s),
        HKind::Affine { a, b } => {
            let r = &a / &b;
            &(&(&u + &r) * &Expr::exp(&b * s)) - &r
        }
        HKind::Exp { c, k } => {
            let inner = &Expr::exp(-(&k * &u)) - &(&(&k * &c) * s);
            -(Expr::ln(inner) / k)
        }
        HKind::Power { c, p } => {
            let q = Expr::one() - p;
            let inner = &Expr::pow(u.clone(), q.clone()) + &(&(&q * &c) * s);
            Expr::pow(inner, Expr::one() / q)
        }
        HKind::Other => return None,
    })
}

/// Step size of the fallback integrator.
pub const FLOW_STEP: f64 = 1e-3;

/// Integrate `H' = h(H)` together with `J' = h'(H) J` from `(u0, 1)` over
/// `[0, s]` by classical fourth-order Runge–Kutta. Returns `(H, ∂H/∂u)`.
pub fn numeric_flow(h: &Expr, u0: f64, s: f64) -> Result<(f64, f64), ClassifyError> {
    let hu = h.diff("u");
    let at = |e: &Expr, v: f64| -> Result<f64, ClassifyError> {
        eval_numeric(e, &Assignment::new().set("u", v)).map_err(|_| ClassifyError::Flow)
    };
    let rhs = |y: (f64, f64)| -> Result<(f64, f64), ClassifyError> {
        Ok((at(h, y.0)?, at(&hu, y.0)? * y.1))
    };
    let steps = ((s.abs() / FLOW_STEP).ceil() as usize).max(1);
    let dt = s / steps as f64;
    let mut y = (u0, 1.0);
    for _ in 0..steps {
        let k1 = rhs(y)?;
        let k2 = rhs((y.0 + 0.5 * dt * k1.0, y.1 + 0.5 * dt * k1.1))?;
        let k3 = rhs((y.0 + 0.5 * dt * k2.0, y.1 + 0.5 * dt * k2.1))?;
        let k4 = rhs((y.0 + dt * k3.0, y.1 + dt * k3.1))?;
        y.0 += dt / 6.0 * (k1.0 + 2.0 * k2.0 + 2.0 * k3.0 + k4.0);
        y.1 += dt / 6.0 * (k1.1 + 2.0 * k2.1 + 2.0 * k3.1 + k4.1);
    }
    Ok(y)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::expr::{parse, Env};

    fn p(s: &str) -> Expr {
        parse(s, &Env::new()).unwrap()
    }

    #[test]
    fn kinds() {
        assert_eq!(h_kind(&p("3")), HKind::Const(p("3")));
        assert_eq!(
            h_kind(&p("2 - u")),
            HKind::Affine {
                a: p("2"),
                b: p("-1")
            }
        );
        assert_eq!(
            h_kind(&p("3*exp(2*u)")),
            HKind::Exp {
                c: p("3"),
                k: p("2")
            }
        );
        assert_eq!(
            h_kind(&p("-u^(3/2)")),
            HKind::Power {
                c: p("-1"),
                p: p("3/2")
            }
        );
        assert_eq!(h_kind(&p("u*ln(u)")), HKind::Other);
    }

    #[test]
    fn straighteners_solve_their_equation() {
        for s in [
            "3",
            "-1/2",
            "2 - u",
            "u",
            "3*exp(2*u)",
            "-exp(u)",
            "u^2",
            "-2*u^(1/2)",
            "u^(-1)",
        ] {
            let h = p(s);
            let ut = straightener(&h).unwrap().expr();
            let residual = ut.diff("u") - h.subs("u", &ut);
            assert!(
                crate::expr::Oracle::default().is_zero(&residual).holds(),
                "{s}: {ut}"
            );
        }
    }

    #[test]
    fn flows_match_integrator() {
        for s in ["1", "2 - u", "exp(u)", "u^2", "-u^(1/2)"] {
            let h = p(s);
            let eps = p("eps");
            let big_h = flow(&h, &eps).unwrap();
            let hu = big_h.diff("u");
            for (u0, e) in [(0.5, 0.3), (0.8, -0.2)] {
                let a = Assignment::new().set("u", u0).set("eps", e);
                let exact = (
                    eval_numeric(&big_h, &a).unwrap(),
                    eval_numeric(&hu, &a).unwrap(),
                );
                let num = numeric_flow(&h, u0, e).unwrap();
                assert!(
                    (exact.0 - num.0).abs() < 1e-6 && (exact.1 - num.1).abs() < 1e-6,
                    "{s}"
                );
            }
        }
    }
}
