//! Rule-based elimination shared by the determining-system routines: an
//! equation whose only non-trivial factor is one unknown (or one of its
//! derivatives) forces that quantity to vanish.

use crate::expr::{Expr, FuncApp, Symbol};
use crate::jet::EquationClass;

/// A vanishing derivative `F_{w}`: every derivative of `F` whose
/// differentiation multiset contains `w` vanishes as well.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Vanishing {
    pub func: Symbol,
    pub wrt: Vec<Symbol>,
}

impl Vanishing {
    fn of(fa: &FuncApp) -> Self {
        let mut wrt = fa.wrt_names();
        wrt.sort();
        Vanishing {
            func: fa.name.clone(),
            wrt,
        }
    }

    fn covers(&self, fa: &FuncApp) -> bool {
        if fa.name != self.func {
            return false;
        }
        let mut have = fa.wrt_names();
        for w in &self.wrt {
            match have.iter().position(|h| h == w) {
                Some(i) => {
                    have.remove(i);
                }
                None => return false,
            }
        }
        true
    }
}

pub fn kill(e: &Expr, rules: &[Vanishing]) -> Expr {
    if rules.is_empty() {
        return e.clone();
    }
    e.map_bottom_up(&|n| match &n {
        Expr::Func(fa) if rules.iter().any(|r| r.covers(fa)) => Expr::zero(),
        _ => n,
    })
}

fn is_nonvanishing(f: &Expr, nonvanishing: &[Expr]) -> bool {
    let base = match f {
        Expr::Pow(b, x) if x.as_rational().is_some() => &**b,
        Expr::Exp(_) => return true,
        other => other,
    };
    nonvanishing.contains(base)
}

/// The unknown `F` (possibly differentiated) when `e = k·F^n·Π nᵢ` with
/// `k` a number, `n > 0` and each `nᵢ` a power of a nonvanishing factor.
pub fn single_unknown(e: &Expr, unknowns: &[&str], nonvanishing: &[Expr]) -> Option<Expr> {
    if e.terms().len() != 1 {
        return None;
    }
    let mut found = None;
    for f in e.factors() {
        if is_nonvanishing(&f, nonvanishing) {
            continue;
        }
        let (base, positive) = match &f {
            Expr::Pow(b, x) => (
                &**b,
                x.as_rational()
                    .is_some_and(|q| q > &num_traits::Zero::zero()),
            ),
            other => (other, true),
        };
        match base {
            Expr::Func(fa) if positive && unknowns.contains(&&*fa.name) && found.is_none() => {
                found = Some(base.clone())
            }
            _ => return None,
        }
    }
    found
}

pub fn rule_for(unknown: &Expr) -> Option<Vanishing> {
    match unknown {
        Expr::Func(fa) => Some(Vanishing::of(fa)),
        _ => None,
    }
}

/// Repeatedly extract single-unknown equations and substitute them into
/// the rest. Returns the discovered unknowns in order, the rules, and the
/// equations that survive.
pub fn eliminate(
    equations: &[Expr],
    unknowns: &[&str],
    nonvanishing: &[Expr],
) -> (Vec<Expr>, Vec<Vanishing>, Vec<Expr>) {
    let mut found = Vec::new();
    let mut rules = Vec::new();
    let mut eqs: Vec<Expr> = equations.iter().filter(|e| !e.is_zero()).cloned().collect();
    loop {
        let mut progress = false;
        for e in eqs.clone() {
            let e = kill(&e, &rules);
            if let Some(u) = single_unknown(&e, unknowns, nonvanishing) {
                if let Some(r) = rule_for(&u) {
                    found.push(u);
                    rules.push(r);
                    progress = true;
                }
            }
        }
        eqs = eqs
            .iter()
            .map(|e| kill(e, &rules))
            .filter(|e| !e.is_zero())
            .collect();
        if !progress {
            break;
        }
    }
    // Drop conditions implied by a more general one found later.
    let keep: Vec<bool> = (0..found.len())
        .map(|i| {
            let others: Vec<Vanishing> = rules
                .iter()
                .enumerate()
                .filter(|(j, _)| *j != i)
                .map(|(_, r)| r.clone())
                .collect();
            !kill(&found[i], &others).is_zero()
        })
        .collect();
    let mut k = keep.iter();
    found.retain(|_| *k.next().unwrap());
    let mut k = keep.iter();
    rules.retain(|_| *k.next().unwrap());
    (found, rules, eqs)
}

/// Replace arbitrary elements and their derivatives by plain symbols:
/// `f ↦ f`, `∂_x f ↦ f_x`, `∂_x∂_u f ↦ f_xu`.
pub fn freeze(e: &Expr, cls: &EquationClass) -> Expr {
    e.map_bottom_up(&|n| match &n {
        Expr::Func(fa) if cls.element(&fa.name).is_some() && fa.is_standard() => {
            Expr::sym(&frozen_name(fa))
        }
        _ => n,
    })
}

fn frozen_name(fa: &FuncApp) -> String {
    let wrt: String = fa.wrt_names().iter().map(|w| w.to_string()).collect();
    if wrt.is_empty() {
        fa.name.to_string()
    } else {
        format!("{}_{wrt}", fa.name)
    }
}

/// Frozen symbols of the elements and their first derivatives.
pub fn frozen_symbols(cls: &EquationClass) -> Vec<String> {
    let mut out = Vec::new();
    for sig in &cls.arbitrary_elements {
        out.push(sig.name.to_string());
        out.extend(sig.params.iter().map(|p| format!("{}_{p}", sig.name)));
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::expr::{parse, Env};

    fn p(s: &str) -> Expr {
        parse(
            s,
            &Env::new()
                .with("tau", &["t", "x", "u"])
                .with("g", &["x", "u"]),
        )
        .unwrap()
    }

    #[test]
    fn detects_single_unknowns() {
        let nv = [p("g")];
        assert_eq!(
            single_unknown(&p("-2*g*Diff(tau,u)"), &["tau"], &nv),
            Some(p("Diff(tau,u)"))
        );
        assert_eq!(
            single_unknown(&p("Diff(tau,u)^2/g^2"), &["tau"], &nv),
            Some(p("Diff(tau,u)"))
        );
        assert_eq!(single_unknown(&p("u*Diff(tau,u)"), &["tau"], &nv), None);
        assert_eq!(
            single_unknown(&p("Diff(tau,u) + Diff(tau,x)"), &["tau"], &nv),
            None
        );
    }

    #[test]
    fn kill_covers_higher_derivatives() {
        let r = rule_for(&p("Diff(tau,u)")).unwrap();
        assert_eq!(
            kill(&p("Diff(tau,u,x) + Diff(tau,t)"), &[r]),
            p("Diff(tau,t)")
        );
        let r = rule_for(&p("tau")).unwrap();
        assert!(kill(&p("Diff(tau,t) + tau"), &[r]).is_zero());
    }

    #[test]
    fn elimination_chains() {
        let (found, _, rest) = eliminate(
            &[p("Diff(tau,u) + Diff(tau,x)"), p("g*Diff(tau,x)")],
            &["tau"],
            &[p("g")],
        );
        assert_eq!(found, vec![p("Diff(tau,x)"), p("Diff(tau,u)")]);
        assert!(rest.is_empty());
    }
}
