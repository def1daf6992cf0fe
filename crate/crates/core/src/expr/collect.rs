use std::collections::BTreeMap;
use std::fmt;

use num_traits::{Signed, ToPrimitive};

use super::{Expr, ExprError, Symbol};

/// Product of powers of collection variables, kept sorted by variable order
/// of the request.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct Monomial(pub Vec<(Symbol, u32)>);

impl Monomial {
    pub fn one() -> Self {
        Monomial(Vec::new())
    }

    pub fn is_one(&self) -> bool {
        self.0.is_empty()
    }

    pub fn degree(&self) -> u32 {
        self.0.iter().map(|(_, k)| k).sum()
    }

    pub fn exponent(&self, v: &str) -> u32 {
        self.0
            .iter()
            .find(|(s, _)| &**s == v)
            .map(|(_, k)| *k)
            .unwrap_or(0)
    }

    pub fn to_expr(&self) -> Expr {
        Expr::mul(
            self.0
                .iter()
                .map(|(s, k)| Expr::pow(Expr::Sym(s.clone()), Expr::int(*k as i64)))
                .collect(),
        )
    }
}

impl fmt::Display for Monomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_empty() {
            return f.write_str("1");
        }
        let parts: Vec<String> = self
            .0
            .iter()
            .map(|(s, k)| {
                if *k == 1 {
                    s.to_string()
                } else {
                    format!("{s}^{k}")
                }
            })
            .collect();
        f.write_str(&parts.join("*"))
    }
}

fn mentions_any(e: &Expr, vars: &[&str]) -> Option<String> {
    vars.iter()
        .find(|v| e.contains_symbol(v))
        .map(|v| v.to_string())
}

/// Split `e` into monomials in `vars` with coefficients free of `vars`.
/// The result is ordered by monomial (variables in the order given).
pub fn collect(e: &Expr, vars: &[&str]) -> Result<Vec<(Monomial, Expr)>, ExprError> {
    let mut acc: BTreeMap<Vec<u32>, Vec<Expr>> = BTreeMap::new();
    for term in e.terms() {
        let mut exps = vec![0u32; vars.len()];
        let mut rest = Vec::new();
        let factors = match &term {
            Expr::Mul(fs) => fs.clone(),
            other => vec![other.clone()],
        };
        for f in factors {
            let hit = match &f {
                Expr::Sym(s) => vars.iter().position(|v| *v == &**s).map(|i| (i, 1u32)),
                Expr::Pow(b, k) => match (&**b, &**k) {
                    (Expr::Sym(s), Expr::Num(q)) if q.is_integer() && q.is_positive() => vars
                        .iter()
                        .position(|v| *v == &**s)
                        .map(|i| (i, q.to_integer().to_u32().unwrap_or(u32::MAX))),
                    _ => None,
                },
                _ => None,
            };
            match hit {
                Some((i, k)) => exps[i] += k,
                None => {
                    if let Some(v) = mentions_any(&f, vars) {
                        return Err(ExprError::NonPolynomial(v));
                    }
                    rest.push(f);
                }
            }
        }
        acc.entry(exps).or_default().push(Expr::mul(rest));
    }
    let mut out = Vec::new();
    for (exps, cs) in acc {
        let coeff = Expr::add(cs);
        if coeff.is_zero() {
            continue;
        }
        let mono = Monomial(
            exps.iter()
                .enumerate()
                .filter(|(_, k)| **k > 0)
                .map(|(i, k)| (Symbol::from(vars[i]), *k))
                .collect(),
        );
        out.push((mono, coeff));
    }
    Ok(out)
}
