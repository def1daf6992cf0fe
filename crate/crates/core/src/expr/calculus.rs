use std::collections::BTreeMap;

use super::{Expr, ExprError, FuncApp, Symbol};

impl Expr {
    /// Partial derivative with respect to the symbol `v`.
    pub fn diff(&self, v: &str) -> Expr {
        match self {
            Expr::Num(_) => Expr::zero(),
            Expr::Sym(s) => {
                if &**s == v {
                    Expr::one()
                } else {
                    Expr::zero()
                }
            }
            Expr::Func(fa) => {
                let mut terms = Vec::new();
                for (i, a) in fa.args.iter().enumerate() {
                    let da = a.diff(v);
                    if da.is_zero() {
                        continue;
                    }
                    let mut wrt = fa.wrt.clone();
                    let pos = wrt.partition_point(|&j| j <= i);
                    wrt.insert(pos, i);
                    terms.push(da * Expr::Func(FuncApp { wrt, ..fa.clone() }));
                }
                Expr::add(terms)
            }
            Expr::Add(ts) => Expr::add(ts.iter().map(|t| t.diff(v)).collect()),
            Expr::Mul(fs) => {
                let mut terms = Vec::new();
                for i in 0..fs.len() {
                    let d = fs[i].diff(v);
                    if d.is_zero() {
                        continue;
                    }
                    let mut prod = fs.clone();
                    prod[i] = d;
                    terms.push(Expr::mul(prod));
                }
                Expr::add(terms)
            }
            Expr::Pow(b, e) => {
                let db = b.diff(v);
                let de = e.diff(v);
                let mut terms = Vec::new();
                if !db.is_zero() {
                    terms.push(Expr::mul(vec![
                        (**e).clone(),
                        Expr::pow((**b).clone(), &**e - &Expr::one()),
                        db,
                    ]));
                }
                if !de.is_zero() {
                    terms.push(Expr::mul(vec![self.clone(), de, Expr::ln((**b).clone())]));
                }
                Expr::add(terms)
            }
            Expr::Exp(a) => self * &a.diff(v),
            Expr::Ln(a) => a.diff(v) / (**a).clone(),
        }
    }

    /// Repeated partial derivative.
    pub fn diff_n(&self, vars: &[&str]) -> Expr {
        vars.iter().fold(self.clone(), |e, v| e.diff(v))
    }
}

/// Simultaneous substitution table.
///
/// Symbols map to expressions. A function binding gives a body written in the
/// function's own parameters; inert derivatives of the function are replaced
/// by the corresponding derivatives of the body, evaluated at the arguments.
#[derive(Debug, Clone, Default)]
pub struct Bindings {
    syms: BTreeMap<Symbol, Expr>,
    funcs: BTreeMap<Symbol, (Vec<Symbol>, Expr)>,
}

impl Bindings {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn sym(mut self, name: &str, value: Expr) -> Self {
        self.syms.insert(name.into(), value);
        self
    }

    pub fn func(mut self, name: &str, params: &[&str], body: Expr) -> Self {
        self.funcs.insert(
            name.into(),
            (params.iter().map(|p| Symbol::from(*p)).collect(), body),
        );
        self
    }

    pub fn insert_sym(&mut self, name: Symbol, value: Expr) {
        self.syms.insert(name, value);
    }

    pub fn insert_func(&mut self, name: Symbol, params: Vec<Symbol>, body: Expr) {
        self.funcs.insert(name, (params, body));
    }

    pub fn is_empty(&self) -> bool {
        self.syms.is_empty() && self.funcs.is_empty()
    }

    /// Substitute, refusing to rebind a symbol that is the differentiation
    /// slot of a derivative that survives the substitution.
    pub fn apply(&self, e: &Expr) -> Result<Expr, ExprError> {
        let mut err = None;
        e.visit(&mut |n| {
            if err.is_some() {
                return;
            }
            if let Expr::Func(fa) = n {
                if self.funcs.contains_key(&fa.name) {
                    return;
                }
                for &i in &fa.wrt {
                    if let Expr::Sym(s) = &fa.args[i] {
                        if let Some(r) = self.syms.get(s) {
                            if !matches!(r, Expr::Sym(_)) {
                                err = Some(ExprError::BoundDerivativeArgument(
                                    s.to_string(),
                                    fa.name.to_string(),
                                ));
                            }
                        }
                    }
                }
            }
        });
        match err {
            Some(e) => Err(e),
            None => Ok(self.apply_unchecked(e)),
        }
    }

    /// Substitute without the derivative-slot check. Surviving derivatives
    /// keep their slot semantics and receive the substituted arguments.
    pub fn apply_unchecked(&self, e: &Expr) -> Expr {
        match e {
            Expr::Num(_) => e.clone(),
            Expr::Sym(s) => self.syms.get(s).cloned().unwrap_or_else(|| e.clone()),
            Expr::Func(fa) => {
                let args: Vec<Expr> = fa.args.iter().map(|a| self.apply_unchecked(a)).collect();
                match self.funcs.get(&fa.name) {
                    Some((params, body)) => {
                        let mut d = body.clone();
                        for &i in &fa.wrt {
                            d = d.diff(&fa.params[i]);
                        }
                        let mut inner = Bindings::new();
                        for (p, a) in params.iter().zip(args) {
                            inner.insert_sym(p.clone(), a);
                        }
                        inner.apply_unchecked(&d)
                    }
                    None => Expr::Func(FuncApp { args, ..fa.clone() }),
                }
            }
            Expr::Add(ts) => Expr::add(ts.iter().map(|t| self.apply_unchecked(t)).collect()),
            Expr::Mul(fs) => Expr::mul(fs.iter().map(|t| self.apply_unchecked(t)).collect()),
            Expr::Pow(b, x) => Expr::pow(self.apply_unchecked(b), self.apply_unchecked(x)),
            Expr::Exp(a) => Expr::exp(self.apply_unchecked(a)),
            Expr::Ln(a) => Expr::ln(self.apply_unchecked(a)),
        }
    }
}

impl Expr {
    pub fn substitute(&self, b: &Bindings) -> Result<Expr, ExprError> {
        b.apply(self)
    }

    pub fn subs(&self, name: &str, value: &Expr) -> Expr {
        Bindings::new()
            .sym(name, value.clone())
            .apply_unchecked(self)
    }
}
