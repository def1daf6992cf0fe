//! Exact symbolic expressions.
//!
//! Every `Expr` handed out by this module is in normal form: sums and
//! products are flattened, like terms and like bases are merged, rational
//! coefficients sit in front, and operands are sorted by the derived total
//! order on nodes. Structural equality is therefore the equality test used
//! throughout the crate, backed by the numeric oracle in [`eval`] where the
//! normal form cannot decide (symbolic exponents of sums, for instance).

mod build;
mod calculus;
mod collect;
pub mod eval;
mod parse;
mod print;

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::ops::{Add, Div, Mul, Neg, Sub};
use std::sync::Arc;

use num_bigint::BigInt;
use num_traits::{One, Signed, ToPrimitive, Zero};

pub use calculus::Bindings;
pub use collect::{collect, Monomial};
pub use eval::{
    eval_numeric, oracle_defaults, set_oracle_defaults, Assignment, EvalError, Oracle, ZeroTest,
    DEFAULT_SEED, DEFAULT_TOL,
};
pub use parse::{parse, ParseError};
pub use print::{to_latex, Printer};

pub type Rational = num_rational::BigRational;
pub type Symbol = Arc<str>;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum ExprError {
    #[error(transparent)]
    Parse(#[from] ParseError),
    #[error("expression is not polynomial in `{0}`")]
    NonPolynomial(String),
    #[error(
        "cannot bind `{0}`: it is a differentiation argument of a surviving derivative of `{1}`"
    )]
    BoundDerivativeArgument(String, String),
    #[error("function `{name}` expects {expected} arguments, got {got}")]
    Arity {
        name: String,
        expected: usize,
        got: usize,
    },
}

/// Declared unknown function: name plus ordered parameter symbols.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct FunctionSignature {
    pub name: Symbol,
    pub params: Arc<[Symbol]>,
}

impl FunctionSignature {
    pub fn new(name: &str, params: &[&str]) -> Self {
        FunctionSignature {
            name: name.into(),
            params: params.iter().map(|p| Symbol::from(*p)).collect(),
        }
    }

    /// The function applied to its own parameters, e.g. `f(x,u)`.
    pub fn apply(&self) -> Expr {
        Expr::Func(FuncApp {
            name: self.name.clone(),
            params: self.params.clone(),
            args: self.params.iter().map(|p| Expr::Sym(p.clone())).collect(),
            wrt: Vec::new(),
        })
    }

    pub fn apply_to(&self, args: Vec<Expr>) -> Result<Expr, ExprError> {
        if args.len() != self.params.len() {
            return Err(ExprError::Arity {
                name: self.name.to_string(),
                expected: self.params.len(),
                got: args.len(),
            });
        }
        Ok(Expr::Func(FuncApp {
            name: self.name.clone(),
            params: self.params.clone(),
            args,
            wrt: Vec::new(),
        }))
    }

    /// Inert partial derivative with respect to the named parameters.
    pub fn derivative(&self, wrt: &[&str]) -> Option<Expr> {
        let mut e = self.apply();
        for v in wrt {
            if !self.params.iter().any(|p| &**p == *v) {
                return None;
            }
            e = e.diff(v);
        }
        Some(e)
    }
}

/// Set of declared unknown functions available to the parser.
#[derive(Debug, Clone, Default)]
pub struct Env {
    funcs: BTreeMap<Symbol, FunctionSignature>,
}

impl Env {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn with(mut self, name: &str, params: &[&str]) -> Self {
        self.declare(FunctionSignature::new(name, params));
        self
    }

    pub fn declare(&mut self, sig: FunctionSignature) {
        self.funcs.insert(sig.name.clone(), sig);
    }

    pub fn get(&self, name: &str) -> Option<&FunctionSignature> {
        self.funcs.get(name)
    }

    pub fn signatures(&self) -> impl Iterator<Item = &FunctionSignature> {
        self.funcs.values()
    }

    pub fn merged(&self, other: &Env) -> Env {
        let mut out = self.clone();
        for sig in other.signatures() {
            out.declare(sig.clone());
        }
        out
    }
}

/// Application of an unknown function, possibly differentiated.
///
/// `wrt` holds sorted parameter indices, so mixed partials commute by
/// construction. Arguments may be arbitrary expressions; the chain rule is
/// applied through them.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct FuncApp {
    pub name: Symbol,
    pub params: Arc<[Symbol]>,
    pub args: Vec<Expr>,
    pub wrt: Vec<usize>,
}

impl FuncApp {
    pub fn signature(&self) -> FunctionSignature {
        FunctionSignature {
            name: self.name.clone(),
            params: self.params.clone(),
        }
    }

    /// True when the arguments are exactly the declared parameter symbols.
    pub fn is_standard(&self) -> bool {
        self.args.len() == self.params.len()
            && self
                .args
                .iter()
                .zip(self.params.iter())
                .all(|(a, p)| matches!(a, Expr::Sym(s) if s == p))
    }

    pub fn wrt_names(&self) -> Vec<Symbol> {
        self.wrt.iter().map(|&i| self.params[i].clone()).collect()
    }
}

/// Variant order is the node-kind order used by the normal form.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Expr {
    Num(Rational),
    Func(FuncApp),
    Sym(Symbol),
    Add(Vec<Expr>),
    Mul(Vec<Expr>),
    Pow(Box<Expr>, Box<Expr>),
    Exp(Box<Expr>),
    Ln(Box<Expr>),
}

pub fn rat(n: i64, d: i64) -> Rational {
    Rational::new(BigInt::from(n), BigInt::from(d))
}

impl Expr {
    pub fn zero() -> Expr {
        Expr::Num(Rational::zero())
    }

    pub fn one() -> Expr {
        Expr::Num(Rational::one())
    }

    pub fn int(n: i64) -> Expr {
        Expr::Num(Rational::from_integer(BigInt::from(n)))
    }

    pub fn rational(q: Rational) -> Expr {
        Expr::Num(q)
    }

    pub fn frac(n: i64, d: i64) -> Expr {
        Expr::Num(rat(n, d))
    }

    pub fn sym(name: &str) -> Expr {
        Expr::Sym(name.into())
    }

    pub fn is_zero(&self) -> bool {
        matches!(self, Expr::Num(q) if q.is_zero())
    }

    pub fn is_one(&self) -> bool {
        matches!(self, Expr::Num(q) if q.is_one())
    }

    pub fn as_rational(&self) -> Option<&Rational> {
        match self {
            Expr::Num(q) => Some(q),
            _ => None,
        }
    }

    pub fn as_symbol(&self) -> Option<&str> {
        match self {
            Expr::Sym(s) => Some(s),
            _ => None,
        }
    }

    pub fn as_f64(&self) -> Option<f64> {
        self.as_rational().and_then(|q| q.to_f64())
    }

    /// Leading rational coefficient of a term.
    pub fn coefficient(&self) -> Rational {
        match self {
            Expr::Num(q) => q.clone(),
            Expr::Mul(fs) => match fs.first() {
                Some(Expr::Num(q)) => q.clone(),
                _ => Rational::one(),
            },
            _ => Rational::one(),
        }
    }

    /// Terms of a sum (a single term otherwise; none for zero).
    pub fn terms(&self) -> Vec<Expr> {
        match self {
            Expr::Add(ts) => ts.clone(),
            e if e.is_zero() => Vec::new(),
            e => vec![e.clone()],
        }
    }

    /// Non-numeric factors of a product.
    pub fn factors(&self) -> Vec<Expr> {
        match self {
            Expr::Mul(fs) => fs
                .iter()
                .filter(|f| !matches!(f, Expr::Num(_)))
                .cloned()
                .collect(),
            Expr::Num(_) => Vec::new(),
            e => vec![e.clone()],
        }
    }

    pub fn normalize(&self) -> Expr {
        match self {
            Expr::Num(_) | Expr::Sym(_) => self.clone(),
            Expr::Func(fa) => Expr::Func(FuncApp {
                args: fa.args.iter().map(Expr::normalize).collect(),
                ..fa.clone()
            }),
            Expr::Add(ts) => Expr::add(ts.iter().map(Expr::normalize).collect()),
            Expr::Mul(fs) => Expr::mul(fs.iter().map(Expr::normalize).collect()),
            Expr::Pow(b, e) => Expr::pow(b.normalize(), e.normalize()),
            Expr::Exp(a) => Expr::exp(a.normalize()),
            Expr::Ln(a) => Expr::ln(a.normalize()),
        }
    }

    pub fn free_symbols(&self) -> BTreeSet<Symbol> {
        let mut out = BTreeSet::new();
        self.visit(&mut |e| {
            if let Expr::Sym(s) = e {
                out.insert(s.clone());
            }
        });
        out
    }

    /// Names of unknown functions occurring anywhere.
    pub fn functions(&self) -> BTreeMap<Symbol, FunctionSignature> {
        let mut out = BTreeMap::new();
        self.visit(&mut |e| {
            if let Expr::Func(fa) = e {
                out.insert(fa.name.clone(), fa.signature());
            }
        });
        out
    }

    pub fn contains_symbol(&self, name: &str) -> bool {
        let mut found = false;
        self.visit(&mut |e| {
            if matches!(e, Expr::Sym(s) if &**s == name) {
                found = true;
            }
        });
        found
    }

    pub fn contains_function(&self, name: &str) -> bool {
        let mut found = false;
        self.visit(&mut |e| {
            if matches!(e, Expr::Func(fa) if &*fa.name == name) {
                found = true;
            }
        });
        found
    }

    /// Pre-order traversal.
    pub fn visit(&self, f: &mut dyn FnMut(&Expr)) {
        f(self);
        match self {
            Expr::Num(_) | Expr::Sym(_) => {}
            Expr::Func(fa) => fa.args.iter().for_each(|a| a.visit(f)),
            Expr::Add(xs) | Expr::Mul(xs) => xs.iter().for_each(|a| a.visit(f)),
            Expr::Pow(b, e) => {
                b.visit(f);
                e.visit(f);
            }
            Expr::Exp(a) | Expr::Ln(a) => a.visit(f),
        }
    }

    /// Bottom-up rebuild; `f` sees already-rebuilt children.
    pub fn map_bottom_up(&self, f: &dyn Fn(Expr) -> Expr) -> Expr {
        let rebuilt = match self {
            Expr::Num(_) | Expr::Sym(_) => self.clone(),
            Expr::Func(fa) => Expr::Func(FuncApp {
                args: fa.args.iter().map(|a| a.map_bottom_up(f)).collect(),
                ..fa.clone()
            }),
            Expr::Add(ts) => Expr::add(ts.iter().map(|a| a.map_bottom_up(f)).collect()),
            Expr::Mul(fs) => Expr::mul(fs.iter().map(|a| a.map_bottom_up(f)).collect()),
            Expr::Pow(b, e) => Expr::pow(b.map_bottom_up(f), e.map_bottom_up(f)),
            Expr::Exp(a) => Expr::exp(a.map_bottom_up(f)),
            Expr::Ln(a) => Expr::ln(a.map_bottom_up(f)),
        };
        f(rebuilt)
    }

    /// Divide out the rational content and fix the sign so that the first
    /// term has a positive coefficient. Used for equations `e = 0`.
    pub fn primitive(&self) -> Expr {
        let ts = self.terms();
        if ts.is_empty() {
            return Expr::zero();
        }
        let mut num_gcd = BigInt::zero();
        let mut den_lcm = BigInt::one();
        for t in &ts {
            let c = t.coefficient();
            num_gcd = num_integer::Integer::gcd(&num_gcd, c.numer());
            den_lcm = num_integer::Integer::lcm(&den_lcm, c.denom());
        }
        let mut content = Rational::new(num_gcd, den_lcm);
        if ts[0].coefficient().is_negative() {
            content = -content;
        }
        self * &Expr::Num(content.recip())
    }
}

impl From<i64> for Expr {
    fn from(n: i64) -> Self {
        Expr::int(n)
    }
}

impl From<Rational> for Expr {
    fn from(q: Rational) -> Self {
        Expr::Num(q)
    }
}

impl fmt::Display for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&Printer::default().print(self))
    }
}

macro_rules! binop {
    ($trait:ident, $method:ident, $body:expr) => {
        impl $trait<Expr> for Expr {
            type Output = Expr;
            fn $method(self, rhs: Expr) -> Expr {
                let f: fn(Expr, Expr) -> Expr = $body;
                f(self, rhs)
            }
        }
        impl $trait<&Expr> for &Expr {
            type Output = Expr;
            fn $method(self, rhs: &Expr) -> Expr {
                let f: fn(Expr, Expr) -> Expr = $body;
                f(self.clone(), rhs.clone())
            }
        }
        impl $trait<&Expr> for Expr {
            type Output = Expr;
            fn $method(self, rhs: &Expr) -> Expr {
                let f: fn(Expr, Expr) -> Expr = $body;
                f(self, rhs.clone())
            }
        }
        impl $trait<Expr> for &Expr {
            type Output = Expr;
            fn $method(self, rhs: Expr) -> Expr {
                let f: fn(Expr, Expr) -> Expr = $body;
                f(self.clone(), rhs)
            }
        }
    };
}

binop!(Add, add, |a, b| Expr::add(vec![a, b]));
binop!(Sub, sub, |a, b| Expr::add(vec![
    a,
    Expr::mul(vec![Expr::int(-1), b])
]));
binop!(Mul, mul, |a, b| Expr::mul(vec![a, b]));
binop!(Div, div, |a, b| Expr::mul(vec![
    a,
    Expr::pow(b, Expr::int(-1))
]));

impl Neg for Expr {
    type Output = Expr;
    fn neg(self) -> Expr {
        Expr::mul(vec![Expr::int(-1), self])
    }
}

impl Neg for &Expr {
    type Output = Expr;
    fn neg(self) -> Expr {
        -(self.clone())
    }
}

impl std::iter::Sum for Expr {
    fn sum<I: Iterator<Item = Expr>>(iter: I) -> Expr {
        Expr::add(iter.collect())
    }
}

impl std::iter::Product for Expr {
    fn product<I: Iterator<Item = Expr>>(iter: I) -> Expr {
        Expr::mul(iter.collect())
    }
}
