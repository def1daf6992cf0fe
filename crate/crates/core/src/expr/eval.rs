//! Floating-point evaluation and the randomized identity oracle.

use std::collections::{BTreeMap, BTreeSet};
use std::sync::RwLock;

use num_traits::{Signed, ToPrimitive};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::{Bindings, Expr, Rational, Symbol};

pub const DEFAULT_SEED: u64 = 0x5eed_2024;
pub const DEFAULT_TOL: f64 = 1e-9;
pub const DEFAULT_POINTS: usize = 10;

static SETTINGS: RwLock<(u64, f64)> = RwLock::new((DEFAULT_SEED, DEFAULT_TOL));

/// Change the seed and tolerance picked up by `Oracle::default()` for the
/// rest of the process.
pub fn set_oracle_defaults(seed: u64, tol: f64) {
    *SETTINGS.write().unwrap_or_else(|e| e.into_inner()) = (seed, tol);
}

pub fn oracle_defaults() -> (u64, f64) {
    *SETTINGS.read().unwrap_or_else(|e| e.into_inner())
}

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum EvalError {
    #[error("division by zero")]
    DivisionByZero,
    #[error("`{0}` outside its real domain")]
    Domain(&'static str),
    #[error("unbound symbol `{0}`")]
    Unbound(String),
    #[error("no closed form for function `{0}`")]
    UnboundFunction(String),
    #[error("non-finite value")]
    NonFinite,
}

/// Concrete values for symbols and closed forms for unknown functions.
#[derive(Debug, Clone, Default)]
pub struct Assignment {
    pub values: BTreeMap<Symbol, f64>,
    pub functions: BTreeMap<Symbol, (Vec<Symbol>, Expr)>,
}

impl Assignment {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn set(mut self, name: &str, v: f64) -> Self {
        self.values.insert(name.into(), v);
        self
    }

    pub fn function(mut self, name: &str, params: &[&str], body: Expr) -> Self {
        self.functions.insert(
            name.into(),
            (params.iter().map(|p| Symbol::from(*p)).collect(), body),
        );
        self
    }
}

fn finite(v: f64) -> Result<f64, EvalError> {
    if v.is_finite() {
        Ok(v)
    } else {
        Err(EvalError::NonFinite)
    }
}

/// Evaluate `e` at the given assignment.
pub fn eval_numeric(e: &Expr, a: &Assignment) -> Result<f64, EvalError> {
    match e {
        Expr::Num(q) => Ok(q.to_f64().unwrap_or(f64::NAN)),
        Expr::Sym(s) => a
            .values
            .get(s)
            .copied()
            .ok_or_else(|| EvalError::Unbound(s.to_string())),
        Expr::Func(fa) => {
            let (params, body) = a
                .functions
                .get(&fa.name)
                .ok_or_else(|| EvalError::UnboundFunction(fa.name.to_string()))?;
            let mut d = body.clone();
            for &i in &fa.wrt {
                d = d.diff(&params[i]);
            }
            let mut inner = Assignment {
                values: a.values.clone(),
                functions: a.functions.clone(),
            };
            for (p, arg) in params.iter().zip(&fa.args) {
                inner.values.insert(p.clone(), eval_numeric(arg, a)?);
            }
            eval_numeric(&d, &inner)
        }
        Expr::Add(ts) => {
            let mut s = 0.0;
            for t in ts {
                s += eval_numeric(t, a)?;
            }
            finite(s)
        }
        Expr::Mul(fs) => {
            let mut p = 1.0;
            for f in fs {
                p *= eval_numeric(f, a)?;
            }
            finite(p)
        }
        Expr::Pow(b, x) => {
            let bv = eval_numeric(b, a)?;
            if let Expr::Num(q) = &**x {
                if q.is_integer() {
                    let n = q.to_integer().to_i32().ok_or(EvalError::NonFinite)?;
                    if bv == 0.0 && n < 0 {
                        return Err(EvalError::DivisionByZero);
                    }
                    return finite(bv.powi(n));
                }
            }
            let xv = eval_numeric(x, a)?;
            if bv < 0.0 {
                return Err(EvalError::Domain("power"));
            }
            if bv == 0.0 && xv <= 0.0 {
                return Err(EvalError::DivisionByZero);
            }
            finite(bv.powf(xv))
        }
        Expr::Exp(x) => finite(eval_numeric(x, a)?.exp()),
        Expr::Ln(x) => {
            let v = eval_numeric(x, a)?;
            if v <= 0.0 {
                Err(EvalError::Domain("ln"))
            } else {
                Ok(v.ln())
            }
        }
    }
}

/// Sum of absolute values of the top-level terms; the scale for relative tests.
fn magnitude(e: &Expr, a: &Assignment) -> Result<f64, EvalError> {
    let mut s = 0.0f64;
    for t in e.terms() {
        s += eval_numeric(&t, a)?.abs();
    }
    Ok(s)
}

/// Outcome of an identity test.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ZeroTest {
    /// The normal form (possibly after clearing denominators) is zero.
    Exact,
    /// Not certified exactly, but vanishes at every sample point.
    Numeric,
    /// A sample point gives a nonzero value.
    NonZero,
    /// No valid sample point could be found.
    Undecided,
}

impl ZeroTest {
    pub fn holds(self) -> bool {
        matches!(self, ZeroTest::Exact | ZeroTest::Numeric)
    }
}

/// Sampling policy for the identity oracle.
#[derive(Debug, Clone)]
pub struct Oracle {
    pub seed: u64,
    pub points: usize,
    pub tol: f64,
    /// Values a given parameter must avoid.
    pub excluded: BTreeMap<Symbol, Vec<Rational>>,
    /// Values to pin instead of sampling.
    pub fixed: BTreeMap<Symbol, f64>,
}

impl Default for Oracle {
    fn default() -> Self {
        let (seed, tol) = oracle_defaults();
        Oracle {
            seed,
            points: DEFAULT_POINTS,
            tol,
            excluded: BTreeMap::new(),
            fixed: BTreeMap::new(),
        }
    }
}

const PARAM_POOL: [(i64, i64); 5] = [(-2, 1), (-1, 1), (1, 2), (1, 1), (3, 1)];

fn sample_symbol(rng: &mut ChaCha8Rng, name: &str, excluded: &[Rational]) -> f64 {
    match name {
        "t" | "x" => rng.gen_range(0.5..2.0),
        "u" => rng.gen_range(0.2..1.2),
        n if n.starts_with("u_") => rng.gen_range(-1.0..1.0),
        _ => {
            let pool: Vec<Rational> = PARAM_POOL
                .iter()
                .map(|&(n, d)| Rational::new(n.into(), d.into()))
                .filter(|q| !excluded.contains(q))
                .collect();
            if pool.is_empty() {
                return rng.gen_range(0.3..0.9);
            }
            pool[rng.gen_range(0..pool.len())].to_f64().unwrap()
        }
    }
}

fn small_coeff(rng: &mut ChaCha8Rng) -> Expr {
    Expr::frac(rng.gen_range(-10..=10), 10)
}

/// A random smooth closed form in the given parameters: quadratic plus an
/// exponential, so that derivatives of every order are generically nonzero.
pub fn random_function(rng: &mut ChaCha8Rng, params: &[Symbol]) -> Expr {
    let vars: Vec<Expr> = params.iter().map(|p| Expr::Sym(p.clone())).collect();
    let mut terms = vec![Expr::frac(rng.gen_range(5..=15), 10)];
    for (i, v) in vars.iter().enumerate() {
        terms.push(small_coeff(rng) * v);
        for w in &vars[i..] {
            terms.push(small_coeff(rng) * v * w);
        }
    }
    let lin: Expr = vars.iter().map(|v| small_coeff(rng) * v).sum();
    terms.push(Expr::frac(rng.gen_range(1..=5), 10) * Expr::exp(lin));
    Expr::add(terms)
}

impl Oracle {
    pub fn with_seed(seed: u64) -> Self {
        Oracle {
            seed,
            ..Self::default()
        }
    }

    pub fn exclude(mut self, name: &str, values: Vec<Rational>) -> Self {
        self.excluded.entry(name.into()).or_default().extend(values);
        self
    }

    pub fn fix(mut self, name: &str, v: f64) -> Self {
        self.fixed.insert(name.into(), v);
        self
    }

    /// Draw one assignment covering every symbol and function of `exprs`.
    pub fn sample(&self, rng: &mut ChaCha8Rng, exprs: &[&Expr]) -> Assignment {
        let mut syms = BTreeSet::new();
        let mut funcs = BTreeMap::new();
        for e in exprs {
            syms.extend(e.free_symbols());
            funcs.extend(e.functions());
        }
        for sig in funcs.values() {
            syms.extend(sig.params.iter().cloned());
        }
        let mut a = Assignment::new();
        for s in syms {
            let v = match self.fixed.get(&s) {
                Some(v) => *v,
                None => sample_symbol(
                    rng,
                    &s,
                    self.excluded.get(&s).map(Vec::as_slice).unwrap_or(&[]),
                ),
            };
            a.values.insert(s, v);
        }
        for (name, sig) in funcs {
            let body = random_function(rng, &sig.params);
            a.functions.insert(name, (sig.params.to_vec(), body));
        }
        a
    }

    /// Numeric test: `e` vanishes (relative to its term scale) at every point.
    pub fn vanishes(&self, e: &Expr) -> ZeroTest {
        if e.is_zero() {
            return ZeroTest::Exact;
        }
        let mut rng = ChaCha8Rng::seed_from_u64(self.seed);
        let mut good = 0;
        let mut attempts = 0;
        while good < self.points && attempts < self.points * 20 {
            attempts += 1;
            let a = self.sample(&mut rng, &[e]);
            let (Ok(v), Ok(m)) = (eval_numeric(e, &a), magnitude(e, &a)) else {
                continue;
            };
            good += 1;
            if v.abs() > self.tol * m.max(1.0) {
                return ZeroTest::NonZero;
            }
        }
        if good == 0 {
            ZeroTest::Undecided
        } else {
            ZeroTest::Numeric
        }
    }

    /// Exact test first, then denominators cleared, then the numeric oracle.
    pub fn is_zero(&self, e: &Expr) -> ZeroTest {
        if e.is_zero() || clear_denominators(e).is_zero() {
            return ZeroTest::Exact;
        }
        self.vanishes(e)
    }

    pub fn equal(&self, a: &Expr, b: &Expr) -> ZeroTest {
        self.is_zero(&(a - b))
    }
}

/// Multiply through by every base raised to a negative integer power.
pub fn clear_denominators(e: &Expr) -> Expr {
    let mut dens: BTreeMap<Expr, i64> = BTreeMap::new();
    for t in e.terms() {
        for f in t.factors() {
            if let Expr::Pow(b, x) = &f {
                if let Expr::Num(q) = &**x {
                    if q.is_integer() && q.is_negative() {
                        let k = q.to_integer().abs().to_i64().unwrap_or(0);
                        let slot = dens.entry((**b).clone()).or_insert(0);
                        *slot = (*slot).max(k);
                    }
                }
            }
        }
    }
    if dens.is_empty() {
        return e.clone();
    }
    let factor: Expr = dens
        .into_iter()
        .map(|(b, k)| Expr::pow(b, Expr::int(k)))
        .product();
    e * &factor
}

/// Substitute a random closed form for each unknown function, keeping symbols.
pub fn instantiate_functions(e: &Expr, seed: u64) -> Expr {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut b = Bindings::new();
    for (name, sig) in e.functions() {
        let body = random_function(&mut rng, &sig.params);
        b.insert_func(name, sig.params.to_vec(), body);
    }
    b.apply_unchecked(e)
}
