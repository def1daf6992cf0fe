//! Jet-space bookkeeping for scalar evolution equations in `(t, x, u)`.

use std::collections::BTreeMap;
use std::fmt;
use std::path::Path;

use serde::Deserialize;

use crate::expr::{collect, parse, Bindings, Env, Expr, ExprError, FunctionSignature, Monomial};

#[derive(Debug, thiserror::Error)]
pub enum JetError {
    #[error("total derivative of `{0}` with respect to `{1}` exceeds the jet truncation")]
    TruncationExceeded(String, String),
    #[error(transparent)]
    Expr(#[from] ExprError),
    #[error("invalid equation class: {0}")]
    InvalidClass(String),
    #[error("cannot read class file: {0}")]
    Io(#[from] std::io::Error),
    #[error("malformed class file: {0}")]
    Json(#[from] serde_json::Error),
}

/// Independent variables, dependent variable and the truncated jet.
#[derive(Debug, Clone)]
pub struct JetSpace {
    pub independent: [String; 2],
    pub dependent: String,
    /// `(jet variable, wrt) -> shifted jet variable`.
    shifts: BTreeMap<(String, String), String>,
    jets: Vec<String>,
}

impl Default for JetSpace {
    fn default() -> Self {
        JetSpace::new()
    }
}

impl JetSpace {
    pub const ORDER: usize = 3;

    /// The jet over `(t, x)` with dependent `u` truncated at order three:
    /// `u, u_t, u_x, u_tt, u_tx, u_xx, u_txx, u_xxx`.
    pub fn new() -> Self {
        let jets: Vec<String> = ["u", "u_t", "u_x", "u_tt", "u_tx", "u_xx", "u_txx", "u_xxx"]
            .iter()
            .map(|s| s.to_string())
            .collect();
        let mut shifts = BTreeMap::new();
        for j in &jets {
            let idx = j.strip_prefix("u_").unwrap_or("");
            for w in ["t", "x"] {
                let mut letters: Vec<char> = format!("{idx}{w}").chars().collect();
                letters.sort();
                let name = format!("u_{}", letters.into_iter().collect::<String>());
                if jets.contains(&name) {
                    shifts.insert((j.clone(), w.to_string()), name);
                }
            }
        }
        JetSpace {
            independent: ["t".into(), "x".into()],
            dependent: "u".into(),
            shifts,
            jets,
        }
    }

    pub fn jet_variables(&self) -> &[String] {
        &self.jets
    }

    /// Jet variables of positive order.
    pub fn derivatives(&self) -> Vec<&str> {
        self.jets.iter().skip(1).map(String::as_str).collect()
    }

    pub fn order(name: &str) -> usize {
        name.strip_prefix("u_").map(str::len).unwrap_or(0)
    }

    /// Variables used for splitting, in label order.
    pub fn split_variables(&self) -> Vec<&'static str> {
        vec!["u_x", "u_xx", "u_tx", "u_xxx", "u_tt", "u_txx", "u_t"]
    }

    pub fn is_jet(&self, name: &str) -> bool {
        self.jets.iter().any(|j| j == name)
    }

    /// Total derivative `D_t` or `D_x`.
    pub fn total_derivative(&self, e: &Expr, wrt: &str) -> Result<Expr, JetError> {
        let mut terms = vec![e.diff(wrt)];
        for j in &self.jets {
            if !e.contains_symbol(j) {
                continue;
            }
            let next = self
                .shifts
                .get(&(j.clone(), wrt.to_string()))
                .ok_or_else(|| JetError::TruncationExceeded(j.clone(), wrt.to_string()))?;
            terms.push(Expr::sym(next) * e.diff(j));
        }
        Ok(Expr::add(terms))
    }

    pub fn total_derivative_n(&self, e: &Expr, wrt: &[&str]) -> Result<Expr, JetError> {
        let mut out = e.clone();
        for w in wrt {
            out = self.total_derivative(&out, w)?;
        }
        Ok(out)
    }

    /// Coefficients of `e` by monomials in the positive-order jet variables.
    pub fn split(&self, e: &Expr) -> Result<DeterminingSystem, JetError> {
        let vars = self.split_variables();
        let equations = collect(e, &vars)?;
        Ok(DeterminingSystem { equations })
    }
}

/// Labelled equations `lhs = 0` keyed by jet monomials.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct DeterminingSystem {
    pub equations: Vec<(Monomial, Expr)>,
}

impl DeterminingSystem {
    pub fn len(&self) -> usize {
        self.equations.len()
    }

    pub fn is_empty(&self) -> bool {
        self.equations.is_empty()
    }

    pub fn get(&self, label: &str) -> Option<&Expr> {
        self.equations
            .iter()
            .find(|(m, _)| m.to_string() == label)
            .map(|(_, e)| e)
    }

    pub fn labels(&self) -> Vec<String> {
        self.equations.iter().map(|(m, _)| m.to_string()).collect()
    }

    /// `Σ monomial·coefficient`.
    pub fn reconstruct(&self) -> Expr {
        self.equations.iter().map(|(m, c)| m.to_expr() * c).sum()
    }

    pub fn to_text(&self) -> String {
        self.equations
            .iter()
            .map(|(m, e)| format!("{m}: {e}\n"))
            .collect()
    }

    pub fn to_latex(&self) -> String {
        let mut out = String::from("\\begin{align*}\n");
        for (m, e) in &self.equations {
            let label = crate::expr::to_latex(&m.to_expr());
            out.push_str(&format!(
                "  &{label}\\colon && {} = 0\\\\\n",
                crate::expr::to_latex(e)
            ));
        }
        out.push_str("\\end{align*}\n");
        out
    }
}

impl fmt::Display for DeterminingSystem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_text())
    }
}

/// An auxiliary condition `E_v = 0`: the arbitrary element `E` does not
/// depend on the variable `v`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Auxiliary {
    pub element: String,
    pub variable: String,
}

#[derive(Debug, Deserialize)]
struct ClassFile {
    #[serde(default)]
    name: Option<String>,
    delta: String,
    solved_for: String,
    rhs: String,
    arbitrary_elements: BTreeMap<String, Vec<String>>,
    #[serde(default)]
    auxiliary: Vec<String>,
    #[serde(default)]
    nonvanishing: Vec<String>,
}

/// A class of equations `Δ = 0` parameterized by arbitrary elements.
#[derive(Debug, Clone)]
pub struct EquationClass {
    pub name: String,
    pub delta: Expr,
    pub solved_for: String,
    pub rhs: Expr,
    pub arbitrary_elements: Vec<FunctionSignature>,
    pub auxiliary: Vec<Auxiliary>,
    pub nonvanishing: Vec<Expr>,
    pub env: Env,
}

impl EquationClass {
    pub fn from_json(text: &str) -> Result<Self, JetError> {
        let raw: ClassFile = serde_json::from_str(text)?;
        let mut env = Env::new();
        let mut elements = Vec::new();
        for (name, args) in &raw.arbitrary_elements {
            let params: Vec<&str> = args.iter().map(String::as_str).collect();
            let sig = FunctionSignature::new(name, &params);
            env.declare(sig.clone());
            elements.push(sig);
        }
        let p = |s: &str| parse(s, &env).map_err(|e| JetError::Expr(e.into()));
        let delta = p(&raw.delta)?;
        let rhs = p(&raw.rhs)?;
        let mut auxiliary = Vec::new();
        for a in &raw.auxiliary {
            let (element, variable) = a.split_once('_').ok_or_else(|| {
                JetError::InvalidClass(format!("auxiliary condition `{a}` is not of the form E_v"))
            })?;
            if !raw.arbitrary_elements.contains_key(element) {
                return Err(JetError::InvalidClass(format!(
                    "auxiliary condition on unknown element `{element}`"
                )));
            }
            auxiliary.push(Auxiliary {
                element: element.into(),
                variable: variable.into(),
            });
        }
        let nonvanishing = raw
            .nonvanishing
            .iter()
            .map(|s| p(s))
            .collect::<Result<Vec<_>, _>>()?;
        let cls = EquationClass {
            name: raw.name.unwrap_or_else(|| "class".into()),
            delta,
            solved_for: raw.solved_for,
            rhs,
            arbitrary_elements: elements,
            auxiliary,
            nonvanishing,
            env,
        };
        cls.validate()?;
        Ok(cls)
    }

    pub fn from_path(path: &Path) -> Result<Self, JetError> {
        Self::from_json(&std::fs::read_to_string(path)?)
    }

    fn validate(&self) -> Result<(), JetError> {
        let js = JetSpace::new();
        if !js.is_jet(&self.solved_for) || JetSpace::order(&self.solved_for) == 0 {
            return Err(JetError::InvalidClass(format!(
                "`{}` is not a jet derivative",
                self.solved_for
            )));
        }
        let identity = &self.delta - &(Expr::sym(&self.solved_for) - &self.rhs);
        if !identity.is_zero() {
            return Err(JetError::InvalidClass(
                "delta differs from solved_for - rhs".into(),
            ));
        }
        if self.rhs.contains_symbol(&self.solved_for) {
            return Err(JetError::InvalidClass(
                "rhs depends on the solved variable".into(),
            ));
        }
        Ok(())
    }

    /// Replace the solved jet variable by the right-hand side; nothing else.
    pub fn on_manifold(&self, e: &Expr) -> Expr {
        Bindings::new()
            .sym(&self.solved_for, self.rhs.clone())
            .apply_unchecked(e)
    }

    pub fn element(&self, name: &str) -> Option<&FunctionSignature> {
        self.arbitrary_elements.iter().find(|s| &*s.name == name)
    }

    /// Names of the arbitrary elements required to be nonzero.
    pub fn nonvanishing_names(&self) -> Vec<String> {
        self.nonvanishing
            .iter()
            .filter_map(|e| match e {
                Expr::Func(fa) if fa.wrt.is_empty() => Some(fa.name.to_string()),
                _ => None,
            })
            .collect()
    }
}

/// Built-in class definitions shipped with the crate.
pub mod classes {
    use super::{EquationClass, JetError};

    pub const GEN_DIFF: &str = include_str!("../resources/classes/genDiff.json");
    pub const HEAT: &str = include_str!("../resources/classes/heat.json");
    pub const LINEAR: &str = include_str!("../resources/classes/linear.json");

    pub fn gen_diff() -> EquationClass {
        EquationClass::from_json(GEN_DIFF).expect("built-in class")
    }

    pub fn heat() -> EquationClass {
        EquationClass::from_json(HEAT).expect("built-in class")
    }

    pub fn linear() -> EquationClass {
        EquationClass::from_json(LINEAR).expect("built-in class")
    }

    pub fn by_name(name: &str) -> Result<EquationClass, JetError> {
        let stem = name.trim_end_matches(".json");
        let stem = stem.rsplit('/').next().unwrap_or(stem);
        match stem {
            "genDiff" => Ok(gen_diff()),
            "heat" => Ok(heat()),
            "linear" => Ok(linear()),
            _ => Err(JetError::InvalidClass(format!(
                "unknown built-in class `{name}`"
            ))),
        }
    }
}
