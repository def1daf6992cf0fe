//! Vector fields, prolongation and point transformations.

mod transform;

use std::collections::BTreeMap;
use std::fmt;

use crate::expr::{collect, parse, Env, Expr, ExprError, Symbol};
use crate::jet::{Auxiliary, EquationClass, JetError, JetSpace};

pub use transform::{
    transform_class_element, EquivTransform, PointTransformation, TransformError, UMap,
};

#[derive(Debug, thiserror::Error)]
pub enum FieldError {
    #[error("coordinate sets differ: {0:?} vs {1:?}")]
    CoordinateMismatch(Vec<String>, Vec<String>),
    #[error("expression involves `{0}`, beyond second order")]
    JetOrderExceeded(String),
    #[error(transparent)]
    Jet(#[from] JetError),
}

/// `Σ ζ^c ∂_c` over an ordered coordinate list.
#[derive(Debug, Clone, PartialEq)]
pub struct VectorField {
    coords: Vec<Symbol>,
    coeffs: BTreeMap<Symbol, Expr>,
}

pub const BASE: [&str; 3] = ["t", "x", "u"];
pub const EXTENDED: [&str; 5] = ["t", "x", "u", "f", "g"];

impl VectorField {
    pub fn new(coords: &[&str]) -> Self {
        VectorField {
            coords: coords.iter().map(|c| Symbol::from(*c)).collect(),
            coeffs: BTreeMap::new(),
        }
    }

    pub fn base() -> Self {
        Self::new(&BASE)
    }

    pub fn extended() -> Self {
        Self::new(&EXTENDED)
    }

    pub fn with(mut self, coord: &str, coeff: Expr) -> Self {
        self.set(coord, coeff);
        self
    }

    pub fn set(&mut self, coord: &str, coeff: Expr) {
        assert!(
            self.coords.iter().any(|c| &**c == coord),
            "unknown coordinate `{coord}`"
        );
        if coeff.is_zero() {
            self.coeffs.remove(coord);
        } else {
            self.coeffs.insert(coord.into(), coeff);
        }
    }

    pub fn coords(&self) -> Vec<&str> {
        self.coords.iter().map(|c| &**c).collect()
    }

    pub fn coeff(&self, coord: &str) -> Expr {
        self.coeffs.get(coord).cloned().unwrap_or_else(Expr::zero)
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// Same field on a larger coordinate list.
    pub fn embed(&self, coords: &[&str]) -> Result<Self, FieldError> {
        let mut out = VectorField::new(coords);
        for (c, e) in &self.coeffs {
            if !coords.contains(&&**c) {
                return Err(FieldError::CoordinateMismatch(
                    self.coord_strings(),
                    coords.iter().map(|s| s.to_string()).collect(),
                ));
            }
            out.set(c, e.clone());
        }
        Ok(out)
    }

    /// Projection to the listed coordinates.
    pub fn project(&self, coords: &[&str]) -> Self {
        let mut out = VectorField::new(coords);
        for c in coords {
            out.set(c, self.coeff(c));
        }
        out
    }

    /// Parse `Σ k_c * dc`, e.g. `2*t*dt + x*dx`, over the given coordinates.
    pub fn parse(text: &str, coords: &[&str], env: &Env) -> Result<Self, ExprError> {
        let e = parse(text, env)?;
        let dirs: Vec<String> = coords.iter().map(|c| format!("d{c}")).collect();
        let names: Vec<&str> = dirs.iter().map(String::as_str).collect();
        let mut out = VectorField::new(coords);
        for (m, k) in collect(&e, &names)? {
            let Some(pos) = names
                .iter()
                .position(|d| m.exponent(d) == 1)
                .filter(|_| m.degree() == 1)
            else {
                return Err(ExprError::NonPolynomial(m.to_string()));
            };
            out.set(coords[pos], k);
        }
        Ok(out)
    }

    fn coord_strings(&self) -> Vec<String> {
        self.coords.iter().map(|c| c.to_string()).collect()
    }

    /// Directional derivative of a function of the coordinates.
    pub fn act(&self, e: &Expr) -> Expr {
        self.coeffs.iter().map(|(c, k)| k * &e.diff(c)).sum()
    }

    pub fn map(&self, f: impl Fn(&Expr) -> Expr) -> Self {
        let mut out = VectorField {
            coords: self.coords.clone(),
            coeffs: BTreeMap::new(),
        };
        for (c, e) in &self.coeffs {
            let v = f(e);
            if !v.is_zero() {
                out.coeffs.insert(c.clone(), v);
            }
        }
        out
    }

    pub fn scale(&self, k: &Expr) -> Self {
        self.map(|e| e * k)
    }

    pub fn add(&self, other: &VectorField) -> Result<Self, FieldError> {
        self.check_same(other)?;
        let mut out = self.clone();
        for c in &self.coords {
            out.set(c, self.coeff(c) + other.coeff(c));
        }
        Ok(out)
    }

    pub fn sub(&self, other: &VectorField) -> Result<Self, FieldError> {
        self.add(&other.scale(&Expr::int(-1)))
    }

    fn check_same(&self, other: &VectorField) -> Result<(), FieldError> {
        if self.coords != other.coords {
            return Err(FieldError::CoordinateMismatch(
                self.coord_strings(),
                other.coord_strings(),
            ));
        }
        Ok(())
    }

    /// Lie bracket `[v, w] = v(w) − w(v)`, componentwise.
    pub fn commutator(&self, w: &VectorField) -> Result<VectorField, FieldError> {
        self.check_same(w)?;
        let mut out = VectorField {
            coords: self.coords.clone(),
            coeffs: BTreeMap::new(),
        };
        for c in &self.coords {
            let k = self.act(&w.coeff(c)) - w.act(&self.coeff(c));
            out.set(c, k);
        }
        Ok(out)
    }

    /// Whether `self` is a combination of `basis` with rational constant
    /// coefficients. Terms are compared after stripping their numeric
    /// factor, so symbolic constants count as independent functions.
    pub fn in_span(&self, basis: &[VectorField]) -> Result<bool, FieldError> {
        use crate::classify::linalg::{rank, split_term};
        let mut keys: Vec<(Symbol, Expr)> = Vec::new();
        let mut entries = Vec::new();
        for v in basis.iter().chain(std::iter::once(self)) {
            self.check_same(v)?;
            let mut row = BTreeMap::new();
            for c in &self.coords {
                for t in v.coeff(c).terms() {
                    let (k, q) = split_term(&t);
                    let key = (c.clone(), k);
                    let i = keys.iter().position(|x| *x == key).unwrap_or_else(|| {
                        keys.push(key);
                        keys.len() - 1
                    });
                    *row.entry(i).or_insert_with(crate::expr::Rational::default) += q;
                }
            }
            entries.push(row);
        }
        let dense: Vec<Vec<crate::expr::Rational>> = entries
            .iter()
            .map(|row| {
                (0..keys.len())
                    .map(|i| row.get(&i).cloned().unwrap_or_default())
                    .collect()
            })
            .collect();
        Ok(rank(&dense[..basis.len()].to_vec()) == rank(&dense))
    }

    pub fn normalized_eq(&self, other: &VectorField) -> bool {
        self.coords == other.coords && self.sub(other).map(|d| d.is_zero()).unwrap_or(false)
    }
}

impl fmt::Display for VectorField {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.coeffs.is_empty() {
            return f.write_str("0");
        }
        let parts: Vec<String> = self
            .coords
            .iter()
            .filter_map(|c| {
                let k = self.coeffs.get(c)?;
                Some(if k.is_one() {
                    format!("d{c}")
                } else if (-k.clone()).is_one() {
                    format!("-d{c}")
                } else if matches!(k, Expr::Add(_)) {
                    format!("({k})*d{c}")
                } else {
                    format!("{k}*d{c}")
                })
            })
            .collect();
        f.write_str(&parts.join(" + ").replace("+ -", "- "))
    }
}

/// Second prolongation restricted to the coefficients that evolution
/// equations of second order need.
#[derive(Debug, Clone)]
pub struct ProlongedField {
    pub base: VectorField,
    pub eta_t: Expr,
    pub eta_x: Expr,
    pub eta_xx: Expr,
    /// First prolongation of the arbitrary-element directions along each
    /// auxiliary condition, restricted to the auxiliary system.
    pub aux: Vec<(Auxiliary, Expr)>,
}

/// Prolong `vf` by the general prolongation formula.
///
/// Base coefficients are the components along `t`, `x`, `u`. Components
/// along arbitrary elements (symbols named like the class's elements) are
/// prolonged along the class's auxiliary conditions with the total
/// derivative reduced to the partial one.
pub fn prolong(vf: &VectorField, cls: &EquationClass) -> Result<ProlongedField, FieldError> {
    let js = JetSpace::new();
    let tau = vf.coeff("t");
    let xi = vf.coeff("x");
    let eta = vf.coeff("u");
    let w = &eta - &(&tau * &Expr::sym("u_t")) - &xi * &Expr::sym("u_x");
    let eta_t =
        js.total_derivative(&w, "t")? + &tau * &Expr::sym("u_tt") + &xi * &Expr::sym("u_tx");
    let wx = js.total_derivative(&w, "x")?;
    let eta_x = &wx + &(&tau * &Expr::sym("u_tx")) + &xi * &Expr::sym("u_xx");
    let eta_xx =
        js.total_derivative(&wx, "x")? + &tau * &Expr::sym("u_txx") + &xi * &Expr::sym("u_xxx");

    let mut aux = Vec::new();
    for a in &cls.auxiliary {
        let Some(sig) = cls.element(&a.element) else {
            continue;
        };
        if !vf.coords().contains(&a.element.as_str()) {
            continue;
        }
        let mut e = vf.coeff(&a.element).diff(&a.variable);
        for c in sig.params.iter() {
            if vf.coords().contains(&&**c) {
                let name = format!("{}_{}", a.element, c);
                e = e - vf.coeff(c).diff(&a.variable) * Expr::sym(&name);
            }
        }
        aux.push((a.clone(), e));
    }
    Ok(ProlongedField {
        base: vf.clone(),
        eta_t,
        eta_x,
        eta_xx,
        aux,
    })
}

impl ProlongedField {
    /// `Q^(2) e`: the prolonged field applied to `e`.
    pub fn apply(&self, e: &Expr) -> Result<Expr, FieldError> {
        for bad in ["u_tt", "u_tx", "u_txx", "u_xxx"] {
            if e.contains_symbol(bad) {
                return Err(FieldError::JetOrderExceeded(bad.into()));
            }
        }
        let mut terms = vec![self.base.act(e)];
        for (j, k) in [
            ("u_t", &self.eta_t),
            ("u_x", &self.eta_x),
            ("u_xx", &self.eta_xx),
        ] {
            let d = e.diff(j);
            if !d.is_zero() {
                terms.push(k * &d);
            }
        }
        Ok(Expr::add(terms))
    }
}
