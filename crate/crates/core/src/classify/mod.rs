//! The equivalence algebra `⟨∂_t, ∂_x, D^t, D^x, G(h)⟩`, its adjoint
//! actions and the classification of its low-dimensional subalgebras.

mod adjoint;
mod catalog;
pub(crate) mod linalg;
mod normalize;
mod structure;

use std::fmt;

use crate::expr::{collect, parse, Env, Expr, ExprError, Oracle};
use crate::fields::{FieldError, TransformError, VectorField, EXTENDED};

pub use adjoint::{
    adjoint_closed, adjoint_numeric, adjoint_pushforward, adjoint_series, SeriesResult,
};
pub use catalog::{flow, h_kind, numeric_flow, straightener, HKind};
pub use normalize::{
    canonical, normalize, normalize_1d, normalize_2d, CanonicalSubalgebra, ListId, Normalization,
    NormalizationWitness, WitnessStep,
};
pub use structure::{
    appropriateness, contains, is_closed, m_value, span_coefficients, AppropriatenessReport,
};

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum ClassifyError {
    #[error("function `{0}` is outside the flow catalog")]
    OutsideCatalog(String),
    #[error("basis is not closed under the commutator")]
    NotClosed,
    #[error("missing parameter `{0}`")]
    MissingParameter(String),
    #[error("basis is linearly dependent or empty")]
    Degenerate,
    #[error("coefficients must be rational numbers")]
    NonRational,
    #[error("unexpected form after normalization: {0}")]
    Unexpected(String),
    #[error("witness replay failed: {0}")]
    Witness(String),
    #[error("numeric flow left its domain")]
    Flow,
    #[error(transparent)]
    Transform(#[from] TransformError),
    #[error("{0}")]
    Field(String),
    #[error(transparent)]
    Expr(#[from] ExprError),
}

impl From<FieldError> for ClassifyError {
    fn from(e: FieldError) -> Self {
        ClassifyError::Field(e.to_string())
    }
}

/// `a0 ∂_t + a1 D^x + a2 D^t + a3 ∂_x + G(h)` with
/// `D^t = t∂_t − f∂_f − g∂_g`, `D^x = x∂_x + 2f∂_f + 2g∂_g` and
/// `G(h) = h∂_u − (h_u f + h_uu g)∂_f`.
#[derive(Debug, Clone, PartialEq)]
pub struct EquivAlgebraElement {
    pub a0: Expr,
    pub a1: Expr,
    pub a2: Expr,
    pub a3: Expr,
    pub h: Expr,
}

pub type Element = EquivAlgebraElement;

impl EquivAlgebraElement {
    pub fn zero() -> Self {
        Element {
            a0: Expr::zero(),
            a1: Expr::zero(),
            a2: Expr::zero(),
            a3: Expr::zero(),
            h: Expr::zero(),
        }
    }

    pub fn dt() -> Self {
        Element {
            a0: Expr::one(),
            ..Self::zero()
        }
    }

    pub fn dx() -> Self {
        Element {
            a3: Expr::one(),
            ..Self::zero()
        }
    }

    /// `D^t`
    pub fn big_dt() -> Self {
        Element {
            a2: Expr::one(),
            ..Self::zero()
        }
    }

    /// `D^x`
    pub fn big_dx() -> Self {
        Element {
            a1: Expr::one(),
            ..Self::zero()
        }
    }

    pub fn g(h: Expr) -> Self {
        Element { h, ..Self::zero() }
    }

    pub fn add(&self, o: &Element) -> Element {
        Element {
            a0: &self.a0 + &o.a0,
            a1: &self.a1 + &o.a1,
            a2: &self.a2 + &o.a2,
            a3: &self.a3 + &o.a3,
            h: &self.h + &o.h,
        }
    }

    pub fn scale(&self, k: &Expr) -> Element {
        Element {
            a0: &self.a0 * k,
            a1: &self.a1 * k,
            a2: &self.a2 * k,
            a3: &self.a3 * k,
            h: &self.h * k,
        }
    }

    pub fn sub(&self, o: &Element) -> Element {
        self.add(&o.scale(&Expr::int(-1)))
    }

    pub fn is_zero(&self) -> bool {
        [&self.a0, &self.a1, &self.a2, &self.a3, &self.h]
            .iter()
            .all(|e| e.is_zero())
    }

    /// Component in the essential part: the `∂_t` coefficient dropped.
    pub fn ess(&self) -> Element {
        Element {
            a0: Expr::zero(),
            ..self.clone()
        }
    }

    pub fn is_pure_g(&self) -> bool {
        [&self.a0, &self.a1, &self.a2, &self.a3]
            .iter()
            .all(|e| e.is_zero())
    }

    /// Structure constants: `[∂_x, D^x] = ∂_x`, `[∂_t, D^t] = ∂_t`,
    /// `[G(h¹), G(h²)] = G(h¹h²_u − h²h¹_u)`.
    pub fn bracket(&self, w: &Element) -> Element {
        Element {
            a0: &self.a0 * &w.a2 - &self.a2 * &w.a0,
            a1: Expr::zero(),
            a2: Expr::zero(),
            a3: &self.a3 * &w.a1 - &self.a1 * &w.a3,
            h: &self.h * &w.h.diff("u") - &w.h * &self.h.diff("u"),
        }
    }

    /// Vector field on `(t, x, u, f, g)`.
    pub fn to_field(&self) -> VectorField {
        let (t, x, f, g) = (
            Expr::sym("t"),
            Expr::sym("x"),
            Expr::sym("f"),
            Expr::sym("g"),
        );
        let hu = self.h.diff("u");
        let huu = hu.diff("u");
        let k = Expr::int(2) * &self.a1 - self.a2.clone();
        VectorField::extended()
            .with("t", &self.a0 + &(&self.a2 * &t))
            .with("x", &self.a3 + &(&self.a1 * &x))
            .with("u", self.h.clone())
            .with("f", &k * &f - &hu * &f - &huu * &g)
            .with("g", &k * &g)
    }

    /// Inverse of [`to_field`](Self::to_field); `None` if the field is not
    /// of this form. The `∂_f` and `∂_g` components are compared with the
    /// identity oracle.
    pub fn from_field(v: &VectorField) -> Option<Element> {
        if v.coords() != EXTENDED {
            return None;
        }
        let free_of = |e: &Expr, vars: &[&str]| vars.iter().all(|s| !e.contains_symbol(s));
        let tau = v.coeff("t");
        let xi = v.coeff("x");
        let h = v.coeff("u");
        let a2 = tau.diff("t");
        let a0 = &tau - &(&a2 * &Expr::sym("t"));
        let a1 = xi.diff("x");
        let a3 = &xi - &(&a1 * &Expr::sym("x"));
        let all = ["t", "x", "u", "f", "g"];
        if ![&a0, &a1, &a2, &a3].iter().all(|e| free_of(e, &all))
            || !free_of(&h, &["t", "x", "f", "g"])
        {
            return None;
        }
        let e = Element { a0, a1, a2, a3, h };
        let model = e.to_field();
        let oracle = Oracle::default();
        for c in ["f", "g"] {
            if !oracle.equal(&v.coeff(c), &model.coeff(c)).holds() {
                return None;
            }
        }
        Some(e)
    }

    /// Parse `Dx + 3*Dt + 5*dx - G(2*u)`: `dt`, `dx`, `Dt`, `Dx` and `G(h)`.
    pub fn parse(text: &str) -> Result<Element, ExprError> {
        let mut rewritten = String::new();
        let mut slots = Vec::new();
        let bytes: Vec<char> = text.chars().collect();
        let mut i = 0;
        while i < bytes.len() {
            let boundary = i == 0 || !(bytes[i - 1].is_alphanumeric() || bytes[i - 1] == '_');
            if boundary && bytes[i] == 'G' && bytes.get(i + 1) == Some(&'(') {
                let mut depth = 0;
                let mut j = i + 1;
                while j < bytes.len() {
                    match bytes[j] {
                        '(' => depth += 1,
                        ')' => {
                            depth -= 1;
                            if depth == 0 {
                                break;
                            }
                        }
                        _ => {}
                    }
                    j += 1;
                }
                let inner: String = bytes[i + 2..j.min(bytes.len())].iter().collect();
                slots.push(parse(&inner, &Env::new())?);
                rewritten.push_str(&format!("Gslot{}", slots.len() - 1));
                i = j + 1;
            } else {
                rewritten.push(bytes[i]);
                i += 1;
            }
        }
        let e = parse(&rewritten, &Env::new())?;
        let mut names = vec!["dt".to_string(), "Dx".into(), "Dt".into(), "dx".into()];
        names.extend((0..slots.len()).map(|k| format!("Gslot{k}")));
        let refs: Vec<&str> = names.iter().map(String::as_str).collect();
        let mut out = Element::zero();
        for (m, k) in collect(&e, &refs)? {
            let Some(pos) = refs
                .iter()
                .position(|d| m.exponent(d) == 1)
                .filter(|_| m.degree() == 1)
            else {
                return Err(ExprError::NonPolynomial(m.to_string()));
            };
            match pos {
                0 => out.a0 = k,
                1 => out.a1 = k,
                2 => out.a2 = k,
                3 => out.a3 = k,
                s => out.h = &out.h + &(&k * &slots[s - 4]),
            }
        }
        Ok(out)
    }
}

fn coefficient_term(k: &Expr, name: &str, first: bool) -> Option<String> {
    if k.is_zero() {
        return None;
    }
    let neg = k.coefficient() < num_traits::Zero::zero();
    let body = if neg { -k.clone() } else { k.clone() };
    let s = if body.is_one() {
        name.to_string()
    } else if matches!(body, Expr::Add(_)) {
        format!("({body})*{name}")
    } else {
        format!("{body}*{name}")
    };
    Some(match (first, neg) {
        (true, false) => s,
        (true, true) => format!("-{s}"),
        (false, false) => format!(" + {s}"),
        (false, true) => format!(" - {s}"),
    })
}

impl fmt::Display for EquivAlgebraElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut out = String::new();
        for (k, name) in [
            (&self.a1, "Dx"),
            (&self.a2, "Dt"),
            (&self.a3, "dx"),
            (&self.a0, "dt"),
        ] {
            if let Some(s) = coefficient_term(k, name, out.is_empty()) {
                out.push_str(&s);
            }
        }
        if !self.h.is_zero() {
            let neg = self.h.terms()[0].coefficient() < num_traits::Zero::zero();
            let body = if neg { -self.h.clone() } else { self.h.clone() };
            out.push_str(&match (out.is_empty(), neg) {
                (true, false) => format!("G({body})"),
                (true, true) => format!("-G({body})"),
                (false, false) => format!(" + G({body})"),
                (false, true) => format!(" - G({body})"),
            });
        }
        if out.is_empty() {
            out.push('0');
        }
        f.write_str(&out)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p(s: &str) -> Expr {
        parse(s, &Env::new()).unwrap()
    }

    fn generators() -> Vec<Element> {
        vec![
            Element::dt(),
            Element::dx(),
            Element::big_dt(),
            Element::big_dx(),
            Element::g(p("1")),
            Element::g(p("u")),
            Element::g(p("u^2")),
        ]
    }

    #[test]
    fn bracket_matches_realization() {
        let gs = generators();
        for v in &gs {
            for w in &gs {
                let abstract_ = v.bracket(w).to_field();
                let concrete = v.to_field().commutator(&w.to_field()).unwrap();
                assert_eq!(abstract_, concrete, "[{v}, {w}]");
            }
        }
    }

    #[test]
    fn parse_and_print() {
        let e = Element::parse("Dx + 3*Dt + 5*dx - G(2*u)").unwrap();
        assert_eq!(
            e,
            Element {
                a1: p("1"),
                a2: p("3"),
                a3: p("5"),
                h: p("-2*u"),
                a0: Expr::zero()
            }
        );
        assert_eq!(e.to_string(), "Dx + 3*Dt + 5*dx - G(2*u)");
        assert_eq!(Element::parse("b*G(u) + G(1)").unwrap().h, p("1 + b*u"));
        assert!(Element::parse("Dx*dx").is_err());
    }

    #[test]
    fn field_round_trip() {
        for e in generators() {
            assert_eq!(Element::from_field(&e.to_field()), Some(e));
        }
        let bad = VectorField::extended().with("u", p("x"));
        assert!(Element::from_field(&bad).is_none());
    }
}
