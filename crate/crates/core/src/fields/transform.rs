use std::collections::BTreeMap;
use std::fmt;

use crate::expr::{Bindings, Expr, FunctionSignature, Symbol};

use super::VectorField;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum TransformError {
    #[error("transformation has no known inverse")]
    NoInverse,
    #[error("degenerate transformation: {0} vanishes")]
    Degenerate(String),
    #[error("coordinate sets differ")]
    CoordinateMismatch,
}

/// Point transformation `z ↦ z̃ = F(z)` on an ordered coordinate list.
///
/// The forward rules are written in the source coordinates. The inverse
/// rules, when known, give the source coordinates in terms of the target
/// ones, written with the same coordinate names.
#[derive(Debug, Clone, PartialEq)]
pub struct PointTransformation {
    coords: Vec<Symbol>,
    forward: BTreeMap<Symbol, Expr>,
    inverse: Option<BTreeMap<Symbol, Expr>>,
    /// Quantities that must not vanish (Jacobian factors).
    pub nonvanishing: Vec<Expr>,
}

impl PointTransformation {
    pub fn identity(coords: &[&str]) -> Self {
        let map: BTreeMap<Symbol, Expr> = coords
            .iter()
            .map(|c| (Symbol::from(*c), Expr::sym(c)))
            .collect();
        PointTransformation {
            coords: coords.iter().map(|c| Symbol::from(*c)).collect(),
            forward: map.clone(),
            inverse: Some(map),
            nonvanishing: Vec::new(),
        }
    }

    /// Rules not listed are the identity.
    pub fn new(
        coords: &[&str],
        forward: &[(&str, Expr)],
        inverse: Option<&[(&str, Expr)]>,
    ) -> Self {
        let mut p = Self::identity(coords);
        for (c, e) in forward {
            p.forward.insert((*c).into(), e.clone());
        }
        match inverse {
            Some(inv) => {
                let m = p.inverse.as_mut().unwrap();
                for (c, e) in inv {
                    m.insert((*c).into(), e.clone());
                }
            }
            None => p.inverse = None,
        }
        p
    }

    pub fn coords(&self) -> Vec<&str> {
        self.coords.iter().map(|c| &**c).collect()
    }

    pub fn rule(&self, c: &str) -> &Expr {
        &self.forward[c]
    }

    pub fn inverse_rule(&self, c: &str) -> Option<&Expr> {
        self.inverse.as_ref().map(|m| &m[c])
    }

    fn bindings(map: &BTreeMap<Symbol, Expr>) -> Bindings {
        let mut b = Bindings::new();
        for (c, e) in map {
            b.insert_sym(c.clone(), e.clone());
        }
        b
    }

    /// Pull back a function of the target coordinates: `e(F(z))`.
    pub fn pull_back(&self, e: &Expr) -> Expr {
        Self::bindings(&self.forward).apply_unchecked(e)
    }

    /// Express a function of the source coordinates in target coordinates.
    pub fn in_target(&self, e: &Expr) -> Result<Expr, TransformError> {
        let inv = self.inverse.as_ref().ok_or(TransformError::NoInverse)?;
        Ok(Self::bindings(inv).apply_unchecked(e))
    }

    /// `self ∘ q`: apply `q` first.
    pub fn compose(&self, q: &PointTransformation) -> Result<PointTransformation, TransformError> {
        if self.coords != q.coords {
            return Err(TransformError::CoordinateMismatch);
        }
        let fb = Self::bindings(&q.forward);
        let forward = self
            .forward
            .iter()
            .map(|(c, e)| (c.clone(), fb.apply_unchecked(e)))
            .collect();
        let inverse = match (&self.inverse, &q.inverse) {
            (Some(pi), Some(qi)) => {
                let ib = Self::bindings(pi);
                Some(
                    qi.iter()
                        .map(|(c, e)| (c.clone(), ib.apply_unchecked(e)))
                        .collect(),
                )
            }
            _ => None,
        };
        let mut nonvanishing = q.nonvanishing.clone();
        nonvanishing.extend(self.nonvanishing.iter().map(|e| fb.apply_unchecked(e)));
        Ok(PointTransformation {
            coords: self.coords.clone(),
            forward,
            inverse,
            nonvanishing,
        })
    }

    pub fn invert(&self) -> Result<PointTransformation, TransformError> {
        let inverse = self.inverse.clone().ok_or(TransformError::NoInverse)?;
        let ib = Self::bindings(&inverse);
        Ok(PointTransformation {
            coords: self.coords.clone(),
            nonvanishing: self
                .nonvanishing
                .iter()
                .map(|e| ib.apply_unchecked(e))
                .collect(),
            forward: inverse,
            inverse: Some(self.forward.clone()),
        })
    }

    /// True when every forward rule is exactly its coordinate.
    pub fn is_identity(&self) -> bool {
        self.forward.iter().all(|(c, e)| *e == Expr::Sym(c.clone()))
    }

    /// Fails when a nonvanishing factor is identically zero.
    pub fn check(&self) -> Result<(), TransformError> {
        match self.nonvanishing.iter().find(|e| e.is_zero()) {
            Some(e) => Err(TransformError::Degenerate(e.to_string())),
            None => Ok(()),
        }
    }

    /// Change of coordinates of a vector field:
    /// `ṽ^c(z̃) = Σ_k v^k(z) ∂_k F^c(z)` evaluated at `z = F⁻¹(z̃)`.
    pub fn pushforward(&self, v: &VectorField) -> Result<VectorField, TransformError> {
        if v.coords() != self.coords() {
            return Err(TransformError::CoordinateMismatch);
        }
        let mut out = VectorField::new(&self.coords());
        for c in &self.coords {
            let k = v.act(&self.forward[c]);
            out.set(c, self.in_target(&k)?);
        }
        Ok(out)
    }
}

impl fmt::Display for PointTransformation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self
            .coords
            .iter()
            .map(|c| format!("{c}~ = {}", self.forward[c]))
            .collect();
        f.write_str(&parts.join(", "))
    }
}

/// Catalog of transformations of `u` with explicit inverses.
#[derive(Debug, Clone, PartialEq)]
pub enum UMap {
    /// `u ↦ scale·u + shift`
    Affine { scale: Expr, shift: Expr },
    /// `u ↦ exp(rate·u)`
    Exp { rate: Expr },
    /// `u ↦ u^exponent` on `u > 0`
    Power { exponent: Expr },
    /// `u ↦ ln u` on `u > 0`
    Ln,
    /// Applied left to right.
    Compose(Vec<UMap>),
    /// Arbitrary `U(u)`, left as an unknown function.
    Unknown(String),
}

impl UMap {
    pub fn identity() -> Self {
        UMap::Affine {
            scale: Expr::one(),
            shift: Expr::zero(),
        }
    }

    pub fn scale(k: Expr) -> Self {
        UMap::Affine {
            scale: k,
            shift: Expr::zero(),
        }
    }

    pub fn apply(&self, arg: &Expr) -> Expr {
        match self {
            UMap::Affine { scale, shift } => scale * arg + shift.clone(),
            UMap::Exp { rate } => Expr::exp(rate * arg),
            UMap::Power { exponent } => Expr::pow(arg.clone(), exponent.clone()),
            UMap::Ln => Expr::ln(arg.clone()),
            UMap::Compose(ms) => ms.iter().fold(arg.clone(), |e, m| m.apply(&e)),
            UMap::Unknown(name) => FunctionSignature::new(name, &["u"])
                .apply_to(vec![arg.clone()])
                .expect("unary signature"),
        }
    }

    /// Recognize `U(u)` among the catalog forms.
    pub fn from_expr(e: &Expr) -> Option<UMap> {
        let u = Expr::sym("u");
        let free = |k: &Expr| !k.contains_symbol("u");
        match e {
            Expr::Exp(arg) if free(&arg.diff("u")) && arg.subs("u", &Expr::zero()).is_zero() => {
                Some(UMap::Exp {
                    rate: arg.diff("u"),
                })
            }
            Expr::Pow(b, k) if **b == u && free(k) => Some(UMap::Power {
                exponent: (**k).clone(),
            }),
            Expr::Ln(arg) if **arg == u => Some(UMap::Ln),
            _ if free(&e.diff("u")) => Some(UMap::Affine {
                scale: e.diff("u"),
                shift: e.subs("u", &Expr::zero()),
            }),
            _ => None,
        }
    }

    /// `U(u)` as an expression in `u`.
    pub fn expr(&self) -> Expr {
        self.apply(&Expr::sym("u"))
    }

    pub fn inverse(&self) -> Option<UMap> {
        Some(match self {
            UMap::Affine { scale, shift } => {
                if scale.is_zero() {
                    return None;
                }
                let s = Expr::one() / scale.clone();
                UMap::Affine {
                    shift: -(shift * &s),
                    scale: s,
                }
            }
            UMap::Exp { rate } => {
                if rate.is_zero() {
                    return None;
                }
                UMap::Compose(vec![UMap::Ln, UMap::scale(Expr::one() / rate.clone())])
            }
            UMap::Power { exponent } => {
                if exponent.is_zero() {
                    return None;
                }
                UMap::Power {
                    exponent: Expr::one() / exponent.clone(),
                }
            }
            UMap::Ln => UMap::Exp { rate: Expr::one() },
            UMap::Compose(ms) => UMap::Compose(
                ms.iter()
                    .rev()
                    .map(|m| m.inverse())
                    .collect::<Option<_>>()?,
            ),
            UMap::Unknown(_) => return None,
        })
    }
}

/// Element of the equivalence group of `u_t = f u_x^2 + g u_xx`:
/// `t̃ = A1 t + A0`, `x̃ = B1 x + B0`, `ũ = U(u)`,
/// `f̃ = B1²/(A1 U_u) (f − U_uu g/U_u)`, `g̃ = B1² g/A1`.
#[derive(Debug, Clone, PartialEq)]
pub struct EquivTransform {
    pub a0: Expr,
    pub a1: Expr,
    pub b0: Expr,
    pub b1: Expr,
    pub u_map: UMap,
}

impl Default for EquivTransform {
    fn default() -> Self {
        EquivTransform {
            a0: Expr::zero(),
            a1: Expr::one(),
            b0: Expr::zero(),
            b1: Expr::one(),
            u_map: UMap::identity(),
        }
    }
}

impl EquivTransform {
    pub fn translate_t(a0: Expr) -> Self {
        EquivTransform {
            a0,
            ..Self::default()
        }
    }

    pub fn translate_x(b0: Expr) -> Self {
        EquivTransform {
            b0,
            ..Self::default()
        }
    }

    pub fn scale_t(a1: Expr) -> Self {
        EquivTransform {
            a1,
            ..Self::default()
        }
    }

    pub fn scale_x(b1: Expr) -> Self {
        EquivTransform {
            b1,
            ..Self::default()
        }
    }

    pub fn g(u_map: UMap) -> Self {
        EquivTransform {
            u_map,
            ..Self::default()
        }
    }

    pub fn i_t() -> Self {
        Self::scale_t(Expr::int(-1))
    }

    pub fn i_x() -> Self {
        Self::scale_x(Expr::int(-1))
    }

    pub fn i_u() -> Self {
        Self::g(UMap::scale(Expr::int(-1)))
    }

    /// `(f̃, g̃)` as functions of the source point and `(f, g)`.
    fn element_rules(&self, f: &Expr, g: &Expr) -> (Expr, Expr) {
        let u = self.u_map.expr();
        let uu = u.diff("u");
        let uuu = uu.diff("u");
        let b2a = Expr::pow(self.b1.clone(), Expr::int(2)) / self.a1.clone();
        let ft = &b2a / &uu * (f - &(&uuu / &uu * g));
        let gt = &b2a * g;
        (ft, gt)
    }

    pub fn inverse(&self) -> Option<EquivTransform> {
        let a1 = Expr::one() / self.a1.clone();
        let b1 = Expr::one() / self.b1.clone();
        Some(EquivTransform {
            a0: -(&self.a0 * &a1),
            b0: -(&self.b0 * &b1),
            a1,
            b1,
            u_map: self.u_map.inverse()?,
        })
    }

    /// Realization on `(t, x, u, f, g)`.
    pub fn to_point(&self) -> PointTransformation {
        let forward = self.rules();
        let inverse = self.inverse().map(|i| i.rules());
        let fw: Vec<(&str, Expr)> = forward.iter().map(|(c, e)| (*c, e.clone())).collect();
        let iv: Option<Vec<(&str, Expr)>> = inverse.map(|m| m.into_iter().collect());
        let mut p = PointTransformation::new(&super::EXTENDED, &fw, iv.as_deref());
        p.nonvanishing = vec![
            self.a1.clone(),
            self.b1.clone(),
            self.u_map.expr().diff("u"),
        ];
        p
    }

    fn rules(&self) -> Vec<(&'static str, Expr)> {
        let (ft, gt) = self.element_rules(&Expr::sym("f"), &Expr::sym("g"));
        vec![
            ("t", &self.a1 * &Expr::sym("t") + self.a0.clone()),
            ("x", &self.b1 * &Expr::sym("x") + self.b0.clone()),
            ("u", self.u_map.expr()),
            ("f", ft),
            ("g", gt),
        ]
    }

    /// Map the equation with `(f0, g0)` to `(f̃, g̃)` written in the new
    /// variables `x`, `u`.
    pub fn transform_class_element(
        &self,
        f0: &Expr,
        g0: &Expr,
    ) -> Result<(Expr, Expr), TransformError> {
        transform_class_element(&self.to_point(), f0, g0)
    }
}

/// Image of the arbitrary elements under a point transformation on
/// `(t, x, u, f, g)`, written in the target coordinates.
pub fn transform_class_element(
    p: &PointTransformation,
    f0: &Expr,
    g0: &Expr,
) -> Result<(Expr, Expr), TransformError> {
    p.check()?;
    if g0.is_zero() {
        return Err(TransformError::Degenerate("g".into()));
    }
    let b = Bindings::new().sym("f", f0.clone()).sym("g", g0.clone());
    let ft = b.apply_unchecked(p.rule("f"));
    let gt = b.apply_unchecked(p.rule("g"));
    let strip = |e: Expr| {
        let mut m = BTreeMap::new();
        for c in ["t", "x", "u"] {
            m.insert(
                Symbol::from(c),
                p.inverse_rule(c)
                    .cloned()
                    .ok_or(TransformError::NoInverse)?,
            );
        }
        Ok(PointTransformation::bindings(&m).apply_unchecked(&e))
    };
    Ok((strip(ft)?, strip(gt)?))
}
