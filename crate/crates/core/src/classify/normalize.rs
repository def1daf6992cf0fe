//! Reduction of one- and two-dimensional subalgebras to the optimal lists,
//! following the case analysis over the rank of the coefficient matrix.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use num_traits::Zero;

use crate::expr::{Expr, Oracle, Rational};
use crate::fields::{EquivTransform, UMap};

use super::catalog::straightener;
use super::linalg::{inverse2, rank, row_relations, solve_rows, vectorize};
use super::structure::is_closed;
use super::{ClassifyError, Element};

/// Entries of the optimal lists: `1D-1..1D-4`, `2D-1..2D-8` and the
/// appropriate higher-dimensional subalgebras `HD-1..HD-5`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum ListId {
    One(u8),
    Two(u8),
    Higher(u8),
}

impl ListId {
    pub fn all() -> Vec<ListId> {
        let mut v: Vec<ListId> = (1..=4).map(ListId::One).collect();
        v.extend((1..=8).map(ListId::Two));
        v.extend((1..=5).map(ListId::Higher));
        v
    }

    /// Names of the parameters of the list entry.
    pub fn parameters(self) -> &'static [&'static str] {
        match self {
            ListId::One(1) => &["a", "delta"],
            ListId::One(2) => &["delta_tilde", "delta"],
            ListId::One(3) => &["delta"],
            ListId::Two(1) => &["delta_hat", "delta"],
            ListId::Two(2) => &["a"],
            ListId::Two(3) => &["a", "delta"],
            ListId::Two(4) => &["delta", "delta_tilde"],
            ListId::Two(5) => &["a", "b"],
            ListId::Two(6) => &["delta", "b"],
            ListId::Two(7) => &["delta"],
            ListId::Higher(2) => &["b"],
            ListId::Higher(3) => &["a"],
            ListId::Higher(4) => &["delta"],
            _ => &[],
        }
    }
}

impl fmt::Display for ListId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ListId::One(n) => write!(f, "1D-{n}"),
            ListId::Two(n) => write!(f, "2D-{n}"),
            ListId::Higher(n) => write!(f, "HD-{n}"),
        }
    }
}

impl FromStr for ListId {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        ListId::all()
            .into_iter()
            .find(|id| id.to_string() == s)
            .ok_or_else(|| format!("unknown list id `{s}`"))
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct CanonicalSubalgebra {
    pub list_id: ListId,
    pub params: BTreeMap<String, Expr>,
    pub basis: Vec<Element>,
}

fn el(text: &str) -> Element {
    Element::parse(text).expect("canonical form parses")
}

/// Basis of a list entry with the given parameter values.
pub fn canonical(
    list_id: ListId,
    params: &BTreeMap<String, Expr>,
) -> Result<CanonicalSubalgebra, ClassifyError> {
    let get = |name: &str| -> Result<Expr, ClassifyError> {
        params
            .get(name)
            .cloned()
            .ok_or_else(|| ClassifyError::MissingParameter(name.into()))
    };
    let mut used = BTreeMap::new();
    for &name in list_id.parameters() {
        used.insert(name.to_string(), get(name)?);
    }
    let p = |name: &str| used[name].clone();
    let g = |h: Expr| Element::g(h);
    let u = Expr::sym("u");
    let basis = match list_id {
        ListId::One(1) => vec![Element::big_dx()
            .add(&Element::big_dt().scale(&p("a")))
            .sub(&g(p("delta")))],
        ListId::One(2) => vec![Element::big_dt()
            .add(&Element::dx().scale(&p("delta_tilde")))
            .sub(&g(p("delta")))],
        ListId::One(3) => vec![Element::dx().sub(&g(p("delta")))],
        ListId::One(4) => vec![el("G(1)")],
        ListId::Two(1) => vec![
            Element::big_dx().sub(&g(p("delta_hat"))),
            Element::big_dt().sub(&g(p("delta"))),
        ],
        ListId::Two(2) => vec![
            Element::big_dx()
                .add(&Element::big_dt().scale(&p("a")))
                .add(&g(u)),
            el("dx - G(1)"),
        ],
        ListId::Two(3) => vec![
            Element::big_dx()
                .add(&Element::big_dt().scale(&p("a")))
                .sub(&g(p("delta"))),
            el("dx"),
        ],
        ListId::Two(4) => vec![
            Element::big_dt().sub(&g(p("delta"))),
            Element::dx().sub(&g(p("delta_tilde"))),
        ],
        ListId::Two(5) => vec![
            Element::big_dx()
                .add(&Element::big_dt().scale(&p("a")))
                .add(&g(&p("b") * &u)),
            el("G(1)"),
        ],
        ListId::Two(6) => vec![
            Element::big_dt()
                .sub(&Element::dx().scale(&p("delta")))
                .add(&g(&p("b") * &u)),
            el("G(1)"),
        ],
        ListId::Two(7) => vec![Element::dx().sub(&g(&p("delta") * &u)), el("G(1)")],
        ListId::Two(8) => vec![el("G(1)"), el("G(u)")],
        ListId::Higher(1) => vec![el("Dx + G(2)"), el("dx"), el("Dt - G(1)")],
        ListId::Higher(2) => vec![
            Element::big_dx()
                .add(&Element::big_dt().scale(&Expr::int(2)))
                .add(&g(&p("b") * &u)),
            el("dx"),
            el("G(1)"),
        ],
        ListId::Higher(3) => vec![
            Element::big_dx().add(&Element::big_dt().scale(&p("a"))),
            el("G(1)"),
            el("G(u)"),
        ],
        ListId::Higher(4) => vec![
            Element::dx().sub(&Element::big_dt().scale(&p("delta"))),
            el("G(1)"),
            el("G(u)"),
        ],
        ListId::Higher(5) => vec![el("Dx + 2*Dt"), el("dx"), el("G(1)"), el("G(u)")],
        other => return Err(ClassifyError::Unexpected(format!("no list entry {other}"))),
    };
    Ok(CanonicalSubalgebra {
        list_id,
        params: used,
        basis,
    })
}

impl CanonicalSubalgebra {
    /// Parameter ranges of the lists: `δ, δ̃ ∈ {0, 1}`, and `δ̂ ∈ {0, 1}`
    /// when `δ = 0`. Symbolic values are accepted.
    pub fn params_in_range(&self) -> bool {
        let binary = |e: &Expr| {
            e.as_rational()
                .is_none_or(|q| q.is_zero() || *q == Rational::from_integer(1.into()))
        };
        let ok = self
            .params
            .iter()
            .filter(|(k, _)| *k == "delta" || *k == "delta_tilde")
            .all(|(_, v)| binary(v));
        let hat = match (self.params.get("delta_hat"), self.params.get("delta")) {
            (Some(h), Some(d)) if d.is_zero() => binary(h),
            _ => true,
        };
        ok && hat
    }
}

impl fmt::Display for CanonicalSubalgebra {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.basis.iter().map(|e| e.to_string()).collect();
        write!(f, "{}: <{}>", self.list_id, parts.join(", "))
    }
}

/// One step of a normalization chain.
#[derive(Debug, Clone, PartialEq)]
pub enum WitnessStep {
    /// Drop the `∂_t` components.
    Project,
    /// Replace the basis by `new_i = Σ_j m_ij old_j`.
    Basis { matrix: Vec<Vec<Expr>> },
    /// Push every basis element forward by an equivalence transformation.
    Push {
        label: String,
        transform: EquivTransform,
    },
}

impl fmt::Display for WitnessStep {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            WitnessStep::Project => f.write_str("project out dt"),
            WitnessStep::Basis { matrix } => {
                let rows: Vec<String> = matrix
                    .iter()
                    .map(|r| {
                        r.iter()
                            .map(|e| e.to_string())
                            .collect::<Vec<_>>()
                            .join(", ")
                    })
                    .collect();
                write!(f, "basis change [{}]", rows.join("; "))
            }
            WitnessStep::Push { label, .. } => write!(f, "push-forward {label}"),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct NormalizationWitness {
    pub input: Vec<Element>,
    pub steps: Vec<WitnessStep>,
}

fn same(a: &Element, b: &Element) -> bool {
    let o = Oracle::default();
    [
        (&a.a0, &b.a0),
        (&a.a1, &b.a1),
        (&a.a2, &b.a2),
        (&a.a3, &b.a3),
        (&a.h, &b.h),
    ]
    .iter()
    .all(|(x, y)| x == y || o.equal(x, y).holds())
}

fn combine(basis: &[Element], matrix: &[Vec<Expr>]) -> Vec<Element> {
    matrix
        .iter()
        .map(|row| {
            row.iter()
                .zip(basis)
                .fold(Element::zero(), |acc, (k, e)| acc.add(&e.scale(k)))
        })
        .collect()
}

impl NormalizationWitness {
    /// Apply the chain to the input basis, realizing every push-forward as
    /// a change of coordinates of the vector fields on `(t, x, u, f, g)`.
    pub fn replay(&self) -> Result<Vec<Element>, ClassifyError> {
        let mut cur = self.input.clone();
        for step in &self.steps {
            cur = match step {
                WitnessStep::Project => cur.iter().map(Element::ess).collect(),
                WitnessStep::Basis { matrix } => combine(&cur, matrix),
                WitnessStep::Push { label, transform } => {
                    let p = transform.to_point();
                    cur.iter()
                        .map(|e| {
                            let v = p.pushforward(&e.to_field())?;
                            Element::from_field(&v).ok_or_else(|| {
                                ClassifyError::Witness(format!("{label} leaves the algebra on {e}"))
                            })
                        })
                        .collect::<Result<_, _>>()?
                }
            };
        }
        Ok(cur)
    }

    pub fn verify(&self, target: &CanonicalSubalgebra) -> Result<(), ClassifyError> {
        let out = self.replay()?;
        if out.len() != target.basis.len() {
            return Err(ClassifyError::Witness("basis length changed".into()));
        }
        for (a, b) in out.iter().zip(&target.basis) {
            if !same(a, b) {
                return Err(ClassifyError::Witness(format!(
                    "replay gives {a}, expected {b}"
                )));
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone)]
pub struct Normalization {
    pub canonical: CanonicalSubalgebra,
    pub witness: NormalizationWitness,
    /// Branches taken, in order.
    pub trace: Vec<String>,
}

/// Working state: the current basis together with the chain producing it.
struct Run {
    basis: Vec<Element>,
    witness: NormalizationWitness,
    trace: Vec<String>,
}

fn is_zero(e: &Expr) -> bool {
    e.is_zero() || Oracle::default().is_zero(e).holds()
}

/// Exact value of an expression the oracle reports free of `u`.
fn settle(e: &Expr) -> Result<Expr, ClassifyError> {
    if !e.contains_symbol("u") {
        return Ok(e.clone());
    }
    if !is_zero(&e.diff("u")) {
        return Err(ClassifyError::Unexpected(format!("{e} is not constant")));
    }
    Ok(e.subs("u", &Expr::one()))
}

/// `h = b u + c` with exact `b`, `c`.
fn affine_parts(h: &Expr) -> Result<(Expr, Expr), ClassifyError> {
    let b = settle(&h.diff("u"))?;
    let c = settle(&(h - &(&b * &Expr::sym("u"))))?;
    Ok((b, c))
}

fn identity(n: usize) -> Vec<Vec<Expr>> {
    (0..n)
        .map(|i| {
            (0..n)
                .map(|j| if i == j { Expr::one() } else { Expr::zero() })
                .collect()
        })
        .collect()
}

fn recip(e: &Expr) -> Expr {
    Expr::one() / e.clone()
}

impl Run {
    fn new(input: &[Element]) -> Self {
        Run {
            basis: input.to_vec(),
            witness: NormalizationWitness {
                input: input.to_vec(),
                steps: Vec::new(),
            },
            trace: Vec::new(),
        }
    }

    fn note(&mut self, s: impl Into<String>) {
        self.trace.push(s.into());
    }

    fn project(&mut self) {
        if self.basis.iter().any(|e| !e.a0.is_zero()) {
            self.basis = self.basis.iter().map(Element::ess).collect();
            self.witness.steps.push(WitnessStep::Project);
        }
    }

    fn change_basis(&mut self, matrix: Vec<Vec<Expr>>) {
        if matrix == identity(self.basis.len()) {
            return;
        }
        self.basis = combine(&self.basis, &matrix);
        self.witness.steps.push(WitnessStep::Basis { matrix });
    }

    fn scale(&mut self, i: usize, k: Expr) {
        let mut m = identity(self.basis.len());
        m[i][i] = k;
        self.change_basis(m);
    }

    /// `v_i += k v_j`
    fn add_multiple(&mut self, i: usize, j: usize, k: Expr) {
        if k.is_zero() {
            return;
        }
        let mut m = identity(self.basis.len());
        m[i][j] = k;
        self.change_basis(m);
    }

    fn swap(&mut self) {
        self.change_basis(vec![
            vec![Expr::zero(), Expr::one()],
            vec![Expr::one(), Expr::zero()],
        ]);
    }

    /// `x̃ = x + b0`: `a3 ↦ a3 − b0 a1`.
    fn translate_x(&mut self, b0: Expr) {
        if b0.is_zero() {
            return;
        }
        for e in &mut self.basis {
            e.a3 = &e.a3 - &(&b0 * &e.a1);
        }
        self.witness.steps.push(WitnessStep::Push {
            label: format!("T^x({b0})"),
            transform: EquivTransform::translate_x(b0),
        });
    }

    /// `x̃ = b1 x`: `a3 ↦ b1 a3`.
    fn scale_x(&mut self, b1: Expr) {
        if b1.is_one() {
            return;
        }
        for e in &mut self.basis {
            e.a3 = &e.a3 * &b1;
        }
        self.witness.steps.push(WitnessStep::Push {
            label: format!("D^x({b1})"),
            transform: EquivTransform::scale_x(b1),
        });
    }

    /// Push by `G(U)` with `U` inverse to a solution of `Ũ_u = sign·h_i(Ũ)`,
    /// which turns `h_i` into `sign`.
    fn straighten(&mut self, i: usize, sign: i64) -> Result<(), ClassifyError> {
        let target = Expr::int(sign);
        let h = self.basis[i].h.clone();
        if h == target {
            return Ok(());
        }
        let ut = straightener(&(&h * &target))
            .ok_or_else(|| ClassifyError::OutsideCatalog(h.to_string()))?;
        let u_map: UMap = ut
            .inverse()
            .ok_or_else(|| ClassifyError::OutsideCatalog(h.to_string()))?;
        let ute = ut.expr();
        let jac = ute.diff("u");
        for e in &mut self.basis {
            e.h = e.h.subs("u", &ute) / jac.clone();
        }
        if !is_zero(&(&self.basis[i].h - &target)) {
            return Err(ClassifyError::Unexpected(format!(
                "straightening {h} gave {}",
                self.basis[i].h
            )));
        }
        self.basis[i].h = target;
        self.witness.steps.push(WitnessStep::Push {
            label: format!("G(U) with U^-1 = {ute}"),
            transform: EquivTransform::g(u_map),
        });
        Ok(())
    }

    fn finish(
        self,
        list_id: ListId,
        params: &[(&str, Expr)],
    ) -> Result<Normalization, ClassifyError> {
        let map: BTreeMap<String, Expr> = params
            .iter()
            .map(|(k, v)| (k.to_string(), v.clone()))
            .collect();
        let canonical = canonical(list_id, &map)?;
        for (a, b) in self.basis.iter().zip(&canonical.basis) {
            if !same(a, b) {
                return Err(ClassifyError::Unexpected(format!(
                    "reached {a}, expected {b} for {list_id}"
                )));
            }
        }
        self.witness.verify(&canonical)?;
        Ok(Normalization {
            canonical,
            witness: self.witness,
            trace: self.trace,
        })
    }
}

fn rational(e: &Expr) -> Result<Rational, ClassifyError> {
    e.as_rational().cloned().ok_or(ClassifyError::NonRational)
}

fn flag(b: bool) -> Expr {
    Expr::int(b as i64)
}

/// Reduce `⟨v⟩` to one of `1D-1..1D-4`.
pub fn normalize_1d(v: &Element) -> Result<Normalization, ClassifyError> {
    for a in [&v.a1, &v.a2, &v.a3] {
        rational(a)?;
    }
    let mut run = Run::new(std::slice::from_ref(v));
    run.project();
    let e = run.basis[0].clone();
    if e.is_zero() {
        return Err(ClassifyError::Degenerate);
    }
    let has_h = !e.h.is_zero();
    if !e.a1.is_zero() {
        run.note("a1 != 0: scale, straighten h, translate x");
        run.scale(0, recip(&e.a1));
        if has_h {
            run.straighten(0, -1)?;
        }
        let a3 = run.basis[0].a3.clone();
        run.translate_x(a3);
        let a = run.basis[0].a2.clone();
        run.finish(ListId::One(1), &[("a", a), ("delta", flag(has_h))])
    } else if !e.a2.is_zero() {
        run.note("a1 = 0, a2 != 0: scale, straighten h, scale x");
        run.scale(0, recip(&e.a2));
        if has_h {
            run.straighten(0, -1)?;
        }
        let a3 = run.basis[0].a3.clone();
        let dt = !a3.is_zero();
        if dt {
            run.scale_x(recip(&a3));
        }
        run.finish(
            ListId::One(2),
            &[("delta_tilde", flag(dt)), ("delta", flag(has_h))],
        )
    } else if !e.a3.is_zero() {
        run.note("a1 = a2 = 0, a3 != 0: scale, straighten h");
        run.scale(0, recip(&e.a3));
        if has_h {
            run.straighten(0, -1)?;
        }
        run.finish(ListId::One(3), &[("delta", flag(has_h))])
    } else {
        run.note("pure G(h): straighten h, change sign");
        run.straighten(0, -1)?;
        run.scale(0, Expr::int(-1));
        run.finish(ListId::One(4), &[])
    }
}

fn a_matrix(basis: &[Element]) -> Result<Vec<Vec<Rational>>, ClassifyError> {
    basis
        .iter()
        .map(|e| Ok(vec![rational(&e.a1)?, rational(&e.a2)?, rational(&e.a3)?]))
        .collect()
}

fn minor(a: &[Vec<Rational>], i: usize, j: usize) -> [[Rational; 2]; 2] {
    [
        [a[0][i].clone(), a[0][j].clone()],
        [a[1][i].clone(), a[1][j].clone()],
    ]
}

fn to_exprs(m: [[Rational; 2]; 2]) -> Vec<Vec<Expr>> {
    m.iter()
        .map(|r| r.iter().map(|q| Expr::rational(q.clone())).collect())
        .collect()
}

/// Reduce the two-dimensional subalgebra `⟨v1, v2⟩` to one of `2D-1..2D-8`.
pub fn normalize_2d(v1: &Element, v2: &Element) -> Result<Normalization, ClassifyError> {
    let mut run = Run::new(&[v1.clone(), v2.clone()]);
    run.project();
    let (_, rows) = vectorize(&run.basis)?;
    if rank(&rows) < 2 {
        return Err(ClassifyError::Degenerate);
    }
    if !is_closed(&run.basis)? {
        return Err(ClassifyError::NotClosed);
    }
    let a = a_matrix(&run.basis)?;
    if rank(&a) == 2 {
        if let Some(inv) = inverse2(minor(&a, 0, 1)) {
            run.note("rank A123 = 2, det A12 != 0");
            run.change_basis(to_exprs(inv));
            two_d_1(run)
        } else if let Some(inv) = inverse2(minor(&a, 0, 2)) {
            run.note("rank A123 = 2, det A12 = 0, det A13 != 0");
            run.change_basis(to_exprs(inv));
            two_d_2_3(run)
        } else {
            let inv = inverse2(minor(&a, 1, 2))
                .ok_or_else(|| ClassifyError::Unexpected("all minors vanish".into()))?;
            run.note("rank A123 = 2, det A12 = det A13 = 0, det A23 != 0");
            run.change_basis(to_exprs(inv));
            two_d_4(run)
        }
    } else if rank(&a) == 1 {
        let rel = row_relations(&a).remove(0);
        let i = if a[0].iter().any(|q| !q.is_zero()) {
            0
        } else {
            1
        };
        let mut first = vec![Expr::zero(), Expr::zero()];
        first[i] = Expr::one();
        run.note("rank A123 = 1: make v2 a pure G(h)");
        run.change_basis(vec![
            first,
            rel.iter().map(|q| Expr::rational(q.clone())).collect(),
        ]);
        two_d_rank_one(run)
    } else {
        run.note("rank A123 = 0: both elements are pure G(h)");
        two_d_8(run)
    }
}

fn require_zero(e: &Expr, what: &str) -> Result<(), ClassifyError> {
    if is_zero(e) {
        Ok(())
    } else {
        Err(ClassifyError::Unexpected(format!(
            "{what} = {e}, expected 0"
        )))
    }
}

fn two_d_1(mut run: Run) -> Result<Normalization, ClassifyError> {
    let delta = !run.basis[1].h.is_zero();
    let delta_hat = if delta {
        run.note("h2 != 0: straighten h2, h1 is then constant");
        run.straighten(1, -1)?;
        -settle(&run.basis[0].h)?
    } else if !run.basis[0].h.is_zero() {
        run.note("h2 = 0: straighten h1");
        run.straighten(0, -1)?;
        Expr::one()
    } else {
        Expr::zero()
    };
    run.basis[0].h = -delta_hat.clone();
    let a3 = run.basis[0].a3.clone();
    run.translate_x(a3);
    require_zero(&run.basis[1].a3, "a3 of v2")?;
    run.finish(
        ListId::Two(1),
        &[("delta_hat", delta_hat), ("delta", flag(delta))],
    )
}

fn two_d_2_3(mut run: Run) -> Result<Normalization, ClassifyError> {
    require_zero(&run.basis[1].a2, "a2 of v2")?;
    if !run.basis[1].h.is_zero() {
        run.note("h2 != 0: straighten h2, then h1 = u + c");
        run.straighten(1, -1)?;
        let c = settle(&(&run.basis[0].h - &Expr::sym("u")))?;
        run.basis[0].h = &Expr::sym("u") + &c;
        run.add_multiple(0, 1, c.clone());
        run.basis[0].h = Expr::sym("u");
        run.translate_x(c);
        let a = run.basis[0].a2.clone();
        run.finish(ListId::Two(2), &[("a", a)])
    } else {
        run.note("h2 = 0: straighten h1");
        let delta = !run.basis[0].h.is_zero();
        if delta {
            run.straighten(0, -1)?;
        }
        let a = run.basis[0].a2.clone();
        run.finish(ListId::Two(3), &[("a", a), ("delta", flag(delta))])
    }
}

fn two_d_4(mut run: Run) -> Result<Normalization, ClassifyError> {
    let (delta, delta_tilde);
    if !run.basis[0].h.is_zero() {
        run.note("h1 != 0: straighten h1, h2 is then constant");
        delta = true;
        run.straighten(0, -1)?;
        let k = settle(&run.basis[1].h)?;
        run.basis[1].h = k.clone();
        delta_tilde = !k.is_zero();
        if delta_tilde {
            run.scale(1, -recip(&k));
            run.basis[1].h = Expr::int(-1);
            run.scale_x(-k);
        }
    } else {
        run.note("h1 = 0: straighten h2");
        delta = false;
        delta_tilde = !run.basis[1].h.is_zero();
        if delta_tilde {
            run.straighten(1, -1)?;
        }
    }
    run.finish(
        ListId::Two(4),
        &[("delta", flag(delta)), ("delta_tilde", flag(delta_tilde))],
    )
}

fn two_d_rank_one(mut run: Run) -> Result<Normalization, ClassifyError> {
    run.straighten(1, 1)?;
    let (b, c) = affine_parts(&run.basis[0].h)?;
    run.add_multiple(0, 1, -c);
    run.basis[0].h = &b * &Expr::sym("u");
    let e = run.basis[0].clone();
    if !e.a1.is_zero() {
        run.note("a1 != 0: scale, translate x");
        run.scale(0, recip(&e.a1));
        let a3 = run.basis[0].a3.clone();
        run.translate_x(a3);
        let (a, b) = (run.basis[0].a2.clone(), run.basis[0].h.diff("u"));
        run.finish(ListId::Two(5), &[("a", a), ("b", b)])
    } else if !e.a2.is_zero() {
        run.note("a1 = 0, a2 != 0: scale, scale x");
        run.scale(0, recip(&e.a2));
        let a3 = run.basis[0].a3.clone();
        let delta = !a3.is_zero();
        if delta {
            run.scale_x(-recip(&a3));
        }
        let b = run.basis[0].h.diff("u");
        run.finish(ListId::Two(6), &[("delta", flag(delta)), ("b", b)])
    } else {
        run.note("a1 = a2 = 0, a3 != 0: scale, scale x");
        run.scale(0, recip(&e.a3));
        let b = run.basis[0].h.diff("u");
        let delta = !b.is_zero();
        if delta {
            run.scale(0, -recip(&b));
            run.scale_x(-b);
        }
        run.finish(ListId::Two(7), &[("delta", flag(delta))])
    }
}

fn two_d_8(mut run: Run) -> Result<Normalization, ClassifyError> {
    let d = run.basis[0].bracket(&run.basis[1]);
    let (_, rows) = vectorize(&[run.basis[0].clone(), run.basis[1].clone(), d])?;
    let lm = solve_rows(&rows[..2].to_vec(), &rows[2]).ok_or(ClassifyError::NotClosed)?;
    if lm.iter().all(Zero::is_zero) {
        return Err(ClassifyError::Degenerate);
    }
    let i = if !lm[1].is_zero() { 0 } else { 1 };
    let mut first = vec![Expr::zero(), Expr::zero()];
    first[i] = Expr::one();
    run.note("take the derived element as v2 and straighten it");
    run.change_basis(vec![
        first,
        lm.iter().map(|q| Expr::rational(q.clone())).collect(),
    ]);
    run.straighten(1, 1)?;
    let (b, c) = affine_parts(&run.basis[0].h)?;
    if b.is_zero() {
        return Err(ClassifyError::Degenerate);
    }
    run.change_basis(vec![
        vec![recip(&b), -(&c / &b)],
        vec![Expr::zero(), Expr::one()],
    ]);
    run.basis[0].h = Expr::sym("u");
    run.swap();
    run.finish(ListId::Two(8), &[])
}

/// Dispatch on the dimension of the basis.
pub fn normalize(basis: &[Element]) -> Result<Normalization, ClassifyError> {
    match basis {
        [v] => normalize_1d(v),
        [v1, v2] => normalize_2d(v1, v2),
        _ => Err(ClassifyError::Unexpected(format!(
            "normalization of {}-dimensional bases",
            basis.len()
        ))),
    }
}
