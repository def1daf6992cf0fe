//! Span computations on finite sets of algebra elements, and the
//! appropriateness predicates for subalgebras.

use std::collections::BTreeMap;

use crate::expr::{Bindings, Expr, Oracle, Rational};
use crate::verify::{isc_check, IscReport};

use super::linalg::{rank, row_relations, solve_rows, vectorize};
use super::{ClassifyError, Element};

const GENERIC: [(i64, i64); 8] = [
    (7, 3),
    (11, 5),
    (13, 7),
    (17, 11),
    (19, 13),
    (23, 17),
    (29, 19),
    (31, 23),
];

/// Replace free constants by fixed generic rationals so that the
/// coefficients become numbers.
fn generic(basis: &[Element]) -> Vec<Element> {
    let mut names = std::collections::BTreeSet::new();
    for e in basis {
        for c in [&e.a0, &e.a1, &e.a2, &e.a3, &e.h] {
            names.extend(c.free_symbols().into_iter().filter(|s| &**s != "u"));
        }
    }
    if names.is_empty() {
        return basis.to_vec();
    }
    let mut b = Bindings::new();
    for (name, &(n, d)) in names.iter().zip(GENERIC.iter().cycle()) {
        b = b.sym(name, Expr::frac(n, d));
    }
    let sub = |e: &Expr| b.apply_unchecked(e);
    basis
        .iter()
        .map(|e| Element {
            a0: sub(&e.a0),
            a1: sub(&e.a1),
            a2: sub(&e.a2),
            a3: sub(&e.a3),
            h: sub(&e.h),
        })
        .collect()
}

/// Coordinates of `w` in the span of `basis`, if it lies there.
pub fn span_coefficients(
    basis: &[Element],
    w: &Element,
) -> Result<Option<Vec<Rational>>, ClassifyError> {
    let mut all = basis.to_vec();
    all.push(w.clone());
    let all = generic(&all);
    let (_, rows) = vectorize(&all)?;
    let (target, rows) = rows.split_last().expect("nonempty");
    Ok(solve_rows(&rows.to_vec(), target))
}

pub fn contains(basis: &[Element], w: &Element) -> Result<bool, ClassifyError> {
    Ok(span_coefficients(basis, w)?.is_some())
}

/// Whether the span of `basis` is closed under the commutator.
pub fn is_closed(basis: &[Element]) -> Result<bool, ClassifyError> {
    for (i, v) in basis.iter().enumerate() {
        for w in &basis[i + 1..] {
            if !contains(basis, &v.bracket(w))? {
                return Ok(false);
            }
        }
    }
    Ok(true)
}

fn dimension(basis: &[Element]) -> Result<usize, ClassifyError> {
    Ok(rank(&vectorize(&generic(basis))?.1))
}

/// Basis of `span(s) ∩ ⟨D^t, G(h)⟩`.
pub fn g1_intersection(basis: &[Element]) -> Result<Vec<Element>, ClassifyError> {
    let g = generic(basis);
    let (_, rows) = vectorize(&g)?;
    let proj: Vec<Vec<Rational>> = rows
        .iter()
        .map(|r| vec![r[0].clone(), r[1].clone(), r[3].clone()])
        .collect();
    let out: Vec<Element> = row_relations(&proj)
        .into_iter()
        .map(|y| {
            y.iter().zip(basis).fold(Element::zero(), |acc, (k, e)| {
                acc.add(&e.scale(&Expr::rational(k.clone())))
            })
        })
        .filter(|e| !e.is_zero())
        .collect();
    Ok(out)
}

/// `m_s = dim(span(s) ∩ ⟨D^t, G(h)⟩)`.
pub fn m_value(basis: &[Element]) -> Result<usize, ClassifyError> {
    let g = generic(basis);
    let (_, rows) = vectorize(&g)?;
    let proj: Vec<Vec<Rational>> = rows
        .iter()
        .map(|r| vec![r[0].clone(), r[1].clone(), r[3].clone()])
        .collect();
    Ok(rank(&rows) - rank(&proj))
}

/// For three elements `a2 D^t + G(h)`, the invariant surface conditions
/// give the linear system `h f_u + (h_u + a2) f + h_uu g = 0` in
/// `(f_u, f, g)`. A nonvanishing determinant forces `g = 0`.
pub fn wronskian_forces_g_zero(elems: &[Element]) -> bool {
    if elems.len() < 3 {
        return false;
    }
    let row = |e: &Element| {
        let hu = e.h.diff("u");
        [e.h.clone(), &hu + &e.a2, hu.diff("u")]
    };
    let m: Vec<[Expr; 3]> = elems[..3].iter().map(row).collect();
    let det = &m[0][0] * &(&m[1][1] * &m[2][2] - &m[1][2] * &m[2][1])
        - &m[0][1] * &(&m[1][0] * &m[2][2] - &m[1][2] * &m[2][0])
        + &m[0][2] * &(&m[1][0] * &m[2][1] - &m[1][1] * &m[2][0]);
    !Oracle::default().is_zero(&det).holds()
}

#[derive(Debug, Clone)]
pub struct AppropriatenessReport {
    pub dim: usize,
    pub closed: bool,
    pub contains_dt: bool,
    pub m_s: usize,
    /// Elements spanning the intersection with `⟨D^t, G(h)⟩`.
    pub intersection: Vec<Element>,
    /// Some three elements of the intersection force `g = 0`.
    pub g_forced_zero: bool,
    /// For `m_s = 2` the intersection consists of pure `G(h)`.
    pub intersection_pure_g: bool,
    pub candidate: Option<IscReport>,
}

impl AppropriatenessReport {
    pub fn passes(&self) -> bool {
        self.closed
            && !self.contains_dt
            && self.m_s <= 2
            && !self.g_forced_zero
            && self.intersection_pure_g
            && self.dim <= 4
            && self.candidate.as_ref().is_none_or(|c| c.holds)
    }

    /// Named predicate outcomes, in a fixed order.
    pub fn predicates(&self) -> BTreeMap<&'static str, bool> {
        let mut m = BTreeMap::new();
        m.insert("closed", self.closed);
        m.insert("dt_excluded", !self.contains_dt);
        m.insert("m_at_most_2", self.m_s <= 2 && !self.g_forced_zero);
        m.insert("dim_at_most_4", self.dim <= 4);
        m.insert("intersection_pure_g", self.intersection_pure_g);
        if let Some(c) = &self.candidate {
            m.insert("isc", c.holds);
        }
        m
    }
}

/// Predicates required of an appropriate subalgebra, optionally with a
/// candidate solution `(f0, g0)` of its invariant surface conditions.
pub fn appropriateness(
    basis: &[Element],
    candidate: Option<(&Expr, &Expr)>,
) -> Result<AppropriatenessReport, ClassifyError> {
    let ess: Vec<Element> = basis.iter().map(Element::ess).collect();
    let intersection = g1_intersection(&ess)?;
    let m_s = m_value(&ess)?;
    let intersection_pure_g = m_s != 2
        || intersection
            .iter()
            .all(|e| e.a2.is_zero() || Oracle::default().is_zero(&e.a2).holds());
    let candidate = match candidate {
        Some((f0, g0)) => {
            Some(isc_check(basis, f0, g0).map_err(|e| ClassifyError::Field(e.to_string()))?)
        }
        None => None,
    };
    Ok(AppropriatenessReport {
        dim: dimension(basis)?,
        closed: is_closed(basis)?,
        contains_dt: contains(basis, &Element::big_dt())?,
        m_s,
        g_forced_zero: wronskian_forces_g_zero(&intersection),
        intersection,
        intersection_pure_g,
        candidate,
    })
}

impl AppropriatenessReport {
    pub fn summary(&self) -> String {
        let flags: Vec<String> = self
            .predicates()
            .iter()
            .map(|(k, v)| format!("{k}={}", if *v { "yes" } else { "no" }))
            .collect();
        format!("dim={} m_s={} {}", self.dim, self.m_s, flags.join(" "))
    }
}
