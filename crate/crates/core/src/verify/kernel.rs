//! Kernel of the maximal Lie invariance algebras of a class.

use crate::expr::{collect, Bindings, Expr, Oracle};
use crate::fields::VectorField;
use crate::jet::EquationClass;

use super::determining::{derive, generic_ansatz};
use super::reduce::{eliminate, freeze, frozen_symbols};
use super::VerifyError;

#[derive(Debug, Clone)]
pub struct KernelConditions {
    pub ansatz: VectorField,
    /// Vanishing derivatives found before splitting by arbitrary elements.
    pub consequences: Vec<Expr>,
    /// Unknowns (or derivatives) that vanish for every member of the class.
    pub conditions: Vec<Expr>,
    /// Equations left over that are not of the eliminable form.
    pub unresolved: Vec<Expr>,
}

impl KernelConditions {
    /// Conditions violated by a concrete field `q`.
    pub fn residuals(&self, q: &VectorField) -> Vec<Expr> {
        let mut b = Bindings::new();
        for c in self.ansatz.coords() {
            if let Expr::Func(fa) = self.ansatz.coeff(c) {
                let params: Vec<&str> = fa.params.iter().map(|p| &**p).collect();
                b = b.func(&fa.name, &params, q.coeff(c));
            }
        }
        let oracle = Oracle::default();
        self.consequences
            .iter()
            .chain(&self.conditions)
            .chain(&self.unresolved)
            .map(|e| b.apply_unchecked(e))
            .filter(|e| !oracle.is_zero(e).holds())
            .collect()
    }

    pub fn admits(&self, q: &VectorField) -> bool {
        self.residuals(q).is_empty()
    }
}

/// Split the classifying equations with respect to the arbitrary elements
/// and their first derivatives, then eliminate.
pub fn kernel_conditions(cls: &EquationClass) -> Result<KernelConditions, VerifyError> {
    let ansatz = generic_ansatz();
    let d = derive(cls, &ansatz)?;
    let syms = frozen_symbols(cls);
    let mut pieces = Vec::new();
    for (_, e) in d.classifying() {
        let frozen = freeze(e, cls);
        let present: Vec<&str> = syms
            .iter()
            .map(String::as_str)
            .filter(|s| frozen.contains_symbol(s))
            .collect();
        for (_, c) in collect(&frozen, &present)? {
            pieces.push(c);
        }
    }
    let names: Vec<&str> = d.unknowns.iter().map(|s| &*s.name).collect();
    let (conditions, _, unresolved) = eliminate(&pieces, &names, &[]);
    let consequences = d.system.equations[..d.consequences]
        .iter()
        .map(|(_, e)| e.clone())
        .collect();
    Ok(KernelConditions {
        ansatz,
        consequences,
        conditions,
        unresolved,
    })
}
