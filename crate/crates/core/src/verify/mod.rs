//! Determining systems, equivalence checks, invariant surface conditions
//! and verification of the classification tables.

mod admissible;
mod determining;
mod equiv;
mod isc;
mod kernel;
mod reduce;
mod tables;

pub use admissible::{admissible_split, AdmissibleSystem, F_NEW, G_NEW};
pub use determining::{
    derive, determining_system, generic_ansatz, invariance_condition, symmetry_residuals,
    Derivation,
};
pub use equiv::{equiv_invariance_check, EquivReport};
pub use isc::{isc_check, isc_system, IscPair, IscReport};
pub use kernel::{kernel_conditions, KernelConditions};
pub use reduce::{eliminate, freeze, frozen_symbols, kill, single_unknown, Vanishing};
pub use tables::{
    parse_table_selector, verify_table, verify_tables, Anomaly, ClassificationRow, Mode, Remark,
    RowDatabase, RowReport, VerificationReport,
};

use crate::expr::ExprError;
use crate::fields::FieldError;
use crate::jet::JetError;

#[derive(Debug, thiserror::Error)]
pub enum VerifyError {
    #[error("g vanishes identically")]
    VanishingG,
    #[error("the ansatz has no undetermined coefficients")]
    EmptyAnsatz,
    #[error("`{0}` is not an arbitrary element of the class")]
    UnknownElement(String),
    #[error("no table {0}; expected 1, 2 or 3")]
    UnknownTable(String),
    #[error("row database: {0}")]
    Database(String),
    #[error(transparent)]
    Jet(#[from] JetError),
    #[error(transparent)]
    Field(#[from] FieldError),
    #[error(transparent)]
    Expr(#[from] ExprError),
}
