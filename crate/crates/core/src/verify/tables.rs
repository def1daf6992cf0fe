//! Machine verification of the classification tables.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::classify::{contains, Element};
use crate::expr::{parse, Env, Expr, Oracle, Rational};
use crate::fields::{VectorField, BASE};
use crate::jet::classes;

use super::determining::symmetry_residuals;
use super::isc::isc_check;
use super::VerifyError;

pub const TABLES: &str = include_str!("../../resources/tables/tables.json");

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct Correction {
    #[serde(default)]
    set: BTreeMap<String, String>,
    #[serde(default)]
    avoid: BTreeMap<String, Vec<String>>,
    #[serde(default)]
    exclude: bool,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
enum RawRemark {
    Duplicate {
        when: BTreeMap<String, String>,
        of: String,
        #[serde(default)]
        of_when: BTreeMap<String, String>,
    },
    ExtraOperator {
        when: BTreeMap<String, String>,
        operator: String,
        #[serde(default)]
        avoid: BTreeMap<String, Vec<String>>,
    },
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawRow {
    table: u8,
    case: String,
    f: String,
    g: String,
    operators: Vec<String>,
    #[serde(default)]
    avoid: BTreeMap<String, Vec<String>>,
    #[serde(default)]
    corrected: Correction,
    #[serde(default)]
    remarks: Vec<RawRemark>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawDatabase {
    functions: BTreeMap<String, Vec<String>>,
    rows: Vec<RawRow>,
    #[serde(default)]
    extras: Vec<RawRow>,
}

/// Which version of the tables to check.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Mode {
    /// The final summary theorem's adjustments applied.
    Corrected,
    /// The tables as printed, with the remarks evaluated.
    Uncorrected,
}

type Values = BTreeMap<String, Expr>;

#[derive(Debug, Clone)]
pub enum Remark {
    /// Under `when`, the arbitrary elements coincide with those of the row
    /// `of` (a `table:case` key) specialized by `of_when`.
    Duplicate {
        when: Values,
        of: String,
        of_when: Values,
    },
    /// Under `when`, the equations admit one more operator.
    ExtraOperator {
        when: Values,
        operator: Element,
        avoid: BTreeMap<String, Vec<Rational>>,
    },
}

/// One row: a subclass `(f, g)` with its lifted additional operators.
#[derive(Debug, Clone)]
pub struct ClassificationRow {
    pub table_id: u8,
    pub case: String,
    pub f: Expr,
    pub g: Expr,
    pub operators: Vec<Element>,
    /// Parameter values excluded by the row's conditions.
    pub avoid: BTreeMap<String, Vec<Rational>>,
    pub adjustments: Vec<String>,
    pub remarks: Vec<Remark>,
}

impl ClassificationRow {
    pub fn key(&self) -> String {
        format!("{}:{}", self.table_id, self.case)
    }

    pub fn projected(&self) -> Vec<VectorField> {
        self.operators
            .iter()
            .map(|e| e.to_field().project(&BASE))
            .collect()
    }

    fn specialize(&self, values: &Values) -> ClassificationRow {
        let mut out = self.clone();
        out.f = subs_all(&self.f, values);
        out.g = subs_all(&self.g, values);
        out.operators = self
            .operators
            .iter()
            .map(|e| subs_element(e, values))
            .collect();
        out
    }

    fn oracle(&self) -> Oracle {
        self.avoid
            .iter()
            .fold(Oracle::default(), |o, (k, v)| o.exclude(k, v.clone()))
    }
}

fn subs_all(e: &Expr, values: &Values) -> Expr {
    values.iter().fold(e.clone(), |acc, (k, v)| acc.subs(k, v))
}

fn subs_element(e: &Element, values: &Values) -> Element {
    Element {
        a0: subs_all(&e.a0, values),
        a1: subs_all(&e.a1, values),
        a2: subs_all(&e.a2, values),
        a3: subs_all(&e.a3, values),
        h: subs_all(&e.h, values),
    }
}

pub struct RowDatabase {
    rows: Vec<RawRow>,
    extras: Vec<RawRow>,
    env: Env,
}

fn bad(row: &RawRow, what: impl std::fmt::Display) -> VerifyError {
    VerifyError::Database(format!("table {} case {}: {what}", row.table, row.case))
}

impl RowDatabase {
    pub fn builtin() -> Self {
        Self::from_json(TABLES).expect("built-in row database")
    }

    pub fn from_json(text: &str) -> Result<Self, VerifyError> {
        let raw: RawDatabase =
            serde_json::from_str(text).map_err(|e| VerifyError::Database(e.to_string()))?;
        let mut env = Env::new();
        for (name, params) in &raw.functions {
            let ps: Vec<&str> = params.iter().map(String::as_str).collect();
            env = env.with(name, &ps);
        }
        let db = RowDatabase {
            rows: raw.rows,
            extras: raw.extras,
            env,
        };
        for r in db.rows.iter().chain(&db.extras) {
            db.build(r, Mode::Uncorrected)?;
        }
        Ok(db)
    }

    fn expr(&self, row: &RawRow, s: &str) -> Result<Expr, VerifyError> {
        parse(s, &self.env).map_err(|e| bad(row, format!("`{s}`: {e}")))
    }

    fn values(&self, row: &RawRow, m: &BTreeMap<String, String>) -> Result<Values, VerifyError> {
        m.iter()
            .map(|(k, v)| Ok((k.clone(), self.expr(row, v)?)))
            .collect()
    }

    fn rationals(
        &self,
        row: &RawRow,
        m: &BTreeMap<String, Vec<String>>,
    ) -> Result<BTreeMap<String, Vec<Rational>>, VerifyError> {
        let mut out = BTreeMap::new();
        for (k, vs) in m {
            let mut qs = Vec::new();
            for v in vs {
                let e = self.expr(row, v)?;
                qs.push(
                    e.as_rational()
                        .cloned()
                        .ok_or_else(|| bad(row, format!("`{v}` is not a number")))?,
                );
            }
            out.insert(k.clone(), qs);
        }
        Ok(out)
    }

    fn element(&self, row: &RawRow, s: &str) -> Result<Element, VerifyError> {
        Element::parse(s).map_err(|e| bad(row, format!("operator `{s}`: {e}")))
    }

    fn build(&self, row: &RawRow, mode: Mode) -> Result<Option<ClassificationRow>, VerifyError> {
        if !(1..=3).contains(&row.table) {
            return Err(bad(row, "table id out of range"));
        }
        let mut avoid = self.rationals(row, &row.avoid)?;
        let mut adjustments = Vec::new();
        let mut set = Values::new();
        if mode == Mode::Corrected {
            if row.corrected.exclude {
                return Ok(None);
            }
            set = self.values(row, &row.corrected.set)?;
            adjustments.extend(row.corrected.set.iter().map(|(k, v)| format!("{k}={v}")));
            for (k, vs) in self.rationals(row, &row.corrected.avoid)? {
                adjustments.extend(vs.iter().map(|v| format!("{k}!={v}")));
                avoid.entry(k).or_default().extend(vs);
            }
        }
        let mut remarks = Vec::new();
        for r in &row.remarks {
            remarks.push(match r {
                RawRemark::Duplicate { when, of, of_when } => Remark::Duplicate {
                    when: self.values(row, when)?,
                    of: of.clone(),
                    of_when: self.values(row, of_when)?,
                },
                RawRemark::ExtraOperator {
                    when,
                    operator,
                    avoid,
                } => Remark::ExtraOperator {
                    when: self.values(row, when)?,
                    operator: self.element(row, operator)?,
                    avoid: self.rationals(row, avoid)?,
                },
            });
        }
        let operators = row
            .operators
            .iter()
            .map(|s| self.element(row, s))
            .collect::<Result<Vec<_>, _>>()?;
        if operators.is_empty() {
            return Err(bad(row, "no operators"));
        }
        let base = ClassificationRow {
            table_id: row.table,
            case: row.case.clone(),
            f: self.expr(row, &row.f)?,
            g: self.expr(row, &row.g)?,
            operators,
            avoid,
            adjustments,
            remarks,
        };
        Ok(Some(base.specialize(&set)))
    }

    pub fn rows(&self, mode: Mode) -> Vec<ClassificationRow> {
        self.rows
            .iter()
            .filter_map(|r| self.build(r, mode).expect("validated on load"))
            .collect()
    }

    pub fn extras(&self, mode: Mode) -> Vec<ClassificationRow> {
        self.extras
            .iter()
            .filter_map(|r| self.build(r, mode).expect("validated on load"))
            .collect()
    }

    fn find(&self, key: &str) -> Option<ClassificationRow> {
        self.rows(Mode::Uncorrected)
            .into_iter()
            .find(|r| r.key() == key)
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct RowReport {
    pub table: u8,
    pub case: String,
    pub f: String,
    pub g: String,
    pub operators: Vec<String>,
    pub isc: bool,
    pub symmetry: bool,
    pub kernel: bool,
    pub residuals: Vec<String>,
    pub adjustments: Vec<String>,
}

impl RowReport {
    pub fn passes(&self) -> bool {
        self.isc && self.symmetry && self.kernel
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct Anomaly {
    pub row: String,
    pub kind: String,
    pub detail: String,
    pub detected: bool,
}

#[derive(Debug, Clone, Serialize)]
pub struct VerificationReport {
    pub mode: Mode,
    pub tables: Vec<u8>,
    pub rows: Vec<RowReport>,
    pub extras: Vec<RowReport>,
    pub anomalies: Vec<Anomaly>,
    pub passed: usize,
    pub failed: usize,
}

impl VerificationReport {
    pub fn all_pass(&self) -> bool {
        self.failed == 0 && self.extras.iter().all(RowReport::passes)
    }

    pub fn to_text(&self) -> String {
        let mut out = String::new();
        let line = |r: &RowReport| {
            let status = if r.passes() { "PASS" } else { "FAIL" };
            let mut s = format!(
                "{status} table {} case {:<4} f = {}, g = {}; {}",
                r.table,
                r.case,
                r.f,
                r.g,
                r.operators.join(", ")
            );
            if !r.adjustments.is_empty() {
                s.push_str(&format!(" [{}]", r.adjustments.join(", ")));
            }
            s.push('\n');
            for res in &r.residuals {
                s.push_str(&format!("    residual {res}\n"));
            }
            s
        };
        for r in &self.rows {
            out.push_str(&line(r));
        }
        for r in &self.extras {
            out.push_str(&format!("extra: {}", line(r)));
        }
        for a in &self.anomalies {
            let status = if a.detected {
                "DETECTED"
            } else {
                "NOT DETECTED"
            };
            out.push_str(&format!("{status} {} {}: {}\n", a.row, a.kind, a.detail));
        }
        out.push_str(&format!(
            "{} rows, {} pass, {} fail\n",
            self.rows.len(),
            self.passed,
            self.failed
        ));
        out
    }
}

/// `"1"`, `"2"`, `"3"` or `"all"`.
pub fn parse_table_selector(s: &str) -> Result<Vec<u8>, VerifyError> {
    match s {
        "all" => Ok(vec![1, 2, 3]),
        "1" | "2" | "3" => Ok(vec![s.parse().expect("digit")]),
        other => Err(VerifyError::UnknownTable(other.into())),
    }
}

fn check_row(row: &ClassificationRow) -> Result<RowReport, VerifyError> {
    let cls = classes::gen_diff();
    let oracle = row.oracle();
    let mut residuals = Vec::new();
    let isc = match isc_check(&row.operators, &row.f, &row.g) {
        Ok(r) => {
            residuals.extend(r.residuals.iter().map(|(l, e)| format!("isc {l}: {e}")));
            r.holds
        }
        Err(e) => {
            residuals.push(format!("isc: {e}"));
            false
        }
    };
    let values = [("f", &row.f), ("g", &row.g)];
    let mut symmetry = true;
    for q in row.projected() {
        let r = symmetry_residuals(&cls, &values, &q, &oracle)?;
        if !r.is_empty() {
            symmetry = false;
            residuals.extend(r.iter().map(|(m, e)| format!("symmetry {q} [{m}]: {e}")));
        }
    }
    let dt = VectorField::base().with("t", Expr::one());
    let kernel = symmetry_residuals(&cls, &values, &dt, &oracle)?.is_empty();
    Ok(RowReport {
        table: row.table_id,
        case: row.case.clone(),
        f: row.f.to_string(),
        g: row.g.to_string(),
        operators: row.projected().iter().map(ToString::to_string).collect(),
        isc,
        symmetry,
        kernel,
        residuals,
        adjustments: row.adjustments.clone(),
    })
}

fn check_remark(
    db: &RowDatabase,
    row: &ClassificationRow,
    remark: &Remark,
) -> Result<Anomaly, VerifyError> {
    match remark {
        Remark::Duplicate { when, of, of_when } => {
            let here = row.specialize(when);
            let other = db
                .find(of)
                .ok_or_else(|| VerifyError::Database(format!("no row {of}")))?
                .specialize(of_when);
            let o = Oracle::default();
            let detected = o.equal(&here.f, &other.f).holds() && o.equal(&here.g, &other.g).holds();
            Ok(Anomaly {
                row: format!("{}{}", row.key(), conditions(when)),
                kind: "duplicate".into(),
                detail: format!(
                    "(f, g) = ({}, {}) coincides with {}{}",
                    here.f,
                    here.g,
                    of,
                    conditions(of_when)
                ),
                detected,
            })
        }
        Remark::ExtraOperator {
            when,
            operator,
            avoid,
        } => {
            let mut here = row.specialize(when);
            for (k, v) in avoid {
                here.avoid
                    .entry(k.clone())
                    .or_default()
                    .extend(v.iter().cloned());
            }
            let op = subs_element(operator, when);
            let isc = isc_check(std::slice::from_ref(&op), &here.f, &here.g)
                .map(|r| r.holds)
                .unwrap_or(false);
            let q = op.to_field().project(&BASE);
            let sym = symmetry_residuals(
                &classes::gen_diff(),
                &[("f", &here.f), ("g", &here.g)],
                &q,
                &here.oracle(),
            )?
            .is_empty();
            let new = !contains(&here.operators, &op).unwrap_or(true);
            Ok(Anomaly {
                row: format!("{}{}", row.key(), conditions(when)),
                kind: "extra operator".into(),
                detail: format!(
                    "{q} admitted by (f, g) = ({}, {}) and outside the listed span",
                    here.f, here.g
                ),
                detected: isc && sym && new,
            })
        }
    }
}

fn conditions(m: &Values) -> String {
    if m.is_empty() {
        return String::new();
    }
    let parts: Vec<String> = m.iter().map(|(k, v)| format!("{k}={v}")).collect();
    format!(" [{}]", parts.join(", "))
}

pub fn verify_tables(
    db: &RowDatabase,
    tables: &[u8],
    mode: Mode,
) -> Result<VerificationReport, VerifyError> {
    let selected: Vec<ClassificationRow> = db
        .rows(mode)
        .into_iter()
        .filter(|r| tables.contains(&r.table_id))
        .collect();
    let rows = selected
        .iter()
        .map(check_row)
        .collect::<Result<Vec<_>, _>>()?;
    let extras = db
        .extras(mode)
        .iter()
        .filter(|r| tables.contains(&r.table_id))
        .map(check_row)
        .collect::<Result<Vec<_>, _>>()?;
    let mut anomalies = Vec::new();
    if mode == Mode::Uncorrected {
        for row in &selected {
            for remark in &row.remarks {
                anomalies.push(check_remark(db, row, remark)?);
            }
        }
    }
    let passed = rows.iter().filter(|r| r.passes()).count();
    Ok(VerificationReport {
        mode,
        tables: tables.to_vec(),
        failed: rows.len() - passed,
        passed,
        rows,
        extras,
        anomalies,
    })
}

/// Verify one table (`"1"`, `"2"`, `"3"`) or `"all"` against the built-in
/// database.
pub fn verify_table(table_id: &str, mode: Mode) -> Result<VerificationReport, VerifyError> {
    verify_tables(
        &RowDatabase::builtin(),
        &parse_table_selector(table_id)?,
        mode,
    )
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn database_loads_and_counts() {
        let db = RowDatabase::builtin();
        assert_eq!(db.rows(Mode::Corrected).len(), 17);
        assert_eq!(db.rows(Mode::Uncorrected).len(), 18);
    }

    #[test]
    fn corrections_are_applied() {
        let db = RowDatabase::builtin();
        let rows = db.rows(Mode::Corrected);
        let c7 = rows.iter().find(|r| r.key() == "2:7").unwrap();
        assert_eq!(c7.g, Expr::one());
        assert_eq!(c7.adjustments, ["c2=1", "delta=1"]);
        assert!(!rows.iter().any(|r| r.key() == "2:3a"));
    }

    #[test]
    fn malformed_database() {
        assert!(RowDatabase::from_json("{}").is_err());
        let bad = r#"{"functions":{},"rows":[{"table":4,"case":"1","f":"0","g":"1","operators":["dx"]}]}"#;
        assert!(RowDatabase::from_json(bad).is_err());
        let bad = r#"{"functions":{},"rows":[{"table":1,"case":"1","f":"0","g":"1","operators":["dx*Dx"]}]}"#;
        assert!(RowDatabase::from_json(bad).is_err());
    }

    #[test]
    fn table_selector() {
        assert_eq!(parse_table_selector("all").unwrap(), vec![1, 2, 3]);
        assert!(matches!(
            parse_table_selector("9"),
            Err(VerifyError::UnknownTable(_))
        ));
    }

    #[test]
    fn table_one() {
        let r = verify_table("1", Mode::Corrected).unwrap();
        assert_eq!(r.rows.len(), 5);
        assert!(r.all_pass(), "{}", r.to_text());
    }

    #[test]
    fn uncorrected_tables_and_remarks() {
        let r = verify_table("all", Mode::Uncorrected).unwrap();
        let failing: Vec<&str> = r
            .rows
            .iter()
            .filter(|r| !r.passes())
            .map(|r| r.case.as_str())
            .collect();
        assert_eq!(failing, ["3a"]);
        assert_eq!(r.anomalies.len(), 10);
        assert!(r.anomalies.iter().all(|a| a.detected), "{}", r.to_text());
    }
}
