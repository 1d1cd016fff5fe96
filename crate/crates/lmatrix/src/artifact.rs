//! On-disk formats: matrix JSON, construction report JSON, phi-assignment
//! JSON, and the independent file verifier.
//!
//! Matrix files are `{"field": ..., "rows": n, "cols": n, "entries": [..]}`
//! with entries rendered row-major as canonical strings: rationals `a/b`,
//! prime-field residues as decimals, number-field elements as integer
//! polynomials in `t`. Serialization is deterministic, so a parse/serialize
//! round trip is byte-identical.

use crate::construct::{ConstructionReport, PhiAssignment};
use crate::error::Error;
use crate::field::{Element, FieldCtx, FieldKind};
use crate::geometry::span;
use crate::matrix::ExactMatrix;
use crate::qpoly::QPoly;
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;
use std::path::Path;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum FieldDesc {
    Rational,
    Prime { p: u64 },
    Numberfield { modulus: String },
}

impl FieldDesc {
    pub fn to_ctx(&self) -> Result<FieldCtx, Error> {
        match self {
            FieldDesc::Rational => Ok(FieldCtx::rational()),
            FieldDesc::Prime { p } => FieldCtx::prime(*p),
            FieldDesc::Numberfield { modulus } => FieldCtx::number_field_from_str(modulus),
        }
    }

    pub fn of_ctx(ctx: &FieldCtx) -> FieldDesc {
        match ctx.kind() {
            FieldKind::Rational => FieldDesc::Rational,
            FieldKind::Prime(p) => FieldDesc::Prime { p: *p },
            FieldKind::NumberField { .. } => FieldDesc::Numberfield {
                modulus: ctx.modulus().expect("number field has a modulus").render("x"),
            },
        }
    }

    /// Parse a command-line field descriptor: `rational`, `prime:7`,
    /// `numberfield:x^2-2`.
    pub fn parse_cli(s: &str) -> Result<FieldDesc, Error> {
        if s == "rational" || s == "q" {
            return Ok(FieldDesc::Rational);
        }
        if let Some(p) = s.strip_prefix("prime:") {
            let p = p.parse::<u64>().map_err(|_| Error::Parse(format!("bad prime `{p}`")))?;
            return Ok(FieldDesc::Prime { p });
        }
        if let Some(m) = s.strip_prefix("numberfield:") {
            return Ok(FieldDesc::Numberfield { modulus: m.to_string() });
        }
        Err(Error::Parse(format!(
            "unknown field descriptor `{s}` (use rational, prime:P, numberfield:POLY)"
        )))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MatrixFile {
    pub field: FieldDesc,
    pub rows: usize,
    pub cols: usize,
    pub entries: Vec<String>,
}

impl MatrixFile {
    pub fn from_matrix(m: &ExactMatrix) -> MatrixFile {
        let ctx = m.ctx();
        MatrixFile {
            field: FieldDesc::of_ctx(ctx),
            rows: m.rows(),
            cols: m.cols(),
            entries: m.entries().iter().map(|e| ctx.render_element(e)).collect(),
        }
    }

    pub fn to_matrix(&self) -> Result<ExactMatrix, Error> {
        let ctx = self.field.to_ctx()?;
        if self.entries.len() != self.rows * self.cols {
            return Err(Error::DimensionMismatch {
                expected: self.rows * self.cols,
                got: self.entries.len(),
            });
        }
        let entries = self
            .entries
            .iter()
            .map(|s| ctx.parse_element(s))
            .collect::<Result<Vec<Element>, Error>>()?;
        ExactMatrix::new(ctx, self.rows, self.cols, entries)
    }

    pub fn read(path: &Path) -> Result<MatrixFile, Error> {
        let text = std::fs::read_to_string(path)?;
        Ok(serde_json::from_str(&text)?)
    }

    pub fn write(&self, path: &Path) -> Result<(), Error> {
        std::fs::write(path, self.to_json())?;
        Ok(())
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("matrix file serializes") + "\n"
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReportFile {
    pub construction: String,
    pub field: FieldDesc,
    pub l: Vec<String>,
    pub lambda: String,
    pub size: usize,
    pub rank_upper: usize,
    pub rank_lower: Option<usize>,
    pub rank_exact: Option<usize>,
    pub histogram: BTreeMap<String, u64>,
    pub choices: BTreeMap<String, String>,
    pub seed: Option<u64>,
}

impl ReportFile {
    pub fn of_report(r: &ConstructionReport) -> ReportFile {
        let ctx = r.matrix.ctx();
        ReportFile {
            construction: r.name.clone(),
            field: FieldDesc::of_ctx(ctx),
            l: r.declared_l.iter().map(|e| ctx.render_element(e)).collect(),
            lambda: ctx.render_element(&r.lambda),
            size: r.matrix.rows(),
            rank_upper: r.rank_upper,
            rank_lower: r.rank_lower,
            rank_exact: r.rank_exact,
            histogram: r.histogram.clone(),
            choices: r.choices.clone(),
            seed: r.seed,
        }
    }

    pub fn read(path: &Path) -> Result<ReportFile, Error> {
        let text = std::fs::read_to_string(path)?;
        Ok(serde_json::from_str(&text)?)
    }

    pub fn write(&self, path: &Path) -> Result<(), Error> {
        std::fs::write(path, self.to_json())?;
        Ok(())
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report file serializes") + "\n"
    }
}

/// Serialized phi assignment: subspaces as basis-row lists plus values.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct PhiFile {
    pub field: FieldDesc,
    pub q: u64,
    pub d: usize,
    pub s: usize,
    pub support: Vec<PhiEntry>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct PhiEntry {
    pub basis: Vec<Vec<u64>>,
    pub value: String,
}

impl PhiFile {
    pub fn to_assignment(&self) -> Result<PhiAssignment, Error> {
        let ctx = self.field.to_ctx()?;
        let mut support = Vec::with_capacity(self.support.len());
        for entry in &self.support {
            let subspace = span(self.q, self.d, &entry.basis)?;
            if subspace.dim() != entry.basis.len() {
                return Err(Error::Invalid("phi support basis rows must be independent".into()));
            }
            support.push((subspace, ctx.parse_element(&entry.value)?));
        }
        PhiAssignment::new(self.q, self.d, self.s, ctx, support)
    }

    pub fn read(path: &Path) -> Result<PhiFile, Error> {
        let text = std::fs::read_to_string(path)?;
        Ok(serde_json::from_str(&text)?)
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct VerifyCheck {
    pub name: String,
    pub ok: bool,
    pub detail: String,
}

#[derive(Debug, Clone, Serialize)]
pub struct VerifyOutcome {
    pub ok: bool,
    pub checks: Vec<VerifyCheck>,
}

impl VerifyOutcome {
    fn push(&mut self, name: &str, ok: bool, detail: String) {
        self.ok &= ok;
        self.checks.push(VerifyCheck { name: name.into(), ok, detail });
    }
}

/// Re-check a matrix file (and its sibling report when available)
/// independently of whichever builder produced it. Schema violations are
/// errors; invariant failures are listed per check, naming the offending
/// cell where applicable.
pub fn verify_file(matrix_path: &Path, report_path: Option<&Path>) -> Result<VerifyOutcome, Error> {
    let mf = MatrixFile::read(matrix_path)?;
    let mut out = VerifyOutcome { ok: true, checks: vec![] };
    let matrix = match mf.to_matrix() {
        Ok(m) => m,
        Err(e) => {
            out.push("parse", false, e.to_string());
            return Ok(out);
        }
    };
    out.push(
        "parse",
        true,
        format!("{} x {} over {:?}", matrix.rows(), matrix.cols(), mf.field),
    );
    // round trip is byte-identical
    let again = MatrixFile::from_matrix(&matrix);
    out.push(
        "round_trip",
        again == mf,
        "serialize(parse(file)) must equal the file".into(),
    );

    let Some(report_path) = report_path else {
        return Ok(out);
    };
    let report = ReportFile::read(report_path)?;
    let ctx = matrix.ctx().clone();
    out.push(
        "size",
        report.size == matrix.rows() && matrix.is_square(),
        format!("declared size {}, matrix {} x {}", report.size, matrix.rows(), matrix.cols()),
    );
    out.push("symmetry", matrix.is_symmetric(), "construction outputs are symmetric".into());
    match ctx.parse_element(&report.lambda) {
        Ok(lambda) => {
            out.push(
                "diagonal",
                matrix.diagonal_equals(&lambda),
                format!("diagonal must equal lambda = {}", report.lambda),
            );
        }
        Err(e) => out.push("diagonal", false, e.to_string()),
    }
    match report
        .l
        .iter()
        .map(|s| ctx.parse_element(s))
        .collect::<Result<Vec<_>, _>>()
    {
        Ok(declared) => match matrix.off_diagonal_violation(&declared) {
            None => out.push("membership", true, "off-diagonal entries in declared L".into()),
            Some((i, j)) => out.push(
                "membership",
                false,
                format!(
                    "entry at ({i},{j}) = {} outside declared L",
                    ctx.render_element(matrix.get(i, j))
                ),
            ),
        },
        Err(e) => out.push("membership", false, e.to_string()),
    }
    out.push(
        "histogram",
        matrix.entry_histogram(false) == report.histogram,
        "histogram must match the matrix".into(),
    );
    if let Some(lower) = report.rank_lower {
        out.push(
            "rank_lower",
            lower <= report.rank_upper,
            format!("lower {lower} <= upper {}", report.rank_upper),
        );
    }
    if let Some(exact) = report.rank_exact {
        let recomputed = matrix.rank()?;
        out.push(
            "rank_exact",
            recomputed == exact && exact <= report.rank_upper,
            format!("recomputed {recomputed}, declared {exact} <= {}", report.rank_upper),
        );
    }
    Ok(out)
}

/// Write a construction's matrix and report next to each other:
/// `<stem>.json` and `<stem>.report.json`.
pub fn write_artifact(report: &ConstructionReport, dir: &Path, stem: &str) -> Result<(), Error> {
    std::fs::create_dir_all(dir)?;
    MatrixFile::from_matrix(&report.matrix).write(&dir.join(format!("{stem}.json")))?;
    ReportFile::of_report(report).write(&dir.join(format!("{stem}.report.json")))?;
    Ok(())
}

/// Qualified minimal-polynomial parse for CLI flags.
pub fn parse_minpoly(s: &str) -> Result<QPoly, Error> {
    QPoly::parse(s)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::relations::{primitive_relation, IntRelation, LSet, PrimitiveRelation};

    #[test]
    fn matrix_round_trip_bytes() {
        let nf = FieldCtx::number_field_from_str("x^2-2").unwrap();
        let t = nf.generator().unwrap();
        let m = ExactMatrix::from_fn(nf.clone(), 2, 2, |i, j| {
            if i == j {
                nf.zero()
            } else {
                t.clone()
            }
        });
        let file = MatrixFile::from_matrix(&m);
        let json = file.to_json();
        let parsed: MatrixFile = serde_json::from_str(&json).unwrap();
        assert_eq!(parsed.to_json(), json);
        assert_eq!(parsed.to_matrix().unwrap(), m);
    }

    #[test]
    fn verify_produced_artifact_and_mutation() {
        let ctx = FieldCtx::rational();
        let l = LSet::new(ctx.clone(), vec![ctx.one(), ctx.from_i64(2)]).unwrap();
        let rel = match primitive_relation(&l).unwrap() {
            PrimitiveRelation::Found(r) => r,
            _ => unreachable!(),
        };
        let mut report = crate::construct::construct_square(&l, &rel, 5).unwrap();
        report.certify_exact().unwrap();
        let dir = std::env::temp_dir().join("lmatrix-artifact-test");
        write_artifact(&report, &dir, "square_q5").unwrap();
        let mpath = dir.join("square_q5.json");
        let rpath = dir.join("square_q5.report.json");
        let outcome = verify_file(&mpath, Some(&rpath)).unwrap();
        assert!(outcome.ok, "checks: {:?}", outcome.checks);

        // tamper with one off-diagonal entry: failure names the cell
        let mut mf = MatrixFile::read(&mpath).unwrap();
        mf.entries[1] = "7".into();
        let tampered = dir.join("tampered.json");
        mf.write(&tampered).unwrap();
        let outcome = verify_file(&tampered, Some(&rpath)).unwrap();
        assert!(!outcome.ok);
        let membership = outcome.checks.iter().find(|c| c.name == "membership").unwrap();
        assert!(!membership.ok);
        assert!(membership.detail.contains("(0,1)"));

        let _ = IntRelation::from_i64(&l, &[2, -1]).unwrap();
        std::fs::remove_dir_all(&dir).ok();
    }

    #[test]
    fn empty_matrix_trivially_valid() {
        let dir = std::env::temp_dir().join("lmatrix-artifact-empty");
        std::fs::create_dir_all(&dir).unwrap();
        let mf = MatrixFile {
            field: FieldDesc::Rational,
            rows: 0,
            cols: 0,
            entries: vec![],
        };
        let path = dir.join("empty.json");
        mf.write(&path).unwrap();
        let outcome = verify_file(&path, None).unwrap();
        assert!(outcome.ok);
        std::fs::remove_dir_all(&dir).ok();
    }

    #[test]
    fn phi_file_round_trip() {
        let json = r#"{
            "field": {"kind": "rational"},
            "q": 2, "d": 2, "s": 1,
            "support": [{"basis": [], "value": "1"}]
        }"#;
        let phi: PhiFile = serde_json::from_str(json).unwrap();
        let assignment = phi.to_assignment().unwrap();
        let report = crate::construct::grassmann_construct(&assignment).unwrap();
        assert_eq!(report.matrix.rows(), 4);
    }

    #[test]
    fn field_desc_cli() {
        assert_eq!(FieldDesc::parse_cli("rational").unwrap(), FieldDesc::Rational);
        assert_eq!(FieldDesc::parse_cli("prime:7").unwrap(), FieldDesc::Prime { p: 7 });
        assert!(matches!(FieldDesc::parse_cli("numberfield:x^2-2").unwrap(), FieldDesc::Numberfield { .. }));
        assert!(FieldDesc::parse_cli("gf64").is_err());
    }
}
