//! On-disk formats. Complex entries are `[re, im]` pairs, row-major.

use std::fmt;

use commdil_core::cp::{FlipUnitary, KrausFamily, FLIP_ORDERING};
use commdil_core::dilation::WordEntry;
use commdil_core::product::{CovariantRep, ScalarProductSystem, Side};
use commdil_core::report::Report;
use commdil_core::{ComplexMatrix, Tolerance, C64};
use serde::{Deserialize, Serialize};

#[derive(Debug)]
pub struct FormatError(pub String);

impl fmt::Display for FormatError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for FormatError {}

impl From<commdil_core::Error> for FormatError {
    fn from(e: commdil_core::Error) -> Self {
        FormatError(e.to_string())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MatrixDoc {
    pub rows: usize,
    pub cols: usize,
    pub data: Vec<[f64; 2]>,
}

impl From<&ComplexMatrix> for MatrixDoc {
    fn from(m: &ComplexMatrix) -> Self {
        MatrixDoc {
            rows: m.rows(),
            cols: m.cols(),
            data: m.data().iter().map(|z| [z.re, z.im]).collect(),
        }
    }
}

impl TryFrom<&MatrixDoc> for ComplexMatrix {
    type Error = FormatError;

    fn try_from(doc: &MatrixDoc) -> Result<Self, FormatError> {
        if doc.data.len() != doc.rows * doc.cols {
            return Err(FormatError(format!(
                "matrix declares {}x{} but has {} entries",
                doc.rows,
                doc.cols,
                doc.data.len()
            )));
        }
        let data = doc.data.iter().map(|&[re, im]| C64::new(re, im)).collect();
        Ok(ComplexMatrix::new(doc.rows, doc.cols, data)?)
    }
}

fn matrices(docs: &[MatrixDoc]) -> Result<Vec<ComplexMatrix>, FormatError> {
    docs.iter().map(ComplexMatrix::try_from).collect()
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct KrausDoc {
    pub d: usize,
    pub ops: Vec<MatrixDoc>,
}

impl KrausDoc {
    pub fn to_family(&self) -> Result<KrausFamily, FormatError> {
        Ok(KrausFamily::new(self.d, matrices(&self.ops)?)?)
    }
}

impl From<&KrausFamily> for KrausDoc {
    fn from(k: &KrausFamily) -> Self {
        KrausDoc {
            d: k.d(),
            ops: k.ops().iter().map(MatrixDoc::from).collect(),
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct FlipDoc {
    pub n: usize,
    pub m: usize,
    pub u: MatrixDoc,
    pub ordering: String,
}

impl From<&FlipUnitary> for FlipDoc {
    fn from(f: &FlipUnitary) -> Self {
        FlipDoc {
            n: f.n,
            m: f.m,
            u: MatrixDoc::from(&f.u),
            ordering: FLIP_ORDERING.to_string(),
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SystemDoc {
    pub n: usize,
    pub m: usize,
    pub u: MatrixDoc,
}

impl SystemDoc {
    pub fn to_system(&self, tol: Tolerance) -> Result<ScalarProductSystem, FormatError> {
        Ok(ScalarProductSystem::new(
            self.n,
            self.m,
            (&self.u).try_into()?,
            tol,
        )?)
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RepDoc {
    pub h: usize,
    #[serde(rename = "T")]
    pub t: Vec<MatrixDoc>,
    #[serde(rename = "S")]
    pub s: Vec<MatrixDoc>,
}

impl RepDoc {
    pub fn to_rep(&self) -> Result<CovariantRep, FormatError> {
        Ok(CovariantRep::new(self.h, matrices(&self.t)?, matrices(&self.s)?)?)
    }
}

impl From<&CovariantRep> for RepDoc {
    fn from(r: &CovariantRep) -> Self {
        RepDoc {
            h: r.h(),
            t: r.ops(Side::T).iter().map(MatrixDoc::from).collect(),
            s: r.ops(Side::S).iter().map(MatrixDoc::from).collect(),
        }
    }
}

/// An input file: either two maps, or a product system with a representation.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(untagged)]
pub enum InputDoc {
    Pair { theta: KrausDoc, phi: KrausDoc },
    Rep { system: SystemDoc, rep: RepDoc },
}

pub fn read_input(path: &std::path::Path) -> Result<InputDoc, FormatError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| FormatError(format!("cannot read {}: {e}", path.display())))?;
    serde_json::from_str(&text).map_err(|e| {
        FormatError(format!(
            "{}: expected {{\"theta\", \"phi\"}} or {{\"system\", \"rep\"}} ({e})",
            path.display()
        ))
    })
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct IdentityDoc {
    pub name: String,
    pub max_residual: f64,
    pub window: String,
    pub threshold: f64,
}

impl IdentityDoc {
    pub fn passed(&self) -> bool {
        self.max_residual.is_finite() && self.max_residual <= self.threshold
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct WordDoc {
    pub word: String,
    /// Number of `V` and `U` letters.
    pub grade: [usize; 2],
    pub compressed: MatrixDoc,
    pub expected: MatrixDoc,
    pub residual: f64,
}

impl From<&WordEntry> for WordDoc {
    fn from(e: &WordEntry) -> Self {
        use commdil_core::dilation::Letter;
        let a = e.word.0.iter().filter(|l| matches!(l, Letter::V(_))).count();
        WordDoc {
            word: e.word.to_string(),
            grade: [a, e.word.0.len() - a],
            compressed: MatrixDoc::from(&e.compressed),
            expected: MatrixDoc::from(&e.expected),
            residual: e.residual,
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SpaceDoc {
    pub n: usize,
    pub m: usize,
    pub d: usize,
    pub depth: usize,
    pub mu: usize,
    pub dim: usize,
    pub level_sizes: Vec<usize>,
    pub valid_depth: usize,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct OperatorsDoc {
    #[serde(rename = "V")]
    pub v: Vec<MatrixDoc>,
    #[serde(rename = "U")]
    pub u: Vec<MatrixDoc>,
    #[serde(rename = "W")]
    pub w: Vec<MatrixDoc>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct IndexDoc {
    pub dims: [usize; 2],
    pub reduced: [usize; 2],
    pub index_drop: bool,
    pub flip_distance: Option<f64>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct KernelDoc {
    pub dim_ker_m: usize,
    pub dim_ker_n: usize,
    pub kernel_verdict: bool,
    pub direct_verdict: bool,
    pub complement_dims: [usize; 2],
}

/// The report written by every command.
#[derive(Debug, Clone, Default, Serialize, Deserialize)]
pub struct ReportDoc {
    pub command: String,
    #[serde(skip_serializing_if = "Vec::is_empty", default)]
    pub notes: Vec<String>,
    pub identities: Vec<IdentityDoc>,
    pub verdict: String,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub flip: Option<FlipDoc>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub kernels: Option<KernelDoc>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub space: Option<SpaceDoc>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub words: Option<Vec<WordDoc>>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub index: Option<IndexDoc>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub operators: Option<OperatorsDoc>,
}

impl ReportDoc {
    pub fn new(command: &str) -> Self {
        ReportDoc {
            command: command.to_string(),
            verdict: "pass".to_string(),
            ..ReportDoc::default()
        }
    }

    pub fn add(&mut self, report: &Report) {
        for c in &report.identities {
            self.identities.push(IdentityDoc {
                name: c.name.clone(),
                max_residual: c.max_residual,
                window: c.window.clone(),
                threshold: c.threshold,
            });
        }
        self.refresh();
    }

    pub fn add_one(&mut self, name: &str, residual: f64, window: &str, threshold: f64) {
        let mut r = Report::new();
        r.push(name, residual, window, threshold);
        self.add(&r);
    }

    fn refresh(&mut self) {
        let ok = self.identities.iter().all(IdentityDoc::passed);
        self.verdict = if ok { "pass" } else { "fail" }.to_string();
    }

    pub fn passed(&self) -> bool {
        self.verdict == "pass"
    }

    pub fn identity(&self, name: &str) -> Option<&IdentityDoc> {
        self.identities.iter().find(|c| c.name == name)
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("report serializes");
        s.push('\n');
        s
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn matrix_roundtrip() {
        let m = ComplexMatrix::from_fn(2, 3, |i, j| C64::new(i as f64, -(j as f64) / 3.0));
        let doc = MatrixDoc::from(&m);
        let text = serde_json::to_string(&doc).unwrap();
        let back: MatrixDoc = serde_json::from_str(&text).unwrap();
        assert_eq!(ComplexMatrix::try_from(&back).unwrap(), m);
    }

    #[test]
    fn matrix_size_mismatch_is_rejected() {
        let doc = MatrixDoc {
            rows: 2,
            cols: 2,
            data: vec![[1.0, 0.0]],
        };
        assert!(ComplexMatrix::try_from(&doc).is_err());
    }

    #[test]
    fn input_kinds_are_distinguished() {
        let pair = r#"{"theta":{"d":1,"ops":[{"rows":1,"cols":1,"data":[[0.5,0]]}]},
                       "phi":{"d":1,"ops":[{"rows":1,"cols":1,"data":[[0.25,0]]}]}}"#;
        assert!(matches!(
            serde_json::from_str::<InputDoc>(pair).unwrap(),
            InputDoc::Pair { .. }
        ));
        let rep = r#"{"system":{"n":1,"m":1,"u":{"rows":1,"cols":1,"data":[[1,0]]}},
                      "rep":{"h":1,"T":[{"rows":1,"cols":1,"data":[[0,0]]}],
                                    "S":[{"rows":1,"cols":1,"data":[[0,0]]}]}}"#;
        assert!(matches!(
            serde_json::from_str::<InputDoc>(rep).unwrap(),
            InputDoc::Rep { .. }
        ));
    }

    #[test]
    fn verdict_follows_thresholds() {
        let mut r = ReportDoc::new("x");
        r.add_one("a", 1e-12, "H", 1e-8);
        assert!(r.passed());
        r.add_one("b", 1e-2, "H", 1e-8);
        assert!(!r.passed());
        r.add_one("c", f64::NAN, "H", 1e-8);
        assert_eq!(r.verdict, "fail");
    }
}
