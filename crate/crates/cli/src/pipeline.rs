//! Input → flip → product system → representation, recording every check.

use commdil_core::cp::{
    build_flip_unitary, commute_residual, flip_partial_isometry, pad_families, KrausFamily,
};
use commdil_core::product::{CovariantRep, ScalarProductSystem};
use commdil_core::{Error, Tolerance};

use crate::json::{FlipDoc, InputDoc, ReportDoc};

/// Bad input: exit code 2.
#[derive(Debug)]
pub struct InputError(pub String);

impl std::fmt::Display for InputError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for InputError {}

impl From<crate::json::FormatError> for InputError {
    fn from(e: crate::json::FormatError) -> Self {
        InputError(e.0)
    }
}

#[derive(Debug, Clone, Copy)]
pub struct Settings {
    pub tol: Tolerance,
    pub accept: f64,
}

/// Sorts a core error into bad input or a failed identity recorded in the
/// report. `Ok(None)` means the pipeline stops with a failing verdict.
pub fn stage<T>(report: &mut ReportDoc, r: commdil_core::Result<T>) -> Result<Option<T>, InputError> {
    let (name, residual) = match r {
        Ok(v) => return Ok(Some(v)),
        Err(Error::NotCommuting { residual }) => ("Choi commutation".to_string(), residual),
        Err(Error::NotStronglyCommuting { ker_m, ker_n }) => (
            "strong commutation (kernel dimensions)".to_string(),
            ker_m.abs_diff(ker_n) as f64,
        ),
        Err(Error::CoisometryCheckFailed { residual }) => ("coisometry identity".to_string(), residual),
        Err(Error::NotPartialIsometry { defect }) => ("flip partial isometry".to_string(), defect),
        Err(Error::ConstructionFailed { identity, residual }) => (identity, residual),
        Err(e) => return Err(InputError(e.to_string())),
    };
    report.add_one(&name, residual, "construction", 0.0);
    Ok(None)
}

/// Everything a dilation needs, plus what was learned on the way.
#[derive(Debug, Clone)]
pub struct Prepared {
    pub theta: KrausFamily,
    pub phi: KrausFamily,
    pub sys: ScalarProductSystem,
    pub rep: CovariantRep,
    /// Kraus counts as given.
    pub given: (usize, usize),
    /// Kraus counts after removing linear dependence.
    pub reduced: (usize, usize),
}

pub fn load_pair(input: &InputDoc) -> Result<(KrausFamily, KrausFamily), InputError> {
    match input {
        InputDoc::Pair { theta, phi } => {
            let (theta, phi) = (theta.to_family()?, phi.to_family()?);
            if theta.d() != phi.d() {
                return Err(InputError(format!(
                    "maps act on M_{} and M_{}",
                    theta.d(),
                    phi.d()
                )));
            }
            Ok((theta, phi))
        }
        InputDoc::Rep { rep, .. } => Ok(rep.to_rep()?.induced_cp_pair()),
    }
}

/// Commutation check on the maps; fails the report when above `accept`.
pub fn check_commute(
    report: &mut ReportDoc,
    theta: &KrausFamily,
    phi: &KrausFamily,
    accept: f64,
) -> Result<bool, InputError> {
    let Some(residual) = stage(report, commute_residual(theta, phi))? else {
        return Ok(false);
    };
    report.add_one("Choi commutation", residual, "M_d", accept);
    Ok(residual <= accept)
}

pub fn prepare(
    input: &InputDoc,
    set: Settings,
    report: &mut ReportDoc,
) -> Result<Option<Prepared>, InputError> {
    match input {
        InputDoc::Pair { .. } => prepare_pair(input, set, report),
        InputDoc::Rep { system, rep } => {
            let sys = system.to_system(set.tol)?;
            let rep = rep.to_rep()?;
            rep.check_sizes(&sys).map_err(|e| InputError(e.to_string()))?;
            let Some(residual) = stage(report, rep.commutation_residual(&sys, 1, 1))? else {
                return Ok(None);
            };
            report.add_one("representation flip relation", residual, "H", set.accept);
            if residual > set.accept {
                return Ok(None);
            }
            let (theta, phi) = rep.induced_cp_pair();
            let given = (sys.n(), sys.m());
            let reduced = (theta.reduce(set.tol).len(), phi.reduce(set.tol).len());
            report.flip = Some(FlipDoc::from(sys.flip()));
            Ok(Some(Prepared {
                theta,
                phi,
                sys,
                rep,
                given,
                reduced,
            }))
        }
    }
}

fn prepare_pair(
    input: &InputDoc,
    set: Settings,
    report: &mut ReportDoc,
) -> Result<Option<Prepared>, InputError> {
    let (theta, phi) = load_pair(input)?;
    let given = (theta.len(), phi.len());
    let (theta, phi) = (theta.reduce(set.tol), phi.reduce(set.tol));
    let reduced = (theta.len(), phi.len());
    if reduced != given {
        report.notes.push(format!(
            "Kraus families reduced from ({}, {}) to ({}, {}) operators",
            given.0, given.1, reduced.0, reduced.1
        ));
    }
    if !check_commute(report, &theta, &phi, set.accept)? {
        return Ok(None);
    }
    let (theta, phi, flip) = match build_flip_unitary(&theta, &phi, set.tol) {
        Err(Error::NotStronglyCommuting { ker_m, ker_n }) => {
            report.notes.push(format!(
                "kernel dimensions {ker_m} and {ker_n} differ; families padded with zero operators"
            ));
            let Some((t0, _)) = stage(report, flip_partial_isometry(&theta, &phi, set.tol))? else {
                return Ok(None);
            };
            let Some(p) = stage(report, pad_families(&theta, &phi, &t0, set.tol))? else {
                return Ok(None);
            };
            (p.theta, p.phi, p.flip)
        }
        other => {
            let Some(flip) = stage(report, other)? else {
                return Ok(None);
            };
            (theta, phi, flip)
        }
    };
    report.add_one("flip unitarity", flip.unitarity_defect(), "E⊗F", set.accept);
    report.add_one(
        "flip relation",
        flip.relation_residual(theta.ops(), phi.ops()),
        "M_d",
        set.accept,
    );
    report.flip = Some(FlipDoc::from(&flip));
    let sys = ScalarProductSystem::from_flip(flip, set.tol).map_err(|e| InputError(e.to_string()))?;
    let rep = CovariantRep::new(theta.d(), theta.ops().to_vec(), phi.ops().to_vec())
        .map_err(|e| InputError(e.to_string()))?;
    if !report.passed() {
        return Ok(None);
    }
    Ok(Some(Prepared {
        theta,
        phi,
        sys,
        rep,
        given,
        reduced,
    }))
}
