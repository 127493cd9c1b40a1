use alloc::format;

use crate::cp::{build_flip_unitary, intertwiner_space};
use crate::error::Result;
use crate::linalg::{ComplexMatrix, Tolerance};
use crate::product::{CovariantRep, ScalarProductSystem};
use crate::report::Report;

/// Linearly dependent families: the reduced counts that replace `n`, `m`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct IndexDrop {
    pub n_reduced: usize,
    pub m_reduced: usize,
}

#[derive(Debug, Clone)]
pub struct RoundtripReport {
    pub report: Report,
    /// Intertwiner-space dimensions of the two induced maps.
    pub dims: (usize, usize),
    pub index_drop: Option<IndexDrop>,
    /// `‖u − u′‖_F` between the given and the rebuilt flip, when both act on
    /// the same index sets.
    pub flip_distance: Option<f64>,
    /// Absent when one of the maps is zero.
    pub rebuilt: Option<ComplexMatrix>,
}

/// Recovers the index spaces and the flip from the maps a representation
/// induces, and compares them with the representation's own data.
pub fn roundtrip_metric_spaces(
    sys: &ScalarProductSystem,
    rep: &CovariantRep,
    tol: Tolerance,
    accept: f64,
) -> Result<RoundtripReport> {
    rep.check_sizes(sys)?;
    let (theta, phi) = rep.induced_cp_pair();
    let (theta_r, phi_r) = (theta.reduce(tol), phi.reduce(tol));
    let dims = (
        intertwiner_space(&theta, tol)?.dim(),
        intertwiner_space(&phi, tol)?.dim(),
    );
    let mut report = Report::new();
    report.push("index (theta)", dims.0.abs_diff(theta_r.len()) as f64, "H", 0.0);
    report.push("index (phi)", dims.1.abs_diff(phi_r.len()) as f64, "H", 0.0);

    let dropped = theta_r.len() < theta.len() || phi_r.len() < phi.len();
    let index_drop = dropped.then_some(IndexDrop {
        n_reduced: theta_r.len(),
        m_reduced: phi_r.len(),
    });
    if theta_r.is_empty() || phi_r.is_empty() {
        return Ok(RoundtripReport {
            report,
            dims,
            index_drop,
            flip_distance: None,
            rebuilt: None,
        });
    }
    let (th, ph) = if dropped {
        (&theta_r, &phi_r)
    } else {
        (&theta, &phi)
    };
    let rebuilt = build_flip_unitary(th, ph, tol)?;
    report.push(
        "rebuilt flip relation",
        rebuilt.relation_residual(th.ops(), ph.ops()),
        "H",
        accept,
    );
    report.push(
        "rebuilt flip unitarity",
        rebuilt.unitarity_defect(),
        "E⊗F",
        accept,
    );
    let flip_distance = (!dropped).then(|| rebuilt.u.distance(&sys.flip().u));
    Ok(RoundtripReport {
        report,
        dims,
        index_drop,
        flip_distance,
        rebuilt: Some(rebuilt.u),
    })
}

impl RoundtripReport {
    pub fn summary(&self) -> alloc::string::String {
        match self.index_drop {
            Some(d) => format!("index drop to ({}, {})", d.n_reduced, d.m_reduced),
            None => format!("indices ({}, {})", self.dims.0, self.dims.1),
        }
    }
}
