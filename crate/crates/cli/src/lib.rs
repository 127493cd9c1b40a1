//! File formats and the command pipeline behind the `commdil` binary.

pub mod json;
pub mod pipeline;

use std::path::PathBuf;

use commdil_core::cp::{strong_commute_direct, strong_commute_kernel_test};
use commdil_core::dilation::{
    assemble_dilation, corner_table, verify_dilation, DilationConfig, DilationResult, DIM_CAP,
};
use commdil_core::endo::{
    lift_endomorphisms, roundtrip_metric_spaces, verify_endomorphic_dilation, EndoCheck,
};
use commdil_core::Tolerance;

use json::{IndexDoc, InputDoc, KernelDoc, MatrixDoc, OperatorsDoc, ReportDoc, SpaceDoc, WordDoc};
use pipeline::{check_commute, load_pair, prepare, stage, InputError, Prepared, Settings};

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum Command {
    CheckCommute,
    StrongCommute,
    Flip,
    Dilate,
    Verify,
    Endo,
    Roundtrip,
}

impl Command {
    pub fn name(self) -> &'static str {
        match self {
            Command::CheckCommute => "check-commute",
            Command::StrongCommute => "strong-commute",
            Command::Flip => "flip",
            Command::Dilate => "dilate",
            Command::Verify => "verify",
            Command::Endo => "endo",
            Command::Roundtrip => "roundtrip",
        }
    }

    fn needs_dilation(self) -> bool {
        matches!(self, Command::Dilate | Command::Verify | Command::Endo)
    }
}

#[derive(Debug, Clone)]
pub struct JobSpec {
    pub command: Command,
    pub input: PathBuf,
    /// Truncation level `L`.
    pub depth: usize,
    /// Verification window; defaults to `L − 2`.
    pub window: Option<usize>,
    pub tol: f64,
    pub accept: f64,
    pub mu: usize,
    pub seed: u64,
    pub samples: usize,
    /// Include the dilated operators in the `dilate` report.
    pub operators: bool,
    pub out: Option<PathBuf>,
}

impl JobSpec {
    pub fn new(command: Command, input: impl Into<PathBuf>) -> Self {
        JobSpec {
            command,
            input: input.into(),
            depth: 4,
            window: None,
            tol: Tolerance::DEFAULT_EPS,
            accept: commdil_core::dilation::DEFAULT_ACCEPT,
            mu: 0,
            seed: 0,
            samples: 100,
            operators: false,
            out: None,
        }
    }

    fn settings(&self) -> Result<Settings, InputError> {
        let tol = Tolerance::new(self.tol).map_err(|e| InputError(e.to_string()))?;
        if !(self.accept > 0.0 && self.accept.is_finite()) {
            return Err(InputError(format!(
                "acceptance threshold {} must be positive",
                self.accept
            )));
        }
        Ok(Settings {
            tol,
            accept: self.accept,
        })
    }

    fn window(&self) -> Result<usize, InputError> {
        if self.command.needs_dilation() && self.depth < 2 {
            return Err(InputError(format!("truncation level {} is below 2", self.depth)));
        }
        Ok(self.window.unwrap_or(self.depth.saturating_sub(2)))
    }

    fn dilation_config(&self, set: Settings) -> DilationConfig {
        DilationConfig {
            tol: set.tol,
            accept: set.accept,
            mu: self.mu,
            cap: DIM_CAP,
        }
    }
}

/// Runs a job. Verification outcomes land in the report verdict; only bad
/// input is an error.
pub fn execute(job: &JobSpec) -> Result<ReportDoc, InputError> {
    let set = job.settings()?;
    let window = job.window()?;
    let input = json::read_input(&job.input)?;
    let mut report = ReportDoc::new(job.command.name());
    match job.command {
        Command::CheckCommute => {
            let (theta, phi) = load_pair(&input)?;
            check_commute(&mut report, &theta, &phi, set.accept)?;
        }
        Command::StrongCommute => strong_commute(&input, set, &mut report)?,
        Command::Flip => {
            prepare(&input, set, &mut report)?;
        }
        Command::Dilate | Command::Verify | Command::Endo => {
            if let Some(p) = prepare(&input, set, &mut report)? {
                if let Some(res) = stage(
                    &mut report,
                    assemble_dilation(&p.sys, &p.rep, job.depth, job.dilation_config(set)),
                )? {
                    dilation_reports(job, set, window, &p, res, &mut report)?;
                }
            }
        }
        Command::Roundtrip => {
            if let Some(p) = prepare(&input, set, &mut report)? {
                roundtrip(set, &p, &mut report)?;
            }
        }
    }
    Ok(report)
}

fn core_input<T>(r: commdil_core::Result<T>) -> Result<T, InputError> {
    r.map_err(|e| InputError(e.to_string()))
}

fn strong_commute(input: &InputDoc, set: Settings, report: &mut ReportDoc) -> Result<(), InputError> {
    let (theta, phi) = load_pair(input)?;
    let (theta, phi) = (theta.reduce(set.tol), phi.reduce(set.tol));
    if !check_commute(report, &theta, &phi, set.accept)? {
        return Ok(());
    }
    let Some(kernel) = stage(report, strong_commute_kernel_test(&theta, &phi, set.tol))? else {
        return Ok(());
    };
    let Some(direct) = stage(report, strong_commute_direct(&theta, &phi, set.tol))? else {
        return Ok(());
    };
    report.add_one(
        "strong commutation (kernel dimensions)",
        kernel.dim_ker_m.abs_diff(kernel.dim_ker_n) as f64,
        "E_Θ⊗E_Φ",
        0.0,
    );
    report.add_one(
        "strong commutation (direct)",
        direct.complement_dims.0.abs_diff(direct.complement_dims.1) as f64,
        "M_d⊗M_d⊗C^d",
        0.0,
    );
    report.add_one(
        "kernel and direct tests agree",
        f64::from(u8::from(kernel.verdict != direct.verdict)),
        "verdicts",
        0.0,
    );
    report.kernels = Some(KernelDoc {
        dim_ker_m: kernel.dim_ker_m,
        dim_ker_n: kernel.dim_ker_n,
        kernel_verdict: kernel.verdict,
        direct_verdict: direct.verdict,
        complement_dims: [direct.complement_dims.0, direct.complement_dims.1],
    });
    Ok(())
}

pub fn space_doc(res: &DilationResult) -> SpaceDoc {
    let s = &res.space;
    SpaceDoc {
        n: s.n(),
        m: s.m(),
        d: s.d(),
        depth: s.depth(),
        mu: s.mu(),
        dim: s.dim(),
        level_sizes: s.level_sizes().to_vec(),
        valid_depth: res.valid_depth,
    }
}

fn dilation_reports(
    job: &JobSpec,
    set: Settings,
    window: usize,
    p: &Prepared,
    res: DilationResult,
    report: &mut ReportDoc,
) -> Result<(), InputError> {
    report.space = Some(space_doc(&res));
    let max_level = res.corrector.identity_residuals.len();
    let worst = res
        .corrector
        .identity_residuals
        .iter()
        .copied()
        .fold(0.0f64, f64::max);
    report.add_one(
        "corrector identity",
        worst,
        &format!("levels <= {}", max_level.saturating_sub(1)),
        set.accept,
    );
    match job.command {
        Command::Dilate | Command::Verify => {
            report.add(&core_input(verify_dilation(&res, &p.rep, window, set.accept))?);
            if job.command == Command::Dilate {
                let table = core_input(corner_table(&res, &p.rep, job.depth - 1))?;
                report.words = Some(table.iter().map(WordDoc::from).collect());
                if job.operators {
                    report.operators = Some(OperatorsDoc {
                        v: res.v.iter().map(|x| MatrixDoc::from(&x.to_dense())).collect(),
                        u: res.u.iter().map(|x| MatrixDoc::from(&x.to_dense())).collect(),
                        w: res.corrector.blocks.iter().map(MatrixDoc::from).collect(),
                    });
                }
            }
        }
        Command::Endo => {
            report
                .notes
                .push("alpha dilates the T-side map theta; beta dilates the S-side map phi".to_string());
            let pair = lift_endomorphisms(res);
            let check = EndoCheck {
                samples: job.samples,
                seed: job.seed,
                accept: set.accept,
            };
            report.add(&core_input(verify_endomorphic_dilation(
                &pair, &p.theta, &p.phi, window, check,
            ))?);
        }
        _ => unreachable!("only dilation commands reach here"),
    }
    Ok(())
}

fn roundtrip(set: Settings, p: &Prepared, report: &mut ReportDoc) -> Result<(), InputError> {
    let Some(rt) = stage(
        report,
        roundtrip_metric_spaces(&p.sys, &p.rep, set.tol, set.accept),
    )?
    else {
        return Ok(());
    };
    report.add(&rt.report);
    let reduced = match rt.index_drop {
        Some(d) => (d.n_reduced, d.m_reduced),
        None => p.reduced,
    };
    let dropped = reduced != p.given;
    if dropped {
        report.notes.push(format!(
            "index drop: families of sizes ({}, {}) span ({}, {}) dimensions",
            p.given.0, p.given.1, reduced.0, reduced.1
        ));
    }
    report.index = Some(IndexDoc {
        dims: [rt.dims.0, rt.dims.1],
        reduced: [reduced.0, reduced.1],
        index_drop: dropped,
        flip_distance: rt.flip_distance,
    });
    Ok(())
}

/// Exit code for a finished report.
pub fn exit_code(report: &ReportDoc) -> i32 {
    if report.passed() {
        0
    } else {
        1
    }
}
