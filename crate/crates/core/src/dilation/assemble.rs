use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;
use core::fmt;
#[cfg(not(feature = "std"))]
use num_traits::Float as _;

use super::corrector::{build_corrector, Corrector};
use super::primitive::{build_primitive_isometries, PrimitiveIsometries};
use super::space::{GradedFockSpace, DIM_CAP};
use crate::error::{Error, Result};
use crate::linalg::{BlockMatrix, ComplexMatrix, Tolerance};
use crate::product::{CovariantRep, ScalarProductSystem, Side};
use crate::report::Report;

/// Default acceptance threshold for verified identities.
pub const DEFAULT_ACCEPT: f64 = 1e-8;

#[derive(Debug, Clone, Copy)]
pub struct DilationConfig {
    /// Rank and positivity decisions.
    pub tol: Tolerance,
    /// Threshold for identities checked during and after construction.
    pub accept: f64,
    /// Padding multiplicity: `H_l = C^{d (1+μ)^l}`.
    pub mu: usize,
    pub cap: usize,
}

impl Default for DilationConfig {
    fn default() -> Self {
        DilationConfig {
            tol: Tolerance::default(),
            accept: DEFAULT_ACCEPT,
            mu: 0,
            cap: DIM_CAP,
        }
    }
}

/// A letter of a word in the dilated operators.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Letter {
    V(usize),
    U(usize),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Word(pub Vec<Letter>);

impl fmt::Display for Word {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_empty() {
            return f.write_str("1");
        }
        for l in &self.0 {
            match l {
                Letter::V(i) => write!(f, "V{i}")?,
                Letter::U(j) => write!(f, "U{j}")?,
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone)]
pub struct WordEntry {
    pub word: Word,
    /// `P_H w(V, U)|_H`.
    pub compressed: ComplexMatrix,
    /// `w(T, S)`.
    pub expected: ComplexMatrix,
    pub residual: f64,
}

/// Isometries `V_i = W V2_i` and `U_j = U2_j W^*` on the truncated space.
///
/// Columns above level `valid_depth = L − 1` are zero: there the primitive
/// isometries would leave the truncation.
#[derive(Debug, Clone)]
pub struct DilationResult {
    pub space: GradedFockSpace,
    pub sys: ScalarProductSystem,
    pub v: Vec<BlockMatrix>,
    pub u: Vec<BlockMatrix>,
    pub primitive: PrimitiveIsometries,
    pub corrector: Corrector,
    pub valid_depth: usize,
}

fn compose(
    space: &GradedFockSpace,
    prim: &PrimitiveIsometries,
    w: &[ComplexMatrix],
) -> (Vec<BlockMatrix>, Vec<BlockMatrix>) {
    let sizes = space.level_sizes();
    let last = space.depth().saturating_sub(1);
    let lv = sizes.len();
    let v = prim
        .v
        .iter()
        .map(|v2| {
            let mut out = BlockMatrix::zeros(sizes, sizes);
            for r in 0..lv {
                for c in 0..=last.min(lv - 1) {
                    if let Some(b) = v2.get(r, c) {
                        out.set(r, c, w[r].matmul(b));
                    }
                }
            }
            out
        })
        .collect();
    let w_adj: Vec<ComplexMatrix> = w.iter().map(ComplexMatrix::adjoint).collect();
    let u = prim
        .u
        .iter()
        .map(|u2| {
            let mut out = BlockMatrix::zeros(sizes, sizes);
            for r in 0..lv {
                for c in 0..=last.min(lv - 1) {
                    if let Some(b) = u2.get(r, c) {
                        out.set(r, c, b.matmul(&w_adj[c]));
                    }
                }
            }
            out
        })
        .collect();
    (v, u)
}

impl DilationResult {
    /// Rebuilds `V`, `U` around different corrector blocks, without checks.
    pub fn with_corrector(&self, blocks: Vec<ComplexMatrix>) -> DilationResult {
        let (v, u) = compose(&self.space, &self.primitive, &blocks);
        let unitarity_residuals = blocks.iter().map(ComplexMatrix::unitarity_defect).collect();
        DilationResult {
            v,
            u,
            corrector: Corrector {
                blocks,
                identity_residuals: self.corrector.identity_residuals.clone(),
                unitarity_residuals,
            },
            ..self.clone()
        }
    }

    pub fn embedding(&self) -> ComplexMatrix {
        self.space.embedding()
    }

    pub fn op(&self, letter: Letter) -> &BlockMatrix {
        match letter {
            Letter::V(i) => &self.v[i],
            Letter::U(j) => &self.u[j],
        }
    }

    pub fn letters(&self) -> Vec<Letter> {
        (0..self.v.len())
            .map(Letter::V)
            .chain((0..self.u.len()).map(Letter::U))
            .collect()
    }

    /// The vector `h ∈ H` as a level-blocked column set.
    pub(crate) fn h_blocks(&self) -> Vec<ComplexMatrix> {
        let d = self.space.d();
        self.space
            .level_sizes()
            .iter()
            .enumerate()
            .map(|(l, &s)| {
                if l == 0 {
                    ComplexMatrix::identity(d)
                } else {
                    ComplexMatrix::zeros(s, d)
                }
            })
            .collect()
    }
}

pub fn assemble_dilation(
    sys: &ScalarProductSystem,
    rep: &CovariantRep,
    depth: usize,
    cfg: DilationConfig,
) -> Result<DilationResult> {
    if depth == 0 {
        return Err(Error::invalid("truncation level must be at least 1"));
    }
    rep.check_sizes(sys)?;
    let space = GradedFockSpace::new(sys.n(), sys.m(), rep.h(), depth, cfg.mu, cfg.cap)?;
    let primitive = build_primitive_isometries(sys, rep, &space, cfg.tol)?;
    let corrector = build_corrector(sys, &space, &primitive, cfg.tol, cfg.accept)?;
    let (v, u) = compose(&space, &primitive, &corrector.blocks);
    let result = DilationResult {
        space,
        sys: sys.clone(),
        v,
        u,
        primitive,
        corrector,
        valid_depth: depth - 1,
    };
    let report = check(&result, rep, 1, cfg.accept);
    if let Some(bad) = report.first_failure() {
        return Err(Error::failed(bad.name.clone(), bad.max_residual));
    }
    Ok(result)
}

/// All words of length `1..=max_len` with their compressions to `H`, shortest
/// first. Exact for `max_len ≤ L`.
pub fn corner_table(result: &DilationResult, rep: &CovariantRep, max_len: usize) -> Result<Vec<WordEntry>> {
    if max_len > result.space.depth() {
        return Err(Error::invalid(format!(
            "words longer than the truncation level {} leave the space",
            result.space.depth()
        )));
    }
    rep.check_sizes(&result.sys)?;
    let letters = result.letters();
    let small = |l: Letter| -> &ComplexMatrix {
        match l {
            Letter::V(i) => &rep.ops(Side::T)[i],
            Letter::U(j) => &rep.ops(Side::S)[j],
        }
    };
    // Frontier of (word, image of H, expected product); a new letter is
    // applied on the left.
    let mut frontier: Vec<(Vec<Letter>, Vec<ComplexMatrix>, ComplexMatrix)> =
        alloc::vec![(Vec::new(), result.h_blocks(), ComplexMatrix::identity(rep.h()))];
    let mut table = Vec::new();
    for _ in 0..max_len {
        let mut next = Vec::with_capacity(frontier.len() * letters.len());
        for (word, image, expected) in &frontier {
            for &l in &letters {
                let img = result.op(l).apply(image);
                let exp = small(l).matmul(expected);
                let mut w = Vec::with_capacity(word.len() + 1);
                w.push(l);
                w.extend_from_slice(word);
                let compressed = img[0].clone();
                table.push(WordEntry {
                    word: Word(w.clone()),
                    residual: compressed.distance(&exp),
                    compressed,
                    expected: exp.clone(),
                });
                next.push((w, img, exp));
            }
        }
        frontier = next;
    }
    Ok(table)
}

/// Residuals of the dilation identities; `depth` bounds the corner words and
/// must not exceed `valid_depth − 1`.
pub fn verify_dilation(
    result: &DilationResult,
    rep: &CovariantRep,
    depth: usize,
    accept: f64,
) -> Result<Report> {
    if depth + 1 > result.valid_depth.max(1) {
        return Err(Error::invalid(format!(
            "verification depth {depth} exceeds {} for truncation level {}",
            result.valid_depth.saturating_sub(1),
            result.space.depth()
        )));
    }
    Ok(check(result, rep, depth, accept))
}

fn window(max_level: usize) -> String {
    format!("levels <= {max_level}")
}

fn check(result: &DilationResult, rep: &CovariantRep, corner_depth: usize, accept: f64) -> Report {
    let mut report = Report::new();
    let top = result.valid_depth;

    let corner = corner_table(result, rep, corner_depth.min(result.space.depth()))
        .map(|t| t.iter().fold(0.0f64, |m, e| m.max(e.residual)))
        .unwrap_or(f64::INFINITY);
    report.push(
        "corner",
        corner,
        format!("words of length <= {corner_depth}"),
        accept,
    );

    let (iso, orth) = gram_residuals(&result.v, top);
    let (iso_u, orth_u) = gram_residuals(&result.u, top);
    report.push("isometry", iso.max(iso_u), window(top), accept);
    report.push("range orthogonality", orth.max(orth_u), window(top), accept);

    let comm = if top >= 1 {
        commutation_residual(result, top - 1)
    } else {
        0.0
    };
    let comm_window = if top >= 1 {
        window(top - 1)
    } else {
        String::from("empty")
    };
    report.push("commutation", comm, comm_window, accept);

    let mut leak = 0.0f64;
    for op in result.v.iter().chain(&result.u) {
        let s: f64 = (1..=top).map(|c| op.block(0, c).frobenius_norm().powi(2)).sum();
        leak = leak.max(s.sqrt());
    }
    report.push("K-H invariance", leak, format!("levels 1..={top}"), accept);

    let unit = result
        .corrector
        .unitarity_residuals
        .iter()
        .fold(0.0f64, |m, &r| m.max(r));
    report.push("corrector unitarity", unit, window(result.space.depth()), accept);
    report
}

/// Largest `‖X_i^* X_i − I‖` and `‖X_i^* X_k‖` (`i ≠ k`) on levels `≤ top`.
fn gram_residuals(ops: &[BlockMatrix], top: usize) -> (f64, f64) {
    let (mut iso, mut orth) = (0.0f64, 0.0f64);
    for (i, a) in ops.iter().enumerate() {
        let a_adj = a.adjoint();
        for (k, b) in ops.iter().enumerate() {
            let g = a_adj.matmul(b).window(top, top);
            let r = if i == k {
                let sizes: Vec<usize> = g.row_sizes()[..=top].to_vec();
                let mut sq = 0.0;
                for r in 0..=top {
                    for c in 0..=top {
                        let mut blk = g.block(r, c);
                        if r == c {
                            blk -= &ComplexMatrix::identity(sizes[r]);
                        }
                        sq += blk.frobenius_norm().powi(2);
                    }
                }
                sq.sqrt()
            } else {
                g.frobenius_norm()
            };
            if i == k {
                iso = iso.max(r);
            } else {
                orth = orth.max(r);
            }
        }
    }
    (iso, orth)
}

/// `max_{i,j} ‖V_i U_j − Σ u_{(i,j),(k,l)} U_l V_k‖` on columns of levels `≤ top`.
pub(crate) fn commutation_residual(result: &DilationResult, top: usize) -> f64 {
    let depth = result.space.depth();
    let sys = &result.sys;
    let v: Vec<BlockMatrix> = result.v.iter().map(|x| x.window(depth, top + 1)).collect();
    let u: Vec<BlockMatrix> = result.u.iter().map(|x| x.window(depth, top + 1)).collect();
    let vw: Vec<BlockMatrix> = v.iter().map(|x| x.window(depth, top)).collect();
    let uw: Vec<BlockMatrix> = u.iter().map(|x| x.window(depth, top)).collect();
    let uv: Vec<Vec<BlockMatrix>> = u
        .iter()
        .map(|ul| vw.iter().map(|vk| ul.matmul(vk)).collect())
        .collect();
    let mut worst = 0.0f64;
    for (i, vi) in v.iter().enumerate() {
        for (j, uj) in uw.iter().enumerate() {
            let mut diff = vi.matmul(uj);
            for (l, row) in uv.iter().enumerate() {
                for (k, p) in row.iter().enumerate() {
                    let c = sys.flip().coeff(i, j, k, l);
                    if c.norm() != 0.0 {
                        diff = diff.sub(&p.scale(c));
                    }
                }
            }
            worst = worst.max(diff.frobenius_norm());
        }
    }
    worst
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dilation::primitive::tests::pauli;
    use crate::linalg::C64;
    use alloc::string::ToString;
    use alloc::vec;

    fn scalar(x: f64) -> ComplexMatrix {
        ComplexMatrix::scalar(C64::new(x, 0.0))
    }

    fn ando(t: f64, s: f64) -> (ScalarProductSystem, CovariantRep) {
        let sys = ScalarProductSystem::new(1, 1, ComplexMatrix::identity(1), Tolerance::default()).unwrap();
        let rep = CovariantRep::new(1, vec![scalar(t)], vec![scalar(s)]).unwrap();
        (sys, rep)
    }

    #[test]
    fn ando_words_compress_to_products() {
        let (sys, rep) = ando(0.5, 1.0 / 3.0);
        let res = assemble_dilation(&sys, &rep, 4, DilationConfig::default()).unwrap();
        let table = corner_table(&res, &rep, 3).unwrap();
        assert_eq!(table.len(), 2 + 4 + 8);
        for e in &table {
            let a = e.word.0.iter().filter(|l| matches!(l, Letter::V(_))).count() as i32;
            let b = e.word.0.len() as i32 - a;
            let want = 0.5f64.powi(a) * (1.0f64 / 3.0).powi(b);
            assert!(
                (e.compressed[(0, 0)] - C64::new(want, 0.0)).norm() <= 1e-10,
                "{}",
                e.word
            );
        }
        let report = verify_dilation(&res, &rep, 2, DEFAULT_ACCEPT).unwrap();
        for c in &report.identities {
            assert!(c.max_residual <= 1e-10, "{} = {}", c.name, c.max_residual);
        }
    }

    #[test]
    fn zero_pair_gives_commuting_shifts() {
        let (sys, rep) = ando(0.0, 0.0);
        let res = assemble_dilation(&sys, &rep, 3, DilationConfig::default()).unwrap();
        let vu = corner_table(&res, &rep, 2).unwrap();
        let e = vu.iter().find(|e| e.word.to_string() == "V0U0").unwrap();
        assert!(e.compressed.max_abs() < 1e-15);
        assert!(commutation_residual(&res, 1) < 1e-12);
    }

    #[test]
    fn pauli_dilation_verifies() {
        let (sys, rep) = pauli();
        let res = assemble_dilation(&sys, &rep, 4, DilationConfig::default()).unwrap();
        let report = verify_dilation(&res, &rep, 2, DEFAULT_ACCEPT).unwrap();
        assert!(report.passed(), "{report:?}");
        // Mixed word of length 3 against the operator product.
        let table = corner_table(&res, &rep, 3).unwrap();
        let w = table.iter().find(|e| e.word.to_string() == "V1U1V0").unwrap();
        let want = rep.ops(Side::T)[1]
            .matmul(&rep.ops(Side::S)[1])
            .matmul(&rep.ops(Side::T)[0]);
        assert!(w.compressed.distance(&want) < 1e-10);
    }

    #[test]
    fn padded_dilation_verifies() {
        let (sys, rep) = pauli();
        let cfg = DilationConfig {
            mu: 1,
            ..DilationConfig::default()
        };
        let res = assemble_dilation(&sys, &rep, 3, cfg).unwrap();
        assert!(verify_dilation(&res, &rep, 1, DEFAULT_ACCEPT).unwrap().passed());
    }

    #[test]
    fn corrupted_corrector_breaks_commutation() {
        let (sys, rep) = pauli();
        let res = assemble_dilation(&sys, &rep, 4, DilationConfig::default()).unwrap();
        let mut blocks = res.corrector.blocks.clone();
        // Still unitary, but no longer matching the two compositions.
        let n = blocks[2].rows();
        let phase: Vec<C64> = (0..n).map(|k| C64::from_polar(1.0, k as f64)).collect();
        blocks[2] = blocks[2].matmul(&ComplexMatrix::diag(&phase));
        let bad = res.with_corrector(blocks);
        let report = verify_dilation(&bad, &rep, 2, DEFAULT_ACCEPT).unwrap();
        assert!(!report.passed());
        assert!(report.get("commutation").unwrap().max_residual > 1e-3);
        assert!(report.get("isometry").unwrap().passed());
    }

    #[test]
    fn depth_beyond_window_is_refused() {
        let (sys, rep) = ando(0.5, 0.5);
        let res = assemble_dilation(&sys, &rep, 3, DilationConfig::default()).unwrap();
        assert!(verify_dilation(&res, &rep, 1, DEFAULT_ACCEPT).is_ok());
        assert!(verify_dilation(&res, &rep, 2, DEFAULT_ACCEPT).is_err());
    }

    #[test]
    fn truncations_agree_on_shared_words() {
        let (sys, rep) = pauli();
        let small = assemble_dilation(&sys, &rep, 3, DilationConfig::default()).unwrap();
        let big = assemble_dilation(&sys, &rep, 4, DilationConfig::default()).unwrap();
        let a = corner_table(&small, &rep, 2).unwrap();
        let b = corner_table(&big, &rep, 2).unwrap();
        for (x, y) in a.iter().zip(&b) {
            assert_eq!(x.word, y.word);
            assert!(x.compressed.distance(&y.compressed) < 1e-10);
        }
        // The operators themselves agree on the common levels.
        for (vs, vb) in small.v.iter().zip(&big.v) {
            for r in 0..=2 {
                for c in 0..=1 {
                    assert!(vs.block(r, c).distance(&vb.block(r, c)) < 1e-10);
                }
            }
        }
    }
}
