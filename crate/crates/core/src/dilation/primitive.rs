//! The isometries obtained by adjoining defect spaces to the row contractions
//! and shifting everything else one step up the grading, before any
//! commutation is imposed.

use alloc::vec::Vec;

use num_traits::Zero;

use super::space::GradedFockSpace;
use crate::error::{Error, Result};
use crate::linalg::{psd_sqrt, BlockMatrix, ComplexMatrix, Tolerance, C64};
use crate::product::{CovariantRep, ScalarProductSystem, Side};

/// `V2_i` (`i < n`) and `U2_j` (`j < m`) as level-blocked operators on the
/// truncated space. `V2_i` is defined on the grades with `a < L`, `U2_j` on
/// those with `b < L`; elsewhere the columns are zero.
#[derive(Debug, Clone)]
pub struct PrimitiveIsometries {
    pub v: Vec<BlockMatrix>,
    pub u: Vec<BlockMatrix>,
}

/// `(I − X̃^* X̃)^{1/2}` for the row `X̃ = [X_1 … X_k]`.
pub fn defect(rep: &CovariantRep, side: Side, tol: Tolerance) -> Result<ComplexMatrix> {
    let row = rep.row_matrix(side, 1);
    let gap = &ComplexMatrix::identity(row.cols()) - &row.adjoint_mul(&row);
    psd_sqrt(&gap, tol).map_err(|e| match e {
        Error::NotPositive { eigenvalue, .. } => Error::NotContractive { eigenvalue },
        other => other,
    })
}

/// Row `k ⊗ H_l → H_l`: the contraction on the leading `d` coordinates.
fn padded_row(ops: &[ComplexMatrix], hl: usize) -> ComplexMatrix {
    let d = ops[0].rows();
    let mut out = ComplexMatrix::zeros(hl, ops.len() * hl);
    for (k, op) in ops.iter().enumerate() {
        for r in 0..d {
            for c in 0..d {
                out[(r, k * hl + c)] = op[(r, c)];
            }
        }
    }
    out
}

/// Defect on `C^k ⊗ H_l`: `Δ` on the leading `d` coordinates of each copy,
/// identity on the padding.
fn padded_defect(delta: &ComplexMatrix, k: usize, d: usize, hl: usize) -> ComplexMatrix {
    let mut out = ComplexMatrix::zeros(k * hl, k * hl);
    for k1 in 0..k {
        for k2 in 0..k {
            for r in 0..d {
                for c in 0..d {
                    out[(k1 * hl + r, k2 * hl + c)] = delta[(k1 * d + r, k2 * d + c)];
                }
            }
        }
        for h in d..hl {
            out[(k1 * hl + h, k1 * hl + h)] = C64::new(1.0, 0.0);
        }
    }
    out
}

struct Scatter<'a> {
    space: &'a GradedFockSpace,
    ops: Vec<BlockMatrix>,
}

impl<'a> Scatter<'a> {
    fn new(space: &'a GradedFockSpace, count: usize) -> Self {
        let sizes = space.level_sizes();
        Scatter {
            space,
            ops: (0..count).map(|_| BlockMatrix::zeros(sizes, sizes)).collect(),
        }
    }

    /// Adds `z` to entry (row label, column label) of operator `op`.
    fn add(
        &mut self,
        op: usize,
        to: (usize, usize, usize, usize, usize),
        from: (usize, usize, usize, usize, usize),
        z: C64,
    ) {
        if z.is_zero() {
            return;
        }
        let gt = *self.space.grade(to.0, to.1);
        let gs = *self.space.grade(from.0, from.1);
        let r = gt.offset + gt.local(to.2, to.3, to.4);
        let c = gs.offset + gs.local(from.2, from.3, from.4);
        self.ops[op].get_mut(gt.level, gs.level)[(r, c)] += z;
    }
}

pub fn build_primitive_isometries(
    sys: &ScalarProductSystem,
    rep: &CovariantRep,
    space: &GradedFockSpace,
    tol: Tolerance,
) -> Result<PrimitiveIsometries> {
    rep.check_sizes(sys)?;
    if space.n() != sys.n() || space.m() != sys.m() || space.d() != rep.h() {
        return Err(Error::invalid("graded space does not match the representation"));
    }
    let delta_t = defect(rep, Side::T, tol)?;
    let delta_s = defect(rep, Side::S, tol)?;
    Ok(PrimitiveIsometries {
        v: build_v(sys, rep, space, &delta_t),
        u: build_u(sys, rep, space, &delta_s),
    })
}

fn build_v(
    sys: &ScalarProductSystem,
    rep: &CovariantRep,
    space: &GradedFockSpace,
    delta: &ComplexMatrix,
) -> Vec<BlockMatrix> {
    let (n, d, top) = (sys.n(), space.d(), space.depth());
    let mut out = Scatter::new(space, n);
    if top == 0 {
        return out.ops;
    }
    for g in space.grades().iter().filter(|g| g.a < top) {
        if g.a > 0 {
            // Creation: e_i ⊗ (e_w ⊗ f_v ⊗ h) ↦ e_{iw} ⊗ f_v ⊗ h.
            for i in 0..n {
                for we in 0..g.e_words {
                    for wf in 0..g.f_words {
                        for h in 0..g.h {
                            let to = (g.a + 1, g.b, i * g.e_words + we, wf, h);
                            out.add(i, to, (g.a, g.b, we, wf, h), C64::new(1.0, 0.0));
                        }
                    }
                }
            }
            continue;
        }
        // Grade (0, b): move E past F^b, apply the contraction ⊕ defect on
        // E ⊗ H_b, and move the defect part back.
        let (b, fb, hb) = (g.b, g.f_words, g.h);
        let tb = sys.flip_mn(1, b);
        let lift = tb.kron(&ComplexMatrix::identity(hb));
        let idf = ComplexMatrix::identity(fb);
        let upper = idf.kron(&padded_row(rep.ops(Side::T), hb)).matmul(&lift);
        let lower = tb
            .adjoint()
            .kron(&ComplexMatrix::identity(hb))
            .matmul(&idf.kron(&padded_defect(delta, n, d, hb)))
            .matmul(&lift);
        for i in 0..n {
            for wf in 0..fb {
                for h in 0..hb {
                    let c = (i * fb + wf) * hb + h;
                    for wf2 in 0..fb {
                        for h2 in 0..hb {
                            out.add(i, (0, b, 0, wf2, h2), (0, b, 0, wf, h), upper[(wf2 * hb + h2, c)]);
                        }
                    }
                    for i2 in 0..n {
                        for wf2 in 0..fb {
                            for h2 in 0..hb {
                                let z = lower[((i2 * fb + wf2) * hb + h2, c)];
                                out.add(i, (1, b, i2, wf2, h2), (0, b, 0, wf, h), z);
                            }
                        }
                    }
                }
            }
        }
    }
    out.ops
}

fn build_u(
    sys: &ScalarProductSystem,
    rep: &CovariantRep,
    space: &GradedFockSpace,
    delta: &ComplexMatrix,
) -> Vec<BlockMatrix> {
    let (m, d, top) = (sys.m(), space.d(), space.depth());
    let mut out = Scatter::new(space, m);
    if top == 0 {
        return out.ops;
    }
    for g in space.grades().iter().filter(|g| g.b < top) {
        let (a, ea, ha) = (g.a, g.e_words, g.h);
        // t_{a,1}^*: F ⊗ E^a → E^a ⊗ F.
        let back = sys.flip_mn(a, 1).adjoint();
        if g.b > 0 {
            for j in 0..m {
                for we in 0..ea {
                    for we2 in 0..ea {
                        for l in 0..m {
                            let z = back[(we2 * m + l, j * ea + we)];
                            if z.is_zero() {
                                continue;
                            }
                            for wf in 0..g.f_words {
                                for h in 0..ha {
                                    let to = (a, g.b + 1, we2, l * g.f_words + wf, h);
                                    out.add(j, to, (a, g.b, we, wf, h), z);
                                }
                            }
                        }
                    }
                }
            }
            continue;
        }
        // Grade (a, 0): move F past E^a, then contraction ⊕ defect on F ⊗ H_a.
        let pre = back.kron(&ComplexMatrix::identity(ha));
        let ide = ComplexMatrix::identity(ea);
        let upper = ide.kron(&padded_row(rep.ops(Side::S), ha)).matmul(&pre);
        let lower = ide.kron(&padded_defect(delta, m, d, ha)).matmul(&pre);
        for j in 0..m {
            for we in 0..ea {
                for h in 0..ha {
                    let c = (j * ea + we) * ha + h;
                    for we2 in 0..ea {
                        for h2 in 0..ha {
                            out.add(j, (a, 0, we2, 0, h2), (a, 0, we, 0, h), upper[(we2 * ha + h2, c)]);
                        }
                        for l in 0..m {
                            for h2 in 0..ha {
                                let z = lower[((we2 * m + l) * ha + h2, c)];
                                out.add(j, (a, 1, we2, l, h2), (a, 0, we, 0, h), z);
                            }
                        }
                    }
                }
            }
        }
    }
    out.ops
}

#[cfg(test)]
pub(crate) mod tests {
    use super::*;
    use crate::cp::channels;
    use crate::dilation::space::DIM_CAP;
    use alloc::vec;

    fn tol() -> Tolerance {
        Tolerance::default()
    }

    fn scalar(x: f64) -> ComplexMatrix {
        ComplexMatrix::scalar(C64::new(x, 0.0))
    }

    fn ando(t: f64, s: f64, depth: usize) -> (ScalarProductSystem, CovariantRep, GradedFockSpace) {
        let sys = ScalarProductSystem::new(1, 1, ComplexMatrix::identity(1), tol()).unwrap();
        let rep = CovariantRep::new(1, vec![scalar(t)], vec![scalar(s)]).unwrap();
        let space = GradedFockSpace::new(1, 1, 1, depth, 0, DIM_CAP).unwrap();
        (sys, rep, space)
    }

    pub(crate) fn pauli() -> (ScalarProductSystem, CovariantRep) {
        let h = 0.5f64.sqrt();
        let one = C64::new(1.0, 0.0);
        let sys = ScalarProductSystem::new(2, 2, ComplexMatrix::diag(&[one, one, one, -one]), tol()).unwrap();
        let rep = CovariantRep::new(
            2,
            vec![
                ComplexMatrix::identity(2).scale_real(h),
                channels::pauli_x().scale_real(h),
            ],
            vec![
                ComplexMatrix::identity(2).scale_real(h),
                channels::pauli_z().scale_real(h),
            ],
        )
        .unwrap();
        (sys, rep)
    }

    /// Columns on which an operator is defined.
    fn domain(space: &GradedFockSpace, keep: impl Fn(usize, usize) -> bool) -> Vec<usize> {
        (0..space.dim())
            .filter(|&i| {
                let l = space.label(i);
                keep(l.a, l.b)
            })
            .collect()
    }

    /// Row isometry check: `[X_1 … X_k]` restricted to the domain columns.
    fn row_isometry_defect(ops: &[BlockMatrix], cols: &[usize]) -> f64 {
        let parts: Vec<ComplexMatrix> = ops.iter().map(|x| x.to_dense().select_columns(cols)).collect();
        ComplexMatrix::hstack(parts[0].rows(), &parts).isometry_defect()
    }

    #[test]
    fn zero_contraction_gives_creation() {
        let (sys, rep, space) = ando(0.0, 0.0, 2);
        let p = build_primitive_isometries(&sys, &rep, &space, tol()).unwrap();
        let v = p.v[0].to_dense();
        // H = index 0 goes to the grade (1,0) basis vector.
        let target = space.global(1, 0, 0, 0, 0);
        for r in 0..space.dim() {
            let want = if r == target { 1.0 } else { 0.0 };
            assert!((v[(r, 0)] - C64::new(want, 0.0)).norm() < 1e-15);
        }
    }

    #[test]
    fn unitary_scalar_stays_in_h() {
        let (sys, rep, space) = ando(1.0, 1.0, 2);
        let p = build_primitive_isometries(&sys, &rep, &space, tol()).unwrap();
        let v = p.v[0].to_dense();
        assert!((v[(0, 0)] - C64::new(1.0, 0.0)).norm() < 1e-15);
        assert!((v.select_columns(&[0]).frobenius_norm() - 1.0).abs() < 1e-15);
    }

    #[test]
    fn ando_corners_are_the_contractions() {
        let (sys, rep, space) = ando(0.5, 1.0 / 3.0, 3);
        let p = build_primitive_isometries(&sys, &rep, &space, tol()).unwrap();
        assert!((p.v[0].block(0, 0)[(0, 0)] - C64::new(0.5, 0.0)).norm() < 1e-15);
        assert!((p.u[0].block(0, 0)[(0, 0)] - C64::new(1.0 / 3.0, 0.0)).norm() < 1e-15);
    }

    #[test]
    fn pauli_primitives_are_row_isometries() {
        let (sys, rep) = pauli();
        let space = GradedFockSpace::new(2, 2, 2, 3, 0, DIM_CAP).unwrap();
        let p = build_primitive_isometries(&sys, &rep, &space, tol()).unwrap();
        let v_dom = domain(&space, |a, _| a < 3);
        let u_dom = domain(&space, |_, b| b < 3);
        assert!(row_isometry_defect(&p.v, &v_dom) < 1e-10);
        assert!(row_isometry_defect(&p.u, &u_dom) < 1e-10);
        // H is co-invariant and the corner is the contraction.
        for (i, t) in rep.ops(Side::T).iter().enumerate() {
            assert!(p.v[i].block(0, 0).distance(t) < 1e-14);
        }
        for (j, s) in rep.ops(Side::S).iter().enumerate() {
            assert!(p.u[j].block(0, 0).distance(s) < 1e-14);
        }
    }

    #[test]
    fn padded_primitives_are_row_isometries() {
        let (sys, rep) = pauli();
        let space = GradedFockSpace::new(2, 2, 2, 2, 1, DIM_CAP).unwrap();
        let p = build_primitive_isometries(&sys, &rep, &space, tol()).unwrap();
        assert!(row_isometry_defect(&p.v, &domain(&space, |a, _| a < 2)) < 1e-10);
        assert!(row_isometry_defect(&p.u, &domain(&space, |_, b| b < 2)) < 1e-10);
    }
}
