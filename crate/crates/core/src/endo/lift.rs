use alloc::format;
use alloc::vec::Vec;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::cp::KrausFamily;
use crate::dilation::DilationResult;
use crate::error::{Error, Result};
use crate::linalg::{BlockMatrix, ComplexMatrix, C64};
use crate::report::Report;

/// Threshold for identities that hold exactly at any truncation.
pub const EXACT: f64 = 1e-10;

/// `α(b) = Σ V_i b V_i^*` and `β(b) = Σ U_j b U_j^*` on the truncated space.
///
/// `α` dilates the map built from the `T` family and `β` the one built from
/// the `S` family.
#[derive(Debug, Clone)]
pub struct EndoPair {
    pub result: DilationResult,
    v_adj: Vec<BlockMatrix>,
    u_adj: Vec<BlockMatrix>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Lift {
    Alpha,
    Beta,
}

impl Lift {
    fn name(self) -> &'static str {
        match self {
            Lift::Alpha => "alpha",
            Lift::Beta => "beta",
        }
    }
}

pub fn lift_endomorphisms(result: DilationResult) -> EndoPair {
    let v_adj = result.v.iter().map(BlockMatrix::adjoint).collect();
    let u_adj = result.u.iter().map(BlockMatrix::adjoint).collect();
    EndoPair { result, v_adj, u_adj }
}

impl EndoPair {
    pub fn valid_depth(&self) -> usize {
        self.result.valid_depth
    }

    fn ops(&self, lift: Lift) -> (&[BlockMatrix], &[BlockMatrix]) {
        match lift {
            Lift::Alpha => (&self.result.v, &self.v_adj),
            Lift::Beta => (&self.result.u, &self.u_adj),
        }
    }

    pub fn apply(&self, lift: Lift, b: &BlockMatrix) -> BlockMatrix {
        self.apply_window(lift, b, self.result.space.depth())
    }

    /// The blocks of `lift(b)` on levels `≤ top`.
    pub fn apply_window(&self, lift: Lift, b: &BlockMatrix, top: usize) -> BlockMatrix {
        let sizes = b.row_sizes();
        let levels = sizes.len();
        let top = top.min(levels - 1);
        let mut out = BlockMatrix::zeros(sizes, sizes);
        let (ops, adj) = self.ops(lift);
        for (x, xa) in ops.iter().zip(adj) {
            for r in 0..=top {
                for k in 0..levels {
                    let Some(a) = x.get(r, k) else { continue };
                    for k2 in 0..levels {
                        let Some(bb) = b.get(k, k2) else { continue };
                        let ab = a.matmul(bb);
                        for c in 0..=top {
                            if let Some(y) = xa.get(k2, c) {
                                out.add_to(r, c, &ab.matmul(y));
                            }
                        }
                    }
                }
            }
        }
        out
    }

    pub fn alpha(&self, b: &BlockMatrix) -> BlockMatrix {
        self.apply(Lift::Alpha, b)
    }

    pub fn beta(&self, b: &BlockMatrix) -> BlockMatrix {
        self.apply(Lift::Beta, b)
    }

    /// `lift(I) P`, where `P` projects onto the levels `≤ top`.
    fn unit_times_window(&self, lift: Lift, top: usize) -> BlockMatrix {
        let p = window_projection(self.result.space.level_sizes(), top);
        let mut out = BlockMatrix::zeros(p.row_sizes(), p.col_sizes());
        let (ops, adj) = self.ops(lift);
        for (x, xa) in ops.iter().zip(adj) {
            out = out.add(&x.matmul(&xa.matmul(&p)));
        }
        out
    }

    /// `lift(I) = Σ X X^*`.
    pub fn unit_image(&self, lift: Lift) -> BlockMatrix {
        self.unit_times_window(lift, self.result.space.depth())
    }
}

fn window_projection(sizes: &[usize], top: usize) -> BlockMatrix {
    let mut p = BlockMatrix::zeros(sizes, sizes);
    for (l, &s) in sizes.iter().enumerate().take(top + 1) {
        p.set(l, l, ComplexMatrix::identity(s));
    }
    p
}

/// A random operator supported on levels `≤ top`, unit Frobenius norm.
fn random_windowed(sizes: &[usize], top: usize, rng: &mut ChaCha8Rng) -> BlockMatrix {
    let mut b = BlockMatrix::zeros(sizes, sizes);
    for r in 0..=top {
        for c in 0..=top {
            let blk = ComplexMatrix::from_fn(sizes[r], sizes[c], |_, _| {
                C64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0))
            });
            b.set(r, c, blk);
        }
    }
    let norm = b.frobenius_norm();
    b.scale(C64::new(1.0 / norm, 0.0))
}

#[derive(Debug, Clone, Copy)]
pub struct EndoCheck {
    /// Number of random operator pairs.
    pub samples: usize,
    pub seed: u64,
    pub accept: f64,
}

impl Default for EndoCheck {
    fn default() -> Self {
        EndoCheck {
            samples: 100,
            seed: 0,
            accept: crate::dilation::DEFAULT_ACCEPT,
        }
    }
}

/// Residuals of the endomorphic-dilation identities; random operators live
/// on levels `≤ depth`, which must not exceed `valid_depth − 1`.
pub fn verify_endomorphic_dilation(
    pair: &EndoPair,
    theta: &KrausFamily,
    phi: &KrausFamily,
    depth: usize,
    check: EndoCheck,
) -> Result<Report> {
    let res = &pair.result;
    if depth + 1 > res.valid_depth.max(1) {
        return Err(Error::invalid(format!(
            "endomorphism window {depth} exceeds {} for truncation level {}",
            res.valid_depth.saturating_sub(1),
            res.space.depth()
        )));
    }
    let d = res.space.d();
    if theta.d() != d || phi.d() != d {
        return Err(Error::invalid(
            "maps act on a different algebra than the dilation",
        ));
    }
    let sizes = res.space.level_sizes().to_vec();
    let accept = check.accept;
    let mut report = Report::new();
    let window = format!("levels <= {depth}");

    for (lift, map) in [(Lift::Alpha, theta), (Lift::Beta, phi)] {
        // W^* lift(W a W^*) W against the map, over matrix units.
        let mut worst = 0.0f64;
        for p in 0..d {
            for q in 0..d {
                let a = ComplexMatrix::unit(d, p, q);
                let mut wa = BlockMatrix::zeros(&sizes, &sizes);
                wa.set(0, 0, a.clone());
                let corner = pair.apply(lift, &wa).block(0, 0);
                worst = worst.max(corner.distance(&map.apply(&a)?));
            }
        }
        report.push(format!("corner recovery ({})", lift.name()), worst, "H", EXACT);

        // lift(P_H) P_H = lift(I) P_H.
        let p0 = window_projection(&sizes, 0);
        let lhs = pair.apply(lift, &p0).matmul(&p0);
        let rhs = pair.unit_times_window(lift, 0);
        report.push(
            format!("coinvariance ({})", lift.name()),
            lhs.sub(&rhs).frobenius_norm(),
            "H",
            accept,
        );

        // P lift(I)^2 P = P lift(I) P on the window.
        let x = pair.unit_times_window(lift, depth);
        let square = x.adjoint().matmul(&x);
        let comp = x.window(depth, depth);
        report.push(
            format!("projection {}(I)", lift.name()),
            square.sub(&comp).frobenius_norm(),
            window.clone(),
            accept,
        );
    }

    // Lifts of operators on levels `≤ depth` live on levels `≤ depth + 1`;
    // the commutation identity is compared on the window itself.
    let support = depth + 1;
    let mut rng = ChaCha8Rng::seed_from_u64(check.seed);
    let (mut mult_a, mut mult_b, mut comm) = (0.0f64, 0.0f64, 0.0f64);
    for _ in 0..check.samples {
        let b1 = random_windowed(&sizes, depth, &mut rng);
        let b2 = random_windowed(&sizes, depth, &mut rng);
        let prod = b1.matmul(&b2);
        for (lift, slot) in [(Lift::Alpha, &mut mult_a), (Lift::Beta, &mut mult_b)] {
            let lhs = pair.apply_window(lift, &prod, support);
            let rhs = pair
                .apply_window(lift, &b1, support)
                .matmul(&pair.apply_window(lift, &b2, support));
            *slot = slot.max(lhs.sub(&rhs).frobenius_norm());
        }
        let ab = pair.apply_window(Lift::Alpha, &pair.apply_window(Lift::Beta, &b1, depth), depth);
        let ba = pair.apply_window(Lift::Beta, &pair.apply_window(Lift::Alpha, &b1, depth), depth);
        comm = comm.max(ab.sub(&ba).frobenius_norm());
    }
    let sampled = format!("{} seeded operators on levels <= {depth}", check.samples);
    report.push("multiplicativity (alpha)", mult_a, sampled.clone(), accept);
    report.push("multiplicativity (beta)", mult_b, sampled.clone(), accept);
    report.push("alpha-beta commutation", comm, sampled, accept);
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dilation::{assemble_dilation, DilationConfig};
    use crate::linalg::Tolerance;
    use crate::product::{CovariantRep, ScalarProductSystem};
    use alloc::vec;

    fn scalar_pair(t: f64, s: f64, depth: usize) -> (CovariantRep, DilationResult) {
        let sys = ScalarProductSystem::new(1, 1, ComplexMatrix::identity(1), Tolerance::default()).unwrap();
        let rep = CovariantRep::new(
            1,
            vec![ComplexMatrix::scalar(C64::new(t, 0.0))],
            vec![ComplexMatrix::scalar(C64::new(s, 0.0))],
        )
        .unwrap();
        let res = assemble_dilation(&sys, &rep, depth, DilationConfig::default()).unwrap();
        (rep, res)
    }

    fn quick() -> EndoCheck {
        EndoCheck {
            samples: 10,
            ..EndoCheck::default()
        }
    }

    #[test]
    fn ando_corner_is_a_quarter() {
        let (rep, res) = scalar_pair(0.5, 1.0 / 3.0, 3);
        let (theta, phi) = rep.induced_cp_pair();
        let pair = lift_endomorphisms(res);
        let mut b = BlockMatrix::zeros(pair.result.space.level_sizes(), pair.result.space.level_sizes());
        b.set(0, 0, ComplexMatrix::identity(1));
        assert!((pair.alpha(&b).block(0, 0)[(0, 0)] - C64::new(0.25, 0.0)).norm() < 1e-15);
        let report = verify_endomorphic_dilation(&pair, &theta, &phi, 1, quick()).unwrap();
        assert!(report.passed(), "{report:?}");
    }

    #[test]
    fn zero_pair_unit_image_is_the_shifted_grades() {
        let (_, res) = scalar_pair(0.0, 0.0, 3);
        let space = res.space.clone();
        let pair = lift_endomorphisms(res);
        let proj = pair.unit_image(Lift::Alpha).window(1, 1).to_dense();
        let top = space.level_offsets()[2];
        for i in 0..top {
            for j in 0..top {
                let want = if i == j && space.label(i).a >= 1 { 1.0 } else { 0.0 };
                assert!((proj[(i, j)] - C64::new(want, 0.0)).norm() < 1e-12, "({i},{j})");
            }
        }
    }

    #[test]
    fn identity_rep_lifts_to_identity_on_the_corner() {
        let (rep, res) = scalar_pair(1.0, 1.0, 3);
        let (theta, phi) = rep.induced_cp_pair();
        let pair = lift_endomorphisms(res);
        let report = verify_endomorphic_dilation(&pair, &theta, &phi, 1, quick()).unwrap();
        assert!(report.passed(), "{report:?}");
    }

    #[test]
    fn pauli_lifts_are_commuting_endomorphisms() {
        let (sys, rep) = crate::dilation::primitive::tests::pauli();
        let res = assemble_dilation(&sys, &rep, 4, DilationConfig::default()).unwrap();
        let (theta, phi) = rep.induced_cp_pair();
        let pair = lift_endomorphisms(res);
        let report = verify_endomorphic_dilation(&pair, &theta, &phi, 2, quick()).unwrap();
        assert!(report.passed(), "{report:?}");
        assert!(report.get("corner recovery (alpha)").unwrap().max_residual <= EXACT);
    }

    #[test]
    fn corrupted_alpha_breaks_coinvariance() {
        let (sys, rep) = crate::dilation::primitive::tests::pauli();
        let res = assemble_dilation(&sys, &rep, 3, DilationConfig::default()).unwrap();
        let (theta, phi) = rep.induced_cp_pair();
        let mut res = res;
        let (r, c) = (res.space.level_sizes()[0], res.space.level_sizes()[1]);
        res.v[1].add_to(0, 1, &ComplexMatrix::from_fn(r, c, |_, _| C64::new(0.5, 0.0)));
        let pair = lift_endomorphisms(res);
        let report = verify_endomorphic_dilation(&pair, &theta, &phi, 1, quick()).unwrap();
        assert!(report.get("coinvariance (alpha)").unwrap().max_residual > 1e-3);
        assert!(!report.passed());
    }

    #[test]
    fn window_is_enforced() {
        let (rep, res) = scalar_pair(0.5, 0.5, 3);
        let (theta, phi) = rep.induced_cp_pair();
        let pair = lift_endomorphisms(res);
        assert!(verify_endomorphic_dilation(&pair, &theta, &phi, 2, quick()).is_err());
    }
}
