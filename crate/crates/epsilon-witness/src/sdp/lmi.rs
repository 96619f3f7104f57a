//! LMI-form wrapper: maximize cᵀs subject to an affine matrix inequality
//! G₀ + Σ s_k G_k ⪰ 0 in one or more blocks, linear equalities and scalar
//! inequalities on s. Solved through the standard-form [`SdpProblem`] by
//! Lagrangian dualization, which keeps the Schur complement at the size of
//! s; the LMI point is read off the constraint duals and the certified bound
//! from the feasible side of the solved pair.

use num_complex::Complex64;

use super::problem::{BlockKind, LinearExpr, SdpProblem, SdpStatus, Sense};
use crate::error::{Error, Result};
use crate::linalg::ComplexMatrix;

/// One affine matrix block G₀ + Σ s_k G_k.
#[derive(Debug, Clone)]
pub struct LmiBlock {
    pub kind: BlockKind,
    pub dim: usize,
    pub g0: ComplexMatrix,
    /// one coefficient matrix per scalar variable (zeros allowed)
    pub gs: Vec<ComplexMatrix>,
}

#[derive(Debug, Clone, Default)]
pub struct LmiProblem {
    pub num_vars: usize,
    /// maximize objective·s
    pub objective: Vec<f64>,
    pub blocks: Vec<LmiBlock>,
    /// rows e·s = rhs
    pub eqs: Vec<(Vec<f64>, f64)>,
    /// rows g·s ≥ rhs
    pub ge_rows: Vec<(Vec<f64>, f64)>,
    /// rows g·s ≤ rhs
    pub le_rows: Vec<(Vec<f64>, f64)>,
}

#[derive(Debug, Clone)]
pub struct LmiSolution {
    pub status: SdpStatus,
    /// Certified upper bound on the LMI maximum (feasible dual objective).
    pub upper_bound: f64,
    /// Near-optimal LMI point.
    pub s: Vec<f64>,
    pub duality_gap: f64,
    pub iterations: usize,
}

impl LmiProblem {
    pub fn solve(&self, tol: f64, max_iters: usize) -> Result<LmiSolution> {
        let m = self.num_vars;
        if self.objective.len() != m {
            return Err(Error::dim("lmi objective", self.objective.len(), m));
        }
        for blk in &self.blocks {
            if blk.gs.len() != m {
                return Err(Error::dim("lmi block coefficients", blk.gs.len(), m));
            }
        }

        // Dual of max cᵀs s.t. Σ s_k G_k + G₀ ⪰ 0, E s = e, scalar rows as
        // 1×1 blocks:  min ⟨G₀, Y⟩ + eᵀν  s.t. ⟨G_k, Y⟩ = (Eᵀν)_k − c_k.
        // As a maximization for SdpProblem: maximize ⟨−G₀, Y⟩ − eᵀν.
        let mut prob = SdpProblem::default();
        let mut block_ids = Vec::with_capacity(self.blocks.len());
        for (bi, blk) in self.blocks.iter().enumerate() {
            block_ids.push(prob.add_block(format!("Y{bi}"), blk.dim, blk.kind));
        }
        // scalar inequality rows become 1×1 real blocks of the LMI
        let mut scalar_blocks = Vec::new();
        for (row, rhs) in &self.ge_rows {
            let id = prob.add_block(format!("ge{}", scalar_blocks.len()), 1, BlockKind::RealSymmetric);
            scalar_blocks.push((id, row.clone(), -*rhs, 1.0));
        }
        for (row, rhs) in &self.le_rows {
            let id = prob.add_block(format!("le{}", scalar_blocks.len()), 1, BlockKind::RealSymmetric);
            scalar_blocks.push((id, row.clone(), *rhs, -1.0));
        }
        let nu_range = prob.add_free_vars(self.eqs.len());

        let mut objective = LinearExpr::new();
        for (bi, blk) in self.blocks.iter().enumerate() {
            let neg = blk.g0.scale(Complex64::new(-1.0, 0.0));
            objective = objective.with_matrix(block_ids[bi], neg);
        }
        for (id, _, g0val, _) in &scalar_blocks {
            // 1×1 block constant term: G(s) entry = sign·(g·s) + g0val
            let mut m1 = ComplexMatrix::zeros(1, 1);
            m1[(0, 0)] = Complex64::new(-*g0val, 0.0);
            objective = objective.with_matrix(*id, m1);
        }
        for (j, (_, rhs)) in self.eqs.iter().enumerate() {
            objective = objective.with_free(nu_range.start + j, -*rhs);
        }
        prob.set_objective(objective);

        for k in 0..m {
            let mut expr = LinearExpr::new();
            for (bi, blk) in self.blocks.iter().enumerate() {
                expr = expr.with_matrix(block_ids[bi], blk.gs[k].clone());
            }
            for (id, row, _, sign) in &scalar_blocks {
                if row[k] != 0.0 {
                    let mut m1 = ComplexMatrix::zeros(1, 1);
                    m1[(0, 0)] = Complex64::new(sign * row[k], 0.0);
                    expr = expr.with_matrix(*id, m1);
                }
            }
            for (j, (row, _)) in self.eqs.iter().enumerate() {
                if row[k] != 0.0 {
                    expr = expr.with_free(nu_range.start + j, -row[k]);
                }
            }
            prob.add_constraint(expr, Sense::Eq, -self.objective[k]);
        }

        let sol = prob.solve(tol, max_iters)?;
        let status = match sol.status {
            // infeasibility/unboundedness swap under dualization
            SdpStatus::Infeasible => SdpStatus::Unbounded,
            SdpStatus::Unbounded => SdpStatus::Infeasible,
            s => s,
        };
        Ok(LmiSolution {
            status,
            upper_bound: -sol.objective_value,
            s: sol.constraint_duals,
            duality_gap: sol.duality_gap,
            iterations: sol.iterations,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{eigh, HermitianOperator};
    use crate::sdp::{DEFAULT_MAX_ITERS, DEFAULT_TOL};

    /// max s s.t. s·I ⪯ C, i.e. C − sI ⪰ 0: optimum is λ_min(C).
    #[test]
    fn smallest_eigenvalue_lmi() {
        let c = ComplexMatrix::from_real(2, 2, &[2.0, 0.5, 0.5, 1.0]).unwrap();
        let h = HermitianOperator::new(c.clone()).unwrap();
        let (w, _) = eigh(&h).unwrap();
        let neg_eye = ComplexMatrix::identity(2).scale(Complex64::new(-1.0, 0.0));
        let prob = LmiProblem {
            num_vars: 1,
            objective: vec![1.0],
            blocks: vec![LmiBlock {
                kind: BlockKind::RealSymmetric,
                dim: 2,
                g0: c,
                gs: vec![neg_eye],
            }],
            eqs: vec![],
            ge_rows: vec![],
            le_rows: vec![],
        };
        let sol = prob.solve(DEFAULT_TOL, DEFAULT_MAX_ITERS).unwrap();
        assert_eq!(sol.status, SdpStatus::Optimal);
        assert!((sol.upper_bound - w[0]).abs() < 1e-6, "bound {} vs {}", sol.upper_bound, w[0]);
        assert!((sol.s[0] - w[0]).abs() < 1e-5);
    }

    /// Affine combination of two PSD matrices: max c·s with Σs = 1 and
    /// s₁A + s₂B ⪰ 0; with A, B ⪰ 0 the whole segment is feasible and the
    /// optimum sits at a vertex.
    #[test]
    fn affine_combination_vertex() {
        let a = ComplexMatrix::from_real(2, 2, &[1.0, 0.0, 0.0, 2.0]).unwrap();
        let b = ComplexMatrix::from_real(2, 2, &[2.0, 0.0, 0.0, 1.0]).unwrap();
        let zero = ComplexMatrix::zeros(2, 2);
        let prob = LmiProblem {
            num_vars: 2,
            objective: vec![3.0, 1.0],
            blocks: vec![LmiBlock {
                kind: BlockKind::RealSymmetric,
                dim: 2,
                g0: zero,
                gs: vec![a, b],
            }],
            eqs: vec![(vec![1.0, 1.0], 1.0)],
            ge_rows: vec![(vec![1.0, 0.0], 0.0), (vec![0.0, 1.0], 0.0)],
            le_rows: vec![],
        };
        let sol = prob.solve(DEFAULT_TOL, DEFAULT_MAX_ITERS).unwrap();
        assert_eq!(sol.status, SdpStatus::Optimal);
        assert!((sol.upper_bound - 3.0).abs() < 1e-6);
        assert!((sol.s[0] - 1.0).abs() < 1e-5);
        assert!((sol.s[1]).abs() < 1e-5);
        let sum: f64 = sol.s.iter().sum();
        assert!((sum - 1.0).abs() < 1e-8);
    }

    /// Without the nonnegativity rows the PSD constraint itself binds:
    /// s₁A + s₂B ⪰ 0 on the affine line s₁+s₂ = 1 allows s₁ beyond 1 until
    /// the combination loses positivity.
    #[test]
    fn psd_constraint_binds() {
        let a = ComplexMatrix::from_real(2, 2, &[1.0, 0.0, 0.0, 2.0]).unwrap();
        let b = ComplexMatrix::from_real(2, 2, &[2.0, 0.0, 0.0, 1.0]).unwrap();
        let zero = ComplexMatrix::zeros(2, 2);
        let prob = LmiProblem {
            num_vars: 2,
            objective: vec![1.0, 0.0],
            blocks: vec![LmiBlock {
                kind: BlockKind::RealSymmetric,
                dim: 2,
                g0: zero,
                gs: vec![a, b],
            }],
            eqs: vec![(vec![1.0, 1.0], 1.0)],
            ge_rows: vec![],
            le_rows: vec![],
        };
        // s₂ = 1 − s₁: combination diag(s₁ + 2(1−s₁), 2s₁ + (1−s₁)) =
        // diag(2−s₁, 1+s₁) ⪰ 0 ⇔ −1 ≤ s₁ ≤ 2 → max s₁ = 2
        let sol = prob.solve(DEFAULT_TOL, DEFAULT_MAX_ITERS).unwrap();
        assert_eq!(sol.status, SdpStatus::Optimal);
        assert!((sol.upper_bound - 2.0).abs() < 1e-6, "bound {}", sol.upper_bound);
    }

    #[test]
    fn le_row_binds() {
        // max s s.t. s ⪰ 0 (1×1 LMI), s ≤ 5
        let one = ComplexMatrix::identity(1);
        let prob = LmiProblem {
            num_vars: 1,
            objective: vec![1.0],
            blocks: vec![LmiBlock {
                kind: BlockKind::RealSymmetric,
                dim: 1,
                g0: ComplexMatrix::zeros(1, 1),
                gs: vec![one],
            }],
            eqs: vec![],
            ge_rows: vec![],
            le_rows: vec![(vec![1.0], 5.0)],
        };
        let sol = prob.solve(DEFAULT_TOL, DEFAULT_MAX_ITERS).unwrap();
        assert_eq!(sol.status, SdpStatus::Optimal);
        assert!((sol.upper_bound - 5.0).abs() < 1e-6);
    }
}
