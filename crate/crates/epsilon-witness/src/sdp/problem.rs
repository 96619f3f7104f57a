//! Public semidefinite-program description: PSD matrix blocks (real
//! symmetric or complex Hermitian), free scalar variables, a linear
//! objective and affine equality/inequality constraints. Complex Hermitian
//! blocks are lowered onto the real symmetric embedding
//! [[Re, −Im], [Im, Re]] before the cone solver runs; objective and
//! constraint values are identical on both sides of the embedding.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::solver::{mat_to_svec, solve_cone, svec_len, svec_to_mat, ConeProblem, ConeStatus};
use crate::error::{Error, Result};
use crate::linalg::{ComplexMatrix, HermitianOperator};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum BlockKind {
    RealSymmetric,
    ComplexHermitian,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct BlockSpec {
    pub id: String,
    pub dim: usize,
    pub kind: BlockKind,
}

/// Affine functional over block entries and free scalars:
/// Σ_j ⟨M_j, X_j⟩ + Σ_k w_k f_k. Coefficient matrices must be Hermitian.
#[derive(Debug, Clone, Default)]
pub struct LinearExpr {
    pub matrix_terms: Vec<(usize, ComplexMatrix)>,
    pub free_terms: Vec<(usize, f64)>,
}

impl LinearExpr {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn with_matrix(mut self, block: usize, m: ComplexMatrix) -> Self {
        self.matrix_terms.push((block, m));
        self
    }

    pub fn with_hermitian(self, block: usize, h: &HermitianOperator) -> Self {
        self.with_matrix(block, h.matrix().clone())
    }

    pub fn with_free(mut self, idx: usize, w: f64) -> Self {
        self.free_terms.push((idx, w));
        self
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Sense {
    /// expr = rhs
    Eq,
    /// expr ≤ rhs
    Le,
    /// expr ≥ rhs
    Ge,
}

#[derive(Debug, Clone)]
pub struct Constraint {
    pub expr: LinearExpr,
    pub sense: Sense,
    pub rhs: f64,
}

/// Maximization problem over PSD blocks and free scalars.
#[derive(Debug, Clone, Default)]
pub struct SdpProblem {
    pub blocks: Vec<BlockSpec>,
    pub free_vars: usize,
    pub objective: LinearExpr,
    pub constraints: Vec<Constraint>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum SdpStatus {
    Optimal,
    Infeasible,
    Unbounded,
    MaxIters,
}

#[derive(Debug, Clone)]
pub struct SdpSolution {
    pub status: SdpStatus,
    /// Objective of the maximization at the returned primal point.
    pub objective_value: f64,
    pub duality_gap: f64,
    /// One Hermitian (or real symmetric) matrix per block.
    pub block_values: Vec<ComplexMatrix>,
    pub free_values: Vec<f64>,
    /// Dual multiplier per constraint, in the order they were added.
    pub constraint_duals: Vec<f64>,
    pub iterations: usize,
    pub primal_residual: f64,
    pub dual_residual: f64,
}

pub const DEFAULT_TOL: f64 = 1e-8;
pub const DEFAULT_MAX_ITERS: usize = 200;

impl SdpProblem {
    pub fn add_block(&mut self, id: impl Into<String>, dim: usize, kind: BlockKind) -> usize {
        self.blocks.push(BlockSpec {
            id: id.into(),
            dim,
            kind,
        });
        self.blocks.len() - 1
    }

    pub fn add_free_vars(&mut self, count: usize) -> std::ops::Range<usize> {
        let start = self.free_vars;
        self.free_vars += count;
        start..self.free_vars
    }

    pub fn set_objective(&mut self, expr: LinearExpr) {
        self.objective = expr;
    }

    pub fn add_constraint(&mut self, expr: LinearExpr, sense: Sense, rhs: f64) {
        self.constraints.push(Constraint { expr, sense, rhs });
    }

    fn real_block_dim(&self, b: usize) -> usize {
        match self.blocks[b].kind {
            BlockKind::RealSymmetric => self.blocks[b].dim,
            BlockKind::ComplexHermitian => 2 * self.blocks[b].dim,
        }
    }

    /// Validate Hermiticity of every coefficient matrix, then lower to the
    /// real cone form and solve.
    pub fn solve(&self, tol: f64, max_iters: usize) -> Result<SdpSolution> {
        if tol <= 0.0 {
            return Err(Error::param("tolerance must be positive"));
        }
        for (ci, cons) in self.constraints.iter().enumerate() {
            validate_expr(&cons.expr, self, format!("constraint {ci}"))?;
        }
        validate_expr(&self.objective, self, "objective".into())?;

        // layout of the lowered cone variable
        let num_blocks = self.blocks.len();
        let real_dims: Vec<usize> = (0..num_blocks).map(|b| self.real_block_dim(b)).collect();
        let mut svec_offsets = Vec::with_capacity(num_blocks);
        let mut acc = 0;
        for &n in &real_dims {
            svec_offsets.push(acc);
            acc += svec_len(n);
        }
        let n_ineq = self
            .constraints
            .iter()
            .filter(|c| c.sense != Sense::Eq)
            .count();
        let nonneg_offset = acc;
        let x_len = acc + n_ineq;
        let p = self.constraints.len();
        let q = self.free_vars;

        let emit = |expr: &LinearExpr, row: &mut [f64], frow: &mut [f64]| {
            for (b, m) in &expr.matrix_terms {
                let n = real_dims[*b];
                let emb = embed_coefficient(m, self.blocks[*b].kind);
                let mut sv = vec![0.0; svec_len(n)];
                mat_to_svec(&emb, n, &mut sv);
                let dst = &mut row[svec_offsets[*b]..svec_offsets[*b] + svec_len(n)];
                for (d, s) in dst.iter_mut().zip(&sv) {
                    *d += s;
                }
            }
            for (k, w) in &expr.free_terms {
                frow[*k] += w;
            }
        };

        // internal min form: c = −objective
        let mut c = vec![0.0; x_len];
        let mut c_free = vec![0.0; q];
        emit(&self.objective, &mut c, &mut c_free);
        for v in c.iter_mut().chain(c_free.iter_mut()) {
            *v = -*v;
        }

        let mut a = vec![0.0; p * x_len];
        let mut fmat = vec![0.0; p * q];
        let mut b_vec = vec![0.0; p];
        let mut slack_idx = 0;
        for (i, cons) in self.constraints.iter().enumerate() {
            let row = &mut a[i * x_len..(i + 1) * x_len];
            let frow = &mut fmat[i * q..(i + 1) * q];
            emit(&cons.expr, row, frow);
            b_vec[i] = cons.rhs;
            match cons.sense {
                Sense::Eq => {}
                Sense::Le => {
                    row[nonneg_offset + slack_idx] = 1.0;
                    slack_idx += 1;
                }
                Sense::Ge => {
                    row[nonneg_offset + slack_idx] = -1.0;
                    slack_idx += 1;
                }
            }
        }

        let cone = ConeProblem {
            psd_dims: real_dims.clone(),
            nonneg: n_ineq,
            a,
            fmat,
            b: b_vec,
            c,
            c_free,
        };
        let sol = solve_cone(&cone, tol, max_iters)?;

        let status = match sol.status {
            ConeStatus::Optimal => SdpStatus::Optimal,
            ConeStatus::PrimalInfeasible => SdpStatus::Infeasible,
            ConeStatus::DualInfeasible => SdpStatus::Unbounded,
            ConeStatus::MaxIters => SdpStatus::MaxIters,
        };

        let mut block_values = Vec::with_capacity(num_blocks);
        for (b, block) in self.blocks.iter().enumerate() {
            let n = real_dims[b];
            let sv = &sol.x[svec_offsets[b]..svec_offsets[b] + svec_len(n)];
            let real = svec_to_mat(sv, n);
            block_values.push(extract_block(&real, block.kind, block.dim));
        }
        // internal duals flip sign with the min↔max conversion
        let constraint_duals: Vec<f64> = sol.y.iter().map(|v| -v).collect();

        Ok(SdpSolution {
            status,
            objective_value: -sol.primal_obj,
            duality_gap: sol.gap,
            block_values,
            free_values: sol.free,
            constraint_duals,
            iterations: sol.iterations,
            primal_residual: sol.pres,
            dual_residual: sol.dres,
        })
    }
}

fn validate_expr(expr: &LinearExpr, prob: &SdpProblem, what: String) -> Result<()> {
    for (b, m) in &expr.matrix_terms {
        if *b >= prob.blocks.len() {
            return Err(Error::param(format!("{what}: block index {b} out of range")));
        }
        if m.rows() != prob.blocks[*b].dim || !m.is_square() {
            return Err(Error::dim("coefficient dim", m.rows(), prob.blocks[*b].dim));
        }
        let dev = m.hermiticity_deviation();
        if dev > 1e-12 {
            return Err(Error::NotHermitian {
                deviation: dev,
                tol: 1e-12,
            });
        }
        if prob.blocks[*b].kind == BlockKind::RealSymmetric {
            let max_im = m
                .entries()
                .iter()
                .map(|z| z.im.abs())
                .fold(0.0_f64, f64::max);
            if max_im > 1e-12 {
                return Err(Error::param(format!(
                    "{what}: complex coefficient on a real symmetric block"
                )));
            }
        }
    }
    for (k, _) in &expr.free_terms {
        if *k >= prob.free_vars {
            return Err(Error::param(format!("{what}: free index {k} out of range")));
        }
    }
    Ok(())
}

/// Real coefficient matrix whose pairing with the lowered variable equals
/// the complex pairing ⟨M, H⟩ = Re Tr(M·H).
fn embed_coefficient(m: &ComplexMatrix, kind: BlockKind) -> Vec<f64> {
    match kind {
        BlockKind::RealSymmetric => {
            let n = m.rows();
            let mut out = vec![0.0; n * n];
            for i in 0..n {
                for j in 0..n {
                    out[i * n + j] = m[(i, j)].re;
                }
            }
            out
        }
        BlockKind::ComplexHermitian => {
            // E(M)/2 = [[P, −Q], [Q, P]]/2 with M = P + iQ; the ½ absorbs
            // the doubling ⟨E(M), E(H)⟩ = 2⟨M, H⟩.
            let d = m.rows();
            let n = 2 * d;
            let mut out = vec![0.0; n * n];
            for i in 0..d {
                for j in 0..d {
                    let z = m[(i, j)];
                    out[i * n + j] = 0.5 * z.re;
                    out[(i + d) * n + (j + d)] = 0.5 * z.re;
                    out[i * n + (j + d)] = -0.5 * z.im;
                    out[(i + d) * n + j] = 0.5 * z.im;
                }
            }
            out
        }
    }
}

/// Project the real solution block back: real part from the diagonal
/// quadrants, imaginary part from the off-diagonal quadrants.
fn extract_block(real: &[f64], kind: BlockKind, dim: usize) -> ComplexMatrix {
    match kind {
        BlockKind::RealSymmetric => {
            let n = dim;
            let mut m = ComplexMatrix::zeros(n, n);
            for i in 0..n {
                for j in 0..n {
                    m[(i, j)] = Complex64::new(real[i * n + j], 0.0);
                }
            }
            m
        }
        BlockKind::ComplexHermitian => {
            let d = dim;
            let n = 2 * d;
            let mut m = ComplexMatrix::zeros(d, d);
            for i in 0..d {
                for j in 0..d {
                    let p = 0.5 * (real[i * n + j] + real[(i + d) * n + (j + d)]);
                    let qim = 0.5 * (real[(i + d) * n + j] - real[i * n + (j + d)]);
                    m[(i, j)] = Complex64::new(p, qim);
                }
            }
            // Hermitian part
            let mh = m.add(&m.adjoint()).scale(Complex64::new(0.5, 0.0));
            mh
        }
    }
}

// ---------------------------------------------------------------------------
// JSON dump/load: triplet lists per coefficient matrix.
// ---------------------------------------------------------------------------

#[derive(Serialize, Deserialize)]
struct TripletMatrix {
    block: usize,
    entries: Vec<(usize, usize, f64, f64)>,
}

#[derive(Serialize, Deserialize)]
struct ExprJson {
    matrices: Vec<TripletMatrix>,
    free: Vec<(usize, f64)>,
}

#[derive(Serialize, Deserialize)]
struct ConstraintJson {
    expr: ExprJson,
    sense: Sense,
    rhs: f64,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct SdpProblemJson {
    blocks: Vec<BlockSpec>,
    free_vars: usize,
    objective: ExprJson,
    constraints: Vec<ConstraintJson>,
}

fn expr_to_json(e: &LinearExpr) -> ExprJson {
    ExprJson {
        matrices: e
            .matrix_terms
            .iter()
            .map(|(b, m)| {
                let mut entries = Vec::new();
                for i in 0..m.rows() {
                    for j in 0..m.cols() {
                        let z = m[(i, j)];
                        if z.re != 0.0 || z.im != 0.0 {
                            entries.push((i, j, z.re, z.im));
                        }
                    }
                }
                TripletMatrix { block: *b, entries }
            })
            .collect(),
        free: e.free_terms.clone(),
    }
}

fn expr_from_json(e: &ExprJson, blocks: &[BlockSpec]) -> Result<LinearExpr> {
    let mut out = LinearExpr::new();
    for t in &e.matrices {
        if t.block >= blocks.len() {
            return Err(Error::param("block index out of range in JSON"));
        }
        let d = blocks[t.block].dim;
        let mut m = ComplexMatrix::zeros(d, d);
        for &(i, j, re, im) in &t.entries {
            if i >= d || j >= d {
                return Err(Error::param("matrix entry out of range in JSON"));
            }
            m[(i, j)] = Complex64::new(re, im);
        }
        out.matrix_terms.push((t.block, m));
    }
    out.free_terms = e.free.clone();
    Ok(out)
}

impl SdpProblem {
    pub fn to_json(&self) -> Result<String> {
        let file = SdpProblemJson {
            blocks: self.blocks.clone(),
            free_vars: self.free_vars,
            objective: expr_to_json(&self.objective),
            constraints: self
                .constraints
                .iter()
                .map(|c| ConstraintJson {
                    expr: expr_to_json(&c.expr),
                    sense: c.sense,
                    rhs: c.rhs,
                })
                .collect(),
        };
        Ok(serde_json::to_string_pretty(&file)?)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let file: SdpProblemJson = serde_json::from_str(text)?;
        let mut prob = SdpProblem {
            blocks: file.blocks,
            free_vars: file.free_vars,
            ..Default::default()
        };
        prob.objective = expr_from_json(&file.objective, &prob.blocks)?;
        for c in &file.constraints {
            let expr = expr_from_json(&c.expr, &prob.blocks)?;
            prob.add_constraint(expr, c.sense, c.rhs);
        }
        Ok(prob)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{eigh, kron, ComplexMatrix};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn sigma_z() -> ComplexMatrix {
        ComplexMatrix::from_real(2, 2, &[1.0, 0.0, 0.0, -1.0]).unwrap()
    }

    fn sigma_x() -> ComplexMatrix {
        ComplexMatrix::from_real(2, 2, &[0.0, 1.0, 1.0, 0.0]).unwrap()
    }

    fn eigenvalue_sdp(c: &ComplexMatrix, kind: BlockKind) -> SdpSolution {
        let mut prob = SdpProblem::default();
        let n = c.rows();
        let b = prob.add_block("x", n, kind);
        prob.set_objective(LinearExpr::new().with_matrix(b, c.clone()));
        prob.add_constraint(
            LinearExpr::new().with_matrix(b, ComplexMatrix::identity(n)),
            Sense::Eq,
            1.0,
        );
        prob.solve(DEFAULT_TOL, DEFAULT_MAX_ITERS).unwrap()
    }

    #[test]
    fn eigenvalue_sdp_sigma_z() {
        let sol = eigenvalue_sdp(&sigma_z(), BlockKind::RealSymmetric);
        assert_eq!(sol.status, SdpStatus::Optimal);
        assert!((sol.objective_value - 1.0).abs() < 1e-7);
        let sol = eigenvalue_sdp(&sigma_z(), BlockKind::ComplexHermitian);
        assert_eq!(sol.status, SdpStatus::Optimal);
        assert!((sol.objective_value - 1.0).abs() < 1e-7);
    }

    #[test]
    fn lp_via_diagonal_block() {
        // maximize x s.t. x ≤ 3 on a 1×1 block
        let mut prob = SdpProblem::default();
        let b = prob.add_block("x", 1, BlockKind::RealSymmetric);
        let one = ComplexMatrix::identity(1);
        prob.set_objective(LinearExpr::new().with_matrix(b, one.clone()));
        prob.add_constraint(LinearExpr::new().with_matrix(b, one), Sense::Le, 3.0);
        let sol = prob.solve(DEFAULT_TOL, DEFAULT_MAX_ITERS).unwrap();
        assert_eq!(sol.status, SdpStatus::Optimal);
        assert!((sol.objective_value - 3.0).abs() < 1e-7);
        assert!((sol.block_values[0][(0, 0)].re - 3.0).abs() < 1e-6);
    }

    #[test]
    fn xx_plus_zz_top_eigenvalue() {
        let xx = kron(&sigma_x(), &sigma_x());
        let zz = kron(&sigma_z(), &sigma_z());
        let c = xx.add(&zz);
        let sol = eigenvalue_sdp(&c, BlockKind::ComplexHermitian);
        assert_eq!(sol.status, SdpStatus::Optimal);
        assert!((sol.objective_value - 2.0).abs() < 1e-6);
    }

    #[test]
    fn random_eigenvalue_family_matches_eigh() {
        let mut rng = ChaCha8Rng::seed_from_u64(71);
        for trial in 0..50 {
            let n = 2 + trial % 7; // dims 2..8
            let g = crate::linalg::haar_random_unitary(n, &mut rng);
            // random Hermitian with spread spectrum
            let mut diag = ComplexMatrix::zeros(n, n);
            for i in 0..n {
                diag[(i, i)] = Complex64::new(rng.gen_range(-2.0..2.0), 0.0);
            }
            let c = g.matmul(&diag).matmul(&g.adjoint());
            let c = c.add(&c.adjoint()).scale(Complex64::new(0.5, 0.0));
            let h = HermitianOperator::new(c.clone()).unwrap();
            let (w, _) = eigh(&h).unwrap();
            let sol = eigenvalue_sdp(&c, BlockKind::ComplexHermitian);
            assert_eq!(sol.status, SdpStatus::Optimal);
            assert!(
                (sol.objective_value - w[n - 1]).abs() < 1e-6,
                "n={n}: sdp {} vs eigh {}",
                sol.objective_value,
                w[n - 1]
            );
            // weak duality: reported primal within gap of optimum
            assert!(sol.objective_value <= w[n - 1] + 1e-6);
        }
    }

    #[test]
    fn infeasible_reported() {
        // Tr X = −1 with X ⪰ 0
        let mut prob = SdpProblem::default();
        let b = prob.add_block("x", 2, BlockKind::RealSymmetric);
        prob.set_objective(LinearExpr::new());
        prob.add_constraint(
            LinearExpr::new().with_matrix(b, ComplexMatrix::identity(2)),
            Sense::Eq,
            -1.0,
        );
        let sol = prob.solve(DEFAULT_TOL, DEFAULT_MAX_ITERS).unwrap();
        assert_eq!(sol.status, SdpStatus::Infeasible);
    }

    #[test]
    fn unbounded_reported() {
        // maximize Tr X, X ⪰ 0 unconstrained
        let mut prob = SdpProblem::default();
        let b = prob.add_block("x", 2, BlockKind::RealSymmetric);
        prob.set_objective(LinearExpr::new().with_matrix(b, ComplexMatrix::identity(2)));
        let sol = prob.solve(DEFAULT_TOL, DEFAULT_MAX_ITERS).unwrap();
        assert_eq!(sol.status, SdpStatus::Unbounded);
    }

    #[test]
    fn equality_and_free_vars() {
        // maximize f s.t. f + Tr X = 2, Tr X ≥ 0.5 ⇒ f ≤ 1.5
        let mut prob = SdpProblem::default();
        let b = prob.add_block("x", 2, BlockKind::RealSymmetric);
        let fr = prob.add_free_vars(1);
        prob.set_objective(LinearExpr::new().with_free(fr.start, 1.0));
        prob.add_constraint(
            LinearExpr::new()
                .with_matrix(b, ComplexMatrix::identity(2))
                .with_free(fr.start, 1.0),
            Sense::Eq,
            2.0,
        );
        prob.add_constraint(
            LinearExpr::new().with_matrix(b, ComplexMatrix::identity(2)),
            Sense::Ge,
            0.5,
        );
        let sol = prob.solve(DEFAULT_TOL, DEFAULT_MAX_ITERS).unwrap();
        assert_eq!(sol.status, SdpStatus::Optimal);
        assert!((sol.objective_value - 1.5).abs() < 1e-6);
        assert!((sol.free_values[0] - 1.5).abs() < 1e-6);
    }

    #[test]
    fn rejects_nonhermitian_coefficient() {
        let mut prob = SdpProblem::default();
        let b = prob.add_block("x", 2, BlockKind::ComplexHermitian);
        let bad = ComplexMatrix::from_real(2, 2, &[0.0, 1.0, 0.0, 0.0]).unwrap();
        prob.set_objective(LinearExpr::new().with_matrix(b, bad));
        assert!(prob.solve(DEFAULT_TOL, DEFAULT_MAX_ITERS).is_err());
    }

    #[test]
    fn embedding_objective_agreement() {
        // the same Hermitian eigenvalue problem through both block kinds on a
        // real-entried matrix must agree to solver tolerance
        let c = sigma_x();
        let s1 = eigenvalue_sdp(&c, BlockKind::RealSymmetric);
        let s2 = eigenvalue_sdp(&c, BlockKind::ComplexHermitian);
        assert!((s1.objective_value - s2.objective_value).abs() < 1e-7);
    }

    #[test]
    fn deterministic_resolve() {
        let c = sigma_x().add(&sigma_z().scale(Complex64::new(0.3, 0.0)));
        let a = eigenvalue_sdp(&c, BlockKind::ComplexHermitian);
        let b = eigenvalue_sdp(&c, BlockKind::ComplexHermitian);
        assert_eq!(a.objective_value.to_bits(), b.objective_value.to_bits());
        assert_eq!(a.iterations, b.iterations);
    }

    #[test]
    fn json_round_trip() {
        let mut prob = SdpProblem::default();
        let b = prob.add_block("x", 2, BlockKind::ComplexHermitian);
        let fr = prob.add_free_vars(1);
        prob.set_objective(
            LinearExpr::new()
                .with_matrix(b, sigma_x())
                .with_free(fr.start, 0.5),
        );
        prob.add_constraint(
            LinearExpr::new().with_matrix(b, ComplexMatrix::identity(2)),
            Sense::Eq,
            1.0,
        );
        prob.add_constraint(
            LinearExpr::new().with_free(fr.start, 1.0),
            Sense::Le,
            2.0,
        );
        let text = prob.to_json().unwrap();
        let back = SdpProblem::from_json(&text).unwrap();
        let s1 = prob.solve(DEFAULT_TOL, DEFAULT_MAX_ITERS).unwrap();
        let s2 = back.solve(DEFAULT_TOL, DEFAULT_MAX_ITERS).unwrap();
        assert_eq!(s1.objective_value.to_bits(), s2.objective_value.to_bits());
    }

    use num_complex::Complex64;
    use rand::Rng;

    use crate::linalg::HermitianOperator;
}
