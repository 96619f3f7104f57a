//! Dense complex linear algebra kernel.
//!
//! Everything downstream works with small dense matrices (local dimensions up
//! to ~10, bipartite operators up to ~100, moment matrices up to a few
//! hundred rows), so the representation is a flat row-major `Vec<Complex64>`
//! with no sparsity or blocking.

mod eigh;
mod random;

pub use eigh::eigh;
pub use random::{
    haar_random_unitary, random_povm, random_projective_measurement, random_pure_state,
};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub const HERMITICITY_TOL: f64 = 1e-12;
pub const PSD_TOL: f64 = 1e-10;
pub const TRACE_TOL: f64 = 1e-10;
pub const UNIT_NORM_TOL: f64 = 1e-12;

/// Dense complex matrix, row-major.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ComplexMatrix {
    rows: usize,
    cols: usize,
    entries: Vec<Complex64>,
}

impl ComplexMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        ComplexMatrix {
            rows,
            cols,
            entries: vec![Complex64::new(0.0, 0.0); rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = Complex64::new(1.0, 0.0);
        }
        m
    }

    pub fn from_entries(rows: usize, cols: usize, entries: Vec<Complex64>) -> Result<Self> {
        if entries.len() != rows * cols {
            return Err(Error::dim("entry count", entries.len(), rows * cols));
        }
        if entries.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(Error::param("non-finite matrix entry"));
        }
        Ok(ComplexMatrix {
            rows,
            cols,
            entries,
        })
    }

    /// Build from real entries (imaginary parts zero).
    pub fn from_real(rows: usize, cols: usize, entries: &[f64]) -> Result<Self> {
        Self::from_entries(
            rows,
            cols,
            entries.iter().map(|&x| Complex64::new(x, 0.0)).collect(),
        )
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn entries(&self) -> &[Complex64] {
        &self.entries
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn transpose(&self) -> Self {
        let mut out = Self::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                out[(j, i)] = self[(i, j)];
            }
        }
        out
    }

    pub fn conj(&self) -> Self {
        ComplexMatrix {
            rows: self.rows,
            cols: self.cols,
            entries: self.entries.iter().map(|z| z.conj()).collect(),
        }
    }

    pub fn adjoint(&self) -> Self {
        let mut out = Self::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                out[(j, i)] = self[(i, j)].conj();
            }
        }
        out
    }

    pub fn scale(&self, s: Complex64) -> Self {
        ComplexMatrix {
            rows: self.rows,
            cols: self.cols,
            entries: self.entries.iter().map(|z| z * s).collect(),
        }
    }

    pub fn add(&self, other: &Self) -> Self {
        assert_eq!(self.rows, other.rows);
        assert_eq!(self.cols, other.cols);
        ComplexMatrix {
            rows: self.rows,
            cols: self.cols,
            entries: self
                .entries
                .iter()
                .zip(&other.entries)
                .map(|(a, b)| a + b)
                .collect(),
        }
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.scale(Complex64::new(-1.0, 0.0)))
    }

    pub fn matmul(&self, other: &Self) -> Self {
        assert_eq!(self.cols, other.rows, "matmul shape mismatch");
        let mut out = Self::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self[(i, k)];
                if a.re == 0.0 && a.im == 0.0 {
                    continue;
                }
                for j in 0..other.cols {
                    out[(i, j)] += a * other[(k, j)];
                }
            }
        }
        out
    }

    /// Matrix-vector product.
    pub fn matvec(&self, v: &[Complex64]) -> Vec<Complex64> {
        assert_eq!(self.cols, v.len());
        let mut out = vec![Complex64::new(0.0, 0.0); self.rows];
        for i in 0..self.rows {
            let mut acc = Complex64::new(0.0, 0.0);
            for j in 0..self.cols {
                acc += self[(i, j)] * v[j];
            }
            out[i] = acc;
        }
        out
    }

    pub fn trace(&self) -> Complex64 {
        assert!(self.is_square());
        (0..self.rows).map(|i| self[(i, i)]).sum()
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.entries.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }

    /// Largest absolute deviation from the conjugate transpose.
    pub fn hermiticity_deviation(&self) -> f64 {
        assert!(self.is_square());
        let mut dev: f64 = 0.0;
        for i in 0..self.rows {
            for j in i..self.cols {
                dev = dev.max((self[(i, j)] - self[(j, i)].conj()).norm());
            }
        }
        dev
    }

    /// Hilbert-Schmidt inner product Tr(self† · other).
    pub fn hs_inner(&self, other: &Self) -> Complex64 {
        assert_eq!(self.rows, other.rows);
        assert_eq!(self.cols, other.cols);
        self.entries
            .iter()
            .zip(&other.entries)
            .map(|(a, b)| a.conj() * b)
            .sum()
    }
}

impl std::ops::Index<(usize, usize)> for ComplexMatrix {
    type Output = Complex64;
    fn index(&self, (i, j): (usize, usize)) -> &Complex64 {
        &self.entries[i * self.cols + j]
    }
}

impl std::ops::IndexMut<(usize, usize)> for ComplexMatrix {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut Complex64 {
        &mut self.entries[i * self.cols + j]
    }
}

/// Kronecker product a ⊗ b.
pub fn kron(a: &ComplexMatrix, b: &ComplexMatrix) -> ComplexMatrix {
    let mut out = ComplexMatrix::zeros(a.rows() * b.rows(), a.cols() * b.cols());
    for i in 0..a.rows() {
        for j in 0..a.cols() {
            let aij = a[(i, j)];
            if aij.re == 0.0 && aij.im == 0.0 {
                continue;
            }
            for k in 0..b.rows() {
                for l in 0..b.cols() {
                    out[(i * b.rows() + k, j * b.cols() + l)] = aij * b[(k, l)];
                }
            }
        }
    }
    out
}

/// Hermitian operator: a square matrix symmetrized as (h + h†)/2 at
/// construction so round-off from products never reaches the eigensolver.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HermitianOperator {
    dim: usize,
    matrix: ComplexMatrix,
}

impl HermitianOperator {
    /// Symmetrize and wrap. Rejects matrices further than `HERMITICITY_TOL`
    /// from Hermitian.
    pub fn new(matrix: ComplexMatrix) -> Result<Self> {
        if !matrix.is_square() {
            return Err(Error::dim("hermitian rows/cols", matrix.rows(), matrix.cols()));
        }
        let dev = matrix.hermiticity_deviation();
        if dev > HERMITICITY_TOL {
            return Err(Error::NotHermitian {
                deviation: dev,
                tol: HERMITICITY_TOL,
            });
        }
        Ok(Self::symmetrize(matrix))
    }

    /// Symmetrize without a deviation check; used where the caller knows the
    /// input is Hermitian up to round-off from long products.
    pub fn symmetrize(matrix: ComplexMatrix) -> Self {
        assert!(matrix.is_square());
        let n = matrix.rows();
        let mut m = matrix;
        for i in 0..n {
            m[(i, i)] = Complex64::new(m[(i, i)].re, 0.0);
            for j in (i + 1)..n {
                let avg = (m[(i, j)] + m[(j, i)].conj()) * 0.5;
                m[(i, j)] = avg;
                m[(j, i)] = avg.conj();
            }
        }
        HermitianOperator { dim: n, matrix: m }
    }

    pub fn zeros(dim: usize) -> Self {
        HermitianOperator {
            dim,
            matrix: ComplexMatrix::zeros(dim, dim),
        }
    }

    pub fn identity(dim: usize) -> Self {
        HermitianOperator {
            dim,
            matrix: ComplexMatrix::identity(dim),
        }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        &self.matrix
    }

    pub fn into_matrix(self) -> ComplexMatrix {
        self.matrix
    }

    pub fn add(&self, other: &Self) -> Self {
        HermitianOperator::symmetrize(self.matrix.add(&other.matrix))
    }

    pub fn sub(&self, other: &Self) -> Self {
        HermitianOperator::symmetrize(self.matrix.sub(&other.matrix))
    }

    pub fn scale_re(&self, s: f64) -> Self {
        HermitianOperator {
            dim: self.dim,
            matrix: self.matrix.scale(Complex64::new(s, 0.0)),
        }
    }

    pub fn trace_re(&self) -> f64 {
        self.matrix.trace().re
    }

    /// Largest eigenvalue magnitude (operator norm for Hermitian matrices).
    pub fn operator_norm(&self) -> f64 {
        let (w, _) = eigh(self).expect("eigh on Hermitian input");
        w.iter().fold(0.0_f64, |acc, &x| acc.max(x.abs()))
    }

    pub fn min_eigenvalue(&self) -> f64 {
        let (w, _) = eigh(self).expect("eigh on Hermitian input");
        w[0]
    }

    /// Projector onto the span of eigenvectors with eigenvalue > `cut`.
    pub fn positive_part_projector(&self, cut: f64) -> HermitianOperator {
        let (w, v) = eigh(self).expect("eigh on Hermitian input");
        let mut p = ComplexMatrix::zeros(self.dim, self.dim);
        for (k, &wk) in w.iter().enumerate() {
            if wk > cut {
                for i in 0..self.dim {
                    for j in 0..self.dim {
                        p[(i, j)] += v[(i, k)] * v[(j, k)].conj();
                    }
                }
            }
        }
        HermitianOperator::symmetrize(p)
    }
}

/// Re Tr(a·b) for Hermitian a, b of equal dimension. The imaginary residue is
/// checked to be round-off level before being discarded.
pub fn trace_product(a: &HermitianOperator, b: &HermitianOperator) -> Result<f64> {
    if a.dim() != b.dim() {
        return Err(Error::dim("trace_product", a.dim(), b.dim()));
    }
    let mut acc = Complex64::new(0.0, 0.0);
    for i in 0..a.dim() {
        for j in 0..a.dim() {
            acc += a.matrix()[(i, j)] * b.matrix()[(j, i)];
        }
    }
    let scale = 1.0 + acc.re.abs();
    debug_assert!(
        acc.im.abs() <= 1e-9 * scale,
        "imaginary residue {} in trace of Hermitian product",
        acc.im
    );
    Ok(acc.re)
}

/// Pure state: complex amplitude vector with unit 2-norm.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PureState {
    dim: usize,
    amplitudes: Vec<Complex64>,
}

impl PureState {
    pub fn new(amplitudes: Vec<Complex64>) -> Result<Self> {
        let norm = amplitudes.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        if (norm - 1.0).abs() > UNIT_NORM_TOL {
            return Err(Error::param(format!("state norm {norm} differs from 1")));
        }
        Ok(PureState {
            dim: amplitudes.len(),
            amplitudes,
        })
    }

    /// Normalize the given amplitudes; errors on the zero vector.
    pub fn normalized(mut amplitudes: Vec<Complex64>) -> Result<Self> {
        let norm = amplitudes.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        if norm < 1e-14 {
            return Err(Error::param("cannot normalize zero vector"));
        }
        for a in &mut amplitudes {
            *a /= norm;
        }
        Ok(PureState {
            dim: amplitudes.len(),
            amplitudes,
        })
    }

    pub fn basis_state(dim: usize, index: usize) -> Self {
        let mut amplitudes = vec![Complex64::new(0.0, 0.0); dim];
        amplitudes[index] = Complex64::new(1.0, 0.0);
        PureState { dim, amplitudes }
    }

    /// Maximally entangled state (1/√d) Σ |ii⟩ on dimension d².
    pub fn max_entangled(d: usize) -> Self {
        let mut amplitudes = vec![Complex64::new(0.0, 0.0); d * d];
        let c = Complex64::new(1.0 / (d as f64).sqrt(), 0.0);
        for i in 0..d {
            amplitudes[i * d + i] = c;
        }
        PureState {
            dim: d * d,
            amplitudes,
        }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amplitudes
    }

    pub fn inner(&self, other: &PureState) -> Complex64 {
        assert_eq!(self.dim, other.dim);
        self.amplitudes
            .iter()
            .zip(&other.amplitudes)
            .map(|(a, b)| a.conj() * b)
            .sum()
    }

    pub fn tensor(&self, other: &PureState) -> PureState {
        let mut amplitudes = Vec::with_capacity(self.dim * other.dim);
        for a in &self.amplitudes {
            for b in &other.amplitudes {
                amplitudes.push(a * b);
            }
        }
        PureState {
            dim: self.dim * other.dim,
            amplitudes,
        }
    }

    pub fn conj(&self) -> PureState {
        PureState {
            dim: self.dim,
            amplitudes: self.amplitudes.iter().map(|z| z.conj()).collect(),
        }
    }

    /// Rank-1 projector |ψ⟩⟨ψ|.
    pub fn projector(&self) -> HermitianOperator {
        let mut m = ComplexMatrix::zeros(self.dim, self.dim);
        for i in 0..self.dim {
            for j in 0..self.dim {
                m[(i, j)] = self.amplitudes[i] * self.amplitudes[j].conj();
            }
        }
        HermitianOperator::symmetrize(m)
    }

    pub fn to_density(&self) -> DensityMatrix {
        DensityMatrix::new(self.projector()).expect("rank-1 projector is a state")
    }

    /// ⟨ψ|H|ψ⟩ for Hermitian H.
    pub fn expectation(&self, h: &HermitianOperator) -> f64 {
        let hv = h.matrix().matvec(&self.amplitudes);
        self.amplitudes
            .iter()
            .zip(&hv)
            .map(|(a, b)| (a.conj() * b).re)
            .sum()
    }
}

/// Density matrix: PSD within `-PSD_TOL`, unit trace within `TRACE_TOL`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DensityMatrix {
    dim: usize,
    op: HermitianOperator,
}

impl DensityMatrix {
    pub fn new(op: HermitianOperator) -> Result<Self> {
        let tr = op.trace_re();
        if (tr - 1.0).abs() > TRACE_TOL {
            return Err(Error::BadTrace { trace: tr });
        }
        let min_eig = op.min_eigenvalue();
        if min_eig < -PSD_TOL {
            return Err(Error::NotPositive { min_eig });
        }
        Ok(DensityMatrix { dim: op.dim(), op })
    }

    pub fn maximally_mixed(dim: usize) -> Self {
        DensityMatrix {
            dim,
            op: HermitianOperator::identity(dim).scale_re(1.0 / dim as f64),
        }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn op(&self) -> &HermitianOperator {
        &self.op
    }

    pub fn expectation(&self, h: &HermitianOperator) -> Result<f64> {
        trace_product(&self.op, h)
    }
}

/// Positive operator-valued measure: effects PSD within `-PSD_TOL`, summing
/// to the identity within `PSD_TOL`. Projective measurements additionally
/// have idempotent, mutually orthogonal effects.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Measurement {
    dim: usize,
    effects: Vec<HermitianOperator>,
}

impl Measurement {
    pub fn new(effects: Vec<HermitianOperator>) -> Result<Self> {
        if effects.is_empty() {
            return Err(Error::param("measurement needs at least one effect"));
        }
        let dim = effects[0].dim();
        let mut sum = HermitianOperator::zeros(dim);
        for e in &effects {
            if e.dim() != dim {
                return Err(Error::dim("effect dimension", e.dim(), dim));
            }
            let min_eig = e.min_eigenvalue();
            if min_eig < -PSD_TOL {
                return Err(Error::NotPositive { min_eig });
            }
            sum = sum.add(e);
        }
        let dev = sum
            .sub(&HermitianOperator::identity(dim))
            .matrix()
            .frobenius_norm();
        if dev > PSD_TOL * (dim as f64) {
            return Err(Error::param(format!(
                "effects sum deviates from identity by {dev:e}"
            )));
        }
        Ok(Measurement { dim, effects })
    }

    /// Projective measurement from an orthonormal family of states, one
    /// rank-1 effect per state.
    pub fn from_basis(states: &[PureState]) -> Result<Self> {
        Measurement::new(states.iter().map(|s| s.projector()).collect())
    }

    /// Two-outcome measurement {(1+A)/2, (1−A)/2} of an observable with
    /// spectrum in [−1, 1].
    pub fn from_observable(a: &HermitianOperator) -> Result<Self> {
        let id = HermitianOperator::identity(a.dim());
        Measurement::new(vec![
            id.add(a).scale_re(0.5),
            id.sub(a).scale_re(0.5),
        ])
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn outcomes(&self) -> usize {
        self.effects.len()
    }

    pub fn effects(&self) -> &[HermitianOperator] {
        &self.effects
    }

    pub fn effect(&self, a: usize) -> &HermitianOperator {
        &self.effects[a]
    }

    /// Largest deviation of any effect from idempotence.
    pub fn projectivity_deviation(&self) -> f64 {
        self.effects
            .iter()
            .map(|e| {
                e.matrix()
                    .matmul(e.matrix())
                    .sub(e.matrix())
                    .frobenius_norm()
            })
            .fold(0.0, f64::max)
    }

    pub fn is_projective(&self, tol: f64) -> bool {
        self.projectivity_deviation() <= tol
    }

    /// Observable E₁ − E₂ of a two-outcome measurement.
    pub fn observable(&self) -> Result<HermitianOperator> {
        if self.effects.len() != 2 {
            return Err(Error::dim("observable outcomes", self.effects.len(), 2));
        }
        Ok(self.effects[0].sub(&self.effects[1]))
    }
}

/// Partial trace over the second factor of an operator on d_a ⊗ d_b.
pub fn partial_trace_b(m: &ComplexMatrix, da: usize, db: usize) -> ComplexMatrix {
    assert_eq!(m.rows(), da * db);
    let mut out = ComplexMatrix::zeros(da, da);
    for i in 0..da {
        for j in 0..da {
            let mut acc = Complex64::new(0.0, 0.0);
            for k in 0..db {
                acc += m[(i * db + k, j * db + k)];
            }
            out[(i, j)] = acc;
        }
    }
    out
}

/// Partial trace over the first factor of an operator on d_a ⊗ d_b.
pub fn partial_trace_a(m: &ComplexMatrix, da: usize, db: usize) -> ComplexMatrix {
    assert_eq!(m.rows(), da * db);
    let mut out = ComplexMatrix::zeros(db, db);
    for i in 0..db {
        for j in 0..db {
            let mut acc = Complex64::new(0.0, 0.0);
            for k in 0..da {
                acc += m[(k * db + i, k * db + j)];
            }
            out[(i, j)] = acc;
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    pub(crate) fn sigma_x() -> HermitianOperator {
        HermitianOperator::new(ComplexMatrix::from_real(2, 2, &[0.0, 1.0, 1.0, 0.0]).unwrap())
            .unwrap()
    }

    pub(crate) fn sigma_y() -> HermitianOperator {
        HermitianOperator::new(
            ComplexMatrix::from_entries(
                2,
                2,
                vec![
                    Complex64::new(0.0, 0.0),
                    Complex64::new(0.0, -1.0),
                    Complex64::new(0.0, 1.0),
                    Complex64::new(0.0, 0.0),
                ],
            )
            .unwrap(),
        )
        .unwrap()
    }

    pub(crate) fn sigma_z() -> HermitianOperator {
        HermitianOperator::new(ComplexMatrix::from_real(2, 2, &[1.0, 0.0, 0.0, -1.0]).unwrap())
            .unwrap()
    }

    #[test]
    fn kron_identity() {
        let i2 = ComplexMatrix::identity(2);
        let i4 = kron(&i2, &i2);
        assert_eq!(i4, ComplexMatrix::identity(4));
    }

    #[test]
    fn kron_diagonal() {
        let dz = ComplexMatrix::from_real(2, 2, &[1.0, 0.0, 0.0, -1.0]).unwrap();
        let zz = kron(&dz, &dz);
        let expect = ComplexMatrix::from_real(
            4,
            4,
            &[
                1.0, 0.0, 0.0, 0.0, //
                0.0, -1.0, 0.0, 0.0, //
                0.0, 0.0, -1.0, 0.0, //
                0.0, 0.0, 0.0, 1.0,
            ],
        )
        .unwrap();
        assert_eq!(zz, expect);
    }

    #[test]
    fn kron_xx_fixes_phi_plus() {
        // σ_X ⊗ σ_X has |φ⁺₂⟩ as a +1 eigenvector: direct 4×4 product.
        let xx = kron(sigma_x().matrix(), sigma_x().matrix());
        let phi = PureState::max_entangled(2);
        let out = xx.matvec(phi.amplitudes());
        for (a, b) in out.iter().zip(phi.amplitudes()) {
            assert!((a - b).norm() < 1e-14);
        }
    }

    #[test]
    fn kron_mixed_product_property() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..20 {
            let a = random::ginibre(2, 2, &mut rng);
            let b = random::ginibre(2, 2, &mut rng);
            let c = random::ginibre(2, 2, &mut rng);
            let d = random::ginibre(2, 2, &mut rng);
            let lhs = kron(&a, &b).matmul(&kron(&c, &d));
            let rhs = kron(&a.matmul(&c), &b.matmul(&d));
            assert!(lhs.sub(&rhs).frobenius_norm() < 1e-10);
        }
    }

    #[test]
    fn trace_product_paulis() {
        assert!((trace_product(&sigma_x(), &sigma_x()).unwrap() - 2.0).abs() < 1e-14);
        assert!(trace_product(&sigma_x(), &sigma_z()).unwrap().abs() < 1e-14);
    }

    #[test]
    fn trace_product_dim_mismatch() {
        let a = sigma_x();
        let b = HermitianOperator::identity(3);
        assert!(trace_product(&a, &b).is_err());
    }

    #[test]
    fn hermitian_construction_rejects_nonhermitian() {
        let m = ComplexMatrix::from_real(2, 2, &[0.0, 1.0, 0.0, 0.0]).unwrap();
        assert!(HermitianOperator::new(m).is_err());
    }

    #[test]
    fn density_matrix_invariants() {
        assert!(DensityMatrix::new(HermitianOperator::identity(2)).is_err()); // trace 2
        let ok = DensityMatrix::new(HermitianOperator::identity(2).scale_re(0.5)).unwrap();
        assert_eq!(ok.dim(), 2);
        // negative eigenvalue rejected
        let bad = HermitianOperator::new(
            ComplexMatrix::from_real(2, 2, &[1.5, 0.0, 0.0, -0.5]).unwrap(),
        )
        .unwrap();
        assert!(DensityMatrix::new(bad).is_err());
    }

    #[test]
    fn partial_traces() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let a = random::ginibre(2, 2, &mut rng);
        let b = random::ginibre(3, 3, &mut rng);
        let ab = kron(&a, &b);
        let ta = partial_trace_b(&ab, 2, 3);
        let tb = partial_trace_a(&ab, 2, 3);
        assert!(ta.sub(&a.scale(b.trace())).frobenius_norm() < 1e-12);
        assert!(tb.sub(&b.scale(a.trace())).frobenius_norm() < 1e-12);
    }

    #[test]
    fn measurement_from_observable() {
        let m = Measurement::from_observable(&sigma_z()).unwrap();
        assert!(m.is_projective(1e-12));
        let obs = m.observable().unwrap();
        assert!(obs.sub(&sigma_z()).matrix().frobenius_norm() < 1e-14);
    }
}
