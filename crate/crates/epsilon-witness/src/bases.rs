//! Operator bases for qudits: generalized Gell-Mann and Weyl-Heisenberg
//! families normalized to Tr(λ_iλ_j†) = d·δ_ij, the computational/Fourier
//! basis pair, and Bloch decomposition of states.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{ComplexMatrix, DensityMatrix, HermitianOperator, PureState};

/// A traceless operator basis of d²−1 elements with Tr(λ_iλ_j†) = d·δ_ij.
/// Non-Hermitian bases (Weyl-Heisenberg) carry `hermitian: false` and are
/// only accepted by operations that explicitly handle complex Bloch
/// components.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct BlochBasis {
    dim: usize,
    elements: Vec<ComplexMatrix>,
    hermitian: bool,
}

impl BlochBasis {
    pub fn new(dim: usize, elements: Vec<ComplexMatrix>, hermitian: bool) -> Result<Self> {
        if elements.len() != dim * dim - 1 {
            return Err(Error::dim("basis size", elements.len(), dim * dim - 1));
        }
        for e in &elements {
            if e.rows() != dim || !e.is_square() {
                return Err(Error::dim("basis element dim", e.rows(), dim));
            }
            if e.trace().norm() > 1e-12 {
                return Err(Error::param("basis element not traceless"));
            }
        }
        Ok(BlochBasis {
            dim,
            elements,
            hermitian,
        })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }

    pub fn is_hermitian(&self) -> bool {
        self.hermitian
    }

    pub fn element(&self, i: usize) -> &ComplexMatrix {
        &self.elements[i]
    }

    pub fn elements(&self) -> &[ComplexMatrix] {
        &self.elements
    }

    /// Hermitian view of element `i`; only valid when the basis is Hermitian.
    pub fn hermitian_element(&self, i: usize) -> Result<HermitianOperator> {
        if !self.hermitian {
            return Err(Error::param(
                "non-Hermitian basis element used where an observable is required",
            ));
        }
        HermitianOperator::new(self.elements[i].clone())
    }

    /// Rotate element phases: λ_i ↦ p_i·λ_i with |p_i| = 1. Preserves
    /// tracelessness and the orthogonality normalization.
    pub fn phase_aligned(&self, phases: &[Complex64]) -> Result<BlochBasis> {
        if phases.len() != self.elements.len() {
            return Err(Error::dim("phase count", phases.len(), self.elements.len()));
        }
        let elements = self
            .elements
            .iter()
            .zip(phases)
            .map(|(e, p)| e.scale(*p))
            .collect();
        BlochBasis::new(self.dim, elements, false)
    }
}

/// Bloch components μ_i = Tr(ρ λ_i†); complex in general, real when the
/// basis is Hermitian.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct BlochVector {
    dim: usize,
    components: Vec<Complex64>,
}

impl BlochVector {
    pub fn new(dim: usize, components: Vec<Complex64>) -> Result<Self> {
        if components.len() != dim * dim - 1 {
            return Err(Error::dim("bloch length", components.len(), dim * dim - 1));
        }
        Ok(BlochVector { dim, components })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn components(&self) -> &[Complex64] {
        &self.components
    }

    pub fn norm_sqr(&self) -> f64 {
        self.components.iter().map(|z| z.norm_sqr()).sum()
    }
}

/// Generalized Gell-Mann basis: symmetric family, then antisymmetric, then
/// diagonal, each in lexicographic (j, k) order, rescaled so Tr(λ_i²) = d.
pub fn gell_mann_basis(d: usize) -> Result<BlochBasis> {
    if d < 2 {
        return Err(Error::param("gell_mann_basis requires d >= 2"));
    }
    let scale = (d as f64 / 2.0).sqrt();
    let mut elements = Vec::with_capacity(d * d - 1);
    for j in 0..d {
        for k in (j + 1)..d {
            let mut m = ComplexMatrix::zeros(d, d);
            m[(j, k)] = Complex64::new(scale, 0.0);
            m[(k, j)] = Complex64::new(scale, 0.0);
            elements.push(m);
        }
    }
    for j in 0..d {
        for k in (j + 1)..d {
            let mut m = ComplexMatrix::zeros(d, d);
            m[(j, k)] = Complex64::new(0.0, -scale);
            m[(k, j)] = Complex64::new(0.0, scale);
            elements.push(m);
        }
    }
    for l in 1..d {
        let c = scale * (2.0 / (l as f64 * (l as f64 + 1.0))).sqrt();
        let mut m = ComplexMatrix::zeros(d, d);
        for j in 0..l {
            m[(j, j)] = Complex64::new(c, 0.0);
        }
        m[(l, l)] = Complex64::new(-c * l as f64, 0.0);
        elements.push(m);
    }
    BlochBasis::new(d, elements, true)
}

/// Shift operator X = Σ |k+1⟩⟨k| (indices mod d).
pub fn shift_operator(d: usize) -> ComplexMatrix {
    let mut x = ComplexMatrix::zeros(d, d);
    for k in 0..d {
        x[((k + 1) % d, k)] = Complex64::new(1.0, 0.0);
    }
    x
}

/// Clock operator Z = Σ e^{2πik/d} |k⟩⟨k|.
pub fn clock_operator(d: usize) -> ComplexMatrix {
    let mut z = ComplexMatrix::zeros(d, d);
    for k in 0..d {
        let phase = 2.0 * std::f64::consts::PI * k as f64 / d as f64;
        z[(k, k)] = Complex64::from_polar(1.0, phase);
    }
    z
}

/// Weyl-Heisenberg basis {XᵘZᵛ : u, v ∈ {0..d−1}, u+v > 0} in lexicographic
/// (u, v) order.
pub fn weyl_heisenberg_basis(d: usize) -> Result<BlochBasis> {
    if d < 2 {
        return Err(Error::param("weyl_heisenberg_basis requires d >= 2"));
    }
    let x = shift_operator(d);
    let z = clock_operator(d);
    let mut xu = ComplexMatrix::identity(d);
    let mut elements = Vec::with_capacity(d * d - 1);
    for u in 0..d {
        let mut m = xu.clone();
        for v in 0..d {
            if u + v > 0 {
                elements.push(m.clone());
            }
            if v + 1 < d {
                m = m.matmul(&z);
            }
        }
        if u + 1 < d {
            xu = xu.matmul(&x);
        }
    }
    BlochBasis::new(d, elements, false)
}

/// Fourier basis |f_i⟩ = Ω|e_i⟩ with Ω_jk = (1/√d)·e^{2πi·jk/d}.
pub fn fourier_basis(d: usize) -> Result<Vec<PureState>> {
    if d < 2 {
        return Err(Error::param("fourier_basis requires d >= 2"));
    }
    let norm = 1.0 / (d as f64).sqrt();
    let mut states = Vec::with_capacity(d);
    for i in 0..d {
        let amps: Vec<Complex64> = (0..d)
            .map(|j| {
                let phase = 2.0 * std::f64::consts::PI * (j * i) as f64 / d as f64;
                Complex64::from_polar(norm, phase)
            })
            .collect();
        states.push(PureState::new(amps)?);
    }
    Ok(states)
}

/// μ_i = Tr(ρ λ_i†).
pub fn bloch_decompose(rho: &DensityMatrix, basis: &BlochBasis) -> Result<BlochVector> {
    if rho.dim() != basis.dim() {
        return Err(Error::dim("bloch_decompose", rho.dim(), basis.dim()));
    }
    let components = basis
        .elements()
        .iter()
        .map(|lam| rho.op().matrix().hs_inner(lam).conj())
        .collect();
    BlochVector::new(basis.dim(), components)
}

/// Raw compose (1/d)(I + Σ μ_i λ_i); not Hermitian for arbitrary complex
/// components over a non-Hermitian basis.
pub fn bloch_compose_raw(mu: &BlochVector, basis: &BlochBasis) -> Result<ComplexMatrix> {
    if mu.dim() != basis.dim() {
        return Err(Error::dim("bloch_compose", mu.dim(), basis.dim()));
    }
    let d = basis.dim();
    let mut m = ComplexMatrix::identity(d);
    for (c, lam) in mu.components().iter().zip(basis.elements()) {
        m = m.add(&lam.scale(*c));
    }
    Ok(m.scale(Complex64::new(1.0 / d as f64, 0.0)))
}

/// Compose and wrap as a Hermitian operator. The output need not be positive
/// semidefinite; the caller checks PSD where it matters.
pub fn bloch_compose(mu: &BlochVector, basis: &BlochBasis) -> Result<HermitianOperator> {
    let raw = bloch_compose_raw(mu, basis)?;
    HermitianOperator::new(raw)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{kron, random_pure_state, trace_product};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn gell_mann_d2_is_paulis() {
        let b = gell_mann_basis(2).unwrap();
        assert_eq!(b.len(), 3);
        assert!(b.is_hermitian());
        let sx = ComplexMatrix::from_real(2, 2, &[0.0, 1.0, 1.0, 0.0]).unwrap();
        let sy = ComplexMatrix::from_entries(
            2,
            2,
            vec![
                Complex64::new(0.0, 0.0),
                Complex64::new(0.0, -1.0),
                Complex64::new(0.0, 1.0),
                Complex64::new(0.0, 0.0),
            ],
        )
        .unwrap();
        let sz = ComplexMatrix::from_real(2, 2, &[1.0, 0.0, 0.0, -1.0]).unwrap();
        assert!(b.element(0).sub(&sx).frobenius_norm() < 1e-15);
        assert!(b.element(1).sub(&sy).frobenius_norm() < 1e-15);
        assert!(b.element(2).sub(&sz).frobenius_norm() < 1e-15);
    }

    #[test]
    fn gell_mann_d3_normalization() {
        // rescale factor √(3/2) on the Tr = 2 standard matrices gives Tr(λ²) = 3
        let b = gell_mann_basis(3).unwrap();
        assert_eq!(b.len(), 8);
        for i in 0..8 {
            let h = b.hermitian_element(i).unwrap();
            let t = trace_product(&h, &h).unwrap();
            assert!((t - 3.0).abs() < 1e-12, "Tr λ² = {t}");
        }
    }

    #[test]
    fn gell_mann_d4_orthogonality() {
        let b = gell_mann_basis(4).unwrap();
        assert_eq!(b.len(), 15);
        for i in 0..15 {
            for j in 0..15 {
                let hi = b.hermitian_element(i).unwrap();
                let hj = b.hermitian_element(j).unwrap();
                let t = trace_product(&hi, &hj).unwrap();
                let expect = if i == j { 4.0 } else { 0.0 };
                assert!((t - expect).abs() < 1e-10, "pair ({i},{j}) -> {t}");
            }
        }
    }

    #[test]
    fn weyl_heisenberg_d2() {
        let b = weyl_heisenberg_basis(2).unwrap();
        assert_eq!(b.len(), 3);
        // lexicographic (u,v): Z, X, XZ
        let z = clock_operator(2);
        let x = shift_operator(2);
        let xz = x.matmul(&z);
        assert!(b.element(0).sub(&z).frobenius_norm() < 1e-15);
        assert!(b.element(1).sub(&x).frobenius_norm() < 1e-15);
        assert!(b.element(2).sub(&xz).frobenius_norm() < 1e-15);
        // XZ = −i σ_Y (direct 2×2 product)
        let m_isy = ComplexMatrix::from_real(2, 2, &[0.0, -1.0, 1.0, 0.0]).unwrap();
        assert!(xz.sub(&m_isy).frobenius_norm() < 1e-15);
    }

    #[test]
    fn weyl_heisenberg_orthogonality_d3() {
        let b = weyl_heisenberg_basis(3).unwrap();
        for i in 0..b.len() {
            for j in 0..b.len() {
                let t = b.element(j).hs_inner(b.element(i)); // Tr(λ_j† λ_i)
                let expect = if i == j { 3.0 } else { 0.0 };
                assert!((t - Complex64::new(expect, 0.0)).norm() < 1e-12);
            }
        }
    }

    #[test]
    fn weyl_heisenberg_traceless_d5() {
        let b = weyl_heisenberg_basis(5).unwrap();
        assert_eq!(b.len(), 24);
        for e in b.elements() {
            assert!(e.trace().norm() < 1e-12);
        }
    }

    #[test]
    fn fourier_unbiased_and_orthonormal() {
        for d in [2usize, 5, 7] {
            let f = fourier_basis(d).unwrap();
            for i in 0..d {
                for j in 0..d {
                    let g = f[i].inner(&f[j]).norm();
                    let expect = if i == j { 1.0 } else { 0.0 };
                    assert!((g - expect).abs() < 1e-12);
                    // unbiased against the computational basis
                    let e_j = PureState::basis_state(d, j);
                    let ov = e_j.inner(&f[i]).norm_sqr();
                    assert!((ov - 1.0 / d as f64).abs() < 1e-12);
                }
            }
        }
    }

    #[test]
    fn bloch_maximally_mixed_is_zero() {
        let b = gell_mann_basis(3).unwrap();
        let rho = DensityMatrix::maximally_mixed(3);
        let mu = bloch_decompose(&rho, &b).unwrap();
        assert!(mu.norm_sqr() < 1e-24);
    }

    #[test]
    fn bloch_ground_state_d2() {
        // ρ = |0⟩⟨0| has μ = (0, 0, 1) in (σ_X, σ_Y, σ_Z) order
        let b = gell_mann_basis(2).unwrap();
        let rho = PureState::basis_state(2, 0).to_density();
        let mu = bloch_decompose(&rho, &b).unwrap();
        assert!(mu.components()[0].norm() < 1e-14);
        assert!(mu.components()[1].norm() < 1e-14);
        assert!((mu.components()[2] - Complex64::new(1.0, 0.0)).norm() < 1e-14);
    }

    #[test]
    fn bloch_round_trip() {
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let b = gell_mann_basis(3).unwrap();
        let w = weyl_heisenberg_basis(3).unwrap();
        for _ in 0..50 {
            let rho = random_pure_state(3, &mut rng).to_density();
            for basis in [&b, &w] {
                let mu = bloch_decompose(&rho, basis).unwrap();
                let back = bloch_compose_raw(&mu, basis).unwrap();
                assert!(back.sub(rho.op().matrix()).frobenius_norm() < 1e-10);
            }
        }
    }

    #[test]
    fn purity_bound() {
        let mut rng = ChaCha8Rng::seed_from_u64(10);
        let d = 3;
        let b = gell_mann_basis(d).unwrap();
        for _ in 0..50 {
            let psi = random_pure_state(d, &mut rng);
            let mu = bloch_decompose(&psi.to_density(), &b).unwrap();
            let n2 = mu.norm_sqr();
            assert!(n2 <= d as f64 - 1.0 + 1e-9);
            assert!((n2 - (d as f64 - 1.0)).abs() < 1e-9, "pure states saturate");
        }
        // mixed states stay strictly inside
        let mixed = DensityMatrix::maximally_mixed(d);
        assert!(bloch_decompose(&mixed, &b).unwrap().norm_sqr() < 1e-20);
    }

    #[test]
    fn weyl_heisenberg_completeness_identity() {
        // Σ_{u+v>0} (XᵘZᵛ)⊗(XᵘZᵛ)* = d²|φ⁺⟩⟨φ⁺| − I
        for d in [2usize, 3, 4] {
            let b = weyl_heisenberg_basis(d).unwrap();
            let mut sum = ComplexMatrix::zeros(d * d, d * d);
            for e in b.elements() {
                sum = sum.add(&kron(e, &e.conj()));
            }
            let phi = PureState::max_entangled(d);
            let target = phi
                .projector()
                .matrix()
                .scale(Complex64::new((d * d) as f64, 0.0))
                .sub(&ComplexMatrix::identity(d * d));
            assert!(sum.sub(&target).frobenius_norm() < 1e-10, "d = {d}");
        }
    }

    #[test]
    fn non_hermitian_basis_guard() {
        let w = weyl_heisenberg_basis(2).unwrap();
        assert!(w.hermitian_element(0).is_err());
    }
}
