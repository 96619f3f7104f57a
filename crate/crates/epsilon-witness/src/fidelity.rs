//! The inaccuracy model: average measurement fidelity between a lab POVM and
//! its projective target, the observable overlap for two-outcome settings,
//! and the minimum certified inaccuracy ε = 1 − F.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{trace_product, HermitianOperator, Measurement};

/// Per-setting inaccuracy budgets ε ∈ [0, 1] for both sides.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InaccuracyBudget {
    pub eps_a: Vec<f64>,
    pub eps_b: Vec<f64>,
}

impl InaccuracyBudget {
    pub fn new(eps_a: Vec<f64>, eps_b: Vec<f64>) -> Result<Self> {
        for &e in eps_a.iter().chain(eps_b.iter()) {
            if !(0.0..=1.0).contains(&e) {
                return Err(Error::param(format!("inaccuracy {e} outside [0, 1]")));
            }
        }
        Ok(InaccuracyBudget { eps_a, eps_b })
    }

    /// The same budget ε on every setting of both sides.
    pub fn uniform(x_settings: usize, y_settings: usize, eps: f64) -> Result<Self> {
        Self::new(vec![eps; x_settings], vec![eps; y_settings])
    }
}

const PROJECTIVE_TOL: f64 = 1e-10;

/// Average fidelity (1/d) Σ_a Tr(lab_a · target_a). The target must be
/// projective; the lab measurement may be any POVM.
pub fn measurement_fidelity(lab: &Measurement, target: &Measurement) -> Result<f64> {
    if lab.dim() != target.dim() {
        return Err(Error::dim("fidelity dimension", lab.dim(), target.dim()));
    }
    if lab.outcomes() != target.outcomes() {
        return Err(Error::dim(
            "fidelity outcomes",
            lab.outcomes(),
            target.outcomes(),
        ));
    }
    let dev = target.projectivity_deviation();
    if dev > PROJECTIVE_TOL {
        return Err(Error::NotProjective {
            deviation: dev,
            tol: PROJECTIVE_TOL,
        });
    }
    let d = lab.dim() as f64;
    let mut f = 0.0;
    for (la, ta) in lab.effects().iter().zip(target.effects()) {
        f += trace_product(la, ta)?;
    }
    f /= d;
    debug_assert!((-1e-10..=1.0 + 1e-10).contains(&f), "fidelity {f} outside [0,1]");
    Ok(f)
}

/// Observable overlap Tr(A·Ã) for two-outcome settings written as
/// observables with operator norm at most one. For measurements built from
/// effects E₁ − E₂ this equals d(2F − 1).
pub fn observable_overlap(a: &HermitianOperator, target: &HermitianOperator) -> Result<f64> {
    const NORM_SLACK: f64 = 1e-10;
    let na = a.operator_norm();
    if na > 1.0 + NORM_SLACK {
        return Err(Error::NormViolation { norm: na });
    }
    let nt = target.operator_norm();
    if nt > 1.0 + NORM_SLACK {
        return Err(Error::NormViolation { norm: nt });
    }
    trace_product(a, target)
}

/// Minimum inaccuracy consistent with the pair: 1 − F, clamped to [0, 1]
/// since ε is a physical budget and round-off can leave tiny negatives.
pub fn min_epsilon(lab: &Measurement, target: &Measurement) -> Result<f64> {
    let f = measurement_fidelity(lab, target)?;
    Ok((1.0 - f).clamp(0.0, 1.0))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bases::fourier_basis;
    use crate::linalg::{
        eigh, random_povm, random_projective_measurement, ComplexMatrix, Measurement, PureState,
    };
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn bloch_observable(theta: f64) -> HermitianOperator {
        // cosθ σ_X + sinθ σ_Z
        HermitianOperator::new(
            ComplexMatrix::from_real(
                2,
                2,
                &[theta.sin(), theta.cos(), theta.cos(), -theta.sin()],
            )
            .unwrap(),
        )
        .unwrap()
    }

    fn computational(d: usize) -> Measurement {
        Measurement::from_basis(
            &(0..d).map(|i| PureState::basis_state(d, i)).collect::<Vec<_>>(),
        )
        .unwrap()
    }

    #[test]
    fn identical_measurements_have_unit_fidelity() {
        let mut rng = ChaCha8Rng::seed_from_u64(21);
        for d in [2usize, 3, 4] {
            let m = random_projective_measurement(d, d, &mut rng);
            let f = measurement_fidelity(&m, &m).unwrap();
            assert!((f - 1.0).abs() < 1e-12);
            assert!(min_epsilon(&m, &m).unwrap() < 1e-12);
        }
    }

    #[test]
    fn computational_vs_fourier_is_one_over_d() {
        for d in [2usize, 3, 5] {
            let comp = computational(d);
            let four = Measurement::from_basis(&fourier_basis(d).unwrap()).unwrap();
            let f = measurement_fidelity(&comp, &four).unwrap();
            assert!((f - 1.0 / d as f64).abs() < 1e-12, "d = {d}, F = {f}");
            let eps = min_epsilon(&comp, &four).unwrap();
            assert!((eps - (1.0 - 1.0 / d as f64)).abs() < 1e-12);
        }
    }

    #[test]
    fn qubit_bloch_angle_fidelity() {
        // two-outcome observables along n̂ and m̂: F = (1 + n̂·m̂)/2
        for (tn, tm) in [(0.0, 0.0), (0.0, std::f64::consts::FRAC_PI_2), (0.0, std::f64::consts::PI)] {
            let lab = Measurement::from_observable(&bloch_observable(tn)).unwrap();
            let target = Measurement::from_observable(&bloch_observable(tm)).unwrap();
            let f = measurement_fidelity(&lab, &target).unwrap();
            let expect = (1.0 + (tn - tm).cos()) / 2.0;
            assert!((f - expect).abs() < 1e-12);
            let eps = min_epsilon(&lab, &target).unwrap();
            assert!((eps - (1.0 - (tn - tm).cos()) / 2.0).abs() < 1e-12);
        }
    }

    #[test]
    fn non_projective_target_rejected() {
        let mut rng = ChaCha8Rng::seed_from_u64(22);
        let lab = random_projective_measurement(3, 3, &mut rng);
        let povm = random_povm(3, 3, &mut rng);
        assert!(measurement_fidelity(&lab, &povm).is_err());
        // a POVM lab against a projective target is fine
        assert!(measurement_fidelity(&povm, &lab).is_ok());
    }

    #[test]
    fn observable_overlap_paulis() {
        let sx = bloch_observable(0.0);
        assert!((observable_overlap(&sx, &sx).unwrap() - 2.0).abs() < 1e-12);
        let theta = 0.7;
        let rot = bloch_observable(theta);
        assert!((observable_overlap(&rot, &sx).unwrap() - 2.0 * theta.cos()).abs() < 1e-12);
        let neg = sx.scale_re(-1.0);
        assert!((observable_overlap(&neg, &sx).unwrap() + 2.0).abs() < 1e-12);
    }

    #[test]
    fn observable_overlap_norm_guard() {
        let big = bloch_observable(0.0).scale_re(1.5);
        let sx = bloch_observable(0.0);
        assert!(observable_overlap(&big, &sx).is_err());
    }

    #[test]
    fn fidelity_range_on_random_pairs() {
        let mut rng = ChaCha8Rng::seed_from_u64(23);
        for _ in 0..50 {
            let lab = random_povm(3, 3, &mut rng);
            let target = random_projective_measurement(3, 3, &mut rng);
            let f = measurement_fidelity(&lab, &target).unwrap();
            assert!((-1e-10..=1.0 + 1e-10).contains(&f));
        }
    }

    #[test]
    fn operational_interpretation() {
        // F equals the rank-weighted average probability of the matching
        // outcome when the lab POVM is applied to an orthonormal basis of
        // each target eigenspace.
        let mut rng = ChaCha8Rng::seed_from_u64(24);
        for d in [2usize, 3, 4] {
            for _ in 0..17 {
                let lab = random_povm(d, d.min(3), &mut rng);
                let target = random_projective_measurement(d, d.min(3), &mut rng);
                let f = measurement_fidelity(&lab, &target).unwrap();
                let mut sim = 0.0;
                for (a, proj) in target.effects().iter().enumerate() {
                    let (w, v) = eigh(proj).unwrap();
                    for (k, &wk) in w.iter().enumerate() {
                        if wk > 0.5 {
                            let col: Vec<_> = (0..d).map(|i| v[(i, k)]).collect();
                            let psi = PureState::new(col).unwrap();
                            sim += psi.expectation(lab.effect(a));
                        }
                    }
                }
                sim /= d as f64;
                assert!((f - sim).abs() < 1e-10, "d={d} F={f} sim={sim}");
            }
        }
    }

    #[test]
    fn two_outcome_bridge() {
        // Tr(A·Ã) = d(2F−1) when both observables come from effects E₁ − E₂
        let mut rng = ChaCha8Rng::seed_from_u64(25);
        for _ in 0..30 {
            let lab = random_povm(2, 2, &mut rng);
            let target = random_projective_measurement(2, 2, &mut rng);
            let f = measurement_fidelity(&lab, &target).unwrap();
            let a = lab.observable().unwrap();
            let t = target.observable().unwrap();
            let overlap = observable_overlap(&a, &t).unwrap();
            assert!((overlap - 2.0 * (2.0 * f - 1.0)).abs() < 1e-10);
        }
    }

    #[test]
    fn budget_validation() {
        assert!(InaccuracyBudget::uniform(2, 2, 0.3).is_ok());
        assert!(InaccuracyBudget::uniform(2, 2, -0.1).is_err());
        assert!(InaccuracyBudget::new(vec![0.5], vec![1.2]).is_err());
    }
}
