//! Alternating convex search for lower bounds on the corrected witness
//! bounds: one SDP per side over the measurement effects under the fidelity
//! budget, an eigenvector step for the global state (entangled mode) or a
//! nested eigenvector alternation for product states (separable mode).
//! Restarts run in parallel, each with its own seeded generator, and every
//! reported bound is re-verified against the exact Born rule.

use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fidelity::measurement_fidelity;
use crate::linalg::{
    eigh, random_povm, random_pure_state, ComplexMatrix, DensityMatrix, HermitianOperator,
    Measurement, PureState,
};
use crate::sdp::{BlockKind, LinearExpr, SdpProblem, SdpStatus, Sense};
use crate::witness::{bell_operator, born, evaluate, side_a_objectives, side_b_objectives, WitnessSpec};

/// Which bound the search targets: the entangled maximum (global pure state)
/// or the separable maximum (pure product state).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum SeesawMode {
    Entangled,
    Separable,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SeesawConfig {
    pub restarts: usize,
    pub max_outer_iters: usize,
    /// absolute witness-value change that counts as converged
    pub convergence_tol: f64,
    /// inner alternation steps of the product-state sub-search per outer step
    pub inner_state_iters: usize,
    pub seed: u64,
    pub sdp_tol: f64,
}

impl Default for SeesawConfig {
    fn default() -> Self {
        SeesawConfig {
            restarts: 20,
            max_outer_iters: 200,
            convergence_tol: 1e-7,
            inner_state_iters: 10,
            seed: 1,
            sdp_tol: 1e-8,
        }
    }
}

impl SeesawConfig {
    pub fn validate(&self) -> Result<()> {
        if self.restarts < 1 {
            return Err(Error::param("restarts must be >= 1"));
        }
        if self.convergence_tol <= 0.0 || self.sdp_tol <= 0.0 {
            return Err(Error::param("tolerances must be positive"));
        }
        Ok(())
    }
}

#[derive(Debug, Clone)]
pub struct SeesawResult {
    /// Certified lower bound: the exact Born-rule value of the best strategy.
    pub bound: f64,
    pub best_state: DensityMatrix,
    pub best_meas_a: Vec<Measurement>,
    pub best_meas_b: Vec<Measurement>,
    pub per_restart_values: Vec<f64>,
    pub converged: bool,
    /// Worst fidelity slack over all settings (negative = violation).
    pub min_fidelity_slack: f64,
}

/// One SDP over the effects of a single setting: maximize Σ_a ⟨Φ_a, A_a⟩
/// subject to A_a ⪰ 0, Σ_a A_a = 1 and the per-setting fidelity floor.
fn optimize_setting(
    d: usize,
    objectives: &[HermitianOperator],
    target: &Measurement,
    eps: f64,
    sdp_tol: f64,
) -> Result<Measurement> {
    let o = objectives.len();
    let mut prob = SdpProblem::default();
    let blocks: Vec<usize> = (0..o)
        .map(|a| prob.add_block(format!("A{a}"), d, BlockKind::ComplexHermitian))
        .collect();

    let mut obj = LinearExpr::new();
    for (a, phi) in objectives.iter().enumerate() {
        obj = obj.with_hermitian(blocks[a], phi);
    }
    prob.set_objective(obj);

    // completeness: ⟨F_r, Σ_a A_a⟩ = ⟨F_r, 1⟩ over a Hermitian basis of
    // elementary matrices
    for i in 0..d {
        for j in i..d {
            if i == j {
                let mut m = ComplexMatrix::zeros(d, d);
                m[(i, i)] = Complex64::new(1.0, 0.0);
                let mut expr = LinearExpr::new();
                for &b in &blocks {
                    expr = expr.with_matrix(b, m.clone());
                }
                prob.add_constraint(expr, Sense::Eq, 1.0);
            } else {
                let mut re = ComplexMatrix::zeros(d, d);
                re[(i, j)] = Complex64::new(1.0, 0.0);
                re[(j, i)] = Complex64::new(1.0, 0.0);
                let mut expr = LinearExpr::new();
                for &b in &blocks {
                    expr = expr.with_matrix(b, re.clone());
                }
                prob.add_constraint(expr, Sense::Eq, 0.0);
                let mut im = ComplexMatrix::zeros(d, d);
                im[(i, j)] = Complex64::new(0.0, -1.0);
                im[(j, i)] = Complex64::new(0.0, 1.0);
                let mut expr = LinearExpr::new();
                for &b in &blocks {
                    expr = expr.with_matrix(b, im.clone());
                }
                prob.add_constraint(expr, Sense::Eq, 0.0);
            }
        }
    }

    // fidelity: (1/d) Σ_a ⟨Ã_a, A_a⟩ ≥ 1 − ε
    let mut fid = LinearExpr::new();
    for (a, &b) in blocks.iter().enumerate() {
        fid = fid.with_matrix(
            b,
            target
                .effect(a)
                .matrix()
                .scale(Complex64::new(1.0 / d as f64, 0.0)),
        );
    }
    prob.add_constraint(fid, Sense::Ge, 1.0 - eps);

    let sol = prob.solve(sdp_tol, crate::sdp::DEFAULT_MAX_ITERS)?;
    if sol.status != SdpStatus::Optimal {
        return Err(Error::Sdp(format!(
            "measurement step returned {:?} (targets are always feasible)",
            sol.status
        )));
    }
    let effects = sol
        .block_values
        .iter()
        .map(|m| clean_effect(m, d))
        .collect::<Result<Vec<_>>>()?;
    // the interior-point iterate satisfies completeness only to solver
    // tolerance; S^{-1/2}(·)S^{-1/2} restores Σ_a A_a = 1 exactly while
    // keeping every effect PSD
    let mut sum = HermitianOperator::zeros(d);
    for e in &effects {
        sum = sum.add(e);
    }
    let (w, v) = eigh(&sum)?;
    let mut sinv = ComplexMatrix::zeros(d, d);
    for k in 0..d {
        let inv_sqrt = 1.0 / w[k].max(1e-12).sqrt();
        for i in 0..d {
            for j in 0..d {
                sinv[(i, j)] += v[(i, k)] * v[(j, k)].conj() * inv_sqrt;
            }
        }
    }
    let effects: Vec<HermitianOperator> = effects
        .iter()
        .map(|e| HermitianOperator::symmetrize(sinv.matmul(e.matrix()).matmul(&sinv)))
        .collect();
    Measurement::new(effects)
}

/// Clip tiny negative eigenvalues the interior-point solve leaves behind.
fn clean_effect(m: &ComplexMatrix, d: usize) -> Result<HermitianOperator> {
    let h = HermitianOperator::symmetrize(m.clone());
    let (w, v) = eigh(&h)?;
    if w[0] >= 0.0 {
        return Ok(h);
    }
    let mut out = ComplexMatrix::zeros(d, d);
    for (k, &wk) in w.iter().enumerate() {
        let wk = wk.max(0.0);
        if wk == 0.0 {
            continue;
        }
        for i in 0..d {
            for j in 0..d {
                out[(i, j)] += v[(i, k)] * v[(j, k)].conj() * wk;
            }
        }
    }
    Ok(HermitianOperator::symmetrize(out))
}

/// Optimize all side-A measurements at fixed side B and state. At ε = 0 the
/// rank-one projective targets are the unique feasible point, so they are
/// returned directly.
pub fn optimize_side_a(
    spec: &WitnessSpec,
    meas_b: &[Measurement],
    rho: &DensityMatrix,
    sdp_tol: f64,
) -> Result<Vec<Measurement>> {
    let objectives = side_a_objectives(spec, meas_b, rho)?;
    let mut out = Vec::with_capacity(spec.x_settings);
    for (x, per_a) in objectives.iter().enumerate() {
        let eps = spec.budget.eps_a[x];
        if eps <= 0.0 {
            out.push(spec.targets_a[x].clone());
        } else {
            out.push(optimize_setting(
                spec.d,
                per_a,
                &spec.targets_a[x],
                eps,
                sdp_tol,
            )?);
        }
    }
    Ok(out)
}

/// Side-B analogue of [`optimize_side_a`].
pub fn optimize_side_b(
    spec: &WitnessSpec,
    meas_a: &[Measurement],
    rho: &DensityMatrix,
    sdp_tol: f64,
) -> Result<Vec<Measurement>> {
    let objectives = side_b_objectives(spec, meas_a, rho)?;
    let mut out = Vec::with_capacity(spec.y_settings);
    for (y, per_b) in objectives.iter().enumerate() {
        let eps = spec.budget.eps_b[y];
        if eps <= 0.0 {
            out.push(spec.targets_b[y].clone());
        } else {
            out.push(optimize_setting(
                spec.d,
                per_b,
                &spec.targets_b[y],
                eps,
                sdp_tol,
            )?);
        }
    }
    Ok(out)
}

/// Top eigenvector of the Bell operator as a rank-one state.
pub fn optimal_global_state(bell: &HermitianOperator) -> Result<DensityMatrix> {
    let (w, v) = eigh(bell)?;
    let n = bell.dim();
    let top = w.len() - 1;
    let amps: Vec<Complex64> = (0..n).map(|i| v[(i, top)]).collect();
    Ok(PureState::new(amps)?.to_density())
}

/// ⟨φ| ⊗ 1 · B · |φ⟩ ⊗ 1: the d×d operator whose top eigenvector is the best
/// |ψ⟩ at fixed |φ⟩.
fn contract_side_a(bell: &HermitianOperator, phi: &PureState, d: usize) -> HermitianOperator {
    let mut m = ComplexMatrix::zeros(d, d);
    let b = bell.matrix();
    for i in 0..d {
        for j in 0..d {
            let mut acc = Complex64::new(0.0, 0.0);
            for k in 0..d {
                for l in 0..d {
                    acc += phi.amplitudes()[k].conj() * b[(k * d + i, l * d + j)]
                        * phi.amplitudes()[l];
                }
            }
            m[(i, j)] = acc;
        }
    }
    HermitianOperator::symmetrize(m)
}

/// 1 ⊗ ⟨ψ| · B · 1 ⊗ |ψ⟩.
fn contract_side_b(bell: &HermitianOperator, psi: &PureState, d: usize) -> HermitianOperator {
    let mut m = ComplexMatrix::zeros(d, d);
    let b = bell.matrix();
    for i in 0..d {
        for j in 0..d {
            let mut acc = Complex64::new(0.0, 0.0);
            for k in 0..d {
                for l in 0..d {
                    acc += psi.amplitudes()[k].conj() * b[(i * d + k, j * d + l)]
                        * psi.amplitudes()[l];
                }
            }
            m[(i, j)] = acc;
        }
    }
    HermitianOperator::symmetrize(m)
}

fn top_eigenvector(h: &HermitianOperator) -> Result<PureState> {
    let (w, v) = eigh(h)?;
    let n = h.dim();
    let top = w.len() - 1;
    PureState::new((0..n).map(|i| v[(i, top)]).collect())
}

/// Alternating eigenvector search for the best pure product state of a Bell
/// operator on d ⊗ d. The witness value is nondecreasing at every half-step.
pub fn optimal_product_state(
    bell: &HermitianOperator,
    start: (&PureState, &PureState),
    iters: usize,
) -> Result<(PureState, PureState)> {
    let d2 = bell.dim();
    let d = (d2 as f64).sqrt().round() as usize;
    if d * d != d2 {
        return Err(Error::dim("product state space", d2, d * d));
    }
    let mut phi = start.0.clone();
    let mut psi;
    let mut last = f64::NEG_INFINITY;
    // fix φ, lift the contraction's top eigenvector to ψ; then swap roles
    psi = top_eigenvector(&contract_side_a(bell, &phi, d))?;
    for _ in 0..iters {
        phi = top_eigenvector(&contract_side_b(bell, &psi, d))?;
        psi = top_eigenvector(&contract_side_a(bell, &phi, d))?;
        let val = phi.tensor(&psi).expectation(bell);
        if (val - last).abs() < 1e-12 {
            break;
        }
        last = val;
    }
    Ok((phi, psi))
}

struct RestartOutcome {
    value: f64,
    state: DensityMatrix,
    meas_a: Vec<Measurement>,
    meas_b: Vec<Measurement>,
    converged: bool,
}

fn run_restart(
    spec: &WitnessSpec,
    mode: SeesawMode,
    cfg: &SeesawConfig,
    rng: &mut ChaCha8Rng,
    warm: Option<&(Vec<Measurement>, Vec<Measurement>, DensityMatrix)>,
) -> Result<RestartOutcome> {
    let d = spec.d;
    let (mut meas_a, mut meas_b, mut rho, mut product) = match warm {
        Some((wa, wb, wr)) => (wa.clone(), wb.clone(), wr.clone(), None),
        None => {
            let mb: Vec<Measurement> = (0..spec.y_settings)
                .map(|_| random_povm(d, spec.o, rng))
                .collect();
            let ma: Vec<Measurement> = (0..spec.x_settings)
                .map(|_| random_povm(d, spec.o, rng))
                .collect();
            match mode {
                SeesawMode::Entangled => {
                    let rho = random_pure_state(d * d, rng).to_density();
                    (ma, mb, rho, None)
                }
                SeesawMode::Separable => {
                    let phi = random_pure_state(d, rng);
                    let psi = random_pure_state(d, rng);
                    let rho = phi.tensor(&psi).to_density();
                    (ma, mb, rho, Some((phi, psi)))
                }
            }
        }
    };
    if mode == SeesawMode::Separable && product.is_none() {
        product = Some((random_pure_state(d, rng), random_pure_state(d, rng)));
    }

    let mut value = evaluate(spec, &born(&rho, &meas_a, &meas_b)?)?;
    let mut converged = false;
    for _ in 0..cfg.max_outer_iters {
        meas_a = optimize_side_a(spec, &meas_b, &rho, cfg.sdp_tol)?;
        meas_b = optimize_side_b(spec, &meas_a, &rho, cfg.sdp_tol)?;
        let bell = bell_operator(spec, &meas_a, &meas_b)?;
        match mode {
            SeesawMode::Entangled => {
                rho = optimal_global_state(&bell)?;
            }
            SeesawMode::Separable => {
                let (phi0, psi0) = product.as_ref().unwrap();
                let (phi, psi) =
                    optimal_product_state(&bell, (phi0, psi0), cfg.inner_state_iters)?;
                rho = phi.tensor(&psi).to_density();
                product = Some((phi, psi));
            }
        }
        let new_value = evaluate(spec, &born(&rho, &meas_a, &meas_b)?)?;
        if (new_value - value).abs() < cfg.convergence_tol {
            value = new_value;
            converged = true;
            break;
        }
        value = new_value;
    }
    Ok(RestartOutcome {
        value,
        state: rho,
        meas_a,
        meas_b,
        converged,
    })
}

/// Best-of-restarts alternating convex search. `warm_start` seeds one extra
/// restart with a previously found strategy (used by the ε-grid continuation
/// in [`fig1_experiment`]).
pub fn seesaw_lower_bound_warm(
    spec: &WitnessSpec,
    mode: SeesawMode,
    cfg: &SeesawConfig,
    warm_start: Option<(Vec<Measurement>, Vec<Measurement>, DensityMatrix)>,
) -> Result<SeesawResult> {
    cfg.validate()?;
    let total = cfg.restarts + usize::from(warm_start.is_some());
    let outcomes: Vec<Result<RestartOutcome>> = (0..total)
        .into_par_iter()
        .map(|r| {
            let mut rng =
                ChaCha8Rng::seed_from_u64(cfg.seed.wrapping_add(r as u64 * 0x9E37_79B9));
            let warm = if r >= cfg.restarts {
                warm_start.as_ref()
            } else {
                None
            };
            run_restart(spec, mode, cfg, &mut rng, warm)
        })
        .collect();

    let mut per_restart_values = Vec::with_capacity(total);
    let mut best: Option<RestartOutcome> = None;
    for outcome in outcomes {
        match outcome {
            Ok(o) => {
                per_restart_values.push(o.value);
                let better = match &best {
                    None => true,
                    Some(b) => o.value > b.value,
                };
                if better {
                    best = Some(o);
                }
            }
            // a failed restart is skipped, not fatal
            Err(_) => per_restart_values.push(f64::NAN),
        }
    }
    let best = best.ok_or_else(|| Error::Sdp("every seesaw restart failed".into()))?;

    // post-hoc certificate: exact Born value and fidelity slack
    let corr = born(&best.state, &best.meas_a, &best.meas_b)?;
    let bound = evaluate(spec, &corr)?;
    let mut min_slack = f64::INFINITY;
    for (x, ma) in best.meas_a.iter().enumerate() {
        let f = measurement_fidelity(ma, &spec.targets_a[x])?;
        min_slack = min_slack.min(f - (1.0 - spec.budget.eps_a[x]));
    }
    for (y, mb) in best.meas_b.iter().enumerate() {
        let f = measurement_fidelity(mb, &spec.targets_b[y])?;
        min_slack = min_slack.min(f - (1.0 - spec.budget.eps_b[y]));
    }
    if min_slack < -1e-7 {
        return Err(Error::Sdp(format!(
            "best strategy violates the fidelity budget by {min_slack:e}"
        )));
    }
    Ok(SeesawResult {
        bound,
        best_state: best.state,
        best_meas_a: best.meas_a,
        best_meas_b: best.meas_b,
        per_restart_values,
        converged: best.converged,
        min_fidelity_slack: min_slack,
    })
}

pub fn seesaw_lower_bound(
    spec: &WitnessSpec,
    mode: SeesawMode,
    cfg: &SeesawConfig,
) -> Result<SeesawResult> {
    seesaw_lower_bound_warm(spec, mode, cfg, None)
}

/// One row of the conjugate-bases sweep.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Fig1Row {
    pub d: usize,
    pub eps: f64,
    pub mode: String,
    pub bound: f64,
    pub delta: f64,
    pub restarts_converged: usize,
    pub wall_time_ms: u128,
}

/// Seesaw separable bounds of the conjugate-bases witness over a (d, ε)
/// grid, with the Δ gap ratio. Within each dimension the ε grid is traversed
/// in ascending order and the previous optimizer seeds one warm restart,
/// which removes spurious non-monotonicity from the reported curves. Rows
/// are sorted by (ε, d).
pub fn fig1_experiment(
    d_list: &[usize],
    eps_list: &[f64],
    cfg: &SeesawConfig,
) -> Result<Vec<Fig1Row>> {
    let mut rows = Vec::new();
    for &d in d_list {
        let mut eps_sorted = eps_list.to_vec();
        eps_sorted.sort_by(|a, b| a.partial_cmp(b).unwrap());
        let mut warm: Option<(Vec<Measurement>, Vec<Measurement>, DensityMatrix)> = None;
        for &eps in &eps_sorted {
            let start = std::time::Instant::now();
            let spec = crate::witness::conjugate_bases(d, eps)?;
            let res = seesaw_lower_bound_warm(&spec, SeesawMode::Separable, cfg, warm.take())?;
            let delta = crate::analytic::delta_ratio(d, res.bound)?;
            rows.push(Fig1Row {
                d,
                eps,
                mode: "separable".into(),
                bound: res.bound,
                delta,
                restarts_converged: res
                    .per_restart_values
                    .iter()
                    .filter(|v| v.is_finite())
                    .count(),
                wall_time_ms: start.elapsed().as_millis(),
            });
            warm = Some((res.best_meas_a, res.best_meas_b, res.best_state));
        }
    }
    rows.sort_by(|a, b| a.eps.partial_cmp(&b.eps).unwrap().then(a.d.cmp(&b.d)));
    Ok(rows)
}
