//! Scenario description and evaluation: witness coefficient tensors over
//! Born-rule correlations, the Bell operator, and the builtin witness
//! catalog used throughout the crate.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::bases::{fourier_basis, gell_mann_basis};
use crate::error::{Error, Result};
use crate::fidelity::InaccuracyBudget;
use crate::linalg::{
    kron, partial_trace_a, partial_trace_b, ComplexMatrix, DensityMatrix, HermitianOperator,
    Measurement, PureState,
};

/// Full scenario: local dimension, settings, outcomes, coefficient tensor,
/// projective targets on both sides and the per-setting inaccuracy budget.
#[derive(Debug, Clone)]
pub struct WitnessSpec {
    pub name: String,
    pub d: usize,
    pub x_settings: usize,
    pub y_settings: usize,
    pub o: usize,
    coeffs: Vec<f64>,
    pub targets_a: Vec<Measurement>,
    pub targets_b: Vec<Measurement>,
    pub budget: InaccuracyBudget,
    /// Separable bound of the ideal (ε = 0) witness, when known in closed form.
    pub ideal_sep_bound: Option<f64>,
    /// Largest value any strategy can produce, when known.
    pub algebraic_max: Option<f64>,
    /// Free-form notes recording modeling choices (outcome binning etc.).
    pub metadata: String,
}

impl WitnessSpec {
    #[allow(clippy::too_many_arguments)]
    pub fn new(
        name: impl Into<String>,
        d: usize,
        coeffs: Vec<f64>,
        targets_a: Vec<Measurement>,
        targets_b: Vec<Measurement>,
        o: usize,
        budget: InaccuracyBudget,
    ) -> Result<Self> {
        let x_settings = targets_a.len();
        let y_settings = targets_b.len();
        if coeffs.len() != x_settings * y_settings * o * o {
            return Err(Error::dim(
                "coefficient tensor",
                coeffs.len(),
                x_settings * y_settings * o * o,
            ));
        }
        if coeffs.iter().any(|c| !c.is_finite()) {
            return Err(Error::param("non-finite witness coefficient"));
        }
        if budget.eps_a.len() != x_settings || budget.eps_b.len() != y_settings {
            return Err(Error::param("budget length mismatch"));
        }
        for t in targets_a.iter().chain(targets_b.iter()) {
            if t.dim() != d {
                return Err(Error::dim("target dimension", t.dim(), d));
            }
            if t.outcomes() != o {
                return Err(Error::dim("target outcomes", t.outcomes(), o));
            }
            if !t.is_projective(1e-10) {
                return Err(Error::NotProjective {
                    deviation: t.projectivity_deviation(),
                    tol: 1e-10,
                });
            }
        }
        Ok(WitnessSpec {
            name: name.into(),
            d,
            x_settings,
            y_settings,
            o,
            coeffs,
            targets_a,
            targets_b,
            budget,
            ideal_sep_bound: None,
            algebraic_max: None,
            metadata: String::new(),
        })
    }

    #[inline]
    fn idx(&self, a: usize, b: usize, x: usize, y: usize) -> usize {
        ((x * self.y_settings + y) * self.o + a) * self.o + b
    }

    pub fn coeff(&self, a: usize, b: usize, x: usize, y: usize) -> f64 {
        self.coeffs[self.idx(a, b, x, y)]
    }

    pub fn with_budget(mut self, budget: InaccuracyBudget) -> Self {
        assert_eq!(budget.eps_a.len(), self.x_settings);
        assert_eq!(budget.eps_b.len(), self.y_settings);
        self.budget = budget;
        self
    }

    pub fn with_uniform_eps(self, eps: f64) -> Result<Self> {
        let budget = InaccuracyBudget::uniform(self.x_settings, self.y_settings, eps)?;
        Ok(self.with_budget(budget))
    }

    /// Σ_{b,y} c_abxy · B_{b|y} for each (x, a): the side-B contraction that
    /// turns the witness into Σ Tr(A_{a|x}·Φ_{a|x}) once the state is fixed.
    pub fn side_b_contraction(&self, meas_b: &[Measurement]) -> Vec<Vec<HermitianOperator>> {
        let mut out = Vec::with_capacity(self.x_settings);
        for x in 0..self.x_settings {
            let mut per_a = Vec::with_capacity(self.o);
            for a in 0..self.o {
                let mut k = HermitianOperator::zeros(self.d);
                for (y, mb) in meas_b.iter().enumerate() {
                    for b in 0..self.o {
                        let c = self.coeff(a, b, x, y);
                        if c != 0.0 {
                            k = k.add(&mb.effect(b).scale_re(c));
                        }
                    }
                }
                per_a.push(k);
            }
            out.push(per_a);
        }
        out
    }

    /// Σ_{a,x} c_abxy · A_{a|x} for each (y, b).
    pub fn side_a_contraction(&self, meas_a: &[Measurement]) -> Vec<Vec<HermitianOperator>> {
        let mut out = Vec::with_capacity(self.y_settings);
        for y in 0..self.y_settings {
            let mut per_b = Vec::with_capacity(self.o);
            for b in 0..self.o {
                let mut k = HermitianOperator::zeros(self.d);
                for (x, ma) in meas_a.iter().enumerate() {
                    for a in 0..self.o {
                        let c = self.coeff(a, b, x, y);
                        if c != 0.0 {
                            k = k.add(&ma.effect(a).scale_re(c));
                        }
                    }
                }
                per_b.push(k);
            }
            out.push(per_b);
        }
        out
    }
}

/// Born-rule probability tensor p(a, b | x, y).
#[derive(Debug, Clone)]
pub struct Correlation {
    pub x_settings: usize,
    pub y_settings: usize,
    pub o: usize,
    p: Vec<f64>,
}

impl Correlation {
    pub fn new(x_settings: usize, y_settings: usize, o: usize, p: Vec<f64>) -> Result<Self> {
        if p.len() != x_settings * y_settings * o * o {
            return Err(Error::dim(
                "correlation tensor",
                p.len(),
                x_settings * y_settings * o * o,
            ));
        }
        for &v in &p {
            if !(-1e-10..=1.0 + 1e-10).contains(&v) {
                return Err(Error::param(format!("probability {v} outside [0, 1]")));
            }
        }
        let corr = Correlation {
            x_settings,
            y_settings,
            o,
            p,
        };
        for x in 0..x_settings {
            for y in 0..y_settings {
                let mut s = 0.0;
                for a in 0..o {
                    for b in 0..o {
                        s += corr.prob(a, b, x, y);
                    }
                }
                if (s - 1.0).abs() > 1e-9 {
                    return Err(Error::param(format!(
                        "p(·,·|{x},{y}) sums to {s}, expected 1"
                    )));
                }
            }
        }
        Ok(corr)
    }

    #[inline]
    pub fn prob(&self, a: usize, b: usize, x: usize, y: usize) -> f64 {
        self.p[((x * self.y_settings + y) * self.o + a) * self.o + b]
    }
}

/// Exact Born probabilities p(a,b|x,y) = Tr[(A_{a|x} ⊗ B_{b|y}) ρ].
pub fn born(
    rho: &DensityMatrix,
    meas_a: &[Measurement],
    meas_b: &[Measurement],
) -> Result<Correlation> {
    let o = meas_a
        .first()
        .map(|m| m.outcomes())
        .ok_or_else(|| Error::param("no side-A measurements"))?;
    let da = meas_a[0].dim();
    let db = meas_b
        .first()
        .map(|m| m.dim())
        .ok_or_else(|| Error::param("no side-B measurements"))?;
    if rho.dim() != da * db {
        return Err(Error::dim("born state dimension", rho.dim(), da * db));
    }
    let x_settings = meas_a.len();
    let y_settings = meas_b.len();
    let mut p = Vec::with_capacity(x_settings * y_settings * o * o);
    for ma in meas_a {
        for mb in meas_b {
            for a in 0..o {
                // Tr[(A ⊗ B)ρ] = Tr_B[B · Tr_A((A⊗1)ρ)]
                let big = kron(
                    ma.effect(a).matrix(),
                    &ComplexMatrix::identity(db),
                );
                let reduced = partial_trace_a(&big.matmul(rho.op().matrix()), da, db);
                for b in 0..o {
                    let val = reduced.hs_inner(mb.effect(b).matrix()).re;
                    p.push(val.clamp(-1e-10, 1.0 + 1e-10));
                }
            }
        }
    }
    Correlation::new(x_settings, y_settings, o, p)
}

/// W = Σ c_abxy p(a,b|x,y).
pub fn evaluate(spec: &WitnessSpec, corr: &Correlation) -> Result<f64> {
    if corr.x_settings != spec.x_settings || corr.y_settings != spec.y_settings || corr.o != spec.o
    {
        return Err(Error::param("correlation shape does not match spec"));
    }
    let mut w = 0.0;
    for x in 0..spec.x_settings {
        for y in 0..spec.y_settings {
            for a in 0..spec.o {
                for b in 0..spec.o {
                    w += spec.coeff(a, b, x, y) * corr.prob(a, b, x, y);
                }
            }
        }
    }
    Ok(w)
}

/// Bell operator B = Σ c_abxy · A_{a|x} ⊗ B_{b|y}.
pub fn bell_operator(
    spec: &WitnessSpec,
    meas_a: &[Measurement],
    meas_b: &[Measurement],
) -> Result<HermitianOperator> {
    if meas_a.len() != spec.x_settings || meas_b.len() != spec.y_settings {
        return Err(Error::param("measurement count does not match spec"));
    }
    let d2 = meas_a[0].dim() * meas_b[0].dim();
    let mut acc = ComplexMatrix::zeros(d2, d2);
    for (x, ma) in meas_a.iter().enumerate() {
        for (y, mb) in meas_b.iter().enumerate() {
            for a in 0..spec.o {
                for b in 0..spec.o {
                    let c = spec.coeff(a, b, x, y);
                    if c != 0.0 {
                        let ab = kron(ma.effect(a).matrix(), mb.effect(b).matrix());
                        acc = acc.add(&ab.scale(Complex64::new(c, 0.0)));
                    }
                }
            }
        }
    }
    Ok(HermitianOperator::symmetrize(acc))
}

/// Φ_{a|x} = Tr_B[(1 ⊗ K_{a|x}) ρ]: the per-effect objective matrices for
/// optimizing side A at fixed side B and state.
pub fn side_a_objectives(
    spec: &WitnessSpec,
    meas_b: &[Measurement],
    rho: &DensityMatrix,
) -> Result<Vec<Vec<HermitianOperator>>> {
    let d = spec.d;
    if rho.dim() != d * d {
        return Err(Error::dim("objective state dim", rho.dim(), d * d));
    }
    let contraction = spec.side_b_contraction(meas_b);
    let mut out = Vec::with_capacity(spec.x_settings);
    for per_a in contraction {
        let mut row = Vec::with_capacity(spec.o);
        for k in per_a {
            let big = kron(&ComplexMatrix::identity(d), k.matrix());
            let phi = partial_trace_b(&big.matmul(rho.op().matrix()), d, d);
            row.push(HermitianOperator::symmetrize(phi));
        }
        out.push(row);
    }
    Ok(out)
}

/// Ψ_{b|y} = Tr_A[(K_{b|y} ⊗ 1) ρ]: side-B analogue of [`side_a_objectives`].
pub fn side_b_objectives(
    spec: &WitnessSpec,
    meas_a: &[Measurement],
    rho: &DensityMatrix,
) -> Result<Vec<Vec<HermitianOperator>>> {
    let d = spec.d;
    if rho.dim() != d * d {
        return Err(Error::dim("objective state dim", rho.dim(), d * d));
    }
    let contraction = spec.side_a_contraction(meas_a);
    let mut out = Vec::with_capacity(spec.y_settings);
    for per_b in contraction {
        let mut row = Vec::with_capacity(spec.o);
        for k in per_b {
            let big = kron(k.matrix(), &ComplexMatrix::identity(d));
            let psi = partial_trace_a(&big.matmul(rho.op().matrix()), d, d);
            row.push(HermitianOperator::symmetrize(psi));
        }
        out.push(row);
    }
    Ok(out)
}

fn pauli_targets(which: &[char]) -> Vec<Measurement> {
    which
        .iter()
        .map(|c| {
            let m = match c {
                'x' => ComplexMatrix::from_real(2, 2, &[0.0, 1.0, 1.0, 0.0]).unwrap(),
                'y' => ComplexMatrix::from_entries(
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
                'z' => ComplexMatrix::from_real(2, 2, &[1.0, 0.0, 0.0, -1.0]).unwrap(),
                _ => unreachable!(),
            };
            Measurement::from_observable(&HermitianOperator::new(m).unwrap()).unwrap()
        })
        .collect()
}

/// Coefficients for correlator-form witnesses W = Σ_xy w_xy ⟨A_x ⊗ B_y⟩ with
/// ±1-valued two-outcome measurements.
fn correlator_coeffs(w: &[Vec<f64>]) -> Vec<f64> {
    let xs = w.len();
    let ys = w[0].len();
    let sign = |a: usize| if a == 0 { 1.0 } else { -1.0 };
    let mut c = vec![0.0; xs * ys * 4];
    for (x, row) in w.iter().enumerate() {
        for (y, &wxy) in row.iter().enumerate() {
            for a in 0..2 {
                for b in 0..2 {
                    c[((x * ys + y) * 2 + a) * 2 + b] = wxy * sign(a) * sign(b);
                }
            }
        }
    }
    c
}

/// ⟨σ_X⊗σ_X⟩ + ⟨σ_Z⊗σ_Z⟩: the simplest two-qubit witness.
pub fn pauli2(eps: f64) -> Result<WitnessSpec> {
    let targets = pauli_targets(&['x', 'z']);
    let coeffs = correlator_coeffs(&[vec![1.0, 0.0], vec![0.0, 1.0]]);
    let mut spec = WitnessSpec::new(
        "pauli2",
        2,
        coeffs,
        targets.clone(),
        targets,
        2,
        InaccuracyBudget::uniform(2, 2, eps)?,
    )?;
    spec.ideal_sep_bound = Some(1.0);
    spec.algebraic_max = Some(2.0);
    Ok(spec)
}

/// ⟨σ_X⊗σ_X⟩ + ⟨σ_Y⊗σ_Y⟩ + ⟨σ_Z⊗σ_Z⟩.
pub fn pauli3(eps: f64) -> Result<WitnessSpec> {
    let targets = pauli_targets(&['x', 'y', 'z']);
    let coeffs = correlator_coeffs(&[
        vec![1.0, 0.0, 0.0],
        vec![0.0, 1.0, 0.0],
        vec![0.0, 0.0, 1.0],
    ]);
    let mut spec = WitnessSpec::new(
        "pauli3",
        2,
        coeffs,
        targets.clone(),
        targets,
        2,
        InaccuracyBudget::uniform(3, 3, eps)?,
    )?;
    spec.ideal_sep_bound = Some(1.0);
    spec.algebraic_max = Some(3.0);
    Ok(spec)
}

/// CHSH quantity ⟨A₁⊗(B₁+B₂)⟩ + ⟨A₂⊗(B₁−B₂)⟩ with σ_X, σ_Z targets on both
/// sides.
pub fn chsh(eps: f64) -> Result<WitnessSpec> {
    let targets = pauli_targets(&['x', 'z']);
    let coeffs = correlator_coeffs(&[vec![1.0, 1.0], vec![1.0, -1.0]]);
    let mut spec = WitnessSpec::new(
        "chsh",
        2,
        coeffs,
        targets.clone(),
        targets,
        2,
        InaccuracyBudget::uniform(2, 2, eps)?,
    )?;
    spec.ideal_sep_bound = Some(std::f64::consts::SQRT_2);
    spec.algebraic_max = Some(4.0);
    Ok(spec)
}

/// W^(d) = Σ_i p(a=i, b=i | comp, comp) + p(a=i, b=i | four, four): the
/// conjugate-bases witness with o = d outcomes and identical targets on both
/// sides.
pub fn conjugate_bases(d: usize, eps: f64) -> Result<WitnessSpec> {
    if d < 2 {
        return Err(Error::param("conjugate_bases requires d >= 2"));
    }
    let comp: Vec<PureState> = (0..d).map(|i| PureState::basis_state(d, i)).collect();
    let four = fourier_basis(d)?;
    let targets = vec![Measurement::from_basis(&comp)?, Measurement::from_basis(&four)?];
    let mut coeffs = vec![0.0; 2 * 2 * d * d];
    for x in 0..2 {
        for i in 0..d {
            coeffs[((x * 2 + x) * d + i) * d + i] = 1.0;
        }
    }
    let mut spec = WitnessSpec::new(
        format!("conjugate-bases({d})"),
        d,
        coeffs,
        targets.clone(),
        targets,
        d,
        InaccuracyBudget::uniform(2, 2, eps)?,
    )?;
    spec.ideal_sep_bound = Some(1.0 + 1.0 / d as f64);
    spec.algebraic_max = Some(2.0);
    Ok(spec)
}

/// Bloch-operator family: n two-outcome settings whose targets bin each
/// Gell-Mann element into its positive eigenspace projector and complement,
/// with outcome weights (ν_max, ν_min) so the weighted expectation matches
/// ⟨λ_i ⊗ λ̄_i⟩ on states supported in the extreme eigenspaces. Exact for
/// d = 2 where every element is ±1-valued.
pub fn bloch_family(d: usize, n: usize, eps: f64) -> Result<WitnessSpec> {
    if d < 2 || n < 1 || n > d * d - 1 {
        return Err(Error::param(format!("invalid bloch family (d={d}, n={n})")));
    }
    let basis = gell_mann_basis(d)?;
    let mut targets_a = Vec::with_capacity(n);
    let mut targets_b = Vec::with_capacity(n);
    let mut weights = Vec::with_capacity(n);
    for i in 0..n {
        let lam = basis.hermitian_element(i)?;
        let (w, _) = crate::linalg::eigh(&lam)?;
        let nu_min = w[0];
        let nu_max = w[w.len() - 1];
        let pos = lam.positive_part_projector(1e-12);
        let neg = HermitianOperator::identity(d).sub(&pos);
        targets_a.push(Measurement::new(vec![pos, neg])?);
        let lam_conj = HermitianOperator::new(basis.element(i).conj())?;
        let pos_c = lam_conj.positive_part_projector(1e-12);
        let neg_c = HermitianOperator::identity(d).sub(&pos_c);
        targets_b.push(Measurement::new(vec![pos_c, neg_c])?);
        weights.push((nu_max, nu_min));
    }
    let mut coeffs = vec![0.0; n * n * 4];
    for (x, &(nu_max, nu_min)) in weights.iter().enumerate() {
        let w = [nu_max, nu_min];
        for a in 0..2 {
            for b in 0..2 {
                coeffs[((x * n + x) * 2 + a) * 2 + b] = w[a] * w[b];
            }
        }
    }
    let mut spec = WitnessSpec::new(
        format!("bloch-family({d},{n})"),
        d,
        coeffs,
        targets_a,
        targets_b,
        2,
        InaccuracyBudget::uniform(n, n, eps)?,
    )?;
    if d == 2 {
        spec.ideal_sep_bound = Some(1.0);
    }
    spec.metadata = format!(
        "two-outcome binning of Gell-Mann elements: outcome 1 = positive-part \
         projector, outcome weights (nu_max, nu_min) per element; exact for d=2, \
         an extreme-eigenspace approximation of <lambda_i x conj(lambda_i)> for d={d}"
    );
    Ok(spec)
}

/// Builtin catalog lookup by name: `pauli2`, `pauli3`, `chsh`,
/// `conjugate-bases` (needs d), `bloch` (needs d, n).
pub fn builtin_spec(name: &str, d: usize, n: usize, eps: f64) -> Result<WitnessSpec> {
    match name {
        "pauli2" => pauli2(eps),
        "pauli3" => pauli3(eps),
        "chsh" => chsh(eps),
        "conjugate-bases" => conjugate_bases(d, eps),
        "bloch" | "bloch-family" => bloch_family(d, n, eps),
        other => Err(Error::param(format!("unknown witness '{other}'"))),
    }
}

// ---------------------------------------------------------------------------
// JSON spec format: explicit matrices (row-major re/im pairs), coefficient
// tensor nested (x, y, a, b).
// ---------------------------------------------------------------------------

#[derive(Serialize, Deserialize)]
struct MatrixJson(Vec<[f64; 2]>);

impl MatrixJson {
    fn from_matrix(m: &ComplexMatrix) -> Self {
        MatrixJson(m.entries().iter().map(|z| [z.re, z.im]).collect())
    }

    fn to_matrix(&self, dim: usize) -> Result<ComplexMatrix> {
        ComplexMatrix::from_entries(
            dim,
            dim,
            self.0.iter().map(|&[re, im]| Complex64::new(re, im)).collect(),
        )
    }
}

/// Serialized measurement: declared dimension, outcome count, one matrix per
/// effect.
#[derive(Serialize, Deserialize)]
pub struct MeasurementJson {
    pub d: usize,
    pub o: usize,
    effects: Vec<MatrixJson>,
}

impl MeasurementJson {
    pub fn from_measurement(m: &Measurement) -> Self {
        MeasurementJson {
            d: m.dim(),
            o: m.outcomes(),
            effects: m
                .effects()
                .iter()
                .map(|e| MatrixJson::from_matrix(e.matrix()))
                .collect(),
        }
    }

    pub fn to_measurement(&self) -> Result<Measurement> {
        if self.effects.len() != self.o {
            return Err(Error::dim("effect count", self.effects.len(), self.o));
        }
        let effects = self
            .effects
            .iter()
            .map(|m| HermitianOperator::new(m.to_matrix(self.d)?))
            .collect::<Result<Vec<_>>>()?;
        Measurement::new(effects)
    }
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct WitnessSpecJson {
    name: String,
    d: usize,
    x_settings: usize,
    y_settings: usize,
    o: usize,
    /// coeffs[x][y][a][b]
    coeffs: Vec<Vec<Vec<Vec<f64>>>>,
    targets_a: Vec<MeasurementJson>,
    targets_b: Vec<MeasurementJson>,
    eps_a: Vec<f64>,
    eps_b: Vec<f64>,
    #[serde(default)]
    ideal_sep_bound: Option<f64>,
    #[serde(default)]
    algebraic_max: Option<f64>,
    #[serde(default)]
    metadata: String,
}

impl WitnessSpec {
    pub fn to_json(&self) -> Result<String> {
        let coeffs: Vec<Vec<Vec<Vec<f64>>>> = (0..self.x_settings)
            .map(|x| {
                (0..self.y_settings)
                    .map(|y| {
                        (0..self.o)
                            .map(|a| (0..self.o).map(|b| self.coeff(a, b, x, y)).collect())
                            .collect()
                    })
                    .collect()
            })
            .collect();
        let file = WitnessSpecJson {
            name: self.name.clone(),
            d: self.d,
            x_settings: self.x_settings,
            y_settings: self.y_settings,
            o: self.o,
            coeffs,
            targets_a: self
                .targets_a
                .iter()
                .map(MeasurementJson::from_measurement)
                .collect(),
            targets_b: self
                .targets_b
                .iter()
                .map(MeasurementJson::from_measurement)
                .collect(),
            eps_a: self.budget.eps_a.clone(),
            eps_b: self.budget.eps_b.clone(),
            ideal_sep_bound: self.ideal_sep_bound,
            algebraic_max: self.algebraic_max,
            metadata: self.metadata.clone(),
        };
        Ok(serde_json::to_string_pretty(&file)?)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let file: WitnessSpecJson = serde_json::from_str(text)?;
        let mut coeffs = vec![0.0; file.x_settings * file.y_settings * file.o * file.o];
        if file.coeffs.len() != file.x_settings {
            return Err(Error::dim("coeff x nesting", file.coeffs.len(), file.x_settings));
        }
        for (x, per_y) in file.coeffs.iter().enumerate() {
            if per_y.len() != file.y_settings {
                return Err(Error::dim("coeff y nesting", per_y.len(), file.y_settings));
            }
            for (y, per_a) in per_y.iter().enumerate() {
                if per_a.len() != file.o {
                    return Err(Error::dim("coeff a nesting", per_a.len(), file.o));
                }
                for (a, per_b) in per_a.iter().enumerate() {
                    if per_b.len() != file.o {
                        return Err(Error::dim("coeff b nesting", per_b.len(), file.o));
                    }
                    for (b, &c) in per_b.iter().enumerate() {
                        coeffs[((x * file.y_settings + y) * file.o + a) * file.o + b] = c;
                    }
                }
            }
        }
        let targets_a = file
            .targets_a
            .iter()
            .map(|m| m.to_measurement())
            .collect::<Result<Vec<_>>>()?;
        let targets_b = file
            .targets_b
            .iter()
            .map(|m| m.to_measurement())
            .collect::<Result<Vec<_>>>()?;
        let mut spec = WitnessSpec::new(
            file.name,
            file.d,
            coeffs,
            targets_a,
            targets_b,
            file.o,
            InaccuracyBudget::new(file.eps_a, file.eps_b)?,
        )?;
        spec.ideal_sep_bound = file.ideal_sep_bound;
        spec.algebraic_max = file.algebraic_max;
        spec.metadata = file.metadata;
        Ok(spec)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{eigh, random_pure_state};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn phi_plus() -> DensityMatrix {
        PureState::max_entangled(2).to_density()
    }

    #[test]
    fn born_perfect_correlation() {
        let spec = conjugate_bases(2, 0.0).unwrap();
        let comp = &spec.targets_a[0];
        let corr = born(&phi_plus(), &[comp.clone()], &[comp.clone()]).unwrap();
        for a in 0..2 {
            for b in 0..2 {
                let expect = if a == b { 0.5 } else { 0.0 };
                assert!((corr.prob(a, b, 0, 0) - expect).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn born_maximally_mixed() {
        let spec = pauli2(0.0).unwrap();
        let rho = DensityMatrix::maximally_mixed(4);
        let corr = born(&rho, &spec.targets_a, &spec.targets_b).unwrap();
        for x in 0..2 {
            for y in 0..2 {
                for a in 0..2 {
                    for b in 0..2 {
                        assert!((corr.prob(a, b, x, y) - 0.25).abs() < 1e-12);
                    }
                }
            }
        }
    }

    #[test]
    fn pauli2_on_phi_plus_is_two() {
        let spec = pauli2(0.0).unwrap();
        let corr = born(&phi_plus(), &spec.targets_a, &spec.targets_b).unwrap();
        let w = evaluate(&spec, &corr).unwrap();
        assert!((w - 2.0).abs() < 1e-12, "W = {w}");
    }

    #[test]
    fn chsh_optimal_state_reaches_tsirelson() {
        let spec = chsh(0.0).unwrap();
        let bell = bell_operator(&spec, &spec.targets_a, &spec.targets_b).unwrap();
        let (w, v) = eigh(&bell).unwrap();
        let top = w[w.len() - 1];
        assert!((top - 2.0 * std::f64::consts::SQRT_2).abs() < 1e-9);
        let amps: Vec<Complex64> = (0..4).map(|i| v[(i, 3)]).collect();
        let rho = PureState::new(amps).unwrap().to_density();
        let corr = born(&rho, &spec.targets_a, &spec.targets_b).unwrap();
        let val = evaluate(&spec, &corr).unwrap();
        assert!((val - 2.0 * std::f64::consts::SQRT_2).abs() < 1e-9);
    }

    #[test]
    fn bell_operator_matches_born_evaluation() {
        let mut rng = ChaCha8Rng::seed_from_u64(31);
        let spec = chsh(0.0).unwrap();
        for _ in 0..20 {
            let rho = random_pure_state(4, &mut rng).to_density();
            let ma: Vec<Measurement> = (0..2)
                .map(|_| crate::linalg::random_povm(2, 2, &mut rng))
                .collect();
            let mb: Vec<Measurement> = (0..2)
                .map(|_| crate::linalg::random_povm(2, 2, &mut rng))
                .collect();
            let bell = bell_operator(&spec, &ma, &mb).unwrap();
            let direct = rho.expectation(&bell).unwrap();
            let via_born = evaluate(&spec, &born(&rho, &ma, &mb).unwrap()).unwrap();
            assert!((direct - via_born).abs() < 1e-10);
        }
    }

    #[test]
    fn conjugate_bases_d2_on_phi_plus() {
        let spec = conjugate_bases(2, 0.0).unwrap();
        let corr = born(&phi_plus(), &spec.targets_a, &spec.targets_b).unwrap();
        let w = evaluate(&spec, &corr).unwrap();
        assert!((w - 2.0).abs() < 1e-12, "W = {w}");
    }

    #[test]
    fn separable_states_respect_ideal_bounds() {
        let mut rng = ChaCha8Rng::seed_from_u64(32);
        let specs = vec![
            pauli2(0.0).unwrap(),
            pauli3(0.0).unwrap(),
            chsh(0.0).unwrap(),
            conjugate_bases(2, 0.0).unwrap(),
            conjugate_bases(3, 0.0).unwrap(),
            bloch_family(2, 3, 0.0).unwrap(),
        ];
        for spec in &specs {
            let bound = spec.ideal_sep_bound.unwrap();
            for _ in 0..100 {
                let phi = random_pure_state(spec.d, &mut rng);
                let psi = random_pure_state(spec.d, &mut rng);
                let rho = phi.tensor(&psi).to_density();
                let corr = born(&rho, &spec.targets_a, &spec.targets_b).unwrap();
                let w = evaluate(&spec, &corr).unwrap();
                assert!(
                    w <= bound + 1e-9,
                    "{}: product state hit {w} above bound {bound}",
                    spec.name
                );
            }
        }
    }

    #[test]
    fn bell_operator_hermitian() {
        let spec = pauli3(0.0).unwrap();
        let bell = bell_operator(&spec, &spec.targets_a, &spec.targets_b).unwrap();
        assert!(bell.matrix().hermiticity_deviation() < 1e-12);
    }

    #[test]
    fn side_objectives_reproduce_witness_value() {
        let mut rng = ChaCha8Rng::seed_from_u64(33);
        let spec = conjugate_bases(3, 0.0).unwrap();
        let rho = random_pure_state(9, &mut rng).to_density();
        let ma: Vec<Measurement> = (0..2).map(|_| crate::linalg::random_povm(3, 3, &mut rng)).collect();
        let mb: Vec<Measurement> = (0..2).map(|_| crate::linalg::random_povm(3, 3, &mut rng)).collect();
        let w = evaluate(&spec, &born(&rho, &ma, &mb).unwrap()).unwrap();
        let phis = side_a_objectives(&spec, &mb, &rho).unwrap();
        let mut acc = 0.0;
        for (x, per_a) in phis.iter().enumerate() {
            for (a, phi) in per_a.iter().enumerate() {
                acc += crate::linalg::trace_product(ma[x].effect(a), phi).unwrap();
            }
        }
        assert!((acc - w).abs() < 1e-10);
        let psis = side_b_objectives(&spec, &ma, &rho).unwrap();
        let mut acc_b = 0.0;
        for (y, per_b) in psis.iter().enumerate() {
            for (b, psi) in per_b.iter().enumerate() {
                acc_b += crate::linalg::trace_product(mb[y].effect(b), psi).unwrap();
            }
        }
        assert!((acc_b - w).abs() < 1e-10);
    }

    #[test]
    fn spec_json_round_trip() {
        let spec = chsh(0.02).unwrap();
        let text = spec.to_json().unwrap();
        let back = WitnessSpec::from_json(&text).unwrap();
        assert_eq!(back.name, "chsh");
        assert_eq!(back.d, 2);
        assert_eq!(back.o, 2);
        for x in 0..2 {
            for y in 0..2 {
                for a in 0..2 {
                    for b in 0..2 {
                        assert_eq!(back.coeff(a, b, x, y), spec.coeff(a, b, x, y));
                    }
                }
            }
        }
        assert_eq!(back.budget.eps_a, vec![0.02, 0.02]);
        // targets are preserved matrix-for-matrix
        for (t1, t2) in spec.targets_a.iter().zip(&back.targets_a) {
            for (e1, e2) in t1.effects().iter().zip(t2.effects()) {
                assert!(e1.sub(e2).matrix().frobenius_norm() < 1e-14);
            }
        }
    }

    #[test]
    fn unknown_witness_name() {
        assert!(builtin_spec("nope", 2, 1, 0.0).is_err());
    }

    #[test]
    fn bloch_family_d2_matches_pauli_order() {
        // first three Gell-Mann elements at d=2 are σ_X, σ_Y, σ_Z with ±1
        // weights, so the n=3 family equals the XX+YY+ZZ correlator with
        // conjugated side B
        let spec = bloch_family(2, 3, 0.0).unwrap();
        let phi = phi_plus();
        let corr = born(&phi, &spec.targets_a, &spec.targets_b).unwrap();
        let w = evaluate(&spec, &corr).unwrap();
        // ⟨λ⊗λ̄⟩ on φ⁺ equals 1 per element (Tr(λλ†)/d), so W = 3
        assert!((w - 3.0).abs() < 1e-10, "W = {w}");
    }
}
