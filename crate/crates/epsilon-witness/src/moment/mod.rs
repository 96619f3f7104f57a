//! Sampled tracial moment-matrix relaxation: upper bounds on the corrected
//! entangled and separable witness maxima. Moment matrices Γ(u;v) = Tr(uv†)
//! over monomial words in {1, ρ, lab effects, fixed targets} are sampled
//! from random d-dimensional strategies until they span the feasible moment
//! space; the relaxation then optimizes over affine combinations Σ s_iΓ^(i)
//! with Γ ⪰ 0, the fidelity floors per setting, and (separable mode) one or
//! more ideal-witness constraints.

mod words;

pub use words::{Side, Symbol, Word};

use std::collections::HashMap;

use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{
    eigh, kron, random_povm, random_projective_measurement, random_pure_state, ComplexMatrix,
    HermitianOperator, Measurement,
};
use crate::sdp::{BlockKind, LmiBlock, LmiProblem, SdpStatus};
use crate::witness::WitnessSpec;

/// The fixed operator roster of a scenario: the witness's own targets plus
/// optional extra target groups carrying additional ideal-witness
/// constraints. Targets are fixed for the lifetime of the list; only ρ and
/// the lab effects are resampled.
#[derive(Debug, Clone)]
pub struct OperatorList {
    pub spec: WitnessSpec,
    pub extra_targets: Vec<(Vec<Measurement>, Vec<Measurement>)>,
}

impl OperatorList {
    pub fn from_spec(spec: &WitnessSpec) -> Self {
        OperatorList {
            spec: spec.clone(),
            extra_targets: Vec::new(),
        }
    }

    pub fn with_extra_targets(
        mut self,
        targets_a: Vec<Measurement>,
        targets_b: Vec<Measurement>,
    ) -> Result<Self> {
        for t in targets_a.iter().chain(targets_b.iter()) {
            if t.dim() != self.spec.d {
                return Err(Error::dim("extra target dim", t.dim(), self.spec.d));
            }
            if !t.is_projective(1e-10) {
                return Err(Error::NotProjective {
                    deviation: t.projectivity_deviation(),
                    tol: 1e-10,
                });
            }
        }
        self.extra_targets.push((targets_a, targets_b));
        Ok(self)
    }

    fn symbols(&self) -> Vec<Symbol> {
        let spec = &self.spec;
        let mut out = vec![Symbol::Rho];
        for x in 0..spec.x_settings {
            for a in 0..spec.o {
                out.push(Symbol::Lab { side: Side::A, setting: x, outcome: a });
            }
        }
        for y in 0..spec.y_settings {
            for b in 0..spec.o {
                out.push(Symbol::Lab { side: Side::B, setting: y, outcome: b });
            }
        }
        for (group, (ta, tb)) in std::iter::once((&self.spec.targets_a, &self.spec.targets_b))
            .chain(self.extra_targets.iter().map(|(a, b)| (a, b)))
            .enumerate()
        {
            for (x, t) in ta.iter().enumerate() {
                for a in 0..t.outcomes() {
                    out.push(Symbol::Target { side: Side::A, setting: x, outcome: a, group });
                }
            }
            for (y, t) in tb.iter().enumerate() {
                for b in 0..t.outcomes() {
                    out.push(Symbol::Target { side: Side::B, setting: y, outcome: b, group });
                }
            }
        }
        out
    }
}

/// Which degree-≤k words enter the moment matrix. `Full` is every canonical
/// word; `Reduced` is the curated family that keeps the matrix small while
/// still expressing the objective, the fidelity floors and the
/// ideal-witness rows: {1} ∪ {symbols} ∪ {ρ·s} ∪ {same-setting lab·target
/// products on each side, both orders}, extended at level 3 by ρ-prefixed
/// products, same-setting lab·lab products and cross-side pairs.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum WordPolicy {
    Full,
    Reduced,
}

/// How lab measurements are drawn when sampling the moment span. `Povm`
/// covers every strategy the seesaw can certify and is the default;
/// `Projective` restricts to projective lab strategies, which is the
/// optimization the relaxation hierarchy is built around and gives much
/// tighter bounds (projectivity shortens lab words and its linear
/// consequences hold on the sampled span).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum SamplePolicy {
    Povm,
    Projective,
}

#[derive(Debug, Clone)]
pub struct MonomialList {
    pub level: usize,
    pub policy: WordPolicy,
    pub sample: SamplePolicy,
    pub words: Vec<Word>,
    index: HashMap<Word, usize>,
}

impl MonomialList {
    pub fn len(&self) -> usize {
        self.words.len()
    }

    pub fn is_empty(&self) -> bool {
        self.words.is_empty()
    }

    pub fn index_of(&self, w: &Word) -> Option<usize> {
        self.index.get(w).copied()
    }
}

fn push_word(
    words: &mut Vec<Word>,
    index: &mut HashMap<Word, usize>,
    raw: &[Symbol],
    projective_labs: bool,
) {
    if let Some(w) = words::canonicalize_with(raw, projective_labs) {
        if !index.contains_key(&w) {
            index.insert(w.clone(), words.len());
            words.push(w);
        }
    }
}

/// All monomials of degree at most `level` under the documented policy.
pub fn build_monomials(
    ops: &OperatorList,
    level: usize,
    policy: WordPolicy,
    sample: SamplePolicy,
) -> Result<MonomialList> {
    if level < 1 {
        return Err(Error::param("monomial level must be >= 1"));
    }
    let proj = sample == SamplePolicy::Projective;
    let symbols = ops.symbols();
    let mut words = Vec::new();
    let mut index = HashMap::new();
    push_word(&mut words, &mut index, &[], proj);
    for &s in &symbols {
        push_word(&mut words, &mut index, &[s], proj);
    }
    match policy {
        WordPolicy::Full => {
            let mut layer: Vec<Word> = words[1..].to_vec();
            for _deg in 2..=level {
                let mut next = Vec::new();
                for w in &layer {
                    for &s in &symbols {
                        let mut raw = w.0.clone();
                        raw.push(s);
                        if let Some(cw) = words::canonicalize_with(&raw, proj) {
                            if cw.degree() == raw.len() && !index.contains_key(&cw) {
                                index.insert(cw.clone(), words.len());
                                words.push(cw.clone());
                                next.push(cw);
                            }
                        }
                    }
                }
                layer = next;
            }
        }
        WordPolicy::Reduced => {
            if level >= 2 {
                for &s in &symbols {
                    if s != Symbol::Rho {
                        push_word(&mut words, &mut index, &[Symbol::Rho, s], proj);
                    }
                }
                for &s in &symbols {
                    for &t in &symbols {
                        match (s, t) {
                            // same-setting lab-target pairs, both orders
                            (
                                Symbol::Lab { side: ls, setting: lx, .. },
                                Symbol::Target { side: ts, setting: tx, .. },
                            ) if ls == ts && lx == tx => {
                                push_word(&mut words, &mut index, &[s, t], proj);
                                push_word(&mut words, &mut index, &[t, s], proj);
                                push_word(&mut words, &mut index, &[Symbol::Rho, s, t], proj);
                                push_word(&mut words, &mut index, &[Symbol::Rho, t, s], proj);
                            }
                            // same-setting lab-lab pairs
                            (
                                Symbol::Lab { side: s1, setting: x1, .. },
                                Symbol::Lab { side: s2, setting: x2, .. },
                            ) if s1 == s2 && x1 == x2 => {
                                push_word(&mut words, &mut index, &[s, t], proj);
                            }
                            // cross-side lab pairs, plain and state-weighted
                            (
                                Symbol::Lab { side: Side::A, .. },
                                Symbol::Lab { side: Side::B, .. },
                            ) => {
                                push_word(&mut words, &mut index, &[s, t], proj);
                                push_word(&mut words, &mut index, &[Symbol::Rho, s, t], proj);
                            }
                            _ => {}
                        }
                    }
                }
            }
            if level >= 3 {
                let degree2: Vec<Word> = words
                    .iter()
                    .filter(|w| w.degree() == 2 && w.0[0] != Symbol::Rho)
                    .cloned()
                    .collect();
                for w in &degree2 {
                    let mut raw = vec![Symbol::Rho];
                    raw.extend_from_slice(&w.0);
                    push_word(&mut words, &mut index, &raw, proj);
                }
                for &s in &symbols {
                    for &t in &symbols {
                        match (s, t) {
                            (
                                Symbol::Lab { side: s1, setting: x1, .. },
                                Symbol::Lab { side: s2, setting: x2, .. },
                            ) if s1 == s2 && x1 == x2 => {
                                push_word(&mut words, &mut index, &[s, t], proj);
                            }
                            (
                                Symbol::Lab { side: Side::A, .. },
                                Symbol::Lab { side: Side::B, .. },
                            ) => {
                                push_word(&mut words, &mut index, &[s, t], proj);
                            }
                            _ => {}
                        }
                    }
                }
            }
        }
    }
    Ok(MonomialList {
        level,
        policy,
        sample,
        words,
        index,
    })
}

/// One random strategy: pure global state and per-setting lab POVMs; targets
/// come from the operator list and are never resampled.
struct Strategy {
    rho: ComplexMatrix,
    labs_a: Vec<Measurement>,
    labs_b: Vec<Measurement>,
}

fn draw_strategy(ops: &OperatorList, sample: SamplePolicy, rng: &mut ChaCha8Rng) -> Strategy {
    let d = ops.spec.d;
    let rho = random_pure_state(d * d, rng).projector().into_matrix();
    let draw = |rng: &mut ChaCha8Rng| match sample {
        SamplePolicy::Povm => random_povm(d, ops.spec.o, rng),
        SamplePolicy::Projective => random_projective_measurement(d, ops.spec.o, rng),
    };
    let labs_a = (0..ops.spec.x_settings).map(|_| draw(rng)).collect();
    let labs_b = (0..ops.spec.y_settings).map(|_| draw(rng)).collect();
    Strategy { rho, labs_a, labs_b }
}

fn symbol_matrix(ops: &OperatorList, strat: &Strategy, s: Symbol) -> ComplexMatrix {
    let d = ops.spec.d;
    let eye = ComplexMatrix::identity(d);
    match s {
        Symbol::Rho => strat.rho.clone(),
        Symbol::Lab { side: Side::A, setting, outcome } => {
            kron(strat.labs_a[setting].effect(outcome).matrix(), &eye)
        }
        Symbol::Lab { side: Side::B, setting, outcome } => {
            kron(&eye, strat.labs_b[setting].effect(outcome).matrix())
        }
        Symbol::Target { side, setting, outcome, group } => {
            let (ta, tb) = if group == 0 {
                (&ops.spec.targets_a, &ops.spec.targets_b)
            } else {
                let (a, b) = &ops.extra_targets[group - 1];
                (a, b)
            };
            match side {
                Side::A => kron(ta[setting].effect(outcome).matrix(), &eye),
                Side::B => kron(&eye, tb[setting].effect(outcome).matrix()),
            }
        }
    }
}

fn word_matrices(ops: &OperatorList, ml: &MonomialList, strat: &Strategy) -> Vec<ComplexMatrix> {
    let d2 = ops.spec.d * ops.spec.d;
    ml.words
        .iter()
        .map(|w| {
            let mut m = ComplexMatrix::identity(d2);
            for &s in &w.0 {
                m = m.matmul(&symbol_matrix(ops, strat, s));
            }
            m
        })
        .collect()
}

/// Tracial moment matrix Γ(u;v) = Tr(u·v†) of one sampled strategy,
/// Hermitized.
pub fn sample_moment_matrix(
    ops: &OperatorList,
    ml: &MonomialList,
    rng: &mut ChaCha8Rng,
) -> ComplexMatrix {
    let strat = draw_strategy(ops, ml.sample, rng);
    moment_of_strategy(ops, ml, &strat)
}

fn moment_of_strategy(ops: &OperatorList, ml: &MonomialList, strat: &Strategy) -> ComplexMatrix {
    let mats = word_matrices(ops, ml, strat);
    let n = ml.len();
    let mut g = ComplexMatrix::zeros(n, n);
    for u in 0..n {
        for v in u..n {
            // Tr(M_u · M_v†) = ⟨M_v, M_u⟩_HS
            let val = mats[v].hs_inner(&mats[u]);
            g[(u, v)] = val;
            g[(v, u)] = val.conj();
        }
    }
    g
}

/// Span basis of sampled moment matrices with the termination certificate.
#[derive(Debug, Clone)]
pub struct MomentBasis {
    pub gammas: Vec<ComplexMatrix>,
    pub m: usize,
    /// relative residual of the last (dependent) samples
    pub termination_residual: f64,
    pub complete: bool,
    pub draws: usize,
}

fn vectorize_hermitian(g: &ComplexMatrix) -> Vec<f64> {
    let n = g.rows();
    let mut out = Vec::with_capacity(n * n);
    for i in 0..n {
        out.push(g[(i, i)].re);
    }
    for i in 0..n {
        for j in (i + 1)..n {
            out.push(g[(i, j)].re);
            out.push(g[(i, j)].im);
        }
    }
    out
}

const SPAN_RESIDUAL_TOL: f64 = 1e-7;
const DEPENDENT_RUN: usize = 3;

/// Sample until three consecutive draws fall inside the span of the
/// collected matrices (relative residual below 1e-7). Draws are indexed and
/// processed in order, so the basis is reproducible for a given seed.
pub fn build_basis(
    ops: &OperatorList,
    ml: &MonomialList,
    seed: u64,
    max_samples: usize,
) -> Result<MomentBasis> {
    let mut gammas: Vec<ComplexMatrix> = Vec::new();
    let mut ortho: Vec<Vec<f64>> = Vec::new();
    let mut dependent_run = 0;
    let mut last_residual = f64::INFINITY;
    let mut draw_idx = 0usize;
    const BATCH: usize = 8;
    while draw_idx < max_samples {
        let base = draw_idx;
        let batch: Vec<ComplexMatrix> = (0..BATCH.min(max_samples - base))
            .into_par_iter()
            .map(|k| {
                let mut rng =
                    ChaCha8Rng::seed_from_u64(seed.wrapping_add((base + k) as u64 * 0x9E37));
                sample_moment_matrix(ops, ml, &mut rng)
            })
            .collect();
        for g in batch {
            draw_idx += 1;
            let mut v = vectorize_hermitian(&g);
            let norm0 = v.iter().map(|x| x * x).sum::<f64>().sqrt().max(1e-300);
            for _pass in 0..2 {
                for q in &ortho {
                    let proj: f64 = q.iter().zip(&v).map(|(a, b)| a * b).sum();
                    for (x, qv) in v.iter_mut().zip(q) {
                        *x -= proj * qv;
                    }
                }
            }
            let res = v.iter().map(|x| x * x).sum::<f64>().sqrt() / norm0;
            if res < SPAN_RESIDUAL_TOL {
                dependent_run += 1;
                last_residual = res;
                if dependent_run >= DEPENDENT_RUN {
                    return Ok(MomentBasis {
                        m: gammas.len(),
                        gammas,
                        termination_residual: last_residual,
                        complete: true,
                        draws: draw_idx,
                    });
                }
            } else {
                dependent_run = 0;
                let norm = v.iter().map(|x| x * x).sum::<f64>().sqrt();
                for x in &mut v {
                    *x /= norm;
                }
                ortho.push(v);
                gammas.push(g);
            }
        }
    }
    Ok(MomentBasis {
        m: gammas.len(),
        gammas,
        termination_residual: last_residual,
        complete: false,
        draws: draw_idx,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum MomentMode {
    Entangled,
    Separable,
}

/// An ideal-witness constraint for separable mode: the scenario's
/// coefficient tensor evaluated on the given target group must not exceed
/// the ideal separable bound.
#[derive(Debug, Clone, Copy)]
pub struct IdealWitnessConstraint {
    pub target_group: usize,
    pub bound: f64,
}

#[derive(Debug, Clone)]
pub struct RelaxationOutcome {
    pub upper_bound: f64,
    pub status: SdpStatus,
    pub affine_weights: Vec<f64>,
    pub duality_gap: f64,
    pub monomials_n: usize,
    pub basis_size_m: usize,
    pub reduced_rank: usize,
}

struct ScalarData {
    obj: Vec<f64>,
    fid_a: Vec<Vec<f64>>,
    fid_b: Vec<Vec<f64>>,
}

fn require_word(ml: &MonomialList, raw: &[Symbol]) -> Result<usize> {
    let w = words::canonicalize_with(raw, ml.sample == SamplePolicy::Projective)
        .ok_or_else(|| Error::param("required monomial annihilates"))?;
    ml.index_of(&w)
        .ok_or_else(|| Error::param(format!("monomial list is missing required word {w:?}")))
}

/// Per-sample scalar functionals: objective Σc·Γ(ρA;B) and the per-setting
/// fidelity rows (1/d²)ΣΓ(A;Ã).
fn scalar_data(ops: &OperatorList, ml: &MonomialList, basis: &MomentBasis) -> Result<ScalarData> {
    let spec = &ops.spec;
    let d2 = (spec.d * spec.d) as f64;
    let mut obj = vec![0.0; basis.m];
    for x in 0..spec.x_settings {
        for y in 0..spec.y_settings {
            for a in 0..spec.o {
                for b in 0..spec.o {
                    let c = spec.coeff(a, b, x, y);
                    if c == 0.0 {
                        continue;
                    }
                    let row = require_word(
                        ml,
                        &[Symbol::Rho, Symbol::Lab { side: Side::A, setting: x, outcome: a }],
                    )?;
                    let col = require_word(
                        ml,
                        &[Symbol::Lab { side: Side::B, setting: y, outcome: b }],
                    )?;
                    for (i, g) in basis.gammas.iter().enumerate() {
                        obj[i] += c * g[(row, col)].re;
                    }
                }
            }
        }
    }
    let mut fid_a = Vec::with_capacity(spec.x_settings);
    for x in 0..spec.x_settings {
        let mut row_vals = vec![0.0; basis.m];
        for a in 0..spec.o {
            let row = require_word(ml, &[Symbol::Lab { side: Side::A, setting: x, outcome: a }])?;
            let col = require_word(
                ml,
                &[Symbol::Target { side: Side::A, setting: x, outcome: a, group: 0 }],
            )?;
            for (i, g) in basis.gammas.iter().enumerate() {
                row_vals[i] += g[(row, col)].re / d2;
            }
        }
        fid_a.push(row_vals);
    }
    let mut fid_b = Vec::with_capacity(spec.y_settings);
    for y in 0..spec.y_settings {
        let mut row_vals = vec![0.0; basis.m];
        for b in 0..spec.o {
            let row = require_word(ml, &[Symbol::Lab { side: Side::B, setting: y, outcome: b }])?;
            let col = require_word(
                ml,
                &[Symbol::Target { side: Side::B, setting: y, outcome: b, group: 0 }],
            )?;
            for (i, g) in basis.gammas.iter().enumerate() {
                row_vals[i] += g[(row, col)].re / d2;
            }
        }
        fid_b.push(row_vals);
    }
    Ok(ScalarData { obj, fid_a, fid_b })
}

fn witness_row(
    ops: &OperatorList,
    ml: &MonomialList,
    basis: &MomentBasis,
    group: usize,
) -> Result<Vec<f64>> {
    let spec = &ops.spec;
    let mut row = vec![0.0; basis.m];
    for x in 0..spec.x_settings {
        for y in 0..spec.y_settings {
            for a in 0..spec.o {
                for b in 0..spec.o {
                    let c = spec.coeff(a, b, x, y);
                    if c == 0.0 {
                        continue;
                    }
                    let r = require_word(
                        ml,
                        &[
                            Symbol::Rho,
                            Symbol::Target { side: Side::A, setting: x, outcome: a, group },
                        ],
                    )?;
                    let col = require_word(
                        ml,
                        &[Symbol::Target { side: Side::B, setting: y, outcome: b, group }],
                    )?;
                    for (i, g) in basis.gammas.iter().enumerate() {
                        row[i] += c * g[(r, col)].re;
                    }
                }
            }
        }
    }
    Ok(row)
}

/// Relative eigenvalue threshold for the facial compression of the sampled
/// span. Compression can only weaken the bound, never invalidate it.
const RANK_TOL: f64 = 1e-9;

/// Certified upper bound on the witness maximum at the budget stored in the
/// operator list's scenario. Separable mode adds one ideal-witness row per
/// supplied constraint.
pub fn upper_bound(
    ops: &OperatorList,
    ml: &MonomialList,
    basis: &MomentBasis,
    mode: MomentMode,
    witness_constraints: &[IdealWitnessConstraint],
) -> Result<RelaxationOutcome> {
    if !basis.complete {
        return Err(Error::IncompleteBasis { samples: basis.draws });
    }
    if basis.m == 0 {
        return Err(Error::param("empty moment basis"));
    }
    let n = ml.len();
    let spec = &ops.spec;

    // facial compression onto the range of the average sample
    let mut avg = ComplexMatrix::zeros(n, n);
    for g in &basis.gammas {
        avg = avg.add(g);
    }
    avg = avg.scale(Complex64::new(1.0 / basis.m as f64, 0.0));
    let (w, v) = eigh(&HermitianOperator::symmetrize(avg))?;
    let wmax = w[n - 1].max(1e-300);
    let rank = w.iter().filter(|&&x| x > RANK_TOL * wmax).count();
    let lo = n - rank;
    let reduce = |g: &ComplexMatrix| -> ComplexMatrix {
        let mut qg = ComplexMatrix::zeros(n, rank);
        for i in 0..n {
            for c in 0..rank {
                let mut acc = Complex64::new(0.0, 0.0);
                for k in 0..n {
                    acc += g[(i, k)] * v[(k, lo + c)];
                }
                qg[(i, c)] = acc;
            }
        }
        let mut out = ComplexMatrix::zeros(rank, rank);
        for r in 0..rank {
            for c in 0..rank {
                let mut acc = Complex64::new(0.0, 0.0);
                for k in 0..n {
                    acc += v[(k, lo + r)].conj() * qg[(k, c)];
                }
                out[(r, c)] = acc;
            }
        }
        out.add(&out.adjoint()).scale(Complex64::new(0.5, 0.0))
    };
    let reduced: Vec<ComplexMatrix> = basis.gammas.par_iter().map(reduce).collect();

    let scalars = scalar_data(ops, ml, basis)?;
    // an exactly saturated fidelity floor (ε = 0) leaves the feasible set
    // without interior; the floor below opens it by a width that moves the
    // optimum far less than the reporting tolerances
    const EPS_FLOOR: f64 = 1e-8;
    let mut ge_rows = Vec::new();
    for (x, row) in scalars.fid_a.iter().enumerate() {
        ge_rows.push((row.clone(), 1.0 - spec.budget.eps_a[x].max(EPS_FLOOR)));
    }
    for (y, row) in scalars.fid_b.iter().enumerate() {
        ge_rows.push((row.clone(), 1.0 - spec.budget.eps_b[y].max(EPS_FLOOR)));
    }
    // probability positivity: every entry Γ(ρ·L_a; R_b) = Tr[ρ(L⊗R)] of a
    // quantum strategy is nonnegative, for lab and target effects alike
    let groups = ops.extra_targets.len() + 1;
    let mut side_a_rows: Vec<Symbol> = Vec::new();
    let mut side_b_cols: Vec<Symbol> = Vec::new();
    for x in 0..spec.x_settings {
        for a in 0..spec.o {
            side_a_rows.push(Symbol::Lab { side: Side::A, setting: x, outcome: a });
        }
    }
    for y in 0..spec.y_settings {
        for b in 0..spec.o {
            side_b_cols.push(Symbol::Lab { side: Side::B, setting: y, outcome: b });
        }
    }
    for group in 0..groups {
        let (ta, tb) = if group == 0 {
            (&spec.targets_a, &spec.targets_b)
        } else {
            let (a, b) = &ops.extra_targets[group - 1];
            (a, b)
        };
        for (x, t) in ta.iter().enumerate() {
            for a in 0..t.outcomes() {
                side_a_rows.push(Symbol::Target { side: Side::A, setting: x, outcome: a, group });
            }
        }
        for (y, t) in tb.iter().enumerate() {
            for b in 0..t.outcomes() {
                side_b_cols.push(Symbol::Target { side: Side::B, setting: y, outcome: b, group });
            }
        }
    }
    for &l in &side_a_rows {
        for &r in &side_b_cols {
            let row_idx = require_word(ml, &[Symbol::Rho, l])?;
            let col_idx = require_word(ml, &[r])?;
            let row: Vec<f64> = basis
                .gammas
                .iter()
                .map(|g| g[(row_idx, col_idx)].re)
                .collect();
            ge_rows.push((row, 0.0));
        }
    }
    // Σ_a Tr(A_a²) ≤ Σ_a Tr(A_a) = d for every POVM, i.e.
    // Σ_a Γ(A_a; A_a) ≤ d² per setting; this is the row that lets a
    // saturated fidelity floor pin the lab rows to the target rows
    let mut le_rows = Vec::new();
    let d2f = (spec.d * spec.d) as f64;
    for x in 0..spec.x_settings {
        let idx: Vec<usize> = (0..spec.o)
            .map(|a| require_word(ml, &[Symbol::Lab { side: Side::A, setting: x, outcome: a }]))
            .collect::<Result<_>>()?;
        let row: Vec<f64> = basis
            .gammas
            .iter()
            .map(|g| idx.iter().map(|&u| g[(u, u)].re).sum())
            .collect();
        le_rows.push((row, d2f));
    }
    for y in 0..spec.y_settings {
        let idx: Vec<usize> = (0..spec.o)
            .map(|b| require_word(ml, &[Symbol::Lab { side: Side::B, setting: y, outcome: b }]))
            .collect::<Result<_>>()?;
        let row: Vec<f64> = basis
            .gammas
            .iter()
            .map(|g| idx.iter().map(|&u| g[(u, u)].re).sum())
            .collect();
        le_rows.push((row, d2f));
    }
    // diagonal compactification: every symbol matrix has operator norm at
    // most one, so Γ(u;u) = ‖M_u‖²_HS ≤ d² for any word and ≤ 1 for words
    // containing the pure state. These rows hold for every quantum strategy
    // and remove the recession directions of the affine span.
    for (u, word) in ml.words.iter().enumerate() {
        let cap = if word.0.contains(&Symbol::Rho) { 1.0 } else { d2f };
        let row: Vec<f64> = basis.gammas.iter().map(|g| g[(u, u)].re).collect();
        le_rows.push((row, cap));
    }
    if mode == MomentMode::Separable {
        if witness_constraints.is_empty() {
            return Err(Error::param(
                "separable mode needs at least one ideal-witness constraint",
            ));
        }
        for wc in witness_constraints {
            if wc.target_group > ops.extra_targets.len() {
                return Err(Error::param(format!(
                    "target group {} does not exist",
                    wc.target_group
                )));
            }
            le_rows.push((witness_row(ops, ml, basis, wc.target_group)?, wc.bound));
        }
    }

    let lmi = LmiProblem {
        num_vars: basis.m,
        objective: scalars.obj.clone(),
        blocks: vec![LmiBlock {
            kind: BlockKind::ComplexHermitian,
            dim: rank,
            g0: ComplexMatrix::zeros(rank, rank),
            gs: reduced,
        }],
        eqs: vec![(vec![1.0; basis.m], 1.0)],
        ge_rows,
        le_rows,
    };
    // retry with relaxed tolerances when the boundary geometry defeats the
    // tightest solve
    let mut last_err = None;
    for tol in [crate::sdp::DEFAULT_TOL, 1e-7, 1e-6] {
        match lmi.solve(tol, crate::sdp::DEFAULT_MAX_ITERS) {
            Ok(sol) if sol.status == SdpStatus::Optimal => {
                return Ok(RelaxationOutcome {
                    upper_bound: sol.upper_bound,
                    status: sol.status,
                    affine_weights: sol.s,
                    duality_gap: sol.duality_gap,
                    monomials_n: n,
                    basis_size_m: basis.m,
                    reduced_rank: rank,
                });
            }
            Ok(sol) => {
                last_err = Some(Error::Sdp(format!(
                    "moment relaxation returned {:?}",
                    sol.status
                )));
            }
            Err(e) => last_err = Some(e),
        }
    }
    Err(last_err.unwrap_or_else(|| Error::Sdp("moment relaxation failed".into())))
}

/// One row of the upper-bound sweep.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Fig2Row {
    pub witness: String,
    pub eps: f64,
    pub level: usize,
    pub mode: String,
    pub upper_bound: f64,
    pub duality_gap: f64,
    pub basis_size_m: usize,
    pub monomials_n: usize,
    /// analytic closed-form bound at the same ε for the dashed overlay
    pub analytic: f64,
}

/// Config for [`fig2_experiment`].
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Fig2Config {
    pub level: usize,
    pub seed: u64,
    pub max_samples: usize,
}

impl Default for Fig2Config {
    fn default() -> Self {
        Fig2Config {
            level: 2,
            seed: 1,
            max_samples: 4000,
        }
    }
}

/// Separable-mode upper-bound curves for the requested witnesses with the
/// single ideal-witness constraint W ≤ W_sep(0) each, alongside the analytic
/// corrected bounds. The basis is sampled once per witness and reused across
/// the ε grid (only the constraint right-hand sides move with ε).
pub fn fig2_experiment(
    witnesses: &[&str],
    eps_grid: &[f64],
    cfg: &Fig2Config,
) -> Result<Vec<Fig2Row>> {
    let mut rows = Vec::new();
    for &name in witnesses {
        let spec0 = crate::witness::builtin_spec(name, 2, 1, 0.0)?;
        let ideal = spec0
            .ideal_sep_bound
            .ok_or_else(|| Error::param(format!("witness {name} has no ideal bound")))?;
        let ops0 = OperatorList::from_spec(&spec0);
        let ml = build_monomials(&ops0, cfg.level, WordPolicy::Reduced, SamplePolicy::Projective)?;
        let basis = build_basis(&ops0, &ml, cfg.seed, cfg.max_samples)?;
        for &eps in eps_grid {
            let spec = crate::witness::builtin_spec(name, 2, 1, eps)?;
            let ops = OperatorList { spec, extra_targets: Vec::new() };
            let out = upper_bound(
                &ops,
                &ml,
                &basis,
                MomentMode::Separable,
                &[IdealWitnessConstraint { target_group: 0, bound: ideal }],
            )?;
            let analytic = match name {
                "pauli2" => crate::analytic::simplest_qubit_sep_bound(eps)?.value,
                "pauli3" => crate::analytic::three_pauli_sep_bound(eps)?.value,
                "chsh" => crate::analytic::chsh_sep_model(eps)?.value,
                _ => f64::NAN,
            };
            rows.push(Fig2Row {
                witness: name.to_string(),
                eps,
                level: cfg.level,
                mode: "separable".into(),
                upper_bound: out.upper_bound,
                duality_gap: out.duality_gap,
                basis_size_m: out.basis_size_m,
                monomials_n: out.monomials_n,
                analytic,
            });
        }
    }
    Ok(rows)
}
