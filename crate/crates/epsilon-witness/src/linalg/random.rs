//! Haar-random sampling of unitaries, states and measurements.
//!
//! All sampling flows through an explicitly passed generator so experiments
//! are bit-reproducible.

use num_complex::Complex64;
use rand::Rng;

use super::{eigh, ComplexMatrix, HermitianOperator, Measurement, PureState};

/// One standard normal deviate via Box-Muller.
fn standard_normal<R: Rng>(rng: &mut R) -> f64 {
    let u1: f64 = loop {
        let u = rng.gen::<f64>();
        if u > 0.0 {
            break u;
        }
    };
    let u2: f64 = rng.gen();
    (-2.0 * u1.ln()).sqrt() * (2.0 * std::f64::consts::PI * u2).cos()
}

fn complex_gaussian<R: Rng>(rng: &mut R) -> Complex64 {
    Complex64::new(standard_normal(rng), standard_normal(rng)) * std::f64::consts::FRAC_1_SQRT_2
}

/// Matrix of i.i.d. standard complex Gaussians.
pub(crate) fn ginibre<R: Rng>(rows: usize, cols: usize, rng: &mut R) -> ComplexMatrix {
    let entries = (0..rows * cols).map(|_| complex_gaussian(rng)).collect();
    ComplexMatrix::from_entries(rows, cols, entries).unwrap()
}

/// Haar-random unitary: QR of a Ginibre matrix. Modified Gram-Schmidt with a
/// re-orthogonalization pass leaves R with a positive real diagonal, which is
/// exactly the phase convention that makes Q Haar-distributed.
pub fn haar_random_unitary<R: Rng>(dim: usize, rng: &mut R) -> ComplexMatrix {
    assert!(dim >= 1);
    let g = ginibre(dim, dim, rng);
    let mut cols: Vec<Vec<Complex64>> = (0..dim)
        .map(|j| (0..dim).map(|i| g[(i, j)]).collect())
        .collect();
    for j in 0..dim {
        for _pass in 0..2 {
            for i in 0..j {
                let proj: Complex64 = cols[i]
                    .iter()
                    .zip(cols[j].iter())
                    .map(|(a, b)| a.conj() * b)
                    .sum();
                let qi = cols[i].clone();
                for (x, q) in cols[j].iter_mut().zip(qi.iter()) {
                    *x -= proj * q;
                }
            }
        }
        let norm = cols[j].iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        for x in cols[j].iter_mut() {
            *x /= norm;
        }
    }
    let mut u = ComplexMatrix::zeros(dim, dim);
    for j in 0..dim {
        for i in 0..dim {
            u[(i, j)] = cols[j][i];
        }
    }
    u
}

/// Haar-random pure state: normalized complex Gaussian vector.
pub fn random_pure_state<R: Rng>(dim: usize, rng: &mut R) -> PureState {
    let amps: Vec<Complex64> = (0..dim).map(|_| complex_gaussian(rng)).collect();
    PureState::normalized(amps).expect("Gaussian vector nonzero")
}

/// Uniformly random composition of `total` into `parts` positive ranks.
fn random_ranks<R: Rng>(total: usize, parts: usize, rng: &mut R) -> Vec<usize> {
    assert!(parts >= 1 && parts <= total);
    // choose parts−1 distinct cut points among total−1 gaps
    let mut gaps: Vec<usize> = (1..total).collect();
    for i in 0..gaps.len() {
        let j = rng.gen_range(i..gaps.len());
        gaps.swap(i, j);
    }
    let mut cuts: Vec<usize> = gaps[..parts - 1].to_vec();
    cuts.sort_unstable();
    cuts.push(total);
    let mut ranks = Vec::with_capacity(parts);
    let mut prev = 0;
    for c in cuts {
        ranks.push(c - prev);
        prev = c;
    }
    ranks
}

/// Haar-random projective measurement with `outcomes` effects. Rank-1 when
/// `outcomes == dim`; for two outcomes the rank split is uniform over
/// {1, …, dim−1}; otherwise a uniformly random composition of `dim`.
pub fn random_projective_measurement<R: Rng>(
    dim: usize,
    outcomes: usize,
    rng: &mut R,
) -> Measurement {
    assert!(outcomes >= 1 && outcomes <= dim);
    let u = haar_random_unitary(dim, rng);
    let ranks = if outcomes == dim {
        vec![1; dim]
    } else {
        random_ranks(dim, outcomes, rng)
    };
    let mut effects = Vec::with_capacity(outcomes);
    let mut col = 0usize;
    for r in ranks {
        let mut p = ComplexMatrix::zeros(dim, dim);
        for k in col..col + r {
            for i in 0..dim {
                for j in 0..dim {
                    p[(i, j)] += u[(i, k)] * u[(j, k)].conj();
                }
            }
        }
        col += r;
        effects.push(HermitianOperator::symmetrize(p));
    }
    Measurement::new(effects).expect("Haar projectors form a measurement")
}

/// Random full-support POVM: normalize o random Wishart blocks G_kG_k† by
/// S^{-1/2}(·)S^{-1/2} with S their sum.
pub fn random_povm<R: Rng>(dim: usize, outcomes: usize, rng: &mut R) -> Measurement {
    assert!(outcomes >= 1);
    let blocks: Vec<ComplexMatrix> = (0..outcomes)
        .map(|_| {
            let g = ginibre(dim, dim, rng);
            g.matmul(&g.adjoint())
        })
        .collect();
    let mut sum = ComplexMatrix::zeros(dim, dim);
    for b in &blocks {
        sum = sum.add(b);
    }
    let s = HermitianOperator::symmetrize(sum);
    let (w, v) = eigh(&s).expect("Wishart sum eigendecomposition");
    // S^{-1/2}
    let mut sinv = ComplexMatrix::zeros(dim, dim);
    for k in 0..dim {
        let inv_sqrt = 1.0 / w[k].max(1e-300).sqrt();
        for i in 0..dim {
            for j in 0..dim {
                sinv[(i, j)] += v[(i, k)] * v[(j, k)].conj() * inv_sqrt;
            }
        }
    }
    let effects: Vec<HermitianOperator> = blocks
        .iter()
        .map(|b| HermitianOperator::symmetrize(sinv.matmul(b).matmul(&sinv)))
        .collect();
    Measurement::new(effects).expect("normalized Wishart blocks form a POVM")
}
