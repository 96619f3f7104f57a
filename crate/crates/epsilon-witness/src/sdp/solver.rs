//! Homogeneous self-dual interior-point solver for the standard conic pair
//!
//!   min ⟨c, x⟩ + ⟨c_f, f⟩   s.t.   A x + F f = b,   x ∈ K,   f free,
//!
//! with K a product of dense PSD blocks and a nonnegative orthant. Search
//! directions use Nesterov-Todd scaling with a Mehrotra predictor-corrector;
//! the reduced Newton system is a dense Schur complement over the equality
//! constraints. Infeasibility and unboundedness emerge as τ → 0 certificates
//! of the embedding. Everything is deterministic.

use super::sym::{
    cholesky, chol_solve, congruence, mat_mul, mat_mul_nt, mat_mul_tn, sym_eig, symmetrize,
    tri_congruence_inv,
};
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ConeStatus {
    Optimal,
    PrimalInfeasible,
    DualInfeasible,
    MaxIters,
}

/// Internal standard-form problem over svec-packed cone variables.
#[derive(Debug, Clone)]
pub(crate) struct ConeProblem {
    pub psd_dims: Vec<usize>,
    pub nonneg: usize,
    /// p × x_len, row-major.
    pub a: Vec<f64>,
    /// p × q, row-major.
    pub fmat: Vec<f64>,
    pub b: Vec<f64>,
    pub c: Vec<f64>,
    pub c_free: Vec<f64>,
}

#[derive(Debug, Clone)]
pub(crate) struct ConeSolution {
    pub status: ConeStatus,
    pub x: Vec<f64>,
    pub free: Vec<f64>,
    pub y: Vec<f64>,
    pub z: Vec<f64>,
    pub primal_obj: f64,
    pub dual_obj: f64,
    pub gap: f64,
    pub pres: f64,
    pub dres: f64,
    pub iterations: usize,
}

pub(crate) fn svec_len(n: usize) -> usize {
    n * (n + 1) / 2
}

const SQRT2: f64 = std::f64::consts::SQRT_2;

/// Pack a symmetric matrix into svec order (upper triangle by columns,
/// off-diagonals scaled by √2) so that ⟨A, B⟩ = svec(A)·svec(B).
pub(crate) fn mat_to_svec(m: &[f64], n: usize, out: &mut [f64]) {
    let mut idx = 0;
    for j in 0..n {
        for i in 0..=j {
            out[idx] = if i == j {
                m[i * n + j]
            } else {
                SQRT2 * m[i * n + j]
            };
            idx += 1;
        }
    }
}

pub(crate) fn svec_to_mat(s: &[f64], n: usize) -> Vec<f64> {
    let mut m = vec![0.0; n * n];
    let mut idx = 0;
    for j in 0..n {
        for i in 0..=j {
            if i == j {
                m[i * n + j] = s[idx];
            } else {
                let v = s[idx] / SQRT2;
                m[i * n + j] = v;
                m[j * n + i] = v;
            }
            idx += 1;
        }
    }
    m
}

struct Layout {
    psd_dims: Vec<usize>,
    psd_offsets: Vec<usize>,
    nonneg_offset: usize,
    nonneg: usize,
    x_len: usize,
    /// barrier degree Σ n_j + ℓ
    nu: f64,
}

impl Layout {
    fn new(p: &ConeProblem) -> Layout {
        let mut offsets = Vec::with_capacity(p.psd_dims.len());
        let mut acc = 0;
        for &n in &p.psd_dims {
            offsets.push(acc);
            acc += svec_len(n);
        }
        let nonneg_offset = acc;
        let x_len = acc + p.nonneg;
        let nu = p.psd_dims.iter().sum::<usize>() as f64 + p.nonneg as f64;
        Layout {
            psd_dims: p.psd_dims.clone(),
            psd_offsets: offsets,
            nonneg_offset,
            nonneg: p.nonneg,
            x_len,
            nu,
        }
    }

    fn psd_slice<'a>(&self, v: &'a [f64], j: usize) -> &'a [f64] {
        let n = self.psd_dims[j];
        &v[self.psd_offsets[j]..self.psd_offsets[j] + svec_len(n)]
    }

    fn psd_slice_mut<'a>(&self, v: &'a mut [f64], j: usize) -> &'a mut [f64] {
        let n = self.psd_dims[j];
        &mut v[self.psd_offsets[j]..self.psd_offsets[j] + svec_len(n)]
    }
}

/// Per-block NT scaling data.
struct Scaling {
    /// per PSD block: (R, R⁻¹, λ) with W = RRᵀ, λ = diag of scaled point
    psd: Vec<(Vec<f64>, Vec<f64>, Vec<f64>)>,
    /// per nonneg entry: (w, λ)
    w_nonneg: Vec<f64>,
    lambda_nonneg: Vec<f64>,
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn norm2(a: &[f64]) -> f64 {
    dot(a, a).sqrt()
}

/// NT scaling for one PSD block from svec-packed x, z.
fn nt_scaling_block(xs: &[f64], zs: &[f64], n: usize) -> Result<(Vec<f64>, Vec<f64>, Vec<f64>)> {
    let x = svec_to_mat(xs, n);
    let z = svec_to_mat(zs, n);
    let (dx, qx) = sym_eig(&x, n)?;
    let floor = dx[n - 1].max(1e-300) * 1e-15;
    let dxc: Vec<f64> = dx.iter().map(|&v| v.max(floor)).collect();
    // X^{1/2}, X^{-1/2}
    let mut xh = vec![0.0; n * n];
    let mut xih = vec![0.0; n * n];
    for i in 0..n {
        for j in 0..n {
            let mut acc_h = 0.0;
            let mut acc_ih = 0.0;
            for k in 0..n {
                let q = qx[i * n + k] * qx[j * n + k];
                acc_h += q * dxc[k].sqrt();
                acc_ih += q / dxc[k].sqrt();
            }
            xh[i * n + j] = acc_h;
            xih[i * n + j] = acc_ih;
        }
    }
    let t = congruence(&xh, &z, n);
    let (s, pt) = sym_eig(&t, n)?;
    let sfloor = s[n - 1].max(1e-300) * 1e-15;
    let sc: Vec<f64> = s.iter().map(|&v| v.max(sfloor)).collect();
    // R = X^{1/2} P S^{-1/4};  R⁻¹ = S^{1/4} Pᵀ X^{-1/2};  λ = √S
    let mut r = mat_mul(&xh, &pt, n);
    for i in 0..n {
        for j in 0..n {
            r[i * n + j] /= sc[j].powf(0.25);
        }
    }
    let mut rinv = mat_mul_tn(&pt, &xih, n);
    for i in 0..n {
        let f = sc[i].powf(0.25);
        for j in 0..n {
            rinv[i * n + j] *= f;
        }
    }
    let lambda: Vec<f64> = sc.iter().map(|&v| v.sqrt()).collect();
    Ok((r, rinv, lambda))
}

fn compute_scaling(layout: &Layout, x: &[f64], z: &[f64]) -> Result<Scaling> {
    let mut psd = Vec::with_capacity(layout.psd_dims.len());
    for (j, &n) in layout.psd_dims.iter().enumerate() {
        psd.push(nt_scaling_block(
            layout.psd_slice(x, j),
            layout.psd_slice(z, j),
            n,
        )?);
    }
    let mut w_nonneg = Vec::with_capacity(layout.nonneg);
    let mut lambda_nonneg = Vec::with_capacity(layout.nonneg);
    for k in 0..layout.nonneg {
        let xi = x[layout.nonneg_offset + k].max(1e-300);
        let zi = z[layout.nonneg_offset + k].max(1e-300);
        w_nonneg.push((xi / zi).sqrt());
        lambda_nonneg.push((xi * zi).sqrt());
    }
    Ok(Scaling {
        psd,
        w_nonneg,
        lambda_nonneg,
    })
}

/// v ↦ W v W per PSD block, w²·v on nonneg entries.
fn scale_vec(layout: &Layout, sc: &Scaling, v: &[f64]) -> Vec<f64> {
    let mut out = vec![0.0; layout.x_len];
    for (j, &n) in layout.psd_dims.iter().enumerate() {
        let (r, _, _) = &sc.psd[j];
        let w = mat_mul_nt(r, r, n);
        let m = svec_to_mat(layout.psd_slice(v, j), n);
        let u = congruence(&w, &m, n);
        mat_to_svec(&u, n, layout.psd_slice_mut(&mut out, j));
    }
    for k in 0..layout.nonneg {
        let wk = sc.w_nonneg[k];
        out[layout.nonneg_offset + k] = wk * wk * v[layout.nonneg_offset + k];
    }
    out
}

/// Max step α so that the cone variable stays PSD: 1/max(0, −λ_min(L⁻¹ΔL⁻ᵀ)).
fn max_step(layout: &Layout, v: &[f64], dv: &[f64]) -> Result<f64> {
    let mut alpha = f64::INFINITY;
    for (j, &n) in layout.psd_dims.iter().enumerate() {
        let x = svec_to_mat(layout.psd_slice(v, j), n);
        let dxm = svec_to_mat(layout.psd_slice(dv, j), n);
        let scale: f64 = (0..n).map(|i| x[i * n + i].abs()).fold(0.0, f64::max);
        let mut l = None;
        for bump in [1e-13, 1e-10, 1e-7] {
            let mut xreg = x.clone();
            for i in 0..n {
                xreg[i * n + i] += scale.max(1.0) * bump;
            }
            l = cholesky(&xreg, n, 0.0);
            if l.is_some() {
                break;
            }
        }
        let l = l.ok_or_else(|| Error::Sdp("iterate left the cone".into()))?;
        let s = tri_congruence_inv(&l, &dxm, n);
        let (ev, _) = sym_eig(&s, n)?;
        let min = ev[0];
        if min < 0.0 {
            alpha = alpha.min(-1.0 / min);
        }
    }
    for k in 0..layout.nonneg {
        let xi = v[layout.nonneg_offset + k];
        let di = dv[layout.nonneg_offset + k];
        if di < 0.0 {
            alpha = alpha.min(-xi / di);
        }
    }
    Ok(alpha)
}

/// Search direction produced by one Newton solve.
struct Direction {
    dx: Vec<f64>,
    df: Vec<f64>,
    dy: Vec<f64>,
    dz: Vec<f64>,
    dtau: f64,
    dkappa: f64,
}

pub(crate) fn solve_cone(prob: &ConeProblem, tol: f64, max_iters: usize) -> Result<ConeSolution> {
    let layout = Layout::new(prob);
    let p = prob.b.len();
    let q = prob.c_free.len();
    let x_len = layout.x_len;
    if prob.c.len() != x_len {
        return Err(Error::dim("cone objective length", prob.c.len(), x_len));
    }
    if prob.a.len() != p * x_len {
        return Err(Error::dim("constraint matrix", prob.a.len(), p * x_len));
    }
    if prob.fmat.len() != p * q {
        return Err(Error::dim("free-var matrix", prob.fmat.len(), p * q));
    }

    // identity-like start
    let mut x = vec![0.0; x_len];
    let mut z = vec![0.0; x_len];
    for (j, &n) in layout.psd_dims.iter().enumerate() {
        let eye: Vec<f64> = {
            let mut m = vec![0.0; n * n];
            for i in 0..n {
                m[i * n + i] = 1.0;
            }
            m
        };
        mat_to_svec(&eye, n, layout.psd_slice_mut(&mut x, j));
        mat_to_svec(&eye, n, layout.psd_slice_mut(&mut z, j));
    }
    for k in 0..layout.nonneg {
        x[layout.nonneg_offset + k] = 1.0;
        z[layout.nonneg_offset + k] = 1.0;
    }
    let mut f = vec![0.0; q];
    let mut y = vec![0.0; p];
    let mut tau = 1.0_f64;
    let mut kappa = 1.0_f64;

    let bnorm = 1.0 + norm2(&prob.b);
    let cnorm = 1.0 + norm2(&prob.c).hypot(norm2(&prob.c_free));

    let a_row = |i: usize| &prob.a[i * x_len..(i + 1) * x_len];
    let apply_a = |v: &[f64]| -> Vec<f64> { (0..p).map(|i| dot(a_row(i), v)).collect() };
    let apply_at = |w: &[f64]| -> Vec<f64> {
        let mut out = vec![0.0; x_len];
        for i in 0..p {
            let wi = w[i];
            if wi == 0.0 {
                continue;
            }
            for (o, &aij) in out.iter_mut().zip(a_row(i)) {
                *o += wi * aij;
            }
        }
        out
    };
    let apply_f = |v: &[f64]| -> Vec<f64> {
        (0..p)
            .map(|i| dot(&prob.fmat[i * q..(i + 1) * q], v))
            .collect()
    };
    let apply_ft = |w: &[f64]| -> Vec<f64> {
        let mut out = vec![0.0; q];
        for i in 0..p {
            for k in 0..q {
                out[k] += prob.fmat[i * q + k] * w[i];
            }
        }
        out
    };

    let mut iterations = 0;
    for iter in 0..max_iters {
        iterations = iter;

        // residuals of the homogeneous system
        let ax = apply_a(&x);
        let ff = apply_f(&f);
        let r_p: Vec<f64> = (0..p).map(|i| ax[i] + ff[i] - prob.b[i] * tau).collect();
        let aty = apply_at(&y);
        let r_d: Vec<f64> = (0..x_len)
            .map(|i| prob.c[i] * tau - aty[i] - z[i])
            .collect();
        let fty = apply_ft(&y);
        let r_f: Vec<f64> = (0..q).map(|k| prob.c_free[k] * tau - fty[k]).collect();
        let ctx = dot(&prob.c, &x) + dot(&prob.c_free, &f);
        let bty = dot(&prob.b, &y);
        let r_g = bty - ctx - kappa;

        let mu = (dot(&x, &z) + tau * kappa) / (layout.nu + 1.0);

        // convergence on the de-homogenized iterate
        let inv_tau = 1.0 / tau;
        let pres_vec: Vec<f64> = (0..p)
            .map(|i| (ax[i] + ff[i]) * inv_tau - prob.b[i])
            .collect();
        let pres = norm2(&pres_vec) / bnorm;
        let dres_vec: Vec<f64> = (0..x_len)
            .map(|i| (aty[i] + z[i]) * inv_tau - prob.c[i])
            .collect();
        let dres_free: Vec<f64> = (0..q).map(|k| fty[k] * inv_tau - prob.c_free[k]).collect();
        let dres = (norm2(&dres_vec).hypot(norm2(&dres_free))) / cnorm;
        let pobj = ctx * inv_tau;
        let dobj = bty * inv_tau;
        let gap = dot(&x, &z) * inv_tau * inv_tau;
        let relgap = gap / (1.0 + pobj.abs().max(dobj.abs()));

        if pres < tol && dres < tol && relgap < tol {
            return Ok(ConeSolution {
                status: ConeStatus::Optimal,
                x: x.iter().map(|v| v * inv_tau).collect(),
                free: f.iter().map(|v| v * inv_tau).collect(),
                y: y.iter().map(|v| v * inv_tau).collect(),
                z: z.iter().map(|v| v * inv_tau).collect(),
                primal_obj: pobj,
                dual_obj: dobj,
                gap,
                pres,
                dres,
                iterations: iter,
            });
        }

        // infeasibility certificates as τ collapses
        if tau < 1e-9 * kappa.max(1.0) || (mu < 1e-14 && tau < 1e-6) {
            let hb = bty;
            let hc = ctx;
            if hb > 0.0 {
                let cert: Vec<f64> = (0..x_len).map(|i| (aty[i] + z[i]) / hb).collect();
                let ftyn: Vec<f64> = (0..q).map(|k| fty[k] / hb).collect();
                if norm2(&cert) + norm2(&ftyn) < 1e-6 * cnorm {
                    return Ok(ConeSolution {
                        status: ConeStatus::PrimalInfeasible,
                        x,
                        free: f,
                        y,
                        z,
                        primal_obj: f64::NAN,
                        dual_obj: f64::NAN,
                        gap,
                        pres,
                        dres,
                        iterations: iter,
                    });
                }
            }
            if hc < 0.0 {
                let axn: Vec<f64> = (0..p).map(|i| (ax[i] + ff[i]) / (-hc)).collect();
                if norm2(&axn) < 1e-6 * bnorm {
                    return Ok(ConeSolution {
                        status: ConeStatus::DualInfeasible,
                        x,
                        free: f,
                        y,
                        z,
                        primal_obj: f64::NAN,
                        dual_obj: f64::NAN,
                        gap,
                        pres,
                        dres,
                        iterations: iter,
                    });
                }
            }
        }

        // NT scaling and Schur complement M = A W Aᵀ (+ free-var border)
        let scaling = compute_scaling(&layout, &x, &z)?;
        let scaled_rows: Vec<Vec<f64>> = (0..p).map(|i| scale_vec(&layout, &scaling, a_row(i))).collect();
        let mut m = vec![0.0; p * p];
        for i in 0..p {
            for k in i..p {
                let v = dot(a_row(i), &scaled_rows[k]);
                m[i * p + k] = v;
                m[k * p + i] = v;
            }
        }
        // diagonal regularization keeps the factorization alive near the
        // boundary without visibly perturbing the direction
        let mscale: f64 = (0..p).map(|i| m[i * p + i]).fold(0.0, f64::max).max(1.0);
        for i in 0..p {
            m[i * p + i] += mscale * 1e-13;
        }
        let lm = cholesky(&m, p, 0.0)
            .ok_or_else(|| Error::Sdp("Schur complement not positive definite".into()))?;

        let sc_vec = scale_vec(&layout, &scaling, &prob.c);
        let wc = apply_a(&sc_vec);
        let cwc = dot(&prob.c, &sc_vec);
        let sr_vec = scale_vec(&layout, &scaling, &r_d);
        let wr = apply_a(&sr_vec);
        let cwr = dot(&prob.c, &sr_vec);

        // saddle solve for (Δy, Δf) given rhs (g1, g2)
        let saddle = |g1: &[f64], g2: &[f64]| -> Result<(Vec<f64>, Vec<f64>)> {
            if q == 0 {
                let mut dy = g1.to_vec();
                chol_solve(&lm, p, &mut dy);
                return Ok((dy, Vec::new()));
            }
            // G = Fᵀ M⁻¹ F, rhs = Fᵀ M⁻¹ g1 − g2
            let mut minv_f = vec![0.0; p * q]; // columns M⁻¹ F_k
            for k in 0..q {
                let mut col: Vec<f64> = (0..p).map(|i| prob.fmat[i * q + k]).collect();
                chol_solve(&lm, p, &mut col);
                for i in 0..p {
                    minv_f[i * q + k] = col[i];
                }
            }
            let mut g = vec![0.0; q * q];
            for k in 0..q {
                for l in 0..q {
                    let mut acc = 0.0;
                    for i in 0..p {
                        acc += prob.fmat[i * q + k] * minv_f[i * q + l];
                    }
                    g[k * q + l] = acc;
                }
            }
            symmetrize(&mut g, q);
            let gscale: f64 = (0..q).map(|i| g[i * q + i]).fold(0.0, f64::max).max(1.0);
            for i in 0..q {
                g[i * q + i] += gscale * 1e-13;
            }
            let lg = cholesky(&g, q, 0.0)
                .ok_or_else(|| Error::Sdp("free-variable Schur block singular".into()))?;
            let mut m_g1 = g1.to_vec();
            chol_solve(&lm, p, &mut m_g1);
            let mut rhs_f: Vec<f64> = (0..q)
                .map(|k| {
                    let mut acc = -g2[k];
                    for i in 0..p {
                        acc += prob.fmat[i * q + k] * m_g1[i];
                    }
                    acc
                })
                .collect();
            chol_solve(&lg, q, &mut rhs_f);
            let df = rhs_f;
            let fdf = apply_f(&df);
            let mut dy: Vec<f64> = (0..p).map(|i| g1[i] - fdf[i]).collect();
            chol_solve(&lm, p, &mut dy);
            Ok((dy, df))
        };

        // u-solve: τ-independent part; v-solve: τ coefficient
        let g1_u: Vec<f64> = (0..p).map(|i| -r_p[i] + wr[i]).collect();
        let g2_u = r_f.clone();
        let g1_v: Vec<f64> = (0..p).map(|i| wc[i] + prob.b[i]).collect();
        let g2_v = prob.c_free.clone();

        // one Newton solve for a given complementarity target
        let newton = |v_target: &[f64], d_tau: f64, av_known: &[f64], cv: f64| -> Result<Direction> {
            let g1: Vec<f64> = (0..p).map(|i| g1_u[i] - av_known[i]).collect();
            let (u_y, u_f) = saddle(&g1, &g2_u)?;
            let (v_y, v_f) = saddle(&g1_v, &g2_v)?;
            // scalar equation for Δτ from the gap row and τκ linearization
            let n_num = dot(&prob.b, &u_y) - dot(&wc, &u_y) - cv + cwr
                - dot(&prob.c_free, &u_f)
                - d_tau / tau
                + r_g;
            let n_den = dot(&prob.b, &v_y) - dot(&wc, &v_y) + cwc - dot(&prob.c_free, &v_f)
                + kappa / tau;
            let dtau = -n_num / n_den;
            let dy: Vec<f64> = (0..p).map(|i| u_y[i] + dtau * v_y[i]).collect();
            let df: Vec<f64> = (0..q).map(|k| u_f[k] + dtau * v_f[k]).collect();
            let atdy = apply_at(&dy);
            let dz: Vec<f64> = (0..x_len)
                .map(|i| -atdy[i] + prob.c[i] * dtau + r_d[i])
                .collect();
            let sdz = scale_vec(&layout, &scaling, &dz);
            let dx: Vec<f64> = (0..x_len).map(|i| v_target[i] - sdz[i]).collect();
            let dkappa = (d_tau - kappa * dtau) / tau;
            Ok(Direction {
                dx,
                df,
                dy,
                dz,
                dtau,
                dkappa,
            })
        };

        // predictor: complementarity target −λ∘λ, i.e. V = −X, v = −x
        let v_pred: Vec<f64> = x.iter().map(|v| -v).collect();
        let av_pred = apply_a(&v_pred);
        let cv_pred = dot(&prob.c, &v_pred);
        let aff = newton(&v_pred, -tau * kappa, &av_pred, cv_pred)?;

        let alpha_aff = {
            let ax_step = max_step(&layout, &x, &aff.dx)?;
            let az_step = max_step(&layout, &z, &aff.dz)?;
            let mut a = ax_step.min(az_step);
            if aff.dtau < 0.0 {
                a = a.min(-tau / aff.dtau);
            }
            if aff.dkappa < 0.0 {
                a = a.min(-kappa / aff.dkappa);
            }
            a.min(1.0)
        };
        let mu_aff = {
            let xa: Vec<f64> = x.iter().zip(&aff.dx).map(|(v, d)| v + alpha_aff * d).collect();
            let za: Vec<f64> = z.iter().zip(&aff.dz).map(|(v, d)| v + alpha_aff * d).collect();
            (dot(&xa, &za) + (tau + alpha_aff * aff.dtau) * (kappa + alpha_aff * aff.dkappa))
                / (layout.nu + 1.0)
        };
        let sigma = (mu_aff / mu).clamp(0.0, 1.0).powi(3);

        // combined step: target σμe − λ∘λ − corrector
        let mut v_comb = vec![0.0; x_len];
        for (j, &n) in layout.psd_dims.iter().enumerate() {
            let (r, rinv, lambda) = &scaling.psd[j];
            let dxm = svec_to_mat(layout.psd_slice(&aff.dx, j), n);
            let dzm = svec_to_mat(layout.psd_slice(&aff.dz, j), n);
            // scaled affine products
            let dxs = {
                let t = mat_mul(rinv, &dxm, n);
                mat_mul_nt(&t, rinv, n)
            };
            let dzs = {
                let t = mat_mul_tn(r, &dzm, n);
                mat_mul(&t, r, n)
            };
            let mut dmat = vec![0.0; n * n];
            for a_i in 0..n {
                for b_i in 0..n {
                    let mut corr = 0.0;
                    for k in 0..n {
                        corr += dxs[a_i * n + k] * dzs[k * n + b_i]
                            + dzs[a_i * n + k] * dxs[k * n + b_i];
                    }
                    corr *= 0.5;
                    let base = if a_i == b_i {
                        sigma * mu - lambda[a_i] * lambda[a_i]
                    } else {
                        0.0
                    };
                    dmat[a_i * n + b_i] = base - corr;
                }
            }
            symmetrize(&mut dmat, n);
            // Ψ_ij = D_ij / ((λ_i + λ_j)/2), then V = R Ψ Rᵀ
            for a_i in 0..n {
                for b_i in 0..n {
                    dmat[a_i * n + b_i] /= 0.5 * (lambda[a_i] + lambda[b_i]);
                }
            }
            let v_blk = {
                let t = mat_mul(r, &dmat, n);
                let mut u = mat_mul_nt(&t, r, n);
                symmetrize(&mut u, n);
                u
            };
            mat_to_svec(&v_blk, n, layout.psd_slice_mut(&mut v_comb, j));
        }
        for k in 0..layout.nonneg {
            let xi = x[layout.nonneg_offset + k];
            let zi = z[layout.nonneg_offset + k];
            let d = sigma * mu - xi * zi
                - aff.dx[layout.nonneg_offset + k] * aff.dz[layout.nonneg_offset + k];
            v_comb[layout.nonneg_offset + k] = d / zi;
        }
        let d_tau_comb = sigma * mu - tau * kappa - aff.dtau * aff.dkappa;
        let av_comb = apply_a(&v_comb);
        let cv_comb = dot(&prob.c, &v_comb);
        let dir = newton(&v_comb, d_tau_comb, &av_comb, cv_comb)?;

        let alpha = {
            let ax_step = max_step(&layout, &x, &dir.dx)?;
            let az_step = max_step(&layout, &z, &dir.dz)?;
            let mut a = ax_step.min(az_step);
            if dir.dtau < 0.0 {
                a = a.min(-tau / dir.dtau);
            }
            if dir.dkappa < 0.0 {
                a = a.min(-kappa / dir.dkappa);
            }
            (0.99 * a).min(1.0)
        };

        for i in 0..x_len {
            x[i] += alpha * dir.dx[i];
            z[i] += alpha * dir.dz[i];
        }
        for k in 0..q {
            f[k] += alpha * dir.df[k];
        }
        for i in 0..p {
            y[i] += alpha * dir.dy[i];
        }
        tau += alpha * dir.dtau;
        kappa += alpha * dir.dkappa;
    }

    let inv_tau = 1.0 / tau;
    let pobj = (dot(&prob.c, &x) + dot(&prob.c_free, &f)) * inv_tau;
    let dobj = dot(&prob.b, &y) * inv_tau;
    Ok(ConeSolution {
        status: ConeStatus::MaxIters,
        x: x.iter().map(|v| v * inv_tau).collect(),
        free: f.iter().map(|v| v * inv_tau).collect(),
        y: y.iter().map(|v| v * inv_tau).collect(),
        z: z.iter().map(|v| v * inv_tau).collect(),
        primal_obj: pobj,
        dual_obj: dobj,
        gap: dot(&x, &z) * inv_tau * inv_tau,
        pres: f64::NAN,
        dres: f64::NAN,
        iterations,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    /// min −x s.t. x + s = 3 (x, s ≥ 0 as a 2-entry nonneg cone): optimum −3.
    #[test]
    fn lp_scalar() {
        let prob = ConeProblem {
            psd_dims: vec![],
            nonneg: 2,
            a: vec![1.0, 1.0],
            fmat: vec![],
            b: vec![3.0],
            c: vec![-1.0, 0.0],
            c_free: vec![],
        };
        let sol = solve_cone(&prob, 1e-8, 100).unwrap();
        assert_eq!(sol.status, ConeStatus::Optimal);
        assert!((sol.primal_obj + 3.0).abs() < 1e-7, "obj {}", sol.primal_obj);
        assert!((sol.x[0] - 3.0).abs() < 1e-6);
    }

    /// min ⟨−C, X⟩ s.t. Tr X = 1, X ⪰ 0 → −λ_max(C). C = σ_Z.
    #[test]
    fn eigenvalue_sdp() {
        let n = 2;
        let c_mat = [1.0, 0.0, 0.0, -1.0];
        let eye = [1.0, 0.0, 0.0, 1.0];
        let mut c_svec = vec![0.0; svec_len(n)];
        mat_to_svec(&c_mat, n, &mut c_svec);
        for v in &mut c_svec {
            *v = -*v;
        }
        let mut a_svec = vec![0.0; svec_len(n)];
        mat_to_svec(&eye, n, &mut a_svec);
        let prob = ConeProblem {
            psd_dims: vec![n],
            nonneg: 0,
            a: a_svec,
            fmat: vec![],
            b: vec![1.0],
            c: c_svec,
            c_free: vec![],
        };
        let sol = solve_cone(&prob, 1e-8, 100).unwrap();
        assert_eq!(sol.status, ConeStatus::Optimal);
        assert!((sol.primal_obj + 1.0).abs() < 1e-7);
    }

    /// Free variable: min f s.t. x + f = 2, x ≥ 0 → f unbounded below?
    /// No: minimized at x as large as possible; x unbounded → dual infeasible.
    #[test]
    fn free_variable_unbounded() {
        let prob = ConeProblem {
            psd_dims: vec![],
            nonneg: 1,
            a: vec![1.0],
            fmat: vec![1.0],
            b: vec![2.0],
            c: vec![0.0],
            c_free: vec![1.0],
        };
        let sol = solve_cone(&prob, 1e-8, 200).unwrap();
        assert_eq!(sol.status, ConeStatus::DualInfeasible);
    }

    /// Free variable bounded: min f s.t. f − x = 0, x ≥ 0 plus x + s = 1:
    /// f = x ∈ [0, 1] → optimum 0.
    #[test]
    fn free_variable_bounded() {
        let prob = ConeProblem {
            psd_dims: vec![],
            nonneg: 2,
            a: vec![-1.0, 0.0, 1.0, 1.0],
            fmat: vec![1.0, 0.0],
            b: vec![0.0, 1.0],
            c: vec![0.0, 0.0],
            c_free: vec![1.0],
        };
        let sol = solve_cone(&prob, 1e-8, 100).unwrap();
        assert_eq!(sol.status, ConeStatus::Optimal);
        assert!(sol.primal_obj.abs() < 1e-6, "obj {}", sol.primal_obj);
    }

    /// x ≥ 0 with x = −1: primal infeasible.
    #[test]
    fn primal_infeasible_lp() {
        let prob = ConeProblem {
            psd_dims: vec![],
            nonneg: 1,
            a: vec![1.0],
            fmat: vec![],
            b: vec![-1.0],
            c: vec![0.0],
            c_free: vec![],
        };
        let sol = solve_cone(&prob, 1e-8, 200).unwrap();
        assert_eq!(sol.status, ConeStatus::PrimalInfeasible);
    }

    /// min −x₁₁ over X ⪰ 0 with no constraints: unbounded (dual infeasible).
    #[test]
    fn dual_infeasible_sdp() {
        let n = 2;
        let c_mat = [-1.0, 0.0, 0.0, 0.0];
        let mut c_svec = vec![0.0; svec_len(n)];
        mat_to_svec(&c_mat, n, &mut c_svec);
        let prob = ConeProblem {
            psd_dims: vec![n],
            nonneg: 0,
            a: vec![],
            fmat: vec![],
            b: vec![],
            c: c_svec,
            c_free: vec![],
        };
        let sol = solve_cone(&prob, 1e-8, 200).unwrap();
        assert_eq!(sol.status, ConeStatus::DualInfeasible);
    }

    /// Weak duality at the reported optimum: primal ≤ dual for min problems.
    #[test]
    fn weak_duality_random_eigenvalue_family() {
        use rand::Rng;
        use rand::SeedableRng;
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(61);
        for trial in 0..20 {
            let n = 2 + trial % 5;
            let mut c_mat = vec![0.0; n * n];
            for i in 0..n {
                for j in 0..=i {
                    let v: f64 = rng.gen_range(-1.0..1.0);
                    c_mat[i * n + j] = v;
                    c_mat[j * n + i] = v;
                }
            }
            let mut c_svec = vec![0.0; svec_len(n)];
            mat_to_svec(&c_mat, n, &mut c_svec);
            for v in &mut c_svec {
                *v = -*v;
            }
            let eye: Vec<f64> = {
                let mut m = vec![0.0; n * n];
                for i in 0..n {
                    m[i * n + i] = 1.0;
                }
                m
            };
            let mut a_svec = vec![0.0; svec_len(n)];
            mat_to_svec(&eye, n, &mut a_svec);
            let prob = ConeProblem {
                psd_dims: vec![n],
                nonneg: 0,
                a: a_svec,
                fmat: vec![],
                b: vec![1.0],
                c: c_svec,
                c_free: vec![],
            };
            let sol = solve_cone(&prob, 1e-9, 100).unwrap();
            assert_eq!(sol.status, ConeStatus::Optimal);
            let (ev, _) = sym_eig(&c_mat, n).unwrap();
            let lmax = ev[n - 1];
            assert!((sol.primal_obj + lmax).abs() < 1e-6, "n={n} obj={} λ={lmax}", sol.primal_obj);
            // weak duality: primal ≥ dual − slack at optimum (min convention)
            assert!(sol.primal_obj >= sol.dual_obj - 1e-8);
        }
    }
}
