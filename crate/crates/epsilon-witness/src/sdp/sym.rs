//! Dense real-symmetric kernels for the interior-point solver: tridiagonal
//! eigendecomposition (Householder reduction + implicit QL), Cholesky
//! factorization and triangular solves. Matrices are flat row-major slices.

use crate::error::{Error, Result};

#[inline]
pub(crate) fn at(a: &[f64], n: usize, i: usize, j: usize) -> f64 {
    a[i * n + j]
}

pub(crate) fn mat_mul(a: &[f64], b: &[f64], n: usize) -> Vec<f64> {
    let mut out = vec![0.0; n * n];
    for i in 0..n {
        for k in 0..n {
            let aik = a[i * n + k];
            if aik == 0.0 {
                continue;
            }
            let row = &b[k * n..(k + 1) * n];
            let dst = &mut out[i * n..(i + 1) * n];
            for j in 0..n {
                dst[j] += aik * row[j];
            }
        }
    }
    out
}

/// a · bᵀ
pub(crate) fn mat_mul_nt(a: &[f64], b: &[f64], n: usize) -> Vec<f64> {
    let mut out = vec![0.0; n * n];
    for i in 0..n {
        for j in 0..n {
            let mut acc = 0.0;
            for k in 0..n {
                acc += a[i * n + k] * b[j * n + k];
            }
            out[i * n + j] = acc;
        }
    }
    out
}

/// aᵀ · b
pub(crate) fn mat_mul_tn(a: &[f64], b: &[f64], n: usize) -> Vec<f64> {
    let mut out = vec![0.0; n * n];
    for k in 0..n {
        for i in 0..n {
            let aki = a[k * n + i];
            if aki == 0.0 {
                continue;
            }
            let row = &b[k * n..(k + 1) * n];
            let dst = &mut out[i * n..(i + 1) * n];
            for j in 0..n {
                dst[j] += aki * row[j];
            }
        }
    }
    out
}

pub(crate) fn symmetrize(a: &mut [f64], n: usize) {
    for i in 0..n {
        for j in (i + 1)..n {
            let v = 0.5 * (a[i * n + j] + a[j * n + i]);
            a[i * n + j] = v;
            a[j * n + i] = v;
        }
    }
}

/// Congruence w · a · w for symmetric w, a.
pub(crate) fn congruence(w: &[f64], a: &[f64], n: usize) -> Vec<f64> {
    let wa = mat_mul(w, a, n);
    let mut out = mat_mul(&wa, w, n);
    symmetrize(&mut out, n);
    out
}

/// Symmetric eigendecomposition a = V diag(d) Vᵀ, eigenvalues ascending.
/// Householder tridiagonalization followed by implicit-shift QL.
pub(crate) fn sym_eig(a: &[f64], n: usize) -> Result<(Vec<f64>, Vec<f64>)> {
    let mut v = a.to_vec();
    let mut d = vec![0.0; n];
    let mut e = vec![0.0; n];
    if n == 0 {
        return Ok((d, v));
    }
    if n == 1 {
        return Ok((vec![a[0]], vec![1.0]));
    }
    tred2(&mut v, &mut d, &mut e, n);
    tql2(&mut v, &mut d, &mut e, n)?;
    Ok((d, v))
}

fn tred2(v: &mut [f64], d: &mut [f64], e: &mut [f64], n: usize) {
    for j in 0..n {
        d[j] = v[(n - 1) * n + j];
    }
    for i in (1..n).rev() {
        let mut scale = 0.0;
        let mut h = 0.0;
        for item in d.iter().take(i) {
            scale += item.abs();
        }
        if scale == 0.0 {
            e[i] = d[i - 1];
            for j in 0..i {
                d[j] = v[(i - 1) * n + j];
                v[i * n + j] = 0.0;
                v[j * n + i] = 0.0;
            }
        } else {
            for k in 0..i {
                d[k] /= scale;
                h += d[k] * d[k];
            }
            let mut f = d[i - 1];
            let mut g = h.sqrt();
            if f > 0.0 {
                g = -g;
            }
            e[i] = scale * g;
            h -= f * g;
            d[i - 1] = f - g;
            for item in e.iter_mut().take(i) {
                *item = 0.0;
            }
            for j in 0..i {
                f = d[j];
                v[j * n + i] = f;
                g = e[j] + v[j * n + j] * f;
                for k in (j + 1)..i {
                    g += v[k * n + j] * d[k];
                    e[k] += v[k * n + j] * f;
                }
                e[j] = g;
            }
            f = 0.0;
            for j in 0..i {
                e[j] /= h;
                f += e[j] * d[j];
            }
            let hh = f / (h + h);
            for j in 0..i {
                e[j] -= hh * d[j];
            }
            for j in 0..i {
                f = d[j];
                g = e[j];
                for k in j..i {
                    v[k * n + j] -= f * e[k] + g * d[k];
                }
                d[j] = v[(i - 1) * n + j];
                v[i * n + j] = 0.0;
            }
        }
        d[i] = h;
    }
    for i in 0..(n - 1) {
        v[(n - 1) * n + i] = v[i * n + i];
        v[i * n + i] = 1.0;
        let h = d[i + 1];
        if h != 0.0 {
            for k in 0..=i {
                d[k] = v[k * n + i + 1] / h;
            }
            for j in 0..=i {
                let mut g = 0.0;
                for k in 0..=i {
                    g += v[k * n + i + 1] * v[k * n + j];
                }
                for k in 0..=i {
                    v[k * n + j] -= g * d[k];
                }
            }
        }
        for k in 0..=i {
            v[k * n + i + 1] = 0.0;
        }
    }
    for j in 0..n {
        d[j] = v[(n - 1) * n + j];
        v[(n - 1) * n + j] = 0.0;
    }
    v[(n - 1) * n + n - 1] = 1.0;
    e[0] = 0.0;
}

fn tql2(v: &mut [f64], d: &mut [f64], e: &mut [f64], n: usize) -> Result<()> {
    for i in 1..n {
        e[i - 1] = e[i];
    }
    e[n - 1] = 0.0;

    let mut f = 0.0_f64;
    let mut tst1 = 0.0_f64;
    let eps = f64::EPSILON;
    for l in 0..n {
        tst1 = tst1.max(d[l].abs() + e[l].abs());
        let mut m = l;
        while m < n {
            if e[m].abs() <= eps * tst1 {
                break;
            }
            m += 1;
        }
        if m >= n {
            m = n - 1;
        }
        if m > l {
            let mut iter = 0;
            loop {
                iter += 1;
                if iter > 50 {
                    return Err(Error::EighConvergence { iterations: 50 });
                }
                let g = d[l];
                let mut p = (d[l + 1] - g) / (2.0 * e[l]);
                let mut r = p.hypot(1.0);
                if p < 0.0 {
                    r = -r;
                }
                d[l] = e[l] / (p + r);
                d[l + 1] = e[l] * (p + r);
                let dl1 = d[l + 1];
                let mut h = g - d[l];
                for item in d.iter_mut().take(n).skip(l + 2) {
                    *item -= h;
                }
                f += h;

                p = d[m];
                let mut c = 1.0_f64;
                let mut c2 = c;
                let mut c3 = c;
                let el1 = e[l + 1];
                let mut s = 0.0_f64;
                let mut s2 = 0.0_f64;
                for i in (l..m).rev() {
                    c3 = c2;
                    c2 = c;
                    s2 = s;
                    let g2 = c * e[i];
                    h = c * p;
                    r = p.hypot(e[i]);
                    e[i + 1] = s * r;
                    s = e[i] / r;
                    c = p / r;
                    p = c * d[i] - s * g2;
                    d[i + 1] = h + s * (c * g2 + s * d[i]);
                    for k in 0..n {
                        h = v[k * n + i + 1];
                        v[k * n + i + 1] = s * v[k * n + i] + c * h;
                        v[k * n + i] = c * v[k * n + i] - s * h;
                    }
                }
                p = -s * s2 * c3 * el1 * e[l] / dl1;
                e[l] = s * p;
                d[l] = c * p;
                if e[l].abs() <= eps * tst1 {
                    break;
                }
            }
        }
        d[l] += f;
        e[l] = 0.0;
    }

    // sort ascending, carrying eigenvector columns
    for i in 0..n.saturating_sub(1) {
        let mut k = i;
        let mut p = d[i];
        for j in (i + 1)..n {
            if d[j] < p {
                k = j;
                p = d[j];
            }
        }
        if k != i {
            d.swap(i, k);
            for row in 0..n {
                let tmp = v[row * n + i];
                v[row * n + i] = v[row * n + k];
                v[row * n + k] = tmp;
            }
        }
    }
    Ok(())
}

/// Lower Cholesky factor of a symmetric positive-definite matrix; None when
/// a pivot drops below `floor`.
pub(crate) fn cholesky(a: &[f64], n: usize, floor: f64) -> Option<Vec<f64>> {
    let mut l = vec![0.0; n * n];
    for i in 0..n {
        for j in 0..=i {
            let mut acc = a[i * n + j];
            for k in 0..j {
                acc -= l[i * n + k] * l[j * n + k];
            }
            if i == j {
                if acc <= floor {
                    return None;
                }
                l[i * n + i] = acc.sqrt();
            } else {
                l[i * n + j] = acc / l[j * n + j];
            }
        }
    }
    Some(l)
}

/// Solve L y = rhs (forward substitution) in place.
pub(crate) fn forward_solve(l: &[f64], n: usize, rhs: &mut [f64]) {
    for i in 0..n {
        let mut acc = rhs[i];
        for k in 0..i {
            acc -= l[i * n + k] * rhs[k];
        }
        rhs[i] = acc / l[i * n + i];
    }
}

/// Solve Lᵀ y = rhs (back substitution) in place.
pub(crate) fn backward_solve(l: &[f64], n: usize, rhs: &mut [f64]) {
    for i in (0..n).rev() {
        let mut acc = rhs[i];
        for k in (i + 1)..n {
            acc -= l[k * n + i] * rhs[k];
        }
        rhs[i] = acc / l[i * n + i];
    }
}

/// Solve (L Lᵀ) y = rhs.
pub(crate) fn chol_solve(l: &[f64], n: usize, rhs: &mut [f64]) {
    forward_solve(l, n, rhs);
    backward_solve(l, n, rhs);
}

/// L⁻¹ · a · L⁻ᵀ for lower-triangular L and symmetric a.
pub(crate) fn tri_congruence_inv(l: &[f64], a: &[f64], n: usize) -> Vec<f64> {
    // columns of a solved forward, then rows
    let mut work = a.to_vec();
    // L⁻¹ A: forward solve each column
    for j in 0..n {
        for i in 0..n {
            let mut acc = work[i * n + j];
            for k in 0..i {
                acc -= l[i * n + k] * work[k * n + j];
            }
            work[i * n + j] = acc / l[i * n + i];
        }
    }
    // (L⁻¹ A) L⁻ᵀ: forward solve each row
    for i in 0..n {
        for j in 0..n {
            let mut acc = work[i * n + j];
            for k in 0..j {
                acc -= l[j * n + k] * work[i * n + k];
            }
            work[i * n + j] = acc / l[j * n + j];
        }
    }
    symmetrize(&mut work, n);
    work
}
