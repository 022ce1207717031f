//! Symmetric eigensolver: Householder tridiagonalization followed by
//! implicit-shift QL, in the classical EISPACK/handbook organization.
//!
//! Two paths:
//! - [`sym_eigenvalues`]: tridiagonalize without accumulating the transform,
//!   then QL on (d, e) only. This is the O(n³)-with-small-constant path the
//!   Monte Carlo loops live on.
//! - [`sym_eigen_full`]: tred2/tql2-style reduction with the orthogonal
//!   transform accumulated; used for residual validation and for the
//!   eigen-reconstruction route to resolvents.
//!
//! Matrices are dense row-major `Vec<f64>` of length n².

use thiserror::Error;

#[derive(Debug, Error)]
pub enum EigenError {
    #[error("QL iteration failed to converge for eigenvalue {index} after {iterations} sweeps")]
    NoConvergence { index: usize, iterations: usize },
    #[error("matrix dimension must be positive")]
    EmptyMatrix,
}

/// Eigenvalues of a symmetric matrix, ascending. Consumes the buffer.
/// Only the lower triangle of `a` is read.
pub fn sym_eigenvalues(mut a: Vec<f64>, n: usize) -> Result<Vec<f64>, EigenError> {
    if n == 0 {
        return Err(EigenError::EmptyMatrix);
    }
    debug_assert_eq!(a.len(), n * n);
    let (mut d, mut e) = tridiagonalize_values(&mut a, n);
    ql_implicit(&mut d, &mut e, None, n)?;
    d.sort_by(|x, y| x.partial_cmp(y).unwrap());
    Ok(d)
}

/// Full decomposition A = V diag(λ) Vᵀ with V orthogonal.
#[derive(Debug, Clone)]
pub struct SymEigen {
    /// ascending
    pub values: Vec<f64>,
    /// row-major n×n; column q is the eigenvector for `values[q]`
    pub vectors: Vec<f64>,
}

pub fn sym_eigen_full(a: &[f64], n: usize) -> Result<SymEigen, EigenError> {
    if n == 0 {
        return Err(EigenError::EmptyMatrix);
    }
    debug_assert_eq!(a.len(), n * n);
    let mut z = a.to_vec();
    let (mut d, mut e) = tred2(&mut z, n);
    ql_implicit(&mut d, &mut e, Some(&mut z), n)?;
    sort_pairs(&mut d, &mut z, n);
    Ok(SymEigen { values: d, vectors: z })
}

/// Householder reduction to tridiagonal (d, e) without accumulating the
/// transform. `e[0] = 0`, `e[i]` couples rows i-1 and i. Destroys `a`
/// (lower triangle used as workspace).
fn tridiagonalize_values(a: &mut [f64], n: usize) -> (Vec<f64>, Vec<f64>) {
    let mut e = vec![0.0; n];
    let mut v = vec![0.0; n];
    let mut p = vec![0.0; n];
    let mut w = vec![0.0; n];

    for k in 0..n.saturating_sub(2) {
        let m = n - k - 1; // trailing block size
        // x = A[k+1.., k]
        let mut norm2 = 0.0;
        for i in 0..m {
            let xi = a[(k + 1 + i) * n + k];
            v[i] = xi;
            norm2 += xi * xi;
        }
        let x0 = v[0];
        let rest2 = norm2 - x0 * x0;
        if rest2 <= 0.0 {
            // column already tridiagonal
            e[k + 1] = x0;
            continue;
        }
        let sigma = norm2.sqrt();
        let alpha = if x0 >= 0.0 { -sigma } else { sigma };
        e[k + 1] = alpha;
        v[0] = x0 - alpha;
        // vᵀv = 2σ(σ + |x0|) computed directly for stability
        let vtv = norm2 - 2.0 * alpha * x0 + alpha * alpha;
        let beta = 2.0 / vtv;

        // p = A₂₂ v using the lower triangle only:
        // row sweep accumulates both the row·v dot product and the
        // transposed contribution p[j] += A[i][j] v[i]
        p[..m].fill(0.0);
        for i in 0..m {
            let gi = k + 1 + i;
            let row = &a[gi * n + k + 1..gi * n + k + 1 + i];
            let vi = v[i];
            let mut s = 0.0;
            for j in 0..i {
                s += row[j] * v[j];
                p[j] += row[j] * vi;
            }
            p[i] += s + a[gi * n + gi] * vi;
        }
        let mut pv = 0.0;
        for i in 0..m {
            pv += p[i] * v[i];
        }
        let gamma = 0.5 * beta * beta * pv;
        for i in 0..m {
            w[i] = beta * p[i] - gamma * v[i];
        }
        // A₂₂ ← A₂₂ − v wᵀ − w vᵀ, lower triangle
        for i in 0..m {
            let gi = k + 1 + i;
            let (vi, wi) = (v[i], w[i]);
            let row = &mut a[gi * n + k + 1..gi * n + k + 2 + i];
            for j in 0..=i {
                row[j] -= vi * w[j] + wi * v[j];
            }
        }
    }
    if n >= 2 {
        e[n - 1] = a[(n - 1) * n + (n - 2)];
    }
    let d = (0..n).map(|i| a[i * n + i]).collect();
    (d, e)
}

/// Householder reduction with the orthogonal transform accumulated in `a`
/// (classical tred2). On return `a` holds Q with QᵀAQ tridiagonal.
fn tred2(a: &mut [f64], n: usize) -> (Vec<f64>, Vec<f64>) {
    let mut d = vec![0.0; n];
    let mut e = vec![0.0; n];

    for i in (1..n).rev() {
        let l = i - 1;
        let mut h = 0.0;
        if l > 0 {
            let mut scale = 0.0;
            for k in 0..=l {
                scale += a[i * n + k].abs();
            }
            if scale == 0.0 {
                e[i] = a[i * n + l];
            } else {
                for k in 0..=l {
                    a[i * n + k] /= scale;
                    h += a[i * n + k] * a[i * n + k];
                }
                let f = a[i * n + l];
                let g = if f >= 0.0 { -h.sqrt() } else { h.sqrt() };
                e[i] = scale * g;
                h -= f * g;
                a[i * n + l] = f - g;
                let mut fsum = 0.0;
                for j in 0..=l {
                    a[j * n + i] = a[i * n + j] / h;
                    let mut g = 0.0;
                    for k in 0..=j {
                        g += a[j * n + k] * a[i * n + k];
                    }
                    for k in j + 1..=l {
                        g += a[k * n + j] * a[i * n + k];
                    }
                    e[j] = g / h;
                    fsum += e[j] * a[i * n + j];
                }
                let hh = fsum / (h + h);
                for j in 0..=l {
                    let f = a[i * n + j];
                    let g = e[j] - hh * f;
                    e[j] = g;
                    for k in 0..=j {
                        a[j * n + k] -= f * e[k] + g * a[i * n + k];
                    }
                }
            }
        } else {
            e[i] = a[i * n + l];
        }
        d[i] = h;
    }
    d[0] = 0.0;
    e[0] = 0.0;
    // back-accumulate the product of Householder reflectors
    for i in 0..n {
        let l = i;
        if d[i] != 0.0 {
            for j in 0..l {
                let mut g = 0.0;
                for k in 0..l {
                    g += a[i * n + k] * a[k * n + j];
                }
                for k in 0..l {
                    a[k * n + j] -= g * a[k * n + i];
                }
            }
        }
        d[i] = a[i * n + i];
        a[i * n + i] = 1.0;
        for j in 0..l {
            a[j * n + i] = 0.0;
            a[i * n + j] = 0.0;
        }
    }
    (d, e)
}

/// Implicit-shift QL on a tridiagonal (d, e); rotations optionally applied to
/// the columns of `z` so eigenvectors come out of the tred2 transform.
fn ql_implicit(
    d: &mut [f64],
    e: &mut [f64],
    mut z: Option<&mut [f64]>,
    n: usize,
) -> Result<(), EigenError> {
    if n <= 1 {
        return Ok(());
    }
    for i in 1..n {
        e[i - 1] = e[i];
    }
    e[n - 1] = 0.0;

    const MAX_SWEEPS: usize = 50;
    for l in 0..n {
        let mut iter = 0;
        loop {
            let mut m = l;
            while m + 1 < n {
                let dd = d[m].abs() + d[m + 1].abs();
                if e[m].abs() <= f64::EPSILON * dd {
                    break;
                }
                m += 1;
            }
            if m == l {
                break;
            }
            iter += 1;
            if iter > MAX_SWEEPS {
                return Err(EigenError::NoConvergence { index: l, iterations: MAX_SWEEPS });
            }
            let mut g = (d[l + 1] - d[l]) / (2.0 * e[l]);
            let mut r = g.hypot(1.0);
            g = d[m] - d[l] + e[l] / (g + r.copysign(g));
            let (mut s, mut c) = (1.0_f64, 1.0_f64);
            let mut p = 0.0;
            let mut underflow = false;
            for i in (l..m).rev() {
                let mut f = s * e[i];
                let b = c * e[i];
                r = f.hypot(g);
                e[i + 1] = r;
                if r == 0.0 {
                    d[i + 1] -= p;
                    e[m] = 0.0;
                    underflow = true;
                    break;
                }
                s = f / r;
                c = g / r;
                g = d[i + 1] - p;
                r = (d[i] - g) * s + 2.0 * c * b;
                p = s * r;
                d[i + 1] = g + p;
                g = c * r - b;
                if let Some(zm) = z.as_deref_mut() {
                    for k in 0..n {
                        f = zm[k * n + i + 1];
                        zm[k * n + i + 1] = s * zm[k * n + i] + c * f;
                        zm[k * n + i] = c * zm[k * n + i] - s * f;
                    }
                }
            }
            if underflow {
                continue;
            }
            d[l] -= p;
            e[l] = g;
            e[m] = 0.0;
        }
    }
    Ok(())
}

/// Ascending sort of (value, column) pairs.
fn sort_pairs(d: &mut [f64], z: &mut [f64], n: usize) {
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| d[i].partial_cmp(&d[j]).unwrap());
    let ds: Vec<f64> = order.iter().map(|&q| d[q]).collect();
    d.copy_from_slice(&ds);
    let old = z.to_vec();
    for (new_c, &old_c) in order.iter().enumerate() {
        for r in 0..n {
            z[r * n + new_c] = old[r * n + old_c];
        }
    }
}
