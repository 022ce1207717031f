//! Complex LU factorization with partial pivoting, for resolvents
//! R = (W − zI)⁻¹. The shifted matrix is complex *symmetric* (not Hermitian),
//! so no Cholesky-type shortcut applies; plain Doolittle LU is the primary
//! route, cross-checked elsewhere against spectral reconstruction.

use num_complex::Complex64;
use thiserror::Error;

#[derive(Debug, Error)]
#[error("matrix numerically singular at elimination step {step}")]
pub struct SingularError {
    pub step: usize,
}

pub struct ZLu {
    n: usize,
    lu: Vec<Complex64>,
    /// pivot row chosen at each step (row-swap sequence, not a permutation vector)
    swaps: Vec<usize>,
}

impl ZLu {
    /// Factor PA = LU in place. Pivot by modulus.
    pub fn factor(mut a: Vec<Complex64>, n: usize) -> Result<Self, SingularError> {
        debug_assert_eq!(a.len(), n * n);
        let mut swaps = vec![0usize; n];
        for k in 0..n {
            let mut piv = k;
            let mut best = a[k * n + k].norm_sqr();
            for i in k + 1..n {
                let m = a[i * n + k].norm_sqr();
                if m > best {
                    best = m;
                    piv = i;
                }
            }
            if best == 0.0 {
                return Err(SingularError { step: k });
            }
            swaps[k] = piv;
            if piv != k {
                for j in 0..n {
                    a.swap(k * n + j, piv * n + j);
                }
            }
            let inv = Complex64::new(1.0, 0.0) / a[k * n + k];
            for i in k + 1..n {
                let lik = a[i * n + k] * inv;
                a[i * n + k] = lik;
                let (head, tail) = a.split_at_mut(i * n);
                let row_k = &head[k * n + k + 1..k * n + n];
                let row_i = &mut tail[k + 1..n];
                for (rij, rkj) in row_i.iter_mut().zip(row_k) {
                    *rij -= lik * rkj;
                }
            }
        }
        Ok(ZLu { n, lu: a, swaps })
    }

    pub fn solve_in_place(&self, b: &mut [Complex64]) {
        let n = self.n;
        debug_assert_eq!(b.len(), n);
        for k in 0..n {
            b.swap(k, self.swaps[k]);
        }
        // Ly = Pb (unit lower)
        for i in 1..n {
            let mut s = b[i];
            for j in 0..i {
                s -= self.lu[i * n + j] * b[j];
            }
            b[i] = s;
        }
        // Ux = y
        for i in (0..n).rev() {
            let mut s = b[i];
            for j in i + 1..n {
                s -= self.lu[i * n + j] * b[j];
            }
            b[i] = s / self.lu[i * n + i];
        }
    }

    /// Dense inverse, column by column. Row-major result.
    pub fn inverse(&self) -> Vec<Complex64> {
        let n = self.n;
        let mut inv = vec![Complex64::ZERO; n * n];
        let mut col = vec![Complex64::ZERO; n];
        for c in 0..n {
            col.fill(Complex64::ZERO);
            col[c] = Complex64::new(1.0, 0.0);
            self.solve_in_place(&mut col);
            for r in 0..n {
                inv[r * n + c] = col[r];
            }
        }
        inv
    }

    pub fn det(&self) -> Complex64 {
        let mut d = Complex64::new(1.0, 0.0);
        for k in 0..self.n {
            d *= self.lu[k * self.n + k];
            if self.swaps[k] != k {
                d = -d;
            }
        }
        d
    }
}

/// C = A·B for dense row-major complex n×n.
pub fn zmatmul(a: &[Complex64], b: &[Complex64], n: usize) -> Vec<Complex64> {
    debug_assert_eq!(a.len(), n * n);
    debug_assert_eq!(b.len(), n * n);
    let mut c = vec![Complex64::ZERO; n * n];
    for i in 0..n {
        for k in 0..n {
            let aik = a[i * n + k];
            if aik == Complex64::ZERO {
                continue;
            }
            let brow = &b[k * n..k * n + n];
            let crow = &mut c[i * n..i * n + n];
            for (cij, bkj) in crow.iter_mut().zip(brow) {
                *cij += aik * bkj;
            }
        }
    }
    c
}

#[cfg(test)]
mod tests {
    use super::*;

    fn random_complex(n: usize, seed: u64) -> Vec<Complex64> {
        let mut rng = crate::rng::CounterRng::new(seed);
        (0..n * n)
            .map(|_| Complex64::new(2.0 * rng.next_f64() - 1.0, 2.0 * rng.next_f64() - 1.0))
            .collect()
    }

    #[test]
    fn solve_identity() {
        let n = 4;
        let mut a = vec![Complex64::ZERO; n * n];
        for i in 0..n {
            a[i * n + i] = Complex64::new(1.0, 0.0);
        }
        let lu = ZLu::factor(a, n).unwrap();
        let mut b: Vec<Complex64> = (0..n).map(|i| Complex64::new(i as f64, -1.0)).collect();
        let want = b.clone();
        lu.solve_in_place(&mut b);
        assert_eq!(b, want);
    }

    #[test]
    fn inverse_roundtrip() {
        let n = 25;
        let a = random_complex(n, 5);
        let lu = ZLu::factor(a.clone(), n).unwrap();
        let inv = lu.inverse();
        let prod = zmatmul(&a, &inv, n);
        for i in 0..n {
            for j in 0..n {
                let want = if i == j { 1.0 } else { 0.0 };
                let got = prod[i * n + j];
                assert!(
                    (got - Complex64::new(want, 0.0)).norm() < 1e-10,
                    "({i},{j}) = {got}"
                );
            }
        }
    }

    #[test]
    fn det_of_triangular() {
        let n = 3;
        let mut a = vec![Complex64::ZERO; n * n];
        a[0] = Complex64::new(2.0, 0.0);
        a[4] = Complex64::new(0.0, 3.0);
        a[8] = Complex64::new(-1.0, 0.0);
        a[1] = Complex64::new(5.0, 5.0); // upper junk, determinant unaffected
        let lu = ZLu::factor(a, n).unwrap();
        let d = lu.det();
        assert!((d - Complex64::new(0.0, -6.0)).norm() < 1e-12, "{d}");
    }

    #[test]
    fn singular_detected() {
        let n = 2;
        let a = vec![
            Complex64::new(1.0, 0.0),
            Complex64::new(2.0, 0.0),
            Complex64::new(2.0, 0.0),
            Complex64::new(4.0, 0.0),
        ];
        assert!(ZLu::factor(a, n).is_err());
    }

    #[test]
    fn pivoting_handles_zero_leading_entry() {
        let n = 2;
        let a = vec![
            Complex64::ZERO,
            Complex64::new(1.0, 0.0),
            Complex64::new(1.0, 0.0),
            Complex64::ZERO,
        ];
        let lu = ZLu::factor(a, n).unwrap();
        let mut b = vec![Complex64::new(3.0, 0.0), Complex64::new(7.0, 0.0)];
        lu.solve_in_place(&mut b);
        // A swaps coordinates: x = (7, 3)
        assert!((b[0] - Complex64::new(7.0, 0.0)).norm() < 1e-14);
        assert!((b[1] - Complex64::new(3.0, 0.0)).norm() < 1e-14);
    }
}
