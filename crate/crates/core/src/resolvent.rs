//! Resolvents R = (W − zI)⁻¹, their principal minors, the per-row
//! ε-decomposition of 1/R_jj, the η-decomposition of the trace increment,
//! and the exact-identity / inequality suites built on them.
//!
//! Two independent computation routes are kept alive throughout: explicit
//! LU factorizations of minor matrices, and rank-one downdates of the full
//! inverse (R^{(j)}_kl = R_kl − R_kj R_jl / R_jj). The fast sweep uses the
//! downdates; tests and the identity suite cross-check them against the
//! explicit route entry by entry.
//!
//! Normalization convention: every minor trace is divided by the FULL
//! dimension n, never by the minor's own dimension.

use num_complex::Complex64;
use serde::Serialize;

use crate::ensemble::WignerSample;
use crate::linalg::{zmatmul, SingularError, ZLu};
use crate::stieltjes;

/// Resolvent of W (or a principal minor of W) at z, stored dense.
#[derive(Debug, Clone)]
pub struct Resolvent {
    /// full matrix dimension n, used as the trace normalizer
    pub n: usize,
    pub z: Complex64,
    /// deleted row/column indices, sorted ascending (empty = full resolvent)
    pub deleted: Vec<usize>,
    /// surviving original indices, sorted ascending
    pub keep: Vec<usize>,
    /// dim×dim row-major inverse of (W_TT − zI), dim = n − |deleted|
    pub entries: Vec<Complex64>,
    /// ‖(W_TT − zI)·R − I‖_max from the construction solve
    pub solve_residual: f64,
    /// position of each original index inside `keep`, usize::MAX if deleted
    pos: Vec<usize>,
}

impl Resolvent {
    /// Full resolvent via LU with all n right-hand sides.
    pub fn full(sample: &WignerSample, z: Complex64) -> Result<Resolvent, SingularError> {
        Resolvent::minor(sample, z, &[])
    }

    /// Resolvent of the principal minor with `deleted` rows/columns removed.
    /// `deleted` must be sorted, unique, in range; a zero-dimensional minor
    /// (everything deleted) is legal and has trace 0.
    pub fn minor(
        sample: &WignerSample,
        z: Complex64,
        deleted: &[usize],
    ) -> Result<Resolvent, SingularError> {
        assert!(z.im > 0.0, "resolvent requires Im z > 0");
        let n = sample.n;
        assert!(
            deleted.windows(2).all(|w| w[0] < w[1]) && deleted.iter().all(|&j| j < n),
            "deleted indices must be sorted, unique and < n"
        );
        let mut pos = vec![usize::MAX; n];
        let keep: Vec<usize> = (0..n).filter(|j| !deleted.contains(j)).collect();
        for (ii, &j) in keep.iter().enumerate() {
            pos[j] = ii;
        }
        let dim = keep.len();
        if dim == 0 {
            return Ok(Resolvent {
                n,
                z,
                deleted: deleted.to_vec(),
                keep,
                entries: Vec::new(),
                solve_residual: 0.0,
                pos,
            });
        }
        let mut a = vec![Complex64::new(0.0, 0.0); dim * dim];
        for ii in 0..dim {
            for jj in 0..dim {
                let w = sample.w(keep[ii], keep[jj]);
                a[ii * dim + jj] = Complex64::new(w, 0.0);
            }
            a[ii * dim + ii] -= z;
        }
        let a_copy = a.clone();
        let lu = ZLu::factor(a, dim)?;
        let entries = lu.inverse();
        let prod = zmatmul(&a_copy, &entries, dim);
        let mut solve_residual = 0.0f64;
        for ii in 0..dim {
            for jj in 0..dim {
                let target = if ii == jj { 1.0 } else { 0.0 };
                let d = (prod[ii * dim + jj] - Complex64::new(target, 0.0)).norm();
                solve_residual = solve_residual.max(d);
            }
        }
        Ok(Resolvent { n, z, deleted: deleted.to_vec(), keep, entries, solve_residual, pos })
    }

    pub fn dim(&self) -> usize {
        self.keep.len()
    }

    /// Entry in the ORIGINAL index space; panics if either index was deleted.
    pub fn entry(&self, k: usize, l: usize) -> Complex64 {
        let (pk, pl) = (self.pos[k], self.pos[l]);
        assert!(pk != usize::MAX && pl != usize::MAX, "index was deleted from this minor");
        self.entries[pk * self.dim() + pl]
    }

    pub fn trace(&self) -> Complex64 {
        let dim = self.dim();
        (0..dim).map(|i| self.entries[i * dim + i]).sum()
    }

    /// m^{(J)}(z) = Tr R^{(J)} / n with the FULL dimension n.
    pub fn m(&self) -> Complex64 {
        self.trace() / self.n as f64
    }

    /// Dense square (R^{(J)})², dim×dim.
    pub fn squared(&self) -> Vec<Complex64> {
        zmatmul(&self.entries, &self.entries, self.dim())
    }

    /// Tr R² computed as Σ_{k,l} R_kl² (R is complex symmetric).
    pub fn trace_squared(&self) -> Complex64 {
        self.entries.iter().map(|e| e * e).sum()
    }

    /// Diagonal of R² as row sums of squares, O(dim²).
    pub fn squared_diagonal(&self) -> Vec<Complex64> {
        let dim = self.dim();
        (0..dim)
            .map(|l| (0..dim).map(|k| {
                let e = self.entries[l * dim + k];
                e * e
            }).sum())
            .collect()
    }
}

/// Per-row decomposition 1/R_jj = −(z + m_n) + ε_j with
/// ε_j = ε_{j1} + ε_{j2} + ε_{j3} + ε_{j4}, plus the η-split of the trace
/// increment behind ε_{j4}, and the residuals of the exact identities that
/// tie them together.
#[derive(Debug, Clone, Serialize)]
pub struct EpsilonStats {
    pub j: usize,
    /// diagonal entry X_jj/√n
    pub eps1: Complex64,
    /// −(1/n) Σ_{k≠l} X_jk X_jl R^{(j)}_kl
    pub eps2: Complex64,
    /// −(1/n) Σ_k (X_jk² − 1) R^{(j)}_kk
    pub eps3: Complex64,
    /// (1/n)(Tr R − Tr R^{(j)})
    pub eps4: Complex64,
    /// (1/n) Tr (R^{(j)})²
    pub eta0: Complex64,
    /// (1/n) Σ_l (X_jl² − 1) [(R^{(j)})²]_ll
    pub eta1: Complex64,
    /// (1/n) Σ_{k≠l} X_jk X_jl [(R^{(j)})²]_kl
    pub eta2: Complex64,
    pub r_jj: Complex64,
    /// |1/R_jj + z + m_n − ε_j|
    pub reciprocal_residual: f64,
    /// |R_jj(z + m_n) + 1 − ε_j R_jj|
    pub representation_residual: f64,
    /// |ε_{j4} − (1/n)(1 + η0 + η1 + η2) R_jj|
    pub eta_split_residual: f64,
    /// 1/(nv) − |ε_{j4}|, nonnegative by eigenvalue interlacing
    pub interlacing_margin: f64,
}

impl EpsilonStats {
    pub fn eps_total(&self) -> Complex64 {
        self.eps1 + self.eps2 + self.eps3 + self.eps4
    }

    fn fill_residuals(&mut self, z: Complex64, m_n: Complex64, n: usize) {
        let eps = self.eps_total();
        self.reciprocal_residual = (self.r_jj.inv() + z + m_n - eps).norm();
        self.representation_residual =
            (self.r_jj * (z + m_n) + Complex64::new(1.0, 0.0) - eps * self.r_jj).norm();
        let eta_sum = Complex64::new(1.0, 0.0) + self.eta0 + self.eta1 + self.eta2;
        self.eta_split_residual = (self.eps4 - eta_sum * self.r_jj / n as f64).norm();
        self.interlacing_margin = 1.0 / (n as f64 * z.im) - self.eps4.norm();
    }
}

/// ε/η statistics for one row via an explicit, independently factored minor.
/// O(n³) per call; this is the reference route.
pub fn epsilon_stats_explicit(
    sample: &WignerSample,
    j: usize,
    full: &Resolvent,
) -> Result<EpsilonStats, SingularError> {
    let n = sample.n;
    assert!(j < n && full.deleted.is_empty());
    let z = full.z;
    let minor = Resolvent::minor(sample, z, &[j])?;
    let sqrt_n = (n as f64).sqrt();
    let nf = n as f64;

    let eps1 = Complex64::new(sample.x(j, j) / sqrt_n, 0.0);
    let mut eps2 = Complex64::new(0.0, 0.0);
    let mut eps3 = Complex64::new(0.0, 0.0);
    for &k in &minor.keep {
        let xk = sample.x(j, k);
        for &l in &minor.keep {
            if l != k {
                eps2 -= xk * sample.x(j, l) * minor.entry(k, l);
            }
        }
        eps3 -= (xk * xk - 1.0) * minor.entry(k, k);
    }
    eps2 /= nf;
    eps3 /= nf;
    let eps4 = (full.trace() - minor.trace()) / nf;

    let b = minor.squared();
    let dim = minor.dim();
    let mut eta0 = Complex64::new(0.0, 0.0);
    let mut eta1 = Complex64::new(0.0, 0.0);
    let mut eta2 = Complex64::new(0.0, 0.0);
    for ii in 0..dim {
        let k = minor.keep[ii];
        let xk = sample.x(j, k);
        eta0 += b[ii * dim + ii];
        eta1 += (xk * xk - 1.0) * b[ii * dim + ii];
        for jj in 0..dim {
            if jj != ii {
                eta2 += xk * sample.x(j, minor.keep[jj]) * b[ii * dim + jj];
            }
        }
    }
    eta0 /= nf;
    eta1 /= nf;
    eta2 /= nf;

    let mut stats = EpsilonStats {
        j,
        eps1,
        eps2,
        eps3,
        eps4,
        eta0,
        eta1,
        eta2,
        r_jj: full.entry(j, j),
        reciprocal_residual: 0.0,
        representation_residual: 0.0,
        eta_split_residual: 0.0,
        interlacing_margin: 0.0,
    };
    stats.fill_residuals(z, full.m(), n);
    Ok(stats)
}

/// ε/η statistics for every row from one full resolvent, O(n²) per row.
/// All minor quantities come from the rank-one downdate
/// R^{(j)}_kl = R_kl − R_kj R_jl / R_jj; no further factorizations happen.
pub fn epsilon_sweep(sample: &WignerSample, full: &Resolvent) -> Vec<EpsilonStats> {
    assert!(full.deleted.is_empty());
    let n = sample.n;
    let nf = n as f64;
    let sqrt_n = nf.sqrt();
    let z = full.z;
    let m_n = full.m();
    let dim = n;
    let r = &full.entries;
    let tr_r2 = full.trace_squared();
    let d2 = full.squared_diagonal(); // (R²)_ll

    let mut out = Vec::with_capacity(n);
    let mut xrow = vec![0.0f64; n];
    let mut t = vec![Complex64::new(0.0, 0.0); n]; // R x̃
    let mut p = vec![Complex64::new(0.0, 0.0); n]; // R c
    for j in 0..n {
        for k in 0..n {
            xrow[k] = if k == j { 0.0 } else { sample.x(j, k) };
        }
        let r_jj = r[j * dim + j];
        // two matvecs: t = R x̃ and p = R·(column j of R)
        for k in 0..n {
            let row = &r[k * dim..(k + 1) * dim];
            let mut tk = Complex64::new(0.0, 0.0);
            let mut pk = Complex64::new(0.0, 0.0);
            for l in 0..n {
                tk += row[l] * xrow[l];
                pk += row[l] * r[l * dim + j];
            }
            t[k] = tk;
            p[k] = pk;
        }
        let r2_jj = d2[j]; // (R²)_jj
        let s1: Complex64 = (0..n).map(|k| xrow[k] * r[k * dim + j]).sum(); // x̃ᵀc
        let q_full: Complex64 = (0..n).map(|k| xrow[k] * t[k]).sum(); // x̃ᵀRx̃
        let q_minor = q_full - s1 * s1 / r_jj; // x̃ᵀR^{(j)}x̃

        // diagonal pieces of the minor via downdate
        let mut sum_x2_rkk = Complex64::new(0.0, 0.0); // Σ X² R^{(j)}_kk
        let mut eps3 = Complex64::new(0.0, 0.0);
        for k in 0..n {
            if k == j {
                continue;
            }
            let ck = r[k * dim + j];
            let rkk_min = r[k * dim + k] - ck * ck / r_jj;
            let x2 = xrow[k] * xrow[k];
            sum_x2_rkk += x2 * rkk_min;
            eps3 -= (x2 - 1.0) * rkk_min;
        }
        let eps1 = Complex64::new(sample.x(j, j) / sqrt_n, 0.0);
        let eps2 = -(q_minor - sum_x2_rkk) / nf;
        let eps3 = eps3 / nf;
        // Tr R − Tr R^{(j)} = (R²)_jj / R_jj
        let eps4 = r2_jj / r_jj / nf;

        // η-split from closed-form downdates
        let s_keep = r2_jj - r_jj * r_jj; // Σ_{k≠j} c_k²
        let ctp: Complex64 = (0..n).map(|k| r[k * dim + j] * p[k]).sum(); // cᵀRc = (R³)_jj
        let a_term = tr_r2 - 2.0 * r2_jj + r_jj * r_jj;
        let b_term = ctp - 2.0 * r_jj * p[j] + r_jj * r_jj * r_jj;
        let eta0 = (a_term - 2.0 * b_term / r_jj + s_keep * s_keep / (r_jj * r_jj)) / nf;
        // [(R^{(j)})²]_ll = (R²)_ll + c_l² − 2 c_l p_l / R_jj + c_l² S / R_jj²
        let mut eta1 = Complex64::new(0.0, 0.0);
        let mut sum_x2_b_ll = Complex64::new(0.0, 0.0);
        for l in 0..n {
            if l == j {
                continue;
            }
            let cl = r[l * dim + j];
            let b_ll =
                d2[l] + cl * cl - 2.0 * cl * p[l] / r_jj + cl * cl * s_keep / (r_jj * r_jj);
            let x2 = xrow[l] * xrow[l];
            eta1 += (x2 - 1.0) * b_ll;
            sum_x2_b_ll += x2 * b_ll;
        }
        eta1 /= nf;
        // x̃ᵀ(R^{(j)})²x̃ = yᵀy with y = R^{(j)}x̃ = t − c (x̃ᵀc)/R_jj off row j
        let mut yty = Complex64::new(0.0, 0.0);
        for k in 0..n {
            if k == j {
                continue;
            }
            let y = t[k] - r[k * dim + j] * s1 / r_jj;
            yty += y * y;
        }
        let eta2 = (yty - sum_x2_b_ll) / nf;

        let mut stats = EpsilonStats {
            j,
            eps1,
            eps2,
            eps3,
            eps4,
            eta0,
            eta1,
            eta2,
            r_jj,
            reciprocal_residual: 0.0,
            representation_residual: 0.0,
            eta_split_residual: 0.0,
            interlacing_margin: 0.0,
        };
        stats.fill_residuals(z, m_n, n);
        out.push(stats);
    }
    out
}

/// One named exact-identity check with both sides and the residual.
#[derive(Debug, Clone, Serialize)]
pub struct IdentityReport {
    pub name: String,
    pub lhs: Complex64,
    pub rhs: Complex64,
    pub residual: f64,
    pub tolerance: f64,
    pub pass: bool,
}

impl IdentityReport {
    fn new(name: String, lhs: Complex64, rhs: Complex64, tolerance: f64) -> IdentityReport {
        let residual = (lhs - rhs).norm();
        IdentityReport { name, lhs, rhs, residual, tolerance, pass: residual <= tolerance }
    }
}

/// Runs every exact identity on one sample at one z. Rows listed in
/// `explicit_js` get the independently factored minor route and a
/// term-by-term comparison against the fast sweep; aggregate identities
/// (weighted ε₄ sum, Stieltjes gap representation, trace vs eigenvalue sum)
/// always run. All identities are exact in exact arithmetic; the default
/// tolerance is 1e−8 absolute.
pub fn identity_suite(
    sample: &WignerSample,
    z: Complex64,
    explicit_js: &[usize],
) -> Result<Vec<IdentityReport>, SingularError> {
    let tol = 1e-8;
    let n = sample.n;
    let nf = n as f64;
    let full = Resolvent::full(sample, z)?;
    let m_n = full.m();
    let sweep = epsilon_sweep(sample, &full);
    let mut reports = Vec::new();

    for &j in explicit_js {
        let st = epsilon_stats_explicit(sample, j, &full)?;
        reports.push(IdentityReport::new(
            format!("reciprocal_decomposition[j={j}]"),
            st.r_jj.inv(),
            -(z + m_n) + st.eps_total(),
            tol,
        ));
        reports.push(IdentityReport::new(
            format!("diagonal_representation[j={j}]"),
            st.r_jj * (z + m_n),
            st.eps_total() * st.r_jj - Complex64::new(1.0, 0.0),
            tol,
        ));
        reports.push(IdentityReport::new(
            format!("trace_increment_split[j={j}]"),
            st.eps4,
            (Complex64::new(1.0, 0.0) + st.eta0 + st.eta1 + st.eta2) * st.r_jj / nf,
            tol,
        ));
        // Tr R − Tr R^{(j)} = (R²)_jj / R_jj, minor trace from the explicit LU
        let minor = Resolvent::minor(sample, z, &[j])?;
        let r2_jj = full.squared_diagonal()[j];
        reports.push(IdentityReport::new(
            format!("trace_increment_logderiv[j={j}]"),
            full.trace() - minor.trace(),
            r2_jj / full.entry(j, j),
            tol,
        ));
        // interlacing: |ε_{j4}| ≤ 1/(nv), reported as a residual of the excess
        let excess = (st.eps4.norm() - 1.0 / (nf * z.im)).max(0.0);
        reports.push(IdentityReport {
            name: format!("interlacing_bound[j={j}]"),
            lhs: Complex64::new(st.eps4.norm(), 0.0),
            rhs: Complex64::new(1.0 / (nf * z.im), 0.0),
            residual: excess,
            tolerance: 1e-12,
            pass: excess <= 1e-12,
        });
        // fast sweep must reproduce the explicit route term by term
        let sw = &sweep[j];
        let agree = [
            (st.eps1 - sw.eps1).norm(),
            (st.eps2 - sw.eps2).norm(),
            (st.eps3 - sw.eps3).norm(),
            (st.eps4 - sw.eps4).norm(),
            (st.eta0 - sw.eta0).norm(),
            (st.eta1 - sw.eta1).norm(),
            (st.eta2 - sw.eta2).norm(),
        ]
        .into_iter()
        .fold(0.0f64, f64::max);
        reports.push(IdentityReport {
            name: format!("sweep_vs_explicit[j={j}]"),
            lhs: st.eps_total(),
            rhs: sw.eps_total(),
            residual: agree,
            tolerance: tol,
            pass: agree <= tol,
        });
    }

    // (1/n) Σ_j ε_{j4} R_jj = (1/n²) Tr R² = (1/n) m_n′(z)
    let weighted: Complex64 = sweep.iter().map(|s| s.eps4 * s.r_jj).sum::<Complex64>() / nf;
    let tr_r2 = full.trace_squared();
    reports.push(IdentityReport::new(
        "eps4_weighted_sum_is_mean_trace_rsq".into(),
        weighted,
        tr_r2 / (nf * nf),
        tol,
    ));

    // Λ_n = m_n − s = T_n / (z + m_n + s) with T_n = (1/n) Σ_j ε_j R_jj
    let s = stieltjes::s_transform(z);
    let t_n: Complex64 = sweep.iter().map(|st| st.eps_total() * st.r_jj).sum::<Complex64>() / nf;
    reports.push(IdentityReport::new(
        "stieltjes_gap_representation".into(),
        m_n - s,
        t_n / (z + m_n + s),
        tol,
    ));

    // cross-module route: (1/n) Tr R must equal the eigenvalue sum transform
    if let Ok(spectrum) = crate::spectral::eigenvalues(sample) {
        reports.push(IdentityReport::new(
            "trace_vs_eigenvalue_transform".into(),
            m_n,
            stieltjes::m_transform(&spectrum, z),
            tol,
        ));
    }

    Ok(reports)
}

/// One named inequality with both sides, the margin rhs − lhs, and the
/// pass verdict (margin ≥ −tolerance·scale).
#[derive(Debug, Clone, Serialize)]
pub struct InequalityCheck {
    pub name: String,
    pub lhs: f64,
    pub rhs: f64,
    pub margin: f64,
    pub tolerance: f64,
    pub pass: bool,
}

impl InequalityCheck {
    fn one_sided(name: String, lhs: f64, rhs: f64) -> InequalityCheck {
        let margin = rhs - lhs;
        let tolerance = 1e-10 * lhs.abs().max(rhs.abs()).max(1.0);
        InequalityCheck { name, lhs, rhs, margin, tolerance, pass: margin >= -tolerance }
    }

    fn equality(name: String, lhs: f64, rhs: f64) -> InequalityCheck {
        let margin = rhs - lhs;
        let tolerance = 1e-10 * lhs.abs().max(rhs.abs()).max(1.0);
        InequalityCheck { name, lhs, rhs, margin, tolerance, pass: margin.abs() <= tolerance }
    }
}

/// Output of [`inequality_suite`]: the checks plus the reported-only
/// empirical constant  |z + m^{(J)} + s| / √|z² − 4|.
#[derive(Debug, Clone, Serialize)]
pub struct InequalitySuite {
    pub z_re: f64,
    pub z_im: f64,
    pub deleted: Vec<usize>,
    pub checks: Vec<InequalityCheck>,
    pub denominator_ratio: f64,
}

/// Deterministic resolvent inequalities on the J-minor at z, for the powers
/// in `ps`. All traces are normalized by the full n. The two Ward-type
/// relations are exact equalities for every J and are checked as such.
pub fn inequality_suite(
    sample: &WignerSample,
    z: Complex64,
    deleted: &[usize],
    ps: &[u32],
) -> Result<InequalitySuite, SingularError> {
    let minor = Resolvent::minor(sample, z, deleted)?;
    let dim = minor.dim();
    assert!(dim > 0, "inequality suite needs a nonempty minor");
    let n = sample.n as f64;
    let v = z.im;
    let im_m = minor.m().im;
    let r = &minor.entries;
    let b = minor.squared();
    let im_diag: Vec<f64> = (0..dim).map(|l| r[l * dim + l].im).collect();

    let mut checks = Vec::new();

    // Ward identity: (1/n) Σ_{k,l} |R_kl|² = v⁻¹ Im m^{(J)}  (exact equality)
    let frob: f64 = r.iter().map(|e| e.norm_sqr()).sum::<f64>() / n;
    checks.push(InequalityCheck::equality(
        "ward_mean_energy".into(),
        frob,
        im_m / v,
    ));

    // columnwise Ward: Σ_k |R_kl|² = v⁻¹ Im R_ll, worst column reported
    let mut worst_rel = -1.0f64;
    let mut worst_pair = (0.0, 0.0);
    for l in 0..dim {
        let lhs: f64 = (0..dim).map(|k| r[k * dim + l].norm_sqr()).sum();
        let rhs = im_diag[l] / v;
        let rel = (rhs - lhs).abs() / lhs.abs().max(rhs.abs()).max(1.0);
        if rel > worst_rel {
            worst_rel = rel;
            worst_pair = (lhs, rhs);
        }
    }
    checks.push(InequalityCheck::equality(
        "ward_column_energy".into(),
        worst_pair.0,
        worst_pair.1,
    ));

    // columnwise: Σ_k |[R²]_kl|² ≤ v⁻³ Im R_ll, worst column
    let mut worst_margin = f64::INFINITY;
    let mut worst_pair = (0.0, 0.0);
    for l in 0..dim {
        let lhs: f64 = (0..dim).map(|k| b[k * dim + l].norm_sqr()).sum();
        let rhs = im_diag[l] / (v * v * v);
        if rhs - lhs < worst_margin {
            worst_margin = rhs - lhs;
            worst_pair = (lhs, rhs);
        }
    }
    checks.push(InequalityCheck::one_sided(
        "rsq_column_energy".into(),
        worst_pair.0,
        worst_pair.1,
    ));

    // (1/n) Σ_l |[R²]_ll|² ≤ v⁻³ Im m^{(J)}
    let diag_sq: f64 = (0..dim).map(|l| b[l * dim + l].norm_sqr()).sum::<f64>() / n;
    checks.push(InequalityCheck::one_sided(
        "rsq_diagonal_mean_square".into(),
        diag_sq,
        im_m / (v * v * v),
    ));

    // (1/n) Σ_{l,k} |[R²]_lk|² ≤ v⁻³ Im m^{(J)}
    let full_sq: f64 = b.iter().map(|e| e.norm_sqr()).sum::<f64>() / n;
    checks.push(InequalityCheck::one_sided(
        "rsq_mean_energy".into(),
        full_sq,
        im_m / (v * v * v),
    ));

    // |(1/n) Tr (R^{(J)})²| ≤ v⁻¹ Im m^{(J)}
    let tr_b: Complex64 = (0..dim).map(|l| b[l * dim + l]).sum();
    checks.push(InequalityCheck::one_sided(
        "trace_rsq_vs_im_m".into(),
        (tr_b / n).norm(),
        im_m / v,
    ));

    for &p in ps {
        assert!(p >= 1, "powers must be ≥ 1");
        let pi = p as i32;
        let vp = v.powi(pi);
        let mean_im_p: f64 = im_diag.iter().map(|t| t.powi(pi)).sum::<f64>() / n;

        // (1/n) Σ_l |[R²]_ll|^p ≤ v⁻ᵖ (1/n) Σ_l Im^p R_ll
        let lhs4: f64 = (0..dim).map(|l| b[l * dim + l].norm().powi(pi)).sum::<f64>() / n;
        checks.push(InequalityCheck::one_sided(
            format!("rsq_diagonal_mean_p[p={p}]"),
            lhs4,
            mean_im_p / vp,
        ));

        // (1/n) Σ_l (Σ_k |[R²]_kl|²)^p ≤ v^{−3p} (1/n) Σ_l Im^p R_ll
        let lhs6: f64 = (0..dim)
            .map(|l| (0..dim).map(|k| b[k * dim + l].norm_sqr()).sum::<f64>().powi(pi))
            .sum::<f64>()
            / n;
        checks.push(InequalityCheck::one_sided(
            format!("rsq_column_energy_mean_p[p={p}]"),
            lhs6,
            mean_im_p / v.powi(3 * pi),
        ));

        // (1/n²) Σ_{l,k} |[R²]_lk|^{2p} ≤ v^{−2p} ((1/n) Σ_l Im^p R_ll)²
        let lhs7: f64 =
            b.iter().map(|e| e.norm_sqr().powi(pi)).sum::<f64>() / (n * n);
        checks.push(InequalityCheck::one_sided(
            format!("rsq_offdiagonal_mean_2p[p={p}]"),
            lhs7,
            mean_im_p * mean_im_p / v.powi(2 * pi),
        ));
    }

    // |z + m^{(J)} + s| ≥ Im m^{(J)}, plus the reported-only edge-scaled ratio
    let s = stieltjes::s_transform(z);
    let denom = (z + minor.m() + s).norm();
    checks.push(InequalityCheck::one_sided(
        "denominator_lower_bound".into(),
        im_m,
        denom,
    ));
    let edge = (z * z - Complex64::new(4.0, 0.0)).norm().sqrt();
    let denominator_ratio = if edge > 0.0 { denom / edge } else { f64::INFINITY };

    Ok(InequalitySuite {
        z_re: z.re,
        z_im: z.im,
        deleted: deleted.to_vec(),
        checks,
        denominator_ratio,
    })
}

/// Half-range quadratic form over the (J ∪ {j})-minor:
/// Q = (1/n) Σ_{k} |Σ_{l<k} X_jl R^{(J,j)}_kl|², indices running over the
/// survivors. Nonnegative by construction.
pub fn quadratic_form_q(
    sample: &WignerSample,
    z: Complex64,
    deleted: &[usize],
    j: usize,
) -> Result<f64, SingularError> {
    assert!(!deleted.contains(&j));
    let mut del: Vec<usize> = deleted.to_vec();
    del.push(j);
    del.sort_unstable();
    let minor = Resolvent::minor(sample, z, &del)?;
    let mut q = 0.0f64;
    for (ik, &k) in minor.keep.iter().enumerate() {
        let mut inner = Complex64::new(0.0, 0.0);
        for &l in &minor.keep[..ik] {
            inner += sample.x(j, l) * minor.entry(k, l);
        }
        q += inner.norm_sqr();
    }
    Ok(q / sample.n as f64)
}
