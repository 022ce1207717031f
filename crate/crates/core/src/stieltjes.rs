//! Stieltjes transforms: the semicircle transform s(z), the empirical
//! transform m_n(z), the arctangent normalization constant, and the
//! spectral-domain region on which the resolvent machinery is exercised.
//!
//! All transforms live on the open upper half-plane; callers must supply
//! Im z > 0 and the functions assert it.

use num_complex::Complex64;
use serde::Serialize;

use crate::spectral::Spectrum;

/// s(z) = (−z + √(z−2)·√(z+2)) / 2, the Stieltjes transform of the
/// semicircle law, with principal square roots taken factor by factor so the
/// branch is correct on the whole upper half-plane. Satisfies s² + zs + 1 = 0
/// with Im s > 0 and |s| ≤ 1.
pub fn s_transform(z: Complex64) -> Complex64 {
    assert!(z.im > 0.0, "s_transform requires Im z > 0, got {}", z.im);
    let root = (z - 2.0).sqrt() * (z + 2.0).sqrt();
    (-z + root) / 2.0
}

/// m_n(z) = (1/n) Σ_j 1/(λ_j − z) for eigenvalues λ_j.
pub fn m_from_lambdas(lambdas: &[f64], z: Complex64) -> Complex64 {
    assert!(z.im > 0.0, "m_transform requires Im z > 0, got {}", z.im);
    assert!(!lambdas.is_empty());
    let mut acc = Complex64::new(0.0, 0.0);
    for &l in lambdas {
        acc += (Complex64::new(l, 0.0) - z).inv();
    }
    acc / lambdas.len() as f64
}

/// ESD Stieltjes transform of a computed spectrum.
pub fn m_transform(spectrum: &Spectrum, z: Complex64) -> Complex64 {
    m_from_lambdas(&spectrum.lambdas, z)
}

/// Derivative m_n′(z) = (1/n) Σ_j 1/(λ_j − z)².
pub fn m_prime_from_lambdas(lambdas: &[f64], z: Complex64) -> Complex64 {
    assert!(z.im > 0.0);
    let mut acc = Complex64::new(0.0, 0.0);
    for &l in lambdas {
        let d = (Complex64::new(l, 0.0) - z).inv();
        acc += d * d;
    }
    acc / lambdas.len() as f64
}

/// The constant a > 1 with (2/π)·arctan a = 3/4; closed form tan(3π/8) = 1 + √2.
pub fn a_constant() -> f64 {
    1.0 + 2f64.sqrt()
}

/// γ(z) = |2 − |u||: distance of Re z to the nearest spectral edge.
pub fn edge_gap(u: f64) -> f64 {
    (2.0 - u.abs()).abs()
}

/// Parameters cutting out the region where resolvent bounds are tracked:
/// u ∈ [−2+ε, 2−ε] and v₀/√γ(u) ≤ v ≤ V.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct RegionParams {
    pub n: usize,
    /// floor scale: v₀ = a₀·log⁴n/n at the asymptotic scale, or an override
    pub v0: f64,
    /// horizontal margin ε with ε^{3/2} = 2·v₀·a
    pub eps: f64,
    /// top of the region
    pub v_cap: f64,
    pub a_const: f64,
}

impl RegionParams {
    /// Asymptotic-scale floor v₀ = a₀·log⁴n/n. For n below ≈ 2·10⁴ this makes
    /// ε ≥ 2 and the region is empty — a legitimate, reportable outcome.
    pub fn from_scale(n: usize, a0: f64) -> RegionParams {
        assert!(n >= 2 && a0 > 0.0);
        let v0 = a0 * (n as f64).ln().powi(4) / n as f64;
        RegionParams::with_v0(n, v0)
    }

    /// Explicit floor, e.g. the desk-scale convention v₀ = 10/n.
    pub fn with_v0(n: usize, v0: f64) -> RegionParams {
        assert!(n >= 1 && v0 > 0.0);
        let a = a_constant();
        let eps = (2.0 * v0 * a).powf(2.0 / 3.0);
        RegionParams { n, v0, eps, v_cap: 4.0, a_const: a }
    }

    /// True when ε ≥ 2 leaves no admissible real part.
    pub fn is_empty(&self) -> bool {
        self.eps >= 2.0
    }

    /// Lower edge of the admissible v-range above u; +∞ at the spectral edges.
    pub fn v_floor(&self, u: f64) -> f64 {
        let g = edge_gap(u);
        if g == 0.0 {
            f64::INFINITY
        } else {
            self.v0 / g.sqrt()
        }
    }

    pub fn contains(&self, z: Complex64) -> bool {
        let (u, v) = (z.re, z.im);
        u >= -2.0 + self.eps
            && u <= 2.0 - self.eps
            && v <= self.v_cap
            && v >= self.v_floor(u)
    }

    /// Lower boundary curve (u, v₀/√γ(u)) sampled across the admissible band.
    /// Empty when the region is empty.
    pub fn boundary_polyline(&self, samples: usize) -> Vec<(f64, f64)> {
        if self.is_empty() || samples < 2 {
            return Vec::new();
        }
        let lo = -2.0 + self.eps;
        let hi = 2.0 - self.eps;
        let step = (hi - lo) / (samples - 1) as f64;
        (0..samples)
            .map(|i| {
                let u = lo + step * i as f64;
                (u, self.v_floor(u))
            })
            .collect()
    }
}

/// Discretization of the smoothing contour: one horizontal line at height
/// v_cap spanning [−u_max, u_max], plus vertical segments dropping from the
/// horizontal line to the region floor over the admissible band.
#[derive(Debug, Clone)]
pub struct ContourGrid {
    /// u-nodes along the horizontal line at v = v_cap
    pub horizontal_u: Vec<f64>,
    pub v_cap: f64,
    pub u_max: f64,
    /// per-segment (x, v-nodes from floor to v_cap)
    pub verticals: Vec<(f64, Vec<f64>)>,
}

#[derive(Debug, thiserror::Error, PartialEq)]
pub enum GridError {
    #[error("grid would need {0} nodes (cap 1e8); coarsen the spacing")]
    TooManyNodes(u128),
    #[error("spacing must be positive")]
    BadSpacing,
}

/// Builds the contour grid with spacings `du`, `dv`. The horizontal extent
/// u_max is chosen so the neglected tail of the horizontal integral, which
/// decays like u⁻², is below `tail_tol` (both sides together: 2/u_max).
/// Node counts above 1e8 are rejected before any allocation.
pub fn contour_grid(
    params: &RegionParams,
    du: f64,
    dv: f64,
    tail_tol: f64,
) -> Result<ContourGrid, GridError> {
    if du <= 0.0 || dv <= 0.0 || tail_tol <= 0.0 {
        return Err(GridError::BadSpacing);
    }
    let u_max = (2.0 / tail_tol).max(2.0 * params.v_cap);
    let horiz_nodes = (2.0 * u_max / du) as u128 + 1;
    let vertical_segments: u128 = if params.is_empty() {
        0
    } else {
        ((4.0 - 2.0 * params.eps) / du) as u128 + 1
    };
    // worst-case vertical node count: full drop from v_cap to v0
    let per_segment = (params.v_cap / dv) as u128 + 1;
    let total = horiz_nodes + vertical_segments * per_segment;
    if total > 100_000_000 {
        return Err(GridError::TooManyNodes(total));
    }
    let mut horizontal_u = Vec::with_capacity(horiz_nodes as usize);
    let mut u = -u_max;
    while u <= u_max {
        horizontal_u.push(u);
        u += du;
    }
    let mut verticals = Vec::new();
    if !params.is_empty() {
        let lo = -2.0 + params.eps;
        let hi = 2.0 - params.eps;
        let mut x = lo;
        while x <= hi {
            let floor = params.v_floor(x).min(params.v_cap);
            let mut nodes = Vec::new();
            let mut v = floor;
            while v <= params.v_cap {
                nodes.push(v);
                v += dv;
            }
            verticals.push((x, nodes));
            x += du;
        }
    }
    Ok(ContourGrid { horizontal_u, v_cap: params.v_cap, u_max, verticals })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quad;

    fn z(u: f64, v: f64) -> Complex64 {
        Complex64::new(u, v)
    }

    #[test]
    fn s_at_reference_points() {
        // s(2i) = i(√2 − 1)
        let s1 = s_transform(z(0.0, 2.0));
        assert!((s1 - Complex64::new(0.0, 2f64.sqrt() - 1.0)).norm() < 1e-14);
        // s(i) = i(√5 − 1)/2
        let s2 = s_transform(z(0.0, 1.0));
        assert!((s2 - Complex64::new(0.0, (5f64.sqrt() - 1.0) / 2.0)).norm() < 1e-14);
    }

    #[test]
    fn s_satisfies_quadratic_on_grid() {
        let mut worst = 0.0f64;
        for iu in 0..100 {
            for iv in 0..100 {
                let u = -6.0 + 12.0 * iu as f64 / 99.0;
                let v = 1e-6 + 5.0 * iv as f64 / 99.0;
                let zz = z(u, v);
                let s = s_transform(zz);
                let resid = (s * s + zz * s + Complex64::new(1.0, 0.0)).norm();
                worst = worst.max(resid);
                assert!(s.im > 0.0, "Im s ≤ 0 at {zz}");
                assert!(s.norm() <= 1.0 + 1e-12, "|s| > 1 at {zz}");
            }
        }
        assert!(worst < 1e-12, "worst residual {worst}");
    }

    #[test]
    fn s_branch_continuous_near_axis_and_edges() {
        // product-of-roots form must not jump across u = 0 or |u| = 2
        for &(a, b) in &[(-1e-9, 1e-9), (2.0 - 1e-9, 2.0 + 1e-9), (-2.0 - 1e-9, -2.0 + 1e-9)] {
            let sa = s_transform(z(a, 0.05));
            let sb = s_transform(z(b, 0.05));
            assert!((sa - sb).norm() < 1e-6, "jump between {a} and {b}");
        }
    }

    #[test]
    fn s_is_stieltjes_of_semicircle_density() {
        // dual route: ∫ g(x)/(x − z) dx by adaptive quadrature
        let zz = z(0.7, 0.9);
        let (quad_val, _) = quad::integrate_complex(
            |x| Complex64::new(crate::semicircle::pdf(x), 0.0) / (Complex64::new(x, 0.0) - zz),
            -2.0,
            2.0,
            1e-12,
        );
        assert!((quad_val - s_transform(zz)).norm() < 1e-9);
    }

    #[test]
    fn m_single_eigenvalue_reference() {
        let m = m_from_lambdas(&[0.0], z(0.0, 2.0));
        assert!((m - Complex64::new(0.0, 0.5)).norm() < 1e-15);
        let gap = (m - s_transform(z(0.0, 2.0))).norm();
        assert!((gap - 0.0857864376269049).abs() < 1e-12, "|m−s| = {gap}");
    }

    #[test]
    fn m_prime_matches_central_difference() {
        let lambdas = [-1.3, -0.2, 0.4, 1.9];
        let zz = z(0.3, 0.8);
        let h = 1e-6;
        let num = (m_from_lambdas(&lambdas, zz + Complex64::new(h, 0.0))
            - m_from_lambdas(&lambdas, zz - Complex64::new(h, 0.0)))
            / Complex64::new(2.0 * h, 0.0);
        assert!((num - m_prime_from_lambdas(&lambdas, zz)).norm() < 1e-8);
    }

    #[test]
    fn a_constant_closed_form_vs_quadrature_bisection() {
        // independent oracle: find a with ∫_{−a}^{a} dx/(π(1+x²)) = 3/4
        let cauchy_mass = |a: f64| {
            quad::integrate(|x| 1.0 / (std::f64::consts::PI * (1.0 + x * x)), -a, a, 1e-13)
                .value
        };
        let (mut lo, mut hi) = (1.0, 10.0);
        for _ in 0..60 {
            let mid = 0.5 * (lo + hi);
            if cauchy_mass(mid) < 0.75 {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        let oracle = 0.5 * (lo + hi);
        assert!((a_constant() - oracle).abs() < 1e-10, "oracle {oracle}");
        assert!((a_constant() - (1.0 + 2f64.sqrt())).abs() < 1e-15);
    }

    #[test]
    fn region_scale_examples() {
        let p = RegionParams::from_scale(10_000, 1.0);
        assert!((p.v0 - 0.71969).abs() < 1e-4, "v0 = {}", p.v0);
        // at this size the asymptotic-scale margin swallows the whole band
        assert!(p.is_empty());
        assert!(p.boundary_polyline(100).is_empty());
        assert!(!p.contains(z(0.0, 1.0)));
        // larger n: region opens up
        let q = RegionParams::from_scale(100_000, 1.0);
        assert!(!q.is_empty(), "eps = {}", q.eps);
    }

    #[test]
    fn region_membership_desk_scale() {
        let p = RegionParams::with_v0(10_000, 10.0 / 10_000.0);
        assert!(!p.is_empty());
        // center: floor = v0/√2
        let floor0 = p.v_floor(0.0);
        assert!((floor0 - p.v0 / 2f64.sqrt()).abs() < 1e-15);
        assert!(p.contains(z(0.0, floor0)));
        assert!(p.contains(z(0.0, 4.0)));
        assert!(!p.contains(z(0.0, 4.0 + 1e-9)));
        assert!(!p.contains(z(0.0, floor0 * 0.999)));
        assert!(!p.contains(z(2.0 - p.eps + 1e-9, 1.0)));
        assert!(p.contains(z(2.0 - p.eps, p.v_floor(2.0 - p.eps))));
        // floor rises toward the edges
        assert!(p.v_floor(1.9) > p.v_floor(0.5));
        assert!(p.v_floor(2.0).is_infinite());
    }

    #[test]
    fn contour_grid_counts_and_cap() {
        let p = RegionParams::with_v0(1000, 0.01);
        // fine spacing with the default tail would explode: must be rejected
        let err = contour_grid(&p, 1e-3, 1e-3, 1e-6).unwrap_err();
        assert!(matches!(err, GridError::TooManyNodes(_)));
        // coarse tail tolerance keeps it allocatable
        let g = contour_grid(&p, 0.05, 0.01, 1e-3).unwrap();
        assert!((g.u_max - 2000.0).abs() < 1e-9);
        assert!(!g.horizontal_u.is_empty());
        assert!(!g.verticals.is_empty());
        for (x, nodes) in &g.verticals {
            assert!(*x >= -2.0 + p.eps - 1e-12 && *x <= 2.0 - p.eps + 1e-12);
            assert!(!nodes.is_empty());
            assert!(nodes[0] >= p.v_floor(*x).min(p.v_cap) - 1e-12);
        }
        assert_eq!(contour_grid(&p, -1.0, 0.1, 1e-3).unwrap_err(), GridError::BadSpacing);
    }
}
