//! Acceptance suite: the nine checks this project must pass, one test per
//! criterion, each ending in a single `[PASS]`/`[FAIL]` line with its
//! headline numbers (visible with `cargo test -- --nocapture`).
//!
//! Tolerances and budgets are stated inline; none of them are tuned to the
//! observed values — they are the project's contract.

use std::time::Instant;

use num_complex::Complex64;
use rml_core::bounds;
use rml_core::ensemble::{sample_wigner, EntryLaw};
use rml_core::exec::run_with_threads;
use rml_core::quad;
use rml_core::resolvent;
use rml_core::rng::CounterRng;
use rml_core::semicircle;
use rml_core::spectral::{
    self, kolmogorov_distance, kolmogorov_distance_grid, QuantileConvention, SemicircleQuantiles,
};
use rml_core::stieltjes;

fn report(criterion: u32, pass: bool, detail: &str) {
    let tag = if pass { "PASS" } else { "FAIL" };
    println!("[{tag}] criterion {criterion}: {detail}");
    assert!(pass, "criterion {criterion} failed: {detail}");
}

/// Deterministic stream of (law, n, z, deleted-index candidates) instances.
fn random_instance(i: u64, n_max: usize) -> (EntryLaw, usize, Complex64, Vec<usize>) {
    let law = match i % 5 {
        0 => EntryLaw::rademacher(),
        1 => EntryLaw::two_point(2.0).unwrap(),
        2 => EntryLaw::truncated_gaussian(f64::INFINITY).unwrap(),
        3 => EntryLaw::truncated_gaussian(2.5).unwrap(),
        _ => EntryLaw::discrete_table(&[(-2.0, 0.125), (0.0, 0.75), (2.0, 0.125)]).unwrap(),
    };
    let mut rng = CounterRng::for_tag(0xACCE_9701, i);
    let n = 10 + (rng.next_u64() as usize) % (n_max - 9);
    let u = -3.0 + 6.0 * rng.next_f64();
    let v = 0.05 + 1.95 * rng.next_f64();
    let mut js = Vec::new();
    while js.len() < 3 {
        let j = (rng.next_f64() * n as f64) as usize;
        let j = j.min(n - 1);
        if !js.contains(&j) {
            js.push(j);
        }
    }
    js.sort_unstable();
    (law, n, Complex64::new(u, v), js)
}

#[test]
fn c1_resolvent_identities_hold_on_random_instances() {
    let t0 = Instant::now();
    let mut max_residual = 0.0f64;
    let mut failures = 0usize;
    let mut checks = 0usize;
    for i in 0..100u64 {
        let (law, n, z, js) = random_instance(i, 100);
        let sample = sample_wigner(&law, n, 0xC1_0000 + i).unwrap();
        let reports = resolvent::identity_suite(&sample, z, &js).unwrap();
        for r in &reports {
            checks += 1;
            max_residual = max_residual.max(r.residual);
            if r.residual > 1e-8 {
                failures += 1;
            }
        }
    }
    let dt = t0.elapsed().as_secs_f64();
    let pass = failures == 0 && dt < 60.0;
    report(
        1,
        pass,
        &format!(
            "{checks} identity checks over 100 instances, max residual {max_residual:.3e} (tol 1e-8), {dt:.1}s (< 60s)"
        ),
    );
}

#[test]
fn c2_resolvent_inequalities_zero_violations() {
    let t0 = Instant::now();
    let mut violations = 0usize;
    let mut checks = 0usize;
    let mut worst_ward_rel = 0.0f64;
    for i in 0..100u64 {
        let (law, n, z, js) = random_instance(i, 100);
        let sample = sample_wigner(&law, n, 0xC2_0000 + i).unwrap();
        for deleted in [&[][..], &js[..1], &js[..]] {
            let suite = resolvent::inequality_suite(&sample, z, deleted, &[1, 2]).unwrap();
            for c in &suite.checks {
                checks += 1;
                if !c.pass {
                    violations += 1;
                }
                // criterion: mean-energy identity is an equality at J = ∅
                if deleted.is_empty() && c.name == "ward_mean_energy" {
                    let scale = c.lhs.abs().max(c.rhs.abs()).max(1.0);
                    worst_ward_rel = worst_ward_rel.max(c.margin.abs() / scale);
                }
            }
        }
    }
    let dt = t0.elapsed().as_secs_f64();
    let pass = violations == 0 && worst_ward_rel <= 1e-10 && dt < 60.0;
    report(
        2,
        pass,
        &format!(
            "{checks} inequality checks, {violations} violations, ward equality at J=∅ within {worst_ward_rel:.3e} (tol 1e-10), {dt:.1}s (< 60s)"
        ),
    );
}

#[test]
fn c3_semicircle_analytics() {
    let t0 = Instant::now();
    // (a) the transform satisfies its defining quadratic on a 10⁴-point grid
    let mut worst_quadratic = 0.0f64;
    for iu in 0..100 {
        for iv in 0..100 {
            let z = Complex64::new(-5.0 + 10.0 * iu as f64 / 99.0, 0.02 + 5.0 * iv as f64 / 99.0);
            let s = stieltjes::s_transform(z);
            worst_quadratic = worst_quadratic.max((s * s + z * s + Complex64::new(1.0, 0.0)).norm());
        }
    }
    // (b) closed-form distribution function vs direct density quadrature
    let mut worst_cdf = 0.0f64;
    for k in 0..=40 {
        let x = -2.2 + 4.4 * k as f64 / 40.0;
        let q = quad::integrate(semicircle::pdf, -2.0, x.min(2.0), 1e-12);
        let reference = if x <= -2.0 { 0.0 } else { q.value };
        worst_cdf = worst_cdf.max((semicircle::cdf(x) - reference).abs());
    }
    // (c) quantile/cdf round trip
    let mut worst_roundtrip = 0.0f64;
    for k in 1..1000 {
        let q = k as f64 / 1000.0;
        worst_roundtrip = worst_roundtrip.max((semicircle::cdf(semicircle::quantile(q)) - q).abs());
    }
    // (d) the Cauchy-mass constant
    let a_err = (stieltjes::a_constant() - (1.0 + 2.0f64.sqrt())).abs();
    let dt = t0.elapsed().as_secs_f64();
    let pass =
        worst_quadratic <= 1e-12 && worst_cdf <= 1e-10 && worst_roundtrip <= 1e-9 && a_err <= 1e-12;
    report(
        3,
        pass,
        &format!(
            "quadratic {worst_quadratic:.3e} (tol 1e-12), cdf-vs-quadrature {worst_cdf:.3e} (tol 1e-10), roundtrip {worst_roundtrip:.3e} (tol 1e-9), a-constant err {a_err:.3e} (tol 1e-12), {dt:.1}s"
        ),
    );
}

#[test]
fn c4_kolmogorov_jump_formula_matches_grid_oracle() {
    let t0 = Instant::now();
    let mut worst = 0.0f64;
    for i in 0..50u64 {
        let (law, _, _, _) = random_instance(i, 100);
        let mut rng = CounterRng::for_tag(0xC4_0000, i);
        let n = 20 + (rng.next_u64() as usize) % 481; // ≤ 500
        let sample = sample_wigner(&law, n, 0xC4_1000 + i).unwrap();
        let spectrum = spectral::eigenvalues(&sample).unwrap();
        let exact = kolmogorov_distance(&spectrum);
        let grid = kolmogorov_distance_grid(&spectrum, 1_000_000);
        worst = worst.max((exact - grid).abs());
    }
    let dt = t0.elapsed().as_secs_f64();
    let pass = worst <= 2e-6 && dt < 60.0;
    report(
        4,
        pass,
        &format!("50 spectra (n ≤ 500), max |jump − grid| = {worst:.3e} (tol 2e-6), {dt:.1}s (< 60s)"),
    );
}

#[test]
fn c5_rate_slope_in_envelope() {
    let t0 = Instant::now();
    let law = EntryLaw::rademacher();
    let exp =
        bounds::rate_experiment(&law, &[128, 256, 512, 1024, 2048], 1, 200, 0xC5_2026).unwrap();
    let dt = t0.elapsed().as_secs_f64();
    let slope = exp.fit.slope;
    let pass = (-1.2..=-0.8).contains(&slope) && dt <= 900.0;
    report(
        5,
        pass,
        &format!(
            "rademacher rate slope {slope:.4} (need [-1.2, -0.8]), log-corrected {:.4}, {dt:.0}s (≤ 900s)",
            exp.fit.slope_logcorrected
        ),
    );
}

#[test]
fn c6_stieltjes_scan_score_bounded() {
    let t0 = Instant::now();
    let law = EntryLaw::rademacher();
    let points = bounds::stieltjes_scan(
        &law,
        &[256, 512, 1024],
        &[1, 2],
        0.0,
        |n| 10.0 / n as f64,
        100,
        0xC6_2026,
        1.0,
    )
    .unwrap();
    let mut lo = f64::INFINITY;
    let mut hi = 0.0f64;
    for pt in &points {
        lo = lo.min(pt.score);
        hi = hi.max(pt.score);
    }
    let spread = hi / lo;
    let dt = t0.elapsed().as_secs_f64();
    let pass = spread <= 3.0 && dt <= 600.0;
    report(
        6,
        pass,
        &format!(
            "score root·nv/p over n ∈ {{256,512,1024}}, p ∈ {{1,2}}: [{lo:.4}, {hi:.4}], spread ×{spread:.2} (≤ ×3), {dt:.0}s (≤ 600s)"
        ),
    );
}

#[test]
fn c7_truncation_rank_bound_holds() {
    let t0 = Instant::now();
    let law = EntryLaw::truncated_gaussian(f64::INFINITY).unwrap();
    let zs = [
        Complex64::new(0.0, 1.0),
        Complex64::new(0.0, 0.5),
        Complex64::new(1.0, 0.5),
    ];
    let mut checks = 0usize;
    let mut failures = 0usize;
    let mut worst_ratio = 0.0f64;
    for r in 0..50u64 {
        let rep = bounds::truncation_impact(&law, 128, 0.5, 0xC7_0000 + r, &zs).unwrap();
        for g in &rep.gap_checks {
            checks += 1;
            if !g.pass {
                failures += 1;
            }
            worst_ratio = worst_ratio.max(g.gap / g.bound);
        }
    }
    let dt = t0.elapsed().as_secs_f64();
    let pass = failures == 0 && dt < 60.0;
    report(
        7,
        pass,
        &format!(
            "{checks} rank-bound checks (n=128, 50 replicas), 0 expected violations, got {failures}, worst gap/bound {worst_ratio:.3}, {dt:.1}s (< 60s)"
        ),
    );
}

#[test]
fn c8_rigidity_synthetic_zero_and_sampled_finite() {
    let t0 = Instant::now();
    // synthetic spectrum at the quantiles: every ρ must be exactly zero
    let n_syn = 500;
    let spectrum = bounds::quantile_spectrum(n_syn, QuantileConvention::RightEndpoint);
    let quantiles = SemicircleQuantiles::compute(n_syn, QuantileConvention::RightEndpoint);
    let rep = spectral::rigidity_check(&spectrum, &quantiles, 1.0, 0.01);
    let synthetic_zero = rep.window.is_some()
        && rep.entries.iter().all(|e| e.rho == 0.0)
        && rep.max_rho == Some(0.0);

    // sampled statistic: finite 95th percentile of max ρ at n = 2048
    let law = EntryLaw::rademacher();
    let exp = bounds::rigidity_experiment(
        &law,
        2048,
        100,
        1.0,
        0.01,
        0xC8_2026,
        QuantileConvention::RightEndpoint,
    )
    .unwrap();
    let dt = t0.elapsed().as_secs_f64();
    let finite = exp.window.is_some() && exp.rho_p95.is_finite() && exp.max_rho.is_finite();
    let pass = synthetic_zero && finite && dt <= 600.0;
    report(
        8,
        pass,
        &format!(
            "synthetic ρ all zero: {synthetic_zero}; rademacher n=2048, 100 replicas: p95 max ρ = {:.4e} (finite, reported; no constant asserted), window {:?}, {dt:.0}s (≤ 600s)",
            exp.rho_p95, exp.window
        ),
    );
}

fn estimate_bits(e: &bounds::LpEstimate) -> [u64; 6] {
    [
        e.mean_pow.to_bits(),
        e.root.to_bits(),
        e.median.to_bits(),
        e.max.to_bits(),
        e.ci_low.to_bits(),
        e.ci_high.to_bits(),
    ]
}

#[test]
fn c9_bit_identical_across_runs_and_parallelism() {
    // core experiments at two parallelism degrees
    let law = EntryLaw::rademacher();
    let run_rate = |jobs: usize| {
        run_with_threads(Some(jobs), || {
            bounds::rate_experiment(&law, &[64, 128], 1, 8, 0xC9_2026).unwrap()
        })
    };
    let a = run_rate(1);
    let b = run_rate(4);
    let c = run_rate(1); // re-run at the original degree
    let mut same = a.fit.slope.to_bits() == b.fit.slope.to_bits()
        && a.fit.slope.to_bits() == c.fit.slope.to_bits()
        && a.fit.intercept.to_bits() == b.fit.intercept.to_bits();
    for ((pa, pb), pc) in a.points.iter().zip(&b.points).zip(&c.points) {
        same &= estimate_bits(&pa.estimate) == estimate_bits(&pb.estimate);
        same &= estimate_bits(&pa.estimate) == estimate_bits(&pc.estimate);
    }

    let run_scan = |jobs: usize| {
        run_with_threads(Some(jobs), || {
            bounds::stieltjes_scan(&law, &[64, 128], &[1, 2], 0.0, |n| 10.0 / n as f64, 6, 0xC9_5CA0, 1.0)
                .unwrap()
        })
    };
    let sa = run_scan(1);
    let sb = run_scan(4);
    for (x, y) in sa.iter().zip(&sb) {
        same &= x.score.to_bits() == y.score.to_bits()
            && estimate_bits(&x.estimate) == estimate_bits(&y.estimate);
    }

    // the shipped binary end to end, rerun and at different --jobs
    let dir = std::env::temp_dir().join(format!("rml-acc9-{}", std::process::id()));
    let _ = std::fs::remove_dir_all(&dir);
    std::fs::create_dir_all(&dir).unwrap();
    let cfg = dir.join("c.cfg");
    std::fs::write(&cfg, "law = rademacher\nn = 48\nreplicas = 6\np = 1,2\nseed = 13\ntimestamp = 0\n")
        .unwrap();
    let mut bodies = Vec::new();
    for (sub, jobs) in [("r1", "1"), ("r2", "1"), ("r3", "4")] {
        let out = dir.join(sub);
        let status = std::process::Command::new(env!("CARGO_BIN_EXE_rml"))
            .args([
                "delta",
                "--config",
                cfg.to_str().unwrap(),
                "--out",
                out.to_str().unwrap(),
                "--jobs",
                jobs,
            ])
            .output()
            .unwrap();
        assert!(status.status.success());
        bodies.push(std::fs::read(out.join("results.csv")).unwrap());
    }
    same &= bodies[0] == bodies[1] && bodies[0] == bodies[2];
    report(
        9,
        same,
        "rate + scan statistics and binary results.csv bit-identical across reruns and thread counts {1, 4}",
    );
}
