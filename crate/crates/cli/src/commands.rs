//! One function per subcommand. Every command follows the same shape:
//! read all config keys up front (so typos abort before any computation),
//! compute through the core crate, then write results.csv rows plus a
//! sidecar artifact, all atomically.
//!
//! Exit-code contract: Ok(Outcome { pass: true }) → 0, pass: false → 1,
//! Err(_) → 2 (the run could not be carried out as configured).

use std::fmt::Write as _;
use std::path::PathBuf;

use num_complex::Complex64;
use rml_core::bounds;
use rml_core::ensemble::{sample_wigner, EntryLaw};
use rml_core::resolvent;
use rml_core::rng::{seed_stream, CounterRng};
use rml_core::semicircle;
use rml_core::spectral::{self, QuantileConvention, SemicircleQuantiles};
use rml_core::stieltjes::{self, RegionParams};

use crate::config::{Config, ConfigError};
use crate::output::{self, ResultRecord};

#[derive(Debug)]
pub struct RunError(pub String);

impl std::fmt::Display for RunError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}", self.0)
    }
}

impl From<ConfigError> for RunError {
    fn from(e: ConfigError) -> Self {
        RunError(e.to_string())
    }
}

impl From<std::io::Error> for RunError {
    fn from(e: std::io::Error) -> Self {
        RunError(format!("io error: {e}"))
    }
}

impl From<bounds::ExperimentError> for RunError {
    fn from(e: bounds::ExperimentError) -> Self {
        RunError(format!("computation failed: {e}"))
    }
}

impl From<rml_core::linalg::SingularError> for RunError {
    fn from(e: rml_core::linalg::SingularError) -> Self {
        RunError(format!("computation failed: {e}"))
    }
}

impl From<rml_core::ensemble::PipelineError> for RunError {
    fn from(e: rml_core::ensemble::PipelineError) -> Self {
        RunError(format!("pipeline failed: {e}"))
    }
}

pub struct Outcome {
    pub pass: bool,
}

pub struct Ctx {
    pub cfg: Config,
    pub out_dir: PathBuf,
    pub command: &'static str,
}

impl Ctx {
    fn law(&self) -> Result<EntryLaw, RunError> {
        let raw = self.cfg.require("law")?;
        EntryLaw::parse(&raw).map_err(|e| RunError(format!("key \"law\": {e}")))
    }

    fn seed(&self) -> Result<u64, RunError> {
        Ok(self.cfg.get_u64("seed", 1)?)
    }

    /// Config key wins, then the RML_TIMESTAMP env var, then wall clock.
    fn timestamp(&self) -> Result<u64, RunError> {
        if let Some(t) = self.cfg.opt_str("timestamp") {
            return t
                .parse()
                .map_err(|e| RunError(format!("key \"timestamp\": {e}")));
        }
        if let Ok(t) = std::env::var("RML_TIMESTAMP") {
            return t
                .parse()
                .map_err(|e| RunError(format!("RML_TIMESTAMP: {e}")));
        }
        Ok(std::time::SystemTime::now()
            .duration_since(std::time::UNIX_EPOCH)
            .map(|d| d.as_secs())
            .unwrap_or(0))
    }

    fn experiment_id(&self, seed: u64) -> String {
        format!("{}-{}-s{}", self.command, &self.cfg.hash()[..8], seed)
    }

    fn record(
        &self,
        id: &str,
        timestamp: u64,
        law: &str,
        n: usize,
        p: u32,
        replicas: usize,
        seed: u64,
        statistic: &str,
        value: f64,
    ) -> ResultRecord {
        ResultRecord {
            experiment_id: id.to_string(),
            timestamp,
            config_hash: self.cfg.hash(),
            law: law.to_string(),
            n,
            p,
            replicas,
            seed,
            statistic: statistic.to_string(),
            value,
            ci_low: None,
            ci_high: None,
            tolerance: None,
            margin: None,
            pass: None,
        }
    }
}

fn uniform_in(rng: &mut CounterRng, lo: f64, hi: f64) -> f64 {
    lo + rng.next_f64() * (hi - lo)
}

fn distinct_indices(rng: &mut CounterRng, count: usize, n: usize) -> Vec<usize> {
    assert!(count <= n);
    let mut picked = Vec::with_capacity(count);
    while picked.len() < count {
        let j = (rng.next_f64() * n as f64) as usize;
        let j = j.min(n - 1);
        if !picked.contains(&j) {
            picked.push(j);
        }
    }
    picked.sort_unstable();
    picked
}

pub fn run_delta(ctx: &Ctx) -> Result<Outcome, RunError> {
    let law = ctx.law()?;
    // `n` runs one size; `ns` sweeps a list of sizes (one estimate row per
    // size per p, seeded per size exactly like the rate experiment).
    let has_n = ctx.cfg.opt_str("n").is_some();
    let has_ns = ctx.cfg.opt_str("ns").is_some();
    let sizes = match (has_n, has_ns) {
        (true, false) => vec![ctx.cfg.require_usize("n")?],
        (false, true) => ctx.cfg.require_usize_list("ns")?,
        (true, true) => {
            return Err(RunError("give either key \"n\" or key \"ns\", not both".into()))
        }
        (false, false) => return Err(RunError("missing required key \"n\" (or \"ns\")".into())),
    };
    let replicas = ctx.cfg.get_usize("replicas", 50)?;
    let ps = ctx.cfg.get_u32_list("p", &[1])?;
    let seed = ctx.seed()?;
    let ts = ctx.timestamp()?;
    ctx.cfg.finish()?;

    let id = ctx.experiment_id(seed);
    let law_s = law.to_string();
    let mut rows = Vec::new();
    for &n in &sizes {
        let size_seed = if has_ns { seed_stream(seed, n as u64) } else { seed };
        let samples = bounds::delta_samples(&law, n, replicas, size_seed)?;
        for &p in &ps {
            let est = bounds::lp_estimate(p, &samples, seed_stream(size_seed, p as u64));
            let mut root =
                ctx.record(&id, ts, &law_s, n, p, replicas, seed, "delta_root", est.root);
            root.ci_low = Some(est.ci_low);
            root.ci_high = Some(est.ci_high);
            rows.push(root);
            rows.push(ctx.record(
                &id,
                ts,
                &law_s,
                n,
                p,
                replicas,
                seed,
                "delta_mean_pow",
                est.mean_pow,
            ));
            println!(
                "delta: n={n} p={p} root={:.6e} ci=[{:.6e},{:.6e}] median={:.6e} max={:.6e}",
                est.root, est.ci_low, est.ci_high, est.median, est.max
            );
        }
        let sidecar_id = if has_ns { format!("{id}_n{n}") } else { id.clone() };
        output::write_replica_sidecar(&ctx.out_dir, &sidecar_id, &samples)?;
    }
    output::append_results(&ctx.out_dir, &rows)?;
    Ok(Outcome { pass: true })
}

pub fn run_rate(ctx: &Ctx) -> Result<Outcome, RunError> {
    let law = ctx.law()?;
    let ns = ctx.cfg.require_usize_list("ns")?;
    let p = ctx.cfg.get_u32_list("p", &[1])?[0];
    let replicas = ctx.cfg.get_usize("replicas", 100)?;
    let seed = ctx.seed()?;
    let ts = ctx.timestamp()?;
    let slope_min = ctx.cfg.opt_f64("expect_slope_min")?;
    let slope_max = ctx.cfg.opt_f64("expect_slope_max")?;
    ctx.cfg.finish()?;

    let exp = bounds::rate_experiment(&law, &ns, p, replicas, seed)?;
    let id = ctx.experiment_id(seed);
    let law_s = law.to_string();
    let mut rows = Vec::new();
    let mut sidecar = String::from("n,p,root,ci_low,ci_high,mean_pow,median,max\n");
    for pt in &exp.points {
        let e = &pt.estimate;
        let mut row =
            ctx.record(&id, ts, &law_s, pt.n, p, replicas, seed, "delta_root", e.root);
        row.ci_low = Some(e.ci_low);
        row.ci_high = Some(e.ci_high);
        rows.push(row);
        let _ = writeln!(
            sidecar,
            "{},{},{},{},{},{},{},{}",
            pt.n, p, e.root, e.ci_low, e.ci_high, e.mean_pow, e.median, e.max
        );
    }
    let in_range = match (slope_min, slope_max) {
        (Some(lo), Some(hi)) => exp.fit.slope >= lo && exp.fit.slope <= hi,
        (Some(lo), None) => exp.fit.slope >= lo,
        (None, Some(hi)) => exp.fit.slope <= hi,
        (None, None) => true,
    };
    let mut slope_row =
        ctx.record(&id, ts, &law_s, 0, p, replicas, seed, "rate_slope", exp.fit.slope);
    slope_row.pass = Some(in_range);
    if let (Some(lo), Some(hi)) = (slope_min, slope_max) {
        slope_row.tolerance = Some(hi - lo);
        slope_row.margin = Some((exp.fit.slope - lo).min(hi - exp.fit.slope));
    }
    rows.push(slope_row);
    rows.push(ctx.record(
        &id,
        ts,
        &law_s,
        0,
        p,
        replicas,
        seed,
        "rate_slope_logcorrected",
        exp.fit.slope_logcorrected,
    ));
    rows.push(ctx.record(
        &id,
        ts,
        &law_s,
        0,
        p,
        replicas,
        seed,
        "rate_intercept",
        exp.fit.intercept,
    ));
    output::append_results(&ctx.out_dir, &rows)?;
    output::write_atomic(&ctx.out_dir.join(format!("{id}_points.csv")), &sidecar)?;
    println!(
        "rate: slope={:.4} logcorrected={:.4} intercept={:.4} pass={in_range}",
        exp.fit.slope, exp.fit.slope_logcorrected, exp.fit.intercept
    );
    Ok(Outcome { pass: in_range })
}

pub fn run_stieltjes(ctx: &Ctx) -> Result<Outcome, RunError> {
    let law = ctx.law()?;
    let n = ctx.cfg.require_usize("n")?;
    let u = ctx.cfg.get_f64("u", 0.0)?;
    let v = match ctx.cfg.opt_str("v").as_deref() {
        None | Some("auto") => 10.0 / n as f64,
        Some(raw) => raw
            .parse()
            .map_err(|e| RunError(format!("key \"v\": {e}")))?,
    };
    if v <= 0.0 {
        return Err(RunError("key \"v\": must be > 0".into()));
    }
    let ps = ctx.cfg.get_u32_list("p", &[1])?;
    let replicas = ctx.cfg.get_usize("replicas", 50)?;
    let a1 = ctx.cfg.get_f64("a1", 1.0)?;
    let seed = ctx.seed()?;
    let ts = ctx.timestamp()?;
    ctx.cfg.finish()?;

    let z = Complex64::new(u, v);
    let gaps = bounds::stieltjes_gap_samples(&law, n, z, replicas, seed)?;
    let id = ctx.experiment_id(seed);
    let law_s = law.to_string();
    let mut rows = Vec::new();
    for &p in &ps {
        let est = bounds::lp_estimate(p, &gaps, seed_stream(seed, p as u64));
        let score = est.root * (n as f64 * v) / p as f64;
        let within = (p as f64) <= a1 * (n as f64 * v).powf(0.25);
        let mut row =
            ctx.record(&id, ts, &law_s, n, p, replicas, seed, "stieltjes_gap_root", est.root);
        row.ci_low = Some(est.ci_low);
        row.ci_high = Some(est.ci_high);
        rows.push(row);
        rows.push(ctx.record(&id, ts, &law_s, n, p, replicas, seed, "stieltjes_score", score));
        println!(
            "stieltjes: n={n} z={u}+{v}i p={p} root={:.6e} score={:.4} in_moment_range={within}",
            est.root, score
        );
    }
    output::append_results(&ctx.out_dir, &rows)?;
    output::write_replica_sidecar(&ctx.out_dir, &id, &gaps)?;
    Ok(Outcome { pass: true })
}

pub fn run_scan(ctx: &Ctx) -> Result<Outcome, RunError> {
    let law = ctx.law()?;
    let ns = ctx.cfg.require_usize_list("ns")?;
    let ps = ctx.cfg.get_u32_list("p", &[1, 2])?;
    let u = ctx.cfg.get_f64("u", 0.0)?;
    let nv = ctx.cfg.get_f64("nv", 10.0)?;
    let replicas = ctx.cfg.get_usize("replicas", 50)?;
    let a1 = ctx.cfg.get_f64("a1", 1.0)?;
    let spread_max = ctx.cfg.opt_f64("expect_score_spread_max")?;
    let seed = ctx.seed()?;
    let ts = ctx.timestamp()?;
    ctx.cfg.finish()?;
    if nv <= 0.0 {
        return Err(RunError("key \"nv\": must be > 0".into()));
    }

    let points =
        bounds::stieltjes_scan(&law, &ns, &ps, u, |n| nv / n as f64, replicas, seed, a1)?;
    let id = ctx.experiment_id(seed);
    let law_s = law.to_string();
    let mut rows = Vec::new();
    let mut sidecar =
        String::from("n,p,u,v,root,ci_low,ci_high,score,within_moment_range\n");
    let mut score_lo = f64::INFINITY;
    let mut score_hi = 0.0f64;
    for pt in &points {
        let e = &pt.estimate;
        let mut row =
            ctx.record(&id, ts, &law_s, pt.n, pt.p, replicas, seed, "scan_gap_root", e.root);
        row.ci_low = Some(e.ci_low);
        row.ci_high = Some(e.ci_high);
        rows.push(row);
        rows.push(ctx.record(&id, ts, &law_s, pt.n, pt.p, replicas, seed, "scan_score", pt.score));
        score_lo = score_lo.min(pt.score);
        score_hi = score_hi.max(pt.score);
        let _ = writeln!(
            sidecar,
            "{},{},{},{},{},{},{},{},{}",
            pt.n, pt.p, pt.u, pt.v, e.root, e.ci_low, e.ci_high, pt.score, pt.within_moment_range
        );
    }
    let spread = score_hi / score_lo;
    let pass = spread_max.map_or(true, |cap| spread <= cap);
    let mut spread_row =
        ctx.record(&id, ts, &law_s, 0, 0, replicas, seed, "scan_score_spread", spread);
    spread_row.pass = Some(pass);
    if let Some(cap) = spread_max {
        spread_row.tolerance = Some(cap);
        spread_row.margin = Some(cap - spread);
    }
    rows.push(spread_row);
    output::append_results(&ctx.out_dir, &rows)?;
    output::write_atomic(&ctx.out_dir.join(format!("{id}_scan.csv")), &sidecar)?;
    println!("scan: {} points, score spread ×{spread:.3} pass={pass}", points.len());
    Ok(Outcome { pass })
}

pub fn run_smoothing(ctx: &Ctx) -> Result<Outcome, RunError> {
    let source = ctx.cfg.get_str("source", "sample");
    let n = ctx.cfg.require_usize("n")?;
    let partition = ctx.cfg.get_usize("partition", 1000)?;
    let seed = ctx.seed()?;
    let ts = ctx.timestamp()?;
    let v0 = match ctx.cfg.opt_str("v0").as_deref() {
        None => 10.0 / n as f64,
        Some("scale") => {
            let a0 = ctx.cfg.get_f64("a0", 1.0)?;
            a0 * (n as f64).ln().powi(4) / n as f64
        }
        Some(raw) => raw
            .parse()
            .map_err(|e| RunError(format!("key \"v0\": {e}")))?,
    };
    let (law_s, spectrum) = match source.as_str() {
        "quantile" => (
            "synthetic_quantile".to_string(),
            bounds::quantile_spectrum(n, QuantileConvention::RightEndpoint),
        ),
        "sample" => {
            let law = ctx.law()?;
            let sample = sample_wigner(&law, n, seed)?;
            let spectrum = spectral::eigenvalues(&sample)
                .map_err(|e| RunError(format!("eigensolver: {e}")))?;
            (law.to_string(), spectrum)
        }
        other => return Err(RunError(format!("key \"source\": unknown value {other:?}"))),
    };
    ctx.cfg.finish()?;
    if v0 <= 0.0 {
        return Err(RunError("key \"v0\": must be > 0".into()));
    }

    let params = RegionParams::with_v0(n, v0);
    let br = bounds::smoothing_breakdown(&spectrum, &params, partition);
    let id = ctx.experiment_id(seed);
    let stats = [
        ("smoothing_delta_actual", br.delta_actual),
        ("smoothing_term_horizontal", br.term_horizontal),
        ("smoothing_term_vertical_sup", br.term_vertical_sup),
        ("smoothing_term_v0", br.term_v0),
        ("smoothing_term_eps", br.term_eps),
        ("smoothing_implied_constant", br.implied_constant),
    ];
    let mut rows = Vec::new();
    for (name, value) in stats {
        let mut row = ctx.record(&id, ts, &law_s, n, 1, 1, seed, name, value);
        if name == "smoothing_delta_actual" {
            row.pass = Some(br.quad_converged);
        }
        rows.push(row);
    }
    output::append_results(&ctx.out_dir, &rows)?;
    let json = serde_json::to_string_pretty(&br)
        .map_err(|e| RunError(format!("serialize: {e}")))?;
    output::write_atomic(&ctx.out_dir.join(format!("{id}_breakdown.json")), &json)?;
    println!(
        "smoothing: Δ={:.4e} horizontal={:.4e} vertical={:.4e} v0={:.4e} eps^1.5={:.4e} C={:.3}",
        br.delta_actual,
        br.term_horizontal,
        br.term_vertical_sup,
        br.term_v0,
        br.term_eps,
        br.implied_constant
    );
    Ok(Outcome { pass: br.quad_converged })
}

pub fn run_truncation(ctx: &Ctx) -> Result<Outcome, RunError> {
    let law = ctx.law()?;
    let n = ctx.cfg.require_usize("n")?;
    let c = ctx.cfg.get_f64("c", 1.0)?;
    let replicas = ctx.cfg.get_usize("replicas", 50)?;
    let zs = ctx.cfg.get_z_list("zs", &[(0.0, 0.5), (1.0, 0.2)])?;
    let seed = ctx.seed()?;
    let ts = ctx.timestamp()?;
    ctx.cfg.finish()?;
    let z_points: Vec<Complex64> = zs.iter().map(|&(u, v)| Complex64::new(u, v)).collect();

    let id = ctx.experiment_id(seed);
    let law_s = law.to_string();
    let mut sidecar = String::from(
        "replica,zeroed,changed_rows,delta_raw,delta_truncated,delta_final,worst_gap_ratio\n",
    );
    let mut zeroed_sum = 0.0;
    let mut changed_max = 0usize;
    let mut delta_final_sum = 0.0;
    let mut bound_failures = 0usize;
    for r in 0..replicas {
        let rep = bounds::truncation_impact(&law, n, c, seed_stream(seed, r as u64), &z_points)?;
        let worst_ratio = rep
            .gap_checks
            .iter()
            .map(|g| g.gap / g.bound)
            .fold(0.0f64, f64::max);
        bound_failures += rep.gap_checks.iter().filter(|g| !g.pass).count();
        zeroed_sum += rep.zeroed_entries as f64;
        changed_max = changed_max.max(rep.changed_rows);
        delta_final_sum += rep.delta_final;
        let _ = writeln!(
            sidecar,
            "{r},{},{},{},{},{},{}",
            rep.zeroed_entries,
            rep.changed_rows,
            rep.delta_raw,
            rep.delta_truncated,
            rep.delta_final,
            worst_ratio
        );
    }
    let pass = bound_failures == 0;
    let mut rows = vec![
        ctx.record(&id, ts, &law_s, n, 1, replicas, seed, "truncation_zeroed_mean", zeroed_sum / replicas as f64),
        ctx.record(&id, ts, &law_s, n, 1, replicas, seed, "truncation_changed_rows_max", changed_max as f64),
        ctx.record(&id, ts, &law_s, n, 1, replicas, seed, "truncation_delta_final_mean", delta_final_sum / replicas as f64),
    ];
    let mut bound_row = ctx.record(
        &id,
        ts,
        &law_s,
        n,
        1,
        replicas,
        seed,
        "truncation_rank_bound_violations",
        bound_failures as f64,
    );
    bound_row.pass = Some(pass);
    rows.push(bound_row);
    output::append_results(&ctx.out_dir, &rows)?;
    output::write_atomic(&ctx.out_dir.join(format!("{id}_truncation.csv")), &sidecar)?;
    println!(
        "truncation: zeroed_mean={:.2} changed_rows_max={changed_max} bound_violations={bound_failures} pass={pass}",
        zeroed_sum / replicas as f64
    );
    Ok(Outcome { pass })
}

pub fn run_rigidity(ctx: &Ctx) -> Result<Outcome, RunError> {
    let law = ctx.law()?;
    let n = ctx.cfg.require_usize("n")?;
    let replicas = ctx.cfg.get_usize("replicas", 100)?;
    let c_big = ctx.cfg.get_f64("c_big", 1.0)?;
    let c1 = ctx.cfg.get_f64("c1", 0.01)?;
    let convention = match ctx.cfg.get_str("convention", "right").as_str() {
        "right" => QuantileConvention::RightEndpoint,
        "midpoint" => QuantileConvention::Midpoint,
        other => return Err(RunError(format!("key \"convention\": unknown {other:?}"))),
    };
    let seed = ctx.seed()?;
    let ts = ctx.timestamp()?;
    ctx.cfg.finish()?;

    let exp = bounds::rigidity_experiment(&law, n, replicas, c_big, c1, seed, convention)?;
    let id = ctx.experiment_id(seed);
    let law_s = law.to_string();
    let pass = exp.total_violations == 0;
    let mut rows = vec![
        ctx.record(&id, ts, &law_s, n, 1, replicas, seed, "rigidity_max_rho", exp.max_rho),
        ctx.record(&id, ts, &law_s, n, 1, replicas, seed, "rigidity_rho_p95", exp.rho_p95),
        ctx.record(
            &id,
            ts,
            &law_s,
            n,
            1,
            replicas,
            seed,
            "rigidity_window_size",
            exp.window.map_or(0.0, |(lo, hi)| (hi - lo + 1) as f64),
        ),
    ];
    let mut viol = ctx.record(
        &id,
        ts,
        &law_s,
        n,
        1,
        replicas,
        seed,
        "rigidity_violations",
        exp.total_violations as f64,
    );
    viol.pass = Some(pass);
    viol.tolerance = Some(c_big);
    rows.push(viol);
    output::append_results(&ctx.out_dir, &rows)?;
    output::write_replica_sidecar(&ctx.out_dir, &id, &exp.per_replica_max)?;
    match exp.window {
        Some((lo, hi)) => println!(
            "rigidity: window=[{lo},{hi}] max_rho={:.4e} p95={:.4e} violations={} pass={pass}",
            exp.max_rho, exp.rho_p95, exp.total_violations
        ),
        None => println!("rigidity: window empty at n={n}, c1={c1} (log⁵n too large) — no statistic"),
    }
    Ok(Outcome { pass })
}

pub fn run_identities(ctx: &Ctx) -> Result<Outcome, RunError> {
    let law = ctx.law()?;
    let n = ctx.cfg.require_usize("n")?;
    let instances = ctx.cfg.get_usize("instances", 1)?;
    let js_per = ctx.cfg.get_usize("js_per_instance", 3)?.min(n);
    let u_min = ctx.cfg.get_f64("u_min", -2.0)?;
    let u_max = ctx.cfg.get_f64("u_max", 2.0)?;
    let v_min = ctx.cfg.get_f64("v_min", 0.05)?;
    let v_max = ctx.cfg.get_f64("v_max", 1.0)?;
    let seed = ctx.seed()?;
    let ts = ctx.timestamp()?;
    ctx.cfg.finish()?;
    if v_min <= 0.0 || v_max < v_min || u_max < u_min {
        return Err(RunError("identities: invalid z window".into()));
    }

    let id = ctx.experiment_id(seed);
    let law_s = law.to_string();
    let mut sidecar = String::from("instance,name,residual,tolerance,pass\n");
    let mut max_residual = 0.0f64;
    let mut failures = 0usize;
    let mut total = 0usize;
    for i in 0..instances {
        let inst_seed = seed_stream(seed, i as u64);
        let sample = sample_wigner(&law, n, inst_seed)?;
        let mut zrng = CounterRng::for_tag(inst_seed, 0x7a64_7261); // z draw stream
        let z = Complex64::new(
            uniform_in(&mut zrng, u_min, u_max),
            uniform_in(&mut zrng, v_min, v_max),
        );
        let js = distinct_indices(&mut zrng, js_per, n);
        let reports = resolvent::identity_suite(&sample, z, &js)?;
        for r in &reports {
            total += 1;
            max_residual = max_residual.max(r.residual);
            if !r.pass {
                failures += 1;
            }
            let _ = writeln!(
                sidecar,
                "{i},{},{},{},{}",
                r.name, r.residual, r.tolerance, r.pass
            );
        }
    }
    let pass = failures == 0;
    let mut rows = Vec::new();
    let mut res_row = ctx.record(
        &id,
        ts,
        &law_s,
        n,
        1,
        instances,
        seed,
        "identities_max_residual",
        max_residual,
    );
    res_row.tolerance = Some(1e-8);
    res_row.margin = Some(1e-8 - max_residual);
    res_row.pass = Some(pass);
    rows.push(res_row);
    rows.push(ctx.record(
        &id,
        ts,
        &law_s,
        n,
        1,
        instances,
        seed,
        "identities_checks_run",
        total as f64,
    ));
    output::append_results(&ctx.out_dir, &rows)?;
    output::write_atomic(&ctx.out_dir.join(format!("{id}_identities.csv")), &sidecar)?;
    println!(
        "identities: {total} checks over {instances} instances, max residual {max_residual:.3e}, failures {failures}"
    );
    Ok(Outcome { pass })
}

pub fn run_inequalities(ctx: &Ctx) -> Result<Outcome, RunError> {
    let law = ctx.law()?;
    let n = ctx.cfg.require_usize("n")?;
    let instances = ctx.cfg.get_usize("instances", 1)?;
    let deleted_sizes = ctx.cfg.get_usize_list("deleted_sizes", &[0, 1, 3])?;
    let ps = ctx.cfg.get_u32_list("p", &[1, 2])?;
    let u_min = ctx.cfg.get_f64("u_min", -2.0)?;
    let u_max = ctx.cfg.get_f64("u_max", 2.0)?;
    let v_min = ctx.cfg.get_f64("v_min", 0.05)?;
    let v_max = ctx.cfg.get_f64("v_max", 1.0)?;
    let seed = ctx.seed()?;
    let ts = ctx.timestamp()?;
    ctx.cfg.finish()?;
    if deleted_sizes.iter().any(|&k| k >= n) {
        return Err(RunError("inequalities: deleted_sizes must be < n".into()));
    }

    let id = ctx.experiment_id(seed);
    let law_s = law.to_string();
    let mut sidecar = String::from("instance,deleted_size,name,lhs,rhs,margin,pass\n");
    let mut violations = 0usize;
    let mut min_margin = f64::INFINITY;
    let mut ward_worst = 0.0f64;
    let mut total = 0usize;
    for i in 0..instances {
        let inst_seed = seed_stream(seed, i as u64);
        let sample = sample_wigner(&law, n, inst_seed)?;
        let mut zrng = CounterRng::for_tag(inst_seed, 0x696e_6571);
        let z = Complex64::new(
            uniform_in(&mut zrng, u_min, u_max),
            uniform_in(&mut zrng, v_min, v_max),
        );
        for &k in &deleted_sizes {
            let deleted = distinct_indices(&mut zrng, k, n);
            let suite = resolvent::inequality_suite(&sample, z, &deleted, &ps)?;
            for c in &suite.checks {
                total += 1;
                if !c.pass {
                    violations += 1;
                }
                min_margin = min_margin.min(c.margin);
                if c.name.starts_with("ward_") {
                    let scale = c.lhs.abs().max(c.rhs.abs()).max(1.0);
                    ward_worst = ward_worst.max(c.margin.abs() / scale);
                }
                let _ = writeln!(
                    sidecar,
                    "{i},{k},{},{},{},{},{}",
                    c.name, c.lhs, c.rhs, c.margin, c.pass
                );
            }
        }
    }
    let pass = violations == 0;
    let mut rows = Vec::new();
    let mut viol_row = ctx.record(
        &id,
        ts,
        &law_s,
        n,
        ps[0],
        instances,
        seed,
        "inequalities_violations",
        violations as f64,
    );
    viol_row.pass = Some(pass);
    rows.push(viol_row);
    rows.push(ctx.record(&id, ts, &law_s, n, ps[0], instances, seed, "inequalities_min_margin", min_margin));
    rows.push(ctx.record(
        &id,
        ts,
        &law_s,
        n,
        ps[0],
        instances,
        seed,
        "inequalities_ward_worst_rel",
        ward_worst,
    ));
    output::append_results(&ctx.out_dir, &rows)?;
    output::write_atomic(&ctx.out_dir.join(format!("{id}_inequalities.csv")), &sidecar)?;
    println!(
        "inequalities: {total} checks, violations {violations}, ward worst rel dev {ward_worst:.3e}"
    );
    Ok(Outcome { pass })
}

pub fn run_epsilon_moments(ctx: &Ctx) -> Result<Outcome, RunError> {
    let law = ctx.law()?;
    let n = ctx.cfg.require_usize("n")?;
    let replicas = ctx.cfg.get_usize("replicas", 20)?;
    let u = ctx.cfg.get_f64("u", 0.0)?;
    let v = match ctx.cfg.opt_str("v").as_deref() {
        None | Some("auto") => 10.0 / n as f64,
        Some(raw) => raw
            .parse()
            .map_err(|e| RunError(format!("key \"v\": {e}")))?,
    };
    let seed = ctx.seed()?;
    let ts = ctx.timestamp()?;
    ctx.cfg.finish()?;
    if v <= 0.0 {
        return Err(RunError("key \"v\": must be > 0".into()));
    }
    let z = Complex64::new(u, v);

    struct ReplicaEps {
        rms: [f64; 7],
        min_margin: f64,
        max_recip: f64,
        max_eta_split: f64,
    }
    let per_replica: Vec<Result<ReplicaEps, String>> =
        rml_core::exec::map_replicas(replicas, |r| {
            let sample = sample_wigner(&law, n, seed_stream(seed, r as u64))
                .map_err(|e| e.to_string())?;
            let full = resolvent::Resolvent::full(&sample, z).map_err(|e| e.to_string())?;
            let stats = resolvent::epsilon_sweep(&sample, &full);
            let mut sq = [0.0f64; 7];
            let mut min_margin = f64::INFINITY;
            let mut max_recip = 0.0f64;
            let mut max_eta_split = 0.0f64;
            for s in &stats {
                let terms =
                    [s.eps1, s.eps2, s.eps3, s.eps4, s.eta0, s.eta1, s.eta2];
                for (acc, t) in sq.iter_mut().zip(terms) {
                    *acc += t.norm_sqr();
                }
                min_margin = min_margin.min(s.interlacing_margin);
                max_recip = max_recip.max(s.reciprocal_residual);
                max_eta_split = max_eta_split.max(s.eta_split_residual);
            }
            let rms = sq.map(|x| (x / n as f64).sqrt());
            Ok(ReplicaEps { rms, min_margin, max_recip, max_eta_split })
        });

    let id = ctx.experiment_id(seed);
    let law_s = law.to_string();
    const TERMS: [&str; 7] = ["eps1", "eps2", "eps3", "eps4", "eta0", "eta1", "eta2"];
    let mut sidecar = String::from(
        "replica,eps1_rms,eps2_rms,eps3_rms,eps4_rms,eta0_rms,eta1_rms,eta2_rms,\
min_interlacing_margin,max_reciprocal_residual,max_eta_split_residual\n",
    );
    let mut mean_rms = [0.0f64; 7];
    let mut min_margin = f64::INFINITY;
    let mut max_recip = 0.0f64;
    let mut max_eta_split = 0.0f64;
    for (r, rep) in per_replica.into_iter().enumerate() {
        let rep = rep.map_err(RunError)?;
        for (acc, x) in mean_rms.iter_mut().zip(rep.rms) {
            *acc += x / replicas as f64;
        }
        min_margin = min_margin.min(rep.min_margin);
        max_recip = max_recip.max(rep.max_recip);
        max_eta_split = max_eta_split.max(rep.max_eta_split);
        let _ = write!(sidecar, "{r}");
        for x in rep.rms {
            let _ = write!(sidecar, ",{x}");
        }
        let _ = writeln!(
            sidecar,
            ",{},{},{}",
            rep.min_margin, rep.max_recip, rep.max_eta_split
        );
    }

    // both checks are exact mathematics on every instance: |ε₄| ≤ 1/(nv),
    // and the decomposition must reproduce 1/R_jj to numerical precision
    let pass = min_margin >= -1e-10 && max_recip <= 1e-8;
    let mut rows = Vec::new();
    for (name, value) in TERMS.iter().zip(mean_rms) {
        rows.push(ctx.record(
            &id,
            ts,
            &law_s,
            n,
            1,
            replicas,
            seed,
            &format!("epsilon_rms_{name}"),
            value,
        ));
    }
    let mut margin_row = ctx.record(
        &id,
        ts,
        &law_s,
        n,
        1,
        replicas,
        seed,
        "epsilon_eps4_margin_min",
        min_margin,
    );
    margin_row.tolerance = Some(1e-10);
    margin_row.margin = Some(min_margin);
    margin_row.pass = Some(min_margin >= -1e-10);
    rows.push(margin_row);
    let mut recip_row = ctx.record(
        &id,
        ts,
        &law_s,
        n,
        1,
        replicas,
        seed,
        "epsilon_reciprocal_residual_max",
        max_recip,
    );
    recip_row.tolerance = Some(1e-8);
    recip_row.margin = Some(1e-8 - max_recip);
    recip_row.pass = Some(max_recip <= 1e-8);
    rows.push(recip_row);
    output::append_results(&ctx.out_dir, &rows)?;
    output::write_atomic(&ctx.out_dir.join(format!("{id}_epsilon.csv")), &sidecar)?;
    println!(
        "epsilon-moments: n={n} z={u}+{v}i rms(eps1..4)=({:.3e},{:.3e},{:.3e},{:.3e}) \
min ε₄ margin={min_margin:.3e} max residual={max_recip:.3e} pass={pass}",
        mean_rms[0], mean_rms[1], mean_rms[2], mean_rms[3]
    );
    Ok(Outcome { pass })
}

pub fn run_region(ctx: &Ctx) -> Result<Outcome, RunError> {
    let n = ctx.cfg.require_usize("n")?;
    let params = match (ctx.cfg.opt_f64("v0")?, ctx.cfg.opt_f64("a0")?) {
        (Some(_), Some(_)) => {
            return Err(RunError("region: give either v0 or a0, not both".into()))
        }
        (Some(v0), None) => RegionParams::with_v0(n, v0),
        (None, Some(a0)) => RegionParams::from_scale(n, a0),
        (None, None) => RegionParams::with_v0(n, 10.0 / n as f64),
    };
    let samples = ctx.cfg.get_usize("samples", 512)?;
    let du = ctx.cfg.get_f64("du", 0.01)?;
    let dv = ctx.cfg.get_f64("dv", 0.01)?;
    let tail_tol = ctx.cfg.get_f64("tail_tol", 1e-4)?;
    let seed = ctx.seed()?;
    let ts = ctx.timestamp()?;
    ctx.cfg.finish()?;

    let grid = stieltjes::contour_grid(&params, du, dv, tail_tol)
        .map_err(|e| RunError(format!("region grid: {e}")))?;
    let id = ctx.experiment_id(seed);
    let boundary = params.boundary_polyline(samples);
    let mut sidecar = String::from("u,v\n");
    for (u, v) in &boundary {
        let _ = writeln!(sidecar, "{u},{v}");
    }
    let vertical_nodes: usize = grid.verticals.iter().map(|(_, nodes)| nodes.len()).sum();
    let rows = vec![
        ctx.record(&id, ts, "-", n, 1, 1, seed, "region_v0", params.v0),
        ctx.record(&id, ts, "-", n, 1, 1, seed, "region_eps", params.eps),
        ctx.record(&id, ts, "-", n, 1, 1, seed, "region_empty", params.is_empty() as u8 as f64),
        ctx.record(&id, ts, "-", n, 1, 1, seed, "region_u_max", grid.u_max),
        ctx.record(
            &id,
            ts,
            "-",
            n,
            1,
            1,
            seed,
            "region_grid_nodes",
            (grid.horizontal_u.len() + vertical_nodes) as f64,
        ),
    ];
    output::append_results(&ctx.out_dir, &rows)?;
    output::write_atomic(&ctx.out_dir.join(format!("{id}_boundary.csv")), &sidecar)?;
    println!(
        "region: v0={:.4e} eps={:.4e} empty={} boundary_points={} grid_nodes={}",
        params.v0,
        params.eps,
        params.is_empty(),
        boundary.len(),
        grid.horizontal_u.len() + vertical_nodes
    );
    Ok(Outcome { pass: true })
}

pub fn run_plot_data(ctx: &Ctx) -> Result<Outcome, RunError> {
    let kind = ctx.cfg.require("kind")?.to_string();
    let seed = ctx.seed()?;
    let ts = ctx.timestamp()?;
    let id_kindless = ctx.experiment_id(seed);
    let id = format!("{id_kindless}_{kind}");
    match kind.as_str() {
        // With `input`, bins an existing replica vector (raw counts, summing to
        // the number of rows); without it, bins a freshly sampled spectrum as a
        // density against the semicircle pdf.
        "histogram" if ctx.cfg.opt_str("input").is_some() => {
            let input = ctx.cfg.opt_str("input").unwrap();
            let bins = ctx.cfg.get_usize("bins", 20)?;
            ctx.cfg.finish()?;
            if bins == 0 {
                return Err(RunError("key \"bins\": must be >= 1".into()));
            }
            let values = read_value_column(&input)?;
            if values.is_empty() {
                return Err(RunError(format!("{input}: no data rows")));
            }
            let (mut lo, mut hi) = values
                .iter()
                .fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), &x| {
                    (a.min(x), b.max(x))
                });
            if hi - lo <= 0.0 {
                lo -= 0.5;
                hi += 0.5;
            }
            let width = (hi - lo) / bins as f64;
            let mut counts = vec![0usize; bins];
            for &x in &values {
                counts[(((x - lo) / width) as usize).min(bins - 1)] += 1;
            }
            let mut body = String::from("bin_lo,bin_hi,count\n");
            for (b, &c) in counts.iter().enumerate() {
                let blo = lo + b as f64 * width;
                let _ = writeln!(body, "{blo},{},{c}", blo + width);
            }
            output::write_atomic(&ctx.out_dir.join(format!("{id}.csv")), &body)?;
            let rows = vec![ctx.record(
                &id,
                ts,
                "-",
                0,
                1,
                values.len(),
                seed,
                "plot_histogram_count",
                values.len() as f64,
            )];
            output::append_results(&ctx.out_dir, &rows)?;
        }
        "histogram" => {
            let law = ctx.law()?;
            let n = ctx.cfg.require_usize("n")?;
            let bins = ctx.cfg.get_usize("bins", 60)?;
            ctx.cfg.finish()?;
            let sample = sample_wigner(&law, n, seed)?;
            let spectrum = spectral::eigenvalues(&sample)
                .map_err(|e| RunError(format!("eigensolver: {e}")))?;
            let (lo, hi) = (-2.5f64, 2.5f64);
            let width = (hi - lo) / bins as f64;
            let mut counts = vec![0usize; bins];
            for &l in &spectrum.lambdas {
                if l >= lo && l < hi {
                    counts[((l - lo) / width) as usize] += 1;
                }
            }
            let mut body = String::from("bin_lo,bin_hi,esd_density,semicircle_pdf\n");
            for (b, &c) in counts.iter().enumerate() {
                let blo = lo + b as f64 * width;
                let bhi = blo + width;
                let density = c as f64 / (n as f64 * width);
                let _ = writeln!(
                    body,
                    "{blo},{bhi},{density},{}",
                    semicircle::pdf(0.5 * (blo + bhi))
                );
            }
            output::write_atomic(&ctx.out_dir.join(format!("{id}.csv")), &body)?;
            let rows = vec![ctx.record(
                &id,
                ts,
                &law.to_string(),
                n,
                1,
                1,
                seed,
                "plot_histogram_bins",
                bins as f64,
            )];
            output::append_results(&ctx.out_dir, &rows)?;
        }
        "quantiles" => {
            let n = ctx.cfg.require_usize("n")?;
            let convention = match ctx.cfg.get_str("convention", "right").as_str() {
                "right" => QuantileConvention::RightEndpoint,
                "midpoint" => QuantileConvention::Midpoint,
                other => {
                    return Err(RunError(format!("key \"convention\": unknown {other:?}")))
                }
            };
            ctx.cfg.finish()?;
            let q = SemicircleQuantiles::compute(n, convention);
            output::write_atomic(&ctx.out_dir.join(format!("{id}.csv")), &q.to_csv())?;
            let rows = vec![ctx.record(&id, ts, "-", n, 1, 1, seed, "plot_quantiles_n", n as f64)];
            output::append_results(&ctx.out_dir, &rows)?;
        }
        "rate" => {
            let input = ctx.cfg.require("input")?.to_string();
            let statistic = ctx.cfg.get_str("statistic", "delta_root");
            ctx.cfg.finish()?;
            let pairs = read_rate_pairs(&input, &statistic)?;
            if pairs.len() < 2 {
                return Err(RunError(format!(
                    "{input}: need at least two (n, value) rows for a rate fit, found {}",
                    pairs.len()
                )));
            }
            let fit = bounds::fit_rate(&pairs);
            let mut body = String::from("series,x,y\n");
            for &(n, r) in &pairs {
                let _ = writeln!(body, "data,{},{}", n.ln(), r.ln());
            }
            for &(n, _) in &pairs {
                let x = n.ln();
                let _ = writeln!(body, "fit,{x},{}", fit.intercept + fit.slope * x);
            }
            output::write_atomic(&ctx.out_dir.join(format!("{id}.csv")), &body)?;
            let rows = vec![
                ctx.record(&id, ts, "-", 0, 1, pairs.len(), seed, "plot_rate_slope", fit.slope),
                ctx.record(
                    &id,
                    ts,
                    "-",
                    0,
                    1,
                    pairs.len(),
                    seed,
                    "plot_rate_slope_logcorrected",
                    fit.slope_logcorrected,
                ),
            ];
            output::append_results(&ctx.out_dir, &rows)?;
        }
        "boundary" | "region" => {
            let n = ctx.cfg.require_usize("n")?;
            let v0 = ctx.cfg.get_f64("v0", 10.0 / n as f64)?;
            let samples = ctx.cfg.get_usize("samples", 512)?;
            ctx.cfg.finish()?;
            let params = RegionParams::with_v0(n, v0);
            let mut body = String::from("u,v\n");
            for (u, v) in params.boundary_polyline(samples) {
                let _ = writeln!(body, "{u},{v}");
            }
            output::write_atomic(&ctx.out_dir.join(format!("{id}.csv")), &body)?;
            let rows =
                vec![ctx.record(&id, ts, "-", n, 1, 1, seed, "plot_boundary_eps", params.eps)];
            output::append_results(&ctx.out_dir, &rows)?;
        }
        other => return Err(RunError(format!("key \"kind\": unknown value {other:?}"))),
    }
    println!("plot-data: wrote {id}.csv");
    Ok(Outcome { pass: true })
}

/// (n, value) pairs from either a results.csv (rows matching `statistic`)
/// or a rate points sidecar (columns `n` and `root`).
fn read_rate_pairs(path: &str, statistic: &str) -> Result<Vec<(f64, f64)>, RunError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| RunError(format!("cannot read {path}: {e}")))?;
    let mut lines = text.lines();
    let header: Vec<&str> = lines
        .next()
        .ok_or_else(|| RunError(format!("{path}: empty file")))?
        .split(',')
        .collect();
    let col = |name: &str| header.iter().position(|h| *h == name);
    let (n_col, val_col, stat_col) = match (col("n"), col("statistic"), col("value"), col("root")) {
        (Some(n), Some(s), Some(v), _) => (n, v, Some(s)),
        (Some(n), None, _, Some(r)) => (n, r, None),
        _ => {
            return Err(RunError(format!(
                "{path}: need columns n+statistic+value (results file) or n+root (points file)"
            )))
        }
    };
    let mut pairs = Vec::new();
    for line in lines {
        let cells: Vec<&str> = line.split(',').collect();
        if cells.len() <= n_col.max(val_col) {
            continue;
        }
        if let Some(s) = stat_col {
            if cells[s] != statistic {
                continue;
            }
        }
        let (Ok(n), Ok(v)) = (cells[n_col].parse::<f64>(), cells[val_col].parse::<f64>()) else {
            continue;
        };
        if n > 1.0 && v > 0.0 {
            pairs.push((n, v));
        }
    }
    Ok(pairs)
}

/// Reads the `value` column of a replica sidecar (or any CSV carrying one).
fn read_value_column(path: &str) -> Result<Vec<f64>, RunError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| RunError(format!("cannot read {path}: {e}")))?;
    let mut lines = text.lines();
    let header: Vec<&str> = lines
        .next()
        .ok_or_else(|| RunError(format!("{path}: empty file")))?
        .split(',')
        .collect();
    let Some(val_col) = header.iter().position(|h| *h == "value") else {
        return Err(RunError(format!(
            "{path}: need a \"value\" column among the columns of a replica file"
        )));
    };
    let mut values = Vec::new();
    for line in lines {
        let cells: Vec<&str> = line.split(',').collect();
        if let Some(Ok(v)) = cells.get(val_col).map(|c| c.parse::<f64>()) {
            values.push(v);
        }
    }
    Ok(values)
}
