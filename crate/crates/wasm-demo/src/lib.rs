//! Browser bindings for the spectral laboratory: a thin JSON façade over the
//! core crate, exported through wasm-bindgen. Every function takes plain
//! numbers/strings and returns a JSON string, so the page needs no generated
//! TypeScript types. Errors come back as `{"error": "..."}` rather than
//! panics, keeping the wasm module alive after bad input.
//!
//! The same functions compile natively, which is how the test suite exercises
//! them (`cargo test -p rml-wasm-demo`).

use num_complex::Complex64;
use serde::Serialize;
use wasm_bindgen::prelude::*;

use rml_core::ensemble::EntryLaw;
use rml_core::semicircle;
use rml_core::spectral;
use rml_core::stieltjes::{self, RegionParams};

/// Browser-side cap: one eigensolve at this size stays comfortably under a
/// second of single-threaded wasm time.
const N_MAX: usize = 512;

fn err_json(msg: &str) -> String {
    serde_json::to_string(&serde_json::json!({ "error": msg })).unwrap()
}

fn ok_json<T: Serialize>(value: &T) -> String {
    match serde_json::to_string(value) {
        Ok(s) => s,
        Err(e) => err_json(&format!("serialization failed: {e}")),
    }
}

fn parse_law(law: &str) -> Result<EntryLaw, String> {
    EntryLaw::parse(law).map_err(|e| format!("law: {e}"))
}

fn check_n(n: usize) -> Result<(), String> {
    if n < 2 {
        return Err("n must be at least 2".into());
    }
    if n > N_MAX {
        return Err(format!("n must be at most {N_MAX} in the browser demo"));
    }
    Ok(())
}

#[derive(Serialize)]
struct Bin {
    lo: f64,
    hi: f64,
    /// empirical eigenvalue density over this bin
    density: f64,
    /// semicircle density at the bin midpoint
    pdf: f64,
}

#[derive(Serialize)]
struct CdfPoint {
    x: f64,
    /// empirical spectral distribution F_n(x)
    esd: f64,
    /// semicircle distribution G(x)
    semicircle: f64,
}

#[derive(Serialize)]
struct SpectrumDemo {
    law: String,
    n: usize,
    seed: u64,
    delta_star: f64,
    lambda_min: f64,
    lambda_max: f64,
    bins: Vec<Bin>,
    cdf: Vec<CdfPoint>,
}

/// Sample one Wigner matrix, eigensolve it, and return histogram + CDF
/// overlay data plus the exact Kolmogorov distance to the semicircle law.
#[wasm_bindgen]
pub fn spectrum_demo(law: &str, n: usize, seed: u64, bins: usize) -> String {
    match spectrum_demo_inner(law, n, seed, bins) {
        Ok(s) => s,
        Err(msg) => err_json(&msg),
    }
}

fn spectrum_demo_inner(law: &str, n: usize, seed: u64, bins: usize) -> Result<String, String> {
    let law = parse_law(law)?;
    check_n(n)?;
    if bins == 0 || bins > 400 {
        return Err("bins must be in 1..=400".into());
    }
    let sample =
        rml_core::ensemble::sample_wigner(&law, n, seed).map_err(|e| format!("sampling: {e}"))?;
    let spectrum = spectral::eigenvalues(&sample).map_err(|e| format!("eigensolver: {e}"))?;
    let delta_star = spectral::kolmogorov_distance(&spectrum);

    let (lo, hi) = (-2.6f64, 2.6f64);
    let width = (hi - lo) / bins as f64;
    let mut counts = vec![0usize; bins];
    for &l in &spectrum.lambdas {
        if l >= lo && l < hi {
            counts[((l - lo) / width) as usize] += 1;
        }
    }
    let bins: Vec<Bin> = counts
        .iter()
        .enumerate()
        .map(|(b, &c)| {
            let blo = lo + b as f64 * width;
            Bin {
                lo: blo,
                hi: blo + width,
                density: c as f64 / (n as f64 * width),
                pdf: semicircle::pdf(blo + 0.5 * width),
            }
        })
        .collect();

    let cdf: Vec<CdfPoint> = (0..=240)
        .map(|k| {
            let x = lo + (hi - lo) * k as f64 / 240.0;
            CdfPoint {
                x,
                esd: spectral::esd_cdf(&spectrum, x),
                semicircle: semicircle::cdf(x),
            }
        })
        .collect();

    Ok(ok_json(&SpectrumDemo {
        law: law.to_string(),
        n,
        seed,
        delta_star,
        lambda_min: spectrum.lambdas[0],
        lambda_max: spectrum.lambdas[n - 1],
        bins,
        cdf,
    }))
}

#[derive(Serialize)]
struct GapPoint {
    v: f64,
    /// |m_n(u+iv) − s(u+iv)|
    gap: f64,
    /// the 1/(nv) reference envelope
    guide: f64,
}

#[derive(Serialize)]
struct StieltjesDemo {
    law: String,
    n: usize,
    seed: u64,
    u: f64,
    points: Vec<GapPoint>,
}

/// Vertical scan of the Stieltjes-transform gap |m_n − s| at fixed real part
/// u, on a log-spaced grid v ∈ [v_min, v_max], with the 1/(nv) guide curve.
#[wasm_bindgen]
pub fn stieltjes_demo(law: &str, n: usize, seed: u64, u: f64, v_min: f64, v_max: f64) -> String {
    match stieltjes_demo_inner(law, n, seed, u, v_min, v_max) {
        Ok(s) => s,
        Err(msg) => err_json(&msg),
    }
}

fn stieltjes_demo_inner(
    law: &str,
    n: usize,
    seed: u64,
    u: f64,
    v_min: f64,
    v_max: f64,
) -> Result<String, String> {
    let law = parse_law(law)?;
    check_n(n)?;
    if !(v_min > 0.0 && v_max > v_min) {
        return Err("need 0 < v_min < v_max".into());
    }
    let sample =
        rml_core::ensemble::sample_wigner(&law, n, seed).map_err(|e| format!("sampling: {e}"))?;
    let spectrum = spectral::eigenvalues(&sample).map_err(|e| format!("eigensolver: {e}"))?;
    let steps = 120;
    let ratio = (v_max / v_min).ln();
    let points: Vec<GapPoint> = (0..=steps)
        .map(|k| {
            let v = v_min * (ratio * k as f64 / steps as f64).exp();
            let z = Complex64::new(u, v);
            let gap = (stieltjes::m_from_lambdas(&spectrum.lambdas, z) - stieltjes::s_transform(z))
                .norm();
            GapPoint { v, gap, guide: 1.0 / (n as f64 * v) }
        })
        .collect();
    Ok(ok_json(&StieltjesDemo { law: law.to_string(), n, seed, u, points }))
}

#[derive(Serialize)]
struct RegionDemo {
    n: usize,
    v0: f64,
    eps: f64,
    empty: bool,
    /// u extent of the bulk window [−2+ε, 2−ε] (empty when ε ≥ 2)
    u_lo: f64,
    u_hi: f64,
    boundary: Vec<[f64; 2]>,
}

/// Geometry of the spectral-domain region for a given size: either the
/// desk-scale floor v0 = nv/n, or the asymptotic floor a0·log⁴n/n (which is
/// empty until n is astronomically large — that emptiness is the point).
#[wasm_bindgen]
pub fn region_demo(n: usize, mode: &str, value: f64) -> String {
    match region_demo_inner(n, mode, value) {
        Ok(s) => s,
        Err(msg) => err_json(&msg),
    }
}

fn region_demo_inner(n: usize, mode: &str, value: f64) -> Result<String, String> {
    if n < 2 {
        return Err("n must be at least 2".into());
    }
    if !(value > 0.0) {
        return Err("parameter must be > 0".into());
    }
    let params = match mode {
        "desk" => RegionParams::with_v0(n, value / n as f64),
        "scale" => RegionParams::from_scale(n, value),
        _ => return Err("mode must be \"desk\" (value = nv) or \"scale\" (value = a0)".into()),
    };
    let boundary: Vec<[f64; 2]> =
        params.boundary_polyline(256).into_iter().map(|(u, v)| [u, v]).collect();
    let (u_lo, u_hi) = if params.is_empty() {
        (0.0, 0.0)
    } else {
        (-2.0 + params.eps, 2.0 - params.eps)
    };
    Ok(ok_json(&RegionDemo {
        n,
        v0: params.v0,
        eps: params.eps,
        empty: params.is_empty(),
        u_lo,
        u_hi,
        boundary,
    }))
}
