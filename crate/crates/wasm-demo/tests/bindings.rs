//! Native tests of the JSON façade: shape, values, and error behavior of
//! everything the browser page calls.

use rml_wasm_demo::{region_demo, spectrum_demo, stieltjes_demo};
use serde_json::Value;

fn parse(s: &str) -> Value {
    serde_json::from_str(s).expect("all exports must return valid JSON")
}

#[test]
fn spectrum_demo_matches_core_statistics() {
    let v = parse(&spectrum_demo("rademacher", 64, 7, 40));
    assert!(v.get("error").is_none(), "{v}");
    assert_eq!(v["n"], 64);
    assert_eq!(v["bins"].as_array().unwrap().len(), 40);
    assert_eq!(v["cdf"].as_array().unwrap().len(), 241);

    // Δ* must equal the core computation for the same (law, n, seed)
    let law = rml_core::ensemble::EntryLaw::rademacher();
    let sample = rml_core::ensemble::sample_wigner(&law, 64, 7).unwrap();
    let spectrum = rml_core::spectral::eigenvalues(&sample).unwrap();
    let expected = rml_core::spectral::kolmogorov_distance(&spectrum);
    assert_eq!(v["delta_star"].as_f64().unwrap(), expected);

    // histogram mass integrates to at most 1 and the ESD column is monotone
    let mass: f64 = v["bins"]
        .as_array()
        .unwrap()
        .iter()
        .map(|b| {
            b["density"].as_f64().unwrap() * (b["hi"].as_f64().unwrap() - b["lo"].as_f64().unwrap())
        })
        .sum();
    assert!(mass > 0.9 && mass <= 1.0 + 1e-12, "mass {mass}");
    let cdf = v["cdf"].as_array().unwrap();
    for w in cdf.windows(2) {
        assert!(w[1]["esd"].as_f64().unwrap() >= w[0]["esd"].as_f64().unwrap());
    }
}

#[test]
fn spectrum_demo_rejects_bad_input() {
    assert!(parse(&spectrum_demo("cauchy", 64, 1, 40)).get("error").is_some());
    assert!(parse(&spectrum_demo("rademacher", 1, 1, 40)).get("error").is_some());
    assert!(parse(&spectrum_demo("rademacher", 100_000, 1, 40)).get("error").is_some());
    assert!(parse(&spectrum_demo("rademacher", 64, 1, 0)).get("error").is_some());
}

#[test]
fn stieltjes_demo_gap_and_guide() {
    let v = parse(&stieltjes_demo("truncated_gaussian(inf)", 96, 3, 0.0, 1e-3, 1.0));
    assert!(v.get("error").is_none(), "{v}");
    let points = v["points"].as_array().unwrap();
    assert_eq!(points.len(), 121);
    // grid is log-spaced and increasing; the guide is exactly 1/(nv)
    let mut prev = 0.0;
    for p in points {
        let vv = p["v"].as_f64().unwrap();
        assert!(vv > prev);
        prev = vv;
        let guide = p["guide"].as_f64().unwrap();
        assert!((guide - 1.0 / (96.0 * vv)).abs() <= 1e-15 * guide.abs());
        assert!(p["gap"].as_f64().unwrap().is_finite());
    }
    // far above the spectrum the transforms agree to O(1/(nv)); at v = 1 the
    // gap should already be well below 1
    let last = points.last().unwrap();
    assert!(last["gap"].as_f64().unwrap() < 0.2);

    assert!(parse(&stieltjes_demo("rademacher", 96, 3, 0.0, 1.0, 0.5))
        .get("error")
        .is_some());
}

#[test]
fn region_demo_desk_vs_asymptotic_scale() {
    let desk = parse(&region_demo(1024, "desk", 10.0));
    assert!(desk.get("error").is_none(), "{desk}");
    assert_eq!(desk["empty"], false);
    assert!((desk["v0"].as_f64().unwrap() - 10.0 / 1024.0).abs() < 1e-15);
    assert!(!desk["boundary"].as_array().unwrap().is_empty());

    // the asymptotic floor log⁴n/n makes the region empty at desk sizes
    let scale = parse(&region_demo(1024, "scale", 1.0));
    assert_eq!(scale["empty"], true);
    assert!(scale["boundary"].as_array().unwrap().is_empty());

    assert!(parse(&region_demo(1024, "nonsense", 1.0)).get("error").is_some());
    assert!(parse(&region_demo(1024, "desk", 0.0)).get("error").is_some());
}
