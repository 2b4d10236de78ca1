//! WebAssembly bindings for the browser demo in `www/`.
//!
//! Each exported function returns a JSON string. The `*_json` functions hold
//! the logic and are plain Rust so they can be tested natively.

use agss_core::curve::{Curve, CurveSpec, Point};
use agss_core::lab::{self, hasse_checks, ExperimentConfig, Mode};
use agss_core::scheme::{format_subset, parse_subset, Oracle, Privacy, Scheme};
use serde_json::json;
use wasm_bindgen::prelude::*;

/// Largest field the page will enumerate or sample on.
pub const MAX_P: u64 = 1000;
pub const MAX_SAMPLES: u64 = 50_000;

fn err(e: impl ToString) -> String {
    e.to_string()
}

fn parse_small(spec: &str) -> Result<Curve, String> {
    let spec: CurveSpec = spec.parse().map_err(err)?;
    let p = match &spec {
        CurveSpec::Elliptic { p, .. } | CurveSpec::Hyperelliptic { p, .. } => *p,
    };
    if p > MAX_P {
        return Err(format!("the demo is limited to p <= {MAX_P}"));
    }
    Curve::from_spec(&spec).map_err(err)
}

fn coords(p: &Point) -> serde_json::Value {
    match p.coords() {
        Some((x, y)) => json!([x.value(), y.value()]),
        None => serde_json::Value::Null,
    }
}

pub fn curve_points_json(spec: &str) -> Result<String, String> {
    let curve = parse_small(spec)?;
    let table = if curve.is_elliptic() {
        Some(curve.group_structure().map_err(err)?)
    } else {
        None
    };
    let hasse = hasse_checks(&curve, table.as_ref());
    let affine: Vec<_> = curve.affine_points().iter().map(coords).collect();
    Ok(json!({
        "spec": curve.spec().to_string(),
        "p": curve.field().characteristic(),
        "genus": curve.genus(),
        "total": hasse.points,
        "affine": affine,
        "hasse_ok": hasse.passed(),
        "window": [hasse.window.0, hasse.window.1],
        "group": table.map(|t| vec![t.d1, t.d2]),
    })
    .to_string())
}

/// Verdicts of every applicable oracle for a 1-based player subset of the
/// standard scheme (`P_0` = smallest affine point).
pub fn qualify_json(spec: &str, m: usize, subset: &str) -> Result<String, String> {
    let scheme = Scheme::standard(parse_small(spec)?, m).map_err(err)?;
    let subset = parse_subset(subset, scheme.n()).map_err(err)?;
    let kernel = scheme.is_qualified_kernel(&subset).map_err(err)?.is_qualified();
    let dual = scheme.is_qualified_dual(&subset).map_err(err)?.is_qualified();
    let clx = if scheme.curve().is_elliptic() {
        Some(scheme.is_qualified_clx(&subset).map_err(err)?.is_qualified())
    } else {
        None
    };
    let privacy = scheme.privacy_check(&subset).map_err(err)?;
    Ok(json!({
        "p0": coords(scheme.p0()),
        "players": scheme.players().iter().map(coords).collect::<Vec<_>>(),
        "n": scheme.n(),
        "m": scheme.m(),
        "genus": scheme.genus(),
        "subset": format_subset(&subset),
        "t": scheme.n() - subset.len(),
        "kernel": kernel,
        "dual": dual,
        "clx": clx,
        "determines_secret": privacy == Privacy::DeterminesSecret,
    })
    .to_string())
}

/// Gray-zone proportions for every offset `m - t` in `[0, 2g)`: exact on
/// elliptic curves, sampled otherwise.
pub fn gray_zone_json(spec: &str, delta: f64, samples: u64, seed: u64) -> Result<String, String> {
    let curve = parse_small(spec)?;
    if samples > MAX_SAMPLES {
        return Err(format!("the demo is limited to {MAX_SAMPLES} samples"));
    }
    let g = curve.genus();
    let config = ExperimentConfig {
        curve: Some(curve.spec()),
        delta,
        offsets: (0..2 * g).collect(),
        mode: if g == 1 { Mode::Exact } else { Mode::MonteCarlo },
        samples: samples.max(1),
        oracle: Oracle::Kernel,
        ..ExperimentConfig::default()
    };
    let rows = lab::sweep(&config, seed, 1).map_err(err)?;
    serde_json::to_string(&rows).map_err(err)
}

#[wasm_bindgen]
pub fn curve_points(spec: &str) -> Result<String, JsValue> {
    curve_points_json(spec).map_err(|e| JsValue::from_str(&e))
}

#[wasm_bindgen]
pub fn qualify(spec: &str, m: usize, subset: &str) -> Result<String, JsValue> {
    qualify_json(spec, m, subset).map_err(|e| JsValue::from_str(&e))
}

#[wasm_bindgen]
pub fn gray_zone(spec: &str, delta: f64, samples: u32, seed: u32) -> Result<String, JsValue> {
    gray_zone_json(spec, delta, samples as u64, seed as u64).map_err(|e| JsValue::from_str(&e))
}

#[cfg(test)]
mod tests {
    use super::*;
    use serde_json::Value;

    #[test]
    fn points_of_a_small_curve() {
        let v: Value = serde_json::from_str(&curve_points_json("ec:p=5,a=1,b=1").unwrap()).unwrap();
        assert_eq!(v["total"], 9);
        assert_eq!(v["affine"].as_array().unwrap().len(), 8);
        assert_eq!(v["group"], json!([1, 9]));
        assert!(curve_points_json("ec:p=1009,a=1,b=1").is_err());
        assert!(curve_points_json("ec:p=5,a=0,b=0").is_err());
    }

    #[test]
    fn qualify_reports_matching_verdicts() {
        let v: Value =
            serde_json::from_str(&qualify_json("ec:p=13,a=1,b=1", 5, "1,2,3,4,5,6,7,8,9,10,11").unwrap())
                .unwrap();
        assert_eq!(v["t"], 5);
        assert_eq!(v["kernel"], v["dual"]);
        assert_eq!(v["kernel"], v["clx"]);
        assert_eq!(v["kernel"], v["determines_secret"]);
        assert!(qualify_json("ec:p=13,a=1,b=1", 5, "99").is_err());
    }

    #[test]
    fn gray_zone_rows() {
        let rows: Value = serde_json::from_str(&gray_zone_json("ec:p=13,a=1,b=1", 0.5, 0, 1).unwrap()).unwrap();
        assert_eq!(rows.as_array().unwrap().len(), 2);
        let rows: Value =
            serde_json::from_str(&gray_zone_json("hyp:p=13,f=1,1,0,0,0,1", 0.5, 200, 1).unwrap()).unwrap();
        assert_eq!(rows.as_array().unwrap().len(), 4);
        assert_eq!(rows[0]["mode"], "montecarlo");
    }
}
