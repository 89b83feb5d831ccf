//! Browser bindings for the NDOPPE crate.
//!
//! Three interactive operations back the demo page in `www/`:
//! curve evaluation over a parameter grid, seeded sampling with a histogram,
//! and dataset fitting (MLE plus the unbiased estimator). Results cross the
//! boundary as JSON strings; the page parses and draws them.

use serde::Serialize;
use wasm_bindgen::prelude::*;

use ndoppe::model::{ModelSpec, Theta};
use ndoppe::report::{fit, parse_dataset, pmf_table};
use ndoppe::sampler::{sample, SeededStream};

fn model_from_csv(coeffs: &str) -> Result<ModelSpec, String> {
    let coeffs: Vec<f64> = coeffs
        .split(',')
        .map(|tok| {
            tok.trim()
                .parse::<f64>()
                .map_err(|_| format!("'{}' is not a number", tok.trim()))
        })
        .collect::<Result<_, _>>()?;
    ModelSpec::new(coeffs).map_err(|e| e.to_string())
}

fn theta_checked(value: f64) -> Result<Theta, String> {
    Theta::new(value).map_err(|e| e.to_string())
}

#[derive(Serialize)]
struct CurveResponse {
    mean: f64,
    mixture_weights: Vec<f64>,
    rows: Vec<CurveRow>,
}

#[derive(Serialize)]
struct CurveRow {
    x: u64,
    pmf: f64,
    cdf: f64,
}

/// PMF/CDF curve for one parameter value. `x_max = 0` picks the range
/// adaptively: up to 99.9% of the mass, capped for display.
fn curve_json(theta: f64, coeffs: &str, x_max: u32) -> Result<String, String> {
    let model = model_from_csv(coeffs)?;
    let theta = theta_checked(theta)?;
    let x_max = if x_max > 0 {
        u64::from(x_max)
    } else {
        let mut x = 0u64;
        while model.cdf(x as i64, theta) < 0.999 && x < 2000 {
            x += 1;
        }
        x.max(5)
    };
    let rows = pmf_table(theta, &model, x_max)
        .into_iter()
        .map(|r| CurveRow {
            x: r.x,
            pmf: r.pmf,
            cdf: r.cdf,
        })
        .collect();
    let response = CurveResponse {
        mean: model.mean(theta),
        mixture_weights: model.mixture_weights(theta),
        rows,
    };
    serde_json::to_string(&response).map_err(|e| e.to_string())
}

#[derive(Serialize)]
struct HistogramResponse {
    n: usize,
    sample_mean: f64,
    model_mean: f64,
    bins: Vec<HistogramBin>,
    tail_count: u64,
}

#[derive(Serialize)]
struct HistogramBin {
    x: u64,
    count: u64,
    freq: f64,
    pmf: f64,
}

/// Draws a seeded sample and bins it against the exact PMF.
fn histogram_json(theta: f64, coeffs: &str, n: u32, seed: u32) -> Result<String, String> {
    if n == 0 {
        return Err("sample size must be at least 1".into());
    }
    let model = model_from_csv(coeffs)?;
    let theta = theta_checked(theta)?;
    let mut stream = SeededStream::new(u64::from(seed), 0);
    let drawn = sample(n as usize, theta, &model, &mut stream);

    // bin up to the 99.9% point so rare outliers cannot blow up the chart
    let mut x_max = 0u64;
    while model.cdf(x_max as i64, theta) < 0.999 && x_max < 2000 {
        x_max += 1;
    }
    x_max = x_max.max(5);
    let mut counts = vec![0u64; x_max as usize + 1];
    let mut tail_count = 0u64;
    for &v in drawn.values() {
        if v <= x_max {
            counts[v as usize] += 1;
        } else {
            tail_count += 1;
        }
    }
    let bins = counts
        .iter()
        .enumerate()
        .map(|(x, &count)| HistogramBin {
            x: x as u64,
            count,
            freq: count as f64 / drawn.n() as f64,
            pmf: model.pmf(x as u64, theta),
        })
        .collect();
    let response = HistogramResponse {
        n: drawn.n(),
        sample_mean: drawn.mean(),
        model_mean: model.mean(theta),
        bins,
        tail_count,
    };
    serde_json::to_string(&response).map_err(|e| e.to_string())
}

/// Parses a dataset and fits the model; the report matches the CLI JSON.
fn fit_json(data: &str, coeffs: &str) -> Result<String, String> {
    let model = model_from_csv(coeffs)?;
    let sample = parse_dataset(data).map_err(|e| e.to_string())?;
    let report = fit(&sample, &model, None).map_err(|e| e.to_string())?;
    serde_json::to_string(&report).map_err(|e| e.to_string())
}

#[wasm_bindgen]
pub fn distribution_curve(theta: f64, coeffs: &str, x_max: u32) -> Result<String, JsValue> {
    curve_json(theta, coeffs, x_max).map_err(|e| JsValue::from_str(&e))
}

#[wasm_bindgen]
pub fn sample_histogram(theta: f64, coeffs: &str, n: u32, seed: u32) -> Result<String, JsValue> {
    histogram_json(theta, coeffs, n, seed).map_err(|e| JsValue::from_str(&e))
}

#[wasm_bindgen]
pub fn fit_dataset(data: &str, coeffs: &str) -> Result<String, JsValue> {
    fit_json(data, coeffs).map_err(|e| JsValue::from_str(&e))
}

/// The bundled forest-fire counts, for the demo's "load example" button.
#[wasm_bindgen]
pub fn example_dataset() -> String {
    ndoppe::report::greece_fires()
        .values()
        .iter()
        .map(|v| v.to_string())
        .collect::<Vec<_>>()
        .join(" ")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn curve_response_shape() {
        let json = curve_json(0.5, "1,1", 0).unwrap();
        let value: serde_json::Value = serde_json::from_str(&json).unwrap();
        let rows = value["rows"].as_array().unwrap();
        assert!(rows.len() >= 6);
        assert!((rows[0]["pmf"].as_f64().unwrap() - 1.0 / 3.0).abs() < 1e-12);
        assert!((value["mean"].as_f64().unwrap() - 5.0 / 3.0).abs() < 1e-12);
        assert!(curve_json(1.5, "1,1", 0).is_err());
        assert!(curve_json(0.5, "1,oops", 0).is_err());
    }

    #[test]
    fn histogram_is_seed_stable() {
        let a = histogram_json(0.4, "1,1", 500, 9).unwrap();
        let b = histogram_json(0.4, "1,1", 500, 9).unwrap();
        assert_eq!(a, b);
        let value: serde_json::Value = serde_json::from_str(&a).unwrap();
        assert_eq!(value["n"], 500);
        assert!(histogram_json(0.4, "1,1", 0, 9).is_err());
    }

    #[test]
    fn fit_of_example_matches_reference() {
        let data = example_dataset();
        let json = fit_json(&data, "1,1").unwrap();
        let value: serde_json::Value = serde_json::from_str(&json).unwrap();
        assert_eq!(value["n"], 123);
        let nll = value["nll_mle"].as_f64().unwrap();
        assert!((nll - 340.0195).abs() < 0.05);
    }
}
