use citeprec_web::{appendix_demo_json, pmf_curve, sample_histogram, simulate_config, MAX_DRAWS};

#[test]
fn pmf_curve_sums_to_one() {
    let curve = pmf_curve(1.0, 1.0, 200).unwrap();
    assert_eq!(curve.len(), 201);
    assert!((curve.iter().sum::<f64>() - 1.0).abs() < 1e-12);
    assert!(pmf_curve(1.0, 0.0, 10).is_err());
    assert!(pmf_curve(1.0, 1.0, 0).is_err());
}

#[test]
fn histogram_tracks_pmf() {
    let curve = pmf_curve(1.0, 1.0, 30).unwrap();
    let hist = sample_histogram(1.0, 1.0, 200_000, 30, 4).unwrap();
    assert_eq!(hist.len(), curve.len());
    assert!((hist.iter().sum::<f64>() - 1.0).abs() < 1e-9);
    for (h, c) in hist.iter().zip(&curve).take(5) {
        assert!((h - c).abs() < 0.01, "{h} vs {c}");
    }
    assert_eq!(hist, sample_histogram(1.0, 1.0, 200_000, 30, 4).unwrap());
    assert!(sample_histogram(1.0, 1.0, 0, 30, 4).is_err());
}

#[test]
fn simulate_config_returns_summary_json() {
    let json = simulate_config(0.9, 1.1, 0.1, 0.1, 500, 40, 1).unwrap();
    let v: serde_json::Value = serde_json::from_str(&json).unwrap();
    assert_eq!(v["params"]["n"], 500);
    assert_eq!(v["countries"][0]["size"], 50);
    assert!(v["similarity"]["geo"].is_number());
    assert!(simulate_config(0.9, 1.1, 0.1, 0.1, 500, 10, 1).is_err());
    assert!(simulate_config(0.9, 1.1, 0.1, 0.1, 100_000, MAX_DRAWS as u32, 1).is_err());
}

#[test]
fn appendix_demo_json_has_samples() {
    let v: serde_json::Value = serde_json::from_str(&appendix_demo_json(100, 2).unwrap()).unwrap();
    assert_eq!(v["sample1"].as_array().unwrap().len(), 100);
    assert!(v["ks_p"].as_f64().unwrap() <= 1.0);
}
