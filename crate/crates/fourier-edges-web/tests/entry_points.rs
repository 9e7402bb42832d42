use fourier_edges_web::{detect_json, modes_json, reconstruct_json};
use serde_json::Value;

#[test]
fn modes_come_back_as_json() {
    let v: Value = serde_json::from_str(&modes_json(r#"{"pattern": "quadratic", "M": 4}"#).unwrap()).unwrap();
    assert_eq!(v["modes"].as_array().unwrap().len(), 9);
    assert_eq!(v["modes"][0], -4.0);
}

#[test]
fn detection_and_reconstruction_shapes() {
    let cfg = r#"{"M": 24, "J": 16}"#;
    let v: Value = serde_json::from_str(&detect_json(cfg).unwrap()).unwrap();
    assert_eq!(v["x"].as_array().unwrap().len(), 33);
    assert_eq!(v["sbl"].as_array().unwrap().len(), 33);
    assert!(v["sbl_error"].as_f64().unwrap() < 1.0);
    let r: Value = serde_json::from_str(&reconstruct_json(cfg).unwrap()).unwrap();
    assert_eq!(r["recon_sbl"].as_array().unwrap().len(), 33);
}

#[test]
fn bad_input_is_an_error() {
    assert!(detect_json("{").is_err());
    assert!(detect_json(r#"{"J": 0}"#).is_err());
    assert!(modes_json("").is_ok());
}
