//! Browser entry points. Each takes a JSON `ExperimentConfig` (missing
//! fields take defaults) and returns JSON for the page to plot.

use fourier_edges::harness::{ExperimentConfig, Runner};
use fourier_edges::sampling::make_modes;
use serde_json::{json, Value};
use wasm_bindgen::prelude::*;

fn parse(config: &str) -> Result<ExperimentConfig, String> {
    let cfg: ExperimentConfig = if config.trim().is_empty() {
        ExperimentConfig::default()
    } else {
        serde_json::from_str(config).map_err(|e| e.to_string())?
    };
    cfg.validate().map_err(|e| e.to_string())?;
    Ok(cfg)
}

pub fn modes_json(config: &str) -> Result<String, String> {
    let cfg = parse(config)?;
    let ms = make_modes(cfg.pattern, cfg.m_value(), cfg.seed, cfg.log_v).map_err(|e| e.to_string())?;
    Ok(json!({ "pattern": ms.pattern, "M": ms.m, "modes": ms.modes }).to_string())
}

fn detection_value(cfg: &ExperimentConfig) -> Result<(Value, fourier_edges::harness::Outcome), String> {
    let o = Runner::new().run(cfg).map_err(|e| e.to_string())?;
    let d = &o.detection;
    let v = json!({
        "x": d.x,
        "truth": d.truth,
        "l1": d.l1.as_ref().map(|r| &r.g),
        "sbl": d.sbl.as_ref().map(|r| &r.m),
        "sbl_std": d.sbl.as_ref().map(|r| &r.std),
        "l1_error": d.l1_error,
        "sbl_error": d.sbl_error,
        "converged": d.converged(),
        "N": o.setup.n,
    });
    Ok((v, o))
}

pub fn detect_json(config: &str) -> Result<String, String> {
    let cfg = parse(config)?;
    Ok(detection_value(&cfg)?.0.to_string())
}

pub fn reconstruct_json(config: &str) -> Result<String, String> {
    let mut cfg = parse(config)?;
    cfg.recon.enabled = true;
    let (mut v, o) = detection_value(&cfg)?;
    let r = o.reconstruction.expect("reconstruction enabled");
    v["signal_truth"] = json!(r.truth);
    v["recon_l1"] = json!(r.l1);
    v["recon_sbl"] = json!(r.sbl);
    v["recon_l1_error"] = json!(r.l1_error);
    v["recon_sbl_error"] = json!(r.sbl_error);
    Ok(v.to_string())
}

#[wasm_bindgen]
pub fn modes(config: &str) -> Result<String, JsError> {
    modes_json(config).map_err(|e| JsError::new(&e))
}

#[wasm_bindgen]
pub fn detect(config: &str) -> Result<String, JsError> {
    detect_json(config).map_err(|e| JsError::new(&e))
}

#[wasm_bindgen]
pub fn reconstruct(config: &str) -> Result<String, JsError> {
    reconstruct_json(config).map_err(|e| JsError::new(&e))
}
