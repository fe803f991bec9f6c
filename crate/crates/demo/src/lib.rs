//! Browser bindings: classification, rank sweeps and the envelope check.
//!
//! Every entry point takes plain strings and numbers and returns a JSON
//! string; failures come back as `{"error": "..."}` so the page can show them.

use serde_json::{json, Value};
use wasm_bindgen::prelude::wasm_bindgen;

use nilwitness_core::cocycle::{g0_sigma, CocycleSpec, SigmaSeq};
use nilwitness_core::extension::{
    omega_sigma_surjective, verify_class2_and_center, Envelope, FiniteGroup, FiniteWindowGroup,
};
use nilwitness_core::linalg::Prime;
use nilwitness_core::typei::{classify_sigma, sweep, validate_schedule, witness_sweep, CharacterSpec};

/// Largest window the page accepts for the envelope check.
const MAX_WINDOW: usize = 6;

fn render(result: Result<Value, String>) -> String {
    match result {
        Ok(v) => v.to_string(),
        Err(e) => json!({ "error": e }).to_string(),
    }
}

fn parse_sigma(p: u32, spec: &str, is_s: bool) -> Result<SigmaSeq, String> {
    let prime = Prime::new(p).map_err(|e| e.to_string())?;
    let seq = SigmaSeq::parse(prime, spec).map_err(|e| e.to_string())?;
    if is_s {
        g0_sigma(&seq).map_err(|e| e.to_string())
    } else {
        Ok(seq)
    }
}

fn parse_list(text: &str) -> Result<Vec<i64>, String> {
    text.split(',')
        .map(str::trim)
        .filter(|t| !t.is_empty())
        .map(|t| t.parse().map_err(|_| format!("not an integer: {t:?}")))
        .collect()
}

/// `spec` is `prefix=[..] period=[..]`; `is_s` reads it as the 0/1 sequence `s`.
#[wasm_bindgen]
pub fn classify(p: u32, spec: &str, is_s: bool) -> String {
    render((|| {
        let sigma = parse_sigma(p, spec, is_s)?;
        let verdict = classify_sigma(&sigma);
        Ok(json!({ "sigma": sigma, "verdict": verdict, "summary": verdict.to_string() }))
    })())
}

/// Gram ranks over `schedule` (comma-separated i_0). `chi` is a Laurent
/// polynomial or JSON character; if empty, the witness character with
/// `witness_d` and `witness_m` blocks is used instead.
#[wasm_bindgen]
pub fn rank_sweep(p: u32, sigma_spec: &str, chi: &str, schedule: &str, witness_d: u32, witness_m: u32) -> String {
    render((|| {
        let sigma = parse_sigma(p, sigma_spec, false)?;
        let schedule = parse_list(schedule)?;
        validate_schedule(&schedule).map_err(|e| e.to_string())?;
        let report = if chi.trim().is_empty() {
            witness_sweep(witness_d as u64, witness_m as usize, &sigma, &schedule)
        } else {
            let chi = CharacterSpec::parse(sigma.modulus(), chi).map_err(|e| e.to_string())?;
            sweep(&chi, &sigma, &schedule)
        }
        .map_err(|e| e.to_string())?;
        serde_json::to_value(report).map_err(|e| e.to_string())
    })())
}

/// Builds `Q` from `eta_s` on the basis exponents `basis` with the character
/// that is 1 between the smallest and largest exponent, then checks the envelope.
#[wasm_bindgen]
pub fn extension_check(p: u32, s_spec: &str, basis: &str) -> String {
    render((|| {
        let prime = Prime::new(p).map_err(|e| e.to_string())?;
        let s = SigmaSeq::parse(prime, s_spec).map_err(|e| e.to_string())?;
        let basis = parse_list(basis)?;
        if basis.is_empty() || basis.len() > MAX_WINDOW {
            return Err(format!("give between 1 and {MAX_WINDOW} basis exponents"));
        }
        let (lo, hi) = (*basis.iter().min().unwrap(), *basis.iter().max().unwrap());
        let chi = CharacterSpec::new(prime, (lo..=hi).map(|m| (m, 1)));
        let omega = CocycleSpec::eta(s).map_err(|e| e.to_string())?;
        let q = FiniteWindowGroup::from_cocycle(&omega, &chi, basis).map_err(|e| e.to_string())?;
        let w = q.window_size();
        let e = Envelope::new(q.clone());
        let class2 = verify_class2_and_center(&e);
        let mut images = Vec::new();
        let mut passed = class2.passed;
        for sigma in 1..p {
            let (report, image) = omega_sigma_surjective(&e, w, sigma).map_err(|e| e.to_string())?;
            passed &= report.passed;
            images.push(image);
        }
        Ok(json!({
            "pairing": q.pairing().to_rows(),
            "envelope_size": e.size(),
            "class2": class2,
            "omega": images,
            "passed": passed,
        }))
    })())
}
