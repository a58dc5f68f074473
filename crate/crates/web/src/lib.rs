//! WebAssembly bindings for the static demo page in `www/`.
//!
//! The logic lives in plain functions returning `Result<_, String>` so it
//! can be tested natively; the exported wrappers only convert errors.

use vsearch_core::analysis::stats::{wilson_interval, Z_95};
use vsearch_core::scoring::{format_answer, parse, score_reply};
use vsearch_core::stimgen::generate_scene;
use vsearch_core::{make_rng, render_scene, Family, ManifestEntry, Mode};
use wasm_bindgen::prelude::*;

/// A rendered stimulus: RGBA pixels plus its manifest entry as JSON.
#[wasm_bindgen]
pub struct Stimulus {
    width: u32,
    height: u32,
    rgba: Vec<u8>,
    entry_json: String,
    label: String,
}

#[wasm_bindgen]
impl Stimulus {
    #[wasm_bindgen(getter)]
    pub fn width(&self) -> u32 {
        self.width
    }

    #[wasm_bindgen(getter)]
    pub fn height(&self) -> u32 {
        self.height
    }

    pub fn rgba(&self) -> Vec<u8> {
        self.rgba.clone()
    }

    #[wasm_bindgen(js_name = entryJson)]
    pub fn entry_json(&self) -> String {
        self.entry_json.clone()
    }

    #[wasm_bindgen(getter)]
    pub fn label(&self) -> String {
        self.label.clone()
    }
}

fn family(slug: &str) -> Result<Family, String> {
    Family::from_slug(slug).ok_or_else(|| format!("unknown family {slug}"))
}

fn entry(json: &str) -> Result<ManifestEntry, String> {
    serde_json::from_str(json).map_err(|e| e.to_string())
}

pub fn conditions_of(family_slug: &str) -> Result<Vec<String>, String> {
    Ok(family(family_slug)?.conditions().iter().map(|c| c.label()).collect())
}

pub fn stimulus(family_slug: &str, condition: usize, n_distractors: u32, seed: u64) -> Result<Stimulus, String> {
    let fam = family(family_slug)?;
    let conditions = fam.conditions();
    let cond = conditions.get(condition).ok_or_else(|| format!("condition index {condition} out of range"))?;
    let mut rng = make_rng(seed);
    let scene = generate_scene(&mut rng, cond, n_distractors, None).map_err(|e| e.to_string())?;
    let img = render_scene(&scene);
    let entry = ManifestEntry::from_scene(format!("demo_{seed}"), seed, &scene);
    Ok(Stimulus {
        width: img.width,
        height: img.height,
        rgba: img.to_rgba(),
        entry_json: serde_json::to_string_pretty(&entry).expect("entry serialises"),
        label: cond.label(),
    })
}

pub fn prompt(entry_json: &str, mode: &str) -> Result<String, String> {
    let mode: Mode = mode.parse()?;
    vsearch_core::prompt::build_prompt(&entry(entry_json)?, mode).map_err(|e| e.to_string())
}

/// JSON with the parsed answer, its canonical spelling and the score.
pub fn score(entry_json: &str, reply: &str, mode: &str) -> Result<String, String> {
    let entry = entry(entry_json)?;
    let mode: Mode = mode.parse()?;
    let parsed = parse(reply, mode);
    let out = serde_json::json!({
        "parsed": parsed.kind,
        "canonical": format_answer(&parsed.kind),
        "score": score_reply("demo", reply, mode, &entry),
    });
    Ok(serde_json::to_string_pretty(&out).expect("score serialises"))
}

pub fn wilson(successes: u32, trials: u32) -> Result<Vec<f64>, String> {
    if trials == 0 || successes > trials {
        return Err("need 0 <= successes <= trials and trials > 0".into());
    }
    let (lo, hi) = wilson_interval(u64::from(successes), u64::from(trials), Z_95);
    Ok(vec![lo, hi])
}

fn js<T>(r: Result<T, String>) -> Result<T, JsError> {
    r.map_err(|e| JsError::new(&e))
}

/// Condition labels of a family, in the order `renderStimulus` indexes them.
#[wasm_bindgen(js_name = conditionLabels)]
pub fn condition_labels(family_slug: &str) -> Result<Vec<String>, JsError> {
    js(conditions_of(family_slug))
}

#[wasm_bindgen(js_name = maxDistractors)]
pub fn max_distractors(family_slug: &str) -> Result<u32, JsError> {
    js(family(family_slug).map(Family::max_distractors))
}

#[wasm_bindgen(js_name = renderStimulus)]
pub fn render_stimulus(family_slug: &str, condition: usize, n_distractors: u32, seed: u64) -> Result<Stimulus, JsError> {
    js(stimulus(family_slug, condition, n_distractors, seed))
}

#[wasm_bindgen(js_name = promptFor)]
pub fn prompt_for(entry_json: &str, mode: &str) -> Result<String, JsError> {
    js(prompt(entry_json, mode))
}

#[wasm_bindgen(js_name = scoreReply)]
pub fn score_reply_json(entry_json: &str, reply: &str, mode: &str) -> Result<String, JsError> {
    js(score(entry_json, reply, mode))
}

/// `[low, high]` of the 95% Wilson interval.
#[wasm_bindgen(js_name = wilson95)]
pub fn wilson95(successes: u32, trials: u32) -> Result<Vec<f64>, JsError> {
    js(wilson(successes, trials))
}
