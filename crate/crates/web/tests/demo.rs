use serde_json::Value;
use vsearch_web::{conditions_of, prompt, score, stimulus};

#[test]
fn render_prompt_score_round_trip() {
    for (i, label) in conditions_of("circle-sizes").unwrap().iter().enumerate() {
        let s = stimulus("circle-sizes", i, 10, 8).unwrap();
        assert_eq!(&s.label(), label);
        let entry: Value = serde_json::from_str(&s.entry_json()).unwrap();
        let cell = &entry["ground_truth_cell"];
        let reply = format!("I think it is Cell ({},{}).", cell["row"], cell["col"]);
        let out: Value = serde_json::from_str(&score(&s.entry_json(), &reply, "cells").unwrap()).unwrap();
        assert_eq!(out["score"]["correct"], true);
        assert!(prompt(&s.entry_json(), "coordinates").unwrap().contains("circle"));
    }
}

#[test]
fn refusal_is_max_error() {
    let s = stimulus("two-among-five", 0, 4, 1).unwrap();
    let out: Value = serde_json::from_str(&score(&s.entry_json(), "There is no target here.", "coordinates").unwrap()).unwrap();
    assert_eq!(out["parsed"]["kind"], "refusal");
    assert!((out["score"]["error_px"].as_f64().unwrap() - 565.685).abs() < 0.001);
    assert!(score("{}", "x", "cells").is_err());
    assert!(score(&s.entry_json(), "x", "pixels").is_err());
}
