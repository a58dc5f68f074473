//! Parsing model replies and scoring them against ground truth.

use crate::dataset::ManifestEntry;
use crate::scene::{Cell, Point, CANVAS};
use regex::Regex;
use serde::{Deserialize, Serialize};
use std::sync::LazyLock;
use thiserror::Error;

/// Image diagonal; the error assigned to refusals and unparseable replies.
pub const MAX_ERROR_PX: f64 = 565.685_424_949_238;

pub fn max_error_px() -> f64 {
    (CANVAS * CANVAS + CANVAS * CANVAS).sqrt()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Mode {
    Cells,
    Coordinates,
}

impl std::str::FromStr for Mode {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "cells" => Ok(Mode::Cells),
            "coordinates" => Ok(Mode::Coordinates),
            other => Err(format!("unknown mode {other:?} (cells|coordinates)")),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum AnswerKind {
    Cell { cell: Cell },
    Coordinates { x: f64, y: f64 },
    Refusal,
    /// A "Cell (i,j)" outside the 2x2 grid. Treated as unparseable for
    /// scoring but kept separate for invalid-response tables.
    InvalidCell { row: u32, col: u32 },
    Unparseable,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ParsedAnswer {
    pub kind: AnswerKind,
    pub raw_excerpt: Option<String>,
}

static CELL_RE: LazyLock<Regex> =
    LazyLock::new(|| Regex::new(r"(?i)cell\s*\(\s*([0-9]+)\s*,\s*([0-9]+)\s*\)").unwrap());
static COORD_RE: LazyLock<Regex> = LazyLock::new(|| {
    Regex::new(r"\(\s*(-?[0-9]+(?:\.[0-9]+)?)\s*,\s*(-?[0-9]+(?:\.[0-9]+)?)\s*\)").unwrap()
});
static REFUSAL_RE: LazyLock<Regex> = LazyLock::new(|| {
    Regex::new(
        r"(?i)\b(no target|cannot|can't|can not|unable|not able|could not|couldn't|not possible|impossible|sorry|there is no|there are no|does not contain|doesn't contain|not (?:be )?identif)",
    )
    .unwrap()
});

/// First `Cell (i,j)` in the text; case-insensitive, flexible whitespace,
/// ASCII digits only.
pub fn parse_cell(text: &str) -> ParsedAnswer {
    let Some(m) = CELL_RE.captures(text) else {
        return ParsedAnswer { kind: AnswerKind::Unparseable, raw_excerpt: None };
    };
    let num = |i: usize| m[i].parse::<u32>().unwrap_or(u32::MAX);
    let (row, col) = (num(1), num(2));
    let kind = match (u8::try_from(row).ok(), u8::try_from(col).ok()) {
        (Some(r), Some(c)) => match Cell::new(r, c) {
            Some(cell) => AnswerKind::Cell { cell },
            None => AnswerKind::InvalidCell { row, col },
        },
        _ => AnswerKind::InvalidCell { row, col },
    };
    ParsedAnswer { kind, raw_excerpt: Some(m[0].to_string()) }
}

/// First `(x, y)` pair in the text; a reply with no pair that declines the
/// task is a refusal.
pub fn parse_coordinates(text: &str) -> ParsedAnswer {
    if let Some(m) = COORD_RE.captures(text) {
        let x: f64 = m[1].parse().unwrap_or(f64::INFINITY);
        let y: f64 = m[2].parse().unwrap_or(f64::INFINITY);
        return ParsedAnswer {
            kind: AnswerKind::Coordinates { x, y },
            raw_excerpt: Some(m[0].to_string()),
        };
    }
    if let Some(m) = REFUSAL_RE.find(text) {
        return ParsedAnswer { kind: AnswerKind::Refusal, raw_excerpt: Some(m.as_str().to_string()) };
    }
    ParsedAnswer { kind: AnswerKind::Unparseable, raw_excerpt: None }
}

pub fn parse(text: &str, mode: Mode) -> ParsedAnswer {
    match mode {
        Mode::Cells => parse_cell(text),
        Mode::Coordinates => parse_coordinates(text),
    }
}

/// Canonical reply text for an answer; parses back to the same answer.
pub fn format_answer(kind: &AnswerKind) -> String {
    match kind {
        AnswerKind::Cell { cell } => cell.to_string(),
        AnswerKind::Coordinates { x, y } => format!("({x}, {y})"),
        AnswerKind::InvalidCell { row, col } => format!("Cell ({row},{col})"),
        AnswerKind::Refusal => "No target could be identified in this image.".to_string(),
        AnswerKind::Unparseable => String::new(),
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct ScoreFlags {
    pub invalid_cell: bool,
    pub refusal: bool,
    pub out_of_range: bool,
    pub unparseable: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScoreRecord {
    /// The manifest `image_id` of the trial.
    pub trial_id: String,
    pub model_id: String,
    pub mode: Mode,
    pub correct: Option<bool>,
    pub error_px: Option<f64>,
    /// The cell named by a valid Cells answer.
    pub answer_cell: Option<Cell>,
    pub flags: ScoreFlags,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("{answer} answer cannot be scored in {mode:?} mode")]
pub struct ModeMismatch {
    pub mode: Mode,
    pub answer: &'static str,
}

/// Correct iff the answer names the ground-truth cell. Invalid cells,
/// refusals and unparseable replies are incorrect and flagged.
pub fn score_cells(
    model_id: &str,
    answer: &ParsedAnswer,
    entry: &ManifestEntry,
) -> Result<ScoreRecord, ModeMismatch> {
    let mut flags = ScoreFlags::default();
    let (correct, answer_cell) = match &answer.kind {
        AnswerKind::Cell { cell } => (*cell == entry.ground_truth_cell, Some(*cell)),
        AnswerKind::InvalidCell { .. } => {
            flags.invalid_cell = true;
            (false, None)
        }
        AnswerKind::Refusal => {
            flags.refusal = true;
            (false, None)
        }
        AnswerKind::Unparseable => {
            flags.unparseable = true;
            (false, None)
        }
        AnswerKind::Coordinates { .. } => {
            return Err(ModeMismatch { mode: Mode::Cells, answer: "coordinate" })
        }
    };
    Ok(ScoreRecord {
        trial_id: entry.image_id.clone(),
        model_id: model_id.to_string(),
        mode: Mode::Cells,
        correct: Some(correct),
        error_px: None,
        answer_cell,
        flags,
    })
}

pub fn euclidean_error(answer: Point, target: Point) -> f64 {
    answer.distance(target)
}

/// Euclidean distance to the target centre. Out-of-canvas answers are scored
/// normally and flagged; refusals and unparseable replies get the image
/// diagonal.
pub fn score_coordinates(
    model_id: &str,
    answer: &ParsedAnswer,
    entry: &ManifestEntry,
) -> Result<ScoreRecord, ModeMismatch> {
    let mut flags = ScoreFlags::default();
    let error = match &answer.kind {
        AnswerKind::Coordinates { x, y } => {
            let in_range = |v: f64| (0.0..=CANVAS).contains(&v);
            flags.out_of_range = !(in_range(*x) && in_range(*y));
            let e = euclidean_error(Point::new(*x, *y), entry.target_centre);
            if e.is_finite() {
                e
            } else {
                f64::MAX
            }
        }
        AnswerKind::Refusal => {
            flags.refusal = true;
            max_error_px()
        }
        AnswerKind::Unparseable => {
            flags.unparseable = true;
            max_error_px()
        }
        AnswerKind::Cell { .. } | AnswerKind::InvalidCell { .. } => {
            return Err(ModeMismatch { mode: Mode::Coordinates, answer: "cell" })
        }
    };
    Ok(ScoreRecord {
        trial_id: entry.image_id.clone(),
        model_id: model_id.to_string(),
        mode: Mode::Coordinates,
        correct: None,
        error_px: Some(error),
        answer_cell: None,
        flags,
    })
}

/// Parses `text` for `mode` and scores it.
pub fn score_reply(model_id: &str, text: &str, mode: Mode, entry: &ManifestEntry) -> ScoreRecord {
    let answer = parse(text, mode);
    match mode {
        Mode::Cells => score_cells(model_id, &answer, entry),
        Mode::Coordinates => score_coordinates(model_id, &answer, entry),
    }
    .expect("parser output always matches its mode")
}
