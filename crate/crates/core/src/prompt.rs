//! Prompt texts sent to models, and the one-line instructions shown to
//! human participants.

use crate::dataset::ManifestEntry;
use crate::scene::{Glyph, SearchCondition, TaskCondition};
use crate::scoring::Mode;
use thiserror::Error;

const GRID_INTRO: &str = "The image is divided into a 2x2 grid. Each element of the grid is referred to as a cell.";
const COORD_INTRO: &str =
    "The presented image is 400x400 pixels large, and the origin (0,0) is in the top left of the image.";
const CELL_FORMAT: &str = "Please only respond with 'Cell (i,j)' where (i,j) corresponds to the ith row and jth column of the grid. The top left cell is Cell (1,1).";
const CELL_NOTE: &str =
    "If you are uncertain you may optionally add a note explaining that but please start your response with 'Cell (i,j)'.";
const GUESS_COORDS: &str = "If you are uncertain please guess but optionally add a description to note this. However, for ease of processing please begin your response with a set of coordinates using round brackets.";

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("no {mode:?} prompt for {condition}")]
pub struct MissingTemplate {
    pub condition: String,
    pub mode: Mode,
}

/// Noun phrases for the glyph families: how the items are described.
struct GlyphWording {
    /// "number five written as a numeral"
    kind: &'static str,
    written: &'static str,
    plural_written: &'static str,
    pair: (&'static str, &'static str),
}

fn wording(condition: &TaskCondition) -> GlyphWording {
    match condition {
        TaskCondition::TAmongL { .. } => GlyphWording {
            kind: "letter",
            written: "a capital letter",
            plural_written: "capital letters",
            pair: ("T", "L"),
        },
        _ => GlyphWording { kind: "number", written: "a numeral", plural_written: "numerals", pair: ("2", "5") },
    }
}

/// Prompt for one image in the given evaluation mode.
pub fn build_prompt(entry: &ManifestEntry, mode: Mode) -> Result<String, MissingTemplate> {
    let condition = &entry.task_condition;
    let text = match condition {
        TaskCondition::CircleSizes { .. } => match mode {
            Mode::Cells => format!(
                "{GRID_INTRO} In the presented image there are a number of circles. One of the circles is larger than the rest. In which cell is the larger circle? In the case where the larger circle overlaps multiple cells, please provide the cell where the centre of the larger circle is located. {CELL_FORMAT} {CELL_NOTE}"
            ),
            Mode::Coordinates => format!(
                "{COORD_INTRO} In the presented image there are a number of circles. One of the circles is larger than the others. What are the coordinates of the larger circle? Please give your best estimate. {GUESS_COORDS}"
            ),
        },
        TaskCondition::LightPriors { .. } => {
            let scene = "In the presented image there are a number of spheres lit from different directions. Almost all of the spheres are lit from the same direction, but one sphere is lit from the opposite direction.";
            match mode {
                Mode::Cells => format!(
                    "{GRID_INTRO} {scene} In which cell is this oppositely lit sphere? In the case where the sphere overlaps multiple cells, please provide the cell where the centre of the sphere lit from the opposite direction is located. {CELL_FORMAT} If you are uncertain please guess but optionally add a description to note this. However, for ease of processing please begin your response with 'Cell (i,j)'."
                ),
                Mode::Coordinates => format!(
                    "{COORD_INTRO} {scene} What are the coordinates of the centre of the oppositely lit sphere? {GUESS_COORDS}"
                ),
            }
        }
        TaskCondition::TwoAmongFive { condition: search, .. } | TaskCondition::TAmongL { condition: search, .. } => {
            let (target, distractor) = condition.glyphs().expect("glyph family");
            let w = wording(condition);
            match search {
                SearchCondition::Disjunctive | SearchCondition::ShapeConjunctive => {
                    let (t, d) = (glyph_name(target), glyph_name(distractor));
                    let items = format!(
                        "In the presented image there are a number of objects. Almost all of the objects are the {kind} {d} written as {written}. There is a single {t} in the image, similarly represented by {written}.",
                        kind = w.kind,
                        written = w.written,
                    );
                    match mode {
                        Mode::Cells => format!(
                            "{GRID_INTRO} {items} In which cell is the {t} in? In the case where the {t} overlaps multiple cells, please provide the cell where the centre of the {t} is located. {CELL_FORMAT} Do not reply with anything else."
                        ),
                        Mode::Coordinates => format!(
                            "{COORD_INTRO} {items} What are the coordinates of the centre of the {t}? Please give your best estimate. {GUESS_COORDS}"
                        ),
                    }
                }
                SearchCondition::ShapeColourConjunctive => {
                    let colour = entry
                        .target_colour
                        .ok_or_else(|| MissingTemplate { condition: condition.label(), mode })?
                        .name();
                    let shape = target.symbol();
                    let items = format!(
                        "In the presented image there are a number of objects. There are '{}'s and '{}'s written as {}.",
                        w.pair.0, w.pair.1, w.plural_written
                    );
                    match mode {
                        Mode::Cells => format!(
                            "{GRID_INTRO} {items} In which cell is the {colour} '{shape}'? In the case where the {colour} '{shape}' overlaps multiple cells, please provide the cell where the centre of the {shape} is located. {CELL_FORMAT} {CELL_NOTE}"
                        ),
                        Mode::Coordinates => format!(
                            "{COORD_INTRO} {items} What are the coordinates of the {colour} '{shape}'? Please give your best estimate. {GUESS_COORDS}"
                        ),
                    }
                }
            }
        }
    };
    Ok(text)
}

/// Digits are named by word ("two"), letters by themselves ("T").
fn glyph_name(g: Glyph) -> &'static str {
    g.word()
}

/// On-screen instruction for human participants.
pub fn human_prompt_line(entry: &ManifestEntry) -> String {
    match entry.task_condition {
        TaskCondition::CircleSizes { .. } => "Find the largest circle".to_string(),
        TaskCondition::LightPriors { .. } => "Find the odd one out".to_string(),
        TaskCondition::TwoAmongFive { .. } | TaskCondition::TAmongL { .. } => {
            let colour = entry.target_colour.map(|c| c.name()).unwrap_or("odd");
            let glyph = entry.target_digit.map(|g| g.symbol()).unwrap_or("target");
            format!("Find the {colour} {glyph}")
        }
    }
}
