//! Supervised fine-tuning exports and the matching transfer evaluations.

use crate::dataset::{build_dataset, Dataset, DatasetError, DatasetSpec, Manifest, ManifestEntry, MANIFEST_SCHEMA_VERSION};
use crate::prompt::build_prompt;
use crate::raster::{encode_png, render_scene};
use crate::rng::{make_rng, sub_seed, RngState};
use crate::scene::{Cell, DigitDirection, Family, LetterDirection, Scene, SearchCondition, TaskCondition};
use crate::scoring::Mode;
use crate::stimgen::{generate_scene, StimError};
use serde::{Deserialize, Serialize};
use std::path::Path;
use thiserror::Error;

pub const TRAIN_SEED: u64 = 1_745_313_698;
/// Training scenes never exceed this many distractors.
pub const TRAIN_MAX_DISTRACTORS: u32 = 49;
pub const SYSTEM_PROMPT: &str = "You are a helpful assistant.";
/// Scenes drawn per example while waiting for the target to land in the
/// requested cell.
const CELL_ATTEMPTS: u32 = 1_000;

#[derive(Debug, Error)]
pub enum FinetuneError {
    #[error("example {index}: {source}")]
    Scene { index: usize, source: StimError },
    #[error("example {index}: target never landed in {cell}")]
    CellUnreachable { index: usize, cell: Cell },
    #[error("dataset size must be positive")]
    Empty,
    #[error(transparent)]
    Dataset(#[from] DatasetError),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FinetuneExample {
    pub entry: ManifestEntry,
    pub prompt: String,
    pub answer: String,
}

#[derive(Debug, Clone, PartialEq)]
pub struct FinetuneSet {
    pub examples: Vec<FinetuneExample>,
    pub scenes: Vec<Scene>,
    pub seed: u64,
}

/// Draws scenes from `rng` until the target falls in `cell`.
pub(crate) fn scene_in_cell(
    rng: &mut RngState,
    condition: &TaskCondition,
    n: u32,
    cell: Cell,
    attempts: u32,
) -> Result<Option<Scene>, StimError> {
    for _ in 0..attempts {
        let scene = generate_scene(rng, condition, n, None)?;
        if crate::scene::ground_truth_cell(scene.target().centre).ok() == Some(cell) {
            return Ok(Some(scene));
        }
    }
    Ok(None)
}

/// Shape Conjunctive 2-among-5 training examples, 0-49 distractors.
///
/// Set sizes, target cells and digit directions are each dealt round-robin
/// and shuffled independently, so every one is balanced to within one.
pub fn build_finetune_dataset(n_examples: usize, seed: u64) -> Result<FinetuneSet, FinetuneError> {
    if n_examples == 0 {
        return Err(FinetuneError::Empty);
    }
    let mut deal = make_rng(seed);
    let span = TRAIN_MAX_DISTRACTORS as usize + 1;
    let mut sizes: Vec<u32> = (0..n_examples).map(|i| (i % span) as u32).collect();
    let mut cells: Vec<Cell> = (0..n_examples).map(|i| Cell::ALL[i % 4]).collect();
    let mut directions: Vec<DigitDirection> = (0..n_examples)
        .map(|i| if i % 2 == 0 { DigitDirection::TwoAmongFive } else { DigitDirection::FiveAmongTwo })
        .collect();
    deal.shuffle(&mut sizes);
    deal.shuffle(&mut cells);
    deal.shuffle(&mut directions);

    let mut examples = Vec::with_capacity(n_examples);
    let mut scenes = Vec::with_capacity(n_examples);
    for index in 0..n_examples {
        let condition = TaskCondition::TwoAmongFive { condition: SearchCondition::ShapeConjunctive, direction: directions[index] };
        let mut rng = make_rng(sub_seed(seed, index as u64));
        let scene = scene_in_cell(&mut rng, &condition, sizes[index], cells[index], CELL_ATTEMPTS)
            .map_err(|source| FinetuneError::Scene { index, source })?
            .ok_or(FinetuneError::CellUnreachable { index, cell: cells[index] })?;
        let entry = ManifestEntry::from_scene(format!("finetune_{index:05}"), seed, &scene);
        let prompt = build_prompt(&entry, Mode::Cells).expect("shape conjunctive template");
        let answer = entry.ground_truth_cell.to_string();
        examples.push(FinetuneExample { entry, prompt, answer });
        scenes.push(scene);
    }
    Ok(FinetuneSet { examples, scenes, seed })
}

#[derive(Debug, Serialize)]
struct ImageUrl {
    url: String,
}

#[derive(Debug, Serialize)]
#[serde(tag = "type", rename_all = "snake_case")]
enum Part {
    Text { text: String },
    ImageUrl { image_url: ImageUrl },
}

#[derive(Debug, Serialize)]
#[serde(untagged)]
enum Content {
    Text(String),
    Parts(Vec<Part>),
}

#[derive(Debug, Serialize)]
struct Message {
    role: &'static str,
    content: Content,
}

#[derive(Debug, Serialize)]
struct ChatLine {
    messages: Vec<Message>,
}

/// How images are referenced from each JSON line.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ImageRef {
    /// `images/<image_id>.png`, relative to the export directory.
    RelativePath,
    /// `data:image/png;base64,...`
    InlineBase64,
}

impl FinetuneSet {
    /// One chat-format JSON line per example:
    ///
    /// ```json
    /// {"messages":[{"role":"system","content":"..."},
    ///   {"role":"user","content":[{"type":"text","text":"..."},{"type":"image_url","image_url":{"url":"images/finetune_00000.png"}}]},
    ///   {"role":"assistant","content":"Cell (1,2)"}]}
    /// ```
    pub fn to_jsonl(&self, images: ImageRef) -> String {
        let mut out = String::new();
        for (ex, scene) in self.examples.iter().zip(&self.scenes) {
            let url = match images {
                ImageRef::RelativePath => format!("images/{}", ex.entry.image_file()),
                ImageRef::InlineBase64 => {
                    use base64::Engine as _;
                    let png = encode_png(&render_scene(scene));
                    format!("data:image/png;base64,{}", base64::engine::general_purpose::STANDARD.encode(png))
                }
            };
            let line = ChatLine {
                messages: vec![
                    Message { role: "system", content: Content::Text(SYSTEM_PROMPT.to_string()) },
                    Message {
                        role: "user",
                        content: Content::Parts(vec![
                            Part::Text { text: ex.prompt.clone() },
                            Part::ImageUrl { image_url: ImageUrl { url } },
                        ]),
                    },
                    Message { role: "assistant", content: Content::Text(ex.answer.clone()) },
                ],
            };
            out.push_str(&serde_json::to_string(&line).expect("chat line serialises"));
            out.push('\n');
        }
        out
    }

    pub fn manifest(&self) -> Manifest {
        Manifest {
            schema_version: MANIFEST_SCHEMA_VERSION,
            master_seed: self.seed,
            entries: self.examples.iter().map(|e| e.entry.clone()).collect(),
        }
    }

    /// Writes `train.jsonl`, `manifest.json` and `images/*.png` into `dir`.
    pub fn write_to(&self, dir: &Path, images: ImageRef) -> Result<(), FinetuneError> {
        std::fs::create_dir_all(dir.join("images"))?;
        std::fs::write(dir.join("train.jsonl"), self.to_jsonl(images))?;
        std::fs::write(dir.join("manifest.json"), self.manifest().to_json())?;
        for (ex, scene) in self.examples.iter().zip(&self.scenes) {
            std::fs::write(dir.join("images").join(ex.entry.image_file()), encode_png(&render_scene(scene)))?;
        }
        Ok(())
    }
}

/// Seeds of the four transfer evaluation sets.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct TransferSeeds {
    pub shape_conjunctive_two_among_five: u64,
    pub shape_conjunctive_t_among_l: u64,
    pub disjunctive_t_among_l: u64,
    pub shape_colour_conjunctive_two_among_five: u64,
}

impl Default for TransferSeeds {
    fn default() -> Self {
        Self {
            shape_conjunctive_two_among_five: 1_745_332_147,
            shape_conjunctive_t_among_l: 1_745_566_567,
            disjunctive_t_among_l: 1_746_005_099,
            shape_colour_conjunctive_two_among_five: 1_746_104_336,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct TransferEval {
    pub name: &'static str,
    pub dataset: Dataset,
}

/// The four evaluation datasets, both directions, set sizes 0-99,
/// `trials` images per (direction, set size).
pub fn build_transfer_evals(seeds: TransferSeeds, trials: u32) -> Result<Vec<TransferEval>, FinetuneError> {
    use SearchCondition::*;
    let digits = |c| {
        [DigitDirection::TwoAmongFive, DigitDirection::FiveAmongTwo]
            .map(|direction| TaskCondition::TwoAmongFive { condition: c, direction })
            .to_vec()
    };
    let letters = |c| {
        [LetterDirection::TAmongL, LetterDirection::LAmongT]
            .map(|direction| TaskCondition::TAmongL { condition: c, direction })
            .to_vec()
    };
    let plan = [
        ("shape-conjunctive-2-among-5", Family::TwoAmongFive, digits(ShapeConjunctive), seeds.shape_conjunctive_two_among_five),
        ("shape-conjunctive-t-among-l", Family::TAmongL, letters(ShapeConjunctive), seeds.shape_conjunctive_t_among_l),
        ("disjunctive-t-among-l", Family::TAmongL, letters(Disjunctive), seeds.disjunctive_t_among_l),
        (
            "shape-colour-conjunctive-2-among-5",
            Family::TwoAmongFive,
            digits(ShapeColourConjunctive),
            seeds.shape_colour_conjunctive_two_among_five,
        ),
    ];
    plan.into_iter()
        .map(|(name, family, conditions, master_seed)| {
            let spec = DatasetSpec { family, conditions, set_sizes: (0..=99).collect(), trials, master_seed };
            Ok(TransferEval { name, dataset: build_dataset(&spec)? })
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scene::{ground_truth_cell, Glyph};

    #[test]
    fn ten_examples_respect_the_cap() {
        let set = build_finetune_dataset(10, TRAIN_SEED).unwrap();
        assert_eq!(set.examples.len(), 10);
        assert!(set.examples.iter().all(|e| e.entry.n_distractors <= 49));
        for e in &set.examples {
            assert_eq!(e.answer, ground_truth_cell(e.entry.target_centre).unwrap().to_string());
            assert!(matches!(
                e.entry.task_condition,
                TaskCondition::TwoAmongFive { condition: SearchCondition::ShapeConjunctive, .. }
            ));
        }
    }

    #[test]
    fn hundred_is_balanced_and_deterministic() {
        let a = build_finetune_dataset(100, 5).unwrap();
        let b = build_finetune_dataset(100, 5).unwrap();
        assert_eq!(a.to_jsonl(ImageRef::RelativePath), b.to_jsonl(ImageRef::RelativePath));
        let mut counts = [0usize; 4];
        for e in &a.examples {
            counts[e.entry.ground_truth_cell.index()] += 1;
        }
        assert!(counts.iter().all(|&c| c == 25));
        let twos = a.examples.iter().filter(|e| e.entry.target_digit == Some(Glyph::Two)).count();
        assert_eq!(twos, 50);
        let mut per_size = [0usize; 50];
        for e in &a.examples {
            per_size[e.entry.n_distractors as usize] += 1;
        }
        assert!(per_size.iter().all(|&c| c == 2));
    }

    #[test]
    fn zero_examples_rejected() {
        assert!(matches!(build_finetune_dataset(0, 1), Err(FinetuneError::Empty)));
    }

    #[test]
    fn jsonl_shape() {
        let set = build_finetune_dataset(2, 9).unwrap();
        let text = set.to_jsonl(ImageRef::RelativePath);
        let first: serde_json::Value = serde_json::from_str(text.lines().next().unwrap()).unwrap();
        let msgs = first["messages"].as_array().unwrap();
        assert_eq!(msgs.len(), 3);
        assert_eq!(msgs[0]["role"], "system");
        assert_eq!(msgs[1]["content"][1]["image_url"]["url"], "images/finetune_00000.png");
        assert_eq!(msgs[2]["content"], set.examples[0].answer.as_str());
        let inline = set.to_jsonl(ImageRef::InlineBase64);
        assert!(inline.contains("data:image/png;base64,iVBORw0KGgo"));
    }

    #[test]
    fn transfer_eval_t_among_l() {
        let evals = build_transfer_evals(TransferSeeds::default(), 1).unwrap();
        assert_eq!(evals.len(), 4);
        let t = &evals[1].dataset;
        for s in &t.scenes {
            assert!(s.objects.iter().filter(|o| o.is_target).count() == 1);
        }
        for (s, e) in t.scenes.iter().zip(&t.manifest.entries) {
            if let TaskCondition::TAmongL { direction: LetterDirection::TAmongL, .. } = e.task_condition {
                assert_eq!(s.target().glyph, Some(Glyph::T));
                assert!(s.objects.iter().filter(|o| !o.is_target).all(|o| o.glyph == Some(Glyph::L)));
            }
        }
        for ev in &evals {
            assert_eq!(ev.dataset.manifest.entries.iter().map(|e| e.n_distractors).max(), Some(99));
        }
    }
}
