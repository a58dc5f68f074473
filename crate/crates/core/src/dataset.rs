//! Dataset assembly: deterministic scene schedules and their ground-truth
//! manifests.

use crate::raster::{encode_png, render_scene};
use crate::rng::{make_rng, sub_seed};
use crate::scene::{ground_truth_cell, Cell, Colour, Family, Glyph, Point, Scene, TaskCondition};
use crate::stimgen::{generate_scene, StimError};
use serde::{Deserialize, Serialize};
use std::io;
use std::path::Path;
use thiserror::Error;

pub const MANIFEST_SCHEMA_VERSION: u32 = 1;
/// Master seed used for the published stimulus sets.
pub const DEFAULT_MASTER_SEED: u64 = 42;
pub const MANIFEST_FILE: &str = "manifest.json";

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ManifestEntry {
    pub image_id: String,
    pub task_condition: TaskCondition,
    pub n_distractors: u32,
    pub master_seed: u64,
    pub target_centre: Point,
    pub ground_truth_cell: Cell,
    pub target_colour: Option<Colour>,
    pub distractor_colour: Option<Colour>,
    pub target_digit: Option<Glyph>,
}

impl ManifestEntry {
    /// Ground truth for `scene`.
    pub fn from_scene(image_id: String, master_seed: u64, scene: &Scene) -> Self {
        let target = scene.target();
        let distractor_colour = scene
            .objects
            .iter()
            .find(|o| !o.is_target && o.colour != target.colour)
            .or_else(|| scene.objects.iter().find(|o| !o.is_target))
            .map(|o| o.colour);
        let chromatic = |c: Colour| Colour::CHROMATIC.contains(&c).then_some(c);
        ManifestEntry {
            image_id,
            task_condition: scene.condition,
            n_distractors: scene.n_distractors() as u32,
            master_seed,
            target_centre: target.centre,
            ground_truth_cell: ground_truth_cell(target.centre).expect("target inside canvas"),
            target_colour: chromatic(target.colour),
            distractor_colour: distractor_colour.and_then(chromatic),
            target_digit: target.glyph,
        }
    }

    pub fn image_file(&self) -> String {
        format!("{}.png", self.image_id)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Manifest {
    pub schema_version: u32,
    pub master_seed: u64,
    pub entries: Vec<ManifestEntry>,
}

impl Manifest {
    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("manifest serialises");
        s.push('\n');
        s
    }

    pub fn read(path: &Path) -> Result<Self, DatasetError> {
        let text = std::fs::read_to_string(path)?;
        Ok(serde_json::from_str(&text)?)
    }

    pub fn entry(&self, image_id: &str) -> Option<&ManifestEntry> {
        self.entries.iter().find(|e| e.image_id == image_id)
    }
}

#[derive(Debug, Error)]
pub enum DatasetError {
    #[error("scene {index}: {source}")]
    Scene { index: usize, source: StimError },
    #[error("set size {n} outside 0..={max} for {family:?}")]
    Schedule { family: Family, n: u32, max: u32 },
    #[error("condition {0:?} belongs to another family")]
    ForeignCondition(TaskCondition),
    #[error(transparent)]
    Io(#[from] io::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

/// What to generate: every condition crossed with every set size, `trials`
/// times each.
#[derive(Debug, Clone, PartialEq)]
pub struct DatasetSpec {
    pub family: Family,
    pub conditions: Vec<TaskCondition>,
    pub set_sizes: Vec<u32>,
    pub trials: u32,
    pub master_seed: u64,
}

impl DatasetSpec {
    /// All conditions of `family` over its full distractor range.
    pub fn full(family: Family, trials: u32, master_seed: u64) -> Self {
        Self {
            family,
            conditions: family.conditions(),
            set_sizes: (0..=family.max_distractors()).collect(),
            trials,
            master_seed,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Dataset {
    pub scenes: Vec<Scene>,
    pub manifest: Manifest,
}

/// Scene `index` of a dataset draws only from `sub_seed(master_seed, index)`.
pub fn build_dataset(spec: &DatasetSpec) -> Result<Dataset, DatasetError> {
    let max = spec.family.max_distractors();
    if let Some(&n) = spec.set_sizes.iter().find(|&&n| n > max) {
        return Err(DatasetError::Schedule { family: spec.family, n, max });
    }
    if let Some(c) = spec.conditions.iter().find(|c| c.family() != spec.family) {
        return Err(DatasetError::ForeignCondition(*c));
    }
    let mut scenes = Vec::new();
    let mut entries = Vec::new();
    let mut index = 0usize;
    for condition in &spec.conditions {
        for &n in &spec.set_sizes {
            for _ in 0..spec.trials {
                let mut rng = make_rng(sub_seed(spec.master_seed, index as u64));
                let scene = generate_scene(&mut rng, condition, n, None)
                    .map_err(|source| DatasetError::Scene { index, source })?;
                let id = format!("{}_{:05}", spec.family.slug(), index);
                entries.push(ManifestEntry::from_scene(id, spec.master_seed, &scene));
                scenes.push(scene);
                index += 1;
            }
        }
    }
    Ok(Dataset {
        scenes,
        manifest: Manifest {
            schema_version: MANIFEST_SCHEMA_VERSION,
            master_seed: spec.master_seed,
            entries,
        },
    })
}

impl Dataset {
    /// Writes `manifest.json` plus one PNG per entry into `dir`.
    pub fn write_to(&self, dir: &Path) -> Result<(), DatasetError> {
        std::fs::create_dir_all(dir)?;
        std::fs::write(dir.join(MANIFEST_FILE), self.manifest.to_json())?;
        for (scene, entry) in self.scenes.iter().zip(&self.manifest.entries) {
            std::fs::write(dir.join(entry.image_file()), encode_png(&render_scene(scene)))?;
        }
        Ok(())
    }
}
