//! Visual-search stimuli for probing multimodal models: scene generation,
//! rendering, prompt construction, reply scoring, statistics, fine-tuning
//! exports and the human-baseline schedule.

pub mod analysis;
pub mod dataset;
pub mod finetune;
pub mod human;
pub mod prompt;
pub mod raster;
pub mod rng;
pub mod scene;
pub mod scoring;
pub mod stimgen;

pub use dataset::{build_dataset, Dataset, DatasetSpec, Manifest, ManifestEntry};
pub use raster::{decode_png, encode_png, render_scene, Image};
pub use rng::{make_rng, sub_seed, RngState};
pub use scene::{ground_truth_cell, Cell, Colour, Family, Point, Scene, TaskCondition};
pub use scoring::{parse_cell, parse_coordinates, score_cells, score_coordinates, Mode, ParsedAnswer, ScoreRecord};

/// Hex SHA-256 of `bytes`.
pub fn content_hash(bytes: &[u8]) -> String {
    use sha2::{Digest, Sha256};
    hex::encode(Sha256::digest(bytes))
}
