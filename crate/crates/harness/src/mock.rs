//! Scripted models for tests and dry runs.

use crate::adapter::{ModelAdapter, ModelRequest, TransportError};
use async_trait::async_trait;
use std::collections::HashMap;
use std::sync::Mutex;
use vsearch_core::scoring::{format_answer, AnswerKind};
use vsearch_core::{make_rng, Cell, Manifest, ManifestEntry, Mode, RngState};

/// Answers with the ground truth from the manifest.
pub struct Oracle {
    entries: HashMap<String, ManifestEntry>,
}

impl Oracle {
    pub fn new(manifest: &Manifest) -> Self {
        Self { entries: manifest.entries.iter().map(|e| (e.image_id.clone(), e.clone())).collect() }
    }
}

#[async_trait]
impl ModelAdapter for Oracle {
    fn model_id(&self) -> &str {
        "mock:oracle"
    }

    async fn send(&self, req: &ModelRequest<'_>) -> Result<String, TransportError> {
        let e = self
            .entries
            .get(req.image_id)
            .ok_or_else(|| TransportError::fatal(format!("oracle has no entry for {}", req.image_id)))?;
        Ok(match req.mode {
            Mode::Cells => e.ground_truth_cell.to_string(),
            Mode::Coordinates => format_answer(&AnswerKind::Coordinates { x: e.target_centre.x, y: e.target_centre.y }),
        })
    }
}

/// Picks a cell uniformly at random from a seeded stream. With a
/// parallelism of one the answers are reproducible.
pub struct UniformRandomCell {
    rng: Mutex<RngState>,
}

impl UniformRandomCell {
    pub fn new(seed: u64) -> Self {
        Self { rng: Mutex::new(make_rng(seed)) }
    }
}

#[async_trait]
impl ModelAdapter for UniformRandomCell {
    fn model_id(&self) -> &str {
        "mock:uniform_random_cell"
    }

    async fn send(&self, req: &ModelRequest<'_>) -> Result<String, TransportError> {
        let mut rng = self.rng.lock().expect("rng lock");
        Ok(match req.mode {
            Mode::Cells => Cell::ALL[rng.below(4) as usize].to_string(),
            Mode::Coordinates => format!("({:.0}, {:.0})", rng.uniform(0.0, 400.0), rng.uniform(0.0, 400.0)),
        })
    }
}

/// Always points at the image centre.
pub struct FixedCentre;

#[async_trait]
impl ModelAdapter for FixedCentre {
    fn model_id(&self) -> &str {
        "mock:fixed_centre"
    }

    async fn send(&self, _req: &ModelRequest<'_>) -> Result<String, TransportError> {
        Ok("(200, 200)".to_string())
    }
}

/// Always names the same cell (or that cell's centre).
pub struct FixedCell(pub Cell);

#[async_trait]
impl ModelAdapter for FixedCell {
    fn model_id(&self) -> &str {
        "mock:fixed_cell"
    }

    async fn send(&self, req: &ModelRequest<'_>) -> Result<String, TransportError> {
        Ok(match req.mode {
            Mode::Cells => self.0.to_string(),
            Mode::Coordinates => format!("({}, {})", f64::from(self.0.col) * 200.0 - 100.0, f64::from(self.0.row) * 200.0 - 100.0),
        })
    }
}

/// Declines every request.
pub struct Refuser;

pub const REFUSAL_TEXT: &str = "I'm sorry, but no target could be identified in this image.";

#[async_trait]
impl ModelAdapter for Refuser {
    fn model_id(&self) -> &str {
        "mock:refuser"
    }

    async fn send(&self, _req: &ModelRequest<'_>) -> Result<String, TransportError> {
        Ok(REFUSAL_TEXT.to_string())
    }
}

/// Answers outside the canvas, or with a cell outside the grid.
pub struct OutOfRange;

#[async_trait]
impl ModelAdapter for OutOfRange {
    fn model_id(&self) -> &str {
        "mock:out_of_range"
    }

    async fn send(&self, req: &ModelRequest<'_>) -> Result<String, TransportError> {
        Ok(match req.mode {
            Mode::Cells => "Cell (2,3)".to_string(),
            Mode::Coordinates => "(450, 500)".to_string(),
        })
    }
}

pub struct MockSet {
    pub oracle: Oracle,
    pub uniform_random_cell: UniformRandomCell,
    pub fixed_centre: FixedCentre,
    pub refuser: Refuser,
    pub out_of_range: OutOfRange,
}

pub fn mock_adapters(manifest: &Manifest, seed: u64) -> MockSet {
    MockSet {
        oracle: Oracle::new(manifest),
        uniform_random_cell: UniformRandomCell::new(seed),
        fixed_centre: FixedCentre,
        refuser: Refuser,
        out_of_range: OutOfRange,
    }
}

pub const MOCK_NAMES: [&str; 6] = ["oracle", "uniform_random_cell", "fixed_centre", "refuser", "out_of_range", "fixed_cell"];

/// Looks up a mock by name; `fixed_cell` always answers Cell (2,2).
pub fn mock_by_name(name: &str, manifest: &Manifest, seed: u64) -> Option<Box<dyn ModelAdapter>> {
    Some(match name {
        "oracle" => Box::new(Oracle::new(manifest)),
        "uniform_random_cell" => Box::new(UniformRandomCell::new(seed)),
        "fixed_centre" => Box::new(FixedCentre),
        "refuser" => Box::new(Refuser),
        "out_of_range" => Box::new(OutOfRange),
        "fixed_cell" => Box::new(FixedCell(Cell { row: 2, col: 2 })),
        _ => return None,
    })
}
