//! Aggregate statistics over scored trials: accuracy and error curves,
//! set-size correlations, spatial-bias tables and binned summaries.

pub mod report;
pub mod stats;

use crate::dataset::{Manifest, ManifestEntry};
use crate::scene::{Cell, Family};
use crate::scoring::{Mode, ScoreRecord};
use serde::{Deserialize, Serialize};
use std::collections::{BTreeMap, HashMap};
use thiserror::Error;

pub use report::{emit_report, Report, ReportIndex};
pub use stats::{bonferroni, mean_interval, pearson, pearson_p_value, wilson_interval, Z_95};

#[derive(Debug, Error)]
pub enum AnalysisError {
    #[error("no trials in group")]
    EmptyGroup,
    #[error("score for {0} has no manifest entry")]
    MissingEntry(String),
    #[error("expected {expected:?} scores, found {found:?}")]
    WrongMode { expected: Mode, found: Mode },
    #[error("set size {0} is not covered by any bin")]
    UncoveredValue(u32),
    #[error("bin edges must be non-empty and strictly increasing")]
    BadBins,
    #[error("correlation needs at least 3 trials, got {0}")]
    TooFewTrials(usize),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
    #[error(transparent)]
    Csv(#[from] csv::Error),
}

/// A score paired with the ground truth of its image.
#[derive(Debug, Clone, Copy)]
pub struct JoinedTrial<'a> {
    pub score: &'a ScoreRecord,
    pub entry: &'a ManifestEntry,
}

/// Pairs every score with its manifest entry by `image_id`.
pub fn join<'a>(
    scores: &'a [ScoreRecord],
    manifests: &'a [Manifest],
) -> Result<Vec<JoinedTrial<'a>>, AnalysisError> {
    let index: HashMap<&str, &ManifestEntry> = manifests
        .iter()
        .flat_map(|m| &m.entries)
        .map(|e| (e.image_id.as_str(), e))
        .collect();
    scores
        .iter()
        .map(|score| {
            index
                .get(score.trial_id.as_str())
                .map(|entry| JoinedTrial { score, entry })
                .ok_or_else(|| AnalysisError::MissingEntry(score.trial_id.clone()))
        })
        .collect()
}

/// (model, family, condition, mode)
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct GroupKey {
    pub model_id: String,
    pub family: String,
    pub condition: String,
    pub mode: String,
}

impl GroupKey {
    pub fn of(t: &JoinedTrial<'_>) -> Self {
        GroupKey {
            model_id: t.score.model_id.clone(),
            family: t.entry.task_condition.family().slug().to_string(),
            condition: t.entry.task_condition.label(),
            mode: match t.score.mode {
                Mode::Cells => "cells".into(),
                Mode::Coordinates => "coordinates".into(),
            },
        }
    }

    pub fn label(&self) -> String {
        format!("{} {} {}", self.model_id, self.condition, self.mode)
    }
}

/// Splits trials into groups, ordered by key.
pub fn group<'a>(trials: &[JoinedTrial<'a>]) -> BTreeMap<GroupKey, Vec<JoinedTrial<'a>>> {
    let mut out: BTreeMap<GroupKey, Vec<JoinedTrial<'a>>> = BTreeMap::new();
    for t in trials {
        out.entry(GroupKey::of(t)).or_default().push(*t);
    }
    out
}

fn require_mode(trials: &[JoinedTrial<'_>], expected: Mode) -> Result<(), AnalysisError> {
    match trials.iter().find(|t| t.score.mode != expected) {
        Some(t) => Err(AnalysisError::WrongMode { expected, found: t.score.mode }),
        None => Ok(()),
    }
}

fn is_correct(t: &JoinedTrial<'_>) -> bool {
    t.score.correct == Some(true)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProportionPoint {
    pub n: u32,
    pub trials: u64,
    pub successes: u64,
    pub mean: f64,
    pub ci_low: f64,
    pub ci_high: f64,
}

impl ProportionPoint {
    pub fn new(n: u32, trials: u64, successes: u64) -> Self {
        let (ci_low, ci_high) = wilson_interval(successes, trials, Z_95);
        ProportionPoint { n, trials, successes, mean: successes as f64 / trials as f64, ci_low, ci_high }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AccuracyCurve {
    pub group: GroupKey,
    pub points: Vec<ProportionPoint>,
    /// Pooled over all set sizes; `n` is unused (0).
    pub overall: ProportionPoint,
}

/// Per-set-size accuracy with Wilson 95% intervals for one group of
/// Cells-mode trials.
pub fn accuracy_by_set_size(trials: &[JoinedTrial<'_>]) -> Result<AccuracyCurve, AnalysisError> {
    let first = trials.first().ok_or(AnalysisError::EmptyGroup)?;
    require_mode(trials, Mode::Cells)?;
    let mut by_n: BTreeMap<u32, (u64, u64)> = BTreeMap::new();
    for t in trials {
        let slot = by_n.entry(t.entry.n_distractors).or_default();
        slot.0 += 1;
        slot.1 += u64::from(is_correct(t));
    }
    let points = by_n.iter().map(|(&n, &(k, s))| ProportionPoint::new(n, k, s)).collect();
    let successes = trials.iter().filter(|t| is_correct(t)).count() as u64;
    Ok(AccuracyCurve {
        group: GroupKey::of(first),
        points,
        overall: ProportionPoint::new(0, trials.len() as u64, successes),
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ErrorPoint {
    pub n: u32,
    pub trials: u64,
    pub mean_error: f64,
    pub ci_low: f64,
    pub ci_high: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ErrorCurve {
    pub group: GroupKey,
    pub points: Vec<ErrorPoint>,
    pub overall_mean: f64,
}

/// Per-set-size mean pixel error with a normal-approximation 95% interval.
pub fn error_by_set_size(trials: &[JoinedTrial<'_>]) -> Result<ErrorCurve, AnalysisError> {
    let first = trials.first().ok_or(AnalysisError::EmptyGroup)?;
    require_mode(trials, Mode::Coordinates)?;
    let mut by_n: BTreeMap<u32, Vec<f64>> = BTreeMap::new();
    for t in trials {
        by_n.entry(t.entry.n_distractors).or_default().push(t.score.error_px.unwrap_or(0.0));
    }
    let points = by_n
        .iter()
        .map(|(&n, errs)| {
            let (mean_error, ci_low, ci_high) = mean_interval(errs);
            ErrorPoint { n, trials: errs.len() as u64, mean_error, ci_low, ci_high }
        })
        .collect();
    let all: Vec<f64> = by_n.into_values().flatten().collect();
    Ok(ErrorCurve {
        group: GroupKey::of(first),
        points,
        overall_mean: all.iter().sum::<f64>() / all.len() as f64,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CorrelationResult {
    pub group: GroupKey,
    pub r: f64,
    pub p_raw: f64,
    pub p_adjusted: f64,
    pub n_trials: usize,
    pub degenerate: bool,
    /// r over per-set-size mean accuracy rather than per trial.
    pub r_set_size_means: Option<f64>,
}

/// Trial-level Pearson r between distractor count and binary correctness.
/// `p_adjusted` equals `p_raw` until [`adjust_family`] is applied.
pub fn pearson_set_size(trials: &[JoinedTrial<'_>]) -> Result<CorrelationResult, AnalysisError> {
    let first = trials.first().ok_or(AnalysisError::EmptyGroup)?;
    require_mode(trials, Mode::Cells)?;
    if trials.len() < 3 {
        return Err(AnalysisError::TooFewTrials(trials.len()));
    }
    let xs: Vec<f64> = trials.iter().map(|t| f64::from(t.entry.n_distractors)).collect();
    let ys: Vec<f64> = trials.iter().map(|t| if is_correct(t) { 1.0 } else { 0.0 }).collect();
    let pr = pearson(&xs, &ys);
    let p_raw = if pr.degenerate { 1.0 } else { pearson_p_value(pr.r, trials.len()) };
    let curve = accuracy_by_set_size(trials)?;
    let r_set_size_means = (curve.points.len() >= 3)
        .then(|| {
            let nx: Vec<f64> = curve.points.iter().map(|p| f64::from(p.n)).collect();
            let ny: Vec<f64> = curve.points.iter().map(|p| p.mean).collect();
            pearson(&nx, &ny)
        })
        .filter(|p| !p.degenerate)
        .map(|p| p.r);
    Ok(CorrelationResult {
        group: GroupKey::of(first),
        r: pr.r,
        p_raw,
        p_adjusted: p_raw,
        n_trials: trials.len(),
        degenerate: pr.degenerate,
        r_set_size_means,
    })
}

/// Bonferroni over the whole slice: `p_adjusted = min(1, p_raw * len)`.
pub fn adjust_family(results: &mut [CorrelationResult]) {
    let k = results.len();
    for r in results {
        r.p_adjusted = bonferroni(r.p_raw, k);
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CellBias {
    pub cell: Cell,
    /// Correct picks of the cell over all picks of it; `None` if never picked.
    pub precision: Option<f64>,
    /// Correct picks of the cell over trials whose truth is the cell.
    pub recall: Option<f64>,
    /// Percentage of all trials answered with this cell.
    pub selection_pct: f64,
    /// Percentage of all trials whose truth is this cell.
    pub truth_pct: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpatialBiasTable {
    pub group: GroupKey,
    pub trials: u64,
    pub cells: Vec<CellBias>,
    /// Percentage of trials without a valid cell answer.
    pub invalid_pct: f64,
    pub accuracy: f64,
}

pub fn spatial_bias_table(trials: &[JoinedTrial<'_>]) -> Result<SpatialBiasTable, AnalysisError> {
    let first = trials.first().ok_or(AnalysisError::EmptyGroup)?;
    require_mode(trials, Mode::Cells)?;
    let total = trials.len() as f64;
    let mut picks = [0u64; 4];
    let mut hits = [0u64; 4];
    let mut truths = [0u64; 4];
    let mut invalid = 0u64;
    for t in trials {
        truths[t.entry.ground_truth_cell.index()] += 1;
        match t.score.answer_cell {
            Some(c) => {
                picks[c.index()] += 1;
                if c == t.entry.ground_truth_cell {
                    hits[c.index()] += 1;
                }
            }
            None => invalid += 1,
        }
    }
    let ratio = |a: u64, b: u64| (b > 0).then(|| a as f64 / b as f64);
    let cells = Cell::ALL
        .iter()
        .map(|&cell| {
            let i = cell.index();
            CellBias {
                cell,
                precision: ratio(hits[i], picks[i]),
                recall: ratio(hits[i], truths[i]),
                selection_pct: 100.0 * picks[i] as f64 / total,
                truth_pct: 100.0 * truths[i] as f64 / total,
            }
        })
        .collect();
    Ok(SpatialBiasTable {
        group: GroupKey::of(first),
        trials: trials.len() as u64,
        cells,
        invalid_pct: 100.0 * invalid as f64 / total,
        accuracy: hits.iter().sum::<u64>() as f64 / total,
    })
}

/// Inclusive range of distractor counts.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Bin {
    pub lo: u32,
    pub hi: u32,
}

impl Bin {
    pub const fn new(lo: u32, hi: u32) -> Self {
        Self { lo, hi }
    }

    pub fn contains(&self, n: u32) -> bool {
        (self.lo..=self.hi).contains(&n)
    }

    pub fn label(&self) -> String {
        format!("{}-{}", self.lo, self.hi)
    }
}

const fn bins<const N: usize>(edges: [(u32, u32); N]) -> [Bin; N] {
    let mut out = [Bin::new(0, 0); N];
    let mut i = 0;
    while i < N {
        out[i] = Bin::new(edges[i].0, edges[i].1);
        i += 1;
    }
    out
}

pub const HUMAN_BINS_CIRCLE_SIZES: [Bin; 12] = bins([
    (1, 4),
    (5, 8),
    (9, 12),
    (13, 16),
    (17, 20),
    (21, 24),
    (25, 28),
    (29, 32),
    (33, 36),
    (37, 40),
    (41, 44),
    (45, 49),
]);
pub const HUMAN_BINS_TWO_AMONG_FIVE: [Bin; 6] =
    bins([(1, 4), (5, 8), (9, 16), (17, 32), (33, 64), (65, 99)]);
pub const HUMAN_BINS_LIGHT_PRIORS: [Bin; 4] = bins([(2, 5), (6, 9), (10, 13), (14, 17)]);

/// Distractor bins used for the human experiments.
pub fn human_bins(family: Family) -> &'static [Bin] {
    match family {
        Family::CircleSizes => &HUMAN_BINS_CIRCLE_SIZES,
        Family::TwoAmongFive | Family::TAmongL => &HUMAN_BINS_TWO_AMONG_FIVE,
        Family::LightPriors => &HUMAN_BINS_LIGHT_PRIORS,
    }
}

/// Ten-wide bins 0-9 .. 90-99 for the transfer evaluations.
pub fn finetune_bins() -> Vec<Bin> {
    (0..10).map(|k| Bin::new(k * 10, k * 10 + 9)).collect()
}

pub fn validate_bins(bins: &[Bin]) -> Result<(), AnalysisError> {
    let ordered = bins.windows(2).all(|w| w[0].hi < w[1].lo);
    if bins.is_empty() || !ordered || bins.iter().any(|b| b.lo > b.hi) {
        return Err(AnalysisError::BadBins);
    }
    Ok(())
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BinnedRow {
    pub bin: Bin,
    pub trials: u64,
    pub successes: u64,
    pub mean: Option<f64>,
}

/// Accuracy per bin. Every trial's set size must fall in some bin.
pub fn bin_results(trials: &[JoinedTrial<'_>], bins: &[Bin]) -> Result<Vec<BinnedRow>, AnalysisError> {
    validate_bins(bins)?;
    let mut rows: Vec<BinnedRow> = bins
        .iter()
        .map(|&bin| BinnedRow { bin, trials: 0, successes: 0, mean: None })
        .collect();
    for t in trials {
        let n = t.entry.n_distractors;
        let row = rows
            .iter_mut()
            .find(|r| r.bin.contains(n))
            .ok_or(AnalysisError::UncoveredValue(n))?;
        row.trials += 1;
        row.successes += u64::from(is_correct(t));
    }
    for r in &mut rows {
        r.mean = (r.trials > 0).then(|| r.successes as f64 / r.trials as f64);
    }
    Ok(rows)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BinnedTable {
    pub group: GroupKey,
    pub rows: Vec<BinnedRow>,
}

/// Which bin scheme `analyze` applies.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BinScheme {
    Human,
    Finetune,
    None,
}

/// Runs every applicable analysis per group. The Bonferroni family is every
/// correlation computed in this call.
pub fn analyze(trials: &[JoinedTrial<'_>], bins: BinScheme) -> Result<Report, AnalysisError> {
    let mut report = Report::default();
    for (key, group) in group(trials) {
        match group[0].score.mode {
            Mode::Cells => {
                report.accuracy_curves.push(accuracy_by_set_size(&group)?);
                report.spatial_bias.push(spatial_bias_table(&group)?);
                if group.len() >= 3 {
                    report.correlations.push(pearson_set_size(&group)?);
                }
                let scheme = match bins {
                    BinScheme::Human => Some(human_bins(group[0].entry.task_condition.family()).to_vec()),
                    BinScheme::Finetune => Some(finetune_bins()),
                    BinScheme::None => None,
                };
                if let Some(edges) = scheme {
                    // Set sizes outside the scheme (e.g. 0 for human bins) are left out.
                    let covered: Vec<JoinedTrial<'_>> = group
                        .iter()
                        .copied()
                        .filter(|t| edges.iter().any(|b| b.contains(t.entry.n_distractors)))
                        .collect();
                    report.binned.push(BinnedTable { group: key.clone(), rows: bin_results(&covered, &edges)? });
                }
            }
            Mode::Coordinates => report.error_curves.push(error_by_set_size(&group)?),
        }
    }
    adjust_family(&mut report.correlations);
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scene::{ground_truth_cell, Point, SizeCondition, TaskCondition};
    use crate::scoring::ScoreFlags;

    fn entry(id: usize, n: u32, cell: Cell) -> ManifestEntry {
        let centre = Point::new(
            if cell.col == 1 { 100.0 } else { 300.0 },
            if cell.row == 1 { 100.0 } else { 300.0 },
        );
        ManifestEntry {
            image_id: format!("i{id}"),
            task_condition: TaskCondition::CircleSizes { condition: SizeCondition::Medium },
            n_distractors: n,
            master_seed: 1,
            target_centre: centre,
            ground_truth_cell: ground_truth_cell(centre).unwrap(),
            target_colour: None,
            distractor_colour: None,
            target_digit: None,
        }
    }

    fn cell_score(id: usize, pick: Option<Cell>, truth: Cell) -> ScoreRecord {
        ScoreRecord {
            trial_id: format!("i{id}"),
            model_id: "m".into(),
            mode: Mode::Cells,
            correct: Some(pick == Some(truth)),
            error_px: None,
            answer_cell: pick,
            flags: ScoreFlags { invalid_cell: pick.is_none(), ..Default::default() },
        }
    }

    fn fixture(picks: impl Fn(usize, Cell) -> Option<Cell>, count: usize) -> (Vec<ScoreRecord>, Vec<Manifest>) {
        let entries: Vec<ManifestEntry> = (0..count).map(|i| entry(i, (i % 50) as u32, Cell::ALL[i % 4])).collect();
        let scores = entries
            .iter()
            .enumerate()
            .map(|(i, e)| cell_score(i, picks(i, e.ground_truth_cell), e.ground_truth_cell))
            .collect();
        (scores, vec![Manifest { schema_version: 1, master_seed: 1, entries }])
    }

    #[test]
    fn oracle_curve_is_flat_at_one() {
        let (s, m) = fixture(|_, t| Some(t), 200);
        let joined = join(&s, &m).unwrap();
        let curve = accuracy_by_set_size(&joined).unwrap();
        assert_eq!(curve.points.len(), 50);
        for p in &curve.points {
            assert_eq!(p.mean, 1.0);
            assert_eq!(p.ci_high, 1.0);
            assert!(p.ci_low <= p.mean);
        }
    }

    #[test]
    fn empty_group_errors() {
        assert!(matches!(accuracy_by_set_size(&[]), Err(AnalysisError::EmptyGroup)));
        assert!(matches!(spatial_bias_table(&[]), Err(AnalysisError::EmptyGroup)));
        assert!(matches!(error_by_set_size(&[]), Err(AnalysisError::EmptyGroup)));
    }

    #[test]
    fn missing_entry_errors() {
        let (s, _) = fixture(|_, t| Some(t), 4);
        assert!(matches!(join(&s, &[]), Err(AnalysisError::MissingEntry(_))));
    }

    #[test]
    fn always_bottom_right() {
        let br = Cell { row: 2, col: 2 };
        let (s, m) = fixture(|_, _| Some(br), 1000);
        let joined = join(&s, &m).unwrap();
        let t = spatial_bias_table(&joined).unwrap();
        let c = &t.cells[br.index()];
        assert_eq!(c.selection_pct, 100.0);
        assert_eq!(c.recall, Some(1.0));
        assert_eq!(c.precision, Some(0.25));
        assert_eq!(t.cells[0].precision, None);
        assert_eq!(t.cells[0].recall, Some(0.0));
    }

    #[test]
    fn bias_identities() {
        let (s, m) = fixture(|i, t| if i % 7 == 0 { None } else if i % 3 == 0 { Some(Cell::ALL[(i % 4) ^ 1]) } else { Some(t) }, 400);
        let joined = join(&s, &m).unwrap();
        let t = spatial_bias_table(&joined).unwrap();
        let sel: f64 = t.cells.iter().map(|c| c.selection_pct).sum::<f64>() + t.invalid_pct;
        assert!((sel - 100.0).abs() < 0.1);
        let weighted: f64 = t.cells.iter().map(|c| c.recall.unwrap() * c.truth_pct / 100.0).sum();
        assert!((weighted - t.accuracy).abs() < 1e-12);
    }

    #[test]
    fn correlation_on_step_table() {
        let entries: Vec<ManifestEntry> = (0..=20).map(|n| entry(n as usize, n, Cell::ALL[0])).collect();
        let scores: Vec<ScoreRecord> = (0..=20usize)
            .map(|n| cell_score(n, if n <= 10 { Some(Cell::ALL[0]) } else { Some(Cell::ALL[1]) }, Cell::ALL[0]))
            .collect();
        let m = vec![Manifest { schema_version: 1, master_seed: 1, entries }];
        let joined = join(&scores, &m).unwrap();
        let c = pearson_set_size(&joined).unwrap();
        assert!((c.r + 0.866).abs() < 0.001);
        assert!(!c.degenerate);
        assert!(c.p_raw < 1e-6);
    }

    #[test]
    fn oracle_correlation_is_degenerate() {
        let (s, m) = fixture(|_, t| Some(t), 100);
        let joined = join(&s, &m).unwrap();
        let c = pearson_set_size(&joined).unwrap();
        assert!(c.degenerate);
        assert_eq!(c.r, 0.0);
        assert_eq!(c.p_raw, 1.0);
    }

    #[test]
    fn bonferroni_family() {
        let (s, m) = fixture(|i, t| if i % 2 == 0 { Some(t) } else { None }, 100);
        let joined = join(&s, &m).unwrap();
        let one = pearson_set_size(&joined).unwrap();
        let mut fam = vec![one.clone(), one.clone(), one.clone()];
        adjust_family(&mut fam);
        for r in &fam {
            assert_eq!(r.p_adjusted, (one.p_raw * 3.0).min(1.0));
        }
    }

    #[test]
    fn binning() {
        let (s, m) = fixture(|i, t| if i % 2 == 0 { Some(t) } else { None }, 100);
        let joined = join(&s, &m).unwrap();
        let rows = bin_results(&joined, &[Bin::new(0, 24), Bin::new(25, 49)]).unwrap();
        assert_eq!(rows.iter().map(|r| r.trials).sum::<u64>(), 100);
        assert_eq!(rows[0].trials, 50);
        let uncovered = bin_results(&joined, &HUMAN_BINS_CIRCLE_SIZES);
        assert!(matches!(uncovered, Err(AnalysisError::UncoveredValue(0))));
        assert!(matches!(bin_results(&joined, &[Bin::new(5, 9), Bin::new(0, 4)]), Err(AnalysisError::BadBins)));
        assert!(matches!(bin_results(&joined, &[]), Err(AnalysisError::BadBins)));
        assert_eq!(HUMAN_BINS_CIRCLE_SIZES.len(), 12);
        assert_eq!(finetune_bins().len(), 10);
    }

    #[test]
    fn binned_means_are_weighted_per_n_means() {
        let (s, m) = fixture(|i, t| if i % 3 == 0 { None } else { Some(t) }, 300);
        let joined = join(&s, &m).unwrap();
        let curve = accuracy_by_set_size(&joined).unwrap();
        let edges = [Bin::new(0, 9), Bin::new(10, 30), Bin::new(31, 49)];
        for row in bin_results(&joined, &edges).unwrap() {
            let pts: Vec<_> = curve.points.iter().filter(|p| row.bin.contains(p.n)).collect();
            let w: f64 = pts.iter().map(|p| p.trials as f64).sum();
            let combo: f64 = pts.iter().map(|p| p.mean * p.trials as f64).sum::<f64>() / w;
            assert!((combo - row.mean.unwrap()).abs() < 1e-12);
        }
    }

    #[test]
    fn wrong_mode_is_rejected() {
        let (mut s, m) = fixture(|_, t| Some(t), 8);
        s[3].mode = Mode::Coordinates;
        let joined = join(&s, &m).unwrap();
        assert!(matches!(accuracy_by_set_size(&joined), Err(AnalysisError::WrongMode { .. })));
    }
}
