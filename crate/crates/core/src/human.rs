//! Human-baseline protocol: stratified stimulus schedules, trial serving,
//! keyed responses and result export.

use crate::analysis::{human_bins, Bin};
use crate::dataset::ManifestEntry;
use crate::prompt::human_prompt_line;
use crate::rng::{make_rng, sub_seed};
use crate::scene::{Cell, Colour, Family, Scene, SearchCondition, TaskCondition};
use crate::stimgen::{generate_scene, Palette, StimError};
use serde::{Deserialize, Serialize};
use thiserror::Error;

pub const FIXATION_MS: u32 = 500;
pub const PRACTICE_TRIALS: usize = 8;
/// Targets with either coordinate inside this closed band are never shown.
pub const EXCLUSION_BAND: (f64, f64) = (170.0, 230.0);
/// Accuracy below this flags a participant for replacement.
pub const CHANCE_LEVEL: f64 = 0.25;
/// Scenes drawn per schedule slot before giving up.
pub const SLOT_ATTEMPTS: u32 = 2_000;
const PRACTICE_SALT: u64 = 0x7072_6163_7469_6365;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum SessionError {
    #[error("no stimulus satisfied slot {slot} ({condition}, bin {bin}, {cell}) after {SLOT_ATTEMPTS} draws")]
    PoolTooSmall { slot: usize, condition: String, bin: String, cell: Cell },
    #[error("{0:?} has no human protocol")]
    UnsupportedFamily(Family),
    #[error(transparent)]
    Stimulus(#[from] StimError),
    #[error("session complete")]
    SessionComplete,
    #[error("trial {0} has not been served")]
    UnknownTrial(usize),
    #[error("trial {0} already has a response")]
    DuplicateResponse(usize),
    #[error("key {0:?} is not one of Q, P, A, L")]
    InvalidKey(String),
    #[error("event log: {0}")]
    Log(String),
}

/// Response keys and their fixed cells.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum ResponseKey {
    Q,
    P,
    A,
    L,
}

impl ResponseKey {
    pub fn parse(s: &str) -> Result<Self, SessionError> {
        match s.trim().to_ascii_uppercase().as_str() {
            "Q" => Ok(ResponseKey::Q),
            "P" => Ok(ResponseKey::P),
            "A" => Ok(ResponseKey::A),
            "L" => Ok(ResponseKey::L),
            _ => Err(SessionError::InvalidKey(s.to_string())),
        }
    }

    pub fn cell(self) -> Cell {
        match self {
            ResponseKey::Q => Cell { row: 1, col: 1 },
            ResponseKey::P => Cell { row: 1, col: 2 },
            ResponseKey::A => Cell { row: 2, col: 1 },
            ResponseKey::L => Cell { row: 2, col: 2 },
        }
    }
}

/// Stimulus duration per family.
pub fn stimulus_ms(family: Family) -> u32 {
    match family {
        Family::TwoAmongFive | Family::TAmongL => 3000,
        Family::CircleSizes | Family::LightPriors => 1500,
    }
}

pub fn in_exclusion_band(v: f64) -> bool {
    (EXCLUSION_BAND.0..=EXCLUSION_BAND.1).contains(&v)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScheduledTrial {
    pub index: usize,
    pub practice: bool,
    pub bin: Option<Bin>,
    pub entry: ManifestEntry,
    pub scene: Scene,
    pub fixation_ms: u32,
    pub stimulus_ms: u32,
    pub prompt_line: String,
    pub feedback: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SessionSchedule {
    pub participant_id: String,
    pub family: Family,
    pub master_seed: u64,
    /// Practice block first, then the experimental block.
    pub trials: Vec<ScheduledTrial>,
}

impl SessionSchedule {
    pub fn experimental(&self) -> impl Iterator<Item = &ScheduledTrial> {
        self.trials.iter().filter(|t| !t.practice)
    }
}

/// Experimental design: conditions, trials per (bin, cell), palettes per
/// condition.
struct Design {
    conditions: Vec<TaskCondition>,
    per_cell: usize,
}

fn design(family: Family) -> Result<Design, SessionError> {
    match family {
        Family::CircleSizes => Ok(Design { conditions: family.conditions(), per_cell: 1 }),
        Family::TwoAmongFive => Ok(Design { conditions: family.conditions(), per_cell: 1 }),
        Family::LightPriors => Ok(Design { conditions: family.conditions(), per_cell: 3 }),
        Family::TAmongL => Err(SessionError::UnsupportedFamily(family)),
    }
}

/// Colour combinations cycled round-robin within a condition.
fn palette_cycle(condition: &TaskCondition) -> Vec<Option<Palette>> {
    let same = || Colour::CHROMATIC.map(|c| Some(Palette { target: c, distractor: c })).to_vec();
    let pairs = || {
        let mut v = Vec::new();
        for t in Colour::CHROMATIC {
            for d in Colour::CHROMATIC {
                if t != d {
                    v.push(Some(Palette { target: t, distractor: d }));
                }
            }
        }
        v
    };
    match condition {
        TaskCondition::CircleSizes { .. } => same(),
        TaskCondition::LightPriors { .. } => vec![None],
        _ => match condition.search_condition() {
            Some(SearchCondition::ShapeConjunctive) => same(),
            _ => pairs(),
        },
    }
}

fn participant_hash(participant: &str) -> u64 {
    // FNV-1a
    participant
        .bytes()
        .fold(0xcbf2_9ce4_8422_2325u64, |h, b| (h ^ u64::from(b)).wrapping_mul(0x0000_0100_0000_01b3))
}

fn acceptable(scene: &Scene, cell: Option<Cell>) -> bool {
    let c = scene.target().centre;
    if in_exclusion_band(c.x) || in_exclusion_band(c.y) {
        return false;
    }
    match cell {
        Some(cell) => crate::scene::ground_truth_cell(c).ok() == Some(cell),
        None => true,
    }
}

/// Builds the stratified schedule for one participant.
///
/// Stimuli depend only on `master_seed`: each (condition, bin, cell) slot
/// draws scenes from its own sub-seed, set size uniform in the bin, until the
/// target lies in the slot's cell and outside the exclusion band. The
/// experimental order is shuffled per participant.
pub fn create_session(family: Family, participant_id: &str, master_seed: u64) -> Result<SessionSchedule, SessionError> {
    let design = design(family)?;
    let bins = human_bins(family);
    let stim_ms = stimulus_ms(family);

    let mut experimental = Vec::new();
    let mut slot = 0usize;
    for condition in &design.conditions {
        let cycle = palette_cycle(condition);
        let mut within = 0usize;
        for bin in bins {
            for rep in 0..design.per_cell {
                for cell in Cell::ALL {
                    let palette = cycle[within % cycle.len()];
                    within += 1;
                    let mut rng = make_rng(sub_seed(master_seed, slot as u64));
                    let mut found = None;
                    for _ in 0..SLOT_ATTEMPTS {
                        let n = rng.int_inclusive(bin.lo, bin.hi);
                        let scene = generate_scene(&mut rng, condition, n, palette)?;
                        if acceptable(&scene, Some(cell)) {
                            found = Some(scene);
                            break;
                        }
                    }
                    let scene = found.ok_or_else(|| SessionError::PoolTooSmall {
                        slot,
                        condition: condition.label(),
                        bin: bin.label(),
                        cell,
                    })?;
                    let _ = rep;
                    let entry = ManifestEntry::from_scene(format!("human_{}_{slot:03}", family.slug()), master_seed, &scene);
                    experimental.push(ScheduledTrial {
                        index: 0,
                        practice: false,
                        bin: Some(*bin),
                        prompt_line: human_prompt_line(&entry),
                        entry,
                        scene,
                        fixation_ms: FIXATION_MS,
                        stimulus_ms: stim_ms,
                        feedback: false,
                    });
                    slot += 1;
                }
            }
        }
    }

    let mut practice = Vec::with_capacity(PRACTICE_TRIALS);
    let lo = bins.first().map_or(0, |b| b.lo);
    let hi = bins.last().map_or(0, |b| b.hi);
    for k in 0..PRACTICE_TRIALS {
        let mut rng = make_rng(sub_seed(master_seed ^ PRACTICE_SALT, k as u64));
        let condition = *rng.pick(&design.conditions);
        let mut found = None;
        for _ in 0..SLOT_ATTEMPTS {
            let n = rng.int_inclusive(lo, hi);
            let scene = generate_scene(&mut rng, &condition, n, None)?;
            if acceptable(&scene, None) {
                found = Some(scene);
                break;
            }
        }
        let scene = found.ok_or_else(|| SessionError::PoolTooSmall {
            slot: k,
            condition: condition.label(),
            bin: format!("{lo}-{hi}"),
            cell: Cell::ALL[0],
        })?;
        let entry = ManifestEntry::from_scene(format!("practice_{}_{k}", family.slug()), master_seed, &scene);
        practice.push(ScheduledTrial {
            index: 0,
            practice: true,
            bin: None,
            prompt_line: human_prompt_line(&entry),
            entry,
            scene,
            fixation_ms: FIXATION_MS,
            stimulus_ms: stim_ms,
            feedback: true,
        });
    }

    let mut order = make_rng(sub_seed(master_seed, participant_hash(participant_id)));
    order.shuffle(&mut experimental);
    let mut trials = practice;
    trials.extend(experimental);
    for (i, t) in trials.iter_mut().enumerate() {
        t.index = i;
    }
    Ok(SessionSchedule { participant_id: participant_id.to_string(), family, master_seed, trials })
}

/// What the browser needs to run one trial.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrialPayload {
    pub session_id: String,
    pub trial_index: usize,
    pub practice: bool,
    pub feedback: bool,
    pub image_url: String,
    pub fixation_ms: u32,
    pub stimulus_ms: u32,
    pub prompt_line: String,
    pub total_trials: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HumanResponse {
    pub session_id: String,
    pub trial_index: usize,
    pub key: ResponseKey,
    pub cell: Cell,
    pub correct: bool,
    /// Client-measured, from stimulus onset.
    pub rt_ms: f64,
    /// Server receipt time, ms since the Unix epoch.
    pub received_at_ms: u64,
}

/// Append-only session history; replaying it rebuilds the session.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "event", rename_all = "snake_case")]
pub enum SessionEvent {
    Created { session_id: String, family: Family, participant_id: String, master_seed: u64 },
    Served { trial_index: usize },
    Responded { response: HumanResponse },
}

#[derive(Debug, Clone, PartialEq)]
pub struct Session {
    pub id: String,
    pub schedule: SessionSchedule,
    served: usize,
    responses: Vec<Option<HumanResponse>>,
}

impl Session {
    pub fn new(id: &str, schedule: SessionSchedule) -> Self {
        let n = schedule.trials.len();
        Session { id: id.to_string(), schedule, served: 0, responses: vec![None; n] }
    }

    pub fn created_event(&self) -> SessionEvent {
        SessionEvent::Created {
            session_id: self.id.clone(),
            family: self.schedule.family,
            participant_id: self.schedule.participant_id.clone(),
            master_seed: self.schedule.master_seed,
        }
    }

    pub fn image_url(&self, index: usize) -> String {
        format!("/sessions/{}/trials/{index}/image.png", self.id)
    }

    fn payload_of(&self, index: usize) -> TrialPayload {
        let trial = &self.schedule.trials[index];
        TrialPayload {
            session_id: self.id.clone(),
            trial_index: trial.index,
            practice: trial.practice,
            feedback: trial.feedback,
            image_url: self.image_url(trial.index),
            fixation_ms: trial.fixation_ms,
            stimulus_ms: trial.stimulus_ms,
            prompt_line: trial.prompt_line.clone(),
            total_trials: self.schedule.trials.len(),
        }
    }

    /// Serves the next trial in schedule order; each trial is served once.
    pub fn next_trial(&mut self) -> Result<TrialPayload, SessionError> {
        if self.served >= self.schedule.trials.len() {
            return Err(SessionError::SessionComplete);
        }
        let payload = self.payload_of(self.served);
        self.served += 1;
        Ok(payload)
    }

    /// Payload of an already served trial, e.g. to resume after a reload.
    pub fn served_trial(&self, index: usize) -> Result<TrialPayload, SessionError> {
        if index >= self.served {
            return Err(SessionError::UnknownTrial(index));
        }
        Ok(self.payload_of(index))
    }

    pub fn served(&self) -> usize {
        self.served
    }

    pub fn is_complete(&self) -> bool {
        self.responses.iter().all(Option::is_some)
    }

    /// First served trial still waiting for a response.
    pub fn first_unanswered(&self) -> Option<usize> {
        self.responses[..self.served].iter().position(Option::is_none)
    }

    pub fn responses(&self) -> impl Iterator<Item = &HumanResponse> {
        self.responses.iter().flatten()
    }

    /// Stores a response to a served trial and scores it.
    pub fn record_response(
        &mut self,
        trial_index: usize,
        key: &str,
        rt_ms: f64,
        received_at_ms: u64,
    ) -> Result<HumanResponse, SessionError> {
        if trial_index >= self.served {
            return Err(SessionError::UnknownTrial(trial_index));
        }
        let key = ResponseKey::parse(key)?;
        if self.responses[trial_index].is_some() {
            return Err(SessionError::DuplicateResponse(trial_index));
        }
        let truth = self.schedule.trials[trial_index].entry.ground_truth_cell;
        let response = HumanResponse {
            session_id: self.id.clone(),
            trial_index,
            key,
            cell: key.cell(),
            correct: key.cell() == truth,
            rt_ms,
            received_at_ms,
        };
        self.responses[trial_index] = Some(response.clone());
        Ok(response)
    }

    /// Rebuilds a session from its event log.
    pub fn replay(events: &[SessionEvent]) -> Result<Session, SessionError> {
        let Some(SessionEvent::Created { session_id, family, participant_id, master_seed }) = events.first() else {
            return Err(SessionError::Log("log must start with a created event".into()));
        };
        let schedule = create_session(*family, participant_id, *master_seed)?;
        let mut session = Session::new(session_id, schedule);
        for ev in &events[1..] {
            match ev {
                SessionEvent::Created { .. } => return Err(SessionError::Log("duplicate created event".into())),
                SessionEvent::Served { .. } => {
                    session.next_trial()?;
                }
                SessionEvent::Responded { response } => {
                    let key = format!("{:?}", response.key);
                    session.record_response(response.trial_index, &key, response.rt_ms, response.received_at_ms)?;
                }
            }
        }
        Ok(session)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ParticipantSummary {
    pub session_id: String,
    pub participant_id: String,
    pub family: Family,
    pub experimental_answered: usize,
    pub mean_accuracy: Option<f64>,
    pub below_chance: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct HumanExport {
    pub csv: String,
    pub participants: Vec<ParticipantSummary>,
}

pub const EXPORT_HEADER: [&str; 15] = [
    "session_id",
    "participant_id",
    "family",
    "trial_index",
    "practice",
    "condition",
    "bin",
    "n_distractors",
    "truth_row",
    "truth_col",
    "key",
    "response_row",
    "response_col",
    "correct",
    "rt_ms",
];

/// Per-trial CSV plus per-participant accuracy over experimental trials;
/// participants below chance are flagged for replacement.
pub fn export_human_results(sessions: &[&Session]) -> HumanExport {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(EXPORT_HEADER).expect("in-memory csv");
    let mut participants = Vec::new();
    for s in sessions {
        let mut answered = 0usize;
        let mut correct = 0usize;
        for r in s.responses() {
            let t = &s.schedule.trials[r.trial_index];
            if !t.practice {
                answered += 1;
                correct += usize::from(r.correct);
            }
            w.write_record([
                s.id.clone(),
                s.schedule.participant_id.clone(),
                s.schedule.family.slug().to_string(),
                r.trial_index.to_string(),
                t.practice.to_string(),
                t.entry.task_condition.label(),
                t.bin.map(|b| b.label()).unwrap_or_default(),
                t.entry.n_distractors.to_string(),
                t.entry.ground_truth_cell.row.to_string(),
                t.entry.ground_truth_cell.col.to_string(),
                format!("{:?}", r.key),
                r.cell.row.to_string(),
                r.cell.col.to_string(),
                r.correct.to_string(),
                format!("{:.1}", r.rt_ms),
            ])
            .expect("in-memory csv");
        }
        let mean_accuracy = (answered > 0).then(|| correct as f64 / answered as f64);
        participants.push(ParticipantSummary {
            session_id: s.id.clone(),
            participant_id: s.schedule.participant_id.clone(),
            family: s.schedule.family,
            experimental_answered: answered,
            mean_accuracy,
            below_chance: mean_accuracy.is_some_and(|a| a < CHANCE_LEVEL),
        });
    }
    let csv = String::from_utf8(w.into_inner().expect("flush")).expect("utf-8 csv");
    HumanExport { csv, participants }
}
