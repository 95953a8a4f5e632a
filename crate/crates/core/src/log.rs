//! Episode logs.
//!
//! A log is an append-only list of records written as newline-delimited JSON:
//! one `start` record, one `iteration` record per colony iteration, one
//! `interaction` record per designer interaction and, when the iteration cap
//! ends a run, a final `halt` record.
//!
//! Two CSV views are derived from it:
//!
//! * [`EpisodeLog::to_csv`], columns [`EPISODE_CSV_COLUMNS`];
//! * [`EpisodeLog::fitness_curve_csv`], columns [`FITNESS_CURVE_COLUMNS`],
//!   one row per iteration with the best-so-far design and the weights in
//!   force during that iteration.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::aco::AcoParams;
use crate::fitness::{MetricVector, WeightVector};
use crate::problem::{ClassDocument, ProblemDocument};

pub const LOG_SCHEMA_VERSION: u32 = 1;

pub const EPISODE_CSV_COLUMNS: [&str; 16] = [
    "type",
    "runId",
    "iteration",
    "cbo",
    "nac",
    "atmr",
    "quality",
    "bestQuality",
    "rating",
    "wCbo",
    "wNac",
    "wAtmr",
    "frozen",
    "unfrozen",
    "archived",
    "halted",
];

pub const FITNESS_CURVE_COLUMNS: [&str; 8] =
    ["iteration", "bestCBO", "bestNAC", "bestATMR", "bestQuality", "wCbo", "wNac", "wAtmr"];

#[derive(Debug, Error)]
pub enum LogError {
    #[error("line {line}: {source}")]
    Parse { line: usize, source: serde_json::Error },
    #[error("csv: {0}")]
    Csv(#[from] csv::Error),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum LogRecord {
    Start(StartRecord),
    Iteration(IterationRecord),
    Interaction(InteractionRecord),
    Halt(HaltRecord),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct StartRecord {
    pub run_id: String,
    pub schema_version: u32,
    pub seed: u64,
    pub max_iterations: Option<usize>,
    pub params: AcoParams,
    pub weights: WeightVector,
    pub problem: ProblemDocument,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct ScoredMetrics {
    pub cbo: f64,
    pub nac: f64,
    pub atmr: f64,
    pub quality: f64,
}

impl ScoredMetrics {
    pub fn new(m: MetricVector, quality: f64) -> Self {
        ScoredMetrics { cbo: m.cbo, nac: m.nac, atmr: m.atmr, quality }
    }
}

/// Best values of one colony iteration.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct IterationRecord {
    pub run_id: String,
    pub iteration: usize,
    /// Iteration-best ant.
    pub iteration_best: ScoredMetrics,
    pub best_so_far: ScoredMetrics,
    pub weights: WeightVector,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "action", rename_all = "snake_case")]
pub enum LoggedAction {
    Freeze { class: usize, members: ClassDocument },
    Unfreeze { class: usize },
    Archive,
    Halt,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct InteractionRecord {
    pub run_id: String,
    pub iteration: usize,
    pub rating: Option<u8>,
    pub displayed: MetricVector,
    pub coefficients: [f64; 4],
    /// Weights after the surrogate update.
    pub weights: WeightVector,
    pub actions: Vec<LoggedAction>,
    /// Absent once the designer halts.
    pub next_interaction_at: Option<usize>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct HaltRecord {
    pub run_id: String,
    pub iteration: usize,
    pub reason: String,
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct EpisodeLog {
    records: Vec<LogRecord>,
}

#[derive(Serialize)]
struct EpisodeRow<'a> {
    kind: &'a str,
    run_id: &'a str,
    iteration: Option<usize>,
    cbo: Option<f64>,
    nac: Option<f64>,
    atmr: Option<f64>,
    quality: Option<f64>,
    best_quality: Option<f64>,
    rating: Option<u8>,
    w_cbo: Option<f64>,
    w_nac: Option<f64>,
    w_atmr: Option<f64>,
    frozen: String,
    unfrozen: String,
    archived: Option<bool>,
    halted: Option<bool>,
}

impl<'a> EpisodeRow<'a> {
    fn empty(kind: &'a str, run_id: &'a str) -> Self {
        EpisodeRow {
            kind,
            run_id,
            iteration: None,
            cbo: None,
            nac: None,
            atmr: None,
            quality: None,
            best_quality: None,
            rating: None,
            w_cbo: None,
            w_nac: None,
            w_atmr: None,
            frozen: String::new(),
            unfrozen: String::new(),
            archived: None,
            halted: None,
        }
    }
}

fn join_classes(classes: impl Iterator<Item = usize>) -> String {
    classes.map(|c| c.to_string()).collect::<Vec<_>>().join(";")
}

impl EpisodeLog {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn push(&mut self, record: LogRecord) {
        self.records.push(record);
    }

    pub fn records(&self) -> &[LogRecord] {
        &self.records
    }

    pub fn len(&self) -> usize {
        self.records.len()
    }

    pub fn is_empty(&self) -> bool {
        self.records.is_empty()
    }

    pub fn start(&self) -> Option<&StartRecord> {
        self.records.iter().find_map(|r| match r {
            LogRecord::Start(s) => Some(s),
            _ => None,
        })
    }

    pub fn interactions(&self) -> impl Iterator<Item = &InteractionRecord> {
        self.records.iter().filter_map(|r| match r {
            LogRecord::Interaction(i) => Some(i),
            _ => None,
        })
    }

    pub fn iterations(&self) -> impl Iterator<Item = &IterationRecord> {
        self.records.iter().filter_map(|r| match r {
            LogRecord::Iteration(i) => Some(i),
            _ => None,
        })
    }

    pub fn line(record: &LogRecord) -> String {
        serde_json::to_string(record).expect("log records always serialize")
    }

    pub fn to_ndjson(&self) -> String {
        let mut out = String::new();
        for record in &self.records {
            out.push_str(&Self::line(record));
            out.push('\n');
        }
        out
    }

    pub fn from_ndjson(text: &str) -> Result<Self, LogError> {
        let records = text
            .lines()
            .enumerate()
            .filter(|(_, l)| !l.trim().is_empty())
            .map(|(i, l)| serde_json::from_str(l).map_err(|source| LogError::Parse { line: i + 1, source }))
            .collect::<Result<_, _>>()?;
        Ok(EpisodeLog { records })
    }

    pub fn to_csv(&self) -> Result<String, LogError> {
        let mut writer = csv::WriterBuilder::new().has_headers(false).from_writer(Vec::new());
        writer.write_record(EPISODE_CSV_COLUMNS)?;
        for record in &self.records {
            let row = match record {
                LogRecord::Start(s) => EpisodeRow::empty("start", &s.run_id),
                LogRecord::Iteration(r) => {
                    let w = r.weights.as_array();
                    EpisodeRow {
                        iteration: Some(r.iteration),
                        cbo: Some(r.iteration_best.cbo),
                        nac: Some(r.iteration_best.nac),
                        atmr: Some(r.iteration_best.atmr),
                        quality: Some(r.iteration_best.quality),
                        best_quality: Some(r.best_so_far.quality),
                        w_cbo: Some(w[0]),
                        w_nac: Some(w[1]),
                        w_atmr: Some(w[2]),
                        ..EpisodeRow::empty("iteration", &r.run_id)
                    }
                }
                LogRecord::Interaction(r) => {
                    let w = r.weights.as_array();
                    let frozen = r.actions.iter().filter_map(|a| match a {
                        LoggedAction::Freeze { class, .. } => Some(*class),
                        _ => None,
                    });
                    let unfrozen = r.actions.iter().filter_map(|a| match a {
                        LoggedAction::Unfreeze { class } => Some(*class),
                        _ => None,
                    });
                    EpisodeRow {
                        iteration: Some(r.iteration),
                        cbo: Some(r.displayed.cbo),
                        nac: Some(r.displayed.nac),
                        atmr: Some(r.displayed.atmr),
                        rating: r.rating,
                        w_cbo: Some(w[0]),
                        w_nac: Some(w[1]),
                        w_atmr: Some(w[2]),
                        frozen: join_classes(frozen),
                        unfrozen: join_classes(unfrozen),
                        archived: Some(r.actions.contains(&LoggedAction::Archive)),
                        halted: Some(r.actions.contains(&LoggedAction::Halt)),
                        ..EpisodeRow::empty("interaction", &r.run_id)
                    }
                }
                LogRecord::Halt(h) => EpisodeRow {
                    iteration: Some(h.iteration),
                    halted: Some(true),
                    ..EpisodeRow::empty("halt", &h.run_id)
                },
            };
            writer.serialize(row)?;
        }
        Ok(String::from_utf8(writer.into_inner().map_err(|e| csv::Error::from(e.into_error()))?).expect("csv output is utf-8"))
    }

    pub fn fitness_curve_csv(&self) -> Result<String, LogError> {
        let mut writer = csv::WriterBuilder::new().has_headers(false).from_writer(Vec::new());
        writer.write_record(FITNESS_CURVE_COLUMNS)?;
        for r in self.iterations() {
            let w = r.weights.as_array();
            let b = &r.best_so_far;
            writer.serialize((r.iteration, b.cbo, b.nac, b.atmr, b.quality, w[0], w[1], w[2]))?;
        }
        Ok(String::from_utf8(writer.into_inner().map_err(|e| csv::Error::from(e.into_error()))?).expect("csv output is utf-8"))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sample() -> EpisodeLog {
        let mut log = EpisodeLog::new();
        let scored = ScoredMetrics { cbo: 0.5, nac: 1.25, atmr: 0.75, quality: 0.5 };
        log.push(LogRecord::Iteration(IterationRecord {
            run_id: "r".into(),
            iteration: 1,
            iteration_best: scored,
            best_so_far: scored,
            weights: WeightVector::INITIAL,
        }));
        log.push(LogRecord::Interaction(InteractionRecord {
            run_id: "r".into(),
            iteration: 1,
            rating: Some(40),
            displayed: MetricVector::new(0.5, 1.25, 0.75),
            coefficients: [0.0, 0.34, 0.33, 0.33],
            weights: WeightVector::INITIAL,
            actions: vec![
                LoggedAction::Freeze { class: 2, members: ClassDocument { attributes: vec!["a".into()], methods: vec![] } },
                LoggedAction::Unfreeze { class: 1 },
                LoggedAction::Archive,
            ],
            next_interaction_at: Some(9),
        }));
        log
    }

    #[test]
    fn ndjson_round_trip() {
        let log = sample();
        let text = log.to_ndjson();
        assert_eq!(text.lines().count(), 2);
        assert!(text.starts_with(r#"{"type":"iteration","runId":"r""#));
        assert_eq!(EpisodeLog::from_ndjson(&text).unwrap(), log);
        assert!(matches!(EpisodeLog::from_ndjson("{}\n"), Err(LogError::Parse { line: 1, .. })));
    }

    #[test]
    fn csv_views() {
        let log = sample();
        let csv = log.to_csv().unwrap();
        let mut lines = csv.lines();
        assert_eq!(lines.next().unwrap(), EPISODE_CSV_COLUMNS.join(","));
        assert_eq!(lines.next().unwrap(), "iteration,r,1,0.5,1.25,0.75,0.5,0.5,,0.34,0.33,0.33,,,,");
        assert_eq!(lines.next().unwrap(), "interaction,r,1,0.5,1.25,0.75,,,40,0.34,0.33,0.33,2,1,true,false");
        let curve = log.fitness_curve_csv().unwrap();
        assert_eq!(curve, "iteration,bestCBO,bestNAC,bestATMR,bestQuality,wCbo,wNac,wAtmr\n1,0.5,1.25,0.75,0.5,0.34,0.33,0.33\n");
    }
}
