//! In-process session service behind the HTTP API.
//!
//! Sessions live in the service; clients poll [`SessionService::get_snapshot`]
//! and act when `awaiting` is set. While an interaction is awaited, freeze,
//! unfreeze and archive requests are staged; a rating or a halt commits them
//! together and the session then runs on to its next interaction point.
//! Requests arriving while nothing is awaited are rejected without touching
//! the session.

use std::collections::HashMap;
use std::sync::atomic::{AtomicU64, Ordering};
use std::sync::{Arc, Mutex, RwLock};
use std::time::{SystemTime, UNIX_EPOCH};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::aco::AcoParams;
use crate::fitness::{self, CohesionTier, MetricVector, WeightVector};
use crate::log::{LogError, ScoredMetrics};
use crate::problem::{
    generate_problem, ClassDocument, DesignProblem, ProblemDocument, ProblemError, ProblemScale,
};
use crate::session::{DesignerAction, DesignerResponse, Session, SessionConfig, SessionError, SessionStatus};

pub const SNAPSHOT_SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Error)]
pub enum ServiceError {
    #[error("unknown session `{0}`")]
    UnknownSession(String),
    #[error("no interaction is awaited")]
    NotAwaiting,
    #[error(transparent)]
    Problem(#[from] ProblemError),
    #[error(transparent)]
    Session(#[from] SessionError),
    #[error(transparent)]
    Log(#[from] LogError),
    #[error("invalid parameters: {0}")]
    Params(String),
}

/// Optional overrides of [`AcoParams::default`].
#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase", deny_unknown_fields)]
pub struct ParamOverrides {
    pub colony_size: Option<usize>,
    pub alpha: Option<f64>,
    pub mu: Option<f64>,
    pub sigma: Option<f64>,
    pub t_min: Option<f64>,
    pub t_max: Option<f64>,
}

impl ParamOverrides {
    pub fn apply(&self, base: AcoParams) -> AcoParams {
        AcoParams {
            colony_size: self.colony_size.unwrap_or(base.colony_size),
            alpha: self.alpha.unwrap_or(base.alpha),
            mu: self.mu.unwrap_or(base.mu),
            sigma: self.sigma.unwrap_or(base.sigma),
            t_min: self.t_min.unwrap_or(base.t_min),
            t_max: self.t_max.unwrap_or(base.t_max),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub enum ProblemSource {
    Document(ProblemDocument),
    #[serde(rename_all = "camelCase")]
    Generate { attributes: usize, methods: usize, uses: usize, classes: usize, seed: u64 },
}

impl ProblemSource {
    pub fn load(&self) -> Result<DesignProblem, ProblemError> {
        match self {
            ProblemSource::Document(doc) => DesignProblem::from_document(doc.clone()),
            &ProblemSource::Generate { attributes, methods, uses, classes, seed } => {
                generate_problem(ProblemScale::new(attributes, methods, uses, classes), seed)
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct CreateSessionRequest {
    pub problem: ProblemSource,
    pub seed: u64,
    #[serde(default)]
    pub params: ParamOverrides,
    #[serde(default)]
    pub max_iterations: Option<usize>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub enum StatusPayload {
    Running,
    Paused,
    Halted,
}

impl From<SessionStatus> for StatusPayload {
    fn from(s: SessionStatus) -> Self {
        match s {
            SessionStatus::Running => StatusPayload::Running,
            SessionStatus::Paused => StatusPayload::Paused,
            SessionStatus::Halted => StatusPayload::Halted,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct SessionHandle {
    pub id: String,
    pub problem: String,
    pub status: StatusPayload,
    /// Seconds since the Unix epoch.
    pub created: u64,
}

/// One designer request.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "camelCase")]
pub enum InteractionRequest {
    Rating { value: i64 },
    /// Without `members` the whole class of the displayed candidate is frozen.
    Freeze { class: usize, members: Option<ClassDocument> },
    Unfreeze { class: usize },
    Archive,
    Halt,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct Ack {
    pub accepted: bool,
    /// Whether the request was staged rather than committed.
    pub staged: bool,
    pub iteration: usize,
    pub awaiting: bool,
    pub status: StatusPayload,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct ClassPayload {
    pub index: usize,
    pub attributes: Vec<String>,
    pub methods: Vec<String>,
    pub cohesion: f64,
    pub tier: CohesionTier,
    pub frozen: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct CouplePayload {
    pub from: usize,
    pub to: usize,
    pub strength: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct CandidatePayload {
    pub classes: Vec<ClassPayload>,
    /// Non-zero directed couplings only.
    pub couples: Vec<CouplePayload>,
    pub metrics: MetricVector,
    pub quality: f64,
    pub god_class: Option<usize>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct SnapshotPayload {
    pub schema_version: u32,
    pub session_id: String,
    pub problem: String,
    pub status: StatusPayload,
    pub iteration: usize,
    pub awaiting: bool,
    pub next_interaction_at: usize,
    pub weights: WeightVector,
    pub best_so_far: Option<ScoredMetrics>,
    pub candidate: Option<CandidatePayload>,
    pub staged: Vec<InteractionRequest>,
    pub interactions: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct ArchivePayload {
    pub iteration: usize,
    pub metrics: MetricVector,
    pub classes: Vec<ClassDocument>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub enum LogFormat {
    Ndjson,
    Csv,
}

struct ServedSession {
    handle: SessionHandle,
    session: Session,
    staged: Vec<(InteractionRequest, DesignerAction)>,
}

impl ServedSession {
    fn awaiting(&self) -> bool {
        self.session.status() != SessionStatus::Halted && self.session.pending().is_some()
    }

    fn ack(&self, staged: bool) -> Ack {
        Ack {
            accepted: true,
            staged,
            iteration: self.session.iteration(),
            awaiting: self.awaiting(),
            status: self.session.status().into(),
        }
    }

    fn response(&self, rating: Option<i64>, extra: Option<DesignerAction>) -> DesignerResponse {
        let mut actions: Vec<DesignerAction> = self.staged.iter().map(|(_, a)| a.clone()).collect();
        actions.extend(extra);
        DesignerResponse { rating, actions }
    }

    fn commit(&mut self, response: DesignerResponse) -> Result<(), ServiceError> {
        self.session.submit(response)?;
        self.staged.clear();
        if self.session.status() != SessionStatus::Halted {
            self.session.advance()?;
        }
        self.handle.status = self.session.status().into();
        Ok(())
    }

    fn snapshot(&self) -> SnapshotPayload {
        let session = &self.session;
        let problem = session.problem();
        let awaiting = self.awaiting();
        let candidate = session.pending().filter(|_| awaiting).map(|shown| {
            let solution = &shown.candidate;
            let classes = solution
                .classes()
                .iter()
                .enumerate()
                .map(|(index, members)| {
                    let doc = ClassDocument::from_members(problem, members);
                    let cohesion = fitness::class_cohesion(problem, solution, index).expect("index in range");
                    ClassPayload {
                        index,
                        attributes: doc.attributes,
                        methods: doc.methods,
                        cohesion,
                        tier: CohesionTier::of(cohesion),
                        frozen: session.frozen().is_frozen(index),
                    }
                })
                .collect();
            let matrix = fitness::coupling_matrix(problem, solution);
            let couples = matrix
                .iter()
                .enumerate()
                .flat_map(|(from, row)| {
                    row.iter()
                        .enumerate()
                        .filter(move |&(to, &s)| to != from && s > 0)
                        .map(move |(to, &strength)| CouplePayload { from, to, strength })
                })
                .collect();
            CandidatePayload {
                classes,
                couples,
                metrics: shown.metrics,
                quality: shown.quality,
                god_class: fitness::detect_god_class(problem, solution),
            }
        });
        SnapshotPayload {
            schema_version: SNAPSHOT_SCHEMA_VERSION,
            session_id: self.handle.id.clone(),
            problem: problem.name().to_string(),
            status: session.status().into(),
            iteration: session.iteration(),
            awaiting,
            next_interaction_at: session.next_interaction_at(),
            weights: session.weights(),
            best_so_far: session.colony().best_so_far().map(|b| {
                ScoredMetrics::new(b.metrics, session.colony().best_quality(&session.weights()))
            }),
            candidate,
            staged: self.staged.iter().map(|(r, _)| r.clone()).collect(),
            interactions: session.interactions(),
        }
    }
}

/// Holds many independent sessions; calls on one session are serialized.
#[derive(Default)]
pub struct SessionService {
    sessions: RwLock<HashMap<String, Arc<Mutex<ServedSession>>>>,
    next_id: AtomicU64,
}

impl SessionService {
    pub fn new() -> Self {
        Self::default()
    }

    fn get(&self, id: &str) -> Result<Arc<Mutex<ServedSession>>, ServiceError> {
        self.sessions
            .read()
            .expect("session table poisoned")
            .get(id)
            .cloned()
            .ok_or_else(|| ServiceError::UnknownSession(id.to_string()))
    }

    fn with<T>(&self, id: &str, f: impl FnOnce(&mut ServedSession) -> Result<T, ServiceError>) -> Result<T, ServiceError> {
        let entry = self.get(id)?;
        let mut served = entry.lock().expect("session poisoned");
        f(&mut served)
    }

    pub fn session_ids(&self) -> Vec<String> {
        let mut ids: Vec<String> = self.sessions.read().expect("session table poisoned").keys().cloned().collect();
        ids.sort();
        ids
    }

    /// Creates a session at iteration 0; nothing runs until [`Self::start`].
    pub fn create_session(&self, request: CreateSessionRequest) -> Result<SessionHandle, ServiceError> {
        let problem = Arc::new(request.problem.load()?);
        let params = request.params.apply(AcoParams::default());
        params.validate().map_err(|e| ServiceError::Params(e.to_string()))?;
        let id = format!("s{}", self.next_id.fetch_add(1, Ordering::Relaxed) + 1);
        let config = SessionConfig { params, seed: request.seed, max_iterations: request.max_iterations, parallel: false };
        let session = Session::new(problem.clone(), config, Some(id.clone()))?;
        let handle = SessionHandle {
            id: id.clone(),
            problem: problem.name().to_string(),
            status: session.status().into(),
            created: SystemTime::now().duration_since(UNIX_EPOCH).map_or(0, |d| d.as_secs()),
        };
        let served = ServedSession { handle: handle.clone(), session, staged: Vec::new() };
        self.sessions.write().expect("session table poisoned").insert(id, Arc::new(Mutex::new(served)));
        Ok(handle)
    }

    pub fn handle(&self, id: &str) -> Result<SessionHandle, ServiceError> {
        self.with(id, |s| Ok(s.handle.clone()))
    }

    /// Runs the session to its next interaction point if it is not already
    /// waiting on one.
    pub fn start(&self, id: &str) -> Result<SnapshotPayload, ServiceError> {
        self.with(id, |s| {
            if s.session.status() != SessionStatus::Halted && s.session.pending().is_none() {
                s.session.advance()?;
                s.handle.status = s.session.status().into();
            }
            Ok(s.snapshot())
        })
    }

    pub fn get_snapshot(&self, id: &str) -> Result<SnapshotPayload, ServiceError> {
        self.with(id, |s| Ok(s.snapshot()))
    }

    pub fn submit_interaction(&self, id: &str, request: InteractionRequest) -> Result<Ack, ServiceError> {
        self.with(id, |s| {
            if !s.awaiting() {
                return Err(ServiceError::NotAwaiting);
            }
            let problem = s.session.problem().clone();
            match &request {
                InteractionRequest::Rating { value } => {
                    let response = s.response(Some(*value), None);
                    s.commit(response)?;
                    Ok(s.ack(false))
                }
                InteractionRequest::Halt => {
                    let response = s.response(None, Some(DesignerAction::Halt));
                    s.commit(response)?;
                    Ok(s.ack(false))
                }
                InteractionRequest::Freeze { class, members } => {
                    let shown = s.session.pending().expect("awaiting");
                    let members = match members {
                        Some(doc) => doc.to_members(&problem)?,
                        None => shown
                            .candidate
                            .classes()
                            .get(*class)
                            .cloned()
                            .ok_or(SessionError::ClassIndex { index: *class, count: problem.class_count() })?,
                    };
                    let action = DesignerAction::Freeze { class: *class, members };
                    s.session.validate_response(&s.response(None, Some(action.clone())))?;
                    s.staged.push((request.clone(), action));
                    Ok(s.ack(true))
                }
                InteractionRequest::Unfreeze { class } => {
                    let action = DesignerAction::Unfreeze { class: *class };
                    s.session.validate_response(&s.response(None, Some(action.clone())))?;
                    s.staged.push((request.clone(), action));
                    Ok(s.ack(true))
                }
                InteractionRequest::Archive => {
                    s.staged.push((request.clone(), DesignerAction::Archive));
                    Ok(s.ack(true))
                }
            }
        })
    }

    pub fn list_archive(&self, id: &str) -> Result<Vec<ArchivePayload>, ServiceError> {
        self.with(id, |s| {
            let problem = s.session.problem().clone();
            Ok(s.session
                .archive_list()
                .iter()
                .map(|e| ArchivePayload {
                    iteration: e.iteration,
                    metrics: e.metrics,
                    classes: e.solution.to_document(&problem).classes,
                })
                .collect())
        })
    }

    pub fn export_log(&self, id: &str, format: LogFormat) -> Result<String, ServiceError> {
        self.with(id, |s| {
            let log = s.session.log();
            Ok(match format {
                LogFormat::Ndjson => log.to_ndjson(),
                LogFormat::Csv => log.to_csv()?,
            })
        })
    }

    /// Copy of the live session state.
    pub fn session_state(&self, id: &str) -> Result<Session, ServiceError> {
        self.with(id, |s| Ok(s.session.clone()))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::session::next_interval;

    fn service_with_session() -> (SessionService, String) {
        let service = SessionService::new();
        let handle = service
            .create_session(CreateSessionRequest {
                problem: ProblemSource::Generate { attributes: 16, methods: 15, uses: 39, classes: 5, seed: 1 },
                seed: 42,
                params: ParamOverrides { colony_size: Some(20), ..Default::default() },
                max_iterations: None,
            })
            .unwrap();
        (service, handle.id)
    }

    #[test]
    fn create_then_snapshot() {
        let (service, id) = service_with_session();
        let snap = service.get_snapshot(&id).unwrap();
        assert_eq!(snap.iteration, 0);
        assert!(!snap.awaiting);
        assert!(snap.candidate.is_none());
        assert_eq!(snap.schema_version, SNAPSHOT_SCHEMA_VERSION);
    }

    #[test]
    fn rating_when_not_awaited_is_rejected() {
        let (service, id) = service_with_session();
        let before = service.get_snapshot(&id).unwrap();
        assert!(matches!(
            service.submit_interaction(&id, InteractionRequest::Rating { value: 50 }),
            Err(ServiceError::NotAwaiting)
        ));
        assert_eq!(service.get_snapshot(&id).unwrap(), before);
    }

    #[test]
    fn rating_advances_by_interval() {
        let (service, id) = service_with_session();
        let first = service.start(&id).unwrap();
        assert!(first.awaiting);
        assert_eq!(first.iteration, 15);
        let ack = service.submit_interaction(&id, InteractionRequest::Rating { value: 50 }).unwrap();
        assert!(!ack.staged);
        let state = service.session_state(&id).unwrap();
        let expected = first.iteration + next_interval(state.colony().best_quality(&state.weights()));
        let next = service.get_snapshot(&id).unwrap();
        assert!(next.awaiting);
        assert_eq!(next.iteration, expected);
    }

    #[test]
    fn unknown_session() {
        let service = SessionService::new();
        assert!(matches!(service.get_snapshot("nope"), Err(ServiceError::UnknownSession(_))));
    }

    #[test]
    fn staged_actions_commit_with_rating() {
        let (service, id) = service_with_session();
        service.start(&id).unwrap();
        let ack = service.submit_interaction(&id, InteractionRequest::Freeze { class: 1, members: None });
        // an empty class cannot be frozen
        let snap = service.get_snapshot(&id).unwrap();
        let class1_empty = snap.candidate.as_ref().unwrap().classes[1].attributes.is_empty()
            && snap.candidate.as_ref().unwrap().classes[1].methods.is_empty();
        assert_eq!(ack.is_err(), class1_empty);
        service.submit_interaction(&id, InteractionRequest::Archive).unwrap();
        let staged = service.get_snapshot(&id).unwrap().staged.len();
        assert!(staged >= 1);
        service.submit_interaction(&id, InteractionRequest::Rating { value: 70 }).unwrap();
        assert_eq!(service.list_archive(&id).unwrap().len(), 1);
        assert!(service.get_snapshot(&id).unwrap().staged.is_empty());
        service.submit_interaction(&id, InteractionRequest::Halt).unwrap();
        let snap = service.get_snapshot(&id).unwrap();
        assert_eq!(snap.status, StatusPayload::Halted);
        assert!(!snap.awaiting);
    }

    #[test]
    fn bad_params_rejected() {
        let service = SessionService::new();
        let err = service.create_session(CreateSessionRequest {
            problem: ProblemSource::Generate { attributes: 4, methods: 4, uses: 6, classes: 2, seed: 1 },
            seed: 1,
            params: ParamOverrides { sigma: Some(2.0), ..Default::default() },
            max_iterations: None,
        });
        assert!(matches!(err, Err(ServiceError::Params(_))));
    }
}
