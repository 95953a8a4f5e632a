//! Interactive episodes.
//!
//! A [`Session`] alternates between bursts of colony iterations and designer
//! interactions. At each interaction point a non-dominated member of the
//! latest colony is presented; the designer rates it (1 to 100) and may
//! freeze, unfreeze or archive classes, or halt. Ratings feed the
//! [`SurrogateModel`], whose coefficients set the weights used by the colony
//! until the next interaction. The gap between interactions shrinks as the
//! best design improves (see [`next_interval`]).

use std::collections::BTreeSet;
use std::sync::Arc;

use rand::{Rng, RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};
use thiserror::Error;

use crate::aco::{self, AcoError, AcoParams, BestSoFar, Colony, FreezeSet};
use crate::fitness::{combined_score, MetricVector, WeightVector};
use crate::log::{
    EpisodeLog, HaltRecord, InteractionRecord, IterationRecord, LogRecord, LoggedAction, ScoredMetrics,
    StartRecord, LOG_SCHEMA_VERSION,
};
use crate::problem::{ClassDocument, DesignProblem, DesignSolution, Element, ProblemError};
use crate::surrogate::{validate_rating, SurrogateError, SurrogateModel};

pub const MIN_INTERVAL: usize = 3;
pub const MAX_INTERVAL: usize = 15;
/// Iteration cap for headless runs.
pub const DEFAULT_MAX_ITERATIONS: usize = 1000;

/// Iterations until the next interaction: long while the best design is poor,
/// short once it is good.
pub fn next_interval(best_quality: f64) -> usize {
    let q = if best_quality.is_nan() { 0.0 } else { best_quality.clamp(0.0, 1.0) };
    let span = (MAX_INTERVAL - MIN_INTERVAL) as f64;
    (MIN_INTERVAL + (span * (1.0 - q)).round() as usize).clamp(MIN_INTERVAL, MAX_INTERVAL)
}

#[derive(Debug, Error)]
#[error("designer failed: {0}")]
pub struct DesignerError(pub String);

#[derive(Debug, Error)]
pub enum SessionError {
    #[error(transparent)]
    Aco(#[from] AcoError),
    #[error(transparent)]
    Rating(#[from] SurrogateError),
    #[error(transparent)]
    Designer(#[from] DesignerError),
    #[error("session is halted")]
    Halted,
    #[error("no interaction is awaited")]
    NotAwaiting,
    #[error("class index {index} out of range for {count} classes")]
    ClassIndex { index: usize, count: usize },
    #[error("{element} is not in class {class} of the displayed candidate")]
    NotColocated { element: Element, class: usize },
    #[error("class {0} is not frozen")]
    NotFrozen(usize),
    #[error("cannot freeze class {0} with no members")]
    EmptyFreeze(usize),
    #[error("replay: {0}")]
    Replay(String),
    #[error(transparent)]
    Problem(#[from] ProblemError),
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SessionConfig {
    pub params: AcoParams,
    pub seed: u64,
    /// Halts the session once this many iterations have run.
    pub max_iterations: Option<usize>,
    pub parallel: bool,
}

impl SessionConfig {
    /// Capped at [`DEFAULT_MAX_ITERATIONS`].
    pub fn headless(seed: u64) -> Self {
        SessionConfig {
            params: AcoParams::default(),
            seed,
            max_iterations: Some(DEFAULT_MAX_ITERATIONS),
            parallel: false,
        }
    }

    /// No cap; only the designer stops the session.
    pub fn interactive(seed: u64) -> Self {
        SessionConfig { max_iterations: None, ..Self::headless(seed) }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SessionStatus {
    Running,
    /// The designer failed; the pending candidate is presented again on the
    /// next step.
    Paused,
    Halted,
}

/// What the designer sees at an interaction point.
#[derive(Debug, Clone, PartialEq)]
pub struct Presentation {
    pub iteration: usize,
    pub candidate: DesignSolution,
    pub metrics: MetricVector,
    pub quality: f64,
    pub weights: WeightVector,
    pub frozen: FreezeSet,
    pub best_so_far: BestSoFar,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum DesignerAction {
    /// Freezes `class` to `members`, which must all sit in that class of the
    /// displayed candidate.
    Freeze { class: usize, members: Vec<Element> },
    Unfreeze { class: usize },
    /// Stores the displayed candidate.
    Archive,
    Halt,
}

#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct DesignerResponse {
    /// `None` only makes sense together with [`DesignerAction::Halt`].
    pub rating: Option<i64>,
    pub actions: Vec<DesignerAction>,
}

impl DesignerResponse {
    pub fn rating(rating: i64) -> Self {
        DesignerResponse { rating: Some(rating), actions: Vec::new() }
    }

    pub fn with(mut self, action: DesignerAction) -> Self {
        self.actions.push(action);
        self
    }
}

pub trait Designer {
    fn respond(&mut self, presentation: &Presentation) -> Result<DesignerResponse, DesignerError>;
}

impl<F> Designer for F
where
    F: FnMut(&Presentation) -> Result<DesignerResponse, DesignerError>,
{
    fn respond(&mut self, presentation: &Presentation) -> Result<DesignerResponse, DesignerError> {
        self(presentation)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Persona {
    pub weights: WeightVector,
    /// Standard deviation of the Gaussian noise added to ratings.
    pub noise: f64,
}

impl Persona {
    pub fn new(weights: WeightVector, noise: f64) -> Self {
        Persona { weights, noise }
    }
}

/// `round(100 · quality + noise)` clamped to `1..=100`.
pub fn simulated_rating<R: Rng + ?Sized>(metrics: &MetricVector, persona: &Persona, rng: &mut R) -> u8 {
    let mut value = 100.0 * combined_score(metrics, &persona.weights);
    if persona.noise > 0.0 {
        let normal = Normal::new(0.0, persona.noise).expect("noise is positive and finite");
        value += normal.sample(rng);
    }
    value.round().clamp(1.0, 100.0) as u8
}

/// A designer that rates with a fixed persona and optionally halts after a
/// number of interactions.
#[derive(Debug, Clone)]
pub struct SimulatedDesigner {
    persona: Persona,
    rng: ChaCha8Rng,
    halt_after: Option<usize>,
    given: usize,
}

impl SimulatedDesigner {
    pub fn new(persona: Persona, seed: u64) -> Self {
        SimulatedDesigner { persona, rng: ChaCha8Rng::seed_from_u64(seed), halt_after: None, given: 0 }
    }

    pub fn halt_after(mut self, interactions: usize) -> Self {
        self.halt_after = Some(interactions);
        self
    }

    pub fn interactions(&self) -> usize {
        self.given
    }
}

impl Designer for SimulatedDesigner {
    fn respond(&mut self, presentation: &Presentation) -> Result<DesignerResponse, DesignerError> {
        let rating = simulated_rating(&presentation.metrics, &self.persona, &mut self.rng);
        self.given += 1;
        let mut response = DesignerResponse::rating(rating as i64);
        if self.halt_after.is_some_and(|n| self.given >= n) {
            response.actions.push(DesignerAction::Halt);
        }
        Ok(response)
    }
}

/// Plays back a fixed list of responses, then fails.
#[derive(Debug, Clone)]
pub struct ScriptedDesigner {
    responses: std::collections::VecDeque<DesignerResponse>,
}

impl ScriptedDesigner {
    pub fn new(responses: impl IntoIterator<Item = DesignerResponse>) -> Self {
        ScriptedDesigner { responses: responses.into_iter().collect() }
    }

    pub fn remaining(&self) -> usize {
        self.responses.len()
    }
}

impl Designer for ScriptedDesigner {
    fn respond(&mut self, _: &Presentation) -> Result<DesignerResponse, DesignerError> {
        self.responses.pop_front().ok_or_else(|| DesignerError("script exhausted".into()))
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ArchiveEntry {
    pub solution: DesignSolution,
    pub metrics: MetricVector,
    pub iteration: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum StepOutcome {
    Interacted { iteration: usize },
    Halted,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Session {
    run_id: String,
    problem: Arc<DesignProblem>,
    config: SessionConfig,
    colony: Colony,
    surrogate: SurrogateModel,
    weights: WeightVector,
    frozen: FreezeSet,
    archive: Vec<ArchiveEntry>,
    next_interaction_at: usize,
    status: SessionStatus,
    display_rng: ChaCha8Rng,
    pending: Option<Presentation>,
    interactions: usize,
    log: EpisodeLog,
}

impl Session {
    /// Run id defaults to `<problem name>-<seed in hex>`.
    pub fn new(
        problem: Arc<DesignProblem>,
        config: SessionConfig,
        run_id: Option<String>,
    ) -> Result<Self, SessionError> {
        config.params.validate()?;
        let run_id = run_id.unwrap_or_else(|| format!("{}-{:016x}", problem.name(), config.seed));
        let mut master = ChaCha8Rng::seed_from_u64(config.seed);
        let colony = Colony::new(problem.clone(), config.params, master.next_u64())?
            .with_parallel(config.parallel);
        let display_rng = ChaCha8Rng::seed_from_u64(master.next_u64());
        let weights = WeightVector::INITIAL;
        let mut log = EpisodeLog::new();
        log.push(LogRecord::Start(StartRecord {
            run_id: run_id.clone(),
            schema_version: LOG_SCHEMA_VERSION,
            seed: config.seed,
            max_iterations: config.max_iterations,
            params: config.params,
            weights,
            problem: problem.to_document(),
        }));
        Ok(Session {
            run_id,
            problem,
            config,
            colony,
            surrogate: SurrogateModel::new(),
            weights,
            frozen: FreezeSet::new(),
            archive: Vec::new(),
            next_interaction_at: next_interval(0.0),
            status: SessionStatus::Running,
            display_rng,
            pending: None,
            interactions: 0,
            log,
        })
    }

    pub fn run_id(&self) -> &str {
        &self.run_id
    }

    pub fn problem(&self) -> &Arc<DesignProblem> {
        &self.problem
    }

    pub fn config(&self) -> &SessionConfig {
        &self.config
    }

    pub fn colony(&self) -> &Colony {
        &self.colony
    }

    pub fn iteration(&self) -> usize {
        self.colony.iteration()
    }

    pub fn surrogate(&self) -> &SurrogateModel {
        &self.surrogate
    }

    pub fn weights(&self) -> WeightVector {
        self.weights
    }

    pub fn frozen(&self) -> &FreezeSet {
        &self.frozen
    }

    pub fn archive_list(&self) -> &[ArchiveEntry] {
        &self.archive
    }

    pub fn next_interaction_at(&self) -> usize {
        self.next_interaction_at
    }

    pub fn status(&self) -> SessionStatus {
        self.status
    }

    pub fn pending(&self) -> Option<&Presentation> {
        self.pending.as_ref()
    }

    pub fn interactions(&self) -> usize {
        self.interactions
    }

    pub fn log(&self) -> &EpisodeLog {
        &self.log
    }

    /// Runs iterations up to the next interaction point and returns the
    /// candidate to present, or `None` if the iteration cap halted the
    /// session. An already pending candidate is returned as is.
    pub fn advance(&mut self) -> Result<Option<&Presentation>, SessionError> {
        if self.status == SessionStatus::Halted {
            return Err(SessionError::Halted);
        }
        self.status = SessionStatus::Running;
        if self.pending.is_some() {
            return Ok(self.pending.as_ref());
        }
        let mut last = None;
        while self.colony.iteration() < self.next_interaction_at {
            if self.config.max_iterations.is_some_and(|cap| self.colony.iteration() >= cap) {
                self.status = SessionStatus::Halted;
                self.log.push(LogRecord::Halt(HaltRecord {
                    run_id: self.run_id.clone(),
                    iteration: self.colony.iteration(),
                    reason: "iterationCap".into(),
                }));
                return Ok(None);
            }
            let snapshot = self.colony.run_iteration(&self.weights, &self.frozen)?;
            let best = snapshot.best();
            self.log.push(LogRecord::Iteration(IterationRecord {
                run_id: self.run_id.clone(),
                iteration: snapshot.iteration,
                iteration_best: ScoredMetrics::new(best.metrics, best.quality),
                best_so_far: ScoredMetrics::new(snapshot.best_so_far.metrics, snapshot.best_so_far.quality),
                weights: self.weights,
            }));
            last = Some(snapshot);
        }
        let snapshot = last.expect("next interaction lies ahead of the colony");
        let shown = aco::select_display_candidate(&snapshot, &mut self.display_rng);
        self.pending = Some(Presentation {
            iteration: snapshot.iteration,
            candidate: shown.path.solution.clone(),
            metrics: shown.metrics,
            quality: shown.quality,
            weights: self.weights,
            frozen: self.frozen.clone(),
            best_so_far: snapshot.best_so_far.clone(),
        });
        Ok(self.pending.as_ref())
    }

    /// Checks a response against the pending candidate without applying it.
    pub fn validate_response(&self, response: &DesignerResponse) -> Result<FreezeSet, SessionError> {
        let pending = self.pending.as_ref().ok_or(SessionError::NotAwaiting)?;
        if let Some(rating) = response.rating {
            validate_rating(rating)?;
        }
        let count = self.problem.class_count();
        let mut frozen = self.frozen.clone();
        for action in &response.actions {
            match action {
                DesignerAction::Freeze { class, members } => {
                    if *class >= count {
                        return Err(SessionError::ClassIndex { index: *class, count });
                    }
                    if members.is_empty() {
                        return Err(SessionError::EmptyFreeze(*class));
                    }
                    let shown: BTreeSet<Element> = pending.candidate.classes()[*class].iter().copied().collect();
                    if let Some(&element) = members.iter().find(|e| !shown.contains(e)) {
                        return Err(SessionError::NotColocated { element, class: *class });
                    }
                    frozen.freeze(*class, members.iter().copied())?;
                }
                DesignerAction::Unfreeze { class } => {
                    if frozen.unfreeze(*class).is_none() {
                        return Err(SessionError::NotFrozen(*class));
                    }
                }
                DesignerAction::Archive | DesignerAction::Halt => {}
            }
        }
        Ok(frozen)
    }

    /// Applies the designer's response to the pending candidate.
    pub fn submit(&mut self, response: DesignerResponse) -> Result<(), SessionError> {
        if self.status == SessionStatus::Halted {
            return Err(SessionError::Halted);
        }
        let frozen = self.validate_response(&response)?;
        let shown = self.pending.take().expect("validated above");

        if let Some(rating) = response.rating {
            self.surrogate.record_evaluation(shown.metrics, rating)?;
            self.weights = self.surrogate.weights(self.weights);
        }
        self.frozen = frozen;
        let mut logged = Vec::with_capacity(response.actions.len());
        let mut halt = false;
        for action in &response.actions {
            logged.push(match action {
                DesignerAction::Freeze { class, members } => LoggedAction::Freeze {
                    class: *class,
                    members: ClassDocument::from_members(&self.problem, members),
                },
                DesignerAction::Unfreeze { class } => LoggedAction::Unfreeze { class: *class },
                DesignerAction::Archive => {
                    self.archive.push(ArchiveEntry {
                        solution: shown.candidate.clone(),
                        metrics: shown.metrics,
                        iteration: shown.iteration,
                    });
                    LoggedAction::Archive
                }
                DesignerAction::Halt => {
                    halt = true;
                    LoggedAction::Halt
                }
            });
        }
        self.interactions += 1;
        let next = if halt {
            self.status = SessionStatus::Halted;
            None
        } else {
            self.status = SessionStatus::Running;
            self.next_interaction_at =
                self.colony.iteration() + next_interval(self.colony.best_quality(&self.weights));
            Some(self.next_interaction_at)
        };
        self.log.push(LogRecord::Interaction(InteractionRecord {
            run_id: self.run_id.clone(),
            iteration: shown.iteration,
            rating: response.rating.map(|r| r as u8),
            displayed: shown.metrics,
            coefficients: self.surrogate.coefficients(),
            weights: self.weights,
            actions: logged,
            next_interaction_at: next,
        }));
        Ok(())
    }

    /// One interaction cycle: iterate, present, apply the designer's answer.
    /// A failing designer pauses the session and leaves its state as it was.
    pub fn step(&mut self, designer: &mut dyn Designer) -> Result<StepOutcome, SessionError> {
        let presentation = match self.advance()? {
            Some(p) => p.clone(),
            None => return Ok(StepOutcome::Halted),
        };
        let outcome = designer
            .respond(&presentation)
            .map_err(SessionError::from)
            .and_then(|response| self.submit(response));
        match outcome {
            Ok(()) if self.status == SessionStatus::Halted => Ok(StepOutcome::Halted),
            Ok(()) => Ok(StepOutcome::Interacted { iteration: presentation.iteration }),
            Err(e) => {
                self.status = SessionStatus::Paused;
                Err(e)
            }
        }
    }

    /// Steps until the session halts.
    pub fn run(&mut self, designer: &mut dyn Designer) -> Result<(), SessionError> {
        while self.step(designer)? != StepOutcome::Halted {}
        Ok(())
    }

    /// Rebuilds a session from its log by re-running it with the recorded
    /// seed and interactions.
    pub fn replay(log: &EpisodeLog) -> Result<Session, SessionError> {
        let start = log.start().ok_or_else(|| SessionError::Replay("log has no start record".into()))?;
        let problem = Arc::new(DesignProblem::from_document(start.problem.clone())?);
        let config = SessionConfig {
            params: start.params,
            seed: start.seed,
            max_iterations: start.max_iterations,
            parallel: false,
        };
        let mut session = Session::new(problem.clone(), config, Some(start.run_id.clone()))?;
        let responses = log
            .interactions()
            .map(|r| response_from_record(&problem, r))
            .collect::<Result<Vec<_>, _>>()?;
        let mut script = ScriptedDesigner::new(responses);
        while script.remaining() > 0 {
            if session.step(&mut script)? == StepOutcome::Halted {
                break;
            }
        }
        let last_logged = log.iterations().map(|r| r.iteration).max().unwrap_or(0);
        if session.status == SessionStatus::Running && last_logged > session.iteration() {
            session.advance()?;
        }
        if session.log != *log {
            return Err(SessionError::Replay("replayed log diverges from the recording".into()));
        }
        Ok(session)
    }
}

fn response_from_record(problem: &DesignProblem, record: &InteractionRecord) -> Result<DesignerResponse, SessionError> {
    let actions = record
        .actions
        .iter()
        .map(|a| {
            Ok(match a {
                LoggedAction::Freeze { class, members } => {
                    DesignerAction::Freeze { class: *class, members: members.to_members(problem)? }
                }
                LoggedAction::Unfreeze { class } => DesignerAction::Unfreeze { class: *class },
                LoggedAction::Archive => DesignerAction::Archive,
                LoggedAction::Halt => DesignerAction::Halt,
            })
        })
        .collect::<Result<Vec<_>, SessionError>>()?;
    Ok(DesignerResponse { rating: record.rating.map(i64::from), actions })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::problem::{generate_problem, ProblemScale};

    fn problem() -> Arc<DesignProblem> {
        Arc::new(generate_problem(ProblemScale::CBS, 21).unwrap())
    }

    fn small_config(seed: u64) -> SessionConfig {
        SessionConfig {
            params: AcoParams { colony_size: 20, ..AcoParams::default() },
            ..SessionConfig::headless(seed)
        }
    }

    #[test]
    fn interval_cases() {
        assert_eq!(next_interval(0.0), 15);
        assert_eq!(next_interval(1.0), 3);
        assert_eq!(next_interval(0.5), 9);
        assert_eq!(next_interval(-1.0), 15);
        assert_eq!(next_interval(f64::NAN), 15);
        let mut last = usize::MAX;
        for k in 0..=1000 {
            let i = next_interval(k as f64 / 1000.0);
            assert!((MIN_INTERVAL..=MAX_INTERVAL).contains(&i));
            assert!(i <= last);
            last = i;
        }
    }

    #[test]
    fn simulated_rating_cases() {
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        let equal = Persona::new(WeightVector::EQUAL, 0.0);
        assert_eq!(simulated_rating(&MetricVector::default(), &equal, &mut rng), 100);
        let cbo_only = Persona::new(WeightVector::new(1.0, 0.0, 0.0).unwrap(), 0.0);
        assert_eq!(simulated_rating(&MetricVector::new(1.0, 3.0, 2.0), &cbo_only, &mut rng), 1);
        assert_eq!(simulated_rating(&MetricVector::new(0.3, 3.0, 2.0), &cbo_only, &mut rng), 70);
        let noisy = Persona::new(WeightVector::EQUAL, 30.0);
        for _ in 0..200 {
            let r = simulated_rating(&MetricVector::new(0.5, 1.0, 1.0), &noisy, &mut rng);
            assert!((1..=100).contains(&r));
        }
    }

    #[test]
    fn immediate_halt() {
        let mut s = Session::new(problem(), small_config(1), None).unwrap();
        let mut halt = |_: &Presentation| Ok(DesignerResponse { rating: None, actions: vec![DesignerAction::Halt] });
        assert_eq!(s.step(&mut halt).unwrap(), StepOutcome::Halted);
        assert_eq!(s.status(), SessionStatus::Halted);
        assert_eq!(s.log().interactions().count(), 1);
        assert!(s.iteration() <= MAX_INTERVAL);
        assert!(matches!(s.advance(), Err(SessionError::Halted)));
    }

    #[test]
    fn designer_failure_pauses_without_losing_state() {
        let mut s = Session::new(problem(), small_config(2), None).unwrap();
        let mut broken = |_: &Presentation| Err(DesignerError("offline".into()));
        assert!(matches!(s.step(&mut broken), Err(SessionError::Designer(_))));
        assert_eq!(s.status(), SessionStatus::Paused);
        let before = s.clone();
        let shown = s.pending().unwrap().clone();
        let mut ok = |p: &Presentation| {
            assert_eq!(p, &shown);
            Ok(DesignerResponse::rating(50))
        };
        s.step(&mut ok).unwrap();
        assert_eq!(s.iteration(), before.iteration());
        assert_eq!(s.status(), SessionStatus::Running);

        // an invalid rating is rejected and also leaves the state intact
        let mut bad = |_: &Presentation| Ok(DesignerResponse::rating(0));
        assert!(matches!(s.step(&mut bad), Err(SessionError::Rating(_))));
        assert_eq!(s.status(), SessionStatus::Paused);
        assert!(s.pending().is_some());
    }

    #[test]
    fn iteration_cap_halts() {
        let config = SessionConfig { max_iterations: Some(20), ..small_config(3) };
        let mut s = Session::new(problem(), config, None).unwrap();
        let mut d = SimulatedDesigner::new(Persona::new(WeightVector::EQUAL, 0.0), 1);
        s.run(&mut d).unwrap();
        assert_eq!(s.iteration(), 20);
        assert!(matches!(s.log().records().last(), Some(LogRecord::Halt(_))));
    }

    #[test]
    fn freeze_and_unfreeze() {
        let p = problem();
        let mut s = Session::new(p.clone(), small_config(4), None).unwrap();
        let shown = s.advance().unwrap().unwrap().clone();
        let class = (0..p.class_count()).max_by_key(|&c| shown.candidate.classes()[c].len()).unwrap();
        let members = shown.candidate.classes()[class].clone();
        s.submit(DesignerResponse::rating(60).with(DesignerAction::Freeze { class, members: members.clone() }))
            .unwrap();
        let expected: BTreeSet<Element> = members.iter().copied().collect();
        let mut d = SimulatedDesigner::new(Persona::new(WeightVector::EQUAL, 0.0), 9);
        for _ in 0..3 {
            let shown = s.advance().unwrap().unwrap();
            let got: BTreeSet<Element> = shown.candidate.classes()[class].iter().copied().collect();
            assert_eq!(got, expected);
            s.step(&mut d).unwrap();
        }
        s.advance().unwrap();
        s.submit(DesignerResponse::rating(60).with(DesignerAction::Unfreeze { class })).unwrap();
        assert!(s.frozen().is_empty());
        let mut varied = false;
        for _ in 0..5 {
            let shown = s.advance().unwrap().unwrap();
            let got: BTreeSet<Element> = shown.candidate.classes()[class].iter().copied().collect();
            varied |= got != expected;
            s.step(&mut d).unwrap();
        }
        assert!(varied);
    }

    #[test]
    fn invalid_freezes_rejected() {
        let p = problem();
        let mut s = Session::new(p.clone(), small_config(5), None).unwrap();
        let shown = s.advance().unwrap().unwrap().clone();
        let (c0, c1) = (0, 1);
        let in_c1 = shown.candidate.classes()[c1].first().copied();
        let other = p.elements().find(|e| !shown.candidate.classes()[c0].contains(e)).unwrap();
        assert!(matches!(
            s.validate_response(&DesignerResponse::rating(5).with(DesignerAction::Freeze { class: c0, members: vec![other] })),
            Err(SessionError::NotColocated { .. })
        ));
        assert!(matches!(
            s.validate_response(&DesignerResponse::rating(5).with(DesignerAction::Freeze { class: 9, members: vec![other] })),
            Err(SessionError::ClassIndex { .. })
        ));
        assert!(matches!(
            s.validate_response(&DesignerResponse::rating(5).with(DesignerAction::Unfreeze { class: 1 })),
            Err(SessionError::NotFrozen(1))
        ));
        if let Some(e) = in_c1 {
            let twice = DesignerResponse::rating(5)
                .with(DesignerAction::Freeze { class: c1, members: vec![e] })
                .with(DesignerAction::Freeze { class: c1, members: vec![e] });
            assert!(matches!(s.validate_response(&twice), Err(SessionError::Aco(_))));
        }
        let before = s.clone();
        assert!(s.submit(DesignerResponse::rating(101)).is_err());
        assert_eq!(s, before);
    }

    #[test]
    fn archive_keeps_insertion_order_and_duplicates() {
        let mut s = Session::new(problem(), small_config(6), None).unwrap();
        s.advance().unwrap();
        s.submit(DesignerResponse::rating(40).with(DesignerAction::Archive).with(DesignerAction::Archive))
            .unwrap();
        assert_eq!(s.archive_list().len(), 2);
        assert_eq!(s.archive_list()[0], s.archive_list()[1]);
        let first = s.archive_list()[0].clone();
        let mut d = SimulatedDesigner::new(Persona::new(WeightVector::EQUAL, 0.0), 1);
        while s.iteration() < 60 {
            s.step(&mut d).unwrap();
        }
        assert_eq!(s.archive_list()[0], first);
    }

    #[test]
    fn replay_reconstructs_state() {
        let mut s = Session::new(problem(), small_config(7), None).unwrap();
        let mut d = SimulatedDesigner::new(Persona::new(WeightVector::EQUAL, 5.0), 3).halt_after(6);
        s.run(&mut d).unwrap();
        let text = s.log().to_ndjson();
        let replayed = Session::replay(&EpisodeLog::from_ndjson(&text).unwrap()).unwrap();
        assert_eq!(replayed, s);
    }
}
