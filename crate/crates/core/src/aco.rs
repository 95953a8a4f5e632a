//! MAX-MIN ant system over the class-assignment graph.
//!
//! Vertices are laid out as `[attributes | methods | delimiters]`, with
//! `classCount - 1` end-of-class delimiters. An ant walks every vertex once;
//! the delimiters it passes split its walk into consecutive classes. Only the
//! iteration-best ant deposits, trails start at `t_max` and are clamped to
//! `[t_min, t_max]`, and there is no local search and no visibility term.

use std::collections::{BTreeMap, BTreeSet};
use std::sync::Arc;

use rand::{Rng, RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::fitness::{self, combined_score, MetricVector, WeightVector};
use crate::problem::{DesignProblem, DesignSolution, Element};

#[derive(Debug, Error, PartialEq)]
pub enum AcoError {
    #[error("invalid parameters: {0}")]
    Params(String),
    #[error("deposit quality {0} outside [0, 1]")]
    Quality(f64),
    #[error("class index {index} out of range for {count} classes")]
    ClassIndex { index: usize, count: usize },
    #[error("{0} does not belong to the problem")]
    UnknownElement(Element),
    #[error("{element} is already frozen in class {class}")]
    Overlap { element: Element, class: usize },
    #[error("class {0} is already frozen")]
    AlreadyFrozen(usize),
    #[error("every class is frozen but {0} elements remain unassigned")]
    NoFreeClass(usize),
}

/// Search parameters. [`Default`] gives the published configuration.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct AcoParams {
    /// Ants per iteration.
    pub colony_size: usize,
    /// Exponent applied to trails when choosing the next vertex.
    pub alpha: f64,
    /// Deposit scale.
    pub mu: f64,
    /// Evaporation rate.
    pub sigma: f64,
    pub t_min: f64,
    pub t_max: f64,
}

impl Default for AcoParams {
    fn default() -> Self {
        AcoParams { colony_size: 100, alpha: 1.5, mu: 3.0, sigma: 0.035, t_min: 0.5, t_max: 3.5 }
    }
}

impl AcoParams {
    pub fn validate(&self) -> Result<(), AcoError> {
        let fail = |msg: &str| Err(AcoError::Params(msg.to_string()));
        if self.colony_size < 1 {
            return fail("colony size must be at least 1");
        }
        if !(self.alpha > 0.0 && self.alpha.is_finite()) {
            return fail("alpha must be positive");
        }
        if !(self.mu > 0.0 && self.mu.is_finite()) {
            return fail("mu must be positive");
        }
        if !(self.sigma > 0.0 && self.sigma < 1.0) {
            return fail("sigma must lie in (0, 1)");
        }
        if !(self.t_min > 0.0 && self.t_min < self.t_max && self.t_max.is_finite()) {
            return fail("trail bounds must satisfy 0 < t_min < t_max");
        }
        Ok(())
    }
}

/// Maps elements and delimiters to vertex numbers.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct VertexLayout {
    pub attributes: usize,
    pub methods: usize,
    pub delimiters: usize,
}

impl VertexLayout {
    pub fn of(problem: &DesignProblem) -> Self {
        VertexLayout {
            attributes: problem.attributes().len(),
            methods: problem.methods().len(),
            delimiters: problem.class_count() - 1,
        }
    }

    pub fn vertex_count(&self) -> usize {
        self.attributes + self.methods + self.delimiters
    }

    pub fn vertex(&self, element: Element) -> usize {
        match element {
            Element::Attribute(i) => i,
            Element::Method(i) => self.attributes + i,
        }
    }

    pub fn delimiter(&self, k: usize) -> usize {
        self.attributes + self.methods + k
    }

    /// `None` for delimiter vertices.
    pub fn element(&self, vertex: usize) -> Option<Element> {
        if vertex < self.attributes {
            Some(Element::Attribute(vertex))
        } else if vertex < self.attributes + self.methods {
            Some(Element::Method(vertex - self.attributes))
        } else {
            None
        }
    }

    /// Vertex sequence of a complete solution: each class's members followed
    /// by a delimiter, except after the last class.
    pub fn path_of(&self, solution: &DesignSolution) -> Vec<usize> {
        let mut path = Vec::with_capacity(self.vertex_count());
        let last = solution.classes().len().saturating_sub(1);
        for (c, members) in solution.classes().iter().enumerate() {
            path.extend(members.iter().map(|&e| self.vertex(e)));
            if c < last {
                path.push(self.delimiter(c));
            }
        }
        path
    }
}

/// Symmetric trail strengths, kept inside `[t_min, t_max]`.
#[derive(Debug, Clone, PartialEq)]
pub struct PheromoneMatrix {
    size: usize,
    trail: Vec<f64>,
}

impl PheromoneMatrix {
    /// All off-diagonal trails start at `t_max`.
    pub fn new(problem: &DesignProblem, params: &AcoParams) -> Self {
        Self::filled(VertexLayout::of(problem).vertex_count(), params.t_max)
    }

    pub fn filled(size: usize, value: f64) -> Self {
        let mut trail = vec![value; size * size];
        for i in 0..size {
            trail[i * size + i] = 0.0;
        }
        PheromoneMatrix { size, trail }
    }

    pub fn size(&self) -> usize {
        self.size
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.trail[i * self.size + j]
    }

    /// Sets both `(i, j)` and `(j, i)`, clamped to the trail bounds.
    pub fn set(&mut self, i: usize, j: usize, value: f64, params: &AcoParams) {
        assert_ne!(i, j, "the diagonal carries no trail");
        let v = value.clamp(params.t_min, params.t_max);
        self.trail[i * self.size + j] = v;
        self.trail[j * self.size + i] = v;
    }

    /// Off-diagonal `(i, j, trail)` with `i < j`.
    pub fn entries(&self) -> impl Iterator<Item = (usize, usize, f64)> + '_ {
        (0..self.size).flat_map(move |i| ((i + 1)..self.size).map(move |j| (i, j, self.get(i, j))))
    }

    pub fn evaporate(&mut self, params: &AcoParams) {
        let keep = 1.0 - params.sigma;
        for i in 0..self.size {
            for j in 0..self.size {
                if i != j {
                    let cell = &mut self.trail[i * self.size + j];
                    *cell = (*cell * keep).max(params.t_min);
                }
            }
        }
    }

    /// Adds `mu * quality` to every consecutive vertex pair of `path`, capped
    /// at `t_max`.
    pub fn deposit(&mut self, path: &[usize], quality: f64, params: &AcoParams) -> Result<(), AcoError> {
        if !(0.0..=1.0).contains(&quality) {
            return Err(AcoError::Quality(quality));
        }
        let amount = params.mu * quality;
        for pair in path.windows(2) {
            let (i, j) = (pair[0], pair[1]);
            let v = (self.get(i, j) + amount).min(params.t_max);
            self.trail[i * self.size + j] = v;
            self.trail[j * self.size + i] = v;
        }
        Ok(())
    }

    fn attractiveness(&self, alpha: f64) -> Vec<f64> {
        self.trail.iter().map(|t| t.powf(alpha)).collect()
    }
}

/// Classes fixed by the designer: class index to its member set.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct FreezeSet {
    classes: BTreeMap<usize, BTreeSet<Element>>,
}

impl FreezeSet {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn is_empty(&self) -> bool {
        self.classes.is_empty()
    }

    pub fn len(&self) -> usize {
        self.classes.len()
    }

    pub fn get(&self, class: usize) -> Option<&BTreeSet<Element>> {
        self.classes.get(&class)
    }

    pub fn iter(&self) -> impl Iterator<Item = (usize, &BTreeSet<Element>)> {
        self.classes.iter().map(|(&c, m)| (c, m))
    }

    pub fn is_frozen(&self, class: usize) -> bool {
        self.classes.contains_key(&class)
    }

    pub fn class_of(&self, element: Element) -> Option<usize> {
        self.classes.iter().find(|(_, m)| m.contains(&element)).map(|(&c, _)| c)
    }

    /// Freezes `class` to `members`. Fails if the class is already frozen or
    /// a member is frozen elsewhere.
    pub fn freeze(
        &mut self,
        class: usize,
        members: impl IntoIterator<Item = Element>,
    ) -> Result<(), AcoError> {
        if self.is_frozen(class) {
            return Err(AcoError::AlreadyFrozen(class));
        }
        let members: BTreeSet<Element> = members.into_iter().collect();
        for &element in &members {
            if let Some(other) = self.class_of(element) {
                return Err(AcoError::Overlap { element, class: other });
            }
        }
        self.classes.insert(class, members);
        Ok(())
    }

    /// Returns the released members, if the class was frozen.
    pub fn unfreeze(&mut self, class: usize) -> Option<BTreeSet<Element>> {
        self.classes.remove(&class)
    }

    pub fn validate(&self, problem: &DesignProblem) -> Result<(), AcoError> {
        let count = problem.class_count();
        for (&class, members) in &self.classes {
            if class >= count {
                return Err(AcoError::ClassIndex { index: class, count });
            }
            if let Some(&bad) = members.iter().find(|&&e| !problem.contains(e)) {
                return Err(AcoError::UnknownElement(bad));
            }
        }
        Ok(())
    }

    fn frozen_element_count(&self) -> usize {
        self.classes.values().map(BTreeSet::len).sum()
    }
}

/// One ant's walk and the solution it encodes. With frozen classes the walk
/// covers only the residual graph.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AntPath {
    pub vertices: Vec<usize>,
    pub solution: DesignSolution,
}

/// Roulette-wheel pick over `weights`; returns a position in the slice.
fn roulette<R: Rng + ?Sized>(weights: &[f64], rng: &mut R) -> usize {
    let total: f64 = weights.iter().sum();
    let mut target = rng.random::<f64>() * total;
    for (k, &w) in weights.iter().enumerate() {
        if target < w {
            return k;
        }
        target -= w;
    }
    weights.len() - 1
}

/// Probability of each candidate being chosen next from `current`:
/// `trail^alpha` normalized over the candidates.
pub fn transition_probabilities(
    matrix: &PheromoneMatrix,
    alpha: f64,
    current: usize,
    candidates: &[usize],
) -> Vec<f64> {
    let weights: Vec<f64> = candidates.iter().map(|&v| matrix.get(current, v).powf(alpha)).collect();
    let total: f64 = weights.iter().sum();
    weights.into_iter().map(|w| w / total).collect()
}

/// Picks the next vertex among `candidates` with the construction rule.
pub fn choose_next<R: Rng + ?Sized>(
    matrix: &PheromoneMatrix,
    alpha: f64,
    current: usize,
    candidates: &[usize],
    rng: &mut R,
) -> usize {
    assert!(!candidates.is_empty(), "no candidate vertex to move to");
    let weights: Vec<f64> = candidates.iter().map(|&v| matrix.get(current, v).powf(alpha)).collect();
    candidates[roulette(&weights, rng)]
}

/// Builds one solution. Frozen classes keep their members; the remaining
/// elements and delimiters are walked and split across the unfrozen class
/// slots in ascending order.
pub fn construct_path<R: Rng + ?Sized>(
    matrix: &PheromoneMatrix,
    problem: &DesignProblem,
    frozen: &FreezeSet,
    params: &AcoParams,
    rng: &mut R,
) -> Result<AntPath, AcoError> {
    frozen.validate(problem)?;
    let attractiveness = matrix.attractiveness(params.alpha);
    build_path(&attractiveness, matrix.size(), problem, frozen, rng)
}

fn build_path<R: Rng + ?Sized>(
    attractiveness: &[f64],
    size: usize,
    problem: &DesignProblem,
    frozen: &FreezeSet,
    rng: &mut R,
) -> Result<AntPath, AcoError> {
    let layout = VertexLayout::of(problem);
    let class_count = problem.class_count();
    let free_slots: Vec<usize> = (0..class_count).filter(|c| !frozen.is_frozen(*c)).collect();
    let free_elements: Vec<usize> = problem
        .elements()
        .filter(|&e| frozen.class_of(e).is_none())
        .map(|e| layout.vertex(e))
        .collect();

    let mut classes: Vec<Vec<Element>> = vec![Vec::new(); class_count];
    for (class, members) in frozen.iter() {
        classes[class] = members.iter().copied().collect();
    }
    if free_slots.is_empty() {
        if !free_elements.is_empty() {
            return Err(AcoError::NoFreeClass(free_elements.len()));
        }
        return Ok(AntPath { vertices: Vec::new(), solution: DesignSolution::new(classes) });
    }
    if free_elements.is_empty() {
        return Ok(AntPath { vertices: Vec::new(), solution: DesignSolution::new(classes) });
    }

    let mut unvisited: Vec<usize> = free_elements.clone();
    unvisited.extend((0..free_slots.len() - 1).map(|k| layout.delimiter(k)));
    let start_pos = rng.random_range(0..free_elements.len());
    let mut current = unvisited.swap_remove(start_pos);
    let mut vertices = Vec::with_capacity(unvisited.len() + 1);
    vertices.push(current);
    let mut weights = Vec::with_capacity(unvisited.len());
    while !unvisited.is_empty() {
        weights.clear();
        let row = &attractiveness[current * size..(current + 1) * size];
        weights.extend(unvisited.iter().map(|&v| row[v]));
        let pick = roulette(&weights, rng);
        current = unvisited.swap_remove(pick);
        vertices.push(current);
    }

    let mut slot = 0;
    for &v in &vertices {
        match layout.element(v) {
            Some(element) => classes[free_slots[slot]].push(element),
            None => slot += 1,
        }
    }
    Ok(AntPath { vertices, solution: DesignSolution::new(classes) })
}

#[derive(Debug, Clone, PartialEq)]
pub struct EvaluatedPath {
    pub path: AntPath,
    pub metrics: MetricVector,
    pub quality: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct BestSoFar {
    pub solution: DesignSolution,
    pub metrics: MetricVector,
    /// Quality under the weights of the most recent iteration.
    pub quality: f64,
    pub iteration: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ColonySnapshot {
    pub iteration: usize,
    pub paths: Vec<EvaluatedPath>,
    pub iteration_best: usize,
    pub best_so_far: BestSoFar,
}

impl ColonySnapshot {
    pub fn best(&self) -> &EvaluatedPath {
        &self.paths[self.iteration_best]
    }

    pub fn metrics(&self) -> Vec<MetricVector> {
        self.paths.iter().map(|p| p.metrics).collect()
    }
}

/// Uniform pick among the snapshot's non-dominated paths.
pub fn select_display_candidate<'a, R: Rng + ?Sized>(
    snapshot: &'a ColonySnapshot,
    rng: &mut R,
) -> &'a EvaluatedPath {
    let front = fitness::non_dominated(&snapshot.metrics()).expect("snapshot holds at least one path");
    &snapshot.paths[front[rng.random_range(0..front.len())]]
}

/// Colony state across iterations.
///
/// Each iteration draws one seed per ant from the colony stream, so the result
/// is the same whether ants are built serially or in parallel.
#[derive(Debug, Clone, PartialEq)]
pub struct Colony {
    problem: Arc<DesignProblem>,
    params: AcoParams,
    matrix: PheromoneMatrix,
    rng: ChaCha8Rng,
    iteration: usize,
    best: Option<BestSoFar>,
    parallel: bool,
}

impl Colony {
    pub fn new(problem: Arc<DesignProblem>, params: AcoParams, seed: u64) -> Result<Self, AcoError> {
        params.validate()?;
        let matrix = PheromoneMatrix::new(&problem, &params);
        Ok(Colony {
            problem,
            params,
            matrix,
            rng: ChaCha8Rng::seed_from_u64(seed),
            iteration: 0,
            best: None,
            parallel: false,
        })
    }

    /// Builds ants on the rayon pool.
    pub fn with_parallel(mut self, parallel: bool) -> Self {
        self.parallel = parallel;
        self
    }

    pub fn problem(&self) -> &Arc<DesignProblem> {
        &self.problem
    }

    pub fn params(&self) -> &AcoParams {
        &self.params
    }

    pub fn matrix(&self) -> &PheromoneMatrix {
        &self.matrix
    }

    /// Completed iterations.
    pub fn iteration(&self) -> usize {
        self.iteration
    }

    pub fn best_so_far(&self) -> Option<&BestSoFar> {
        self.best.as_ref()
    }

    /// Best-so-far quality rescored under `weights`, or 0 before the first
    /// iteration.
    pub fn best_quality(&self, weights: &WeightVector) -> f64 {
        self.best.as_ref().map_or(0.0, |b| combined_score(&b.metrics, weights))
    }

    pub fn run_iteration(
        &mut self,
        weights: &WeightVector,
        frozen: &FreezeSet,
    ) -> Result<ColonySnapshot, AcoError> {
        frozen.validate(&self.problem)?;
        let free = self.problem.element_count() - frozen.frozen_element_count();
        if frozen.len() == self.problem.class_count() && free > 0 {
            return Err(AcoError::NoFreeClass(free));
        }

        let seeds: Vec<u64> = (0..self.params.colony_size).map(|_| self.rng.next_u64()).collect();
        let attractiveness = self.matrix.attractiveness(self.params.alpha);
        let size = self.matrix.size();
        let problem = &*self.problem;
        let build = |seed: &u64| -> EvaluatedPath {
            let mut rng = ChaCha8Rng::seed_from_u64(*seed);
            let path = build_path(&attractiveness, size, problem, frozen, &mut rng)
                .expect("freeze set checked above");
            let metrics = fitness::metric_vector(problem, &path.solution);
            let quality = combined_score(&metrics, weights);
            EvaluatedPath { path, metrics, quality }
        };
        let paths: Vec<EvaluatedPath> = if self.parallel {
            seeds.par_iter().map(build).collect()
        } else {
            seeds.iter().map(build).collect()
        };

        let mut iteration_best = 0;
        for (k, p) in paths.iter().enumerate().skip(1) {
            if p.quality > paths[iteration_best].quality {
                iteration_best = k;
            }
        }
        let winner = &paths[iteration_best];

        self.matrix.evaporate(&self.params);
        self.matrix.deposit(&winner.path.vertices, winner.quality.clamp(0.0, 1.0), &self.params)?;
        self.iteration += 1;

        if let Some(best) = &mut self.best {
            best.quality = combined_score(&best.metrics, weights);
        }
        let improved = self.best.as_ref().is_none_or(|b| winner.quality > b.quality);
        if improved {
            self.best = Some(BestSoFar {
                solution: winner.path.solution.clone(),
                metrics: winner.metrics,
                quality: winner.quality,
                iteration: self.iteration,
            });
        }
        Ok(ColonySnapshot {
            iteration: self.iteration,
            best_so_far: self.best.clone().expect("set above"),
            iteration_best,
            paths,
        })
    }
}
