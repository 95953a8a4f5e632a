//! Fitness measures for candidate class designs.
//!
//! All three measures are minimized:
//!
//! * **CBO**: fraction of uses whose method and attribute sit in different
//!   classes (0 = fully decoupled).
//! * **NAC**: mean of the population standard deviations of per-class
//!   attribute counts and per-class method counts.
//! * **ATMR**: population standard deviation of per-class
//!   `attributes / max(methods, 1)`.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::problem::{ClassAssignment, DesignProblem, DesignSolution};

/// Tolerance on the sum of a [`WeightVector`].
pub const WEIGHT_SUM_TOLERANCE: f64 = 1e-9;

/// Cohesion at or above this is shown as high.
pub const HIGH_COHESION: f64 = 2.0 / 3.0;
/// Cohesion at or above this (and below [`HIGH_COHESION`]) is intermediate.
pub const INTERMEDIATE_COHESION: f64 = 1.0 / 3.0;

#[derive(Debug, Error, PartialEq)]
pub enum FitnessError {
    #[error("class index {index} out of range for {count} classes")]
    ClassIndex { index: usize, count: usize },
    #[error("coupling needs two distinct classes, got {0} twice")]
    SameClass(usize),
    #[error("non-dominated filter needs at least one vector")]
    EmptySet,
    #[error("invalid weights ({0}, {1}, {2}): must be non-negative and sum to 1")]
    InvalidWeights(f64, f64, f64),
}

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct MetricVector {
    pub cbo: f64,
    pub nac: f64,
    pub atmr: f64,
}

impl MetricVector {
    pub const fn new(cbo: f64, nac: f64, atmr: f64) -> Self {
        MetricVector { cbo, nac, atmr }
    }

    pub fn as_array(&self) -> [f64; 3] {
        [self.cbo, self.nac, self.atmr]
    }
}

/// Non-negative objective weights summing to one.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawWeights", into = "RawWeights")]
pub struct WeightVector {
    cbo: f64,
    nac: f64,
    atmr: f64,
}

#[derive(Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
struct RawWeights {
    w_cbo: f64,
    w_nac: f64,
    w_atmr: f64,
}

impl TryFrom<RawWeights> for WeightVector {
    type Error = FitnessError;

    fn try_from(raw: RawWeights) -> Result<Self, Self::Error> {
        WeightVector::new(raw.w_cbo, raw.w_nac, raw.w_atmr)
    }
}

impl From<WeightVector> for RawWeights {
    fn from(w: WeightVector) -> Self {
        RawWeights { w_cbo: w.cbo, w_nac: w.nac, w_atmr: w.atmr }
    }
}

impl WeightVector {
    /// Starting weights of every session, matching the surrogate's initial
    /// coefficients.
    pub const INITIAL: WeightVector = WeightVector { cbo: 0.34, nac: 0.33, atmr: 0.33 };
    pub const EQUAL: WeightVector = WeightVector { cbo: 1.0 / 3.0, nac: 1.0 / 3.0, atmr: 1.0 / 3.0 };

    pub fn new(cbo: f64, nac: f64, atmr: f64) -> Result<Self, FitnessError> {
        let finite = cbo.is_finite() && nac.is_finite() && atmr.is_finite();
        if !finite
            || cbo < 0.0
            || nac < 0.0
            || atmr < 0.0
            || ((cbo + nac + atmr) - 1.0).abs() > WEIGHT_SUM_TOLERANCE
        {
            return Err(FitnessError::InvalidWeights(cbo, nac, atmr));
        }
        Ok(WeightVector { cbo, nac, atmr })
    }

    /// Scales non-negative magnitudes to sum to one.
    pub fn normalized(cbo: f64, nac: f64, atmr: f64) -> Result<Self, FitnessError> {
        let total = cbo + nac + atmr;
        if total.is_nan() || total <= 0.0 || cbo < 0.0 || nac < 0.0 || atmr < 0.0 {
            return Err(FitnessError::InvalidWeights(cbo, nac, atmr));
        }
        WeightVector::new(cbo / total, nac / total, atmr / total)
    }

    pub fn cbo(&self) -> f64 {
        self.cbo
    }

    pub fn nac(&self) -> f64 {
        self.nac
    }

    pub fn atmr(&self) -> f64 {
        self.atmr
    }

    pub fn as_array(&self) -> [f64; 3] {
        [self.cbo, self.nac, self.atmr]
    }
}

impl Default for WeightVector {
    fn default() -> Self {
        WeightVector::INITIAL
    }
}

struct ClassCounts {
    attributes: Vec<usize>,
    methods: Vec<usize>,
}

fn class_counts(assignment: &ClassAssignment) -> ClassCounts {
    let mut attributes = vec![0; assignment.class_count];
    let mut methods = vec![0; assignment.class_count];
    for &c in &assignment.attribute_class {
        attributes[c] += 1;
    }
    for &c in &assignment.method_class {
        methods[c] += 1;
    }
    ClassCounts { attributes, methods }
}

fn population_std(values: impl ExactSizeIterator<Item = f64> + Clone) -> f64 {
    let n = values.len();
    if n == 0 {
        return 0.0;
    }
    let mean = values.clone().sum::<f64>() / n as f64;
    let var = values.map(|v| (v - mean) * (v - mean)).sum::<f64>() / n as f64;
    var.sqrt()
}

fn crossing_uses(problem: &DesignProblem, assignment: &ClassAssignment) -> usize {
    problem
        .uses()
        .iter()
        .filter(|u| assignment.method_class[u.method] != assignment.attribute_class[u.attribute])
        .count()
}

fn cbo_of(problem: &DesignProblem, assignment: &ClassAssignment) -> f64 {
    crossing_uses(problem, assignment) as f64 / problem.uses().len() as f64
}

fn nac_of(counts: &ClassCounts) -> f64 {
    let attr = population_std(counts.attributes.iter().map(|&c| c as f64));
    let meth = population_std(counts.methods.iter().map(|&c| c as f64));
    (attr + meth) / 2.0
}

fn atmr_of(counts: &ClassCounts) -> f64 {
    population_std(
        counts
            .attributes
            .iter()
            .zip(&counts.methods)
            .map(|(&a, &m)| a as f64 / m.max(1) as f64),
    )
}

pub fn cbo(problem: &DesignProblem, solution: &DesignSolution) -> f64 {
    cbo_of(problem, &solution.assignment(problem))
}

pub fn nac(problem: &DesignProblem, solution: &DesignSolution) -> f64 {
    nac_of(&class_counts(&solution.assignment(problem)))
}

pub fn atmr(problem: &DesignProblem, solution: &DesignSolution) -> f64 {
    atmr_of(&class_counts(&solution.assignment(problem)))
}

pub fn metric_vector(problem: &DesignProblem, solution: &DesignSolution) -> MetricVector {
    metrics_of_assignment(problem, &solution.assignment(problem))
}

pub fn metrics_of_assignment(problem: &DesignProblem, assignment: &ClassAssignment) -> MetricVector {
    let counts = class_counts(assignment);
    MetricVector { cbo: cbo_of(problem, assignment), nac: nac_of(&counts), atmr: atmr_of(&counts) }
}

/// Weighted quality in `[0, 1]`, higher is better.
pub fn combined_score(m: &MetricVector, w: &WeightVector) -> f64 {
    w.cbo * (1.0 - m.cbo) + w.nac / (1.0 + m.nac) + w.atmr / (1.0 + m.atmr)
}

/// Pareto dominance under minimization of all three measures.
pub fn dominates(a: &MetricVector, b: &MetricVector) -> bool {
    let (a, b) = (a.as_array(), b.as_array());
    a.iter().zip(&b).all(|(x, y)| x <= y) && a.iter().zip(&b).any(|(x, y)| x < y)
}

/// Indices (ascending) of the vectors no other vector dominates. Identical
/// vectors are all kept.
pub fn non_dominated(set: &[MetricVector]) -> Result<Vec<usize>, FitnessError> {
    if set.is_empty() {
        return Err(FitnessError::EmptySet);
    }
    // A dominator always sorts lexicographically before the point it
    // dominates, and dominance is transitive, so checking against the front
    // built so far is sufficient.
    let mut order: Vec<usize> = (0..set.len()).collect();
    order.sort_by(|&i, &j| {
        let (a, b) = (set[i].as_array(), set[j].as_array());
        a[0].total_cmp(&b[0]).then(a[1].total_cmp(&b[1])).then(a[2].total_cmp(&b[2]))
    });
    let mut front: Vec<usize> = Vec::new();
    for i in order {
        if !front.iter().any(|&f| dominates(&set[f], &set[i])) {
            front.push(i);
        }
    }
    front.sort_unstable();
    Ok(front)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub enum CohesionTier {
    High,
    Intermediate,
    Low,
}

impl CohesionTier {
    pub fn of(cohesion: f64) -> Self {
        if cohesion >= HIGH_COHESION {
            CohesionTier::High
        } else if cohesion >= INTERMEDIATE_COHESION {
            CohesionTier::Intermediate
        } else {
            CohesionTier::Low
        }
    }
}

fn check_class(index: usize, count: usize) -> Result<(), FitnessError> {
    if index < count {
        Ok(())
    } else {
        Err(FitnessError::ClassIndex { index, count })
    }
}

/// Internal uses over uses touching the class; 0 for untouched classes.
pub fn class_cohesion(
    problem: &DesignProblem,
    solution: &DesignSolution,
    class: usize,
) -> Result<f64, FitnessError> {
    check_class(class, solution.classes().len())?;
    let assignment = solution.assignment(problem);
    let (mut touching, mut internal) = (0usize, 0usize);
    for u in problem.uses() {
        let in_m = assignment.method_class[u.method] == class;
        let in_a = assignment.attribute_class[u.attribute] == class;
        if in_m || in_a {
            touching += 1;
        }
        if in_m && in_a {
            internal += 1;
        }
    }
    Ok(if touching == 0 { 0.0 } else { internal as f64 / touching as f64 })
}

/// Uses whose method lives in class `from` and attribute in class `to`.
pub fn coupling_strength(
    problem: &DesignProblem,
    solution: &DesignSolution,
    from: usize,
    to: usize,
) -> Result<usize, FitnessError> {
    let count = solution.classes().len();
    check_class(from, count)?;
    check_class(to, count)?;
    if from == to {
        return Err(FitnessError::SameClass(from));
    }
    let assignment = solution.assignment(problem);
    Ok(problem
        .uses()
        .iter()
        .filter(|u| assignment.method_class[u.method] == from && assignment.attribute_class[u.attribute] == to)
        .count())
}

/// Directed coupling counts for every ordered class pair; the diagonal holds
/// internal uses.
pub fn coupling_matrix(problem: &DesignProblem, solution: &DesignSolution) -> Vec<Vec<usize>> {
    let assignment = solution.assignment(problem);
    let n = assignment.class_count;
    let mut matrix = vec![vec![0; n]; n];
    for u in problem.uses() {
        matrix[assignment.method_class[u.method]][assignment.attribute_class[u.attribute]] += 1;
    }
    matrix
}

/// Index of a class holding more than half of all elements, when the design
/// has at least three classes.
pub fn detect_god_class(problem: &DesignProblem, solution: &DesignSolution) -> Option<usize> {
    if solution.classes().len() < 3 {
        return None;
    }
    let total = problem.element_count();
    solution.classes().iter().position(|members| 2 * members.len() > total)
}
