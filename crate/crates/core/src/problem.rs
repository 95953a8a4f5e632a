//! Design-problem instances and candidate solutions.
//!
//! Instances travel as UTF-8 JSON documents:
//!
//! ```json
//! {
//!   "name": "cinema-booking",
//!   "classCount": 2,
//!   "attributes": ["seat", "price"],
//!   "methods": ["book", "quote"],
//!   "uses": [["book", "seat"], ["quote", "price"]]
//! }
//! ```
//!
//! Attribute and method labels double as identifiers and must be unique within
//! their own category. The JSON schema lives in `schemas/problem.schema.json`.

use std::collections::{BTreeSet, HashMap};
use std::fmt;

use rand::seq::{IndexedRandom, IteratorRandom};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum ProblemError {
    #[error("malformed instance document: {0}")]
    Malformed(String),
    #[error("duplicate attribute `{0}`")]
    DuplicateAttribute(String),
    #[error("duplicate method `{0}`")]
    DuplicateMethod(String),
    #[error("unknown attribute `{0}`")]
    UnknownAttribute(String),
    #[error("unknown method `{0}`")]
    UnknownMethod(String),
    #[error("duplicate use ({method}, {attribute})")]
    DuplicateUse { method: String, attribute: String },
    #[error("a problem needs at least one use")]
    NoUses,
    #[error("class count {count} outside 1..={max}")]
    ClassCount { count: i64, max: usize },
    #[error("infeasible generator request: {0}")]
    Infeasible(String),
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum SolutionError {
    #[error("solution has {found} classes, problem requires {expected}")]
    ClassCount { expected: usize, found: usize },
    #[error("{0} does not belong to the problem")]
    UnknownElement(Element),
    #[error("{0} appears more than once")]
    Repeated(Element),
    #[error("{0} is not assigned to any class")]
    Missing(Element),
}

/// An attribute or a method, by index into the owning problem.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub enum Element {
    Attribute(usize),
    Method(usize),
}

impl fmt::Display for Element {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Element::Attribute(i) => write!(f, "attribute #{i}"),
            Element::Method(i) => write!(f, "method #{i}"),
        }
    }
}

/// A method's dependency on an attribute.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Use {
    pub method: usize,
    pub attribute: usize,
}

/// Attribute/method/use/class counts of an instance.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ProblemScale {
    pub attributes: usize,
    pub methods: usize,
    pub uses: usize,
    pub classes: usize,
}

impl ProblemScale {
    /// Cinema booking system scale.
    pub const CBS: ProblemScale = ProblemScale::new(16, 15, 39, 5);
    /// Graduate development program scale.
    pub const GDP: ProblemScale = ProblemScale::new(43, 12, 121, 5);
    /// Select cruises scale.
    pub const SC: ProblemScale = ProblemScale::new(52, 30, 126, 15);

    pub const fn new(attributes: usize, methods: usize, uses: usize, classes: usize) -> Self {
        ProblemScale { attributes, methods, uses, classes }
    }
}

impl std::str::FromStr for ProblemScale {
    type Err = String;

    /// Parses `a,m,u,c`.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let parts = s
            .split(',')
            .map(|p| p.trim().parse::<usize>().map_err(|e| format!("`{p}`: {e}")))
            .collect::<Result<Vec<_>, _>>()?;
        match parts.as_slice() {
            &[a, m, u, c] => Ok(ProblemScale::new(a, m, u, c)),
            _ => Err(format!("expected four comma-separated counts, got `{s}`")),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DesignProblem {
    name: String,
    attributes: Vec<String>,
    methods: Vec<String>,
    uses: Vec<Use>,
    class_count: usize,
    attribute_index: HashMap<String, usize>,
    method_index: HashMap<String, usize>,
}

impl DesignProblem {
    /// Builds and validates a problem. Uses are given as `(method, attribute)`
    /// index pairs.
    pub fn new(
        name: impl Into<String>,
        attributes: Vec<String>,
        methods: Vec<String>,
        uses: Vec<(usize, usize)>,
        class_count: usize,
    ) -> Result<Self, ProblemError> {
        let attribute_index = index_labels(&attributes, ProblemError::DuplicateAttribute)?;
        let method_index = index_labels(&methods, ProblemError::DuplicateMethod)?;
        if uses.is_empty() {
            return Err(ProblemError::NoUses);
        }
        let max = attributes.len() + methods.len();
        if class_count < 1 || class_count > max {
            return Err(ProblemError::ClassCount { count: class_count as i64, max });
        }
        let mut seen = BTreeSet::new();
        let mut checked = Vec::with_capacity(uses.len());
        for (method, attribute) in uses {
            let m = methods
                .get(method)
                .ok_or_else(|| ProblemError::UnknownMethod(format!("#{method}")))?;
            let a = attributes
                .get(attribute)
                .ok_or_else(|| ProblemError::UnknownAttribute(format!("#{attribute}")))?;
            if !seen.insert((method, attribute)) {
                return Err(ProblemError::DuplicateUse { method: m.clone(), attribute: a.clone() });
            }
            checked.push(Use { method, attribute });
        }
        Ok(DesignProblem {
            name: name.into(),
            attributes,
            methods,
            uses: checked,
            class_count,
            attribute_index,
            method_index,
        })
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn attributes(&self) -> &[String] {
        &self.attributes
    }

    pub fn methods(&self) -> &[String] {
        &self.methods
    }

    pub fn uses(&self) -> &[Use] {
        &self.uses
    }

    pub fn class_count(&self) -> usize {
        self.class_count
    }

    pub fn element_count(&self) -> usize {
        self.attributes.len() + self.methods.len()
    }

    pub fn scale(&self) -> ProblemScale {
        ProblemScale::new(self.attributes.len(), self.methods.len(), self.uses.len(), self.class_count)
    }

    /// All elements, attributes first.
    pub fn elements(&self) -> impl Iterator<Item = Element> + '_ {
        (0..self.attributes.len())
            .map(Element::Attribute)
            .chain((0..self.methods.len()).map(Element::Method))
    }

    pub fn contains(&self, element: Element) -> bool {
        match element {
            Element::Attribute(i) => i < self.attributes.len(),
            Element::Method(i) => i < self.methods.len(),
        }
    }

    pub fn label(&self, element: Element) -> &str {
        match element {
            Element::Attribute(i) => &self.attributes[i],
            Element::Method(i) => &self.methods[i],
        }
    }

    pub fn attribute_by_label(&self, label: &str) -> Option<Element> {
        self.attribute_index.get(label).map(|&i| Element::Attribute(i))
    }

    pub fn method_by_label(&self, label: &str) -> Option<Element> {
        self.method_index.get(label).map(|&i| Element::Method(i))
    }

    pub fn to_document(&self) -> ProblemDocument {
        ProblemDocument {
            name: self.name.clone(),
            class_count: self.class_count as i64,
            attributes: self.attributes.clone(),
            methods: self.methods.clone(),
            uses: self
                .uses
                .iter()
                .map(|u| [self.methods[u.method].clone(), self.attributes[u.attribute].clone()])
                .collect(),
        }
    }

    pub fn from_document(doc: ProblemDocument) -> Result<Self, ProblemError> {
        let ProblemDocument { name, class_count, attributes, methods, uses } = doc;
        let max = attributes.len() + methods.len();
        if class_count < 1 || class_count as u64 > max as u64 {
            return Err(ProblemError::ClassCount { count: class_count, max });
        }
        let attribute_index = index_labels(&attributes, ProblemError::DuplicateAttribute)?;
        let method_index = index_labels(&methods, ProblemError::DuplicateMethod)?;
        let pairs = uses
            .into_iter()
            .map(|[m, a]| {
                let mi = *method_index.get(&m).ok_or(ProblemError::UnknownMethod(m))?;
                let ai = *attribute_index.get(&a).ok_or(ProblemError::UnknownAttribute(a))?;
                Ok((mi, ai))
            })
            .collect::<Result<Vec<_>, ProblemError>>()?;
        DesignProblem::new(name, attributes, methods, pairs, class_count as usize)
    }
}

fn index_labels(
    labels: &[String],
    duplicate: fn(String) -> ProblemError,
) -> Result<HashMap<String, usize>, ProblemError> {
    let mut index = HashMap::with_capacity(labels.len());
    for (i, label) in labels.iter().enumerate() {
        if index.insert(label.clone(), i).is_some() {
            return Err(duplicate(label.clone()));
        }
    }
    Ok(index)
}

/// Wire form of a [`DesignProblem`].
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase", deny_unknown_fields)]
pub struct ProblemDocument {
    pub name: String,
    pub class_count: i64,
    pub attributes: Vec<String>,
    pub methods: Vec<String>,
    /// `[method, attribute]` label pairs.
    pub uses: Vec<[String; 2]>,
}

pub fn parse_problem(document: &str) -> Result<DesignProblem, ProblemError> {
    let doc: ProblemDocument =
        serde_json::from_str(document).map_err(|e| ProblemError::Malformed(e.to_string()))?;
    DesignProblem::from_document(doc)
}

pub fn serialize_problem(problem: &DesignProblem) -> String {
    let mut text = serde_json::to_string_pretty(&problem.to_document())
        .expect("problem documents always serialize");
    text.push('\n');
    text
}

/// Generates a random instance of the given scale.
///
/// Every method receives at least one use; attributes may end up unused. The
/// result depends only on `scale` and `seed`.
pub fn generate_problem(scale: ProblemScale, seed: u64) -> Result<DesignProblem, ProblemError> {
    let ProblemScale { attributes, methods, uses, classes } = scale;
    if attributes == 0 || methods == 0 || uses == 0 || classes == 0 {
        return Err(ProblemError::Infeasible("all counts must be at least 1".into()));
    }
    let pair_count = attributes
        .checked_mul(methods)
        .ok_or_else(|| ProblemError::Infeasible("attribute x method count overflows".into()))?;
    if uses > pair_count {
        return Err(ProblemError::Infeasible(format!(
            "{uses} uses exceed {attributes} x {methods} = {pair_count} possible pairs"
        )));
    }
    if uses < methods {
        return Err(ProblemError::Infeasible(format!(
            "{uses} uses cannot cover {methods} methods"
        )));
    }
    if classes > attributes + methods {
        return Err(ProblemError::Infeasible(format!(
            "{classes} classes exceed {} elements",
            attributes + methods
        )));
    }

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let attribute_ids: Vec<usize> = (0..attributes).collect();
    let mut chosen = BTreeSet::new();
    for method in 0..methods {
        let attribute = *attribute_ids.choose(&mut rng).expect("attributes >= 1");
        chosen.insert((method, attribute));
    }
    let remaining = uses - chosen.len();
    let extra = (0..pair_count)
        .map(|k| (k / attributes, k % attributes))
        .filter(|pair| !chosen.contains(pair))
        .choose_multiple(&mut rng, remaining);
    chosen.extend(extra);

    DesignProblem::new(
        format!("generated-{attributes}x{methods}x{uses}-c{classes}-s{seed}"),
        (0..attributes).map(|i| format!("a{i}")).collect(),
        (0..methods).map(|i| format!("m{i}")).collect(),
        chosen.into_iter().collect(),
        classes,
    )
}

/// A grouping of every element into `classCount` ordered classes.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct DesignSolution {
    classes: Vec<Vec<Element>>,
}

impl DesignSolution {
    pub fn new(classes: Vec<Vec<Element>>) -> Self {
        DesignSolution { classes }
    }

    pub fn classes(&self) -> &[Vec<Element>] {
        &self.classes
    }

    pub fn into_classes(self) -> Vec<Vec<Element>> {
        self.classes
    }

    pub fn validate(&self, problem: &DesignProblem) -> Result<(), SolutionError> {
        if self.classes.len() != problem.class_count() {
            return Err(SolutionError::ClassCount {
                expected: problem.class_count(),
                found: self.classes.len(),
            });
        }
        let mut seen = BTreeSet::new();
        for &element in self.classes.iter().flatten() {
            if !problem.contains(element) {
                return Err(SolutionError::UnknownElement(element));
            }
            if !seen.insert(element) {
                return Err(SolutionError::Repeated(element));
            }
        }
        match problem.elements().find(|e| !seen.contains(e)) {
            Some(missing) => Err(SolutionError::Missing(missing)),
            None => Ok(()),
        }
    }

    /// Class index of every attribute and method. The solution must be valid
    /// for `problem`.
    pub fn assignment(&self, problem: &DesignProblem) -> ClassAssignment {
        let mut attribute_class = vec![usize::MAX; problem.attributes().len()];
        let mut method_class = vec![usize::MAX; problem.methods().len()];
        for (c, members) in self.classes.iter().enumerate() {
            for &element in members {
                match element {
                    Element::Attribute(i) => attribute_class[i] = c,
                    Element::Method(i) => method_class[i] = c,
                }
            }
        }
        ClassAssignment { attribute_class, method_class, class_count: self.classes.len() }
    }

    pub fn to_document(&self, problem: &DesignProblem) -> SolutionDocument {
        SolutionDocument {
            problem: problem.name().to_string(),
            classes: self
                .classes
                .iter()
                .map(|members| ClassDocument::from_members(problem, members))
                .collect(),
        }
    }
}

/// Per-element class lookup derived from a [`DesignSolution`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ClassAssignment {
    pub attribute_class: Vec<usize>,
    pub method_class: Vec<usize>,
    pub class_count: usize,
}

impl ClassAssignment {
    pub fn class_of(&self, element: Element) -> usize {
        match element {
            Element::Attribute(i) => self.attribute_class[i],
            Element::Method(i) => self.method_class[i],
        }
    }
}

/// Wire form of a [`DesignSolution`], members by label.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct SolutionDocument {
    pub problem: String,
    pub classes: Vec<ClassDocument>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct ClassDocument {
    pub attributes: Vec<String>,
    pub methods: Vec<String>,
}

impl ClassDocument {
    pub fn from_members(problem: &DesignProblem, members: &[Element]) -> Self {
        let mut doc = ClassDocument { attributes: Vec::new(), methods: Vec::new() };
        for &element in members {
            let label = problem.label(element).to_string();
            match element {
                Element::Attribute(_) => doc.attributes.push(label),
                Element::Method(_) => doc.methods.push(label),
            }
        }
        doc
    }

    /// Resolves labels back to elements, attributes first.
    pub fn to_members(&self, problem: &DesignProblem) -> Result<Vec<Element>, ProblemError> {
        let attributes = self.attributes.iter().map(|l| {
            problem.attribute_by_label(l).ok_or_else(|| ProblemError::UnknownAttribute(l.clone()))
        });
        let methods = self.methods.iter().map(|l| {
            problem.method_by_label(l).ok_or_else(|| ProblemError::UnknownMethod(l.clone()))
        });
        attributes.chain(methods).collect()
    }
}
