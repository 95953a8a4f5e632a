//! Scores two hand-made designs of a small library system and compares them.

use antdesign::fitness::{self, CohesionTier, WeightVector};
use antdesign::problem::{DesignProblem, DesignSolution};

fn main() {
    let attrs = ["title", "isbn", "due", "member", "fine"];
    let methods = ["catalog", "lend", "giveBack", "charge"];
    let uses = [("catalog", "title"), ("catalog", "isbn"), ("lend", "due"), ("lend", "member"), ("giveBack", "due"), ("charge", "fine"), ("charge", "member")];
    let problem = DesignProblem::new(
        "library",
        attrs.iter().map(|s| s.to_string()).collect(),
        methods.iter().map(|s| s.to_string()).collect(),
        uses.iter()
            .map(|(m, a)| (methods.iter().position(|x| x == m).unwrap(), attrs.iter().position(|x| x == a).unwrap()))
            .collect(),
        2,
    )
    .unwrap();

    let el = |label: &str| problem.attribute_by_label(label).or_else(|| problem.method_by_label(label)).unwrap();
    let group = |labels: &[&str]| labels.iter().map(|l| el(l)).collect::<Vec<_>>();

    let designs = [
        ("book/loan", DesignSolution::new(vec![
            group(&["title", "isbn", "catalog"]),
            group(&["due", "member", "fine", "lend", "giveBack", "charge"]),
        ])),
        ("scrambled", DesignSolution::new(vec![
            group(&["title", "due", "fine", "lend"]),
            group(&["isbn", "member", "catalog", "giveBack", "charge"]),
        ])),
    ];

    let w = WeightVector::EQUAL;
    let mut scored = Vec::new();
    for (name, design) in &designs {
        design.validate(&problem).unwrap();
        let m = fitness::metric_vector(&problem, design);
        println!("{name}: CBO {:.3}  NAC {:.3}  ATMR {:.3}  quality {:.3}", m.cbo, m.nac, m.atmr, fitness::combined_score(&m, &w));
        for c in 0..design.classes().len() {
            let h = fitness::class_cohesion(&problem, design, c).unwrap();
            let tier = match CohesionTier::of(h) {
                CohesionTier::High => "high",
                CohesionTier::Intermediate => "intermediate",
                CohesionTier::Low => "low",
            };
            println!("  class {c}: cohesion {h:.2} ({tier})");
        }
        println!("  couplings {:?}", fitness::coupling_matrix(&problem, design));
        scored.push(m);
    }
    println!("non-dominated: {:?}", fitness::non_dominated(&scored).unwrap());
    println!("book/loan dominates scrambled: {}", fitness::dominates(&scored[0], &scored[1]));
}
