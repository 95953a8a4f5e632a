//! Non-interactive search on a CBS-scale instance with fixed equal weights,
//! printing the best-so-far curve.

use std::sync::Arc;

use antdesign::aco::{AcoParams, Colony, FreezeSet};
use antdesign::fitness::WeightVector;
use antdesign::problem::{generate_problem, ProblemScale};

fn main() {
    let iterations: usize = std::env::args().nth(1).and_then(|s| s.parse().ok()).unwrap_or(200);
    let problem = Arc::new(generate_problem(ProblemScale::CBS, 1).unwrap());
    let mut colony = Colony::new(problem.clone(), AcoParams::default(), 2024).unwrap().with_parallel(true);
    let weights = WeightVector::EQUAL;

    println!("iter  bestQ   CBO    NAC    ATMR");
    for it in 1..=iterations {
        let snap = colony.run_iteration(&weights, &FreezeSet::new()).unwrap();
        if it == 1 || it % 10 == 0 {
            let b = &snap.best_so_far;
            println!("{it:>4}  {:.4}  {:.3}  {:.3}  {:.3}", b.quality, b.metrics.cbo, b.metrics.nac, b.metrics.atmr);
        }
    }

    let best = colony.best_so_far().unwrap();
    println!("\nbest design (found at iteration {}):", best.iteration);
    for (c, members) in best.solution.classes().iter().enumerate() {
        let labels: Vec<&str> = members.iter().map(|&e| problem.label(e)).collect();
        println!("  class {c}: {}", labels.join(" "));
    }
}
