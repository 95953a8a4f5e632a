//! Flags designs where one class swallows most of the elements.

use antdesign::fitness::detect_god_class;
use antdesign::problem::{generate_problem, DesignSolution, ProblemScale};

fn main() {
    let problem = generate_problem(ProblemScale::CBS, 1).unwrap();
    let elements: Vec<_> = problem.elements().collect();

    let balanced = DesignSolution::new((0..5).map(|c| elements.iter().copied().skip(c).step_by(5).collect()).collect());
    let mut lopsided = vec![Vec::new(); 5];
    for (i, &e) in elements.iter().enumerate() {
        lopsided[if i < 20 { 2 } else { i % 5 }].push(e);
    }
    let lopsided = DesignSolution::new(lopsided);

    for (name, design) in [("balanced", &balanced), ("lopsided", &lopsided)] {
        design.validate(&problem).unwrap();
        let sizes: Vec<usize> = design.classes().iter().map(Vec::len).collect();
        match detect_god_class(&problem, design) {
            Some(c) => println!("{name} {sizes:?}: class {c} is a god class"),
            None => println!("{name} {sizes:?}: no god class"),
        }
    }
}
