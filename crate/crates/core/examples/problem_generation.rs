//! Generates the three benchmark-scale instances, prints their shape and
//! writes one of them as a problem document.
//!
//! ```text
//! cargo run --example problem_generation [-- out.json]
//! ```

use antdesign::problem::{generate_problem, parse_problem, serialize_problem, ProblemScale};

fn main() {
    let scales = [("CBS", ProblemScale::CBS), ("GDP", ProblemScale::GDP), ("SC", ProblemScale::SC)];
    for (name, scale) in scales {
        let problem = generate_problem(scale, 1).expect("benchmark scales are feasible");
        let busiest = (0..scale.methods)
            .map(|m| problem.uses().iter().filter(|u| u.method == m).count())
            .max()
            .unwrap_or(0);
        println!(
            "{name:>3}: {} attributes, {} methods, {} uses, {} classes, busiest method touches {busiest}",
            problem.attributes().len(),
            problem.methods().len(),
            problem.uses().len(),
            problem.class_count(),
        );
    }

    // custom scale, same syntax as the CLI's --generate
    let scale: ProblemScale = "8,6,14,3".parse().unwrap();
    let problem = generate_problem(scale, 7).unwrap();
    let text = serialize_problem(&problem);
    assert_eq!(parse_problem(&text).unwrap(), problem);

    match std::env::args().nth(1) {
        Some(path) => {
            std::fs::write(&path, &text).unwrap();
            println!("wrote {path}");
        }
        None => print!("{text}"),
    }
}
