//! Records an episode to NDJSON, reads it back and rebuilds the session from
//! the log alone.

use std::sync::Arc;

use antdesign::fitness::WeightVector;
use antdesign::log::EpisodeLog;
use antdesign::problem::{generate_problem, ProblemScale};
use antdesign::session::{Persona, Session, SessionConfig, SimulatedDesigner};

fn main() {
    let problem = Arc::new(generate_problem(ProblemScale::CBS, 4).unwrap());
    let mut session = Session::new(problem, SessionConfig::interactive(77), None).unwrap();
    let persona = Persona::new(WeightVector::new(0.5, 0.3, 0.2).unwrap(), 5.0);
    session.run(&mut SimulatedDesigner::new(persona, 1).halt_after(10)).unwrap();

    let text = session.log().to_ndjson();
    println!("{} records, {} bytes", session.log().len(), text.len());
    for line in text.lines().take(3) {
        println!("  {}...", &line[..line.len().min(100)]);
    }

    let log = EpisodeLog::from_ndjson(&text).unwrap();
    let rebuilt = Session::replay(&log).unwrap();
    println!("replayed state identical: {}", rebuilt == session);
    println!("\nfitness curve (head):");
    for line in log.fitness_curve_csv().unwrap().lines().take(5) {
        println!("  {line}");
    }
}
