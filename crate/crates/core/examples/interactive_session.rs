//! A full interactive episode with a scripted designer: rates every
//! candidate, freezes a class once, archives a few designs and halts.

use std::sync::Arc;

use antdesign::problem::{generate_problem, ProblemScale};
use antdesign::session::{DesignerAction, DesignerResponse, Presentation, Session, SessionConfig};

fn main() {
    let problem = Arc::new(generate_problem(ProblemScale::GDP, 3).unwrap());
    let mut session = Session::new(problem.clone(), SessionConfig::interactive(11), None).unwrap();
    let mut seen = 0;

    let mut designer = |p: &Presentation| {
        seen += 1;
        let rating = (100.0 * (1.0 - p.metrics.cbo)).round().max(1.0) as i64;
        let mut response = DesignerResponse::rating(rating);
        println!(
            "iteration {:>3}: CBO {:.3} NAC {:.3} ATMR {:.3} -> rated {rating}",
            p.iteration, p.metrics.cbo, p.metrics.nac, p.metrics.atmr
        );
        if seen == 4 {
            // keep the most self-contained class as it is
            let class = (0..p.candidate.classes().len())
                .filter(|&c| !p.candidate.classes()[c].is_empty())
                .max_by(|&a, &b| {
                    let h = |c| antdesign::fitness::class_cohesion(&problem, &p.candidate, c).unwrap();
                    h(a).total_cmp(&h(b))
                })
                .unwrap();
            println!("  freezing class {class}");
            response = response.with(DesignerAction::Freeze { class, members: p.candidate.classes()[class].clone() });
        }
        if p.metrics.cbo < 0.5 {
            response = response.with(DesignerAction::Archive);
        }
        if seen == 12 {
            response = response.with(DesignerAction::Halt);
        }
        Ok(response)
    };
    session.run(&mut designer).unwrap();

    let w = session.weights();
    println!("\nhalted at iteration {} after {} interactions", session.iteration(), session.interactions());
    println!("learned weights: cbo {:.2} nac {:.2} atmr {:.2}", w.cbo(), w.nac(), w.atmr());
    println!("archived {} designs", session.archive_list().len());
}
