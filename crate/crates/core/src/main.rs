use std::process::ExitCode;

use antdesign::runner::{self, CliArgs};
use clap::Parser;

fn main() -> ExitCode {
    let args = CliArgs::parse();
    if let Some(addr) = &args.serve {
        let runtime = tokio::runtime::Runtime::new().expect("tokio runtime");
        eprintln!("serving session API on http://{addr}");
        return match runtime.block_on(antdesign::http::serve(addr)) {
            Ok(()) => ExitCode::SUCCESS,
            Err(e) => {
                eprintln!("error: {e}");
                ExitCode::FAILURE
            }
        };
    }
    let outcome = args.to_run_config().and_then(|config| runner::run(&config));
    match outcome {
        Ok(summary) => {
            println!(
                "{}: {} iterations, {} interactions, best CBO {:.3} NAC {:.3} ATMR {:.3} (quality {:.3})",
                summary.run_id,
                summary.iterations,
                summary.interactions,
                summary.best.cbo,
                summary.best.nac,
                summary.best.atmr,
                summary.best_quality
            );
            for path in &summary.artifacts {
                println!("  wrote {}", path.display());
            }
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::FAILURE
        }
    }
}
