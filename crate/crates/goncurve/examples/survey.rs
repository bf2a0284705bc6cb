//! Batch statistics over random curves, via the same code path as the
//! `goncurve survey` subcommand.
//!
//! Each trial derives its own curve seed from the master seed, computes an
//! upper-bound certificate and a lower-bound report, and lands in one row.
//! The summary splits trials into proved-equal-to-generic, proved-below,
//! and undecided; for random curves of small genus the first bucket should
//! dominate.

use goncurve::cli::run_survey;
use goncurve::engine::EngineConfig;
use goncurve::lowrank::SolverConfig;
use goncurve::Result;

fn main() -> Result<()> {
    let config = EngineConfig {
        solver: SolverConfig {
            seed: 7,
            ..SolverConfig::default()
        },
        ..EngineConfig::default()
    };

    for (family, genus) in [("irreducible", 3u32), ("binary", 4)] {
        let (report, budget_hit) = run_survey(family, genus, 10, 1000, &config)?;
        println!("== {family}, genus {genus}, {} trials ==", report.trials);
        println!("trial  upper  lower  grade");
        for row in &report.rows {
            println!(
                "{:>5}  {:>5}  {:>5}  {}",
                row.trial,
                row.upper.map(|v| v.to_string()).unwrap_or_else(|| "-".into()),
                row.lower.map(|v| v.to_string()).unwrap_or_else(|| "-".into()),
                row.lower_grade.clone().unwrap_or_else(|| "-".into()),
            );
        }
        println!(
            "equal to generic: {:.0}%   below: {:.0}%   undecided: {:.0}%",
            report.summary.equal * 100.0,
            report.summary.below * 100.0,
            report.summary.undecided * 100.0,
        );
        assert!(!budget_hit, "small-genus surveys finish inside the budget");
        println!();
    }

    Ok(())
}
