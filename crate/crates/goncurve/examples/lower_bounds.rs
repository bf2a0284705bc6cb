//! Lower bounds from node subsets, with graded evidence.
//!
//! Forgetting some nodes can only make a curve easier to map down, so a
//! lower bound for a subset curve plus one per forgotten node bounds the
//! original. Each subset row carries a grade: "exact" when the inner bound
//! comes from a proved emptiness ladder, "dimension-heuristic" when it rests
//! on a dimension count alone, "search-exhausted" when numeric probes of the
//! heuristic band all failed. The headline bound is the best minimum over
//! rows and its grade is the weakest grade involved.

use goncurve::curve::random_document;
use goncurve::engine::{lower_bound, upper_bound, EngineConfig};
use goncurve::Result;

fn main() -> Result<()> {
    let config = EngineConfig::default();

    // Small genus: the subset scan proves the generic value outright.
    for genus in [3u32, 5] {
        let doc = random_document("irreducible", genus, 400 + genus as u64, 1000)?;
        let model = doc.validate()?;
        let report = lower_bound(&model, &config)?;
        let upper = upper_bound(&model, &config)?;
        println!(
            "genus {genus}: lower {} ({}), upper {}, {} subset rows",
            report.bound,
            report.headline_grade(),
            upper.claimed_upper,
            report.rows.len(),
        );
        for row in report.rows.iter().take(4) {
            println!(
                "  subset {:?}: inner bound {} ({}), implies {}",
                row.subset, row.inner, row.grade, row.value
            );
        }
        if report.rows.len() > 4 {
            println!("  ... {} more rows", report.rows.len() - 4);
        }
    }

    // Genus 7 sits past the proved ladder: the full-node row needs the
    // dimension heuristic, and the headline grade says so honestly.
    let doc = random_document("irreducible", 7, 77, 1000)?;
    let model = doc.validate()?;

    let report = lower_bound(&model, &config)?;
    println!(
        "\ngenus 7 default: lower {} ({})",
        report.bound,
        report.headline_grade()
    );

    let exact_cfg = EngineConfig {
        exact_only: true,
        ..EngineConfig::default()
    };
    let exact = lower_bound(&model, &exact_cfg)?;
    println!(
        "genus 7 exact-only: lower {} ({})",
        exact.bound,
        exact.headline_grade()
    );
    assert!(exact.bound <= report.bound);
    println!("\nheuristic evidence never hides behind an exact label");

    Ok(())
}
