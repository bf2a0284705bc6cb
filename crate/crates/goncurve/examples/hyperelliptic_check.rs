//! Exact degree-2 decisions for both curve families.
//!
//! A binary curve admits a degree-(1,1) structure exactly when one Moebius
//! map carries every side1 node point to its side2 partner; fitting the map
//! through three nodes and checking the rest decides this with no numerics
//! at all. For an irreducible curve the question is whether one degree-2
//! pencil identifies every glued pair, which the small antisymmetric search
//! also settles exactly.

use goncurve::curve::random_document;
use goncurve::curve::CurveModel;
use goncurve::engine::{hyperelliptic_binary, identify_pairs, IdentifyOutcome};
use goncurve::lowrank::SolverConfig;
use goncurve::oracle::planted_moebius_curve;
use goncurve::Result;

fn main() -> Result<()> {
    let config = SolverConfig::default();

    // Genus 2 irreducible: every such curve has a degree-2 map, and the
    // search exhibits one with exact rational coefficients.
    let doc = random_document("irreducible", 2, 7, 1000)?;
    if let CurveModel::Irreducible(c) = doc.validate()? {
        match identify_pairs(c.pairs(), 2, &config)? {
            IdentifyOutcome::Found(w) => {
                println!("genus 2 irreducible: degree-2 pencil found (exact: {})", w.exact);
                for (a, b) in c.pairs() {
                    assert!(w.pencil.images_match(a, b, config.tol));
                }
                println!("  both branches of every node map to the same image");
            }
            IdentifyOutcome::NotFound { .. } => unreachable!("genus 2 always has one"),
        }
    }

    // Generic genus 3 irreducible: no degree-2 pencil, and the refusal is a
    // proof, not a failed search.
    let doc = random_document("irreducible", 3, 7, 1000)?;
    if let CurveModel::Irreducible(c) = doc.validate()? {
        match identify_pairs(c.pairs(), 2, &config)? {
            IdentifyOutcome::NotFound { exact } => {
                println!("\ngenus 3 irreducible (random): no degree-2 pencil, proved: {exact}");
            }
            IdentifyOutcome::Found(_) => println!("\ngenus 3 irreducible: special curve!"),
        }
    }

    // A binary curve built from a planted Moebius map is recognized, and the
    // recovered automorphism matches the planted one on every node.
    let (curve, planted) = planted_moebius_curve(4, 99, 50)?;
    let (yes, psi) = hyperelliptic_binary(&curve)?;
    assert!(yes);
    let psi = psi.expect("witness map accompanies a positive answer");
    println!("\nplanted binary genus 4: hyperelliptic, map recovered");
    for p in curve.side1() {
        assert_eq!(psi.apply(p), planted.apply(p));
    }
    println!("  recovered map agrees with the planted one on all nodes");

    // A random binary curve of genus 3 has no reason to admit one.
    let doc = random_document("binary", 3, 7, 1000)?;
    if let CurveModel::Binary(c) = doc.validate()? {
        let (yes, _) = hyperelliptic_binary(&c)?;
        println!("\nrandom binary genus 3: hyperelliptic = {yes} (decided exactly)");
    }

    Ok(())
}
