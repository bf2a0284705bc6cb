//! Points on the projective line and the maps that move them around.
//!
//! Shows the exact coordinate layer everything else is built on: parsing
//! points from shorthand, fitting the unique Moebius map through three
//! prescribed point pairs, composing and inverting maps, and checking that
//! the cross-ratio of four points never moves under any of it.

use goncurve::proj_line::{cross_ratio, MoebiusMap, ProjPoint};
use goncurve::Result;

fn main() -> Result<()> {
    // Points accept affine shorthand ("3", "-5/2"), "inf", and raw pairs.
    let p = ProjPoint::parse("3")?;
    let q = ProjPoint::parse("-5/2")?;
    let r = ProjPoint::parse("inf")?;
    let s = ProjPoint::parse("0")?;
    println!("four points: {p}, {q}, {r}, {s}");

    // Exactly one Moebius map sends any three distinct points to any other
    // three. Fit the one with 3 -> 0, -5/2 -> 1, inf -> inf.
    let m = MoebiusMap::from_three_pairs(
        [&p, &q, &r],
        [&ProjPoint::zero(), &ProjPoint::one(), &ProjPoint::infinity()],
    )?;
    println!("\nfitted map entries (row major): {:?}", m.entries());
    for source in [&p, &q, &r, &s] {
        println!("  {source} -> {}", m.apply(source));
    }

    // Composition with the inverse gives back the identity action.
    let round_trip = m.inverse().compose(&m);
    assert_eq!(round_trip.apply(&s), s);
    println!("\ninverse . map fixes {s}: confirmed");

    // The cross-ratio is a complete invariant of four ordered points.
    let before = cross_ratio(&p, &q, &r, &s)?;
    let after = cross_ratio(&m.apply(&p), &m.apply(&q), &m.apply(&r), &m.apply(&s))?;
    println!("\ncross-ratio before: {before}");
    println!("cross-ratio after:  {after}");
    assert_eq!(before, after);
    println!("invariant under the map: confirmed");

    Ok(())
}
