//! Gonality bounds and pencil witnesses for rational nodal curves.
//!
//! The curves handled here are gluings of projective lines:
//!
//! * **irreducible** nodal curves: one copy of P^1 with `g` pairs of points
//!   identified (arithmetic genus `g`);
//! * **binary** curves: two copies of P^1 glued at `g + 1` point pairs
//!   (arithmetic genus `g`).
//!
//! For either family the library searches for low-degree pencils (rational
//! maps to P^1) that agree across every node. Such a system of component
//! maps descends to the glued curve, so its total degree certifies an upper
//! bound on the gonality. Degree-by-degree exclusions plus a subset analysis
//! of partial node identifications give graded lower bounds, and for generic
//! curves the two meet at `floor((g + 3) / 2)`.
//!
//! The search is exact over the rationals wherever the linear algebra allows
//! (small antisymmetric spaces, thin rectangular spaces, a quadratic trace of
//! the 4x4 case) and falls back to a seeded Newton iteration on Pfaffian or
//! minor equations otherwise. Every witness is re-verified independently of
//! how it was produced, and all randomness is seeded, so reruns are
//! bit-identical.
//!
//! Start with the runnable examples (`cargo run --example <name>`):
//!
//! * `moebius_playground`: points, Möbius maps, cross-ratios.
//! * `random_curves`: seeded curve generation and JSON round-trips.
//! * `hyperelliptic_check`: exact degree-2 decisions for both families.
//! * `witness_search`: pencil searches at a chosen degree or split.
//! * `gonality_bounds`: full upper-bound certificates.
//! * `lower_bounds`: subset-based lower-bound reports.
//! * `planted_witness`: plant a witness, then recover it.
//! * `survey`: batch statistics over seeded random curves.
//!
//! The `goncurve` binary exposes the same pipeline as subcommands
//! (`gonality`, `hyperelliptic`, `witness`, `verify`, `random`, `survey`).

pub mod cli;
pub mod curve;
pub mod engine;
mod error;
pub mod linear_core;
pub mod lowrank;
pub mod oracle;
pub mod pencil;
pub mod proj_line;
pub(crate) mod util;

pub use error::Error;

/// Crate-wide result alias.
pub type Result<T> = std::result::Result<T, Error>;
