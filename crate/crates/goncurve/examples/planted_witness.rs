//! Recovery tests on instances with a known planted answer.
//!
//! Two constructions with ground truth: a binary curve whose second side is
//! a Moebius image of the first (so a degree-(1,1) structure exists by
//! design), and a linear space of antisymmetric matrices containing one
//! planted rank-2 element among random noise directions. In both cases the
//! search must find what was planted, and the verification residual says
//! how well it did.

use goncurve::engine::{binary_witness, BinaryOutcome};
use goncurve::lowrank::{find_rank_le2, verify_witness, SearchOutcome, SolverConfig};
use goncurve::oracle::{
    planted_antisym_space, planted_moebius_curve, random_planted_pencil_curve,
};
use goncurve::Result;

fn main() -> Result<()> {
    let config = SolverConfig::default();

    // Moebius-planted binary curves: the (1,1) witness must exist at every
    // genus.
    println!("planted binary curves, degree-1 map:");
    for genus in [2u32, 4, 7] {
        let (curve, _) = planted_moebius_curve(genus, 5 * genus as u64 + 1, 60)?;
        match binary_witness(&curve, 1, 1, &config)? {
            BinaryOutcome::Found(w) => {
                println!(
                    "  genus {genus}: degrees {:?}, exact {}, residual {:.2e}",
                    w.degrees, w.exact, w.residual
                );
                assert!(w.residual <= config.tol);
            }
            BinaryOutcome::NotFound { .. } => unreachable!("a witness was planted"),
        }
    }

    // Higher-degree plantings: side2 = phi(side1) guarantees a witness at
    // split (deg phi, 1), found by the exact thin-space search.
    println!("\nplanted binary curves, higher-degree map:");
    for degree in 2..=4u32 {
        let (curve, phi) = random_planted_pencil_curve(degree, 4, 3 * degree as u64, 80)?;
        match binary_witness(&curve, degree, 1, &config)? {
            BinaryOutcome::Found(w) => {
                println!(
                    "  planted degree {} (phi degree {}): degrees {:?}, exact {}, residual {:.2e}",
                    degree,
                    phi.k(),
                    w.degrees,
                    w.exact,
                    w.residual
                );
                assert!(w.residual <= config.tol);
            }
            BinaryOutcome::NotFound { .. } => unreachable!("a witness was planted"),
        }
    }

    // Planted antisymmetric spaces: rank-2 elements hide among noise
    // directions, dimension 1 + noise in an n x n antisymmetric space.
    println!("\nplanted antisymmetric spaces:");
    for (n, noise, seed) in [(4usize, 1usize, 11u64), (5, 2, 12), (6, 3, 13)] {
        let (space, _) = planted_antisym_space(n, noise, seed)?;
        match find_rank_le2(&space, &config, None)? {
            SearchOutcome::Found(w) => {
                let residual = verify_witness(&space, &w, config.tol)?;
                println!(
                    "  n={n} dim={}: found via {:?}, exact {}, residual {:.2e}",
                    space.dim(),
                    w.path,
                    w.matrix.is_exact(),
                    residual
                );
                assert!(residual <= config.tol);
            }
            SearchOutcome::NotFound { .. } => unreachable!("an element was planted"),
        }
    }

    println!("\nevery planted answer was recovered within tolerance");
    Ok(())
}
