//! Independent cross-checks for the pencil machinery and the degree search.
//!
//! Everything in this module is deliberately written from scratch: its own
//! Gaussian elimination, its own monomial evaluation, its own products of
//! linear forms. None of it calls the solver, the search engine, or the
//! shared linear algebra, so a bug would have to appear identically on both
//! routes to slip through a comparison.
//!
//! Three kinds of checks live here:
//!
//! * `vanish_pole_pencil` builds a pencil with prescribed zeros and poles by
//!   multiplying linear forms directly, giving known images to test
//!   evaluation against;
//! * `identify_verdict` / `exact_min_identify_degree` decide, exactly and
//!   without searching, whether the node-pair constraints admit a rank-2
//!   antisymmetric solution at a given degree (complete for degree <= 3);
//! * the `planted_*` generators produce inputs with a known certificate
//!   baked in, for recovery tests.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::curve::BinaryCurve;
use crate::lowrank::{ExactMatrix, LinearMatrixSpace};
use crate::pencil::Pencil;
use crate::proj_line::{MoebiusMap, ProjPoint, Rational};
use crate::{Error, Result};

// ---------------- self-contained exact elimination ----------------

/// Plain Gaussian elimination to reduced row echelon form; returns the
/// pivot columns. First-nonzero pivoting, nothing clever.
fn rref(rows: &mut Vec<Vec<BigRational>>, cols: usize) -> Vec<usize> {
    let mut pivots = Vec::new();
    let mut row = 0;
    for col in 0..cols {
        let Some(pr) = (row..rows.len()).find(|&r| !rows[r][col].is_zero()) else {
            continue;
        };
        rows.swap(row, pr);
        let inv = rows[row][col].recip();
        for x in rows[row].iter_mut() {
            *x *= &inv;
        }
        for r in 0..rows.len() {
            if r != row && !rows[r][col].is_zero() {
                let factor = rows[r][col].clone();
                for c in 0..cols {
                    let sub = &factor * &rows[row][c];
                    rows[r][c] -= sub;
                }
            }
        }
        pivots.push(col);
        row += 1;
        if row == rows.len() {
            break;
        }
    }
    pivots
}

/// Nullspace basis of the row system, one vector per free column.
fn nullspace(mut rows: Vec<Vec<BigRational>>, cols: usize) -> Vec<Vec<BigRational>> {
    let pivots = rref(&mut rows, cols);
    let mut basis = Vec::new();
    for free in 0..cols {
        if pivots.contains(&free) {
            continue;
        }
        let mut v = vec![BigRational::zero(); cols];
        v[free] = BigRational::one();
        for (r, &pc) in pivots.iter().enumerate() {
            v[pc] = -rows[r][free].clone();
        }
        basis.push(v);
    }
    basis
}

/// Monomial vector `(a0^k, a0^(k-1) a1, ..., a1^k)` built by repeated
/// multiplication, not shared with the pencil code.
fn monomials(p: &ProjPoint, k: u32) -> Vec<BigInt> {
    let k = k as usize;
    let mut out = Vec::with_capacity(k + 1);
    for j in 0..=k {
        let mut x = BigInt::one();
        for _ in 0..(k - j) {
            x *= p.a0();
        }
        for _ in 0..j {
            x *= p.a1();
        }
        out.push(x);
    }
    out
}

fn find_duplicate(points: &[&ProjPoint]) -> Option<(usize, usize)> {
    for i in 0..points.len() {
        for j in (i + 1)..points.len() {
            if points[i] == points[j] {
                return Some((i, j));
            }
        }
    }
    None
}

// ---------------- prescribed zeros and poles ----------------

/// Pencil whose first row vanishes exactly at `zeros` and second row exactly
/// at `poles`, built as products of linear forms. Every zero maps to `[0:1]`
/// and every pole to `[1:0]`, which makes the images easy to test.
pub fn vanish_pole_pencil(zeros: &[ProjPoint], poles: &[ProjPoint]) -> Result<Pencil> {
    if zeros.is_empty() || zeros.len() != poles.len() {
        return Err(Error::DegenerateInput(format!(
            "need equally many zeros and poles, got {} and {}",
            zeros.len(),
            poles.len()
        )));
    }
    let combined: Vec<&ProjPoint> = zeros.iter().chain(poles.iter()).collect();
    if let Some((i, j)) = find_duplicate(&combined) {
        return Err(Error::DegenerateInput(format!(
            "zero/pole lists share the point {} (positions {i} and {j}); \
             the rows would have a common root",
            combined[i]
        )));
    }
    // The linear form vanishing at [p0:p1] is p1 x0 - p0 x1; multiply the
    // coefficient sequences by hand.
    let product = |points: &[ProjPoint]| -> Vec<BigInt> {
        let mut acc = vec![BigInt::one()];
        for p in points {
            let lin = [p.a1().clone(), -p.a0().clone()];
            let mut next = vec![BigInt::zero(); acc.len() + 1];
            for (i, a) in acc.iter().enumerate() {
                for (j, l) in lin.iter().enumerate() {
                    next[i + j] += a * l;
                }
            }
            acc = next;
        }
        acc
    };
    Pencil::exact_from_bigints(product(zeros), product(poles))
}

// ---------------- exact identification verdicts ----------------

/// Outcome of the exact existence analysis at one degree.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum DegreeVerdict {
    Exists,
    Empty,
    Undecided,
}

fn validate_pairs(pairs: &[(ProjPoint, ProjPoint)]) -> Result<()> {
    if pairs.is_empty() {
        return Err(Error::DegenerateInput("no pairs to identify".into()));
    }
    let flat: Vec<&ProjPoint> = pairs.iter().flat_map(|(a, b)| [a, b]).collect();
    if let Some((i, j)) = find_duplicate(&flat) {
        return Err(Error::DegenerateInput(format!(
            "pair points must be pairwise distinct; position {i} repeats {} at {j}",
            flat[i]
        )));
    }
    Ok(())
}

/// Whether a Moebius involution sends each `p_i` to `q_i`. This settles the
/// degree-2 question: a degree-2 map of the line is a quotient by a unique
/// involution, and it identifies exactly the orbits. For pairwise-distinct
/// pairs this agrees with the rank-2 formulation (a common factor of the
/// pencil rows would need a root inside two disjoint pairs at once).
fn involution_verdict(pairs: &[(ProjPoint, ProjPoint)]) -> DegreeVerdict {
    // Unknown matrix (a, b, c, d); each pair demands that [a p0 + b p1 :
    // c p0 + d p1] be proportional to q, one linear equation; an involution
    // additionally has trace zero.
    let mut rows: Vec<Vec<BigRational>> = Vec::with_capacity(pairs.len() + 1);
    for (p, q) in pairs {
        let (p0, p1) = (p.a0(), p.a1());
        let (q0, q1) = (q.a0(), q.a1());
        rows.push(vec![
            BigRational::from(-(q1 * p0)),
            BigRational::from(-(q1 * p1)),
            BigRational::from(q0 * p0),
            BigRational::from(q0 * p1),
        ]);
    }
    rows.push(vec![
        BigRational::one(),
        BigRational::zero(),
        BigRational::zero(),
        BigRational::one(),
    ]);
    let basis = nullspace(rows, 4);
    if basis.is_empty() {
        return DegreeVerdict::Empty;
    }
    // Need an invertible element: det = ad - bc is a quadratic form on the
    // solution space; it vanishes identically iff every polarized
    // coefficient does.
    let det_pol = |w: &[BigRational], x: &[BigRational]| -> BigRational {
        &w[0] * &x[3] + &x[0] * &w[3] - &w[1] * &x[2] - &x[1] * &w[2]
    };
    for s in 0..basis.len() {
        for t in s..basis.len() {
            if !det_pol(&basis[s], &basis[t]).is_zero() {
                return DegreeVerdict::Exists;
            }
        }
    }
    DegreeVerdict::Empty
}

/// Pfaffian of a 4x4 antisymmetric matrix given by its upper coordinates
/// in the order `(01, 02, 03, 12, 13, 23)`.
fn pfaffian_coords(c: &[BigRational]) -> BigRational {
    &c[0] * &c[5] - &c[1] * &c[4] + &c[2] * &c[3]
}

/// Exact existence verdict for a degree-`k` identification of the pairs:
/// does the constraint system admit a rank-2 antisymmetric solution?
///
/// Complete for `k <= 3` (and `Empty` is always trustworthy). For larger
/// degrees the dimension count decides the clear cases and everything in
/// between is `Undecided`.
pub fn identify_verdict(pairs: &[(ProjPoint, ProjPoint)], k: u32) -> Result<DegreeVerdict> {
    if k == 0 {
        return Err(Error::DegenerateInput("degree must be at least 1".into()));
    }
    validate_pairs(pairs)?;
    if k == 2 {
        return Ok(involution_verdict(pairs));
    }

    let n = (k + 1) as usize;
    let coords = n * (n - 1) / 2;
    let mut rows: Vec<Vec<BigRational>> = Vec::with_capacity(pairs.len());
    for (p, q) in pairs {
        let ep = monomials(p, k);
        let eq = monomials(q, k);
        let mut row = Vec::with_capacity(coords);
        for u in 0..n {
            for v in (u + 1)..n {
                row.push(BigRational::from(&ep[u] * &eq[v] - &ep[v] * &eq[u]));
            }
        }
        rows.push(row);
    }
    let basis = nullspace(rows, coords);
    let d = basis.len();
    if d == 0 {
        return Ok(DegreeVerdict::Empty);
    }
    // The rank <= 2 locus has codimension (n-2)(n-3)/2 among antisymmetric
    // n x n matrices; a projective linear section of dimension at least the
    // codimension always meets it.
    let codim = if n <= 3 { 0 } else { (n - 2) * (n - 3) / 2 };
    if d >= codim + 1 {
        return Ok(DegreeVerdict::Exists);
    }
    if n == 4 && d == 1 {
        // One line in coordinate space: on the Pfaffian quadric or not.
        return Ok(if pfaffian_coords(&basis[0]).is_zero() {
            DegreeVerdict::Exists
        } else {
            DegreeVerdict::Empty
        });
    }
    Ok(DegreeVerdict::Undecided)
}

/// Verdicts for all degrees `1..=max_k`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MinDegreeScan {
    pub verdicts: Vec<DegreeVerdict>,
}

impl MinDegreeScan {
    /// Smallest degree with a positive verdict, if any.
    pub fn min_exists(&self) -> Option<u32> {
        self.verdicts
            .iter()
            .position(|v| *v == DegreeVerdict::Exists)
            .map(|i| i as u32 + 1)
    }

    /// The minimum degree when the scan decides it outright: the first
    /// `Exists` with only `Empty` below it.
    pub fn decided_min(&self) -> Option<u32> {
        let k = self.min_exists()?;
        let all_empty_below = self.verdicts[..(k - 1) as usize]
            .iter()
            .all(|v| *v == DegreeVerdict::Empty);
        all_empty_below.then_some(k)
    }
}

pub fn exact_min_identify_degree(
    pairs: &[(ProjPoint, ProjPoint)],
    max_k: u32,
) -> Result<MinDegreeScan> {
    let verdicts = (1..=max_k)
        .map(|k| identify_verdict(pairs, k))
        .collect::<Result<Vec<_>>>()?;
    Ok(MinDegreeScan { verdicts })
}

// ---------------- planted instances ----------------

fn random_point(rng: &mut ChaCha8Rng, height: i64) -> ProjPoint {
    loop {
        let a0 = rng.gen_range(-height..=height);
        let a1 = rng.gen_range(0..=height);
        if a0 != 0 || a1 != 0 {
            return ProjPoint::from_ints(a0, a1).expect("nonzero");
        }
    }
}

/// Binary curve built to admit a degree-2 structure: the second side is a
/// single Moebius image of the first. The planted map is returned so tests
/// can check it is recovered exactly.
pub fn planted_moebius_curve(
    genus: u32,
    seed: u64,
    height: u64,
) -> Result<(BinaryCurve, MoebiusMap)> {
    if genus < 2 {
        return Err(Error::BadGenus(genus));
    }
    let h = height.max(2 * genus as u64 + 2) as i64;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let n = genus as usize + 1;
    let mut side1: Vec<ProjPoint> = Vec::with_capacity(n);
    let mut guard = 0;
    while side1.len() < n {
        let p = random_point(&mut rng, h);
        if side1.contains(&p) {
            guard += 1;
            if guard > 10_000 {
                return Err(Error::ExhaustedRetries(
                    "planted curve point sampling".into(),
                ));
            }
            continue;
        }
        side1.push(p);
    }
    let map = loop {
        let e: Vec<BigInt> = (0..4).map(|_| BigInt::from(rng.gen_range(-9i64..=9))).collect();
        if let Ok(m) = MoebiusMap::from_bigints([
            e[0].clone(),
            e[1].clone(),
            e[2].clone(),
            e[3].clone(),
        ]) {
            break m;
        }
    };
    let side2 = side1.iter().map(|p| map.apply(p)).collect();
    Ok((BinaryCurve::new(side1, side2)?, map))
}

/// Binary curve whose second side is the image of the first under an
/// arbitrary exact pencil: `side2[j] = phi(side1[j])`. By construction the
/// curve carries the witness pair `(phi, identity)`, so a split
/// `(deg phi, 1)` structure exists whatever the genus.
pub fn planted_pencil_curve(phi: &Pencil, side1: Vec<ProjPoint>) -> Result<BinaryCurve> {
    let side2 = side1
        .iter()
        .map(|p| phi.evaluate(p))
        .collect::<Result<Vec<_>>>()?;
    for i in 0..side2.len() {
        for j in (i + 1)..side2.len() {
            if side2[i] == side2[j] {
                return Err(Error::DegenerateInput(format!(
                    "images of {} and {} coincide; pick other points",
                    side1[i], side1[j]
                )));
            }
        }
    }
    BinaryCurve::new(side1, side2)
}

/// Seeded wrapper around [`planted_pencil_curve`]: draws an exact pencil of
/// the requested effective degree and then node points whose images stay
/// distinct, retrying draws that collide (a degree-d map is d-to-1).
pub fn random_planted_pencil_curve(
    degree: u32,
    genus: u32,
    seed: u64,
    height: u64,
) -> Result<(BinaryCurve, Pencil)> {
    if genus < 2 {
        return Err(Error::BadGenus(genus));
    }
    if degree == 0 {
        return Err(Error::DegenerateInput("planting needs degree >= 1".into()));
    }
    let h = height.max(2 * genus as u64 + 2) as i64;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let phi = loop {
        let row = |rng: &mut ChaCha8Rng| -> Vec<BigInt> {
            (0..=degree as usize)
                .map(|_| BigInt::from(rng.gen_range(-9i64..=9)))
                .collect()
        };
        let (f, g) = (row(&mut rng), row(&mut rng));
        let Ok(p) = Pencil::exact_from_bigints(f, g) else {
            continue;
        };
        // Coprime rows keep the full degree and leave no base points.
        if p.reduce()?.k() == degree as usize {
            break p;
        }
    };
    let n = genus as usize + 1;
    let mut side1: Vec<ProjPoint> = Vec::with_capacity(n);
    let mut images: Vec<ProjPoint> = Vec::with_capacity(n);
    let mut guard = 0;
    while side1.len() < n {
        guard += 1;
        if guard > 10_000 {
            return Err(Error::ExhaustedRetries(
                "planted curve point sampling".into(),
            ));
        }
        let p = random_point(&mut rng, h);
        if side1.contains(&p) {
            continue;
        }
        let image = phi.evaluate(&p)?;
        if images.contains(&image) {
            continue;
        }
        side1.push(p);
        images.push(image);
    }
    let curve = planted_pencil_curve(&phi, side1)?;
    Ok((curve, phi))
}

/// Antisymmetric `n x n` space of dimension `1 + noise_dims` containing a
/// planted rank-2 element, returned alongside the space. Basis independence
/// is verified with the module's own elimination.
pub fn planted_antisym_space(
    n: usize,
    noise_dims: usize,
    seed: u64,
) -> Result<(LinearMatrixSpace, ExactMatrix)> {
    if n < 4 {
        return Err(Error::BadShape(
            "planting needs n >= 4 to leave room for noise".into(),
        ));
    }
    let coords = n * (n - 1) / 2;
    if 1 + noise_dims > coords {
        return Err(Error::BadShape(format!(
            "dimension {} exceeds the {} antisymmetric coordinates",
            1 + noise_dims,
            coords
        )));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for _attempt in 0..64 {
        let draw = |rng: &mut ChaCha8Rng| -> Vec<i64> {
            (0..n).map(|_| rng.gen_range(-5i64..=5)).collect()
        };
        let u = draw(&mut rng);
        let v = draw(&mut rng);
        let planted: ExactMatrix = (0..n)
            .map(|i| {
                (0..n)
                    .map(|j| BigRational::from(BigInt::from(u[i] * v[j] - v[i] * u[j])))
                    .collect()
            })
            .collect();
        if planted.iter().flatten().all(|x| x.is_zero()) {
            continue;
        }
        let upper = |m: &ExactMatrix| -> Vec<BigRational> {
            let mut out = Vec::with_capacity(coords);
            for i in 0..n {
                for j in (i + 1)..n {
                    out.push(m[i][j].clone());
                }
            }
            out
        };
        let mut flat: Vec<Vec<BigRational>> = vec![upper(&planted)];
        let mut mats: Vec<ExactMatrix> = vec![planted.clone()];
        for _ in 0..noise_dims {
            let mut m = vec![vec![Rational::zero(); n]; n];
            for i in 0..n {
                for j in (i + 1)..n {
                    let x = BigRational::from(BigInt::from(rng.gen_range(-5i64..=5)));
                    m[i][j] = x.clone();
                    m[j][i] = -x;
                }
            }
            flat.push(upper(&m));
            mats.push(m);
        }
        let mut check = flat.clone();
        if rref(&mut check, coords).len() != mats.len() {
            continue;
        }
        let space = LinearMatrixSpace::exact(n, n, true, mats)?;
        return Ok((space, planted));
    }
    Err(Error::ExhaustedRetries("planting an antisymmetric space".into()))
}

/// Rectangular `m x n` analogue of `planted_antisym_space`.
pub fn planted_rect_space(
    m: usize,
    n: usize,
    noise_dims: usize,
    seed: u64,
) -> Result<(LinearMatrixSpace, ExactMatrix)> {
    if m < 3 || n < 3 {
        return Err(Error::BadShape(
            "planting needs both sides >= 3; thinner shapes are trivial".into(),
        ));
    }
    if 1 + noise_dims > m * n {
        return Err(Error::BadShape("dimension exceeds the ambient space".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for _attempt in 0..64 {
        let col = |rng: &mut ChaCha8Rng, len: usize| -> Vec<i64> {
            (0..len).map(|_| rng.gen_range(-5i64..=5)).collect()
        };
        let (x, y) = (col(&mut rng, m), col(&mut rng, n));
        let (z, w) = (col(&mut rng, m), col(&mut rng, n));
        let planted: ExactMatrix = (0..m)
            .map(|i| {
                (0..n)
                    .map(|j| BigRational::from(BigInt::from(x[i] * y[j] - z[i] * w[j])))
                    .collect()
            })
            .collect();
        // Want rank exactly 2, not a degenerate draw.
        let mut probe: Vec<Vec<BigRational>> = planted.clone();
        if rref(&mut probe, n).len() != 2 {
            continue;
        }
        let mut flat: Vec<Vec<BigRational>> =
            vec![planted.iter().flatten().cloned().collect()];
        let mut mats: Vec<ExactMatrix> = vec![planted.clone()];
        for _ in 0..noise_dims {
            let mat: ExactMatrix = (0..m)
                .map(|_| {
                    (0..n)
                        .map(|_| BigRational::from(BigInt::from(rng.gen_range(-5i64..=5))))
                        .collect()
                })
                .collect();
            flat.push(mat.iter().flatten().cloned().collect());
            mats.push(mat);
        }
        let mut check = flat.clone();
        if rref(&mut check, m * n).len() != mats.len() {
            continue;
        }
        let space = LinearMatrixSpace::exact(m, n, false, mats)?;
        return Ok((space, planted));
    }
    Err(Error::ExhaustedRetries("planting a rectangular space".into()))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn pt(n: i64, d: i64) -> ProjPoint {
        ProjPoint::from_ints(n, d).unwrap()
    }

    #[test]
    fn vanish_pole_images() {
        let zeros = vec![pt(0, 1), pt(1, 1)];
        let poles = vec![pt(2, 1), pt(1, 0)];
        let pencil = vanish_pole_pencil(&zeros, &poles).unwrap();
        assert_eq!(pencil.k(), 2);
        for z in &zeros {
            assert_eq!(pencil.evaluate(z).unwrap(), ProjPoint::zero());
        }
        for p in &poles {
            assert_eq!(pencil.evaluate(p).unwrap(), ProjPoint::infinity());
        }
        // A bystander lands on neither end.
        let img = pencil.evaluate(&pt(5, 1)).unwrap();
        assert_ne!(img, ProjPoint::zero());
        assert_ne!(img, ProjPoint::infinity());

        // Overlapping groups are rejected.
        assert!(vanish_pole_pencil(&zeros, &[pt(0, 1), pt(3, 1)]).is_err());
    }

    #[test]
    fn degree_one_never_identifies() {
        let pairs = vec![(pt(0, 1), pt(3, 1))];
        assert_eq!(identify_verdict(&pairs, 1).unwrap(), DegreeVerdict::Empty);
    }

    #[test]
    fn single_pair_identified_in_degree_two() {
        for pair in [
            (pt(0, 1), pt(1, 0)),
            (pt(2, 1), pt(-7, 3)),
            (pt(1, 1), pt(5, 1)),
        ] {
            assert_eq!(
                identify_verdict(&[pair], 2).unwrap(),
                DegreeVerdict::Exists
            );
        }
    }

    #[test]
    fn involution_pattern_detected() {
        // z -> -z identifies (1,-1) and (2,-2); adding (3,-3) stays
        // consistent, while (3,4) breaks the pattern.
        let good = vec![(pt(1, 1), pt(-1, 1)), (pt(2, 1), pt(-2, 1)), (pt(3, 1), pt(-3, 1))];
        assert_eq!(identify_verdict(&good, 2).unwrap(), DegreeVerdict::Exists);
        let bad = vec![(pt(1, 1), pt(-1, 1)), (pt(2, 1), pt(-2, 1)), (pt(3, 1), pt(4, 1))];
        assert_eq!(identify_verdict(&bad, 2).unwrap(), DegreeVerdict::Empty);
    }

    #[test]
    fn degree_three_dimension_cases() {
        // Two pairs: 6 coordinates minus 2 constraints leaves dimension 4,
        // far above the codimension, so a witness exists.
        let two = vec![(pt(0, 1), pt(1, 1)), (pt(2, 1), pt(3, 1))];
        assert_eq!(identify_verdict(&two, 3).unwrap(), DegreeVerdict::Exists);

        // Generic five pairs leave a single line with nonzero Pfaffian.
        let five = vec![
            (pt(0, 1), pt(1, 1)),
            (pt(2, 1), pt(3, 1)),
            (pt(4, 1), pt(5, 1)),
            (pt(6, 1), pt(7, 1)),
            (pt(8, 1), pt(9, 1)),
        ];
        assert_eq!(identify_verdict(&five, 3).unwrap(), DegreeVerdict::Empty);

        // Six generic pairs kill the space entirely.
        let six: Vec<_> = (0..6)
            .map(|i| (pt(2 * i, 1), pt(2 * i + 1, 1)))
            .collect();
        assert_eq!(identify_verdict(&six, 3).unwrap(), DegreeVerdict::Empty);
    }

    #[test]
    fn undecided_band_at_higher_degree() {
        // Degree 4, seven generic pairs: dimension 3 sits strictly between
        // zero and codimension + 1 = 4, which the dimension count cannot
        // settle.
        let seven: Vec<_> = (0..7)
            .map(|i| (pt(3 * i + 1, 1), pt(3 * i + 2, 1)))
            .collect();
        assert_eq!(
            identify_verdict(&seven, 4).unwrap(),
            DegreeVerdict::Undecided
        );
    }

    #[test]
    fn min_degree_scan_reports_first_exists() {
        let pairs = vec![(pt(1, 1), pt(-1, 1)), (pt(2, 1), pt(-2, 1))];
        let scan = exact_min_identify_degree(&pairs, 3).unwrap();
        assert_eq!(scan.verdicts[0], DegreeVerdict::Empty);
        assert_eq!(scan.verdicts[1], DegreeVerdict::Exists);
        assert_eq!(scan.min_exists(), Some(2));
        assert_eq!(scan.decided_min(), Some(2));
    }

    #[test]
    fn repeated_points_rejected() {
        let pairs = vec![(pt(0, 1), pt(1, 1)), (pt(1, 1), pt(2, 1))];
        assert!(identify_verdict(&pairs, 2).is_err());
    }

    #[test]
    fn planted_binary_matches_its_map() {
        for seed in [0u64, 1, 17] {
            let (curve, map) = planted_moebius_curve(4, seed, 1000).unwrap();
            assert_eq!(curve.genus(), 4);
            for (p, q) in curve.nodes() {
                assert_eq!(&map.apply(p), q);
            }
            // Deterministic per seed.
            let (curve2, map2) = planted_moebius_curve(4, seed, 1000).unwrap();
            assert_eq!(curve, curve2);
            assert_eq!(map.entries(), map2.entries());
        }
    }

    #[test]
    fn planted_pencil_curve_squares_example() {
        // phi = z^2 on the points 0..4 gives the squares on the other side.
        let phi = Pencil::exact_from_ints(&[1, 0, 0], &[0, 0, 1]).unwrap();
        let side1: Vec<ProjPoint> = (0..5).map(ProjPoint::affine_int).collect();
        let curve = planted_pencil_curve(&phi, side1).unwrap();
        let expected: Vec<ProjPoint> =
            [0i64, 1, 4, 9, 16].iter().map(|&n| ProjPoint::affine_int(n)).collect();
        assert_eq!(curve.side2(), expected.as_slice());
    }

    #[test]
    fn planted_pencil_curve_rejects_colliding_images() {
        // z^2 sends 2 and -2 to the same point.
        let phi = Pencil::exact_from_ints(&[1, 0, 0], &[0, 0, 1]).unwrap();
        let side1 = vec![
            ProjPoint::affine_int(2),
            ProjPoint::affine_int(-2),
            ProjPoint::affine_int(1),
        ];
        assert!(planted_pencil_curve(&phi, side1).is_err());
    }

    #[test]
    fn random_planted_pencil_curve_keeps_degree_and_determinism() {
        for degree in 1..=4u32 {
            let (curve, phi) = random_planted_pencil_curve(degree, 3, 11, 60).unwrap();
            assert_eq!(curve.genus(), 3);
            assert_eq!(phi.k(), degree as usize);
            assert_eq!(phi.reduce().unwrap().k(), degree as usize);
            for (p, q) in curve.nodes() {
                assert_eq!(&phi.evaluate(p).unwrap(), q);
            }
            let (curve2, phi2) = random_planted_pencil_curve(degree, 3, 11, 60).unwrap();
            assert_eq!(curve, curve2);
            assert_eq!(phi.exact_rows(), phi2.exact_rows());
        }
    }

    #[test]
    fn planted_antisym_space_contains_its_element() {
        let (space, planted) = planted_antisym_space(5, 3, 7).unwrap();
        assert_eq!(space.dim(), 4);
        assert!(space.is_antisymmetric());
        // The planted element really is rank 2.
        let mut probe = planted.clone();
        assert_eq!(super::rref(&mut probe, 5).len(), 2);
    }

    #[test]
    fn planted_rect_space_contains_its_element() {
        let (space, planted) = planted_rect_space(4, 3, 2, 11).unwrap();
        assert_eq!(space.dim(), 3);
        assert_eq!(space.shape(), (4, 3));
        let mut probe = planted.clone();
        assert_eq!(super::rref(&mut probe, 3).len(), 2);
    }

    #[test]
    fn local_elimination_basics() {
        // rref and nullspace agree with hand calculations on a 2x3 system.
        let rows = vec![
            vec![
                BigRational::from(BigInt::from(1)),
                BigRational::from(BigInt::from(2)),
                BigRational::from(BigInt::from(3)),
            ],
            vec![
                BigRational::from(BigInt::from(2)),
                BigRational::from(BigInt::from(4)),
                BigRational::from(BigInt::from(7)),
            ],
        ];
        let ns = nullspace(rows, 3);
        assert_eq!(ns.len(), 1);
        // Kernel direction is (-2, 1, 0).
        assert_eq!(ns[0][0], BigRational::from(BigInt::from(-2)));
        assert_eq!(ns[0][1], BigRational::from(BigInt::from(1)));
        assert!(ns[0][2].is_zero());
    }
}
