//! Nodal curve models over the projective line.
//!
//! Two families are supported, both presented by their normalization data:
//!
//! * irreducible: one projective line with `g` unordered pairs of pairwise
//!   distinct points; each pair is glued into a node, giving an irreducible
//!   curve of arithmetic genus `g`;
//! * binary: two projective lines with `g + 1` marked points on each side,
//!   glued pointwise in order; the result has arithmetic genus `g`.
//!
//! Points within one side must be pairwise distinct (nodes stay separate),
//! but a point on side 1 may coincide with one on side 2 since those live on
//! different lines. Genus is required to be at least 2 throughout.

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::proj_line::{MoebiusMap, ProjPoint};
use crate::{Error, Result};

/// Default bound on coordinate size for random curves.
pub const DEFAULT_HEIGHT: u64 = 1000;

/// An irreducible rational curve with `g` nodes, given by the `g` pairs of
/// points of the normalization that are glued together.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct IrreducibleNodalCurve {
    pairs: Vec<(ProjPoint, ProjPoint)>,
}

impl IrreducibleNodalCurve {
    pub fn new(pairs: Vec<(ProjPoint, ProjPoint)>) -> Result<Self> {
        let g = pairs.len();
        if g < 2 {
            return Err(Error::BadGenus(g as u32));
        }
        let mut seen: Vec<(&ProjPoint, usize)> = Vec::with_capacity(2 * g);
        for (idx, (a, b)) in pairs.iter().enumerate() {
            for p in [a, b] {
                if let Some((_, first)) = seen.iter().find(|(q, _)| *q == p) {
                    return Err(Error::InvalidCurve(format!(
                        "point {p} in pair {idx} already appears in pair {first}; \
                         all 2g points must be pairwise distinct"
                    )));
                }
                seen.push((p, idx));
            }
        }
        Ok(Self { pairs })
    }

    pub fn genus(&self) -> u32 {
        self.pairs.len() as u32
    }

    pub fn pairs(&self) -> &[(ProjPoint, ProjPoint)] {
        &self.pairs
    }

    /// All 2g normalization points in pair order.
    pub fn points(&self) -> Vec<&ProjPoint> {
        self.pairs.iter().flat_map(|(a, b)| [a, b]).collect()
    }

    /// Move the curve by a coordinate change of the line.
    pub fn transform(&self, m: &MoebiusMap) -> Result<Self> {
        let pairs = self
            .pairs
            .iter()
            .map(|(a, b)| (m.apply(a), m.apply(b)))
            .collect();
        Self::new(pairs)
    }
}

/// A binary curve: two projective lines glued at `g + 1` corresponding
/// marked points.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BinaryCurve {
    side1: Vec<ProjPoint>,
    side2: Vec<ProjPoint>,
}

impl BinaryCurve {
    pub fn new(side1: Vec<ProjPoint>, side2: Vec<ProjPoint>) -> Result<Self> {
        if side1.len() != side2.len() {
            return Err(Error::InvalidCurve(format!(
                "sides have {} and {} marked points; they must match",
                side1.len(),
                side2.len()
            )));
        }
        if side1.len() < 3 {
            return Err(Error::BadGenus(side1.len().saturating_sub(1) as u32));
        }
        for (name, side) in [("side1", &side1), ("side2", &side2)] {
            for i in 0..side.len() {
                for j in (i + 1)..side.len() {
                    if side[i] == side[j] {
                        return Err(Error::InvalidCurve(format!(
                            "{name} repeats the point {} at positions {i} and {j}",
                            side[i]
                        )));
                    }
                }
            }
        }
        Ok(Self { side1, side2 })
    }

    pub fn genus(&self) -> u32 {
        (self.side1.len() - 1) as u32
    }

    /// Number of nodes, `g + 1`.
    pub fn node_count(&self) -> usize {
        self.side1.len()
    }

    pub fn side1(&self) -> &[ProjPoint] {
        &self.side1
    }

    pub fn side2(&self) -> &[ProjPoint] {
        &self.side2
    }

    /// The glued point pairs `(side1[j], side2[j])`.
    pub fn nodes(&self) -> impl Iterator<Item = (&ProjPoint, &ProjPoint)> {
        self.side1.iter().zip(self.side2.iter())
    }

    /// Move the curve by independent coordinate changes of the two lines.
    pub fn transform(&self, m1: &MoebiusMap, m2: &MoebiusMap) -> Result<Self> {
        Self::new(
            self.side1.iter().map(|p| m1.apply(p)).collect(),
            self.side2.iter().map(|p| m2.apply(p)).collect(),
        )
    }
}

/// Either family behind one interface.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum CurveModel {
    Irreducible(IrreducibleNodalCurve),
    Binary(BinaryCurve),
}

impl CurveModel {
    pub fn genus(&self) -> u32 {
        match self {
            CurveModel::Irreducible(c) => c.genus(),
            CurveModel::Binary(c) => c.genus(),
        }
    }

    pub fn family_name(&self) -> &'static str {
        match self {
            CurveModel::Irreducible(_) => "irreducible",
            CurveModel::Binary(_) => "binary",
        }
    }

    pub fn to_document(&self) -> CurveDocument {
        match self {
            CurveModel::Irreducible(c) => CurveDocument::Irreducible {
                pairs: c
                    .pairs()
                    .iter()
                    .map(|(a, b)| [a.clone(), b.clone()])
                    .collect(),
                seed: None,
                height: None,
            },
            CurveModel::Binary(c) => CurveDocument::Binary {
                side1: c.side1().to_vec(),
                side2: c.side2().to_vec(),
                seed: None,
                height: None,
            },
        }
    }
}

/// On-disk form of a curve. The `family` tag selects the variant; `seed`
/// and `height` are optional provenance notes written by the random
/// generator and ignored by validation.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "lowercase", deny_unknown_fields)]
pub enum CurveDocument {
    Irreducible {
        pairs: Vec<[ProjPoint; 2]>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        seed: Option<u64>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        height: Option<u64>,
    },
    Binary {
        side1: Vec<ProjPoint>,
        side2: Vec<ProjPoint>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        seed: Option<u64>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        height: Option<u64>,
    },
}

impl CurveDocument {
    /// Validate the document into a usable model.
    pub fn validate(&self) -> Result<CurveModel> {
        match self {
            CurveDocument::Irreducible { pairs, .. } => {
                let pairs = pairs
                    .iter()
                    .map(|[a, b]| (a.clone(), b.clone()))
                    .collect();
                Ok(CurveModel::Irreducible(IrreducibleNodalCurve::new(pairs)?))
            }
            CurveDocument::Binary { side1, side2, .. } => Ok(CurveModel::Binary(
                BinaryCurve::new(side1.clone(), side2.clone())?,
            )),
        }
    }

    pub fn from_json(text: &str) -> Result<Self> {
        Ok(serde_json::from_str(text)?)
    }
}

// ---------------- random generation ----------------

fn random_point(rng: &mut ChaCha8Rng, height: u64) -> ProjPoint {
    let h = height as i64;
    loop {
        let a0 = rng.gen_range(-h..=h);
        let a1 = rng.gen_range(0..=h);
        if a0 != 0 || a1 != 0 {
            return ProjPoint::from_ints(a0, a1).expect("nonzero coordinates");
        }
    }
}

fn random_distinct_points(
    rng: &mut ChaCha8Rng,
    count: usize,
    height: u64,
) -> Result<Vec<ProjPoint>> {
    let mut out: Vec<ProjPoint> = Vec::with_capacity(count);
    let mut tries = 0u32;
    while out.len() < count {
        let p = random_point(rng, height);
        if out.contains(&p) {
            tries += 1;
            if tries > 10_000 {
                return Err(Error::ExhaustedRetries(format!(
                    "could not draw {count} distinct points of height <= {height}"
                )));
            }
            continue;
        }
        out.push(p);
    }
    Ok(out)
}

fn check_height(genus: u32, height: u64) -> Result<()> {
    // 2g + 2 guarantees enough room for either family's distinct points.
    let need = 2 * genus as u64 + 2;
    if height < need {
        return Err(Error::DegenerateInput(format!(
            "height {height} is too small for genus {genus}; need at least {need}"
        )));
    }
    Ok(())
}

/// Random irreducible nodal curve: 2g distinct points of bounded height,
/// paired off in draw order. Deterministic in the seed.
pub fn random_irreducible(genus: u32, seed: u64, height: u64) -> Result<IrreducibleNodalCurve> {
    if genus < 2 {
        return Err(Error::BadGenus(genus));
    }
    check_height(genus, height)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let pts = random_distinct_points(&mut rng, 2 * genus as usize, height)?;
    let pairs = pts
        .chunks(2)
        .map(|c| (c[0].clone(), c[1].clone()))
        .collect();
    IrreducibleNodalCurve::new(pairs)
}

/// Random binary curve: `g + 1` distinct points on each side, drawn
/// independently. Deterministic in the seed.
pub fn random_binary(genus: u32, seed: u64, height: u64) -> Result<BinaryCurve> {
    if genus < 2 {
        return Err(Error::BadGenus(genus));
    }
    check_height(genus, height)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let n = genus as usize + 1;
    let side1 = random_distinct_points(&mut rng, n, height)?;
    let side2 = random_distinct_points(&mut rng, n, height)?;
    BinaryCurve::new(side1, side2)
}

/// Random curve of either family with provenance recorded in the document.
pub fn random_document(
    family: &str,
    genus: u32,
    seed: u64,
    height: u64,
) -> Result<CurveDocument> {
    match family {
        "irreducible" => {
            let c = random_irreducible(genus, seed, height)?;
            Ok(CurveDocument::Irreducible {
                pairs: c
                    .pairs()
                    .iter()
                    .map(|(a, b)| [a.clone(), b.clone()])
                    .collect(),
                seed: Some(seed),
                height: Some(height),
            })
        }
        "binary" => {
            let c = random_binary(genus, seed, height)?;
            Ok(CurveDocument::Binary {
                side1: c.side1().to_vec(),
                side2: c.side2().to_vec(),
                seed: Some(seed),
                height: Some(height),
            })
        }
        other => Err(Error::DegenerateInput(format!(
            "unknown curve family {other:?}; expected \"irreducible\" or \"binary\""
        ))),
    }
}
