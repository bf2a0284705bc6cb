//! Rank-2 elements of linear spaces of matrices.
//!
//! The searches in this crate all reduce to one question: given a linear
//! space `L` of matrices (antisymmetric square ones for a single projective
//! line, rectangular ones for a pair of lines), find an element of rank
//! exactly 2, or rule it out. Rank-2 antisymmetric matrices factor as
//! `u v^T - v u^T` and rank-2 rectangular ones as `x y^T - z w^T`, which is
//! exactly the shape of a pencil, so a rank-2 element is a witness.
//!
//! Fast exact paths (complete decision procedures over the rationals):
//!
//! * rectangular with `min(m, n) <= 2`: a generic element works unless the
//!   whole space sits inside the rank <= 1 locus, which is a finite exact
//!   check on polarized 2x2 minors;
//! * antisymmetric with `n <= 3`: every nonzero element has rank 2;
//! * antisymmetric with `n == 4`: rank <= 2 is the single quadratic equation
//!   `Pf(M) = 0`; restricted to a plane of the space it is a binary
//!   quadratic solved exactly (rational roots give exact witnesses,
//!   irrational ones a numeric witness with the discriminant known exactly).
//!
//! Everything else runs a seeded Gauss-Newton iteration on the 4x4
//! sub-Pfaffians (antisymmetric) or 3x3 minors (rectangular), after slicing
//! the space down to expected solution dimension zero. That path can only
//! find witnesses; a failed search is reported as such, never as a proof.

use nalgebra::{DMatrix, DVector};
use num_bigint::BigInt;
use num_complex::Complex64;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::linear_core::{
    bounded_svd, canonicalize_vector, exact_rank, generic_element, least_squares, RationalMatrix,
};
use crate::proj_line::Rational;
use crate::util::{derive_seed, ratio_to_f64};
use crate::{Error, Result};

/// Knobs for the rank-2 search. Defaults match the CLI defaults, and
/// partial config files fill missing fields from them.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct SolverConfig {
    /// Relative tolerance for numeric rank and residual decisions.
    pub tol: f64,
    /// Number of seeded Newton restarts before giving up on a space.
    pub restarts: u32,
    /// Newton iteration cap per restart.
    pub max_iter: u32,
    /// Master seed; every restart derives its own child seed.
    pub seed: u64,
}

impl Default for SolverConfig {
    fn default() -> Self {
        Self {
            tol: 1e-9,
            restarts: 200,
            max_iter: 50,
            seed: 0,
        }
    }
}

/// Dense exact matrix as plain rows (kept simple on purpose; these are tiny).
pub type ExactMatrix = Vec<Vec<Rational>>;

/// An element of a matrix space: exact rational or complex numeric.
#[derive(Clone, Debug, PartialEq)]
pub enum MatrixData {
    Exact(ExactMatrix),
    Numeric(DMatrix<Complex64>),
}

impl MatrixData {
    pub fn shape(&self) -> (usize, usize) {
        match self {
            MatrixData::Exact(rows) => (rows.len(), rows.first().map(|r| r.len()).unwrap_or(0)),
            MatrixData::Numeric(m) => m.shape(),
        }
    }

    pub fn is_exact(&self) -> bool {
        matches!(self, MatrixData::Exact(_))
    }

    /// Numeric copy (exact entries converted; no normalization).
    pub fn to_c64(&self) -> DMatrix<Complex64> {
        match self {
            MatrixData::Exact(rows) => {
                let (m, n) = self.shape();
                DMatrix::from_fn(m, n, |i, j| Complex64::new(ratio_to_f64(&rows[i][j]), 0.0))
            }
            MatrixData::Numeric(m) => m.clone(),
        }
    }
}

/// The basis of a linear space of matrices, homogeneous in exactness.
#[derive(Clone, Debug)]
pub enum SpaceBasis {
    Exact(Vec<ExactMatrix>),
    Numeric(Vec<DMatrix<Complex64>>),
}

/// A linear space of `m x n` matrices, optionally antisymmetric.
#[derive(Clone, Debug)]
pub struct LinearMatrixSpace {
    m: usize,
    n: usize,
    antisymmetric: bool,
    basis: SpaceBasis,
}

impl LinearMatrixSpace {
    pub fn exact(m: usize, n: usize, antisymmetric: bool, basis: Vec<ExactMatrix>) -> Result<Self> {
        if antisymmetric && m != n {
            return Err(Error::BadShape("antisymmetric space must be square".into()));
        }
        for b in &basis {
            if b.len() != m || b.iter().any(|r| r.len() != n) {
                return Err(Error::BadShape(format!("basis matrix is not {m} x {n}")));
            }
            if antisymmetric {
                for i in 0..n {
                    for j in 0..n {
                        if b[i][j] != -b[j][i].clone() {
                            return Err(Error::BadShape(
                                "basis matrix is not antisymmetric".into(),
                            ));
                        }
                    }
                }
            }
        }
        Ok(Self {
            m,
            n,
            antisymmetric,
            basis: SpaceBasis::Exact(basis),
        })
    }

    pub fn numeric(
        m: usize,
        n: usize,
        antisymmetric: bool,
        basis: Vec<DMatrix<Complex64>>,
    ) -> Result<Self> {
        if antisymmetric && m != n {
            return Err(Error::BadShape("antisymmetric space must be square".into()));
        }
        for b in &basis {
            if b.shape() != (m, n) {
                return Err(Error::BadShape(format!("basis matrix is not {m} x {n}")));
            }
            if antisymmetric {
                let skew = (b + b.transpose()).iter().map(|x| x.norm()).fold(0.0, f64::max);
                let scale = b.iter().map(|x| x.norm()).fold(0.0, f64::max).max(1e-300);
                if skew > 1e-9 * scale {
                    return Err(Error::BadShape("basis matrix is not antisymmetric".into()));
                }
            }
        }
        Ok(Self {
            m,
            n,
            antisymmetric,
            basis: SpaceBasis::Numeric(basis),
        })
    }

    /// Build an antisymmetric space from upper-triangle coordinate vectors
    /// in lexicographic pair order `(0,1), (0,2), ..., (n-2,n-1)`.
    pub fn antisym_from_coords(n: usize, vecs: Vec<Vec<Rational>>) -> Result<Self> {
        let pairs = upper_pairs(n);
        let mut basis = Vec::with_capacity(vecs.len());
        for v in vecs {
            if v.len() != pairs.len() {
                return Err(Error::BadShape(format!(
                    "coordinate vector has {} entries, expected {}",
                    v.len(),
                    pairs.len()
                )));
            }
            let mut mat = vec![vec![Rational::zero(); n]; n];
            for (&(i, j), x) in pairs.iter().zip(&v) {
                mat[i][j] = x.clone();
                mat[j][i] = -x.clone();
            }
            basis.push(mat);
        }
        Self::exact(n, n, true, basis)
    }

    /// Build a rectangular space from row-major flattened vectors.
    pub fn rect_from_flat(m: usize, n: usize, vecs: Vec<Vec<Rational>>) -> Result<Self> {
        let mut basis = Vec::with_capacity(vecs.len());
        for v in vecs {
            if v.len() != m * n {
                return Err(Error::BadShape(format!(
                    "flat vector has {} entries, expected {}",
                    v.len(),
                    m * n
                )));
            }
            let mat: ExactMatrix = (0..m).map(|i| v[i * n..(i + 1) * n].to_vec()).collect();
            basis.push(mat);
        }
        Self::exact(m, n, false, basis)
    }

    pub fn dim(&self) -> usize {
        match &self.basis {
            SpaceBasis::Exact(b) => b.len(),
            SpaceBasis::Numeric(b) => b.len(),
        }
    }

    pub fn shape(&self) -> (usize, usize) {
        (self.m, self.n)
    }

    pub fn is_antisymmetric(&self) -> bool {
        self.antisymmetric
    }

    pub fn basis(&self) -> &SpaceBasis {
        &self.basis
    }

    /// Exact basis matrices flattened to coordinate vectors (upper triangle
    /// for antisymmetric spaces, row-major otherwise).
    fn exact_flat_basis(&self) -> Option<Vec<Vec<Rational>>> {
        let SpaceBasis::Exact(basis) = &self.basis else {
            return None;
        };
        let flat = basis
            .iter()
            .map(|b| {
                if self.antisymmetric {
                    upper_pairs(self.n)
                        .iter()
                        .map(|&(i, j)| b[i][j].clone())
                        .collect()
                } else {
                    b.iter().flatten().cloned().collect()
                }
            })
            .collect();
        Some(flat)
    }

    /// Rebuild a matrix from one flattened element vector (the inverse of
    /// one row of [`Self::exact_flat_basis`], not basis coordinates).
    fn unflatten_exact(&self, flat: &[Rational]) -> ExactMatrix {
        if self.antisymmetric {
            let mut out = vec![vec![Rational::zero(); self.n]; self.m];
            for (&(i, j), x) in upper_pairs(self.n).iter().zip(flat) {
                out[i][j] = x.clone();
                out[j][i] = -x.clone();
            }
            out
        } else {
            (0..self.m)
                .map(|i| flat[i * self.n..(i + 1) * self.n].to_vec())
                .collect()
        }
    }

    fn exact_combination(&self, coords: &[Rational]) -> ExactMatrix {
        let SpaceBasis::Exact(basis) = &self.basis else {
            panic!("exact_combination on numeric basis");
        };
        let mut out = vec![vec![Rational::zero(); self.n]; self.m];
        for (c, b) in coords.iter().zip(basis) {
            if c.is_zero() {
                continue;
            }
            for i in 0..self.m {
                for j in 0..self.n {
                    if !b[i][j].is_zero() {
                        out[i][j] += c * &b[i][j];
                    }
                }
            }
        }
        out
    }

    /// Unit-Frobenius, mutually orthonormal numeric spanning set for the
    /// basis (Householder QR over the flattened matrices). Cleared-integer
    /// nullspace bases can be skewed by factors of 1e5 and worse, which
    /// stalls Gauss-Newton in double precision; orthonormal coordinates keep
    /// the iteration as well conditioned as the space itself allows.
    fn numeric_basis(&self) -> Vec<DMatrix<Complex64>> {
        let scaled: Vec<DMatrix<Complex64>> = match &self.basis {
            SpaceBasis::Exact(basis) => basis.iter().map(|b| exact_unit_frobenius(b)).collect(),
            SpaceBasis::Numeric(basis) => {
                basis.iter().map(|b| unit_frobenius(b.clone())).collect()
            }
        };
        let d = scaled.len();
        if d <= 1 {
            return scaled;
        }
        let (m, n) = (self.m, self.n);
        let a = DMatrix::from_fn(m * n, d, |r, c| scaled[c][(r / n, r % n)]);
        let q = a.qr().q();
        (0..d.min(q.ncols()))
            .map(|c| DMatrix::from_fn(m, n, |i, j| q[(i * n + j, c)]))
            .collect()
    }
}

/// Exact power-of-two rescale toward magnitude 1 followed by unit-Frobenius
/// normalization. Nullspace vectors are cleared to coprime integers and can
/// exceed the f64 range outright (and their squares overflow much earlier),
/// so the scale must come off before any float arithmetic touches them.
fn exact_unit_frobenius(b: &ExactMatrix) -> DMatrix<Complex64> {
    let mut max_log2 = i64::MIN;
    for row in b {
        for x in row {
            if !x.is_zero() {
                max_log2 = max_log2.max(x.numer().bits() as i64 - x.denom().bits() as i64);
            }
        }
    }
    let (m, n) = (b.len(), b.first().map(|r| r.len()).unwrap_or(0));
    if max_log2 == i64::MIN {
        return DMatrix::zeros(m, n);
    }
    let scale = if max_log2 >= 0 {
        Rational::new(BigInt::one(), BigInt::one() << max_log2 as u64)
    } else {
        Rational::new(BigInt::one() << (-max_log2) as u64, BigInt::one())
    };
    let scaled = DMatrix::from_fn(m, n, |i, j| {
        Complex64::new(ratio_to_f64(&(&b[i][j] * &scale)), 0.0)
    });
    unit_frobenius(scaled)
}

/// Normalize to unit Frobenius norm, guarding the squared sum against
/// overflow by dividing out the peak entry magnitude first.
fn unit_frobenius(mut m: DMatrix<Complex64>) -> DMatrix<Complex64> {
    let peak = m
        .iter()
        .map(|x| x.re.abs().max(x.im.abs()))
        .fold(0.0f64, f64::max);
    if !(peak.is_finite() && peak > 0.0) {
        return m;
    }
    m /= Complex64::new(peak, 0.0);
    let norm = m.iter().map(|x| x.norm_sqr()).sum::<f64>().sqrt();
    if norm > 0.0 {
        m /= Complex64::new(norm, 0.0);
    }
    m
}

fn upper_pairs(n: usize) -> Vec<(usize, usize)> {
    let mut out = Vec::with_capacity(n * (n.saturating_sub(1)) / 2);
    for i in 0..n {
        for j in (i + 1)..n {
            out.push((i, j));
        }
    }
    out
}

// ---------------- witnesses ----------------

/// Which code path produced a witness or exclusion.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SolverPath {
    /// Rectangular with a side of length <= 2: generic element.
    ThinRect,
    /// Antisymmetric n <= 3: any nonzero element.
    SmallAntisym,
    /// Antisymmetric n == 4: Pfaffian quadratic on a plane.
    PfaffianQuadratic,
    /// Seeded Gauss-Newton on sub-Pfaffians / minors.
    Newton,
}

impl SolverPath {
    /// Whether this path decides existence exactly (search-free).
    pub fn is_exact_decision(&self) -> bool {
        !matches!(self, SolverPath::Newton)
    }
}

/// Rank-2 factorization data: `u v^T - v u^T` (antisymmetric) or
/// `x y^T - z w^T` (rectangular).
#[derive(Clone, Debug, PartialEq)]
pub enum Factors {
    AntisymExact { u: Vec<Rational>, v: Vec<Rational> },
    AntisymNumeric { u: DVector<Complex64>, v: DVector<Complex64> },
    RectExact { x: Vec<Rational>, y: Vec<Rational>, z: Vec<Rational>, w: Vec<Rational> },
    RectNumeric { x: DVector<Complex64>, y: DVector<Complex64>, z: DVector<Complex64>, w: DVector<Complex64> },
}

/// A verified rank-2 element of a matrix space.
#[derive(Clone, Debug)]
pub struct Rank2Witness {
    pub matrix: MatrixData,
    pub factors: Factors,
    /// max(sigma3/sigma1, relative recomposition error); 0 for exact data.
    pub residual: f64,
    pub exact: bool,
    pub path: SolverPath,
}

/// Result of a rank-2 search.
#[derive(Clone, Debug)]
pub enum SearchOutcome {
    Found(Box<Rank2Witness>),
    /// `exact: true` means the space provably has no rank-2 element;
    /// `false` means the search budget ran out (one-sided).
    NotFound { exact: bool },
}

impl SearchOutcome {
    pub fn found(&self) -> Option<&Rank2Witness> {
        match self {
            SearchOutcome::Found(w) => Some(w),
            SearchOutcome::NotFound { .. } => None,
        }
    }
}

/// Extra filter applied to candidate witnesses before the search accepts
/// them (the gonality engine re-checks node conditions here). Rejected
/// candidates make the search continue.
pub type AcceptFn<'a> = &'a mut dyn FnMut(&Rank2Witness) -> bool;

// ---------------- factorization ----------------

fn sigma_values(m: &DMatrix<Complex64>) -> Vec<f64> {
    let Ok(svd) = bounded_svd(m.clone(), false, false) else {
        // No spectrum means the candidate cannot be certified; callers
        // treat the empty list as a rank failure.
        return vec![];
    };
    let mut s: Vec<f64> = svd.singular_values.iter().cloned().collect();
    s.sort_by(|a, b| b.partial_cmp(a).unwrap());
    s
}

/// Check rank exactly 2 and return the rank-2 residual `sigma3 / sigma1`
/// (0 when `min(m, n) == 2` or the data is exact).
pub fn verify_rank2(matrix: &MatrixData, tol: f64) -> Result<f64> {
    match matrix {
        MatrixData::Exact(rows) => {
            let rm = RationalMatrix::new(rows.clone())?;
            if exact_rank(&rm) == 2 {
                Ok(0.0)
            } else {
                Err(Error::RankMismatch)
            }
        }
        MatrixData::Numeric(m) => {
            let s = sigma_values(m);
            if s.len() < 2 || s[0] <= 0.0 {
                return Err(Error::RankMismatch);
            }
            let ratio3 = if s.len() > 2 { s[2] / s[0] } else { 0.0 };
            if s[1] / s[0] <= tol || ratio3 > tol {
                return Err(Error::RankMismatch);
            }
            Ok(ratio3)
        }
    }
}

/// Factor a rank-2 matrix. Antisymmetric matrices give `(u, v)` with
/// `M = u v^T - v u^T`; rectangular ones give `(x, y, z, w)` with
/// `M = x y^T - z w^T` via a two-step cross elimination.
pub fn factor_rank2(matrix: &MatrixData, antisymmetric: bool, tol: f64) -> Result<Factors> {
    verify_rank2(matrix, tol)?;
    match matrix {
        MatrixData::Exact(rows) => {
            if antisymmetric {
                factor_antisym_exact(rows)
            } else {
                factor_rect_exact(rows)
            }
        }
        MatrixData::Numeric(m) => {
            if antisymmetric {
                factor_antisym_numeric(m, tol)
            } else {
                factor_rect_numeric(m, tol)
            }
        }
    }
}

/// For antisymmetric rank-2 `M` and any pivot `M[p][q] != 0`,
/// `M = (M[:,p] / M[p][q]) M[:,q]^T - M[:,q] (M[:,p] / M[p][q])^T`.
fn factor_antisym_exact(rows: &ExactMatrix) -> Result<Factors> {
    let n = rows.len();
    let mut pivot = None;
    'scan: for i in 0..n {
        for j in 0..n {
            if !rows[i][j].is_zero() {
                pivot = Some((i, j));
                break 'scan;
            }
        }
    }
    let (p, q) = pivot.ok_or(Error::RankMismatch)?;
    let piv = rows[p][q].clone();
    let u: Vec<Rational> = (0..n).map(|i| &rows[i][p] / &piv).collect();
    let v: Vec<Rational> = (0..n).map(|i| rows[i][q].clone()).collect();
    // Exact recomposition check.
    for i in 0..n {
        for j in 0..n {
            let rec = &u[i] * &v[j] - &v[i] * &u[j];
            if rec != rows[i][j] {
                return Err(Error::RankMismatch);
            }
        }
    }
    Ok(Factors::AntisymExact { u, v })
}

fn factor_antisym_numeric(m: &DMatrix<Complex64>, tol: f64) -> Result<Factors> {
    let n = m.nrows();
    let mut best = (0usize, 0usize, 0.0f64);
    for i in 0..n {
        for j in 0..n {
            if m[(i, j)].norm() > best.2 {
                best = (i, j, m[(i, j)].norm());
            }
        }
    }
    if best.2 == 0.0 {
        return Err(Error::RankMismatch);
    }
    let (p, q, _) = best;
    let piv = m[(p, q)];
    let u = DVector::from_fn(n, |i, _| m[(i, p)] / piv);
    let v = DVector::from_fn(n, |i, _| m[(i, q)]);
    let rec = &u * v.transpose() - &v * u.transpose();
    let scale = m.iter().map(|x| x.norm_sqr()).sum::<f64>().sqrt();
    let err = (&rec - m).iter().map(|x| x.norm_sqr()).sum::<f64>().sqrt();
    if err > tol * scale {
        return Err(Error::RankMismatch);
    }
    Ok(Factors::AntisymNumeric { u, v })
}

fn factor_rect_exact(rows: &ExactMatrix) -> Result<Factors> {
    let m = rows.len();
    let n = rows[0].len();
    let mut r = rows.clone();
    let mut crosses: Vec<(Vec<Rational>, Vec<Rational>)> = Vec::new();
    for _step in 0..2 {
        let mut pivot = None;
        'scan: for i in 0..m {
            for j in 0..n {
                if !r[i][j].is_zero() {
                    pivot = Some((i, j));
                    break 'scan;
                }
            }
        }
        let Some((p, q)) = pivot else { break };
        let piv = r[p][q].clone();
        let col: Vec<Rational> = (0..m).map(|i| &r[i][q] / &piv).collect();
        let row: Vec<Rational> = (0..n).map(|j| r[p][j].clone()).collect();
        for i in 0..m {
            for j in 0..n {
                let sub = &col[i] * &row[j];
                r[i][j] -= sub;
            }
        }
        crosses.push((col, row));
    }
    if crosses.len() != 2 || r.iter().flatten().any(|x| !x.is_zero()) {
        return Err(Error::RankMismatch);
    }
    let (a2, b2) = crosses.pop().expect("two crosses");
    let (a1, b1) = crosses.pop().expect("two crosses");
    // M = a1 b1^T + a2 b2^T = x y^T - z w^T.
    Ok(Factors::RectExact {
        x: a1,
        y: b1,
        z: a2.iter().map(|v| -v.clone()).collect(),
        w: b2,
    })
}

fn factor_rect_numeric(mat: &DMatrix<Complex64>, tol: f64) -> Result<Factors> {
    let (m, n) = mat.shape();
    let scale = mat.iter().map(|x| x.norm_sqr()).sum::<f64>().sqrt();
    let mut r = mat.clone();
    let mut crosses: Vec<(DVector<Complex64>, DVector<Complex64>)> = Vec::new();
    for _step in 0..2 {
        let mut best = (0usize, 0usize, 0.0f64);
        for i in 0..m {
            for j in 0..n {
                if r[(i, j)].norm() > best.2 {
                    best = (i, j, r[(i, j)].norm());
                }
            }
        }
        if best.2 <= tol * scale {
            break;
        }
        let (p, q, _) = best;
        let piv = r[(p, q)];
        let col = DVector::from_fn(m, |i, _| r[(i, q)] / piv);
        let row = DVector::from_fn(n, |j, _| r[(p, j)]);
        r -= &col * row.transpose();
        crosses.push((col, row));
    }
    let rem = r.iter().map(|x| x.norm_sqr()).sum::<f64>().sqrt();
    if crosses.len() != 2 || rem > tol * scale {
        return Err(Error::RankMismatch);
    }
    let (a2, b2) = crosses.pop().expect("two crosses");
    let (a1, b1) = crosses.pop().expect("two crosses");
    Ok(Factors::RectNumeric {
        x: a1,
        y: b1,
        z: -a2,
        w: b2,
    })
}

/// Re-verify a witness independently of how it was produced: membership in
/// the span, rank exactly 2, and recomposition of the factors, all within
/// `tol`. Returns the combined relative residual.
pub fn verify_witness(
    space: &LinearMatrixSpace,
    witness: &Rank2Witness,
    tol: f64,
) -> Result<f64> {
    let (m, n) = space.shape();
    if witness.matrix.shape() != (m, n) {
        return Err(Error::BadShape("witness shape mismatch".into()));
    }
    let rank_residual = verify_rank2(&witness.matrix, tol)?;

    // Membership in span(basis): exact rank comparison when everything is
    // exact, least-squares projection residual otherwise.
    let membership_residual = match (&space.basis, &witness.matrix) {
        (SpaceBasis::Exact(basis), MatrixData::Exact(rows)) => {
            let mut stacked: Vec<Vec<Rational>> = basis
                .iter()
                .map(|b| b.iter().flatten().cloned().collect())
                .collect();
            let base_rank = exact_rank(&RationalMatrix::new(stacked.clone())?);
            stacked.push(rows.iter().flatten().cloned().collect());
            if exact_rank(&RationalMatrix::new(stacked)?) != base_rank {
                return Err(Error::RankMismatch);
            }
            0.0
        }
        _ => {
            let basis = space.numeric_basis();
            let target = witness.matrix.to_c64();
            let tnorm = target.iter().map(|x| x.norm_sqr()).sum::<f64>().sqrt();
            let d = basis.len();
            let rows = m * n;
            let a = DMatrix::from_fn(rows, d, |r, c| basis[c][(r / n, r % n)]);
            let b = DVector::from_fn(rows, |r, _| target[(r / n, r % n)]);
            let x = least_squares(&a, &b, 1e-13)?;
            let res = (&a * &x - &b).norm() / tnorm.max(f64::MIN_POSITIVE);
            if res > tol {
                return Err(Error::RankMismatch);
            }
            res
        }
    };

    // Recomposition of the stored factors against the stored matrix.
    let recomposition_residual = match (&witness.factors, &witness.matrix) {
        (Factors::AntisymExact { u, v }, MatrixData::Exact(rows)) => {
            for i in 0..n {
                for j in 0..n {
                    if &u[i] * &v[j] - &v[i] * &u[j] != rows[i][j] {
                        return Err(Error::RankMismatch);
                    }
                }
            }
            0.0
        }
        (Factors::RectExact { x, y, z, w }, MatrixData::Exact(rows)) => {
            for i in 0..m {
                for j in 0..n {
                    if &x[i] * &y[j] - &z[i] * &w[j] != rows[i][j] {
                        return Err(Error::RankMismatch);
                    }
                }
            }
            0.0
        }
        (Factors::AntisymNumeric { u, v }, MatrixData::Numeric(mat)) => {
            let rec = u * v.transpose() - v * u.transpose();
            relative_residual(&rec, mat, tol)?
        }
        (Factors::RectNumeric { x, y, z, w }, MatrixData::Numeric(mat)) => {
            let rec = x * y.transpose() - z * w.transpose();
            relative_residual(&rec, mat, tol)?
        }
        _ => return Err(Error::BadShape("factor/matrix exactness mismatch".into())),
    };

    Ok(rank_residual
        .max(membership_residual)
        .max(recomposition_residual))
}

fn relative_residual(
    rec: &DMatrix<Complex64>,
    mat: &DMatrix<Complex64>,
    tol: f64,
) -> Result<f64> {
    let scale = mat.iter().map(|x| x.norm_sqr()).sum::<f64>().sqrt();
    let err = (rec - mat).iter().map(|x| x.norm_sqr()).sum::<f64>().sqrt();
    let res = err / scale.max(f64::MIN_POSITIVE);
    if res > tol {
        return Err(Error::RankMismatch);
    }
    Ok(res)
}

// ---------------- the search ----------------

/// Find a rank-2 element of the space, or rule one out.
///
/// `accept` lets the caller impose extra conditions on candidates (rejected
/// candidates keep the search going). Deterministic in `config.seed`; with
/// the same inputs the same witness comes back bit-identical.
pub fn find_rank_le2(
    space: &LinearMatrixSpace,
    config: &SolverConfig,
    mut accept: Option<AcceptFn>,
) -> Result<SearchOutcome> {
    if space.dim() == 0 {
        return Ok(SearchOutcome::NotFound { exact: true });
    }
    let (m, n) = space.shape();
    if space.antisymmetric {
        if n <= 1 {
            return Ok(SearchOutcome::NotFound { exact: true });
        }
    } else if m.min(n) < 2 {
        return Ok(SearchOutcome::NotFound { exact: true });
    }
    match &space.basis {
        SpaceBasis::Exact(_) => {
            if !space.antisymmetric && m.min(n) == 2 {
                thin_rect_search(space, config, &mut accept)
            } else if space.antisymmetric && n <= 3 {
                small_antisym_search(space, config, &mut accept)
            } else if space.antisymmetric && n == 4 {
                pfaffian_search(space, config, &mut accept)
            } else {
                newton_search(space, config, &mut accept)
            }
        }
        SpaceBasis::Numeric(_) => newton_search(space, config, &mut accept),
    }
}

fn run_accept(accept: &mut Option<AcceptFn>, witness: &Rank2Witness) -> bool {
    match accept {
        Some(f) => f(witness),
        None => true,
    }
}

fn make_exact_witness(
    space: &LinearMatrixSpace,
    mat: ExactMatrix,
    path: SolverPath,
    tol: f64,
) -> Result<Rank2Witness> {
    let data = MatrixData::Exact(mat);
    let factors = factor_rank2(&data, space.antisymmetric, tol)?;
    Ok(Rank2Witness {
        matrix: data,
        factors,
        residual: 0.0,
        exact: true,
        path,
    })
}

/// Exact decision for rectangular spaces with a side of length 2 (wide ones
/// are transposed first). Rank 2 exists unless the whole space sits in the
/// rank <= 1 locus, which is checked exactly on polarized minors.
fn thin_rect_search(
    space: &LinearMatrixSpace,
    config: &SolverConfig,
    accept: &mut Option<AcceptFn>,
) -> Result<SearchOutcome> {
    let SpaceBasis::Exact(basis) = &space.basis else {
        unreachable!("routed only for exact bases");
    };
    let (_m, n) = space.shape();
    let transpose = n != 2;
    let rows_of = |b: &ExactMatrix| -> ExactMatrix {
        if transpose {
            let (bm, bn) = (b.len(), b[0].len());
            (0..bn)
                .map(|j| (0..bm).map(|i| b[i][j].clone()).collect())
                .collect()
        } else {
            b.clone()
        }
    };
    let thin: Vec<ExactMatrix> = basis.iter().map(rows_of).collect();
    let rows = thin[0].len();

    // All 2x2 minors vanish identically on the span? Polarize each minor:
    // minor_{ij}(sum c_s B_s) = sum_{s,t} c_s c_t phi_ij(B_s, B_t) with
    // phi_ij(A, B) = A[i][0] B[j][1] - A[i][1] B[j][0]; the quadratic form is
    // zero iff every symmetrized coefficient vanishes.
    let phi = |a: &ExactMatrix, b: &ExactMatrix, i: usize, j: usize| -> Rational {
        &a[i][0] * &b[j][1] - &a[i][1] * &b[j][0]
    };
    let mut all_rank_le1 = true;
    'minors: for i in 0..rows {
        for j in (i + 1)..rows {
            for s in 0..thin.len() {
                for t in s..thin.len() {
                    let sym = phi(&thin[s], &thin[t], i, j) + phi(&thin[t], &thin[s], i, j);
                    if !sym.is_zero() {
                        all_rank_le1 = false;
                        break 'minors;
                    }
                }
            }
        }
    }
    if all_rank_le1 {
        return Ok(SearchOutcome::NotFound { exact: true });
    }

    let flat = space.exact_flat_basis().expect("exact basis");
    let config_tol = config.tol;
    let result = generic_element(
        &flat,
        derive_seed(config.seed, 0x7417),
        crate::linear_core::GENERIC_ATTEMPTS,
        |element| {
            let mat = space.unflatten_exact(element);
            let witness = match make_exact_witness(space, mat, SolverPath::ThinRect, config_tol) {
                Ok(w) => w,
                Err(_) => return true, // rank <= 1 combination, retry
            };
            !run_accept(accept, &witness)
        },
    );
    match result {
        Ok(element) => Ok(SearchOutcome::Found(Box::new(make_exact_witness(
            space,
            space.unflatten_exact(&element),
            SolverPath::ThinRect,
            config.tol,
        )?))),
        Err(Error::ExhaustedRetries(_)) => Ok(SearchOutcome::NotFound { exact: false }),
        Err(e) => Err(e),
    }
}

/// Antisymmetric with n <= 3: every nonzero element has rank exactly 2, so
/// any generic element works.
fn small_antisym_search(
    space: &LinearMatrixSpace,
    config: &SolverConfig,
    accept: &mut Option<AcceptFn>,
) -> Result<SearchOutcome> {
    let flat = space.exact_flat_basis().expect("exact basis");
    let config_tol = config.tol;
    let result = generic_element(
        &flat,
        derive_seed(config.seed, 0x54a1),
        crate::linear_core::GENERIC_ATTEMPTS,
        |element| {
            let mat = space.unflatten_exact(element);
            let witness = match make_exact_witness(space, mat, SolverPath::SmallAntisym, config_tol)
            {
                Ok(w) => w,
                Err(_) => return true,
            };
            !run_accept(accept, &witness)
        },
    );
    match result {
        Ok(element) => Ok(SearchOutcome::Found(Box::new(make_exact_witness(
            space,
            space.unflatten_exact(&element),
            SolverPath::SmallAntisym,
            config.tol,
        )?))),
        Err(Error::ExhaustedRetries(_)) => Ok(SearchOutcome::NotFound { exact: false }),
        Err(e) => Err(e),
    }
}

/// Pfaffian of an exact antisymmetric 4x4 matrix.
fn pfaffian4(m: &ExactMatrix) -> Rational {
    &m[0][1] * &m[2][3] - &m[0][2] * &m[1][3] + &m[0][3] * &m[1][2]
}

/// Integer square root test; returns the root if `x` is a perfect square.
fn perfect_sqrt(x: &BigInt) -> Option<BigInt> {
    if x.is_negative() {
        return None;
    }
    let r = x.sqrt();
    if &(&r * &r) == x {
        Some(r)
    } else {
        None
    }
}

/// Antisymmetric n == 4: rank <= 2 is the quadric `Pf = 0`. Restricted to a
/// plane of the space that is an exactly solvable binary quadratic. Rational
/// roots give exact witnesses; otherwise the first plane's quadratic is
/// solved over the complex numbers (discriminant known exactly) for a
/// numeric witness. Existence is decided exactly in every case.
fn pfaffian_search(
    space: &LinearMatrixSpace,
    config: &SolverConfig,
    accept: &mut Option<AcceptFn>,
) -> Result<SearchOutcome> {
    let d = space.dim();
    if d == 1 {
        let one = vec![Rational::from(BigInt::from(1))];
        let mat = space.exact_combination(&one);
        if !pfaffian4(&mat).is_zero() {
            // Pf scales by the square of the scalar, so no nonzero multiple
            // of the generator lands on the quadric either.
            return Ok(SearchOutcome::NotFound { exact: true });
        }
        let witness = make_exact_witness(space, mat, SolverPath::PfaffianQuadratic, config.tol)?;
        if run_accept(accept, &witness) {
            return Ok(SearchOutcome::Found(Box::new(witness)));
        }
        return Ok(SearchOutcome::NotFound { exact: false });
    }

    // Planes to try: coordinate pairs first, then seeded random ones.
    let mut planes: Vec<(Vec<Rational>, Vec<Rational>)> = Vec::new();
    let unit = |i: usize| -> Vec<Rational> {
        let mut v = vec![Rational::zero(); d];
        v[i] = Rational::from(BigInt::from(1));
        v
    };
    for i in 0..d {
        for j in (i + 1)..d {
            planes.push((unit(i), unit(j)));
        }
    }
    let mut rng = ChaCha8Rng::seed_from_u64(derive_seed(config.seed, 0x9fa5));
    for _ in 0..8 {
        let v0: Vec<Rational> = (0..d)
            .map(|_| Rational::from(BigInt::from(rng.gen_range(-6i64..=6))))
            .collect();
        let v1: Vec<Rational> = (0..d)
            .map(|_| Rational::from(BigInt::from(rng.gen_range(-6i64..=6))))
            .collect();
        if v0.iter().any(|x| !x.is_zero()) && v1.iter().any(|x| !x.is_zero()) {
            let rm = RationalMatrix::new(vec![v0.clone(), v1.clone()])?;
            if exact_rank(&rm) == 2 {
                planes.push((v0, v1));
            }
        }
    }

    let combine = |a: &[Rational], ca: &BigInt, b: &[Rational], cb: &BigInt| -> Vec<Rational> {
        let car = BigRational::from(ca.clone());
        let cbr = BigRational::from(cb.clone());
        a.iter()
            .zip(b)
            .map(|(x, y)| &car * x + &cbr * y)
            .collect()
    };

    // First pass: hunt for a rational root on any plane.
    let mut fallback: Option<(Vec<Rational>, Vec<Rational>, BigInt, BigInt, BigInt)> = None;
    for (v0, v1) in &planes {
        let m0 = space.exact_combination(v0);
        let m1 = space.exact_combination(v1);
        let sum: Vec<Rational> = v0.iter().zip(v1).map(|(a, b)| a + b).collect();
        let ms = space.exact_combination(&sum);
        let alpha = pfaffian4(&m0);
        let gamma = pfaffian4(&m1);
        let beta = pfaffian4(&ms) - &alpha - &gamma;
        // Clear denominators: q(x0, x1) = A x0^2 + B x0 x1 + C x1^2 integer.
        let den = alpha
            .denom()
            .lcm(beta.denom())
            .lcm(gamma.denom());
        let denr = BigRational::from(den);
        let a = (&alpha * &denr).to_integer();
        let b = (&beta * &denr).to_integer();
        let c = (&gamma * &denr).to_integer();

        let mut roots: Vec<(BigInt, BigInt)> = Vec::new();
        if a.is_zero() && b.is_zero() && c.is_zero() {
            // Whole plane lies on the quadric.
            roots.push((BigInt::from(1), BigInt::from(0)));
            roots.push((BigInt::from(0), BigInt::from(1)));
            roots.push((BigInt::from(1), BigInt::from(1)));
        } else if a.is_zero() {
            // x1 (b x0 + c x1) = 0.
            roots.push((BigInt::from(1), BigInt::from(0)));
            if !b.is_zero() {
                roots.push((-c.clone(), b.clone()));
            }
        } else {
            let disc = &b * &b - BigInt::from(4) * &a * &c;
            if let Some(s) = perfect_sqrt(&disc) {
                roots.push((-&b + &s, BigInt::from(2) * &a));
                roots.push((-&b - &s, BigInt::from(2) * &a));
            } else if fallback.is_none() {
                fallback = Some((v0.clone(), v1.clone(), a.clone(), b.clone(), disc));
            }
        }
        for (r0, r1) in roots {
            if r0.is_zero() && r1.is_zero() {
                continue;
            }
            let coords = canonicalize_vector(&combine(v0, &r0, v1, &r1));
            if coords.iter().all(|x| x.is_zero()) {
                continue;
            }
            let witness = match make_exact_witness(
                space,
                space.exact_combination(&coords),
                SolverPath::PfaffianQuadratic,
                config.tol,
            ) {
                Ok(w) => w,
                Err(_) => continue,
            };
            if run_accept(accept, &witness) {
                return Ok(SearchOutcome::Found(Box::new(witness)));
            }
        }
    }

    // Second pass: complex roots of the first irrational plane quadratic.
    if let Some((v0, v1, a, b, disc)) = fallback {
        let af = crate::util::bigint_to_f64(&a);
        let bf = crate::util::bigint_to_f64(&b);
        let dq = Complex64::new(crate::util::bigint_to_f64(&disc), 0.0).sqrt();
        let nb = space.numeric_basis_raw();
        for sign in [1.0, -1.0] {
            let x0 = (Complex64::new(-bf, 0.0) + dq * sign) / Complex64::new(2.0 * af, 0.0);
            // coords = x0 * v0 + v1 in the numeric basis.
            let (m, n) = space.shape();
            let mut mat = DMatrix::<Complex64>::zeros(m, n);
            for (idx, base) in nb.iter().enumerate() {
                let c0 = Complex64::new(ratio_to_f64(&v0[idx]), 0.0);
                let c1 = Complex64::new(ratio_to_f64(&v1[idx]), 0.0);
                mat += base * (x0 * c0 + c1);
            }
            let norm = mat.iter().map(|x| x.norm_sqr()).sum::<f64>().sqrt();
            if norm == 0.0 {
                continue;
            }
            mat /= Complex64::new(norm, 0.0);
            let data = MatrixData::Numeric(mat);
            let Ok(factors) = factor_rank2(&data, true, config.tol) else {
                continue;
            };
            let residual = verify_rank2(&data, config.tol)?;
            let witness = Rank2Witness {
                matrix: data,
                factors,
                residual,
                exact: false,
                path: SolverPath::PfaffianQuadratic,
            };
            if run_accept(accept, &witness) {
                return Ok(SearchOutcome::Found(Box::new(witness)));
            }
        }
    }

    // dim >= 2 always has complex solutions; reaching here means every
    // candidate was rejected, which is a budget-style failure, not a proof.
    Ok(SearchOutcome::NotFound { exact: false })
}

impl LinearMatrixSpace {
    /// Numeric basis without per-matrix normalization (combination
    /// coefficients refer to the original exact basis).
    fn numeric_basis_raw(&self) -> Vec<DMatrix<Complex64>> {
        match &self.basis {
            SpaceBasis::Exact(basis) => basis
                .iter()
                .map(|b| MatrixData::Exact(b.clone()).to_c64())
                .collect(),
            SpaceBasis::Numeric(basis) => basis.clone(),
        }
    }
}

// ---------------- Newton path ----------------

struct EquationSystem {
    antisym: bool,
    m: usize,
    n: usize,
    /// Index subsets: 4-subsets for sub-Pfaffians, (rows, cols) 3-subsets
    /// for minors.
    pf_subsets: Vec<[usize; 4]>,
    minor_subsets: Vec<([usize; 3], [usize; 3])>,
}

impl EquationSystem {
    fn new(antisym: bool, m: usize, n: usize) -> Self {
        let mut pf_subsets = Vec::new();
        let mut minor_subsets = Vec::new();
        if antisym {
            for a in 0..n {
                for b in (a + 1)..n {
                    for c in (b + 1)..n {
                        for d in (c + 1)..n {
                            pf_subsets.push([a, b, c, d]);
                        }
                    }
                }
            }
        } else {
            let rows = subsets3(m);
            let cols = subsets3(n);
            for r in &rows {
                for c in &cols {
                    minor_subsets.push((*r, *c));
                }
            }
        }
        Self {
            antisym,
            m,
            n,
            pf_subsets,
            minor_subsets,
        }
    }

    fn count(&self) -> usize {
        if self.antisym {
            self.pf_subsets.len()
        } else {
            self.minor_subsets.len()
        }
    }

    /// Evaluate equations and Jacobian w.r.t. combination coordinates.
    fn eval(
        &self,
        mat: &DMatrix<Complex64>,
        basis: &[DMatrix<Complex64>],
        values: &mut [Complex64],
        jac: &mut DMatrix<Complex64>,
    ) {
        if self.antisym {
            for (row, s) in self.pf_subsets.iter().enumerate() {
                let [a, b, c, d] = *s;
                values[row] = mat[(a, b)] * mat[(c, d)] - mat[(a, c)] * mat[(b, d)]
                    + mat[(a, d)] * mat[(b, c)];
                for (t, bt) in basis.iter().enumerate() {
                    jac[(row, t)] = bt[(a, b)] * mat[(c, d)] + mat[(a, b)] * bt[(c, d)]
                        - bt[(a, c)] * mat[(b, d)]
                        - mat[(a, c)] * bt[(b, d)]
                        + bt[(a, d)] * mat[(b, c)]
                        + mat[(a, d)] * bt[(b, c)];
                }
            }
        } else {
            for (row, (rs, cs)) in self.minor_subsets.iter().enumerate() {
                let sub = |src: &DMatrix<Complex64>, i: usize, j: usize| src[(rs[i], cs[j])];
                let det3 = |s: &DMatrix<Complex64>| {
                    sub(s, 0, 0) * (sub(s, 1, 1) * sub(s, 2, 2) - sub(s, 1, 2) * sub(s, 2, 1))
                        - sub(s, 0, 1)
                            * (sub(s, 1, 0) * sub(s, 2, 2) - sub(s, 1, 2) * sub(s, 2, 0))
                        + sub(s, 0, 2)
                            * (sub(s, 1, 0) * sub(s, 2, 1) - sub(s, 1, 1) * sub(s, 2, 0))
                };
                values[row] = det3(mat);
                // Cofactor expansion for the derivative.
                for (t, bt) in basis.iter().enumerate() {
                    let mut acc = Complex64::new(0.0, 0.0);
                    for i in 0..3 {
                        for j in 0..3 {
                            let (i1, i2) = other_two(i);
                            let (j1, j2) = other_two(j);
                            let cof = sub(mat, i1, j1) * sub(mat, i2, j2)
                                - sub(mat, i1, j2) * sub(mat, i2, j1);
                            let sign = if (i + j) % 2 == 0 { 1.0 } else { -1.0 };
                            acc += Complex64::new(sign, 0.0) * cof * bt[(rs[i], cs[j])];
                        }
                    }
                    jac[(row, t)] = acc;
                }
            }
        }
    }

    /// Codimension of the rank <= 2 locus in the ambient matrix type.
    fn codim(&self) -> usize {
        if self.antisym {
            let n = self.n;
            if n < 5 {
                0
            } else {
                (n - 2) * (n - 3) / 2
            }
        } else {
            self.m.saturating_sub(2) * self.n.saturating_sub(2)
        }
    }
}

fn other_two(i: usize) -> (usize, usize) {
    match i {
        0 => (1, 2),
        1 => (0, 2),
        _ => (0, 1),
    }
}

fn subsets3(n: usize) -> Vec<[usize; 3]> {
    let mut out = Vec::new();
    for a in 0..n {
        for b in (a + 1)..n {
            for c in (b + 1)..n {
                out.push([a, b, c]);
            }
        }
    }
    out
}

fn random_unit_vector(rng: &mut ChaCha8Rng, d: usize) -> DVector<Complex64> {
    let mut v = DVector::from_fn(d, |_, _| {
        Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))
    });
    let norm = v.norm();
    if norm > 0.0 {
        v /= Complex64::new(norm, 0.0);
    }
    v
}

/// Seeded Gauss-Newton search for a rank-2 element in coordinates of the
/// (unit-normalized) basis. Restarts are independent and tried in seed
/// order; the first accepted witness wins.
fn newton_search(
    space: &LinearMatrixSpace,
    config: &SolverConfig,
    accept: &mut Option<AcceptFn>,
) -> Result<SearchOutcome> {
    let (m, n) = space.shape();
    let basis = space.numeric_basis();
    let d = basis.len();
    let system = EquationSystem::new(space.antisymmetric, m, n);
    let n_eq = system.count();
    if n_eq == 0 {
        // Ambient rank <= 2 everywhere (tiny shapes); a generic combination
        // plus the rank check below settles it.
        return small_numeric_search(space, config, accept);
    }
    let expected = d as i64 - system.codim() as i64;

    for restart in 0..config.restarts {
        let mut rng = ChaCha8Rng::seed_from_u64(derive_seed(config.seed, 0xae00 + restart as u64));
        // Slice down to expected solution dimension 0; odd restarts skip
        // slicing as a hedge against non-generic spaces.
        let n_slices = if restart % 2 == 0 {
            (expected - 1).max(0) as usize
        } else {
            0
        };
        let slices: Vec<DVector<Complex64>> =
            (0..n_slices).map(|_| random_unit_vector(&mut rng, d)).collect();
        let norm_vec = random_unit_vector(&mut rng, d);
        let mut c = random_unit_vector(&mut rng, d);
        let pairing = norm_vec.dotc(&c);
        if pairing.norm() < 1e-6 {
            continue;
        }
        c /= pairing;

        let rows = n_eq + n_slices + 1;
        let mut values = vec![Complex64::new(0.0, 0.0); n_eq];
        let mut jac_eq = DMatrix::<Complex64>::zeros(n_eq, d);
        let mut full_f = DVector::<Complex64>::zeros(rows);
        let mut full_j = DMatrix::<Complex64>::zeros(rows, d);

        let assemble = |c: &DVector<Complex64>,
                        values: &mut Vec<Complex64>,
                        jac_eq: &mut DMatrix<Complex64>,
                        full_f: &mut DVector<Complex64>,
                        full_j: &mut DMatrix<Complex64>| {
            let mut mat = DMatrix::<Complex64>::zeros(m, n);
            for (t, b) in basis.iter().enumerate() {
                mat += b * c[t];
            }
            system.eval(&mat, &basis, values, jac_eq);
            for r in 0..n_eq {
                full_f[r] = values[r];
                for t in 0..d {
                    full_j[(r, t)] = jac_eq[(r, t)];
                }
            }
            for (si, s) in slices.iter().enumerate() {
                let r = n_eq + si;
                full_f[r] = s.dotc(c);
                for t in 0..d {
                    full_j[(r, t)] = s[t].conj();
                }
            }
            let r = n_eq + n_slices;
            full_f[r] = norm_vec.dotc(c) - Complex64::new(1.0, 0.0);
            for t in 0..d {
                full_j[(r, t)] = norm_vec[t].conj();
            }
            mat
        };

        let mut mat = assemble(&c, &mut values, &mut jac_eq, &mut full_f, &mut full_j);
        let mut fnorm = full_f.norm();
        let mut converged = false;
        for _iter in 0..config.max_iter {
            let scale = 1.0 + c.norm_squared();
            if fnorm <= 1e-12 * scale {
                converged = true;
                break;
            }
            let Ok(delta) = least_squares(&full_j, &(-&full_f), 1e-13) else {
                break;
            };
            let mut stepped = false;
            for damp in [1.0, 0.5, 0.25, 0.125, 0.0625] {
                let cand = &c + &delta * Complex64::new(damp, 0.0);
                let cand_mat =
                    assemble(&cand, &mut values, &mut jac_eq, &mut full_f, &mut full_j);
                let cand_norm = full_f.norm();
                if cand_norm < fnorm {
                    c = cand;
                    mat = cand_mat;
                    fnorm = cand_norm;
                    stepped = true;
                    break;
                }
            }
            if !stepped {
                break;
            }
        }
        if !converged {
            let scale = 1.0 + c.norm_squared();
            if fnorm <= 1e-10 * scale {
                converged = true;
            }
        }
        if !converged {
            continue;
        }
        let norm = mat.iter().map(|x| x.norm_sqr()).sum::<f64>().sqrt();
        if norm < 1e-12 {
            continue;
        }
        let mat = mat / Complex64::new(norm, 0.0);
        let data = MatrixData::Numeric(mat);
        let Ok(sigma_res) = verify_rank2(&data, config.tol) else {
            continue;
        };
        let Ok(factors) = factor_rank2(&data, space.antisymmetric, config.tol) else {
            continue;
        };
        let witness = Rank2Witness {
            matrix: data,
            factors,
            residual: sigma_res,
            exact: false,
            path: SolverPath::Newton,
        };
        if run_accept(accept, &witness) {
            return Ok(SearchOutcome::Found(Box::new(witness)));
        }
    }
    Ok(SearchOutcome::NotFound { exact: false })
}

/// Numeric fallback for shapes whose rank <= 2 locus is the whole ambient
/// space (no equations): a random combination plus the exact-rank gate.
fn small_numeric_search(
    space: &LinearMatrixSpace,
    config: &SolverConfig,
    accept: &mut Option<AcceptFn>,
) -> Result<SearchOutcome> {
    let (m, n) = space.shape();
    let basis = space.numeric_basis();
    let d = basis.len();
    for restart in 0..config.restarts.max(1) {
        let mut rng = ChaCha8Rng::seed_from_u64(derive_seed(config.seed, 0xb700 + restart as u64));
        let c = random_unit_vector(&mut rng, d);
        let mut mat = DMatrix::<Complex64>::zeros(m, n);
        for (t, b) in basis.iter().enumerate() {
            mat += b * c[t];
        }
        let norm = mat.iter().map(|x| x.norm_sqr()).sum::<f64>().sqrt();
        if norm < 1e-12 {
            continue;
        }
        mat /= Complex64::new(norm, 0.0);
        let data = MatrixData::Numeric(mat);
        let Ok(sigma_res) = verify_rank2(&data, config.tol) else {
            continue;
        };
        let Ok(factors) = factor_rank2(&data, space.antisymmetric, config.tol) else {
            continue;
        };
        let witness = Rank2Witness {
            matrix: data,
            factors,
            residual: sigma_res,
            exact: false,
            path: SolverPath::Newton,
        };
        if run_accept(accept, &witness) {
            return Ok(SearchOutcome::Found(Box::new(witness)));
        }
    }
    Ok(SearchOutcome::NotFound { exact: false })
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_traits::One;

    fn rat(n: i64) -> Rational {
        BigRational::from(BigInt::from(n))
    }

    fn exact_mat(rows: &[&[i64]]) -> ExactMatrix {
        rows.iter()
            .map(|r| r.iter().map(|&x| rat(x)).collect())
            .collect()
    }

    /// Antisymmetric matrix u v^T - v u^T from integer vectors.
    fn wedge(u: &[i64], v: &[i64]) -> ExactMatrix {
        let n = u.len();
        (0..n)
            .map(|i| {
                (0..n)
                    .map(|j| rat(u[i] * v[j] - v[i] * u[j]))
                    .collect()
            })
            .collect()
    }

    #[test]
    fn factor_antisym_exact_round_trip() {
        let m = wedge(&[1, 2, 0, -1, 3], &[0, 1, 4, 2, 2]);
        let data = MatrixData::Exact(m.clone());
        assert_eq!(verify_rank2(&data, 1e-9).unwrap(), 0.0);
        let f = factor_rank2(&data, true, 1e-9).unwrap();
        let Factors::AntisymExact { u, v } = f else {
            panic!("expected exact antisym factors");
        };
        for i in 0..5 {
            for j in 0..5 {
                assert_eq!(&u[i] * &v[j] - &v[i] * &u[j], m[i][j]);
            }
        }
    }

    #[test]
    fn factor_rect_exact_round_trip() {
        // x y^T - z w^T with x,z in R^4, y,w in R^3.
        let x = [1i64, 0, 2, -1];
        let y = [3i64, 1, 0];
        let z = [0i64, 1, 1, 1];
        let w = [1i64, -2, 2];
        let m: ExactMatrix = (0..4)
            .map(|i| (0..3).map(|j| rat(x[i] * y[j] - z[i] * w[j])).collect())
            .collect();
        let data = MatrixData::Exact(m.clone());
        let f = factor_rank2(&data, false, 1e-9).unwrap();
        let Factors::RectExact { x, y, z, w } = f else {
            panic!("expected exact rect factors");
        };
        for i in 0..4 {
            for j in 0..3 {
                assert_eq!(&x[i] * &y[j] - &z[i] * &w[j], m[i][j]);
            }
        }
    }

    #[test]
    fn factor_rejects_wrong_rank() {
        let rank3 = exact_mat(&[&[1, 0, 0], &[0, 1, 0], &[0, 0, 1]]);
        assert!(matches!(
            factor_rank2(&MatrixData::Exact(rank3), false, 1e-9),
            Err(Error::RankMismatch)
        ));
        let rank1 = exact_mat(&[&[1, 2], &[2, 4], &[3, 6]]);
        assert!(matches!(
            factor_rank2(&MatrixData::Exact(rank1), false, 1e-9),
            Err(Error::RankMismatch)
        ));
    }

    #[test]
    fn thin_rect_finds_and_excludes() {
        // Span contains rank-2 elements.
        let b1 = exact_mat(&[&[1, 0], &[0, 1], &[0, 0]]);
        let b2 = exact_mat(&[&[0, 0], &[1, 0], &[0, 1]]);
        let space = LinearMatrixSpace::exact(3, 2, false, vec![b1, b2]).unwrap();
        let out = find_rank_le2(&space, &SolverConfig::default(), None).unwrap();
        let w = out.found().expect("rank-2 exists");
        assert!(w.exact);
        assert_eq!(w.path, SolverPath::ThinRect);
        assert_eq!(verify_witness(&space, w, 1e-9).unwrap(), 0.0);

        // Common-column span: everything rank <= 1, exact exclusion.
        let c1 = exact_mat(&[&[1, 0], &[2, 0], &[3, 0]]);
        let c2 = exact_mat(&[&[0, 1], &[0, 2], &[0, 3]]);
        let space = LinearMatrixSpace::exact(3, 2, false, vec![c1, c2]).unwrap();
        match find_rank_le2(&space, &SolverConfig::default(), None).unwrap() {
            SearchOutcome::NotFound { exact } => assert!(exact),
            SearchOutcome::Found(_) => panic!("no rank-2 element exists"),
        }
    }

    #[test]
    fn wide_thin_rect_is_transposed_internally() {
        let b1 = exact_mat(&[&[1, 0, 0], &[0, 1, 0]]);
        let b2 = exact_mat(&[&[0, 1, 0], &[0, 0, 1]]);
        let space = LinearMatrixSpace::exact(2, 3, false, vec![b1, b2]).unwrap();
        let out = find_rank_le2(&space, &SolverConfig::default(), None).unwrap();
        let w = out.found().expect("rank-2 exists");
        assert_eq!(verify_witness(&space, w, 1e-9).unwrap(), 0.0);
    }

    #[test]
    fn small_antisym_any_nonzero_works() {
        let b = wedge(&[1, 0, 2], &[0, 1, -1]);
        let space = LinearMatrixSpace::exact(3, 3, true, vec![b]).unwrap();
        let out = find_rank_le2(&space, &SolverConfig::default(), None).unwrap();
        let w = out.found().expect("nonzero antisym 3x3 has rank 2");
        assert!(w.exact);
        assert_eq!(w.path, SolverPath::SmallAntisym);
    }

    #[test]
    fn pfaffian_dim1_cases() {
        // Rank-4 generator: exact exclusion.
        let full = {
            let mut m = wedge(&[1, 0, 0, 0], &[0, 1, 0, 0]);
            let m2 = wedge(&[0, 0, 1, 0], &[0, 0, 0, 1]);
            for i in 0..4 {
                for j in 0..4 {
                    let add = m2[i][j].clone();
                    m[i][j] += add;
                }
            }
            m
        };
        let space = LinearMatrixSpace::exact(4, 4, true, vec![full]).unwrap();
        match find_rank_le2(&space, &SolverConfig::default(), None).unwrap() {
            SearchOutcome::NotFound { exact } => assert!(exact),
            SearchOutcome::Found(_) => panic!("generator has nonzero Pfaffian"),
        }

        // Rank-2 generator: exact witness.
        let b = wedge(&[2, -1, 0, 3], &[1, 1, 1, 1]);
        let space = LinearMatrixSpace::exact(4, 4, true, vec![b]).unwrap();
        let w = find_rank_le2(&space, &SolverConfig::default(), None)
            .unwrap();
        let w = w.found().expect("generator is rank 2");
        assert!(w.exact);
        assert_eq!(w.path, SolverPath::PfaffianQuadratic);
    }

    #[test]
    fn pfaffian_rational_root_gives_exact_witness() {
        // Pf(x B1 + y B2) = x^2 - y^2: rational roots x = +-y.
        let b1 = {
            let mut m = wedge(&[1, 0, 0, 0], &[0, 1, 0, 0]);
            let m2 = wedge(&[0, 0, 1, 0], &[0, 0, 0, 1]);
            for i in 0..4 {
                for j in 0..4 {
                    let add = m2[i][j].clone();
                    m[i][j] += add;
                }
            }
            m
        };
        let b2 = {
            let mut m = wedge(&[1, 0, 0, 0], &[0, 0, 1, 0]);
            let m2 = wedge(&[0, 1, 0, 0], &[0, 0, 0, 1]);
            for i in 0..4 {
                for j in 0..4 {
                    let add = m2[i][j].clone();
                    m[i][j] += add;
                }
            }
            m
        };
        let space = LinearMatrixSpace::exact(4, 4, true, vec![b1, b2]).unwrap();
        let out = find_rank_le2(&space, &SolverConfig::default(), None).unwrap();
        let w = out.found().expect("rational root exists");
        assert!(w.exact);
        assert_eq!(w.path, SolverPath::PfaffianQuadratic);
        assert_eq!(verify_witness(&space, w, 1e-9).unwrap(), 0.0);
    }

    #[test]
    fn pfaffian_irrational_root_falls_back_to_numeric() {
        // Pf(x B1 + y B2) = x^2 + y^2: only complex roots.
        let b1 = {
            let mut m = wedge(&[1, 0, 0, 0], &[0, 1, 0, 0]);
            let m2 = wedge(&[0, 0, 1, 0], &[0, 0, 0, 1]);
            for i in 0..4 {
                for j in 0..4 {
                    let add = m2[i][j].clone();
                    m[i][j] += add;
                }
            }
            m
        };
        let b2 = {
            // e0^e2 - e1^e3 has Pf = -m02 m13 = -(1)(-1) = 1; cross term 0.
            let mut m = wedge(&[1, 0, 0, 0], &[0, 0, 1, 0]);
            let m2 = wedge(&[0, 1, 0, 0], &[0, 0, 0, -1]);
            for i in 0..4 {
                for j in 0..4 {
                    let add = m2[i][j].clone();
                    m[i][j] += add;
                }
            }
            m
        };
        let space = LinearMatrixSpace::exact(4, 4, true, vec![b1, b2]).unwrap();
        let out = find_rank_le2(&space, &SolverConfig::default(), None).unwrap();
        let w = out.found().expect("complex roots always exist in dim 2");
        assert!(!w.exact);
        assert_eq!(w.path, SolverPath::PfaffianQuadratic);
        assert!(w.residual <= 1e-9);
        assert!(verify_witness(&space, w, 1e-9).unwrap() <= 1e-9);
    }

    #[test]
    fn newton_recovers_planted_antisym() {
        // 5x5 antisymmetric, dim-4 space: one planted rank-2 element plus
        // three generic rank-4 noise directions.
        let planted = wedge(&[1, 2, -1, 0, 1], &[0, 1, 1, -2, 1]);
        let noise = |a: &[i64; 5], b: &[i64; 5], c: &[i64; 5], d: &[i64; 5]| {
            let mut m = wedge(a, b);
            let m2 = wedge(c, d);
            for i in 0..5 {
                for j in 0..5 {
                    let add = m2[i][j].clone();
                    m[i][j] += add;
                }
            }
            m
        };
        let n1 = noise(&[1, 0, 0, 1, 0], &[0, 1, 0, 0, 2], &[1, 1, 0, 0, 0], &[0, 0, 1, 1, 1]);
        let n2 = noise(&[2, 1, 0, 0, 1], &[1, 0, 1, 0, 0], &[0, 1, 1, 1, 0], &[1, 0, 0, 2, 1]);
        let n3 = noise(&[1, 1, 1, 0, 0], &[0, 0, 1, 1, 2], &[2, 0, 1, 0, 1], &[0, 1, 0, 1, 0]);
        let space =
            LinearMatrixSpace::exact(5, 5, true, vec![planted, n1, n2, n3]).unwrap();
        let config = SolverConfig::default();
        let out = find_rank_le2(&space, &config, None).unwrap();
        let w = out.found().expect("planted rank-2 element is recoverable");
        assert_eq!(w.path, SolverPath::Newton);
        assert!(w.residual <= 1e-9, "residual {}", w.residual);
        assert!(verify_witness(&space, w, 1e-9).unwrap() <= 1e-9);

        // Determinism: the exact same witness comes back on a rerun.
        let out2 = find_rank_le2(&space, &config, None).unwrap();
        let w2 = out2.found().unwrap();
        assert_eq!(w.matrix, w2.matrix);
    }

    #[test]
    fn newton_recovers_planted_rect() {
        // 4x3, dim-3 space with a planted rank-2 element.
        let x = [1i64, 0, 2, -1];
        let y = [3i64, 1, 0];
        let z = [0i64, 1, 1, 1];
        let w = [1i64, -2, 2];
        let planted: ExactMatrix = (0..4)
            .map(|i| (0..3).map(|j| rat(x[i] * y[j] - z[i] * w[j])).collect())
            .collect();
        let n1 = exact_mat(&[&[1, 0, 1], &[0, 1, 0], &[1, 1, 0], &[0, 0, 1]]);
        let n2 = exact_mat(&[&[0, 1, 0], &[1, 0, 1], &[0, 1, 1], &[1, 0, 0]]);
        let space = LinearMatrixSpace::exact(4, 3, false, vec![planted, n1, n2]).unwrap();
        let out = find_rank_le2(&space, &SolverConfig::default(), None).unwrap();
        let w = out.found().expect("planted rank-2 element is recoverable");
        assert!(w.residual <= 1e-9);
        assert!(verify_witness(&space, w, 1e-9).unwrap() <= 1e-9);
    }

    #[test]
    fn newton_exhausts_on_generic_empty_space() {
        // Two generic rank-4 antisymmetric 5x5 directions: expected solution
        // dimension 2 - 3 < 0, no rank-2 element in the generic span.
        let noise = |a: &[i64; 5], b: &[i64; 5], c: &[i64; 5], d: &[i64; 5]| {
            let mut m = wedge(a, b);
            let m2 = wedge(c, d);
            for i in 0..5 {
                for j in 0..5 {
                    let add = m2[i][j].clone();
                    m[i][j] += add;
                }
            }
            m
        };
        let n1 = noise(&[1, 0, 0, 1, 0], &[0, 1, 0, 0, 2], &[1, 1, 0, 0, 0], &[0, 0, 1, 1, 1]);
        let n2 = noise(&[2, 1, 0, 0, 1], &[1, 0, 1, 0, 0], &[0, 1, 1, 1, 0], &[1, 0, 0, 2, 1]);
        let space = LinearMatrixSpace::exact(5, 5, true, vec![n1, n2]).unwrap();
        let config = SolverConfig {
            restarts: 40,
            ..SolverConfig::default()
        };
        match find_rank_le2(&space, &config, None).unwrap() {
            SearchOutcome::NotFound { exact } => assert!(!exact),
            SearchOutcome::Found(w) => {
                panic!("unexpected witness with residual {}", w.residual)
            }
        }
    }

    #[test]
    fn accept_closure_keeps_searching() {
        // Whole 3x3 antisymmetric space; reject the first candidate and make
        // sure a different one is produced next.
        let e01 = wedge(&[1, 0, 0], &[0, 1, 0]);
        let e02 = wedge(&[1, 0, 0], &[0, 0, 1]);
        let e12 = wedge(&[0, 1, 0], &[0, 0, 1]);
        let space = LinearMatrixSpace::exact(3, 3, true, vec![e01, e02, e12]).unwrap();
        let mut first: Option<MatrixData> = None;
        let mut seen = 0u32;
        let mut closure = |w: &Rank2Witness| {
            seen += 1;
            if seen == 1 {
                first = Some(w.matrix.clone());
                false
            } else {
                true
            }
        };
        let out = find_rank_le2(&space, &SolverConfig::default(), Some(&mut closure)).unwrap();
        let w = out.found().expect("space full of rank-2 elements");
        assert!(seen >= 2);
        assert_ne!(Some(w.matrix.clone()), first);
    }

    #[test]
    fn zero_space_is_exact_notfound() {
        let space = LinearMatrixSpace::exact(4, 4, true, vec![]).unwrap();
        match find_rank_le2(&space, &SolverConfig::default(), None).unwrap() {
            SearchOutcome::NotFound { exact } => assert!(exact),
            SearchOutcome::Found(_) => panic!("empty space"),
        }
    }

    #[test]
    fn antisym_validation() {
        let not_antisym = exact_mat(&[&[0, 1], &[1, 0]]);
        assert!(LinearMatrixSpace::exact(2, 2, true, vec![not_antisym]).is_err());
        let mut ok = exact_mat(&[&[0, 1], &[-1, 0]]);
        ok[0][0] = rat(0);
        assert!(LinearMatrixSpace::exact(2, 2, true, vec![ok]).is_ok());
    }

    #[test]
    fn coordinate_construction_round_trip() {
        let coords = vec![rat(1), rat(0), rat(2), rat(-1), rat(0), rat(3)];
        let space = LinearMatrixSpace::antisym_from_coords(4, vec![coords.clone()]).unwrap();
        let SpaceBasis::Exact(basis) = space.basis() else {
            panic!()
        };
        let b = &basis[0];
        assert_eq!(b[0][1], rat(1));
        assert_eq!(b[1][0], rat(-1));
        assert_eq!(b[0][3], rat(2));
        assert_eq!(b[1][2], rat(-1));
        assert_eq!(b[2][3], rat(3));
        let flat = space.exact_flat_basis().unwrap();
        assert_eq!(flat[0], coords);
        assert!(BigRational::one().is_one());
    }
}
