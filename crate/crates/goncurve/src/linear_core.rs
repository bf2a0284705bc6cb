//! Exact rational linear algebra plus the few numeric routines the solver
//! needs.
//!
//! The exact side is plain Gaussian elimination over arbitrary-precision
//! rationals with pivoting by entry height (smallest numerator/denominator
//! bit size first) to limit coefficient growth. Nullspace bases are
//! canonicalized to coprime-integer vectors with a sign rule, so identical
//! inputs always produce identical bases. The numeric side wraps SVD and LU
//! from nalgebra over complex doubles.

use nalgebra::{DMatrix, DVector, Dyn, SVD};
use num_bigint::BigInt;
use num_complex::Complex64;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::proj_line::Rational;
use crate::{Error, Result};

/// Default attempt budget for [`generic_element`].
pub const GENERIC_ATTEMPTS: u32 = 64;

/// A dense matrix of exact rationals, row major.
#[derive(Clone, Debug, PartialEq)]
pub struct RationalMatrix {
    rows: Vec<Vec<Rational>>,
    cols: usize,
}

impl RationalMatrix {
    pub fn new(rows: Vec<Vec<Rational>>) -> Result<Self> {
        let cols = rows.first().map(|r| r.len()).unwrap_or(0);
        if rows.iter().any(|r| r.len() != cols) {
            return Err(Error::BadShape("ragged rows".into()));
        }
        Ok(Self { rows, cols })
    }

    pub fn from_bigint_rows(rows: Vec<Vec<BigInt>>) -> Result<Self> {
        Self::new(
            rows.into_iter()
                .map(|r| r.into_iter().map(BigRational::from).collect())
                .collect(),
        )
    }

    pub fn nrows(&self) -> usize {
        self.rows.len()
    }

    pub fn ncols(&self) -> usize {
        self.cols
    }

    pub fn rows(&self) -> &[Vec<Rational>] {
        &self.rows
    }

    /// Convert to a complex float matrix (entries must be in f64 range after
    /// the shared scaling applied by the caller if any; here raw conversion).
    pub fn to_c64(&self) -> DMatrix<Complex64> {
        DMatrix::from_fn(self.nrows(), self.ncols(), |i, j| {
            Complex64::new(crate::util::ratio_to_f64(&self.rows[i][j]), 0.0)
        })
    }
}

/// Height proxy used for pivot selection: total bit size of the entry.
fn height(x: &Rational) -> u64 {
    x.numer().bits() + x.denom().bits()
}

/// Reduced row echelon form; returns (rref rows, pivot column indices).
fn rref(matrix: &RationalMatrix) -> (Vec<Vec<Rational>>, Vec<usize>) {
    let mut a = matrix.rows.to_vec();
    let m = a.len();
    let n = matrix.cols;
    let mut pivots = Vec::new();
    let mut row = 0usize;
    for col in 0..n {
        if row >= m {
            break;
        }
        // Choose the nonzero pivot of least height among rows row..m.
        let mut best: Option<(usize, u64)> = None;
        for (i, cand) in a.iter().enumerate().take(m).skip(row) {
            if !cand[col].is_zero() {
                let h = height(&cand[col]);
                if best.map(|(_, bh)| h < bh).unwrap_or(true) {
                    best = Some((i, h));
                }
            }
        }
        let Some((pivot_row, _)) = best else { continue };
        a.swap(row, pivot_row);
        let inv = a[row][col].recip();
        for j in col..n {
            let scaled = &a[row][j] * &inv;
            a[row][j] = scaled;
        }
        for i in 0..m {
            if i != row && !a[i][col].is_zero() {
                let factor = a[i][col].clone();
                for j in col..n {
                    let sub = &a[row][j] * &factor;
                    a[i][j] -= sub;
                }
            }
        }
        pivots.push(col);
        row += 1;
    }
    (a, pivots)
}

/// Rank of an exact rational matrix.
pub fn exact_rank(matrix: &RationalMatrix) -> usize {
    rref(matrix).1.len()
}

/// Canonicalize a rational vector to coprime integers with the first nonzero
/// entry positive. Zero vectors pass through unchanged.
pub fn canonicalize_vector(v: &[Rational]) -> Vec<Rational> {
    let mut l = BigInt::one();
    for x in v {
        l = l.lcm(x.denom());
    }
    let lr = BigRational::from(l);
    let ints: Vec<BigInt> = v.iter().map(|x| (x * &lr).to_integer()).collect();
    let mut g = BigInt::zero();
    for x in &ints {
        g = g.gcd(x);
    }
    if g.is_zero() {
        return v.to_vec();
    }
    let negate = ints
        .iter()
        .find(|x| !x.is_zero())
        .map(|x| x.is_negative())
        .unwrap_or(false);
    ints.into_iter()
        .map(|x| {
            let x = if negate { -x } else { x };
            BigRational::from(x / &g)
        })
        .collect()
}

/// Basis of the exact nullspace `{v : A v = 0}`, one canonical integer
/// vector per free column. Basis size is `ncols - rank`.
pub fn exact_nullspace(matrix: &RationalMatrix) -> Vec<Vec<Rational>> {
    let n = matrix.cols;
    let (a, pivots) = rref(matrix);
    let pivot_set: std::collections::HashSet<usize> = pivots.iter().copied().collect();
    let mut basis = Vec::new();
    for free in 0..n {
        if pivot_set.contains(&free) {
            continue;
        }
        let mut v = vec![Rational::zero(); n];
        v[free] = Rational::one();
        for (i, &p) in pivots.iter().enumerate() {
            v[p] = -a[i][free].clone();
        }
        basis.push(canonicalize_vector(&v));
    }
    basis
}

/// A seeded "generic" combination of basis vectors.
///
/// Draws small integer coefficients (never all zero), forms the combination,
/// and hands it to `reject`; on rejection the coefficient range doubles every
/// few attempts. Errors with [`Error::ExhaustedRetries`] after `attempts`
/// rejections. Deterministic in `seed`.
pub fn generic_element(
    basis: &[Vec<Rational>],
    seed: u64,
    attempts: u32,
    mut reject: impl FnMut(&[Rational]) -> bool,
) -> Result<Vec<Rational>> {
    if basis.is_empty() {
        return Err(Error::ExhaustedRetries(
            "generic element of the zero space".into(),
        ));
    }
    let n = basis[0].len();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for attempt in 0..attempts {
        let bound: i64 = 2i64 << (attempt / 8).min(14);
        let coeffs: Vec<i64> = loop {
            let c: Vec<i64> = (0..basis.len())
                .map(|_| rng.gen_range(-bound..=bound))
                .collect();
            if c.iter().any(|&x| x != 0) {
                break c;
            }
        };
        let mut v = vec![Rational::zero(); n];
        for (c, b) in coeffs.iter().zip(basis) {
            if *c == 0 {
                continue;
            }
            let cr = BigRational::from(BigInt::from(*c));
            for (slot, x) in v.iter_mut().zip(b) {
                *slot += &cr * x;
            }
        }
        if v.iter().all(|x| x.is_zero()) {
            continue;
        }
        let v = canonicalize_vector(&v);
        if !reject(&v) {
            return Ok(v);
        }
    }
    Err(Error::ExhaustedRetries(format!(
        "no acceptable generic element in {attempts} attempts"
    )))
}

// ---------------- numeric routines ----------------

/// Frobenius norm of a complex matrix.
pub fn frobenius(a: &DMatrix<Complex64>) -> f64 {
    a.iter().map(|x| x.norm_sqr()).sum::<f64>().sqrt()
}

/// Iteration cap for [`bounded_svd`]. Far above what any well-posed input
/// needs, yet finite, so a stalled decomposition fails instead of spinning.
const SVD_MAX_SWEEPS: usize = 4000;

/// SVD with finite-entry and iteration guards. nalgebra's plain `svd()`
/// iterates without bound and can fail to terminate on rare ill-scaled
/// inputs; this variant turns such stalls into [`Error::SingularSystem`] so
/// search loops can move on to the next candidate.
pub fn bounded_svd(
    a: DMatrix<Complex64>,
    compute_u: bool,
    compute_v: bool,
) -> Result<SVD<Complex64, Dyn, Dyn>> {
    if a.iter().any(|x| !x.re.is_finite() || !x.im.is_finite()) {
        return Err(Error::SingularSystem);
    }
    SVD::try_new(a, compute_u, compute_v, f64::EPSILON, SVD_MAX_SWEEPS).ok_or(Error::SingularSystem)
}

/// Orthonormal basis of the numeric nullspace: right singular vectors whose
/// singular values fall below `tol` times the largest one.
///
/// Residual guarantee: every returned `v` has `||A v|| <= 10 * tol * ||A||`.
pub fn numeric_nullspace(a: &DMatrix<Complex64>, tol: f64) -> Vec<DVector<Complex64>> {
    let (m, n) = a.shape();
    if n == 0 {
        return vec![];
    }
    // Pad with zero rows so the SVD carries a full set of right singular
    // vectors even for wide matrices.
    let work = if m < n {
        let mut p = DMatrix::zeros(n, n);
        p.view_mut((0, 0), (m, n)).copy_from(a);
        p
    } else {
        a.clone()
    };
    let Ok(svd) = bounded_svd(work, false, true) else {
        // A stalled or non-finite decomposition yields no usable directions.
        return vec![];
    };
    let v_t = svd.v_t.expect("requested v_t");
    let smax = svd.singular_values.iter().cloned().fold(0.0f64, f64::max);
    let mut basis = Vec::new();
    for i in 0..svd.singular_values.len() {
        if svd.singular_values[i] <= tol * smax || smax == 0.0 {
            basis.push(v_t.row(i).adjoint());
        }
    }
    // v_t can be min(m,n) x n; for tall matrices every direction is listed,
    // for padded wide ones as well since work is n x n.
    basis
}

/// Solve a square linear system by LU with a residual check.
///
/// Errors with [`Error::SingularSystem`] when the factorization fails or the
/// residual exceeds `1e-10 * (||A|| ||x|| + ||b||)`.
pub fn solve_linear(a: &DMatrix<Complex64>, b: &DVector<Complex64>) -> Result<DVector<Complex64>> {
    if a.nrows() != a.ncols() || a.nrows() != b.len() {
        return Err(Error::BadShape(format!(
            "solve_linear needs square A matching b: {}x{} vs {}",
            a.nrows(),
            a.ncols(),
            b.len()
        )));
    }
    let lu = a.clone().lu();
    let x = lu.solve(b).ok_or(Error::SingularSystem)?;
    let residual = (a * &x - b).norm();
    let scale = frobenius(a) * x.norm() + b.norm();
    if residual > 1e-10 * scale.max(f64::MIN_POSITIVE) {
        return Err(Error::SingularSystem);
    }
    Ok(x)
}

/// Least-squares solve via SVD (used by the Newton iteration). Singular
/// directions below `eps * smax` are dropped, which doubles as the
/// pseudoinverse for underdetermined steps.
pub fn least_squares(
    a: &DMatrix<Complex64>,
    b: &DVector<Complex64>,
    eps: f64,
) -> Result<DVector<Complex64>> {
    let svd = bounded_svd(a.clone(), true, true)?;
    let smax = svd.singular_values.iter().cloned().fold(0.0f64, f64::max);
    svd.solve(b, eps * smax.max(f64::MIN_POSITIVE))
        .map_err(|_| Error::SingularSystem)
}
