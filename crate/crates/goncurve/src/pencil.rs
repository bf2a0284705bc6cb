//! Degree-`k` pencils: rational maps `P^1 -> P^1` given by a pair of binary
//! forms.
//!
//! A pencil stores two coefficient rows `f` and `g` of length `k + 1` in the
//! monomial order of [`ProjPoint::eval_vector`], so row `v` represents the
//! form `sum_j v[j] * x0^(k-j) * x1^j`. The map sends `p` to
//! `[<f, e(p)> : <g, e(p)>]`; in the affine chart `z = a0/a1` that is the
//! rational function `f/g`. Exact pencils keep a canonical joint-integer
//! form (content 1, first nonzero coefficient positive) so equal maps with
//! equal degree data compare equal. Numeric pencils are normalized to unit
//! Frobenius norm with a fixed phase so serialization is bit-stable.

use std::fmt;

use num_bigint::BigInt;
use num_complex::Complex64;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use serde::de::{self, Deserializer};
use serde::ser::{SerializeStruct, Serializer};
use serde::{Deserialize, Serialize};

use crate::proj_line::{ProjPoint, Rational};
use crate::util::bigint_to_f64;
use crate::{Error, Result};

/// Default relative tolerance for numeric image comparisons.
pub const DEFAULT_TOL: f64 = 1e-9;

/// Coefficient storage: exact canonical integers or normalized complex.
#[derive(Clone, Debug, PartialEq)]
pub enum PencilCoeffs {
    Exact { f: Vec<BigInt>, g: Vec<BigInt> },
    Numeric { f: Vec<Complex64>, g: Vec<Complex64> },
}

/// A non-constant degree-`k` pencil.
#[derive(Clone, Debug, PartialEq)]
pub struct Pencil {
    k: usize,
    coeffs: PencilCoeffs,
}

impl Pencil {
    /// Build an exact pencil from rational coefficient rows.
    ///
    /// Rejects proportional rows with [`Error::DegeneratePencil`] (the map
    /// would be constant) and mismatched or empty rows with
    /// [`Error::BadShape`].
    pub fn exact(f: Vec<Rational>, g: Vec<Rational>) -> Result<Self> {
        if f.is_empty() || f.len() != g.len() {
            return Err(Error::BadShape(format!(
                "coefficient rows must be equal nonempty length, got {} and {}",
                f.len(),
                g.len()
            )));
        }
        // Joint scaling: common denominator, then content, then sign.
        let mut l = BigInt::one();
        for x in f.iter().chain(g.iter()) {
            l = l.lcm(x.denom());
        }
        let lr = BigRational::from(l);
        let fi: Vec<BigInt> = f.iter().map(|x| (x * &lr).to_integer()).collect();
        let gi: Vec<BigInt> = g.iter().map(|x| (x * &lr).to_integer()).collect();
        Self::exact_from_bigints(fi, gi)
    }

    /// Build an exact pencil from integer coefficient rows.
    pub fn exact_from_bigints(f: Vec<BigInt>, g: Vec<BigInt>) -> Result<Self> {
        if f.is_empty() || f.len() != g.len() {
            return Err(Error::BadShape(format!(
                "coefficient rows must be equal nonempty length, got {} and {}",
                f.len(),
                g.len()
            )));
        }
        let k = f.len() - 1;
        if rows_proportional(&f, &g) {
            return Err(Error::DegeneratePencil);
        }
        let mut content = BigInt::zero();
        for x in f.iter().chain(g.iter()) {
            content = content.gcd(x);
        }
        let mut f: Vec<BigInt> = f.iter().map(|x| x / &content).collect();
        let mut g: Vec<BigInt> = g.iter().map(|x| x / &content).collect();
        let lead_negative = f
            .iter()
            .chain(g.iter())
            .find(|x| !x.is_zero())
            .map(|x| x.is_negative())
            .unwrap_or(false);
        if lead_negative {
            for x in f.iter_mut().chain(g.iter_mut()) {
                *x = -std::mem::take(x);
            }
        }
        Ok(Self {
            k,
            coeffs: PencilCoeffs::Exact { f, g },
        })
    }

    /// Convenience constructor from machine integers.
    pub fn exact_from_ints(f: &[i64], g: &[i64]) -> Result<Self> {
        Self::exact_from_bigints(
            f.iter().map(|&x| BigInt::from(x)).collect(),
            g.iter().map(|&x| BigInt::from(x)).collect(),
        )
    }

    /// Build a numeric pencil. Rows are rejected as degenerate when the
    /// smaller singular value of the 2 x (k+1) coefficient matrix is below
    /// `tol` times the larger one.
    pub fn numeric(f: Vec<Complex64>, g: Vec<Complex64>, tol: f64) -> Result<Self> {
        if f.is_empty() || f.len() != g.len() {
            return Err(Error::BadShape(format!(
                "coefficient rows must be equal nonempty length, got {} and {}",
                f.len(),
                g.len()
            )));
        }
        let k = f.len() - 1;
        let (s1, s2) = two_row_singular_values(&f, &g);
        if !(s1 > 0.0) || s2 <= tol * s1 {
            return Err(Error::DegeneratePencil);
        }
        let (f, g) = normalize_rows(f, g);
        Ok(Self {
            k,
            coeffs: PencilCoeffs::Numeric { f, g },
        })
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn is_numeric(&self) -> bool {
        matches!(self.coeffs, PencilCoeffs::Numeric { .. })
    }

    pub fn coeffs(&self) -> &PencilCoeffs {
        &self.coeffs
    }

    /// Exact coefficient rows, when this pencil is exact.
    pub fn exact_rows(&self) -> Option<(&[BigInt], &[BigInt])> {
        match &self.coeffs {
            PencilCoeffs::Exact { f, g } => Some((f, g)),
            PencilCoeffs::Numeric { .. } => None,
        }
    }

    /// Coefficient rows as complex vectors (exact rows are converted and
    /// jointly normalized like a numeric pencil).
    pub fn rows_c64(&self) -> (Vec<Complex64>, Vec<Complex64>) {
        match &self.coeffs {
            PencilCoeffs::Exact { f, g } => {
                let fc: Vec<Complex64> = f
                    .iter()
                    .map(|x| Complex64::new(bigint_to_f64(x), 0.0))
                    .collect();
                let gc: Vec<Complex64> = g
                    .iter()
                    .map(|x| Complex64::new(bigint_to_f64(x), 0.0))
                    .collect();
                normalize_rows(fc, gc)
            }
            PencilCoeffs::Numeric { f, g } => (f.clone(), g.clone()),
        }
    }

    /// Numeric copy of this pencil.
    pub fn to_numeric(&self) -> Result<Pencil> {
        let (f, g) = self.rows_c64();
        Pencil::numeric(f, g, 1e-14)
    }

    /// Evaluate an exact pencil at a point.
    ///
    /// Errors with [`Error::BasePoint`] when both forms vanish at `p`, and
    /// with [`Error::BadShape`] when called on a numeric pencil (use
    /// [`Pencil::evaluate_c64`] there).
    pub fn evaluate(&self, p: &ProjPoint) -> Result<ProjPoint> {
        let (f, g) = self
            .exact_rows()
            .ok_or_else(|| Error::BadShape("evaluate needs an exact pencil".into()))?;
        let e = p.eval_vector(self.k);
        let fv: BigInt = f.iter().zip(&e).map(|(c, m)| c * m).sum();
        let gv: BigInt = g.iter().zip(&e).map(|(c, m)| c * m).sum();
        if fv.is_zero() && gv.is_zero() {
            return Err(Error::BasePoint);
        }
        ProjPoint::from_bigints(fv, gv)
    }

    /// Evaluate (exact or numeric) as a complex homogeneous pair.
    ///
    /// Errors with [`Error::BasePoint`] when both values are below
    /// `tol * ||e(p)||` with the rows at unit norm.
    pub fn evaluate_c64(&self, p: &ProjPoint, tol: f64) -> Result<(Complex64, Complex64)> {
        let (f, g) = self.rows_c64();
        let e = p.eval_vector_f64(self.k);
        let scale = e.iter().map(|x| x * x).sum::<f64>().sqrt();
        let fv: Complex64 = f.iter().zip(&e).map(|(c, m)| c * m).sum();
        let gv: Complex64 = g.iter().zip(&e).map(|(c, m)| c * m).sum();
        if fv.norm() <= tol * scale && gv.norm() <= tol * scale {
            return Err(Error::BasePoint);
        }
        Ok((fv, gv))
    }

    /// Whether `p` and `q` have equal images: the bracket
    /// `f(p) g(q) - f(q) g(p)` vanishes. Exact pencils decide exactly;
    /// numeric ones require [`Self::node_residual`] within `tol`.
    pub fn images_match(&self, p: &ProjPoint, q: &ProjPoint, tol: f64) -> bool {
        match &self.coeffs {
            PencilCoeffs::Exact { f, g } => {
                let ep = p.eval_vector(self.k);
                let eq = q.eval_vector(self.k);
                let fp: BigInt = f.iter().zip(&ep).map(|(c, m)| c * m).sum();
                let gp: BigInt = g.iter().zip(&ep).map(|(c, m)| c * m).sum();
                let fq: BigInt = f.iter().zip(&eq).map(|(c, m)| c * m).sum();
                let gq: BigInt = g.iter().zip(&eq).map(|(c, m)| c * m).sum();
                (&fp * &gq - &fq * &gp).is_zero()
            }
            PencilCoeffs::Numeric { .. } => self.node_residual(p, q, tol) <= tol,
        }
    }

    /// Size of the image bracket `f(p) g(q) - f(q) g(p)` relative to the
    /// coefficient and evaluation scales: the backward error of the
    /// statement "p and q share an image". Exactly matching exact pencils
    /// give 0; a (numerical) base point at either input gives infinity,
    /// since the map has no image there to compare.
    pub fn node_residual(&self, p: &ProjPoint, q: &ProjPoint, tol: f64) -> f64 {
        if !self.is_numeric() {
            return match (self.evaluate(p), self.evaluate(q)) {
                (Ok(a), Ok(b)) if a == b => 0.0,
                (Err(_), _) | (_, Err(_)) => f64::INFINITY,
                _ => self.node_residual_f64(p, q, tol),
            };
        }
        self.node_residual_f64(p, q, tol)
    }

    fn node_residual_f64(&self, p: &ProjPoint, q: &ProjPoint, tol: f64) -> f64 {
        let (f, g) = self.rows_c64();
        let norm = |row: &[Complex64]| {
            row.iter()
                .map(|x| x.norm_sqr())
                .sum::<f64>()
                .sqrt()
                .max(f64::MIN_POSITIVE)
        };
        let (nf, ng) = (norm(&f), norm(&g));
        let ep = p.eval_vector_f64(self.k);
        let eq = q.eval_vector_f64(self.k);
        let np = ep.iter().map(|x| x * x).sum::<f64>().sqrt();
        let nq = eq.iter().map(|x| x * x).sum::<f64>().sqrt();
        let pair = |e: &[f64]| -> (Complex64, Complex64) {
            (
                f.iter().zip(e).map(|(c, m)| c * m).sum(),
                g.iter().zip(e).map(|(c, m)| c * m).sum(),
            )
        };
        let (fp, gp) = pair(&ep);
        let (fq, gq) = pair(&eq);
        // No image to compare at a numerical base point.
        if fp.norm() <= tol * nf * np && gp.norm() <= tol * ng * np {
            return f64::INFINITY;
        }
        if fq.norm() <= tol * nf * nq && gq.norm() <= tol * ng * nq {
            return f64::INFINITY;
        }
        (fp * gq - fq * gp).norm() / (nf * ng * np * nq).max(f64::MIN_POSITIVE)
    }

    /// Remove the common factor of the two forms (exact pencils only).
    /// The result has degree `k - deg(gcd)`, the effective degree of the map.
    pub fn reduce(&self) -> Result<Pencil> {
        let (f, g) = self
            .exact_rows()
            .ok_or_else(|| Error::BadShape("reduce needs an exact pencil".into()))?;
        let (pf, mf) = form_to_poly(f);
        let (pg, mg) = form_to_poly(g);
        let d = poly_gcd(&pf, &pg);
        let m = mf.min(mg);
        let drop = (d.len() - 1) + m;
        if drop == 0 {
            return Ok(self.clone());
        }
        let qf = poly_div_exact(&pf, &d);
        let qg = poly_div_exact(&pg, &d);
        let k_new = self.k - drop;
        let fv = poly_to_form(&qf, mf - m, k_new);
        let gv = poly_to_form(&qg, mg - m, k_new);
        Pencil::exact(fv, gv)
    }

    /// Precompose with a Möbius map: the resulting pencil sends `p` to
    /// `self(m(p))`. Degree is unchanged.
    pub fn precompose_moebius(&self, m: &crate::proj_line::MoebiusMap) -> Pencil {
        match &self.coeffs {
            PencilCoeffs::Exact { f, g } => {
                let e = m.entries();
                let fi = substitute_linear(f, &e[0], &e[1], &e[2], &e[3]);
                let gi = substitute_linear(g, &e[0], &e[1], &e[2], &e[3]);
                Pencil::exact_from_bigints(fi, gi)
                    .expect("precomposition with invertible map preserves independence")
            }
            PencilCoeffs::Numeric { f, g } => {
                let e = m.entries_f64().map(|x| Complex64::new(x, 0.0));
                let fi = substitute_linear_c(f, e[0], e[1], e[2], e[3]);
                let gi = substitute_linear_c(g, e[0], e[1], e[2], e[3]);
                Pencil::numeric(fi, gi, 1e-14)
                    .expect("precomposition with invertible map preserves independence")
            }
        }
    }

    /// Postcompose with a Möbius map: the coefficient rows are combined by
    /// the matrix, so the new map sends `p` to `m(self(p))`.
    pub fn postcompose_moebius(&self, m: &crate::proj_line::MoebiusMap) -> Pencil {
        match &self.coeffs {
            PencilCoeffs::Exact { f, g } => {
                let e = m.entries();
                let nf: Vec<BigInt> = f
                    .iter()
                    .zip(g)
                    .map(|(fc, gc)| &e[0] * fc + &e[1] * gc)
                    .collect();
                let ng: Vec<BigInt> = f
                    .iter()
                    .zip(g)
                    .map(|(fc, gc)| &e[2] * fc + &e[3] * gc)
                    .collect();
                Pencil::exact_from_bigints(nf, ng)
                    .expect("postcomposition with invertible map preserves independence")
            }
            PencilCoeffs::Numeric { f, g } => {
                let e = m.entries_f64().map(|x| Complex64::new(x, 0.0));
                let nf: Vec<Complex64> = f.iter().zip(g).map(|(fc, gc)| e[0] * fc + e[1] * gc).collect();
                let ng: Vec<Complex64> = f.iter().zip(g).map(|(fc, gc)| e[2] * fc + e[3] * gc).collect();
                Pencil::numeric(nf, ng, 1e-14)
                    .expect("postcomposition with invertible map preserves independence")
            }
        }
    }
}

impl fmt::Display for Pencil {
    fn fmt(&self, fm: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.coeffs {
            PencilCoeffs::Exact { f, g } => {
                let fs: Vec<String> = f.iter().map(|x| x.to_string()).collect();
                let gs: Vec<String> = g.iter().map(|x| x.to_string()).collect();
                write!(fm, "k={} f=({}) g=({})", self.k, fs.join(","), gs.join(","))
            }
            PencilCoeffs::Numeric { .. } => write!(fm, "k={} (numeric)", self.k),
        }
    }
}

// ---------------- serialization ----------------

impl Serialize for Pencil {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        let mut st = serializer.serialize_struct("Pencil", 4)?;
        st.serialize_field("k", &(self.k as u64))?;
        match &self.coeffs {
            PencilCoeffs::Exact { f, g } => {
                let fs: Vec<String> = f.iter().map(|x| x.to_string()).collect();
                let gs: Vec<String> = g.iter().map(|x| x.to_string()).collect();
                st.serialize_field("f", &fs)?;
                st.serialize_field("g", &gs)?;
                st.serialize_field("numeric", &false)?;
            }
            PencilCoeffs::Numeric { f, g } => {
                let fs: Vec<[f64; 2]> = f.iter().map(|c| [c.re, c.im]).collect();
                let gs: Vec<[f64; 2]> = g.iter().map(|c| [c.re, c.im]).collect();
                st.serialize_field("f", &fs)?;
                st.serialize_field("g", &gs)?;
                st.serialize_field("numeric", &true)?;
            }
        }
        st.end()
    }
}

#[derive(Deserialize)]
struct PencilWire {
    k: u64,
    f: serde_json::Value,
    g: serde_json::Value,
    numeric: bool,
}

impl<'de> Deserialize<'de> for Pencil {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let wire = PencilWire::deserialize(deserializer)?;
        let pencil = if wire.numeric {
            let f: Vec<[f64; 2]> =
                serde_json::from_value(wire.f).map_err(de::Error::custom)?;
            let g: Vec<[f64; 2]> =
                serde_json::from_value(wire.g).map_err(de::Error::custom)?;
            let fc = f.iter().map(|[re, im]| Complex64::new(*re, *im)).collect();
            let gc = g.iter().map(|[re, im]| Complex64::new(*re, *im)).collect();
            Pencil::numeric(fc, gc, 1e-14).map_err(de::Error::custom)?
        } else {
            let f: Vec<String> = serde_json::from_value(wire.f).map_err(de::Error::custom)?;
            let g: Vec<String> = serde_json::from_value(wire.g).map_err(de::Error::custom)?;
            let fi: std::result::Result<Vec<BigInt>, _> =
                f.iter().map(|s| s.trim().parse::<BigInt>()).collect();
            let gi: std::result::Result<Vec<BigInt>, _> =
                g.iter().map(|s| s.trim().parse::<BigInt>()).collect();
            Pencil::exact_from_bigints(
                fi.map_err(de::Error::custom)?,
                gi.map_err(de::Error::custom)?,
            )
            .map_err(de::Error::custom)?
        };
        if pencil.k as u64 != wire.k {
            return Err(de::Error::custom(format!(
                "declared degree {} does not match {} coefficients",
                wire.k,
                pencil.k + 1
            )));
        }
        Ok(pencil)
    }
}

// ---------------- binary form helpers ----------------

/// The linear form vanishing at `p = [p0 : p1]`, namely `p1 x0 - p0 x1`,
/// as the length-2 coefficient vector `(p1, -p0)`.
pub fn linear_form(p: &ProjPoint) -> Vec<BigInt> {
    vec![p.a1().clone(), -p.a0().clone()]
}

/// Product of two binary forms (coefficient convolution).
pub fn multiply_forms(a: &[BigInt], b: &[BigInt]) -> Vec<BigInt> {
    let mut out = vec![BigInt::zero(); a.len() + b.len() - 1];
    for (i, x) in a.iter().enumerate() {
        for (j, y) in b.iter().enumerate() {
            out[i + j] += x * y;
        }
    }
    out
}

/// Product of the linear forms vanishing at each of `roots`.
/// An empty root list gives the constant form `(1)`.
pub fn form_from_roots(roots: &[ProjPoint]) -> Vec<BigInt> {
    let mut acc = vec![BigInt::one()];
    for r in roots {
        acc = multiply_forms(&acc, &linear_form(r));
    }
    acc
}

fn rows_proportional(f: &[BigInt], g: &[BigInt]) -> bool {
    for i in 0..f.len() {
        for j in (i + 1)..f.len() {
            if !(&f[i] * &g[j] - &f[j] * &g[i]).is_zero() {
                return false;
            }
        }
    }
    true
}

/// Dehomogenize a form vector in the `z = x0/x1` chart: returns the
/// polynomial `p(u)` (ascending coefficients, trimmed, `u = x0`) and the
/// multiplicity of `x1`, which equals the number of leading zeros of the
/// form vector. `form = x1^mult * homogenization(p)`.
fn form_to_poly(v: &[BigInt]) -> (Vec<Rational>, usize) {
    let k = v.len() - 1;
    let mult = v.iter().position(|x| !x.is_zero()).unwrap_or(k + 1);
    if mult > k {
        // Zero form; callers never pass this (rows of a valid pencil are
        // not both zero, and a single zero row is proportional to anything).
        return (vec![], 0);
    }
    // p_i = v[k - i] for i = 0..k-mult.
    let mut p: Vec<Rational> = Vec::with_capacity(k - mult + 1);
    for i in 0..=(k - mult) {
        p.push(BigRational::from(v[k - i].clone()));
    }
    (p, mult)
}

/// Rebuild a form vector of total degree `k` from a polynomial and an extra
/// `x1` multiplicity: zeros in the leading slots, then reversed coefficients.
fn poly_to_form(p: &[Rational], extra_x1: usize, k: usize) -> Vec<Rational> {
    let deg = p.len() - 1;
    debug_assert_eq!(extra_x1 + deg, k);
    let mut v = vec![Rational::zero(); k + 1];
    for (i, c) in p.iter().enumerate() {
        v[k - i] = c.clone();
    }
    debug_assert!(v[..extra_x1].iter().all(|x| x.is_zero()));
    v
}

fn poly_trim(p: &mut Vec<Rational>) {
    while p.len() > 1 && p.last().map(|x| x.is_zero()).unwrap_or(false) {
        p.pop();
    }
    if p.iter().all(|x| x.is_zero()) {
        p.clear();
    }
}

/// Monic gcd of two polynomials over the rationals (ascending coefficients).
/// Returns `(1)` for coprime inputs; handles zero inputs gracefully.
fn poly_gcd(a: &[Rational], b: &[Rational]) -> Vec<Rational> {
    let mut a = a.to_vec();
    let mut b = b.to_vec();
    poly_trim(&mut a);
    poly_trim(&mut b);
    while !b.is_empty() {
        let r = poly_rem(&a, &b);
        a = b;
        b = r;
    }
    if a.is_empty() {
        return vec![Rational::one()];
    }
    let lead = a.last().expect("nonempty").clone();
    for c in &mut a {
        *c /= lead.clone();
    }
    a
}

fn poly_rem(a: &[Rational], b: &[Rational]) -> Vec<Rational> {
    let mut r = a.to_vec();
    poly_trim(&mut r);
    let db = b.len() - 1;
    let lead_b = b.last().expect("divisor nonzero");
    while !r.is_empty() && r.len() - 1 >= db {
        let dr = r.len() - 1;
        let q = r.last().expect("nonempty") / lead_b;
        for i in 0..=db {
            let t = &q * &b[i];
            r[dr - db + i] -= t;
        }
        poly_trim(&mut r);
        if r.len() == 1 && r[0].is_zero() {
            r.clear();
        }
    }
    r
}

/// Exact quotient for known-divisible inputs.
fn poly_div_exact(a: &[Rational], b: &[Rational]) -> Vec<Rational> {
    let mut r = a.to_vec();
    poly_trim(&mut r);
    let db = b.len() - 1;
    let lead_b = b.last().expect("divisor nonzero");
    let mut q = vec![Rational::zero(); r.len().saturating_sub(db)];
    while !r.is_empty() && r.len() - 1 >= db {
        let dr = r.len() - 1;
        let c = r.last().expect("nonempty") / lead_b;
        q[dr - db] = c.clone();
        for i in 0..=db {
            let t = &c * &b[i];
            r[dr - db + i] -= t;
        }
        poly_trim(&mut r);
        if r.len() == 1 && r[0].is_zero() {
            r.clear();
        }
    }
    debug_assert!(r.is_empty(), "poly_div_exact called on non-divisible input");
    q
}

/// Substitute `x0 -> a x0 + b x1`, `x1 -> c x0 + d x1` into a form.
fn substitute_linear(
    v: &[BigInt],
    a: &BigInt,
    b: &BigInt,
    c: &BigInt,
    d: &BigInt,
) -> Vec<BigInt> {
    let k = v.len() - 1;
    // Powers of the two substituted linear forms, as coefficient vectors.
    let la = vec![a.clone(), b.clone()];
    let lc = vec![c.clone(), d.clone()];
    let mut pow_a: Vec<Vec<BigInt>> = vec![vec![BigInt::one()]];
    let mut pow_c: Vec<Vec<BigInt>> = vec![vec![BigInt::one()]];
    for i in 1..=k {
        pow_a.push(multiply_forms(&pow_a[i - 1], &la));
        pow_c.push(multiply_forms(&pow_c[i - 1], &lc));
    }
    let mut out = vec![BigInt::zero(); k + 1];
    for (j, coeff) in v.iter().enumerate() {
        if coeff.is_zero() {
            continue;
        }
        let term = multiply_forms(&pow_a[k - j], &pow_c[j]);
        for (idx, t) in term.iter().enumerate() {
            out[idx] += coeff * t;
        }
    }
    out
}

fn multiply_forms_c(a: &[Complex64], b: &[Complex64]) -> Vec<Complex64> {
    let mut out = vec![Complex64::new(0.0, 0.0); a.len() + b.len() - 1];
    for (i, x) in a.iter().enumerate() {
        for (j, y) in b.iter().enumerate() {
            out[i + j] += x * y;
        }
    }
    out
}

fn substitute_linear_c(
    v: &[Complex64],
    a: Complex64,
    b: Complex64,
    c: Complex64,
    d: Complex64,
) -> Vec<Complex64> {
    let k = v.len() - 1;
    let la = vec![a, b];
    let lc = vec![c, d];
    let mut pow_a: Vec<Vec<Complex64>> = vec![vec![Complex64::new(1.0, 0.0)]];
    let mut pow_c: Vec<Vec<Complex64>> = vec![vec![Complex64::new(1.0, 0.0)]];
    for i in 1..=k {
        pow_a.push(multiply_forms_c(&pow_a[i - 1], &la));
        pow_c.push(multiply_forms_c(&pow_c[i - 1], &lc));
    }
    let mut out = vec![Complex64::new(0.0, 0.0); k + 1];
    for (j, coeff) in v.iter().enumerate() {
        let term = multiply_forms_c(&pow_a[k - j], &pow_c[j]);
        for (idx, t) in term.iter().enumerate() {
            out[idx] += coeff * t;
        }
    }
    out
}

/// Singular values (larger, smaller) of the 2 x n matrix with rows f, g,
/// via the 2x2 Gram matrix.
fn two_row_singular_values(f: &[Complex64], g: &[Complex64]) -> (f64, f64) {
    let ff: f64 = f.iter().map(|x| x.norm_sqr()).sum();
    let gg: f64 = g.iter().map(|x| x.norm_sqr()).sum();
    let fg: Complex64 = f.iter().zip(g).map(|(x, y)| x.conj() * y).sum();
    let tr = ff + gg;
    let det = ff * gg - fg.norm_sqr();
    let disc = (tr * tr - 4.0 * det).max(0.0).sqrt();
    let l1 = 0.5 * (tr + disc);
    let l2 = 0.5 * (tr - disc).max(0.0);
    (l1.sqrt(), l2.sqrt())
}

/// Scale rows jointly to unit Frobenius norm, with the largest-modulus entry
/// rotated to the positive real axis so the representation is deterministic.
fn normalize_rows(mut f: Vec<Complex64>, mut g: Vec<Complex64>) -> (Vec<Complex64>, Vec<Complex64>) {
    let norm: f64 = f
        .iter()
        .chain(g.iter())
        .map(|x| x.norm_sqr())
        .sum::<f64>()
        .sqrt();
    let mut best = Complex64::new(1.0, 0.0);
    let mut best_norm = 0.0;
    for x in f.iter().chain(g.iter()) {
        if x.norm() > best_norm {
            best_norm = x.norm();
            best = *x;
        }
    }
    let phase = if best_norm > 0.0 {
        best.conj() / best.norm()
    } else {
        Complex64::new(1.0, 0.0)
    };
    let scale = phase / norm;
    for x in f.iter_mut().chain(g.iter_mut()) {
        *x *= scale;
    }
    (f, g)
}

/// Convert a rational row pair into a pencil, used by solver factor output.
pub(crate) fn pencil_from_rational_rows(f: &[Rational], g: &[Rational]) -> Result<Pencil> {
    Pencil::exact(f.to_vec(), g.to_vec())
}
