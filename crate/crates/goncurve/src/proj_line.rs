//! Points, Möbius transformations, and cross-ratios on the rational
//! projective line.
//!
//! A point `[a0 : a1]` is stored in canonical form: both coordinates are
//! coprime integers and the first nonzero one is positive. That makes
//! equality plain field comparison and keeps every downstream hash and JSON
//! encoding bit-stable. The affine chart used throughout the crate is
//! `z = a0/a1`, so `0 = [0:1]`, `1 = [1:1]`, and infinity is `[1:0]`.

use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use serde::de::{self, Deserializer, SeqAccess, Visitor};
use serde::ser::{SerializeSeq, Serializer};
use serde::{Deserialize, Serialize};

use crate::{Error, Result};

/// Exact scalar used for all symbolic computation.
pub type Rational = BigRational;

// ---------------- points ----------------

/// A point of P^1 over the rationals, in canonical integer form.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct ProjPoint {
    a0: BigInt,
    a1: BigInt,
}

impl ProjPoint {
    /// Canonicalize a pair of rationals into a point.
    ///
    /// Errors with [`Error::ZeroPoint`] when both coordinates vanish.
    pub fn new(a0: Rational, a1: Rational) -> Result<Self> {
        if a0.is_zero() && a1.is_zero() {
            return Err(Error::ZeroPoint);
        }
        let l = a0.denom().lcm(a1.denom());
        let n0 = (&a0 * BigRational::from(l.clone())).to_integer();
        let n1 = (&a1 * BigRational::from(l)).to_integer();
        Ok(Self::from_bigints(n0, n1).expect("nonzero by check above"))
    }

    /// Canonicalize a pair of integers into a point.
    pub fn from_bigints(a0: BigInt, a1: BigInt) -> Result<Self> {
        if a0.is_zero() && a1.is_zero() {
            return Err(Error::ZeroPoint);
        }
        let g = a0.gcd(&a1);
        let mut a0 = a0 / &g;
        let mut a1 = a1 / &g;
        let lead_negative = if a0.is_zero() {
            a1.is_negative()
        } else {
            a0.is_negative()
        };
        if lead_negative {
            a0 = -a0;
            a1 = -a1;
        }
        Ok(Self { a0, a1 })
    }

    /// Convenience constructor from machine integers.
    pub fn from_ints(a0: i64, a1: i64) -> Result<Self> {
        Self::from_bigints(BigInt::from(a0), BigInt::from(a1))
    }

    /// The affine point `n`, that is `[n : 1]`.
    pub fn affine_int(n: i64) -> Self {
        Self::from_ints(n, 1).expect("denominator 1 is nonzero")
    }

    /// The affine point `p/q` (`q != 0`), that is `[p : q]`.
    pub fn affine(p: i64, q: i64) -> Result<Self> {
        if q == 0 {
            return Err(Error::DegenerateInput("affine denominator is zero".into()));
        }
        Self::from_ints(p, q)
    }

    /// `[1 : 0]`, the point at infinity in the `z = a0/a1` chart.
    pub fn infinity() -> Self {
        Self {
            a0: BigInt::one(),
            a1: BigInt::zero(),
        }
    }

    pub fn zero() -> Self {
        Self {
            a0: BigInt::zero(),
            a1: BigInt::one(),
        }
    }

    pub fn one() -> Self {
        Self {
            a0: BigInt::one(),
            a1: BigInt::one(),
        }
    }

    pub fn a0(&self) -> &BigInt {
        &self.a0
    }

    pub fn a1(&self) -> &BigInt {
        &self.a1
    }

    pub fn is_infinity(&self) -> bool {
        self.a1.is_zero()
    }

    /// Monomial evaluation vector `(a0^k, a0^{k-1} a1, ..., a1^k)`.
    ///
    /// Entry `j` is the monomial `a0^{k-j} a1^j`, matching the coefficient
    /// order used by [`crate::pencil::Pencil`]. Always has `k + 1` entries.
    pub fn eval_vector(&self, k: usize) -> Vec<BigInt> {
        let mut out = Vec::with_capacity(k + 1);
        // Build a0^{k-j} a1^j incrementally from both ends to stay exact and cheap.
        let mut pow0 = vec![BigInt::one()];
        let mut pow1 = vec![BigInt::one()];
        for i in 1..=k {
            let next0 = &pow0[i - 1] * &self.a0;
            let next1 = &pow1[i - 1] * &self.a1;
            pow0.push(next0);
            pow1.push(next1);
        }
        for j in 0..=k {
            out.push(&pow0[k - j] * &pow1[j]);
        }
        out
    }

    /// Same vector as f64 entries (useful for numeric verification).
    pub fn eval_vector_f64(&self, k: usize) -> Vec<f64> {
        self.eval_vector(k)
            .iter()
            .map(crate::util::bigint_to_f64)
            .collect()
    }

    /// Parse the text encoding: `"inf"`, an integer `"n"`, a fraction
    /// `"p/q"`, or nothing that we recognize.
    pub fn parse(s: &str) -> Result<Self> {
        let s = s.trim();
        if s == "inf" || s == "infinity" {
            return Ok(Self::infinity());
        }
        if let Some((p, q)) = s.split_once('/') {
            let p: BigInt = p
                .trim()
                .parse()
                .map_err(|_| Error::Config(format!("bad point numerator {p:?}")))?;
            let q: BigInt = q
                .trim()
                .parse()
                .map_err(|_| Error::Config(format!("bad point denominator {q:?}")))?;
            if q.is_zero() {
                return Err(Error::DegenerateInput("affine denominator is zero".into()));
            }
            return Self::from_bigints(p, q);
        }
        let n: BigInt = s
            .parse()
            .map_err(|_| Error::Config(format!("bad point {s:?}")))?;
        Self::from_bigints(n, BigInt::one())
    }

    /// Short human form: `inf`, `n`, or `p/q` (denominator kept positive).
    pub fn shorthand(&self) -> String {
        if self.a1.is_zero() {
            return "inf".into();
        }
        let (num, den) = if self.a1.is_negative() {
            (-self.a0.clone(), -self.a1.clone())
        } else {
            (self.a0.clone(), self.a1.clone())
        };
        if den.is_one() {
            num.to_string()
        } else {
            format!("{num}/{den}")
        }
    }
}

impl fmt::Display for ProjPoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{}:{}]", self.a0, self.a1)
    }
}

impl fmt::Debug for ProjPoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "ProjPoint[{}:{}]", self.a0, self.a1)
    }
}

impl Serialize for ProjPoint {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        let mut seq = serializer.serialize_seq(Some(2))?;
        seq.serialize_element(&self.a0.to_string())?;
        seq.serialize_element(&self.a1.to_string())?;
        seq.end()
    }
}

impl<'de> Deserialize<'de> for ProjPoint {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        struct PointVisitor;

        impl<'de> Visitor<'de> for PointVisitor {
            type Value = ProjPoint;

            fn expecting(&self, f: &mut fmt::Formatter) -> fmt::Result {
                f.write_str("a [\"a0\",\"a1\"] pair or a shorthand string")
            }

            fn visit_str<E: de::Error>(self, v: &str) -> std::result::Result<ProjPoint, E> {
                ProjPoint::parse(v).map_err(E::custom)
            }

            fn visit_seq<A: SeqAccess<'de>>(
                self,
                mut seq: A,
            ) -> std::result::Result<ProjPoint, A::Error> {
                let a0: String = seq
                    .next_element()?
                    .ok_or_else(|| de::Error::invalid_length(0, &self))?;
                let a1: String = seq
                    .next_element()?
                    .ok_or_else(|| de::Error::invalid_length(1, &self))?;
                if seq.next_element::<String>()?.is_some() {
                    return Err(de::Error::invalid_length(3, &self));
                }
                let a0: BigInt = a0.trim().parse().map_err(de::Error::custom)?;
                let a1: BigInt = a1.trim().parse().map_err(de::Error::custom)?;
                ProjPoint::from_bigints(a0, a1).map_err(de::Error::custom)
            }
        }

        deserializer.deserialize_any(PointVisitor)
    }
}

/// The 2x2 bracket `p0 q1 - p1 q0`. Zero exactly when `p == q` as
/// projective points (both canonical or not).
pub fn point_bracket(p: &ProjPoint, q: &ProjPoint) -> BigInt {
    &p.a0 * &q.a1 - &p.a1 * &q.a0
}

// ---------------- Möbius maps ----------------

/// An invertible 2x2 rational matrix acting on P^1, in canonical form:
/// coprime integer entries, first nonzero entry (row-major) positive.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct MoebiusMap {
    // Row-major [[a, b], [c, d]]: [x0 : x1] -> [a x0 + b x1 : c x0 + d x1].
    m: [BigInt; 4],
}

impl MoebiusMap {
    /// Canonicalize a rational 2x2 matrix; errors when the determinant is zero.
    pub fn new(rows: [[Rational; 2]; 2]) -> Result<Self> {
        let mut l = BigInt::one();
        for row in &rows {
            for x in row {
                l = l.lcm(x.denom());
            }
        }
        let lr = BigRational::from(l);
        let ints = [
            (&rows[0][0] * &lr).to_integer(),
            (&rows[0][1] * &lr).to_integer(),
            (&rows[1][0] * &lr).to_integer(),
            (&rows[1][1] * &lr).to_integer(),
        ];
        Self::from_bigints(ints)
    }

    /// Canonicalize integer entries `[a, b, c, d]` (row-major).
    pub fn from_bigints(m: [BigInt; 4]) -> Result<Self> {
        let det = &m[0] * &m[3] - &m[1] * &m[2];
        if det.is_zero() {
            return Err(Error::DegenerateInput(
                "matrix determinant is zero".into(),
            ));
        }
        let mut g = BigInt::zero();
        for x in &m {
            g = g.gcd(x);
        }
        let mut m = m.map(|x| x / &g);
        let lead_negative = m
            .iter()
            .find(|x| !x.is_zero())
            .map(|x| x.is_negative())
            .unwrap_or(false);
        if lead_negative {
            m = m.map(|x| -x);
        }
        Ok(Self { m })
    }

    pub fn from_ints(m: [i64; 4]) -> Result<Self> {
        Self::from_bigints(m.map(BigInt::from))
    }

    pub fn identity() -> Self {
        Self::from_ints([1, 0, 0, 1]).expect("identity is invertible")
    }

    /// Row-major entries `[a, b, c, d]`.
    pub fn entries(&self) -> &[BigInt; 4] {
        &self.m
    }

    pub fn det(&self) -> BigInt {
        &self.m[0] * &self.m[3] - &self.m[1] * &self.m[2]
    }

    /// Apply to a point: `[x0 : x1] -> [a x0 + b x1 : c x0 + d x1]`.
    pub fn apply(&self, p: &ProjPoint) -> ProjPoint {
        let b0 = &self.m[0] * p.a0() + &self.m[1] * p.a1();
        let b1 = &self.m[2] * p.a0() + &self.m[3] * p.a1();
        ProjPoint::from_bigints(b0, b1).expect("invertible matrix maps nonzero to nonzero")
    }

    /// Inverse map via the adjugate (stays integral, then recanonicalizes).
    pub fn inverse(&self) -> Self {
        let adj = [
            self.m[3].clone(),
            -self.m[1].clone(),
            -self.m[2].clone(),
            self.m[0].clone(),
        ];
        Self::from_bigints(adj).expect("adjugate of invertible matrix is invertible")
    }

    /// Composition `self ∘ other` (apply `other` first).
    pub fn compose(&self, other: &Self) -> Self {
        let a = &self.m;
        let b = &other.m;
        let prod = [
            &a[0] * &b[0] + &a[1] * &b[2],
            &a[0] * &b[1] + &a[1] * &b[3],
            &a[2] * &b[0] + &a[3] * &b[2],
            &a[2] * &b[1] + &a[3] * &b[3],
        ];
        Self::from_bigints(prod).expect("product of invertible matrices is invertible")
    }

    /// The unique map sending the distinct triple `src` to the distinct
    /// triple `dst`, pointwise in order.
    pub fn from_three_pairs(src: [&ProjPoint; 3], dst: [&ProjPoint; 3]) -> Result<Self> {
        let to_std_src = standard_triple_map(src)?;
        let to_std_dst = standard_triple_map(dst)?;
        Ok(to_std_dst.inverse().compose(&to_std_src))
    }

    /// f64 entries, for numeric pipelines.
    pub fn entries_f64(&self) -> [f64; 4] {
        [
            crate::util::bigint_to_f64(&self.m[0]),
            crate::util::bigint_to_f64(&self.m[1]),
            crate::util::bigint_to_f64(&self.m[2]),
            crate::util::bigint_to_f64(&self.m[3]),
        ]
    }
}

impl fmt::Display for MoebiusMap {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "[[{},{}],[{},{}]]",
            self.m[0], self.m[1], self.m[2], self.m[3]
        )
    }
}

impl fmt::Debug for MoebiusMap {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "MoebiusMap{self}")
    }
}

impl Serialize for MoebiusMap {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        let rows = [
            [self.m[0].to_string(), self.m[1].to_string()],
            [self.m[2].to_string(), self.m[3].to_string()],
        ];
        rows.serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for MoebiusMap {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let rows: [[String; 2]; 2] = Deserialize::deserialize(deserializer)?;
        let mut ints = Vec::with_capacity(4);
        for row in &rows {
            for s in row {
                let x: BigInt = s.trim().parse().map_err(de::Error::custom)?;
                ints.push(x);
            }
        }
        let m: [BigInt; 4] = ints.try_into().expect("exactly four entries");
        MoebiusMap::from_bigints(m).map_err(de::Error::custom)
    }
}

/// The map sending the distinct triple `(p1, p2, p3)` to `(0, 1, inf)`.
///
/// With the bracket `[p, q] = p0 q1 - p1 q0`, the map is
/// `p -> ([p, p1] * [p2, p3] : [p, p3] * [p2, p1])`, which is linear in `p`.
fn standard_triple_map(pts: [&ProjPoint; 3]) -> Result<MoebiusMap> {
    let [p1, p2, p3] = pts;
    if p1 == p2 || p1 == p3 || p2 == p3 {
        return Err(Error::DegenerateInput(
            "triple of points must be pairwise distinct".into(),
        ));
    }
    let b23 = point_bracket(p2, p3);
    let b21 = point_bracket(p2, p1);
    // [p, q] = p0 q1 - p1 q0 = (q1, -q0) . (p0, p1).
    let m = [
        &b23 * p1.a1(),
        -(&b23 * p1.a0()),
        &b21 * p3.a1(),
        -(&b21 * p3.a0()),
    ];
    MoebiusMap::from_bigints(m)
}

/// Cross-ratio of four points, as the image of `p4` under the map taking
/// `(p1, p2, p3)` to `(0, 1, inf)`. Requires `p1, p2, p3` pairwise distinct.
pub fn cross_ratio(
    p1: &ProjPoint,
    p2: &ProjPoint,
    p3: &ProjPoint,
    p4: &ProjPoint,
) -> Result<ProjPoint> {
    let t = standard_triple_map([p1, p2, p3])?;
    Ok(t.apply(p4))
}
