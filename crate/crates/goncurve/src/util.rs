//! Small internal helpers shared across modules.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{Signed, ToPrimitive, Zero};

/// Convert a big integer to f64, shifting first so huge values keep their
/// leading bits instead of saturating to infinity.
pub fn bigint_to_f64(x: &BigInt) -> f64 {
    x.to_f64().unwrap_or_else(|| {
        let bits = x.bits();
        let shift = bits.saturating_sub(64);
        let head = (x >> shift).to_f64().unwrap_or(0.0);
        head * 2f64.powi(shift as i32)
    })
}

/// Convert a big rational to f64 without overflowing numerator or denominator
/// separately. Good to full f64 precision for any magnitude we produce.
pub fn ratio_to_f64(r: &BigRational) -> f64 {
    if r.is_zero() {
        return 0.0;
    }
    let n = r.numer();
    let d = r.denom();
    // Align both operands near 2^512 before the float divide.
    let shift_n = n.bits() as i64 - 512;
    let shift_d = d.bits() as i64 - 512;
    let shift = shift_n.max(shift_d).max(0) as u64;
    let nh = bigint_to_f64(&(n >> shift));
    let dh = bigint_to_f64(&(d >> shift));
    if dh == 0.0 {
        // Denominator underflowed the shift; fall back to sign * huge.
        return if n.is_negative() {
            f64::NEG_INFINITY
        } else {
            f64::INFINITY
        };
    }
    nh / dh
}

/// splitmix64 step, used to derive independent child seeds from a master
/// seed. Stable across platforms, so seeded runs are reproducible.
pub fn splitmix64(state: u64) -> u64 {
    let mut z = state.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Child seed `index` derived from `master`.
pub fn derive_seed(master: u64, index: u64) -> u64 {
    splitmix64(master ^ splitmix64(index.wrapping_add(1)))
}
