//! Radical-inverse (van der Corput / Halton) sequences.

/// Reflects the base-`base` digits of `k` about the radix point.
///
/// The reversed digit string is accumulated as an integer and divided once,
/// so the result carries a single rounding.
///
/// # Panics
/// If `base < 2`.
pub fn radical_inverse(k: u64, base: u32) -> f64 {
    assert!(base >= 2, "radical inverse base must be at least 2");
    let b = u128::from(base);
    let mut k = u128::from(k);
    let mut reversed: u128 = 0;
    let mut denom: u128 = 1;
    while k > 0 {
        reversed = reversed * b + k % b;
        denom *= b;
        k /= b;
    }
    reversed as f64 / denom as f64
}
