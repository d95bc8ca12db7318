//! floor(a * b / d) over the full 256-bit product, built from u64 limbs and
//! restoring binary division. Checks pro-rata payout math without touching
//! the production big-integer path.

/// 256-bit product of two u128s as (high, low) halves.
fn mul_wide(a: u128, b: u128) -> (u128, u128) {
    const MASK: u128 = (1 << 64) - 1;
    let (a_hi, a_lo) = (a >> 64, a & MASK);
    let (b_hi, b_lo) = (b >> 64, b & MASK);
    let ll = a_lo * b_lo;
    let lh = a_lo * b_hi;
    let hl = a_hi * b_lo;
    let hh = a_hi * b_hi;
    let mid = (ll >> 64) + (lh & MASK) + (hl & MASK);
    let lo = (mid & MASK) << 64 | (ll & MASK);
    let hi = hh + (lh >> 64) + (hl >> 64) + (mid >> 64);
    (hi, lo)
}

/// floor(a * b / d). Panics when d is zero or the quotient overflows u128;
/// callers in the tests only divide by totals at least as large as `a`.
pub fn mul_div_floor_ref(a: u128, b: u128, d: u128) -> u128 {
    assert!(d > 0, "division by zero");
    let (hi, lo) = mul_wide(a, b);
    assert!(hi < d, "quotient overflows u128");

    let mut quotient: u128 = 0;
    let mut remainder: u128 = 0;
    for i in (0..256).rev() {
        let bit = if i >= 128 {
            (hi >> (i - 128)) & 1
        } else {
            (lo >> i) & 1
        };
        // remainder < d, so 2 * remainder + bit < 2 * d; when the true value
        // overflows 128 bits it is certainly >= d and wrapping subtraction
        // lands on the exact difference.
        let overflowed = remainder >> 127 != 0;
        let shifted = (remainder << 1) | bit;
        if overflowed || shifted >= d {
            remainder = shifted.wrapping_sub(d);
            assert!(i < 128, "quotient overflows u128");
            quotient |= 1 << i;
        } else {
            remainder = shifted;
        }
    }
    quotient
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn small_cases_match_plain_division() {
        assert_eq!(mul_div_floor_ref(7, 3, 2), 10);
        assert_eq!(mul_div_floor_ref(1, 1, 3), 0);
        assert_eq!(mul_div_floor_ref(100, 100, 7), 1428);
        assert_eq!(mul_div_floor_ref(0, 999, 5), 0);
    }

    #[test]
    fn wide_products_divide_exactly() {
        assert_eq!(
            mul_div_floor_ref(u128::MAX, u128::MAX, u128::MAX),
            u128::MAX
        );
        assert_eq!(mul_div_floor_ref(1 << 100, 1 << 100, 1 << 90), 1 << 110);
        assert_eq!(mul_div_floor_ref(u128::MAX, 1 << 127, 1 << 127), u128::MAX,);
        // (2^128 - 1)(2^128 - 3) / (2^128 - 1) floors to 2^128 - 3
        assert_eq!(
            mul_div_floor_ref(u128::MAX, u128::MAX - 2, u128::MAX),
            u128::MAX - 2,
        );
    }

    #[test]
    #[should_panic(expected = "quotient overflows")]
    fn overflowing_quotient_panics() {
        mul_div_floor_ref(u128::MAX, 2, 1);
    }
}
