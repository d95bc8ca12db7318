//! Wide integer helpers for pool share math. Intermediate products exceed
//! u128, so they run through BigUint and come back down checked.

use num_bigint::BigUint;

/// floor(a * b / d); None when d is zero or the result exceeds u128.
pub fn mul_div_floor(a: u128, b: u128, d: u128) -> Option<u128> {
    if d == 0 {
        return None;
    }
    let wide = BigUint::from(a) * BigUint::from(b) / BigUint::from(d);
    u128::try_from(wide).ok()
}

/// floor(sqrt(a * b)). Always fits: sqrt of a 256-bit product is 128 bits.
pub fn sqrt_product_floor(a: u128, b: u128) -> u128 {
    let wide = (BigUint::from(a) * BigUint::from(b)).sqrt();
    u128::try_from(wide).expect("sqrt of a 256-bit value fits in 128 bits")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn mul_div_floors() {
        assert_eq!(mul_div_floor(7, 3, 2), Some(10));
        assert_eq!(mul_div_floor(1, 1, 3), Some(0));
        assert_eq!(
            mul_div_floor(u128::MAX, u128::MAX, u128::MAX),
            Some(u128::MAX)
        );
        assert_eq!(mul_div_floor(u128::MAX, 2, 1), None);
        assert_eq!(mul_div_floor(1, 1, 0), None);
    }

    #[test]
    fn sqrt_floors() {
        assert_eq!(sqrt_product_floor(4, 9), 6);
        assert_eq!(sqrt_product_floor(2, 2), 2);
        assert_eq!(sqrt_product_floor(10, 10), 10);
        assert_eq!(sqrt_product_floor(99, 1), 9);
        assert_eq!(sqrt_product_floor(u128::MAX, u128::MAX), u128::MAX);
        assert_eq!(sqrt_product_floor(0, 5), 0);
    }
}
