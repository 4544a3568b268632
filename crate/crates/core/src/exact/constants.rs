use num_bigint::BigInt;
use num_traits::Zero;

fn atan_inv_scaled(x: u32, scale: &BigInt) -> BigInt {
    // atan(1/x) * scale by the alternating Taylor series
    let x = BigInt::from(x);
    let x2 = &x * &x;
    let mut power = scale / &x;
    let mut sum = BigInt::zero();
    let mut n = 1u64;
    let mut positive = true;
    while !power.is_zero() {
        let term = &power / n;
        if positive {
            sum += term;
        } else {
            sum -= term;
        }
        power /= &x2;
        n += 2;
        positive = !positive;
    }
    sum
}

/// `floor(π · 10^digits)` up to a unit in the last place.
pub fn pi_scaled(digits: u32) -> BigInt {
    let guard = 10;
    let scale = BigInt::from(10).pow(digits + guard);
    let pi = atan_inv_scaled(5, &scale) * 16 - atan_inv_scaled(239, &scale) * 4;
    pi / BigInt::from(10).pow(guard)
}

/// `floor(√2 · 10^digits)`.
pub fn sqrt2_scaled(digits: u32) -> BigInt {
    (BigInt::from(2) * BigInt::from(10).pow(2 * digits)).sqrt()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn known_digits() {
        assert_eq!(pi_scaled(20).to_string(), "314159265358979323846");
        assert_eq!(sqrt2_scaled(20).to_string(), "141421356237309504880");
    }
}
