//! Integer helpers for residues modulo the grid sizes.

use crate::error::{Error, Result};

pub fn gcd(a: i64, b: i64) -> i64 {
    let (mut a, mut b) = (a.abs(), b.abs());
    while b != 0 {
        let t = a % b;
        a = b;
        b = t;
    }
    a
}

/// Least non-negative residue of `a` modulo `m`.
#[inline]
pub fn reduce(a: i64, m: usize) -> u64 {
    a.rem_euclid(m as i64) as u64
}

/// Multiplicative inverse by the extended Euclidean algorithm.
pub fn mod_inverse(a: i64, m: usize) -> Result<u64> {
    let modulus = m as i64;
    let (mut old_r, mut r) = (a.rem_euclid(modulus), modulus);
    let (mut old_s, mut s) = (1i64, 0i64);
    while r != 0 {
        let q = old_r / r;
        (old_r, r) = (r, old_r - q * r);
        (old_s, s) = (s, old_s - q * s);
    }
    if old_r != 1 {
        return Err(Error::NoInverse { value: a, modulus: m });
    }
    Ok(reduce(old_s, m))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn inverse_of_two() {
        assert_eq!(mod_inverse(2, 15).unwrap(), 8);
        assert_eq!(mod_inverse(2, 1147).unwrap(), 574);
        // (4 * 31)^-1 mod 37
        assert_eq!(mod_inverse(124, 37).unwrap(), 20);
    }

    #[test]
    fn inverse_missing() {
        assert!(matches!(mod_inverse(3, 15), Err(Error::NoInverse { .. })));
        assert!(mod_inverse(0, 7).is_err());
    }

    #[test]
    fn inverse_brute_force() {
        for m in [7usize, 15, 35, 77] {
            for a in 1..m as i64 {
                let brute = (1..m as u64).find(|x| (a as u64 * x) % m as u64 == 1);
                assert_eq!(mod_inverse(a, m).ok(), brute, "a={a} m={m}");
            }
        }
    }

    #[test]
    fn reduce_negative() {
        assert_eq!(reduce(-1, 15), 14);
        assert_eq!(gcd(-572, 1147), gcd(572, 1147));
    }
}
