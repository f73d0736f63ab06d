//! Integer helpers shared by the field code and the catalog.

use alloc::vec::Vec;

use crate::{Error, Result};

pub fn gcd(a: u128, b: u128) -> u128 {
    let (mut a, mut b) = (a, b);
    while b != 0 {
        let t = a % b;
        a = b;
        b = t;
    }
    a
}

pub fn gcd_i(a: i128, b: i128) -> i128 {
    gcd(a.unsigned_abs(), b.unsigned_abs()) as i128
}

pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    let mut d = 2u64;
    while d * d <= n {
        if n.is_multiple_of(d) {
            return false;
        }
        d += 1;
    }
    true
}

/// Distinct prime factors in increasing order.
pub fn prime_factors(mut n: u128) -> Vec<u128> {
    let mut out = Vec::new();
    let mut d = 2u128;
    while d * d <= n {
        if n.is_multiple_of(d) {
            out.push(d);
            while n.is_multiple_of(d) {
                n /= d;
            }
        }
        d += 1;
    }
    if n > 1 {
        out.push(n);
    }
    out
}

pub fn checked_pow(base: u128, exp: u32) -> Option<u128> {
    let mut acc = 1u128;
    for _ in 0..exp {
        acc = acc.checked_mul(base)?;
    }
    Some(acc)
}

/// Inverse of `d` modulo `modulus`, in `[0, modulus)`.
pub fn mod_inverse(d: i128, modulus: i128) -> Result<i128> {
    if modulus <= 0 {
        return Err(Error::NonPositive(modulus));
    }
    let (mut r0, mut r1) = (d.rem_euclid(modulus), modulus);
    let (mut s0, mut s1) = (1i128, 0i128);
    while r1 != 0 {
        let q = r0 / r1;
        (r0, r1) = (r1, r0 - q * r1);
        (s0, s1) = (s1, s0 - q * s1);
    }
    if r0 != 1 {
        if modulus == 1 {
            return Ok(0);
        }
        return Err(Error::NotCoprime(d, modulus));
    }
    Ok(s0.rem_euclid(modulus))
}

pub fn two_valuation(x: i128) -> Result<u32> {
    if x < 1 {
        return Err(Error::NonPositive(x));
    }
    Ok(x.trailing_zeros())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn inverse_small_cases() {
        assert_eq!(mod_inverse(1, 7).unwrap(), 1);
        assert_eq!(mod_inverse(3, 8).unwrap(), 3);
        assert_eq!(mod_inverse(5, 26).unwrap(), 21);
        assert_eq!(mod_inverse(4, 8), Err(Error::NotCoprime(4, 8)));
    }

    #[test]
    fn inverse_matches_scan() {
        for m in 2..60i128 {
            for d in 0..m {
                let scan = (0..m).find(|&e| (d * e) % m == 1);
                assert_eq!(mod_inverse(d, m).ok(), scan, "d={d} m={m}");
            }
        }
    }

    #[test]
    fn valuation() {
        assert_eq!(two_valuation(1).unwrap(), 0);
        assert_eq!(two_valuation(8).unwrap(), 3);
        assert_eq!(two_valuation(12).unwrap(), 2);
        assert!(two_valuation(0).is_err());
    }

    #[test]
    fn primes_and_factors() {
        let ps: Vec<u64> = (0..30).filter(|&n| is_prime(n)).collect();
        assert_eq!(ps, [2, 3, 5, 7, 11, 13, 17, 19, 23, 29]);
        assert_eq!(prime_factors(63), [3, 7]);
        assert_eq!(prime_factors(1), Vec::<u128>::new());
        assert_eq!(prime_factors(1 << 20), [2]);
    }
}
