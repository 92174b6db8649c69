//! Bernoulli numbers modulo `p^m` and irregular pairs.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::padic::{is_prime, ResidueRing};

/// An even index `k` in `[2, p-3]` with `p` dividing the numerator of `B_k`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct IrregularPair {
    pub p: u64,
    pub k: u64,
}

pub(crate) fn check_odd_prime(p: u64) -> Result<()> {
    if p == 2 {
        return Err(Error::InvalidPrime(p, "p must be odd"));
    }
    if !is_prime(p) {
        return Err(Error::InvalidPrime(p, "not prime"));
    }
    Ok(())
}

/// `B_k mod p^m` for every even `k` in `[2, p-3]`.
///
/// Inverts `(e^t - 1)/t = sum t^j/(j+1)!` as a power series over `Z/p^m`
/// up to degree `p - 3`. Every factorial involved is below `p!`, so all
/// denominators are units.
pub fn bernoulli_mod(p: u64, m: u32) -> Result<BTreeMap<u64, u64>> {
    check_odd_prime(p)?;
    let ring = ResidueRing::new(p, m)?;
    let mut out = BTreeMap::new();
    if p < 5 {
        return Ok(out);
    }
    let top = (p - 3) as usize;

    // factorials 0! .. (top + 1)!
    let mut fact = vec![1u64; top + 2];
    for i in 1..fact.len() {
        fact[i] = ring.mul(fact[i - 1], i as u64);
    }
    let exp_over_t: Vec<u64> = (0..=top)
        .map(|j| ring.inv(fact[j + 1]).expect("factorial below p! is a unit"))
        .collect();

    // c = 1 / exp_over_t, so c_k = B_k / k!
    let mut c = vec![0u64; top + 1];
    c[0] = 1;
    for n in 1..=top {
        let mut acc = 0u64;
        for j in 1..=n {
            acc = ring.add(acc, ring.mul(exp_over_t[j], c[n - j]));
        }
        c[n] = ring.neg(acc);
    }
    for k in (2..=top).step_by(2) {
        out.insert(k as u64, ring.mul(c[k], fact[k]));
    }
    Ok(out)
}

/// Even `k` in `[2, p-3]` with `B_k = 0 mod p`, ascending.
pub fn irregular_pairs(p: u64) -> Result<Vec<IrregularPair>> {
    Ok(bernoulli_mod(p, 1)?
        .into_iter()
        .filter(|&(_, b)| b == 0)
        .map(|(k, _)| IrregularPair { p, k })
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn b2_mod_7_is_inverse_of_six() {
        let b = bernoulli_mod(7, 1).unwrap();
        assert_eq!(b[&2], 6);
        // B_4 = -1/30 and 30 = 2 mod 7
        assert_eq!(b[&4], 3);
    }

    #[test]
    fn known_irregular_and_regular_primes() {
        assert_eq!(irregular_pairs(37).unwrap(), vec![IrregularPair { p: 37, k: 32 }]);
        assert_eq!(
            irregular_pairs(157).unwrap().iter().map(|x| x.k).collect::<Vec<_>>(),
            vec![62, 110]
        );
        assert!(irregular_pairs(13).unwrap().is_empty());
        assert!(irregular_pairs(5).unwrap().is_empty());
        assert!(irregular_pairs(3).unwrap().is_empty());
    }

    #[test]
    fn p_equal_two_rejected() {
        assert!(matches!(bernoulli_mod(2, 1), Err(Error::InvalidPrime(2, _))));
        assert!(irregular_pairs(15).is_err());
    }

    #[test]
    fn higher_precision_reduces_to_lower() {
        for p in [5u64, 11, 37, 59, 101] {
            let lo = bernoulli_mod(p, 1).unwrap();
            let hi = bernoulli_mod(p, 2).unwrap();
            for (k, v) in &hi {
                assert_eq!(v % p, lo[k], "p = {p}, k = {k}");
            }
        }
    }
}
