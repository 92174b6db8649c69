//! Exact arithmetic over `Z/p^m`, truncated `T`-adic power series and
//! Smith normal forms.
//!
//! Nothing in here touches floating point. Every value carries the ring it
//! lives in, and binary operations on values from different rings fail with
//! [`Error::PrecisionMismatch`] instead of silently coercing.

mod matrix;
mod smith;

pub use matrix::IntMatrix;
pub use smith::{smith_normal_form, smith_normal_form_mod, smith_normal_form_mod_with_transform, LocalSmith, SmithForm};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Default `T`-adic truncation degree for series work.
pub const DEFAULT_DEGREE_CAP: usize = 16;
/// Default `p`-adic precision exponent for series work.
pub const DEFAULT_PRECISION: u32 = 2;

pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    if n.is_multiple_of(2) {
        return n == 2;
    }
    let mut d = 3;
    while d * d <= n {
        if n.is_multiple_of(d) {
            return false;
        }
        d += 2;
    }
    true
}

/// `p`-adic valuation of a nonzero integer; `None` for zero.
pub fn valuation(mut x: u128, p: u64) -> Option<u32> {
    if x == 0 {
        return None;
    }
    let p = p as u128;
    let mut v = 0;
    while x.is_multiple_of(p) {
        x /= p;
        v += 1;
    }
    Some(v)
}

pub fn checked_pow(p: u64, e: u32) -> Option<u64> {
    p.checked_pow(e)
}

#[inline]
pub fn mul_mod(a: u64, b: u64, modulus: u64) -> u64 {
    ((a as u128 * b as u128) % modulus as u128) as u64
}

pub fn pow_mod(mut base: u64, mut exp: u64, modulus: u64) -> u64 {
    if modulus == 1 {
        return 0;
    }
    let mut acc = 1u64;
    base %= modulus;
    while exp > 0 {
        if exp & 1 == 1 {
            acc = mul_mod(acc, base, modulus);
        }
        base = mul_mod(base, base, modulus);
        exp >>= 1;
    }
    acc
}

/// Inverse modulo an arbitrary modulus, `None` when `a` is not a unit.
pub fn inv_mod(a: u64, modulus: u64) -> Option<u64> {
    let (mut old_r, mut r) = (a as i128 % modulus as i128, modulus as i128);
    let (mut old_s, mut s) = (1i128, 0i128);
    while r != 0 {
        let q = old_r / r;
        (old_r, r) = (r, old_r - q * r);
        (old_s, s) = (s, old_s - q * s);
    }
    if old_r != 1 {
        return if modulus == 1 { Some(0) } else { None };
    }
    Some(old_s.rem_euclid(modulus as i128) as u64)
}

/// The coefficient ring `Z/p^m`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct ResidueRing {
    p: u64,
    m: u32,
    modulus: u64,
}

impl ResidueRing {
    pub fn new(p: u64, m: u32) -> Result<Self> {
        if !is_prime(p) {
            return Err(Error::InvalidPrime(p, "not prime"));
        }
        if m == 0 {
            return Err(Error::PrecisionMismatch("precision exponent must be at least 1".into()));
        }
        // Products of two residues are formed in u128.
        let modulus = checked_pow(p, m)
            .filter(|&q| q < (1u64 << 63))
            .ok_or_else(|| Error::PrecisionMismatch(format!("{p}^{m} does not fit exact arithmetic")))?;
        Ok(Self { p, m, modulus })
    }

    pub fn p(&self) -> u64 {
        self.p
    }

    pub fn precision(&self) -> u32 {
        self.m
    }

    pub fn modulus(&self) -> u64 {
        self.modulus
    }

    pub fn reduce(&self, x: i128) -> u64 {
        x.rem_euclid(self.modulus as i128) as u64
    }

    pub fn add(&self, a: u64, b: u64) -> u64 {
        ((a as u128 + b as u128) % self.modulus as u128) as u64
    }

    pub fn sub(&self, a: u64, b: u64) -> u64 {
        self.add(a, self.modulus - b % self.modulus)
    }

    pub fn mul(&self, a: u64, b: u64) -> u64 {
        mul_mod(a, b, self.modulus)
    }

    pub fn neg(&self, a: u64) -> u64 {
        self.sub(0, a)
    }

    pub fn pow(&self, a: u64, e: u64) -> u64 {
        pow_mod(a, e, self.modulus)
    }

    pub fn inv(&self, a: u64) -> Option<u64> {
        inv_mod(a, self.modulus)
    }

    /// Valuation of a residue, capped at `m` (zero has valuation `m`).
    pub fn valuation(&self, a: u64) -> u32 {
        valuation((a % self.modulus) as u128, self.p).map_or(self.m, |v| v.min(self.m))
    }

    /// Teichmüller representative of `a` modulo `p^m`, i.e. the unique
    /// `(p-1)`-th root of unity congruent to `a` mod `p`.
    pub fn teichmuller(&self, a: u64) -> u64 {
        if a.is_multiple_of(self.p) {
            return 0;
        }
        self.pow(a, self.modulus / self.p)
    }

    fn check_same(&self, other: &Self) -> Result<()> {
        if self != other {
            return Err(Error::PrecisionMismatch(format!(
                "Z/{}^{} vs Z/{}^{}",
                self.p, self.m, other.p, other.m
            )));
        }
        Ok(())
    }
}

/// A power series in `T` over `Z/p^m`, truncated after degree `degree_cap`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TruncatedSeries {
    ring: ResidueRing,
    coeffs: Vec<u64>,
}

impl TruncatedSeries {
    pub fn zero(ring: ResidueRing, degree_cap: usize) -> Self {
        Self { ring, coeffs: vec![0; degree_cap + 1] }
    }

    pub fn one(ring: ResidueRing, degree_cap: usize) -> Self {
        let mut s = Self::zero(ring, degree_cap);
        s.coeffs[0] = 1 % ring.modulus();
        s
    }

    /// Builds a series from signed coefficients; missing ones are zero and
    /// anything past `degree_cap` is dropped.
    pub fn from_coeffs(ring: ResidueRing, degree_cap: usize, coeffs: &[i128]) -> Self {
        let mut s = Self::zero(ring, degree_cap);
        for (slot, &c) in s.coeffs.iter_mut().zip(coeffs) {
            *slot = ring.reduce(c);
        }
        s
    }

    pub fn ring(&self) -> ResidueRing {
        self.ring
    }

    pub fn degree_cap(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn coeffs(&self) -> &[u64] {
        &self.coeffs
    }

    pub fn coeff(&self, i: usize) -> u64 {
        self.coeffs.get(i).copied().unwrap_or(0)
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(|&c| c == 0)
    }

    fn check_compatible(&self, other: &Self) -> Result<()> {
        self.ring.check_same(&other.ring)?;
        if self.degree_cap() != other.degree_cap() {
            return Err(Error::PrecisionMismatch(format!(
                "degree cap {} vs {}",
                self.degree_cap(),
                other.degree_cap()
            )));
        }
        Ok(())
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.check_compatible(other)?;
        let coeffs = self
            .coeffs
            .iter()
            .zip(&other.coeffs)
            .map(|(&a, &b)| self.ring.add(a, b))
            .collect();
        Ok(Self { ring: self.ring, coeffs })
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.check_compatible(other)?;
        let coeffs = self
            .coeffs
            .iter()
            .zip(&other.coeffs)
            .map(|(&a, &b)| self.ring.sub(a, b))
            .collect();
        Ok(Self { ring: self.ring, coeffs })
    }

    /// Schoolbook product truncated at the common degree cap.
    pub fn mul(&self, other: &Self) -> Result<Self> {
        self.check_compatible(other)?;
        let cap = self.degree_cap();
        let modulus = self.ring.modulus() as u128;
        let mut acc = vec![0u128; cap + 1];
        for (i, &a) in self.coeffs.iter().enumerate().filter(|(_, &a)| a != 0) {
            for (j, &b) in other.coeffs[..=cap - i].iter().enumerate() {
                acc[i + j] = (acc[i + j] + a as u128 * b as u128) % modulus;
            }
        }
        Ok(Self { ring: self.ring, coeffs: acc.into_iter().map(|c| c as u64).collect() })
    }

    pub fn scale(&self, c: u64) -> Self {
        Self {
            ring: self.ring,
            coeffs: self.coeffs.iter().map(|&a| self.ring.mul(a, c)).collect(),
        }
    }
}

/// The Weierstrass reading of a series' Newton polygon.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct NewtonReading {
    pub lambda: usize,
    pub mu: u32,
    /// True when no increase of precision or degree cap can change the answer.
    pub certified: bool,
}

/// `mu` is the least coefficient valuation and `lambda` the first index
/// attaining it.
pub fn newton_polygon(f: &TruncatedSeries) -> Result<NewtonReading> {
    let ring = f.ring();
    let (lambda, mu) = f
        .coeffs()
        .iter()
        .enumerate()
        .map(|(i, &c)| (i, ring.valuation(c)))
        .min_by_key(|&(i, v)| (v, i))
        .expect("series has at least one coefficient");
    if mu >= ring.precision() {
        return Err(Error::Indeterminate { precision: ring.precision() });
    }
    Ok(NewtonReading { lambda, mu, certified: lambda < f.degree_cap() && mu < ring.precision() })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ring(p: u64, m: u32) -> ResidueRing {
        ResidueRing::new(p, m).unwrap()
    }

    #[test]
    fn one_plus_t_times_one_minus_t() {
        let r = ring(5, 2);
        let a = TruncatedSeries::from_coeffs(r, 2, &[1, 1]);
        let b = TruncatedSeries::from_coeffs(r, 2, &[1, -1]);
        assert_eq!(a.mul(&b).unwrap(), TruncatedSeries::from_coeffs(r, 2, &[1, 0, -1]));
    }

    #[test]
    fn product_with_zero_vanishes() {
        let r = ring(7, 3);
        let a = TruncatedSeries::from_coeffs(r, 4, &[3, 1, 4, 1, 5]);
        assert!(a.mul(&TruncatedSeries::zero(r, 4)).unwrap().is_zero());
    }

    #[test]
    fn square_of_one_plus_pt_mod_p_squared() {
        let p = 5;
        let r = ring(p, 2);
        let a = TruncatedSeries::from_coeffs(r, 2, &[1, p as i128]);
        // (1 + pT)^2 = 1 + 2pT + p^2 T^2 and p^2 = 0.
        assert_eq!(a.mul(&a).unwrap(), TruncatedSeries::from_coeffs(r, 2, &[1, 2 * p as i128, 0]));
    }

    #[test]
    fn mismatched_rings_fail_loudly() {
        let a = TruncatedSeries::one(ring(5, 2), 3);
        let b = TruncatedSeries::one(ring(5, 3), 3);
        assert!(matches!(a.mul(&b), Err(Error::PrecisionMismatch(_))));
        let c = TruncatedSeries::one(ring(5, 2), 4);
        assert!(matches!(a.add(&c), Err(Error::PrecisionMismatch(_))));
    }

    #[test]
    fn newton_polygon_examples() {
        let p = 7;
        let r = ring(p, 2);
        let f = TruncatedSeries::from_coeffs(r, 16, &[p as i128, p as i128, 1]);
        assert_eq!(newton_polygon(&f).unwrap(), NewtonReading { lambda: 2, mu: 0, certified: true });

        let g = TruncatedSeries::from_coeffs(r, 16, &[p as i128, p as i128]);
        assert_eq!(newton_polygon(&g).unwrap(), NewtonReading { lambda: 0, mu: 1, certified: true });

        let mut t_d = vec![0i128; 9];
        t_d[8] = 1;
        let h = TruncatedSeries::from_coeffs(r, 8, &t_d);
        assert_eq!(newton_polygon(&h).unwrap(), NewtonReading { lambda: 8, mu: 0, certified: false });
    }

    #[test]
    fn zero_series_is_indeterminate() {
        let r = ring(3, 2);
        let f = TruncatedSeries::from_coeffs(r, 5, &[9, 18, 27]);
        assert_eq!(newton_polygon(&f), Err(Error::Indeterminate { precision: 2 }));
    }

    #[test]
    fn teichmuller_is_a_root_of_unity() {
        let r = ring(11, 3);
        for a in 1..11 {
            let w = r.teichmuller(a);
            assert_eq!(w % 11, a);
            assert_eq!(r.pow(w, 10), 1);
        }
    }

    #[test]
    fn ring_rejects_composites_and_overflow() {
        assert!(ResidueRing::new(9, 2).is_err());
        assert!(ResidueRing::new(3, 0).is_err());
        assert!(ResidueRing::new(1_000_003, 4).is_err());
    }
}
