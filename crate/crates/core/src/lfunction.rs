//! Branch power series from Stickelberger elements, and the minus-part
//! invariants of `K = Q(mu_{p^infty})`.
//!
//! For an even index `k` the branch series is the `omega^{k-1}`-component of
//! the level-`n` Stickelberger element
//!
//! ```text
//!     theta_n = sum_{a mod p^{n+1}, p !| a} (a / p^{n+1} - 1/2) sigma_a^{-1}
//! ```
//!
//! in `Z_p[Gal(Q(mu_{p^{n+1}})/Q)] = Z_p[Delta][Gamma_n]`. Writing
//! `a = omega(a) (1+p)^{i(a)} mod p^{n+1}` and `sigma_{1+p} = 1 + T`, the
//! component is
//!
//! ```text
//!     g_n(T) = p^{-(n+1)} sum_a a omega^{k-1}(a) (1+T)^{i(a)}   mod (1+T)^{p^n} - 1.
//! ```
//!
//! The `-1/2` part cancels because `omega^{k-1}` is odd, and the sum is
//! divisible by `p^{n+1}` because `p - 1` does not divide `k`. Modulo `p`,
//! reduction by `(1+T)^{p^n} - 1` leaves coefficients below degree `p^n`
//! untouched, so the Weierstrass degree of `g_n` is that of the limit
//! series once it is below `p^n`.
//!
//! Convention: each irregular pair `(p, k)` contributes the `lambda` of its
//! branch to `lambda(X_K^-)`; by reflection the branch indexed by even `k`
//! controls the odd eigenspace `omega^{1-k}` of `X_K^-`.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::bernoulli::{check_odd_prime, irregular_pairs};
use crate::error::{Error, Result};
use crate::padic::{
    checked_pow, is_prime, mul_mod, newton_polygon, ResidueRing, TruncatedSeries, DEFAULT_DEGREE_CAP,
};

/// Precision knobs for branch computations.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct BranchConfig {
    pub level: u32,
    pub precision: u32,
    pub degree_cap: usize,
    /// Largest `(level, precision)` the escalation may reach.
    pub max_level: u32,
    pub max_precision: u32,
}

impl Default for BranchConfig {
    fn default() -> Self {
        Self { level: 2, precision: 2, degree_cap: DEFAULT_DEGREE_CAP, max_level: 4, max_precision: 3 }
    }
}

impl BranchConfig {
    /// Escalation schedule: level first, then precision.
    fn schedule(&self) -> Vec<(u32, u32)> {
        let mut out = Vec::new();
        let mut n = self.level;
        while n <= self.max_level.max(self.level) {
            out.push((n, self.precision));
            n += 1;
        }
        let top = self.max_level.max(self.level);
        for m in self.precision + 1..=self.max_precision {
            out.push((top, m));
        }
        out
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct BranchSeries {
    pub p: u64,
    pub k: u64,
    pub level: u32,
    pub precision: u32,
    pub series: TruncatedSeries,
    pub lambda: usize,
    pub mu: u32,
    pub certified: bool,
}

/// Level-`n` branch series for the even index `k`, coefficients mod `p^m`.
///
/// The returned series is truncated at `min(degree_cap, p^n - 1)`; an
/// answer that might change with more terms comes back uncertified.
pub fn branch_series(p: u64, k: u64, level: u32, precision: u32, degree_cap: usize) -> Result<BranchSeries> {
    Ok(branch_series_batch(p, &[k], level, precision, degree_cap)?.remove(0))
}

/// Several branches of the same prime share one pass over the units.
pub fn branch_series_batch(
    p: u64,
    ks: &[u64],
    level: u32,
    precision: u32,
    degree_cap: usize,
) -> Result<Vec<BranchSeries>> {
    check_odd_prime(p)?;
    if level == 0 || precision == 0 {
        return Err(Error::PrecisionMismatch("level and precision must be at least 1".into()));
    }
    for &k in ks {
        if k % 2 != 0 || k < 2 || k + 3 > p {
            return Err(Error::Validation(format!("branch index {k} is not an even integer in [2, {}]", p.saturating_sub(3))));
        }
    }
    let exhausted = || Error::PrecisionExhausted { p, level, precision };
    let big_exp = precision + level + 1;
    let big = checked_pow(p, big_exp).filter(|&q| q < (1 << 62)).ok_or_else(exhausted)?;
    let conductor = checked_pow(p, level + 1).ok_or_else(exhausted)?;
    let width = checked_pow(p, level).ok_or_else(exhausted)?;
    // Accumulators hold sum over p-1 terms below conductor * big.
    (p as u128)
        .checked_mul(conductor as u128)
        .and_then(|x| x.checked_mul(big as u128))
        .filter(|&x| x < (1u128 << 126))
        .ok_or_else(exhausted)?;

    let big_ring = ResidueRing::new(p, big_exp)?;
    let ring = ResidueRing::new(p, precision)?;
    let teich: Vec<u64> = (1..p).map(|j| big_ring.teichmuller(j)).collect();
    let teich_short: Vec<u64> = teich.iter().map(|&z| z % conductor).collect();
    let chars: Vec<Vec<u64>> = ks
        .iter()
        .map(|&k| teich.iter().map(|&z| big_ring.pow(z, k - 1)).collect())
        .collect();

    let deg = degree_cap.min(width as usize - 1);
    let mut coeffs = vec![vec![0u64; deg + 1]; ks.len()];
    let mut binom = vec![0u64; deg + 1];
    binom[0] = 1 % ring.modulus();
    let mut gamma_power = 1u64;
    let mut acc = vec![0u128; ks.len()];
    for _b in 0..width {
        acc.iter_mut().for_each(|x| *x = 0);
        for (j, &z) in teich_short.iter().enumerate() {
            let a = mul_mod(z, gamma_power, conductor) as u128;
            for (slot, ch) in acc.iter_mut().zip(&chars) {
                *slot += a * ch[j] as u128;
            }
        }
        for (branch, &total) in coeffs.iter_mut().zip(&acc) {
            let total = (total % big as u128) as u64;
            debug_assert_eq!(total % conductor, 0, "Stickelberger sum not integral");
            let c = (total / conductor) % ring.modulus();
            if c != 0 {
                for (slot, &bin) in branch.iter_mut().zip(&binom) {
                    *slot = ring.add(*slot, ring.mul(c, bin));
                }
            }
        }
        // binom <- C(b+1, .)
        for i in (1..=deg).rev() {
            binom[i] = ring.add(binom[i], binom[i - 1]);
        }
        gamma_power = mul_mod(gamma_power, 1 + p, conductor);
    }

    ks.iter()
        .zip(coeffs)
        .map(|(&k, cs)| {
            let signed: Vec<i128> = cs.into_iter().map(|c| c as i128).collect();
            let series = TruncatedSeries::from_coeffs(ring, deg, &signed);
            let reading = newton_polygon(&series)?;
            Ok(BranchSeries {
                p,
                k,
                level,
                precision,
                series,
                lambda: reading.lambda,
                mu: reading.mu,
                certified: reading.certified,
            })
        })
        .collect()
}

/// Runs the escalation schedule until the branch certifies.
pub fn certified_branch(p: u64, k: u64, config: &BranchConfig) -> Result<BranchSeries> {
    let mut last = None;
    for (n, m) in config.schedule() {
        match branch_series(p, k, n, m, config.degree_cap) {
            Ok(b) if b.certified => return Ok(b),
            Ok(_) | Err(Error::Indeterminate { .. }) => last = Some((n, m)),
            Err(e @ Error::PrecisionExhausted { .. }) => return Err(e),
            Err(e) => return Err(e),
        }
    }
    let (level, precision) = last.unwrap_or((config.level, config.precision));
    Err(Error::PrecisionExhausted { p, level, precision })
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct MinusInvariants {
    pub p: u64,
    pub lambda_minus: usize,
    pub mu_minus: u32,
    pub branches: Vec<BranchSeries>,
    /// Base field is `Q(mu_p)`, which contains `mu_p`.
    pub delta: u8,
    /// Set when some branch has nonzero `mu`; never expected for abelian fields.
    pub mu_anomaly: bool,
}

/// `lambda(X_K^-)` and `mu(X_K^-)` for `K = Q(mu_{p^infty})`.
pub fn minus_invariants(p: u64, config: &BranchConfig) -> Result<MinusInvariants> {
    let pairs = irregular_pairs(p)?;
    let ks: Vec<u64> = pairs.iter().map(|x| x.k).collect();
    let mut branches = Vec::new();
    if !ks.is_empty() {
        // One batched pass at the starting precision, then escalate stragglers.
        let first = branch_series_batch(p, &ks, config.level, config.precision, config.degree_cap);
        match first {
            Ok(batch) => {
                for b in batch {
                    if b.certified {
                        branches.push(b);
                    } else {
                        branches.push(certified_branch(p, b.k, config)?);
                    }
                }
            }
            Err(Error::Indeterminate { .. }) => {
                for &k in &ks {
                    branches.push(certified_branch(p, k, config)?);
                }
            }
            Err(e) => return Err(e),
        }
    }
    let lambda_minus = branches.iter().map(|b| b.lambda).sum();
    let mu_minus = branches.iter().map(|b| b.mu).sum();
    Ok(MinusInvariants { p, lambda_minus, mu_minus, mu_anomaly: mu_minus != 0, branches, delta: 1 })
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ScanEntry {
    pub p: u64,
    pub lambda_minus: Option<usize>,
    pub mu_minus: Option<u32>,
    pub certified: bool,
    pub irregular_indices: Vec<u64>,
    pub error: Option<String>,
}

/// `lambda(X_K^-)` for every irregular prime up to `max_p`, ascending.
///
/// Primes are distributed over the current rayon pool; a failure on one
/// prime is recorded in its entry and does not abort the scan.
pub fn scan_lambda(max_p: u64, config: &BranchConfig) -> Result<Vec<ScanEntry>> {
    if max_p < 3 {
        return Err(Error::Validation("scan bound must be at least 3".into()));
    }
    let primes: Vec<u64> = (3..=max_p).filter(|&p| is_prime(p)).collect();
    let entries: Vec<Option<ScanEntry>> = primes
        .par_iter()
        .map(|&p| {
            let pairs = irregular_pairs(p).ok()?;
            if pairs.is_empty() {
                return None;
            }
            let irregular_indices = pairs.iter().map(|x| x.k).collect();
            Some(match minus_invariants(p, config) {
                Ok(inv) => ScanEntry {
                    p,
                    lambda_minus: Some(inv.lambda_minus),
                    mu_minus: Some(inv.mu_minus),
                    certified: inv.branches.iter().all(|b| b.certified) && !inv.mu_anomaly,
                    irregular_indices,
                    error: None,
                },
                Err(e) => ScanEntry {
                    p,
                    lambda_minus: None,
                    mu_minus: None,
                    certified: false,
                    irregular_indices,
                    error: Some(e.to_string()),
                },
            })
        })
        .collect();
    Ok(entries.into_iter().flatten().collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn regular_branch_has_unit_constant_term() {
        let b = branch_series(5, 2, 2, 2, 16).unwrap();
        assert_eq!((b.lambda, b.mu, b.certified), (0, 0, true));
        assert_ne!(b.series.coeff(0) % 5, 0);
    }

    #[test]
    fn p37_branch_32() {
        let b = branch_series(37, 32, 2, 2, 16).unwrap();
        assert_eq!(b.series.coeff(0) % 37, 0);
        assert_eq!((b.lambda, b.mu, b.certified), (1, 0, true));
    }

    #[test]
    fn small_minus_invariants() {
        let cfg = BranchConfig::default();
        assert_eq!(minus_invariants(3, &cfg).unwrap().lambda_minus, 0);
        let m37 = minus_invariants(37, &cfg).unwrap();
        assert_eq!((m37.lambda_minus, m37.mu_minus, m37.delta), (1, 0, 1));
    }

    #[test]
    fn rejects_bad_indices() {
        assert!(branch_series(37, 33, 2, 2, 16).is_err());
        assert!(branch_series(37, 36, 2, 2, 16).is_err());
        assert!(branch_series(2, 2, 2, 2, 16).is_err());
    }

    #[test]
    fn schedule_escalates_level_then_precision() {
        let s = BranchConfig::default().schedule();
        assert_eq!(s, vec![(2, 2), (3, 2), (4, 2), (4, 3)]);
    }

    #[test]
    fn tiny_scan_is_empty() {
        assert!(scan_lambda(10, &BranchConfig::default()).unwrap().is_empty());
        assert!(scan_lambda(2, &BranchConfig::default()).is_err());
    }
}
