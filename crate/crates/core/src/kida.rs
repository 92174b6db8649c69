//! Kida's formula for `lambda` and `mu` of minus class groups in a finite
//! `p`-extension `L/K` of cyclotomic `Z_p`-extensions, driven entirely by
//! decomposition and inertia orders.

use serde::{Deserialize, Serialize};

use crate::bernoulli::check_odd_prime;
use crate::error::{Error, Result};
use crate::padic::checked_pow;

/// A prime `v` of `K^+` together with its splitting data in `L/K`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PrimeDatum {
    pub id: String,
    #[serde(rename = "splits_in_K")]
    pub splits_in_k: bool,
    pub above_p: bool,
    #[serde(rename = "in_T")]
    pub in_t: bool,
    /// `|G_v|`.
    pub decomposition_order: u64,
    /// `|I_v|`.
    pub inertia_order: u64,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TowerData {
    pub p: u64,
    /// `[L:K]`.
    pub degree: u64,
    pub delta: u8,
    pub primes: Vec<PrimeDatum>,
    #[serde(rename = "lambda_K")]
    pub lambda_k: u64,
    #[serde(rename = "mu_K")]
    pub mu_k: u64,
    /// Asserted `theta(X_{L,T}^-) <= 1`; echoed, never checked.
    pub theta_ok: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct QMember {
    pub prime: PrimeDatum,
    /// `[G : G_v]`.
    pub g_v: u64,
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct QSet {
    pub members: Vec<QMember>,
}

impl QSet {
    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    pub fn g_sum(&self) -> u64 {
        self.members.iter().map(|m| m.g_v).sum()
    }
}

fn is_power_of(p: u64, mut n: u64) -> bool {
    if n == 0 {
        return false;
    }
    while n.is_multiple_of(p) {
        n /= p;
    }
    n == 1
}

impl TowerData {
    pub fn validate(&self) -> Result<()> {
        check_odd_prime(self.p)?;
        if !is_power_of(self.p, self.degree) {
            return Err(Error::Validation(format!("degree {} is not a power of {}", self.degree, self.p)));
        }
        if self.delta > 1 {
            return Err(Error::Validation(format!("delta must be 0 or 1, got {}", self.delta)));
        }
        for v in &self.primes {
            let (d, i) = (v.decomposition_order, v.inertia_order);
            if !is_power_of(self.p, d) || !is_power_of(self.p, i) {
                return Err(Error::Validation(format!("prime {}: orders must be powers of {}", v.id, self.p)));
            }
            if d % i != 0 || !self.degree.is_multiple_of(d) {
                return Err(Error::Validation(format!(
                    "prime {}: need |I_v| | |G_v| | [L:K], got {i}, {d}, {}",
                    v.id, self.degree
                )));
            }
        }
        Ok(())
    }
}

fn is_q_member(v: &PrimeDatum) -> bool {
    v.splits_in_k
        && if v.in_t {
            v.decomposition_order != 1
        } else {
            !v.above_p && v.inertia_order != 1
        }
}

/// The set `Q_{L/K}^T`: split primes outside `T` and away from `p` with
/// nontrivial inertia, plus split primes of `T` with nontrivial
/// decomposition group.
pub fn build_q_set(t: &TowerData) -> Result<QSet> {
    t.validate()?;
    let members = t
        .primes
        .iter()
        .filter(|v| is_q_member(v))
        .map(|v| QMember { prime: v.clone(), g_v: t.degree / v.decomposition_order })
        .collect();
    Ok(QSet { members })
}

/// `lambda(X_{L,T}^-) = [L:K](lambda_K - delta + |Q|) + delta - sum g_v`.
pub fn kida_lambda(t: &TowerData) -> Result<u64> {
    let q = build_q_set(t)?;
    let deg = t.degree as i128;
    let value = deg * (t.lambda_k as i128 - t.delta as i128 + q.len() as i128) + t.delta as i128
        - q.g_sum() as i128;
    if value < 0 {
        return Err(Error::InconsistentInput(format!("Kida's formula evaluates to {value}")));
    }
    Ok(value as u64)
}

/// `mu(X_{L,T}^-) = [L:K] mu_K`.
pub fn kida_mu(t: &TowerData) -> Result<u64> {
    t.validate()?;
    t.degree
        .checked_mul(t.mu_k)
        .ok_or_else(|| Error::Validation("mu overflows".into()))
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct KidaReport {
    pub lambda_l: u64,
    pub mu_l: u64,
    pub q_set: QSet,
    pub theta_ok: bool,
}

pub fn evaluate(t: &TowerData) -> Result<KidaReport> {
    Ok(KidaReport { lambda_l: kida_lambda(t)?, mu_l: kida_mu(t)?, q_set: build_q_set(t)?, theta_ok: t.theta_ok })
}

/// A prime in a tower with cyclic Galois group of order `p^t`; subgroups
/// are named by the exponent of their order.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CyclicPrime {
    pub id: String,
    pub splits_in_k: bool,
    pub above_p: bool,
    pub in_t: bool,
    pub decomposition_exp: u32,
    pub inertia_exp: u32,
}

/// `K ⊂ E ⊂ L` with `Gal(L/K)` cyclic of order `p^t` and `E` the fixed
/// field of its subgroup of order `p^s`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CyclicTower {
    pub p: u64,
    pub t: u32,
    pub s: u32,
    pub delta: u8,
    pub lambda_k: u64,
    pub mu_k: u64,
    pub primes: Vec<CyclicPrime>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TransitivityReport {
    pub lhs: i128,
    pub rhs: i128,
    pub lambda_stepwise: u64,
    pub lambda_direct: u64,
    pub mu_stepwise: u64,
    pub mu_direct: u64,
    pub pass: bool,
}

impl CyclicTower {
    /// Tower data for `L/K`, with `G_v`, `I_v` as given.
    pub fn direct(&self) -> Result<TowerData> {
        self.validate()?;
        let pw = |e| checked_pow(self.p, e).expect("validated");
        Ok(TowerData {
            p: self.p,
            degree: pw(self.t),
            delta: self.delta,
            primes: self
                .primes
                .iter()
                .map(|v| PrimeDatum {
                    id: v.id.clone(),
                    splits_in_k: v.splits_in_k,
                    above_p: v.above_p,
                    in_t: v.in_t,
                    decomposition_order: pw(v.decomposition_exp),
                    inertia_order: pw(v.inertia_exp),
                })
                .collect(),
            lambda_k: self.lambda_k,
            mu_k: self.mu_k,
            theta_ok: true,
        })
    }

    /// `E/K` sees the images `G_v H / H` and `I_v H / H`.
    pub fn lower(&self) -> Result<TowerData> {
        let mut t = self.direct()?;
        let pw = |e| checked_pow(self.p, e).expect("validated");
        t.degree = pw(self.t - self.s);
        for (d, v) in t.primes.iter_mut().zip(&self.primes) {
            d.decomposition_order = pw(v.decomposition_exp.max(self.s) - self.s);
            d.inertia_order = pw(v.inertia_exp.max(self.s) - self.s);
        }
        Ok(t)
    }

    /// `L/E`: each `v` has `[G : G_v H]` primes above it in `E`, each with
    /// decomposition group `G_v ∩ H` and inertia group `I_v ∩ H`.
    pub fn upper(&self, lambda_e: u64) -> Result<TowerData> {
        let mut t = self.direct()?;
        let pw = |e| checked_pow(self.p, e).expect("validated");
        t.degree = pw(self.s);
        t.lambda_k = lambda_e;
        t.mu_k = self.mu_k * pw(self.t - self.s);
        t.primes = self
            .primes
            .iter()
            .flat_map(|v| {
                let count = pw(self.t - v.decomposition_exp.max(self.s));
                (0..count).map(move |j| PrimeDatum {
                    id: format!("{}.{j}", v.id),
                    splits_in_k: v.splits_in_k,
                    above_p: v.above_p,
                    in_t: v.in_t,
                    decomposition_order: pw(v.decomposition_exp.min(self.s)),
                    inertia_order: pw(v.inertia_exp.min(self.s)),
                })
            })
            .collect();
        Ok(t)
    }

    fn validate(&self) -> Result<()> {
        check_odd_prime(self.p)?;
        if self.s == 0 || self.s >= self.t {
            return Err(Error::Validation(format!("need 0 < s < t, got s = {}, t = {}", self.s, self.t)));
        }
        checked_pow(self.p, self.t).ok_or_else(|| Error::Validation("degree overflows".into()))?;
        for v in &self.primes {
            if v.inertia_exp > v.decomposition_exp || v.decomposition_exp > self.t {
                return Err(Error::Validation(format!(
                    "prime {}: need inertia exponent {} <= decomposition exponent {} <= {}",
                    v.id, v.inertia_exp, v.decomposition_exp, self.t
                )));
            }
            // Over the cyclotomic Z_p-extension the residue field already
            // absorbs every unramified p-extension, so away from p the
            // decomposition and inertia groups coincide.
            if !v.above_p && v.inertia_exp != v.decomposition_exp {
                return Err(Error::Validation(format!("prime {}: G_v != I_v away from p", v.id)));
            }
        }
        Ok(())
    }
}

/// Compares the two-step and one-step evaluations of Kida's formula, and
/// the combinatorial identity that makes them agree.
pub fn transitivity_check(tower: &CyclicTower) -> Result<TransitivityReport> {
    let direct = tower.direct()?;
    let lower = tower.lower()?;
    let q_l = build_q_set(&direct)?;
    let q_e = build_q_set(&lower)?;
    let lambda_e = kida_lambda(&lower)?;
    let upper = tower.upper(lambda_e)?;
    let q_u = build_q_set(&upper)?;

    let deg = direct.degree as i128;
    let upper_deg = upper.degree as i128;
    let lhs: i128 = q_e.members.iter().map(|m| deg - upper_deg * m.g_v as i128).sum::<i128>()
        + q_u.members.iter().map(|m| upper_deg - m.g_v as i128).sum::<i128>();
    let rhs: i128 = q_l.members.iter().map(|m| deg - m.g_v as i128).sum();

    let lambda_stepwise = kida_lambda(&upper)?;
    let lambda_direct = kida_lambda(&direct)?;
    let mu_stepwise = kida_mu(&upper)?;
    let mu_direct = kida_mu(&direct)?;
    Ok(TransitivityReport {
        lhs,
        rhs,
        lambda_stepwise,
        lambda_direct,
        mu_stepwise,
        mu_direct,
        pass: lhs == rhs && lambda_stepwise == lambda_direct && mu_stepwise == mu_direct,
    })
}

/// Every consistent assignment of splitting data to `primes` primes in a
/// cyclic tower of order `p^2`.
pub fn exhaustive_towers(p: u64, primes: usize, lambda_k: u64, mu_k: u64, delta: u8) -> Vec<CyclicTower> {
    let mut kinds = Vec::new();
    for splits_in_k in [false, true] {
        for above_p in [false, true] {
            for in_t in [false, true] {
                for d in 0..=2u32 {
                    for i in 0..=d {
                        if !above_p && i != d {
                            continue;
                        }
                        kinds.push((splits_in_k, above_p, in_t, d, i));
                    }
                }
            }
        }
    }
    let mut out = Vec::new();
    let mut idx = vec![0usize; primes];
    loop {
        let primes = idx
            .iter()
            .enumerate()
            .map(|(n, &k)| {
                let (splits_in_k, above_p, in_t, d, i) = kinds[k];
                CyclicPrime {
                    id: format!("v{n}"),
                    splits_in_k,
                    above_p,
                    in_t,
                    decomposition_exp: d,
                    inertia_exp: i,
                }
            })
            .collect();
        out.push(CyclicTower { p, t: 2, s: 1, delta, lambda_k, mu_k, primes });
        // Nondecreasing index tuples: primes are unordered.
        let Some(pos) = (0..idx.len()).rev().find(|&j| idx[j] + 1 < kinds.len()) else {
            break;
        };
        idx[pos] += 1;
        let v = idx[pos];
        for slot in idx.iter_mut().skip(pos + 1) {
            *slot = v;
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn prime(split: bool, above_p: bool, in_t: bool, d: u64, i: u64) -> PrimeDatum {
        PrimeDatum {
            id: "v".into(),
            splits_in_k: split,
            above_p,
            in_t,
            decomposition_order: d,
            inertia_order: i,
        }
    }

    fn tower(p: u64, degree: u64, delta: u8, lambda_k: u64, primes: Vec<PrimeDatum>) -> TowerData {
        TowerData { p, degree, delta, primes, lambda_k, mu_k: 0, theta_ok: true }
    }

    #[test]
    fn q_set_membership() {
        let t = tower(3, 9, 1, 1, vec![prime(true, false, false, 3, 3)]);
        let q = build_q_set(&t).unwrap();
        assert_eq!(q.len(), 1);
        assert_eq!(q.members[0].g_v, 3);

        let above = tower(3, 9, 1, 1, vec![prime(true, true, false, 9, 9)]);
        assert!(build_q_set(&above).unwrap().is_empty());

        let trivial_t = tower(3, 9, 1, 1, vec![prime(true, false, true, 1, 1)]);
        assert!(build_q_set(&trivial_t).unwrap().is_empty());

        let nonsplit = tower(3, 9, 1, 1, vec![prime(false, false, false, 9, 9)]);
        assert!(build_q_set(&nonsplit).unwrap().is_empty());
    }

    #[test]
    fn moving_into_t_switches_criterion() {
        // I_v = 1 != G_v: outside T it is no member, inside T it is.
        let out = tower(5, 25, 1, 1, vec![prime(true, false, false, 5, 1)]);
        let inside = tower(5, 25, 1, 1, vec![prime(true, false, true, 5, 1)]);
        assert!(build_q_set(&out).unwrap().is_empty());
        assert_eq!(build_q_set(&inside).unwrap().members[0].g_v, 5);
    }

    #[test]
    fn rejects_non_dividing_orders() {
        let bad = tower(3, 9, 1, 1, vec![prime(true, false, false, 3, 9)]);
        assert!(matches!(build_q_set(&bad), Err(Error::Validation(_))));
        let bad_degree = tower(3, 6, 1, 1, vec![]);
        assert!(build_q_set(&bad_degree).is_err());
        let too_big = tower(3, 3, 1, 1, vec![prime(true, false, false, 9, 9)]);
        assert!(build_q_set(&too_big).is_err());
    }

    #[test]
    fn lambda_examples() {
        let id = tower(7, 1, 1, 4, vec![prime(true, false, false, 1, 1)]);
        assert_eq!(kida_lambda(&id).unwrap(), 4);
        let p = 5;
        assert_eq!(kida_lambda(&tower(p, p, 1, 2, vec![])).unwrap(), p + 1);
        let nine = tower(3, 9, 1, 1, vec![prime(true, false, false, 3, 3)]);
        assert_eq!(kida_lambda(&nine).unwrap(), 7);
    }

    #[test]
    fn negative_lambda_is_an_input_error() {
        let t = tower(3, 9, 1, 0, vec![]);
        assert!(matches!(kida_lambda(&t), Err(Error::InconsistentInput(_))));
    }

    #[test]
    fn mu_examples() {
        let mut t = tower(3, 3, 1, 1, vec![]);
        assert_eq!(kida_mu(&t).unwrap(), 0);
        t.mu_k = 1;
        assert_eq!(kida_mu(&t).unwrap(), 3);
        t.degree = 9;
        t.mu_k = 2;
        assert_eq!(kida_mu(&t).unwrap(), 18);
    }

    fn cyclic(d: u32, i: u32, above_p: bool, in_t: bool) -> CyclicTower {
        CyclicTower {
            p: 3,
            t: 2,
            s: 1,
            delta: 1,
            lambda_k: 1,
            mu_k: 0,
            primes: vec![CyclicPrime {
                id: "v".into(),
                splits_in_k: true,
                above_p,
                in_t,
                decomposition_exp: d,
                inertia_exp: i,
            }],
        }
    }

    #[test]
    fn order_p_decomposition_group() {
        let r = transitivity_check(&cyclic(1, 1, false, false)).unwrap();
        assert_eq!((r.lhs, r.rhs), (6, 6));
        assert!(r.pass);
    }

    #[test]
    fn full_decomposition_group() {
        let r = transitivity_check(&cyclic(2, 2, false, false)).unwrap();
        assert_eq!((r.lhs, r.rhs), (8, 8));
        assert!(r.pass);
    }

    #[test]
    fn no_ramification() {
        let mut t = cyclic(0, 0, false, false);
        assert_eq!(transitivity_check(&t).unwrap().lhs, 0);
        t.primes.clear();
        let r = transitivity_check(&t).unwrap();
        assert_eq!((r.lhs, r.rhs, r.pass), (0, 0, true));
    }

    #[test]
    fn inconsistent_orbit_data() {
        assert!(matches!(transitivity_check(&cyclic(1, 2, true, false)), Err(Error::Validation(_))));
        assert!(matches!(transitivity_check(&cyclic(2, 1, false, false)), Err(Error::Validation(_))));
        assert!(matches!(transitivity_check(&cyclic(3, 3, true, false)), Err(Error::Validation(_))));
    }

    #[test]
    fn exhaustive_family_sizes() {
        // Per prime: split flag, T flag, and 3 subgroup choices away from p
        // or 6 (G_v, I_v) pairs above p.
        assert_eq!(exhaustive_towers(3, 1, 1, 0, 1).len(), 36);
        assert_eq!(exhaustive_towers(3, 2, 1, 0, 1).len(), 36 * 37 / 2);
    }
}
