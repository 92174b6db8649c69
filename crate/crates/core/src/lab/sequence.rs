//! Exactness of finite sequences and order accounting along them.

use serde::{Deserialize, Serialize};

use super::group::{AbelianPGroup, Hom};
use crate::error::{Error, Result};
use crate::padic::{checked_pow, valuation};

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ExactnessReport {
    pub exact: bool,
    /// Index of the first node where image and kernel differ.
    pub first_failure: Option<usize>,
    pub reason: Option<String>,
}

/// Checks `groups[0] -> groups[1] -> ... -> groups[n]` with `maps[i]` the
/// arrow out of node `i`. Exactness is tested at the interior nodes, so a
/// short exact sequence is passed with trivial groups at both ends.
pub fn check_exactness(groups: &[AbelianPGroup], maps: &[Hom]) -> Result<ExactnessReport> {
    if groups.len() != maps.len() + 1 {
        return Err(Error::ShapeMismatch(format!("{} groups need {} maps", groups.len(), groups.len().saturating_sub(1))));
    }
    for (i, f) in maps.iter().enumerate() {
        if f.src != groups[i] || f.dst != groups[i + 1] {
            return Err(Error::ShapeMismatch(format!("map {i} does not go from node {i} to node {}", i + 1)));
        }
    }
    for i in 1..maps.len() {
        let image = maps[i - 1].image();
        let kernel = maps[i].kernel();
        let fail = |reason: String| ExactnessReport { exact: false, first_failure: Some(i), reason: Some(reason) };
        if !image.is_subgroup_of(&kernel) {
            return Ok(fail("composite of consecutive maps is nonzero".into()));
        }
        if image.log_order() != kernel.log_order() {
            return Ok(fail(format!(
                "|image| = p^{} but |kernel| = p^{}",
                image.log_order(),
                kernel.log_order()
            )));
        }
    }
    Ok(ExactnessReport { exact: true, first_failure: None, reason: None })
}

/// `Σ (-1)^i log_p |A_i|`, which vanishes on a finite exact sequence
/// bounded by zeros.
pub fn alternating_log_order(groups: &[AbelianPGroup]) -> i64 {
    groups.iter().enumerate().map(|(i, g)| if i % 2 == 0 { g.log_order() as i64 } else { -(g.log_order() as i64) }).sum()
}

/// The canonical split sequence `0 -> a -> a + b -> b -> 0`.
pub fn split_sequence(a: &AbelianPGroup, b: &AbelianPGroup) -> Result<(Vec<AbelianPGroup>, Vec<Hom>)> {
    let sum = a.direct_sum(b)?;
    let zero = AbelianPGroup::new(a.p(), vec![])?;
    let (da, db) = (a.dim(), b.dim());
    let inc: Vec<Vec<i128>> = (0..da + db).map(|i| (0..da).map(|j| (i == j) as i128).collect()).collect();
    let proj: Vec<Vec<i128>> = (0..db).map(|i| (0..da + db).map(|j| (j == da + i) as i128).collect()).collect();
    let maps = vec![
        Hom::zero(&zero, a),
        Hom::new(a, &sum, &inc)?,
        Hom::new(&sum, b, &proj)?,
        Hom::zero(b, &zero),
    ];
    Ok((vec![zero.clone(), a.clone(), sum, b.clone(), zero], maps))
}

/// The exact sequence `0 -> A_1 -> ... -> A_n -> 0` with
/// `A_i = K_{i-1} + K_i` (`K_0 = K_n = 0`) and maps `(x, y) -> (y, 0)`,
/// built from the inner kernels `K_1, ..., K_{n-1}`.
pub fn exact_chain(kernels: &[AbelianPGroup]) -> Result<(Vec<AbelianPGroup>, Vec<Hom>)> {
    let p = kernels.first().map_or(Err(Error::Validation("need at least one kernel".into())), |k| Ok(k.p()))?;
    let zero = AbelianPGroup::new(p, vec![])?;
    let mut ks = vec![zero.clone()];
    ks.extend_from_slice(kernels);
    ks.push(zero.clone());
    let mut groups = vec![zero.clone()];
    for w in ks.windows(2) {
        groups.push(w[0].direct_sum(&w[1])?);
    }
    groups.push(zero);
    let mut maps = vec![Hom::zero(&groups[0], &groups[1])];
    for i in 1..groups.len() - 2 {
        // A_i = K_{i-1} + K_i -> A_{i+1} = K_i + K_{i+1}.
        let (skip, keep) = (ks[i - 1].dim(), ks[i].dim());
        let (src, dst) = (&groups[i], &groups[i + 1]);
        let m: Vec<Vec<i128>> = (0..dst.dim()).map(|r| (0..src.dim()).map(|c| (r < keep && c == skip + r) as i128).collect()).collect();
        maps.push(Hom::new(src, dst, &m)?);
    }
    let n = groups.len();
    maps.push(Hom::zero(&groups[n - 2], &groups[n - 1]));
    Ok((groups, maps))
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PsiVerdict {
    /// `log_p` of `|Ĥ^0| / |Ĥ^-1|`.
    pub herbrand_log: i64,
    /// `δ - |Q|`.
    pub expected_log: i64,
    pub herbrand_ok: bool,
    /// Alternating `log_p`-sum of the supplied order vector, when given.
    pub alternating_log: Option<i64>,
    pub consistent: bool,
}

fn log_p_order(p: u64, n: u64, what: &str) -> Result<i64> {
    let v = valuation(n as u128, p).ok_or_else(|| Error::Validation(format!("{what} has order 0")))?;
    if checked_pow(p, v) != Some(n) {
        return Err(Error::Validation(format!("{what} = {n} is not a power of {p}")));
    }
    Ok(v as i64)
}

/// Checks `|Ĥ^0| / |Ĥ^-1| = p^{δ - |Q|}` and, when `orders` lists the
/// terms of an exact sequence bounded by zeros (for instance one period of
/// a periodic sequence), that their alternating `log_p`-sum vanishes.
pub fn psi_herbrand(
    p: u64,
    delta: u8,
    q_size: u64,
    h0_order: u64,
    hminus1_order: u64,
    orders: Option<&[u64]>,
) -> Result<PsiVerdict> {
    crate::bernoulli::check_odd_prime(p)?;
    if delta > 1 {
        return Err(Error::Validation(format!("delta must be 0 or 1, got {delta}")));
    }
    let herbrand_log = log_p_order(p, h0_order, "|H^0|")? - log_p_order(p, hminus1_order, "|H^-1|")?;
    let expected_log = delta as i64 - q_size as i64;
    let alternating_log = orders
        .map(|os| {
            os.iter()
                .enumerate()
                .map(|(i, &n)| Ok(if i % 2 == 0 { 1 } else { -1 } * log_p_order(p, n, &format!("term {i}"))?))
                .sum::<Result<i64>>()
        })
        .transpose()?;
    let herbrand_ok = herbrand_log == expected_log;
    Ok(PsiVerdict {
        herbrand_log,
        expected_log,
        herbrand_ok,
        alternating_log,
        consistent: herbrand_ok && alternating_log.is_none_or(|a| a == 0),
    })
}

/// Orders of the five nonzero terms of the minus-part sequence
/// `0 -> (G⊗G)^S -> Ĥ^0 ⊗ G -> μ_p^δ -> G^{Q+S} -> Ĥ^-1 -> 0`, with both
/// cohomology groups killed by `p`.
pub fn psi_minus_orders(p: u64, delta: u8, q_size: u64, s_size: u64, h0_order: u64, hminus1_order: u64) -> Result<Vec<u64>> {
    let pow = |e: u64| {
        u32::try_from(e)
            .ok()
            .and_then(|e| checked_pow(p, e))
            .ok_or_else(|| Error::Range(format!("{p}^{e} overflows")))
    };
    Ok(vec![pow(s_size)?, h0_order, pow(delta as u64)?, pow(q_size + s_size)?, hminus1_order])
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cyclic(p: u64, r: u32) -> AbelianPGroup {
        AbelianPGroup::new(p, vec![r]).unwrap()
    }

    fn chain(groups: Vec<AbelianPGroup>, mats: &[Vec<Vec<i128>>]) -> ExactnessReport {
        let maps: Vec<Hom> = groups.windows(2).zip(mats).map(|(w, m)| Hom::new(&w[0], &w[1], m).unwrap()).collect();
        check_exactness(&groups, &maps).unwrap()
    }

    #[test]
    fn split_passes() {
        let a = AbelianPGroup::new(3, vec![1, 2]).unwrap();
        let b = AbelianPGroup::new(3, vec![3]).unwrap();
        let (gs, ms) = split_sequence(&a, &b).unwrap();
        assert!(check_exactness(&gs, &ms).unwrap().exact);
        assert_eq!(alternating_log_order(&gs), 0);
    }

    #[test]
    fn multiplication_by_p() {
        let (z, a, b) = (AbelianPGroup::new(5, vec![]).unwrap(), cyclic(5, 1), cyclic(5, 2));
        let r = chain(vec![z.clone(), a.clone(), b.clone(), a.clone(), z.clone()], &[vec![vec![]; 1], vec![vec![5]], vec![vec![1]], vec![]]);
        assert!(r.exact);
        // Z/p -> Z/p^2 -> Z/p^2 -> 0 can never be exact: the orders disagree.
        for m in 0..25 {
            let Ok(f) = Hom::new(&b, &b, &[vec![m]]) else { continue };
            let gs = vec![z.clone(), a.clone(), b.clone(), b.clone(), z.clone()];
            let ms = vec![Hom::zero(&z, &a), Hom::new(&a, &b, &[vec![5]]).unwrap(), f, Hom::zero(&b, &z)];
            let r = check_exactness(&gs, &ms).unwrap();
            assert!(!r.exact);
            assert!(r.first_failure.is_some());
        }
    }

    #[test]
    fn nonzero_composite_detected() {
        let (z, a) = (AbelianPGroup::new(3, vec![]).unwrap(), cyclic(3, 1));
        let r = chain(vec![z, a.clone(), a.clone(), a], &[vec![vec![]], vec![vec![1]], vec![vec![1]]]);
        assert_eq!(r.first_failure, Some(2));
    }

    #[test]
    fn shape_errors() {
        let a = cyclic(3, 1);
        assert!(matches!(check_exactness(&[a.clone(), a.clone()], &[]), Err(Error::ShapeMismatch(_))));
        let b = cyclic(3, 2);
        let f = Hom::zero(&b, &a);
        assert!(matches!(check_exactness(&[a.clone(), a], &[f]), Err(Error::ShapeMismatch(_))));
    }

    #[test]
    fn chains_are_exact() {
        let ks: Vec<AbelianPGroup> = [vec![1], vec![2, 1], vec![], vec![3], vec![1, 1]]
            .into_iter()
            .map(|e| AbelianPGroup::new(3, e).unwrap())
            .collect();
        let (gs, ms) = exact_chain(&ks).unwrap();
        assert_eq!(gs.len(), 8);
        assert!(check_exactness(&gs, &ms).unwrap().exact);
        assert_eq!(alternating_log_order(&gs), 0);
    }

    #[test]
    fn psi_examples() {
        let v = psi_herbrand(3, 1, 0, 3, 1, None).unwrap();
        assert!(v.consistent);
        assert_eq!(v.herbrand_log, 1);
        let v = psi_herbrand(5, 0, 2, 1, 25, None).unwrap();
        assert!(v.consistent);
        assert!(!psi_herbrand(5, 0, 2, 1, 5, None).unwrap().consistent);
        assert!(matches!(psi_herbrand(3, 1, 0, 6, 1, None), Err(Error::Validation(_))));
    }

    #[test]
    fn psi_minus_sequence_balances_exactly_when_herbrand_does() {
        let p: u64 = 3;
        for delta in 0..=1u8 {
            for q in 0..4 {
                for s in 0..3 {
                    for (e0, e1) in [(0u32, 0u32), (1, 0), (0, 1), (2, 3), (3, 1)] {
                        let (h0, h1) = (p.pow(e0), p.pow(e1));
                        let orders = psi_minus_orders(p, delta, q, s, h0, h1).unwrap();
                        let v = psi_herbrand(p, delta, q, h0, h1, Some(&orders)).unwrap();
                        assert_eq!(v.herbrand_ok, v.alternating_log == Some(0));
                    }
                }
            }
        }
    }
}
