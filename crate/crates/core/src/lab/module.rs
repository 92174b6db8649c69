use serde::{Deserialize, Serialize};

use super::group::{AbelianPGroup, Hom, Subgroup};
use crate::error::{Error, Result};

/// A finite abelian `p`-group with an action of `G = <g>` of order `p` and
/// optionally a commuting automorphism `gamma`.
///
/// Matrices act on columns: entry `(i, j)` is the `i`-th coordinate of the
/// image of the `j`-th generator.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct GModule {
    pub p: u64,
    /// Generator orders are `p^{factors[i]}`.
    pub factors: Vec<u32>,
    pub action_g: Vec<Vec<u64>>,
    #[serde(default)]
    pub action_gamma: Option<Vec<Vec<u64>>>,
    /// Truncation level `n` when `gamma` has order dividing `p^n`.
    #[serde(default)]
    pub level: Option<u32>,
}

impl GModule {
    pub fn new(p: u64, factors: Vec<u32>, action_g: Vec<Vec<i128>>, action_gamma: Option<Vec<Vec<i128>>>) -> Result<Self> {
        let group = AbelianPGroup::new(p, factors.clone())?;
        let g = Hom::new(&group, &group, &action_g)?;
        let gamma = action_gamma.map(|m| Hom::new(&group, &group, &m)).transpose()?;
        let m = Self { p, factors, action_g: g.matrix, action_gamma: gamma.map(|h| h.matrix), level: None };
        m.validate()?;
        Ok(m)
    }

    pub fn with_level(mut self, n: u32) -> Self {
        self.level = Some(n);
        self
    }

    pub fn group(&self) -> Result<AbelianPGroup> {
        AbelianPGroup::new(self.p, self.factors.clone())
    }

    fn as_signed(m: &[Vec<u64>]) -> Vec<Vec<i128>> {
        m.iter().map(|r| r.iter().map(|&x| x as i128).collect()).collect()
    }

    pub fn g(&self) -> Result<Hom> {
        let group = self.group()?;
        Hom::new(&group, &group, &Self::as_signed(&self.action_g))
    }

    pub fn gamma(&self) -> Result<Option<Hom>> {
        let group = self.group()?;
        self.action_gamma.as_ref().map(|m| Hom::new(&group, &group, &Self::as_signed(m))).transpose()
    }

    /// `g^p = 1`, `gamma` bijective and commuting with `g`.
    pub fn validate(&self) -> Result<()> {
        let g = self.g()?;
        if !g.pow(self.p as u32)?.is_identity() {
            return Err(Error::Validation("action of g does not have order dividing p".into()));
        }
        if let Some(gamma) = self.gamma()? {
            if gamma.compose(&g)? != g.compose(&gamma)? {
                return Err(Error::Validation("actions of g and gamma do not commute".into()));
            }
            if !gamma.kernel().is_trivial() {
                return Err(Error::Validation("gamma is not an automorphism".into()));
            }
        }
        Ok(())
    }

    pub fn log_order(&self) -> u64 {
        self.factors.iter().map(|&r| r as u64).sum()
    }

    pub fn zero(p: u64) -> Self {
        Self { p, factors: vec![], action_g: vec![], action_gamma: None, level: None }
    }
}

/// `g - 1` and the norm `1 + g + ... + g^{p-1}`.
pub(crate) fn difference_and_norm(g: &Hom, p: u64) -> Result<(Hom, Hom)> {
    let id = Hom::identity(&g.src);
    let diff = g.sub(&id)?;
    let mut norm = Hom::zero(&g.src, &g.src);
    let mut power = id;
    for _ in 0..p {
        norm = norm.add(&power)?;
        power = g.compose(&power)?;
    }
    Ok((diff, norm))
}

/// Tate cohomology of `G` acting on a finite module, with the orders of
/// the pieces of `0 -> H^-1 -> M_G -> M^G -> H^0 -> 0`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TateCohomology {
    /// Invariant factor exponents of `Ĥ^0 = M^G / N M`.
    pub h0: Vec<u32>,
    /// Invariant factor exponents of `Ĥ^-1 = ker N / (g-1) M`.
    pub hminus1: Vec<u32>,
    pub log_order: u64,
    pub log_invariants: u64,
    pub log_coinvariants: u64,
    pub log_norm_image: u64,
    /// `log_p` of the Herbrand quotient `|Ĥ^0| / |Ĥ^-1|`.
    pub herbrand_log: i64,
}

impl TateCohomology {
    pub fn log_h0(&self) -> u64 {
        self.h0.iter().map(|&v| v as u64).sum()
    }

    pub fn log_hminus1(&self) -> u64 {
        self.hminus1.iter().map(|&v| v as u64).sum()
    }

    /// The Herbrand quotient as a reduced fraction.
    pub fn herbrand(&self, p: u64) -> num_rational::Ratio<u128> {
        let q = (p as u128).pow(self.herbrand_log.unsigned_abs() as u32);
        if self.herbrand_log >= 0 {
            num_rational::Ratio::from_integer(q)
        } else {
            num_rational::Ratio::new(1, q)
        }
    }
}

/// Tate cohomology of a `g`-stable subgroup `s` of the domain of `g`.
pub(crate) fn tate_of_subgroup(s: &Subgroup, g: &Hom, p: u64) -> Result<TateCohomology> {
    let (diff, norm) = difference_and_norm(g, p)?;
    let invariants = s.intersection(&diff.kernel())?;
    let norm_kernel = s.intersection(&norm.kernel())?;
    let diff_image = diff.image_of(s);
    let norm_image = norm.image_of(s);
    let h0 = invariants.quotient_structure(&norm_image)?;
    let hminus1 = norm_kernel.quotient_structure(&diff_image)?;
    let t = TateCohomology {
        h0,
        hminus1,
        log_order: s.log_order(),
        log_invariants: invariants.log_order(),
        log_coinvariants: s.log_order() - diff_image.log_order(),
        log_norm_image: norm_image.log_order(),
        herbrand_log: 0,
    };
    let herbrand_log = t.log_h0() as i64 - t.log_hminus1() as i64;
    // 0 -> Ĥ^-1 -> M_G -> M^G -> Ĥ^0 -> 0 must balance.
    let alternating = t.log_hminus1() as i64 - t.log_coinvariants as i64 + t.log_invariants as i64 - t.log_h0() as i64;
    assert_eq!(alternating, 0, "Tate sequence does not balance");
    Ok(TateCohomology { herbrand_log, ..t })
}

/// Exact Tate cohomology of a finite `G`-module.
pub fn tate_cohomology(m: &GModule) -> Result<TateCohomology> {
    m.validate()?;
    let g = m.g()?;
    let t = tate_of_subgroup(&Subgroup::whole(&g.src), &g, m.p)?;
    assert_eq!(t.herbrand_log, 0, "finite module with nontrivial Herbrand quotient");
    Ok(t)
}

/// Cohomology read one level down: cocycles are taken at the upper level
/// `(s_hi, g_hi)` and pushed through `proj`, coboundaries at the lower level
/// `(s_lo, g_lo)`. For a lattice approximated modulo `p^s`, this removes the
/// spurious classes the truncation creates.
pub(crate) fn lifted_tate(
    s_hi: &Subgroup,
    g_hi: &Hom,
    s_lo: &Subgroup,
    g_lo: &Hom,
    proj: &Hom,
    p: u64,
) -> Result<(Vec<u32>, Vec<u32>)> {
    let (diff_hi, norm_hi) = difference_and_norm(g_hi, p)?;
    let (diff_lo, norm_lo) = difference_and_norm(g_lo, p)?;
    let cocycles0 = proj.image_of(&s_hi.intersection(&diff_hi.kernel())?);
    let cocycles1 = proj.image_of(&s_hi.intersection(&norm_hi.kernel())?);
    let h0 = cocycles0.quotient_structure(&norm_lo.image_of(s_lo))?;
    let h1 = cocycles1.quotient_structure(&diff_lo.image_of(s_lo))?;
    Ok((h0, h1))
}

/// Orders of the pieces in the proof of the `F_p[G]` Herbrand lemma.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FiltrationData {
    /// `log_p |I^k M / I^{k+1} M|` for `k = 0..p-1`.
    pub graded: Vec<u64>,
    /// `I^{p-1} M = N M` as subgroups.
    pub top_is_norm: bool,
    /// `log_p` orders of the domain and range of `phi_{p-2}`.
    pub phi_domain: u64,
    pub phi_range: u64,
}

/// Filtration of an `F_p[G]`-module by powers of the augmentation ideal.
pub fn filtration_data(m: &GModule) -> Result<FiltrationData> {
    if m.factors.iter().any(|&r| r != 1) {
        return Err(Error::Precondition("filtration data needs an F_p[G]-module".into()));
    }
    let p = m.p;
    let g = m.g()?;
    let whole = Subgroup::whole(&g.src);
    let (diff, norm) = difference_and_norm(&g, p)?;
    let mut powers = vec![Hom::identity(&g.src)];
    for k in 1..=p as usize {
        powers.push(diff.compose(&powers[k - 1])?);
    }
    let images: Vec<Subgroup> = powers.iter().map(|h| h.image_of(&whole)).collect();
    let graded = (0..p as usize).map(|k| images[k].log_order() - images[k + 1].log_order()).collect();
    let top_is_norm = images[p as usize - 1].same_as(&norm.image_of(&whole));

    let k = p as usize - 2;
    let invariants = diff.kernel();
    // M[I^{k+1}] / (I M ∩ M[I^{k+1}])
    let killed = powers[k + 1].kernel();
    let phi_domain = killed.log_order() - images[1].intersection(&killed)?.log_order();
    // M^G / (I^{k+1} M)^G
    let phi_range = invariants.log_order() - images[k + 1].intersection(&invariants)?.log_order();
    Ok(FiltrationData { graded, top_is_norm, phi_domain, phi_range })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn regular(p: u64, s: u32) -> GModule {
        let n = p as usize;
        let g = (0..n).map(|i| (0..n).map(|j| ((i + n - 1) % n == j) as i128).collect()).collect();
        GModule::new(p, vec![s; n], g, None).unwrap()
    }

    #[test]
    fn trivial_cyclic() {
        let m = GModule::new(5, vec![3], vec![vec![1]], None).unwrap();
        let t = tate_cohomology(&m).unwrap();
        assert_eq!((t.h0.as_slice(), t.hminus1.as_slice()), (&[1u32][..], &[1u32][..]));
        assert_eq!(t.herbrand(5), num_rational::Ratio::from_integer(1));
    }

    #[test]
    fn free_module_is_acyclic() {
        for (p, s) in [(3, 1), (3, 2), (5, 2)] {
            let t = tate_cohomology(&regular(p, s)).unwrap();
            assert!(t.h0.is_empty() && t.hminus1.is_empty());
        }
    }

    #[test]
    fn augmentation_ideal_mod_p() {
        // I_G in F_3[G] with basis g-1, g^2-g: g acts by the companion of 1+x+x^2.
        let m = GModule::new(3, vec![1, 1], vec![vec![0, -1], vec![1, -1]], None).unwrap();
        let t = tate_cohomology(&m).unwrap();
        assert_eq!(t.herbrand_log, 0);
        assert_eq!(t.log_h0(), 1);
    }

    #[test]
    fn invalid_actions_rejected() {
        assert!(matches!(GModule::new(3, vec![1], vec![vec![2]], None), Err(Error::Validation(_))));
        let swap = vec![vec![0, 1], vec![1, 0]];
        assert!(GModule::new(3, vec![1, 1], swap, None).is_err());
        let g = vec![vec![1, 1], vec![0, 1]];
        let gamma = vec![vec![1, 0], vec![1, 1]];
        assert!(GModule::new(3, vec![1, 1], g.clone(), Some(gamma)).is_err());
        assert!(GModule::new(3, vec![1, 1], g, Some(vec![vec![0, 0], vec![0, 1]])).is_err());
    }

    #[test]
    fn zero_module() {
        let t = tate_cohomology(&GModule::zero(3)).unwrap();
        assert_eq!(t.log_order, 0);
    }

    #[test]
    fn filtration_of_group_ring() {
        let f = filtration_data(&regular(5, 1)).unwrap();
        assert_eq!(f.graded, vec![1; 5]);
        assert!(f.top_is_norm);
        assert_eq!((f.phi_domain, f.phi_range), (0, 0));
    }
}
