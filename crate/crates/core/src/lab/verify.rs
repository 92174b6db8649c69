//! Brute-force checks of the Herbrand-quotient and `mu` lemmas.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::blocks::{self, BlockKind, IMatrix};
use super::group::{AbelianPGroup, Hom, Subgroup};
use super::lambda::{derived_fits, Component, ElementaryLambdaModule, GAction, LambdaFactor, MIN_FIT_LEVELS};
use super::module::{filtration_data, lifted_tate, tate_cohomology, GModule};
use super::sequence::{check_exactness, exact_chain, psi_herbrand, psi_minus_orders};
use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Witness {
    Finite(GModule),
    Lambda(ElementaryLambdaModule),
    Note(String),
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Failure {
    pub index: usize,
    pub reason: String,
    pub witness: Witness,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct LabReport {
    pub lemma: String,
    pub p: u64,
    pub trials: usize,
    pub passed: usize,
    pub failed: usize,
    pub inconclusive: usize,
    /// Cases outside the lemma's hypotheses.
    pub not_applicable: usize,
    pub failures: Vec<Failure>,
}

impl LabReport {
    pub fn ok(&self) -> bool {
        self.failed == 0 && self.passed > 0
    }

    pub fn inconclusive_rate(&self) -> f64 {
        let considered = self.trials - self.not_applicable;
        if considered == 0 {
            0.0
        } else {
            self.inconclusive as f64 / considered as f64
        }
    }
}

enum Outcome {
    Pass,
    Fail(String, Witness),
    Inconclusive,
    NotApplicable,
}

fn collect(lemma: &str, p: u64, outcomes: Vec<Outcome>) -> LabReport {
    let mut r = LabReport {
        lemma: lemma.into(),
        p,
        trials: outcomes.len(),
        passed: 0,
        failed: 0,
        inconclusive: 0,
        not_applicable: 0,
        failures: vec![],
    };
    for (index, o) in outcomes.into_iter().enumerate() {
        match o {
            Outcome::Pass => r.passed += 1,
            Outcome::Inconclusive => r.inconclusive += 1,
            Outcome::NotApplicable => r.not_applicable += 1,
            Outcome::Fail(reason, witness) => {
                r.failed += 1;
                r.failures.push(Failure { index, reason, witness });
            }
        }
    }
    r
}

fn check_lab_prime(p: u64) -> Result<()> {
    if p != 3 && p != 5 {
        return Err(Error::Precondition(format!("the lab suites run at p = 3 or 5, got {p}")));
    }
    Ok(())
}

/// Trial `i` of a run seeded with `seed` draws from its own stream, so
/// results do not depend on scheduling.
fn trial_rng(seed: u64, i: usize) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(i as u64);
    rng
}

/// A random finite `G`-module: a direct sum of basic blocks over
/// `Z/p^r`, `r <= max_r`, with each fixed-`r` part conjugated by a random
/// invertible matrix. Over `F_p` all Jordan types occur.
pub fn random_gmodule<R: Rng>(rng: &mut R, p: u64, max_dim: usize, max_r: u32) -> GModule {
    let target = rng.gen_range(0..=max_dim);
    let mut parts: Vec<(u32, Vec<IMatrix>)> = (1..=max_r).map(|r| (r, vec![])).collect();
    let mut dim = 0;
    while dim < target {
        let r = rng.gen_range(1..=max_r);
        let kind = if r == 1 {
            BlockKind::Jordan(rng.gen_range(1..=p as usize))
        } else {
            [BlockKind::Trivial, BlockKind::Regular, BlockKind::Augmentation][rng.gen_range(0..3)]
        };
        let b = kind.matrix(p);
        if dim + b.len() > max_dim {
            if dim + 1 > max_dim {
                break;
            }
            continue;
        }
        dim += b.len();
        parts[r as usize - 1].1.push(b);
    }
    let mut factors = vec![];
    let mut conj_blocks = vec![];
    for (r, bs) in parts {
        if bs.is_empty() {
            continue;
        }
        let q = (p as i128).pow(r);
        let g = blocks::block_diagonal(&bs);
        let (c, ci) = blocks::random_invertible(rng, g.len(), p, q);
        conj_blocks.push(blocks::mat_mul_mod(&blocks::mat_mul_mod(&c, &g, q), &ci, q));
        factors.extend(std::iter::repeat_n(r, g.len()));
    }
    GModule::new(p, factors, blocks::block_diagonal(&conj_blocks), None).expect("conjugates of valid blocks are valid")
}

/// Herbrand quotient and filtration mechanism on random `F_p[G]`-modules.
pub fn verify_fptrivial(p: u64, trials: usize, seed: u64, max_dim: usize) -> Result<LabReport> {
    check_lab_prime(p)?;
    let outcomes = (0..trials)
        .into_par_iter()
        .map(|i| {
            let m = random_gmodule(&mut trial_rng(seed, i), p, max_dim, 1);
            let fail = |why: String| Outcome::Fail(why, Witness::Finite(m.clone()));
            let t = match tate_cohomology(&m) {
                Ok(t) => t,
                Err(e) => return fail(e.to_string()),
            };
            if t.herbrand_log != 0 {
                return fail(format!("h = p^{}", t.herbrand_log));
            }
            let f = match filtration_data(&m) {
                Ok(f) => f,
                Err(e) => return fail(e.to_string()),
            };
            if f.phi_domain != f.phi_range {
                return fail(format!("phi_(p-2) orders {} != {}", f.phi_domain, f.phi_range));
            }
            if (f.phi_domain, f.phi_range) != (t.log_hminus1(), t.log_h0()) {
                return fail("phi_(p-2) does not compute the Tate groups".into());
            }
            if !f.top_is_norm {
                return fail("I^(p-1) M != N M".into());
            }
            if f.graded.windows(2).any(|w| w[1] > w[0]) {
                return fail(format!("graded pieces increase: {:?}", f.graded));
            }
            Outcome::Pass
        })
        .collect();
    Ok(collect("fptrivial", p, outcomes))
}

/// `h = 1` and the order balance on random finite modules over `Z/p^r`,
/// `r <= max_r`.
pub fn verify_finite_herbrand(p: u64, trials: usize, seed: u64, max_dim: usize, max_r: u32) -> Result<LabReport> {
    check_lab_prime(p)?;
    let outcomes = (0..trials)
        .into_par_iter()
        .map(|i| {
            let m = random_gmodule(&mut trial_rng(seed, i), p, max_dim, max_r);
            match tate_cohomology(&m) {
                Ok(t) if t.herbrand_log == 0 => Outcome::Pass,
                Ok(t) => Outcome::Fail(format!("h = p^{}", t.herbrand_log), Witness::Finite(m)),
                Err(e) => Outcome::Fail(e.to_string(), Witness::Finite(m)),
            }
        })
        .collect();
    Ok(collect("finite_herbrand", p, outcomes))
}

fn comp(factor: LambdaFactor, action: GAction) -> Component {
    Component { factor, action }
}

/// Constructed modules whose truncated orders are exact from the first
/// fitted level on.
pub fn default_family(p: u64) -> Vec<ElementaryLambdaModule> {
    use GAction::*;
    use LambdaFactor::*;
    let pi = p as i64;
    let mut specs: Vec<Vec<Component>> = vec![
        vec![],
        vec![comp(PPower(1), Trivial)],
        vec![comp(PPower(1), Regular)],
        vec![comp(PPower(1), Augmentation)],
        vec![comp(PPower(2), Trivial)],
        vec![comp(PPower(2), Regular)],
        vec![comp(PPower(2), Augmentation)],
        vec![comp(Distinguished(vec![0, 1]), Trivial)],
        vec![comp(Distinguished(vec![0, 1]), Regular)],
        vec![comp(Distinguished(vec![-pi, 1]), Augmentation)],
        vec![comp(PPower(1), Regular), comp(Distinguished(vec![0, 1]), Trivial)],
        vec![comp(PPower(1), Regular), comp(PPower(1), Regular)],
        vec![comp(PPower(1), Trivial), comp(PPower(1), Regular)],
        vec![comp(PPower(1), Augmentation), comp(Distinguished(vec![-pi, 1]), Regular)],
        vec![comp(PPower(2), Regular), comp(Distinguished(vec![0, 1]), Augmentation)],
    ];
    if p == 3 {
        // Degree-2 Eisenstein factors are only stable from level 1 on.
        specs.push(vec![comp(Distinguished(vec![-pi, 0, 1]), Trivial)]);
        specs.push(vec![comp(PPower(1), Regular), comp(Distinguished(vec![-pi, 0, 1]), Regular)]);
    }
    specs.into_iter().map(|c| ElementaryLambdaModule::new(p, c).expect("valid family member")).collect()
}

/// Three consecutive levels whose truncations stay small.
pub fn default_levels(p: u64) -> Vec<u32> {
    if p == 3 {
        vec![1, 2, 3]
    } else {
        vec![0, 1, 2]
    }
}

/// Equivalence of `mu(Ĥ^0) = 0`, `mu(Ĥ^i) = 0` for all `i`, and
/// `mu(M_G) = mu(N M)`, each side estimated from growth fits.
pub fn verify_basiclemma(family: &[ElementaryLambdaModule], levels: &[u32]) -> Result<LabReport> {
    let p = family.first().map_or(3, |m| m.p);
    let outcomes = family
        .par_iter()
        .map(|m| {
            let fits = match derived_fits(m, levels) {
                Ok(f) => f,
                Err(e) => return Outcome::Fail(e.to_string(), Witness::Lambda(m.clone())),
            };
            let Some(est) = fits.estimate() else {
                return Outcome::Inconclusive;
            };
            if est != m.constructed_derived_mu() {
                return Outcome::Fail(
                    format!("estimated {est:?} but constructed {:?}", m.constructed_derived_mu()),
                    Witness::Lambda(m.clone()),
                );
            }
            let i = est.h0 == 0;
            let ii = est.h0 == 0 && est.hminus1 == 0;
            let iii = est.coinvariants == est.norm_image;
            if i == ii && ii == iii {
                Outcome::Pass
            } else {
                Outcome::Fail(format!("criteria disagree: (i) {i}, (ii) {ii}, (iii) {iii}"), Witness::Lambda(m.clone()))
            }
        })
        .collect();
    Ok(collect("basiclemma", p, outcomes))
}

/// Under `mu(Ĥ^0) = 0` and `theta <= 1`: `h(M(p)) = 1` at every level, and
/// `mu(M) = p mu(M_G)`.
pub fn verify_mptrivial(family: &[ElementaryLambdaModule], levels: &[u32]) -> Result<LabReport> {
    let p = family.first().map_or(3, |m| m.p);
    let outcomes = family
        .par_iter()
        .map(|m| {
            let witness = || Witness::Lambda(m.clone());
            if m.theta() > 1 {
                return Outcome::NotApplicable;
            }
            let (fits, torsion_fits) = match (derived_fits(m, levels), derived_fits(&m.p_torsion(), levels)) {
                (Ok(a), Ok(b)) => (a, b),
                (Err(e), _) | (_, Err(e)) => return Outcome::Fail(e.to_string(), witness()),
            };
            let Some(h0_mu) = fits.h0.mu else {
                return Outcome::Inconclusive;
            };
            if h0_mu != 0 {
                return Outcome::NotApplicable;
            }
            if torsion_fits.herbrand_logs.iter().any(|&h| h != 0) {
                return Outcome::Fail(format!("h(M(p)) logs {:?}", torsion_fits.herbrand_logs), witness());
            }
            match (fits.module.mu, fits.coinvariants.mu) {
                (Some(mu), Some(mu_g)) if mu == m.p as i64 * mu_g => Outcome::Pass,
                (Some(mu), Some(mu_g)) => Outcome::Fail(format!("mu(M) = {mu} but mu(M_G) = {mu_g}"), witness()),
                _ => Outcome::Inconclusive,
            }
        })
        .collect();
    Ok(collect("mptrivial", p, outcomes))
}

/// Herbrand quotient of `x (Z/p^2)[T]/(T^d)[G]`, `x = (g - 1) - pT`, read
/// at degree `d` with cocycles lifted from degree `2d`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RemarkReport {
    pub p: u64,
    pub degrees: Vec<usize>,
    pub h0: Vec<Vec<u32>>,
    pub hminus1: Vec<Vec<u32>>,
    pub herbrand_logs: Vec<i64>,
    /// Common value of the last three readings, if they agree.
    pub stabilized: Option<i64>,
}

struct RemarkLevel {
    group: AbelianPGroup,
    g: Hom,
    ideal: Subgroup,
}

fn remark_level(p: u64, d: usize) -> Result<RemarkLevel> {
    let pu = p as usize;
    let dim = pu * d;
    let group = AbelianPGroup::new(p, vec![2; dim])?;
    let idx = |t: usize, i: usize| t * pu + i;
    let mut g = vec![vec![0i128; dim]; dim];
    let mut x = vec![vec![0i128; dim]; dim];
    for t in 0..d {
        for i in 0..pu {
            let col = idx(t, i);
            g[idx(t, (i + 1) % pu)][col] = 1;
            x[idx(t, (i + 1) % pu)][col] += 1;
            x[col][col] -= 1;
            if t + 1 < d {
                x[idx(t + 1, i)][col] -= p as i128;
            }
        }
    }
    let g = Hom::new(&group, &group, &g)?;
    let x = Hom::new(&group, &group, &x)?;
    let ideal = x.image();
    Ok(RemarkLevel { group, g, ideal })
}

pub fn remark_herbrand(p: u64, degrees: &[usize]) -> Result<RemarkReport> {
    check_lab_prime(p)?;
    let mut report =
        RemarkReport { p, degrees: degrees.to_vec(), h0: vec![], hminus1: vec![], herbrand_logs: vec![], stabilized: None };
    for &d in degrees {
        if d == 0 {
            return Err(Error::Range("truncation degree must be positive".into()));
        }
        let hi = remark_level(p, 2 * d)?;
        let lo = remark_level(p, d)?;
        let keep = p as usize * d;
        let proj: Vec<Vec<i128>> =
            (0..keep).map(|i| (0..hi.group.dim()).map(|j| (i == j) as i128).collect()).collect();
        let proj = Hom::new(&hi.group, &lo.group, &proj)?;
        let (h0, h1) = lifted_tate(&hi.ideal, &hi.g, &lo.ideal, &lo.g, &proj, p)?;
        let log = |v: &Vec<u32>| v.iter().map(|&x| x as i64).sum::<i64>();
        report.herbrand_logs.push(log(&h0) - log(&h1));
        report.h0.push(h0);
        report.hminus1.push(h1);
    }
    let tail = &report.herbrand_logs[report.herbrand_logs.len().saturating_sub(MIN_FIT_LEVELS)..];
    if tail.len() == MIN_FIT_LEVELS && tail.windows(2).all(|w| w[0] == w[1]) {
        report.stabilized = Some(tail[0]);
    }
    Ok(report)
}

pub fn verify_remark(p: u64, degrees: &[usize]) -> Result<LabReport> {
    let r = remark_herbrand(p, degrees)?;
    let outcome = match r.stabilized {
        Some(1) => Outcome::Pass,
        Some(h) => Outcome::Fail(format!("stabilized at h = p^{h}"), Witness::Note(format!("{:?}", r.herbrand_logs))),
        None => Outcome::Inconclusive,
    };
    Ok(collect("remark", p, vec![outcome]))
}

/// Herbrand accounting over the grid `delta in {0, 1}`, `|Q| <= 3`,
/// `|S| <= 2`, and alternating order sums on `trials` random exact
/// six-term sequences.
pub fn verify_psi(p: u64, trials: usize, seed: u64) -> Result<LabReport> {
    check_lab_prime(p)?;
    let mut outcomes = Vec::new();
    for delta in 0..=1u8 {
        for q in 0..=3u64 {
            for s in 0..=2u64 {
                for (e0, e1) in (0..=4u32).flat_map(|a| (0..=4u32).map(move |b| (a, b))) {
                    let (h0, h1) = (p.pow(e0), p.pow(e1));
                    let orders = psi_minus_orders(p, delta, q, s, h0, h1)?;
                    let v = psi_herbrand(p, delta, q, h0, h1, Some(&orders))?;
                    let expect = e0 as i64 - e1 as i64 == delta as i64 - q as i64;
                    outcomes.push(if v.consistent == expect && v.herbrand_ok == (v.alternating_log == Some(0)) {
                        Outcome::Pass
                    } else {
                        Outcome::Fail(
                            format!("delta = {delta}, |Q| = {q}, |S| = {s}: {v:?}"),
                            Witness::Note(format!("{orders:?}")),
                        )
                    });
                }
            }
        }
    }
    let chains: Vec<Outcome> = (0..trials)
        .into_par_iter()
        .map(|i| {
            let mut rng = trial_rng(seed, i);
            let kernels: Vec<AbelianPGroup> = (0..5)
                .map(|_| {
                    let dim = rng.gen_range(0..=2);
                    AbelianPGroup::new(p, (0..dim).map(|_| rng.gen_range(1..=3)).collect()).expect("small exponents")
                })
                .collect();
            let note = || Witness::Note(format!("{:?}", kernels.iter().map(|k| k.exps().to_vec()).collect::<Vec<_>>()));
            let (groups, maps) = match exact_chain(&kernels) {
                Ok(x) => x,
                Err(e) => return Outcome::Fail(e.to_string(), note()),
            };
            match check_exactness(&groups, &maps) {
                Ok(r) if r.exact => {}
                Ok(r) => return Outcome::Fail(format!("constructed chain not exact: {r:?}"), note()),
                Err(e) => return Outcome::Fail(e.to_string(), note()),
            }
            let orders: Vec<u64> = groups[1..7].iter().map(|g| p.pow(g.log_order() as u32)).collect();
            match psi_herbrand(p, 1, 1, 1, 1, Some(&orders)) {
                Ok(v) if v.alternating_log == Some(0) => Outcome::Pass,
                Ok(v) => Outcome::Fail(format!("alternating sum {:?}", v.alternating_log), note()),
                Err(e) => Outcome::Fail(e.to_string(), note()),
            }
        })
        .collect();
    outcomes.extend(chains);
    Ok(collect("psi", p, outcomes))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn random_modules_are_valid_and_reproducible() {
        for i in 0..20 {
            let a = random_gmodule(&mut trial_rng(9, i), 3, 12, 3);
            let b = random_gmodule(&mut trial_rng(9, i), 3, 12, 3);
            assert_eq!(a, b);
            assert!(a.validate().is_ok());
            assert!(a.factors.len() <= 12);
        }
    }

    #[test]
    fn small_fptrivial_run() {
        let r = verify_fptrivial(3, 40, 1, 12).unwrap();
        assert_eq!((r.failed, r.passed), (0, 40));
    }

    #[test]
    fn remark_stabilizes_at_p() {
        let r = remark_herbrand(3, &[1, 2, 3, 4]).unwrap();
        assert_eq!(r.stabilized, Some(1), "{r:?}");
    }

    #[test]
    fn psi_grid_and_chains() {
        let r = verify_psi(3, 30, 2).unwrap();
        assert!(r.ok(), "{:?}", r.failures.first());
        assert_eq!(r.trials, 2 * 4 * 3 * 25 + 30);
    }

    #[test]
    fn lab_prime_restricted() {
        assert!(verify_fptrivial(7, 1, 0, 4).is_err());
    }
}
