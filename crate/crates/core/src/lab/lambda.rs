//! Elementary `Lambda[G]`-modules and their finite truncations.
//!
//! A module `sum Lambda/p^{r_i} + sum Lambda/(f_j)` with a `G`-action is
//! observed through `M / (omega_n, p^m)`, `omega_n = (1+T)^{p^n} - 1`. In the
//! basis `gamma^0, ..., gamma^{p^n - 1}` of `Z[Gamma/Gamma^{p^n}]`, `gamma`
//! acts by a cyclic shift. The `mu`-analog of a derived module is the
//! coefficient of `p^n` in `log_p` of its order; at fixed precision `m` the
//! `lambda n` part of the growth is bounded, so the model is `mu p^n + nu`.

use serde::{Deserialize, Serialize};

use super::blocks::{self, IMatrix};
use super::module::{tate_cohomology, GModule, TateCohomology};
use crate::error::{Error, Result};
use crate::padic::{smith_normal_form_mod_with_transform, ResidueRing};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum GAction {
    /// `G` acts trivially.
    Trivial,
    /// Tensor with `Z[G]`.
    Regular,
    /// Tensor with `Z[G]/(N)`.
    Augmentation,
}

impl GAction {
    pub fn dim(self, p: u64) -> usize {
        match self {
            Self::Trivial => 1,
            Self::Regular => p as usize,
            Self::Augmentation => p as usize - 1,
        }
    }

    fn matrix(self, p: u64) -> IMatrix {
        match self {
            Self::Trivial => blocks::identity(1),
            Self::Regular => blocks::regular(p),
            Self::Augmentation => blocks::augmentation(p),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum LambdaFactor {
    /// `Lambda / p^r`.
    PPower(u32),
    /// `Lambda / (f)` for a distinguished `f`, coefficients from `T^0` up.
    Distinguished(Vec<i64>),
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Component {
    pub factor: LambdaFactor,
    pub action: GAction,
}

/// `mu`-invariants of the objects in Lemma-2.4-type statements.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct DerivedMu {
    pub h0: i64,
    pub hminus1: i64,
    pub coinvariants: i64,
    pub norm_image: i64,
    pub module: i64,
}

impl DerivedMu {
    fn add(self, o: Self) -> Self {
        Self {
            h0: self.h0 + o.h0,
            hminus1: self.hminus1 + o.hminus1,
            coinvariants: self.coinvariants + o.coinvariants,
            norm_image: self.norm_image + o.norm_image,
            module: self.module + o.module,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ElementaryLambdaModule {
    pub p: u64,
    pub components: Vec<Component>,
}

impl ElementaryLambdaModule {
    pub fn new(p: u64, components: Vec<Component>) -> Result<Self> {
        let m = Self { p, components };
        m.validate()?;
        Ok(m)
    }

    pub fn validate(&self) -> Result<()> {
        crate::bernoulli::check_odd_prime(self.p)?;
        for c in &self.components {
            match &c.factor {
                LambdaFactor::PPower(0) => return Err(Error::Validation("Lambda/p^0 is zero; drop it".into())),
                LambdaFactor::PPower(_) => {}
                LambdaFactor::Distinguished(f) => {
                    let Some((&lead, rest)) = f.split_last() else {
                        return Err(Error::Validation("empty polynomial".into()));
                    };
                    if lead != 1 || rest.is_empty() || rest.iter().any(|&a| a % self.p as i64 != 0) {
                        return Err(Error::Validation(format!("{f:?} is not distinguished of positive degree")));
                    }
                }
            }
        }
        Ok(())
    }

    /// `Lambda`-module invariants, counting `G` through the rank of its
    /// representation.
    pub fn constructed_lambda(&self) -> u64 {
        self.components
            .iter()
            .map(|c| match &c.factor {
                LambdaFactor::Distinguished(f) => ((f.len() - 1) * c.action.dim(self.p)) as u64,
                LambdaFactor::PPower(_) => 0,
            })
            .sum()
    }

    pub fn constructed_mu(&self) -> u64 {
        self.components
            .iter()
            .map(|c| match c.factor {
                LambdaFactor::PPower(r) => r as u64 * c.action.dim(self.p) as u64,
                LambdaFactor::Distinguished(_) => 0,
            })
            .sum()
    }

    /// Largest `r` with a `Lambda/p^r` summand, `0` if there is none.
    pub fn theta(&self) -> u32 {
        self.components
            .iter()
            .filter_map(|c| match c.factor {
                LambdaFactor::PPower(r) => Some(r),
                LambdaFactor::Distinguished(_) => None,
            })
            .max()
            .unwrap_or(0)
    }

    /// The `p`-power torsion submodule `M(p)`.
    pub fn p_torsion(&self) -> Self {
        Self {
            p: self.p,
            components: self.components.iter().filter(|c| matches!(c.factor, LambdaFactor::PPower(_))).cloned().collect(),
        }
    }

    /// `mu` of each derived object, read off the presentation.
    pub fn constructed_derived_mu(&self) -> DerivedMu {
        let p = self.p as i64;
        self.components
            .iter()
            .map(|c| match (&c.factor, c.action) {
                (LambdaFactor::Distinguished(_), _) => DerivedMu::default(),
                (&LambdaFactor::PPower(r), GAction::Trivial) => {
                    let r = r as i64;
                    DerivedMu { h0: 1, hminus1: 1, coinvariants: r, norm_image: r - 1, module: r }
                }
                (&LambdaFactor::PPower(r), GAction::Regular) => {
                    let r = r as i64;
                    DerivedMu { h0: 0, hminus1: 0, coinvariants: r, norm_image: r, module: p * r }
                }
                (&LambdaFactor::PPower(r), GAction::Augmentation) => {
                    let r = r as i64;
                    DerivedMu { h0: 1, hminus1: 1, coinvariants: 1, norm_image: 0, module: (p - 1) * r }
                }
            })
            .fold(DerivedMu::default(), DerivedMu::add)
    }

    /// `M / (omega_n, p^m)` as a finite `G`-module with `gamma` recorded.
    pub fn truncate(&self, n: u32, m: u32) -> Result<GModule> {
        let p = self.p;
        let width = p
            .checked_pow(n)
            .filter(|&w| w <= 1 << 12)
            .ok_or_else(|| Error::Range(format!("level {n} too large for p = {p}")))? as usize;
        let mut factors = Vec::new();
        let mut g_blocks = Vec::new();
        let mut gamma_blocks = Vec::new();
        for c in &self.components {
            let (f, gamma) = truncate_lambda_part(p, &c.factor, width, m)?;
            let w = c.action.dim(p);
            factors.extend(f.iter().flat_map(|&r| std::iter::repeat_n(r, w)));
            g_blocks.push(blocks::kronecker(&blocks::identity(f.len()), &c.action.matrix(p)));
            gamma_blocks.push(blocks::kronecker(&gamma, &blocks::identity(w)));
        }
        let g = blocks::block_diagonal(&g_blocks);
        let gamma = blocks::block_diagonal(&gamma_blocks);
        Ok(GModule::new(p, factors, g, Some(gamma))?.with_level(n))
    }
}

/// Generator orders and `gamma` for `Lambda/(x, omega_n, p^m)`.
fn truncate_lambda_part(p: u64, factor: &LambdaFactor, width: usize, m: u32) -> Result<(Vec<u32>, IMatrix)> {
    let shift = blocks::regular(width as u64);
    match factor {
        &LambdaFactor::PPower(r) => Ok((vec![r.min(m); width], shift)),
        LambdaFactor::Distinguished(f) => {
            let ring = ResidueRing::new(p, m)?;
            let q = ring.modulus();
            // f(gamma - 1) in Z[Gamma_n], via Horner in the group ring.
            let mut elt = vec![0u64; width];
            for &a in f.iter().rev() {
                let mut next = vec![0u64; width];
                for i in 0..width {
                    // multiply by (gamma - 1)
                    next[(i + 1) % width] = ring.add(next[(i + 1) % width], elt[i]);
                    next[i] = ring.sub(next[i], elt[i]);
                }
                next[0] = ring.add(next[0], ring.reduce(a as i128));
                elt = next;
            }
            // Relations: gamma^j f as columns.
            let rel: Vec<Vec<u64>> = (0..width).map(|i| (0..width).map(|j| elt[(i + width - j) % width]).collect()).collect();
            let s = smith_normal_form_mod_with_transform(&rel, width, &ring);
            let keep: Vec<usize> = (0..width).filter(|&t| s.valuations[t] > 0).collect();
            let to_u = |x: &Vec<Vec<u64>>| -> IMatrix { x.iter().map(|r| r.iter().map(|&v| v as i128).collect()).collect() };
            let conj = blocks::mat_mul_mod(
                &blocks::mat_mul_mod(&to_u(&s.left), &shift, q as i128),
                &to_u(&s.left_inverse),
                q as i128,
            );
            let factors = keep.iter().map(|&t| s.valuations[t]).collect();
            let gamma = keep.iter().map(|&i| keep.iter().map(|&j| conj[i][j]).collect()).collect();
            Ok((factors, gamma))
        }
    }
}

/// `q_n = mu p^n + nu` fitted exactly on consecutive levels.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct GrowthFit {
    pub levels: Vec<u32>,
    pub values: Vec<u64>,
    /// `None` unless every level agrees with one integral `(mu, nu)`.
    pub mu: Option<i64>,
    pub nu: Option<i64>,
}

pub const MIN_FIT_LEVELS: usize = 3;

pub fn fit_growth(p: u64, levels: &[u32], values: &[u64]) -> GrowthFit {
    let mut fit = GrowthFit { levels: levels.to_vec(), values: values.to_vec(), mu: None, nu: None };
    let consecutive = levels.windows(2).all(|w| w[1] == w[0] + 1);
    if levels.len() < MIN_FIT_LEVELS || !consecutive || levels.len() != values.len() {
        return fit;
    }
    let x = |n: u32| p.pow(n) as i64;
    let (x0, x1) = (x(levels[0]), x(levels[1]));
    let dy = values[1] as i64 - values[0] as i64;
    if dy % (x1 - x0) != 0 {
        return fit;
    }
    let mu = dy / (x1 - x0);
    let nu = values[0] as i64 - mu * x0;
    if levels.iter().zip(values).all(|(&n, &v)| mu * x(n) + nu == v as i64) {
        fit.mu = Some(mu);
        fit.nu = Some(nu);
    }
    fit
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DerivedFits {
    pub h0: GrowthFit,
    pub hminus1: GrowthFit,
    pub coinvariants: GrowthFit,
    pub norm_image: GrowthFit,
    pub module: GrowthFit,
    pub herbrand_logs: Vec<i64>,
}

impl DerivedFits {
    pub fn estimate(&self) -> Option<DerivedMu> {
        Some(DerivedMu {
            h0: self.h0.mu?,
            hminus1: self.hminus1.mu?,
            coinvariants: self.coinvariants.mu?,
            norm_image: self.norm_image.mu?,
            module: self.module.mu?,
        })
    }
}

/// Truncates at each level with precision `max(theta, 1)` and fits every
/// derived order.
pub fn derived_fits(m: &ElementaryLambdaModule, levels: &[u32]) -> Result<DerivedFits> {
    let precision = m.theta().max(1);
    let data: Vec<TateCohomology> =
        levels.iter().map(|&n| tate_cohomology(&m.truncate(n, precision)?)).collect::<Result<_>>()?;
    let pick = |f: fn(&TateCohomology) -> u64| -> GrowthFit {
        fit_growth(m.p, levels, &data.iter().map(f).collect::<Vec<_>>())
    };
    Ok(DerivedFits {
        h0: pick(TateCohomology::log_h0),
        hminus1: pick(TateCohomology::log_hminus1),
        coinvariants: pick(|t| t.log_coinvariants),
        norm_image: pick(|t| t.log_norm_image),
        module: pick(|t| t.log_order),
        herbrand_logs: data.iter().map(|t| t.herbrand_log).collect(),
    })
}
