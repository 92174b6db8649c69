//! `Lambda(G)`-rank formulas and pseudo-nullity verdicts.
//!
//! Rank zero is read as pseudo-null. Every verdict carries the hypotheses
//! it was computed under, since none of them can be checked from the inputs.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::kida::{build_q_set, TowerData};
use crate::lfunction::MinusInvariants;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Hypotheses {
    pub mu_zero: bool,
    pub strongly_admissible: bool,
    pub good_ordinary: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum RankTerms {
    ClassGroup { lambda_k: u64, delta: u8, q_size: usize },
    Selmer { corank_k: u64, m1: usize, m2: usize },
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RankVerdict {
    pub rank: u64,
    pub pseudo_null: bool,
    pub terms: RankTerms,
    pub hypotheses: Hypotheses,
}

impl RankVerdict {
    fn new(rank: u64, terms: RankTerms, hypotheses: Hypotheses) -> Self {
        Self { rank, pseudo_null: rank == 0, terms, hypotheses }
    }
}

/// `rank X_{L,T}^- = lambda_K - delta + |Q|` from raw terms.
pub fn class_group_rank_from_terms(
    lambda_k: u64,
    delta: u8,
    q_size: usize,
    hypotheses: Hypotheses,
) -> Result<RankVerdict> {
    if delta > 1 {
        return Err(Error::Validation(format!("delta must be 0 or 1, got {delta}")));
    }
    let value = lambda_k as i128 - delta as i128 + q_size as i128;
    if value < 0 {
        return Err(Error::InconsistentInput(format!("rank formula evaluates to {value}")));
    }
    Ok(RankVerdict::new(value as u64, RankTerms::ClassGroup { lambda_k, delta, q_size }, hypotheses))
}

/// Rank of `X_{L,T}^-` over `Lambda(G)`, with `Q` built from the tower data.
pub fn class_group_rank(t: &TowerData, hypotheses: Hypotheses) -> Result<RankVerdict> {
    let q = build_q_set(t)?;
    class_group_rank_from_terms(t.lambda_k, t.delta, q.len(), hypotheses)
}

/// `Q(mu_p)` with `T` empty and `L` a `Z_p^2`-extension unramified outside
/// `p`, so `Q` is empty and `delta = 1`.
pub fn cyclotomic_rank(inv: &MinusInvariants, strongly_admissible: bool) -> Result<RankVerdict> {
    let hypotheses = Hypotheses { mu_zero: inv.mu_minus == 0, strongly_admissible, good_ordinary: false };
    class_group_rank_from_terms(inv.lambda_minus as u64, inv.delta, 0, hypotheses)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct RankGap {
    pub gap: u64,
    /// Kernel of `X_L^- -> Y_L^-` is pseudo-null.
    pub kernel_pseudo_null: bool,
}

/// `rank X_L^- - rank Y_L^-` equals the number of primes of `K^+` above `p`
/// splitting completely in `L/K^+`.
pub fn xy_rank_gap(split_completely_above_p: u64) -> RankGap {
    RankGap { gap: split_completely_above_p, kernel_pseudo_null: split_completely_above_p == 0 }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Reduction {
    Good,
    SplitMultiplicative,
    NonsplitMultiplicative,
    Additive,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct LocalRecord {
    pub prime: String,
    pub ramified_in_l: bool,
    pub above_p: bool,
    pub reduction: Reduction,
    /// `E(K_v)[p] != 0`.
    pub torsion_nontrivial: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct EllipticLocalData {
    pub label: String,
    pub records: Vec<LocalRecord>,
    pub selmer_corank_k: u64,
}

impl EllipticLocalData {
    /// Ramified primes away from `p`; a prime above `p` in here is an error.
    fn m0(&self) -> Result<Vec<&LocalRecord>> {
        let mut out = Vec::new();
        for r in self.records.iter().filter(|r| r.ramified_in_l) {
            if r.above_p {
                return Err(Error::Validation(format!(
                    "prime {} lies above p and cannot be counted among ramified primes",
                    r.prime
                )));
            }
            out.push(r);
        }
        Ok(out)
    }

    pub fn m1(&self) -> Result<usize> {
        Ok(self.m0()?.iter().filter(|r| r.reduction == Reduction::SplitMultiplicative).count())
    }

    pub fn m2(&self) -> Result<usize> {
        Ok(self.m0()?.iter().filter(|r| r.reduction == Reduction::Good && r.torsion_nontrivial).count())
    }
}

/// `rank Sel(E/L)^dual = rank_{Z_p} Sel(E/K)^dual + |M_1| + 2|M_2|`.
pub fn selmer_rank(d: &EllipticLocalData, hypotheses: Hypotheses) -> Result<RankVerdict> {
    let (m1, m2) = (d.m1()?, d.m2()?);
    let rank = d.selmer_corank_k + m1 as u64 + 2 * m2 as u64;
    Ok(RankVerdict::new(rank, RankTerms::Selmer { corank_k: d.selmer_corank_k, m1, m2 }, hypotheses))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct KummerCount {
    /// There are at least this many CM `Z_p`-extensions.
    pub at_least: u64,
    /// `Lambda(G)`-rank of `X_L^-` in each of them, when any exist.
    pub rank_each: Option<u64>,
}

pub fn kummer_count(lambda_k: u64) -> KummerCount {
    KummerCount { at_least: lambda_k, rank_each: lambda_k.checked_sub(1) }
}
