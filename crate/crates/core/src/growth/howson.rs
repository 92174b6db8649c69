//! Coinvariant ranks of modules over `Z_p[[Z_p^2]]`.
//!
//! `Q_p[(Z/p^n)^2]` splits over Galois orbits of characters into fields
//! `Q_p(ζ_{p^m})`, `m <= n`. The rank of `M_{G_n}` is therefore a sum over
//! orbit representatives `χ` of `φ(p^m) (k - rank r(χ))`, where `r(χ)` is
//! the relation matrix evaluated at `χ`. Each rank is computed exactly in
//! `Z[ζ_{p^m}]`.

use num_integer::Integer;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::quotient::tail_window;
use crate::bernoulli::check_odd_prime;
use crate::error::{Error, Result};
use crate::padic::checked_pow;

/// `Σ c x^i y^j` in the group ring of `Z_p^2` with topological generators
/// `x`, `y`; exponents may be negative.
#[derive(Debug, Clone, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct GroupRingElement {
    pub terms: Vec<(i64, i64, i64)>,
}

impl GroupRingElement {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn monomial(c: i64, i: i64, j: i64) -> Self {
        Self { terms: vec![(c, i, j)] }
    }

    pub fn one() -> Self {
        Self::monomial(1, 0, 0)
    }

    pub fn add(&self, other: &Self) -> Self {
        let mut terms = self.terms.clone();
        terms.extend_from_slice(&other.terms);
        Self { terms }
    }

    pub fn mul(&self, other: &Self) -> Self {
        let terms = self
            .terms
            .iter()
            .flat_map(|&(c, i, j)| other.terms.iter().map(move |&(d, k, l)| (c * d, i + k, j + l)))
            .collect();
        Self { terms }
    }

    pub fn scale(&self, c: i64) -> Self {
        Self { terms: self.terms.iter().map(|&(d, i, j)| (c * d, i, j)).collect() }
    }
}

/// `Λ^k` modulo the span of the rows of `relations`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct GroupRingModule {
    pub p: u64,
    pub generators: usize,
    pub relations: Vec<Vec<GroupRingElement>>,
}

impl GroupRingModule {
    pub fn new(p: u64, generators: usize, relations: Vec<Vec<GroupRingElement>>) -> Result<Self> {
        check_odd_prime(p)?;
        if let Some(i) = relations.iter().position(|r| r.len() != generators) {
            return Err(Error::InconsistentPresentation(format!(
                "relation {i} has {} entries for {generators} generators",
                relations[i].len()
            )));
        }
        Ok(Self { p, generators, relations })
    }

    pub fn free(p: u64, rank: usize) -> Result<Self> {
        Self::new(p, rank, vec![])
    }

    /// `Z_p`-rank of `M_{G_n}` for each `n` in `0..=max_n`.
    pub fn coinvariant_ranks(&self, max_n: u32) -> Result<Vec<u64>> {
        let p = self.p;
        checked_pow(p, 2 * max_n).filter(|&q| q < 1 << 31).ok_or_else(|| Error::Range(format!("level {max_n} too large")))?;
        // Contribution of the characters of exact order p^m.
        let per_order = (0..=max_n)
            .map(|m| {
                let reps = orbit_representatives(p, m);
                let ring = Cyclotomic::new(p, m);
                let defect = reps
                    .par_iter()
                    .map(|&(s, t)| Ok(self.generators as u64 - self.rank_at(&ring, s, t)? as u64))
                    .collect::<Result<Vec<u64>>>()?
                    .into_iter()
                    .sum::<u64>();
                Ok(ring.degree() as u64 * defect)
            })
            .collect::<Result<Vec<u64>>>()?;
        Ok(per_order.iter().scan(0, |acc, &x| {
            *acc += x;
            Some(*acc)
        }).collect())
    }

    fn rank_at(&self, ring: &Cyclotomic, s: u64, t: u64) -> Result<usize> {
        let rows: Vec<Vec<Vec<i128>>> = self
            .relations
            .iter()
            .map(|r| r.iter().map(|e| ring.evaluate(e, s, t)).collect::<Result<Vec<_>>>())
            .collect::<Result<_>>()?;
        ring.rank(rows, self.generators)
    }
}

/// One character `(s, t)` per Galois orbit of exact order `p^m`, with
/// `χ(x^i y^j) = ζ_{p^m}^{s i + t j}`.
fn orbit_representatives(p: u64, m: u32) -> Vec<(u64, u64)> {
    if m == 0 {
        return vec![(0, 0)];
    }
    let q = p.pow(m);
    let mut reps: Vec<(u64, u64)> = (0..q).map(|t| (1, t)).collect();
    reps.extend((0..q / p).map(|u| (p * u, 1)));
    reps
}

/// `Z[ζ_{p^m}]` in the power basis `1, ζ, ..., ζ^{φ-1}`.
struct Cyclotomic {
    p: u64,
    order: u64,
    degree: usize,
}

impl Cyclotomic {
    fn new(p: u64, m: u32) -> Self {
        let order = p.pow(m);
        let degree = if m == 0 { 1 } else { (order - order / p) as usize };
        Self { p, order, degree }
    }

    fn degree(&self) -> usize {
        self.degree
    }

    fn overflow() -> Error {
        Error::Range("cyclotomic coefficients overflow".into())
    }

    /// Reduces a vector of length `p^m` indexed by exponents modulo `Φ_{p^m}`.
    fn reduce(&self, mut v: Vec<i128>) -> Result<Vec<i128>> {
        if self.order > 1 {
            let step = (self.order / self.p) as usize;
            for d in (self.degree..self.order as usize).rev() {
                let c = std::mem::take(&mut v[d]);
                if c != 0 {
                    let base = d - self.degree;
                    for k in 0..self.p as usize - 1 {
                        let slot = &mut v[base + k * step];
                        *slot = slot.checked_sub(c).ok_or_else(Self::overflow)?;
                    }
                }
            }
        }
        v.truncate(self.degree);
        Ok(v)
    }

    fn evaluate(&self, e: &GroupRingElement, s: u64, t: u64) -> Result<Vec<i128>> {
        let q = self.order as i128;
        let mut v = vec![0i128; self.order as usize];
        for &(c, i, j) in &e.terms {
            let k = (s as i128 * i as i128 + t as i128 * j as i128).rem_euclid(q) as usize;
            v[k] += c as i128;
        }
        self.reduce(v)
    }

    fn mul(&self, a: &[i128], b: &[i128]) -> Result<Vec<i128>> {
        let n = self.order as usize;
        let mut v = vec![0i128; n];
        for (i, &x) in a.iter().enumerate() {
            if x == 0 {
                continue;
            }
            for (j, &y) in b.iter().enumerate() {
                let slot = &mut v[(i + j) % n];
                *slot = x.checked_mul(y).and_then(|z| slot.checked_add(z)).ok_or_else(Self::overflow)?;
            }
        }
        self.reduce(v)
    }

    fn sub(a: &[i128], b: &[i128]) -> Result<Vec<i128>> {
        a.iter().zip(b).map(|(x, y)| x.checked_sub(*y).ok_or_else(Self::overflow)).collect()
    }

    /// Rank over `Q(ζ)` by division-free elimination, dividing each row by
    /// its integer content to keep entries small.
    fn rank(&self, mut rows: Vec<Vec<Vec<i128>>>, cols: usize) -> Result<usize> {
        let is_zero = |x: &Vec<i128>| x.iter().all(|&c| c == 0);
        let mut rank = 0;
        for col in 0..cols {
            let Some(piv) = (rank..rows.len()).find(|&r| !is_zero(&rows[r][col])) else { continue };
            rows.swap(rank, piv);
            let pivot = rows[rank].clone();
            for row in rows.iter_mut().skip(rank + 1) {
                if is_zero(&row[col]) {
                    continue;
                }
                let f = row[col].clone();
                for j in col..cols {
                    row[j] = Self::sub(&self.mul(&pivot[col], &row[j])?, &self.mul(&f, &pivot[j])?)?;
                }
                let content = row.iter().flatten().fold(0i128, |g, &c| g.gcd(&c));
                if content > 1 {
                    row.iter_mut().flatten().for_each(|c| *c /= content);
                }
            }
            rank += 1;
        }
        Ok(rank)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct HowsonRank {
    pub p: u64,
    /// `(n, rank M_{G_n}, rank M_{G_n} - r p^{2n})`.
    pub rows: Vec<(u32, u64, i64)>,
    pub window_start: u32,
    pub r: u64,
    /// Residuals divided by `p^n` do not grow across the tail.
    pub confident: bool,
}

/// Reads the free rank off the `p^{2n}` coefficient of coinvariant ranks
/// over `0..=max_n`, requiring the residual to be `O(p^n)`.
pub fn howson_rank(m: &GroupRingModule, max_n: u32) -> Result<HowsonRank> {
    if max_n < 1 {
        return Err(Error::Validation("need at least levels 0 and 1".into()));
    }
    let ranks = m.coinvariant_ranks(max_n)?;
    let p = m.p;
    let top = p.pow(2 * max_n);
    let r = (ranks[max_n as usize] + top / 2) / top;
    if r > m.generators as u64 {
        return Err(Error::InconsistentPresentation(format!("fitted rank {r} exceeds {} generators", m.generators)));
    }
    let rows: Vec<(u32, u64, i64)> = ranks
        .iter()
        .enumerate()
        .map(|(n, &v)| (n as u32, v, v as i64 - (r * p.pow(2 * n as u32)) as i64))
        .collect();
    let tail = &rows[rows.len() - tail_window(rows.len())..];
    // |res_n| / p^n, compared without division.
    let grows = tail
        .windows(2)
        .any(|w| w[1].2.unsigned_abs() > w[0].2.unsigned_abs() * p);
    let explodes = tail
        .windows(2)
        .all(|w| w[0].2 != 0 && w[1].2.unsigned_abs() >= w[0].2.unsigned_abs() * p * p);
    if explodes && tail.len() >= 2 {
        return Err(Error::InconsistentPresentation("no integer rank fits the coinvariant ranks".into()));
    }
    Ok(HowsonRank { p, window_start: tail[0].0, r, confident: !grows, rows })
}
