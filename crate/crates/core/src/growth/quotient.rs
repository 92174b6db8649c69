use std::collections::HashSet;

use num_rational::Ratio;
use serde::{Deserialize, Serialize};

use crate::bernoulli::check_odd_prime;
use crate::error::{Error, Result};
use crate::lab::{AbelianPGroup, Subgroup};
use crate::padic::{checked_pow, inv_mod, mul_mod};

/// Largest image enumerated element by element.
pub const MAX_COSETS: usize = 1 << 22;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum GroupKind {
    Abelian { d: usize },
    /// Upper unitriangular `3 x 3` matrices over `Z_p`, written `(a, b, c)`
    /// with `(a, b, c)(a', b', c') = (a + a', b + b', c + c' + a b')`.
    Heisenberg,
}

/// `G` modulo the congruence subgroup of level `N`.
///
/// The filtration starts at `G_1 = G^p`, which is uniform in both families,
/// and `G_{n+1}` is generated by `G_n^p` and `[G_n, G_1]`. In both families
/// `G_n` is the congruence subgroup of level `n`, so `G/G_n` is the same
/// group law read modulo `p^n`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FiniteQuotientGroup {
    pub kind: GroupKind,
    pub p: u64,
    pub level: u32,
}

pub type Element = Vec<u64>;

impl FiniteQuotientGroup {
    pub fn new(kind: GroupKind, p: u64, level: u32) -> Result<Self> {
        check_odd_prime(p)?;
        if let GroupKind::Abelian { d: 0 } = kind {
            return Err(Error::Validation("abelian group needs d >= 1".into()));
        }
        checked_pow(p, level)
            .filter(|&q| q < 1 << 31)
            .ok_or_else(|| Error::Range(format!("{p}^{level} is not representable")))?;
        Ok(Self { kind, p, level })
    }

    pub fn abelian(p: u64, d: usize, level: u32) -> Result<Self> {
        Self::new(GroupKind::Abelian { d }, p, level)
    }

    pub fn heisenberg(p: u64, level: u32) -> Result<Self> {
        Self::new(GroupKind::Heisenberg, p, level)
    }

    /// Dimension as a `p`-adic Lie group.
    pub fn dim(&self) -> usize {
        match self.kind {
            GroupKind::Abelian { d } => d,
            GroupKind::Heisenberg => 3,
        }
    }

    fn modulus(&self, n: u32) -> u64 {
        self.p.pow(n)
    }

    pub fn identity(&self) -> Element {
        vec![0; self.dim()]
    }

    pub fn reduce(&self, x: &[u64], n: u32) -> Element {
        let q = self.modulus(n);
        x.iter().map(|&a| a % q).collect()
    }

    pub fn reduce_signed(&self, x: &[i64], n: u32) -> Element {
        let q = self.modulus(n) as i64;
        x.iter().map(|&a| a.rem_euclid(q) as u64).collect()
    }

    /// Product in `G/G_n`.
    pub fn mul(&self, x: &[u64], y: &[u64], n: u32) -> Element {
        let q = self.modulus(n);
        let mut z: Element = x.iter().zip(y).map(|(&a, &b)| (a + b) % q).collect();
        if self.kind == GroupKind::Heisenberg {
            z[2] = (z[2] + x[0] % q * (y[1] % q)) % q;
        }
        z
    }

    pub fn inv(&self, x: &[u64], n: u32) -> Element {
        let q = self.modulus(n);
        let mut z: Element = x.iter().map(|&a| (q - a % q) % q).collect();
        if self.kind == GroupKind::Heisenberg {
            // (a, b, c)^-1 = (-a, -b, ab - c)
            z[2] = (x[0] % q * (x[1] % q) + z[2]) % q;
        }
        z
    }

    pub fn pow(&self, x: &[u64], e: u64, n: u32) -> Element {
        let (mut acc, mut base, mut e) = (self.identity(), self.reduce(x, n), e);
        while e > 0 {
            if e & 1 == 1 {
                acc = self.mul(&acc, &base, n);
            }
            base = self.mul(&base, &base, n);
            e >>= 1;
        }
        acc
    }

    /// `x^-1 y^-1 x y`.
    pub fn commutator(&self, x: &[u64], y: &[u64], n: u32) -> Element {
        let xy = self.mul(x, y, n);
        let yx = self.mul(y, x, n);
        self.mul(&self.inv(&yx, n), &xy, n)
    }

    fn check_level(&self, n: u32) -> Result<()> {
        if n > self.level {
            return Err(Error::Range(format!("level {n} exceeds the representable level {}", self.level)));
        }
        Ok(())
    }

    /// Generators of `G_n`, `n >= 1`, built from the defining recursion
    /// and reduced modulo `p^N`.
    pub fn filtration_generators(&self, n: u32) -> Result<Vec<Element>> {
        if n == 0 {
            return Err(Error::Validation("the filtration starts at G_1".into()));
        }
        self.check_level(n)?;
        let big = self.level;
        let first: Vec<Element> = (0..self.dim())
            .map(|i| {
                let mut e = self.identity();
                e[i] = 1;
                self.pow(&e, self.p, big)
            })
            .collect();
        let mut gens = first.clone();
        for _ in 1..n {
            let mut next: Vec<Element> = gens.iter().map(|x| self.pow(x, self.p, big)).collect();
            for x in &gens {
                for y in &first {
                    next.push(self.commutator(x, y, big));
                }
            }
            next.retain(|x| x.iter().any(|&a| a != 0));
            next.sort();
            next.dedup();
            gens = next;
        }
        Ok(gens)
    }

    /// Elements of the subgroup of `G/G_n` generated by `gens`.
    pub fn closure(&self, gens: &[Element], n: u32) -> Result<HashSet<Element>> {
        let gens: Vec<Element> = gens.iter().map(|g| self.reduce(g, n)).collect();
        let mut seen = HashSet::from([self.identity()]);
        let mut frontier = vec![self.identity()];
        while let Some(x) = frontier.pop() {
            for g in &gens {
                let y = self.mul(&x, g, n);
                if seen.insert(y.clone()) {
                    if seen.len() > MAX_COSETS {
                        return Err(Error::Range(format!("more than {MAX_COSETS} cosets at level {n}")));
                    }
                    frontier.push(y);
                }
            }
        }
        Ok(seen)
    }

    /// `[H : H ∩ G_n] = |H G_n / G_n|`.
    pub fn image_order(&self, h: &[Element], n: u32) -> Result<u64> {
        self.check_level(n)?;
        match self.kind {
            GroupKind::Abelian { d } => {
                let g = AbelianPGroup::new(self.p, vec![n; d])?;
                let s = Subgroup::generated(&g, h.iter().map(|x| self.reduce(x, n)));
                Ok(self.p.pow(s.log_order() as u32))
            }
            GroupKind::Heisenberg => Ok(self.p.pow(self.pc_log_order(h, n))),
        }
    }

    /// `log_p` of the order of `<h>` in `G/G_n`, by sifting through the
    /// series `G ⊃ {a = 0} ⊃ {a = b = 0}`, on whose layers the leading
    /// coordinate is additive.
    fn pc_log_order(&self, h: &[Element], n: u32) -> u32 {
        let (p, q) = (self.p, self.modulus(n));
        let val = |mut x: u64| {
            let mut v = 0;
            while x.is_multiple_of(p) {
                x /= p;
                v += 1;
            }
            v
        };
        let dim = self.dim();
        let mut table: Vec<Option<Element>> = vec![None; dim];
        let mut queue: Vec<Element> = h.iter().map(|x| self.reduce(x, n)).collect();
        while let Some(mut x) = queue.pop() {
            for i in 0..dim {
                if x[i] == 0 {
                    continue;
                }
                match &table[i] {
                    Some(t) if val(t[i]) <= val(x[i]) => {
                        let v = val(t[i]);
                        let r = q / p.pow(v);
                        let unit = inv_mod(t[i] / p.pow(v) % r, r).expect("unit part is invertible");
                        let k = mul_mod(x[i] / p.pow(v) % r, unit, r);
                        x = self.mul(&x, &self.inv(&self.pow(t, k, n), n), n);
                        debug_assert_eq!(x[i], 0);
                    }
                    _ => {
                        queue.push(self.pow(&x, p.pow(n - val(x[i])), n));
                        for t in table.iter().flatten() {
                            queue.push(self.commutator(&x, t, n));
                        }
                        if let Some(old) = table[i].replace(x) {
                            queue.push(old);
                        }
                        break;
                    }
                }
            }
        }
        table.iter().enumerate().filter_map(|(i, t)| t.as_ref().map(|t| n - val(t[i]))).sum()
    }

    /// `[G : G_n] = p^{nd}`.
    pub fn quotient_order(&self, n: u32) -> Result<u64> {
        self.check_level(n)?;
        checked_pow(self.p, n * self.dim() as u32).ok_or_else(|| Error::Range(format!("[G : G_{n}] overflows")))
    }
}

/// An exact fit `v_n = C p^{n e}` on the tail of a table.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct PowerFit {
    pub e: u32,
    pub c_num: u64,
    pub c_den: u64,
}

impl PowerFit {
    pub fn c(&self) -> Ratio<u64> {
        Ratio::new(self.c_num, self.c_den)
    }
}

/// Levels used for a fit: the last `ceil(len / 2)` rows, at least two.
pub fn tail_window(len: usize) -> usize {
    len.div_ceil(2).max(2).min(len)
}

/// Exact fit on the tail window; `None` when the tail is not a single
/// power law or has fewer than two consecutive levels.
pub fn fit_power(p: u64, rows: &[(u32, u64)]) -> Option<PowerFit> {
    let tail = &rows[rows.len() - tail_window(rows.len())..];
    if tail.len() < 2 || tail.iter().any(|&(_, v)| v == 0) {
        return None;
    }
    let mut e = None;
    for w in tail.windows(2) {
        let ((n0, v0), (n1, v1)) = (w[0], w[1]);
        if n1 != n0 + 1 || v1 % v0 != 0 {
            return None;
        }
        let step = crate::padic::valuation((v1 / v0) as u128, p)?;
        if p.pow(step) != v1 / v0 || e.is_some_and(|x| x != step) {
            return None;
        }
        e = Some(step);
    }
    let e = e?;
    let (n, v) = tail[0];
    let c = Ratio::new(v as u128, checked_pow(p, n * e)? as u128);
    Some(PowerFit { e, c_num: u64::try_from(*c.numer()).ok()?, c_den: u64::try_from(*c.denom()).ok()? })
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct IndexGrowth {
    /// `(n, [H : H ∩ G_n])`.
    pub rows: Vec<(u32, u64)>,
    /// First level of the fitted tail.
    pub window_start: u32,
    pub fit: Option<PowerFit>,
}

fn levels(g: &FiniteQuotientGroup, n_range: std::ops::RangeInclusive<u32>) -> Result<Vec<u32>> {
    let ns: Vec<u32> = n_range.collect();
    if ns.is_empty() {
        return Err(Error::Validation("empty level range".into()));
    }
    g.check_level(*ns.last().unwrap())?;
    Ok(ns)
}

pub fn index_growth(g: &FiniteQuotientGroup, h: &[Element], n_range: std::ops::RangeInclusive<u32>) -> Result<IndexGrowth> {
    let ns = levels(g, n_range)?;
    let rows = ns.iter().map(|&n| Ok((n, g.image_order(h, n)?))).collect::<Result<Vec<_>>>()?;
    Ok(IndexGrowth { window_start: rows[rows.len() - tail_window(rows.len())].0, fit: fit_power(g.p, &rows), rows })
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct GvBound {
    pub d: usize,
    /// `(n, g_n)` with `g_n = [G/G_n : H G_n / G_n]`.
    pub rows: Vec<(u32, u64)>,
    pub window_start: u32,
    /// Growth exponent of `g_n` on the tail, which should be `d - d_v`.
    pub exponent: Option<u32>,
    pub fit: Option<PowerFit>,
    /// `max g_n / p^{n(d-1)}` over the tail.
    pub tail_ratio_num: u64,
    pub tail_ratio_den: u64,
    /// The tail fit is exact with exponent at most `d - 1`.
    pub bounded: bool,
}

pub fn gv_bound(g: &FiniteQuotientGroup, h: &[Element], n_range: std::ops::RangeInclusive<u32>) -> Result<GvBound> {
    if h.iter().all(|x| g.reduce(x, g.level).iter().all(|&a| a == 0)) {
        return Err(Error::Precondition("decomposition subgroup is trivial".into()));
    }
    let ns = levels(g, n_range)?;
    let rows = ns
        .iter()
        .map(|&n| Ok((n, g.quotient_order(n)? / g.image_order(h, n)?)))
        .collect::<Result<Vec<(u32, u64)>>>()?;
    let d = g.dim();
    let window = tail_window(rows.len());
    let ratio = rows[rows.len() - window..]
        .iter()
        .map(|&(n, v)| {
            let scale = checked_pow(g.p, n * (d as u32 - 1)).ok_or_else(|| Error::Range("p^{n(d-1)} overflows".into()))?;
            Ok(Ratio::new(v, scale))
        })
        .collect::<Result<Vec<_>>>()?
        .into_iter()
        .max()
        .expect("nonempty tail");
    let fit = fit_power(g.p, &rows);
    Ok(GvBound {
        d,
        window_start: rows[rows.len() - window].0,
        exponent: fit.map(|f| f.e),
        bounded: fit.is_some_and(|f| (f.e as usize) < d),
        fit,
        tail_ratio_num: *ratio.numer(),
        tail_ratio_den: *ratio.denom(),
        rows,
    })
}
