//! Finite abelian `p`-groups `Z/p^{r_1} + ... + Z/p^{r_k}`, their subgroups
//! and homomorphisms.
//!
//! A subgroup is kept as a saturated echelon basis: slot `i` holds at most
//! one vector whose first nonzero coordinate is `i`, equal to exactly
//! `p^{e_i}`, and `p^{r_i - e_i}` times that vector reduces to zero against
//! the later slots. Every element then has a unique expansion with
//! coefficient `c_i < p^{r_i - e_i}`, so the order is `prod p^{r_i - e_i}`.

use crate::error::{Error, Result};
use crate::padic::{checked_pow, inv_mod, is_prime, smith_normal_form_mod, ResidueRing};

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct AbelianPGroup {
    p: u64,
    exps: Vec<u32>,
    moduli: Vec<u64>,
}

impl AbelianPGroup {
    pub fn new(p: u64, exps: Vec<u32>) -> Result<Self> {
        if !is_prime(p) {
            return Err(Error::InvalidPrime(p, "not prime"));
        }
        let top = exps.iter().copied().max().unwrap_or(0);
        // Subgroup structure is read off with one spare power of p.
        checked_pow(p, top + 1)
            .filter(|&q| q < (1 << 62))
            .ok_or_else(|| Error::Validation(format!("exponent {top} too large for p = {p}")))?;
        let moduli = exps.iter().map(|&r| p.pow(r)).collect();
        Ok(Self { p, exps, moduli })
    }

    pub fn p(&self) -> u64 {
        self.p
    }

    pub fn exps(&self) -> &[u32] {
        &self.exps
    }

    pub fn dim(&self) -> usize {
        self.exps.len()
    }

    pub fn modulus(&self, i: usize) -> u64 {
        self.moduli[i]
    }

    pub fn max_exp(&self) -> u32 {
        self.exps.iter().copied().max().unwrap_or(0)
    }

    /// `log_p` of the group order.
    pub fn log_order(&self) -> u64 {
        self.exps.iter().map(|&r| r as u64).sum()
    }

    pub fn zero(&self) -> Vec<u64> {
        vec![0; self.dim()]
    }

    pub fn basis(&self, j: usize) -> Vec<u64> {
        let mut v = self.zero();
        v[j] = 1 % self.moduli[j];
        v
    }

    pub fn reduce_signed(&self, v: &[i128]) -> Vec<u64> {
        v.iter().zip(&self.moduli).map(|(&x, &q)| x.rem_euclid(q as i128) as u64).collect()
    }

    /// Products of two residues fit in a `u64`.
    fn small(&self) -> bool {
        self.moduli.iter().all(|&q| q < 1 << 31)
    }

    fn sub_scaled(&self, x: &mut [u64], c: u64, y: &[u64]) {
        if self.small() {
            for ((a, &b), &q) in x.iter_mut().zip(y).zip(&self.moduli) {
                let t = (c % q) * b % q;
                *a = (*a + q - t) % q;
            }
            return;
        }
        for ((a, &b), &q) in x.iter_mut().zip(y).zip(&self.moduli) {
            let t = ((c as u128 * b as u128) % q as u128) as u64;
            *a = (*a + q - t) % q;
        }
    }

    fn scale(&self, c: u64, x: &[u64]) -> Vec<u64> {
        if self.small() {
            return x.iter().zip(&self.moduli).map(|(&a, &q)| (c % q) * a % q).collect();
        }
        x.iter().zip(&self.moduli).map(|(&a, &q)| ((c as u128 * a as u128) % q as u128) as u64).collect()
    }

    fn valuation(&self, x: u64) -> u32 {
        let mut v = 0;
        let mut x = x;
        while x.is_multiple_of(self.p) {
            x /= self.p;
            v += 1;
        }
        v
    }

    pub fn direct_sum(&self, other: &Self) -> Result<Self> {
        if self.p != other.p {
            return Err(Error::ShapeMismatch(format!("direct sum of {}- and {}-groups", self.p, other.p)));
        }
        let mut exps = self.exps.clone();
        exps.extend_from_slice(&other.exps);
        Self::new(self.p, exps)
    }
}

/// A homomorphism given by its matrix on the standard generators
/// (`dst.dim()` rows, `src.dim()` columns).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Hom {
    pub src: AbelianPGroup,
    pub dst: AbelianPGroup,
    pub matrix: Vec<Vec<u64>>,
}

impl Hom {
    /// Rejects matrices that do not respect generator orders.
    pub fn new(src: &AbelianPGroup, dst: &AbelianPGroup, matrix: &[Vec<i128>]) -> Result<Self> {
        if matrix.len() != dst.dim() || matrix.iter().any(|r| r.len() != src.dim()) {
            return Err(Error::ShapeMismatch(format!(
                "expected a {}x{} matrix",
                dst.dim(),
                src.dim()
            )));
        }
        let mut out = Vec::with_capacity(dst.dim());
        for (i, row) in matrix.iter().enumerate() {
            let q = dst.modulus(i) as i128;
            let mut r = Vec::with_capacity(src.dim());
            for (j, &x) in row.iter().enumerate() {
                let x = x.rem_euclid(q) as u64;
                let gap = dst.exps[i].saturating_sub(src.exps[j]);
                if !x.is_multiple_of(dst.p.pow(gap)) {
                    return Err(Error::Validation(format!(
                        "entry ({i}, {j}) = {x} does not define a homomorphism Z/p^{} -> Z/p^{}",
                        src.exps[j], dst.exps[i]
                    )));
                }
                r.push(x);
            }
            out.push(r);
        }
        Ok(Self { src: src.clone(), dst: dst.clone(), matrix: out })
    }

    pub fn identity(g: &AbelianPGroup) -> Self {
        let matrix = (0..g.dim()).map(|i| g.basis(i)).collect();
        Self { src: g.clone(), dst: g.clone(), matrix }
    }

    pub fn zero(src: &AbelianPGroup, dst: &AbelianPGroup) -> Self {
        Self { src: src.clone(), dst: dst.clone(), matrix: vec![vec![0; src.dim()]; dst.dim()] }
    }

    pub fn apply(&self, x: &[u64]) -> Vec<u64> {
        self.matrix
            .iter()
            .enumerate()
            .map(|(i, row)| {
                let q = self.dst.modulus(i) as u128;
                if q < 1 << 31 {
                    // At most 2^62 per term, so the sum cannot overflow.
                    let acc: u128 = row.iter().zip(x).map(|(&a, &b)| (a * b) as u128).sum();
                    return (acc % q) as u64;
                }
                let mut acc = 0u128;
                for (&a, &b) in row.iter().zip(x) {
                    acc = (acc + a as u128 * b as u128) % q;
                }
                acc as u64
            })
            .collect()
    }

    /// `self ∘ other`.
    pub fn compose(&self, other: &Self) -> Result<Self> {
        if other.dst != self.src {
            return Err(Error::ShapeMismatch("maps do not compose".into()));
        }
        let cols: Vec<Vec<u64>> = (0..other.src.dim()).map(|j| self.apply(&other.apply(&other.src.basis(j)))).collect();
        let matrix = (0..self.dst.dim()).map(|i| cols.iter().map(|c| c[i]).collect()).collect();
        Ok(Self { src: other.src.clone(), dst: self.dst.clone(), matrix })
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.combine(other, 1)
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.combine(other, -1)
    }

    fn combine(&self, other: &Self, sign: i128) -> Result<Self> {
        if self.src != other.src || self.dst != other.dst {
            return Err(Error::ShapeMismatch("maps have different domains".into()));
        }
        let matrix = self
            .matrix
            .iter()
            .zip(&other.matrix)
            .enumerate()
            .map(|(i, (a, b))| {
                let q = self.dst.modulus(i) as i128;
                a.iter().zip(b).map(|(&x, &y)| (x as i128 + sign * y as i128).rem_euclid(q) as u64).collect()
            })
            .collect();
        Ok(Self { src: self.src.clone(), dst: self.dst.clone(), matrix })
    }

    pub fn pow(&self, e: u32) -> Result<Self> {
        let mut acc = Self::identity(&self.src);
        for _ in 0..e {
            acc = self.compose(&acc)?;
        }
        Ok(acc)
    }

    pub fn is_identity(&self) -> bool {
        self.src == self.dst && *self == Self::identity(&self.src)
    }

    /// Kernel, by echelonising the graph inside `dst + src`.
    pub fn kernel(&self) -> Subgroup {
        let ambient = self.dst.direct_sum(&self.src).expect("same prime");
        let mut graph = Subgroup::trivial(&ambient);
        let k = self.dst.dim();
        for j in 0..self.src.dim() {
            let mut v = self.apply(&self.src.basis(j));
            v.extend(self.src.basis(j));
            graph.insert(v);
        }
        let gens = graph.slots[k..].iter().flatten().map(|(_, v)| v[k..].to_vec());
        Subgroup::generated(&self.src, gens)
    }

    pub fn image(&self) -> Subgroup {
        self.image_of(&Subgroup::whole(&self.src))
    }

    pub fn image_of(&self, s: &Subgroup) -> Subgroup {
        Subgroup::generated(&self.dst, s.generators().map(|v| self.apply(v)))
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Subgroup {
    group: AbelianPGroup,
    slots: Vec<Option<(u32, Vec<u64>)>>,
}

impl Subgroup {
    pub fn trivial(g: &AbelianPGroup) -> Self {
        Self { group: g.clone(), slots: vec![None; g.dim()] }
    }

    pub fn whole(g: &AbelianPGroup) -> Self {
        let slots = (0..g.dim()).map(|i| (g.exps[i] > 0).then(|| (0, g.basis(i)))).collect();
        Self { group: g.clone(), slots }
    }

    pub fn generated<I: IntoIterator<Item = Vec<u64>>>(g: &AbelianPGroup, gens: I) -> Self {
        let mut s = Self::trivial(g);
        for v in gens {
            s.insert(v);
        }
        s
    }

    pub fn group(&self) -> &AbelianPGroup {
        &self.group
    }

    pub fn generators(&self) -> impl Iterator<Item = &Vec<u64>> {
        self.slots.iter().flatten().map(|(_, v)| v)
    }

    pub fn log_order(&self) -> u64 {
        self.slots
            .iter()
            .enumerate()
            .filter_map(|(i, s)| s.as_ref().map(|(e, _)| (self.group.exps[i] - e) as u64))
            .sum()
    }

    pub fn is_trivial(&self) -> bool {
        self.slots.iter().all(Option::is_none)
    }

    fn normalize(&self, x: &mut Vec<u64>, i: usize, val: u32) {
        let g = &self.group;
        let unit = x[i] / g.p.pow(val);
        let big = g.p.pow(g.max_exp());
        let inv = inv_mod(unit % big, big).expect("cofactor of a p-power is a unit");
        *x = g.scale(inv, x);
    }

    pub fn insert(&mut self, v: Vec<u64>) {
        let mut queue = vec![self.group.reduce_signed(&v.iter().map(|&x| x as i128).collect::<Vec<_>>())];
        'outer: while let Some(mut x) = queue.pop() {
            for i in 0..x.len() {
                if x[i] == 0 {
                    continue;
                }
                let val = self.group.valuation(x[i]);
                let r = self.group.exps[i];
                match &self.slots[i] {
                    Some((e, s)) if *e <= val => {
                        let c = x[i] / self.group.p.pow(*e);
                        let s = s.clone();
                        self.group.sub_scaled(&mut x, c, &s);
                    }
                    slot => {
                        self.normalize(&mut x, i, val);
                        let sat = self.group.scale(self.group.p.pow(r - val), &x);
                        let old = slot.as_ref().map(|(_, s)| s.clone());
                        self.slots[i] = Some((val, x));
                        queue.push(sat);
                        if let Some(old) = old {
                            queue.push(old);
                        }
                        continue 'outer;
                    }
                }
            }
        }
    }

    /// Coefficients of `v` on the slot vectors, or `None` if `v` is not in
    /// the subgroup.
    pub fn coords(&self, v: &[u64]) -> Option<Vec<u64>> {
        let mut x = v.to_vec();
        let mut c = vec![0u64; x.len()];
        for i in 0..x.len() {
            if x[i] == 0 {
                continue;
            }
            let (e, s) = self.slots[i].as_ref()?;
            if self.group.valuation(x[i]) < *e {
                return None;
            }
            c[i] = x[i] / self.group.p.pow(*e);
            self.group.sub_scaled(&mut x, c[i], s);
        }
        Some(c)
    }

    pub fn contains(&self, v: &[u64]) -> bool {
        self.coords(v).is_some()
    }

    pub fn is_subgroup_of(&self, other: &Self) -> bool {
        self.group == other.group && self.generators().all(|v| other.contains(v))
    }

    pub fn same_as(&self, other: &Self) -> bool {
        self.is_subgroup_of(other) && self.log_order() == other.log_order()
    }

    pub fn intersection(&self, other: &Self) -> Result<Self> {
        if self.group != other.group {
            return Err(Error::ShapeMismatch("subgroups of different groups".into()));
        }
        let full = self.group.log_order();
        if self.log_order() == full {
            return Ok(other.clone());
        }
        if other.log_order() == full {
            return Ok(self.clone());
        }
        let k = self.group.dim();
        let ambient = self.group.direct_sum(&self.group)?;
        let mut big = Self::trivial(&ambient);
        for s in self.generators() {
            let mut v = s.clone();
            v.extend_from_slice(s);
            big.insert(v);
        }
        for t in other.generators() {
            let mut v = t.clone();
            v.extend(std::iter::repeat_n(0, k));
            big.insert(v);
        }
        let gens = big.slots[k..].iter().flatten().map(|(_, v)| v[k..].to_vec());
        Ok(Self::generated(&self.group, gens))
    }

    /// Coordinatewise reduction into a group with smaller exponents.
    pub fn project(&self, target: &AbelianPGroup) -> Result<Self> {
        if target.dim() != self.group.dim()
            || target.p != self.group.p
            || target.exps.iter().zip(&self.group.exps).any(|(a, b)| a > b)
        {
            return Err(Error::ShapeMismatch("projection target is not a quotient by coordinates".into()));
        }
        let gens = self
            .generators()
            .map(|v| v.iter().enumerate().map(|(i, &x)| x % target.modulus(i)).collect());
        Ok(Self::generated(target, gens))
    }

    /// Invariant factor exponents of `self / sub`, ascending, zeros dropped.
    pub fn quotient_structure(&self, sub: &Self) -> Result<Vec<u32>> {
        if !sub.is_subgroup_of(self) {
            return Err(Error::InconsistentPresentation("quotient by a non-subgroup".into()));
        }
        let g = &self.group;
        let positions: Vec<usize> = (0..self.slots.len()).filter(|&i| self.slots[i].is_some()).collect();
        let col_of = |c: &[u64]| -> Vec<u64> { positions.iter().map(|&i| c[i]).collect() };
        let ring = ResidueRing::new(g.p, g.max_exp() + 1)?;
        let q = ring.modulus();
        let mut rows = Vec::new();
        for (n, &i) in positions.iter().enumerate() {
            let (e, s) = self.slots[i].as_ref().expect("occupied");
            let order = g.p.pow(g.exps[i] - e);
            let sat = g.scale(order, s);
            let mut row: Vec<u64> = col_of(&self.coords(&sat).expect("saturated")).iter().map(|&c| (q - c % q) % q).collect();
            row[n] = ring.add(row[n], order);
            rows.push(row);
        }
        for t in sub.generators() {
            rows.push(col_of(&self.coords(t).expect("checked containment")));
        }
        let mut out: Vec<u32> = smith_normal_form_mod(&rows, positions.len(), &ring).into_iter().filter(|&v| v > 0).collect();
        out.sort_unstable();
        let total: u64 = out.iter().map(|&v| v as u64).sum();
        assert_eq!(total, self.log_order() - sub.log_order(), "quotient structure disagrees with orders");
        Ok(out)
    }
}
