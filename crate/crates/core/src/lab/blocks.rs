//! Matrices of `g` on the basic `Z[G]`-lattices and their direct sums.

use rand::Rng;

use super::module::GModule;
use crate::error::Result;

pub type IMatrix = Vec<Vec<i128>>;

/// Cyclic shift `g^i -> g^{i+1}` on `Z[G]`.
pub fn regular(p: u64) -> IMatrix {
    let n = p as usize;
    (0..n).map(|i| (0..n).map(|j| ((j + 1) % n == i) as i128).collect()).collect()
}

/// Companion matrix of `1 + x + ... + x^{p-1}`, i.e. `g` on `Z[G]/(N)`,
/// which is also the augmentation ideal up to isomorphism.
pub fn augmentation(p: u64) -> IMatrix {
    let n = p as usize - 1;
    (0..n)
        .map(|i| (0..n).map(|j| if j + 1 == n { -1 } else { (j + 1 == i) as i128 }).collect())
        .collect()
}

/// Unipotent Jordan block of size `k <= p`; over `F_p` these are the
/// indecomposable `F_p[G]`-modules.
pub fn jordan(k: usize) -> IMatrix {
    (0..k).map(|i| (0..k).map(|j| (i == j || i + 1 == j) as i128).collect()).collect()
}

pub fn identity(k: usize) -> IMatrix {
    (0..k).map(|i| (0..k).map(|j| (i == j) as i128).collect()).collect()
}

pub fn block_diagonal(blocks: &[IMatrix]) -> IMatrix {
    let n: usize = blocks.iter().map(Vec::len).sum();
    let mut out = vec![vec![0; n]; n];
    let mut at = 0;
    for b in blocks {
        for (i, row) in b.iter().enumerate() {
            out[at + i][at..at + row.len()].copy_from_slice(row);
        }
        at += b.len();
    }
    out
}

pub fn kronecker(a: &IMatrix, b: &IMatrix) -> IMatrix {
    let (n, m) = (a.len(), b.len());
    let mut out = vec![vec![0; n * m]; n * m];
    for i in 0..n {
        for j in 0..n {
            for k in 0..m {
                for l in 0..m {
                    out[i * m + k][j * m + l] = a[i][j] * b[k][l];
                }
            }
        }
    }
    out
}

pub(crate) fn mat_mul_mod(a: &IMatrix, b: &IMatrix, q: i128) -> IMatrix {
    let n = a.len();
    let m = b.first().map_or(0, Vec::len);
    let mut out = vec![vec![0; m]; n];
    for i in 0..n {
        for (k, &x) in a[i].iter().enumerate() {
            if x == 0 {
                continue;
            }
            for j in 0..m {
                out[i][j] = (out[i][j] + x * b[k][j]).rem_euclid(q);
            }
        }
    }
    out
}

/// Inverse modulo `p^r` by Gauss-Jordan with unit pivots; `None` when
/// singular mod `p`.
pub(crate) fn inverse_mod(a: &IMatrix, p: u64, q: i128) -> Option<IMatrix> {
    let n = a.len();
    let mut m: Vec<Vec<i128>> = a
        .iter()
        .enumerate()
        .map(|(i, r)| {
            let mut row: Vec<i128> = r.iter().map(|x| x.rem_euclid(q)).collect();
            row.extend((0..n).map(|j| (i == j) as i128));
            row
        })
        .collect();
    for c in 0..n {
        let piv = (c..n).find(|&i| m[i][c] % p as i128 != 0)?;
        m.swap(c, piv);
        let inv = crate::padic::inv_mod(m[c][c] as u64, q as u64)? as i128;
        for x in m[c].iter_mut() {
            *x = (*x * inv).rem_euclid(q);
        }
        let pivot_row = m[c].clone();
        for (i, row) in m.iter_mut().enumerate() {
            if i != c && row[c] != 0 {
                let f = row[c];
                for (x, &y) in row.iter_mut().zip(&pivot_row) {
                    *x = (*x - f * y).rem_euclid(q);
                }
            }
        }
    }
    Some(m.into_iter().map(|r| r[n..].to_vec()).collect())
}

pub(crate) fn random_invertible<R: Rng>(rng: &mut R, n: usize, p: u64, q: i128) -> (IMatrix, IMatrix) {
    loop {
        let c: IMatrix = (0..n).map(|_| (0..n).map(|_| rng.gen_range(0..q)).collect()).collect();
        if let Some(ci) = inverse_mod(&c, p, q) {
            return (c, ci);
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BlockKind {
    Trivial,
    Regular,
    Augmentation,
    /// Only over `F_p`.
    Jordan(usize),
}

impl BlockKind {
    pub fn matrix(self, p: u64) -> IMatrix {
        match self {
            Self::Trivial => identity(1),
            Self::Regular => regular(p),
            Self::Augmentation => augmentation(p),
            Self::Jordan(k) => jordan(k),
        }
    }
}

/// Direct sum of blocks over `Z/p^s`.
pub fn lattice_module(p: u64, s: u32, blocks: &[BlockKind]) -> Result<GModule> {
    let mats: Vec<IMatrix> = blocks.iter().map(|b| b.matrix(p)).collect();
    let g = block_diagonal(&mats);
    GModule::new(p, vec![s; g.len()], g, None)
}
