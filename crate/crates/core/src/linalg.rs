//! Exact integer linear algebra: Bareiss elimination, rank certificates modulo a
//! prime, and column-sparse integer matrices.

use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{Signed, ToPrimitive, Zero};

/// Mersenne prime `2^61 - 1`.
pub const RANK_PRIME: u64 = (1 << 61) - 1;

/// Determinant of a square integer matrix by fraction-free elimination.
pub fn bareiss_determinant(mut m: Vec<Vec<BigInt>>) -> BigInt {
    let n = m.len();
    if n == 0 {
        return BigInt::from(1);
    }
    let mut sign = 1;
    let mut prev = BigInt::from(1);
    for k in 0..n {
        if m[k][k].is_zero() {
            match (k + 1..n).find(|&i| !m[i][k].is_zero()) {
                Some(i) => {
                    m.swap(k, i);
                    sign = -sign;
                }
                None => return BigInt::zero(),
            }
        }
        for i in k + 1..n {
            for j in k + 1..n {
                let v = &m[i][j] * &m[k][k] - &m[i][k] * &m[k][j];
                m[i][j] = v / &prev;
            }
            m[i][k] = BigInt::zero();
        }
        prev = m[k][k].clone();
    }
    if sign < 0 {
        -m[n - 1][n - 1].clone()
    } else {
        m[n - 1][n - 1].clone()
    }
}

/// Rank over `Q` of an integer matrix by fraction-free (Bareiss) elimination.
pub fn bareiss_rank(mut m: Vec<Vec<BigInt>>) -> usize {
    let rows = m.len();
    let cols = m.first().map_or(0, Vec::len);
    let mut rank = 0;
    let mut prev = BigInt::from(1);
    for c in 0..cols {
        if rank == rows {
            break;
        }
        let Some(p) = (rank..rows).find(|&i| !m[i][c].is_zero()) else {
            continue;
        };
        m.swap(rank, p);
        for i in rank + 1..rows {
            for j in c + 1..cols {
                let v = &m[i][j] * &m[rank][c] - &m[i][c] * &m[rank][j];
                m[i][j] = v / &prev;
            }
            m[i][c] = BigInt::zero();
        }
        prev = m[rank][c].clone();
        rank += 1;
    }
    rank
}

fn mul_mod(a: u64, b: u64, p: u64) -> u64 {
    ((a as u128 * b as u128) % p as u128) as u64
}

fn pow_mod(mut a: u64, mut e: u64, p: u64) -> u64 {
    let mut acc = 1u64;
    while e > 0 {
        if e & 1 == 1 {
            acc = mul_mod(acc, a, p);
        }
        a = mul_mod(a, a, p);
        e >>= 1;
    }
    acc
}

/// Reduce an integer into `[0, p)`.
pub fn reduce_mod(x: &BigInt, p: u64) -> u64 {
    x.mod_floor(&BigInt::from(p)).to_u64().expect("residue fits in u64")
}

/// Rank over `F_p` of a dense matrix of residues.
pub fn rank_mod_p(mut m: Vec<Vec<u64>>, p: u64) -> usize {
    let rows = m.len();
    let cols = m.first().map_or(0, Vec::len);
    let mut rank = 0;
    for c in 0..cols {
        if rank == rows {
            break;
        }
        let Some(piv) = (rank..rows).find(|&i| m[i][c] != 0) else {
            continue;
        };
        m.swap(rank, piv);
        let inv = pow_mod(m[rank][c], p - 2, p);
        let (top, bottom) = m.split_at_mut(rank + 1);
        let pivot_row = &top[rank];
        for row in bottom.iter_mut() {
            if row[c] == 0 {
                continue;
            }
            let f = mul_mod(row[c], inv, p);
            for j in c..cols {
                if pivot_row[j] != 0 {
                    row[j] = (row[j] + p - mul_mod(f, pivot_row[j], p)) % p;
                }
            }
        }
        rank += 1;
    }
    rank
}

/// How an exact rank was established.
#[derive(Clone, Copy, Debug, PartialEq, Eq, serde::Serialize)]
#[serde(rename_all = "snake_case")]
pub enum RankMethod {
    /// Full rank modulo a prime, which forces full rank over `Q`.
    ModularCertificate,
    /// Fraction-free elimination over the integers.
    Bareiss,
}

/// Integer matrix stored by columns; column `j` is the image of source basis vector `j`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SparseMatrix {
    rows: usize,
    columns: Vec<BTreeMap<usize, BigInt>>,
}

impl SparseMatrix {
    pub fn zero(rows: usize, cols: usize) -> Self {
        SparseMatrix { rows, columns: vec![BTreeMap::new(); cols] }
    }

    pub fn from_columns(rows: usize, columns: Vec<BTreeMap<usize, BigInt>>) -> Self {
        debug_assert!(columns.iter().all(|c| c.keys().all(|&i| i < rows)));
        let columns = columns.into_iter().map(|c| c.into_iter().filter(|(_, v)| !v.is_zero()).collect()).collect();
        SparseMatrix { rows, columns }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.columns.len()
    }

    pub fn get(&self, i: usize, j: usize) -> BigInt {
        self.columns[j].get(&i).cloned().unwrap_or_default()
    }

    pub fn column(&self, j: usize) -> &BTreeMap<usize, BigInt> {
        &self.columns[j]
    }

    pub fn nnz(&self) -> usize {
        self.columns.iter().map(BTreeMap::len).sum()
    }

    pub fn is_zero(&self) -> bool {
        self.columns.iter().all(BTreeMap::is_empty)
    }

    /// `self · rhs`, i.e. apply `rhs` first.
    pub fn compose(&self, rhs: &SparseMatrix) -> SparseMatrix {
        assert_eq!(self.cols(), rhs.rows, "dimension mismatch in composition");
        let columns = rhs
            .columns
            .iter()
            .map(|col| {
                let mut out: BTreeMap<usize, BigInt> = BTreeMap::new();
                for (&k, a) in col {
                    for (&i, b) in &self.columns[k] {
                        *out.entry(i).or_default() += a * b;
                    }
                }
                out.retain(|_, v| !v.is_zero());
                out
            })
            .collect();
        SparseMatrix { rows: self.rows, columns }
    }

    pub fn to_dense(&self) -> Vec<Vec<BigInt>> {
        let mut m = vec![vec![BigInt::zero(); self.cols()]; self.rows];
        for (j, col) in self.columns.iter().enumerate() {
            for (&i, v) in col {
                m[i][j] = v.clone();
            }
        }
        m
    }

    /// Dense residues, transposed so the shorter side indexes rows.
    fn to_residues(&self, p: u64) -> Vec<Vec<u64>> {
        if self.cols() <= self.rows {
            let mut m = vec![vec![0u64; self.rows]; self.cols()];
            for (j, col) in self.columns.iter().enumerate() {
                for (&i, v) in col {
                    m[j][i] = reduce_mod(v, p);
                }
            }
            m
        } else {
            let mut m = vec![vec![0u64; self.cols()]; self.rows];
            for (j, col) in self.columns.iter().enumerate() {
                for (&i, v) in col {
                    m[i][j] = reduce_mod(v, p);
                }
            }
            m
        }
    }

    pub fn rank_mod(&self, p: u64) -> usize {
        rank_mod_p(self.to_residues(p), p)
    }

    /// Exact rank over `Q`. Full rank modulo [`RANK_PRIME`] certifies full rank
    /// over `Q`; otherwise falls back to Bareiss elimination.
    pub fn rank(&self) -> (usize, RankMethod) {
        let full = self.rows.min(self.cols());
        if self.rank_mod(RANK_PRIME) == full {
            return (full, RankMethod::ModularCertificate);
        }
        (self.bareiss_rank(), RankMethod::Bareiss)
    }

    pub fn bareiss_rank(&self) -> usize {
        bareiss_rank(self.to_dense())
    }

    /// Largest absolute entry, for reports.
    pub fn max_abs_entry(&self) -> BigInt {
        self.columns.iter().flat_map(|c| c.values()).map(|v| v.abs()).max().unwrap_or_default()
    }
}
