//! Cup product with a hyperplane class on the invariant cohomology and the
//! exact rank check of curious hard Lefschetz.

use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_traits::One;
use serde::Serialize;

use crate::error::{PwError, Result, WordBound};
use crate::graded::{cup_invariants, ExteriorMonomial, InvariantSpace, Rational, TensorClass, TensorWord};
use crate::linalg::{RankMethod, SparseMatrix};

/// `Σ_a 1⊗…⊗ω⊗…⊗1` with `ω = Σ_i c_i e_i ∧ e_{g+i}`; `weights` are the `c_i`.
pub fn hyperplane_class_weighted(g: u32, r: u32, weights: &[i64]) -> Result<TensorClass> {
    if g == 0 || r == 0 {
        return Err(PwError::Usage(format!("g and r must be positive (got g={g}, r={r})")));
    }
    if weights.len() != g as usize {
        return Err(PwError::Usage(format!("need {g} symplectic weights, got {}", weights.len())));
    }
    let unit = ExteriorMonomial::unit(2 * g);
    let mut words = Vec::new();
    for slot in 0..r as usize {
        for (i, &c) in (1..=g).zip(weights) {
            let mut factors = vec![unit; r as usize];
            factors[slot] = ExteriorMonomial::new(2 * g, &[i, g + i])?;
            words.push(TensorWord { factors, coefficient: Rational::from_integer(BigInt::from(c)) });
        }
    }
    TensorClass::from_words(g, r, words)
}

/// The symmetrized standard symplectic form.
pub fn hyperplane_class(g: u32, r: u32) -> Result<TensorClass> {
    hyperplane_class_weighted(g, r, &vec![1; g as usize])
}

/// Cup-with-`L` matrices `H^j → H^{j+2}` on the invariant basis.
#[derive(Clone, Debug)]
pub struct LefschetzOperator {
    g: u32,
    r: u32,
    class: TensorClass,
    spaces: Vec<InvariantSpace>,
    /// `matrices[j]`: `H^j → H^{j+2}`.
    matrices: Vec<SparseMatrix>,
}

fn to_integer(c: &Rational) -> Result<BigInt> {
    if !c.is_integer() {
        return Err(PwError::Domain(format!("non-integral matrix entry {c}")));
    }
    Ok(c.to_integer())
}

impl LefschetzOperator {
    pub fn new(g: u32, r: u32, bound: WordBound) -> Result<Self> {
        Self::with_class(hyperplane_class(g, r)?, bound)
    }

    pub fn with_class(class: TensorClass, bound: WordBound) -> Result<Self> {
        let (g, r) = (class.g(), class.r());
        bound.check(g, r)?;
        if class.is_zero() || class.terms().any(|(w, _)| w.iter().map(|m| m.degree()).sum::<u32>() != 2) {
            return Err(PwError::Domain("the class must be nonzero and homogeneous of degree 2".into()));
        }
        if !class.is_invariant() {
            return Err(PwError::Domain("the class is not S_r-invariant".into()));
        }
        let top = 2 * g * r;
        let spaces = (0..=top).map(|j| InvariantSpace::in_degree(g, r, j, bound)).collect::<Result<Vec<_>>>()?;
        let mut matrices = Vec::with_capacity(top as usize + 1);
        for j in 0..=top as usize {
            let source = &spaces[j];
            let Some(target) = spaces.get(j + 2) else {
                matrices.push(SparseMatrix::zero(0, source.dim()));
                continue;
            };
            let mut columns = Vec::with_capacity(source.dim());
            for w in source.words() {
                let image = cup_invariants(&class, &w.to_class(g))?;
                let coords = target.coordinates(&image)?;
                let col: BTreeMap<usize, BigInt> =
                    coords.iter().map(|(&i, c)| Ok((i, to_integer(c)?))).collect::<Result<_>>()?;
                columns.push(col);
            }
            matrices.push(SparseMatrix::from_columns(target.dim(), columns));
        }
        Ok(LefschetzOperator { g, r, class, spaces, matrices })
    }

    pub fn g(&self) -> u32 {
        self.g
    }

    pub fn r(&self) -> u32 {
        self.r
    }

    pub fn class(&self) -> &TensorClass {
        &self.class
    }

    pub fn top_degree(&self) -> u32 {
        2 * self.g * self.r
    }

    pub fn dim(&self, j: u32) -> usize {
        self.spaces.get(j as usize).map_or(0, InvariantSpace::dim)
    }

    pub fn space(&self, j: u32) -> Option<&InvariantSpace> {
        self.spaces.get(j as usize)
    }

    /// `L: H^j → H^{j+2}`.
    pub fn matrix(&self, j: u32) -> Option<&SparseMatrix> {
        self.matrices.get(j as usize)
    }

    /// `L^m: H^j → H^{j+2m}` as the composition of single steps.
    pub fn power_matrix(&self, j: u32, m: u32) -> SparseMatrix {
        let mut acc = identity(self.dim(j));
        for step in 0..m {
            let d = j + 2 * step;
            let next = match self.matrices.get(d as usize) {
                Some(mat) => mat.clone(),
                None => SparseMatrix::zero(0, self.dim(d)),
            };
            acc = next.compose(&acc);
            if acc.rows() == 0 {
                break;
            }
        }
        // past the top degree the target is 0-dimensional
        if j + 2 * m > self.top_degree() {
            return SparseMatrix::zero(0, self.dim(j));
        }
        acc
    }

    /// Zero out one column of `L: H^j → H^{j+2}` (failure-injection fixture).
    pub fn kill_column(&mut self, j: u32, col: usize) {
        if let Some(m) = self.matrices.get_mut(j as usize) {
            if col < m.cols() {
                let mut columns: Vec<_> = (0..m.cols()).map(|c| m.column(c).clone()).collect();
                columns[col].clear();
                *m = SparseMatrix::from_columns(m.rows(), columns);
            }
        }
    }

    /// Rank of `L^k: H^{gr−k} → H^{gr+k}` for each `k = 1..=gr`.
    pub fn verify(&self) -> HardLefschetzReport {
        let gr = self.g * self.r;
        let mut steps = Vec::new();
        for k in 1..=gr {
            let m = self.power_matrix(gr - k, k);
            let (rank, method) = m.rank();
            let source_dim = self.dim(gr - k);
            let target_dim = self.dim(gr + k);
            steps.push(LefschetzStep {
                k,
                source_dim,
                target_dim,
                rank,
                method,
                pass: rank == source_dim && source_dim == target_dim,
            });
        }
        let first_failure = steps.iter().find(|s| !s.pass).map(|s| s.k);
        HardLefschetzReport {
            claim: "Theorem B(ii) (curious hard Lefschetz): L^k: Gr^W_{2gr-2k} H^* -> Gr^W_{2gr+2k} H^{*+2k} is an isomorphism",
            g: self.g,
            r: self.r,
            pass: first_failure.is_none(),
            first_failure,
            steps,
        }
    }
}

fn identity(n: usize) -> SparseMatrix {
    SparseMatrix::from_columns(n, (0..n).map(|i| [(i, BigInt::one())].into_iter().collect()).collect())
}

#[derive(Clone, Debug, Serialize)]
pub struct LefschetzStep {
    pub k: u32,
    pub source_dim: usize,
    pub target_dim: usize,
    pub rank: usize,
    pub method: RankMethod,
    pub pass: bool,
}

#[derive(Clone, Debug, Serialize)]
pub struct HardLefschetzReport {
    pub claim: &'static str,
    pub g: u32,
    pub r: u32,
    pub pass: bool,
    pub first_failure: Option<u32>,
    pub steps: Vec<LefschetzStep>,
}

pub fn verify_hard_lefschetz(g: u32, r: u32, bound: WordBound) -> Result<HardLefschetzReport> {
    Ok(LefschetzOperator::new(g, r, bound)?.verify())
}

/// Same check for `ω = Σ c_i e_i∧e_{g+i}` with the given positive weights.
pub fn verify_hard_lefschetz_weighted(
    g: u32,
    r: u32,
    weights: &[i64],
    bound: WordBound,
) -> Result<HardLefschetzReport> {
    if weights.iter().any(|&c| c <= 0) {
        return Err(PwError::Usage("symplectic weights must be positive".into()));
    }
    Ok(LefschetzOperator::with_class(hyperplane_class_weighted(g, r, weights)?, bound)?.verify())
}
