//! Bigraded dimension tables of the perverse filtration (Dolbeault side) and the
//! weight filtration (Betti side), and the comparison behind P=W.
//!
//! The two sides are built from their own rank-one seeds: on `X̂` the perverse
//! filtration is trivial, so a degree-`i` class sits in perversity `i`; on the
//! torus `(C*)^{2g}` a degree-`i` class has weight `2i`. Symmetric powers then
//! add levels factorwise over the `S_r`-invariant basis. A third table comes from
//! the graded-symmetric-power generating function, sharing no code with the
//! orbit enumeration.

use std::collections::BTreeMap;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{PwError, Result, WordBound};
use crate::graded::{burnside_dimension, invariant_representatives, ExteriorMonomial};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Side {
    Dolbeault,
    Betti,
    /// Generating-function fast path; indexed like the Betti side.
    ClosedForm,
}

impl fmt::Display for Side {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Side::Dolbeault => "dolbeault",
            Side::Betti => "betti",
            Side::ClosedForm => "closed_form",
        })
    }
}

/// Dimensions `d[k][j]` of graded pieces: level `k` (perversity, or half-weight
/// with weight `2k`) in cohomological degree `j`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BigradedTable {
    pub g: u32,
    pub r: u32,
    pub side: Side,
    dims: BTreeMap<(u32, u32), u64>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TableEntry {
    pub k: u32,
    pub j: u32,
    pub dim: u64,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
struct TableJson {
    g: u32,
    r: u32,
    side: Side,
    entries: Vec<TableEntry>,
}

impl BigradedTable {
    pub fn new(g: u32, r: u32, side: Side) -> Self {
        BigradedTable { g, r, side, dims: BTreeMap::new() }
    }

    pub fn from_entries(g: u32, r: u32, side: Side, entries: impl IntoIterator<Item = TableEntry>) -> Self {
        let mut t = Self::new(g, r, side);
        for e in entries {
            t.add(e.k, e.j, e.dim);
        }
        t
    }

    pub fn add(&mut self, k: u32, j: u32, n: u64) {
        if n == 0 {
            return;
        }
        *self.dims.entry((k, j)).or_insert(0) += n;
    }

    /// Overwrite one entry (zero removes it).
    pub fn set(&mut self, k: u32, j: u32, n: u64) {
        if n == 0 {
            self.dims.remove(&(k, j));
        } else {
            self.dims.insert((k, j), n);
        }
    }

    pub fn get(&self, k: u32, j: u32) -> u64 {
        self.dims.get(&(k, j)).copied().unwrap_or(0)
    }

    /// Nonzero entries in `(k, j)` order.
    pub fn entries(&self) -> Vec<TableEntry> {
        self.dims.iter().map(|(&(k, j), &dim)| TableEntry { k, j, dim }).collect()
    }

    pub fn total(&self) -> u64 {
        self.dims.values().sum()
    }

    pub fn top_degree(&self) -> u32 {
        2 * self.g * self.r
    }

    /// `dim H^j`.
    pub fn betti_number(&self, j: u32) -> u64 {
        self.dims.iter().filter(|((_, jj), _)| *jj == j).map(|(_, n)| n).sum()
    }

    /// `[dim H^0, …, dim H^{2gr}]`.
    pub fn betti_numbers(&self) -> Vec<u64> {
        (0..=self.top_degree()).map(|j| self.betti_number(j)).collect()
    }

    /// `[d[0][0], d[1][1], …]`.
    pub fn diagonal(&self) -> Vec<u64> {
        (0..=self.top_degree()).map(|j| self.get(j, j)).collect()
    }

    /// Entries off the diagonal `k = j`.
    pub fn off_diagonal(&self) -> Vec<TableEntry> {
        self.entries().into_iter().filter(|e| e.k != e.j).collect()
    }

    /// `dim F_k H^j = Σ_{k' ≤ k} d[k'][j]`.
    pub fn filtered_dim(&self, k: u32, j: u32) -> u64 {
        self.dims.iter().filter(|((kk, jj), _)| *kk <= k && *jj == j).map(|(_, n)| n).sum()
    }

    /// Same cells, ignoring which side produced them.
    pub fn same_entries(&self, other: &BigradedTable) -> bool {
        self.g == other.g && self.r == other.r && self.dims == other.dims
    }

    /// First `(k, j, self, other)` where the tables disagree.
    pub fn first_mismatch(&self, other: &BigradedTable) -> Option<(u32, u32, u64, u64)> {
        let mut keys: Vec<_> = self.dims.keys().chain(other.dims.keys()).copied().collect();
        keys.sort();
        keys.dedup();
        keys.into_iter().map(|(k, j)| (k, j, self.get(k, j), other.get(k, j))).find(|(_, _, a, b)| a != b)
    }

    pub fn to_json(&self) -> serde_json::Value {
        serde_json::to_value(TableJson { g: self.g, r: self.r, side: self.side, entries: self.entries() })
            .expect("table serializes")
    }

    pub fn from_json(v: &serde_json::Value) -> Result<Self> {
        let t: TableJson =
            serde_json::from_value(v.clone()).map_err(|e| PwError::Usage(format!("bad table JSON: {e}")))?;
        Ok(Self::from_entries(t.g, t.r, t.side, t.entries))
    }

    /// Aligned text grid, rows `k`, columns `j`.
    pub fn to_text(&self) -> String {
        let top = self.top_degree();
        let width =
            self.dims.values().map(|n| n.to_string().len()).max().unwrap_or(1).max(top.to_string().len()).max(2);
        let label = match self.side {
            Side::Dolbeault => "perversity k",
            Side::Betti | Side::ClosedForm => "half-weight k",
        };
        let mut s = format!("{} table, g={}, r={} ({} rows, degree j columns)\n", self.side, self.g, self.r, label);
        s.push_str(&format!("{:>4} |", "k\\j"));
        for j in 0..=top {
            s.push_str(&format!(" {j:>width$}"));
        }
        s.push('\n');
        s.push_str(&format!("{}\n", "-".repeat(6 + (top as usize + 1) * (width + 1))));
        for k in 0..=top {
            s.push_str(&format!("{k:>4} |"));
            for j in 0..=top {
                let n = self.get(k, j);
                if n == 0 {
                    s.push_str(&format!(" {:>width$}", "."));
                } else {
                    s.push_str(&format!(" {n:>width$}"));
                }
            }
            s.push('\n');
        }
        s
    }
}

/// Level of a rank-one class on the Dolbeault side: the perverse filtration of
/// `pr_2: X̂ × C^g → C^g` has `P_k H^i = 0` for `k < i` and `P_k H^i = H^i` for
/// `k ≥ i`, so `H^i` lives in `Gr^P_i`.
fn rank_one_perversity(m: ExteriorMonomial) -> u32 {
    let i = m.degree();
    // smallest k with P_k H^i = H^i
    (0..).find(|&k| rank_one_p_is_full(k, i)).expect("filtration exhausts H^i")
}

fn rank_one_p_is_full(k: u32, i: u32) -> bool {
    k >= i
}

/// Half-weight of a torus class: `W_{2k} H^*(T) = ⊕_{i ≤ k} Λ^i`, so a degree-`i`
/// class first appears in `W_{2i}` and `Gr^W_{2i}` is concentrated in degree `i`.
fn torus_half_weight(m: ExteriorMonomial) -> u32 {
    m.degree()
}

fn table_from_levels(
    g: u32,
    r: u32,
    side: Side,
    bound: WordBound,
    level: impl Fn(ExteriorMonomial) -> u32,
) -> Result<BigradedTable> {
    let mut t = BigradedTable::new(g, r, side);
    for rep in invariant_representatives(g, r, bound)? {
        let j: u32 = rep.iter().map(|m| m.degree()).sum();
        let k: u32 = rep.iter().map(|&m| level(m)).sum();
        t.add(k, j, 1);
    }
    Ok(t)
}

/// `Gr^P_k H^j` of the Dolbeault moduli space via the additive span formula
/// over the invariant basis.
pub fn perverse_table(g: u32, r: u32, bound: WordBound) -> Result<BigradedTable> {
    table_from_levels(g, r, Side::Dolbeault, bound, rank_one_perversity)
}

/// `Gr^W_{2k} H^j` of the Betti moduli space `Sym^r (C*)^{2g}`: invariants of the
/// tensor power of torus cohomology with weights added factorwise.
pub fn weight_table(g: u32, r: u32, bound: WordBound) -> Result<BigradedTable> {
    table_from_levels(g, r, Side::Betti, bound, torus_half_weight)
}

fn binomial(n: u64, k: u64) -> u128 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    let mut acc: u128 = 1;
    for i in 0..k {
        acc = acc * (n - i) as u128 / (i + 1) as u128;
    }
    acc
}

/// Coefficient of `x^r` in `Π_{j odd}(1 + x q^j t^j)^{C(2g,j)} · Π_{j even}(1 − x q^j t^j)^{−C(2g,j)}`.
pub fn closed_form_table(g: u32, r: u32) -> Result<BigradedTable> {
    if g == 0 || r == 0 {
        return Err(PwError::Usage(format!("g and r must be positive (got g={g}, r={r})")));
    }
    let r = r as usize;
    // series[n] : (k, j) -> coefficient of x^n q^k t^j
    let mut series: Vec<BTreeMap<(u32, u32), u128>> = vec![BTreeMap::new(); r + 1];
    series[0].insert((0, 0), 1);
    for j in 0..=2 * g {
        let mult = binomial(2 * g as u64, j as u64) as u64;
        // factor expansion in x: Σ_n c_n x^n (q t)^{j n}
        let factor: Vec<u128> =
            (0..=r as u64).map(|n| if j % 2 == 1 { binomial(mult, n) } else { binomial(mult + n - 1, n) }).collect();
        let mut next: Vec<BTreeMap<(u32, u32), u128>> = vec![BTreeMap::new(); r + 1];
        for (a, terms) in series.iter().enumerate() {
            for (n, &c) in factor.iter().enumerate().take(r + 1 - a) {
                if c == 0 {
                    continue;
                }
                let shift = j * n as u32;
                for (&(k, jj), &v) in terms {
                    *next[a + n].entry((k + shift, jj + shift)).or_insert(0) += v * c;
                }
            }
        }
        series = next;
    }
    let mut t = BigradedTable::new(g, r as u32, Side::ClosedForm);
    for (&(k, j), &v) in &series[r] {
        t.add(k, j, u64::try_from(v).expect("dimension fits in u64"));
    }
    Ok(t)
}

/// Outcome of comparing the Dolbeault and Betti tables.
#[derive(Clone, Debug, Serialize)]
pub struct PEqualsWReport {
    pub claim: &'static str,
    pub g: u32,
    pub r: u32,
    pub pass: bool,
    /// Every entry of every table sits at even weight `2k`, so `W_{2k} = W_{2k+1}`.
    pub odd_weights_empty: bool,
    pub closed_form_agrees: bool,
    pub perverse: serde_json::Value,
    pub weight: serde_json::Value,
    pub first_mismatch: Option<Mismatch>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Mismatch {
    pub k: u32,
    pub j: u32,
    pub left_side: Side,
    pub left: u64,
    pub right_side: Side,
    pub right: u64,
}

/// Compare already-computed tables.
pub fn check_p_equals_w(perverse: &BigradedTable, weight: &BigradedTable, closed: &BigradedTable) -> PEqualsWReport {
    let mismatch = |a: &BigradedTable, b: &BigradedTable| {
        a.first_mismatch(b).map(|(k, j, x, y)| Mismatch {
            k,
            j,
            left_side: a.side,
            left: x,
            right_side: b.side,
            right: y,
        })
    };
    let pw = mismatch(perverse, weight);
    let wc = mismatch(weight, closed);
    let odd_weights_empty = odd_weights_add_nothing(weight);
    PEqualsWReport {
        claim: "Theorem A (P=W for abelian varieties): P_k H^* = W_{2k} H^* = W_{2k+1} H^*",
        g: perverse.g,
        r: perverse.r,
        pass: pw.is_none() && wc.is_none() && odd_weights_empty,
        odd_weights_empty,
        closed_form_agrees: wc.is_none(),
        perverse: perverse.to_json(),
        weight: weight.to_json(),
        first_mismatch: pw.or(wc),
    }
}

/// `W_{2k} H^j = W_{2k+1} H^j` for every `k, j`, reading `W_w` as the sum of the
/// graded pieces of weight at most `w`.
fn odd_weights_add_nothing(weight: &BigradedTable) -> bool {
    let top = weight.top_degree();
    let w_dim =
        |w: u32, j: u32| -> u64 { weight.entries().iter().filter(|e| 2 * e.k <= w && e.j == j).map(|e| e.dim).sum() };
    (0..=top).all(|k| (0..=top).all(|j| w_dim(2 * k, j) == w_dim(2 * k + 1, j)))
}

pub fn verify_p_equals_w(g: u32, r: u32, bound: WordBound) -> Result<PEqualsWReport> {
    let p = perverse_table(g, r, bound)?;
    let w = weight_table(g, r, bound)?;
    let c = closed_form_table(g, r)?;
    Ok(check_p_equals_w(&p, &w, &c))
}

/// Structural properties every table must have; returns a description of the
/// first violation.
pub fn table_sanity(t: &BigradedTable) -> Option<String> {
    if let Some(e) = t.off_diagonal().first() {
        return Some(format!("entry off the diagonal at (k={}, j={})", e.k, e.j));
    }
    let top = t.top_degree();
    for j in 0..=top {
        if t.betti_number(j) != t.betti_number(top - j) {
            return Some(format!("Poincaré duality fails: dim H^{j} != dim H^{}", top - j));
        }
    }
    let mass = burnside_dimension(t.g, t.r);
    if t.total() as u128 != mass {
        return Some(format!("total dimension {} differs from the Burnside count {mass}", t.total()));
    }
    None
}
