//! Finitely generated abelian groups, the Künneth formula for pairs, and the
//! local homology computation showing `S^{2gr−1}/S_r` is not a manifold once
//! `g ≥ 2` and `r ≥ 2`.

use std::collections::BTreeMap;
use std::fmt;

use num_integer::Integer;
use serde::{Deserialize, Serialize};

use crate::error::{PwError, Result};
use crate::graded::Permutation;

/// `Z^free_rank ⊕ Z/d_1 ⊕ … ⊕ Z/d_m` with `d_1 | d_2 | … | d_m`, each `d_i ≥ 2`.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash)]
pub struct FGAbGroup {
    free_rank: u32,
    torsion: Vec<u64>,
}

fn prime_powers(mut n: u64) -> Vec<(u64, u64)> {
    let mut out = Vec::new();
    let mut p = 2;
    while p * p <= n {
        if n.is_multiple_of(p) {
            let mut q = 1;
            while n.is_multiple_of(p) {
                n /= p;
                q *= p;
            }
            out.push((p, q));
        }
        p += 1;
    }
    if n > 1 {
        out.push((n, n));
    }
    out
}

impl FGAbGroup {
    pub fn zero() -> Self {
        FGAbGroup::default()
    }

    pub fn free(rank: u32) -> Self {
        FGAbGroup { free_rank: rank, torsion: Vec::new() }
    }

    pub fn cyclic(n: u64) -> Self {
        Self::new(0, vec![n])
    }

    /// Canonical form of `Z^free_rank ⊕ ⊕ Z/c_i` for arbitrary cyclic orders
    /// (orders 1 are dropped; order 0 means a copy of `Z`).
    pub fn new(free_rank: u32, cyclic_orders: Vec<u64>) -> Self {
        let mut free_rank = free_rank;
        let mut by_prime: BTreeMap<u64, Vec<u64>> = BTreeMap::new();
        for c in cyclic_orders {
            match c {
                0 => free_rank += 1,
                1 => {}
                _ => {
                    for (p, q) in prime_powers(c) {
                        by_prime.entry(p).or_default().push(q);
                    }
                }
            }
        }
        // largest invariant factor takes the largest power of every prime, and so on
        let len = by_prime.values().map(Vec::len).max().unwrap_or(0);
        let mut factors = vec![1u64; len];
        for powers in by_prime.values_mut() {
            powers.sort_unstable_by(|a, b| b.cmp(a));
            for (i, q) in powers.iter().enumerate() {
                factors[len - 1 - i] *= q;
            }
        }
        FGAbGroup { free_rank, torsion: factors }
    }

    pub fn free_rank(&self) -> u32 {
        self.free_rank
    }

    pub fn torsion(&self) -> &[u64] {
        &self.torsion
    }

    pub fn is_zero(&self) -> bool {
        self.free_rank == 0 && self.torsion.is_empty()
    }

    pub fn is_canonical(&self) -> bool {
        self.torsion.iter().all(|&d| d >= 2) && self.torsion.windows(2).all(|w| w[1] % w[0] == 0)
    }

    pub fn direct_sum(&self, other: &FGAbGroup) -> FGAbGroup {
        let mut orders = self.torsion.clone();
        orders.extend_from_slice(&other.torsion);
        FGAbGroup::new(self.free_rank + other.free_rank, orders)
    }

    /// Rank of `self ⊗ Q`.
    pub fn rational_rank(&self) -> u32 {
        self.free_rank
    }
}

impl fmt::Display for FGAbGroup {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return f.write_str("0");
        }
        let mut parts = Vec::new();
        match self.free_rank {
            0 => {}
            1 => parts.push("Z".to_string()),
            n => parts.push(format!("Z^{n}")),
        }
        parts.extend(self.torsion.iter().map(|d| format!("Z/{d}")));
        f.write_str(&parts.join(" ⊕ "))
    }
}

/// `A ⊗ B`: `Z⊗Z = Z`, `Z⊗Z/n = Z/n`, `Z/m⊗Z/n = Z/gcd(m,n)`, extended bilinearly.
pub fn tensor(a: &FGAbGroup, b: &FGAbGroup) -> FGAbGroup {
    let mut orders = Vec::new();
    for _ in 0..a.free_rank {
        orders.extend_from_slice(&b.torsion);
    }
    for _ in 0..b.free_rank {
        orders.extend_from_slice(&a.torsion);
    }
    for &m in &a.torsion {
        for &n in &b.torsion {
            orders.push(m.gcd(&n));
        }
    }
    FGAbGroup::new(a.free_rank * b.free_rank, orders)
}

/// `Tor(A, B)`: only torsion pairs contribute, `Tor(Z/m, Z/n) = Z/gcd(m,n)`.
pub fn tor(a: &FGAbGroup, b: &FGAbGroup) -> FGAbGroup {
    let orders = a.torsion.iter().flat_map(|&m| b.torsion.iter().map(move |&n| m.gcd(&n))).collect();
    FGAbGroup::new(0, orders)
}

/// Relative homology groups `H_i(X, X − {p})` indexed by degree.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct PairHomologyTable {
    groups: BTreeMap<u32, FGAbGroup>,
    top_degree: u32,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct GroupJson {
    pub i: u32,
    pub rank: u32,
    pub torsion: Vec<u64>,
}

impl PairHomologyTable {
    pub fn new(top_degree: u32) -> Self {
        PairHomologyTable { groups: BTreeMap::new(), top_degree }
    }

    pub fn set(&mut self, i: u32, group: FGAbGroup) {
        assert!(i <= self.top_degree, "degree {i} above top degree {}", self.top_degree);
        if group.is_zero() {
            self.groups.remove(&i);
        } else {
            self.groups.insert(i, group);
        }
    }

    pub fn get(&self, i: u32) -> FGAbGroup {
        self.groups.get(&i).cloned().unwrap_or_default()
    }

    pub fn top_degree(&self) -> u32 {
        self.top_degree
    }

    /// Nonzero groups in degree order.
    pub fn nonzero(&self) -> impl Iterator<Item = (u32, &FGAbGroup)> {
        self.groups.iter().map(|(&i, g)| (i, g))
    }

    pub fn is_zero(&self) -> bool {
        self.groups.is_empty()
    }

    /// Same groups in every degree.
    pub fn same_groups(&self, other: &PairHomologyTable) -> bool {
        self.groups == other.groups
    }

    /// First degree where the groups differ.
    pub fn first_difference(&self, other: &PairHomologyTable) -> Option<u32> {
        let top = self.top_degree.max(other.top_degree);
        (0..=top).find(|&i| self.get(i) != other.get(i))
    }

    pub fn to_json(&self) -> serde_json::Value {
        let v: Vec<GroupJson> = (0..=self.top_degree)
            .map(|i| {
                let g = self.get(i);
                GroupJson { i, rank: g.free_rank, torsion: g.torsion.clone() }
            })
            .collect();
        serde_json::to_value(v).expect("table serializes")
    }

    /// One `i: group` line per degree.
    pub fn to_text(&self) -> String {
        (0..=self.top_degree).map(|i| format!("{i}: {}\n", self.get(i))).collect()
    }
}

/// `H_s(B^k, B^k − {0}) ≅ H̃_{s−1}(S^{k−1})`: `Z` in degree `k`, zero elsewhere.
pub fn ball_pair(k: u32) -> PairHomologyTable {
    let mut t = PairHomologyTable::new(k);
    t.set(k, FGAbGroup::free(1));
    t
}

/// `H_t(C(RP^m), C(RP^m) − {tip}) ≅ H̃_{t−1}(RP^m)` for odd `m`:
/// `Z` at `t = m + 1`, `Z/2` at even `t` with `1 < t < m + 1`.
pub fn cone_rp_pair(m: u32) -> Result<PairHomologyTable> {
    if m.is_multiple_of(2) {
        return Err(PwError::Unsupported(format!("cone over RP^{m} with m even")));
    }
    let mut t = PairHomologyTable::new(m + 1);
    for s in 0..=m + 1 {
        // H̃_{s-1}(RP^m): Z/2 in odd degrees below m, Z in degree m (m odd)
        let d = s as i64 - 1;
        if d == m as i64 {
            t.set(s, FGAbGroup::free(1));
        } else if d >= 1 && d < m as i64 && d % 2 == 1 {
            t.set(s, FGAbGroup::cyclic(2));
        }
    }
    Ok(t)
}

/// Künneth formula for pairs:
/// `H_i = ⊕_{s+t=i} A_s ⊗ B_t ⊕ ⊕_{s+t=i−1} Tor(A_s, B_t)`.
pub fn kunneth_pairs(a: &PairHomologyTable, b: &PairHomologyTable) -> PairHomologyTable {
    let top = a.top_degree + b.top_degree + 1;
    let mut acc: BTreeMap<u32, FGAbGroup> = BTreeMap::new();
    for (s, x) in a.nonzero() {
        for (t, y) in b.nonzero() {
            let e = acc.entry(s + t).or_default();
            *e = e.direct_sum(&tensor(x, y));
            let e = acc.entry(s + t + 1).or_default();
            *e = e.direct_sum(&tor(x, y));
        }
    }
    let mut out = PairHomologyTable::new(top);
    for (i, g) in acc {
        out.set(i, g);
    }
    // trim the slot reserved for a Tor term if it stayed empty
    if out.get(top).is_zero() && top > 0 {
        out.top_degree = top - 1;
    }
    out
}

/// Closed form of the local homology at a `Z/2`-stabilizer point: `Z` at `N`,
/// `Z/2` at odd `i` with `k + 1 < i < N`.
/// For `r = 1` there are no such points and this is the ball pair.
pub fn remark_closed_form(g: u32, r: u32) -> PairHomologyTable {
    let n = 2 * g * r - 1;
    let Some(k) = n.checked_sub(2 * g) else {
        return ball_pair(n);
    };
    let mut t = PairHomologyTable::new(n);
    t.set(n, FGAbGroup::free(1));
    for i in (k + 2)..n {
        if i % 2 == 1 {
            t.set(i, FGAbGroup::cyclic(2));
        }
    }
    t
}

#[derive(Clone, Debug, Serialize)]
pub struct ManifoldReport {
    pub claim: &'static str,
    pub g: u32,
    pub r: u32,
    /// `N = 2gr − 1`.
    pub n: u32,
    /// `k = N − 2g`.
    pub k: Option<u32>,
    pub vacuous: bool,
    pub local_homology: serde_json::Value,
    pub manifold_model: serde_json::Value,
    pub is_obstructed: bool,
    /// Degrees where the local homology differs from the manifold model.
    pub witnesses: Vec<(u32, String)>,
    pub matches_closed_form: bool,
    /// `is_obstructed == (g ≥ 2 && r ≥ 2)`.
    pub pass: bool,
}

/// Compare a computed local homology table with the manifold model `H_*(B^N, B^N − 0)`.
pub fn check_manifold(g: u32, r: u32, local: &PairHomologyTable) -> ManifoldReport {
    let n = 2 * g * r - 1;
    let model = ball_pair(n);
    let witnesses: Vec<(u32, String)> = (0..=n.max(local.top_degree()))
        .filter(|&i| local.get(i) != model.get(i))
        .map(|i| (i, local.get(i).to_string()))
        .collect();
    let is_obstructed = !witnesses.is_empty();
    let matches_closed_form = local.same_groups(&remark_closed_form(g, r));
    ManifoldReport {
        claim: "Remark: S^(2gr-1)/S_r is not a topological manifold when g >= 2 and r >= 2",
        g,
        r,
        n,
        k: n.checked_sub(2 * g),
        vacuous: false,
        local_homology: local.to_json(),
        manifold_model: model.to_json(),
        is_obstructed,
        witnesses,
        matches_closed_form,
        pass: is_obstructed == (g >= 2 && r >= 2) && matches_closed_form,
    }
}

/// Local homology table at a point with stabilizer `Z/2`, as a Künneth product.
pub fn local_homology(g: u32, r: u32) -> Result<PairHomologyTable> {
    if g == 0 || r < 2 {
        return Err(PwError::Usage(format!("a Z/2-stabilizer point needs g >= 1 and r >= 2 (got g={g}, r={r})")));
    }
    let n = 2 * g * r - 1;
    let k = n - 2 * g;
    Ok(kunneth_pairs(&ball_pair(k), &cone_rp_pair(n - k - 1)?))
}

pub fn manifold_obstruction(g: u32, r: u32) -> Result<ManifoldReport> {
    if g == 0 || r == 0 {
        return Err(PwError::Usage(format!("g and r must be positive (got g={g}, r={r})")));
    }
    if r == 1 {
        let n = 2 * g - 1;
        let model = ball_pair(n);
        return Ok(ManifoldReport {
            claim: "Remark: S^(2gr-1)/S_r is not a topological manifold when g >= 2 and r >= 2",
            g,
            r,
            n,
            k: None,
            vacuous: true,
            local_homology: model.to_json(),
            manifold_model: model.to_json(),
            is_obstructed: false,
            witnesses: Vec::new(),
            matches_closed_form: true,
            pass: true,
        });
    }
    Ok(check_manifold(g, r, &local_homology(g, r)?))
}

#[derive(Clone, Debug, Serialize)]
pub struct RationalSphereReport {
    pub claim: &'static str,
    pub g: u32,
    pub r: u32,
    pub n: u32,
    /// Rational Betti numbers of the quotient, `(degree, dimension)` for nonzero ones.
    pub betti: Vec<(u32, u32)>,
    /// `det` of every permutation acting on `R^{2gr}` equals one.
    pub determinant_one: bool,
    pub pass: bool,
}

/// Determinant of `σ` acting on `(R^{2g})^r` by permuting blocks: the sign of
/// the induced permutation of the `2gr` coordinates.
fn block_permutation_det(sigma: &Permutation, block: usize) -> i32 {
    let r = sigma.len();
    let coords: Vec<usize> = (0..r * block).map(|c| sigma.images()[c / block] * block + c % block).collect();
    let p = Permutation::new(coords).expect("block permutation");
    let even = p.cycle_lengths().iter().filter(|&&l| l % 2 == 0).count() % 2 == 0;
    if even {
        1
    } else {
        -1
    }
}

/// Rational homology of `S^{2gr−1}/S_r` as `S_r`-invariants of `H_*(S^{2gr−1}; Q)`:
/// `H_0` carries the trivial action and `H_{2gr−1}` the determinant character.
pub fn rational_sphere_check(g: u32, r: u32) -> Result<RationalSphereReport> {
    if g == 0 || r == 0 {
        return Err(PwError::Usage(format!("g and r must be positive (got g={g}, r={r})")));
    }
    let n = 2 * g * r - 1;
    let dets: Vec<i32> = Permutation::all(r as usize).map(|s| block_permutation_det(&s, 2 * g as usize)).collect();
    let order = dets.len() as i64;
    // invariant dimension = average of the character
    let top_char: i64 = dets.iter().map(|&d| d as i64).sum();
    let mut betti = vec![(0, 1)];
    if top_char % order != 0 {
        return Err(PwError::Domain("character average is not an integer".into()));
    }
    let top = (top_char / order) as u32;
    if top > 0 {
        betti.push((n, top));
    }
    Ok(check_rational_sphere(g, r, betti, dets.iter().all(|&d| d == 1)))
}

/// Judge already-computed Betti numbers of the quotient.
pub fn check_rational_sphere(g: u32, r: u32, betti: Vec<(u32, u32)>, determinant_one: bool) -> RationalSphereReport {
    let n = 2 * g * r - 1;
    let pass = determinant_one && betti == vec![(0, 1), (n, 1)];
    RationalSphereReport {
        claim: "Remark: S^(2gr-1)/S_r has the rational homology of a sphere (S_r acts with determinant one)",
        g,
        r,
        n,
        betti,
        determinant_one,
        pass,
    }
}
