//! Exterior algebra `Λ(Q^{2g})`, its `r`-fold graded tensor powers, the signed
//! action of the symmetric group and the basis of invariants.
//!
//! The invariants of `Λ(Q^{2g})^{⊗r}` under the Koszul-signed `S_r` action are
//! the rational cohomology of the `r`-th symmetric product of a `2g`-torus,
//! which models both the Dolbeault and the Betti moduli space here.

use std::cmp::Ordering;
use std::collections::{BTreeMap, HashMap};
use std::fmt;

use itertools::Itertools;
use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use crate::error::{PwError, Result, WordBound};

/// Exact rational scalar.
pub type Rational = BigRational;

/// Largest supported number of exterior generators.
pub const MAX_AMBIENT: u32 = 32;

/// A basis monomial `e_S = e_{s_1} ∧ … ∧ e_{s_d}` of `Λ(Q^{n})` with `s_1 < … < s_d`.
///
/// Generators are numbered `1..=n`; bit `i - 1` of the mask encodes `e_i`.
#[derive(Clone, Copy, PartialEq, Eq, Hash)]
pub struct ExteriorMonomial {
    ambient: u8,
    bits: u32,
}

impl ExteriorMonomial {
    pub fn new(ambient: u32, indices: &[u32]) -> Result<Self> {
        check_ambient(ambient)?;
        let mut bits = 0u32;
        for &i in indices {
            if i == 0 || i > ambient {
                return Err(PwError::Usage(format!("generator e{i} outside 1..={ambient}")));
            }
            let b = 1u32 << (i - 1);
            if bits & b != 0 {
                return Err(PwError::Usage(format!("generator e{i} repeated in a monomial")));
            }
            bits |= b;
        }
        Ok(ExteriorMonomial { ambient: ambient as u8, bits })
    }

    pub fn from_bits(ambient: u32, bits: u32) -> Result<Self> {
        check_ambient(ambient)?;
        if ambient < 32 && bits >> ambient != 0 {
            return Err(PwError::Usage(format!("mask {bits:#x} has generators outside 1..={ambient}")));
        }
        Ok(ExteriorMonomial { ambient: ambient as u8, bits })
    }

    pub fn unit(ambient: u32) -> Self {
        ExteriorMonomial { ambient: ambient as u8, bits: 0 }
    }

    pub fn ambient(self) -> u32 {
        self.ambient as u32
    }

    pub fn bits(self) -> u32 {
        self.bits
    }

    pub fn degree(self) -> u32 {
        self.bits.count_ones()
    }

    pub fn is_odd(self) -> bool {
        self.degree() % 2 == 1
    }

    /// Sorted 1-based generator indices.
    pub fn indices(self) -> Vec<u32> {
        (0..32).filter(|i| self.bits >> i & 1 == 1).map(|i| i + 1).collect()
    }

    /// `self ∧ other` as `(sign, monomial)`, or `None` when a generator repeats.
    pub fn wedge_signed(self, other: Self) -> Option<(i32, Self)> {
        debug_assert_eq!(self.ambient, other.ambient);
        if self.bits & other.bits != 0 {
            return None;
        }
        // pairs (s, t) with s in self, t in other and s > t
        let mut inversions = 0u32;
        let mut rest = other.bits;
        while rest != 0 {
            let t = rest.trailing_zeros();
            rest &= rest - 1;
            let above = if t >= 31 { 0 } else { self.bits >> (t + 1) };
            inversions += above.count_ones();
        }
        let sign = if inversions.is_multiple_of(2) { 1 } else { -1 };
        Some((sign, ExteriorMonomial { ambient: self.ambient, bits: self.bits | other.bits }))
    }
}

fn check_ambient(ambient: u32) -> Result<()> {
    if ambient > MAX_AMBIENT {
        return Err(PwError::Usage(format!("at most {MAX_AMBIENT} exterior generators supported (got {ambient})")));
    }
    Ok(())
}

impl Ord for ExteriorMonomial {
    /// Ambient dimension, then degree, then lexicographic order of the sorted index sets.
    fn cmp(&self, other: &Self) -> Ordering {
        self.ambient.cmp(&other.ambient).then(self.degree().cmp(&other.degree())).then_with(|| {
            let diff = self.bits ^ other.bits;
            if diff == 0 {
                Ordering::Equal
            } else if self.bits >> diff.trailing_zeros() & 1 == 1 {
                Ordering::Less
            } else {
                Ordering::Greater
            }
        })
    }
}

impl PartialOrd for ExteriorMonomial {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Debug for ExteriorMonomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

impl fmt::Display for ExteriorMonomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.bits == 0 {
            return write!(f, "1");
        }
        write!(f, "e{{{}}}", self.indices().iter().join(","))
    }
}

/// All monomials of `Λ(Q^{ambient})` in the canonical order.
pub fn all_monomials(ambient: u32) -> Result<Vec<ExteriorMonomial>> {
    check_ambient(ambient)?;
    if ambient > 24 {
        return Err(PwError::ResourceGuard { width: ambient, bound: 24 });
    }
    let mut out: Vec<_> = (0..1u32 << ambient).map(|bits| ExteriorMonomial { ambient: ambient as u8, bits }).collect();
    out.sort();
    Ok(out)
}

/// Exact-rational linear combination of exterior monomials.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct GradedClass {
    ambient: u32,
    terms: BTreeMap<ExteriorMonomial, Rational>,
}

impl GradedClass {
    pub fn zero(ambient: u32) -> Self {
        GradedClass { ambient, terms: BTreeMap::new() }
    }

    pub fn monomial(m: ExteriorMonomial) -> Self {
        Self::term(m, Rational::one())
    }

    pub fn term(m: ExteriorMonomial, c: Rational) -> Self {
        let mut out = Self::zero(m.ambient());
        out.add_term(m, c);
        out
    }

    pub fn ambient(&self) -> u32 {
        self.ambient
    }

    pub fn add_term(&mut self, m: ExteriorMonomial, c: Rational) {
        debug_assert_eq!(m.ambient(), self.ambient);
        add_into(&mut self.terms, m, c);
    }

    pub fn terms(&self) -> impl Iterator<Item = (&ExteriorMonomial, &Rational)> {
        self.terms.iter()
    }

    pub fn coefficient(&self, m: &ExteriorMonomial) -> Rational {
        self.terms.get(m).cloned().unwrap_or_else(Rational::zero)
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    /// Degree-`d` homogeneous component.
    pub fn component(&self, degree: u32) -> GradedClass {
        GradedClass {
            ambient: self.ambient,
            terms: self.terms.iter().filter(|(m, _)| m.degree() == degree).map(|(m, c)| (*m, c.clone())).collect(),
        }
    }

    pub fn add(&self, other: &GradedClass) -> Result<GradedClass> {
        if self.ambient != other.ambient {
            return Err(mismatch(self.ambient, other.ambient));
        }
        let mut out = self.clone();
        for (m, c) in &other.terms {
            add_into(&mut out.terms, *m, c.clone());
        }
        Ok(out)
    }

    pub fn scale(&self, c: &Rational) -> GradedClass {
        let mut out = GradedClass::zero(self.ambient);
        for (m, x) in &self.terms {
            add_into(&mut out.terms, *m, x * c);
        }
        out
    }

    pub fn wedge(&self, other: &GradedClass) -> Result<GradedClass> {
        if self.ambient != other.ambient {
            return Err(mismatch(self.ambient, other.ambient));
        }
        let mut out = GradedClass::zero(self.ambient);
        for (a, x) in &self.terms {
            for (b, y) in &other.terms {
                if let Some((s, m)) = a.wedge_signed(*b) {
                    add_into(&mut out.terms, m, signed(x * y, s));
                }
            }
        }
        Ok(out)
    }
}

fn mismatch(a: u32, b: u32) -> PwError {
    PwError::Usage(format!("mismatched ambient dimensions {a} and {b}"))
}

fn signed(c: Rational, sign: i32) -> Rational {
    if sign < 0 {
        -c
    } else {
        c
    }
}

fn add_into<K: Ord>(map: &mut BTreeMap<K, Rational>, k: K, c: Rational) {
    if c.is_zero() {
        return;
    }
    match map.entry(k) {
        std::collections::btree_map::Entry::Vacant(e) => {
            e.insert(c);
        }
        std::collections::btree_map::Entry::Occupied(mut e) => {
            *e.get_mut() += c;
            if e.get().is_zero() {
                e.remove();
            }
        }
    }
}

/// Exterior product of two basis monomials.
pub fn wedge(a: ExteriorMonomial, b: ExteriorMonomial) -> Result<GradedClass> {
    if a.ambient != b.ambient {
        return Err(mismatch(a.ambient(), b.ambient()));
    }
    Ok(match a.wedge_signed(b) {
        Some((s, m)) => GradedClass::term(m, Rational::from_integer(BigInt::from(s))),
        None => GradedClass::zero(a.ambient()),
    })
}

/// A permutation of `{0, …, r-1}` acting on tensor words by moving the factor in
/// slot `i` to slot `images[i]`.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct Permutation(Vec<usize>);

impl Permutation {
    pub fn new(images: Vec<usize>) -> Result<Self> {
        let mut seen = vec![false; images.len()];
        for &i in &images {
            if i >= images.len() || seen[i] {
                return Err(PwError::Usage(format!("{images:?} is not a permutation")));
            }
            seen[i] = true;
        }
        Ok(Permutation(images))
    }

    pub fn identity(r: usize) -> Self {
        Permutation((0..r).collect())
    }

    /// Transposition of slots `a` and `b` (0-based).
    pub fn swap(r: usize, a: usize, b: usize) -> Self {
        let mut v: Vec<usize> = (0..r).collect();
        v.swap(a, b);
        Permutation(v)
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn images(&self) -> &[usize] {
        &self.0
    }

    /// `(self ∘ other)(i) = self(other(i))`.
    pub fn compose(&self, other: &Permutation) -> Permutation {
        assert_eq!(self.len(), other.len());
        Permutation(other.0.iter().map(|&i| self.0[i]).collect())
    }

    pub fn inverse(&self) -> Permutation {
        let mut inv = vec![0; self.len()];
        for (i, &s) in self.0.iter().enumerate() {
            inv[s] = i;
        }
        Permutation(inv)
    }

    /// Cycle lengths, in order of smallest element.
    pub fn cycle_lengths(&self) -> Vec<usize> {
        let mut seen = vec![false; self.len()];
        let mut out = Vec::new();
        for start in 0..self.len() {
            if seen[start] {
                continue;
            }
            let mut len = 0;
            let mut i = start;
            while !seen[i] {
                seen[i] = true;
                i = self.0[i];
                len += 1;
            }
            out.push(len);
        }
        out
    }

    /// All `r!` permutations, lexicographically.
    pub fn all(r: usize) -> impl Iterator<Item = Permutation> {
        (0..r).permutations(r).map(Permutation)
    }
}

/// Koszul sign of moving factors of the given degrees by `sigma`: `(-1)^m` with `m`
/// the number of inverted pairs whose factors both have odd degree.
pub fn koszul_sign(sigma: &Permutation, degrees: &[u32]) -> i32 {
    assert_eq!(sigma.len(), degrees.len());
    let s = sigma.images();
    let mut m = 0u32;
    for i in 0..s.len() {
        if degrees[i].is_multiple_of(2) {
            continue;
        }
        for j in i + 1..s.len() {
            if degrees[j] % 2 == 1 && s[i] > s[j] {
                m += 1;
            }
        }
    }
    if m.is_multiple_of(2) {
        1
    } else {
        -1
    }
}

/// `α_1 ⊗ … ⊗ α_r` with a rational coefficient.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct TensorWord {
    pub factors: Vec<ExteriorMonomial>,
    pub coefficient: Rational,
}

impl TensorWord {
    pub fn new(factors: Vec<ExteriorMonomial>) -> Self {
        TensorWord { factors, coefficient: Rational::one() }
    }

    pub fn degree(&self) -> u32 {
        self.factors.iter().map(|m| m.degree()).sum()
    }

    /// Sum of per-factor perversities; a degree-`i` class of the dual abelian
    /// variety sits in perversity `i`.
    pub fn perversity(&self) -> u32 {
        self.degree()
    }
}

/// Signed action of `sigma` on a tensor word.
pub fn permute_word(sigma: &Permutation, w: &TensorWord) -> TensorWord {
    assert_eq!(sigma.len(), w.factors.len(), "permutation and word have different lengths");
    let degrees: Vec<u32> = w.factors.iter().map(|m| m.degree()).collect();
    let mut factors = w.factors.clone();
    for (i, &target) in sigma.images().iter().enumerate() {
        factors[target] = w.factors[i];
    }
    TensorWord { factors, coefficient: signed(w.coefficient.clone(), koszul_sign(sigma, &degrees)) }
}

/// Orbit sum of a sorted word: every distinct rearrangement with its Koszul sign,
/// normalized so the representative itself has coefficient `+1`.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct InvariantWord {
    pub representative: Vec<ExteriorMonomial>,
    pub orbit_sum: Vec<TensorWord>,
}

impl InvariantWord {
    /// `None` when the representative repeats an odd-degree monomial (its orbit sum vanishes).
    pub fn from_representative(mut representative: Vec<ExteriorMonomial>) -> Option<Self> {
        representative.sort();
        if representative.windows(2).any(|p| p[0] == p[1] && p[0].is_odd()) {
            return None;
        }
        let r = representative.len();
        let rep_word = TensorWord::new(representative.clone());
        let mut orbit_sum = Vec::new();
        // distinct arrangements of the multiset, each reached by the permutation
        // that keeps equal factors in their relative order
        let mut arrangement = representative.clone();
        loop {
            let mut used = vec![false; r];
            let images: Vec<usize> = representative
                .iter()
                .map(|m| {
                    let p = (0..r).find(|&p| !used[p] && arrangement[p] == *m).expect("arrangement is a rearrangement");
                    used[p] = true;
                    p
                })
                .collect();
            orbit_sum.push(permute_word(&Permutation(images), &rep_word));
            if !next_permutation(&mut arrangement) {
                break;
            }
        }
        Some(InvariantWord { representative, orbit_sum })
    }

    pub fn degree(&self) -> u32 {
        self.representative.iter().map(|m| m.degree()).sum()
    }

    pub fn to_class(&self, g: u32) -> TensorClass {
        let mut out = TensorClass::zero(g, self.representative.len() as u32);
        for w in &self.orbit_sum {
            add_into(&mut out.terms, w.factors.clone(), w.coefficient.clone());
        }
        out
    }
}

fn next_permutation<T: Ord>(v: &mut [T]) -> bool {
    if v.len() < 2 {
        return false;
    }
    let mut i = v.len() - 1;
    while i > 0 && v[i - 1] >= v[i] {
        i -= 1;
    }
    if i == 0 {
        return false;
    }
    let mut j = v.len() - 1;
    while v[j] <= v[i - 1] {
        j -= 1;
    }
    v.swap(i - 1, j);
    v[i..].reverse();
    true
}

/// Weakly increasing `r`-tuples of monomials (no repeated odd monomial), optionally
/// restricted to a total degree.
fn representatives(g: u32, r: u32, degree: Option<u32>) -> Result<Vec<Vec<ExteriorMonomial>>> {
    let monomials = all_monomials(2 * g)?;
    let max_deg = 2 * g;
    let mut out = Vec::new();
    let mut current = Vec::with_capacity(r as usize);

    fn rec(
        monomials: &[ExteriorMonomial],
        start: usize,
        left: u32,
        degree_left: Option<u32>,
        max_deg: u32,
        current: &mut Vec<ExteriorMonomial>,
        out: &mut Vec<Vec<ExteriorMonomial>>,
    ) {
        if left == 0 {
            if degree_left.is_none_or(|d| d == 0) {
                out.push(current.clone());
            }
            return;
        }
        if let Some(d) = degree_left {
            if d > left * max_deg {
                return;
            }
        }
        for idx in start..monomials.len() {
            let m = monomials[idx];
            if let Some(d) = degree_left {
                // sorted order has nondecreasing degree, so later ones are no smaller
                if m.degree() * left > d {
                    break;
                }
            }
            if m.is_odd() && current.last() == Some(&m) {
                continue;
            }
            current.push(m);
            rec(monomials, idx, left - 1, degree_left.map(|d| d - m.degree()), max_deg, current, out);
            current.pop();
        }
    }

    rec(&monomials, 0, r, degree, max_deg, &mut current, &mut out);
    Ok(out)
}

/// Basis of `(Λ(Q^{2g})^{⊗r})^{S_r}`, optionally restricted to one total degree.
pub fn invariant_basis(g: u32, r: u32, degree_filter: Option<u32>, bound: WordBound) -> Result<Vec<InvariantWord>> {
    bound.check(g, r)?;
    Ok(representatives(g, r, degree_filter)?
        .into_iter()
        .map(|rep| InvariantWord::from_representative(rep).expect("representatives skip odd repeats"))
        .collect())
}

/// Degrees of the representatives only, without building orbit sums.
pub fn invariant_representatives(g: u32, r: u32, bound: WordBound) -> Result<Vec<Vec<ExteriorMonomial>>> {
    bound.check(g, r)?;
    representatives(g, r, None)
}

/// `(1/r!) Σ_σ det(I_r + A_σ)^{2g}`: the dimension of the invariants by Burnside's
/// lemma with Koszul signs.
pub fn burnside_dimension(g: u32, r: u32) -> u128 {
    let mut total: i128 = 0;
    let mut count: i128 = 0;
    for sigma in Permutation::all(r as usize) {
        total += permutation_det_one_plus(&sigma).pow(2 * g);
        count += 1;
    }
    assert_eq!(total % count, 0, "Burnside sum not divisible by r!");
    (total / count) as u128
}

/// `det(I + A_σ)` computed by integer elimination of the explicit matrix.
fn permutation_det_one_plus(sigma: &Permutation) -> i128 {
    let r = sigma.len();
    let mut m = vec![vec![BigInt::zero(); r]; r];
    for i in 0..r {
        m[i][i] += 1;
        m[sigma.images()[i]][i] += 1;
    }
    let d = crate::linalg::bareiss_determinant(m);
    i128::try_from(d).expect("small determinant")
}

/// Element of `Λ(Q^{2g})^{⊗r}` expanded over tensor words.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct TensorClass {
    g: u32,
    r: u32,
    terms: BTreeMap<Vec<ExteriorMonomial>, Rational>,
}

impl TensorClass {
    pub fn zero(g: u32, r: u32) -> Self {
        TensorClass { g, r, terms: BTreeMap::new() }
    }

    /// Unit class `1 ⊗ … ⊗ 1`.
    pub fn unit(g: u32, r: u32) -> Self {
        let mut out = Self::zero(g, r);
        out.terms.insert(vec![ExteriorMonomial::unit(2 * g); r as usize], Rational::one());
        out
    }

    pub fn from_words(g: u32, r: u32, words: impl IntoIterator<Item = TensorWord>) -> Result<Self> {
        let mut out = Self::zero(g, r);
        for w in words {
            if w.factors.len() != r as usize || w.factors.iter().any(|m| m.ambient() != 2 * g) {
                return Err(PwError::Usage(format!("word {:?} does not live in (g={g}, r={r})", w.factors)));
            }
            add_into(&mut out.terms, w.factors, w.coefficient);
        }
        Ok(out)
    }

    pub fn g(&self) -> u32 {
        self.g
    }

    pub fn r(&self) -> u32 {
        self.r
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Vec<ExteriorMonomial>, &Rational)> {
        self.terms.iter()
    }

    pub fn coefficient(&self, factors: &[ExteriorMonomial]) -> Rational {
        self.terms.get(factors).cloned().unwrap_or_else(Rational::zero)
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    fn check_same(&self, other: &TensorClass) -> Result<()> {
        if (self.g, self.r) != (other.g, other.r) {
            return Err(PwError::Usage(format!(
                "mismatched spaces (g={}, r={}) and (g={}, r={})",
                self.g, self.r, other.g, other.r
            )));
        }
        Ok(())
    }

    pub fn add(&self, other: &TensorClass) -> Result<TensorClass> {
        self.check_same(other)?;
        let mut out = self.clone();
        for (k, c) in &other.terms {
            add_into(&mut out.terms, k.clone(), c.clone());
        }
        Ok(out)
    }

    pub fn scale(&self, c: &Rational) -> TensorClass {
        let mut out = TensorClass::zero(self.g, self.r);
        for (k, x) in &self.terms {
            add_into(&mut out.terms, k.clone(), x * c);
        }
        out
    }

    /// Homogeneous component of total degree `d`.
    pub fn component(&self, degree: u32) -> TensorClass {
        TensorClass {
            g: self.g,
            r: self.r,
            terms: self
                .terms
                .iter()
                .filter(|(k, _)| k.iter().map(|m| m.degree()).sum::<u32>() == degree)
                .map(|(k, c)| (k.clone(), c.clone()))
                .collect(),
        }
    }

    pub fn permute(&self, sigma: &Permutation) -> TensorClass {
        let mut out = TensorClass::zero(self.g, self.r);
        for (k, c) in &self.terms {
            let w = permute_word(sigma, &TensorWord { factors: k.clone(), coefficient: c.clone() });
            add_into(&mut out.terms, w.factors, w.coefficient);
        }
        out
    }

    /// Averaging projector `(1/r!) Σ_σ σ·x`.
    pub fn symmetrize(&self) -> TensorClass {
        let mut out = TensorClass::zero(self.g, self.r);
        let mut count = 0u64;
        for sigma in Permutation::all(self.r as usize) {
            count += 1;
            for (k, c) in &self.permute(&sigma).terms {
                add_into(&mut out.terms, k.clone(), c.clone());
            }
        }
        out.scale(&Rational::new(BigInt::one(), BigInt::from(count)))
    }

    pub fn is_invariant(&self) -> bool {
        Permutation::all(self.r as usize).all(|s| self.permute(&s) == *self)
    }

    /// Graded-commutative product with the interchange sign
    /// `(α_1⊗…⊗α_r)(β_1⊗…⊗β_r) = (-1)^{Σ_{i>j}|α_i||β_j|} α_1β_1⊗…⊗α_rβ_r`.
    pub fn cup(&self, other: &TensorClass) -> Result<TensorClass> {
        self.check_same(other)?;
        let mut out = TensorClass::zero(self.g, self.r);
        for (a, x) in &self.terms {
            for (b, y) in &other.terms {
                if let Some((sign, word)) = cup_words(a, b) {
                    add_into(&mut out.terms, word, signed(x * y, sign));
                }
            }
        }
        Ok(out)
    }
}

/// Product of two tensor words, `None` if a factor vanishes.
pub fn cup_words(a: &[ExteriorMonomial], b: &[ExteriorMonomial]) -> Option<(i32, Vec<ExteriorMonomial>)> {
    debug_assert_eq!(a.len(), b.len());
    let mut parity = 0u32;
    // Σ_{i>j} |a_i||b_j|: walk j from the right, tracking Σ_{i>j} |a_i|
    let mut a_suffix = 0u32;
    for j in (0..a.len()).rev() {
        parity += a_suffix * b[j].degree();
        a_suffix += a[j].degree();
    }
    let mut sign = if parity.is_multiple_of(2) { 1 } else { -1 };
    let mut word = Vec::with_capacity(a.len());
    for (x, y) in a.iter().zip(b) {
        let (s, m) = x.wedge_signed(*y)?;
        sign *= s;
        word.push(m);
    }
    Some((sign, word))
}

/// Product of two invariant classes.
pub fn cup_invariants(x: &TensorClass, y: &TensorClass) -> Result<TensorClass> {
    x.cup(y)
}

/// The invariant basis with an index for coordinate extraction.
#[derive(Clone, Debug)]
pub struct InvariantSpace {
    g: u32,
    r: u32,
    words: Vec<InvariantWord>,
    index: HashMap<Vec<ExteriorMonomial>, usize>,
}

impl InvariantSpace {
    pub fn new(g: u32, r: u32, bound: WordBound) -> Result<Self> {
        Self::build(g, r, None, bound)
    }

    /// Only the degree-`d` part.
    pub fn in_degree(g: u32, r: u32, degree: u32, bound: WordBound) -> Result<Self> {
        Self::build(g, r, Some(degree), bound)
    }

    fn build(g: u32, r: u32, degree: Option<u32>, bound: WordBound) -> Result<Self> {
        let words = invariant_basis(g, r, degree, bound)?;
        let index = words.iter().enumerate().map(|(i, w)| (w.representative.clone(), i)).collect();
        Ok(InvariantSpace { g, r, words, index })
    }

    pub fn g(&self) -> u32 {
        self.g
    }

    pub fn r(&self) -> u32 {
        self.r
    }

    pub fn words(&self) -> &[InvariantWord] {
        &self.words
    }

    pub fn dim(&self) -> usize {
        self.words.len()
    }

    pub fn index_of(&self, representative: &[ExteriorMonomial]) -> Option<usize> {
        self.index.get(representative).copied()
    }

    /// Coordinates of an invariant class: the coefficient of each representative word.
    ///
    /// Fails if the class has a sorted word outside this space (wrong degree, or
    /// a vanishing orbit carrying a nonzero coefficient, which means `x` is not invariant).
    pub fn coordinates(&self, x: &TensorClass) -> Result<BTreeMap<usize, Rational>> {
        if (x.g, x.r) != (self.g, self.r) {
            return Err(PwError::Usage(format!(
                "class of (g={}, r={}) in space of (g={}, r={})",
                x.g, x.r, self.g, self.r
            )));
        }
        let mut out = BTreeMap::new();
        for (k, c) in &x.terms {
            if !k.is_sorted() {
                continue;
            }
            match self.index.get(k) {
                Some(&i) => {
                    out.insert(i, c.clone());
                }
                None => return Err(PwError::Domain(format!("word {k:?} is not in this invariant basis"))),
            }
        }
        Ok(out)
    }

    /// Inverse of [`InvariantSpace::coordinates`].
    pub fn class_from_coordinates(&self, coords: &BTreeMap<usize, Rational>) -> TensorClass {
        let mut out = TensorClass::zero(self.g, self.r);
        for (&i, c) in coords {
            for w in &self.words[i].orbit_sum {
                add_into(&mut out.terms, w.factors.clone(), &w.coefficient * c);
            }
        }
        out
    }
}

/// Compact text form, `n` for integers and `n/d` otherwise.
pub fn rational_to_string(c: &Rational) -> String {
    if c.is_integer() {
        c.to_integer().to_string()
    } else {
        format!("{}/{}", c.numer(), c.denom().abs())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn e(ambient: u32, idx: &[u32]) -> ExteriorMonomial {
        ExteriorMonomial::new(ambient, idx).unwrap()
    }

    fn q(n: i64) -> Rational {
        Rational::from_integer(BigInt::from(n))
    }

    #[test]
    fn wedge_signs() {
        assert_eq!(wedge(e(2, &[1]), e(2, &[2])).unwrap(), GradedClass::monomial(e(2, &[1, 2])));
        assert_eq!(wedge(e(2, &[2]), e(2, &[1])).unwrap(), GradedClass::term(e(2, &[1, 2]), q(-1)));
        assert!(wedge(e(2, &[1]), e(2, &[1])).unwrap().is_zero());
    }

    #[test]
    fn wedge_rejects_mismatched_ambient() {
        assert!(matches!(wedge(e(2, &[1]), e(4, &[2])), Err(PwError::Usage(_))));
    }

    #[test]
    fn monomial_validation() {
        assert!(ExteriorMonomial::new(2, &[3]).is_err());
        assert!(ExteriorMonomial::new(2, &[0]).is_err());
        assert!(ExteriorMonomial::new(4, &[1, 1]).is_err());
        assert!(ExteriorMonomial::from_bits(2, 0b100).is_err());
        assert_eq!(e(4, &[3, 1]).indices(), vec![1, 3]);
        assert_eq!(e(4, &[3, 1]).to_string(), "e{1,3}");
    }

    #[test]
    fn monomial_order_is_degree_then_lex() {
        let ms = all_monomials(4).unwrap();
        let shown: Vec<String> = ms.iter().map(|m| m.to_string()).collect();
        assert_eq!(
            shown,
            vec![
                "1",
                "e{1}",
                "e{2}",
                "e{3}",
                "e{4}",
                "e{1,2}",
                "e{1,3}",
                "e{1,4}",
                "e{2,3}",
                "e{2,4}",
                "e{3,4}",
                "e{1,2,3}",
                "e{1,2,4}",
                "e{1,3,4}",
                "e{2,3,4}",
                "e{1,2,3,4}"
            ]
        );
    }

    #[test]
    fn permute_word_examples() {
        let w = TensorWord::new(vec![e(2, &[1]), e(2, &[2])]);
        let s = permute_word(&Permutation::swap(2, 0, 1), &w);
        assert_eq!(s.factors, vec![e(2, &[2]), e(2, &[1])]);
        assert_eq!(s.coefficient, q(-1));

        let w = TensorWord::new(vec![e(2, &[1, 2]), e(2, &[1])]);
        let s = permute_word(&Permutation::swap(2, 0, 1), &w);
        assert_eq!(s.factors, vec![e(2, &[1]), e(2, &[1, 2])]);
        assert_eq!(s.coefficient, q(1));

        let w = TensorWord::new(vec![e(4, &[1]), e(4, &[2, 3]), e(4, &[4])]);
        assert_eq!(permute_word(&Permutation::identity(3), &w), w);
    }

    #[test]
    fn invariant_basis_small_cases() {
        let b = invariant_basis(1, 2, Some(2), WordBound::default()).unwrap();
        let reps: Vec<_> = b.iter().map(|w| w.representative.clone()).collect();
        assert_eq!(reps, vec![vec![e(2, &[]), e(2, &[1, 2])], vec![e(2, &[1]), e(2, &[2])]]);

        assert_eq!(invariant_basis(1, 1, None, WordBound::default()).unwrap().len(), 4);
        assert_eq!(invariant_basis(1, 2, None, WordBound::default()).unwrap().len(), 8);
    }

    #[test]
    fn resource_guard() {
        assert!(matches!(
            invariant_basis(7, 2, None, WordBound::default()),
            Err(PwError::ResourceGuard { width: 28, bound: 24 })
        ));
        assert!(invariant_basis(2, 2, None, WordBound(7)).is_err());
        assert!(invariant_basis(0, 2, None, WordBound::default()).is_err());
    }

    #[test]
    fn orbit_sums_are_invariant_and_normalized() {
        for w in invariant_basis(1, 3, None, WordBound::default()).unwrap() {
            let c = w.to_class(1);
            assert!(c.is_invariant(), "{:?}", w.representative);
            assert_eq!(c.coefficient(&w.representative), q(1));
        }
    }

    #[test]
    fn cup_examples() {
        let space = InvariantSpace::new(1, 2, WordBound::default()).unwrap();
        let unit = TensorClass::unit(1, 2);
        for w in space.words() {
            let x = w.to_class(1);
            assert_eq!(cup_invariants(&unit, &x).unwrap(), x);
            assert_eq!(cup_invariants(&x, &unit).unwrap(), x);
        }

        let a = TensorClass::from_words(1, 1, [TensorWord::new(vec![e(2, &[1])])]).unwrap();
        let b = TensorClass::from_words(1, 1, [TensorWord::new(vec![e(2, &[2])])]).unwrap();
        let ab = cup_invariants(&a, &b).unwrap();
        assert_eq!(ab, TensorClass::from_words(1, 1, [TensorWord::new(vec![e(2, &[1, 2])])]).unwrap());

        assert!(cup_invariants(&a, &unit).is_err());
    }

    #[test]
    fn burnside_small() {
        assert_eq!(burnside_dimension(1, 1), 4);
        assert_eq!(burnside_dimension(1, 2), 8);
        assert_eq!(burnside_dimension(2, 2), 128);
    }

    #[test]
    fn coordinates_round_trip() {
        let space = InvariantSpace::new(1, 3, WordBound::default()).unwrap();
        let mut coords = BTreeMap::new();
        coords.insert(0, q(3));
        coords.insert(space.dim() - 1, q(-2));
        coords.insert(space.dim() / 2, Rational::new(1.into(), 7.into()));
        let x = space.class_from_coordinates(&coords);
        assert!(x.is_invariant());
        assert_eq!(space.coordinates(&x).unwrap(), coords);
    }

    #[test]
    fn coordinates_reject_non_invariant_words() {
        let space = InvariantSpace::new(1, 2, WordBound::default()).unwrap();
        // e1 ⊗ e1 symmetrizes to zero and has no basis element
        let x = TensorClass::from_words(1, 2, [TensorWord::new(vec![e(2, &[1]), e(2, &[1])])]).unwrap();
        assert!(space.coordinates(&x).is_err());
    }
}
