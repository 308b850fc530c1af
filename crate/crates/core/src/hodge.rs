//! Bivariate Laurent polynomials, the mixed Hodge polynomial of the Betti
//! moduli space by a sum over cycle types, and the curious Poincaré duality check.

use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use serde::{Deserialize, Serialize};

use crate::error::{PwError, Result};
use crate::filtration::{BigradedTable, Side};

/// `Σ c_{a,b} q^a t^b` with integer coefficients and integer exponents.
#[derive(Clone, Default, PartialEq, Eq, Hash)]
pub struct BiLaurent {
    coeffs: BTreeMap<(i32, i32), i128>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct MonomialJson {
    pub q: i32,
    pub t: i32,
    pub c: i128,
}

impl BiLaurent {
    pub fn zero() -> Self {
        BiLaurent::default()
    }

    pub fn one() -> Self {
        Self::monomial(1, 0, 0)
    }

    pub fn constant(c: i128) -> Self {
        Self::monomial(c, 0, 0)
    }

    /// `c q^a t^b`.
    pub fn monomial(c: i128, a: i32, b: i32) -> Self {
        let mut p = Self::zero();
        p.add_term(a, b, c);
        p
    }

    pub fn add_term(&mut self, a: i32, b: i32, c: i128) {
        if c == 0 {
            return;
        }
        let e = self.coeffs.entry((a, b)).or_insert(0);
        *e = e.checked_add(c).expect("coefficient overflow");
        if *e == 0 {
            self.coeffs.remove(&(a, b));
        }
    }

    pub fn coeff(&self, a: i32, b: i32) -> i128 {
        self.coeffs.get(&(a, b)).copied().unwrap_or(0)
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// Terms in canonical order: ascending `t` exponent, then ascending `q` exponent.
    pub fn terms(&self) -> Vec<(i32, i32, i128)> {
        let mut v: Vec<_> = self.coeffs.iter().map(|(&(a, b), &c)| (a, b, c)).collect();
        v.sort_by_key(|&(a, b, _)| (b, a));
        v
    }

    pub fn len(&self) -> usize {
        self.coeffs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn pow(&self, n: u32) -> Self {
        let mut acc = Self::one();
        let mut base = self.clone();
        let mut e = n;
        while e > 0 {
            if e & 1 == 1 {
                acc = &acc * &base;
            }
            base = &base * &base;
            e >>= 1;
        }
        acc
    }

    pub fn scale(&self, c: i128) -> Self {
        let mut out = Self::zero();
        for (&(a, b), &x) in &self.coeffs {
            out.add_term(a, b, x.checked_mul(c).expect("coefficient overflow"));
        }
        out
    }

    /// Multiply by `q^a t^b`.
    pub fn shift(&self, a: i32, b: i32) -> Self {
        BiLaurent { coeffs: self.coeffs.iter().map(|(&(x, y), &c)| ((x + a, y + b), c)).collect() }
    }

    /// Exact division by an integer; fails if any coefficient leaves a remainder.
    pub fn div_exact(&self, d: i128) -> Result<Self> {
        if d == 0 {
            return Err(PwError::Domain("division by zero".into()));
        }
        let mut out = Self::zero();
        for (&(a, b), &c) in &self.coeffs {
            if c % d != 0 {
                return Err(PwError::Domain(format!("coefficient {c} of q^{a} t^{b} is not divisible by {d}")));
            }
            out.add_term(a, b, c / d);
        }
        Ok(out)
    }

    /// Monomial substitution `q ↦ q^{qa} t^{qb}`, `t ↦ q^{ta} t^{tb}`.
    pub fn substitute(&self, q_image: (i32, i32), t_image: (i32, i32)) -> Self {
        let mut out = Self::zero();
        for (&(a, b), &c) in &self.coeffs {
            out.add_term(a * q_image.0 + b * t_image.0, a * q_image.1 + b * t_image.1, c);
        }
        out
    }

    /// Value at integer `q`, `t` (negative exponents need `±1`).
    pub fn eval(&self, q: i128, t: i128) -> Result<i128> {
        let mut total: i128 = 0;
        for (&(a, b), &c) in &self.coeffs {
            total += c * int_pow(q, a)? * int_pow(t, b)?;
        }
        Ok(total)
    }

    /// `H(1, t)` as a Laurent polynomial in `t`: coefficients by `t` exponent.
    pub fn at_q_one(&self) -> BTreeMap<i32, i128> {
        let mut out = BTreeMap::new();
        for (&(_, b), &c) in &self.coeffs {
            *out.entry(b).or_insert(0) += c;
        }
        out.retain(|_, c| *c != 0);
        out
    }

    pub fn min_coefficient(&self) -> Option<i128> {
        self.coeffs.values().copied().min()
    }

    pub fn to_json(&self) -> serde_json::Value {
        let v: Vec<MonomialJson> = self.terms().into_iter().map(|(q, t, c)| MonomialJson { q, t, c }).collect();
        serde_json::to_value(v).expect("polynomial serializes")
    }

    pub fn from_json(v: &serde_json::Value) -> Result<Self> {
        let terms: Vec<MonomialJson> =
            serde_json::from_value(v.clone()).map_err(|e| PwError::Usage(format!("bad polynomial JSON: {e}")))?;
        let mut p = Self::zero();
        for m in terms {
            p.add_term(m.q, m.t, m.c);
        }
        Ok(p)
    }
}

fn int_pow(x: i128, e: i32) -> Result<i128> {
    if e >= 0 {
        return Ok(x.pow(e as u32));
    }
    match x {
        1 => Ok(1),
        -1 => Ok(if e % 2 == 0 { 1 } else { -1 }),
        _ => Err(PwError::Domain(format!("cannot evaluate a negative power of {x} over the integers"))),
    }
}

impl fmt::Display for BiLaurent {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return f.write_str("0");
        }
        let var = |name: &str, e: i32| match e {
            0 => String::new(),
            1 => name.to_string(),
            _ => format!("{name}^{e}"),
        };
        for (i, (a, b, c)) in self.terms().into_iter().enumerate() {
            let body = [var("q", a), var("t", b)].into_iter().filter(|s| !s.is_empty()).collect::<Vec<_>>().join("*");
            let mag = c.abs();
            if i == 0 {
                if c < 0 {
                    f.write_str("-")?;
                }
            } else {
                f.write_str(if c < 0 { " - " } else { " + " })?;
            }
            if body.is_empty() {
                write!(f, "{mag}")?;
            } else if mag == 1 {
                f.write_str(&body)?;
            } else {
                write!(f, "{mag}*{body}")?;
            }
        }
        Ok(())
    }
}

impl fmt::Debug for BiLaurent {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "BiLaurent({self})")
    }
}

impl Add for &BiLaurent {
    type Output = BiLaurent;
    fn add(self, rhs: &BiLaurent) -> BiLaurent {
        let mut out = self.clone();
        for (&(a, b), &c) in &rhs.coeffs {
            out.add_term(a, b, c);
        }
        out
    }
}

impl Sub for &BiLaurent {
    type Output = BiLaurent;
    fn sub(self, rhs: &BiLaurent) -> BiLaurent {
        self + &(-rhs)
    }
}

impl Neg for &BiLaurent {
    type Output = BiLaurent;
    fn neg(self) -> BiLaurent {
        self.scale(-1)
    }
}

impl Mul for &BiLaurent {
    type Output = BiLaurent;
    fn mul(self, rhs: &BiLaurent) -> BiLaurent {
        let mut out = BiLaurent::zero();
        for (&(a, b), &c) in &self.coeffs {
            for (&(x, y), &d) in &rhs.coeffs {
                out.add_term(a + x, b + y, c.checked_mul(d).expect("coefficient overflow"));
            }
        }
        out
    }
}

/// A partition of `r` viewed as the cycle type of a permutation.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CycleType {
    /// Cycle lengths, nonincreasing.
    pub parts: Vec<u32>,
}

impl CycleType {
    /// All partitions of `r`, in reverse lexicographic order.
    pub fn all(r: u32) -> Vec<CycleType> {
        fn rec(left: u32, max: u32, cur: &mut Vec<u32>, out: &mut Vec<CycleType>) {
            if left == 0 {
                out.push(CycleType { parts: cur.clone() });
                return;
            }
            for p in (1..=left.min(max)).rev() {
                cur.push(p);
                rec(left - p, p, cur, out);
                cur.pop();
            }
        }
        let mut out = Vec::new();
        rec(r, r, &mut Vec::new(), &mut out);
        out
    }

    pub fn size(&self) -> u32 {
        self.parts.iter().sum()
    }

    /// Centralizer order `z_λ = Π_i i^{m_i} m_i!`.
    pub fn z(&self) -> u128 {
        let mut mult: BTreeMap<u32, u32> = BTreeMap::new();
        for &p in &self.parts {
            *mult.entry(p).or_insert(0) += 1;
        }
        mult.into_iter().map(|(i, m)| (i as u128).pow(m) * factorial(m)).product()
    }

    /// Number of permutations of this cycle type, `r!/z_λ`.
    pub fn class_size(&self) -> u128 {
        factorial(self.size()) / self.z()
    }

    /// `det(I + u·A_σ)` for `σ` of this cycle type with `u = qt`:
    /// a cycle of length `l` contributes `1 − (−u)^l`.
    pub fn det_one_plus_qt(&self) -> BiLaurent {
        self.parts.iter().fold(BiLaurent::one(), |acc, &l| {
            let sign = if l % 2 == 0 { -1 } else { 1 };
            let factor = &BiLaurent::one() + &BiLaurent::monomial(sign, l as i32, l as i32);
            &acc * &factor
        })
    }
}

pub fn factorial(n: u32) -> u128 {
    (1..=n as u128).product()
}

/// `H(M_Betti; q, t) = (1/r!) Σ_σ det(I_r + qt·A_σ)^{2g}`, grouped by cycle type.
pub fn mixed_hodge_polynomial(g: u32, r: u32) -> Result<BiLaurent> {
    if g == 0 || r == 0 {
        return Err(PwError::Usage(format!("g and r must be positive (got g={g}, r={r})")));
    }
    let mut sum = BiLaurent::zero();
    for ct in CycleType::all(r) {
        let term = ct.det_one_plus_qt().pow(2 * g).scale(ct.class_size() as i128);
        sum = &sum + &term;
    }
    sum.div_exact(factorial(r) as i128)
}

/// The polynomial as printed with `det(I − tq·A_σ)`; kept to document the
/// sign discrepancy, never used for checks.
pub fn mixed_hodge_polynomial_minus_convention(g: u32, r: u32) -> Result<BiLaurent> {
    let mut sum = BiLaurent::zero();
    for ct in CycleType::all(r) {
        let det = ct.parts.iter().fold(BiLaurent::one(), |acc, &l| {
            &acc * &(&BiLaurent::one() - &BiLaurent::monomial(1, l as i32, l as i32))
        });
        sum = &sum + &det.pow(2 * g).scale(ct.class_size() as i128);
    }
    sum.div_exact(factorial(r) as i128)
}

/// Coefficient table of `H(q, t)` as a Betti-side bigraded table (`q^k t^j ↦ d[k][j]`).
pub fn polynomial_to_table(g: u32, r: u32, h: &BiLaurent) -> Result<BigradedTable> {
    let mut t = BigradedTable::new(g, r, Side::Betti);
    for (a, b, c) in h.terms() {
        if a < 0 || b < 0 || c < 0 {
            return Err(PwError::Domain(format!("coefficient {c} at q^{a} t^{b} is not a dimension")));
        }
        t.add(a as u32, b as u32, c as u64);
    }
    Ok(t)
}

#[derive(Clone, Debug, Serialize)]
pub struct CuriousDualityReport {
    pub claim: &'static str,
    pub g: u32,
    pub r: u32,
    pub pass: bool,
    pub polynomial: String,
    pub transformed: String,
    /// First `(q exponent, t exponent, H, transformed)` where the sides differ.
    pub first_mismatch: Option<(i32, i32, i128, i128)>,
}

/// `H(q^{-1} t^{-2}, t) · (qt)^{2gr}`.
pub fn curious_transform(h: &BiLaurent, g: u32, r: u32) -> BiLaurent {
    let n = (2 * g * r) as i32;
    h.substitute((-1, -2), (0, 1)).shift(n, n)
}

pub fn check_curious_duality(g: u32, r: u32, h: &BiLaurent) -> CuriousDualityReport {
    let transformed = curious_transform(h, g, r);
    let diff = h - &transformed;
    let first_mismatch = diff.terms().first().map(|&(a, b, _)| (a, b, h.coeff(a, b), transformed.coeff(a, b)));
    CuriousDualityReport {
        claim: "Theorem B(i) (curious Poincaré duality): H(1/(qt^2), t) = (qt)^(-2gr) H(q, t)",
        g,
        r,
        pass: first_mismatch.is_none(),
        polynomial: h.to_string(),
        transformed: transformed.to_string(),
        first_mismatch,
    }
}

pub fn verify_curious_duality(g: u32, r: u32) -> Result<CuriousDualityReport> {
    Ok(check_curious_duality(g, r, &mixed_hodge_polynomial(g, r)?))
}

#[derive(Clone, Debug, Serialize)]
pub struct HodgeTateReport {
    pub claim: &'static str,
    pub g: u32,
    pub r: u32,
    pub pass: bool,
    /// Each graded piece `Gr^W_{2k} H^j` is spanned by products of degree-one
    /// torus classes, each of Hodge type `(1,1)`, so `h^{p,q;j} = 0` unless `p = q`.
    pub pieces: usize,
    pub first_violation: Option<String>,
}

/// Hodge types are carried per torus factor: `H^1(C*)` is pure of type `(1,1)`.
/// A class of degree `j` and half-weight `k` is then of type `(k, k)` exactly when
/// `k` counts its degree-one factors, i.e. `k = j`.
pub fn check_hodge_tate(weight: &BigradedTable, h: &BiLaurent) -> HodgeTateReport {
    let mut first_violation = None;
    for e in weight.entries() {
        if e.k != e.j {
            first_violation = Some(format!(
                "graded piece Gr^W_{} H^{} (dim {}) is not spanned by (1,1)-products",
                2 * e.k,
                e.j,
                e.dim
            ));
            break;
        }
    }
    if first_violation.is_none() {
        // H(x, y, t) must be a polynomial in xy: every monomial q^a t^b has a ≥ 0
        // and a whole-number Hodge type (a, a)
        if let Some((a, b, c)) = h.terms().into_iter().find(|&(a, _, _)| a < 0) {
            first_violation = Some(format!("monomial {c} q^{a} t^{b} has no Hodge type"));
        }
    }
    HodgeTateReport {
        claim: "Theorem B(i): M_Betti is of Hodge-Tate type",
        g: weight.g,
        r: weight.r,
        pass: first_violation.is_none(),
        pieces: weight.entries().len(),
        first_violation,
    }
}

pub fn hodge_tate_check(g: u32, r: u32, bound: crate::WordBound) -> Result<HodgeTateReport> {
    let w = crate::filtration::weight_table(g, r, bound)?;
    Ok(check_hodge_tate(&w, &mixed_hodge_polynomial(g, r)?))
}
