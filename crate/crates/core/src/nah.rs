//! Explicit non-abelian Hodge correspondence for rank-`r` Higgs bundles on
//! `X = C^g / L`, spectral data, the Hitchin map through elementary symmetric
//! polynomials, and the radial retraction onto `S^{2gr−1}/S_r`.
//!
//! In rank one a character `z ∈ Hom(L, C*) = (C*)^{2g}` splits by polar
//! decomposition into a unitary character `z/|z|` (a point of `X̂`) and
//! `−log|z| ∈ Hom(L, R) = H^1(X, R)`; writing that real class as `φ + φ̄` with
//! `φ = Σ λ_k dz_k` gives the Higgs field `λ ∈ C^g`. Higher rank is the
//! symmetric product of rank one.

use std::collections::BTreeMap;
use std::f64::consts::PI;

use itertools::Itertools;
use nalgebra::{DMatrix, DVector, LU};
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{PwError, Result};

/// Largest `r` for exhaustive multiset matching.
pub const MAX_MATCHING_SIZE: usize = 6;

/// Tolerance on `|phase| = 1`.
pub const PHASE_TOLERANCE: f64 = 1e-12;

/// A full-rank lattice `L ⊂ C^g` with a chosen basis `l_1, …, l_{2g}`.
#[derive(Clone, Debug)]
pub struct Lattice {
    g: usize,
    basis: Vec<Vec<Complex64>>,
    period: DMatrix<f64>,
    lu: LU<f64, nalgebra::Dyn, nalgebra::Dyn>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct LatticeJson {
    pub g: usize,
    /// `2g` vectors, each `g` entries of `[re, im]`.
    pub basis: Vec<Vec<[f64; 2]>>,
}

impl Lattice {
    pub fn new(basis: Vec<Vec<Complex64>>) -> Result<Self> {
        if basis.is_empty() || !basis.len().is_multiple_of(2) {
            return Err(PwError::Lattice(format!("need 2g basis vectors, got {}", basis.len())));
        }
        let g = basis.len() / 2;
        if basis.iter().any(|v| v.len() != g) {
            return Err(PwError::Lattice(format!("every basis vector must have {g} entries")));
        }
        if basis.iter().flatten().any(|c| !c.re.is_finite() || !c.im.is_finite()) {
            return Err(PwError::Lattice("non-finite basis entry".into()));
        }
        // row i: λ ↦ 2 Re Σ_k λ_k l_{ik} in coordinates (Re λ, Im λ)
        let period = DMatrix::from_fn(2 * g, 2 * g, |i, c| {
            let l = basis[i][c % g];
            if c < g {
                2.0 * l.re
            } else {
                -2.0 * l.im
            }
        });
        let scale = period.iter().fold(0.0f64, |m, x| m.max(x.abs()));
        let det = period.determinant();
        if scale == 0.0 || det.abs() <= 1e-8 * scale.powi(2 * g as i32) {
            return Err(PwError::Lattice(format!("period map is singular (det = {det:e})")));
        }
        let lu = period.clone().lu();
        Ok(Lattice { g, basis, period, lu })
    }

    /// `l_j = e_j`, `l_{g+j} = i·e_j`.
    pub fn square(g: usize) -> Self {
        let mut basis = Vec::with_capacity(2 * g);
        for tau in [Complex64::new(1.0, 0.0), Complex64::new(0.0, 1.0)] {
            for j in 0..g {
                let mut v = vec![Complex64::new(0.0, 0.0); g];
                v[j] = tau;
                basis.push(v);
            }
        }
        Lattice::new(basis).expect("square lattice is nondegenerate")
    }

    /// Random lattice whose period map has 2-norm condition number below `max_condition`.
    pub fn random<R: Rng>(g: usize, rng: &mut R, max_condition: f64) -> Self {
        loop {
            let basis: Vec<Vec<Complex64>> = (0..2 * g)
                .map(|_| {
                    (0..g).map(|_| Complex64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0))).collect()
                })
                .collect();
            if let Ok(lat) = Lattice::new(basis) {
                if lat.condition_number() < max_condition {
                    return lat;
                }
            }
        }
    }

    pub fn from_json(v: &LatticeJson) -> Result<Self> {
        if v.basis.len() != 2 * v.g {
            return Err(PwError::Lattice(format!("expected {} basis vectors, got {}", 2 * v.g, v.basis.len())));
        }
        Lattice::new(v.basis.iter().map(|vec| vec.iter().map(|&[re, im]| Complex64::new(re, im)).collect()).collect())
    }

    pub fn to_json(&self) -> LatticeJson {
        LatticeJson { g: self.g, basis: self.basis.iter().map(|v| v.iter().map(|c| [c.re, c.im]).collect()).collect() }
    }

    pub fn g(&self) -> usize {
        self.g
    }

    pub fn basis(&self) -> &[Vec<Complex64>] {
        &self.basis
    }

    pub fn period_matrix(&self) -> &DMatrix<f64> {
        &self.period
    }

    pub fn condition_number(&self) -> f64 {
        let sv = self.period.clone().singular_values();
        let max = sv.iter().cloned().fold(0.0, f64::max);
        let min = sv.iter().cloned().fold(f64::INFINITY, f64::min);
        max / min
    }

    /// `λ ↦ (2 Re⟨λ, l_i⟩)_i ∈ R^{2g}`.
    pub fn period_map(&self, lambda: &[Complex64]) -> Vec<f64> {
        let x = DVector::from_iterator(2 * self.g, lambda.iter().map(|c| c.re).chain(lambda.iter().map(|c| c.im)));
        (&self.period * x).iter().copied().collect()
    }

    /// Inverse of [`Lattice::period_map`].
    pub fn solve_higgs(&self, periods: &[f64]) -> Result<Vec<Complex64>> {
        let b = DVector::from_column_slice(periods);
        let x = self.lu.solve(&b).ok_or_else(|| PwError::Lattice("period map is singular".into()))?;
        Ok((0..self.g).map(|k| Complex64::new(x[k], x[self.g + k])).collect())
    }
}

/// A rank-one character: the value on each lattice basis vector.
#[derive(Clone, Debug, PartialEq)]
pub struct RankOneBetti {
    pub values: Vec<Complex64>,
}

impl RankOneBetti {
    pub fn new(values: Vec<Complex64>) -> Result<Self> {
        if values.iter().any(|z| z.norm() == 0.0 || !z.re.is_finite() || !z.im.is_finite()) {
            return Err(PwError::Domain("character values must be finite and nonzero".into()));
        }
        Ok(RankOneBetti { values })
    }

    /// `−log|z_i|`.
    pub fn neg_log_modulus(&self) -> Vec<f64> {
        self.values.iter().map(|z| -z.norm().ln()).collect()
    }
}

/// A rank-one Higgs bundle: a unitary character (point of `X̂`) and a Higgs field `λ ∈ C^g`.
#[derive(Clone, Debug, PartialEq)]
pub struct RankOneDolbeault {
    pub phases: Vec<Complex64>,
    pub higgs: Vec<Complex64>,
}

impl RankOneDolbeault {
    pub fn new(phases: Vec<Complex64>, higgs: Vec<Complex64>) -> Result<Self> {
        if phases.len() != 2 * higgs.len() {
            return Err(PwError::Domain(format!("{} phases for a Higgs field in C^{}", phases.len(), higgs.len())));
        }
        if phases.iter().any(|p| (p.norm() - 1.0).abs() > PHASE_TOLERANCE) {
            return Err(PwError::Domain("phases must have modulus one".into()));
        }
        Ok(RankOneDolbeault { phases, higgs })
    }
}

/// An unordered collection of `r` points.
#[derive(Clone, Debug, PartialEq)]
pub struct HiggsMultiset<P> {
    pub points: Vec<P>,
}

impl<P> HiggsMultiset<P> {
    pub fn new(points: Vec<P>) -> Self {
        HiggsMultiset { points }
    }

    pub fn r(&self) -> usize {
        self.points.len()
    }
}

/// Polar decomposition `z ↦ (z/|z|, −log|z|)` followed by solving
/// `2 Re⟨λ, l_i⟩ = −log|z_i|` for the Higgs field.
pub fn betti_to_dolbeault(lat: &Lattice, z: &RankOneBetti) -> Result<RankOneDolbeault> {
    if z.values.len() != 2 * lat.g {
        return Err(PwError::Domain(format!("character has {} values, lattice rank is {}", z.values.len(), 2 * lat.g)));
    }
    if z.values.iter().any(|v| v.norm() == 0.0) {
        return Err(PwError::Domain("character value is zero".into()));
    }
    let phases = z.values.iter().map(|v| v / v.norm()).collect();
    let higgs = lat.solve_higgs(&z.neg_log_modulus())?;
    Ok(RankOneDolbeault { phases, higgs })
}

/// `z_i = phase_i · exp(−2 Re⟨λ, l_i⟩)`.
pub fn dolbeault_to_betti(lat: &Lattice, p: &RankOneDolbeault) -> Result<RankOneBetti> {
    if p.higgs.len() != lat.g || p.phases.len() != 2 * lat.g {
        return Err(PwError::Domain(format!("point does not live over a lattice of genus {}", lat.g)));
    }
    let periods = lat.period_map(&p.higgs);
    Ok(RankOneBetti { values: p.phases.iter().zip(periods).map(|(ph, x)| ph * (-x).exp()).collect() })
}

/// Spectral data: forget the point of `X̂`, keep the Higgs fields.
pub fn spectral_data(m: &HiggsMultiset<RankOneDolbeault>) -> Vec<Vec<Complex64>> {
    m.points.iter().map(|p| p.higgs.clone()).collect()
}

/// Scale every Higgs field by `t` (the `G_m`-action).
pub fn scale_higgs(m: &HiggsMultiset<RankOneDolbeault>, t: Complex64) -> HiggsMultiset<RankOneDolbeault> {
    HiggsMultiset::new(
        m.points
            .iter()
            .map(|p| RankOneDolbeault { phases: p.phases.clone(), higgs: p.higgs.iter().map(|x| x * t).collect() })
            .collect(),
    )
}

/// Polynomial in `y_1..y_g`, keyed by exponent vectors.
pub type SymPoly = BTreeMap<Vec<u32>, Complex64>;

/// Image of the Hitchin map: `sigma[i-1]` is the degree-`i` symmetric tensor `σ_i`.
#[derive(Clone, Debug, PartialEq)]
pub struct HitchinImage {
    pub g: usize,
    pub sigma: Vec<SymPoly>,
}

impl HitchinImage {
    /// Coefficient of `s^{r−i}` in the characteristic polynomial, `(−1)^i σ_i`.
    pub fn char_poly_coefficient(&self, i: usize) -> SymPoly {
        let sign = if i.is_multiple_of(2) { 1.0 } else { -1.0 };
        self.sigma[i - 1].iter().map(|(k, v)| (k.clone(), v * sign)).collect()
    }

    /// Max-norm distance over all coefficients.
    pub fn distance(&self, other: &HitchinImage) -> f64 {
        let mut d = 0.0f64;
        for (a, b) in self.sigma.iter().zip(&other.sigma) {
            for k in a.keys().chain(b.keys()) {
                let x = a.get(k).copied().unwrap_or_default();
                let y = b.get(k).copied().unwrap_or_default();
                d = d.max((x - y).norm());
            }
        }
        d
    }
}

fn poly_mul(a: &SymPoly, b: &SymPoly) -> SymPoly {
    let mut out = SymPoly::new();
    for (ea, ca) in a {
        for (eb, cb) in b {
            let e: Vec<u32> = ea.iter().zip(eb).map(|(x, y)| x + y).collect();
            *out.entry(e).or_default() += ca * cb;
        }
    }
    out
}

fn poly_add_into(acc: &mut SymPoly, p: &SymPoly) {
    for (e, c) in p {
        *acc.entry(e.clone()).or_default() += c;
    }
}

/// Expand `Π_a (s − ⟨λ^{(a)}, y⟩)` and read off `σ_i` from the coefficient of `s^{r−i}`.
pub fn hitchin_embedding(sd: &[Vec<Complex64>]) -> Result<HitchinImage> {
    let Some(g) = sd.first().map(Vec::len) else {
        return Err(PwError::Domain("empty spectral data".into()));
    };
    if sd.iter().any(|v| v.len() != g) {
        return Err(PwError::Domain("spectral vectors of different lengths".into()));
    }
    let constant = |c: Complex64| -> SymPoly { [(vec![0; g], c)].into_iter().collect() };
    // coefficients by power of s, lowest first
    let mut product: Vec<SymPoly> = vec![constant(Complex64::new(1.0, 0.0))];
    for lambda in sd {
        let neg_linear: SymPoly = (0..g)
            .map(|k| {
                let mut e = vec![0; g];
                e[k] = 1;
                (e, -lambda[k])
            })
            .collect();
        let mut next = vec![SymPoly::new(); product.len() + 1];
        for (p, coeff) in product.iter().enumerate() {
            poly_add_into(&mut next[p + 1], coeff); // · s
            poly_add_into(&mut next[p], &poly_mul(coeff, &neg_linear));
        }
        product = next;
    }
    let r = sd.len();
    let sigma = (1..=r)
        .map(|i| {
            let sign = if i % 2 == 0 { 1.0 } else { -1.0 };
            product[r - i].iter().map(|(e, c)| (e.clone(), c * sign)).collect()
        })
        .collect();
    Ok(HitchinImage { g, sigma })
}

/// Divide by the Euclidean norm of all `2gr` real coordinates.
pub fn retract_to_sphere_quotient(sd: &[Vec<Complex64>]) -> Result<Vec<Vec<Complex64>>> {
    let norm = sd.iter().flatten().map(|c| c.norm_sqr()).sum::<f64>().sqrt();
    if norm == 0.0 || !norm.is_finite() {
        return Err(PwError::Domain("cannot retract the origin of Sym^r(C^g)".into()));
    }
    Ok(sd.iter().map(|v| v.iter().map(|c| c / norm).collect()).collect())
}

/// `min_σ max_a ‖x_a − y_{σ(a)}‖_∞` over all matchings.
pub fn multiset_distance<T, F>(x: &[T], y: &[T], dist: F) -> Result<f64>
where
    F: Fn(&T, &T) -> f64,
{
    if x.len() != y.len() {
        return Err(PwError::Usage(format!("multisets of sizes {} and {}", x.len(), y.len())));
    }
    if x.len() > MAX_MATCHING_SIZE {
        return Err(PwError::Usage(format!("exhaustive matching limited to r <= {MAX_MATCHING_SIZE}")));
    }
    let n = x.len();
    let cost: Vec<Vec<f64>> = x.iter().map(|a| y.iter().map(|b| dist(a, b)).collect()).collect();
    Ok((0..n)
        .permutations(n)
        .map(|p| p.iter().enumerate().map(|(a, &b)| cost[a][b]).fold(0.0, f64::max))
        .fold(if n == 0 { 0.0 } else { f64::INFINITY }, f64::min))
}

#[allow(clippy::ptr_arg)] // shaped for `multiset_distance`
pub fn max_abs_diff_real(a: &Vec<f64>, b: &Vec<f64>) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max)
}

#[allow(clippy::ptr_arg)]
pub fn max_abs_diff_complex(a: &Vec<Complex64>, b: &Vec<Complex64>) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y).norm()).fold(0.0, f64::max)
}

/// Per-sample generator: stream `index` of a ChaCha8 keyed by `seed`.
pub fn sample_rng(seed: u64, index: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index);
    rng
}

/// Random character with `log|z_i| ∈ [−2, 2]` and uniform argument.
pub fn random_betti_point<R: Rng>(g: usize, rng: &mut R) -> RankOneBetti {
    RankOneBetti {
        values: (0..2 * g)
            .map(|_| Complex64::from_polar(rng.random_range(-2.0f64..2.0).exp(), rng.random_range(-PI..PI)))
            .collect(),
    }
}

pub fn random_dolbeault_point<R: Rng>(g: usize, rng: &mut R) -> RankOneDolbeault {
    RankOneDolbeault {
        phases: (0..2 * g).map(|_| Complex64::from_polar(1.0, rng.random_range(-PI..PI))).collect(),
        higgs: (0..g).map(|_| Complex64::new(rng.random_range(-2.0..2.0), rng.random_range(-2.0..2.0))).collect(),
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct NahDiagramReport {
    pub claim: &'static str,
    pub g: usize,
    pub r: usize,
    pub samples: usize,
    pub seed: u64,
    pub min_radius: Option<f64>,
    /// Worst relative error of Betti → Dolbeault → Betti.
    pub betti_roundtrip: f64,
    /// Worst error of Dolbeault → Betti → Dolbeault (phases and Higgs fields).
    pub dolbeault_roundtrip: f64,
    /// Worst multiset distance between the two ways around the square.
    pub diagram_residual: f64,
    pub tolerance: f64,
    pub pass: bool,
    /// `(sample index, residual)` of the worst sample when failing.
    pub worst_sample: Option<(usize, f64)>,
}

#[derive(Clone, Debug)]
pub struct DiagramOptions {
    pub samples: usize,
    pub seed: u64,
    pub tolerance: f64,
    /// Push samples out to `Sym^r(R^{2g})`-norm at least this (a neighborhood of infinity).
    pub min_radius: Option<f64>,
    /// Debug fixture: add this to the first coordinate of the direct route.
    pub perturbation: f64,
}

impl Default for DiagramOptions {
    fn default() -> Self {
        DiagramOptions { samples: 500, seed: 42, tolerance: 1e-9, min_radius: None, perturbation: 0.0 }
    }
}

/// One Betti multiset sample, optionally pushed out radially in log-modulus coordinates.
pub fn sample_betti_multiset(
    g: usize,
    r: usize,
    seed: u64,
    index: u64,
    min_radius: Option<f64>,
) -> HiggsMultiset<RankOneBetti> {
    let mut rng = sample_rng(seed, index);
    let mut pts: Vec<RankOneBetti> = (0..r).map(|_| random_betti_point(g, &mut rng)).collect();
    if let Some(radius) = min_radius {
        let norm = pts.iter().flat_map(|p| p.neg_log_modulus()).map(|x| x * x).sum::<f64>().sqrt();
        if norm > 0.0 && norm < radius {
            let f = radius / norm;
            for p in &mut pts {
                for z in &mut p.values {
                    let (m, arg) = z.to_polar();
                    *z = Complex64::from_polar(m.powf(f), arg);
                }
            }
        }
    }
    HiggsMultiset::new(pts)
}

/// Check `Sym^r(pr_2) ∘ (Sym^r η¹)^{−1} = Sym^r(−log|·|)` on random samples, through
/// the period-map identification `C^g ≅ R^{2g}`, plus both roundtrips.
pub fn verify_nah_diagram(lat: &Lattice, r: usize, opts: &DiagramOptions) -> Result<NahDiagramReport> {
    if r == 0 || opts.samples == 0 {
        return Err(PwError::Usage("need r >= 1 and at least one sample".into()));
    }
    if r > MAX_MATCHING_SIZE {
        return Err(PwError::Usage(format!("exhaustive matching limited to r <= {MAX_MATCHING_SIZE}")));
    }
    let g = lat.g;
    let mut betti_roundtrip = 0.0f64;
    let mut dolbeault_roundtrip = 0.0f64;
    let mut diagram_residual = 0.0f64;
    let mut worst: Option<(usize, f64)> = None;
    for s in 0..opts.samples {
        let m = sample_betti_multiset(g, r, opts.seed, s as u64, opts.min_radius);

        let mut direct: Vec<Vec<f64>> = m.points.iter().map(RankOneBetti::neg_log_modulus).collect();
        direct[0][0] += opts.perturbation;

        let dol = HiggsMultiset::new(m.points.iter().map(|z| betti_to_dolbeault(lat, z)).collect::<Result<Vec<_>>>()?);
        let via_sd: Vec<Vec<f64>> = spectral_data(&dol).iter().map(|l| lat.period_map(l)).collect();
        let res = multiset_distance(&direct, &via_sd, max_abs_diff_real)?;
        diagram_residual = diagram_residual.max(res);
        if worst.is_none_or(|(_, w)| res > w) {
            worst = Some((s, res));
        }

        for (z, p) in m.points.iter().zip(&dol.points) {
            let back = dolbeault_to_betti(lat, p)?;
            for (a, b) in z.values.iter().zip(&back.values) {
                betti_roundtrip = betti_roundtrip.max((a - b).norm() / a.norm());
            }
        }

        let mut rng = sample_rng(opts.seed ^ 0x5eed_d01b, s as u64);
        for _ in 0..r {
            let p = random_dolbeault_point(g, &mut rng);
            let back = betti_to_dolbeault(lat, &dolbeault_to_betti(lat, &p)?)?;
            dolbeault_roundtrip = dolbeault_roundtrip
                .max(max_abs_diff_complex(&p.phases, &back.phases))
                .max(max_abs_diff_complex(&p.higgs, &back.higgs));
        }
    }
    let pass =
        betti_roundtrip < opts.tolerance && dolbeault_roundtrip < opts.tolerance && diagram_residual < opts.tolerance;
    Ok(NahDiagramReport {
        claim: "Proposition (explicit NAH): Sym^r(pr_2) o (Sym^r eta^1)^(-1) = Sym^r(-log|.|) under C^g = R^(2g)",
        g,
        r,
        samples: opts.samples,
        seed: opts.seed,
        min_radius: opts.min_radius,
        betti_roundtrip,
        dolbeault_roundtrip,
        diagram_residual,
        tolerance: opts.tolerance,
        pass,
        worst_sample: if pass { None } else { worst },
    })
}

#[derive(Clone, Debug, Serialize)]
pub struct RoundtripReport {
    pub claim: &'static str,
    pub g: usize,
    pub samples: usize,
    pub seed: u64,
    pub betti_roundtrip: f64,
    pub dolbeault_roundtrip: f64,
    pub tolerance: f64,
    pub pass: bool,
    pub worst_sample: Option<(usize, f64)>,
}

/// Both compositions of the rank-one correspondence on `samples` random points each.
pub fn verify_roundtrip(lat: &Lattice, opts: &DiagramOptions) -> Result<RoundtripReport> {
    if opts.samples == 0 {
        return Err(PwError::Usage("need at least one sample".into()));
    }
    let g = lat.g;
    let (mut betti_roundtrip, mut dolbeault_roundtrip) = (0.0f64, 0.0f64);
    let mut worst: Option<(usize, f64)> = None;
    for s in 0..opts.samples {
        let mut rng = sample_rng(opts.seed, s as u64);
        let z = random_betti_point(g, &mut rng);
        let mut back = dolbeault_to_betti(lat, &betti_to_dolbeault(lat, &z)?)?;
        back.values[0] += opts.perturbation;
        let eb = z.values.iter().zip(&back.values).map(|(a, b)| (a - b).norm() / a.norm()).fold(0.0, f64::max);

        let p = random_dolbeault_point(g, &mut rng);
        let q = betti_to_dolbeault(lat, &dolbeault_to_betti(lat, &p)?)?;
        let ed = max_abs_diff_complex(&p.phases, &q.phases).max(max_abs_diff_complex(&p.higgs, &q.higgs));

        betti_roundtrip = betti_roundtrip.max(eb);
        dolbeault_roundtrip = dolbeault_roundtrip.max(ed);
        let e = eb.max(ed);
        if worst.is_none_or(|(_, w)| e > w) {
            worst = Some((s, e));
        }
    }
    let pass = betti_roundtrip < opts.tolerance && dolbeault_roundtrip < opts.tolerance;
    Ok(RoundtripReport {
        claim: "Proposition (explicit NAH, rank one): Betti -> Dolbeault -> Betti and Dolbeault -> Betti -> Dolbeault are the identity",
        g,
        samples: opts.samples,
        seed: opts.seed,
        betti_roundtrip,
        dolbeault_roundtrip,
        tolerance: opts.tolerance,
        pass,
        worst_sample: if pass { None } else { worst },
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn trivial_character() {
        let lat = Lattice::square(2);
        let z = RankOneBetti::new(vec![c(1.0, 0.0); 4]).unwrap();
        let p = betti_to_dolbeault(&lat, &z).unwrap();
        assert!(p.phases.iter().all(|ph| (ph - c(1.0, 0.0)).norm() < 1e-15));
        assert!(p.higgs.iter().all(|l| l.norm() < 1e-15));
        assert_eq!(dolbeault_to_betti(&lat, &p).unwrap(), z);
    }

    #[test]
    fn g1_worked_example() {
        // basis (1, i), z = (e, 1): 2 Re λ = −1 and 2 Re(iλ) = 0
        let lat = Lattice::square(1);
        let z = RankOneBetti::new(vec![c(std::f64::consts::E, 0.0), c(1.0, 0.0)]).unwrap();
        let p = betti_to_dolbeault(&lat, &z).unwrap();
        assert!((p.higgs[0] - c(-0.5, 0.0)).norm() < 1e-15);
        assert!(p.phases.iter().all(|ph| (ph - c(1.0, 0.0)).norm() < 1e-15));
        let back = dolbeault_to_betti(&lat, &p).unwrap();
        assert!(max_abs_diff_complex(&back.values, &z.values) < 1e-14);
    }

    #[test]
    fn singular_lattice_rejected() {
        let basis = vec![vec![c(1.0, 0.0)], vec![c(2.0, 0.0)]];
        assert!(matches!(Lattice::new(basis), Err(PwError::Lattice(_))));
        assert!(Lattice::new(vec![vec![c(1.0, 0.0)]]).is_err());
    }

    #[test]
    fn zero_character_rejected() {
        assert!(RankOneBetti::new(vec![c(0.0, 0.0), c(1.0, 0.0)]).is_err());
        let lat = Lattice::square(1);
        let z = RankOneBetti { values: vec![c(0.0, 0.0), c(1.0, 0.0)] };
        assert!(matches!(betti_to_dolbeault(&lat, &z), Err(PwError::Domain(_))));
    }

    #[test]
    fn lattice_json_round_trip() {
        let lat = Lattice::random(2, &mut sample_rng(7, 0), 1e6);
        let back = Lattice::from_json(&lat.to_json()).unwrap();
        assert_eq!(back.basis(), lat.basis());
    }

    #[test]
    fn spectral_data_forgets_phases() {
        let l = vec![c(1.0, 2.0)];
        let a = RankOneDolbeault::new(vec![c(1.0, 0.0), c(0.0, 1.0)], l.clone()).unwrap();
        let b = RankOneDolbeault::new(vec![c(-1.0, 0.0), c(0.0, -1.0)], l.clone()).unwrap();
        let ma = HiggsMultiset::new(vec![a.clone(), b.clone()]);
        let mb = HiggsMultiset::new(vec![b, a]);
        assert_eq!(spectral_data(&ma), spectral_data(&mb));
        assert_eq!(spectral_data(&ma), vec![l.clone(), l]);
    }

    #[test]
    fn scalar_char_poly() {
        let img = hitchin_embedding(&[vec![c(2.0, 0.0)], vec![c(3.0, 0.0)]]).unwrap();
        assert_eq!(img.sigma[0][&vec![1]], c(5.0, 0.0));
        assert_eq!(img.sigma[1][&vec![2]], c(6.0, 0.0));
        assert_eq!(img.char_poly_coefficient(1)[&vec![1]], c(-5.0, 0.0));
        let zero = hitchin_embedding(&vec![vec![c(0.0, 0.0); 2]; 3]).unwrap();
        assert!(zero.sigma.iter().flat_map(|p| p.values()).all(|v| v.norm() == 0.0));
    }

    #[test]
    fn retraction() {
        let out = retract_to_sphere_quotient(&[vec![c(3.0, 0.0), c(4.0, 0.0)]]).unwrap();
        assert!((out[0][0] - c(0.6, 0.0)).norm() < 1e-15 && (out[0][1] - c(0.8, 0.0)).norm() < 1e-15);
        assert!(retract_to_sphere_quotient(&[vec![c(0.0, 0.0)], vec![c(0.0, 0.0)]]).is_err());
    }

    #[test]
    fn matching_distance() {
        let x = vec![vec![0.0], vec![1.0], vec![5.0]];
        let y = vec![vec![5.0], vec![0.1], vec![1.0]];
        assert!((multiset_distance(&x, &y, max_abs_diff_real).unwrap() - 0.1).abs() < 1e-15);
        assert!(multiset_distance(&x, &y[..2], max_abs_diff_real).is_err());
        let big = vec![vec![0.0]; 7];
        assert!(multiset_distance(&big, &big, max_abs_diff_real).is_err());
    }

    #[test]
    fn diagram_small_and_perturbed() {
        let lat = Lattice::square(2);
        let opts = DiagramOptions { samples: 50, ..Default::default() };
        let rep = verify_nah_diagram(&lat, 3, &opts).unwrap();
        assert!(rep.pass, "{rep:?}");

        let bad = DiagramOptions { samples: 5, perturbation: 1e-6, ..Default::default() };
        let rep = verify_nah_diagram(&lat, 2, &bad).unwrap();
        assert!(!rep.pass);
        assert!(rep.worst_sample.is_some());
    }

    #[test]
    fn deterministic_samples() {
        let a = sample_betti_multiset(2, 3, 42, 17, None);
        let b = sample_betti_multiset(2, 3, 42, 17, None);
        assert_eq!(a, b);
        assert_ne!(a, sample_betti_multiset(2, 3, 42, 18, None));
    }
}
