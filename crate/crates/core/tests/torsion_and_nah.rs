use num_complex::Complex64;
use proptest::prelude::*;
use pw_core::nah::{
    betti_to_dolbeault, dolbeault_to_betti, hitchin_embedding, max_abs_diff_complex, multiset_distance,
    random_dolbeault_point, retract_to_sphere_quotient, sample_betti_multiset, sample_rng, scale_higgs, spectral_data,
    verify_nah_diagram, DiagramOptions, HiggsMultiset, Lattice,
};
use pw_core::torsion::{
    ball_pair, cone_rp_pair, kunneth_pairs, local_homology, manifold_obstruction, rational_sphere_check, tensor, tor,
    FGAbGroup,
};

#[test]
fn manifold_grid() {
    for g in 1..=4 {
        for r in 2..=4 {
            let rep = manifold_obstruction(g, r).unwrap();
            assert!(rep.pass, "g={g} r={r}");
            assert_eq!(rep.is_obstructed, g >= 2, "g={g} r={r}");
            assert!(rep.matches_closed_form);
        }
        assert!(manifold_obstruction(g, 1).unwrap().vacuous);
    }
}

#[test]
fn g2_r2_witness() {
    // N = 7, k = 3: Z/2 in degree k + 2 = 5 where the ball pair is 0
    let rep = manifold_obstruction(2, 2).unwrap();
    assert_eq!((rep.n, rep.k), (7, Some(3)));
    assert!(rep.witnesses.iter().any(|(i, grp)| *i == 5 && grp == "Z/2"));
    let local = local_homology(2, 2).unwrap();
    assert_eq!(local.get(7), FGAbGroup::free(1));
    assert_eq!(rep.witnesses.len(), 1);
}

#[test]
fn cone_groups() {
    // H_i(C RP^3, C RP^3 − 0) = H̃_{i−1}(RP^3): Z/2 in 2, 0 in 3, Z in 4
    let c = cone_rp_pair(3).unwrap();
    assert!(c.get(1).is_zero());
    assert_eq!(c.get(2), FGAbGroup::cyclic(2));
    assert!(c.get(3).is_zero());
    assert_eq!(c.get(4), FGAbGroup::free(1));
    assert!(cone_rp_pair(2).is_err());
}

#[test]
fn rational_sphere_grid() {
    for g in 1..=4 {
        for r in 1..=4 {
            let rep = rational_sphere_check(g, r).unwrap();
            assert!(rep.pass && rep.determinant_one, "g={g} r={r}");
        }
    }
}

fn arb_group() -> impl Strategy<Value = FGAbGroup> {
    (0u32..3, prop::collection::vec(2u64..13, 0..3)).prop_map(|(f, t)| FGAbGroup::new(f, t))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn tensor_and_tor_symmetric(a in arb_group(), b in arb_group()) {
        prop_assert_eq!(tensor(&a, &b), tensor(&b, &a));
        prop_assert_eq!(tor(&a, &b), tor(&b, &a));
        prop_assert!(tensor(&a, &b).is_canonical());
    }

    #[test]
    fn canonical_form_is_idempotent(f in 0u32..3, t in prop::collection::vec(1u64..40, 0..4)) {
        let a = FGAbGroup::new(f, t);
        prop_assert!(a.is_canonical());
        prop_assert_eq!(FGAbGroup::new(a.free_rank(), a.torsion().to_vec()), a);
    }

    #[test]
    fn kunneth_with_ball_shifts(k in 0u32..5, m in (0u32..3).prop_map(|x| 2 * x + 1)) {
        let c = cone_rp_pair(m).unwrap();
        let p = kunneth_pairs(&ball_pair(k), &c);
        for i in 0..=c.top_degree() {
            prop_assert_eq!(p.get(i + k), c.get(i));
        }
    }
}

fn lattices() -> Vec<Lattice> {
    let mut v = vec![Lattice::square(1), Lattice::square(2), Lattice::square(3)];
    for i in 0..6u64 {
        let mut rng = sample_rng(7, i);
        v.push(Lattice::random(1 + (i as usize % 3), &mut rng, 1e4));
    }
    v
}

#[test]
fn diagram_commutes_on_several_lattices() {
    for lat in lattices() {
        for r in 1..=3 {
            let opts = DiagramOptions { samples: 50, ..Default::default() };
            let rep = verify_nah_diagram(&lat, r, &opts).unwrap();
            assert!(rep.pass, "{rep:?}");
        }
    }
}

#[test]
fn perturbation_is_detected() {
    let opts = DiagramOptions { samples: 5, perturbation: 1e-3, ..Default::default() };
    let rep = verify_nah_diagram(&Lattice::square(2), 2, &opts).unwrap();
    assert!(!rep.pass);
    assert!(rep.worst_sample.is_some());
}

#[test]
fn neighborhood_of_infinity() {
    let opts = DiagramOptions { samples: 50, min_radius: Some(30.0), ..Default::default() };
    assert!(verify_nah_diagram(&Lattice::square(2), 3, &opts).unwrap().pass);
}

/// Roots of `s^2 + a s + b` and `s^3 + a s^2 + b s + c` by the closed formulas.
fn quadratic_roots(a: Complex64, b: Complex64) -> Vec<Complex64> {
    let d = (a * a - 4.0 * b).sqrt();
    vec![(-a + d) / 2.0, (-a - d) / 2.0]
}

fn cubic_roots(a: Complex64, b: Complex64, c: Complex64) -> Vec<Complex64> {
    // depressed cubic x^3 + p x + q with s = x − a/3, Cardano
    let p = b - a * a / 3.0;
    let q = 2.0 * a * a * a / 27.0 - a * b / 3.0 + c;
    let disc = (q * q / 4.0 + p * p * p / 27.0).sqrt();
    let mut u = (-q / 2.0 + disc).cbrt();
    if u.norm() < 1e-12 {
        u = (-q / 2.0 - disc).cbrt();
    }
    let omega = Complex64::from_polar(1.0, 2.0 * std::f64::consts::PI / 3.0);
    (0..3)
        .map(|k| {
            let uk = u * omega.powi(k);
            let x = if uk.norm() < 1e-12 { Complex64::new(0.0, 0.0) } else { uk - p / (3.0 * uk) };
            x - a / 3.0
        })
        .collect()
}

fn cplx_dist(a: &Complex64, b: &Complex64) -> f64 {
    (a - b).norm()
}

#[test]
fn g1_roots_recovered() {
    for i in 0..200u64 {
        let mut rng = sample_rng(11, i);
        for r in 2..=3 {
            let pts: Vec<Vec<Complex64>> = (0..r).map(|_| random_dolbeault_point(1, &mut rng).higgs).collect();
            let img = hitchin_embedding(&pts).unwrap();
            let coeff = |k: usize| img.char_poly_coefficient(k).get(&vec![k as u32]).copied().unwrap_or_default();
            let roots =
                if r == 2 { quadratic_roots(coeff(1), coeff(2)) } else { cubic_roots(coeff(1), coeff(2), coeff(3)) };
            let orig: Vec<Complex64> = pts.iter().map(|v| v[0]).collect();
            let d = multiset_distance(&orig, &roots, cplx_dist).unwrap();
            assert!(d < 1e-6, "sample {i} r={r}: {d}");
        }
    }
}

#[test]
fn sigma_degrees() {
    let pts: Vec<Vec<Complex64>> = (0..5u64).map(|i| random_dolbeault_point(2, &mut sample_rng(3, i)).higgs).collect();
    let img = hitchin_embedding(&pts).unwrap();
    assert_eq!(img.sigma.len(), 5);
    for (i, s) in img.sigma.iter().enumerate() {
        assert!(s.keys().all(|e| e.iter().sum::<u32>() == i as u32 + 1));
        assert_eq!(s.len(), i + 2); // monomials of degree i+1 in two variables
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn roundtrips(seed in any::<u64>(), g in 1usize..=3, r in 1usize..=4) {
        let lat = Lattice::random(g, &mut sample_rng(seed, 0), 1e4);
        let m = sample_betti_multiset(g, r, seed, 1, None);
        for z in &m.points {
            let p = betti_to_dolbeault(&lat, z).unwrap();
            let back = dolbeault_to_betti(&lat, &p).unwrap();
            for (a, b) in z.values.iter().zip(&back.values) {
                prop_assert!((a - b).norm() / a.norm() < 1e-9);
            }
        }
        let mut rng = sample_rng(seed, 2);
        let p = random_dolbeault_point(g, &mut rng);
        let back = betti_to_dolbeault(&lat, &dolbeault_to_betti(&lat, &p).unwrap()).unwrap();
        prop_assert!(max_abs_diff_complex(&p.higgs, &back.higgs) < 1e-9);
        prop_assert!(max_abs_diff_complex(&p.phases, &back.phases) < 1e-9);
    }

    #[test]
    fn scaling_equivariance(seed in any::<u64>(), g in 1usize..=3, r in 1usize..=4, re in -3.0f64..3.0, im in -3.0f64..3.0) {
        prop_assume!(re.abs() + im.abs() > 1e-3);
        let t = Complex64::new(re, im);
        let mut rng = sample_rng(seed, 0);
        let m = HiggsMultiset::new((0..r).map(|_| random_dolbeault_point(g, &mut rng)).collect());
        let lhs = hitchin_embedding(&spectral_data(&scale_higgs(&m, t))).unwrap();
        let base = hitchin_embedding(&spectral_data(&m)).unwrap();
        for (i, (a, b)) in lhs.sigma.iter().zip(&base.sigma).enumerate() {
            let ti = t.powu(i as u32 + 1);
            for (k, v) in b {
                let scale = 1.0 + v.norm() * ti.norm();
                prop_assert!((a[k] - v * ti).norm() / scale < 1e-10);
            }
        }
    }

    #[test]
    fn retraction_invariance(seed in any::<u64>(), g in 1usize..=3, r in 1usize..=4, c in 0.01f64..100.0) {
        let mut rng = sample_rng(seed, 0);
        let sd: Vec<Vec<Complex64>> = (0..r).map(|_| random_dolbeault_point(g, &mut rng).higgs).collect();
        let scaled: Vec<Vec<Complex64>> = sd.iter().map(|v| v.iter().map(|x| x * c).collect()).collect();
        let a = retract_to_sphere_quotient(&sd).unwrap();
        let b = retract_to_sphere_quotient(&scaled).unwrap();
        let d = multiset_distance(&a, &b, max_abs_diff_complex).unwrap();
        prop_assert!(d < 1e-12);
    }
}
