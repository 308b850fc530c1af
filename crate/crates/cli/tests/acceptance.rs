//! Acceptance suite: one PASS/FAIL line per criterion; exits nonzero if any fails.

use std::process::Command;
use std::time::{Duration, Instant};

use num_complex::Complex64;
use pw_core::filtration::{check_p_equals_w, closed_form_table, perverse_table, weight_table, BigradedTable};
use pw_core::hodge::{check_curious_duality, check_hodge_tate, mixed_hodge_polynomial, polynomial_to_table};
use pw_core::lefschetz::verify_hard_lefschetz;
use pw_core::nah::{
    hitchin_embedding, max_abs_diff_complex, multiset_distance, random_dolbeault_point, retract_to_sphere_quotient,
    sample_rng, scale_higgs, spectral_data, verify_nah_diagram, verify_roundtrip, DiagramOptions, HiggsMultiset,
    Lattice,
};
use pw_core::torsion::{
    ball_pair, cone_rp_pair, kunneth_pairs, manifold_obstruction, rational_sphere_check, remark_closed_form, FGAbGroup,
};
use pw_core::WordBound;
use rand::Rng;

const BOUND: WordBound = WordBound(24);

type Criterion = (u32, &'static str, Duration, fn() -> Outcome);

struct Outcome {
    pass: bool,
    detail: String,
}

fn ok(detail: impl Into<String>) -> Outcome {
    Outcome { pass: true, detail: detail.into() }
}

fn fail(detail: impl Into<String>) -> Outcome {
    Outcome { pass: false, detail: detail.into() }
}

/// All `(g, r)` with `2gr ≤ width`.
fn grid(width: u32) -> Vec<(u32, u32)> {
    let mut v = Vec::new();
    for g in 1..=width / 2 {
        for r in 1..=width / (2 * g) {
            v.push((g, r));
        }
    }
    v
}

fn c1_p_equals_w() -> Outcome {
    let cells = grid(16);
    for &(g, r) in &cells {
        let (p, w, c) = match (perverse_table(g, r, BOUND), weight_table(g, r, BOUND), closed_form_table(g, r)) {
            (Ok(p), Ok(w), Ok(c)) => (p, w, c),
            _ => return fail(format!("could not build tables for g={g} r={r}")),
        };
        let rep = check_p_equals_w(&p, &w, &c);
        if !rep.pass {
            return fail(format!("g={g} r={r}: {:?}", rep.first_mismatch));
        }
    }
    ok(format!("{} cells, exact equality", cells.len()))
}

fn c2_diagonal() -> Outcome {
    let expect = vec![1, 2, 2, 2, 1];
    let w = weight_table(1, 2, BOUND).unwrap().diagonal();
    let c = closed_form_table(1, 2).unwrap().diagonal();
    let h = polynomial_to_table(1, 2, &mixed_hodge_polynomial(1, 2).unwrap()).unwrap().diagonal();
    let out = Command::new(env!("CARGO_BIN_EXE_pw"))
        .args(["table", "--g", "1", "--r", "2", "--format", "json"])
        .output()
        .unwrap();
    let cli =
        serde_json::from_slice(&out.stdout).ok().and_then(|v| BigradedTable::from_json(&v).ok()).map(|t| t.diagonal());
    if w == expect && c == expect && h == expect && cli.as_ref() == Some(&expect) {
        ok("orbit count, generating function, cycle-type polynomial and CLI all give 1,2,2,2,1")
    } else {
        fail(format!("weight {w:?} closed form {c:?} polynomial {h:?} cli {cli:?}"))
    }
}

fn c3_curious_duality() -> Outcome {
    let cells = grid(16);
    for &(g, r) in &cells {
        let h = mixed_hodge_polynomial(g, r).unwrap();
        let rep = check_curious_duality(g, r, &h);
        if !rep.pass {
            return fail(format!("g={g} r={r}: first mismatch {:?}", rep.first_mismatch));
        }
        let ht = check_hodge_tate(&weight_table(g, r, BOUND).unwrap(), &h);
        if !ht.pass {
            return fail(format!("g={g} r={r}: {:?}", ht.first_violation));
        }
    }
    ok(format!("{} cells, exact Laurent identity, Hodge-Tate support", cells.len()))
}

fn c4_hard_lefschetz() -> Outcome {
    let cells = grid(12);
    let mut largest = 0;
    for &(g, r) in &cells {
        let rep = verify_hard_lefschetz(g, r, BOUND).unwrap();
        if !rep.pass {
            return fail(format!("g={g} r={r}: first failing k = {:?}", rep.first_failure));
        }
        largest = largest.max(rep.steps.iter().map(|s| s.source_dim).max().unwrap_or(0));
    }
    ok(format!("{} cells, exact ranks, largest source dimension {largest}", cells.len()))
}

fn c5_manifold() -> Outcome {
    for g in 1..=4u32 {
        for r in 2..=4u32 {
            let n = 2 * g * r - 1;
            let kunneth = kunneth_pairs(&ball_pair(n - 2 * g), &cone_rp_pair(2 * g - 1).unwrap());
            if !kunneth.same_groups(&remark_closed_form(g, r)) {
                return fail(format!(
                    "g={g} r={r}: Künneth differs from the closed form in degree {:?}",
                    kunneth.first_difference(&remark_closed_form(g, r))
                ));
            }
            let rep = manifold_obstruction(g, r).unwrap();
            if rep.is_obstructed != (g >= 2) || !rep.pass {
                return fail(format!("g={g} r={r}: obstructed = {}", rep.is_obstructed));
            }
        }
    }
    let t = kunneth_pairs(&ball_pair(3), &cone_rp_pair(3).unwrap());
    let nz: Vec<(u32, FGAbGroup)> = t.nonzero().map(|(i, g)| (i, g.clone())).collect();
    if nz != vec![(5, FGAbGroup::cyclic(2)), (7, FGAbGroup::free(1))] {
        return fail(format!("(2,2) local homology {nz:?}"));
    }
    ok("1<=g<=4, 2<=r<=4; (2,2): exactly Z/2 at 5 and Z at 7")
}

fn c6_rational_sphere() -> Outcome {
    let mut cells = grid(16);
    for g in 1..=4 {
        for r in 1..=4 {
            if !cells.contains(&(g, r)) {
                cells.push((g, r));
            }
        }
    }
    for &(g, r) in &cells {
        let rep = rational_sphere_check(g, r).unwrap();
        if !rep.pass {
            return fail(format!("g={g} r={r}: betti {:?}", rep.betti));
        }
    }
    ok(format!("{} cells, Q only in degrees 0 and 2gr-1", cells.len()))
}

fn c7_nah() -> Outcome {
    let mut worst = (0.0f64, 0.0f64, 0.0f64);
    let mut runs = 0;
    for g in 1..=3usize {
        let mut lattices = vec![Lattice::square(g)];
        for i in 0..10u64 {
            lattices.push(Lattice::random(g, &mut sample_rng(1000 + g as u64, i), 1e6));
        }
        for lat in &lattices {
            let opts = DiagramOptions { samples: 500, seed: 42, tolerance: 1e-9, ..Default::default() };
            let rt = verify_roundtrip(lat, &opts).unwrap();
            if !rt.pass {
                return fail(format!("roundtrip g={g}: {rt:?}"));
            }
            for r in 1..=4 {
                let rep = verify_nah_diagram(lat, r, &opts).unwrap();
                runs += 1;
                if !rep.pass {
                    return fail(format!("diagram g={g} r={r}: {rep:?}"));
                }
                worst.0 = worst.0.max(rep.diagram_residual);
                worst.1 = worst.1.max(rep.betti_roundtrip.max(rt.betti_roundtrip));
                worst.2 = worst.2.max(rep.dolbeault_roundtrip.max(rt.dolbeault_roundtrip));
            }
        }
    }
    ok(format!(
        "{runs} runs x 500 samples; max diagram residual {:.1e}, roundtrips {:.1e} / {:.1e}",
        worst.0, worst.1, worst.2
    ))
}

fn c8_spectral() -> Outcome {
    // G_m-equivariance of sd and of the σ_i
    for i in 0..200u64 {
        let mut rng = sample_rng(8, i);
        let (g, r) = (rng.random_range(1..=3usize), rng.random_range(1..=4usize));
        let m = HiggsMultiset::new((0..r).map(|_| random_dolbeault_point(g, &mut rng)).collect());
        let t = Complex64::new(rng.random_range(-3.0..3.0), rng.random_range(-3.0..3.0));
        let lhs = spectral_data(&scale_higgs(&m, t));
        let rhs: Vec<Vec<Complex64>> = spectral_data(&m).iter().map(|v| v.iter().map(|x| x * t).collect()).collect();
        for (a, b) in lhs.iter().flatten().zip(rhs.iter().flatten()) {
            if (a - b).norm() > 1e-12 * (1.0 + b.norm()) {
                return fail(format!("G_m-equivariance sample {i}"));
            }
        }
    }
    // retraction: scale and permutation invariance
    for i in 0..200u64 {
        let mut rng = sample_rng(9, i);
        let (g, r) = (rng.random_range(1..=3usize), rng.random_range(1..=4usize));
        let sd: Vec<Vec<Complex64>> = (0..r).map(|_| random_dolbeault_point(g, &mut rng).higgs).collect();
        let base = retract_to_sphere_quotient(&sd).unwrap();
        for t in [0.5, 2.0, 10.0] {
            let scaled: Vec<Vec<Complex64>> = sd.iter().map(|v| v.iter().map(|x| x * t).collect()).collect();
            let mut other = retract_to_sphere_quotient(&scaled).unwrap();
            other.reverse();
            let d = multiset_distance(&base, &other, max_abs_diff_complex).unwrap();
            if d > 1e-12 {
                return fail(format!("retraction sample {i}, t={t}: {d:e}"));
            }
        }
    }
    // injectivity on random distinct pairs
    let mut min_sep = f64::INFINITY;
    for i in 0..1000u64 {
        let mut rng = sample_rng(10, i);
        let (g, r) = (rng.random_range(1..=3usize), rng.random_range(1..=4usize));
        let x: Vec<Vec<Complex64>> = (0..r).map(|_| random_dolbeault_point(g, &mut rng).higgs).collect();
        let y: Vec<Vec<Complex64>> = (0..r).map(|_| random_dolbeault_point(g, &mut rng).higgs).collect();
        let sep = hitchin_embedding(&x).unwrap().distance(&hitchin_embedding(&y).unwrap());
        min_sep = min_sep.min(sep);
    }
    if min_sep <= 1e-6 {
        return fail(format!("injectivity separation {min_sep:e}"));
    }
    // worked value
    let img = hitchin_embedding(&[vec![Complex64::new(2.0, 0.0)], vec![Complex64::new(3.0, 0.0)]]).unwrap();
    let s1 = img.sigma[0].get(&vec![1]).copied();
    let s2 = img.sigma[1].get(&vec![2]).copied();
    if s1 != Some(Complex64::new(5.0, 0.0)) || s2 != Some(Complex64::new(6.0, 0.0)) {
        return fail(format!("sigma for {{2, 3}}: {s1:?}, {s2:?}"));
    }
    ok(format!("equivariance, retraction invariance, min separation {min_sep:.2e}, sigma = (5, 6)"))
}

fn c9_failure_detection() -> Outcome {
    let cases: &[(&[&str], &str)] = &[
        (&["verify", "p-equals-w"], "first mismatch at (k=0, j=1)"),
        (&["verify", "curious-duality"], "first mismatch at q^0 t^1"),
        (&["verify", "hodge-tate"], "first violation: graded piece Gr^W_0 H^1"),
        (&["verify", "hard-lefschetz"], "not an isomorphism"),
        (&["verify", "manifold"], "witness: i=0: Z/2"),
        (&["verify", "rational-sphere"], "b_1=1"),
        (&["nah", "diagram"], "worst sample"),
        (&["nah", "roundtrip"], "worst sample"),
    ];
    for (cmd, marker) in cases {
        let size: &[&str] =
            if cmd[0] == "nah" { &["--g", "2", "--r", "2", "--samples", "20"] } else { &["--g", "2", "--r", "2"] };
        let run = |fault: bool| {
            let mut c = Command::new(env!("CARGO_BIN_EXE_pw"));
            c.args(*cmd).args(size).env_remove("PW_MAX_WORD_BITS");
            if fault {
                c.arg("--inject-fault");
            }
            c.output().unwrap()
        };
        let clean = run(false);
        let faulty = run(true);
        let text = String::from_utf8_lossy(&faulty.stdout);
        if clean.status.code() != Some(0) {
            return fail(format!("{} exits {:?} without the fault", cmd.join(" "), clean.status.code()));
        }
        if faulty.status.code() != Some(1) || !text.contains(marker) {
            return fail(format!(
                "{} with the fault: exit {:?}, output lacks {marker:?}",
                cmd.join(" "),
                faulty.status.code()
            ));
        }
    }
    ok(format!("{} subcommands exit 1 with a localized counterexample", cases.len()))
}

fn main() {
    // libtest passes flags like --nocapture or a filter; a filter that names no criterion skips the suite
    let filter: Vec<String> = std::env::args().skip(1).filter(|a| !a.starts_with('-')).collect();
    if !filter.is_empty() && !filter.iter().any(|f| "acceptance".contains(f.as_str()) || f.starts_with("criterion")) {
        return;
    }
    let criteria: [Criterion; 9] = [
        (1, "P=W tables agree for 2gr <= 16", Duration::from_secs(60), c1_p_equals_w),
        (2, "g=1 r=2 diagonal is 1,2,2,2,1", Duration::MAX, c2_diagonal),
        (3, "curious Poincare duality and Hodge-Tate", Duration::from_secs(5), c3_curious_duality),
        (4, "curious hard Lefschetz for 2gr <= 12", Duration::from_secs(300), c4_hard_lefschetz),
        (5, "manifold obstruction", Duration::MAX, c5_manifold),
        (6, "rational homology sphere", Duration::MAX, c6_rational_sphere),
        (7, "NAH diagram and roundtrips", Duration::from_secs(30), c7_nah),
        (8, "spectral-data properties", Duration::MAX, c8_spectral),
        (9, "failure detection", Duration::MAX, c9_failure_detection),
    ];
    let mut failures = 0;
    for (n, name, budget, check) in criteria {
        let start = Instant::now();
        let mut out = check();
        let elapsed = start.elapsed();
        if elapsed > budget {
            out = fail(format!("{} (took {elapsed:.1?}, budget {budget:?})", out.detail));
        }
        println!(
            "criterion {n} [PRIMARY] {name}: {} ({}; {:.2?})",
            if out.pass { "PASS" } else { "FAIL" },
            out.detail,
            elapsed
        );
        failures += usize::from(!out.pass);
    }
    println!("acceptance: {}/9 criteria pass", 9 - failures);
    if failures > 0 {
        std::process::exit(1);
    }
}
