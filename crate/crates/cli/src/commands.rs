use std::fmt::Write as _;

use num_complex::Complex64;
use pw_core::filtration::{check_p_equals_w, closed_form_table, perverse_table, weight_table, BigradedTable};
use pw_core::hodge::{
    check_curious_duality, check_hodge_tate, mixed_hodge_polynomial, mixed_hodge_polynomial_minus_convention,
};
use pw_core::lefschetz::{hyperplane_class, hyperplane_class_weighted, LefschetzOperator};
use pw_core::nah::{
    hitchin_embedding, retract_to_sphere_quotient, verify_nah_diagram, verify_roundtrip, DiagramOptions, Lattice,
    SymPoly,
};
use pw_core::torsion::{
    ball_pair, check_manifold, check_rational_sphere, local_homology, manifold_obstruction, rational_sphere_check,
    FGAbGroup, PairHomologyTable,
};
use pw_core::{PwError, WordBound};
use serde::Serialize;
use serde_json::{json, Value};

use crate::input::{parse_points, read_lattice};
use crate::{CliError, Convention, Format, GridArgs, NahArgs, PointsArgs, SideArg, VerifyArgs};

type Res = Result<bool, CliError>;

// Write errors (a closed pipe) are ignored so the verdict and exit status survive `| head`.
macro_rules! out {
    ($($t:tt)*) => {{
        use std::io::Write as _;
        let _ = write!(std::io::stdout(), $($t)*);
    }};
}

macro_rules! outln {
    ($($t:tt)*) => {{
        use std::io::Write as _;
        let _ = writeln!(std::io::stdout(), $($t)*);
    }};
}

/// Size of the deliberate perturbation in the NAH fault fixture.
const NAH_FAULT: f64 = 1e-3;

/// Run `f` on every cell in parallel; results come back in cell order.
fn par_cells<T, F>(cells: &[(u32, u32)], f: F) -> Result<Vec<T>, PwError>
where
    T: Send,
    F: Fn(u32, u32) -> Result<T, PwError> + Sync,
{
    let f = &f;
    std::thread::scope(|s| {
        let handles: Vec<_> = cells.iter().map(|&(g, r)| s.spawn(move || f(g, r))).collect();
        handles.into_iter().map(|h| h.join().expect("worker thread panicked")).collect()
    })
}

fn print_json(values: Vec<Value>, as_list: bool) {
    let v = if as_list || values.len() != 1 { Value::Array(values) } else { values.into_iter().next().unwrap() };
    outln!("{}", serde_json::to_string_pretty(&v).expect("json"));
}

fn to_value<T: Serialize>(x: &T) -> Value {
    serde_json::to_value(x).expect("report serializes")
}

fn reject_csv(fmt: Format, what: &str) -> Result<(), CliError> {
    if fmt == Format::Csv {
        return Err(PwError::Usage(format!("CSV output is only available for tables, not for {what}")).into());
    }
    Ok(())
}

fn write_csv<'a>(tables: impl IntoIterator<Item = &'a BigradedTable>) -> Result<(), CliError> {
    let mut w = csv::Writer::from_writer(std::io::stdout());
    let io = |e: csv::Error| CliError::Io(e.to_string());
    w.write_record(["g", "r", "side", "k", "j", "dim"]).map_err(io)?;
    for t in tables {
        for e in t.entries() {
            w.write_record([
                t.g.to_string(),
                t.r.to_string(),
                t.side.to_string(),
                e.k.to_string(),
                e.j.to_string(),
                e.dim.to_string(),
            ])
            .map_err(io)?;
        }
    }
    w.flush().map_err(|e| CliError::Io(e.to_string()))
}

fn verdict(pass: bool) -> &'static str {
    if pass {
        "PASS"
    } else {
        "FAIL"
    }
}

fn summary(kind: &str, passes: &[bool]) {
    let n = passes.iter().filter(|&&p| p).count();
    outln!("{kind}: {n}/{} cells pass", passes.len());
}

fn build_table(g: u32, r: u32, side: SideArg, bound: WordBound) -> Result<BigradedTable, PwError> {
    match side {
        SideArg::Dolbeault => perverse_table(g, r, bound),
        SideArg::Betti => weight_table(g, r, bound),
        SideArg::ClosedForm => closed_form_table(g, r),
    }
}

pub fn table(grid: &GridArgs, side: SideArg, fmt: Format, bound: WordBound) -> Res {
    let cells = grid.cells(bound)?;
    let tables = par_cells(&cells, |g, r| build_table(g, r, side, bound))?;
    match fmt {
        Format::Text => {
            let texts: Vec<String> = tables.iter().map(BigradedTable::to_text).collect();
            out!("{}", texts.join("\n"));
        }
        Format::Json => print_json(tables.iter().map(BigradedTable::to_json).collect(), grid.is_grid()),
        Format::Csv => write_csv(&tables)?,
    }
    Ok(true)
}

pub fn hodge_poly(grid: &GridArgs, convention: Convention, fmt: Format, bound: WordBound) -> Res {
    reject_csv(fmt, "hodge-poly")?;
    let cells = grid.cells(bound)?;
    let polys = par_cells(&cells, |g, r| match convention {
        Convention::Plus => mixed_hodge_polynomial(g, r),
        Convention::Minus => mixed_hodge_polynomial_minus_convention(g, r),
    })?;
    let name = match convention {
        Convention::Plus => "plus",
        Convention::Minus => "minus",
    };
    match fmt {
        Format::Json => print_json(
            cells
                .iter()
                .zip(&polys)
                .map(|(&(g, r), h)| json!({"g": g, "r": r, "convention": name, "polynomial": h.to_json()}))
                .collect(),
            grid.is_grid(),
        ),
        _ => {
            for (&(g, r), h) in cells.iter().zip(&polys) {
                outln!("H(q,t) for g={g}, r={r}: {h}");
            }
        }
    }
    Ok(true)
}

pub fn p_equals_w(a: &VerifyArgs, fmt: Format, bound: WordBound) -> Res {
    let cells = a.grid.cells(bound)?;
    let out = par_cells(&cells, |g, r| {
        let p = perverse_table(g, r, bound)?;
        let mut w = weight_table(g, r, bound)?;
        let c = closed_form_table(g, r)?;
        if a.inject_fault {
            w.add(0, 1, 1);
        }
        Ok((check_p_equals_w(&p, &w, &c), [p, w, c]))
    })?;
    let passes: Vec<bool> = out.iter().map(|(rep, _)| rep.pass).collect();
    match fmt {
        Format::Json => print_json(out.iter().map(|(rep, _)| to_value(rep)).collect(), a.grid.is_grid()),
        Format::Csv => write_csv(out.iter().flat_map(|(_, t)| t.iter()))?,
        Format::Text => {
            for (rep, [_, w, _]) in &out {
                let diag: Vec<String> = w.diagonal().iter().map(u64::to_string).collect();
                outln!("[{}] P=W g={} r={}: {}", verdict(rep.pass), rep.g, rep.r, rep.claim);
                outln!("  betti numbers: {}", diag.join(" "));
                outln!(
                    "  closed form agrees: {}; odd weights add nothing: {}",
                    rep.closed_form_agrees,
                    rep.odd_weights_empty
                );
                if let Some(m) = &rep.first_mismatch {
                    outln!(
                        "  first mismatch at (k={}, j={}): {}={} {}={}",
                        m.k,
                        m.j,
                        m.left_side,
                        m.left,
                        m.right_side,
                        m.right
                    );
                }
            }
            summary("p-equals-w", &passes);
        }
    }
    Ok(passes.iter().all(|&p| p))
}

pub fn curious_duality(a: &VerifyArgs, fmt: Format, bound: WordBound) -> Res {
    reject_csv(fmt, "curious-duality")?;
    let cells = a.grid.cells(bound)?;
    let reps = par_cells(&cells, |g, r| {
        let mut h = mixed_hodge_polynomial(g, r)?;
        if a.inject_fault {
            // q^0 t^1 is never a fixed point of the duality
            h.add_term(0, 1, 1);
        }
        Ok(check_curious_duality(g, r, &h))
    })?;
    let passes: Vec<bool> = reps.iter().map(|x| x.pass).collect();
    if fmt == Format::Json {
        print_json(reps.iter().map(to_value).collect(), a.grid.is_grid());
    } else {
        for rep in &reps {
            outln!("[{}] curious duality g={} r={}: {}", verdict(rep.pass), rep.g, rep.r, rep.claim);
            outln!("  H(q,t) = {}", rep.polynomial);
            if let Some((qe, te, x, y)) = rep.first_mismatch {
                outln!("  transformed = {}", rep.transformed);
                outln!("  first mismatch at q^{qe} t^{te}: H has {x}, transform has {y}");
            }
        }
        summary("curious-duality", &passes);
    }
    Ok(passes.iter().all(|&p| p))
}

pub fn hodge_tate(a: &VerifyArgs, fmt: Format, bound: WordBound) -> Res {
    reject_csv(fmt, "hodge-tate")?;
    let cells = a.grid.cells(bound)?;
    let reps = par_cells(&cells, |g, r| {
        let mut w = weight_table(g, r, bound)?;
        if a.inject_fault {
            w.add(0, 1, 1);
        }
        Ok(check_hodge_tate(&w, &mixed_hodge_polynomial(g, r)?))
    })?;
    let passes: Vec<bool> = reps.iter().map(|x| x.pass).collect();
    if fmt == Format::Json {
        print_json(reps.iter().map(to_value).collect(), a.grid.is_grid());
    } else {
        for rep in &reps {
            outln!(
                "[{}] Hodge-Tate g={} r={}: {} ({} graded pieces)",
                verdict(rep.pass),
                rep.g,
                rep.r,
                rep.claim,
                rep.pieces
            );
            if let Some(v) = &rep.first_violation {
                outln!("  first violation: {v}");
            }
        }
        summary("hodge-tate", &passes);
    }
    Ok(passes.iter().all(|&p| p))
}

pub fn hard_lefschetz(a: &VerifyArgs, weights: Option<&[i64]>, fmt: Format, bound: WordBound) -> Res {
    reject_csv(fmt, "hard-lefschetz")?;
    if weights.is_some_and(|w| w.iter().any(|&c| c <= 0)) {
        return Err(PwError::Usage("--weights must be positive integers".into()).into());
    }
    let cells = a.grid.cells(bound)?;
    let reps = par_cells(&cells, |g, r| {
        let class = match weights {
            Some(w) => hyperplane_class_weighted(g, r, w)?,
            None => hyperplane_class(g, r)?,
        };
        let mut op = LefschetzOperator::with_class(class, bound)?;
        if a.inject_fault {
            op.kill_column(g * r - 1, 0);
        }
        Ok(op.verify())
    })?;
    let passes: Vec<bool> = reps.iter().map(|x| x.pass).collect();
    if fmt == Format::Json {
        print_json(reps.iter().map(to_value).collect(), a.grid.is_grid());
    } else {
        for rep in &reps {
            outln!("[{}] hard Lefschetz g={} r={}: {}", verdict(rep.pass), rep.g, rep.r, rep.claim);
            let gr = rep.g * rep.r;
            for s in &rep.steps {
                let method =
                    serde_json::to_value(s.method).ok().and_then(|v| v.as_str().map(str::to_owned)).unwrap_or_default();
                outln!(
                    "  k={:<2} L^k: H^{} -> H^{}  dims {} -> {}  rank {}  ({method}){}",
                    s.k,
                    gr - s.k,
                    gr + s.k,
                    s.source_dim,
                    s.target_dim,
                    s.rank,
                    if s.pass { "" } else { "  <- not an isomorphism" }
                );
            }
        }
        summary("hard-lefschetz", &passes);
    }
    Ok(passes.iter().all(|&p| p))
}

fn indent_table(t: &PairHomologyTable) -> String {
    let mut s = String::new();
    for (i, grp) in t.nonzero() {
        let _ = writeln!(s, "    {i}: {grp}");
    }
    if s.is_empty() {
        s.push_str("    (all zero)\n");
    }
    s
}

pub fn manifold(a: &VerifyArgs, fmt: Format, bound: WordBound) -> Res {
    reject_csv(fmt, "manifold")?;
    let cells = a.grid.cells(bound)?;
    let out = par_cells(&cells, |g, r| {
        let n = 2 * g * r - 1;
        if a.inject_fault {
            let mut local = if r >= 2 { local_homology(g, r)? } else { ball_pair(n) };
            local.set(0, local.get(0).direct_sum(&FGAbGroup::cyclic(2)));
            return Ok((check_manifold(g, r, &local), local));
        }
        let rep = manifold_obstruction(g, r)?;
        let local = if r >= 2 { local_homology(g, r)? } else { ball_pair(n) };
        Ok((rep, local))
    })?;
    let passes: Vec<bool> = out.iter().map(|(x, _)| x.pass).collect();
    if fmt == Format::Json {
        print_json(out.iter().map(|(x, _)| to_value(x)).collect(), a.grid.is_grid());
    } else {
        for (rep, local) in &out {
            let conclusion = if rep.vacuous {
                format!("vacuous: S_1 acts trivially and the quotient is S^{}", rep.n)
            } else if rep.is_obstructed {
                "not a manifold".to_string()
            } else {
                "local homology at Z/2 points agrees with a manifold".to_string()
            };
            let k = rep.k.map_or("-".into(), |k| k.to_string());
            outln!("[{}] manifold g={} r={}: N={}, k={k}: {conclusion}", verdict(rep.pass), rep.g, rep.r, rep.n);
            outln!("  claim: {}", rep.claim);
            out!("  local homology H_i at a Z/2-stabilizer point:\n{}", indent_table(local));
            out!("  manifold model H_i(B^N, B^N - 0):\n{}", indent_table(&ball_pair(rep.n)));
            for (i, grp) in &rep.witnesses {
                outln!("  witness: i={i}: {grp}");
            }
            if !rep.matches_closed_form {
                outln!("  local homology differs from the closed form");
            }
        }
        summary("manifold", &passes);
    }
    Ok(passes.iter().all(|&p| p))
}

pub fn rational_sphere(a: &VerifyArgs, fmt: Format, bound: WordBound) -> Res {
    reject_csv(fmt, "rational-sphere")?;
    let cells = a.grid.cells(bound)?;
    let reps = par_cells(&cells, |g, r| {
        let rep = rational_sphere_check(g, r)?;
        if !a.inject_fault {
            return Ok(rep);
        }
        let mut betti = rep.betti.clone();
        betti.push((1, 1));
        betti.sort_unstable();
        Ok(check_rational_sphere(g, r, betti, rep.determinant_one))
    })?;
    let passes: Vec<bool> = reps.iter().map(|x| x.pass).collect();
    if fmt == Format::Json {
        print_json(reps.iter().map(to_value).collect(), a.grid.is_grid());
    } else {
        for rep in &reps {
            let betti: Vec<String> = rep.betti.iter().map(|(i, b)| format!("b_{i}={b}")).collect();
            outln!("[{}] rational sphere g={} r={}: N={}: {}", verdict(rep.pass), rep.g, rep.r, rep.n, rep.claim);
            outln!("  rational Betti numbers: {}; all determinants one: {}", betti.join(", "), rep.determinant_one);
        }
        summary("rational-sphere", &passes);
    }
    Ok(passes.iter().all(|&p| p))
}

fn nah_setup(a: &NahArgs) -> Result<(Lattice, DiagramOptions), CliError> {
    let lat = match (&a.lattice, a.g) {
        (Some(path), g) => {
            let lat = read_lattice(path)?;
            if g.is_some_and(|g| g as usize != lat.g()) {
                return Err(PwError::Usage(format!("--g does not match the lattice file (g={})", lat.g())).into());
            }
            lat
        }
        (None, Some(g)) => Lattice::square(g as usize),
        (None, None) => return Err(PwError::Usage("give --g or --lattice".into()).into()),
    };
    if !(a.tolerance > 0.0 && a.tolerance.is_finite()) {
        return Err(PwError::Usage("--tolerance must be a positive number".into()).into());
    }
    if a.samples == 0 {
        return Err(PwError::Usage("--samples must be at least 1".into()).into());
    }
    if a.min_radius.is_some_and(|x| !(x > 0.0 && x.is_finite())) {
        return Err(PwError::Usage("--min-radius must be a positive number".into()).into());
    }
    let opts = DiagramOptions {
        samples: a.samples,
        seed: a.seed,
        tolerance: a.tolerance,
        min_radius: a.min_radius,
        perturbation: if a.inject_fault { NAH_FAULT } else { 0.0 },
    };
    Ok((lat, opts))
}

pub fn nah_roundtrip(a: &NahArgs, fmt: Format) -> Res {
    reject_csv(fmt, "nah roundtrip")?;
    let (lat, opts) = nah_setup(a)?;
    let rep = verify_roundtrip(&lat, &opts)?;
    if fmt == Format::Json {
        print_json(vec![to_value(&rep)], false);
    } else {
        outln!("[{}] NAH roundtrip g={}: {}", verdict(rep.pass), rep.g, rep.claim);
        outln!("  samples {} seed {} tolerance {:e}", rep.samples, rep.seed, rep.tolerance);
        outln!("  betti -> dolbeault -> betti: {:.3e}", rep.betti_roundtrip);
        outln!("  dolbeault -> betti -> dolbeault: {:.3e}", rep.dolbeault_roundtrip);
        if let Some((s, e)) = rep.worst_sample {
            outln!("  worst sample: #{s} with error {e:.3e}");
        }
    }
    Ok(rep.pass)
}

pub fn nah_diagram(a: &NahArgs, fmt: Format) -> Res {
    reject_csv(fmt, "nah diagram")?;
    let (lat, opts) = nah_setup(a)?;
    let rep = verify_nah_diagram(&lat, a.r as usize, &opts)?;
    if fmt == Format::Json {
        print_json(vec![to_value(&rep)], false);
    } else {
        outln!("[{}] NAH diagram g={} r={}: {}", verdict(rep.pass), rep.g, rep.r, rep.claim);
        let radius = rep.min_radius.map_or("none".into(), |x| x.to_string());
        outln!("  samples {} seed {} min radius {radius} tolerance {:e}", rep.samples, rep.seed, rep.tolerance);
        outln!("  diagram residual: {:.3e}", rep.diagram_residual);
        outln!("  roundtrips: betti {:.3e}, dolbeault {:.3e}", rep.betti_roundtrip, rep.dolbeault_roundtrip);
        if let Some((s, e)) = rep.worst_sample {
            outln!("  worst sample: #{s} with residual {e:.3e}");
        }
    }
    Ok(rep.pass)
}

fn fmt_complex(c: Complex64) -> String {
    if c.im == 0.0 {
        format!("{}", c.re)
    } else if c.re == 0.0 {
        format!("{}i", c.im)
    } else {
        format!("({}{:+}i)", c.re, c.im)
    }
}

fn fmt_sympoly(p: &SymPoly) -> String {
    let terms: Vec<String> = p
        .iter()
        .filter(|(_, c)| c.norm() != 0.0)
        .map(|(e, c)| {
            let mut s = fmt_complex(*c);
            for (k, &d) in e.iter().enumerate() {
                match d {
                    0 => {}
                    1 => s.push_str(&format!("*y{}", k + 1)),
                    _ => s.push_str(&format!("*y{}^{d}", k + 1)),
                }
            }
            s
        })
        .collect();
    if terms.is_empty() {
        "0".into()
    } else {
        terms.join(" + ")
    }
}

pub fn sd_embed(a: &PointsArgs, fmt: Format) -> Res {
    reject_csv(fmt, "sd embed")?;
    let pts = parse_points(&a.points)?;
    let img = hitchin_embedding(&pts)?;
    if fmt == Format::Json {
        let sigma: Vec<Value> = img
            .sigma
            .iter()
            .map(|p| p.iter().map(|(e, c)| json!({"exponents": e, "re": c.re, "im": c.im})).collect())
            .collect();
        print_json(vec![json!({"g": img.g, "r": pts.len(), "sigma": sigma})], false);
    } else {
        outln!("g={} r={}", img.g, pts.len());
        for (i, p) in img.sigma.iter().enumerate() {
            outln!("sigma_{} = {}", i + 1, fmt_sympoly(p));
        }
    }
    Ok(true)
}

pub fn sd_retract(a: &PointsArgs, fmt: Format) -> Res {
    reject_csv(fmt, "sd retract")?;
    let pts = parse_points(&a.points)?;
    let out = retract_to_sphere_quotient(&pts)?;
    if fmt == Format::Json {
        let v: Vec<Vec<[f64; 2]>> = out.iter().map(|v| v.iter().map(|c| [c.re, c.im]).collect()).collect();
        print_json(vec![json!({"points": v})], false);
    } else {
        for v in &out {
            let cs: Vec<String> = v.iter().map(|&c| fmt_complex(c)).collect();
            outln!("({})", cs.join(", "));
        }
    }
    Ok(true)
}
