use std::path::Path;

use num_complex::Complex64;
use pw_core::nah::{Lattice, LatticeJson};
use pw_core::PwError;
use serde_json::Value;

use crate::CliError;

pub fn read_lattice(path: &Path) -> Result<Lattice, CliError> {
    let text = std::fs::read_to_string(path).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))?;
    let json: LatticeJson =
        serde_json::from_str(&text).map_err(|e| PwError::Lattice(format!("{}: {e}", path.display())))?;
    Ok(Lattice::from_json(&json)?)
}

fn complex(v: &Value) -> Option<Complex64> {
    match v {
        Value::Number(n) => Some(Complex64::new(n.as_f64()?, 0.0)),
        Value::Array(a) if a.len() == 2 => Some(Complex64::new(a[0].as_f64()?, a[1].as_f64()?)),
        _ => None,
    }
}

/// `[[λ_11, …, λ_1g], …]` with each entry a number or `[re, im]`.
pub fn parse_points(s: &str) -> Result<Vec<Vec<Complex64>>, PwError> {
    let bad =
        || PwError::Usage(format!("--points must be a JSON list of vectors of numbers or [re, im] pairs, got {s:?}"));
    let v: Value = serde_json::from_str(s).map_err(|_| bad())?;
    let rows = v.as_array().ok_or_else(bad)?;
    let pts: Vec<Vec<Complex64>> = rows
        .iter()
        .map(|row| row.as_array().ok_or_else(bad)?.iter().map(|x| complex(x).ok_or_else(bad)).collect())
        .collect::<Result<_, _>>()?;
    if pts.is_empty() || pts[0].is_empty() || pts.iter().any(|p| p.len() != pts[0].len()) {
        return Err(bad());
    }
    Ok(pts)
}
