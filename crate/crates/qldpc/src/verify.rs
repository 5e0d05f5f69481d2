//! Checks run on serialized matrices, re-read from disk.
//!
//! Orthogonality is recomputed row pair by row pair with inner products, not
//! with the matrix products the samplers use.

use std::fmt;
use std::path::Path;

use qldpc_core::gf2::rank;
use qldpc_core::BitMatrix;

use crate::formats::{read_file, FormatError};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Check {
    pub name: String,
    pub passed: bool,
    pub detail: String,
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Verification {
    pub checks: Vec<Check>,
}

impl Verification {
    fn push(&mut self, name: &str, passed: bool, detail: impl Into<String>) {
        self.checks.push(Check {
            name: name.to_string(),
            passed,
            detail: detail.into(),
        });
    }

    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }
}

impl fmt::Display for Verification {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for c in &self.checks {
            writeln!(f, "  {:<22} {}  {}", c.name, if c.passed { "ok" } else { "FAILED" }, c.detail)?;
        }
        write!(f, "verification: {}", if self.passed() { "pass" } else { "FAIL" })
    }
}

/// Pairs `(i, j)` with `<a_i, b_j> = 1`.
fn nonzero_inner_products(a: &BitMatrix, b: &BitMatrix) -> Vec<(usize, usize)> {
    let mut out = Vec::new();
    for (i, x) in a.iter_rows().enumerate() {
        for (j, y) in b.iter_rows().enumerate() {
            if x.dot(&y).expect("equal lengths") {
                out.push((i, j));
            }
        }
    }
    out
}

fn describe(pairs: &[(usize, usize)]) -> String {
    match pairs.first() {
        None => "all inner products vanish".into(),
        Some((i, j)) => format!("{} nonzero inner products, first at rows ({i}, {j})", pairs.len()),
    }
}

fn shape_and_weights(out: &mut Verification, h: &BitMatrix, name: &str, rows: usize, cols: usize, weight: Option<usize>) {
    out.push(
        &format!("{name} shape"),
        h.shape() == (rows, cols),
        format!("{} x {}", h.rows(), h.cols()),
    );
    if let Some(v) = weight {
        let bad = h.row_weights().iter().filter(|&&x| x != v).count();
        out.push(&format!("{name} row weights"), bad == 0, format!("{bad} rows differ from {v}"));
    }
    let rk = rank(h);
    out.push(&format!("{name} rank"), rk == h.rows(), format!("{rk}"));
}

/// `H·Hᵀ = 0`, shape `r × n`, full rank and, when given, every row of weight `v`.
pub fn dual_containing(h: &BitMatrix, r: usize, n: usize, v: Option<usize>) -> Verification {
    let mut out = Verification::default();
    shape_and_weights(&mut out, h, "H", r, n, v);
    let pairs = nonzero_inner_products(h, h);
    out.push("H H^T = 0", pairs.is_empty(), describe(&pairs));
    out
}

pub fn css(h1: &BitMatrix, h2: &BitMatrix, w: usize, v: usize) -> Verification {
    let mut out = Verification::default();
    let n = h2.cols();
    shape_and_weights(&mut out, h1, "H1", h1.rows(), n, Some(w));
    shape_and_weights(&mut out, h2, "H2", h2.rows(), n, Some(v));
    if h1.cols() == n {
        let pairs = nonzero_inner_products(h1, h2);
        out.push("H1 H2^T = 0", pairs.is_empty(), describe(&pairs));
    }
    out
}

/// `a_i·b_jᵀ + b_i·a_jᵀ = 0` for every pair of rows, plus independence of the
/// combined rows `(a_i | b_i)` and their total weight.
pub fn stabilizer(h_x: &BitMatrix, h_z: &BitMatrix, v: usize) -> Verification {
    let mut out = Verification::default();
    let same_shape = h_x.shape() == h_z.shape();
    out.push("HX/HZ shapes", same_shape, format!("{:?} and {:?}", h_x.shape(), h_z.shape()));
    if !same_shape {
        return out;
    }
    let combined = h_x.hstack(h_z).expect("equal row counts");
    shape_and_weights(&mut out, &combined, "(HX|HZ)", h_x.rows(), 2 * h_x.cols(), Some(v));
    let mut bad = Vec::new();
    let (xs, zs): (Vec<_>, Vec<_>) = (h_x.iter_rows().collect(), h_z.iter_rows().collect());
    for i in 0..xs.len() {
        for j in 0..xs.len() {
            let s = xs[i].dot(&zs[j]).unwrap() ^ zs[i].dot(&xs[j]).unwrap();
            if s {
                bad.push((i, j));
            }
        }
    }
    out.push("HX HZ^T + HZ HX^T = 0", bad.is_empty(), describe(&bad));
    out
}

pub fn dual_containing_file(path: &Path, r: usize, n: usize, v: Option<usize>) -> Result<Verification, FormatError> {
    Ok(dual_containing(&read_file(path)?.matrix, r, n, v))
}

pub fn css_files(h1: &Path, h2: &Path, w: usize, v: usize) -> Result<Verification, FormatError> {
    Ok(css(&read_file(h1)?.matrix, &read_file(h2)?.matrix, w, v))
}

pub fn stabilizer_files(h_x: &Path, h_z: &Path, v: usize) -> Result<Verification, FormatError> {
    Ok(stabilizer(&read_file(h_x)?.matrix, &read_file(h_z)?.matrix, v))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn m(s: &str) -> BitMatrix {
        s.parse().unwrap()
    }

    #[test]
    fn dual_containing_checks() {
        assert!(dual_containing(&m("1111 1100"), 2, 4, None).passed());
        assert!(dual_containing(&m("1111 1100"), 2, 4, Some(4)).checks.iter().any(|c| !c.passed));
        let v = dual_containing(&m("1100 0110"), 2, 4, Some(2));
        assert!(!v.passed());
        assert!(v.to_string().contains("first at rows (0, 1)"));
        // dependent rows
        assert!(!dual_containing(&m("1111 1111"), 2, 4, Some(4)).passed());
    }

    #[test]
    fn css_checks() {
        assert!(css(&m("1100"), &m("1111"), 2, 4).passed());
        assert!(!css(&m("1000"), &m("1111"), 1, 4).passed());
        assert!(css(&BitMatrix::zeros(0, 4), &m("1111"), 2, 4).passed());
    }

    #[test]
    fn stabilizer_checks() {
        // XX and ZZ on two qubits commute
        assert!(stabilizer(&m("11 00"), &m("00 11"), 2).passed());
        // X and Z on one qubit do not
        assert!(!stabilizer(&m("10 00"), &m("00 10"), 1).passed());
    }
}
