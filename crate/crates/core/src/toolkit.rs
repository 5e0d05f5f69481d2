//! Column pruning and weight statistics for check matrices.
//!
//! Sampled matrices can contain columns of weight 0 or 1. A zero column is
//! an unprotected coordinate and can simply be dropped. For a column set `J`
//! of low weight, keeping only the rows `E` that vanish on `J` and then
//! dropping `J` gives a shorter matrix; both operations restrict the rows to
//! a subset of coordinates where they were already zero or drop rows, so
//! `H·Hᵀ = 0` survives.

use alloc::vec;
use alloc::vec::Vec;

use crate::gf2::BitMatrix;
use crate::Error;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PruneReport {
    /// Removed column indices `J`, in input coordinates, ascending.
    pub removed_columns: Vec<usize>,
    /// Kept row indices `E`, in input coordinates, ascending.
    pub kept_rows: Vec<usize>,
    /// Rows outside `E`.
    pub removed_rows: Vec<usize>,
    pub shape_before: (usize, usize),
    pub shape_after: (usize, usize),
    pub column_histogram_before: Vec<usize>,
    pub column_histogram_after: Vec<usize>,
    /// Pruning passes performed (more than one only in fixpoint mode).
    pub passes: usize,
}

/// `hist[z]` = number of columns of weight `z`, for `z = 0..=rows`.
pub fn column_weight_histogram(h: &BitMatrix) -> Vec<usize> {
    let mut hist = vec![0; h.rows() + 1];
    for w in h.column_weights() {
        hist[w] += 1;
    }
    hist
}

/// `hist[z]` = number of rows of weight `z`, for `z = 0..=cols`.
pub fn row_weight_histogram(h: &BitMatrix) -> Vec<usize> {
    let mut hist = vec![0; h.cols() + 1];
    for w in h.row_weights() {
        hist[w] += 1;
    }
    hist
}

/// Drops every all-zero column. Rows are untouched.
pub fn prune_zero_columns(h: &BitMatrix) -> (BitMatrix, PruneReport) {
    let weights = h.column_weights();
    let zero: Vec<usize> = (0..h.cols()).filter(|&j| weights[j] == 0).collect();
    prune_columns(h, &zero).expect("zero columns meet no row")
}

/// Drops the columns `J` of weight at most `z_max` together with every row
/// that touches `J`.
///
/// One pass by default. Removing rows lowers column weights, so a pass can
/// leave new columns of weight `≤ z_max` behind; with `fixpoint` set the
/// operation repeats until none are left.
///
/// Fails with [`Error::DegeneratePruning`] when a non-empty input loses all
/// of its rows.
pub fn prune_low_weight_columns(h: &BitMatrix, z_max: usize, fixpoint: bool) -> Result<(BitMatrix, PruneReport), Error> {
    let low = |m: &BitMatrix| -> Vec<usize> {
        let weights = m.column_weights();
        (0..m.cols()).filter(|&j| weights[j] <= z_max).collect()
    };
    let (mut current, mut report) = prune_columns(h, &low(h))?;
    let mut col_map: Vec<usize> = (0..h.cols()).filter(|j| report.removed_columns.binary_search(j).is_err()).collect();
    loop {
        let j = if fixpoint { low(&current) } else { Vec::new() };
        if j.is_empty() {
            break;
        }
        let (next, pass) = prune_columns(&current, &j)?;
        report.removed_columns.extend(j.iter().map(|&c| col_map[c]));
        col_map = (0..col_map.len()).filter(|c| j.binary_search(c).is_err()).map(|c| col_map[c]).collect();
        report.kept_rows = pass.kept_rows.iter().map(|&i| report.kept_rows[i]).collect();
        report.passes += 1;
        current = next;
    }
    report.removed_columns.sort_unstable();
    report.removed_rows = (0..h.rows()).filter(|i| report.kept_rows.binary_search(i).is_err()).collect();
    report.shape_after = current.shape();
    report.column_histogram_after = column_weight_histogram(&current);
    Ok((current, report))
}

/// Drops the given columns `J` and keeps only the rows `E` that vanish on
/// `J`.
///
/// Fails with [`Error::DegeneratePruning`] when a non-empty input loses all
/// of its rows, and with [`Error::IndexOutOfRange`] for a bad column index.
pub fn prune_columns(h: &BitMatrix, columns: &[usize]) -> Result<(BitMatrix, PruneReport), Error> {
    if let Some(&j) = columns.iter().find(|&&j| j >= h.cols()) {
        return Err(Error::IndexOutOfRange { index: j, len: h.cols() });
    }
    let mut removed_columns = columns.to_vec();
    removed_columns.sort_unstable();
    removed_columns.dedup();
    let kept_columns: Vec<usize> = (0..h.cols()).filter(|j| removed_columns.binary_search(j).is_err()).collect();
    let (kept_rows, removed_rows): (Vec<usize>, Vec<usize>) =
        (0..h.rows()).partition(|&i| removed_columns.iter().all(|&j| !h.get(i, j)));
    if h.rows() > 0 && kept_rows.is_empty() {
        return Err(Error::DegeneratePruning);
    }
    let out = h.select_rows(&kept_rows)?.select_columns(&kept_columns)?;
    let report = PruneReport {
        removed_columns,
        kept_rows,
        removed_rows,
        shape_before: h.shape(),
        shape_after: out.shape(),
        column_histogram_before: column_weight_histogram(h),
        column_histogram_after: column_weight_histogram(&out),
        passes: 1,
    };
    Ok((out, report))
}
