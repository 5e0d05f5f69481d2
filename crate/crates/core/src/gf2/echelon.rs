use alloc::vec::Vec;

use super::vector::xor_words;
use super::{BitMatrix, BitVector, WORD_BITS};
use crate::Error;

/// Reduced row echelon form of a matrix.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RrefResult {
    /// Row-equivalent to the input; the first `rank` rows are the nonzero ones.
    pub matrix: BitMatrix,
    /// Strictly increasing; row `i` has its leading one in `pivot_columns[i]`.
    pub pivot_columns: Vec<usize>,
    pub rank: usize,
}

/// Gauss–Jordan elimination in place. Returns the pivot columns.
///
/// Pivot rule: for each row step, the leftmost column with a set entry at or
/// below the current row. With `reduce_above` unset only the entries below
/// each pivot are cleared (plain echelon form, enough for a rank).
pub(crate) fn eliminate(m: &mut BitMatrix, reduce_above: bool) -> Vec<usize> {
    let (rows, cols) = m.shape();
    let stride = m.stride();
    let mut pivots = Vec::new();
    let mut next = 0;
    for col in 0..cols {
        if next == rows {
            break;
        }
        let word = col / WORD_BITS;
        let mask = 1u64 << (col % WORD_BITS);
        let Some(found) = (next..rows).find(|&r| m.row_words(r)[word] & mask != 0) else {
            continue;
        };
        m.swap_rows(found, next);
        let pivot: Vec<u64> = m.row_words(next)[word..stride].to_vec();
        let start = if reduce_above { 0 } else { next + 1 };
        for r in start..rows {
            if r != next && m.row_words(r)[word] & mask != 0 {
                // Words left of `word` are zero in the pivot row.
                xor_words(&mut m.row_words_mut(r)[word..], &pivot);
            }
        }
        pivots.push(col);
        next += 1;
    }
    pivots
}

pub fn rref(m: &BitMatrix) -> RrefResult {
    let mut matrix = m.clone();
    let pivot_columns = eliminate(&mut matrix, true);
    RrefResult {
        rank: pivot_columns.len(),
        matrix,
        pivot_columns,
    }
}

/// Rank over GF(2).
pub fn rank(m: &BitMatrix) -> usize {
    let mut work = m.clone();
    eliminate(&mut work, false).len()
}

/// Basis of the right kernel `{c : m·cᵀ = 0}`, one vector per row.
///
/// There is one basis vector per non-pivot column `f`: it has a one at `f` and
/// at the pivot of every row whose reduced form has a one in column `f`.
pub fn kernel_basis(m: &BitMatrix) -> BitMatrix {
    let RrefResult {
        matrix,
        pivot_columns,
        rank,
    } = rref(m);
    let cols = m.cols();
    let mut is_pivot = alloc::vec![false; cols];
    for &p in &pivot_columns {
        is_pivot[p] = true;
    }
    let mut out = BitMatrix::zeros(0, cols);
    for free in (0..cols).filter(|&j| !is_pivot[j]) {
        let mut v = BitVector::zeros(cols);
        v.set(free, true);
        for (i, &p) in pivot_columns.iter().enumerate().take(rank) {
            if matrix.get(i, free) {
                v.set(p, true);
            }
        }
        out.push_row(&v).expect("kernel vector has matrix width");
    }
    out
}

/// `true` iff `v` is a linear combination of the rows of `rows`.
pub fn is_in_span(rows: &BitMatrix, v: &BitVector) -> Result<bool, Error> {
    if v.len() != rows.cols() {
        return Err(Error::LengthMismatch {
            op: "is_in_span",
            expected: rows.cols(),
            found: v.len(),
        });
    }
    let basis = EchelonBasis::from_matrix(rows);
    Ok(basis.contains(v))
}

/// Incrementally maintained basis of a row space.
///
/// Rows are stored in insertion order, each reduced against its predecessors
/// so that its leading one sits at a column where every earlier row is zero.
/// Membership tests and insertions cost one pass over the stored rows.
#[derive(Clone, Debug)]
pub struct EchelonBasis {
    len: usize,
    rows: Vec<BitVector>,
    leads: Vec<usize>,
}

impl EchelonBasis {
    pub fn new(len: usize) -> Self {
        Self {
            len,
            rows: Vec::new(),
            leads: Vec::new(),
        }
    }

    pub fn from_matrix(m: &BitMatrix) -> Self {
        let mut basis = Self::new(m.cols());
        for row in m.iter_rows() {
            basis.insert(&row);
        }
        basis
    }

    /// Vector length of the ambient space.
    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    /// Dimension of the spanned space.
    pub fn rank(&self) -> usize {
        self.rows.len()
    }

    /// Residue of `v` after elimination; zero iff `v` lies in the span.
    fn reduce(&self, v: &BitVector) -> BitVector {
        assert_eq!(v.len(), self.len, "vector length does not match basis");
        let mut r = v.clone();
        for (row, &lead) in self.rows.iter().zip(&self.leads) {
            if r.get(lead) {
                xor_words(r.words_mut(), row.words());
            }
        }
        r
    }

    /// # Panics
    /// Panics if `v.len()` differs from the basis length.
    pub fn contains(&self, v: &BitVector) -> bool {
        self.reduce(v).is_zero()
    }

    /// Adds `v` when it is independent of the current basis. Returns whether
    /// the rank grew.
    ///
    /// # Panics
    /// Panics if `v.len()` differs from the basis length.
    pub fn insert(&mut self, v: &BitVector) -> bool {
        let r = self.reduce(v);
        let Some(&lead) = r.support().first() else {
            return false;
        };
        self.rows.push(r);
        self.leads.push(lead);
        true
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::seeded_rng;
    use proptest::prelude::*;
    use rand::Rng;
    use std::collections::BTreeSet;

    fn m(s: &str) -> BitMatrix {
        s.parse().unwrap()
    }

    fn v(s: &str) -> BitVector {
        s.parse().unwrap()
    }

    fn random_matrix(rows: usize, cols: usize, density: f64, seed: u64) -> BitMatrix {
        let mut rng = seeded_rng(seed);
        let mut out = BitMatrix::zeros(rows, cols);
        for i in 0..rows {
            for j in 0..cols {
                out.set(i, j, rng.random_bool(density));
            }
        }
        out
    }

    /// Every vector of the row span, by enumerating all row subsets.
    fn span_by_enumeration(rows: &BitMatrix) -> BTreeSet<BitVector> {
        let r = rows.rows();
        (0u32..1 << r)
            .map(|mask| {
                let mut acc = BitVector::zeros(rows.cols());
                for i in 0..r {
                    if mask >> i & 1 == 1 {
                        acc.xor_assign(&rows.row(i)).unwrap();
                    }
                }
                acc
            })
            .collect()
    }

    /// Every vector annihilated by `rows`, by enumerating all of F_2^n.
    fn kernel_by_enumeration(rows: &BitMatrix) -> BTreeSet<BitVector> {
        let n = rows.cols();
        (0u32..1 << n)
            .map(|mask| BitVector::from_bools(&(0..n).map(|j| mask >> j & 1 == 1).collect::<Vec<_>>()))
            .filter(|c| rows.mat_vec(c).unwrap().is_zero())
            .collect()
    }

    #[test]
    fn rank_examples() {
        assert_eq!(rank(&BitMatrix::identity(5)), 5);
        assert_eq!(rank(&BitMatrix::zeros(3, 7)), 0);
        let a = m("1100 0110 1010");
        assert_eq!(rank(&a), 2);
        // 2^rank distinct vectors in the span
        assert_eq!(span_by_enumeration(&a).len(), 1 << 2);
    }

    #[test]
    fn rank_leaves_input_unchanged() {
        let a = m("1100 0110 1010");
        let before = a.clone();
        rank(&a);
        rref(&a);
        assert_eq!(a, before);
    }

    #[test]
    fn rref_examples() {
        let id = rref(&BitMatrix::identity(4));
        assert_eq!(id.matrix, BitMatrix::identity(4));
        assert_eq!(id.pivot_columns, [0, 1, 2, 3]);

        let single = rref(&m("0110"));
        assert_eq!(single.matrix, m("0110"));
        assert_eq!(single.pivot_columns, [1]);

        // 1100, 0110, 1010 -> 1010, 0110, 0000
        let r = rref(&m("1100 0110 1010"));
        assert_eq!(r.rank, 2);
        assert_eq!(r.pivot_columns, [0, 1]);
        assert_eq!(r.matrix, m("1010 0110 0000"));
    }

    #[test]
    fn kernel_examples() {
        let even = kernel_basis(&m("1111"));
        assert_eq!(even.rows(), 3);
        assert!(even.iter_rows().all(|b| b.weight() % 2 == 0));

        assert_eq!(kernel_basis(&BitMatrix::identity(6)).rows(), 0);

        let h = m("1100 0011");
        let k = kernel_basis(&h);
        assert_eq!(k.rows(), 2);
        let expected: BTreeSet<_> = ["0000", "1100", "0011", "1111"].iter().map(|s| v(s)).collect();
        assert_eq!(kernel_by_enumeration(&h), expected);
        assert_eq!(span_by_enumeration(&k), expected);
    }

    #[test]
    fn span_examples() {
        let rows = m("1100 0011");
        assert!(is_in_span(&rows, &v("1100")).unwrap());
        assert!(is_in_span(&rows, &v("0000")).unwrap());
        assert!(is_in_span(&rows, &v("1111")).unwrap());
        assert!(!is_in_span(&rows, &v("1000")).unwrap());
        assert!(is_in_span(&rows, &v("111")).is_err());
        let span = span_by_enumeration(&rows);
        assert!(span.contains(&v("1111")) && !span.contains(&v("1000")));
    }

    #[test]
    fn incremental_basis_tracks_rank() {
        let mut b = EchelonBasis::new(4);
        assert!(b.insert(&v("1100")));
        assert!(b.insert(&v("0110")));
        assert!(!b.insert(&v("1010")));
        assert!(!b.insert(&v("0000")));
        assert!(b.contains(&v("1010")));
        assert!(!b.contains(&v("0001")));
        assert_eq!(b.rank(), 2);
    }

    proptest! {
        #[test]
        fn rank_equals_rank_of_transpose(r in 0usize..40, c in 0usize..90, seed in any::<u64>()) {
            let a = random_matrix(r, c, 0.3, seed);
            prop_assert_eq!(rank(&a), rank(&a.transpose()));
            prop_assert!(rank(&a) <= r.min(c));
        }

        #[test]
        fn kernel_basis_is_annihilated_and_complete(r in 1usize..30, c in 1usize..100, seed in any::<u64>()) {
            let a = random_matrix(r, c, 0.2, seed);
            let k = kernel_basis(&a);
            prop_assert_eq!(k.rows() + rank(&a), c);
            prop_assert!(a.mat_mat(&k.transpose()).unwrap().is_zero());
            prop_assert_eq!(rank(&k), k.rows());
        }

        #[test]
        fn rref_structure(r in 1usize..30, c in 1usize..100, seed in any::<u64>()) {
            let a = random_matrix(r, c, 0.25, seed);
            let res = rref(&a);
            prop_assert_eq!(res.rank, res.pivot_columns.len());
            prop_assert!(res.pivot_columns.windows(2).all(|w| w[0] < w[1]));
            for (i, &p) in res.pivot_columns.iter().enumerate() {
                for row in 0..r {
                    prop_assert_eq!(res.matrix.get(row, p), row == i);
                }
            }
            // same row space: stacking adds no rank
            prop_assert_eq!(rank(&a.vstack(&res.matrix).unwrap()), res.rank);
        }

        #[test]
        fn span_membership_agrees_with_rank(r in 1usize..12, c in 1usize..70, seed in any::<u64>()) {
            let a = random_matrix(r, c, 0.3, seed);
            let x = random_matrix(1, c, 0.3, seed ^ 1).row(0);
            let mut stacked = a.clone();
            stacked.push_row(&x).unwrap();
            prop_assert_eq!(is_in_span(&a, &x).unwrap(), rank(&stacked) == rank(&a));
        }
    }
}
