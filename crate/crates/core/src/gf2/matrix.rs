use alloc::vec;
use alloc::vec::Vec;
use core::fmt;
use core::str::FromStr;

use super::vector::{dot_words, xor_words};
#[cfg(test)]
use super::vector::tail_mask;
use super::{words_for, BitVector, Permutation, WORD_BITS};
use crate::Error;

/// Dense row-major matrix over GF(2).
///
/// Each row occupies `stride` words; unused tail bits are kept at zero.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct BitMatrix {
    rows: usize,
    cols: usize,
    stride: usize,
    data: Vec<u64>,
}

impl BitMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        let stride = words_for(cols);
        Self {
            rows,
            cols,
            stride,
            data: vec![0; rows * stride],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m.set(i, i, true);
        }
        m
    }

    /// Stacks `rows`, each of which must have length `cols`.
    pub fn from_rows(cols: usize, rows: &[BitVector]) -> Result<Self, Error> {
        let mut m = Self::zeros(0, cols);
        for r in rows {
            m.push_row(r)?;
        }
        Ok(m)
    }

    #[inline]
    pub fn rows(&self) -> usize {
        self.rows
    }

    #[inline]
    pub fn cols(&self) -> usize {
        self.cols
    }

    /// `(rows, cols)`.
    #[inline]
    pub fn shape(&self) -> (usize, usize) {
        (self.rows, self.cols)
    }

    #[inline]
    pub(crate) fn stride(&self) -> usize {
        self.stride
    }

    #[inline]
    pub fn get(&self, row: usize, col: usize) -> bool {
        assert!(row < self.rows && col < self.cols, "index ({row}, {col}) out of range");
        (self.data[row * self.stride + col / WORD_BITS] >> (col % WORD_BITS)) & 1 == 1
    }

    #[inline]
    pub fn set(&mut self, row: usize, col: usize, value: bool) {
        assert!(row < self.rows && col < self.cols, "index ({row}, {col}) out of range");
        let idx = row * self.stride + col / WORD_BITS;
        let mask = 1u64 << (col % WORD_BITS);
        if value {
            self.data[idx] |= mask;
        } else {
            self.data[idx] &= !mask;
        }
    }

    /// Packed words of row `i`.
    #[inline]
    pub fn row_words(&self, i: usize) -> &[u64] {
        &self.data[i * self.stride..(i + 1) * self.stride]
    }

    #[inline]
    pub(crate) fn row_words_mut(&mut self, i: usize) -> &mut [u64] {
        &mut self.data[i * self.stride..(i + 1) * self.stride]
    }

    pub fn row(&self, i: usize) -> BitVector {
        assert!(i < self.rows, "row {i} out of range ({} rows)", self.rows);
        BitVector::from_words(self.cols, self.row_words(i).to_vec())
            .expect("row stride matches column count")
    }

    pub fn iter_rows(&self) -> impl Iterator<Item = BitVector> + '_ {
        (0..self.rows).map(move |i| self.row(i))
    }

    pub fn row_weight(&self, i: usize) -> usize {
        self.row_words(i).iter().map(|w| w.count_ones() as usize).sum()
    }

    pub fn row_weights(&self) -> Vec<usize> {
        (0..self.rows).map(|i| self.row_weight(i)).collect()
    }

    pub fn column_weights(&self) -> Vec<usize> {
        let mut out = vec![0; self.cols];
        for i in 0..self.rows {
            for (wi, &word) in self.row_words(i).iter().enumerate() {
                let mut w = word;
                while w != 0 {
                    out[wi * WORD_BITS + w.trailing_zeros() as usize] += 1;
                    w &= w - 1;
                }
            }
        }
        out
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(|&w| w == 0)
    }

    pub fn push_row(&mut self, row: &BitVector) -> Result<(), Error> {
        if row.len() != self.cols {
            return Err(Error::LengthMismatch {
                op: "BitMatrix::push_row",
                expected: self.cols,
                found: row.len(),
            });
        }
        self.data.extend_from_slice(row.words());
        self.rows += 1;
        Ok(())
    }

    /// `row[target] ^= row[source]`.
    pub fn xor_rows(&mut self, target: usize, source: usize) {
        assert!(target < self.rows && source < self.rows, "row index out of range");
        if target == source {
            self.row_words_mut(target).fill(0);
            return;
        }
        let s = self.stride;
        let (lo, hi) = (target.min(source), target.max(source));
        let (head, tail) = self.data.split_at_mut(hi * s);
        let lo_row = &mut head[lo * s..(lo + 1) * s];
        let hi_row = &mut tail[..s];
        if target < source {
            xor_words(lo_row, hi_row);
        } else {
            xor_words(hi_row, lo_row);
        }
    }

    pub fn swap_rows(&mut self, a: usize, b: usize) {
        assert!(a < self.rows && b < self.rows, "row index out of range");
        if a == b {
            return;
        }
        let s = self.stride;
        for k in 0..s {
            self.data.swap(a * s + k, b * s + k);
        }
    }

    pub fn transpose(&self) -> BitMatrix {
        let mut t = BitMatrix::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for (wi, &word) in self.row_words(i).iter().enumerate() {
                let mut w = word;
                while w != 0 {
                    let j = wi * WORD_BITS + w.trailing_zeros() as usize;
                    t.set(j, i, true);
                    w &= w - 1;
                }
            }
        }
        t
    }

    /// `self · v` as a length-`rows` vector.
    pub fn mat_vec(&self, v: &BitVector) -> Result<BitVector, Error> {
        if v.len() != self.cols {
            return Err(Error::LengthMismatch {
                op: "mat_vec",
                expected: self.cols,
                found: v.len(),
            });
        }
        let mut out = BitVector::zeros(self.rows);
        for i in 0..self.rows {
            if dot_words(self.row_words(i), v.words()) {
                out.set(i, true);
            }
        }
        Ok(out)
    }

    /// Matrix product `self · other`.
    pub fn mat_mat(&self, other: &BitMatrix) -> Result<BitMatrix, Error> {
        if self.cols != other.rows {
            return Err(self.shape_error("mat_mat", other));
        }
        let mut out = BitMatrix::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for (wi, &word) in self.row_words(i).iter().enumerate() {
                let mut w = word;
                while w != 0 {
                    let k = wi * WORD_BITS + w.trailing_zeros() as usize;
                    let src = other.row_words(k);
                    xor_words(out.row_words_mut(i), src);
                    w &= w - 1;
                }
            }
        }
        Ok(out)
    }

    /// `self · otherᵀ`, computed from row inner products without a transpose.
    pub fn mul_transpose(&self, other: &BitMatrix) -> Result<BitMatrix, Error> {
        if self.cols != other.cols {
            return Err(self.shape_error("mul_transpose", other));
        }
        let mut out = BitMatrix::zeros(self.rows, other.rows);
        for i in 0..self.rows {
            for j in 0..other.rows {
                if dot_words(self.row_words(i), other.row_words(j)) {
                    out.set(i, j, true);
                }
            }
        }
        Ok(out)
    }

    /// Elementwise sum (XOR).
    pub fn add(&self, other: &BitMatrix) -> Result<BitMatrix, Error> {
        if self.shape() != other.shape() {
            return Err(self.shape_error("add", other));
        }
        let mut out = self.clone();
        xor_words(&mut out.data, &other.data);
        Ok(out)
    }

    /// `true` iff `self · selfᵀ = 0`.
    pub fn is_self_orthogonal(&self) -> bool {
        for i in 0..self.rows {
            for j in i..self.rows {
                if dot_words(self.row_words(i), self.row_words(j)) {
                    return false;
                }
            }
        }
        true
    }

    /// Submatrix made of the listed rows, in the given order.
    pub fn select_rows(&self, indices: &[usize]) -> Result<BitMatrix, Error> {
        let mut out = BitMatrix::zeros(0, self.cols);
        for &i in indices {
            if i >= self.rows {
                return Err(Error::IndexOutOfRange {
                    index: i,
                    len: self.rows,
                });
            }
            out.data.extend_from_slice(self.row_words(i));
            out.rows += 1;
        }
        Ok(out)
    }

    /// Submatrix made of the listed columns, in the given order.
    pub fn select_columns(&self, indices: &[usize]) -> Result<BitMatrix, Error> {
        if let Some(&bad) = indices.iter().find(|&&j| j >= self.cols) {
            return Err(Error::IndexOutOfRange {
                index: bad,
                len: self.cols,
            });
        }
        let mut out = BitMatrix::zeros(self.rows, indices.len());
        for i in 0..self.rows {
            let row = self.row_words(i);
            for (new_j, &j) in indices.iter().enumerate() {
                if (row[j / WORD_BITS] >> (j % WORD_BITS)) & 1 == 1 {
                    out.set(i, new_j, true);
                }
            }
        }
        Ok(out)
    }

    /// Moves column `j` to position `perm.images()[j]`.
    pub fn permute_columns(&self, perm: &Permutation) -> Result<BitMatrix, Error> {
        if perm.len() != self.cols {
            return Err(Error::LengthMismatch {
                op: "permute_columns",
                expected: self.cols,
                found: perm.len(),
            });
        }
        let images = perm.images();
        let mut out = BitMatrix::zeros(self.rows, self.cols);
        for i in 0..self.rows {
            let src = &self.data[i * self.stride..(i + 1) * self.stride];
            let dst = &mut out.data[i * self.stride..(i + 1) * self.stride];
            for (wi, &word) in src.iter().enumerate() {
                let mut w = word;
                while w != 0 {
                    let j = images[wi * WORD_BITS + w.trailing_zeros() as usize];
                    dst[j / WORD_BITS] |= 1u64 << (j % WORD_BITS);
                    w &= w - 1;
                }
            }
        }
        Ok(out)
    }

    /// `[self | other]`.
    pub fn hstack(&self, other: &BitMatrix) -> Result<BitMatrix, Error> {
        if self.rows != other.rows {
            return Err(self.shape_error("hstack", other));
        }
        let rows: Vec<BitVector> = (0..self.rows)
            .map(|i| self.row(i).concat(&other.row(i)))
            .collect();
        BitMatrix::from_rows(self.cols + other.cols, &rows)
    }

    /// `self` above `other`.
    pub fn vstack(&self, other: &BitMatrix) -> Result<BitMatrix, Error> {
        if self.cols != other.cols {
            return Err(self.shape_error("vstack", other));
        }
        let mut out = self.clone();
        out.data.extend_from_slice(&other.data);
        out.rows += other.rows;
        Ok(out)
    }

    fn shape_error(&self, op: &'static str, other: &BitMatrix) -> Error {
        Error::ShapeMismatch {
            op,
            left_rows: self.rows,
            left_cols: self.cols,
            right_rows: other.rows,
            right_cols: other.cols,
        }
    }

    #[cfg(test)]
    pub(crate) fn tails_are_clear(&self) -> bool {
        let mask = tail_mask(self.cols);
        self.stride == 0 || (0..self.rows).all(|i| self.row_words(i)[self.stride - 1] & !mask == 0)
    }
}

impl fmt::Display for BitMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for i in 0..self.rows {
            if i > 0 {
                f.write_str("\n")?;
            }
            write!(f, "{}", self.row(i))?;
        }
        Ok(())
    }
}

impl fmt::Debug for BitMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "BitMatrix {}x{} [", self.rows, self.cols)?;
        for i in 0..self.rows {
            writeln!(f, "  {}", self.row(i))?;
        }
        f.write_str("]")
    }
}

impl FromStr for BitMatrix {
    type Err = Error;

    /// Rows of `0`/`1` separated by newlines, commas or whitespace, e.g.
    /// `"1100 0011"`. All rows must have the same length.
    fn from_str(s: &str) -> Result<Self, Error> {
        let rows = s
            .split(|c: char| c.is_whitespace() || c == ',')
            .filter(|t| !t.is_empty())
            .map(BitVector::from_str)
            .collect::<Result<Vec<_>, _>>()?;
        let cols = rows.first().map_or(0, BitVector::len);
        BitMatrix::from_rows(cols, &rows)
    }
}
