use alloc::vec;
use alloc::vec::Vec;
use rand::seq::SliceRandom;
use rand::Rng;

use super::BitVector;
use crate::Error;

/// A permutation of `{0, …, n−1}`; position `i` is sent to `images[i]`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Permutation {
    images: Vec<usize>,
}

impl Permutation {
    pub fn identity(n: usize) -> Self {
        Self {
            images: (0..n).collect(),
        }
    }

    /// Validates that `images` is a bijection.
    pub fn new(images: Vec<usize>) -> Result<Self, Error> {
        let n = images.len();
        let mut seen = vec![false; n];
        for &img in &images {
            if img >= n {
                return Err(Error::IndexOutOfRange { index: img, len: n });
            }
            if seen[img] {
                return Err(Error::invalid("images", "not a bijection"));
            }
            seen[img] = true;
        }
        Ok(Self { images })
    }

    /// Uniformly random permutation (Fisher–Yates).
    pub fn random<R: Rng + ?Sized>(n: usize, rng: &mut R) -> Self {
        let mut images: Vec<usize> = (0..n).collect();
        images.shuffle(rng);
        Self { images }
    }

    #[inline]
    pub fn len(&self) -> usize {
        self.images.len()
    }

    #[inline]
    pub fn is_empty(&self) -> bool {
        self.images.is_empty()
    }

    #[inline]
    pub fn images(&self) -> &[usize] {
        &self.images
    }

    pub fn inverse(&self) -> Self {
        let mut inv = vec![0; self.images.len()];
        for (i, &img) in self.images.iter().enumerate() {
            inv[img] = i;
        }
        Self { images: inv }
    }

    /// Moves coordinate `i` of `v` to position `images[i]`.
    pub fn apply(&self, v: &BitVector) -> Result<BitVector, Error> {
        if v.len() != self.len() {
            return Err(Error::LengthMismatch {
                op: "Permutation::apply",
                expected: self.len(),
                found: v.len(),
            });
        }
        let mut out = BitVector::zeros(v.len());
        for i in v.support() {
            out.set(self.images[i], true);
        }
        Ok(out)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::seeded_rng;
    use proptest::prelude::*;

    #[test]
    fn rejects_non_bijection() {
        assert!(Permutation::new(vec![0, 0, 1]).is_err());
        assert!(Permutation::new(vec![0, 3, 1]).is_err());
        assert!(Permutation::new(vec![2, 0, 1]).is_ok());
    }

    proptest! {
        #[test]
        fn inverse_undoes_apply(seed in any::<u64>(), bits in proptest::collection::vec(any::<bool>(), 1..150)) {
            let mut rng = seeded_rng(seed);
            let p = Permutation::random(bits.len(), &mut rng);
            prop_assert!(Permutation::new(p.images().to_vec()).is_ok());
            let v = BitVector::from_bools(&bits);
            let moved = p.apply(&v).unwrap();
            prop_assert_eq!(moved.weight(), v.weight());
            prop_assert_eq!(p.inverse().apply(&moved).unwrap(), v);
        }
    }
}
