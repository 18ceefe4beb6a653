use std::fmt;

use crate::error::{argument, Result};

/// A bijection on `{0, …, n-1}`, stored as its image list.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Permutation {
    images: Vec<usize>,
}

impl Permutation {
    pub fn new(images: Vec<usize>) -> Result<Self> {
        let n = images.len();
        let mut seen = vec![false; n];
        for &image in &images {
            if image >= n || std::mem::replace(&mut seen[image], true) {
                return Err(argument(format!("{images:?} is not a permutation")));
            }
        }
        Ok(Self { images })
    }

    pub fn identity(n: usize) -> Self {
        Self { images: (0..n).collect() }
    }

    pub fn transposition(n: usize, a: usize, b: usize) -> Result<Self> {
        if a >= n || b >= n {
            return Err(argument(format!("transposition ({a} {b}) out of range for n = {n}")));
        }
        let mut images: Vec<usize> = (0..n).collect();
        images.swap(a, b);
        Ok(Self { images })
    }

    pub fn len(&self) -> usize {
        self.images.len()
    }

    pub fn is_empty(&self) -> bool {
        self.images.is_empty()
    }

    pub fn image(&self, k: usize) -> usize {
        self.images[k]
    }

    pub fn images(&self) -> &[usize] {
        &self.images
    }

    /// `self ∘ other`, i.e. `k ↦ self(other(k))`.
    ///
    /// # Panics
    /// If the two permutations have different lengths.
    pub fn compose(&self, other: &Permutation) -> Permutation {
        assert_eq!(self.len(), other.len(), "composing permutations of different sizes");
        Permutation { images: other.images.iter().map(|&k| self.images[k]).collect() }
    }

    pub fn inverse(&self) -> Permutation {
        let mut images = vec![0; self.len()];
        for (k, &image) in self.images.iter().enumerate() {
            images[image] = k;
        }
        Permutation { images }
    }

    /// `+1` for even permutations, `-1` for odd ones.
    pub fn sign(&self) -> i8 {
        let mut visited = vec![false; self.len()];
        let mut transpositions = 0usize;
        for start in 0..self.len() {
            let mut k = start;
            let mut cycle_len = 0usize;
            while !visited[k] {
                visited[k] = true;
                k = self.images[k];
                cycle_len += 1;
            }
            transpositions += cycle_len.saturating_sub(1);
        }
        if transpositions % 2 == 0 {
            1
        } else {
            -1
        }
    }
}

impl fmt::Debug for Permutation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Permutation{:?}", self.images)
    }
}
