//! Permutations of `{1..n}` in one-line notation.

use std::fmt;

use crate::error::{Error, Result};
use crate::partitions::Partition;

/// A bijection of `{1..n}`; `images[i - 1] = σ(i)`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Permutation {
    images: Vec<usize>,
}

impl Permutation {
    pub fn new(images: Vec<usize>) -> Result<Self> {
        let n = images.len();
        let mut seen = vec![false; n];
        for &v in &images {
            if v == 0 || v > n || std::mem::replace(&mut seen[v - 1], true) {
                return Err(Error::domain(format!(
                    "{images:?} is not a permutation of 1..{n}"
                )));
            }
        }
        Ok(Permutation { images })
    }

    pub fn identity(n: usize) -> Self {
        Permutation {
            images: (1..=n).collect(),
        }
    }

    /// The transposition swapping `a` and `b`.
    pub fn transposition(n: usize, a: usize, b: usize) -> Self {
        let mut images: Vec<usize> = (1..=n).collect();
        images.swap(a - 1, b - 1);
        Permutation { images }
    }

    pub fn n(&self) -> usize {
        self.images.len()
    }

    pub fn apply(&self, i: usize) -> usize {
        self.images[i - 1]
    }

    pub fn images(&self) -> &[usize] {
        &self.images
    }

    pub fn inverse(&self) -> Self {
        let mut images = vec![0; self.n()];
        for (i, &v) in self.images.iter().enumerate() {
            images[v - 1] = i + 1;
        }
        Permutation { images }
    }

    /// `(self ∘ other)(i) = self(other(i))`.
    pub fn compose(&self, other: &Permutation) -> Result<Self> {
        if self.n() != other.n() {
            return Err(Error::domain("composing permutations of different sizes"));
        }
        Ok(Permutation {
            images: other.images.iter().map(|&i| self.apply(i)).collect(),
        })
    }

    /// The image partition `{σ(b) : b ∈ B(ρ)}`.
    pub fn act_on_partition(&self, rho: &Partition) -> Result<Partition> {
        if rho.n() != self.n() {
            return Err(Error::domain("permutation and partition sizes differ"));
        }
        let blocks = rho
            .blocks()
            .iter()
            .map(|b| b.iter().map(|&i| self.apply(i)).collect())
            .collect();
        Partition::new(self.n(), blocks)
    }
}

impl fmt::Display for Permutation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.images.iter().map(|v| v.to_string()).collect();
        write!(f, "[{}]", parts.join(","))
    }
}
