//! Ordered bipartitions `(A, B)` of the vertex set.

use alloc::format;
use alloc::vec::Vec;

use crate::bitset::VertexSet;
use crate::error::{Error, Result};

#[derive(Clone, Copy, PartialEq, Eq, Hash, Debug)]
pub enum Side {
    A,
    B,
}

impl Side {
    pub fn other(self) -> Side {
        match self {
            Side::A => Side::B,
            Side::B => Side::A,
        }
    }
}

/// `in_a` holds side `A`; everything else is `B`. Partitions built by
/// [`Partition::balanced`] satisfy `|A| - |B| ∈ {0, 1}`; working partitions
/// after anarchist transfer may drift and are built with
/// [`Partition::from_a`].
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct Partition {
    in_a: VertexSet,
}

impl Partition {
    pub fn from_a<I: IntoIterator<Item = usize>>(n: usize, a: I) -> Result<Self> {
        let mut in_a = VertexSet::new(n);
        for v in a {
            if v >= n {
                return Err(Error::OutOfRange { vertex: v, n });
            }
            in_a.insert(v);
        }
        Ok(Partition { in_a })
    }

    pub fn balanced<I: IntoIterator<Item = usize>>(n: usize, a: I) -> Result<Self> {
        let p = Self::from_a(n, a)?;
        if !p.is_balanced() {
            return Err(Error::InvalidPartition(format!(
                "|A|={} |B|={} is not balanced",
                p.a_len(),
                p.b_len()
            )));
        }
        Ok(p)
    }

    pub fn from_set(in_a: VertexSet) -> Self {
        Partition { in_a }
    }

    pub fn vertex_count(&self) -> usize {
        self.in_a.capacity()
    }

    pub fn side(&self, v: usize) -> Side {
        if self.in_a.contains(v) {
            Side::A
        } else {
            Side::B
        }
    }

    pub fn is_a(&self, v: usize) -> bool {
        self.in_a.contains(v)
    }

    pub fn a_set(&self) -> &VertexSet {
        &self.in_a
    }

    pub fn b_set(&self) -> VertexSet {
        let mut b = VertexSet::full(self.vertex_count());
        b.difference_with(&self.in_a);
        b
    }

    pub fn side_set(&self, s: Side) -> VertexSet {
        match s {
            Side::A => self.in_a.clone(),
            Side::B => self.b_set(),
        }
    }

    pub fn a_len(&self) -> usize {
        self.in_a.len()
    }

    pub fn b_len(&self) -> usize {
        self.vertex_count() - self.a_len()
    }

    pub fn side_len(&self, s: Side) -> usize {
        match s {
            Side::A => self.a_len(),
            Side::B => self.b_len(),
        }
    }

    pub fn a_vertices(&self) -> Vec<usize> {
        self.in_a.to_vec()
    }

    pub fn b_vertices(&self) -> Vec<usize> {
        (0..self.vertex_count()).filter(|&v| !self.is_a(v)).collect()
    }

    pub fn is_balanced(&self) -> bool {
        let (a, b) = (self.a_len(), self.b_len());
        a == b || a == b + 1
    }

    /// Number of `A` vertices in a vertex collection.
    pub fn count_a(&self, vs: &[usize]) -> usize {
        vs.iter().filter(|&&v| self.is_a(v)).count()
    }

    /// Moves `v` to the other side.
    pub fn flip(&mut self, v: usize) {
        if !self.in_a.remove(v) {
            self.in_a.insert(v);
        }
    }

    /// Exchanges `a` (in `A`) and `b` (in `B`).
    pub fn swap(&mut self, a: usize, b: usize) {
        debug_assert!(self.is_a(a) && !self.is_a(b));
        self.in_a.remove(a);
        self.in_a.insert(b);
    }

    /// The same cut with the labels `A` and `B` exchanged.
    pub fn mirrored(&self) -> Partition {
        Partition { in_a: self.b_set() }
    }
}
