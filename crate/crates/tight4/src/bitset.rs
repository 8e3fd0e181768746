//! Fixed-capacity vertex bitsets. Neighbourhoods in the triple index use the
//! same word layout, so the free functions here also work on raw slices.

use alloc::vec;
use alloc::vec::Vec;

/// Number of `u64` words needed for `n` bits.
pub const fn words_for(n: usize) -> usize {
    n.div_ceil(64)
}

pub fn count(words: &[u64]) -> usize {
    words.iter().map(|w| w.count_ones() as usize).sum()
}

pub fn test(words: &[u64], v: usize) -> bool {
    words[v >> 6] >> (v & 63) & 1 == 1
}

pub fn and_count(a: &[u64], b: &[u64]) -> usize {
    a.iter().zip(b).map(|(x, y)| (x & y).count_ones() as usize).sum()
}

/// Iterates the set bits of a word slice in increasing order.
pub fn iter_bits(words: &[u64]) -> impl Iterator<Item = usize> + '_ {
    words.iter().enumerate().flat_map(|(i, &w)| {
        let mut w = w;
        core::iter::from_fn(move || {
            if w == 0 {
                None
            } else {
                let t = w.trailing_zeros() as usize;
                w &= w - 1;
                Some(i * 64 + t)
            }
        })
    })
}

#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct VertexSet {
    cap: usize,
    words: Vec<u64>,
}

impl VertexSet {
    pub fn new(cap: usize) -> Self {
        VertexSet { cap, words: vec![0; words_for(cap)] }
    }

    pub fn full(cap: usize) -> Self {
        let mut s = Self::new(cap);
        for v in 0..cap {
            s.insert(v);
        }
        s
    }

    pub fn from_iter<I: IntoIterator<Item = usize>>(cap: usize, it: I) -> Self {
        let mut s = Self::new(cap);
        for v in it {
            s.insert(v);
        }
        s
    }

    pub fn from_words(cap: usize, words: &[u64]) -> Self {
        VertexSet { cap, words: words.to_vec() }
    }

    pub fn capacity(&self) -> usize {
        self.cap
    }

    pub fn words(&self) -> &[u64] {
        &self.words
    }

    pub fn insert(&mut self, v: usize) -> bool {
        debug_assert!(v < self.cap);
        let had = self.contains(v);
        self.words[v >> 6] |= 1 << (v & 63);
        !had
    }

    pub fn remove(&mut self, v: usize) -> bool {
        let had = self.contains(v);
        self.words[v >> 6] &= !(1 << (v & 63));
        had
    }

    pub fn contains(&self, v: usize) -> bool {
        v < self.cap && test(&self.words, v)
    }

    pub fn len(&self) -> usize {
        count(&self.words)
    }

    pub fn is_empty(&self) -> bool {
        self.words.iter().all(|&w| w == 0)
    }

    pub fn iter(&self) -> impl Iterator<Item = usize> + '_ {
        iter_bits(&self.words)
    }

    pub fn to_vec(&self) -> Vec<usize> {
        self.iter().collect()
    }

    pub fn intersection_len(&self, other: &[u64]) -> usize {
        and_count(&self.words, other)
    }

    pub fn intersect_with(&mut self, other: &[u64]) {
        for (a, b) in self.words.iter_mut().zip(other) {
            *a &= b;
        }
    }

    pub fn union_with(&mut self, other: &VertexSet) {
        for (a, b) in self.words.iter_mut().zip(&other.words) {
            *a |= b;
        }
    }

    pub fn difference_with(&mut self, other: &VertexSet) {
        for (a, b) in self.words.iter_mut().zip(&other.words) {
            *a &= !b;
        }
    }

    pub fn is_disjoint(&self, other: &VertexSet) -> bool {
        self.words.iter().zip(&other.words).all(|(a, b)| a & b == 0)
    }
}
