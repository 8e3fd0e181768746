//! Small 3-uniform hypergraphs on `0..m`, indexed by ordered pairs. Used for
//! the auxiliary graphs `G_X` and `F_z`.

use alloc::vec;
use alloc::vec::Vec;

use crate::bitset::{self, words_for};

#[derive(Clone, Debug)]
pub struct Graph3 {
    m: usize,
    words: usize,
    nbr: Vec<u64>,
    edges: usize,
}

impl Graph3 {
    pub fn new(m: usize) -> Self {
        let words = words_for(m.max(1));
        Graph3 { m, words, nbr: vec![0; m * m * words], edges: 0 }
    }

    pub fn complete(m: usize) -> Self {
        let mut g = Self::new(m);
        for a in 0..m {
            for b in a + 1..m {
                for c in b + 1..m {
                    g.add_edge([a, b, c]);
                }
            }
        }
        g
    }

    pub fn vertex_count(&self) -> usize {
        self.m
    }

    pub fn edge_count(&self) -> usize {
        self.edges
    }

    fn set(&mut self, u: usize, v: usize, w: usize) {
        self.nbr[(u * self.m + v) * self.words + (w >> 6)] |= 1 << (w & 63);
    }

    pub fn add_edge(&mut self, t: [usize; 3]) -> bool {
        let [a, b, c] = t;
        debug_assert!(a != b && b != c && a != c);
        if self.has_edge(t) {
            return false;
        }
        for (x, y, z) in [(a, b, c), (b, a, c), (a, c, b), (c, a, b), (b, c, a), (c, b, a)] {
            self.set(x, y, z);
        }
        self.edges += 1;
        true
    }

    pub fn has_edge(&self, t: [usize; 3]) -> bool {
        let [a, b, c] = t;
        a != b && b != c && a != c && bitset::test(self.pair_nbr(a, b), c)
    }

    /// Vertices `w` with `{u, v, w}` an edge.
    pub fn pair_nbr(&self, u: usize, v: usize) -> &[u64] {
        let s = (u * self.m + v) * self.words;
        &self.nbr[s..s + self.words]
    }

    pub fn vertex_degree(&self, v: usize) -> usize {
        (0..self.m).filter(|&u| u != v).map(|u| bitset::count(self.pair_nbr(v, u))).sum::<usize>() / 2
    }

    pub fn min_vertex_degree(&self) -> usize {
        (0..self.m).map(|v| self.vertex_degree(v)).min().unwrap_or(0)
    }

    pub fn is_tight_path(&self, seq: &[usize]) -> bool {
        let mut seen = vec![false; self.m];
        for &v in seq {
            if v >= self.m || seen[v] {
                return false;
            }
            seen[v] = true;
        }
        seq.windows(3).all(|w| self.has_edge([w[0], w[1], w[2]]))
    }

    pub fn is_tight_cycle(&self, seq: &[usize]) -> bool {
        let l = seq.len();
        l >= 4
            && self.is_tight_path(seq)
            && self.has_edge([seq[l - 2], seq[l - 1], seq[0]])
            && self.has_edge([seq[l - 1], seq[0], seq[1]])
    }
}
