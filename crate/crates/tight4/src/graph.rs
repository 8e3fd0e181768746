//! The 4-uniform hypergraph with its triple index: for every 3-set `T` the
//! bitset `N(T)` of vertices completing `T` to an edge.

use alloc::vec;
use alloc::vec::Vec;

use crate::bitset::{self, VertexSet};
use crate::error::{Error, Result};

/// Largest `N` whose triple index is materialised. `C(256,3)` bitsets of four
/// words is about 88 MB; above this neighbourhoods are computed by scanning.
pub const EAGER_MAX: usize = 256;

#[derive(Clone, Debug)]
pub struct Hypergraph4 {
    n: usize,
    edges: Vec<[u32; 4]>,
    words: usize,
    index: Option<Vec<u64>>,
}

fn sort3(t: [usize; 3]) -> [usize; 3] {
    let [mut a, mut b, mut c] = t;
    if a > b {
        core::mem::swap(&mut a, &mut b);
    }
    if b > c {
        core::mem::swap(&mut b, &mut c);
    }
    if a > b {
        core::mem::swap(&mut a, &mut b);
    }
    [a, b, c]
}

/// Rank of a sorted triple in the combinatorial number system.
fn rank3(t: [usize; 3]) -> usize {
    let [x, y, z] = sort3(t);
    z * (z - 1) * (z - 2) / 6 + y * (y - 1) / 2 + x
}

pub fn canonical(q: [usize; 4]) -> [u32; 4] {
    let mut s = q.map(|v| v as u32);
    s.sort_unstable();
    s
}

impl Hypergraph4 {
    /// Builds a graph from arbitrary quadruples; duplicates and vertex order
    /// within a quadruple are irrelevant.
    pub fn new(vertex_count: usize, quads: &[[usize; 4]]) -> Result<Self> {
        let mut edges = Vec::with_capacity(quads.len());
        for &q in quads {
            for &v in &q {
                if v >= vertex_count {
                    return Err(Error::OutOfRange { vertex: v, n: vertex_count });
                }
            }
            let c = canonical(q);
            if c[0] == c[1] || c[1] == c[2] || c[2] == c[3] {
                return Err(Error::DegenerateEdge(q));
            }
            edges.push(c);
        }
        Ok(Self::from_canonical(vertex_count, edges))
    }

    /// `edges` must already be canonical (sorted quadruples of distinct
    /// in-range vertices); they are sorted and deduplicated here.
    pub(crate) fn from_canonical(n: usize, mut edges: Vec<[u32; 4]>) -> Self {
        edges.sort_unstable();
        edges.dedup();
        let words = bitset::words_for(n.max(1));
        let index = (n <= EAGER_MAX).then(|| {
            let triples = if n >= 3 { n * (n - 1) * (n - 2) / 6 } else { 0 };
            let mut idx = vec![0u64; triples * words];
            for e in &edges {
                let e = e.map(|v| v as usize);
                for skip in 0..4 {
                    let mut t = [0; 3];
                    let mut k = 0;
                    for (i, &v) in e.iter().enumerate() {
                        if i != skip {
                            t[k] = v;
                            k += 1;
                        }
                    }
                    let x = e[skip];
                    idx[rank3(t) * words + (x >> 6)] |= 1 << (x & 63);
                }
            }
            idx
        });
        Hypergraph4 { n, edges, words, index }
    }

    pub fn vertex_count(&self) -> usize {
        self.n
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    /// Canonical sorted edge list.
    pub fn edges(&self) -> &[[u32; 4]] {
        &self.edges
    }

    /// Words per neighbourhood bitset.
    pub fn words(&self) -> usize {
        self.words
    }

    pub fn is_indexed(&self) -> bool {
        self.index.is_some()
    }

    /// `N(T)` as raw words, only when the index is materialised.
    pub fn nbr_words(&self, t: [usize; 3]) -> Option<&[u64]> {
        let r = rank3(t) * self.words;
        self.index.as_ref().map(|idx| &idx[r..r + self.words])
    }

    /// `N(T)` as an owned set; works in both storage modes.
    pub fn neighborhood(&self, t: [usize; 3]) -> VertexSet {
        match self.nbr_words(t) {
            Some(w) => VertexSet::from_words(self.n, w),
            None => VertexSet::from_iter(
                self.n,
                (0..self.n).filter(|&x| !t.contains(&x) && self.has_edge_scan([t[0], t[1], t[2], x])),
            ),
        }
    }

    pub fn codegree(&self, t: [usize; 3]) -> usize {
        match self.nbr_words(t) {
            Some(w) => bitset::count(w),
            None => self.neighborhood(t).len(),
        }
    }

    fn has_edge_scan(&self, q: [usize; 4]) -> bool {
        self.edges.binary_search(&canonical(q)).is_ok()
    }

    /// Membership test for a 4-set given in any order. Sets with a repeated
    /// vertex are never edges.
    pub fn has_edge(&self, q: [usize; 4]) -> bool {
        let [a, b, c, d] = q;
        if a == b || a == c || a == d || b == c || b == d || c == d {
            return false;
        }
        if q.iter().any(|&v| v >= self.n) {
            return false;
        }
        match self.nbr_words([a, b, c]) {
            Some(w) => bitset::test(w, d),
            None => self.has_edge_scan(q),
        }
    }

    /// `delta_3(H)`, the minimum over all triples of `d_3(T)`.
    pub fn min_codegree(&self) -> Result<usize> {
        if self.n < 4 {
            return Err(Error::TooFewVertices(self.n));
        }
        let mut best = usize::MAX;
        for z in 2..self.n {
            for y in 1..z {
                for x in 0..y {
                    best = best.min(self.codegree([x, y, z]));
                    if best == 0 {
                        return Ok(0);
                    }
                }
            }
        }
        Ok(best)
    }

    /// Edges incident to `v`.
    pub fn degree(&self, v: usize) -> usize {
        self.edges.iter().filter(|e| e.contains(&(v as u32))).count()
    }
}
