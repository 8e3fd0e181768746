//! Certificates: plain vertex sequences, always re-verified against the host
//! graph.

use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::graph::Hypergraph4;

#[derive(Clone, PartialEq, Eq, Debug, Default)]
pub struct TightPath {
    pub seq: Vec<usize>,
}

#[derive(Clone, PartialEq, Eq, Debug)]
pub struct TightCycle {
    pub seq: Vec<usize>,
}

/// Why a sequence is not a tight path or cycle.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum Violation {
    Repeated(usize),
    OutOfRange(usize),
    /// Index of the first window that is not an edge.
    MissingWindow(usize),
}

fn distinct(h: &Hypergraph4, seq: &[usize]) -> core::result::Result<(), Violation> {
    let mut seen = crate::VertexSet::new(h.vertex_count());
    for &v in seq {
        if v >= h.vertex_count() {
            return Err(Violation::OutOfRange(v));
        }
        if !seen.insert(v) {
            return Err(Violation::Repeated(v));
        }
    }
    Ok(())
}

/// Checks distinctness and every window of a path.
pub fn check_path(h: &Hypergraph4, seq: &[usize]) -> core::result::Result<(), Violation> {
    distinct(h, seq)?;
    for (i, w) in seq.windows(4).enumerate() {
        if !h.has_edge([w[0], w[1], w[2], w[3]]) {
            return Err(Violation::MissingWindow(i));
        }
    }
    Ok(())
}

/// Checks distinctness and all `l` cyclic windows.
pub fn check_cycle(h: &Hypergraph4, seq: &[usize]) -> core::result::Result<(), Violation> {
    distinct(h, seq)?;
    let l = seq.len();
    for i in 0..l {
        let w = [seq[i], seq[(i + 1) % l], seq[(i + 2) % l], seq[(i + 3) % l]];
        if !h.has_edge(w) {
            return Err(Violation::MissingWindow(i));
        }
    }
    Ok(())
}

pub fn verify_tight_path(h: &Hypergraph4, p: &TightPath) -> bool {
    check_path(h, &p.seq).is_ok()
}

pub fn verify_tight_cycle(h: &Hypergraph4, c: &TightCycle) -> Result<bool> {
    if c.seq.len() < 5 {
        return Err(Error::TooShort(c.seq.len()));
    }
    Ok(check_cycle(h, &c.seq).is_ok())
}

/// A certificate of either kind.
#[derive(Clone, PartialEq, Eq, Debug)]
pub enum Certificate {
    Path(TightPath),
    Cycle(TightCycle),
}

impl Certificate {
    pub fn seq(&self) -> &[usize] {
        match self {
            Certificate::Path(p) => &p.seq,
            Certificate::Cycle(c) => &c.seq,
        }
    }
}

pub fn is_hamiltonian_certificate(h: &Hypergraph4, c: &Certificate) -> bool {
    let ok = match c {
        Certificate::Path(p) => verify_tight_path(h, p),
        Certificate::Cycle(cy) => verify_tight_cycle(h, cy).unwrap_or(false),
    };
    ok && c.seq().len() == h.vertex_count()
}
