//! Tight Hamiltonian paths and cycles in 4-uniform hypergraphs close to the
//! extremal construction `H0` (quadruples meeting `A` in an odd number of
//! vertices).
//!
//! The crate is `no_std` with `alloc`. Everything that touches the file system
//! or a clock lives in the `tight4-cli` crate; timings reach the solver through
//! [`trace::Trace::with_clock`].
//!
//! Conventions used throughout: `N` is the vertex count, `n = N / 2` (rounded
//! down), and a partition puts the extra vertex of odd `N` on side `A`.

#![cfg_attr(not(test), no_std)]

extern crate alloc;

pub mod assembly;
pub mod bitset;
pub mod cert;
pub mod connector;
pub mod error;
pub mod extremal;
pub mod format;
pub mod graph;
pub mod graph3;
pub mod matching;
pub mod oracle;
pub mod params;
pub mod parity;
pub mod partition;
pub mod trace;
pub mod typicality;

mod ctx;

pub use bitset::VertexSet;
pub use cert::{TightCycle, TightPath};
pub use error::{Error, Result};
pub use graph::Hypergraph4;
pub use params::SolverParams;
pub use partition::{Partition, Side};

/// `n choose k` for the small arguments used in bounds and counts.
pub fn binom(n: u64, k: u64) -> u64 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    let mut r: u64 = 1;
    for i in 0..k {
        r = r * (n - i) / (i + 1);
    }
    r
}

#[cfg(test)]
mod tests {
    use super::binom;

    #[test]
    fn binom_small_values() {
        assert_eq!(binom(4, 3), 4);
        assert_eq!(binom(2, 3), 0);
        assert_eq!(binom(20, 10), 184_756);
        assert_eq!(binom(0, 0), 1);
    }
}
