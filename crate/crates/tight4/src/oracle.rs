//! Exact answers at small `N`: subset DP over `(visited, ordered tail)` for
//! tight Hamiltonian paths and cycles, and exhaustive `b(H)`.

use alloc::vec;
use alloc::vec::Vec;

use crate::cert::{check_cycle, check_path, TightCycle, TightPath};
use crate::error::{Error, Result};
use crate::extremal::{build_complete, build_h0, build_h0_prime, count_aabb, BApproximation};
use crate::graph::Hypergraph4;
use crate::partition::Partition;

pub const DP_CAP: usize = 16;
pub const EXHAUSTIVE_B_CAP: usize = 20;
pub const SCAN_CAP: usize = 14;

/// `nb[(x*N + y)*N + z]` is `N({x,y,z})` as a bitmask.
fn nbr_masks(h: &Hypergraph4) -> Vec<u32> {
    let n = h.vertex_count();
    let mut nb = vec![0u32; n * n * n];
    for e in h.edges() {
        let e = e.map(|v| v as usize);
        for skip in 0..4 {
            let t: Vec<usize> = (0..4).filter(|&i| i != skip).map(|i| e[i]).collect();
            let bit = 1u32 << e[skip];
            for &(x, y, z) in &[
                (t[0], t[1], t[2]),
                (t[0], t[2], t[1]),
                (t[1], t[0], t[2]),
                (t[1], t[2], t[0]),
                (t[2], t[0], t[1]),
                (t[2], t[1], t[0]),
            ] {
                nb[(x * n + y) * n + z] |= bit;
            }
        }
    }
    nb
}

struct Dp {
    n: usize,
    tw: usize,
    reach: Vec<u64>,
}

impl Dp {
    fn new(n: usize) -> Self {
        let tw = (n * n * n).div_ceil(64);
        Dp { n, tw, reach: vec![0; (1usize << n) * tw] }
    }

    fn set(&mut self, mask: usize, t: usize) {
        self.reach[mask * self.tw + (t >> 6)] |= 1 << (t & 63);
    }

    fn get(&self, mask: usize, t: usize) -> bool {
        self.reach[mask * self.tw + (t >> 6)] >> (t & 63) & 1 == 1
    }

    fn tail(&self, x: usize, y: usize, z: usize) -> usize {
        (x * self.n + y) * self.n + z
    }

    /// Forward sweep over masks in increasing order (a superset is always
    /// numerically larger).
    fn sweep(&mut self, nb: &[u32], from: usize) {
        let n = self.n;
        let full = (1usize << n) - 1;
        for mask in from..=full {
            if mask & from != from {
                continue;
            }
            for wi in 0..self.tw {
                let mut word = self.reach[mask * self.tw + wi];
                while word != 0 {
                    let t = wi * 64 + word.trailing_zeros() as usize;
                    word &= word - 1;
                    let (y, z) = (t / n % n, t % n);
                    let mut cand = nb[t] & !(mask as u32);
                    while cand != 0 {
                        let w = cand.trailing_zeros() as usize;
                        cand &= cand - 1;
                        let nt = self.tail(y, z, w);
                        self.set(mask | 1 << w, nt);
                    }
                }
            }
        }
    }

    /// Walks back from a reachable `(mask, tail)` to a start state of size 3.
    fn reconstruct(&self, nb: &[u32], mut mask: usize, mut t: (usize, usize, usize)) -> Vec<usize> {
        let n = self.n;
        let mut rev = vec![t.2, t.1, t.0];
        while (mask as u32).count_ones() > 3 {
            let (x, y, z) = t;
            let prev = mask & !(1 << z);
            let mut found = None;
            for w in 0..n {
                if prev >> w & 1 == 1
                    && w != x
                    && w != y
                    && nb[self.tail(w, x, y)] >> z & 1 == 1
                    && self.get(prev, self.tail(w, x, y))
                {
                    found = Some(w);
                    break;
                }
            }
            let w = found.expect("reachable state has a predecessor");
            rev.push(w);
            mask = prev;
            t = (w, x, y);
        }
        rev.reverse();
        rev
    }
}

/// A tight Hamiltonian path or a definitive `None`.
pub fn exact_ham_path(h: &Hypergraph4) -> Result<Option<TightPath>> {
    let n = h.vertex_count();
    if n > DP_CAP {
        return Err(Error::TooLarge { n, cap: DP_CAP });
    }
    if n < 4 {
        return Ok(Some(TightPath { seq: (0..n).collect() }));
    }
    let nb = nbr_masks(h);
    let mut dp = Dp::new(n);
    for x in 0..n {
        for y in 0..n {
            for z in 0..n {
                if x != y && y != z && x != z {
                    let t = dp.tail(x, y, z);
                    dp.set(1 << x | 1 << y | 1 << z, t);
                }
            }
        }
    }
    dp.sweep(&nb, 0);
    let full = (1usize << n) - 1;
    for t in 0..n * n * n {
        if dp.get(full, t) {
            let seq = dp.reconstruct(&nb, full, (t / (n * n), t / n % n, t % n));
            debug_assert!(check_path(h, &seq).is_ok());
            return Ok(Some(TightPath { seq }));
        }
    }
    Ok(None)
}

/// A tight Hamiltonian cycle or a definitive `None`. Every cycle is rotated
/// to start at vertex 0, so one DP runs per ordered pair `(v1, v2)` after it.
pub fn exact_ham_cycle(h: &Hypergraph4) -> Result<Option<TightCycle>> {
    let n = h.vertex_count();
    if n > DP_CAP {
        return Err(Error::TooLarge { n, cap: DP_CAP });
    }
    if n < 5 {
        return Ok(None);
    }
    let nb = nbr_masks(h);
    let full = (1usize << n) - 1;
    let mut dp = Dp::new(n);
    for v1 in 1..n {
        for v2 in 1..n {
            if v1 == v2 {
                continue;
            }
            dp.reach.iter_mut().for_each(|w| *w = 0);
            let start = 1 | 1 << v1 | 1 << v2;
            let t0 = dp.tail(0, v1, v2);
            dp.set(start, t0);
            dp.sweep(&nb, start);
            for x in 0..n {
                for y in 0..n {
                    for z in 0..n {
                        let t = dp.tail(x, y, z);
                        if x == y || y == z || x == z || !dp.get(full, t) {
                            continue;
                        }
                        let closes = nb[dp.tail(x, y, z)] & 1 == 1
                            && nb[dp.tail(y, z, 0)] >> v1 & 1 == 1
                            && nb[dp.tail(z, 0, v1)] >> v2 & 1 == 1;
                        if closes {
                            let seq = dp.reconstruct(&nb, full, (x, y, z));
                            debug_assert!(check_cycle(h, &seq).is_ok());
                            return Ok(Some(TightCycle { seq }));
                        }
                    }
                }
            }
        }
    }
    Ok(None)
}

/// Exact `b(H)` over all partitions with `|A| = ceil(N/2)`.
pub fn exhaustive_b(h: &Hypergraph4) -> Result<BApproximation> {
    let n = h.vertex_count();
    if n > EXHAUSTIVE_B_CAP {
        return Err(Error::TooLarge { n, cap: EXHAUSTIVE_B_CAP });
    }
    if n < 4 {
        return Err(Error::TooFewVertices(n));
    }
    let masks: Vec<u32> = h.edges().iter().map(|e| e.iter().fold(0u32, |m, &v| m | 1 << v)).collect();
    let k = n.div_ceil(2);
    // For even N the labels A/B are interchangeable, so vertex 0 stays in A.
    let pin = n.is_multiple_of(2);
    let mut best = (u64::MAX, 0u32);
    let mut a: u32 = (1u32 << k) - 1;
    let limit: u64 = 1u64 << n;
    while (a as u64) < limit {
        if !pin || a & 1 == 1 {
            let mut c = 0u64;
            for &m in &masks {
                c += ((m & a).count_ones() == 2) as u64;
            }
            if c < best.0 {
                best = (c, a);
            }
        }
        // Gosper's hack: next mask with the same popcount.
        let low = a & a.wrapping_neg();
        let ripple = a.wrapping_add(low);
        if ripple == 0 {
            break;
        }
        a = (((ripple ^ a) >> 2) / low) | ripple;
    }
    let partition = Partition::from_a(n, (0..n).filter(|&v| best.1 >> v & 1 == 1))?;
    debug_assert_eq!(count_aabb(h, &partition), best.0);
    Ok(BApproximation { value: best.0, partition, exact: true })
}

#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum Family {
    H0,
    H0Prime,
    Complete,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ScanRow {
    pub family: Family,
    pub n: usize,
    pub min_codegree: usize,
    pub b: u64,
    pub has_path: bool,
    pub has_cycle: bool,
}

pub fn family_graph(family: Family, n: usize) -> Result<Hypergraph4> {
    match family {
        Family::H0 => build_h0(n.div_ceil(2), n / 2, false),
        Family::H0Prime => {
            let m = n.checked_sub(1).ok_or(Error::TooFewVertices(n))?;
            build_h0_prime(m.div_ceil(2), m / 2)
        }
        Family::Complete => {
            if n < 4 {
                Err(Error::TooFewVertices(n))
            } else {
                Ok(build_complete(n))
            }
        }
    }
}

/// `(delta_3, b, path?, cycle?)` for one member of a family.
pub fn threshold_scan(family: Family, n: usize) -> Result<ScanRow> {
    if n > SCAN_CAP {
        return Err(Error::TooLarge { n, cap: SCAN_CAP });
    }
    let h = family_graph(family, n)?;
    Ok(ScanRow {
        family,
        n,
        min_codegree: h.min_codegree()?,
        b: exhaustive_b(&h)?.value,
        has_path: exact_ham_path(&h)?.is_some(),
        has_cycle: exact_ham_cycle(&h)?.is_some(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::extremal::build_random;
    use proptest::prelude::*;

    fn brute_has_path(h: &Hypergraph4) -> bool {
        fn rec(h: &Hypergraph4, seq: &mut Vec<usize>, used: &mut Vec<bool>) -> bool {
            if seq.len() == h.vertex_count() {
                return true;
            }
            for v in 0..h.vertex_count() {
                if used[v] {
                    continue;
                }
                let l = seq.len();
                if l >= 3 && !h.has_edge([seq[l - 3], seq[l - 2], seq[l - 1], v]) {
                    continue;
                }
                used[v] = true;
                seq.push(v);
                if rec(h, seq, used) {
                    return true;
                }
                seq.pop();
                used[v] = false;
            }
            false
        }
        rec(h, &mut Vec::new(), &mut vec![false; h.vertex_count()])
    }

    #[test]
    fn h0_8_has_no_path() {
        let h = build_h0(4, 4, false).unwrap();
        assert_eq!(exact_ham_path(&h).unwrap(), None);
    }

    #[test]
    fn complete_graphs_are_yes() {
        let p = exact_ham_path(&build_complete(8)).unwrap().unwrap();
        assert_eq!(p.seq.len(), 8);
        let k9 = build_complete(9);
        let c = exact_ham_cycle(&k9).unwrap().unwrap();
        assert!(check_cycle(&k9, &c.seq).is_ok() && c.seq.len() == 9);
    }

    #[test]
    fn h0_prime_small_has_no_cycle() {
        let h = build_h0_prime(3, 3).unwrap();
        assert_eq!(exact_ham_cycle(&h).unwrap(), None);
    }

    #[test]
    fn caps() {
        let k17 = build_complete(17);
        assert!(matches!(exact_ham_path(&k17), Err(Error::TooLarge { .. })));
        assert!(matches!(exhaustive_b(&build_complete(21)), Err(Error::TooLarge { .. })));
        assert!(matches!(threshold_scan(Family::H0, 15), Err(Error::TooLarge { .. })));
    }

    #[test]
    fn exhaustive_b_small_values() {
        assert_eq!(exhaustive_b(&build_h0(4, 4, false).unwrap()).unwrap().value, 0);
        assert_eq!(exhaustive_b(&build_complete(8)).unwrap().value, 36);
        // odd N: no pinning, still exact
        assert_eq!(exhaustive_b(&build_h0(4, 3, false).unwrap()).unwrap().value, 0);
    }

    #[test]
    fn scan_rows() {
        for n in [8, 10] {
            let r = threshold_scan(Family::H0, n).unwrap();
            assert_eq!(r.min_codegree, n / 2 - 2);
            assert!(!r.has_path && !r.has_cycle);
            assert_eq!(r.b, 0);
        }
        let r = threshold_scan(Family::Complete, 7).unwrap();
        assert!(r.has_path && r.has_cycle);
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(24))]
        #[test]
        fn path_dp_matches_backtracking(seed in any::<u64>(), n in 5usize..9, p in 0.3f64..0.9) {
            let h = build_random(n, p, seed);
            let dp = exact_ham_path(&h).unwrap();
            prop_assert_eq!(dp.is_some(), brute_has_path(&h));
            if let Some(w) = dp {
                prop_assert!(check_path(&h, &w.seq).is_ok());
                prop_assert_eq!(w.seq.len(), n);
            }
        }

        #[test]
        fn dp_answer_invariant_under_relabeling(seed in any::<u64>(), n in 5usize..9) {
            use rand::seq::SliceRandom;
            use rand::SeedableRng;
            let h = build_random(n, 0.6, seed);
            let mut perm: Vec<usize> = (0..n).collect();
            perm.shuffle(&mut rand_chacha::ChaCha8Rng::seed_from_u64(seed ^ 7));
            let q: Vec<[usize; 4]> = h.edges().iter().map(|e| e.map(|v| perm[v as usize])).collect();
            let g = Hypergraph4::new(n, &q).unwrap();
            prop_assert_eq!(exact_ham_path(&h).unwrap().is_some(), exact_ham_path(&g).unwrap().is_some());
            prop_assert_eq!(exact_ham_cycle(&h).unwrap().is_some(), exact_ham_cycle(&g).unwrap().is_some());
        }
    }
}
