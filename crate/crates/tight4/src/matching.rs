//! Maximum bipartite matching by augmenting paths (Kuhn's algorithm). Sizes in
//! the solver are at most a few dozen per side.

use alloc::vec;
use alloc::vec::Vec;

/// `adj[l]` lists the right vertices adjacent to left vertex `l`. Returns the
/// partner of every left vertex.
pub fn max_matching(right: usize, adj: &[Vec<usize>]) -> Vec<Option<usize>> {
    let mut owner: Vec<Option<usize>> = vec![None; right];
    for l in 0..adj.len() {
        let mut seen = vec![false; right];
        augment(l, adj, &mut owner, &mut seen);
    }
    let mut partner = vec![None; adj.len()];
    for (r, o) in owner.iter().enumerate() {
        if let Some(l) = *o {
            partner[l] = Some(r);
        }
    }
    partner
}

fn augment(l: usize, adj: &[Vec<usize>], owner: &mut [Option<usize>], seen: &mut [bool]) -> bool {
    for &r in &adj[l] {
        if seen[r] {
            continue;
        }
        seen[r] = true;
        if owner[r].is_none_or(|o| augment(o, adj, owner, seen)) {
            owner[r] = Some(l);
            return true;
        }
    }
    false
}

/// A matching saturating every left vertex, if one exists.
pub fn left_perfect(right: usize, adj: &[Vec<usize>]) -> Option<Vec<usize>> {
    max_matching(right, adj).into_iter().collect()
}

pub fn matching_size(m: &[Option<usize>]) -> usize {
    m.iter().filter(|x| x.is_some()).count()
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use rand::{Rng, SeedableRng};

    fn brute_max(right: usize, adj: &[Vec<usize>]) -> usize {
        fn go(i: usize, adj: &[Vec<usize>], used: &mut Vec<bool>) -> usize {
            if i == adj.len() {
                return 0;
            }
            let mut best = go(i + 1, adj, used);
            for &r in &adj[i] {
                if !used[r] {
                    used[r] = true;
                    best = best.max(1 + go(i + 1, adj, used));
                    used[r] = false;
                }
            }
            best
        }
        go(0, adj, &mut vec![false; right])
    }

    #[test]
    fn needs_augmentation() {
        // greedy would match 0-0 and strand 1
        let adj = vec![vec![0, 1], vec![0]];
        assert_eq!(left_perfect(2, &adj), Some(vec![1, 0]));
        assert_eq!(left_perfect(2, &[vec![0], vec![0]]), None);
    }

    proptest! {
        #[test]
        fn matches_brute_force(seed in any::<u64>(), l in 1usize..7, r in 1usize..7, p in 0.1f64..0.9) {
            let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
            let adj: Vec<Vec<usize>> = (0..l).map(|_| (0..r).filter(|_| rng.random_bool(p)).collect()).collect();
            let m = max_matching(r, &adj);
            prop_assert_eq!(matching_size(&m), brute_max(r, &adj));
            let mut used = vec![false; r];
            for (i, x) in m.iter().enumerate() {
                if let Some(x) = *x {
                    prop_assert!(adj[i].contains(&x) && !used[x]);
                    used[x] = true;
                }
            }
        }

        /// Minimum degree at least half the side size on both sides forces a
        /// perfect matching.
        #[test]
        fn dirac_regime_is_perfect(seed in any::<u64>(), k in 2usize..24) {
            let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
            let need = k.div_ceil(2);
            let mut mat = vec![vec![false; k]; k];
            for row in mat.iter_mut() {
                for x in row.iter_mut() { *x = rng.random_bool(0.6); }
            }
            // top up rows and columns to degree >= ceil(k/2)
            for row in mat.iter_mut() {
                while row.iter().filter(|&&x| x).count() < need {
                    row[rng.random_range(0..k)] = true;
                }
            }
            for j in 0..k {
                while mat.iter().filter(|r| r[j]).count() < need {
                    let i = rng.random_range(0..k);
                    mat[i][j] = true;
                }
            }
            let adj: Vec<Vec<usize>> = mat.iter().map(|r| (0..k).filter(|&j| r[j]).collect()).collect();
            prop_assert!(left_perfect(k, &adj).is_some());
        }
    }
}
