//! Shared solver state and the small searches every construction uses:
//! forced side patterns, end extension, and pattern-constrained path search.

use alloc::format;
use alloc::vec::Vec;

use rand::seq::SliceRandom;
use rand::Rng;
use rand_chacha::ChaCha8Rng;

use crate::bitset::VertexSet;
use crate::graph::Hypergraph4;
use crate::params::SolverParams;
use crate::partition::Partition;
use crate::trace::Trace;
use crate::typicality::{classify_all, Class, Thresholds, TypicalityReport};

/// Node budget for every small depth-first search.
pub(crate) const SEARCH_BUDGET: usize = 200_000;

/// Longest end extension tried: three forced vertices plus one more period.
pub(crate) const MAX_EXTENSION: usize = 7;

/// Typicality at the working scale. With escalation on, the fine scales are
/// doubled until at least 90% of the coarse-typical vertices are fine-typical.
pub fn working_report(h: &Hypergraph4, part: &Partition, params: &SolverParams, trace: &mut Trace) -> TypicalityReport {
    let base = Thresholds::from_params(params);
    let mut k = 1.0;
    loop {
        let rep = classify_all(h, part, base.scaled(k));
        let coarse = rep.count_coarse(Class::Typical);
        let fine = (0..h.vertex_count())
            .filter(|&v| rep.coarse_class(v) == Class::Typical && rep.vertex_typical(v))
            .count();
        let settled = 10 * fine >= 9 * coarse || base.vertex * k * 2.0 >= 1.0;
        if !params.typicality_escalation || settled {
            trace.push(format!(
                "typicality scale {k} eps1={:.3} typical={fine}/{coarse} medium={} anarchist={}",
                rep.eps.vertex,
                rep.count_coarse(Class::Medium),
                rep.count_coarse(Class::Anarchist)
            ));
            return rep;
        }
        k *= 2.0;
    }
}

/// Mutable state of one solve.
pub(crate) struct Ctx<'a> {
    pub h: &'a Hypergraph4,
    pub params: &'a SolverParams,
    pub rep: TypicalityReport,
    /// Vertices already placed in some structure.
    pub used: VertexSet,
    /// Vertices no construction may borrow: unabsorbed mediums, anarchists,
    /// parts of the good set.
    pub reserved: VertexSet,
    pub rng: ChaCha8Rng,
    pub trace: Trace,
}

impl<'a> Ctx<'a> {
    pub fn new(h: &'a Hypergraph4, params: &'a SolverParams, rep: TypicalityReport, rng: ChaCha8Rng) -> Self {
        let n = h.vertex_count();
        Ctx { h, params, rep, used: VertexSet::new(n), reserved: VertexSet::new(n), rng, trace: Trace::new() }
    }

    pub fn claim(&mut self, seq: &[usize]) {
        for &v in seq {
            let fresh = self.used.insert(v);
            debug_assert!(fresh, "vertex {v} placed twice");
        }
    }
}

/// Side (`true` = A) the vertex next to `w` must have for the window with `w`
/// to meet `A` an odd number of times.
pub(crate) fn forced_a(part: &Partition, w: &[usize]) -> bool {
    part.count_a(w).is_multiple_of(2)
}

/// Fine-typical vertices outside `blocked`, shuffled.
pub(crate) fn typical_pool<R: Rng + ?Sized>(rep: &TypicalityReport, blocked: &VertexSet, rng: &mut R) -> Vec<usize> {
    let mut v: Vec<usize> = (0..rep.vertex_count()).filter(|&v| !blocked.contains(v) && rep.vertex_typical(v)).collect();
    v.shuffle(rng);
    v
}

/// Extends `seq` at its back with typical vertices from `pool` (using only
/// typical-pattern windows) until the last triple lies in side `want_a` and is
/// fully typical. Returns the added vertices.
pub(crate) fn extend_back(
    h: &Hypergraph4,
    rep: &TypicalityReport,
    seq: &[usize],
    want_a: bool,
    pool: &[usize],
    blocked: &VertexSet,
) -> Option<Vec<usize>> {
    let part = &rep.part;
    let l = seq.len();
    if l < 3 {
        return None;
    }
    // the 4-periodic continuation holds three A's per period iff the last
    // triple is majority A; a medium in the triple may break the pattern
    let loose = seq[l - 3..].iter().any(|&v| !rep.vertex_typical(v));
    if !loose && (part.count_a(&seq[l - 3..]) >= 2) != want_a {
        return None;
    }
    let mut cur: Vec<usize> = seq[l - 3..].to_vec();
    let mut taken = blocked.clone();
    for &v in seq {
        taken.insert(v);
    }
    let mut budget = SEARCH_BUDGET;
    if grow(h, rep, &mut cur, want_a, pool, &mut taken, &mut budget) {
        Some(cur[3..].to_vec())
    } else {
        None
    }
}

fn end_done(h: &Hypergraph4, rep: &TypicalityReport, cur: &[usize], want_a: bool) -> bool {
    let l = cur.len();
    let t = [cur[l - 3], cur[l - 2], cur[l - 1]];
    t.iter().all(|&v| rep.part.is_a(v) == want_a) && rep.fully_typical(h, t)
}

fn grow(
    h: &Hypergraph4,
    rep: &TypicalityReport,
    cur: &mut Vec<usize>,
    want_a: bool,
    pool: &[usize],
    taken: &mut VertexSet,
    budget: &mut usize,
) -> bool {
    if end_done(h, rep, cur, want_a) {
        return true;
    }
    if cur.len() - 3 >= MAX_EXTENSION || *budget == 0 {
        return false;
    }
    let l = cur.len();
    let last = [cur[l - 3], cur[l - 2], cur[l - 1]];
    let side = forced_a(&rep.part, &last);
    // next to a medium vertex the window parity says nothing about the side
    let loose = last.iter().any(|&v| !rep.vertex_typical(v));
    // past the mediums the continuation is periodic and never changes majority
    if !loose && (rep.part.count_a(&last) >= 2) != want_a {
        return false;
    }
    let nb = h.neighborhood(last);
    for &v in pool {
        if *budget == 0 {
            return false;
        }
        if taken.contains(v) || (!loose && rep.part.is_a(v) != side) || !nb.contains(v) {
            continue;
        }
        *budget -= 1;
        taken.insert(v);
        cur.push(v);
        if grow(h, rep, cur, want_a, pool, taken, budget) {
            return true;
        }
        cur.pop();
        taken.remove(v);
    }
    false
}

/// Extends both ends of `core` (front to side `front_a`, back to the other
/// side) and returns the full sequence.
pub(crate) fn extend_both(
    h: &Hypergraph4,
    rep: &TypicalityReport,
    core: &[usize],
    front_a: bool,
    pool: &[usize],
    blocked: &VertexSet,
) -> Option<Vec<usize>> {
    let back = extend_back(h, rep, core, !front_a, pool, blocked)?;
    let mut seq = core.to_vec();
    seq.extend_from_slice(&back);
    seq.reverse();
    let front = extend_back(h, rep, &seq, front_a, pool, blocked)?;
    seq.extend_from_slice(&front);
    seq.reverse();
    Some(seq)
}

/// Fills the positions of a side pattern so every window whose four
/// positions are filled is an edge. `fixed` pins positions; free positions are
/// filled in `order` from `pool`.
pub(crate) struct PatternSearch<'p> {
    pub pattern: &'p [bool],
    pub order: &'p [usize],
    pub pool: &'p [usize],
}

impl PatternSearch<'_> {
    pub fn run(&self, h: &Hypergraph4, part: &Partition, fixed: &[(usize, usize)], mut accept: impl FnMut(&[usize]) -> bool) -> Option<Vec<usize>> {
        let k = self.pattern.len();
        let mut slots: Vec<Option<usize>> = alloc::vec![None; k];
        let mut taken = VertexSet::new(h.vertex_count());
        for &(p, v) in fixed {
            if part.is_a(v) != self.pattern[p] {
                return None;
            }
            slots[p] = Some(v);
            taken.insert(v);
        }
        let mut budget = SEARCH_BUDGET;
        if self.step(h, part, 0, &mut slots, &mut taken, &mut budget, &mut accept) {
            Some(slots.into_iter().map(|s| s.unwrap()).collect())
        } else {
            None
        }
    }

    #[allow(clippy::too_many_arguments)]
    fn step(
        &self,
        h: &Hypergraph4,
        part: &Partition,
        i: usize,
        slots: &mut Vec<Option<usize>>,
        taken: &mut VertexSet,
        budget: &mut usize,
        accept: &mut impl FnMut(&[usize]) -> bool,
    ) -> bool {
        if i == self.order.len() {
            let seq: Vec<usize> = slots.iter().map(|s| s.unwrap()).collect();
            return accept(&seq);
        }
        let p = self.order[i];
        // windows through p that become complete once p is filled
        let windows: Vec<[usize; 3]> = (p.saturating_sub(3)..=p)
            .filter(|&s| s + 3 < slots.len())
            .filter_map(|s| {
                let others: Vec<usize> = (s..s + 4).filter(|&q| q != p).filter_map(|q| slots[q]).collect();
                (others.len() == 3).then(|| [others[0], others[1], others[2]])
            })
            .collect();
        let nbs: Vec<VertexSet> = windows.iter().map(|&t| h.neighborhood(t)).collect();
        for &v in self.pool {
            if *budget == 0 {
                return false;
            }
            if taken.contains(v) || part.is_a(v) != self.pattern[p] || !nbs.iter().all(|nb| nb.contains(v)) {
                continue;
            }
            *budget -= 1;
            taken.insert(v);
            slots[p] = Some(v);
            if self.step(h, part, i + 1, slots, taken, budget, accept) {
                return true;
            }
            slots[p] = None;
            taken.remove(v);
        }
        false
    }
}

/// Reads a side pattern such as `"AABB"`.
pub(crate) fn pattern(s: &str) -> Vec<bool> {
    s.bytes().map(|c| c == b'A').collect()
}
