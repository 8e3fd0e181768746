//! Short tight paths between two typical triples using only typical
//! (AAAB/ABBB) edges.
//!
//! Every window of such a path meets `A` in an odd number of vertices, so the
//! side sequence is 4-periodic and fixed by the first triple: AAV triples
//! continue as rotations of AAAB, BBV triples as rotations of ABBB. Which
//! rotation the final triple sits in fixes the interior length mod 4.

use alloc::format;
use alloc::string::ToString;
use alloc::vec::Vec;

use rand::Rng;

use crate::bitset::{self, VertexSet};
use crate::cert::TightPath;
use crate::error::{Error, Result};
use crate::graph::Hypergraph4;
use crate::params::SolverParams;
use crate::partition::Partition;
use crate::typicality::TypicalityReport;

/// Longest connector, end triples included.
pub const MAX_CONNECTOR: usize = 12;

/// DFS node budget for filling one interior.
const FILL_BUDGET: usize = 200_000;

#[derive(Clone, Debug)]
pub struct ConnectorRequest {
    /// The path starts with these three vertices in this order.
    pub from: [usize; 3],
    /// The path ends with these three vertices in this order.
    pub to: [usize; 3],
    pub avoid: VertexSet,
}

#[derive(Clone, Debug)]
pub struct ConnectorSet {
    pub set: VertexSet,
}

/// Both triples have at least two `A` vertices, or both at least two `B`.
pub fn is_h0_connected(part: &Partition, t1: [usize; 3], t2: [usize; 3]) -> bool {
    (part.count_a(&t1) >= 2) == (part.count_a(&t2) >= 2)
}

/// Every AAAB/ABBB quadruple inside `s` is an edge.
pub fn is_h0_complete(h: &Hypergraph4, part: &Partition, s: &[usize]) -> bool {
    first_missing(h, part, s, &[]).is_none()
}

/// The first odd-intersection quadruple of `s` missing from `h`, reported by
/// how many of its vertices lie in `marked`.
fn first_missing(h: &Hypergraph4, part: &Partition, s: &[usize], marked: &[usize]) -> Option<usize> {
    let k = s.len();
    for i in 0..k {
        for j in i + 1..k {
            for l in j + 1..k {
                for m in l + 1..k {
                    let q = [s[i], s[j], s[l], s[m]];
                    if part.count_a(&q) % 2 == 1 && !h.has_edge(q) {
                        return Some(q.iter().filter(|v| marked.contains(v)).count());
                    }
                }
            }
        }
    }
    None
}

fn pattern_from(part: &Partition, from: [usize; 3]) -> [bool; 4] {
    let s = [part.is_a(from[0]), part.is_a(from[1]), part.is_a(from[2])];
    let fourth = (s.iter().filter(|&&x| x).count() % 2) == 0;
    [s[0], s[1], s[2], fourth]
}

/// Interior length mod 4 that lands `to` on the periodic pattern started by
/// `from`, or `None` when the triples are not H₀-connected.
pub fn interior_residue(part: &Partition, from: [usize; 3], to: [usize; 3]) -> Option<usize> {
    let p = pattern_from(part, from);
    let t = [part.is_a(to[0]), part.is_a(to[1]), part.is_a(to[2])];
    (0..4).find(|&j| (0..3).all(|i| p[(j + i) % 4] == t[i])).map(|j| (j + 1) % 4)
}

/// Admissible interior lengths, shortest first, within the 12-vertex cap.
pub fn interior_lengths(part: &Partition, from: [usize; 3], to: [usize; 3], min_interior: usize) -> Vec<usize> {
    let Some(r) = interior_residue(part, from, to) else {
        return Vec::new();
    };
    (0..2).map(|i| r + 4 * i).filter(|&k| k >= min_interior && k + 6 <= MAX_CONNECTOR).collect()
}

/// Fills `k` interior vertices from `pool` so every window of
/// `from ++ interior ++ to` is an edge. Candidates are tried in the order of
/// `order`.
pub(crate) fn fill_interior(
    h: &Hypergraph4,
    part: &Partition,
    from: [usize; 3],
    to: [usize; 3],
    k: usize,
    pool: &VertexSet,
    order: &[usize],
) -> Option<Vec<usize>> {
    let p = pattern_from(part, from);
    let mut seq: Vec<usize> = from.to_vec();
    let mut budget = FILL_BUDGET;
    let mut used = pool.clone();
    for v in from.iter().chain(to.iter()) {
        used.remove(*v);
    }
    if fill(h, part, &p, &mut seq, k, &to, &mut used, order, &mut budget) {
        seq.extend_from_slice(&to);
        Some(seq)
    } else {
        None
    }
}

#[allow(clippy::too_many_arguments)]
fn fill(
    h: &Hypergraph4,
    part: &Partition,
    p: &[bool; 4],
    seq: &mut Vec<usize>,
    k: usize,
    to: &[usize; 3],
    avail: &mut VertexSet,
    order: &[usize],
    budget: &mut usize,
) -> bool {
    if seq.len() == 3 + k {
        let l = seq.len();
        let full = |i: usize| if i < l { seq[i] } else { to[i - l] };
        return (l..l + 3).all(|end| h.has_edge([full(end - 3), full(end - 2), full(end - 1), full(end)]));
    }
    let pos = seq.len();
    let want_a = p[pos % 4];
    let l = seq.len();
    let nb = h.neighborhood([seq[l - 3], seq[l - 2], seq[l - 1]]);
    for &v in order {
        if *budget == 0 {
            return false;
        }
        if !avail.contains(v) || part.is_a(v) != want_a || !nb.contains(v) {
            continue;
        }
        *budget -= 1;
        avail.remove(v);
        seq.push(v);
        if fill(h, part, p, seq, k, to, avail, order, budget) {
            return true;
        }
        seq.pop();
        avail.insert(v);
    }
    false
}

fn check_request(rep: &TypicalityReport, h: &Hypergraph4, req: &ConnectorRequest) -> Result<()> {
    let part = &rep.part;
    let n = h.vertex_count() / 2;
    if req.avoid.len() > 2 * n / 3 {
        return Err(Error::HypothesisViolated(format!("|K| = {} exceeds 2n/3 = {}", req.avoid.len(), 2 * n / 3)));
    }
    let mut all: Vec<usize> = req.from.iter().chain(req.to.iter()).copied().collect();
    if all.iter().any(|&v| v >= h.vertex_count() || req.avoid.contains(v)) {
        return Err(Error::HypothesisViolated("end triples meet K".to_string()));
    }
    all.sort_unstable();
    all.dedup();
    if all.len() != 6 {
        return Err(Error::HypothesisViolated("end triples are not disjoint".to_string()));
    }
    if !is_h0_connected(part, req.from, req.to) {
        return Err(Error::HypothesisViolated("end triples are not H0-connected".to_string()));
    }
    for t in [req.from, req.to] {
        if !rep.fully_typical(h, t) {
            return Err(Error::HypothesisViolated(format!("triple {t:?} is not typical")));
        }
    }
    Ok(())
}

/// One draw per vertex regardless of `K`, so the stream of candidate sets is
/// the same for every avoid set.
fn draw_set<R: Rng + ?Sized>(n_total: usize, p: f64, excluded: &VertexSet, rng: &mut R) -> VertexSet {
    let mut t = VertexSet::new(n_total);
    for v in 0..n_total {
        let hit = rng.random::<f64>() < p;
        if hit && !excluded.contains(v) {
            t.insert(v);
        }
    }
    t
}

fn excluded(n_total: usize, req: &ConnectorRequest) -> VertexSet {
    let mut x = req.avoid.clone();
    debug_assert_eq!(x.capacity(), n_total);
    for &v in req.from.iter().chain(req.to.iter()) {
        x.insert(v);
    }
    x
}

/// Result of testing one sampled set: `Ok` or the index of the tally to bump.
fn judge(h: &Hypergraph4, part: &Partition, t: &VertexSet, req: &ConnectorRequest) -> core::result::Result<(), usize> {
    let a = bitset::and_count(t.words(), part.a_set().words());
    if a < 5 || t.len() - a < 5 {
        return Err(0);
    }
    for tri in [req.from, req.to] {
        let mut s = t.to_vec();
        s.extend_from_slice(&tri);
        if let Some(k) = first_missing(h, part, &s, &tri) {
            return Err(1 + k);
        }
    }
    Ok(())
}

/// Draws `T` with inclusion probability `sample_rate_numerator / n` until
/// `T ∪ from` and `T ∪ to` are both H₀-complete with five vertices of `T` on
/// each side.
pub fn sample_connector_set<R: Rng + ?Sized>(
    h: &Hypergraph4,
    rep: &TypicalityReport,
    req: &ConnectorRequest,
    params: &SolverParams,
    rng: &mut R,
) -> Result<ConnectorSet> {
    check_request(rep, h, req)?;
    let (set, _) = sample_loop(h, &rep.part, req, params, rng, |_| Some(()))?;
    Ok(ConnectorSet { set })
}

fn sample_loop<R: Rng + ?Sized, T>(
    h: &Hypergraph4,
    part: &Partition,
    req: &ConnectorRequest,
    params: &SolverParams,
    rng: &mut R,
    mut accept: impl FnMut(&VertexSet) -> Option<T>,
) -> Result<(VertexSet, T)>
where
    T: Sized,
{
    let n_total = h.vertex_count();
    let p = params.sample_probability(n_total / 2);
    let ex = excluded(n_total, req);
    let mut tallies = [0usize; 5];
    for _ in 0..params.connector_retry_budget {
        let t = draw_set(n_total, p, &ex, rng);
        match judge(h, part, &t, req) {
            Ok(()) => {
                if let Some(x) = accept(&t) {
                    return Ok((t, x));
                }
            }
            Err(i) => tallies[i] += 1,
        }
    }
    Err(Error::BudgetExhausted { attempts: params.connector_retry_budget, tallies })
}

/// Per-attempt outcome of [`sample_connector_set`]'s test, for statistics.
pub fn sample_attempt<R: Rng + ?Sized>(
    h: &Hypergraph4,
    part: &Partition,
    req: &ConnectorRequest,
    params: &SolverParams,
    rng: &mut R,
) -> core::result::Result<VertexSet, usize> {
    let n_total = h.vertex_count();
    let t = draw_set(n_total, params.sample_probability(n_total / 2), &excluded(n_total, req), rng);
    judge(h, part, &t, req).map(|()| t)
}

fn shuffled<R: Rng + ?Sized>(set: &VertexSet, rng: &mut R) -> Vec<usize> {
    use rand::seq::SliceRandom;
    let mut v = set.to_vec();
    v.shuffle(rng);
    v
}

fn build_from_set<R: Rng + ?Sized>(
    h: &Hypergraph4,
    part: &Partition,
    req: &ConnectorRequest,
    t: &VertexSet,
    min_interior: usize,
    rng: &mut R,
) -> Option<Vec<usize>> {
    let order = shuffled(t, rng);
    interior_lengths(part, req.from, req.to, min_interior)
        .into_iter()
        .find_map(|k| fill_interior(h, part, req.from, req.to, k, t, &order))
}

/// A tight path of at most 12 vertices from `req.from` to `req.to` whose
/// interior comes from a sampled H₀-complete connector set.
pub fn connect_triples<R: Rng + ?Sized>(
    h: &Hypergraph4,
    rep: &TypicalityReport,
    req: &ConnectorRequest,
    params: &SolverParams,
    rng: &mut R,
) -> Result<TightPath> {
    check_request(rep, h, req)?;
    let part = &rep.part;
    let min = params.connector_min_interior;
    let mut inner = rng.clone_seed();
    let (_, seq) = sample_loop(h, part, req, params, rng, |t| build_from_set(h, part, req, t, min, &mut inner))?;
    Ok(TightPath { seq })
}

/// Solver-side connector: no cap on `|K|` and no typicality check on the
/// triples (callers pass triples they have vetted). Tries sampled sets first,
/// then every vertex outside `K`.
pub fn link_triples<R: Rng + ?Sized>(
    h: &Hypergraph4,
    part: &Partition,
    req: &ConnectorRequest,
    params: &SolverParams,
    rng: &mut R,
) -> Result<TightPath> {
    if !is_h0_connected(part, req.from, req.to) {
        return Err(Error::HypothesisViolated("end triples are not H0-connected".to_string()));
    }
    let min = params.connector_min_interior;
    let n_total = h.vertex_count();
    let p = params.sample_probability(n_total / 2);
    let ex = excluded(n_total, req);
    for _ in 0..params.connector_retry_budget.min(8) {
        let t = draw_set(n_total, p, &ex, rng);
        if let Some(seq) = build_from_set(h, part, req, &t, min, rng) {
            return Ok(TightPath { seq });
        }
    }
    let mut pool = VertexSet::full(n_total);
    pool.difference_with(&ex);
    build_from_set(h, part, req, &pool, min, rng)
        .map(|seq| TightPath { seq })
        .ok_or_else(|| Error::ConstructionFailed {
            stage: "connector",
            detail: format!("no typical path from {:?} to {:?}", req.from, req.to),
        })
}

/// Seeds an independent stream so inner searches do not perturb the
/// attempt stream.
trait CloneSeed {
    fn clone_seed(&mut self) -> rand_chacha::ChaCha8Rng;
}

impl<R: Rng + ?Sized> CloneSeed for R {
    fn clone_seed(&mut self) -> rand_chacha::ChaCha8Rng {
        use rand::SeedableRng;
        rand_chacha::ChaCha8Rng::seed_from_u64(self.random())
    }
}

/// Every window is an AAAB or ABBB edge of `h`.
pub fn all_windows_typical(h: &Hypergraph4, part: &Partition, seq: &[usize]) -> bool {
    seq.windows(4).all(|w| part.count_a(w) % 2 == 1 && h.has_edge([w[0], w[1], w[2], w[3]]))
}
