//! Tight Hamiltonian paths near `H0`: a bridge crosses from the A-pattern to
//! the B-pattern, an absorbing path `Q` swallows the medium vertices, the
//! anarchists change sides, and the rest is woven onto both ends of `Q`.
//!
//! Orientation conventions: a [`Bridge`] runs from its AAA end to its BBB end;
//! `Q` runs from a BBB end to an AAA end. The A-pattern extension after `Q`'s
//! AAA end is the "top" part, the B-pattern one before its BBB end the "zig".

use alloc::format;
use alloc::string::ToString;
use alloc::vec;
use alloc::vec::Vec;

use rand::seq::{IndexedRandom, SliceRandom};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::bitset::{self, VertexSet};
use crate::cert::{check_path, TightPath};
use crate::connector::{link_triples, ConnectorRequest};
use crate::ctx::{extend_back, extend_both, forced_a, typical_pool, Ctx, SEARCH_BUDGET};
use crate::error::{Error, Result};
use crate::extremal::{compute_b_with, count_aabb, path_threshold, repair_sides, BApproximation};
use crate::graph::Hypergraph4;
use crate::graph3::Graph3;
use crate::matching::{matching_size, max_matching};
use crate::params::SolverParams;
use crate::parity::path_difference;
use crate::partition::Partition;
use crate::trace::Trace;
use crate::typicality::{classify_link, link_profiles, Class, TypicalityReport};

pub use crate::ctx::working_report;

/// Largest bridge `build_bridge` may return.
pub const BRIDGE_CAP: usize = 25;
/// Any bridge, including those grown by switchers.
pub const BRIDGE_HARD_CAP: usize = 800;
/// Vertices in one absorber piece `v1 v2 v3 z v4 v5 v6`.
pub const PIECE_LEN: usize = 7;
/// Remaining sets at most this large are completed by exhaustive search.
const SMALL_REST: usize = 12;

#[derive(Clone, Debug, PartialEq)]
pub struct Bridge {
    pub path: TightPath,
    pub end_aaa: [usize; 3],
    pub end_bbb: [usize; 3],
    pub difference: u8,
}

impl Bridge {
    /// Validates a sequence running from a fully typical AAA triple to a fully
    /// typical BBB triple.
    pub fn from_seq(h: &Hypergraph4, rep: &TypicalityReport, seq: Vec<usize>) -> Result<Bridge> {
        let part = &rep.part;
        let fail = |detail: &str| Error::ConstructionFailed { stage: "bridge", detail: detail.to_string() };
        let l = seq.len();
        if !(6..=BRIDGE_HARD_CAP).contains(&l) {
            return Err(fail("length out of range"));
        }
        check_path(h, &seq).map_err(|v| fail(&format!("{v:?}")))?;
        let end_aaa = [seq[0], seq[1], seq[2]];
        let end_bbb = [seq[l - 3], seq[l - 2], seq[l - 1]];
        if part.count_a(&end_aaa) != 3 || part.count_a(&end_bbb) != 0 {
            return Err(fail("ends are not AAA and BBB"));
        }
        if !rep.fully_typical(h, end_aaa) || !rep.fully_typical(h, end_bbb) {
            return Err(fail("end triple not typical"));
        }
        let difference = path_difference(part, &seq);
        Ok(Bridge { path: TightPath { seq }, end_aaa, end_bbb, difference })
    }

    pub fn len(&self) -> usize {
        self.path.seq.len()
    }

    pub fn is_empty(&self) -> bool {
        self.path.seq.is_empty()
    }

    pub fn vertex_set(&self, n: usize) -> VertexSet {
        VertexSet::from_iter(n, self.path.seq.iter().copied())
    }
}

#[derive(Clone, Debug)]
pub struct AbsorberPath {
    /// Runs from a BBB end to an AAA end.
    pub path: TightPath,
    pub bridge: Bridge,
    pub absorbed: Vec<usize>,
    /// The 7-vertex pieces, one per absorbed vertex.
    pub pieces: Vec<Vec<usize>>,
}

/// Boundary triples with the set sequenced between them.
#[derive(Clone, Debug, PartialEq)]
pub struct Sequencing {
    /// `from ++ order of X ++ to`.
    pub seq: Vec<usize>,
}

/// `x.ceil()` for non-negative `x`, without `std`.
fn ceil(x: f64) -> usize {
    let t = x as usize;
    if (t as f64) < x { t + 1 } else { t }
}

fn anarchists(rep: &TypicalityReport) -> VertexSet {
    VertexSet::from_iter(rep.vertex_count(), rep.with_coarse_class(Class::Anarchist))
}

fn mediums(rep: &TypicalityReport) -> Vec<usize> {
    rep.with_coarse_class(Class::Medium)
}

/// Orients `core` so its first triple is majority A and its last majority B,
/// then extends both ends.
pub(crate) fn bridge_from_core(
    h: &Hypergraph4,
    rep: &TypicalityReport,
    core: &[usize],
    pool: &[usize],
    blocked: &VertexSet,
) -> Option<Bridge> {
    let part = &rep.part;
    let l = core.len();
    let a_first = part.count_a(&core[..3]) >= 2;
    let a_last = part.count_a(&core[l - 3..]) >= 2;
    let mut c = core.to_vec();
    match (a_first, a_last) {
        (true, false) => {}
        (false, true) => c.reverse(),
        _ => return None,
    }
    let seq = extend_both(h, rep, &c, true, pool, blocked)?;
    Bridge::from_seq(h, rep, seq).ok()
}

/// A greedy tight path in a dense 3-graph, extended with backtracking.
pub fn greedy_dense_path<R: Rng + ?Sized>(g: &Graph3, a: f64, rng: &mut R) -> Result<Vec<usize>> {
    let m = g.vertex_count();
    let total = crate::binom(m as u64, 3) as f64;
    if g.edge_count() == 0 || (g.edge_count() as f64) < a * total {
        return Err(Error::DensityTooLow);
    }
    let target = ((a * m as f64 / 3.0) as usize).max(3);
    let mut starts: Vec<[usize; 3]> = Vec::new();
    for x in 0..m {
        for y in x + 1..m {
            for z in bitset::iter_bits(g.pair_nbr(x, y)).filter(|&z| z > y) {
                starts.push([x, y, z]);
            }
        }
    }
    starts.shuffle(rng);
    let mut best: Vec<usize> = Vec::new();
    let mut budget = SEARCH_BUDGET;
    for s in starts.into_iter().take(64) {
        let mut path = s.to_vec();
        let mut on = vec![false; m];
        for &v in &s {
            on[v] = true;
        }
        longest(g, &mut path, &mut on, &mut best, &mut budget);
        if best.len() == m || budget == 0 {
            break;
        }
    }
    if best.len() >= target {
        Ok(best)
    } else {
        Err(Error::SearchExhausted)
    }
}

fn longest(g: &Graph3, path: &mut Vec<usize>, on: &mut [bool], best: &mut Vec<usize>, budget: &mut usize) {
    if path.len() > best.len() {
        *best = path.clone();
    }
    if best.len() == on.len() || *budget == 0 {
        return;
    }
    let l = path.len();
    let cands: Vec<usize> = bitset::iter_bits(g.pair_nbr(path[l - 2], path[l - 1])).filter(|&w| !on[w]).collect();
    for w in cands {
        if *budget == 0 || best.len() == on.len() {
            return;
        }
        *budget -= 1;
        on[w] = true;
        path.push(w);
        longest(g, path, on, best, budget);
        path.pop();
        on[w] = false;
    }
}

/// A bridge avoiding `avoid`: through an AABB edge on typical pairs when one
/// exists, otherwise through a vertex `z` in `N(a1,a2,b1) ∩ N(a1,b1,b2)`.
pub fn build_bridge<R: Rng + ?Sized>(
    h: &Hypergraph4,
    rep: &TypicalityReport,
    params: &SolverParams,
    avoid: &VertexSet,
    rng: &mut R,
) -> Result<Bridge> {
    build_bridge_logged(h, rep, params, avoid, rng).map(|(b, _)| b)
}

/// As [`build_bridge`], also naming the branch taken (`direct` or `z`).
pub fn build_bridge_logged<R: Rng + ?Sized>(
    h: &Hypergraph4,
    rep: &TypicalityReport,
    params: &SolverParams,
    avoid: &VertexSet,
    rng: &mut R,
) -> Result<(Bridge, &'static str)> {
    let n = h.vertex_count();
    if n < params.min_solver_n {
        return Err(Error::ConstructionFailed { stage: "bridge", detail: format!("N={n} below min_solver_n") });
    }
    let part = &rep.part;
    let mut blocked = avoid.clone();
    blocked.union_with(&anarchists(rep));
    let pool = typical_pool(rep, &blocked, rng);
    let ok = |v: usize| !blocked.contains(v) && rep.vertex_typical(v);

    // direct branch
    let mut tried = 0;
    let offset = rng.random_range(0..h.edge_count().max(1));
    let edges = h.edges();
    for i in 0..edges.len() {
        let e = edges[(i + offset) % edges.len()].map(|x| x as usize);
        if part.count_a(&e) != 2 || !e.iter().all(|&v| ok(v)) {
            continue;
        }
        let (a, b): (Vec<usize>, Vec<usize>) = e.iter().partition(|&&v| part.is_a(v));
        if !rep.pair_typical(a[0], a[1]) || !rep.pair_typical(b[0], b[1]) {
            continue;
        }
        for core in [[a[1], a[0], b[0], b[1]], [a[0], a[1], b[1], b[0]]] {
            if let Some(br) = bridge_from_core(h, rep, &core, &pool, &blocked) {
                check_bridge_cap(&br)?;
                return Ok((br, "direct"));
            }
        }
        tried += 1;
        if tried >= 64 {
            break;
        }
    }

    // z branch
    let a_pool: Vec<usize> = pool.iter().copied().filter(|&v| part.is_a(v)).collect();
    let b_pool: Vec<usize> = pool.iter().copied().filter(|&v| !part.is_a(v)).collect();
    if a_pool.len() < 2 || b_pool.len() < 2 {
        return Err(Error::ConstructionFailed { stage: "bridge", detail: "too few typical vertices".into() });
    }
    let anar = anarchists(rep);
    for _ in 0..300 {
        let pick2 = |p: &[usize], rng: &mut R| {
            let i = rng.random_range(0..p.len());
            let mut j = rng.random_range(0..p.len() - 1);
            if j >= i {
                j += 1;
            }
            (p[i], p[j])
        };
        let (a1, a2) = pick2(&a_pool, rng);
        let (b1, b2) = pick2(&b_pool, rng);
        if !rep.pair_typical(a1, a2) || !rep.pair_typical(b1, b2) {
            continue;
        }
        let mut zs = h.neighborhood([a1, a2, b1]);
        zs.intersect_with(h.neighborhood([a1, b1, b2]).words());
        let mut zs: Vec<usize> = zs.iter().filter(|&z| !avoid.contains(z) && !anar.contains(z)).collect();
        zs.shuffle(rng);
        for z in zs.into_iter().take(4) {
            let mut bl = blocked.clone();
            bl.insert(z);
            let core = [a2, a1, b1, z, b2];
            if let Some(br) = bridge_from_core(h, rep, &core, &pool, &bl) {
                check_bridge_cap(&br)?;
                return Ok((br, "z"));
            }
        }
    }
    Err(Error::ConstructionFailed { stage: "bridge", detail: "no typical pair pair led to a bridge".into() })
}

fn check_bridge_cap(b: &Bridge) -> Result<()> {
    if b.len() > BRIDGE_CAP {
        return Err(Error::ConstructionFailed { stage: "bridge", detail: format!("{} vertices exceed {BRIDGE_CAP}", b.len()) });
    }
    Ok(())
}

/// Two vertex-disjoint bridges; the second avoids the first.
pub fn build_disjoint_bridges<R: Rng + ?Sized>(
    h: &Hypergraph4,
    rep: &TypicalityReport,
    params: &SolverParams,
    avoid: &VertexSet,
    rng: &mut R,
) -> Result<(Bridge, Bridge)> {
    let m1 = build_bridge(h, rep, params, avoid, rng)?;
    let mut k = avoid.clone();
    k.union_with(&m1.vertex_set(h.vertex_count()));
    let m2 = build_bridge(h, rep, params, &k, rng)?;
    debug_assert!(m1.vertex_set(h.vertex_count()).is_disjoint(&m2.vertex_set(h.vertex_count())));
    Ok((m1, m2))
}

/// `v1 v2 v3 z v4 v5 v6` where every `v`-triple is in `z`'s own-pattern link
/// (AAB for `z` in A, ABB for `z` in B) and both end triples are fully typical.
pub(crate) fn absorber_piece<R: Rng + ?Sized>(
    h: &Hypergraph4,
    rep: &TypicalityReport,
    z: usize,
    pool: &[usize],
    rng: &mut R,
) -> Option<Vec<usize>> {
    let part = &rep.part;
    let z_a = part.is_a(z);
    let want = if z_a { 2 } else { 1 };
    let (own, other): (Vec<usize>, Vec<usize>) = pool.iter().partition(|&&v| part.is_a(v) == z_a);
    for _ in 0..12 {
        let mut w: Vec<usize> = own.choose_multiple(rng, 16).copied().collect();
        w.extend(other.choose_multiple(rng, 8));
        let m = w.len();
        if m < 6 {
            return None;
        }
        let mut g = Graph3::new(m);
        for i in 0..m {
            for j in i + 1..m {
                for k in j + 1..m {
                    let t = [w[i], w[j], w[k]];
                    if part.count_a(&t) == want && h.has_edge([t[0], t[1], t[2], z]) {
                        g.add_edge([i, j, k]);
                    }
                }
            }
        }
        let good = |p: &[usize]| {
            let v: Vec<usize> = p.iter().map(|&i| w[i]).collect();
            rep.fully_typical(h, [v[0], v[1], v[2]]) && rep.fully_typical(h, [v[3], v[4], v[5]])
        };
        let density = g.edge_count() as f64 / crate::binom(m as u64, 3).max(1) as f64;
        let mut found = greedy_dense_path(&g, density, rng)
            .ok()
            .and_then(|p| p.windows(6).find(|s| good(s)).map(|s| s.to_vec()));
        if found.is_none() {
            found = six_path(&g, &good);
        }
        if let Some(p) = found {
            let v: Vec<usize> = p.iter().map(|&i| w[i]).collect();
            let piece = vec![v[0], v[1], v[2], z, v[3], v[4], v[5]];
            if check_path(h, &piece).is_ok() {
                return Some(piece);
            }
        }
    }
    None
}

fn six_path(g: &Graph3, good: &impl Fn(&[usize]) -> bool) -> Option<Vec<usize>> {
    fn go(g: &Graph3, p: &mut Vec<usize>, good: &impl Fn(&[usize]) -> bool, budget: &mut usize) -> bool {
        if p.len() == 6 {
            return good(p);
        }
        let l = p.len();
        let cands: Vec<usize> = if l < 2 {
            (0..g.vertex_count()).collect()
        } else if l == 2 {
            (0..g.vertex_count()).filter(|&w| g.has_edge([p[0], p[1], w])).collect()
        } else {
            bitset::iter_bits(g.pair_nbr(p[l - 2], p[l - 1])).collect()
        };
        for w in cands {
            if *budget == 0 {
                return false;
            }
            if p.contains(&w) {
                continue;
            }
            *budget -= 1;
            p.push(w);
            if go(g, p, good, budget) {
                return true;
            }
            p.pop();
        }
        false
    }
    let mut p = Vec::new();
    let mut budget = SEARCH_BUDGET;
    go(g, &mut p, good, &mut budget).then_some(p)
}

/// Appends `piece` (in whichever orientation connects) to `seq` through a
/// connector.
fn append_piece<R: Rng + ?Sized>(
    h: &Hypergraph4,
    part: &Partition,
    params: &SolverParams,
    seq: &mut Vec<usize>,
    piece: &[usize],
    blocked: &VertexSet,
    rng: &mut R,
) -> Result<()> {
    let l = seq.len();
    let from = [seq[l - 3], seq[l - 2], seq[l - 1]];
    let mut avoid = blocked.clone();
    for &v in seq.iter() {
        avoid.insert(v);
    }
    let mut last = None;
    for p in [piece.to_vec(), piece.iter().rev().copied().collect::<Vec<_>>()] {
        let req = ConnectorRequest { from, to: [p[0], p[1], p[2]], avoid: avoid.clone() };
        match link_triples(h, part, &req, params, rng) {
            Ok(c) => {
                seq.extend_from_slice(&c.seq[3..]);
                seq.extend_from_slice(&p[3..]);
                return Ok(());
            }
            Err(e) => last = Some(e),
        }
    }
    Err(last.unwrap())
}

/// `Q` from its pieces: zig pieces before `rev(M)`, top pieces after it, ends
/// extended to typical BBB and AAA triples.
#[allow(clippy::too_many_arguments)]
pub(crate) fn assemble_q<R: Rng + ?Sized>(
    h: &Hypergraph4,
    rep: &TypicalityReport,
    params: &SolverParams,
    m: &Bridge,
    top: &[Vec<usize>],
    zig: &[Vec<usize>],
    blocked: &VertexSet,
    rng: &mut R,
) -> Result<Vec<usize>> {
    let part = &rep.part;
    let n = h.vertex_count();
    let mut all = blocked.clone();
    for p in top.iter().chain(zig) {
        for &v in p {
            all.insert(v);
        }
    }
    let mut seq: Vec<usize> = m.path.seq.iter().rev().copied().collect();
    for p in top {
        append_piece(h, part, params, &mut seq, p, &all, rng)?;
    }
    seq.reverse();
    for p in zig {
        append_piece(h, part, params, &mut seq, p, &all, rng)?;
    }
    seq.reverse();
    let mut ext_block = all.clone();
    for &v in &seq {
        ext_block.insert(v);
    }
    let pool = typical_pool(rep, &ext_block, rng);
    let fail = |d: &str| Error::ConstructionFailed { stage: "absorb", detail: d.to_string() };
    if !top.is_empty() {
        let back = extend_back(h, rep, &seq, true, &pool, &ext_block).ok_or_else(|| fail("AAA end"))?;
        for &v in &back {
            ext_block.insert(v);
        }
        seq.extend(back);
    }
    if !zig.is_empty() {
        seq.reverse();
        let pool: Vec<usize> = pool.iter().copied().filter(|&v| !ext_block.contains(v)).collect();
        let front = extend_back(h, rep, &seq, false, &pool, &ext_block).ok_or_else(|| fail("BBB end"))?;
        seq.extend(front);
        seq.reverse();
    }
    check_path(h, &seq).map_err(|v| fail(&format!("{v:?}")))?;
    debug_assert_eq!(VertexSet::from_iter(n, seq.iter().copied()).len(), seq.len());
    Ok(seq)
}

/// Absorbs every coarse-medium vertex outside `m` and `avoid` into a path `Q`
/// through `m`.
pub fn absorb_medium<R: Rng + ?Sized>(
    h: &Hypergraph4,
    rep: &TypicalityReport,
    params: &SolverParams,
    m: &Bridge,
    avoid: &VertexSet,
    rng: &mut R,
) -> Result<AbsorberPath> {
    let n = h.vertex_count();
    let part = &rep.part;
    let mset = m.vertex_set(n);
    let todo: Vec<usize> = mediums(rep).into_iter().filter(|&v| !mset.contains(v) && !avoid.contains(v)).collect();
    let budget = ceil(8.0 * params.eps0 / params.eps1 * (n / 2) as f64);
    if todo.len() > budget {
        return Err(Error::TooManyMediums { count: todo.len(), budget });
    }
    let mut blocked = avoid.clone();
    blocked.union_with(&mset);
    blocked.union_with(&anarchists(rep));
    for &z in &mediums(rep) {
        blocked.insert(z);
    }
    let (mut top, mut zig) = (Vec::new(), Vec::new());
    for &z in &todo {
        let pool = typical_pool(rep, &blocked, rng);
        let piece = absorber_piece(h, rep, z, &pool, rng)
            .ok_or_else(|| Error::ConstructionFailed { stage: "absorb", detail: format!("no piece around {z}") })?;
        assert_eq!(piece.len(), PIECE_LEN);
        for &v in &piece {
            blocked.insert(v);
        }
        if part.is_a(z) {
            top.push(piece);
        } else {
            zig.push(piece);
        }
    }
    let seq = assemble_q(h, rep, params, m, &top, &zig, &blocked, rng)?;
    let cap = (params.q_cap_fraction * n as f64) as usize;
    if seq.len() > cap {
        return Err(Error::ConstructionFailed { stage: "absorb", detail: format!("|Q|={} exceeds cap {cap}", seq.len()) });
    }
    // Q - M splits into two pieces of whole periods, each of difference 0
    assert_eq!(path_difference(part, &seq), m.difference, "absorbing path changed the difference");
    let pieces: Vec<Vec<usize>> = top.into_iter().chain(zig).collect();
    Ok(AbsorberPath { path: TightPath { seq }, bridge: m.clone(), absorbed: todo, pieces })
}

/// Moves every coarse anarchist outside `exempt` to the other side and checks
/// that the rest is typical at the relaxed scale `4 eps5`.
pub fn transfer_anarchists(
    h: &Hypergraph4,
    rep: &TypicalityReport,
    params: &SolverParams,
    exempt: &VertexSet,
) -> Result<Partition> {
    let n = h.vertex_count();
    let movers: Vec<usize> = rep.with_coarse_class(Class::Anarchist).into_iter().filter(|&v| !exempt.contains(v)).collect();
    let budget = ceil(params.anarchist_budget_factor * params.eps0 * (n / 2) as f64);
    if movers.len() > budget {
        return Err(Error::BudgetExceeded { count: movers.len(), budget });
    }
    let mut part = rep.part.clone();
    for &v in &movers {
        part.flip(v);
    }
    let relaxed = (4.0 * rep.eps.coarse).min(0.95);
    let links = link_profiles(h, &part);
    let bad: Vec<usize> = (0..n)
        .filter(|&v| !exempt.contains(v) && classify_link(&part, part.side(v), &links[v], relaxed).class != Class::Typical)
        .collect();
    if !bad.is_empty() {
        return Err(Error::ReclassificationFailed(bad));
    }
    Ok(part)
}

/// A tight Hamiltonian cycle of a dense 3-graph: rotation and extension
/// first, exact backtracking after.
pub fn dense3_hamiltonian_cycle<R: Rng + ?Sized>(g: &Graph3, rng: &mut R) -> Result<Vec<usize>> {
    let m = g.vertex_count();
    if m < 4 {
        return Err(Error::PreconditionFailed(format!("{m} vertices")));
    }
    let need = 2.0 / 3.0 * crate::binom(m as u64 - 1, 2) as f64;
    let min = g.min_vertex_degree();
    if (min as f64) <= need {
        return Err(Error::PreconditionFailed(format!("min vertex degree {min} not above {need:.1}")));
    }
    for _ in 0..200 {
        if let Some(c) = rotate_extend(g, rng, 60 * m) {
            debug_assert!(g.is_tight_cycle(&c));
            return Ok(c);
        }
    }
    exact_cycle(g).ok_or(Error::SearchExhausted)
}

fn rotate_extend<R: Rng + ?Sized>(g: &Graph3, rng: &mut R, steps: usize) -> Option<Vec<usize>> {
    let m = g.vertex_count();
    let mut on = vec![false; m];
    let x = rng.random_range(0..m);
    let y = (x + 1 + rng.random_range(0..m - 1)) % m;
    let zs: Vec<usize> = bitset::iter_bits(g.pair_nbr(x, y)).collect();
    let z = *zs.choose(rng)?;
    let mut p = vec![x, y, z];
    for &v in &p {
        on[v] = true;
    }
    for _ in 0..steps {
        let k = p.len() - 1;
        if p.len() == m {
            if g.has_edge([p[k - 1], p[k], p[0]]) && g.has_edge([p[k], p[0], p[1]]) {
                return Some(p);
            }
        } else {
            let c: Vec<usize> = bitset::iter_bits(g.pair_nbr(p[k - 1], p[k])).filter(|&w| !on[w]).collect();
            if let Some(&w) = c.choose(rng) {
                on[w] = true;
                p.push(w);
                continue;
            }
        }
        // reverse the tail after position i
        let opts: Vec<usize> = (0..k.saturating_sub(1))
            .filter(|&i| (i == 0 || g.has_edge([p[i - 1], p[i], p[k]])) && g.has_edge([p[i], p[k], p[k - 1]]))
            .collect();
        match opts.choose(rng) {
            Some(&i) if rng.random_bool(0.8) => p[i + 1..].reverse(),
            _ => p.reverse(),
        }
    }
    None
}

fn exact_cycle(g: &Graph3) -> Option<Vec<usize>> {
    fn go(g: &Graph3, p: &mut Vec<usize>, on: &mut [bool], budget: &mut usize) -> bool {
        let m = on.len();
        let k = p.len() - 1;
        if p.len() == m {
            return g.has_edge([p[k - 1], p[k], p[0]]) && g.has_edge([p[k], p[0], p[1]]);
        }
        let c: Vec<usize> = bitset::iter_bits(g.pair_nbr(p[k - 1], p[k])).filter(|&w| !on[w]).collect();
        for w in c {
            if *budget == 0 {
                return false;
            }
            *budget -= 1;
            on[w] = true;
            p.push(w);
            if go(g, p, on, budget) {
                return true;
            }
            p.pop();
            on[w] = false;
        }
        false
    }
    let m = g.vertex_count();
    let mut budget = 2_000_000;
    for y in 1..m {
        let mut p = vec![0, y];
        let mut on = vec![false; m];
        on[0] = true;
        on[y] = true;
        if go(g, &mut p, &mut on, &mut budget) {
            return Some(p);
        }
    }
    None
}

/// The stream-triple test used by sequencing: same-side triples that are
/// typical at the working scale.
fn stream_good(h: &Hypergraph4, rep: &TypicalityReport, t: [usize; 3]) -> bool {
    let k = rep.part.count_a(&t);
    (k == 0 || k == 3) && rep.triple_typical(h, t)
}

/// Orders `x` between `t_from` and `t_to` so every consecutive triple is
/// typical, through a Hamiltonian cycle in the auxiliary graph `G_X` with one
/// special vertex standing for both boundaries.
pub fn sequence_through<R: Rng + ?Sized>(
    h: &Hypergraph4,
    rep: &TypicalityReport,
    params: &SolverParams,
    t_from: [usize; 3],
    t_to: Option<[usize; 3]>,
    x: &[usize],
    rng: &mut R,
) -> Result<Sequencing> {
    let part = &rep.part;
    let n = h.vertex_count() / 2;
    if (x.len() as f64) < params.seq_c * n as f64 || x.len() < 3 {
        return Err(Error::HypothesisViolated(format!("|X|={} below c*n", x.len())));
    }
    let side = part.is_a(t_from[0]);
    let mut seen = VertexSet::new(h.vertex_count());
    for &v in t_from.iter().chain(t_to.iter().flatten()).chain(x) {
        if part.is_a(v) != side || !seen.insert(v) {
            return Err(Error::HypothesisViolated("boundary and X must be disjoint and on one side".into()));
        }
    }
    let good = |t: [usize; 3]| stream_good(h, rep, t);
    let [_, f1, f2] = t_from;
    let start_ok = |y: usize, z: usize| good([f1, f2, y]) && good([f2, y, z]);
    let end_ok = |y: usize, z: usize| match t_to {
        Some([g0, g1, _]) => good([y, z, g0]) && good([z, g0, g1]),
        None => true,
    };
    let m = x.len();
    let star = m;
    let mut g = Graph3::new(m + 1);
    for i in 0..m {
        for j in i + 1..m {
            let (y, z) = (x[i], x[j]);
            if start_ok(y, z) && start_ok(z, y) && end_ok(y, z) && end_ok(z, y) {
                g.add_edge([i, j, star]);
            }
            for (k, &w) in x.iter().enumerate().skip(j + 1) {
                if good([y, z, w]) {
                    g.add_edge([i, j, k]);
                }
            }
        }
    }
    let cyc = dense3_hamiltonian_cycle(&g, rng)?;
    let pos = cyc.iter().position(|&v| v == star).unwrap();
    let mut seq = t_from.to_vec();
    seq.extend(cyc[pos + 1..].iter().chain(&cyc[..pos]).map(|&i| x[i]));
    seq.extend(t_to.iter().flatten());
    debug_assert!(seq[1..].windows(3).all(|w| good([w[0], w[1], w[2]])));
    Ok(Sequencing { seq })
}

/// Depth-first fallback for sequencing small or sparse sets.
fn sequence_search(
    h: &Hypergraph4,
    rep: &TypicalityReport,
    t_from: [usize; 3],
    t_to: Option<[usize; 3]>,
    x: &[usize],
) -> Option<Vec<usize>> {
    fn go(
        h: &Hypergraph4,
        rep: &TypicalityReport,
        seq: &mut Vec<usize>,
        rest: &mut Vec<usize>,
        to: Option<[usize; 3]>,
        budget: &mut usize,
    ) -> bool {
        if rest.is_empty() {
            return match to {
                Some(t) => {
                    let l = seq.len();
                    stream_good(h, rep, [seq[l - 2], seq[l - 1], t[0]]) && stream_good(h, rep, [seq[l - 1], t[0], t[1]])
                }
                None => true,
            };
        }
        for i in 0..rest.len() {
            if *budget == 0 {
                return false;
            }
            let v = rest[i];
            let l = seq.len();
            if !stream_good(h, rep, [seq[l - 2], seq[l - 1], v]) {
                continue;
            }
            *budget -= 1;
            rest.swap_remove(i);
            seq.push(v);
            if go(h, rep, seq, rest, to, budget) {
                return true;
            }
            seq.pop();
            rest.push(v);
            let last = rest.len() - 1;
            rest.swap(i, last);
        }
        false
    }
    let mut seq = t_from.to_vec();
    let mut rest = x.to_vec();
    let mut budget = SEARCH_BUDGET;
    go(h, rep, &mut seq, &mut rest, t_to, &mut budget).then(|| seq[3..].to_vec())
}

/// Orders a stream set, through `sequence_through` when it applies.
pub(crate) fn order_stream<R: Rng + ?Sized>(
    h: &Hypergraph4,
    rep: &TypicalityReport,
    params: &SolverParams,
    from: [usize; 3],
    to: Option<[usize; 3]>,
    x: &[usize],
    rng: &mut R,
) -> Option<Vec<usize>> {
    if x.len() >= 3 {
        if let Ok(s) = sequence_through(h, rep, params, from, to, x, rng) {
            let l = s.seq.len() - to.map_or(0, |_| 3);
            return Some(s.seq[3..l].to_vec());
        }
    }
    sequence_search(h, rep, from, to, x)
}

/// One stretch of the A- or B-pattern after `from` (and before `to`): a
/// sequenced stream with one slot vertex after every third stream vertex.
pub(crate) struct Weave {
    pub from: [usize; 3],
    pub to: Option<[usize; 3]>,
    pub len: usize,
}

impl Weave {
    pub fn slot_count(&self) -> usize {
        self.len.div_ceil(4)
    }

    /// Matches slots to `pool` given the ordered stream. Returns the segment
    /// and the pool vertices used; the minimum slot degree is reported too.
    pub fn place(&self, h: &Hypergraph4, stream: &[usize], pool: &[usize]) -> core::result::Result<(Vec<usize>, Vec<usize>, usize), usize> {
        let mut t = self.from.to_vec();
        t.extend_from_slice(stream);
        t.extend(self.to.iter().flatten());
        let slots = self.slot_count();
        let adj: Vec<Vec<usize>> = (0..slots)
            .map(|j| {
                let nbs: Vec<VertexSet> =
                    (3 * j..=3 * j + 3).filter(|&s| s + 2 < t.len()).map(|s| h.neighborhood([t[s], t[s + 1], t[s + 2]])).collect();
                (0..pool.len()).filter(|&r| nbs.iter().all(|nb| nb.contains(pool[r]))).collect()
            })
            .collect();
        let min_deg = adj.iter().map(|a| a.len()).min().unwrap_or(0);
        let mm = max_matching(pool.len(), &adj);
        let got = matching_size(&mm);
        if got < slots {
            return Err(got);
        }
        let chosen: Vec<usize> = mm.iter().map(|r| pool[r.unwrap()]).collect();
        let mut seg = Vec::with_capacity(self.len);
        let mut s = stream.iter();
        for i in 0..self.len {
            if i % 4 == 0 {
                seg.push(chosen[i / 4]);
            } else {
                seg.push(*s.next().unwrap());
            }
        }
        Ok((seg, chosen, min_deg))
    }
}

/// Exhaustive fill of several pattern stretches using exactly `pool`.
pub(crate) fn fill_exact(h: &Hypergraph4, part: &Partition, segs: &[Weave], pool: &[usize]) -> Option<Vec<Vec<usize>>> {
    struct St<'a> {
        h: &'a Hypergraph4,
        part: &'a Partition,
        segs: &'a [Weave],
        budget: usize,
    }
    fn go(st: &mut St, si: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>, avail: &mut Vec<usize>) -> bool {
        if si == st.segs.len() {
            return avail.is_empty();
        }
        let seg = &st.segs[si];
        let mut full = seg.from.to_vec();
        full.extend_from_slice(cur);
        if cur.len() == seg.len {
            if let Some(t) = seg.to {
                let l = full.len();
                full.extend_from_slice(&t);
                if !(l..l + 3).all(|e| st.h.has_edge([full[e - 3], full[e - 2], full[e - 1], full[e]])) {
                    return false;
                }
            }
            out.push(core::mem::take(cur));
            if go(st, si + 1, &mut Vec::new(), out, avail) {
                return true;
            }
            *cur = out.pop().unwrap();
            return false;
        }
        let l = full.len();
        let last = [full[l - 3], full[l - 2], full[l - 1]];
        let side = forced_a(st.part, &last);
        let nb = st.h.neighborhood(last);
        for i in 0..avail.len() {
            if st.budget == 0 {
                return false;
            }
            let v = avail[i];
            if st.part.is_a(v) != side || !nb.contains(v) {
                continue;
            }
            st.budget -= 1;
            avail.remove(i);
            cur.push(v);
            if go(st, si, cur, out, avail) {
                return true;
            }
            cur.pop();
            avail.insert(i, v);
        }
        false
    }
    let mut st = St { h, part, segs, budget: 4 * SEARCH_BUDGET };
    let mut out = Vec::new();
    let mut avail = pool.to_vec();
    go(&mut st, 0, &mut Vec::new(), &mut out, &mut avail).then_some(out)
}

/// Lengths `(L, L')` of the top and zig extensions of a path covering `m1`
/// A-vertices and `m2` B-vertices: the top holds `L - ceil(L/4)` A-vertices
/// and the zig `ceil(L'/4)`. The most even split is preferred.
pub fn path_split(m1: usize, m2: usize) -> Option<(usize, usize)> {
    let total = m1 + m2;
    (0..=total)
        .filter(|&l| l - l.div_ceil(4) + (total - l).div_ceil(4) == m1)
        .min_by_key(|&l| l.abs_diff(total - l))
        .map(|l| (l, total - l))
}

/// How the top extension ends: `L mod 4`, i.e. the number of vertices in
/// its last partial period (0 = ends on a full AAA triple).
pub fn end_case(m1: usize, m2: usize) -> Option<usize> {
    path_split(m1, m2).map(|(l, _)| l % 4)
}

/// Extends `q` (BBB end first, AAA end last) to a Hamiltonian path.
pub fn complete_path<R: Rng + ?Sized>(
    h: &Hypergraph4,
    rep: &TypicalityReport,
    params: &SolverParams,
    q: &[usize],
    rng: &mut R,
    trace: &mut Trace,
) -> Result<TightPath> {
    let part = &rep.part;
    let n = h.vertex_count();
    let l = q.len();
    if l < 3 || part.count_a(&q[..3]) != 0 || part.count_a(&q[l - 3..]) != 3 {
        return Err(Error::PreconditionFailed("Q must run from a BBB to an AAA triple".into()));
    }
    let in_q = VertexSet::from_iter(n, q.iter().copied());
    let ra: Vec<usize> = (0..n).filter(|&v| !in_q.contains(v) && part.is_a(v)).collect();
    let rb: Vec<usize> = (0..n).filter(|&v| !in_q.contains(v) && !part.is_a(v)).collect();
    if ra.is_empty() && rb.is_empty() {
        return Ok(TightPath { seq: q.to_vec() });
    }
    let (lt, lz) = path_split(ra.len(), rb.len())
        .ok_or_else(|| Error::EnvelopeViolated(format!("m1={} m2={} admit no split", ra.len(), rb.len())))?;
    trace.push(format!("end case {} top={lt} zig={lz}", lt % 4));
    let top = Weave { from: [q[l - 3], q[l - 2], q[l - 1]], to: None, len: lt };
    let zig = Weave { from: [q[2], q[1], q[0]], to: None, len: lz };
    let finish = |top_seg: &[usize], zig_seg: &[usize]| -> Option<TightPath> {
        let mut seq: Vec<usize> = zig_seg.iter().rev().copied().collect();
        seq.extend_from_slice(q);
        seq.extend_from_slice(top_seg);
        (seq.len() == n && check_path(h, &seq).is_ok()).then_some(TightPath { seq })
    };
    if ra.len() + rb.len() <= SMALL_REST {
        let mut pool = ra.clone();
        pool.extend(&rb);
        let segs = fill_exact(h, part, &[top, zig], &pool)
            .ok_or_else(|| Error::ConstructionFailed { stage: "complete", detail: "exhaustive fill failed".into() })?;
        trace.push("complete exhaustive".into());
        return finish(&segs[0], &segs[1])
            .ok_or_else(|| Error::ConstructionFailed { stage: "complete", detail: "verification failed".into() });
    }
    let mut last = Error::MatchingFailed { side: "B", matched: 0, needed: top.slot_count() };
    for _ in 0..params.completion_retries {
        let mut ra = ra.clone();
        ra.shuffle(rng);
        let (a_zig, a_top) = ra.split_at(zig.slot_count());
        let Some(top_stream) = order_stream(h, rep, params, top.from, None, a_top, rng) else {
            last = Error::ConstructionFailed { stage: "sequence", detail: "top stream".into() };
            continue;
        };
        let (top_seg, b_used, deg_b) = match top.place(h, &top_stream, &rb) {
            Ok(x) => x,
            Err(got) => {
                last = Error::MatchingFailed { side: "B", matched: got, needed: top.slot_count() };
                continue;
            }
        };
        let used = VertexSet::from_iter(n, b_used.iter().copied());
        let b_zig: Vec<usize> = rb.iter().copied().filter(|&v| !used.contains(v)).collect();
        let Some(zig_stream) = order_stream(h, rep, params, zig.from, None, &b_zig, rng) else {
            last = Error::ConstructionFailed { stage: "sequence", detail: "zig stream".into() };
            continue;
        };
        let (zig_seg, _, deg_a) = match zig.place(h, &zig_stream, a_zig) {
            Ok(x) => x,
            Err(got) => {
                last = Error::MatchingFailed { side: "A", matched: got, needed: zig.slot_count() };
                continue;
            }
        };
        if let Some(p) = finish(&top_seg, &zig_seg) {
            trace.push(format!("gamma min degree top={deg_b}/{} zig={deg_a}/{}", rb.len(), a_zig.len()));
            return Ok(p);
        }
    }
    Err(last)
}

pub(crate) fn seeded(params: &SolverParams, attempt: usize) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(params.rng_seed ^ (attempt as u64).wrapping_mul(0x9E37_79B9_7F4A_7C15))
}

/// Checks the codegree threshold, computes `b(H)` and the working report.
pub(crate) fn prepare(
    h: &Hypergraph4,
    params: &SolverParams,
    required: usize,
    trace: &mut Trace,
) -> Result<(BApproximation, TypicalityReport)> {
    params.validate()?;
    let n = h.vertex_count();
    if n < params.min_solver_n {
        return Err(Error::PreconditionFailed(format!("N={n} below min_solver_n={}", params.min_solver_n)));
    }
    let min = h.min_codegree()?;
    if min < required {
        return Err(Error::ThresholdNotMet { min_codegree: min, required });
    }
    trace.stage("threshold", &format!("min_codegree={min} required={required}"));
    let mut b = compute_b_with(h, params.exact_b_threshold, params.b_restarts, params.rng_seed);
    let swaps = repair_sides(h, &mut b.partition);
    if swaps > 0 {
        b.value = count_aabb(h, &b.partition);
        trace.push(format!("side repair swaps={swaps}"));
    }
    let half = (n / 2) as f64;
    let bound = (params.eps0 * half * half * half * half) as u64;
    if b.value > bound {
        return Err(Error::NotNearExtremal { aabb: b.value, bound });
    }
    trace.stage("compute_b", &format!("value={} exact={}", b.value, b.exact));
    let rep = working_report(h, &b.partition, params, trace);
    trace.stage("classify", "");
    Ok((b, rep))
}

/// A verified tight Hamiltonian path.
pub fn solve_ham_path(h: &Hypergraph4, params: &SolverParams) -> Result<TightPath> {
    solve_ham_path_traced(h, params, &mut Trace::new())
}

pub fn solve_ham_path_traced(h: &Hypergraph4, params: &SolverParams, trace: &mut Trace) -> Result<TightPath> {
    let (_, rep) = prepare(h, params, path_threshold(h.vertex_count()), trace)?;
    let mut last = None;
    for attempt in 0..params.solve_retries.max(1) {
        let mut ctx = Ctx::new(h, params, rep.clone(), seeded(params, attempt));
        let r = attempt_path(&mut ctx);
        trace.extend(core::mem::take(&mut ctx.trace));
        match r {
            Ok(p) => return Ok(p),
            Err(e) => {
                trace.push(format!("attempt {attempt} failed: {e}"));
                last = Some(e);
            }
        }
    }
    Err(last.unwrap())
}

fn attempt_path(ctx: &mut Ctx) -> Result<TightPath> {
    let (h, params) = (ctx.h, ctx.params);
    let n = h.vertex_count();
    ctx.reserved = anarchists(&ctx.rep);
    let (m, branch) = build_bridge_logged(h, &ctx.rep, params, &ctx.reserved, &mut ctx.rng)?;
    ctx.trace.stage("bridge", &format!("len={} diff={} branch={branch}", m.len(), m.difference));
    ctx.trace.push(format!("size bridge {}", m.len()));
    let q = absorb_medium(h, &ctx.rep, params, &m, &ctx.reserved, &mut ctx.rng)?;
    ctx.claim(&q.path.seq);
    ctx.trace.stage("absorb", &format!("len={} absorbed={}", q.path.seq.len(), q.absorbed.len()));
    for piece in &q.pieces {
        ctx.trace.push(format!("size absorber {}", piece.len()));
    }
    let part2 = transfer_anarchists(h, &ctx.rep, params, &ctx.used)?;
    let moved = (0..n).filter(|&v| part2.is_a(v) != ctx.rep.part.is_a(v)).count();
    ctx.trace.stage("transfer", &format!("moved={moved}"));
    let rep2 = if moved == 0 { ctx.rep.clone() } else { crate::typicality::classify_all(h, &part2, ctx.rep.eps) };
    let p = complete_path(h, &rep2, params, &q.path.seq, &mut ctx.rng, &mut ctx.trace)?;
    if p.seq.len() != n || check_path(h, &p.seq).is_err() {
        return Err(Error::ConstructionFailed { stage: "verify", detail: "certificate rejected".into() });
    }
    ctx.trace.stage("complete", &format!("len={}", p.seq.len()));
    Ok(p)
}

/// Same-side vertices of `rep` sorted by their cross-pattern link, largest
/// first.
pub(crate) fn by_cross_link(rep: &TypicalityReport, vs: &[usize]) -> Vec<usize> {
    let mut v = vs.to_vec();
    let cross = |x: usize| {
        let l = &rep.links[x];
        if rep.part.is_a(x) { l.l_abb } else { l.l_aab }
    };
    v.sort_by_key(|&x| core::cmp::Reverse(cross(x)));
    v
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cert::verify_tight_path;
    use crate::extremal::{build_benchmark, build_h0, compute_b, h0_partition, InstanceRecipe};
    use crate::typicality::{classify_all, Thresholds};

    fn bench(n: usize, s: usize, t: usize, seed: u64) -> (Hypergraph4, TypicalityReport) {
        let mut r = InstanceRecipe::new(n);
        r.medium_seeds = s;
        r.anarchists = t;
        r.rng_seed = seed;
        let b = build_benchmark(&r).unwrap();
        let part = compute_b(&b.graph, 20).partition;
        let rep = working_report(&b.graph, &part, &SolverParams::desk(), &mut Trace::new());
        (b.graph, rep)
    }

    fn rng(s: u64) -> ChaCha8Rng {
        ChaCha8Rng::seed_from_u64(s)
    }

    #[test]
    fn greedy_path_on_complete_graph_is_full() {
        let g = Graph3::complete(6);
        let p = greedy_dense_path(&g, 1.0, &mut rng(0)).unwrap();
        assert_eq!(p.len(), 6);
        assert!(g.is_tight_path(&p));
        assert_eq!(greedy_dense_path(&Graph3::new(6), 0.5, &mut rng(0)), Err(Error::DensityTooLow));
    }

    #[test]
    fn greedy_path_meets_density_bound() {
        let mut r = rng(3);
        for _ in 0..20 {
            let mut g = Graph3::new(9);
            for a in 0..9 {
                for b in a + 1..9 {
                    for c in b + 1..9 {
                        if r.random_bool(0.7) {
                            g.add_edge([a, b, c]);
                        }
                    }
                }
            }
            let a = g.edge_count() as f64 / 84.0;
            let p = greedy_dense_path(&g, a, &mut r).unwrap();
            assert!(g.is_tight_path(&p) && p.len() >= (a * 3.0) as usize);
        }
    }

    #[test]
    fn direct_bridge_on_planted_edge() {
        // H0 plus every AABB quadruple through one pair of A and one pair of B
        let part = h0_partition(20, 20);
        let base = build_h0(20, 20, false).unwrap();
        let mut quads: Vec<[usize; 4]> = base.edges().iter().map(|e| e.map(|x| x as usize)).collect();
        quads.push([0, 1, 20, 21]);
        let h = Hypergraph4::new(40, &quads).unwrap();
        let rep = classify_all(&h, &part, Thresholds::from_params(&SolverParams::desk()));
        let (b, branch) = build_bridge_logged(&h, &rep, &SolverParams::desk(), &VertexSet::new(40), &mut rng(1)).unwrap();
        assert_eq!(branch, "direct");
        assert!(b.len() <= 24);
        assert!(verify_tight_path(&h, &b.path));
        assert_eq!(b.difference, 6);
    }

    #[test]
    fn z_bridge_on_benchmark() {
        let (h, rep) = bench(40, 1, 0, 4);
        let (b, branch) = build_bridge_logged(&h, &rep, &SolverParams::desk(), &VertexSet::new(80), &mut rng(2)).unwrap();
        assert_eq!(branch, "z");
        assert!(b.len() <= BRIDGE_CAP);
        assert!(rep.fully_typical(&h, b.end_aaa) && rep.fully_typical(&h, b.end_bbb));
        assert_eq!(b.difference, path_difference(&rep.part, &b.path.seq));
    }

    #[test]
    fn disjoint_bridges_and_small_n() {
        let (h, rep) = bench(40, 1, 0, 6);
        let p = SolverParams::desk();
        let (m1, m2) = build_disjoint_bridges(&h, &rep, &p, &VertexSet::new(80), &mut rng(3)).unwrap();
        assert!(m1.vertex_set(80).is_disjoint(&m2.vertex_set(80)));
        let k = m1.vertex_set(80);
        let again = build_bridge(&h, &rep, &p, &k, &mut rng(4)).unwrap();
        assert!(again.vertex_set(80).is_disjoint(&k));
        let tiny = SolverParams { min_solver_n: 100, ..p };
        assert!(matches!(
            build_disjoint_bridges(&h, &rep, &tiny, &VertexSet::new(80), &mut rng(3)),
            Err(Error::ConstructionFailed { .. })
        ));
    }

    #[test]
    fn absorber_holds_all_mediums() {
        let (h, rep) = bench(40, 1, 0, 8);
        let p = SolverParams::desk();
        let m = build_bridge(&h, &rep, &p, &VertexSet::new(80), &mut rng(5)).unwrap();
        let q = absorb_medium(&h, &rep, &p, &m, &VertexSet::new(80), &mut rng(6)).unwrap();
        assert!(verify_tight_path(&h, &q.path));
        for z in rep.with_coarse_class(Class::Medium) {
            assert!(q.path.seq.contains(&z));
        }
        assert!(q.pieces.iter().all(|p| p.len() == PIECE_LEN));
        assert_eq!(path_difference(&rep.part, &q.path.seq), m.difference);
    }

    #[test]
    fn transfer_moves_planted_anarchist() {
        let mut r = InstanceRecipe::new(40);
        r.medium_seeds = 2;
        r.anarchists = 1;
        r.rng_seed = 1;
        let b = build_benchmark(&r).unwrap();
        let p = SolverParams::desk();
        let rep = working_report(&b.graph, &b.partition, &p, &mut Trace::new());
        let anar = rep.with_coarse_class(Class::Anarchist);
        assert_eq!(anar.len(), 1);
        let meds = VertexSet::from_iter(80, rep.with_coarse_class(Class::Medium));
        let part = transfer_anarchists(&b.graph, &rep, &p, &meds).unwrap();
        assert_eq!(part, b.effective);
        let (h0, rep0) = bench(20, 1, 0, 1);
        let meds0 = VertexSet::from_iter(40, rep0.with_coarse_class(Class::Medium));
        assert_eq!(transfer_anarchists(&h0, &rep0, &p, &meds0).unwrap(), rep0.part);
    }

    #[test]
    fn transfer_budget() {
        // one vertex of each side planted on the wrong side
        let h = build_h0(20, 20, false).unwrap();
        let part = Partition::from_a(40, (1..21).collect::<Vec<_>>()).unwrap();
        let rep = classify_all(&h, &part, Thresholds::from_params(&SolverParams::desk()));
        assert_eq!(rep.with_coarse_class(Class::Anarchist), vec![0, 20]);
        let p = SolverParams::desk();
        assert_eq!(transfer_anarchists(&h, &rep, &p, &VertexSet::new(40)).unwrap(), h0_partition(20, 20));
        // budget 0.5 * eps0 * n = 1
        let tight = SolverParams { anarchist_budget_factor: 0.5, ..p };
        assert!(matches!(
            transfer_anarchists(&h, &rep, &tight, &VertexSet::new(40)),
            Err(Error::BudgetExceeded { count: 2, budget: 1 })
        ));
    }

    #[test]
    fn dense3_cycles() {
        let g = Graph3::complete(7);
        let c = dense3_hamiltonian_cycle(&g, &mut rng(0)).unwrap();
        assert!(g.is_tight_cycle(&c) && c.len() == 7);
        let mut sparse = Graph3::new(8);
        sparse.add_edge([0, 1, 2]);
        assert!(matches!(dense3_hamiltonian_cycle(&sparse, &mut rng(0)), Err(Error::PreconditionFailed(_))));
        let mut r = rng(9);
        for m in [10, 16, 22] {
            let mut g = Graph3::new(m);
            for a in 0..m {
                for b in a + 1..m {
                    for c in b + 1..m {
                        if r.random_bool(0.9) {
                            g.add_edge([a, b, c]);
                        }
                    }
                }
            }
            if let Ok(c) = dense3_hamiltonian_cycle(&g, &mut r) {
                assert!(g.is_tight_cycle(&c) && c.len() == m);
            }
        }
    }

    #[test]
    fn sequencing_on_h0_side() {
        let h = build_h0(40, 40, false).unwrap();
        let part = h0_partition(40, 40);
        let rep = classify_all(&h, &part, Thresholds::from_params(&SolverParams::desk()));
        let x: Vec<usize> = (46..76).collect();
        let s = sequence_through(&h, &rep, &SolverParams::desk(), [40, 41, 42], Some([43, 44, 45]), &x, &mut rng(1)).unwrap();
        assert!(s.seq.windows(3).all(|w| rep.triple_typical(&h, [w[0], w[1], w[2]])));
        let mut inner = s.seq[3..s.seq.len() - 3].to_vec();
        inner.sort_unstable();
        assert_eq!(inner, x);
        assert!(matches!(
            sequence_through(&h, &rep, &SolverParams::desk(), [40, 41, 42], None, &[46], &mut rng(1)),
            Err(Error::HypothesisViolated(_))
        ));
    }

    #[test]
    fn split_cases_cover_every_ending() {
        let mut seen = [false; 4];
        for m1 in 0..20 {
            for m2 in 0..20 {
                if let Some((l, l2)) = path_split(m1, m2) {
                    assert_eq!(l - l.div_ceil(4) + l2.div_ceil(4), m1);
                    assert_eq!(l.div_ceil(4) + l2 - l2.div_ceil(4), m2);
                    seen[end_case(m1, m2).unwrap()] = true;
                }
            }
        }
        assert_eq!(seen, [true; 4]);
        // (6, 2): L = 7 and L = 8 both fit, 7 is more even
        assert_eq!(path_split(6, 2), Some((7, 1)));
        assert_eq!(end_case(6, 2), Some(3));
        // (4, 2): L = 4, 5, 6 fit
        assert_eq!(path_split(4, 2), Some((4, 2)));
        assert_eq!(end_case(4, 2), Some(0));
        assert_eq!(path_split(20, 0), None);
    }

    #[test]
    fn h0_has_no_path_before_construction() {
        let h = build_h0(10, 10, false).unwrap();
        assert!(matches!(solve_ham_path(&h, &SolverParams::desk()), Err(Error::ThresholdNotMet { .. })));
    }

    #[test]
    fn solves_benchmark_paths() {
        for (n, s, t, seed) in [(20, 1, 0, 1), (20, 1, 0, 2), (40, 2, 1, 3)] {
            let mut r = InstanceRecipe::new(n);
            r.medium_seeds = s;
            r.anarchists = t;
            r.rng_seed = seed;
            let b = build_benchmark(&r).unwrap();
            let mut tr = Trace::new();
            let p = solve_ham_path_traced(&b.graph, &SolverParams::desk(), &mut tr)
                .unwrap_or_else(|e| panic!("n={n} seed={seed}: {e}\n{:#?}", tr.lines()));
            assert_eq!(p.seq.len(), 2 * n);
            assert!(verify_tight_path(&b.graph, &p));
        }
    }
}
