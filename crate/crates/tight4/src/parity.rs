//! Tight Hamiltonian cycles: the mod-8 difference `3|V∩A| - |V∩B|` decides
//! whether the leftover side counts can be woven into a closed cycle, so a
//! good set supplies bridge pairs of every residue and the solver picks the
//! pair that makes the counts fit.

use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec::Vec;

use rand::seq::SliceRandom;
use rand::Rng;

use crate::assembly::{
    absorb_medium, bridge_from_core, build_disjoint_bridges, by_cross_link, fill_exact, order_stream,
    prepare, seeded, transfer_anarchists, Bridge, Weave,
};
use crate::bitset::VertexSet;
use crate::cert::{check_cycle, check_path, TightCycle};
use crate::connector::{link_triples, ConnectorRequest};
use crate::ctx::{pattern, typical_pool, Ctx, PatternSearch};
use crate::error::{Error, Result};
use crate::extremal::cycle_threshold;
use crate::graph::Hypergraph4;
use crate::params::SolverParams;
use crate::partition::{Partition, Side};
use crate::trace::Trace;
use crate::typicality::{classify_all, Class, TypicalityReport};

/// Good sets stay below this many vertices.
pub const GOOD_SET_CAP: usize = 1600;
pub const SWITCHER_CAP: usize = 100;
/// Seeds wanted for the all-typical-side case: two per switcher.
pub const SEED_COUNT: usize = 14;

/// Which pair realises each residue: the first term from the family around
/// `u`, the second from the family around `v`.
pub const RESIDUE_TABLE: [(u8, u8); 8] = [(0, 0), (3, 6), (3, 7), (0, 3), (6, 6), (6, 7), (0, 6), (0, 7)];

/// 7-vertex cores with the crossing vertex at index 3, by the difference of
/// the bridge they extend to.
const CORES_U_IN_B: [(u8, &str); 4] = [(0, "ABABBBA"), (3, "BAABBBA"), (6, "AABBBAB"), (7, "AABBABB")];
const CORES_U_IN_A: [(u8, &str); 4] = [(0, "AABABBB"), (3, "ABAABBB"), (6, "BAAABBB"), (7, "BAAABBA")];

/// `3|V∩A| - |V∩B|` mod 8.
pub fn path_difference(part: &Partition, seq: &[usize]) -> u8 {
    let a = part.count_a(seq) as i64;
    let b = seq.len() as i64 - a;
    (3 * a - b).rem_euclid(8) as u8
}

/// An AABB edge `(a, a', b, w)` (or its mirror) whose first triple is typical
/// and whose last vertex is coarse-typical.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Seed {
    pub quad: [usize; 4],
    pub kind: Side,
}

impl Seed {
    fn vertices(&self) -> [usize; 4] {
        self.quad
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Switcher {
    /// Starts with a BAA triple and ends with an AAA triple.
    pub seq: Vec<usize>,
    pub front: [usize; 3],
    pub back: [usize; 3],
    pub difference: u8,
}

#[derive(Clone, Debug)]
pub struct GoodSet {
    pub vertices: Vec<usize>,
    /// 1, 2 or 3.
    pub case: u8,
    /// `pairs[a]` is a disjoint `(M1, M2)` with differences summing to `a`.
    pub pairs: Vec<(Bridge, Bridge)>,
    pub switchers: Vec<Switcher>,
}

impl GoodSet {
    /// Recomputes everything the good set promises.
    pub fn verify(&self, h: &Hypergraph4, rep: &TypicalityReport) -> Result<()> {
        let n = h.vertex_count();
        let fail = |d: String| Error::ConstructionFailed { stage: "good set", detail: d };
        if self.vertices.len() >= GOOD_SET_CAP {
            return Err(fail(format!("{} vertices", self.vertices.len())));
        }
        let x = VertexSet::from_iter(n, self.vertices.iter().copied());
        if x.len() != self.vertices.len() {
            return Err(fail("repeated vertex".into()));
        }
        if self.vertices.iter().any(|&v| rep.coarse_class(v) == Class::Anarchist) {
            return Err(fail("contains an anarchist".into()));
        }
        if self.pairs.len() != 8 {
            return Err(fail(format!("{} residues", self.pairs.len())));
        }
        for (a, (m1, m2)) in self.pairs.iter().enumerate() {
            let (d1, d2) = (path_difference(&rep.part, &m1.path.seq), path_difference(&rep.part, &m2.path.seq));
            if d1 != m1.difference || d2 != m2.difference || (d1 + d2) % 8 != a as u8 {
                return Err(fail(format!("residue {a} not realised")));
            }
            if !m1.vertex_set(n).is_disjoint(&m2.vertex_set(n)) {
                return Err(fail(format!("residue {a}: bridges meet")));
            }
            if m1.path.seq.iter().chain(&m2.path.seq).any(|&v| !x.contains(v)) {
                return Err(fail(format!("residue {a}: bridge leaves X")));
            }
            for m in [m1, m2] {
                Bridge::from_seq(h, rep, m.path.seq.clone())?;
            }
        }
        for s in &self.switchers {
            if s.seq.len() > SWITCHER_CAP || s.difference % 2 == 0 {
                return Err(fail("switcher out of shape".into()));
            }
        }
        Ok(())
    }
}

/// Pairwise disjoint A-kind seeds avoiding `avoid`, at most `count`.
pub fn find_disjoint_seeds(
    h: &Hypergraph4,
    rep: &TypicalityReport,
    avoid: &VertexSet,
    count: usize,
) -> Vec<Seed> {
    let part = &rep.part;
    let mut taken = avoid.clone();
    let mut out = Vec::new();
    if count == 0 {
        return out;
    }
    for e in h.edges() {
        let e = e.map(|x| x as usize);
        if part.count_a(&e) != 2 || e.iter().any(|&v| taken.contains(v)) {
            continue;
        }
        let (a, b): (Vec<usize>, Vec<usize>) = e.iter().partition(|&&v| part.is_a(v));
        for (bb, w) in [(b[0], b[1]), (b[1], b[0])] {
            if rep.fully_typical(h, [a[0], a[1], bb]) && rep.coarse_class(w) == Class::Typical {
                for v in e {
                    taken.insert(v);
                }
                out.push(Seed { quad: [a[0], a[1], bb, w], kind: Side::A });
                break;
            }
        }
        if out.len() == count {
            break;
        }
    }
    out
}

/// Cores through a seed `(a, a', b, w)`: the side pattern, where the seed
/// vertices sit, and a name for the trace.
const SEED_CORES: [(&str, &str, [usize; 4]); 4] = [
    ("aabb", "AABB", [1, 0, 2, 3]),
    ("abab", "ABAB", [0, 2, 1, 3]),
    ("aabb-ab", "AABBAB", [1, 0, 2, 3]),
    ("b-aabb", "BAABB", [2, 1, 3, 4]),
];

/// Bridges through `seed`, at most one per difference.
fn seed_bridges<R: Rng + ?Sized>(
    h: &Hypergraph4,
    rep: &TypicalityReport,
    seed: &Seed,
    blocked: &VertexSet,
    rng: &mut R,
    trace: &mut Trace,
) -> Vec<Bridge> {
    let mut out: Vec<Bridge> = Vec::new();
    let mut bl = blocked.clone();
    for v in seed.vertices() {
        bl.remove(v);
    }
    let pool = typical_pool(rep, &bl, rng);
    for (name, pat, pos) in SEED_CORES {
        let p = pattern(pat);
        let fixed: Vec<(usize, usize)> = pos.iter().zip(seed.quad).map(|(&i, v)| (i, v)).collect();
        let order: Vec<usize> = (0..p.len()).filter(|i| !pos.contains(i)).collect();
        let search = PatternSearch { pattern: &p, order: &order, pool: &pool };
        let mut got = None;
        search.run(h, &rep.part, &fixed, |core| {
            got = bridge_from_core(h, rep, core, &pool, &bl);
            got.is_some()
        });
        if let Some(b) = got {
            trace.push(format!("switcher branch {name} len={} diff={}", b.len(), b.difference));
            if out.iter().all(|o| o.difference != b.difference) {
                out.push(b);
            }
        }
    }
    out
}

/// An odd switcher from two seeds: `b0 ++ B1 ++ a0 ++ rev(B2)` where the
/// bridges through the seeds have lengths of opposite parity, so the
/// difference `r1 + r2 + 2` is odd. Differences earlier in `prefer` are
/// tried first.
#[allow(clippy::too_many_arguments)]
pub fn build_switcher<R: Rng + ?Sized>(
    h: &Hypergraph4,
    rep: &TypicalityReport,
    s1: &Seed,
    s2: &Seed,
    avoid: &VertexSet,
    prefer: &[u8],
    rng: &mut R,
    trace: &mut Trace,
) -> Result<Switcher> {
    let n = h.vertex_count();
    if s1.kind != s2.kind {
        return Err(Error::PreconditionFailed("seeds of different kinds".into()));
    }
    if s1.quad.iter().any(|v| s2.quad.contains(v)) {
        return Err(Error::PreconditionFailed("seeds share a vertex".into()));
    }
    if s1.quad.iter().chain(&s2.quad).any(|&v| avoid.contains(v)) {
        return Err(Error::PreconditionFailed("seed meets the avoided set".into()));
    }
    let mut blocked = avoid.clone();
    for v in s1.quad.iter().chain(&s2.quad) {
        blocked.insert(*v);
    }
    for v in 0..n {
        if rep.coarse_class(v) == Class::Anarchist {
            blocked.insert(v);
        }
    }
    let first = seed_bridges(h, rep, s1, &blocked, rng, trace);
    let mut combos: Vec<(usize, &Bridge, Bridge)> = Vec::new();
    for b1 in &first {
        let mut bl2 = blocked.clone();
        bl2.union_with(&b1.vertex_set(n));
        for b2 in seed_bridges(h, rep, s2, &bl2, rng, trace) {
            if (b1.len() + b2.len()) % 2 == 0 {
                continue;
            }
            let d = (b1.difference + b2.difference + 2) % 8;
            let rank = prefer.iter().position(|&p| p == d).unwrap_or(prefer.len());
            combos.push((rank, b1, b2));
        }
    }
    combos.sort_by_key(|c| c.0);
    for (_, b1, b2) in combos {
        let mut bl3 = blocked.clone();
        bl3.union_with(&b1.vertex_set(n));
        bl3.union_with(&b2.vertex_set(n));
        if let Some(s) = join_switcher(h, rep, b1, &b2, &bl3, rng) {
            assert_eq!(s.difference, (b1.difference + b2.difference + 2) % 8, "switcher difference");
            trace.push(format!("switcher diff {}", s.difference));
            trace.push(format!("size bridge {}", b1.len()));
            trace.push(format!("size bridge {}", b2.len()));
            return Ok(s);
        }
    }
    Err(Error::CaseExhausted("no odd switcher from these seeds".into()))
}

fn join_switcher<R: Rng + ?Sized>(
    h: &Hypergraph4,
    rep: &TypicalityReport,
    b1: &Bridge,
    b2: &Bridge,
    blocked: &VertexSet,
    rng: &mut R,
) -> Option<Switcher> {
    let part = &rep.part;
    let pool = typical_pool(rep, blocked, rng);
    let p = &b1.path.seq;
    let q: Vec<usize> = b2.path.seq.iter().rev().copied().collect();
    let l = p.len();
    let a0 = pool.iter().copied().find(|&a| {
        part.is_a(a)
            && h.has_edge([p[l - 3], p[l - 2], p[l - 1], a])
            && h.has_edge([p[l - 2], p[l - 1], a, q[0]])
            && h.has_edge([p[l - 1], a, q[0], q[1]])
            && h.has_edge([a, q[0], q[1], q[2]])
    })?;
    let b0 = pool
        .iter()
        .copied()
        .find(|&b| !part.is_a(b) && h.has_edge([b, p[0], p[1], p[2]]) && rep.fully_typical(h, [b, p[0], p[1]]))?;
    let mut seq = alloc::vec![b0];
    seq.extend_from_slice(p);
    seq.push(a0);
    seq.extend(q);
    let m = seq.len();
    let s = Switcher {
        front: [seq[0], seq[1], seq[2]],
        back: [seq[m - 3], seq[m - 2], seq[m - 1]],
        difference: path_difference(part, &seq),
        seq,
    };
    (check_path(h, &s.seq).is_ok() && s.seq.len() <= SWITCHER_CAP && rep.fully_typical(h, s.back)).then_some(s)
}

/// Appends switchers to the AAA end of `m`, joined directly when the windows
/// allow it and through a connector otherwise.
fn attach_switchers<R: Rng + ?Sized>(
    h: &Hypergraph4,
    rep: &TypicalityReport,
    params: &SolverParams,
    m: &Bridge,
    sw: &[&Switcher],
    blocked: &VertexSet,
    rng: &mut R,
) -> Result<Bridge> {
    let mut seq: Vec<usize> = m.path.seq.iter().rev().copied().collect();
    for s in sw {
        let l = seq.len();
        let direct = (0..3).all(|i| {
            let mut w = [0; 4];
            for (j, x) in w.iter_mut().enumerate() {
                let k = l - 3 + i + j;
                *x = if k < l { seq[k] } else { s.seq[k - l] };
            }
            h.has_edge(w)
        });
        if direct {
            seq.extend_from_slice(&s.seq);
            continue;
        }
        let mut avoid = blocked.clone();
        for &v in &seq {
            avoid.insert(v);
        }
        let req = ConnectorRequest { from: [seq[l - 3], seq[l - 2], seq[l - 1]], to: s.front, avoid };
        let c = link_triples(h, &rep.part, &req, params, rng)?;
        seq.extend_from_slice(&c.seq[3..c.seq.len() - 3]);
        seq.extend_from_slice(&s.seq);
    }
    seq.reverse();
    Bridge::from_seq(h, rep, seq)
}

/// Bit `d` is set when some subset of `diffs` sums to `d` mod 8.
fn reachable(diffs: &[u8]) -> u8 {
    diffs.iter().fold(1u8, |m, &d| m | m.rotate_left(d as u32 % 8))
}

/// Smallest set of switchers whose differences sum to `delta` mod 8.
fn subset_for(diffs: &[u8], delta: u8) -> Option<Vec<usize>> {
    (0u32..1 << diffs.len())
        .filter(|mask| {
            let s: u32 = (0..diffs.len()).filter(|i| mask >> i & 1 == 1).map(|i| diffs[i] as u32).sum();
            s % 8 == delta as u32
        })
        .min_by_key(|mask| mask.count_ones())
        .map(|mask| (0..diffs.len()).filter(|i| mask >> i & 1 == 1).collect())
}

fn case_by_seeds<R: Rng + ?Sized>(
    h: &Hypergraph4,
    rep: &TypicalityReport,
    params: &SolverParams,
    avoid: &VertexSet,
    case: u8,
    rng: &mut R,
    trace: &mut Trace,
) -> Result<GoodSet> {
    let n = h.vertex_count();
    let (m1, m2) = build_disjoint_bridges(h, rep, params, avoid, rng)?;
    trace.push(format!("size bridge {}", m1.len()));
    trace.push(format!("size bridge {}", m2.len()));
    let mut blocked = avoid.clone();
    blocked.union_with(&m1.vertex_set(n));
    blocked.union_with(&m2.vertex_set(n));
    // Seeds are taken two at a time, so a switcher never has to route around
    // seeds reserved for later ones; switchers are added until their subset
    // sums reach every residue.
    let mut sws: Vec<Switcher> = Vec::new();
    let mut seeds_used = 0;
    while seeds_used < SEED_COUNT {
        let diffs: Vec<u8> = sws.iter().map(|s| s.difference).collect();
        if reachable(&diffs) == u8::MAX {
            break;
        }
        let pair = find_disjoint_seeds(h, rep, &blocked, 2);
        if pair.len() < 2 {
            break;
        }
        seeds_used += 2;
        let mut prefer: Vec<u8> = (1..8).step_by(2).collect();
        prefer.sort_by_key(|&d| {
            let mut with = diffs.clone();
            with.push(d);
            core::cmp::Reverse(reachable(&with).count_ones())
        });
        let r = build_switcher(h, rep, &pair[0], &pair[1], &blocked, &prefer, rng, trace);
        for v in pair[0].quad.iter().chain(&pair[1].quad) {
            blocked.insert(*v);
        }
        match r {
            Ok(s) => {
                for &v in &s.seq {
                    blocked.insert(v);
                }
                sws.push(s);
            }
            Err(e) => trace.push(format!("switcher skipped: {e}")),
        }
    }
    trace.push(format!("seeds {seeds_used} switchers {}", sws.len()));
    if seeds_used < 2 {
        return Err(Error::CaseExhausted("no two disjoint seeds".into()));
    }
    let diffs: Vec<u8> = sws.iter().map(|s| s.difference).collect();
    let mut pairs = Vec::new();
    for a in 0..8u8 {
        let delta = (a + 16 - m1.difference - m2.difference) % 8;
        let idx = subset_for(&diffs, delta).ok_or_else(|| Error::CaseExhausted(format!("residue {a} unreachable")))?;
        let chosen: Vec<&Switcher> = idx.iter().map(|&i| &sws[i]).collect();
        let mut bl = avoid.clone();
        bl.union_with(&m2.vertex_set(n));
        for (i, s) in sws.iter().enumerate() {
            if !idx.contains(&i) {
                for &v in &s.seq {
                    bl.insert(v);
                }
            }
        }
        let m1a = attach_switchers(h, rep, params, &m1, &chosen, &bl, rng)?;
        pairs.push((m1a, m2.clone()));
    }
    let mut x = VertexSet::new(n);
    for (p, q) in &pairs {
        for &v in p.path.seq.iter().chain(&q.path.seq) {
            x.insert(v);
        }
    }
    for s in &sws {
        for &v in &s.seq {
            x.insert(v);
        }
    }
    Ok(GoodSet { vertices: x.to_vec(), case, pairs, switchers: sws })
}

/// A bridge of difference `d` through `center`, from the core of that label.
fn crossing_bridge<R: Rng + ?Sized>(
    h: &Hypergraph4,
    rep: &TypicalityReport,
    center: usize,
    d: u8,
    blocked: &VertexSet,
    rng: &mut R,
) -> Option<Bridge> {
    let part = &rep.part;
    let cores = if part.is_a(center) { CORES_U_IN_A } else { CORES_U_IN_B };
    let (_, pat) = cores.iter().find(|c| c.0 == d)?;
    let p = pattern(pat);
    let mut pool = typical_pool(rep, blocked, rng);
    pool.retain(|&v| v != center);
    let search = PatternSearch { pattern: &p, order: &[2, 4, 1, 5, 0, 6], pool: &pool };
    let mut got = None;
    search.run(h, part, &[(3, center)], |core| {
        got = bridge_from_core(h, rep, core, &pool, blocked);
        got.is_some()
    });
    let b = got?;
    debug_assert_eq!(b.difference, d);
    Some(b)
}

/// Two crossing vertices `u`, `v` (the mediums with the largest cross links)
/// with bridges of difference 0, 3, 6 and 7 around each. Each residue takes
/// its pair from the table; the `v` bridge only has to avoid its partner.
fn case_crossing<R: Rng + ?Sized>(
    h: &Hypergraph4,
    rep: &TypicalityReport,
    avoid: &VertexSet,
    rng: &mut R,
    trace: &mut Trace,
) -> Result<GoodSet> {
    let n = h.vertex_count();
    let meds: Vec<usize> = rep.with_coarse_class(Class::Medium).into_iter().filter(|&v| !avoid.contains(v)).collect();
    if meds.len() < 2 {
        return Err(Error::ConstructionFailed { stage: "good set", detail: format!("case 3 needs two mediums, found {}", meds.len()) });
    }
    let meds = by_cross_link(rep, &meds);
    let mut base = avoid.clone();
    for &m in &meds {
        base.insert(m);
    }
    for &u in &meds {
        let mut bu = base.clone();
        bu.remove(u);
        let mut fu: [Option<Bridge>; 8] = Default::default();
        for d in [0, 3, 6, 7] {
            fu[d as usize] = crossing_bridge(h, rep, u, d, &bu, rng);
        }
        'v: for &v in meds.iter().filter(|&&v| v != u) {
            let mut fv: Vec<Bridge> = Vec::new();
            let mut pairs = Vec::new();
            for &(r1, r2) in &RESIDUE_TABLE {
                let Some(b1) = fu[r1 as usize].clone() else { continue 'v };
                let s1 = b1.vertex_set(n);
                let reuse = fv.iter().find(|b| b.difference == r2 && b.vertex_set(n).is_disjoint(&s1)).cloned();
                let b2 = match reuse {
                    Some(b) => b,
                    None => {
                        let mut bv = base.clone();
                        bv.union_with(&s1);
                        bv.remove(v);
                        let Some(b) = crossing_bridge(h, rep, v, r2, &bv, rng) else { continue 'v };
                        fv.push(b.clone());
                        b
                    }
                };
                pairs.push((b1, b2));
            }
            let mut x = VertexSet::new(n);
            for b in fu.iter().flatten().chain(&fv) {
                x.union_with(&b.vertex_set(n));
            }
            trace.push(format!("crossing vertices u={u} v={v}"));
            return Ok(GoodSet { vertices: x.to_vec(), case: 3, pairs, switchers: Vec::new() });
        }
    }
    Err(Error::ConstructionFailed { stage: "good set", detail: "no crossing pair carries all four bridge differences".into() })
}

/// A verified good set. Seeds are tried first unless `force_case3` is set;
/// when they run out the crossing-vertex construction takes over.
pub fn find_good_set<R: Rng + ?Sized>(
    h: &Hypergraph4,
    rep: &TypicalityReport,
    params: &SolverParams,
    rng: &mut R,
    trace: &mut Trace,
) -> Result<GoodSet> {
    let n = h.vertex_count();
    let anar = VertexSet::from_iter(n, rep.with_coarse_class(Class::Anarchist));
    let gs = if params.force_case3 {
        trace.push("seeds suppressed".into());
        None
    } else {
        let case = if anar.is_empty() { 1 } else { 2 };
        let mut avoid = anar.clone();
        for m in rep.with_coarse_class(Class::Medium) {
            avoid.insert(m);
        }
        match case_by_seeds(h, rep, params, &avoid, case, rng, trace) {
            Ok(g) => Some(g),
            Err(e) => {
                trace.push(format!("case {case} unavailable: {e}"));
                None
            }
        }
    };
    let gs = match gs {
        Some(g) => g,
        None => case_crossing(h, rep, &anar, rng, trace)?,
    };
    trace.push(format!("case {}", gs.case));
    gs.verify(h, rep)?;
    trace.push(format!("good set size={}", gs.vertices.len()));
    if gs.case == 3 {
        let mut seen: Vec<&[usize]> = Vec::new();
        for b in gs.pairs.iter().flat_map(|(p, q)| [p, q]) {
            if !seen.contains(&b.path.seq.as_slice()) {
                seen.push(&b.path.seq);
                trace.push(format!("size bridge {}", b.len()));
            }
        }
    }
    for sw in &gs.switchers {
        trace.push(format!("size switcher {} {}", sw.seq.len(), sw.difference));
    }
    trace.push(format!("size good_set {}", gs.vertices.len()));
    Ok(gs)
}

/// `3|A'| - |B'| + 6` mod 8: the residue `D(M1) + D(M2)` must hit.
pub fn integrality_residue(part: &Partition) -> u8 {
    ((3 * part.a_len() as i64 - part.b_len() as i64 + 6).rem_euclid(8)) as u8
}

/// Closes `q` (BBB end first, AAA end last) and the disjoint bridge `m2` into
/// a Hamiltonian cycle `Q ++ top ++ M2 ++ zig`. The top stretch holds `m`
/// B-vertices and `3(m-1)` A-vertices, the zig `k` A-vertices and `3(k-1)`
/// B-vertices, with `m = (3 n1 - n2 + 6) / 8` and `k = n1 + 3 - 3m`.
pub fn complete_cycle<R: Rng + ?Sized>(
    h: &Hypergraph4,
    rep: &TypicalityReport,
    params: &SolverParams,
    q: &[usize],
    m2: &Bridge,
    rng: &mut R,
    trace: &mut Trace,
) -> Result<TightCycle> {
    let n = h.vertex_count();
    let part = &rep.part;
    let lq = q.len();
    if lq < 3 || part.count_a(&q[..3]) != 0 || part.count_a(&q[lq - 3..]) != 3 {
        return Err(Error::PreconditionFailed("Q must run from a BBB to an AAA triple".into()));
    }
    let mut used = VertexSet::from_iter(n, q.iter().copied());
    if m2.path.seq.iter().any(|&v| used.contains(v)) {
        return Err(Error::PreconditionFailed("Q meets M2".into()));
    }
    used.union_with(&m2.vertex_set(n));
    let ra: Vec<usize> = (0..n).filter(|&v| !used.contains(v) && part.is_a(v)).collect();
    let rb: Vec<usize> = (0..n).filter(|&v| !used.contains(v) && !part.is_a(v)).collect();
    let (n1, n2) = (ra.len(), rb.len());
    let num = 3 * n1 as i64 - n2 as i64 + 6;
    if num.rem_euclid(8) != 0 {
        return Err(Error::NotIntegral { n1, n2 });
    }
    trace.push(format!("integrality 3n1-n2+6={num} = 0 (mod 8) n1={n1} n2={n2}"));
    let m = num / 8;
    let k = n1 as i64 + 3 - 3 * m;
    if m < 1 || k < 1 {
        return Err(Error::EnvelopeViolated(format!("m={m} k={k}")));
    }
    let (m, k) = (m as usize, k as usize);
    debug_assert_eq!(3 * (k - 1) + m, n2);
    let ms = &m2.path.seq;
    let l2 = ms.len();
    let top = Weave { from: [q[lq - 3], q[lq - 2], q[lq - 1]], to: Some([ms[0], ms[1], ms[2]]), len: 4 * m - 3 };
    let zig = Weave { from: [ms[l2 - 3], ms[l2 - 2], ms[l2 - 1]], to: Some([q[0], q[1], q[2]]), len: 4 * k - 3 };
    let finish = |top_seg: &[usize], zig_seg: &[usize]| -> Option<TightCycle> {
        let mut seq = q.to_vec();
        seq.extend_from_slice(top_seg);
        seq.extend_from_slice(ms);
        seq.extend_from_slice(zig_seg);
        (seq.len() == n && check_cycle(h, &seq).is_ok()).then_some(TightCycle { seq })
    };
    if n1 + n2 <= 12 {
        let mut pool = ra.clone();
        pool.extend(&rb);
        let segs = fill_exact(h, part, &[top, zig], &pool)
            .ok_or_else(|| Error::ConstructionFailed { stage: "complete", detail: "exhaustive fill failed".into() })?;
        return finish(&segs[0], &segs[1])
            .ok_or_else(|| Error::ConstructionFailed { stage: "complete", detail: "verification failed".into() });
    }
    let mut last = Error::MatchingFailed { side: "B", matched: 0, needed: m };
    for _ in 0..params.completion_retries {
        let mut ra = ra.clone();
        ra.shuffle(rng);
        let (a_zig, a_top) = ra.split_at(k);
        let Some(top_stream) = order_stream(h, rep, params, top.from, top.to, a_top, rng) else {
            last = Error::ConstructionFailed { stage: "sequence", detail: "top stream".into() };
            continue;
        };
        let (top_seg, b_used, _) = match top.place(h, &top_stream, &rb) {
            Ok(x) => x,
            Err(got) => {
                last = Error::MatchingFailed { side: "B", matched: got, needed: m };
                continue;
            }
        };
        let taken = VertexSet::from_iter(n, b_used.iter().copied());
        let b_zig: Vec<usize> = rb.iter().copied().filter(|&v| !taken.contains(v)).collect();
        // |P_zig ∩ B| = 3(k - 1)
        assert_eq!(b_zig.len(), 3 * (k - 1));
        let Some(zig_stream) = order_stream(h, rep, params, zig.from, zig.to, &b_zig, rng) else {
            last = Error::ConstructionFailed { stage: "sequence", detail: "zig stream".into() };
            continue;
        };
        let (zig_seg, _, _) = match zig.place(h, &zig_stream, a_zig) {
            Ok(x) => x,
            Err(got) => {
                last = Error::MatchingFailed { side: "A", matched: got, needed: k };
                continue;
            }
        };
        if let Some(c) = finish(&top_seg, &zig_seg) {
            return Ok(c);
        }
    }
    Err(last)
}

/// A verified tight Hamiltonian cycle.
pub fn solve_ham_cycle(h: &Hypergraph4, params: &SolverParams) -> Result<TightCycle> {
    solve_ham_cycle_traced(h, params, &mut Trace::new())
}

pub fn solve_ham_cycle_traced(h: &Hypergraph4, params: &SolverParams, trace: &mut Trace) -> Result<TightCycle> {
    let (_, rep) = prepare(h, params, cycle_threshold(h.vertex_count()), trace)?;
    let mut last = None;
    for attempt in 0..params.solve_retries.max(1) {
        let mut ctx = Ctx::new(h, params, rep.clone(), seeded(params, attempt));
        let r = attempt_cycle(&mut ctx);
        trace.extend(core::mem::take(&mut ctx.trace));
        match r {
            Ok(c) => return Ok(c),
            Err(e) => {
                trace.push(format!("attempt {attempt} failed: {e}"));
                last = Some(e);
            }
        }
    }
    Err(last.unwrap())
}

fn attempt_cycle(ctx: &mut Ctx) -> Result<TightCycle> {
    let (h, params) = (ctx.h, ctx.params);
    let n = h.vertex_count();
    let gs = find_good_set(h, &ctx.rep, params, &mut ctx.rng, &mut ctx.trace)?;
    ctx.trace.stage("good_set", &format!("case={} size={}", gs.case, gs.vertices.len()));
    let mut exempt = VertexSet::from_iter(n, gs.vertices.iter().copied());
    for m in ctx.rep.with_coarse_class(Class::Medium) {
        exempt.insert(m);
    }
    let part2 = transfer_anarchists(h, &ctx.rep, params, &exempt)?;
    let moved = (0..n).filter(|&v| part2.is_a(v) != ctx.rep.part.is_a(v)).count();
    ctx.trace.stage("transfer", &format!("moved={moved}"));
    let a = integrality_residue(&part2);
    let (m1, m2) = gs.pairs[a as usize].clone();
    let hit = gs.case == 3 && RESIDUE_TABLE[a as usize] == (m1.difference, m2.difference);
    ctx.trace.push(format!("residue {a} = {}+{}{}", m1.difference, m2.difference, if hit { " table" } else { "" }));
    let q = absorb_medium(h, &ctx.rep, params, &m1, &m2.vertex_set(n), &mut ctx.rng)?;
    ctx.trace.stage("absorb", &format!("len={} absorbed={}", q.path.seq.len(), q.absorbed.len()));
    for piece in &q.pieces {
        ctx.trace.push(format!("size absorber {}", piece.len()));
    }
    ctx.claim(&q.path.seq);
    ctx.claim(&m2.path.seq);
    let rep2 = if moved == 0 { ctx.rep.clone() } else { classify_all(h, &part2, ctx.rep.eps) };
    // D(Q) + D(M2) now matches the transferred side sizes
    assert_eq!(
        (path_difference(&part2, &q.path.seq) + path_difference(&part2, &m2.path.seq)) % 8,
        a,
        "integrality residue after bridge choice"
    );
    let c = complete_cycle(h, &rep2, params, &q.path.seq, &m2, &mut ctx.rng, &mut ctx.trace)?;
    if c.seq.len() != n || check_cycle(h, &c.seq).is_err() {
        return Err(Error::ConstructionFailed { stage: "verify", detail: "certificate rejected".to_string() });
    }
    ctx.trace.stage("complete", &format!("len={}", c.seq.len()));
    Ok(c)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::assembly::working_report;
    use crate::cert::verify_tight_cycle;
    use crate::extremal::{build_benchmark, build_h0, build_h0_prime, compute_b, h0_partition, InstanceRecipe};
    use crate::typicality::Thresholds;
    use proptest::prelude::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

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

    /// H0 plus random AABB quadruples at rate `p`: every vertex stays typical
    /// and seeds are plentiful.
    pub(super) fn sprinkled(m: usize, p: f64, seed: u64) -> (Hypergraph4, TypicalityReport) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let base = build_h0(m, m, false).unwrap();
        let mut quads: Vec<[usize; 4]> = base.edges().iter().map(|e| e.map(|x| x as usize)).collect();
        for a in 0..m {
            for a2 in a + 1..m {
                for b in m..2 * m {
                    for b2 in b + 1..2 * m {
                        if rng.random_bool(p) {
                            quads.push([a, a2, b, b2]);
                        }
                    }
                }
            }
        }
        let h = Hypergraph4::new(2 * m, &quads).unwrap();
        let rep = classify_all(&h, &h0_partition(m, m), Thresholds::from_params(&SolverParams::desk()));
        (h, rep)
    }

    #[test]
    fn difference_examples() {
        let part = Partition::from_a(8, [0, 1, 2, 3]).unwrap();
        assert_eq!(path_difference(&part, &[0, 1, 2, 4]), 0);
        assert_eq!(path_difference(&part, &[0]), 3);
        assert_eq!(path_difference(&part, &[4]), 7);
        assert_eq!(path_difference(&part, &[]), 0);
    }

    proptest! {
        #[test]
        fn difference_is_additive(sides in proptest::collection::vec(any::<bool>(), 2..40), cut in 0usize..40) {
            let n = sides.len();
            let part = Partition::from_a(n, (0..n).filter(|&i| sides[i])).unwrap();
            let seq: Vec<usize> = (0..n).collect();
            let c = cut.min(n);
            let whole = path_difference(&part, &seq);
            prop_assert_eq!(whole, (path_difference(&part, &seq[..c]) + path_difference(&part, &seq[c..])) % 8);
            // a whole period of either pattern contributes nothing
            let a = part.count_a(&seq) as i64;
            prop_assert_eq!(whole as i64, (4 * a - n as i64).rem_euclid(8));
        }
    }

    #[test]
    fn residue_table_sums() {
        for (a, (r1, r2)) in RESIDUE_TABLE.iter().enumerate() {
            assert_eq!((r1 + r2) as usize % 8, a);
            assert!([0, 3, 6, 7].contains(r1) && [0, 3, 6, 7].contains(r2));
        }
    }

    proptest! {
        #[test]
        fn reachable_agrees_with_subset_search(diffs in proptest::collection::vec(0u8..8, 0..7)) {
            let m = reachable(&diffs);
            for d in 0..8u8 {
                prop_assert_eq!(m >> d & 1 == 1, subset_for(&diffs, d).is_some());
            }
        }
    }

    #[test]
    fn crossing_cores_have_their_labelled_difference() {
        // the forced extension of each core, computed by hand on the side pattern
        for (u_in_a, cores) in [(true, CORES_U_IN_A), (false, CORES_U_IN_B)] {
            for (d, pat) in cores {
                let mut s = pattern(pat);
                assert_eq!(s[3], u_in_a);
                assert!(s[..3].iter().filter(|&&x| x).count() >= 2 && s[4..].iter().filter(|&&x| x).count() < 2);
                while !(s[s.len() - 3..].iter().all(|&x| !x)) {
                    let l = s.len();
                    let k = s[l - 3..].iter().filter(|&&x| x).count();
                    s.push(k % 2 == 0);
                }
                while !(s[..3].iter().all(|&x| x)) {
                    let k = s[..3].iter().filter(|&&x| x).count();
                    s.insert(0, k % 2 == 0);
                }
                let a = s.iter().filter(|&&x| x).count() as i64;
                assert_eq!((3 * a - (s.len() as i64 - a)).rem_euclid(8) as u8, d, "{pat}");
            }
        }
    }

    #[test]
    fn seeds_are_disjoint_edges() {
        let (h, rep) = sprinkled(40, 0.05, 1);
        let seeds = find_disjoint_seeds(&h, &rep, &VertexSet::new(80), 14);
        assert_eq!(seeds.len(), 14);
        let mut seen = VertexSet::new(80);
        for s in &seeds {
            assert!(h.has_edge(s.quad));
            assert!(rep.fully_typical(&h, [s.quad[0], s.quad[1], s.quad[2]]));
            assert!(s.quad.iter().all(|&v| seen.insert(v)));
        }
        assert!(find_disjoint_seeds(&h, &rep, &VertexSet::new(60), 0).is_empty());
        // benchmarks route every AABB edge through a medium
        let (hb, repb) = bench(20, 1, 0, 3);
        assert!(find_disjoint_seeds(&hb, &repb, &VertexSet::new(40), 14).is_empty());
    }

    #[test]
    fn switcher_from_seeds_is_odd() {
        let (h, rep) = sprinkled(30, 0.05, 2);
        let seeds = find_disjoint_seeds(&h, &rep, &VertexSet::new(60), 2);
        let mut t = Trace::new();
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let s = build_switcher(&h, &rep, &seeds[0], &seeds[1], &VertexSet::new(60), &[], &mut rng, &mut t).unwrap();
        assert_eq!(s.difference % 2, 1);
        assert_eq!(s.difference, path_difference(&rep.part, &s.seq));
        assert!(s.seq.len() <= SWITCHER_CAP);
        assert!(check_path(&h, &s.seq).is_ok());
        assert_eq!(rep.part.count_a(&s.front), 2);
        assert!(!rep.part.is_a(s.front[0]));
        assert_eq!(rep.part.count_a(&s.back), 3);
        assert!(t.has_prefix("switcher diff"));
        let mixed = Seed { quad: seeds[1].quad, kind: Side::B };
        assert!(matches!(
            build_switcher(&h, &rep, &seeds[0], &mixed, &VertexSet::new(60), &[], &mut rng, &mut t),
            Err(Error::PreconditionFailed(_))
        ));
    }

    #[test]
    fn seeds_give_case_one_good_set() {
        // a switcher takes about 20 vertices, so 60 vertices cannot hold enough
        let (h, rep) = sprinkled(60, 0.05, 4);
        let mut t = Trace::new();
        let g = find_good_set(&h, &rep, &SolverParams::desk(), &mut ChaCha8Rng::seed_from_u64(5), &mut t).unwrap();
        assert_eq!(g.case, 1, "{:#?}", t.lines());
        assert!((1..=7).contains(&g.switchers.len()));
        g.verify(&h, &rep).unwrap();
    }

    #[test]
    fn benchmark_good_set_uses_crossing_vertices() {
        let (h, rep) = bench(20, 1, 0, 2);
        let mut t = Trace::new();
        let g = find_good_set(&h, &rep, &SolverParams::desk(), &mut ChaCha8Rng::seed_from_u64(1), &mut t).unwrap();
        assert_eq!(g.case, 3);
        assert!(t.has_prefix("case 3"));
        assert!(g.vertices.len() < GOOD_SET_CAP);
        for (a, (m1, m2)) in g.pairs.iter().enumerate() {
            assert_eq!((m1.difference, m2.difference), RESIDUE_TABLE[a]);
            assert!(m1.len() <= 25 && m2.len() <= 25);
        }
    }

    #[test]
    fn non_integral_counts_are_rejected() {
        let (h, rep) = bench(20, 1, 0, 2);
        let p = SolverParams::desk();
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let g = find_good_set(&h, &rep, &p, &mut rng, &mut Trace::new()).unwrap();
        let good = integrality_residue(&rep.part) as usize;
        let (m1, m2) = g.pairs[(good + 1) % 8].clone();
        let q: Vec<usize> = m1.path.seq.iter().rev().copied().collect();
        assert!(matches!(
            complete_cycle(&h, &rep, &p, &q, &m2, &mut rng, &mut Trace::new()),
            Err(Error::NotIntegral { .. })
        ));
    }

    #[test]
    fn h0_prime_is_below_threshold() {
        let h = build_h0_prime(6, 5).unwrap();
        let p = SolverParams { min_solver_n: 8, ..SolverParams::desk() };
        assert!(matches!(solve_ham_cycle(&h, &p), Err(Error::ThresholdNotMet { .. })));
    }

    #[test]
    fn solves_benchmark_cycles() {
        for (n, s, t, seed) in [(20, 1, 0, 1), (40, 2, 0, 2), (40, 2, 1, 3)] {
            let mut r = InstanceRecipe::new(n);
            r.medium_seeds = s;
            r.anarchists = t;
            r.rng_seed = seed;
            let b = build_benchmark(&r).unwrap();
            let mut tr = Trace::new();
            let c = solve_ham_cycle_traced(&b.graph, &SolverParams::desk(), &mut tr)
                .unwrap_or_else(|e| panic!("n={n} seed={seed}: {e}\n{:#?}", tr.lines()));
            assert!(verify_tight_cycle(&b.graph, &c).unwrap());
            assert!(tr.has_prefix("integrality"));
            assert!(tr.lines().iter().any(|l| l.starts_with("residue") && l.ends_with("table")));
        }
    }
}
