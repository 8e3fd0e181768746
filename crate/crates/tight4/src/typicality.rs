//! Typical, medium and anarchist vertices; typical pairs and triples; and
//! executable forms of the counting claims that bound how many atypical items
//! a near-extremal graph can have.
//!
//! Conventions: `n = ⌊N/2⌋`, and `m = max(|A|, |B|)` stands in for `n` in the
//! counting bounds, so the two agree on balanced partitions.

use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec;
use alloc::vec::Vec;

use crate::bitset;
use crate::error::{Error, Result};
use crate::extremal::{count_aabb, gain_table, pair_profiles};
use crate::graph::Hypergraph4;
use crate::params::SolverParams;
use crate::partition::{Partition, Side};
use crate::binom;

/// Link triple counts of one vertex, split by how many of the three other
/// vertices lie in `A`.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct LinkProfile {
    pub l_aaa: u64,
    pub l_aab: u64,
    pub l_abb: u64,
    pub l_bbb: u64,
}

impl LinkProfile {
    pub fn total(&self) -> u64 {
        self.l_aaa + self.l_aab + self.l_abb + self.l_bbb
    }

    fn bump(&mut self, in_a: usize) {
        match in_a {
            3 => self.l_aaa += 1,
            2 => self.l_aab += 1,
            1 => self.l_abb += 1,
            _ => self.l_bbb += 1,
        }
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct PairProfile {
    pub l_aa: u64,
    pub l_ab: u64,
    pub l_bb: u64,
}

impl PairProfile {
    pub fn total(&self) -> u64 {
        self.l_aa + self.l_ab + self.l_bb
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct TripleProfile {
    pub d_a: usize,
    pub d_b: usize,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Class {
    Typical,
    Medium,
    Anarchist,
}

impl Class {
    pub fn name(self) -> &'static str {
        match self {
            Class::Typical => "typical",
            Class::Medium => "medium",
            Class::Anarchist => "anarchist",
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct VertexClass {
    pub class: Class,
    pub eps: f64,
    /// Both the typical and the anarchist condition held; anarchist wins.
    pub ambiguous: bool,
}

fn sizes(part: &Partition) -> (f64, f64) {
    (part.a_len() as f64, part.b_len() as f64)
}

fn c2(x: f64) -> f64 {
    x * (x - 1.0) / 2.0
}

/// `ε|A|C(|B|,2)` and `εC(|A|,2)|B|`.
fn vertex_thresholds(part: &Partition, eps: f64) -> (f64, f64) {
    let (a, b) = sizes(part);
    (eps * a * c2(b), eps * c2(a) * b)
}

pub fn classify_link(part: &Partition, side: Side, link: &LinkProfile, eps: f64) -> VertexClass {
    let (t_abb, t_aab) = vertex_thresholds(part, eps);
    let (own, cross) = match side {
        // typical: few cross-pattern triples; anarchist: few own-pattern ones
        Side::A => (link.l_aab as f64 <= t_aab, link.l_abb as f64 <= t_abb),
        Side::B => (link.l_abb as f64 <= t_abb, link.l_aab as f64 <= t_aab),
    };
    let (typical, anarchist) = (cross, own);
    let class = if anarchist {
        Class::Anarchist
    } else if typical {
        Class::Typical
    } else {
        Class::Medium
    };
    VertexClass { class, eps, ambiguous: typical && anarchist }
}

/// The link profile of `v` by a scan of the edge list.
pub fn link_profile(h: &Hypergraph4, part: &Partition, v: usize) -> LinkProfile {
    let mut l = LinkProfile::default();
    for e in h.edges() {
        if e.contains(&(v as u32)) {
            let k = e.iter().filter(|&&x| x as usize != v && part.is_a(x as usize)).count();
            l.bump(k);
        }
    }
    l
}

pub fn classify_vertex(h: &Hypergraph4, part: &Partition, v: usize, eps: f64) -> VertexClass {
    classify_link(part, part.side(v), &link_profile(h, part, v), eps)
}

/// The pair link of `{u, v}` by testing every other pair.
pub fn pair_profile(h: &Hypergraph4, part: &Partition, u: usize, v: usize) -> PairProfile {
    let n = h.vertex_count();
    let mut p = PairProfile::default();
    for x in 0..n {
        for y in x + 1..n {
            if x == u || x == v || y == u || y == v || !h.has_edge([u, v, x, y]) {
                continue;
            }
            match part.is_a(x) as u8 + part.is_a(y) as u8 {
                2 => p.l_aa += 1,
                1 => p.l_ab += 1,
                _ => p.l_bb += 1,
            }
        }
    }
    p
}

pub fn pair_is_typical(part: &Partition, u: usize, v: usize, p: &PairProfile, eps: f64) -> bool {
    let (a, b) = sizes(part);
    match (part.is_a(u), part.is_a(v)) {
        (true, true) => p.l_bb as f64 <= eps * c2(b),
        (false, false) => p.l_aa as f64 <= eps * c2(a),
        _ => p.l_ab as f64 <= eps * a * b,
    }
}

pub fn classify_pair(h: &Hypergraph4, part: &Partition, u: usize, v: usize, eps: f64) -> bool {
    pair_is_typical(part, u, v, &pair_profile(h, part, u, v), eps)
}

pub fn triple_profile(h: &Hypergraph4, part: &Partition, t: [usize; 3]) -> TripleProfile {
    let a = part.a_set().words();
    let (total, d_a) = match h.nbr_words(t) {
        Some(w) => (bitset::count(w), bitset::and_count(w, a)),
        None => {
            let nb = h.neighborhood(t);
            (nb.len(), nb.intersection_len(a))
        }
    };
    TripleProfile { d_a, d_b: total - d_a }
}

pub fn triple_is_typical(part: &Partition, t: [usize; 3], p: &TripleProfile, eps: f64) -> bool {
    let (a, b) = sizes(part);
    match part.count_a(&t) {
        3 => p.d_b as f64 >= (1.0 - eps) * b,
        2 => p.d_b as f64 <= eps * b,
        1 => p.d_a as f64 <= eps * a,
        _ => p.d_a as f64 >= (1.0 - eps) * a,
    }
}

pub fn classify_triple(h: &Hypergraph4, part: &Partition, t: [usize; 3], eps: f64) -> bool {
    triple_is_typical(part, t, &triple_profile(h, part, t), eps)
}

/// `x^k` without `std`.
fn powi(x: f64, k: u32) -> f64 {
    (0..k).fold(1.0, |acc, _| acc * x)
}

/// Pattern index of a triple: 0 = AAA, 1 = AAB, 2 = ABB, 3 = BBB.
pub fn triple_pattern(part: &Partition, t: &[usize]) -> usize {
    3 - part.count_a(t)
}

/// Pattern index of a pair: 0 = AA, 1 = AB, 2 = BB.
pub fn pair_pattern(part: &Partition, u: usize, v: usize) -> usize {
    2 - part.is_a(u) as usize - part.is_a(v) as usize
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Thresholds {
    pub vertex: f64,
    pub pair: f64,
    pub triple: f64,
    /// The coarse vertex scale separating mediums and anarchists.
    pub coarse: f64,
}

impl Thresholds {
    pub fn from_params(p: &SolverParams) -> Self {
        Thresholds { vertex: p.eps1, pair: p.eps2, triple: p.eps3, coarse: p.eps5 }
    }

    /// The fine scales multiplied by `k`; the coarse scale is never below them.
    pub fn scaled(&self, k: f64) -> Self {
        let vertex = self.vertex * k;
        Thresholds { vertex, pair: self.pair * k, triple: self.triple * k, coarse: self.coarse.max(vertex) }
    }
}

/// Everything the solver asks about typicality, computed in one pass.
#[derive(Clone, Debug)]
pub struct TypicalityReport {
    pub part: Partition,
    pub eps: Thresholds,
    pub links: Vec<LinkProfile>,
    /// Classes at the fine vertex scale.
    pub classes: Vec<VertexClass>,
    /// Classes at the coarse scale.
    pub coarse: Vec<VertexClass>,
    /// `I_v = l_v^{AAB} - l_v^{ABB}`.
    pub gains: Vec<i64>,
    /// Atypical pairs by pattern AA, AB, BB.
    pub atypical_pairs: [usize; 3],
    /// Atypical triples by pattern AAA, AAB, ABB, BBB.
    pub atypical_triples: [usize; 4],
    pairs: Vec<[u32; 3]>,
    n: usize,
}

pub fn link_profiles(h: &Hypergraph4, part: &Partition) -> Vec<LinkProfile> {
    let mut links = vec![LinkProfile::default(); h.vertex_count()];
    for e in h.edges() {
        let k = e.iter().filter(|&&x| part.is_a(x as usize)).count();
        for &v in e {
            links[v as usize].bump(k - part.is_a(v as usize) as usize);
        }
    }
    links
}

pub fn classify_all(h: &Hypergraph4, part: &Partition, eps: Thresholds) -> TypicalityReport {
    let n = h.vertex_count();
    let links = link_profiles(h, part);
    let classes = (0..n).map(|v| classify_link(part, part.side(v), &links[v], eps.vertex)).collect();
    let coarse = (0..n).map(|v| classify_link(part, part.side(v), &links[v], eps.coarse)).collect();
    let pairs = if h.is_indexed() { pair_profiles(h, part) } else { scan_pair_profiles(h, part) };
    let gains = gain_table(part, &pairs);
    let mut r = TypicalityReport {
        part: part.clone(),
        eps,
        links,
        classes,
        coarse,
        gains,
        atypical_pairs: [0; 3],
        atypical_triples: [0; 4],
        pairs,
        n,
    };
    for u in 0..n {
        for v in u + 1..n {
            if !r.pair_typical(u, v) {
                r.atypical_pairs[pair_pattern(part, u, v)] += 1;
            }
        }
    }
    for_each_triple(n, |t| {
        if !r.triple_typical(h, t) {
            r.atypical_triples[triple_pattern(part, &t)] += 1;
        }
    });
    r
}

fn scan_pair_profiles(h: &Hypergraph4, part: &Partition) -> Vec<[u32; 3]> {
    let n = h.vertex_count();
    let mut out = vec![[0u32; 3]; n * n];
    for e in h.edges() {
        let e = e.map(|x| x as usize);
        for i in 0..4 {
            for j in i + 1..4 {
                let rest: Vec<usize> = (0..4).filter(|&k| k != i && k != j).map(|k| e[k]).collect();
                let slot = 2 - part.count_a(&rest);
                out[e[i] * n + e[j]][slot] += 1;
                out[e[j] * n + e[i]][slot] += 1;
            }
        }
    }
    out
}

pub fn for_each_triple(n: usize, mut f: impl FnMut([usize; 3])) {
    for x in 0..n {
        for y in x + 1..n {
            for z in y + 1..n {
                f([x, y, z]);
            }
        }
    }
}

impl TypicalityReport {
    pub fn vertex_count(&self) -> usize {
        self.n
    }

    pub fn class(&self, v: usize) -> Class {
        self.classes[v].class
    }

    pub fn coarse_class(&self, v: usize) -> Class {
        self.coarse[v].class
    }

    pub fn vertex_typical(&self, v: usize) -> bool {
        self.classes[v].class == Class::Typical
    }

    pub fn pair(&self, u: usize, v: usize) -> PairProfile {
        let [l_aa, l_ab, l_bb] = self.pairs[u * self.n + v];
        PairProfile { l_aa: l_aa as u64, l_ab: l_ab as u64, l_bb: l_bb as u64 }
    }

    pub fn pair_typical(&self, u: usize, v: usize) -> bool {
        pair_is_typical(&self.part, u, v, &self.pair(u, v), self.eps.pair)
    }

    pub fn triple_typical(&self, h: &Hypergraph4, t: [usize; 3]) -> bool {
        triple_is_typical(&self.part, t, &triple_profile(h, &self.part, t), self.eps.triple)
    }

    /// Typical at all three levels: vertices, pairs and the triple itself.
    pub fn fully_typical(&self, h: &Hypergraph4, t: [usize; 3]) -> bool {
        let [x, y, z] = t;
        t.iter().all(|&v| self.vertex_typical(v))
            && self.pair_typical(x, y)
            && self.pair_typical(x, z)
            && self.pair_typical(y, z)
            && self.triple_typical(h, t)
    }

    pub fn count_class(&self, c: Class) -> usize {
        self.classes.iter().filter(|k| k.class == c).count()
    }

    pub fn count_coarse(&self, c: Class) -> usize {
        self.coarse.iter().filter(|k| k.class == c).count()
    }

    pub fn with_class(&self, c: Class) -> Vec<usize> {
        (0..self.n).filter(|&v| self.classes[v].class == c).collect()
    }

    pub fn with_coarse_class(&self, c: Class) -> Vec<usize> {
        (0..self.n).filter(|&v| self.coarse[v].class == c).collect()
    }

    /// `vclass <v> <class>` per vertex, at the coarse scale.
    pub fn lines(&self) -> Vec<String> {
        (0..self.n).map(|v| format!("vclass {v} {}", self.coarse[v].class.name())).collect()
    }
}

/// One checked inequality `lhs <= rhs` (or a hypothesis phrased the same way).
#[derive(Clone, Debug, PartialEq)]
pub struct ClaimLine {
    pub name: &'static str,
    pub lhs: f64,
    pub rhs: f64,
    pub pass: bool,
}

impl ClaimLine {
    fn le(name: &'static str, lhs: f64, rhs: f64) -> Self {
        ClaimLine { name, lhs, rhs, pass: lhs <= rhs }
    }

    fn lt(name: &'static str, lhs: f64, rhs: f64) -> Self {
        ClaimLine { name, lhs, rhs, pass: lhs < rhs }
    }

    /// Lower bounds are stored with `lhs` the measured value.
    fn ge(name: &'static str, lhs: f64, rhs: f64) -> Self {
        ClaimLine { name, lhs, rhs, pass: lhs >= rhs }
    }

    pub fn line(&self) -> String {
        format!("claim {} {} {} {}", self.name, fmt_num(self.lhs), fmt_num(self.rhs), self.pass)
    }
}

fn fmt_num(x: f64) -> String {
    if x == (x as i64) as f64 {
        format!("{}", x as i64)
    } else {
        format!("{x:.3}")
    }
}

#[derive(Clone, Debug, Default)]
pub struct ClaimsReport {
    pub hypotheses: Vec<ClaimLine>,
    pub claims: Vec<ClaimLine>,
}

impl ClaimsReport {
    pub fn hypotheses_hold(&self) -> bool {
        self.hypotheses.iter().all(|c| c.pass)
    }

    pub fn all_pass(&self) -> bool {
        self.claims.iter().all(|c| c.pass)
    }

    pub fn get(&self, name: &str) -> Option<&ClaimLine> {
        self.claims.iter().chain(&self.hypotheses).find(|c| c.name == name)
    }

    pub fn lines(&self) -> Vec<String> {
        let mut out: Vec<String> = self.hypotheses.iter().map(|c| format!("hypothesis {}", &c.line()[6..])).collect();
        out.extend(self.claims.iter().map(|c| c.line()));
        out
    }
}

fn half(h: &Hypergraph4) -> usize {
    h.vertex_count() / 2
}

fn side_max(part: &Partition) -> f64 {
    part.a_len().max(part.b_len()) as f64
}

/// The three standing hypotheses: codegree at least `n - 1`, sides within
/// `5ε₀n` of `n`, and at most `ε₀n⁴` AABB edges.
pub fn standing_hypotheses(h: &Hypergraph4, part: &Partition, eps0: f64) -> Result<Vec<ClaimLine>> {
    let n = half(h) as f64;
    let d3 = h.min_codegree()? as f64;
    let a = part.a_len() as f64;
    Ok(vec![
        ClaimLine::ge("min_codegree", d3, n - 1.0),
        ClaimLine::le("side_drift", (a - n).abs(), 5.0 * eps0 * n),
        ClaimLine::le("aabb_edges", count_aabb(h, part) as f64, eps0 * n * n * n * n),
    ])
}

/// `|E(H₀(A,B)) \ E(H)|` by scanning all AAAB and ABBB quadruples.
pub fn missing_h0_edges(h: &Hypergraph4, part: &Partition) -> u64 {
    let mut missing = 0;
    crate::extremal::for_each_quad(h.vertex_count(), |q| {
        if part.count_a(&q) % 2 == 1 && !h.has_edge(q) {
            missing += 1;
        }
    });
    missing
}

/// Balanced sides, fewer than `c·n⁴` AABB edges and codegree at least
/// `(1 - c1)n` imply at most `(c1 + 4c)n⁴/3 + slack_c3·n³` missing H₀ edges.
pub fn check_claim_edges(h: &Hypergraph4, part: &Partition, c: f64, c1: f64, slack_c3: f64) -> Result<(bool, f64, f64)> {
    let n = half(h) as f64;
    if part.a_len() != part.b_len() {
        return Err(Error::HypothesisViolated("sides are not balanced".to_string()));
    }
    let aabb = count_aabb(h, part) as f64;
    if aabb >= c * powi(n, 4) {
        return Err(Error::HypothesisViolated(format!("|AABB| = {aabb} is not below c·n⁴ = {}", c * powi(n, 4))));
    }
    let d3 = h.min_codegree()? as f64;
    if d3 < (1.0 - c1) * n {
        return Err(Error::HypothesisViolated(format!("min codegree {d3} is below (1 - c1)n = {}", (1.0 - c1) * n)));
    }
    let lhs = missing_h0_edges(h, part) as f64;
    let rhs = (c1 + 4.0 * c) * powi(n, 4) / 3.0 + slack_c3 * powi(n, 3);
    Ok((lhs <= rhs, lhs, rhs))
}

/// If some vertex is an `eps`-anarchist then every vertex on the other side
/// has at most `3ε|A|C(|B|,2) + slack_c2·n²` cross-pattern link triples.
/// Requires balanced sides and a partition attaining `b(H)`, which can only
/// be certified by exhaustion.
pub fn check_fact1(h: &Hypergraph4, part: &Partition, eps: f64, slack_c2: f64) -> Result<bool> {
    if part.a_len() != part.b_len() {
        return Err(Error::HypothesisViolated("sides are not balanced".to_string()));
    }
    let here = count_aabb(h, part);
    let best = crate::oracle::exhaustive_b(h)
        .map_err(|_| Error::HypothesisViolated("b(H) cannot be certified at this size".to_string()))?;
    if here != best.value {
        return Err(Error::HypothesisViolated(format!("partition has {here} AABB edges but b(H) = {}", best.value)));
    }
    let n = half(h) as f64;
    let links = link_profiles(h, part);
    let (t_abb, t_aab) = vertex_thresholds(part, eps);
    let (big_abb, big_aab) = vertex_thresholds(part, 3.0 * eps);
    let slack = slack_c2 * n * n;
    let anarchist_on = |s: Side| {
        (0..h.vertex_count()).any(|v| {
            part.side(v) == s
                && match s {
                    Side::A => links[v].l_aab as f64 <= t_aab,
                    Side::B => links[v].l_abb as f64 <= t_abb,
                }
        })
    };
    let side_typical = |s: Side| {
        (0..h.vertex_count()).filter(|&v| part.side(v) == s).all(|v| match s {
            Side::A => links[v].l_abb as f64 <= big_abb + slack,
            Side::B => links[v].l_aab as f64 <= big_aab + slack,
        })
    };
    Ok((!anarchist_on(Side::B) || side_typical(Side::A)) && (!anarchist_on(Side::A) || side_typical(Side::B)))
}

/// Every counting claim evaluated exactly, whether or not the standing
/// hypotheses hold; the hypotheses are reported alongside.
pub fn evaluate_counting_claims(h: &Hypergraph4, part: &Partition, params: &SolverParams) -> Result<ClaimsReport> {
    let hyps = standing_hypotheses(h, part, params.eps0)?;
    let nn = h.vertex_count();
    let n = half(h) as f64;
    let m = side_max(part);
    let (e0, e1, e2, e3) = (params.eps0, params.eps1, params.eps2, params.eps3);
    let eps = Thresholds { vertex: e1, pair: e2, triple: e3, coarse: params.eps5 };
    let r = classify_all(h, part, eps);
    let mut claims = Vec::new();

    let aabb = count_aabb(h, part) as f64;
    let d3 = h.min_codegree()? as f64;
    if part.a_len() == part.b_len() && aabb < e0 * powi(n, 4) {
        // c = ε₀ and the smallest c1 the codegree allows
        let c1 = ((n - d3) / n).max(0.0);
        let (_, lhs, rhs) = check_claim_edges(h, part, e0, c1, params.slack_c3)?;
        claims.push(ClaimLine::le("missing_h0_edges", lhs, rhs));
    }

    let atypical = (0..nn).filter(|&v| !r.vertex_typical(v)).count() as f64;
    claims.push(ClaimLine::lt("atypical_vertices", atypical, 8.0 * (e0 / e1) * m));
    if e1 < 0.2 {
        for (name, s) in [("anarchists_in_a", Side::A), ("anarchists_in_b", Side::B)] {
            let k = (0..nn).filter(|&v| part.side(v) == s && r.class(v) == Class::Anarchist).count() as f64;
            claims.push(ClaimLine::lt(name, k, 5.0 * e0 * m));
        }
    }

    // atypical pairs through a typical vertex, by pattern
    let mut worst_pairs = 0usize;
    for v in (0..nn).filter(|&v| r.vertex_typical(v)) {
        let mut per = [0usize; 3];
        for u in (0..nn).filter(|&u| u != v) {
            if !r.pair_typical(u, v) {
                per[pair_pattern(part, u, v)] += 1;
            }
        }
        worst_pairs = worst_pairs.max(*per.iter().max().unwrap_or(&0));
    }
    claims.push(ClaimLine::le("atypical_pairs_per_vertex", worst_pairs as f64, (e1 / e2) * m));

    let mut per_vertex = vec![[0usize; 4]; nn];
    let mut per_pair = vec![[0usize; 4]; nn * nn];
    let mut not_full = 0usize;
    for_each_triple(nn, |t| {
        if !r.fully_typical(h, t) {
            not_full += 1;
        }
        if r.triple_typical(h, t) {
            return;
        }
        let k = triple_pattern(part, &t);
        for &v in &t {
            per_vertex[v][k] += 1;
        }
        let [x, y, z] = t;
        for (u, v) in [(x, y), (x, z), (y, z)] {
            per_pair[u * nn + v][k] += 1;
        }
    });
    let worst_v = (0..nn)
        .filter(|&v| r.vertex_typical(v))
        .map(|v| *per_vertex[v].iter().max().unwrap_or(&0))
        .max()
        .unwrap_or(0);
    claims.push(ClaimLine::le("atypical_triples_per_vertex", worst_v as f64, (e1 / e3) * m * m));
    let mut worst_p = 0usize;
    for u in 0..nn {
        for v in u + 1..nn {
            if r.pair_typical(u, v) {
                worst_p = worst_p.max(*per_pair[u * nn + v].iter().max().unwrap_or(&0));
            }
        }
    }
    claims.push(ClaimLine::le("atypical_triples_per_pair", worst_p as f64, (e2 / e3) * m));
    let e4 = params.eps4.max(16.0 * e0 / e1 + 4.0 * e1 / e2 + e1 / e3);
    claims.push(ClaimLine::lt("not_fully_typical_triples", not_full as f64, e4 * m * m * m));
    Ok(ClaimsReport { hypotheses: hyps, claims })
}

/// As [`evaluate_counting_claims`], refusing when a standing hypothesis fails.
pub fn check_counting_claims(h: &Hypergraph4, part: &Partition, params: &SolverParams) -> Result<ClaimsReport> {
    let rep = evaluate_counting_claims(h, part, params)?;
    if let Some(bad) = rep.hypotheses.iter().find(|c| !c.pass) {
        return Err(Error::HypothesisViolated(format!("{}: {} vs {}", bad.name, fmt_num(bad.lhs), fmt_num(bad.rhs))));
    }
    Ok(rep)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Item {
    Vertex(usize),
    Pair(usize, usize),
    Triple([usize; 3]),
}

/// The lower bounds that typicality plus codegree `n - 1` force on the
/// item's own-pattern links (balanced sides only).
pub fn derived_bounds(h: &Hypergraph4, part: &Partition, item: Item, eps: f64) -> Result<Vec<ClaimLine>> {
    let n = half(h) as f64;
    if part.a_len() != part.b_len() {
        return Err(Error::HypothesisViolated("sides are not balanced".to_string()));
    }
    let d3 = h.min_codegree()? as f64;
    if d3 < n - 1.0 {
        return Err(Error::HypothesisViolated(format!("min codegree {d3} is below n - 1")));
    }
    let big = 0.5 * n * (n - 1.0) * (n - 1.0) - 0.5 * eps * powi(n, 3);
    let small = (n * (n - 1.0) * (n - 1.0) - eps * powi(n, 3)) / 6.0;
    let pair_bound = n * (n - 1.0) - eps * n * n;
    let triple_bound = n - 1.0 - eps * n;
    match item {
        Item::Vertex(v) => {
            let l = link_profile(h, part, v);
            if classify_link(part, part.side(v), &l, eps).class != Class::Typical {
                return Err(Error::HypothesisViolated(format!("vertex {v} is not typical")));
            }
            Ok(match part.side(v) {
                Side::A => vec![ClaimLine::ge("link_aab", l.l_aab as f64, big), ClaimLine::ge("link_bbb", l.l_bbb as f64, small)],
                Side::B => vec![ClaimLine::ge("link_abb", l.l_abb as f64, big), ClaimLine::ge("link_aaa", l.l_aaa as f64, small)],
            })
        }
        Item::Pair(u, v) => {
            let p = pair_profile(h, part, u, v);
            if !pair_is_typical(part, u, v, &p, eps) {
                return Err(Error::HypothesisViolated(format!("pair {{{u}, {v}}} is not typical")));
            }
            Ok(vec![match pair_pattern(part, u, v) {
                1 => ClaimLine::ge("pair_link_aa_bb", (p.l_aa + p.l_bb) as f64, (n - 1.0) * (n - 1.0) - eps * n * n),
                _ => ClaimLine::ge("pair_link_ab", p.l_ab as f64, pair_bound),
            }])
        }
        Item::Triple(t) => {
            let p = triple_profile(h, part, t);
            if !triple_is_typical(part, t, &p, eps) {
                return Err(Error::HypothesisViolated(format!("triple {t:?} is not typical")));
            }
            Ok(vec![match triple_pattern(part, &t) {
                0 | 2 => ClaimLine::ge("d_b", p.d_b as f64, triple_bound),
                _ => ClaimLine::ge("d_a", p.d_a as f64, triple_bound),
            }])
        }
    }
}

/// Both sides of `2|AABB| + 3|ABBB| = Σ_{S ∈ ABB} d₃(S)`.
pub fn double_count_abb(h: &Hypergraph4, part: &Partition) -> (u64, u64) {
    let (mut aabb, mut abbb) = (0u64, 0u64);
    for e in h.edges() {
        match e.iter().filter(|&&v| part.is_a(v as usize)).count() {
            2 => aabb += 1,
            1 => abbb += 1,
            _ => {}
        }
    }
    let mut sum = 0u64;
    for_each_triple(h.vertex_count(), |t| {
        if part.count_a(&t) == 1 {
            sum += h.codegree(t) as u64;
        }
    });
    (2 * aabb + 3 * abbb, sum)
}

/// Upper bound on link triples of a single pattern, for sanity checks.
pub fn pattern_capacity(part: &Partition, side: Side, in_a: usize) -> u64 {
    let (a, b) = (part.a_len() as u64, part.b_len() as u64);
    let (a, b) = match side {
        Side::A => (a - 1, b),
        Side::B => (a, b - 1),
    };
    binom(a, in_a as u64) * binom(b, 3 - in_a as u64)
}
