//! One line per acceptance criterion. Runs without the libtest harness so the
//! output reads as a report; exits nonzero if any criterion fails.

use std::process::ExitCode;
use std::time::Instant;

use rand::seq::{IndexedRandom, SliceRandom};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use tight4::cert::{check_cycle, check_path, Certificate};
use tight4::connector::{all_windows_typical, connect_triples, sample_attempt, ConnectorRequest, MAX_CONNECTOR};
use tight4::extremal::{
    build_benchmark, build_complete, build_h0, build_random, compute_b, compute_b_with, count_aabb, gain_table,
    h0_partition, pair_profiles, repair_sides, swap_correction, swap_delta_scan, Demand, InstanceRecipe,
};
use tight4::oracle::{exact_ham_cycle, exact_ham_path, exhaustive_b, family_graph, Family};
use tight4::parity::find_good_set;
use tight4::trace::Trace;
use tight4::typicality::{check_counting_claims, classify_all, double_count_abb, evaluate_counting_claims, Thresholds};
use tight4::{binom, Hypergraph4, Partition, SolverParams, VertexSet};
use tight4_cli::{default_recipes, solve, Mode, Run};

type Outcome = Result<String, String>;

fn ensure(ok: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if ok {
        Ok(())
    } else {
        Err(msg())
    }
}

/// Quads of `h`, counted by how many vertices lie in `A`, without going
/// through the library's counters.
fn pattern_counts(h: &Hypergraph4, part: &Partition) -> [u64; 5] {
    let mut c = [0u64; 5];
    for e in h.edges() {
        c[e.iter().filter(|&&v| part.is_a(v as usize)).count()] += 1;
    }
    c
}

fn brute_codegree(h: &Hypergraph4, t: [usize; 3]) -> usize {
    (0..h.vertex_count()).filter(|v| !t.contains(v) && h.has_edge([t[0], t[1], t[2], *v])).count()
}

fn random_partition(n: usize, rng: &mut ChaCha8Rng) -> Partition {
    let mut ids: Vec<usize> = (0..n).collect();
    ids.shuffle(rng);
    Partition::from_a(n, ids[..n.div_ceil(2)].iter().copied()).unwrap()
}

/// H0(m, m) with every quad toggled independently with probability `q`.
fn perturbed_h0(m: usize, q: f64, seed: u64) -> Hypergraph4 {
    let base = build_h0(m, m, false).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut quads = Vec::new();
    tight4::extremal::for_each_quad(2 * m, |e| {
        if base.has_edge(e) != rng.random_bool(q) {
            quads.push(e);
        }
    });
    Hypergraph4::new(2 * m, &quads).unwrap()
}

/// H0(m, m) plus each AABB quad with probability `p`: many seeds, so the
/// parity stage has to build switchers.
fn sprinkled(m: usize, p: f64, seed: u64) -> Hypergraph4 {
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
    Hypergraph4::new(2 * m, &quads).unwrap()
}

fn extremal_values() -> Outcome {
    for m in 2..=30usize {
        let h = build_h0(m, m, false).map_err(|e| format!("H0({m},{m}): {e}"))?;
        let d3 = h.min_codegree().map_err(|e| e.to_string())?;
        ensure(d3 == m - 2, || format!("H0({m},{m}) min codegree {d3}, want {}", m - 2))?;
        let want = 2 * m as u64 * binom(m as u64, 3);
        ensure(h.edge_count() as u64 == want, || format!("H0({m},{m}) has {} edges, want {want}", h.edge_count()))?;
        // the count must also match the quads by pattern
        let c = pattern_counts(&h, &h0_partition(m, m));
        ensure(c[0] + c[2] + c[4] == 0 && c[1] + c[3] == want, || format!("H0({m},{m}) pattern counts {c:?}"))?;
    }
    Ok("m=2..30 codegree m-2, edges 2m*C(m,3)".into())
}

fn tightness() -> Outcome {
    for n in [8usize, 10, 12, 13, 14] {
        let h = family_graph(Family::H0, n).map_err(|e| e.to_string())?;
        let r = exact_ham_path(&h).map_err(|e| e.to_string())?;
        ensure(r.is_none(), || format!("H0 on {n} vertices has a tight path {r:?}"))?;
    }
    for n in [7usize, 9, 11, 13] {
        let h = family_graph(Family::H0Prime, n).map_err(|e| e.to_string())?;
        let r = exact_ham_cycle(&h).map_err(|e| e.to_string())?;
        ensure(r.is_none(), || format!("H0' on {n} vertices has a tight cycle {r:?}"))?;
    }
    // positive control: the same oracle finds both in the complete graph
    for n in [8usize, 13, 14] {
        let h = build_complete(n);
        let p = exact_ham_path(&h).map_err(|e| e.to_string())?;
        let c = exact_ham_cycle(&h).map_err(|e| e.to_string())?;
        ensure(p.is_some_and(|p| check_path(&h, &p.seq).is_ok()), || format!("no path in K{n}"))?;
        ensure(c.is_some_and(|c| check_cycle(&h, &c.seq).is_ok()), || format!("no cycle in K{n}"))?;
    }
    Ok("no path in H0 at N=8,10,12,13,14; no cycle in H0' at N=7,9,11,13".into())
}

fn counting_claims(params: &SolverParams) -> Outcome {
    let mut checked = 0usize;
    for m in [20usize, 40, 60] {
        let h = build_h0(m, m, false).unwrap();
        let rep = evaluate_counting_claims(&h, &h0_partition(m, m), params).map_err(|e| e.to_string())?;
        ensure(rep.get("missing_h0_edges").is_some(), || format!("H0({m},{m}): edge claim not evaluated"))?;
        if let Some(bad) = rep.claims.iter().find(|c| !c.pass) {
            return Err(format!("H0({m},{m}): {}", bad.line()));
        }
        checked += rep.claims.len();
    }
    let recipes: Vec<InstanceRecipe> = [20usize, 40, 60].iter().flat_map(|&n| default_recipes(n, 20, Demand::Path)).collect();
    let results: Vec<Result<usize, String>> = recipes
        .par_iter()
        .map(|r| {
            let b = build_benchmark(r).map_err(|e| format!("{r:?}: {e}"))?;
            let mut part = compute_b(&b.graph, params.exact_b_threshold).partition;
            repair_sides(&b.graph, &mut part);
            let rep = check_counting_claims(&b.graph, &part, params).map_err(|e| format!("seed {}: {e}", r.rng_seed))?;
            match rep.claims.iter().find(|c| !c.pass) {
                Some(bad) => Err(format!("seed {}: {}", r.rng_seed, bad.line())),
                None => Ok(rep.claims.len()),
            }
        })
        .collect();
    for r in results {
        checked += r?;
    }
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    for i in 0..200 {
        let n = rng.random_range(5..=16);
        let h = build_random(n, rng.random_range(0.2..0.9), 9000 + i);
        let part = random_partition(n, &mut rng);
        let c = pattern_counts(&h, &part);
        let mut sum = 0u64;
        tight4::typicality::for_each_triple(n, |t| {
            if part.count_a(&t) == 1 {
                sum += brute_codegree(&h, t) as u64;
            }
        });
        let lhs = 2 * c[2] + 3 * c[1];
        ensure(lhs == sum, || format!("graph {i}: 2|AABB|+3|ABBB| = {lhs} but codegree sum {sum}"))?;
        ensure(double_count_abb(&h, &part) == (lhs, sum), || format!("graph {i}: library double count disagrees"))?;
    }
    Ok(format!("{checked} claim checks pass on H0 and 60 benchmarks; identity exact on 200 graphs"))
}

fn random_request(n_total: usize, part: &Partition, k_max: usize, rng: &mut ChaCha8Rng) -> ConnectorRequest {
    loop {
        let mut ids: Vec<usize> = (0..n_total).collect();
        ids.shuffle(rng);
        let from = [ids[0], ids[1], ids[2]];
        let to = [ids[3], ids[4], ids[5]];
        if (part.count_a(&from) >= 2) != (part.count_a(&to) >= 2) {
            continue;
        }
        let k = rng.random_range(0..=k_max);
        let avoid = VertexSet::from_iter(n_total, ids[6..6 + k].iter().copied());
        return ConnectorRequest { from, to, avoid };
    }
}

fn connector_statistics(params: &SolverParams) -> Outcome {
    let m = 40;
    let h = build_h0(m, m, false).unwrap();
    let part = h0_partition(m, m);
    let rep = classify_all(&h, &part, Thresholds::from_params(params));
    let k_max = 2 * m / 3;
    let mut rng = ChaCha8Rng::seed_from_u64(40);
    let trials = 1000usize;
    let mut fails = 0usize;
    for _ in 0..trials {
        let req = random_request(2 * m, &part, k_max, &mut rng);
        if sample_attempt(&h, &part, &req, params, &mut rng).is_err() {
            fails += 1;
        }
    }
    let rate = fails as f64 / trials as f64;
    let sigma = (rate * (1.0 - rate) / trials as f64).sqrt();
    ensure(rate + 3.0 * sigma < 0.75, || format!("failure rate {rate:.3} (+3 sigma {:.3})", rate + 3.0 * sigma))?;
    let paths = 100;
    for i in 0..paths {
        let req = random_request(2 * m, &part, k_max, &mut rng);
        let p = connect_triples(&h, &rep, &req, params, &mut rng).map_err(|e| format!("request {i}: {e}"))?;
        let s = &p.seq;
        ensure(s.len() <= MAX_CONNECTOR, || format!("request {i}: {} vertices", s.len()))?;
        ensure(s[..3] == req.from && s[s.len() - 3..] == req.to, || format!("request {i}: wrong ends {s:?}"))?;
        ensure(s.iter().all(|&v| !req.avoid.contains(v)), || format!("request {i}: path meets K"))?;
        ensure(check_path(&h, s).is_ok() && all_windows_typical(&h, &part, s), || format!("request {i}: bad windows {s:?}"))?;
        let mut seen = s.clone();
        seen.sort_unstable();
        seen.dedup();
        ensure(seen.len() == s.len(), || format!("request {i}: repeated vertex"))?;
    }
    Ok(format!("failure rate {rate:.3} +/- {sigma:.3} over {trials}; {paths} connectors meet the contract"))
}

struct BenchRun {
    recipe: InstanceRecipe,
    run: Option<Run>,
    secs: f64,
}

fn bench_runs(mode: Mode, params: &SolverParams) -> Vec<BenchRun> {
    let recipes: Vec<InstanceRecipe> = [20usize, 40, 60].iter().flat_map(|&n| default_recipes(n, 20, mode.demand())).collect();
    recipes
        .into_par_iter()
        .map(|recipe| {
            let t = Instant::now();
            let run = build_benchmark(&recipe).ok().map(|b| {
                let run = solve(&b.graph, mode, params);
                if let Some(c) = &run.certificate {
                    let ok = match c {
                        Certificate::Path(p) => check_path(&b.graph, &p.seq).is_ok(),
                        Certificate::Cycle(c) => check_cycle(&b.graph, &c.seq).is_ok(),
                    };
                    assert!(ok && c.seq().len() == b.graph.vertex_count(), "solve returned an unverified certificate");
                }
                run
            });
            BenchRun { recipe, run, secs: t.elapsed().as_secs_f64() }
        })
        .collect()
}

fn success_bar(runs: &[BenchRun]) -> Outcome {
    let ok = |r: &BenchRun| r.run.as_ref().is_some_and(Run::ok);
    let solved = runs.iter().filter(|r| ok(r)).count();
    let clean: Vec<&BenchRun> = runs.iter().filter(|r| r.recipe.deletion_rate == 0.0).collect();
    let clean_solved = clean.iter().filter(|r| ok(r)).count();
    let slowest = runs.iter().filter(|r| r.recipe.half_size == 60).map(|r| r.secs).fold(0.0, f64::max);
    let summary = format!(
        "{solved}/{} solved, deletion-free {clean_solved}/{}, slowest n=60 {slowest:.1}s",
        runs.len(),
        clean.len()
    );
    let failures: Vec<String> = runs
        .iter()
        .filter(|r| !ok(r))
        .map(|r| {
            let why = r.run.as_ref().and_then(|x| x.error.as_ref()).map_or("generation failed".to_string(), |e| e.to_string());
            format!("n={} seed={}: {why}", r.recipe.half_size, r.recipe.rng_seed)
        })
        .collect();
    ensure(solved * 100 >= runs.len() * 95 && clean_solved == clean.len() && slowest < 30.0, || {
        format!("{summary}; {}", failures.join("; "))
    })?;
    Ok(summary)
}

/// Independent reading of the parity lines: the integrality numbers must
/// satisfy the congruence and each residue line must sum to its residue.
fn parity_lines_hold(lines: &[String]) -> Result<(), String> {
    let integ = lines.iter().find(|l| l.starts_with("integrality ")).ok_or("no integrality line")?;
    let field = |key: &str| -> Option<i64> {
        integ.split_whitespace().find_map(|w| w.strip_prefix(key)).and_then(|v| v.parse().ok())
    };
    let (n1, n2) = field("n1=").zip(field("n2=")).ok_or_else(|| format!("unreadable: {integ}"))?;
    ensure((3 * n1 - n2 + 6).rem_euclid(8) == 0, || format!("{integ}: 3n1-n2+6 is not 0 mod 8"))?;
    let residue = lines.iter().find(|l| l.starts_with("residue ")).ok_or("no residue line")?;
    let w: Vec<&str> = residue.split_whitespace().collect();
    ensure(w.len() == 5 && w[2] == "=" && w[4] == "table", || format!("not a table hit: {residue}"))?;
    let a: u32 = w[1].parse().map_err(|_| residue.clone())?;
    let (x, y) = w[3].split_once('+').ok_or_else(|| residue.clone())?;
    let (x, y): (u32, u32) = (x.parse().map_err(|_| residue.clone())?, y.parse().map_err(|_| residue.clone())?);
    ensure((x + y) % 8 == a, || format!("{residue}: {x}+{y} is not {a} mod 8"))
}

fn cycle_bar(runs: &[BenchRun]) -> Outcome {
    let summary = success_bar(runs)?;
    for r in runs {
        if let Some(run) = r.run.as_ref().filter(|x| x.ok()) {
            parity_lines_hold(run.trace.lines()).map_err(|e| format!("n={} seed={}: {e}", r.recipe.half_size, r.recipe.rng_seed))?;
        }
    }
    Ok(format!("{summary}; integrality and residue table logged on every success"))
}

fn small_instances() -> Vec<(String, Hypergraph4)> {
    let mut out = Vec::new();
    for n in 5..=14usize {
        out.push((format!("H0 N={n}"), family_graph(Family::H0, n).unwrap()));
        out.push((format!("H0' N={n}"), family_graph(Family::H0Prime, n).unwrap()));
        out.push((format!("K N={n}"), build_complete(n)));
        for (i, p) in [0.5, 0.8, 0.95].into_iter().enumerate() {
            out.push((format!("random N={n} p={p}"), build_random(n, p, 100 * n as u64 + i as u64)));
        }
    }
    for m in [4usize, 5, 6, 7] {
        for s in 0..4u64 {
            out.push((format!("perturbed H0({m},{m}) seed {s}"), perturbed_h0(m, 0.05, s)));
        }
    }
    for half in [5usize, 6, 7] {
        for seed in 0..4u64 {
            for demand in [Demand::Path, Demand::Cycle] {
                let mut r = InstanceRecipe::new(half);
                r.rng_seed = seed;
                r.demand = demand;
                r.deletion_rate = if seed % 2 == 1 { 0.01 } else { 0.0 };
                if let Ok(b) = build_benchmark(&r) {
                    out.push((format!("benchmark n={half} seed={seed} {demand:?}"), b.graph));
                }
            }
        }
    }
    out
}

/// Certificates emitted and the traces of both runs, per instance.
type SmallRow = Result<(usize, Vec<Vec<String>>), String>;

fn oracle_cross_check(params: &SolverParams, traces: &mut Vec<Vec<String>>) -> Outcome {
    let instances = small_instances();
    let rows: Vec<SmallRow> = instances
        .par_iter()
        .map(|(name, h)| {
            let mut emitted = 0;
            let mut lines = Vec::new();
            for mode in [Mode::Path, Mode::Cycle] {
                let run = solve(h, mode, params);
                if run.certificate.is_some() {
                    emitted += 1;
                    let yes = match mode {
                        Mode::Path => exact_ham_path(h).map(|p| p.is_some()),
                        Mode::Cycle => exact_ham_cycle(h).map(|c| c.is_some()),
                    }
                    .map_err(|e| format!("{name}: {e}"))?;
                    if !yes {
                        return Err(format!("{name}: {} certificate where the oracle says NO", mode.name()));
                    }
                }
                lines.push(run.trace.lines().to_vec());
            }
            Ok((emitted, lines))
        })
        .collect();
    let mut emitted = 0;
    for r in rows {
        let (e, l) = r?;
        emitted += e;
        traces.extend(l);
    }
    Ok(format!("0 violations over {} instances x 2 modes ({emitted} certificates emitted)", instances.len()))
}

fn structure_sizes(traces: &[Vec<String>]) -> Outcome {
    let mut counts = [0usize; 4];
    for lines in traces {
        for l in lines {
            let w: Vec<&str> = l.split_whitespace().collect();
            if w.first() != Some(&"size") {
                continue;
            }
            let num = |i: usize| w.get(i).and_then(|x| x.parse::<usize>().ok()).ok_or_else(|| format!("unreadable: {l}"));
            match w.get(1).copied() {
                Some("bridge") => {
                    counts[0] += 1;
                    ensure(num(2)? <= 25, || format!("{l}: bridge over 25"))?;
                }
                Some("absorber") => {
                    counts[1] += 1;
                    ensure(num(2)? == 7, || format!("{l}: absorber is not 7 vertices"))?;
                }
                Some("switcher") => {
                    counts[2] += 1;
                    ensure(num(2)? <= 100 && num(3)? % 2 == 1, || format!("{l}: switcher too long or even"))?;
                }
                Some("good_set") => {
                    counts[3] += 1;
                    ensure(num(2)? < 1600, || format!("{l}: good set too large"))?;
                }
                _ => return Err(format!("unknown structure line: {l}")),
            }
        }
    }
    ensure(counts.iter().all(|&c| c > 0), || format!("some structure never built: {counts:?}"))?;
    Ok(format!(
        "{} bridges, {} absorbers, {} switchers, {} good sets within bounds",
        counts[0], counts[1], counts[2], counts[3]
    ))
}

fn switcher_traces(params: &SolverParams) -> Result<Vec<Vec<String>>, String> {
    [(60usize, 4u64), (60, 11)]
        .par_iter()
        .map(|&(m, seed)| {
            let h = sprinkled(m, 0.05, seed);
            let rep = classify_all(&h, &h0_partition(m, m), Thresholds::from_params(params));
            let mut t = Trace::new();
            find_good_set(&h, &rep, params, &mut ChaCha8Rng::seed_from_u64(seed), &mut t)
                .map_err(|e| format!("seed-rich H0({m},{m}) seed {seed}: {e}"))?;
            Ok(t.lines().to_vec())
        })
        .collect()
}

fn b_search() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    let mut nonzero = 0;
    for i in 0..50u64 {
        let n = rng.random_range(8..=16usize);
        // half near-extremal, half uniform
        let h = if i % 2 == 0 {
            let m = n / 2;
            perturbed_h0(m, rng.random_range(0.01..0.15), i)
        } else {
            build_random(n, rng.random_range(0.3..0.9), 500 + i)
        };
        let exact = exhaustive_b(&h).map_err(|e| e.to_string())?;
        let local = compute_b_with(&h, 0, 6, i);
        ensure(!local.exact, || "local search reported itself exact".into())?;
        ensure(local.value == exact.value, || format!("instance {i} (N={}): local {} vs exhaustive {}", h.vertex_count(), local.value, exact.value))?;
        ensure(pattern_counts(&h, &local.partition)[2] == local.value, || format!("instance {i}: value is not the partition's count"))?;
        nonzero += usize::from(exact.value > 0);
    }
    for i in 0..500u64 {
        let n = rng.random_range(8..=20usize);
        let h = if i % 2 == 0 { perturbed_h0(n / 2, 0.1, 7000 + i) } else { build_random(n, rng.random_range(0.2..0.9), 7000 + i) };
        let n = h.vertex_count();
        let part = random_partition(n, &mut rng);
        let a_side = part.a_vertices();
        let b_side = part.b_vertices();
        let a = *a_side.choose(&mut rng).unwrap();
        let b = *b_side.choose(&mut rng).unwrap();
        let prof = pair_profiles(&h, &part);
        let gain = gain_table(&part, &prof);
        let predicted = gain[a] - gain[b] + swap_correction(&prof, n, a, b);
        let mut after = part.clone();
        after.swap(a, b);
        let actual = pattern_counts(&h, &after)[2] as i64 - pattern_counts(&h, &part)[2] as i64;
        ensure(predicted == actual, || format!("swap {i}: predicted {predicted}, actual {actual}"))?;
        ensure(swap_delta_scan(&h, &part, a, b) == actual, || format!("swap {i}: edge scan disagrees"))?;
        ensure(count_aabb(&h, &after) as i64 - count_aabb(&h, &part) as i64 == actual, || format!("swap {i}: count_aabb disagrees"))?;
    }
    Ok(format!("local search exact on 50 instances ({nonzero} with b > 0); gain identity exact on 500 swaps"))
}

fn main() -> ExitCode {
    let params = SolverParams::desk();
    let mut failed = 0;
    let mut report = |k: usize, name: &str, start: Instant, r: Outcome| {
        let secs = start.elapsed().as_secs_f64();
        match r {
            Ok(d) => println!("criterion {k} {name}: PASS ({secs:.1}s) {d}"),
            Err(d) => {
                failed += 1;
                println!("criterion {k} {name}: FAIL ({secs:.1}s) {d}")
            }
        }
    };
    let timed = |limit: f64, start: Instant, r: Outcome| -> Outcome {
        let s = start.elapsed().as_secs_f64();
        let d = r?;
        ensure(s < limit, || format!("{d}; took {s:.1}s, limit {limit}s"))?;
        Ok(d)
    };

    let t = Instant::now();
    report(1, "extremal values", t, timed(10.0, t, extremal_values()));
    let t = Instant::now();
    report(2, "tightness", t, timed(300.0, t, tightness()));
    let t = Instant::now();
    report(3, "counting claims", t, timed(120.0, t, counting_claims(&params)));
    let t = Instant::now();
    report(4, "connector statistics", t, timed(60.0, t, connector_statistics(&params)));

    let mut traces: Vec<Vec<String>> = Vec::new();
    let t = Instant::now();
    let path_runs = bench_runs(Mode::Path, &params);
    report(5, "hamiltonian path", t, success_bar(&path_runs));
    let t = Instant::now();
    let cycle_runs = bench_runs(Mode::Cycle, &params);
    report(6, "hamiltonian cycle", t, cycle_bar(&cycle_runs));
    for r in path_runs.iter().chain(&cycle_runs) {
        if let Some(run) = &r.run {
            traces.push(run.trace.lines().to_vec());
        }
    }

    let t = Instant::now();
    report(7, "oracle cross-check", t, oracle_cross_check(&params, &mut traces));

    let t = Instant::now();
    let sizes = switcher_traces(&params).and_then(|extra| {
        traces.extend(extra);
        structure_sizes(&traces)
    });
    report(8, "structure sizes", t, sizes);

    let t = Instant::now();
    report(9, "b(H) search", t, timed(120.0, t, b_search()));

    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
