use tight4::assembly::solve_ham_path;
use tight4::cert::{check_cycle, check_path, Certificate};
use tight4::extremal::{build_benchmark, build_h0, Demand, InstanceRecipe};
use tight4::format::{parse_certificate, parse_graph, write_certificate, write_graph};
use tight4::parity::solve_ham_cycle;
use tight4::{Error, SolverParams};

fn recipe(n: usize, odd: bool, mediums: usize, anarchists: usize, seed: u64, demand: Demand) -> InstanceRecipe {
    let mut r = InstanceRecipe::new(n);
    r.odd = odd;
    r.medium_seeds = mediums;
    r.anarchists = anarchists;
    r.rng_seed = seed;
    r.demand = demand;
    r
}

fn is_permutation(seq: &[usize], n: usize) -> bool {
    let mut seen = vec![false; n];
    seq.len() == n && seq.iter().all(|&v| v < n && !std::mem::replace(&mut seen[v], true))
}

#[test]
fn paths_through_file_round_trip() {
    for r in [recipe(20, false, 1, 0, 1, Demand::Path), recipe(40, true, 2, 1, 2, Demand::Path)] {
        let b = build_benchmark(&r).unwrap();
        // the solver sees only what survives serialisation
        let (h, _) = parse_graph(&write_graph(&b.graph, &r.to_kv_lines())).unwrap();
        let p = solve_ham_path(&h, &SolverParams::desk()).unwrap();
        assert!(is_permutation(&p.seq, h.vertex_count()));
        assert!(check_path(&h, &p.seq).is_ok());
        let back = parse_certificate(&write_certificate(&Certificate::Path(p.clone()))).unwrap();
        assert_eq!(back.seq(), &p.seq[..]);
    }
}

#[test]
fn cycles_on_even_and_odd_vertex_counts() {
    for r in [recipe(40, false, 2, 1, 7, Demand::Cycle), recipe(40, true, 2, 0, 8, Demand::Cycle)] {
        let b = build_benchmark(&r).unwrap();
        let c = solve_ham_cycle(&b.graph, &SolverParams::desk()).unwrap();
        assert!(is_permutation(&c.seq, b.graph.vertex_count()), "{r:?}");
        assert!(check_cycle(&b.graph, &c.seq).is_ok(), "{r:?}");
    }
}

#[test]
fn extremal_graph_is_refused_before_search() {
    let h = build_h0(20, 20, false).unwrap();
    assert!(matches!(solve_ham_path(&h, &SolverParams::desk()), Err(Error::ThresholdNotMet { .. })));
    assert!(matches!(solve_ham_cycle(&h, &SolverParams::desk()), Err(Error::ThresholdNotMet { .. })));
}

#[test]
fn same_seed_same_certificate() {
    let b = build_benchmark(&recipe(20, false, 1, 0, 4, Demand::Cycle)).unwrap();
    let p = SolverParams::desk();
    assert_eq!(solve_ham_cycle(&b.graph, &p).unwrap().seq, solve_ham_cycle(&b.graph, &p).unwrap().seq);
}
