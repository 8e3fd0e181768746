use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context};
use clap::{Parser, Subcommand};
use rayon::prelude::*;
use tight4::cert::{is_hamiltonian_certificate, Certificate};
use tight4::extremal::{build_benchmark, build_h0, build_h0_prime, build_random, compute_b, h0_partition, Demand, InstanceRecipe};
use tight4::format::{parse_certificate, parse_graph, parse_partition, write_certificate, write_graph, write_partition};
use tight4::oracle::{exact_ham_cycle, exact_ham_path};
use tight4::typicality::evaluate_counting_claims;
use tight4::{Error, Hypergraph4, Partition};
use tight4_cli::{bench_one, default_recipes, error_kind, exit, solve, BenchRow, Mode, ProfileArgs, RunReport};

#[derive(Parser)]
#[command(name = "tight4", about = "Tight Hamiltonian paths and cycles in near-extremal 4-graphs")]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Write a generated graph with its partition and recipe.
    Gen(GenArgs),
    /// Build and re-verify a tight Hamiltonian path or cycle.
    Solve {
        graph: PathBuf,
        #[arg(long, value_enum, default_value = "cycle")]
        mode: Mode,
        /// Certificate output; defaults to `<graph>.cert`.
        #[arg(long)]
        cert: Option<PathBuf>,
        /// Print the full solver trace to stderr.
        #[arg(long)]
        trace: bool,
        #[command(flatten)]
        profile: ProfileArgs,
    },
    /// Exit 0 iff the certificate is a tight Hamiltonian path/cycle of the graph.
    Verify {
        graph: PathBuf,
        certificate: PathBuf,
        #[arg(long, conflicts_with = "cycle")]
        path: bool,
        #[arg(long)]
        cycle: bool,
    },
    /// Evaluate the counting claims against a partition.
    Check {
        graph: PathBuf,
        /// Partition file; computed by local search when absent.
        #[arg(long)]
        partition: Option<PathBuf>,
        /// Report failed hypotheses without letting them decide the exit code.
        #[arg(long)]
        claims_only: bool,
        #[command(flatten)]
        profile: ProfileArgs,
    },
    /// Exact answer by subset DP (N <= 16).
    Oracle {
        graph: PathBuf,
        #[arg(long, conflicts_with = "cycle")]
        path: bool,
        #[arg(long)]
        cycle: bool,
    },
    /// Solve the default benchmark family and print a CSV row per run.
    Bench {
        /// Half sizes as `a..b` (inclusive) or a single value.
        #[arg(long, default_value = "20..60")]
        n: String,
        #[arg(long, default_value_t = 20)]
        step: usize,
        #[arg(long, default_value_t = 20)]
        reps: usize,
        #[arg(long, value_enum, default_value = "cycle")]
        mode: Mode,
        #[arg(long)]
        out: Option<PathBuf>,
        #[command(flatten)]
        profile: ProfileArgs,
    },
}

#[derive(clap::Args)]
struct GenArgs {
    #[arg(long, group = "family")]
    h0: bool,
    #[arg(long, group = "family")]
    h0_prime: bool,
    #[arg(long, group = "family")]
    random: bool,
    /// Half size; for `--random` the vertex count.
    #[arg(long)]
    n: usize,
    #[arg(long)]
    odd: bool,
    #[arg(long, default_value_t = 1)]
    mediums: usize,
    #[arg(long, default_value_t = 0)]
    anarchists: usize,
    #[arg(long, default_value_t = 0.0)]
    deletion: f64,
    #[arg(long)]
    neutral: bool,
    #[arg(long, value_enum, default_value = "cycle")]
    demand: DemandArg,
    /// Edge probability for `--random`.
    #[arg(long, default_value_t = 0.5)]
    p: f64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Graph output; the partition goes to `<out>.part`. Stdout when absent.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Clone, Copy, clap::ValueEnum)]
enum DemandArg {
    None,
    Path,
    Cycle,
}

/// A failure with the exit code it maps to.
struct Fail(u8, anyhow::Error);

impl From<anyhow::Error> for Fail {
    fn from(e: anyhow::Error) -> Self {
        Fail(exit::USAGE, e)
    }
}

fn usage(e: Error) -> Fail {
    Fail(exit::USAGE, e.into())
}

fn read_graph(p: &Path) -> Result<Hypergraph4, Fail> {
    let text = fs::read_to_string(p).with_context(|| format!("reading {}", p.display()))?;
    parse_graph(&text).map(|(h, _)| h).with_context(|| format!("parsing {}", p.display())).map_err(Fail::from)
}

fn write_out(out: &Option<PathBuf>, text: &str) -> anyhow::Result<()> {
    match out {
        Some(p) => fs::write(p, text).with_context(|| format!("writing {}", p.display())),
        None => {
            std::io::stdout().write_all(text.as_bytes())?;
            Ok(())
        }
    }
}

fn cmd_gen(a: GenArgs) -> Result<u8, Fail> {
    let (h, part, comments): (Hypergraph4, Option<Partition>, Vec<String>) = if a.h0 || a.h0_prime {
        let (sa, sb) = (a.n + usize::from(a.odd), a.n);
        let h = if a.h0 { build_h0(sa, sb, a.neutral) } else { build_h0_prime(sa, sb) }.map_err(usage)?;
        // the extra vertex of the prime variant sits on neither side
        let part = if a.h0 { Some(h0_partition(sa, sb)) } else { None };
        let kind = if a.h0 { "h0" } else { "h0_prime" };
        (h, part, vec![format!("recipe={kind}"), format!("a_size={sa}"), format!("b_size={sb}")])
    } else if a.random {
        if a.n < 4 || !(0.0..=1.0).contains(&a.p) {
            return Err(usage(Error::InvalidRecipe(format!("random graph with N={} p={}", a.n, a.p))));
        }
        let h = build_random(a.n, a.p, a.seed);
        (h, None, vec!["recipe=random".into(), format!("vertices={}", a.n), format!("p={}", a.p), format!("rng_seed={}", a.seed)])
    } else {
        let mut r = InstanceRecipe::new(a.n);
        r.odd = a.odd;
        r.include_neutral = a.neutral;
        r.medium_seeds = a.mediums;
        r.anarchists = a.anarchists;
        r.deletion_rate = a.deletion;
        r.rng_seed = a.seed;
        r.demand = match a.demand {
            DemandArg::None => Demand::None,
            DemandArg::Path => Demand::Path,
            DemandArg::Cycle => Demand::Cycle,
        };
        let b = build_benchmark(&r).map_err(usage)?;
        (b.graph, Some(b.partition), r.to_kv_lines())
    };
    write_out(&a.out, &write_graph(&h, &comments))?;
    if let (Some(p), Some(out)) = (part, &a.out) {
        let mut pp = out.clone().into_os_string();
        pp.push(".part");
        fs::write(&pp, write_partition(&p)).context("writing partition")?;
    }
    Ok(exit::OK)
}

fn cmd_solve(graph: PathBuf, mode: Mode, cert: Option<PathBuf>, trace: bool, profile: ProfileArgs) -> Result<u8, Fail> {
    let h = read_graph(&graph)?;
    let params = profile.params().map_err(usage)?;
    let run = solve(&h, mode, &params);
    let cert_path = cert.unwrap_or_else(|| {
        let mut p = graph.clone().into_os_string();
        p.push(".cert");
        p.into()
    });
    if let Some(c) = &run.certificate {
        fs::write(&cert_path, write_certificate(c)).with_context(|| format!("writing {}", cert_path.display()))?;
    }
    if trace {
        for l in run.trace.lines() {
            eprintln!("{l}");
        }
    }
    let report = RunReport {
        instance: format!("{} N={} edges={}", graph.display(), h.vertex_count(), h.edge_count()),
        profile: profile.describe(),
        run: &run,
        certificate_path: run.certificate.as_ref().map(|_| cert_path.clone()),
    };
    for l in report.lines() {
        println!("{l}");
    }
    Ok(if run.ok() { exit::OK } else { exit::NEGATIVE })
}

fn cmd_verify(graph: PathBuf, certificate: PathBuf, path: bool, cycle: bool) -> Result<u8, Fail> {
    let h = read_graph(&graph)?;
    let text = fs::read_to_string(&certificate).with_context(|| format!("reading {}", certificate.display()))?;
    let c = parse_certificate(&text).map_err(usage)?;
    let kind_ok = match c {
        Certificate::Path(_) => !cycle,
        Certificate::Cycle(_) => !path,
    };
    let ok = kind_ok && is_hamiltonian_certificate(&h, &c);
    println!("{}", if ok { "valid" } else { "invalid" });
    Ok(if ok { exit::OK } else { exit::NEGATIVE })
}

fn cmd_check(graph: PathBuf, partition: Option<PathBuf>, claims_only: bool, profile: ProfileArgs) -> Result<u8, Fail> {
    let h = read_graph(&graph)?;
    let params = profile.params().map_err(usage)?;
    let part = match partition {
        Some(p) => {
            let text = fs::read_to_string(&p).with_context(|| format!("reading {}", p.display()))?;
            parse_partition(&text).map_err(usage)?
        }
        None => compute_b(&h, params.exact_b_threshold).partition,
    };
    if part.vertex_count() != h.vertex_count() {
        return Err(usage(Error::InvalidPartition(format!("{} vertices for N={}", part.vertex_count(), h.vertex_count()))));
    }
    let rep = match evaluate_counting_claims(&h, &part, &params) {
        Ok(r) => r,
        Err(e @ Error::HypothesisViolated(_)) => return Err(Fail(exit::HYPOTHESIS, e.into())),
        Err(e) => return Err(usage(e)),
    };
    for l in rep.lines() {
        println!("{l}");
    }
    Ok(if !claims_only && !rep.hypotheses_hold() {
        exit::HYPOTHESIS
    } else if rep.all_pass() {
        exit::OK
    } else {
        exit::NEGATIVE
    })
}

fn cmd_oracle(graph: PathBuf, cycle: bool) -> Result<u8, Fail> {
    let h = read_graph(&graph)?;
    let found = if cycle { exact_ham_cycle(&h).map(|c| c.map(|c| c.seq)) } else { exact_ham_path(&h).map(|p| p.map(|p| p.seq)) };
    match found {
        Ok(Some(seq)) => {
            let w: Vec<String> = seq.iter().map(|v| v.to_string()).collect();
            println!("YES {}", w.join(" "));
            Ok(exit::OK)
        }
        Ok(None) => {
            println!("NO");
            Ok(exit::NEGATIVE)
        }
        Err(e @ Error::TooLarge { .. }) => {
            println!("TOO_LARGE");
            Err(Fail(exit::USAGE, e.into()))
        }
        Err(e) => Err(usage(e)),
    }
}

fn parse_range(s: &str, step: usize) -> anyhow::Result<Vec<usize>> {
    let (a, b) = match s.split_once("..") {
        Some((a, b)) => (a.trim().parse()?, b.trim().parse()?),
        None => {
            let v = s.trim().parse()?;
            (v, v)
        }
    };
    if a > b || step == 0 {
        bail!("empty range {s:?} with step {step}");
    }
    Ok((a..=b).step_by(step).collect())
}

fn cmd_bench(n: String, step: usize, reps: usize, mode: Mode, out: Option<PathBuf>, profile: ProfileArgs) -> Result<u8, Fail> {
    let params = profile.params().map_err(usage)?;
    let jobs: Vec<InstanceRecipe> =
        parse_range(&n, step)?.into_iter().flat_map(|n| default_recipes(n, reps, mode.demand())).collect();
    let rows: Vec<BenchRow> = jobs.par_iter().map(|r| bench_one(r, mode, &params)).collect();
    let mut text = BenchRow::header();
    text.push('\n');
    for r in &rows {
        text.push_str(&r.csv());
        text.push('\n');
    }
    write_out(&out, &text)?;
    let ok = rows.iter().filter(|r| r.outcome == "ok").count();
    eprintln!("{ok}/{} solved", rows.len());
    Ok(if ok == rows.len() { exit::OK } else { exit::NEGATIVE })
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { exit::USAGE } else { exit::OK });
        }
    };
    let r = match cli.cmd {
        Cmd::Gen(a) => cmd_gen(a),
        Cmd::Solve { graph, mode, cert, trace, profile } => cmd_solve(graph, mode, cert, trace, profile),
        Cmd::Verify { graph, certificate, path, cycle } => cmd_verify(graph, certificate, path, cycle),
        Cmd::Check { graph, partition, claims_only, profile } => cmd_check(graph, partition, claims_only, profile),
        Cmd::Oracle { graph, path: _, cycle } => cmd_oracle(graph, cycle),
        Cmd::Bench { n, step, reps, mode, out, profile } => cmd_bench(n, step, reps, mode, out, profile),
    };
    match r {
        Ok(code) => ExitCode::from(code),
        Err(Fail(code, e)) => {
            eprintln!("error: {e:#}");
            if let Some(k) = e.downcast_ref::<Error>() {
                eprintln!("kind: {}", error_kind(k));
            }
            ExitCode::from(code)
        }
    }
}
