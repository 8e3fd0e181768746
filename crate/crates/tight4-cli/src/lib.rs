//! Shared pieces of the `tight4` binary: parameter profiles from flags, the
//! staged run report, the default benchmark family and bench rows.

use std::path::PathBuf;
use std::sync::OnceLock;
use std::time::Instant;

use clap::{Args, ValueEnum};
use tight4::cert::{is_hamiltonian_certificate, Certificate};
use tight4::extremal::{build_benchmark, Demand, InstanceRecipe};
use tight4::parity::solve_ham_cycle_traced;
use tight4::trace::Trace;
use tight4::{assembly, Error, Hypergraph4, SolverParams};

pub mod exit {
    pub const OK: u8 = 0;
    pub const NEGATIVE: u8 = 1;
    pub const USAGE: u8 = 2;
    pub const HYPOTHESIS: u8 = 3;
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Profile {
    Desk,
    Paper,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Mode {
    Path,
    Cycle,
}

impl Mode {
    pub fn name(self) -> &'static str {
        match self {
            Mode::Path => "path",
            Mode::Cycle => "cycle",
        }
    }

    pub fn demand(self) -> Demand {
        match self {
            Mode::Path => Demand::Path,
            Mode::Cycle => Demand::Cycle,
        }
    }
}

#[derive(Args, Clone, Debug)]
pub struct ProfileArgs {
    #[arg(long, value_enum, default_value = "desk")]
    pub profile: Profile,
    /// Base epsilon of the `paper` profile's cascade.
    #[arg(long, default_value_t = 0.01)]
    pub eps: f64,
    #[arg(long)]
    pub eps0: Option<f64>,
    #[arg(long)]
    pub eps1: Option<f64>,
    #[arg(long)]
    pub eps2: Option<f64>,
    #[arg(long)]
    pub eps3: Option<f64>,
    #[arg(long)]
    pub eps4: Option<f64>,
    #[arg(long)]
    pub eps5: Option<f64>,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Build the good set from crossing vertices even when seeds exist.
    #[arg(long)]
    pub force_case3: bool,
}

impl ProfileArgs {
    pub fn params(&self) -> Result<SolverParams, Error> {
        let mut p = match self.profile {
            Profile::Desk => SolverParams::desk(),
            Profile::Paper => SolverParams::paper(self.eps),
        };
        for (slot, v) in [
            (&mut p.eps0, self.eps0),
            (&mut p.eps1, self.eps1),
            (&mut p.eps2, self.eps2),
            (&mut p.eps3, self.eps3),
            (&mut p.eps4, self.eps4),
            (&mut p.eps5, self.eps5),
        ] {
            if let Some(v) = v {
                *slot = v;
            }
        }
        p.rng_seed = self.seed;
        p.force_case3 = self.force_case3;
        p.validate()?;
        Ok(p)
    }

    pub fn describe(&self) -> String {
        match self.profile {
            Profile::Desk => format!("desk seed={}", self.seed),
            Profile::Paper => format!("paper eps={} seed={}", self.eps, self.seed),
        }
    }
}

impl Default for ProfileArgs {
    fn default() -> Self {
        ProfileArgs {
            profile: Profile::Desk,
            eps: 0.01,
            eps0: None,
            eps1: None,
            eps2: None,
            eps3: None,
            eps4: None,
            eps5: None,
            seed: 0,
            force_case3: false,
        }
    }
}

/// Microseconds since the first call; the solver's stage clock.
pub fn now_us() -> u64 {
    static START: OnceLock<Instant> = OnceLock::new();
    START.get_or_init(Instant::now).elapsed().as_micros() as u64
}

/// Variant name of an error, e.g. `ThresholdNotMet`.
pub fn error_kind(e: &Error) -> String {
    let dbg = format!("{e:?}");
    dbg.split(|c: char| !c.is_alphanumeric()).next().unwrap_or("").to_string()
}

/// One solver run. A certificate is only kept after it re-verifies.
pub struct Run {
    pub mode: Mode,
    pub certificate: Option<Certificate>,
    pub error: Option<Error>,
    pub trace: Trace,
    pub total_us: u64,
}

pub fn solve(h: &Hypergraph4, mode: Mode, params: &SolverParams) -> Run {
    let start = now_us();
    let mut trace = Trace::with_clock(now_us);
    let result = match mode {
        Mode::Path => assembly::solve_ham_path_traced(h, params, &mut trace).map(Certificate::Path),
        Mode::Cycle => solve_ham_cycle_traced(h, params, &mut trace).map(Certificate::Cycle),
    };
    let (certificate, error) = match result {
        Ok(c) if is_hamiltonian_certificate(h, &c) => (Some(c), None),
        Ok(_) => (
            None,
            Some(Error::ConstructionFailed { stage: "verify", detail: "certificate failed re-verification".into() }),
        ),
        Err(e) => (None, Some(e)),
    };
    Run { mode, certificate, error, trace, total_us: now_us() - start }
}

impl Run {
    pub fn ok(&self) -> bool {
        self.certificate.is_some()
    }

    /// Value of the first `case k` trace line.
    pub fn case(&self) -> Option<u8> {
        self.trace.lines().iter().find_map(|l| l.strip_prefix("case ")?.trim().parse().ok())
    }

    /// Summed microseconds per stage name.
    pub fn stage_times(&self) -> Vec<(String, u64)> {
        let mut out: Vec<(String, u64)> = Vec::new();
        for l in self.trace.lines() {
            let Some(rest) = l.strip_prefix("stage ") else { continue };
            let name = rest.split_whitespace().next().unwrap_or("").to_string();
            let us = rest.rsplit_once("us=").and_then(|(_, v)| v.parse().ok()).unwrap_or(0);
            match out.iter_mut().find(|(n, _)| *n == name) {
                Some(slot) => slot.1 += us,
                None => out.push((name, us)),
            }
        }
        out
    }
}

/// The text report of `solve`: instance, profile, stages, outcome.
pub struct RunReport<'a> {
    pub instance: String,
    pub profile: String,
    pub run: &'a Run,
    pub certificate_path: Option<PathBuf>,
}

impl RunReport<'_> {
    pub fn lines(&self) -> Vec<String> {
        let r = self.run;
        let mut out = vec![
            format!("instance {}", self.instance),
            format!("profile {}", self.profile),
            format!("mode {}", r.mode.name()),
        ];
        out.extend(r.trace.lines().iter().filter(|l| l.starts_with("stage ")).cloned());
        match (&r.certificate, &r.error) {
            (Some(_), _) => {
                out.push("outcome ok".into());
                if let Some(p) = &self.certificate_path {
                    out.push(format!("certificate {}", p.display()));
                }
            }
            (None, Some(e)) => {
                out.push("outcome failed".into());
                out.push(format!("reason {}: {e}", error_kind(e)));
            }
            (None, None) => out.push("outcome failed".into()),
        }
        out.push(format!("total_us {}", r.total_us));
        out
    }
}

/// The default benchmark family at half size `n`, `reps` recipes. Planted
/// mediums scale as `n/20`; anarchists appear only when two mediums per side
/// keep the codegree threshold; every other recipe deletes 1% of the edges
/// that can go.
pub fn default_recipes(n: usize, reps: usize, demand: Demand) -> Vec<InstanceRecipe> {
    let s_max = (n / 20).clamp(1, 3);
    (0..reps)
        .map(|i| {
            let mut r = InstanceRecipe::new(n);
            r.medium_seeds = 1 + i % s_max;
            r.anarchists = if r.medium_seeds >= 2 { (i / s_max) % 2 } else { 0 };
            r.deletion_rate = if i % 2 == 1 { 0.01 } else { 0.0 };
            r.include_neutral = i % 4 == 3;
            r.rng_seed = 1000 * n as u64 + i as u64;
            r.demand = demand;
            r
        })
        .collect()
}

pub struct BenchRow {
    pub recipe: InstanceRecipe,
    pub mode: Mode,
    pub outcome: String,
    pub reason: String,
    pub case: Option<u8>,
    pub stages: Vec<(String, u64)>,
    pub total_us: u64,
}

const STAGES: [&str; 8] = ["threshold", "compute_b", "classify", "bridge", "good_set", "absorb", "transfer", "complete"];

impl BenchRow {
    pub fn header() -> String {
        let mut h = String::from("n,vertices,mediums,anarchists,deletion_rate,neutral,rng_seed,mode,outcome,reason,case");
        for s in STAGES {
            h.push_str(&format!(",{s}_us"));
        }
        h.push_str(",total_us");
        h
    }

    pub fn csv(&self) -> String {
        let r = &self.recipe;
        let mut line = format!(
            "{},{},{},{},{},{},{},{},{},{},{}",
            r.half_size,
            r.vertex_count(),
            r.medium_seeds,
            r.anarchists,
            r.deletion_rate,
            r.include_neutral,
            r.rng_seed,
            self.mode.name(),
            self.outcome,
            self.reason,
            self.case.map(|c| c.to_string()).unwrap_or_default(),
        );
        for s in STAGES {
            let us = self.stages.iter().find(|(n, _)| n == s).map(|(_, t)| *t).unwrap_or(0);
            line.push_str(&format!(",{us}"));
        }
        line.push_str(&format!(",{}", self.total_us));
        line
    }
}

pub fn bench_one(recipe: &InstanceRecipe, mode: Mode, params: &SolverParams) -> BenchRow {
    let row = |outcome: &str, reason: String, run: Option<&Run>| BenchRow {
        recipe: recipe.clone(),
        mode,
        outcome: outcome.into(),
        reason,
        case: run.and_then(Run::case),
        stages: run.map(Run::stage_times).unwrap_or_default(),
        total_us: run.map(|r| r.total_us).unwrap_or(0),
    };
    let b = match build_benchmark(recipe) {
        Ok(b) => b,
        Err(e) => return row("gen_failed", error_kind(&e), None),
    };
    let run = solve(&b.graph, mode, params);
    match &run.error {
        None => row("ok", String::new(), Some(&run)),
        Some(e) => row("failed", error_kind(e), Some(&run)),
    }
}
