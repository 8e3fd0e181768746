//! Parameter profiles. The desk profile decouples the epsilons so that the
//! vertex classes stay meaningful at `n` in the tens; the `paper` profile keeps
//! the asymptotic cascade `eps0 = eps^4, ..., eps5 = 120 eps`.

use alloc::format;

use crate::error::{Error, Result};

#[derive(Clone, Debug, PartialEq)]
pub struct SolverParams {
    pub eps0: f64,
    pub eps1: f64,
    pub eps2: f64,
    pub eps3: f64,
    pub eps4: f64,
    pub eps5: f64,
    /// Connector sampling probability is `sample_rate_numerator / n`, capped at 1.
    pub sample_rate_numerator: u32,
    pub connector_retry_budget: usize,
    /// Stand-ins for the O(n^2) and O(n^3) terms.
    pub slack_c2: f64,
    pub slack_c3: f64,
    pub min_solver_n: usize,
    pub rng_seed: u64,
    /// `compute_b` is exhaustive up to this many vertices.
    pub exact_b_threshold: usize,
    pub b_restarts: usize,
    /// Sequencing refuses sets smaller than `seq_c * n`.
    pub seq_c: f64,
    /// Cap on `|V(Q)|` as a fraction of `N`.
    pub q_cap_fraction: f64,
    /// `A_big` cut-off in the completion step.
    pub gamma_big: f64,
    /// Asserted lower bound on `d_Gamma(b) / m1` (diagnostic only).
    pub gamma_pair: f64,
    /// Tail fraction `p2 = ceil(tail_fraction * m1)`.
    pub tail_fraction: f64,
    /// Minimum number of connector vertices strictly between the two triples.
    /// 3 keeps every window inside one triple plus the sampled set; 0 lets the
    /// connector overlap-free but window-checked junctions shorten paths.
    pub connector_min_interior: usize,
    pub completion_retries: usize,
    pub solve_retries: usize,
    /// Raise eps1..eps3 by powers of two until most eps5-typical vertices are
    /// eps1-typical.
    pub typicality_escalation: bool,
    /// Skip seeds so the good set is always built by the crossing-vertex case.
    pub force_case3: bool,
    /// Anarchist budget is `anarchist_budget_factor * eps0 * n`.
    pub anarchist_budget_factor: f64,
}

impl SolverParams {
    pub fn desk() -> Self {
        SolverParams {
            eps0: 0.1,
            eps1: 0.1,
            eps2: 0.1,
            eps3: 0.1,
            eps4: 0.15,
            eps5: 0.2,
            sample_rate_numerator: 8,
            connector_retry_budget: 64,
            slack_c2: 8.0,
            slack_c3: 1.0,
            min_solver_n: 8,
            rng_seed: 0,
            exact_b_threshold: 20,
            b_restarts: 6,
            seq_c: 0.05,
            q_cap_fraction: 0.8,
            gamma_big: 0.9,
            gamma_pair: 0.99,
            tail_fraction: 0.3,
            connector_min_interior: 0,
            completion_retries: 24,
            solve_retries: 6,
            typicality_escalation: true,
            force_case3: false,
            anarchist_budget_factor: 5.0,
        }
    }

    /// The cascade from a single `eps`.
    pub fn paper(eps: f64) -> Self {
        SolverParams {
            eps0: eps * eps * eps * eps,
            eps1: eps * eps * eps,
            eps2: eps * eps,
            eps3: eps,
            eps4: 40.0 * eps,
            eps5: 120.0 * eps,
            sample_rate_numerator: 60,
            connector_min_interior: 3,
            typicality_escalation: false,
            q_cap_fraction: eps * eps * eps / 2.0,
            ..Self::desk()
        }
    }

    pub fn validate(&self) -> Result<()> {
        let open = |x: f64| x > 0.0 && x < 1.0;
        let named = [
            ("eps0", self.eps0),
            ("eps1", self.eps1),
            ("eps2", self.eps2),
            ("eps3", self.eps3),
            ("eps4", self.eps4),
            ("eps5", self.eps5),
        ];
        for (name, v) in named {
            if !open(v) {
                return Err(Error::HypothesisViolated(format!("{name}={v} outside (0,1)")));
            }
        }
        if self.sample_rate_numerator == 0 || self.connector_retry_budget == 0 {
            return Err(Error::HypothesisViolated("sampling parameters must be positive".into()));
        }
        Ok(())
    }

    /// `p = min(1, sample_rate_numerator / n)`.
    pub fn sample_probability(&self, n: usize) -> f64 {
        (self.sample_rate_numerator as f64 / n.max(1) as f64).min(1.0)
    }
}

impl Default for SolverParams {
    fn default() -> Self {
        Self::desk()
    }
}
