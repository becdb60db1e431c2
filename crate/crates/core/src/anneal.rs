//! Simulated annealing and the hybrid annealing loop.
//!
//! The hybrid loop replaces the single-flip proposal with a subspace
//! search: `q` variables are freed, the rest are fixed to the current state,
//! and a backend minimizes the reduced model. The Metropolis rule then
//! decides whether to move to the returned candidate.

use std::fmt;
use std::str::FromStr;

use rand::seq::index;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::grover::{durr_hoyer_min, MinFindConfig, OracleMode, SEMANTIC_MAX_QUBITS};
use crate::qubo::{brute_force_min, fix_variables, Assignment, PartialAssignment, QuboModel, BRUTE_FORCE_MAX_VARS};
use crate::statevector::MAX_QUBITS;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Backend {
    ClassicalExhaustive,
    GroverSemantic,
    GroverCircuit,
}

impl Backend {
    /// Largest subspace the backend can handle. The circuit backend may
    /// still fail at synthesis time when the cost register is wide.
    pub fn capacity(self) -> usize {
        match self {
            Backend::ClassicalExhaustive => BRUTE_FORCE_MAX_VARS,
            Backend::GroverSemantic => SEMANTIC_MAX_QUBITS,
            // input + 2-bit cost register + 2-bit addend + carry + product
            Backend::GroverCircuit => MAX_QUBITS - 6,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Backend::ClassicalExhaustive => "classical-exhaustive",
            Backend::GroverSemantic => "grover-semantic",
            Backend::GroverCircuit => "grover-circuit",
        }
    }

    fn oracle_mode(self) -> Option<OracleMode> {
        match self {
            Backend::ClassicalExhaustive => None,
            Backend::GroverSemantic => Some(OracleMode::Semantic),
            Backend::GroverCircuit => Some(OracleMode::Circuit),
        }
    }
}

impl fmt::Display for Backend {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Backend {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "classical-exhaustive" => Ok(Backend::ClassicalExhaustive),
            "grover-semantic" => Ok(Backend::GroverSemantic),
            "grover-circuit" => Ok(Backend::GroverCircuit),
            _ => Err(Error::Config(format!("unknown backend {s:?}"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SaConfig {
    pub initial_temperature: f64,
    /// Geometric cooling: `T ← cooling_factor · T` after every iteration.
    pub cooling_factor: f64,
    pub outer_iterations: u64,
    /// Subspace size; 0 for plain annealing.
    pub q: usize,
    pub seed: u64,
    pub backend: Backend,
    /// Per-step oracle budget is `ceil(call_factor · 2^{q/2})`.
    pub call_factor: f64,
    /// Consecutive failed minimum-finding rounds before a step gives up.
    pub patience: usize,
}

impl Default for SaConfig {
    fn default() -> Self {
        SaConfig {
            initial_temperature: 2.0,
            cooling_factor: 0.995,
            outer_iterations: 1000,
            q: 0,
            seed: 0,
            backend: Backend::ClassicalExhaustive,
            call_factor: 50.0,
            patience: MinFindConfig::default().patience,
        }
    }
}

impl SaConfig {
    pub fn validate(&self, n: usize) -> Result<()> {
        if !(self.initial_temperature > 0.0 && self.initial_temperature.is_finite()) {
            return Err(Error::Config(format!(
                "initial temperature {} must be positive",
                self.initial_temperature
            )));
        }
        if !(self.cooling_factor > 0.0 && self.cooling_factor < 1.0) {
            return Err(Error::Config(format!("cooling factor {} outside (0, 1)", self.cooling_factor)));
        }
        if self.outer_iterations == 0 {
            return Err(Error::Config("outer_iterations must be >= 1".into()));
        }
        if self.q > self.backend.capacity() {
            return Err(Error::Capacity(format!(
                "q = {} exceeds the {} backend capacity of {}",
                self.q,
                self.backend,
                self.backend.capacity()
            )));
        }
        if self.q > n {
            return Err(Error::Dimension {
                expected: n,
                actual: self.q,
            });
        }
        if self.call_factor.is_nan() || self.call_factor <= 0.0 {
            return Err(Error::Config("call_factor must be positive".into()));
        }
        Ok(())
    }

    /// Oracle-call budget of one subspace search.
    pub fn step_call_budget(&self) -> u64 {
        (self.call_factor * 2f64.powf(self.q as f64 / 2.0)).ceil() as u64
    }

    fn min_find(&self) -> MinFindConfig {
        MinFindConfig {
            call_budget: self.step_call_budget(),
            patience: self.patience,
            ..MinFindConfig::default()
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SaResult {
    pub best_assignment: Assignment,
    pub best_cost: f64,
    /// Best cost seen after each iteration.
    pub cost_trace: Vec<f64>,
    pub classical_evaluations: u64,
    pub oracle_calls: u64,
    pub grover_iterations: u64,
    /// Candidate configurations covered (`2^q` per hybrid step, 1 per
    /// classical step).
    pub configurations: u64,
    pub accepted_moves: u64,
}

fn metropolis<R: Rng + ?Sized>(delta: f64, temperature: f64, rng: &mut R) -> bool {
    delta <= 0.0 || rng.gen::<f64>() < (-delta / temperature).exp()
}

/// Single-flip simulated annealing. `cfg.q` and `cfg.backend` are ignored.
pub fn classical_sa(model: &QuboModel, cfg: &SaConfig) -> Result<SaResult> {
    let cfg = SaConfig { q: 0, ..cfg.clone() };
    cfg.validate(model.n())?;
    if model.n() == 0 {
        return Err(Error::Config("model has no variables".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let mut current = Assignment::random(model.n(), &mut rng);
    let mut current_cost = model.evaluate(&current)?;
    let mut best = current.clone();
    let mut best_cost = current_cost;
    let mut temperature = cfg.initial_temperature;
    let mut trace = Vec::with_capacity(cfg.outer_iterations as usize);
    let mut accepted = 0;

    for _ in 0..cfg.outer_iterations {
        let flip = rng.gen_range(0..model.n());
        current.flip(flip);
        let candidate_cost = model.evaluate(&current)?;
        if metropolis(candidate_cost - current_cost, temperature, &mut rng) {
            current_cost = candidate_cost;
            accepted += 1;
            if current_cost < best_cost {
                best_cost = current_cost;
                best = current.clone();
            }
        } else {
            current.flip(flip);
        }
        temperature *= cfg.cooling_factor;
        trace.push(best_cost);
    }

    Ok(SaResult {
        best_assignment: best,
        best_cost,
        cost_trace: trace,
        classical_evaluations: cfg.outer_iterations,
        oracle_calls: 0,
        grover_iterations: 0,
        configurations: cfg.outer_iterations,
        accepted_moves: accepted,
    })
}

/// Draws `q` distinct variables uniformly; returned in ascending order.
pub fn select_free_bits<R: Rng + ?Sized>(n: usize, q: usize, rng: &mut R) -> Result<Vec<usize>> {
    if q > n {
        return Err(Error::Dimension {
            expected: n,
            actual: q,
        });
    }
    let mut free = index::sample(rng, n, q).into_vec();
    free.sort_unstable();
    Ok(free)
}

/// Work done by one hybrid step.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize)]
pub struct StepAccounting {
    pub classical_evaluations: u64,
    pub oracle_calls: u64,
    pub grover_iterations: u64,
    pub configurations: u64,
    pub accepted: bool,
}

/// Settings for the subspace search inside [`hybrid_step`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StepOptions {
    pub backend: Backend,
    pub min_find: MinFindConfig,
}

impl StepOptions {
    pub fn new(backend: Backend) -> Self {
        StepOptions {
            backend,
            min_find: MinFindConfig::default(),
        }
    }
}

/// One hybrid iteration: reduce, minimize the subspace, accept or reject.
///
/// The current state's free-bit values are part of the searched subspace,
/// so an exact backend never proposes a worse state.
pub fn hybrid_step<R: Rng + ?Sized>(
    model: &QuboModel,
    current: &Assignment,
    free: &[usize],
    opts: &StepOptions,
    temperature: f64,
    rng: &mut R,
) -> Result<(Assignment, f64, StepAccounting)> {
    let q = free.len();
    if q > opts.backend.capacity() {
        return Err(Error::Capacity(format!(
            "q = {q} exceeds the {} backend capacity of {}",
            opts.backend,
            opts.backend.capacity()
        )));
    }
    let current_cost = model.evaluate(current)?;
    let mut acct = StepAccounting {
        configurations: 1 << q,
        ..Default::default()
    };
    if q == 0 {
        acct.classical_evaluations = 1;
        return Ok((current.clone(), current_cost, acct));
    }

    let partial = PartialAssignment::from_state(current, free.to_vec())?;
    let reduced = fix_variables(model, &partial)?;
    let completion = match opts.backend.oracle_mode() {
        None => {
            acct.classical_evaluations += 1 << q;
            brute_force_min(&reduced.model)?.assignment
        }
        Some(mode) => {
            let found = durr_hoyer_min(&reduced, mode, rng, &opts.min_find)?;
            acct.oracle_calls += found.total_oracle_calls;
            acct.grover_iterations += found.total_oracle_calls;
            found.best
        }
    };
    let candidate = partial.merge(&completion)?;
    let candidate_cost = model.evaluate(&candidate)?;
    acct.classical_evaluations += 1;

    if metropolis(candidate_cost - current_cost, temperature, rng) {
        acct.accepted = true;
        Ok((candidate, candidate_cost, acct))
    } else {
        Ok((current.clone(), current_cost, acct))
    }
}

/// Hybrid annealing with a fresh random subspace every outer iteration.
pub fn hybrid_sa(model: &QuboModel, cfg: &SaConfig) -> Result<SaResult> {
    cfg.validate(model.n())?;
    if cfg.q == 0 {
        return Err(Error::Config("hybrid annealing needs q >= 1".into()));
    }
    let opts = StepOptions {
        backend: cfg.backend,
        min_find: cfg.min_find(),
    };
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let mut current = Assignment::random(model.n(), &mut rng);
    let mut current_cost = model.evaluate(&current)?;
    let mut best = current.clone();
    let mut best_cost = current_cost;
    let mut temperature = cfg.initial_temperature;
    let mut result = SaResult {
        best_assignment: best.clone(),
        best_cost,
        cost_trace: Vec::with_capacity(cfg.outer_iterations as usize),
        classical_evaluations: 0,
        oracle_calls: 0,
        grover_iterations: 0,
        configurations: 0,
        accepted_moves: 0,
    };

    for _ in 0..cfg.outer_iterations {
        let free = select_free_bits(model.n(), cfg.q, &mut rng)?;
        let (next, next_cost, acct) = hybrid_step(model, &current, &free, &opts, temperature, &mut rng)?;
        current = next;
        current_cost = next_cost;
        result.classical_evaluations += acct.classical_evaluations;
        result.oracle_calls += acct.oracle_calls;
        result.grover_iterations += acct.grover_iterations;
        result.configurations += acct.configurations;
        result.accepted_moves += acct.accepted as u64;
        if current_cost < best_cost {
            best_cost = current_cost;
            best = current.clone();
        }
        temperature *= cfg.cooling_factor;
        result.cost_trace.push(best_cost);
    }

    result.best_assignment = best;
    result.best_cost = best_cost;
    Ok(result)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::qubo::random_instance;

    fn triangle() -> QuboModel {
        let mut m = QuboModel::new(3);
        m.set_quadratic(0, 1, 1.0).unwrap();
        m.set_quadratic(1, 2, 2.0).unwrap();
        m.set_quadratic(0, 2, 3.0).unwrap();
        m
    }

    #[test]
    fn one_variable_descent() {
        let mut m = QuboModel::new(1);
        m.set_linear(0, 1.0).unwrap();
        let cfg = SaConfig {
            outer_iterations: 100,
            ..Default::default()
        };
        let r = classical_sa(&m, &cfg).unwrap();
        assert_eq!(r.best_cost, 0.0);
        assert_eq!(r.best_assignment.to_string(), "0");
        assert_eq!(r.classical_evaluations, 100);
    }

    #[test]
    fn classical_solves_triangle() {
        let cfg = SaConfig {
            outer_iterations: 500,
            seed: 1,
            ..Default::default()
        };
        let r = classical_sa(&triangle(), &cfg).unwrap();
        assert_eq!(r.best_cost, 0.0);
    }

    #[test]
    fn classical_is_seeded_and_monotone() {
        let m = random_instance(30, 0.3, 5, 4).unwrap();
        let cfg = SaConfig {
            outer_iterations: 2000,
            seed: 42,
            ..Default::default()
        };
        let a = classical_sa(&m, &cfg).unwrap();
        let b = classical_sa(&m, &cfg).unwrap();
        assert_eq!(a.cost_trace, b.cost_trace);
        assert!(a.cost_trace.windows(2).all(|w| w[1] <= w[0]));
        assert_eq!(a.best_cost, m.evaluate(&a.best_assignment).unwrap());
    }

    #[test]
    fn config_validation() {
        let m = QuboModel::new(4);
        let bad = [
            SaConfig { cooling_factor: 1.0, ..Default::default() },
            SaConfig { cooling_factor: 0.0, ..Default::default() },
            SaConfig { initial_temperature: 0.0, ..Default::default() },
            SaConfig { outer_iterations: 0, ..Default::default() },
            SaConfig { q: 5, ..Default::default() },
        ];
        for cfg in bad {
            assert!(cfg.validate(4).is_err(), "{cfg:?}");
        }
        let big = QuboModel::new(30);
        let cfg = SaConfig { q: 21, backend: Backend::GroverSemantic, ..Default::default() };
        assert!(matches!(hybrid_sa(&big, &cfg), Err(Error::Capacity(_))));
        assert!(hybrid_sa(&m, &SaConfig::default()).is_err());
    }

    #[test]
    fn free_bit_selection() {
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        assert_eq!(select_free_bits(5, 5, &mut rng).unwrap(), vec![0, 1, 2, 3, 4]);
        assert!(select_free_bits(5, 0, &mut rng).unwrap().is_empty());
        assert!(select_free_bits(5, 6, &mut rng).is_err());
        let draw = || select_free_bits(625, 10, &mut ChaCha8Rng::seed_from_u64(3)).unwrap();
        let a = draw();
        assert_eq!(a, draw());
        assert_eq!(a.len(), 10);
        assert!(a.windows(2).all(|w| w[0] < w[1]));
    }

    #[test]
    fn step_with_exhaustive_backend_finds_subspace_minimum() {
        let m = QuboModel::five_variable_example();
        let current: Assignment = "11111".parse().unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        let opts = StepOptions::new(Backend::ClassicalExhaustive);
        let (next, cost, acct) = hybrid_step(&m, &current, &[1, 2, 4], &opts, 1.0, &mut rng).unwrap();
        // x0 = x3 = 1: completions of (x1, x2, x4) cost 5, 5, 5, 6, 7, 7, 9, 12
        assert_eq!(cost, 5.0);
        assert!(next.get(0) && next.get(3));
        assert_eq!(acct.classical_evaluations, 9);
        assert_eq!(acct.configurations, 8);
    }

    #[test]
    fn step_at_optimum_keeps_cost() {
        let m = QuboModel::five_variable_example();
        let current: Assignment = "00001".parse().unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        for backend in [Backend::ClassicalExhaustive, Backend::GroverSemantic, Backend::GroverCircuit] {
            let (_, cost, _) = hybrid_step(&m, &current, &[0, 2, 4], &StepOptions::new(backend), 1e-9, &mut rng).unwrap();
            assert_eq!(cost, -5.0);
        }
    }

    #[test]
    fn step_with_no_free_bits() {
        let m = QuboModel::five_variable_example();
        let current: Assignment = "10101".parse().unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        let (next, cost, acct) =
            hybrid_step(&m, &current, &[], &StepOptions::new(Backend::GroverSemantic), 1.0, &mut rng).unwrap();
        assert_eq!(next, current);
        assert_eq!(cost, m.evaluate(&current).unwrap());
        assert_eq!(acct.oracle_calls, 0);
    }

    #[test]
    fn hybrid_finds_global_minimum() {
        let m = QuboModel::five_variable_example();
        let cfg = SaConfig {
            outer_iterations: 20,
            q: 3,
            seed: 5,
            ..Default::default()
        };
        let r = hybrid_sa(&m, &cfg).unwrap();
        assert_eq!(r.best_cost, -5.0);
        assert_eq!(r.configurations, 20 * 8);
        assert!(r.cost_trace.windows(2).all(|w| w[1] <= w[0]));
    }

    #[test]
    fn hybrid_grover_is_seeded() {
        let m = random_instance(12, 0.5, 5, 1).unwrap();
        let cfg = SaConfig {
            outer_iterations: 15,
            q: 4,
            seed: 8,
            backend: Backend::GroverSemantic,
            ..Default::default()
        };
        let a = hybrid_sa(&m, &cfg).unwrap();
        assert_eq!(a, hybrid_sa(&m, &cfg).unwrap());
        assert_eq!(a.best_cost, m.evaluate(&a.best_assignment).unwrap());
        assert!(a.grover_iterations <= cfg.step_call_budget() * cfg.outer_iterations);
    }

    #[test]
    fn equal_configuration_budget() {
        // 4 outer iterations at q = 10 cover as many configurations as 4096 single flips.
        let m = random_instance(40, 0.2, 5, 6).unwrap();
        let hybrid = hybrid_sa(
            &m,
            &SaConfig { outer_iterations: 4, q: 10, ..Default::default() },
        )
        .unwrap();
        let classical = classical_sa(&m, &SaConfig { outer_iterations: 4096, ..Default::default() }).unwrap();
        assert_eq!(hybrid.configurations, 4096);
        assert_eq!(classical.configurations, classical.classical_evaluations);
        assert_eq!(hybrid.configurations, classical.classical_evaluations);
    }
}
