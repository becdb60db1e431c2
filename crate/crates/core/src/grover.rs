//! Grover amplitude amplification and threshold-descent minimum finding.
//!
//! Two oracle realizations are supported:
//!
//! * **semantic**: phases are flipped directly from classically computed
//!   costs, so only the `q` search qubits are simulated;
//! * **circuit**: the synthesized threshold oracle is run on the full
//!   register (search qubits, cost register and ancillas).
//!
//! Both act identically on the search register, which the tests check.

use std::f64::consts::PI;

use rand::Rng;

use crate::circuit::Circuit;
use crate::error::{Error, Result};
use crate::qubo::{Assignment, QuboModel, ReducedQubo};
use crate::statevector::{Gate, StateVector};
use crate::synth::synthesize_threshold_oracle;

/// Largest search register for the semantic backend.
pub const SEMANTIC_MAX_QUBITS: usize = 20;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum OracleMode {
    Semantic,
    Circuit,
}

/// `floor(π/4 · sqrt(N/M))`, at least 1.
pub fn optimal_iterations(n: u64, m: u64) -> Result<u64> {
    if m == 0 {
        return Err(Error::EmptyMarkedSet);
    }
    if m > n {
        return Err(Error::Config(format!("marked count {m} exceeds space size {n}")));
    }
    let r = (PI / 4.0 * (n as f64 / m as f64).sqrt()).floor() as u64;
    Ok(r.max(1))
}

/// Gate form of the diffusion operator on the lowest `q` qubits:
/// `H X MCZ X H`. It equals `−(2|s⟩⟨s| − I)`; the global sign is
/// unobservable.
pub fn diffusion_circuit(q: usize) -> Circuit {
    let mut c = Circuit::new(q);
    for k in 0..q {
        c.push(Gate::H(k));
    }
    for k in 0..q {
        c.push(Gate::X(k));
    }
    c.push(Gate::Mcz((0..q).collect()));
    for k in 0..q {
        c.push(Gate::X(k));
    }
    for k in 0..q {
        c.push(Gate::H(k));
    }
    c
}

/// Applies `2|s⟩⟨s| − I` on the lowest `q` qubits.
pub fn diffusion(state: &mut StateVector, q: usize) -> Result<()> {
    state.reflect_about_uniform(q)
}

/// Phase oracle over a `q`-qubit search register.
#[derive(Debug, Clone)]
pub enum Oracle {
    Semantic {
        q: usize,
        marked: Vec<bool>,
    },
    /// A synthesized phase oracle. `marked` is the circuit's action on each
    /// search input with the work qubits at `|0⟩`, computed once by running
    /// the circuit; calls then act on the search register alone.
    Circuit {
        q: usize,
        circuit: Circuit,
        marked: Vec<bool>,
    },
}

impl Oracle {
    /// Oracle marking the basis indices where `marked` is true.
    pub fn from_marked(marked: Vec<bool>) -> Result<Self> {
        let len = marked.len();
        if !len.is_power_of_two() || len < 2 {
            return Err(Error::Dimension {
                expected: len.next_power_of_two().max(2),
                actual: len,
            });
        }
        let q = len.trailing_zeros() as usize;
        if q > SEMANTIC_MAX_QUBITS {
            return Err(Error::Capacity(format!(
                "semantic oracle supports q <= {SEMANTIC_MAX_QUBITS}, got {q}"
            )));
        }
        Ok(Oracle::Semantic { q, marked })
    }

    /// Marks inputs of `model` whose cost is strictly below `threshold`.
    pub fn semantic_threshold(model: &QuboModel, threshold: f64) -> Result<Self> {
        check_semantic(model.n())?;
        let marked = (0..1u64 << model.n())
            .map(|x| model.evaluate_index(x) < threshold)
            .collect();
        Oracle::from_marked(marked)
    }

    /// Synthesized comparator oracle for `cost < threshold`.
    pub fn circuit_threshold(reduced: &ReducedQubo, threshold: i64) -> Result<Self> {
        let o = synthesize_threshold_oracle(reduced, threshold)?;
        Oracle::from_circuit(reduced.q(), o.circuit)
    }

    /// Wraps a phase-oracle circuit whose lowest `q` qubits are the search
    /// register. Every input must come back unchanged with a phase of ±1.
    pub fn from_circuit(q: usize, circuit: Circuit) -> Result<Self> {
        if q == 0 || q > circuit.num_qubits() {
            return Err(Error::Dimension {
                expected: circuit.num_qubits(),
                actual: q,
            });
        }
        if !circuit.is_classical() {
            return Err(Error::Gate("phase oracle must be a classical circuit".into()));
        }
        let marked = (0..1usize << q)
            .map(|x| {
                let (out, phase) = circuit.permute_basis(x)?;
                if out != x {
                    return Err(Error::Gate(format!("oracle leaves work qubits dirty on input {x}")));
                }
                if (phase.re.abs() - 1.0).abs() > 1e-12 || phase.im.abs() > 1e-12 {
                    return Err(Error::Gate(format!("oracle phase {phase} on input {x} is not ±1")));
                }
                Ok(phase.re < 0.0)
            })
            .collect::<Result<Vec<bool>>>()?;
        Ok(Oracle::Circuit { q, circuit, marked })
    }

    pub fn marked(&self) -> &[bool] {
        match self {
            Oracle::Semantic { marked, .. } | Oracle::Circuit { marked, .. } => marked,
        }
    }

    /// Search register size.
    pub fn q(&self) -> usize {
        match self {
            Oracle::Semantic { q, .. } | Oracle::Circuit { q, .. } => *q,
        }
    }

    /// Qubits the oracle circuit needs, work qubits included.
    pub fn register_qubits(&self) -> usize {
        match self {
            Oracle::Semantic { q, .. } => *q,
            Oracle::Circuit { circuit, .. } => circuit.num_qubits(),
        }
    }

    /// Phase flip on a state whose lowest `q` qubits are the search register.
    pub fn apply(&self, state: &mut StateVector) -> Result<()> {
        let mask = (1usize << self.q()) - 1;
        let marked = self.marked();
        state.phase_flip_where(|i| marked[i & mask]);
        Ok(())
    }

    /// Runs the oracle gate by gate on a register that includes the work
    /// qubits.
    pub fn apply_full(&self, state: &mut StateVector) -> Result<()> {
        match self {
            Oracle::Semantic { .. } => self.apply(state),
            Oracle::Circuit { circuit, .. } => state.apply_all(circuit.gates()),
        }
    }
}

fn check_semantic(q: usize) -> Result<()> {
    if q == 0 || q > SEMANTIC_MAX_QUBITS {
        return Err(Error::Capacity(format!(
            "semantic backend supports 1..={SEMANTIC_MAX_QUBITS} search qubits, got {q}"
        )));
    }
    Ok(())
}

/// Uniform superposition followed by `iterations` rounds of oracle and
/// diffusion; returns the state before measurement.
pub fn prepare_state(oracle: &Oracle, iterations: u64) -> Result<StateVector> {
    let q = oracle.q();
    let mut state = uniform(q, q)?;
    for _ in 0..iterations {
        oracle.apply(&mut state)?;
        diffusion(&mut state, q)?;
    }
    Ok(state)
}

/// Same as [`prepare_state`] but simulating every work qubit of a circuit
/// oracle.
pub fn prepare_state_full(oracle: &Oracle, iterations: u64) -> Result<StateVector> {
    let q = oracle.q();
    let mut state = uniform(oracle.register_qubits(), q)?;
    for _ in 0..iterations {
        oracle.apply_full(&mut state)?;
        diffusion(&mut state, q)?;
    }
    Ok(state)
}

fn uniform(m: usize, q: usize) -> Result<StateVector> {
    let mut state = StateVector::new(m)?;
    for k in 0..q {
        state.apply(&Gate::H(k))?;
    }
    Ok(state)
}

/// Probability of each search-register value, summed over work qubits.
pub fn search_distribution(state: &StateVector, q: usize) -> Vec<f64> {
    let mask = (1usize << q) - 1;
    let mut dist = vec![0.0; 1 << q];
    for (i, a) in state.amplitudes().iter().enumerate() {
        dist[i & mask] += a.norm_sqr();
    }
    dist
}

#[derive(Debug, Clone, PartialEq)]
pub struct GroverOutcome {
    pub measured: Assignment,
    pub cost: f64,
    pub iterations_used: u64,
    pub oracle_calls: u64,
}

/// Runs Grover search and measures the search register; `model` supplies the
/// cost reported for the measured string.
pub fn grover_search<R: Rng + ?Sized>(
    oracle: &Oracle,
    model: &QuboModel,
    iterations: u64,
    rng: &mut R,
) -> Result<GroverOutcome> {
    let q = oracle.q();
    if model.n() != q {
        return Err(Error::Dimension {
            expected: q,
            actual: model.n(),
        });
    }
    let state = prepare_state(oracle, iterations)?;
    let index = state.sample_index(rng) & ((1usize << q) - 1);
    let measured = Assignment::from_index(index as u64, q);
    Ok(GroverOutcome {
        cost: model.evaluate_index(index as u64),
        measured,
        iterations_used: iterations,
        oracle_calls: iterations,
    })
}

/// Parameters of [`durr_hoyer_min`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MinFindConfig {
    /// Hard cap on oracle applications.
    pub call_budget: u64,
    /// Consecutive failed rounds before giving up.
    pub patience: usize,
    /// A round fails once it has spent `round_factor · sqrt(N)` oracle calls
    /// (each measurement counts at least one) without improving.
    pub round_factor: f64,
    /// Growth of the iteration bound after each failed measurement.
    pub growth: f64,
}

impl MinFindConfig {
    pub fn with_budget(call_budget: u64) -> Self {
        MinFindConfig {
            call_budget,
            ..Default::default()
        }
    }
}

impl Default for MinFindConfig {
    fn default() -> Self {
        MinFindConfig {
            call_budget: u64::MAX,
            patience: 3,
            round_factor: 2.25,
            growth: 6.0 / 5.0,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct MinFindResult {
    pub best: Assignment,
    pub best_cost: f64,
    /// Number of threshold updates.
    pub rounds: u64,
    pub total_oracle_calls: u64,
    pub measurements: u64,
}

/// Threshold-descent minimum finding over the reduced model.
///
/// Starts from the cost of a uniformly sampled input. Each round searches
/// for an input strictly below the current threshold using the randomized
/// exponential iteration schedule (unknown marked count); a hit lowers the
/// threshold. Stops after `patience` consecutive failed rounds or when the
/// call budget runs out.
pub fn durr_hoyer_min<R: Rng + ?Sized>(
    reduced: &ReducedQubo,
    mode: OracleMode,
    rng: &mut R,
    cfg: &MinFindConfig,
) -> Result<MinFindResult> {
    let q = reduced.q();
    let model = &reduced.model;
    if q == 0 {
        return Err(Error::Capacity("minimum finding needs at least one free variable".into()));
    }
    // Semantic mode precomputes every cost once; thresholds only re-mark.
    let costs: Option<Vec<f64>> = match mode {
        OracleMode::Semantic => {
            check_semantic(q)?;
            Some((0..1u64 << q).map(|x| model.evaluate_index(x)).collect())
        }
        OracleMode::Circuit => {
            if !model.is_integral() {
                return Err(Error::Synthesis("circuit oracle needs integer coefficients".into()));
            }
            None
        }
    };
    let build = |threshold: f64| -> Result<Oracle> {
        match &costs {
            Some(c) => Oracle::from_marked(c.iter().map(|&v| v < threshold).collect()),
            None => Oracle::circuit_threshold(reduced, threshold as i64),
        }
    };

    let sqrt_n = ((1u64 << q) as f64).sqrt();
    let max_iterations = (PI / 4.0 * sqrt_n).ceil();
    let round_limit = (cfg.round_factor * sqrt_n).ceil().max(1.0) as u64;

    let start = rng.gen_range(0..1u64 << q);
    let mut best = Assignment::from_index(start, q);
    let mut threshold = model.evaluate_index(start);
    let mut calls = 0u64;
    let mut measurements = 1u64;
    let mut updates = 0u64;
    let mut failures = 0usize;

    while failures < cfg.patience && calls < cfg.call_budget {
        let oracle = build(threshold)?;
        let mut bound = 1.0f64;
        let mut spent = 0u64;
        let mut improved = false;
        while spent < round_limit && calls < cfg.call_budget {
            let r = rng.gen_range(0..bound.ceil() as u64).min(cfg.call_budget - calls);
            let outcome = grover_search(&oracle, model, r, rng)?;
            calls += r;
            spent += r.max(1);
            measurements += 1;
            if outcome.cost < threshold {
                threshold = outcome.cost;
                best = outcome.measured;
                updates += 1;
                improved = true;
                break;
            }
            bound = (bound * cfg.growth).min(max_iterations);
        }
        if improved {
            failures = 0;
        } else {
            failures += 1;
        }
    }

    Ok(MinFindResult {
        best,
        best_cost: threshold,
        rounds: updates,
        total_oracle_calls: calls,
        measurements,
    })
}
