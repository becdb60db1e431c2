//! Hybrid simulated-annealing / Grover toolkit for QUBO minimization.
//!
//! * [`qubo`], [`io`]: models, variable fixing, brute force, text format
//! * [`anneal`]: classical annealing and the hybrid subspace loop
//! * [`statevector`], [`circuit`]: dense simulator and gate lists
//! * [`adder`], [`synth`]: reversible cost circuits and threshold oracles
//! * [`grover`]: amplitude amplification and minimum finding
//! * [`runtime`]: analytic runtime and speedup model

pub mod adder;
pub mod anneal;
pub mod circuit;
pub mod error;
pub mod grover;
pub mod io;
pub mod qubo;
pub mod runtime;
pub mod statevector;
pub mod synth;

pub use anneal::{classical_sa, hybrid_sa, hybrid_step, select_free_bits, Backend, SaConfig, SaResult};
pub use circuit::Circuit;
pub use error::{Error, Result};
pub use grover::{durr_hoyer_min, grover_search, MinFindConfig, MinFindResult, Oracle, OracleMode};
pub use io::{parse_model, serialize_model};
pub use qubo::{
    brute_force_min, fix_variables, random_instance, Assignment, BruteForceMin, PartialAssignment, QuboModel,
    ReducedQubo,
};
pub use runtime::{RuntimeParams, SpeedupRow};
pub use statevector::{Gate, StateVector};
pub use synth::{resource_report, synthesize_cost_circuit, synthesize_threshold_oracle, CostCircuit, ResourceReport};
