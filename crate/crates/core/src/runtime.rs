//! Analytic runtime model for annealing with Grover-accelerated evaluation.
//!
//! Per annealing iteration the classical cost is `t_Q + t_det` (evaluation
//! plus everything else). The hybrid replaces the evaluation term by a
//! Grover search over a `2^q` subspace: `T_hy = T_Q / 2^{q/2} · Q_oh + T_det`.
//! All totals are normalized to `normalization` iterations.

use std::time::Instant;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::qubo::{random_instance, Assignment};

/// Seconds per `n²` for one evaluation, calibrated at `n = 625`.
pub const TQ_PER_N2: f64 = 5.82e-7;

/// Default relative-gain threshold of [`saturation_q`].
pub const DEFAULT_SATURATION_EPSILON: f64 = 0.3;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct RuntimeParams {
    /// Seconds per QUBO evaluation.
    pub t_q: f64,
    /// Residual seconds per annealing iteration.
    pub t_det: f64,
    /// Quantum overhead factor.
    pub q_oh: f64,
    /// Total annealing iterations.
    pub sa_total: f64,
    /// Iterations per reported total.
    pub normalization: f64,
}

impl Default for RuntimeParams {
    /// The 625-variable reference case: `t_Q = 0.228 s`, `t_det = 1.3e-4 s`,
    /// `Q_oh = 100`, `10^10` iterations reported per `10^5`.
    fn default() -> Self {
        RuntimeParams {
            t_q: 0.228,
            t_det: 1.3e-4,
            q_oh: 100.0,
            sa_total: 1e10,
            normalization: 1e5,
        }
    }
}

impl RuntimeParams {
    /// `t_det = 0` is accepted as the no-residual limiting case.
    pub fn validate(&self) -> Result<()> {
        let positive = |name: &str, v: f64| {
            if v > 0.0 && v.is_finite() {
                Ok(())
            } else {
                Err(Error::Config(format!("{name} must be positive, got {v}")))
            }
        };
        positive("t_q", self.t_q)?;
        positive("sa_total", self.sa_total)?;
        positive("normalization", self.normalization)?;
        if !(self.t_det >= 0.0 && self.t_det.is_finite()) {
            return Err(Error::Config(format!("t_det must be non-negative, got {}", self.t_det)));
        }
        if !(self.q_oh >= 1.0 && self.q_oh.is_finite()) {
            return Err(Error::Config(format!("q_oh must be >= 1, got {}", self.q_oh)));
        }
        Ok(())
    }

    /// Normalized evaluation time `T_Q`.
    pub fn total_eval(&self) -> f64 {
        self.sa_total * self.t_q / self.normalization
    }

    /// Normalized residual time `T_det`.
    pub fn total_det(&self) -> f64 {
        self.sa_total * self.t_det / self.normalization
    }
}

/// `2^{q/2}`, exact for even `q`.
pub fn grover_gain(q: u32) -> f64 {
    if q.is_multiple_of(2) {
        2f64.powi((q / 2) as i32)
    } else {
        2f64.powf(q as f64 / 2.0)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct RuntimeBreakdown {
    pub t_q: f64,
    pub t_g: f64,
    pub t_det: f64,
    pub t_sa: f64,
    pub t_hy: f64,
    /// Odd `q` evaluates fine but falls between the tabulated rows.
    pub odd_q: bool,
}

pub fn hybrid_runtime(p: &RuntimeParams, q: u32) -> RuntimeBreakdown {
    let t_q = p.total_eval();
    let t_det = p.total_det();
    let t_g = t_q / grover_gain(q) * p.q_oh;
    RuntimeBreakdown {
        t_q,
        t_g,
        t_det,
        t_sa: t_q + t_det,
        t_hy: t_g + t_det,
        odd_q: q % 2 == 1,
    }
}

/// Same as [`hybrid_runtime`] but charging `calls_per_step` measured oracle
/// calls per `2^q`-configuration step instead of the ideal `2^{q/2}`.
pub fn hybrid_runtime_from_calls(p: &RuntimeParams, q: u32, calls_per_step: f64) -> RuntimeBreakdown {
    let mut b = hybrid_runtime(p, q);
    b.t_g = b.t_q * calls_per_step / 2f64.powi(q as i32) * p.q_oh;
    b.t_hy = b.t_g + b.t_det;
    b
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SpeedupRow {
    pub q: u32,
    pub t_q: f64,
    pub t_g: f64,
    pub x_qubo: f64,
    pub t_sa: f64,
    pub t_hy: f64,
    pub x_sa: f64,
}

pub fn speedup_row(p: &RuntimeParams, q: u32) -> SpeedupRow {
    let b = hybrid_runtime(p, q);
    SpeedupRow {
        q,
        t_q: b.t_q,
        t_g: b.t_g,
        x_qubo: grover_gain(q) / p.q_oh,
        t_sa: b.t_sa,
        t_hy: b.t_hy,
        x_sa: b.t_sa / b.t_hy,
    }
}

pub fn speedup_table(p: &RuntimeParams, qs: &[u32]) -> Vec<SpeedupRow> {
    qs.iter().map(|&q| speedup_row(p, q)).collect()
}

/// Smallest even `q` with `2^{q/2} > q_oh`.
pub fn advantage_threshold(q_oh: f64) -> u32 {
    advantage_threshold_scaled(q_oh, 1.0)
}

/// Advantage threshold when each search costs `k` times the ideal
/// `2^{q/2}` oracle calls.
pub fn advantage_threshold_scaled(q_oh: f64, k: f64) -> u32 {
    let mut q = 2;
    while grover_gain(q) <= q_oh * k {
        q += 2;
    }
    q
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct Saturation {
    pub q: u32,
    /// False when the gain never fell below epsilon up to the range end.
    pub reached: bool,
}

/// Smallest even `q ≤ q_max` where adding two qubits improves `X_SA` by a
/// relative amount below `epsilon`.
pub fn saturation_q(p: &RuntimeParams, epsilon: f64, q_max: u32) -> Saturation {
    let mut q = 2;
    while q <= q_max {
        let now = speedup_row(p, q).x_sa;
        let next = speedup_row(p, q + 2).x_sa;
        if (next - now) / now < epsilon {
            return Saturation { q, reached: true };
        }
        q += 2;
    }
    Saturation {
        q: q_max,
        reached: false,
    }
}

/// `t_Q = c · n²` with the reference constant.
pub fn calibrate_tq(n: usize) -> Result<f64> {
    calibrate_tq_with(n, TQ_PER_N2)
}

pub fn calibrate_tq_with(n: usize, seconds_per_n2: f64) -> Result<f64> {
    if n == 0 {
        return Err(Error::Config("calibration needs n >= 1".into()));
    }
    let n = n as f64;
    Ok(seconds_per_n2 * n * n)
}

/// Seconds-per-`n²` constant from an operation count and a per-operation
/// cost.
pub fn constant_from_operations(n: usize, operations: usize, seconds_per_op: f64) -> f64 {
    operations as f64 * seconds_per_op / (n as f64 * n as f64)
}

/// Measures this machine's seconds-per-`n²` on a dense random model.
/// Wall-clock; not deterministic.
pub fn measure_local_constant(n: usize, repetitions: u32, seed: u64) -> Result<f64> {
    let model = random_instance(n, 1.0, 5, seed)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let samples: Vec<Assignment> = (0..8).map(|_| Assignment::random(n, &mut rng)).collect();
    let start = Instant::now();
    let mut sink = 0.0;
    for r in 0..repetitions.max(1) {
        sink += model.evaluate(&samples[r as usize % samples.len()])?;
    }
    let per_eval = start.elapsed().as_secs_f64() / repetitions.max(1) as f64;
    std::hint::black_box(sink);
    Ok(per_eval / (n as f64 * n as f64))
}
