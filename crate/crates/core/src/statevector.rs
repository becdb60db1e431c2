//! Dense statevector simulator.
//!
//! Qubit `k` is bit `k` of the amplitude index. Bit strings returned by
//! [`StateVector::measure_all`] are [`Assignment`]s, so qubit 0 prints first.

use std::f64::consts::FRAC_1_SQRT_2;
use std::fmt;

use num_complex::Complex64;
use rand::Rng;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::qubo::Assignment;

/// Hard cap on register size (2^26 amplitudes, 1 GiB).
pub const MAX_QUBITS: usize = 26;

/// States at or above this size are updated in parallel.
const PARALLEL_MIN_QUBITS: usize = 14;

#[derive(Debug, Clone, PartialEq)]
pub enum Gate {
    X(usize),
    H(usize),
    Z(usize),
    Cnot { control: usize, target: usize },
    Ccnot { controls: [usize; 2], target: usize },
    /// Multiplies by `e^{i angle}` when both qubits are 1.
    CPhase { control: usize, target: usize, angle: f64 },
    /// Flips the sign when every listed qubit is 1.
    Mcz(Vec<usize>),
}

impl Gate {
    pub fn qubits(&self) -> Vec<usize> {
        match self {
            Gate::X(t) | Gate::H(t) | Gate::Z(t) => vec![*t],
            Gate::Cnot { control, target } | Gate::CPhase { control, target, .. } => {
                vec![*control, *target]
            }
            Gate::Ccnot { controls, target } => vec![controls[0], controls[1], *target],
            Gate::Mcz(qs) => qs.clone(),
        }
    }

    pub fn kind(&self) -> &'static str {
        match self {
            Gate::X(_) => "x",
            Gate::H(_) => "h",
            Gate::Z(_) => "z",
            Gate::Cnot { .. } => "cnot",
            Gate::Ccnot { .. } => "ccnot",
            Gate::CPhase { .. } => "cphase",
            Gate::Mcz(_) => "mcz",
        }
    }

    pub fn inverse(&self) -> Gate {
        match self {
            Gate::CPhase {
                control,
                target,
                angle,
            } => Gate::CPhase {
                control: *control,
                target: *target,
                angle: -angle,
            },
            g => g.clone(),
        }
    }

    /// Checks that the qubit indices are distinct and below `m`.
    pub fn validate(&self, m: usize) -> Result<()> {
        let qs = self.qubits();
        if qs.is_empty() {
            return Err(Error::Gate(format!("{} acts on no qubits", self.kind())));
        }
        for (k, &a) in qs.iter().enumerate() {
            if a >= m {
                return Err(Error::Gate(format!("{self}: qubit {a} out of range for {m} qubits")));
            }
            if qs[..k].contains(&a) {
                return Err(Error::Gate(format!("{self}: qubit {a} used twice")));
            }
        }
        Ok(())
    }
}

impl fmt::Display for Gate {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Gate::CPhase {
                control,
                target,
                angle,
            } => write!(f, "cphase {control} {target} {angle}"),
            g => {
                f.write_str(g.kind())?;
                for q in g.qubits() {
                    write!(f, " {q}")?;
                }
                Ok(())
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct StateVector {
    num_qubits: usize,
    amps: Vec<Complex64>,
}

impl StateVector {
    /// `|0…0⟩` on `m` qubits.
    pub fn new(m: usize) -> Result<Self> {
        check_size(m)?;
        let mut amps = vec![Complex64::new(0.0, 0.0); 1 << m];
        amps[0] = Complex64::new(1.0, 0.0);
        Ok(StateVector { num_qubits: m, amps })
    }

    /// Wraps raw amplitudes; they must have length `2^m` and unit norm.
    pub fn from_amplitudes(amps: Vec<Complex64>) -> Result<Self> {
        let len = amps.len();
        if !len.is_power_of_two() {
            return Err(Error::Dimension {
                expected: len.next_power_of_two(),
                actual: len,
            });
        }
        let m = len.trailing_zeros() as usize;
        check_size(m)?;
        let sv = StateVector { num_qubits: m, amps };
        let norm = sv.norm_sqr();
        if (norm - 1.0).abs() > 1e-10 {
            return Err(Error::InvalidModel(format!("amplitudes have squared norm {norm}")));
        }
        Ok(sv)
    }

    pub fn num_qubits(&self) -> usize {
        self.num_qubits
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amps
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amps.iter().map(|a| a.norm_sqr()).sum()
    }

    pub fn probability(&self, index: usize) -> f64 {
        self.amps[index].norm_sqr()
    }

    pub fn probability_of(&self, bits: &Assignment) -> Result<f64> {
        if bits.len() != self.num_qubits {
            return Err(Error::Dimension {
                expected: self.num_qubits,
                actual: bits.len(),
            });
        }
        Ok(self.probability(bits.to_index() as usize))
    }

    pub fn probabilities(&self) -> Vec<f64> {
        self.amps.iter().map(|a| a.norm_sqr()).collect()
    }

    pub fn apply(&mut self, gate: &Gate) -> Result<()> {
        gate.validate(self.num_qubits)?;
        match gate {
            Gate::X(t) => self.swap_pairs(*t, 0),
            Gate::Cnot { control, target } => self.swap_pairs(*target, 1 << control),
            Gate::Ccnot { controls, target } => {
                self.swap_pairs(*target, (1 << controls[0]) | (1 << controls[1]))
            }
            Gate::H(t) => self.hadamard(*t),
            Gate::Z(t) => self.phase_where(1 << t, Complex64::new(-1.0, 0.0)),
            Gate::CPhase {
                control,
                target,
                angle,
            } => self.phase_where((1 << control) | (1 << target), Complex64::from_polar(1.0, *angle)),
            Gate::Mcz(qs) => {
                let mask = qs.iter().fold(0usize, |m, &q| m | (1 << q));
                self.phase_where(mask, Complex64::new(-1.0, 0.0))
            }
        }
        Ok(())
    }

    pub fn apply_all<'a>(&mut self, gates: impl IntoIterator<Item = &'a Gate>) -> Result<()> {
        for g in gates {
            self.apply(g)?;
        }
        Ok(())
    }

    /// Negates every amplitude whose index satisfies `marked`.
    pub fn phase_flip_where(&mut self, marked: impl Fn(usize) -> bool + Sync) {
        let flip = |(i, a): (usize, &mut Complex64)| {
            if marked(i) {
                *a = -*a;
            }
        };
        if self.parallel() {
            self.amps.par_iter_mut().enumerate().for_each(flip);
        } else {
            self.amps.iter_mut().enumerate().for_each(flip);
        }
    }

    /// Reflection `2|s⟩⟨s| − I` about the uniform state of the lowest `q`
    /// qubits, acting as identity on the rest.
    pub fn reflect_about_uniform(&mut self, q: usize) -> Result<()> {
        if q == 0 || q > self.num_qubits {
            return Err(Error::Gate(format!(
                "diffusion over {q} qubits on a {}-qubit register",
                self.num_qubits
            )));
        }
        let block = 1usize << q;
        let reflect = |chunk: &mut [Complex64]| {
            let mean = chunk.iter().sum::<Complex64>() / block as f64;
            for a in chunk.iter_mut() {
                *a = mean * 2.0 - *a;
            }
        };
        if self.parallel() && self.amps.len() > block {
            self.amps.par_chunks_mut(block).for_each(reflect);
        } else {
            self.amps.chunks_mut(block).for_each(reflect);
        }
        Ok(())
    }

    /// Samples a basis index with probability `|amplitude|²`. The state is
    /// left untouched.
    pub fn sample_index<R: Rng + ?Sized>(&self, rng: &mut R) -> usize {
        let u: f64 = rng.gen::<f64>() * self.norm_sqr();
        let mut acc = 0.0;
        let mut last_nonzero = 0;
        for (i, a) in self.amps.iter().enumerate() {
            let p = a.norm_sqr();
            if p > 0.0 {
                last_nonzero = i;
                acc += p;
                if u < acc {
                    return i;
                }
            }
        }
        last_nonzero
    }

    pub fn measure_all<R: Rng + ?Sized>(&self, rng: &mut R) -> Assignment {
        Assignment::from_index(self.sample_index(rng) as u64, self.num_qubits)
    }

    fn parallel(&self) -> bool {
        self.num_qubits >= PARALLEL_MIN_QUBITS
    }

    /// Swaps the amplitude pairs differing in `target` whose indices contain
    /// every bit of `controls`.
    fn swap_pairs(&mut self, target: usize, controls: usize) {
        let half = 1usize << target;
        let work = move |(chunk_idx, chunk): (usize, &mut [Complex64])| {
            let base = chunk_idx * 2 * half;
            let (lo, hi) = chunk.split_at_mut(half);
            for (k, (a, b)) in lo.iter_mut().zip(hi.iter_mut()).enumerate() {
                if (base + k) & controls == controls {
                    std::mem::swap(a, b);
                }
            }
        };
        if self.parallel() {
            self.amps.par_chunks_mut(2 * half).enumerate().for_each(work);
        } else {
            self.amps.chunks_mut(2 * half).enumerate().for_each(work);
        }
    }

    fn hadamard(&mut self, target: usize) {
        let half = 1usize << target;
        let work = |chunk: &mut [Complex64]| {
            let (lo, hi) = chunk.split_at_mut(half);
            for (a, b) in lo.iter_mut().zip(hi.iter_mut()) {
                let (x, y) = (*a, *b);
                *a = (x + y) * FRAC_1_SQRT_2;
                *b = (x - y) * FRAC_1_SQRT_2;
            }
        };
        if self.parallel() {
            self.amps.par_chunks_mut(2 * half).for_each(work);
        } else {
            self.amps.chunks_mut(2 * half).for_each(work);
        }
    }

    fn phase_where(&mut self, mask: usize, factor: Complex64) {
        let work = |(i, a): (usize, &mut Complex64)| {
            if i & mask == mask {
                *a *= factor;
            }
        };
        if self.parallel() {
            self.amps.par_iter_mut().enumerate().for_each(work);
        } else {
            self.amps.iter_mut().enumerate().for_each(work);
        }
    }
}

fn check_size(m: usize) -> Result<()> {
    if m == 0 || m > MAX_QUBITS {
        return Err(Error::Capacity(format!(
            "statevector needs 1..={MAX_QUBITS} qubits, requested {m}"
        )));
    }
    Ok(())
}
