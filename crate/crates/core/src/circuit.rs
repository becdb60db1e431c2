//! Ordered gate lists.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::statevector::{Gate, StateVector};

/// Gate kinds reported by [`Circuit::gate_counts`], in report order.
pub const GATE_KINDS: [&str; 7] = ["ccnot", "cnot", "cphase", "h", "mcz", "x", "z"];

#[derive(Debug, Clone, PartialEq, Default)]
pub struct Circuit {
    num_qubits: usize,
    gates: Vec<Gate>,
}

impl Circuit {
    pub fn new(num_qubits: usize) -> Self {
        Circuit {
            num_qubits,
            gates: Vec::new(),
        }
    }

    pub fn num_qubits(&self) -> usize {
        self.num_qubits
    }

    pub fn gates(&self) -> &[Gate] {
        &self.gates
    }

    pub fn len(&self) -> usize {
        self.gates.len()
    }

    pub fn is_empty(&self) -> bool {
        self.gates.is_empty()
    }

    pub fn push(&mut self, gate: Gate) {
        debug_assert!(gate.validate(self.num_qubits).is_ok(), "{gate}");
        self.gates.push(gate);
    }

    pub fn extend(&mut self, other: &Circuit) {
        debug_assert!(other.num_qubits <= self.num_qubits);
        self.gates.extend(other.gates.iter().cloned());
    }

    /// Reversed gate order with each gate inverted.
    pub fn inverse(&self) -> Circuit {
        Circuit {
            num_qubits: self.num_qubits,
            gates: self.gates.iter().rev().map(Gate::inverse).collect(),
        }
    }

    /// Count per gate kind; every kind in [`GATE_KINDS`] is present.
    pub fn gate_counts(&self) -> BTreeMap<String, usize> {
        let mut counts: BTreeMap<String, usize> =
            GATE_KINDS.iter().map(|k| (k.to_string(), 0)).collect();
        for g in &self.gates {
            *counts.entry(g.kind().to_string()).or_default() += 1;
        }
        counts
    }

    /// True when every gate maps basis states to basis states (no `h`).
    pub fn is_classical(&self) -> bool {
        !self.gates.iter().any(|g| matches!(g, Gate::H(_)))
    }

    /// Image of basis state `index` under a classical circuit, with the
    /// phase it picks up.
    pub fn permute_basis(&self, index: usize) -> Result<(usize, Complex64)> {
        let mut bits = index;
        let mut phase = Complex64::new(1.0, 0.0);
        let set = |b: usize, q: usize| b >> q & 1 == 1;
        for g in &self.gates {
            match g {
                Gate::X(t) => bits ^= 1 << t,
                Gate::Cnot { control, target } => {
                    if set(bits, *control) {
                        bits ^= 1 << target;
                    }
                }
                Gate::Ccnot { controls, target } => {
                    if set(bits, controls[0]) && set(bits, controls[1]) {
                        bits ^= 1 << target;
                    }
                }
                Gate::Z(t) => {
                    if set(bits, *t) {
                        phase = -phase;
                    }
                }
                Gate::CPhase {
                    control,
                    target,
                    angle,
                } => {
                    if set(bits, *control) && set(bits, *target) {
                        phase *= Complex64::from_polar(1.0, *angle);
                    }
                }
                Gate::Mcz(qs) => {
                    if qs.iter().all(|&q| set(bits, q)) {
                        phase = -phase;
                    }
                }
                Gate::H(_) => {
                    return Err(Error::Gate("basis permutation of a circuit containing h".into()))
                }
            }
        }
        Ok((bits, phase))
    }

    /// Applies the circuit to `state`.
    ///
    /// Classical circuits are applied by permuting the nonzero amplitudes,
    /// which is exact and much cheaper on the sparse states produced by
    /// clean-ancilla arithmetic.
    pub fn run(&self, state: &mut StateVector) -> Result<()> {
        if self.num_qubits > state.num_qubits() {
            return Err(Error::Dimension {
                expected: self.num_qubits,
                actual: state.num_qubits(),
            });
        }
        if !self.is_classical() {
            return state.apply_all(&self.gates);
        }
        for g in &self.gates {
            g.validate(state.num_qubits())?;
        }
        let amps = state.amplitudes();
        let mut out = vec![Complex64::new(0.0, 0.0); amps.len()];
        for (i, a) in amps.iter().enumerate() {
            if a.norm_sqr() != 0.0 {
                let (j, phase) = self.permute_basis(i)?;
                out[j] = a * phase;
            }
        }
        *state = StateVector::from_amplitudes(out)?;
        Ok(())
    }

    /// Plain-text dump: a `qubits <m>` header, then one gate per line.
    pub fn dump(&self) -> String {
        let mut out = format!("qubits {}\n", self.num_qubits);
        for g in &self.gates {
            let _ = writeln!(out, "{g}");
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn random_classical(m: usize, len: usize, rng: &mut ChaCha8Rng) -> Circuit {
        let mut c = Circuit::new(m);
        while c.len() < len {
            let a = rng.gen_range(0..m);
            let b = rng.gen_range(0..m);
            let t = rng.gen_range(0..m);
            let g = match rng.gen_range(0..6) {
                0 => Gate::X(t),
                1 => Gate::Z(t),
                2 => Gate::Cnot { control: a, target: t },
                3 => Gate::Ccnot { controls: [a, b], target: t },
                4 => Gate::CPhase { control: a, target: t, angle: rng.gen_range(-3.0..3.0) },
                _ => Gate::Mcz(vec![a, b]),
            };
            if g.validate(m).is_ok() {
                c.push(g);
            }
        }
        c
    }

    #[test]
    fn sparse_permutation_matches_gate_by_gate() {
        let mut rng = ChaCha8Rng::seed_from_u64(17);
        for _ in 0..20 {
            let c = random_classical(6, 40, &mut rng);
            let mut sv = StateVector::new(6).unwrap();
            sv.apply(&Gate::H(0)).unwrap();
            sv.apply(&Gate::H(3)).unwrap();
            sv.apply(&Gate::CPhase { control: 0, target: 3, angle: 0.3 }).unwrap();
            let mut reference = sv.clone();
            c.run(&mut sv).unwrap();
            reference.apply_all(c.gates()).unwrap();
            for (a, b) in sv.amplitudes().iter().zip(reference.amplitudes()) {
                assert!((a - b).norm() < 1e-12);
            }
        }
    }

    #[test]
    fn inverse_undoes_circuit() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let c = random_classical(5, 30, &mut rng);
        let mut both = c.clone();
        both.extend(&c.inverse());
        for i in 0..32 {
            let (j, phase) = both.permute_basis(i).unwrap();
            assert_eq!(j, i);
            assert!((phase - Complex64::new(1.0, 0.0)).norm() < 1e-12);
        }
    }

    #[test]
    fn dump_format() {
        let mut c = Circuit::new(3);
        c.push(Gate::Ccnot { controls: [0, 1], target: 2 });
        c.push(Gate::X(1));
        assert_eq!(c.dump(), "qubits 3\nccnot 0 1 2\nx 1\n");
        let counts = c.gate_counts();
        assert_eq!(counts["ccnot"], 1);
        assert_eq!(counts["x"], 1);
        assert_eq!(counts.len(), GATE_KINDS.len());
    }

    #[test]
    fn hadamard_circuits_are_not_classical() {
        let mut c = Circuit::new(1);
        c.push(Gate::H(0));
        assert!(!c.is_classical());
        assert!(c.permute_basis(0).is_err());
    }
}
