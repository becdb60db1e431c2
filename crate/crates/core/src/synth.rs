//! Reversible cost-evaluation circuits for integer QUBO models.
//!
//! Each monomial is accumulated into a two's-complement cost register by a
//! controlled ripple-carry addition of its (classical) coefficient:
//!
//! * quadratic `c·x_i x_j`: Toffoli the product into a shared ancilla, add
//!   `c` controlled on it, Toffoli it back to zero;
//! * linear `c·x_i`: add `c` controlled on `x_i`;
//! * offset: unconditional addition.
//!
//! A controlled constant addition loads `c` into an addend register with
//! CNOTs from the control, runs the adder and unloads it again, so every
//! work qubit returns to `|0⟩`.

use std::collections::BTreeMap;
use std::ops::Range;

use serde::Serialize;

use crate::adder::ripple_carry_add;
use crate::circuit::Circuit;
use crate::error::{Error, Result};
use crate::qubo::{QuboModel, ReducedQubo};
use crate::statevector::{Gate, MAX_QUBITS};

/// Largest coefficient magnitude accepted for synthesis.
const MAX_COEFF: f64 = (1u64 << 52) as f64;

/// Qubit assignment of a synthesized circuit. Unused registers are empty.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct RegisterLayout {
    pub input: Range<usize>,
    pub cost: Range<usize>,
    pub addend: Range<usize>,
    pub carry: Option<usize>,
    pub product: Option<usize>,
}

impl RegisterLayout {
    pub fn total(&self) -> usize {
        self.input.len() + self.cost.len() + self.addend.len()
            + self.carry.is_some() as usize
            + self.product.is_some() as usize
    }

    /// Ancilla count (addend, carry and product qubits).
    pub fn ancillas(&self) -> usize {
        self.total() - self.input.len() - self.cost.len()
    }

    /// Most significant cost qubit (the sign bit when signed).
    pub fn sign_qubit(&self) -> usize {
        self.cost.end - 1
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct CostCircuit {
    pub circuit: Circuit,
    pub layout: RegisterLayout,
    /// Cost register width `w`.
    pub width: usize,
    /// Whether the register is read as two's complement.
    pub signed: bool,
    /// Cost bounds from coefficient sums.
    pub bounds: (i64, i64),
    pub monomial_terms: usize,
}

/// Result of running a cost circuit on one basis input.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BasisEvaluation {
    pub raw: u64,
    pub cost: i64,
    /// Input register unchanged and every ancilla back at `|0⟩`.
    pub clean: bool,
    /// Modulus of the output amplitude (1 for a permutation circuit).
    pub amplitude: f64,
}

impl CostCircuit {
    /// Interprets a raw cost-register value.
    pub fn decode(&self, raw: u64) -> i64 {
        decode(raw, self.width, self.signed)
    }

    /// Runs the circuit on the basis state whose input register holds
    /// `input` (bit `k` = reduced variable `k`).
    pub fn evaluate_basis(&self, input: u64) -> Result<BasisEvaluation> {
        let (out, phase) = self.circuit.permute_basis(input as usize)?;
        let cost_mask = (1usize << self.width) - 1;
        let raw = ((out >> self.layout.cost.start) & cost_mask) as u64;
        let rest = out & !(cost_mask << self.layout.cost.start);
        Ok(BasisEvaluation {
            raw,
            cost: self.decode(raw),
            clean: rest == input as usize,
            amplitude: phase.norm(),
        })
    }
}

/// Phase oracle flipping the sign of inputs whose cost is below a threshold.
#[derive(Debug, Clone, PartialEq)]
pub struct ThresholdOracleCircuit {
    pub circuit: Circuit,
    pub layout: RegisterLayout,
    pub width: usize,
    pub threshold: i64,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ResourceReport {
    pub qubits: usize,
    pub gate_counts: BTreeMap<String, usize>,
    pub monomial_terms: usize,
}

/// Integer view of a model.
struct IntModel {
    q: usize,
    offset: i64,
    linear: Vec<(usize, i64)>,
    quadratic: Vec<((usize, usize), i64)>,
}

impl IntModel {
    fn from_model(model: &QuboModel) -> Result<Self> {
        let int = |c: f64| -> Result<i64> {
            if c.fract() != 0.0 {
                return Err(Error::Synthesis(format!("coefficient {c} is not an integer")));
            }
            if c.abs() >= MAX_COEFF {
                return Err(Error::Synthesis(format!("coefficient {c} is too large")));
            }
            Ok(c as i64)
        };
        Ok(IntModel {
            q: model.n(),
            offset: int(model.offset())?,
            linear: model
                .linear()
                .iter()
                .map(|(&i, &c)| Ok((i, int(c)?)))
                .collect::<Result<_>>()?,
            quadratic: model
                .quadratic()
                .iter()
                .map(|(&k, &c)| Ok((k, int(c)?)))
                .collect::<Result<_>>()?,
        })
    }

    fn bounds(&self) -> (i64, i64) {
        let terms = self.linear.iter().map(|t| t.1).chain(self.quadratic.iter().map(|t| t.1));
        terms.fold((self.offset, self.offset), |(lo, hi), c| {
            if c < 0 {
                (lo + c, hi)
            } else {
                (lo, hi + c)
            }
        })
    }
}

/// Smallest `w ≥ 2` holding every value of `[lo, hi]`; unsigned when `lo ≥ 0`.
pub fn register_width(lo: i64, hi: i64) -> (usize, bool) {
    if lo >= 0 {
        let bits = 64 - (hi as u64).leading_zeros() as usize;
        (bits.max(2), false)
    } else {
        (signed_width(lo, hi), true)
    }
}

fn signed_width(lo: i64, hi: i64) -> usize {
    let mut w = 2;
    while lo < -(1i64 << (w - 1)) || hi > (1i64 << (w - 1)) - 1 {
        w += 1;
    }
    w
}

fn decode(raw: u64, width: usize, signed: bool) -> i64 {
    if signed && raw >> (width - 1) & 1 == 1 {
        raw as i64 - (1i64 << width)
    } else {
        raw as i64
    }
}

/// Builds the accumulation circuit for `model + extra_offset` at `width`.
fn accumulate(model: &IntModel, width: usize, extra_offset: i64) -> Result<(Circuit, RegisterLayout)> {
    let modulus = 1i64 << width;
    let offset = (model.offset + extra_offset).rem_euclid(modulus) as u64;
    let needs_adder = !model.linear.is_empty() || !model.quadratic.is_empty() || offset != 0;
    let needs_product = !model.quadratic.is_empty();

    let q = model.q;
    let input = 0..q;
    let cost = q..q + width;
    let mut next = cost.end;
    let addend = if needs_adder { next..next + width } else { next..next };
    next = addend.end;
    let carry = needs_adder.then(|| {
        next += 1;
        next - 1
    });
    let product = needs_product.then(|| {
        next += 1;
        next - 1
    });
    let layout = RegisterLayout {
        input,
        cost,
        addend,
        carry,
        product,
    };
    if layout.total() > MAX_QUBITS {
        return Err(Error::Capacity(format!(
            "circuit needs {} qubits ({q} input, {width}-bit cost register, {} ancillas), cap is {MAX_QUBITS}",
            layout.total(),
            layout.ancillas()
        )));
    }

    let mut circ = Circuit::new(layout.total());
    let addend_bits: Vec<usize> = layout.addend.clone().collect();
    let cost_bits: Vec<usize> = layout.cost.clone().collect();
    let add_const = |circ: &mut Circuit, control: Option<usize>, c: i64| {
        let k = c.rem_euclid(modulus) as u64;
        if k == 0 {
            return;
        }
        let load = |circ: &mut Circuit| {
            for (b, &qb) in addend_bits.iter().enumerate() {
                if k >> b & 1 == 1 {
                    circ.push(match control {
                        Some(ctrl) => Gate::Cnot { control: ctrl, target: qb },
                        None => Gate::X(qb),
                    });
                }
            }
        };
        load(circ);
        ripple_carry_add(circ, &addend_bits, &cost_bits, carry.expect("adder allocated"));
        load(circ);
    };

    for &((i, j), c) in &model.quadratic {
        let p = product.expect("product ancilla allocated");
        let and = Gate::Ccnot { controls: [i, j], target: p };
        circ.push(and.clone());
        add_const(&mut circ, Some(p), c);
        circ.push(and);
    }
    for &(i, c) in &model.linear {
        add_const(&mut circ, Some(i), c);
    }
    add_const(&mut circ, None, offset as i64);
    Ok((circ, layout))
}

fn ensure_inputs(reduced: &ReducedQubo) -> Result<()> {
    if reduced.q() == 0 {
        return Err(Error::Synthesis("model has no free variables".into()));
    }
    Ok(())
}

/// Compiles the reduced model into a circuit writing its cost into the cost
/// register (mod `2^w`).
pub fn synthesize_cost_circuit(reduced: &ReducedQubo) -> Result<CostCircuit> {
    ensure_inputs(reduced)?;
    let model = IntModel::from_model(&reduced.model)?;
    let bounds = model.bounds();
    let (width, signed) = register_width(bounds.0, bounds.1);
    let (circuit, layout) = accumulate(&model, width, 0)?;
    Ok(CostCircuit {
        circuit,
        layout,
        width,
        signed,
        bounds,
        monomial_terms: reduced.model.num_terms(),
    })
}

/// Compute `cost − threshold`, phase-flip on its sign bit, uncompute.
///
/// The register is wide enough that the sign bit is exactly
/// `cost < threshold` for every input.
pub fn synthesize_threshold_oracle(reduced: &ReducedQubo, threshold: i64) -> Result<ThresholdOracleCircuit> {
    ensure_inputs(reduced)?;
    let model = IntModel::from_model(&reduced.model)?;
    let (lo, hi) = model.bounds();
    let width = signed_width((lo - threshold).min(-1), (hi - threshold).max(0));
    let (compute, layout) = accumulate(&model, width, -threshold)?;
    let mut circuit = compute.clone();
    circuit.push(Gate::Z(layout.sign_qubit()));
    circuit.extend(&compute.inverse());
    Ok(ThresholdOracleCircuit {
        circuit,
        layout,
        width,
        threshold,
    })
}

pub fn resource_report(c: &CostCircuit) -> ResourceReport {
    ResourceReport {
        qubits: c.layout.total(),
        gate_counts: c.circuit.gate_counts(),
        monomial_terms: c.monomial_terms,
    }
}
