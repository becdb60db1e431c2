//! Cuccaro–Draper–Kutin–Moulton ripple-carry adder.
//!
//! Computes `b ← a + b mod 2^w` in place using one clean carry ancilla,
//! leaving `a` and the ancilla unchanged.

use crate::circuit::Circuit;
use crate::statevector::Gate;

fn maj(c: &mut Circuit, carry: usize, b: usize, a: usize) {
    c.push(Gate::Cnot { control: a, target: b });
    c.push(Gate::Cnot { control: a, target: carry });
    c.push(Gate::Ccnot { controls: [carry, b], target: a });
}

fn uma(c: &mut Circuit, carry: usize, b: usize, a: usize) {
    c.push(Gate::Ccnot { controls: [carry, b], target: a });
    c.push(Gate::Cnot { control: a, target: carry });
    c.push(Gate::Cnot { control: carry, target: b });
}

/// Appends the modular adder. `a` and `b` are little-endian registers of
/// equal width; `carry` must start (and ends) in `|0⟩`.
pub fn ripple_carry_add(c: &mut Circuit, a: &[usize], b: &[usize], carry: usize) {
    assert_eq!(a.len(), b.len(), "adder operands must have equal width");
    let w = a.len();
    if w == 0 {
        return;
    }
    // The MAJ chain leaves the running carry in a[i]; UMA unwinds it.
    let carry_into = |i: usize| if i == 0 { carry } else { a[i - 1] };
    for i in 0..w {
        maj(c, carry_into(i), b[i], a[i]);
    }
    for i in (0..w).rev() {
        uma(c, carry_into(i), b[i], a[i]);
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::statevector::StateVector;

    /// Runs the adder on basis inputs and reads back (a, b, carry).
    fn run(w: usize, x: usize, y: usize) -> (usize, usize, usize) {
        let a: Vec<usize> = (0..w).collect();
        let b: Vec<usize> = (w..2 * w).collect();
        let carry = 2 * w;
        let mut circ = Circuit::new(2 * w + 1);
        ripple_carry_add(&mut circ, &a, &b, carry);

        let mut sv = StateVector::new(2 * w + 1).unwrap();
        for k in 0..w {
            if x >> k & 1 == 1 {
                sv.apply(&Gate::X(a[k])).unwrap();
            }
            if y >> k & 1 == 1 {
                sv.apply(&Gate::X(b[k])).unwrap();
            }
        }
        circ.run(&mut sv).unwrap();
        let idx = (0..1usize << (2 * w + 1)).find(|&i| sv.probability(i) > 0.5).unwrap();
        assert!((sv.probability(idx) - 1.0).abs() < 1e-12);
        let mask = (1 << w) - 1;
        (idx & mask, (idx >> w) & mask, idx >> (2 * w))
    }

    #[test]
    fn two_bit_one_plus_one() {
        assert_eq!(run(2, 0b01, 0b01), (0b01, 0b10, 0));
    }

    #[test]
    fn exhaustive_up_to_four_bits() {
        for w in 1..=4 {
            let modulus = 1 << w;
            for x in 0..modulus {
                for y in 0..modulus {
                    assert_eq!(run(w, x, y), (x, (x + y) % modulus, 0), "w={w} {x}+{y}");
                }
            }
        }
    }

    #[test]
    fn adding_zero_is_identity() {
        for y in 0..8 {
            assert_eq!(run(3, 0, y), (0, y, 0));
        }
    }
}
