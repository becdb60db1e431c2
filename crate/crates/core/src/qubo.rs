//! QUBO models, assignments and variable fixing.
//!
//! A model is `offset + Σ l_i x_i + Σ_{i<j} c_ij x_i x_j` over binary `x`.
//! Zero coefficients are never stored, so two models describing the same
//! polynomial compare equal.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};

/// Largest model accepted by [`brute_force_min`].
pub const BRUTE_FORCE_MAX_VARS: usize = 24;

/// Quadratic pseudo-boolean polynomial over `n` binary variables.
#[derive(Debug, Clone, PartialEq)]
pub struct QuboModel {
    n: usize,
    linear: BTreeMap<usize, f64>,
    quadratic: BTreeMap<(usize, usize), f64>,
    offset: f64,
}

impl QuboModel {
    /// Zero polynomial over `n` variables.
    pub fn new(n: usize) -> Self {
        QuboModel {
            n,
            linear: BTreeMap::new(),
            quadratic: BTreeMap::new(),
            offset: 0.0,
        }
    }

    /// `x1x2 + 2x2x4 + 3x1x4 + x0x1 + 5x0 + 2x2x3 - 2x2 + 4x3x4 - 4x4 + x3 - 1`,
    /// the five-variable model used throughout the docs and tests.
    pub fn five_variable_example() -> Self {
        let mut m = QuboModel::new(5);
        let quadratic = [
            (1, 2, 1.0),
            (2, 4, 2.0),
            (1, 4, 3.0),
            (0, 1, 1.0),
            (2, 3, 2.0),
            (3, 4, 4.0),
        ];
        for (i, j, c) in quadratic {
            m.set_quadratic(i, j, c).expect("valid term");
        }
        for (i, c) in [(0, 5.0), (2, -2.0), (4, -4.0), (3, 1.0)] {
            m.set_linear(i, c).expect("valid term");
        }
        m.set_offset(-1.0).expect("finite");
        m
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn offset(&self) -> f64 {
        self.offset
    }

    pub fn linear(&self) -> &BTreeMap<usize, f64> {
        &self.linear
    }

    pub fn quadratic(&self) -> &BTreeMap<(usize, usize), f64> {
        &self.quadratic
    }

    pub fn linear_coeff(&self, i: usize) -> f64 {
        self.linear.get(&i).copied().unwrap_or(0.0)
    }

    /// Coefficient of `x_i x_j`; argument order does not matter.
    pub fn quadratic_coeff(&self, i: usize, j: usize) -> f64 {
        let key = if i < j { (i, j) } else { (j, i) };
        self.quadratic.get(&key).copied().unwrap_or(0.0)
    }

    pub fn set_offset(&mut self, c: f64) -> Result<()> {
        check_finite(c)?;
        self.offset = c;
        Ok(())
    }

    /// Sets the coefficient of `x_i`, replacing any previous value.
    pub fn set_linear(&mut self, i: usize, c: f64) -> Result<()> {
        self.check_index(i)?;
        check_finite(c)?;
        store(&mut self.linear, i, c);
        Ok(())
    }

    /// Sets the coefficient of `x_i x_j`. The pair is reordered so that `i < j`.
    pub fn set_quadratic(&mut self, i: usize, j: usize, c: f64) -> Result<()> {
        let key = self.pair_key(i, j)?;
        check_finite(c)?;
        store(&mut self.quadratic, key, c);
        Ok(())
    }

    /// Adds `c` to the coefficient of `x_i`.
    pub fn add_linear(&mut self, i: usize, c: f64) -> Result<()> {
        let cur = self.linear_coeff(i);
        self.set_linear(i, cur + c)
    }

    /// Adds `c` to the coefficient of `x_i x_j`.
    pub fn add_quadratic(&mut self, i: usize, j: usize, c: f64) -> Result<()> {
        let cur = self.quadratic_coeff(i, j);
        self.set_quadratic(i, j, cur + c)
    }

    /// Number of non-constant monomials with a nonzero coefficient.
    pub fn num_terms(&self) -> usize {
        self.linear.len() + self.quadratic.len()
    }

    /// True when the polynomial has no non-constant terms and a zero offset.
    pub fn is_zero(&self) -> bool {
        self.num_terms() == 0 && self.offset == 0.0
    }

    /// True when every coefficient (offset included) is an integer.
    pub fn is_integral(&self) -> bool {
        let int = |c: f64| c.fract() == 0.0;
        int(self.offset) && self.linear.values().all(|&c| int(c)) && self.quadratic.values().all(|&c| int(c))
    }

    /// Lower and upper bounds on the cost from coefficient sums.
    pub fn cost_bounds(&self) -> (f64, f64) {
        let mut lo = self.offset;
        let mut hi = self.offset;
        for &c in self.linear.values().chain(self.quadratic.values()) {
            if c < 0.0 {
                lo += c;
            } else {
                hi += c;
            }
        }
        (lo, hi)
    }

    pub fn evaluate(&self, a: &Assignment) -> Result<f64> {
        if a.len() != self.n {
            return Err(Error::Dimension {
                expected: self.n,
                actual: a.len(),
            });
        }
        Ok(self.evaluate_with(|i| a.bits[i]))
    }

    /// Evaluates and reports how many terms were touched (offset included).
    pub fn evaluate_counted(&self, a: &Assignment) -> Result<(f64, usize)> {
        let cost = self.evaluate(a)?;
        Ok((cost, self.num_terms() + 1))
    }

    /// Evaluates the assignment whose bit `i` is bit `i` of `index`.
    pub fn evaluate_index(&self, index: u64) -> f64 {
        debug_assert!(self.n <= 64);
        self.evaluate_with(|i| (index >> i) & 1 == 1)
    }

    fn evaluate_with(&self, bit: impl Fn(usize) -> bool) -> f64 {
        let mut cost = self.offset;
        for (&i, &c) in &self.linear {
            if bit(i) {
                cost += c;
            }
        }
        for (&(i, j), &c) in &self.quadratic {
            if bit(i) && bit(j) {
                cost += c;
            }
        }
        cost
    }

    fn check_index(&self, i: usize) -> Result<()> {
        if i >= self.n {
            return Err(Error::InvalidModel(format!(
                "variable index {i} out of range for n = {}",
                self.n
            )));
        }
        Ok(())
    }

    fn pair_key(&self, i: usize, j: usize) -> Result<(usize, usize)> {
        self.check_index(i)?;
        self.check_index(j)?;
        match i.cmp(&j) {
            std::cmp::Ordering::Less => Ok((i, j)),
            std::cmp::Ordering::Greater => Ok((j, i)),
            std::cmp::Ordering::Equal => Err(Error::InvalidModel(format!(
                "diagonal pair ({i}, {i}) is not a quadratic term"
            ))),
        }
    }
}

fn check_finite(c: f64) -> Result<()> {
    if c.is_finite() {
        Ok(())
    } else {
        Err(Error::InvalidModel(format!("coefficient {c} is not finite")))
    }
}

fn store<K: Ord>(map: &mut BTreeMap<K, f64>, key: K, c: f64) {
    if c == 0.0 {
        map.remove(&key);
    } else {
        map.insert(key, c);
    }
}

/// A full assignment of binary values, also used as a generic bit string.
///
/// Rendered with bit 0 leftmost (`"00010"` sets only `x3`); converted to an
/// integer with bit 0 least significant.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Assignment {
    bits: Vec<bool>,
}

impl Assignment {
    pub fn zeros(n: usize) -> Self {
        Assignment { bits: vec![false; n] }
    }

    pub fn from_bits(bits: Vec<bool>) -> Self {
        Assignment { bits }
    }

    /// Bit `i` of the result is bit `i` of `index`.
    pub fn from_index(index: u64, n: usize) -> Self {
        assert!(n <= 64, "index encoding supports at most 64 bits");
        Assignment {
            bits: (0..n).map(|i| (index >> i) & 1 == 1).collect(),
        }
    }

    pub fn random<R: Rng + ?Sized>(n: usize, rng: &mut R) -> Self {
        Assignment {
            bits: (0..n).map(|_| rng.gen::<bool>()).collect(),
        }
    }

    pub fn to_index(&self) -> u64 {
        assert!(self.bits.len() <= 64, "index encoding supports at most 64 bits");
        self.bits
            .iter()
            .enumerate()
            .fold(0u64, |acc, (i, &b)| acc | ((b as u64) << i))
    }

    pub fn len(&self) -> usize {
        self.bits.len()
    }

    pub fn is_empty(&self) -> bool {
        self.bits.is_empty()
    }

    pub fn bits(&self) -> &[bool] {
        &self.bits
    }

    pub fn get(&self, i: usize) -> bool {
        self.bits[i]
    }

    pub fn set(&mut self, i: usize, value: bool) {
        self.bits[i] = value;
    }

    pub fn flip(&mut self, i: usize) {
        self.bits[i] = !self.bits[i];
    }
}

impl fmt::Display for Assignment {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for &b in &self.bits {
            f.write_str(if b { "1" } else { "0" })?;
        }
        Ok(())
    }
}

/// Serialized as its bit string.
impl serde::Serialize for Assignment {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

impl FromStr for Assignment {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let bits = s
            .chars()
            .enumerate()
            .map(|(pos, ch)| match ch {
                '0' => Ok(false),
                '1' => Ok(true),
                _ => Err(Error::Parse {
                    line: 1,
                    message: format!("invalid bit {ch:?} at position {pos}"),
                }),
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(Assignment { bits })
    }
}

/// Splits `[0, n)` into fixed variables (with values) and free variables.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PartialAssignment {
    n: usize,
    fixed: BTreeMap<usize, bool>,
    free: Vec<usize>,
}

impl PartialAssignment {
    /// Validates that `fixed` and `free` partition `[0, n)`.
    pub fn new(n: usize, fixed: BTreeMap<usize, bool>, free: Vec<usize>) -> Result<Self> {
        let mut seen = vec![false; n];
        for &i in fixed.keys().chain(free.iter()) {
            if i >= n {
                return Err(Error::Partition(format!("index {i} out of range for n = {n}")));
            }
            if seen[i] {
                return Err(Error::Partition(format!("index {i} is listed twice")));
            }
            seen[i] = true;
        }
        if let Some(missing) = seen.iter().position(|&s| !s) {
            return Err(Error::Partition(format!("index {missing} is neither fixed nor free")));
        }
        Ok(PartialAssignment { n, fixed, free })
    }

    /// Fixes the given variables; all others are free, in ascending order.
    pub fn from_fixed(n: usize, fixed: BTreeMap<usize, bool>) -> Result<Self> {
        let free = (0..n).filter(|i| !fixed.contains_key(i)).collect();
        PartialAssignment::new(n, fixed, free)
    }

    /// Frees `free` and fixes every other variable to its value in `state`.
    pub fn from_state(state: &Assignment, free: Vec<usize>) -> Result<Self> {
        let mut is_free = vec![false; state.len()];
        for &i in &free {
            if i >= state.len() {
                return Err(Error::Partition(format!(
                    "index {i} out of range for n = {}",
                    state.len()
                )));
            }
            is_free[i] = true;
        }
        let fixed = (0..state.len())
            .filter(|&i| !is_free[i])
            .map(|i| (i, state.get(i)))
            .collect();
        PartialAssignment::new(state.len(), fixed, free)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn fixed(&self) -> &BTreeMap<usize, bool> {
        &self.fixed
    }

    pub fn free(&self) -> &[usize] {
        &self.free
    }

    /// Number of free variables.
    pub fn q(&self) -> usize {
        self.free.len()
    }

    /// Full assignment with the free variables taken from `completion`.
    pub fn merge(&self, completion: &Assignment) -> Result<Assignment> {
        if completion.len() != self.free.len() {
            return Err(Error::Dimension {
                expected: self.free.len(),
                actual: completion.len(),
            });
        }
        let mut out = Assignment::zeros(self.n);
        for (&i, &b) in &self.fixed {
            out.set(i, b);
        }
        for (k, &i) in self.free.iter().enumerate() {
            out.set(i, completion.get(k));
        }
        Ok(out)
    }

    /// Values of the free variables in `state`, in free-list order.
    pub fn restrict(&self, state: &Assignment) -> Assignment {
        Assignment::from_bits(self.free.iter().map(|&i| state.get(i)).collect())
    }
}

/// Model over the free variables of a [`PartialAssignment`].
#[derive(Debug, Clone, PartialEq)]
pub struct ReducedQubo {
    pub model: QuboModel,
    /// Reduced index `k` corresponds to original variable `index_map[k]`.
    pub index_map: Vec<usize>,
    /// Constant contributed by the fixed variables (already in `model.offset()`).
    pub folded_offset: f64,
}

impl ReducedQubo {
    pub fn q(&self) -> usize {
        self.index_map.len()
    }
}

/// Substitutes the fixed bits of `p` into `model`.
pub fn fix_variables(model: &QuboModel, p: &PartialAssignment) -> Result<ReducedQubo> {
    if p.n() != model.n() {
        return Err(Error::Partition(format!(
            "partial assignment covers {} variables, model has {}",
            p.n(),
            model.n()
        )));
    }
    let mut position = vec![usize::MAX; model.n()];
    for (k, &i) in p.free().iter().enumerate() {
        position[i] = k;
    }
    let fixed = |i: usize| p.fixed().get(&i).copied();

    let mut reduced = QuboModel::new(p.q());
    let mut folded = 0.0;
    for (&i, &c) in model.linear() {
        match fixed(i) {
            Some(true) => folded += c,
            Some(false) => {}
            None => reduced.add_linear(position[i], c)?,
        }
    }
    for (&(i, j), &c) in model.quadratic() {
        match (fixed(i), fixed(j)) {
            (Some(a), Some(b)) => {
                if a && b {
                    folded += c;
                }
            }
            (Some(true), None) => reduced.add_linear(position[j], c)?,
            (None, Some(true)) => reduced.add_linear(position[i], c)?,
            (Some(false), None) | (None, Some(false)) => {}
            (None, None) => reduced.add_quadratic(position[i], position[j], c)?,
        }
    }
    reduced.set_offset(model.offset() + folded)?;
    Ok(ReducedQubo {
        model: reduced,
        index_map: p.free().to_vec(),
        folded_offset: folded,
    })
}

/// Exhaustive minimum of a small model.
#[derive(Debug, Clone, PartialEq)]
pub struct BruteForceMin {
    /// Lowest-encoded minimizer.
    pub assignment: Assignment,
    pub cost: f64,
    /// Number of assignments attaining `cost`.
    pub count: u64,
}

pub fn brute_force_min(model: &QuboModel) -> Result<BruteForceMin> {
    let n = model.n();
    if n > BRUTE_FORCE_MAX_VARS {
        return Err(Error::Capacity(format!(
            "brute force supports at most {BRUTE_FORCE_MAX_VARS} variables, model has {n}"
        )));
    }
    let mut best_index = 0u64;
    let mut best = model.evaluate_index(0);
    let mut count = 1u64;
    for index in 1..(1u64 << n) {
        let cost = model.evaluate_index(index);
        if cost < best {
            best = cost;
            best_index = index;
            count = 1;
        } else if cost == best {
            count += 1;
        }
    }
    Ok(BruteForceMin {
        assignment: Assignment::from_index(best_index, n),
        cost: best,
        count,
    })
}

/// Seeded random integer model.
///
/// Every linear term and every pair `i < j` is included independently with
/// probability `density`; included coefficients are uniform over the nonzero
/// integers in `[-coeff_range, coeff_range]`.
pub fn random_instance(n: usize, density: f64, coeff_range: u32, seed: u64) -> Result<QuboModel> {
    if n == 0 {
        return Err(Error::Config("random instances need n >= 1".into()));
    }
    if !(density > 0.0 && density <= 1.0) {
        return Err(Error::Config(format!("density {density} outside (0, 1]")));
    }
    if coeff_range == 0 {
        return Err(Error::Config("coefficient range must be >= 1".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let range = coeff_range as i64;
    let draw = |rng: &mut ChaCha8Rng| -> Option<f64> {
        if !rng.gen_bool(density) {
            return None;
        }
        let v = rng.gen_range(-range..range);
        Some(if v >= 0 { v + 1 } else { v } as f64)
    };

    let mut model = QuboModel::new(n);
    for i in 0..n {
        if let Some(c) = draw(&mut rng) {
            model.set_linear(i, c)?;
        }
    }
    for i in 0..n {
        for j in (i + 1)..n {
            if let Some(c) = draw(&mut rng) {
                model.set_quadratic(i, j, c)?;
            }
        }
    }
    Ok(model)
}
