//! Dense statevector simulation of `A_y`, the sign oracle and the Grover
//! operator.
//!
//! Amplitude index `(key << m) | value`: key qubit `j` is bit `m + j`, value
//! qubit `q` is bit `m - 1 - q`, so the low `m` bits read as the value
//! register with the sign qubit on top.

use std::f64::consts::PI;
use std::sync::Arc;

use num_complex::Complex64;
use rand::Rng;
use rayon::prelude::*;
use rustfft::{Fft, FftPlanner};

use crate::boolpoly::{ScheduledPolynomial, DEFAULT_ENUMERATION_CAP};
use crate::circuit::{synthesize_unchecked, Circuit, Gate};
use crate::error::{Error, Result};

pub const DEFAULT_QUBIT_CAP: usize = 26;

/// Chunks below this many amplitudes are processed sequentially.
const PAR_MIN: usize = 1 << 12;

#[derive(Debug, Clone, PartialEq)]
pub struct StateVector {
    num_key: usize,
    num_value: usize,
    amps: Vec<Complex64>,
}

impl StateVector {
    /// `|0…0⟩`.
    pub fn zero(num_key: usize, num_value: usize) -> Result<Self> {
        Self::basis_with_cap(num_key, num_value, 0, DEFAULT_QUBIT_CAP)
    }

    /// `|key⟩|value⟩`.
    pub fn basis(num_key: usize, num_value: usize, key: u64, value: u64) -> Result<Self> {
        let mut s = Self::zero(num_key, num_value)?;
        s.amps[0] = Complex64::new(0.0, 0.0);
        let i = (key as usize) << num_value | value as usize;
        if i >= s.amps.len() {
            return Err(Error::IndexOutOfRange {
                index: i,
                max: s.amps.len() - 1,
            });
        }
        s.amps[i] = Complex64::new(1.0, 0.0);
        Ok(s)
    }

    pub fn basis_with_cap(num_key: usize, num_value: usize, index: usize, cap: usize) -> Result<Self> {
        let qubits = num_key + num_value;
        if qubits > cap {
            return Err(Error::SimulationCap { qubits, cap });
        }
        let mut amps = vec![Complex64::new(0.0, 0.0); 1usize << qubits];
        amps[index] = Complex64::new(1.0, 0.0);
        Ok(Self {
            num_key,
            num_value,
            amps,
        })
    }

    pub fn from_amplitudes(num_key: usize, num_value: usize, amps: Vec<Complex64>) -> Result<Self> {
        if amps.len() != 1usize << (num_key + num_value) {
            return Err(Error::LengthMismatch {
                expected: 1usize << (num_key + num_value),
                got: amps.len(),
            });
        }
        Ok(Self {
            num_key,
            num_value,
            amps,
        })
    }

    pub fn num_key(&self) -> usize {
        self.num_key
    }

    pub fn num_value(&self) -> usize {
        self.num_value
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amps
    }

    pub fn amplitude(&self, key: u64, value: u64) -> Complex64 {
        self.amps[(key as usize) << self.num_value | value as usize]
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amps.par_iter().map(|a| a.norm_sqr()).sum()
    }

    /// Largest amplitude difference against `other`.
    pub fn max_distance(&self, other: &StateVector) -> f64 {
        self.amps
            .iter()
            .zip(&other.amps)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }

    fn block(&self) -> usize {
        1 << self.num_value
    }

    fn check(&self, circ: &Circuit) -> Result<()> {
        if circ.num_key() != self.num_key || circ.num_value() != self.num_value {
            return Err(Error::DimensionMismatch {
                state: self.num_key + self.num_value,
                circuit: circ.num_qubits(),
            });
        }
        Ok(())
    }

    /// Bit position of circuit qubit `q`.
    fn bit(&self, q: usize) -> usize {
        if q < self.num_key {
            self.num_value + q
        } else {
            self.num_value - 1 - (q - self.num_key)
        }
    }

    pub fn apply(&mut self, circ: &Circuit) -> Result<()> {
        self.check(circ)?;
        let mut fft = FftCache::default();
        for g in circ.gates() {
            self.apply_gate(g, false, &mut fft);
        }
        Ok(())
    }

    /// Applies the inverse circuit.
    pub fn apply_adjoint(&mut self, circ: &Circuit) -> Result<()> {
        self.check(circ)?;
        let mut fft = FftCache::default();
        for g in circ.gates().iter().rev() {
            self.apply_gate(g, true, &mut fft);
        }
        Ok(())
    }

    fn apply_gate(&mut self, g: &Gate, adjoint: bool, fft: &mut FftCache) {
        match g {
            Gate::Hadamard(q) => self.hadamard(self.bit(*q)),
            Gate::PauliX(q) => self.pauli_x(self.bit(*q)),
            Gate::PhaseBlock {
                controls,
                coefficient,
            } => {
                let a = if adjoint { -coefficient } else { *coefficient };
                self.phase_block(controls, a)
            }
            Gate::InverseQft => self.fourier(!adjoint, fft),
            Gate::SignFlipZ => self.sign_flip(),
        }
    }

    fn hadamard(&mut self, bit: usize) {
        let s = std::f64::consts::FRAC_1_SQRT_2;
        let stride = 1usize << bit;
        let body = |chunk: &mut [Complex64]| {
            let (lo, hi) = chunk.split_at_mut(stride);
            for (a, b) in lo.iter_mut().zip(hi) {
                let (x, y) = (*a, *b);
                *a = (x + y) * s;
                *b = (x - y) * s;
            }
        };
        if self.amps.len() >= PAR_MIN {
            self.amps.par_chunks_mut(2 * stride).for_each(body);
        } else {
            self.amps.chunks_mut(2 * stride).for_each(body);
        }
    }

    fn pauli_x(&mut self, bit: usize) {
        let stride = 1usize << bit;
        self.amps.par_chunks_mut(2 * stride).for_each(|chunk| {
            let (lo, hi) = chunk.split_at_mut(stride);
            lo.swap_with_slice(hi);
        });
    }

    /// Multiplies `e^{2πi·a·v/2^m}` onto value `v` of every key whose control
    /// bits are all set.
    fn phase_block(&mut self, controls: &[usize], a: i64) {
        let size = self.block();
        let modulus = size as i64;
        let step = a.rem_euclid(modulus) as u64;
        let table: Vec<Complex64> = (0..size as u64)
            .map(|v| {
                let k = (step * v) % size as u64;
                Complex64::from_polar(1.0, 2.0 * PI * k as f64 / size as f64)
            })
            .collect();
        let mask: usize = controls.iter().map(|&c| 1usize << c).sum();
        self.amps
            .par_chunks_mut(size)
            .enumerate()
            .filter(|(key, _)| key & mask == mask)
            .for_each(|(_, chunk)| {
                for (amp, ph) in chunk.iter_mut().zip(&table) {
                    *amp *= ph;
                }
            });
    }

    /// Inverse QFT on the value register when `inverse`, the forward QFT otherwise.
    fn fourier(&mut self, inverse: bool, cache: &mut FftCache) {
        let size = self.block();
        let plan = cache.plan(size, inverse);
        let scale = 1.0 / (size as f64).sqrt();
        self.amps.par_chunks_mut(size).for_each(|chunk| {
            plan.process(chunk);
            for a in chunk.iter_mut() {
                *a *= scale;
            }
        });
    }

    fn sign_flip(&mut self) {
        let size = self.block();
        let half = size / 2;
        self.amps.par_chunks_mut(size).for_each(|chunk| {
            for a in &mut chunk[half..] {
                *a = -*a;
            }
        });
    }

    /// `2|0⟩⟨0| - I`.
    fn reflect_zero(&mut self) {
        let keep = self.amps[0];
        self.amps.par_iter_mut().for_each(|a| *a = -*a);
        self.amps[0] = keep;
    }

    /// One Grover iteration `A_y (2|0⟩⟨0| - I) A_y† Z_sign`.
    pub fn grover_step(&mut self, ay: &Circuit) -> Result<()> {
        self.check(ay)?;
        self.sign_flip();
        self.apply_adjoint(ay)?;
        self.reflect_zero();
        self.apply(ay)
    }

    /// Marginal distribution of the key register.
    pub fn key_probabilities(&self) -> Vec<f64> {
        self.amps
            .par_chunks(self.block())
            .map(|c| c.iter().map(|a| a.norm_sqr()).sum())
            .collect()
    }

    /// Born-rule sample of the key register.
    pub fn measure_key<R: Rng + ?Sized>(&self, rng: &mut R) -> u64 {
        sample_index(&self.key_probabilities(), rng)
    }
}

/// Draws an index from a probability vector by inverse CDF.
pub fn sample_index<R: Rng + ?Sized>(probs: &[f64], rng: &mut R) -> u64 {
    let total: f64 = probs.iter().sum();
    let mut u = rng.gen::<f64>() * total;
    for (i, &p) in probs.iter().enumerate() {
        if u < p {
            return i as u64;
        }
        u -= p;
    }
    // rounding left us past the end: take the last index with mass
    probs.iter().rposition(|&p| p > 0.0).unwrap_or(0) as u64
}

#[derive(Default)]
struct FftCache {
    planner: Option<FftPlanner<f64>>,
    forward: Option<Arc<dyn Fft<f64>>>,
    backward: Option<Arc<dyn Fft<f64>>>,
}

impl FftCache {
    /// The inverse QFT is the forward DFT (negative exponent) up to scaling.
    fn plan(&mut self, size: usize, inverse_qft: bool) -> Arc<dyn Fft<f64>> {
        let planner = self.planner.get_or_insert_with(FftPlanner::new);
        let slot = if inverse_qft {
            &mut self.forward
        } else {
            &mut self.backward
        };
        slot.get_or_insert_with(|| {
            if inverse_qft {
                planner.plan_fft_forward(size)
            } else {
                planner.plan_fft_inverse(size)
            }
        })
        .clone()
    }
}

/// Result of checking `A_y` on every key branch.
#[derive(Debug, Clone, PartialEq)]
pub struct OracleReport {
    pub inputs_checked: u64,
    pub counterexample: Option<OracleMismatch>,
}

impl OracleReport {
    pub fn passed(&self) -> bool {
        self.counterexample.is_none()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct OracleMismatch {
    pub x: u64,
    /// `E(x) - y`.
    pub expected: i64,
    /// Signed reading of the most likely value register outcome.
    pub got: i64,
    /// Probability mass of that outcome within the branch.
    pub weight: f64,
}

/// Two's-complement reading of an `m`-bit register.
pub fn signed_value(v: u64, m: usize) -> i64 {
    let v = v as i64;
    if v >= 1 << (m - 1) {
        v - (1 << m)
    } else {
        v
    }
}

/// Prepares `A_y|0⟩` once and checks that every key branch `x` holds exactly
/// `E(x) - y` in two's complement, with the sign qubit set iff `E(x) < y`.
/// The width is not checked beforehand, so a too-small `m` shows up as an
/// aliasing counterexample.
pub fn verify_oracle(poly: &ScheduledPolynomial, y: i64, m: usize) -> Result<OracleReport> {
    let n = poly.polynomial().num_vars();
    if n > DEFAULT_ENUMERATION_CAP {
        return Err(Error::EnumerationCap {
            num_vars: n,
            cap: DEFAULT_ENUMERATION_CAP,
        });
    }
    let circ = synthesize_unchecked(poly, y, m)?;
    let mut state = StateVector::zero(n, m)?;
    state.apply(&circ)?;
    let compiled = poly.polynomial().compile()?;
    let branch = 1.0 / (1u64 << n) as f64;
    let size = 1usize << m;
    for x in 0..1u64 << n {
        let expected = compiled.eval(x) - y;
        let chunk = &state.amps[(x as usize) * size..(x as usize + 1) * size];
        let (v, p) = chunk
            .iter()
            .enumerate()
            .map(|(v, a)| (v, a.norm_sqr()))
            .fold((0, -1.0), |best, c| if c.1 > best.1 { c } else { best });
        let got = signed_value(v as u64, m);
        let sign_ok = (v >= size / 2) == (expected < 0);
        if got != expected || !sign_ok || (p - branch).abs() > 1e-9 {
            return Ok(OracleReport {
                inputs_checked: x + 1,
                counterexample: Some(OracleMismatch {
                    x,
                    expected,
                    got,
                    weight: p / branch,
                }),
            });
        }
    }
    Ok(OracleReport {
        inputs_checked: 1 << n,
        counterexample: None,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::boolpoly::Polynomial;
    use crate::circuit::synthesize_ay;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn c(re: f64) -> Complex64 {
        Complex64::new(re, 0.0)
    }

    #[test]
    fn hadamard_on_zero() {
        let mut s = StateVector::zero(1, 1).unwrap();
        s.apply(&Circuit::new(1, 1, vec![Gate::Hadamard(0)]).unwrap()).unwrap();
        let h = std::f64::consts::FRAC_1_SQRT_2;
        assert!((s.amplitude(0, 0) - c(h)).norm() < 1e-12);
        assert!((s.amplitude(1, 0) - c(h)).norm() < 1e-12);
    }

    #[test]
    fn constant_block_adds_one() {
        let circ = Circuit::new(
            0,
            2,
            vec![
                Gate::Hadamard(0),
                Gate::Hadamard(1),
                Gate::PhaseBlock {
                    controls: vec![],
                    coefficient: 1,
                },
                Gate::InverseQft,
            ],
        )
        .unwrap();
        let mut s = StateVector::zero(0, 2).unwrap();
        s.apply(&circ).unwrap();
        assert!((s.amplitude(0, 1).norm() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn single_variable_oracle() {
        let p: Polynomial = "vars 1\n1 * v0\nconst 0\n".parse().unwrap();
        let circ = synthesize_ay(&p, 0, 2).unwrap().oracle_part();
        let mut s = StateVector::basis(1, 2, 1, 0).unwrap();
        s.apply(&circ).unwrap();
        assert!((s.amplitude(1, 1).norm() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn adjoint_undoes() {
        let p: Polynomial = "vars 3\n1 * v0 v1 v2\n-1 * !v0 v2\nconst 0\n".parse().unwrap();
        let circ = synthesize_ay(&p, 0, 3).unwrap();
        let mut s = StateVector::zero(3, 3).unwrap();
        s.apply(&circ).unwrap();
        s.apply_adjoint(&circ).unwrap();
        assert!((s.amps[0] - c(1.0)).norm() < 1e-12);
        assert!((s.norm_sqr() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn fig2_oracle_and_undersized_register() {
        let p: ScheduledPolynomial = "vars 3\n1 * v0 v1 v2\n1 * v0 v2\n-1 * v2\nconst 0\n"
            .parse()
            .unwrap();
        let r = verify_oracle(&p, 0, 3).unwrap();
        assert!(r.passed());
        assert_eq!(r.inputs_checked, 8);
        assert!(verify_oracle(&p, 0, 1).unwrap().counterexample.is_some());
        let neg: ScheduledPolynomial = "vars 1\nconst -1\n".parse().unwrap();
        assert!(verify_oracle(&neg, 0, 2).unwrap().passed());
    }

    #[test]
    fn grover_single_marked() {
        // E = 1 - x0 x1 x2 is negative only at x = 7 when y = 1
        let p: ScheduledPolynomial = "vars 3\n-1 * v0 v1 v2\nconst 1\n".parse().unwrap();
        let circ = synthesize_unchecked(&p, 1, 2).unwrap();
        let mut s = StateVector::zero(3, 2).unwrap();
        s.apply(&circ).unwrap();
        s.grover_step(&circ).unwrap();
        let probs = s.key_probabilities();
        assert!((probs[7] - 0.78125).abs() < 1e-9);
        s.grover_step(&circ).unwrap();
        assert!((s.key_probabilities()[7] - 0.9453125).abs() < 1e-9);
    }

    #[test]
    fn nothing_marked_keeps_uniform() {
        let p: ScheduledPolynomial = "vars 2\n1 * v0\nconst 0\n".parse().unwrap();
        let circ = synthesize_unchecked(&p, 0, 2).unwrap();
        let mut s = StateVector::zero(2, 2).unwrap();
        s.apply(&circ).unwrap();
        s.grover_step(&circ).unwrap();
        for p in s.key_probabilities() {
            assert!((p - 0.25).abs() < 1e-12);
        }
    }

    #[test]
    fn measuring_a_basis_state() {
        let s = StateVector::basis(3, 1, 5, 0).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        for _ in 0..10 {
            assert_eq!(s.measure_key(&mut rng), 5);
        }
    }

    #[test]
    fn cap_and_dimensions() {
        assert!(matches!(
            StateVector::zero(20, 7),
            Err(Error::SimulationCap { qubits: 27, .. })
        ));
        let mut s = StateVector::zero(1, 1).unwrap();
        let circ = Circuit::new(2, 1, vec![]).unwrap();
        assert!(matches!(s.apply(&circ), Err(Error::DimensionMismatch { .. })));
    }

    #[test]
    fn signed_reading() {
        assert_eq!(signed_value(7, 3), -1);
        assert_eq!(signed_value(3, 3), 3);
        assert_eq!(signed_value(4, 3), -4);
    }
}
