//! Grover adaptive search over a polynomial objective.
//!
//! Two backends produce the same sampling law: the statevector backend
//! simulates `A_y` and the Grover operator, the analytic backend draws from
//! the closed-form amplitude-amplification distribution, which is exact
//! because marked and unmarked amplitudes stay uniform.

use std::collections::HashMap;
use std::sync::{Arc, Mutex};

use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::boolpoly::{value_register_width, ScheduledPolynomial, DEFAULT_ENUMERATION_CAP};
use crate::circuit::synthesize_unchecked;
use crate::error::{Error, Result};
use crate::problems::Formulation;
use crate::simulator::{sample_index, StateVector, DEFAULT_QUBIT_CAP};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Backend {
    Analytic,
    Statevector,
}

impl std::str::FromStr for Backend {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "analytic" => Ok(Backend::Analytic),
            "statevector" => Ok(Backend::Statevector),
            _ => Err(Error::InvalidConfig(format!("unknown backend `{s}`"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum InitialThreshold {
    /// Value of one uniformly random assignment, at no rotation cost.
    FromRandomSample,
    Fixed(i64),
}

#[derive(Debug, Clone, PartialEq)]
pub struct GasConfig {
    /// Multiplicative growth of the rotation bound after a failed step.
    pub growth: f64,
    pub max_total_rotations: u64,
    pub seed: u64,
    pub backend: Backend,
    pub initial_threshold: InitialThreshold,
}

impl Default for GasConfig {
    fn default() -> Self {
        Self {
            growth: 8.0 / 7.0,
            max_total_rotations: 10_000,
            seed: 0,
            backend: Backend::Analytic,
            initial_threshold: InitialThreshold::FromRandomSample,
        }
    }
}

impl GasConfig {
    fn validate(&self) -> Result<()> {
        if !(self.growth > 1.0 && self.growth.is_finite()) {
            return Err(Error::InvalidConfig(format!(
                "growth factor must exceed 1, got {}",
                self.growth
            )));
        }
        if self.max_total_rotations == 0 {
            return Err(Error::InvalidConfig("rotation budget must be positive".into()));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GasStep {
    /// Grover rotations spent so far, this step included.
    pub cumulative_rotations: u64,
    /// Rotations applied before this measurement.
    pub rotations: u64,
    /// Threshold after this step.
    pub threshold: i64,
    pub x: u64,
    pub value: i64,
    pub accepted: bool,
    /// Applications of `A_y` or its adjoint so far: `Σ (2L + 1)`.
    pub state_preparations: u64,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GasTrace {
    pub steps: Vec<GasStep>,
    /// Rotations spent when the threshold first reached the optimum.
    pub converged_at: Option<u64>,
    pub optimum: i64,
}

impl GasTrace {
    pub fn final_threshold(&self) -> Option<i64> {
        self.steps.last().map(|s| s.threshold)
    }

    /// `(cumulative rotations, threshold)` per step with thresholds rescaled
    /// to `[0, 1]`.
    pub fn normalized(&self, min: i64, max: i64) -> Vec<(u64, f64)> {
        self.steps
            .iter()
            .map(|s| (s.cumulative_rotations, normalize_objective(s.threshold, min, max)))
            .collect()
    }
}

/// `(v - min) / (max - min)`, or 0 when the range is degenerate.
pub fn normalize_objective(value: i64, min: i64, max: i64) -> f64 {
    if max == min {
        0.0
    } else {
        (value - min) as f64 / (max - min) as f64
    }
}

/// Probability of measuring a marked state after `l` rotations when `t` of
/// `n` states are marked.
pub fn marked_probability(n: u64, t: u64, l: u64) -> f64 {
    if t == 0 {
        return 0.0;
    }
    if t >= n {
        return 1.0;
    }
    let theta = ((t as f64) / (n as f64)).sqrt().asin();
    ((2 * l + 1) as f64 * theta).sin().powi(2)
}

/// Whether a measurement after `l` rotations lands in the marked set.
pub fn analytic_sample<R: Rng + ?Sized>(n: u64, t: u64, l: u64, rng: &mut R) -> bool {
    if t == 0 {
        return false;
    }
    if t >= n {
        return true;
    }
    rng.gen::<f64>() < marked_probability(n, t, l)
}

type DistCache = Mutex<HashMap<i64, Arc<Vec<Vec<f64>>>>>;

/// Objective table and samplers for one polynomial.
pub struct GasProblem {
    poly: ScheduledPolynomial,
    values: Vec<i64>,
    /// Assignments sorted by `(value, index)`.
    order: Vec<u32>,
    sorted_values: Vec<i64>,
    register: usize,
    cache: DistCache,
}

impl GasProblem {
    pub fn new(poly: ScheduledPolynomial) -> Result<Self> {
        let n = poly.polynomial().num_vars();
        if n > DEFAULT_ENUMERATION_CAP {
            return Err(Error::EnumerationCap {
                num_vars: n,
                cap: DEFAULT_ENUMERATION_CAP,
            });
        }
        let compiled = poly.polynomial().compile()?;
        let values: Vec<i64> = (0..1u64 << n).into_par_iter().map(|x| compiled.eval(x)).collect();
        let mut order: Vec<u32> = (0..values.len() as u32).collect();
        order.par_sort_unstable_by_key(|&x| (values[x as usize], x));
        let sorted_values: Vec<i64> = order.iter().map(|&x| values[x as usize]).collect();
        let (min, max) = (sorted_values[0], *sorted_values.last().unwrap());
        // every threshold is a value of E, so E - y stays within ±(max - min)
        let spread = max - min;
        let register = value_register_width(-spread, spread);
        Ok(Self {
            poly,
            values,
            order,
            sorted_values,
            register,
            cache: Mutex::new(HashMap::new()),
        })
    }

    pub fn from_formulation(form: &Formulation) -> Result<Self> {
        Self::new(form.circuit_polynomial()?)
    }

    pub fn num_vars(&self) -> usize {
        self.poly.polynomial().num_vars()
    }

    pub fn search_space(&self) -> u64 {
        self.values.len() as u64
    }

    pub fn value(&self, x: u64) -> i64 {
        self.values[x as usize]
    }

    pub fn min(&self) -> i64 {
        self.sorted_values[0]
    }

    pub fn max(&self) -> i64 {
        *self.sorted_values.last().unwrap()
    }

    /// Value-register width used by the statevector backend.
    pub fn register_width(&self) -> usize {
        self.register
    }

    /// Number of assignments with `E(x) < y`.
    pub fn marked_count(&self, y: i64) -> u64 {
        self.sorted_values.partition_point(|&v| v < y) as u64
    }

    /// Exact measurement distribution after `l` rotations at threshold `y`.
    pub fn analytic_distribution(&self, y: i64, l: u64) -> Vec<f64> {
        let n = self.search_space();
        let t = self.marked_count(y);
        let p = marked_probability(n, t, l);
        let mut dist = vec![0.0; n as usize];
        for (rank, &x) in self.order.iter().enumerate() {
            dist[x as usize] = if (rank as u64) < t {
                p / t as f64
            } else {
                (1.0 - p) / (n - t) as f64
            };
        }
        dist
    }

    pub fn sample_analytic<R: Rng + ?Sized>(&self, y: i64, l: u64, rng: &mut R) -> u64 {
        let n = self.search_space();
        let t = self.marked_count(y);
        let rank = if analytic_sample(n, t, l, rng) {
            rng.gen_range(0..t)
        } else {
            rng.gen_range(t..n)
        };
        self.order[rank as usize] as u64
    }

    /// Key distributions after `0..=max_l` rotations at threshold `y`,
    /// simulated once per threshold and cached.
    pub fn statevector_distributions(&self, y: i64, max_l: u64) -> Result<Arc<Vec<Vec<f64>>>> {
        if let Some(d) = self.cache.lock().unwrap().get(&y) {
            if d.len() as u64 > max_l {
                return Ok(d.clone());
            }
        }
        let n = self.num_vars();
        let qubits = n + self.register;
        if qubits > DEFAULT_QUBIT_CAP {
            return Err(Error::SimulationCap {
                qubits,
                cap: DEFAULT_QUBIT_CAP,
            });
        }
        let circ = synthesize_unchecked(&self.poly, y, self.register)?;
        let mut state = StateVector::zero(n, self.register)?;
        state.apply(&circ)?;
        let mut dists = vec![state.key_probabilities()];
        for _ in 0..max_l {
            state.grover_step(&circ)?;
            dists.push(state.key_probabilities());
        }
        let dists = Arc::new(dists);
        self.cache.lock().unwrap().insert(y, dists.clone());
        Ok(dists)
    }

    pub fn sample_statevector<R: Rng + ?Sized>(&self, y: i64, l: u64, rng: &mut R) -> Result<u64> {
        let bound = self.max_rotations().max(l);
        let dists = self.statevector_distributions(y, bound)?;
        Ok(sample_index(&dists[l as usize], rng))
    }

    /// Largest `L` the schedule can draw: `⌈√N⌉ - 1`.
    pub fn max_rotations(&self) -> u64 {
        ((self.search_space() as f64).sqrt().ceil() as u64).saturating_sub(1)
    }

    fn sample<R: Rng + ?Sized>(&self, backend: Backend, y: i64, l: u64, rng: &mut R) -> Result<u64> {
        match backend {
            Backend::Analytic => Ok(self.sample_analytic(y, l, rng)),
            Backend::Statevector => self.sample_statevector(y, l, rng),
        }
    }

    /// One adaptive search run driven by `rng`.
    pub fn run_with_rng<R: Rng + ?Sized>(&self, cfg: &GasConfig, rng: &mut R) -> Result<GasTrace> {
        cfg.validate()?;
        let optimum = self.min();
        let n = self.search_space();
        let k_cap = (n as f64).sqrt();
        let mut steps = Vec::new();
        let mut y = match cfg.initial_threshold {
            InitialThreshold::FromRandomSample => {
                let x = rng.gen_range(0..n);
                let v = self.value(x);
                steps.push(GasStep {
                    cumulative_rotations: 0,
                    rotations: 0,
                    threshold: v,
                    x,
                    value: v,
                    accepted: true,
                    state_preparations: 0,
                });
                v
            }
            InitialThreshold::Fixed(y0) => y0,
        };
        if y == optimum {
            return Ok(GasTrace {
                steps,
                converged_at: Some(0),
                optimum,
            });
        }
        let mut k = 1.0f64;
        let mut cum = 0u64;
        let mut preps = 0u64;
        let mut converged_at = None;
        loop {
            let l = rng.gen_range(0..k.ceil() as u64);
            if cum + l > cfg.max_total_rotations {
                break;
            }
            cum += l;
            preps += 2 * l + 1;
            let x = self.sample(cfg.backend, y, l, rng)?;
            let v = self.value(x);
            let accepted = v < y;
            if accepted {
                y = v;
                k = 1.0;
            } else {
                k = (k * cfg.growth).min(k_cap);
            }
            steps.push(GasStep {
                cumulative_rotations: cum,
                rotations: l,
                threshold: y,
                x,
                value: v,
                accepted,
                state_preparations: preps,
            });
            if y == optimum {
                converged_at = Some(cum);
                break;
            }
        }
        Ok(GasTrace {
            steps,
            converged_at,
            optimum,
        })
    }

    /// Independent runs in parallel; trial `i` draws from stream `i` of the seed.
    pub fn run_trials(&self, cfg: &GasConfig, trials: usize) -> Result<Vec<GasTrace>> {
        (0..trials)
            .into_par_iter()
            .map(|i| {
                let mut rng = trial_rng(cfg.seed, i as u64);
                self.run_with_rng(cfg, &mut rng)
            })
            .collect()
    }
}

pub fn trial_rng(seed: u64, trial: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(trial);
    rng
}

/// Single run of adaptive search on a formulation.
pub fn run(form: &Formulation, cfg: &GasConfig) -> Result<GasTrace> {
    let problem = GasProblem::from_formulation(form)?;
    problem.run_with_rng(cfg, &mut trial_rng(cfg.seed, 0))
}

/// Empirical CDF of rotations-to-optimum: `(r, fraction converged by r)` at
/// 0 and at every distinct convergence point.
pub fn success_cdf(traces: &[GasTrace]) -> Vec<(u64, f64)> {
    if traces.is_empty() {
        return vec![(0, 0.0)];
    }
    let total = traces.len() as f64;
    let mut hits: Vec<u64> = traces.iter().filter_map(|t| t.converged_at).collect();
    hits.sort_unstable();
    let mut cdf = vec![(0, hits.iter().filter(|&&h| h == 0).count() as f64 / total)];
    for (i, &h) in hits.iter().enumerate() {
        if h == 0 {
            continue;
        }
        let frac = (i + 1) as f64 / total;
        match cdf.last_mut() {
            Some(last) if last.0 == h => last.1 = frac,
            _ => cdf.push((h, frac)),
        }
    }
    cdf
}

/// Value of a step CDF at `r`.
pub fn cdf_at(cdf: &[(u64, f64)], r: u64) -> f64 {
    match cdf.partition_point(|&(x, _)| x <= r) {
        0 => 0.0,
        i => cdf[i - 1].1,
    }
}

/// Whether `a` lies on or above `b` everywhere (first-order dominance in
/// rotations-to-optimum).
pub fn cdf_dominates(a: &[(u64, f64)], b: &[(u64, f64)]) -> bool {
    a.iter()
        .chain(b)
        .all(|&(r, _)| cdf_at(a, r) + 1e-12 >= cdf_at(b, r))
}

/// Median rotations-to-optimum, `None` when fewer than half converged.
pub fn median_rotations(traces: &[GasTrace]) -> Option<u64> {
    let cdf = success_cdf(traces);
    cdf.iter().find(|&&(_, f)| f >= 0.5).map(|&(r, _)| r)
}
