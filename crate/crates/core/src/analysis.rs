//! Closed-form qubit and gate counts for the coloring formulations, checked
//! against circuits actually synthesized from the polynomials.

use std::collections::BTreeMap;

use crate::boolpoly::value_register_width;
use crate::circuit::{
    cancel_x, count_resources, histogram_t_count, synthesize_unchecked, Decomposition,
    ResourceReport,
};
use crate::encoding::ceil_log2;
use crate::error::{Error, Result};
use crate::problems::{gcp_hubo, gcp_hubo_or, gcp_qubo, Formulation, GcpInstance, Strategy};

/// Instance parameters the closed forms depend on.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct StrategyParams {
    pub v: usize,
    pub i: usize,
    pub e: usize,
    pub degrees: Vec<usize>,
    /// Weight of the one-color-per-vertex penalty in the one-hot objective.
    pub lambda: i64,
}

impl StrategyParams {
    pub fn from_instance(inst: &GcpInstance) -> Self {
        Self {
            v: inst.num_vertices(),
            i: inst.num_colors(),
            e: inst.edges().len(),
            degrees: inst.degrees(),
            lambda: inst.penalties.qubo,
        }
    }

    /// Bits per color, binary encodings.
    pub fn b1(&self) -> usize {
        ceil_log2(self.i)
    }

    /// Bits per color, even-weight code.
    pub fn b2(&self) -> usize {
        self.b1() + 1
    }

    fn excess_degree(&self) -> i64 {
        self.degrees.iter().map(|&d| d as i64 - 1).sum()
    }
}

/// Experiment family: circulant graph with offsets {1, 2, 3} (6-regular,
/// `E = 3V` for `V ≥ 7`) and `I = V/4` colors.
pub fn family_instance(v: usize) -> Result<GcpInstance> {
    if v < 8 || !v.is_multiple_of(4) {
        return Err(Error::InvalidConfig(format!(
            "family needs V a multiple of 4 and at least 8, got {v}"
        )));
    }
    GcpInstance::circulant(v, &[1, 2, 3], None, v / 4)
}

/// The five-vertex, four-color instance used for convergence runs: the same
/// circulant truncated to six edges (a 5-cycle with one chord).
pub fn five_four_instance() -> GcpInstance {
    GcpInstance::circulant(5, &[1, 2, 3], Some(6), 4).expect("valid instance")
}

pub fn binomial(n: usize, k: usize) -> u64 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    (0..k).fold(1u64, |acc, j| acc * (n - j) as u64 / (j + 1) as u64)
}

fn ceil_log2_i64(x: i64) -> usize {
    if x <= 1 {
        0
    } else {
        ceil_log2(x as usize)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct QubitCounts {
    pub n: usize,
    /// Value register from the closed-form maximum, sized so that
    /// `-2^(m-1) <= 0` and `max < 2^(m-1)`.
    pub m: usize,
    /// `⌈log2 max⌉`, the unsigned sizing, for comparison.
    pub m_log2_max: usize,
    pub max_value: i64,
}

impl QubitCounts {
    pub fn total(&self) -> usize {
        self.n + self.m
    }
}

/// Closed-form maximum of the objective.
pub fn closed_form_max(p: &StrategyParams, strategy: Strategy) -> i64 {
    match strategy {
        Strategy::Qubo => {
            (p.e * p.i) as i64 + p.lambda * p.v as i64 * ((p.i - 1) * (p.i - 1)) as i64
        }
        _ => p.e as i64,
    }
}

pub fn qubit_counts(p: &StrategyParams, strategy: Strategy) -> QubitCounts {
    let n = match strategy {
        Strategy::Qubo => p.v * p.i,
        Strategy::Asc | Strategy::Dsc | Strategy::Pf => p.v * p.b1(),
        Strategy::Or => p.v * p.b2(),
    };
    let max = closed_form_max(p, strategy);
    QubitCounts {
        n,
        m: value_register_width(0, max),
        m_log2_max: ceil_log2_i64(max),
        max_value: max,
    }
}

/// Which reading of an ambiguous formula to evaluate.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Reading {
    /// Shared single-vertex terms subtracted as `Σ_v (deg(v) - 1)`.
    DegreeEach,
    /// Subtracted as `(Σ_v deg(v)) - 1`.
    DegreeSum,
    /// `E_v` read as the degree of `v`.
    EvDegree,
    /// `E_v` read as the edge count `E`.
    EvEdges,
}

impl Reading {
    pub fn describe(self) -> &'static str {
        match self {
            Reading::DegreeEach => "sum over v of (deg(v) - 1)",
            Reading::DegreeSum => "(sum over v of deg(v)) - 1",
            Reading::EvDegree => "E_v = deg(v)",
            Reading::EvEdges => "E_v = E",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ClosedFormReport {
    pub strategy: Strategy,
    pub qubits: QubitCounts,
    pub h_count: u64,
    /// `k → C^kR gates` for `k ≥ 1`.
    pub ckr_histogram: BTreeMap<usize, u64>,
    pub x_count_before: u64,
    pub x_count_after: u64,
    pub ancilla: usize,
    pub t_count_toffoli: u64,
    pub t_count_rtof: u64,
}

impl ClosedFormReport {
    pub fn t_count(&self, d: Decomposition) -> u64 {
        match d {
            Decomposition::Toffoli => self.t_count_toffoli,
            Decomposition::Rtof => self.t_count_rtof,
        }
    }

    /// Number of polynomial terms, one phase block each.
    pub fn terms(&self) -> u64 {
        self.ckr_histogram.values().sum::<u64>() / self.qubits.m as u64
    }
}

/// Ancilla qubits needed by the Toffoli ladders of each strategy.
pub fn closed_form_ancilla(p: &StrategyParams, strategy: Strategy) -> usize {
    match strategy {
        Strategy::Qubo => 1,
        Strategy::Asc | Strategy::Dsc | Strategy::Pf => 2 * p.b1() - 1,
        Strategy::Or => p.b1(),
    }
}

pub fn gate_counts_closed_form(p: &StrategyParams, strategy: Strategy) -> Result<ClosedFormReport> {
    let reading = match strategy {
        Strategy::Asc => Reading::DegreeEach,
        _ => Reading::EvDegree,
    };
    gate_counts_with_reading(p, strategy, reading)
}

/// Closed-form `C^kR` histogram under an explicit reading of the ambiguous
/// terms. Binary-encoded forms assume `I` is a power of two (no unused
/// codewords).
pub fn histogram_with_reading(
    p: &StrategyParams,
    strategy: Strategy,
    reading: Reading,
) -> Result<BTreeMap<usize, u64>> {
    let m = qubit_counts(p, strategy).m as i64;
    let (v, i, e) = (p.v as i64, p.i as i64, p.e as i64);
    let mut hist = BTreeMap::new();
    let mut put = |k: usize, count: i64| {
        if count != 0 {
            hist.insert(k, count.max(0) as u64 * m as u64);
        }
    };
    match strategy {
        Strategy::Qubo => {
            put(1, v * i);
            put(2, e * i + v * binomial(p.i, 2) as i64);
        }
        Strategy::Asc => {
            let b = p.b1();
            let shared = match reading {
                Reading::DegreeSum => p.degrees.iter().sum::<usize>() as i64 - 1,
                _ => p.excess_degree(),
            };
            for k in 1..=2 * b {
                let mixed = e * binomial(2 * b, k) as i64;
                if k <= b {
                    put(k, mixed - binomial(b, k) as i64 * shared);
                } else {
                    put(k, mixed);
                }
            }
        }
        Strategy::Pf => {
            let b = p.b1();
            put(b, v * ((1i64 << b) - i));
            put(2 * b, e * i);
        }
        Strategy::Or => {
            let b = p.b2();
            let shared = match reading {
                Reading::EvEdges => v * (e - 1),
                _ => p.excess_degree(),
            };
            for k in 1..=b {
                put(
                    k,
                    (1i64 << k) * e * binomial(b, b - k) as i64 - binomial(b, k) as i64 * shared,
                );
            }
        }
        Strategy::Dsc => return Err(Error::NoClosedForm("descending binary encoding")),
    }
    Ok(hist)
}

fn gate_counts_with_reading(
    p: &StrategyParams,
    strategy: Strategy,
    reading: Reading,
) -> Result<ClosedFormReport> {
    let hist = histogram_with_reading(p, strategy, reading)?;
    let qubits = qubit_counts(p, strategy);
    let (x_before, x_after) = match strategy {
        Strategy::Pf => {
            let b = p.b1() as u64;
            let v = p.v as u64;
            ((1 << b) * v * b, (1 << b) * v)
        }
        _ => (0, 0),
    };
    Ok(ClosedFormReport {
        strategy,
        qubits,
        h_count: qubits.total() as u64,
        x_count_before: x_before,
        x_count_after: x_after,
        ancilla: closed_form_ancilla(p, strategy),
        t_count_toffoli: histogram_t_count(&hist, Decomposition::Toffoli),
        t_count_rtof: histogram_t_count(&hist, Decomposition::Rtof),
        ckr_histogram: hist,
    })
}

/// Builds the formulation a strategy uses for coloring.
pub fn formulate(inst: &GcpInstance, strategy: Strategy) -> Result<Formulation> {
    match strategy {
        Strategy::Qubo => gcp_qubo(inst),
        Strategy::Or => gcp_hubo_or(inst),
        s => gcp_hubo(inst, s),
    }
}

/// Resources of the synthesized `A_0` with the closed-form register width,
/// before and after X cancellation.
pub fn constructed_resources(inst: &GcpInstance, strategy: Strategy) -> Result<(ResourceReport, ResourceReport)> {
    let p = StrategyParams::from_instance(inst);
    let m = qubit_counts(&p, strategy).m;
    let form = formulate(inst, strategy)?;
    let circ = synthesize_unchecked(&form.circuit_polynomial()?, 0, m)?;
    Ok((count_resources(&circ), count_resources(&cancel_x(&circ))))
}

/// Number of terms of the objective as synthesized: expanded monomials, or
/// factored products for the factorization strategy.
pub fn term_count(inst: &GcpInstance, strategy: Strategy) -> Result<usize> {
    Ok(formulate(inst, strategy)?.circuit_polynomial()?.polynomial().terms().len())
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ReadingCheck {
    pub reading: Reading,
    pub matches: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ReconcileReport {
    pub strategy: Strategy,
    /// `(k, closed form, constructed)` for every `k ≥ 1` either side has.
    pub rows: Vec<(usize, Option<u64>, u64)>,
    pub h_closed: u64,
    pub h_constructed: u64,
    pub x_closed: Option<(u64, u64)>,
    pub x_constructed: (u64, u64),
    /// Outcome per candidate reading, for the strategies with an ambiguous formula.
    pub readings: Vec<ReadingCheck>,
    pub constructed: ResourceReport,
}

impl ReconcileReport {
    pub fn histogram_matches(&self) -> bool {
        self.rows.iter().all(|&(_, c, b)| c == Some(b))
    }

    pub fn matches(&self) -> bool {
        self.histogram_matches()
            && self.h_closed == self.h_constructed
            && self.x_closed.is_none_or(|x| x == self.x_constructed)
    }

    /// The single reading that reconciles, if exactly one does.
    pub fn resolved_reading(&self) -> Option<Reading> {
        let ok: Vec<_> = self.readings.iter().filter(|r| r.matches).collect();
        match ok[..] {
            [one] => Some(one.reading),
            _ => None,
        }
    }

    pub fn render(&self) -> String {
        let mut s = format!("strategy {}\n", self.strategy);
        s.push_str("k\tclosed\tconstructed\n");
        for &(k, c, b) in &self.rows {
            let c = c.map_or("-".to_string(), |c| c.to_string());
            s.push_str(&format!("{k}\t{c}\t{b}\n"));
        }
        s.push_str(&format!("H\t{}\t{}\n", self.h_closed, self.h_constructed));
        if let Some((before, after)) = self.x_closed {
            s.push_str(&format!("X\t{before}->{after}\t{}->{}\n", self.x_constructed.0, self.x_constructed.1));
        }
        for r in &self.readings {
            let verdict = if r.matches { "reconciles" } else { "does not reconcile" };
            s.push_str(&format!("reading `{}`: {verdict}\n", r.reading.describe()));
        }
        s
    }
}

fn compare_rows(closed: &BTreeMap<usize, u64>, built: &BTreeMap<usize, u64>) -> Vec<(usize, Option<u64>, u64)> {
    let mut ks: Vec<usize> = closed.keys().chain(built.keys()).copied().filter(|&k| k >= 1).collect();
    ks.sort_unstable();
    ks.dedup();
    ks.into_iter()
        .map(|k| (k, closed.get(&k).copied(), built.get(&k).copied().unwrap_or(0)))
        .collect()
}

/// Compares the closed forms with counts taken from the synthesized circuit.
pub fn reconcile(inst: &GcpInstance, strategy: Strategy) -> Result<ReconcileReport> {
    let p = StrategyParams::from_instance(inst);
    let closed = gate_counts_closed_form(&p, strategy)?;
    let (before, after) = constructed_resources(inst, strategy)?;
    let candidates: &[Reading] = match strategy {
        Strategy::Asc => &[Reading::DegreeEach, Reading::DegreeSum],
        Strategy::Or => &[Reading::EvDegree, Reading::EvEdges],
        _ => &[],
    };
    let readings = candidates
        .iter()
        .map(|&reading| {
            let hist = histogram_with_reading(&p, strategy, reading)?;
            let matches = compare_rows(&hist, &before.ckr_histogram)
                .iter()
                .all(|&(_, c, b)| c == Some(b));
            Ok(ReadingCheck { reading, matches })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(ReconcileReport {
        strategy,
        rows: compare_rows(&closed.ckr_histogram, &before.ckr_histogram),
        h_closed: closed.h_count,
        h_constructed: before.h_count,
        x_closed: (strategy == Strategy::Pf).then_some((closed.x_count_before, closed.x_count_after)),
        x_constructed: (before.x_count, after.x_count),
        readings,
        constructed: before,
    })
}

/// T gates over a whole search: per-`A_y` count × 2 (`A_y` and its adjoint
/// in each Grover operator) × `⌈√(2^n)⌉` operators.
pub fn tgate_totals(t_per_ay: u64, n: usize) -> f64 {
    t_per_ay as f64 * 2.0 * 2f64.powf(n as f64 / 2.0).ceil()
}
