//! Gate-level state preparation `A_y` for Grover adaptive search.
//!
//! Qubits `0..n` are the key register (qubit `j` carries `x_j`); qubits
//! `n..n+m` are the value register, with `n` its most significant (sign) bit.
//! Each polynomial term becomes one controlled geometric phase block on the
//! value register, sandwiched by X gates on the qubits of negated literals.

use std::collections::{BTreeMap, BTreeSet};
use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;

use crate::boolpoly::{
    value_register_width, FactoredTerm, Polynomial, ScheduledPolynomial, DEFAULT_ENUMERATION_CAP,
};
use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Gate {
    Hadamard(usize),
    PauliX(usize),
    /// Controlled `R(2^(m-1)θ) ⊗ … ⊗ R(θ)` with `θ = 2π·coefficient / 2^m`.
    PhaseBlock { controls: Vec<usize>, coefficient: i64 },
    InverseQft,
    /// Z on the sign qubit.
    SignFlipZ,
}

impl Gate {
    /// Whether the gate touches key qubit `q`.
    fn touches_key(&self, q: usize) -> bool {
        match self {
            Gate::Hadamard(h) | Gate::PauliX(h) => *h == q,
            Gate::PhaseBlock { controls, .. } => controls.contains(&q),
            Gate::InverseQft | Gate::SignFlipZ => false,
        }
    }
}

/// Rotation angle `θ = 2π a / 2^m` of a phase block.
pub fn block_angle(coefficient: i64, m: usize) -> f64 {
    2.0 * PI * coefficient as f64 / (1u64 << m) as f64
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Circuit {
    num_key: usize,
    num_value: usize,
    gates: Vec<Gate>,
}

impl Circuit {
    pub fn new(num_key: usize, num_value: usize, gates: Vec<Gate>) -> Result<Self> {
        if num_value == 0 {
            return Err(Error::InvalidConfig("value register needs at least one qubit".into()));
        }
        let total = num_key + num_value;
        for g in &gates {
            let ok = match g {
                Gate::Hadamard(q) => *q < total,
                Gate::PauliX(q) => *q < total,
                Gate::PhaseBlock { controls, .. } => {
                    let distinct: BTreeSet<_> = controls.iter().collect();
                    distinct.len() == controls.len() && controls.iter().all(|&c| c < num_key)
                }
                Gate::InverseQft | Gate::SignFlipZ => true,
            };
            if !ok {
                return Err(Error::InvalidConfig(format!("gate {g} does not fit the registers")));
            }
        }
        Ok(Self {
            num_key,
            num_value,
            gates,
        })
    }

    pub fn num_key(&self) -> usize {
        self.num_key
    }

    pub fn num_value(&self) -> usize {
        self.num_value
    }

    pub fn num_qubits(&self) -> usize {
        self.num_key + self.num_value
    }

    pub fn gates(&self) -> &[Gate] {
        &self.gates
    }

    pub fn x_count(&self) -> usize {
        self.gates.iter().filter(|g| matches!(g, Gate::PauliX(_))).count()
    }

    pub fn phase_blocks(&self) -> impl Iterator<Item = (&[usize], i64)> {
        self.gates.iter().filter_map(|g| match g {
            Gate::PhaseBlock {
                controls,
                coefficient,
            } => Some((controls.as_slice(), *coefficient)),
            _ => None,
        })
    }

    /// The same circuit without the Hadamards on the key register: maps the
    /// basis state `|x⟩|0⟩` to `|x⟩|E(x) - y⟩`.
    pub fn oracle_part(&self) -> Circuit {
        let gates = self
            .gates
            .iter()
            .filter(|g| !matches!(g, Gate::Hadamard(q) if *q < self.num_key))
            .cloned()
            .collect();
        Circuit {
            gates,
            ..self.clone()
        }
    }

    /// Text dump, one gate per line.
    pub fn dump(&self) -> String {
        self.to_string()
    }
}

impl fmt::Display for Gate {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Gate::Hadamard(q) => write!(f, "H q{q}"),
            Gate::PauliX(q) => write!(f, "X q{q}"),
            Gate::PhaseBlock {
                controls,
                coefficient,
            } => {
                let c: Vec<String> = controls.iter().map(|c| c.to_string()).collect();
                write!(f, "CPHASE a={coefficient} ctrl={}", c.join(","))
            }
            Gate::InverseQft => f.write_str("IQFT"),
            Gate::SignFlipZ => f.write_str("Z-sign"),
        }
    }
}

impl fmt::Display for Circuit {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "circuit n={} m={}", self.num_key, self.num_value)?;
        for g in &self.gates {
            writeln!(f, "{g}")?;
        }
        Ok(())
    }
}

impl FromStr for Circuit {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let mut header = None;
        let mut gates = Vec::new();
        for (i, raw) in s.lines().enumerate() {
            let line = i + 1;
            let l = raw.split('#').next().unwrap_or("").trim();
            if l.is_empty() {
                continue;
            }
            let err = |msg: &str| Error::Parse {
                line,
                msg: format!("{msg}: `{l}`"),
            };
            let qubit = |w: Option<&str>| -> Result<usize> {
                w.and_then(|w| w.strip_prefix('q'))
                    .and_then(|w| w.parse().ok())
                    .ok_or_else(|| err("expected a qubit like q3"))
            };
            let mut words = l.split_whitespace();
            match words.next() {
                Some("circuit") => {
                    let mut n = None;
                    let mut m = None;
                    for w in words {
                        if let Some(v) = w.strip_prefix("n=") {
                            n = v.parse().ok();
                        } else if let Some(v) = w.strip_prefix("m=") {
                            m = v.parse().ok();
                        }
                    }
                    header = Some((
                        n.ok_or_else(|| err("missing n="))?,
                        m.ok_or_else(|| err("missing m="))?,
                    ));
                }
                Some("H") => gates.push(Gate::Hadamard(qubit(words.next())?)),
                Some("X") => gates.push(Gate::PauliX(qubit(words.next())?)),
                Some("IQFT") => gates.push(Gate::InverseQft),
                Some("Z-sign") => gates.push(Gate::SignFlipZ),
                Some("CPHASE") => {
                    let mut a = None;
                    let mut controls = None;
                    for w in words {
                        if let Some(v) = w.strip_prefix("a=") {
                            a = Some(v.parse().map_err(|_| err("bad coefficient"))?);
                        } else if let Some(v) = w.strip_prefix("ctrl=") {
                            let c: Vec<usize> = v
                                .split(',')
                                .filter(|t| !t.is_empty())
                                .map(|t| t.parse())
                                .collect::<std::result::Result<_, _>>()
                                .map_err(|_| err("bad control list"))?;
                            controls = Some(c);
                        }
                    }
                    gates.push(Gate::PhaseBlock {
                        controls: controls.unwrap_or_default(),
                        coefficient: a.ok_or_else(|| err("missing a="))?,
                    });
                }
                _ => return Err(err("unknown gate")),
            }
        }
        let (n, m) = header.ok_or(Error::Parse {
            line: 0,
            msg: "missing `circuit n=.. m=..` header".into(),
        })?;
        Circuit::new(n, m, gates)
    }
}

/// Bounds of `poly - y`, exhaustive when small enough, otherwise from the
/// per-term interval estimate.
fn shifted_bounds(poly: &Polynomial, y: i64) -> Result<(i64, i64)> {
    let (lo, hi) = if poly.num_vars() <= DEFAULT_ENUMERATION_CAP {
        poly.bounds()?
    } else {
        poly.interval_bounds()?
    };
    let of = || Error::Overflow("shifting the bounds");
    Ok((lo.checked_sub(y).ok_or_else(of)?, hi.checked_sub(y).ok_or_else(of)?))
}

/// `A_y` for `poly`, one X sandwich per term in canonical order.
pub fn synthesize_ay(poly: &Polynomial, y: i64, m: usize) -> Result<Circuit> {
    synthesize_scheduled(&ScheduledPolynomial::canonical(poly.clone()), y, m)
}

/// `A_y` following the emission schedule, after checking that `m` qubits hold
/// every value of `E(x) - y` in two's complement.
pub fn synthesize_scheduled(poly: &ScheduledPolynomial, y: i64, m: usize) -> Result<Circuit> {
    let (min, max) = shifted_bounds(poly.polynomial(), y)?;
    let needed = value_register_width(min, max);
    if m < needed {
        return Err(Error::RegisterTooSmall { m, needed, min, max });
    }
    synthesize_unchecked(poly, y, m)
}

/// `A_y` with the register width computed from the polynomial.
pub fn synthesize_auto(poly: &ScheduledPolynomial, y: i64) -> Result<Circuit> {
    let (min, max) = shifted_bounds(poly.polynomial(), y)?;
    synthesize_unchecked(poly, y, value_register_width(min, max))
}

/// `A_y` without the width check. Values outside the register wrap modulo
/// `2^m`; meant for gate counting at sizes too large to bound exhaustively.
pub fn synthesize_unchecked(poly: &ScheduledPolynomial, y: i64, m: usize) -> Result<Circuit> {
    let p = poly.polynomial();
    let n = p.num_vars();
    let mut gates: Vec<Gate> = (0..n + m).map(Gate::Hadamard).collect();
    for group in poly.schedule() {
        for run in consistent_runs(group, p.terms()) {
            let negated: BTreeSet<usize> = run
                .iter()
                .flat_map(|&t| p.terms()[t].literals())
                .filter(|l| l.is_negated())
                .map(|l| l.var.index())
                .collect();
            gates.extend(negated.iter().map(|&q| Gate::PauliX(q)));
            for &t in &run {
                let term = &p.terms()[t];
                gates.push(Gate::PhaseBlock {
                    controls: term.literals().iter().map(|l| l.var.index()).collect(),
                    coefficient: term.coefficient(),
                });
            }
            gates.extend(negated.iter().map(|&q| Gate::PauliX(q)));
        }
    }
    let constant = p
        .constant()
        .checked_sub(y)
        .ok_or(Error::Overflow("shifting the constant"))?;
    if constant != 0 {
        gates.push(Gate::PhaseBlock {
            controls: Vec::new(),
            coefficient: constant,
        });
    }
    gates.push(Gate::InverseQft);
    Circuit::new(n, m, gates)
}

/// Splits a group into consecutive runs in which no qubit appears both
/// negated and plain, so one X sandwich serves the whole run.
fn consistent_runs(group: &[usize], terms: &[FactoredTerm]) -> Vec<Vec<usize>> {
    let mut runs: Vec<Vec<usize>> = Vec::new();
    let mut polarity: BTreeMap<usize, bool> = BTreeMap::new();
    for &t in group {
        let lits = terms[t].literals();
        let clash = lits
            .iter()
            .any(|l| polarity.get(&l.var.index()).is_some_and(|&neg| neg != l.is_negated()));
        if clash || runs.is_empty() {
            runs.push(Vec::new());
            polarity.clear();
        }
        for l in lits {
            polarity.insert(l.var.index(), l.is_negated());
        }
        runs.last_mut().unwrap().push(t);
    }
    runs
}

/// Removes pairs of X gates on one qubit with nothing touching that qubit in
/// between, repeating until no pair is left.
pub fn cancel_x(circ: &Circuit) -> Circuit {
    let mut gates = circ.gates.clone();
    loop {
        let mut removed = vec![false; gates.len()];
        let mut pending: Vec<Option<usize>> = vec![None; circ.num_qubits()];
        let mut any = false;
        for (i, g) in gates.iter().enumerate() {
            if let Gate::PauliX(q) = g {
                match pending[*q].take() {
                    Some(j) => {
                        removed[i] = true;
                        removed[j] = true;
                        any = true;
                    }
                    None => pending[*q] = Some(i),
                }
                continue;
            }
            for (q, p) in pending.iter_mut().enumerate() {
                let touched = if q < circ.num_key {
                    g.touches_key(q)
                } else {
                    match g {
                        Gate::Hadamard(h) => *h == q,
                        _ => true,
                    }
                };
                if touched {
                    *p = None;
                }
            }
        }
        if !any {
            break;
        }
        gates = gates
            .into_iter()
            .zip(removed)
            .filter(|(_, r)| !r)
            .map(|(g, _)| g)
            .collect();
    }
    Circuit {
        gates,
        ..circ.clone()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Decomposition {
    /// `14(k-1)` T gates per `C^kR`.
    Toffoli,
    /// Relative-phase Toffolis, `8(k-1)` T gates per `C^kR`.
    Rtof,
}

impl Decomposition {
    pub fn t_per_gate(self, k: usize) -> u64 {
        if k < 2 {
            return 0;
        }
        let per = match self {
            Decomposition::Toffoli => 14,
            Decomposition::Rtof => 8,
        };
        per * (k as u64 - 1)
    }
}

impl FromStr for Decomposition {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "toffoli" => Ok(Decomposition::Toffoli),
            "rtof" => Ok(Decomposition::Rtof),
            _ => Err(Error::InvalidConfig(format!("unknown decomposition `{s}`"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ResourceReport {
    pub n: usize,
    pub m: usize,
    pub ancilla: usize,
    pub h_count: u64,
    pub x_count: u64,
    /// `k → number of C^kR gates`; every phase block adds `m` gates.
    pub ckr_histogram: BTreeMap<usize, u64>,
    pub t_count_toffoli: u64,
    pub t_count_rtof: u64,
}

impl ResourceReport {
    pub fn t_count(&self, d: Decomposition) -> u64 {
        match d {
            Decomposition::Toffoli => self.t_count_toffoli,
            Decomposition::Rtof => self.t_count_rtof,
        }
    }

    pub fn total_qubits(&self) -> usize {
        self.n + self.m
    }

    pub fn ckr(&self, k: usize) -> u64 {
        self.ckr_histogram.get(&k).copied().unwrap_or(0)
    }

    /// Controlled rotations with at least one control.
    pub fn controlled_rotations(&self) -> u64 {
        self.ckr_histogram.range(1..).map(|(_, c)| c).sum()
    }
}

pub fn histogram_t_count(hist: &BTreeMap<usize, u64>, d: Decomposition) -> u64 {
    hist.iter().map(|(&k, &c)| c * d.t_per_gate(k)).sum()
}

/// Tallies H, X and `C^kR` gates. The Fourier transform and the sign flip
/// are not counted.
pub fn count_resources(circ: &Circuit) -> ResourceReport {
    let mut h = 0;
    let mut x = 0;
    let mut hist: BTreeMap<usize, u64> = BTreeMap::new();
    let mut ancilla = 0;
    for g in &circ.gates {
        match g {
            Gate::Hadamard(_) => h += 1,
            Gate::PauliX(_) => x += 1,
            Gate::PhaseBlock { controls, .. } => {
                let k = controls.len();
                *hist.entry(k).or_default() += circ.num_value as u64;
                ancilla = ancilla.max(k.saturating_sub(1));
            }
            Gate::InverseQft | Gate::SignFlipZ => {}
        }
    }
    ResourceReport {
        n: circ.num_key,
        m: circ.num_value,
        ancilla,
        h_count: h,
        x_count: x,
        t_count_toffoli: histogram_t_count(&hist, Decomposition::Toffoli),
        t_count_rtof: histogram_t_count(&hist, Decomposition::Rtof),
        ckr_histogram: hist,
    }
}
