//! Objective builders for graph coloring and the traveling salesman problem,
//! plus exhaustive solvers and decoders used as verification oracles.

mod gcp;
mod tsp;

use std::fmt;
use std::str::FromStr;

use rayon::prelude::*;

use crate::boolpoly::{
    index_to_bits, Literal, Polynomial, PolynomialBuilder, ScheduledPolynomial, VarId,
    DEFAULT_ENUMERATION_CAP,
};
use crate::encoding::{CodeKind, IndexCode};
use crate::error::{Error, Result};

pub use gcp::{gcp_hubo, gcp_hubo_or, gcp_hubo_or_with, gcp_qubo, GcpInstance, GcpPenalties, OrOptions};
pub use tsp::{tsp_hubo, tsp_qubo, TspInstance, TspPenalties};

/// Formulation strategy.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Strategy {
    /// One-hot QUBO.
    Qubo,
    /// Binary encoding, ascending assignment, expanded terms.
    Asc,
    /// Binary encoding, descending assignment, expanded terms.
    Dsc,
    /// Gray-coded binary encoding with factored terms mapped directly to gates.
    Pf,
    /// Even-weight codewords with one extra bit per index.
    Or,
}

impl Strategy {
    pub const ALL: [Strategy; 5] = [
        Strategy::Qubo,
        Strategy::Asc,
        Strategy::Dsc,
        Strategy::Pf,
        Strategy::Or,
    ];

    pub fn code_kind(self) -> CodeKind {
        match self {
            Strategy::Qubo => CodeKind::OneHot,
            Strategy::Asc => CodeKind::Asc,
            Strategy::Dsc => CodeKind::Dsc,
            Strategy::Pf => CodeKind::GrayPf,
            Strategy::Or => CodeKind::EvenOr,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Strategy::Qubo => "qubo",
            Strategy::Asc => "asc",
            Strategy::Dsc => "dsc",
            Strategy::Pf => "pf",
            Strategy::Or => "or",
        }
    }
}

impl fmt::Display for Strategy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Strategy {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Strategy::ALL
            .into_iter()
            .find(|st| st.name().eq_ignore_ascii_case(s))
            .ok_or_else(|| Error::InvalidConfig(format!("unknown strategy `{s}`")))
    }
}

/// Entity-major variable layout: bit `r` of entity `e` is variable `e·bits + r`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct VarLayout {
    pub entities: usize,
    pub bits: usize,
}

impl VarLayout {
    pub fn var(&self, entity: usize, bit: usize) -> VarId {
        debug_assert!(entity < self.entities && bit < self.bits);
        VarId((entity * self.bits + bit) as u32)
    }

    pub fn vars(&self, entity: usize) -> Vec<VarId> {
        (0..self.bits).map(|r| self.var(entity, r)).collect()
    }

    pub fn num_vars(&self) -> usize {
        self.entities * self.bits
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Problem {
    Gcp(GcpInstance),
    Tsp(TspInstance),
}

/// An objective polynomial together with the code and layout that produced it.
#[derive(Debug, Clone)]
pub struct Formulation {
    problem: Problem,
    strategy: Strategy,
    scheduled: ScheduledPolynomial,
    code: IndexCode,
    layout: VarLayout,
    factored_circuit: bool,
}

impl Formulation {
    pub fn problem(&self) -> &Problem {
        &self.problem
    }

    pub fn strategy(&self) -> Strategy {
        self.strategy
    }

    /// The objective as built, in factored form where the builder produced one.
    pub fn polynomial(&self) -> &Polynomial {
        self.scheduled.polynomial()
    }

    pub fn scheduled(&self) -> &ScheduledPolynomial {
        &self.scheduled
    }

    pub fn code(&self) -> &IndexCode {
        &self.code
    }

    pub fn layout(&self) -> VarLayout {
        self.layout
    }

    pub fn num_vars(&self) -> usize {
        self.layout.num_vars()
    }

    /// Whether circuits map the factored terms directly to gates.
    pub fn maps_factored_terms(&self) -> bool {
        self.factored_circuit
    }

    /// The polynomial that circuit synthesis consumes: the factored schedule
    /// for the factorization strategy, the expanded monomials otherwise.
    pub fn circuit_polynomial(&self) -> Result<ScheduledPolynomial> {
        if self.factored_circuit {
            Ok(self.scheduled.clone())
        } else {
            self.scheduled.expand()
        }
    }

    pub fn evaluate(&self, assignment: &[bool]) -> Result<i64> {
        self.polynomial().evaluate(assignment)
    }

    /// Exhaustive minimum; ties go to the smallest assignment index.
    pub fn brute_force_min(&self) -> Result<(u64, i64)> {
        brute_force_min(self.polynomial())
    }

    /// Reads each entity's bits back into a 1-based index.
    pub fn decode(&self, assignment: &[bool]) -> Result<Decoded> {
        if assignment.len() != self.num_vars() {
            return Err(Error::LengthMismatch {
                expected: self.num_vars(),
                got: assignment.len(),
            });
        }
        let entities = (0..self.layout.entities)
            .map(|e| {
                let bits: Vec<bool> = (0..self.layout.bits)
                    .map(|r| assignment[self.layout.var(e, r).index()])
                    .collect();
                decode_entity(&self.code, &bits)
            })
            .collect();
        Ok(Decoded { entities })
    }

    /// Assignment that writes 1-based `indices[e]` into entity `e`.
    pub fn encode(&self, indices: &[usize]) -> Result<Vec<bool>> {
        if indices.len() != self.layout.entities {
            return Err(Error::LengthMismatch {
                expected: self.layout.entities,
                got: indices.len(),
            });
        }
        let mut bits = vec![false; self.num_vars()];
        for (e, &i) in indices.iter().enumerate() {
            if i == 0 || i > self.code.num_indices() {
                return Err(Error::IndexOutOfRange {
                    index: i,
                    max: self.code.num_indices(),
                });
            }
            let word = self.code.codeword(i)?;
            for (r, &b) in word.bits().iter().enumerate() {
                bits[self.layout.var(e, r).index()] = b;
            }
        }
        Ok(bits)
    }

    /// Decodes and checks the result is a feasible domain solution: a full
    /// coloring, or a tour (order → city) for the salesman problem.
    pub fn decode_solution(&self, assignment: &[bool]) -> Result<Option<Vec<usize>>> {
        let decoded = self.decode(assignment)?;
        let Some(indices) = decoded.indices() else {
            return Ok(None);
        };
        Ok(match &self.problem {
            Problem::Gcp(_) => Some(indices),
            Problem::Tsp(_) => tour_from_positions(&indices),
        })
    }
}

/// Why an entity's bits do not name a valid index.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum InvalidEntity {
    NotOneHot,
    UnusedCodeword,
    OddParity,
}

impl fmt::Display for InvalidEntity {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            InvalidEntity::NotOneHot => "invalid (not one-hot)",
            InvalidEntity::UnusedCodeword => "invalid (unused codeword)",
            InvalidEntity::OddParity => "invalid (odd parity)",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Decoded {
    /// Per entity, the 1-based index or the reason it is invalid.
    pub entities: Vec<std::result::Result<usize, InvalidEntity>>,
}

impl Decoded {
    pub fn indices(&self) -> Option<Vec<usize>> {
        self.entities.iter().map(|e| e.ok()).collect()
    }

    pub fn invalid_count(&self) -> usize {
        self.entities.iter().filter(|e| e.is_err()).count()
    }
}

fn decode_entity(code: &IndexCode, bits: &[bool]) -> std::result::Result<usize, InvalidEntity> {
    if let Some(i) = code.index_of(bits) {
        return Ok(i);
    }
    Err(match code.kind() {
        CodeKind::OneHot => InvalidEntity::NotOneHot,
        CodeKind::EvenOr if bits.iter().filter(|&&b| b).count() % 2 == 1 => InvalidEntity::OddParity,
        _ => InvalidEntity::UnusedCodeword,
    })
}

/// Turns `positions[city]` (1-based) into `order[position] = city` when it is a permutation.
pub fn tour_from_positions(positions: &[usize]) -> Option<Vec<usize>> {
    let n = positions.len();
    let mut order = vec![usize::MAX; n];
    for (city, &p) in positions.iter().enumerate() {
        if p == 0 || p > n || order[p - 1] != usize::MAX {
            return None;
        }
        order[p - 1] = city;
    }
    Some(order)
}

/// Exhaustive minimum of `poly`; ties go to the smallest assignment index.
pub fn brute_force_min(poly: &Polynomial) -> Result<(u64, i64)> {
    brute_force_min_with_cap(poly, DEFAULT_ENUMERATION_CAP)
}

pub fn brute_force_min_with_cap(poly: &Polynomial, cap: usize) -> Result<(u64, i64)> {
    let n = poly.num_vars();
    if n > cap || n > 63 {
        return Err(Error::EnumerationCap {
            num_vars: n,
            cap: cap.min(63),
        });
    }
    let compiled = poly.compile()?;
    let (value, x) = (0..1u64 << n)
        .into_par_iter()
        .map(|x| (compiled.eval(x), x))
        .min()
        .expect("at least one assignment");
    Ok((x, value))
}

/// Convenience for tests and the CLI.
pub fn assignment_bits(x: u64, n: usize) -> Vec<bool> {
    index_to_bits(x, n)
}

/// Adds `coefficient · (1 - Σ_k t_k)²` where each `t_k` is a product of
/// literals, multiplying factors out with `x·x = x` and `x·(1-x) = 0`.
pub(crate) fn add_scaled_square_deficit(
    b: &mut PolynomialBuilder,
    coefficient: i64,
    factors: &[Vec<Literal>],
) -> Result<()> {
    let twice = coefficient
        .checked_mul(2)
        .ok_or(Error::Overflow("building a penalty"))?;
    b.add_constant(coefficient);
    for f in factors {
        b.add_product(-twice, f.clone());
    }
    for f in factors {
        for g in factors {
            let mut lits = f.clone();
            lits.extend_from_slice(g);
            b.add_product(coefficient, lits);
        }
    }
    Ok(())
}
