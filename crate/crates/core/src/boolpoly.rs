//! Integer-coefficient multilinear polynomials over binary variables.
//!
//! A [`Polynomial`] stores its terms as products of literals, where a literal
//! is either `x` or the complemented factor `1 - x`. This factored form is the
//! primary representation: circuits for the factorization strategy map these
//! products straight onto controlled phase blocks sandwiched by X gates.
//! [`Polynomial::expand`] distributes every complemented factor and returns the
//! monomial form used by the other strategies.
//!
//! Terms are kept in a canonical order (lexicographic by variable ids, then by
//! polarities) with identical literal lists merged, so two polynomials built
//! from the same terms in any order compare equal. The order in which a
//! builder emitted its terms is kept separately in a [`ScheduledPolynomial`].

use std::cmp::Ordering;
use std::collections::{BTreeMap, HashMap};
use std::fmt;
use std::str::FromStr;

use rayon::prelude::*;

use crate::error::{Error, Result};

/// Default cap on the number of variables for exhaustive enumeration.
pub const DEFAULT_ENUMERATION_CAP: usize = 24;

/// Identifier of a binary variable `x_index`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct VarId(pub u32);

impl VarId {
    pub fn index(self) -> usize {
        self.0 as usize
    }
}

impl fmt::Display for VarId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "v{}", self.0)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Polarity {
    /// The factor `x`.
    Positive,
    /// The factor `1 - x`.
    Negated,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Literal {
    pub var: VarId,
    pub polarity: Polarity,
}

impl Literal {
    pub fn positive(var: u32) -> Self {
        Self {
            var: VarId(var),
            polarity: Polarity::Positive,
        }
    }

    pub fn negated(var: u32) -> Self {
        Self {
            var: VarId(var),
            polarity: Polarity::Negated,
        }
    }

    pub fn is_negated(&self) -> bool {
        self.polarity == Polarity::Negated
    }

    /// Value of the factor under `bit`.
    pub fn eval(&self, bit: bool) -> bool {
        match self.polarity {
            Polarity::Positive => bit,
            Polarity::Negated => !bit,
        }
    }
}

impl fmt::Display for Literal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_negated() {
            write!(f, "!{}", self.var)
        } else {
            write!(f, "{}", self.var)
        }
    }
}

/// A coefficient times a product of literals over distinct variables.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct FactoredTerm {
    coefficient: i64,
    literals: Vec<Literal>,
}

impl FactoredTerm {
    /// Builds a term, sorting literals by variable. Repeated variables are an error.
    pub fn new(coefficient: i64, mut literals: Vec<Literal>) -> Result<Self> {
        literals.sort_by_key(|l| l.var);
        if let Some(w) = literals.windows(2).find(|w| w[0].var == w[1].var) {
            return Err(Error::DuplicateVariable(w[0].var.0));
        }
        Ok(Self {
            coefficient,
            literals,
        })
    }

    /// Multiplies literals together using `x·x = x` and `x·(1-x) = 0`.
    ///
    /// Returns `None` when the product vanishes identically.
    pub fn product(coefficient: i64, mut literals: Vec<Literal>) -> Option<Self> {
        literals.sort_by_key(|l| (l.var, l.polarity));
        literals.dedup();
        if literals.windows(2).any(|w| w[0].var == w[1].var) {
            return None;
        }
        Some(Self {
            coefficient,
            literals,
        })
    }

    pub fn coefficient(&self) -> i64 {
        self.coefficient
    }

    pub fn literals(&self) -> &[Literal] {
        &self.literals
    }

    pub fn degree(&self) -> usize {
        self.literals.len()
    }

    pub fn negated_count(&self) -> usize {
        self.literals.iter().filter(|l| l.is_negated()).count()
    }

    /// Evaluates the term on a full assignment (no length checks).
    pub fn eval(&self, assignment: &[bool]) -> i64 {
        if self
            .literals
            .iter()
            .all(|l| l.eval(assignment[l.var.index()]))
        {
            self.coefficient
        } else {
            0
        }
    }

    fn canonical_cmp(&self, other: &Self) -> Ordering {
        let vars = self
            .literals
            .iter()
            .map(|l| l.var)
            .cmp(other.literals.iter().map(|l| l.var));
        vars.then_with(|| {
            self.literals
                .iter()
                .map(|l| l.polarity)
                .cmp(other.literals.iter().map(|l| l.polarity))
        })
    }
}

/// A pseudo-Boolean objective `constant + Σ coefficient · Π literals`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Polynomial {
    num_vars: usize,
    terms: Vec<FactoredTerm>,
    constant: i64,
}

impl Polynomial {
    /// Canonicalizes `terms`: sorts, merges identical literal lists and drops
    /// zero coefficients.
    pub fn new(
        num_vars: usize,
        terms: impl IntoIterator<Item = FactoredTerm>,
        constant: i64,
    ) -> Result<Self> {
        let mut terms: Vec<FactoredTerm> = terms.into_iter().collect();
        for t in &terms {
            for l in &t.literals {
                if l.var.index() >= num_vars {
                    return Err(Error::VariableOutOfRange {
                        var: l.var.0,
                        num_vars,
                    });
                }
            }
        }
        terms.sort_by(|a, b| a.canonical_cmp(b));
        let mut merged: Vec<FactoredTerm> = Vec::with_capacity(terms.len());
        for t in terms {
            match merged.last_mut() {
                Some(last) if last.literals == t.literals => {
                    last.coefficient = last
                        .coefficient
                        .checked_add(t.coefficient)
                        .ok_or(Error::Overflow("merging terms"))?;
                }
                _ => merged.push(t),
            }
        }
        merged.retain(|t| t.coefficient != 0);
        Ok(Self {
            num_vars,
            terms: merged,
            constant,
        })
    }

    pub fn constant_only(num_vars: usize, constant: i64) -> Self {
        Self {
            num_vars,
            terms: Vec::new(),
            constant,
        }
    }

    pub fn num_vars(&self) -> usize {
        self.num_vars
    }

    pub fn terms(&self) -> &[FactoredTerm] {
        &self.terms
    }

    pub fn constant(&self) -> i64 {
        self.constant
    }

    pub fn degree(&self) -> usize {
        self.terms.iter().map(|t| t.degree()).max().unwrap_or(0)
    }

    /// True when no term carries a complemented factor.
    pub fn is_expanded(&self) -> bool {
        self.terms.iter().all(|t| t.negated_count() == 0)
    }

    /// Distributes every `(1 - x)` factor, returning the monomial form.
    pub fn expand(&self) -> Result<Polynomial> {
        let mut acc: BTreeMap<Vec<u32>, i64> = BTreeMap::new();
        let mut constant = self.constant;
        for t in &self.terms {
            let positives: Vec<u32> = t
                .literals
                .iter()
                .filter(|l| !l.is_negated())
                .map(|l| l.var.0)
                .collect();
            let negated: Vec<u32> = t
                .literals
                .iter()
                .filter(|l| l.is_negated())
                .map(|l| l.var.0)
                .collect();
            // coefficient · Π_{p} x_p · Π_{q} (1 - x_q) = Σ_{S ⊆ negated} (-1)^{|S|} x_{P ∪ S}
            for subset in 0u64..(1u64 << negated.len()) {
                let mut vars = positives.clone();
                let mut odd = false;
                for (j, &q) in negated.iter().enumerate() {
                    if subset >> j & 1 == 1 {
                        vars.push(q);
                        odd = !odd;
                    }
                }
                let c = if odd {
                    t.coefficient
                        .checked_neg()
                        .ok_or(Error::Overflow("expanding a term"))?
                } else {
                    t.coefficient
                };
                if vars.is_empty() {
                    constant = constant
                        .checked_add(c)
                        .ok_or(Error::Overflow("expanding a term"))?;
                } else {
                    vars.sort_unstable();
                    let slot = acc.entry(vars).or_insert(0);
                    *slot = slot
                        .checked_add(c)
                        .ok_or(Error::Overflow("expanding a term"))?;
                }
            }
        }
        let terms = acc.into_iter().filter(|(_, c)| *c != 0).map(|(vars, c)| {
            FactoredTerm {
                coefficient: c,
                literals: vars.into_iter().map(Literal::positive).collect(),
            }
        });
        Polynomial::new(self.num_vars, terms, constant)
    }

    pub fn evaluate(&self, assignment: &[bool]) -> Result<i64> {
        if assignment.len() != self.num_vars {
            return Err(Error::LengthMismatch {
                expected: self.num_vars,
                got: assignment.len(),
            });
        }
        self.terms.iter().try_fold(self.constant, |acc, t| {
            acc.checked_add(t.eval(assignment))
                .ok_or(Error::Overflow("evaluating"))
        })
    }

    /// Evaluates on the assignment whose bit `j` is `x_j`.
    pub fn evaluate_index(&self, x: u64) -> Result<i64> {
        self.evaluate(&index_to_bits(x, self.num_vars))
    }

    /// Bitmask form for fast repeated evaluation (at most 64 variables).
    pub fn compile(&self) -> Result<CompiledPolynomial> {
        if self.num_vars > 64 {
            return Err(Error::EnumerationCap {
                num_vars: self.num_vars,
                cap: 64,
            });
        }
        let mut budget: i64 = self
            .constant
            .checked_abs()
            .ok_or(Error::Overflow("compiling"))?;
        let mut terms = Vec::with_capacity(self.terms.len());
        for t in &self.terms {
            budget = t
                .coefficient
                .checked_abs()
                .and_then(|c| budget.checked_add(c))
                .ok_or(Error::Overflow("compiling"))?;
            let mut pos = 0u64;
            let mut neg = 0u64;
            for l in &t.literals {
                match l.polarity {
                    Polarity::Positive => pos |= 1 << l.var.0,
                    Polarity::Negated => neg |= 1 << l.var.0,
                }
            }
            terms.push((pos, neg, t.coefficient));
        }
        Ok(CompiledPolynomial {
            num_vars: self.num_vars,
            terms,
            constant: self.constant,
        })
    }

    /// Exact `(min, max)` over all assignments, capped at
    /// [`DEFAULT_ENUMERATION_CAP`] variables.
    pub fn bounds(&self) -> Result<(i64, i64)> {
        self.bounds_with_cap(DEFAULT_ENUMERATION_CAP)
    }

    pub fn bounds_with_cap(&self, cap: usize) -> Result<(i64, i64)> {
        if self.num_vars > cap || self.num_vars > 63 {
            return Err(Error::EnumerationCap {
                num_vars: self.num_vars,
                cap: cap.min(63),
            });
        }
        let compiled = self.compile()?;
        let total = 1u64 << self.num_vars;
        let (lo, hi) = (0..total)
            .into_par_iter()
            .fold(
                || (i64::MAX, i64::MIN),
                |(lo, hi), x| {
                    let v = compiled.eval(x);
                    (lo.min(v), hi.max(v))
                },
            )
            .reduce(|| (i64::MAX, i64::MIN), |a, b| (a.0.min(b.0), a.1.max(b.1)));
        Ok((lo, hi))
    }

    /// Cheap enclosing interval: each term contributes either 0 or its coefficient.
    pub fn interval_bounds(&self) -> Result<(i64, i64)> {
        let mut lo = self.constant;
        let mut hi = self.constant;
        for t in &self.terms {
            let c = t.coefficient;
            if c < 0 {
                lo = lo.checked_add(c).ok_or(Error::Overflow("bounding"))?;
            } else {
                hi = hi.checked_add(c).ok_or(Error::Overflow("bounding"))?;
            }
        }
        Ok((lo, hi))
    }

    /// `E(x) - y`.
    pub fn shift(&self, y: i64) -> Result<Polynomial> {
        let constant = self
            .constant
            .checked_sub(y)
            .ok_or(Error::Overflow("shifting by the threshold"))?;
        Ok(Polynomial {
            constant,
            ..self.clone()
        })
    }
}

impl fmt::Display for Polynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "vars {}", self.num_vars)?;
        for t in &self.terms {
            write_term(f, t)?;
        }
        writeln!(f, "const {}", self.constant)
    }
}

fn write_term(f: &mut impl fmt::Write, t: &FactoredTerm) -> fmt::Result {
    write!(f, "{} *", t.coefficient)?;
    for l in &t.literals {
        write!(f, " {l}")?;
    }
    writeln!(f)
}

impl FromStr for Polynomial {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Ok(s.parse::<ScheduledPolynomial>()?.poly)
    }
}

/// Bitmask evaluator produced by [`Polynomial::compile`].
///
/// Construction guarantees the sum of absolute coefficients fits in `i64`, so
/// evaluation cannot overflow.
#[derive(Debug, Clone)]
pub struct CompiledPolynomial {
    num_vars: usize,
    terms: Vec<(u64, u64, i64)>,
    constant: i64,
}

impl CompiledPolynomial {
    pub fn num_vars(&self) -> usize {
        self.num_vars
    }

    #[inline]
    pub fn eval(&self, x: u64) -> i64 {
        let mut acc = self.constant;
        for &(pos, neg, c) in &self.terms {
            if x & pos == pos && x & neg == 0 {
                acc += c;
            }
        }
        acc
    }
}

/// Where the value range used to size the register comes from.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BoundSource {
    Exhaustive,
    Analytic { min: i64, max: i64 },
}

/// Smallest `m ≥ 1` with `-2^(m-1) <= min` and `max < 2^(m-1)`.
pub fn value_register_width(min: i64, max: i64) -> usize {
    let mut m = 1usize;
    loop {
        let half = 1i128 << (m - 1);
        if -half <= min as i128 && (max as i128) < half {
            return m;
        }
        m += 1;
    }
}

/// Register width for `poly`, taking the value range from `source`.
pub fn register_width(poly: &Polynomial, source: BoundSource) -> Result<usize> {
    let (min, max) = match source {
        BoundSource::Exhaustive => poly.bounds()?,
        BoundSource::Analytic { min, max } => (min, max),
    };
    Ok(value_register_width(min, max))
}

/// Assignment bits for index `x` (bit `j` is `x_j`).
pub fn index_to_bits(x: u64, n: usize) -> Vec<bool> {
    (0..n).map(|j| x >> j & 1 == 1).collect()
}

pub fn bits_to_index(bits: &[bool]) -> u64 {
    bits.iter()
        .enumerate()
        .fold(0u64, |acc, (j, &b)| acc | (b as u64) << j)
}

/// Accumulates terms group by group, remembering emission order.
#[derive(Debug, Clone)]
pub struct PolynomialBuilder {
    num_vars: usize,
    groups: Vec<Vec<FactoredTerm>>,
    constant: i64,
    overflowed: bool,
}

impl PolynomialBuilder {
    pub fn new(num_vars: usize) -> Self {
        Self {
            num_vars,
            groups: Vec::new(),
            constant: 0,
            overflowed: false,
        }
    }

    /// Starts a new emission group. Terms of one group share a single X-gate
    /// sandwich when synthesized, provided their polarities agree.
    pub fn group(&mut self) -> &mut Self {
        self.groups.push(Vec::new());
        self
    }

    pub fn add_term(&mut self, term: FactoredTerm) -> &mut Self {
        if term.literals.is_empty() {
            return self.add_constant(term.coefficient);
        }
        if self.groups.is_empty() {
            self.groups.push(Vec::new());
        }
        self.groups.last_mut().unwrap().push(term);
        self
    }

    /// Adds `coefficient · Π literals`, simplifying repeated variables.
    pub fn add_product(&mut self, coefficient: i64, literals: Vec<Literal>) -> &mut Self {
        if coefficient == 0 {
            return self;
        }
        match FactoredTerm::product(coefficient, literals) {
            Some(t) => self.add_term(t),
            None => self,
        }
    }

    pub fn add_constant(&mut self, c: i64) -> &mut Self {
        match self.constant.checked_add(c) {
            Some(v) => self.constant = v,
            None => self.overflowed = true,
        }
        self
    }

    pub fn build(self) -> Result<ScheduledPolynomial> {
        if self.overflowed {
            return Err(Error::Overflow("accumulating the constant"));
        }
        let poly = Polynomial::new(
            self.num_vars,
            self.groups.iter().flatten().cloned(),
            self.constant,
        )?;
        let position: HashMap<&[Literal], usize> = poly
            .terms
            .iter()
            .enumerate()
            .map(|(i, t)| (t.literals.as_slice(), i))
            .collect();
        let mut placed = vec![false; poly.terms.len()];
        let mut schedule = Vec::new();
        for group in &self.groups {
            let mut out = Vec::new();
            for t in group {
                if let Some(&i) = position.get(t.literals.as_slice()) {
                    if !placed[i] {
                        placed[i] = true;
                        out.push(i);
                    }
                }
            }
            if !out.is_empty() {
                schedule.push(out);
            }
        }
        Ok(ScheduledPolynomial { poly, schedule })
    }
}

/// A polynomial together with the order and grouping in which its terms are
/// turned into gates.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ScheduledPolynomial {
    poly: Polynomial,
    schedule: Vec<Vec<usize>>,
}

impl ScheduledPolynomial {
    /// Canonical order, one term per group.
    pub fn canonical(poly: Polynomial) -> Self {
        let schedule = (0..poly.terms.len()).map(|i| vec![i]).collect();
        Self { poly, schedule }
    }

    pub fn polynomial(&self) -> &Polynomial {
        &self.poly
    }

    pub fn into_polynomial(self) -> Polynomial {
        self.poly
    }

    /// Groups of indices into `polynomial().terms()`, in emission order.
    pub fn schedule(&self) -> &[Vec<usize>] {
        &self.schedule
    }

    pub fn expand(&self) -> Result<ScheduledPolynomial> {
        Ok(Self::canonical(self.poly.expand()?))
    }

    pub fn shift(&self, y: i64) -> Result<ScheduledPolynomial> {
        Ok(Self {
            poly: self.poly.shift(y)?,
            schedule: self.schedule.clone(),
        })
    }
}

impl fmt::Display for ScheduledPolynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "vars {}", self.poly.num_vars)?;
        for (g, group) in self.schedule.iter().enumerate() {
            if g > 0 {
                writeln!(f, "group")?;
            }
            for &i in group {
                write_term(f, &self.poly.terms[i])?;
            }
        }
        writeln!(f, "const {}", self.poly.constant)
    }
}

impl FromStr for ScheduledPolynomial {
    type Err = Error;

    /// Parses the line format written by `Display`:
    ///
    /// ```text
    /// vars 3
    /// 1 * v0 v1 v2
    /// -1 * !v0 v2
    /// const 0
    /// ```
    ///
    /// `group` lines separate emission groups; `#` starts a comment.
    fn from_str(s: &str) -> Result<Self> {
        let mut num_vars: Option<usize> = None;
        let mut groups: Vec<Vec<(i64, Vec<Literal>)>> = vec![Vec::new()];
        let mut constant = 0i64;
        for (lineno, raw) in s.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let err = |msg: String| Error::Parse {
                line: lineno + 1,
                msg,
            };
            let mut words = line.split_whitespace();
            match words.next() {
                Some("vars") => {
                    let n = words
                        .next()
                        .and_then(|w| w.parse().ok())
                        .ok_or_else(|| err("expected `vars <n>`".into()))?;
                    num_vars = Some(n);
                }
                Some("const") => {
                    let c: i64 = words
                        .next()
                        .and_then(|w| w.parse().ok())
                        .ok_or_else(|| err("expected `const <c>`".into()))?;
                    constant = constant
                        .checked_add(c)
                        .ok_or(Error::Overflow("parsing"))?;
                }
                Some("group") => groups.push(Vec::new()),
                Some(first) => {
                    let coeff: i64 = first
                        .parse()
                        .map_err(|_| err(format!("bad coefficient `{first}`")))?;
                    if words.next() != Some("*") {
                        return Err(err("expected `*` after the coefficient".into()));
                    }
                    let mut lits = Vec::new();
                    for w in words {
                        let (neg, rest) = match w.strip_prefix('!') {
                            Some(r) => (true, r),
                            None => (false, w),
                        };
                        let var: u32 = rest
                            .strip_prefix('v')
                            .and_then(|d| d.parse().ok())
                            .ok_or_else(|| err(format!("bad literal `{w}`")))?;
                        lits.push(if neg {
                            Literal::negated(var)
                        } else {
                            Literal::positive(var)
                        });
                    }
                    groups.last_mut().unwrap().push((coeff, lits));
                }
                None => unreachable!(),
            }
        }
        let num_vars = num_vars.ok_or(Error::Parse {
            line: 0,
            msg: "missing `vars <n>` header".into(),
        })?;
        let mut b = PolynomialBuilder::new(num_vars);
        for g in groups {
            b.group();
            for (c, lits) in g {
                b.add_term(FactoredTerm::new(c, lits)?);
            }
        }
        b.add_constant(constant);
        b.build()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn fig2_factored() -> Polynomial {
        // x1 x2 x3 - (1 - x1) x3, variables renumbered from zero
        Polynomial::new(
            3,
            vec![
                FactoredTerm::new(1, vec![Literal::positive(0), Literal::positive(1), Literal::positive(2)])
                    .unwrap(),
                FactoredTerm::new(-1, vec![Literal::negated(0), Literal::positive(2)]).unwrap(),
            ],
            0,
        )
        .unwrap()
    }

    #[test]
    fn expand_single_negation() {
        let p = Polynomial::new(
            3,
            vec![FactoredTerm::new(-1, vec![Literal::negated(0), Literal::positive(2)]).unwrap()],
            0,
        )
        .unwrap();
        let e = p.expand().unwrap();
        let want = Polynomial::new(
            3,
            vec![
                FactoredTerm::new(-1, vec![Literal::positive(2)]).unwrap(),
                FactoredTerm::new(1, vec![Literal::positive(0), Literal::positive(2)]).unwrap(),
            ],
            0,
        )
        .unwrap();
        assert_eq!(e, want);
    }

    #[test]
    fn expand_fig2_recovers_monomials() {
        let e = fig2_factored().expand().unwrap();
        let want = Polynomial::new(
            3,
            vec![
                FactoredTerm::new(1, vec![Literal::positive(0), Literal::positive(1), Literal::positive(2)])
                    .unwrap(),
                FactoredTerm::new(1, vec![Literal::positive(0), Literal::positive(2)]).unwrap(),
                FactoredTerm::new(-1, vec![Literal::positive(2)]).unwrap(),
            ],
            0,
        )
        .unwrap();
        assert_eq!(e, want);
        assert!(e.is_expanded());
    }

    #[test]
    fn expand_constant_only() {
        let p = Polynomial::constant_only(0, 5);
        assert_eq!(p.expand().unwrap(), p);
    }

    #[test]
    fn expand_overflow_is_an_error() {
        let p = Polynomial::new(
            2,
            vec![
                FactoredTerm::new(i64::MAX, vec![Literal::negated(0)]).unwrap(),
                FactoredTerm::new(i64::MAX, vec![Literal::negated(1)]).unwrap(),
            ],
            0,
        )
        .unwrap();
        assert_eq!(p.expand(), Err(Error::Overflow("expanding a term")));
    }

    #[test]
    fn evaluate_examples() {
        let p = fig2_factored();
        assert_eq!(p.evaluate(&[true, true, true]).unwrap(), 1);
        assert_eq!(p.evaluate(&[false, false, true]).unwrap(), -1);
        assert_eq!(
            p.evaluate(&[true, false]),
            Err(Error::LengthMismatch { expected: 3, got: 2 })
        );
    }

    #[test]
    fn bounds_examples() {
        assert_eq!(fig2_factored().bounds().unwrap(), (-1, 1));
        assert_eq!(Polynomial::constant_only(0, 5).bounds().unwrap(), (5, 5));
        let big = Polynomial::constant_only(30, 0);
        assert!(matches!(big.bounds(), Err(Error::EnumerationCap { .. })));
    }

    #[test]
    fn register_width_examples() {
        assert_eq!(value_register_width(-1, 1), 2);
        assert_eq!(value_register_width(0, 0), 1);
        // 69 < 2^7 but not < 2^6, so the sign bit makes it 8
        assert_eq!(value_register_width(0, 69), 8);
        assert_eq!(value_register_width(-8, 7), 4);
        assert_eq!(value_register_width(-9, 0), 5);
        assert_eq!(
            register_width(&fig2_factored(), BoundSource::Exhaustive).unwrap(),
            2
        );
    }

    #[test]
    fn shift_examples() {
        let p = Polynomial::constant_only(1, 0).shift(3).unwrap();
        assert_eq!(p.constant(), -3);
        let q = Polynomial::constant_only(1, 2).shift(2).unwrap();
        assert_eq!(q.constant(), 0);
        assert!(Polynomial::constant_only(0, i64::MIN).shift(1).is_err());
    }

    #[test]
    fn duplicate_variable_rejected() {
        assert_eq!(
            FactoredTerm::new(1, vec![Literal::positive(1), Literal::negated(1)]),
            Err(Error::DuplicateVariable(1))
        );
        assert!(FactoredTerm::product(1, vec![Literal::positive(1), Literal::negated(1)]).is_none());
        let t = FactoredTerm::product(2, vec![Literal::positive(1), Literal::positive(1)]).unwrap();
        assert_eq!(t.degree(), 1);
    }

    #[test]
    fn out_of_range_variable_rejected() {
        let t = FactoredTerm::new(1, vec![Literal::positive(4)]).unwrap();
        assert!(matches!(
            Polynomial::new(3, vec![t], 0),
            Err(Error::VariableOutOfRange { var: 4, .. })
        ));
    }

    #[test]
    fn text_round_trip_keeps_groups() {
        let mut b = PolynomialBuilder::new(3);
        b.group()
            .add_product(-1, vec![Literal::negated(0), Literal::positive(2)]);
        b.group()
            .add_product(1, vec![Literal::positive(0), Literal::positive(1), Literal::positive(2)]);
        b.add_constant(4);
        let sp = b.build().unwrap();
        let text = sp.to_string();
        assert_eq!(
            text,
            "vars 3\n-1 * !v0 v2\ngroup\n1 * v0 v1 v2\nconst 4\n"
        );
        let back: ScheduledPolynomial = text.parse().unwrap();
        assert_eq!(back, sp);
        let plain: Polynomial = text.parse().unwrap();
        assert_eq!(&plain, sp.polynomial());
    }

    #[test]
    fn parse_errors_carry_line_numbers() {
        let err = "vars 2\n1 * v0\nx * v1\n".parse::<Polynomial>().unwrap_err();
        assert!(matches!(err, Error::Parse { line: 3, .. }));
        assert!("1 * v0\n".parse::<Polynomial>().is_err());
    }

    #[test]
    fn builder_schedule_follows_first_emission() {
        let mut b = PolynomialBuilder::new(2);
        b.group().add_product(1, vec![Literal::positive(1)]);
        b.group()
            .add_product(1, vec![Literal::positive(0)])
            .add_product(2, vec![Literal::positive(1)]);
        let sp = b.build().unwrap();
        // canonical: [v0], [v1]; emission: v1 first
        assert_eq!(sp.schedule(), &[vec![1], vec![0]]);
        assert_eq!(sp.polynomial().terms()[1].coefficient(), 3);
    }
}
