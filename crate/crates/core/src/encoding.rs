//! Index codes: how a problem index `1..=I` is written as a bit vector.
//!
//! Five codes are supported. One-hot spends one bit per index; ascending and
//! descending use `⌈log2 I⌉` bits in binary counting order; the Gray code
//! starts from all ones and flips one bit per step; the even-weight code adds
//! one bit and only uses vectors with an even number of ones.
//!
//! Indices are 1-based everywhere in this module.

use std::fmt;

use crate::boolpoly::{FactoredTerm, Literal, VarId};
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum CodeKind {
    OneHot,
    Asc,
    Dsc,
    GrayPf,
    EvenOr,
}

impl CodeKind {
    pub fn name(self) -> &'static str {
        match self {
            CodeKind::OneHot => "one-hot",
            CodeKind::Asc => "asc",
            CodeKind::Dsc => "dsc",
            CodeKind::GrayPf => "gray-pf",
            CodeKind::EvenOr => "even-or",
        }
    }
}

impl fmt::Display for CodeKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// Bits `b_1 .. b_B`, most significant first.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct BitVector(Vec<bool>);

impl BitVector {
    pub fn new(bits: Vec<bool>) -> Self {
        Self(bits)
    }

    /// `value` written with `width` bits, most significant bit first.
    pub fn from_value(value: u64, width: usize) -> Self {
        Self((0..width).rev().map(|r| value >> r & 1 == 1).collect())
    }

    pub fn bits(&self) -> &[bool] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn hamming_weight(&self) -> usize {
        hamming_weight(self)
    }
}

impl fmt::Display for BitVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for &b in &self.0 {
            f.write_str(if b { "1" } else { "0" })?;
        }
        Ok(())
    }
}

pub fn hamming_weight(bits: &BitVector) -> usize {
    bits.0.iter().filter(|&&b| b).count()
}

/// `⌈log2 i⌉` for `i ≥ 1`.
pub fn ceil_log2(i: usize) -> usize {
    assert!(i >= 1);
    (usize::BITS - (i - 1).leading_zeros()) as usize
}

/// Standard reflected Gray code.
pub fn gray(k: u64) -> u64 {
    k ^ (k >> 1)
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct IndexCode {
    kind: CodeKind,
    num_indices: usize,
    width: usize,
    /// Every codeword slot in index order; the first `num_indices` are in use.
    slots: Vec<BitVector>,
}

impl IndexCode {
    pub fn new(kind: CodeKind, num_indices: usize) -> Result<Self> {
        let min = if kind == CodeKind::OneHot { 1 } else { 2 };
        if num_indices < min {
            return Err(Error::TooFewIndices {
                kind: kind.name(),
                min,
                got: num_indices,
            });
        }
        let b = ceil_log2(num_indices);
        let (width, slots) = match kind {
            CodeKind::OneHot => {
                let slots = (0..num_indices)
                    .map(|i| BitVector((0..num_indices).map(|r| r == i).collect()))
                    .collect();
                (num_indices, slots)
            }
            CodeKind::Asc => (
                b,
                (0..1u64 << b).map(|v| BitVector::from_value(v, b)).collect(),
            ),
            CodeKind::Dsc => (
                b,
                (0..1u64 << b)
                    .rev()
                    .map(|v| BitVector::from_value(v, b))
                    .collect(),
            ),
            CodeKind::GrayPf => {
                // the reflected Gray cycle entered one step in, so slot 1 is all ones
                let size = 1u64 << b;
                let start = (size - 1) ^ gray(1);
                (
                    b,
                    (1..=size)
                        .map(|k| BitVector::from_value(start ^ gray(k % size), b))
                        .collect(),
                )
            }
            CodeKind::EvenOr => {
                let w = b + 1;
                (
                    w,
                    (0..1u64 << w)
                        .filter(|v| v.count_ones() % 2 == 0)
                        .map(|v| BitVector::from_value(v, w))
                        .collect(),
                )
            }
        };
        Ok(Self {
            kind,
            num_indices,
            width,
            slots,
        })
    }

    pub fn kind(&self) -> CodeKind {
        self.kind
    }

    pub fn num_indices(&self) -> usize {
        self.num_indices
    }

    /// Bits per index.
    pub fn width(&self) -> usize {
        self.width
    }

    /// Codewords of the indices in use, `1..=num_indices`.
    pub fn codewords(&self) -> &[BitVector] {
        &self.slots[..self.num_indices]
    }

    /// Every slot, used or not. For the even-weight code only even vectors are slots.
    pub fn slots(&self) -> &[BitVector] {
        &self.slots
    }

    pub fn num_slots(&self) -> usize {
        self.slots.len()
    }

    /// Codeword of slot `i` (1-based).
    pub fn codeword(&self, i: usize) -> Result<&BitVector> {
        if i == 0 || i > self.slots.len() {
            return Err(Error::IndexOutOfRange {
                index: i,
                max: self.slots.len(),
            });
        }
        Ok(&self.slots[i - 1])
    }

    /// Index in use whose codeword equals `bits`.
    pub fn index_of(&self, bits: &[bool]) -> Option<usize> {
        self.codewords()
            .iter()
            .position(|c| c.0 == bits)
            .map(|p| p + 1)
    }

    /// Slots past `num_indices` that constraint terms must penalize.
    pub fn unused_codewords(&self) -> Vec<usize> {
        (self.num_indices + 1..=self.slots.len()).collect()
    }

    /// Indicator of slot `i` over `vars`: `Π_r (x_r if b_r = 1 else 1 - x_r)`.
    pub fn delta(&self, i: usize, vars: &[VarId]) -> Result<FactoredTerm> {
        let word = self.codeword(i)?;
        indicator(word, vars)
    }

    /// Renders the code as a table: index, codeword and indicator product.
    pub fn table(&self) -> String {
        let mut out = format!("# {} code, I = {}, B = {}\n", self.kind, self.num_indices, self.width);
        out.push_str("index\tbits\tdelta\n");
        let used = |bits: &BitVector| self.slots[..self.num_indices].contains(bits);
        // the even-weight code is listed over all vectors so the odd ones show as unused
        let rows: Vec<BitVector> = if self.kind == CodeKind::EvenOr {
            (0..1u64 << self.width)
                .map(|v| BitVector::from_value(v, self.width))
                .collect()
        } else {
            self.slots.clone()
        };
        for bits in rows {
            let label = if used(&bits) {
                (self.slots.iter().position(|s| *s == bits).unwrap() + 1).to_string()
            } else {
                "unused".to_string()
            };
            let factors: Vec<String> = bits
                .0
                .iter()
                .enumerate()
                .map(|(r, &b)| {
                    if b {
                        format!("x{}", r + 1)
                    } else {
                        format!("(1-x{})", r + 1)
                    }
                })
                .collect();
            out.push_str(&format!("{label}\t{bits}\t{}\n", factors.join(" ")));
        }
        out
    }
}

/// Indicator of an arbitrary bit pattern over `vars`.
pub fn indicator(word: &BitVector, vars: &[VarId]) -> Result<FactoredTerm> {
    if vars.len() != word.len() {
        return Err(Error::WidthMismatch {
            expected: word.len(),
            got: vars.len(),
        });
    }
    let lits = word
        .0
        .iter()
        .zip(vars)
        .map(|(&b, &v)| {
            if b {
                Literal::positive(v.0)
            } else {
                Literal::negated(v.0)
            }
        })
        .collect();
    FactoredTerm::new(1, lits)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::boolpoly::Polarity;

    fn words(code: &IndexCode) -> Vec<String> {
        code.slots().iter().map(|b| b.to_string()).collect()
    }

    fn vars(n: u32) -> Vec<VarId> {
        (0..n).map(VarId).collect()
    }

    fn polarities(t: &FactoredTerm) -> Vec<Polarity> {
        t.literals().iter().map(|l| l.polarity).collect()
    }

    #[test]
    fn asc_and_dsc_match_table_one() {
        assert_eq!(words(&IndexCode::new(CodeKind::Asc, 4).unwrap()), ["00", "01", "10", "11"]);
        assert_eq!(words(&IndexCode::new(CodeKind::Dsc, 4).unwrap()), ["11", "10", "01", "00"]);
    }

    #[test]
    fn gray_matches_table_three() {
        let code = IndexCode::new(CodeKind::GrayPf, 8).unwrap();
        assert_eq!(
            words(&code),
            ["111", "101", "100", "000", "001", "011", "010", "110"]
        );
    }

    #[test]
    fn even_matches_table_four() {
        let code = IndexCode::new(CodeKind::EvenOr, 4).unwrap();
        assert_eq!(code.width(), 3);
        assert_eq!(words(&code), ["000", "011", "101", "110"]);
        assert!(code.unused_codewords().is_empty());
    }

    #[test]
    fn too_few_indices() {
        assert!(IndexCode::new(CodeKind::Asc, 1).is_err());
        assert!(IndexCode::new(CodeKind::OneHot, 0).is_err());
        assert_eq!(IndexCode::new(CodeKind::OneHot, 1).unwrap().width(), 1);
    }

    #[test]
    fn delta_examples() {
        use Polarity::*;
        let asc = IndexCode::new(CodeKind::Asc, 4).unwrap();
        assert_eq!(polarities(&asc.delta(1, &vars(2)).unwrap()), [Negated, Negated]);
        let dsc = IndexCode::new(CodeKind::Dsc, 4).unwrap();
        assert_eq!(polarities(&dsc.delta(2, &vars(2)).unwrap()), [Positive, Negated]);
        let pf = IndexCode::new(CodeKind::GrayPf, 8).unwrap();
        assert_eq!(
            polarities(&pf.delta(4, &vars(3)).unwrap()),
            [Negated, Negated, Negated]
        );
        assert!(matches!(asc.delta(5, &vars(2)), Err(Error::IndexOutOfRange { .. })));
        assert!(matches!(asc.delta(1, &vars(3)), Err(Error::WidthMismatch { .. })));
    }

    #[test]
    fn unused_slots() {
        let dsc = IndexCode::new(CodeKind::Dsc, 3).unwrap();
        assert_eq!(dsc.unused_codewords(), [4]);
        assert_eq!(dsc.codeword(4).unwrap().to_string(), "00");
        assert!(IndexCode::new(CodeKind::Asc, 4).unwrap().unused_codewords().is_empty());
        let or = IndexCode::new(CodeKind::EvenOr, 3).unwrap();
        assert_eq!(or.unused_codewords(), [4]);
    }

    #[test]
    fn hamming_examples() {
        assert_eq!(hamming_weight(&BitVector::new(vec![true, true, true])), 3);
        assert_eq!(hamming_weight(&BitVector::new(vec![false; 3])), 0);
        let or = IndexCode::new(CodeKind::EvenOr, 4).unwrap();
        assert_eq!(or.codeword(2).unwrap().hamming_weight(), 2);
    }

    #[test]
    fn one_hot_indicator_is_full_product() {
        let code = IndexCode::new(CodeKind::OneHot, 3).unwrap();
        let t = code.delta(2, &vars(3)).unwrap();
        assert_eq!(t.negated_count(), 2);
    }

    #[test]
    fn table_lists_unused_rows() {
        let t = IndexCode::new(CodeKind::EvenOr, 4).unwrap().table();
        assert_eq!(t.lines().filter(|l| l.starts_with("unused")).count(), 4);
        assert!(t.contains("2\t011\t(1-x1) x2 x3"));
    }
}
