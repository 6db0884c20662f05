//! Multi-number CVT and generalized XOR, their pairwise specializations,
//! and digit-wise rule-table transforms (IVTs).
//!
//! For operands `X₁..X_K` in base β, zero-padded to a common length `n`,
//! column `i` has sum `sᵢ = Σₖ aₖᵢ`. Then
//!
//! ```text
//! XOR(X₁..X_K) = (sₙ mod β, ..., s₁ mod β)
//! CVT(X₁..X_K) = (⌊sₙ/β⌋, ..., ⌊s₁/β⌋, 0)
//! ```
//!
//! and `ΣXₖ = value(CVT) + value(XOR)` for every K and β.

use num_bigint::BigUint;
use num_traits::Zero;
use serde::Serialize;

use crate::digitvec::{Base, DigitVector, GeneralizedDigitVector};
use crate::error::{Error, Result};
use crate::serde_nat;

/// Shared base of a non-empty operand list.
fn common_base(xs: &[DigitVector]) -> Result<Base> {
    let first = xs.first().ok_or(Error::NoOperands)?;
    let base = first.base();
    for x in &xs[1..] {
        if x.base() != base {
            return Err(Error::BaseMismatch {
                expected: base.beta(),
                found: x.base().beta(),
            });
        }
    }
    Ok(base)
}

/// Column sums over operands zero-padded at the MSB end, LSB-first.
pub fn column_sums(xs: &[DigitVector]) -> Result<(Base, Vec<u64>)> {
    let base = common_base(xs)?;
    let width = xs.iter().map(DigitVector::len).max().unwrap_or(1);
    let mut sums = vec![0u64; width];
    for x in xs {
        for (s, &d) in sums.iter_mut().zip(x.digits()) {
            *s += u64::from(d);
        }
    }
    Ok((base, sums))
}

pub fn xor_multi(xs: &[DigitVector]) -> Result<DigitVector> {
    let (base, sums) = column_sums(xs)?;
    Ok(xor_from_sums(base, &sums))
}

pub fn cvt_multi(xs: &[DigitVector]) -> Result<GeneralizedDigitVector> {
    let (base, sums) = column_sums(xs)?;
    Ok(cvt_from_sums(base, &sums))
}

fn xor_from_sums(base: Base, sums: &[u64]) -> DigitVector {
    let beta = u64::from(base.beta());
    DigitVector::from_lsb(base, sums.iter().map(|&s| (s % beta) as u32).collect())
        .expect("residues are canonical digits")
}

fn cvt_from_sums(base: Base, sums: &[u64]) -> GeneralizedDigitVector {
    let beta = u64::from(base.beta());
    let digits = std::iter::once(0)
        .chain(sums.iter().map(|&s| s / beta))
        .collect();
    GeneralizedDigitVector::from_lsb(base, digits).expect("non-empty")
}

/// Two-operand CVT. In base 2 digit `i+1` of the result is `aᵢ AND bᵢ`.
pub fn cvt_pair(a: &DigitVector, b: &DigitVector) -> Result<GeneralizedDigitVector> {
    cvt_multi(&[a.clone(), b.clone()])
}

/// Two-operand generalized XOR; bitwise exclusive-or in base 2.
pub fn xor_pair(a: &DigitVector, b: &DigitVector) -> Result<DigitVector> {
    xor_multi(&[a.clone(), b.clone()])
}

/// CVT and XOR of one operand list, computed from a single column pass.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct TransformResult {
    pub cvt: GeneralizedDigitVector,
    pub xor: DigitVector,
    pub operand_count: usize,
    pub base: Base,
}

impl TransformResult {
    pub fn cvt_value(&self) -> BigUint {
        self.cvt.value()
    }

    pub fn xor_value(&self) -> BigUint {
        self.xor.value()
    }
}

pub fn transform(xs: &[DigitVector]) -> Result<TransformResult> {
    let (base, sums) = column_sums(xs)?;
    Ok(TransformResult {
        cvt: cvt_from_sums(base, &sums),
        xor: xor_from_sums(base, &sums),
        operand_count: xs.len(),
        base,
    })
}

/// Both sides of `ΣXₖ = CVT + XOR` for one operand list.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct SumIdentity {
    #[serde(with = "serde_nat")]
    pub lhs: BigUint,
    #[serde(with = "serde_nat")]
    pub cvt: BigUint,
    #[serde(with = "serde_nat")]
    pub xor: BigUint,
    pub holds: bool,
}

pub fn sum_identity_check(xs: &[DigitVector]) -> Result<SumIdentity> {
    let t = transform(xs)?;
    let lhs: BigUint = xs.iter().map(DigitVector::value).sum();
    let cvt = t.cvt_value();
    let xor = t.xor_value();
    let holds = lhs == &cvt + &xor;
    Ok(SumIdentity {
        lhs,
        cvt,
        xor,
        holds,
    })
}

/// Zero tests for XOR and CVT, decided on the raw column sums.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CorollaryReport {
    /// Every column sum is a multiple of β.
    pub xor_zero: bool,
    /// Every column sum is below β.
    pub cvt_zero: bool,
    /// LSB-first.
    pub column_sums: Vec<u64>,
}

pub fn corollary_predicates(xs: &[DigitVector]) -> Result<CorollaryReport> {
    let (base, column_sums) = column_sums(xs)?;
    let beta = u64::from(base.beta());
    Ok(CorollaryReport {
        xor_zero: column_sums.iter().all(|s| s % beta == 0),
        cvt_zero: column_sums.iter().all(|&s| s < beta),
        column_sums,
    })
}

/// Largest table an IVT rule may carry (`p^k` rows).
const MAX_RULE_ROWS: usize = 1 << 16;

/// A local map `f_j` from k-tuples of base-p digits to a base-p digit.
///
/// Rows are ordered by the positional value of the input tuple, first
/// operand most significant. The rule index `j` is the base-p number whose
/// digit at position `r` is the output of row `r`, so with p = 2 and k = 2
/// the carry rule (AND) is `f₈` and exclusive-or is `f₆`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct RuleTable {
    arity: usize,
    radix: Base,
    outputs: Vec<u32>,
    #[serde(with = "serde_nat")]
    index: BigUint,
}

impl RuleTable {
    fn row_count(radix: Base, arity: usize) -> Result<usize> {
        if !(1..=2).contains(&arity) {
            return Err(Error::InvalidRule(format!(
                "arity {arity} unsupported (1 or 2)"
            )));
        }
        (radix.beta() as usize)
            .checked_pow(arity as u32)
            .filter(|&rows| rows <= MAX_RULE_ROWS)
            .ok_or_else(|| Error::InvalidRule(format!("table for base {radix} too large")))
    }

    /// Builds a table from its output column, ordered by row.
    pub fn from_outputs(radix: Base, arity: usize, outputs: Vec<u32>) -> Result<Self> {
        let rows = Self::row_count(radix, arity)?;
        if outputs.len() != rows {
            return Err(Error::InvalidRule(format!(
                "expected {rows} outputs, got {}",
                outputs.len()
            )));
        }
        if let Some(&d) = outputs.iter().find(|&&d| d >= radix.beta()) {
            return Err(Error::DigitOutOfRange {
                digit: d.into(),
                base: radix.beta(),
            });
        }
        let index = encode_index(radix, &outputs);
        Ok(RuleTable {
            arity,
            radix,
            outputs,
            index,
        })
    }

    /// Decodes a rule index `j` into its table.
    pub fn from_index(radix: Base, arity: usize, index: &BigUint) -> Result<Self> {
        let rows = Self::row_count(radix, arity)?;
        let digits = crate::digitvec::to_digits(index, radix, Some(rows));
        if digits.len() > rows {
            return Err(Error::InvalidRule(format!(
                "rule index {index} exceeds {radix}^{rows} - 1"
            )));
        }
        let table = RuleTable {
            arity,
            radix,
            outputs: digits.digits().to_vec(),
            index: index.clone(),
        };
        debug_assert!(table.index_consistent());
        Ok(table)
    }

    pub fn from_index_u64(radix: Base, arity: usize, index: u64) -> Result<Self> {
        Self::from_index(radix, arity, &BigUint::from(index))
    }

    pub fn arity(&self) -> usize {
        self.arity
    }

    pub fn radix(&self) -> Base {
        self.radix
    }

    pub fn index(&self) -> &BigUint {
        &self.index
    }

    pub fn outputs(&self) -> &[u32] {
        &self.outputs
    }

    /// Re-derives `j` from the stored table and compares.
    pub fn index_consistent(&self) -> bool {
        encode_index(self.radix, &self.outputs) == self.index
    }

    /// Applies the local map to one column of input digits.
    pub fn eval(&self, inputs: &[u32]) -> u32 {
        let p = self.radix.beta() as usize;
        let row = inputs.iter().fold(0usize, |acc, &d| acc * p + d as usize);
        self.outputs[row]
    }
}

fn encode_index(radix: Base, outputs: &[u32]) -> BigUint {
    let p = BigUint::from(radix.beta());
    outputs
        .iter()
        .rev()
        .fold(BigUint::zero(), |acc, &d| acc * &p + d)
}

/// Digit-wise application of a rule table to `rule.arity()` operands.
pub fn ivt_apply(rule: &RuleTable, xs: &[DigitVector]) -> Result<DigitVector> {
    if xs.len() != rule.arity() {
        return Err(Error::ArityMismatch {
            expected: rule.arity(),
            found: xs.len(),
        });
    }
    let base = common_base(xs)?;
    if base != rule.radix() {
        return Err(Error::BaseMismatch {
            expected: rule.radix().beta(),
            found: base.beta(),
        });
    }
    let width = xs.iter().map(DigitVector::len).max().unwrap_or(1);
    let mut column = vec![0u32; xs.len()];
    let digits = (0..width)
        .map(|i| {
            for (slot, x) in column.iter_mut().zip(xs) {
                *slot = x.digits().get(i).copied().unwrap_or(0);
            }
            rule.eval(&column)
        })
        .collect();
    DigitVector::from_lsb(base, digits)
}
