//! Positional digit vectors in an arbitrary radix.
//!
//! Digits are stored least-significant first, so `digits()[0]` is the unit
//! digit. Display and parsing use the MSB-first textual form `β:digits`,
//! e.g. `3:0122`. When any digit is at least 10 or at least the base, the
//! bracketed form `3:[0,3,3,0]` is used instead.

use std::fmt;
use std::str::FromStr;

use num_bigint::BigUint;
use num_integer::Integer;
use num_traits::{ToPrimitive, Zero};
use serde::{Serialize, Serializer};

use crate::error::{Error, Result};

/// A positional radix, always at least 2.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Base(u32);

impl Base {
    pub const BINARY: Base = Base(2);

    pub fn new(beta: u32) -> Result<Self> {
        if beta < 2 {
            return Err(Error::InvalidBase(beta.into()));
        }
        Ok(Base(beta))
    }

    #[inline]
    pub fn beta(self) -> u32 {
        self.0
    }

    /// `β^t` as an arbitrary-precision natural.
    pub fn pow(self, t: u32) -> BigUint {
        BigUint::from(self.0).pow(t)
    }
}

impl fmt::Display for Base {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.0.fmt(f)
    }
}

impl Serialize for Base {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_u32(self.0)
    }
}

/// A canonical base-β digit string: every digit is strictly below β.
///
/// Never empty; zero is `[0]` or a zero-padded run. Equality is structural
/// (length included); compare [`DigitVector::value`] for numeric equality.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct DigitVector {
    base: Base,
    digits: Vec<u32>,
}

impl DigitVector {
    /// Builds a vector from LSB-first digits, rejecting digits `>= β`.
    pub fn from_lsb(base: Base, digits: Vec<u32>) -> Result<Self> {
        if digits.is_empty() {
            return Err(Error::EmptyDigits);
        }
        if let Some(&d) = digits.iter().find(|&&d| d >= base.beta()) {
            return Err(Error::DigitOutOfRange {
                digit: d.into(),
                base: base.beta(),
            });
        }
        Ok(DigitVector { base, digits })
    }

    /// Builds a vector from MSB-first digits as they would be written.
    pub fn from_msb(base: Base, mut digits: Vec<u32>) -> Result<Self> {
        digits.reverse();
        Self::from_lsb(base, digits)
    }

    pub fn from_u64(value: u64, base: Base) -> Self {
        to_digits(&BigUint::from(value), base, None)
    }

    pub fn zero(base: Base, width: usize) -> Self {
        DigitVector {
            base,
            digits: vec![0; width.max(1)],
        }
    }

    #[inline]
    pub fn base(&self) -> Base {
        self.base
    }

    /// LSB-first digits.
    #[inline]
    pub fn digits(&self) -> &[u32] {
        &self.digits
    }

    #[inline]
    pub fn len(&self) -> usize {
        self.digits.len()
    }

    /// Always false; kept for API symmetry with `len`.
    #[inline]
    pub fn is_empty(&self) -> bool {
        self.digits.is_empty()
    }

    pub fn is_zero(&self) -> bool {
        self.digits.iter().all(|&d| d == 0)
    }

    /// Number of digits once leading zeros are stripped; zero has length 1.
    pub fn significant_len(&self) -> usize {
        self.digits
            .iter()
            .rposition(|&d| d != 0)
            .map_or(1, |i| i + 1)
    }

    pub fn value(&self) -> BigUint {
        horner(self.base, self.digits.iter().map(|&d| u64::from(d)))
    }

    /// Zero-pads at the MSB end up to `width` digits. Never truncates.
    pub fn padded(&self, width: usize) -> Self {
        let mut digits = self.digits.clone();
        if digits.len() < width {
            digits.resize(width, 0);
        }
        DigitVector {
            base: self.base,
            digits,
        }
    }

    /// Drops leading zeros, keeping at least one digit.
    pub fn trimmed(&self) -> Self {
        DigitVector {
            base: self.base,
            digits: self.digits[..self.significant_len()].to_vec(),
        }
    }

    /// Multiplies the valuation by `β^t` by inserting `t` zeros at the LSB end.
    pub fn shift_up(&self, t: usize) -> Self {
        let mut digits = Vec::with_capacity(self.digits.len() + t);
        digits.resize(t, 0);
        digits.extend_from_slice(&self.digits);
        DigitVector {
            base: self.base,
            digits,
        }
    }

    /// Floor-divides the valuation by `β^t` by dropping `t` LSB digits.
    /// Shifting past the end yields the single-digit zero vector.
    pub fn shift_down(&self, t: usize) -> Self {
        if t >= self.digits.len() {
            return DigitVector::zero(self.base, 1);
        }
        DigitVector {
            base: self.base,
            digits: self.digits[t..].to_vec(),
        }
    }

    pub fn to_generalized(&self) -> GeneralizedDigitVector {
        GeneralizedDigitVector {
            base: self.base,
            digits: self.digits.iter().map(|&d| u64::from(d)).collect(),
        }
    }
}

impl fmt::Display for DigitVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write_digits(f, self.base, self.digits.iter().map(|&d| u64::from(d)))
    }
}

impl FromStr for DigitVector {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let (base, digits) = parse_digit_string(s)?;
        let digits = digits
            .into_iter()
            .map(|d| {
                u32::try_from(d)
                    .ok()
                    .filter(|&d| d < base.beta())
                    .ok_or(Error::DigitOutOfRange {
                        digit: d,
                        base: base.beta(),
                    })
            })
            .collect::<Result<Vec<_>>>()?;
        DigitVector::from_lsb(base, digits)
    }
}

impl Serialize for DigitVector {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

/// A digit string whose entries may reach or exceed β, such as a CVT output.
/// Its valuation still follows the positional formula `Σ dᵢ·β^(i-1)`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct GeneralizedDigitVector {
    base: Base,
    digits: Vec<u64>,
}

impl GeneralizedDigitVector {
    pub fn from_lsb(base: Base, digits: Vec<u64>) -> Result<Self> {
        if digits.is_empty() {
            return Err(Error::EmptyDigits);
        }
        Ok(GeneralizedDigitVector { base, digits })
    }

    pub fn from_msb(base: Base, mut digits: Vec<u64>) -> Result<Self> {
        digits.reverse();
        Self::from_lsb(base, digits)
    }

    #[inline]
    pub fn base(&self) -> Base {
        self.base
    }

    #[inline]
    pub fn digits(&self) -> &[u64] {
        &self.digits
    }

    #[inline]
    pub fn len(&self) -> usize {
        self.digits.len()
    }

    #[inline]
    pub fn is_empty(&self) -> bool {
        self.digits.is_empty()
    }

    pub fn is_zero(&self) -> bool {
        self.digits.iter().all(|&d| d == 0)
    }

    pub fn is_canonical(&self) -> bool {
        self.digits.iter().all(|&d| d < u64::from(self.base.beta()))
    }

    pub fn value(&self) -> BigUint {
        valuation(self)
    }

    /// Re-expresses the valuation as a canonical vector of at least the same
    /// length.
    pub fn canonicalize(&self) -> DigitVector {
        if self.is_canonical() {
            return DigitVector {
                base: self.base,
                digits: self.digits.iter().map(|&d| d as u32).collect(),
            };
        }
        to_digits(&self.value(), self.base, Some(self.len()))
    }
}

impl fmt::Display for GeneralizedDigitVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write_digits(f, self.base, self.digits.iter().copied())
    }
}

impl FromStr for GeneralizedDigitVector {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let (base, digits) = parse_digit_string(s)?;
        GeneralizedDigitVector::from_lsb(base, digits)
    }
}

impl Serialize for GeneralizedDigitVector {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

/// Converts a natural number to its canonical base-β digits, zero-padded at
/// the MSB end to at least `min_width` digits.
pub fn to_digits(value: &BigUint, base: Base, min_width: Option<usize>) -> DigitVector {
    let beta = base.beta();
    let mut digits: Vec<u32> = if value.is_zero() {
        vec![0]
    } else if beta <= 256 {
        value
            .to_radix_le(beta)
            .into_iter()
            .map(u32::from)
            .collect()
    } else {
        let mut rest = value.clone();
        let mut out = Vec::new();
        while !rest.is_zero() {
            let (q, r) = rest.div_rem(&BigUint::from(beta));
            out.push(r.to_u32().expect("remainder below a u32 base"));
            rest = q;
        }
        out
    };
    if let Some(width) = min_width {
        if digits.len() < width {
            digits.resize(width, 0);
        }
    }
    DigitVector { base, digits }
}

/// `Σ digitᵢ · β^(i-1)` over LSB-first digits.
pub fn valuation(v: &GeneralizedDigitVector) -> BigUint {
    horner(v.base, v.digits.iter().copied())
}

fn horner(base: Base, lsb_digits: impl DoubleEndedIterator<Item = u64>) -> BigUint {
    let beta = BigUint::from(base.beta());
    lsb_digits.rev().fold(BigUint::zero(), |acc, d| acc * &beta + d)
}

fn write_digits(
    f: &mut fmt::Formatter<'_>,
    base: Base,
    lsb_digits: impl DoubleEndedIterator<Item = u64> + Clone,
) -> fmt::Result {
    let bracketed = lsb_digits
        .clone()
        .any(|d| d >= 10 || d >= u64::from(base.beta()));
    write!(f, "{}:", base)?;
    if bracketed {
        f.write_str("[")?;
        for (i, d) in lsb_digits.rev().enumerate() {
            if i > 0 {
                f.write_str(",")?;
            }
            write!(f, "{d}")?;
        }
        f.write_str("]")
    } else {
        for d in lsb_digits.rev() {
            write!(f, "{d}")?;
        }
        Ok(())
    }
}

/// Parses `β:digits` or `β:[d,d,...]` into a base and LSB-first digits.
fn parse_digit_string(s: &str) -> Result<(Base, Vec<u64>)> {
    let s = s.trim();
    let (base, body) = s
        .split_once(':')
        .ok_or_else(|| Error::Parse(format!("{s:?}: expected `base:digits`")))?;
    let beta: u32 = base
        .trim()
        .parse()
        .map_err(|_| Error::Parse(format!("{s:?}: bad base {base:?}")))?;
    let base = Base::new(beta)?;
    let body = body.trim();
    let mut digits = if let Some(inner) = body.strip_prefix('[') {
        let inner = inner
            .strip_suffix(']')
            .ok_or_else(|| Error::Parse(format!("{s:?}: unterminated `[`")))?;
        inner
            .split(',')
            .map(|d| {
                d.trim()
                    .parse::<u64>()
                    .map_err(|_| Error::Parse(format!("{s:?}: bad digit {:?}", d.trim())))
            })
            .collect::<Result<Vec<_>>>()?
    } else {
        body.chars()
            .map(|c| {
                c.to_digit(10)
                    .map(u64::from)
                    .ok_or_else(|| Error::Parse(format!("{s:?}: bad digit {c:?}")))
            })
            .collect::<Result<Vec<_>>>()?
    };
    if digits.is_empty() {
        return Err(Error::EmptyDigits);
    }
    digits.reverse();
    Ok((base, digits))
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn b(beta: u32) -> Base {
        Base::new(beta).unwrap()
    }

    #[test]
    fn base_rejects_unary() {
        assert_eq!(Base::new(1), Err(Error::InvalidBase(1)));
        assert_eq!(Base::new(0), Err(Error::InvalidBase(0)));
    }

    #[test]
    fn fourteen_in_ternary() {
        let v = to_digits(&BigUint::from(14u32), b(3), None);
        assert_eq!(v.digits(), &[2, 1, 1]);
        assert_eq!(v.to_string(), "3:112");
    }

    #[test]
    fn seventeen_in_ternary() {
        assert_eq!(DigitVector::from_u64(17, b(3)).to_string(), "3:122");
    }

    #[test]
    fn zero_padded() {
        let v = to_digits(&BigUint::zero(), b(2), Some(4));
        assert_eq!(v.digits(), &[0, 0, 0, 0]);
        assert_eq!(to_digits(&BigUint::zero(), b(7), None).digits(), &[0]);
    }

    #[test]
    fn generalized_valuations() {
        let v = GeneralizedDigitVector::from_lsb(b(3), vec![0, 3, 3, 0]).unwrap();
        assert_eq!(v.value(), BigUint::from(36u32));
        assert_eq!(v.to_string(), "3:[0,3,3,0]");
        let v: GeneralizedDigitVector = "2:[2,1,1,0]".parse().unwrap();
        assert_eq!(v.value(), BigUint::from(22u32));
        let zero = GeneralizedDigitVector::from_lsb(b(5), vec![0; 6]).unwrap();
        assert!(zero.value().is_zero());
    }

    #[test]
    fn shifts() {
        let five = DigitVector::from_u64(5, b(2));
        let up = five.shift_up(2);
        assert_eq!(up.to_string(), "2:10100");
        assert_eq!(up.value(), BigUint::from(20u32));
        assert_eq!(five.shift_down(2).value(), BigUint::from(1u32));
        assert_eq!(five.shift_up(0), five);
        assert_eq!(five.shift_down(9).digits(), &[0]);
    }

    #[test]
    fn parse_rejects_garbage() {
        assert!("3:0123".parse::<DigitVector>().is_err());
        assert!("1:0".parse::<DigitVector>().is_err());
        assert!("10".parse::<DigitVector>().is_err());
        assert!("2:".parse::<DigitVector>().is_err());
        assert!("2:[1,2".parse::<DigitVector>().is_err());
        assert_eq!(
            "3:0122".parse::<DigitVector>().unwrap().digits(),
            &[2, 2, 1, 0]
        );
        assert_eq!(
            "16:[15,0]".parse::<DigitVector>().unwrap().value(),
            BigUint::from(240u32)
        );
    }

    #[test]
    fn large_base_round_trip() {
        let base = b(1000);
        let x = BigUint::from(123_456_789u64);
        let v = to_digits(&x, base, None);
        assert_eq!(v.digits(), &[789, 456, 123]);
        assert_eq!(v.value(), x);
        assert_eq!(v.to_string(), "1000:[123,456,789]");
    }

    #[test]
    fn canonicalize_carries_overflowing_digits() {
        let g = GeneralizedDigitVector::from_lsb(b(2), vec![0, 2, 0, 2]).unwrap();
        let c = g.canonicalize();
        assert_eq!(c.value(), BigUint::from(20u32));
        assert!(c.digits().iter().all(|&d| d < 2));
    }

    #[test]
    fn round_trip_exhaustive_small() {
        for beta in 2..=9 {
            for x in 0u64..2000 {
                let v = DigitVector::from_u64(x, b(beta));
                assert_eq!(v.value(), BigUint::from(x));
            }
        }
    }

    proptest! {
        #[test]
        fn round_trip(x in 0u64..1_000_000, beta in 2u32..=9) {
            let v = DigitVector::from_u64(x, b(beta));
            prop_assert!(v.digits().iter().all(|&d| d < beta));
            prop_assert_eq!(v.value(), BigUint::from(x));
            let parsed: DigitVector = v.to_string().parse().unwrap();
            prop_assert_eq!(parsed, v);
        }

        #[test]
        fn shift_laws(x in 0u64..1_000_000, beta in 2u32..=9, t in 0usize..6) {
            let v = DigitVector::from_u64(x, b(beta));
            let scale = u64::from(beta).pow(t as u32);
            prop_assert_eq!(v.shift_up(t).value(), BigUint::from(x * scale));
            prop_assert_eq!(v.shift_down(t).value(), BigUint::from(x / scale));
        }
    }
}
