//! Property laboratory: adjudicates the multi-number CVT/XOR laws against
//! direct evaluation, collecting counterexamples where a law fails.
//!
//! | id    | claim                                                        |
//! |-------|--------------------------------------------------------------|
//! | `P1`  | `CVT(X ×K) = K·X` for even K, `(K-1)·X` for odd K            |
//! | `P1g` | `CVT(X ×K) = (K - K mod β)·X` whenever `K mod β ∈ {0, 1}`    |
//! | `P2a` | `CVT(S·X₁..S·Xₙ) = S·CVT(X₁..Xₙ)` for `S = βᵗ`               |
//! | `P2b` | `CVT(⌊X₁/S⌋..) = ⌊P/(S+m)⌋`, `m = #odd/(S/2)`                 |
//! | `P3`  | `CVT(X.., Y..) = CVT(X..) + CVT(Y..)`                         |
//! | `P4`  | `CVT(Xᵉ ×c) = CVT(X ×c)·X^(e-1)`                              |
//! | `P5`  | `XOR(X ×K) = 0` for even K, `X` for odd K                     |
//! | `P5g` | `XOR(X ×K) = 0` if `K mod β = 0`, `X` if `K mod β = 1`        |
//! | `P6a` | `XOR(S·X₁..) = S·XOR(X₁..)`                                   |
//! | `P6b` | `XOR(⌊X₁/S⌋..) = ⌊Q/S⌋`                                       |
//! | `P7`  | `XOR(X.., Y..) = XOR(X..) ⊕ XOR(Y..)`, ⊕ the base-β pair XOR  |
//! | `P8`  | `XOR(Xᵉ ×c) = XOR(X ×c)·X^(e-1)`                              |
//!
//! Campaigns are deterministic in the seed: trial `i` of property `p` draws
//! from its own generator, and aggregation keeps the smallest
//! counterexamples in input order, so serial and parallel runs agree.

use std::fmt;
use std::str::FromStr;

use num_bigint::{BigUint, RandBigInt};
use num_integer::Integer;
use num_traits::{ToPrimitive, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::digitvec::{to_digits, Base, DigitVector};
use crate::error::{Error, Result};
use crate::serde_nat;
use crate::transforms::{column_sums, transform, xor_pair};

/// Enumerations above this many trials are refused.
pub const EXHAUSTIVE_LIMIT: u64 = 50_000_000;

/// Counterexamples kept per verdict unless configured otherwise.
pub const DEFAULT_MAX_COUNTEREXAMPLES: usize = 16;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum PropertyId {
    P1,
    P1g,
    P2a,
    P2b,
    P3,
    P4,
    P5,
    P5g,
    P6a,
    P6b,
    P7,
    P8,
}

/// Which kind of input a property consumes.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum InputShape {
    Identical,
    Scaled,
    Concat,
    Power,
}

impl PropertyId {
    pub const ALL: [PropertyId; 12] = [
        PropertyId::P1,
        PropertyId::P1g,
        PropertyId::P2a,
        PropertyId::P2b,
        PropertyId::P3,
        PropertyId::P4,
        PropertyId::P5,
        PropertyId::P5g,
        PropertyId::P6a,
        PropertyId::P6b,
        PropertyId::P7,
        PropertyId::P8,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            PropertyId::P1 => "P1",
            PropertyId::P1g => "P1g",
            PropertyId::P2a => "P2a",
            PropertyId::P2b => "P2b",
            PropertyId::P3 => "P3",
            PropertyId::P4 => "P4",
            PropertyId::P5 => "P5",
            PropertyId::P5g => "P5g",
            PropertyId::P6a => "P6a",
            PropertyId::P6b => "P6b",
            PropertyId::P7 => "P7",
            PropertyId::P8 => "P8",
        }
    }

    pub fn shape(self) -> InputShape {
        use PropertyId::*;
        match self {
            P1 | P1g | P5 | P5g => InputShape::Identical,
            P2a | P2b | P6a | P6b => InputShape::Scaled,
            P3 | P7 => InputShape::Concat,
            P4 | P8 => InputShape::Power,
        }
    }

    /// Position in [`PropertyId::ALL`]; also the generator stream id.
    fn ordinal(self) -> u64 {
        PropertyId::ALL.iter().position(|&p| p == self).unwrap() as u64
    }

    /// Expands `P2`/`P6` to both parts and `all` to every property.
    pub fn parse_list(s: &str) -> Result<Vec<PropertyId>> {
        let mut out = Vec::new();
        for item in s.split(',').map(str::trim).filter(|t| !t.is_empty()) {
            let lower = item.to_ascii_lowercase();
            let expanded: Vec<PropertyId> = match lower.as_str() {
                "all" => PropertyId::ALL.to_vec(),
                "p2" => vec![PropertyId::P2a, PropertyId::P2b],
                "p6" => vec![PropertyId::P6a, PropertyId::P6b],
                _ => vec![item.parse()?],
            };
            for p in expanded {
                if !out.contains(&p) {
                    out.push(p);
                }
            }
        }
        if out.is_empty() {
            return Err(Error::Parse("empty property list".into()));
        }
        out.sort();
        Ok(out)
    }
}

impl fmt::Display for PropertyId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for PropertyId {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        PropertyId::ALL
            .into_iter()
            .find(|p| p.as_str().eq_ignore_ascii_case(s.trim()))
            .ok_or_else(|| Error::Parse(format!("unknown property {s:?}")))
    }
}

impl Serialize for PropertyId {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(self.as_str())
    }
}

/// One trial's operands. The derived order is lexicographic over fields,
/// which is the order counterexamples are reported in.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum TrialInput {
    /// `copies` copies of `x`.
    Identical {
        #[serde(with = "serde_nat")]
        x: BigUint,
        copies: usize,
    },
    /// Operands scaled up / divided down by `β^shift`.
    Scaled {
        #[serde(with = "serde_nat::vec")]
        xs: Vec<BigUint>,
        shift: u32,
    },
    /// Two operand lists and their concatenation.
    Concat {
        #[serde(with = "serde_nat::vec")]
        xs: Vec<BigUint>,
        #[serde(with = "serde_nat::vec")]
        ys: Vec<BigUint>,
    },
    /// `copies` copies of `x^exponent`.
    Power {
        #[serde(with = "serde_nat")]
        x: BigUint,
        copies: usize,
        exponent: u32,
    },
}

impl TrialInput {
    pub fn shape(&self) -> InputShape {
        match self {
            TrialInput::Identical { .. } => InputShape::Identical,
            TrialInput::Scaled { .. } => InputShape::Scaled,
            TrialInput::Concat { .. } => InputShape::Concat,
            TrialInput::Power { .. } => InputShape::Power,
        }
    }
}

impl fmt::Display for TrialInput {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fn list(xs: &[BigUint]) -> String {
            xs.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(",")
        }
        match self {
            TrialInput::Identical { x, copies } => write!(f, "x={x} copies={copies}"),
            TrialInput::Scaled { xs, shift } => write!(f, "xs=[{}] shift={shift}", list(xs)),
            TrialInput::Concat { xs, ys } => write!(f, "xs=[{}] ys=[{}]", list(xs), list(ys)),
            TrialInput::Power {
                x,
                copies,
                exponent,
            } => write!(f, "x={x} copies={copies} exponent={exponent}"),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Outcome {
    Holds,
    Fails,
    NotEvaluable,
}

/// Both sides of one claimed equality on one input.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Evaluation {
    pub property: PropertyId,
    pub outcome: Outcome,
    pub claimed: Option<BigUint>,
    pub actual: Option<BigUint>,
    /// P3 only: the column-remainder condition under which the law holds.
    pub condition: Option<bool>,
    /// P2b only: whether `m` came out integral.
    pub m_integral: Option<bool>,
    pub note: Option<&'static str>,
}

impl Evaluation {
    fn compare(property: PropertyId, claimed: BigUint, actual: BigUint) -> Self {
        let outcome = if claimed == actual {
            Outcome::Holds
        } else {
            Outcome::Fails
        };
        Evaluation {
            property,
            outcome,
            claimed: Some(claimed),
            actual: Some(actual),
            condition: None,
            m_integral: None,
            note: None,
        }
    }

    fn not_evaluable(property: PropertyId, note: &'static str) -> Self {
        Evaluation {
            property,
            outcome: Outcome::NotEvaluable,
            claimed: None,
            actual: None,
            condition: None,
            m_integral: None,
            note: Some(note),
        }
    }
}

fn digits_of(values: &[BigUint], base: Base) -> Vec<DigitVector> {
    values.iter().map(|v| to_digits(v, base, None)).collect()
}

fn cvt_value(values: &[BigUint], base: Base) -> Result<BigUint> {
    Ok(transform(&digits_of(values, base))?.cvt_value())
}

fn xor_value(values: &[BigUint], base: Base) -> Result<BigUint> {
    Ok(transform(&digits_of(values, base))?.xor_value())
}

fn shape_error(property: PropertyId, input: &TrialInput) -> Error {
    Error::InvalidConfig(format!(
        "{property} expects {:?} input, got {:?}",
        property.shape(),
        input.shape()
    ))
}

/// Evaluates one property on one input from the transform definitions.
pub fn evaluate(property: PropertyId, base: Base, input: &TrialInput) -> Result<Evaluation> {
    use PropertyId::*;
    if property.shape() != input.shape() {
        return Err(shape_error(property, input));
    }
    let beta = u64::from(base.beta());
    match (property, input) {
        (P1 | P1g | P5 | P5g, TrialInput::Identical { x, copies }) => {
            if *copies == 0 {
                return Err(Error::InvalidConfig("copies must be at least 1".into()));
            }
            let k = *copies as u64;
            let operands = vec![x.clone(); *copies];
            let ev = match property {
                P1 => {
                    let factor = if k.is_multiple_of(2) { k } else { k - 1 };
                    Evaluation::compare(P1, x * factor, cvt_value(&operands, base)?)
                }
                P5 => {
                    let claimed = if k.is_multiple_of(2) { BigUint::zero() } else { x.clone() };
                    Evaluation::compare(P5, claimed, xor_value(&operands, base)?)
                }
                P1g | P5g => match k % beta {
                    r @ (0 | 1) => {
                        let claimed = if property == P1g {
                            x * (k - r)
                        } else if r == 0 {
                            BigUint::zero()
                        } else {
                            x.clone()
                        };
                        let actual = if property == P1g {
                            cvt_value(&operands, base)?
                        } else {
                            xor_value(&operands, base)?
                        };
                        Evaluation::compare(property, claimed, actual)
                    }
                    _ => Evaluation::not_evaluable(property, "copies mod base not in {0, 1}"),
                },
                _ => unreachable!(),
            };
            Ok(ev)
        }
        (P2a | P2b | P6a | P6b, TrialInput::Scaled { xs, shift }) => {
            if xs.is_empty() {
                return Err(Error::NoOperands);
            }
            if *shift == 0 {
                return Err(Error::InvalidConfig("scalar must be β^t with t >= 1".into()));
            }
            let scalar = base.pow(*shift);
            let ev = match property {
                P2a => {
                    let scaled: Vec<BigUint> = xs.iter().map(|x| x * &scalar).collect();
                    let p = cvt_value(xs, base)?;
                    Evaluation::compare(P2a, &scalar * p, cvt_value(&scaled, base)?)
                }
                P6a => {
                    let scaled: Vec<BigUint> = xs.iter().map(|x| x * &scalar).collect();
                    let q = xor_value(xs, base)?;
                    Evaluation::compare(P6a, &scalar * q, xor_value(&scaled, base)?)
                }
                P6b => {
                    let divided: Vec<BigUint> = xs.iter().map(|x| x / &scalar).collect();
                    let q = xor_value(xs, base)?;
                    Evaluation::compare(P6b, q / &scalar, xor_value(&divided, base)?)
                }
                P2b => {
                    if scalar.is_odd() {
                        Evaluation::not_evaluable(P2b, "scalar/2 is not an integer (odd base)")
                    } else {
                        let half: BigUint = &scalar >> 1u32;
                        let odd = xs.iter().filter(|x| x.is_odd()).count();
                        let p = cvt_value(xs, base)?;
                        // ⌊P / (S + odd/half)⌋ = ⌊P·half / (S·half + odd)⌋
                        let claimed = (&p * &half) / (&scalar * &half + odd);
                        let divided: Vec<BigUint> = xs.iter().map(|x| x / &scalar).collect();
                        let mut ev =
                            Evaluation::compare(P2b, claimed, cvt_value(&divided, base)?);
                        ev.m_integral = Some((BigUint::from(odd) % &half).is_zero());
                        ev
                    }
                }
                _ => unreachable!(),
            };
            Ok(ev)
        }
        (P3 | P7, TrialInput::Concat { xs, ys }) => {
            if xs.is_empty() || ys.is_empty() {
                return Err(Error::NoOperands);
            }
            let all: Vec<BigUint> = xs.iter().chain(ys).cloned().collect();
            let mut ev = if property == P3 {
                let claimed = cvt_value(xs, base)? + cvt_value(ys, base)?;
                let mut ev = Evaluation::compare(P3, claimed, cvt_value(&all, base)?);
                ev.condition = Some(no_remainder_overflow(xs, ys, base)?);
                ev
            } else {
                let p = to_digits(&xor_value(xs, base)?, base, None);
                let q = to_digits(&xor_value(ys, base)?, base, None);
                Evaluation::compare(P7, xor_pair(&p, &q)?.value(), xor_value(&all, base)?)
            };
            if xs.len() != ys.len() {
                ev.note = Some("operand lists differ in length");
            }
            Ok(ev)
        }
        (P4 | P8, TrialInput::Power {
            x,
            copies,
            exponent,
        }) => {
            if *copies == 0 || *exponent == 0 {
                return Err(Error::InvalidConfig(
                    "copies and exponent must be at least 1".into(),
                ));
            }
            let plain = vec![x.clone(); *copies];
            let powered = vec![x.pow(*exponent); *copies];
            let factor = x.pow(*exponent - 1);
            let ev = if property == P4 {
                let p = cvt_value(&plain, base)?;
                Evaluation::compare(P4, p * factor, cvt_value(&powered, base)?)
            } else {
                let p = xor_value(&plain, base)?;
                Evaluation::compare(P8, p * factor, xor_value(&powered, base)?)
            };
            Ok(ev)
        }
        _ => Err(shape_error(property, input)),
    }
}

/// True iff no column has `(Σx mod β) + (Σy mod β) >= β`, the exact
/// condition for CVT to be additive over concatenation.
pub fn no_remainder_overflow(xs: &[BigUint], ys: &[BigUint], base: Base) -> Result<bool> {
    let beta = u64::from(base.beta());
    let (_, sx) = column_sums(&digits_of(xs, base))?;
    let (_, sy) = column_sums(&digits_of(ys, base))?;
    let width = sx.len().max(sy.len());
    Ok((0..width).all(|i| {
        let rx = sx.get(i).copied().unwrap_or(0) % beta;
        let ry = sy.get(i).copied().unwrap_or(0) % beta;
        rx + ry < beta
    }))
}

/// P1 and its generalized form on `copies` copies of `x`.
pub fn check_p1_cvt_identical(x: &BigUint, copies: usize, base: Base) -> Result<[Evaluation; 2]> {
    let input = TrialInput::Identical {
        x: x.clone(),
        copies,
    };
    Ok([
        evaluate(PropertyId::P1, base, &input)?,
        evaluate(PropertyId::P1g, base, &input)?,
    ])
}

/// P2a and P2b with scalar `β^shift`.
pub fn check_p2_cvt_scaling(xs: &[BigUint], shift: u32, base: Base) -> Result<[Evaluation; 2]> {
    let input = TrialInput::Scaled {
        xs: xs.to_vec(),
        shift,
    };
    Ok([
        evaluate(PropertyId::P2a, base, &input)?,
        evaluate(PropertyId::P2b, base, &input)?,
    ])
}

pub fn check_p3_cvt_concat(xs: &[BigUint], ys: &[BigUint], base: Base) -> Result<Evaluation> {
    let input = TrialInput::Concat {
        xs: xs.to_vec(),
        ys: ys.to_vec(),
    };
    evaluate(PropertyId::P3, base, &input)
}

pub fn check_p4_cvt_power(x: &BigUint, copies: usize, exponent: u32, base: Base) -> Result<Evaluation> {
    let input = TrialInput::Power {
        x: x.clone(),
        copies,
        exponent,
    };
    evaluate(PropertyId::P4, base, &input)
}

pub fn check_p5_xor_identical(x: &BigUint, copies: usize, base: Base) -> Result<[Evaluation; 2]> {
    let input = TrialInput::Identical {
        x: x.clone(),
        copies,
    };
    Ok([
        evaluate(PropertyId::P5, base, &input)?,
        evaluate(PropertyId::P5g, base, &input)?,
    ])
}

pub fn check_p6_xor_scaling(xs: &[BigUint], shift: u32, base: Base) -> Result<[Evaluation; 2]> {
    let input = TrialInput::Scaled {
        xs: xs.to_vec(),
        shift,
    };
    Ok([
        evaluate(PropertyId::P6a, base, &input)?,
        evaluate(PropertyId::P6b, base, &input)?,
    ])
}

pub fn check_p7_xor_concat(xs: &[BigUint], ys: &[BigUint], base: Base) -> Result<Evaluation> {
    let input = TrialInput::Concat {
        xs: xs.to_vec(),
        ys: ys.to_vec(),
    };
    evaluate(PropertyId::P7, base, &input)
}

pub fn check_p8_xor_power(x: &BigUint, copies: usize, exponent: u32, base: Base) -> Result<Evaluation> {
    let input = TrialInput::Power {
        x: x.clone(),
        copies,
        exponent,
    };
    evaluate(PropertyId::P8, base, &input)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Counterexample {
    pub input: TrialInput,
    #[serde(with = "serde_nat")]
    pub claimed: BigUint,
    #[serde(with = "serde_nat")]
    pub actual: BigUint,
}

impl Counterexample {
    /// Re-evaluates from scratch; true if the recorded failure reproduces.
    pub fn replay(&self, property: PropertyId, base: Base) -> bool {
        match evaluate(property, base, &self.input) {
            Ok(ev) => {
                ev.outcome == Outcome::Fails
                    && ev.claimed.as_ref() == Some(&self.claimed)
                    && ev.actual.as_ref() == Some(&self.actual)
            }
            Err(_) => false,
        }
    }
}

/// Agreement between P3's outcome and its column-remainder condition.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct ConditionTally {
    pub checked: u64,
    pub agreed: u64,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct PropertyVerdict {
    pub property_id: PropertyId,
    pub base: Base,
    pub trials: u64,
    pub holds_count: u64,
    /// Failing trials, duplicates included.
    pub failure_count: u64,
    pub not_evaluable: u64,
    /// Smallest distinct failing inputs, sorted; at most the configured cap.
    pub counterexamples: Vec<Counterexample>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub condition: Option<ConditionTally>,
    pub condition_note: String,
}

impl PropertyVerdict {
    pub fn holds_on_all_evaluated(&self) -> bool {
        self.failure_count == 0
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Trials {
    /// Seeded random draws.
    Random(u64),
    /// Every input of the configured width.
    Exhaustive,
    /// Exhaustive over widths 1..=4 (while within budget), then `n` seeded
    /// random draws with widening widths.
    Search(u64),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct TrialConfig {
    pub base: Base,
    /// Operands per list (K); also the bound on copies in exhaustive mode.
    pub operand_count: usize,
    /// Operand width in base-β digits.
    pub width: u32,
    pub trials: Trials,
    pub seed: u64,
    pub max_counterexamples: usize,
}

impl TrialConfig {
    pub fn new(base: Base, operand_count: usize, width: u32, trials: Trials, seed: u64) -> Self {
        TrialConfig {
            base,
            operand_count,
            width,
            trials,
            seed,
            max_counterexamples: DEFAULT_MAX_COUNTEREXAMPLES,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.operand_count == 0 {
            return Err(Error::InvalidConfig("operand count must be at least 1".into()));
        }
        if self.width == 0 {
            return Err(Error::InvalidConfig("width must be at least 1".into()));
        }
        match self.trials {
            Trials::Random(0) => Err(Error::InvalidConfig("trial count must be at least 1".into())),
            _ => Ok(()),
        }
    }
}

/// Largest exponent drawn for P4/P8 inputs.
const MAX_EXPONENT: u32 = 4;
/// Largest shift drawn for scaled inputs.
const MAX_SHIFT: u32 = 3;

fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

fn trial_rng(seed: u64, property: PropertyId, index: u64) -> ChaCha8Rng {
    let s = splitmix64(seed ^ splitmix64(property.ordinal().wrapping_add(1) << 32));
    ChaCha8Rng::seed_from_u64(splitmix64(s ^ splitmix64(index)))
}

/// Copy counts `c` with `c mod β ∈ {0, 1}`, ascending, up to `limit`.
fn generalized_copies(beta: u64, limit: u64) -> Vec<usize> {
    (1..=limit.max(beta + 1))
        .filter(|c| c % beta <= 1)
        .map(|c| c as usize)
        .collect()
}

fn random_input(
    property: PropertyId,
    base: Base,
    k: usize,
    width: u32,
    rng: &mut ChaCha8Rng,
) -> TrialInput {
    let bound = base.pow(width);
    let value = |rng: &mut ChaCha8Rng| rng.gen_biguint_below(&bound);
    let max_copies = 2 * k + 1;
    match property.shape() {
        InputShape::Identical => {
            let x = value(rng);
            let copies = if matches!(property, PropertyId::P1g | PropertyId::P5g) {
                let domain = generalized_copies(u64::from(base.beta()), max_copies as u64);
                domain[rng.gen_range(0..domain.len())]
            } else {
                rng.gen_range(1..=max_copies)
            };
            TrialInput::Identical { x, copies }
        }
        InputShape::Scaled => {
            let xs = (0..k).map(|_| value(rng)).collect();
            TrialInput::Scaled {
                xs,
                shift: rng.gen_range(1..=MAX_SHIFT),
            }
        }
        InputShape::Concat => {
            let xs = (0..k).map(|_| value(rng)).collect();
            let ys = (0..k).map(|_| value(rng)).collect();
            TrialInput::Concat { xs, ys }
        }
        InputShape::Power => {
            let x = value(rng);
            TrialInput::Power {
                x,
                copies: rng.gen_range(1..=max_copies),
                exponent: rng.gen_range(1..=MAX_EXPONENT),
            }
        }
    }
}

/// Index-addressable enumeration of every input of one width.
struct Enumeration {
    property: PropertyId,
    range: u64,
    k: usize,
    copies: Vec<usize>,
    total: u64,
}

impl Enumeration {
    fn new(property: PropertyId, base: Base, k: usize, width: u32) -> Result<Self> {
        let too_large = || {
            Error::InvalidConfig(format!(
                "exhaustive {property} at width {width}, K={k} exceeds {EXHAUSTIVE_LIMIT} trials"
            ))
        };
        let range = base.pow(width).to_u64().ok_or_else(too_large)?;
        let beta = u64::from(base.beta());
        let copies: Vec<usize> = match property {
            PropertyId::P1g | PropertyId::P5g => generalized_copies(beta, k as u64),
            _ => (1..=k).collect(),
        };
        let pow = |n: usize| -> Option<u64> { range.checked_pow(u32::try_from(n).ok()?) };
        let total = match property.shape() {
            InputShape::Identical => range.checked_mul(copies.len() as u64),
            InputShape::Scaled => pow(k).and_then(|t| t.checked_mul(2)),
            InputShape::Concat => pow(2 * k),
            InputShape::Power => range
                .checked_mul(copies.len() as u64)
                .and_then(|t| t.checked_mul(3)),
        }
        .filter(|&t| t <= EXHAUSTIVE_LIMIT)
        .ok_or_else(too_large)?;
        Ok(Enumeration {
            property,
            range,
            k,
            copies,
            total,
        })
    }

    fn input(&self, mut index: u64) -> TrialInput {
        let mut take = |radix: u64| {
            let digit = index % radix;
            index /= radix;
            digit
        };
        match self.property.shape() {
            InputShape::Identical => {
                let copies = self.copies[take(self.copies.len() as u64) as usize];
                TrialInput::Identical {
                    x: BigUint::from(take(self.range)),
                    copies,
                }
            }
            InputShape::Scaled => {
                let shift = take(2) as u32 + 1;
                let xs = (0..self.k).map(|_| BigUint::from(take(self.range))).collect();
                TrialInput::Scaled { xs, shift }
            }
            InputShape::Concat => {
                let xs = (0..self.k).map(|_| BigUint::from(take(self.range))).collect();
                let ys = (0..self.k).map(|_| BigUint::from(take(self.range))).collect();
                TrialInput::Concat { xs, ys }
            }
            InputShape::Power => {
                let exponent = take(3) as u32 + 1;
                let copies = self.copies[take(self.copies.len() as u64) as usize];
                TrialInput::Power {
                    x: BigUint::from(take(self.range)),
                    copies,
                    exponent,
                }
            }
        }
    }
}

#[derive(Debug, Clone, Default)]
struct Tally {
    trials: u64,
    holds: u64,
    failures: u64,
    skipped: u64,
    counterexamples: Vec<Counterexample>,
    condition_checked: u64,
    condition_agreed: u64,
    m_nonintegral: u64,
    unequal_lists: u64,
}

impl Tally {
    fn record(mut self, input: TrialInput, ev: Evaluation, cap: usize) -> Self {
        self.trials += 1;
        match ev.outcome {
            Outcome::Holds => self.holds += 1,
            Outcome::NotEvaluable => self.skipped += 1,
            Outcome::Fails => {
                self.failures += 1;
                let cex = Counterexample {
                    input,
                    claimed: ev.claimed.expect("evaluated"),
                    actual: ev.actual.expect("evaluated"),
                };
                self.counterexamples = merge_smallest(
                    std::mem::take(&mut self.counterexamples),
                    vec![cex],
                    cap,
                );
            }
        }
        if let Some(cond) = ev.condition {
            self.condition_checked += 1;
            if cond == (ev.outcome == Outcome::Holds) {
                self.condition_agreed += 1;
            }
        }
        if ev.m_integral == Some(false) {
            self.m_nonintegral += 1;
        }
        if ev.note == Some("operand lists differ in length") {
            self.unequal_lists += 1;
        }
        self
    }

    fn merge(mut self, other: Tally, cap: usize) -> Self {
        self.trials += other.trials;
        self.holds += other.holds;
        self.failures += other.failures;
        self.skipped += other.skipped;
        self.condition_checked += other.condition_checked;
        self.condition_agreed += other.condition_agreed;
        self.m_nonintegral += other.m_nonintegral;
        self.unequal_lists += other.unequal_lists;
        self.counterexamples = merge_smallest(self.counterexamples, other.counterexamples, cap);
        self
    }

    fn into_verdict(self, property: PropertyId, base: Base) -> PropertyVerdict {
        let condition = (self.condition_checked > 0).then_some(ConditionTally {
            checked: self.condition_checked,
            agreed: self.condition_agreed,
        });
        let condition_note = condition_note(property, base, &self);
        PropertyVerdict {
            property_id: property,
            base,
            trials: self.trials,
            holds_count: self.holds,
            failure_count: self.failures,
            not_evaluable: self.skipped,
            counterexamples: self.counterexamples,
            condition,
            condition_note,
        }
    }
}

/// Sorted union keeping the `cap` smallest distinct inputs. Associative and
/// commutative, so any reduction order yields the same list.
fn merge_smallest(mut a: Vec<Counterexample>, b: Vec<Counterexample>, cap: usize) -> Vec<Counterexample> {
    a.extend(b);
    a.sort_by(|x, y| x.input.cmp(&y.input));
    a.dedup_by(|x, y| x.input == y.input);
    a.truncate(cap);
    a
}

fn condition_note(property: PropertyId, base: Base, t: &Tally) -> String {
    use PropertyId::*;
    let beta = base.beta();
    let mut note = match property {
        P1 => "even/odd copy rule; exact in base 2 only".to_string(),
        P1g | P5g => format!("generalized rule: copies mod {beta} in {{0, 1}}"),
        P2a | P6a => "shift law: scaling by a power of the base".to_string(),
        P6b => "shift law: floor division by a power of the base".to_string(),
        P2b if t.skipped > 0 && t.skipped == t.trials => {
            format!("not evaluable: scalar {beta}^t is odd, m undefined")
        }
        P2b => format!(
            "m = odd operands / (scalar/2); non-integral m on {} of {} trials",
            t.m_nonintegral, t.trials
        ),
        P3 => format!(
            "holds iff every column has (sum_x mod {beta}) + (sum_y mod {beta}) < {beta}; \
             biconditional agreed on {} of {} trials",
            t.condition_agreed, t.condition_checked
        ),
        P4 | P8 => "power law; expected exact in base 2".to_string(),
        P5 => "even/odd copy rule; exact in base 2 only".to_string(),
        P7 => "concatenation law via pairwise base-β XOR".to_string(),
    };
    if t.unequal_lists > 0 {
        note.push_str(&format!("; {} trial(s) with unequal list lengths", t.unequal_lists));
    }
    note
}

fn tally_range<F>(len: u64, parallel: bool, cap: usize, f: F) -> Tally
where
    F: Fn(u64) -> (TrialInput, Evaluation) + Sync + Send,
{
    if parallel {
        (0..len)
            .into_par_iter()
            .fold(Tally::default, |t, i| {
                let (input, ev) = f(i);
                t.record(input, ev, cap)
            })
            .reduce(Tally::default, |a, b| a.merge(b, cap))
    } else {
        (0..len).fold(Tally::default(), |t, i| {
            let (input, ev) = f(i);
            t.record(input, ev, cap)
        })
    }
}

fn evaluate_generated(property: PropertyId, base: Base, input: TrialInput) -> (TrialInput, Evaluation) {
    let ev = evaluate(property, base, &input).expect("generated inputs match their property");
    (input, ev)
}

fn run_property(config: &TrialConfig, property: PropertyId, parallel: bool) -> Result<PropertyVerdict> {
    let base = config.base;
    let k = config.operand_count;
    let cap = config.max_counterexamples;
    let random = |count: u64, widen: bool| {
        tally_range(count, parallel, cap, |i| {
            let mut rng = trial_rng(config.seed, property, i);
            let width = if widen {
                1 + (i % u64::from(config.width.max(1) + 4)) as u32
            } else {
                config.width
            };
            evaluate_generated(property, base, random_input(property, base, k, width, &mut rng))
        })
    };
    let tally = match config.trials {
        Trials::Random(n) => random(n, false),
        Trials::Exhaustive => {
            let e = Enumeration::new(property, base, k, config.width)?;
            tally_range(e.total, parallel, cap, |i| evaluate_generated(property, base, e.input(i)))
        }
        Trials::Search(n) => {
            let mut tally = Tally::default();
            for width in 1..=4 {
                match Enumeration::new(property, base, k, width) {
                    Ok(e) => {
                        let t = tally_range(e.total, parallel, cap, |i| {
                            evaluate_generated(property, base, e.input(i))
                        });
                        tally = tally.merge(t, cap);
                    }
                    Err(_) => break,
                }
            }
            tally.merge(random(n, true), cap)
        }
    };
    Ok(tally.into_verdict(property, base))
}

fn campaign(config: &TrialConfig, properties: &[PropertyId], parallel: bool) -> Result<Vec<PropertyVerdict>> {
    config.validate()?;
    properties
        .iter()
        .map(|&p| run_property(config, p, parallel))
        .collect()
}

/// Runs every selected property under `config`, fanning trials out across
/// the rayon pool. Output equals [`run_campaign_serial`].
pub fn run_campaign(config: &TrialConfig, properties: &[PropertyId]) -> Result<Vec<PropertyVerdict>> {
    campaign(config, properties, true)
}

pub fn run_campaign_serial(config: &TrialConfig, properties: &[PropertyId]) -> Result<Vec<PropertyVerdict>> {
    campaign(config, properties, false)
}

/// Adjudicates one property on explicitly supplied inputs.
pub fn run_on_inputs(
    property: PropertyId,
    base: Base,
    inputs: &[TrialInput],
    max_counterexamples: usize,
) -> Result<PropertyVerdict> {
    let mut tally = Tally::default();
    for input in inputs {
        let ev = evaluate(property, base, input)?;
        tally = tally.record(input.clone(), ev, max_counterexamples);
    }
    Ok(tally.into_verdict(property, base))
}
