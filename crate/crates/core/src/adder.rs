//! Addition by iterating `(X, Y) → (CVT(X, Y), XOR(X, Y))` until the carry
//! vector clears. The pair sum is invariant at every step, so the final XOR
//! is `X + Y`.

use num_bigint::BigUint;
use serde::Serialize;

use crate::digitvec::{to_digits, Base, DigitVector};
use crate::error::{Error, Result};
use crate::serde_nat;
use crate::transforms::transform;

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Step {
    #[serde(with = "serde_nat")]
    pub cvt: BigUint,
    #[serde(with = "serde_nat")]
    pub xor: BigUint,
}

/// One (CVT, XOR) pair per iteration; the last step has `cvt == 0`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct IterationTrace {
    pub base: Base,
    pub steps: Vec<Step>,
    pub iterations: usize,
    #[serde(with = "serde_nat")]
    pub result: BigUint,
}

/// Iterates the pairwise recurrence on canonical operands.
///
/// One iteration is one simultaneous (CVT, XOR) evaluation; the loop stops
/// after the first evaluation whose CVT is zero. The carry vector is
/// re-canonicalized before it is fed back. Fails only if the loop invariant
/// `cvt + xor = a + b` is ever broken.
pub fn add_pair_iterative(a: &BigUint, b: &BigUint, base: Base) -> Result<IterationTrace> {
    let total = a + b;
    let mut x = to_digits(a, base, None);
    let mut y = to_digits(b, base, None);
    let mut steps = Vec::new();
    loop {
        let step = transform(&[x, y])?;
        let cvt = step.cvt_value();
        let xor = step.xor_value();
        if &cvt + &xor != total {
            return Err(Error::InvariantViolation(format!(
                "CVT {cvt} + XOR {xor} != {total} at iteration {}",
                steps.len() + 1
            )));
        }
        let done = step.cvt.is_zero();
        steps.push(Step { cvt, xor });
        if done {
            break;
        }
        x = step.cvt.canonicalize();
        y = step.xor;
    }
    let result = steps.last().expect("at least one iteration").xor.clone();
    if result != total {
        return Err(Error::InvariantViolation(format!(
            "recurrence returned {result}, direct sum is {total}"
        )));
    }
    Ok(IterationTrace {
        base,
        iterations: steps.len(),
        steps,
        result,
    })
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct MultiAddition {
    #[serde(with = "serde_nat")]
    pub result: BigUint,
    /// `(value(CVT), value(XOR))` of the whole operand list.
    pub reduced: Step,
    /// Starts with `reduced`, then the pairwise iterations on it. For two
    /// operands this is exactly the [`add_pair_iterative`] trace.
    pub trace: IterationTrace,
}

/// Sums `xs` by reducing them to one (CVT, XOR) pair, then iterating.
pub fn add_multi(xs: &[BigUint], base: Base) -> Result<MultiAddition> {
    if xs.is_empty() {
        return Err(Error::NoOperands);
    }
    let vectors: Vec<DigitVector> = xs.iter().map(|x| to_digits(x, base, None)).collect();
    let t = transform(&vectors)?;
    let reduced = Step {
        cvt: t.cvt_value(),
        xor: t.xor_value(),
    };
    let mut steps = vec![reduced.clone()];
    if !t.cvt.is_zero() {
        steps.extend(add_pair_iterative(&reduced.cvt, &reduced.xor, base)?.steps);
    }
    let result = steps.last().expect("non-empty").xor.clone();
    let direct: BigUint = xs.iter().sum();
    if result != direct {
        return Err(Error::InvariantViolation(format!(
            "multi-operand sum {result} != direct sum {direct}"
        )));
    }
    Ok(MultiAddition {
        result: result.clone(),
        reduced,
        trace: IterationTrace {
            base,
            iterations: steps.len(),
            steps,
            result,
        },
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct BoundCheck {
    pub iterations: usize,
    /// Longest addend length in base-β digits, plus one.
    pub bound: usize,
    pub within: bool,
}

pub fn convergence_bound_check(a: &BigUint, b: &BigUint, base: Base) -> Result<BoundCheck> {
    let trace = add_pair_iterative(a, b, base)?;
    let len_a = to_digits(a, base, None).len();
    let len_b = to_digits(b, base, None).len();
    let bound = len_a.max(len_b) + 1;
    Ok(BoundCheck {
        iterations: trace.iterations,
        bound,
        within: trace.iterations <= bound,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn nat(v: u64) -> BigUint {
        BigUint::from(v)
    }

    fn base(beta: u32) -> Base {
        Base::new(beta).unwrap()
    }

    #[test]
    fn eleven_plus_thirteen() {
        let t = add_pair_iterative(&nat(11), &nat(13), base(2)).unwrap();
        let pairs: Vec<(u64, u64)> = vec![(18, 6), (4, 20), (8, 16), (0, 24)];
        let expected: Vec<Step> = pairs
            .into_iter()
            .map(|(c, x)| Step { cvt: nat(c), xor: nat(x) })
            .collect();
        assert_eq!(t.steps, expected);
        assert_eq!((t.iterations, t.result), (4, nat(24)));
    }

    #[test]
    fn adding_zero_takes_one_iteration() {
        for beta in 2..=9 {
            let t = add_pair_iterative(&nat(77), &nat(0), base(beta)).unwrap();
            assert_eq!((t.iterations, t.result), (1, nat(77)));
        }
    }

    #[test]
    fn one_plus_one() {
        let t = add_pair_iterative(&nat(1), &nat(1), base(2)).unwrap();
        assert_eq!(
            t.steps,
            vec![Step { cvt: nat(2), xor: nat(0) }, Step { cvt: nat(0), xor: nat(2) }]
        );
    }

    #[test]
    fn multi_operand_sums() {
        let xs: Vec<BigUint> = [17u64, 8, 11, 8, 4, 8].map(nat).to_vec();
        let m = add_multi(&xs, base(3)).unwrap();
        assert_eq!(m.reduced, Step { cvt: nat(36), xor: nat(20) });
        assert_eq!(m.result, nat(56));

        let xs: Vec<BigUint> = [5u64, 4, 6, 7, 13, 9, 9, 13].map(nat).to_vec();
        let m = add_multi(&xs, base(2)).unwrap();
        assert_eq!(m.reduced, Step { cvt: nat(66), xor: nat(0) });
        assert_eq!(m.result, nat(66));
        assert_eq!(m.trace.iterations, 2);

        let pair = add_multi(&[nat(11), nat(13)], base(2)).unwrap();
        let direct = add_pair_iterative(&nat(11), &nat(13), base(2)).unwrap();
        assert_eq!(pair.trace, direct);

        let single = add_multi(&[nat(7)], base(5)).unwrap();
        assert_eq!((single.result, single.trace.iterations), (nat(7), 1));
        assert_eq!(add_multi(&[], base(5)).unwrap_err(), Error::NoOperands);
    }

    #[test]
    fn bounds() {
        let c = convergence_bound_check(&nat(0), &nat(0), base(2)).unwrap();
        assert_eq!((c.iterations, c.within), (1, true));
        for n in 1..=40u32 {
            let all_ones = (BigUint::from(1u8) << n) - 1u8;
            let c = convergence_bound_check(&all_ones, &nat(1), base(2)).unwrap();
            assert_eq!(c.iterations, n as usize + 1, "n = {n}");
            assert_eq!(c.bound, n as usize + 1);
            assert!(c.within);
        }
    }

    proptest! {
        #[test]
        fn result_is_sum_and_invariant_holds(a in any::<u64>(), b in any::<u64>(), beta in 2u32..=9) {
            let t = add_pair_iterative(&nat(a), &nat(b), base(beta)).unwrap();
            let total = nat(a) + nat(b);
            prop_assert_eq!(&t.result, &total);
            for s in &t.steps {
                prop_assert_eq!(&s.cvt + &s.xor, total.clone());
            }
        }

        #[test]
        fn multi_matches_direct_sum(
            xs in proptest::collection::vec(any::<u32>(), 1..10),
            beta in 2u32..=9,
        ) {
            let xs: Vec<BigUint> = xs.into_iter().map(BigUint::from).collect();
            let direct: BigUint = xs.iter().sum();
            prop_assert_eq!(add_multi(&xs, base(beta)).unwrap().result, direct);
        }
    }
}
