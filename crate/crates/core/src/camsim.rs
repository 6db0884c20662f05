//! Cycle-accounted behavioral model of a parallel multi-operand adder
//! built from cellular automata machines (CAMs).
//!
//! A CAM holds a carry register `x` and a sum register `y`. Each clock
//! replaces them with `(CVT(x, y), XOR(x, y))` until the carry register is
//! all zero, at which point `y` holds the sum. `K` inputs are reduced by a
//! complete binary tree of `K - 1` CAMs over `log₂ K` levels; a level loads
//! only after every unit of the previous level is done.

use num_bigint::BigUint;
use rayon::prelude::*;
use serde::Serialize;

use crate::digitvec::{to_digits, Base, DigitVector};
use crate::error::{Error, Result};
use crate::serde_nat;
use crate::transforms::transform;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum CamState {
    Idle,
    Running,
    Done,
}

/// One CAM: a pair of binary registers of fixed width.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CamUnit {
    width: usize,
    reg_x: DigitVector,
    reg_y: DigitVector,
    cycle_count: u64,
    state: CamState,
}

impl CamUnit {
    pub fn new(width: usize) -> Result<Self> {
        if width == 0 {
            return Err(Error::InvalidWidth);
        }
        Ok(CamUnit {
            width,
            reg_x: DigitVector::zero(Base::BINARY, width),
            reg_y: DigitVector::zero(Base::BINARY, width),
            cycle_count: 0,
            state: CamState::Idle,
        })
    }

    fn register(&self, value: &BigUint) -> Result<DigitVector> {
        let v = to_digits(value, Base::BINARY, Some(self.width));
        if v.len() > self.width {
            return Err(Error::RegisterOverflow { width: self.width });
        }
        Ok(v)
    }

    /// Loads both operands and starts the unit.
    pub fn load(&mut self, x: &BigUint, y: &BigUint) -> Result<()> {
        self.reg_x = self.register(x)?;
        self.reg_y = self.register(y)?;
        self.cycle_count = 0;
        self.state = CamState::Running;
        Ok(())
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn reg_x(&self) -> &DigitVector {
        &self.reg_x
    }

    pub fn reg_y(&self) -> &DigitVector {
        &self.reg_y
    }

    pub fn cycle_count(&self) -> u64 {
        self.cycle_count
    }

    pub fn state(&self) -> CamState {
        self.state
    }

    /// The sum, once the carry register has cleared.
    pub fn output(&self) -> Option<BigUint> {
        (self.state == CamState::Done).then(|| self.reg_y.value())
    }

    /// One clock. A carry digit that would land beyond the register width
    /// is an error rather than a wraparound.
    pub fn step(&mut self) -> Result<()> {
        if self.state != CamState::Running {
            return Err(Error::NotRunning);
        }
        let t = transform(&[self.reg_x.clone(), self.reg_y.clone()])?;
        if t.cvt.digits()[self.width..].iter().any(|&d| d != 0) {
            return Err(Error::RegisterOverflow { width: self.width });
        }
        let carry: Vec<u32> = t.cvt.digits()[..self.width]
            .iter()
            .map(|&d| d as u32)
            .collect();
        self.reg_x = DigitVector::from_lsb(Base::BINARY, carry)?;
        self.reg_y = t.xor;
        self.cycle_count += 1;
        if self.reg_x.is_zero() {
            self.state = CamState::Done;
        }
        Ok(())
    }

    /// Clocks until done, optionally recording every cycle's registers.
    pub fn run(&mut self, mut trace: Option<&mut Vec<(u64, String, String)>>) -> Result<u64> {
        while self.state == CamState::Running {
            self.step()?;
            if let Some(t) = trace.as_deref_mut() {
                t.push((self.cycle_count, self.reg_x.to_string(), self.reg_y.to_string()));
            }
        }
        Ok(self.cycle_count)
    }
}

/// Functional form of [`CamUnit::step`].
pub fn cam_step(unit: &CamUnit) -> Result<CamUnit> {
    let mut next = unit.clone();
    next.step()?;
    Ok(next)
}

/// Where a unit's operand comes from.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Source {
    Input(usize),
    Unit { level: usize, index: usize },
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Level {
    /// 1-based.
    pub index: usize,
    pub width: usize,
    pub units: Vec<[Source; 2]>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct AdderTree {
    pub leaf_count: usize,
    pub input_width: usize,
    pub levels: Vec<Level>,
}

impl AdderTree {
    pub fn cam_count(&self) -> usize {
        self.levels.iter().map(|l| l.units.len()).sum()
    }

    pub fn level_count(&self) -> usize {
        self.levels.len()
    }

    /// `n · log₂ K`: every level charged `n` cycles.
    pub fn paper_model_delay(&self) -> u64 {
        (self.input_width * self.level_count()) as u64
    }
}

/// Builds the reduction tree for `leaf_count` inputs of `input_width` bits.
/// Level `ℓ` has width `n + ℓ`, enough for a sum of `2^ℓ` inputs.
pub fn build_tree(leaf_count: usize, input_width: usize) -> Result<AdderTree> {
    if leaf_count < 2 || !leaf_count.is_power_of_two() {
        return Err(Error::NotPowerOfTwo(leaf_count));
    }
    if input_width == 0 {
        return Err(Error::InvalidWidth);
    }
    let depth = leaf_count.trailing_zeros() as usize;
    let levels = (1..=depth)
        .map(|index| {
            let units = (0..leaf_count >> index)
                .map(|u| {
                    let pick = |i: usize| {
                        if index == 1 {
                            Source::Input(i)
                        } else {
                            Source::Unit {
                                level: index - 1,
                                index: i,
                            }
                        }
                    };
                    [pick(2 * u), pick(2 * u + 1)]
                })
                .collect();
            Level {
                index,
                width: input_width + index,
                units,
            }
        })
        .collect();
    Ok(AdderTree {
        leaf_count,
        input_width,
        levels,
    })
}

/// One line of register trace: the state after `cycle` clocks.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct TraceLine {
    pub level: usize,
    pub unit: usize,
    pub cycle: u64,
    pub reg_x: String,
    pub reg_y: String,
}

impl std::fmt::Display for TraceLine {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(
            f,
            "L{} U{} c{} x={} y={}",
            self.level, self.unit, self.cycle, self.reg_x, self.reg_y
        )
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct SimulationReport {
    #[serde(with = "serde_nat::vec")]
    pub inputs: Vec<BigUint>,
    #[serde(with = "serde_nat")]
    pub result: BigUint,
    pub cam_count: usize,
    pub level_count: usize,
    /// Cycles of every unit, per level.
    pub unit_cycles: Vec<Vec<u64>>,
    /// Slowest unit per level; the level barrier waits for it.
    pub per_level_cycles: Vec<u64>,
    pub paper_model_delay: u64,
    pub measured_delay: u64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub trace: Option<Vec<TraceLine>>,
}

pub fn simulate(tree: &AdderTree, inputs: &[BigUint]) -> Result<SimulationReport> {
    run(tree, inputs, false, true)
}

pub fn simulate_traced(tree: &AdderTree, inputs: &[BigUint]) -> Result<SimulationReport> {
    run(tree, inputs, true, true)
}

/// Single-threaded; produces the same report as [`simulate`].
pub fn simulate_serial(tree: &AdderTree, inputs: &[BigUint]) -> Result<SimulationReport> {
    run(tree, inputs, false, false)
}

type UnitRun = (BigUint, u64, Vec<(u64, String, String)>);

fn run(tree: &AdderTree, inputs: &[BigUint], traced: bool, parallel: bool) -> Result<SimulationReport> {
    if inputs.len() != tree.leaf_count {
        return Err(Error::InputCount {
            expected: tree.leaf_count,
            found: inputs.len(),
        });
    }
    let limit = BigUint::from(1u8) << tree.input_width;
    if let Some((index, value)) = inputs.iter().enumerate().find(|(_, v)| **v >= limit) {
        return Err(Error::InputOutOfRange {
            index,
            value: value.to_string(),
            width: tree.input_width,
        });
    }

    let mut outputs: Vec<Vec<BigUint>> = Vec::with_capacity(tree.level_count());
    let mut unit_cycles = Vec::with_capacity(tree.level_count());
    let mut trace = traced.then(Vec::new);

    for level in &tree.levels {
        let fetch = |s: Source| -> &BigUint {
            match s {
                Source::Input(i) => &inputs[i],
                Source::Unit { level, index } => &outputs[level - 1][index],
            }
        };
        let operands: Vec<(&BigUint, &BigUint)> =
            level.units.iter().map(|[a, b]| (fetch(*a), fetch(*b))).collect();
        let run_unit = |(a, b): (&BigUint, &BigUint)| -> Result<UnitRun> {
            let mut unit = CamUnit::new(level.width)?;
            unit.load(a, b)?;
            let mut lines = Vec::new();
            let cycles = unit.run(traced.then_some(&mut lines))?;
            let sum = unit.output().expect("unit finished");
            if sum != a + b {
                return Err(Error::InvariantViolation(format!(
                    "CAM summed {a} + {b} to {sum}"
                )));
            }
            Ok((sum, cycles, lines))
        };
        let results: Vec<UnitRun> = if parallel {
            operands.into_par_iter().map(run_unit).collect::<Result<_>>()?
        } else {
            operands.into_iter().map(run_unit).collect::<Result<_>>()?
        };

        let mut level_out = Vec::with_capacity(results.len());
        let mut cycles = Vec::with_capacity(results.len());
        for (unit, (sum, c, lines)) in results.into_iter().enumerate() {
            if let Some(t) = trace.as_mut() {
                t.extend(lines.into_iter().map(|(cycle, reg_x, reg_y)| TraceLine {
                    level: level.index,
                    unit,
                    cycle,
                    reg_x,
                    reg_y,
                }));
            }
            level_out.push(sum);
            cycles.push(c);
        }
        outputs.push(level_out);
        unit_cycles.push(cycles);
    }

    let result = outputs
        .last()
        .and_then(|l| l.first())
        .cloned()
        .expect("tree has a root");
    let direct: BigUint = inputs.iter().sum();
    if result != direct {
        return Err(Error::InvariantViolation(format!(
            "tree produced {result}, direct sum is {direct}"
        )));
    }
    let per_level_cycles: Vec<u64> = unit_cycles
        .iter()
        .map(|c: &Vec<u64>| c.iter().copied().max().unwrap_or(0))
        .collect();
    Ok(SimulationReport {
        inputs: inputs.to_vec(),
        result,
        cam_count: tree.cam_count(),
        level_count: tree.level_count(),
        measured_delay: per_level_cycles.iter().sum(),
        per_level_cycles,
        unit_cycles,
        paper_model_delay: tree.paper_model_delay(),
        trace,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn nat(v: u64) -> BigUint {
        BigUint::from(v)
    }

    fn nats(v: &[u64]) -> Vec<BigUint> {
        v.iter().copied().map(BigUint::from).collect()
    }

    #[test]
    fn one_clock_matches_pair_table() {
        let mut unit = CamUnit::new(5).unwrap();
        unit.load(&nat(11), &nat(13)).unwrap();
        let next = cam_step(&unit).unwrap();
        assert_eq!(next.reg_x().to_string(), "2:10010");
        assert_eq!(next.reg_y().to_string(), "2:00110");
        assert_eq!(next.cycle_count(), 1);
        assert_eq!(next.state(), CamState::Running);
    }

    #[test]
    fn runs_to_completion_conserving_sum() {
        let mut unit = CamUnit::new(5).unwrap();
        unit.load(&nat(11), &nat(13)).unwrap();
        while unit.state() == CamState::Running {
            unit.step().unwrap();
            assert_eq!(unit.reg_x().value() + unit.reg_y().value(), nat(24));
        }
        assert_eq!(unit.output(), Some(nat(24)));
        assert!(unit.reg_x().is_zero());
        assert!(unit.cycle_count() <= 5);
    }

    #[test]
    fn zero_partner_finishes_in_one_cycle() {
        let mut unit = CamUnit::new(4).unwrap();
        unit.load(&nat(9), &nat(0)).unwrap();
        assert_eq!(unit.run(None).unwrap(), 1);
        assert_eq!(unit.output(), Some(nat(9)));
    }

    #[test]
    fn undersized_register_overflows() {
        let mut unit = CamUnit::new(4).unwrap();
        unit.load(&nat(11), &nat(13)).unwrap();
        assert_eq!(unit.run(None), Err(Error::RegisterOverflow { width: 4 }));
        let mut unit = CamUnit::new(3).unwrap();
        assert_eq!(unit.load(&nat(8), &nat(0)), Err(Error::RegisterOverflow { width: 3 }));
    }

    #[test]
    fn step_requires_running() {
        let unit = CamUnit::new(4).unwrap();
        assert_eq!(cam_step(&unit), Err(Error::NotRunning));
        assert_eq!(CamUnit::new(0), Err(Error::InvalidWidth));
    }

    #[test]
    fn tree_shapes() {
        let t = build_tree(16, 4).unwrap();
        assert_eq!(t.cam_count(), 15);
        assert_eq!(
            t.levels.iter().map(|l| l.units.len()).collect::<Vec<_>>(),
            vec![8, 4, 2, 1]
        );
        assert_eq!(t.levels[0].units[7], [Source::Input(14), Source::Input(15)]);
        assert_eq!(t.paper_model_delay(), 16);

        let t = build_tree(2, 4).unwrap();
        assert_eq!((t.cam_count(), t.level_count()), (1, 1));

        let t = build_tree(8, 3).unwrap();
        assert_eq!(t.cam_count(), 7);
        assert_eq!(t.levels.iter().map(|l| l.width).collect::<Vec<_>>(), vec![4, 5, 6]);

        assert_eq!(build_tree(12, 4), Err(Error::NotPowerOfTwo(12)));
        assert_eq!(build_tree(1, 4), Err(Error::NotPowerOfTwo(1)));
        assert_eq!(build_tree(4, 0), Err(Error::InvalidWidth));
    }

    #[test]
    fn simulate_examples() {
        let t = build_tree(2, 4).unwrap();
        let r = simulate(&t, &nats(&[11, 13])).unwrap();
        assert_eq!(r.result, nat(24));

        let t = build_tree(4, 1).unwrap();
        let r = simulate(&t, &nats(&[0, 0, 0, 0])).unwrap();
        assert_eq!(r.result, nat(0));
        assert!(r.unit_cycles.iter().flatten().all(|&c| c == 1));
        assert_eq!(r.measured_delay, 2);

        let t = build_tree(16, 4).unwrap();
        let r = simulate(&t, &vec![nat(15); 16]).unwrap();
        assert_eq!(r.result, nat(240));
        assert_eq!(r.paper_model_delay, 16);
        assert_eq!(r.per_level_cycles.len(), 4);
    }

    #[test]
    fn simulate_rejects_bad_inputs() {
        let t = build_tree(4, 3).unwrap();
        assert!(matches!(
            simulate(&t, &nats(&[1, 2, 8, 0])),
            Err(Error::InputOutOfRange { index: 2, .. })
        ));
        assert!(matches!(
            simulate(&t, &nats(&[1, 2])),
            Err(Error::InputCount { expected: 4, found: 2 })
        ));
    }

    #[test]
    fn exhaustive_eight_inputs_of_one_bit() {
        let t = build_tree(8, 1).unwrap();
        for mask in 0u32..256 {
            let inputs: Vec<BigUint> = (0..8).map(|i| nat(u64::from((mask >> i) & 1))).collect();
            let r = simulate(&t, &inputs).unwrap();
            assert_eq!(r.result, nat(u64::from(mask.count_ones())));
        }
    }

    #[test]
    fn trace_and_parallel_agree() {
        let t = build_tree(8, 3).unwrap();
        let inputs = nats(&[7, 6, 5, 4, 3, 2, 1, 7]);
        let traced = simulate_traced(&t, &inputs).unwrap();
        let lines = traced.trace.as_ref().unwrap();
        let total: u64 = traced.unit_cycles.iter().flatten().sum();
        assert_eq!(lines.len() as u64, total);
        assert_eq!(lines[0].to_string(), "L1 U0 c1 x=2:1100 y=2:0001");
        let mut plain = traced.clone();
        plain.trace = None;
        assert_eq!(simulate(&t, &inputs).unwrap(), plain);
        assert_eq!(simulate_serial(&t, &inputs).unwrap(), plain);
    }
}
