use std::fmt::Write as _;

use cvtx_core::camsim::{build_tree, simulate, simulate_traced, SimulationReport};
use cvtx_core::proplab::{self, InputShape, PropertyId, PropertyVerdict, TrialInput, Trials};
use cvtx_core::{
    add_multi, ivt_apply, sum_identity_check, to_digits, transform, Base, BigUint, RuleTable,
    TrialConfig,
};
use num_bigint::RandBigInt;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::input::{parse_base, parse_list, parse_operands};
use crate::report::Report;
use crate::{Cli, CliError, Command, Format, Op};

pub fn run(cli: &Cli, echo: &str) -> Result<String, CliError> {
    match &cli.command {
        Command::Transform {
            numbers,
            base,
            op,
            rule,
            arity,
            width,
        } => cmd_transform(cli.format, echo, numbers, *base, *op, rule.as_deref(), *arity, *width),
        Command::Add {
            numbers,
            base,
            trace,
        } => cmd_add(cli.format, echo, numbers, *base, *trace),
        Command::Props {
            base,
            properties,
            trials,
            seed,
            width,
            k,
            max_counterexamples,
            xs,
            ys,
            x,
            copies,
            exponent,
            shift,
        } => {
            let explicit = Explicit {
                xs: xs.as_deref(),
                ys: ys.as_deref(),
                x: x.as_deref(),
                copies: *copies,
                exponent: *exponent,
                shift: *shift,
            };
            cmd_props(
                cli.format,
                echo,
                *base,
                properties,
                trials,
                *seed,
                *width,
                *k,
                *max_counterexamples,
                &explicit,
            )
        }
        Command::Cam {
            k,
            n,
            inputs,
            random,
            seed,
            trace,
        } => cmd_cam(cli.format, echo, *k, *n, inputs, *random, *seed, *trace),
    }
}

/// A natural with its digit string.
#[derive(Debug, Serialize)]
struct Number {
    value: String,
    digits: String,
}

impl Number {
    fn of(v: &BigUint, base: Base, width: Option<usize>) -> Self {
        Number {
            value: v.to_string(),
            digits: to_digits(v, base, width).to_string(),
        }
    }
}

#[derive(Debug, Serialize)]
struct RuleInfo {
    index: String,
    arity: usize,
    /// Output per truth-table row, rows in ascending input order.
    outputs: Vec<u32>,
}

#[derive(Debug, Serialize)]
struct Identity {
    lhs: String,
    cvt: String,
    xor: String,
    holds: bool,
    line: String,
}

#[derive(Debug, Default, Serialize)]
struct TransformPayload {
    op: &'static str,
    base: u32,
    operands: Vec<Number>,
    #[serde(skip_serializing_if = "Option::is_none")]
    cvt: Option<Number>,
    #[serde(skip_serializing_if = "Option::is_none")]
    xor: Option<Number>,
    #[serde(skip_serializing_if = "Option::is_none")]
    identity: Option<Identity>,
    #[serde(skip_serializing_if = "Option::is_none")]
    rule: Option<RuleInfo>,
    #[serde(skip_serializing_if = "Option::is_none")]
    ivt: Option<Number>,
}

#[allow(clippy::too_many_arguments)]
fn cmd_transform(
    format: Format,
    echo: &str,
    numbers: &[String],
    base: Option<u32>,
    op: Op,
    rule: Option<&str>,
    arity: Option<usize>,
    width: Option<usize>,
) -> Result<String, CliError> {
    let ops = parse_operands(numbers, base)?;
    let operands = ops
        .vectors
        .iter()
        .map(|v| Number {
            value: v.value().to_string(),
            digits: v.padded(width.unwrap_or(0)).to_string(),
        })
        .collect();
    let mut payload = TransformPayload {
        op: match op {
            Op::Cvt => "cvt",
            Op::Xor => "xor",
            Op::Both => "both",
            Op::Ivt => "ivt",
        },
        base: ops.base.beta(),
        operands,
        ..Default::default()
    };

    if op == Op::Ivt {
        let rule = rule.ok_or_else(|| CliError::usage("--op ivt requires --rule".into()))?;
        let index: BigUint = rule
            .parse()
            .map_err(|_| CliError::usage(format!("--rule {rule:?}: not a natural number")))?;
        let arity = arity.unwrap_or(ops.vectors.len());
        let table = RuleTable::from_index(ops.base, arity, &index)?;
        let out = ivt_apply(&table, &ops.vectors)?;
        payload.ivt = Some(Number::of(&out.value(), ops.base, width.or(Some(out.len()))));
        payload.rule = Some(RuleInfo {
            index: table.index().to_string(),
            arity: table.arity(),
            outputs: table.outputs().to_vec(),
        });
    } else {
        let t = transform(&ops.vectors)?;
        if matches!(op, Op::Cvt | Op::Both) {
            let cvt = t.cvt.clone();
            let width = width.unwrap_or(0);
            let digits = if cvt.len() < width {
                let mut d = cvt.digits().to_vec();
                d.resize(width, 0);
                cvtx_core::GeneralizedDigitVector::from_lsb(ops.base, d)?.to_string()
            } else {
                cvt.to_string()
            };
            payload.cvt = Some(Number {
                value: t.cvt_value().to_string(),
                digits,
            });
        }
        if matches!(op, Op::Xor | Op::Both) {
            payload.xor = Some(Number::of(&t.xor_value(), ops.base, width));
        }
        if op == Op::Both {
            let id = sum_identity_check(&ops.vectors)?;
            if !id.holds {
                return Err(cvtx_core::Error::InvariantViolation(format!(
                    "sum {} != CVT {} + XOR {}",
                    id.lhs, id.cvt, id.xor
                ))
                .into());
            }
            payload.identity = Some(Identity {
                line: format!("{}={}+{}", id.lhs, id.cvt, id.xor),
                lhs: id.lhs.to_string(),
                cvt: id.cvt.to_string(),
                xor: id.xor.to_string(),
                holds: id.holds,
            });
        }
    }

    let report = Report::new(echo, None, payload);
    Ok(report.render(format, |p| {
        let mut s = String::new();
        for (i, o) in p.operands.iter().enumerate() {
            let _ = writeln!(s, "x{} {} {}", i + 1, o.value, o.digits);
        }
        if let Some(r) = &p.rule {
            let _ = writeln!(s, "rule {} arity {} outputs {:?}", r.index, r.arity, r.outputs);
        }
        for (name, n) in [("cvt", &p.cvt), ("xor", &p.xor), ("ivt", &p.ivt)] {
            if let Some(n) = n {
                let _ = writeln!(s, "{name} {} {}", n.value, n.digits);
            }
        }
        if let Some(id) = &p.identity {
            let _ = writeln!(s, "identity {}", id.line);
        }
        s
    }))
}

#[derive(Debug, Serialize)]
struct AddPayload {
    base: u32,
    operands: Vec<String>,
    result: String,
    reduced_cvt: String,
    reduced_xor: String,
    iterations: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    steps: Option<Vec<[String; 2]>>,
}

fn cmd_add(
    format: Format,
    echo: &str,
    numbers: &[String],
    base: Option<u32>,
    trace: bool,
) -> Result<String, CliError> {
    let ops = parse_operands(numbers, base)?;
    let values = ops.values();
    let sum = add_multi(&values, ops.base)?;
    let payload = AddPayload {
        base: ops.base.beta(),
        operands: values.iter().map(ToString::to_string).collect(),
        result: sum.result.to_string(),
        reduced_cvt: sum.reduced.cvt.to_string(),
        reduced_xor: sum.reduced.xor.to_string(),
        iterations: sum.trace.iterations,
        steps: trace.then(|| {
            sum.trace
                .steps
                .iter()
                .map(|s| [s.cvt.to_string(), s.xor.to_string()])
                .collect()
        }),
    };
    let report = Report::new(echo, None, payload);
    Ok(report.render(format, |p| {
        let mut s = format!("result {}\n", p.result);
        let _ = writeln!(s, "reduced cvt={} xor={}", p.reduced_cvt, p.reduced_xor);
        let _ = writeln!(s, "iterations {}", p.iterations);
        for (i, [c, x]) in p.steps.iter().flatten().enumerate() {
            let _ = writeln!(s, "step {} cvt={c} xor={x}", i + 1);
        }
        s
    }))
}

struct Explicit<'a> {
    xs: Option<&'a str>,
    ys: Option<&'a str>,
    x: Option<&'a str>,
    copies: Option<usize>,
    exponent: Option<u32>,
    shift: Option<u32>,
}

impl Explicit<'_> {
    fn given(&self) -> bool {
        self.xs.is_some() || self.ys.is_some() || self.x.is_some()
    }

    fn input_for(&self, property: PropertyId) -> Result<TrialInput, CliError> {
        fn need<T: Copy>(v: Option<T>, flag: &str, p: PropertyId) -> Result<T, CliError> {
            v.ok_or_else(|| CliError::usage(format!("{p} with explicit inputs requires {flag}")))
        }
        let single = |p| -> Result<BigUint, CliError> {
            let raw = need(self.x, "--x", p)?;
            raw.trim()
                .parse()
                .map_err(|_| CliError::usage(format!("--x {raw:?}: not a natural number")))
        };
        Ok(match property.shape() {
            InputShape::Identical => TrialInput::Identical {
                x: single(property)?,
                copies: need(self.copies, "--copies", property)?,
            },
            InputShape::Scaled => TrialInput::Scaled {
                xs: parse_list("--xs", need(self.xs, "--xs", property)?)?,
                shift: need(self.shift, "--shift", property)?,
            },
            InputShape::Concat => TrialInput::Concat {
                xs: parse_list("--xs", need(self.xs, "--xs", property)?)?,
                ys: parse_list("--ys", need(self.ys, "--ys", property)?)?,
            },
            InputShape::Power => TrialInput::Power {
                x: single(property)?,
                copies: need(self.copies, "--copies", property)?,
                exponent: need(self.exponent, "--exponent", property)?,
            },
        })
    }
}

fn parse_trials(s: &str) -> Result<Trials, CliError> {
    let bad = || CliError::usage(format!("--trials {s:?}: expected a count, `exhaustive` or `search[:N]`"));
    let lower = s.trim().to_ascii_lowercase();
    if lower == "exhaustive" {
        return Ok(Trials::Exhaustive);
    }
    if let Some(rest) = lower.strip_prefix("search") {
        let n = match rest.strip_prefix(':') {
            Some(n) => n.parse().map_err(|_| bad())?,
            None if rest.is_empty() => 1000,
            None => return Err(bad()),
        };
        return Ok(Trials::Search(n));
    }
    lower.parse().map(Trials::Random).map_err(|_| bad())
}

#[derive(Debug, Serialize)]
struct PropsPayload {
    config: Option<TrialConfig>,
    explicit_input: Option<String>,
    verdicts: Vec<PropertyVerdict>,
}

#[allow(clippy::too_many_arguments)]
fn cmd_props(
    format: Format,
    echo: &str,
    base: u32,
    properties: &str,
    trials: &str,
    seed: u64,
    width: u32,
    k: usize,
    max_counterexamples: usize,
    explicit: &Explicit<'_>,
) -> Result<String, CliError> {
    let base = parse_base(base)?;
    let properties = PropertyId::parse_list(properties)
        .map_err(|e| CliError::usage(format!("--properties: {e}")))?;

    let payload = if explicit.given() {
        let mut verdicts = Vec::new();
        for &p in &properties {
            let input = explicit.input_for(p)?;
            verdicts.push(proplab::run_on_inputs(p, base, &[input], max_counterexamples)?);
        }
        let description = properties
            .first()
            .map(|&p| explicit.input_for(p).map(|i| i.to_string()))
            .transpose()?;
        PropsPayload {
            config: None,
            explicit_input: description,
            verdicts,
        }
    } else {
        let mut config = TrialConfig::new(base, k, width, parse_trials(trials)?, seed);
        config.max_counterexamples = max_counterexamples;
        PropsPayload {
            config: Some(config),
            explicit_input: None,
            verdicts: proplab::run_campaign(&config, &properties)?,
        }
    };

    for v in &payload.verdicts {
        if let Some(c) = v.counterexamples.iter().find(|c| !c.replay(v.property_id, v.base)) {
            return Err(cvtx_core::Error::InvariantViolation(format!(
                "{} counterexample {} does not replay",
                v.property_id, c.input
            ))
            .into());
        }
    }

    let report = Report::new(echo, Some(seed), payload);
    Ok(report.render(format, |p| {
        let mut s = String::new();
        if let Some(input) = &p.explicit_input {
            let _ = writeln!(s, "input {input}");
        }
        let _ = writeln!(
            s,
            "{:<4} {:>4} {:>9} {:>9} {:>9} {:>6}  note",
            "id", "base", "trials", "holds", "fails", "n/a"
        );
        for v in &p.verdicts {
            let _ = writeln!(
                s,
                "{:<4} {:>4} {:>9} {:>9} {:>9} {:>6}  {}",
                v.property_id.as_str(),
                v.base,
                v.trials,
                v.holds_count,
                v.failure_count,
                v.not_evaluable,
                v.condition_note
            );
            for c in &v.counterexamples {
                let _ = writeln!(s, "     cex {}: claimed {} actual {}", c.input, c.claimed, c.actual);
            }
        }
        s
    }))
}

#[derive(Debug, Serialize)]
struct CamPayload {
    leaf_count: usize,
    input_width: usize,
    level_widths: Vec<usize>,
    simulation: SimulationReport,
}

#[allow(clippy::too_many_arguments)]
fn cmd_cam(
    format: Format,
    echo: &str,
    k: usize,
    n: usize,
    inputs: &[String],
    random: bool,
    seed: u64,
    trace: bool,
) -> Result<String, CliError> {
    let tree = build_tree(k, n)?;
    let values: Vec<BigUint> = if random {
        if !inputs.is_empty() {
            return Err(CliError::usage("--random conflicts with explicit inputs".into()));
        }
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        (0..k).map(|_| rng.gen_biguint(n as u64)).collect()
    } else {
        inputs
            .iter()
            .map(|s| {
                s.trim()
                    .parse::<BigUint>()
                    .map_err(|_| CliError::usage(format!("input {s:?}: not a natural number")))
            })
            .collect::<Result<_, _>>()?
    };
    let simulation = if trace {
        simulate_traced(&tree, &values)?
    } else {
        simulate(&tree, &values)?
    };
    let payload = CamPayload {
        leaf_count: tree.leaf_count,
        input_width: tree.input_width,
        level_widths: tree.levels.iter().map(|l| l.width).collect(),
        simulation,
    };
    let report = Report::new(echo, random.then_some(seed), payload);
    Ok(report.render(format, |p| {
        let sim = &p.simulation;
        let list = |v: &[BigUint]| v.iter().map(ToString::to_string).collect::<Vec<_>>().join(" ");
        let mut s = format!("inputs {}\n", list(&sim.inputs));
        let _ = writeln!(s, "result {}", sim.result);
        let _ = writeln!(s, "cams {} levels {}", sim.cam_count, sim.level_count);
        let _ = writeln!(s, "per_level_cycles {:?}", sim.per_level_cycles);
        let _ = writeln!(s, "paper_model_delay {}", sim.paper_model_delay);
        let _ = writeln!(s, "measured_delay {}", sim.measured_delay);
        for line in sim.trace.iter().flatten() {
            let _ = writeln!(s, "{line}");
        }
        s
    }))
}
