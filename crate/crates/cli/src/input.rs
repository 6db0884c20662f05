//! Operand grammar: bare decimals (`17`) or base-prefixed digit strings
//! (`3:0122`, `16:[15,0]`). `--base` applies only when every operand is bare.

use cvtx_core::{Base, BigUint, DigitVector};

use crate::CliError;

#[derive(Debug, Clone)]
pub struct Operands {
    pub base: Base,
    pub vectors: Vec<DigitVector>,
}

impl Operands {
    pub fn values(&self) -> Vec<BigUint> {
        self.vectors.iter().map(DigitVector::value).collect()
    }
}

enum Token {
    Bare(BigUint),
    Prefixed(DigitVector),
}

fn token(arg: &str) -> Result<Token, CliError> {
    if arg.contains(':') {
        arg.parse::<DigitVector>()
            .map(Token::Prefixed)
            .map_err(|e| CliError::usage(format!("operand {arg:?}: {e}")))
    } else {
        arg.trim()
            .parse::<BigUint>()
            .map(Token::Bare)
            .map_err(|_| CliError::usage(format!("operand {arg:?}: not a natural number")))
    }
}

/// Resolves the shared base of `args` and converts them to digit vectors.
pub fn parse_operands(args: &[String], flag_base: Option<u32>) -> Result<Operands, CliError> {
    if args.is_empty() {
        return Err(CliError::usage("no operands".to_string()));
    }
    let tokens = args.iter().map(|a| token(a)).collect::<Result<Vec<_>, _>>()?;
    let mut prefixed: Option<(Base, &str)> = None;
    for (tok, arg) in tokens.iter().zip(args) {
        if let Token::Prefixed(v) = tok {
            match prefixed {
                None => prefixed = Some((v.base(), arg)),
                Some((b, first)) if b != v.base() => {
                    return Err(CliError::usage(format!(
                        "operand {arg:?}: base mismatch with {first:?} (base {} vs {b})",
                        v.base()
                    )))
                }
                Some(_) => {}
            }
        }
    }
    let base = match (prefixed, flag_base) {
        (Some((b, arg)), Some(flag)) if b.beta() != flag => {
            return Err(CliError::usage(format!(
                "operand {arg:?}: base mismatch with --base {flag}"
            )))
        }
        (Some((b, _)), _) => b,
        (None, flag) => parse_base(flag.unwrap_or(2))?,
    };
    let vectors = tokens
        .into_iter()
        .map(|t| match t {
            Token::Bare(v) => cvtx_core::to_digits(&v, base, None),
            Token::Prefixed(v) => v,
        })
        .collect();
    Ok(Operands { base, vectors })
}

pub fn parse_base(beta: u32) -> Result<Base, CliError> {
    Base::new(beta).map_err(|e| CliError::usage(format!("--base {beta}: {e}")))
}

/// Comma-separated naturals, as used by `--xs`/`--ys`.
pub fn parse_list(flag: &str, s: &str) -> Result<Vec<BigUint>, CliError> {
    s.split(',')
        .map(str::trim)
        .filter(|t| !t.is_empty())
        .map(|t| {
            t.parse::<BigUint>()
                .map_err(|_| CliError::usage(format!("{flag} {s:?}: bad natural {t:?}")))
        })
        .collect()
}
