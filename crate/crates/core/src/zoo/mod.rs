//! Concrete predictors and evaders, addressable by catalog names such as
//! `constant:0`, `copylast`, `lookalike:f=poly2,pool=512`, `scaled:f=n`,
//! `anti:copylast` or `padded:pattern=0,target=n+10`.

pub mod growth;
pub mod lookalike;
pub mod padded;
pub mod players;

use std::fmt;
use std::ops::RangeInclusive;
use std::str::FromStr;

use thiserror::Error;

use crate::arena::Player;
use crate::budget::EvalBudget;
use crate::machine::{te_profile, CostProfile, Program, TeError, TeLimits};

pub use growth::{GrowthFn, GrowthParseError};
pub use lookalike::{misprediction_count, te_dominated, BoundCheck, LookalikePlayer};
pub use padded::{make_padded_evader, PaddedError, PaddedEvader, PaddingLimits, Pattern};
pub use players::{AntiPlayer, ConstantPlayer, CopyLastPlayer, VmPlayer};

pub const DEFAULT_POOL: u64 = 512;
pub const DEFAULT_STEP_CAP: u64 = 1_000_000;
pub const DEFAULT_VM_LIMIT: u64 = 1_000_000;
pub const DEFAULT_PADDED_WINDOW: RangeInclusive<u64> = 0..=12;

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum PredictorSpec {
    Constant(bool),
    CopyLast,
    /// `p_f` scanning `T_1..T_min(n, pool)`; `step_cap` bounds `f(n)`.
    Lookalike {
        growth: GrowthFn,
        pool: u64,
        step_cap: u64,
    },
    /// A machine run on the evasions so far.
    Vm {
        program: Program,
        limit: u64,
    },
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum EvaderSpec {
    Vm {
        program: Program,
        limit: u64,
    },
    Constant(bool),
    /// Plays the complement of the target's prediction on its own history.
    Anti(Box<PredictorSpec>),
    Padded {
        pattern: Pattern,
        target: GrowthFn,
        window: RangeInclusive<u64>,
    },
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ZooError {
    #[error("bad player spec {text:?}: {msg}")]
    Parse { text: String, msg: String },
    #[error(transparent)]
    Padded(#[from] PaddedError),
    #[error(transparent)]
    Cost(#[from] TeError),
}

/// `p_g` with `g(n) = n·f(n) + 1`.
pub fn scaled_lookalike(f: GrowthFn) -> PredictorSpec {
    PredictorSpec::Lookalike {
        growth: GrowthFn::scaled(f),
        pool: DEFAULT_POOL,
        step_cap: DEFAULT_STEP_CAP,
    }
}

/// The named reference predictors.
pub fn catalog() -> Vec<PredictorSpec> {
    [
        "constant:0",
        "constant:1",
        "copylast",
        "lookalike:f=n+2",
        "lookalike:f=poly2",
        "scaled:f=n",
        "vm:index=143",
    ]
    .iter()
    .map(|s| s.parse().expect("catalog entries parse"))
    .collect()
}

impl PredictorSpec {
    /// Builds a fresh player; `budget` bounds growth-function evaluation.
    pub fn build(&self, budget: &EvalBudget) -> Box<dyn Player> {
        match self {
            PredictorSpec::Constant(b) => Box::new(ConstantPlayer(*b)),
            PredictorSpec::CopyLast => Box::new(CopyLastPlayer),
            PredictorSpec::Lookalike {
                growth,
                pool,
                step_cap,
            } => Box::new(LookalikePlayer::new(
                growth.clone(),
                *pool,
                *step_cap,
                *budget,
            )),
            PredictorSpec::Vm { program, limit } => {
                Box::new(VmPlayer::new(program.clone(), *limit))
            }
        }
    }
}

impl EvaderSpec {
    pub fn build(&self, budget: &EvalBudget) -> Result<Box<dyn Player>, ZooError> {
        Ok(match self {
            EvaderSpec::Vm { program, limit } => Box::new(VmPlayer::new(program.clone(), *limit)),
            EvaderSpec::Constant(b) => Box::new(ConstantPlayer(*b)),
            EvaderSpec::Anti(p) => Box::new(AntiPlayer::new(p.build(budget))),
            EvaderSpec::Padded { .. } => {
                let e = self.padded(budget)?.expect("padded spec");
                Box::new(VmPlayer::new(e.program, DEFAULT_VM_LIMIT))
            }
        })
    }

    /// Constructs and verifies the program behind a padded spec.
    pub fn padded(&self, budget: &EvalBudget) -> Result<Option<PaddedEvader>, ZooError> {
        match self {
            EvaderSpec::Padded {
                pattern,
                target,
                window,
            } => Ok(Some(make_padded_evader(
                pattern,
                target,
                window.clone(),
                &TeLimits::default(),
                &PaddingLimits::default(),
                budget,
            )?)),
            _ => Ok(None),
        }
    }

    /// The machine realizing this evader, if it is one.
    pub fn program(&self, budget: &EvalBudget) -> Result<Option<Program>, ZooError> {
        Ok(match self {
            EvaderSpec::Vm { program, .. } => Some(program.clone()),
            EvaderSpec::Constant(b) => Some(Program::halt(*b)),
            EvaderSpec::Anti(_) => None,
            EvaderSpec::Padded { .. } => self.padded(budget)?.map(|e| e.program),
        })
    }

    /// Measured `t_e` over `window`; `None` for host-level evaders.
    pub fn cost_profile(
        &self,
        window: RangeInclusive<u64>,
        limits: &TeLimits,
        budget: &EvalBudget,
    ) -> Result<Option<CostProfile>, ZooError> {
        match self.program(budget)? {
            Some(p) => Ok(Some(te_profile(&p, window, limits, false)?)),
            None => Ok(None),
        }
    }
}

fn bit_text(b: bool) -> char {
    if b {
        '1'
    } else {
        '0'
    }
}

impl fmt::Display for PredictorSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            PredictorSpec::Constant(b) => write!(f, "constant:{}", bit_text(*b)),
            PredictorSpec::CopyLast => write!(f, "copylast"),
            PredictorSpec::Lookalike {
                growth,
                pool,
                step_cap,
            } => {
                match growth {
                    GrowthFn::Scaled(inner) => write!(f, "scaled:f={inner},pool={pool}")?,
                    _ => write!(f, "lookalike:f={growth},pool={pool}")?,
                }
                if *step_cap != DEFAULT_STEP_CAP {
                    write!(f, ",cap={step_cap}")?;
                }
                Ok(())
            }
            PredictorSpec::Vm { program, limit } => write_vm(f, program, *limit),
        }
    }
}

impl fmt::Display for EvaderSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            EvaderSpec::Vm { program, limit } => write_vm(f, program, *limit),
            EvaderSpec::Constant(b) => write!(f, "constant:{}", bit_text(*b)),
            EvaderSpec::Anti(p) => write!(f, "anti:{p}"),
            EvaderSpec::Padded {
                pattern,
                target,
                window,
            } => {
                write!(f, "padded:pattern={pattern},target={target}")?;
                if *window != DEFAULT_PADDED_WINDOW {
                    write!(f, ",window={}..{}", window.start(), window.end())?;
                }
                Ok(())
            }
        }
    }
}

fn write_vm(f: &mut fmt::Formatter<'_>, program: &Program, limit: u64) -> fmt::Result {
    write!(f, "vm:{program}")?;
    if limit != DEFAULT_VM_LIMIT {
        write!(f, ",limit={limit}")?;
    }
    Ok(())
}

struct Options<'a> {
    text: &'a str,
    pairs: Vec<(&'a str, &'a str)>,
}

impl<'a> Options<'a> {
    fn parse(text: &'a str, body: &'a str) -> Result<Self, ZooError> {
        let mut pairs = Vec::new();
        for part in growth::split_top(body, ',') {
            let (k, v) = part
                .split_once('=')
                .ok_or_else(|| parse_err(text, &format!("expected key=value, found {part:?}")))?;
            pairs.push((k.trim(), v.trim()));
        }
        Ok(Self { text, pairs })
    }

    fn take(&mut self, key: &str) -> Option<&'a str> {
        let pos = self.pairs.iter().position(|(k, _)| *k == key)?;
        Some(self.pairs.remove(pos).1)
    }

    fn take_u64(&mut self, key: &str, default: u64) -> Result<u64, ZooError> {
        match self.take(key) {
            None => Ok(default),
            Some(v) => v
                .parse()
                .map_err(|_| parse_err(self.text, &format!("{key} must be a natural"))),
        }
    }

    fn require(&mut self, key: &str) -> Result<&'a str, ZooError> {
        self.take(key)
            .ok_or_else(|| parse_err(self.text, &format!("missing {key}=")))
    }

    fn finish(self) -> Result<(), ZooError> {
        match self.pairs.first() {
            None => Ok(()),
            Some((k, _)) => Err(parse_err(self.text, &format!("unknown option {k:?}"))),
        }
    }
}

fn parse_err(text: &str, msg: &str) -> ZooError {
    ZooError::Parse {
        text: text.to_string(),
        msg: msg.to_string(),
    }
}

fn parse_bit(text: &str, body: &str) -> Result<bool, ZooError> {
    match body {
        "0" => Ok(false),
        "1" => Ok(true),
        _ => Err(parse_err(text, "constant takes 0 or 1")),
    }
}

fn parse_vm(text: &str, body: &str) -> Result<(Program, u64), ZooError> {
    let mut limit = DEFAULT_VM_LIMIT;
    let mut rest = Vec::new();
    for part in body.split(',') {
        match part.strip_prefix("limit=") {
            Some(v) => {
                limit = v
                    .parse()
                    .map_err(|_| parse_err(text, "limit must be a natural"))?
            }
            None => rest.push(part),
        }
    }
    if limit == 0 {
        return Err(parse_err(text, "limit must be positive"));
    }
    let program = rest
        .join(",")
        .parse()
        .map_err(|e| parse_err(text, &format!("{e}")))?;
    Ok((program, limit))
}

fn parse_growth(text: &str, v: &str) -> Result<GrowthFn, ZooError> {
    v.parse()
        .map_err(|e: GrowthParseError| parse_err(text, &e.to_string()))
}

impl FromStr for PredictorSpec {
    type Err = ZooError;

    fn from_str(text: &str) -> Result<Self, Self::Err> {
        let text = text.trim();
        let (head, body) = text.split_once(':').unwrap_or((text, ""));
        match head {
            "constant" => Ok(PredictorSpec::Constant(parse_bit(text, body)?)),
            "copylast" if body.is_empty() => Ok(PredictorSpec::CopyLast),
            "lookalike" | "scaled" => {
                let mut o = Options::parse(text, body)?;
                let f = parse_growth(text, o.require("f")?)?;
                let pool = o.take_u64("pool", DEFAULT_POOL)?;
                let step_cap = o.take_u64("cap", DEFAULT_STEP_CAP)?;
                o.finish()?;
                let growth = if head == "scaled" {
                    GrowthFn::scaled(f)
                } else {
                    f
                };
                Ok(PredictorSpec::Lookalike {
                    growth,
                    pool,
                    step_cap,
                })
            }
            "vm" => {
                let (program, limit) = parse_vm(text, body)?;
                Ok(PredictorSpec::Vm { program, limit })
            }
            _ => Err(parse_err(text, "unknown predictor")),
        }
    }
}

impl FromStr for EvaderSpec {
    type Err = ZooError;

    fn from_str(text: &str) -> Result<Self, Self::Err> {
        let text = text.trim();
        let (head, body) = text.split_once(':').unwrap_or((text, ""));
        match head {
            "constant" => Ok(EvaderSpec::Constant(parse_bit(text, body)?)),
            "anti" => Ok(EvaderSpec::Anti(Box::new(body.parse()?))),
            "vm" => {
                let (program, limit) = parse_vm(text, body)?;
                Ok(EvaderSpec::Vm { program, limit })
            }
            "padded" => {
                let mut o = Options::parse(text, body)?;
                let pattern = o
                    .require("pattern")?
                    .parse()
                    .map_err(|e: padded::PatternParseError| parse_err(text, &e.to_string()))?;
                let target = parse_growth(text, o.require("target")?)?;
                let window = match o.take("window") {
                    None => DEFAULT_PADDED_WINDOW,
                    Some(w) => parse_window(w)
                        .ok_or_else(|| parse_err(text, "window is `END` or `START..END`"))?,
                };
                o.finish()?;
                Ok(EvaderSpec::Padded {
                    pattern,
                    target,
                    window,
                })
            }
            _ => Err(parse_err(text, "unknown evader")),
        }
    }
}

fn parse_window(w: &str) -> Option<RangeInclusive<u64>> {
    let (a, b) = match w.split_once("..") {
        Some((a, b)) => (a.parse().ok()?, b.parse().ok()?),
        None => (0, w.parse().ok()?),
    };
    (a <= b).then_some(a..=b)
}

serde_via_text!(PredictorSpec);
serde_via_text!(EvaderSpec);
