//! Subcommands. Each returns the text for standard output; files go to the
//! output directory.

use std::fmt::Write as _;
use std::ops::RangeInclusive;
use std::path::{Path, PathBuf};

use aspi_core::arena::{play, ArenaError};
use aspi_core::hierarchy::HierarchyEvaluator;
use aspi_core::machine::{nth_machine, te_profile, Program, TeError, TeLimits};
use aspi_core::measures::{
    aspi_big_o_estimate, aspi_hierarchy_profile, original_hibbard_measure_empirical, pr_enumerate, AspiProfile,
    LevelOutcome, MeasureError,
};
use aspi_core::ordinal::OrdinalError;
use aspi_core::zoo::{EvaderSpec, PredictorSpec, ZooError};
use aspi_core::{BudgetExceeded, BudgetLimit, EvalBudget, HierarchyKind, Ordinal};
use clap::{Args, Parser, Subcommand};
use num_bigint::BigUint;
use thiserror::Error;

use crate::config::{ConfigError, ExperimentConfig, Measure};
use crate::record::{self, PlayRecord, RecordBody, RecordError, RunRecord};

#[derive(Debug, Parser)]
#[command(name = "aspi", version, about = "Adversarial sequence prediction experiments")]
pub struct Cli {
    /// Experiment configuration (TOML); supplies seed, budgets and defaults.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Evaluate one hierarchy level at one argument.
    Eval {
        #[arg(long)]
        hierarchy: HierarchyKind,
        #[arg(long)]
        ordinal: String,
        #[arg(long)]
        n: BigUint,
        #[command(flatten)]
        budget: BudgetArgs,
    },
    /// Print fundamental sequence entries of a limit ordinal.
    Fundseq {
        #[arg(long)]
        ordinal: String,
        /// A single index.
        #[arg(long, conflicts_with = "upto")]
        i: Option<BigUint>,
        /// Every index from 0 to this one.
        #[arg(long)]
        upto: Option<u64>,
    },
    /// Worst-case step counts of a machine.
    Te {
        /// `len=<bits>,hex=<digits>` or `index=<k>`.
        #[arg(long)]
        program: Program,
        /// A single input length.
        #[arg(long, conflicts_with = "window")]
        n: Option<u64>,
        /// Input lengths `A..B` (inclusive).
        #[arg(long)]
        window: Option<String>,
    },
    /// Play one game.
    Play {
        #[arg(long)]
        predictor: PredictorSpec,
        #[arg(long)]
        evader: EvaderSpec,
        #[arg(long)]
        horizon: Option<u64>,
        /// Defaults to the configured window, or the horizon if shorter.
        #[arg(long)]
        window: Option<u64>,
    },
    /// Run the configured measure for every configured predictor.
    Profile,
    /// List machines (or primitive recursive terms) by index.
    Enumerate {
        #[arg(long, default_value_t = 1)]
        from: u64,
        #[arg(long, default_value_t = 16)]
        count: u64,
        /// Enumerate primitive recursive terms instead of machines.
        #[arg(long)]
        pr: bool,
    },
    /// Write hierarchy growth curves as CSV.
    Curve {
        #[arg(long)]
        hierarchy: HierarchyKind,
        /// One or more levels.
        #[arg(long = "ordinal", required = true)]
        ordinals: Vec<String>,
        #[arg(long, default_value_t = 8)]
        n_max: u64,
        #[command(flatten)]
        budget: BudgetArgs,
    },
}

#[derive(Debug, Args, Default)]
pub struct BudgetArgs {
    #[arg(long)]
    pub max_bits: Option<u64>,
    #[arg(long)]
    pub max_expansions: Option<u64>,
}

#[derive(Debug, Error)]
pub enum CliError {
    #[error(transparent)]
    Config(#[from] ConfigError),
    #[error("budget exceeded: {0}")]
    Budget(String),
    #[error("{0}")]
    Input(String),
    #[error(transparent)]
    Ordinal(#[from] OrdinalError),
    #[error(transparent)]
    Measure(#[from] MeasureError),
    #[error(transparent)]
    Arena(#[from] ArenaError),
    #[error(transparent)]
    Zoo(#[from] ZooError),
    #[error(transparent)]
    Te(#[from] TeError),
    #[error(transparent)]
    Record(#[from] RecordError),
}

impl From<BudgetExceeded> for CliError {
    fn from(e: BudgetExceeded) -> Self {
        CliError::Budget(e.to_string())
    }
}

impl CliError {
    /// Exit status: 2 for exhausted budgets or step limits, 1 otherwise.
    pub fn exit_code(&self) -> u8 {
        let budget = match self {
            CliError::Budget(_) | CliError::Te(TeError::LimitExceeded { .. }) => true,
            CliError::Arena(e) => e.player_error().is_some(),
            CliError::Measure(e) => matches!(
                e,
                MeasureError::Budget(_) | MeasureError::Cost(TeError::LimitExceeded { .. }) | MeasureError::Arena { .. }
            ),
            _ => false,
        };
        if budget {
            2
        } else {
            1
        }
    }
}

/// Standard output text and whether any budget ran out along the way.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CmdOutput {
    pub text: String,
    pub budget_exceeded: bool,
}

impl CmdOutput {
    fn ok(text: String) -> Self {
        Self {
            text,
            budget_exceeded: false,
        }
    }

    pub fn exit_code(&self) -> u8 {
        if self.budget_exceeded {
            2
        } else {
            0
        }
    }
}

fn parse_ordinal(text: &str) -> Result<Ordinal, CliError> {
    text.parse().map_err(|e| CliError::Input(format!("{text:?}: {e}")))
}

fn budget_from(cfg: &ExperimentConfig, args: &BudgetArgs) -> Result<EvalBudget, CliError> {
    let base = cfg.eval_budget()?;
    EvalBudget::new(
        args.max_expansions.unwrap_or(base.max_expansions),
        args.max_bits.unwrap_or(base.max_bits),
    )
    .map_err(|e| CliError::Input(e.to_string()))
}

fn parse_window(text: &str) -> Result<RangeInclusive<u64>, CliError> {
    let bad = || CliError::Input(format!("window {text:?} is not of the form A..B"));
    let (a, b) = text.split_once("..").ok_or_else(bad)?;
    let b = b.strip_prefix('=').unwrap_or(b);
    let (a, b): (u64, u64) = (a.trim().parse().map_err(|_| bad())?, b.trim().parse().map_err(|_| bad())?);
    if a > b {
        return Err(bad());
    }
    Ok(a..=b)
}

/// Loads the configuration named on the command line, or the defaults.
pub fn load_config(path: Option<&Path>) -> Result<ExperimentConfig, CliError> {
    match path {
        Some(p) => Ok(ExperimentConfig::load(p)?),
        None => Ok(ExperimentConfig::new(0)),
    }
}

pub fn run(cli: &Cli) -> Result<CmdOutput, CliError> {
    let cfg = load_config(cli.config.as_deref())?;
    let out_dir = cfg.output_dir();
    match &cli.command {
        Command::Eval {
            hierarchy,
            ordinal,
            n,
            budget,
        } => cmd_eval(*hierarchy, &parse_ordinal(ordinal)?, n, &budget_from(&cfg, budget)?),
        Command::Fundseq { ordinal, i, upto } => cmd_fundseq(&parse_ordinal(ordinal)?, i.as_ref(), *upto),
        Command::Te { program, n, window } => {
            let window = match (n, window) {
                (Some(n), _) => *n..=*n,
                (None, Some(w)) => parse_window(w)?,
                (None, None) => 0..=cfg.caps.verify_window[1],
            };
            let limits = TeLimits {
                max_n: cfg.budgets.te_max_n,
                per_run_limit: cfg.budgets.te_per_run_limit,
            };
            cmd_te(program, window, &limits)
        }
        Command::Play {
            predictor,
            evader,
            horizon,
            window,
        } => {
            let mut cfg = cfg;
            if let Some(h) = horizon {
                cfg.game.horizon = *h;
                cfg.game.window = cfg.game.window.min(*h);
            }
            if let Some(w) = window {
                cfg.game.window = *w;
            }
            cmd_play(&cfg, predictor, evader, &out_dir)
        }
        Command::Profile => {
            if cli.config.is_none() {
                return Err(CliError::Input("profile needs --config".into()));
            }
            let run = cmd_profile(&cfg, &out_dir)?;
            Ok(CmdOutput {
                text: run.summary,
                budget_exceeded: run.budget_exceeded,
            })
        }
        Command::Enumerate { from, count, pr } => cmd_enumerate(*from, *count, *pr),
        Command::Curve {
            hierarchy,
            ordinals,
            n_max,
            budget,
        } => {
            let ordinals = ordinals.iter().map(|o| parse_ordinal(o)).collect::<Result<Vec<_>, _>>()?;
            let csv = curve_csv(*hierarchy, &ordinals, *n_max, &budget_from(&cfg, budget)?);
            let path = out_dir.join("curve.csv");
            record::write_file(&path, csv.as_bytes())?;
            Ok(CmdOutput::ok(format!("{csv}wrote {}\n", path.display())))
        }
    }
}

pub fn cmd_eval(kind: HierarchyKind, alpha: &Ordinal, n: &BigUint, budget: &EvalBudget) -> Result<CmdOutput, CliError> {
    let v = HierarchyEvaluator::unmemoized().eval(kind, alpha, n, budget)?;
    Ok(CmdOutput::ok(format!("{v}\n")))
}

pub fn cmd_fundseq(alpha: &Ordinal, i: Option<&BigUint>, upto: Option<u64>) -> Result<CmdOutput, CliError> {
    match (i, upto) {
        (Some(i), _) => Ok(CmdOutput::ok(format!("{}\n", alpha.fundamental_sequence(i)?))),
        (None, upto) => {
            let mut out = String::new();
            for i in 0..=upto.unwrap_or(5) {
                writeln!(out, "{i}\t{}", alpha.fundamental(i)?).unwrap();
            }
            Ok(CmdOutput::ok(out))
        }
    }
}

pub fn cmd_te(p: &Program, window: RangeInclusive<u64>, limits: &TeLimits) -> Result<CmdOutput, CliError> {
    Ok(CmdOutput::ok(te_profile(p, window, limits, false)?.to_csv()))
}

pub fn cmd_play(cfg: &ExperimentConfig, p: &PredictorSpec, e: &EvaderSpec, out_dir: &Path) -> Result<CmdOutput, CliError> {
    let started = record::now_ms();
    let budget = cfg.eval_budget()?;
    let mut predictor = p.build(&budget);
    let mut evader = e.build(&budget)?;
    let t = play(predictor.as_mut(), evader.as_mut(), cfg.game.horizon)?;
    let verdict = t.learned(cfg.game.window)?;
    let mut body = RecordBody::new("play", cfg);
    let csv = t.to_csv();
    body.plays.push(PlayRecord {
        predictor: p.to_string(),
        evader: e.to_string(),
        verdict,
        mispredictions: t.mispredictions(),
        transcript: cfg.output.transcripts.then_some(t),
    });
    record::persist(&RunRecord::new(body, started), &out_dir.join("play.json"))?;
    record::write_file(&out_dir.join("transcript.csv"), csv.as_bytes())?;
    let last = verdict.last_loss_round.map_or("none".to_string(), |r| r.to_string());
    Ok(CmdOutput::ok(format!(
        "learned={} horizon={} window={} last_loss_round={last}\n",
        verdict.learned, verdict.horizon, verdict.window
    )))
}

pub struct ProfileRun {
    pub record: RunRecord,
    pub record_path: PathBuf,
    pub csv_paths: Vec<PathBuf>,
    pub summary: String,
    pub budget_exceeded: bool,
}

fn run_measure(measure: &Measure, p: &PredictorSpec, r: &crate::config::Resolved) -> Result<AspiProfile, MeasureError> {
    match measure {
        Measure::BigO(ladder) => aspi_big_o_estimate(p, ladder, &r.suite, &r.game, &r.budgets),
        Measure::Hierarchy(kind, ladder) => aspi_hierarchy_profile(p, *kind, ladder, &r.suite, &r.game, &r.budgets),
        Measure::Hibbard(m_max) => original_hibbard_measure_empirical(p, *m_max, &r.suite, &r.game, &r.budgets),
    }
}

/// Profiles every configured predictor and writes `profile.json` plus one
/// `profile-<k>.csv` per predictor.
pub fn cmd_profile(cfg: &ExperimentConfig, out_dir: &Path) -> Result<ProfileRun, CliError> {
    let started = record::now_ms();
    let r = cfg.resolve()?;
    let measure = r
        .measure
        .as_ref()
        .ok_or_else(|| CliError::Input("the configuration has no [profile] section".into()))?;
    let mut body = RecordBody::new("profile", cfg);
    let mut summary = String::new();
    let mut csv_paths = Vec::new();
    let mut budget_exceeded = false;
    for (k, p) in r.predictors.iter().enumerate() {
        let prof = run_measure(measure, p, &r)?;
        writeln!(summary, "{} [{}]: estimate {} (rank {})", prof.predictor, prof.measure, prof.estimate, prof.estimate.rank()).unwrap();
        for l in &prof.levels {
            let detail = match &l.outcome {
                LevelOutcome::AllLearned => format!("learned all {}", l.evaders.len()),
                LevelOutcome::Vacuous => "vacuous (no members)".to_string(),
                LevelOutcome::FailedOn { evader, last_loss_round } => {
                    format!("failed on {evader} (last loss round {})", last_loss_round.map_or("-".into(), |r| r.to_string()))
                }
                LevelOutcome::Skipped { reason } => {
                    budget_exceeded = true;
                    format!("skipped: {reason}")
                }
            };
            writeln!(summary, "  {}: {detail}", l.level).unwrap();
        }
        let path = out_dir.join(format!("profile-{k}.csv"));
        record::write_file(&path, prof.to_csv().as_bytes())?;
        csv_paths.push(path);
        body.profiles.push(prof);
    }
    let record = RunRecord::new(body, started);
    let record_path = out_dir.join("profile.json");
    record::persist(&record, &record_path)?;
    writeln!(summary, "wrote {}", record_path.display()).unwrap();
    Ok(ProfileRun {
        record,
        record_path,
        csv_paths,
        summary,
        budget_exceeded,
    })
}

pub fn cmd_enumerate(from: u64, count: u64, pr: bool) -> Result<CmdOutput, CliError> {
    if from == 0 {
        return Err(CliError::Input("indices start at 1".into()));
    }
    let mut out = String::new();
    for i in from..from.saturating_add(count) {
        if pr {
            writeln!(out, "{i}\t{}", pr_enumerate(i)).unwrap();
        } else {
            let p = nth_machine(i);
            writeln!(out, "{i}\t{p}\t{}", p.disassemble().replace('\n', "; ")).unwrap();
        }
    }
    Ok(CmdOutput::ok(out))
}

/// `n,<level>,…` with one column per level. A value past the bit cap is
/// written `>=2^<bits>`, and an expansion overrun leaves the cell empty.
pub fn curve_csv(kind: HierarchyKind, ordinals: &[Ordinal], n_max: u64, budget: &EvalBudget) -> String {
    let mut ev = HierarchyEvaluator::default();
    let mut out = String::from("n");
    for a in ordinals {
        write!(out, ",{kind}({a})").unwrap();
    }
    out.push('\n');
    for n in 0..=n_max {
        write!(out, "{n}").unwrap();
        for a in ordinals {
            match ev.eval(kind, a, &BigUint::from(n), budget) {
                Ok(v) => write!(out, ",{v}").unwrap(),
                Err(e) if e.limit == BudgetLimit::Bits => write!(out, ",>=2^{}", budget.max_bits).unwrap(),
                Err(_) => out.push(','),
            }
        }
        out.push('\n');
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn run_args(args: &[&str]) -> Result<CmdOutput, CliError> {
        run(&Cli::try_parse_from(args).unwrap())
    }

    #[test]
    fn eval_example() {
        let out = run_args(&["aspi", "eval", "--hierarchy", "slow", "--ordinal", "w^w", "--n", "3"]).unwrap();
        assert_eq!(out.text, "27\n");
    }

    #[test]
    fn fundseq_example() {
        let out = run_args(&["aspi", "fundseq", "--ordinal", "w^5", "--i", "3"]).unwrap();
        assert_eq!(out.text, "w^4*3\n");
    }

    #[test]
    fn budget_errors_exit_with_two() {
        let e = run_args(&["aspi", "eval", "--hierarchy", "fast", "--ordinal", "w", "--n", "20", "--max-bits", "64"]).unwrap_err();
        assert_eq!(e.exit_code(), 2);
        let e = run_args(&["aspi", "fundseq", "--ordinal", "w+1", "--i", "3"]).unwrap_err();
        assert_eq!(e.exit_code(), 1);
    }

    #[test]
    fn te_lists_costs() {
        let out = run_args(&["aspi", "te", "--program", "index=31", "--window", "0..3"]).unwrap();
        assert_eq!(out.text, "n,te\n0,1\n1,1\n2,1\n3,1\n");
    }

    #[test]
    fn windows_parse() {
        assert_eq!(parse_window("2..5").unwrap(), 2..=5);
        assert_eq!(parse_window("2..=5").unwrap(), 2..=5);
        assert!(parse_window("5..2").is_err());
        assert!(parse_window("5").is_err());
    }

    #[test]
    fn curve_marks_overflow() {
        let csv = curve_csv(
            HierarchyKind::FastGrowing,
            &["2".parse().unwrap(), "w".parse().unwrap()],
            3,
            &EvalBudget::new(100_000, 16).unwrap(),
        );
        assert_eq!(csv, "n,fast(2),fast(w)\n0,0,1\n1,2,2\n2,8,8\n3,24,>=2^16\n");
    }

    #[test]
    fn enumerate_lists_machines() {
        let out = cmd_enumerate(30, 2, false).unwrap().text;
        let lines: Vec<&str> = out.lines().collect();
        assert_eq!(lines.len(), 2);
        assert!(lines[0].starts_with("30\t") && lines[0].contains("HALT 0"), "{out}");
        assert!(lines[1].contains("HALT 1"), "{out}");
        assert!(cmd_enumerate(1, 1, true).unwrap().text.starts_with("1\tS"));
    }
}
