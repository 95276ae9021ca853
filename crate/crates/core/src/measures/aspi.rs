//! Empirical ASPI profiles: a predictor is played against a finite suite of
//! evaders at each rung of a ladder of growth rates, and its estimate is
//! the top of the longest passing prefix.

use std::collections::HashMap;
use std::fmt;
use std::ops::RangeInclusive;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::arena::{play, ArenaError, Player};
use crate::budget::EvalBudget;
use crate::hierarchy::HierarchyKind;
use crate::machine::{CostProfile, Program, TeLimits, MACHINE_MODEL_ID};
use crate::ordinal::Ordinal;
use crate::zoo::{
    EvaderSpec, GrowthFn, Pattern, PredictorSpec, VmPlayer, ZooError, DEFAULT_VM_LIMIT,
};

use super::bigo::{big_o_member, default_grid, BigOVerdict};
use super::majorize::{default_confirm, majorizes};
use super::{MeasureError, ENUMERATION_SCHEME};

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SuiteMember {
    pub evader: EvaderSpec,
    /// Restricts the member to one rung, named by its label. Required for
    /// evaders that are not machines.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub level: Option<String>,
}

/// A finite evader suite. Every machine member carries a cost profile
/// measured on `verify_window`, and is used at each rung it provably
/// belongs to.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SuiteConfig {
    #[serde(default)]
    pub members: Vec<SuiteMember>,
    /// Every pattern is paired with every target as a padded evader.
    #[serde(default)]
    pub patterns: Vec<Pattern>,
    #[serde(default)]
    pub targets: Vec<GrowthFn>,
    /// Extra padded evaders with random patterns and targets from `targets`.
    #[serde(default)]
    pub random: u32,
    pub seed: u64,
    #[serde(default = "default_verify_window")]
    pub verify_window: RangeInclusive<u64>,
}

fn default_verify_window() -> RangeInclusive<u64> {
    0..=12
}

impl SuiteConfig {
    pub fn new(seed: u64) -> Self {
        Self {
            members: Vec::new(),
            patterns: Vec::new(),
            targets: Vec::new(),
            random: 0,
            seed,
            verify_window: default_verify_window(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GameParams {
    pub horizon: u64,
    pub window: u64,
}

impl Default for GameParams {
    fn default() -> Self {
        Self {
            horizon: 150,
            window: 50,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct MeasureBudgets {
    pub eval: EvalBudget,
    pub te: TeLimits,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "outcome", rename_all = "snake_case")]
pub enum LevelOutcome {
    AllLearned,
    /// No suite member belongs to this rung; it passes vacuously.
    Vacuous,
    FailedOn {
        evader: String,
        last_loss_round: Option<u64>,
    },
    /// A budget ran out, so the rung could not be decided.
    Skipped {
        reason: String,
    },
}

impl LevelOutcome {
    pub fn passes(&self) -> bool {
        matches!(self, LevelOutcome::AllLearned | LevelOutcome::Vacuous)
    }

    fn tag(&self) -> &'static str {
        match self {
            LevelOutcome::AllLearned => "learned",
            LevelOutcome::Vacuous => "vacuous",
            LevelOutcome::FailedOn { .. } => "failed",
            LevelOutcome::Skipped { .. } => "skipped",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct LevelReport {
    pub level: String,
    pub outcome: LevelOutcome,
    pub evaders: Vec<String>,
}

/// Top of the longest passing prefix of the ladder.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Estimate {
    BelowFirst,
    Level {
        index: usize,
        label: String,
    },
    /// Every rung passed; the ladder says nothing about higher rates.
    AtLeast {
        index: usize,
        label: String,
    },
}

impl Estimate {
    /// Number of passing rungs in the prefix; 0 for [`Estimate::BelowFirst`].
    pub fn rank(&self) -> usize {
        match self {
            Estimate::BelowFirst => 0,
            Estimate::Level { index, .. } | Estimate::AtLeast { index, .. } => index + 1,
        }
    }
}

impl fmt::Display for Estimate {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Estimate::BelowFirst => write!(f, "below the first level"),
            Estimate::Level { label, .. } => write!(f, "{label}"),
            Estimate::AtLeast { label, .. } => write!(f, "at least {label}"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ProfileParams {
    pub game: GameParams,
    pub suite: SuiteConfig,
    pub budgets: MeasureBudgets,
    /// How a rung admits an evader.
    pub membership: String,
    pub confirm: u64,
    pub machine_model: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub enumeration_scheme: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct AspiProfile {
    pub measure: String,
    pub predictor: PredictorSpec,
    pub ladder: Vec<String>,
    pub levels: Vec<LevelReport>,
    pub estimate: Estimate,
    /// Every suite member, in play order.
    pub suite: Vec<String>,
    pub params: ProfileParams,
}

fn csv_field(s: &str) -> String {
    if s.contains([',', '"', '\n']) {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_string()
    }
}

impl AspiProfile {
    /// `level,outcome,failed_on`, one row per rung.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("level,outcome,failed_on\n");
        for l in &self.levels {
            let failed_on = match &l.outcome {
                LevelOutcome::FailedOn { evader, .. } => evader.as_str(),
                _ => "",
            };
            out.push_str(&format!(
                "{},{},{}\n",
                csv_field(&l.level),
                l.outcome.tag(),
                csv_field(failed_on)
            ));
        }
        out
    }
}

struct Member {
    name: String,
    spec: EvaderSpec,
    program: Option<Program>,
    cost: Option<CostProfile>,
    level: Option<String>,
}

fn member(
    spec: EvaderSpec,
    level: Option<String>,
    cfg: &SuiteConfig,
    budgets: &MeasureBudgets,
) -> Result<Member, ZooError> {
    let program = spec.program(&budgets.eval)?;
    let cost = match &program {
        Some(p) => Some(crate::machine::te_profile(
            p,
            cfg.verify_window.clone(),
            &budgets.te,
            true,
        )?),
        None => None,
    };
    Ok(Member {
        name: spec.to_string(),
        spec,
        program,
        cost,
        level,
    })
}

fn random_pattern(rng: &mut ChaCha8Rng) -> Pattern {
    let prefix = (0..rng.random_range(0..=2))
        .map(|_| rng.random_bool(0.5))
        .collect();
    let cycle = (0..rng.random_range(1..=3))
        .map(|_| rng.random_bool(0.5))
        .collect();
    Pattern::new(prefix, cycle).expect("nonempty cycle")
}

/// Builds and verifies the whole suite before anything is played.
fn build_suite(cfg: &SuiteConfig, budgets: &MeasureBudgets) -> Result<Vec<Member>, MeasureError> {
    let mut out: Vec<Member> = Vec::new();
    let push = |m: Member, out: &mut Vec<Member>| {
        if !out.iter().any(|o| o.name == m.name && o.level == m.level) {
            out.push(m);
        }
    };
    for m in &cfg.members {
        push(
            member(m.evader.clone(), m.level.clone(), cfg, budgets)?,
            &mut out,
        );
    }
    let padded = |pattern: &Pattern, target: &GrowthFn| EvaderSpec::Padded {
        pattern: pattern.clone(),
        target: target.clone(),
        window: cfg.verify_window.clone(),
    };
    for p in &cfg.patterns {
        for t in &cfg.targets {
            push(member(padded(p, t), None, cfg, budgets)?, &mut out);
        }
    }
    if cfg.random > 0 {
        if cfg.targets.is_empty() {
            return Err(MeasureError::Invalid(
                "random suite members need at least one target".into(),
            ));
        }
        let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
        const ATTEMPTS: u32 = 1000;
        for _ in 0..cfg.random {
            let mut attempts = 0;
            let m = loop {
                attempts += 1;
                if attempts > ATTEMPTS {
                    return Err(MeasureError::Generation { attempts: ATTEMPTS });
                }
                let pattern = random_pattern(&mut rng);
                let target = &cfg.targets[rng.random_range(0..cfg.targets.len())];
                match member(padded(&pattern, target), None, cfg, budgets) {
                    Ok(m) => break m,
                    Err(ZooError::Padded(crate::zoo::PaddedError::UnreachableTarget {
                        ..
                    })) => continue,
                    Err(e) => return Err(e.into()),
                }
            };
            push(m, &mut out);
        }
    }
    Ok(out)
}

/// How a rung decides that a measured cost belongs to it.
enum Rung {
    BigO(GrowthFn),
    Majorant(GrowthFn),
}

enum Membership {
    In,
    Out,
    Undecided(String),
}

impl Rung {
    fn admits(&self, cost: &CostProfile, budgets: &MeasureBudgets) -> Membership {
        let verdict = match self {
            Rung::BigO(f) => big_o_member(cost, f, cost.window(), &default_grid(), &budgets.eval)
                .map(|v| matches!(v, BigOVerdict::Witness { .. })),
            Rung::Majorant(f) => {
                majorizes(f, cost, cost.end(), &budgets.eval).map(|v| v.is_majorized())
            }
        };
        match verdict {
            Ok(true) => Membership::In,
            Ok(false) => Membership::Out,
            Err(e) => Membership::Undecided(e.to_string()),
        }
    }
}

#[derive(Clone)]
enum PlayResult {
    Learned,
    Lost(Option<u64>),
    Skipped(String),
}

fn play_member(
    p: &PredictorSpec,
    m: &Member,
    game: &GameParams,
    budgets: &MeasureBudgets,
) -> Result<PlayResult, MeasureError> {
    let mut pred = p.build(&budgets.eval);
    let mut ev: Box<dyn Player> = match (&m.spec, &m.program) {
        (EvaderSpec::Vm { limit, .. }, Some(prog)) => Box::new(VmPlayer::new(prog.clone(), *limit)),
        (_, Some(prog)) => Box::new(VmPlayer::new(prog.clone(), DEFAULT_VM_LIMIT)),
        (spec, None) => spec.build(&budgets.eval)?,
    };
    match play(pred.as_mut(), ev.as_mut(), game.horizon) {
        Ok(t) => {
            let v = t
                .learned(game.window)
                .map_err(|source| MeasureError::Arena {
                    evader: m.name.clone(),
                    source,
                })?;
            Ok(if v.learned {
                PlayResult::Learned
            } else {
                PlayResult::Lost(v.last_loss_round)
            })
        }
        Err(ArenaError::PredictorTimeout { round, source }) if source.is_budget() => Ok(
            PlayResult::Skipped(format!("predictor budget in round {round}: {source}")),
        ),
        Err(source) => Err(MeasureError::Arena {
            evader: m.name.clone(),
            source,
        }),
    }
}

fn validate(game: &GameParams) -> Result<(), MeasureError> {
    if game.horizon == 0 || game.window == 0 || game.window > game.horizon {
        return Err(MeasureError::Invalid(format!(
            "need 1 ≤ window ≤ horizon, got window {} and horizon {}",
            game.window, game.horizon
        )));
    }
    Ok(())
}

#[allow(clippy::too_many_arguments)]
fn profile(
    measure: String,
    membership: &str,
    p: &PredictorSpec,
    rungs: Vec<(String, Rung)>,
    suite: &SuiteConfig,
    game: &GameParams,
    budgets: &MeasureBudgets,
    enumeration_scheme: Option<String>,
) -> Result<AspiProfile, MeasureError> {
    validate(game)?;
    if rungs.is_empty() {
        return Err(MeasureError::EmptyLadder);
    }
    let members = build_suite(suite, budgets)?;

    // admissions are settled for every rung before the first play
    let mut admitted: Vec<Result<Vec<usize>, String>> = Vec::new();
    for (label, rung) in &rungs {
        let mut ids = Vec::new();
        let mut undecided = None;
        for (k, m) in members.iter().enumerate() {
            match (&m.level, &m.cost) {
                (Some(l), _) if l != label => continue,
                (None, None) => {
                    return Err(MeasureError::NeedsLevel {
                        evader: m.name.clone(),
                    })
                }
                (_, None) => ids.push(k),
                (level, Some(cost)) => match rung.admits(cost, budgets) {
                    Membership::In => ids.push(k),
                    Membership::Out if level.is_some() => {
                        return Err(MeasureError::Misassigned {
                            evader: m.name.clone(),
                            level: label.clone(),
                        })
                    }
                    Membership::Out => {}
                    Membership::Undecided(reason) => {
                        undecided.get_or_insert(format!("membership of {}: {reason}", m.name));
                    }
                },
            }
        }
        admitted.push(match undecided {
            Some(reason) => Err(reason),
            None => Ok(ids),
        });
    }
    for m in &members {
        if let Some(l) = &m.level {
            if !rungs.iter().any(|(label, _)| label == l) {
                return Err(MeasureError::UnknownLevel {
                    evader: m.name.clone(),
                    level: l.clone(),
                });
            }
        }
    }

    let mut plays: HashMap<usize, PlayResult> = HashMap::new();
    let mut levels = Vec::new();
    for ((label, _), adm) in rungs.iter().zip(admitted) {
        let (outcome, evaders) = match adm {
            Err(reason) => (LevelOutcome::Skipped { reason }, Vec::new()),
            Ok(ids) if ids.is_empty() => (LevelOutcome::Vacuous, Vec::new()),
            Ok(ids) => {
                let mut outcome = LevelOutcome::AllLearned;
                for &k in &ids {
                    let r = match plays.get(&k) {
                        Some(r) => r.clone(),
                        None => {
                            let r = play_member(p, &members[k], game, budgets)?;
                            plays.insert(k, r.clone());
                            r
                        }
                    };
                    match r {
                        PlayResult::Learned => {}
                        PlayResult::Lost(last_loss_round) => {
                            outcome = LevelOutcome::FailedOn {
                                evader: members[k].name.clone(),
                                last_loss_round,
                            };
                            break;
                        }
                        PlayResult::Skipped(reason) => {
                            outcome = LevelOutcome::Skipped { reason };
                            break;
                        }
                    }
                }
                (
                    outcome,
                    ids.iter().map(|&k| members[k].name.clone()).collect(),
                )
            }
        };
        levels.push(LevelReport {
            level: label.clone(),
            outcome,
            evaders,
        });
    }

    let prefix = levels.iter().take_while(|l| l.outcome.passes()).count();
    let estimate = match prefix {
        0 => Estimate::BelowFirst,
        k if k == levels.len() => Estimate::AtLeast {
            index: k - 1,
            label: levels[k - 1].level.clone(),
        },
        k => Estimate::Level {
            index: k - 1,
            label: levels[k - 1].level.clone(),
        },
    };
    Ok(AspiProfile {
        measure,
        predictor: p.clone(),
        ladder: rungs.into_iter().map(|(l, _)| l).collect(),
        levels,
        estimate,
        suite: members.iter().map(|m| m.name.clone()).collect(),
        params: ProfileParams {
            game: *game,
            suite: suite.clone(),
            budgets: *budgets,
            membership: membership.to_string(),
            confirm: default_confirm(*suite.verify_window.end()),
            machine_model: MACHINE_MODEL_ID.to_string(),
            enumeration_scheme,
        },
    })
}

/// Big-O rungs: an evader belongs to rung `f` when a grid witness shows
/// `t_e ∈ O(f)` on the verification window.
pub fn aspi_big_o_estimate(
    p: &PredictorSpec,
    ladder: &[GrowthFn],
    suite: &SuiteConfig,
    game: &GameParams,
    budgets: &MeasureBudgets,
) -> Result<AspiProfile, MeasureError> {
    let rungs = ladder
        .iter()
        .map(|f| (f.to_string(), Rung::BigO(f.clone())))
        .collect();
    profile(
        "big-o".into(),
        "big-o witness on the default grid",
        p,
        rungs,
        suite,
        game,
        budgets,
        None,
    )
}

/// Hierarchy rungs: an evader belongs to rung `α` when the level-`α`
/// function majorizes its cost on the verification window.
pub fn aspi_hierarchy_profile(
    p: &PredictorSpec,
    kind: HierarchyKind,
    ladder: &[Ordinal],
    suite: &SuiteConfig,
    game: &GameParams,
    budgets: &MeasureBudgets,
) -> Result<AspiProfile, MeasureError> {
    for (index, w) in ladder.windows(2).enumerate() {
        if w[0] >= w[1] {
            return Err(MeasureError::LadderOrder {
                index: index + 1,
                prev: w[0].to_string(),
                next: w[1].to_string(),
            });
        }
    }
    let rungs = ladder
        .iter()
        .map(|a| {
            let f = GrowthFn::Hierarchy {
                kind,
                alpha: a.clone(),
                budget: None,
            };
            (a.to_string(), Rung::Majorant(f))
        })
        .collect();
    profile(
        format!("hierarchy:{kind}"),
        "majorized by the rung",
        p,
        rungs,
        suite,
        game,
        budgets,
        None,
    )
}

/// Rungs `f_1, …, f_{m_max}`; the estimate's rank is the empirical measure,
/// with 0 when even `m = 1` fails.
pub fn original_hibbard_measure_empirical(
    p: &PredictorSpec,
    m_max: u64,
    suite: &SuiteConfig,
    game: &GameParams,
    budgets: &MeasureBudgets,
) -> Result<AspiProfile, MeasureError> {
    if m_max == 0 {
        return Err(MeasureError::Invalid("m_max must be positive".into()));
    }
    let rungs = (1..=m_max)
        .map(|m| (m.to_string(), Rung::Majorant(GrowthFn::Hibbard(m))))
        .collect();
    profile(
        "original-hibbard".into(),
        "majorized by f_m",
        p,
        rungs,
        suite,
        game,
        budgets,
        Some(ENUMERATION_SCHEME.to_string()),
    )
}

#[cfg(test)]
mod tests {
    use super::*;

    fn pred(s: &str) -> PredictorSpec {
        s.parse().unwrap()
    }

    fn linear_suite() -> SuiteConfig {
        let mut s = SuiteConfig::new(7);
        s.patterns = vec!["0".parse().unwrap(), "1".parse().unwrap()];
        s.targets = vec!["n+4".parse().unwrap(), "2*n+6".parse().unwrap()];
        s
    }

    #[test]
    fn constant_one_scores_zero() {
        let mut suite = linear_suite();
        suite.members.push(SuiteMember {
            evader: "constant:0".parse().unwrap(),
            level: None,
        });
        let prof = original_hibbard_measure_empirical(
            &pred("constant:1"),
            3,
            &suite,
            &GameParams::default(),
            &MeasureBudgets::default(),
        )
        .unwrap();
        assert_eq!(prof.estimate, Estimate::BelowFirst);
        assert_eq!(prof.estimate.rank(), 0);
        assert!(matches!(
            prof.levels[0].outcome,
            LevelOutcome::FailedOn { .. }
        ));
        assert!(prof
            .to_csv()
            .starts_with("level,outcome,failed_on\n1,failed,"));
    }

    #[test]
    fn empty_rungs_are_vacuous() {
        let suite = SuiteConfig::new(1);
        let prof = aspi_big_o_estimate(
            &pred("constant:0"),
            &["n".parse().unwrap()],
            &suite,
            &GameParams::default(),
            &MeasureBudgets::default(),
        )
        .unwrap();
        assert_eq!(prof.levels[0].outcome, LevelOutcome::Vacuous);
        assert_eq!(prof.estimate.rank(), 1);
    }

    #[test]
    fn anti_member_at_level_one() {
        let mut suite = SuiteConfig::new(3);
        suite.members.push(SuiteMember {
            evader: "anti:constant:0".parse().unwrap(),
            level: Some("1".into()),
        });
        let ladder: Vec<Ordinal> = ["1", "2", "w"].iter().map(|s| s.parse().unwrap()).collect();
        let prof = aspi_hierarchy_profile(
            &pred("constant:0"),
            HierarchyKind::SlowGrowing,
            &ladder,
            &suite,
            &GameParams::default(),
            &MeasureBudgets::default(),
        )
        .unwrap();
        assert_eq!(prof.estimate, Estimate::BelowFirst);
    }

    #[test]
    fn ladder_must_increase() {
        let ladder: Vec<Ordinal> = ["w", "2"].iter().map(|s| s.parse().unwrap()).collect();
        let r = aspi_hierarchy_profile(
            &pred("constant:0"),
            HierarchyKind::SlowGrowing,
            &ladder,
            &SuiteConfig::new(0),
            &GameParams::default(),
            &MeasureBudgets::default(),
        );
        assert!(matches!(r, Err(MeasureError::LadderOrder { index: 1, .. })));
    }

    #[test]
    fn host_members_need_a_level() {
        let mut suite = SuiteConfig::new(0);
        suite.members.push(SuiteMember {
            evader: "anti:copylast".parse().unwrap(),
            level: None,
        });
        let r = aspi_big_o_estimate(
            &pred("copylast"),
            &["n".parse().unwrap()],
            &suite,
            &GameParams::default(),
            &MeasureBudgets::default(),
        );
        assert!(matches!(r, Err(MeasureError::NeedsLevel { .. })));
    }

    #[test]
    fn random_members_are_reproducible() {
        let mut suite = linear_suite();
        suite.random = 4;
        let b = MeasureBudgets::default();
        let a: Vec<String> = build_suite(&suite, &b)
            .unwrap()
            .into_iter()
            .map(|m| m.name)
            .collect();
        let c: Vec<String> = build_suite(&suite, &b)
            .unwrap()
            .into_iter()
            .map(|m| m.name)
            .collect();
        assert_eq!(a, c);
        assert!(a.len() >= 5);
    }
}
