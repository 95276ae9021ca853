//! Experiment configuration: one TOML file, validated as a whole.

use std::fmt;
use std::ops::RangeInclusive;
use std::path::{Path, PathBuf};

use aspi_core::machine::TeLimits;
use aspi_core::measures::{GameParams, MeasureBudgets, SuiteConfig, SuiteMember};
use aspi_core::zoo::{GrowthFn, PredictorSpec};
use aspi_core::{EvalBudget, HierarchyKind, Ordinal};
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use thiserror::Error;

/// Environment variable that overrides the output directory.
pub const OUTPUT_DIR_ENV: &str = "ASPI_OUTPUT_DIR";
pub const DEFAULT_OUTPUT_DIR: &str = "aspi-out";

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ExperimentConfig {
    pub seed: u64,
    #[serde(default)]
    pub output: OutputSection,
    #[serde(default)]
    pub game: GameSection,
    #[serde(default)]
    pub budgets: BudgetSection,
    #[serde(default)]
    pub caps: CapsSection,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub profile: Option<ProfileSection>,
    #[serde(default)]
    pub suite: SuiteSection,
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct OutputSection {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub dir: Option<PathBuf>,
    /// Keep full transcripts in play records.
    #[serde(default)]
    pub transcripts: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct GameSection {
    pub horizon: u64,
    pub window: u64,
}

impl Default for GameSection {
    fn default() -> Self {
        let g = GameParams::default();
        Self {
            horizon: g.horizon,
            window: g.window,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct BudgetSection {
    pub max_expansions: u64,
    pub max_bits: u64,
    pub te_max_n: u32,
    pub te_per_run_limit: u64,
}

impl Default for BudgetSection {
    fn default() -> Self {
        let e = EvalBudget::default();
        let t = TeLimits::default();
        Self {
            max_expansions: e.max_expansions,
            max_bits: e.max_bits,
            te_max_n: t.max_n,
            te_per_run_limit: t.per_run_limit,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CapsSection {
    /// Overrides the pool of every lookalike predictor when set.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub machine_pool_cap: Option<u64>,
    pub m_max: u64,
    /// `[start, end]` of the cost verification window.
    pub verify_window: [u64; 2],
}

impl Default for CapsSection {
    fn default() -> Self {
        Self {
            machine_pool_cap: None,
            m_max: 5,
            verify_window: [0, 12],
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ProfileSection {
    /// `big-o`, `hierarchy` or `hibbard`.
    pub measure: String,
    pub predictors: Vec<String>,
    /// Growth functions for `big-o`, ordinals for `hierarchy`; unused by
    /// `hibbard`, whose rungs are `1..=m_max`.
    #[serde(default)]
    pub ladder: Vec<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub hierarchy: Option<String>,
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct SuiteSection {
    #[serde(default)]
    pub members: Vec<MemberSection>,
    #[serde(default)]
    pub patterns: Vec<String>,
    #[serde(default)]
    pub targets: Vec<String>,
    #[serde(default)]
    pub random: u32,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct MemberSection {
    pub evader: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub level: Option<String>,
}

/// Every problem found in a configuration.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub struct ConfigError {
    pub violations: Vec<String>,
}

impl fmt::Display for ConfigError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "invalid configuration:")?;
        for v in &self.violations {
            write!(f, "\n  - {v}")?;
        }
        Ok(())
    }
}

impl ConfigError {
    fn one(msg: impl Into<String>) -> Self {
        Self {
            violations: vec![msg.into()],
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Measure {
    BigO(Vec<GrowthFn>),
    Hierarchy(HierarchyKind, Vec<Ordinal>),
    Hibbard(u64),
}

/// A configuration with every name parsed and every cap checked.
#[derive(Debug, Clone)]
pub struct Resolved {
    pub seed: u64,
    pub game: GameParams,
    pub budgets: MeasureBudgets,
    pub suite: SuiteConfig,
    pub predictors: Vec<PredictorSpec>,
    pub measure: Option<Measure>,
    pub transcripts: bool,
}

impl ExperimentConfig {
    pub fn new(seed: u64) -> Self {
        Self {
            seed,
            output: OutputSection::default(),
            game: GameSection::default(),
            budgets: BudgetSection::default(),
            caps: CapsSection::default(),
            profile: None,
            suite: SuiteSection::default(),
        }
    }

    /// Parses TOML, reporting unknown keys together with every other
    /// violation.
    pub fn from_toml(text: &str) -> Result<Self, ConfigError> {
        let de = toml::Deserializer::new(text);
        let mut unknown = Vec::new();
        let cfg: Self = serde_ignored::deserialize(de, |path| unknown.push(path.to_string()))
            .map_err(|e| ConfigError::one(e.to_string().trim().to_string()))?;
        let mut violations: Vec<String> = unknown.into_iter().map(|k| format!("unknown key `{k}`")).collect();
        if let Err(e) = cfg.resolve() {
            violations.extend(e.violations);
        }
        if violations.is_empty() {
            Ok(cfg)
        } else {
            Err(ConfigError { violations })
        }
    }

    pub fn load(path: &Path) -> Result<Self, ConfigError> {
        let text = std::fs::read_to_string(path).map_err(|e| ConfigError::one(format!("{}: {e}", path.display())))?;
        Self::from_toml(&text)
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("configuration serializes")
    }

    /// SHA-256 of the canonical TOML form, in hex.
    pub fn digest(&self) -> String {
        hex::encode(Sha256::digest(self.to_toml().as_bytes()))
    }

    pub fn eval_budget(&self) -> Result<EvalBudget, ConfigError> {
        EvalBudget::new(self.budgets.max_expansions, self.budgets.max_bits)
            .map_err(|_| ConfigError::one("budgets.max_expansions and budgets.max_bits must be positive"))
    }

    /// The output directory: the environment override, then the config,
    /// then the default.
    pub fn output_dir(&self) -> PathBuf {
        match std::env::var_os(OUTPUT_DIR_ENV) {
            Some(d) if !d.is_empty() => PathBuf::from(d),
            _ => self.output.dir.clone().unwrap_or_else(|| PathBuf::from(DEFAULT_OUTPUT_DIR)),
        }
    }

    pub fn resolve(&self) -> Result<Resolved, ConfigError> {
        let mut v = Vec::new();
        let g = &self.game;
        if g.horizon == 0 {
            v.push("game.horizon must be positive".to_string());
        }
        if g.window == 0 || g.window > g.horizon {
            v.push(format!("game.window must be in 1..={}", g.horizon));
        }
        let b = &self.budgets;
        if b.max_expansions == 0 {
            v.push("budgets.max_expansions must be positive".into());
        }
        if b.max_bits == 0 {
            v.push("budgets.max_bits must be positive".into());
        }
        if b.te_per_run_limit == 0 {
            v.push("budgets.te_per_run_limit must be positive".into());
        }
        let c = &self.caps;
        if c.machine_pool_cap == Some(0) {
            v.push("caps.machine_pool_cap must be positive".into());
        }
        if c.m_max == 0 {
            v.push("caps.m_max must be positive".into());
        }
        let [w0, w1] = c.verify_window;
        if w0 > w1 {
            v.push(format!("caps.verify_window [{w0}, {w1}] is empty"));
        }
        if w1 > u64::from(b.te_max_n) {
            v.push(format!("caps.verify_window ends at {w1}, past budgets.te_max_n = {}", b.te_max_n));
        }

        let mut predictors = Vec::new();
        let mut measure = None;
        if let Some(p) = &self.profile {
            if p.predictors.is_empty() {
                v.push("profile.predictors must not be empty".into());
            }
            for text in &p.predictors {
                match text.parse::<PredictorSpec>() {
                    Ok(spec) => predictors.push(with_pool(spec, c.machine_pool_cap)),
                    Err(e) => v.push(format!("profile.predictors: {e}")),
                }
            }
            measure = resolve_measure(p, c.m_max, &mut v);
        }

        let mut suite = SuiteConfig::new(self.seed);
        suite.random = self.suite.random;
        suite.verify_window = w0..=w1.max(w0);
        for m in &self.suite.members {
            match m.evader.parse() {
                Ok(evader) => suite.members.push(SuiteMember {
                    evader,
                    level: m.level.clone(),
                }),
                Err(e) => v.push(format!("suite.members: {e}")),
            }
        }
        for p in &self.suite.patterns {
            match p.parse() {
                Ok(p) => suite.patterns.push(p),
                Err(e) => v.push(format!("suite.patterns: {e}")),
            }
        }
        for t in &self.suite.targets {
            match t.parse() {
                Ok(t) => suite.targets.push(t),
                Err(e) => v.push(format!("suite.targets: {e}")),
            }
        }
        if !self.suite.patterns.is_empty() && self.suite.targets.is_empty() {
            v.push("suite.patterns needs at least one suite.targets entry".into());
        }
        if self.suite.random > 0 && self.suite.targets.is_empty() {
            v.push("suite.random needs at least one suite.targets entry".into());
        }

        if !v.is_empty() {
            return Err(ConfigError { violations: v });
        }
        Ok(Resolved {
            seed: self.seed,
            game: GameParams {
                horizon: g.horizon,
                window: g.window,
            },
            budgets: MeasureBudgets {
                eval: EvalBudget::new(b.max_expansions, b.max_bits).expect("checked above"),
                te: TeLimits {
                    max_n: b.te_max_n,
                    per_run_limit: b.te_per_run_limit,
                },
            },
            suite,
            predictors,
            measure,
            transcripts: self.output.transcripts,
        })
    }
}

fn with_pool(spec: PredictorSpec, cap: Option<u64>) -> PredictorSpec {
    match (spec, cap) {
        (PredictorSpec::Lookalike { growth, step_cap, .. }, Some(pool)) => PredictorSpec::Lookalike { growth, pool, step_cap },
        (spec, _) => spec,
    }
}

fn resolve_measure(p: &ProfileSection, m_max: u64, v: &mut Vec<String>) -> Option<Measure> {
    match p.measure.as_str() {
        "big-o" => {
            if p.ladder.is_empty() {
                v.push("profile.ladder must not be empty for big-o".into());
            }
            let mut fs = Vec::new();
            for f in &p.ladder {
                match f.parse::<GrowthFn>() {
                    Ok(f) => fs.push(f),
                    Err(e) => v.push(format!("profile.ladder: {e}")),
                }
            }
            Some(Measure::BigO(fs))
        }
        "hierarchy" => {
            let kind = match p.hierarchy.as_deref() {
                None => {
                    v.push("profile.hierarchy is required for the hierarchy measure".into());
                    None
                }
                Some(k) => match k.parse::<HierarchyKind>() {
                    Ok(k) => Some(k),
                    Err(e) => {
                        v.push(format!("profile.hierarchy: {e}"));
                        None
                    }
                },
            };
            if p.ladder.is_empty() {
                v.push("profile.ladder must not be empty for hierarchy".into());
            }
            let mut ladder: Vec<Ordinal> = Vec::new();
            for a in &p.ladder {
                match a.parse::<Ordinal>() {
                    Ok(a) => ladder.push(a),
                    Err(e) => v.push(format!("profile.ladder: {a:?}: {e}")),
                }
            }
            for w in ladder.windows(2) {
                if w[0] >= w[1] {
                    v.push(format!("profile.ladder must increase, but {} is followed by {}", w[0], w[1]));
                }
            }
            kind.map(|k| Measure::Hierarchy(k, ladder))
        }
        "hibbard" => Some(Measure::Hibbard(m_max)),
        other => {
            v.push(format!("profile.measure {other:?} is not one of big-o, hierarchy, hibbard"));
            None
        }
    }
}

impl Resolved {
    pub fn verify_window(&self) -> RangeInclusive<u64> {
        self.suite.verify_window.clone()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const SAMPLE: &str = r#"
seed = 7

[game]
horizon = 150
window = 50

[caps]
machine_pool_cap = 256
m_max = 3
verify_window = [0, 12]

[profile]
measure = "big-o"
predictors = ["scaled:f=n", "constant:0"]
ladder = ["n", "poly2"]

[suite]
patterns = ["0", "1|0"]
targets = ["2*n+6"]
members = [{ evader = "constant:0" }, { evader = "anti:copylast", level = "n" }]
"#;

    #[test]
    fn sample_parses_and_round_trips() {
        let cfg = ExperimentConfig::from_toml(SAMPLE).unwrap();
        assert_eq!(cfg.seed, 7);
        let again = ExperimentConfig::from_toml(&cfg.to_toml()).unwrap();
        assert_eq!(again, cfg);
        assert_eq!(again.digest(), cfg.digest());
        let r = cfg.resolve().unwrap();
        assert_eq!(r.suite.members.len(), 2);
        assert!(matches!(&r.predictors[0], PredictorSpec::Lookalike { pool: 256, .. }));
    }

    #[test]
    fn seed_is_required() {
        let e = ExperimentConfig::from_toml("[game]\nhorizon = 5\nwindow = 5\n").unwrap_err();
        assert!(e.violations[0].contains("seed"), "{e}");
    }

    #[test]
    fn every_violation_is_listed() {
        let text = r#"
seed = 1
colour = "blue"
[game]
horizon = 10
window = 20
[caps]
m_max = 0
verify_window = [5, 2]
[profile]
measure = "hierarchy"
predictors = ["oracle"]
ladder = ["w", "3"]
"#;
        let e = ExperimentConfig::from_toml(text).unwrap_err();
        let all = e.to_string();
        for needle in ["colour", "game.window", "m_max", "verify_window", "oracle", "profile.hierarchy", "must increase"] {
            assert!(all.contains(needle), "missing {needle} in\n{all}");
        }
        assert!(e.violations.len() >= 7);
    }

    #[test]
    fn digest_tracks_content() {
        let a = ExperimentConfig::new(1);
        let mut b = a.clone();
        assert_eq!(a.digest(), b.digest());
        b.game.horizon = 151;
        assert_ne!(a.digest(), b.digest());
        assert_eq!(a.digest().len(), 64);
    }
}
