//! Experiment configuration, read from a single TOML file.

use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::complexity::SearchBudget;
use crate::enumeration::HARD_CAP_LEN;
use crate::error::{LabError, Result};
use crate::measures::{MeasureRegistry, MeasureSpec};
use crate::nu::{MAX_CUT_DEPTH, MAX_TABLE_DEPTH};
use crate::rational::ratio;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Selector {
    Eq1,
    Eq4,
    Lemma3,
    Lemma5,
    Psi,
    T1,
    T4,
    T7,
    C2,
    C9,
    Claim10,
    Lemma8,
    Kcorrect,
    Dominance,
    Semimeasure,
    Posterior,
}

impl Selector {
    pub const ALL: [Selector; 16] = [
        Selector::Eq1,
        Selector::Eq4,
        Selector::Lemma3,
        Selector::Lemma5,
        Selector::Psi,
        Selector::T1,
        Selector::T4,
        Selector::T7,
        Selector::C2,
        Selector::C9,
        Selector::Claim10,
        Selector::Lemma8,
        Selector::Kcorrect,
        Selector::Dominance,
        Selector::Semimeasure,
        Selector::Posterior,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Selector::Eq1 => "eq1",
            Selector::Eq4 => "eq4",
            Selector::Lemma3 => "lemma3",
            Selector::Lemma5 => "lemma5",
            Selector::Psi => "psi",
            Selector::T1 => "t1",
            Selector::T4 => "t4",
            Selector::T7 => "t7",
            Selector::C2 => "c2",
            Selector::C9 => "c9",
            Selector::Claim10 => "claim10",
            Selector::Lemma8 => "lemma8",
            Selector::Kcorrect => "kcorrect",
            Selector::Dominance => "dominance",
            Selector::Semimeasure => "semimeasure",
            Selector::Posterior => "posterior",
        }
    }
}

impl fmt::Display for Selector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Selector {
    type Err = LabError;

    fn from_str(s: &str) -> Result<Self> {
        Selector::ALL
            .into_iter()
            .find(|x| x.name() == s)
            .ok_or_else(|| LabError::Config(format!("unknown experiment {s:?}")))
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Budgets {
    /// Longest program, in bits.
    pub program_len: usize,
    pub steps: u64,
    /// Depth of the tables and of the exhaustive cut check.
    pub depth: usize,
    pub d_min: i64,
    pub d_max: i64,
}

impl Default for Budgets {
    fn default() -> Self {
        Budgets {
            program_len: 18,
            steps: 10_000,
            depth: 4,
            d_min: -8,
            d_max: 8,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TheoremCase {
    pub measure: usize,
    pub x: String,
    pub y: String,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Params {
    pub eq1_pairs: usize,
    pub eq4_sequences: usize,
    pub eq4_length: usize,
    pub lemma3_length: usize,
    pub lemma5_lengths: Vec<usize>,
    pub psi_level: usize,
    pub psi_depth: usize,
    pub claim10_sample_depth: usize,
    pub claim10_samples: usize,
    pub lemma8_pairs: usize,
    pub kcorrect_condition_len: usize,
    pub dominance_len: usize,
    pub t4_triples: usize,
    pub theorem_cases: Vec<TheoremCase>,
    pub posterior_horizon: usize,
}

impl Default for Params {
    fn default() -> Self {
        Params {
            eq1_pairs: 100,
            eq4_sequences: 20,
            eq4_length: 12,
            lemma3_length: 16,
            lemma5_lengths: vec![2, 4, 6],
            psi_level: 3,
            psi_depth: 6,
            claim10_sample_depth: 5,
            claim10_samples: 10_000,
            lemma8_pairs: 50,
            kcorrect_condition_len: 4,
            dominance_len: 10,
            t4_triples: 100,
            theorem_cases: vec![
                TheoremCase { measure: 1, x: "1".into(), y: "1111".into() },
                TheoremCase { measure: 2, x: "000".into(), y: "11".into() },
            ],
            posterior_horizon: 3,
        }
    }
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Outputs {
    /// One JSON record per report line.
    pub structured: Option<PathBuf>,
    /// Comma-separated summary.
    pub tabular: Option<PathBuf>,
    /// Tables written by `construct`.
    pub tables: Option<PathBuf>,
    pub cache_dir: Option<PathBuf>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ExperimentConfig {
    pub seed: u64,
    pub experiments: Vec<Selector>,
    pub budgets: Budgets,
    pub params: Params,
    pub registry: Vec<MeasureSpec>,
    pub output: Outputs,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        ExperimentConfig {
            seed: 2024,
            experiments: Selector::ALL.to_vec(),
            budgets: Budgets::default(),
            params: Params::default(),
            registry: default_registry(),
            output: Outputs::default(),
        }
    }
}

/// Uniform, IID(1/4, 3/4) and zeros-then-ones after three zeros.
pub fn default_registry() -> Vec<MeasureSpec> {
    vec![
        MeasureSpec::uniform(2),
        MeasureSpec::iid(vec![ratio(1, 4), ratio(3, 4)]),
        MeasureSpec::zeros_then_ones(3),
    ]
}

impl ExperimentConfig {
    pub fn from_toml(text: &str) -> Result<Self> {
        let config: ExperimentConfig = toml::from_str(text).map_err(|e| LabError::Config(e.to_string()))?;
        config.validate()?;
        Ok(config)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| LabError::io(path, e))?;
        Self::from_toml(&text)
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("config serializes")
    }

    pub fn search_budget(&self) -> Result<SearchBudget> {
        SearchBudget::new(self.budgets.program_len, self.budgets.steps)
    }

    pub fn build_registry(&self) -> Result<MeasureRegistry> {
        MeasureRegistry::from_specs(self.registry.iter().cloned())
    }

    pub fn validate(&self) -> Result<()> {
        if self.experiments.is_empty() {
            return Err(LabError::Config("no experiments selected".into()));
        }
        let b = &self.budgets;
        if b.program_len > HARD_CAP_LEN {
            return Err(LabError::BudgetCap {
                what: "program length",
                value: b.program_len as u64,
                cap: HARD_CAP_LEN as u64,
            });
        }
        if b.steps == 0 {
            return Err(LabError::Config("step budget must be positive".into()));
        }
        for (what, value, cap) in [
            ("table depth", b.depth, MAX_CUT_DEPTH),
            ("cut sample depth", self.params.claim10_sample_depth, MAX_TABLE_DEPTH),
            ("psi depth", self.params.psi_depth, MAX_TABLE_DEPTH),
        ] {
            if value > cap {
                return Err(LabError::BudgetCap { what, value: value as u64, cap: cap as u64 });
            }
        }
        if b.d_min > b.d_max {
            return Err(LabError::Config(format!("empty level window {}..={}", b.d_min, b.d_max)));
        }
        if self.registry.is_empty() {
            return Err(LabError::Config("registry is empty".into()));
        }
        self.build_registry().map(|_| ())
    }
}
