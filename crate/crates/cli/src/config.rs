use std::path::{Path, PathBuf};

use folner_lab::ergodic::{LimsupMode, RunOptions, SetFunction, Tolerances};
use folner_lab::families::{ClassifyConfig, Family, Property};
use folner_lab::folner::{FolnerSeq, SeqKind};
use folner_lab::systems::{Observable, System, SystemSpec};
use folner_lab::tiling::TileBudget;
use folner_lab::{EnumBudget, Group, LabError, Result};
use serde::Deserialize;

/// Where a run writes its artifacts. Relative paths resolve against `dir`.
#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct OutputPaths {
    pub dir: PathBuf,
    pub csv: Option<PathBuf>,
    pub summary: PathBuf,
}

impl Default for OutputPaths {
    fn default() -> Self {
        OutputPaths { dir: PathBuf::from("out"), csv: None, summary: PathBuf::from("summary.json") }
    }
}

impl OutputPaths {
    pub fn csv_path(&self, command: &str) -> PathBuf {
        self.dir.join(self.csv.clone().unwrap_or_else(|| PathBuf::from(format!("{command}.csv"))))
    }

    pub fn summary_path(&self) -> PathBuf {
        self.dir.join(&self.summary)
    }
}

#[derive(Clone, Copy, Debug, Deserialize, PartialEq, Eq)]
#[serde(rename_all = "snake_case")]
pub enum LimitMode {
    Tiling,
    Strong,
}

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub group: Group,
    #[serde(default)]
    pub system: Option<SystemSpec>,
    #[serde(default)]
    pub family: Option<Family>,
    #[serde(default)]
    pub observable: Option<Observable>,
    #[serde(default)]
    pub set_function: Option<SetFunction>,
    #[serde(default)]
    pub sequence: Option<SeqKind>,
    #[serde(default)]
    pub n_schedule: Vec<u64>,
    #[serde(default = "default_samples")]
    pub samples: u64,
    #[serde(default)]
    pub seed: u64,
    #[serde(default)]
    pub tolerances: Tolerances,
    /// Properties the family is claimed to have; a failing draw is a counterexample.
    #[serde(default)]
    pub declared: Vec<Property>,
    /// Tempelman constant of the sequence.
    #[serde(default)]
    pub constant: Option<u64>,
    #[serde(default)]
    pub classifier: ClassifyConfig,
    #[serde(default)]
    pub ladder: Option<Vec<f64>>,
    #[serde(default)]
    pub alpha: Option<f64>,
    #[serde(default, rename = "N")]
    pub big_n: Option<u64>,
    #[serde(default)]
    pub n: Option<u64>,
    #[serde(default)]
    pub tiles: Option<TileBudget>,
    #[serde(default)]
    pub finsets: Option<EnumBudget>,
    #[serde(default)]
    pub limsup_mode: Option<LimsupMode>,
    #[serde(default)]
    pub limit_mode: Option<LimitMode>,
    /// Half-width of the window used for tiling and covering checks.
    #[serde(default = "default_radius")]
    pub window_radius: i64,
    #[serde(default)]
    pub output: OutputPaths,
}

fn default_samples() -> u64 {
    1000
}

fn default_radius() -> i64 {
    12
}

fn missing(field: &str) -> LabError {
    LabError::Config(format!("missing field `{field}`"))
}

impl ExperimentConfig {
    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| LabError::Config(format!("{}: {e}", path.display())))?;
        Self::parse(&text)
    }

    pub fn parse(text: &str) -> Result<Self> {
        let cfg: ExperimentConfig = serde_json::from_str(text).map_err(|e| LabError::Config(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    fn validate(&self) -> Result<()> {
        if !self.n_schedule.is_empty()
            && (self.n_schedule[0] == 0 || self.n_schedule.windows(2).any(|w| w[0] >= w[1]))
        {
            return Err(LabError::Config("n_schedule must start at 1 or later and increase strictly".into()));
        }
        if self.samples == 0 {
            return Err(LabError::Config("samples must be at least 1".into()));
        }
        if let Some(f) = &self.family {
            f.validate()?;
        }
        if let Some(s) = &self.system {
            System::from_spec(s, Some(&self.group))?;
        }
        if let Some(l) = &self.ladder {
            if l.is_empty() || l.iter().any(|x| !(*x > 0.0)) || l.windows(2).any(|w| w[0] >= w[1]) {
                return Err(LabError::Config("ladder levels must be positive and increasing".into()));
            }
        }
        Ok(())
    }

    pub fn system(&self) -> Result<System> {
        System::from_spec(self.system.as_ref().ok_or_else(|| missing("system"))?, Some(&self.group))
    }

    pub fn family(&self) -> Result<Family> {
        self.family.clone().ok_or_else(|| missing("family"))
    }

    pub fn observable(&self) -> Result<Observable> {
        self.observable.clone().ok_or_else(|| missing("observable"))
    }

    pub fn set_function(&self) -> Result<SetFunction> {
        self.set_function.clone().ok_or_else(|| missing("set_function"))
    }

    pub fn sequence(&self) -> Result<FolnerSeq> {
        FolnerSeq::new(&self.group, self.sequence.clone().ok_or_else(|| missing("sequence"))?)
    }

    pub fn schedule(&self) -> Result<&[u64]> {
        if self.n_schedule.is_empty() {
            return Err(missing("n_schedule"));
        }
        Ok(&self.n_schedule)
    }

    /// `n` if given, else the last schedule index.
    pub fn index(&self) -> Result<u64> {
        match self.n {
            Some(n) => Ok(n),
            None => self.schedule().map(|s| *s.last().unwrap()),
        }
    }

    pub fn run_options(&self) -> RunOptions {
        let mut opts = RunOptions::new(self.samples, self.seed);
        opts.constant = self.constant;
        opts.tol = self.tolerances.clone();
        if let Some(l) = &self.ladder {
            opts.ladder = l.clone();
        }
        opts
    }

    pub fn tiles(&self) -> TileBudget {
        self.tiles.clone().unwrap_or_else(|| TileBudget::new(16))
    }

    pub fn finsets(&self) -> EnumBudget {
        self.finsets.clone().unwrap_or_else(|| EnumBudget::new(3, -2, 2))
    }
}
