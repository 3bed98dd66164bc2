//! Statistical and combinatorial checks of the ergodic theorems for
//! sub-additive families.
//!
//! Every run draws its points from `sys.sample(seed, i)`, so two runs with the
//! same seed see the same points (common random numbers), and every mean is a
//! fixed-shape pairwise sum, so results do not depend on the thread count.

mod estimate;
mod kingman;
mod maximal;
mod setfn;

pub use estimate::{
    birkhoff_check, ergodic_decomposition_check, nu_estimate, nu_trend, BirkhoffReport, DecompositionCheck, Estimate,
    NuTrend,
};
pub use kingman::{
    dprime_m_diagnostics, kingman_gates, kingman_run, limsup_identity_check, DprimeReport, DprimeRow, GateReport,
    KingmanReport, LadderReport, LimsupMode, LimsupReport, TileInfimum,
};
pub use maximal::{greedy_cover, maximal_inequality_check, GreedyCover, GreedyStats, MaximalReport};
pub use setfn::{setfn_limit_strong, setfn_limit_tiling, LimitStatus, SetFnLimit, SetFunction};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{LabError, Result};
use crate::families::SetFamily;
use crate::folner::{tempered_check, FolnerSeq, Rational, SeqKind};
use crate::group::{FinSet, Group};
use crate::systems::System;

/// Pass/fail thresholds shared by the statistical checks.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct Tolerances {
    /// Multiplier of the standard error in confidence checks.
    pub ci_sigma: f64,
    /// Cauchy oscillation tolerance as a fraction of the dynamic range.
    pub oscillation: f64,
    /// Number of trailing schedule indices in the oscillation window.
    pub cauchy_window: usize,
    /// Fraction of points that must pass a per-point check.
    pub pass_fraction: f64,
    /// Allowed per-point distance of a terminal value from its limit.
    pub terminal: f64,
    /// Largest allowed condition (b) gap at the end of the schedule.
    pub gap: f64,
    /// A terminal mean below this is treated as `ν(𝐃) = −∞`.
    pub nu_floor: f64,
    /// Relative tolerance of the set-function limits.
    pub limit: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Tolerances {
            ci_sigma: 4.0,
            oscillation: 0.02,
            cauchy_window: 2,
            pass_fraction: 0.95,
            terminal: 0.05,
            gap: 0.1,
            nu_floor: -1e3,
            limit: 0.05,
        }
    }
}

/// Sampling and hypothesis parameters of a run.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct RunOptions {
    pub samples: u64,
    pub seed: u64,
    /// Declared Tempelman (or tempered) constant of the sequence. Built-in
    /// box and prefix sequences have a default.
    pub constant: Option<u64>,
    pub tol: Tolerances,
    /// Truncation levels tried when `ν(𝐃) = −∞`.
    pub ladder: Vec<f64>,
    /// Trials for classifier checks made inside a run.
    pub classifier_trials: u64,
}

impl Default for RunOptions {
    fn default() -> Self {
        RunOptions {
            samples: 1000,
            seed: 0,
            constant: None,
            tol: Tolerances::default(),
            ladder: vec![1.0, 2.0, 4.0, 8.0, 16.0],
            classifier_trials: 500,
        }
    }
}

impl RunOptions {
    pub fn new(samples: u64, seed: u64) -> Self {
        RunOptions { samples, seed, ..Default::default() }
    }

    pub fn with_constant(mut self, m: u64) -> Self {
        self.constant = Some(m);
        self
    }
}

/// Pairwise sum with a split point depending only on the length.
fn pairwise_sum(v: &[f64]) -> f64 {
    if v.len() <= 32 {
        return v.iter().sum();
    }
    let mid = v.len() / 2;
    pairwise_sum(&v[..mid]) + pairwise_sum(&v[mid..])
}

/// Sample mean and its standard error `sd / √n`.
pub fn mean_stderr(values: &[f64]) -> (f64, f64) {
    let n = values.len();
    if n == 0 {
        return (f64::NAN, f64::NAN);
    }
    let mean = pairwise_sum(values) / n as f64;
    if n < 2 || !mean.is_finite() {
        return (mean, if mean.is_finite() { 0.0 } else { f64::INFINITY });
    }
    let sq: Vec<f64> = values.iter().map(|x| (x - mean) * (x - mean)).collect();
    let var = pairwise_sum(&sq) / (n - 1) as f64;
    (mean, (var / n as f64).sqrt())
}

/// The Tempelman constant known for a built-in sequence: `2^d` for boxes in
/// ℤᵈ and 1 for prefix sets of a cyclic sum.
pub fn default_constant(seq: &FolnerSeq) -> Option<u64> {
    match (seq.kind(), seq.group()) {
        _ if seq.is_restricted() => None,
        (SeqKind::ZBoxes, Group::ZPower { d }) => Some(1u64 << *d),
        (SeqKind::CyclicPrefix, _) => Some(1),
        _ => None,
    }
}

pub(crate) fn refuse(hypothesis: &str, detail: impl Into<String>) -> LabError {
    LabError::GateRefused { hypothesis: hypothesis.into(), detail: detail.into() }
}

pub(crate) fn constant_for(seq: &FolnerSeq, opts: &RunOptions) -> Result<u64> {
    opts.constant
        .or_else(|| default_constant(seq))
        .ok_or_else(|| refuse("tempelman", format!("no constant declared for {}", seq.name())))
}

pub(crate) fn check_schedule(schedule: &[u64]) -> Result<()> {
    if schedule.is_empty() || schedule[0] == 0 || schedule.windows(2).any(|w| w[0] >= w[1]) {
        return Err(LabError::Config("n_schedule must be non-empty, start at 1 or later and increase strictly".into()));
    }
    Ok(())
}

/// Refuses unless the sequence is tempered with the declared constant up to
/// the last schedule index.
pub(crate) fn require_tempered(seq: &FolnerSeq, last: u64, opts: &RunOptions) -> Result<Rational> {
    let m = constant_for(seq, opts)?;
    let report = tempered_check(seq, last, Rational::from_integer(m))?;
    if !report.bounded {
        return Err(refuse("tempered", format!("tempered ratio {} exceeds {m}", report.witness)));
    }
    Ok(report.witness)
}

pub(crate) fn sets_for(seq: &FolnerSeq, schedule: &[u64]) -> Result<Vec<FinSet>> {
    schedule.iter().map(|&n| seq.set(n)).collect()
}

/// Normalized values `d_{F_k}(y_i)/|F_k|` for every sampled point.
pub(crate) struct Trajectories {
    /// `values[i][k]` for point `i` and set `k`.
    pub values: Vec<Vec<f64>>,
    pub components: Vec<usize>,
}

impl Trajectories {
    pub fn column(&self, k: usize) -> Vec<f64> {
        self.values.iter().map(|v| v[k]).collect()
    }
}

pub(crate) fn trajectories(
    fam: &dyn SetFamily,
    sys: &System,
    sets: &[FinSet],
    samples: u64,
    seed: u64,
) -> Result<Trajectories> {
    if samples == 0 {
        return Err(LabError::Config("samples must be at least 1".into()));
    }
    for f in sets {
        f.require_non_empty("averaging set")?;
    }
    let rows: Vec<(Vec<f64>, usize)> = (0..samples)
        .into_par_iter()
        .map(|i| {
            let y = sys.sample(seed, i);
            let v = sets.iter().map(|f| Ok(fam.eval(sys, f, &y)? / f.len() as f64)).collect::<Result<Vec<_>>>()?;
            Ok((v, System::component_of(&y)))
        })
        .collect::<Result<_>>()?;
    let (values, components) = rows.into_iter().unzip();
    Ok(Trajectories { values, components })
}

/// `|a − b| ≤ k·se`, exact when `se = 0`.
pub(crate) fn within_ci(a: f64, b: f64, se: f64, k: f64) -> bool {
    (a - b).abs() <= k * se + 1e-12 * 1f64.max(a.abs()).max(b.abs())
}
