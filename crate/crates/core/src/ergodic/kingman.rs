use serde::Serialize;

use super::estimate::Estimate;
use super::{check_schedule, constant_for, mean_stderr, refuse, sets_for, trajectories, within_ci, RunOptions, Trajectories};
use crate::error::{LabError, Result};
use crate::families::{classify_props, CertifiedFamily, ClassifyConfig, Family, LocalDerived, Property};
use crate::folner::{tempelman_bound, tempered_check, FolnerSeq, Rational, SeqIndex};
use crate::group::{enumerate_finsets, EnumBudget, FinSet};
use crate::systems::{mix64, System};
use crate::tiling::{condition_b_witness, condition_iii, enumerate_tiles, standard_cert, ConditionB, TileBudget};

/// The verified hypotheses of a convergence run.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct GateReport {
    pub constant: u64,
    /// Largest Tempelman ratio up to the end of the schedule.
    pub tempelman: String,
    pub condition_b: Vec<ConditionB>,
    /// Which of the three alternative hypotheses holds.
    pub case: &'static str,
}

fn gap_value(c: &ConditionB) -> f64 {
    *c.gap.numer() as f64 / *c.gap.denom() as f64
}

/// Checks, in order: sub-additivity and invariance, self-similar tiling
/// certificates for every scheduled set, the Tempelman bound, the sandwich
/// gaps of condition (b), and one of bi-invariance, strong sub-additivity or
/// `G_{F_m} G_{F_p} = G`.
pub fn kingman_gates(cf: &CertifiedFamily, seq: &FolnerSeq, schedule: &[u64], opts: &RunOptions) -> Result<GateReport> {
    check_schedule(schedule)?;
    if schedule.len() < 2 {
        return Err(LabError::Config("convergence runs need at least two schedule indices".into()));
    }
    cf.require(&[Property::Subadditive, Property::Invariant])?;
    for &n in schedule {
        let cert = standard_cert(seq, &SeqIndex::Linear(n)).map_err(|e| refuse("self_similar_tiling", format!("F_{n}: {e}")))?;
        if cert.iso.is_none() {
            return Err(refuse("self_similar_tiling", format!("F_{n} tiles but has no self-similarity")));
        }
    }
    let last = *schedule.last().unwrap();
    let constant = constant_for(seq, opts)?;
    let bound = tempelman_bound(seq, last)?;
    if bound.bound > Rational::from_integer(constant) {
        return Err(refuse("tempelman", format!("ratio {} at n = {} exceeds {constant}", bound.bound, bound.argmax)));
    }

    let m = schedule[0].max(2);
    let mut condition_b = Vec::new();
    for &p in schedule.iter().filter(|&&p| p > m) {
        let w = condition_b_witness(seq, m, p, p).map_err(|e| refuse("condition_b", e.to_string()))?;
        condition_b.push(w);
    }
    match condition_b.last() {
        None => return Err(refuse("condition_b", format!("no scheduled p exceeds m = {m}"))),
        Some(c) if gap_value(c) > opts.tol.gap => {
            return Err(refuse("condition_b", format!("gap {} at p = {} exceeds {}", c.gap, c.p, opts.tol.gap)))
        }
        _ => {}
    }

    let case = if cf.has(Property::BiInvariant) {
        "bi_invariant"
    } else if cf.has(Property::StronglySubadditive) {
        "strongly_subadditive"
    } else {
        let mut found = false;
        'outer: for (i, &a) in schedule.iter().enumerate() {
            for &b in &schedule[i + 1..] {
                if condition_iii(seq, a, b)? == Some(true) {
                    found = true;
                    break 'outer;
                }
            }
        }
        if !found {
            return Err(refuse(
                "bi_invariant|strongly_subadditive|subgroup_product",
                "none of the three alternative hypotheses holds",
            ));
        }
        "subgroup_product"
    };
    Ok(GateReport { constant, tempelman: bound.bound.to_string(), condition_b, case })
}

/// Infimum of `(1/|T|)·E d_T` over a collection of sets.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct TileInfimum {
    pub inf: f64,
    pub inf_card: usize,
    pub candidates: usize,
    /// Distance from the terminal mean.
    pub gap: f64,
    pub stabilized: bool,
}

/// `(1/|T|)·E d_T` by closed form when the family has one, else Monte Carlo.
fn normalized_mean(fam: &Family, sys: &System, t: &FinSet, samples: u64, seed: u64) -> Result<f64> {
    if let Some(v) = fam.exact_normalized_mean(sys, t.len() as u64) {
        return Ok(v);
    }
    let tr = trajectories(fam, sys, std::slice::from_ref(t), samples, seed)?;
    Ok(mean_stderr(&tr.column(0)).0)
}

fn infimum(fam: &Family, sys: &System, sets: &[FinSet], samples: u64, seed: u64, terminal: f64, tol: f64) -> Result<TileInfimum> {
    let mut inf = f64::INFINITY;
    let mut inf_card = 0;
    for t in sets {
        let v = normalized_mean(fam, sys, t, samples, seed)?;
        if v < inf {
            inf = v;
            inf_card = t.len();
        }
    }
    let gap = (terminal - inf).abs();
    Ok(TileInfimum { inf, inf_card, candidates: sets.len(), gap, stabilized: gap <= tol })
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct LadderReport {
    pub levels: Vec<f64>,
    /// `estimates[l][k]`: truncation level `l`, schedule index `k`.
    pub estimates: Vec<Vec<Estimate>>,
    /// The untruncated family on the same points.
    pub base: Vec<Estimate>,
    /// Terminal means are non-increasing in the level.
    pub non_increasing: bool,
    /// Per point and index, values are non-increasing in the level.
    pub pointwise_monotone: bool,
    /// `inf_N inf_n` equals `inf_n inf_N` on the estimate table.
    pub inf_commute: bool,
    /// Every level stays above the untruncated estimate minus the CI width.
    pub above_base: bool,
}

impl LadderReport {
    pub fn pass(&self) -> bool {
        self.non_increasing && self.pointwise_monotone && self.inf_commute && self.above_base
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct KingmanReport {
    pub schedule: Vec<u64>,
    pub gates: GateReport,
    pub means: Vec<Estimate>,
    /// Fraction of points whose trailing oscillation is within tolerance.
    pub cauchy_fraction: f64,
    pub oscillation_tol: f64,
    pub terminal: Estimate,
    /// Closed-form `E d_{F_n}/|F_n|` at the last index.
    pub finite_n_target: Option<f64>,
    pub mean_within_ci: Option<bool>,
    pub nu_exact: Option<f64>,
    /// Fraction of points within tolerance of their component's `ν(𝐃)`.
    pub terminal_fraction: Option<f64>,
    /// Mean absolute distance from the limit per schedule index.
    pub l1: Option<Vec<f64>>,
    pub tile_infimum: Option<TileInfimum>,
    pub ladder: Option<LadderReport>,
    pub pass: bool,
}

fn estimates(t: &Trajectories, len: usize, seed: u64) -> Vec<Estimate> {
    (0..len).map(|k| Estimate::from_values(&t.column(k), seed)).collect()
}

fn ladder(
    base: &Family,
    sys: &System,
    sets: &[FinSet],
    base_traj: &Trajectories,
    opts: &RunOptions,
) -> Result<LadderReport> {
    let cfg = ClassifyConfig { trials: opts.classifier_trials, seed: opts.seed, ..Default::default() };
    let mut levels_traj = Vec::new();
    for &level in &opts.ladder {
        let fam = Family::truncated(base.clone(), level);
        fam.validate()?;
        let r = classify_props(&fam, sys, &cfg, &[Property::Subadditive, Property::Invariant])?;
        if let Some(c) = r.first_failure(&[Property::Subadditive, Property::Invariant]) {
            return Err(refuse(&c.property.to_string(), format!("truncation at {level}")));
        }
        levels_traj.push(trajectories(&fam, sys, sets, opts.samples, opts.seed)?);
    }
    let k = sets.len();
    let estimates: Vec<Vec<Estimate>> = levels_traj.iter().map(|t| self::estimates(t, k, opts.seed)).collect();
    let base_est = self::estimates(base_traj, k, opts.seed);
    let non_increasing = estimates.windows(2).all(|w| w[1][k - 1].mean <= w[0][k - 1].mean);
    let pointwise_monotone = levels_traj.windows(2).all(|w| {
        w[0].values.iter().zip(&w[1].values).all(|(a, b)| a.iter().zip(b).all(|(x, y)| y <= x))
    }) && levels_traj
        .last()
        .is_none_or(|t| t.values.iter().zip(&base_traj.values).all(|(a, b)| a.iter().zip(b).all(|(x, y)| y <= x)));
    let mut table: Vec<Vec<f64>> = estimates.iter().map(|row| row.iter().map(|e| e.mean).collect()).collect();
    table.push(base_est.iter().map(|e| e.mean).collect());
    let min = |v: &mut dyn Iterator<Item = f64>| v.fold(f64::INFINITY, f64::min);
    let by_level = min(&mut table.iter().map(|row| min(&mut row.iter().copied())));
    let by_index = min(&mut (0..k).map(|j| min(&mut table.iter().map(|row| row[j]))));
    let inf_commute = by_level == by_index && (0..k).all(|j| min(&mut table.iter().map(|row| row[j])) == base_est[j].mean);
    let above_base = estimates
        .iter()
        .all(|row| row.iter().zip(&base_est).all(|(e, b)| e.mean >= b.mean - opts.tol.ci_sigma * b.stderr));
    Ok(LadderReport {
        levels: opts.ladder.clone(),
        estimates,
        base: base_est,
        non_increasing,
        pointwise_monotone,
        inf_commute,
        above_base,
    })
}

/// Pointwise convergence of `d_{F_n}/|F_n|` along a self-similar tiling
/// sequence, after every hypothesis gate passes. Switches to the truncation
/// ladder when `ν(𝐃) = −∞`.
pub fn kingman_run(
    cf: &CertifiedFamily,
    seq: &FolnerSeq,
    sys: &System,
    schedule: &[u64],
    opts: &RunOptions,
    tiles: Option<&TileBudget>,
) -> Result<KingmanReport> {
    let gates = kingman_gates(cf, seq, schedule, opts)?;
    let fam = cf.family();
    let sets = sets_for(seq, schedule)?;
    let t = trajectories(fam, sys, &sets, opts.samples, opts.seed)?;
    let k = schedule.len();
    let means = estimates(&t, k, opts.seed);
    let terminal = means[k - 1];
    let tol = &opts.tol;

    let finite: Vec<f64> = t.values.iter().flatten().copied().filter(|v| v.is_finite()).collect();
    let range = finite.iter().copied().fold(f64::NEG_INFINITY, f64::max) - finite.iter().copied().fold(f64::INFINITY, f64::min);
    let oscillation_tol = tol.oscillation * range.max(0.0);
    let window = tol.cauchy_window.clamp(2, k);
    let calm = t
        .values
        .iter()
        .filter(|v| {
            let tail = &v[k - window..];
            let hi = tail.iter().copied().fold(f64::NEG_INFINITY, f64::max);
            let lo = tail.iter().copied().fold(f64::INFINITY, f64::min);
            hi - lo <= oscillation_tol
        })
        .count();
    let cauchy_fraction = calm as f64 / t.values.len() as f64;

    let last_card = sets[k - 1].len() as u64;
    let finite_n_target = fam.exact_normalized_mean(sys, last_card);
    let mean_within_ci = finite_n_target.map(|x| within_ci(terminal.mean, x, terminal.stderr, tol.ci_sigma));
    let nu_exact = fam.exact_nu(sys);
    let component_nu: Option<Vec<f64>> =
        (0..sys.components()).map(|i| fam.exact_nu(sys.component(i).unwrap())).collect();

    let heavy = nu_exact == Some(f64::NEG_INFINITY) || terminal.mean < tol.nu_floor;
    let (terminal_fraction, l1, ladder_report) = if heavy {
        (None, None, Some(ladder(fam, sys, &sets, &t, opts)?))
    } else {
        let reference = |i: usize| -> f64 {
            match &component_nu {
                Some(c) => c[t.components[i]],
                None => t.values[i][k - 1],
            }
        };
        let fraction = component_nu.as_ref().map(|c| {
            let ok = t
                .values
                .iter()
                .zip(&t.components)
                .filter(|(v, &comp)| (v[k - 1] - c[comp]).abs() <= tol.terminal)
                .count();
            ok as f64 / t.values.len() as f64
        });
        let l1 = (0..k)
            .map(|j| {
                let dev: Vec<f64> = t.values.iter().enumerate().map(|(i, v)| (v[j] - reference(i)).abs()).collect();
                mean_stderr(&dev).0
            })
            .collect();
        (fraction, Some(l1), None)
    };

    let tile_infimum = match tiles {
        Some(budget) if !sys.is_mixture() && !heavy => {
            let mut candidates: Vec<FinSet> = enumerate_tiles(seq.group(), budget)?.into_iter().map(|c| c.tile).collect();
            candidates.extend(sets.iter().cloned());
            let mc = opts.samples.min(2000).max(2);
            Some(infimum(fam, sys, &candidates, mc, mix64(opts.seed ^ 0x71), terminal.mean, tol.terminal)?)
        }
        _ => None,
    };

    let pass = match &ladder_report {
        Some(l) => l.pass(),
        None => {
            cauchy_fraction >= tol.pass_fraction
                && mean_within_ci.unwrap_or(true)
                && terminal_fraction.is_none_or(|f| f >= tol.pass_fraction)
        }
    };
    let report = KingmanReport {
        schedule: schedule.to_vec(),
        gates,
        means,
        cauchy_fraction,
        oscillation_tol,
        terminal,
        finite_n_target,
        mean_within_ci,
        nu_exact,
        terminal_fraction,
        l1,
        tile_infimum,
        ladder: ladder_report,
        pass,
    };
    Ok(report)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, serde::Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum LimsupMode {
    /// Infimum over tiles.
    BiInvariant,
    /// Infimum over all finite sets.
    StronglySubadditive,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct LimsupReport {
    pub mode: LimsupMode,
    /// Mean over points of the largest value over the trailing quarter of the
    /// schedule (at least two indices).
    pub limsup: Estimate,
    /// Infimum per ergodic component.
    pub infima: Vec<TileInfimum>,
    /// Fraction of points whose limsup is within tolerance of their component's infimum.
    pub pointwise_fraction: f64,
    /// `ν(𝐃)` used for the integral identity, and whether it is a closed form.
    pub nu: f64,
    pub nu_exact: bool,
    pub integral_identity: bool,
    pub pass: bool,
}

/// Compares the pointwise limsup with the infimum of normalized
/// expectations over tiles (or all finite sets), and its integral with
/// `ν(𝐃)`.
pub fn limsup_identity_check(
    cf: &CertifiedFamily,
    seq: &FolnerSeq,
    sys: &System,
    mode: LimsupMode,
    schedule: &[u64],
    opts: &RunOptions,
    tiles: &TileBudget,
    finsets: &EnumBudget,
) -> Result<LimsupReport> {
    check_schedule(schedule)?;
    let last = *schedule.last().unwrap();
    let constant = constant_for(seq, opts)?;
    let tempered = tempered_check(seq, last, Rational::from_integer(constant))?;
    if !tempered.bounded {
        return Err(refuse("tempered", format!("tempered ratio {} exceeds {constant}", tempered.witness)));
    }
    let sets = sets_for(seq, schedule)?;
    let mut candidates: Vec<FinSet> = match mode {
        LimsupMode::BiInvariant => {
            cf.require(&[Property::Subadditive, Property::Invariant, Property::BiInvariant])?;
            for &n in schedule {
                standard_cert(seq, &SeqIndex::Linear(n)).map_err(|e| refuse("tiling", format!("F_{n}: {e}")))?;
            }
            enumerate_tiles(seq.group(), tiles)?.into_iter().map(|c| c.tile).collect()
        }
        LimsupMode::StronglySubadditive => {
            cf.require(&[Property::StronglySubadditive, Property::Invariant])?;
            enumerate_finsets(seq.group(), finsets)?.collect()
        }
    };
    candidates.extend(sets.iter().cloned());

    let fam = cf.family();
    let t = trajectories(fam, sys, &sets, opts.samples, opts.seed)?;
    let k = sets.len();
    let from = k - (k / 4).max(2).min(k);
    let sup: Vec<f64> = t.values.iter().map(|v| v[from..].iter().copied().fold(f64::NEG_INFINITY, f64::max)).collect();
    let limsup = Estimate::from_values(&sup, opts.seed);

    let mc = opts.samples.min(2000).max(2);
    let infima = (0..sys.components())
        .map(|i| {
            let c = sys.component(i).unwrap();
            let comp_sup: Vec<f64> = sup.iter().zip(&t.components).filter(|(_, &j)| j == i).map(|(s, _)| *s).collect();
            let centre = if comp_sup.is_empty() { f64::NAN } else { mean_stderr(&comp_sup).0 };
            infimum(fam, c, &candidates, mc, mix64(opts.seed ^ (i as u64 + 0x11)), centre, opts.tol.terminal)
        })
        .collect::<Result<Vec<_>>>()?;
    let close = sup
        .iter()
        .zip(&t.components)
        .filter(|(s, &c)| (*s - infima[c].inf).abs() <= opts.tol.terminal)
        .count();
    let pointwise_fraction = close as f64 / sup.len() as f64;
    let (nu, nu_exact) = match fam.exact_nu(sys) {
        Some(v) => (v, true),
        None => (t.column(k - 1).iter().sum::<f64>() / t.values.len() as f64, false),
    };
    let integral_identity = (limsup.mean - nu).abs() <= opts.tol.ci_sigma * limsup.stderr + opts.tol.terminal;
    Ok(LimsupReport {
        mode,
        limsup,
        infima,
        pointwise_fraction,
        nu,
        nu_exact,
        integral_identity,
        pass: integral_identity && pointwise_fraction >= opts.tol.pass_fraction,
    })
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct DprimeRow {
    pub m: u64,
    pub tile_card: usize,
    /// `E d′_{m,F_n} / (|F_n|·|F_m|)`.
    pub estimate: Estimate,
    pub nonnegative: bool,
    pub supadditive: bool,
    pub invariant: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct DprimeReport {
    pub n: u64,
    pub rows: Vec<DprimeRow>,
    /// Estimates are non-increasing in `m` up to the confidence width.
    pub decreasing: bool,
    pub pass: bool,
}

/// Estimates `ν(𝐃′_m)/|F_m|` for the localized derived families and checks
/// their classifier verdicts under the action through `π`.
pub fn dprime_m_diagnostics(
    cf: &CertifiedFamily,
    seq: &FolnerSeq,
    sys: &System,
    ms: &[u64],
    n: u64,
    opts: &RunOptions,
) -> Result<DprimeReport> {
    check_schedule(ms)?;
    let mut schedule: Vec<u64> = ms.to_vec();
    if n > *ms.last().unwrap() {
        schedule.push(n);
    }
    kingman_gates(cf, seq, &schedule, opts)?;
    let cfg = ClassifyConfig { trials: opts.classifier_trials, seed: opts.seed, ..Default::default() };
    let fnn = seq.set(n)?;
    let props = [Property::Nonnegative, Property::Supadditive, Property::Invariant];
    let mut rows = Vec::new();
    for &m in ms {
        let cert = standard_cert(seq, &SeqIndex::Linear(m))?;
        let tile_card = cert.tile.len();
        let local = LocalDerived::new(cf.family().clone(), cert)?;
        let verdicts = classify_props(&local, sys, &cfg, &props)?;
        let t = trajectories(&local, sys, std::slice::from_ref(&fnn), opts.samples, opts.seed)?;
        let scaled: Vec<f64> = t.column(0).iter().map(|v| v / tile_card as f64).collect();
        rows.push(DprimeRow {
            m,
            tile_card,
            estimate: Estimate::from_values(&scaled, opts.seed),
            nonnegative: verdicts.passed(Property::Nonnegative),
            supadditive: verdicts.passed(Property::Supadditive),
            invariant: verdicts.passed(Property::Invariant),
        });
    }
    let decreasing = rows.windows(2).all(|w| {
        let (a, b) = (&w[0].estimate, &w[1].estimate);
        b.mean <= a.mean + opts.tol.ci_sigma * (a.stderr.powi(2) + b.stderr.powi(2)).sqrt() + 1e-12
    });
    let pass = decreasing && rows.iter().all(|r| r.nonnegative && r.supadditive && r.invariant);
    Ok(DprimeReport { n, rows, decreasing, pass })
}
