use serde::Serialize;

use super::{check_schedule, mean_stderr, refuse, require_tempered, sets_for, trajectories, within_ci, RunOptions};
use crate::error::Result;
use crate::families::{CertifiedFamily, Family, Property};
use crate::folner::{FolnerSeq, SeqIndex};
use crate::systems::{mix64, ExpectationValue, Observable, System};
use crate::tiling::standard_cert;

/// A Monte Carlo mean.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct Estimate {
    pub mean: f64,
    pub stderr: f64,
    pub n_samples: u64,
    pub seed: u64,
}

impl Estimate {
    pub fn from_values(values: &[f64], seed: u64) -> Self {
        let (mean, stderr) = mean_stderr(values);
        Estimate { mean, stderr, n_samples: values.len() as u64, seed }
    }
}

/// Either the family is strongly sub-additive, or every set used is a tile.
fn nu_gate(cf: &CertifiedFamily, seq: &FolnerSeq, schedule: &[u64]) -> Result<()> {
    cf.require(&[Property::Subadditive, Property::Invariant])?;
    if cf.has(Property::StronglySubadditive) {
        return Ok(());
    }
    for &n in schedule {
        standard_cert(seq, &SeqIndex::Linear(n)).map_err(|e| {
            refuse("tiling", format!("{} is not strongly subadditive and F_{n} has no tiling: {e}", cf.family().name()))
        })?;
    }
    Ok(())
}

/// `(1/|F_n|)·mean_y d_{F_n}(y)`.
pub fn nu_estimate(cf: &CertifiedFamily, seq: &FolnerSeq, sys: &System, n: u64, opts: &RunOptions) -> Result<Estimate> {
    nu_gate(cf, seq, &[n])?;
    let t = trajectories(cf.family(), sys, &[seq.set(n)?], opts.samples, opts.seed)?;
    Ok(Estimate::from_values(&t.column(0), opts.seed))
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct NuTrend {
    pub schedule: Vec<u64>,
    pub estimates: Vec<Estimate>,
    /// Each step is non-increasing up to the paired confidence width.
    pub non_increasing: bool,
}

/// `nu_estimate` along a schedule with common random numbers.
pub fn nu_trend(cf: &CertifiedFamily, seq: &FolnerSeq, sys: &System, schedule: &[u64], opts: &RunOptions) -> Result<NuTrend> {
    check_schedule(schedule)?;
    nu_gate(cf, seq, schedule)?;
    let t = trajectories(cf.family(), sys, &sets_for(seq, schedule)?, opts.samples, opts.seed)?;
    let estimates: Vec<Estimate> =
        (0..schedule.len()).map(|k| Estimate::from_values(&t.column(k), opts.seed)).collect();
    let non_increasing = (1..schedule.len()).all(|k| {
        let diffs: Vec<f64> = t.values.iter().map(|v| v[k] - v[k - 1]).collect();
        let (d, se) = mean_stderr(&diffs);
        d <= opts.tol.ci_sigma * se + 1e-12 * estimates[k - 1].mean.abs().max(1.0)
    });
    Ok(NuTrend { schedule: schedule.to_vec(), estimates, non_increasing })
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct DecompositionCheck {
    pub mixture: Estimate,
    /// `(weight, estimate)` per ergodic component.
    pub components: Vec<(f64, Estimate)>,
    pub combined: f64,
    pub combined_stderr: f64,
    pub pass: bool,
}

/// Compares `ν(𝐃)` of a mixture with the weighted component values.
pub fn ergodic_decomposition_check(
    cf: &CertifiedFamily,
    sys: &System,
    seq: &FolnerSeq,
    n: u64,
    opts: &RunOptions,
) -> Result<DecompositionCheck> {
    let mixture = nu_estimate(cf, seq, sys, n, opts)?;
    let mut components = Vec::new();
    for (i, w) in sys.weights().into_iter().enumerate() {
        let c = sys.component(i).unwrap();
        let sub = RunOptions { seed: mix64(opts.seed ^ (i as u64 + 1)), ..opts.clone() };
        components.push((w, nu_estimate(cf, seq, c, n, &sub)?));
    }
    let combined: f64 = components.iter().map(|(w, e)| w * e.mean).sum();
    let var: f64 = components.iter().map(|(w, e)| (w * e.stderr).powi(2)).sum();
    let combined_stderr = (mixture.stderr.powi(2) + var).sqrt();
    let pass = within_ci(mixture.mean, combined, combined_stderr, opts.tol.ci_sigma);
    Ok(DecompositionCheck { mixture, components, combined, combined_stderr, pass })
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct BirkhoffReport {
    pub schedule: Vec<u64>,
    pub tempered_witness: String,
    /// `𝔼(f|𝓘)` per ergodic component.
    pub targets: Vec<ExpectationValue>,
    pub means: Vec<Estimate>,
    /// Mean absolute deviation from the target per schedule index.
    pub l1: Vec<f64>,
    pub l1_decreasing: bool,
    /// Fraction of points whose terminal average is within tolerance.
    pub terminal_pass_fraction: f64,
    pub pass: bool,
}

const TARGET_SALT: u64 = 0x7A46_E7B1_0C0F_FEE5;

/// Birkhoff averages along a tempered sequence, compared with `𝔼(f|𝓘)`.
pub fn birkhoff_check(
    obs: &Observable,
    seq: &FolnerSeq,
    sys: &System,
    schedule: &[u64],
    opts: &RunOptions,
) -> Result<BirkhoffReport> {
    check_schedule(schedule)?;
    let witness = require_tempered(seq, *schedule.last().unwrap(), opts)?;
    let fam = Family::additive(obs.clone());
    let t = trajectories(&fam, sys, &sets_for(seq, schedule)?, opts.samples, opts.seed)?;
    let targets = sys.conditional_expectation(obs, opts.samples.max(2), opts.seed ^ TARGET_SALT)?;
    let means: Vec<Estimate> = (0..schedule.len()).map(|k| Estimate::from_values(&t.column(k), opts.seed)).collect();
    let target = |i: usize| targets[t.components[i]];
    let l1: Vec<f64> = (0..schedule.len())
        .map(|k| {
            let dev: Vec<f64> = t.values.iter().enumerate().map(|(i, v)| (v[k] - target(i).mean).abs()).collect();
            mean_stderr(&dev).0
        })
        .collect();
    let close = t
        .values
        .iter()
        .enumerate()
        .filter(|(i, v)| {
            let e = target(*i);
            (v.last().unwrap() - e.mean).abs() <= opts.tol.terminal + opts.tol.ci_sigma * e.stderr
        })
        .count();
    let terminal_pass_fraction = close as f64 / t.values.len() as f64;
    let l1_decreasing = l1.len() < 2 || l1.last() < l1.first();
    Ok(BirkhoffReport {
        schedule: schedule.to_vec(),
        tempered_witness: witness.to_string(),
        targets,
        means,
        l1,
        l1_decreasing,
        terminal_pass_fraction,
        pass: terminal_pass_fraction >= opts.tol.pass_fraction && l1_decreasing,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::families::{ClassifyConfig, Concave};
    use crate::group::Group;
    use crate::LabError;

    fn z() -> Group {
        Group::z()
    }

    fn certify(f: Family, sys: &System) -> CertifiedFamily {
        let cfg = ClassifyConfig { trials: 300, ..Default::default() };
        CertifiedFamily::certify(f, sys, &cfg, &[]).unwrap()
    }

    fn indicator() -> Observable {
        Observable::Indicator { symbol: 1 }
    }

    #[test]
    fn additive_nu_is_the_mean() {
        let sys = System::bernoulli(&z(), vec![0.5, 0.5], 1).unwrap();
        let cf = certify(Family::additive(indicator()), &sys);
        let seq = FolnerSeq::z_boxes(&z()).unwrap();
        let e = nu_estimate(&cf, &seq, &sys, 64, &RunOptions::new(2000, 3)).unwrap();
        assert!((e.mean - 0.5).abs() <= 3.0 * e.stderr, "{e:?}");
    }

    #[test]
    fn max_family_nu_is_small() {
        let sys = System::bernoulli(&z(), vec![0.5, 0.5], 1).unwrap();
        let cf = certify(Family::Max { observable: indicator() }, &sys);
        let seq = FolnerSeq::z_boxes(&z()).unwrap();
        let e = nu_estimate(&cf, &seq, &sys, 256, &RunOptions::new(500, 3)).unwrap();
        let exact = cf.family().exact_normalized_mean(&sys, 256).unwrap();
        assert!(within_ci(e.mean, exact, e.stderr, 4.0));
        assert!(e.mean < 0.01);
    }

    #[test]
    fn derived_additive_is_zero() {
        let sys = System::bernoulli(&z(), vec![0.5, 0.5], 1).unwrap();
        let cf = certify(Family::derived(Family::additive(indicator())), &sys);
        let seq = FolnerSeq::z_boxes(&z()).unwrap();
        let e = nu_estimate(&cf, &seq, &sys, 32, &RunOptions::new(200, 3)).unwrap();
        assert_eq!((e.mean, e.stderr), (0.0, 0.0));
    }

    #[test]
    fn subadditive_trend_is_non_increasing() {
        let sys = System::bernoulli(&z(), vec![0.5, 0.5], 1).unwrap();
        let fam = Family::AdditivePlus { observable: indicator(), beta: 1.0, gamma: Concave::sqrt() };
        let cf = certify(fam, &sys);
        let seq = FolnerSeq::z_boxes(&z()).unwrap();
        let t = nu_trend(&cf, &seq, &sys, &[1, 2, 4, 8, 16, 32], &RunOptions::new(500, 9)).unwrap();
        assert!(t.non_increasing, "{t:?}");
    }

    #[test]
    fn gate_refuses_non_subadditive() {
        let sys = System::bernoulli(&z(), vec![0.5, 0.5], 1).unwrap();
        let cf = certify(Family::derived(Family::AdditivePlus { observable: indicator(), beta: 1.0, gamma: Concave::sqrt() }), &sys);
        let seq = FolnerSeq::z_boxes(&z()).unwrap();
        assert!(matches!(nu_estimate(&cf, &seq, &sys, 4, &RunOptions::new(10, 0)), Err(LabError::GateRefused { .. })));
    }

    #[test]
    fn decomposition_of_a_mixture() {
        let b = |p: f64| System::bernoulli(&z(), vec![1.0 - p, p], 2).unwrap();
        let mix = System::mixture(vec![(0.5, b(0.25)), (0.5, b(0.75))], 2).unwrap();
        let cf = certify(Family::additive(indicator()), &mix);
        let seq = FolnerSeq::z_boxes(&z()).unwrap();
        let r = ergodic_decomposition_check(&cf, &mix, &seq, 16, &RunOptions::new(4000, 5)).unwrap();
        assert!(r.pass, "{r:?}");
        assert!((r.mixture.mean - 0.5).abs() <= 4.0 * r.mixture.stderr);

        let single = System::mixture(vec![(1.0, b(0.25))], 2).unwrap();
        let r = ergodic_decomposition_check(&cf, &single, &seq, 16, &RunOptions::new(2000, 5)).unwrap();
        assert!(r.pass);

        let cf = certify(Family::Max { observable: indicator() }, &mix);
        let r = ergodic_decomposition_check(&cf, &mix, &seq, 4, &RunOptions::new(4000, 5)).unwrap();
        assert!(r.pass, "{r:?}");
    }

    #[test]
    fn birkhoff_examples() {
        let seq = FolnerSeq::z_boxes(&z()).unwrap();
        let schedule = [2, 8, 32, 128, 512, 2048];
        let sys = System::bernoulli(&z(), vec![0.5, 0.5], 1).unwrap();
        let r = birkhoff_check(&indicator(), &seq, &sys, &schedule, &RunOptions::new(400, 1)).unwrap();
        assert!(r.pass, "{r:?}");

        let torus = System::torus(&z(), vec![std::f64::consts::SQRT_2 - 1.0], 0).unwrap();
        let r = birkhoff_check(&Observable::Coordinate { index: 0 }, &seq, &torus, &schedule, &RunOptions::new(200, 1)).unwrap();
        assert!(r.pass && r.targets[0].mean == 0.5, "{r:?}");

        let b = |p: f64| System::bernoulli(&z(), vec![1.0 - p, p], 2).unwrap();
        let mix = System::mixture(vec![(0.5, b(0.25)), (0.5, b(0.75))], 2).unwrap();
        let r = birkhoff_check(&indicator(), &seq, &mix, &schedule, &RunOptions::new(400, 1)).unwrap();
        assert!(r.pass, "{r:?}");
        assert_eq!(r.targets.iter().map(|t| t.mean).collect::<Vec<_>>(), vec![0.25, 0.75]);
    }

    #[test]
    fn birkhoff_refuses_untempered_sequences() {
        let seq = FolnerSeq::shifted_z_boxes(&z(), 1, 2).unwrap();
        let sys = System::bernoulli(&z(), vec![0.5, 0.5], 1).unwrap();
        let r = birkhoff_check(&indicator(), &seq, &sys, &[2, 4, 8, 16], &RunOptions::new(10, 1).with_constant(2));
        assert!(matches!(r, Err(LabError::GateRefused { .. })), "{r:?}");
    }
}
