use std::collections::HashSet;

use serde::Serialize;

use super::{constant_for, mean_stderr, refuse, trajectories, RunOptions};
use crate::error::{LabError, Result};
use crate::families::{CertifiedFamily, Property, SetFamily};
use crate::folner::{interior, tempelman_bound, FolnerSeq, Rational, SeqIndex};
use crate::group::{Elem, FinSet};
use crate::systems::{Point, System};
use crate::tiling::standard_cert;

/// The backward greedy packing of exceedance points and both sides of the
/// counting inequality.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct GreedyCover {
    /// `C_i`: points of `F_n*` whose first exceedance happens at level `i`.
    pub c: Vec<Vec<Vec<i64>>>,
    /// `C_i′ ⊆ C_i`: the chosen centers.
    pub c_prime: Vec<Vec<Vec<i64>>>,
    /// `|{g ∈ F_n* : gy ∈ Y_{α,N}}|`.
    pub left: u64,
    /// `Σ_i |⋃_{j≤i} F_j⁻¹F_i|·|C_i′|`.
    pub middle: u64,
    /// `M·Σ_i |F_i|·|C_i′|`.
    pub right: u64,
    /// `Σ_i |F_i|·|C_i′|`.
    pub packed: u64,
    /// Every `C_i` lies in `⋃_{j≥i} F_i⁻¹F_j C_j′`.
    pub covered: bool,
    /// The chosen translates `F_i c` are pairwise disjoint and inside `F_n`.
    pub disjoint: bool,
    /// `α·packed ≤ Σ d_{F_i c}(y) ≤ d_{F_n}(y)`.
    pub mass_bound: bool,
}

impl GreedyCover {
    /// The exact inequality `left ≤ middle ≤ right` plus the structural claims.
    pub fn holds(&self) -> bool {
        self.left <= self.middle && self.middle <= self.right && self.covered && self.disjoint && self.mass_bound
    }
}

fn card(x: usize) -> u64 {
    x as u64
}

/// Builds `C_1, …, C_N` and the maximal disjoint families `C_N′, …, C_1′`
/// for the point `y`, choosing centers in increasing order.
#[allow(clippy::too_many_arguments)]
pub fn greedy_cover(
    fam: &dyn SetFamily,
    sys: &System,
    y: &Point,
    seq: &FolnerSeq,
    n: u64,
    alpha: f64,
    big_n: u64,
    constant: u64,
) -> Result<GreedyCover> {
    if big_n == 0 || !(alpha > 0.0) {
        return Err(LabError::Config("greedy cover needs N >= 1 and alpha > 0".into()));
    }
    let group = seq.group();
    let levels: Vec<FinSet> = (1..=big_n).map(|i| seq.set(i)).collect::<Result<_>>()?;
    let fn_set = seq.set(n)?;
    let mut all = FinSet::empty(group);
    for f in &levels {
        all = all.union(f)?;
    }
    let star = interior(&fn_set, &all)?;
    if star.is_empty() {
        return Err(LabError::Config(format!("F_{n}* is empty for N = {big_n}")));
    }

    let normalized = |k: usize, g: &Elem| -> Result<f64> {
        let moved = sys.apply(&fam.acting_elem(group, g), y)?;
        Ok(fam.eval(sys, &levels[k], &moved)? / levels[k].len() as f64)
    };
    let mut c: Vec<Vec<Elem>> = vec![Vec::new(); levels.len()];
    for g in star.iter() {
        for k in 0..levels.len() {
            if normalized(k, g)? > alpha {
                c[k].push(g.clone());
                break;
            }
        }
    }

    let mut occupied: HashSet<Elem> = HashSet::new();
    let mut c_prime: Vec<Vec<Elem>> = vec![Vec::new(); levels.len()];
    let mut disjoint = true;
    for i in (0..levels.len()).rev() {
        for x in &c[i] {
            let tile = levels[i].translate_right(x)?;
            if tile.iter().all(|t| !occupied.contains(t)) {
                disjoint &= tile.is_subset(&fn_set)?;
                occupied.extend(tile.iter().cloned());
                c_prime[i].push(x.clone());
            }
        }
    }
    let packed: u64 = levels.iter().zip(&c_prime).map(|(f, cp)| card(f.len()) * card(cp.len())).sum();
    disjoint &= occupied.len() as u64 == packed;

    // K_i = ⋃_{j≤i} F_j⁻¹F_i; the unchosen points of C_j sit in K_i C_i′ for some i ≥ j.
    let mut middle = 0u64;
    let mut reach: HashSet<Elem> = HashSet::new();
    for i in 0..levels.len() {
        let mut k = FinSet::empty(group);
        for j in 0..=i {
            k = k.union(&levels[j].inverse().product(&levels[i])?)?;
        }
        middle += card(k.len()) * card(c_prime[i].len());
        for x in &c_prime[i] {
            reach.extend(k.translate_right(x)?.iter().cloned());
        }
    }
    let left: u64 = c.iter().map(|v| card(v.len())).sum();
    let covered = c.iter().flatten().all(|x| reach.contains(x));

    let mut pieces = 0.0;
    for (i, cp) in c_prime.iter().enumerate() {
        for x in cp {
            pieces += fam.eval(sys, &levels[i].translate_right(x)?, y)?;
        }
    }
    let whole = fam.eval(sys, &fn_set, y)?;
    let slack = 1e-9 * whole.abs().max(1.0);
    let mass_bound = alpha * packed as f64 <= pieces + slack && pieces <= whole + slack;

    let coords = |v: &[Vec<Elem>]| -> Result<Vec<Vec<Vec<i64>>>> {
        v.iter().map(|s| Ok(FinSet::new(group, s.iter().cloned())?.to_coords())).collect()
    };
    Ok(GreedyCover {
        c: coords(&c)?,
        c_prime: coords(&c_prime)?,
        left,
        middle,
        right: constant * packed,
        packed,
        covered,
        disjoint,
        mass_bound,
    })
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct GreedyStats {
    pub instances: u64,
    pub all_hold: bool,
    pub mean_left: f64,
    pub mean_packed: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct MaximalReport {
    pub alpha: f64,
    #[serde(rename = "N")]
    pub big_n: u64,
    pub constant: u64,
    /// Fraction of sampled points in `Y_{α,N}`.
    pub empirical_mass: f64,
    pub mass_stderr: f64,
    /// The `ν(𝐃)` term and whether it is a closed form.
    pub nu: f64,
    pub nu_stderr: f64,
    pub nu_exact: bool,
    /// `(M/α)·ν`.
    pub bound: f64,
    pub pass: bool,
    pub greedy_witness_stats: Option<GreedyStats>,
}

const WITNESSES: u64 = 32;

/// Estimates the mass of `Y_{α,N}` and compares it with `(M/α)·ν(𝐃)`.
pub fn maximal_inequality_check(
    cf: &CertifiedFamily,
    seq: &FolnerSeq,
    sys: &System,
    alpha: f64,
    big_n: u64,
    n: u64,
    opts: &RunOptions,
) -> Result<MaximalReport> {
    if big_n == 0 || !(alpha > 0.0) {
        return Err(LabError::Config("maximal inequality needs N >= 1 and alpha > 0".into()));
    }
    cf.require(&[Property::Nonnegative, Property::Supadditive, Property::Invariant])?;
    let constant = constant_for(seq, opts)?;
    let bound_report = tempelman_bound(seq, big_n)?;
    if bound_report.bound > Rational::from_integer(constant) {
        return Err(refuse(
            "tempelman",
            format!("ratio {} at n = {} exceeds {constant}", bound_report.bound, bound_report.argmax),
        ));
    }
    if !cf.has(Property::StronglySupadditive) {
        for k in 1..=big_n.max(n) {
            standard_cert(seq, &SeqIndex::Linear(k))
                .map_err(|e| refuse("tiling", format!("F_{k} has no tiling and the family is not strongly supadditive: {e}")))?;
        }
    }

    let levels: Vec<FinSet> = (1..=big_n).map(|i| seq.set(i)).collect::<Result<_>>()?;
    let t = trajectories(cf.family(), sys, &levels, opts.samples, opts.seed)?;
    let hits: Vec<f64> = t
        .values
        .iter()
        .map(|v| if v.iter().any(|&x| x > alpha) { 1.0 } else { 0.0 })
        .collect();
    let mass = mean_stderr(&hits).0;
    let mass_stderr = (mass * (1.0 - mass) / hits.len() as f64).sqrt();

    let (nu, nu_stderr, nu_exact) = match cf.family().exact_nu(sys) {
        Some(v) => (v, 0.0, true),
        None => {
            let tn = trajectories(cf.family(), sys, &[seq.set(n.max(big_n))?], opts.samples, opts.seed ^ 0x51)?;
            let (m, s) = mean_stderr(&tn.column(0));
            (m, s, false)
        }
    };
    let scale = constant as f64 / alpha;
    let bound = scale * nu;
    let width = opts.tol.ci_sigma * (mass_stderr.powi(2) + (scale * nu_stderr).powi(2)).sqrt();
    let pass = mass <= bound + width;

    let greedy_witness_stats = if interior(&seq.set(n)?, &levels.iter().try_fold(FinSet::empty(seq.group()), |a, f| a.union(f))?)?.is_empty() {
        None
    } else {
        let k = WITNESSES.min(opts.samples);
        let covers = (0..k)
            .map(|i| greedy_cover(cf.family(), sys, &sys.sample(opts.seed, i), seq, n, alpha, big_n, constant))
            .collect::<Result<Vec<_>>>()?;
        Some(GreedyStats {
            instances: k,
            all_hold: covers.iter().all(GreedyCover::holds),
            mean_left: covers.iter().map(|c| c.left as f64).sum::<f64>() / k as f64,
            mean_packed: covers.iter().map(|c| c.packed as f64).sum::<f64>() / k as f64,
        })
    };
    Ok(MaximalReport {
        alpha,
        big_n,
        constant,
        empirical_mass: mass,
        mass_stderr,
        nu,
        nu_stderr,
        nu_exact,
        bound,
        pass,
        greedy_witness_stats,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::families::{ClassifyConfig, Family};
    use crate::group::Group;
    use crate::systems::Observable;

    fn z() -> Group {
        Group::z()
    }

    fn certify(f: Family, sys: &System) -> CertifiedFamily {
        CertifiedFamily::certify(f, sys, &ClassifyConfig { trials: 300, ..Default::default() }, &[]).unwrap()
    }

    #[test]
    fn below_threshold_everything_is_empty() {
        let sys = System::bernoulli(&z(), vec![0.5, 0.5], 0).unwrap();
        let fam = Family::additive(Observable::Constant { value: 0.5 });
        let seq = FolnerSeq::z_boxes(&z()).unwrap();
        let g = greedy_cover(&fam, &sys, &sys.sample(0, 0), &seq, 10, 1.0, 3, 2).unwrap();
        assert_eq!((g.left, g.middle, g.right), (0, 0, 0));
        assert!(g.c.iter().all(Vec::is_empty) && g.holds());
    }

    #[test]
    fn single_level_packing_on_z() {
        // N = 1: C_1′ is the left-to-right maximal packing of the singletons.
        let sys = System::bernoulli(&z(), vec![0.5, 0.5], 0).unwrap();
        let fam = Family::additive(Observable::Indicator { symbol: 1 });
        let seq = FolnerSeq::z_boxes(&z()).unwrap();
        let y = sys.sample(4, 2);
        let g = greedy_cover(&fam, &sys, &y, &seq, 12, 0.5, 1, 2).unwrap();
        let ones: Vec<Vec<i64>> =
            (0..12).filter(|&h| sys.symbol_at(&z().elem(&[h]).unwrap(), &y) == Some(1)).map(|h| vec![h]).collect();
        assert_eq!(g.c[0], ones);
        assert_eq!(g.c_prime[0], ones);
        assert_eq!(g.left, ones.len() as u64);
        assert!(g.holds());
    }

    #[test]
    fn constant_family_fills_the_interior() {
        let sys = System::bernoulli(&z(), vec![0.5, 0.5], 0).unwrap();
        let fam = Family::additive(Observable::Constant { value: 5.0 });
        let seq = FolnerSeq::z_boxes(&z()).unwrap();
        let g = greedy_cover(&fam, &sys, &sys.sample(0, 0), &seq, 12, 1.0, 3, 2).unwrap();
        // F_12* = {0..9}; every point exceeds at level 1 and F_1 = {0}.
        assert_eq!(g.left, 10);
        assert_eq!(g.c_prime[0].len(), 10);
        assert!(g.holds());
    }

    #[test]
    fn empty_interior_is_an_error() {
        let sys = System::bernoulli(&z(), vec![0.5, 0.5], 0).unwrap();
        let fam = Family::additive(Observable::Constant { value: 5.0 });
        let seq = FolnerSeq::z_boxes(&z()).unwrap();
        assert!(greedy_cover(&fam, &sys, &sys.sample(0, 0), &seq, 2, 1.0, 3, 2).is_err());
    }

    #[test]
    fn derived_zero_has_no_mass() {
        let sys = System::bernoulli(&z(), vec![0.5, 0.5], 0).unwrap();
        let cf = certify(Family::derived(Family::additive(Observable::Indicator { symbol: 1 })), &sys);
        let seq = FolnerSeq::z_boxes(&z()).unwrap();
        let r = maximal_inequality_check(&cf, &seq, &sys, 0.1, 5, 12, &RunOptions::new(200, 1)).unwrap();
        assert_eq!(r.empirical_mass, 0.0);
        assert!(r.pass);
        assert!(r.greedy_witness_stats.unwrap().all_hold);
    }

    #[test]
    fn additive_mass_respects_the_bound() {
        let sys = System::bernoulli(&z(), vec![0.5, 0.5], 0).unwrap();
        let cf = certify(Family::additive(Observable::Indicator { symbol: 1 }), &sys);
        let seq = FolnerSeq::z_boxes(&z()).unwrap();
        let r = maximal_inequality_check(&cf, &seq, &sys, 1.0 - 1e-9, 5, 12, &RunOptions::new(2000, 1)).unwrap();
        assert!(r.pass, "{r:?}");
        assert_eq!(r.constant, 2);
    }

    #[test]
    fn zsum_diagonal_is_refused() {
        let sys = System::bernoulli(&Group::ZSum, vec![0.5, 0.5], 0).unwrap();
        let cf = certify(Family::additive(Observable::Indicator { symbol: 1 }), &sys);
        let r = maximal_inequality_check(&cf, &FolnerSeq::zsum_boxes(), &sys, 1.0, 4, 4, &RunOptions::new(10, 1).with_constant(2));
        assert!(matches!(r, Err(LabError::GateRefused { .. })), "{r:?}");
    }
}
