//! Families `{d_F}` of functions indexed by finite sets, and a randomized
//! exact classifier for their structural properties.

use std::collections::BTreeMap;
use std::fmt;

use rand::seq::SliceRandom;
use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{LabError, Result};
use crate::folner::interior;
use crate::group::{Elem, FinSet, Group};
use crate::systems::{substream, Observable, Point, System};
use crate::tiling::TilingCert;

/// A concave `γ` on cardinalities with `γ(0) = 0`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Concave {
    Sqrt {
        #[serde(default = "unit")]
        coef: f64,
    },
    Log1p {
        #[serde(default = "unit")]
        coef: f64,
    },
    /// `coef · n^exponent`, `0 < exponent ≤ 1`.
    Pow {
        #[serde(default = "unit")]
        coef: f64,
        exponent: f64,
    },
}

fn unit() -> f64 {
    1.0
}

impl Concave {
    pub fn sqrt() -> Self {
        Concave::Sqrt { coef: 1.0 }
    }

    pub fn eval(&self, n: usize) -> f64 {
        let x = n as f64;
        match *self {
            Concave::Sqrt { coef } => coef * x.sqrt(),
            Concave::Log1p { coef } => coef * x.ln_1p(),
            Concave::Pow { coef, exponent } => coef * x.powf(exponent),
        }
    }

    /// `lim γ(n)/n`.
    pub fn slope_at_infinity(&self) -> f64 {
        match *self {
            Concave::Pow { coef, exponent } if exponent >= 1.0 => coef,
            _ => 0.0,
        }
    }

    fn validate(&self) -> Result<()> {
        match *self {
            Concave::Pow { exponent, .. } if !(exponent > 0.0 && exponent <= 1.0) => {
                Err(LabError::Config(format!("exponent {exponent} outside (0, 1]")))
            }
            Concave::Sqrt { coef } | Concave::Log1p { coef } | Concave::Pow { coef, .. } if !(coef >= 0.0) => {
                Err(LabError::Config("concave coefficient must be non-negative".into()))
            }
            _ => Ok(()),
        }
    }
}

/// A built-in family.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Family {
    /// `Σ_{g∈F} f(gy)`.
    Additive { observable: Observable },
    /// `max_{g∈F} f(gy)`.
    Max { observable: Observable },
    /// `γ(|F|)`.
    ConcaveCardinality { gamma: Concave },
    /// `Σ_{g∈F} f(gy) + β γ(|F|)`.
    AdditivePlus {
        observable: Observable,
        #[serde(default = "unit")]
        beta: f64,
        gamma: Concave,
    },
    /// `max(Σ f₁, Σ f₂)`.
    MaxOfAdditives { first: Observable, second: Observable },
    /// `max(−N|F|, d_F)`.
    Truncated { base: Box<Family>, level: f64 },
    /// `Σ_{g∈F} d_{{e}}(gy) − d_F(y)`.
    Derived { base: Box<Family> },
    /// `d_F − |F|²`.
    SquarePenalty { base: Box<Family> },
}

impl Family {
    pub fn additive(observable: Observable) -> Self {
        Family::Additive { observable }
    }

    pub fn truncated(base: Family, level: f64) -> Self {
        Family::Truncated { base: Box::new(base), level }
    }

    pub fn derived(base: Family) -> Self {
        Family::Derived { base: Box::new(base) }
    }

    pub fn name(&self) -> &'static str {
        match self {
            Family::Additive { .. } => "additive",
            Family::Max { .. } => "max",
            Family::ConcaveCardinality { .. } => "concave_cardinality",
            Family::AdditivePlus { .. } => "additive_plus",
            Family::MaxOfAdditives { .. } => "max_of_additives",
            Family::Truncated { .. } => "truncated",
            Family::Derived { .. } => "derived",
            Family::SquarePenalty { .. } => "square_penalty",
        }
    }

    pub fn validate(&self) -> Result<()> {
        match self {
            Family::Max { observable } if !observable.is_nonnegative() => {
                Err(LabError::Config("max family needs a non-negative observable".into()))
            }
            Family::ConcaveCardinality { gamma } => gamma.validate(),
            Family::AdditivePlus { beta, gamma, .. } => {
                if !(*beta >= 0.0) {
                    return Err(LabError::Config("beta must be non-negative".into()));
                }
                gamma.validate()
            }
            Family::Truncated { base, level } => {
                if !(*level > 0.0) {
                    return Err(LabError::Config("truncation level must be positive".into()));
                }
                base.validate()
            }
            Family::Derived { base } | Family::SquarePenalty { base } => base.validate(),
            _ => Ok(()),
        }
    }

    fn sum(sys: &System, obs: &Observable, f: &FinSet, y: &Point) -> Result<f64> {
        f.iter().map(|g| sys.eval_at(obs, y, g)).sum()
    }

    /// `d_F(y)`, with `d_∅ = 0`.
    pub fn evaluate(&self, sys: &System, f: &FinSet, y: &Point) -> Result<f64> {
        if f.is_empty() {
            return Ok(0.0);
        }
        match self {
            Family::Additive { observable } => Self::sum(sys, observable, f, y),
            Family::Max { observable } => f
                .iter()
                .map(|g| sys.eval_at(observable, y, g))
                .try_fold(f64::NEG_INFINITY, |m, v| v.map(|v| m.max(v))),
            Family::ConcaveCardinality { gamma } => Ok(gamma.eval(f.len())),
            Family::AdditivePlus { observable, beta, gamma } => {
                Ok(Self::sum(sys, observable, f, y)? + beta * gamma.eval(f.len()))
            }
            Family::MaxOfAdditives { first, second } => {
                Ok(Self::sum(sys, first, f, y)?.max(Self::sum(sys, second, f, y)?))
            }
            Family::Truncated { base, level } => Ok(base.evaluate(sys, f, y)?.max(-level * f.len() as f64)),
            Family::Derived { base } => {
                let e = FinSet::identity(f.group());
                let singles = f
                    .iter()
                    .map(|g| base.evaluate(sys, &e, &sys.apply_unchecked(g, y)))
                    .sum::<Result<f64>>()?;
                Ok(singles - base.evaluate(sys, f, y)?)
            }
            Family::SquarePenalty { base } => Ok(base.evaluate(sys, f, y)? - (f.len() as f64).powi(2)),
        }
    }

    /// `d_F(y) / |F|`.
    pub fn evaluate_normalized(&self, sys: &System, f: &FinSet, y: &Point) -> Result<f64> {
        f.require_non_empty("normalized evaluation")?;
        Ok(self.evaluate(sys, f, y)? / f.len() as f64)
    }

    /// Closed-form `ν(𝐃)` on an ergodic system or a finite mixture of them.
    pub fn exact_nu(&self, sys: &System) -> Option<f64> {
        if sys.is_mixture() {
            let parts = (0..sys.components())
                .map(|i| self.exact_nu(sys.component(i).unwrap()))
                .collect::<Option<Vec<_>>>()?;
            return Some(sys.weights().iter().zip(parts).map(|(w, v)| w * v).sum());
        }
        match self {
            Family::Additive { observable } => sys.expectation(observable),
            Family::Max { observable } => observable.bound().map(|_| 0.0),
            Family::ConcaveCardinality { gamma } => Some(gamma.slope_at_infinity()),
            Family::AdditivePlus { observable, beta, gamma } => {
                Some(sys.expectation(observable)? + beta * gamma.slope_at_infinity())
            }
            Family::MaxOfAdditives { first, second } => Some(sys.expectation(first)?.max(sys.expectation(second)?)),
            Family::Truncated { base, level } => match &**base {
                Family::Additive { observable } if observable.bound().is_some_and(|b| b <= *level) => base.exact_nu(sys),
                _ => None,
            },
            Family::Derived { base } => match &**base {
                Family::Additive { .. } => Some(0.0),
                Family::AdditivePlus { beta, gamma, .. } => Some(beta * (gamma.eval(1) - gamma.slope_at_infinity())),
                _ => None,
            },
            Family::SquarePenalty { .. } => Some(f64::NEG_INFINITY),
        }
    }

    /// Closed-form `E d_F / |F|` for a set of `n` elements.
    pub fn exact_normalized_mean(&self, sys: &System, n: u64) -> Option<f64> {
        let x = n as f64;
        match self {
            Family::Additive { observable } => sys.expectation(observable),
            Family::Max { observable } => Some(sys.expected_max(observable, n)? / x),
            Family::ConcaveCardinality { gamma } => Some(gamma.eval(n as usize) / x),
            Family::AdditivePlus { observable, beta, gamma } => {
                Some(sys.expectation(observable)? + beta * gamma.eval(n as usize) / x)
            }
            Family::Derived { base } => match &**base {
                Family::Additive { .. } => Some(0.0),
                Family::AdditivePlus { beta, gamma, .. } => Some(beta * (gamma.eval(1) - gamma.eval(n as usize) / x)),
                _ => None,
            },
            Family::SquarePenalty { base } => Some(base.exact_normalized_mean(sys, n)? - x),
            _ => None,
        }
    }
}

/// Anything the classifier can test: an evaluator plus the group element
/// through which `g` acts on points.
pub trait SetFamily: Sync {
    fn eval(&self, sys: &System, f: &FinSet, y: &Point) -> Result<f64>;

    fn acting_elem(&self, _group: &Group, g: &Elem) -> Elem {
        g.clone()
    }

    fn label(&self) -> String;
}

impl SetFamily for Family {
    fn eval(&self, sys: &System, f: &FinSet, y: &Point) -> Result<f64> {
        self.evaluate(sys, f, y)
    }

    fn label(&self) -> String {
        self.name().to_string()
    }
}

/// The localized derived family: `F ↦ d′_{Tπ(F)} − Σ_{g∈F} d′_T(π(g)·)`
/// for a self-similar tile `T`, acted on through `π`.
#[derive(Clone, Debug)]
pub struct LocalDerived {
    derived: Family,
    cert: TilingCert,
}

impl LocalDerived {
    pub fn new(base: Family, cert: TilingCert) -> Result<Self> {
        if cert.iso.is_none() {
            return Err(LabError::InvalidCert("local derived family needs a self-similar tile".into()));
        }
        Ok(LocalDerived { derived: Family::derived(base), cert })
    }

    pub fn tile(&self) -> &FinSet {
        &self.cert.tile
    }
}

impl SetFamily for LocalDerived {
    fn eval(&self, sys: &System, f: &FinSet, y: &Point) -> Result<f64> {
        if f.is_empty() {
            return Ok(0.0);
        }
        let group = f.group();
        let iso = self.cert.iso.as_ref().unwrap();
        let whole = self.derived.evaluate(sys, &self.cert.compose(f)?, y)?;
        let parts = f
            .iter()
            .map(|g| self.derived.evaluate(sys, &self.cert.tile, &sys.apply_unchecked(&iso.apply(group, g), y)))
            .sum::<Result<f64>>()?;
        Ok(whole - parts)
    }

    fn acting_elem(&self, group: &Group, g: &Elem) -> Elem {
        self.cert.iso.as_ref().unwrap().apply(group, g)
    }

    fn label(&self) -> String {
        format!("local_derived(|T|={})", self.cert.tile.len())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Property {
    Nonnegative,
    Invariant,
    BiInvariant,
    Monotone,
    Subadditive,
    StronglySubadditive,
    Supadditive,
    StronglySupadditive,
}

impl Property {
    pub const ALL: [Property; 8] = [
        Property::Nonnegative,
        Property::Invariant,
        Property::BiInvariant,
        Property::Monotone,
        Property::Subadditive,
        Property::StronglySubadditive,
        Property::Supadditive,
        Property::StronglySupadditive,
    ];
}

impl fmt::Display for Property {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = serde_json::to_value(self).unwrap();
        write!(f, "{}", s.as_str().unwrap())
    }
}

/// A violated inequality `lhs ≤ rhs` (or a broken identity).
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Counterexample {
    pub property: Property,
    pub e: Vec<Vec<i64>>,
    pub f: Vec<Vec<i64>>,
    pub g: Vec<i64>,
    /// The point is `sys.sample(point_seed, point_index)`.
    pub point_seed: u64,
    pub point_index: u64,
    pub lhs: f64,
    pub rhs: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(tag = "verdict", rename_all = "snake_case")]
pub enum Verdict {
    Pass { draws: u64, equality_on_all_draws: bool },
    Fail { counterexample: Box<Counterexample> },
}

impl Verdict {
    pub fn passed(&self) -> bool {
        matches!(self, Verdict::Pass { .. })
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ClassifierReport {
    pub family: String,
    pub verdicts: BTreeMap<Property, Verdict>,
}

impl ClassifierReport {
    pub fn passed(&self, p: Property) -> bool {
        self.verdicts.get(&p).is_some_and(Verdict::passed)
    }

    pub fn first_failure(&self, among: &[Property]) -> Option<&Counterexample> {
        among.iter().find_map(|p| match self.verdicts.get(p) {
            Some(Verdict::Fail { counterexample }) => Some(&**counterexample),
            _ => None,
        })
    }
}

/// Classifier budget: sets are drawn from `[-radius, radius]` on each of
/// `width` coordinates (all coordinates of ℤᵈ).
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ClassifyConfig {
    pub trials: u64,
    pub max_card: usize,
    pub radius: i64,
    #[serde(default = "two")]
    pub width: usize,
    #[serde(default)]
    pub seed: u64,
}

fn two() -> usize {
    2
}

impl Default for ClassifyConfig {
    fn default() -> Self {
        ClassifyConfig { trials: 2000, max_card: 6, radius: 4, width: 2, seed: 0 }
    }
}

/// Relative tolerance of the classifier: `1e-12 · max(1, |lhs|, |rhs|)`.
pub const CLASSIFY_TOL: f64 = 1e-12;

fn tol(a: f64, b: f64) -> f64 {
    CLASSIFY_TOL * 1f64.max(a.abs()).max(b.abs())
}

const POINT_SALT: u64 = 0x5EED_C1A5_51F1_E500;

struct Draw {
    e: FinSet,
    f: FinSet,
    de: FinSet,
    df: FinSet,
    g: Elem,
    index: u64,
}

fn random_elem(group: &Group, dims: usize, radius: i64, rng: &mut impl Rng) -> Elem {
    let coords: Vec<i64> = (0..dims).map(|_| rng.gen_range(-radius..=radius)).collect();
    group.elem(&coords).expect("window coordinates are valid")
}

fn draw(group: &Group, cfg: &ClassifyConfig, index: u64) -> Draw {
    let mut rng = substream(cfg.seed, index);
    let dims = group.dim().unwrap_or(cfg.width);
    let target = rng.gen_range(2..=2 * cfg.max_card.max(1));
    let mut pool: Vec<Elem> = Vec::with_capacity(target);
    for _ in 0..8 * target {
        if pool.len() == target {
            break;
        }
        let x = random_elem(group, dims, cfg.radius, &mut rng);
        if !pool.contains(&x) {
            pool.push(x);
        }
    }
    let subset = |rng: &mut rand_chacha::ChaCha8Rng| {
        let k = rng.gen_range(1..=cfg.max_card.min(pool.len()));
        let picked: Vec<Elem> = pool.choose_multiple(rng, k).cloned().collect();
        FinSet::from_unsorted(group, picked)
    };
    let e = subset(&mut rng);
    let f = subset(&mut rng);
    pool.shuffle(&mut rng);
    let split = if pool.len() >= 2 { rng.gen_range(1..pool.len()) } else { 1 };
    let de = FinSet::from_unsorted(group, pool[..split].iter().take(cfg.max_card).cloned().collect());
    let df = FinSet::from_unsorted(group, pool[split..].iter().take(cfg.max_card).cloned().collect());
    let g = random_elem(group, dims, cfg.radius, &mut rng);
    Draw { e, f, de, df, g, index }
}

/// One checked inequality `lhs ≤ rhs` (or equality).
struct Check {
    lhs: f64,
    rhs: f64,
    equality: bool,
    e: FinSet,
    f: FinSet,
}

fn trial(fam: &dyn SetFamily, sys: &System, cfg: &ClassifyConfig, props: &[Property], index: u64) -> Result<Vec<Check>> {
    let group = sys.group();
    let d = draw(group, cfg, index);
    let y = sys.sample(cfg.seed ^ POINT_SALT, d.index);
    let eval = |s: &FinSet| fam.eval(sys, s, &y);
    let de = eval(&d.e)?;
    let df = eval(&d.f)?;
    let union = d.e.union(&d.f)?;
    let du = eval(&union)?;
    let di = eval(&d.e.intersection(&d.f)?)?;
    let mut out = Vec::with_capacity(props.len());
    let mut push = |_: Property, lhs, rhs, equality, e: &FinSet, f: &FinSet| {
        out.push(Check { lhs, rhs, equality, e: e.clone(), f: f.clone() })
    };
    for &p in props {
        match p {
            Property::Nonnegative => push(p, 0.0, de, false, &d.e, &d.e),
            Property::Invariant => {
                let moved = sys.apply_unchecked(&fam.acting_elem(group, &d.g), &y);
                push(p, eval(&d.e.translate_right(&d.g)?)?, fam.eval(sys, &d.e, &moved)?, true, &d.e, &d.e)
            }
            Property::BiInvariant => {
                push(p, eval(&d.e.translate_left(&d.g)?)?, eval(&d.e.translate_right(&d.g)?)?, true, &d.e, &d.e)
            }
            Property::Monotone => push(p, de, du, false, &d.e, &d.f),
            Property::StronglySubadditive => push(p, du + di, de + df, false, &d.e, &d.f),
            Property::StronglySupadditive => push(p, de + df, du + di, false, &d.e, &d.f),
            Property::Subadditive | Property::Supadditive => {
                let a = eval(&d.de)?;
                let b = eval(&d.df)?;
                let u = eval(&d.de.union(&d.df)?)?;
                if p == Property::Subadditive {
                    push(p, u, a + b, false, &d.de, &d.df)
                } else {
                    push(p, a + b, u, false, &d.de, &d.df)
                }
            }
        }
    }
    Ok(out)
}

/// Tests the requested properties on `cfg.trials` random `(E, F, g, y)`.
/// Each property either passes on every draw or fails with the first
/// (lowest-index) counterexample.
pub fn classify_props(
    fam: &dyn SetFamily,
    sys: &System,
    cfg: &ClassifyConfig,
    props: &[Property],
) -> Result<ClassifierReport> {
    if cfg.trials == 0 || cfg.max_card == 0 {
        return Err(LabError::Config("classifier needs trials >= 1 and max_card >= 1".into()));
    }
    let results: Vec<Vec<Check>> = (0..cfg.trials)
        .into_par_iter()
        .map(|i| trial(fam, sys, cfg, props, i))
        .collect::<Result<_>>()?;
    let dims = sys.group().dim().unwrap_or(cfg.width);
    let mut verdicts = BTreeMap::new();
    for (k, &p) in props.iter().enumerate() {
        let mut equal_everywhere = true;
        let mut failure = None;
        for (i, checks) in results.iter().enumerate() {
            let c = &checks[k];
            let t = tol(c.lhs, c.rhs);
            let ok = if c.equality { (c.lhs - c.rhs).abs() <= t } else { c.lhs <= c.rhs + t };
            equal_everywhere &= (c.lhs - c.rhs).abs() <= t;
            if !ok {
                let d = draw(sys.group(), cfg, i as u64);
                let mut g = d.g.coords().to_vec();
                g.resize(dims.max(g.len()), 0);
                failure = Some(Counterexample {
                    property: p,
                    e: c.e.to_coords(),
                    f: c.f.to_coords(),
                    g,
                    point_seed: cfg.seed ^ POINT_SALT,
                    point_index: i as u64,
                    lhs: c.lhs,
                    rhs: c.rhs,
                });
                break;
            }
        }
        let verdict = match failure {
            Some(c) => Verdict::Fail { counterexample: Box::new(c) },
            None => Verdict::Pass { draws: cfg.trials, equality_on_all_draws: equal_everywhere },
        };
        verdicts.insert(p, verdict);
    }
    Ok(ClassifierReport { family: fam.label(), verdicts })
}

pub fn classify(fam: &dyn SetFamily, sys: &System, cfg: &ClassifyConfig) -> Result<ClassifierReport> {
    classify_props(fam, sys, cfg, &Property::ALL)
}

/// A family together with the classifier report that certified it. The
/// theorem engine only accepts families in this form.
#[derive(Clone, Debug)]
pub struct CertifiedFamily {
    family: Family,
    report: ClassifierReport,
}

impl CertifiedFamily {
    /// Classifies `family` and refuses when a declared property fails.
    pub fn certify(family: Family, sys: &System, cfg: &ClassifyConfig, declared: &[Property]) -> Result<Self> {
        Self::try_certify(family, sys, cfg, declared)?.map_err(|c| LabError::GateRefused {
            hypothesis: c.property.to_string(),
            detail: format!("declared property fails: lhs {} > rhs {}", c.lhs, c.rhs),
        })
    }

    /// Like `certify`, but hands back the failing draw of a declared property.
    pub fn try_certify(
        family: Family,
        sys: &System,
        cfg: &ClassifyConfig,
        declared: &[Property],
    ) -> Result<std::result::Result<Self, Box<Counterexample>>> {
        family.validate()?;
        let report = classify(&family, sys, cfg)?;
        if let Some(c) = report.first_failure(declared) {
            return Ok(Err(Box::new(c.clone())));
        }
        Ok(Ok(CertifiedFamily { family, report }))
    }

    pub fn family(&self) -> &Family {
        &self.family
    }

    pub fn report(&self) -> &ClassifierReport {
        &self.report
    }

    pub fn has(&self, p: Property) -> bool {
        self.report.passed(p)
    }

    /// Refuses unless every listed property passed.
    pub fn require(&self, props: &[Property]) -> Result<()> {
        match props.iter().find(|p| !self.has(**p)) {
            Some(p) => Err(LabError::GateRefused {
                hypothesis: p.to_string(),
                detail: format!("{} did not pass the classifier", self.family.name()),
            }),
            None => Ok(()),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct DecompositionReport {
    pub points: u64,
    pub violations: u64,
    pub max_excess: f64,
}

/// Checks `d_E ≤ Σ a_i d_{E_i}` on sampled points after validating the
/// indicator identity `1_E = Σ a_i 1_{E_i}` pointwise.
pub fn indicator_decomposition_check(
    fam: &Family,
    sys: &System,
    e: &FinSet,
    parts: &[(f64, FinSet)],
    samples: u64,
    seed: u64,
) -> Result<DecompositionReport> {
    let mut support = e.clone();
    for (_, s) in parts {
        support = support.union(s)?;
    }
    for x in support.iter() {
        let lhs = if e.contains(x) { 1.0 } else { 0.0 };
        let rhs: f64 = parts.iter().filter(|(_, s)| s.contains(x)).map(|(a, _)| a).sum();
        if (lhs - rhs).abs() > 1e-12 {
            return Err(LabError::IndicatorIdentity(format!("at {x:?}: 1_E = {lhs}, Σ a_i 1_(E_i) = {rhs}")));
        }
    }
    let excess: Vec<f64> = (0..samples)
        .into_par_iter()
        .map(|i| {
            let y = sys.sample(seed, i);
            let lhs = fam.evaluate(sys, e, &y)?;
            let rhs = parts.iter().map(|(a, s)| Ok(a * fam.evaluate(sys, s, &y)?)).sum::<Result<f64>>()?;
            Ok(lhs - rhs - tol(lhs, rhs))
        })
        .collect::<Result<_>>()?;
    Ok(DecompositionReport {
        points: samples,
        violations: excess.iter().filter(|&&x| x > 0.0).count() as u64,
        max_excess: excess.iter().copied().fold(f64::NEG_INFINITY, f64::max),
    })
}

/// Both sides of `Σ_{t∈T} 1_{tE} = Σ_{g∈E} 1_{Tg}` as multiplicity maps.
pub fn translate_multiplicities(t: &FinSet, e: &FinSet) -> Result<(BTreeMap<Elem, u64>, BTreeMap<Elem, u64>)> {
    let mut left = BTreeMap::new();
    for x in t.iter() {
        for z in e.translate_left(x)?.iter() {
            *left.entry(z.clone()).or_insert(0) += 1;
        }
    }
    let mut right = BTreeMap::new();
    for g in e.iter() {
        for z in t.translate_right(g)?.iter() {
            *right.entry(z.clone()).or_insert(0) += 1;
        }
    }
    Ok((left, right))
}

/// `1_F = (1/|T|) Σ_{g∈E} 1_{Tg} + Σ_x r(x) 1_{{x}}` with
/// `E = F ∩ ⋂_{t∈T} t⁻¹F` and the residual `r ≥ 0` spread over singletons.
pub fn interior_decomposition(f: &FinSet, t: &FinSet) -> Result<Vec<(f64, FinSet)>> {
    let e = interior(f, t)?;
    let w = 1.0 / t.len() as f64;
    let mut parts: Vec<(f64, FinSet)> = e.iter().map(|g| Ok((w, t.translate_right(g)?))).collect::<Result<_>>()?;
    let (_, cover) = translate_multiplicities(t, &e)?;
    for x in f.iter() {
        let covered = cover.get(x).copied().unwrap_or(0) as f64 * w;
        let residual = 1.0 - covered;
        if residual < -1e-12 {
            return Err(LabError::IndicatorIdentity(format!("{x:?} is covered {covered} > 1 times")));
        }
        if residual > 1e-12 {
            parts.push((residual, FinSet::singleton(f.group(), x.clone())?));
        }
    }
    Ok(parts)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::folner::{FolnerSeq, SeqIndex};
    use crate::tiling::standard_cert;

    fn z() -> Group {
        Group::z()
    }

    fn bern() -> System {
        System::bernoulli(&z(), vec![0.5, 0.5], 3).unwrap()
    }

    fn cfg(trials: u64) -> ClassifyConfig {
        ClassifyConfig { trials, max_card: 5, radius: 4, width: 2, seed: 17 }
    }

    #[test]
    fn evaluate_examples() {
        let sys = bern();
        let y = sys.sample(0, 0);
        let f = FinSet::ints(&z(), 0..7).unwrap();
        let one = Family::additive(Observable::Constant { value: 1.0 });
        assert_eq!(one.evaluate(&sys, &f, &y).unwrap(), 7.0);
        assert_eq!(one.evaluate_normalized(&sys, &f, &y).unwrap(), 1.0);

        let obs = Observable::SymbolValue { values: vec![2.0, 5.0] };
        let max = Family::Max { observable: obs.clone() };
        let g = z().elem(&[3]).unwrap();
        let single = FinSet::singleton(&z(), g.clone()).unwrap();
        assert_eq!(max.evaluate(&sys, &single, &y).unwrap(), sys.eval_at(&obs, &y, &g).unwrap());

        let dprime = Family::derived(Family::additive(obs));
        for n in 1..20 {
            let f = FinSet::ints(&z(), 0..n).unwrap();
            assert_eq!(dprime.evaluate(&sys, &f, &y).unwrap(), 0.0);
        }
        assert_eq!(max.evaluate(&sys, &FinSet::empty(&z()), &y).unwrap(), 0.0);
    }

    #[test]
    fn additive_is_modular() {
        let fam = Family::additive(Observable::Indicator { symbol: 1 });
        let r = classify(&fam, &bern(), &cfg(500)).unwrap();
        assert_eq!(r.verdicts[&Property::StronglySubadditive], Verdict::Pass { draws: 500, equality_on_all_draws: true });
        assert!(r.passed(Property::Invariant) && r.passed(Property::BiInvariant));
    }

    #[test]
    fn max_boundary_case() {
        // E={0}, F={0,1} with values (2, 5) at 0 and 1: 2 + 5 <= 2 + 5.
        let sys = System::bernoulli(&z(), vec![0.5, 0.5], 0).unwrap();
        let obs = Observable::SymbolValue { values: vec![2.0, 5.0] };
        let fam = Family::Max { observable: obs.clone() };
        let e = FinSet::ints(&z(), [0]).unwrap();
        let f = FinSet::ints(&z(), [0, 1]).unwrap();
        let y = (0..1000)
            .map(|i| sys.sample(1, i))
            .find(|y| {
                sys.eval_at(&obs, y, &z().elem(&[0]).unwrap()).unwrap() == 2.0
                    && sys.eval_at(&obs, y, &z().elem(&[1]).unwrap()).unwrap() == 5.0
            })
            .unwrap();
        let d = |s: &FinSet| fam.evaluate(&sys, s, &y).unwrap();
        let u = e.union(&f).unwrap();
        let i = e.intersection(&f).unwrap();
        assert_eq!((d(&u) + d(&i), d(&e) + d(&f)), (7.0, 7.0));
        let r = classify(&fam, &sys, &cfg(500)).unwrap();
        assert!(r.passed(Property::StronglySubadditive));
    }

    #[test]
    fn concave_plus_additive_verdicts() {
        let fam = Family::AdditivePlus { observable: Observable::Indicator { symbol: 1 }, beta: 1.0, gamma: Concave::sqrt() };
        let r = classify(&fam, &bern(), &cfg(500)).unwrap();
        assert!(r.passed(Property::Subadditive));
        assert!(!r.passed(Property::Supadditive));
    }

    #[test]
    fn signed_max_of_additives_is_not_submodular() {
        let fam = Family::MaxOfAdditives {
            first: Observable::Constant { value: 0.0 },
            second: Observable::SymbolValue { values: vec![1.0, -1.0] },
        };
        let r = classify(&fam, &bern(), &cfg(2000)).unwrap();
        assert!(r.passed(Property::Subadditive));
        match &r.verdicts[&Property::StronglySubadditive] {
            Verdict::Fail { counterexample } => assert!(counterexample.lhs > counterexample.rhs),
            v => panic!("expected a counterexample, got {v:?}"),
        }
    }

    #[test]
    fn derived_family_verdicts() {
        let base = Family::AdditivePlus { observable: Observable::Indicator { symbol: 0 }, beta: 1.0, gamma: Concave::sqrt() };
        let r = classify(&Family::derived(base), &bern(), &cfg(1000)).unwrap();
        for p in [Property::Nonnegative, Property::Supadditive, Property::Invariant] {
            assert!(r.passed(p), "{p}");
        }
    }

    #[test]
    fn truncation_keeps_subadditivity() {
        let base = Family::additive(Observable::NegHeavyTail { base: 4.0 });
        let r = classify(&Family::truncated(base, 4.0), &bern(), &cfg(1000)).unwrap();
        assert!(r.passed(Property::Subadditive) && r.passed(Property::Invariant));
    }

    #[test]
    fn local_derived_is_nonnegative_and_supadditive() {
        let seq = FolnerSeq::z_boxes(&z()).unwrap();
        let cert = standard_cert(&seq, &SeqIndex::Linear(3)).unwrap();
        let base = Family::AdditivePlus { observable: Observable::Indicator { symbol: 1 }, beta: 1.0, gamma: Concave::sqrt() };
        let local = LocalDerived::new(base, cert).unwrap();
        let r = classify_props(&local, &bern(), &cfg(400), &[Property::Nonnegative, Property::Supadditive, Property::Invariant]).unwrap();
        assert!(r.verdicts.values().all(Verdict::passed), "{r:?}");
    }

    #[test]
    fn certified_gate() {
        let fam = Family::MaxOfAdditives {
            first: Observable::Constant { value: 0.0 },
            second: Observable::SymbolValue { values: vec![1.0, -1.0] },
        };
        let err = CertifiedFamily::certify(fam, &bern(), &cfg(2000), &[Property::StronglySubadditive]);
        assert!(matches!(err, Err(LabError::GateRefused { .. })));
        let ok = CertifiedFamily::certify(Family::additive(Observable::Indicator { symbol: 0 }), &bern(), &cfg(200), &[]).unwrap();
        assert!(ok.require(&[Property::BiInvariant]).is_ok());
        assert!(ok.require(&[Property::Supadditive]).is_ok());
    }

    #[test]
    fn decomposition_examples() {
        let sys = bern();
        let fam = Family::AdditivePlus { observable: Observable::Indicator { symbol: 1 }, beta: 1.0, gamma: Concave::sqrt() };
        let e = FinSet::ints(&z(), 0..4).unwrap();
        let parts = vec![(1.0, FinSet::ints(&z(), [0, 1]).unwrap()), (1.0, FinSet::ints(&z(), [2, 3]).unwrap())];
        let r = indicator_decomposition_check(&fam, &sys, &e, &parts, 200, 1).unwrap();
        assert_eq!(r.violations, 0);

        let bad = vec![(1.0, FinSet::ints(&z(), [0, 1]).unwrap())];
        assert!(matches!(
            indicator_decomposition_check(&fam, &sys, &e, &bad, 10, 1),
            Err(LabError::IndicatorIdentity(_))
        ));

        let t = FinSet::ints(&z(), [0, 1]).unwrap();
        let (l, r) = translate_multiplicities(&t, &t).unwrap();
        assert_eq!(l, r);
        assert_eq!(l.values().copied().collect::<Vec<_>>(), vec![1, 2, 1]);

        let f = FinSet::ints(&z(), 0..10).unwrap();
        let parts = interior_decomposition(&f, &t).unwrap();
        let r = indicator_decomposition_check(&fam, &sys, &f, &parts, 200, 2).unwrap();
        assert_eq!(r.violations, 0);
    }

    #[test]
    fn closed_forms() {
        let sys = System::bernoulli(&z(), vec![0.5, 0.3, 0.2], 0).unwrap();
        let fam = Family::AdditivePlus { observable: Observable::Indicator { symbol: 1 }, beta: 2.0, gamma: Concave::sqrt() };
        assert!((fam.exact_normalized_mean(&sys, 4).unwrap() - (0.3 + 2.0 * 2.0 / 4.0)).abs() < 1e-15);
        assert_eq!(fam.exact_nu(&sys), Some(0.3));
        let m = Family::MaxOfAdditives {
            first: Observable::Indicator { symbol: 0 },
            second: Observable::SymbolValue { values: vec![0.0, 1.0, 0.5] },
        };
        assert_eq!(m.exact_nu(&sys), Some(0.5));
    }
}
