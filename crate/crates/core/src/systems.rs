//! Measure-preserving systems evaluated pointwise.
//!
//! A Bernoulli point is a hash key plus an offset: the symbol at `h` is a
//! function of `(key, h·offset)`, and `g` acts by multiplying the offset. The
//! configuration is never stored, so `f(g·y)` costs one hash.

use rand::{Rng, RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{LabError, Result};
use crate::group::{Elem, Group};

/// Label of the point hash, written into every output.
pub const HASH_VERSION: &str = "splitmix64-fold-v1";

const GOLDEN: u64 = 0x9E37_79B9_7F4A_7C15;
const TAIL_SALT: u64 = 0xD1B5_4A32_D192_ED03;
const COORD_SALT: u64 = 0x8CB9_2BA7_2F3D_8DD7;

/// The SplitMix64 finalizer.
pub fn mix64(mut z: u64) -> u64 {
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Hash of a key and a group element, folded over its nonzero coordinates.
pub fn point_hash(key: u64, h: &Elem) -> u64 {
    let acc = h
        .coords()
        .iter()
        .enumerate()
        .filter(|(_, &c)| c != 0)
        .fold(key, |acc, (i, &c)| {
            let cell = mix64((i as u64).wrapping_mul(GOLDEN) ^ mix64(c as u64 ^ COORD_SALT));
            mix64(acc.wrapping_add(cell))
        });
    mix64(acc ^ GOLDEN)
}

/// Independent, schedule-free random stream for sample `index`.
pub fn substream(seed: u64, index: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(mix64(seed ^ mix64(index.wrapping_add(GOLDEN))))
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct WeightedSpec {
    pub weight: f64,
    pub system: SystemSpec,
}

/// JSON form of a system.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum SystemSpec {
    Bernoulli {
        probs: Vec<f64>,
        #[serde(default)]
        group: Option<Group>,
        #[serde(default)]
        seed: u64,
    },
    TorusRotation {
        alpha: Vec<f64>,
        #[serde(default)]
        group: Option<Group>,
        #[serde(default)]
        seed: u64,
    },
    Mixture {
        components: Vec<WeightedSpec>,
        #[serde(default)]
        group: Option<Group>,
        #[serde(default)]
        seed: u64,
    },
}

#[derive(Clone, Debug, PartialEq)]
enum Kind {
    Bernoulli { probs: Vec<f64>, thresholds: Vec<u64> },
    Torus { alpha: Vec<u64> },
    Mixture { weights: Vec<f64>, components: Vec<System> },
}

/// A measure-preserving action of a supported group.
#[derive(Clone, Debug, PartialEq)]
pub struct System {
    group: Group,
    seed: u64,
    kind: Kind,
}

/// A sampled point.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum Point {
    Shift { key: u64, offset: Elem },
    /// Coordinates in units of 2⁻⁶⁴.
    Torus { coords: Vec<u64> },
    Mixture { component: usize, inner: Box<Point> },
}

fn unit_to_fixed(x: f64) -> u64 {
    (x * 18_446_744_073_709_551_616.0) as u64
}

fn fixed_to_unit(x: u64) -> f64 {
    x as f64 / 18_446_744_073_709_551_616.0
}

fn check_distribution(p: &[f64], what: &str) -> Result<()> {
    if p.is_empty() || p.iter().any(|&x| !(x >= 0.0) || !x.is_finite()) {
        return Err(LabError::Config(format!("{what} must be non-negative and finite")));
    }
    let s: f64 = p.iter().sum();
    if (s - 1.0).abs() > 1e-9 {
        return Err(LabError::Config(format!("{what} sum to {s}, not 1")));
    }
    Ok(())
}

impl System {
    pub fn bernoulli(group: &Group, probs: Vec<f64>, seed: u64) -> Result<Self> {
        check_distribution(&probs, "probabilities")?;
        let mut acc = 0.0;
        let mut thresholds: Vec<u64> = probs
            .iter()
            .map(|p| {
                acc += p;
                if acc >= 1.0 {
                    u64::MAX
                } else {
                    unit_to_fixed(acc)
                }
            })
            .collect();
        *thresholds.last_mut().unwrap() = u64::MAX;
        Ok(System { group: group.clone(), seed, kind: Kind::Bernoulli { probs, thresholds } })
    }

    pub fn torus(group: &Group, alpha: Vec<f64>, seed: u64) -> Result<Self> {
        if group.dim() != Some(alpha.len()) {
            return Err(LabError::Config(format!("torus rotation needs one frequency per axis of {group}")));
        }
        if alpha.iter().any(|&a| !(a > 0.0 && a < 1.0)) {
            return Err(LabError::Config("frequencies must lie in (0, 1)".into()));
        }
        Ok(System { group: group.clone(), seed, kind: Kind::Torus { alpha: alpha.into_iter().map(unit_to_fixed).collect() } })
    }

    pub fn mixture(components: Vec<(f64, System)>, seed: u64) -> Result<Self> {
        let weights: Vec<f64> = components.iter().map(|c| c.0).collect();
        check_distribution(&weights, "mixture weights")?;
        let group = components[0].1.group.clone();
        if components.iter().any(|c| c.1.group != group) {
            return Err(LabError::GroupMismatch("mixture components act on different groups".into()));
        }
        let components = components.into_iter().map(|c| c.1).collect();
        Ok(System { group, seed, kind: Kind::Mixture { weights, components } })
    }

    pub fn from_spec(spec: &SystemSpec, default_group: Option<&Group>) -> Result<Self> {
        let pick = |g: &Option<Group>| {
            g.clone()
                .or_else(|| default_group.cloned())
                .ok_or_else(|| LabError::Config("system has no group".into()))
        };
        match spec {
            SystemSpec::Bernoulli { probs, group, seed } => Self::bernoulli(&pick(group)?, probs.clone(), *seed),
            SystemSpec::TorusRotation { alpha, group, seed } => Self::torus(&pick(group)?, alpha.clone(), *seed),
            SystemSpec::Mixture { components, group, seed } => {
                if components.is_empty() {
                    return Err(LabError::Config("empty mixture".into()));
                }
                let g = pick(group)?;
                let comps = components
                    .iter()
                    .map(|c| Ok((c.weight, Self::from_spec(&c.system, Some(&g))?)))
                    .collect::<Result<Vec<_>>>()?;
                Self::mixture(comps, *seed)
            }
        }
    }

    pub fn group(&self) -> &Group {
        &self.group
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn alphabet(&self) -> Option<usize> {
        match &self.kind {
            Kind::Bernoulli { probs, .. } => Some(probs.len()),
            _ => None,
        }
    }

    /// Number of ergodic components (1 for the ergodic kinds).
    pub fn components(&self) -> usize {
        match &self.kind {
            Kind::Mixture { components, .. } => components.len(),
            _ => 1,
        }
    }

    pub fn component(&self, i: usize) -> Option<&System> {
        match &self.kind {
            Kind::Mixture { components, .. } => components.get(i),
            _ => (i == 0).then_some(self),
        }
    }

    pub fn weights(&self) -> Vec<f64> {
        match &self.kind {
            Kind::Mixture { weights, .. } => weights.clone(),
            _ => vec![1.0],
        }
    }

    pub fn is_mixture(&self) -> bool {
        matches!(self.kind, Kind::Mixture { .. })
    }

    pub fn sample_point(&self, rng: &mut impl RngCore) -> Point {
        match &self.kind {
            Kind::Bernoulli { .. } => Point::Shift { key: mix64(self.seed ^ rng.next_u64()), offset: self.group.identity() },
            Kind::Torus { alpha } => Point::Torus { coords: alpha.iter().map(|_| rng.next_u64()).collect() },
            Kind::Mixture { weights, components } => {
                let u: f64 = rng.gen();
                let mut acc = 0.0;
                let mut component = weights.len() - 1;
                for (i, w) in weights.iter().enumerate() {
                    acc += w;
                    if u < acc {
                        component = i;
                        break;
                    }
                }
                Point::Mixture { component, inner: Box::new(components[component].sample_point(rng)) }
            }
        }
    }

    /// The `index`-th point of the stream determined by `seed`.
    pub fn sample(&self, seed: u64, index: u64) -> Point {
        self.sample_point(&mut substream(seed, index))
    }

    fn check_point(&self, y: &Point) -> Result<()> {
        let ok = match (&self.kind, y) {
            (Kind::Bernoulli { .. }, Point::Shift { offset, .. }) => self.group.contains(offset),
            (Kind::Torus { alpha }, Point::Torus { coords }) => coords.len() == alpha.len(),
            (Kind::Mixture { components, .. }, Point::Mixture { component, .. }) => *component < components.len(),
            _ => false,
        };
        if ok {
            Ok(())
        } else {
            Err(LabError::GroupMismatch("point does not belong to this system".into()))
        }
    }

    /// `g·y`.
    pub fn apply(&self, g: &Elem, y: &Point) -> Result<Point> {
        if !self.group.contains(g) {
            return Err(LabError::GroupMismatch(format!("{g:?} is not an element of {}", self.group)));
        }
        self.check_point(y)?;
        Ok(self.apply_unchecked(g, y))
    }

    pub(crate) fn apply_unchecked(&self, g: &Elem, y: &Point) -> Point {
        match (&self.kind, y) {
            (Kind::Bernoulli { .. }, Point::Shift { key, offset }) => {
                Point::Shift { key: *key, offset: self.group.mul_unchecked(g, offset) }
            }
            (Kind::Torus { alpha }, Point::Torus { coords }) => Point::Torus {
                coords: coords
                    .iter()
                    .zip(alpha)
                    .enumerate()
                    .map(|(i, (&x, &a))| x.wrapping_add((g.coord(i) as u64).wrapping_mul(a)))
                    .collect(),
            },
            (Kind::Mixture { components, .. }, Point::Mixture { component, inner }) => Point::Mixture {
                component: *component,
                inner: Box::new(components[*component].apply_unchecked(g, inner)),
            },
            _ => unreachable!("point checked against system"),
        }
    }

    /// Symbol at `h` of a Bernoulli point.
    pub fn symbol_at(&self, h: &Elem, y: &Point) -> Option<usize> {
        match (&self.kind, y) {
            (Kind::Bernoulli { thresholds, .. }, Point::Shift { key, offset }) => {
                let u = point_hash(*key, &self.group.mul_unchecked(h, offset));
                Some(thresholds.iter().position(|&t| u < t).unwrap_or(thresholds.len() - 1))
            }
            (Kind::Mixture { components, .. }, Point::Mixture { component, inner }) => {
                components[*component].symbol_at(h, inner)
            }
            _ => None,
        }
    }

    /// The geometric variable at the base point: trailing ones of a salted hash.
    fn tail_level(&self, y: &Point) -> Option<u32> {
        match y {
            Point::Shift { key, offset } => Some(point_hash(*key ^ TAIL_SALT, offset).trailing_ones()),
            Point::Mixture { component, inner } => self.component(*component)?.tail_level(inner),
            Point::Torus { .. } => None,
        }
    }

    fn torus_coord(y: &Point, i: usize) -> Option<f64> {
        match y {
            Point::Torus { coords } => coords.get(i).map(|&c| fixed_to_unit(c)),
            Point::Mixture { inner, .. } => Self::torus_coord(inner, i),
            _ => None,
        }
    }

    /// `f(y)`.
    pub fn eval(&self, obs: &Observable, y: &Point) -> Result<f64> {
        let unsupported = || LabError::Unsupported(format!("{} on this system", obs.name()));
        match obs {
            Observable::Indicator { symbol } => {
                let s = self.symbol_at(&self.group.identity(), y).ok_or_else(unsupported)?;
                Ok(if s == *symbol { 1.0 } else { 0.0 })
            }
            Observable::SymbolValue { values } => {
                let s = self.symbol_at(&self.group.identity(), y).ok_or_else(unsupported)?;
                values.get(s).copied().ok_or_else(|| LabError::Config(format!("no value for symbol {s}")))
            }
            Observable::Coordinate { index } => Self::torus_coord(y, *index).ok_or_else(unsupported),
            Observable::NegHeavyTail { base } => {
                let level = self.tail_level(y).ok_or_else(unsupported)?;
                Ok(-base.powi(level as i32))
            }
            Observable::Constant { value } => Ok(*value),
            Observable::MaxOf { terms } => terms
                .iter()
                .map(|t| self.eval(t, y))
                .try_fold(f64::NEG_INFINITY, |m, v| v.map(|v| m.max(v))),
        }
    }

    /// `f(g·y)` without building the moved point for shift points.
    pub fn eval_at(&self, obs: &Observable, y: &Point, g: &Elem) -> Result<f64> {
        match y {
            Point::Shift { key, offset } => {
                let moved = Point::Shift { key: *key, offset: self.group.mul_unchecked(g, offset) };
                self.eval(obs, &moved)
            }
            _ => self.eval(obs, &self.apply_unchecked(g, y)),
        }
    }

    /// Values of `obs` as a function of the symbol at the base point.
    fn symbol_table(obs: &Observable, alphabet: usize) -> Option<Vec<f64>> {
        match obs {
            Observable::Indicator { symbol } => Some((0..alphabet).map(|s| if s == *symbol { 1.0 } else { 0.0 }).collect()),
            Observable::SymbolValue { values } if values.len() >= alphabet => Some(values[..alphabet].to_vec()),
            Observable::Constant { value } => Some(vec![*value; alphabet]),
            Observable::MaxOf { terms } => {
                let tables = terms.iter().map(|t| Self::symbol_table(t, alphabet)).collect::<Option<Vec<_>>>()?;
                Some((0..alphabet).map(|s| tables.iter().map(|t| t[s]).fold(f64::NEG_INFINITY, f64::max)).collect())
            }
            _ => None,
        }
    }

    /// Closed-form `∫ f dν` when available. The heavy-tail observable uses the
    /// ideal geometric law `P(G = k) = 2^{-(k+1)}`.
    pub fn expectation(&self, obs: &Observable) -> Option<f64> {
        match (&self.kind, obs) {
            (_, Observable::Constant { value }) => Some(*value),
            (Kind::Bernoulli { .. }, Observable::NegHeavyTail { base }) => {
                if *base >= 2.0 {
                    Some(f64::NEG_INFINITY)
                } else {
                    Some(-1.0 / (2.0 - base))
                }
            }
            (Kind::Bernoulli { probs, .. }, _) => {
                let table = Self::symbol_table(obs, probs.len())?;
                Some(probs.iter().zip(&table).map(|(p, v)| p * v).sum())
            }
            (Kind::Torus { alpha }, Observable::Coordinate { index }) if *index < alpha.len() => Some(0.5),
            (Kind::Mixture { weights, components }, _) => {
                let parts = components.iter().map(|c| c.expectation(obs)).collect::<Option<Vec<_>>>()?;
                Some(weights.iter().zip(parts).map(|(w, e)| w * e).sum())
            }
            _ => None,
        }
    }

    /// Closed form for `E max_{h∈F} f(h·y)` under an i.i.d. finite alphabet:
    /// `Σ_v v·(P(f ≤ v)^n − P(f < v)^n)`.
    pub fn expected_max(&self, obs: &Observable, n: u64) -> Option<f64> {
        match &self.kind {
            Kind::Bernoulli { probs, .. } => {
                let table = Self::symbol_table(obs, probs.len())?;
                let mut values: Vec<f64> = table.clone();
                values.sort_by(f64::total_cmp);
                values.dedup();
                let cdf = |v: f64, strict: bool| -> f64 {
                    probs
                        .iter()
                        .zip(&table)
                        .filter(|(_, &t)| if strict { t < v } else { t <= v })
                        .map(|(p, _)| p)
                        .sum()
                };
                let n = n as i32;
                Some(values.iter().map(|&v| v * (cdf(v, false).powi(n) - cdf(v, true).powi(n))).sum())
            }
            Kind::Mixture { weights, components } => {
                let parts = components.iter().map(|c| c.expected_max(obs, n)).collect::<Option<Vec<_>>>()?;
                Some(weights.iter().zip(parts).map(|(w, e)| w * e).sum())
            }
            _ => None,
        }
    }

    /// `𝔼(f|𝓘)` as one value per ergodic component.
    pub fn conditional_expectation(&self, obs: &Observable, mc_samples: u64, seed: u64) -> Result<Vec<ExpectationValue>> {
        (0..self.components())
            .map(|i| {
                let c = self.component(i).unwrap();
                if c.is_mixture() {
                    return Err(LabError::Unsupported("nested mixtures".into()));
                }
                match c.expectation(obs) {
                    Some(mean) => Ok(ExpectationValue { mean, stderr: 0.0, exact: true }),
                    None => c.monte_carlo(obs, mc_samples, seed),
                }
            })
            .collect()
    }

    fn monte_carlo(&self, obs: &Observable, n: u64, seed: u64) -> Result<ExpectationValue> {
        if n < 2 {
            return Err(LabError::Config("Monte Carlo needs at least 2 samples".into()));
        }
        let values = (0..n).map(|i| self.eval(obs, &self.sample(seed, i))).collect::<Result<Vec<_>>>()?;
        let (mean, stderr) = crate::ergodic::mean_stderr(&values);
        Ok(ExpectationValue { mean, stderr, exact: false })
    }

    /// Component index of `y` (0 for ergodic systems).
    pub fn component_of(y: &Point) -> usize {
        match y {
            Point::Mixture { component, .. } => *component,
            _ => 0,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct ExpectationValue {
    pub mean: f64,
    pub stderr: f64,
    pub exact: bool,
}

/// A real function on points.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Observable {
    /// `1[symbol at e = symbol]`.
    Indicator { symbol: usize },
    /// `values[symbol at e]`.
    SymbolValue { values: Vec<f64> },
    /// Torus coordinate.
    Coordinate { index: usize },
    /// `−base^G` with `G` geometric, `P(G ≥ k) = 2^{-k}`.
    NegHeavyTail { base: f64 },
    Constant { value: f64 },
    MaxOf { terms: Vec<Observable> },
}

impl Observable {
    pub fn name(&self) -> &'static str {
        match self {
            Observable::Indicator { .. } => "indicator",
            Observable::SymbolValue { .. } => "symbol_value",
            Observable::Coordinate { .. } => "coordinate",
            Observable::NegHeavyTail { .. } => "neg_heavy_tail",
            Observable::Constant { .. } => "constant",
            Observable::MaxOf { .. } => "max_of",
        }
    }

    /// Declared bound on `|f|`.
    pub fn bound(&self) -> Option<f64> {
        match self {
            Observable::Indicator { .. } | Observable::Coordinate { .. } => Some(1.0),
            Observable::SymbolValue { values } => values.iter().map(|v| v.abs()).reduce(f64::max),
            Observable::Constant { value } => Some(value.abs()),
            Observable::NegHeavyTail { .. } => None,
            Observable::MaxOf { terms } => terms.iter().map(Observable::bound).try_fold(0.0, |m: f64, b| b.map(|b| m.max(b))),
        }
    }

    pub fn is_nonnegative(&self) -> bool {
        match self {
            Observable::Indicator { .. } | Observable::Coordinate { .. } => true,
            Observable::SymbolValue { values } => values.iter().all(|&v| v >= 0.0),
            Observable::Constant { value } => *value >= 0.0,
            Observable::NegHeavyTail { .. } => false,
            Observable::MaxOf { terms } => terms.iter().any(Observable::is_nonnegative),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn z() -> Group {
        Group::z()
    }

    fn within(mean: f64, target: f64, sd: f64, n: f64) -> bool {
        (mean - target).abs() <= 4.0 * sd / n.sqrt()
    }

    #[test]
    fn bernoulli_symbol_frequencies() {
        let sys = System::bernoulli(&z(), vec![0.5, 0.5], 7).unwrap();
        let y = sys.sample(1, 0);
        let ones = (0..1000)
            .filter(|&h| sys.symbol_at(&z().elem(&[h]).unwrap(), &y) == Some(1))
            .count() as f64;
        assert!(within(ones / 1000.0, 0.5, 0.5, 1000.0));
    }

    #[test]
    fn mixture_component_frequencies() {
        let b = |p: f64| System::bernoulli(&z(), vec![1.0 - p, p], 3).unwrap();
        let sys = System::mixture(vec![(0.5, b(0.25)), (0.5, b(0.75))], 3).unwrap();
        let n = 4000;
        let first = (0..n).filter(|&i| System::component_of(&sys.sample(9, i)) == 0).count() as f64;
        assert!(within(first / n as f64, 0.5, 0.5, n as f64));
    }

    #[test]
    fn torus_coordinates_are_uniform() {
        let sys = System::torus(&z(), vec![std::f64::consts::SQRT_2 - 1.0], 0).unwrap();
        let n = 4000;
        let f = Observable::Coordinate { index: 0 };
        let mean = (0..n).map(|i| sys.eval(&f, &sys.sample(5, i)).unwrap()).sum::<f64>() / n as f64;
        assert!(within(mean, 0.5, (1.0f64 / 12.0).sqrt(), n as f64));
    }

    #[test]
    fn action_examples() {
        let alpha = std::f64::consts::SQRT_2 - 1.0;
        let sys = System::torus(&z(), vec![alpha], 0).unwrap();
        let y = sys.sample(2, 0);
        let f = Observable::Coordinate { index: 0 };
        let moved = sys.apply(&z().elem(&[2]).unwrap(), &y).unwrap();
        let expect = (sys.eval(&f, &y).unwrap() + 2.0 * alpha).fract();
        assert!((sys.eval(&f, &moved).unwrap() - expect).abs() < 1e-12);
        assert_eq!(sys.apply(&z().identity(), &y).unwrap(), y);

        let b = System::bernoulli(&z(), vec![0.3, 0.7], 1).unwrap();
        let y = b.sample(0, 0);
        let g = z().elem(&[5]).unwrap();
        let gy = b.apply(&g, &y).unwrap();
        for h in -10..10 {
            let h = z().elem(&[h]).unwrap();
            assert_eq!(b.symbol_at(&h, &gy), b.symbol_at(&z().mul(&h, &g).unwrap(), &y));
        }
        assert_eq!(b.apply(&z().identity(), &y).unwrap(), y);
        let bad = Group::z_power(2).unwrap().identity();
        assert!(b.apply(&bad, &y).is_err());
    }

    #[test]
    fn conditional_expectation_examples() {
        let half = System::bernoulli(&z(), vec![0.5, 0.5], 0).unwrap();
        let f = Observable::Indicator { symbol: 1 };
        assert_eq!(half.conditional_expectation(&f, 100, 0).unwrap()[0].mean, 0.5);

        let b = |p: f64| System::bernoulli(&z(), vec![1.0 - p, p], 0).unwrap();
        let mix = System::mixture(vec![(0.5, b(0.25)), (0.5, b(0.75))], 0).unwrap();
        let ce: Vec<f64> = mix.conditional_expectation(&f, 100, 0).unwrap().iter().map(|e| e.mean).collect();
        assert_eq!(ce, vec![0.25, 0.75]);

        let torus = System::torus(&z(), vec![0.3819660112501051], 0).unwrap();
        let ce = torus.conditional_expectation(&Observable::Coordinate { index: 0 }, 100, 0).unwrap();
        assert_eq!(ce[0].mean, 0.5);
    }

    #[test]
    fn monte_carlo_fallback_matches_closed_form() {
        let sys = System::bernoulli(&z(), vec![0.5, 0.5], 0).unwrap();
        let f = Observable::NegHeavyTail { base: 1.5 };
        let mc = sys.monte_carlo(&f, 200_000, 11).unwrap();
        assert!((mc.mean - sys.expectation(&f).unwrap()).abs() <= 4.0 * mc.stderr);
        assert_eq!(sys.expectation(&Observable::NegHeavyTail { base: 2.0 }), Some(f64::NEG_INFINITY));
    }

    #[test]
    fn expected_max_matches_simulation() {
        let sys = System::bernoulli(&z(), vec![0.5, 0.3, 0.2], 4).unwrap();
        let f = Observable::SymbolValue { values: vec![0.0, 1.0, 0.5] };
        let n = 3u64;
        let exact = sys.expected_max(&f, n).unwrap();
        let m = 20_000;
        let sims: Vec<f64> = (0..m)
            .map(|i| {
                let y = sys.sample(8, i);
                (0..n as i64).map(|h| sys.eval_at(&f, &y, &z().elem(&[h]).unwrap()).unwrap()).fold(f64::MIN, f64::max)
            })
            .collect();
        let (mean, se) = crate::ergodic::mean_stderr(&sims);
        assert!((mean - exact).abs() <= 4.0 * se);
    }

    #[test]
    fn spec_parsing_and_validation() {
        let s: SystemSpec = serde_json::from_str(
            r#"{"kind":"bernoulli","probs":[0.5,0.5],"group":{"kind":"z_power","d":2},"seed":12345}"#,
        )
        .unwrap();
        let sys = System::from_spec(&s, None).unwrap();
        assert_eq!(sys.group(), &Group::z_power(2).unwrap());
        assert!(System::bernoulli(&z(), vec![0.5, 0.6], 0).is_err());
        let m: SystemSpec = serde_json::from_str(
            r#"{"kind":"mixture","components":[{"weight":0.7,"system":{"kind":"bernoulli","probs":[1.0]}},
                {"weight":0.2,"system":{"kind":"bernoulli","probs":[1.0]}}]}"#,
        )
        .unwrap();
        assert!(System::from_spec(&m, Some(&z())).is_err());
    }
}
