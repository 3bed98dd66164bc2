use folner_lab::ergodic::{
    birkhoff_check, ergodic_decomposition_check, kingman_run, limsup_identity_check, maximal_inequality_check,
    setfn_limit_strong, setfn_limit_tiling, Estimate, LimitStatus, LimsupMode,
};
use folner_lab::families::{CertifiedFamily, Counterexample, Property};
use folner_lab::folner::{generator_defects, tempelman_bound, tempered_check, Rational, SeqIndex};
use folner_lab::tiling::{composed_index, standard_cert};
use folner_lab::{FinSet, LabError, Result};
use serde::Serialize;
use serde_json::{json, Map, Value};

use crate::config::{ExperimentConfig, LimitMode};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Verdict {
    Pass,
    Inconclusive,
    Counterexample,
}

/// One CSV line. `n` is empty for statistics not tied to a schedule index.
#[derive(Clone, Debug, PartialEq)]
pub struct Row {
    pub n: Option<u64>,
    pub statistic: String,
    pub value: f64,
    pub stderr: Option<f64>,
}

#[derive(Debug, Default)]
pub struct Rows(pub Vec<Row>);

impl Rows {
    fn at(&mut self, n: u64, statistic: &str, value: f64) {
        self.0.push(Row { n: Some(n), statistic: statistic.into(), value, stderr: None });
    }

    fn est(&mut self, n: u64, statistic: &str, e: &Estimate) {
        self.0.push(Row { n: Some(n), statistic: statistic.into(), value: e.mean, stderr: Some(e.stderr) });
    }

    fn global(&mut self, statistic: &str, value: f64) {
        self.0.push(Row { n: None, statistic: statistic.into(), value, stderr: None });
    }
}

pub struct Outcome {
    pub verdict: Verdict,
    pub rows: Rows,
    /// Named distances between a statistic and its target.
    pub gaps: Map<String, Value>,
    pub report: Value,
}

fn ratio(r: &Rational) -> f64 {
    *r.numer() as f64 / *r.denom() as f64
}

fn flag(b: bool) -> f64 {
    if b {
        1.0
    } else {
        0.0
    }
}

fn pass_if(b: bool) -> Verdict {
    if b {
        Verdict::Pass
    } else {
        Verdict::Inconclusive
    }
}

fn to_value<T: Serialize>(t: &T) -> Value {
    serde_json::to_value(t).expect("reports serialize")
}

fn counterexample_outcome(c: &Counterexample, report: Value) -> Outcome {
    let mut rows = Rows::default();
    rows.global(&format!("{}_lhs", c.property), c.lhs);
    rows.global(&format!("{}_rhs", c.property), c.rhs);
    let mut gaps = Map::new();
    gaps.insert(c.property.to_string(), json!(c.lhs - c.rhs));
    Outcome { verdict: Verdict::Counterexample, rows, gaps, report: json!({ "classifier": report, "counterexample": c }) }
}

/// Certifies the configured family against `declared`; a failing draw ends
/// the run with that counterexample.
fn certify(cfg: &ExperimentConfig) -> Result<std::result::Result<CertifiedFamily, Outcome>> {
    let sys = cfg.system()?;
    match CertifiedFamily::try_certify(cfg.family()?, &sys, &cfg.classifier, &cfg.declared)? {
        Ok(cf) => Ok(Ok(cf)),
        Err(c) => Ok(Err(counterexample_outcome(&c, Value::Null))),
    }
}

macro_rules! certified {
    ($cfg:expr) => {
        match certify($cfg)? {
            Ok(cf) => cf,
            Err(outcome) => return Ok(outcome),
        }
    };
}

pub fn verify_folner(cfg: &ExperimentConfig) -> Result<Outcome> {
    let seq = cfg.sequence()?;
    let big_n = cfg.big_n.map_or_else(|| cfg.index(), Ok)?;
    let bound = tempelman_bound(&seq, big_n)?;
    let constant = cfg.constant.or_else(|| folner_lab::ergodic::default_constant(&seq));
    let cap = Rational::from_integer(constant.unwrap_or(u64::MAX));
    let tempered = tempered_check(&seq, big_n, cap)?;
    let gens = seq.group().generators(cfg.classifier.width);
    let mut rows = Rows::default();
    for (n, r) in &bound.ratios {
        rows.at(*n, "tempelman_ratio", ratio(r));
    }
    for (n, r) in &tempered.ratios {
        rows.at(n + 1, "tempered_ratio", ratio(r));
    }
    let mut defects = Vec::new();
    for n in 1..=big_n {
        let idx = SeqIndex::Linear(n);
        rows.at(n, "card", seq.card(&idx)? as f64);
        let d = generator_defects(&seq, &idx, &gens)?.into_iter().max().unwrap_or(Rational::from_integer(0));
        rows.at(n, "folner_defect", ratio(&d));
        defects.push(d);
    }
    let defect_decreasing = defects.windows(2).all(|w| w[1] <= w[0]);
    let mut gaps = Map::new();
    gaps.insert("tempelman_bound".into(), json!(ratio(&bound.bound)));
    let verdict = match constant {
        Some(m) => {
            gaps.insert("constant".into(), json!(m));
            pass_if(bound.bound <= Rational::from_integer(m) && defect_decreasing)
        }
        None => Verdict::Inconclusive,
    };
    let report = json!({
        "tempelman": bound,
        "tempered": tempered,
        "constant": constant,
        "defect_non_increasing": defect_decreasing,
    });
    Ok(Outcome { verdict, rows, gaps, report })
}

pub fn verify_tiling(cfg: &ExperimentConfig) -> Result<Outcome> {
    let seq = cfg.sequence()?;
    let schedule = cfg.schedule()?;
    let r = cfg.window_radius;
    let window = FinSet::new(seq.group(), seq.group().window(-r, r, cfg.classifier.width))?;
    let mut rows = Rows::default();
    let mut failures = Vec::new();
    let mut certs = Vec::new();
    for &n in schedule {
        let idx = SeqIndex::Linear(n);
        let cert = standard_cert(&seq, &idx).map_err(|e| LabError::GateRefused {
            hypothesis: "tiling".into(),
            detail: format!("F_{n}: {e}"),
        })?;
        let cover = cert.tiles_window(&window)?;
        rows.at(n, "tile_card", cert.tile.len() as f64);
        rows.at(n, "window_gaps", cover.gaps as f64);
        rows.at(n, "window_overlaps", cover.overlaps as f64);
        if !cover.exact() {
            failures.push(json!({ "n": n, "cover": cover }));
        }
        certs.push((n, cert));
    }
    let mut compositions = 0u64;
    for (m, cert) in certs.iter().filter(|(_, c)| c.iso.is_some()) {
        for &n in schedule {
            let target = match composed_index(&seq, &SeqIndex::Linear(*m), &SeqIndex::Linear(n)) {
                Ok(t) => t,
                Err(LabError::Unsupported(_)) => continue,
                Err(e) => return Err(e),
            };
            let composed = cert.compose(&seq.set(n)?)?;
            let expected = seq.generate(&target)?;
            compositions += 1;
            if composed != expected {
                failures.push(json!({ "m": m, "n": n, "target": target.to_string() }));
            }
        }
    }
    rows.global("compositions_checked", compositions as f64);
    rows.global("failures", failures.len() as f64);
    let mut gaps = Map::new();
    gaps.insert("failures".into(), json!(failures.len()));
    let verdict = if failures.is_empty() { Verdict::Pass } else { Verdict::Counterexample };
    let report = json!({ "window_points": window.len(), "compositions": compositions, "failures": failures });
    Ok(Outcome { verdict, rows, gaps, report })
}

pub fn check_family(cfg: &ExperimentConfig) -> Result<Outcome> {
    let sys = cfg.system()?;
    let family = cfg.family()?;
    family.validate()?;
    let report = folner_lab::families::classify(&family, &sys, &cfg.classifier)?;
    if let Some(c) = report.first_failure(&cfg.declared) {
        return Ok(counterexample_outcome(c, to_value(&report)));
    }
    let mut rows = Rows::default();
    for p in Property::ALL {
        rows.global(&p.to_string(), flag(report.passed(p)));
    }
    Ok(Outcome { verdict: Verdict::Pass, rows, gaps: Map::new(), report: to_value(&report) })
}

pub fn limit_setfn(cfg: &ExperimentConfig) -> Result<Outcome> {
    let f = cfg.set_function()?;
    let seq = cfg.sequence()?;
    let schedule = cfg.schedule()?;
    let tol = cfg.tolerances.limit;
    let limit = match cfg.limit_mode.unwrap_or(LimitMode::Tiling) {
        LimitMode::Tiling => setfn_limit_tiling(&f, &seq, schedule, &cfg.tiles(), &cfg.classifier, tol)?,
        LimitMode::Strong => setfn_limit_strong(&f, &seq, schedule, &cfg.finsets(), &cfg.classifier, tol)?,
    };
    let mut rows = Rows::default();
    for (n, v) in &limit.sequence {
        rows.at(*n, "normalized_value", *v);
    }
    rows.global("infimum", limit.inf);
    rows.global("infimum_card", limit.inf_card as f64);
    rows.global("gap", limit.gap);
    let mut gaps = Map::new();
    gaps.insert("limit_vs_infimum".into(), json!(limit.gap));
    let verdict = pass_if(limit.status == LimitStatus::Converged);
    Ok(Outcome { verdict, rows, gaps, report: to_value(&limit) })
}

pub fn converge(cfg: &ExperimentConfig) -> Result<Outcome> {
    let cf = certified!(cfg);
    let sys = cfg.system()?;
    let seq = cfg.sequence()?;
    let schedule = cfg.schedule()?;
    let tiles = cfg.tiles.clone();
    let r = kingman_run(&cf, &seq, &sys, schedule, &cfg.run_options(), tiles.as_ref())?;
    let mut rows = Rows::default();
    for (k, &n) in schedule.iter().enumerate() {
        rows.est(n, "mean", &r.means[k]);
        if let Some(l1) = &r.l1 {
            rows.at(n, "l1", l1[k]);
        }
    }
    if let Some(ladder) = &r.ladder {
        for (level, row) in ladder.levels.iter().zip(&ladder.estimates) {
            for (k, &n) in schedule.iter().enumerate() {
                rows.est(n, &format!("truncated_{level}"), &row[k]);
            }
        }
    }
    rows.global("cauchy_fraction", r.cauchy_fraction);
    if let Some(f) = r.terminal_fraction {
        rows.global("terminal_fraction", f);
    }
    let mut gaps = Map::new();
    if let Some(nu) = r.nu_exact {
        gaps.insert("terminal_vs_nu".into(), json!((r.terminal.mean - nu).abs()));
    }
    if let Some(t) = &r.tile_infimum {
        gaps.insert("terminal_vs_tile_infimum".into(), json!(t.gap));
    }
    if let Some(c) = r.gates.condition_b.last() {
        gaps.insert("condition_b".into(), json!(ratio(&c.gap)));
    }
    Ok(Outcome { verdict: pass_if(r.pass), rows, gaps, report: to_value(&r) })
}

pub fn limsup(cfg: &ExperimentConfig) -> Result<Outcome> {
    let cf = certified!(cfg);
    let sys = cfg.system()?;
    let seq = cfg.sequence()?;
    let schedule = cfg.schedule()?;
    let mode = cfg.limsup_mode.unwrap_or(LimsupMode::StronglySubadditive);
    let r = limsup_identity_check(&cf, &seq, &sys, mode, schedule, &cfg.run_options(), &cfg.tiles(), &cfg.finsets())?;
    let mut rows = Rows::default();
    rows.0.push(Row { n: None, statistic: "limsup".into(), value: r.limsup.mean, stderr: Some(r.limsup.stderr) });
    for (i, inf) in r.infima.iter().enumerate() {
        rows.global(&format!("infimum_{i}"), inf.inf);
    }
    rows.global("pointwise_fraction", r.pointwise_fraction);
    rows.global("nu", r.nu);
    let mut gaps = Map::new();
    gaps.insert("limsup_vs_nu".into(), json!((r.limsup.mean - r.nu).abs()));
    Ok(Outcome { verdict: pass_if(r.pass), rows, gaps, report: to_value(&r) })
}

pub fn maximal(cfg: &ExperimentConfig) -> Result<Outcome> {
    let cf = certified!(cfg);
    let sys = cfg.system()?;
    let seq = cfg.sequence()?;
    let alpha = cfg.alpha.ok_or_else(|| LabError::Config("missing field `alpha`".into()))?;
    let big_n = cfg.big_n.ok_or_else(|| LabError::Config("missing field `N`".into()))?;
    let n = cfg.n.unwrap_or(big_n);
    let r = maximal_inequality_check(&cf, &seq, &sys, alpha, big_n, n, &cfg.run_options())?;
    let mut rows = Rows::default();
    rows.0.push(Row { n: Some(big_n), statistic: "mass".into(), value: r.empirical_mass, stderr: Some(r.mass_stderr) });
    rows.0.push(Row { n: Some(big_n), statistic: "nu".into(), value: r.nu, stderr: Some(r.nu_stderr) });
    rows.at(big_n, "bound", r.bound);
    let mut gaps = Map::new();
    gaps.insert("bound_minus_mass".into(), json!(r.bound - r.empirical_mass));
    Ok(Outcome { verdict: pass_if(r.pass), rows, gaps, report: to_value(&r) })
}

pub fn decompose(cfg: &ExperimentConfig) -> Result<Outcome> {
    let cf = certified!(cfg);
    let sys = cfg.system()?;
    let seq = cfg.sequence()?;
    let n = cfg.index()?;
    let r = ergodic_decomposition_check(&cf, &sys, &seq, n, &cfg.run_options())?;
    let mut rows = Rows::default();
    rows.est(n, "mixture", &r.mixture);
    for (i, (w, e)) in r.components.iter().enumerate() {
        rows.est(n, &format!("component_{i}"), e);
        rows.at(n, &format!("weight_{i}"), *w);
    }
    rows.0.push(Row { n: Some(n), statistic: "combined".into(), value: r.combined, stderr: Some(r.combined_stderr) });
    let mut gaps = Map::new();
    gaps.insert("mixture_vs_combined".into(), json!((r.mixture.mean - r.combined).abs()));
    Ok(Outcome { verdict: pass_if(r.pass), rows, gaps, report: to_value(&r) })
}

pub fn birkhoff(cfg: &ExperimentConfig) -> Result<Outcome> {
    let sys = cfg.system()?;
    let seq = cfg.sequence()?;
    let schedule = cfg.schedule()?;
    let r = birkhoff_check(&cfg.observable()?, &seq, &sys, schedule, &cfg.run_options())?;
    let mut rows = Rows::default();
    for (k, &n) in schedule.iter().enumerate() {
        rows.est(n, "mean", &r.means[k]);
        rows.at(n, "l1", r.l1[k]);
    }
    rows.global("terminal_pass_fraction", r.terminal_pass_fraction);
    let mut gaps = Map::new();
    gaps.insert("terminal_l1".into(), json!(r.l1.last().copied()));
    Ok(Outcome { verdict: pass_if(r.pass), rows, gaps, report: to_value(&r) })
}
