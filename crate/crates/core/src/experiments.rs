//! Experiment harness: model dispatch, analytic-vs-simulation comparison,
//! parameter sweeps and the figure presets.
//!
//! Sweep CSV schema (header row, one row per grid point and source):
//!
//! ```text
//! model,lambda,mu,service,K,p_C,p_I,p_M,E_sigma_C,E_sigma_I,E_sigma_M,E_sigma_total,
//! source,stderr_p_C,stderr_p_I,stderr_p_M,stderr_sigma_C,stderr_sigma_I,stderr_sigma_M,
//! stderr_sigma_total,note
//! ```
//!
//! `source` is `analytic` or `sim`. Empty cells mean "not available":
//! stderr columns on analytic rows, `E_sigma_M`/`E_sigma_total` where no
//! closed form exists, and every metric on warning rows (`note` nonempty).
//! Floats carry 12 significant digits.

use std::fmt;
use std::io::{Read, Write};
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{PudError, Result};
use crate::mg1::Mg1Config;
use crate::mg11::Mg11Config;
use crate::mm1k::Mm1kConfig;
use crate::report::{round_sig, AnalyticReport};
use crate::service::ServiceDistribution;
use crate::sim::{self, Capacity, MetricsSummary, StandardPenalty, SystemConfig};

pub const DEFAULT_PACKETS: u64 = 1_000_000;
pub const DEFAULT_BATCHES: u32 = 100;
pub const DEFAULT_SEED: u64 = 1;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Model {
    Mg1,
    Mg11,
    Mm1k,
}

impl fmt::Display for Model {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Model::Mg1 => "mg1",
            Model::Mg11 => "mg11",
            Model::Mm1k => "mm1k",
        })
    }
}

impl FromStr for Model {
    type Err = PudError;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "mg1" => Ok(Model::Mg1),
            "mg11" => Ok(Model::Mg11),
            "mm1k" => Ok(Model::Mm1k),
            _ => Err(PudError::Parse { input: s.into(), reason: "expected mg1, mg11 or mm1k".into() }),
        }
    }
}

/// Raw, unvalidated model parameters as they come off the command line.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ModelParams {
    pub model: Model,
    pub lambda: f64,
    pub mu: Option<f64>,
    pub service: Option<ServiceDistribution>,
    pub k: Option<u32>,
}

/// A validated model: arrival rate, service law and (for mm1k) capacity.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ModelSpec {
    pub model: Model,
    pub lambda: f64,
    pub service: ServiceDistribution,
    pub k: Option<u32>,
}

impl ModelParams {
    pub fn new(model: Model, lambda: f64) -> Self {
        Self { model, lambda, mu: None, service: None, k: None }
    }

    pub fn mu(mut self, mu: f64) -> Self {
        self.mu = Some(mu);
        self
    }

    pub fn service(mut self, service: ServiceDistribution) -> Self {
        self.service = Some(service);
        self
    }

    pub fn k(mut self, k: u32) -> Self {
        self.k = Some(k);
        self
    }

    pub fn resolve(&self) -> Result<ModelSpec> {
        let service = match (self.service, self.mu) {
            (Some(_), Some(_)) => {
                return Err(PudError::InvalidParameter("give either --mu or --service, not both".into()))
            }
            (Some(s), None) => s,
            (None, Some(mu)) => ServiceDistribution::exponential(mu)?,
            (None, None) => {
                return Err(PudError::InvalidParameter("a service law (--mu or --service) is required".into()))
            }
        };
        service.validate()?;
        let k = match self.model {
            Model::Mm1k => {
                if !matches!(service, ServiceDistribution::Exponential { .. }) {
                    return Err(PudError::InvalidParameter("mm1k requires exponential service".into()));
                }
                Some(self.k.ok_or_else(|| PudError::InvalidParameter("mm1k requires --k".into()))?)
            }
            _ if self.k.is_some() => {
                return Err(PudError::InvalidParameter(format!("--k does not apply to {}", self.model)))
            }
            _ => None,
        };
        let spec = ModelSpec { model: self.model, lambda: self.lambda, service, k };
        spec.system()?;
        Ok(spec)
    }
}

impl ModelSpec {
    /// Exponential service rate, when the service is exponential.
    pub fn mu(&self) -> Option<f64> {
        match self.service {
            ServiceDistribution::Exponential { rate } => Some(rate),
            _ => None,
        }
    }

    /// The matching simulator configuration.
    pub fn system(&self) -> Result<SystemConfig> {
        let capacity = match self.model {
            Model::Mg1 => Capacity::Infinite,
            Model::Mg11 => Capacity::Buffers(0),
            Model::Mm1k => {
                let k = self.k.unwrap_or(0);
                if k == 0 {
                    return Err(PudError::InvalidParameter("K must be at least 1".into()));
                }
                Capacity::Buffers(k - 1)
            }
        };
        SystemConfig::new(self.lambda, self.service, capacity)
    }

    pub fn analyze(&self) -> Result<AnalyticReport> {
        match self.model {
            Model::Mg1 => Mg1Config::new(self.lambda, self.service)?.report(),
            Model::Mg11 => Mg11Config::new(self.lambda, self.service)?.report(),
            Model::Mm1k => {
                let mu =
                    self.mu().ok_or_else(|| PudError::InvalidParameter("mm1k requires exponential service".into()))?;
                Mm1kConfig::new(self.lambda, mu, self.k.unwrap_or(0))?.report()
            }
        }
    }

    pub fn simulate(&self, packets: u64, seed: u64, stream: u64, batches: u32) -> Result<MetricsSummary> {
        sim::run_stream(&self.system()?, &StandardPenalty, packets, seed, stream, batches)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Tolerances {
    /// Absolute tolerance on probabilities.
    pub probability_abs: f64,
    /// Relative tolerance on mean penalties.
    pub penalty_rel: f64,
    /// Rows whose expected event count (analytic probability times resolved
    /// packets) falls below this are not judged.
    pub min_events: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Self { probability_abs: 0.005, penalty_rel: 0.03, min_events: 100.0 }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Verdict {
    Pass,
    Fail,
    NotApplicable,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CompareRow {
    pub metric: String,
    pub analytic: Option<f64>,
    pub simulated: Option<f64>,
    pub abs_error: Option<f64>,
    pub rel_error: Option<f64>,
    pub stderr: Option<f64>,
    pub tolerance: String,
    pub status: Verdict,
}

#[derive(Clone, Copy)]
enum Kind {
    Probability,
    Penalty,
}

/// Metric name, kind, analytic value, simulated value, stderr, expected events.
type MetricSpec = (String, Kind, Option<f64>, Option<f64>, Option<f64>, f64);

/// Lines up a simulation summary against the closed forms, one row per metric.
pub fn compare_rows(report: &AnalyticReport, sim: &MetricsSummary, tol: &Tolerances) -> Vec<CompareRow> {
    let resolved = sim.resolved() as f64;
    let served = (sim.correct + sim.incorrect) as f64;
    let s = &sim.stderr;
    let joint = report.missed_joint;
    let mut specs: Vec<MetricSpec> = vec![
        ("p_correct".into(), Kind::Probability, Some(report.p_correct), Some(sim.p_correct), s.p_correct, resolved),
        (
            "p_incorrect".into(),
            Kind::Probability,
            Some(report.p_incorrect),
            Some(sim.p_incorrect),
            s.p_incorrect,
            resolved,
        ),
        ("p_missed".into(), Kind::Probability, Some(report.p_missed), Some(sim.p_missed), s.p_missed, resolved),
        (
            "cond_p_correct".into(),
            Kind::Probability,
            Some(report.cond_p_correct),
            sim.cond_p_correct,
            s.cond_p_correct,
            served,
        ),
        (
            "mean_pucd".into(),
            Kind::Penalty,
            Some(report.mean_pucd),
            sim.mean_pucd,
            s.mean_pucd,
            report.p_correct * resolved,
        ),
        (
            "mean_puid".into(),
            Kind::Penalty,
            Some(report.mean_puid),
            sim.mean_puid,
            s.mean_puid,
            report.p_incorrect * resolved,
        ),
        ("mean_pumd".into(), Kind::Penalty, report.mean_pumd, sim.mean_pumd, s.mean_pumd, report.p_missed * resolved),
        ("total_pud".into(), Kind::Penalty, report.total_pud, sim.mean_total, s.mean_total, resolved),
    ];
    if report.p_missed > 0.0 {
        for j in 0..4 {
            specs.push((
                format!("missed_joint_I{}", j + 1),
                Kind::Penalty,
                joint.map(|a| a[j]),
                Some(sim.missed_joint[j]),
                s.missed_joint[j],
                report.p_missed * resolved,
            ));
        }
    }
    // Missed-penalty terms need actual drops to be meaningful.
    let missed_metric = |m: &str| m == "mean_pumd" || m == "total_pud" || m.starts_with("missed_joint");
    specs
        .into_iter()
        .map(|(metric, kind, analytic, simulated, stderr, events)| {
            let abs_error = analytic.zip(simulated).map(|(a, b)| (b - a).abs());
            let rel_error = analytic.zip(abs_error).and_then(|(a, e)| (a != 0.0).then(|| e / a.abs()));
            let too_few = events < tol.min_events
                || (missed_metric(&metric) && report.p_missed > 0.0 && report.p_missed * resolved < tol.min_events);
            let (tolerance, status) = match kind {
                Kind::Probability => (
                    format!("abs<={}", tol.probability_abs),
                    match abs_error {
                        _ if metric == "cond_p_correct" && served < tol.min_events => Verdict::NotApplicable,
                        Some(e) if e <= tol.probability_abs => Verdict::Pass,
                        Some(_) => Verdict::Fail,
                        None => Verdict::NotApplicable,
                    },
                ),
                Kind::Penalty => (
                    format!("rel<={}", tol.penalty_rel),
                    match (rel_error, abs_error) {
                        _ if too_few => Verdict::NotApplicable,
                        (Some(r), _) if r <= tol.penalty_rel => Verdict::Pass,
                        (None, Some(0.0)) => Verdict::Pass,
                        (Some(_), _) | (None, Some(_)) => Verdict::Fail,
                        (None, None) => Verdict::NotApplicable,
                    },
                ),
            };
            CompareRow { metric, analytic, simulated, abs_error, rel_error, stderr, tolerance, status }
        })
        .collect()
}

/// Runs both routes for one model and compares them.
pub fn compare(spec: &ModelSpec, packets: u64, seed: u64, batches: u32, tol: &Tolerances) -> Result<Vec<CompareRow>> {
    let report = spec.analyze()?;
    let summary = spec.simulate(packets, seed, 0, batches)?;
    Ok(compare_rows(&report, &summary, tol))
}

pub fn write_compare_csv<W: Write>(rows: &[CompareRow], out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["metric", "analytic", "simulated", "abs_error", "rel_error", "stderr", "tolerance", "status"])?;
    let cell = |x: Option<f64>| x.map(|v| round_sig(v).to_string()).unwrap_or_default();
    for r in rows {
        let status = match r.status {
            Verdict::Pass => "pass",
            Verdict::Fail => "fail",
            Verdict::NotApplicable => "not-applicable",
        };
        w.write_record([
            r.metric.clone(),
            cell(r.analytic),
            cell(r.simulated),
            cell(r.abs_error),
            cell(r.rel_error),
            cell(r.stderr),
            r.tolerance.clone(),
            status.to_string(),
        ])?;
    }
    w.flush()?;
    Ok(())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SweepParam {
    Lambda,
    Mu,
    /// Gamma shape, holding the base service mean fixed.
    Alpha,
    K,
}

impl FromStr for SweepParam {
    type Err = PudError;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "lambda" => Ok(Self::Lambda),
            "mu" => Ok(Self::Mu),
            "alpha" => Ok(Self::Alpha),
            "k" | "K" => Ok(Self::K),
            _ => Err(PudError::Parse { input: s.into(), reason: "expected lambda, mu, alpha or k".into() }),
        }
    }
}

/// `steps` evenly spaced values from `from` to `to` inclusive.
pub fn linear_grid(from: f64, to: f64, steps: usize) -> Result<Vec<f64>> {
    if steps == 0 || !from.is_finite() || !to.is_finite() {
        return Err(PudError::Argument("sweep grid must have at least one finite point".into()));
    }
    if steps == 1 {
        return Ok(vec![from]);
    }
    let h = (to - from) / (steps - 1) as f64;
    Ok((0..steps).map(|i| round_sig(from + i as f64 * h)).collect())
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepSpec {
    pub base: ModelParams,
    pub vary: SweepParam,
    pub values: Vec<f64>,
    pub packets: u64,
    pub seed: u64,
    pub batches: u32,
    /// Also simulate every point, emitting a `sim` row next to the `analytic` one.
    pub simulate: bool,
}

impl SweepSpec {
    fn point(&self, v: f64) -> Result<ModelParams> {
        let mut p = self.base;
        match self.vary {
            SweepParam::Lambda => p.lambda = v,
            SweepParam::Mu => match p.model {
                Model::Mm1k => p.mu = Some(v),
                _ => {
                    p.mu = None;
                    p.service = Some(ServiceDistribution::exponential(v)?);
                }
            },
            SweepParam::Alpha => {
                let mean = match (p.service, p.mu) {
                    (Some(s), _) => s.mean(),
                    (None, Some(mu)) => 1.0 / mu,
                    (None, None) => {
                        return Err(PudError::InvalidParameter(
                            "alpha sweep needs a base service to fix the mean".into(),
                        ))
                    }
                };
                p.mu = None;
                p.service = Some(ServiceDistribution::gamma(v, v / mean)?);
            }
            SweepParam::K => {
                if v < 1.0 || v.fract() != 0.0 {
                    return Err(PudError::InvalidParameter(format!("K must be a positive integer, got {v}")));
                }
                p.k = Some(v as u32);
            }
        }
        Ok(p)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepRow {
    pub model: Model,
    pub lambda: f64,
    pub mu: Option<f64>,
    pub service: String,
    #[serde(rename = "K")]
    pub k: Option<u32>,
    #[serde(rename = "p_C")]
    pub p_c: Option<f64>,
    #[serde(rename = "p_I")]
    pub p_i: Option<f64>,
    #[serde(rename = "p_M")]
    pub p_m: Option<f64>,
    #[serde(rename = "E_sigma_C")]
    pub e_sigma_c: Option<f64>,
    #[serde(rename = "E_sigma_I")]
    pub e_sigma_i: Option<f64>,
    #[serde(rename = "E_sigma_M")]
    pub e_sigma_m: Option<f64>,
    #[serde(rename = "E_sigma_total")]
    pub e_sigma_total: Option<f64>,
    pub source: String,
    #[serde(rename = "stderr_p_C")]
    pub stderr_p_c: Option<f64>,
    #[serde(rename = "stderr_p_I")]
    pub stderr_p_i: Option<f64>,
    #[serde(rename = "stderr_p_M")]
    pub stderr_p_m: Option<f64>,
    #[serde(rename = "stderr_sigma_C")]
    pub stderr_sigma_c: Option<f64>,
    #[serde(rename = "stderr_sigma_I")]
    pub stderr_sigma_i: Option<f64>,
    #[serde(rename = "stderr_sigma_M")]
    pub stderr_sigma_m: Option<f64>,
    #[serde(rename = "stderr_sigma_total")]
    pub stderr_sigma_total: Option<f64>,
    pub note: String,
}

impl SweepRow {
    fn blank(p: &ModelParams, source: &str, note: String) -> Self {
        let service =
            p.service.map(|s| s.to_string()).or_else(|| p.mu.map(|m| format!("exp:mu={m}"))).unwrap_or_default();
        let mu = p.mu.or(match p.service {
            Some(ServiceDistribution::Exponential { rate }) => Some(rate),
            _ => None,
        });
        Self {
            model: p.model,
            lambda: p.lambda,
            mu,
            service,
            k: p.k,
            p_c: None,
            p_i: None,
            p_m: None,
            e_sigma_c: None,
            e_sigma_i: None,
            e_sigma_m: None,
            e_sigma_total: None,
            source: source.into(),
            stderr_p_c: None,
            stderr_p_i: None,
            stderr_p_m: None,
            stderr_sigma_c: None,
            stderr_sigma_i: None,
            stderr_sigma_m: None,
            stderr_sigma_total: None,
            note,
        }
    }

    fn analytic(p: &ModelParams, r: &AnalyticReport) -> Self {
        let o = |x: f64| Some(round_sig(x));
        Self {
            p_c: o(r.p_correct),
            p_i: o(r.p_incorrect),
            p_m: o(r.p_missed),
            e_sigma_c: o(r.mean_pucd),
            e_sigma_i: o(r.mean_puid),
            e_sigma_m: r.mean_pumd.map(round_sig),
            e_sigma_total: r.total_pud.map(round_sig),
            ..Self::blank(p, "analytic", String::new())
        }
    }

    fn simulated(p: &ModelParams, s: &MetricsSummary) -> Self {
        let s = s.rounded();
        let e = &s.stderr;
        Self {
            p_c: Some(s.p_correct),
            p_i: Some(s.p_incorrect),
            p_m: Some(s.p_missed),
            e_sigma_c: s.mean_pucd,
            e_sigma_i: s.mean_puid,
            e_sigma_m: s.mean_pumd.or(Some(0.0)),
            e_sigma_total: s.mean_total,
            stderr_p_c: e.p_correct,
            stderr_p_i: e.p_incorrect,
            stderr_p_m: e.p_missed,
            stderr_sigma_c: e.mean_pucd,
            stderr_sigma_i: e.mean_puid,
            stderr_sigma_m: e.mean_pumd,
            stderr_sigma_total: e.mean_total,
            ..Self::blank(p, "sim", String::new())
        }
    }

    pub fn is_warning(&self) -> bool {
        !self.note.is_empty()
    }
}

fn sweep_point(spec: &SweepSpec, index: usize, v: f64) -> Result<Vec<SweepRow>> {
    let params = spec.point(v)?;
    let mut rows = Vec::with_capacity(2);
    match params.resolve() {
        Ok(model) => {
            rows.push(SweepRow::analytic(&params, &model.analyze()?));
            if spec.simulate {
                let summary = model.simulate(spec.packets, spec.seed, index as u64, spec.batches)?;
                rows.push(SweepRow::simulated(&params, &summary));
            }
        }
        Err(PudError::Unstable { rho }) => {
            let note = format!("skipped: unstable (rho = {})", round_sig(rho));
            log::warn!("{} at lambda = {}: {note}", params.model, params.lambda);
            rows.push(SweepRow::blank(&params, "analytic", note.clone()));
            if spec.simulate {
                rows.push(SweepRow::blank(&params, "sim", note));
            }
        }
        Err(e) => return Err(e),
    }
    Ok(rows)
}

/// Evaluates every grid point, in parallel with the `parallel` feature.
/// Rows come back in grid order regardless of scheduling.
pub fn run_sweep(spec: &SweepSpec) -> Result<Vec<SweepRow>> {
    run_sweep_with(spec, |values, f| crate::par::map(values, f))
}

/// [`run_sweep`] pinned to a single thread.
pub fn run_sweep_sequential(spec: &SweepSpec) -> Result<Vec<SweepRow>> {
    run_sweep_with(spec, |values, f| crate::par::map_sequential(values, f))
}

type PointFn<'a> = &'a (dyn Fn(usize, &f64) -> Result<Vec<SweepRow>> + Sync + Send);

fn run_sweep_with<M>(spec: &SweepSpec, map: M) -> Result<Vec<SweepRow>>
where
    M: FnOnce(&[f64], PointFn<'_>) -> Vec<Result<Vec<SweepRow>>>,
{
    if spec.values.is_empty() {
        return Err(PudError::Argument("sweep grid is empty".into()));
    }
    let point = |i: usize, v: &f64| sweep_point(spec, i, *v);
    let mut rows = Vec::new();
    for r in map(&spec.values, &point) {
        rows.extend(r?);
    }
    Ok(rows)
}

/// Named figure presets.
pub const FIGURE_IDS: [&str; 4] = ["num1", "num2", "num3", "num4-draft"];

/// Sweep specs behind a named figure. `num3` yields one spec per model.
pub fn figure_specs(id: &str, packets: u64, seed: u64, batches: u32) -> Result<Vec<SweepSpec>> {
    let spec = |base: ModelParams, vary, values: Vec<f64>| SweepSpec {
        base,
        vary,
        values,
        packets,
        seed,
        batches,
        simulate: true,
    };
    let exp1 = ServiceDistribution::exponential(1.0)?;
    Ok(match id {
        // M/M/1 with μ = 1, λ from 0.05 to 0.95.
        "num1" => vec![spec(
            ModelParams::new(Model::Mg1, 0.05).service(exp1),
            SweepParam::Lambda,
            linear_grid(0.05, 0.95, 19)?,
        )],
        // M/M/1/1 with μ = 1, λ from 0.1 to 3.
        "num2" => {
            vec![spec(ModelParams::new(Model::Mg11, 0.1).service(exp1), SweepParam::Lambda, linear_grid(0.1, 3.0, 30)?)]
        }
        // λ = 1, μ varied, both systems.
        "num3" => {
            let mus = vec![1.2, 1.6, 2.0, 2.5, 3.0, 4.0];
            vec![
                spec(ModelParams::new(Model::Mg1, 1.0).service(exp1), SweepParam::Mu, mus.clone()),
                spec(ModelParams::new(Model::Mg11, 1.0).service(exp1), SweepParam::Mu, mus),
            ]
        }
        // M/GI/1/1 with gamma service, E[T] = 0.5, λ = 1, shape varied.
        "num4-draft" => vec![spec(
            ModelParams::new(Model::Mg11, 1.0).service(ServiceDistribution::exponential(2.0)?),
            SweepParam::Alpha,
            linear_grid(0.5, 2.5, 5)?,
        )],
        other => {
            return Err(PudError::InvalidParameter(format!(
                "unknown figure `{other}` (expected one of {})",
                FIGURE_IDS.join(", ")
            )))
        }
    })
}

pub fn run_figure(id: &str, packets: u64, seed: u64, batches: u32) -> Result<Vec<SweepRow>> {
    let mut rows = Vec::new();
    for spec in figure_specs(id, packets, seed, batches)? {
        rows.extend(run_sweep(&spec)?);
    }
    Ok(rows)
}

pub fn write_sweep_csv<W: Write>(rows: &[SweepRow], out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    for r in rows {
        w.serialize(r)?;
    }
    w.flush()?;
    Ok(())
}

pub fn read_sweep_csv<R: Read>(input: R) -> Result<Vec<SweepRow>> {
    csv::Reader::from_reader(input).deserialize().map(|r| r.map_err(PudError::from)).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn resolve_rules() {
        let ok = ModelParams::new(Model::Mg11, 1.0).mu(1.0).resolve().unwrap();
        assert_eq!(ok.service, ServiceDistribution::Exponential { rate: 1.0 });
        assert!(ModelParams::new(Model::Mg11, 1.0).resolve().is_err());
        let both = ModelParams::new(Model::Mg1, 0.5).mu(1.0).service(ok.service);
        assert!(both.resolve().is_err());
        assert!(ModelParams::new(Model::Mm1k, 1.0).mu(1.0).resolve().is_err());
        assert!(ModelParams::new(Model::Mg1, 0.5).mu(1.0).k(3).resolve().is_err());
        let gamma = ServiceDistribution::gamma(2.0, 2.0).unwrap();
        assert!(ModelParams::new(Model::Mm1k, 1.0).service(gamma).k(2).resolve().is_err());
        let unstable = ModelParams::new(Model::Mg1, 1.5).mu(1.0).resolve();
        assert!(matches!(unstable, Err(PudError::Unstable { .. })));
    }

    #[test]
    fn grid() {
        assert_eq!(linear_grid(0.05, 0.95, 19).unwrap()[2], 0.15);
        assert_eq!(linear_grid(1.0, 2.0, 1).unwrap(), vec![1.0]);
        assert!(linear_grid(1.0, 2.0, 0).is_err());
    }

    #[test]
    fn alpha_sweep_holds_mean() {
        let specs = figure_specs("num4-draft", 10, 1, 1).unwrap();
        for v in &specs[0].values {
            let p = specs[0].point(*v).unwrap();
            assert!((p.service.unwrap().mean() - 0.5).abs() < 1e-15);
        }
    }

    #[test]
    fn unstable_points_become_warning_rows() {
        let spec = SweepSpec {
            base: ModelParams::new(Model::Mg1, 0.5).mu(1.0),
            vary: SweepParam::Lambda,
            values: vec![0.5, 1.2],
            packets: 2000,
            seed: 3,
            batches: 10,
            simulate: true,
        };
        let rows = run_sweep(&spec).unwrap();
        assert_eq!(rows.len(), 4);
        assert!(!rows[0].is_warning() && !rows[1].is_warning());
        assert!(rows[2].is_warning() && rows[2].source == "analytic" && rows[2].p_c.is_none());
        assert!(rows[3].is_warning() && rows[3].source == "sim");
    }

    #[test]
    fn unknown_figure() {
        assert!(figure_specs("num9", 1, 1, 1).is_err());
    }
}
