//! Discrete-event Monte Carlo engine for the two-state source and a single
//! FCFS server.
//!
//! The source starts in state 1 and flips at every generation; generations
//! form a Poisson process of rate λ and arrive at the server immediately. A
//! decision is made the instant a packet completes service. A packet that
//! finds no room is dropped and charged against the decision of the packet
//! in service at its drop instant, with index `n` counted over the current
//! busy period.

mod engine;
mod policy;
mod summary;
mod trace;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Exp};
use serde::{Deserialize, Serialize};

pub use engine::{DecisionKind, DecisionRecord, DropContext, EngineOutcome, SimEvent, INITIAL_STATE};
pub use policy::{PenaltyPolicy, StandardPenalty};
pub use summary::{MetricsAccumulator, MetricsSummary, StdErrors};
pub use trace::Script;

use crate::error::{PudError, Result};
use crate::mg1::STABILITY_MARGIN;
use crate::service::ServiceDistribution;

/// Number of waiting slots in front of the server.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Capacity {
    Infinite,
    /// `Buffers(0)` is M/GI/1/1; `Buffers(K - 1)` is M/M/1/K.
    Buffers(u32),
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SystemConfig {
    pub lambda: f64,
    pub service: ServiceDistribution,
    pub capacity: Capacity,
}

impl SystemConfig {
    pub fn new(lambda: f64, service: ServiceDistribution, capacity: Capacity) -> Result<Self> {
        let cfg = Self { lambda, service, capacity };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.lambda.is_finite() && self.lambda > 0.0) {
            return Err(PudError::InvalidParameter(format!("lambda must be > 0, got {}", self.lambda)));
        }
        self.service.validate()?;
        let rho = self.lambda * self.service.mean();
        if self.capacity == Capacity::Infinite && rho > 1.0 - STABILITY_MARGIN {
            return Err(PudError::Unstable { rho });
        }
        Ok(())
    }
}

fn check_budget(n_packets: u64) -> Result<()> {
    if n_packets == 0 {
        Err(PudError::Argument("packet budget must be at least 1".into()))
    } else {
        Ok(())
    }
}

/// Runs `n_packets` generations on random stream `stream` of `seed`, passing
/// every event to `observe`.
pub fn run_observed<P, O>(
    cfg: &SystemConfig,
    policy: &P,
    n_packets: u64,
    seed: u64,
    stream: u64,
    observe: O,
) -> Result<EngineOutcome>
where
    P: PenaltyPolicy + ?Sized,
    O: FnMut(SimEvent),
{
    cfg.validate()?;
    check_budget(n_packets)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    let gaps = Exp::new(cfg.lambda).map_err(|e| PudError::InvalidParameter(e.to_string()))?;
    let service = cfg.service.sampler();
    let mut clock = 0.0;
    let feed = || {
        clock += gaps.sample(&mut rng);
        Some((clock, service.sample(&mut rng)))
    };
    Ok(engine::simulate(cfg.capacity, policy, feed, Some(n_packets), observe))
}

/// Simulates `n_packets` generations and summarizes them over `batches` batches.
pub fn run<P: PenaltyPolicy + ?Sized>(
    cfg: &SystemConfig,
    policy: &P,
    n_packets: u64,
    seed: u64,
    batches: u32,
) -> Result<MetricsSummary> {
    run_stream(cfg, policy, n_packets, seed, 0, batches)
}

/// As [`run`], on an explicit random stream. Distinct streams of one seed are
/// independent, which is how sweep points and replications are separated.
pub fn run_stream<P: PenaltyPolicy + ?Sized>(
    cfg: &SystemConfig,
    policy: &P,
    n_packets: u64,
    seed: u64,
    stream: u64,
    batches: u32,
) -> Result<MetricsSummary> {
    check_budget(n_packets)?;
    if batches == 0 || batches as u64 > n_packets {
        return Err(PudError::Argument(format!("batches must be in 1..={n_packets}, got {batches}")));
    }
    let mut acc = MetricsAccumulator::new(n_packets, batches);
    let outcome = run_observed(cfg, policy, n_packets, seed, stream, |ev| {
        if let SimEvent::Decision(r) = ev {
            acc.add(&r);
        }
    })?;
    Ok(acc.finish(outcome, seed))
}

/// Independent replications on streams `0..replications`, run in parallel
/// when the `parallel` feature is on. Results are in stream order.
pub fn run_replications<P: PenaltyPolicy + ?Sized>(
    cfg: &SystemConfig,
    policy: &P,
    n_packets: u64,
    seed: u64,
    replications: u64,
    batches: u32,
) -> Result<Vec<MetricsSummary>> {
    let streams: Vec<u64> = (0..replications).collect();
    crate::par::map(&streams, |_, &s| run_stream(cfg, policy, n_packets, seed, s, batches)).into_iter().collect()
}

/// Replays a scripted trace through the engine and drains the system.
pub fn run_scripted<P: PenaltyPolicy + ?Sized>(script: &Script, policy: &P, capacity: Capacity) -> Vec<DecisionRecord> {
    let mut items = script.packets().iter().copied();
    let mut out = Vec::new();
    engine::simulate(
        capacity,
        policy,
        || items.next(),
        None,
        |ev| {
            if let SimEvent::Decision(r) = ev {
                out.push(r);
            }
        },
    );
    out
}
