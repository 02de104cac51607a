//! Aggregation of decision records into estimates with batch-means errors.

use serde::{Deserialize, Serialize};

use super::engine::{DecisionKind, DecisionRecord, EngineOutcome};
use crate::mg11::MissEventClass;
use crate::report::round_sig;
use crate::stats::batch_means_stderr;

#[derive(Debug, Clone, Copy, Default)]
struct Batch {
    correct: u64,
    incorrect: u64,
    missed: u64,
    penalty_correct: f64,
    penalty_incorrect: f64,
    penalty_missed: f64,
    joint: [f64; 4],
}

impl Batch {
    fn resolved(&self) -> u64 {
        self.correct + self.incorrect + self.missed
    }

    fn served(&self) -> u64 {
        self.correct + self.incorrect
    }

    fn total_penalty(&self) -> f64 {
        self.penalty_correct + self.penalty_incorrect + self.penalty_missed
    }
}

fn ratio(num: f64, den: u64) -> Option<f64> {
    (den > 0).then(|| num / den as f64)
}

/// Batch-means standard errors, `None` where fewer than two batches carry data.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct StdErrors {
    pub p_correct: Option<f64>,
    pub p_incorrect: Option<f64>,
    pub p_missed: Option<f64>,
    pub cond_p_correct: Option<f64>,
    pub mean_pucd: Option<f64>,
    pub mean_puid: Option<f64>,
    pub mean_pumd: Option<f64>,
    pub mean_total: Option<f64>,
    pub missed_joint: [Option<f64>; 4],
}

/// Estimates from one simulation run.
///
/// Probabilities are over resolved packets (residual packets excluded).
/// `missed_joint[j]` is the summed penalty of missed packets in parity class
/// `I(j+1)` divided by the number of served packets, the simulated
/// counterpart of the per-served-packet joint terms.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MetricsSummary {
    pub seed: u64,
    pub packets: u64,
    pub batches: u32,
    pub generated: u64,
    pub correct: u64,
    pub incorrect: u64,
    pub missed: u64,
    pub residual: u64,
    pub p_correct: f64,
    pub p_incorrect: f64,
    pub p_missed: f64,
    pub cond_p_correct: Option<f64>,
    pub cond_p_incorrect: Option<f64>,
    pub mean_pucd: Option<f64>,
    pub mean_puid: Option<f64>,
    pub mean_pumd: Option<f64>,
    pub mean_total: Option<f64>,
    pub missed_joint: [f64; 4],
    pub stderr: StdErrors,
}

impl MetricsSummary {
    pub fn resolved(&self) -> u64 {
        self.correct + self.incorrect + self.missed
    }

    /// Copy with floats rounded to 12 significant digits.
    pub fn rounded(&self) -> Self {
        let r = round_sig;
        let o = |x: Option<f64>| x.map(r);
        let s = &self.stderr;
        Self {
            p_correct: r(self.p_correct),
            p_incorrect: r(self.p_incorrect),
            p_missed: r(self.p_missed),
            cond_p_correct: o(self.cond_p_correct),
            cond_p_incorrect: o(self.cond_p_incorrect),
            mean_pucd: o(self.mean_pucd),
            mean_puid: o(self.mean_puid),
            mean_pumd: o(self.mean_pumd),
            mean_total: o(self.mean_total),
            missed_joint: self.missed_joint.map(r),
            stderr: StdErrors {
                p_correct: o(s.p_correct),
                p_incorrect: o(s.p_incorrect),
                p_missed: o(s.p_missed),
                cond_p_correct: o(s.cond_p_correct),
                mean_pucd: o(s.mean_pucd),
                mean_puid: o(s.mean_puid),
                mean_pumd: o(s.mean_pumd),
                mean_total: o(s.mean_total),
                missed_joint: s.missed_joint.map(o),
            },
            ..self.clone()
        }
    }
}

/// Folds decision records into per-batch sums keyed by packet index.
#[derive(Debug, Clone)]
pub struct MetricsAccumulator {
    packets: u64,
    batches: Vec<Batch>,
}

impl MetricsAccumulator {
    pub fn new(packets: u64, batches: u32) -> Self {
        let batches = batches.max(1) as u64;
        Self { packets: packets.max(1), batches: vec![Batch::default(); batches as usize] }
    }

    pub fn add(&mut self, record: &DecisionRecord) {
        let nb = self.batches.len() as u64;
        let idx = ((record.packet.min(self.packets - 1) as u128 * nb as u128) / self.packets as u128) as usize;
        let b = &mut self.batches[idx];
        match record.kind {
            DecisionKind::Correct { .. } => {
                b.correct += 1;
                b.penalty_correct += record.penalty;
            }
            DecisionKind::Incorrect { .. } => {
                b.incorrect += 1;
                b.penalty_incorrect += record.penalty;
            }
            DecisionKind::Missed { context, .. } => {
                b.missed += 1;
                b.penalty_missed += record.penalty;
                if let Ok(c) = MissEventClass::classify(context.drops as u64, context.position as u64) {
                    b.joint[c.index()] += record.penalty;
                }
            }
        }
    }

    pub fn finish(&self, outcome: EngineOutcome, seed: u64) -> MetricsSummary {
        let mut all = Batch::default();
        for b in &self.batches {
            all.correct += b.correct;
            all.incorrect += b.incorrect;
            all.missed += b.missed;
            all.penalty_correct += b.penalty_correct;
            all.penalty_incorrect += b.penalty_incorrect;
            all.penalty_missed += b.penalty_missed;
            for j in 0..4 {
                all.joint[j] += b.joint[j];
            }
        }
        let resolved = all.resolved().max(1) as f64;
        let se = |f: &dyn Fn(&Batch) -> Option<f64>| {
            let vals: Vec<f64> = self.batches.iter().filter_map(f).collect();
            batch_means_stderr(&vals)
        };
        let stderr = StdErrors {
            p_correct: se(&|b| ratio(b.correct as f64, b.resolved())),
            p_incorrect: se(&|b| ratio(b.incorrect as f64, b.resolved())),
            p_missed: se(&|b| ratio(b.missed as f64, b.resolved())),
            cond_p_correct: se(&|b| ratio(b.correct as f64, b.served())),
            mean_pucd: se(&|b| ratio(b.penalty_correct, b.correct)),
            mean_puid: se(&|b| ratio(b.penalty_incorrect, b.incorrect)),
            mean_pumd: se(&|b| ratio(b.penalty_missed, b.missed)),
            mean_total: se(&|b| ratio(b.total_penalty(), b.resolved())),
            missed_joint: [0, 1, 2, 3].map(|j| se(&|b| ratio(b.joint[j], b.served()))),
        };
        MetricsSummary {
            seed,
            packets: self.packets,
            batches: self.batches.len() as u32,
            generated: outcome.generated,
            correct: all.correct,
            incorrect: all.incorrect,
            missed: all.missed,
            residual: outcome.residual,
            p_correct: all.correct as f64 / resolved,
            p_incorrect: all.incorrect as f64 / resolved,
            p_missed: all.missed as f64 / resolved,
            cond_p_correct: ratio(all.correct as f64, all.served()),
            cond_p_incorrect: ratio(all.incorrect as f64, all.served()),
            mean_pucd: ratio(all.penalty_correct, all.correct),
            mean_puid: ratio(all.penalty_incorrect, all.incorrect),
            mean_pumd: ratio(all.penalty_missed, all.missed),
            mean_total: ratio(all.total_penalty(), all.resolved()),
            missed_joint: all.joint.map(|x| ratio(x, all.served()).unwrap_or(0.0)),
            stderr,
        }
    }
}
