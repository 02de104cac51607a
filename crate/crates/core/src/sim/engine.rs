//! Event loop shared by random and scripted runs.
//!
//! The calendar holds at most two pending events (the next arrival and the
//! completion of the packet in service), so it is kept as two scalars rather
//! than a heap. At equal timestamps the completion is processed first.

use std::collections::VecDeque;

use serde::{Deserialize, Serialize};

use super::policy::PenaltyPolicy;
use super::Capacity;

/// Source states are labelled 1 and 2; the source starts in state 1.
pub const INITIAL_STATE: u8 = 1;

fn flip(state: u8) -> u8 {
    3 - state
}

/// Where a dropped packet sat within the service period it was charged against.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DropContext {
    /// Total drops during that service period.
    pub drops: u32,
    /// 1-based position of this drop within the service period.
    pub position: u32,
    /// Time from the start of that service to this drop.
    pub offset: f64,
    /// Length of that service.
    pub length: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum DecisionKind {
    Correct { delay: f64 },
    Incorrect { delay: f64, state_diff: i32 },
    Missed { index: u32, lag: f64, state_diff: i32, context: DropContext },
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DecisionRecord {
    /// 0-based generation index.
    pub packet: u64,
    pub kind: DecisionKind,
    pub penalty: f64,
    pub decision_time: f64,
    /// Source state at the decision instant.
    pub source_state: u8,
}

impl DecisionRecord {
    /// Re-applies `policy` to the record's own fields.
    pub fn recompute<P: PenaltyPolicy + ?Sized>(&self, policy: &P) -> f64 {
        match self.kind {
            DecisionKind::Correct { delay } => policy.correct(delay),
            DecisionKind::Incorrect { delay, state_diff } => policy.incorrect(delay, state_diff),
            DecisionKind::Missed { index, lag, state_diff, .. } => policy.missed(lag, state_diff, index),
        }
    }

    pub fn is_missed(&self) -> bool {
        matches!(self.kind, DecisionKind::Missed { .. })
    }
}

/// Everything the engine reports while running.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum SimEvent {
    Generated { packet: u64, time: f64, state: u8 },
    Decision(DecisionRecord),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct EngineOutcome {
    pub generated: u64,
    /// Packets still queued, in service, or dropped against the packet in
    /// service when the run stopped.
    pub residual: u64,
}

#[derive(Debug, Clone, Copy)]
struct Packet {
    id: u64,
    generated: f64,
    state: u8,
    service: f64,
}

#[derive(Debug, Clone, Copy)]
struct Drop {
    id: u64,
    time: f64,
    state: u8,
    index: u32,
}

#[derive(Debug)]
struct Busy {
    packet: Packet,
    start: f64,
    completion: f64,
    drops: Vec<Drop>,
}

/// Runs the queue until the feed is exhausted.
///
/// `feed` yields `(generation_time, service_time)` in nondecreasing time
/// order. With `budget = Some(n)` the `(n+1)`-th arrival is not generated; its
/// time is the horizon, and whatever is still in the system then is residual.
/// With `budget = None` the system drains after the last arrival.
pub(crate) fn simulate<P, F, O>(
    capacity: Capacity,
    policy: &P,
    mut feed: F,
    budget: Option<u64>,
    mut observe: O,
) -> EngineOutcome
where
    P: PenaltyPolicy + ?Sized,
    F: FnMut() -> Option<(f64, f64)>,
    O: FnMut(SimEvent),
{
    let mut state = INITIAL_STATE;
    let mut generated = 0u64;
    let mut queue: VecDeque<Packet> = VecDeque::new();
    let mut server: Option<Busy> = None;
    let mut busy_drops = 0u32;
    let mut horizon = f64::INFINITY;
    let mut next = if budget == Some(0) { None } else { feed() };

    loop {
        if budget == Some(generated) && next.is_some() {
            horizon = next.take().map_or(f64::INFINITY, |a| a.0);
        }
        let completion = server.as_ref().map(|b| b.completion);
        let complete_now = match (completion, next) {
            (Some(c), Some((a, _))) => c <= a,
            (Some(c), None) => c <= horizon,
            (None, _) => false,
        };

        if complete_now {
            let busy = server.take().expect("server busy");
            let now = busy.completion;
            let delay = now - busy.packet.generated;
            let diff = state as i32 - busy.packet.state as i32;
            let kind = if diff == 0 {
                DecisionKind::Correct { delay }
            } else {
                DecisionKind::Incorrect { delay, state_diff: diff }
            };
            emit(&mut observe, policy, busy.packet.id, kind, now, state);

            let m = busy.drops.len() as u32;
            for (j, d) in busy.drops.iter().enumerate() {
                let context = DropContext {
                    drops: m,
                    position: j as u32 + 1,
                    offset: d.time - busy.start,
                    length: now - busy.start,
                };
                let kind = DecisionKind::Missed {
                    index: d.index,
                    lag: now - d.time,
                    state_diff: state as i32 - d.state as i32,
                    context,
                };
                emit(&mut observe, policy, d.id, kind, now, state);
            }

            server = queue.pop_front().map(|p| Busy {
                packet: p,
                start: now,
                completion: now + p.service,
                drops: Vec::new(),
            });
            if server.is_none() {
                busy_drops = 0;
            }
            continue;
        }

        let Some((time, service)) = next else { break };
        state = flip(state);
        let packet = Packet { id: generated, generated: time, state, service };
        generated += 1;
        observe(SimEvent::Generated { packet: packet.id, time, state });

        match server.as_mut() {
            None => server = Some(Busy { packet, start: time, completion: time + service, drops: Vec::new() }),
            Some(busy) => {
                let room = match capacity {
                    Capacity::Infinite => true,
                    Capacity::Buffers(b) => queue.len() < b as usize,
                };
                if room {
                    queue.push_back(packet);
                } else {
                    busy_drops += 1;
                    busy.drops.push(Drop { id: packet.id, time, state, index: busy_drops });
                }
            }
        }
        next = feed();
    }

    let residual = queue.len() as u64 + server.as_ref().map_or(0, |b| 1 + b.drops.len() as u64);
    EngineOutcome { generated, residual }
}

fn emit<P, O>(observe: &mut O, policy: &P, packet: u64, kind: DecisionKind, time: f64, state: u8)
where
    P: PenaltyPolicy + ?Sized,
    O: FnMut(SimEvent),
{
    let mut record = DecisionRecord { packet, kind, penalty: 0.0, decision_time: time, source_state: state };
    record.penalty = record.recompute(policy);
    observe(SimEvent::Decision(record));
}
