//! Bufferless M/GI/1/1 queue with blocking.
//!
//! Arrivals that find the server busy are dropped. A dropped packet is charged
//! against the decision made when the packet in service completes. Given a
//! service of length `t` with `m` drops, the drop offsets are uniform order
//! statistics on `[0, t]`, and the `n`-th drop's penalty class follows the
//! parities of `m` and `n`.

use serde::{Deserialize, Serialize};

use crate::error::{PudError, Result};
use crate::report::AnalyticReport;
use crate::service::ServiceDistribution;

/// Below this arrival rate the 1/λ and 1/λ² terms of the I2/I3 formulas
/// cancel catastrophically.
pub const CANCELLATION_WARNING_LAMBDA: f64 = 1e-3;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Mg11Config {
    lambda: f64,
    service: ServiceDistribution,
}

/// Parity class of the `n`-th of `m` drops within one service period.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum MissEventClass {
    /// `m` even, `n` even: missed correct.
    I1,
    /// `m` even, `n` odd: missed incorrect.
    I2,
    /// `m` odd, `n` even: missed incorrect.
    I3,
    /// `m` odd, `n` odd: missed correct.
    I4,
}

impl MissEventClass {
    pub const ALL: [MissEventClass; 4] = [Self::I1, Self::I2, Self::I3, Self::I4];

    /// Classifies the `n`-th of `m` drops; requires `1 <= n <= m`.
    pub fn classify(m: u64, n: u64) -> Result<Self> {
        check_index(n, m)?;
        Ok(match (m.is_multiple_of(2), n.is_multiple_of(2)) {
            (true, true) => Self::I1,
            (true, false) => Self::I2,
            (false, true) => Self::I3,
            (false, false) => Self::I4,
        })
    }

    /// Whether the missed decision is correct (the source is back in the
    /// dropped packet's state at the decision instant).
    pub fn is_correct(self) -> bool {
        matches!(self, Self::I1 | Self::I4)
    }

    pub fn index(self) -> usize {
        self as usize
    }
}

fn check_index(n: u64, m: u64) -> Result<()> {
    if n >= 1 && n <= m {
        Ok(())
    } else {
        Err(PudError::Argument(format!("order-statistic index n={n} outside 1..={m}")))
    }
}

fn check_time(t: f64) -> Result<()> {
    if t.is_finite() && t > 0.0 {
        Ok(())
    } else {
        Err(PudError::Argument(format!("service length must be > 0, got {t}")))
    }
}

fn binomial(n: u64, k: u64) -> f64 {
    let k = k.min(n - k);
    (0..k).fold(1.0, |acc, j| acc * (n - j) as f64 / (j + 1) as f64)
}

/// Density of the `n`-th smallest of `m` uniform arrival offsets on `[0, t]`.
pub fn order_stat_pdf(n: u64, m: u64, t: f64, x: f64) -> Result<f64> {
    check_index(n, m)?;
    check_time(t)?;
    if !(0.0..=t).contains(&x) {
        return Ok(0.0);
    }
    let u = x / t;
    let mf = m as f64;
    Ok(mf / t * binomial(m - 1, n - 1) * u.powi((n - 1) as i32) * (1.0 - u).powi((m - n) as i32))
}

/// Expected missed-correct penalty `E[n (t - X_n)]` of the `n`-th of `m` drops
/// in a service of length `t`.
pub fn h_mc(n: u64, t: f64, m: u64) -> Result<f64> {
    check_index(n, m)?;
    check_time(t)?;
    let (n, m) = (n as f64, m as f64);
    Ok((n - n * n / (m + 1.0)) * t)
}

/// Expected missed-incorrect penalty `E[n (t - X_n)^2]`.
pub fn h_mi(n: u64, t: f64, m: u64) -> Result<f64> {
    check_index(n, m)?;
    check_time(t)?;
    let (n, m) = (n as f64, m as f64);
    Ok((n - 2.0 * n * n / (m + 1.0) + n * n * (n + 1.0) / ((m + 2.0) * (m + 1.0))) * t * t)
}

impl Mg11Config {
    pub fn new(lambda: f64, service: ServiceDistribution) -> Result<Self> {
        if !(lambda.is_finite() && lambda > 0.0) {
            return Err(PudError::InvalidParameter(format!("lambda must be > 0, got {lambda}")));
        }
        service.validate()?;
        if lambda < CANCELLATION_WARNING_LAMBDA {
            log::warn!(
                "lambda = {lambda} is below {CANCELLATION_WARNING_LAMBDA}; missed-penalty classes I2/I3 lose precision to cancellation"
            );
        }
        Ok(Self { lambda, service })
    }

    pub fn lambda(&self) -> f64 {
        self.lambda
    }

    pub fn service(&self) -> &ServiceDistribution {
        &self.service
    }

    /// `p_M = E[T] / (1/λ + E[T])`, busy fraction of a renewal cycle.
    pub fn missed_probability(&self) -> f64 {
        let et = self.service.mean();
        et / (1.0 / self.lambda + et)
    }

    /// `(p̃_C, p̃_I)`, conditioned on the packet being served.
    pub fn conditional_decision_probabilities(&self) -> Result<(f64, f64)> {
        let mt = self.service.mgf(-2.0 * self.lambda)?;
        Ok((0.5 + 0.5 * mt, 0.5 - 0.5 * mt))
    }

    /// `(p_C, p_I)` over all generated packets.
    pub fn decision_probabilities(&self) -> Result<(f64, f64)> {
        let (pc, pi) = self.conditional_decision_probabilities()?;
        let served = 1.0 - self.missed_probability();
        Ok((pc * served, pi * served))
    }

    /// `(E[σ_C], E[σ_I])` for delivered packets.
    pub fn mean_penalties(&self) -> Result<(f64, f64)> {
        let g = -2.0 * self.lambda;
        let s = &self.service;
        let (pc, pi) = self.conditional_decision_probabilities()?;
        let (t1, t2) = (s.moment(1), s.moment(2));
        let (d1, d2) = (s.mgf_derivative(1, g)?, s.mgf_derivative(2, g)?);
        Ok(((t1 + d1) / (2.0 * pc), (t1 + t2 - d1 - d2) / (2.0 * pi)))
    }

    /// `E[σ_M ; I = class]`: expected missed penalty accrued per served
    /// packet by drops falling in `class`.
    pub fn joint_missed_penalty(&self, class: MissEventClass) -> Result<f64> {
        let lam = self.lambda;
        let s = &self.service;
        let g = -2.0 * lam;
        let e = |n| s.moment(n);
        let m = |n| s.mgf_derivative(n, g);
        let l2 = lam * lam;
        Ok(match class {
            MissEventClass::I1 => lam * e(2) / 8.0 + l2 * e(3) / 24.0 - lam * m(2)? / 8.0 + l2 * m(3)? / 24.0,
            MissEventClass::I2 => {
                -e(1) / (16.0 * lam)
                    + e(2) / 16.0
                    + lam * e(3) / 12.0
                    + l2 * e(4) / 48.0
                    + m(1)? / (16.0 * lam)
                    + m(2)? / 16.0
                    - lam * m(3)? / 12.0
                    + l2 * m(4)? / 48.0
            }
            MissEventClass::I3 => {
                1.0 / (16.0 * l2) - e(1) / (16.0 * lam) - e(2) / 16.0 + lam * e(3) / 12.0 + l2 * e(4) / 48.0
                    - m(0)? / (16.0 * l2)
                    - m(1)? / (16.0 * lam)
                    + m(2)? / 16.0
                    + lam * m(3)? / 12.0
                    - l2 * m(4)? / 48.0
            }
            MissEventClass::I4 => {
                e(1) / 8.0 + lam * e(2) / 8.0 + l2 * e(3) / 24.0 - m(1)? / 8.0 + lam * m(2)? / 8.0 - l2 * m(3)? / 24.0
            }
        })
    }

    /// The four joint terms in class order.
    pub fn joint_missed_penalties(&self) -> Result<[f64; 4]> {
        let mut out = [0.0; 4];
        for c in MissEventClass::ALL {
            out[c.index()] = self.joint_missed_penalty(c)?;
        }
        Ok(out)
    }

    /// `E[σ_M]`, mean penalty over missed packets.
    pub fn mean_pumd(&self) -> Result<f64> {
        let pm = self.missed_probability();
        if pm <= 0.0 {
            return Err(PudError::Undefined("no packets are missed (p_M = 0)".into()));
        }
        let sum: f64 = self.joint_missed_penalties()?.iter().sum();
        Ok(sum * (1.0 - pm) / pm)
    }

    /// Mean penalty over all generated packets.
    pub fn total_pud(&self) -> Result<f64> {
        let pm = self.missed_probability();
        let (pc, pi) = self.decision_probabilities()?;
        let (sc, si) = self.mean_penalties()?;
        Ok(pc * sc + pi * si + pm * self.mean_pumd()?)
    }

    pub fn report(&self) -> Result<AnalyticReport> {
        let (cpc, cpi) = self.conditional_decision_probabilities()?;
        let (pc, pi) = self.decision_probabilities()?;
        let (sc, si) = self.mean_penalties()?;
        Ok(AnalyticReport {
            model: "mg11".into(),
            p_correct: pc,
            p_incorrect: pi,
            p_missed: self.missed_probability(),
            cond_p_correct: cpc,
            cond_p_incorrect: cpi,
            mean_pucd: sc,
            mean_puid: si,
            mean_pumd: Some(self.mean_pumd()?),
            total_pud: Some(self.total_pud()?),
            missed_joint: Some(self.joint_missed_penalties()?),
        })
    }
}
