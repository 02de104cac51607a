use serde::{Deserialize, Serialize};

/// Closed-form decision probabilities and mean penalties for one configuration.
///
/// Unconditional probabilities are over all generated packets. The
/// `cond_*` fields are conditioned on the packet being delivered, which is
/// the same thing as the unconditional value when nothing is dropped.
/// Penalty means are conditioned on their decision class.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AnalyticReport {
    pub model: String,
    pub p_correct: f64,
    pub p_incorrect: f64,
    pub p_missed: f64,
    pub cond_p_correct: f64,
    pub cond_p_incorrect: f64,
    pub mean_pucd: f64,
    pub mean_puid: f64,
    /// Mean penalty over missed packets. `None` where no closed form exists.
    pub mean_pumd: Option<f64>,
    /// Mean penalty over all generated packets. `None` when `mean_pumd` is.
    pub total_pud: Option<f64>,
    /// Missed penalty per served packet, jointly with each parity class I1..I4.
    pub missed_joint: Option<[f64; 4]>,
}

/// Rounds to 12 significant digits.
pub fn round_sig(x: f64) -> f64 {
    if !x.is_finite() || x == 0.0 {
        return x;
    }
    format!("{x:.11e}").parse().unwrap_or(x)
}

impl AnalyticReport {
    /// Copy with every float rounded to 12 significant digits, for emission.
    pub fn rounded(&self) -> Self {
        let r = round_sig;
        Self {
            model: self.model.clone(),
            p_correct: r(self.p_correct),
            p_incorrect: r(self.p_incorrect),
            p_missed: r(self.p_missed),
            cond_p_correct: r(self.cond_p_correct),
            cond_p_incorrect: r(self.cond_p_incorrect),
            mean_pucd: r(self.mean_pucd),
            mean_puid: r(self.mean_puid),
            mean_pumd: self.mean_pumd.map(r),
            total_pud: self.total_pud.map(r),
            missed_joint: self.missed_joint.map(|a| a.map(r)),
        }
    }
}
