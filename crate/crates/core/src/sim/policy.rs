//! Penalty functions charged at decision instants.

/// The three penalty functions of a decision: correct, incorrect and missed.
///
/// Implementations should be nondecreasing in the delay / lag and in
/// `|state_diff|`, and `incorrect(d, 0)` should equal `correct(d)`.
pub trait PenaltyPolicy: Send + Sync {
    /// Penalty for a correct decision made `delay` after generation.
    fn correct(&self, delay: f64) -> f64;

    /// Penalty for an incorrect decision; `state_diff` is the source state at
    /// the decision minus the state the packet carries.
    fn incorrect(&self, delay: f64, state_diff: i32) -> f64;

    /// Penalty for the `index`-th drop of a busy period, `lag` before the
    /// decision it is charged against.
    fn missed(&self, lag: f64, state_diff: i32, index: u32) -> f64;
}

/// `f_C = Δ`, `f_I = Δ + |δ| Δ^{|δ|+1}`, `f_M = n r^{|δ|+1}`.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct StandardPenalty;

impl PenaltyPolicy for StandardPenalty {
    fn correct(&self, delay: f64) -> f64 {
        delay
    }

    fn incorrect(&self, delay: f64, state_diff: i32) -> f64 {
        let d = state_diff.abs();
        delay + d as f64 * delay.powi(d + 1)
    }

    fn missed(&self, lag: f64, state_diff: i32, index: u32) -> f64 {
        index as f64 * lag.powi(state_diff.abs() + 1)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn standard_forms() {
        let p = StandardPenalty;
        assert_eq!(p.correct(1.5), 1.5);
        assert_eq!(p.incorrect(2.0, 1), 6.0);
        assert_eq!(p.incorrect(2.0, -1), 6.0);
        assert_eq!(p.incorrect(2.0, 0), p.correct(2.0));
        assert_eq!(p.missed(3.0, 0, 1), 3.0);
        assert_eq!(p.missed(2.0, 1, 2), 8.0);
    }

    #[test]
    fn monotone_in_delay() {
        let p = StandardPenalty;
        let grid: Vec<f64> = (0..50).map(|i| i as f64 * 0.1).collect();
        for w in grid.windows(2) {
            assert!(p.correct(w[0]) <= p.correct(w[1]));
            assert!(p.incorrect(w[0], 1) <= p.incorrect(w[1], 1));
            assert!(p.incorrect(w[0], 0) <= p.incorrect(w[0], 1));
            assert!(p.missed(w[0], 1, 3) <= p.missed(w[1], 1, 3));
        }
    }
}
