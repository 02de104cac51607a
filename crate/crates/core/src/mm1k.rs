//! Finite-capacity M/M/1/K queue (`K - 1` waiting slots).
//!
//! An accepted arrival that finds `i` packets in the system has system time
//! `Erlang(i + 1, μ)` by memorylessness, so the delivered-packet quantities
//! are mixtures over the arrival-seen state with weights
//! `q(i) = p(i) / (1 - p(K))`.

use serde::{Deserialize, Serialize};

use crate::error::{PudError, Result};
use crate::mg11::Mg11Config;
use crate::report::AnalyticReport;
use crate::service::ServiceDistribution;

/// Loads closer than this to 1 use the uniform stationary law.
pub const UNIT_LOAD_SWITCH: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Mm1kConfig {
    lambda: f64,
    mu: f64,
    capacity: u32,
}

impl Mm1kConfig {
    pub fn new(lambda: f64, mu: f64, capacity: u32) -> Result<Self> {
        for (name, v) in [("lambda", lambda), ("mu", mu)] {
            if !(v.is_finite() && v > 0.0) {
                return Err(PudError::InvalidParameter(format!("{name} must be > 0, got {v}")));
            }
        }
        if capacity == 0 {
            return Err(PudError::InvalidParameter("K must be at least 1".into()));
        }
        Ok(Self { lambda, mu, capacity })
    }

    pub fn lambda(&self) -> f64 {
        self.lambda
    }

    pub fn mu(&self) -> f64 {
        self.mu
    }

    /// System capacity `K`.
    pub fn capacity(&self) -> u32 {
        self.capacity
    }

    pub fn load(&self) -> f64 {
        self.lambda / self.mu
    }

    /// Unnormalized `ρ^i`, scaled so the largest weight is 1.
    fn weights(&self) -> Vec<f64> {
        let k = self.capacity as usize;
        let rho = self.load();
        if (rho - 1.0).abs() < UNIT_LOAD_SWITCH {
            return vec![1.0; k + 1];
        }
        // Powers of the smaller of ρ and 1/ρ never overflow; for ρ > 1 the
        // weights are built from the top state down.
        let (ratio, reversed) = if rho < 1.0 { (rho, false) } else { (1.0 / rho, true) };
        let mut w: Vec<f64> = std::iter::successors(Some(1.0), |p| Some(p * ratio)).take(k + 1).collect();
        if reversed {
            w.reverse();
        }
        w
    }

    /// `p(0..=K)`, the law of the number in system seen by an arrival.
    pub fn stationary_distribution(&self) -> Vec<f64> {
        normalized(self.weights())
    }

    /// `p_M = p(K)`.
    pub fn missed_probability(&self) -> f64 {
        *self.stationary_distribution().last().expect("K >= 1")
    }

    /// Acceptance-conditioned state weights `q(0..K)`, normalized directly
    /// rather than through `1 - p(K)`.
    pub fn accepted_weights(&self) -> Vec<f64> {
        let mut w = self.weights();
        w.pop();
        normalized(w)
    }

    /// `M_{Y_i}(-2λ) = η^{i+1}` with `η = μ / (μ + 2λ)`.
    fn eta(&self) -> f64 {
        self.mu / (self.mu + 2.0 * self.lambda)
    }

    /// `(p̃_C, p̃_I, p_C, p_I)`: conditional on delivery, then over all packets.
    pub fn decision_probabilities(&self) -> (f64, f64, f64, f64) {
        let eta = self.eta();
        let mut power = eta;
        let mut cpc = 0.0;
        for q in self.accepted_weights() {
            cpc += q * (0.5 + 0.5 * power);
            power *= eta;
        }
        let cpi = 1.0 - cpc;
        let served = 1.0 - self.missed_probability();
        (cpc, cpi, cpc * served, cpi * served)
    }

    /// `(E[σ_C], E[σ_I])` for delivered packets.
    pub fn mean_penalties(&self) -> (f64, f64) {
        let (mu, eta) = (self.mu, self.eta());
        let base = mu + 2.0 * self.lambda;
        let (cpc, cpi, _, _) = self.decision_probabilities();
        let mut correct = 0.0;
        let mut incorrect = 0.0;
        let mut eta_pow = eta; // η^{i+1}
        for (i, q) in self.accepted_weights().into_iter().enumerate() {
            let stages = (i + 1) as f64;
            let ey = stages / mu;
            let ey2 = stages * (stages + 1.0) / (mu * mu);
            // M_(Y_i,1) = (i+1) μ^{i+1} / (μ+2λ)^{i+2}, M_(Y_i,2) adds a factor (i+2)/(μ+2λ).
            let m1 = stages * eta_pow / base;
            let m2 = m1 * (stages + 1.0) / base;
            correct += q * 0.5 * (ey + m1);
            incorrect += q * 0.5 * (ey + ey2 - m1 - m2);
            eta_pow *= eta;
        }
        (correct / cpc, incorrect / cpi)
    }

    /// Only `K = 1` has closed-form missed penalties; there the model is M/M/1/1.
    fn as_bufferless(&self) -> Option<Mg11Config> {
        (self.capacity == 1).then(|| {
            Mg11Config::new(self.lambda, ServiceDistribution::Exponential { rate: self.mu })
                .expect("validated parameters")
        })
    }

    pub fn report(&self) -> Result<AnalyticReport> {
        let (cpc, cpi, pc, pi) = self.decision_probabilities();
        let (sc, si) = self.mean_penalties();
        let pm = self.missed_probability();
        let (pumd, joint) = match self.as_bufferless() {
            Some(b) => (Some(b.mean_pumd()?), Some(b.joint_missed_penalties()?)),
            None => (None, None),
        };
        Ok(AnalyticReport {
            model: "mm1k".into(),
            p_correct: pc,
            p_incorrect: pi,
            p_missed: pm,
            cond_p_correct: cpc,
            cond_p_incorrect: cpi,
            mean_pucd: sc,
            mean_puid: si,
            mean_pumd: pumd,
            total_pud: pumd.map(|m| pc * sc + pi * si + pm * m),
            missed_joint: joint,
        })
    }
}

fn normalized(mut w: Vec<f64>) -> Vec<f64> {
    let norm: f64 = w.iter().sum();
    w.iter_mut().for_each(|p| *p /= norm);
    w
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mg1::Mg1Config;

    fn rel(a: f64, b: f64) -> f64 {
        (a - b).abs() / b.abs()
    }

    /// Solves the birth-death balance `λ p(i) = μ p(i+1)` forward from p(0) = 1.
    fn balance_oracle(lambda: f64, mu: f64, k: usize) -> Vec<f64> {
        let mut p = vec![1.0];
        for _ in 0..k {
            let last = *p.last().unwrap();
            p.push(last * lambda / mu);
        }
        let s: f64 = p.iter().sum();
        p.into_iter().map(|x| x / s).collect()
    }

    #[test]
    fn stationary_examples() {
        let p = Mm1kConfig::new(1.0, 1.0, 3).unwrap().stationary_distribution();
        assert_eq!(p, vec![0.25; 4]);
        let c = Mm1kConfig::new(0.5, 1.0, 2).unwrap();
        assert!(rel(c.missed_probability(), 1.0 / 7.0) < 1e-15);
        for (l, m, k) in [(0.5, 1.0, 2), (1.5, 1.0, 4), (3.0, 0.7, 9)] {
            let got = Mm1kConfig::new(l, m, k).unwrap().stationary_distribution();
            let want = balance_oracle(l, m, k as usize);
            for (g, w) in got.iter().zip(&want) {
                assert!(rel(*g, *w) < 1e-13);
            }
        }
        let one = Mm1kConfig::new(1.0, 1.0, 1).unwrap();
        assert!(rel(one.missed_probability(), 0.5) < 1e-15);
        assert!(Mm1kConfig::new(1e-9, 1.0, 3).unwrap().missed_probability() < 1e-20);
    }

    #[test]
    fn near_unit_load_is_finite() {
        for rho in [1.0 - 1e-8, 1.0 + 1e-8, 1.0 + 1e-10] {
            let p = Mm1kConfig::new(rho, 1.0, 5).unwrap().stationary_distribution();
            assert!(p.iter().all(|x| x.is_finite()));
            assert!((p.iter().sum::<f64>() - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn huge_load_does_not_overflow() {
        let p = Mm1kConfig::new(1e3, 1.0, 400).unwrap().stationary_distribution();
        assert!((p.iter().sum::<f64>() - 1.0).abs() < 1e-12);
        assert!(p[400] > 0.99);
    }

    #[test]
    fn mixture_example_k2() {
        let (cpc, cpi, _, _) = Mm1kConfig::new(0.5, 1.0, 2).unwrap().decision_probabilities();
        let want = 4.0 / 6.0 * (0.5 + 0.25) + 2.0 / 6.0 * (0.5 + 0.125);
        assert!(rel(cpc, want) < 1e-15, "{cpc}");
        assert!((cpc + cpi - 1.0).abs() < 1e-15);
    }

    #[test]
    fn weights_are_a_distribution() {
        let q = Mm1kConfig::new(2.0, 1.0, 6).unwrap().accepted_weights();
        assert!(q.iter().all(|&x| (0.0..=1.0).contains(&x)));
        assert!((q.iter().sum::<f64>() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn k1_matches_bufferless() {
        for (l, m) in [(1.0, 1.0), (0.3, 2.0), (4.0, 1.5)] {
            let k = Mm1kConfig::new(l, m, 1).unwrap();
            let b = Mg11Config::new(l, ServiceDistribution::exponential(m).unwrap()).unwrap();
            let (cpc, cpi, pc, pi) = k.decision_probabilities();
            let (bcpc, bcpi) = b.conditional_decision_probabilities().unwrap();
            let (bpc, bpi) = b.decision_probabilities().unwrap();
            let (sc, si) = k.mean_penalties();
            let (bsc, bsi) = b.mean_penalties().unwrap();
            for (x, y) in [(cpc, bcpc), (cpi, bcpi), (pc, bpc), (pi, bpi), (sc, bsc), (si, bsi)] {
                assert!(rel(x, y) < 1e-12, "{x} vs {y}");
            }
            assert!(rel(k.missed_probability(), b.missed_probability()) < 1e-12);
        }
    }

    #[test]
    fn large_k_converges_to_mm1() {
        let k = Mm1kConfig::new(0.5, 1.0, 200).unwrap();
        let inf = Mg1Config::new(0.5, ServiceDistribution::exponential(1.0).unwrap()).unwrap();
        let (_, _, pc, _) = k.decision_probabilities();
        let (ipc, _) = inf.decision_probabilities().unwrap();
        assert!((pc - ipc).abs() < 1e-6);
        let (sc, si) = k.mean_penalties();
        let (isc, isi) = inf.mean_penalties().unwrap();
        assert!(rel(sc, isc) < 1e-6 && rel(si, isi) < 1e-6);
    }

    #[test]
    fn light_traffic() {
        let c = Mm1kConfig::new(1e-8, 2.0, 3).unwrap();
        let (cpc, _, _, _) = c.decision_probabilities();
        assert!(cpc > 1.0 - 1e-7);
        assert!((c.mean_penalties().0 - 0.5).abs() < 1e-6);
    }

    #[test]
    fn report_gaps() {
        let r = Mm1kConfig::new(1.0, 1.0, 3).unwrap().report().unwrap();
        assert!(r.mean_pumd.is_none() && r.total_pud.is_none());
        let r = Mm1kConfig::new(1.0, 1.0, 1).unwrap().report().unwrap();
        assert!(r.mean_pumd.is_some() && r.total_pud.is_some());
    }

    #[test]
    fn rejects_bad_config() {
        assert!(Mm1kConfig::new(1.0, 1.0, 0).is_err());
        assert!(Mm1kConfig::new(-1.0, 1.0, 2).is_err());
        assert!(Mm1kConfig::new(1.0, 0.0, 2).is_err());
    }
}
