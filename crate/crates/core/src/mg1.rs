//! Infinite-buffer M/GI/1 queue.
//!
//! A delivered packet's decision is correct exactly when an even number of
//! packets arrived during its system time `Y = W + T`, so everything reduces to
//! the Pollaczek-Khinchine transform of `Y` evaluated at `-2λ`:
//!
//! ```text
//! M_Y(γ) = -γ (1-ρ) M_T(γ) / (-γ - λ + λ M_T(γ))
//! ```
//!
//! with `M_T` the service-time MGF at the same argument `γ`.

use serde::{Deserialize, Serialize};

use crate::error::{PudError, Result};
use crate::report::AnalyticReport;
use crate::service::ServiceDistribution;

/// Loads above `1 - STABILITY_MARGIN` are rejected.
pub const STABILITY_MARGIN: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Mg1Config {
    lambda: f64,
    service: ServiceDistribution,
}

impl Mg1Config {
    pub fn new(lambda: f64, service: ServiceDistribution) -> Result<Self> {
        if !(lambda.is_finite() && lambda > 0.0) {
            return Err(PudError::InvalidParameter(format!("lambda must be > 0, got {lambda}")));
        }
        service.validate()?;
        let rho = lambda * service.mean();
        if rho > 1.0 - STABILITY_MARGIN {
            return Err(PudError::Unstable { rho });
        }
        Ok(Self { lambda, service })
    }

    pub fn lambda(&self) -> f64 {
        self.lambda
    }

    pub fn service(&self) -> &ServiceDistribution {
        &self.service
    }

    /// Offered load `ρ = λ E[T]`.
    pub fn load(&self) -> f64 {
        self.lambda * self.service.mean()
    }

    fn check_gamma(gamma: f64) -> Result<()> {
        if gamma < 0.0 {
            Ok(())
        } else {
            Err(PudError::Domain { gamma, bound: 0.0 })
        }
    }

    /// `M_Y(γ)` for `γ < 0`.
    pub fn system_time_mgf(&self, gamma: f64) -> Result<f64> {
        Self::check_gamma(gamma)?;
        let lam = self.lambda;
        let mt = self.service.mgf(gamma)?;
        Ok(-gamma * (1.0 - self.load()) * mt / (-gamma - lam + lam * mt))
    }

    /// `M_(Y,n)(γ) = E[Y^n e^{γY}]` for `n ∈ {1, 2}`, by differentiating the
    /// transform's numerator and denominator exactly.
    pub fn system_time_mgf_derivative(&self, n: u32, gamma: f64) -> Result<f64> {
        if !(1..=2).contains(&n) {
            return Err(PudError::Argument(format!("derivative order {n} not in 1..=2")));
        }
        Self::check_gamma(gamma)?;
        let lam = self.lambda;
        let idle = 1.0 - self.load();
        let m0 = self.service.mgf(gamma)?;
        let m1 = self.service.mgf_derivative(1, gamma)?;
        let m2 = self.service.mgf_derivative(2, gamma)?;

        let num = -gamma * idle * m0;
        let num1 = -idle * m0 - gamma * idle * m1;
        let num2 = -2.0 * idle * m1 - gamma * idle * m2;
        let den = -gamma - lam + lam * m0;
        let den1 = -1.0 + lam * m1;
        let den2 = lam * m2;

        let y0 = num / den;
        let y1 = (num1 - y0 * den1) / den;
        if n == 1 {
            return Ok(y1);
        }
        Ok((num2 - 2.0 * y1 * den1 - y0 * den2) / den)
    }

    /// `E[Y^n]` for `n ∈ {1, 2}` from the waiting-time moment recursion.
    pub fn system_time_moment(&self, n: u32) -> Result<f64> {
        let lam = self.lambda;
        let idle = 1.0 - self.load();
        let t1 = self.service.moment(1);
        let t2 = self.service.moment(2);
        let w1 = lam * t2 / (2.0 * idle);
        match n {
            1 => Ok(w1 + t1),
            2 => {
                let w2 = 2.0 * w1 * w1 + lam * self.service.moment(3) / (3.0 * idle);
                Ok(w2 + 2.0 * w1 * t1 + t2)
            }
            _ => Err(PudError::Argument(format!("moment order {n} not in 1..=2"))),
        }
    }

    /// `(p_C, p_I)`.
    pub fn decision_probabilities(&self) -> Result<(f64, f64)> {
        let my = self.system_time_mgf(-2.0 * self.lambda)?;
        Ok((0.5 + 0.5 * my, 0.5 - 0.5 * my))
    }

    /// `(E[σ_C], E[σ_I])`.
    pub fn mean_penalties(&self) -> Result<(f64, f64)> {
        let g = -2.0 * self.lambda;
        let (pc, pi) = self.decision_probabilities()?;
        let y1 = self.system_time_moment(1)?;
        let y2 = self.system_time_moment(2)?;
        let d1 = self.system_time_mgf_derivative(1, g)?;
        let d2 = self.system_time_mgf_derivative(2, g)?;
        Ok(((y1 + d1) / (2.0 * pc), (y1 + y2 - d1 - d2) / (2.0 * pi)))
    }

    /// Mean penalty per packet, `½(2E[Y] + E[Y²] - M_(Y,2)(-2λ))`.
    pub fn total_pud(&self) -> Result<f64> {
        let y1 = self.system_time_moment(1)?;
        let y2 = self.system_time_moment(2)?;
        let d2 = self.system_time_mgf_derivative(2, -2.0 * self.lambda)?;
        Ok(0.5 * (2.0 * y1 + y2 - d2))
    }

    pub fn report(&self) -> Result<AnalyticReport> {
        let (pc, pi) = self.decision_probabilities()?;
        let (sc, si) = self.mean_penalties()?;
        Ok(AnalyticReport {
            model: "mg1".into(),
            p_correct: pc,
            p_incorrect: pi,
            p_missed: 0.0,
            cond_p_correct: pc,
            cond_p_incorrect: pi,
            mean_pucd: sc,
            mean_puid: si,
            mean_pumd: Some(0.0),
            total_pud: Some(self.total_pud()?),
            missed_joint: None,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::oracle::richardson_derivative;

    fn mm1(lambda: f64, mu: f64) -> Mg1Config {
        Mg1Config::new(lambda, ServiceDistribution::exponential(mu).unwrap()).unwrap()
    }

    fn rel(a: f64, b: f64) -> f64 {
        (a - b).abs() / b.abs()
    }

    #[test]
    fn mm1_transform_examples() {
        assert!(rel(mm1(0.5, 1.0).system_time_mgf(-1.0).unwrap(), 1.0 / 3.0) < 1e-14);
        assert!(rel(mm1(0.5, 2.0).system_time_mgf(-1.0).unwrap(), 0.6) < 1e-14);
        let c = mm1(0.5, 1.0);
        assert!(rel(c.system_time_mgf_derivative(1, -1.0).unwrap(), 2.0 / 9.0) < 1e-14);
        assert!(rel(c.system_time_mgf_derivative(2, -1.0).unwrap(), 8.0 / 27.0) < 1e-14);
        assert!((c.system_time_mgf(-1e-6).unwrap() - 1.0).abs() < 1e-5);
    }

    #[test]
    fn moments() {
        let c = mm1(0.5, 1.0);
        assert!(rel(c.system_time_moment(1).unwrap(), 2.0) < 1e-14);
        assert!(rel(c.system_time_moment(2).unwrap(), 8.0) < 1e-14);
        let tiny = mm1(1e-9, 1.0);
        assert!(rel(tiny.system_time_moment(1).unwrap(), 1.0) < 1e-8);
    }

    #[test]
    fn closed_form_values_mm1() {
        let c = mm1(0.5, 1.0);
        let (pc, pi) = c.decision_probabilities().unwrap();
        assert!(rel(pc, 2.0 / 3.0) < 1e-14 && rel(pi, 1.0 / 3.0) < 1e-14);
        let (sc, si) = c.mean_penalties().unwrap();
        assert!(rel(sc, 5.0 / 3.0) < 1e-13, "{sc}");
        assert!(rel(si, 128.0 / 9.0) < 1e-13, "{si}");
        assert!(rel(c.total_pud().unwrap(), 6.0 - 4.0 / 27.0) < 1e-13);
    }

    #[test]
    fn light_traffic_limits() {
        // The transform quotient loses about eps/λ, so stay at λ = 1e-4 where
        // the O(λ) approach to the limit is still resolved.
        let c = mm1(1e-4, 1.0);
        let (pc, _) = c.decision_probabilities().unwrap();
        assert!(pc > 1.0 - 1e-3);
        let (sc, _) = c.mean_penalties().unwrap();
        assert!((sc - 1.0).abs() < 1e-3);
        assert!((c.total_pud().unwrap() - 1.0).abs() < 1e-3);
    }

    #[test]
    fn heavy_traffic_coin_toss() {
        let (pc, _) = mm1(0.999, 1.0).decision_probabilities().unwrap();
        assert!((pc - 0.5).abs() < 1e-3);
    }

    #[test]
    fn instability_and_domain() {
        let e = ServiceDistribution::exponential(1.0).unwrap();
        assert!(matches!(Mg1Config::new(1.5, e), Err(PudError::Unstable { .. })));
        assert!(matches!(Mg1Config::new(1.0, e), Err(PudError::Unstable { .. })));
        assert!(Mg1Config::new(0.0, e).is_err());
        let c = mm1(0.5, 1.0);
        assert!(matches!(c.system_time_mgf(0.0), Err(PudError::Domain { .. })));
        assert!(c.system_time_mgf_derivative(3, -1.0).is_err());
    }

    #[test]
    fn finite_difference_matches_quotient_rule() {
        let configs = [
            mm1(0.3, 1.0),
            Mg1Config::new(0.4, ServiceDistribution::gamma(2.0, 3.0).unwrap()).unwrap(),
            Mg1Config::new(0.7, ServiceDistribution::deterministic(1.0).unwrap()).unwrap(),
        ];
        for c in configs {
            let g = -2.0 * c.lambda();
            let fd = richardson_derivative(|x| c.system_time_mgf(x).unwrap(), g, 0.05 * c.lambda());
            let exact = c.system_time_mgf_derivative(1, g).unwrap();
            assert!(rel(exact, fd) < 1e-7, "{exact} vs {fd}");
            let fd2 = richardson_derivative(|x| c.system_time_mgf_derivative(1, x).unwrap(), g, 0.05 * c.lambda());
            let exact2 = c.system_time_mgf_derivative(2, g).unwrap();
            assert!(rel(exact2, fd2) < 1e-7, "{exact2} vs {fd2}");
        }
    }

    #[test]
    fn pc_strictly_decreasing_in_lambda() {
        let pcs: Vec<f64> = (1..=9).map(|k| mm1(k as f64 / 10.0, 1.0).decision_probabilities().unwrap().0).collect();
        assert!(pcs.windows(2).all(|w| w[1] < w[0]), "{pcs:?}");
        assert!(pcs.iter().all(|&p| p > 0.5 && p < 1.0));
    }
}
