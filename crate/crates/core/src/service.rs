//! Service-time laws.
//!
//! Every closed form in this crate consumes the service time `T` only through
//! its moments `E[T^n]`, its MGF `E[e^{γT}]` and the derivative quantities
//! `E[T^n e^{γT}]`. Each built-in law supplies those exactly. A new law needs
//! a variant here plus the four closed forms (`moment`, `mgf`,
//! `mgf_derivative`, `density`) and a sampler arm.

use std::fmt;
use std::str::FromStr;

use rand::Rng;
use rand_distr::{Distribution, Exp, Gamma};
use serde::{Deserialize, Serialize};
use statrs::function::gamma::ln_gamma;

use crate::error::{PudError, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "law", rename_all = "lowercase")]
pub enum ServiceDistribution {
    /// Exponential with rate `rate` (mean `1/rate`).
    Exponential { rate: f64 },
    /// Gamma with shape `shape` and rate `rate` (mean `shape/rate`).
    Gamma { shape: f64, rate: f64 },
    /// Point mass at `value`.
    Deterministic { value: f64 },
}

fn positive(name: &str, v: f64) -> Result<f64> {
    if v.is_finite() && v > 0.0 {
        Ok(v)
    } else {
        Err(PudError::InvalidParameter(format!("{name} must be finite and > 0, got {v}")))
    }
}

/// Rising factorial `a (a+1) ... (a+n-1)`.
fn rising(a: f64, n: u32) -> f64 {
    (0..n).fold(1.0, |acc, k| acc * (a + k as f64))
}

impl ServiceDistribution {
    pub fn exponential(rate: f64) -> Result<Self> {
        Ok(Self::Exponential { rate: positive("rate", rate)? })
    }

    pub fn gamma(shape: f64, rate: f64) -> Result<Self> {
        Ok(Self::Gamma { shape: positive("shape", shape)?, rate: positive("rate", rate)? })
    }

    pub fn deterministic(value: f64) -> Result<Self> {
        Ok(Self::Deterministic { value: positive("value", value)? })
    }

    /// Checks parameter positivity; variants built by hand bypass the constructors.
    pub fn validate(&self) -> Result<()> {
        match *self {
            Self::Exponential { rate } => positive("rate", rate).map(drop),
            Self::Gamma { shape, rate } => {
                positive("shape", shape)?;
                positive("rate", rate).map(drop)
            }
            Self::Deterministic { value } => positive("value", value).map(drop),
        }
    }

    pub fn mean(&self) -> f64 {
        self.moment(1)
    }

    /// `E[T^n]`.
    pub fn moment(&self, n: u32) -> f64 {
        match *self {
            Self::Exponential { rate } => rising(1.0, n) / rate.powi(n as i32),
            Self::Gamma { shape, rate } => rising(shape, n) / rate.powi(n as i32),
            Self::Deterministic { value } => value.powi(n as i32),
        }
    }

    /// Supremum of the MGF domain; `+inf` when the MGF is entire.
    pub fn mgf_bound(&self) -> f64 {
        match *self {
            Self::Exponential { rate } | Self::Gamma { rate, .. } => rate,
            Self::Deterministic { .. } => f64::INFINITY,
        }
    }

    fn check_domain(&self, gamma: f64) -> Result<()> {
        let bound = self.mgf_bound();
        if gamma.is_nan() || gamma >= bound {
            Err(PudError::Domain { gamma, bound })
        } else {
            Ok(())
        }
    }

    /// `E[e^{γT}]`.
    pub fn mgf(&self, gamma: f64) -> Result<f64> {
        self.mgf_derivative(0, gamma)
    }

    /// `E[T^n e^{γT}]`, the n-th derivative of the MGF at `gamma`.
    pub fn mgf_derivative(&self, n: u32, gamma: f64) -> Result<f64> {
        self.check_domain(gamma)?;
        Ok(match *self {
            Self::Exponential { rate } => rising(1.0, n) * rate / (rate - gamma).powi(n as i32 + 1),
            Self::Gamma { shape, rate } => {
                let gap = rate - gamma;
                (rate / gap).powf(shape) * rising(shape, n) / gap.powi(n as i32)
            }
            Self::Deterministic { value } => value.powi(n as i32) * (gamma * value).exp(),
        })
    }

    /// Lebesgue density, `None` for the point mass.
    pub fn density(&self, t: f64) -> Option<f64> {
        match *self {
            Self::Exponential { rate } => Some(if t < 0.0 { 0.0 } else { rate * (-rate * t).exp() }),
            Self::Gamma { shape, rate } => Some(if t < 0.0 || (t == 0.0 && shape > 1.0) {
                0.0
            } else if t == 0.0 {
                if shape == 1.0 {
                    rate
                } else {
                    f64::INFINITY
                }
            } else {
                (shape * rate.ln() + (shape - 1.0) * t.ln() - rate * t - ln_gamma(shape)).exp()
            }),
            Self::Deterministic { .. } => None,
        }
    }

    /// Prepares a sampler; prefer this over [`sample`](Self::sample) in loops.
    pub fn sampler(&self) -> ServiceSampler {
        match *self {
            Self::Exponential { rate } => ServiceSampler::Exponential(Exp::new(rate).expect("validated rate")),
            Self::Gamma { shape, rate } => {
                ServiceSampler::Gamma(Gamma::new(shape, 1.0 / rate).expect("validated shape/rate"))
            }
            Self::Deterministic { value } => ServiceSampler::Deterministic(value),
        }
    }

    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        self.sampler().sample(rng)
    }
}

#[derive(Debug, Clone, Copy)]
pub enum ServiceSampler {
    Exponential(Exp<f64>),
    Gamma(Gamma<f64>),
    Deterministic(f64),
}

impl Distribution<f64> for ServiceSampler {
    fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        match self {
            ServiceSampler::Exponential(d) => d.sample(rng),
            ServiceSampler::Gamma(d) => d.sample(rng),
            ServiceSampler::Deterministic(v) => *v,
        }
    }
}

impl fmt::Display for ServiceDistribution {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match *self {
            Self::Exponential { rate } => write!(f, "exp:mu={rate}"),
            Self::Gamma { shape, rate } => write!(f, "gamma:alpha={shape},rate={rate}"),
            Self::Deterministic { value } => write!(f, "det:d={value}"),
        }
    }
}

/// Parses `exp:mu=<f>`, `gamma:alpha=<f>,rate=<f>` and `det:d=<f>`.
impl FromStr for ServiceDistribution {
    type Err = PudError;

    fn from_str(s: &str) -> Result<Self> {
        let err = |reason: &str| PudError::Parse { input: s.to_string(), reason: reason.to_string() };
        let (law, params) = s.trim().split_once(':').ok_or_else(|| err("expected <law>:<params>"))?;
        let mut fields = Vec::new();
        for kv in params.split(',') {
            let (k, v) = kv.split_once('=').ok_or_else(|| err("expected key=value"))?;
            let v: f64 = v.trim().parse().map_err(|_| err("parameter is not a number"))?;
            fields.push((k.trim(), v));
        }
        let get = |key: &str| {
            fields
                .iter()
                .find(|(k, _)| *k == key)
                .map(|&(_, v)| v)
                .ok_or_else(|| err(&format!("missing parameter `{key}`")))
        };
        let expect_len = |n: usize| {
            if fields.len() == n {
                Ok(())
            } else {
                Err(err("unexpected parameters"))
            }
        };
        match law.trim() {
            "exp" => {
                expect_len(1)?;
                Self::exponential(get("mu")?)
            }
            "gamma" => {
                expect_len(2)?;
                Self::gamma(get("alpha")?, get("rate")?)
            }
            "det" => {
                expect_len(1)?;
                Self::deterministic(get("d")?)
            }
            other => Err(err(&format!("unknown law `{other}`"))),
        }
    }
}
