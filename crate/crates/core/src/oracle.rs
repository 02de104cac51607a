//! Independent reference computations.
//!
//! Nothing in the shipped analytic path calls into this module. It exists so
//! that the closed forms can be checked against numbers produced by a
//! different route: adaptive quadrature against the service density,
//! truncated Poisson series, and Richardson-extrapolated finite differences.

use crate::error::{PudError, Result};
use crate::mg11::MissEventClass;
use crate::service::ServiceDistribution;

// Gauss-Kronrod 7/15 nodes and weights on [-1, 1].
const XGK: [f64; 8] = [
    0.991_455_371_120_812_6,
    0.949_107_912_342_758_5,
    0.864_864_423_359_769_1,
    0.741_531_185_599_394_4,
    0.586_087_235_467_691_1,
    0.405_845_151_377_397_2,
    0.207_784_955_007_898_5,
    0.0,
];
const WGK: [f64; 8] = [
    0.022_935_322_010_529_22,
    0.063_092_092_629_978_55,
    0.104_790_010_322_250_2,
    0.140_653_259_715_525_9,
    0.169_004_726_639_267_9,
    0.190_350_578_064_785_4,
    0.204_432_940_075_298_9,
    0.209_482_141_084_728,
];
const WG: [f64; 4] =
    [0.129_484_966_168_869_7, 0.279_705_391_489_276_7, 0.381_830_050_505_118_9, 0.417_959_183_673_469_4];

fn gk15<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64) -> (f64, f64) {
    let c = 0.5 * (a + b);
    let h = 0.5 * (b - a);
    let fc = f(c);
    let mut kronrod = fc * WGK[7];
    let mut gauss = fc * WG[3];
    for j in 0..7 {
        let x = h * XGK[j];
        let pair = f(c - x) + f(c + x);
        kronrod += WGK[j] * pair;
        if j % 2 == 1 {
            gauss += WG[j / 2] * pair;
        }
    }
    (kronrod * h, ((kronrod - gauss) * h).abs())
}

/// Adaptive Gauss-Kronrod integration of `f` over `[a, b]`.
///
/// Bisects the interval with the largest error estimate until the summed
/// estimate drops below `max(abs_tol, rel_tol * |integral|)`.
pub fn integrate<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, abs_tol: f64, rel_tol: f64) -> Result<f64> {
    const MAX_INTERVALS: usize = 20_000;
    let (v, e) = gk15(&f, a, b);
    let mut parts = vec![(a, b, v, e)];
    loop {
        let total: f64 = parts.iter().map(|p| p.2).sum();
        let err: f64 = parts.iter().map(|p| p.3).sum();
        if !total.is_finite() {
            return Err(PudError::Numeric(format!("non-finite integral on [{a}, {b}]")));
        }
        if err <= abs_tol.max(rel_tol * total.abs()) {
            return Ok(total);
        }
        if parts.len() >= MAX_INTERVALS {
            return Err(PudError::Numeric(format!(
                "quadrature did not converge on [{a}, {b}]: estimate {total}, error {err}"
            )));
        }
        let worst =
            parts.iter().enumerate().max_by(|x, y| x.1 .3.total_cmp(&y.1 .3)).map(|(i, _)| i).expect("nonempty");
        let (lo, hi, _, _) = parts.swap_remove(worst);
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            return Err(PudError::Numeric(format!("interval collapsed near {lo}")));
        }
        let (v1, e1) = gk15(&f, lo, mid);
        let (v2, e2) = gk15(&f, mid, hi);
        parts.push((lo, mid, v1, e1));
        parts.push((mid, hi, v2, e2));
    }
}

/// Integrates `f` over `[0, inf)` for an integrand with exponential decay at
/// rate roughly `decay` beyond `mode`. Panels of width `1/decay` are added
/// past the mode until a panel contributes less than 1e-16 of the running sum.
pub fn integrate_half_line<F: Fn(f64) -> f64>(f: F, decay: f64, mode: f64) -> Result<f64> {
    let width = 1.0 / decay;
    let mut lo = 0.0;
    let mut acc = 0.0;
    for _ in 0..100_000 {
        let hi = lo + width;
        let part = integrate(&f, lo, hi, 1e-300, 1e-13)?;
        acc += part;
        if lo > mode && part.abs() <= 1e-16 * acc.abs() {
            return Ok(acc);
        }
        lo = hi;
    }
    Err(PudError::Numeric("half-line integral did not settle".into()))
}

/// `E[T^n e^{γT}]` by quadrature against the service density, independent of
/// the closed forms in [`ServiceDistribution::mgf_derivative`].
pub fn mgf_derivative_oracle(dist: &ServiceDistribution, n: u32, gamma: f64) -> Result<f64> {
    expect_over_service(dist, gamma, n as f64, |t| t.powi(n as i32) * (gamma * t).exp())
}

/// `E[g(T)]` where `g` grows at most like `t^power e^{γt}`.
pub fn expect_over_service<G: Fn(f64) -> f64>(dist: &ServiceDistribution, gamma: f64, power: f64, g: G) -> Result<f64> {
    let bound = dist.mgf_bound();
    if gamma >= bound {
        return Err(PudError::Domain { gamma, bound });
    }
    match *dist {
        ServiceDistribution::Deterministic { value } => Ok(g(value)),
        ServiceDistribution::Exponential { rate } => {
            let decay = rate - gamma;
            integrate_half_line(|t| g(t) * dist.density(t).unwrap(), decay, (power + 1.0) / decay)
        }
        ServiceDistribution::Gamma { shape, rate } => {
            let decay = rate - gamma;
            let f = |t: f64| if t <= 0.0 { 0.0 } else { g(t) * dist.density(t).unwrap() };
            integrate_half_line(f, decay, (power + shape) / decay)
        }
    }
}

/// Richardson-extrapolated central difference of `f` at `x`.
pub fn richardson_derivative<F: Fn(f64) -> f64>(f: F, x: f64, h: f64) -> f64 {
    const LEVELS: usize = 6;
    let mut table = [[0.0f64; LEVELS]; LEVELS];
    let mut step = h;
    for i in 0..LEVELS {
        table[i][0] = (f(x + step) - f(x - step)) / (2.0 * step);
        let mut factor = 4.0;
        for j in 1..=i {
            table[i][j] = (factor * table[i][j - 1] - table[i - 1][j - 1]) / (factor - 1.0);
            factor *= 4.0;
        }
        step *= 0.5;
    }
    table[LEVELS - 1][LEVELS - 1]
}

/// Conditional expected missed penalty summed over the drops of one service
/// period of length `t` that fall in `class`, via the truncated Poisson series.
///
/// The per-drop term uses the beta moments of `t - X_n`, which is
/// `t * Beta(m-n+1, n)`: `E[n (t - X_n)] = n t (m-n+1)/(m+1)` and
/// `E[n (t - X_n)^2] = n t^2 (m-n+1)(m-n+2)/((m+1)(m+2))`.
pub fn missed_series_given_service(lambda: f64, t: f64, class: MissEventClass) -> f64 {
    let lt = lambda * t;
    if lt <= 0.0 {
        return 0.0;
    }
    let want = |m: u64, n: u64| match class {
        MissEventClass::I1 => m.is_multiple_of(2) && n.is_multiple_of(2),
        MissEventClass::I2 => m.is_multiple_of(2) && n % 2 == 1,
        MissEventClass::I3 => m % 2 == 1 && n.is_multiple_of(2),
        MissEventClass::I4 => m % 2 == 1 && n % 2 == 1,
    };
    let mut log_pmf = -lt; // m = 0
    let mut cumulative = log_pmf.exp();
    let mut total = 0.0;
    let mut m = 0u64;
    loop {
        m += 1;
        log_pmf += lt.ln() - (m as f64).ln();
        let pmf = log_pmf.exp();
        cumulative += pmf;
        let mf = m as f64;
        let mut inner = 0.0;
        for n in 1..=m {
            if !want(m, n) {
                continue;
            }
            let nf = n as f64;
            let tail = mf - nf + 1.0;
            inner += if (m - n).is_multiple_of(2) {
                nf * t * tail / (mf + 1.0)
            } else {
                nf * t * t * tail * (tail + 1.0) / ((mf + 1.0) * (mf + 2.0))
            };
        }
        total += pmf * inner;
        if mf > lt && 1.0 - cumulative < 1e-12 {
            // A few more terms so the polynomial growth of `inner` is covered.
            if pmf * inner <= 1e-18 * total.abs() || mf > lt + 40.0 * lt.sqrt() + 60.0 {
                return total;
            }
        }
    }
}

/// `E[sigma_M ; I = class]` per served packet: the series above integrated
/// against the service law.
pub fn joint_missed_penalty_oracle(dist: &ServiceDistribution, lambda: f64, class: MissEventClass) -> Result<f64> {
    // The series grows like t^4 lambda^2 for large t; the decay is the service tail.
    expect_over_service(dist, 0.0, 4.0, |t| missed_series_given_service(lambda, t, class))
}
