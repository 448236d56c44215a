//! Selberg zeta function for `Re s > 1`: Euler product and McKean's
//! heat-trace integral.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::extended_log::ExtendedLog;
use crate::heat::{integrate_half_line, listed_trace};
use crate::quadrature::{integrate, QuadSettings};
use crate::spectrum::{pgt_exponent, LengthSpectrum};
use crate::sum::NeumaierSum;

/// `log Z(s)` over the listed spectrum.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ZetaEvaluation {
    pub s: f64,
    pub log_value: f64,
    /// Number of `k` factors summed termwise; the rest is summed in closed form.
    pub k_terms: u32,
    pub spectrum_cutoff: f64,
    /// Log of a bound on the contribution of geodesics beyond the cutoff.
    pub tail_log_bound: ExtendedLog,
}

fn check_inputs(spec: &LengthSpectrum, s: f64, k_max: u32) -> Result<()> {
    if !(s > 1.0) || !s.is_finite() {
        return Err(Error::Range(format!("the Euler product needs s > 1, got {s}")));
    }
    if k_max < 1 {
        return Err(Error::Domain("k_max must be at least 1".into()));
    }
    spec.require_stabilized()?;
    if spec.entries().is_empty() {
        return Err(Error::EmptySpectrum { cutoff: spec.cutoff() });
    }
    Ok(())
}

/// Sums `sum_{m >= 1} term(m)` for a positive, eventually geometric series.
fn series(term: impl Fn(f64) -> f64) -> f64 {
    let mut acc = NeumaierSum::default();
    for m in 1..10_000 {
        let v = term(f64::from(m));
        acc.add(v);
        if v <= 1e-18 * acc.total() {
            break;
        }
    }
    acc.total()
}

/// `sum_k log(1 - e^{-(s+k) l})` for one length.
fn log_factor(l: f64, s: f64, k_max: u32) -> f64 {
    let mut acc = NeumaierSum::default();
    for k in 0..=k_max {
        acc.add((-(-(s + f64::from(k)) * l).exp()).ln_1p());
    }
    // Remaining k: -sum_m x^m q^{(K+1) m} / (m (1 - q^m)), x = e^{-s l}, q = e^{-l}.
    let a = (s + f64::from(k_max) + 1.0) * l;
    acc.add(-series(|m| (-m * a).exp() / (m * -(-m * l).exp_m1())));
    acc.total()
}

/// `sum_k l e^{-(s+k) l} / (1 - e^{-(s+k) l})` for one length.
fn log_derivative_factor(l: f64, s: f64, k_max: u32) -> f64 {
    let mut acc = NeumaierSum::default();
    for k in 0..=k_max {
        let a = (s + f64::from(k)) * l;
        acc.add(l * (-a).exp() / -(-a).exp_m1());
    }
    let a = (s + f64::from(k_max) + 1.0) * l;
    acc.add(l * series(|m| (-m * a).exp() / -(-m * l).exp_m1()));
    acc.total()
}

/// Log of a bound on `sum_{l > L} sum_k |log(1 - e^{-(s+k) l})|` assuming
/// at most `C e^u` geodesics of length `u`.
fn primitive_tail_log_bound(spec: &LengthSpectrum, s: f64) -> Result<ExtendedLog> {
    let Some(systole) = spec.systole() else {
        return Ok(ExtendedLog::finite(f64::NEG_INFINITY));
    };
    if spec.genus() < 2 {
        // A non-surface spectrum is taken as complete.
        return Ok(ExtendedLog::finite(f64::NEG_INFINITY));
    }
    let cut = spec.cutoff();
    // Each length contributes at most e^{-s l} / ((1 - e^{-L}) (1 - e^{-s L})), and
    // int_L^inf e^{-s u} dN(u) <= C s e^{-(s-1) L} / (s - 1).
    let log_c = pgt_exponent(spec.genus(), systole);
    let log_bound = log_c + s.ln() - (s - 1.0).ln() - (s - 1.0) * cut
        - (-(-cut).exp_m1()).ln()
        - (-(-s * cut).exp_m1()).ln();
    if !log_bound.is_finite() {
        return Err(Error::TailDivergence(format!("no finite tail bound at s = {s}")));
    }
    Ok(ExtendedLog::finite(log_bound))
}

/// `log Z(s) = sum_gamma sum_{k >= 0} log(1 - e^{-(s+k) l(gamma)})` over the
/// listed oriented primitive geodesics.
pub fn selberg_zeta_log(spec: &LengthSpectrum, s: f64, k_max: u32) -> Result<ZetaEvaluation> {
    check_inputs(spec, s, k_max)?;
    let mut acc = NeumaierSum::default();
    for e in spec.entries() {
        acc.add(f64::from(e.multiplicity) * log_factor(e.length, s, k_max));
    }
    Ok(ZetaEvaluation {
        s,
        log_value: acc.total(),
        k_terms: k_max + 1,
        spectrum_cutoff: spec.cutoff(),
        tail_log_bound: primitive_tail_log_bound(spec, s)?,
    })
}

/// `Z'/Z(s)` from the termwise derivative of the Euler product.
pub fn zeta_log_derivative_product(spec: &LengthSpectrum, s: f64, k_max: u32) -> Result<f64> {
    check_inputs(spec, s, k_max)?;
    let mut acc = NeumaierSum::default();
    for e in spec.entries() {
        acc.add(f64::from(e.multiplicity) * log_derivative_factor(e.length, s, k_max));
    }
    Ok(acc.total())
}

/// Power cap used inside the McKean integrand; terms with `n l` beyond 60 are
/// below `e^{-30}` of the first one for every `s > 1`.
const MCKEAN_POWER_CAP: u32 = 400;

/// `Z'/Z(s) = (2s - 1) int_0^inf HTr(t) e^{-s(s-1) t} dt`, with the heat
/// trace of the listed spectrum.
pub fn zeta_log_derivative_mckean(spec: &LengthSpectrum, s: f64, quad: &QuadSettings) -> Result<f64> {
    check_inputs(spec, s, 1)?;
    let lmin = spec.entries()[0].length;
    let lmax = spec.entries().last().map(|e| e.length).unwrap_or(lmin);
    // HTr(t) e^{-s(s-1)t} decays like e^{-(s - 1/2)^2 t}; the Laplace peaks sit near t = n l / (2s - 1).
    let a = (s - 0.5) * (s - 0.5);
    let end = (lmax / (2.0 * s - 1.0)).max(1.0) + 60.0 / a;
    let integrand = |t: f64| {
        if t <= 0.0 {
            return 0.0;
        }
        listed_trace(spec, t, MCKEAN_POWER_CAP).0 * (-s * (s - 1.0) * t).exp()
    };
    let scale = (lmin / (2.0 * s - 1.0)).min(1.0);
    let v = integrate_half_line(integrand, scale, end, quad)?;
    Ok((2.0 * s - 1.0) * v)
}

/// `log Z(n) - log Z(2)`, checked against `int_2^n Z'/Z ds`.
pub fn zeta_ratio_log(spec: &LengthSpectrum, n: u32, k_max: u32) -> Result<f64> {
    if n < 2 {
        return Err(Error::Domain(format!("n must be at least 2, got {n}")));
    }
    if n == 2 {
        check_inputs(spec, 2.0, k_max)?;
        return Ok(0.0);
    }
    let top = f64::from(n);
    let diff = selberg_zeta_log(spec, top, k_max)?.log_value - selberg_zeta_log(spec, 2.0, k_max)?.log_value;
    let settings = QuadSettings::with_tolerances(1e-14, 1e-12);
    let integral = integrate(
        |s| zeta_log_derivative_product(spec, s, k_max).unwrap_or(f64::NAN),
        2.0,
        top,
        &settings,
    )?
    .value;
    if (diff - integral).abs() > 1e-6 * diff.abs().max(1e-300) && (diff - integral).abs() > 1e-12 {
        return Err(Error::Invariant(format!(
            "log Z({n}) - log Z(2): difference {diff} disagrees with integral {integral}"
        )));
    }
    Ok(diff)
}

/// Extrapolated `Z'(1)`; the truncated Euler product does not converge at
/// `s = 1`, so the error of this value is not controlled.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ZetaPrimeAtOne {
    pub log_value: f64,
    pub abscissae: [f64; 3],
    pub experimental: bool,
}

/// Richardson extrapolation of `Z(s) / (s - 1)` from `s = 1.1, 1.05, 1.025`.
pub fn zeta_prime_at_one_experimental(spec: &LengthSpectrum, k_max: u32) -> Result<ZetaPrimeAtOne> {
    let hs = [0.1, 0.05, 0.025];
    let mut f = [0.0; 3];
    for (i, h) in hs.iter().enumerate() {
        f[i] = selberg_zeta_log(spec, 1.0 + h, k_max)?.log_value.exp() / h;
    }
    let r1 = 2.0 * f[1] - f[0];
    let r2 = 2.0 * f[2] - f[1];
    let value = (4.0 * r2 - r1) / 3.0;
    if !(value > 0.0) {
        return Err(Error::Invariant(format!("extrapolated Z'(1) = {value} is not positive")));
    }
    Ok(ZetaPrimeAtOne {
        log_value: value.ln(),
        abscissae: hs.map(|h| 1.0 + h),
        experimental: true,
    })
}
