//! Heat kernel of the hyperbolic plane and the geodesic side of the heat trace.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::ball::Ball;
use crate::error::{Error, Result};
use crate::group::GroupPresentation;
use crate::moebius::{hyperbolic_distance, Point};
use crate::quadrature::{integrate_with_breakpoints, QuadSettings};
use crate::spectrum::{generator_alphabet, pgt_exponent, LengthSpectrum, DEFAULT_BUDGET};
use crate::sum::NeumaierSum;

const KERNEL_REL_TOL: f64 = 1e-13;

/// Heat kernel `K(t; rho)` of the hyperbolic plane at distance `rho`.
pub fn heat_kernel_h(t: f64, rho: f64) -> Result<f64> {
    heat_kernel_h_with(t, rho, KERNEL_REL_TOL)
}

/// As [`heat_kernel_h`] with an explicit relative quadrature tolerance.
pub fn heat_kernel_h_with(t: f64, rho: f64, rel_tol: f64) -> Result<f64> {
    if !(t > 0.0) || !t.is_finite() {
        return Err(Error::Domain(format!("heat kernel needs t > 0, got {t}")));
    }
    if !(rho >= 0.0) || !rho.is_finite() {
        return Err(Error::Domain(format!("heat kernel needs rho >= 0, got {rho}")));
    }
    // s = rho + sigma^2, with exp(-rho^2 / 4t - rho / 2) taken out of the integral.
    let integrand = |sigma: f64| {
        if sigma == 0.0 {
            return if rho == 0.0 { 0.0 } else { 2.0 * rho * (2.0 / -(-2.0 * rho).exp_m1()).sqrt() };
        }
        let u = sigma * sigma;
        let gauss = (-(2.0 * rho * u + u * u) / (4.0 * t)).exp();
        let denom = (0.5 * u).exp() * (-(-2.0 * rho - u).exp_m1()) * (0.5 * u).sinh();
        2.0 * sigma * (rho + u) * gauss / denom.sqrt()
    };
    // Beyond this point the Gaussian factor is below e^-120.
    let u_max = (rho * rho + 480.0 * t).sqrt() - rho;
    let sigma_max = u_max.sqrt().max(1e-6);
    let points = [0.0, sigma_max / 64.0, sigma_max / 16.0, sigma_max / 4.0, sigma_max];
    let settings = QuadSettings {
        abs_tol: 0.0,
        rel_tol,
        max_subdivisions: 2000,
    };
    let j = integrate_with_breakpoints(integrand, &points, &settings)?.value;
    let log_prefactor = 0.5 * 2f64.ln() - 0.25 * t - 1.5 * (4.0 * PI * t).ln() - rho * rho / (4.0 * t) - 0.5 * rho;
    Ok(log_prefactor.exp() * j)
}

/// How the geodesics beyond the spectrum cutoff enter the heat trace.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum TailModel {
    /// Only the listed geodesics contribute.
    #[default]
    None,
    /// Closed geodesics (powers included) longer than the cutoff are
    /// replaced by the smooth part of their counting measure, corrected at
    /// the cutoff by the excess of the listed count over that smooth part.
    PrimeGeodesic,
}

/// The non-identity part of the heat trace at one time.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct HeatTraceSample {
    pub t: f64,
    pub value: f64,
    /// Majorant for everything left out: power terms beyond the cap and,
    /// for surfaces, primitive geodesics beyond the cutoff under the
    /// prime geodesic envelope.
    pub tail_bound: f64,
    /// Contribution of the tail model included in `value`.
    pub tail_estimate: f64,
}

fn prefactor(t: f64) -> f64 {
    (-0.25 * t).exp() / (2.0 * (4.0 * PI * t).sqrt())
}

/// `l e^{-l^2 / 4t} / sinh(l / 2)`, evaluated without overflow.
fn geodesic_weight(l: f64, t: f64) -> f64 {
    2.0 * l * (-l * l / (4.0 * t) - 0.5 * l).exp() / (-(-l).exp_m1())
}

/// Sum over powers of one primitive length, returning the bound on the
/// powers beyond the cap alongside.
fn power_sum(l: f64, t: f64, power_cap: u32) -> (f64, f64) {
    let mut s = NeumaierSum::default();
    let mut last = 0;
    for n in 1..=power_cap {
        let nl = f64::from(n) * l;
        let term = l * (-nl * nl / (4.0 * t) - 0.5 * nl).exp() * 2.0 / (-(-nl).exp_m1());
        s.add(term);
        last = n;
        if term <= 1e-18 * s.total() {
            break;
        }
    }
    let m = f64::from(last + 1) * l;
    // For n > N: gaussian(n) <= gaussian(N+1), e^{-nl/2} is geometric and 1/(1-e^{-nl}) <= 1/(1-e^{-(N+1)l}).
    let rest = l * 2.0 * (-m * m / (4.0 * t) - 0.5 * m).exp() / (-(-m).exp_m1()) / (-(-0.5 * l).exp_m1());
    (s.total(), rest)
}

fn tail_settings() -> QuadSettings {
    QuadSettings {
        abs_tol: 0.0,
        rel_tol: 1e-12,
        max_subdivisions: 2000,
    }
}

fn integrate_beyond<F: Fn(f64) -> f64>(f: F, cut: f64, t: f64) -> Result<f64> {
    let peak = t.max(cut);
    let end = peak + 40.0 * t.sqrt() + 40.0;
    let mut points = vec![cut];
    if peak > cut {
        points.push(peak);
    }
    points.push(end);
    Ok(integrate_with_breakpoints(f, &points, &tail_settings())?.value)
}

/// `int_L^inf e^u w(u) du` with `w` from [`geodesic_weight`].
fn exp_weighted_tail(cut: f64, t: f64) -> Result<f64> {
    integrate_beyond(|u| 2.0 * u * (0.5 * u - u * u / (4.0 * t)).exp() / (-(-u).exp_m1()), cut, t)
}

/// Smooth part of the length counting measure of a surface with area
/// `4 pi (g - 1)`, weighted by `l(gamma) / (2 sinh(l(gamma^n) / 2))`.
fn smooth_density(u: f64, genus: u32) -> f64 {
    let q = (-u).exp();
    (0.5 * u).exp() * (1.0 + q) + 2.0 * f64::from(genus - 1) * (-0.5 * u).exp() * (1.0 + q) / ((1.0 - q) * (1.0 - q))
}

/// Cumulative smooth measure up to `l`, normalized so that `excess` below
/// is the boundary term of the trace formula.
fn smooth_count(l: f64, genus: u32) -> f64 {
    4.0 * (0.5 * l).sinh() - 2.0 * f64::from(genus - 1) / (0.5 * l).sinh()
}

/// Listed terms with `l(gamma^n) <= L`, and the excess of their weights
/// over the smooth count at `L`.
fn truncated_trace(spec: &LengthSpectrum, t: f64) -> (f64, f64) {
    let cut = spec.cutoff();
    let mut sum = NeumaierSum::default();
    let mut count = NeumaierSum::default();
    for e in spec.entries() {
        let m = f64::from(e.multiplicity);
        let mut n = 1.0;
        while n * e.length <= cut {
            let nl = n * e.length;
            let weight = m * e.length / (2.0 * (0.5 * nl).sinh());
            sum.add(weight * (-nl * nl / (4.0 * t)).exp());
            count.add(weight);
            n += 1.0;
        }
    }
    (sum.total(), count.total() - smooth_count(cut, spec.genus()))
}

/// Trace over the listed geodesics and the bound on the omitted powers.
pub(crate) fn listed_trace(spec: &LengthSpectrum, t: f64, power_cap: u32) -> (f64, f64) {
    let pre = prefactor(t);
    let mut sum = NeumaierSum::default();
    let mut power_rest = 0.0;
    for e in spec.entries() {
        let (s, rest) = power_sum(e.length, t, power_cap);
        let m = f64::from(e.multiplicity);
        sum.add(m * s);
        power_rest += m * rest;
    }
    (pre * sum.total(), pre * power_rest)
}

/// Geodesic side of the trace formula for a stabilized spectrum.
pub fn heat_trace(spec: &LengthSpectrum, t: f64, power_cap: u32, tail: TailModel) -> Result<HeatTraceSample> {
    if !(t > 0.0) || !t.is_finite() {
        return Err(Error::Domain(format!("heat trace needs t > 0, got {t}")));
    }
    if power_cap < 1 {
        return Err(Error::Domain("power cap must be at least 1".into()));
    }
    spec.require_stabilized()?;
    let pre = prefactor(t);
    let surface = spec.genus() >= 2;
    let cut = spec.cutoff();
    let (listed, power_rest, tail_estimate) = match tail {
        TailModel::None => {
            let (listed, rest) = listed_trace(spec, t, power_cap);
            (listed, rest, 0.0)
        }
        TailModel::PrimeGeodesic => {
            if !surface {
                return Err(Error::Domain("prime geodesic tail model needs a surface spectrum".into()));
            }
            let genus = spec.genus();
            let (listed, excess) = truncated_trace(spec, t);
            let gauss = |u: f64| (-u * u / (4.0 * t)).exp();
            let smooth = integrate_beyond(|u| gauss(u) * smooth_density(u, genus), cut, t)?;
            (2.0 * pre * listed, 0.0, 2.0 * pre * (smooth - gauss(cut) * excess))
        }
    };
    let mut envelope = 0.0;
    if surface {
        if let Some(systole) = spec.systole() {
            // N(u) <= C e^u after these lengths; integrate by parts against the decreasing weight.
            let log_c = pgt_exponent(spec.genus(), systole);
            let inner = geodesic_weight(cut, t) * cut.exp() + exp_weighted_tail(cut, t)?;
            envelope = pre * (log_c + inner.ln()).exp();
        }
    }
    let value = listed + tail_estimate;
    Ok(HeatTraceSample {
        t,
        value,
        tail_bound: power_rest + envelope,
        tail_estimate,
    })
}

/// `1 - 4 pi (g - 1) K(t; 0)`, valid for `t > 2`.
pub fn heat_trace_lower_bound(genus: u32, t: f64) -> Result<f64> {
    if genus < 2 {
        return Err(Error::Domain(format!("genus must be at least 2, got {genus}")));
    }
    if !(t > 2.0) {
        return Err(Error::Range(format!("the lower bound holds for t > 2, got {t}")));
    }
    Ok(1.0 - 4.0 * PI * f64::from(genus - 1) * heat_kernel_h(t, 0.0)?)
}

const T0_STEP: f64 = 0.25;
const T0_WINDOW: f64 = 10.0;
const T0_LIMIT: f64 = 1e4;

fn t0_condition(genus: u32, t: f64) -> Result<bool> {
    Ok(heat_kernel_h(t, 0.0)? <= (-0.25 * t).exp() / (4.0 * PI * f64::from(genus - 1)))
}

fn t0_holds_on_window(genus: u32, t: f64) -> Result<bool> {
    let steps = (T0_WINDOW / T0_STEP).round() as usize;
    for k in 0..=steps {
        if !t0_condition(genus, t + k as f64 * T0_STEP)? {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Smallest `t > 2` with `K(t; 0) <= e^{-t/4} / (4 pi (g - 1))` holding on
/// `[t, t + 10]`, located to `1e-6`.
pub fn find_t0(genus: u32) -> Result<f64> {
    if genus < 2 {
        return Err(Error::Domain(format!("genus must be at least 2, got {genus}")));
    }
    let mut prev = 2.0;
    let mut t = 2.0 + T0_STEP;
    while t <= T0_LIMIT {
        if t0_holds_on_window(genus, t)? {
            let (mut lo, mut hi) = (prev, t);
            while hi - lo > 1e-6 {
                let mid = 0.5 * (lo + hi);
                if mid > 2.0 && t0_condition(genus, mid)? {
                    hi = mid;
                } else {
                    lo = mid;
                }
            }
            return Ok(hi);
        }
        prev = t;
        t += T0_STEP;
    }
    Err(Error::SearchFailure(format!("no t0 below {T0_LIMIT} for genus {genus}")))
}

/// Truncated periodization `sum_gamma K(t; d(z, gamma w))`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PeriodizedKernel {
    pub value: f64,
    /// Contribution of the outermost word sphere.
    pub last_increment: f64,
    /// Sum over each word sphere, starting with the identity.
    pub shells: Vec<f64>,
    pub elements: usize,
}

/// Sums the heat kernel over all group elements of word length at most
/// `max_depth` in the generators.
pub fn periodized_kernel(
    group: &GroupPresentation,
    t: f64,
    z: &Point,
    w: &Point,
    max_depth: usize,
) -> Result<PeriodizedKernel> {
    periodized_kernel_with_budget(group, t, z, w, max_depth, DEFAULT_BUDGET)
}

pub fn periodized_kernel_with_budget(
    group: &GroupPresentation,
    t: f64,
    z: &Point,
    w: &Point,
    max_depth: usize,
    budget: usize,
) -> Result<PeriodizedKernel> {
    let ball = Ball::grow(&generator_alphabet(group), f64::INFINITY, max_depth, budget)?;
    let mut shells = Vec::with_capacity(ball.layers.len());
    for layer in &ball.layers {
        let mut s = NeumaierSum::default();
        for node in &ball.nodes[layer.clone()] {
            s.add(heat_kernel_h(t, hyperbolic_distance(z, &node.g.act(w)))?);
        }
        shells.push(s.total());
    }
    let value = shells.iter().copied().collect::<NeumaierSum>().total();
    Ok(PeriodizedKernel {
        value,
        last_increment: *shells.last().unwrap_or(&0.0),
        shells,
        elements: ball.len(),
    })
}

/// `int_0^inf f(t) dt` for a heat-trace integrand that vanishes at both ends.
pub(crate) fn integrate_half_line<F: Fn(f64) -> f64>(f: F, scale: f64, end: f64, settings: &QuadSettings) -> Result<f64> {
    let mut points = vec![0.0];
    let mut x = scale / 64.0;
    while x < end {
        points.push(x);
        x *= 2.0;
    }
    points.push(end);
    Ok(integrate_with_breakpoints(f, &points, settings)?.value)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spectrum::SpectrumEntry;
    use approx::assert_relative_eq;

    const K_1_0: f64 = 0.057_535_755_205_721_974_618_886_301_546_601_528;
    const K_1_1: f64 = 0.041_491_183_957_822_217_569_501_192_759_453_296;
    const K_2_0: f64 = 0.021_067_473_735_496_287_367_948_508_222_120_919;
    const K_01_0: f64 = 0.769_769_546_876_900_030_808_824_690_964_093_27;

    #[test]
    fn kernel_reference_values() {
        assert_relative_eq!(heat_kernel_h(1.0, 0.0).unwrap(), K_1_0, max_relative = 1e-12);
        assert_relative_eq!(heat_kernel_h(1.0, 1.0).unwrap(), K_1_1, max_relative = 1e-12);
        assert_relative_eq!(heat_kernel_h(2.0, 0.0).unwrap(), K_2_0, max_relative = 1e-12);
        assert_relative_eq!(heat_kernel_h(0.1, 0.0).unwrap(), K_01_0, max_relative = 1e-11);
        assert!(heat_kernel_h(1.0, 50.0).unwrap() <= 1e-15);
    }

    #[test]
    fn kernel_decays_in_distance() {
        let mut prev = f64::INFINITY;
        for k in 0..60 {
            let v = heat_kernel_h(1.5, 0.25 * f64::from(k)).unwrap();
            assert!(v > 0.0 && v < prev);
            prev = v;
        }
        assert!(heat_kernel_h(0.0, 1.0).is_err());
        assert!(heat_kernel_h(1.0, -1.0).is_err());
    }

    #[test]
    fn tighter_tolerance_agrees() {
        for (t, rho) in [(0.3, 0.0), (1.0, 2.0), (10.0, 0.5), (40.0, 7.0)] {
            let a = heat_kernel_h_with(t, rho, 1e-10).unwrap();
            let b = heat_kernel_h_with(t, rho, 5e-11).unwrap();
            assert_relative_eq!(a, b, max_relative = 1e-9);
        }
    }

    #[test]
    fn toy_trace_matches_double_series() {
        let spec = LengthSpectrum::from_entries(vec![SpectrumEntry { length: 1.0, multiplicity: 2 }], 3.5, 0).unwrap();
        let t = 1.0;
        let h = heat_trace(&spec, t, 50, TailModel::None).unwrap();
        let mut direct = 0.0;
        for n in 1..=50 {
            let nl = f64::from(n);
            direct += 2.0 * (-nl * nl / (4.0 * t)).exp() / (nl / 2.0).sinh();
        }
        direct *= (-t / 4.0).exp() / (2.0 * (4.0 * PI * t).sqrt());
        assert_relative_eq!(h.value, direct, max_relative = 1e-12);
        assert_eq!(h.tail_estimate, 0.0);
    }

    #[test]
    fn lower_bound_range() {
        assert!(heat_trace_lower_bound(2, 2.0).is_err());
        let a = heat_trace_lower_bound(2, 5.0).unwrap();
        let b = heat_trace_lower_bound(2, 50.0).unwrap();
        assert!(a < b && b < 1.0);
        assert_relative_eq!(a, 1.0 - 4.0 * PI * heat_kernel_h(5.0, 0.0).unwrap(), max_relative = 1e-15);
    }

    #[test]
    fn t0_is_past_two_and_monotone() {
        let mut prev = 2.0;
        for g in 2..=6 {
            let t0 = find_t0(g).unwrap();
            assert!(t0 > 2.0 && t0 >= prev, "g = {g}: {t0}");
            assert!(t0_condition(g, t0).unwrap());
            prev = t0;
        }
    }
}
