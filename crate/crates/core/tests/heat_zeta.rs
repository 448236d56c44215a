use std::f64::consts::PI;
use std::sync::OnceLock;

use selberg_core::quadrature::QuadSettings;
use selberg_core::{
    builtin_octagon, builtin_pants_double, enumerate_spectrum, heat_kernel_h, heat_trace, heat_trace_lower_bound,
    log_det_laplacian, periodized_kernel, selberg_zeta_log, zeta_log_derivative_mckean, zeta_log_derivative_product,
    zeta_prime_at_one_experimental, zeta_ratio_log, EnumerationOptions, LengthSpectrum, Point, TailModel, ZetaInput,
};

const K_1_0: f64 = 0.057_535_755_205_721_974_618_886_301_546_601_528;

fn octagon() -> &'static LengthSpectrum {
    static S: OnceLock<LengthSpectrum> = OnceLock::new();
    S.get_or_init(|| enumerate_spectrum(&builtin_octagon(), &EnumerationOptions::new(6.2, 200)).unwrap())
}

fn pants() -> &'static LengthSpectrum {
    static S: OnceLock<LengthSpectrum> = OnceLock::new();
    S.get_or_init(|| enumerate_spectrum(&builtin_pants_double(), &EnumerationOptions::new(6.2, 200)).unwrap())
}

#[test]
fn kernel_oracle() {
    let k = heat_kernel_h(1.0, 0.0).unwrap();
    assert!(((k - K_1_0) / K_1_0).abs() <= 1e-10, "{k}");
    let far = heat_kernel_h(1.0, 50.0).unwrap();
    assert!((0.0..=1e-15).contains(&far), "{far}");
}

#[test]
fn kernel_is_positive_and_decreasing_in_distance() {
    for t in [0.5, 1.0, 3.0, 10.0] {
        let values: Vec<f64> = (0..40).map(|k| heat_kernel_h(t, 0.25 * f64::from(k)).unwrap()).collect();
        assert!(values.iter().all(|&v| v > 0.0));
        assert!(values.windows(2).all(|w| w[1] < w[0]), "t = {t}");
    }
    assert!(heat_kernel_h(0.0, 1.0).is_err());
    assert!(heat_kernel_h(1.0, -1.0).is_err());
}

#[test]
fn periodized_kernel_shells() {
    let g = builtin_octagon();
    let z = Point::i();
    let w = Point::new(0.1, 1.2).unwrap();
    let p = periodized_kernel(&g, 0.5, &z, &w, 3).unwrap();
    let direct = heat_kernel_h(0.5, selberg_core::hyperbolic_distance(&z, &w)).unwrap();
    assert!((p.shells[0] - direct).abs() <= 1e-15 * direct);
    assert_eq!(p.shells.len(), 4);
    assert!(p.shells[1..].windows(2).all(|s| s[1] < s[0]));
    assert_eq!(p.last_increment, p.shells[3]);
    let q = periodized_kernel(&g, 0.5, &w, &z, 3).unwrap();
    assert!((p.value - q.value).abs() <= 1e-12 * p.value);
}

#[test]
fn heat_trace_is_positive_with_bounded_tail() {
    for spec in [octagon(), pants()] {
        for t in [0.5, 1.0, 2.5, 5.0, 10.0] {
            let none = heat_trace(spec, t, 400, TailModel::None).unwrap();
            let pg = heat_trace(spec, t, 400, TailModel::PrimeGeodesic).unwrap();
            assert!(none.value > 0.0 && none.tail_bound >= 0.0);
            assert_eq!(none.tail_estimate, 0.0);
            assert!(pg.tail_estimate.is_finite());
        }
    }
    assert!(heat_trace_lower_bound(2, 2.0).is_err());
    assert!(heat_trace_lower_bound(2, 3.0).unwrap() < 1.0);
}

#[test]
fn zeta_tends_to_one() {
    let values: Vec<f64> = [2.0, 3.0, 4.0, 6.0, 10.0]
        .iter()
        .map(|&s| selberg_zeta_log(octagon(), s, 40).unwrap().log_value)
        .collect();
    assert!(values.iter().all(|&v| v < 0.0));
    assert!(values.windows(2).all(|w| w[1] > w[0]), "{values:?}");
    assert!(values[4].abs() < 1e-10);
}

#[test]
fn k_truncation_converges() {
    for s in [2.0, 3.0] {
        let a = selberg_zeta_log(octagon(), s, 40).unwrap().log_value;
        let b = selberg_zeta_log(octagon(), s, 80).unwrap().log_value;
        assert!((a - b).abs() < 1e-12, "s = {s}");
    }
}

#[test]
fn product_derivative_matches_finite_difference() {
    let h = 1e-5;
    for s in [2.0, 3.0, 4.0] {
        let d = zeta_log_derivative_product(pants(), s, 40).unwrap();
        let up = selberg_zeta_log(pants(), s + h, 40).unwrap().log_value;
        let down = selberg_zeta_log(pants(), s - h, 40).unwrap().log_value;
        let fd = (up - down) / (2.0 * h);
        assert!(d > 0.0);
        assert!((d - fd).abs() <= 1e-7 * d.abs().max(1.0), "s = {s}: {d} vs {fd}");
    }
}

#[test]
fn mckean_route_agrees_on_the_second_surface() {
    let quad = QuadSettings::default();
    for s in [2.0, 3.0, 4.0] {
        let p = zeta_log_derivative_product(pants(), s, 40).unwrap();
        let m = zeta_log_derivative_mckean(pants(), s, &quad).unwrap();
        assert!(((m - p) / p).abs() <= 1e-2, "s = {s}: {m} vs {p}");
    }
}

#[test]
fn ratio_vanishes_at_two_and_is_positive_beyond() {
    assert_eq!(zeta_ratio_log(octagon(), 2, 40).unwrap(), 0.0);
    for n in 3..=6 {
        assert!(zeta_ratio_log(octagon(), n, 40).unwrap() > 0.0, "n = {n}");
    }
}

#[test]
fn determinant_from_zeta() {
    let z = selberg_zeta_log(octagon(), 2.0, 40).unwrap();
    let d = log_det_laplacian(2, 2, ZetaInput::Value(&z)).unwrap();
    let expected = -4.0 * PI * selberg_core::c_n_constant(2).unwrap() + z.log_value + 14.0 / 3.0 * 2f64.ln();
    assert!((d - expected).abs() < 1e-12);
    let est = zeta_prime_at_one_experimental(octagon(), 40).unwrap();
    assert!(est.experimental && est.log_value.is_finite());
    assert!(log_det_laplacian(2, 1, ZetaInput::DerivativeAtOne(&est)).unwrap().is_finite());
}
