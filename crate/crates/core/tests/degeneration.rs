use std::f64::consts::PI;

use selberg_core::{
    builtin_octagon, check_bounds, envelope, make_pinching_family, tau_coordinate, tau_to_ell, CheckOptions,
    EnvelopeKind, EnvelopeParams, ExtendedLog, FamilySpec, FnParams, Pinch,
};

fn finite(kind: EnvelopeKind, n: Option<u32>, ells: &[f64]) -> f64 {
    envelope(kind, &EnvelopeParams::ell(2, n, ells)).unwrap().finite_value().unwrap()
}

#[test]
fn wolpert_envelope_spot_values() {
    // -pi^2 / (3 l) - 3 log l
    let cases = [(1.0, -3.289_868_133_696_453), (0.5, -4.500_294_725_713_07), (0.25, -9.000_589_451_426_14)];
    for (ell, expected) in cases {
        let v = finite(EnvelopeKind::Zx2, None, &[ell]);
        assert!((v - expected).abs() < 1e-12, "l = {ell}: {v}");
    }
    let two = finite(EnvelopeKind::Zx2, None, &[0.5, 1.0]);
    assert!((two - (-4.500_294_725_713_07 - 3.289_868_133_696_453)).abs() < 1e-12);
}

#[test]
fn pole_order_and_corollary_lower() {
    for (n, ell) in [(2u32, 1.0), (3, 0.5), (6, 0.25)] {
        let big_l = 2.0 * PI * PI / ell;
        let mu = finite(EnvelopeKind::MuPole, Some(n), &[ell]);
        assert!((mu - f64::from(n * (n - 1)) / 2.0 * big_l).abs() < 1e-12 * mu);
        let lower = finite(EnvelopeKind::Cor2Lower, None, &[ell]);
        assert!((lower - (3.0 * big_l.ln() - big_l / 6.0)).abs() < 1e-12 * lower.abs());
    }
    assert_eq!(finite(EnvelopeKind::Cor6, Some(3), &[0.5]), 2.0 * 3f64.ln());
}

#[test]
fn mt1_envelope_saturates_at_small_lengths() {
    let at_one = envelope(EnvelopeKind::Mt1Upper, &EnvelopeParams::ell(2, Some(2), &[1.0])).unwrap();
    let inner: f64 = 160.0 * PI;
    assert!((at_one.finite_value().unwrap() / inner.exp() - 1.0).abs() < 1e-12);
    for ell in [0.5, 0.25] {
        let v = envelope(EnvelopeKind::Mt1Upper, &EnvelopeParams::ell(2, Some(4), &[ell])).unwrap();
        assert_eq!(v, ExtendedLog::Saturated(160.0 * PI / ell - 2.0 * ell.ln()));
        assert!(v.bounds(1e300));
    }
}

#[test]
fn tau_parameters_give_the_same_envelopes() {
    let ells = [0.7, 0.4];
    let taus: Vec<f64> = ells.iter().map(|&l| tau_coordinate(l).unwrap()).collect();
    for kind in EnvelopeKind::ALL {
        let a = envelope(kind, &EnvelopeParams::ell(3, Some(3), &ells)).unwrap();
        let b = envelope(kind, &EnvelopeParams { g: 3, n: Some(3), pinch: Pinch::Tau(taus.clone()) }).unwrap();
        match (a, b) {
            (ExtendedLog::Finite(x), ExtendedLog::Finite(y)) => assert!((x - y).abs() <= 1e-9 * x.abs().max(1.0)),
            (ExtendedLog::Saturated(x), ExtendedLog::Saturated(y)) => assert!((x - y).abs() <= 1e-9 * x),
            other => panic!("{kind}: {other:?}"),
        }
    }
    for l in [0.1, 1.0, 10.0] {
        assert!((tau_to_ell(tau_coordinate(l).unwrap()).unwrap() - l).abs() < 1e-12 * l);
    }
}

#[test]
fn envelope_inputs_are_validated() {
    assert!(envelope(EnvelopeKind::Mt1Upper, &EnvelopeParams::ell(2, None, &[1.0])).is_err());
    assert!(envelope(EnvelopeKind::Zx2, &EnvelopeParams::ell(1, None, &[1.0])).is_err());
    assert!(envelope(EnvelopeKind::Zx2, &EnvelopeParams::ell(2, None, &[-1.0])).is_err());
    assert!("mt1_upper".parse::<EnvelopeKind>().is_ok());
    assert!("nope".parse::<EnvelopeKind>().is_err());
}

#[test]
fn octagon_only_family_satisfies_the_lower_bound() {
    let family = vec![builtin_octagon()];
    let records = check_bounds(&family, &[vec![]], &[3, 4, 5, 6], &[6.2], &CheckOptions::default()).unwrap();
    let r = &records[0];
    assert!(r.valid);
    assert!(r.lower_ok.values().all(|&ok| ok) && r.lower_ok.len() == 4);
    assert!(r.upper_ok.values().all(|&ok| ok));
}

#[test]
fn family_members_follow_the_grid() {
    let spec = FamilySpec {
        base_fn: FnParams::new(1.0, 2.0, 2.0, 0.0, 0.0, 0.0),
        pinch_indices: vec![1],
        ell_grid: vec![1.0, 0.5],
        n_values: vec![2, 3],
    };
    let family = make_pinching_family(&spec).unwrap();
    assert_eq!(family.len(), 2);
    let records = check_bounds(&family, &spec.pinched_lengths(), &spec.n_values, &[4.0], &CheckOptions::default()).unwrap();
    for (r, ell) in records.iter().zip([1.0, 0.5]) {
        assert!(r.valid, "{:?}", r.note);
        assert!((r.systole.unwrap() - ell).abs() < 1e-9);
        assert_eq!(r.ell, vec![ell]);
        assert!(r.lower_ok[&2]);
    }
    assert!(check_bounds(&family, &[vec![]], &[2], &[4.0], &CheckOptions::default()).is_err());
    assert!(check_bounds(&family, &spec.pinched_lengths(), &[1], &[4.0], &CheckOptions::default()).is_err());
}
