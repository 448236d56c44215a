use std::f64::consts::PI;
use std::sync::OnceLock;

use selberg_core::{
    build_genus2_from_fn, builtin_octagon, builtin_pants_double, count_geodesics, cyclic_group, enumerate_spectrum,
    pgt_log_bound, EnumerationOptions, Error, FnParams, GroupPresentation, LengthSpectrum,
};

fn spectrum(group: &GroupPresentation, cutoff: f64) -> LengthSpectrum {
    enumerate_spectrum(group, &EnumerationOptions::new(cutoff, 200)).unwrap()
}

fn octagon_62() -> &'static LengthSpectrum {
    static S: OnceLock<LengthSpectrum> = OnceLock::new();
    S.get_or_init(|| spectrum(&builtin_octagon(), 6.2))
}

fn fixtures() -> Vec<LengthSpectrum> {
    vec![
        octagon_62().clone(),
        spectrum(&builtin_pants_double(), 6.2),
        spectrum(&build_genus2_from_fn(&FnParams::new(1.0, 1.0, 1.0, 0.0, 0.0, 0.0)).unwrap(), 5.0),
        spectrum(&build_genus2_from_fn(&FnParams::new(0.3, 2.0, 2.0, 0.0, 0.0, 0.0)).unwrap(), 3.0),
    ]
}

#[test]
fn octagon_systole_cluster() {
    let s = spectrum(&builtin_octagon(), 3.1);
    assert!(s.stabilized());
    let systole = 2.0 * (1.0 + 2f64.sqrt()).acosh();
    assert_eq!(s.entries().len(), 1);
    assert!((s.entries()[0].length - systole).abs() < 1e-12);
    assert_eq!(s.entries()[0].multiplicity, 24);
}

#[test]
fn octagon_spectrum_is_stabilized_and_sorted() {
    let s = octagon_62();
    assert!(s.stabilized());
    assert_eq!(s.genus(), 2);
    assert!(s.entries().windows(2).all(|w| w[0].length < w[1].length));
    assert!(s.entries().iter().all(|e| e.multiplicity % 2 == 0 && e.length <= 6.2));
}

#[test]
fn fenchel_nielsen_systoles() {
    let cases = [((1.0, 1.0, 1.0), 1.5, 1.0), ((0.3, 2.0, 2.0), 1.0, 0.3)];
    for ((a, b, c), cutoff, expected) in cases {
        let g = build_genus2_from_fn(&FnParams::new(a, b, c, 0.0, 0.0, 0.0)).unwrap();
        let s = spectrum(&g, cutoff);
        let sys = s.systole().unwrap();
        assert!((sys - expected).abs() < 1e-9, "({a}, {b}, {c}): {sys}");
    }
    for ell in [1.0, 0.5, 0.25] {
        let g = build_genus2_from_fn(&FnParams::new(ell, 2.0, 2.0, 0.0, 0.0, 0.0)).unwrap();
        let s = spectrum(&g, 1.01 * ell);
        assert!((s.systole().unwrap() - ell).abs() < 1e-9);
        // the curve and its reverse
        assert_eq!(s.entries()[0].multiplicity, 2);
    }
}

#[test]
fn full_dehn_twist_leaves_spectrum_unchanged() {
    let base = build_genus2_from_fn(&FnParams::new(1.0, 1.2, 1.4, 0.3, 0.0, 0.0)).unwrap();
    let twisted = build_genus2_from_fn(&FnParams::new(1.0, 1.2, 1.4, 0.3 + 2.0 * PI, 0.0, 0.0)).unwrap();
    assert!(spectrum(&base, 4.0).same_entries(&spectrum(&twisted, 4.0)));
}

#[test]
fn rejects_degenerate_lengths() {
    for p in [FnParams::new(0.0, 1.0, 1.0, 0.0, 0.0, 0.0), FnParams::new(1.0, -1.0, 1.0, 0.0, 0.0, 0.0)] {
        assert!(matches!(build_genus2_from_fn(&p), Err(Error::Domain(_))));
    }
}

#[test]
fn counting_matches_brute_force() {
    for s in fixtures() {
        let mut grid: Vec<f64> = s.entries().iter().map(|e| e.length).collect();
        grid.extend((1..=12).map(|k| s.cutoff() * f64::from(k) / 12.0));
        for u in grid {
            let brute: u64 = s
                .entries()
                .iter()
                .filter(|e| e.length <= u + 1e-9)
                .map(|e| u64::from(e.multiplicity))
                .sum();
            let classes = s.classes().iter().filter(|c| c.primitive && c.length <= u + 1e-9).count() as u64;
            let n = count_geodesics(&s, u).unwrap();
            assert_eq!(n, brute, "u = {u}");
            assert_eq!(n, classes, "u = {u}");
        }
        assert!(count_geodesics(&s, s.cutoff() + 0.1).is_err());
    }
}

#[test]
fn counting_respects_prime_geodesic_envelope() {
    for s in fixtures() {
        let sys = s.systole().unwrap();
        for k in 0..=20 {
            let u = s.cutoff() * f64::from(k) / 20.0;
            let n = count_geodesics(&s, u).unwrap();
            if n > 0 {
                let bound = pgt_log_bound(s.genus(), sys, u).unwrap();
                assert!(bound.bounds((n as f64).ln()), "u = {u}: {n} geodesics");
            }
        }
    }
}

#[test]
fn spectrum_is_thread_count_independent() {
    let g = builtin_pants_double();
    let runs: Vec<LengthSpectrum> = [1, 2, 8]
        .into_iter()
        .map(|k| {
            let pool = rayon::ThreadPoolBuilder::new().num_threads(k).build().unwrap();
            pool.install(|| spectrum(&g, 5.0))
        })
        .collect();
    for r in &runs[1..] {
        assert_eq!(r.entries(), runs[0].entries());
    }
}

#[test]
fn group_file_round_trip() {
    let g = builtin_octagon();
    let back = GroupPresentation::from_json(&g.to_json()).unwrap();
    assert_eq!(back.genus(), 2);
    assert!(spectrum(&back, 6.2).same_entries(octagon_62()));
}

#[test]
fn shallow_enumeration_is_flagged() {
    let s = enumerate_spectrum(&builtin_octagon(), &EnumerationOptions::new(6.2, 2)).unwrap();
    assert!(!s.stabilized());
    assert!(matches!(s.require_stabilized(), Err(Error::Unstabilized { depth: 2 })));
    let tight = EnumerationOptions::new(6.2, 200).with_budget(100);
    assert!(matches!(enumerate_spectrum(&builtin_octagon(), &tight), Err(Error::Budget { budget: 100 })));
}

#[test]
fn cyclic_group_spectrum() {
    let s = spectrum(&cyclic_group(1.3).unwrap(), 4.0);
    assert_eq!(s.entries().len(), 1);
    assert!((s.entries()[0].length - 1.3).abs() < 1e-12);
    assert_eq!(s.entries()[0].multiplicity, 2);
}
