use std::f64::consts::PI;

use point_resonances::exppoly::{analyze, DEFAULT_N_MAX};
use point_resonances::rootfind::{
    chain_assignment, count_zeros, counting_function, counting_report, extract_k_numeric, find_resonances, Contour,
    ResonanceSet,
};
use point_resonances::sampler::{sample, to_configuration, SamplerConfig};
use point_resonances::{chardet, Complex64, Configuration};

fn config(points: Vec<[f64; 3]>) -> Configuration {
    Configuration::new(points, Complex64::new(1.0, 0.0)).unwrap()
}

fn two_point() -> Configuration {
    config(vec![[0.0, 0.0, 0.0], [1.0, 0.0, 0.0]])
}

fn three_point() -> Configuration {
    config(vec![[0.0, 0.0, 0.0], [0.9, 0.3, 0.1], [0.2, -0.6, 0.5]])
}

fn fine_report(rs: &ResonanceSet, h_max: f64) -> point_resonances::rootfind::CountingReport {
    let r = rs.radius;
    let radii: Vec<f64> = (1..=r as usize).map(|i| i as f64).collect();
    let steps = (h_max / 0.02).round() as usize;
    let h_grid: Vec<f64> = (0..=steps).map(|j| j as f64 * 0.02).collect();
    counting_report(rs, &radii, &h_grid).unwrap()
}

fn check_set(c: &Configuration, rs: &ResonanceSet) {
    // conservation against an independent contour count
    let total = count_zeros(c, &Contour::disc(Complex64::new(0.0, 0.0), rs.radius)).unwrap();
    assert_eq!(rs.total_multiplicity(), total);
    for r in &rs.roots {
        assert!(r.residual < 1e-8, "residual {} at {}", r.residual, r.k);
        assert!(r.k.norm() <= rs.radius);
    }
    // k ↦ −conj(k) for real α
    for r in &rs.roots {
        let mirror = Complex64::new(-r.k.re, r.k.im);
        let d = rs.roots.iter().map(|s| (s.k - mirror).norm()).fold(f64::INFINITY, f64::min);
        assert!(d < 1e-7, "no mirror partner for {}", r.k);
    }
    for w in rs.roots.windows(2) {
        assert!(w[0].k.re < w[1].k.re || (w[0].k.re == w[1].k.re && w[0].k.im <= w[1].k.im));
    }
}

#[test]
fn single_center_root() {
    let c = config(vec![[0.3, -1.0, 2.0]]);
    let rs = find_resonances(&c, 20.0).unwrap();
    assert_eq!(rs.roots.len(), 1);
    assert!((rs.roots[0].k - Complex64::new(0.0, -4.0 * PI)).norm() < 1e-8);
    let rs = find_resonances(&c, 10.0).unwrap();
    assert!(rs.roots.is_empty());
}

#[test]
fn two_point_invariants() {
    let c = two_point();
    let rs = find_resonances(&c, 60.0).unwrap();
    check_set(&c, &rs);
    for r in &rs.roots {
        let lhs = Complex64::i() * r.k - 4.0 * PI;
        let e = (Complex64::i() * r.k).exp();
        assert!((lhs - e).norm().min((lhs + e).norm()) < 1e-8 * (1.0 + lhs.norm()));
    }
}

#[test]
fn three_point_invariants() {
    let c = three_point();
    let rs = find_resonances(&c, 40.0).unwrap();
    check_set(&c, &rs);
    for r in &rs.roots {
        let d = chardet::modified_determinant(&c, r.k).unwrap();
        let scale = chardet::modified_determinant(&c, r.k + Complex64::new(0.5, 0.0)).unwrap().norm();
        assert!(d.norm() < 1e-6 * scale.max(1.0));
    }
}

#[test]
fn complex_coupling_breaks_mirror_symmetry_but_not_counts() {
    let c = Configuration::new(vec![[0.0, 0.0, 0.0], [1.0, 0.0, 0.0]], Complex64::new(1.0, 0.3)).unwrap();
    let rs = find_resonances(&c, 30.0).unwrap();
    let total = count_zeros(&c, &Contour::disc(Complex64::new(0.0, 0.0), 30.0)).unwrap();
    assert_eq!(rs.total_multiplicity(), total);
    assert!(rs.roots.iter().all(|r| r.residual < 1e-8));
}

#[test]
fn density_converges_for_two_points() {
    let rs = find_resonances(&two_point(), 200.0).unwrap();
    let counts = counting_function(&rs, &[50.0, 100.0, 200.0]).unwrap();
    let errs: Vec<f64> = counts
        .iter()
        .zip([50.0, 100.0, 200.0])
        .map(|(&n, r)| (n as f64 / r - 2.0 / PI).abs())
        .collect();
    assert!(errs[0] >= errs[1] && errs[1] >= errs[2], "{errs:?}");
    assert!(errs[2] < 0.05 * 2.0 / PI);
}

#[test]
fn deterministic_output() {
    let c = three_point();
    let a = find_resonances(&c, 30.0).unwrap();
    let b = find_resonances(&c, 30.0).unwrap();
    assert_eq!(a.to_csv(), b.to_csv());
    assert_eq!(a, b);
}

#[test]
fn deep_lower_half_plane_search() {
    // perimeter ≈ 3.8: products of Γ entries exceed the f64 range near |k| = 200
    let s = sample(&SamplerConfig::uniform_ball(3, 1.0, 7, 15)).unwrap();
    let c = to_configuration(&s, Complex64::new(1.0, 0.0));
    let rs = find_resonances(&c, 200.0).unwrap();
    assert!(rs.total_multiplicity() > 200);
    assert!(rs.roots.iter().all(|r| r.residual < 1e-8));
}

#[test]
fn chain_band_for_two_points() {
    let c = two_point();
    let a = analyze(&c, DEFAULT_N_MAX).unwrap();
    let rs = find_resonances(&c, 200.0).unwrap();
    let ch = chain_assignment(&rs, &a.k, 30.0);
    assert!(ch.members.iter().all(|m| m.chain == Some(0)));
    assert!(ch.band[0] <= 3.0, "band {:?}", ch.band);
}

#[test]
fn chain_band_stabilizes_for_three_points() {
    let c = three_point();
    let a = analyze(&c, DEFAULT_N_MAX).unwrap();
    let rs = find_resonances(&c, 200.0).unwrap();
    let bands: Vec<f64> = [30.0, 60.0, 120.0]
        .iter()
        .map(|&rho| chain_assignment(&rs, &a.k, rho).band.iter().cloned().fold(0.0, f64::max))
        .collect();
    assert!(bands[1] <= bands[0] + 1e-12 && bands[2] <= bands[1] + 1e-12, "{bands:?}");
}

fn assert_extraction(c: &Configuration, h_max: f64) {
    let a = analyze(c, DEFAULT_N_MAX).unwrap();
    let rs = find_resonances(c, 200.0).unwrap();
    let est = extract_k_numeric(&fine_report(&rs, h_max)).unwrap();
    let expected = a.k.grouped();
    assert_eq!(est.len(), expected.len(), "{est:?} vs {expected:?}");
    for (e, (k, w)) in est.iter().zip(&expected) {
        assert_eq!(e.weight, *w, "{est:?} vs {expected:?}");
        assert!((e.location - k).abs() <= 0.05 * k, "{} vs {k}", e.location);
    }
}

#[test]
fn extraction_two_points() {
    let c = two_point();
    let rs = find_resonances(&c, 200.0).unwrap();
    let est = extract_k_numeric(&fine_report(&rs, 4.0)).unwrap();
    assert_eq!(est.len(), 1);
    assert_eq!(est[0].weight, 2);
    assert!((est[0].location - 1.0).abs() <= 0.05);
}

#[test]
fn extraction_single_center_has_no_jumps() {
    let c = config(vec![[0.0, 0.0, 0.0]]);
    let rs = find_resonances(&c, 200.0).unwrap();
    assert!(extract_k_numeric(&fine_report(&rs, 4.0)).unwrap().is_empty());
}

#[test]
fn extraction_three_points() {
    assert_extraction(&three_point(), 8.0);
}

#[test]
fn extraction_equilateral_triangle() {
    let h = 3f64.sqrt() / 2.0;
    assert_extraction(&config(vec![[0.0, 0.0, 0.0], [1.0, 0.0, 0.0], [0.5, h, 0.0]]), 4.0);
}

#[test]
fn extraction_regular_tetrahedron() {
    let s = 1.0 / 8f64.sqrt();
    assert_extraction(
        &config(vec![[s, s, s], [s, -s, -s], [-s, s, -s], [-s, -s, s]]),
        4.0,
    );
}
