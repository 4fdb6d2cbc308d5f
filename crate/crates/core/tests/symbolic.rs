use std::f64::consts::PI;

use approx::assert_relative_eq;
use point_resonances::chardet::det_gamma;
use point_resonances::exppoly::{analyze, canonical_form, eval_canonical, DEFAULT_N_MAX};
use point_resonances::geometry::{brute_force_v, diameter, size_v};
use point_resonances::{Complex64, Configuration};
use proptest::prelude::*;

fn points(max_n: usize) -> impl Strategy<Value = Vec<[f64; 3]>> {
    prop::collection::vec(prop::array::uniform3(-1.0..1.0f64), 2..=max_n)
}

fn spread(pts: &[[f64; 3]]) -> bool {
    pts.iter()
        .enumerate()
        .all(|(i, a)| pts[..i].iter().all(|b| (0..3).map(|k| (a[k] - b[k]).powi(2)).sum::<f64>() > 1e-4))
}

fn binomial(n: usize, k: usize) -> f64 {
    (0..k).fold(1.0, |acc, j| acc * (n - j) as f64 / (j + 1) as f64)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(50))]

    #[test]
    fn canonical_form_matches_determinant(
        pts in points(6),
        a_re in 0.2..2.0f64,
        a_im in -0.5..0.5f64,
        zs in prop::collection::vec((-40.0..40.0f64, -1.5..4.0f64), 100),
    ) {
        prop_assume!(spread(&pts));
        let n = pts.len() as i32;
        let c = Configuration::new(pts, Complex64::new(a_re, a_im)).unwrap();
        let p = canonical_form(&c, DEFAULT_N_MAX).unwrap();
        for (re, im) in zs {
            let z = Complex64::new(re, im);
            let direct = det_gamma(&c, z).unwrap() * (-4.0 * PI).powi(n);
            let poly = eval_canonical(&p, z);
            // magnitude of the largest term bounds the cancellation error
            let scale: f64 = p
                .terms
                .iter()
                .map(|t| {
                    let mag: f64 = t.coeffs.iter().enumerate().map(|(k, c)| c.norm() * z.norm().powi(k as i32)).sum();
                    mag * (-t.freq * z.im).exp()
                })
                .fold(0.0, f64::max);
            prop_assert!((direct - poly).norm() <= 1e-9 * scale, "z={z} {direct} vs {poly}");
        }
    }

    #[test]
    fn zero_frequency_term_is_binomial(pts in points(6), a_re in 0.2..2.0f64) {
        prop_assume!(spread(&pts));
        let n = pts.len();
        let alpha = Complex64::new(a_re, 0.0);
        let c = Configuration::new(pts, alpha).unwrap();
        let p = canonical_form(&c, DEFAULT_N_MAX).unwrap();
        let t = &p.terms[0];
        prop_assert_eq!(t.freq, 0.0);
        prop_assert_eq!(t.coeffs.len(), n + 1);
        // (iz − 4πα)^N
        for (k, got) in t.coeffs.iter().enumerate() {
            let want = Complex64::i().powi(k as i32) * (-4.0 * PI * alpha).powi((n - k) as i32) * binomial(n, k);
            prop_assert!((got - want).norm() <= 1e-10 * want.norm().max(1.0), "k={k}: {got} vs {want}");
        }
    }

    #[test]
    fn k_multiset_invariants(pts in points(6)) {
        prop_assume!(spread(&pts));
        let n = pts.len();
        let c = Configuration::new(pts, Complex64::new(1.0, 0.0)).unwrap();
        let a = analyze(&c, DEFAULT_N_MAX).unwrap();
        let k = &a.k.values;
        prop_assert!(k.len() >= 2 && k.len() <= n);
        prop_assert!(k.windows(2).all(|w| w[0] <= w[1]));
        prop_assert!((k[0] * a.diameter - 1.0).abs() < 1e-9);
        prop_assert!((k[1] * a.diameter - 1.0).abs() < 1e-9);
        let inv: f64 = k.iter().map(|x| 1.0 / x).sum();
        prop_assert!((inv - a.canonical.max_frequency()).abs() < 1e-9 * inv);
        prop_assert!(a.canonical.max_frequency() <= a.size.value * (1.0 + 1e-12));
    }

    #[test]
    fn size_matches_brute_force(pts in prop::collection::vec(prop::array::uniform3(-1.0..1.0f64), 1..=7)) {
        prop_assume!(spread(&pts));
        let c = Configuration::new(pts, Complex64::new(1.0, 0.0)).unwrap();
        let fast = size_v(&c).unwrap();
        let slow = brute_force_v(&c).unwrap();
        prop_assert!((fast.value - slow.value).abs() <= 1e-12 * slow.value.max(1.0));
        let d = diameter(&c);
        if c.len() >= 2 {
            prop_assert!(fast.value >= 2.0 * d * (1.0 - 1e-12));
        }
        prop_assert!(fast.value <= c.len() as f64 * d * (1.0 + 1e-12));
    }

    #[test]
    fn size_is_invariant_under_rigid_motion(
        pts in points(6),
        shift in prop::array::uniform3(-5.0..5.0f64),
        angle in 0.0..(2.0 * PI),
    ) {
        prop_assume!(spread(&pts));
        let (s, co) = angle.sin_cos();
        let moved: Vec<[f64; 3]> = pts
            .iter()
            .rev()
            .map(|p| [co * p[0] - s * p[1] + shift[0], s * p[0] + co * p[1] + shift[1], p[2] + shift[2]])
            .collect();
        let a = size_v(&Configuration::new(pts, Complex64::new(1.0, 0.0)).unwrap()).unwrap().value;
        let b = size_v(&Configuration::new(moved, Complex64::new(1.0, 0.0)).unwrap()).unwrap().value;
        prop_assert!((a - b).abs() <= 1e-10 * a.max(1.0));
    }
}

#[test]
fn two_points_weyl_with_unit_density_gap() {
    let c = Configuration::new(vec![[0.0; 3], [0.0, 0.0, 2.5]], Complex64::new(1.0, 0.0)).unwrap();
    let a = analyze(&c, DEFAULT_N_MAX).unwrap();
    assert!(a.weyl);
    assert_relative_eq!(a.size.value, 5.0, max_relative = 1e-15);
    assert_eq!(a.k.values.len(), 2);
    assert_relative_eq!(a.k.values[0], 0.4, max_relative = 1e-12);
    assert_relative_eq!(a.ad_symbolic.unwrap(), 5.0 / PI, max_relative = 1e-12);
}

#[test]
fn equilateral_triangle_degenerate_k() {
    let h = 3f64.sqrt() / 2.0;
    let c = Configuration::new(vec![[0.0; 3], [1.0, 0.0, 0.0], [0.5, h, 0.0]], Complex64::new(1.0, 0.0)).unwrap();
    let a = analyze(&c, DEFAULT_N_MAX).unwrap();
    assert!(a.weyl);
    assert_relative_eq!(a.size.value, 3.0, max_relative = 1e-12);
    assert_eq!(a.k.grouped().len(), 1);
    assert_eq!(a.k.len(), 3);
}

#[test]
fn single_point_has_no_chains() {
    let c = Configuration::new(vec![[1.0, 2.0, 3.0]], Complex64::new(1.0, 0.0)).unwrap();
    let a = analyze(&c, DEFAULT_N_MAX).unwrap();
    assert!(a.k.is_empty());
    assert_eq!(a.size.value, 0.0);
    assert!(a.ad_symbolic.is_none());
}
