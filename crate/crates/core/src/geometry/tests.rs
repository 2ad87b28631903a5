use alloc::vec;
use alloc::vec::Vec;

use super::*;
use crate::thermo::BernoulliMeasure;

pub(crate) fn cantor_ifs() -> ConformalIFS {
    ConformalIFS::similarities_1d((0.0, 1.0), &[(1.0 / 3.0, 0.0), (1.0 / 3.0, 2.0 / 3.0)])
        .unwrap()
}

pub(crate) fn binary_ifs() -> ConformalIFS {
    ConformalIFS::similarities_1d((0.0, 1.0), &[(0.5, 0.0), (0.5, 0.5)]).unwrap()
}

fn two_ratio_ifs() -> ConformalIFS {
    ConformalIFS::similarities_1d((0.0, 1.0), &[(0.5, 0.0), (0.25, 0.75)]).unwrap()
}

fn uniform2() -> BernoulliMeasure {
    BernoulliMeasure::new(&[0.5, 0.5]).unwrap()
}

fn w(symbols: &[u32]) -> Word {
    Word::from_symbols(symbols)
}

#[test]
fn cantor_cylinder_hull_and_diameter() {
    let ifs = cantor_ifs();
    let geo = ifs.cylinder_geometry(&w(&[0, 1])).unwrap();
    assert!((geo.hull[0].0 - 2.0 / 9.0).abs() < 1e-15);
    assert!((geo.hull[0].1 - 3.0 / 9.0).abs() < 1e-15);
    assert!((geo.diameter - 1.0 / 9.0).abs() < 1e-15);
}

#[test]
fn empty_word_is_the_seed() {
    let ifs = cantor_ifs();
    let geo = ifs.cylinder_geometry(&Word::empty()).unwrap();
    assert_eq!(geo.hull, vec![(0.0, 1.0)]);
    assert_eq!(geo.diameter, 1.0);
}

#[test]
fn two_ratio_composition_diameter() {
    let ifs = two_ratio_ifs();
    let geo = ifs.cylinder_geometry(&w(&[1, 0])).unwrap();
    assert_eq!(geo.diameter, 0.125);
    // Sampled-point cross-check of the diameter: map seed endpoints.
    let (_, lo) = ifs.deriv_at(&w(&[1, 0]), 0.0).unwrap();
    let (_, hi) = ifs.deriv_at(&w(&[1, 0]), 1.0).unwrap();
    assert!(((hi - lo).abs() - geo.diameter).abs() < 1e-15);
}

#[test]
fn hulls_nest_and_obey_contraction_bound() {
    let ifs = two_ratio_ifs();
    for n in 1..=20usize {
        for word in ifs.space().admissible_words(n.min(8)).unwrap() {
            let geo = ifs.cylinder_geometry(&word).unwrap();
            assert!(geo.diameter <= math::powi(0.5, word.len() as i32) + 1e-15);
            if word.len() > 1 {
                let parent = Word(word.0[..word.len() - 1].to_vec());
                let pg = ifs.cylinder_geometry(&parent).unwrap();
                assert!(pg.hull[0].0 <= geo.hull[0].0 + 1e-15);
                assert!(geo.hull[0].1 <= pg.hull[0].1 + 1e-15);
            }
        }
    }
}

#[test]
fn code_point_cantor_fixed_point() {
    let ifs = cantor_ifs();
    let word = Word(vec![0; 20]);
    let cp = ifs.code_point(&word, 1e-9).unwrap();
    let r20 = math::powi(1.0 / 3.0, 20);
    assert!(cp.point[0].abs() <= r20);
    assert!((cp.radius - r20 / 2.0).abs() < 1e-24);
}

#[test]
fn code_point_alternating_word_is_one_quarter() {
    let ifs = cantor_ifs();
    let mut symbols = Vec::new();
    for _ in 0..10 {
        symbols.extend_from_slice(&[0, 1]);
    }
    let cp = ifs.code_point(&Word(symbols), 1e-8).unwrap();
    assert!((cp.point[0] - 0.25).abs() <= math::powi(1.0 / 3.0, 20));
}

#[test]
fn code_point_binary_expansion() {
    let ifs = binary_ifs();
    let mut symbols = vec![1u32];
    symbols.extend(std::iter::repeat_n(0, 19));
    let cp = ifs.code_point(&Word(symbols), 1e-4).unwrap();
    assert!((cp.point[0] - 0.5).abs() <= math::powi(0.5, 20));
}

#[test]
fn code_point_prefix_too_short() {
    let ifs = cantor_ifs();
    match ifs.code_point(&w(&[0]), 1e-9) {
        Err(GeometryError::PrefixTooShort { radius, .. }) => {
            assert!((radius - 1.0 / 6.0).abs() < 1e-12);
        }
        other => panic!("unexpected: {other:?}"),
    }
}

#[test]
fn osc_cantor_holds_strongly() {
    let report = cantor_ifs().check_osc();
    assert!(report.holds && report.strong && report.decidable);
}

#[test]
fn osc_binary_touching_interiors_disjoint() {
    let report = binary_ifs().check_osc();
    assert!(report.holds);
}

#[test]
fn osc_overlapping_maps_fail_with_witness() {
    let ifs =
        ConformalIFS::similarities_1d((0.0, 1.0), &[(0.5, 0.0), (0.5, 0.25)]).unwrap();
    let report = ifs.check_osc();
    assert!(!report.holds && report.decidable);
    let (_, _, region) = report.overlap_witness.unwrap();
    assert!((region[0].0 - 0.25).abs() < 1e-15);
    assert!((region[0].1 - 0.5).abs() < 1e-15);
}

#[test]
fn bowen_parameter_cantor_is_log2_over_log3() {
    let ifs = cantor_ifs();
    let b = ifs.bowen_parameter().unwrap();
    assert!((b - 2.0f64.ln() / 3.0f64.ln()).abs() < 1e-9, "b = {b}");
    assert!(ifs.moran_residual(b).abs() <= 1e-10);
}

#[test]
fn bowen_parameter_two_ratio_matches_quadratic_closed_form() {
    // Σ r^t = 1 with r = (1/2, 1/4) is quadratic in y = 2^{-t}:
    // y + y² = 1, so y = (√5 − 1)/2 and t = −log₂ y.
    let ifs = two_ratio_ifs();
    let b = ifs.bowen_parameter().unwrap();
    let y = (5.0f64.sqrt() - 1.0) / 2.0;
    assert!((b - (-y.log2())).abs() < 1e-9, "b = {b}");
    assert!((b - 0.6942419136306174).abs() < 1e-9);
    assert!(ifs.moran_residual(b).abs() <= 1e-10);
}

#[test]
fn bowen_parameter_single_map_is_zero() {
    let ifs = ConformalIFS::similarities_1d((0.0, 1.0), &[(0.5, 0.25)]).unwrap();
    assert_eq!(ifs.bowen_parameter().unwrap(), 0.0);
}

#[test]
fn bowen_parameter_overfull_system_has_no_root_in_bracket() {
    let ifs = ConformalIFS::similarities_1d(
        (0.0, 1.0),
        &[(0.5, 0.0), (0.5, 0.1), (0.5, 0.2), (0.5, 0.3), (0.5, 0.5)],
    )
    .unwrap();
    assert!(matches!(
        ifs.bowen_parameter(),
        Err(GeometryError::NoSignChange { .. })
    ));
}

#[test]
fn mobius_iterates_match_closed_form() {
    // φ(x) = x/(1+x) iterates to x/(1+nx); derivative 1/(1+nx)².
    let m = Mobius::new(1.0, 0.0, 1.0, 1.0);
    let ifs = ConformalIFS::new(
        vec![(0.0, 1.0)],
        vec![
            ContractionMap::Mobius1d(m),
            ContractionMap::Mobius1d(Mobius::affine(0.5, 0.5)),
        ],
        SymbolicSpace::full_shift(2),
    )
    .unwrap();
    for n in [1usize, 2, 5, 10, 37] {
        let word = Word(vec![0; n]);
        for &x in &[0.1, 0.5, 1.0] {
            let (d, y) = ifs.deriv_at(&word, x).unwrap();
            let nf = n as f64;
            assert!((y - x / (1.0 + nf * x)).abs() < 1e-14);
            let closed = 1.0 / ((1.0 + nf * x) * (1.0 + nf * x));
            assert!((d - closed).abs() < 1e-12 * closed.max(1.0));
        }
    }
}

#[test]
fn distortion_constant_similarity_exactly_one() {
    assert_eq!(two_ratio_ifs().distortion_constant(6), 1.0);
}

#[test]
fn distortion_constant_mobius_finite() {
    let ifs = ConformalIFS::new(
        vec![(0.0, 1.0)],
        vec![
            ContractionMap::Mobius1d(Mobius::new(0.0, 1.0, 1.0, 1.0)), // 1/(1+x)
            ContractionMap::Mobius1d(Mobius::new(0.0, 1.0, 1.0, 2.0)), // 1/(2+x)
        ],
        SymbolicSpace::full_shift(2),
    )
    .unwrap();
    let q = ifs.distortion_constant(5);
    assert!((1.0..10.0).contains(&q), "q = {q}");
}

#[test]
fn ball_bounds_cantor_dyadic_radii() {
    let ifs = cantor_ifs();
    let mu = uniform2();
    for k in [4usize, 6, 8] {
        let r = ifs.cylinder_geometry(&Word(vec![0; k])).unwrap().hull[0].1;
        let b = ball_measure_bounds(&ifs, &mu, &[0.0], r, WalkParams::with_generation(40));
        let expect = math::powi(0.5, k as i32);
        assert!(b.resolved);
        assert!(b.upper <= expect + 1e-15, "upper {}", b.upper);
        assert!(b.lower <= b.upper);
        assert!(expect - b.lower <= math::powi(0.5, 25), "lower {}", b.lower);
    }
}

#[test]
fn ball_bounds_lebesgue_interval() {
    let ifs = binary_ifs();
    let mu = uniform2();
    let b = ball_measure_bounds(&ifs, &mu, &[0.5], 0.1, WalkParams::with_generation(30));
    assert!(b.resolved);
    assert!(b.lower <= 0.2 && 0.2 <= b.upper);
    assert!(b.width() <= 4.0 * math::powi(0.5, 30));
}

#[test]
fn ball_bounds_gap_point_is_zero() {
    let ifs = cantor_ifs();
    let mu = uniform2();
    let b = ball_measure_bounds(&ifs, &mu, &[0.5], 0.1, WalkParams::default());
    assert_eq!((b.lower, b.upper), (0.0, 0.0));
    assert!(b.resolved);
}

#[test]
fn annulus_bounds_lebesgue_closed_form() {
    let ifs = binary_ifs();
    let mu = uniform2();
    let r = 0.1f64;
    let b = annulus_measure_bounds(
        &ifs,
        &mu,
        &[0.5],
        r,
        r * r * r,
        WalkParams::with_generation(40),
    );
    assert!(b.resolved);
    assert!(b.lower <= 0.002 && 0.002 <= b.upper);
    assert!(b.width() <= 1e-6);
}

#[test]
fn annulus_bounds_missing_the_limit_set() {
    let ifs = cantor_ifs();
    let mu = uniform2();
    let b = annulus_measure_bounds(&ifs, &mu, &[0.0], 0.4, 0.064, WalkParams::default());
    assert_eq!((b.lower, b.upper), (0.0, 0.0));
}

#[test]
fn refinement_never_widens() {
    let ifs = binary_ifs();
    let mu = uniform2();
    let mut prev: Option<MeasureInterval> = None;
    for g in [8u32, 16, 24, 32] {
        let b = ball_measure_bounds(&ifs, &mu, &[0.3], 0.07, WalkParams::with_generation(g));
        if let Some(p) = prev {
            assert!(b.lower >= p.lower - 1e-15);
            assert!(b.upper <= p.upper + 1e-15);
        }
        prev = Some(b);
    }
}

#[test]
fn budget_exhaustion_flags_unresolved() {
    let ifs = binary_ifs();
    let mu = uniform2();
    let params = WalkParams {
        generation_cap: 48,
        node_budget: 10,
        max_depth: 4096,
    };
    let b = ball_measure_bounds(&ifs, &mu, &[0.3], 0.07, params);
    assert!(!b.resolved);
    assert!(b.lower <= b.upper && b.upper <= 1.0);
}

#[test]
fn interval_region_bounds() {
    let ifs = binary_ifs();
    let mu = uniform2();
    let parts = [(0.0, 0.25), (0.5, 0.625)];
    let b = region_measure_bounds(
        &ifs,
        &mu,
        &Region::Intervals(&parts),
        WalkParams::with_generation(30),
    );
    assert!(b.lower <= 0.375 && 0.375 <= b.upper);
    assert!(b.width() <= 1e-6);
}

#[test]
fn probe_cantor_is_trivially_satisfied() {
    let report = cantor_ifs().geometric_irreducibility_probe(64, 5);
    assert!(report.trivially_satisfied);
    assert!(!report.likely_reducible);
}

#[test]
fn probe_collinear_planar_system_reducible() {
    let ifs = ConformalIFS::new(
        vec![(0.0, 1.0), (0.0, 1.0)],
        vec![
            ContractionMap::Similarity {
                ratio: 0.5,
                linear: None,
                translation: vec![0.0, 0.0],
            },
            ContractionMap::Similarity {
                ratio: 0.5,
                linear: None,
                translation: vec![0.5, 0.5],
            },
        ],
        SymbolicSpace::full_shift(2),
    )
    .unwrap();
    let report = ifs.geometric_irreducibility_probe(64, 5);
    assert!(report.likely_reducible, "{report:?}");
    assert!(report.line_residual.unwrap() < 1e-9);
}

#[test]
fn probe_triangle_planar_system_not_reducible() {
    let ifs = ConformalIFS::new(
        vec![(0.0, 1.0), (0.0, 1.0)],
        vec![
            ContractionMap::Similarity {
                ratio: 0.5,
                linear: None,
                translation: vec![0.0, 0.0],
            },
            ContractionMap::Similarity {
                ratio: 0.5,
                linear: None,
                translation: vec![0.5, 0.0],
            },
            ContractionMap::Similarity {
                ratio: 0.5,
                linear: None,
                translation: vec![0.25, 0.4330127018922193],
            },
        ],
        SymbolicSpace::full_shift(3),
    )
    .unwrap();
    let report = ifs.geometric_irreducibility_probe(128, 5);
    assert!(!report.likely_reducible);
    assert!(report.line_residual.unwrap() > 1e-3);
    if let Some(c) = report.sphere_residual {
        assert!(c > 1e-3);
    }
}

#[test]
fn rejects_non_contracting_and_escaping_maps() {
    assert!(ConformalIFS::similarities_1d((0.0, 1.0), &[(1.2, 0.0)]).is_err());
    assert!(ConformalIFS::similarities_1d((0.0, 1.0), &[(0.5, 0.9)]).is_err());
}
