use alloc::vec;

use super::*;
use crate::geometry::Branch1d;
use crate::symbolic::additivity_defect;

#[test]
fn cantor_certifications() {
    let sys = cantor().unwrap();
    assert_eq!(sys.weak_independence, 1.0);
    let cb = sys.condition_b.unwrap();
    assert_eq!(cb.beta, 1.0);
    assert!((cb.sum - 3.0).abs() < 1e-12, "sum = {}", cb.sum);
    assert_eq!(sys.distortion_report(6), Some(1.0));
}

#[test]
fn two_ratio_diameters() {
    let sys = two_ratio(0.5, 0.25, None).unwrap();
    let ifs = sys.ifs.as_ref().unwrap();
    let geo = ifs.cylinder_geometry(&Word(vec![1, 0])).unwrap();
    assert_eq!(geo.diameter, 0.125);
}

#[test]
fn golden_parry_is_the_eigen_measure() {
    let sys = golden_parry().unwrap();
    let expect = (5.0 + 5.0f64.sqrt()) / 10.0;
    assert!((sys.measure.mass(&[0]) - expect).abs() < 1e-12);
    let phi = (1.0 + 5.0f64.sqrt()) / 2.0;
    assert!(
        sys.weak_independence <= phi * phi + 1e-9,
        "P = {}",
        sys.weak_independence
    );
    assert!(sys.weak_independence >= 1.0);
}

#[test]
fn gauss_truncation_reports_tail() {
    let sys = gauss_truncated(100, 1.0).unwrap();
    let tail = sys.tail_mass.unwrap();
    // Tail of Σ n^{-2} beyond 100 is below 1/100 (before normalisation the
    // integral bound is exactly 10^{-2}).
    assert!(tail > 0.0 && tail <= 0.01, "tail = {tail}");
    let ifs = sys.ifs.as_ref().unwrap();
    for (idx, &(lo, hi)) in ifs.deriv_ranges().iter().enumerate() {
        let n = (idx + 1) as f64;
        assert!((lo - 1.0 / ((n + 1.0) * (n + 1.0))).abs() < 1e-15);
        assert!((hi - 1.0 / (n * n)).abs() < 1e-15);
    }
    // Borderline record at β = 1/2: finite on the truncation, growing only
    // logarithmically.
    let cb = sys.condition_b.unwrap();
    assert!(cb.sum.is_finite() && cb.sum < 10.0);
}

#[test]
fn gauss_rejects_out_of_range() {
    assert!(gauss_truncated(0, 1.0).is_err());
    assert!(gauss_truncated(20_000, 1.0).is_err());
    assert!(gauss_truncated(100, 0.5).is_err());
}

#[test]
fn markov_partition_of_doubling_map() {
    let map = PiecewiseMap1d::expanding_mod_one(2);
    let ifs = markov_partition_1d(&map).unwrap();
    assert!(ifs.space().is_full_shift());
    assert_eq!(ifs.space().alphabet_size(), 2);
    for &(lo, hi) in ifs.deriv_ranges() {
        assert!((lo - 0.5).abs() < 1e-15 && (hi - 0.5).abs() < 1e-15);
    }
    let h0 = ifs.cylinder_geometry(&Word(vec![0])).unwrap().hull;
    assert!((h0[0].0 - 0.0).abs() < 1e-15 && (h0[0].1 - 0.5).abs() < 1e-15);
}

#[test]
fn markov_partition_of_three_branch_map() {
    let map = PiecewiseMap1d::expanding_mod_one(3);
    let ifs = markov_partition_1d(&map).unwrap();
    assert!(ifs.space().is_full_shift());
    assert_eq!(ifs.space().alphabet_size(), 3);
    assert!((ifs.contraction() - 1.0 / 3.0).abs() < 1e-15);
}

#[test]
fn markov_partition_with_proper_covering_relation() {
    // Branch 0 maps its cell onto the second cell only; branch 1 onto
    // everything: incidence [[0,1],[1,1]] and exact cell hulls.
    let third = 1.0 / 3.0;
    let map = PiecewiseMap1d::new(
        (0.0, 1.0),
        vec![
            Branch1d {
                lo: 0.0,
                hi: third,
                map: Mobius::affine(2.0, third),
            },
            Branch1d {
                lo: third,
                hi: 1.0,
                map: Mobius::affine(1.5, -0.5),
            },
        ],
    )
    .unwrap();
    let (ilo, ihi) = map.branch_image(0);
    assert!((ilo - third).abs() < 1e-15 && (ihi - 1.0).abs() < 1e-15);
    assert_eq!(map.branch_image(1), (0.0, 1.0));
    let ifs = markov_partition_1d(&map).unwrap();
    assert!(!ifs.space().admissible(0, 0));
    assert!(ifs.space().admissible(0, 1));
    assert!(ifs.space().admissible(1, 0) && ifs.space().admissible(1, 1));
    let h0 = ifs.cylinder_geometry(&Word(vec![0])).unwrap().hull;
    assert!((h0[0].0 - 0.0).abs() < 1e-12 && (h0[0].1 - third).abs() < 1e-12);
}

#[test]
fn markov_partition_rejects_misaligned_images() {
    let map = PiecewiseMap1d::new(
        (0.0, 1.0),
        vec![
            Branch1d {
                lo: 0.0,
                hi: 0.5,
                map: Mobius::affine(1.5, 0.0), // image [0, 0.75]: not a cell union
            },
            Branch1d {
                lo: 0.5,
                hi: 1.0,
                map: Mobius::affine(2.0, -1.0),
            },
        ],
    )
    .unwrap();
    assert!(matches!(
        markov_partition_1d(&map),
        Err(GalleryError::NonMarkovBranch { branch: 0, .. })
    ));
}

#[test]
fn summability_flag_flips_exactly_at_half() {
    assert!(!induced_potential_summable(0.5, 1.0));
    assert!(!induced_potential_summable(0.4999999999999999, 1.0));
    assert!(induced_potential_summable(0.5000000000000001, 1.0));
    assert!(matches!(
        make_parabolic_farey(0.5, 10),
        Err(GalleryError::NonSummable { .. })
    ));
    assert!(matches!(
        make_parabolic_farey(0.3, 10),
        Err(GalleryError::NonSummable { .. })
    ));
}

#[test]
fn farey_induced_alphabet_counts() {
    let (spec, system) = make_parabolic_farey(0.8, 50).unwrap();
    assert_eq!(spec.induced_words.len(), 51);
    assert_eq!(system.space.alphabet_size(), 51);
    assert_eq!(spec.induced_words[0], Word(vec![0, 1]));
    assert_eq!(*spec.induced_words.last().unwrap(), Word(vec![1]));
}

#[test]
fn farey_parabolic_iterate_closed_form() {
    let (spec, _) = make_parabolic_farey(0.8, 10).unwrap();
    // (φ₀ⁿ)'(1) = 1/(1+n)²: at n = 10 that is 1/121, and n²·|φ'| → 1.
    let (d, y) = spec.base.deriv_at(&Word(vec![0; 10]), 1.0).unwrap();
    assert!((d - 1.0 / 121.0).abs() < 1e-14);
    assert!((y - 1.0 / 11.0).abs() < 1e-14);
    assert!((100.0 * d - 100.0 / 121.0).abs() < 1e-12);
}

#[test]
fn farey_chain_rule_matches_closed_form_up_to_ten_thousand() {
    let (spec, _) = make_parabolic_farey(0.8, 10).unwrap();
    let phi = match &spec.base.maps()[0] {
        crate::geometry::ContractionMap::Mobius1d(m) => *m,
        _ => unreachable!(),
    };
    for &x in &[0.1, 0.5, 1.0] {
        // Incremental chain rule along iterates of the parabolic branch.
        let mut d = 1.0f64;
        let mut y = x;
        for n in 1..=10_000u32 {
            d *= phi.deriv(y).abs();
            y = phi.eval(y);
            let nf = n as f64;
            let closed = 1.0 / ((1.0 + nf * x) * (1.0 + nf * x));
            assert!(
                (d - closed).abs() <= 1e-10 * closed.max(1e-300),
                "n = {n}, x = {x}: {d} vs {closed}"
            );
        }
    }
}

#[test]
fn farey_iterate_derivative_asymptotics() {
    let (spec, _) = make_parabolic_farey(0.8, 10).unwrap();
    for n in 9..=50usize {
        let (d, _) = spec.base.deriv_at(&Word(vec![0; n]), 1.0).unwrap();
        let scaled = (n * n) as f64 * d;
        assert!(
            (0.8..=1.0).contains(&scaled),
            "n = {n}: scaled = {scaled}"
        );
    }
    let (d, _) = spec.base.deriv_at(&Word(vec![0; 1000]), 1.0).unwrap();
    let scaled = 1_000_000.0 * d;
    assert!((0.998..=1.0).contains(&scaled), "scaled = {scaled}");
}

#[test]
fn farey_tail_mass_shrinks_with_truncation() {
    // At t = 0.8 the weights behave like n^{-1.6}, so the reported tail
    // decays like N^{-0.6}: a couple of percent at N = 1000, under one
    // percent by N = 5000.
    let (spec, _) = make_parabolic_farey(0.8, 1000).unwrap();
    assert!(spec.tail_mass < 0.025, "tail = {}", spec.tail_mass);
    assert!(spec.summable);
    let (deep, _) = make_parabolic_farey(0.8, 5000).unwrap();
    assert!(deep.tail_mass < 0.01, "tail = {}", deep.tail_mass);
    assert!(deep.tail_mass < spec.tail_mass);
}

#[test]
fn farey_bowen_bracket_contains_the_full_system_root() {
    // The untruncated family's dimension root is 1 (its limit set fills the
    // interval); the inf/sup bracket of a deep truncation must contain it.
    let (spec, _) = make_parabolic_farey(0.9, 300).unwrap();
    let (lo, hi) = spec.bowen_bracket;
    assert!(lo < 1.0 && 1.0 < hi, "bracket = ({lo}, {hi})");
}

#[test]
fn farey_induced_weights_scale_like_the_blocks() {
    let (spec, system) = make_parabolic_farey(0.8, 200).unwrap();
    // Weights ∝ sup|φ'_{0ⁿ1}|^t = (2/(n+2)²)^t ≍ n^{-1.6}.
    let m10 = system.measure.mass(&[9]); // induced symbol for n = 10
    let m100 = system.measure.mass(&[99]); // n = 100
    let expect_ratio = math::powf(102.0 * 102.0 / (12.0 * 12.0), 0.8);
    assert!((m10 / m100 - expect_ratio).abs() < 1e-9 * expect_ratio);
    let _ = spec;
}

#[test]
fn gallery_systems_pass_measure_suites() {
    let systems = vec![
        bernoulli(&[0.25, 0.75]).unwrap(),
        golden_parry().unwrap(),
        cantor().unwrap(),
        two_ratio(0.5, 0.25, None).unwrap(),
        binary_lebesgue().unwrap(),
    ];
    for sys in &systems {
        assert!(
            additivity_defect(&sys.measure, 10) < 1e-12,
            "additivity failed for {}",
            sys.name
        );
        assert!(sys.weak_independence.is_finite());
        if let Some(q) = sys.distortion_report(5) {
            assert!(q >= 1.0);
        }
    }
    let gauss = gauss_truncated(50, 1.0).unwrap();
    assert!(additivity_defect(&gauss.measure, 2) < 1e-12);
    let (_, farey) = make_parabolic_farey(0.8, 30).unwrap();
    assert!(additivity_defect(&farey.measure, 2) < 1e-12);
}

#[test]
fn name_dispatch_and_catalog() {
    let mut params = Params::new();
    assert!(make_system("cantor", &params).is_ok());
    assert!(matches!(
        make_system("nope", &params),
        Err(GalleryError::UnknownSystem(_))
    ));
    params.insert("p".into(), ParamValue::Vector(vec![0.5, 0.5]));
    assert!(make_system("bernoulli", &params).is_ok());
    let mut mk = Params::new();
    mk.insert(
        "rows".into(),
        ParamValue::Matrix(vec![vec![0.0, 1.0], vec![1.0, 0.0]]),
    );
    assert!(make_system("markov", &mk).is_ok());
    assert!(!system_catalog().is_empty());
    for (name, _, _) in system_catalog() {
        if name == "bernoulli" || name == "markov" {
            continue;
        }
        assert!(
            make_system(name, &Params::new()).is_ok(),
            "default construction failed for {name}"
        );
    }
}
