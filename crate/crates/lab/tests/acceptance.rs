//! Acceptance suite: one test per criterion, each printing a PASS line with
//! the measured quantities (visible with `--nocapture`). Tolerances are
//! pinned in the assertions. Stated runtime budgets are asserted too.

use std::time::Instant;

use ergolab::config::ExperimentConfig;
use ergolab::experiments;

use ergolab_core::annuli::{
    bad_radii_scan, tab_measure, DoublingBound, RadiiGrid, SubpolynomialFn,
};
use ergolab_core::gallery;
use ergolab_core::geometry::{annulus_measure_bounds, ball_measure_bounds, WalkParams};
use ergolab_core::returns::{
    empirical_entry_law, empirical_return_law, hsv_quantities, ks_exponential, markov_survival,
    pointwise_dimension, survival_sup_distance, BnSource, EmpiricalParams, WindowTarget,
};
use ergolab_core::symbolic::{CylinderMeasure, SymbolicSpace, Word};
use ergolab_core::thermo::{
    gibbs_measure, pressure, variational_gap, MarkovMeasure, Potential,
};
use ergolab_core::{math, rng};

const LN2: f64 = std::f64::consts::LN_2;

fn budget(start: Instant, seconds: f64, label: &str) {
    let elapsed = start.elapsed().as_secs_f64();
    assert!(
        elapsed < seconds,
        "{label}: took {elapsed:.2}s, budget {seconds}s"
    );
}

fn w(symbols: &[u32]) -> Word {
    Word::from_symbols(symbols)
}

/// The 2- and 3-state chains the exact oracles are checked on.
fn oracle_chains() -> Vec<(&'static str, MarkovMeasure)> {
    let full2 = SymbolicSpace::full_shift(2);
    let cycle2 = SymbolicSpace::from_incidence(&[vec![false, true], vec![true, false]]).unwrap();
    let full3 = SymbolicSpace::full_shift(3);
    let phi = (1.0 + 5.0f64.sqrt()) / 2.0;
    vec![
        (
            "fair-coin",
            MarkovMeasure::new(&full2, &[vec![0.5, 0.5], vec![0.5, 0.5]]).unwrap(),
        ),
        (
            "two-state-cycle",
            MarkovMeasure::new(&cycle2, &[vec![0.0, 1.0], vec![1.0, 0.0]]).unwrap(),
        ),
        (
            "lazy-chain",
            MarkovMeasure::new(&full2, &[vec![0.9, 0.1], vec![0.1, 0.9]]).unwrap(),
        ),
        (
            "golden-parry",
            MarkovMeasure::new(
                &SymbolicSpace::golden_mean(),
                &[vec![1.0 / phi, 1.0 - 1.0 / phi], vec![1.0, 0.0]],
            )
            .unwrap(),
        ),
        (
            "three-state-drift",
            MarkovMeasure::new(
                &full3,
                &[
                    vec![0.2, 0.5, 0.3],
                    vec![0.4, 0.1, 0.5],
                    vec![0.25, 0.25, 0.5],
                ],
            )
            .unwrap(),
        ),
        (
            "three-state-cycle",
            MarkovMeasure::new(
                &SymbolicSpace::from_incidence(&[
                    vec![false, true, false],
                    vec![false, false, true],
                    vec![true, false, false],
                ])
                .unwrap(),
                &[
                    vec![0.0, 1.0, 0.0],
                    vec![0.0, 0.0, 1.0],
                    vec![1.0, 0.0, 0.0],
                ],
            )
            .unwrap(),
        ),
    ]
}

/// Exhaustive path survival for a single-symbol target.
fn brute_survival(chain: &MarkovMeasure, target: u32, k: usize, conditional: bool) -> f64 {
    let space = chain.space();
    let words = space.admissible_words(k + 1).unwrap();
    let mut total = 0.0;
    for word in &words {
        if conditional && word[0] != target {
            continue;
        }
        if (1..=k).all(|n| word[n] != target) {
            total += chain.mass(word);
        }
    }
    if conditional {
        total / chain.mass(&[target])
    } else {
        total
    }
}

/// Exhaustive mixing distance: sup over all subsets of states.
fn brute_b_n(chain: &MarkovMeasure, target: u32, n: usize) -> f64 {
    let size = chain.space().alphabet_size();
    let mut law = vec![0.0; size];
    law[target as usize] = 1.0;
    for _ in 0..n {
        let mut next = vec![0.0; size];
        for (a, &mass) in law.iter().enumerate() {
            for b in 0..size {
                next[b] += mass * chain.transition(a as u32, b as u32);
            }
        }
        law = next;
    }
    let mut best = 0.0f64;
    for subset in 0..(1u32 << size) {
        let mut diff = 0.0;
        for j in 0..size {
            if subset & (1 << j) != 0 {
                diff += law[j] - chain.stationary()[j];
            }
        }
        best = best.max(diff.abs());
    }
    best
}

#[test]
fn c01_exact_oracles_match_path_enumeration() {
    let start = Instant::now();
    for (name, chain) in oracle_chains() {
        for target in 0..chain.space().alphabet_size() as u32 {
            if chain.mass(&[target]) == 0.0 {
                continue;
            }
            let oracle = markov_survival(&chain, &[w(&[target])], 12).unwrap();
            for k in 1..=12 {
                let entry = brute_survival(&chain, target, k, false);
                let ret = brute_survival(&chain, target, k, true);
                assert!(
                    (oracle.entry.get(k) - entry).abs() < 1e-13,
                    "{name} target {target} entry k={k}"
                );
                assert!(
                    (oracle.ret.get(k) - ret).abs() < 1e-13,
                    "{name} target {target} return k={k}"
                );
            }
            for n in 1..=12 {
                assert!(
                    (oracle.exact_b_n(n) - brute_b_n(&chain, target, n)).abs() < 1e-13,
                    "{name} target {target} b_N n={n}"
                );
            }
        }
    }
    budget(start, 5.0, "criterion 1");
    println!("PASS criterion 1: exact survival and mixing oracles match path enumeration");
}

#[test]
fn c02_survival_distance_within_error_budget_on_golden_chain() {
    let start = Instant::now();
    let system = gallery::golden_parry().unwrap();
    let chain = match &system.measure {
        gallery::Measure::Markov(m) => m.clone(),
        _ => unreachable!(),
    };
    let mut checked = 0;
    for depth in 1..=3usize {
        for target in system.space.admissible_words(depth).unwrap() {
            let mu = chain.mass(&target);
            if mu == 0.0 {
                continue;
            }
            let k_max = (60.0 / mu) as usize;
            let oracle = markov_survival(&chain, std::slice::from_ref(&target), k_max).unwrap();
            let report = hsv_quantities(
                &oracle.entry,
                &oracle.ret,
                oracle.mu_u,
                BnSource::Exact(&oracle),
                50,
            )
            .unwrap();
            let entry_sup = survival_sup_distance(&oracle.entry, oracle.mu_u);
            let return_sup = survival_sup_distance(&oracle.ret, oracle.mu_u);
            // Exact arithmetic: no tolerance on either inequality.
            assert!(entry_sup <= report.d, "{target}: {entry_sup} > {}", report.d);
            assert!(return_sup <= report.d, "{target}");
            assert!(report.best_n <= 50);
            assert!(report.c <= report.best_bound, "{target}");
            checked += 1;
        }
    }
    assert_eq!(checked, 2 + 3 + 5);
    budget(start, 10.0, "criterion 2");
    println!("PASS criterion 2: sup-distance to the exponential within d(U) on {checked} targets");
}

#[test]
fn c03_independence_degeneracy_values() {
    let start = Instant::now();
    let full2 = SymbolicSpace::full_shift(2);
    let coin = MarkovMeasure::new(&full2, &[vec![0.5, 0.5], vec![0.5, 0.5]]).unwrap();
    let oracle = markov_survival(&coin, &[w(&[0])], 60).unwrap();
    let report = hsv_quantities(
        &oracle.entry,
        &oracle.ret,
        oracle.mu_u,
        BnSource::Exact(&oracle),
        30,
    )
    .unwrap();
    assert_eq!(report.c, 0.0);
    assert_eq!(report.d, 2.0);

    let cycle = SymbolicSpace::from_incidence(&[vec![false, true], vec![true, false]]).unwrap();
    let cycle_chain = MarkovMeasure::new(&cycle, &[vec![0.0, 1.0], vec![1.0, 0.0]]).unwrap();
    let oracle = markov_survival(&cycle_chain, &[w(&[0])], 60).unwrap();
    let report = hsv_quantities(
        &oracle.entry,
        &oracle.ret,
        oracle.mu_u,
        BnSource::Exact(&oracle),
        30,
    )
    .unwrap();
    assert_eq!(report.c, 0.5);
    let expected_d = 2.0 + 0.5 * (1.0 - 0.5f64.ln());
    assert!((report.d - expected_d).abs() <= 1e-9);
    assert_eq!(format!("{:.6}", report.d), "2.846574");
    budget(start, 5.0, "criterion 3");
    println!(
        "PASS criterion 3: degenerate budgets c=0, d=2 (independence) and c=0.5, d={:.6} (cycle)",
        report.d
    );
}

#[test]
fn c04_exponential_law_simulation_and_periodic_control() {
    let start = Instant::now();
    let space = SymbolicSpace::full_shift(2);
    let coin = MarkovMeasure::new(&space, &[vec![0.5, 0.5], vec![0.5, 0.5]]).unwrap();
    let target = w(&[0, 1, 1, 0, 0, 1, 0, 1, 1, 1]);
    assert!(space.word_self_overlap(&target).unwrap() >= 3);
    let mu = coin.mass(&target);
    assert_eq!(mu, math::powi(0.5, 10));
    let params = EmpiricalParams {
        n_samples: 50_000,
        horizon: None,
        seed: 20_240_601,
    };
    let ecdf = empirical_entry_law(&coin, &WindowTarget::Word(&target), mu, &params).unwrap();
    assert!(ecdf.censored_fraction() < 0.01);
    let ks = ks_exponential(&ecdf).unwrap();
    assert!(ks <= 0.03, "ks = {ks}");

    let cycle = SymbolicSpace::from_incidence(&[vec![false, true], vec![true, false]]).unwrap();
    let cycle_chain = MarkovMeasure::new(&cycle, &[vec![0.0, 1.0], vec![1.0, 0.0]]).unwrap();
    let control = empirical_return_law(
        &cycle_chain,
        &WindowTarget::Word(&w(&[0])),
        0.5,
        &EmpiricalParams {
            n_samples: 2_000,
            horizon: Some(50),
            seed: 3,
        },
    )
    .unwrap();
    let control_ks = ks_exponential(&control).unwrap();
    assert!(control_ks >= 0.6, "control ks = {control_ks}");
    budget(start, 60.0, "criterion 4");
    println!("PASS criterion 4: empirical entry law ks={ks:.4} <= 0.03; periodic control ks={control_ks:.3} >= 0.6");
}

fn run_config(json: &str) -> ergolab::report::RunOutcome {
    let config = ExperimentConfig::from_json(json).unwrap();
    experiments::run(&config).unwrap().0
}

#[test]
fn c05_thin_annuli_sweep_on_the_middle_thirds_system() {
    let start = Instant::now();
    let dir = tempfile::tempdir().unwrap();
    let json = format!(
        r#"{{
          "system": {{"name": "cantor"}},
          "kind": "thin-annuli",
          "seed": 7,
          "output": {{"csv": "{0}/a.csv", "summary": "{0}/a.json"}},
          "params": {{"points": 100, "scale_base": 3.0, "j_min": 5, "j_max": 10,
                      "kappa": {{"constant": 3.0}}, "jitter": true}}
        }}"#,
        dir.path().display()
    );
    let outcome = run_config(&json);
    let resolved = outcome.pass + outcome.fail;
    assert!(resolved > 0);
    let fraction = outcome.pass as f64 / resolved as f64;
    assert!(fraction >= 0.99, "only {fraction} of resolved cells pass");
    assert!(
        outcome
            .notes
            .iter()
            .any(|n| n == "max_ratio_nonincreasing=true"),
        "{:?}",
        outcome.notes
    );
    budget(start, 60.0, "criterion 5");
    println!(
        "PASS criterion 5: {}/{resolved} resolved cells below 1e-3, per-scale maxima nonincreasing",
        outcome.pass
    );
}

#[test]
fn c06_lebesgue_annuli_closed_form() {
    let start = Instant::now();
    let system = gallery::binary_lebesgue().unwrap();
    let ifs = system.ifs.as_ref().unwrap();
    let params = WalkParams::with_generation(40);
    for &x in &[0.37, 0.62] {
        for &r in &[0.1, 0.01] {
            let ball = ball_measure_bounds(ifs, &system.measure, &[x], r, params);
            let annulus =
                annulus_measure_bounds(ifs, &system.measure, &[x], r, r * r * r, params);
            let lo = annulus.lower / ball.upper;
            let hi = annulus.upper / ball.lower;
            assert!(lo <= r * r && r * r <= hi, "x={x} r={r}: [{lo}, {hi}]");
            assert!(hi - lo <= 1e-6, "x={x} r={r}: width {}", hi - lo);
        }
    }
    budget(start, 5.0, "criterion 6");
    println!("PASS criterion 6: certified annulus/ball ratios bracket r^2 within 1e-6");
}

#[test]
fn c07_doubling_sweep_on_the_middle_thirds_system() {
    let start = Instant::now();
    let dir = tempfile::tempdir().unwrap();
    let json = format!(
        r#"{{
          "system": {{"name": "cantor"}},
          "kind": "doubling",
          "seed": 11,
          "output": {{"csv": "{0}/d.csv", "summary": "{0}/d.json"}},
          "params": {{"points": 100, "j_min": 6, "j_max": 16, "epsilon": 0.5}}
        }}"#,
        dir.path().display()
    );
    let outcome = run_config(&json);
    let resolved = outcome.pass + outcome.fail;
    let fraction = outcome.pass as f64 / resolved as f64;
    assert!(fraction >= 0.99, "certified fraction {fraction}");
    budget(start, 30.0, "criterion 7");
    println!(
        "PASS criterion 7: doubling inequality certified at {}/{resolved} resolved cells",
        outcome.pass
    );
}

#[test]
fn c08_bad_radii_density_bound_for_lebesgue() {
    let start = Instant::now();
    let system = gallery::binary_lebesgue().unwrap();
    let ifs = system.ifs.as_ref().unwrap();
    let kappa = SubpolynomialFn::constant(3.0).unwrap();
    let g = DoublingBound::log_power(0.5, 1.3).unwrap();
    // The asserted halving factor is certified on the deep scales.
    let deep: Vec<f64> = (10..=30).map(|j| math::powi(0.5, j)).collect();
    assert!(g.halving_factor(&deep).unwrap() <= 1.3);
    let grid = RadiiGrid::dyadic(4, 20, None);
    let mut rng = rng::stream(5, 0);
    let x = ifs.sample_point(&system.measure, &mut rng, 1e-13)[0];

    let scan = bad_radii_scan(
        ifs,
        &system.measure,
        &[x],
        0.01,
        &kappa,
        &grid,
        &g,
        WalkParams::default(),
    )
    .unwrap();
    assert!(
        scan.bad.length_upto(0.1) == 0.0,
        "bad radii below 0.1: {:?}",
        scan.bad.parts()
    );

    let tiny = bad_radii_scan(
        ifs,
        &system.measure,
        &[x],
        1e-4,
        &kappa,
        &grid,
        &g,
        WalkParams::default(),
    )
    .unwrap();
    for row in &tiny.bound_rows {
        assert!(
            row.measured <= row.bound,
            "scale {}: {} > {}",
            row.r,
            row.measured,
            row.bound
        );
    }
    assert!(!tiny.bad.is_empty());
    budget(start, 10.0, "criterion 8");
    println!("PASS criterion 8: empty bad set at A=0.01 and density bound respected at A=1e-4");
}

#[test]
fn c09_prefix_diameter_avoidance_masses() {
    let start = Instant::now();
    let cantor = gallery::cantor().unwrap();
    let ifs = cantor.ifs.as_ref().unwrap();
    let d4 = ifs.cylinder_geometry(&Word(vec![0; 4])).unwrap().diameter;
    let d5 = ifs.cylinder_geometry(&Word(vec![0; 5])).unwrap().diameter;
    let full = tab_measure(ifs, &cantor.measure, d5, d4, 1.0, 64).unwrap();
    assert!(full.exact);
    assert_eq!(full.lower, 1.0);
    let empty = tab_measure(ifs, &cantor.measure, 0.5 * d4, 2.0 * d4, 1.0, 64).unwrap();
    assert!(empty.exact);
    assert_eq!(empty.upper, 0.0);

    let two = gallery::two_ratio(0.5, 0.25, None).unwrap();
    let ifs2 = two.ifs.as_ref().unwrap();
    let a = math::powi(0.5, 6);
    let b = math::powi(0.5, 4);
    let tab = tab_measure(ifs2, &two.measure, a, b, 1.0, 64).unwrap();
    // Depth-12 exhaustive enumeration.
    let mut oracle = 0.0;
    for word in ifs2.space().admissible_words(12).unwrap() {
        let mut ok = true;
        for k in 1..=word.len() {
            let d = ifs2
                .cylinder_geometry(&Word(word.0[..k].to_vec()))
                .unwrap()
                .diameter;
            if a < d && d < b {
                ok = false;
                break;
            }
            if d <= a {
                break;
            }
        }
        if ok {
            oracle += math::powi(0.5, 12);
        }
    }
    assert!(tab.exact);
    assert_eq!(tab.lower, oracle);
    budget(start, 10.0, "criterion 9");
    println!(
        "PASS criterion 9: avoidance masses exact (1, 0, and {} matching enumeration)",
        tab.lower
    );
}

#[test]
fn c10_pressure_gibbs_and_dimension_roots() {
    let start = Instant::now();
    let full2 = SymbolicSpace::full_shift(2);
    let golden = SymbolicSpace::golden_mean();
    let zero_full = Potential::constant(&full2, 0.0);
    let zero_golden = Potential::constant(&golden, 0.0);
    let phi = (1.0 + 5.0f64.sqrt()) / 2.0;
    assert!((pressure(&full2, &zero_full).unwrap().value - LN2).abs() <= 1e-12);
    assert!((pressure(&golden, &zero_golden).unwrap().value - phi.ln()).abs() <= 1e-12);

    let parry = gibbs_measure(&golden, &zero_golden).unwrap();
    let expect_mass = (5.0 + 5.0f64.sqrt()) / 10.0;
    assert!((parry.mass(&[0]) - expect_mass).abs() <= 1e-12);

    let parry_chain = MarkovMeasure::new(
        &golden,
        &[vec![1.0 / phi, 1.0 - 1.0 / phi], vec![1.0, 0.0]],
    )
    .unwrap();
    let gap = variational_gap(&parry_chain, &zero_golden).unwrap();
    assert!(gap.abs() <= 1e-9, "equilibrium gap {gap}");

    let mut rng = rng::stream(77, 0);
    for space in [full2.clone(), golden.clone()] {
        let f = Potential::depth1(&space, &[0.2, -0.3]).unwrap();
        for _ in 0..50 {
            let n = space.alphabet_size();
            let mut rows = Vec::new();
            for a in 0..n {
                let mut row = vec![0.0; n];
                let mut total = 0.0;
                for (b, slot) in row.iter_mut().enumerate() {
                    if space.admissible(a as u32, b as u32) {
                        *slot = 0.02 + rng::uniform(&mut rng);
                        total += *slot;
                    }
                }
                for slot in row.iter_mut() {
                    *slot /= total;
                }
                rows.push(row);
            }
            let m = MarkovMeasure::new(&space, &rows).unwrap();
            let gap = variational_gap(&m, &f).unwrap();
            assert!(gap < 0.0, "random measure hit the equilibrium exactly");
            assert!(gap <= 1e-9);
        }
    }

    let cantor = gallery::cantor().unwrap();
    let b1 = cantor.ifs.as_ref().unwrap().bowen_parameter().unwrap();
    assert!((b1 - LN2 / 3.0f64.ln()).abs() <= 1e-9);
    let two = gallery::two_ratio(0.5, 0.25, None).unwrap();
    let b2 = two.ifs.as_ref().unwrap().bowen_parameter().unwrap();
    assert!((b2 - 0.6942419136306174).abs() <= 1e-9);
    budget(start, 5.0, "criterion 10");
    println!("PASS criterion 10: pressure ln2/lnφ, eigen masses, variational gaps, roots {b1:.10} and {b2:.7}");
}

#[test]
fn c11_parabolic_iterate_asymptotics_and_summability() {
    let start = Instant::now();
    let (spec, _) = gallery::make_parabolic_farey(0.8, 100).unwrap();
    let phi = match &spec.base.maps()[0] {
        ergolab_core::geometry::ContractionMap::Mobius1d(m) => *m,
        _ => unreachable!(),
    };
    for &x in &[0.1, 0.5, 1.0] {
        let mut d = 1.0f64;
        let mut y = x;
        for n in 1..=10_000u32 {
            d *= phi.deriv(y).abs();
            y = phi.eval(y);
            let nf = n as f64;
            let closed = 1.0 / ((1.0 + nf * x) * (1.0 + nf * x));
            assert!(
                (d - closed).abs() <= 1e-10 * closed,
                "n={n} x={x}: {d} vs {closed}"
            );
        }
    }
    let (d1000, _) = spec.base.deriv_at(&Word(vec![0; 1000]), 1.0).unwrap();
    let scaled = 1_000_000.0 * d1000;
    assert!((0.998..=1.0).contains(&scaled), "scaled = {scaled}");

    assert!(!gallery::induced_potential_summable(0.5, 1.0));
    assert!(gallery::induced_potential_summable(0.5000000000000001, 1.0));
    assert!(matches!(
        gallery::make_parabolic_farey(0.5, 10),
        Err(gallery::GalleryError::NonSummable { .. })
    ));
    assert!(gallery::make_parabolic_farey(0.5000000000000001, 10).is_ok());
    budget(start, 10.0, "criterion 11");
    println!("PASS criterion 11: chain-rule matches closed form to 1e-10, n²-scaling in window, summability flips at 1/2");
}

#[test]
fn c12_pointwise_dimensions() {
    let start = Instant::now();
    let cantor = gallery::cantor().unwrap();
    let ifs = cantor.ifs.as_ref().unwrap();
    let grid: Vec<f64> = (4..=12)
        .map(|k| ifs.cylinder_geometry(&Word(vec![0; k])).unwrap().diameter)
        .collect();
    let est = pointwise_dimension(ifs, &cantor.measure, &[0.0], &grid, WalkParams::default());
    let expect = LN2 / 3.0f64.ln();
    assert!((est.lower - expect).abs() <= 1e-6, "lower {}", est.lower);
    assert!((est.upper - expect).abs() <= 1e-6, "upper {}", est.upper);
    assert!((est.slope - expect).abs() <= 1e-6);

    let lebesgue = gallery::binary_lebesgue().unwrap();
    let ifs_l = lebesgue.ifs.as_ref().unwrap();
    let grid_l: Vec<f64> = (6..=16).map(|k| math::powi(0.5, k)).collect();
    let est_l = pointwise_dimension(
        ifs_l,
        &lebesgue.measure,
        &[0.4375],
        &grid_l,
        WalkParams::default(),
    );
    assert!((est_l.slope - 1.0).abs() <= 1e-6, "slope {}", est_l.slope);

    let skew = gallery::bernoulli(&[0.9, 0.1]).unwrap();
    let est_s = pointwise_dimension(
        ifs_l,
        &skew.measure,
        &[0.0],
        &grid_l,
        WalkParams::with_generation(60),
    );
    let expect_s = math::ln(1.0 / 0.9) / LN2;
    assert!((expect_s - 0.152003).abs() < 1e-6);
    assert!((est_s.slope - expect_s).abs() <= 1e-4, "slope {}", est_s.slope);
    budget(start, 10.0, "criterion 12");
    println!(
        "PASS criterion 12: dimensions {:.6}, {:.6}, {:.6}",
        est.slope, est_l.slope, est_s.slope
    );
}

#[test]
fn c13_reruns_are_byte_identical() {
    let start = Instant::now();
    let dir = tempfile::tempdir().unwrap();
    let json = |tag: &str| {
        format!(
            r#"{{
              "system": {{"name": "cantor"}},
              "kind": "thin-annuli",
              "seed": 99,
              "output": {{"csv": "{0}/{tag}.csv", "summary": "{0}/{tag}.json"}},
              "params": {{"points": 20, "scale_base": 3.0, "j_min": 5, "j_max": 8,
                          "kappa": {{"constant": 3.0}}, "jitter": true}}
            }}"#,
            dir.path().display()
        )
    };
    for tag in ["one", "two"] {
        let config = ExperimentConfig::from_json(&json(tag)).unwrap();
        let (outcome, wall) = experiments::run(&config).unwrap();
        ergolab::report::write_outputs(&config, &outcome, wall).unwrap();
    }
    let a = std::fs::read(dir.path().join("one.csv")).unwrap();
    let b = std::fs::read(dir.path().join("two.csv")).unwrap();
    assert_eq!(a, b, "reruns differ");

    // JSON summaries agree on everything but wall time and output paths.
    let normalize = |tag: &str| -> serde_json::Value {
        let mut v: serde_json::Value = serde_json::from_str(
            &std::fs::read_to_string(dir.path().join(format!("{tag}.json"))).unwrap(),
        )
        .unwrap();
        v["wall_time_ms"] = 0.into();
        v["config"]["output"] = serde_json::json!({});
        v
    };
    assert_eq!(normalize("one"), normalize("two"));

    // Worker count must not change a byte either: rerun through the binary
    // with explicit worker overrides.
    let exe = env!("CARGO_BIN_EXE_ergolab");
    for (tag, workers) in [("w1", "1"), ("w4", "4")] {
        std::fs::write(dir.path().join(format!("{tag}.cfg")), json(tag)).unwrap();
        let status = std::process::Command::new(exe)
            .arg("run")
            .arg(dir.path().join(format!("{tag}.cfg")))
            .env("ERGOLAB_WORKERS", workers)
            .status()
            .unwrap();
        assert!(status.success());
    }
    let w1 = std::fs::read(dir.path().join("w1.csv")).unwrap();
    let w4 = std::fs::read(dir.path().join("w4.csv")).unwrap();
    assert_eq!(w1, w4, "worker count changed the CSV");
    assert_eq!(a, w1);
    budget(start, 30.0, "criterion 13");
    println!("PASS criterion 13: reruns and worker-count changes are byte-identical");
}
