//! Acceptance suite: one test per release criterion, each printing a single
//! PASS/FAIL line (visible under `-- --nocapture` or in failure output).
//! Tolerances are pinned here, not configurable.

use gclab_core::counting::{
    bound_value, count_boosted, outcome_distribution, within_bound_mass, CountingSpec,
    MIN_SUCCESS_PROBABILITY,
};
use gclab_core::graph::{
    alpha_star, sample_gnp, Graph, GraphCollisionInstance, DEFAULT_NODE_BUDGET,
};
use gclab_core::pipeline::{
    precision_for, run_case_trials, run_pipeline, worst_case_charge, CaseGenerator,
    DecisionPoint, PipelineConfig,
};
use gclab_core::rng::{derive_seed, seeded_rng};
use gclab_core::span::build_gc_span_program;
use gclab_core::study::{
    alpha_star_tail_bound, alpha_star_tail_study, chernoff_bound, chernoff_empirical_check,
    tail_threshold_floor, ChernoffParams,
};
use rand::Rng;

fn report(ix: u32, name: &str, pass: bool, detail: &str) {
    let verdict = if pass { "PASS" } else { "FAIL" };
    println!("ACCEPTANCE {ix} {name}: {verdict} - {detail}");
    assert!(pass, "acceptance criterion {ix} ({name}) failed: {detail}");
}

#[test]
fn criterion_1_five_vertex_exhaustive_equivalence() {
    let pairs: Vec<(usize, usize)> = (1..=5usize)
        .flat_map(|u| ((u + 1)..=5).map(move |v| (u, v)))
        .collect();
    let mut checked = 0u64;
    for mask in 0u32..(1 << 10) {
        let edges: Vec<(usize, usize)> = pairs
            .iter()
            .enumerate()
            .filter(|(i, _)| (mask >> i) & 1 == 1)
            .map(|(_, &e)| e)
            .collect();
        let g = Graph::new(5, edges).unwrap();
        for k in [0u64, 5, 10] {
            let prog = build_gc_span_program(&g, k);
            let expl = prog.to_explicit().unwrap();
            for bits in 0u32..32 {
                let x: Vec<bool> = (0..5).map(|j| (bits >> j) & 1 == 1).collect();
                let truth = GraphCollisionInstance::new(&g, x.clone())
                    .unwrap()
                    .has_collision();
                let via_gram = prog.evaluate_with_tol(&x, 1e-8).unwrap();
                let via_coords = expl.evaluate(&x, 1e-8);
                if via_gram != truth || via_coords != truth {
                    report(
                        1,
                        "span equivalence over all 5-vertex graphs",
                        false,
                        &format!(
                            "graph mask {mask} k={k} x={bits:05b}: truth={truth} \
                             gram={via_gram} coords={via_coords}"
                        ),
                    );
                }
                checked += 1;
            }
        }
    }
    report(
        1,
        "span equivalence over all 5-vertex graphs",
        true,
        &format!("{checked} evaluations, both routes match collision truth"),
    );
}

#[test]
fn criterion_2_witness_sizes_within_bound() {
    let master = 0x5eedc2u64;
    let p_grid = [0.2, 0.35, 0.5, 0.65, 0.8];
    let (mut positives, mut negatives) = (0u32, 0u32);
    for i in 0..240u64 {
        let mut rng = seeded_rng(derive_seed(master, i));
        let n = 2 + (rng.random::<u64>() % 9) as usize;
        let p = p_grid[(i % 5) as usize];
        let g = sample_gnp(n, p, derive_seed(master, 10_000 + i)).unwrap();
        let x: Vec<bool> = (0..n).map(|_| rng.random_bool(0.5)).collect();
        let inst = GraphCollisionInstance::new(&g, x.clone()).unwrap();
        let alpha = alpha_star(&g, DEFAULT_NODE_BUDGET).unwrap();
        let k = 2 * alpha.max(n as u64);
        let prog = build_gc_span_program(&g, k);
        let expl = prog.to_explicit().unwrap();
        let bound = prog.witness_size_bound();
        let gamma = prog.gamma();

        let name = "witness sizes within sqrt(2(n+k))";
        if inst.has_collision() {
            positives += 1;
            let min = prog.min_positive_witness(&x).unwrap();
            if min.min_wsize > bound + 1e-6 {
                report(2, name, false, &format!("positive min {} over bound {bound} (n={n} k={k})", min.min_wsize));
            }
            let proof = prog.proof_positive_witness(&x).unwrap();
            let expect = 2.0 * gamma * gamma;
            if (proof.proof_wsize - expect).abs() > 1e-9 * expect {
                report(2, name, false, &format!("constructed positive size {} != 2 gamma^2 = {expect}", proof.proof_wsize));
            }
            // rebuild gamma(s_j0 + s_j1) from raw coordinates (dedup: the
            // neighbor copies of (j,1) are one vector) and check it hits the
            // target exactly
            let j = proof.entries[0].tag.vertex;
            let mut seen = std::collections::HashSet::new();
            let mut resid = expl.target.clone();
            for fam in &expl.families {
                for tv in &fam[1] {
                    if tv.tag.vertex == j && seen.insert(tv.tag) {
                        resid -= tv.coords.clone() * gamma;
                    }
                }
            }
            let rel = resid.norm_squared() / expl.target.norm_squared();
            if rel > 1e-12 {
                report(2, name, false, &format!("coordinate reconstruction residual {rel} (n={n} k={k})"));
            }
        } else {
            negatives += 1;
            // deg(S) <= alpha* <= k/2 here, so the bound applies
            let min = prog.min_negative_witness(&x).unwrap();
            if min.min_wsize > bound + 1e-6 {
                report(2, name, false, &format!("negative min {} over bound {bound} (n={n} k={k})", min.min_wsize));
            }
            let proof = prog.proof_negative_witness(&x).unwrap();
            let s_size = inst.marked_set().len() as f64;
            let deg_s = inst.marked_degree_sum() as f64;
            let expect = (n as f64 - s_size + deg_s) / (gamma * gamma);
            let from_entries: f64 = proof
                .entries
                .iter()
                .map(|e| e.multiplicity as f64 * e.value * e.value)
                .sum();
            if (from_entries - expect).abs() > 1e-9 * expect.max(1e-12) {
                report(2, name, false, &format!("constructed negative size {from_entries} != {expect}"));
            }
            // constraint side on raw coordinates: the witness is the basis
            // state of x scaled by 1/gamma; orthogonal to every available
            // slot, unit overlap with the target
            let z: usize = x
                .iter()
                .enumerate()
                .map(|(j0, &b)| usize::from(b) << j0)
                .sum();
            for (j0, &b) in x.iter().enumerate() {
                for tv in &expl.families[j0][usize::from(b)] {
                    let overlap = tv.coords[z] / gamma;
                    if overlap.abs() > 1e-12 {
                        report(2, name, false, &format!("available slot {:?} has overlap {overlap}", tv.tag));
                    }
                }
            }
            let target_overlap = expl.target[z] / gamma;
            if (target_overlap - 1.0).abs() > 1e-12 {
                report(2, name, false, &format!("target overlap {target_overlap} != 1"));
            }
        }
    }
    report(
        2,
        "witness sizes within sqrt(2(n+k))",
        positives >= 50 && negatives >= 50,
        &format!("{positives} positive + {negatives} negative instances verified"),
    );
}

#[test]
fn criterion_3_counting_success_mass_exact() {
    let floor = MIN_SUCCESS_PROBABILITY - 1e-12;
    let mut cells = 0u64;
    // the stated event, on the integer estimator
    let mut failures: Vec<(u64, u64, u64, f64)> = Vec::new();
    // same event on the raw estimate N sin^2(pi m / P), before rounding
    let mut raw_failures = 0u64;
    let mut worst = f64::INFINITY;
    for domain in 4u64..=256 {
        for precision in [4u64, 8, 16, 64] {
            for count in 0..=(domain / 2) {
                let spec = CountingSpec::new(domain, precision, count).unwrap();
                let mass = within_bound_mass(&spec);
                let b = bound_value(domain, precision, count, false);
                let raw_mass: f64 = outcome_distribution(&spec)
                    .iter()
                    .enumerate()
                    .filter(|(m, _)| {
                        let angle = std::f64::consts::PI * *m as f64 / precision as f64;
                        let est = domain as f64 * angle.sin().powi(2);
                        (est - count as f64).abs() < b
                    })
                    .map(|(_, p)| p)
                    .sum();
                worst = worst.min(mass);
                if mass < floor {
                    failures.push((domain, precision, count, mass));
                }
                if raw_mass < floor {
                    raw_failures += 1;
                }
                cells += 1;
            }
        }
    }
    let detail = if failures.is_empty() {
        format!("{cells} cells, worst mass {worst:.6} >= {floor:.6}")
    } else {
        let f = &failures[0];
        format!(
            "{} of {cells} cells fall below 8/pi^2 on the integer estimator (first \
             N={} P={} t={} mass {:.6}, bound {:.6}); the bound sits below 1 there, \
             so one of the two straddling outcomes rounds out of the window. The raw \
             estimate N sin^2(pi m/P) meets the floor on {} of {cells} cells: the \
             guarantee does not survive rounding the output to an integer",
            failures.len(),
            f.0,
            f.1,
            f.2,
            f.3,
            bound_value(f.0, f.1, f.2, false),
            cells - raw_failures
        )
    };
    report(
        3,
        "within-bound mass at least 8/pi^2",
        failures.is_empty() && raw_failures == 0,
        &detail,
    );
}

#[test]
fn criterion_4_boosted_counting_failure_rate() {
    let cells: [(u64, u64, u64); 10] = [
        (16, 8, 0),
        (16, 16, 5),
        (36, 54, 18),
        (64, 16, 8),
        (64, 64, 32),
        (100, 70, 50),
        (144, 84, 100),
        (256, 64, 128),
        (256, 112, 7),
        (10_000, 220, 3_000),
    ];
    let trials = 10_000u64;
    let sigma = ((1.0 / 6.0) * (5.0 / 6.0) / trials as f64).sqrt();
    let ceiling = 1.0 / 6.0 + 3.0 * sigma;
    let mut worst = (0.0f64, (0u64, 0u64, 0u64));
    for (cell_ix, &(domain, precision, count)) in cells.iter().enumerate() {
        let master = derive_seed(0xb0057ed, cell_ix as u64);
        let failures = (0..trials)
            .filter(|&i| {
                let t = count_boosted(domain, precision, count, 1.0 / 6.0, derive_seed(master, i))
                    .unwrap();
                assert_eq!(t.repetitions, 3);
                !t.within_bound
            })
            .count();
        let rate = failures as f64 / trials as f64;
        if rate > worst.0 {
            worst = (rate, (domain, precision, count));
        }
        if rate > ceiling {
            report(
                4,
                "boosted counting failure rate",
                false,
                &format!("N={domain} P={precision} t={count}: rate {rate} > {ceiling:.6}"),
            );
        }
    }
    report(
        4,
        "boosted counting failure rate",
        true,
        &format!(
            "10 cells x {trials} trials, worst rate {:.4} at N={} P={} t={} (ceiling {ceiling:.4})",
            worst.0, worst.1 .0, worst.1 .1, worst.1 .2
        ),
    );
}

#[test]
fn criterion_5_pipeline_error_budget() {
    let cfg = PipelineConfig::noisy();
    let trials = 10_000u64;
    let sigma_sixth = ((1.0 / 6.0) * (5.0 / 6.0) / trials as f64).sqrt();
    let sigma_third = ((1.0 / 3.0) * (2.0 / 3.0) / trials as f64).sqrt();

    let gen_a = CaseGenerator::PlantedCollision { n: 10, p: 0.4, extra_mark_prob: 0.1 };
    let (sum_a, _) = run_case_trials(&gen_a, &cfg, trials, 1001).unwrap();
    let cap_a = 1.0 / 6.0 + 3.0 * sigma_sixth;
    if sum_a.error_rate > cap_a {
        report(
            5,
            "pipeline error budget",
            false,
            &format!("case a error {} > {cap_a:.6}", sum_a.error_rate),
        );
    }

    let mut yes_rates = Vec::new();
    for (n, seed) in [(6usize, 1002u64), (12, 1003)] {
        let gen_b = CaseGenerator::CompleteAllMarked { n };
        let (sum_b, _) = run_case_trials(&gen_b, &cfg, trials, seed).unwrap();
        let floor_b = 5.0 / 6.0 - 3.0 * sigma_sixth;
        if sum_b.preprocessing_yes_rate < floor_b {
            report(
                5,
                "pipeline error budget",
                false,
                &format!(
                    "case b (n={n}) preprocessing-yes {} < {floor_b:.6}",
                    sum_b.preprocessing_yes_rate
                ),
            );
        }
        yes_rates.push(sum_b.preprocessing_yes_rate);
    }

    let gen_c = CaseGenerator::IndependentMarks { n: 10, p: 0.4, keep_prob: 0.6 };
    let (sum_c, _) = run_case_trials(&gen_c, &cfg, trials, 1004).unwrap();
    let cap_c = 1.0 / 3.0 + 3.0 * sigma_third;
    if sum_c.error_rate > cap_c {
        report(
            5,
            "pipeline error budget",
            false,
            &format!("case c error {} > {cap_c:.6}", sum_c.error_rate),
        );
    }

    report(
        5,
        "pipeline error budget",
        true,
        &format!(
            "a: error {:.4} <= {:.4}; b: yes rates {:.4}/{:.4} >= {:.4}; c: error {:.4} <= {:.4}",
            sum_a.error_rate,
            1.0 / 6.0 + 3.0 * sigma_sixth,
            yes_rates[0],
            yes_rates[1],
            5.0 / 6.0 - 3.0 * sigma_sixth,
            sum_c.error_rate,
            cap_c
        ),
    );
}

#[test]
fn criterion_6_threshold_chain_analytic() {
    // The preprocessing decision is sound when the estimate's error radius
    // keeps t-tilde on the correct side of 3s/2. Checked here in exact
    // arithmetic: the one-run radius on both sides, the repeated-run radius
    // on the no-collision side. The repeated-run radius on the collision
    // side fails just above t = 2s; that gap is computed and reported, with
    // its first grid witness pinned.
    let mut cells = 0u64;
    let mut single_violations: Vec<(u64, u64, u64)> = Vec::new();
    let mut doubled_c_violations: Vec<(u64, u64, u64)> = Vec::new();
    let mut doubled_b_gap: Vec<(u64, u64, u64)> = Vec::new();
    for e in 2..=12u32 {
        let n = 1u64 << e; // 4..=4096
        let domain = n * n;
        let precision = precision_for(n as usize);
        for s_mult in [1u64, 2, 4, 8] {
            let s = s_mult * n;
            // case c: t <= s; decision must stay "no"
            for t in [0, s.div_ceil(4), s.div_ceil(2), (3 * s).div_ceil(4), s] {
                if t > domain {
                    continue;
                }
                cells += 1;
                let limit = 1.5 * s as f64;
                let single = t as f64 + bound_value(domain, precision, t, false);
                let doubled = t as f64 + bound_value(domain, precision, t, true);
                if single >= limit {
                    single_violations.push((n, s, t));
                }
                if doubled >= limit {
                    doubled_c_violations.push((n, s, t));
                }
            }
            // case b: t > 2s; decision must stay "yes"
            for t in [2 * s + 1, (9 * s).div_ceil(4), (5 * s).div_ceil(2), 3 * s, 4 * s] {
                if t > domain {
                    continue;
                }
                cells += 1;
                let limit = 1.5 * s as f64;
                let single = t as f64 - bound_value(domain, precision, t, false);
                let doubled = t as f64 - bound_value(domain, precision, t, true);
                if single <= limit {
                    single_violations.push((n, s, t));
                }
                if doubled <= limit {
                    doubled_b_gap.push((n, s, t));
                }
            }
        }
    }
    let pass = single_violations.is_empty() && doubled_c_violations.is_empty();
    // The repeated-run gap on the collision side is real: t - bound bottoms
    // out at (68/49)s < 3s/2 for P = ceil(7 pi sqrt(n)), first hit here at
    // n=16, s=16, t=33. A pass requires having found it, not hidden it.
    let gap_witnessed = doubled_b_gap.first() == Some(&(16, 16, 33));
    report(
        6,
        "threshold chain in exact arithmetic",
        pass && gap_witnessed,
        &format!(
            "{cells} cells; one-run radius: {} violations; repeated-run no-collision side: {} \
             violations; repeated-run collision side exceptions (known analytic gap, \
             first {:?}): {} cells e.g. {:?}",
            single_violations.len(),
            doubled_c_violations.len(),
            doubled_b_gap.first(),
            doubled_b_gap.len(),
            &doubled_b_gap[..doubled_b_gap.len().min(4)]
        ),
    );
}

#[test]
fn criterion_7_query_charge_scaling() {
    // Cross-check the closed form against a real run first.
    let g = Graph::edgeless(2);
    let inst = GraphCollisionInstance::new(&g, vec![false, false]).unwrap();
    let run = run_pipeline(&inst, &PipelineConfig::default(), 7).unwrap();
    assert_eq!(run.decided_at, DecisionPoint::Main);
    assert!(
        (run.total_charge - worst_case_charge(2, run.alpha_star)).abs() <= 1e-12,
        "real run charge {} != closed form {}",
        run.total_charge,
        worst_case_charge(2, run.alpha_star)
    );

    let mut n_grid: Vec<usize> = (2..=100).collect();
    n_grid.extend([128, 192, 256, 384, 512, 768, 1024, 1536, 2048, 3072, 4096, 6144, 8192, 10_000]);
    let mut checked = 0u64;
    let mut violations: Vec<(usize, u64, f64, f64)> = Vec::new();
    for &n in &n_grid {
        let nf = n as f64;
        let max_alpha = (n as u64) * (n as u64 - 1);
        let alphas = [
            0u64,
            1,
            n as u64 / 2,
            n as u64,
            2 * n as u64,
            (nf.powf(1.5)) as u64,
            max_alpha / 2,
            max_alpha,
        ];
        for &a in &alphas {
            if a > max_alpha {
                continue;
            }
            checked += 1;
            let charge = worst_case_charge(n, a);
            let budget = 70.0 * (nf.sqrt() + (a as f64).sqrt());
            if charge > budget {
                violations.push((n, a, charge, budget));
            }
        }
    }
    let detail = if violations.is_empty() {
        format!("{checked} (n, alpha*) cells within 70(sqrt n + sqrt alpha*)")
    } else {
        let v = &violations[0];
        format!(
            "{} of {checked} cells exceed the budget; first: n={} alpha*={} has \
             worst-case charge 3P + sqrt(2(n+2s)) = {} > 70(sqrt n + sqrt alpha*) = {} \
             (P={}, s={})",
            violations.len(),
            v.0,
            v.1,
            v.2,
            v.3,
            precision_for(v.0),
            (v.1).max(v.0 as u64)
        )
    };
    report(7, "query charge within 70(sqrt n + sqrt alpha*)", violations.is_empty(), &detail);
}

#[test]
fn criterion_8_random_graph_study() {
    // Analytic inequality between the two Chernoff forms on a log-spaced
    // lambda grid reaching into both regimes.
    let mut lambdas: Vec<f64> = vec![1.0001, 1.001, 1.01, 1.05];
    lambdas.extend((1..=60).map(|k| 10f64.powf(4.0 * k as f64 / 60.0)));
    for &l in &lambdas {
        for (n, mu) in [(10usize, 0.5), (100, 0.1), (400, 0.9)] {
            let (tight, weak) = chernoff_bound(ChernoffParams::new(n, mu, l).unwrap());
            if tight > weak * (1.0 + 1e-12) {
                report(
                    8,
                    "random graph study",
                    false,
                    &format!("tight {tight} > weak {weak} at lambda={l} n={n} mu={mu}"),
                );
            }
        }
    }

    // Empirical binomial tails against the tight form, 1e5 trials per cell.
    let cells = [
        (100usize, 0.5, 1.5),
        (50, 0.2, 2.0),
        (200, 0.1, 3.0),
        (80, 0.9, 1.05),
    ];
    for (cell_ix, &(n, mu, lambda)) in cells.iter().enumerate() {
        let par = ChernoffParams::new(n, mu, lambda).unwrap();
        let check = chernoff_empirical_check(par, 100_000, derive_seed(88, cell_ix as u64)).unwrap();
        if !check.pass {
            report(
                8,
                "random graph study",
                false,
                &format!(
                    "empirical tail {} > tight {} + 5 sigma at n={n} mu={mu} lambda={lambda}",
                    check.empirical, check.tight
                ),
            );
        }
    }

    // The tail study itself: 20 dense samples at n=256, every alpha* exact.
    let n = 256usize;
    let t = tail_threshold_floor(n);
    let study = alpha_star_tail_study(n, 0.5, t, 20, 2024, DEFAULT_NODE_BUDGET).unwrap();
    let bound = alpha_star_tail_bound(n, 0.5, t, false).unwrap();
    if !study.completed() || study.records.len() != 20 {
        report(
            8,
            "random graph study",
            false,
            &format!("study incomplete: {} of 20 records", study.records.len()),
        );
    }
    if study.exceed_fraction() != 0.0 {
        report(
            8,
            "random graph study",
            false,
            &format!("exceed fraction {} != 0", study.exceed_fraction()),
        );
    }
    let norm = (n as f64) * (n as f64).ln();
    let mut ratios: Vec<f64> =
        study.records.iter().map(|r| r.alpha_star_value as f64 / norm).collect();
    ratios.sort_by(f64::total_cmp);
    report(
        8,
        "random graph study",
        true,
        &format!(
            "20/20 samples solved, none reached t={t:.1} (analytic bound 1e{:.1}); \
             alpha*/(n ln n) in [{:.4}, {:.4}] median {:.4}; Chernoff grid clean",
            bound.log10,
            ratios[0],
            ratios[19],
            (ratios[9] + ratios[10]) / 2.0
        ),
    );
}
