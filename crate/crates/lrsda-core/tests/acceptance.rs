//! Acceptance suite: every criterion the artifact must meet, one test per
//! criterion, each printing a PASS line with its runtime (run with
//! `--nocapture` to see them). Claimed values come from the closed-form
//! catalog; verified values come from the brute-force co-array enumerator.

use std::collections::BTreeMap;
use std::time::{Duration, Instant};

use lrsda_core::coarray::{
    asymptotic_u_bound, redundancy_lower_bound, redundancy_soeca, so_eca, soca, Redundancy, SocCase,
};
use lrsda_core::doa::lag_average;
use lrsda_core::experiment::{
    allocation_crosscheck, best_lr_sda, dof_table, rmse_sweep, DoaPipeline, SweepAxis, Verdict,
};
use lrsda_core::geometry::{build_lr_sda, select_delta, LrSdaParams};
use lrsda_core::reconstruction::lcm_arith_sequence;
use lrsda_core::signal::{
    analytic_soc, combine_cumulants, derive_seed, estimate_soc, simulate, Scenario,
};
use lrsda_core::SensorArray;

use num_complex::Complex64;
use num_rational::Rational64;

fn pass(id: u32, detail: &str, elapsed: Duration) {
    println!("acceptance {id:02} PASS: {detail} [{elapsed:?}]");
}

/// Independent quadruple-loop enumerator (case, l1, l2), the authoritative
/// oracle the optimized path must reproduce.
fn naive_so_eca(positions: &[i64]) -> BTreeMap<i64, u64> {
    let mut entries = BTreeMap::new();
    for case in 1..=4usize {
        for &p1 in positions {
            for &p2 in positions {
                let lag = match case {
                    1 => p1 + p2,
                    2 => p1 - p2,
                    3 => -p1 + p2,
                    _ => -p1 - p2,
                };
                *entries.entry(lag).or_insert(0u64) += 1;
            }
        }
    }
    entries
}

#[test]
fn acceptance_01_hole_pattern_of_sparse_four_sensor_array() {
    let s = SensorArray::new(vec![0, 1, 5, 8], "sparse4").unwrap();
    so_eca(&s); // warm-up outside the timed region
    let start = Instant::now();
    let (_, summary) = so_eca(&s);
    let elapsed = start.elapsed();

    let non_negative: Vec<i64> = summary
        .unique_lags
        .iter()
        .copied()
        .filter(|&l| l >= 0)
        .collect();
    let mut expected: Vec<i64> = (0..=10).collect();
    expected.extend([13, 16]);
    assert_eq!(non_negative, expected);
    assert_eq!(summary.holes, vec![11, 12, 14, 15]);
    assert!(elapsed < Duration::from_millis(1), "took {elapsed:?}");
    pass(
        1,
        "non-negative lags {0..10, 13, 16} with holes {11, 12, 14, 15}",
        elapsed,
    );
}

#[test]
fn acceptance_02_closed_form_dof_catalog() {
    let start = Instant::now();
    let report = dof_table().unwrap();

    let formula = |structure: &str, sensors: u32| {
        report
            .rows
            .iter()
            .find(|r| r.structure == structure && r.sensors == sensors)
            .unwrap_or_else(|| panic!("missing row {structure}/{sensors}"))
            .formula_dof
    };
    assert_eq!(
        [
            formula("NADiS", 9),
            formula("NADiS", 19),
            formula("NADiS", 28)
        ],
        [89, 379, 811]
    );
    assert_eq!(
        [
            formula("TNA-I", 9),
            formula("TNA-I", 19),
            formula("TNA-I", 28)
        ],
        [97, 397, 837]
    );
    assert_eq!(
        [
            formula("TS-ENA", 9),
            formula("TS-ENA", 19),
            formula("TS-ENA", 28)
        ],
        [71, 247, 489]
    );
    assert_eq!([formula("TNA-II", 19), formula("TNA-II", 28)], [415, 865]);
    let lr_sda_9 = report
        .rows
        .iter()
        .find(|r| r.structure == "LR-SDA" && r.sensors == 9)
        .unwrap();
    assert_eq!(lr_sda_9.formula_dof, 109);
    assert_eq!(lr_sda_9.claimed_dof, 109);

    // the closed-form mismatches must be exactly the known three
    let mut mismatches: Vec<(String, i64, i64)> = report
        .records
        .iter()
        .filter(|r| r.source == "dof-table" && r.verdict == Verdict::Mismatch)
        .map(|r| (r.array.clone(), r.claimed, r.computed))
        .collect();
    mismatches.sort();
    assert_eq!(
        mismatches,
        vec![
            ("LR-SDA (10,9)".into(), 425, 421),
            ("LR-SDA (14,14)".into(), 879, 869),
            ("TNA-II (5,4)".into(), 101, 105),
        ]
    );

    let elapsed = start.elapsed();
    assert!(elapsed < Duration::from_secs(1), "took {elapsed:?}");
    pass(
        2,
        "catalog closed forms match; known mismatches recorded exactly",
        elapsed,
    );
}

#[test]
fn acceptance_03_enumeration_adjudicates_hole_free_claim() {
    let start = Instant::now();

    // shift 2 (the closed-form rule) leaves a hole at lag 25
    let shifted2 = build_lr_sda(&LrSdaParams {
        n1: 5,
        n2: 4,
        eta: 1,
        delta: 2,
    })
    .unwrap();
    let (multiset2, summary2) = so_eca(&shifted2);
    assert!(summary2.holes.contains(&25), "holes {:?}", summary2.holes);
    assert_eq!(summary2.u, 24);
    assert_eq!(
        multiset2.entries().clone(),
        naive_so_eca(shifted2.positions())
    );

    // shift 1 runs hole-free through ±52, enumerated DOF 105
    let shifted1 = build_lr_sda(&LrSdaParams {
        n1: 5,
        n2: 4,
        eta: 1,
        delta: 1,
    })
    .unwrap();
    let (multiset1, summary1) = so_eca(&shifted1);
    assert_eq!(summary1.u, 52);
    assert_eq!(summary1.dof, 105);
    assert!(
        summary1.holes.iter().all(|&h| h > 52),
        "holes {:?}",
        summary1.holes
    );
    assert_eq!(
        multiset1.entries().clone(),
        naive_so_eca(shifted1.positions())
    );

    // and the search agrees
    assert_eq!(select_delta(5, 4, 1).unwrap(), (1, 52));

    // the claim-versus-enumeration record is in the discrepancy report
    let report = dof_table().unwrap();
    let record = report
        .records
        .iter()
        .find(|r| r.source == "hole-free-claim" && r.array == "LR-SDA (5,4)")
        .expect("claim record missing");
    assert_eq!((record.claimed, record.computed), (109, 105));
    assert_eq!(record.verdict, Verdict::Mismatch);

    let elapsed = start.elapsed();
    assert!(elapsed < Duration::from_secs(1), "took {elapsed:?}");
    pass(
        3,
        "shift 2 has a hole at 25; shift 1 is hole-free to ±52 (DOF 105 vs claimed 109)",
        elapsed,
    );
}

#[test]
fn acceptance_04_redundancy_anchors_and_bounds() {
    let start = Instant::now();

    for (n, expected) in [(2u32, Rational64::new(1, 1)), (3, Rational64::new(9, 8))] {
        let (params, _) = best_lr_sda(n).unwrap();
        let array = build_lr_sda(&params).unwrap();
        match redundancy_soeca(&array) {
            Redundancy::Finite(r) => assert_eq!(r, expected, "n = {n}"),
            Redundancy::Infinite => panic!("n = {n} gave infinite redundancy"),
        }
    }

    assert!((redundancy_lower_bound(1) - 1.2122).abs() < 1e-3);

    // the segment bound approaches 0.8249 N² (0.4125 N² per side)
    let per_side = (asymptotic_u_bound(1000) - 1.0) / 2.0;
    let rel = (per_side - 0.4125e6).abs() / 0.4125e6;
    assert!(rel < 1e-3, "per-side bound off by {rel}");

    let elapsed = start.elapsed();
    assert!(elapsed < Duration::from_secs(1), "took {elapsed:?}");
    pass(
        4,
        "R=1 at N=2, R=1.125 at N=3; lower bound and asymptote check out",
        elapsed,
    );
}

// positions <= 30 keep every lag inside [-60, 60]
const LAG_OFFSET: i64 = 60;
const LAG_SLOTS: usize = 121;

/// Per-case quadruple-loop oracle over the dense lag range.
#[derive(Clone)]
struct CaseOracle {
    counts: [[u64; LAG_SLOTS]; 4],
}

impl CaseOracle {
    fn new() -> Self {
        Self {
            counts: [[0; LAG_SLOTS]; 4],
        }
    }

    fn fill(&mut self, positions: &[i64]) {
        for case in self.counts.iter_mut() {
            case.fill(0);
        }
        for &p1 in positions {
            for &p2 in positions {
                self.counts[0][(p1 + p2 + LAG_OFFSET) as usize] += 1;
                self.counts[1][(p1 - p2 + LAG_OFFSET) as usize] += 1;
                self.counts[2][(-p1 + p2 + LAG_OFFSET) as usize] += 1;
                self.counts[3][(-p1 - p2 + LAG_OFFSET) as usize] += 1;
            }
        }
    }

    fn combined(&self, slot: usize) -> u64 {
        self.counts.iter().map(|case| case[slot]).sum()
    }
}

fn matches_oracle(multiset: &lrsda_core::LagMultiset, counts: &[u64; LAG_SLOTS]) -> bool {
    let mut seen = 0;
    for (&lag, &m) in multiset.entries() {
        if counts[(lag + LAG_OFFSET) as usize] != m {
            return false;
        }
        seen += 1;
    }
    seen == counts.iter().filter(|&&m| m > 0).count()
}

fn check_coarray_properties(positions: &[i64], oracle: &mut CaseOracle) {
    let s = SensorArray::new(positions.to_vec(), "sweep").unwrap();
    let n = positions.len() as u64;
    oracle.fill(positions);

    // optimized enumeration equals the quadruple loop, case by case and
    // combined
    let (multiset, _) = so_eca(&s);
    let mut seen = 0;
    for (&lag, &m) in multiset.entries() {
        assert_eq!(
            oracle.combined((lag + LAG_OFFSET) as usize),
            m,
            "{positions:?} lag {lag}"
        );
        seen += 1;
    }
    let nonzero = (0..LAG_SLOTS).filter(|&i| oracle.combined(i) > 0).count();
    assert_eq!(seen, nonzero, "{positions:?}");
    for case in SocCase::ALL {
        assert!(
            matches_oracle(&soca(&s, case), &oracle.counts[case.index() - 1]),
            "{positions:?} case {}",
            case.index()
        );
    }

    // multiplicity conservation and mirror symmetry
    assert_eq!(multiset.total(), 4 * n * n);
    for (&lag, &m) in multiset.entries() {
        assert_eq!(multiset.multiplicity(-lag), m, "{positions:?} lag {lag}");
    }

    // case mirror relations: 3 mirrors 2, 4 mirrors 1
    for slot in 0..LAG_SLOTS {
        let mirror = LAG_SLOTS - 1 - slot;
        assert_eq!(
            oracle.counts[2][slot], oracle.counts[1][mirror],
            "{positions:?}"
        );
        assert_eq!(
            oracle.counts[3][slot], oracle.counts[0][mirror],
            "{positions:?}"
        );
    }

    // difference co-array is shift-invariant
    let moved_positions: Vec<i64> = positions.iter().map(|p| p + 1).collect();
    let moved = SensorArray::new(moved_positions, "sweep").unwrap();
    let moved_diff = soca(&moved, SocCase::Diff);
    assert!(
        matches_oracle(&moved_diff, &oracle.counts[1]),
        "{positions:?} shifted"
    );
}

/// Every strictly increasing position set starting with `positions` extended
/// by elements of `next..=max_pos`, up to `max_size` sensors.
fn sweep_extensions(
    positions: &mut Vec<i64>,
    next: i64,
    max_pos: i64,
    max_size: usize,
    oracle: &mut CaseOracle,
    count: &mut u64,
) {
    check_coarray_properties(positions, oracle);
    *count += 1;
    if positions.len() < max_size {
        for p in next..=max_pos {
            positions.push(p);
            sweep_extensions(positions, p + 1, max_pos, max_size, oracle, count);
            positions.pop();
        }
    }
}

#[test]
fn acceptance_05_coarray_property_suite_exhaustive() {
    use rayon::prelude::*;

    let start = Instant::now();
    let max_pos = 30i64;
    let max_size = 6usize;

    // enumerate every non-empty position set over {0..30} with at most six
    // sensors, split across workers by the leading position
    let arrays_checked: u64 = (0..=max_pos)
        .into_par_iter()
        .map(|first| {
            let mut oracle = CaseOracle::new();
            let mut positions = vec![first];
            let mut count = 0u64;
            sweep_extensions(
                &mut positions,
                first + 1,
                max_pos,
                max_size,
                &mut oracle,
                &mut count,
            );
            count
        })
        .sum();

    let elapsed = start.elapsed();
    assert_eq!(arrays_checked, 942_648);
    assert!(elapsed < Duration::from_secs(30), "took {elapsed:?}");
    pass(
        5,
        "all 942648 arrays (N<=6, positions<=30) satisfy the co-array properties",
        elapsed,
    );
}

#[test]
fn acceptance_06_cumulant_identities() {
    let start = Instant::now();

    // seeded random data: the conjugation identities hold to 1e-12
    let s = SensorArray::new(vec![0, 1, 4, 9, 11], "random-data").unwrap();
    let scenario = Scenario::new(vec![-41.0, -3.5, 22.0], 5.0, 4096, 20_240_817).unwrap();
    let soc = estimate_soc(&simulate(&s, &scenario).unwrap());
    let r2t = soc.r2.transpose();
    let r1c = soc.r1.conjugate();
    for i in 0..s.len() {
        for j in 0..s.len() {
            assert!((soc.r3[(i, j)] - r2t[(i, j)]).norm() < 1e-12);
            assert!((soc.r4[(i, j)] - r1c[(i, j)]).norm() < 1e-12);
        }
    }

    // noiseless exact injection: averaged lags carry e^{jπ z sinθ}
    let params = LrSdaParams {
        n1: 5,
        n2: 4,
        eta: 1,
        delta: 1,
    };
    let array = build_lr_sda(&params).unwrap();
    let theta = 33.0f64;
    let c = combine_cumulants(&analytic_soc(&array, &[theta], 1.0, 0.0));
    let z = lag_average(&c, &array);
    let u = theta.to_radians().sin();
    for lag in -z.u..=z.u {
        let expected = Complex64::from_polar(1.0, std::f64::consts::PI * lag as f64 * u);
        let got = z.values[(lag + z.u) as usize];
        assert!((got - expected).norm() < 1e-10, "lag {lag}");
    }

    let elapsed = start.elapsed();
    assert!(elapsed < Duration::from_secs(5), "took {elapsed:?}");
    pass(
        6,
        "conjugation identities within 1e-12; injected lag phases within 1e-10",
        elapsed,
    );
}

#[test]
fn acceptance_07_sequence_lcm_equals_brute_force() {
    let start = Instant::now();
    for beta1 in 1..=12u64 {
        for beta2 in 1..=12u64 {
            for n in 1..=6u64 {
                let terms: Vec<u64> = (0..n).map(|i| beta1 + i * beta2).collect();
                let largest = *terms.last().unwrap();
                // smallest common multiple by trial over multiples of the
                // largest term
                let mut candidate = largest;
                while !terms.iter().all(|&t| candidate.is_multiple_of(t)) {
                    candidate += largest;
                }
                assert_eq!(
                    lcm_arith_sequence(beta1, beta2, n).unwrap(),
                    candidate.into(),
                    "beta1={beta1} beta2={beta2} n={n}"
                );
            }
        }
    }
    let elapsed = start.elapsed();
    assert!(elapsed < Duration::from_secs(5), "took {elapsed:?}");
    pass(
        7,
        "iterated LCM equals trial-multiples brute force for all 864 sequences",
        elapsed,
    );
}

#[test]
fn acceptance_08_underdetermined_doa_at_simulation_scale() {
    let start = Instant::now();
    let (params, extent) = best_lr_sda(11).unwrap();
    let array = build_lr_sda(&params).unwrap();
    assert!(extent >= 20, "need at least 20 usable lags, got {extent}");

    let truth: Vec<f64> = (0..20).map(|i| -60.0 + 120.0 * i as f64 / 19.0).collect();
    let pipeline = DoaPipeline::new(array, truth.clone(), 0.0, 10_000);
    let trials = 50;
    let estimates = pipeline.run_trials(trials, 0xC0FFEE).unwrap();

    let mut resolved = 0;
    for angles in estimates.iter().flatten() {
        if angles.len() == truth.len()
            && angles.iter().zip(&truth).all(|(e, t)| (e - t).abs() <= 1.0)
        {
            resolved += 1;
        }
    }
    let elapsed = start.elapsed();
    assert!(
        resolved * 100 >= trials * 95,
        "only {resolved}/{trials} trials resolved all 20 sources"
    );
    pass(
        8,
        &format!("{resolved}/{trials} trials resolved 20 sources with 11 sensors within 1.0 deg"),
        elapsed,
    );
}

#[test]
fn acceptance_09_rmse_trends() {
    let start = Instant::now();
    let (params, _) = best_lr_sda(11).unwrap();
    let array = build_lr_sda(&params).unwrap();
    let angles: Vec<f64> = (0..12).map(|i| -60.0 + 120.0 * i as f64 / 11.0).collect();
    let trials = 50;

    // SNR sweep endpoints at fixed snapshots
    let base = DoaPipeline::new(array.clone(), angles.clone(), 0.0, 12_000);
    let points = rmse_sweep(&base, &SweepAxis::SnrDb(vec![-10.0, 10.0]), trials, 0xA11CE).unwrap();
    let low_snr = points[0]
        .outcome
        .rmse_deg
        .expect("no trial resolved at -10 dB");
    let high_snr = points[1]
        .outcome
        .rmse_deg
        .expect("no trial resolved at +10 dB");
    assert!(
        high_snr < low_snr,
        "RMSE did not fall with SNR: {high_snr} vs {low_snr}"
    );

    // snapshot sweep endpoints at fixed SNR 2 dB
    let base = DoaPipeline::new(array, angles, 2.0, 12_000);
    let points = rmse_sweep(
        &base,
        &SweepAxis::Snapshots(vec![8_000, 18_000]),
        trials,
        0xB0B,
    )
    .unwrap();
    let few = points[0]
        .outcome
        .rmse_deg
        .expect("no trial resolved at 8000 snapshots");
    let many = points[1]
        .outcome
        .rmse_deg
        .expect("no trial resolved at 18000 snapshots");
    assert!(
        many <= few,
        "RMSE did not fall with snapshots: {many} vs {few}"
    );

    let elapsed = start.elapsed();
    pass(
        9,
        &format!(
            "RMSE {low_snr:.4} -> {high_snr:.4} deg over SNR; {few:.4} -> {many:.4} deg over snapshots"
        ),
        elapsed,
    );
}

#[test]
fn acceptance_10_allocation_rule_crosscheck() {
    let start = Instant::now();
    let mut logged = Vec::new();
    for n in 4..=12u32 {
        let check = allocation_crosscheck(n).unwrap();
        if check.best_candidate.1 == check.exhaustive_best.1 {
            assert!(check.records.is_empty(), "spurious record at n={n}");
        } else {
            assert!(
                !check.records.is_empty(),
                "n={n}: candidates reach {} but optimum is {} with no record",
                check.best_candidate.1,
                check.exhaustive_best.1
            );
            logged.push((n, check.best_candidate.1, check.exhaustive_best.1));
        }
    }
    let elapsed = start.elapsed();
    assert!(elapsed < Duration::from_secs(30), "took {elapsed:?}");
    pass(
        10,
        &format!("candidates optimal or discrepancy logged; logged for {logged:?}"),
        elapsed,
    );
}

/// Not a criterion of its own: keeps the trial seed derivation honest so the
/// sweeps above stay reproducible across worker counts.
#[test]
fn sweep_trials_reproduce_individually() {
    let (params, _) = best_lr_sda(9).unwrap();
    let array = build_lr_sda(&params).unwrap();
    let pipeline = DoaPipeline::new(array, vec![-25.0, 5.0, 40.0], 10.0, 500);
    let batch = pipeline.run_trials(3, 7).unwrap();
    for (t, expected) in batch.iter().enumerate() {
        let lone = pipeline.run_trial(derive_seed(7, t as u64)).unwrap();
        assert_eq!(&lone, expected);
    }
}
