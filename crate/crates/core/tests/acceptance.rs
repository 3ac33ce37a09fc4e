//! Acceptance criteria, one line per criterion. Exits nonzero when any fails.

use std::process::ExitCode;
use std::time::{Duration, Instant};

use betaspace::beta::{check_separation, sample_rng, FiniteBetaSpace};
use betaspace::laurent::{
    cauchy_limit, metric, sequence, ExponentModulus, LimitCheck, SeriesVector,
};
use betaspace::level::{
    certify_contraction, cmt_solve, orbit_r_cauchy, product_space, solve_finite,
    unit_interval_carrier, AffineMap, LevelError, RLimitCheck, SolveOptions,
};
use betaspace::props::{random_affine, run_suite, Suite, SuiteConfig, SuiteReport};
use betaspace::rational::{int, rat};
use betaspace::uniformity::{random_symmetric_structure, roundtrip_check, symmetric_structures};
use betaspace::{sample, LaurentSeries, PrecisionBudget};

const SEED: u64 = 20_240_611;

struct Outcome {
    passed: bool,
    detail: String,
}

fn pass(detail: impl Into<String>) -> Outcome {
    Outcome {
        passed: true,
        detail: detail.into(),
    }
}

fn fail(detail: impl Into<String>) -> Outcome {
    Outcome {
        passed: false,
        detail: detail.into(),
    }
}

fn config(samples: usize) -> SuiteConfig {
    SuiteConfig {
        seed: SEED,
        samples,
        budget: PrecisionBudget::default(),
    }
}

fn suite_outcome(report: &SuiteReport, checks: &[&str]) -> Outcome {
    let tallies: Vec<String> = checks
        .iter()
        .map(|c| {
            let t = report.check(c);
            format!("{c} {}/{}/{}", t.passed, t.failed, t.skipped)
        })
        .collect();
    let summary = format!(
        "{} samples, {} failed; pass/fail/skip: {}",
        report.samples,
        report.failed,
        tallies.join(", ")
    );
    let exercised = checks.iter().all(|c| report.check(c).passed > 0);
    match (&report.first_counterexample, exercised) {
        (None, true) => pass(summary),
        (None, false) => fail(format!("{summary}; a check never ran")),
        (Some(c), _) => fail(format!("{summary}; {}: {}", c.check, c.detail)),
    }
}

fn timed(limit: Option<Duration>, run: impl FnOnce() -> Outcome) -> Outcome {
    let start = Instant::now();
    let mut outcome = run();
    let elapsed = start.elapsed();
    outcome.detail += &format!(" [{:.2}s]", elapsed.as_secs_f64());
    if let Some(limit) = limit {
        if elapsed > limit {
            outcome.passed = false;
            outcome.detail += &format!(" exceeds {}s", limit.as_secs());
        }
    }
    outcome
}

fn field_laws() -> Outcome {
    let report = run_suite(Suite::FieldLaws, &config(1000));
    suite_outcome(
        &report,
        &[
            "add-associative",
            "add-commutative",
            "mul-associative",
            "mul-commutative",
            "distributive",
            "additive-inverse",
            "multiplicative-inverse",
            "subtraction",
        ],
    )
}

fn beta_axioms() -> Outcome {
    let report = run_suite(Suite::BetaAxioms, &config(500));
    suite_outcome(&report, &["axiom-1", "axiom-4"])
}

fn geometric_series() -> Outcome {
    let report = run_suite(Suite::GeometricSeries, &config(200));
    suite_outcome(&report, &["laurent", "rational", "finite"])
}

fn completeness() -> Outcome {
    let budget = PrecisionBudget::default();
    let seq = sequence(|n| LaurentSeries::from_terms((0..=n as i64).map(|i| (i, int(1)))));
    let moduli = ExponentModulus::total(|k| k.max(0) as usize);
    let g = match cauchy_limit(
        &seq,
        &moduli,
        &LimitCheck::through_horizon(0, &budget, 4),
        &budget,
    ) {
        Ok(g) => g,
        Err(e) => return fail(e.to_string()),
    };
    if !g.agrees_to(&LaurentSeries::geometric(), budget.horizon) {
        return fail("limit differs from the geometric series");
    }
    let mut pairs = 0;
    for k in 0..=32i64 {
        let radius = LaurentSeries::monomial(int(1), k);
        let from = moduli.at(k + 1).expect("total modulus");
        for n in from..from + 8 {
            match metric(&g, &seq(n), &budget).and_then(|d| d.less_than(&radius, &budget)) {
                Ok(true) => pairs += 1,
                Ok(false) => return fail(format!("|g - f_{n}| is not below x^{k}")),
                Err(e) => return fail(e.to_string()),
            }
        }
    }
    pass(format!(
        "limit agrees to x^{}; {pairs} (k, n) pairs within x^k",
        budget.horizon
    ))
}

fn uniformity_roundtrip() -> Outcome {
    let mut spaces: Vec<FiniteBetaSpace> = (1..=3).flat_map(symmetric_structures).collect();
    let enumerated = spaces.len();
    let mut rng = sample_rng(SEED);
    spaces.extend((0..100).map(|_| random_symmetric_structure(&mut rng, 4)));
    for (i, space) in spaces.iter().enumerate() {
        match roundtrip_check(space) {
            Ok(rt) if rt.passed() => {}
            Ok(rt) => {
                return fail(format!(
                    "structure {i}: {}",
                    rt.mismatch.unwrap_or_default()
                ))
            }
            Err(e) => return fail(format!("structure {i}: {e}")),
        }
    }
    pass(format!(
        "{enumerated} enumerated structures on ≤ 3 points and 100 random on 4 points"
    ))
}

fn regularity() -> Outcome {
    let mut fixtures: Vec<(String, FiniteBetaSpace)> = vec![
        (
            "two-point".into(),
            FiniteBetaSpace::two_point(&[rat(1, 2), int(2)]),
        ),
        ("indiscrete-2".into(), FiniteBetaSpace::indiscrete(2)),
        ("discrete-3".into(), FiniteBetaSpace::discrete(3)),
    ];
    for n in 1..=3 {
        for (i, s) in symmetric_structures(n).into_iter().enumerate() {
            fixtures.push((format!("symmetric-{n}-{i}"), s));
        }
    }
    let mut rng = sample_rng(SEED ^ 6);
    fixtures.extend((0..30).map(|i| {
        (
            format!("random-4-{i}"),
            random_symmetric_structure(&mut rng, 4),
        )
    }));
    let mut checked = 0;
    for (name, space) in &fixtures {
        let sep = match check_separation(space) {
            Ok(sep) => sep,
            Err(e) => return fail(format!("{name}: {e}")),
        };
        if sep.axioms_hold {
            checked += 1;
            if !sep.regular {
                return fail(format!("{name} passes the axioms but is not regular"));
            }
        }
        if name == "indiscrete-2" && (sep.hausdorff || !sep.regular) {
            return fail(format!(
                "indiscrete-2 reports hausdorff = {}, regular = {}",
                sep.hausdorff, sep.regular
            ));
        }
    }
    pass(format!(
        "{checked} axiom-passing fixtures regular; indiscrete-2 is regular and not hausdorff"
    ))
}

struct OracleCase {
    map: AffineMap,
    starts: Vec<SeriesVector>,
}

fn oracle_cases() -> Vec<OracleCase> {
    let mut rng = sample_rng(SEED ^ 7);
    (0..60)
        .map(|i| {
            let map = random_affine(&mut rng, i >= 50);
            let mut starts: Vec<SeriesVector> = Vec::new();
            while starts.len() < 16 {
                let x0 = SeriesVector::scalar(sample::series(&mut rng, -3, 6));
                if !starts.iter().any(|s| s.agrees_to(&x0, 8)) {
                    starts.push(x0);
                }
            }
            OracleCase { map, starts }
        })
        .collect()
}

fn cmt_oracle(cases: &[OracleCase]) -> Outcome {
    let budget = PrecisionBudget::default();
    let space = product_space(1, budget).expect("product metric");
    let mut stages = 0;
    for (i, case) in cases.iter().enumerate() {
        let label = format!("case {i} ({})", describe(&case.map));
        let closed = match case.map.closed_form(&budget) {
            Ok(c) => c,
            Err(e) => return fail(format!("{label}: {e}")),
        };
        let result = certify_contraction(case.map.clone(), &budget)
            .and_then(|cert| cmt_solve(&space, &cert, &case.starts[0], &SolveOptions::default()));
        let result = match result {
            Ok(r) => r,
            Err(e) => return fail(format!("{label}: {e}")),
        };
        if !result.fixed_point.agrees_to(&closed, budget.horizon) {
            return fail(format!("{label}: got {}", result.render_point()));
        }
        if result.closed_form_agrees != Some(true) {
            return fail(format!("{label}: solver did not confirm the closed form"));
        }
        if !result.residual_valuation.exceeds(budget.horizon) {
            return fail(format!(
                "{label}: residual valuation {}",
                result.residual_valuation
            ));
        }
        stages += result.stage_count();
    }
    pass(format!(
        "50 rational and 10 infinitesimal multipliers match b/(1-a); {stages} stages total"
    ))
}

fn describe(map: &AffineMap) -> String {
    use betaspace::level::SeriesMap;
    map.describe()
}

fn cmt_uniqueness(cases: &[OracleCase]) -> Outcome {
    let budget = PrecisionBudget::default();
    let space = product_space(1, budget).expect("product metric");
    for (i, case) in cases.iter().enumerate() {
        let cert = match certify_contraction(case.map.clone(), &budget) {
            Ok(c) => c,
            Err(e) => return fail(format!("case {i}: {e}")),
        };
        let mut first: Option<String> = None;
        for (j, x0) in case.starts.iter().enumerate() {
            let rendered = match cmt_solve(&space, &cert, x0, &SolveOptions::default()) {
                Ok(r) => r.fixed_point.display(budget.horizon),
                Err(e) => return fail(format!("case {i}, start {j}: {e}")),
            };
            match &first {
                None => first = Some(rendered),
                Some(f) if *f != rendered => {
                    return fail(format!(
                        "case {i}: start {j} gives {rendered}, start 0 gives {f}"
                    ))
                }
                Some(_) => {}
            }
        }
    }
    pass(format!("{} cases x 16 starts byte-identical", cases.len()))
}

fn negative_fixtures() -> Outcome {
    let budget = PrecisionBudget::default();
    let two_point = FiniteBetaSpace::two_point(&[rat(1, 2), int(2)]);
    let identity = match solve_finite(&two_point, &[0, 1], 0) {
        Err(LevelError::NotLevelStructured { witness }) => witness,
        other => return fail(format!("identity on two points: {other:?}")),
    };

    let halving = AffineMap::scalar(LaurentSeries::constant(rat(1, 2)), LaurentSeries::zero());
    let space = product_space(1, budget)
        .expect("product metric")
        .restricted(unit_interval_carrier());
    let x0 = SeriesVector::scalar(LaurentSeries::constant(rat(1, 2)));
    let report = certify_contraction(halving, &budget)
        .and_then(|cert| orbit_r_cauchy(&space, &cert, &x0, &RLimitCheck::default()));
    let restricted = match report {
        Ok(r) if r.empty_within_budget() && r.cauchy_pairs > 0 => {
            format!(
                "{}-Cauchy, representative {} outside the carrier",
                r.radius.display(4),
                r.representative().display(4)
            )
        }
        Ok(r) => return fail(format!("y/2 on (0, 1): {}", r.to_text(budget.horizon))),
        Err(e) => return fail(format!("y/2 on (0, 1): {e}")),
    };

    let doubling = AffineMap::scalar(LaurentSeries::constant(int(2)), LaurentSeries::zero());
    let refused = match certify_contraction(doubling, &budget) {
        Err(LevelError::NoFiniteDegree { reason }) => reason,
        other => return fail(format!("2y: {:?}", other.map(|c| c.degree()))),
    };
    pass(format!(
        "identity: {identity}; y/2: {restricted}; 2y: {refused}"
    ))
}

fn level_machinery() -> Outcome {
    let report = run_suite(Suite::Levels, &config(500));
    let outcome = suite_outcome(&report, &["membership", "class-equality", "cdlb-gap"]);
    if outcome.passed && report.check("cdlb-gap").passed < 100 {
        return fail(format!("{}; fewer than 100 chains", outcome.detail));
    }
    outcome
}

fn determinism() -> Outcome {
    let mut lines = Vec::new();
    for suite in Suite::ALL {
        let cfg = SuiteConfig {
            seed: SEED ^ 11,
            ..config(40)
        };
        let (a, b) = (
            run_suite(suite, &cfg).to_json(),
            run_suite(suite, &cfg).to_json(),
        );
        if a != b {
            return fail(format!("{suite}: reruns differ"));
        }
        let other = run_suite(
            suite,
            &SuiteConfig {
                seed: SEED ^ 12,
                ..cfg
            },
        )
        .to_json();
        lines.push(format!(
            "{suite} {}B{}",
            a.len(),
            if other == a {
                " (seed-insensitive)"
            } else {
                ""
            }
        ));
    }
    pass(format!("byte-identical reruns: {}", lines.join(", ")))
}

type Criterion<'a> = (&'static str, Box<dyn FnOnce() -> Outcome + 'a>);

fn main() -> ExitCode {
    let cases = oracle_cases();
    let criteria: Vec<Criterion> = vec![
        (
            "field laws on 1000 triples",
            Box::new(|| timed(Some(Duration::from_secs(30)), field_laws)),
        ),
        (
            "beta axioms 1 and 4 on 500 triples",
            Box::new(|| timed(None, beta_axioms)),
        ),
        (
            "geometric series containment on 200 instances",
            Box::new(|| timed(None, geometric_series)),
        ),
        (
            "completeness of partial sums",
            Box::new(|| timed(None, completeness)),
        ),
        (
            "uniformity round trip",
            Box::new(|| timed(Some(Duration::from_secs(60)), uniformity_roundtrip)),
        ),
        (
            "regularity of finite fixtures",
            Box::new(|| timed(None, regularity)),
        ),
        (
            "fixed points match the closed form",
            Box::new(|| timed(None, || cmt_oracle(&cases))),
        ),
        (
            "fixed points independent of the start",
            Box::new(|| timed(None, || cmt_uniqueness(&cases))),
        ),
        (
            "negative fixtures",
            Box::new(|| timed(None, negative_fixtures)),
        ),
        ("level machinery", Box::new(|| timed(None, level_machinery))),
        (
            "deterministic reports",
            Box::new(|| timed(None, determinism)),
        ),
    ];
    let mut failures = 0;
    for (i, (name, run)) in criteria.into_iter().enumerate() {
        let outcome = run();
        if !outcome.passed {
            failures += 1;
        }
        println!(
            "criterion {:>2} {}: {name}: {}",
            i + 1,
            if outcome.passed { "PASS" } else { "FAIL" },
            outcome.detail
        );
    }
    println!("{failures} of 11 criteria failed");
    if failures == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
