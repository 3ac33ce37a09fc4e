use std::process::{Command, Output};

fn betaspace(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_betaspace"))
        .args(args)
        .current_dir(env!("CARGO_MANIFEST_DIR"))
        .output()
        .expect("binary runs")
}

fn stdout(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).expect("utf-8 output")
}

fn code(out: &Output) -> i32 {
    out.status.code().expect("exit code")
}

#[test]
fn eval_prints_canonical_forms() {
    let out = betaspace(&["eval", "inv(1 - x)", "--horizon", "4"]);
    assert_eq!(code(&out), 0);
    assert_eq!(stdout(&out), "1 + x + x^2 + x^3 + x^4 + …\n");
    assert_eq!(stdout(&betaspace(&["eval", "0 + 0"])), "0\n");
    assert_eq!(stdout(&betaspace(&["eval", "x / x"])), "1\n");
}

#[test]
fn eval_input_errors_exit_2() {
    assert_eq!(code(&betaspace(&["eval", "1 +"])), 2);
    assert_eq!(code(&betaspace(&["eval", "1/0"])), 2);
}

#[test]
fn eval_of_a_zero_up_to_depth_divisor_exits_3() {
    let out = betaspace(&["eval", "1 / (inv(1 - x) - inv(1 - x))", "--depth", "8"]);
    assert_eq!(code(&out), 3, "{}", String::from_utf8_lossy(&out.stderr));
}

#[test]
fn axioms_on_builtins_and_fixtures() {
    let laurent = betaspace(&["axioms", "laurent", "--samples", "40", "--seed", "5"]);
    assert_eq!(code(&laurent), 0);
    assert!(stdout(&laurent).starts_with("seed 5 budget 40\n"));
    let two = betaspace(&["axioms", "two-point"]);
    assert_eq!(code(&two), 0);
    assert_eq!(stdout(&two).matches("verified-exhaustively").count(), 4);
    let bad = betaspace(&["axioms", "fixtures/bad-axiom1.json"]);
    assert_eq!(code(&bad), 1);
    assert!(stdout(&bad).contains("axiom 1 (center membership): counterexample"));
    assert_eq!(code(&betaspace(&["axioms", "fixtures/missing.json"])), 2);
}

#[test]
fn uniform_round_trips() {
    for space in ["two-point", "indiscrete"] {
        let out = betaspace(&["uniform", space, "--roundtrip"]);
        assert_eq!(code(&out), 0, "{space}");
        assert!(stdout(&out).starts_with("round trip passes"));
    }
    let out = betaspace(&["uniform", "fixtures/asymmetric.json", "--roundtrip"]);
    assert_eq!(code(&out), 1);
    assert!(String::from_utf8_lossy(&out.stderr).contains("not symmetric"));
}

#[test]
fn fixed_points() {
    let half = betaspace(&["fixed-point", "affine a=1/2 b=1"]);
    assert_eq!(code(&half), 0);
    let text = stdout(&half);
    assert!(text.starts_with("fixed point 2\n"), "{text}");
    assert!(text.contains("residual valuation ∞"));

    let grown = betaspace(&["fixed-point", "affine a=1/2+x b=1", "--horizon", "3"]);
    assert_eq!(code(&grown), 0);
    assert!(stdout(&grown).starts_with("fixed point 2 + 4*x + 8*x^2 + 16*x^3\n"));

    assert_eq!(code(&betaspace(&["fixed-point", "affine a=2 b=0"])), 1);
    assert_eq!(
        code(&betaspace(&[
            "fixed-point",
            "affine a=1/2 b=1",
            "--stages",
            "0"
        ])),
        3
    );
    assert_eq!(code(&betaspace(&["fixed-point", "linear 3"])), 2);
}

#[test]
fn fixed_point_vectors_take_a_start() {
    let out = betaspace(&[
        "fixed-point",
        "affine a=[1/2; 1/3] b=[1; 1]",
        "--x0",
        "[1; x]",
    ]);
    assert_eq!(code(&out), 0);
    assert!(stdout(&out).starts_with("fixed point [2, 3/2]\n"));
    let wrong = betaspace(&["fixed-point", "affine a=[1/2; 1/3] b=[1; 1]", "--x0", "1"]);
    assert_eq!(code(&wrong), 2);
}

#[test]
fn props_suites() {
    let out = betaspace(&["props", "field-laws", "--samples", "1"]);
    assert_eq!(code(&out), 0);
    assert!(stdout(&out).starts_with("suite field-laws seed 0 samples 1: 1 passed, 0 failed"));
    let geo = betaspace(&["props", "geometric-series", "--samples", "200"]);
    assert_eq!(code(&geo), 0);
    assert!(stdout(&geo).contains("200 passed, 0 failed"));
    assert_eq!(code(&betaspace(&["props", "no-such-suite"])), 2);
}

#[test]
fn structured_output_is_reproducible() {
    let args = [
        "props",
        "levels",
        "--samples",
        "30",
        "--seed",
        "9",
        "--format",
        "structured",
    ];
    let (a, b) = (betaspace(&args), betaspace(&args));
    assert_eq!(code(&a), 0);
    assert_eq!(a.stdout, b.stdout);
    let report: serde_json::Value = serde_json::from_slice(&a.stdout).unwrap();
    assert_eq!(report["suite"], "levels");
    assert_eq!(report["passed"], 30);
}

#[test]
fn structured_errors_carry_the_exit_code() {
    let out = betaspace(&["eval", "(", "--format", "structured"]);
    assert_eq!(code(&out), 2);
    let value: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(value["exit_code"], 2);
}

#[test]
fn limits_from_sequence_files() {
    let sums = betaspace(&["limit", "fixtures/partial-sums.json", "--horizon", "5"]);
    assert_eq!(code(&sums), 0);
    assert_eq!(stdout(&sums), "1 + x + x^2 + x^3 + x^4 + x^5 + …\n");
    let halving = betaspace(&["limit", "fixtures/halving.json", "--format", "structured"]);
    assert_eq!(code(&halving), 0);
    let value: serde_json::Value = serde_json::from_slice(&halving.stdout).unwrap();
    assert_eq!(value["mode"], "r-limit");
    assert_eq!(value["limit"], "0");
}
