//! End-to-end command-line tests: exit codes, artifact files, replayable
//! protocols, and byte-stable output.

use std::fs;
use std::path::Path;

use tempfile::TempDir;
use thermoreach::cli::run_command;

fn run(args: &[&str]) -> i32 {
    let mut argv = vec!["thermoreach"];
    argv.extend_from_slice(args);
    run_command(argv)
}

fn path_str(dir: &TempDir, name: &str) -> String {
    dir.path().join(name).to_str().unwrap().to_string()
}

#[test]
fn check_accepts_a_segment_point_and_writes_a_replayable_protocol() {
    let dir = TempDir::new().unwrap();
    let proto = path_str(&dir, "protocol.json");
    let out = path_str(&dir, "decision.json");

    let code = run(&[
        "check",
        "--gamma",
        "2,1",
        "--from",
        "1/2,1/2",
        "--to",
        "7/12,5/12",
        "--protocol-out",
        &proto,
        "--out",
        &out,
    ]);
    assert_eq!(code, 0, "segment point should be reachable");
    assert!(Path::new(&proto).exists(), "protocol file was not written");

    let decision: serde_json::Value =
        serde_json::from_slice(&fs::read(&out).unwrap()).unwrap();
    assert_eq!(decision["decision"], "reachable");
    assert_eq!(decision["certificate"]["monotone"], true);

    // The emitted protocol must replay onto the target exactly.
    let replay = run(&[
        "protocol",
        &proto,
        "--gamma",
        "2,1",
        "--from",
        "1/2,1/2",
        "--expect",
        "7/12,5/12",
        "--out",
        &path_str(&dir, "replay.json"),
    ]);
    assert_eq!(replay, 0, "replay should hit the target");
}

#[test]
fn check_rejects_an_off_segment_point() {
    let dir = TempDir::new().unwrap();
    let code = run(&[
        "check",
        "--gamma",
        "2,1",
        "--from",
        "1/2,1/2",
        "--to",
        "1/4,3/4",
        "--out",
        &path_str(&dir, "decision.json"),
    ]);
    assert_eq!(code, 3, "off-segment targets are infeasible");
}

#[test]
fn population_files_work_as_endpoints() {
    let dir = TempDir::new().unwrap();
    let from = path_str(&dir, "from.json");
    let to = path_str(&dir, "to.json");
    fs::write(&from, "[\"1/2\", \"1/2\"]\n").unwrap();
    fs::write(&to, "{\"population\": [\"7/12\", \"5/12\"]}\n").unwrap();

    let code = run(&[
        "check",
        "--gamma",
        "2,1",
        "--from",
        &from,
        "--to",
        &to,
        "--out",
        &path_str(&dir, "decision.json"),
    ]);
    assert_eq!(code, 0);
}

#[test]
fn context_files_and_inline_energies_agree() {
    let dir = TempDir::new().unwrap();
    let ctx = path_str(&dir, "context.json");
    fs::write(
        &ctx,
        "{\"mode\": \"rational\", \"energies\": [0.0, 1.0, 2.0], \"beta\": 1.0}\n",
    )
    .unwrap();
    let out_a = path_str(&dir, "a.json");
    let out_b = path_str(&dir, "b.json");

    let code_a = run(&["reach", "--context", &ctx, "--from", "1,0,0", "--out", &out_a]);
    let code_b = run(&[
        "reach",
        "--energies",
        "0,1,2",
        "--beta",
        "1",
        "--from",
        "1,0,0",
        "--out",
        &out_b,
    ]);
    assert_eq!((code_a, code_b), (0, 0));
    assert_eq!(
        fs::read(&out_a).unwrap(),
        fs::read(&out_b).unwrap(),
        "context file and inline flags should produce identical artifacts"
    );
}

#[test]
fn identical_invocations_produce_identical_bytes() {
    let dir = TempDir::new().unwrap();
    let out_a = path_str(&dir, "a.json");
    let out_b = path_str(&dir, "b.json");
    for out in [&out_a, &out_b] {
        let code = run(&[
            "reach",
            "--gamma",
            "1/2,1/3,1/6",
            "--from",
            "3/5,3/10,1/10",
            "--out",
            out,
        ]);
        assert_eq!(code, 0);
    }
    assert_eq!(fs::read(&out_a).unwrap(), fs::read(&out_b).unwrap());
}

#[test]
fn a_tiny_depth_bound_reports_undecided() {
    let dir = TempDir::new().unwrap();
    let code = run(&[
        "reach",
        "--gamma",
        "1/2,1/3,1/6",
        "--from",
        "1,0,0",
        "--depth-bound",
        "1",
        "--out",
        &path_str(&dir, "bounded.json"),
    ]);
    assert_eq!(code, 4, "a truncated closure is not a definite answer");
}

#[test]
fn replay_flags_a_wrong_expectation() {
    let dir = TempDir::new().unwrap();
    let proto = path_str(&dir, "protocol.json");
    fs::write(
        &proto,
        "{\"steps\": [{\"i\": 0, \"j\": 1, \"lambda\": \"1/2\", \"tau_rel\": 0.6931471805599453}]}\n",
    )
    .unwrap();
    let code = run(&[
        "protocol",
        &proto,
        "--gamma",
        "2,1",
        "--from",
        "1/2,1/2",
        "--expect",
        "1/2,1/2",
        "--out",
        &path_str(&dir, "replay.json"),
    ]);
    assert_eq!(code, 3, "the replayed endpoint does not match the expectation");
}

#[test]
fn simulate_then_certify_roundtrip() {
    let dir = TempDir::new().unwrap();
    let proto = path_str(&dir, "protocol.json");
    let traj = path_str(&dir, "trajectory.csv");
    let report = path_str(&dir, "report.json");

    let code = run(&[
        "check",
        "--gamma",
        "1/2,1/3,1/6",
        "--from",
        "1,0,0",
        "--to",
        "3/5,3/10,1/10",
        "--protocol-out",
        &proto,
        "--out",
        &path_str(&dir, "decision.json"),
    ]);
    assert_eq!(code, 0);

    let code = run(&[
        "simulate",
        "--gamma",
        "1/2,1/3,1/6",
        "--from",
        "1,0,0",
        "--protocol",
        &proto,
        "--samples",
        "3",
        "--out",
        &traj,
    ]);
    assert_eq!(code, 0);
    let header = fs::read_to_string(&traj).unwrap();
    assert!(header.starts_with("t,p_1,p_2,p_3\n"), "bad trajectory header");

    let code = run(&[
        "gep",
        &traj,
        "--gamma",
        "1/2,1/3,1/6",
        "--out",
        &report,
        "--table",
        &path_str(&dir, "monotones.csv"),
    ]);
    assert_eq!(code, 0, "a realizable trajectory must certify as monotone");
    let report: serde_json::Value =
        serde_json::from_slice(&fs::read(&report).unwrap()).unwrap();
    assert_eq!(report["monotone"], true);
}

#[test]
fn simulate_under_a_rate_matrix() {
    let dir = TempDir::new().unwrap();
    let rates = path_str(&dir, "rates.json");
    fs::write(
        &rates,
        "{\"rates\": [[-0.6666666666666666, 1.0, 0.0], [0.6666666666666666, -1.5, 1.0], [0.0, 0.5, -1.0]]}\n",
    )
    .unwrap();
    let traj = path_str(&dir, "trajectory.csv");
    let code = run(&[
        "--mode",
        "float",
        "simulate",
        "--gamma",
        "0.5,0.3333333333333333,0.16666666666666666",
        "--from",
        "1,0,0",
        "--rates",
        &rates,
        "--time",
        "2",
        "--samples",
        "4",
        "--out",
        &traj,
    ]);
    assert_eq!(code, 0);
    let body = fs::read_to_string(&traj).unwrap();
    assert_eq!(body.lines().count(), 6, "header plus five sample rows");
}

#[test]
fn cooling_table_has_the_documented_header() {
    let dir = TempDir::new().unwrap();
    let out = path_str(&dir, "cooling.csv");
    let code = run(&["app", "cooling", "--beta-grid", "0.3", "--out", &out]);
    assert_eq!(code, 0);
    let body = fs::read_to_string(&out).unwrap();
    assert!(
        body.starts_with("beta_delta,dp0_tp,dp0_mtp\n"),
        "unexpected header: {}",
        body.lines().next().unwrap_or_default()
    );
}

#[test]
fn app_bundles_carry_protocol_witnesses() {
    let dir = TempDir::new().unwrap();
    let out = path_str(&dir, "work.csv");
    let bundle = path_str(&dir, "work.json");
    let code = run(&[
        "app",
        "work-extraction",
        "--w-grid",
        "0.5",
        "--out",
        &out,
        "--bundle",
        &bundle,
    ]);
    assert_eq!(code, 0);
    let body = fs::read_to_string(&out).unwrap();
    assert!(body.starts_with("w_over_delta,eps_tp,eps_mtp\n"));
    let bundle: serde_json::Value =
        serde_json::from_slice(&fs::read(&bundle).unwrap()).unwrap();
    let protocols = bundle["points"][0]["protocols"].as_array().unwrap();
    assert!(!protocols.is_empty(), "the feasible claim should carry a witness");
}

#[test]
fn malformed_inputs_are_usage_errors() {
    let dir = TempDir::new().unwrap();
    let bad = path_str(&dir, "bad.json");
    fs::write(&bad, "{\"nope\": true}\n").unwrap();
    let code = run(&[
        "reach",
        "--context",
        &bad,
        "--from",
        "1,0",
        "--out",
        &path_str(&dir, "out.json"),
    ]);
    assert_eq!(code, 2);

    let code = run(&["check", "--gamma", "2,1", "--from", "1/2,1/2"]);
    assert_eq!(code, 2, "a missing --to is a usage error");

    let code = run(&["--mode", "telepathic", "reach", "--gamma", "2,1", "--from", "1,0"]);
    assert_eq!(code, 2, "an unknown arithmetic mode is a usage error");
}

#[test]
fn thread_cap_is_honored() {
    std::env::set_var("THERMOREACH_THREADS", "2");
    let dir = TempDir::new().unwrap();
    let code = run(&[
        "app",
        "cooling",
        "--beta-grid",
        "0.4,0.8",
        "--out",
        &path_str(&dir, "cooling.csv"),
    ]);
    std::env::remove_var("THERMOREACH_THREADS");
    assert_eq!(code, 0);
}
