use fixpoint_cc::numerics::NormKind;
use fixpoint_cc::protocols::{BrouwerInstance, ProblemKind};
use fixpoint_cc::sperner::{validate_sperner, SpernerInstance};
use fixpoint_cc::Map;
use serde_json::Value;
use std::path::Path;
use std::process::Command;

struct Run {
    code: i32,
    stdout: String,
    stderr: String,
}

fn cli(args: &[&str]) -> Run {
    let out = Command::new(env!("CARGO_BIN_EXE_fixpoint-cc"))
        .args(args)
        .output()
        .unwrap();
    Run {
        code: out.status.code().unwrap(),
        stdout: String::from_utf8(out.stdout).unwrap(),
        stderr: String::from_utf8(out.stderr).unwrap(),
    }
}

fn json(s: &str) -> Value {
    serde_json::from_str(s).unwrap()
}

fn path(dir: &Path, name: &str) -> String {
    dir.join(name).to_string_lossy().into_owned()
}

fn write_instance(dir: &Path, name: &str, inst: &BrouwerInstance) -> String {
    let p = path(dir, name);
    std::fs::write(&p, serde_json::to_string(inst).unwrap()).unwrap();
    p
}

#[test]
fn gen_is_deterministic_in_the_seed() {
    let dir = tempfile::tempdir().unwrap();
    let (a, b) = (path(dir.path(), "a.json"), path(dir.path(), "b.json"));
    for out in [&a, &b] {
        let args = [
            "gen", "brouwer", "--kind", "comp", "--n", "2", "--lambda", "1", "--seed", "7",
            "--out", out,
        ];
        assert_eq!(cli(&args).code, 0);
    }
    assert_eq!(std::fs::read(&a).unwrap(), std::fs::read(&b).unwrap());
    let c = path(dir.path(), "c.json");
    let args = [
        "gen", "brouwer", "--kind", "comp", "--n", "2", "--lambda", "1", "--seed", "8", "--out", &c,
    ];
    assert_eq!(cli(&args).code, 0);
    assert_ne!(std::fs::read(&a).unwrap(), std::fs::read(&c).unwrap());
}

#[test]
fn generated_colorings_are_valid() {
    let out = cli(&[
        "gen", "sperner", "--d", "2", "--k", "8", "--t", "1", "--seed", "3",
    ]);
    assert_eq!(out.code, 0);
    let inst: SpernerInstance = serde_json::from_str(&out.stdout).unwrap();
    assert!(validate_sperner(&inst).is_ok());
    assert_eq!(json(&out.stdout)["format"], 1);
}

#[test]
fn usage_errors_exit_with_two() {
    let out = cli(&["gen", "brouwer", "--kind", "comp", "--seed", "1"]);
    assert_eq!(out.code, 2);
    assert!(out.stdout.is_empty());
    assert!(!out.stderr.is_empty());
    assert_eq!(cli(&["frobnicate"]).code, 2);

    let dir = tempfile::tempdir().unwrap();
    let s = path(dir.path(), "s.json");
    assert_eq!(
        cli(&["gen", "sperner", "--d", "2", "--k", "4", "--t", "1", "--out", &s]).code,
        0
    );
    assert_eq!(cli(&["solve", &s, "--method", "grid"]).code, 2);
    let missing = path(dir.path(), "missing.json");
    assert_eq!(cli(&["solve", &missing]).code, 2);
}

#[test]
fn surplus_solve_reports_a_panchromatic_cell_within_the_bound() {
    let dir = tempfile::tempdir().unwrap();
    let s = path(dir.path(), "s.json");
    assert_eq!(
        cli(&["gen", "sperner", "--d", "3", "--k", "8", "--t", "2", "--seed", "5", "--out", &s])
            .code,
        0
    );
    let out = cli(&["solve", &s]);
    assert_eq!(out.code, 0, "{}", out.stderr);
    let rep = json(&out.stdout);
    assert_eq!(rep["verdict"]["status"], "panchromatic");
    assert_eq!(rep["method"], "surplus");
    assert_eq!(rep["solution"]["kind"], "cell");
    let bits = rep["transcript"]["total_bits"].as_u64().unwrap();
    assert!(bits <= rep["transcript"]["bound"].as_u64().unwrap());
    assert!(rep["fingerprint"].as_str().unwrap().starts_with("sha256:"));
    assert!(rep.get("wall_time_ms").is_none());
    let timed = json(&cli(&["solve", &s, "--timing"]).stdout);
    assert!(timed["wall_time_ms"].as_f64().is_some());
}

#[test]
fn identity_composition_is_solved_at_the_origin() {
    let dir = tempfile::tempdir().unwrap();
    let inst = BrouwerInstance::from_maps(
        ProblemKind::Comp,
        NormKind::Inf,
        0.05,
        (Map::identity(2), 1.0),
        (Map::identity(2), 1.0),
    )
    .unwrap();
    let f = write_instance(dir.path(), "id.json", &inst);
    let out = cli(&["solve", &f]);
    assert_eq!(out.code, 0, "{}", out.stderr);
    let rep = json(&out.stdout);
    assert_eq!(rep["solution"]["coords"], serde_json::json!([0.0, 0.0]));
    assert_eq!(rep["verdict"]["residual"], 0.0);
    assert_eq!(rep["verdict"]["ok"], true);
}

#[test]
fn grid_outside_the_total_regime_exits_with_three() {
    let dir = tempfile::tempdir().unwrap();
    // A constant map sitting between grid points of spacing 1/4.
    let inst = BrouwerInstance::from_maps(
        ProblemKind::Comp,
        NormKind::Inf,
        0.01,
        (Map::constant(1, vec![0.375]), 0.0),
        (Map::identity(1), 1.0),
    )
    .unwrap();
    let f = write_instance(dir.path(), "bad.json", &inst);
    let out = cli(&["solve", &f, "--alpha", "0.25"]);
    assert_eq!(out.code, 3);
    let rep = json(&out.stdout);
    assert_eq!(rep["verdict"]["status"], "no grid point accepted");
    assert_eq!(rep["solution"]["kind"], "none");
    assert!(out.stderr.contains("no grid point accepted"));
}

#[test]
fn mean_to_comp_round_trip_verifies_at_the_same_epsilon() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    let src = path(d, "mean.json");
    let args = [
        "gen",
        "brouwer",
        "--kind",
        "mean",
        "--n",
        "2",
        "--lambda",
        "0.5",
        "--epsilon",
        "0.1",
        "--seed",
        "4",
        "--out",
        &src,
    ];
    assert_eq!(cli(&args).code, 0);
    let (target, record) = (path(d, "comp.json"), path(d, "rec.json"));
    assert_eq!(
        cli(&[
            "reduce",
            &src,
            "--to",
            "comp",
            "--out",
            &target,
            "--backmap",
            &record
        ])
        .code,
        0
    );
    let solved = cli(&["solve", &target]);
    assert_eq!(solved.code, 0, "{}", solved.stderr);
    let report = path(d, "report.json");
    std::fs::write(&report, &solved.stdout).unwrap();

    let back = cli(&["backmap", &record, "--report", &report]);
    assert_eq!(back.code, 0, "{}", back.stderr);
    let back = json(&back.stdout);
    assert_eq!(back["source_epsilon"], 0.1);
    assert_eq!(back["verdict"]["ok"], true);

    let verify = cli(&["verify", &src, "--report", &report]);
    assert_eq!(verify.code, 0);
}

#[test]
fn chained_records_compose_their_epsilon_maps() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    let src = path(d, "line.json");
    assert_eq!(
        cli(&[
            "gen", "brouwer", "--kind", "comp", "--n", "1", "--lambda", "0.5", "--seed", "2",
            "--out", &src
        ])
        .code,
        0
    );
    let mut input = src.clone();
    let mut factors = Vec::new();
    for (i, to) in ["concat", "mean", "comp"].into_iter().enumerate() {
        let (out, rec) = (
            path(d, &format!("t{i}.json")),
            path(d, &format!("r{i}.json")),
        );
        let run = cli(&[
            "reduce",
            &input,
            "--to",
            to,
            "--out",
            &out,
            "--backmap",
            &rec,
        ]);
        assert_eq!(run.code, 0, "{}", run.stderr);
        let record = json(&std::fs::read_to_string(&rec).unwrap());
        factors.push(json(&run.stdout)["epsilon_factor"].as_f64().unwrap());
        assert_eq!(record["steps"].as_array().unwrap().len(), i + 1);
        input = rec;
    }
    // comp->concat with c = 1 and lambda_B = 0.5 costs 2 * 2 * 1.5 = 6.
    assert!((factors[0] - 6.0).abs() < 1e-12);
    assert!((factors[1] - 12.0).abs() < 1e-12);
    assert!((factors[2] - 12.0).abs() < 1e-12);
}

#[test]
fn illegal_reduction_edges_exit_with_two() {
    let dir = tempfile::tempdir().unwrap();
    let src = path(dir.path(), "mean.json");
    assert_eq!(
        cli(&["gen", "brouwer", "--kind", "mean", "--n", "2", "--seed", "1", "--out", &src]).code,
        0
    );
    let out = cli(&[
        "reduce",
        &src,
        "--to",
        "concat",
        "--out",
        &path(dir.path(), "x.json"),
    ]);
    assert_eq!(out.code, 2);
    assert!(out.stderr.contains("mean") && out.stderr.contains("concat"));
}

#[test]
fn comp_to_nash_at_one_eighth_has_81_profiles() {
    let dir = tempfile::tempdir().unwrap();
    let src = path(dir.path(), "line.json");
    assert_eq!(
        cli(&[
            "gen", "brouwer", "--kind", "comp", "--n", "1", "--p", "2", "--seed", "2", "--out",
            &src
        ])
        .code,
        0
    );
    let game = path(dir.path(), "game.json");
    let out = cli(&[
        "reduce", &src, "--to", "nash", "--alpha", "0.125", "--out", &game,
    ]);
    assert_eq!(out.code, 0, "{}", out.stderr);
    assert_eq!(json(&out.stdout)["profiles"], 81);
    let solved = cli(&["solve", &game, "--threshold", "1"]);
    assert_eq!(solved.code, 0, "{}", solved.stderr);
    assert_eq!(json(&solved.stdout)["solution"]["count"], 81);
}

#[test]
fn bench_sperner_prints_the_csv_header_and_rows() {
    let out = cli(&[
        "bench",
        "sperner",
        "--d",
        "2",
        "--ks",
        "2,4",
        "--instances",
        "3",
    ]);
    assert_eq!(out.code, 0);
    let lines: Vec<&str> = out.stdout.lines().collect();
    assert_eq!(lines[0], "k,n,cells,bits,bound,verdict");
    assert_eq!(lines.len(), 3);
    assert!(lines[1].starts_with("2,6,4,"));
    assert!(lines[2].starts_with("4,15,16,"));
}
