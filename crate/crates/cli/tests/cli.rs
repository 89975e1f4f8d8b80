//! End-to-end checks of the installed binary: exit codes, output wiring, and
//! seed resolution, driven through real files in a per-test temp directory.

use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_bures"))
}

struct TempDir(PathBuf);

impl TempDir {
    fn new(tag: &str) -> Self {
        let dir = std::env::temp_dir().join(format!("bures-cli-{tag}-{}", std::process::id()));
        std::fs::create_dir_all(&dir).unwrap();
        Self(dir)
    }

    fn path(&self, name: &str) -> PathBuf {
        self.0.join(name)
    }
}

impl Drop for TempDir {
    fn drop(&mut self) {
        let _ = std::fs::remove_dir_all(&self.0);
    }
}

fn write_entries(path: &Path, dim: usize, entries: &str) {
    let text = format!("{{\"schema_version\": 1, \"dim\": {dim}, \"entries\": {entries}}}");
    std::fs::write(path, text).unwrap();
}

fn stdout_of(out: &Output) -> String {
    String::from_utf8_lossy(&out.stdout).into_owned()
}

fn field(stdout: &str, key: &str) -> String {
    stdout
        .lines()
        .find_map(|l| l.strip_prefix(&format!("{key} = ")))
        .unwrap_or_else(|| panic!("no `{key}` line in: {stdout}"))
        .to_string()
}

#[test]
fn project_on_a_diagonal_matrix_is_exact_at_iteration_zero() {
    let tmp = TempDir::new("diag");
    let input = tmp.path("diag.json");
    write_entries(
        &input,
        2,
        "[[[0.25, 0.0], [0.0, 0.0]], [[0.0, 0.0], [0.75, 0.0]]]",
    );
    let out = bin()
        .args(["project", "--input"])
        .arg(&input)
        .args(["--group", "dephasing"])
        .output()
        .unwrap();
    assert_eq!(
        out.status.code(),
        Some(0),
        "stderr: {}",
        String::from_utf8_lossy(&out.stderr)
    );
    let stdout = stdout_of(&out);
    assert_eq!(field(&stdout, "value"), "0.0");
    assert_eq!(field(&stdout, "iterations"), "0");
    assert_eq!(field(&stdout, "converged"), "true");
}

#[test]
fn coherence_of_the_plus_state_is_one_half() {
    let tmp = TempDir::new("plus");
    let input = tmp.path("plus_state.json");
    write_entries(
        &input,
        2,
        "[[[0.5, 0.0], [0.5, 0.0]], [[0.5, 0.0], [0.5, 0.0]]]",
    );
    let out = bin()
        .args(["coherence", "--input"])
        .arg(&input)
        .arg("--json")
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(0));
    let parsed: serde_json::Value = serde_json::from_str(stdout_of(&out).trim()).unwrap();
    let value = parsed["value"].as_f64().unwrap();
    assert!((value - 0.5).abs() < 1e-12, "fidelity of coherence {value}");
}

#[test]
fn skew_input_fails_with_exit_one() {
    let tmp = TempDir::new("skew");
    let input = tmp.path("skew.json");
    write_entries(
        &input,
        2,
        "[[[1.0, 0.0], [0.1, 0.0]], [[0.0, 0.0], [1.0, 0.0]]]",
    );
    let out = bin()
        .args(["project", "--input"])
        .arg(&input)
        .args(["--group", "dephasing"])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(1));
    let stderr = String::from_utf8_lossy(&out.stderr);
    assert!(stderr.contains("error:"), "stderr: {stderr}");
}

#[test]
fn exhausted_iteration_budget_exits_with_two_and_a_partial_result() {
    let tmp = TempDir::new("budget");
    let input = tmp.path("instance.json");
    let gen = bin()
        .args(["gen", "--dim", "6", "--seed", "7", "--output"])
        .arg(&input)
        .output()
        .unwrap();
    assert_eq!(gen.status.code(), Some(0));
    let out = bin()
        .args(["project", "--input"])
        .arg(&input)
        .args([
            "--group",
            "dephasing",
            "--max-iters",
            "1",
            "--gap-target",
            "1e-14",
        ])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(2));
    let stdout = stdout_of(&out);
    assert_eq!(field(&stdout, "converged"), "false");
    assert!(String::from_utf8_lossy(&out.stderr).contains("warning:"));
}

#[test]
fn unknown_group_spec_is_rejected() {
    let tmp = TempDir::new("group");
    let input = tmp.path("id.json");
    write_entries(
        &input,
        2,
        "[[[1.0, 0.0], [0.0, 0.0]], [[0.0, 0.0], [1.0, 0.0]]]",
    );
    for spec in ["mystery", "onedesign:3,3", "onedesign:2"] {
        let out = bin()
            .args(["project", "--input"])
            .arg(&input)
            .args(["--group", spec])
            .output()
            .unwrap();
        assert_eq!(out.status.code(), Some(1), "group spec {spec}");
    }
}

#[test]
fn explicit_unitary_file_drives_a_swap_symmetric_projection() {
    let tmp = TempDir::new("swap");
    let unitaries = tmp.path("swap.json");
    // {identity, SWAP} on two qubits.
    let mut grids = String::from("[");
    let id: [[usize; 2]; 4] = [[0, 0], [1, 1], [2, 2], [3, 3]];
    let swap: [[usize; 2]; 4] = [[0, 0], [1, 2], [2, 1], [3, 3]];
    for (k, perm) in [id, swap].iter().enumerate() {
        if k > 0 {
            grids.push(',');
        }
        grids.push('[');
        for i in 0..4 {
            if i > 0 {
                grids.push(',');
            }
            grids.push('[');
            for j in 0..4 {
                if j > 0 {
                    grids.push(',');
                }
                let one = perm.iter().any(|&[r, c]| r == i && c == j);
                grids.push_str(if one { "[1.0, 0.0]" } else { "[0.0, 0.0]" });
            }
            grids.push(']');
        }
        grids.push(']');
    }
    grids.push(']');
    std::fs::write(
        &unitaries,
        format!("{{\"schema_version\": 1, \"dim\": 4, \"unitaries\": {grids}}}"),
    )
    .unwrap();

    let input = tmp.path("instance.json");
    let gen = bin()
        .args(["gen", "--dim", "4", "--seed", "11", "--output"])
        .arg(&input)
        .output()
        .unwrap();
    assert_eq!(gen.status.code(), Some(0));
    let out = bin()
        .args(["project", "--input"])
        .arg(&input)
        .arg("--group")
        .arg(format!("file:{}", unitaries.display()))
        .output()
        .unwrap();
    assert_eq!(
        out.status.code(),
        Some(0),
        "stderr: {}",
        String::from_utf8_lossy(&out.stderr)
    );
    let value: f64 = field(&stdout_of(&out), "value").parse().unwrap();
    assert!(value >= 0.0);
}

#[test]
fn optimizer_file_round_trips_back_through_project() {
    let tmp = TempDir::new("roundtrip");
    let input = tmp.path("instance.json");
    let optimizer = tmp.path("optimizer.json");
    let again = tmp.path("optimizer2.json");
    let gen = bin()
        .args(["gen", "--dim", "3", "--seed", "3", "--output"])
        .arg(&input)
        .output()
        .unwrap();
    assert_eq!(gen.status.code(), Some(0));
    let first = bin()
        .args(["project", "--input"])
        .arg(&input)
        .args(["--group", "dephasing", "--output"])
        .arg(&optimizer)
        .output()
        .unwrap();
    assert_eq!(first.status.code(), Some(0));
    // Projecting the optimizer again is a fixed point: value 0, 0 iterations,
    // and the re-written optimizer file is byte-identical after metadata.
    let second = bin()
        .args(["project", "--input"])
        .arg(&optimizer)
        .args(["--group", "dephasing", "--output"])
        .arg(&again)
        .output()
        .unwrap();
    assert_eq!(second.status.code(), Some(0));
    let stdout = stdout_of(&second);
    let value: f64 = field(&stdout, "value").parse().unwrap();
    assert!(value.abs() < 1e-12, "re-projection value {value}");
    assert_eq!(
        std::fs::read_to_string(&optimizer).unwrap(),
        std::fs::read_to_string(&again).unwrap(),
        "optimizer file must reproduce bit-exactly"
    );
}

#[test]
fn trace_out_records_every_iterate() {
    let tmp = TempDir::new("trace");
    let input = tmp.path("instance.json");
    let trace = tmp.path("trace.json");
    bin()
        .args(["gen", "--dim", "4", "--seed", "5", "--output"])
        .arg(&input)
        .output()
        .unwrap();
    let out = bin()
        .args(["project", "--input"])
        .arg(&input)
        .args(["--group", "dephasing", "--trace-out"])
        .arg(&trace)
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(0));
    let iterations: usize = field(&stdout_of(&out), "iterations").parse().unwrap();
    let rows: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(&trace).unwrap()).unwrap();
    let rows = rows.as_array().unwrap();
    assert_eq!(rows.len(), iterations + 1);
    assert_eq!(rows[0]["n"], 0);
    assert!(rows.last().unwrap()["pl_gap_bound"].as_f64().unwrap() <= 1e-9);
}

#[test]
fn gen_is_deterministic_per_seed_and_env_seed_yields_to_the_flag() {
    let tmp = TempDir::new("seeds");
    let a = tmp.path("a.json");
    let b = tmp.path("b.json");
    let c = tmp.path("c.json");
    let d = tmp.path("d.json");
    for (path, seed) in [(&a, "9"), (&b, "9"), (&c, "10")] {
        let out = bin()
            .args(["gen", "--dim", "4", "--seed", seed, "--output"])
            .arg(path)
            .output()
            .unwrap();
        assert_eq!(out.status.code(), Some(0));
    }
    let a_text = std::fs::read_to_string(&a).unwrap();
    assert_eq!(a_text, std::fs::read_to_string(&b).unwrap());
    assert_ne!(a_text, std::fs::read_to_string(&c).unwrap());

    // The flag wins over the environment; the environment wins over nothing.
    let out = bin()
        .env("BURES_SEED", "10")
        .args(["gen", "--dim", "4", "--seed", "9", "--output"])
        .arg(&d)
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(a_text, std::fs::read_to_string(&d).unwrap());
    let out = bin()
        .env("BURES_SEED", "10")
        .args(["gen", "--dim", "4", "--output"])
        .arg(&d)
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(
        std::fs::read_to_string(&c).unwrap(),
        std::fs::read_to_string(&d).unwrap()
    );
}

#[test]
fn bench_reports_are_identical_across_runs() {
    let run = || {
        let out = bin()
            .args([
                "bench",
                "--problem",
                "coherence",
                "--dims",
                "4,8",
                "--samples",
                "5",
                "--seed",
                "7",
            ])
            .output()
            .unwrap();
        assert_eq!(out.status.code(), Some(0));
        let mut report: serde_json::Value = serde_json::from_str(stdout_of(&out).trim()).unwrap();
        // Wall times vary run to run; everything else must not.
        for rec in report["records"].as_array_mut().unwrap() {
            rec.as_object_mut().unwrap().remove("wall_time_ms");
        }
        report.as_object_mut().unwrap().remove("aggregates");
        report
    };
    assert_eq!(run(), run());
}

#[test]
fn barycenter_weights_must_match_the_inputs() {
    let tmp = TempDir::new("weights");
    let a = tmp.path("a.json");
    let b = tmp.path("b.json");
    for (path, seed) in [(&a, "1"), (&b, "2")] {
        bin()
            .args(["gen", "--dim", "2", "--seed", seed, "--output"])
            .arg(path)
            .output()
            .unwrap();
    }
    let out = bin()
        .args(["barycenter", "--input"])
        .arg(&a)
        .arg("--input")
        .arg(&b)
        .args(["--weights", "0.2,0.3,0.5"])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("3 weights"));
}

#[test]
fn hmax_of_the_maximally_mixed_two_qubit_state_is_one_bit() {
    let tmp = TempDir::new("hmax");
    let input = tmp.path("mixed.json");
    write_entries(
        &input,
        4,
        "[[[0.25,0.0],[0.0,0.0],[0.0,0.0],[0.0,0.0]],\
          [[0.0,0.0],[0.25,0.0],[0.0,0.0],[0.0,0.0]],\
          [[0.0,0.0],[0.0,0.0],[0.25,0.0],[0.0,0.0]],\
          [[0.0,0.0],[0.0,0.0],[0.0,0.0],[0.25,0.0]]]",
    );
    let out = bin()
        .args(["hmax", "--input"])
        .arg(&input)
        .args(["--dim-a", "2", "--dim-b", "2", "--json"])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(0));
    let parsed: serde_json::Value = serde_json::from_str(stdout_of(&out).trim()).unwrap();
    let hmax = parsed["hmax_bits"].as_f64().unwrap();
    assert!((hmax - 1.0).abs() < 1e-6, "hmax_bits {hmax}");
}
