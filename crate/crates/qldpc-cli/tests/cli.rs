//! End-to-end CLI behavior: exit codes, file round trips, output formats.

use std::path::Path;
use std::process::{Command, Output};

fn qldpc(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_qldpc"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(out: &Output) -> String {
    String::from_utf8_lossy(&out.stdout).into_owned()
}

#[test]
fn gen_code_bicycle_roundtrips_through_validate() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("code.qldpc");
    let out = qldpc(&[
        "gen-code",
        "--bicycle",
        "-n",
        "60",
        "-w",
        "8",
        "-m",
        "24",
        "--seed",
        "1",
        "-o",
        path.to_str().unwrap(),
    ]);
    assert!(out.status.success(), "{out:?}");
    let report = stdout(&out);
    assert!(report.contains("commutes = true"), "{report}");
    assert!(report.contains("css = true"), "{report}");

    let loaded = qldpc::codes::load_code(&path).unwrap();
    assert_eq!(loaded.n_qubits(), 60);

    let check = qldpc(&["validate", path.to_str().unwrap()]);
    assert!(check.status.success());
    assert!(stdout(&check).contains("commutes = true"));
}

#[test]
fn gen_code_builtin_writes_five_qubit_form() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("five.qldpc");
    let out = qldpc(&["gen-code", "--builtin", "five-qubit", "-o", path.to_str().unwrap()]);
    assert!(out.status.success());
    let text = std::fs::read_to_string(&path).unwrap();
    assert!(text.starts_with("QLDPC 1\n5 1 4\n"));
    let loaded = qldpc::codes::load_code(&path).unwrap();
    assert_eq!(
        loaded.rows(),
        qldpc::stabilizer::StabilizerMatrix::five_qubit().rows()
    );
}

#[test]
fn usage_errors_exit_one() {
    // missing -o
    let out = qldpc(&["gen-code", "--builtin", "five-qubit"]);
    assert_eq!(out.status.code(), Some(1), "{out:?}");
    // unknown subcommand
    let out = qldpc(&["frobnicate"]);
    assert_eq!(out.status.code(), Some(1));
    // --help exits zero
    let out = qldpc(&["--help"]);
    assert_eq!(out.status.code(), Some(0));
}

#[test]
fn data_errors_exit_two() {
    let out = qldpc(&["validate", "/nonexistent/code.qldpc"]);
    assert_eq!(out.status.code(), Some(2));

    let out = qldpc(&["fisher", "--f-grid", "0"]);
    assert_eq!(out.status.code(), Some(2));
    let msg = String::from_utf8_lossy(&out.stderr).into_owned();
    assert!(msg.contains("(0, 1)"), "{msg}");

    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("bad.cfg");
    std::fs::write(&cfg, "f-grid = 0.1\nbogus = 1\n").unwrap();
    let out = qldpc(&["simulate", cfg.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
    let msg = String::from_utf8_lossy(&out.stderr).into_owned();
    assert!(msg.contains("line 2"), "{msg}");
}

#[test]
fn fisher_table_shows_closed_forms_and_dominance() {
    let out = qldpc(&["fisher", "--f-grid", "0.1,0.5,0.9"]);
    assert!(out.status.success());
    let text = stdout(&out);
    assert!(text.contains("1.333333"), "{text}");
    assert!(text.contains("2.400000"), "{text}");
    for line in text.lines().skip(1) {
        let fields: Vec<f64> = line
            .split_whitespace()
            .map(|t| t.parse().unwrap())
            .collect();
        assert!(fields[2] > fields[1], "entangled must dominate: {line}");
    }
}

#[test]
fn simulate_help_documents_config_keys() {
    let out = qldpc(&["simulate", "--help"]);
    assert!(out.status.success());
    let text = stdout(&out);
    for key in [
        "code",
        "code-file",
        "bicycle-n",
        "bicycle-row-weight",
        "bicycle-m",
        "bicycle-seed",
        "f-grid",
        "grid-unit",
        "modes",
        "n-m",
        "default-prior",
        "fisher-arg",
        "fisher-scale-n",
        "prior-split",
        "max-iter",
        "max-retries",
        "perturb-strength",
        "stop-block-errors",
        "max-trials",
        "seed",
        "metric",
    ] {
        assert!(text.contains(key), "help is missing `{key}`");
    }
    for default in ["0.375", "marginal", "f-prime", "1000000", "physical"] {
        assert!(text.contains(default), "help is missing default `{default}`");
    }
}

fn write_tiny_config(dir: &Path) -> std::path::PathBuf {
    let cfg = dir.join("sweep.cfg");
    std::fs::write(
        &cfg,
        "code = five-qubit\n\
         f-grid = 0.08\n\
         modes = perfect no-information unentangled entangled\n\
         stop-block-errors = 20\n\
         max-trials = 5000\n\
         seed = 3\n",
    )
    .unwrap();
    cfg
}

#[test]
fn simulate_emits_schema_and_plot_accepts_it() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_tiny_config(dir.path());
    let csv = dir.path().join("out.csv");
    let out = qldpc(&["simulate", cfg.to_str().unwrap(), "-o", csv.to_str().unwrap()]);
    assert!(out.status.success(), "{out:?}");

    let text = std::fs::read_to_string(&csv).unwrap();
    assert!(text.contains("# config-hash: "));
    assert!(text.contains("# seed: 3"));
    let header = text
        .lines()
        .find(|l| !l.starts_with('#'))
        .unwrap();
    assert_eq!(
        header,
        "f,f_prime,mode,trials,block_errors,qubit_errors,qber,qber_lo,qber_hi,fer,fer_lo,fer_hi,mean_iters,code_id,seed"
    );
    // four modes, one grid point -> four data rows
    let data_rows = text.lines().filter(|l| !l.starts_with('#')).count() - 1;
    assert_eq!(data_rows, 4);

    let svg = dir.path().join("out.svg");
    let out = qldpc(&["plot", csv.to_str().unwrap(), "-o", svg.to_str().unwrap()]);
    assert!(out.status.success(), "{out:?}");
    let svg_text = std::fs::read_to_string(&svg).unwrap();
    assert!(svg_text.starts_with("<svg"));
    assert_eq!(svg_text.matches("legend-entry").count(), 4);
}

#[test]
fn plot_rejects_malformed_csv() {
    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.csv");
    std::fs::write(&bad, "this,is,not,results\n1,2,3,4\n").unwrap();
    let svg = dir.path().join("out.svg");
    let out = qldpc(&["plot", bad.to_str().unwrap(), "-o", svg.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn single_row_csv_plots_point_with_error_bar() {
    let dir = tempfile::tempdir().unwrap();
    let csv = dir.path().join("one.csv");
    std::fs::write(
        &csv,
        "f,f_prime,mode,trials,block_errors,qubit_errors,qber,qber_lo,qber_hi,fer,fer_lo,fer_hi,mean_iters,code_id,seed\n\
         0.2,0.15,perfect,100,10,40,0.08,0.06,0.1,0.1,0.05,0.17,3.5,tiny,1\n",
    )
    .unwrap();
    let svg = dir.path().join("one.svg");
    let out = qldpc(&["plot", csv.to_str().unwrap(), "-o", svg.to_str().unwrap()]);
    assert!(out.status.success(), "{out:?}");
    let text = std::fs::read_to_string(&svg).unwrap();
    assert!(text.contains("<circle"));
    assert_eq!(text.matches("legend-entry").count(), 1);
}
