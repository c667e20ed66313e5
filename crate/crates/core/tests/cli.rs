use std::fs;

use kstar_lab::cli::{run_with_args, ExperimentConfig, Selector, EXIT_CAP, EXIT_CONFIG, EXIT_IO};
use kstar_lab::report::read_structured;

fn run(args: &[&str]) -> (i32, String) {
    let mut out = Vec::new();
    let code = run_with_args(std::iter::once("kstar-lab").chain(args.iter().copied()), &mut out);
    (code, String::from_utf8(out).unwrap())
}

fn write_config(dir: &tempfile::TempDir, body: &str) -> String {
    let path = dir.path().join("lab.toml");
    fs::write(&path, body).unwrap();
    path.to_str().unwrap().to_owned()
}

#[test]
fn empty_selector_list_is_a_config_error() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(&dir, "experiments = []\n");
    let (code, out) = run(&["verify", "--config", &cfg]);
    assert_eq!(code, EXIT_CONFIG);
    assert!(out.is_empty());
}

#[test]
fn unknown_keys_and_selectors_are_rejected() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(&dir, "sede = 3\n");
    assert_eq!(run(&["verify", "--config", &cfg]).0, EXIT_CONFIG);
    let cfg = write_config(&dir, "experiments = [\"eq9\"]\n");
    assert_eq!(run(&["verify", "--config", &cfg]).0, EXIT_CONFIG);
}

#[test]
fn budget_over_the_hard_cap_is_refused() {
    let (code, _) = run(&["enumerate", "--budget-L", "40"]);
    assert_eq!(code, EXIT_CAP);
}

#[test]
fn missing_config_file_is_an_io_error() {
    let (code, _) = run(&["verify", "--config", "/nonexistent/lab.toml"]);
    assert_eq!(code, EXIT_IO);
}

#[test]
fn unknown_flag_is_a_usage_error() {
    assert_eq!(run(&["verify", "--budget-X", "3"]).0, EXIT_CONFIG);
}

#[test]
fn ten_distance_pairs_give_fifty_passing_checks() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(
        &dir,
        "experiments = [\"eq1\"]\n[budgets]\nprogram_len = 12\nsteps = 500\n[params]\neq1_pairs = 10\n",
    );
    let (code, out) = run(&["verify", "--config", &cfg]);
    assert_eq!(code, 0);
    let rows: Vec<&str> = out.lines().skip(1).collect();
    assert_eq!(rows.len(), 50);
    assert!(rows.iter().all(|r| r.starts_with("eq1.") && r.contains(",pass,")));
}

#[test]
fn runs_are_byte_identical() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(
        &dir,
        "experiments = [\"eq1\", \"eq4\", \"lemma8\", \"claim10\"]\n\
         [budgets]\nprogram_len = 12\nsteps = 500\ndepth = 3\nd_min = -1\nd_max = 1\n\
         [params]\neq1_pairs = 5\neq4_sequences = 3\neq4_length = 6\nlemma8_pairs = 5\nclaim10_samples = 50\n",
    );
    let a = run(&["run", "--config", &cfg, "--format", "structured"]);
    let b = run(&["run", "--config", &cfg, "--format", "structured"]);
    assert_eq!(a.0, 0);
    assert_eq!(a, b);
    let c = run(&["run", "--config", &cfg, "--format", "structured", "--seed", "99"]);
    assert_ne!(a.1, c.1);
}

#[test]
fn verify_and_report_split_the_run() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(
        &dir,
        "experiments = [\"eq4\"]\n[budgets]\nprogram_len = 12\nsteps = 500\n\
         [params]\neq4_sequences = 2\neq4_length = 6\n",
    );
    let (_, all) = run(&["run", "--config", &cfg]);
    let (_, asserted) = run(&["verify", "--config", &cfg]);
    let (_, measured) = run(&["report", "--config", &cfg]);
    let count = |s: &str| s.lines().count() - 1;
    assert_eq!(count(&all), count(&asserted) + count(&measured));
    assert!(asserted.lines().skip(1).all(|l| l.contains("AssertedExact")));
    assert!(measured.lines().skip(1).all(|l| l.contains("MeasuredOnly")));
}

#[test]
fn output_files_are_written_and_parse_back() {
    let dir = tempfile::tempdir().unwrap();
    let structured = dir.path().join("out/reports.jsonl");
    let tabular = dir.path().join("out/reports.csv");
    let cache = dir.path().join("cache");
    let cfg = write_config(
        &dir,
        &format!(
            "experiments = [\"lemma8\"]\n[budgets]\nprogram_len = 12\nsteps = 500\n\
             [params]\nlemma8_pairs = 3\n[output]\nstructured = {:?}\ntabular = {:?}\ncache_dir = {:?}\n",
            structured, tabular, cache
        ),
    );
    let (code, out) = run(&["verify", "--config", &cfg]);
    assert_eq!(code, 0);
    assert_eq!(fs::read_to_string(&tabular).unwrap(), out);
    let parsed = read_structured(&structured).unwrap();
    assert_eq!(parsed.len(), out.lines().count() - 1);
    assert!(fs::read_dir(&cache).unwrap().count() > 0);
}

#[test]
fn enumerate_checks_kraft_per_kind_and_condition() {
    let dir = tempfile::tempdir().unwrap();
    let cache = dir.path().to_str().unwrap();
    let (code, out) = run(&[
        "enumerate", "--budget-L", "12", "--cache-dir", cache, "--kind", "cla", "--condition", "e",
        "--condition", "01",
    ]);
    assert_eq!(code, 0);
    assert_eq!(out.lines().filter(|l| l.starts_with("kraft.CondLengthAware")).count(), 2);
    // Second run reads the snapshots back.
    let again = run(&[
        "enumerate", "--budget-L", "12", "--cache-dir", cache, "--kind", "cla", "--condition", "e",
        "--condition", "01",
    ]);
    assert_eq!(again, (0, out));
}

#[test]
fn construct_writes_nu_tables() {
    let dir = tempfile::tempdir().unwrap();
    let tables = dir.path().join("nu.csv");
    let cfg = write_config(
        &dir,
        &format!("[budgets]\nprogram_len = 12\nsteps = 500\ndepth = 2\nd_min = 0\nd_max = 1\n[output]\ntables = {tables:?}\n"),
    );
    let (code, out) = run(&["construct", "--config", &cfg]);
    assert_eq!(code, 0);
    assert_eq!(fs::read_to_string(&tables).unwrap(), out);
    // header + 2 levels × 7 nodes of depth ≤ 2
    assert_eq!(out.lines().count(), 1 + 2 * 7);
}

#[test]
fn default_config_round_trips_through_toml() {
    let config = ExperimentConfig::default();
    assert_eq!(config.experiments, Selector::ALL.to_vec());
    let back = ExperimentConfig::from_toml(&config.to_toml()).unwrap();
    assert_eq!(back, config);
}

#[test]
fn shipped_configs_load() {
    for name in ["full.toml", "markov.toml"] {
        let path = std::path::Path::new(env!("CARGO_MANIFEST_DIR")).join("examples/configs").join(name);
        let config = ExperimentConfig::load(&path).unwrap();
        config.build_registry().unwrap();
    }
    let full = ExperimentConfig::load(
        &std::path::Path::new(env!("CARGO_MANIFEST_DIR")).join("examples/configs/full.toml"),
    )
    .unwrap();
    assert_eq!(full, ExperimentConfig::default());
}
