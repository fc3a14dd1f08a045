//! Criterion 9: end-to-end determinism of the `cot eval` binary. Two
//! identical runs over the bundled 50-sample dataset (mock judge) must
//! produce byte-identical JSON and Markdown reports, a third run with a
//! different worker count must still match, and the whole thing stays under
//! ten seconds.

use std::path::Path;
use std::process::Command;
use std::time::Instant;

use crate::support;

fn run_eval(work_dir: &Path, json_out: &Path, md_out: &Path, extra: &[&str]) {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_cot"));
    cmd.current_dir(work_dir)
        .env_clear()
        .arg("eval")
        .arg("--dataset")
        .arg(support::fixture("synthetic50.jsonl"))
        .arg("--predictions")
        .arg(support::fixture("predictions_mixed.jsonl"))
        .args(["--accuracy-mode", "external_judge", "--mock-judge"])
        .arg("--report-json")
        .arg(json_out)
        .arg("--report-md")
        .arg(md_out)
        .args(extra);
    let output = cmd.output().expect("spawn cot eval");
    assert_eq!(
        output.status.code(),
        Some(0),
        "eval exited nonzero\nstdout: {}\nstderr: {}",
        String::from_utf8_lossy(&output.stdout),
        String::from_utf8_lossy(&output.stderr)
    );
}

#[test]
fn criterion_09_cli_determinism() {
    let started = Instant::now();
    // Work in a scratch directory so no stray `cot.toml` (and, thanks to
    // env_clear, no COT_* variables) can leak into the runs.
    let dir = tempfile::tempdir().unwrap();
    let paths: Vec<_> = (1..=3)
        .map(|i| {
            (
                dir.path().join(format!("run{i}.json")),
                dir.path().join(format!("run{i}.md")),
            )
        })
        .collect();

    run_eval(dir.path(), &paths[0].0, &paths[0].1, &[]);
    run_eval(dir.path(), &paths[1].0, &paths[1].1, &[]);
    run_eval(dir.path(), &paths[2].0, &paths[2].1, &["--workers", "1"]);

    let json: Vec<Vec<u8>> = paths.iter().map(|(j, _)| std::fs::read(j).unwrap()).collect();
    let md: Vec<Vec<u8>> = paths.iter().map(|(_, m)| std::fs::read(m).unwrap()).collect();

    assert_eq!(json[0], json[1], "JSON reports differ between identical runs");
    assert_eq!(md[0], md[1], "Markdown reports differ between identical runs");
    assert_eq!(
        json[0], json[2],
        "JSON report depends on the worker count"
    );
    assert_eq!(md[0], md[2], "Markdown report depends on the worker count");

    // Sanity: the report is a real evaluation of all fifty samples.
    let parsed: serde_json::Value = serde_json::from_slice(&json[0]).unwrap();
    assert_eq!(parsed["per_sample"].as_array().unwrap().len(), 50);
    assert_eq!(parsed["counts"]["evaluated"], 50);
    assert!(parsed["aggregates"]["accuracy"].is_number());

    let elapsed = started.elapsed();
    assert!(
        elapsed.as_secs_f64() < 10.0,
        "three eval runs took {elapsed:?}, budget is 10 s"
    );

    support::pass(
        9,
        &format!(
            "three binary runs byte-identical (JSON {} bytes, Markdown {} bytes) in {} ms",
            json[0].len(),
            md[0].len(),
            elapsed.as_millis()
        ),
    );
}
