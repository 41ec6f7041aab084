use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use channel_select::evaluators::{TableOracle, SyntheticMonotoneFunction};
use channel_select::ingest::{synthetic_recordings, write_csv, DatasetDescriptor, SyntheticRecordingSpec};
use channel_select::model::{CostModel, Direction, ScoreParams};
use channel_select::reference::{eeg_channel_names, eeg_replay_oracle};
use channel_select::search::{branch_and_bound, BnbOptions};
use serde_json::Value;

fn chansel(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_chansel"))
        .args(args)
        .current_dir(env!("CARGO_MANIFEST_DIR"))
        .output()
        .expect("binary runs")
}

fn json_stdout(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).unwrap_or_else(|e| {
        panic!(
            "stdout is not JSON ({e}): {}\nstderr: {}",
            String::from_utf8_lossy(&out.stdout),
            String::from_utf8_lossy(&out.stderr)
        )
    })
}

fn path_str(p: &Path) -> &str {
    p.to_str().unwrap()
}

fn data_file(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("examples/data").join(name)
}

#[test]
fn deterministic_runs_are_byte_identical_and_match_the_library() {
    let args = ["bnb", "--evaluator", "synthetic", "--n", "9", "--seed", "11", "--lambda", "0.6", "--deterministic"];
    let a = chansel(&args);
    let b = chansel(&args);
    assert_eq!(a.status.code(), Some(0), "{}", String::from_utf8_lossy(&a.stderr));
    assert_eq!(a.stdout, b.stdout);

    let doc = json_stdout(&a);
    assert_eq!(doc["feasible_found"], true);
    assert_eq!(doc["config"]["command"], "bnb");
    assert!(doc.get("generated_unix_secs").is_none());

    let f = SyntheticMonotoneFunction::seeded(9, 11, 0.05, 0.5).unwrap();
    let p = ScoreParams::new(0.5, 0.6, Direction::Maximize).unwrap();
    let lib = branch_and_bound(&CostModel::equal(9).unwrap(), &f, &p, BnbOptions::default()).unwrap();
    let best = lib.best.unwrap();
    let names: Vec<String> = best.subset.iter().map(|i| format!("ch{i}")).collect();
    assert_eq!(doc["best"]["channels"], serde_json::json!(names));
    assert_eq!(doc["best"]["performance"].as_f64().unwrap(), best.performance);
    assert_eq!(doc["best"]["cost"].as_f64().unwrap(), best.cost);
    assert_eq!(doc["feasible"].as_array().unwrap().len(), lib.feasible.len());
    assert_eq!(doc["stats"]["evaluations"].as_u64().unwrap(), lib.stats.evaluations);
}

#[test]
fn non_deterministic_runs_carry_a_timestamp() {
    let out = chansel(&["greedy", "--evaluator", "synthetic", "--n", "5", "--lambda", "0.3"]);
    assert_eq!(out.status.code(), Some(0));
    let doc = json_stdout(&out);
    assert!(doc["generated_unix_secs"].as_u64().unwrap() > 0);
    assert!(!doc["path"].as_array().unwrap().is_empty());
}

#[test]
fn exit_codes() {
    let too_many = chansel(&["bnb", "--evaluator", "synthetic", "--n", "70", "--lambda", "0.5"]);
    assert_eq!(too_many.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&too_many.stderr).contains("error"));

    for cmd in ["bnb", "greedy", "exhaustive"] {
        let out = chansel(&[cmd, "--evaluator", "synthetic", "--n", "6", "--lambda", "0.9999", "--deterministic"]);
        assert_eq!(out.status.code(), Some(2), "{cmd}");
        let doc = json_stdout(&out);
        assert_eq!(doc["feasible_found"], false);
        assert!(doc["best"].is_null());
    }

    let exhaustive_guard = chansel(&["exhaustive", "--evaluator", "synthetic", "--n", "21", "--lambda", "0.5"]);
    assert_eq!(exhaustive_guard.status.code(), Some(1));

    let no_lambda = chansel(&["bnb", "--evaluator", "synthetic", "--n", "4"]);
    assert_eq!(no_lambda.status.code(), Some(1));

    let bad_flag = chansel(&["bnb", "--bogus"]);
    assert_eq!(bad_flag.status.code(), Some(1));
}

fn sparse_eeg_table(dir: &Path) -> PathBuf {
    let path = dir.join("fp1.json");
    std::fs::write(
        &path,
        r#"{"default":0.65,"entries":[{"channels":["FP1"],"performance":0.7031}]}"#,
    )
    .unwrap();
    path
}

#[test]
fn eval_subset_scores_fp1() {
    let dir = tempfile::tempdir().unwrap();
    let table = sparse_eeg_table(dir.path());
    let spec = format!("table:{}", path_str(&table));
    let costs = data_file("eeg_equal_costs.csv");
    let out = chansel(&["eval-subset", "--evaluator", &spec, "--costs", path_str(&costs), "--subset", "FP1", "--alpha", "0.5"]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let doc = json_stdout(&out);
    assert_eq!(doc["performance"].as_f64().unwrap(), 0.7031);
    let score = doc["score"].as_f64().unwrap();
    assert!((score - 0.1745).abs() <= 5e-4, "score {score}");
    assert!((doc["savings"].as_f64().unwrap() - 0.948).abs() <= 1e-3);

    let unknown = chansel(&["eval-subset", "--evaluator", &spec, "--costs", path_str(&costs), "--subset", "XX9"]);
    assert_eq!(unknown.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&unknown.stderr).contains("XX9"));
}

#[test]
fn eeg_replay_table_through_the_cli() {
    let dir = tempfile::tempdir().unwrap();
    let names = eeg_channel_names();
    let oracle = eeg_replay_oracle();
    let table = dir.path().join("eeg_replay.json");
    let file = oracle.to_file_data(&names).unwrap();
    std::fs::write(&table, serde_json::to_vec(&file).unwrap()).unwrap();
    let spec = format!("table:{}", path_str(&table));
    let trace = dir.path().join("trace.jsonl");

    let out = chansel(&["bnb", "--evaluator", &spec, "--monotone", "--lambda", "0.7", "--deterministic", "--trace", path_str(&trace)]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let doc = json_stdout(&out);
    assert_eq!(doc["best"]["channels"], serde_json::json!(["FP1"]));
    assert_eq!(doc["stats"]["exact"], true);

    let lines = std::fs::read_to_string(&trace).unwrap();
    let mut count = 0;
    for line in lines.lines() {
        let node: Value = serde_json::from_str(line).unwrap();
        for key in ["subset", "f", "cost", "parent", "action"] {
            assert!(node.get(key).is_some(), "trace line lacks {key}: {line}");
        }
        count += 1;
    }
    assert!(count as u64 >= doc["stats"]["evaluations"].as_u64().unwrap());

    let greedy = chansel(&["greedy", "--evaluator", &spec, "--lambda", "0.7", "--deterministic"]);
    let doc = json_stdout(&greedy);
    let mut chosen: Vec<String> = serde_json::from_value(doc["best"]["channels"].clone()).unwrap();
    chosen.sort();
    assert_eq!(chosen, vec!["C3", "F3"]);
}

#[test]
fn alpha_sweep_writes_one_row_per_grid_point() {
    let dir = tempfile::tempdir().unwrap();
    let csv = dir.path().join("sweep.csv");
    let out = chansel(&[
        "alpha-sweep", "--evaluator", "synthetic", "--n", "7", "--lambda", "0.3", "--alphas", "0:1:0.25", "--output", path_str(&csv),
    ]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let text = std::fs::read_to_string(&csv).unwrap();
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines[0], "alpha,accuracy,cost,score,num_channels,channels");
    assert_eq!(lines.len(), 6);
    assert!(lines[1].starts_with("0,"));
    assert!(lines[5].starts_with("1,"));
}

#[test]
fn unequal_cost_file_changes_the_choice() {
    let dir = tempfile::tempdir().unwrap();
    let costs = dir.path().join("costs.csv");
    std::fs::write(&costs, "channel,raw_cost\na,10\nb,1\nc,1\nd,1\n").unwrap();
    let table = dir.path().join("t.json");
    // f depends only on cardinality: any two channels clear 0.5.
    let mut t = TableOracle::new(4).unwrap();
    for bits in 1..16u64 {
        let s = channel_select::ChannelSet::from_bits(4, bits).unwrap();
        t.insert(s, s.len() as f64 / 4.0).unwrap();
    }
    let names = channel_select::ChannelNames::new(["a", "b", "c", "d"]).unwrap();
    std::fs::write(&table, serde_json::to_vec(&t.to_file_data(&names).unwrap()).unwrap()).unwrap();
    let spec = format!("table:{}", path_str(&table));
    let out = chansel(&["bnb", "--evaluator", &spec, "--costs", path_str(&costs), "--monotone", "--lambda", "0.5", "--deterministic"]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let doc = json_stdout(&out);
    assert_eq!(doc["best"]["channels"], serde_json::json!(["b", "c"]));
    assert!((doc["best"]["cost"].as_f64().unwrap() - 2.0 / 13.0).abs() < 1e-12);

    let mismatched = dir.path().join("bad.csv");
    std::fs::write(&mismatched, "channel,raw_cost\na,1\nb,1\nc,1\nz,1\n").unwrap();
    let out = chansel(&["bnb", "--evaluator", &spec, "--costs", path_str(&mismatched), "--lambda", "0.5"]);
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn centroid_pipeline_from_csv() {
    let dir = tempfile::tempdir().unwrap();
    let spec = SyntheticRecordingSpec {
        channels: 4,
        informative: vec![1],
        separation: 1.0,
        seconds: 60.0,
        sampling_rate_hz: 50.0,
        segments: 4,
        seed: 5,
    };
    let mut data_args = Vec::new();
    for rec in synthetic_recordings(&spec).unwrap() {
        let path = dir.path().join(format!("seg{}.csv", rec.segment()));
        write_csv(&rec, &path, "label").unwrap();
        data_args.push(path);
    }
    let descriptor = DatasetDescriptor {
        sampling_rate_hz: 50.0,
        label_column: "label".into(),
        channel_columns: (0..4).map(|c| format!("ch{c}")).collect(),
        window_seconds: 2.0,
        overlap_seconds: 1.0,
        classes: vec!["class0".into(), "class1".into()],
    };
    let desc_path = dir.path().join("dataset.json");
    std::fs::write(&desc_path, serde_json::to_vec(&descriptor).unwrap()).unwrap();

    let mut args = vec!["greedy", "--evaluator", "centroid", "--dataset", path_str(&desc_path), "--lambda", "0.9", "--test-segments", "2,3", "--deterministic", "--data"];
    args.extend(data_args.iter().map(|p| path_str(p)));
    let out = chansel(&args);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let doc = json_stdout(&out);
    let chosen: Vec<String> = serde_json::from_value(doc["best"]["channels"].clone()).unwrap();
    assert!(chosen.contains(&"ch1".to_string()), "{chosen:?}");
    assert_eq!(doc["evaluator"]["evaluated_on"], "test");
    assert_eq!(doc["evaluator"]["windows"].as_u64().unwrap(), 4 * 59);
}

#[test]
fn external_evaluator_through_the_cli() {
    if Command::new("python3").arg("--version").output().is_err() {
        eprintln!("python3 not available; skipping");
        return;
    }
    let script = data_file("echo_evaluator.py");
    let spec = format!("external:python3 {}", path_str(&script));
    let out = chansel(&["bnb", "--evaluator", &spec, "--channel-names", "a,b,c,d", "--monotone", "--lambda", "0.5", "--deterministic"]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let doc = json_stdout(&out);
    assert_eq!(doc["best"]["channels"], serde_json::json!(["a", "b"]));
    assert_eq!(doc["best"]["performance"].as_f64().unwrap(), 0.5);

    let missing_names = chansel(&["bnb", "--evaluator", &spec, "--lambda", "0.5"]);
    assert_eq!(missing_names.status.code(), Some(1));
}
