//! End-to-end checks of the binary: contracts, exit codes, atomicity, and
//! determinism, each against library oracles where one exists.

use std::fs;
use std::path::PathBuf;
use std::process::{Command, Output};

use aidlab_core::bits::render_pbm;
use aidlab_core::complexity::{bdm_string, BlockTable, CtmEstimator, FallbackPolicy};
use aidlab_core::eca::{interact, rule_from_number};
use aidlab_core::io::{fmt_sig6, save_ctm_table};
use aidlab_core::turing::{build_ctm_table, TmSpace};
use aidlab_core::BitString;

fn aidlab(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_aidlab"))
        .args(args)
        .env_remove("ALGORAND_LAB_THREADS")
        .output()
        .expect("binary spawns")
}

fn stdout_of(args: &[&str]) -> Vec<u8> {
    let out = aidlab(args);
    assert!(
        out.status.success(),
        "{args:?} failed: {}",
        String::from_utf8_lossy(&out.stderr)
    );
    out.stdout
}

fn scratch_dir(test: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("aidlab-cli-{}-{test}", std::process::id()));
    let _ = fs::remove_dir_all(&dir);
    fs::create_dir_all(&dir).unwrap();
    dir
}

fn write_22_table(dir: &std::path::Path) -> PathBuf {
    let t = build_ctm_table(&TmSpace::new(2, 7).unwrap(), None).unwrap();
    let mut bytes = Vec::new();
    save_ctm_table(&t, &mut bytes).unwrap();
    let path = dir.join("t22.ctm");
    fs::write(&path, bytes).unwrap();
    path
}

#[test]
fn help_and_usage_exit_codes() {
    assert_eq!(aidlab(&["--help"]).status.code(), Some(0));
    assert_eq!(aidlab(&["eca", "--help"]).status.code(), Some(0));
    assert_eq!(aidlab(&["--version"]).status.code(), Some(0));
    assert_eq!(aidlab(&["eca", "lambda", "--wat"]).status.code(), Some(1));
    assert_eq!(aidlab(&["nonsense"]).status.code(), Some(1));
    // usage contract on stderr
    let out = aidlab(&["eca", "lambda"]);
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("--all"));
}

#[test]
fn lambda_all_is_256_headerless_lines() {
    let text = String::from_utf8(stdout_of(&["eca", "lambda", "--all"])).unwrap();
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines.len(), 256);
    assert_eq!(lines[0], "0,0");
    assert_eq!(lines[30], "30,0.500000");
    assert_eq!(lines[255], "255,1.00000");
}

#[test]
fn evolve_pbm_matches_library() {
    let got = stdout_of(&["eca", "evolve", "--rule", "110", "--width", "16", "--steps", "8"]);
    let rule = rule_from_number(110).unwrap();
    let mut bits = vec![0u8; 16];
    bits[8] = 1;
    let init = BitString::from_bits(bits).unwrap();
    let want = render_pbm(&interact(&rule, &rule, &init, 8, 0).unwrap());
    assert_eq!(got, want);
}

#[test]
fn interact_split_regions_follow_their_rules() {
    let text = String::from_utf8(stdout_of(&[
        "eca", "interact", "--rule-a", "0", "--rule-b", "255", "--split", "4", "--width", "8",
        "--steps", "2", "--format", "csv",
    ]))
    .unwrap();
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines.len(), 3);
    // after one step the rule-0 region is 0s and the rule-255 region 1s
    assert_eq!(lines[1], "0,0,0,0,1,1,1,1");
}

#[test]
fn build_shards_merge_to_the_full_table_file() {
    let dir = scratch_dir("merge");
    let full = dir.join("full.ctm");
    let a = dir.join("a.ctm");
    let b = dir.join("b.ctm");
    stdout_of(&["ctm", "build", "--states", "2", "--output", full.to_str().unwrap()]);
    stdout_of(&[
        "ctm", "build", "--states", "2", "--range", "0..1234", "--output", a.to_str().unwrap(),
    ]);
    stdout_of(&[
        "ctm", "build", "--states", "2", "--range", "1234..10000", "--output",
        b.to_str().unwrap(),
    ]);
    let merged = stdout_of(&["ctm", "merge", a.to_str().unwrap(), b.to_str().unwrap()]);
    assert_eq!(merged, fs::read(&full).unwrap());
}

#[test]
fn query_matches_the_estimator() {
    let dir = scratch_dir("query");
    let table = write_22_table(&dir);
    let got = String::from_utf8(stdout_of(&[
        "ctm", "query", "--table", table.to_str().unwrap(), "--string", "1111",
    ]))
    .unwrap();
    let t = build_ctm_table(&TmSpace::new(2, 7).unwrap(), None).unwrap();
    let est = CtmEstimator::new(BlockTable::OneD(t), FallbackPolicy::Error).unwrap();
    let want = est.ctm_value(&"1111".parse().unwrap()).unwrap();
    assert_eq!(got.trim(), fmt_sig6(want));
    // absent strings are a data failure
    let miss = aidlab(&["ctm", "query", "--table", table.to_str().unwrap(), "--string", "010101010101"]);
    assert_eq!(miss.status.code(), Some(2));
}

#[test]
fn bdm_repeated_block_identity() {
    let dir = scratch_dir("bdm");
    let table = write_22_table(&dir);
    let text = String::from_utf8(stdout_of(&[
        "bdm", "--table", table.to_str().unwrap(), "--input", "0000000000000000", "--d", "4",
    ]))
    .unwrap();
    let value: f64 = text.lines().nth(1).unwrap().split(',').next().unwrap().parse().unwrap();
    let t = build_ctm_table(&TmSpace::new(2, 7).unwrap(), None).unwrap();
    let est = CtmEstimator::new(BlockTable::OneD(t), FallbackPolicy::MaxPlusOne).unwrap();
    let single = bdm_string(&est, &"0000".parse().unwrap(), 4).unwrap().value;
    assert!((value - (single + 2.0)).abs() < 1e-4, "{value} vs {single}+2");
}

#[test]
fn aid_reports_match_the_library() {
    let dir = scratch_dir("aid");
    let table = write_22_table(&dir);
    let grid_path = dir.join("g.pbm");
    stdout_of(&[
        "eca", "evolve", "--rule", "30", "--width", "16", "--steps", "15", "--output",
        grid_path.to_str().unwrap(),
    ]);
    let delta = String::from_utf8(stdout_of(&[
        "aid", "delta", "--table", table.to_str().unwrap(), "--grid", grid_path.to_str().unwrap(),
        "--flip", "0,0", "--flip", "3,7",
    ]))
    .unwrap();
    assert!(delta.starts_with("delta,threshold,classification,"));
    let threshold: f64 =
        delta.lines().nth(1).unwrap().split(',').nth(1).unwrap().parse().unwrap();
    assert!((threshold - 8.0).abs() < 1e-9, "log2(256) = 8, got {threshold}");
    let profile = String::from_utf8(stdout_of(&[
        "aid", "profile", "--table", table.to_str().unwrap(), "--grid",
        grid_path.to_str().unwrap(), "--mode", "replace-random", "--seed", "3",
    ]))
    .unwrap();
    assert_eq!(profile.lines().count(), 17);
    let order = String::from_utf8(stdout_of(&[
        "aid", "order", "--table", table.to_str().unwrap(), "--grid", grid_path.to_str().unwrap(),
    ]))
    .unwrap();
    let rows: Vec<u64> = order
        .lines()
        .skip(1)
        .map(|l| l.split(',').nth(1).unwrap().parse().unwrap())
        .collect();
    let mut sorted = rows.clone();
    sorted.sort();
    assert_eq!(sorted, (0..16).collect::<Vec<u64>>(), "a permutation of the rows");
}

#[test]
fn bench_run_and_stats_roundtrip() {
    let dir = scratch_dir("bench");
    let table = write_22_table(&dir);
    let csv = dir.join("rows.csv");
    stdout_of(&[
        "bench", "run", "--table", table.to_str().unwrap(), "--width", "24", "--steps", "24",
        "--output", csv.to_str().unwrap(),
    ]);
    let text = fs::read_to_string(&csv).unwrap();
    assert_eq!(text.lines().count(), 257);
    assert!(text.starts_with(
        "rule,class,lambda,simplified_icons,simplified_bits,lzw_bits,entropy,bdm,"
    ));
    let stats = String::from_utf8(stdout_of(&[
        "bench", "stats", "--input", csv.to_str().unwrap(), "--measure", "bdm",
    ]))
    .unwrap();
    assert_eq!(stats.lines().count(), 5);
    assert!(stats.starts_with("class,count,mean,min,max,overlaps_with"));
    let unknown = aidlab(&["bench", "stats", "--input", csv.to_str().unwrap(), "--measure", "zip"]);
    assert_eq!(unknown.status.code(), Some(1));
}

#[test]
fn identical_invocations_are_byte_identical() {
    let dir = scratch_dir("det");
    let table = write_22_table(&dir);
    let run = |threads: &str| {
        stdout_of(&[
            "bench", "run", "--table", table.to_str().unwrap(), "--width", "20", "--steps",
            "20", "--threads", threads,
        ])
    };
    let first = run("1");
    assert_eq!(first, run("1"));
    assert_eq!(first, run("4"));
    let evolve = |_: ()| {
        stdout_of(&["eca", "evolve", "--rule", "30", "--init", "random", "--seed", "11"])
    };
    assert_eq!(evolve(()), evolve(()));
}

#[test]
fn failed_runs_leave_no_output_file() {
    let dir = scratch_dir("atomic");
    let bad_table = dir.join("bad.ctm");
    let out_file = dir.join("never.csv");
    fs::write(&bad_table, "schema_version=1\n\n").unwrap();
    let out = aidlab(&[
        "bdm", "--table", bad_table.to_str().unwrap(), "--input", "0000", "--output",
        out_file.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(2));
    assert!(!out_file.exists(), "no partial output may appear");
    // and the tmp staging file is gone after a successful write
    let table = write_22_table(&dir);
    let good_out = dir.join("ok.csv");
    stdout_of(&[
        "bdm", "--table", table.to_str().unwrap(), "--input", "0000", "--output",
        good_out.to_str().unwrap(),
    ]);
    assert!(good_out.exists());
    assert!(!dir.join("ok.csv.tmp").exists());
}

#[test]
fn threads_env_var_is_the_default() {
    let out = Command::new(env!("CARGO_BIN_EXE_aidlab"))
        .args(["ctm", "build", "--states", "2", "--range", "0..64"])
        .env("ALGORAND_LAB_THREADS", "3")
        .output()
        .unwrap();
    assert!(out.status.success());
    assert!(String::from_utf8_lossy(&out.stderr).contains("threads=3"));
}

#[test]
fn config_echo_records_resolved_values() {
    let out = aidlab(&["eca", "evolve", "--rule", "90", "--width", "8", "--steps", "2"]);
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.contains("# config: eca evolve"));
    assert!(err.contains("rule=90"));
    assert!(err.contains("init=single"));
}
