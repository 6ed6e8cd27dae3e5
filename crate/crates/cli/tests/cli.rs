use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use tempfile::TempDir;

fn stallings(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_stallings"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).unwrap()
}

fn stderr(out: &Output) -> String {
    String::from_utf8(out.stderr.clone()).unwrap()
}

fn code(out: &Output) -> i32 {
    out.status.code().expect("exit code")
}

fn write(dir: &TempDir, name: &str, text: &str) -> String {
    let path = dir.path().join(name);
    fs::write(&path, text).unwrap();
    path.to_str().unwrap().to_string()
}

#[test]
fn rank_of_the_example_subgroup() {
    let out = stallings(&["rank", "-n", "3", "xxyyxx", "yyzzyy", "zzxxyyxxzz"]);
    assert_eq!(code(&out), 0);
    assert_eq!(stdout(&out).trim(), "3");
    let out = stallings(&[
        "rank",
        "-n",
        "3",
        "xxyyxx",
        "yyzzyy",
        "zzxxyyxxzz",
        "--format",
        "json",
    ]);
    let json: serde_json::Value = serde_json::from_str(&stdout(&out)).unwrap();
    assert_eq!(json["rank"], 3);
}

#[test]
fn membership_exit_codes() {
    let out = stallings(&["member", "-n", "2", "--subgroup", "ab", "--word", "a"]);
    assert_eq!(code(&out), 1);
    assert_eq!(stdout(&out).trim(), "false");
    let out = stallings(&["member", "-n", "2", "--subgroup", "ab,bA", "--word", "abbA"]);
    assert_eq!(code(&out), 0);
    assert_eq!(stdout(&out).trim(), "true");
    let out = stallings(&["member", "-n", "2", "--subgroup", "ab", "--word", "1"]);
    assert_eq!(code(&out), 0);
}

#[test]
fn echelon_check_depends_on_order() {
    let out = stallings(&[
        "echelon-check",
        "-n",
        "3",
        "--order",
        "y,x,z",
        "xxyyxx",
        "y",
        "z",
    ]);
    assert_eq!(code(&out), 0);
    assert!(stdout(&out).contains("profile: 0,1,2,3"));
    let out = stallings(&["echelon-check", "-n", "3", "xxyyxx", "y", "z"]);
    assert_eq!(code(&out), 1);
    assert!(stdout(&out).contains("profile: 0,0,2,3"));
    let out = stallings(&["profile", "-n", "3", "xxyyxx", "y", "z", "--format", "json"]);
    let json: serde_json::Value = serde_json::from_str(&stdout(&out)).unwrap();
    assert_eq!(json["profile"], serde_json::json!([0, 0, 2, 3]));
    assert_eq!(json["echelon"], false);
    let out = stallings(&["echelon-check", "-n", "2", "--order", "a,aa", "a"]);
    assert_eq!(code(&out), 2, "{}", stderr(&out));
}

#[test]
fn certificate_feeds_the_pipeline() {
    let dir = TempDir::new().unwrap();
    let out = stallings(&[
        "certificate",
        "-n",
        "3",
        "--order",
        "y,x,z",
        "xxyyxx",
        "y",
        "z",
        "--format",
        "json",
    ]);
    assert_eq!(code(&out), 0);
    let cert = write(&dir, "cert.json", &stdout(&out));
    let out = stallings(&[
        "pipeline",
        "-n",
        "3",
        "--certificate",
        &cert,
        "--format",
        "json",
    ]);
    assert_eq!(code(&out), 0, "{}", stderr(&out));
    let json: serde_json::Value = serde_json::from_str(&stdout(&out)).unwrap();
    assert_eq!(json["rank"], 3);
    let out = stallings(&["certificate", "-n", "3", "xxyyxx", "y", "z"]);
    assert_eq!(code(&out), 1);
    let out = stallings(&[
        "pipeline",
        "-n",
        "3",
        "--indices",
        "1,3",
        "--words",
        "aa,cAc",
    ]);
    assert_eq!(code(&out), 0);
    assert!(stdout(&out).contains("x3 -> cAc"));
    assert!(stdout(&out).contains("rank: 2"));
    let out = stallings(&[
        "pipeline",
        "-n",
        "3",
        "--indices",
        "1,3",
        "--words",
        "aa,aa",
    ]);
    assert_eq!(code(&out), 2);
}

#[test]
fn subgroup_files() {
    let dir = TempDir::new().unwrap();
    let g = write(&dir, "g.txt", "n=3\nxxyyxx\ny\nz\n");
    let out = stallings(&["rank", "--file", &g]);
    assert_eq!(
        (code(&out), stdout(&out).trim().to_string()),
        (0, "3".to_string())
    );
    let empty = write(&dir, "empty.txt", "n=2\n# empty subgroup\n");
    let out = stallings(&["rank", "--file", &empty]);
    assert_eq!(stdout(&out).trim(), "0");
    let bad = write(&dir, "bad.txt", "n=1\nab\n");
    let out = stallings(&["rank", "--file", &bad]);
    assert_eq!(code(&out), 2);
    assert!(stderr(&out).contains("line 2"), "{}", stderr(&out));
    let out = stallings(&["rank", "-n", "2", "--file", &g]);
    assert_eq!(code(&out), 2);
    let out = stallings(&[
        "rank",
        "--file",
        &dir.path().join("missing.txt").to_string_lossy(),
    ]);
    assert_eq!(code(&out), 2);
}

#[test]
fn exported_graphs_read_back() {
    let dir = TempDir::new().unwrap();
    let gens = ["-n", "3", "xxyyxx", "yyzzyy", "zzxxyyxxzz"];
    let code_of = |args: &[&str]| -> String {
        let out = stallings(
            &[
                &["intersect"],
                args,
                &["--with", "a,b,c", "--format", "json"],
            ]
            .concat(),
        );
        assert_eq!(code(&out), 0, "{}", stderr(&out));
        let json: serde_json::Value = serde_json::from_str(&stdout(&out)).unwrap();
        json["code"].as_str().unwrap().to_string()
    };
    let reference = code_of(&gens);
    let dot = stdout(&stallings(&[&["export-dot"], &gens[..]].concat()));
    assert!(dot.starts_with("digraph stallings {"));
    let dot_path = write(&dir, "h.dot", &dot);
    assert_eq!(code_of(&["-n", "3", "--graph", &dot_path]), reference);
    let json = stdout(&stallings(
        &[&["export-dot"], &gens[..], &["--format", "json"]].concat(),
    ));
    let json_path = write(&dir, "h.json", &json);
    assert_eq!(code_of(&["--graph", &json_path]), reference);
    assert_eq!(code(&stallings(&["rank", "--graph", &dot_path])), 2);
    let dot_again = stdout(&stallings(&[
        "rank", "-n", "3", "--graph", &dot_path, "--format", "dot",
    ]));
    assert_eq!(dot_again, dot);
}

#[test]
fn intersection_and_endomorphism_images() {
    let out = stallings(&["intersect", "-n", "1", "aa", "--with", "aaa"]);
    assert!(stdout(&out).contains("basis: aaaaaa"));
    let out = stallings(&["endo-image", "-n", "3", "--moved", "1", "--image", "xxyyxx"]);
    assert_eq!(code(&out), 0);
    assert!(stdout(&out).contains("rank: 3"));
    assert!(stdout(&out).contains("moves x1"));
    let out = stallings(&[
        "endo-image",
        "-n",
        "3",
        "--images",
        "aabbaa,,cB",
        "--format",
        "json",
    ]);
    let json: serde_json::Value = serde_json::from_str(&stdout(&out)).unwrap();
    assert_eq!(json["rank"], 2);
    assert_eq!(json["automorphism"], false);
    assert_eq!(
        code(&stallings(&[
            "endo-image",
            "-n",
            "3",
            "--moved",
            "4",
            "--image",
            "a"
        ])),
        2
    );
}

#[test]
fn fix_certificates() {
    let dir = TempDir::new().unwrap();
    let ok = write(
        &dir,
        "ok.json",
        r#"{"n":2,"ordering":[],"ys":["a"],"zs":[[2,"a"]]}"#,
    );
    let out = stallings(&["fix-verify", "--cert", &ok]);
    assert_eq!(code(&out), 0);
    assert!(stdout(&out).contains("generators: a, Bab"));
    let bad = write(
        &dir,
        "bad.json",
        r#"{"n":2,"ordering":[],"ys":["a"],"zs":[[1,"a"]]}"#,
    );
    assert_eq!(code(&stallings(&["fix-verify", "--cert", &bad])), 1);
    let broken = write(&dir, "broken.json", "{\"n\":2");
    assert_eq!(code(&stallings(&["fix-verify", "--cert", &broken])), 2);
}

#[test]
fn lab_commands_and_exit_codes() {
    let out = stallings(&[
        "inert-test",
        "-n",
        "3",
        "xxyyxx",
        "yyzzyy",
        "zzxxyyxxzz",
        "--budget-vertices",
        "3",
    ]);
    assert_eq!(code(&out), 0);
    assert!(stdout(&out).contains("violations: 0"));
    let out = stallings(&[
        "inert-test",
        "-n",
        "2",
        "aa",
        "bb",
        "ab",
        "--budget-vertices",
        "2",
    ]);
    assert_eq!(code(&out), 1);
    let out = stallings(&["compress-test", "-n", "2", "aa", "bb", "ab"]);
    assert_eq!(code(&out), 1);
    assert!(stdout(&out).contains("witness: "));
    let out = stallings(&["compress-test", "-n", "3", "xxyyxx", "yyzzyy", "zzxxyyxxzz"]);
    assert_eq!(code(&out), 0);
    let out = stallings(&["hn-scan", "-n", "2", "--budget-vertices", "3"]);
    assert_eq!(code(&out), 0);
    assert!(stdout(&out).contains("violations: 0"));
    let out = stallings(&["hn-scan", "-n", "3", "--budget-vertices", "5"]);
    assert_eq!(code(&out), 3);
    let out = stallings(&["inert-test", "-n", "2", "ab", "--mode", "sampled"]);
    assert_eq!(code(&out), 2);
    assert!(stderr(&out).contains("--seed"));
    assert_eq!(code(&stallings(&["rank", "-n", "2", "abc"])), 2);
    assert_eq!(code(&stallings(&["rank", "xy"])), 2);
    assert_eq!(
        code(&stallings(&["hn-scan", "-n", "2", "--format", "dot"])),
        2
    );
}

#[test]
fn json_reports_are_reproducible() {
    let runs = [
        vec![
            "inert-test",
            "-n",
            "3",
            "xxyyxx",
            "yyzzyy",
            "zzxxyyxxzz",
            "--format",
            "json",
        ],
        vec![
            "inert-test",
            "-n",
            "2",
            "aab",
            "--mode",
            "sampled",
            "--seed",
            "7",
            "--budget-vertices",
            "6",
            "--samples",
            "200",
            "--format",
            "json",
        ],
        vec![
            "hn-scan",
            "-n",
            "2",
            "--budget-vertices",
            "3",
            "--format",
            "json",
        ],
    ];
    for args in runs {
        let first = stallings(&args);
        let second = stallings(&args);
        assert_eq!(code(&first), 0, "{}", stderr(&first));
        assert_eq!(first.stdout, second.stdout);
        let single = stallings(&[&args[..], &["--jobs", "1"]].concat());
        assert_eq!(first.stdout, single.stdout);
        let json: serde_json::Value = serde_json::from_slice(&first.stdout).unwrap();
        assert!(json.get("elapsed").is_none());
        assert!(json["budget"].is_object());
    }
}

#[test]
fn help_lists_every_command() {
    let help = stdout(&stallings(&["--help"]));
    for cmd in [
        "rank",
        "basis",
        "member",
        "intersect",
        "profile",
        "echelon-check",
        "certificate",
        "pipeline",
        "endo-image",
        "fix-verify",
        "inert-test",
        "compress-test",
        "hn-scan",
        "export-dot",
    ] {
        assert!(help.contains(cmd), "{cmd} missing from help");
    }
    assert!(Path::new(env!("CARGO_BIN_EXE_stallings")).exists());
}
