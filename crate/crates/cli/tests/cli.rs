//! End-to-end tests of the `texmet` binary: exit codes, stdout contracts,
//! and the corpus/metric/experiment round trip.

use std::path::Path;
use std::process::{Command, Output};

fn texmet(args: &[&str], cwd: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_texmet"))
        .args(args)
        .current_dir(cwd)
        .output()
        .expect("binary runs")
}

fn stdout_lines(out: &Output) -> Vec<String> {
    String::from_utf8_lossy(&out.stdout)
        .lines()
        .map(str::to_string)
        .collect()
}

#[test]
fn unknown_texture_exits_2_and_lists_valid_ids() {
    let dir = tempfile::tempdir().unwrap();
    let out = texmet(
        &["synth", "--texture", "rain", "--param", "x", "--out", "d"],
        dir.path(),
    );
    assert_eq!(out.status.code(), Some(2));
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.contains("fbnoise") && err.contains("applause"), "{err}");
}

#[test]
fn synth_defaults_render_110_files_and_manifest() {
    let dir = tempfile::tempdir().unwrap();
    let out = texmet(
        &[
            "synth",
            "--texture",
            "fbnoise",
            "--param",
            "pitchedness",
            "--duration",
            "1.5",
            "--out",
            "corpus",
        ],
        dir.path(),
    );
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let lines = stdout_lines(&out);
    assert_eq!(lines.len(), 1);
    let manifest_path = dir.path().join(&lines[0]);
    assert!(manifest_path.is_file());

    let wavs: Vec<_> = walk_wavs(dir.path().join("corpus").as_path());
    assert_eq!(wavs.len(), 110);
}

fn walk_wavs(root: &Path) -> Vec<std::path::PathBuf> {
    let mut out = Vec::new();
    let mut stack = vec![root.to_path_buf()];
    while let Some(dir) = stack.pop() {
        for entry in std::fs::read_dir(dir).unwrap() {
            let path = entry.unwrap().path();
            if path.is_dir() {
                stack.push(path);
            } else if path.extension().map(|e| e == "wav").unwrap_or(false) {
                out.push(path);
            }
        }
    }
    out
}

#[test]
fn repeat_synth_with_same_seed_gives_identical_manifest_and_audio() {
    let dir = tempfile::tempdir().unwrap();
    for sub in ["a", "b"] {
        let out = texmet(
            &[
                "synth",
                "--texture",
                "fm",
                "--param",
                "cf_exp",
                "--values",
                "3",
                "--versions",
                "2",
                "--seed",
                "99",
                "--duration",
                "1.5",
                "--out",
                sub,
            ],
            dir.path(),
        );
        assert!(out.status.success());
    }
    let read = |sub: &str, rel: &str| {
        std::fs::read(dir.path().join(sub).join("fm-cf_exp").join(rel)).unwrap()
    };
    assert_eq!(read("a", "manifest.json"), read("b", "manifest.json"));
    for v in 0..2 {
        for p in 0..3 {
            let rel = format!("v{v}/p{p}.wav");
            assert_eq!(read("a", &rel), read("b", &rel), "{rel}");
        }
    }
}

#[test]
fn metric_gm_on_same_file_prints_zero() {
    let dir = tempfile::tempdir().unwrap();
    let out = texmet(
        &[
            "synth", "--texture", "fm", "--param", "cf_exp", "--values", "2", "--versions",
            "1", "--duration", "1.5", "--out", "c",
        ],
        dir.path(),
    );
    assert!(out.status.success());
    let wav = dir.path().join("c/fm-cf_exp/v0/p0.wav");
    let wav = wav.to_str().unwrap();
    let out = texmet(&["metric", "--id", "gm", wav, wav], dir.path());
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    assert_eq!(stdout_lines(&out), vec!["0.000000000"]);
}

#[test]
fn metric_fad_on_files_exits_2_saying_it_needs_corpora() {
    let dir = tempfile::tempdir().unwrap();
    let out = texmet(
        &[
            "synth", "--texture", "fm", "--param", "cf_exp", "--values", "2", "--versions",
            "1", "--duration", "1.5", "--out", "c",
        ],
        dir.path(),
    );
    assert!(out.status.success());
    let wav = dir.path().join("c/fm-cf_exp/v0/p0.wav");
    let wav = wav.to_str().unwrap();
    let out = texmet(&["metric", "--id", "fad", wav, wav], dir.path());
    assert_eq!(out.status.code(), Some(2));
    assert!(
        String::from_utf8_lossy(&out.stderr).contains("fad requires corpora"),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
}

#[test]
fn metric_gmcos_between_fm_clips_is_in_range() {
    let dir = tempfile::tempdir().unwrap();
    let out = texmet(
        &[
            "synth", "--texture", "fm", "--param", "cf_exp", "--values", "2", "--versions",
            "2", "--duration", "1.5", "--out", "c",
        ],
        dir.path(),
    );
    assert!(out.status.success());
    let a = dir.path().join("c/fm-cf_exp/v0/p0.wav");
    let b = dir.path().join("c/fm-cf_exp/v1/p1.wav");
    let out = texmet(
        &["metric", "--id", "gmcos", a.to_str().unwrap(), b.to_str().unwrap()],
        dir.path(),
    );
    assert!(out.status.success());
    let value: f64 = stdout_lines(&out)[0].parse().unwrap();
    assert!((0.0..=2.0).contains(&value), "gmcos {value}");
}

#[test]
fn bad_metric_id_exits_2() {
    let dir = tempfile::tempdir().unwrap();
    let out = texmet(&["metric", "--id", "nope", "a.wav", "b.wav"], dir.path());
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn experiment_full_metric_set_is_accepted_and_missing_file_exits_5() {
    let dir = tempfile::tempdir().unwrap();
    // small corpus, then an experiment over it
    let out = texmet(
        &[
            "synth", "--texture", "fbnoise", "--param", "pitchedness", "--values", "4",
            "--versions", "3", "--duration", "1.5", "--out", "corpus",
        ],
        dir.path(),
    );
    assert!(out.status.success());

    let config = r#"{
        "corpus": {"manifest": "corpus/fbnoise-pitchedness/manifest.json"},
        "experiments": ["sensitivity"],
        "metrics": ["l2"],
        "output": {"path": "report", "formats": ["json", "csv"]}
    }"#;
    std::fs::write(dir.path().join("exp.json"), config).unwrap();
    let out = texmet(
        &["experiment", "--config", "exp.json", "--metrics", "l2,gm,gmcos,agm,cpm"],
        dir.path(),
    );
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let lines = stdout_lines(&out);
    assert_eq!(lines.len(), 2);
    assert!(lines.iter().all(|l| dir.path().join(l).is_file()));

    // the full six-metric list parses; fad then fails its version precondition
    let out = texmet(
        &[
            "experiment", "--config", "exp.json", "--metrics", "gm,agm,cpm,l2,gmcos,fad",
        ],
        dir.path(),
    );
    assert_eq!(out.status.code(), Some(2), "fad on 3 versions is invalid input");

    // remove a corpus file: manifest validation exit code, naming the file
    std::fs::remove_file(dir.path().join("corpus/fbnoise-pitchedness/v1/p2.wav")).unwrap();
    let out = texmet(&["experiment", "--config", "exp.json"], dir.path());
    assert_eq!(out.status.code(), Some(5));
    assert!(
        String::from_utf8_lossy(&out.stderr).contains("p2.wav"),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
}

#[test]
fn embed_writes_csv_then_ingests_it() {
    let dir = tempfile::tempdir().unwrap();
    let out = texmet(
        &[
            "synth", "--texture", "fm", "--param", "cf_exp", "--values", "3", "--versions",
            "2", "--duration", "1.5", "--out", "c",
        ],
        dir.path(),
    );
    assert!(out.status.success());
    let out = texmet(
        &[
            "embed",
            "--manifest",
            "c/fm-cf_exp/manifest.json",
            "--out",
            "emb.csv",
        ],
        dir.path(),
    );
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    assert!(dir.path().join("emb.csv").is_file());
    assert!(dir.path().join("files.txt").is_file());

    let out = texmet(&["embed", "--ingest", "emb.csv"], dir.path());
    assert!(out.status.success());
    assert_eq!(stdout_lines(&out), vec!["6 128"]);
}
