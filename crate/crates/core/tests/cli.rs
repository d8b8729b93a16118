use std::collections::BTreeMap;
use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use sha2::{Digest, Sha256};

fn latscat(dir: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_latscat"))
        .current_dir(dir)
        .args(args)
        .output()
        .expect("binary runs")
}

fn files(dir: &Path) -> BTreeMap<String, Vec<u8>> {
    fs::read_dir(dir)
        .map(|rd| {
            rd.map(|e| {
                let e = e.unwrap();
                (
                    e.file_name().to_string_lossy().into_owned(),
                    fs::read(e.path()).unwrap(),
                )
            })
            .collect()
        })
        .unwrap_or_default()
}

fn without_manifests(mut m: BTreeMap<String, Vec<u8>>) -> BTreeMap<String, Vec<u8>> {
    m.retain(|k, _| !k.ends_with(".manifest.json"));
    m
}

fn json(bytes: &[u8]) -> serde_json::Value {
    serde_json::from_slice(bytes).unwrap()
}

#[test]
fn reruns_and_thread_counts_are_byte_identical() {
    let tmp = tempfile::tempdir().unwrap();
    let runs: [(&str, &[&str]); 4] = [
        ("scan", &["--u", "3"]),
        ("ed", &["--u", "2", "--periodic"]),
        ("map3d", &["--q", "6"]),
        ("phasediagram", &["--mode", "disorder", "--grid", "3x3", "--sites", "4"]),
    ];
    for (cmd, extra) in runs {
        let mut outs = Vec::new();
        for (tag, jobs) in [("a", "1"), ("b", "1"), ("c", "4")] {
            let dir = format!("{cmd}_{tag}");
            let mut args = vec![cmd, "--jobs", jobs, "--seed", "5", "--out-dir", &dir];
            args.extend_from_slice(extra);
            let out = latscat(tmp.path(), &args);
            assert!(out.status.success(), "{cmd}: {}", String::from_utf8_lossy(&out.stderr));
            outs.push(without_manifests(files(&tmp.path().join(&dir))));
        }
        assert!(!outs[0].is_empty());
        assert_eq!(outs[0], outs[1], "{cmd} rerun differs");
        assert_eq!(outs[0], outs[2], "{cmd} differs across --jobs");
    }
}

#[test]
fn manifest_lists_every_file_with_its_hash() {
    let tmp = tempfile::tempdir().unwrap();
    let out = latscat(tmp.path(), &["wannier", "--depth", "6", "--out-dir", "w"]);
    assert!(out.status.success());
    let dir = tmp.path().join("w");
    let all = files(&dir);
    let manifest = json(&all["wannier.manifest.json"]);
    assert_eq!(manifest["command"], "wannier");
    let listed: BTreeMap<String, String> = manifest["files"]
        .as_array()
        .unwrap()
        .iter()
        .map(|e| {
            (
                e["file"].as_str().unwrap().to_string(),
                e["sha256"].as_str().unwrap().to_string(),
            )
        })
        .collect();
    let on_disk = without_manifests(all);
    assert_eq!(listed.keys().collect::<Vec<_>>(), on_disk.keys().collect::<Vec<_>>());
    for (name, bytes) in &on_disk {
        assert_eq!(listed[name], hex::encode(Sha256::digest(bytes)), "{name}");
    }
}

#[test]
fn config_errors_exit_2_with_a_line_number() {
    let tmp = tempfile::tempdir().unwrap();
    fs::write(
        tmp.path().join("bad.toml"),
        "module = \"wannier\"\n\n[lattice]\ndepth = -1.0\n",
    )
    .unwrap();
    let out = latscat(tmp.path(), &["--config", "bad.toml", "--out-dir", "o"]);
    assert_eq!(out.status.code(), Some(2));
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.contains("line 4"), "{err}");
    assert!(!tmp.path().join("o").exists());

    fs::write(tmp.path().join("typo.toml"), "[lattice]\ndeepth = 3.0\n").unwrap();
    let out = latscat(tmp.path(), &["wannier", "--config", "typo.toml"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("line 2"));

    let out = latscat(tmp.path(), &["ed", "--sites", "14"]);
    assert_eq!(out.status.code(), Some(2));
    let out = latscat(tmp.path(), &["wannier", "--bogus"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn numerical_failure_exits_3_and_writes_nothing() {
    let tmp = tempfile::tempdir().unwrap();
    let dir = tmp.path().join("o");
    fs::create_dir(&dir).unwrap();
    fs::write(dir.join("keep.txt"), b"untouched").unwrap();
    fs::write(tmp.path().join("c.toml"), "[mf]\nmax_iter = 2\n").unwrap();
    let out = latscat(tmp.path(), &["mf", "--config", "c.toml", "--out-dir", "o"]);
    assert_eq!(out.status.code(), Some(3));
    let left = files(&dir);
    assert_eq!(left.len(), 1);
    assert_eq!(left["keep.txt"], b"untouched");
}

#[test]
fn figure_needs_upstream_artifacts() {
    let tmp = tempfile::tempdir().unwrap();
    let out = latscat(tmp.path(), &["figure", "fig3", "--out-dir", "f"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(files(&tmp.path().join("f")).is_empty());

    for cmd in ["wannier", "coupling"] {
        assert!(latscat(tmp.path(), &[cmd, "--out-dir", "f"]).status.success());
    }
    let out = latscat(tmp.path(), &["figure", "fig3", "--out-dir", "f"]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let all = files(&tmp.path().join("f"));
    for panel in ["a", "b", "c", "d"] {
        assert!(
            all.keys().any(|k| k.starts_with(&format!("fig3_{panel}"))),
            "{:?}",
            all.keys()
        );
    }
    assert!(all.contains_key("figure_fig3.manifest.json"));
}

#[test]
fn scan_separates_superfluid_and_mott() {
    let tmp = tempfile::tempdir().unwrap();
    let summary = |u: &str| {
        let dir = format!("u{u}");
        let out = latscat(tmp.path(), &["scan", "--u", u, "--out-dir", &dir]);
        assert!(out.status.success());
        json(&fs::read(tmp.path().join(dir).join("scan_summary.json")).unwrap())
    };
    let (sf, mi) = (summary("0"), summary("10"));
    let f = |v: &serde_json::Value, k: &str| v[k].as_f64().unwrap();
    assert!(f(&sf, "r_max") >= 5.0 * f(&mi, "r_max"));
    assert!(f(&mi, "w_r") >= 2.0 * f(&sf, "w_r"));
}

#[test]
fn config_file_drives_the_run_and_flags_override_it() {
    let tmp = tempfile::tempdir().unwrap();
    fs::write(
        tmp.path().join("run.toml"),
        "module = \"rate\"\nout_dir = \"from_config\"\n\n[rate]\nk_sites = 10\n",
    )
    .unwrap();
    assert!(latscat(tmp.path(), &["--config", "run.toml"]).status.success());
    let a = json(&fs::read(tmp.path().join("from_config/rate.json")).unwrap());
    let out = latscat(
        tmp.path(),
        &["rate", "--config", "run.toml", "--k-sites", "20", "--out-dir", "flag"],
    );
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let b = json(&fs::read(tmp.path().join("flag/rate.json")).unwrap());
    let ratio = b["rate_per_second"].as_f64().unwrap() / a["rate_per_second"].as_f64().unwrap();
    assert!((ratio - 2.0).abs() < 1e-9, "{ratio}");
}

#[test]
fn shipped_configs_parse() {
    let dir = Path::new(env!("CARGO_MANIFEST_DIR")).join("examples/config");
    let mut seen = 0;
    for e in fs::read_dir(dir).unwrap() {
        let path = e.unwrap().path();
        let text = fs::read_to_string(&path).unwrap();
        let cfg = latscat::cli_io::parse_config(&text).unwrap_or_else(|e| panic!("{}: {e}", path.display()));
        assert!(cfg.module.is_some());
        seen += 1;
    }
    assert!(seen >= 2);
}
