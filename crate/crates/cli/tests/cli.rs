use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn configs() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../configs")
}

fn lab(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_paramp-lab"))
        .args(args)
        .env_remove("PARAMP_THREADS")
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn cfg(name: &str) -> String {
    configs().join(name).to_string_lossy().into_owned()
}

#[test]
fn gain_csv_has_requested_rows() {
    let o = lab(&["gain", "--config", &cfg("modified_bjpa_cell.toml"), "--from", "4GHz", "--to", "8GHz", "--points", "2001"]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let text = stdout(&o);
    let mut lines = text.lines();
    assert!(lines.next().unwrap().starts_with("# paramp-lab v"));
    assert_eq!(lines.next().unwrap(), "freq_ghz,signal_gain_db,idler_gain_db");
    let rows: Vec<&str> = lines.collect();
    assert_eq!(rows.len(), 2001);
    assert!(rows[0].starts_with("4,"));
    assert!(rows[2000].starts_with("8,"));
}

#[test]
fn reference_cells_are_verbatim() {
    for (table, row, column, want) in [
        ("1", "JPA", "Gain", "20-25 dB"),
        ("1", "JPA", "Noise Figure", "~0.0065 dB"),
        ("2", "Single JJ", "P1dB", "\u{2013}115 to \u{2013}133 dBm"),
    ] {
        let o = lab(&["reference", "--table", table, "--row", row, "--column", column]);
        assert!(o.status.success());
        assert_eq!(stdout(&o).trim_end(), want);
    }
    let o = lab(&["reference", "--table", "1", "--row", "JPA", "--column", "Latency"]);
    assert_eq!(o.status.code(), Some(1));
}

#[test]
fn steady_state_at_origin() {
    let o = lab(&["steady-state", "--delta", "0", "--zeta", "0"]);
    assert!(o.status.success());
    let doc: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(doc["roots"].as_array().unwrap().len(), 1);
    assert!((doc["roots"][0]["n"].as_f64().unwrap() - 4.0).abs() < 1e-12);
    let o = lab(&["steady-state", "--delta", "2", "--zeta", "0.8"]);
    let doc: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(doc["bistable"], true);
}

#[test]
fn exit_codes() {
    assert_eq!(lab(&["gain"]).status.code(), Some(1));
    assert_eq!(lab(&["frobnicate"]).status.code(), Some(1));
    assert_eq!(lab(&["--threads", "0", "selfcheck"]).status.code(), Some(1));

    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.toml");
    let text = std::fs::read_to_string(configs().join("single_jj.toml")).unwrap();
    std::fs::write(&bad, text.replace("q_eff = 300", "q_eff = 300\nq_factor = 1")).unwrap();
    let o = lab(&["gain", "--config", bad.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("q_factor"));

    // Upper branch of a bistable drive under the `error` policy.
    let bistable = dir.path().join("bistable.toml");
    std::fs::write(
        &bistable,
        text.replace("power_dbm = -126.8", "zeta = -0.8\nbranch = \"error\"").replace("pump_detuning = -0.8", "pump_detuning = -2.0"),
    )
    .unwrap();
    let o = lab(&["gain", "--config", bistable.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(3));
    assert!(String::from_utf8_lossy(&o.stderr).contains("bistable"));
}

#[test]
fn comb_plot_has_one_line_per_mode_and_is_deterministic() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().to_str().unwrap();
    let args = ["gain", "--config", &cfg("modified_bjpa_cell.toml"), "--from", "4GHz", "--to", "8GHz", "--points", "801", "--out", out, "--plot", "--format", "json"];
    assert!(lab(&args).status.success());
    let first = std::fs::read(dir.path().join("gain.svg")).unwrap();
    assert!(lab(&args).status.success());
    assert_eq!(first, std::fs::read(dir.path().join("gain.svg")).unwrap());

    let modes = lab(&["modes", "--config", &cfg("modified_bjpa_cell.toml")]);
    let in_band = stdout(&modes)
        .lines()
        .skip(2)
        .filter(|l| {
            let f: f64 = l.split(',').nth(1).unwrap().parse().unwrap();
            (4.0..=8.0).contains(&f)
        })
        .count();
    let svg = String::from_utf8(first).unwrap();
    assert!(in_band > 1);
    assert_eq!(svg.matches(r#"<polyline class="mode""#).count(), in_band);
    assert_eq!(svg.matches(r#"<polyline class="envelope""#).count(), 1);

    let doc: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(dir.path().join("gain.json")).unwrap()).unwrap();
    assert_eq!(doc["rows"].as_array().unwrap().len(), 801);
    assert_eq!(doc["meta"]["architecture"], "modified_bjpa");
}

fn sweep_config(dir: &Path, path: &str) -> PathBuf {
    let text = std::fs::read_to_string(configs().join("single_jj.toml")).unwrap();
    let file = dir.join("sweep.toml");
    std::fs::write(
        &file,
        format!("{text}\n[sweep]\nmode = \"cartesian\"\naxes = [{{ path = \"{path}\", values = [-130.0, -127.5, -126.0] }}, {{ path = \"environment.q_eff\", values = [250.0, 300.0] }}]\nformats = [\"csv\", \"json\"]\n"),
    )
    .unwrap();
    file
}

#[test]
fn sweep_is_reproducible() {
    let dir = tempfile::tempdir().unwrap();
    let file = sweep_config(dir.path(), "drive.power_dbm");
    let (a, b) = (dir.path().join("a"), dir.path().join("b"));
    for (out, threads) in [(&a, "1"), (&b, "4")] {
        let o = lab(&["sweep", "--config", file.to_str().unwrap(), "--out", out.to_str().unwrap(), "--points", "41", "--threads", threads]);
        assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    }
    let mut names: Vec<_> = std::fs::read_dir(&a).unwrap().map(|e| e.unwrap().file_name()).collect();
    names.sort();
    assert_eq!(names.len(), 6 * 2 + 1);
    for n in &names {
        assert_eq!(std::fs::read(a.join(n)).unwrap(), std::fs::read(b.join(n)).unwrap(), "{n:?}");
    }
    let manifest: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(a.join("manifest.json")).unwrap()).unwrap();
    let points = manifest["points"].as_array().unwrap();
    assert_eq!(points.len(), 6);
    assert_eq!(points[0]["overrides"]["drive.power_dbm"], -130.0);
    assert_eq!(points[1]["overrides"]["environment.q_eff"], 300.0);
}

#[test]
fn sweep_rejects_unknown_paths() {
    let dir = tempfile::tempdir().unwrap();
    let file = sweep_config(dir.path(), "drive.pump_power");
    let o = lab(&["sweep", "--config", file.to_str().unwrap(), "--out", dir.path().join("o").to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("drive.pump_power"));
}

#[test]
fn thread_count_from_environment() {
    let o = Command::new(env!("CARGO_BIN_EXE_paramp-lab"))
        .args(["selfcheck"])
        .env("PARAMP_THREADS", "2")
        .output()
        .unwrap();
    assert!(o.status.success());
    assert_eq!(stdout(&o).lines().filter(|l| l.starts_with("PASS")).count(), 6);
}

#[test]
fn oracle_gain_tracks_analytic_column() {
    let o = lab(&["oracle", "--config", &cfg("single_jj.toml"), "--points", "6", "--format", "csv"]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let text = stdout(&o);
    let rows: Vec<Vec<f64>> = text
        .lines()
        .skip(2)
        .map(|l| l.split(',').map(|v| v.parse().unwrap()).collect())
        .collect();
    assert_eq!(rows.len(), 6);
    for r in rows {
        let (oracle, analytic) = (10f64.powf(r[1] / 10.0), 10f64.powf(r[3] / 10.0));
        assert!((oracle / analytic - 1.0).abs() < 0.01, "{r:?}");
    }
}

#[test]
fn p1db_reports_both_models() {
    let o = lab(&["p1db", "--config", &cfg("single_jj.toml"), "--oracle"]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let doc: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert!(doc["difference_db"].as_f64().unwrap().abs() < 3.0);
    assert!(doc["p1db_dbm"].as_f64().unwrap() < doc["pump_power_dbm"].as_f64().unwrap());
}
