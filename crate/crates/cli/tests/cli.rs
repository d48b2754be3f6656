use std::path::Path;
use std::process::{Command, Output};

use ptgain_cli::CurveTable;

fn ptgain(args: &[&str], dir: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_ptgain"))
        .args(args)
        .current_dir(dir)
        .env_remove("PTGAIN_THREADS")
        .output()
        .unwrap()
}

fn write_config(dir: &Path, text: &str) -> String {
    let path = dir.join("config.json");
    std::fs::write(&path, text).unwrap();
    path.to_string_lossy().into_owned()
}

fn read_table(path: &Path) -> CurveTable {
    CurveTable::read_csv(std::fs::File::open(path).unwrap()).unwrap()
}

#[test]
fn invalid_configs_exit_with_one() {
    let dir = tempfile::tempdir().unwrap();
    for text in [
        r#"{"dt": 0}"#,
        r#"{"gamma_1": -0.5}"#,
        r#"{"feedback": ["sq"]}"#,
        r#"{"n_traj": 0}"#,
        r#"{"nonsense": 1}"#,
        r#"{"experiment": "fig3"}"#,
        "{\"dt\": 1e-3,}",
    ] {
        let cfg = write_config(dir.path(), text);
        let out = ptgain(&["fig2", "--config", &cfg, "--out", "o"], dir.path());
        assert_eq!(out.status.code(), Some(1), "{text}");
        assert!(String::from_utf8_lossy(&out.stderr).contains("invalid configuration"), "{text}");
    }
    assert!(!dir.path().join("o").exists());
}

#[test]
fn validation_messages_locate_the_problem() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), "{\n  \"dt\": 1e-3,\n  \"gama_10\": 0.1\n}");
    let out = ptgain(&["fig3", "--config", &cfg], dir.path());
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.contains("gama_10") && err.contains("line 3"), "{err}");
}

#[test]
fn usage_errors_exit_with_one_and_help_with_zero() {
    let dir = tempfile::tempdir().unwrap();
    assert_eq!(ptgain(&["fig4"], dir.path()).status.code(), Some(1));
    assert_eq!(ptgain(&["fig2", "--seed", "minus-one"], dir.path()).status.code(), Some(1));
    assert_eq!(ptgain(&["--help"], dir.path()).status.code(), Some(0));
    let out = Command::new(env!("CARGO_BIN_EXE_ptgain"))
        .args(["spectrum", "--out", "s"])
        .current_dir(dir.path())
        .env("PTGAIN_THREADS", "0")
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn unwritable_output_exits_with_two() {
    let dir = tempfile::tempdir().unwrap();
    std::fs::write(dir.path().join("blocker"), "").unwrap();
    let out = ptgain(&["spectrum", "--out", "blocker/inner"], dir.path());
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("blocker"));
}

#[test]
fn gain_blow_up_exits_with_two() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), r#"{"gamma_10": 2.0, "omega_sys": 0.0, "T": 20}"#);
    let out = ptgain(&["fig3", "--config", &cfg, "--out", "o"], dir.path());
    assert_eq!(out.status.code(), Some(2), "{}", String::from_utf8_lossy(&out.stderr));
}

#[test]
fn spectrum_hits_the_exceptional_point() {
    let dir = tempfile::tempdir().unwrap();
    let out = ptgain(&["spectrum", "--out", "s"], dir.path());
    assert!(out.status.success());
    let table = read_table(&dir.path().join("s/spectrum.csv"));
    assert_eq!(table.rows(), 51);
    let ratio = table.column("ratio").unwrap();
    let k = ratio.iter().position(|&r| r == 1.0).unwrap();
    for name in ["re_plus", "im_plus", "re_minus", "im_minus", "phase"] {
        assert_eq!(table.column(name).unwrap()[k], 0.0, "{name}");
    }
    let phase = table.column("phase").unwrap();
    assert!(phase[..k].iter().all(|&p| p == -1.0));
    assert!(phase[k + 1..].iter().all(|&p| p == 1.0));
}

#[test]
fn decay_check_meets_fourth_order_accuracy() {
    let dir = tempfile::tempdir().unwrap();
    let out = ptgain(&["decay-check", "--out", "d"], dir.path());
    assert!(out.status.success());
    let table = read_table(&dir.path().join("d/decay_check.csv"));
    assert_eq!(table.rows(), 1001);
    assert!(table.column("abs_error").unwrap().iter().all(|&e| e <= 1e-6));

    let summary = std::fs::read_to_string(dir.path().join("d/summary.csv")).unwrap();
    let row: Vec<f64> = summary.lines().nth(1).unwrap().split(',').map(|f| f.parse().unwrap()).collect();
    assert!((8.0..=32.0).contains(&row[3]), "{summary}");
}

#[test]
fn fig3_writes_one_table_per_panel() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), r#"{"experiment": "fig3", "output_stride": 100, "svg": true}"#);
    let out = ptgain(&["fig3", "--config", &cfg, "--out", "f"], dir.path());
    assert!(out.status.success());
    let ideal = read_table(&dir.path().join("f/fig3_a.csv")).column("P1_ideal").unwrap().to_vec();
    for panel in ["a", "b", "c", "d"] {
        let table = read_table(&dir.path().join(format!("f/fig3_{panel}.csv")));
        assert_eq!(
            table.names(),
            ["t", "P0_ideal", "P1_ideal", "P0_eff", "P1_eff", "P0_orig", "P1_orig"]
        );
        assert_eq!(table.rows(), 201);
        assert_eq!(table.column("P1_ideal").unwrap(), ideal.as_slice());
        for name in &table.names()[1..] {
            assert!(table.column(name).unwrap().iter().all(|p| (-1e-9..=1.0 + 1e-9).contains(p)));
        }
        assert!(dir.path().join(format!("f/fig3_{panel}.svg")).exists());
    }
}

#[test]
fn fig2_seed_flag_overrides_config_and_g0_ignores_feedback() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(
        dir.path(),
        r#"{"n_traj": 16, "T": 0.2, "dt": 1e-3, "gains": [0.0, 0.5], "feedback": ["sx", "id"], "master_seed": 1}"#,
    );
    let run = |out: &str, seed: Option<&str>| {
        let mut args = vec!["fig2", "--config", &cfg, "--out", out];
        if let Some(s) = seed {
            args.extend(["--seed", s]);
        }
        assert!(ptgain(&args, dir.path()).status.success());
        dir.path().join(out)
    };
    let base = run("a", None);
    let same = run("b", Some("1"));
    let other = run("c", Some("2"));
    let read = |d: &Path| std::fs::read(d.join("fig2_sx.csv")).unwrap();
    assert_eq!(read(&base), read(&same));
    assert_ne!(read(&base), read(&other));

    let sx = read_table(&base.join("fig2_sx.csv"));
    let id = read_table(&base.join("fig2_id.csv"));
    assert_eq!(
        sx.names(),
        [
            "t",
            "P1_sme_mean_G0",
            "P1_sme_stderr_G0",
            "P1_unconditional_G0",
            "P1_sme_mean_G0.5",
            "P1_sme_stderr_G0.5",
            "P1_unconditional_G0.5"
        ]
    );
    for name in ["P1_sme_mean_G0", "P1_sme_stderr_G0", "P1_unconditional_G0"] {
        assert_eq!(sx.column(name), id.column(name), "{name}");
    }
    let summary = std::fs::read_to_string(base.join("summary.csv")).unwrap();
    assert_eq!(summary.lines().count(), 5);
}
