use std::path::Path;
use std::process::{Command, Output};

use tempfile::TempDir;

fn run(dir: &Path, args: &[&str], config: &str) -> Output {
    let cfg = dir.join("run.json");
    std::fs::write(&cfg, config).unwrap();
    Command::new(env!("CARGO_BIN_EXE_sppal"))
        .args(args)
        .arg("--config")
        .arg(&cfg)
        .arg("--out")
        .arg(dir.join("out"))
        .env_remove("SPPAL_THREADS")
        .output()
        .unwrap()
}

fn read_rows(path: &Path) -> (Vec<String>, Vec<Vec<String>>) {
    let text = std::fs::read_to_string(path).unwrap();
    let mut lines = text.lines().filter(|l| !l.starts_with('#'));
    let header = lines.next().unwrap().split(',').map(String::from).collect();
    let rows = lines.map(|l| l.split(',').map(String::from).collect()).collect();
    (header, rows)
}

fn column(path: &Path, name: &str) -> Vec<f64> {
    let (h, rows) = read_rows(path);
    let i = h.iter().position(|c| c == name).unwrap();
    rows.iter().map(|r| r[i].parse().unwrap()).collect()
}

#[test]
fn pc_peaks_at_requested_cd() {
    let d = TempDir::new().unwrap();
    let cfg = r#"{"medium": {"lossless": true}, "source": {"kind": "piston", "frequency_hz": 60000, "d_uc_m": 0.45},
                  "solver": {"z_grid_m": {"start": 0.2, "stop": 1.0, "count": 161}}}"#;
    let o = run(d.path(), &["pc"], cfg);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let csv = d.path().join("out/pc.csv");
    let z = column(&csv, "abscissa");
    let spl = column(&csv, "spl_db");
    let imax = (0..spl.len()).max_by(|&a, &b| spl[a].total_cmp(&spl[b])).unwrap();
    assert!((z[imax] - 0.45).abs() <= 0.006, "argmax {}", z[imax]);

    let json: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(d.path().join("out/pc.json")).unwrap()).unwrap();
    assert_eq!(json["metadata"]["command"], "pc");
    assert_eq!(json["metadata"]["config_sha256"].as_str().unwrap().len(), 64);
    assert!(json["config"]["medium"]["relative_humidity_pct"].as_f64() == Some(70.0));
}

#[test]
fn missing_source_block_is_named() {
    let d = TempDir::new().unwrap();
    let o = run(d.path(), &["pc"], "{}");
    assert!(!o.status.success());
    assert!(String::from_utf8_lossy(&o.stderr).contains("source"));
    assert!(!d.path().join("out/pc.csv").exists());
}

#[test]
fn unknown_field_fails() {
    let d = TempDir::new().unwrap();
    let o = run(d.path(), &["pc"], r#"{"source": {"kind": "piston", "frequency_hz": 60000, "radius_m": 0.02, "colour": 1}}"#);
    assert!(!o.status.success());
    assert!(String::from_utf8_lossy(&o.stderr).contains("colour"));
}

#[test]
fn format_flag_limits_outputs() {
    let d = TempDir::new().unwrap();
    let cfg = r#"{"source": {"kind": "piston", "frequency_hz": 40000, "radius_m": 0.02}}"#;
    let o = run(d.path(), &["bp", "--format", "json"], cfg);
    assert!(o.status.success());
    assert!(d.path().join("out/bp.json").exists());
    assert!(!d.path().join("out/bp.csv").exists());
}

fn audio_cfg(kind: &str) -> String {
    format!(
        r#"{{"source": {{"kind": "piston", "frequency_hz": 60000, "radius_m": 0.02}},
            "pair": {{"f_carrier_hz": 60000, "f_a_hz": 1000, "f_a_grid_hz": [300, 600, 1000]}},
            "transducer": {{"surrogate": {{"kind": "{kind}", "f_r1_hz": 59000, "f_r2_hz": 60000, "f_anti_hz": 59700,
                                           "eta": 0.02, "carrier_velocity_m_s": 0.1}}}},
            "solver": {{"refinement": 2.0}}}}"#
    )
}

#[test]
fn dual_resonance_lifts_low_audio_band() {
    let dr = TempDir::new().unwrap();
    let sr = TempDir::new().unwrap();
    assert!(run(dr.path(), &["audio-fr"], &audio_cfg("dr")).status.success());
    assert!(run(sr.path(), &["audio-fr"], &audio_cfg("sr")).status.success());
    let a = column(&dr.path().join("out/audio-fr.csv"), "spl_db");
    let b = column(&sr.path().join("out/audio-fr.csv"), "spl_db");
    for (x, y) in a.iter().zip(&b) {
        assert!(x > y, "dr {x} sr {y}");
    }
}

#[test]
fn escalated_warnings_exit_nonzero_and_mark_outputs() {
    let d = TempDir::new().unwrap();
    let cfg = audio_cfg("sr").replacen('{', r#"{"output": {"warnings_as_errors": true},"#, 1);
    let o = run(d.path(), &["audio-fr"], &cfg);
    assert!(!o.status.success());
    let text = std::fs::read_to_string(d.path().join("out/audio-fr.csv")).unwrap();
    assert!(text.contains("complete=false"));
}

#[test]
fn cr_screen_flags_modes() {
    let d = TempDir::new().unwrap();
    let o = run(d.path(), &["cr-screen"], r#"{"cr": {"modal_freqs_hz": [400, 2000, 5000]}}"#);
    assert!(o.status.success());
    let modes = column(&d.path().join("out/cr-screen.csv"), "mode_hz");
    assert_eq!(modes, vec![400.0, 2000.0, 5000.0]);
}

const SWEEP: &str = r#"{"optimizer": {
    "nsga": {"pop": 8, "generations": 3},
    "sweep": {"d_uc_m": [0.45], "f_u0_hz": [60000], "mode_m": [8], "config": ["half"], "r_p_m": [0.009], "r_h_m": [0.00075], "audio": false}}}"#;

#[test]
fn sweep_same_seed_is_bit_identical() {
    let a = TempDir::new().unwrap();
    let b = TempDir::new().unwrap();
    assert!(run(a.path(), &["sweep", "--seed", "7"], SWEEP).status.success());
    assert!(run(b.path(), &["sweep", "--seed", "7"], SWEEP).status.success());
    for name in ["sweep.csv", "sweep.json"] {
        let x = std::fs::read(a.path().join("out").join(name)).unwrap();
        let y = std::fs::read(b.path().join("out").join(name)).unwrap();
        assert_eq!(x, y, "{name}");
    }
    let text = std::fs::read_to_string(a.path().join("out/sweep.csv")).unwrap();
    assert!(text.contains("seed=7"));
}

#[test]
fn pareto_same_seed_is_bit_identical() {
    let cfg = r#"{"optimizer": {"nsga": {"pop": 8, "generations": 3, "seed": 3}, "design": {"config": "half"}}}"#;
    let a = TempDir::new().unwrap();
    let b = TempDir::new().unwrap();
    assert!(run(a.path(), &["pareto"], cfg).status.success());
    assert!(run(b.path(), &["pareto"], cfg).status.success());
    let x = std::fs::read(a.path().join("out/pareto.csv")).unwrap();
    assert_eq!(x, std::fs::read(b.path().join("out/pareto.csv")).unwrap());
    let f2 = column(&a.path().join("out/pareto.csv"), "f2_hz");
    assert!(!f2.is_empty());
}
