use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_ncg-spectra"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn run_in(dir: &Path, args: &[&str]) -> Output {
    let mut all = args.to_vec();
    let out = dir.to_str().unwrap();
    all.extend(["--out", out]);
    run(&all)
}

fn json(path: &Path) -> Value {
    serde_json::from_str(&fs::read_to_string(path).unwrap()).unwrap()
}

fn csv_rows(path: &Path) -> Vec<Vec<String>> {
    fs::read_to_string(path)
        .unwrap()
        .lines()
        .skip(1)
        .map(|l| l.split(',').map(str::to_string).collect())
        .collect()
}

fn assert_manifest_lists_outputs(dir: &Path) {
    let m = json(&dir.join("manifest.json"));
    let listed: Vec<&str> = m["outputs"].as_array().unwrap().iter().map(|v| v.as_str().unwrap()).collect();
    for entry in fs::read_dir(dir).unwrap() {
        let name = entry.unwrap().file_name().into_string().unwrap();
        assert!(listed.contains(&name.as_str()), "{name} missing from manifest");
    }
    assert!(m["version"].is_string() && m["wall_clock_seconds"].is_number());
}

#[test]
fn minus_two_cut_equilibrium() {
    let dir = tempfile::tempdir().unwrap();
    let o = run_in(dir.path(), &["equilibrium", "--model", "01", "--g", "-7"]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let s = json(&dir.path().join("solution.json"));
    assert_eq!(s["chosen"]["ansatz"], "sym2_cut");
    let edges: Vec<f64> = s["chosen"]["support"].as_array().unwrap().iter().map(|v| v.as_f64().unwrap()).collect();
    let a = (7.0 - 4.0 * 2f64.sqrt()).sqrt() / (2.0 * 2f64.sqrt());
    let b = (7.0 + 4.0 * 2f64.sqrt()).sqrt() / (2.0 * 2f64.sqrt());
    assert!((edges[2] - a).abs() < 1e-12 && (edges[3] - b).abs() < 1e-12);
    assert!((edges[0] + b).abs() < 1e-12 && (edges[1] + a).abs() < 1e-12);
    assert!((s["chosen"]["moments"]["m2"].as_f64().unwrap() - 0.875).abs() < 1e-12);
    let rows = csv_rows(&dir.path().join("density.csv"));
    assert_eq!(rows.len(), 1001);
    // 17 significant digits in scientific notation
    assert!(rows[5][0].contains('e') && rows[5][0].split('e').next().unwrap().len() >= 18);
    assert_manifest_lists_outputs(dir.path());
}

#[test]
fn plus_equilibrium_selects_by_free_energy() {
    let dir = tempfile::tempdir().unwrap();
    let o = run_in(dir.path(), &["equilibrium", "--model", "10", "--g", "-3"]);
    assert!(o.status.success());
    assert_eq!(json(&dir.path().join("solution.json"))["chosen"]["ansatz"], "sym1_cut");

    let dir = tempfile::tempdir().unwrap();
    let o = run_in(dir.path(), &["equilibrium", "--model", "10", "--g", "-4"]);
    assert!(o.status.success());
    let s = json(&dir.path().join("solution.json"));
    assert_eq!(s["chosen"]["ansatz"], "asym2_cut");
    assert!(s["chosen"]["moments"]["m1"].as_f64().unwrap() > 0.0);
    let mean = csv_rows(&dir.path().join("mean_density.csv"));
    let n = mean.len();
    for k in [10, 200, 400] {
        let (l, r) = (&mean[k], &mean[n - 1 - k]);
        let (x, y): (f64, f64) = (l[1].parse().unwrap(), r[1].parse().unwrap());
        assert!((x - y).abs() < 1e-12);
    }
    assert_manifest_lists_outputs(dir.path());
}

#[test]
fn fixed_ansatz_outside_its_domain_is_a_model_error() {
    let dir = tempfile::tempdir().unwrap();
    let o = run_in(dir.path(), &["equilibrium", "--model", "01", "--g", "-3", "--ansatz", "sym2"]);
    assert_eq!(o.status.code(), Some(4));
    let o = run_in(dir.path(), &["equilibrium", "--model", "01", "--g", "-3", "--ansatz", "sym5"]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn minus_scan_is_continuous_across_branch_point() {
    let dir = tempfile::tempdir().unwrap();
    let o = run_in(dir.path(), &["scan", "--model", "01", "--from", "-7", "--to", "-4.5", "--step", "0.05"]);
    assert!(o.status.success());
    let rows = csv_rows(&dir.path().join("phase.csv"));
    let chosen: Vec<&Vec<String>> = rows.iter().filter(|r| r[11] == "true").collect();
    assert_eq!(chosen.len(), 51);
    let mut prev: Option<f64> = None;
    for r in chosen {
        let g: f64 = r[0].parse().unwrap();
        let m2: f64 = r[7].parse().unwrap();
        if g < -4.0 * 2f64.sqrt() {
            assert!((m2 + g / 8.0).abs() < 1e-12);
            assert_eq!(r[1], "sym2");
        } else {
            let b: f64 = r[5].parse().unwrap();
            assert!((m2 - (b * b / 4.0 + b.powi(6) / 8.0)).abs() < 1e-12);
            assert!(r[2].is_empty() && r[3].is_empty());
        }
        if let Some(p) = prev {
            assert!((m2 - p).abs() < 0.01);
        }
        prev = Some(m2);
    }
}

#[test]
fn plus_scan_moments_jump_at_transition() {
    let dir = tempfile::tempdir().unwrap();
    let o = run_in(dir.path(), &["scan", "--model", "10", "--from", "-3.4", "--to", "-3.0", "--step", "0.02"]);
    assert!(o.status.success());
    let rows = csv_rows(&dir.path().join("phase.csv"));
    let chosen: Vec<(f64, String, f64)> = rows
        .iter()
        .filter(|r| r[11] == "true")
        .map(|r| (r[0].parse().unwrap(), r[1].clone(), r[6].parse().unwrap()))
        .collect();
    let k = chosen.windows(2).position(|w| w[0].1 != w[1].1).expect("selected branch changes");
    assert_eq!(chosen[k].1, "asym2");
    assert_eq!(chosen[k + 1].1, "sym1");
    assert!((-3.20..=-3.16).contains(&chosen[k].0));
    assert!((chosen[k].2 - chosen[k + 1].2).abs() > 0.1);
}

#[test]
fn zero_step_is_a_usage_error() {
    let dir = tempfile::tempdir().unwrap();
    let o = run_in(dir.path(), &["scan", "--model", "01", "--from", "-7", "--to", "-4", "--step", "0"]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn critical_couplings() {
    let dir = tempfile::tempdir().unwrap();
    let o = run_in(dir.path(), &["critical", "--model", "01"]);
    assert!(o.status.success());
    let g: f64 = String::from_utf8(o.stdout).unwrap().trim().parse().unwrap();
    assert!((g + 4.0 * 2f64.sqrt()).abs() < 1e-9);

    let o = run_in(dir.path(), &["critical", "--model", "10", "--bracket", "-3.4", "-3.0"]);
    assert!(o.status.success());
    let c = json(&dir.path().join("critical.json"));
    let g = c["g_critical"].as_f64().unwrap();
    assert!((-3.20..=-3.17).contains(&g));

    let o = run_in(dir.path(), &["critical", "--model", "01", "--bracket", "-3", "-1"]);
    assert_eq!(o.status.code(), Some(4));
    assert!(String::from_utf8_lossy(&o.stderr).contains("no sign change"));
}

#[test]
fn mc_outputs_are_reproducible() {
    let a = tempfile::tempdir().unwrap();
    let b = tempfile::tempdir().unwrap();
    let args = ["mc", "--model", "01", "--g", "-7", "--N", "24", "--sweeps", "600", "--seed", "9"];
    assert!(run_in(a.path(), &args).status.success());
    assert!(run_in(b.path(), &args).status.success());
    for f in ["histogram.csv", "trace.csv", "checkpoint.bin"] {
        assert_eq!(fs::read(a.path().join(f)).unwrap(), fs::read(b.path().join(f)).unwrap(), "{f}");
    }
    let header = fs::read_to_string(a.path().join("trace.csv")).unwrap();
    assert!(header.starts_with("sweep,M,m2,energy,acceptance\n"));
    let bin = fs::read(a.path().join("checkpoint.bin")).unwrap();
    assert_eq!(u64::from_le_bytes(bin[..8].try_into().unwrap()), 24);
    assert_eq!(bin.len(), 8 + 24 * 8);
    let meta = fs::read_to_string(a.path().join("checkpoint.bin.meta")).unwrap();
    assert!(meta.contains("model = 01") && meta.contains("seed = 9"));
    let m = json(&a.path().join("manifest.json"));
    assert_eq!(m["seeds"][0], 9);
    assert_manifest_lists_outputs(a.path());

    // resume from the checkpoint
    let c = tempfile::tempdir().unwrap();
    let init = format!("file:{}", a.path().join("checkpoint.bin").display());
    let o = run_in(c.path(), &["mc", "--model", "01", "--g", "-7", "--N", "24", "--sweeps", "100", "--init", &init]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
}

#[test]
fn mc_config_errors_are_usage_errors() {
    let dir = tempfile::tempdir().unwrap();
    let o = run_in(dir.path(), &["mc", "--model", "10", "--g", "-3", "--N", "1"]);
    assert_eq!(o.status.code(), Some(2));
    let o = run_in(dir.path(), &["mc", "--model", "10", "--N", "8", "--sweeps", "10", "--burnin", "10"]);
    assert_eq!(o.status.code(), Some(2));
    let o = run_in(dir.path(), &["mc", "--model", "10", "--N", "8", "--init", "warm"]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn gue_run_from_theory() {
    let dir = tempfile::tempdir().unwrap();
    let o = run_in(dir.path(), &["mc", "--model", "gue", "--N", "32", "--sweeps", "3000", "--init", "from-theory"]);
    assert!(o.status.success());
    let s = json(&dir.path().join("summary.json"));
    assert!((s["mean_m2"].as_f64().unwrap() - 1.0).abs() < 0.05);
    assert!(s["max_energy_drift"].as_f64().unwrap() < 1e-9);
}

#[test]
fn compare_identical_and_mismatched_grids() {
    let dir = tempfile::tempdir().unwrap();
    assert!(run_in(dir.path(), &["equilibrium", "--model", "01", "--g", "-7", "--points", "2001"]).status.success());
    let theory = dir.path().join("density.csv");
    let coarse = tempfile::tempdir().unwrap();
    assert!(run_in(coarse.path(), &["equilibrium", "--model", "01", "--g", "-7", "--points", "301"]).status.success());

    let out = tempfile::tempdir().unwrap();
    let t = theory.to_str().unwrap();
    assert!(run_in(out.path(), &["compare", "--theory", t, "--mc", t]).status.success());
    let c = json(&out.path().join("compare.json"));
    assert_eq!(c["l1"], 0.0);
    assert_eq!(c["sup"], 0.0);
    assert!(c["moment_differences"].as_array().unwrap().iter().all(|v| v == 0.0));
    assert_eq!(c["resampled"], false);

    let m = coarse.path().join("density.csv");
    assert!(run_in(out.path(), &["compare", "--theory", t, "--mc", m.to_str().unwrap()]).status.success());
    let c = json(&out.path().join("compare.json"));
    assert_eq!(c["resampled"], true);
    assert!(c["note"].as_str().unwrap().contains("interpolation"));
    assert!(c["l1"].as_f64().unwrap() < 0.02);
}

#[test]
fn mc_histogram_matches_theory() {
    let dir = tempfile::tempdir().unwrap();
    let th = tempfile::tempdir().unwrap();
    assert!(run_in(th.path(), &["equilibrium", "--model", "01", "--g", "-7", "--points", "4001"]).status.success());
    let o = run_in(dir.path(), &["mc", "--model", "01", "--g", "-7", "--N", "64", "--sweeps", "20000", "--init", "from-theory"]);
    assert!(o.status.success());
    let out = tempfile::tempdir().unwrap();
    let t = th.path().join("density.csv");
    let h = dir.path().join("histogram.csv");
    assert!(run_in(out.path(), &["compare", "--theory", t.to_str().unwrap(), "--mc", h.to_str().unwrap()]).status.success());
    let c = json(&out.path().join("compare.json"));
    assert!(c["l1"].as_f64().unwrap() < 0.1, "{}", c["l1"]);
}
