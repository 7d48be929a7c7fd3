//! End-to-end tests of the `hframes` binary: exit codes, artifact files,
//! manifests, and byte-level determinism.

use harmonic_frames::conference::ConferenceMatrix;
use harmonic_frames::cmatrix::ComplexMatrix;
use harmonic_frames::FusionFrame;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn binary() -> &'static str {
    env!("CARGO_BIN_EXE_hframes")
}

fn run_in(dir: &Path, args: &[&str]) -> Output {
    Command::new(binary())
        .args(args)
        .arg("--out-dir")
        .arg(dir)
        .output()
        .expect("binary runs")
}

fn temp_dir(tag: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("hframes-test-{tag}-{}", std::process::id()));
    let _ = std::fs::remove_dir_all(&dir);
    std::fs::create_dir_all(&dir).unwrap();
    dir
}

fn certificate(dir: &Path) -> serde_json::Value {
    serde_json::from_slice(&std::fs::read(dir.join("certificate.json")).unwrap()).unwrap()
}

#[test]
fn construct_full_support_q7_is_equiisoclinic() {
    let dir = temp_dir("construct-q7");
    let out = run_in(&dir, &["construct", "--family", "eitff-q-q-2", "--q", "7"]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let cert = certificate(&dir);
    assert_eq!(cert["is_equiisoclinic"], serde_json::json!(true));
    for name in ["frame.json", "gen.json", "certificate.json", "manifest.json"] {
        assert!(dir.join(name).exists(), "{name} missing");
    }
}

#[test]
fn construct_rank3_realified_is_real() {
    let dir = temp_dir("construct-11");
    let out = run_in(&dir, &["construct", "--family", "eitff-11-11-3", "--realify"]);
    assert!(out.status.success());
    let cert = certificate(&dir);
    assert_eq!(cert["is_real"], serde_json::json!(true));
    assert_eq!(cert["is_equiisoclinic"], serde_json::json!(true));
}

#[test]
fn construct_equichordal_family_q9_r4() {
    let dir = temp_dir("construct-q9r4");
    let out = run_in(&dir, &["construct", "--family", "ectff-qm1-q-r", "--q", "9", "--r", "4"]);
    assert!(out.status.success());
    let cert = certificate(&dir);
    assert_eq!(cert["is_equichordal"], serde_json::json!(true));
    assert_eq!(cert["is_equiisoclinic"], serde_json::json!(false));
}

#[test]
fn claim_mismatch_exits_three_but_writes_artifacts() {
    // an even second character cannot make the punctured family equi-isoclinic
    let dir = temp_dir("claim-mismatch");
    let out = run_in(
        &dir,
        &["construct", "--family", "eitff-qm1-q-2", "--q", "13", "--chi", "0,6"],
    );
    assert_eq!(out.status.code(), Some(3));
    let cert = certificate(&dir);
    assert_eq!(cert["is_equiisoclinic"], serde_json::json!(false));
    assert!(dir.join("manifest.json").exists(), "manifest written even on claim failure");
}

#[test]
fn construct_is_byte_deterministic() {
    let dir_a = temp_dir("det-a");
    let dir_b = temp_dir("det-b");
    for dir in [&dir_a, &dir_b] {
        let out = run_in(dir, &["construct", "--family", "eitff-qm1-q-2", "--q", "11"]);
        assert!(out.status.success());
    }
    for name in ["frame.json", "gen.json", "certificate.json"] {
        let a = std::fs::read(dir_a.join(name)).unwrap();
        let b = std::fs::read(dir_b.join(name)).unwrap();
        assert_eq!(a, b, "{name} differs between identical runs");
    }
}

#[test]
fn verify_reproduces_construct_certificate() {
    let dir = temp_dir("verify-same");
    let out = run_in(&dir, &["construct", "--family", "example-4-5-2"]);
    assert!(out.status.success());
    let verify_dir = temp_dir("verify-same-out");
    let input = dir.join("frame.json");
    let out = run_in(&verify_dir, &["verify", "--input", input.to_str().unwrap()]);
    assert!(out.status.success());
    assert_eq!(
        std::fs::read(dir.join("certificate.json")).unwrap(),
        std::fs::read(verify_dir.join("certificate.json")).unwrap(),
        "verify must emit the exact certificate construct produced"
    );
}

#[test]
fn verify_flags_perturbed_frame_without_failing() {
    let dir = temp_dir("verify-perturbed");
    let out = run_in(&dir, &["construct", "--family", "example-4-5-2"]);
    assert!(out.status.success());
    let mut frame: FusionFrame =
        serde_json::from_slice(&std::fs::read(dir.join("frame.json")).unwrap()).unwrap();
    // scale one column by 1.001
    let mut isometries = frame.isometries().to_vec();
    isometries[1] = isometries[1].scale_re(1.001);
    frame = FusionFrame::new(frame.ambient_dim(), isometries, frame.group().cloned()).unwrap();
    let path = dir.join("perturbed.json");
    std::fs::write(&path, serde_json::to_vec_pretty(&frame).unwrap()).unwrap();

    let verify_dir = temp_dir("verify-perturbed-out");
    let out = run_in(&verify_dir, &["verify", "--input", path.to_str().unwrap()]);
    assert!(out.status.success(), "analysis succeeds; classification lives in the certificate");
    let cert = certificate(&verify_dir);
    assert_eq!(cert["is_tight"], serde_json::json!(false));
}

#[test]
fn verify_rejects_malformed_and_empty_frames() {
    let dir = temp_dir("verify-bad");
    std::fs::write(dir.join("broken.json"), b"{ not json").unwrap();
    let out = run_in(&dir, &["verify", "--input", dir.join("broken.json").to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));

    // structurally valid JSON but zero subspaces
    std::fs::write(
        dir.join("empty.json"),
        serde_json::json!({"ambient_dim": 3, "isometries": []}).to_string(),
    )
    .unwrap();
    let out = run_in(&dir, &["verify", "--input", dir.join("empty.json").to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn naimark_complement_of_worked_example() {
    let dir = temp_dir("complement");
    let out = run_in(&dir, &["construct", "--family", "example-4-5-2"]);
    assert!(out.status.success());
    let comp_dir = temp_dir("complement-out");
    let out = run_in(
        &comp_dir,
        &["complement", "--kind", "naimark", "--input", dir.join("frame.json").to_str().unwrap()],
    );
    assert!(out.status.success());
    let cert = certificate(&comp_dir);
    assert_eq!(cert["ambient_dim"], serde_json::json!(6));
    assert_eq!(cert["num_subspaces"], serde_json::json!(5));
    assert_eq!(cert["is_equiisoclinic"], serde_json::json!(true));
}

#[test]
fn direct_sum_doubles_ranks() {
    let dir = temp_dir("dsum");
    let out = run_in(&dir, &["construct", "--family", "example-4-5-2"]);
    assert!(out.status.success());
    let frame = dir.join("frame.json");
    let sum_dir = temp_dir("dsum-out");
    let out = run_in(
        &sum_dir,
        &["directsum", "--inputs", frame.to_str().unwrap(), frame.to_str().unwrap()],
    );
    assert!(out.status.success());
    let cert = certificate(&sum_dir);
    assert_eq!(cert["ambient_dim"], serde_json::json!(8));
    assert_eq!(cert["ranks"], serde_json::json!([4, 4, 4, 4, 4]));
    assert_eq!(cert["is_equiisoclinic"], serde_json::json!(true));
}

#[test]
fn direct_sum_rejects_inconsistent_ratios() {
    // seven equiangular vectors in dimension 3 and their Naimark complement
    // in dimension 4 share N = 7 but have frame constants 7/3 vs 7/4
    let a = temp_dir("dsum-bad-a");
    let out = run_in(
        &a,
        &["construct", "--family", "harmonic-etf", "--group", "7", "--diff-set", "1,2,4"],
    );
    assert!(out.status.success());
    let b = temp_dir("dsum-bad-b");
    let out = run_in(
        &b,
        &["complement", "--kind", "naimark", "--input", a.join("frame.json").to_str().unwrap()],
    );
    assert!(out.status.success());
    let out_dir = temp_dir("dsum-bad-out");
    let out = run_in(
        &out_dir,
        &[
            "directsum",
            "--inputs",
            a.join("frame.json").to_str().unwrap(),
            b.join("frame.json").to_str().unwrap(),
        ],
    );
    assert_eq!(out.status.code(), Some(2));
    let stderr = String::from_utf8_lossy(&out.stderr);
    assert!(stderr.contains("consistency"), "error names the violated condition: {stderr}");
}

#[test]
fn gauss_sum_prints_quadratic_value() {
    let dir = temp_dir("gauss");
    let out = run_in(&dir, &["gauss-sum", "--p", "11", "--k", "1", "--chi", "5", "--gamma", "1"]);
    assert!(out.status.success());
    let stdout = String::from_utf8_lossy(&out.stdout);
    assert!(stdout.contains("-3.316624790355"), "got {stdout:?}");
    let record: serde_json::Value =
        serde_json::from_slice(&std::fs::read(dir.join("gauss_sum.json")).unwrap()).unwrap();
    let im = record["im"].as_f64().unwrap();
    assert!((im + (11.0f64).sqrt()).abs() < 1e-10);
    assert!(record["re"].as_f64().unwrap().abs() < 1e-12);
}

#[test]
fn conference_output_validates() {
    let dir = temp_dir("conference");
    let out = run_in(&dir, &["conference", "--p", "5", "--k", "1", "--eps", "+1"]);
    assert!(out.status.success());
    let conf: ConferenceMatrix =
        serde_json::from_slice(&std::fs::read(dir.join("conference.json")).unwrap()).unwrap();
    assert_eq!(conf.size(), 6);
    assert_eq!(conf.epsilon, Some(1));
    // C*C = 5I and realness, checked directly on the parsed matrix
    let target = ComplexMatrix::identity(6).scale_re(5.0);
    let dev = (&(&conf.matrix.adjoint() * &conf.matrix) - &target).frobenius_norm();
    assert!(dev < 1e-9);
    assert!(conf.matrix.max_imag_entry() < 1e-12);

    let sig_dir = temp_dir("conference-sig");
    let out = run_in(
        &sig_dir,
        &["signature", "--from-core", dir.join("core.json").to_str().unwrap()],
    );
    assert!(out.status.success());
    let cert = certificate(&sig_dir);
    assert_eq!(cert["ambient_dim"], serde_json::json!(5));
    assert_eq!(cert["is_equiisoclinic"], serde_json::json!(true));
}

#[test]
fn manifest_digests_match_artifacts() {
    use sha2::{Digest, Sha256};
    let dir = temp_dir("manifest");
    let out = run_in(&dir, &["construct", "--family", "eitff-q-q-2", "--q", "5"]);
    assert!(out.status.success());
    let manifest: serde_json::Value =
        serde_json::from_slice(&std::fs::read(dir.join("manifest.json")).unwrap()).unwrap();
    let outputs = manifest["outputs"].as_array().unwrap();
    assert!(!outputs.is_empty());
    for entry in outputs {
        let path = entry["path"].as_str().unwrap();
        let bytes = std::fs::read(path).unwrap();
        let digest = Sha256::digest(&bytes);
        let hex: String = digest.iter().map(|b| format!("{b:02x}")).collect();
        assert_eq!(hex, entry["sha256"].as_str().unwrap(), "digest mismatch for {path}");
    }
    assert_eq!(manifest["command"], serde_json::json!("construct"));
    assert_eq!(manifest["tolerance"], serde_json::json!(1e-9));
}

#[test]
fn csv_export_writes_synthesis_parts() {
    let dir = temp_dir("csv");
    let out = run_in(
        &dir,
        &["construct", "--family", "example-4-5-2", "--format", "csv"],
    );
    assert!(out.status.success());
    let re = std::fs::read_to_string(dir.join("frame_re.csv")).unwrap();
    assert_eq!(re.lines().count(), 4, "one line per ambient dimension");
    assert_eq!(re.lines().next().unwrap().split(',').count(), 10, "sum of ranks columns");
    assert!(dir.join("frame_im.csv").exists());
}

#[test]
fn verify_reports_block_circulant_structure_with_group_flag() {
    let dir = temp_dir("verify-group");
    assert!(run_in(&dir, &["construct", "--family", "example-4-5-2"]).status.success());
    // strip the group tag by rebuilding the frame without it
    let frame: FusionFrame =
        serde_json::from_slice(&std::fs::read(dir.join("frame.json")).unwrap()).unwrap();
    let untagged =
        FusionFrame::new(frame.ambient_dim(), frame.isometries().to_vec(), None).unwrap();
    let path = dir.join("untagged.json");
    std::fs::write(&path, serde_json::to_vec_pretty(&untagged).unwrap()).unwrap();

    let out_dir = temp_dir("verify-group-out");
    let out = run_in(
        &out_dir,
        &["verify", "--input", path.to_str().unwrap(), "--group", "5"],
    );
    assert!(out.status.success());
    let stdout = String::from_utf8_lossy(&out.stdout);
    assert!(stdout.contains("block-circulant: true"), "got {stdout:?}");
}

#[test]
fn construct_accepts_spec_file() {
    let dir = temp_dir("spec-file");
    let spec = serde_json::json!({
        "family": "eitff-q-q-2",
        "p": 5,
        "k": 1,
    });
    let path = dir.join("family.json");
    std::fs::write(&path, spec.to_string()).unwrap();
    let out = run_in(&dir, &["construct", "--spec", path.to_str().unwrap()]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let cert = certificate(&dir);
    assert_eq!(cert["ambient_dim"], serde_json::json!(5));
    assert_eq!(cert["is_equiisoclinic"], serde_json::json!(true));
}
