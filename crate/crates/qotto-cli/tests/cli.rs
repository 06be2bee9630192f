//! End-to-end tests of the command-line surface.

use std::process::{Command, Output};

fn qotto(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_qotto"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(args: &[&str]) -> String {
    let out = qotto(args);
    assert!(
        out.status.success(),
        "command {args:?} failed: {}",
        String::from_utf8_lossy(&out.stderr)
    );
    String::from_utf8(out.stdout).unwrap()
}

fn csv_rows(text: &str) -> Vec<Vec<String>> {
    text.lines().skip(1).map(|l| l.split(',').map(str::to_string).collect()).collect()
}

#[test]
fn classify_reports_regime_cycles_work_and_entropy() {
    let swap = stdout(&["classify", "--omega-b", "0.3"]);
    assert!(swap.contains("regime: Swap"));
    assert!(swap.contains("cycles: (24)(37)(68)"));
    let work: f64 = field(&swap, "mean_work").parse().unwrap();
    assert!(work > 0.0);

    let double = stdout(&["classify", "--omega-b", "0.75"]);
    assert!(double.contains("regime: DoubleSwap"));
    assert!(double.contains("cycles: (236874)"));

    let passive = stdout(&["classify", "--beta-a", "1", "--beta-b", "1"]);
    assert!(passive.contains("regime: Passive"));
    assert_eq!(field(&passive, "mean_work").parse::<f64>().unwrap(), 0.0);

    // Both sorts equal the swap in this outer poset, so their product is
    // the identity and the state is passive.
    let outer = stdout(&["classify", "--omega-b", "3", "--beta-a", "0.1", "--beta-b", "4"]);
    assert!(outer.contains("regime: Passive"));
}

fn field<'t>(text: &'t str, name: &str) -> &'t str {
    text.lines()
        .find_map(|l| l.strip_prefix(&format!("{name}: ")))
        .unwrap_or_else(|| panic!("missing field {name} in {text}"))
}

#[test]
fn distribution_shapes_and_format() {
    let identity = stdout(&["distribution", "--unitary", "identity"]);
    assert_eq!(identity.lines().next().unwrap(), "w,delta_e_a,probability");
    let rows = csv_rows(&identity);
    assert_eq!(rows.len(), 1);
    assert_eq!(rows[0][0].parse::<f64>().unwrap(), 0.0);
    assert!((rows[0][2].parse::<f64>().unwrap() - 1.0).abs() < 1e-12);

    // Defaults give thermal products 0.5 and 2: the swap marginal has five
    // work values, each with a single delta_e_a.
    let swap = stdout(&["distribution", "--unitary", "u1"]);
    let rows = csv_rows(&swap);
    assert_eq!(rows.len(), 5);
    let works: Vec<f64> = rows.iter().map(|r| r[0].parse().unwrap()).collect();
    assert!(works.windows(2).all(|w| w[0] < w[1]), "rows sorted ascending");

    let double = stdout(&["distribution", "--unitary", "u3", "--omega-b", "0.75"]);
    assert_eq!(csv_rows(&double).len(), 7);

    // A cycles:<text> selector reproduces the named stroke bit for bit.
    let custom = stdout(&["distribution", "--unitary", "cycles:(24)(37)(68)"]);
    assert_eq!(custom, swap);
}

#[test]
fn csv_is_byte_deterministic_and_round_trips() {
    let args = [
        "sweep",
        "--sweep",
        "omega-b",
        "--from",
        "0.05",
        "--to",
        "2",
        "--steps",
        "25",
        "--unitary",
        "auto",
    ];
    let first = stdout(&args);
    let second = stdout(&args);
    assert_eq!(first, second);
    assert!(first.ends_with('\n') && !first.contains('\r'));

    // Reparsing the printed doubles and recomputing the derived column
    // reproduces the printed snr exactly (17 significant digits round-trip).
    for row in csv_rows(&first) {
        let mean: f64 = row[2].parse().unwrap();
        let var: f64 = row[3].parse().unwrap();
        let snr: f64 = row[5].parse().unwrap();
        let recomputed = mean * mean / var;
        assert!(
            recomputed == snr || (recomputed.is_nan() && snr.is_nan()),
            "snr mismatch: {recomputed} vs {snr}"
        );
    }
}

#[test]
fn sweep_traverses_the_reference_regimes_and_matches_classify() {
    let sweep = stdout(&[
        "sweep",
        "--sweep",
        "omega-b",
        "--from",
        "0.05",
        "--to",
        "2",
        "--steps",
        "40",
        "--unitary",
        "auto",
    ]);
    let rows = csv_rows(&sweep);
    let mut sequence: Vec<String> = Vec::new();
    for row in &rows {
        if sequence.last() != Some(&row[1]) {
            sequence.push(row[1].clone());
        }
    }
    let interior: Vec<&str> =
        sequence.iter().map(String::as_str).filter(|r| *r != "Passive").collect();
    assert_eq!(
        interior,
        vec!["IdleSwapB", "DoubleSwap", "Swap", "DoubleSwap", "IdleSwapA"]
    );

    // The auto selector agrees with classify at every grid point.
    for row in rows.iter().step_by(7) {
        let omega_b = &row[0];
        let classify = stdout(&["classify", "--omega-b", omega_b]);
        assert_eq!(field(&classify, "regime"), row[1]);
        let work: f64 = field(&classify, "mean_work").parse().unwrap();
        let swept: f64 = row[2].parse().unwrap();
        assert!((work - swept).abs() <= 1e-15 * work.abs().max(1.0));
    }
}

#[test]
fn single_step_sweep_equals_classify() {
    let sweep = stdout(&[
        "sweep", "--sweep", "omega-b", "--from", "0.75", "--to", "0.75", "--steps", "1",
    ]);
    let row = &csv_rows(&sweep)[0];
    let classify = stdout(&["classify", "--omega-b", "0.75"]);
    assert_eq!(field(&classify, "regime"), row[1]);
    assert_eq!(field(&classify, "mean_work"), row[2]);
    assert_eq!(field(&classify, "mean_entropy"), row[4]);
}

#[test]
fn beta_b_omega_b_sweep_pins_the_thermal_product() {
    let sweep = stdout(&[
        "sweep",
        "--sweep",
        "beta-b-omega-b",
        "--from",
        "0.1",
        "--to",
        "10",
        "--steps",
        "3",
        "--scale",
        "log",
        "--omega-b",
        "0.5",
        "--beta-a",
        "0.002",
        "--unitary",
        "u1",
    ]);
    let rows = csv_rows(&sweep);
    let values: Vec<f64> = rows.iter().map(|r| r[0].parse().unwrap()).collect();
    assert!((values[1] - 1.0).abs() < 1e-12, "log spacing: {values:?}");
    assert_eq!(rows[0][1], "Swap");
}

#[test]
fn regime_map_grid_and_ratio_behavior() {
    let map = stdout(&[
        "regime-map",
        "--beta-ratio",
        "1",
        "--omega-b-from",
        "0.1",
        "--omega-b-to",
        "2.2",
        "--omega-b-steps",
        "20",
        "--beta-b-from",
        "2",
        "--beta-b-to",
        "8",
        "--beta-b-steps",
        "3",
    ]);
    assert_eq!(map.lines().next().unwrap(), "omega_b,beta_param,regime");
    let rows = csv_rows(&map);
    assert_eq!(rows.len(), 60);
    assert!(rows.iter().all(|r| r[2] == "Passive"));
}

#[test]
fn verify_ft_passes_for_each_stroke_and_is_exact_for_identity() {
    for unitary in ["u1", "u3"] {
        let out = qotto(&["verify-ft", "--unitary", unitary, "--samples", "50000"]);
        assert!(out.status.success(), "{unitary} failed");
        assert!(String::from_utf8_lossy(&out.stdout).contains("PASS"));
    }
    let identity = stdout(&["verify-ft", "--unitary", "identity", "--samples", "10000"]);
    assert!(identity.contains("detailed_ft_max_rel_error: 0.0000000000000000e0"));
    assert!(identity.contains("integral_ft_residual: 0.0000000000000000e0"));
}

#[test]
fn error_paths_use_the_documented_exit_codes() {
    // Bad arguments: code 2 (both clap-level and domain-level).
    assert_eq!(qotto(&["classify", "--omega-a", "0"]).status.code(), Some(2));
    assert_eq!(qotto(&["no-such-command"]).status.code(), Some(2));
    assert_eq!(qotto(&["verify-ft", "--samples", "10"]).status.code(), Some(2));
    assert_eq!(
        qotto(&["sweep", "--sweep", "omega-b", "--from", "1", "--to", "2", "--steps", "0"])
            .status
            .code(),
        Some(2)
    );
    assert_eq!(
        qotto(&["distribution", "--unitary", "cycles:(19)(92)"]).status.code(),
        Some(2)
    );
    assert_eq!(
        qotto(&["distribution", "--unitary", "u1", "--dim-a", "4"]).status.code(),
        Some(2)
    );
}

#[test]
fn output_flag_writes_the_same_bytes_as_stdout() {
    let dir = std::env::temp_dir().join("qotto-cli-test");
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join("dist.csv");
    let args = ["distribution", "--unitary", "u2", "--omega-b", "0.2"];
    let piped = stdout(&args);
    let mut with_file: Vec<&str> = args.to_vec();
    let path_str = path.to_str().unwrap();
    with_file.extend_from_slice(&["--output", path_str]);
    stdout(&with_file);
    assert_eq!(std::fs::read_to_string(&path).unwrap(), piped);
}
