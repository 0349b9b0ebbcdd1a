//! End-to-end checks of the `vpt` binary: exit-code contract, fixed
//! CSV shapes, determinism, and output-path resolution.

use std::path::PathBuf;
use std::process::{Command, Output};

fn vpt(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_vpt"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout_of(args: &[&str]) -> String {
    let out = vpt(args);
    assert!(
        out.status.success(),
        "vpt {args:?} failed: {}",
        String::from_utf8_lossy(&out.stderr)
    );
    String::from_utf8(out.stdout).expect("utf-8 output")
}

#[test]
fn usage_errors_exit_one() {
    for args in [
        &[][..],
        &["bogus"][..],
        &["psi", "--order", "3", "--g", "0.5"][..],
        &["msd"][..], // missing required --g
        &["series", "--unknown-flag"][..],
    ] {
        let out = vpt(args);
        assert_eq!(
            out.status.code(),
            Some(1),
            "vpt {args:?} should be a usage error"
        );
    }
}

#[test]
fn help_exits_zero() {
    let out = vpt(&["--help"]);
    assert_eq!(out.status.code(), Some(0));
    let text = String::from_utf8_lossy(&out.stdout);
    assert!(text.contains("omega"), "help lists subcommands");
}

#[test]
fn divergent_branch_exits_two() {
    // Seeding the smallest frequency branch at second order follows a
    // trial frequency too small to bind the state; the amplitude
    // normalization overflows and the run must refuse.
    let out = vpt(&[
        "psi",
        "--order",
        "2",
        "--g",
        "0.5",
        "--x-max",
        "4",
        "--points",
        "201",
        "--seed-branch",
        "smallest",
    ]);
    assert_eq!(out.status.code(), Some(2));
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.contains("vpt:"), "diagnostic goes to stderr: {err}");
}

#[test]
fn series_table_carries_published_rows() {
    let text = stdout_of(&["series", "--order", "2"]);
    // Bracket-convention rows with dimensional exponents.
    assert!(text.contains("series,g_order,x_power,num,den,hbar_exp,mass_exp,omega_exp"));
    assert!(
        text.contains("psi,2,8,1,16,0,0,-2"),
        "missing (g^2, x^8) row:\n{text}"
    );
    assert!(text.contains("psi,2,0,-1559,256,4,-4,-6"));
    assert!(text.contains("rho,2,0,-205,16,4,-4,-6"));
    assert!(text.contains("energy,2,0,-21,8,3,-4,-5"));
    assert!(text.contains("normalization residuals: order g: 0, order g^2: 0"));
}

#[test]
fn diagrams_reports_pairing_totals() {
    let text = stdout_of(&["diagrams", "--order", "2"]);
    assert!(text.contains("# pairings: 10"));
    assert!(text.contains("# pairings: 764"));
    assert!(text.contains("# connected multiplicities: 3,6,1"));
    assert!(text.contains("72,24,144,96,96,144,72,16"));
    assert!(text.contains("derivation log"));
}

#[test]
fn identical_runs_are_bit_stable() {
    // Two couplings exercise the parallel sweep; the writes must still
    // land in argument order with identical bytes.
    let args = &[
        "psi", "--order", "2", "--g", "0.1", "--g", "0.5", "--x-max", "4", "--points", "201",
    ];
    assert_eq!(vpt(args).stdout, vpt(args).stdout);
}

#[test]
fn peak_height_grows_with_coupling() {
    // Stronger quartic confinement squeezes the state: the value at the
    // origin must increase along the sweep.
    let text = stdout_of(&[
        "psi", "--order", "2", "--g", "0.1", "--g", "0.5", "--g", "50", "--x-max", "6", "--points",
        "601",
    ]);
    let peaks: Vec<f64> = text
        .lines()
        .filter(|l| l.split(',').nth(1) == Some("0.00000000000e0"))
        .map(|l| l.split(',').nth(2).unwrap().parse().unwrap())
        .collect();
    assert_eq!(peaks.len(), 3, "one origin sample per coupling:\n{text}");
    assert!(
        peaks[0] < peaks[1] && peaks[1] < peaks[2],
        "peaks not ordered: {peaks:?}"
    );
}

#[test]
fn omega_profile_labels_root_kinds() {
    let text = stdout_of(&[
        "omega", "--order", "2", "--g", "0.5", "--x-max", "4", "--points", "41",
    ]);
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("g,x,omega,kind,branch_id"));
    for line in lines {
        let kind = line.split(',').nth(3).expect("kind column");
        assert!(
            kind == "extremum" || kind == "turning_point",
            "unexpected kind label {kind}"
        );
    }
}

#[test]
fn exact_energy_matches_reference_value() {
    let text = stdout_of(&["exact", "--g", "0.5", "--points", "4001"]);
    let energy_line = text
        .lines()
        .find(|l| l.starts_with("# g=5.00000000000e-1 energy="))
        .expect("energy comment line");
    let energy: f64 = energy_line.rsplit('=').next().unwrap().parse().unwrap();
    assert!(
        (energy - 0.696175820758).abs() < 1e-9,
        "ground energy {energy} at g = 1/2"
    );
}

#[test]
fn msd_reports_second_order_improvement() {
    let text = stdout_of(&["msd", "--g", "0.1", "--g", "0.5", "--g", "50"]);
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("g,d1,d2"));
    let mut rows = 0;
    for line in lines {
        let cols: Vec<f64> = line.split(',').map(|c| c.parse().unwrap()).collect();
        assert!(cols[2] < cols[1], "D2 not below D1 on row {line}");
        rows += 1;
    }
    assert_eq!(rows, 3);
}

#[test]
fn out_flag_resolves_under_out_dir() {
    let dir = std::env::temp_dir().join(format!("vpt-cli-test-{}", std::process::id()));
    let out = Command::new(env!("CARGO_BIN_EXE_vpt"))
        .args(["series", "--out", "tables/series.csv"])
        .env("VPT_OUT_DIR", &dir)
        .output()
        .expect("binary runs");
    assert!(out.status.success());
    assert!(out.stdout.is_empty(), "file runs keep stdout quiet");
    let written = PathBuf::from(&dir).join("tables/series.csv");
    let text = std::fs::read_to_string(&written).expect("output file exists");
    assert!(text.contains("psi,2,8,1,16,0,0,-2"));
    std::fs::remove_dir_all(&dir).expect("cleanup");
}
