use std::path::Path;
use std::process::Command;

use kitaev_cli::{
    compute_scan, read_csv, read_table, run_compare, run_scan, write_table, CliError, Parity, ScanAxis, ScanRange,
    ScanSpec, Table,
};
use kitaev_core::entropy::EntropyMethod;
use kitaev_core::ChainParams;
use proptest::prelude::*;

fn kitaev(args: &[&str]) -> std::process::Output {
    Command::new(env!("CARGO_BIN_EXE_kitaev")).args(args).output().expect("binary runs")
}

fn block_scan(n: usize, jy: f64, h: f64, from: f64, to: f64, step: f64, parity: Parity) -> ScanSpec {
    ScanSpec {
        axis: ScanAxis::BlockLen,
        params: ChainParams::new(n, 1.0, jy, h).unwrap(),
        range: ScanRange::Stepped { start: from, stop: to, step },
        parity,
        block_len: None,
        method: EntropyMethod::Correlation,
    }
}

#[test]
fn block_scan_shows_even_odd_alternation() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("scan.csv");
    let rows = run_scan(&block_scan(200, 0.8, 0.0, 2.0, 100.0, 1.0, Parity::All), &path).unwrap();
    assert_eq!(rows.len(), 99);
    let t = read_csv(&path).unwrap();
    assert_eq!(t.header, vec!["block_len", "entropy_bits"]);
    assert_eq!(t.rows.len(), 99);
    let e = t.column("entropy_bits").unwrap();
    // second differences change sign with every step
    let curvature: Vec<f64> = e.windows(3).map(|w| w[1] - 0.5 * (w[0] + w[2])).collect();
    for (i, w) in curvature.windows(2).enumerate() {
        assert!(w[0] * w[1] < 0.0, "no alternation at L = {}", i + 3);
    }
}

#[test]
fn identical_runs_are_byte_identical() {
    let dir = tempfile::tempdir().unwrap();
    let spec = block_scan(120, 0.8, 0.3, 1.0, 60.0, 1.0, Parity::All);
    let (a, b) = (dir.path().join("a.csv"), dir.path().join("b.csv"));
    run_scan(&spec, &a).unwrap();
    run_scan(&spec, &b).unwrap();
    assert_eq!(std::fs::read(&a).unwrap(), std::fs::read(&b).unwrap());

    let args =
        ["scan", "-n", "40", "--axis", "h_field", "--from", "-1", "--to", "1", "--step", "0.25", "--block-size", "10"];
    let (x, y) = (kitaev(&args), kitaev(&args));
    assert!(x.status.success());
    assert_eq!(x.stdout, y.stdout);
    assert!(x.stdout.ends_with(b"\n") && !x.stdout.contains(&b'\r'));
}

#[test]
fn area_law_differences_saturate() {
    let rows = compute_scan(&block_scan(1000, 1.0, 0.5, 20.0, 200.0, 2.0, Parity::Even)).unwrap();
    let diffs: Vec<f64> = rows.windows(2).map(|w| (w[1].entropy_bits - w[0].entropy_bits).abs()).collect();
    // monotone until the differences reach roundoff
    for w in diffs.windows(2) {
        if w[0] > 1e-11 {
            assert!(w[1] <= w[0], "{w:?}");
        }
    }
    assert!(diffs.last().unwrap() < &1e-4);
}

#[test]
fn h_scan_peaks_at_zero_field() {
    let spec = ScanSpec {
        axis: ScanAxis::HField,
        params: ChainParams::new(200, 1.0, 1.0, 0.0).unwrap(),
        range: ScanRange::Stepped { start: -2.0, stop: 2.0, step: 0.05 },
        parity: Parity::All,
        block_len: Some(100),
        method: EntropyMethod::Correlation,
    };
    let rows = compute_scan(&spec).unwrap();
    assert_eq!(rows.len(), 81);
    let best = rows.iter().max_by(|a, b| a.entropy_bits.total_cmp(&b.entropy_bits)).unwrap();
    assert!(best.axis_value.abs() < 1e-9);
}

#[test]
fn ratio_scan_peaks_near_one() {
    let spec = ScanSpec {
        axis: ScanAxis::JyOverJx,
        params: ChainParams::new(200, 1.0, 1.0, 0.0).unwrap(),
        range: ScanRange::Stepped { start: 0.2, stop: 2.0, step: 0.05 },
        parity: Parity::All,
        block_len: Some(100),
        method: EntropyMethod::Correlation,
    };
    let rows = compute_scan(&spec).unwrap();
    let best = rows.iter().max_by(|a, b| a.entropy_bits.total_cmp(&b.entropy_bits)).unwrap();
    assert!((best.axis_value - 1.0).abs() < 0.051, "{best:?}");
}

#[test]
fn compare_examples() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("cmp.csv");
    let r = run_compare(&ChainParams::new(8, 1.0, 1.0, 0.5).unwrap(), &[2, 4], Some(&path)).unwrap();
    assert!(r.passed());
    let t = read_csv(&path).unwrap();
    assert_eq!(t.header, vec!["L", "fast", "oracle", "abs_diff"]);
    assert!(t.column("abs_diff").unwrap().iter().all(|&d| d < 1e-8));

    let r = run_compare(&ChainParams::new(8, 0.0, 0.0, 1.0).unwrap(), &[4], Some(&path)).unwrap();
    assert!(r.rows[0].abs_diff < 1e-12);

    let big = ChainParams::new(16, 1.0, 1.0, 1.0).unwrap();
    assert!(matches!(run_compare(&big, &[2], Some(&path)), Err(CliError::Usage(_))));
    assert!(matches!(run_compare(&big, &[], Some(&path)), Err(CliError::Usage(_))));
}

#[test]
fn exit_codes() {
    let ok = kitaev(&["compare", "-n", "8", "--h-field", "0.5", "--block-size", "2,4"]);
    assert_eq!(ok.status.code(), Some(0));
    for args in [
        vec!["compare", "-n", "18", "--block-size", "2"],
        vec!["compare", "-n", "16", "--h-field", "1", "--block-size", "2"],
        vec!["scan", "-n", "8", "--axis", "block_len", "--from", "1", "--to", "9"],
        vec!["scan", "-n", "8", "--axis", "h_field", "--from", "1", "--to", "0", "--block-size", "2"],
        vec!["entropy", "-n", "8", "--block-size", "0"],
        vec!["fit", "--input", "/nonexistent/curve.csv", "--from", "2", "--to", "8"],
        vec!["bogus"],
    ] {
        assert_eq!(kitaev(&args).status.code(), Some(2), "{args:?}");
    }
}

#[test]
fn fit_subcommand_reads_scan_output() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("crit.csv");
    run_scan(&block_scan(400, 1.0, 0.0, 2.0, 128.0, 2.0, Parity::Even), &path).unwrap();
    let out = kitaev(&["fit", "--input", path.to_str().unwrap(), "--from", "8", "--to", "128"]);
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    let slope: f64 = text.lines().find_map(|l| l.strip_prefix("slope = ")).unwrap().parse().unwrap();
    assert!(slope > 0.25 && slope < 0.45, "{slope}");
    assert!(Path::new(&path).exists());
}

#[test]
fn subcommands_run() {
    for args in [
        vec!["energy", "-n", "8", "--h-field", "0.5", "--modes", "--oracle"],
        vec!["degeneracy", "-n", "8", "--jy", "0.8"],
        vec!["spectrum", "-n", "40", "--block-size", "20", "--top-k", "5"],
        vec!["entropy", "-n", "40", "--block-size", "20", "--method", "cross-block"],
    ] {
        let out = kitaev(&args);
        assert!(out.status.success(), "{args:?}: {}", String::from_utf8_lossy(&out.stderr));
    }
    let out = kitaev(&["degeneracy", "-n", "8", "--jy", "0.8"]);
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.contains("even = 8") && text.contains("odd = 0"));
}

proptest! {
    #[test]
    fn csv_round_trip(rows in prop::collection::vec((1usize..10_000, any::<f64>().prop_filter("finite", |x| x.is_finite())), 0..40)) {
        let mut t = Table::new(&["block_len", "entropy_bits"], &[true, false]);
        t.rows = rows.iter().map(|&(l, e)| vec![l as f64, e]).collect();
        let mut buf = Vec::new();
        write_table(&mut buf, &t).unwrap();
        let back = read_table(buf.as_slice()).unwrap();
        prop_assert_eq!(&back.header, &t.header);
        prop_assert_eq!(back.rows.len(), t.rows.len());
        for (a, b) in back.rows.iter().zip(&t.rows) {
            prop_assert_eq!(a[0].to_bits(), b[0].to_bits());
            prop_assert_eq!(a[1].to_bits(), b[1].to_bits());
        }
    }
}
