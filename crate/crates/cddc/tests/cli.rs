use std::fs;
use std::path::Path;
use std::process::{Command, Output};

const BIN: &str = env!("CARGO_BIN_EXE_cddc");

fn run(dir: &Path, args: &[&str]) -> Output {
    Command::new(BIN)
        .current_dir(dir)
        .args(args)
        .output()
        .expect("spawn cddc")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

fn field(line: &str, k: usize) -> f64 {
    line.split(',').nth(k).unwrap().parse().unwrap()
}

fn report_value(text: &str, section: &str, key: &str) -> f64 {
    let body = text.split(section).nth(1).expect(section);
    let line = body
        .lines()
        .find(|l| l.trim_start().starts_with(key))
        .expect(key);
    line.split_whitespace().last().unwrap().parse().unwrap()
}

#[test]
fn index_prints_one_csv_row() {
    let tmp = tempfile::tempdir().unwrap();
    let o = run(
        tmp.path(),
        &["index", "--axis", "z", "--lambda", "1064", "--temp", "25"],
    );
    assert!(o.status.success(), "{}", stderr(&o));
    let text = stdout(&o);
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines[0], "axis,lambda_nm,temp_c,n,n_group,gd_ps_per_mm");
    assert_eq!(lines.len(), 2);
    assert!((field(lines[1], 3) - 1.830_151_89).abs() < 1e-8);
    assert!(field(lines[1], 4) > field(lines[1], 3));
}

#[test]
fn index_range_error_names_the_range() {
    let tmp = tempfile::tempdir().unwrap();
    let o = run(tmp.path(), &["index", "--axis", "y", "--lambda", "100"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("[400, 3500]"), "{}", stderr(&o));
}

#[test]
fn crystal_file_errors_exit_3() {
    let tmp = tempfile::tempdir().unwrap();
    let o = run(
        tmp.path(),
        &[
            "--crystal",
            "missing.toml",
            "index",
            "--pol",
            "V",
            "--lambda",
            "900",
        ],
    );
    assert_eq!(o.status.code(), Some(3));

    let bad = cddc::crystal::BUNDLED_KTP.replacen("form = \"one-pole\"", "form = \"cubic\"", 1);
    fs::write(tmp.path().join("bad.toml"), bad).unwrap();
    let o = run(
        tmp.path(),
        &[
            "--crystal",
            "bad.toml",
            "index",
            "--pol",
            "H",
            "--lambda",
            "900",
        ],
    );
    assert_eq!(o.status.code(), Some(3));
    assert!(stderr(&o).contains("cubic"));
}

#[test]
fn match_finds_the_experimental_point() {
    let tmp = tempfile::tempdir().unwrap();
    let o = run(tmp.path(), &["--out", "out", "match"]);
    assert!(o.status.success(), "{}", stderr(&o));
    let csv = fs::read_to_string(tmp.path().join("out/match.csv")).unwrap();
    let mut lines = csv.lines();
    assert_eq!(
        lines.next().unwrap(),
        "lambda_um,temp_c,pump_nm,blue_nm,red_nm,residual_plus,residual_minus"
    );
    let row = lines.next().unwrap();
    assert!((field(row, 2) - 532.3).abs() < 0.5);
    assert!((field(row, 3) - 904.3).abs() < 10.0);
    assert!((field(row, 4) - 1293.9).abs() < 15.0);
    assert!(field(row, 5) < 1e-2 && field(row, 6) < 1e-2);
}

#[test]
fn trace_writes_solved_rows_and_empty_window_exits_4() {
    let tmp = tempfile::tempdir().unwrap();
    let o = run(
        tmp.path(),
        &[
            "--out",
            "t",
            "match",
            "--temp",
            "50",
            "--trace",
            "20:120:11",
            "--gnuplot",
        ],
    );
    assert!(o.status.success(), "{}", stderr(&o));
    let csv = fs::read_to_string(tmp.path().join("t/curve.csv")).unwrap();
    assert!(
        csv.starts_with("lambda_um,temp_c,pump_nm,blue_nm,red_nm,residual_plus,residual_minus\n")
    );
    assert!(csv.lines().count() >= 2);
    assert!(tmp.path().join("t/curve.gp").exists());

    let o = run(tmp.path(), &["match", "--temp", "50", "--trace", "1:2:5"]);
    assert_eq!(o.status.code(), Some(4), "{}", stderr(&o));
}

#[test]
fn jsi_output_is_deterministic_and_confined() {
    let tmp = tempfile::tempdir().unwrap();
    let args = |dir: &'static str| {
        vec![
            "--out",
            dir,
            "jsi",
            "--grid",
            "96",
            "--span",
            "2.5",
            "--sigma",
            "0.05",
            "--temp",
            "68.9",
            "--filter",
            "auto:0.9:gaussian",
        ]
    };
    for dir in ["a", "b"] {
        let o = run(tmp.path(), &args(dir));
        assert!(o.status.success(), "{}", stderr(&o));
    }
    let entries: Vec<_> = fs::read_dir(tmp.path())
        .unwrap()
        .map(|e| e.unwrap().file_name())
        .collect();
    assert_eq!(entries.len(), 2, "{entries:?}");

    let mut names: Vec<_> = fs::read_dir(tmp.path().join("a"))
        .unwrap()
        .map(|e| e.unwrap().file_name().into_string().unwrap())
        .collect();
    names.sort();
    assert!(names.contains(&"jsi_plus.csv".to_string()));
    assert!(names.contains(&"marginal_minus_red_filtered.csv".to_string()));
    for n in &names {
        let a = fs::read(tmp.path().join("a").join(n)).unwrap();
        let b = fs::read(tmp.path().join("b").join(n)).unwrap();
        assert_eq!(a, b, "{n} differs between runs");
    }
    let jsi = fs::read_to_string(tmp.path().join("a/jsi_minus.csv")).unwrap();
    assert!(jsi.starts_with("lambda_s_nm,lambda_i_nm,jsi\n"));
    assert_eq!(jsi.lines().count(), 96 * 96 + 1);
    let marginal = fs::read_to_string(tmp.path().join("a/marginal_plus_blue.csv")).unwrap();
    assert!(marginal.starts_with("lambda_nm,intensity\n"));
}

#[test]
fn jsi_widths_follow_the_filter() {
    let tmp = tempfile::tempdir().unwrap();
    let o = run(
        tmp.path(),
        &[
            "--out", "o", "jsi", "--grid", "256", "--sigma", "0.03", "--filter", "auto:0.9",
        ],
    );
    assert!(o.status.success(), "{}", stderr(&o));
    let text = stdout(&o);
    let rows: Vec<&str> = text.lines().skip(1).collect();
    assert_eq!(rows.len(), 4);
    let expected = [1.1, 2.2, 0.60, 1.2];
    for (row, want) in rows.iter().zip(expected) {
        let w = field(row, 4);
        assert!((w - want).abs() <= 0.15 * want, "{row}");
        assert!(field(row, 5) < w);
    }
}

#[test]
fn coarse_grid_fails() {
    let tmp = tempfile::tempdir().unwrap();
    let o = run(
        tmp.path(),
        &["--out", "o", "jsi", "--grid", "8", "--temp", "68.9"],
    );
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn single_process_report_is_a_product_state() {
    let tmp = tempfile::tempdir().unwrap();
    let o = run(
        tmp.path(),
        &[
            "report",
            "--grid",
            "128",
            "--span",
            "3",
            "--sigma",
            "0.05",
            "--temp",
            "68.9",
            "--weights",
            "1:0",
        ],
    );
    assert!(o.status.success(), "{}", stderr(&o));
    let text = stdout(&o);
    assert!(text.contains("product state"));
    assert_eq!(report_value(&text, "unfiltered", "V_diag"), 0.0);
}

#[test]
fn filtering_raises_the_predicted_visibility() {
    let tmp = tempfile::tempdir().unwrap();
    let o = run(
        tmp.path(),
        &[
            "--out", "r", "report", "--grid", "128", "--span", "3", "--sigma", "0.05", "--temp",
            "68.9", "--filter", "0.9",
        ],
    );
    assert!(o.status.success(), "{}", stderr(&o));
    let text = fs::read_to_string(tmp.path().join("r/report.txt")).unwrap();
    assert_eq!(text, stdout(&o));
    assert_eq!(text.lines().filter(|l| l.contains("1297.6")).count(), 3);
    let raw = report_value(&text, "unfiltered", "V_diag");
    let filtered = report_value(&text, "\nfiltered", "V_diag");
    assert!(filtered >= raw, "{filtered} < {raw}");
}

#[test]
fn config_file_with_flag_overrides() {
    let tmp = tempfile::tempdir().unwrap();
    fs::write(
        tmp.path().join("run.toml"),
        "poling_um = 63.1\ntemp_c = 40.0\n",
    )
    .unwrap();
    let o = run(
        tmp.path(),
        &["--config", "run.toml", "match", "--temp", "60"],
    );
    assert!(o.status.success(), "{}", stderr(&o));
    assert!(stdout(&o).contains("temperature  60.000 C"));

    fs::write(tmp.path().join("typo.toml"), "poling = 63.1\n").unwrap();
    let o = run(tmp.path(), &["--config", "typo.toml", "match"]);
    assert_eq!(o.status.code(), Some(3));
}

#[test]
fn rates_report_and_error_codes() {
    let tmp = tempfile::tempdir().unwrap();
    let p = tmp.path();
    fs::write(
        p.join("counts.csv"),
        "sr_b,sr_r,cr,eta_b,eta_r,p_mw,b_r_thz\n22172.949,100000,1200,0.38,0.12,1,0.16116\n",
    )
    .unwrap();
    let o = run(p, &["--out", "o", "rates", "--counts", "counts.csv"]);
    assert!(o.status.success(), "{}", stderr(&o));
    let csv = fs::read_to_string(p.join("o/rates.csv")).unwrap();
    let mut lines = csv.lines();
    assert_eq!(
        lines.next().unwrap(),
        "pr,mu_b,mu_r,brightness_b,brightness_r,herald_b_raw,herald_b_corrected,herald_r_raw,herald_r_corrected"
    );
    let row = lines.next().unwrap();
    assert!((field(row, 2) - 0.451).abs() < 1e-6);
    assert!((field(row, 8) - 0.451).abs() < 1e-6);
    assert_eq!(row.split(',').nth(3), Some(""));

    fs::write(
        p.join("bad.csv"),
        "sr_b,sr_r,cr,eta_b,eta_r,p_mw\n1000,100000,200,0.38,0.12,1\n",
    )
    .unwrap();
    assert_eq!(
        run(p, &["rates", "--counts", "bad.csv"]).status.code(),
        Some(5)
    );
    fs::write(
        p.join("zero.csv"),
        "sr_b,sr_r,cr,eta_b,eta_r,p_mw\n1000,1000,0,0.38,0.12,1\n",
    )
    .unwrap();
    assert_eq!(
        run(p, &["rates", "--counts", "zero.csv"]).status.code(),
        Some(5)
    );
    fs::write(p.join("short.csv"), "sr_b,sr_r\n1,2\n").unwrap();
    assert_eq!(
        run(p, &["rates", "--counts", "short.csv"]).status.code(),
        Some(3)
    );
}
