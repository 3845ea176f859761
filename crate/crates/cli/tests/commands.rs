use std::path::Path;
use std::process::{Command, Output};

use qppsearch::records::{read_csv, write_csv, FigureRow, MetricsRow, SearchRow, SimRow, SpectrumRow};
use qppsearch_core::qpp::Qpp;
use qppsearch_core::spectrum::brute_force_spectrum;

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_qppsearch"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).unwrap()
}

fn ok(args: &[&str]) -> String {
    let out = run(args);
    assert!(
        out.status.success(),
        "{args:?} failed: {}",
        String::from_utf8_lossy(&out.stderr)
    );
    stdout(&out)
}

fn metrics(args: &[&str]) -> (Option<i32>, MetricsRow) {
    let mut full = vec!["metrics"];
    full.extend_from_slice(args);
    let out = run(&full);
    let rows: Vec<MetricsRow> = read_csv(out.stdout.as_slice()).unwrap();
    (out.status.code(), rows.into_iter().next().unwrap())
}

#[test]
fn metrics_of_table_polynomials() {
    let (code, row) = metrics(&["--length", "40", "--q1", "3", "--q2", "10"]);
    assert_eq!(code, Some(0));
    assert!(row.valid);
    assert_eq!((row.d, row.zeta_refined, row.lpp_reducible), (Some(4), Some(2), Some(false)));

    let (_, row) = metrics(&["--length", "168", "--q1", "101", "--q2", "84"]);
    assert_eq!(row.lpp_reducible, Some(true));
}

#[test]
fn invalid_polynomials_exit_with_status_3() {
    let (code, row) = metrics(&["--length", "40", "--q1", "2", "--q2", "0"]);
    assert_eq!(code, Some(3));
    assert!(!row.valid && row.d.is_none());
    assert_eq!(run(&["spectrum", "--length", "40", "--q1", "2", "--q2", "0"]).status.code(), Some(3));
}

#[test]
fn empty_classes_exit_with_status_4() {
    let out = run(&["search", "--length", "40", "--class", "d-target", "--d-target", "39"]);
    assert_eq!(out.status.code(), Some(4));
    assert!(String::from_utf8_lossy(&out.stderr).contains("empty"));
}

#[test]
fn exhausted_budgets_exit_with_status_5() {
    let out = run(&["spectrum", "--length", "40", "--q1", "3", "--q2", "10", "--node-limit", "10"]);
    assert_eq!(out.status.code(), Some(5));
}

#[test]
fn usage_errors_exit_with_status_2() {
    assert_eq!(run(&["metrics", "--length", "40"]).status.code(), Some(2));
    assert_eq!(run(&["search", "--length", "40", "--class", "best"]).status.code(), Some(2));
}

#[test]
fn spectrum_heads() {
    let text = ok(&["spectrum", "--length", "40", "--q1", "3", "--q2", "10", "--num-dist", "1"]);
    assert!(text.starts_with("11/1/3\n"), "{text}");
    assert!(text.contains("tub_fer_e5"));

    let csv = ok(&["spectrum", "--length", "48", "--q1", "7", "--q2", "12", "--num-dist", "1", "--format", "csv"]);
    let rows: Vec<SpectrumRow> = read_csv(csv.as_bytes()).unwrap();
    assert_eq!(rows.len(), 1);
    assert_eq!((rows[0].d, rows[0].n, rows[0].w), (13, 1, 3));
}

#[test]
fn small_spectra_match_brute_force() {
    for (q1, q2) in [(1, 2), (3, 4), (5, 6)] {
        let qpp = Qpp::new(8, q1, q2);
        let Ok(perm) = qpp.permutation() else { continue };
        let csv = ok(&[
            "spectrum", "--length", "8", "--q1", &q1.to_string(), "--q2", &q2.to_string(), "--num-dist", "3", "--format", "csv",
        ]);
        let rows: Vec<SpectrumRow> = read_csv(csv.as_bytes()).unwrap();
        let oracle = brute_force_spectrum(&perm, 3).unwrap();
        assert_eq!(rows, SpectrumRow::rows(&qpp, &oracle));
    }
}

#[test]
fn empty_figure_input_gives_a_header() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("fig.csv");
    ok(&["figure-data", "--kind", "min-distance", "--out", out.to_str().unwrap()]);
    assert_eq!(std::fs::read_to_string(out).unwrap(), "series,length,value\n");
}

fn write_rows(path: &Path, rows: &[SearchRow]) {
    write_csv(std::fs::File::create(path).unwrap(), rows).unwrap();
}

#[test]
fn spread_figure_fills_in_the_baseline() {
    let dir = tempfile::tempdir().unwrap();
    let input = dir.path().join("search.csv");
    let row = SearchRow {
        length: 448,
        snr_db: 3.25,
        num_dist: 3,
        class: "ls".into(),
        d_target: None,
        q0: 0,
        q1: 1,
        q2: 2,
        d: 30,
        zeta_refined: 1,
        dmin_n1_w1: "20/1/2".into(),
        spectrum: "20/1/2".into(),
        tub_ber_e7: 1.0,
        tub_fer_e5: 1.0,
        no_pol: 1,
        no_pol_same_perm: 1,
        groups_total: 1,
        baseline_q1: None,
        baseline_q2: None,
        baseline_d: None,
        baseline_zeta_refined: None,
        baseline_dmin_n1_w1: None,
        baseline_tub_ber_e7: None,
        baseline_tub_fer_e5: None,
        ratio: None,
    };
    write_rows(&input, &[row]);
    let csv = ok(&["figure-data", "--kind", "d", "--input", input.to_str().unwrap()]);
    let rows: Vec<FigureRow> = read_csv(csv.as_bytes()).unwrap();
    assert_eq!(
        rows,
        vec![
            FigureRow { series: "ls-tub-min".into(), length: 448, value: 30 },
            FigureRow { series: "lte".into(), length: 448, value: 28 },
        ]
    );
}

#[test]
fn simulation_output_does_not_depend_on_jobs() {
    let args = |jobs: &'static str| {
        vec![
            "simulate", "--length", "40", "--q1", "13", "--q2", "30", "--snr-db", "2,3,4", "--seed", "5", "--min-errors", "20",
            "--jobs", jobs,
        ]
    };
    let one = ok(&args("1"));
    assert_eq!(one, ok(&args("3")));
    assert_eq!(one, ok(&args("1")));
    let rows: Vec<SimRow> = read_csv(one.as_bytes()).unwrap();
    assert_eq!(rows.len(), 3);
    assert!(rows.windows(2).all(|w| w[1].fer < w[0].fer));
    assert!(one.starts_with("snr_db,frames,errors,fer,avg_iterations,low_confidence\n"));
}

#[test]
fn search_output_does_not_depend_on_jobs_or_resumption() {
    let dir = tempfile::tempdir().unwrap();
    let log = dir.path().join("progress.jsonl");
    let base = ["search", "--length", "40", "--class", "all", "--num-dist", "3"];
    let with = |extra: &[&str]| {
        let mut a = base.to_vec();
        a.extend_from_slice(extra);
        ok(&a)
    };
    let one = with(&["--jobs", "1"]);
    assert_eq!(one, with(&["--jobs", "2"]));
    assert_eq!(one, with(&["--progress", log.to_str().unwrap()]));
    let logged = std::fs::read_to_string(&log).unwrap().lines().count();
    assert!(logged > 1);
    // A second run finds every group in the log.
    assert_eq!(one, with(&["--progress", log.to_str().unwrap(), "--jobs", "2"]));
    assert_eq!(std::fs::read_to_string(&log).unwrap().lines().count(), logged);

    let rows: Vec<SearchRow> = read_csv(one.as_bytes()).unwrap();
    assert_eq!(rows.len(), 1);
    assert_eq!((rows[0].baseline_q1, rows[0].baseline_q2), (Some(3), Some(10)));
}
