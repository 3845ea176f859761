//! CSV rows for every command. Each row type reads back to an equal value.

use std::io::{Read, Write};

use qppsearch_core::qpp::{ClassKind, Qpp, SpreadMetrics};
use qppsearch_core::search::SearchRecord;
use qppsearch_core::sim::FerPoint;
use qppsearch_core::spectrum::DistanceSpectrum;
use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};

/// Rounds to `digits` decimal places.
pub fn round_to(x: f64, digits: i32) -> f64 {
    let scale = 10f64.powi(digits);
    (x * scale).round() / scale
}

fn head(spectrum: &DistanceSpectrum) -> String {
    spectrum.head().map(|t| t.to_string()).unwrap_or_default()
}

/// One line of a search result table: the winner of a class at one length
/// and, when a baseline was given, the baseline and the ratio of bounds.
/// Bounds are scaled (`BER·10⁷`, `FER·10⁵`) and rounded to four decimals,
/// the ratio to two.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SearchRow {
    pub length: usize,
    pub snr_db: f64,
    pub num_dist: usize,
    pub class: String,
    pub d_target: Option<usize>,
    pub q0: usize,
    pub q1: usize,
    pub q2: usize,
    pub d: usize,
    pub zeta_refined: usize,
    pub dmin_n1_w1: String,
    pub spectrum: String,
    pub tub_ber_e7: f64,
    pub tub_fer_e5: f64,
    /// Winning group size, inverse permutations included.
    pub no_pol: usize,
    /// Winning group members with exactly the winner's permutation.
    pub no_pol_same_perm: usize,
    pub groups_total: usize,
    pub baseline_q1: Option<usize>,
    pub baseline_q2: Option<usize>,
    pub baseline_d: Option<usize>,
    pub baseline_zeta_refined: Option<usize>,
    pub baseline_dmin_n1_w1: Option<String>,
    pub baseline_tub_ber_e7: Option<f64>,
    pub baseline_tub_fer_e5: Option<f64>,
    pub ratio: Option<f64>,
}

impl SearchRow {
    pub fn from_record(record: &SearchRecord) -> Self {
        let d_target = match record.class {
            ClassKind::SpreadTargetMaxZeta { d_target } => Some(d_target),
            _ => None,
        };
        let b = record.baseline.as_ref();
        Self {
            length: record.length,
            snr_db: record.snr_db,
            num_dist: record.num_dist,
            class: record.class.label().to_string(),
            d_target,
            q0: record.winner.q0,
            q1: record.winner.q1,
            q2: record.winner.q2,
            d: record.d,
            zeta_refined: record.zeta_refined,
            dmin_n1_w1: head(&record.spectrum),
            spectrum: record.spectrum.to_string(),
            tub_ber_e7: round_to(record.tub_ber * 1e7, 4),
            tub_fer_e5: round_to(record.tub_fer * 1e5, 4),
            no_pol: record.group_size,
            no_pol_same_perm: record.same_permutation_count,
            groups_total: record.groups_total,
            baseline_q1: b.map(|b| b.qpp.q1),
            baseline_q2: b.map(|b| b.qpp.q2),
            baseline_d: b.map(|b| b.d),
            baseline_zeta_refined: b.map(|b| b.zeta_refined),
            baseline_dmin_n1_w1: b.map(|b| head(&b.spectrum)),
            baseline_tub_ber_e7: b.map(|b| round_to(b.tub_ber * 1e7, 4)),
            baseline_tub_fer_e5: b.map(|b| round_to(b.tub_fer * 1e5, 4)),
            ratio: record.ratio.map(|r| round_to(r, 2)),
        }
    }

    pub fn winner(&self) -> Qpp {
        Qpp::with_shift(self.length, self.q0, self.q1, self.q2)
    }

    pub fn baseline(&self) -> Option<Qpp> {
        Some(Qpp::new(self.length, self.baseline_q1?, self.baseline_q2?))
    }

    /// Minimum distance parsed from `dmin_n1_w1`.
    pub fn dmin(&self) -> Option<u32> {
        parse_dmin(&self.dmin_n1_w1)
    }

    pub fn baseline_dmin(&self) -> Option<u32> {
        parse_dmin(self.baseline_dmin_n1_w1.as_deref()?)
    }
}

fn parse_dmin(field: &str) -> Option<u32> {
    field.split('/').next()?.parse().ok()
}

/// Output of `metrics`. Metric fields are empty for invalid polynomials.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct MetricsRow {
    pub length: usize,
    pub q0: usize,
    pub q1: usize,
    pub q2: usize,
    pub valid: bool,
    pub d: Option<usize>,
    pub zeta: Option<usize>,
    pub zeta_refined: Option<usize>,
    pub lpp_reducible: Option<bool>,
}

impl MetricsRow {
    pub fn of(qpp: &Qpp) -> Self {
        let mut row = Self {
            length: qpp.length,
            q0: qpp.q0,
            q1: qpp.q1,
            q2: qpp.q2,
            valid: false,
            d: None,
            zeta: None,
            zeta_refined: None,
            lpp_reducible: None,
        };
        if let Ok(perm) = qpp.permutation() {
            let m = SpreadMetrics::of(qpp, &perm);
            row.valid = true;
            row.d = Some(m.d);
            row.zeta = Some(m.zeta);
            row.zeta_refined = Some(m.zeta_refined);
            row.lpp_reducible = Some(qpp.is_lpp_reducible());
        }
        row
    }
}

/// One spectrum term of `spectrum --format csv`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SpectrumRow {
    pub length: usize,
    pub q1: usize,
    pub q2: usize,
    pub rank: usize,
    pub d: u32,
    pub n: u64,
    pub w: u64,
}

impl SpectrumRow {
    pub fn rows(qpp: &Qpp, spectrum: &DistanceSpectrum) -> Vec<Self> {
        spectrum
            .terms()
            .iter()
            .enumerate()
            .map(|(i, t)| Self {
                length: qpp.length,
                q1: qpp.q1,
                q2: qpp.q2,
                rank: i + 1,
                d: t.distance,
                n: t.multiplicity,
                w: t.info_weight,
            })
            .collect()
    }
}

/// One SNR point of `simulate`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SimRow {
    pub snr_db: f64,
    pub frames: u64,
    pub errors: u64,
    pub fer: f64,
    pub avg_iterations: f64,
    pub low_confidence: bool,
}

impl From<&FerPoint> for SimRow {
    fn from(p: &FerPoint) -> Self {
        Self {
            snr_db: p.snr_db,
            frames: p.frames_sent,
            errors: p.frames_in_error,
            fer: p.fer,
            avg_iterations: p.avg_iterations,
            low_confidence: p.low_confidence,
        }
    }
}

/// One point of a figure series.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FigureRow {
    pub series: String,
    pub length: usize,
    pub value: u64,
}

/// Writes a header and one line per row; the header is written even when
/// `rows` is empty.
pub fn write_csv<T: Serialize + CsvHeader, W: Write>(out: W, rows: &[T]) -> csv::Result<()> {
    let mut w = csv::WriterBuilder::new().has_headers(false).from_writer(out);
    w.write_record(header_of::<T>())?;
    for row in rows {
        w.serialize(row)?;
    }
    w.flush()?;
    Ok(())
}

pub fn read_csv<T: DeserializeOwned, R: Read>(input: R) -> csv::Result<Vec<T>> {
    csv::Reader::from_reader(input).deserialize().collect()
}

/// Column names of a row type.
pub fn header_of<T: CsvHeader>() -> &'static [&'static str] {
    T::HEADER
}

pub trait CsvHeader {
    const HEADER: &'static [&'static str];
}

impl CsvHeader for SearchRow {
    const HEADER: &'static [&'static str] = &[
        "length",
        "snr_db",
        "num_dist",
        "class",
        "d_target",
        "q0",
        "q1",
        "q2",
        "d",
        "zeta_refined",
        "dmin_n1_w1",
        "spectrum",
        "tub_ber_e7",
        "tub_fer_e5",
        "no_pol",
        "no_pol_same_perm",
        "groups_total",
        "baseline_q1",
        "baseline_q2",
        "baseline_d",
        "baseline_zeta_refined",
        "baseline_dmin_n1_w1",
        "baseline_tub_ber_e7",
        "baseline_tub_fer_e5",
        "ratio",
    ];
}

impl CsvHeader for MetricsRow {
    const HEADER: &'static [&'static str] = &["length", "q0", "q1", "q2", "valid", "d", "zeta", "zeta_refined", "lpp_reducible"];
}

impl CsvHeader for SpectrumRow {
    const HEADER: &'static [&'static str] = &["length", "q1", "q2", "rank", "d", "n", "w"];
}

impl CsvHeader for SimRow {
    const HEADER: &'static [&'static str] = &["snr_db", "frames", "errors", "fer", "avg_iterations", "low_confidence"];
}

impl CsvHeader for FigureRow {
    const HEADER: &'static [&'static str] = &["series", "length", "value"];
}
