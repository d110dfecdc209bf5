//! CSV and JSON output. Every float is written as `{:.16e}` (17 significant
//! digits) so files are byte-identical for identical inputs.

use std::fs::File;
use std::io::{BufWriter, Read, Write};
use std::path::Path;

use serde::Serialize;

use crate::coefficients::CoefficientTrace;
use crate::entropy::SieveSample;
use crate::pairs::PairRun;
use crate::phasespace::{CoherenceSeries, WignerGrid};
use crate::real::Real;
use crate::spectral::SpectralTable;
use crate::thermal::SiReport;

#[derive(Debug, thiserror::Error)]
pub enum IoError {
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Csv(#[from] csv::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
    #[error("csv schema: {0}")]
    Schema(String),
}

pub type IoResult<T> = std::result::Result<T, IoError>;

pub fn fmt_float(x: f64) -> String {
    format!("{x:.16e}")
}

/// Write a header and rows of floats.
pub fn write_rows<W: Write>(out: W, header: &[&str], rows: impl IntoIterator<Item = Vec<f64>>) -> IoResult<()> {
    let mut w = csv::WriterBuilder::new()
        .terminator(csv::Terminator::Any(b'\n'))
        .from_writer(out);
    w.write_record(header)?;
    for row in rows {
        if row.len() != header.len() {
            return Err(IoError::Schema(format!(
                "row has {} fields, header {}",
                row.len(),
                header.len()
            )));
        }
        w.write_record(row.iter().map(|&v| fmt_float(v)))?;
    }
    w.flush()?;
    Ok(())
}

/// Header and columns of a float CSV.
#[derive(Debug, Clone, PartialEq)]
pub struct CsvTable {
    pub header: Vec<String>,
    pub rows: Vec<Vec<f64>>,
}

impl CsvTable {
    pub fn column(&self, name: &str) -> Option<Vec<f64>> {
        let k = self.header.iter().position(|h| h == name)?;
        Some(self.rows.iter().map(|r| r[k]).collect())
    }
}

/// Read a float CSV, requiring the given header exactly.
pub fn read_rows<R: Read>(input: R, expected: &[&str]) -> IoResult<CsvTable> {
    let mut r = csv::Reader::from_reader(input);
    let header: Vec<String> = r.headers()?.iter().map(str::to_owned).collect();
    if header != expected {
        return Err(IoError::Schema(format!("expected header {expected:?}, got {header:?}")));
    }
    let mut rows = Vec::new();
    for rec in r.records() {
        let rec = rec?;
        let row = rec
            .iter()
            .map(|f| {
                f.trim()
                    .parse::<f64>()
                    .map_err(|e| IoError::Schema(format!("bad number {f:?}: {e}")))
            })
            .collect::<IoResult<Vec<f64>>>()?;
        rows.push(row);
    }
    Ok(CsvTable { header, rows })
}

pub fn create(path: &Path) -> IoResult<BufWriter<File>> {
    if let Some(dir) = path.parent() {
        std::fs::create_dir_all(dir)?;
    }
    Ok(BufWriter::new(File::create(path)?))
}

/// Pretty JSON with a trailing newline.
pub fn write_json<T: Serialize>(path: &Path, value: &T) -> IoResult<()> {
    let mut w = create(path)?;
    serde_json::to_writer_pretty(&mut w, value)?;
    w.write_all(b"\n")?;
    w.flush()?;
    Ok(())
}

pub const SPECTRUM_HEADER: [&str; 3] = ["omega", "xi", "sigma"];
pub const TRACE_HEADER: [&str; 5] = ["t", "gamma", "d1", "d2", "delta_m2"];
pub const SNAPSHOT_HEADER: [&str; 3] = ["x", "p", "w"];
pub const COHERENCE_HEADER: [&str; 4] = ["t", "c", "fit_rate", "fit_residual"];
pub const SIEVE_HEADER: [&str; 3] = ["r", "phi", "entropy"];
pub const PAIRS_HEADER: [&str; 3] = ["omega1", "omega2", "prob_density"];
pub const THERMAL_HEADER: [&str; 4] = ["T_kelvin", "lambda_th_m", "gamma_per_s", "td_coeff_s_m2"];

pub fn write_spectrum<R: Real, W: Write>(out: W, t: &SpectralTable<R>) -> IoResult<()> {
    let rows =
        (0..t.frequencies.len()).map(|k| vec![t.frequencies[k].f64(), t.xi_values[k].f64(), t.sigma_values[k].f64()]);
    write_rows(out, &SPECTRUM_HEADER, rows)
}

pub fn write_trace<R: Real, W: Write>(out: W, t: &CoefficientTrace<R>) -> IoResult<()> {
    let rows = (0..t.times.len()).map(|k| {
        vec![
            t.times[k].f64(),
            t.gamma[k].f64(),
            t.d1[k].f64(),
            t.d2[k].f64(),
            t.delta_m2[k].f64(),
        ]
    });
    write_rows(out, &TRACE_HEADER, rows)
}

/// Long format, x outer and p inner.
pub fn write_snapshot<R: Real, W: Write>(out: W, g: &WignerGrid<R>) -> IoResult<()> {
    let s = g.spec;
    let rows = (0..s.nx).flat_map(|i| (0..s.np).map(move |j| vec![s.x(i).f64(), s.p(j).f64(), g.at(i, j).f64()]));
    write_rows(out, &SNAPSHOT_HEADER, rows)
}

/// The fit columns repeat on every row; NaN when no fit was made.
pub fn write_coherence<R: Real, W: Write>(out: W, c: &CoherenceSeries<R>) -> IoResult<()> {
    let rate = c.fit_rate.map_or(f64::NAN, Real::f64);
    let res = c.fit_residual.map_or(f64::NAN, Real::f64);
    let rows = c.times.iter().zip(&c.c).map(|(t, v)| vec![t.f64(), v.f64(), rate, res]);
    write_rows(out, &COHERENCE_HEADER, rows)
}

pub fn write_sieve<W: Write>(out: W, scan: &[SieveSample]) -> IoResult<()> {
    write_rows(out, &SIEVE_HEADER, scan.iter().map(|s| vec![s.r, s.phi, s.entropy]))
}

pub fn write_pairs<W: Write>(out: W, run: &PairRun) -> IoResult<()> {
    let f = &run.table_frequencies;
    let n = f.len();
    let rows = (0..n).flat_map(|i| (0..n).map(move |j| vec![f[i], f[j], run.table[i * n + j]]));
    write_rows(out, &PAIRS_HEADER, rows)
}

/// Γ is NaN for reports without a mass.
pub fn write_thermal<W: Write>(out: W, reports: &[SiReport]) -> IoResult<()> {
    let rows = reports.iter().map(|r| {
        vec![
            r.temperature_k,
            r.lambda_th_m,
            r.gamma_per_s.unwrap_or(f64::NAN),
            r.td_coeff_s_m2,
        ]
    });
    write_rows(out, &THERMAL_HEADER, rows)
}
