//! File writers. Numbers are written with the shortest representation that
//! round-trips to the same `f64`.

use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::Path;

use serde::Serialize;

use super::{CaseSummary, Histogram, QuartetRecord, StrengthSample, SweepPoint};
use crate::error::Result;

fn create(path: &Path) -> Result<BufWriter<File>> {
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        std::fs::create_dir_all(dir)?;
    }
    Ok(BufWriter::new(File::create(path)?))
}

fn csv_writer(path: &Path) -> Result<csv::Writer<BufWriter<File>>> {
    Ok(csv::Writer::from_writer(create(path)?))
}

fn csv_err(e: csv::Error) -> crate::Error {
    match e.into_kind() {
        csv::ErrorKind::Io(io) => crate::Error::Io(io),
        other => crate::Error::Validation(format!("csv: {other:?}")),
    }
}

/// Pretty-printed JSON followed by a newline.
pub fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<()> {
    let mut w = create(path)?;
    serde_json::to_writer_pretty(&mut w, value)?;
    writeln!(w)?;
    w.flush()?;
    Ok(())
}

/// `case,d,n_total,n_flagged,percentage,g_mean,g_std,g_max,seed`
pub fn write_cases_csv(path: &Path, cases: &[CaseSummary], seed: u64) -> Result<()> {
    let mut w = csv_writer(path)?;
    w.write_record(["case", "d", "n_total", "n_flagged", "percentage", "g_mean", "g_std", "g_max", "seed"])
        .map_err(csv_err)?;
    for c in cases {
        w.serialize((&c.case, c.dim, c.n_total, c.n_flagged, c.percentage, c.g_mean, c.g_std, c.g_max, seed))
            .map_err(csv_err)?;
    }
    w.flush()?;
    Ok(())
}

/// One row per dimension; per-repetition strengths are `;`-separated.
pub fn write_sweep_csv(path: &Path, points: &[SweepPoint], seed: u64) -> Result<()> {
    let mut w = csv_writer(path)?;
    w.write_record([
        "d",
        "n_quartets",
        "repetitions",
        "fraction_min",
        "fraction_mean",
        "fraction_max",
        "fraction_std_err",
        "g_mean_per_rep",
        "g_std_err_per_rep",
        "seed",
    ])
    .map_err(csv_err)?;
    let join = |v: &[Option<f64>]| {
        v.iter().map(|x| x.map(|x| x.to_string()).unwrap_or_default()).collect::<Vec<_>>().join(";")
    };
    for p in points {
        w.serialize((
            p.d,
            p.n_quartets,
            p.repetitions.len(),
            p.fraction_min,
            p.fraction_mean,
            p.fraction_max,
            p.fraction_std_err,
            join(&p.g_mean_per_rep),
            join(&p.g_std_err_per_rep),
            seed,
        ))
        .map_err(csv_err)?;
    }
    w.flush()?;
    Ok(())
}

/// `bin_lo,bin_hi,count`
pub fn write_histogram_csv(path: &Path, h: &Histogram) -> Result<()> {
    let mut w = csv_writer(path)?;
    w.write_record(["bin_lo", "bin_hi", "count"]).map_err(csv_err)?;
    for (i, &c) in h.counts.iter().enumerate() {
        let (lo, hi) = h.edges(i);
        w.serialize((lo, hi, c)).map_err(csv_err)?;
    }
    w.flush()?;
    Ok(())
}

/// `index,stream_id,g`
pub fn write_strength_csv(path: &Path, samples: &[StrengthSample]) -> Result<()> {
    let mut w = csv_writer(path)?;
    w.write_record(["index", "stream_id", "g"]).map_err(csv_err)?;
    for s in samples {
        w.serialize((s.index, s.stream_id, s.g)).map_err(csv_err)?;
    }
    w.flush()?;
    Ok(())
}

/// One JSON object per line.
pub struct NdjsonWriter<W: Write> {
    inner: W,
}

impl NdjsonWriter<BufWriter<File>> {
    pub fn create(path: &Path) -> Result<Self> {
        Ok(Self { inner: create(path)? })
    }
}

impl<W: Write> NdjsonWriter<W> {
    pub fn new(inner: W) -> Self {
        Self { inner }
    }

    pub fn write(&mut self, record: &QuartetRecord) -> Result<()> {
        serde_json::to_writer(&mut self.inner, record)?;
        self.inner.write_all(b"\n")?;
        Ok(())
    }

    pub fn finish(mut self) -> Result<W> {
        self.inner.flush()?;
        Ok(self.inner)
    }
}

/// `x` rounded to `digits` significant digits, without exponent notation for
/// ordinary magnitudes.
pub fn fmt_sig(x: f64, digits: usize) -> String {
    if x == 0.0 || !x.is_finite() {
        return format!("{x}");
    }
    let mag = x.abs().log10().floor() as i32;
    if !(-5..=15).contains(&mag) {
        return format!("{:.*e}", digits.saturating_sub(1), x);
    }
    let decimals = (digits as i32 - 1 - mag).max(0) as usize;
    format!("{x:.decimals$}")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn significant_digits() {
        assert_eq!(fmt_sig(0.161234567, 6), "0.161235");
        assert_eq!(fmt_sig(7.2834, 6), "7.28340");
        assert_eq!(fmt_sig(123456.7, 6), "123457");
        assert_eq!(fmt_sig(0.0, 6), "0");
        assert_eq!(fmt_sig(1.5e-9, 3), "1.50e-9");
    }

    #[test]
    fn csv_files() {
        let dir = tempfile::tempdir().unwrap();
        let mut h = Histogram::new(0.0, 2.0, 2).unwrap();
        h.add(0.3).unwrap();
        let p = dir.path().join("sub/h.csv");
        write_histogram_csv(&p, &h).unwrap();
        assert_eq!(std::fs::read_to_string(&p).unwrap(), "bin_lo,bin_hi,count\n0.0,1.0,1\n1.0,2.0,0\n");

        let c = CaseSummary {
            case: "(ρ,ζ),(ξ,η)".into(),
            dim: 2,
            n_total: 10,
            n_flagged: 0,
            percentage: 0.0,
            g_mean: None,
            g_std: None,
            g_max: None,
        };
        let p = dir.path().join("t.csv");
        write_cases_csv(&p, &[c], 42).unwrap();
        let text = std::fs::read_to_string(&p).unwrap();
        assert_eq!(text.lines().nth(1).unwrap(), "\"(ρ,ζ),(ξ,η)\",2,10,0,0.0,,,,42");
    }

    #[test]
    fn ndjson_round_trip() {
        let r = QuartetRecord {
            d1: 0.1 + 0.2,
            d2: 1.0 / 3.0,
            dt1: 0.5,
            dt2: 0.25,
            nmutp: false,
            g: None,
            stream_id: 1 << 40,
            index: 7,
        };
        let mut w = NdjsonWriter::new(Vec::new());
        w.write(&r).unwrap();
        let bytes = w.finish().unwrap();
        let line = String::from_utf8(bytes).unwrap();
        assert!(line.ends_with('\n'));
        let back: QuartetRecord = serde_json::from_str(line.trim()).unwrap();
        assert_eq!(back, r);
    }
}
