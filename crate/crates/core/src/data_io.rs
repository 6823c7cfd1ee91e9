//! LIBSVM text datasets and trace files.
//!
//! ```text
//! 2 1:0.5 4:1.0   # label, then 1-based index:value pairs
//! 7 2:3
//! ```

use std::io::{BufRead, Read, Write};

use serde::{Deserialize, Serialize};

use crate::counters::OracleCounters;
use crate::error::{Error, Result};
use crate::linalg::SparseRowMatrix;
use crate::problems::Dataset;
use crate::trace::TraceRecord;

fn parse_err(line: usize, message: impl Into<String>) -> Error {
    Error::Parse {
        line,
        message: message.into(),
    }
}

fn parse_finite(tok: &str, line: usize, what: &str) -> Result<f64> {
    let v: f64 = tok
        .parse()
        .map_err(|_| parse_err(line, format!("bad {what} `{tok}`")))?;
    if !v.is_finite() {
        return Err(parse_err(line, format!("{what} `{tok}` is not finite")));
    }
    Ok(v)
}

/// Read a LIBSVM stream. Labels are remapped to `0..h` in ascending numeric
/// order; the original values end up in [`Dataset::classes`]. The feature
/// dimension is the largest index seen unless `forced_d` is given.
pub fn parse_libsvm<R: BufRead>(reader: R, forced_d: Option<usize>) -> Result<Dataset> {
    let mut raw_labels = Vec::new();
    let mut rows: Vec<Vec<(usize, f64)>> = Vec::new();
    let mut max_index = 0usize;
    for (i, line) in reader.lines().enumerate() {
        let lineno = i + 1;
        let line = line?;
        let body = match line.find('#') {
            Some(p) => &line[..p],
            None => &line[..],
        };
        let mut tokens = body.split_whitespace();
        let Some(label) = tokens.next() else { continue };
        raw_labels.push(parse_finite(label, lineno, "label")?);
        let mut row = Vec::new();
        let mut last = 0usize;
        for tok in tokens {
            let (idx, val) = tok
                .split_once(':')
                .ok_or_else(|| parse_err(lineno, format!("expected index:value, got `{tok}`")))?;
            let idx: usize = idx
                .parse()
                .map_err(|_| parse_err(lineno, format!("bad feature index `{idx}`")))?;
            if idx == 0 {
                return Err(parse_err(lineno, "feature indices are 1-based"));
            }
            if idx <= last {
                return Err(parse_err(lineno, format!("index {idx} does not increase after {last}")));
            }
            last = idx;
            row.push((idx - 1, parse_finite(val, lineno, "feature value")?));
        }
        max_index = max_index.max(last);
        rows.push(row);
    }
    if rows.is_empty() {
        return Err(Error::argument("LIBSVM input has no samples"));
    }
    let d = match forced_d {
        Some(d) if d < max_index => {
            return Err(Error::argument(format!(
                "forced dimension {d} is below the largest feature index {max_index}"
            )))
        }
        Some(d) => d,
        None => max_index,
    };
    let mut classes = raw_labels.clone();
    classes.sort_by(f64::total_cmp);
    classes.dedup_by(|a, b| a == b);
    let labels = raw_labels
        .iter()
        .map(|l| classes.partition_point(|c| c < l))
        .collect();
    let mut features = SparseRowMatrix::new(d);
    for row in &rows {
        features.push_row(row)?;
    }
    Dataset::new(features, labels, classes)
}

/// Write `data` in LIBSVM form with the original class values as labels.
pub fn write_libsvm<W: Write>(data: &Dataset, mut sink: W) -> Result<()> {
    let classes = data.classes();
    for (i, &b) in data.labels().iter().enumerate() {
        write!(sink, "{}", classes[b])?;
        let (idx, vals) = data.features().row(i);
        for (j, v) in idx.iter().zip(vals) {
            write!(sink, " {}:{}", j + 1, v)?;
        }
        writeln!(sink)?;
    }
    sink.flush()?;
    Ok(())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TraceFormat {
    Csv,
    Json,
}

impl TraceFormat {
    /// Pick the format from a file extension, CSV unless it is `.json`.
    pub fn from_path(path: &std::path::Path) -> Self {
        match path.extension().and_then(|e| e.to_str()) {
            Some(e) if e.eq_ignore_ascii_case("json") => TraceFormat::Json,
            _ => TraceFormat::Csv,
        }
    }
}

pub const TRACE_COLUMNS: [&str; 8] = ["k", "wall_ms", "fw_gap", "theory_bound", "fo", "sfo", "ifo", "lo"];

#[derive(Serialize, Deserialize)]
struct FlatRecord {
    k: u64,
    wall_ms: f64,
    fw_gap: f64,
    theory_bound: Option<f64>,
    fo: u64,
    sfo: u64,
    ifo: u64,
    lo: u64,
}

impl From<&TraceRecord> for FlatRecord {
    fn from(r: &TraceRecord) -> Self {
        FlatRecord {
            k: r.k,
            wall_ms: r.wall_ms,
            fw_gap: r.fw_gap,
            theory_bound: r.theory_bound,
            fo: r.counters.fo,
            sfo: r.counters.sfo,
            ifo: r.counters.ifo,
            lo: r.counters.lo,
        }
    }
}

impl From<FlatRecord> for TraceRecord {
    fn from(r: FlatRecord) -> Self {
        TraceRecord {
            k: r.k,
            wall_ms: r.wall_ms,
            fw_gap: r.fw_gap,
            theory_bound: r.theory_bound,
            counters: OracleCounters {
                fo: r.fo,
                sfo: r.sfo,
                ifo: r.ifo,
                lo: r.lo,
            },
        }
    }
}

fn csv_err(e: csv::Error) -> Error {
    let line = e.position().map_or(0, |p| p.line() as usize);
    match e.into_kind() {
        csv::ErrorKind::Io(io) => Error::Io(io),
        other => parse_err(line, format!("{other:?}")),
    }
}

fn float17(v: f64) -> String {
    format!("{v:.16e}")
}

/// Write trace records. Floats carry 17 significant digits in CSV; an
/// absent bound is an empty CSV field or a JSON `null`.
pub fn write_trace<W: Write>(records: &[TraceRecord], format: TraceFormat, mut sink: W) -> Result<()> {
    match format {
        TraceFormat::Csv => {
            let mut w = csv::Writer::from_writer(&mut sink);
            w.write_record(TRACE_COLUMNS).map_err(csv_err)?;
            for r in records {
                let c = &r.counters;
                w.write_record([
                    r.k.to_string(),
                    float17(r.wall_ms),
                    float17(r.fw_gap),
                    r.theory_bound.map(float17).unwrap_or_default(),
                    c.fo.to_string(),
                    c.sfo.to_string(),
                    c.ifo.to_string(),
                    c.lo.to_string(),
                ])
                .map_err(csv_err)?;
            }
            w.flush()?;
        }
        TraceFormat::Json => {
            let flat: Vec<FlatRecord> = records.iter().map(FlatRecord::from).collect();
            serde_json::to_writer_pretty(&mut sink, &flat).map_err(|e| Error::Io(e.into()))?;
            writeln!(sink)?;
        }
    }
    sink.flush()?;
    Ok(())
}

/// Read back a trace written by [`write_trace`].
pub fn read_trace<R: Read>(source: R, format: TraceFormat) -> Result<Vec<TraceRecord>> {
    match format {
        TraceFormat::Csv => {
            let mut r = csv::Reader::from_reader(source);
            let headers = r.headers().map_err(csv_err)?.clone();
            if headers.iter().ne(TRACE_COLUMNS) {
                return Err(parse_err(1, format!("unexpected trace header `{}`", headers.iter().collect::<Vec<_>>().join(","))));
            }
            r.deserialize::<FlatRecord>()
                .map(|row| row.map(TraceRecord::from).map_err(csv_err))
                .collect()
        }
        TraceFormat::Json => {
            let flat: Vec<FlatRecord> = serde_json::from_reader(source).map_err(|e| parse_err(e.line(), e.to_string()))?;
            Ok(flat.into_iter().map(TraceRecord::from).collect())
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn one_based_indices_and_label_mapping() {
        let d = parse_libsvm("7 1:0.5 4:1.0\n3 2:2\n".as_bytes(), None).unwrap();
        assert_eq!(d.classes(), &[3.0, 7.0]);
        assert_eq!(d.labels(), &[1, 0]);
        assert_eq!(d.d(), 4);
        assert_eq!(d.features().row(0), (&[0usize, 3][..], &[0.5, 1.0][..]));
    }

    #[test]
    fn comments_and_whitespace() {
        let text = "# header\n\n  1\t1:1   3:2 # tail\n   \n2 2:1\n";
        let d = parse_libsvm(text.as_bytes(), Some(10)).unwrap();
        assert_eq!((d.n(), d.d(), d.h()), (2, 10, 2));
    }

    #[test]
    fn errors_carry_line_numbers() {
        for (text, line) in [
            ("1 1:1\n1 3:1 2:1\n", 2),
            ("1 1:1\n\n1 x:1\n", 3),
            ("1 1:nan\n", 1),
            ("inf 1:1\n", 1),
            ("1 0:1\n", 1),
            ("1 1\n", 1),
        ] {
            match parse_libsvm(text.as_bytes(), None) {
                Err(Error::Parse { line: l, .. }) => assert_eq!(l, line, "{text:?}"),
                other => panic!("{text:?}: {other:?}"),
            }
        }
    }

    #[test]
    fn empty_input_is_an_argument_error() {
        assert!(matches!(parse_libsvm("# only\n\n".as_bytes(), None), Err(Error::Argument(_))));
        assert!(matches!(parse_libsvm("1 5:1\n".as_bytes(), Some(3)), Err(Error::Argument(_))));
    }

    #[test]
    fn csv_shapes() {
        let mut out = Vec::new();
        write_trace(&[], TraceFormat::Csv, &mut out).unwrap();
        assert_eq!(String::from_utf8(out).unwrap(), "k,wall_ms,fw_gap,theory_bound,fo,sfo,ifo,lo\n");
        let rec = TraceRecord {
            k: 1,
            wall_ms: 0.5,
            fw_gap: 0.1,
            theory_bound: None,
            counters: OracleCounters { fo: 1, sfo: 0, ifo: 0, lo: 2 },
        };
        let mut out = Vec::new();
        write_trace(std::slice::from_ref(&rec), TraceFormat::Csv, &mut out).unwrap();
        let text = String::from_utf8(out).unwrap();
        assert_eq!(text.lines().count(), 2);
        let back = read_trace(text.as_bytes(), TraceFormat::Csv).unwrap();
        assert_eq!(back, vec![rec]);
    }
}
